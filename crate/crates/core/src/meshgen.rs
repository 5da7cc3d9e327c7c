//! Weakly admissible meshes of the cylinder and their 1D/2D building blocks.
//!
//! Generation order is deterministic and documented per family; duplicates
//! (points closer than [`DEDUP_TOL`]) keep their earliest occurrence. Pivot
//! tie-breaking in the extraction step relies on this order.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point3;

/// Euclidean distance under which two generated points are considered equal.
pub const DEDUP_TOL: f64 = 1e-12;

/// The two cylinder meshes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wam {
    /// Polar disk grid times Chebyshev-Lobatto points in `z`.
    Wam1,
    /// Padua points of the `(r, z)` plane rotated about the `z` axis.
    Wam2,
}

impl Wam {
    pub fn generate(self, n: usize) -> Result<Mesh> {
        match self {
            Wam::Wam1 => wam1(n),
            Wam::Wam2 => wam2(n),
        }
    }

    /// Closed-form cardinality of the degree-`n` mesh.
    pub fn cardinality(self, n: usize) -> usize {
        match self {
            Wam::Wam1 => (n + 1).pow(3),
            Wam::Wam2 if n % 2 == 0 => (n * n + n + 1) * (n + 2) / 2,
            Wam::Wam2 => (n + 1) * (n + 1) * (n + 2) / 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Wam::Wam1 => "wam1",
            Wam::Wam2 => "wam2",
        }
    }
}

impl fmt::Display for Wam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Wam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wam1" => Ok(Wam::Wam1),
            "wam2" => Ok(Wam::Wam2),
            other => Err(Error::InvalidArgument(format!("unknown WAM '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFamily {
    ChebLobatto1D,
    Padua2D,
    DiskPolar,
    Wam1,
    Wam2,
    /// A finer same-family WAM used to estimate sup norms.
    Control(Wam),
}

impl From<Wam> for MeshFamily {
    fn from(w: Wam) -> Self {
        match w {
            Wam::Wam1 => MeshFamily::Wam1,
            Wam::Wam2 => MeshFamily::Wam2,
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshFamily::ChebLobatto1D => f.write_str("cheb"),
            MeshFamily::Padua2D => f.write_str("padua"),
            MeshFamily::DiskPolar => f.write_str("disk"),
            MeshFamily::Wam1 => f.write_str("wam1"),
            MeshFamily::Wam2 => f.write_str("wam2"),
            MeshFamily::Control(w) => write!(f, "control-{w}"),
        }
    }
}

/// An ordered point set with its family and degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    family: MeshFamily,
    degree: usize,
    points: Vec<Point3>,
}

impl Mesh {
    /// Wraps an arbitrary point list, checking that every point is in the
    /// cylinder. No deduplication is applied.
    pub fn new(family: MeshFamily, degree: usize, points: Vec<Point3>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !p.in_cylinder()) {
            return Err(Error::OutsideDomain {
                x: p.x,
                y: p.y,
                z: p.z,
            });
        }
        Ok(Self {
            family,
            degree,
            points,
        })
    }

    fn generated(family: MeshFamily, degree: usize, points: Vec<Point3>) -> Self {
        let points = dedup_points(points, DEDUP_TOL);
        debug_assert!(points.iter().all(Point3::in_cylinder));
        Self {
            family,
            degree,
            points,
        }
    }

    pub fn family(&self) -> MeshFamily {
        self.family
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same points in a different order (`order` must be a permutation).
    pub fn reordered(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.points.len());
        Self {
            family: self.family,
            degree: self.degree,
            points: order.iter().map(|&i| self.points[i]).collect(),
        }
    }
}

/// Removes points within `tol` of an earlier point, preserving order.
pub fn dedup_points(points: Vec<Point3>, tol: f64) -> Vec<Point3> {
    let cell = |v: f64| (v / (tol * 4.0)).floor() as i64;
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let mut kept: Vec<Point3> = Vec::with_capacity(points.len());
    'outer: for p in points {
        let key = (cell(p.x), cell(p.y), cell(p.z));
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(bucket) = grid.get(&(key.0 + dx, key.1 + dy, key.2 + dz)) {
                        if bucket.iter().any(|&q| kept[q].distance(&p) < tol) {
                            continue 'outer;
                        }
                    }
                }
            }
        }
        grid.entry(key).or_default().push(kept.len());
        kept.push(p);
    }
    kept
}

fn require_degree(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument(
            "mesh degree must be at least 1".into(),
        ))
    } else {
        Ok(())
    }
}

/// `cos(k pi / n)` for `k = 0..=n`, written as `sin(pi (n - 2k) / 2n)` so the
/// set is exactly symmetric and contains an exact zero for even `n`.
pub fn lobatto_nodes(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![1.0];
    }
    let two_n = 2.0 * n as f64;
    (0..=n)
        .map(|k| (PI * (n as f64 - 2.0 * k as f64) / two_n).sin())
        .collect()
}

/// Chebyshev-Lobatto points of `[-1, 1]`, embedded on the `x` axis.
pub fn cheb_lobatto(n: usize) -> Result<Mesh> {
    require_degree(n)?;
    let pts = lobatto_nodes(n)
        .into_iter()
        .map(|x| Point3::new(x, 0.0, 0.0))
        .collect();
    Ok(Mesh::generated(MeshFamily::ChebLobatto1D, n, pts))
}

/// First-family Padua points as `(r, z)` pairs, in generation order.
///
/// `r` runs over the `n + 1` Lobatto nodes of degree `n`, `z` over the
/// `n + 2` nodes of degree `n + 1`, keeping pairs with odd index sum.
pub fn padua_pairs(n: usize) -> Vec<(f64, f64)> {
    let rs = lobatto_nodes(n);
    let zs = lobatto_nodes(n + 1);
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for (a, &r) in rs.iter().enumerate() {
        for (b, &z) in zs.iter().enumerate() {
            if (a + b) % 2 == 1 {
                out.push((r, z));
            }
        }
    }
    out
}

/// Padua points of degree `n` in the square, embedded as `(r, 0, z)`.
pub fn padua(n: usize) -> Result<Mesh> {
    require_degree(n)?;
    let pts = padua_pairs(n)
        .into_iter()
        .map(|(r, z)| Point3::new(r, 0.0, z))
        .collect();
    Ok(Mesh::generated(MeshFamily::Padua2D, n, pts))
}

/// Angles of the polar disk grid: `n + 1` multiples of `pi / (n + 1)` for
/// odd `n`, `n + 2` multiples of `pi / (n + 2)` for even `n`.
fn disk_angles(n: usize) -> Vec<f64> {
    let count = if n % 2 == 1 { n + 1 } else { n + 2 };
    (0..count).map(|j| j as f64 * PI / count as f64).collect()
}

fn disk_pairs(n: usize) -> Vec<(f64, f64)> {
    let angles: Vec<(f64, f64)> = disk_angles(n)
        .into_iter()
        .map(|t| (t.cos(), t.sin()))
        .collect();
    let mut out = Vec::with_capacity(lobatto_nodes(n).len() * angles.len());
    for r in lobatto_nodes(n) {
        for &(c, s) in &angles {
            out.push((r * c, r * s));
        }
    }
    out
}

/// Rotation-invariant polar grid of the unit disk, `(n + 1)^2` points.
pub fn disk_wam(n: usize) -> Result<Mesh> {
    require_degree(n)?;
    let pts = disk_pairs(n)
        .into_iter()
        .map(|(x, y)| Point3::new(x, y, 0.0))
        .collect();
    Ok(Mesh::generated(MeshFamily::DiskPolar, n, pts))
}

/// Disk grid times Chebyshev-Lobatto points in `z`; `(n + 1)^3` points.
///
/// Generation order: radius, then angle, then height.
pub fn wam1(n: usize) -> Result<Mesh> {
    require_degree(n)?;
    let zs = lobatto_nodes(n);
    let mut pts = Vec::with_capacity(disk_pairs(n).len() * zs.len());
    for (x, y) in disk_pairs(n) {
        for &z in &zs {
            pts.push(Point3::new(x, y, z));
        }
    }
    Ok(Mesh::generated(MeshFamily::Wam1, n, pts))
}

/// Padua points of the `(r, z)` plane placed at the `n + 1` angles
/// `j pi / (n + 1)`; axis points are shared between the copies.
///
/// Generation order: radius, then angle, then height.
pub fn wam2(n: usize) -> Result<Mesh> {
    require_degree(n)?;
    let rs = lobatto_nodes(n);
    let zs = lobatto_nodes(n + 1);
    let angles: Vec<(f64, f64)> = (0..=n)
        .map(|j| {
            let t = j as f64 * PI / (n + 1) as f64;
            (t.cos(), t.sin())
        })
        .collect();
    let mut pts = Vec::with_capacity((n + 1) * (n + 1) * (n + 2) / 2);
    for (a, &r) in rs.iter().enumerate() {
        for &(c, s) in &angles {
            for (b, &z) in zs.iter().enumerate() {
                if (a + b) % 2 == 1 {
                    pts.push(Point3::new(r * c, r * s, z));
                }
            }
        }
    }
    Ok(Mesh::generated(MeshFamily::Wam2, n, pts))
}

/// Degree of the control mesh used to estimate sup norms at degree `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ControlSchedule {
    /// `4n` up to `n = 20`, then `2n` (WAM1) or `3n` up to 25 and `2n`
    /// beyond (WAM2).
    #[default]
    Standard,
    /// A fixed multiple of `n`.
    Multiplier(usize),
}

impl ControlSchedule {
    pub fn degree(self, wam: Wam, n: usize) -> usize {
        match self {
            ControlSchedule::Multiplier(m) => m * n,
            ControlSchedule::Standard => match wam {
                Wam::Wam1 if n <= 20 => 4 * n,
                Wam::Wam1 => 2 * n,
                Wam::Wam2 if n <= 20 => 4 * n,
                Wam::Wam2 if n <= 25 => 3 * n,
                Wam::Wam2 => 2 * n,
            },
        }
    }
}

/// Same-family WAM of the scheduled degree.
pub fn control_mesh(wam: Wam, n: usize, schedule: ControlSchedule) -> Result<Mesh> {
    require_degree(n)?;
    let m = schedule.degree(wam, n);
    if m == 0 {
        return Err(Error::InvalidArgument(
            "control multiplier must be positive".into(),
        ));
    }
    let mut mesh = wam.generate(m)?;
    mesh.family = MeshFamily::Control(wam);
    Ok(mesh)
}
