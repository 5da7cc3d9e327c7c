//! Moment-fitting cubature on the cylinder and a product-quadrature oracle.
//!
//! The oracle integrates in cylindrical coordinates: equispaced trapezoid in
//! the angle, Gauss-Legendre in the radius (with the Jacobian `r` folded into
//! the weights) and Gauss-Legendre in `z`. A level-`d` rule is exact for all
//! polynomials of total degree `d`.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::densela::{DenseMatrix, LuFactors};
use crate::error::{Error, Result};
use crate::extract::{ExtractionResult, Method};
use crate::meshgen::MeshFamily;
use crate::point::Point3;
use crate::polybasis::{basis_dimension, enumerate_basis, vandermonde};

/// Gauss-Legendre nodes and weights on `[-1, 1]` (ascending nodes).
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let qf = q as f64;
    for i in 0..q.div_ceil(2) {
        // Newton on P_q from the Tricomi initial guess
        let mut x = (PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(q, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(q, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(q: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=q {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if q == 0 {
        return (1.0, 0.0);
    }
    let d = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor product rule in `(angle, radius, z)`.
#[derive(Debug, Clone)]
pub struct ProductRule {
    level: usize,
    angles: Vec<(f64, f64)>,
    angle_weight: f64,
    radii: Vec<f64>,
    radial_weights: Vec<f64>,
    heights: Vec<f64>,
    height_weights: Vec<f64>,
}

impl ProductRule {
    /// Rule exact for total degree `level`: `2 level + 2` angles and
    /// `level / 2 + 1` Gauss nodes in both the radius and `z`.
    pub fn new(level: usize) -> Self {
        let n_angles = 2 * level + 2;
        let angles = (0..n_angles)
            .map(|a| {
                let t = 2.0 * PI * a as f64 / n_angles as f64;
                (t.cos(), t.sin())
            })
            .collect();
        let q = level / 2 + 1;
        let (x, w) = gauss_legendre(q);
        let radii: Vec<f64> = x.iter().map(|t| 0.5 * (t + 1.0)).collect();
        let radial_weights = radii.iter().zip(&w).map(|(r, w)| 0.5 * w * r).collect();
        Self {
            level,
            angles,
            angle_weight: 2.0 * PI / n_angles as f64,
            radii,
            radial_weights,
            heights: x,
            height_weights: w,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Number of integrand evaluations.
    pub fn size(&self) -> usize {
        self.angles.len() * self.radii.len() * self.heights.len()
    }

    /// `int_K f`. Partial sums per height are formed in parallel and added in
    /// a fixed order, so the result does not depend on the thread count.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(Point3) -> f64 + Sync,
    {
        let partial: Vec<f64> = self
            .heights
            .par_iter()
            .zip(&self.height_weights)
            .map(|(&z, &wz)| {
                let mut s_z = 0.0;
                for (&r, &wr) in self.radii.iter().zip(&self.radial_weights) {
                    let mut s_r = 0.0;
                    for &(c, s) in &self.angles {
                        s_r += f(Point3::new(r * c, r * s, z));
                    }
                    s_z += wr * s_r;
                }
                wz * s_z
            })
            .collect();
        self.angle_weight * partial.iter().sum::<f64>()
    }
}

/// Levels start here and double.
pub const ORACLE_START_LEVEL: usize = 8;
/// Maximum number of level doublings.
pub const ORACLE_MAX_DOUBLINGS: usize = 12;
/// Integrand evaluations allowed for a single level.
pub const ORACLE_MAX_EVALUATIONS: usize = 4_000_000_000;

/// Reference integral over the cylinder: product rules of doubling level
/// until two successive levels agree within `tol * max(1, |I|)`.
pub fn oracle_integral<F>(f: F, tol: f64) -> Result<f64>
where
    F: Fn(Point3) -> f64 + Sync,
{
    let mut level = ORACLE_START_LEVEL;
    let mut prev = ProductRule::new(level).integrate(&f);
    let mut diff = f64::INFINITY;
    for doubling in 1..=ORACLE_MAX_DOUBLINGS {
        level *= 2;
        let rule = ProductRule::new(level);
        if rule.size() > ORACLE_MAX_EVALUATIONS {
            return Err(Error::NonConvergence {
                doublings: doubling - 1,
                difference: diff,
            });
        }
        let cur = rule.integrate(&f);
        diff = (cur - prev).abs();
        if diff <= tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergence {
        doublings: ORACLE_MAX_DOUBLINGS,
        difference: diff,
    })
}

/// Integrals of the Wade basis elements, aligned with the basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub degree: usize,
    pub values: Vec<f64>,
}

/// `int_{-1}^{1} T_m`
fn chebyshev_t_integral(m: usize) -> f64 {
    if m % 2 == 1 {
        0.0
    } else {
        let mf = m as f64;
        2.0 / (1.0 - mf * mf)
    }
}

/// Closed-form moments. The disk integral of `U_k` along any ridge direction
/// is `pi` for `k = 0` and zero otherwise, so only `(i, 0, 0)` survive.
pub fn moments_wade(n: usize) -> MomentVector {
    let values = enumerate_basis(n)
        .indices()
        .iter()
        .map(|idx| {
            if idx.k != 0 {
                return 0.0;
            }
            let zf = if idx.i == 0 {
                2.0
            } else {
                SQRT_2 * chebyshev_t_integral(idx.i)
            };
            PI * zf
        })
        .collect();
    MomentVector { degree: n, values }
}

/// Moments computed with the product rule of level `n`.
pub fn moments_by_quadrature(n: usize) -> Result<MomentVector> {
    let basis = enumerate_basis(n);
    let rule = ProductRule::new(n);
    let mut values = vec![0.0; basis.len()];
    let mut points = Vec::with_capacity(rule.size());
    let mut weights = Vec::with_capacity(rule.size());
    for (&z, &wz) in rule.heights.iter().zip(&rule.height_weights) {
        for (&r, &wr) in rule.radii.iter().zip(&rule.radial_weights) {
            for &(c, s) in &rule.angles {
                points.push(Point3::new(r * c, r * s, z));
                weights.push(rule.angle_weight * wr * wz);
            }
        }
    }
    let v = vandermonde(&basis, &points)?;
    for (row, &w) in weights.iter().enumerate() {
        for (acc, &b) in values.iter_mut().zip(v.row(row)) {
            *acc += w * b;
        }
    }
    Ok(MomentVector { degree: n, values })
}

/// Nodes and weights of an interpolatory cubature rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubatureRule {
    pub degree: usize,
    pub method: Method,
    pub mesh: String,
    pub nodes: Vec<Point3>,
    pub weights: Vec<f64>,
}

impl CubatureRule {
    pub fn sum_weights(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `sum |w| / |sum w|`; equals 1 for positive rules.
    pub fn stability(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum::<f64>() / self.sum_weights().abs()
    }
}

/// Weights solving the moment system `V(nodes)^T w = b`.
pub fn cubature_weights(nodes: &ExtractionResult) -> Result<CubatureRule> {
    let n = nodes.degree;
    if nodes.len() != basis_dimension(n) {
        return Err(Error::DimensionMismatch {
            expected: format!("{} nodes", basis_dimension(n)),
            got: format!("{}", nodes.len()),
        });
    }
    let v: DenseMatrix = vandermonde(&enumerate_basis(n), &nodes.nodes)?;
    let mut w = moments_wade(n).values;
    LuFactors::new(&v)?.solve_transpose_in_place(&mut w);
    let mesh = match nodes.mesh_family {
        MeshFamily::Control(w) => w.to_string(),
        other => other.to_string(),
    };
    Ok(CubatureRule {
        degree: n,
        method: nodes.method,
        mesh,
        nodes: nodes.nodes.clone(),
        weights: w,
    })
}

/// `sum_i w_i f(x_i)`
pub fn apply_rule<F: Fn(Point3) -> f64>(rule: &CubatureRule, f: F) -> f64 {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&p, &w)| w * f(p))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_small_rules() {
        let (x, w) = gauss_legendre(1);
        assert_eq!((x[0], w[0]), (0.0, 2.0));
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!((x[2] - 0.6f64.sqrt()).abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for q in [4, 17, 64, 301] {
            let (x, w) = gauss_legendre(q);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in (0..2 * q).step_by(7) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((got - want).abs() < 1e-13, "q={q} deg={deg}");
            }
        }
    }

    #[test]
    fn oracle_simple_integrals() {
        let one = oracle_integral(|_| 1.0, 1e-12).unwrap();
        assert!((one - 2.0 * PI).abs() < 1e-13);
        let r2 = oracle_integral(|p| p.x * p.x + p.y * p.y, 1e-12).unwrap();
        assert!((r2 - PI).abs() < 1e-13);
    }

    #[test]
    fn product_rule_exact_on_monomials() {
        // int_K x^2 y^2 z^4 = (pi/24) * (2/5)
        let rule = ProductRule::new(8);
        let got = rule.integrate(|p| p.x * p.x * p.y * p.y * p.z.powi(4));
        assert!((got - PI / 24.0 * 0.4).abs() < 1e-14);
    }

    #[test]
    fn moments_examples() {
        let m = moments_wade(2);
        assert!((m.values[0] - 2.0 * PI).abs() < 1e-15);
        // index (2,0,0) is at position 4
        assert!((m.values[4] + 2.0 * SQRT_2 * PI / 3.0).abs() < 1e-14);
        assert!((m.values[4] + 2.96192).abs() < 1e-5);
        let basis = enumerate_basis(2);
        for (idx, v) in basis.indices().iter().zip(&m.values) {
            if idx.k >= 1 {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn single_node_rule() {
        let nodes = ExtractionResult {
            method: Method::Afp,
            degree: 0,
            ortho_steps: 0,
            mesh_family: MeshFamily::Wam1,
            indices: vec![0],
            nodes: vec![Point3::new(0.3, 0.1, -0.4)],
        };
        let rule = cubature_weights(&nodes).unwrap();
        assert!((rule.weights[0] - 2.0 * PI).abs() < 1e-15);
        assert!((apply_rule(&rule, |_| 1.0) - 2.0 * PI).abs() < 1e-15);
        assert_eq!(rule.stability(), 1.0);
    }
}
