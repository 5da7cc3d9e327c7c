//! Chebyshev recurrences and the Wade orthonormal basis of the cylinder.
//!
//! The basis element with index `(i, k, j)` is
//! `U_k(x cos t + y sin t) * T~_{i-k}(z)` with `t = j pi / (k + 1)`, where
//! `U_k` is the Chebyshev polynomial of the second kind and
//! `T~_0 = 1`, `T~_m = sqrt(2) T_m` for `m >= 1`.
//!
//! Indices are ordered graded-lexicographically in `(i, k, j)`, so the basis
//! of degree `m` is a prefix of the basis of any degree `n >= m`.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;

use crate::densela::DenseMatrix;
use crate::error::{Error, Result};
use crate::point::Point3;

/// Slack on `|t| <= 1` accepted by [`cheb_t`] and [`cheb_u`].
pub const INTERVAL_TOL: f64 = 1e-14;

fn check_interval(t: f64) -> Result<f64> {
    if t.abs() <= 1.0 + INTERVAL_TOL {
        Ok(t.clamp(-1.0, 1.0))
    } else {
        Err(Error::OutsideInterval { value: t })
    }
}

#[inline]
fn recurrence(m: usize, t: f64, first: f64) -> f64 {
    match m {
        0 => 1.0,
        _ => {
            let (mut prev, mut cur) = (1.0, first);
            for _ in 1..m {
                let next = 2.0 * t * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Chebyshev polynomial of the first kind `T_m(t)`.
pub fn cheb_t(m: usize, t: f64) -> Result<f64> {
    let t = check_interval(t)?;
    Ok(recurrence(m, t, t))
}

/// Chebyshev polynomial of the second kind `U_m(t)`.
pub fn cheb_u(m: usize, t: f64) -> Result<f64> {
    let t = check_interval(t)?;
    Ok(recurrence(m, t, 2.0 * t))
}

/// Number of basis elements of total degree at most `n`.
pub const fn basis_dimension(n: usize) -> usize {
    (n + 1) * (n + 2) * (n + 3) / 6
}

/// Index `(i, k, j)` of a Wade basis element, `0 <= j <= k <= i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    /// total degree
    pub i: usize,
    /// degree of the disk factor
    pub k: usize,
    /// ridge direction
    pub j: usize,
}

impl MultiIndex {
    pub fn new(i: usize, k: usize, j: usize) -> Result<Self> {
        if j <= k && k <= i {
            Ok(Self { i, k, j })
        } else {
            Err(Error::InvalidArgument(format!(
                "multi-index ({i}, {k}, {j}) violates j <= k <= i"
            )))
        }
    }

    /// Ridge direction angle `j pi / (k + 1)`.
    pub fn angle(&self) -> f64 {
        self.j as f64 * PI / (self.k + 1) as f64
    }

    /// Position of this index in the graded ordering.
    pub fn position(&self) -> usize {
        let before_level = if self.i == 0 {
            0
        } else {
            basis_dimension(self.i - 1)
        };
        before_level + self.k * (self.k + 1) / 2 + self.j
    }
}

/// Evaluates one Wade basis element.
pub fn wade_eval(idx: MultiIndex, p: Point3) -> Result<f64> {
    p.check_in_cylinder()?;
    let (s, c) = idx.angle().sin_cos();
    let t = (p.x * c + p.y * s).clamp(-1.0, 1.0);
    let z = p.z.clamp(-1.0, 1.0);
    Ok(recurrence(idx.k, t, 2.0 * t) * scaled_cheb_t(idx.i - idx.k, z))
}

#[inline]
fn scaled_cheb_t(m: usize, z: f64) -> f64 {
    match m {
        0 => 1.0,
        _ => SQRT_2 * recurrence(m, z, z),
    }
}

/// The Wade basis of degree `n` in graded order.
#[derive(Debug, Clone)]
pub struct BasisSet {
    degree: usize,
    indices: Vec<MultiIndex>,
    // (cos, sin) of the ridge angle for each (k, j), at k (k + 1) / 2 + j
    directions: Vec<(f64, f64)>,
}

/// Enumerates the Wade basis of degree `n` in graded-lexicographic order.
pub fn enumerate_basis(n: usize) -> BasisSet {
    let mut indices = Vec::with_capacity(basis_dimension(n));
    for i in 0..=n {
        for k in 0..=i {
            for j in 0..=k {
                indices.push(MultiIndex { i, k, j });
            }
        }
    }
    let mut directions = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for k in 0..=n {
        for j in 0..=k {
            let (s, c) = (j as f64 * PI / (k + 1) as f64).sin_cos();
            directions.push((c, s));
        }
    }
    BasisSet {
        degree: n,
        indices,
        directions,
    }
}

impl BasisSet {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Reusable evaluator with its own scratch space.
    pub fn evaluator(&self) -> BasisEvaluator<'_> {
        let n = self.degree;
        BasisEvaluator {
            basis: self,
            cheb_z: vec![0.0; n + 1],
            ridge: vec![0.0; (n + 1) * (n + 2) / 2],
        }
    }

    /// Values of every basis element at `p`.
    pub fn eval(&self, p: Point3) -> Result<Vec<f64>> {
        let mut row = vec![0.0; self.len()];
        self.evaluator().eval_into(p, &mut row)?;
        Ok(row)
    }
}

/// Evaluates a whole [`BasisSet`] at a point, sharing the recurrences
/// between elements.
pub struct BasisEvaluator<'a> {
    basis: &'a BasisSet,
    cheb_z: Vec<f64>,
    ridge: Vec<f64>,
}

impl BasisEvaluator<'_> {
    /// Writes the basis values at `p` into `row` (length `N`).
    pub fn eval_into(&mut self, p: Point3, row: &mut [f64]) -> Result<()> {
        p.check_in_cylinder()?;
        let n = self.basis.degree;
        assert_eq!(
            row.len(),
            self.basis.len(),
            "row length must equal basis size"
        );
        let z = p.z.clamp(-1.0, 1.0);

        self.cheb_z[0] = 1.0;
        if n >= 1 {
            let (mut prev, mut cur) = (1.0, z);
            self.cheb_z[1] = SQRT_2 * z;
            for m in 2..=n {
                let next = 2.0 * z * cur - prev;
                prev = cur;
                cur = next;
                self.cheb_z[m] = SQRT_2 * cur;
            }
        }

        let mut off = 0;
        for k in 0..=n {
            for j in 0..=k {
                let (c, s) = self.basis.directions[off + j];
                let t = (p.x * c + p.y * s).clamp(-1.0, 1.0);
                self.ridge[off + j] = recurrence(k, t, 2.0 * t);
            }
            off += k + 1;
        }

        let mut pos = 0;
        for i in 0..=n {
            let mut off = 0;
            for k in 0..=i {
                let zf = self.cheb_z[i - k];
                for (dst, &r) in row[pos..pos + k + 1]
                    .iter_mut()
                    .zip(&self.ridge[off..off + k + 1])
                {
                    *dst = r * zf;
                }
                pos += k + 1;
                off += k + 1;
            }
        }
        Ok(())
    }
}

/// Vandermonde matrix with entry `(r, c) = basis[c](points[r])`.
///
/// Rows are assembled in parallel; every entry is computed independently so
/// the result does not depend on the thread count.
pub fn vandermonde(basis: &BasisSet, points: &[Point3]) -> Result<DenseMatrix> {
    let n = basis.len();
    if points.is_empty() {
        return Err(Error::InvalidArgument("no points".into()));
    }
    let mut data = vec![0.0; points.len() * n];
    data.par_chunks_mut(n * 64)
        .zip(points.par_chunks(64))
        .try_for_each_init(
            || basis.evaluator(),
            |ev, (rows, pts)| {
                for (row, &p) in rows.chunks_mut(n).zip(pts) {
                    ev.eval_into(p, row)?;
                }
                Ok::<_, Error>(())
            },
        )?;
    DenseMatrix::from_row_major(points.len(), n, data)
}

/// Evaluates the polynomial `sum_c coeffs[c] * basis[c]` at every point.
pub fn eval_polynomial(basis: &BasisSet, coeffs: &[f64], points: &[Point3]) -> Result<Vec<f64>> {
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} coefficients", basis.len()),
            got: format!("{}", coeffs.len()),
        });
    }
    points
        .par_chunks(256)
        .map_init(
            || (basis.evaluator(), vec![0.0; basis.len()]),
            |(ev, row), pts| {
                pts.iter()
                    .map(|&p| {
                        ev.eval_into(p, row)?;
                        Ok(crate::densela::dot(row, coeffs))
                    })
                    .collect::<Result<Vec<f64>>>()
            },
        )
        .collect::<Result<Vec<Vec<f64>>>>()
        .map(|blocks| blocks.concat())
}
