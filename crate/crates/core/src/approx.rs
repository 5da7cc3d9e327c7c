//! Interpolation at extracted nodes, Lebesgue constants, and discrete least
//! squares on a mesh.
//!
//! Coefficients are always expressed in the Wade basis; any orthogonalizing
//! transform is folded back before results leave this module.

use rayon::prelude::*;

use crate::densela::{axpy, cond_inf, DenseMatrix, LuFactors};
use crate::error::{Error, Result};
use crate::extract::{orthogonalize, ExtractionResult, PreparedMesh};
use crate::meshgen::Mesh;
use crate::point::Point3;
use crate::polybasis::{basis_dimension, enumerate_basis, eval_polynomial, vandermonde, BasisSet};

/// Points per block in sup-norm scans.
const SCAN_BLOCK: usize = 32;

/// A polynomial given by its Wade-basis coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct WadePolynomial {
    degree: usize,
    coefficients: Vec<f64>,
}

impl WadePolynomial {
    pub fn new(degree: usize, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != basis_dimension(degree) {
            return Err(Error::DimensionMismatch {
                expected: format!("{} coefficients", basis_dimension(degree)),
                got: format!("{}", coefficients.len()),
            });
        }
        Ok(Self {
            degree,
            coefficients,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, points: &[Point3]) -> Result<Vec<f64>> {
        eval_polynomial(&enumerate_basis(self.degree), &self.coefficients, points)
    }
}

/// Polynomial interpolant of degree `n` at a unisolvent node set.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolant {
    pub nodes: Vec<Point3>,
    pub polynomial: WadePolynomial,
}

impl Interpolant {
    pub fn degree(&self) -> usize {
        self.polynomial.degree
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.polynomial.coefficients
    }
}

fn node_matrix(nodes: &ExtractionResult) -> Result<(BasisSet, DenseMatrix)> {
    let basis = enumerate_basis(nodes.degree);
    if nodes.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} nodes for degree {}", basis.len(), nodes.degree),
            got: format!("{}", nodes.len()),
        });
    }
    let v = vandermonde(&basis, &nodes.nodes)?;
    Ok((basis, v))
}

/// Solves `V(nodes) c = samples`.
pub fn interpolate(nodes: &ExtractionResult, samples: &[f64]) -> Result<Interpolant> {
    let (_, v) = node_matrix(nodes)?;
    if samples.len() != v.rows() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} samples", v.rows()),
            got: format!("{}", samples.len()),
        });
    }
    let mut c = samples.to_vec();
    LuFactors::new(&v)?.solve_in_place(&mut c);
    Ok(Interpolant {
        nodes: nodes.nodes.clone(),
        polynomial: WadePolynomial::new(nodes.degree, c)?,
    })
}

/// Interpolant values at `pts`.
pub fn eval_interpolant(q: &Interpolant, pts: &[Point3]) -> Result<Vec<f64>> {
    q.polynomial.eval(pts)
}

/// `max_x sum_j |l_j(x)|` over the control points, with the Lagrange values
/// given by `p(x)^T V(nodes)^{-1}`.
pub fn lebesgue_constant(nodes: &ExtractionResult, control: &[Point3]) -> Result<f64> {
    let (basis, v) = node_matrix(nodes)?;
    let inv = LuFactors::new(&v)?.inverse();
    max_row_l1(&basis, control, &inv)
}

/// `max_x ||p(x)^T A||_1` over `points`, for an `N x K` matrix `A`.
///
/// Points are processed in blocks so each block streams `A` once.
fn max_row_l1(basis: &BasisSet, points: &[Point3], a: &DenseMatrix) -> Result<f64> {
    let (n, k) = a.shape();
    assert_eq!(n, basis.len(), "operator rows must match the basis");
    points
        .par_chunks(SCAN_BLOCK)
        .map_init(
            || {
                (
                    basis.evaluator(),
                    vec![0.0; SCAN_BLOCK * n],
                    vec![0.0; SCAN_BLOCK * k],
                )
            },
            |(ev, rows, out), pts| {
                let b = pts.len();
                for (p, row) in pts.iter().zip(rows.chunks_exact_mut(n)) {
                    ev.eval_into(*p, row)?;
                }
                let out = &mut out[..b * k];
                out.fill(0.0);
                for c in 0..n {
                    let arow = a.row(c);
                    for (i, orow) in out.chunks_exact_mut(k).enumerate() {
                        let v = rows[i * n + c];
                        if v != 0.0 {
                            axpy(v, arow, orow);
                        }
                    }
                }
                Ok(out
                    .chunks_exact(k)
                    .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
                    .fold(0.0_f64, f64::max))
            },
        )
        .try_reduce(|| 0.0, |x, y| Ok(x.max(y)))
}

/// Infinity-norm condition number of the Wade Vandermonde matrix at the nodes.
pub fn vandermonde_condition(nodes: &ExtractionResult) -> Result<f64> {
    let (_, v) = node_matrix(nodes)?;
    cond_inf(&v)
}

/// Discrete least-squares projector onto degree-`n` polynomials over a mesh.
#[derive(Debug, Clone)]
pub struct LsqProjector {
    mesh: Mesh,
    basis: BasisSet,
    /// `P`: Wade basis to discretely orthonormal basis.
    transform: DenseMatrix,
    /// `Q = V P`, `M x N` with orthonormal columns.
    q: DenseMatrix,
}

impl LsqProjector {
    /// Uses the prepared orthogonalization; a mesh prepared with zero steps
    /// gets one pass here, since the projector needs orthonormal columns.
    pub fn from_prepared(prepared: &PreparedMesh) -> Result<Self> {
        let o = prepared.ortho();
        let (transform, q) = if o.steps() == 0 {
            let extra = orthogonalize(o.evaluated(), 1)?;
            (
                o.transform().matmul(extra.transform()),
                extra.evaluated().clone(),
            )
        } else {
            (o.transform().clone(), o.evaluated().clone())
        };
        Ok(Self {
            mesh: prepared.mesh().clone(),
            basis: prepared.basis().clone(),
            transform,
            q,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn transform(&self) -> &DenseMatrix {
        &self.transform
    }

    pub fn q(&self) -> &DenseMatrix {
        &self.q
    }

    /// `max |Q^T Q - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.q.transpose_matmul(&self.q);
        gram.max_abs_diff(&DenseMatrix::identity(gram.rows()))
    }
}

/// Builds the projector with `steps` orthogonalization passes.
pub fn build_lsq(mesh: &Mesh, n: usize, steps: usize) -> Result<LsqProjector> {
    LsqProjector::from_prepared(&PreparedMesh::new(mesh.clone(), n, steps)?)
}

/// Least-squares fit of mesh samples: Wade coefficients `P (Q^T f)`.
pub fn lsq_fit(proj: &LsqProjector, samples: &[f64]) -> Result<WadePolynomial> {
    if samples.len() != proj.q.rows() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} samples", proj.q.rows()),
            got: format!("{}", samples.len()),
        });
    }
    let ortho_coeffs = proj.q.tr_mul_vec(samples);
    let coeffs = proj.transform.mul_vec(&ortho_coeffs);
    WadePolynomial::new(proj.degree(), coeffs)
}

/// `max_x ||Q P^T p(x)||_1` over `eval_on`.
pub fn lsq_norm(proj: &LsqProjector, eval_on: &[Point3]) -> Result<f64> {
    let kernel = proj.transform.matmul(&proj.q.transpose());
    max_row_l1(&proj.basis, eval_on, &kernel)
}

/// [`lsq_norm`] evaluated on the projector's own mesh.
pub fn lsq_norm_on_mesh(proj: &LsqProjector) -> Result<f64> {
    lsq_norm(proj, proj.mesh.points())
}

/// `max |exact - approx| / max |exact|` (absolute error when `exact` is
/// identically zero).
pub fn relative_sup_error(exact: &[f64], approx: &[f64]) -> f64 {
    assert_eq!(exact.len(), approx.len());
    let err = exact
        .iter()
        .zip(approx)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let scale = exact.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}
