//! Polynomial interpolation, least squares and cubature on the cylinder
//! `x^2 + y^2 <= 1, -1 <= z <= 1`, built on weakly admissible meshes and
//! the Wade orthogonal basis.

pub mod approx;
pub mod cubature;
pub mod densela;
pub mod error;
pub mod experiments;
pub mod extract;
pub mod io;
pub mod meshgen;
pub mod point;
pub mod polybasis;
pub mod testfns;

pub use approx::{
    build_lsq, eval_interpolant, interpolate, lebesgue_constant, lsq_fit, lsq_norm,
    lsq_norm_on_mesh, relative_sup_error, vandermonde_condition, Interpolant, LsqProjector,
    WadePolynomial,
};
pub use cubature::{
    apply_rule, cubature_weights, gauss_legendre, moments_wade, oracle_integral, CubatureRule,
    MomentVector, ProductRule,
};
pub use densela::{lu_row_pivot, qr_col_pivot, DenseMatrix, LuFactors, PivotRecord};
pub use error::{Error, Result};
pub use extract::{select_afp, select_dlp, ExtractionResult, Method, PreparedMesh};
pub use meshgen::{control_mesh, dedup_points, ControlSchedule, Mesh, MeshFamily, Wam};
pub use point::Point3;
pub use polybasis::{
    basis_dimension, cheb_t, cheb_u, enumerate_basis, vandermonde, wade_eval, BasisSet, MultiIndex,
};
pub use testfns::{eval_test, TestFunction};
