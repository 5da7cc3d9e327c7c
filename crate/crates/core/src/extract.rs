//! Approximate Fekete Points and Discrete Leja Points extracted from a mesh.
//!
//! Both algorithms work on the Vandermonde matrix `V` (mesh points x basis),
//! optionally replaced by `Q = V P`, a discretely orthonormal version obtained
//! by repeated QR factorizations:
//!
//! * AFP: column-pivoted QR of `Q^T`; the first `N` pivot columns are the
//!   selected mesh points.
//! * DLP: row-pivoted LU of `Q`; the first `N` pivot rows are the selected
//!   mesh points. The result depends on the ordering of the basis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::densela::{
    lu_row_pivot, qr_col_pivot_transposed, qr_r_factor, solve_upper_right_in_place, DenseMatrix,
};
use crate::error::{Error, Result};
use crate::meshgen::{Mesh, MeshFamily};
use crate::point::Point3;
use crate::polybasis::{enumerate_basis, vandermonde, BasisSet};

/// Orthogonalization passes applied unless the caller asks otherwise.
pub const DEFAULT_ORTHO_STEPS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Approximate Fekete Points
    Afp,
    /// Discrete Leja Points
    Dlp,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Afp, Method::Dlp];

    pub fn name(self) -> &'static str {
        match self {
            Method::Afp => "afp",
            Method::Dlp => "dlp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "afp" => Ok(Method::Afp),
            "dlp" => Ok(Method::Dlp),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}

/// Change of basis to a discretely orthonormal basis on a mesh.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    transform: DenseMatrix,
    evaluated: DenseMatrix,
    steps: usize,
}

impl OrthoBasis {
    /// `P`, mapping Wade coefficients to the orthonormal basis.
    pub fn transform(&self) -> &DenseMatrix {
        &self.transform
    }

    /// `Q = V P` on the mesh the transform was built from.
    pub fn evaluated(&self) -> &DenseMatrix {
        &self.evaluated
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `max |Q^T Q - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.evaluated.transpose_matmul(&self.evaluated);
        gram.max_abs_diff(&DenseMatrix::identity(gram.rows()))
    }
}

/// `steps` passes of `Q_s R_s = Q_{s-1}`, `Q_s <- Q_{s-1} R_s^{-1}`;
/// the transform is the product of the inverse triangular factors.
pub fn orthogonalize(v: &DenseMatrix, steps: usize) -> Result<OrthoBasis> {
    let n = v.cols();
    let mut q = v.clone();
    let mut p = DenseMatrix::identity(n);
    for _ in 0..steps {
        let r = qr_r_factor(&q)?;
        solve_upper_right_in_place(&mut q, &r)?;
        solve_upper_right_in_place(&mut p, &r)?;
    }
    Ok(OrthoBasis {
        transform: p,
        evaluated: q,
        steps,
    })
}

/// Nodes selected from a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionResult {
    pub method: Method,
    pub degree: usize,
    pub ortho_steps: usize,
    pub mesh_family: MeshFamily,
    /// Positions of the nodes in the source mesh, in selection order.
    pub indices: Vec<usize>,
    pub nodes: Vec<Point3>,
}

impl ExtractionResult {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A mesh together with its (orthogonalized) Vandermonde matrix at a fixed
/// degree, shared by both extraction methods and by least squares.
#[derive(Debug, Clone)]
pub struct PreparedMesh {
    mesh: Mesh,
    basis: BasisSet,
    ortho: OrthoBasis,
}

impl PreparedMesh {
    pub fn new(mesh: Mesh, degree: usize, ortho_steps: usize) -> Result<Self> {
        let basis = enumerate_basis(degree);
        if mesh.len() < basis.len() {
            return Err(Error::InvalidArgument(format!(
                "mesh of {} points cannot carry {} basis functions of degree {degree}",
                mesh.len(),
                basis.len()
            )));
        }
        let v = vandermonde(&basis, mesh.points())?;
        let ortho = orthogonalize(&v, ortho_steps)?;
        Ok(Self { mesh, basis, ortho })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn ortho(&self) -> &OrthoBasis {
        &self.ortho
    }

    pub fn extract(&self, method: Method) -> Result<ExtractionResult> {
        let q = self.ortho.evaluated();
        let record = match method {
            Method::Afp => qr_col_pivot_transposed(q, Some(self.basis.len()))?,
            Method::Dlp => lu_row_pivot(q)?,
        };
        let indices = record.pivots().to_vec();
        let nodes = indices.iter().map(|&i| self.mesh.points()[i]).collect();
        Ok(ExtractionResult {
            method,
            degree: self.degree(),
            ortho_steps: self.ortho.steps(),
            mesh_family: self.mesh.family(),
            indices,
            nodes,
        })
    }
}

/// Approximate Fekete Points of degree `n` from `mesh`.
pub fn select_afp(mesh: &Mesh, n: usize, ortho_steps: usize) -> Result<ExtractionResult> {
    PreparedMesh::new(mesh.clone(), n, ortho_steps)?.extract(Method::Afp)
}

/// Discrete Leja Points of degree `n` from `mesh`.
pub fn select_dlp(mesh: &Mesh, n: usize, ortho_steps: usize) -> Result<ExtractionResult> {
    PreparedMesh::new(mesh.clone(), n, ortho_steps)?.extract(Method::Dlp)
}
