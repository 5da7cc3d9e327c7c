//! Metric and error-curve runs over the cylinder meshes, plus the results
//! CSV they produce.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{
    interpolate, lebesgue_constant, lsq_fit, lsq_norm, vandermonde_condition, LsqProjector,
    WadePolynomial,
};
use crate::cubature::{apply_rule, cubature_weights, oracle_integral};
use crate::densela::dot;
use crate::error::{Error, Result};
use crate::extract::{Method, PreparedMesh};
use crate::io::fmt_real;
use crate::meshgen::{control_mesh, ControlSchedule, Mesh, Wam};
use crate::point::Point3;
use crate::polybasis::{enumerate_basis, BasisSet};
use crate::testfns::TestFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Lebesgue,
    CondInf,
    LsqNorm,
    InterpErr,
    LsqErr,
    CubErr,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Lebesgue => "lebesgue",
            Quantity::CondInf => "cond_inf",
            Quantity::LsqNorm => "lsq_norm",
            Quantity::InterpErr => "interp_err",
            Quantity::LsqErr => "lsq_err",
            Quantity::CubErr => "cub_err",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One line of a results CSV: `n,method,mesh,quantity,value`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub n: usize,
    /// `afp`, `dlp`, or `lsq` for quantities that do not depend on the nodes.
    pub method: String,
    pub mesh: Wam,
    pub quantity: Quantity,
    pub value: f64,
}

impl ResultRow {
    pub fn new(
        n: usize,
        method: impl Into<String>,
        mesh: Wam,
        quantity: Quantity,
        value: f64,
    ) -> Self {
        Self {
            n,
            method: method.into(),
            mesh,
            quantity,
            value,
        }
    }
}

/// Orders rows by degree, then method, keeping the relative order otherwise.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| (a.n, &a.method).cmp(&(b.n, &b.method)));
}

pub fn write_results<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "method", "mesh", "quantity", "value"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.method.clone(),
            r.mesh.to_string(),
            r.quantity.to_string(),
            fmt_real(r.value),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Appends rows to a results CSV, writing the header if the file is new.
pub fn append_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let exists = path.exists() && std::fs::metadata(path)?.len() > 0;
    let mut buf = Vec::new();
    write_results(&mut buf, rows)?;
    let body = if exists {
        let start = buf
            .iter()
            .position(|&b| b == b'\n')
            .map_or(buf.len(), |i| i + 1);
        &buf[start..]
    } else {
        &buf[..]
    };
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    f.write_all(body)?;
    Ok(())
}

/// Lebesgue constant and Vandermonde condition number of extracted nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeMetrics {
    pub lebesgue: f64,
    pub cond_inf: f64,
}

pub fn node_metrics(
    prepared: &PreparedMesh,
    method: Method,
    control: &Mesh,
) -> Result<NodeMetrics> {
    let nodes = prepared.extract(method)?;
    Ok(NodeMetrics {
        lebesgue: lebesgue_constant(&nodes, control.points())?,
        cond_inf: vandermonde_condition(&nodes)?,
    })
}

/// Sup norm of the least-squares operator built on the prepared mesh,
/// estimated over the control mesh.
pub fn lsq_operator_norm(prepared: &PreparedMesh, control: &Mesh) -> Result<f64> {
    lsq_norm(&LsqProjector::from_prepared(prepared)?, control.points())
}

/// Relative sup errors of several polynomials against sampled values,
/// streaming over the points so no evaluation matrix is stored.
pub fn relative_sup_errors(
    basis: &BasisSet,
    polys: &[&WadePolynomial],
    points: &[Point3],
    exact: &[f64],
) -> Result<Vec<f64>> {
    if points.len() != exact.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} values", points.len()),
            got: format!("{}", exact.len()),
        });
    }
    for p in polys {
        if p.coefficients().len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} coefficients", basis.len()),
                got: format!("{}", p.coefficients().len()),
            });
        }
    }
    let k = polys.len();
    let maxima = points
        .par_chunks(1024)
        .zip(exact.par_chunks(1024))
        .map_init(
            || (basis.evaluator(), vec![0.0; basis.len()]),
            |(ev, row), (pts, vals)| {
                let mut errs = vec![0.0_f64; k];
                for (&p, &f) in pts.iter().zip(vals) {
                    ev.eval_into(p, row)?;
                    for (e, poly) in errs.iter_mut().zip(polys) {
                        *e = e.max((f - dot(row, poly.coefficients())).abs());
                    }
                }
                Ok::<_, Error>(errs)
            },
        )
        .try_reduce(
            || vec![0.0; k],
            |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect()),
        )?;
    let scale = exact.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(maxima
        .into_iter()
        .map(|e| if scale > 0.0 { e / scale } else { e })
        .collect())
}

/// `|approx - exact| / |exact|`, or the absolute error when `exact == 0`.
pub fn relative_error(approx: f64, exact: f64) -> f64 {
    if exact != 0.0 {
        (approx - exact).abs() / exact.abs()
    } else {
        approx.abs()
    }
}

/// Errors of one test function at one degree.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeErrors {
    pub n: usize,
    /// `(method, interpolation error, cubature error)`
    pub nodes: Vec<(Method, f64, f64)>,
    pub lsq_err: f64,
}

impl DegreeErrors {
    pub fn rows(&self, wam: Wam) -> Vec<ResultRow> {
        let mut rows = Vec::new();
        for &(m, interp, cub) in &self.nodes {
            rows.push(ResultRow::new(
                self.n,
                m.name(),
                wam,
                Quantity::InterpErr,
                interp,
            ));
            rows.push(ResultRow::new(self.n, m.name(), wam, Quantity::CubErr, cub));
        }
        rows.push(ResultRow::new(
            self.n,
            "lsq",
            wam,
            Quantity::LsqErr,
            self.lsq_err,
        ));
        rows
    }
}

/// Interpolation, least-squares and cubature errors of `f` at one degree.
///
/// Sup errors are measured on `control`; cubature errors against
/// `reference_integral`.
pub fn degree_errors(
    prepared: &PreparedMesh,
    methods: &[Method],
    f: TestFunction,
    control: &Mesh,
    reference_integral: f64,
) -> Result<DegreeErrors> {
    let basis = enumerate_basis(prepared.degree());
    let mut polys = Vec::with_capacity(methods.len() + 1);
    let mut cubature = Vec::with_capacity(methods.len());
    for &m in methods {
        let nodes = prepared.extract(m)?;
        let samples: Vec<f64> = nodes.nodes.iter().map(|&p| f.eval(p)).collect();
        polys.push(interpolate(&nodes, &samples)?.polynomial);
        let rule = cubature_weights(&nodes)?;
        cubature.push(relative_error(
            apply_rule(&rule, |p| f.eval(p)),
            reference_integral,
        ));
    }
    let proj = LsqProjector::from_prepared(prepared)?;
    let mesh_samples: Vec<f64> = prepared
        .mesh()
        .points()
        .iter()
        .map(|&p| f.eval(p))
        .collect();
    polys.push(lsq_fit(&proj, &mesh_samples)?);

    let exact: Vec<f64> = control.points().par_iter().map(|&p| f.eval(p)).collect();
    let refs: Vec<&WadePolynomial> = polys.iter().collect();
    let errs = relative_sup_errors(&basis, &refs, control.points(), &exact)?;
    Ok(DegreeErrors {
        n: prepared.degree(),
        nodes: methods
            .iter()
            .zip(&errs)
            .zip(&cubature)
            .map(|((&m, &e), &c)| (m, e, c))
            .collect(),
        lsq_err: errs[methods.len()],
    })
}

/// Reference integral of a test function. The constant is integrated in
/// closed form.
pub fn reference_integral(f: TestFunction) -> Result<f64> {
    match f {
        TestFunction::Const1 => Ok(2.0 * std::f64::consts::PI),
        _ => oracle_integral(|p| f.eval(p), f.oracle_tol()),
    }
}

/// Settings shared by the metric and error runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub ortho_steps: usize,
    pub schedule: ControlSchedule,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ortho_steps: crate::extract::DEFAULT_ORTHO_STEPS,
            schedule: ControlSchedule::Standard,
        }
    }
}

/// Degree-`n` mesh prepared for extraction and least squares.
pub fn prepare(wam: Wam, n: usize, cfg: RunConfig) -> Result<PreparedMesh> {
    PreparedMesh::new(wam.generate(n)?, n, cfg.ortho_steps)
}

/// `lebesgue`, `cond_inf` and `lsq_norm` rows for one degree.
pub fn metrics_rows(
    wam: Wam,
    n: usize,
    methods: &[Method],
    cfg: RunConfig,
) -> Result<Vec<ResultRow>> {
    let prepared = prepare(wam, n, cfg)?;
    let control = control_mesh(wam, n, cfg.schedule)?;
    let mut rows = Vec::new();
    for &m in methods {
        let nm = node_metrics(&prepared, m, &control)?;
        rows.push(ResultRow::new(
            n,
            m.name(),
            wam,
            Quantity::Lebesgue,
            nm.lebesgue,
        ));
        rows.push(ResultRow::new(
            n,
            m.name(),
            wam,
            Quantity::CondInf,
            nm.cond_inf,
        ));
    }
    rows.push(ResultRow::new(
        n,
        "lsq",
        wam,
        Quantity::LsqNorm,
        lsq_operator_norm(&prepared, &control)?,
    ));
    Ok(rows)
}

/// Error rows for one degree and function.
pub fn error_rows(
    wam: Wam,
    n: usize,
    methods: &[Method],
    f: TestFunction,
    reference: f64,
    cfg: RunConfig,
) -> Result<Vec<ResultRow>> {
    let prepared = prepare(wam, n, cfg)?;
    let control = control_mesh(wam, n, cfg.schedule)?;
    Ok(degree_errors(&prepared, methods, f, &control, reference)?.rows(wam))
}

/// Target values for the node tables (`lebesgue`, `cond_inf` per degree
/// 5, 10, ..., 30) and the least-squares norms.
pub mod target {
    pub const DEGREES: [usize; 6] = [5, 10, 15, 20, 25, 30];
    pub const TABLE1: [(f64, f64); 6] = [
        (17.0, 18.2),
        (83.0, 177.0),
        (208.0, 384.0),
        (384.0, 746.0),
        (849.0, 1410.0),
        (988.0, 2650.0),
    ];
    pub const TABLE2: [(f64, f64); 6] = [
        (19.0, 19.4),
        (76.0, 115.0),
        (213.0, 440.0),
        (427.0, 705.0),
        (879.0, 1540.0),
        (1034.0, 2380.0),
    ];
    pub const TABLE3: [(f64, f64); 6] = [
        (30.0, 35.2),
        (115.0, 247.0),
        (350.0, 772.0),
        (617.0, 1190.0),
        (1388.0, 3090.0),
        (2597.0, 5320.0),
    ];
    pub const TABLE4: [(f64, f64); 6] = [
        (30.0, 29.9),
        (129.0, 176.0),
        (349.0, 638.0),
        (648.0, 782.0),
        (1520.0, 2310.0),
        (2143.0, 3940.0),
    ];
    /// (WAM1, WAM2)
    pub const TABLE5: [(f64, f64); 6] = [
        (4.8, 7.2),
        (10.2, 15.3),
        (10.7, 32.8),
        (21.1, 43.4),
        (15.8, 85.9),
        (22.6, 96.6),
    ];

    pub fn value_at(table: &[(f64, f64); 6], n: usize) -> Option<(f64, f64)> {
        DEGREES.iter().position(|&d| d == n).map(|i| table[i])
    }
}

/// Which target table to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    /// Lebesgue constant and condition number for a mesh and method.
    Nodes {
        number: u8,
        wam: Wam,
        method: Method,
    },
    /// Least-squares operator norms on both meshes.
    LeastSquares,
}

impl Table {
    pub fn from_number(t: u8) -> Result<Self> {
        let nodes = |wam, method| Table::Nodes {
            number: t,
            wam,
            method,
        };
        match t {
            1 => Ok(nodes(Wam::Wam1, Method::Afp)),
            2 => Ok(nodes(Wam::Wam2, Method::Afp)),
            3 => Ok(nodes(Wam::Wam1, Method::Dlp)),
            4 => Ok(nodes(Wam::Wam2, Method::Dlp)),
            5 => Ok(Table::LeastSquares),
            _ => Err(Error::InvalidArgument(format!(
                "no table {t}; expected 1..5"
            ))),
        }
    }

    pub fn target(self) -> &'static [(f64, f64); 6] {
        match self {
            Table::Nodes { number: 1, .. } => &target::TABLE1,
            Table::Nodes { number: 2, .. } => &target::TABLE2,
            Table::Nodes { number: 3, .. } => &target::TABLE3,
            Table::Nodes { .. } => &target::TABLE4,
            Table::LeastSquares => &target::TABLE5,
        }
    }

    pub fn header(self) -> [&'static str; 5] {
        match self {
            Table::Nodes { .. } => [
                "n",
                "lebesgue",
                "cond_inf",
                "target_lebesgue",
                "target_cond_inf",
            ],
            Table::LeastSquares => [
                "n",
                "lsq_norm_wam1",
                "lsq_norm_wam2",
                "target_wam1",
                "target_wam2",
            ],
        }
    }

    /// The two measured columns at degree `n`.
    pub fn measure(self, n: usize, cfg: RunConfig) -> Result<(f64, f64)> {
        match self {
            Table::Nodes { wam, method, .. } => {
                let prepared = prepare(wam, n, cfg)?;
                let control = control_mesh(wam, n, cfg.schedule)?;
                let m = node_metrics(&prepared, method, &control)?;
                Ok((m.lebesgue, m.cond_inf))
            }
            Table::LeastSquares => {
                let norm = |wam: Wam| -> Result<f64> {
                    let control = control_mesh(wam, n, cfg.schedule)?;
                    lsq_operator_norm(&prepare(wam, n, cfg)?, &control)
                };
                Ok((norm(Wam::Wam1)?, norm(Wam::Wam2)?))
            }
        }
    }
}

/// A measured table row next to the target one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub measured: (f64, f64),
    pub target: Option<(f64, f64)>,
}

pub fn write_table<W: Write>(out: W, table: Table, rows: &[TableRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(table.header())?;
    for r in rows {
        let (pa, pb) = r.target.map_or((String::new(), String::new()), |(a, b)| {
            (a.to_string(), b.to_string())
        });
        w.write_record([
            r.n.to_string(),
            fmt_real(r.measured.0),
            fmt_real(r.measured.1),
            pa,
            pb,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Ratio `max_control |p| / max_mesh |p|` for each coefficient vector; an
/// empirical lower estimate of the mesh constant.
pub fn wam_ratios(mesh: &Mesh, control: &Mesh, polys: &[&WadePolynomial]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(polys.len());
    for p in polys {
        let on_mesh = p.eval(mesh.points())?;
        let on_control = p.eval(control.points())?;
        let sup = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        out.push(sup(&on_control) / sup(&on_mesh));
    }
    Ok(out)
}
