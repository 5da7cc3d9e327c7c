use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use wamcyl::experiments::{
    append_results, degree_errors, metrics_rows, reference_integral, sort_rows, write_table,
    ResultRow, RunConfig, Table, TableRow,
};
use wamcyl::io::{sidecar_path, write_json, write_points_csv, write_weighted_points_csv};
use wamcyl::meshgen::{cheb_lobatto, disk_wam, padua};
use wamcyl::{
    control_mesh, cubature_weights, ControlSchedule, ExtractionResult, Mesh, Method, PreparedMesh,
    TestFunction, Wam,
};

use crate::{Cli, Command, ControlArgs, FunctionArg, MeshArg, MethodArg, Selection};

/// Largest degree accepted by the experiment commands.
const MAX_DEGREE: usize = 30;
/// Largest table degree computed without `--slow`.
const FAST_TABLE_DEGREE: usize = 20;

pub fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            bail!(wamcyl::Error::InvalidArgument(
                "--jobs must be at least 1".into()
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::Gen { mesh, degree, out } => gen(mesh, degree, &out.out),
        Command::Extract { sel, method, out } => extract(&sel, method.into(), &out.out),
        Command::Rule { sel, method, out } => rule(&sel, method.into(), &out.out),
        Command::Metrics {
            sel,
            method,
            control,
            out,
        } => metrics(&sel, methods(method), &control, &out.out),
        Command::Errors {
            sel,
            method,
            function,
            control,
            out,
        } => errors(&sel, methods(method), &function, &control, &out.out),
        Command::Reproduce {
            table,
            slow,
            ortho_steps,
            control,
            out,
        } => reproduce(table, slow, ortho_steps, &control, &out.out),
    }
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Afp => Method::Afp,
            MethodArg::Dlp => Method::Dlp,
        }
    }
}

impl From<FunctionArg> for TestFunction {
    fn from(f: FunctionArg) -> Self {
        match f {
            FunctionArg::F1 => TestFunction::F1,
            FunctionArg::F2 => TestFunction::F2,
            FunctionArg::F3 => TestFunction::F3,
            FunctionArg::F4 => TestFunction::F4,
            FunctionArg::F5 => TestFunction::F5,
            FunctionArg::F6 => TestFunction::F6,
            FunctionArg::Const1 => TestFunction::Const1,
        }
    }
}

fn methods(m: Option<MethodArg>) -> Vec<Method> {
    m.map_or_else(|| Method::ALL.to_vec(), |m| vec![m.into()])
}

fn usage(msg: String) -> anyhow::Error {
    wamcyl::Error::InvalidArgument(msg).into()
}

fn wam_of(mesh: MeshArg) -> Result<Wam> {
    match mesh {
        MeshArg::Wam1 => Ok(Wam::Wam1),
        MeshArg::Wam2 => Ok(Wam::Wam2),
        other => Err(usage(format!(
            "--mesh {} is not a cylinder mesh; use wam1 or wam2",
            mesh_name(other)
        ))),
    }
}

fn mesh_name(m: MeshArg) -> &'static str {
    match m {
        MeshArg::Wam1 => "wam1",
        MeshArg::Wam2 => "wam2",
        MeshArg::Disk => "disk",
        MeshArg::Padua => "padua",
        MeshArg::Cheb => "cheb",
    }
}

fn single_degree(sel: &Selection) -> Result<usize> {
    match sel.degree.0.as_slice() {
        [n] => Ok(*n),
        _ => Err(usage("this command takes a single --degree".into())),
    }
}

fn experiment_degrees(sel: &Selection) -> Result<Vec<usize>> {
    let mut degrees = sel.degree.0.clone();
    degrees.sort_unstable();
    degrees.dedup();
    if let Some(bad) = degrees.iter().find(|&&n| n == 0 || n > MAX_DEGREE) {
        return Err(usage(format!("degree {bad} outside 1..={MAX_DEGREE}")));
    }
    Ok(degrees)
}

fn schedule(c: &ControlArgs) -> Result<ControlSchedule> {
    match c.control_mult {
        Some(0) => Err(usage("--control-mult must be at least 1".into())),
        Some(m) => Ok(ControlSchedule::Multiplier(m)),
        None => Ok(ControlSchedule::Standard),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

#[derive(Serialize)]
struct MeshSidecar {
    family: String,
    degree: usize,
    cardinality: usize,
}

fn gen(mesh: MeshArg, degree: usize, out: &Path) -> Result<()> {
    let m: Mesh = match mesh {
        MeshArg::Wam1 => Wam::Wam1.generate(degree)?,
        MeshArg::Wam2 => Wam::Wam2.generate(degree)?,
        MeshArg::Disk => disk_wam(degree)?,
        MeshArg::Padua => padua(degree)?,
        MeshArg::Cheb => cheb_lobatto(degree)?,
    };
    ensure_dir(out)?;
    let path = out.join(format!("mesh_{}_n{degree}.csv", mesh_name(mesh)));
    write_points_csv(&path, m.points())?;
    write_json(
        &sidecar_path(&path),
        &MeshSidecar {
            family: m.family().to_string(),
            degree,
            cardinality: m.len(),
        },
    )?;
    println!("{} points -> {}", m.len(), path.display());
    Ok(())
}

fn extract_nodes(sel: &Selection, method: Method) -> Result<(Wam, ExtractionResult)> {
    let wam = wam_of(sel.mesh)?;
    let n = single_degree(sel)?;
    // Degree 0 still needs a nonempty mesh to select from.
    let mesh = wam.generate(n.max(1))?;
    let nodes = PreparedMesh::new(mesh, n, sel.ortho_steps)?.extract(method)?;
    Ok((wam, nodes))
}

#[derive(Serialize)]
struct ExtractionSidecar<'a> {
    method: Method,
    degree: usize,
    mesh_family: String,
    ortho_steps: usize,
    cardinality: usize,
    indices: &'a [usize],
}

fn extract(sel: &Selection, method: Method, out: &Path) -> Result<()> {
    let (wam, nodes) = extract_nodes(sel, method)?;
    ensure_dir(out)?;
    let path = out.join(format!("nodes_{wam}_{method}_n{}.csv", nodes.degree));
    write_points_csv(&path, &nodes.nodes)?;
    write_json(
        &sidecar_path(&path),
        &ExtractionSidecar {
            method,
            degree: nodes.degree,
            mesh_family: nodes.mesh_family.to_string(),
            ortho_steps: nodes.ortho_steps,
            cardinality: nodes.len(),
            indices: &nodes.indices,
        },
    )?;
    println!("{} nodes -> {}", nodes.len(), path.display());
    Ok(())
}

#[derive(Serialize)]
struct RuleSidecar {
    degree: usize,
    method: Method,
    mesh: String,
    sum_weights: f64,
    min_weight: f64,
    stability: f64,
}

fn rule(sel: &Selection, method: Method, out: &Path) -> Result<()> {
    let (wam, nodes) = extract_nodes(sel, method)?;
    let rule = cubature_weights(&nodes)?;
    ensure_dir(out)?;
    let path = out.join(format!("rule_{wam}_{method}_n{}.csv", rule.degree));
    write_weighted_points_csv(&path, &rule.nodes, &rule.weights)?;
    write_json(
        &sidecar_path(&path),
        &RuleSidecar {
            degree: rule.degree,
            method,
            mesh: rule.mesh.clone(),
            sum_weights: rule.sum_weights(),
            min_weight: rule.min_weight(),
            stability: rule.stability(),
        },
    )?;
    println!(
        "{} nodes, sum of weights {:.15}, stability {:.4} -> {}",
        rule.nodes.len(),
        rule.sum_weights(),
        rule.stability(),
        path.display()
    );
    Ok(())
}

fn write_rows(path: &Path, mut rows: Vec<ResultRow>) -> Result<()> {
    sort_rows(&mut rows);
    append_results(path, &rows).with_context(|| format!("writing {}", path.display()))?;
    for r in &rows {
        println!(
            "n={:<3} {:<4} {} {:<10} {:.6e}",
            r.n, r.method, r.mesh, r.quantity, r.value
        );
    }
    Ok(())
}

fn metrics(sel: &Selection, methods: Vec<Method>, control: &ControlArgs, out: &Path) -> Result<()> {
    let wam = wam_of(sel.mesh)?;
    let degrees = experiment_degrees(sel)?;
    let cfg = RunConfig {
        ortho_steps: sel.ortho_steps,
        schedule: schedule(control)?,
    };
    let per_degree = degrees
        .par_iter()
        .map(|&n| metrics_rows(wam, n, &methods, cfg))
        .collect::<wamcyl::Result<Vec<_>>>()?;
    ensure_dir(out)?;
    write_rows(&out.join("results.csv"), per_degree.concat())
}

fn errors(
    sel: &Selection,
    methods: Vec<Method>,
    functions: &[FunctionArg],
    control: &ControlArgs,
    out: &Path,
) -> Result<()> {
    let wam = wam_of(sel.mesh)?;
    let degrees = experiment_degrees(sel)?;
    let schedule = schedule(control)?;
    let mut fns: Vec<TestFunction> = if functions.is_empty() {
        TestFunction::STANDARD_SET.to_vec()
    } else {
        functions.iter().map(|&f| f.into()).collect()
    };
    fns.sort();
    fns.dedup();
    let references = fns
        .iter()
        .map(|&f| Ok((f, reference_integral(f)?)))
        .collect::<wamcyl::Result<BTreeMap<_, _>>>()?;

    let per_degree = degrees
        .par_iter()
        .map(
            |&n| -> wamcyl::Result<Vec<(TestFunction, Vec<ResultRow>)>> {
                let prepared = PreparedMesh::new(wam.generate(n)?, n, sel.ortho_steps)?;
                let control = control_mesh(wam, n, schedule)?;
                references
                    .iter()
                    .map(|(&f, &reference)| {
                        let e = degree_errors(&prepared, &methods, f, &control, reference)?;
                        Ok((f, e.rows(wam)))
                    })
                    .collect()
            },
        )
        .collect::<wamcyl::Result<Vec<_>>>()?;

    let mut by_function: BTreeMap<TestFunction, Vec<ResultRow>> = BTreeMap::new();
    for (f, rows) in per_degree.into_iter().flatten() {
        by_function.entry(f).or_default().extend(rows);
    }
    ensure_dir(out)?;
    for (f, rows) in by_function {
        let path: PathBuf = out.join(format!("errors_{f}.csv"));
        println!("{f}:");
        write_rows(&path, rows)?;
    }
    Ok(())
}

fn reproduce(
    table: u8,
    slow: bool,
    ortho_steps: usize,
    control: &ControlArgs,
    out: &Path,
) -> Result<()> {
    let t = Table::from_number(table)?;
    let cfg = RunConfig {
        ortho_steps,
        schedule: schedule(control)?,
    };
    let degrees: Vec<usize> = wamcyl::experiments::target::DEGREES
        .into_iter()
        .filter(|&n| slow || n <= FAST_TABLE_DEGREE)
        .collect();
    let rows = degrees
        .par_iter()
        .map(|&n| {
            Ok(TableRow {
                n,
                measured: t.measure(n, cfg)?,
                target: wamcyl::experiments::target::value_at(t.target(), n),
            })
        })
        .collect::<wamcyl::Result<Vec<_>>>()?;
    ensure_dir(out)?;
    let path = out.join(format!("table{table}.csv"));
    let file =
        std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_table(file, t, &rows)?;
    let header = t.header();
    println!(
        "{:>3} {:>14} {:>14} {:>10} {:>10}",
        header[0], header[1], header[2], "target", "target"
    );
    for r in &rows {
        let (a, b) = r.target.unwrap_or((f64::NAN, f64::NAN));
        println!(
            "{:>3} {:>14.4} {:>14.4} {:>10} {:>10}",
            r.n, r.measured.0, r.measured.1, a, b
        );
    }
    println!("-> {}", path.display());
    Ok(())
}
