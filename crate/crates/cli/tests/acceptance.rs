//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fail.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wamcyl::cubature::moments_by_quadrature;
use wamcyl::experiments::{
    degree_errors, node_metrics, reference_integral, relative_sup_errors, target, Table,
};
use wamcyl::{
    control_mesh, cubature_weights, enumerate_basis, interpolate, lsq_fit, moments_wade,
    oracle_integral, vandermonde, ControlSchedule, LsqProjector, Method, PreparedMesh,
    TestFunction, WadePolynomial, Wam,
};

type Outcome = Result<Vec<String>, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn prepared(wam: Wam, n: usize) -> PreparedMesh {
    PreparedMesh::new(wam.generate(n).expect("mesh"), n, 2).expect("orthogonalization")
}

fn within_factor(got: f64, want: f64, factor: f64) -> bool {
    got <= want * factor && got >= want / factor
}

fn cardinality() -> Outcome {
    let mut fails = Vec::new();
    let checks = [
        ("wam1(5)", Wam::Wam1.generate(5).unwrap().len(), 216),
        ("wam2(5)", Wam::Wam2.generate(5).unwrap().len(), 126),
        ("wam2(6)", Wam::Wam2.generate(6).unwrap().len(), 172),
    ];
    for (what, got, want) in checks {
        if got != want {
            fails.push(format!("{what} = {got}, want {want}"));
        }
    }
    for wam in [Wam::Wam1, Wam::Wam2] {
        let p = prepared(wam, 5);
        for m in Method::ALL {
            let got = p.extract(m).map(|r| r.len()).unwrap_or(0);
            if got != 56 {
                fails.push(format!("{wam}/{m} extracted {got}, want 56"));
            }
        }
    }
    if fails.is_empty() {
        Ok(vec![
            "216 / 126 / 172 points, 56 nodes on both meshes and methods".into(),
        ])
    } else {
        Err(fails.join("; "))
    }
}

fn reproduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0_f64;
    for wam in [Wam::Wam1, Wam::Wam2] {
        for n in [3usize, 5, 8, 12] {
            let p = prepared(wam, n);
            let control = control_mesh(wam, n, ControlSchedule::Standard).unwrap();
            let basis = enumerate_basis(n);
            let proj = LsqProjector::from_prepared(&p).map_err(|e| e.to_string())?;
            let node_sets: Vec<_> = Method::ALL.iter().map(|&m| p.extract(m).unwrap()).collect();
            for _ in 0..50 {
                let c: Vec<f64> = (0..basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let poly = WadePolynomial::new(n, c).unwrap();
                let mut fits = Vec::new();
                for nodes in &node_sets {
                    let samples = poly.eval(&nodes.nodes).unwrap();
                    fits.push(
                        interpolate(nodes, &samples)
                            .map_err(|e| e.to_string())?
                            .polynomial,
                    );
                }
                let samples = poly.eval(p.mesh().points()).unwrap();
                fits.push(lsq_fit(&proj, &samples).unwrap());
                let exact = poly.eval(control.points()).unwrap();
                let refs: Vec<&WadePolynomial> = fits.iter().collect();
                for e in relative_sup_errors(&basis, &refs, control.points(), &exact).unwrap() {
                    worst = worst.max(e);
                }
            }
        }
    }
    let line = format!("worst relative sup error {worst:.2e} (limit 1e-9)");
    if worst <= 1e-9 {
        Ok(vec![line])
    } else {
        Err(line)
    }
}

fn cubature_exactness() -> Outcome {
    let mut worst_moment = 0.0_f64;
    let mut worst_sum = 0.0_f64;
    let mut notes = Vec::new();
    for wam in [Wam::Wam1, Wam::Wam2] {
        for n in [2usize, 5, 8, 12, 16, 20] {
            let p = prepared(wam, n);
            let b = moments_wade(n);
            for m in Method::ALL {
                let nodes = p.extract(m).map_err(|e| e.to_string())?;
                let rule = cubature_weights(&nodes).map_err(|e| e.to_string())?;
                let v = vandermonde(&enumerate_basis(n), &rule.nodes).unwrap();
                let applied = v.tr_mul_vec(&rule.weights);
                let err = applied
                    .iter()
                    .zip(&b.values)
                    .fold(0.0_f64, |acc, (a, w)| acc.max((a - w).abs()));
                worst_moment = worst_moment.max(err);
                worst_sum = worst_sum.max((rule.sum_weights() - 2.0 * PI).abs());
                if n == 20 {
                    notes.push(format!("{wam}/{m} n=20 stability {:.2}", rule.stability()));
                }
            }
        }
    }
    let line = format!(
        "max basis-moment error {worst_moment:.2e} (limit 1e-9), max |sum w - 2pi| {worst_sum:.2e} (limit 1e-10)"
    );
    if worst_moment <= 1e-9 && worst_sum <= 1e-10 {
        notes.insert(0, line);
        Ok(notes)
    } else {
        Err(line)
    }
}

fn node_tables() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for t in 1..=4u8 {
        let Table::Nodes { wam, method, .. } = Table::from_number(t).unwrap() else {
            unreachable!()
        };
        for n in [5usize, 10] {
            let p = prepared(wam, n);
            let control = control_mesh(wam, n, ControlSchedule::Standard).unwrap();
            let m = node_metrics(&p, method, &control).map_err(|e| e.to_string())?;
            let (pl, pk) = target::value_at(Table::from_number(t).unwrap().target(), n).unwrap();
            let (lo, ko) = (
                within_factor(m.lebesgue, pl, 2.0),
                within_factor(m.cond_inf, pk, 2.0),
            );
            ok &= lo && ko;
            lines.push(format!(
                "table {t} n={n:<2} lebesgue {:8.2} vs {pl:<6} [{}]  cond {:9.2} vs {pk:<6} [{}]",
                m.lebesgue,
                if lo { "ok" } else { "off" },
                m.cond_inf,
                if ko { "ok" } else { "off" },
            ));
        }
    }
    if ok {
        Ok(lines)
    } else {
        Err(lines.join("\n      "))
    }
}

fn lsq_table() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [5usize, 10] {
        let (w1, w2) = Table::LeastSquares
            .measure(n, Default::default())
            .map_err(|e| e.to_string())?;
        let (p1, p2) = target::value_at(&target::TABLE5, n).unwrap();
        let (o1, o2) = (within_factor(w1, p1, 2.0), within_factor(w2, p2, 2.0));
        ok &= o1 && o2;
        lines.push(format!(
            "n={n:<2} wam1 {w1:6.2} vs {p1:<5} wam2 {w2:6.2} vs {p2:<5}"
        ));
    }
    if ok {
        Ok(lines)
    } else {
        Err(lines.join("\n      "))
    }
}

/// Monotone decrease where a rise is tolerated only for one step at a time
/// and only within a factor 3.
fn monotone_with_plateaus(seq: &[f64]) -> bool {
    let mut previous_rose = false;
    for w in seq.windows(2) {
        if w[1] < w[0] {
            previous_rose = false;
        } else if w[1] <= 3.0 * w[0] && !previous_rose {
            previous_rose = true;
        } else {
            return false;
        }
    }
    true
}

fn error_curves() -> Outcome {
    // The reference tables sample every fifth degree.
    let degrees = [5usize, 10, 15, 20];
    let functions = [TestFunction::F3, TestFunction::F6];
    let refs: Vec<f64> = functions
        .iter()
        .map(|&f| reference_integral(f))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let runge_ref = reference_integral(TestFunction::F4).map_err(|e| e.to_string())?;
    let mut interp = vec![Vec::new(); functions.len()];
    let mut cub = vec![Vec::new(); functions.len()];
    let mut runge_lsq = f64::NAN;
    for n in degrees {
        let p = prepared(Wam::Wam2, n);
        let control = control_mesh(Wam::Wam2, n, ControlSchedule::Standard).unwrap();
        for (k, &f) in functions.iter().enumerate() {
            let e = degree_errors(&p, &[Method::Afp], f, &control, refs[k])
                .map_err(|e| e.to_string())?;
            interp[k].push(e.nodes[0].1);
            cub[k].push(e.nodes[0].2);
        }
        if n == 20 {
            let e = degree_errors(&p, &[Method::Afp], TestFunction::F4, &control, runge_ref)
                .map_err(|e| e.to_string())?;
            runge_lsq = e.lsq_err;
        }
    }
    let mut lines = Vec::new();
    let mut ok = true;
    for (k, f) in functions.iter().enumerate() {
        for (label, seq) in [("interp", &interp[k]), ("cub", &cub[k])] {
            let orders = (seq[0] / seq[seq.len() - 1]).log10();
            let mono = monotone_with_plateaus(seq);
            let good = mono && orders >= 6.0;
            ok &= good;
            lines.push(format!(
                "{f} {label:<6} n=5 {:.2e} -> n=20 {:.2e}: {orders:.2} orders, monotone {mono} [{}]",
                seq[0],
                seq[seq.len() - 1],
                if good { "ok" } else { "off" }
            ));
        }
    }
    let runge_ok = runge_lsq > 1e-3;
    ok &= runge_ok;
    lines.push(format!(
        "f4 least-squares error at n=20 {runge_lsq:.2e} (must exceed 1e-3) [{}]",
        if runge_ok { "ok" } else { "off" }
    ));
    if ok {
        Ok(lines)
    } else {
        Err(lines.join("\n      "))
    }
}

fn oracle_consistency() -> Outcome {
    let mut worst = 0.0_f64;
    for n in 0..=12 {
        let closed = moments_wade(n);
        let quad = moments_by_quadrature(n).map_err(|e| e.to_string())?;
        for (a, b) in closed.values.iter().zip(&quad.values) {
            worst = worst.max((a - b).abs());
        }
    }
    let one =
        oracle_integral(|_| 1.0, TestFunction::Const1.oracle_tol()).map_err(|e| e.to_string())?;
    let line = format!(
        "moments max difference {worst:.2e} (limit 1e-12), constant integral error {:.2e} (limit 1e-13)",
        (one - 2.0 * PI).abs()
    );
    if worst <= 1e-12 && (one - 2.0 * PI).abs() <= 1e-13 {
        Ok(vec![line])
    } else {
        Err(line)
    }
}

fn run_cli(args: &[&str], out: &Path) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_wamcyl"))
        .arg("--jobs")
        .arg("1")
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)))
    }
}

fn determinism() -> Outcome {
    let commands: [&[&str]; 5] = [
        &["gen", "--mesh", "wam2", "--degree", "6"],
        &[
            "extract", "--mesh", "wam1", "--degree", "5", "--method", "afp",
        ],
        &[
            "extract", "--mesh", "wam2", "--degree", "8", "--method", "dlp",
        ],
        &["metrics", "--mesh", "wam2", "--degree", "5,10"],
        &[
            "errors",
            "--mesh",
            "wam2",
            "--degree",
            "5..8",
            "--method",
            "afp",
            "--function",
            "f3,f6",
        ],
    ];
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        for c in commands {
            run_cli(c, d.path())?;
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|n| n.to_string_lossy().ends_with(".csv"))
        .collect();
    names.sort();
    for name in &names {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{} differs between runs", name.to_string_lossy()));
        }
    }
    Ok(vec![format!(
        "{} CSV files byte-identical across two single-thread runs",
        names.len()
    )])
}

fn main() {
    // `cargo test` passes harness flags; a name filter selects criteria by number.
    let filter: Vec<usize> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .filter_map(|a| a.parse().ok())
        .collect();
    let criteria = [
        Criterion {
            id: 1,
            name: "cardinality exactness",
            limit: Duration::from_secs(1),
            run: cardinality,
        },
        Criterion {
            id: 2,
            name: "polynomial reproduction",
            limit: Duration::from_secs(120),
            run: reproduction,
        },
        Criterion {
            id: 3,
            name: "cubature exactness",
            limit: Duration::from_secs(180),
            run: cubature_exactness,
        },
        Criterion {
            id: 4,
            name: "tables 1-4 at n = 5, 10",
            limit: Duration::from_secs(300),
            run: node_tables,
        },
        Criterion {
            id: 5,
            name: "table 5 at n = 5, 10",
            limit: Duration::from_secs(180),
            run: lsq_table,
        },
        Criterion {
            id: 6,
            name: "error curves",
            limit: Duration::from_secs(900),
            run: error_curves,
        },
        Criterion {
            id: 7,
            name: "oracle self-consistency",
            limit: Duration::from_secs(60),
            run: oracle_consistency,
        },
        Criterion {
            id: 8,
            name: "determinism",
            limit: Duration::from_secs(600),
            run: determinism,
        },
    ];
    let mut failed = 0;
    for c in criteria
        .iter()
        .filter(|c| filter.is_empty() || filter.contains(&c.id))
    {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.limit;
        let (pass, detail) = match outcome {
            Ok(lines) => (in_time, lines),
            Err(msg) => (false, vec![msg]),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} [{}] {} ({:.1}s, limit {}s)",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
        for line in detail {
            println!("      {line}");
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
