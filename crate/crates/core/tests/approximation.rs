mod common;

use rand::Rng;
use wamcyl::experiments::relative_sup_errors;
use wamcyl::{
    build_lsq, control_mesh, enumerate_basis, interpolate, lsq_fit, lsq_norm, lsq_norm_on_mesh,
    ControlSchedule, Method, PreparedMesh, WadePolynomial, Wam,
};

fn random_poly(rng: &mut impl Rng, n: usize) -> WadePolynomial {
    let c = (0..enumerate_basis(n).len())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    WadePolynomial::new(n, c).unwrap()
}

#[test]
fn reproduces_polynomials() {
    let mut rng = common::rng(21);
    for wam in [Wam::Wam1, Wam::Wam2] {
        let n = 4;
        let prepared = PreparedMesh::new(wam.generate(n).unwrap(), n, 2).unwrap();
        let control = control_mesh(wam, n, ControlSchedule::Standard).unwrap();
        let basis = enumerate_basis(n);
        for _ in 0..5 {
            let p = random_poly(&mut rng, n);
            let exact = p.eval(control.points()).unwrap();
            let mut fits = Vec::new();
            for method in Method::ALL {
                let nodes = prepared.extract(method).unwrap();
                let samples = p.eval(&nodes.nodes).unwrap();
                fits.push(interpolate(&nodes, &samples).unwrap().polynomial);
            }
            let proj = build_lsq(prepared.mesh(), n, 2).unwrap();
            fits.push(lsq_fit(&proj, &p.eval(prepared.mesh().points()).unwrap()).unwrap());
            let refs: Vec<&WadePolynomial> = fits.iter().collect();
            for e in relative_sup_errors(&basis, &refs, control.points(), &exact).unwrap() {
                assert!(e < 1e-11, "{wam}: {e}");
            }
        }
    }
}

#[test]
fn least_squares_idempotent() {
    let mesh = Wam::Wam2.generate(6).unwrap();
    let proj = build_lsq(&mesh, 6, 2).unwrap();
    let samples: Vec<f64> = mesh
        .points()
        .iter()
        .map(|p| (3.0 * p.x).sin() + p.z.exp())
        .collect();
    let once = lsq_fit(&proj, &samples).unwrap();
    let fitted = once.eval(mesh.points()).unwrap();
    let twice = lsq_fit(&proj, &fitted).unwrap();
    for (a, b) in once.coefficients().iter().zip(twice.coefficients()) {
        assert!((a - b).abs() <= 1e-10);
    }
}

#[test]
fn ortho_steps_do_not_change_fit_of_polynomials() {
    let mut rng = common::rng(5);
    let mesh = Wam::Wam1.generate(5).unwrap();
    let p = random_poly(&mut rng, 5);
    let samples = p.eval(mesh.points()).unwrap();
    let plain = lsq_fit(&build_lsq(&mesh, 5, 0).unwrap(), &samples).unwrap();
    let ortho = lsq_fit(&build_lsq(&mesh, 5, 2).unwrap(), &samples).unwrap();
    let (a, b) = (
        plain.eval(mesh.points()).unwrap(),
        ortho.eval(mesh.points()).unwrap(),
    );
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn two_steps_give_orthonormal_columns() {
    let proj = build_lsq(&Wam::Wam1.generate(5).unwrap(), 5, 2).unwrap();
    assert!(proj.orthonormality_defect() <= 1e-8);
}

#[test]
fn least_squares_norm_small_cases() {
    for wam in [Wam::Wam1, Wam::Wam2] {
        let mesh = wam.generate(4).unwrap();
        let proj = build_lsq(&mesh, 0, 2).unwrap();
        assert!((lsq_norm_on_mesh(&proj).unwrap() - 1.0).abs() < 1e-12);
        // Interpolation-free projector norm is at least 1 on any mesh.
        let proj = build_lsq(&mesh, 4, 2).unwrap();
        let control = control_mesh(wam, 4, ControlSchedule::Standard).unwrap();
        let on_mesh = lsq_norm_on_mesh(&proj).unwrap();
        assert!(on_mesh >= 1.0 - 1e-12);
        assert!(lsq_norm(&proj, control.points()).unwrap() >= on_mesh * 0.999);
    }
}
