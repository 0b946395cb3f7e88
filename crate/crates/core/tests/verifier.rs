use hclab::enumerate::standard_candidates;
use hclab::pairs::power_pair;
use hclab::space::canonical_basis;
use hclab::verifier::{CellStatus, Prediction, ProbeMode};
use hclab::{
    adjoint_nonhc_probe, check_hypotheses, hypercyclic_vector, make_bounded_shift,
    make_differentiation, make_unbounded_shift, multiple_pair, orbit_density_probe, probe_adjoint,
    spectrum_scan, DecayClass, OperatorPair, Scalar, Space, Vector,
};

fn c(re: f64) -> Scalar {
    Scalar::new(re, 0.0)
}

fn builtins(space: Space) -> Vec<OperatorPair> {
    vec![
        make_bounded_shift(c(2.0), space).unwrap(),
        make_unbounded_shift(c(2.0), space).unwrap(),
        make_differentiation(0.0, 1.0).unwrap(),
    ]
}

fn polar_grid(radii: &[f64], angles: usize) -> Vec<Scalar> {
    radii
        .iter()
        .flat_map(|&r| {
            (0..angles).map(move |k| Scalar::from_polar(r, k as f64 * std::f64::consts::TAU / angles as f64))
        })
        .collect()
}

#[test]
fn hypotheses_hold_for_builtins() {
    for p in builtins(Space::lp(2.0).unwrap()) {
        let v = check_hypotheses(&p, 30, 64).unwrap();
        assert!(v.hypothesis1_ok);
        assert!(v.hypothesis1_max_defect <= 1e-12);
        assert_ne!(v.decay_class, DecayClass::Fails, "{:?}", p.spec());
        assert!(v.per_sample.iter().all(|s| s.r_a.max(s.r_b) < 1.0));
    }
    let u = make_unbounded_shift(c(2.0), Space::C0).unwrap();
    assert_eq!(check_hypotheses(&u, 30, 64).unwrap().decay_class, DecayClass::SccSuper);
}

#[test]
fn small_multiples_lose_the_uniform_class() {
    let p = make_bounded_shift(c(2.0), Space::lp(1.0).unwrap()).unwrap();
    let m = multiple_pair(&p, c(0.5)).unwrap();
    let v = check_hypotheses(&m, 10, 64).unwrap();
    assert!(matches!(v.decay_class, DecayClass::Fails | DecayClass::SchOnly));
}

#[test]
fn inside_predictions_are_constructed() {
    let grid = polar_grid(&[0.0, 0.3, 1.0, 1.7, 2.5, 4.0, 20.0], 8);
    for p in builtins(Space::lp(1.0).unwrap()) {
        let seed = canonical_basis(p.space(), 1).unwrap();
        for n in 1..=2 {
            let cells = spectrum_scan(&p, n, &grid, 1e-10, &seed).unwrap();
            assert_eq!(cells.len(), grid.len());
            for (cell, lambda) in cells.iter().zip(&grid) {
                assert_eq!(cell.lambda, *lambda);
                if cell.predicted == Prediction::InsidePredictedRegion {
                    let r = cell.residual().unwrap_or_else(|| panic!("{cell:?}"));
                    // monomial coefficients of exp(lambda x) reach |lambda|^m / m!,
                    // which sets a rounding floor for large |lambda|
                    let floor = if lambda.norm() <= 4.0 { 1e-10 } else { 1e-6 };
                    assert!(r <= floor, "{cell:?}");
                }
                if matches!(cell.status, CellStatus::Diverged { .. }) {
                    assert_eq!(cell.predicted, Prediction::OutsideOrUnknown);
                }
            }
        }
    }
}

#[test]
fn unit_circle_is_point_spectrum() {
    let grid = polar_grid(&[1.0], 16);
    for p in builtins(Space::lp(2.0).unwrap()) {
        let seed = canonical_basis(p.space(), 1).unwrap();
        for n in 1..=3 {
            let cells = spectrum_scan(&p, n, &grid, 1e-10, &seed).unwrap();
            assert!(cells.iter().all(|c| c.is_constructed()), "{:?}", p.spec());
        }
    }
}

#[test]
fn powers_scan_like_their_base() {
    let grid = polar_grid(&[0.5, 1.0, 3.0, 3.9, 4.1, 8.0], 6);
    for p in builtins(Space::lp(1.0).unwrap()) {
        let seed = canonical_basis(p.space(), 1).unwrap();
        let a = spectrum_scan(&power_pair(&p, 2).unwrap(), 1, &grid, 1e-10, &seed).unwrap();
        let b = spectrum_scan(&p, 2, &grid, 1e-10, &seed).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.status_name(), y.status_name());
            assert_eq!(x.predicted, y.predicted);
        }
    }
}

#[test]
fn scans_are_deterministic() {
    let p = make_bounded_shift(c(2.0), Space::lp(2.0).unwrap()).unwrap();
    let seed = canonical_basis(p.space(), 1).unwrap();
    let grid = polar_grid(&[0.5, 1.5, 2.5], 20);
    let a = spectrum_scan(&p, 1, &grid, 1e-10, &seed).unwrap();
    let b = spectrum_scan(&p, 1, &grid, 1e-10, &seed).unwrap();
    assert_eq!(a, b);
}

#[test]
fn orbit_visits_schedule_targets() {
    let p = make_bounded_shift(c(2.0), Space::lp(1.0).unwrap()).unwrap();
    let (r, s) = hypercyclic_vector(&p, 3, 200).unwrap();
    let n_max = *s.exponents.last().unwrap();
    let probe = orbit_density_probe(&p, &r.vector, &s.targets, n_max).unwrap();
    for (k, hit) in probe.hits.iter().enumerate() {
        assert!(hit.best_distance <= 2f64.powi(-(k as i32)));
        let at = p
            .apply_a_pow(&r.vector, s.exponents[k])
            .unwrap()
            .distance(&s.targets[k])
            .unwrap();
        assert!(hit.best_distance <= at);
    }
}

#[test]
fn adjoint_probes() {
    let l2 = Space::lp(2.0).unwrap();
    let p = make_bounded_shift(c(2.0), l2).unwrap();
    let view = p.right_inverse_adjoint_view().unwrap();
    let g: Vec<f64> = (0..60).map(|k| 0.5f64.powi(k)).collect();
    let g = Vector::from_real(l2, &g).unwrap();
    let res = probe_adjoint(&view, &[g], 32).unwrap();
    match res.mode {
        ProbeMode::EigenvalueFound { lambda, residual } => {
            assert!((lambda - c(0.25)).norm() < 1e-12);
            assert!(residual <= 1e-8);
        }
        other => panic!("{other:?}"),
    }

    let d = make_differentiation(0.0, 1.0).unwrap();
    let one = Vector::from_real(d.space(), &[1.0]).unwrap();
    let res = probe_adjoint(&d.right_inverse_adjoint_view().unwrap(), &[one], 32).unwrap();
    assert_eq!(res.mode, ProbeMode::BoundedOrbit);

    let res = adjoint_nonhc_probe(&p, &standard_candidates(l2), 32).unwrap();
    assert_eq!(res.mode, ProbeMode::Inconclusive);
    let u = make_unbounded_shift(c(2.0), l2).unwrap();
    let res = adjoint_nonhc_probe(&u, &standard_candidates(l2), 32).unwrap();
    assert_eq!(res.mode, ProbeMode::Inconclusive);
}
