use diraclab_core::cylinder::{cylinder_index, CylinderProblem, OracleConfig};
use diraclab_core::index::{heat_traces, predicted_index};
use diraclab_core::isospectral::{trace_difference, SwapProblem};
use diraclab_core::spectrum::{
    load_spectrum, make_twisted_torus, save_spectrum, BoundaryCondition, ChiralSpectrum, Mode,
};
use proptest::prelude::*;

fn spectrum_strategy() -> impl Strategy<Value = ChiralSpectrum> {
    (prop::collection::vec((1e-3f64..1.0, 1u32..20), 0..30), 0u32..6, 0u32..6).prop_map(|(steps, kp, km)| {
        let mut lambda = 0.0;
        let modes: Vec<Mode> = steps
            .into_iter()
            .map(|(dl, m)| {
                lambda += dl;
                Mode { lambda, multiplicity: m }
            })
            .collect();
        let cutoff = lambda + 0.5;
        ChiralSpectrum::new(modes, kp, km, cutoff).unwrap()
    })
}

fn condition() -> impl Strategy<Value = BoundaryCondition> {
    prop::sample::select(BoundaryCondition::PRIMARY.to_vec())
}

fn local() -> impl Strategy<Value = BoundaryCondition> {
    prop::sample::select(vec![BoundaryCondition::Plus, BoundaryCondition::Minus])
}

fn flip(c: BoundaryCondition) -> BoundaryCondition {
    match c {
        BoundaryCondition::Plus => BoundaryCondition::Minus,
        BoundaryCondition::Minus => BoundaryCondition::Plus,
        other => other,
    }
}

proptest! {
    #[test]
    fn spectrum_document_round_trip(s in spectrum_strategy()) {
        let back = load_spectrum(&save_spectrum(&s)).unwrap();
        prop_assert_eq!(&back, &s);
        for (a, b) in back.modes().iter().zip(s.modes()) {
            prop_assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
        }
    }

    #[test]
    fn oracle_equals_prediction(s in spectrum_strategy(), e0 in condition(), e1 in condition(), len in 0.1f64..5.0) {
        let p = CylinderProblem::new(s, len, e0, e1).unwrap();
        let oracle = cylinder_index(&p, OracleConfig::default()).unwrap();
        prop_assert_eq!(oracle, predicted_index(&p.components()).unwrap());
        prop_assert_eq!(oracle, cylinder_index(&p.reversed(), OracleConfig::default()).unwrap());
    }

    #[test]
    fn local_swap_negates(s in spectrum_strategy(), e0 in local(), e1 in local()) {
        let p = CylinderProblem::new(s.clone(), 1.0, e0, e1).unwrap();
        let q = CylinderProblem::new(s, 1.0, flip(e0), flip(e1)).unwrap();
        let cfg = OracleConfig::default();
        prop_assert_eq!(cylinder_index(&p, cfg).unwrap(), -cylinder_index(&q, cfg).unwrap());
        prop_assert_eq!(predicted_index(&p.components()).unwrap(), -predicted_index(&q.components()).unwrap());
    }

    #[test]
    fn supertrace_is_index(s in spectrum_strategy(), t in 0.5f64..50.0) {
        if let Ok(h) = heat_traces(&s, t, 1e-6) {
            prop_assert!((h.supertrace() - s.index() as f64).abs() <= 1e-12 * (1.0 + h.tr_plus));
        }
    }

    #[test]
    fn trace_difference_antisymmetric(
        s in spectrum_strategy(),
        e in (local(), local()),
        f in (local(), local()),
        t in 0.05f64..1.0,
    ) {
        let p = SwapProblem::new(s, 1.0, [e.0, e.1], [f.0, f.1]).unwrap();
        let tol = f64::INFINITY;
        let a = trace_difference(&p, t, 300, tol).unwrap().value;
        let b = trace_difference(&p.inverted(), t, 300, tol).unwrap().value;
        prop_assert_eq!(a, -b);
    }
}

/// Landau levels give `Tr e^{-tA⁻A⁺} = |c| / (1 - e^{-2Bt})` in closed form.
#[test]
fn twisted_torus_traces_match_geometric_series() {
    let area = 2.0 * std::f64::consts::PI;
    for c in [1i64, -2, 3] {
        let s = make_twisted_torus(c, area, 40.0).unwrap();
        let b = 2.0 * std::f64::consts::PI * c.unsigned_abs() as f64 / area;
        for t in [0.05, 0.2, 1.0] {
            let h = heat_traces(&s, t, 1e-10).unwrap();
            let q = (-2.0 * b * t).exp();
            let full = c.unsigned_abs() as f64 / (1.0 - q);
            let (lowest, excited) = (full, full * q);
            let (want_plus, want_minus) = if c > 0 { (lowest, excited) } else { (excited, lowest) };
            assert!((h.tr_plus - want_plus).abs() <= h.bound + 1e-12 * want_plus, "c={c} t={t}");
            assert!((h.tr_minus - want_minus).abs() <= h.bound + 1e-12 * want_plus, "c={c} t={t}");
        }
    }
}
