use proptest::prelude::*;
use putlab::divergences::{classical_chernoff, quantum_chernoff, quantum_relative_entropy, Exponent, TestingMechanism};
use putlab::mechanisms::{ceil_sqrt, mu_feasible_interval, proposed_mechanism, proposed_mechanism_with_mu};
use putlab::oracle::chernoff_grid_oracle;
use putlab::states::{depolarized_pure, ensemble_from_distribution, ensemble_state, sic_states, DensityOperator, Hypothesis};

fn dist(a: &DensityOperator, b: &DensityOperator) -> f64 {
    a.matrix().distance(b.matrix()).unwrap()
}

fn simplex(v: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, v).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

#[test]
fn uniform_ensemble_of_full_sic_family_is_maximally_mixed() {
    for v in [4, 9] {
        let mech = proposed_mechanism(v, 0.8).unwrap();
        let rho = ensemble_state(&mech, &Hypothesis::uniform(v).unwrap()).unwrap();
        let mixed = DensityOperator::maximally_mixed(ceil_sqrt(v)).unwrap();
        assert!(dist(&rho, &mixed) < 1e-12);
    }
}

#[test]
fn point_mass_ensemble_is_the_output_state() {
    let mech = proposed_mechanism(7, 1.3).unwrap();
    for h in 0..7 {
        let rho = ensemble_state(&mech, &Hypothesis::smoothed(7, h, 1.0).unwrap()).unwrap();
        assert!(dist(&rho, mech.output(h)) < 1e-14);
    }
}

proptest! {
    #[test]
    fn ensembles_are_affine(p in simplex(5), q in simplex(5), lam in 0.0f64..=1.0) {
        let mech = proposed_mechanism(5, 0.6).unwrap();
        let mix: Vec<f64> = p.iter().zip(&q).map(|(a, b)| lam * a + (1.0 - lam) * b).collect();
        let lhs = ensemble_from_distribution(&mech, &mix).unwrap();
        let a = ensemble_from_distribution(&mech, &p).unwrap();
        let b = ensemble_from_distribution(&mech, &q).unwrap();
        let rhs = DensityOperator::mixture(&[lam, 1.0 - lam], &[&a, &b]).unwrap();
        prop_assert!(dist(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn chernoff_is_symmetric(i in 0usize..9, j in 0usize..9, mu1 in 0.05f64..1.0, mu2 in 0.05f64..1.0) {
        let fam = sic_states(3).unwrap();
        let a = depolarized_pure(&fam.states()[i], mu1).unwrap();
        let b = depolarized_pure(&fam.states()[j], mu2).unwrap();
        let ab = quantum_chernoff(&a, &b).unwrap();
        let ba = quantum_chernoff(&b, &a).unwrap();
        prop_assert!((ab.value.as_f64() - ba.value.as_f64()).abs() < 1e-12);
    }

    #[test]
    fn golden_search_agrees_with_fine_grid(i in 0usize..4, j in 0usize..4, mu1 in 0.05f64..1.0, mu2 in 0.05f64..1.0) {
        let fam = sic_states(2).unwrap();
        let a = depolarized_pure(&fam.states()[i], mu1).unwrap();
        let b = depolarized_pure(&fam.states()[j], mu2).unwrap();
        let golden = quantum_chernoff(&a, &b).unwrap().value.as_f64();
        let grid = chernoff_grid_oracle(&a, &b, 10_000).unwrap().as_f64();
        // the grid can only miss the minimum from above
        prop_assert!(grid <= golden + 1e-12);
        prop_assert!(golden - grid < 1e-6);
    }

    #[test]
    fn classical_chernoff_symmetric_in_arguments(p in simplex(4), q in simplex(4)) {
        let a = classical_chernoff(&p, &q).unwrap();
        let b = classical_chernoff(&q, &p).unwrap();
        prop_assert!((a.value.as_f64() - b.value.as_f64()).abs() < 1e-12);
    }
}

#[test]
fn smallest_feasible_mu_maximises_utility() {
    for v in [3, 4, 6, 9] {
        let d = ceil_sqrt(v);
        for eps in [0.3, 1.0, 2.5] {
            let b = mu_feasible_interval(1.0 / (d as f64 + 1.0), d, eps).unwrap();
            let best_mech = proposed_mechanism_with_mu(v, b.mu_min).unwrap();
            let best_s = best_mech.utility_s(1.0).unwrap().value.as_f64();
            let best_a = best_mech.utility_a(1.0).unwrap().value.as_f64();
            let upper = b.mu_max.min(d as f64 / (d as f64 - 1.0));
            for i in 0..=20 {
                let mu = b.mu_min + (upper - b.mu_min) * i as f64 / 20.0;
                let mech = proposed_mechanism_with_mu(v, mu).unwrap();
                assert!(mech.utility_s(1.0).unwrap().value.as_f64() <= best_s + 1e-12, "v={v} eps={eps} mu={mu}");
                assert!(mech.utility_a(1.0).unwrap().value.as_f64() <= best_a + 1e-12, "v={v} eps={eps} mu={mu}");
            }
        }
    }
}

#[test]
fn pure_states_against_mixed_state_have_finite_entropy() {
    let fam = sic_states(2).unwrap();
    let pure = DensityOperator::pure(&fam.states()[0]);
    let mixed = DensityOperator::maximally_mixed(2).unwrap();
    let d = quantum_relative_entropy(&pure, &mixed).unwrap().unwrap_finite();
    assert!((d - 2f64.ln()).abs() < 1e-12);
    assert_eq!(quantum_relative_entropy(&mixed, &pure).unwrap(), Exponent::Infinite);
}
