use dtasep_core::acceptance::oracles::{brute_force_passage, ring_generator_flux, ring_uniform_flux};
use dtasep_core::lpp::{backtrack_path, passage_table, passage_times, InjectedWeights, DEFAULT_CELL_BUDGET};
use dtasep_core::sim::measure_flux;
use dtasep_core::{DisorderLaw, Environment, MeasureParams, WedgePoint};
use proptest::prelude::*;

/// Target `(i, j)` with at most `steps` steps and a weight for every cell of its region.
fn instance(steps: i64) -> impl Strategy<Value = (WedgePoint, Vec<((i64, i64), f64)>)> {
    (0..=steps / 2).prop_flat_map(move |j| {
        (Just(j), 0..=(steps - j)).prop_flat_map(|(j, east)| {
            let cells: Vec<(i64, i64)> = (0..=j).flat_map(|b| (-b..=east - b).map(move |i| (i, b))).collect();
            let n = cells.len();
            (
                Just(WedgePoint::new(east - j, j).unwrap()),
                Just(cells),
                prop::collection::vec(0.0f64..5.0, n),
            )
                .prop_map(|(t, cells, w)| (t, cells.into_iter().zip(w).collect()))
        })
    })
}

fn weights(cells: &[((i64, i64), f64)]) -> InjectedWeights {
    let mut w = InjectedWeights::new();
    for &((i, j), y) in cells {
        w.set(i, j, y);
    }
    w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dp_equals_enumeration((target, cells) in instance(10)) {
        let w = weights(&cells);
        let t = passage_table(&w, target, DEFAULT_CELL_BUDGET).unwrap();
        prop_assert_eq!(t.passage_time(), brute_force_passage(&w, target.i, target.j));
        prop_assert_eq!(passage_times(&w, &[target]).unwrap()[0], t.passage_time());
        let path = backtrack_path(&t, target).unwrap();
        prop_assert_eq!(path.weight(&w), t.passage_time());
    }

    #[test]
    fn passage_time_is_monotone_in_weights((target, cells) in instance(10), pick in any::<prop::sample::Index>(), bump in 0.0f64..3.0) {
        let w = weights(&cells);
        let before = passage_table(&w, target, DEFAULT_CELL_BUDGET).unwrap();
        let mut raised = cells.clone();
        let k = pick.index(raised.len());
        raised[k].1 += bump;
        let after = passage_table(&weights(&raised), target, DEFAULT_CELL_BUDGET).unwrap();
        for &((i, j), _) in &cells {
            prop_assert!(after.get(i, j).unwrap() >= before.get(i, j).unwrap());
        }
        // Raising one weight moves T by at most the raise.
        prop_assert!(after.passage_time() <= before.passage_time() + bump + 1e-12);
    }

    #[test]
    fn generator_flux_is_particle_hole_symmetric_for_uniform_rates(l in 4usize..=8, n in 1usize..8) {
        prop_assume!(n < l);
        let f = ring_generator_flux(&vec![1.0; l], n);
        prop_assert!((f - ring_uniform_flux(l, n)).abs() < 1e-12);
        prop_assert!((f - ring_generator_flux(&vec![1.0; l], l - n)).abs() < 1e-12);
    }
}

#[test]
fn disordered_small_ring_matches_generator_solve() {
    let rates = vec![0.5, 1.0, 0.7, 1.0, 0.5, 0.9];
    let law = DisorderLaw::Uniform { lo: 0.5, hi: 1.0 };
    let env = Environment::from_rates(law, 0, rates.clone());
    let params = MeasureParams {
        burn_in: 100.0,
        window: 200_000.0,
        batches: 20,
    };
    for (n, rho) in [(1, 1.0 / 6.0), (2, 2.0 / 6.0), (3, 0.5), (5, 5.0 / 6.0)] {
        let m = measure_flux(&env, 6, rho, params, 11 + n as u64, 29 + n as u64).unwrap();
        assert_eq!(m.particles, n);
        let exact = ring_generator_flux(&rates, n);
        assert!(
            (m.estimate - exact).abs() <= 4.0 * m.sem,
            "N = {n}: simulated {} +- {} vs exact {exact}",
            m.estimate,
            m.sem
        );
    }
}
