use netpred_core::error_model::pareto_frontier;
use netpred_core::generators::{random_demands, random_graph, with_priorities};
use netpred_core::perturb::Perturbation;
use netpred_core::reductions::priority::split_by_priority;
use netpred_core::request::sequence;
use netpred_core::{Demand, DemandKind, Exact, Extended, PredictionSet, Scalar, WeightedGraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(seed: u64, n: usize) -> WeightedGraph<Exact> {
    random_graph(&mut ChaCha8Rng::seed_from_u64(seed), n, n / 2, 9)
}

fn terminals(g: &WeightedGraph<Exact>, seed: u64, count: usize) -> Vec<Demand> {
    random_demands(&mut ChaCha8Rng::seed_from_u64(seed), g, DemandKind::Terminal, count, 1).unwrap()
}

fn finite(d: Extended<Exact>) -> Exact {
    d.into_finite().expect("connected")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shortest_paths_form_a_metric(seed in any::<u64>(), n in 2usize..9) {
        let g = graph(seed, n);
        let m = g.metric();
        let d: Vec<Vec<Exact>> = (0..n).map(|u| m.distances_from(u).unwrap().into_iter().map(finite).collect()).collect();
        for u in 0..n {
            prop_assert!(d[u][u] == Exact::from_count(0));
            for v in 0..n {
                prop_assert_eq!(&d[u][v], &d[v][u]);
                for w in 0..n {
                    prop_assert!(d[u][w] <= d[u][v].clone() + d[v][w].clone());
                }
            }
        }
    }

    #[test]
    fn float_and_exact_distances_agree(seed in any::<u64>(), n in 2usize..9) {
        let g = graph(seed, n);
        let f = g.map_costs(|c| c.as_f64());
        for v in 0..n {
            let a = finite(g.metric().distance(0, v).unwrap()).as_f64();
            let b = f.metric().distance(0, v).unwrap().into_finite().unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn frontier_is_sorted_and_counts_outliers(seed in any::<u64>(), n in 2usize..8, r in 0usize..5, p in 0usize..5) {
        let g = graph(seed, n);
        let requests = sequence(terminals(&g, seed ^ 1, r));
        let preds = PredictionSet::new(terminals(&g, seed ^ 2, p));
        let f = pareto_frontier(&requests, &preds, &g.metric()).unwrap();
        prop_assert!(!f.points.is_empty());
        for pt in &f.points {
            prop_assert_eq!(pt.delta, r + p - 2 * pt.matched());
            prop_assert_eq!(pt.matched_requests.len(), pt.matched());
        }
        for w in f.points.windows(2) {
            prop_assert!(w[0].delta < w[1].delta);
            prop_assert!(w[0].matching_cost > w[1].matching_cost);
        }
        prop_assert!(f.points.last().unwrap().matching_cost == Exact::from_count(0));
        prop_assert_eq!(f.points[0].matched(), r.min(p));
    }

    #[test]
    fn perturbation_is_seeded_and_stays_within_radius(seed in any::<u64>(), n in 2usize..9, radius in 0u32..12) {
        let g = graph(seed, n);
        let requests = sequence(terminals(&g, seed, 6));
        let pert = Perturbation { displacement_radius: radius as f64, seed, ..Perturbation::default() };
        let a = pert.apply(&g, &requests).unwrap();
        prop_assert_eq!(&a, &pert.apply(&g, &requests).unwrap());
        prop_assert_eq!(a.len(), requests.len());
        let m = g.metric();
        for (q, r) in a.items.iter().zip(&requests) {
            let (Demand::Terminal(x), Demand::Terminal(y)) = (q, &r.demand) else { unreachable!() };
            prop_assert!(finite(m.distance(*x, *y).unwrap()).as_f64() <= radius as f64);
        }
        if radius == 0 {
            prop_assert_eq!(a, PredictionSet::from_requests(&requests));
        }
    }

    #[test]
    fn drop_and_add_change_only_cardinality(seed in any::<u64>(), add in 0.0f64..2.0) {
        let g = graph(seed, 6);
        let requests = sequence(terminals(&g, seed, 8));
        let none = Perturbation { drop_rate: 1.0, add_rate: add, seed, ..Perturbation::default() };
        let out = none.apply(&g, &requests).unwrap();
        prop_assert_eq!(out.len(), (add * requests.len() as f64).round() as usize);
        for d in &out.items {
            prop_assert!(d.validate(&g).is_ok());
        }
    }

    #[test]
    fn priority_split_loses_nothing(seed in any::<u64>(), b in 1u32..4, r in 0usize..8, p in 0usize..8) {
        let g = with_priorities(&mut ChaCha8Rng::seed_from_u64(seed), &graph(seed, 6), b);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let requests = sequence(random_demands(&mut rng, &g, DemandKind::TerminalPair, r, b).unwrap());
        let preds = PredictionSet::new(random_demands(&mut rng, &g, DemandKind::TerminalPair, p, b).unwrap());
        let classes = split_by_priority(&requests, &preds, b).unwrap();
        prop_assert_eq!(classes.len(), b as usize);
        for (j, (rs, ps)) in classes.iter().enumerate() {
            prop_assert!(rs.iter().all(|x| x.demand.priority() == j as u32 + 1));
            prop_assert!(ps.items.iter().all(|x| x.priority() == j as u32 + 1));
        }
        prop_assert_eq!(classes.iter().map(|c| c.0.len()).sum::<usize>(), r);
        prop_assert_eq!(classes.iter().map(|c| c.1.len()).sum::<usize>(), p);
    }
}
