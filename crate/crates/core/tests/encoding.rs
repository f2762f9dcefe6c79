use modqubo::graph::{modularity_pairwise, random_connected_graph};
use modqubo::qubo::{
    build_assignment_constraint, build_nonempty_constraint, decode, encode, energy,
    CommunityModel, Hamiltonian, VariableLayout,
};
use modqubo::{modularity, CommunityAssignment, ConstraintMode, Graph, ModularityParams, PenaltyWeights};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance() -> impl Strategy<Value = (Graph, Vec<usize>, usize, f64)> {
    (3usize..12, 0.2f64..0.9, any::<u64>(), 0.5f64..2.0).prop_flat_map(|(n, p, seed, gamma)| {
        let g = random_connected_graph(n, p, &mut ChaCha8Rng::seed_from_u64(seed));
        (1usize..=n.min(5)).prop_flat_map(move |k| {
            let g = g.clone();
            prop::collection::vec(0..k, n).prop_map(move |labels| (g.clone(), labels, k, gamma))
        })
    })
}

fn models(g: &Graph, k: usize, p: &ModularityParams) -> Vec<CommunityModel> {
    let mut out = Vec::new();
    for mode in [ConstraintMode::Inequality, ConstraintMode::Slack] {
        for limit in [0, usize::MAX] {
            let layout = VariableLayout::new(g.node_count(), k, mode);
            let w = PenaltyWeights::new(1.7, 2.3).unwrap();
            out.push(CommunityModel::build(g, layout, p, w, limit).unwrap());
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn feasible_energy_is_negated_modularity((g, labels, k, gamma) in instance()) {
        let p = ModularityParams { gamma };
        let a = CommunityAssignment::new(labels, k).unwrap();
        let q = modularity(&g, &a, &p).unwrap();
        prop_assert!((q - modularity_pairwise(&g, &a, &p).unwrap()).abs() < 1e-12);
        for model in models(&g, k, &p) {
            let bits = encode(&a, model.layout()).unwrap();
            let d = decode(&bits, model.layout(), false).unwrap();
            prop_assert_eq!(&d.assignment, &a);
            prop_assert_eq!(d.repaired_rows, 0);
            let e = energy(&model, &bits).unwrap();
            if a.empty_groups() == 0 {
                prop_assert!((e + q).abs() < 1e-10, "{:?}: {} vs {}", model.layout().mode(), e, q);
            } else {
                prop_assert!(e + q > 1e-9);
            }
        }
    }

    #[test]
    fn dense_and_factored_agree_on_any_bits(
        (g, _labels, k, gamma) in instance(),
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let p = ModularityParams { gamma };
        let ms = models(&g, k, &p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for pair in ms.chunks(2) {
            let (f, d) = (&pair[0], &pair[1]);
            prop_assert!(f.is_factored() && !d.is_factored());
            let bits: Vec<bool> = (0..d.dimension()).map(|_| rng.gen()).collect();
            prop_assert!((f.energy(&bits) - d.energy(&bits)).abs() < 1e-9);
            let (ff, fd) = (f.init_fields(&bits), d.init_fields(&bits));
            for a in 0..d.dimension() {
                let mut flipped = bits.clone();
                flipped[a] = !flipped[a];
                let exact = d.energy(&flipped) - d.energy(&bits);
                prop_assert!((f.flip_delta(&ff, &bits, a) - exact).abs() < 1e-9);
                prop_assert!((d.flip_delta(&fd, &bits, a) - exact).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn penalties_never_negative(
        (g, _labels, k, _gamma) in instance(),
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for mode in [ConstraintMode::Inequality, ConstraintMode::Slack] {
            let layout = VariableLayout::new(g.node_count(), k, mode);
            let c1 = build_assignment_constraint(&layout);
            let c2 = build_nonempty_constraint(&layout);
            for _ in 0..20 {
                let bits: Vec<bool> = (0..layout.dimension()).map(|_| rng.gen()).collect();
                prop_assert!(c1.energy(&bits) >= -1e-12);
                prop_assert!(c2.evaluate(&bits) >= -1e-12);
            }
        }
    }
}
