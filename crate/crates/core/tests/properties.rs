use std::collections::BTreeSet;
use std::sync::Arc;

use num_rational::Rational64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use circnet_core::algebra::{FinDimAlgebra, StarHom, State};
use circnet_core::cylinder::{cylinder_poset, iso_pn_cn, IntervalPoset, MarkedCircle};
use circnet_core::gen::{random_cylinder_net, random_embedding, GenOptions};
use circnet_core::homotopy::GroupPresentation;
use circnet_core::io::{net_from_doc, net_to_doc, state_from_doc, state_to_doc};
use circnet_core::Exec;

fn markers(n: usize) -> impl Strategy<Value = Vec<Rational64>> {
    prop::collection::btree_set(0i64..1000, n)
        .prop_map(|s| s.into_iter().map(|k| Rational64::new(k, 1000)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cylinder_order_is_generated_by_covers(n in 2usize..9) {
        let p = cylinder_poset(n).unwrap();
        let order = p.topological_order().unwrap();
        let pos: Vec<usize> = {
            let mut v = vec![0; order.len()];
            for (k, &x) in order.iter().enumerate() {
                v[x] = k;
            }
            v
        };
        for &(a, b) in p.covers() {
            prop_assert!(pos[a] < pos[b]);
        }
        for (a, b) in p.strict_pairs() {
            prop_assert!(!p.leq_idx(b, a));
        }
    }

    #[test]
    fn interval_posets_match_cylinders(ms in (3usize..8).prop_flat_map(markers)) {
        let n = ms.len();
        let pn = IntervalPoset::new(MarkedCircle::new(ms).unwrap()).unwrap();
        let cn = Arc::new(cylinder_poset(n).unwrap());
        let (fwd, inv) = iso_pn_cn(&pn, &cn).unwrap();
        prop_assert!(fwd.is_isomorphism());
        prop_assert!(fwd.compose(&inv).unwrap().map.iter().enumerate().all(|(i, &j)| i == j));
    }

    #[test]
    fn marker_choice_does_not_change_the_order(ms in markers(5)) {
        let pn = IntervalPoset::new(MarkedCircle::new(ms).unwrap()).unwrap();
        let uniform = IntervalPoset::new(MarkedCircle::uniform(5).unwrap()).unwrap();
        for x in 0..pn.poset.len() {
            for y in 0..pn.poset.len() {
                prop_assert_eq!(pn.poset.leq_idx(x, y), uniform.poset.leq_idx(x, y));
            }
        }
    }

    #[test]
    fn embeddings_compose_with_their_inverse(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = FinDimAlgebra::new(vec![1, 2]).unwrap();
        let opts = GenOptions { stall: 1.0, ..GenOptions::default() };
        let h = random_embedding(&a, &opts, &mut rng);
        let g = a.random_unitary(&mut rng);
        let auto = h.then_inner(&g).unwrap();
        let back = auto.inverse().unwrap().compose(&auto).unwrap();
        prop_assert!(back.distance(&StarHom::identity(&a)) < 1e-12);
    }

    #[test]
    fn random_nets_validate_and_round_trip(n in 2usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_cylinder_net(n, &GenOptions::default(), &mut rng).unwrap();
        prop_assert!(net.validate_with(1e-12, Exec::Sequential).passed());
        let text = serde_json::to_string(&net_to_doc(&net, None)).unwrap();
        let (back, _) = net_from_doc(&serde_json::from_str(&text).unwrap()).unwrap();
        for &(lo, hi) in net.poset().covers() {
            let d = net.inclusion(lo, hi).unwrap().distance(back.inclusion(lo, hi).unwrap());
            prop_assert!(d < 1e-12);
        }
    }

    #[test]
    fn states_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = FinDimAlgebra::new(vec![2, 1, 3]).unwrap();
        let s = State::random(&a, &mut rng);
        let text = serde_json::to_string(&state_to_doc(&s)).unwrap();
        let back = state_from_doc(&serde_json::from_str(&text).unwrap(), 1e-9).unwrap();
        prop_assert!(s.distance(&back) < 1e-12);
    }

    #[test]
    fn base_point_does_not_change_h1(n in 3usize..6, base in 0usize..9) {
        let p = Arc::new(cylinder_poset(n).unwrap());
        let h = GroupPresentation::new(p.clone(), base % (n * n)).unwrap().h1_invariants();
        prop_assert_eq!(h.free_rank, 1);
        prop_assert!(h.torsion.is_empty());
    }
}

#[test]
fn parallel_and_sequential_reports_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let net = random_cylinder_net(4, &GenOptions::default(), &mut rng).unwrap();
    let a = net.validate_with(1e-12, Exec::Sequential);
    let b = net.validate_with(1e-12, Exec::Parallel);
    let names = |r: &circnet_core::Report<_>| -> BTreeSet<String> {
        r.checks.iter().map(|c| c.name.clone()).collect()
    };
    assert_eq!(names(&a), names(&b));
    assert_eq!(a.max_residual(), b.max_residual());
}
