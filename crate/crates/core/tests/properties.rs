use clasper::decide::{
    check_y1_spin, check_y1_spin_exhaustive, check_y2_plain, check_y2_spin, decide_y2, swapped, transport, Decision,
    Mode,
};
use clasper::fgab::{enumerate_isomorphisms, FgAbelianGroup, Homomorphism};
use clasper::invariants::{validate_record, InvariantRecord};
use clasper::io::{graphs_from_json, graphs_to_json, record_from_str, record_to_string};
use clasper::sample::{random_graphs, random_record, random_terms};
use clasper::spin::PullbackP;
use clasper::surgery::{apply_y_surgery, surgery_s, FormalYGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SHAPES: [&[u64]; 8] = [&[], &[2], &[4], &[0, 0, 0], &[2, 4], &[2, 0], &[3, 6], &[2, 2, 2]];

fn record(seed: u64, shape: usize) -> InvariantRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_record(&mut rng, &FgAbelianGroup::new(SHAPES[shape % SHAPES.len()].iter().copied()))
}

/// A random automorphism (finite groups) or the identity.
fn random_automorphism(rng: &mut ChaCha8Rng, h: &FgAbelianGroup) -> Homomorphism {
    if !h.is_finite() {
        return h.identity();
    }
    let all: Vec<Homomorphism> = enumerate_isomorphisms(h, h).unwrap().take(64).collect();
    all[rng.random_range(0..all.len())].clone()
}

/// Graph lists whose total class in the graph group vanishes: random
/// graphs followed by a lift of minus their class.
fn null_graphs(rng: &mut ChaCha8Rng, p: &PullbackP, count: usize) -> Vec<FormalYGraph> {
    let ys = p.y_structure().unwrap();
    let terms = random_terms(rng, p, count);
    let class = ys.normal_form(&terms).unwrap();
    let mut out: Vec<FormalYGraph> = terms.iter().map(|t| FormalYGraph::from_y_term(p, t).unwrap()).collect();
    for t in ys.lift(&class.neg()) {
        out.push(FormalYGraph::from_y_term(p, &t).unwrap());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn serialization_round_trips(seed in any::<u64>(), shape in 0usize..8) {
        let r = record(seed, shape);
        let s = record_to_string(&r);
        let back = record_from_str(&s).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(record_to_string(&back), s);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = PullbackP::new(&r.spin);
        let graphs = random_graphs(&mut rng, &p, 3);
        prop_assert_eq!(graphs_from_json(&r.spin, &graphs_to_json(&r.spin, &graphs)).unwrap(), graphs);
    }

    #[test]
    fn surgery_preserves_pairing_and_quadratic(seed in any::<u64>(), shape in 0usize..8) {
        let r = record(seed, shape);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let p = PullbackP::new(&r.spin);
        let s = surgery_s(&r, &random_graphs(&mut rng, &p, 3)).unwrap();
        prop_assert_eq!(&s.linking, &r.linking);
        prop_assert_eq!(&s.quadratic, &r.quadratic);
        prop_assert!(validate_record(&s).is_empty());
        // spin-wise, the Y1 check passes with the identity
        let sigma = rng.random_range(0..r.spin.count());
        prop_assert!(check_y1_spin(&r, &s, sigma, sigma, &r.homology.identity()).unwrap());
    }

    #[test]
    fn zero_leaf_graphs_change_nothing(seed in any::<u64>(), shape in 0usize..8, slot in 0usize..3) {
        let r = record(seed, shape);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let p = PullbackP::new(&r.spin);
        let mut g = random_graphs(&mut rng, &p, 1).pop().unwrap();
        g.leaves[slot] = p.zero_element();
        prop_assert_eq!(apply_y_surgery(&r, &g).unwrap(), r);
    }

    #[test]
    fn decider_reflexive_and_symmetric(seed in any::<u64>(), shape in 0usize..8) {
        let r = record(seed, shape);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let psi = random_automorphism(&mut rng, &r.homology);
        let t = rng.random_range(0..r.spin.count());
        let r2 = transport(&r, &psi, t).unwrap();
        prop_assert!(validate_record(&r2).is_empty());
        for (a, b) in [(&r, &r), (&r, &r2)] {
            match decide_y2(a, b, Mode::Y2, std::slice::from_ref(&psi)).unwrap() {
                Decision::Equivalent(c) => {
                    prop_assert!(c.verify(a, b, Mode::Y2).unwrap());
                    let inv = c.inverted(a, b).unwrap();
                    prop_assert!(inv.verify(b, a, Mode::Y2).unwrap());
                }
                d => prop_assert!(false, "{:?}", d),
            }
        }
    }

    #[test]
    fn surgery_by_null_graph_lists_is_sound(seed in any::<u64>(), shape in 0usize..8) {
        let r = record(seed, shape);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
        let p = PullbackP::new(&r.spin);
        let graphs = null_graphs(&mut rng, &p, 3);
        let s = surgery_s(&r, &graphs).unwrap();
        match decide_y2(&r, &s, Mode::Y2, &[]).unwrap() {
            Decision::Equivalent(c) => prop_assert!(c.psi.is_identity()),
            d => prop_assert!(false, "{:?}", d),
        }
    }

    #[test]
    fn y2_refines_y1(seed in any::<u64>(), shape in 0usize..8) {
        let r = record(seed, shape);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 5);
        let sigma = rng.random_range(0..r.spin.count());
        let mode = Mode::Y2Spin { sigma, sigma_prime: sigma };
        let s = surgery_s(&r, &random_graphs(&mut rng, &PullbackP::new(&r.spin), 1)).unwrap();
        for other in [&r, &s] {
            if let Decision::Equivalent(c) = decide_y2(&r, other, mode, &[]).unwrap() {
                prop_assert!(check_y2_spin(&r, other, sigma, sigma, &c.psi).unwrap());
                prop_assert!(check_y1_spin(&r, other, sigma, sigma, &c.psi).unwrap());
                prop_assert!(c.inverted(&r, other).unwrap().verify(other, &r, swapped(mode)).unwrap());
            }
        }
    }

    #[test]
    fn y1_check_matches_exhaustive(seed in any::<u64>(), shape in 0usize..8, other in any::<u64>()) {
        let r = record(seed, shape);
        let r2 = record(other, shape);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 6);
        let psi = random_automorphism(&mut rng, &r.homology);
        let (a, b) = (rng.random_range(0..r.spin.count()), rng.random_range(0..r.spin.count()));
        prop_assert_eq!(
            check_y1_spin(&r, &r2, a, b, &psi).unwrap(),
            check_y1_spin_exhaustive(&r, &r2, a, b, &psi).unwrap()
        );
    }

    #[test]
    fn plain_check_rejects_wrong_offsets(seed in any::<u64>(), shape in 0usize..8) {
        let r = record(seed, shape);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
        let psi = random_automorphism(&mut rng, &r.homology);
        let t = rng.random_range(0..r.spin.count());
        let r2 = transport(&r, &psi, t).unwrap();
        prop_assert!(check_y2_plain(&r, &r2, &psi, t).unwrap());
        // any passing offset yields the same Rochlin function along Ψ
        for u in r.spin.spin_structures() {
            if check_y2_plain(&r, &r2, &psi, u).unwrap() {
                let a = transport(&r, &psi, u).unwrap();
                prop_assert_eq!(&a.rochlin, &r2.rochlin);
            }
        }
    }
}
