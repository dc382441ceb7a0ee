//! Seeded random generation of valid records, graphs and Y-terms.

use crate::fgab::{FgAbelianGroup, GroupElement};
use crate::invariants::{default_moduli, InvariantRecord, LinkingPairing, QmodZ, QuadFn};
use crate::spin::PullbackP;
use crate::surgery::{surgery_s, FormalYGraph};
use crate::ygraph::YTerm;
use num_integer::Integer;
use rand::Rng;

/// Coefficients uniform in `[0, n)`, or in `[-free, free]` for `Z`.
pub fn random_element<R: Rng>(rng: &mut R, h: &FgAbelianGroup, free: i64) -> GroupElement {
    let coeffs: Vec<i64> = h
        .orders()
        .iter()
        .map(|&n| if n == 0 { rng.random_range(-free..=free) } else { rng.random_range(0..n as i64) })
        .collect();
    h.element(&coeffs).expect("length matches")
}

fn unit_mod<R: Rng>(rng: &mut R, n: u64) -> u64 {
    loop {
        let a = rng.random_range(1..n.max(2));
        if a.gcd(&n) == 1 {
            return a % n;
        }
    }
}

/// A nondegenerate symmetric pairing with unit diagonal entries and random
/// off-diagonal entries (dropped if they make the pairing degenerate).
pub fn random_linking<R: Rng>(rng: &mut R, h: &FgAbelianGroup) -> LinkingPairing {
    let t = h.torsion_indices();
    let n: Vec<u64> = t.iter().map(|&i| h.orders()[i]).collect();
    let diag: Vec<u64> = n.iter().map(|&m| unit_mod(rng, m)).collect();
    let build = |off: &dyn Fn(usize, usize) -> QmodZ| {
        let matrix = (0..t.len())
            .map(|a| {
                (0..t.len())
                    .map(|b| {
                        if a == b {
                            QmodZ::new(diag[a] as i128, n[a] as i128).expect("nonzero")
                        } else {
                            off(a.min(b), a.max(b))
                        }
                    })
                    .collect()
            })
            .collect();
        LinkingPairing::new(h, matrix).expect("shape")
    };
    let mut off = vec![vec![QmodZ::ZERO; t.len()]; t.len()];
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            let g = n[a].gcd(&n[b]);
            off[a][b] = QmodZ::new(rng.random_range(0..g) as i128, g as i128).expect("nonzero");
        }
    }
    let l = build(&|a, b| off[a][b]);
    if l.violations(h).is_empty() {
        l
    } else {
        build(&|_, _| QmodZ::ZERO)
    }
}

/// A uniformly random solution of `n q(e_i) + C(n,2) λ(e_i,e_i) = 0`.
pub fn random_quadratic<R: Rng>(rng: &mut R, h: &FgAbelianGroup, l: &LinkingPairing) -> QuadFn {
    let values = l
        .torsion_indices()
        .iter()
        .enumerate()
        .map(|(a, &i)| {
            let n = h.orders()[i] as i128;
            let lii = l.entry(a, a);
            let num = lii.numerator() as i128 * (n / lii.denominator() as i128);
            let k = rng.random_range(0..n);
            QmodZ::new(2 * k - (n - 1) * num, 2 * n).expect("nonzero")
        })
        .collect();
    QuadFn::new(values)
}

pub fn random_pullback_leaf<R: Rng>(rng: &mut R, p: &PullbackP) -> crate::spin::PullbackElement {
    p.from_group_element(&random_element(rng, p.group(), 2))
}

pub fn random_graph<R: Rng>(rng: &mut R, p: &PullbackP) -> FormalYGraph {
    let sign = if rng.random_bool(0.5) { 1 } else { -1 };
    let leaves = [random_pullback_leaf(rng, p), random_pullback_leaf(rng, p), random_pullback_leaf(rng, p)];
    FormalYGraph::new(sign, leaves).expect("sign is ±1")
}

pub fn random_graphs<R: Rng>(rng: &mut R, p: &PullbackP, count: usize) -> Vec<FormalYGraph> {
    (0..count).map(|_| random_graph(rng, p)).collect()
}

pub fn random_terms<R: Rng>(rng: &mut R, p: &PullbackP, count: usize) -> Vec<YTerm> {
    random_graphs(rng, p, count).iter().map(|g| g.to_y_term(p)).collect()
}

/// A valid record over `h` on the default moduli: random pairing and
/// quadratic functions, cup forms produced by random surgeries on the zero
/// forms, and random Rochlin values.
pub fn random_record<R: Rng>(rng: &mut R, h: &FgAbelianGroup) -> InvariantRecord {
    let linking = random_linking(rng, h);
    let spin = crate::spin::SpinSpace::new(h).expect("small spin space");
    let quadratic = spin.spin_structures().map(|_| random_quadratic(rng, h, &linking)).collect();
    let rochlin = spin.spin_structures().map(|_| rng.random_range(0..16u8)).collect();
    let base = InvariantRecord::new(h.clone(), linking, quadratic, &default_moduli(h), rochlin).expect("shape");
    let p = PullbackP::new(&base.spin);
    let count = rng.random_range(0..3);
    let mut r = surgery_s(&base, &random_graphs(rng, &p, count)).expect("valid graphs");
    for v in r.rochlin.iter_mut() {
        *v = rng.random_range(0..16u8);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::validate_record;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn records_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for orders in [vec![], vec![2], vec![0, 0, 0], vec![2, 4], vec![2, 0], vec![3, 6], vec![4, 4, 2]] {
            let h = FgAbelianGroup::new(orders);
            for _ in 0..20 {
                let r = random_record(&mut rng, &h);
                assert!(validate_record(&r).is_empty(), "{:?}", validate_record(&r));
            }
        }
    }
}
