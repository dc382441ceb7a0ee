//! Formal Y-surgery on invariant records, the surgery map `𝔖`, the
//! difference map `𝔈`, the map `𝔑` out of the pull-back
//! `Λ³H ×_{Λ³H_(2)} C(S, Z_2)`, and the square `𝔈 ∘ 𝔖 = 𝔑 ∘ 𝔚`.

use crate::arith::{det3, reduce_wide};
use crate::error::{Error, Result};
use crate::fgab::{DualGroup, Homomorphism};
use crate::invariants::{BElement, CupTable, InvariantRecord};
use crate::spin::{w_of_terms, OffsetMap, PullbackElement, PullbackP, SpinSpace, TriCubicPair, TriCubicSpace};
use crate::trivector::{pairing_n, DualTrivector};
use crate::ygraph::YTerm;
use std::collections::BTreeMap;

/// A Y-graph reduced to its three leaf classes in `P` and a sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalYGraph {
    pub sign: i64,
    pub leaves: [PullbackElement; 3],
}

impl FormalYGraph {
    pub fn new(sign: i64, leaves: [PullbackElement; 3]) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::Invalid(format!("graph sign {sign} is not ±1")));
        }
        Ok(FormalYGraph { sign, leaves })
    }

    /// Leaves in the order they are attached: a negative sign swaps the
    /// first two.
    pub fn realized_leaves(&self) -> [&PullbackElement; 3] {
        let [a, b, c] = &self.leaves;
        if self.sign < 0 {
            [b, a, c]
        } else {
            [a, b, c]
        }
    }

    /// All leaves `(0, 0)`.
    pub fn zero(p: &PullbackP) -> Self {
        let z = p.zero_element();
        FormalYGraph { sign: 1, leaves: [z.clone(), z.clone(), z] }
    }

    pub fn to_y_term(&self, p: &PullbackP) -> YTerm {
        p.y_term(self.sign, &self.leaves)
    }

    pub fn from_y_term(p: &PullbackP, t: &YTerm) -> Result<Self> {
        let leaves = t.colors.clone().map(|c| p.from_group_element(&c));
        let sign = if t.sign >= 0 { 1 } else { -1 };
        if t.sign.abs() != 1 {
            return Err(Error::Invalid("Y-term with multiplicity; split it first".into()));
        }
        FormalYGraph::new(sign, leaves)
    }

    fn check_over(&self, space: &SpinSpace) -> Result<()> {
        let p = PullbackP::new(space);
        for l in &self.leaves {
            p.element(l.h.clone(), l.f)?;
        }
        Ok(())
    }
}

/// `(u^(n) + ⟨-, h₁∧h₂∧h₃⟩^(n))_n` and `R + 8 f₁f₂f₃`; `H`, `λ`, `q` are
/// untouched.
pub fn apply_y_surgery(r: &InvariantRecord, g: &FormalYGraph) -> Result<InvariantRecord> {
    g.check_over(&r.spin)?;
    let [l1, l2, l3] = g.realized_leaves();
    let h = &r.homology;
    let rank = h.rank();
    let mut out = r.clone();
    for (&n, table) in out.cup.iter_mut() {
        let dual = DualGroup::new(h, n);
        let vals: Vec<[i128; 3]> = (0..rank)
            .map(|a| {
                let y = dual.generator(a);
                [l1, l2, l3].map(|l| dual.pair(&y, &l.h).expect("same group") as i128)
            })
            .collect();
        for i in 0..rank {
            for j in i + 1..rank {
                for k in j + 1..rank {
                    let d = reduce_wide(det3([vals[i], vals[j], vals[k]]), n);
                    if d != 0 {
                        table.add_to([i, j, k], d);
                    }
                }
            }
        }
    }
    for (sigma, v) in out.rochlin.iter_mut().enumerate() {
        let s = sigma as u64;
        if l1.f.eval(s) & l2.f.eval(s) & l3.f.eval(s) == 1 {
            *v = (*v + 8) % 16;
        }
    }
    Ok(out)
}

/// `𝔖`: surgery along each graph in turn.
pub fn surgery_s(r: &InvariantRecord, graphs: &[FormalYGraph]) -> Result<InvariantRecord> {
    graphs.iter().try_fold(r.clone(), |acc, g| apply_y_surgery(&acc, g))
}

/// `𝔑(X, f) = ((⟨-, X⟩^(n))_n, 8f)`.
pub fn map_n(space: &SpinSpace, moduli: &[u64], x: &TriCubicPair) -> Result<BElement> {
    TriCubicSpace::new(space).check(x)?;
    let h = space.homology();
    let rank = h.rank();
    let mut cup = BTreeMap::new();
    for &n in moduli {
        let dual = DualGroup::new(h, n);
        let mut table = CupTable::zero(n);
        for i in 0..rank {
            for j in i + 1..rank {
                for k in j + 1..rank {
                    let v = pairing_n(&DualTrivector::basis(&dual, [i, j, k]), &x.trivector, n)?;
                    table.set([i, j, k], v);
                }
            }
        }
        cup.insert(n, table);
    }
    let rochlin = space.spin_structures().map(|s| 8 * x.cubic.eval(s)).collect();
    Ok(BElement { cup, rochlin })
}

/// Checks that `ψ` is an isomorphism preserving `λ` and that the records
/// carry the same moduli.
pub fn check_preconditions(base: &InvariantRecord, other: &InvariantRecord, psi: &Homomorphism) -> Result<()> {
    if psi.source() != &base.homology || psi.target() != &other.homology {
        return Err(Error::GroupMismatch("isomorphism does not connect the two homologies".into()));
    }
    if !psi.is_isomorphism() {
        return Err(Error::NotIsomorphism);
    }
    if base.moduli() != other.moduli() {
        return Err(Error::ModuliMismatch(base.moduli(), other.moduli()));
    }
    let h = &base.homology;
    let t = h.torsion_indices();
    for &i in &t {
        for &j in &t {
            let (x, y) = (h.generator(i), h.generator(j));
            if base.linking.value(&x, &y)? != other.linking.value(&psi.apply(&x)?, &psi.apply(&y)?)? {
                return Err(Error::LinkingMismatch);
            }
        }
    }
    Ok(())
}

/// `𝔈`: the differences `u'^(n)((ψ^(n))⁻¹ -) - u^(n)` on sorted dual
/// triples of `H`, and `s ↦ R'(σ'₀ + y') - R(s)` where `Ψ(σ'₀ + y') = s`
/// for `Ψ(σ'₀ + y') = σ₀ + t + ψ^(2)(y')`.
pub fn map_e(base: &InvariantRecord, other: &InvariantRecord, psi: &Homomorphism, offset: u64) -> Result<BElement> {
    check_preconditions(base, other, psi)?;
    let inv = psi.inverse()?;
    let h = &base.homology;
    let rank = h.rank();
    let mut cup = BTreeMap::new();
    for (&n, u) in &base.cup {
        let u2 = &other.cup[&n];
        let dual = DualGroup::new(h, n);
        let pulled: Vec<_> = (0..rank).map(|a| dual.pullback(&inv, &dual.generator(a))).collect::<Result<Vec<_>>>()?;
        let mut table = CupTable::zero(n);
        for i in 0..rank {
            for j in i..rank {
                for k in j..rank {
                    let v = u2.evaluate([&pulled[i], &pulled[j], &pulled[k]]) as i128 - u.get([i, j, k]) as i128;
                    table.set([i, j, k], reduce_wide(v, n));
                }
            }
        }
        cup.insert(n, table);
    }
    // y' = (ψ^(2))⁻¹(s + t), computed with (ψ⁻¹)^(2)
    let back = OffsetMap::new(&inv, &other.spin, &base.spin)?;
    let rochlin = base
        .spin
        .spin_structures()
        .map(|s| {
            let y2 = back.apply(s ^ offset);
            (16 + other.rochlin[y2 as usize] - base.rochlin[s as usize]) % 16
        })
        .collect();
    Ok(BElement { cup, rochlin })
}

/// `𝔈(r, 𝔖(r, G_X), id, 0) == 𝔑(𝔚(X))`.
pub fn check_square(base: &InvariantRecord, terms: &[YTerm]) -> Result<bool> {
    let p = PullbackP::new(&base.spin);
    let graphs = terms.iter().map(|t| FormalYGraph::from_y_term(&p, t)).collect::<Result<Vec<_>>>()?;
    let surgered = surgery_s(base, &graphs)?;
    let lhs = map_e(base, &surgered, &base.homology.identity(), 0)?;
    let rhs = map_n(&base.spin, &base.moduli(), &w_of_terms(&p, terms)?)?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgab::FgAbelianGroup;
    use crate::invariants::{default_moduli, validate_record, LinkingPairing, QuadFn};
    use crate::trivector::Trivector;

    fn free3() -> InvariantRecord {
        let h = FgAbelianGroup::free(3);
        InvariantRecord::new(
            h.clone(),
            LinkingPairing::trivial(&h),
            vec![QuadFn::new(vec![]); 8],
            &default_moduli(&h),
            vec![0; 8],
        )
        .unwrap()
    }

    fn basis_graph(r: &InvariantRecord, sign: i64) -> FormalYGraph {
        let p = PullbackP::new(&r.spin);
        FormalYGraph::new(sign, [p.basis_element(0), p.basis_element(1), p.basis_element(2)]).unwrap()
    }

    #[test]
    fn zero_leaves_change_nothing() {
        let r = free3();
        let p = PullbackP::new(&r.spin);
        assert_eq!(apply_y_surgery(&r, &FormalYGraph::zero(&p)).unwrap(), r);
    }

    #[test]
    fn sphere_rochlin_shift() {
        let r = InvariantRecord::homology_sphere(0);
        let p = PullbackP::new(&r.spin);
        let s = p.special();
        let g = FormalYGraph::new(1, [s.clone(), s.clone(), s]).unwrap();
        assert_eq!(apply_y_surgery(&r, &g).unwrap().rochlin, vec![8]);
    }

    #[test]
    fn basis_leaves_give_unit_cup() {
        let r = free3();
        let out = apply_y_surgery(&r, &basis_graph(&r, 1)).unwrap();
        assert_eq!(out.cup[&0].get([0, 1, 2]), 1);
        assert_eq!(out.cup[&2].get([0, 1, 2]), 1);
        assert_eq!(out.rochlin[0b111], 8);
        assert_eq!(out.rochlin.iter().filter(|&&v| v == 8).count(), 1);
        assert!(validate_record(&out).is_empty());
        let neg = apply_y_surgery(&r, &basis_graph(&r, -1)).unwrap();
        assert_eq!(neg.cup[&0].get([0, 1, 2]), -1);
        assert_eq!(neg.linking, r.linking);
        assert_eq!(neg.quadratic, r.quadratic);
    }

    #[test]
    fn opposite_signs_cancel() {
        let r = free3();
        let out = surgery_s(&r, &[basis_graph(&r, 1), basis_graph(&r, -1)]).unwrap();
        assert_eq!(out, r);
        assert_eq!(surgery_s(&r, &[]).unwrap(), r);
    }

    #[test]
    fn map_n_examples() {
        let r = free3();
        let tcs = TriCubicSpace::new(&r.spin);
        let x = TriCubicPair {
            trivector: Trivector::basis(&r.homology, [0, 1, 2]),
            cubic: r.spin.monomial(0b111).unwrap(),
        };
        let b = map_n(&r.spin, &r.moduli(), &x).unwrap();
        assert_eq!(b.cup[&0].get([0, 1, 2]), 1);
        assert_eq!(
            b.rochlin.iter().enumerate().filter(|(_, &v)| v == 8).map(|(s, _)| s).collect::<Vec<_>>(),
            vec![0b111]
        );
        let bad = TriCubicPair { trivector: Trivector::zero(&r.homology), cubic: r.spin.monomial(0b111).unwrap() };
        assert!(matches!(map_n(&r.spin, &r.moduli(), &bad), Err(Error::ConstraintViolation(_))));
        assert!(tcs.check(&x).is_ok());

        let s = InvariantRecord::homology_sphere(0);
        let one = TriCubicPair { trivector: Trivector::zero(&s.homology), cubic: s.spin.monomial(0).unwrap() };
        assert_eq!(map_n(&s.spin, &s.moduli(), &one).unwrap().rochlin, vec![8]);
    }

    #[test]
    fn map_e_examples() {
        let r = free3();
        let id = r.homology.identity();
        assert!(map_e(&r, &r, &id, 0).unwrap().is_zero());
        let mut shifted = r.clone();
        shifted.rochlin[3] = 8;
        let b = map_e(&r, &shifted, &id, 0).unwrap();
        assert!(b.cup.values().all(CupTable::is_zero));
        assert_eq!(b.rochlin.iter().filter(|&&v| v != 0).count(), 1);
        assert_eq!(b.rochlin[3], 8);
    }

    #[test]
    fn square_on_basis_graph() {
        let r = free3();
        let p = PullbackP::new(&r.spin);
        let t = basis_graph(&r, 1).to_y_term(&p);
        assert!(check_square(&r, std::slice::from_ref(&t)).unwrap());
        assert!(check_square(&r, &[t.negated()]).unwrap());
        assert!(check_square(&r, &[]).unwrap());
    }

    #[test]
    fn leaves_must_satisfy_constraint() {
        let r = free3();
        let p = PullbackP::new(&r.spin);
        let mut bad = p.basis_element(0);
        bad.f = r.spin.constant(0);
        let g = FormalYGraph::new(1, [bad, p.basis_element(1), p.basis_element(2)]).unwrap();
        assert!(matches!(apply_y_surgery(&r, &g), Err(Error::ConstraintViolation(_))));
    }
}
