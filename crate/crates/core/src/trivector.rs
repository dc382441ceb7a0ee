//! Third exterior powers `Λ³H` in the basis `e_i∧e_j∧e_k` (`i<j<k`) of
//! order `gcd(n_i, n_j, n_k)`, and their pairing with `Λ³ Hom(H, Z_n)`.

use crate::arith::{self, det3, reduce_wide, sort_triple};
use crate::error::{Error, Result};
use crate::fgab::{DualElement, DualGroup, FgAbelianGroup, GroupElement, Homomorphism};
use std::collections::BTreeMap;

/// The basis of `Λ³H`; triples of order 1 are left out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrivectorSpace {
    base: FgAbelianGroup,
    basis: Vec<[usize; 3]>,
    orders: Vec<u64>,
}

impl TrivectorSpace {
    pub fn new(h: &FgAbelianGroup) -> Self {
        let o = h.orders();
        let r = o.len();
        let mut basis = Vec::new();
        let mut orders = Vec::new();
        for i in 0..r {
            for j in i + 1..r {
                for k in j + 1..r {
                    let g = arith::gcd3(o[i], o[j], o[k]);
                    if g != 1 {
                        basis.push([i, j, k]);
                        orders.push(g);
                    }
                }
            }
        }
        TrivectorSpace { base: h.clone(), basis, orders }
    }

    pub fn base(&self) -> &FgAbelianGroup {
        &self.base
    }

    pub fn basis(&self) -> &[[usize; 3]] {
        &self.basis
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// `Λ³H` as an abstract group, generators in [`Self::basis`] order.
    pub fn group(&self) -> FgAbelianGroup {
        FgAbelianGroup::new(self.orders.iter().copied())
    }

    pub fn to_element(&self, x: &Trivector) -> GroupElement {
        let coeffs: Vec<i64> = self.basis.iter().map(|t| x.coeff(*t)).collect();
        self.group().element(&coeffs).expect("basis length")
    }

    pub fn from_element(&self, e: &GroupElement) -> Trivector {
        let mut x = Trivector::zero(&self.base);
        for (t, &c) in self.basis.iter().zip(e.coeffs()) {
            x.add_basis(*t, c as i128);
        }
        x
    }

    /// All trivectors, lexicographic in basis coordinates.
    pub fn elements(&self) -> Result<impl Iterator<Item = Trivector> + '_> {
        let g = self.group();
        if !g.is_finite() {
            return Err(Error::InfiniteGroup(g.to_string()));
        }
        let bounds = self.orders.clone();
        Ok(crate::fgab::CoefficientBox::new(bounds).map(move |c| {
            let mut x = Trivector::zero(&self.base);
            for (t, &v) in self.basis.iter().zip(&c) {
                x.add_basis(*t, v as i128);
            }
            x
        }))
    }
}

/// Element of `Λ³H`, stored sparsely by sorted index triple.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Trivector {
    base: FgAbelianGroup,
    coeffs: BTreeMap<[usize; 3], i64>,
}

impl Trivector {
    pub fn zero(h: &FgAbelianGroup) -> Self {
        Trivector { base: h.clone(), coeffs: BTreeMap::new() }
    }

    /// `e_i ∧ e_j ∧ e_k` for any (possibly unsorted or repeated) indices.
    pub fn basis(h: &FgAbelianGroup, t: [usize; 3]) -> Self {
        let mut x = Self::zero(h);
        let (sign, s) = sort_triple(t);
        if s[0] != s[1] && s[1] != s[2] {
            x.add_basis(s, sign as i128);
        }
        x
    }

    pub fn base(&self) -> &FgAbelianGroup {
        &self.base
    }

    pub fn order_of(&self, t: [usize; 3]) -> u64 {
        let o = self.base.orders();
        arith::gcd3(o[t[0]], o[t[1]], o[t[2]])
    }

    /// Coefficient of the sorted triple `t`.
    pub fn coeff(&self, t: [usize; 3]) -> i64 {
        self.coeffs.get(&t).copied().unwrap_or(0)
    }

    /// Nonzero coefficients by sorted triple.
    pub fn terms(&self) -> impl Iterator<Item = ([usize; 3], i64)> + '_ {
        self.coeffs.iter().map(|(t, &c)| (*t, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_basis(&mut self, t: [usize; 3], c: i128) {
        let g = self.order_of(t);
        let old = self.coeff(t) as i128;
        let v = reduce_wide(old + c, g);
        if v == 0 {
            self.coeffs.remove(&t);
        } else {
            self.coeffs.insert(t, v);
        }
    }

    fn check_same(&self, other: &Trivector) -> Result<()> {
        if self.base != other.base {
            return Err(Error::GroupMismatch(format!("{} vs {}", self.base, other.base)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Trivector) -> Result<Trivector> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (t, c) in other.terms() {
            out.add_basis(t, c as i128);
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Trivector {
        let mut out = Trivector::zero(&self.base);
        for (t, c) in self.terms() {
            out.add_basis(t, c as i128 * k as i128);
        }
        out
    }

    pub fn neg(&self) -> Trivector {
        self.scale(-1)
    }

    pub fn try_sub(&self, other: &Trivector) -> Result<Trivector> {
        self.try_add(&other.neg())
    }
}

/// `x₁ ∧ x₂ ∧ x₃`, expanded trilinearly into the basis.
pub fn wedge(x1: &GroupElement, x2: &GroupElement, x3: &GroupElement) -> Result<Trivector> {
    let h = x1.group();
    for x in [x2, x3] {
        if x.group() != h {
            return Err(Error::GroupMismatch(format!("{} vs {}", x.group(), h)));
        }
    }
    let (a, b, c) = (x1.coeffs(), x2.coeffs(), x3.coeffs());
    let mut out = Trivector::zero(h);
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj == 0 || j == i {
                continue;
            }
            for (k, &ck) in c.iter().enumerate() {
                if ck == 0 || k == i || k == j {
                    continue;
                }
                let (sign, s) = sort_triple([i, j, k]);
                out.add_basis(s, sign as i128 * ai as i128 * bj as i128 * ck as i128);
            }
        }
    }
    Ok(out)
}

/// Element of `Λ³ Hom(H, Z_n)` in the basis `e_a*∧e_b*∧e_c*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualTrivector {
    dual: DualGroup,
    coeffs: BTreeMap<[usize; 3], i64>,
}

impl DualTrivector {
    pub fn zero(dual: &DualGroup) -> Self {
        DualTrivector { dual: dual.clone(), coeffs: BTreeMap::new() }
    }

    pub fn dual(&self) -> &DualGroup {
        &self.dual
    }

    fn order_of(&self, t: [usize; 3]) -> u64 {
        let o = self.dual.orders();
        arith::gcd3(o[t[0]], o[t[1]], o[t[2]])
    }

    fn add_basis(&mut self, t: [usize; 3], c: i128) {
        let g = self.order_of(t);
        let v = reduce_wide(self.coeffs.get(&t).copied().unwrap_or(0) as i128 + c, g);
        if v == 0 {
            self.coeffs.remove(&t);
        } else {
            self.coeffs.insert(t, v);
        }
    }

    /// `e_a* ∧ e_b* ∧ e_c*`.
    pub fn basis(dual: &DualGroup, t: [usize; 3]) -> Self {
        let mut y = Self::zero(dual);
        let (sign, s) = sort_triple(t);
        if s[0] != s[1] && s[1] != s[2] {
            y.add_basis(s, sign as i128);
        }
        y
    }

    pub fn wedge(dual: &DualGroup, y1: &DualElement, y2: &DualElement, y3: &DualElement) -> Self {
        let mut out = Self::zero(dual);
        let (a, b, c) = (y1.coeffs(), y2.coeffs(), y3.coeffs());
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                for (k, &ck) in c.iter().enumerate() {
                    if ai == 0 || bj == 0 || ck == 0 || i == j || j == k || i == k {
                        continue;
                    }
                    let (sign, s) = sort_triple([i, j, k]);
                    out.add_basis(s, sign as i128 * ai as i128 * bj as i128 * ck as i128);
                }
            }
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = ([usize; 3], i64)> + '_ {
        self.coeffs.iter().map(|(t, &c)| (*t, c))
    }

    pub fn try_add(&self, other: &DualTrivector) -> Result<DualTrivector> {
        if self.dual != other.dual {
            return Err(Error::GroupMismatch("dual trivectors over different duals".into()));
        }
        let mut out = self.clone();
        for (t, c) in other.terms() {
            out.add_basis(t, c as i128);
        }
        Ok(out)
    }
}

/// `det(<e_{s_p}*, e_{t_q}>)` for basis triples `s` (dual) and `t`.
pub(crate) fn basis_pairing(dual: &DualGroup, s: [usize; 3], t: [usize; 3]) -> i128 {
    let h = dual.base();
    let mut m = [[0i128; 3]; 3];
    for p in 0..3 {
        let y = dual.generator(s[p]);
        for q in 0..3 {
            let x = h.generator(t[q]);
            m[p][q] = dual.pair(&y, &x).expect("generators of the same base") as i128;
        }
    }
    det3(m)
}

/// `<y, X>^(n)`: the determinant pairing extended bilinearly.
pub fn pairing_n(y: &DualTrivector, x: &Trivector, n: u64) -> Result<i64> {
    if y.dual.modulus() != n {
        return Err(Error::Invalid(format!("dual trivector has modulus {}, not {n}", y.dual.modulus())));
    }
    if y.dual.base() != x.base() {
        return Err(Error::GroupMismatch(format!("{} vs {}", y.dual.base(), x.base())));
    }
    let mut acc: i128 = 0;
    for (s, ys) in y.terms() {
        for (t, xt) in x.terms() {
            let d = basis_pairing(&y.dual, s, t);
            if d != 0 {
                acc = (acc + reduce_wide(ys as i128 * xt as i128 * d, n) as i128) % modulus_or_max(n);
            }
        }
    }
    Ok(reduce_wide(acc, n))
}

fn modulus_or_max(n: u64) -> i128 {
    if n == 0 {
        i128::MAX
    } else {
        n as i128
    }
}

/// `m² gcd(m, n_i, n_j, n_k) / (gcd(m, n_i) gcd(m, n_j) gcd(m, n_k))`.
pub fn basis_coefficient(m: u64, ni: u64, nj: u64, nk: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    let num = m as u128 * m as u128 * arith::gcd(m, arith::gcd3(ni, nj, nk)) as u128;
    let den = arith::gcd(m, ni) as u128 * arith::gcd(m, nj) as u128 * arith::gcd(m, nk) as u128;
    Ok((num / den) as u64)
}

/// The smallest modulus `n` dividing `exp(H)` with `<-, X>^(n) != 0`, or
/// `None` when `X = 0`.
///
/// Moduli dividing the exponent suffice: pairing with `e_i*∧e_j*∧e_k*` at
/// `n = gcd(n_i, n_j, n_k)` recovers `x_ijk` modulo that order. The
/// exhaustive checks in the test suite confirm this for small groups.
pub fn detect_nonzero(x: &Trivector) -> Result<Option<u64>> {
    let h = x.base();
    if !h.is_finite() {
        return Err(Error::InfiniteGroup(h.to_string()));
    }
    if x.is_zero() {
        return Ok(None);
    }
    for m in arith::divisors(h.exponent()) {
        let dual = DualGroup::new(h, m);
        // <-, X> is nonzero iff some dual basis trivector pairs nonzero.
        let hit = x.terms().any(|(t, c)| reduce_wide(c as i128 * basis_pairing(&dual, t, t), m) != 0);
        if hit {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// `Λ³ψ: Λ³H -> Λ³H'`.
#[derive(Clone, Debug)]
pub struct ExteriorCube {
    psi: Homomorphism,
}

pub fn exterior_cube_hom(psi: &Homomorphism) -> ExteriorCube {
    ExteriorCube { psi: psi.clone() }
}

impl ExteriorCube {
    pub fn apply(&self, x: &Trivector) -> Result<Trivector> {
        if x.base() != self.psi.source() {
            return Err(Error::GroupMismatch(format!("{} is not the source {}", x.base(), self.psi.source())));
        }
        let imgs = self.psi.images();
        let mut out = Trivector::zero(self.psi.target());
        for (t, c) in x.terms() {
            let w = wedge(&imgs[t[0]], &imgs[t[1]], &imgs[t[2]])?.scale(c);
            out = out.try_add(&w)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgab::dual_group;
    use proptest::prelude::*;

    fn g(orders: &[u64]) -> FgAbelianGroup {
        FgAbelianGroup::new(orders.iter().copied())
    }

    #[test]
    fn wedge_examples() {
        let h = g(&[0, 0, 0]);
        let e = |i| h.generator(i);
        assert_eq!(wedge(&e(0), &e(1), &e(2)).unwrap(), Trivector::basis(&h, [0, 1, 2]));
        assert!(wedge(&e(0), &e(0), &e(1)).unwrap().is_zero());
        let sum = &e(0) + &e(1);
        assert_eq!(wedge(&sum, &e(1), &e(2)).unwrap(), Trivector::basis(&h, [0, 1, 2]));
        assert_eq!(wedge(&e(1), &e(0), &e(2)).unwrap(), Trivector::basis(&h, [0, 1, 2]).neg());
    }

    #[test]
    fn pairing_examples() {
        let h = g(&[2, 2, 2]);
        let d = dual_group(&h, 2);
        let y = DualTrivector::basis(&d, [0, 1, 2]);
        assert_eq!(pairing_n(&y, &Trivector::basis(&h, [0, 1, 2]), 2).unwrap(), 1);

        let h = g(&[2, 2, 4]);
        let d = dual_group(&h, 4);
        let y = DualTrivector::basis(&d, [0, 1, 2]);
        assert_eq!(pairing_n(&y, &Trivector::basis(&h, [0, 1, 2]), 4).unwrap(), 0);
        assert_eq!(pairing_n(&y, &Trivector::zero(&h), 4).unwrap(), 0);
        assert!(pairing_n(&y, &Trivector::zero(&h), 2).is_err());
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(basis_coefficient(4, 2, 2, 4).unwrap(), 2);
        assert_eq!(basis_coefficient(2, 2, 2, 2).unwrap(), 1);
        // m = n_i = n_j = n_k gives m^3 / m^3 = 1
        assert_eq!(basis_coefficient(6, 6, 6, 6).unwrap(), 1);
        assert_eq!(basis_coefficient(0, 2, 2, 2), Err(Error::ZeroModulus));
    }

    #[test]
    fn detection_examples() {
        let h = g(&[2, 2, 2]);
        assert_eq!(detect_nonzero(&Trivector::zero(&h)).unwrap(), None);
        assert_eq!(detect_nonzero(&Trivector::basis(&h, [0, 1, 2])).unwrap(), Some(2));
        let h = g(&[2, 2, 4]);
        assert_eq!(detect_nonzero(&Trivector::basis(&h, [0, 1, 2])).unwrap(), Some(2));
        assert!(detect_nonzero(&Trivector::zero(&g(&[0]))).is_err());
    }

    #[test]
    fn coefficient_consistency_exhaustive() {
        // coefficient * m / gcd(m, n_i, n_j, n_k) must match the
        // determinant pairing of the basis pair, modulo m.
        let orders = [0u64, 2, 3, 4, 6, 8, 12];
        for m in 1..=24u64 {
            for &a in &orders {
                for &b in &orders {
                    for &c in &orders {
                        let h = FgAbelianGroup::new([a, b, c]);
                        if h.rank() < 3 {
                            continue;
                        }
                        let dual = DualGroup::new(&h, m);
                        let det = basis_pairing(&dual, [0, 1, 2], [0, 1, 2]);
                        let g4 = arith::gcd(m, arith::gcd3(a, b, c)) as i128;
                        let coeff = basis_coefficient(m, a, b, c).unwrap() as i128;
                        assert_eq!(
                            (coeff * m as i128 / g4).rem_euclid(m as i128),
                            det.rem_euclid(m as i128),
                            "m={m} orders=({a},{b},{c})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn cube_of_reduction_and_swap() {
        let h = g(&[0, 0, 0]);
        let (h2, red) = crate::fgab::tensor_mod(&h, 2);
        let x = Trivector::basis(&h, [0, 1, 2]);
        assert_eq!(exterior_cube_hom(&red).apply(&x).unwrap(), Trivector::basis(&h2, [0, 1, 2]));
        let swap =
            Homomorphism::from_columns(h.clone(), h.clone(), &[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(exterior_cube_hom(&swap).apply(&x).unwrap(), x.neg());
        assert_eq!(exterior_cube_hom(&h.identity()).apply(&x).unwrap(), x);
    }

    fn group_and_coeffs() -> impl Strategy<Value = (Vec<u64>, Vec<Vec<i64>>)> {
        proptest::collection::vec(prop_oneof![Just(0u64), Just(2), Just(3), Just(4), Just(6)], 3..=4).prop_flat_map(
            |orders| {
                let r = orders.len();
                (Just(orders), proptest::collection::vec(proptest::collection::vec(-5i64..5, r), 6))
            },
        )
    }

    proptest! {
        #[test]
        fn pairing_is_bilinear_and_alternating((orders, cs) in group_and_coeffs(), n in prop_oneof![Just(0u64), Just(2), Just(4), Just(12)]) {
            let h = FgAbelianGroup::new(orders);
            let x: Vec<_> = cs[..3].iter().map(|c| h.element(c).unwrap()).collect();
            let d = dual_group(&h, n);
            let ys: Vec<_> = cs[3..].iter().map(|c| d.element(c).unwrap()).collect();
            let y = DualTrivector::wedge(&d, &ys[0], &ys[1], &ys[2]);
            let y_swapped = DualTrivector::wedge(&d, &ys[1], &ys[0], &ys[2]);
            let big_x = wedge(&x[0], &x[1], &x[2]).unwrap();
            let v = pairing_n(&y, &big_x, n).unwrap();
            prop_assert_eq!(reduce_wide(-(v as i128), n), pairing_n(&y_swapped, &big_x, n).unwrap());
            // determinant of pairings on decomposable arguments
            let mut m = [[0i128; 3]; 3];
            for p in 0..3 { for q in 0..3 { m[p][q] = d.pair(&ys[p], &x[q]).unwrap() as i128; } }
            prop_assert_eq!(v, reduce_wide(det3(m), n));
            let x2 = wedge(&x[1], &x[1], &x[2]).unwrap().try_add(&big_x).unwrap();
            prop_assert_eq!(pairing_n(&y, &x2, n).unwrap(), v);
            let sum = y.try_add(&y_swapped).unwrap();
            prop_assert_eq!(pairing_n(&sum, &big_x, n).unwrap(), 0);
        }

        #[test]
        fn cube_is_functorial(a in proptest::collection::vec(-3i64..3, 9), b in proptest::collection::vec(-3i64..3, 9), c in proptest::collection::vec(-3i64..3, 3)) {
            let h = g(&[0, 4, 0]);
            let phi = Homomorphism::from_columns(h.clone(), h.clone(), &[
                vec![a[0], a[1], a[2]], vec![0, a[4], 0], vec![a[6], a[7], a[8]],
            ]).unwrap();
            let psi = Homomorphism::from_columns(h.clone(), h.clone(), &[
                vec![b[0], b[1], b[2]], vec![0, b[4], 0], vec![b[6], b[7], b[8]],
            ]).unwrap();
            let x = wedge(&h.element(&c).unwrap(), &h.generator(1), &h.generator(2)).unwrap();
            let lhs = exterior_cube_hom(&psi.compose(&phi).unwrap()).apply(&x).unwrap();
            let rhs = exterior_cube_hom(&psi).apply(&exterior_cube_hom(&phi).apply(&x).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
