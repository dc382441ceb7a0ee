//! Invariant records `(H, S, λ, q, (u^(n)), R)` and the difference space
//! `ℬ(H, S)` of per-modulus trilinear tables and `Z_16`-valued functions on
//! spin structures.

use crate::arith::{self, reduce_wide};
use crate::error::{Error, Result};
use crate::fgab::{DualElement, DualGroup, FgAbelianGroup, GroupElement};
use crate::spin::SpinSpace;
use num_integer::Integer;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

/// An element `a/b` of `Q/Z` in lowest terms with `0 <= a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QmodZ {
    num: u64,
    den: u64,
}

impl QmodZ {
    pub const ZERO: QmodZ = QmodZ { num: 0, den: 1 };

    pub fn new(a: i128, b: i128) -> Result<Self> {
        if b == 0 {
            return Err(Error::Invalid("zero denominator".into()));
        }
        let (a, b) = if b < 0 { (-a, -b) } else { (a, b) };
        let a = a.rem_euclid(b);
        let g = a.gcd(&b);
        let (num, den) = (a / g, b / g);
        let den = u64::try_from(den).map_err(|_| Error::Overflow("Q/Z denominator"))?;
        Ok(QmodZ { num: num as u64, den })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn mul_int(self, k: i128) -> QmodZ {
        let d = self.den as i128;
        QmodZ::new((self.num as i128 * k.rem_euclid(d)).rem_euclid(d), d).expect("positive denominator")
    }
}

impl Add for QmodZ {
    type Output = QmodZ;

    fn add(self, other: QmodZ) -> QmodZ {
        let l = (self.den as i128).lcm(&(other.den as i128));
        let a = self.num as i128 * (l / self.den as i128) + other.num as i128 * (l / other.den as i128);
        QmodZ::new(a, l).expect("positive denominator")
    }
}

impl Neg for QmodZ {
    type Output = QmodZ;

    fn neg(self) -> QmodZ {
        QmodZ::new(-(self.num as i128), self.den as i128).expect("positive denominator")
    }
}

impl Sub for QmodZ {
    type Output = QmodZ;

    fn sub(self, other: QmodZ) -> QmodZ {
        self + -other
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for QmodZ {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("{s:?} is not a fraction a/b"));
        let (a, b) = s.split_once('/').ok_or_else(bad)?;
        let a: i128 = a.trim().parse().map_err(|_| bad())?;
        let b: i128 = b.trim().parse().map_err(|_| bad())?;
        QmodZ::new(a, b)
    }
}

/// Symmetric pairing on the torsion generators of `H`, stored as the
/// matrix `λ(e_i, e_j)` over the torsion indices in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinkingPairing {
    torsion: Vec<usize>,
    matrix: Vec<Vec<QmodZ>>,
}

impl LinkingPairing {
    pub fn new(h: &FgAbelianGroup, matrix: Vec<Vec<QmodZ>>) -> Result<Self> {
        let torsion = h.torsion_indices();
        if matrix.len() != torsion.len() || matrix.iter().any(|row| row.len() != torsion.len()) {
            return Err(Error::ShapeMismatch(format!(
                "linking matrix must be {0}x{0} over the torsion generators",
                torsion.len()
            )));
        }
        Ok(LinkingPairing { torsion, matrix })
    }

    pub fn trivial(h: &FgAbelianGroup) -> Self {
        let t = h.torsion_indices().len();
        LinkingPairing { torsion: h.torsion_indices(), matrix: vec![vec![QmodZ::ZERO; t]; t] }
    }

    pub fn torsion_indices(&self) -> &[usize] {
        &self.torsion
    }

    pub fn matrix(&self) -> &[Vec<QmodZ>] {
        &self.matrix
    }

    /// `λ(e_{t_a}, e_{t_b})` by torsion position.
    pub fn entry(&self, a: usize, b: usize) -> QmodZ {
        self.matrix[a][b]
    }

    /// `λ(x, y)` for torsion elements.
    pub fn value(&self, x: &GroupElement, y: &GroupElement) -> Result<QmodZ> {
        let (cx, cy) = (self.torsion_coeffs(x)?, self.torsion_coeffs(y)?);
        let mut acc = QmodZ::ZERO;
        for (a, &xa) in cx.iter().enumerate() {
            if xa == 0 {
                continue;
            }
            for (b, &yb) in cy.iter().enumerate() {
                if yb != 0 {
                    acc = acc.add(self.matrix[a][b].mul_int(xa as i128 * yb as i128));
                }
            }
        }
        Ok(acc)
    }

    fn torsion_coeffs(&self, x: &GroupElement) -> Result<Vec<i64>> {
        if !x.is_torsion() {
            return Err(Error::NonTorsion);
        }
        Ok(self.torsion.iter().map(|&i| x.coeffs()[i]).collect())
    }

    /// Constraint violations: asymmetry, order incompatibility, degeneracy.
    pub fn violations(&self, h: &FgAbelianGroup) -> Vec<Violation> {
        let mut out = Vec::new();
        let t = self.torsion.len();
        for a in 0..t {
            for b in 0..t {
                if self.matrix[a][b] != self.matrix[b][a] {
                    out.push(Violation::new(
                        "asymmetric pairing",
                        format!(
                            "λ(e{}, e{}) != λ(e{}, e{})",
                            self.torsion[a], self.torsion[b], self.torsion[b], self.torsion[a]
                        ),
                    ));
                }
                let n = h.orders()[self.torsion[a]];
                if !self.matrix[a][b].mul_int(n as i128).is_zero() {
                    out.push(Violation::new(
                        "pairing incompatible with orders",
                        format!(
                            "{} * λ(e{}, e{}) = {} is nonzero",
                            n,
                            self.torsion[a],
                            self.torsion[b],
                            self.matrix[a][b].mul_int(n as i128)
                        ),
                    ));
                }
            }
        }
        if out.is_empty() {
            if let Some(x) = self.kernel_witness(h) {
                out.push(Violation::new("degenerate pairing", format!("λ({:?}, -) = 0", x.coeffs())));
            }
        }
        out
    }

    /// A nonzero torsion element pairing trivially with everything.
    fn kernel_witness(&self, h: &FgAbelianGroup) -> Option<GroupElement> {
        h.torsion_elements()
            .skip(1)
            .find(|x| self.torsion.iter().all(|&i| self.value(x, &h.generator(i)).expect("torsion").is_zero()))
    }
}

/// Values `q(e_i)` of a quadratic function over a linking pairing, on the
/// torsion generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadFn {
    values: Vec<QmodZ>,
}

impl QuadFn {
    pub fn new(values: Vec<QmodZ>) -> Self {
        QuadFn { values }
    }

    pub fn values(&self) -> &[QmodZ] {
        &self.values
    }

    /// `n_i q(e_i) + C(n_i, 2) λ(e_i, e_i) = 0` on every torsion generator.
    pub fn violations(&self, h: &FgAbelianGroup, lambda: &LinkingPairing) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.values.len() != lambda.torsion.len() {
            out.push(Violation::new(
                "quadratic function shape",
                format!("{} values for {} torsion generators", self.values.len(), lambda.torsion.len()),
            ));
            return out;
        }
        for (a, &i) in lambda.torsion.iter().enumerate() {
            let n = h.orders()[i] as i128;
            let v = self.values[a].mul_int(n).add(lambda.matrix[a][a].mul_int(n * (n - 1) / 2));
            if !v.is_zero() {
                out.push(Violation::new("quadratic closure", format!("n q(e{i}) + C(n,2) λ(e{i}, e{i}) = {v}")));
            }
        }
        out
    }
}

/// `q(Σ c_i e_i) = Σ c_i q(e_i) + C(c_i, 2) λ(e_i, e_i) + Σ_{i<j} c_i c_j λ(e_i, e_j)`.
pub fn quad_value(q: &QuadFn, lambda: &LinkingPairing, x: &GroupElement) -> Result<QmodZ> {
    let c = lambda.torsion_coeffs(x)?;
    let mut acc = QmodZ::ZERO;
    for a in 0..c.len() {
        let ca = c[a] as i128;
        if ca == 0 {
            continue;
        }
        acc = acc.add(q.values[a].mul_int(ca)).add(lambda.matrix[a][a].mul_int(ca * (ca - 1) / 2));
        for (b, &cb) in c.iter().enumerate().skip(a + 1) {
            if cb != 0 {
                acc = acc.add(lambda.matrix[a][b].mul_int(ca * cb as i128));
            }
        }
    }
    Ok(acc)
}

/// A trilinear form on `H^(n)`, stored on sorted dual-basis index triples
/// `i <= j <= k`; other orderings are recovered by skew-symmetry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CupTable {
    modulus: u64,
    entries: BTreeMap<[usize; 3], i64>,
}

impl CupTable {
    pub fn zero(modulus: u64) -> Self {
        CupTable { modulus, entries: BTreeMap::new() }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Nonzero entries on sorted triples.
    pub fn entries(&self) -> impl Iterator<Item = ([usize; 3], i64)> + '_ {
        self.entries.iter().map(|(t, &v)| (*t, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value on `(e_a*, e_b*, e_c*)` in any order.
    pub fn get(&self, t: [usize; 3]) -> i64 {
        let (sign, s) = arith::sort_triple(t);
        let v = self.entries.get(&s).copied().unwrap_or(0);
        reduce_wide(sign as i128 * v as i128, self.modulus)
    }

    /// Sets the value on `t` (any order), storing it on the sorted triple.
    pub fn set(&mut self, t: [usize; 3], v: i64) {
        let (sign, s) = arith::sort_triple(t);
        let v = reduce_wide(sign as i128 * v as i128, self.modulus);
        if v == 0 {
            self.entries.remove(&s);
        } else {
            self.entries.insert(s, v);
        }
    }

    pub fn add_to(&mut self, t: [usize; 3], v: i64) {
        let cur = self.get(t) as i128;
        let total = reduce_wide(cur + v as i128, self.modulus);
        self.set(t, total);
    }

    fn combine(&self, other: &CupTable, sign: i64) -> Result<CupTable> {
        if self.modulus != other.modulus {
            return Err(Error::ShapeMismatch(format!("tables mod {} and mod {}", self.modulus, other.modulus)));
        }
        let mut out = self.clone();
        for (t, v) in other.entries() {
            out.add_to(t, sign * v);
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &CupTable) -> Result<CupTable> {
        self.combine(other, 1)
    }

    pub fn try_sub(&self, other: &CupTable) -> Result<CupTable> {
        self.combine(other, -1)
    }

    /// Trilinear evaluation on arbitrary dual elements.
    pub fn evaluate(&self, y: [&DualElement; 3]) -> i64 {
        let mut acc: i128 = 0;
        let m = if self.modulus == 0 { None } else { Some(self.modulus as i128) };
        for (s, v) in self.entries() {
            // sum over the distinct orderings of the sorted triple
            for perm in distinct_permutations(s) {
                let (sign, _) = arith::sort_triple(perm);
                let c =
                    y[0].coeffs()[perm[0]] as i128 * y[1].coeffs()[perm[1]] as i128 * y[2].coeffs()[perm[2]] as i128;
                if c != 0 {
                    acc += sign as i128 * v as i128 * c;
                    if let Some(m) = m {
                        acc %= m;
                    }
                }
            }
        }
        reduce_wide(acc, self.modulus)
    }

    /// Violations of the skew, order and repeated-index constraints on `H^(n)`.
    pub fn violations(&self, h: &FgAbelianGroup) -> Vec<Violation> {
        let dual = DualGroup::new(h, self.modulus);
        let mut out = Vec::new();
        let label = self.modulus;
        for (t, v) in self.entries() {
            if t[2] >= h.rank() {
                out.push(Violation::new("cup index out of range", format!("mod {label} entry {t:?}")));
                continue;
            }
            if (t[0] == t[1] || t[1] == t[2]) && reduce_wide(2 * v as i128, self.modulus) != 0 {
                out.push(Violation::new("cup skew-symmetry", format!("mod {label} entry {t:?} = {v} but 2v != 0")));
            }
            for &a in &t {
                let d = dual.orders()[a];
                let bad = if d == 0 { false } else { reduce_wide(d as i128 * v as i128, self.modulus) != 0 };
                if bad {
                    out.push(Violation::new(
                        "cup order constraint",
                        format!("mod {label} entry {t:?} = {v} is not killed by the order {d} of e{a}*"),
                    ));
                    break;
                }
            }
        }
        out
    }
}

fn distinct_permutations(t: [usize; 3]) -> Vec<[usize; 3]> {
    let all = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out: Vec<[usize; 3]> = all.iter().map(|p| [t[p[0]], t[p[1]], t[p[2]]]).collect();
    out.sort();
    out.dedup();
    out
}

/// `u^(n)(ρy₁, ρy₂, ρy₃) = u^(m)(y₁, y₂, y₃) mod n` for `n | m`, checked on
/// all sorted dual-basis triples.
pub fn naturality_violations(h: &FgAbelianGroup, high: &CupTable, low: &CupTable) -> Vec<Violation> {
    let (m, n) = (high.modulus, low.modulus);
    let dm = DualGroup::new(h, m);
    let r = h.rank();
    let mut rho = Vec::with_capacity(r);
    for a in 0..r {
        match dm.reduce_to(n, &dm.generator(a)) {
            Ok((_, z)) => rho.push(z),
            Err(e) => return vec![Violation::new("cup reduction", e.to_string())],
        }
    }
    let mut out = Vec::new();
    for i in 0..r {
        for j in i..r {
            for k in j..r {
                let lhs = low.evaluate([&rho[i], &rho[j], &rho[k]]);
                let rhs = reduce_wide(high.get([i, j, k]) as i128, n);
                if lhs != rhs {
                    out.push(Violation::new(
                        "cup reduction naturality",
                        format!("u^({n}) on reduced ({i},{j},{k}) is {lhs}, u^({m}) reduces to {rhs}"),
                    ));
                }
            }
        }
    }
    out
}

/// One failed constraint with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub constraint: &'static str,
    pub witness: String,
}

impl Violation {
    pub fn new(constraint: &'static str, witness: String) -> Self {
        Violation { constraint, witness }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.constraint, self.witness)
    }
}

/// Default modulus set: `0`, `2`, and every divisor `> 1` of the torsion
/// exponent.
pub fn default_moduli(h: &FgAbelianGroup) -> Vec<u64> {
    let mut out = vec![0, 2];
    out.extend(arith::divisors(h.torsion_exponent()).into_iter().filter(|&d| d > 1));
    out.sort_unstable();
    out.dedup();
    out
}

fn divides(n: u64, m: u64) -> bool {
    if n == 0 {
        m == 0
    } else {
        m.is_multiple_of(n)
    }
}

/// The quintuplet of one manifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantRecord {
    pub homology: FgAbelianGroup,
    pub spin: SpinSpace,
    pub linking: LinkingPairing,
    /// `q[σ]` by spin mask.
    pub quadratic: Vec<QuadFn>,
    /// `u^(n)` by modulus.
    pub cup: BTreeMap<u64, CupTable>,
    /// `R(σ) ∈ Z_16` by spin mask.
    pub rochlin: Vec<u8>,
}

impl InvariantRecord {
    /// A record with zero cup tables on `moduli`, a given pairing, the same
    /// quadratic function at every spin structure, and Rochlin values.
    pub fn new(
        homology: FgAbelianGroup,
        linking: LinkingPairing,
        quadratic: Vec<QuadFn>,
        moduli: &[u64],
        rochlin: Vec<u8>,
    ) -> Result<Self> {
        let spin = SpinSpace::new(&homology)?;
        let cup = moduli.iter().map(|&n| (n, CupTable::zero(n))).collect();
        let r = InvariantRecord { homology, spin, linking, quadratic, cup, rochlin };
        r.check_shape()?;
        Ok(r)
    }

    /// `H = 0` with Rochlin invariant `rochlin`.
    pub fn homology_sphere(rochlin: u8) -> Self {
        let h = FgAbelianGroup::trivial();
        InvariantRecord::new(
            h.clone(),
            LinkingPairing::trivial(&h),
            vec![QuadFn::new(vec![])],
            &default_moduli(&h),
            vec![rochlin % 16],
        )
        .expect("well-formed")
    }

    pub fn moduli(&self) -> Vec<u64> {
        self.cup.keys().copied().collect()
    }

    /// Structural consistency (sizes), as opposed to [`validate_record`].
    pub fn check_shape(&self) -> Result<()> {
        let count = self.spin.count() as usize;
        if self.spin.homology() != &self.homology {
            return Err(Error::ShapeMismatch("spin space over another homology".into()));
        }
        if self.quadratic.len() != count || self.rochlin.len() != count {
            return Err(Error::ShapeMismatch(format!(
                "expected {count} quadratic functions and Rochlin values, got {} and {}",
                self.quadratic.len(),
                self.rochlin.len()
            )));
        }
        if self.linking.torsion != self.homology.torsion_indices() {
            return Err(Error::ShapeMismatch("linking pairing over other torsion generators".into()));
        }
        for (&n, t) in &self.cup {
            if t.modulus != n {
                return Err(Error::ShapeMismatch(format!("table keyed {n} has modulus {}", t.modulus)));
            }
        }
        Ok(())
    }
}

/// All constraint violations of a record; empty iff the record is valid.
pub fn validate_record(r: &InvariantRecord) -> Vec<Violation> {
    if let Err(e) = r.check_shape() {
        return vec![Violation::new("record shape", e.to_string())];
    }
    let h = &r.homology;
    let mut out = r.linking.violations(h);
    for (sigma, q) in r.quadratic.iter().enumerate() {
        for mut v in q.violations(h, &r.linking) {
            v.witness = format!("spin {}: {}", r.spin.bitstring(sigma as u64), v.witness);
            out.push(v);
        }
    }
    for (sigma, &v) in r.rochlin.iter().enumerate() {
        if v >= 16 {
            out.push(Violation::new(
                "Rochlin range",
                format!("spin {}: {v} is not in Z_16", r.spin.bitstring(sigma as u64)),
            ));
        }
    }
    for t in r.cup.values() {
        out.extend(t.violations(h));
    }
    for (&m, high) in &r.cup {
        for (&n, low) in &r.cup {
            if n != m && divides(n, m) {
                out.extend(naturality_violations(h, high, low));
            }
        }
    }
    out
}

/// Element of `ℬ(H, S)`: trilinear tables per modulus and a `Z_16`-valued
/// function on spin structures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BElement {
    pub cup: BTreeMap<u64, CupTable>,
    pub rochlin: Vec<u8>,
}

impl BElement {
    pub fn zero(moduli: &[u64], spin_count: u64) -> Self {
        BElement {
            cup: moduli.iter().map(|&n| (n, CupTable::zero(n))).collect(),
            rochlin: vec![0; spin_count as usize],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cup.values().all(CupTable::is_zero) && self.rochlin.iter().all(|&v| v == 0)
    }

    fn check_shape(&self, other: &BElement) -> Result<()> {
        if self.cup.keys().ne(other.cup.keys()) {
            return Err(Error::ModuliMismatch(self.cup.keys().copied().collect(), other.cup.keys().copied().collect()));
        }
        if self.rochlin.len() != other.rochlin.len() {
            return Err(Error::ShapeMismatch("different numbers of spin structures".into()));
        }
        Ok(())
    }

    pub fn b_add(&self, other: &BElement) -> Result<BElement> {
        self.check_shape(other)?;
        let cup = self.cup.iter().map(|(&n, t)| Ok((n, t.try_add(&other.cup[&n])?))).collect::<Result<_>>()?;
        let rochlin = self.rochlin.iter().zip(&other.rochlin).map(|(a, b)| (a + b) % 16).collect();
        Ok(BElement { cup, rochlin })
    }

    pub fn b_subtract(&self, other: &BElement) -> Result<BElement> {
        self.check_shape(other)?;
        let cup = self.cup.iter().map(|(&n, t)| Ok((n, t.try_sub(&other.cup[&n])?))).collect::<Result<_>>()?;
        let rochlin = self.rochlin.iter().zip(&other.rochlin).map(|(a, b)| (16 + a - b) % 16).collect();
        Ok(BElement { cup, rochlin })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> QmodZ {
        s.parse().unwrap()
    }

    fn z2_record(lambda: &str, qv: &str) -> InvariantRecord {
        let h = FgAbelianGroup::new([2]);
        let l = LinkingPairing::new(&h, vec![vec![q(lambda)]]).unwrap();
        InvariantRecord::new(h.clone(), l, vec![QuadFn::new(vec![q(qv)]); 2], &default_moduli(&h), vec![0, 0]).unwrap()
    }

    #[test]
    fn fractions_are_canonical() {
        assert_eq!(q("2/4").to_string(), "1/2");
        assert_eq!(q("-1/4").to_string(), "3/4");
        assert_eq!(q("3/1").to_string(), "0/1");
        assert_eq!(q("1/-3").to_string(), "2/3");
        assert_eq!(q("1/4").add(q("3/4")), QmodZ::ZERO);
        assert!("1/0".parse::<QmodZ>().is_err());
        assert!("half".parse::<QmodZ>().is_err());
    }

    #[test]
    fn validation_examples() {
        assert!(validate_record(&InvariantRecord::homology_sphere(0)).is_empty());
        let degenerate = validate_record(&z2_record("0/1", "0/1"));
        assert!(degenerate.iter().any(|v| v.constraint == "degenerate pairing"), "{degenerate:?}");
        assert!(validate_record(&z2_record("1/2", "1/4")).is_empty());
        let closure = validate_record(&z2_record("1/2", "1/2"));
        assert!(closure.iter().any(|v| v.constraint == "quadratic closure"));
    }

    #[test]
    fn quad_value_examples() {
        let r = z2_record("1/2", "1/4");
        let h = &r.homology;
        let qf = &r.quadratic[0];
        assert_eq!(quad_value(qf, &r.linking, &h.zero()).unwrap(), QmodZ::ZERO);
        assert_eq!(quad_value(qf, &r.linking, &h.generator(0)).unwrap(), q("1/4"));
        let free = FgAbelianGroup::new([0]);
        let l = LinkingPairing::trivial(&free);
        assert_eq!(quad_value(&QuadFn::new(vec![]), &l, &free.generator(0)), Err(Error::NonTorsion));
    }

    #[test]
    fn quad_multiples_match_fold() {
        // Z_12 with λ = 5/12: q(k e) = k q(e) + C(k,2) λ(e,e), against adding e one at a time
        let h = FgAbelianGroup::new([12]);
        let l = LinkingPairing::new(&h, vec![vec![q("5/12")]]).unwrap();
        // closure: 12 q + 66 * 5/12 = 0 forces q = (2k - 1)/24
        let qf = QuadFn::new(vec![q("7/24")]);
        assert!(qf.violations(&h, &l).is_empty());
        let e = h.generator(0);
        let mut acc = h.zero();
        let mut folded = QmodZ::ZERO;
        for k in 1..=6 {
            folded = folded.add(q("7/24")).add(l.value(&acc, &e).unwrap());
            acc = &acc + &e;
            assert_eq!(quad_value(&qf, &l, &e.scale(k)).unwrap(), folded);
        }
    }

    #[test]
    fn cup_table_skew() {
        let mut t = CupTable::zero(0);
        t.set([2, 0, 1], 3);
        assert_eq!(t.get([0, 1, 2]), 3);
        assert_eq!(t.get([1, 0, 2]), -3);
        let h = FgAbelianGroup::new([0, 0, 0]);
        let d = DualGroup::new(&h, 0);
        assert_eq!(t.evaluate([&d.generator(1), &d.generator(0), &d.generator(2)]), -3);
        let y = d.add(&d.generator(0), &d.generator(1));
        assert_eq!(t.evaluate([&y, &y, &d.generator(2)]), 0);
    }

    #[test]
    fn cup_order_constraints() {
        let h = FgAbelianGroup::new([2, 0, 0]);
        let mut t = CupTable::zero(0);
        t.set([0, 1, 2], 1);
        assert!(t.violations(&h).iter().any(|v| v.constraint == "cup order constraint"));
        let mut t = CupTable::zero(4);
        t.set([0, 1, 2], 2);
        assert!(t.violations(&h).is_empty());
        t.set([0, 1, 2], 1);
        assert!(!t.violations(&h).is_empty());
        let mut t = CupTable::zero(4);
        t.set([1, 1, 2], 1);
        assert!(t.violations(&h).iter().any(|v| v.constraint == "cup skew-symmetry"));
    }

    #[test]
    fn naturality_detects_mismatch() {
        let h = FgAbelianGroup::new([0, 0, 0]);
        let mut r = InvariantRecord::new(
            h.clone(),
            LinkingPairing::trivial(&h),
            vec![QuadFn::new(vec![]); 8],
            &[0, 2],
            vec![0; 8],
        )
        .unwrap();
        r.cup.get_mut(&0).unwrap().set([0, 1, 2], 1);
        assert!(validate_record(&r).iter().any(|v| v.constraint == "cup reduction naturality"));
        r.cup.get_mut(&2).unwrap().set([0, 1, 2], 1);
        assert!(validate_record(&r).is_empty());
    }

    #[test]
    fn default_moduli_examples() {
        assert_eq!(default_moduli(&FgAbelianGroup::trivial()), vec![0, 2]);
        assert_eq!(default_moduli(&FgAbelianGroup::new([4, 6])), vec![0, 2, 3, 4, 6, 12]);
        assert_eq!(default_moduli(&FgAbelianGroup::new([3, 0])), vec![0, 2, 3]);
    }

    #[test]
    fn b_arithmetic() {
        let mut x = BElement::zero(&[0, 2], 2);
        x.cup.get_mut(&0).unwrap().set([0, 1, 2], 5);
        x.rochlin[1] = 8;
        let z = BElement::zero(&[0, 2], 2);
        assert_eq!(x.b_add(&z).unwrap(), x);
        assert!(x.b_subtract(&x).unwrap().is_zero());
        assert!(x.b_add(&BElement::zero(&[0], 2)).is_err());
    }

    proptest! {
        #[test]
        fn b_add_associative(a in proptest::collection::vec(-9i64..9, 6), r in proptest::collection::vec(0u8..16, 6)) {
            let mk = |v: i64, w: u8| {
                let mut x = BElement::zero(&[0, 4], 2);
                x.cup.get_mut(&0).unwrap().set([0, 1, 2], v);
                x.cup.get_mut(&4).unwrap().set([0, 1, 3], v);
                x.rochlin[0] = w;
                x
            };
            let (x, y, z) = (mk(a[0], r[0]), mk(a[1], r[1]), mk(a[2], r[2]));
            prop_assert_eq!(x.b_add(&y).unwrap().b_add(&z).unwrap(), x.b_add(&y.b_add(&z).unwrap()).unwrap());
        }

        #[test]
        fn qmodz_addition_is_exact(a in -50i128..50, b in 1i128..30, c in -50i128..50, d in 1i128..30) {
            let x = QmodZ::new(a, b).unwrap();
            let y = QmodZ::new(c, d).unwrap();
            prop_assert_eq!(x.add(y), QmodZ::new(a * d + c * b, b * d).unwrap());
            prop_assert_eq!(x.add(y).sub(y), x);
        }
    }
}
