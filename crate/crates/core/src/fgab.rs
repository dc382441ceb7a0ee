//! Finitely generated abelian groups given by a basis of cyclic summands.
//!
//! A group is a list of orders `n_i >= 0` (`0` is an infinite cyclic
//! summand). Orders need not form a divisibility chain; any basis is
//! allowed and [`FgAbelianGroup::invariant_factors`] gives the canonical
//! form when one is needed.

use crate::arith::{self, reduce, reduce_wide};
use crate::error::{Error, Result};
use crate::snf::{self, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FgAbelianGroup {
    orders: Arc<[u64]>,
}

impl fmt::Debug for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.orders.iter().map(|&n| if n == 0 { "Z".to_string() } else { format!("Z{n}") }).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl FgAbelianGroup {
    /// Direct sum of cyclic groups of the given orders. Order-1 summands
    /// are dropped.
    pub fn new(orders: impl IntoIterator<Item = u64>) -> Self {
        FgAbelianGroup { orders: orders.into_iter().filter(|&n| n != 1).collect() }
    }

    pub fn trivial() -> Self {
        Self::new([])
    }

    pub fn free(rank: usize) -> Self {
        Self::new(vec![0; rank])
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn is_finite(&self) -> bool {
        self.orders.iter().all(|&n| n > 0)
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    /// Cardinality, or `None` for infinite groups.
    pub fn cardinality(&self) -> Option<u128> {
        self.orders.iter().try_fold(1u128, |acc, &n| if n == 0 { None } else { acc.checked_mul(n as u128) })
    }

    /// Exponent; `0` when the group is infinite.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, &n| arith::lcm(acc, n))
    }

    pub fn torsion_indices(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.orders[i] > 0).collect()
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.orders[i] == 0).collect()
    }

    /// Indices whose summand survives `- (x) Z_2`: even or infinite order.
    pub fn even_indices(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.orders[i].is_multiple_of(2)).collect()
    }

    /// Exponent of the torsion subgroup.
    pub fn torsion_exponent(&self) -> u64 {
        self.orders.iter().filter(|&&n| n > 0).fold(1, |acc, &n| arith::lcm(acc, n))
    }

    /// Invariant factors `d_1 | d_2 | ... ` (then zeros for the free part),
    /// trivial factors removed.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let r = self.rank();
        let mut diag = IntMatrix::zeros(r, r);
        for (i, &n) in self.orders.iter().enumerate() {
            diag[(i, i)] = BigInt::from(n);
        }
        let s = snf::smith_normal_form(&diag);
        s.column_factors()
            .into_iter()
            .map(|d| d.to_u64().expect("invariant factor fits in u64"))
            .filter(|&d| d != 1)
            .collect()
    }

    pub fn is_isomorphic(&self, other: &FgAbelianGroup) -> bool {
        self.invariant_factors() == other.invariant_factors()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { group: self.clone(), coeffs: vec![0; self.rank()] }
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        let mut e = self.zero();
        e.coeffs[i] = 1;
        e.reduce();
        e
    }

    pub fn element(&self, coeffs: &[i64]) -> Result<GroupElement> {
        if coeffs.len() != self.rank() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for a group with {} generators",
                coeffs.len(),
                self.rank()
            )));
        }
        let mut e = GroupElement { group: self.clone(), coeffs: coeffs.to_vec() };
        e.reduce();
        Ok(e)
    }

    /// All elements in lexicographic order of coefficient vectors (first
    /// coordinate most significant). Fails on infinite groups.
    pub fn elements(&self) -> Result<impl Iterator<Item = GroupElement> + '_> {
        if !self.is_finite() {
            return Err(Error::InfiniteGroup(self.to_string()));
        }
        Ok(CoefficientBox::new(self.orders.to_vec()).map(move |coeffs| GroupElement { group: self.clone(), coeffs }))
    }

    /// Elements of the torsion subgroup, lexicographically.
    pub fn torsion_elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        let bounds: Vec<u64> = self.orders.iter().map(|&n| if n == 0 { 1 } else { n }).collect();
        CoefficientBox::new(bounds).map(move |coeffs| GroupElement { group: self.clone(), coeffs })
    }

    pub fn identity(&self) -> Homomorphism {
        Homomorphism {
            source: self.clone(),
            target: self.clone(),
            images: (0..self.rank()).map(|i| self.generator(i)).collect(),
        }
    }
}

/// Odometer over `0 <= c_i < bounds[i]`, last coordinate fastest.
#[derive(Clone, Debug)]
pub struct CoefficientBox {
    bounds: Vec<u64>,
    next: Option<Vec<i64>>,
}

impl CoefficientBox {
    pub fn new(bounds: Vec<u64>) -> Self {
        let next = if bounds.contains(&0) { None } else { Some(vec![0; bounds.len()]) };
        CoefficientBox { bounds, next }
    }
}

impl Iterator for CoefficientBox {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if (succ[i] as u64) < self.bounds[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    group: FgAbelianGroup,
    coeffs: Vec<i64>,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} in {}", self.coeffs, self.group)
    }
}

impl GroupElement {
    fn reduce(&mut self) {
        for (c, &n) in self.coeffs.iter_mut().zip(self.group.orders.iter()) {
            *c = reduce(*c, n);
        }
    }

    pub fn group(&self) -> &FgAbelianGroup {
        &self.group
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_torsion(&self) -> bool {
        self.coeffs.iter().zip(self.group.orders.iter()).all(|(&c, &n)| n > 0 || c == 0)
    }

    /// Order of the element; `0` if it has infinite order.
    pub fn order(&self) -> u64 {
        let mut ord = 1;
        for (&c, &n) in self.coeffs.iter().zip(self.group.orders.iter()) {
            if c == 0 {
                continue;
            }
            if n == 0 {
                return 0;
            }
            ord = arith::lcm(ord, n / arith::gcd(n, c as u64));
        }
        ord
    }

    fn check_same(&self, other: &GroupElement) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch(format!("{} vs {}", self.group, other.group)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (c, &d) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c = c.checked_add(d).ok_or(Error::Overflow("element addition"))?;
        }
        out.reduce();
        Ok(out)
    }

    pub fn try_sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> GroupElement {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = -*c;
        }
        out.reduce();
        out
    }

    pub fn scale(&self, k: i64) -> GroupElement {
        let mut out = self.clone();
        for (c, &n) in out.coeffs.iter_mut().zip(self.group.orders.iter()) {
            *c = reduce_wide(*c as i128 * k as i128, n);
        }
        out
    }
}

impl std::ops::Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        self.try_add(rhs).expect("adding elements of different groups")
    }
}

impl std::ops::Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        self.try_sub(rhs).expect("subtracting elements of different groups")
    }
}

/// Group homomorphism, stored as the images of the source generators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Homomorphism {
    source: FgAbelianGroup,
    target: FgAbelianGroup,
    images: Vec<GroupElement>,
}

impl fmt::Debug for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<&[i64]> = self.images.iter().map(|e| e.coeffs()).collect();
        write!(f, "{} -> {}: {:?}", self.source, self.target, cols)
    }
}

impl Homomorphism {
    /// Checks `n_i * image_i == 0` for every source generator.
    pub fn new(source: FgAbelianGroup, target: FgAbelianGroup, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::ShapeMismatch(format!("{} images for {} generators", images.len(), source.rank())));
        }
        for (i, (img, &n)) in images.iter().zip(source.orders()).enumerate() {
            if img.group != target {
                return Err(Error::GroupMismatch(format!("image {i} lives in {}", img.group)));
            }
            if n > 0 && !img.scale(n as i64).is_zero() {
                return Err(Error::IllDefined(format!("generator {i} of order {n} maps to {:?}", img.coeffs)));
            }
        }
        Ok(Homomorphism { source, target, images })
    }

    /// Builds from image coefficient columns.
    pub fn from_columns(source: FgAbelianGroup, target: FgAbelianGroup, columns: &[Vec<i64>]) -> Result<Self> {
        let images = columns.iter().map(|c| target.element(c)).collect::<Result<Vec<_>>>()?;
        Self::new(source, target, images)
    }

    pub fn source(&self) -> &FgAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbelianGroup {
        &self.target
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.images.iter().enumerate().all(|(i, e)| *e == self.source.generator(i))
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        if x.group != self.source {
            return Err(Error::GroupMismatch(format!("{} is not the source {}", x.group, self.source)));
        }
        let mut acc = vec![0i128; self.target.rank()];
        for (&c, img) in x.coeffs.iter().zip(&self.images) {
            if c == 0 {
                continue;
            }
            for (a, &b) in acc.iter_mut().zip(&img.coeffs) {
                *a += c as i128 * b as i128;
            }
        }
        let coeffs = acc.iter().zip(self.target.orders()).map(|(&a, &n)| reduce_wide(a, n)).collect();
        Ok(GroupElement { group: self.target.clone(), coeffs })
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &Homomorphism) -> Result<Homomorphism> {
        if first.target != self.source {
            return Err(Error::GroupMismatch(format!(
                "cannot compose {} -> {} after {}",
                self.source, self.target, first.target
            )));
        }
        let images = first.images.iter().map(|e| self.apply(e)).collect::<Result<Vec<_>>>()?;
        Ok(Homomorphism { source: first.source.clone(), target: self.target.clone(), images })
    }

    /// `[M | N']`: image columns followed by the target relations.
    fn stacked(&self) -> IntMatrix {
        let (r, rt) = (self.source.rank(), self.target.rank());
        let mut a = IntMatrix::zeros(rt, r + rt);
        for (j, img) in self.images.iter().enumerate() {
            for (i, &c) in img.coeffs.iter().enumerate() {
                a[(i, j)] = BigInt::from(c);
            }
        }
        for (i, &n) in self.target.orders().iter().enumerate() {
            a[(i, r + i)] = BigInt::from(n);
        }
        a
    }

    pub fn is_surjective(&self) -> bool {
        let s = snf::smith_normal_form(&self.stacked());
        let rt = self.target.rank();
        s.rank() == rt && (0..rt).all(|k| s.d[(k, k)].is_one())
    }

    pub fn is_injective(&self) -> bool {
        let r = self.source.rank();
        snf::kernel(&self.stacked()).iter().all(|x| {
            x[..r].iter().zip(self.source.orders()).all(|(c, &n)| {
                if n == 0 {
                    c.is_zero()
                } else {
                    c.is_multiple_of(&BigInt::from(n))
                }
            })
        })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Result<Homomorphism> {
        if !self.is_isomorphism() {
            return Err(Error::NotIsomorphism);
        }
        let a = self.stacked();
        let r = self.source.rank();
        let images = (0..self.target.rank())
            .map(|j| {
                let b: Vec<BigInt> =
                    (0..self.target.rank()).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect();
                let x = snf::solve(&a, &b).ok_or(Error::NotIsomorphism)?;
                let coeffs = x[..r]
                    .iter()
                    .zip(self.source.orders())
                    .map(|(c, &n)| {
                        let c = if n == 0 { c.clone() } else { c.mod_floor(&BigInt::from(n)) };
                        c.to_i64().ok_or(Error::Overflow("inverse homomorphism"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.source.element(&coeffs)
            })
            .collect::<Result<Vec<_>>>()?;
        Homomorphism::new(self.target.clone(), self.source.clone(), images)
    }
}

/// `Hom(H, Z_n)` with the dual basis `e_i*` normalised by
/// `<e_i*, e_j> = δ_ij · n / gcd(n, n_i)`.
///
/// Dual generators may be trivial (order 1); they keep their slot so that
/// `e_i*` always sits at index `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualGroup {
    base: FgAbelianGroup,
    modulus: u64,
    orders: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualElement {
    coeffs: Vec<i64>,
}

impl DualElement {
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

pub fn dual_group(h: &FgAbelianGroup, n: u64) -> DualGroup {
    DualGroup::new(h, n)
}

impl DualGroup {
    pub fn new(h: &FgAbelianGroup, n: u64) -> Self {
        let orders = h.orders().iter().map(|&ni| arith::dual_order(n, ni)).collect();
        DualGroup { base: h.clone(), modulus: n, orders }
    }

    pub fn base(&self) -> &FgAbelianGroup {
        &self.base
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.iter().all(|&d| d == 1)
    }

    /// The dual group as an abstract group (trivial slots dropped).
    pub fn as_group(&self) -> FgAbelianGroup {
        FgAbelianGroup::new(self.orders.iter().copied())
    }

    pub fn element(&self, coeffs: &[i64]) -> Result<DualElement> {
        if coeffs.len() != self.orders.len() {
            return Err(Error::ShapeMismatch("dual coefficient vector has wrong length".into()));
        }
        Ok(DualElement { coeffs: coeffs.iter().zip(&self.orders).map(|(&c, &d)| reduce(c, d)).collect() })
    }

    pub fn zero(&self) -> DualElement {
        DualElement { coeffs: vec![0; self.orders.len()] }
    }

    pub fn generator(&self, i: usize) -> DualElement {
        let mut e = self.zero();
        e.coeffs[i] = reduce(1, self.orders[i]);
        e
    }

    pub fn add(&self, a: &DualElement, b: &DualElement) -> DualElement {
        DualElement {
            coeffs: a.coeffs.iter().zip(&b.coeffs).zip(&self.orders).map(|((&x, &y), &d)| reduce(x + y, d)).collect(),
        }
    }

    /// `<e_i*, e_i>` as an integer.
    pub fn unit(&self, i: usize) -> u64 {
        arith::unit_pairing(self.modulus, self.base.orders()[i])
    }

    /// Evaluation `<y, x>` in `Z_n` (in `Z` when `n = 0`).
    pub fn pair(&self, y: &DualElement, x: &GroupElement) -> Result<i64> {
        if x.group != self.base {
            return Err(Error::GroupMismatch(format!("{} is not the base {}", x.group, self.base)));
        }
        if y.coeffs.len() != self.orders.len() {
            return Err(Error::ShapeMismatch("dual element of another group".into()));
        }
        let mut acc: i128 = 0;
        for i in 0..self.orders.len() {
            acc += y.coeffs[i] as i128 * x.coeffs[i] as i128 * self.unit(i) as i128;
        }
        Ok(reduce_wide(acc, self.modulus))
    }

    /// The dual element with prescribed values `<y, e_i>`, if it exists.
    pub fn from_values(&self, values: &[i64]) -> Result<DualElement> {
        let mut coeffs = Vec::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            let v = reduce(v, self.modulus);
            let u = self.unit(i) as i64;
            if u == 0 {
                if v != 0 {
                    return Err(Error::IllDefined(format!("value {v} on a generator with no dual")));
                }
                coeffs.push(0);
            } else if v % u != 0 {
                return Err(Error::IllDefined(format!("value {v} is not a multiple of {u}")));
            } else {
                coeffs.push(reduce(v / u, self.orders[i]));
            }
        }
        Ok(DualElement { coeffs })
    }

    /// `ψ^(n)`: pulls a dual element of `self` (over `ψ.target`) back to
    /// the dual of `ψ.source`, i.e. `y ↦ y ∘ ψ`.
    pub fn pullback(&self, psi: &Homomorphism, y: &DualElement) -> Result<DualElement> {
        if psi.target() != &self.base {
            return Err(Error::GroupMismatch("homomorphism target is not the dual base".into()));
        }
        let src = DualGroup::new(psi.source(), self.modulus);
        let values = psi.images().iter().map(|img| self.pair(y, img)).collect::<Result<Vec<_>>>()?;
        src.from_values(&values)
    }

    /// Post-composition with `Z_m -> Z_n` for `n | m` (including `m = 0`).
    pub fn reduce_to(&self, n: u64, y: &DualElement) -> Result<(DualGroup, DualElement)> {
        let m = self.modulus;
        let divides = if n == 0 { m == 0 } else { m.is_multiple_of(n) };
        if !divides {
            return Err(Error::Invalid(format!("{n} does not divide {m}")));
        }
        let target = DualGroup::new(&self.base, n);
        let values: Vec<i64> = (0..self.orders.len()).map(|i| y.coeffs[i] * self.unit(i) as i64).collect();
        let z = target.from_values(&values)?;
        Ok((target, z))
    }
}

/// `H ⊗ Z_n` with the reduction map `H -> H ⊗ Z_n`.
pub fn tensor_mod(h: &FgAbelianGroup, n: u64) -> (FgAbelianGroup, Homomorphism) {
    let slot_orders: Vec<u64> = h.orders().iter().map(|&ni| arith::gcd(n, ni)).collect();
    let reduced = FgAbelianGroup::new(slot_orders.iter().copied());
    let mut next = 0;
    let images = slot_orders
        .iter()
        .map(|&o| {
            if o == 1 {
                reduced.zero()
            } else {
                next += 1;
                reduced.generator(next - 1)
            }
        })
        .collect();
    let map = Homomorphism { source: h.clone(), target: reduced.clone(), images };
    (reduced, map)
}

/// Cokernel of an integer relation matrix: the group, and for each free
/// generator its coordinate row.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub group: FgAbelianGroup,
    /// `projection[j]` = coordinates of free generator `j`.
    pub projection: Vec<Vec<i64>>,
    /// `lift[k]` = a free-group vector mapping to the `k`-th generator of
    /// `group`.
    pub lift: Vec<Vec<i64>>,
}

impl Presentation {
    pub fn new(generators: usize, relations: &[Vec<i64>]) -> Result<Self> {
        let a = IntMatrix::from_rows(relations, generators);
        let s = snf::smith_normal_form(&a);
        let factors = s.column_factors();
        let kept: Vec<usize> = (0..generators).filter(|&k| !factors[k].is_one()).collect();
        let orders: Vec<u64> = kept
            .iter()
            .map(|&k| factors[k].to_u64().ok_or(Error::Overflow("invariant factor")))
            .collect::<Result<_>>()?;
        let group = FgAbelianGroup::new(orders.iter().copied());
        let projection = (0..generators)
            .map(|j| {
                kept.iter()
                    .zip(&orders)
                    .map(|(&k, &d)| {
                        let x = &s.v[(j, k)];
                        let x = if d == 0 { x.clone() } else { x.mod_floor(&BigInt::from(d)) };
                        x.to_i64().ok_or(Error::Overflow("presentation projection"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let lift = kept
            .iter()
            .map(|&k| s.v_inv.row(k).iter().map(|x| x.to_i64().ok_or(Error::Overflow("presentation lift"))).collect())
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation { group, projection, lift })
    }

    /// Class of a free-group vector.
    pub fn project(&self, x: &[i64]) -> GroupElement {
        let mut acc = vec![0i128; self.group.rank()];
        for (&c, row) in x.iter().zip(&self.projection) {
            if c == 0 {
                continue;
            }
            for (a, &p) in acc.iter_mut().zip(row) {
                *a += c as i128 * p as i128;
            }
        }
        let coeffs: Vec<i64> = acc.iter().zip(self.group.orders()).map(|(&a, &n)| reduce_wide(a, n)).collect();
        GroupElement { group: self.group.clone(), coeffs }
    }

    /// A free-group vector representing `x`.
    pub fn lift(&self, x: &GroupElement) -> Vec<i64> {
        let g = self.projection.len();
        let mut acc = vec![0i128; g];
        for (&c, row) in x.coeffs().iter().zip(&self.lift) {
            for (a, &p) in acc.iter_mut().zip(row) {
                *a += c as i128 * p as i128;
            }
        }
        acc.into_iter().map(|a| i64::try_from(a).expect("lift overflow")).collect()
    }
}

/// Cokernel of `relations` (rows, one column per generator) with the
/// projection from the free group on the generators.
pub fn group_from_presentation(generators: usize, relations: &[Vec<i64>]) -> Result<(FgAbelianGroup, Homomorphism)> {
    let p = Presentation::new(generators, relations)?;
    let free = FgAbelianGroup::free(generators);
    let images = p.projection.iter().map(|row| p.group.element(row)).collect::<Result<Vec<_>>>()?;
    let proj = Homomorphism::new(free, p.group.clone(), images)?;
    Ok((p.group, proj))
}

/// Lazily enumerates the isomorphisms `H -> H'` of finite groups, in
/// lexicographic order of `(ψ(e_1), ψ(e_2), ...)`.
pub fn enumerate_isomorphisms(h: &FgAbelianGroup, h2: &FgAbelianGroup) -> Result<Isomorphisms> {
    for g in [h, h2] {
        if !g.is_finite() {
            return Err(Error::InfiniteGroup(g.to_string()));
        }
    }
    let feasible = h.is_isomorphic(h2);
    let candidates = if feasible {
        h.orders()
            .iter()
            .map(|&n| h2.elements().expect("finite").filter(|y| y.order() == n).map(|y| y.coeffs).collect::<Vec<_>>())
            .collect()
    } else {
        Vec::new()
    };
    Ok(Isomorphisms {
        source: h.clone(),
        target: h2.clone(),
        candidates,
        chosen: Vec::new(),
        spans: vec![HashSet::from([vec![0; h2.rank()]])],
        cursor: 0,
        exhausted: !feasible,
    })
}

/// Depth-first search over generator images; a partial choice is kept
/// only while it is injective on the span of the chosen generators.
pub struct Isomorphisms {
    source: FgAbelianGroup,
    target: FgAbelianGroup,
    candidates: Vec<Vec<Vec<i64>>>,
    chosen: Vec<usize>,
    spans: Vec<HashSet<Vec<i64>>>,
    cursor: usize,
    exhausted: bool,
}

impl Isomorphisms {
    fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        a.iter().zip(b).zip(self.target.orders()).map(|((&x, &y), &n)| reduce(x + y, n)).collect()
    }

    fn extend_span(&self, level: usize, y: &[i64]) -> Option<HashSet<Vec<i64>>> {
        let n = self.source.orders()[level];
        let span = &self.spans[level];
        let mut multiple = y.to_vec();
        let mut out: HashSet<Vec<i64>> = span.clone();
        for _ in 1..n {
            if span.contains(&multiple) {
                return None;
            }
            for s in span {
                out.insert(self.add(s, &multiple));
            }
            multiple = self.add(&multiple, y);
        }
        Some(out)
    }
}

impl Iterator for Isomorphisms {
    type Item = Homomorphism;

    fn next(&mut self) -> Option<Homomorphism> {
        if self.exhausted {
            return None;
        }
        let r = self.source.rank();
        loop {
            let level = self.chosen.len();
            if level == r {
                let images = self
                    .chosen
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| GroupElement { group: self.target.clone(), coeffs: self.candidates[i][c].clone() })
                    .collect();
                let hom = Homomorphism { source: self.source.clone(), target: self.target.clone(), images };
                match self.chosen.pop() {
                    Some(last) => {
                        self.spans.pop();
                        self.cursor = last + 1;
                    }
                    None => self.exhausted = true,
                }
                return Some(hom);
            }
            let mut found = None;
            for idx in self.cursor..self.candidates[level].len() {
                if let Some(span) = self.extend_span(level, &self.candidates[level][idx]) {
                    found = Some((idx, span));
                    break;
                }
            }
            match found {
                Some((idx, span)) => {
                    self.chosen.push(idx);
                    self.spans.push(span);
                    self.cursor = 0;
                }
                None => match self.chosen.pop() {
                    Some(last) => {
                        self.spans.pop();
                        self.cursor = last + 1;
                    }
                    None => {
                        self.exhausted = true;
                        return None;
                    }
                },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(orders: &[u64]) -> FgAbelianGroup {
        FgAbelianGroup::new(orders.iter().copied())
    }

    #[test]
    fn presentation_examples() {
        let (grp, proj) = group_from_presentation(2, &[vec![2, 0]]).unwrap();
        assert_eq!(grp.invariant_factors(), vec![2, 0]);
        assert_eq!(proj.source().rank(), 2);
        let (grp, _) = group_from_presentation(1, &[vec![1]]).unwrap();
        assert!(grp.is_trivial());
        let (grp, _) = group_from_presentation(3, &[]).unwrap();
        assert_eq!(grp.orders(), &[0, 0, 0]);
    }

    #[test]
    fn presentation_projection_kills_relations() {
        let rels = vec![vec![2, 4, 6], vec![0, 3, 3]];
        let p = Presentation::new(3, &rels).unwrap();
        for r in &rels {
            assert!(p.project(r).is_zero());
        }
        for k in 0..p.group.rank() {
            let x = p.group.generator(k);
            assert_eq!(p.project(&p.lift(&x)), x);
        }
    }

    #[test]
    fn dual_examples() {
        let h = g(&[2, 0]);
        let d = dual_group(&h, 4);
        assert_eq!(d.orders(), &[2, 4]);
        assert_eq!(d.pair(&d.generator(0), &h.generator(0)).unwrap(), 2);
        assert_eq!(d.pair(&d.generator(1), &h.generator(1)).unwrap(), 1);
        assert_eq!(d.pair(&d.zero(), &h.generator(1)).unwrap(), 0);
        assert!(dual_group(&g(&[3]), 2).is_trivial());
        assert!(dual_group(&g(&[4, 0, 6]), 1).is_trivial());
    }

    #[test]
    fn integral_dual_ignores_torsion() {
        let h = g(&[3, 0]);
        let d = dual_group(&h, 0);
        assert_eq!(d.orders(), &[1, 0]);
        assert_eq!(d.pair(&d.generator(1), &h.generator(1)).unwrap(), 1);
        assert_eq!(d.pair(&d.generator(0), &h.generator(0)).unwrap(), 0);
    }

    #[test]
    fn pair_rejects_foreign_element() {
        let d = dual_group(&g(&[2]), 2);
        assert!(d.pair(&d.generator(0), &g(&[4]).generator(0)).is_err());
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(tensor_mod(&g(&[0]), 2).0.orders(), &[2]);
        assert!(tensor_mod(&g(&[3]), 2).0.is_trivial());
        let (t, red) = tensor_mod(&g(&[4, 0]), 2);
        assert_eq!(t.orders(), &[2, 2]);
        assert_eq!(red.apply(&g(&[4, 0]).element(&[3, 5]).unwrap()).unwrap().coeffs(), &[1, 1]);
        let (t, red) = tensor_mod(&g(&[3, 2]), 2);
        assert_eq!(t.orders(), &[2]);
        assert_eq!(red.apply(&g(&[3, 2]).element(&[1, 1]).unwrap()).unwrap().coeffs(), &[1]);
    }

    #[test]
    fn isomorphism_counts() {
        assert_eq!(enumerate_isomorphisms(&g(&[2, 2]), &g(&[4])).unwrap().count(), 0);
        assert_eq!(enumerate_isomorphisms(&g(&[2, 2]), &g(&[2, 2])).unwrap().count(), 6);
        assert_eq!(enumerate_isomorphisms(&g(&[5]), &g(&[5])).unwrap().count(), 4);
        assert_eq!(enumerate_isomorphisms(&g(&[]), &g(&[])).unwrap().count(), 1);
        assert_eq!(enumerate_isomorphisms(&g(&[2, 3]), &g(&[6])).unwrap().count(), 2);
        assert!(matches!(enumerate_isomorphisms(&g(&[0]), &g(&[0])), Err(Error::InfiniteGroup(_))));
    }

    #[test]
    fn isomorphisms_are_lexicographic() {
        let maps: Vec<_> = enumerate_isomorphisms(&g(&[2, 2]), &g(&[2, 2])).unwrap().collect();
        let keys: Vec<Vec<i64>> =
            maps.iter().map(|m| m.images().iter().flat_map(|e| e.coeffs().to_vec()).collect()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn inverse_of_automorphism() {
        let h = g(&[4, 0]);
        let psi = Homomorphism::from_columns(h.clone(), h.clone(), &[vec![3, 0], vec![1, 1]]).unwrap();
        assert!(psi.is_isomorphism());
        let inv = psi.inverse().unwrap();
        assert!(inv.compose(&psi).unwrap().is_identity());
        assert!(psi.compose(&inv).unwrap().is_identity());
    }

    #[test]
    fn non_isomorphisms_detected() {
        let h = g(&[0]);
        let double = Homomorphism::from_columns(h.clone(), h.clone(), &[vec![2]]).unwrap();
        assert!(double.is_injective());
        assert!(!double.is_surjective());
        let z4 = g(&[4]);
        let z2 = g(&[2]);
        let red = Homomorphism::from_columns(z4, z2, &[vec![1]]).unwrap();
        assert!(red.is_surjective());
        assert!(!red.is_injective());
    }

    #[test]
    fn ill_defined_rejected() {
        let err = Homomorphism::from_columns(g(&[2]), g(&[0]), &[vec![1]]);
        assert!(matches!(err, Err(Error::IllDefined(_))));
    }

    #[test]
    fn element_orders() {
        let h = g(&[4, 6, 0]);
        assert_eq!(h.element(&[2, 0, 0]).unwrap().order(), 2);
        assert_eq!(h.element(&[1, 4, 0]).unwrap().order(), 12);
        assert_eq!(h.element(&[0, 0, 1]).unwrap().order(), 0);
        assert_eq!(h.zero().order(), 1);
    }

    #[test]
    fn dual_reduction_between_moduli() {
        let h = g(&[4, 0]);
        let d8 = dual_group(&h, 8);
        let (d2, z) = d8.reduce_to(2, &d8.generator(0)).unwrap();
        // <e*, e_1> = 2 in Z_8 reduces to 0 in Z_2
        assert!(z.is_zero());
        let (_, z) = d8.reduce_to(2, &d8.generator(1)).unwrap();
        assert_eq!(d2.pair(&z, &h.generator(1)).unwrap(), 1);
        let d0 = dual_group(&h, 0);
        let (_, z) = d0.reduce_to(4, &d0.generator(1)).unwrap();
        assert_eq!(z.coeffs(), &[0, 1]);
    }
}
