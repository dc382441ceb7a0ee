//! Spin spaces as `Z_2`-affine spaces over `H^(2)`, affine and cubic
//! functions on them, the third derivative `d³`, and the pull-back
//! `P = H ×_{H_(2)} A(S, Z_2)` with its graph-group isomorphisms.
//!
//! Coordinates: the generators of `H` with even or zero order are the
//! "even indices" `i_0 < i_1 < ...`. A spin structure is `σ₀ + y` with
//! `y ∈ H^(2) ≅ Z_2^d`, written as a bitmask whose bit `t` is `<y, e_{i_t}>`.
//! Bitstrings list bit 0 first.

use crate::error::{Error, Result};
use crate::fgab::{tensor_mod, DualElement, DualGroup, FgAbelianGroup, GroupElement, Homomorphism};
use crate::trivector::{exterior_cube_hom, wedge, Trivector, TrivectorSpace};
use crate::ygraph::{y_group, SpecialPair, YGroupStructure, YTerm};
use std::collections::BTreeSet;

/// Spin structures are indexed by `u64` masks, so `d` is capped.
pub const MAX_SPIN_DIMENSION: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinSpace {
    homology: FgAbelianGroup,
    even: Vec<usize>,
    reduced: FgAbelianGroup,
    reduction: Homomorphism,
}

impl SpinSpace {
    pub fn new(h: &FgAbelianGroup) -> Result<Self> {
        let even = h.even_indices();
        if even.len() > MAX_SPIN_DIMENSION {
            return Err(Error::Invalid(format!("spin space of dimension {} is too large", even.len())));
        }
        let (reduced, reduction) = tensor_mod(h, 2);
        debug_assert_eq!(reduced.rank(), even.len());
        Ok(SpinSpace { homology: h.clone(), even, reduced, reduction })
    }

    pub fn homology(&self) -> &FgAbelianGroup {
        &self.homology
    }

    pub fn dimension(&self) -> usize {
        self.even.len()
    }

    /// Number of spin structures, `2^d`.
    pub fn count(&self) -> u64 {
        1 << self.even.len()
    }

    pub fn spin_structures(&self) -> std::ops::Range<u64> {
        0..self.count()
    }

    /// Generators of `H` with even or zero order, ascending.
    pub fn even_indices(&self) -> &[usize] {
        &self.even
    }

    /// `H_(2) = H ⊗ Z_2`, whose generator `t` is the image of `e_{i_t}`.
    pub fn reduced_homology(&self) -> &FgAbelianGroup {
        &self.reduced
    }

    pub fn reduction(&self) -> &Homomorphism {
        &self.reduction
    }

    pub fn bitstring(&self, mask: u64) -> String {
        (0..self.dimension()).map(|t| if mask >> t & 1 == 1 { '1' } else { '0' }).collect()
    }

    pub fn parse_bitstring(&self, s: &str) -> Result<u64> {
        if s.len() != self.dimension() {
            return Err(Error::Invalid(format!("spin index {s:?} should have {} bits", self.dimension())));
        }
        s.chars().enumerate().try_fold(0u64, |acc, (t, ch)| match ch {
            '0' => Ok(acc),
            '1' => Ok(acc | 1 << t),
            _ => Err(Error::Invalid(format!("spin index {s:?} is not a bitstring"))),
        })
    }

    /// The offset `y ∈ H^(2)` of a spin structure, as a dual element.
    pub fn offset_dual(&self, mask: u64) -> DualElement {
        let dual = DualGroup::new(&self.homology, 2);
        let mut coeffs = vec![0; self.homology.rank()];
        for (t, &i) in self.even.iter().enumerate() {
            coeffs[i] = (mask >> t & 1) as i64;
        }
        dual.element(&coeffs).expect("length matches")
    }

    /// Inverse of [`Self::offset_dual`].
    pub fn mask_of_dual(&self, y: &DualElement) -> u64 {
        self.even.iter().enumerate().fold(0, |acc, (t, &i)| acc | ((y.coeffs()[i] as u64 & 1) << t))
    }

    /// Image of `x ⊗ 1` as a mask over the generators of `H_(2)`.
    pub fn reduce_mask(&self, x: &GroupElement) -> Result<u64> {
        let r = self.reduction.apply(x)?;
        Ok(r.coeffs().iter().enumerate().fold(0, |acc, (t, &c)| acc | ((c as u64 & 1) << t)))
    }

    pub fn reduced_element(&self, mask: u64) -> GroupElement {
        let coeffs: Vec<i64> = (0..self.dimension()).map(|t| (mask >> t & 1) as i64).collect();
        self.reduced.element(&coeffs).expect("length matches")
    }

    fn check_mask(&self, mask: u64) -> Result<()> {
        if mask >> self.dimension() != 0 {
            return Err(Error::ShapeMismatch(format!("mask {mask:#b} exceeds dimension {}", self.dimension())));
        }
        Ok(())
    }

    pub fn constant(&self, c: u8) -> AffineFn {
        AffineFn { dim: self.dimension(), constant: c & 1, slope: 0 }
    }

    /// `ē_t(σ₀ + y) = <y, e_{i_t}>`.
    pub fn coordinate(&self, t: usize) -> AffineFn {
        AffineFn { dim: self.dimension(), constant: 0, slope: 1 << t }
    }

    /// `ē_i` for a generator of `H`: zero when `n_i` is odd.
    pub fn coordinate_of_generator(&self, i: usize) -> AffineFn {
        match self.even.iter().position(|&e| e == i) {
            Some(t) => self.coordinate(t),
            None => self.constant(0),
        }
    }

    pub fn affine(&self, constant: u8, slope: u64) -> Result<AffineFn> {
        self.check_mask(slope)?;
        Ok(AffineFn { dim: self.dimension(), constant: constant & 1, slope })
    }

    pub fn cubic_zero(&self) -> CubicFn {
        CubicFn { dim: self.dimension(), monomials: BTreeSet::new() }
    }

    /// Cubic monomial `Π_{t in mask} ē_t` (`mask = 0` is `1̄`).
    pub fn monomial(&self, mask: u64) -> Result<CubicFn> {
        self.check_mask(mask)?;
        if mask.count_ones() > 3 {
            return Err(Error::Invalid("monomial of degree above 3".into()));
        }
        Ok(CubicFn { dim: self.dimension(), monomials: BTreeSet::from([mask]) })
    }

    /// Basis of `C(S, Z_2)`: `1̄`, `ē_t`, `ē_tē_u`, `ē_tē_uē_v`, by degree
    /// then lexicographically.
    pub fn cubic_basis(&self) -> Vec<u64> {
        let d = self.dimension();
        let mut out = vec![0u64];
        out.extend((0..d).map(|t| 1u64 << t));
        for t in 0..d {
            for u in t + 1..d {
                out.push(1 << t | 1 << u);
            }
        }
        for t in 0..d {
            for u in t + 1..d {
                for v in u + 1..d {
                    out.push(1 << t | 1 << u | 1 << v);
                }
            }
        }
        out
    }

    /// Truth table to cubic function; fails if the degree exceeds 3.
    pub fn cubic_from_values(&self, values: &[u8]) -> Result<CubicFn> {
        if values.len() as u64 != self.count() {
            return Err(Error::ShapeMismatch("truth table has the wrong length".into()));
        }
        // Möbius transform over the subset lattice.
        let mut a: Vec<u8> = values.iter().map(|v| v & 1).collect();
        for t in 0..self.dimension() {
            for m in 0..a.len() {
                if m >> t & 1 == 1 {
                    a[m] ^= a[m ^ (1 << t)];
                }
            }
        }
        let monomials: BTreeSet<u64> = (0..a.len() as u64).filter(|&m| a[m as usize] == 1).collect();
        if monomials.iter().any(|m| m.count_ones() > 3) {
            return Err(Error::Invalid("function is not cubic".into()));
        }
        Ok(CubicFn { dim: self.dimension(), monomials })
    }

    /// `A(S, Z_2)` as a group: generator 0 is `1̄`, generator `1 + t` is `ē_t`.
    pub fn affine_group(&self) -> FgAbelianGroup {
        FgAbelianGroup::new(vec![2; self.dimension() + 1])
    }

    pub fn affine_to_element(&self, f: &AffineFn) -> GroupElement {
        let mut coeffs = vec![f.constant as i64];
        coeffs.extend((0..self.dimension()).map(|t| (f.slope >> t & 1) as i64));
        self.affine_group().element(&coeffs).expect("length matches")
    }

    pub fn affine_from_element(&self, e: &GroupElement) -> AffineFn {
        let c = e.coeffs();
        let slope = (0..self.dimension()).fold(0u64, |acc, t| acc | ((c[1 + t] as u64 & 1) << t));
        AffineFn { dim: self.dimension(), constant: (c[0] & 1) as u8, slope }
    }

    /// `C(S, Z_2)` as a group, generators in [`Self::cubic_basis`] order.
    pub fn cubic_group(&self) -> FgAbelianGroup {
        FgAbelianGroup::new(vec![2; self.cubic_basis().len()])
    }

    pub fn cubic_to_element(&self, f: &CubicFn) -> GroupElement {
        let coeffs: Vec<i64> = self.cubic_basis().iter().map(|m| f.monomials.contains(m) as i64).collect();
        self.cubic_group().element(&coeffs).expect("length matches")
    }
}

/// `ψ^(2): H'^(2) -> H^(2)` for `ψ: H -> H'`, as a linear map on spin
/// offset masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OffsetMap {
    images: Vec<u64>,
}

impl OffsetMap {
    pub fn new(psi: &Homomorphism, source: &SpinSpace, target: &SpinSpace) -> Result<Self> {
        if psi.source() != source.homology() || psi.target() != target.homology() {
            return Err(Error::GroupMismatch("homomorphism does not match the spin spaces".into()));
        }
        let dual = DualGroup::new(target.homology(), 2);
        let images = (0..target.dimension())
            .map(|t| Ok(source.mask_of_dual(&dual.pullback(psi, &target.offset_dual(1 << t))?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(OffsetMap { images })
    }

    pub fn apply(&self, mask: u64) -> u64 {
        self.images.iter().enumerate().filter(|(t, _)| mask >> t & 1 == 1).fold(0, |acc, (_, &m)| acc ^ m)
    }
}

/// Affine function `σ₀ + y ↦ c + <y, slope>`; `slope` is a mask over the
/// generators of `H_(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AffineFn {
    dim: usize,
    constant: u8,
    slope: u64,
}

impl AffineFn {
    pub fn constant(&self) -> u8 {
        self.constant
    }

    pub fn slope(&self) -> u64 {
        self.slope
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, spin: u64) -> u8 {
        (self.constant as u32 + (spin & self.slope).count_ones()) as u8 & 1
    }

    pub fn try_add(&self, other: &AffineFn) -> Result<AffineFn> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch("affine functions on different spin spaces".into()));
        }
        Ok(AffineFn { dim: self.dim, constant: self.constant ^ other.constant, slope: self.slope ^ other.slope })
    }

    /// As a cubic function.
    pub fn to_cubic(&self) -> CubicFn {
        let mut monomials = BTreeSet::new();
        if self.constant == 1 {
            monomials.insert(0);
        }
        for t in 0..self.dim {
            if self.slope >> t & 1 == 1 {
                monomials.insert(1u64 << t);
            }
        }
        CubicFn { dim: self.dim, monomials }
    }
}

/// `κ(f) ∈ H_(2)`, defined by `f(σ + y) = f(σ) + <y, κ(f)>`.
pub fn kappa(space: &SpinSpace, f: &AffineFn) -> GroupElement {
    space.reduced_element(f.slope)
}

/// Cubic function in algebraic normal form over the coordinates `ē_t`:
/// a set of monomials, each a mask of at most three coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CubicFn {
    dim: usize,
    monomials: BTreeSet<u64>,
}

impl CubicFn {
    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn monomials(&self) -> impl Iterator<Item = u64> + '_ {
        self.monomials.iter().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.monomials.iter().map(|m| m.count_ones()).max().unwrap_or(0)
    }

    pub fn eval(&self, spin: u64) -> u8 {
        (self.monomials.iter().filter(|&&m| m & spin == m).count() & 1) as u8
    }

    pub fn try_add(&self, other: &CubicFn) -> Result<CubicFn> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch("cubic functions on different spin spaces".into()));
        }
        Ok(CubicFn {
            dim: self.dim,
            monomials: self.monomials.symmetric_difference(&other.monomials).copied().collect(),
        })
    }

    fn toggle(&mut self, m: u64) {
        if !self.monomials.remove(&m) {
            self.monomials.insert(m);
        }
    }
}

/// Pointwise product `f₁f₂f₃` (using `x² = x` over `Z_2`).
pub fn cubic_product(f1: &AffineFn, f2: &AffineFn, f3: &AffineFn) -> Result<CubicFn> {
    if f1.dim != f2.dim || f2.dim != f3.dim {
        return Err(Error::ShapeMismatch("affine functions on different spin spaces".into()));
    }
    let terms = |f: &AffineFn| -> Vec<u64> {
        let mut v: Vec<u64> = (0..f.dim).filter(|t| f.slope >> t & 1 == 1).map(|t| 1u64 << t).collect();
        if f.constant == 1 {
            v.push(0);
        }
        v
    };
    let mut out = CubicFn { dim: f1.dim, monomials: BTreeSet::new() };
    for a in terms(f1) {
        for b in terms(f2) {
            for c in terms(f3) {
                out.toggle(a | b | c);
            }
        }
    }
    Ok(out)
}

/// `Σ_{ε ∈ {0,1}³} f(σ + ε₁y₁ + ε₂y₂ + ε₃y₃)`.
pub fn d3_at(f: &CubicFn, sigma: u64, y: [u64; 3]) -> u8 {
    let mut acc = 0;
    for e in 0..8u64 {
        let mut s = sigma;
        for (b, &yb) in y.iter().enumerate() {
            if e >> b & 1 == 1 {
                s ^= yb;
            }
        }
        acc ^= f.eval(s);
    }
    acc
}

/// `d³f` as an element of `Λ³H_(2)`: under the perfect pairing at `n = 2`
/// the coefficient of `e_a∧e_b∧e_c` is `d³f(e_a*, e_b*, e_c*)`.
pub fn d3(space: &SpinSpace, f: &CubicFn) -> Trivector {
    let reduced = space.reduced_homology();
    let d = space.dimension();
    let mut out = Trivector::zero(reduced);
    for a in 0..d {
        for b in a + 1..d {
            for c in b + 1..d {
                if d3_at(f, 0, [1 << a, 1 << b, 1 << c]) == 1 {
                    out = out.try_add(&Trivector::basis(reduced, [a, b, c])).expect("same base");
                }
            }
        }
    }
    out
}

/// `𝒴(A(S, Z_2), 1̄)`.
pub fn affine_y_structure(space: &SpinSpace) -> Result<YGroupStructure> {
    let a = space.affine_group();
    y_group(&SpecialPair::new(a.generator(0))?)
}

/// `γ(Y[f₁, f₂, f₃]) = f₁f₂f₃`.
pub fn gamma(space: &SpinSpace, ys: &YGroupStructure, x: &GroupElement) -> Result<CubicFn> {
    let mut out = space.cubic_zero();
    for term in ys.lift(x) {
        let [f1, f2, f3] = term.colors.clone().map(|c| space.affine_from_element(&c));
        out = out.try_add(&cubic_product(&f1, &f2, &f3)?)?;
    }
    Ok(out)
}

/// Section of `γ`: `1̄ ↦ Y[1̄,1̄,1̄]`, `ē_t ↦ Y[ē_t,1̄,1̄]`,
/// `ē_tē_u ↦ Y[ē_t,ē_u,1̄]`, `ē_tē_uē_v ↦ Y[ē_t,ē_u,ē_v]`.
pub fn epsilon_cubic(space: &SpinSpace, ys: &YGroupStructure, c: &CubicFn) -> Result<GroupElement> {
    let a = space.affine_group();
    let terms = c
        .monomials()
        .map(|m| {
            let mut colors: Vec<GroupElement> =
                (0..space.dimension()).filter(|t| m >> t & 1 == 1).map(|t| a.generator(1 + t)).collect();
            colors.resize(3, a.generator(0));
            YTerm::new(colors[0].clone(), colors[1].clone(), colors[2].clone())
        })
        .collect::<Vec<_>>();
    ys.normal_form(&terms)
}

/// An element `(x, f)` of the pull-back `P`: `x ⊗ 1 = κ(f)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PullbackElement {
    pub h: GroupElement,
    pub f: AffineFn,
}

/// The pull-back `P` with basis `(0, 1̄)` of order 2 and `(e_i, ē_i)` of
/// order `n_i`; as a group, generator 0 is `(0, 1̄)` and `1 + i` is
/// `(e_i, ē_i)`. The special element is `(0, 1̄)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackP {
    space: SpinSpace,
    group: FgAbelianGroup,
}

impl PullbackP {
    pub fn new(space: &SpinSpace) -> Self {
        let mut orders = vec![2];
        orders.extend_from_slice(space.homology().orders());
        PullbackP { space: space.clone(), group: FgAbelianGroup::new(orders) }
    }

    pub fn space(&self) -> &SpinSpace {
        &self.space
    }

    pub fn group(&self) -> &FgAbelianGroup {
        &self.group
    }

    pub fn special(&self) -> PullbackElement {
        PullbackElement { h: self.space.homology().zero(), f: self.space.constant(1) }
    }

    pub fn basis_element(&self, i: usize) -> PullbackElement {
        PullbackElement { h: self.space.homology().generator(i), f: self.space.coordinate_of_generator(i) }
    }

    pub fn zero_element(&self) -> PullbackElement {
        PullbackElement { h: self.space.homology().zero(), f: self.space.constant(0) }
    }

    /// Validates the pull-back constraint.
    pub fn element(&self, h: GroupElement, f: AffineFn) -> Result<PullbackElement> {
        if h.group() != self.space.homology() {
            return Err(Error::GroupMismatch(format!("{} is not the homology {}", h.group(), self.space.homology())));
        }
        if f.dim != self.space.dimension() {
            return Err(Error::ShapeMismatch("affine function on another spin space".into()));
        }
        if self.space.reduce_mask(&h)? != f.slope {
            return Err(Error::ConstraintViolation(format!(
                "x ⊗ 1 = {:?} but κ(f) = {:?}",
                self.space.reduced_element(self.space.reduce_mask(&h)?).coeffs(),
                self.space.reduced_element(f.slope).coeffs()
            )));
        }
        Ok(PullbackElement { h, f })
    }

    pub fn to_group_element(&self, x: &PullbackElement) -> GroupElement {
        let mut coeffs = vec![x.f.constant as i64];
        coeffs.extend_from_slice(x.h.coeffs());
        self.group.element(&coeffs).expect("length matches")
    }

    pub fn from_group_element(&self, e: &GroupElement) -> PullbackElement {
        let c = e.coeffs();
        let h = self.space.homology().element(&c[1..]).expect("length matches");
        let slope = self.space.reduce_mask(&h).expect("same group");
        PullbackElement { h, f: AffineFn { dim: self.space.dimension(), constant: (c[0] & 1) as u8, slope } }
    }

    /// `𝒴(P)` with special element `(0, 1̄)`.
    pub fn y_structure(&self) -> Result<YGroupStructure> {
        y_group(&SpecialPair::new(self.group.generator(0))?)
    }

    pub fn y_term(&self, sign: i64, leaves: &[PullbackElement; 3]) -> YTerm {
        YTerm { sign, colors: leaves.clone().map(|l| self.to_group_element(&l)) }
    }
}

/// An element of `Λ³H ×_{Λ³H_(2)} C(S, Z_2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TriCubicPair {
    pub trivector: Trivector,
    pub cubic: CubicFn,
}

/// The target `Λ³H ×_{Λ³H_(2)} C(S, Z_2)` of `𝔚`, with basis
/// `(0, 1̄)`, `(0, ē_t)`, `(0, ē_tē_u)` of order 2 and
/// `(e_i∧e_j∧e_k, ē_iē_jē_k)` of order `gcd(n_i, n_j, n_k)`.
#[derive(Clone, Debug)]
pub struct TriCubicSpace {
    space: SpinSpace,
    cube: TrivectorSpace,
    low: Vec<u64>,
}

impl TriCubicSpace {
    pub fn new(space: &SpinSpace) -> Self {
        let low = space.cubic_basis().into_iter().filter(|m| m.count_ones() <= 2).collect();
        TriCubicSpace { space: space.clone(), cube: TrivectorSpace::new(space.homology()), low }
    }

    pub fn group(&self) -> FgAbelianGroup {
        let mut orders = vec![2; self.low.len()];
        orders.extend_from_slice(self.cube.orders());
        FgAbelianGroup::new(orders)
    }

    /// `Π ē` over the triple, as a mask; `None` when one index is odd.
    fn triple_mask(&self, t: [usize; 3]) -> Option<u64> {
        let even = self.space.even_indices();
        t.iter().try_fold(0u64, |acc, i| even.iter().position(|e| e == i).map(|p| acc | 1 << p))
    }

    pub fn basis_pair(&self, k: usize) -> TriCubicPair {
        let h = self.space.homology();
        if k < self.low.len() {
            return TriCubicPair {
                trivector: Trivector::zero(h),
                cubic: self.space.monomial(self.low[k]).expect("basis"),
            };
        }
        let t = self.cube.basis()[k - self.low.len()];
        let cubic = match self.triple_mask(t) {
            Some(m) => self.space.monomial(m).expect("basis"),
            None => self.space.cubic_zero(),
        };
        TriCubicPair { trivector: Trivector::basis(h, t), cubic }
    }

    /// Checks `d³f = X ⊗ 1`.
    pub fn check(&self, x: &TriCubicPair) -> Result<()> {
        let red = exterior_cube_hom(self.space.reduction()).apply(&x.trivector)?;
        if d3(&self.space, &x.cubic) != red {
            return Err(Error::ConstraintViolation("d³f differs from the reduction of X".into()));
        }
        Ok(())
    }

    pub fn to_element(&self, x: &TriCubicPair) -> Result<GroupElement> {
        self.check(x)?;
        let mut rest = x.cubic.clone();
        let mut coeffs = vec![0i64; self.low.len()];
        let mut top = Vec::with_capacity(self.cube.basis().len());
        for &t in self.cube.basis() {
            let c = x.trivector.coeff(t);
            if c.rem_euclid(2) == 1 {
                if let Some(m) = self.triple_mask(t) {
                    rest.toggle(m);
                }
            }
            top.push(c);
        }
        for m in rest.monomials() {
            match self.low.iter().position(|&l| l == m) {
                Some(p) => coeffs[p] = 1,
                None => return Err(Error::ConstraintViolation("cubic part not matched by the trivector".into())),
            }
        }
        coeffs.extend(top);
        self.group().element(&coeffs)
    }

    pub fn from_element(&self, e: &GroupElement) -> TriCubicPair {
        let h = self.space.homology();
        let mut out = TriCubicPair { trivector: Trivector::zero(h), cubic: self.space.cubic_zero() };
        for (k, &c) in e.coeffs().iter().enumerate() {
            let b = self.basis_pair(k);
            out.trivector = out.trivector.try_add(&b.trivector.scale(c)).expect("same base");
            if c.rem_euclid(2) == 1 {
                out.cubic = out.cubic.try_add(&b.cubic).expect("same space");
            }
        }
        out
    }

    pub fn basis_len(&self) -> usize {
        self.low.len() + self.cube.basis().len()
    }
}

/// `𝔚(Y[(h₁,f₁),(h₂,f₂),(h₃,f₃)]) = (h₁∧h₂∧h₃, f₁f₂f₃)`.
pub fn w_map(p: &PullbackP, ys: &YGroupStructure, x: &GroupElement) -> Result<TriCubicPair> {
    w_of_terms(p, &ys.lift(x))
}

/// `𝔚` on a formal sum of Y-terms over `P`.
pub fn w_of_terms(p: &PullbackP, terms: &[YTerm]) -> Result<TriCubicPair> {
    let h = p.space.homology();
    let mut out = TriCubicPair { trivector: Trivector::zero(h), cubic: p.space.cubic_zero() };
    for term in terms {
        let [l1, l2, l3] = term.colors.clone().map(|c| p.from_group_element(&c));
        let w = wedge(&l1.h, &l2.h, &l3.h)?.scale(term.sign);
        out.trivector = out.trivector.try_add(&w)?;
        out.cubic = out.cubic.try_add(&cubic_product(&l1.f, &l2.f, &l3.f)?)?;
    }
    Ok(out)
}

/// Section of `𝔚`: `(0,1̄) ↦ Y[(0,1̄),(0,1̄),(0,1̄)]`,
/// `(0,ē_i) ↦ Y[(e_i,ē_i),(0,1̄),(0,1̄)]`,
/// `(0,ē_iē_j) ↦ Y[(e_i,ē_i),(e_j,ē_j),(0,1̄)]`,
/// `(e_i∧e_j∧e_k, ē_iē_jē_k) ↦ Y[(e_i,ē_i),(e_j,ē_j),(e_k,ē_k)]`.
pub fn epsilon_tri(p: &PullbackP, ys: &YGroupStructure, tcs: &TriCubicSpace, x: &TriCubicPair) -> Result<GroupElement> {
    let coords = tcs.to_element(x)?;
    let g = &p.group;
    let one = g.generator(0);
    let even = p.space.even_indices();
    let mut terms = Vec::new();
    for (k, &c) in coords.coeffs().iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mut colors: Vec<GroupElement> = if k < tcs.low.len() {
            let m = tcs.low[k];
            (0..even.len()).filter(|t| m >> t & 1 == 1).map(|t| g.generator(1 + even[t])).collect()
        } else {
            tcs.cube.basis()[k - tcs.low.len()].iter().map(|&i| g.generator(1 + i)).collect()
        };
        colors.resize(3, one.clone());
        colors[0] = colors[0].scale(c);
        terms.push(YTerm::new(colors[0].clone(), colors[1].clone(), colors[2].clone()));
    }
    ys.normal_form(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(orders: &[u64]) -> SpinSpace {
        SpinSpace::new(&FgAbelianGroup::new(orders.iter().copied())).unwrap()
    }

    #[test]
    fn kappa_examples() {
        let s = space(&[0]);
        assert!(kappa(&s, &s.constant(1)).is_zero());
        let k = kappa(&s, &s.coordinate(0));
        assert_eq!(k.coeffs(), &[1]);
        // defining identity on both offsets and both base points
        let f = s.coordinate(0);
        for sigma in 0..2 {
            for y in 0..2 {
                assert_eq!(f.eval(sigma ^ y), f.eval(sigma) ^ (y & f.slope()).count_ones() as u8 & 1);
            }
        }
    }

    #[test]
    fn product_examples() {
        let s = space(&[0, 0, 0]);
        let one = s.constant(1);
        assert_eq!(cubic_product(&one, &one, &one).unwrap(), s.monomial(0).unwrap());
        let e = |t| s.coordinate(t);
        assert_eq!(cubic_product(&e(0), &e(1), &e(2)).unwrap(), s.monomial(0b111).unwrap());
        assert_eq!(cubic_product(&e(0), &e(0), &e(1)).unwrap(), s.monomial(0b011).unwrap());
        let f = e(0).try_add(&one).unwrap();
        let g = e(1).try_add(&e(2)).unwrap();
        let p = cubic_product(&f, &g, &e(2)).unwrap();
        for sigma in s.spin_structures() {
            assert_eq!(p.eval(sigma), f.eval(sigma) & g.eval(sigma) & e(2).eval(sigma));
        }
    }

    #[test]
    fn d3_examples() {
        let s = space(&[0, 0, 0]);
        assert!(d3(&s, &s.coordinate(1).to_cubic()).is_zero());
        let m = s.monomial(0b111).unwrap();
        assert_eq!(d3(&s, &m), Trivector::basis(s.reduced_homology(), [0, 1, 2]));
    }

    #[test]
    fn odd_generators_are_pruned() {
        let s = space(&[3, 4, 0]);
        assert_eq!(s.dimension(), 2);
        assert_eq!(s.coordinate_of_generator(0), s.constant(0));
        assert_eq!(s.coordinate_of_generator(2), s.coordinate(1));
        let p = PullbackP::new(&s);
        assert_eq!(p.group().orders(), &[2, 3, 4, 0]);
        let x = p.basis_element(0);
        assert_eq!(p.from_group_element(&p.to_group_element(&x)), x);
    }

    #[test]
    fn bitstrings_round_trip() {
        let s = space(&[2, 0, 4]);
        assert_eq!(s.bitstring(0b001), "100");
        assert_eq!(s.parse_bitstring("011").unwrap(), 0b110);
        assert!(s.parse_bitstring("01").is_err());
        assert!(s.parse_bitstring("012").is_err());
        for m in s.spin_structures() {
            assert_eq!(s.mask_of_dual(&s.offset_dual(m)), m);
        }
    }

    #[test]
    fn cubic_from_truth_table() {
        let s = space(&[0, 0, 0, 2]);
        let f = cubic_product(&s.coordinate(0), &s.coordinate(3), &s.constant(1)).unwrap();
        let table: Vec<u8> = s.spin_structures().map(|m| f.eval(m)).collect();
        assert_eq!(s.cubic_from_values(&table).unwrap(), f);
        let quartic: Vec<u8> = s.spin_structures().map(|m| (m == 0b1111) as u8).collect();
        assert!(s.cubic_from_values(&quartic).is_err());
    }

    #[test]
    fn gamma_and_epsilon_cubic_examples() {
        let s = space(&[0]);
        let ys = affine_y_structure(&s).unwrap();
        let a = s.affine_group();
        let one = a.generator(0);
        let x = ys.normal_form_of(&YTerm::new(one.clone(), one.clone(), one)).unwrap();
        assert_eq!(gamma(&s, &ys, &x).unwrap(), s.monomial(0).unwrap());
        assert_eq!(ys.group().cardinality(), Some(4));
        assert_eq!(s.cubic_basis().len(), 2);

        let s = space(&[0, 0]);
        let ys = affine_y_structure(&s).unwrap();
        let a = s.affine_group();
        let expected = ys.normal_form_of(&YTerm::new(a.generator(1), a.generator(2), a.generator(0))).unwrap();
        assert_eq!(epsilon_cubic(&s, &ys, &s.monomial(0b11).unwrap()).unwrap(), expected);
    }

    #[test]
    fn w_map_examples() {
        let s = space(&[0, 0, 0]);
        let p = PullbackP::new(&s);
        let ys = p.y_structure().unwrap();
        let special = p.special();
        let t = p.y_term(1, &[special.clone(), special.clone(), special.clone()]);
        let w = w_of_terms(&p, &[t]).unwrap();
        assert!(w.trivector.is_zero());
        assert_eq!(w.cubic, s.monomial(0).unwrap());

        let leaves = [p.basis_element(0), p.basis_element(1), p.basis_element(2)];
        let w = w_of_terms(&p, &[p.y_term(1, &leaves)]).unwrap();
        assert_eq!(w.trivector, Trivector::basis(s.homology(), [0, 1, 2]));
        assert_eq!(w.cubic, s.monomial(0b111).unwrap());

        let tcs = TriCubicSpace::new(&s);
        let target = TriCubicPair { trivector: Trivector::zero(s.homology()), cubic: s.coordinate(0).to_cubic() };
        let e = epsilon_tri(&p, &ys, &tcs, &target).unwrap();
        assert_eq!(w_map(&p, &ys, &e).unwrap(), target);
    }

    #[test]
    fn constraint_violation_detected() {
        let s = space(&[0]);
        let p = PullbackP::new(&s);
        let h = s.homology().generator(0);
        assert!(matches!(p.element(h.clone(), s.constant(0)), Err(Error::ConstraintViolation(_))));
        assert!(p.element(h, s.coordinate(0)).is_ok());
    }

    #[test]
    fn pullback_universality() {
        for orders in [vec![2u64, 3], vec![4, 2], vec![2, 2, 2]] {
            let s = space(&orders);
            let p = PullbackP::new(&s);
            let mut seen = std::collections::HashSet::new();
            for e in p.group().elements().unwrap() {
                let x = p.from_group_element(&e);
                assert!(p.element(x.h.clone(), x.f).is_ok());
                assert_eq!(p.to_group_element(&x), e);
                assert!(seen.insert((x.h.coeffs().to_vec(), x.f)));
            }
            // every constrained pair is hit
            let mut valid = 0;
            for h in s.homology().elements().unwrap() {
                for c in 0..2 {
                    for slope in 0..s.count() {
                        if p.element(h.clone(), s.affine(c, slope).unwrap()).is_ok() {
                            valid += 1;
                        }
                    }
                }
            }
            assert_eq!(valid, seen.len());
        }
    }
}
