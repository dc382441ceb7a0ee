//! Deciders for Y₁- and Y₂-equivalence of invariant records.
//!
//! A certificate is an isomorphism `ψ: H -> H'` and, in the plain case, an
//! offset `t` fixing the bijection `Ψ: S' -> S`,
//! `Ψ(σ'₀ + y') = σ₀ + t + ψ^(2)(y')`. For finite `H` the isomorphisms are
//! searched exhaustively (identity first when both groups carry the same
//! orders, then in lexicographic order); for infinite `H` only the
//! identity and user-supplied candidates are tried.

use crate::error::{Error, Result};
use crate::fgab::{enumerate_isomorphisms, DualGroup, GroupElement, Homomorphism};
use crate::invariants::{quad_value, CupTable, InvariantRecord, LinkingPairing, QmodZ, QuadFn};
use crate::spin::OffsetMap;
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Theorem-level Y₁ check for spin manifolds with fixed spin structures.
    Y1Spin { sigma: u64, sigma_prime: u64 },
    /// Y₂-equivalence of spin manifolds with fixed spin structures.
    Y2Spin { sigma: u64, sigma_prime: u64 },
    /// Y₂-equivalence of plain manifolds.
    Y2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub psi: Homomorphism,
    /// Offset `t` of `Ψ`; `None` for the spin modes.
    pub offset: Option<u64>,
    pub moduli_checked: Vec<u64>,
    pub report: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Equivalent(Certificate),
    NotEquivalent(String),
    Unknown(String),
}

/// `q'[σ'](ψ x) = q[σ](x)` for all torsion `x`, checked on generators and
/// on the pairing of generator pairs (which determine `q` entirely).
pub fn check_y1_spin(
    r: &InvariantRecord,
    r2: &InvariantRecord,
    sigma: u64,
    sigma2: u64,
    psi: &Homomorphism,
) -> Result<bool> {
    check_iso(r, r2, psi)?;
    check_spin_index(r, sigma)?;
    check_spin_index(r2, sigma2)?;
    if !linking_preserved(r, r2, psi)? {
        return Ok(false);
    }
    let pulled = pulled_quadratic(r, &r2.quadratic[sigma2 as usize], &r2.linking, psi)?;
    Ok(pulled == r.quadratic[sigma as usize].values())
}

/// [`check_y1_spin`] by brute force over every torsion element.
pub fn check_y1_spin_exhaustive(
    r: &InvariantRecord,
    r2: &InvariantRecord,
    sigma: u64,
    sigma2: u64,
    psi: &Homomorphism,
) -> Result<bool> {
    check_iso(r, r2, psi)?;
    let (q, q2) = (&r.quadratic[sigma as usize], &r2.quadratic[sigma2 as usize]);
    for x in r.homology.torsion_elements() {
        if quad_value(q2, &r2.linking, &psi.apply(&x)?)? != quad_value(q, &r.linking, &x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Conditions (a) quadratic functions, (b) cup forms, (c) Rochlin
/// functions for spin manifolds.
pub fn check_y2_spin(
    r: &InvariantRecord,
    r2: &InvariantRecord,
    sigma: u64,
    sigma2: u64,
    psi: &Homomorphism,
) -> Result<bool> {
    check_moduli(r, r2)?;
    if !check_y1_spin(r, r2, sigma, sigma2, psi)? || !cup_preserved(r, r2, psi)? {
        return Ok(false);
    }
    let forward = OffsetMap::new(psi, &r.spin, &r2.spin)?;
    Ok(r2
        .spin
        .spin_structures()
        .all(|y2| r2.rochlin[(sigma2 ^ y2) as usize] == r.rochlin[(sigma ^ forward.apply(y2)) as usize]))
}

/// Conditions (a) linking, (b) cup forms, (c) Rochlin and (d) quadratic
/// functions along `Ψ` for plain manifolds.
pub fn check_y2_plain(r: &InvariantRecord, r2: &InvariantRecord, psi: &Homomorphism, offset: u64) -> Result<bool> {
    check_moduli(r, r2)?;
    check_iso(r, r2, psi)?;
    check_spin_index(r, offset)?;
    if !linking_preserved(r, r2, psi)? || !cup_preserved(r, r2, psi)? {
        return Ok(false);
    }
    let ctx = PlainContext::new(r, r2, psi)?;
    Ok(ctx.offset_works(offset))
}

fn check_iso(r: &InvariantRecord, r2: &InvariantRecord, psi: &Homomorphism) -> Result<()> {
    if psi.source() != &r.homology || psi.target() != &r2.homology {
        return Err(Error::GroupMismatch("certificate does not connect the two homologies".into()));
    }
    if !psi.is_isomorphism() {
        return Err(Error::NotIsomorphism);
    }
    Ok(())
}

fn check_spin_index(r: &InvariantRecord, sigma: u64) -> Result<()> {
    if sigma >= r.spin.count() {
        return Err(Error::Invalid(format!("spin index {sigma} out of range")));
    }
    Ok(())
}

fn check_moduli(r: &InvariantRecord, r2: &InvariantRecord) -> Result<()> {
    if r.moduli() != r2.moduli() {
        return Err(Error::ModuliMismatch(r.moduli(), r2.moduli()));
    }
    Ok(())
}

fn linking_preserved(r: &InvariantRecord, r2: &InvariantRecord, psi: &Homomorphism) -> Result<bool> {
    let h = &r.homology;
    let t = h.torsion_indices();
    let imgs = psi.images();
    for (a, &i) in t.iter().enumerate() {
        for &j in &t[a..] {
            if r2.linking.value(&imgs[i], &imgs[j])? != r.linking.value(&h.generator(i), &h.generator(j))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(q'(ψ e_i))_i` over the torsion generators of `H`.
fn pulled_quadratic(r: &InvariantRecord, q2: &QuadFn, l2: &LinkingPairing, psi: &Homomorphism) -> Result<Vec<QmodZ>> {
    r.homology.torsion_indices().iter().map(|&i| quad_value(q2, l2, &psi.images()[i])).collect()
}

/// `u'^(n)(y'₁, y'₂, y'₃) = u^(n)(ψ^(n) y'₁, ψ^(n) y'₂, ψ^(n) y'₃)` on all
/// sorted dual-basis triples of `H'`, for every configured `n`.
fn cup_preserved(r: &InvariantRecord, r2: &InvariantRecord, psi: &Homomorphism) -> Result<bool> {
    let rank = r2.homology.rank();
    for (&n, u2) in &r2.cup {
        let u = &r.cup[&n];
        let dual2 = DualGroup::new(&r2.homology, n);
        let pulled = (0..rank).map(|a| dual2.pullback(psi, &dual2.generator(a))).collect::<Result<Vec<_>>>()?;
        for i in 0..rank {
            for j in i..rank {
                for k in j..rank {
                    if u2.get([i, j, k]) != u.evaluate([&pulled[i], &pulled[j], &pulled[k]]) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Data for trying offsets against a fixed `ψ` in the plain case.
struct PlainContext<'a> {
    r: &'a InvariantRecord,
    r2: &'a InvariantRecord,
    forward: OffsetMap,
    pulled_q: Vec<Vec<QmodZ>>,
}

impl<'a> PlainContext<'a> {
    fn new(r: &'a InvariantRecord, r2: &'a InvariantRecord, psi: &Homomorphism) -> Result<Self> {
        let forward = OffsetMap::new(psi, &r.spin, &r2.spin)?;
        let pulled_q =
            r2.quadratic.iter().map(|q2| pulled_quadratic(r, q2, &r2.linking, psi)).collect::<Result<Vec<_>>>()?;
        Ok(PlainContext { r, r2, forward, pulled_q })
    }

    fn offset_works(&self, t: u64) -> bool {
        self.r2.spin.spin_structures().all(|s2| {
            let s = (t ^ self.forward.apply(s2)) as usize;
            self.r2.rochlin[s2 as usize] == self.r.rochlin[s]
                && self.pulled_q[s2 as usize] == self.r.quadratic[s].values()
        })
    }
}

fn sorted_rochlin(r: &InvariantRecord) -> Vec<u8> {
    let mut v = r.rochlin.clone();
    v.sort_unstable();
    v
}

fn self_linking_profile(r: &InvariantRecord) -> Option<Vec<QmodZ>> {
    let card = r.homology.torsion_elements().size_hint().1?;
    if card > 1 << 14 {
        return None;
    }
    let mut v: Vec<QmodZ> = r.homology.torsion_elements().map(|x| r.linking.value(&x, &x).expect("torsion")).collect();
    v.sort_unstable();
    Some(v)
}

/// Necessary conditions that hold for any `ψ`; returns a reason on failure.
pub fn screen(r: &InvariantRecord, r2: &InvariantRecord, mode: Mode) -> Result<Option<String>> {
    if !r.homology.is_isomorphic(&r2.homology) {
        return Ok(Some(format!("homology groups {} and {} are not isomorphic", r.homology, r2.homology)));
    }
    if self_linking_profile(r) != self_linking_profile(r2) {
        return Ok(Some("linking pairings are not isomorphic (self-linking values differ)".into()));
    }
    if matches!(mode, Mode::Y1Spin { .. }) {
        return Ok(None);
    }
    check_moduli(r, r2)?;
    if sorted_rochlin(r) != sorted_rochlin(r2) {
        return Ok(Some("Rochlin multiset mismatch".into()));
    }
    for (&n, u) in &r.cup {
        if u.is_zero() != r2.cup[&n].is_zero() {
            return Ok(Some(format!("cup profile mismatch at modulus {n}")));
        }
    }
    Ok(None)
}

fn certificate(r: &InvariantRecord, psi: Homomorphism, mode: Mode, offset: Option<u64>) -> Certificate {
    let mut report = vec!["isomorphism of homology groups".to_string()];
    match mode {
        Mode::Y1Spin { .. } => report.push("quadratic functions agree on torsion".into()),
        Mode::Y2Spin { .. } => {
            report.push("quadratic functions agree on torsion".into());
            report.push(format!("cup forms agree for moduli {:?}", r.moduli()));
            report.push("Rochlin functions agree".into());
        }
        Mode::Y2 => {
            report.push("linking pairings agree".into());
            report.push(format!("cup forms agree for moduli {:?}", r.moduli()));
            report.push("Rochlin functions agree along the spin bijection".into());
            report.push("quadratic functions agree along the spin bijection".into());
        }
    }
    let moduli_checked = if matches!(mode, Mode::Y1Spin { .. }) { vec![] } else { r.moduli() };
    Certificate { psi, offset, moduli_checked, report }
}

/// Tries one `ψ`; returns the offset (plain case) or `Some(None)` (spin
/// cases) on success.
fn try_candidate(
    r: &InvariantRecord,
    r2: &InvariantRecord,
    psi: &Homomorphism,
    mode: Mode,
) -> Result<Option<Option<u64>>> {
    match mode {
        Mode::Y1Spin { sigma, sigma_prime } => Ok(check_y1_spin(r, r2, sigma, sigma_prime, psi)?.then_some(None)),
        Mode::Y2Spin { sigma, sigma_prime } => Ok(check_y2_spin(r, r2, sigma, sigma_prime, psi)?.then_some(None)),
        Mode::Y2 => {
            check_iso(r, r2, psi)?;
            if !linking_preserved(r, r2, psi)? || !cup_preserved(r, r2, psi)? {
                return Ok(None);
            }
            let ctx = PlainContext::new(r, r2, psi)?;
            Ok(r.spin.spin_structures().find(|&t| ctx.offset_works(t)).map(Some))
        }
    }
}

const CHUNK: usize = 1024;

/// First candidate (in iteration order) that passes, searching chunks in
/// parallel.
fn search(
    r: &InvariantRecord,
    r2: &InvariantRecord,
    mode: Mode,
    candidates: impl Iterator<Item = Homomorphism>,
) -> Result<Option<Certificate>> {
    let mut candidates = candidates.peekable();
    while candidates.peek().is_some() {
        let chunk: Vec<Homomorphism> = candidates.by_ref().take(CHUNK).collect();
        let found = chunk
            .par_iter()
            .map(|psi| try_candidate(r, r2, psi, mode).map(|o| o.map(|off| (psi, off))))
            .find_first(|res| !matches!(res, Ok(None)));
        match found {
            Some(Ok(Some((psi, off)))) => return Ok(Some(certificate(r, psi.clone(), mode, off))),
            Some(Err(e)) => return Err(e),
            _ => {}
        }
    }
    Ok(None)
}

/// Searches for a certificate. `candidates` are extra isomorphisms to try
/// (required to say anything positive about infinite `H` beyond the
/// identity).
pub fn decide_y2(
    r: &InvariantRecord,
    r2: &InvariantRecord,
    mode: Mode,
    candidates: &[Homomorphism],
) -> Result<Decision> {
    if let Some(reason) = screen(r, r2, mode)? {
        return Ok(Decision::NotEquivalent(reason));
    }
    let same_basis = r.homology == r2.homology;
    if same_basis {
        if let Some(c) = search(r, r2, mode, std::iter::once(r.homology.identity()))? {
            return Ok(Decision::Equivalent(c));
        }
    }
    if let Some(c) = search(r, r2, mode, candidates.iter().cloned())? {
        return Ok(Decision::Equivalent(c));
    }
    if !r.homology.is_finite() {
        if candidates.is_empty() && !same_basis {
            return Err(Error::InfiniteSearchSpace);
        }
        return Ok(Decision::Unknown(
            "homology is infinite; the supplied isomorphisms do not certify equivalence".into(),
        ));
    }
    let all = enumerate_isomorphisms(&r.homology, &r2.homology)?;
    match search(r, r2, mode, all)? {
        Some(c) => Ok(Decision::Equivalent(c)),
        None => Ok(Decision::NotEquivalent("no isomorphism satisfies the conditions".into())),
    }
}

impl Certificate {
    /// Re-checks the certificate against both records.
    pub fn verify(&self, r: &InvariantRecord, r2: &InvariantRecord, mode: Mode) -> Result<bool> {
        match (mode, self.offset) {
            (Mode::Y1Spin { sigma, sigma_prime }, None) => check_y1_spin(r, r2, sigma, sigma_prime, &self.psi),
            (Mode::Y2Spin { sigma, sigma_prime }, None) => check_y2_spin(r, r2, sigma, sigma_prime, &self.psi),
            (Mode::Y2, Some(t)) => check_y2_plain(r, r2, &self.psi, t),
            _ => Err(Error::Invalid("certificate does not match the mode".into())),
        }
    }

    /// The certificate for `(r', r)`: `ψ⁻¹` with offset `(ψ⁻¹)^(2)(t)`.
    pub fn inverted(&self, r: &InvariantRecord, r2: &InvariantRecord) -> Result<Certificate> {
        let inv = self.psi.inverse()?;
        let offset = match self.offset {
            Some(t) => Some(OffsetMap::new(&inv, &r2.spin, &r.spin)?.apply(t)),
            None => None,
        };
        Ok(Certificate { psi: inv, offset, moduli_checked: self.moduli_checked.clone(), report: self.report.clone() })
    }
}

/// Mode with the two spin structures exchanged.
pub fn swapped(mode: Mode) -> Mode {
    match mode {
        Mode::Y1Spin { sigma, sigma_prime } => Mode::Y1Spin { sigma: sigma_prime, sigma_prime: sigma },
        Mode::Y2Spin { sigma, sigma_prime } => Mode::Y2Spin { sigma: sigma_prime, sigma_prime: sigma },
        Mode::Y2 => Mode::Y2,
    }
}

/// The record over `H'` obtained by pushing `r` along an isomorphism
/// `ψ: H -> H'`, with spin structures matched by `Ψ` of offset `t`. The
/// pair `(ψ, t)` certifies `r ~ transport(r, ψ, t)` in the plain case.
pub fn transport(r: &InvariantRecord, psi: &Homomorphism, offset: u64) -> Result<InvariantRecord> {
    if psi.source() != &r.homology {
        return Err(Error::GroupMismatch("isomorphism does not start at the record's homology".into()));
    }
    let inv = psi.inverse()?;
    let h2 = psi.target().clone();
    let spin2 = crate::spin::SpinSpace::new(&h2)?;
    let t2 = h2.torsion_indices();
    let back: Vec<GroupElement> = t2.iter().map(|&i| inv.images()[i].clone()).collect();
    let matrix = back
        .iter()
        .map(|x| back.iter().map(|y| r.linking.value(x, y)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let linking = LinkingPairing::new(&h2, matrix)?;
    let forward = OffsetMap::new(psi, &r.spin, &spin2)?;
    let bijection = |s2: u64| (offset ^ forward.apply(s2)) as usize;
    let quadratic = spin2
        .spin_structures()
        .map(|s2| {
            let q = &r.quadratic[bijection(s2)];
            Ok(QuadFn::new(back.iter().map(|x| quad_value(q, &r.linking, x)).collect::<Result<Vec<_>>>()?))
        })
        .collect::<Result<Vec<_>>>()?;
    let rochlin = spin2.spin_structures().map(|s2| r.rochlin[bijection(s2)]).collect();
    let rank = h2.rank();
    let mut cup = BTreeMap::new();
    for (&n, u) in &r.cup {
        let dual2 = DualGroup::new(&h2, n);
        let pulled = (0..rank).map(|a| dual2.pullback(psi, &dual2.generator(a))).collect::<Result<Vec<_>>>()?;
        let mut table = CupTable::zero(n);
        for i in 0..rank {
            for j in i..rank {
                for k in j..rank {
                    table.set([i, j, k], u.evaluate([&pulled[i], &pulled[j], &pulled[k]]));
                }
            }
        }
        cup.insert(n, table);
    }
    let out = InvariantRecord { homology: h2, spin: spin2, linking, quadratic, cup, rochlin };
    out.check_shape()?;
    Ok(out)
}
