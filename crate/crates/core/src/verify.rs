//! Exhaustive and randomized oracles for the structural lemmas: detection
//! of trivectors by the modular pairings, the graph-group isomorphisms for
//! cubic functions and for the pull-back, and commutativity of the square
//! relating surgery to the difference map.

use crate::arith::{divisors, reduce_wide};
use crate::error::Result;
use crate::fgab::{CoefficientBox, DualGroup, FgAbelianGroup};
use crate::sample::{random_record, random_terms};
use crate::spin::{affine_y_structure, epsilon_cubic, epsilon_tri, gamma, w_map, PullbackP, SpinSpace, TriCubicSpace};
use crate::surgery::check_square;
use crate::trivector::{basis_pairing, detect_nonzero, TrivectorSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub lemma: &'static str,
    pub groups: usize,
    pub cases: u64,
    pub failures: Vec<String>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} groups, {} cases, {} failures", self.lemma, self.groups, self.cases, self.failures.len())?;
        for x in self.failures.iter().take(10) {
            write!(f, "\n  {x}")?;
        }
        Ok(())
    }
}

/// Invariant factor lists `d_1 | d_2 | ...` (all `d_i > 1`) with product at
/// most `bound`: one representative per isomorphism type of finite abelian
/// group of order `<= bound`, the trivial group included.
pub fn finite_abelian_types(bound: u64) -> Vec<Vec<u64>> {
    fn extend(prefix: &mut Vec<u64>, product: u64, bound: u64, out: &mut Vec<Vec<u64>>) {
        out.push(prefix.clone());
        let last = prefix.last().copied().unwrap_or(1);
        let mut d = if last == 1 { 2 } else { last };
        while product * d <= bound {
            if d % last == 0 {
                prefix.push(d);
                extend(prefix, product * d, bound, out);
                prefix.pop();
            }
            d += if last == 1 { 1 } else { last };
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, bound.max(1), &mut out);
    out
}

const CHUNK: usize = 1 << 12;

/// Every nonzero `X ∈ Λ³H` pairs nonzero with some dual basis trivector at
/// some modulus dividing `exp(H)`, zero pairs trivially with everything,
/// and `detect_nonzero` agrees; for all finite `H` with `|H| <= bound`.
pub fn verify_trivectors(bound: u64) -> Result<LemmaReport> {
    let types = finite_abelian_types(bound);
    let results = types
        .par_iter()
        .map(|orders| check_trivectors_of(&FgAbelianGroup::new(orders.iter().copied())))
        .collect::<Result<Vec<_>>>()?;
    let mut report = LemmaReport { lemma: "trivectors", groups: types.len(), cases: 0, failures: vec![] };
    for (cases, failures) in results {
        report.cases += cases;
        report.failures.extend(failures);
    }
    Ok(report)
}

fn check_trivectors_of(h: &FgAbelianGroup) -> Result<(u64, Vec<String>)> {
    let space = TrivectorSpace::new(h);
    let basis = space.basis().to_vec();
    let rank = h.rank();
    let triples: Vec<[usize; 3]> =
        (0..rank).flat_map(|i| (i + 1..rank).flat_map(move |j| (j + 1..rank).map(move |k| [i, j, k]))).collect();
    // (m, rows of <e_s*, e_t> over dual triples s and basis triples t)
    let tables: Vec<(u64, Vec<Vec<i64>>)> = divisors(h.exponent().max(1))
        .into_iter()
        .map(|m| {
            let dual = DualGroup::new(h, m);
            let rows = triples
                .iter()
                .map(|&s| basis.iter().map(|&t| reduce_wide(basis_pairing(&dual, s, t), m)).collect())
                .collect();
            (m, rows)
        })
        .collect();
    let detects = |c: &[i64]| -> Option<u64> {
        tables.iter().find_map(|(m, rows)| {
            rows.iter()
                .any(|row| reduce_wide(row.iter().zip(c).map(|(&p, &x)| p as i128 * x as i128).sum(), *m) != 0)
                .then_some(*m)
        })
    };
    let mut cases = 0u64;
    let mut failures = Vec::new();
    let mut coords = CoefficientBox::new(space.orders().to_vec()).peekable();
    while coords.peek().is_some() {
        let chunk: Vec<Vec<i64>> = coords.by_ref().take(CHUNK).collect();
        cases += chunk.len() as u64;
        let bad: Vec<String> = chunk
            .par_iter()
            .filter_map(|c| {
                let x = space.from_element(&space.group().element(c).expect("in range"));
                let zero = c.iter().all(|&v| v == 0);
                let oracle = detects(c);
                let claimed = match detect_nonzero(&x) {
                    Ok(v) => v,
                    Err(e) => return Some(format!("{h}: {c:?}: {e}")),
                };
                let ok = match (zero, oracle, claimed) {
                    (true, None, None) => true,
                    (false, Some(_), Some(m)) => oracle_hit_at(&tables, m, c),
                    _ => false,
                };
                (!ok).then(|| format!("{h}: coordinates {c:?}, oracle {oracle:?}, detector {claimed:?}"))
            })
            .collect();
        failures.extend(bad);
    }
    Ok((cases, failures))
}

fn oracle_hit_at(tables: &[(u64, Vec<Vec<i64>>)], m: u64, c: &[i64]) -> bool {
    tables.iter().filter(|(n, _)| *n == m).any(|(_, rows)| {
        rows.iter().any(|row| reduce_wide(row.iter().zip(c).map(|(&p, &x)| p as i128 * x as i128).sum(), m) != 0)
    })
}

/// Homology shapes with at most `max_generators` generators, orders in
/// `{0, 2, 3, 4}` and at most one free generator.
pub fn small_shapes(max_generators: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_generators {
        let mut next = Vec::new();
        for s in &frontier {
            for n in [0u64, 2, 3, 4] {
                let mut t: Vec<u64> = s.clone();
                t.push(n);
                if t.iter().filter(|&&x| x == 0).count() <= 1 {
                    next.push(t);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// `𝒴(A(S,Z_2), 1̄) ≅ C(S,Z_2)`: equal invariant factors, `γ∘ε = id` on the
/// monomial basis and `ε∘γ = id` on the graph generators.
pub fn verify_cubic(max_generators: usize) -> Result<LemmaReport> {
    let shapes = small_shapes(max_generators);
    let results = shapes
        .par_iter()
        .map(|orders| -> Result<(u64, Vec<String>)> {
            let h = FgAbelianGroup::new(orders.iter().copied());
            let space = SpinSpace::new(&h)?;
            let ys = affine_y_structure(&space)?;
            let mut failures = Vec::new();
            let mut cases = 1u64;
            if ys.invariant_factors() != space.cubic_group().invariant_factors() {
                failures.push(format!(
                    "{h}: factors {:?} vs {:?}",
                    ys.invariant_factors(),
                    space.cubic_group().invariant_factors()
                ));
            }
            for m in space.cubic_basis() {
                cases += 1;
                let f = space.monomial(m)?;
                if gamma(&space, &ys, &epsilon_cubic(&space, &ys, &f)?)? != f {
                    failures.push(format!("{h}: γ∘ε moves monomial {}", space.bitstring(m)));
                }
            }
            for &t in ys.generators() {
                cases += 1;
                let x = ys.generator_class(t);
                if epsilon_cubic(&space, &ys, &gamma(&space, &ys, &x)?)? != x {
                    failures.push(format!("{h}: ε∘γ moves generator {t:?}"));
                }
            }
            Ok((cases, failures))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect("cubic", shapes.len(), results))
}

/// `𝒴(P) ≅ Λ³H ×_{Λ³H_(2)} C(S,Z_2)`: equal invariant factors,
/// `𝔚∘ε = id` on the basis of the target and `ε∘𝔚 = id` on the graph
/// generators.
pub fn verify_tri(max_generators: usize) -> Result<LemmaReport> {
    let shapes = small_shapes(max_generators);
    let results = shapes
        .par_iter()
        .map(|orders| -> Result<(u64, Vec<String>)> {
            let h = FgAbelianGroup::new(orders.iter().copied());
            let space = SpinSpace::new(&h)?;
            let p = PullbackP::new(&space);
            let ys = p.y_structure()?;
            let tcs = TriCubicSpace::new(&space);
            let mut failures = Vec::new();
            let mut cases = 1u64;
            if ys.invariant_factors() != tcs.group().invariant_factors() {
                failures.push(format!(
                    "{h}: factors {:?} vs {:?}",
                    ys.invariant_factors(),
                    tcs.group().invariant_factors()
                ));
            }
            for k in 0..tcs.basis_len() {
                cases += 1;
                let b = tcs.basis_pair(k);
                if w_map(&p, &ys, &epsilon_tri(&p, &ys, &tcs, &b)?)? != b {
                    failures.push(format!("{h}: 𝔚∘ε moves basis element {k}"));
                }
            }
            for &t in ys.generators() {
                cases += 1;
                let x = ys.generator_class(t);
                if epsilon_tri(&p, &ys, &tcs, &w_map(&p, &ys, &x)?)? != x {
                    failures.push(format!("{h}: ε∘𝔚 moves generator {t:?}"));
                }
            }
            Ok((cases, failures))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect("tri", shapes.len(), results))
}

/// Homology shapes exercised by the square check.
pub const SQUARE_SHAPES: [&[u64]; 5] = [&[], &[2], &[0, 0, 0], &[2, 4], &[2, 0]];

/// `𝔈(r, 𝔖(r, X), id) = 𝔑(𝔚(X))` on `per_shape` seeded random pairs for
/// each shape in [`SQUARE_SHAPES`].
pub fn verify_square(per_shape: u64, seed: u64) -> Result<LemmaReport> {
    let results = SQUARE_SHAPES
        .par_iter()
        .enumerate()
        .map(|(idx, orders)| -> Result<(u64, Vec<String>)> {
            let h = FgAbelianGroup::new(orders.iter().copied());
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (idx as u64) << 32);
            let mut failures = Vec::new();
            for case in 0..per_shape {
                let r = random_record(&mut rng, &h);
                let p = PullbackP::new(&r.spin);
                let count = 1 + (case % 4) as usize;
                let terms = random_terms(&mut rng, &p, count);
                if !check_square(&r, &terms)? {
                    failures.push(format!("{h}: case {case} fails"));
                }
            }
            Ok((per_shape, failures))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect("square", SQUARE_SHAPES.len(), results))
}

fn collect(lemma: &'static str, groups: usize, results: Vec<(u64, Vec<String>)>) -> LemmaReport {
    let mut report = LemmaReport { lemma, groups, cases: 0, failures: vec![] };
    for (c, f) in results {
        report.cases += c;
        report.failures.extend(f);
    }
    report
}
