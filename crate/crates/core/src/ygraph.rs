//! The graph group `𝒴(A, s)`: free abelian on symbols `Y[a₁, a₂, a₃]`
//! modulo cyclic symmetry, multilinearity and the slide relation
//! `Y[a, a, b] = Y[s, a, b]`.
//!
//! The group is presented on basis triples `g(i, j, k)` (one per cyclic
//! class, represented by its lexicographically least rotation) with order
//! relations, slide relations on basis colors, and the polarized slide
//! relations on colors `e_i + e_j`. Together these generate the slide
//! relation for arbitrary colors; the tests check this exhaustively on
//! small groups.

use crate::error::{Error, Result};
use crate::fgab::{FgAbelianGroup, GroupElement, Homomorphism, Presentation};
use std::collections::HashMap;

/// An abelian group with a distinguished element of order at most 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialPair {
    group: FgAbelianGroup,
    special: GroupElement,
}

impl SpecialPair {
    pub fn new(special: GroupElement) -> Result<Self> {
        if !special.scale(2).is_zero() {
            return Err(Error::NotAnInvolution(format!("{:?}", special.coeffs())));
        }
        Ok(SpecialPair { group: special.group().clone(), special })
    }

    pub fn with_zero(group: &FgAbelianGroup) -> Self {
        SpecialPair { group: group.clone(), special: group.zero() }
    }

    pub fn group(&self) -> &FgAbelianGroup {
        &self.group
    }

    pub fn special(&self) -> &GroupElement {
        &self.special
    }
}

/// `±Y[a₁, a₂, a₃]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YTerm {
    pub sign: i64,
    pub colors: [GroupElement; 3],
}

impl YTerm {
    pub fn new(a1: GroupElement, a2: GroupElement, a3: GroupElement) -> Self {
        YTerm { sign: 1, colors: [a1, a2, a3] }
    }

    pub fn negated(&self) -> Self {
        YTerm { sign: -self.sign, colors: self.colors.clone() }
    }
}

/// Lexicographically least cyclic rotation of an ordered triple.
pub fn canonical_rotation(t: [usize; 3]) -> [usize; 3] {
    let r1 = [t[1], t[2], t[0]];
    let r2 = [t[2], t[0], t[1]];
    t.min(r1).min(r2)
}

#[derive(Clone, Debug)]
pub struct YGroupStructure {
    pair: SpecialPair,
    generators: Vec<[usize; 3]>,
    index: HashMap<[usize; 3], usize>,
    presentation: Presentation,
}

pub fn y_group(pair: &SpecialPair) -> Result<YGroupStructure> {
    YGroupStructure::new(pair)
}

impl YGroupStructure {
    pub fn new(pair: &SpecialPair) -> Result<Self> {
        let orders = pair.group.orders();
        let r = orders.len();
        let mut generators = Vec::new();
        let mut index = HashMap::new();
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let t = [i, j, k];
                    if canonical_rotation(t) == t {
                        index.insert(t, generators.len());
                        generators.push(t);
                    }
                }
            }
        }
        let g = generators.len();
        let at = |t: [usize; 3]| index[&canonical_rotation(t)];
        let s = pair.special.coeffs();
        let mut relations: Vec<Vec<i64>> = Vec::new();

        for i in 0..r {
            if orders[i] == 0 {
                continue;
            }
            for j in 0..r {
                for k in 0..r {
                    let mut row = vec![0; g];
                    row[at([i, j, k])] += orders[i] as i64;
                    relations.push(row);
                }
            }
        }
        // Y[e_i, e_i, e_j] = Y[s, e_i, e_j]
        for i in 0..r {
            for j in 0..r {
                let mut row = vec![0; g];
                row[at([i, i, j])] += 1;
                for (l, &sl) in s.iter().enumerate() {
                    row[at([l, i, j])] -= sl;
                }
                relations.push(row);
            }
        }
        // Y[e_i + e_j, e_i + e_j, e_k] = Y[s, e_i + e_j, e_k]
        for i in 0..r {
            for j in i + 1..r {
                for k in 0..r {
                    let mut row = vec![0; g];
                    for a in [i, j] {
                        for b in [i, j] {
                            row[at([a, b, k])] += 1;
                        }
                    }
                    for (l, &sl) in s.iter().enumerate() {
                        row[at([l, i, k])] -= sl;
                        row[at([l, j, k])] -= sl;
                    }
                    relations.push(row);
                }
            }
        }
        let presentation = Presentation::new(g, &relations)?;
        Ok(YGroupStructure { pair: pair.clone(), generators, index, presentation })
    }

    pub fn pair(&self) -> &SpecialPair {
        &self.pair
    }

    /// `𝒴(A, s)` as an abstract group.
    pub fn group(&self) -> &FgAbelianGroup {
        &self.presentation.group
    }

    pub fn invariant_factors(&self) -> Vec<u64> {
        self.group().invariant_factors()
    }

    /// Basis triples indexing the free generators of the presentation.
    pub fn generators(&self) -> &[[usize; 3]] {
        &self.generators
    }

    fn expand_into(&self, term: &YTerm, acc: &mut [i128]) -> Result<()> {
        let a = &self.pair.group;
        for c in &term.colors {
            if c.group() != a {
                return Err(Error::GroupMismatch(format!("color in {} for 𝒴 over {}", c.group(), a)));
            }
        }
        let [x, y, z] = [term.colors[0].coeffs(), term.colors[1].coeffs(), term.colors[2].coeffs()];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                for (k, &zk) in z.iter().enumerate() {
                    if zk == 0 {
                        continue;
                    }
                    let idx = self.index[&canonical_rotation([i, j, k])];
                    acc[idx] += term.sign as i128 * xi as i128 * yj as i128 * zk as i128;
                }
            }
        }
        Ok(())
    }

    /// Normal form of `Σ ±Y[a₁, a₂, a₃]` as an element of [`Self::group`].
    pub fn normal_form(&self, terms: &[YTerm]) -> Result<GroupElement> {
        let mut acc = vec![0i128; self.generators.len()];
        for t in terms {
            self.expand_into(t, &mut acc)?;
        }
        let free = acc
            .into_iter()
            .map(|v| i64::try_from(v).map_err(|_| Error::Overflow("graph-group expansion")))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.presentation.project(&free))
    }

    pub fn normal_form_of(&self, term: &YTerm) -> Result<GroupElement> {
        self.normal_form(std::slice::from_ref(term))
    }

    /// Class of the free generator `g(i, j, k)`.
    pub fn generator_class(&self, t: [usize; 3]) -> GroupElement {
        let mut free = vec![0; self.generators.len()];
        free[self.index[&canonical_rotation(t)]] = 1;
        self.presentation.project(&free)
    }

    /// Y-terms (on basis colors) whose sum has normal form `x`.
    pub fn lift(&self, x: &GroupElement) -> Vec<YTerm> {
        let a = &self.pair.group;
        self.presentation
            .lift(x)
            .into_iter()
            .zip(&self.generators)
            .filter(|(c, _)| *c != 0)
            .map(|(c, t)| YTerm::new(a.generator(t[0]).scale(c), a.generator(t[1]), a.generator(t[2])))
            .collect()
    }
}

/// `𝒴(f): 𝒴(A, s) -> 𝒴(A', s')` for a morphism `f` with `f(s) = s'`.
pub fn y_of_morphism(f: &Homomorphism, source: &YGroupStructure, target: &YGroupStructure) -> Result<Homomorphism> {
    if f.source() != source.pair.group() || f.target() != target.pair.group() {
        return Err(Error::GroupMismatch("morphism does not match the graph-group structures".into()));
    }
    if f.apply(source.pair.special())? != *target.pair.special() {
        return Err(Error::SpecialElementMismatch);
    }
    let imgs = f.images();
    let free_images = source
        .generators
        .iter()
        .map(|t| target.normal_form_of(&YTerm::new(imgs[t[0]].clone(), imgs[t[1]].clone(), imgs[t[2]].clone())))
        .collect::<Result<Vec<_>>>()?;
    let images = (0..source.group().rank())
        .map(|k| {
            let lift = source.presentation.lift(&source.group().generator(k));
            let mut acc = target.group().zero();
            for (c, img) in lift.iter().zip(&free_images) {
                if *c != 0 {
                    acc = acc.try_add(&img.scale(*c))?;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Homomorphism::new(source.group().clone(), target.group().clone(), images)
}
