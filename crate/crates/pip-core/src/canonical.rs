//! Canonical words: products R-block · L-block · E_M · σ in normal form.
//!
//! A canonical word is the data `(t_i, C_i, D_i)` for each factor plus a
//! point set `M` and a permutation `σ`, subject to: the `C_i` are pairwise
//! disjoint, the `D_i` are pairwise disjoint, `t_i ∈ C_i ∩ D_i`, and `M`
//! avoids every `C_i ∪ D_i`. Overlaps `C_i ∩ D_j` for `i ≠ j` are permitted;
//! elements such as `[[1,2,-1],[3,-2,-3]]` force them.
//!
//! Evaluation maps a canonical word to the diagram with lines
//! `C_i ∪ σ(D_i)'`, left points `(M ∪ ⋃D) \ ⋃C`, right points
//! `σ((M ∪ ⋃C) \ ⋃D)'`, and identity strands elsewhere. The point sets
//! subtract the full unions, not merely the per-factor differences: with
//! `C_i ∩ D_j` overlaps the per-factor reading would name labels that sit
//! inside another factor's line.
//!
//! Two canonical words are equivalent when their factor data and `M` agree
//! and their permutations differ by the stabilizer group `G`, the direct sum
//! of the symmetric groups on each `D_i` and on `F = (M ∪ ⋃C) \ ⋃D`.
//! Equivalent words evaluate to the same diagram, and at small rank the
//! converse is verified exhaustively by the `verify` module.

use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::presentation::{expand_e_block, expand_l_block, expand_r_block, perm_word, Word};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeSet;

/// One factor: anchor `t`, left set `C`, right preimage set `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalFactor {
    pub t: usize,
    pub c: BTreeSet<usize>,
    pub d: BTreeSet<usize>,
}

/// A validated canonical word; factors are stored sorted by `min(C_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalWord {
    n: usize,
    factors: Vec<CanonicalFactor>,
    m: BTreeSet<usize>,
    sigma: Perm,
}

impl CanonicalWord {
    pub fn new(
        n: usize,
        mut factors: Vec<CanonicalFactor>,
        m: BTreeSet<usize>,
        sigma: Perm,
    ) -> Result<Self> {
        if n < 3 {
            return Err(Error::RankTooSmall(n));
        }
        if sigma.n() != n {
            return Err(Error::RankMismatch(sigma.n(), n));
        }
        let in_range =
            |s: &BTreeSet<usize>| s.iter().all(|&x| (1..=n).contains(&x));
        let mut c_seen: BTreeSet<usize> = BTreeSet::new();
        let mut d_seen: BTreeSet<usize> = BTreeSet::new();
        for f in &factors {
            if !in_range(&f.c) || !in_range(&f.d) {
                return Err(Error::InvalidCanonical(format!(
                    "factor sets out of range 1..={n}"
                )));
            }
            if !f.c.contains(&f.t) || !f.d.contains(&f.t) {
                return Err(Error::InvalidCanonical(format!(
                    "anchor {} not in C ∩ D",
                    f.t
                )));
            }
            if !f.c.is_disjoint(&c_seen) {
                return Err(Error::InvalidCanonical("C sets overlap".into()));
            }
            if !f.d.is_disjoint(&d_seen) {
                return Err(Error::InvalidCanonical("D sets overlap".into()));
            }
            c_seen.extend(&f.c);
            d_seen.extend(&f.d);
        }
        if !in_range(&m) {
            return Err(Error::InvalidCanonical(format!("M out of range 1..={n}")));
        }
        if !m.is_disjoint(&c_seen) || !m.is_disjoint(&d_seen) {
            return Err(Error::InvalidCanonical(
                "M meets a factor's C or D".into(),
            ));
        }
        factors.sort_by_key(|f| *f.c.first().expect("C contains the anchor"));
        Ok(CanonicalWord { n, factors, m, sigma })
    }

    pub fn identity(n: usize) -> Result<Self> {
        CanonicalWord::new(n, Vec::new(), BTreeSet::new(), Perm::identity(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[CanonicalFactor] {
        &self.factors
    }

    pub fn m(&self) -> &BTreeSet<usize> {
        &self.m
    }

    pub fn sigma(&self) -> &Perm {
        &self.sigma
    }

    fn union_c(&self) -> BTreeSet<usize> {
        self.factors.iter().flat_map(|f| f.c.iter().copied()).collect()
    }

    fn union_d(&self) -> BTreeSet<usize> {
        self.factors.iter().flat_map(|f| f.d.iter().copied()).collect()
    }

    /// Expands into an atomic generator word:
    /// R-blocks, then L-blocks in the same factor order, then E_M, then σ.
    pub fn to_word(&self) -> Result<Word> {
        let n = self.n;
        let mut w = Word::empty(n)?;
        for f in &self.factors {
            let mut a = f.c.clone();
            a.remove(&f.t);
            w = w.concat(&expand_r_block(n, f.t, &a)?)?;
        }
        for f in &self.factors {
            let mut b = f.d.clone();
            b.remove(&f.t);
            w = w.concat(&expand_l_block(n, f.t, &b)?)?;
        }
        w = w.concat(&expand_e_block(n, &self.m)?)?;
        w.concat(&perm_word(&self.sigma)?)
    }

    /// Evaluates directly through the image formula, without expanding to a
    /// word. Agrees with `to_word().eval()`.
    pub fn eval(&self) -> Diagram {
        let n = self.n;
        let uc = self.union_c();
        let ud = self.union_d();
        let mut blocks: Vec<Vec<i32>> = Vec::new();
        for f in &self.factors {
            let mut block: Vec<i32> = f.c.iter().map(|&x| x as i32).collect();
            block.extend(f.d.iter().map(|&d| -(self.sigma.apply(d) as i32)));
            blocks.push(block);
        }
        for x in self.m.union(&ud) {
            if !uc.contains(x) {
                blocks.push(vec![*x as i32]);
            }
        }
        for x in self.m.union(&uc) {
            if !ud.contains(x) {
                blocks.push(vec![-(self.sigma.apply(*x) as i32)]);
            }
        }
        for x in 1..=n {
            if !uc.contains(&x) && !ud.contains(&x) && !self.m.contains(&x) {
                blocks.push(vec![x as i32, -(self.sigma.apply(x) as i32)]);
            }
        }
        Diagram::new(n, blocks).expect("image formula yields a valid partition")
    }

    /// Equivalence: factor data and `M` agree, and the permutations differ
    /// by an element of the stabilizer group. Anchors `t_i` are irrelevant.
    pub fn equivalent(&self, other: &CanonicalWord) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::RankMismatch(self.n, other.n));
        }
        if self.factors.len() != other.factors.len() || self.m != other.m {
            return Ok(false);
        }
        // factors are sorted by min(C) and the C's are disjoint, so the
        // matching of factors, when it exists, is the positional one
        for (a, b) in self.factors.iter().zip(&other.factors) {
            if a.c != b.c || a.d != b.d {
                return Ok(false);
            }
        }
        let g = self.sigma.compose(&other.sigma.inverse());
        Ok(StabilizerSpec::of(self).contains(&g))
    }

    /// Replaces σ by the canonical representative of its stabilizer coset:
    /// ascending-to-ascending on each `D_i` and on `F`. Value-preserving.
    pub fn with_canonical_sigma(&self) -> CanonicalWord {
        let n = self.n;
        let spec = StabilizerSpec::of(self);
        let mut images = vec![0usize; n];
        for d in &spec.d_list {
            let targets: BTreeSet<usize> = d.iter().map(|&x| self.sigma.apply(x)).collect();
            for (&x, &y) in d.iter().zip(targets.iter()) {
                images[x - 1] = y;
            }
        }
        let targets: BTreeSet<usize> = spec.f.iter().map(|&x| self.sigma.apply(x)).collect();
        for (&x, &y) in spec.f.iter().zip(targets.iter()) {
            images[x - 1] = y;
        }
        for x in 1..=n {
            if images[x - 1] == 0 {
                images[x - 1] = self.sigma.apply(x);
            }
        }
        let sigma = Perm::from_images(images).expect("blockwise rebuild is a bijection");
        CanonicalWord { n, factors: self.factors.clone(), m: self.m.clone(), sigma }
    }

    /// Deterministic extraction: a canonical word evaluating to `a`.
    pub fn of_diagram(a: &Diagram) -> Result<CanonicalWord> {
        let n = a.n();
        if n < 3 {
            return Err(Error::RankTooSmall(n));
        }
        // classify blocks
        let mut raw_factors: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = Vec::new();
        let mut strands: Vec<(usize, usize)> = Vec::new();
        let mut left_points: BTreeSet<usize> = BTreeSet::new();
        let mut right_points: BTreeSet<usize> = BTreeSet::new();
        for block in a.blocks() {
            let pos: BTreeSet<usize> = block.iter().filter(|&&x| x > 0).map(|&x| x as usize).collect();
            let neg: BTreeSet<usize> = block.iter().filter(|&&x| x < 0).map(|&x| -x as usize).collect();
            if block.len() == 1 {
                if let Some(&x) = pos.first() {
                    left_points.insert(x);
                } else {
                    right_points.insert(*neg.first().expect("point is signed"));
                }
            } else if pos.len() == 1 && neg.len() == 1 {
                strands.push((*pos.first().unwrap(), *neg.first().unwrap()));
            } else {
                raw_factors.push((pos, neg));
            }
        }
        raw_factors.sort_by_key(|(c, _)| *c.first().expect("line has a positive label"));

        // greedy right-preimage fill: seed each D with the anchor, then draw
        // from own C, then left points, then other C's, ascending
        let anchors: Vec<usize> = raw_factors
            .iter()
            .map(|(c, _)| *c.first().expect("nonempty"))
            .collect();
        let mut used: BTreeSet<usize> = anchors.iter().copied().collect();
        let all_c: BTreeSet<usize> = raw_factors.iter().flat_map(|(c, _)| c.iter().copied()).collect();
        let mut d_sets: Vec<BTreeSet<usize>> = Vec::new();
        for (i, (c, v)) in raw_factors.iter().enumerate() {
            let t = anchors[i];
            let mut d: BTreeSet<usize> = [t].into();
            let mut need = v.len().checked_sub(1).expect("line has a negative label");
            let draw = |pool: &BTreeSet<usize>, need: &mut usize, d: &mut BTreeSet<usize>, used: &mut BTreeSet<usize>| {
                for &x in pool.iter() {
                    if *need == 0 {
                        break;
                    }
                    if !used.contains(&x) {
                        used.insert(x);
                        d.insert(x);
                        *need -= 1;
                    }
                }
            };
            draw(c, &mut need, &mut d, &mut used);
            draw(&left_points, &mut need, &mut d, &mut used);
            draw(&all_c, &mut need, &mut d, &mut used);
            if need > 0 {
                return Err(Error::InvalidCanonical(
                    "extraction pool exhausted; diagram violates the counting identity".into(),
                ));
            }
            d_sets.push(d);
        }

        let union_d: BTreeSet<usize> = d_sets.iter().flatten().copied().collect();
        let m: BTreeSet<usize> = left_points.difference(&union_d).copied().collect();

        // σ: ascending-to-ascending on each D and on the right-point
        // preimage, partner mapping on strands
        let mut images = vec![0usize; n];
        for (d, (_, v)) in d_sets.iter().zip(&raw_factors) {
            for (&x, &y) in d.iter().zip(v.iter()) {
                images[x - 1] = y;
            }
        }
        let k2pre: BTreeSet<usize> = m
            .union(&all_c)
            .copied()
            .filter(|x| !union_d.contains(x))
            .collect();
        for (&x, &y) in k2pre.iter().zip(right_points.iter()) {
            images[x - 1] = y;
        }
        for &(x, y) in &strands {
            images[x - 1] = y;
        }
        let sigma = Perm::from_images(images)
            .map_err(|_| Error::InvalidCanonical("extraction produced a non-bijection".into()))?;

        let factors = raw_factors
            .into_iter()
            .zip(anchors)
            .zip(d_sets)
            .map(|(((c, _), t), d)| CanonicalFactor { t, c, d })
            .collect();
        CanonicalWord::new(n, factors, m, sigma)
    }

    /// Parses the text format `s=<k>;(t|C|D);…;M=<set>;sigma=<one-line>`.
    pub fn parse(text: &str, n: usize) -> Result<CanonicalWord> {
        let mut segments = text.split(';').map(str::trim);
        let err = |msg: &str| Error::Parse(format!("bad canonical word {text:?}: {msg}"));
        let head = segments.next().ok_or_else(|| err("empty input"))?;
        let s: usize = head
            .strip_prefix("s=")
            .ok_or_else(|| err("missing s="))?
            .trim()
            .parse()
            .map_err(|_| err("bad factor count"))?;
        let parse_set = |t: &str| -> Result<BTreeSet<usize>> {
            if t.trim().is_empty() {
                return Ok(BTreeSet::new());
            }
            t.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| err(&format!("bad index {x:?}")))
                })
                .collect()
        };
        let mut factors = Vec::with_capacity(s);
        for _ in 0..s {
            let seg = segments.next().ok_or_else(|| err("missing factor"))?;
            let inner = seg
                .strip_prefix('(')
                .and_then(|x| x.strip_suffix(')'))
                .ok_or_else(|| err("factor not parenthesized"))?;
            let mut parts = inner.split('|');
            let t: usize = parts
                .next()
                .ok_or_else(|| err("missing anchor"))?
                .trim()
                .parse()
                .map_err(|_| err("bad anchor"))?;
            let c = parse_set(parts.next().ok_or_else(|| err("missing C"))?)?;
            let d = parse_set(parts.next().ok_or_else(|| err("missing D"))?)?;
            if parts.next().is_some() {
                return Err(err("too many factor fields"));
            }
            factors.push(CanonicalFactor { t, c, d });
        }
        let mseg = segments.next().ok_or_else(|| err("missing M"))?;
        let m = parse_set(mseg.strip_prefix("M=").ok_or_else(|| err("missing M="))?)?;
        let sseg = segments.next().ok_or_else(|| err("missing sigma"))?;
        let images_text = sseg
            .strip_prefix("sigma=")
            .ok_or_else(|| err("missing sigma="))?;
        let images: Vec<usize> = images_text
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| err(&format!("bad sigma entry {x:?}")))
            })
            .collect::<Result<_>>()?;
        if segments.next().is_some_and(|t| !t.is_empty()) {
            return Err(err("trailing segments"));
        }
        let sigma = Perm::from_images(images)?;
        if sigma.n() != n {
            return Err(Error::RankMismatch(sigma.n(), n));
        }
        CanonicalWord::new(n, factors, m, sigma)
    }
}

impl std::fmt::Display for CanonicalWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |s: &BTreeSet<usize>| {
            s.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        };
        write!(f, "s={}", self.factors.len())?;
        for fac in &self.factors {
            write!(f, ";({}|{}|{})", fac.t, join(&fac.c), join(&fac.d))?;
        }
        write!(f, ";M={};sigma={}", join(&self.m), self.sigma)
    }
}

/// The stabilizer group `G = S_{D_1} ⊕ … ⊕ S_{D_s} ⊕ S_F` of a canonical
/// word's permutation-free prefix. All blocks are pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerSpec {
    n: usize,
    d_list: Vec<BTreeSet<usize>>,
    f: BTreeSet<usize>,
}

impl StabilizerSpec {
    pub fn new(n: usize, d_list: Vec<BTreeSet<usize>>, f: BTreeSet<usize>) -> Result<Self> {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for block in d_list.iter().chain(std::iter::once(&f)) {
            if !block.is_disjoint(&seen) {
                return Err(Error::InvalidCanonical(
                    "stabilizer blocks must be pairwise disjoint".into(),
                ));
            }
            if block.iter().any(|&x| x < 1 || x > n) {
                return Err(Error::InvalidCanonical("stabilizer block out of range".into()));
            }
            seen.extend(block);
        }
        Ok(StabilizerSpec { n, d_list, f })
    }

    /// The stabilizer of a canonical word: the `D_i` blocks together with
    /// `F = (M ∪ ⋃C) \ ⋃D`, which is disjoint from every `D_i` by
    /// construction and reduces to `M ∪ ⋃(C_i \ D_i)` when no factor's `C`
    /// meets another factor's `D`.
    pub fn of(cw: &CanonicalWord) -> StabilizerSpec {
        let ud = cw.union_d();
        let f: BTreeSet<usize> = cw
            .m
            .union(&cw.union_c())
            .copied()
            .filter(|x| !ud.contains(x))
            .collect();
        let d_list = cw.factors.iter().map(|fac| fac.d.clone()).collect();
        StabilizerSpec::new(cw.n, d_list, f).expect("D's disjoint and F avoids them")
    }

    pub fn d_list(&self) -> &[BTreeSet<usize>] {
        &self.d_list
    }

    pub fn f(&self) -> &BTreeSet<usize> {
        &self.f
    }

    /// Membership: maps each block into itself and fixes everything else.
    pub fn contains(&self, g: &Perm) -> bool {
        if g.n() != self.n {
            return false;
        }
        for x in 1..=self.n {
            let y = g.apply(x);
            if let Some(block) = self.d_list.iter().find(|d| d.contains(&x)) {
                if !block.contains(&y) {
                    return false;
                }
            } else if self.f.contains(&x) {
                if !self.f.contains(&y) {
                    return false;
                }
            } else if y != x {
                return false;
            }
        }
        true
    }

    /// A uniformly random element: independent shuffles within each block.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Perm {
        let mut images: Vec<usize> = (1..=self.n).collect();
        for block in self.d_list.iter().chain(std::iter::once(&self.f)) {
            let xs: Vec<usize> = block.iter().copied().collect();
            let mut ys = xs.clone();
            ys.shuffle(rng);
            for (&x, &y) in xs.iter().zip(&ys) {
                images[x - 1] = y;
            }
        }
        Perm::from_images(images).expect("blockwise shuffle is a bijection")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    fn cw(
        n: usize,
        factors: &[(usize, &[usize], &[usize])],
        m: &[usize],
        sigma: Perm,
    ) -> CanonicalWord {
        let factors = factors
            .iter()
            .map(|&(t, c, d)| CanonicalFactor { t, c: set(c), d: set(d) })
            .collect();
        CanonicalWord::new(n, factors, set(m), sigma).unwrap()
    }

    /// Random valid canonical word, overlaps between C's and D's included.
    pub(crate) fn random_canonical<R: Rng>(n: usize, rng: &mut R) -> CanonicalWord {
        loop {
            let s = rng.gen_range(0..=n.min(3));
            let mut pool: Vec<usize> = (1..=n).collect();
            pool.shuffle(rng);
            let anchors: Vec<usize> = pool[..s].to_vec();
            let mut c_sets: Vec<BTreeSet<usize>> =
                anchors.iter().map(|&t| set(&[t])).collect();
            let mut d_sets = c_sets.clone();
            for &x in &pool[s..] {
                let pick = rng.gen_range(0..=s);
                if pick < s {
                    c_sets[pick].insert(x);
                }
            }
            for &x in &pool[s..] {
                let pick = rng.gen_range(0..=s);
                if pick < s {
                    d_sets[pick].insert(x);
                }
            }
            let covered: BTreeSet<usize> = c_sets
                .iter()
                .chain(&d_sets)
                .flatten()
                .copied()
                .collect();
            let m: BTreeSet<usize> = (1..=n)
                .filter(|x| !covered.contains(x) && rng.gen_bool(0.3))
                .collect();
            let factors: Vec<CanonicalFactor> = anchors
                .into_iter()
                .zip(c_sets)
                .zip(d_sets)
                .map(|((t, c), d)| CanonicalFactor { t, c, d })
                .collect();
            if let Ok(w) = CanonicalWord::new(n, factors, m, Perm::random(n, rng)) {
                return w;
            }
        }
    }

    #[test]
    fn to_word_examples() {
        let empty = CanonicalWord::identity(3).unwrap();
        assert!(empty.to_word().unwrap().is_empty());

        let w = cw(3, &[(1, &[1], &[1, 2])], &[], Perm::identity(3));
        assert_eq!(w.to_word().unwrap(), Word::parse("l1", 3).unwrap());

        let w = cw(3, &[(1, &[1, 2], &[1, 2])], &[], Perm::identity(3));
        assert_eq!(w.to_word().unwrap(), Word::parse("r1 l1", 3).unwrap());
    }

    #[test]
    fn eval_examples() {
        let w = cw(3, &[], &[2], Perm::identity(3));
        assert_eq!(w.eval(), Diagram::generator_eps(3, 2).unwrap());

        let w = cw(3, &[(1, &[1], &[1, 2])], &[], Perm::identity(3));
        assert_eq!(w.eval(), Diagram::generator_l(3, 1, 2).unwrap());

        // overlapping C/D across factors exercises the corrected point sets
        let w = cw(
            3,
            &[(1, &[1, 2], &[1]), (3, &[3], &[2, 3])],
            &[],
            Perm::identity(3),
        );
        let expected = Diagram::new(3, vec![vec![1, 2, -1], vec![3, -2, -3]]).unwrap();
        assert_eq!(w.eval(), expected);
    }

    #[test]
    fn eval_agrees_with_word_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 3..=6 {
            for _ in 0..150 {
                let w = random_canonical(n, &mut rng);
                assert_eq!(w.eval(), w.to_word().unwrap().eval(), "cw {w}");
            }
        }
    }

    #[test]
    fn equivalence_examples() {
        let a = cw(3, &[(1, &[1, 2], &[1, 2])], &[], Perm::identity(3));
        assert!(a.equivalent(&a).unwrap());
        let b = cw(
            3,
            &[(1, &[1, 2], &[1, 2])],
            &[],
            Perm::transposition(3, 1, 2).unwrap(),
        );
        assert!(a.equivalent(&b).unwrap());
        assert_eq!(a.eval(), b.eval());

        let m1 = cw(3, &[], &[1], Perm::identity(3));
        let m2 = cw(3, &[], &[2], Perm::identity(3));
        assert!(!m1.equivalent(&m2).unwrap());

        let wide = cw(4, &[], &[1], Perm::identity(4));
        assert!(m1.equivalent(&wide).is_err());
    }

    #[test]
    fn anchors_do_not_affect_equivalence() {
        let a = cw(3, &[(1, &[1, 2], &[1, 2])], &[], Perm::identity(3));
        let b = cw(3, &[(2, &[1, 2], &[1, 2])], &[], Perm::identity(3));
        assert!(a.equivalent(&b).unwrap());
        assert_eq!(a.eval(), b.eval());
    }

    #[test]
    fn equivalent_words_have_equal_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 3..=5 {
            for _ in 0..200 {
                let a = random_canonical(n, &mut rng);
                let g = StabilizerSpec::of(&a).random_element(&mut rng);
                // choose σ₂ with σ₁∘σ₂⁻¹ = g
                let sigma2 = g.inverse().compose(a.sigma());
                let b = CanonicalWord::new(
                    n,
                    a.factors().to_vec(),
                    a.m().clone(),
                    sigma2,
                )
                .unwrap();
                assert!(a.equivalent(&b).unwrap());
                assert_eq!(a.eval(), b.eval(), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn stabilizer_fixes_values_from_the_right() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 3..=5 {
            for _ in 0..200 {
                let mut a = random_canonical(n, &mut rng);
                a = CanonicalWord::new(n, a.factors().to_vec(), a.m().clone(), Perm::identity(n))
                    .unwrap();
                let g = StabilizerSpec::of(&a).random_element(&mut rng);
                let lhs = a.eval().multiply(&Diagram::perm_diagram(&g)).unwrap();
                assert_eq!(lhs, a.eval());
            }
        }
    }

    #[test]
    fn stabilizer_blocks_must_be_disjoint() {
        assert!(StabilizerSpec::new(4, vec![set(&[1, 2]), set(&[2, 3])], set(&[])).is_err());
        assert!(StabilizerSpec::new(4, vec![set(&[1, 2])], set(&[2])).is_err());
        assert!(StabilizerSpec::new(4, vec![set(&[1, 2])], set(&[3, 4])).is_ok());
    }

    #[test]
    fn extraction_examples() {
        let id = CanonicalWord::of_diagram(&Diagram::identity(3)).unwrap();
        assert!(id.factors().is_empty());
        assert!(id.m().is_empty());
        assert!(id.sigma().is_identity());

        let eps2 = CanonicalWord::of_diagram(&Diagram::generator_eps(3, 2).unwrap()).unwrap();
        assert!(eps2.factors().is_empty());
        assert_eq!(eps2.m(), &set(&[2]));
        assert!(eps2.sigma().is_identity());

        let d = Diagram::new(3, vec![vec![1, 2, -1], vec![3, -2, -3]]).unwrap();
        let w = CanonicalWord::of_diagram(&d).unwrap();
        assert_eq!(
            w.factors(),
            &[
                CanonicalFactor { t: 1, c: set(&[1, 2]), d: set(&[1]) },
                CanonicalFactor { t: 3, c: set(&[3]), d: set(&[2, 3]) },
            ]
        );
        assert!(w.m().is_empty());
        assert!(w.sigma().is_identity());
        assert_eq!(w.eval(), d);
    }

    #[test]
    fn extraction_round_trips_on_random_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for n in 3..=5 {
            for _ in 0..200 {
                let w = crate::presentation::tests::random_word(n, 15, &mut rng);
                let d = w.eval();
                let cw = CanonicalWord::of_diagram(&d).unwrap();
                assert_eq!(cw.eval(), d, "diagram {d}");
            }
        }
    }

    #[test]
    fn sigma_canonicalization_preserves_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for n in 3..=5 {
            for _ in 0..200 {
                let a = random_canonical(n, &mut rng);
                let b = a.with_canonical_sigma();
                assert_eq!(a.eval(), b.eval());
                assert!(a.equivalent(&b).unwrap());
            }
        }
    }

    #[test]
    fn text_format_round_trip() {
        let w = cw(
            3,
            &[(1, &[1, 2], &[1, 2])],
            &[3],
            Perm::identity(3),
        );
        assert_eq!(w.to_string(), "s=1;(1|1,2|1,2);M=3;sigma=1,2,3");
        assert_eq!(CanonicalWord::parse(&w.to_string(), 3).unwrap(), w);

        let empty = CanonicalWord::identity(3).unwrap();
        assert_eq!(empty.to_string(), "s=0;M=;sigma=1,2,3");
        assert_eq!(CanonicalWord::parse(&empty.to_string(), 3).unwrap(), empty);

        assert!(CanonicalWord::parse("s=1;M=;sigma=1,2,3", 3).is_err());
        assert!(CanonicalWord::parse("nonsense", 3).is_err());
    }

    #[test]
    fn rejects_invalid_canonical_data() {
        // anchor outside C ∩ D
        assert!(CanonicalWord::new(
            3,
            vec![CanonicalFactor { t: 2, c: set(&[1]), d: set(&[1, 2]) }],
            set(&[]),
            Perm::identity(3),
        )
        .is_err());
        // overlapping C's
        assert!(CanonicalWord::new(
            3,
            vec![
                CanonicalFactor { t: 1, c: set(&[1, 2]), d: set(&[1]) },
                CanonicalFactor { t: 2, c: set(&[2, 3]), d: set(&[2]) },
            ],
            set(&[]),
            Perm::identity(3),
        )
        .is_err());
        // M meets a D
        assert!(CanonicalWord::new(
            3,
            vec![CanonicalFactor { t: 1, c: set(&[1]), d: set(&[1, 2]) }],
            set(&[2]),
            Perm::identity(3),
        )
        .is_err());
    }
}
