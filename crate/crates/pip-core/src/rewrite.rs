//! Staged rewriting of generator words to canonical form.
//!
//! The pipeline mirrors the derivation of the canonical form:
//!
//! 1. [`to_factor_form`]: a left-to-right scan converts every letter to a
//!    conjugated factor λ_{p,q} / ρ_{p,q} / e_p, transporting indices
//!    through the accumulated permutation, with e's kept as a set right of
//!    the factors and the group element as a trailing permutation.
//! 2. [`sort_factors`]: eliminates every λ…ρ inversion with the matching
//!    product relation; transposition byproducts fold into the tail and
//!    e byproducts travel right through the remaining factors.
//! 3. [`dedupe_factors`]: merges the ρ-run and the λ-run into anchored
//!    groups R_{p,A} / L_{q,B} with pairwise disjoint supports.
//! 4. [`enforce_disjointness`]: removes ρ-anchors living inside λ-sets,
//!    λ-anchors living inside ρ-sets, and e-indices touching any group.
//! 5. Assembly into a [`CanonicalWord`], with the trailing permutation
//!    reduced to its canonical stabilizer-coset representative.
//!
//! Every micro-step applies a single relation instance to adjacent factors,
//! so each stage preserves the evaluated diagram; the tests check exactly
//! that. A fuel budget bounds the total number of rule applications, and
//! running out signals a rewriting defect rather than a semantic failure.

use crate::canonical::{CanonicalFactor, CanonicalWord};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::presentation::{
    expand_e_block, expand_lambda, expand_rho, perm_word, GenKind, Word,
};
use std::collections::BTreeSet;

/// The two conjugated factor kinds appearing in intermediate forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    Rho,
    Lambda,
}

/// A conjugated factor ρ_{p,q} or λ_{p,q}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factor {
    pub kind: FactorKind,
    pub p: usize,
    pub q: usize,
}

impl Factor {
    fn rho(p: usize, q: usize) -> Self {
        Factor { kind: FactorKind::Rho, p, q }
    }
    fn lambda(p: usize, q: usize) -> Self {
        Factor { kind: FactorKind::Lambda, p, q }
    }
}

/// An intermediate form: a run of conjugated factors, then a set of e's,
/// then a trailing permutation. The represented element is the product
/// `factors · E · tail`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorForm {
    n: usize,
    factors: Vec<Factor>,
    e_set: BTreeSet<usize>,
    tail: Perm,
}

impl FactorForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn rho_factors(&self) -> Vec<(usize, usize)> {
        self.factors
            .iter()
            .filter(|f| f.kind == FactorKind::Rho)
            .map(|f| (f.p, f.q))
            .collect()
    }

    pub fn lambda_factors(&self) -> Vec<(usize, usize)> {
        self.factors
            .iter()
            .filter(|f| f.kind == FactorKind::Lambda)
            .map(|f| (f.p, f.q))
            .collect()
    }

    pub fn e_set(&self) -> &BTreeSet<usize> {
        &self.e_set
    }

    pub fn tail(&self) -> &Perm {
        &self.tail
    }

    /// Expands back into an atomic word; used to check value preservation.
    pub fn to_word(&self) -> Result<Word> {
        let n = self.n;
        let mut w = Word::empty(n)?;
        for f in &self.factors {
            let factor_word = match f.kind {
                FactorKind::Rho => expand_rho(n, f.p, f.q)?,
                FactorKind::Lambda => expand_lambda(n, f.p, f.q)?,
            };
            w = w.concat(&factor_word)?;
        }
        w = w.concat(&expand_e_block(n, &self.e_set)?)?;
        w.concat(&perm_word(&self.tail)?)
    }

    pub fn eval(&self) -> Diagram {
        self.to_word().expect("form indices are in range").eval()
    }
}

struct Fuel {
    left: usize,
    total: usize,
}

impl Fuel {
    fn new(total: usize) -> Self {
        Fuel { left: total, total }
    }

    fn spend(&mut self) -> Result<()> {
        if self.left == 0 {
            return Err(Error::FuelExhausted(self.total));
        }
        self.left -= 1;
        Ok(())
    }
}

/// The default rewrite budget for a word: `10·(|w| + n)²`.
pub fn default_fuel(w: &Word) -> usize {
    10 * (w.len() + w.n()).pow(2)
}

fn stage_fuel(form: &FactorForm) -> usize {
    10 * (form.factors.len() + form.n + form.e_set.len() + 1).pow(2)
}

/// Pushes `e_a` rightward from index `start` through a factor run.
///
/// Interactions from the left: e_q λ_{p,q} absorbs the e; e_p λ_{p,q} kills
/// the factor and spawns e_q; an e meeting either index of a ρ kills it and
/// spawns the complementary e. Survivors land in `e_set`.
fn push_e(factors: &mut Vec<Factor>, start: usize, a: usize, e_set: &mut BTreeSet<usize>) {
    let mut queue = vec![(start, a)];
    while let Some((mut i, cur)) = queue.pop() {
        loop {
            if i >= factors.len() {
                e_set.insert(cur);
                break;
            }
            let f = factors[i];
            match f.kind {
                FactorKind::Lambda => {
                    if cur == f.q {
                        break; // absorbed
                    }
                    if cur == f.p {
                        factors.remove(i);
                        queue.push((i, f.q));
                        continue;
                    }
                    i += 1;
                }
                FactorKind::Rho => {
                    if cur == f.p || cur == f.q {
                        factors.remove(i);
                        let other = if cur == f.p { f.q } else { f.p };
                        queue.push((i, other));
                        continue;
                    }
                    i += 1;
                }
            }
        }
    }
}

/// Renames factor indices from `from` on, the e-set, and the tail by the
/// transposition (a b): a transposition byproduct moving right to the tail.
fn fold_transposition(
    factors: &mut [Factor],
    from: usize,
    a: usize,
    b: usize,
    e_set: &mut BTreeSet<usize>,
    tail: &mut Perm,
) {
    let swap = |x: usize| {
        if x == a {
            b
        } else if x == b {
            a
        } else {
            x
        }
    };
    for f in &mut factors[from..] {
        f.p = swap(f.p);
        f.q = swap(f.q);
    }
    *e_set = e_set.iter().map(|&x| swap(x)).collect();
    let t = Perm::transposition(tail.n(), a, b).expect("distinct in-range indices");
    *tail = t.compose(tail);
}

/// Lemma-rewr1 conversion: one pass turning letters into transported
/// factors, with e's recorded in the trailing set and an immediate
/// cancellation of adjacent λ_{p,q} ρ_{p,q} pairs into e_q.
pub fn to_factor_form(w: &Word) -> FactorForm {
    let n = w.n();
    let mut factors: Vec<Factor> = Vec::new();
    let mut e_set: BTreeSet<usize> = BTreeSet::new();
    let mut tail = Perm::identity(n);
    let mut tail_inv = Perm::identity(n);

    let push_factor = |factors: &mut Vec<Factor>,
                           e_set: &mut BTreeSet<usize>,
                           kind: FactorKind,
                           p: usize,
                           q: usize| {
        // cross the e-set leftward
        match kind {
            FactorKind::Lambda => {
                if e_set.contains(&p) {
                    e_set.insert(q);
                    return;
                }
                if e_set.contains(&q) {
                    e_set.remove(&q);
                }
            }
            FactorKind::Rho => {
                if e_set.contains(&p) || e_set.contains(&q) {
                    e_set.insert(p);
                    e_set.insert(q);
                    return;
                }
            }
        }
        if kind == FactorKind::Rho {
            if let Some(last) = factors.last() {
                if last.kind == FactorKind::Lambda && last.p == p && last.q == q {
                    factors.pop();
                    e_set.insert(q);
                    return;
                }
            }
        }
        factors.push(Factor { kind, p, q });
    };

    for letter in w.letters() {
        let i = letter.index;
        match letter.kind {
            GenKind::Sigma => {
                let t = Perm::transposition(n, i, i + 1).expect("validated index");
                tail = tail.compose(&t);
                tail_inv = t.compose(&tail_inv);
            }
            GenKind::Lambda => {
                let (p, q) = (tail_inv.apply(i), tail_inv.apply(i + 1));
                push_factor(&mut factors, &mut e_set, FactorKind::Lambda, p, q);
            }
            GenKind::Rho => {
                let (p, q) = (tail_inv.apply(i), tail_inv.apply(i + 1));
                push_factor(&mut factors, &mut e_set, FactorKind::Rho, p, q);
            }
            GenKind::E => {
                e_set.insert(tail_inv.apply(i));
            }
        }
    }
    FactorForm { n, factors, e_set, tail }
}

/// Lemma-rewr2 sorting: removes every adjacent λ·ρ inversion.
pub fn sort_factors(form: FactorForm) -> Result<FactorForm> {
    let budget = stage_fuel(&form);
    sort_factors_fueled(form, &mut Fuel::new(budget))
}

fn sort_factors_fueled(mut form: FactorForm, fuel: &mut Fuel) -> Result<FactorForm> {
    let factors = &mut form.factors;
    loop {
        let pos = (0..factors.len().saturating_sub(1)).find(|&i| {
            factors[i].kind == FactorKind::Lambda && factors[i + 1].kind == FactorKind::Rho
        });
        let Some(i) = pos else { break };
        fuel.spend()?;
        let l = factors[i];
        let r = factors[i + 1];
        let (k, el) = (l.p, l.q);
        let (p, q) = (r.p, r.q);
        factors.drain(i..=i + 1);
        if k != p && k != q && el != p && el != q {
            // disjoint factors commute
            factors.insert(i, l);
            factors.insert(i, r);
        } else if (k, el) == (p, q) {
            // λ_{k,l} ρ_{k,l} = e_l
            push_e(factors, i, el, &mut form.e_set);
        } else if (k, el) == (q, p) {
            // λ_{k,l} ρ_{l,k} = e_l σ_{k,l}
            fold_transposition(factors, i, k, el, &mut form.e_set, &mut form.tail);
            push_e(factors, i, el, &mut form.e_set);
        } else if k == p {
            // λ_{k,l} ρ_{k,q} = ρ_{k,q} λ_{k,l}
            factors.insert(i, l);
            factors.insert(i, r);
        } else if el == q {
            // λ_{k,l} ρ_{p,l} = e_l ρ_{k,p} λ_{k,p}
            factors.insert(i, Factor::lambda(k, p));
            factors.insert(i, Factor::rho(k, p));
            push_e(factors, i, el, &mut form.e_set);
        } else if k == q {
            // λ_{k,l} ρ_{p,k} = ρ_{p,k} λ_{p,k} e_l σ_{k,l}
            factors.insert(i, Factor::lambda(p, k));
            factors.insert(i, Factor::rho(p, k));
            fold_transposition(factors, i + 2, k, el, &mut form.e_set, &mut form.tail);
            push_e(factors, i + 2, el, &mut form.e_set);
        } else {
            // el == p: λ_{k,l} ρ_{l,q} = e_l ρ_{k,q} λ_{k,q} σ_{l,q}
            debug_assert_eq!(el, p);
            factors.insert(i, Factor::lambda(k, q));
            factors.insert(i, Factor::rho(k, q));
            fold_transposition(factors, i + 2, el, q, &mut form.e_set, &mut form.tail);
            push_e(factors, i, el, &mut form.e_set);
        }
    }
    Ok(form)
}

/// Ordered anchored groups, supports pairwise disjoint.
type Groups = Vec<(usize, BTreeSet<usize>)>;

fn support_hit(groups: &Groups, x: usize, y: usize) -> Option<usize> {
    groups
        .iter()
        .rposition(|(p, a)| *p == x || *p == y || a.contains(&x) || a.contains(&y))
}

/// Lemma-rewr3 deduplication: groups the ρ-run and the λ-run into factors
/// R_{p,A} / L_{q,B} whose supports are pairwise disjoint. Expects every
/// ρ before every λ.
pub fn dedupe_factors(form: FactorForm) -> Result<FactorForm> {
    let budget = stage_fuel(&form);
    dedupe_factors_fueled(form, &mut Fuel::new(budget))
}

fn dedupe_factors_fueled(mut form: FactorForm, fuel: &mut Fuel) -> Result<FactorForm> {
    let split = form
        .factors
        .iter()
        .position(|f| f.kind == FactorKind::Lambda)
        .unwrap_or(form.factors.len());
    if form.factors[split..].iter().any(|f| f.kind == FactorKind::Rho) {
        return Err(Error::Unsupported(
            "dedupe requires all ρ-factors before all λ-factors".into(),
        ));
    }

    // ρ-run: insert factors into groups; emitted e's sit between the groups
    // and the not-yet-processed raws
    let mut rho_groups: Groups = Vec::new();
    let mut pending: BTreeSet<usize> = BTreeSet::new();
    for idx in 0..split {
        let f = form.factors[idx];
        if pending.contains(&f.p) || pending.contains(&f.q) {
            fuel.spend()?;
            pending.insert(f.p);
            pending.insert(f.q);
            continue;
        }
        insert_rho(&mut rho_groups, &mut pending, f.p, f.q, fuel)?;
    }

    // the pending e's now cross the untouched λ-run
    let mut lambda_raws: Vec<Factor> = form.factors[split..].to_vec();
    for a in std::mem::take(&mut pending) {
        push_e(&mut lambda_raws, 0, a, &mut form.e_set);
    }

    // λ-run
    let mut lambda_groups: Groups = Vec::new();
    for f in lambda_raws {
        if pending.contains(&f.p) {
            fuel.spend()?;
            pending.insert(f.q);
            continue;
        }
        if pending.remove(&f.q) {
            fuel.spend()?;
        }
        insert_lambda(&mut lambda_groups, &mut pending, f.p, f.q, fuel)?;
    }
    form.e_set.extend(pending);

    form.factors = flatten_groups(&rho_groups, &lambda_groups);
    Ok(form)
}

fn flatten_groups(rho_groups: &Groups, lambda_groups: &Groups) -> Vec<Factor> {
    let mut factors = Vec::new();
    for (p, a) in rho_groups {
        factors.extend(a.iter().map(|&x| Factor::rho(*p, x)));
    }
    for (q, b) in lambda_groups {
        factors.extend(b.iter().map(|&x| Factor::lambda(*q, x)));
    }
    factors
}

fn insert_rho(
    groups: &mut Groups,
    pending: &mut BTreeSet<usize>,
    x: usize,
    y: usize,
    fuel: &mut Fuel,
) -> Result<()> {
    let Some(gi) = support_hit(groups, x, y) else {
        groups.push((x, [y].into()));
        return Ok(());
    };
    fuel.spend()?;
    let (p, ref a) = groups[gi];
    if x == p {
        if a.contains(&y) {
            // ρ_{p,y} ρ_{p,y} = e_p e_y
            groups[gi].1.remove(&y);
            pending.insert(p);
            pending.insert(y);
            if groups[gi].1.is_empty() {
                groups.remove(gi);
            }
        } else {
            // joining factor ρ_{p,y}; settle y against the groups to the left
            match (0..gi).rev().find(|&j| {
                groups[j].0 == y || groups[j].1.contains(&y)
            }) {
                None => {
                    groups[gi].1.insert(y);
                }
                Some(gj) if groups[gj].0 == y => {
                    // whole left group re-anchors to p and merges in
                    let (py, ay) = groups.remove(gj);
                    let gi = gi - 1;
                    groups[gi].1.insert(py);
                    groups[gi].1.extend(ay);
                }
                Some(gj) => {
                    // shared second index: the joining factor dies
                    debug_assert!(groups[gj].1.contains(&y));
                    pending.insert(p);
                }
            }
        }
    } else if a.contains(&x) {
        if y == p {
            // ρ_{p,x} ρ_{x,p} = e_p e_x
            groups[gi].1.remove(&x);
            pending.insert(p);
            pending.insert(x);
            if groups[gi].1.is_empty() {
                groups.remove(gi);
            }
        } else {
            // ρ_{p,x} ρ_{x,y} = e_y ρ_{p,x}
            pending.insert(y);
        }
    } else if y == p {
        // R_{p,A} ρ_{x,p} = ρ_{x,p} R_{x,A}: the group re-anchors to x
        let (_, mut set) = groups.remove(gi);
        set.insert(p);
        match (0..gi).rev().find(|&j| groups[j].0 == x || groups[j].1.contains(&x)) {
            None => groups.insert(gi, (x, set)),
            Some(gj) if groups[gj].0 == x => {
                groups[gj].1.extend(set);
            }
            Some(gj) => {
                // every re-anchored factor dies against ρ_{p',x}
                debug_assert!(groups[gj].1.contains(&x));
                pending.extend(set);
            }
        }
    } else {
        // y in the group's set: ρ_{p,y} ρ_{x,y} = e_x ρ_{p,y}
        debug_assert!(a.contains(&y));
        pending.insert(x);
    }
    Ok(())
}

fn insert_lambda(
    groups: &mut Groups,
    pending: &mut BTreeSet<usize>,
    x: usize,
    y: usize,
    fuel: &mut Fuel,
) -> Result<()> {
    insert_lambda_bounded(groups, groups.len(), x, y, pending, fuel)
}

fn insert_lambda_bounded(
    groups: &mut Groups,
    bound: usize,
    x: usize,
    y: usize,
    pending: &mut BTreeSet<usize>,
    fuel: &mut Fuel,
) -> Result<()> {
    let hit = groups[..bound]
        .iter()
        .rposition(|(q, b)| *q == x || *q == y || b.contains(&x) || b.contains(&y));
    let Some(gi) = hit else {
        groups.insert(bound, (x, [y].into()));
        return Ok(());
    };
    fuel.spend()?;
    let (q, ref b) = groups[gi];
    let x_in = x == q || b.contains(&x);
    let y_in = y == q || b.contains(&y);
    if x_in && y_in {
        // duplicate or reversed pair after re-anchoring: both die into e's
        let dead = if y == q { x } else { y };
        groups[gi].1.remove(&dead);
        pending.insert(q);
        pending.insert(dead);
        if groups[gi].1.is_empty() {
            groups.remove(gi);
        }
        Ok(())
    } else if x_in {
        // incoming (re-anchored to q) joins; settle y to the left
        join_lambda(groups, gi, y, pending, fuel)
    } else if y == q {
        // λ_{q,b} λ_{x,q} = e_b λ_{x,q}: the whole group dies,
        // the incoming walks on
        let (anchor, set) = groups.remove(gi);
        pending.extend(set);
        insert_lambda_bounded(groups, gi, x, anchor, pending, fuel)
    } else {
        // λ_{q,y} λ_{x,y} = e_q λ_{x,y}: one member dies, the incoming walks on
        debug_assert!(b.contains(&y));
        groups[gi].1.remove(&y);
        pending.insert(q);
        let mut next = gi;
        if groups[gi].1.is_empty() {
            groups.remove(gi);
            next = gi;
        }
        insert_lambda_bounded(groups, next, x, y, pending, fuel)
    }
}

/// Attaches `y` to the group at `gi`, resolving collisions with groups to
/// the left of it.
fn join_lambda(
    groups: &mut Groups,
    gi: usize,
    y: usize,
    pending: &mut BTreeSet<usize>,
    fuel: &mut Fuel,
) -> Result<()> {
    match (0..gi).rev().find(|&j| groups[j].0 == y || groups[j].1.contains(&y)) {
        None => {
            groups[gi].1.insert(y);
        }
        Some(gj) if groups[gj].0 == y => {
            // left group dies wholesale; its anchor joins
            fuel.spend()?;
            let (anchor, set) = groups.remove(gj);
            pending.extend(set);
            groups[gi - 1].1.insert(anchor);
        }
        Some(gj) => {
            // shared member: the left group's factor dies; y joins
            fuel.spend()?;
            groups[gj].1.remove(&y);
            pending.insert(groups[gj].0);
            if groups[gj].1.is_empty() {
                groups.remove(gj);
                groups[gi - 1].1.insert(y);
            } else {
                groups[gi].1.insert(y);
            }
        }
    }
    Ok(())
}

/// Prop-rewr4 cleanup: no ρ-anchor inside a λ-set, no λ-anchor inside a
/// ρ-set, and the e-set disjoint from every group support.
pub fn enforce_disjointness(form: FactorForm) -> Result<FactorForm> {
    let budget = stage_fuel(&form);
    enforce_disjointness_fueled(form, &mut Fuel::new(budget))
}

fn enforce_disjointness_fueled(mut form: FactorForm, fuel: &mut Fuel) -> Result<FactorForm> {
    let mut rho_groups: Groups = Vec::new();
    let mut lambda_flat: Vec<Factor> = Vec::new();
    for f in &form.factors {
        match f.kind {
            FactorKind::Rho => match rho_groups.iter_mut().find(|(p, _)| *p == f.p) {
                Some((_, a)) => {
                    a.insert(f.q);
                }
                None => rho_groups.push((f.p, [f.q].into())),
            },
            FactorKind::Lambda => lambda_flat.push(*f),
        }
    }

    // (i) a ρ-anchor inside some λ-factor's second index:
    // R_{p,A} λ_{q,p} = λ_{q,p} Π_{a∈A} e_a
    loop {
        let hit = rho_groups
            .iter()
            .position(|(p, _)| lambda_flat.iter().any(|f| f.q == *p));
        let Some(i) = hit else { break };
        fuel.spend()?;
        let (p, a) = rho_groups.remove(i);
        let target = lambda_flat
            .iter()
            .position(|f| f.q == p)
            .expect("hit implies a target factor");
        let moved = lambda_flat.remove(target);
        lambda_flat.insert(0, moved);
        for x in a {
            push_e(&mut lambda_flat, 1, x, &mut form.e_set);
        }
    }

    // (ii) a λ-anchor inside some ρ-set:
    // ρ_{p,q_j} L_{q_j,B_j} = E_{B_j} ρ_{p,q_j}
    loop {
        let anchors: BTreeSet<usize> = lambda_flat.iter().map(|f| f.p).collect();
        let hit = anchors
            .iter()
            .find(|q| rho_groups.iter().any(|(_, a)| a.contains(q)))
            .copied();
        let Some(q) = hit else { break };
        fuel.spend()?;
        let start = lambda_flat
            .iter()
            .position(|f| f.p == q)
            .expect("anchor has a factor");
        let members: Vec<usize> = lambda_flat
            .iter()
            .filter(|f| f.p == q)
            .map(|f| f.q)
            .collect();
        lambda_flat.retain(|f| f.p != q);
        let from = start.min(lambda_flat.len());
        for b in members {
            push_e(&mut lambda_flat, from, b, &mut form.e_set);
        }
    }

    // (iii) e's in the trailing set touching a group support
    let mut worklist: Vec<usize> = form.e_set.iter().copied().collect();
    while let Some(a) = worklist.pop() {
        if !form.e_set.contains(&a) {
            continue;
        }
        if let Some(f) = lambda_flat.iter().find(|f| f.p == a || f.q == a) {
            // the e arrives from the right and consumes the whole group
            fuel.spend()?;
            let q = f.p;
            let members: Vec<usize> = lambda_flat
                .iter()
                .filter(|f| f.p == q)
                .map(|f| f.q)
                .collect();
            lambda_flat.retain(|f| f.p != q);
            for x in members.into_iter().chain([q]) {
                if form.e_set.insert(x) {
                    worklist.push(x);
                }
            }
            worklist.push(a);
        } else if let Some(i) = rho_groups.iter().position(|(p, _)| *p == a) {
            // R_{p,A} e_p = E_{{p}∪A}; the freed e's cross the λ-run leftward
            fuel.spend()?;
            let (p, set) = rho_groups.remove(i);
            let mut freed: BTreeSet<usize> = BTreeSet::new();
            for x in set.into_iter().chain([p]) {
                push_e(&mut lambda_flat, 0, x, &mut freed);
            }
            for x in freed {
                if form.e_set.insert(x) {
                    worklist.push(x);
                }
            }
        } else if let Some((_, set)) = rho_groups.iter_mut().find(|(_, a2)| a2.contains(&a)) {
            // ρ_{p,a} e_a = ρ_{p,a}: absorbed
            fuel.spend()?;
            let _ = set;
            form.e_set.remove(&a);
        }
    }

    form.factors = flatten_groups(&rho_groups, &{
        let mut lg: Groups = Vec::new();
        for f in &lambda_flat {
            match lg.iter_mut().find(|(q, _)| *q == f.p) {
                Some((_, b)) => {
                    b.insert(f.q);
                }
                None => lg.push((f.p, [f.q].into())),
            }
        }
        lg
    });
    Ok(form)
}

/// Assembles a cleaned form into a canonical word, pairing R- and L-groups
/// that share an anchor, and reduces σ to its canonical coset representative.
fn assemble(form: &FactorForm) -> Result<CanonicalWord> {
    let n = form.n;
    let mut rho_groups: Groups = Vec::new();
    let mut lambda_groups: Groups = Vec::new();
    for f in &form.factors {
        let groups = match f.kind {
            FactorKind::Rho => &mut rho_groups,
            FactorKind::Lambda => &mut lambda_groups,
        };
        match groups.iter_mut().find(|(p, _)| *p == f.p) {
            Some((_, a)) => {
                a.insert(f.q);
            }
            None => groups.push((f.p, [f.q].into())),
        }
    }
    let anchors: BTreeSet<usize> = rho_groups
        .iter()
        .map(|(p, _)| *p)
        .chain(lambda_groups.iter().map(|(q, _)| *q))
        .collect();
    let factors = anchors
        .into_iter()
        .map(|t| {
            let mut c: BTreeSet<usize> = [t].into();
            if let Some((_, a)) = rho_groups.iter().find(|(p, _)| *p == t) {
                c.extend(a);
            }
            let mut d: BTreeSet<usize> = [t].into();
            if let Some((_, b)) = lambda_groups.iter().find(|(q, _)| *q == t) {
                d.extend(b);
            }
            CanonicalFactor { t, c, d }
        })
        .collect();
    let cw = CanonicalWord::new(n, factors, form.e_set.clone(), form.tail.clone())?;
    Ok(cw.with_canonical_sigma())
}

/// Rewrites an arbitrary word to canonical form within the given fuel
/// budget. The result evaluates to the same diagram as the input.
pub fn normalize(w: &Word, fuel: usize) -> Result<CanonicalWord> {
    let mut fuel = Fuel::new(fuel);
    let form = to_factor_form(w);
    let form = sort_factors_fueled(form, &mut fuel)?;
    let form = dedupe_factors_fueled(form, &mut fuel)?;
    let form = enforce_disjointness_fueled(form, &mut fuel)?;
    assemble(&form)
}

/// [`normalize`] with the default fuel budget.
pub fn normalize_default(w: &Word) -> Result<CanonicalWord> {
    normalize(w, default_fuel(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::tests::random_word;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn word(n: usize, text: &str) -> Word {
        Word::parse(text, n).unwrap()
    }

    #[test]
    fn factor_form_of_empty_word() {
        let form = to_factor_form(&Word::empty(3).unwrap());
        assert!(form.factors().is_empty());
        assert!(form.e_set().is_empty());
        assert!(form.tail().is_identity());
    }

    #[test]
    fn factor_form_transports_through_sigma() {
        let form = to_factor_form(&word(3, "s1 l1"));
        assert_eq!(form.factors(), &[Factor::lambda(2, 1)]);
        assert_eq!(form.tail(), &Perm::transposition(3, 1, 2).unwrap());
        assert_eq!(form.eval(), word(3, "s1 l1").eval());
    }

    #[test]
    fn factor_form_cancels_adjacent_lambda_rho() {
        let form = to_factor_form(&word(3, "l1 r1"));
        assert!(form.factors().is_empty());
        assert_eq!(form.e_set(), &[2].into());
        assert!(form.tail().is_identity());
    }

    #[test]
    fn sort_swaps_disjoint_factors() {
        let mut input = to_factor_form(&Word::empty(4).unwrap());
        input.factors = vec![Factor::lambda(1, 2), Factor::rho(3, 4)];
        let sorted = sort_factors(input.clone()).unwrap();
        assert_eq!(sorted.factors(), &[Factor::rho(3, 4), Factor::lambda(1, 2)]);
        assert_eq!(sorted.eval(), input.eval());
    }

    #[test]
    fn sort_cancels_matching_pair() {
        let mut input = to_factor_form(&Word::empty(3).unwrap());
        input.factors = vec![Factor::lambda(1, 2), Factor::rho(1, 2)];
        let sorted = sort_factors(input.clone()).unwrap();
        assert!(sorted.factors().is_empty());
        assert_eq!(sorted.e_set(), &[2].into());
        assert_eq!(sorted.eval(), input.eval());
    }

    #[test]
    fn sort_applies_crossing_rule_with_byproducts() {
        // λ_{1,2} ρ_{3,1} -> ρ_{3,1} λ_{3,1}, e_2, tail σ_{1,2}
        let mut input = to_factor_form(&Word::empty(3).unwrap());
        input.factors = vec![Factor::lambda(1, 2), Factor::rho(3, 1)];
        let sorted = sort_factors(input.clone()).unwrap();
        assert_eq!(sorted.factors(), &[Factor::rho(3, 1), Factor::lambda(3, 1)]);
        assert_eq!(sorted.e_set(), &[2].into());
        assert_eq!(sorted.tail(), &Perm::transposition(3, 1, 2).unwrap());
        assert_eq!(sorted.eval(), input.eval());
    }

    #[test]
    fn dedupe_spec_examples() {
        // ρ_{1,2} ρ_{1,2} -> e's {1,2}
        let mut input = to_factor_form(&Word::empty(3).unwrap());
        input.factors = vec![Factor::rho(1, 2), Factor::rho(1, 2)];
        let out = dedupe_factors(input.clone()).unwrap();
        assert!(out.factors().is_empty());
        assert_eq!(out.e_set(), &[1, 2].into());
        assert_eq!(out.eval(), input.eval());

        // ρ_{1,2} ρ_{2,3} -> e_3 ρ_{1,2}
        let mut input = to_factor_form(&Word::empty(3).unwrap());
        input.factors = vec![Factor::rho(1, 2), Factor::rho(2, 3)];
        let out = dedupe_factors(input.clone()).unwrap();
        assert_eq!(out.factors(), &[Factor::rho(1, 2)]);
        assert_eq!(out.e_set(), &[3].into());
        assert_eq!(out.eval(), input.eval());

        // λ_{1,2} λ_{3,2} -> e_1 λ_{3,2}
        let mut input = to_factor_form(&Word::empty(3).unwrap());
        input.factors = vec![Factor::lambda(1, 2), Factor::lambda(3, 2)];
        let out = dedupe_factors(input.clone()).unwrap();
        assert_eq!(out.factors(), &[Factor::lambda(3, 2)]);
        assert_eq!(out.e_set(), &[1].into());
        assert_eq!(out.eval(), input.eval());
    }

    #[test]
    fn dedupe_rejects_unsorted_input() {
        let mut input = to_factor_form(&Word::empty(3).unwrap());
        input.factors = vec![Factor::lambda(1, 2), Factor::rho(1, 3)];
        assert!(dedupe_factors(input).is_err());
    }

    #[test]
    fn enforce_spec_examples() {
        // R_{1,{2}} L_{3,{1}} -> L_{3,{1}}, e_2
        let mut input = to_factor_form(&Word::empty(3).unwrap());
        input.factors = vec![Factor::rho(1, 2), Factor::lambda(3, 1)];
        let out = enforce_disjointness(input.clone()).unwrap();
        assert_eq!(out.factors(), &[Factor::lambda(3, 1)]);
        assert_eq!(out.e_set(), &[2].into());
        assert_eq!(out.eval(), input.eval());

        // e_2 with L_{1,{2}} -> e's {1,2}
        let mut input = to_factor_form(&Word::empty(3).unwrap());
        input.factors = vec![Factor::lambda(1, 2)];
        input.e_set = [2].into();
        let out = enforce_disjointness(input.clone()).unwrap();
        assert!(out.factors().is_empty());
        assert_eq!(out.e_set(), &[1, 2].into());
        assert_eq!(out.eval(), input.eval());

        // already-disjoint input is a fixed point
        let mut input = to_factor_form(&Word::empty(4).unwrap());
        input.factors = vec![Factor::rho(1, 2), Factor::lambda(3, 4)];
        let out = enforce_disjointness(input.clone()).unwrap();
        assert_eq!(out.factors(), input.factors());
        assert_eq!(out.eval(), input.eval());
    }

    #[test]
    fn normalize_spec_examples() {
        let cw = normalize_default(&word(3, "l1 s1")).unwrap();
        assert_eq!(cw.to_string(), "s=1;(1|1|1,2);M=;sigma=1,2,3");

        let cw = normalize_default(&word(3, "r1 r1")).unwrap();
        assert_eq!(cw.to_string(), "s=0;M=1,2;sigma=1,2,3");
    }

    #[test]
    fn stages_preserve_value_on_random_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 3..=5 {
            for _ in 0..300 {
                let w = random_word(n, 14, &mut rng);
                let expected = w.eval();
                let f1 = to_factor_form(&w);
                assert_eq!(f1.eval(), expected, "to_factor_form broke {w}");
                let f2 = sort_factors(f1).unwrap();
                assert_eq!(f2.eval(), expected, "sort_factors broke {w}");
                let f3 = dedupe_factors(f2).unwrap();
                assert_eq!(f3.eval(), expected, "dedupe_factors broke {w}");
                let f4 = enforce_disjointness(f3).unwrap();
                assert_eq!(f4.eval(), expected, "enforce_disjointness broke {w}");
                let cw = assemble(&f4).unwrap();
                assert_eq!(cw.eval(), expected, "assemble broke {w}");
            }
        }
    }

    #[test]
    fn dedupe_output_has_disjoint_supports() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for n in 3..=5 {
            for _ in 0..200 {
                let w = random_word(n, 14, &mut rng);
                let form = dedupe_factors(sort_factors(to_factor_form(&w)).unwrap()).unwrap();
                for (kind, pairs) in [
                    (FactorKind::Rho, form.rho_factors()),
                    (FactorKind::Lambda, form.lambda_factors()),
                ] {
                    let _ = kind;
                    for (i, &(p1, q1)) in pairs.iter().enumerate() {
                        for &(p2, q2) in &pairs[i + 1..] {
                            let shares_anchor = p1 == p2;
                            let disjoint =
                                p1 != p2 && p1 != q2 && q1 != p2 && q1 != q2;
                            assert!(
                                shares_anchor || disjoint,
                                "pair ({p1},{q1}) ({p2},{q2}) in {w}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn normalize_is_idempotent_up_to_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 3..=5 {
            for _ in 0..150 {
                let w = random_word(n, 12, &mut rng);
                let cw = normalize_default(&w).unwrap();
                let again = normalize_default(&cw.to_word().unwrap()).unwrap();
                assert!(cw.equivalent(&again).unwrap(), "word {w}");
            }
        }
    }

    #[test]
    fn normalize_discriminates_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..400 {
            let w1 = random_word(3, 10, &mut rng);
            let w2 = random_word(3, 10, &mut rng);
            let c1 = normalize_default(&w1).unwrap();
            let c2 = normalize_default(&w2).unwrap();
            assert_eq!(
                c1.equivalent(&c2).unwrap(),
                w1.eval() == w2.eval(),
                "w1={w1} w2={w2}"
            );
        }
    }

    #[test]
    fn zero_fuel_reports_exhaustion() {
        let w = word(3, "l1 r2 l1 r2");
        assert!(matches!(normalize(&w, 0), Err(Error::FuelExhausted(0))));
    }
}
