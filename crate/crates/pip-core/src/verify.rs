//! Desk-scale verification: brute-force enumeration, closed-form counting,
//! generator closure, exhaustive relation audits, and the isomorphism
//! report tying the presentation to the diagram monoid.
//!
//! Counting and enumeration are independent oracles: the closed form sums
//! `C(n,a)·C(n,b)·B(a,b)` over line-support sizes, where
//! `B(a,b) = Σ_k k!·S(a,k)·S(b,k)` counts partitions of two sides into
//! blocks meeting both; the enumerator generates the same elements from
//! raw set partitions. Agreement of the two validates both.
//!
//! With the `parallel` feature (default), audits and closures fan out over
//! rayon; `*_seq` variants always run sequentially.

use crate::canonical::CanonicalWord;
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::presentation::{
    derived_relation_instances, relation_instances, GenLetter, RelationInstance, Word,
};
use crate::rewrite::normalize_default;
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::time::{Duration, Instant};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// One failed check: the family and instance that failed, with both
/// evaluated sides serialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureRecord {
    pub family: String,
    pub detail: String,
    pub lhs: String,
    pub rhs: String,
}

/// Outcome of an audit run. Empty `failures` means the audit passed.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub n: usize,
    pub families_checked: usize,
    pub instances_checked: usize,
    pub failures: Vec<FailureRecord>,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Failures as TSV rows `family<TAB>instance<TAB>lhs<TAB>rhs`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("family\tinstance\tlhs\trhs\n");
        for f in &self.failures {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                f.family, f.detail, f.lhs, f.rhs
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "n={}: {} families, {} instances, {} failures in {:.2?}",
            self.n,
            self.families_checked,
            self.instances_checked,
            self.failures.len(),
            self.elapsed
        )
    }
}

fn run_audit(instances: &[RelationInstance], parallel: bool) -> Vec<FailureRecord> {
    let check = |r: &RelationInstance| -> Option<FailureRecord> {
        let lhs = r.lhs.eval();
        let rhs = r.rhs.eval();
        (lhs != rhs).then(|| FailureRecord {
            family: r.family.to_string(),
            detail: r.label.clone(),
            lhs: lhs.serialize(),
            rhs: rhs.serialize(),
        })
    };
    #[cfg(feature = "parallel")]
    if parallel {
        return instances.par_iter().filter_map(check).collect();
    }
    let _ = parallel;
    instances.iter().filter_map(check).collect()
}

fn report_from_instances(n: usize, instances: Vec<RelationInstance>, parallel: bool) -> VerificationReport {
    let start = Instant::now();
    let failures = run_audit(&instances, parallel);
    let families: HashSet<&str> = instances.iter().map(|r| r.family).collect();
    VerificationReport {
        n,
        families_checked: families.len(),
        instances_checked: instances.len(),
        failures,
        elapsed: start.elapsed(),
    }
}

fn check_rank(n: usize) -> Result<()> {
    if (3..=5).contains(&n) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "relation audits are supported for n in 3..=5, got {n}"
        )))
    }
}

/// Audits every defining-relation instance under evaluation.
pub fn check_relations(n: usize) -> Result<VerificationReport> {
    check_rank(n)?;
    Ok(report_from_instances(n, relation_instances(n)?, cfg!(feature = "parallel")))
}

/// Sequential variant of [`check_relations`].
pub fn check_relations_seq(n: usize) -> Result<VerificationReport> {
    check_rank(n)?;
    Ok(report_from_instances(n, relation_instances(n)?, false))
}

/// Audits every derived-relation instance under evaluation.
pub fn check_derived(n: usize) -> Result<VerificationReport> {
    check_rank(n)?;
    Ok(report_from_instances(n, derived_relation_instances(n)?, cfg!(feature = "parallel")))
}

/// Sequential variant of [`check_derived`].
pub fn check_derived_seq(n: usize) -> Result<VerificationReport> {
    check_rank(n)?;
    Ok(report_from_instances(n, derived_relation_instances(n)?, false))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn stirling_table(n: usize) -> Vec<Vec<u128>> {
    let mut s = vec![vec![0u128; n + 1]; n + 1];
    s[0][0] = 1;
    for i in 1..=n {
        for k in 1..=i {
            s[i][k] = s[i - 1][k - 1] + k as u128 * s[i - 1][k];
        }
    }
    s
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Partitions of an `a`-set and a `b`-set into a common family of blocks,
/// each block meeting both sides: `Σ_k k!·S(a,k)·S(b,k)`.
fn two_sided_blocks(s: &[Vec<u128>], a: usize, b: usize) -> u128 {
    (0..=a.min(b)).map(|k| factorial(k) * s[a][k] * s[b][k]).sum()
}

/// Closed-form count of rank-`n` elements.
pub fn count_pip(n: usize) -> u128 {
    let s = stirling_table(n);
    let mut total = 0u128;
    for a in 0..=n {
        for b in 0..=n {
            total += binomial(n, a) * binomial(n, b) * two_sided_blocks(&s, a, b);
        }
    }
    total
}

/// Closed-form count of the point-free elements (block bijections).
pub fn count_point_free(n: usize) -> u128 {
    let s = stirling_table(n);
    two_sided_blocks(&s, n, n)
}

/// All set partitions of `elems` into nonempty blocks, blocks ordered by
/// least element, partitions in a deterministic order.
fn set_partitions(elems: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if elems.is_empty() {
        return vec![vec![]];
    }
    let first = elems[0];
    let rest = &elems[1..];
    let mut out = Vec::new();
    for sub in set_partitions(rest) {
        // first joins an existing block or opens a new one
        for i in 0..sub.len() {
            let mut next = sub.clone();
            next[i].insert(0, first);
            out.push(next);
        }
        let mut next = sub;
        next.insert(0, vec![first]);
        out.push(next);
    }
    out
}

/// Every rank-`n` element exactly once, in canonical order.
pub fn enumerate_pip(n: usize) -> Result<Vec<Diagram>> {
    if !(1..=5).contains(&n) {
        return Err(Error::Unsupported(format!(
            "enumeration is guarded to n in 1..=5, got {n}"
        )));
    }
    let labels: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    for left_mask in 0u32..1 << n {
        let left: Vec<usize> = labels
            .iter()
            .copied()
            .filter(|&k| left_mask >> (k - 1) & 1 == 1)
            .collect();
        for right_mask in 0u32..1 << n {
            let right: Vec<usize> = labels
                .iter()
                .copied()
                .filter(|&k| right_mask >> (k - 1) & 1 == 1)
                .collect();
            if left.is_empty() != right.is_empty() {
                continue;
            }
            let left_parts = set_partitions(&left);
            let right_parts = set_partitions(&right);
            for lp in &left_parts {
                for rp in &right_parts {
                    if lp.len() != rp.len() {
                        continue;
                    }
                    let k = lp.len();
                    for pairing in (0..k).permutations(k) {
                        let mut blocks: Vec<Vec<i32>> = Vec::with_capacity(2 * n);
                        for (j, lblock) in lp.iter().enumerate() {
                            let mut block: Vec<i32> =
                                lblock.iter().map(|&x| x as i32).collect();
                            block.extend(rp[pairing[j]].iter().map(|&x| -(x as i32)));
                            blocks.push(block);
                        }
                        for &x in &labels {
                            if left_mask >> (x - 1) & 1 == 0 {
                                blocks.push(vec![x as i32]);
                            }
                            if right_mask >> (x - 1) & 1 == 0 {
                                blocks.push(vec![-(x as i32)]);
                            }
                        }
                        out.push(Diagram::new(n, blocks)?);
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Breadth-first closure of `gens ∪ {identity}` under right multiplication.
pub fn closure(n: usize, gens: &[Diagram]) -> Result<HashSet<Diagram>> {
    closure_impl(n, gens, cfg!(feature = "parallel"))
}

/// Sequential variant of [`closure`].
pub fn closure_seq(n: usize, gens: &[Diagram]) -> Result<HashSet<Diagram>> {
    closure_impl(n, gens, false)
}

fn closure_impl(n: usize, gens: &[Diagram], parallel: bool) -> Result<HashSet<Diagram>> {
    if n > 5 {
        return Err(Error::Unsupported(format!(
            "full closure is guarded to n <= 5, got {n}"
        )));
    }
    for g in gens {
        if g.n() != n {
            return Err(Error::RankMismatch(g.n(), n));
        }
    }
    let mut visited: HashSet<Diagram> = HashSet::new();
    visited.insert(Diagram::identity(n));
    visited.extend(gens.iter().cloned());
    let mut frontier: Vec<Diagram> = visited.iter().cloned().collect();
    while !frontier.is_empty() {
        let products = expand_frontier(&frontier, gens, parallel);
        frontier = products
            .into_iter()
            .filter(|d| visited.insert(d.clone()))
            .collect();
    }
    Ok(visited)
}

fn expand_frontier(frontier: &[Diagram], gens: &[Diagram], parallel: bool) -> Vec<Diagram> {
    let step = |d: &Diagram| -> Vec<Diagram> {
        gens.iter()
            .map(|g| d.multiply(g).expect("ranks checked on entry"))
            .collect()
    };
    #[cfg(feature = "parallel")]
    if parallel {
        return frontier.par_iter().flat_map_iter(step).collect();
    }
    let _ = parallel;
    frontier.iter().flat_map(|d| step(d)).collect()
}

/// The concrete generating set `{s_1 .. s_{n-1}, r_1, l_1}`.
pub fn standard_generators(n: usize) -> Result<Vec<Diagram>> {
    let mut gens = Vec::new();
    for i in 1..n {
        gens.push(Diagram::generator_s(n, i, i + 1)?);
    }
    gens.push(Diagram::generator_r(n, 1, 2)?);
    gens.push(Diagram::generator_l(n, 1, 2)?);
    Ok(gens)
}

fn random_word<R: Rng>(n: usize, max_len: usize, rng: &mut R) -> Word {
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len)
        .map(|_| match rng.gen_range(0..4) {
            0 => GenLetter::sigma(rng.gen_range(1..n)),
            1 => GenLetter::lambda(rng.gen_range(1..n)),
            2 => GenLetter::rho(rng.gen_range(1..n)),
            _ => GenLetter::e(rng.gen_range(1..=n)),
        })
        .collect();
    Word::new(n, letters).expect("letters drawn in range")
}

/// The combined isomorphism audit at rank `n ∈ {3,4}`:
///
/// 1. the closure of the concrete generators has exactly the counted size;
/// 2. extraction round-trips on every element;
/// 3. at rank 3, over all pairs of extracted canonical words, equivalence
///    coincides with diagram equality;
/// 4. on 10⁴ random words, the normalizer agrees with extraction up to
///    equivalence.
pub fn isomorphism_report(n: usize) -> Result<VerificationReport> {
    isomorphism_report_impl(n, cfg!(feature = "parallel"))
}

/// Sequential variant of [`isomorphism_report`].
pub fn isomorphism_report_seq(n: usize) -> Result<VerificationReport> {
    isomorphism_report_impl(n, false)
}

fn isomorphism_report_impl(n: usize, parallel: bool) -> Result<VerificationReport> {
    if !(3..=4).contains(&n) {
        return Err(Error::Unsupported(format!(
            "isomorphism report is supported for n in 3..=4, got {n}"
        )));
    }
    let start = Instant::now();
    let mut failures: Vec<FailureRecord> = Vec::new();
    let mut instances = 0usize;

    // 1. generation: the concrete generators reach every element
    let reached = closure_impl(n, &standard_generators(n)?, parallel)?;
    let expected = count_pip(n);
    instances += 1;
    if reached.len() as u128 != expected {
        failures.push(FailureRecord {
            family: "closure-size".into(),
            detail: format!("n={n}"),
            lhs: reached.len().to_string(),
            rhs: expected.to_string(),
        });
    }

    // 2. extraction round-trips on every element
    let all = enumerate_pip(n)?;
    instances += all.len();
    let round_trip = |d: &Diagram| -> Option<FailureRecord> {
        let back = match CanonicalWord::of_diagram(d) {
            Ok(cw) => cw.eval(),
            Err(e) => {
                return Some(FailureRecord {
                    family: "round-trip".into(),
                    detail: e.to_string(),
                    lhs: d.serialize(),
                    rhs: String::new(),
                })
            }
        };
        (back != *d).then(|| FailureRecord {
            family: "round-trip".into(),
            detail: String::new(),
            lhs: d.serialize(),
            rhs: back.serialize(),
        })
    };
    failures.extend(par_filter_map(&all, parallel, round_trip));

    // 3. equivalence of extracted words coincides with equality (rank 3)
    if n == 3 {
        let words: Vec<(Diagram, CanonicalWord)> = all
            .iter()
            .map(|d| (d.clone(), CanonicalWord::of_diagram(d).expect("round-trip checked")))
            .collect();
        instances += words.len() * words.len();
        let check_pair = |i: &usize| -> Option<FailureRecord> {
            let (da, ca) = &words[*i];
            for (db, cb) in &words {
                let eq = ca.equivalent(cb).expect("same rank");
                if eq != (da == db) {
                    return Some(FailureRecord {
                        family: "equivalence-vs-equality".into(),
                        detail: format!("equivalent={eq}"),
                        lhs: da.serialize(),
                        rhs: db.serialize(),
                    });
                }
            }
            None
        };
        let idx: Vec<usize> = (0..words.len()).collect();
        failures.extend(par_filter_map(&idx, parallel, check_pair));
    }

    // 4. the normalizer agrees with extraction up to equivalence
    let mut rng = ChaCha8Rng::seed_from_u64(0x1500 + n as u64);
    let samples: Vec<Word> = (0..10_000).map(|_| random_word(n, 20, &mut rng)).collect();
    instances += samples.len();
    let check_word = |w: &Word| -> Option<FailureRecord> {
        let value = w.eval();
        let normalized = match normalize_default(w) {
            Ok(cw) => cw,
            Err(e) => {
                return Some(FailureRecord {
                    family: "normalize-vs-extract".into(),
                    detail: format!("{w}: {e}"),
                    lhs: value.serialize(),
                    rhs: String::new(),
                })
            }
        };
        let extracted = CanonicalWord::of_diagram(&value).expect("value has rank >= 3");
        let ok = normalized.eval() == value
            && normalized.equivalent(&extracted).expect("same rank");
        (!ok).then(|| FailureRecord {
            family: "normalize-vs-extract".into(),
            detail: w.to_string(),
            lhs: normalized.to_string(),
            rhs: extracted.to_string(),
        })
    };
    failures.extend(par_filter_map(&samples, parallel, check_word));

    Ok(VerificationReport {
        n,
        families_checked: 4,
        instances_checked: instances,
        failures,
        elapsed: start.elapsed(),
    })
}

fn par_filter_map<T, U, F>(items: &[T], parallel: bool, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Option<U> + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return items.par_iter().filter_map(|x| f(x)).collect();
    }
    let _ = parallel;
    items.iter().filter_map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::expand_lambda;

    #[test]
    fn enumerate_tiny_ranks() {
        let one = enumerate_pip(1).unwrap();
        assert_eq!(one.len(), 2);
        assert!(one.contains(&Diagram::identity(1)));
        assert_eq!(enumerate_pip(2).unwrap().len(), 12);
        assert_eq!(enumerate_pip(3).unwrap().len(), 128);
        assert!(enumerate_pip(6).is_err());
        assert!(enumerate_pip(0).is_err());
    }

    #[test]
    fn counting_matches_enumeration() {
        for n in 1..=4 {
            assert_eq!(count_pip(n) as usize, enumerate_pip(n).unwrap().len());
            let point_free = enumerate_pip(n)
                .unwrap()
                .iter()
                .filter(|d| d.is_point_free())
                .count();
            assert_eq!(count_point_free(n) as usize, point_free);
        }
        assert_eq!(count_pip(1), 2);
        assert_eq!(count_pip(3), 128);
        assert_eq!(
            [1, 2, 3, 4].map(count_point_free),
            [1u128, 3, 25, 339]
        );
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let all = enumerate_pip(3).unwrap();
        let set: HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
    }

    #[test]
    fn closure_of_unit_generators_is_symmetric_group() {
        let n = 3;
        let gens: Vec<Diagram> = (1..n)
            .map(|i| Diagram::generator_s(n, i, i + 1).unwrap())
            .collect();
        assert_eq!(closure(n, &gens).unwrap().len(), 6);
    }

    #[test]
    fn closure_of_standard_generators_reaches_everything() {
        let reached = closure(3, &standard_generators(3).unwrap()).unwrap();
        assert_eq!(reached.len(), 128);
    }

    #[test]
    fn closure_without_l_misses_left_points() {
        let n = 3;
        let mut gens: Vec<Diagram> = (1..n)
            .map(|i| Diagram::generator_s(n, i, i + 1).unwrap())
            .collect();
        gens.push(Diagram::generator_r(n, 1, 2).unwrap());
        let reached = closure(n, &gens).unwrap();
        assert!(reached.len() < 128);
        assert!(reached.iter().all(|d| d.left_points().is_empty()));
    }

    #[test]
    fn relation_audits_pass_at_rank_three() {
        let report = check_relations(3).unwrap();
        assert!(report.passed(), "{}", report.to_tsv());
        let derived = check_derived(3).unwrap();
        assert!(derived.passed(), "{}", derived.to_tsv());
        assert!(check_relations(6).is_err());
    }

    #[test]
    fn mutated_relation_fails_the_audit() {
        // negative control: σ_1² = σ_1 is false
        let bad = RelationInstance {
            family: "mutated",
            label: "control".into(),
            lhs: Word::parse("s1 s1", 3).unwrap(),
            rhs: Word::parse("s1", 3).unwrap(),
        };
        let failures = run_audit(&[bad], false);
        assert_eq!(failures.len(), 1);
    }

    #[test]
    fn stabilizer_lemma_holds_on_diagrams() {
        // conjugating l_i by the (i-1, i+2) transposition fixes it
        for n in [4usize, 5] {
            for i in 2..=n - 2 {
                let t = Diagram::perm_diagram(
                    &crate::perm::Perm::transposition(n, i - 1, i + 2).unwrap(),
                );
                let li = expand_lambda(n, i, i + 1).unwrap().eval();
                let conj = t.multiply(&li).unwrap().multiply(&t).unwrap();
                assert_eq!(conj, li);
            }
        }
    }

    #[test]
    fn sequential_and_parallel_audits_agree() {
        let a = check_relations(3).unwrap();
        let b = check_relations_seq(3).unwrap();
        assert_eq!(a.instances_checked, b.instances_checked);
        assert_eq!(a.failures, b.failures);
        let ca = closure(3, &standard_generators(3).unwrap()).unwrap();
        let cb = closure_seq(3, &standard_generators(3).unwrap()).unwrap();
        assert_eq!(ca, cb);
    }
}
