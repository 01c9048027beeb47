//! The abstract monoid presentation: generator words over σ, λ, ρ, e and
//! the complete catalog of defining and derived relations.
//!
//! Words evaluate into diagrams through the map sending σ_i, λ_i, ρ_i, e_i
//! to the concrete generators s_i, l_i, r_i, ε_i. Derived generators
//! σ_{p,q}, λ_{p,q}, ρ_{p,q} are conjugates of σ_1, λ_1, ρ_1 by any
//! permutation sending 1 to p and 2 to q; the choice of permutation is
//! immaterial and fixed here only for determinism.

use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::perm::Perm;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Kinds of atomic generator letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenKind {
    Sigma,
    Lambda,
    Rho,
    E,
}

/// One atomic generator letter. σ/λ/ρ indices run over `1..n`, e indices
/// over `1..=n`; the ambient `n` lives on the containing [`Word`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenLetter {
    pub kind: GenKind,
    pub index: usize,
}

impl GenLetter {
    pub fn sigma(i: usize) -> Self {
        GenLetter { kind: GenKind::Sigma, index: i }
    }
    pub fn lambda(i: usize) -> Self {
        GenLetter { kind: GenKind::Lambda, index: i }
    }
    pub fn rho(i: usize) -> Self {
        GenLetter { kind: GenKind::Rho, index: i }
    }
    pub fn e(i: usize) -> Self {
        GenLetter { kind: GenKind::E, index: i }
    }

    fn valid_for(&self, n: usize) -> bool {
        match self.kind {
            GenKind::E => self.index >= 1 && self.index <= n,
            _ => self.index >= 1 && self.index < n,
        }
    }

    fn token(&self) -> String {
        let c = match self.kind {
            GenKind::Sigma => 's',
            GenKind::Lambda => 'l',
            GenKind::Rho => 'r',
            GenKind::E => 'e',
        };
        format!("{c}{}", self.index)
    }
}

/// A word in the free monoid over the generator letters; the empty word is
/// the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    n: usize,
    letters: Vec<GenLetter>,
}

impl Word {
    pub fn new(n: usize, letters: Vec<GenLetter>) -> Result<Self> {
        if n < 3 {
            return Err(Error::RankTooSmall(n));
        }
        for letter in &letters {
            if !letter.valid_for(n) {
                return Err(Error::InvalidIndex(format!(
                    "letter {} invalid at rank {n}",
                    letter.token()
                )));
            }
        }
        Ok(Word { n, letters })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Word::new(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[GenLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.n != other.n {
            return Err(Error::RankMismatch(self.n, other.n));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Word { n: self.n, letters })
    }

    /// Evaluates the word to a diagram: the left-to-right product of the
    /// generator images, the empty word mapping to the identity.
    pub fn eval(&self) -> Diagram {
        let n = self.n;
        let mut acc = Diagram::identity(n);
        for letter in &self.letters {
            let g = match letter.kind {
                GenKind::Sigma => Diagram::generator_s(n, letter.index, letter.index + 1),
                GenKind::Lambda => Diagram::generator_l(n, letter.index, letter.index + 1),
                GenKind::Rho => Diagram::generator_r(n, letter.index, letter.index + 1),
                GenKind::E => Diagram::generator_eps(n, letter.index),
            }
            .expect("letter indices validated at construction");
            acc = acc.multiply(&g).expect("ranks agree");
        }
        acc
    }

    /// The word-level involution: reverses the letter sequence and swaps
    /// λ with ρ. Anti-multiplicative, and coherent with the diagram mirror:
    /// `w.involution().eval() == w.eval().star()`.
    pub fn involution(&self) -> Word {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|letter| match letter.kind {
                GenKind::Lambda => GenLetter::rho(letter.index),
                GenKind::Rho => GenLetter::lambda(letter.index),
                _ => *letter,
            })
            .collect();
        Word { n: self.n, letters }
    }

    /// Parses the whitespace-separated token format, e.g. `"s1 l2 e3"`.
    /// An empty or all-whitespace string is the identity word.
    pub fn parse(text: &str, n: usize) -> Result<Word> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let (head, idx) = tok.split_at(1);
            let index: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad word token {tok:?}")))?;
            let letter = match head {
                "s" => GenLetter::sigma(index),
                "l" => GenLetter::lambda(index),
                "r" => GenLetter::rho(index),
                "e" => GenLetter::e(index),
                _ => return Err(Error::Parse(format!("bad word token {tok:?}"))),
            };
            letters.push(letter);
        }
        Word::new(n, letters)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, letter) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&letter.token())?;
        }
        Ok(())
    }
}

/// A named instance of a relation: two words asserted equal in the monoid.
#[derive(Debug, Clone)]
pub struct RelationInstance {
    pub family: &'static str,
    pub label: String,
    pub lhs: Word,
    pub rhs: Word,
}

impl RelationInstance {
    /// Checks the instance under evaluation into diagrams.
    pub fn holds(&self) -> bool {
        self.lhs.eval() == self.rhs.eval()
    }
}

/// Deterministic permutation with π(1) = p, π(2) = q, remaining points in
/// ascending order.
fn anchor_perm(n: usize, p: usize, q: usize) -> Perm {
    let mut images = vec![p, q];
    images.extend((1..=n).filter(|&x| x != p && x != q));
    Perm::from_images(images).expect("construction yields a bijection")
}

/// The word for a permutation as a product of adjacent transpositions.
pub fn perm_word(pi: &Perm) -> Result<Word> {
    let letters = pi
        .adjacent_transpositions()
        .into_iter()
        .map(GenLetter::sigma)
        .collect();
    Word::new(pi.n(), letters)
}

fn check_distinct_pair(n: usize, p: usize, q: usize) -> Result<()> {
    if p < 1 || q < 1 || p > n || q > n || p == q {
        return Err(Error::InvalidIndex(format!(
            "indices ({p},{q}) must be distinct and within 1..={n}"
        )));
    }
    Ok(())
}

/// The transposition word σ_{p,q}: σ_i when the indices are adjacent,
/// otherwise the palindrome σ_i σ_{i+1} … σ_{j-2} σ_{j-1} σ_{j-2} … σ_i on
/// i = min(p,q), j = max(p,q).
pub fn expand_sigma(n: usize, p: usize, q: usize) -> Result<Word> {
    check_distinct_pair(n, p, q)?;
    let (i, j) = (p.min(q), p.max(q));
    let mut letters = Vec::new();
    for k in i..j {
        letters.push(GenLetter::sigma(k));
    }
    for k in (i..j - 1).rev() {
        letters.push(GenLetter::sigma(k));
    }
    Word::new(n, letters)
}

/// The conjugate λ_{p,q} = π⁻¹ λ_1 π as an atomic word, for the fixed
/// permutation with π(1) = p, π(2) = q.
pub fn expand_lambda(n: usize, p: usize, q: usize) -> Result<Word> {
    expand_conjugate(n, p, q, GenKind::Lambda)
}

/// The conjugate ρ_{p,q} = π⁻¹ ρ_1 π as an atomic word.
pub fn expand_rho(n: usize, p: usize, q: usize) -> Result<Word> {
    expand_conjugate(n, p, q, GenKind::Rho)
}

fn expand_conjugate(n: usize, p: usize, q: usize, kind: GenKind) -> Result<Word> {
    check_distinct_pair(n, p, q)?;
    if n < 3 {
        return Err(Error::RankTooSmall(n));
    }
    let pi = anchor_perm(n, p, q);
    let forward = pi.adjacent_transpositions();
    let mut letters: Vec<GenLetter> = forward
        .iter()
        .rev()
        .map(|&i| GenLetter::sigma(i))
        .collect();
    letters.push(GenLetter { kind, index: 1 });
    letters.extend(forward.into_iter().map(GenLetter::sigma));
    Word::new(n, letters)
}

/// R_{p,A}: the product of ρ_{p,a} over `a ∈ A` in ascending order.
pub fn expand_r_block(n: usize, p: usize, a: &BTreeSet<usize>) -> Result<Word> {
    expand_block(n, p, a, GenKind::Rho)
}

/// L_{p,A}: the product of λ_{p,a} over `a ∈ A` in ascending order.
pub fn expand_l_block(n: usize, p: usize, a: &BTreeSet<usize>) -> Result<Word> {
    expand_block(n, p, a, GenKind::Lambda)
}

fn expand_block(n: usize, p: usize, a: &BTreeSet<usize>, kind: GenKind) -> Result<Word> {
    if a.contains(&p) {
        return Err(Error::InvalidIndex(format!(
            "anchor {p} must not lie in its own set {a:?}"
        )));
    }
    let mut word = Word::empty(n)?;
    for &x in a {
        let factor = expand_conjugate(n, p, x, kind)?;
        word = word.concat(&factor)?;
    }
    Ok(word)
}

/// E_M: the product of e_m over `m ∈ M` in ascending order.
pub fn expand_e_block(n: usize, m: &BTreeSet<usize>) -> Result<Word> {
    for &x in m {
        if x < 1 || x > n {
            return Err(Error::InvalidIndex(format!("index {x} out of 1..={n}")));
        }
    }
    Word::new(n, m.iter().map(|&x| GenLetter::e(x)).collect())
}

struct Catalog {
    n: usize,
    out: Vec<RelationInstance>,
}

impl Catalog {
    fn push(&mut self, family: &'static str, label: String, lhs: Vec<GenLetter>, rhs: Vec<GenLetter>) {
        let lhs = Word::new(self.n, lhs).expect("catalog letters are in range");
        let rhs = Word::new(self.n, rhs).expect("catalog letters are in range");
        self.out.push(RelationInstance { family, label, lhs, rhs });
    }

    fn push_words(&mut self, family: &'static str, label: String, lhs: Word, rhs: Word) {
        self.out.push(RelationInstance { family, label, lhs, rhs });
    }

    /// Splits a multi-equality display into adjacent pairs.
    fn push_chain(&mut self, family: &'static str, label: String, words: Vec<Vec<GenLetter>>) {
        for (k, pair) in words.windows(2).enumerate() {
            self.push(
                family,
                format!("{label}#{k}"),
                pair[0].clone(),
                pair[1].clone(),
            );
        }
    }
}

/// Every concrete instance of every defining relation family at rank `n`.
pub fn relation_instances(n: usize) -> Result<Vec<RelationInstance>> {
    if n < 3 {
        return Err(Error::RankTooSmall(n));
    }
    use GenLetter as G;
    let mut cat = Catalog { n, out: Vec::new() };

    for i in 1..n {
        cat.push("c1", format!("i={i}"), vec![G::sigma(i), G::sigma(i)], vec![]);
    }
    for i in 1..n {
        for j in i + 2..n {
            cat.push(
                "c2",
                format!("i={i},j={j}"),
                vec![G::sigma(i), G::sigma(j)],
                vec![G::sigma(j), G::sigma(i)],
            );
        }
    }
    for i in 1..n - 1 {
        let j = i + 1;
        cat.push(
            "c3",
            format!("i={i},j={j}"),
            vec![G::sigma(i), G::sigma(j), G::sigma(i)],
            vec![G::sigma(j), G::sigma(i), G::sigma(j)],
        );
    }
    for i in 1..n {
        for j in 1..n {
            if i.abs_diff(j) > 1 {
                if i < j {
                    cat.push(
                        "lr1",
                        format!("ll,i={i},j={j}"),
                        vec![G::lambda(i), G::lambda(j)],
                        vec![G::lambda(j), G::lambda(i)],
                    );
                    cat.push(
                        "lr1",
                        format!("rr,i={i},j={j}"),
                        vec![G::rho(i), G::rho(j)],
                        vec![G::rho(j), G::rho(i)],
                    );
                }
                cat.push(
                    "lr1",
                    format!("rl,i={i},j={j}"),
                    vec![G::rho(i), G::lambda(j)],
                    vec![G::lambda(j), G::rho(i)],
                );
            }
        }
    }
    for i in 1..=n - 2 {
        cat.push_chain(
            "neighb-lambda-rho",
            format!("lr,i={i}"),
            vec![
                vec![G::lambda(i), G::rho(i + 1)],
                vec![G::sigma(i + 1), G::rho(i), G::lambda(i), G::e(i + 2)],
                vec![G::sigma(i), G::rho(i + 1), G::sigma(i), G::lambda(i)],
            ],
        );
        cat.push_chain(
            "neighb-lambda-rho",
            format!("rl,i={i}"),
            vec![
                vec![G::lambda(i + 1), G::rho(i)],
                vec![G::e(i + 2), G::rho(i), G::lambda(i), G::sigma(i + 1)],
                vec![G::rho(i), G::sigma(i), G::lambda(i + 1), G::sigma(i)],
            ],
        );
    }
    for i in 1..=n - 2 {
        cat.push(
            "neighb-rho-lambda",
            format!("a,i={i}"),
            vec![G::rho(i), G::lambda(i + 1)],
            vec![G::rho(i), G::e(i + 2)],
        );
        cat.push(
            "neighb-rho-lambda",
            format!("b,i={i}"),
            vec![G::rho(i + 1), G::lambda(i)],
            vec![G::e(i + 2), G::lambda(i)],
        );
    }
    for i in 1..n {
        cat.push(
            "inverse",
            format!("l,i={i}"),
            vec![G::lambda(i), G::rho(i), G::lambda(i)],
            vec![G::lambda(i)],
        );
        cat.push(
            "inverse",
            format!("r,i={i}"),
            vec![G::rho(i), G::lambda(i), G::rho(i)],
            vec![G::rho(i)],
        );
    }
    for i in 1..n - 1 {
        let j = i + 1;
        cat.push(
            "slr1",
            format!("l,i={i},j={j}"),
            vec![G::sigma(i), G::lambda(j), G::sigma(i)],
            vec![G::sigma(j), G::lambda(i), G::sigma(j)],
        );
        cat.push(
            "slr1",
            format!("r,i={i},j={j}"),
            vec![G::sigma(i), G::rho(j), G::sigma(i)],
            vec![G::sigma(j), G::rho(i), G::sigma(j)],
        );
    }
    for i in 1..n {
        cat.push(
            "slr2",
            format!("l,i={i}"),
            vec![G::lambda(i), G::sigma(i)],
            vec![G::lambda(i)],
        );
        cat.push(
            "slr2",
            format!("r,i={i}"),
            vec![G::sigma(i), G::rho(i)],
            vec![G::rho(i)],
        );
    }
    for i in 1..n {
        for j in 1..n {
            if i.abs_diff(j) > 1 {
                cat.push(
                    "slr3",
                    format!("l,i={i},j={j}"),
                    vec![G::sigma(i), G::lambda(j)],
                    vec![G::lambda(j), G::sigma(i)],
                );
                cat.push(
                    "slr3",
                    format!("r,i={i},j={j}"),
                    vec![G::sigma(i), G::rho(j)],
                    vec![G::rho(j), G::sigma(i)],
                );
            }
        }
    }
    for i in 1..=n - 2 {
        cat.push_chain(
            "ghost",
            format!("l,i={i}"),
            vec![
                vec![G::lambda(i), G::lambda(i + 1)],
                vec![G::lambda(i), G::lambda(i + 1), G::sigma(i)],
                vec![G::sigma(i + 1), G::lambda(i), G::lambda(i + 1)],
            ],
        );
        cat.push_chain(
            "ghost",
            format!("r,i={i}"),
            vec![
                vec![G::rho(i + 1), G::rho(i)],
                vec![G::sigma(i), G::rho(i + 1), G::rho(i)],
                vec![G::rho(i + 1), G::rho(i), G::sigma(i + 1)],
            ],
        );
    }
    for i in 1..=n - 2 {
        cat.push_chain(
            "ghost1",
            format!("l,i={i}"),
            vec![
                vec![G::sigma(i + 1), G::lambda(i + 1), G::lambda(i)],
                vec![G::lambda(i + 1), G::lambda(i)],
                vec![G::lambda(i), G::e(i + 2)],
            ],
        );
        cat.push_chain(
            "ghost1",
            format!("r,i={i}"),
            vec![
                vec![G::rho(i), G::rho(i + 1), G::sigma(i + 1)],
                vec![G::rho(i), G::rho(i + 1)],
                vec![G::e(i + 2), G::rho(i)],
            ],
        );
    }
    for i in 2..=n {
        cat.push(
            "df-e",
            format!("i={i}"),
            vec![G::e(i)],
            vec![G::lambda(i - 1), G::rho(i - 1)],
        );
    }
    cat.push(
        "df-e",
        "i=1".into(),
        vec![G::e(1)],
        vec![G::sigma(1), G::e(2), G::sigma(1)],
    );
    for i in 1..=n {
        cat.push("squares", format!("idem,i={i}"), vec![G::e(i), G::e(i)], vec![G::e(i)]);
    }
    for i in 1..n {
        cat.push_chain(
            "squares",
            format!("chain,i={i}"),
            vec![
                vec![G::e(i), G::e(i + 1)],
                vec![G::e(i + 1), G::e(i)],
                vec![G::lambda(i), G::lambda(i)],
                vec![G::rho(i), G::rho(i)],
                vec![G::rho(i), G::sigma(i), G::lambda(i)],
            ],
        );
    }
    for i in 1..=n {
        for j in 1..n {
            if j != i && j + 1 != i {
                cat.push(
                    "com-e-sigma",
                    format!("i={i},j={j}"),
                    vec![G::e(i), G::sigma(j)],
                    vec![G::sigma(j), G::e(i)],
                );
            }
        }
    }
    for i in 1..n {
        cat.push(
            "com-e-sigma",
            format!("shift,i={i}"),
            vec![G::e(i), G::sigma(i)],
            vec![G::sigma(i), G::e(i + 1)],
        );
        cat.push(
            "com-e-sigma",
            format!("shift',i={i}"),
            vec![G::sigma(i), G::e(i)],
            vec![G::e(i + 1), G::sigma(i)],
        );
    }
    for i in 1..=n {
        for j in 1..n {
            if j != i && j + 1 != i {
                cat.push(
                    "two-zeros-lambda",
                    format!("com,i={i},j={j}"),
                    vec![G::e(i), G::lambda(j)],
                    vec![G::lambda(j), G::e(i)],
                );
                cat.push(
                    "two-zeros-rho",
                    format!("com,i={i},j={j}"),
                    vec![G::e(i), G::rho(j)],
                    vec![G::rho(j), G::e(i)],
                );
            }
        }
    }
    for i in 1..n {
        cat.push(
            "two-zeros-lambda",
            format!("absorb,i={i}"),
            vec![G::e(i + 1), G::lambda(i)],
            vec![G::lambda(i)],
        );
        cat.push_chain(
            "two-zeros-lambda",
            format!("chain,i={i}"),
            vec![
                vec![G::e(i), G::lambda(i)],
                vec![G::lambda(i), G::e(i + 1)],
                vec![G::lambda(i), G::e(i)],
                vec![G::e(i), G::e(i + 1)],
            ],
        );
        cat.push(
            "two-zeros-rho",
            format!("absorb,i={i}"),
            vec![G::rho(i), G::e(i + 1)],
            vec![G::rho(i)],
        );
        cat.push_chain(
            "two-zeros-rho",
            format!("chain,i={i}"),
            vec![
                vec![G::rho(i), G::e(i)],
                vec![G::e(i + 1), G::rho(i)],
                vec![G::e(i), G::rho(i)],
                vec![G::e(i), G::e(i + 1)],
            ],
        );
    }
    Ok(cat.out)
}

/// All instances of the derived relation families at rank `n`: products of
/// conjugated generators, the absorption lemmas, and the conjugation and
/// stabilizer lemmas. Conjugating permutations range over all of S_n for
/// `n <= 4` and over 100 seeded random samples per index tuple for larger
/// ranks.
pub fn derived_relation_instances(n: usize) -> Result<Vec<RelationInstance>> {
    if n < 3 {
        return Err(Error::RankTooSmall(n));
    }
    use GenLetter as G;
    let mut cat = Catalog { n, out: Vec::new() };
    let lam = |p, q| expand_lambda(n, p, q).expect("valid indices");
    let rho = |p, q| expand_rho(n, p, q).expect("valid indices");
    let sig = |p, q| expand_sigma(n, p, q).expect("valid indices");
    let ew = |i| Word::new(n, vec![G::e(i)]).expect("valid index");
    let cc = |parts: &[&Word]| -> Word {
        let mut acc = Word::empty(n).expect("n >= 3");
        for w in parts {
            acc = acc.concat(w).expect("same rank");
        }
        acc
    };

    // products of e's
    for p in 1..=n {
        cat.push_words("r1-00", format!("idem,p={p}"), cc(&[&ew(p), &ew(p)]), ew(p));
        for q in 1..=n {
            if q != p {
                cat.push_words(
                    "r1-00",
                    format!("com,p={p},q={q}"),
                    cc(&[&ew(p), &ew(q)]),
                    cc(&[&ew(q), &ew(p)]),
                );
            }
        }
    }
    // e against σ_{p,q}
    for p in 1..=n {
        for q in 1..=n {
            if p == q {
                continue;
            }
            if p < q {
                for k in 1..=n {
                    if k != p && k != q {
                        cat.push_words(
                            "r1-0",
                            format!("com,k={k},p={p},q={q}"),
                            cc(&[&ew(k), &sig(p, q)]),
                            cc(&[&sig(p, q), &ew(k)]),
                        );
                    }
                }
            }
            cat.push_words(
                "r1-0",
                format!("swap,p={p},q={q}"),
                cc(&[&ew(p), &sig(p, q)]),
                cc(&[&sig(p, q), &ew(q)]),
            );
        }
    }
    // e against λ_{p,q} and ρ_{p,q}
    for p in 1..=n {
        for q in 1..=n {
            if p == q {
                continue;
            }
            for k in 1..=n {
                if k != p && k != q {
                    cat.push_words(
                        "r1-1",
                        format!("com,k={k},p={p},q={q}"),
                        cc(&[&ew(k), &lam(p, q)]),
                        cc(&[&lam(p, q), &ew(k)]),
                    );
                    cat.push_words(
                        "r1-2",
                        format!("com,k={k},p={p},q={q}"),
                        cc(&[&ew(k), &rho(p, q)]),
                        cc(&[&rho(p, q), &ew(k)]),
                    );
                }
            }
            cat.push_words(
                "r1-1",
                format!("absorb,p={p},q={q}"),
                cc(&[&ew(q), &lam(p, q)]),
                lam(p, q),
            );
            let chain_l = [
                cc(&[&ew(p), &lam(p, q)]),
                cc(&[&lam(p, q), &ew(q)]),
                cc(&[&lam(p, q), &ew(p)]),
                cc(&[&ew(p), &ew(q)]),
            ];
            for (k, pair) in chain_l.windows(2).enumerate() {
                cat.push_words(
                    "r1-1",
                    format!("chain,p={p},q={q}#{k}"),
                    pair[0].clone(),
                    pair[1].clone(),
                );
            }
            cat.push_words(
                "r1-2",
                format!("absorb,p={p},q={q}"),
                cc(&[&rho(p, q), &ew(q)]),
                rho(p, q),
            );
            let chain_r = [
                cc(&[&rho(p, q), &ew(p)]),
                cc(&[&ew(q), &rho(p, q)]),
                cc(&[&ew(p), &rho(p, q)]),
                cc(&[&ew(p), &ew(q)]),
            ];
            for (k, pair) in chain_r.windows(2).enumerate() {
                cat.push_words(
                    "r1-2",
                    format!("chain,p={p},q={q}#{k}"),
                    pair[0].clone(),
                    pair[1].clone(),
                );
            }
        }
    }
    // squares of conjugated generators
    for p in 1..=n {
        for q in 1..=n {
            if p == q {
                continue;
            }
            let chain = [
                cc(&[&lam(p, q), &lam(p, q)]),
                cc(&[&rho(p, q), &rho(p, q)]),
                cc(&[&lam(p, q), &lam(q, p)]),
                cc(&[&rho(p, q), &rho(q, p)]),
                cc(&[&ew(p), &ew(q)]),
            ];
            for (k, pair) in chain.windows(2).enumerate() {
                cat.push_words(
                    "r1",
                    format!("p={p},q={q}#{k}"),
                    pair[0].clone(),
                    pair[1].clone(),
                );
            }
        }
    }
    // fully disjoint factors commute
    for_all_distinct(n, 4, &mut |idx| {
        let (k, l, p, q) = (idx[0], idx[1], idx[2], idx[3]);
        cat.push_words(
            "r2",
            format!("ll,k={k},l={l},p={p},q={q}"),
            cc(&[&lam(k, l), &lam(p, q)]),
            cc(&[&lam(p, q), &lam(k, l)]),
        );
        cat.push_words(
            "r2",
            format!("rr,k={k},l={l},p={p},q={q}"),
            cc(&[&rho(k, l), &rho(p, q)]),
            cc(&[&rho(p, q), &rho(k, l)]),
        );
        cat.push_words(
            "r2",
            format!("lr,k={k},l={l},p={p},q={q}"),
            cc(&[&lam(k, l), &rho(p, q)]),
            cc(&[&rho(p, q), &lam(k, l)]),
        );
    });
    // overlapping same-type products
    for_all_distinct(n, 3, &mut |idx| {
        let (k, q, l) = (idx[0], idx[1], idx[2]);
        let chain_l = [
            cc(&[&lam(k, q), &lam(k, l)]),
            cc(&[&lam(k, l), &lam(k, q)]),
            cc(&[&lam(k, q), &lam(q, l)]),
        ];
        for (t, pair) in chain_l.windows(2).enumerate() {
            cat.push_words(
                "r3",
                format!("l,k={k},q={q},l={l}#{t}"),
                pair[0].clone(),
                pair[1].clone(),
            );
        }
        let chain_r = [
            cc(&[&rho(k, l), &rho(k, q)]),
            cc(&[&rho(k, q), &rho(k, l)]),
            cc(&[&rho(l, q), &rho(k, l)]),
        ];
        for (t, pair) in chain_r.windows(2).enumerate() {
            cat.push_words(
                "r3",
                format!("r,k={k},q={q},l={l}#{t}"),
                pair[0].clone(),
                pair[1].clone(),
            );
        }
    });
    for_all_distinct(n, 3, &mut |idx| {
        let (k, l, p) = (idx[0], idx[1], idx[2]);
        cat.push_words(
            "r4",
            format!("l,k={k},l={l},p={p}"),
            cc(&[&lam(k, l), &lam(p, k)]),
            cc(&[&ew(l), &lam(p, k)]),
        );
        cat.push_words(
            "r4",
            format!("r,k={k},l={l},p={p}"),
            cc(&[&rho(p, k), &rho(k, l)]),
            cc(&[&ew(l), &rho(p, k)]),
        );
        cat.push_words(
            "r5",
            format!("l,k={k},l={l},p={p}"),
            cc(&[&lam(k, l), &lam(p, l)]),
            cc(&[&ew(k), &lam(p, l)]),
        );
        cat.push_words(
            "r5",
            format!("r,k={k},l={l},p={p}"),
            cc(&[&rho(p, l), &rho(k, l)]),
            cc(&[&ew(k), &rho(p, l)]),
        );
    });
    for p in 1..=n {
        for q in 1..=n {
            if p == q {
                continue;
            }
            let (k, l) = (p, q);
            cat.push_words(
                "r6",
                format!("a,k={k},l={l}"),
                cc(&[&lam(k, l), &rho(l, k)]),
                cc(&[&ew(l), &sig(k, l)]),
            );
            cat.push_words(
                "r6",
                format!("b,k={k},l={l}"),
                cc(&[&lam(k, l), &rho(k, l)]),
                ew(l),
            );
            cat.push_words(
                "r6",
                format!("c,k={k},l={l}"),
                cc(&[&rho(k, l), &lam(l, k)]),
                cc(&[&ew(k), &ew(l)]),
            );
            cat.push_words(
                "rr6",
                format!("k={k},l={l}"),
                cc(&[&rho(k, l), &lam(k, l)]),
                cc(&[&rho(l, k), &lam(l, k)]),
            );
        }
    }
    for_all_distinct(n, 3, &mut |idx| {
        let (k, l, q) = (idx[0], idx[1], idx[2]);
        let chain = [
            cc(&[&lam(k, l), &rho(k, q)]),
            cc(&[&rho(k, q), &lam(k, l)]),
            cc(&[&rho(k, q), &lam(k, q), &ew(l), &sig(q, l)]),
        ];
        for (t, pair) in chain.windows(2).enumerate() {
            cat.push_words(
                "r7",
                format!("a,k={k},l={l},q={q}#{t}"),
                pair[0].clone(),
                pair[1].clone(),
            );
        }
        let p = q;
        cat.push_words(
            "r7",
            format!("b,k={k},l={l},p={p}"),
            cc(&[&rho(k, l), &lam(p, k)]),
            cc(&[&lam(p, k), &ew(l)]),
        );
    });
    for_all_distinct(n, 3, &mut |idx| {
        let (k, l, p) = (idx[0], idx[1], idx[2]);
        cat.push_words(
            "r8",
            format!("a,k={k},l={l},p={p}"),
            cc(&[&lam(k, l), &rho(p, k)]),
            cc(&[&rho(p, k), &lam(p, k), &ew(l), &sig(k, l)]),
        );
        cat.push_words(
            "r8",
            format!("b,k={k},l={l},p={p}"),
            cc(&[&lam(p, k), &rho(k, l)]),
            cc(&[&sig(k, l), &ew(l), &rho(p, k), &lam(p, k)]),
        );
        cat.push_words(
            "r8",
            format!("c,k={k},l={l},p={p}"),
            cc(&[&rho(p, k), &lam(k, l)]),
            cc(&[&ew(l), &rho(p, k)]),
        );
        cat.push_words(
            "r10",
            format!("k={k},l={l},p={p}"),
            cc(&[&lam(k, l), &rho(p, l)]),
            cc(&[&sig(p, l), &ew(p), &rho(k, l), &lam(k, l), &sig(p, l)]),
        );
    });
    // absorption of transpositions by repeated λ-factors and e-products
    for_all_distinct(n, 3, &mut |idx| {
        let (q, i, j) = (idx[0], idx[1], idx[2]);
        cat.push_words(
            "eat-lambda",
            format!("q={q},i={i},j={j}"),
            cc(&[&lam(q, i), &lam(q, j), &sig(i, j)]),
            cc(&[&lam(q, i), &lam(q, j)]),
        );
        cat.push_words(
            "eat-lambda-anchor",
            format!("q={q},i={i},j={j}"),
            cc(&[&lam(q, i), &lam(q, j), &sig(q, j)]),
            cc(&[&lam(q, i), &lam(q, j)]),
        );
    });
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                cat.push_words(
                    "esigma",
                    format!("i={i},j={j}"),
                    cc(&[&ew(i), &ew(j), &sig(i, j)]),
                    cc(&[&ew(i), &ew(j)]),
                );
            }
        }
    }
    // conjugation transports indices
    let perms = conjugation_samples(n);
    for pi in &perms {
        let piw = perm_word(pi)?;
        let piw_inv = piw.involution();
        for p in 1..=n {
            for q in 1..=n {
                if p == q {
                    continue;
                }
                let (s, t) = (pi.apply(p), pi.apply(q));
                cat.push_words(
                    "lemma-lr",
                    format!("l,p={p},q={q},pi={pi}"),
                    cc(&[&piw_inv, &lam(p, q), &piw]),
                    lam(s, t),
                );
                cat.push_words(
                    "lemma-lr",
                    format!("r,p={p},q={q},pi={pi}"),
                    cc(&[&piw_inv, &rho(p, q), &piw]),
                    rho(s, t),
                );
            }
            cat.push_words(
                "lemma-e",
                format!("p={p},pi={pi}"),
                cc(&[&piw_inv, &ew(p), &piw]),
                ew(pi.apply(p)),
            );
        }
    }
    // stabilizers of λ_i, ρ_i, e_i under conjugation
    for i in 1..n {
        for j in 1..n {
            if i.abs_diff(j) >= 2 {
                cat.push(
                    "stabilizer",
                    format!("l,i={i},j={j}"),
                    vec![G::sigma(j), G::lambda(i), G::sigma(j)],
                    vec![G::lambda(i)],
                );
                cat.push(
                    "stabilizer",
                    format!("r,i={i},j={j}"),
                    vec![G::sigma(j), G::rho(i), G::sigma(j)],
                    vec![G::rho(i)],
                );
            }
        }
    }
    for i in 2..=n.saturating_sub(2) {
        let t = sig(i - 1, i + 2);
        cat.push_words(
            "stabilizer",
            format!("l-span,i={i}"),
            cc(&[&t, &Word::new(n, vec![G::lambda(i)])?, &t]),
            Word::new(n, vec![G::lambda(i)])?,
        );
        cat.push_words(
            "stabilizer",
            format!("r-span,i={i}"),
            cc(&[&t, &Word::new(n, vec![G::rho(i)])?, &t]),
            Word::new(n, vec![G::rho(i)])?,
        );
    }
    for i in 1..=n {
        for j in 1..n {
            if j != i && j + 1 != i {
                cat.push(
                    "stabilizer",
                    format!("e,i={i},j={j}"),
                    vec![G::sigma(j), G::e(i), G::sigma(j)],
                    vec![G::e(i)],
                );
            }
        }
    }
    for i in 2..n {
        let t = sig(i - 1, i + 1);
        cat.push_words(
            "stabilizer",
            format!("e-span,i={i}"),
            cc(&[&t, &ew(i), &t]),
            ew(i),
        );
    }
    Ok(cat.out)
}

fn for_all_distinct(n: usize, arity: usize, f: &mut dyn FnMut(&[usize])) {
    let mut idx = vec![0usize; arity];
    fn rec(n: usize, depth: usize, idx: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if depth == idx.len() {
            f(idx);
            return;
        }
        for v in 1..=n {
            if idx[..depth].contains(&v) {
                continue;
            }
            idx[depth] = v;
            rec(n, depth + 1, idx, f);
        }
    }
    rec(n, 0, &mut idx, f);
}

/// All of S_n for n <= 4, otherwise 100 seeded random permutations.
fn conjugation_samples(n: usize) -> Vec<Perm> {
    if n <= 4 {
        Perm::all(n)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5050_1234);
        (0..100).map(|_| Perm::random(n, &mut rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn word(n: usize, text: &str) -> Word {
        Word::parse(text, n).unwrap()
    }

    pub(crate) fn random_word<R: Rng>(n: usize, max_len: usize, rng: &mut R) -> Word {
        let len = rng.gen_range(0..=max_len);
        let letters = (0..len)
            .map(|_| match rng.gen_range(0..4) {
                0 => GenLetter::sigma(rng.gen_range(1..n)),
                1 => GenLetter::lambda(rng.gen_range(1..n)),
                2 => GenLetter::rho(rng.gen_range(1..n)),
                _ => GenLetter::e(rng.gen_range(1..=n)),
            })
            .collect();
        Word::new(n, letters).unwrap()
    }

    #[test]
    fn eval_lambda_rho_is_eps2() {
        assert_eq!(
            word(3, "l1 r1").eval(),
            Diagram::generator_eps(3, 2).unwrap()
        );
    }

    #[test]
    fn eval_sigma_squared_is_identity() {
        assert_eq!(word(3, "s1 s1").eval(), Diagram::identity(3));
        assert_eq!(Word::empty(3).unwrap().eval(), Diagram::identity(3));
    }

    #[test]
    fn eval_rho_lambda_joins_both_columns() {
        let expected = Diagram::new(3, vec![vec![1, 2, -1, -2], vec![3, -3]]).unwrap();
        assert_eq!(word(3, "r1 l1").eval(), expected);
    }

    #[test]
    fn involution_reverses_and_swaps() {
        assert_eq!(Word::empty(3).unwrap().involution(), Word::empty(3).unwrap());
        assert_eq!(word(3, "l1 s1").involution(), word(3, "s1 r1"));
        let w = word(4, "s1 l2 e3 r1");
        assert_eq!(w.involution().involution(), w);
    }

    #[test]
    fn involution_matches_diagram_mirror() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 3..=6 {
            for _ in 0..200 {
                let w = random_word(n, 12, &mut rng);
                assert_eq!(w.involution().eval(), w.eval().star(), "word {w}");
            }
        }
    }

    #[test]
    fn eval_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let u = random_word(4, 8, &mut rng);
            let v = random_word(4, 8, &mut rng);
            assert_eq!(
                u.concat(&v).unwrap().eval(),
                u.eval().multiply(&v.eval()).unwrap()
            );
        }
    }

    #[test]
    fn expand_sigma_adjacent_is_single_letter() {
        assert_eq!(expand_sigma(4, 1, 2).unwrap(), word(4, "s1"));
        assert_eq!(expand_sigma(4, 2, 1).unwrap(), word(4, "s1"));
        assert_eq!(expand_sigma(4, 1, 3).unwrap(), word(4, "s1 s2 s1"));
    }

    #[test]
    fn expand_sigma_evaluates_to_transposition() {
        for n in 3..=5 {
            for p in 1..=n {
                for q in 1..=n {
                    if p != q {
                        let t = Perm::transposition(n, p, q).unwrap();
                        assert_eq!(
                            expand_sigma(n, p, q).unwrap().eval(),
                            Diagram::perm_diagram(&t)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn expand_lambda_adjacent_matches_plain_generator() {
        for n in 3..=5 {
            for i in 1..n {
                assert_eq!(
                    expand_lambda(n, i, i + 1).unwrap().eval(),
                    Diagram::generator_l(n, i, i + 1).unwrap()
                );
                assert_eq!(
                    expand_rho(n, i, i + 1).unwrap().eval(),
                    Diagram::generator_r(n, i, i + 1).unwrap()
                );
            }
        }
    }

    #[test]
    fn expand_lambda_general_indices() {
        assert_eq!(
            expand_lambda(4, 3, 1).unwrap().eval(),
            Diagram::generator_l(4, 3, 1).unwrap()
        );
        for n in 3..=5 {
            for p in 1..=n {
                for q in 1..=n {
                    if p != q {
                        assert_eq!(
                            expand_lambda(n, p, q).unwrap().eval(),
                            Diagram::generator_l(n, p, q).unwrap()
                        );
                        assert_eq!(
                            expand_rho(n, p, q).unwrap().eval(),
                            Diagram::generator_r(n, p, q).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn conjugating_permutation_choice_is_immaterial() {
        // any π with π(1)=p, π(2)=q gives the same value
        let n = 4;
        for p in 1..=n {
            for q in 1..=n {
                if p == q {
                    continue;
                }
                for pi in Perm::all(n) {
                    if pi.apply(1) != p || pi.apply(2) != q {
                        continue;
                    }
                    let piw = perm_word(&pi).unwrap();
                    let alt = piw
                        .involution()
                        .concat(&Word::new(n, vec![GenLetter::lambda(1)]).unwrap())
                        .unwrap()
                        .concat(&piw)
                        .unwrap();
                    assert_eq!(alt.eval(), expand_lambda(n, p, q).unwrap().eval());
                }
            }
        }
    }

    #[test]
    fn expand_blocks() {
        assert_eq!(
            expand_e_block(3, &BTreeSet::new()).unwrap(),
            Word::empty(3).unwrap()
        );
        let a: BTreeSet<usize> = [2].into();
        assert_eq!(expand_r_block(3, 1, &a).unwrap(), word(3, "r1"));
        let m: BTreeSet<usize> = [1, 2].into();
        assert_eq!(
            expand_e_block(3, &m).unwrap().eval(),
            word(3, "r1 r1").eval()
        );
        assert!(expand_r_block(3, 2, &[2].into()).is_err());
    }

    #[test]
    fn catalog_counts_match_index_ranges() {
        let inst = relation_instances(3).unwrap();
        let count = |fam: &str| inst.iter().filter(|r| r.family == fam).count();
        assert_eq!(count("c1"), 2);
        assert_eq!(count("c2"), 0);
        let inst4 = relation_instances(4).unwrap();
        assert_eq!(inst4.iter().filter(|r| r.family == "df-e").count(), 4);
    }

    #[test]
    fn derived_catalog_spot_checks() {
        let inst = derived_relation_instances(3).unwrap();
        let r6b: Vec<_> = inst
            .iter()
            .filter(|r| r.family == "r6" && r.label == "b,k=1,l=2")
            .collect();
        assert_eq!(r6b.len(), 1);
        assert_eq!(r6b[0].rhs, word(3, "e2"));
        assert!(inst.iter().any(|r| r.family == "rr6" && r.label == "k=1,l=2"));
        // r2 needs four distinct indices, so it is absent at rank 3
        assert!(!inst.iter().any(|r| r.family == "r2"));
        assert!(derived_relation_instances(4)
            .unwrap()
            .iter()
            .any(|r| r.family == "r2"));
        // r10 uses three indices and is emitted from rank 3 on
        assert!(inst.iter().any(|r| r.family == "r10"));
    }

    #[test]
    fn word_parse_display_round_trip() {
        let w = word(4, "s1 l2 r3 e4");
        assert_eq!(w.to_string(), "s1 l2 r3 e4");
        assert_eq!(Word::parse(&w.to_string(), 4).unwrap(), w);
        assert_eq!(Word::parse("", 3).unwrap(), Word::empty(3).unwrap());
        assert!(Word::parse("x1", 3).is_err());
        assert!(Word::parse("s3", 3).is_err());
        assert!(Word::parse("e4", 3).is_err());
        assert!(Word::new(2, vec![]).is_err());
    }
}
