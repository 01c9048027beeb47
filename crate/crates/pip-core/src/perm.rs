//! Permutations of `{1..n}` in one-line form.
//!
//! Products compose left-to-right: `a.compose(&b)` applies `a` first, then
//! `b`, matching left-to-right diagram composition.

use crate::error::{Error, Result};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

/// A permutation of `{1..n}`, stored as the image sequence `images[k-1] = π(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            images: (1..=n).collect(),
        }
    }

    /// Builds a permutation from its one-line form, validating bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            if v < 1 || v > n || seen[v] {
                return Err(Error::InvalidIndex(format!(
                    "one-line form {images:?} is not a bijection of 1..={n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Perm { images })
    }

    /// The transposition (a b) in the symmetric group on `{1..n}`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a < 1 || b < 1 || a > n || b > n || a == b {
            return Err(Error::InvalidIndex(format!(
                "transposition ({a} {b}) out of range for n={n}"
            )));
        }
        let mut images: Vec<usize> = (1..=n).collect();
        images.swap(a - 1, b - 1);
        Ok(Perm { images })
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// `self` followed by `then`: the result maps `x` to `then(self(x))`.
    pub fn compose(&self, then: &Perm) -> Perm {
        debug_assert_eq!(self.n(), then.n());
        Perm {
            images: self.images.iter().map(|&v| then.apply(v)).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v - 1] = i + 1;
        }
        Perm { images }
    }

    /// Decomposes into adjacent transpositions: the returned indices `i`
    /// denote factors (i i+1), composing left-to-right back to `self`.
    pub fn adjacent_transpositions(&self) -> Vec<usize> {
        let mut arr = self.images.clone();
        let mut word = Vec::new();
        loop {
            let mut swapped = false;
            for j in 0..arr.len().saturating_sub(1) {
                if arr[j] > arr[j + 1] {
                    arr.swap(j, j + 1);
                    word.push(j + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        word
    }

    /// All of S_n in a deterministic order. Intended for small `n`.
    pub fn all(n: usize) -> Vec<Perm> {
        (1..=n)
            .permutations(n)
            .map(|images| Perm { images })
            .collect()
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Perm {
        let mut images: Vec<usize> = (1..=n).collect();
        images.shuffle(rng);
        Perm { images }
    }
}

impl std::fmt::Display for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.images.iter().join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_is_left_to_right() {
        let n = 3;
        let s12 = Perm::transposition(n, 1, 2).unwrap();
        let s23 = Perm::transposition(n, 2, 3).unwrap();
        // 1 -> 2 -> 3 under (1 2) then (2 3)
        let p = s12.compose(&s23);
        assert_eq!(p.apply(1), 3);
        assert_eq!(p.apply(2), 1);
        assert_eq!(p.apply(3), 2);
    }

    #[test]
    fn inverse_cancels() {
        let p = Perm::from_images(vec![3, 1, 4, 2]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(p.inverse().compose(&p).is_identity());
    }

    #[test]
    fn from_images_rejects_non_bijections() {
        assert!(Perm::from_images(vec![1, 1, 3]).is_err());
        assert!(Perm::from_images(vec![1, 2, 4]).is_err());
    }

    #[test]
    fn adjacent_transpositions_recompose() {
        for p in Perm::all(4) {
            let mut q = Perm::identity(4);
            for i in p.adjacent_transpositions() {
                q = q.compose(&Perm::transposition(4, i, i + 1).unwrap());
            }
            // recorded order composes left-to-right to the original
            let mut r = Perm::identity(4);
            for i in p.adjacent_transpositions() {
                let t = Perm::transposition(4, i, i + 1).unwrap();
                r = r.compose(&t);
            }
            assert_eq!(r, p);
            assert_eq!(q, p);
        }
    }

    #[test]
    fn product_pattern_moves_one_and_two() {
        // (σ2 σ1)(σ3 σ2) ... (σi σ{i-1}) maps 1 to i and 2 to i+1.
        let n = 5;
        for i in 2..=n - 1 {
            let mut q = Perm::identity(n);
            for j in 2..=i {
                q = q
                    .compose(&Perm::transposition(n, j, j + 1).unwrap())
                    .compose(&Perm::transposition(n, j - 1, j).unwrap());
            }
            assert_eq!(q.apply(1), i);
            assert_eq!(q.apply(2), i + 1);
        }
    }
}
