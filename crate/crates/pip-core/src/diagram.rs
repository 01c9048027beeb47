//! Elements of the partial dual inverse symmetric monoid and their product.
//!
//! An element of rank `n` is a partition of the signed labels
//! `{+1..+n, -1..-n}` into *lines* (blocks containing at least one positive
//! and one negative label) and *points* (singletons). The label `+k` stands
//! for `k` on the left side of a diagram, `-k` for `k'` on the right side.
//!
//! The product is computed through the anchor embedding: both operands are
//! viewed inside the point-free monoid on `n + 1` labels, where all points of
//! an operand are collected into the block of the added anchor label. The
//! embedding is never materialized; a union-find over left / middle / right
//! node columns produces the same classes directly.

use crate::error::{Error, Result};
use crate::perm::Perm;
use std::collections::BTreeSet;

/// An element of the monoid: a validated, canonically ordered partition.
///
/// Canonical order: within a block, positive labels ascending then negative
/// labels by ascending absolute value; blocks sorted by smallest positive
/// label, blocks without positive labels afterward by smallest absolute
/// value. Equality and hashing are therefore structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    n: usize,
    blocks: Vec<Vec<i32>>,
}

fn block_sort_key(block: &[i32]) -> (u8, i32) {
    match block.iter().filter(|&&x| x > 0).min() {
        Some(&p) => (0, p),
        None => (1, block.iter().map(|x| x.abs()).min().unwrap_or(0)),
    }
}

fn canonicalize_block(block: &mut Vec<i32>) {
    block.sort_by_key(|&x| if x > 0 { (0, x) } else { (1, -x) });
}

impl Diagram {
    /// Validates and canonically orders a set of blocks as a rank-`n` element.
    ///
    /// Rejects non-partitions of the signed labels and any block of size two
    /// or more lacking a positive or a negative label.
    pub fn new<I, B>(n: usize, blocks: I) -> Result<Self>
    where
        I: IntoIterator<Item = B>,
        B: IntoIterator<Item = i32>,
    {
        if n < 1 {
            return Err(Error::InvalidRank(n));
        }
        let mut seen = vec![false; 2 * n];
        let slot = |label: i32| -> usize {
            if label > 0 {
                label as usize - 1
            } else {
                n + (-label) as usize - 1
            }
        };
        let mut out: Vec<Vec<i32>> = Vec::new();
        for block in blocks {
            let mut b: Vec<i32> = block.into_iter().collect();
            if b.is_empty() {
                return Err(Error::InvalidDiagram("empty block".into()));
            }
            for &label in &b {
                if label == 0 || label.unsigned_abs() as usize > n {
                    return Err(Error::InvalidDiagram(format!(
                        "label {label} out of range for n={n}"
                    )));
                }
                if seen[slot(label)] {
                    return Err(Error::InvalidDiagram(format!(
                        "label {label} appears in more than one block"
                    )));
                }
                seen[slot(label)] = true;
            }
            if b.len() >= 2 {
                let has_pos = b.iter().any(|&x| x > 0);
                let has_neg = b.iter().any(|&x| x < 0);
                if !has_pos || !has_neg {
                    return Err(Error::InvalidDiagram(format!(
                        "block {b:?} is neither a point nor a line"
                    )));
                }
            }
            canonicalize_block(&mut b);
            out.push(b);
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidDiagram(
                "blocks do not cover all signed labels".into(),
            ));
        }
        out.sort_by_key(|b| block_sort_key(b));
        Ok(Diagram { n, blocks: out })
    }

    /// The identity: lines `{+k, -k}` for every `k`.
    pub fn identity(n: usize) -> Self {
        Diagram {
            n,
            blocks: (1..=n as i32).map(|k| vec![k, -k]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<i32>] {
        &self.blocks
    }

    /// True when no block is a point, i.e. the element lies in the
    /// point-free submonoid of block bijections.
    pub fn is_point_free(&self) -> bool {
        self.blocks.iter().all(|b| b.len() >= 2)
    }

    /// The product, left factor applied first.
    pub fn multiply(&self, other: &Diagram) -> Result<Diagram> {
        if self.n != other.n {
            return Err(Error::RankMismatch(self.n, other.n));
        }
        let n = self.n;
        let cols = n + 1; // n labels plus the anchor
        let left = |k: usize| k - 1;
        let mid = |k: usize| cols + k - 1;
        let right = |k: usize| 2 * cols + k - 1;

        let mut dsu = DisjointSets::new(3 * cols);
        // anchor of both operands shares the middle anchor node
        dsu.union(left(cols), mid(cols));
        dsu.union(mid(cols), right(cols));
        for block in &self.blocks {
            if block.len() == 1 {
                let x = block[0];
                let node = if x > 0 { left(x as usize) } else { mid(-x as usize) };
                dsu.union(node, mid(cols));
            } else {
                let first = block[0];
                let anchor_node = if first > 0 {
                    left(first as usize)
                } else {
                    mid(-first as usize)
                };
                for &x in &block[1..] {
                    let node = if x > 0 { left(x as usize) } else { mid(-x as usize) };
                    dsu.union(anchor_node, node);
                }
            }
        }
        for block in &other.blocks {
            if block.len() == 1 {
                let x = block[0];
                let node = if x > 0 { mid(x as usize) } else { right(-x as usize) };
                dsu.union(node, mid(cols));
            } else {
                let first = block[0];
                let anchor_node = if first > 0 {
                    mid(first as usize)
                } else {
                    right(-first as usize)
                };
                for &x in &block[1..] {
                    let node = if x > 0 { mid(x as usize) } else { right(-x as usize) };
                    dsu.union(anchor_node, node);
                }
            }
        }

        // read off classes restricted to the outer columns
        let anchor_root = dsu.find(mid(cols));
        let mut class_of: std::collections::HashMap<usize, Vec<i32>> =
            std::collections::HashMap::new();
        let mut points: Vec<Vec<i32>> = Vec::new();
        for k in 1..=n {
            for (node, label) in [(left(k), k as i32), (right(k), -(k as i32))] {
                let root = dsu.find(node);
                if root == anchor_root {
                    points.push(vec![label]);
                } else {
                    class_of.entry(root).or_default().push(label);
                }
            }
        }
        let mut blocks: Vec<Vec<i32>> = class_of.into_values().collect();
        blocks.extend(points);
        for b in &mut blocks {
            canonicalize_block(b);
        }
        blocks.sort_by_key(|b| block_sort_key(b));
        Ok(Diagram { n, blocks })
    }

    /// The mirror involution: swaps primed and unprimed labels.
    /// An anti-automorphism: `(a·b)* = b*·a*`.
    pub fn star(&self) -> Diagram {
        let blocks = self.blocks.iter().map(|b| b.iter().map(|&x| -x));
        Diagram::new(self.n, blocks).expect("mirror of a valid diagram is valid")
    }

    /// The unit-group element `s_{x,y}`: lines `{x,y'}`, `{x',y}`, identity elsewhere.
    pub fn generator_s(n: usize, x: usize, y: usize) -> Result<Diagram> {
        check_pair(n, x, y)?;
        let mut blocks = vec![vec![x as i32, -(y as i32)], vec![y as i32, -(x as i32)]];
        blocks.extend(identity_strands(n, &[x, y]));
        Diagram::new(n, blocks)
    }

    /// `r_{x,y}`: line `{x,y,x'}` plus point `{y'}`, identity elsewhere.
    pub fn generator_r(n: usize, x: usize, y: usize) -> Result<Diagram> {
        check_pair(n, x, y)?;
        let mut blocks = vec![vec![x as i32, y as i32, -(x as i32)], vec![-(y as i32)]];
        blocks.extend(identity_strands(n, &[x, y]));
        Diagram::new(n, blocks)
    }

    /// `l_{x,y}`: line `{x,x',y'}` plus point `{y}`, identity elsewhere.
    pub fn generator_l(n: usize, x: usize, y: usize) -> Result<Diagram> {
        check_pair(n, x, y)?;
        let mut blocks = vec![vec![x as i32, -(x as i32), -(y as i32)], vec![y as i32]];
        blocks.extend(identity_strands(n, &[x, y]));
        Diagram::new(n, blocks)
    }

    /// `ε_x`: points `{x}`, `{x'}`, identity elsewhere.
    pub fn generator_eps(n: usize, x: usize) -> Result<Diagram> {
        if x < 1 || x > n {
            return Err(Error::InvalidIndex(format!("index {x} out of 1..={n}")));
        }
        let mut blocks = vec![vec![x as i32], vec![-(x as i32)]];
        blocks.extend(identity_strands(n, &[x]));
        Diagram::new(n, blocks)
    }

    /// The unit-group diagram of a permutation: lines `{+k, -π(k)}`.
    ///
    /// `perm_diagram(p) · perm_diagram(q) == perm_diagram(p then q)`.
    pub fn perm_diagram(p: &Perm) -> Diagram {
        let n = p.n();
        Diagram::new(n, (1..=n).map(|k| vec![k as i32, -(p.apply(k) as i32)]))
            .expect("permutation diagram is valid")
    }

    /// Serializes in the bit-exact bracketed text format, e.g. `[[1,2,-1],[-2]]`.
    pub fn serialize(&self) -> String {
        serde_json::to_string(&self.blocks).expect("serializing Vec<Vec<i32>> cannot fail")
    }

    /// Parses the bracketed text format, validating the result as a rank-`n`
    /// element. Whitespace is insignificant; Unicode minus is accepted.
    pub fn parse(text: &str, n: usize) -> Result<Diagram> {
        let cleaned: String = text.replace('\u{2212}', "-");
        let blocks: Vec<Vec<i32>> = serde_json::from_str(&cleaned)
            .map_err(|e| Error::Parse(format!("bad diagram text {text:?}: {e}")))?;
        Diagram::new(n, blocks)
    }

    /// Sets of positive labels occurring in left points / right points.
    pub fn left_points(&self) -> BTreeSet<usize> {
        self.blocks
            .iter()
            .filter(|b| b.len() == 1 && b[0] > 0)
            .map(|b| b[0] as usize)
            .collect()
    }

    pub fn right_points(&self) -> BTreeSet<usize> {
        self.blocks
            .iter()
            .filter(|b| b.len() == 1 && b[0] < 0)
            .map(|b| -b[0] as usize)
            .collect()
    }
}

impl std::fmt::Display for Diagram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn check_pair(n: usize, x: usize, y: usize) -> Result<()> {
    if x < 1 || y < 1 || x > n || y > n {
        return Err(Error::InvalidIndex(format!(
            "indices ({x},{y}) out of 1..={n}"
        )));
    }
    if x == y {
        return Err(Error::InvalidIndex(format!("indices must differ, got {x}")));
    }
    Ok(())
}

fn identity_strands(n: usize, except: &[usize]) -> Vec<Vec<i32>> {
    (1..=n)
        .filter(|k| !except.contains(k))
        .map(|k| vec![k as i32, -(k as i32)])
        .collect()
}

/// Array-based union-find with path halving, scratch state for one product.
struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(len: usize) -> Self {
        DisjointSets {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            self.parent[ra] = rb;
            self.size[rb] += self.size[ra];
        } else {
            self.parent[rb] = ra;
            self.size[ra] += self.size[rb];
        }
    }
}
