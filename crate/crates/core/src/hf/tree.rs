//! Rooted unordered finite trees and repetition-free enumerations of the
//! trees with a fixed number of leaves.
//!
//! Trees are grouped into classes by `(leaves, nodes)`. Within a class a
//! tree is identified by its rank, computed from the multiset of its
//! children with a mixed-radix scheme over the classes of those children.
//! The enumeration `T_k` lists the trees with `k` leaves by node count, then
//! by rank.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use super::HfError;

/// A canonical tree. The derived order compares `(leaves, nodes, rank)`,
/// which already determines the tree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteTree {
    leaves: usize,
    nodes: usize,
    rank: u128,
    children: Vec<FiniteTree>,
}

type Count = Option<u128>;

thread_local! {
    static FOREST: RefCell<HashMap<(usize, usize, usize, usize), Count>> = RefCell::new(HashMap::new());
}

fn min_nodes(k: usize) -> usize {
    if k == 1 {
        1
    } else {
        k + 1
    }
}

/// Clamps a class bound `(kb, nb)` to what can occur in a forest with
/// `m` nodes and `l` leaves. Returns `kb == 0` when no class remains.
fn normalize(mut kb: usize, mut nb: usize, m: usize, l: usize) -> (usize, usize) {
    if kb > l {
        kb = l;
        nb = m;
    }
    nb = nb.min(m);
    while kb > 0 && nb < min_nodes(kb) {
        kb -= 1;
        nb = m;
    }
    (kb, nb)
}

fn prev(kb: usize, nb: usize) -> (usize, usize) {
    if nb > 1 {
        (kb, nb - 1)
    } else {
        (kb - 1, usize::MAX)
    }
}

/// Number of trees with `n` nodes and `k` leaves.
pub fn count_trees(n: usize, k: usize) -> Count {
    if n == 0 || k == 0 {
        return Some(0);
    }
    if n == 1 {
        return Some(u128::from(k == 1));
    }
    if k == 1 {
        return Some(1);
    }
    if n < k + 1 {
        return Some(0);
    }
    forest_count(k, n - 1, n - 1, k)
}

/// Multisets of trees with `m` nodes and `l` leaves in total, each tree's
/// class at most `(kb, nb)` in `(leaves, nodes)` order.
fn forest_count(kb: usize, nb: usize, m: usize, l: usize) -> Count {
    if m == 0 || l == 0 {
        return Some(u128::from(m == 0 && l == 0));
    }
    if m < l {
        return Some(0);
    }
    let (kb, nb) = normalize(kb, nb, m, l);
    if kb == 0 {
        return Some(0);
    }
    if l == 1 {
        return Some(u128::from(kb > 1 || nb == m));
    }
    let key = (kb, nb, m, l);
    if let Some(c) = FOREST.with(|f| f.borrow().get(&key).copied()) {
        return c;
    }
    let result = (|| {
        let c = count_trees(nb, kb)?;
        let (pk, pn) = prev(kb, nb);
        let mut sum: u128 = 0;
        for j in 0..=(m / nb).min(l / kb) {
            if j > 0 && c == 0 {
                break;
            }
            let w = multichoose(c, j)?.checked_mul(forest_count(pk, pn, m - j * nb, l - j * kb)?)?;
            sum = sum.checked_add(w)?;
        }
        Some(sum)
    })();
    FOREST.with(|f| f.borrow_mut().insert(key, result));
    result
}

fn multichoose(c: u128, j: usize) -> Count {
    if j == 0 {
        return Some(1);
    }
    if c == 0 {
        return Some(0);
    }
    binom(c + j as u128 - 1, j)
}

fn binom(n: u128, k: usize) -> Count {
    let k = k as u128;
    if k > n {
        return Some(0);
    }
    let mut r: u128 = 1;
    for i in 1..=k {
        r = r.checked_mul(n - k + i)? / i;
    }
    Some(r)
}

/// Colex rank of a sorted multiset of `j` values below `c`.
fn rank_multiset(sorted: &[u128]) -> Count {
    let mut r: u128 = 0;
    for (i, &a) in sorted.iter().enumerate() {
        r = r.checked_add(binom(a + i as u128, i + 1)?)?;
    }
    Some(r)
}

fn unrank_multiset_values(c: u128, j: usize, mut r: u128) -> Option<Vec<u128>> {
    let mut out = vec![0; j];
    for i in (1..=j).rev() {
        // largest b with binom(b, i) <= r, searched in [i-1, c+i-1)
        let (mut lo, mut hi) = (i as u128 - 1, c + i as u128 - 1);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            match binom(mid, i) {
                Some(v) if v <= r => lo = mid,
                _ => hi = mid,
            }
        }
        r -= binom(lo, i)?;
        out[i - 1] = lo - (i as u128 - 1);
    }
    Some(out)
}

impl FiniteTree {
    pub fn leaf() -> Self {
        FiniteTree { leaves: 1, nodes: 1, rank: 0, children: Vec::new() }
    }

    /// Path with `n` nodes, the only tree in its class.
    fn path(n: usize) -> Self {
        let mut t = FiniteTree::leaf();
        for i in 2..=n {
            t = FiniteTree { leaves: 1, nodes: i, rank: 0, children: vec![t] };
        }
        t
    }

    /// Root over the given subtrees; an empty list gives a leaf.
    pub fn from_children(mut children: Vec<FiniteTree>) -> Result<Self, HfError> {
        if children.is_empty() {
            return Ok(FiniteTree::leaf());
        }
        children.sort();
        let leaves = children.iter().map(|c| c.leaves).sum();
        let nodes = 1 + children.iter().map(|c| c.nodes).sum::<usize>();
        let rank = rank_forest(&children, nodes - 1, leaves).ok_or(HfError::TreeTooLarge)?;
        Ok(FiniteTree { leaves, nodes, rank, children })
    }

    pub fn children(&self) -> &[FiniteTree] {
        &self.children
    }

    pub fn leaves(&self) -> usize {
        self.leaves
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Position among the trees with the same node and leaf counts.
    pub fn class_rank(&self) -> u128 {
        self.rank
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Classes with no member contribute nothing to the rank, so the walk
/// visits only the classes present.
fn rank_forest(sorted: &[FiniteTree], mut m: usize, mut l: usize) -> Count {
    let mut rest = sorted;
    let mut acc: u128 = 0;
    while let Some(top) = rest.last() {
        let (k, n) = (top.leaves, top.nodes);
        let j = rest.iter().rev().take_while(|t| t.leaves == k && t.nodes == n).count();
        let c = count_trees(n, k)?;
        let (pk, pn) = prev(k, n);
        let mut offset: u128 = 0;
        for jj in 0..j {
            let w = multichoose(c, jj)?.checked_mul(forest_count(pk, pn, m - jj * n, l - jj * k)?)?;
            offset = offset.checked_add(w)?;
        }
        let h_rest = forest_count(pk, pn, m - j * n, l - j * k)?;
        let group = &rest[rest.len() - j..];
        let ranks: Vec<u128> = group.iter().map(|t| t.rank).collect();
        let r_mult = rank_multiset(&ranks)?;
        acc = acc.checked_add(offset)?.checked_add(r_mult.checked_mul(h_rest)?)?;
        rest = &rest[..rest.len() - j];
        m -= j * n;
        l -= j * k;
    }
    Some(acc)
}

fn unrank_class(n: usize, k: usize, r: u128) -> Option<FiniteTree> {
    if k == 1 {
        return (r == 0).then(|| FiniteTree::path(n));
    }
    if r >= count_trees(n, k)? {
        return None;
    }
    let children = unrank_forest(k, n - 1, n - 1, k, r)?;
    Some(FiniteTree { leaves: k, nodes: n, rank: r, children })
}

fn unrank_forest(kb: usize, nb: usize, mut m: usize, mut l: usize, mut r: u128) -> Option<Vec<FiniteTree>> {
    let (mut kb, mut nb) = (kb, nb);
    let mut out = Vec::new();
    while m > 0 || l > 0 {
        let (k, n) = normalize(kb, nb, m, l);
        if k == 0 {
            return None;
        }
        let c = count_trees(n, k)?;
        let (pk, pn) = prev(k, n);
        let jmax = (m / n).min(l / k);
        let mut chosen = None;
        for j in 0..=jmax {
            if j > 0 && c == 0 {
                break;
            }
            let w = multichoose(c, j)?.checked_mul(forest_count(pk, pn, m - j * n, l - j * k)?)?;
            if r < w {
                chosen = Some(j);
                break;
            }
            r -= w;
        }
        let j = chosen?;
        if j > 0 {
            let h_rest = forest_count(pk, pn, m - j * n, l - j * k)?;
            let idx = unrank_multiset_values(c, j, r / h_rest)?;
            r %= h_rest;
            for i in idx {
                out.push(unrank_class(n, k, i)?);
            }
            m -= j * n;
            l -= j * k;
        }
        kb = pk;
        nb = pn;
    }
    if r != 0 {
        return None;
    }
    out.sort();
    Some(out)
}

/// The `n`-th tree (0-based) with exactly `k` leaves.
pub fn tree_unrank(k: usize, n: u128) -> Result<FiniteTree, HfError> {
    if k == 0 {
        return Err(HfError::LeafCount { expected: 0, got: 0 });
    }
    if k == 1 {
        let nodes = usize::try_from(n).ok().and_then(|v| v.checked_add(1)).ok_or(HfError::TreeTooLarge)?;
        return Ok(FiniteTree::path(nodes));
    }
    let mut rem = n;
    let mut nodes = k + 1;
    loop {
        let c = count_trees(nodes, k).ok_or(HfError::TreeTooLarge)?;
        if rem < c {
            return unrank_class(nodes, k, rem).ok_or(HfError::TreeTooLarge);
        }
        rem -= c;
        nodes += 1;
    }
}

/// Inverse of [`tree_unrank`].
pub fn tree_rank(k: usize, t: &FiniteTree) -> Result<u128, HfError> {
    if t.leaves != k {
        return Err(HfError::LeafCount { expected: k, got: t.leaves });
    }
    if k == 1 {
        return Ok(t.nodes as u128 - 1);
    }
    let mut offset: u128 = 0;
    for n in k + 1..t.nodes {
        offset = count_trees(n, k).and_then(|c| offset.checked_add(c)).ok_or(HfError::TreeTooLarge)?;
    }
    offset.checked_add(t.rank).ok_or(HfError::TreeTooLarge)
}

impl fmt::Display for FiniteTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for c in &self.children {
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for FiniteTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
