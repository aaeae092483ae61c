//! Codes for elements of the bi-infinite direct sum inside HF.
//!
//! [`encode_seq`] is the flat form: the set of pairs `{{i}, {{x_i}}}` over
//! the support. [`encode`] is the tree form: a vector with support spanning
//! `i0..=i0+k` becomes the tree `T_{k+1}(zigzag(i0))` whose leaves, in
//! depth-first order, carry the pairs for `i0, i0+1, ..., i0+k` and whose
//! inner nodes are the sets of their children's codes.

use std::collections::BTreeMap;

use crate::machine::RInfinity;
use crate::scalar::Scalar;

use super::set::HfSet;
use super::tree::{tree_rank, tree_unrank, FiniteTree};
use super::HfError;

pub fn zigzag(i: i64) -> u128 {
    if i >= 0 {
        2 * i as u128
    } else {
        (-2 * i as i128 - 1) as u128
    }
}

pub fn unzigzag(n: u128) -> Option<i64> {
    let v = if n % 2 == 0 { (n / 2) as i128 } else { -((n / 2) as i128) - 1 };
    i64::try_from(v).ok()
}

pub fn encode_seq(v: &RInfinity) -> HfSet {
    HfSet::set(v.entries().iter().map(|(&i, x)| HfSet::pair_tag(i, x)))
}

/// Reads `{{i}, {{x}}}` with `i` an integer atom.
pub fn read_pair(p: &HfSet) -> Option<(i64, Scalar)> {
    let es = p.elements()?;
    if es.len() != 2 {
        return None;
    }
    // Atoms sort before sets, so `{i}` precedes `{{x}}`.
    let i = es[0].singleton_atom()?;
    let x = match es[1].elements()? {
        [inner] => inner.singleton_atom()?.clone(),
        _ => return None,
    };
    if !i.is_integer() {
        return None;
    }
    Some((i.to_i64()?, x))
}

pub fn decode_seq(s: &HfSet) -> Option<RInfinity> {
    let mut entries = BTreeMap::new();
    for p in s.elements()? {
        let (i, x) = read_pair(p)?;
        if x.is_zero() || entries.insert(i, x).is_some() {
            return None;
        }
    }
    Some(RInfinity::from_pairs(entries))
}

/// The enumeration `e`. The empty vector maps to the empty set.
pub fn encode(v: &RInfinity) -> Result<HfSet, HfError> {
    let (Some(i0), Some(last)) = (v.support().next(), v.support().last()) else {
        return Ok(HfSet::empty());
    };
    let k = usize::try_from(last - i0).map_err(|_| HfError::TreeTooLarge)?;
    let tree = tree_unrank(k + 1, zigzag(i0))?;
    let mut next = i0;
    Ok(interpret(&tree, v, &mut next))
}

fn interpret(t: &FiniteTree, v: &RInfinity, next: &mut i64) -> HfSet {
    if t.is_leaf() {
        let i = *next;
        *next += 1;
        return HfSet::pair_tag(i, &v.get(i));
    }
    HfSet::set(t.children().iter().map(|c| interpret(c, v, next)))
}

struct Parsed {
    tree: FiniteTree,
    min_label: i64,
    /// Leaf labels in depth-first order.
    labels: Vec<(i64, Scalar)>,
}

fn parse_tree(s: &HfSet) -> Option<Parsed> {
    if let Some((i, x)) = read_pair(s) {
        return Some(Parsed { tree: FiniteTree::leaf(), min_label: i, labels: vec![(i, x)] });
    }
    let es = s.elements()?;
    if es.is_empty() {
        return None;
    }
    let mut kids: Vec<Parsed> = es.iter().map(parse_tree).collect::<Option<_>>()?;
    // Isomorphic siblings are told apart by their labels, which grow along
    // the depth-first order.
    kids.sort_by(|a, b| a.tree.cmp(&b.tree).then(a.min_label.cmp(&b.min_label)));
    let min_label = kids.iter().map(|k| k.min_label).min()?;
    let tree = FiniteTree::from_children(kids.iter().map(|k| k.tree.clone()).collect()).ok()?;
    let labels = kids.into_iter().flat_map(|k| k.labels).collect();
    Some(Parsed { tree, min_label, labels })
}

/// Partial inverse of [`encode`].
pub fn decode(s: &HfSet) -> Option<RInfinity> {
    if s.is_empty_set() {
        return Some(RInfinity::new());
    }
    let p = parse_tree(s)?;
    let i0 = p.labels.first()?.0;
    for (j, (i, _)) in p.labels.iter().enumerate() {
        if *i != i0.checked_add(j as i64)? {
            return None;
        }
    }
    if p.labels.first()?.1.is_zero() || p.labels.last()?.1.is_zero() {
        return None;
    }
    if tree_rank(p.labels.len(), &p.tree).ok()? != zigzag(i0) {
        return None;
    }
    let v = RInfinity::from_pairs(p.labels);
    (encode(&v).ok()? == *s).then_some(v)
}
