//! Partial orders, their normalization, and the linear-extension predicate.
//!
//! Items are 0-based everywhere inside the crate. The text format and the
//! CLI use 1-based labels; conversion happens at the edges.

use std::collections::{BinaryHeap, VecDeque};
use std::cmp::Reverse;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A reflexive, antisymmetric, transitive relation on `0..n`, stored as a
/// dense `n * n` table where `table[a * n + b]` means `a ⪯ b`.
#[derive(Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    table: Vec<bool>,
}

impl Relation {
    /// The antichain: only the diagonal holds.
    pub fn antichain(n: usize) -> Self {
        let mut table = vec![false; n * n];
        for i in 0..n {
            table[i * n + i] = true;
        }
        Relation { n, table }
    }

    /// The total order `0 ⪯ 1 ⪯ ... ⪯ n-1`.
    pub fn chain(n: usize) -> Self {
        let mut table = vec![false; n * n];
        for a in 0..n {
            for b in a..n {
                table[a * n + b] = true;
            }
        }
        Relation { n, table }
    }

    /// Builds the reflexive-transitive closure of 1-based `(i, j)` pairs
    /// meaning `i ⪯ j`, and rejects it if the closure is not antisymmetric.
    pub fn close_and_validate(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut edges = Vec::with_capacity(pairs.len());
        for &(i, j) in pairs {
            for item in [i, j] {
                if item == 0 || item > n {
                    return Err(Error::Index { item, n });
                }
            }
            edges.push((i - 1, j - 1));
        }

        let mut rel = Relation::antichain(n);
        for &(a, b) in &edges {
            rel.table[a * n + b] = true;
        }
        // Warshall
        for k in 0..n {
            for a in 0..n {
                if !rel.table[a * n + k] {
                    continue;
                }
                for b in 0..n {
                    if rel.table[k * n + b] {
                        rel.table[a * n + b] = true;
                    }
                }
            }
        }

        for a in 0..n {
            for b in (a + 1)..n {
                if rel.table[a * n + b] && rel.table[b * n + a] {
                    return Err(Error::Cycle {
                        cycle: find_cycle(n, &edges, a, b),
                    });
                }
            }
        }
        Ok(rel)
    }

    /// Wraps an explicit table after checking the three order axioms.
    pub fn from_table(n: usize, table: Vec<bool>) -> Option<Self> {
        if n == 0 || table.len() != n * n {
            return None;
        }
        let rel = Relation { n, table };
        rel.satisfies_axioms().then_some(rel)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.table[a * self.n + b]
    }

    /// Direct table check of reflexivity, antisymmetry and transitivity.
    pub fn satisfies_axioms(&self) -> bool {
        let n = self.n;
        for a in 0..n {
            if !self.precedes(a, a) {
                return false;
            }
            for b in 0..n {
                if a != b && self.precedes(a, b) && self.precedes(b, a) {
                    return false;
                }
                if !self.precedes(a, b) {
                    continue;
                }
                for c in 0..n {
                    if self.precedes(b, c) && !self.precedes(a, c) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Full O(n²) check: no later position holds an item that precedes an
    /// earlier one.
    pub fn is_linear_extension(&self, sigma: &[usize]) -> bool {
        if !is_bijection(sigma, self.n) {
            return false;
        }
        for (i, &earlier) in sigma.iter().enumerate() {
            for &later in &sigma[i + 1..] {
                if self.precedes(later, earlier) {
                    return false;
                }
            }
        }
        true
    }

    /// Adjacent-pair check. Not equivalent to [`Self::is_linear_extension`]
    /// in general (`3 2 1` passes it under `1 ⪯ 3` alone); it is exact for a
    /// permutation one adjacent transposition away from a linear extension.
    pub fn is_linear_extension_adjacent(&self, sigma: &[usize]) -> bool {
        is_bijection(sigma, self.n) && sigma.windows(2).all(|w| !self.precedes(w[1], w[0]))
    }

    /// Rows of 0/1, the matrix layout used to write small orders by hand.
    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|a| (0..self.n).map(|b| self.precedes(a, b) as u8).collect())
            .collect()
    }

    /// Strict `a ⪯ b` pairs, 1-based, in row-major order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if a != b && self.precedes(a, b) {
                    out.push((a + 1, b + 1));
                }
            }
        }
        out
    }

    fn relabeled(&self, to_internal: &[usize]) -> Relation {
        let n = self.n;
        let mut table = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                if self.precedes(a, b) {
                    table[to_internal[a] * n + to_internal[b]] = true;
                }
            }
        }
        Relation { n, table }
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Relation")
            .field("n", &self.n)
            .field("matrix", &self.to_matrix())
            .finish()
    }
}

fn is_bijection(sigma: &[usize], n: usize) -> bool {
    if sigma.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &x in sigma {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Reconstructs a concrete cycle a -> ... -> b -> ... -> a from the raw
/// edges, in 1-based labels.
fn find_cycle(n: usize, edges: &[(usize, usize)], a: usize, b: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(x, y) in edges {
        if x != y {
            adj[x].push(y);
        }
    }
    let path = |from: usize, to: usize| -> Vec<usize> {
        let mut prev = vec![usize::MAX; n];
        let mut queue = VecDeque::from([from]);
        prev[from] = from;
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for &y in &adj[x] {
                if prev[y] == usize::MAX {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        let mut out = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            out.push(cur);
        }
        out.reverse();
        out
    };
    let mut cycle = path(a, b);
    cycle.extend(path(b, a).into_iter().skip(1));
    cycle.into_iter().map(|x| x + 1).collect()
}

/// A validated order relabeled so that the identity permutation of internal
/// labels is a linear extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    relation: Relation,
    original: Relation,
    to_internal: Vec<usize>,
    to_original: Vec<usize>,
}

impl Poset {
    /// Topologically sorts `relation`, breaking ties by smallest original
    /// label, and relabels items by their rank in that order.
    pub fn normalize(relation: Relation) -> Self {
        let n = relation.len();
        let mut indegree = vec![0usize; n];
        for a in 0..n {
            for b in 0..n {
                if a != b && relation.precedes(a, b) {
                    indegree[b] += 1;
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&a| indegree[a] == 0).map(Reverse).collect();
        let mut to_original = Vec::with_capacity(n);
        while let Some(Reverse(a)) = ready.pop() {
            to_original.push(a);
            for b in 0..n {
                if a != b && relation.precedes(a, b) {
                    indegree[b] -= 1;
                    if indegree[b] == 0 {
                        ready.push(Reverse(b));
                    }
                }
            }
        }
        debug_assert_eq!(to_original.len(), n, "validated relation must be acyclic");

        let mut to_internal = vec![0; n];
        for (internal, &orig) in to_original.iter().enumerate() {
            to_internal[orig] = internal;
        }
        Poset {
            relation: relation.relabeled(&to_internal),
            original: relation,
            to_internal,
            to_original,
        }
    }

    /// Convenience: close, validate and normalize 1-based pairs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Relation::close_and_validate(n, pairs).map(Poset::normalize)
    }

    /// Parses the text format and normalizes it.
    pub fn parse(text: &str) -> Result<Self> {
        let (n, pairs) = parse_pairs(text)?;
        Poset::from_pairs(n, &pairs)
    }

    pub fn len(&self) -> usize {
        self.relation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relation.is_empty()
    }

    /// The relation over internal labels.
    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    /// The relation over the caller's original labels.
    pub fn original(&self) -> &Relation {
        &self.original
    }

    pub fn to_internal(&self) -> &[usize] {
        &self.to_internal
    }

    pub fn to_original(&self) -> &[usize] {
        &self.to_original
    }

    pub fn is_trivially_labeled(&self) -> bool {
        self.to_original.iter().enumerate().all(|(i, &o)| i == o)
    }

    #[inline]
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.relation.precedes(a, b)
    }

    /// `sigma` is over internal labels.
    pub fn is_linear_extension(&self, sigma: &Permutation) -> bool {
        self.relation.is_linear_extension(sigma.as_slice())
    }

    /// Maps an internal-label permutation back to original labels, slotwise.
    pub fn map_output(&self, sigma: &Permutation) -> Permutation {
        Permutation {
            slots: sigma.slots.iter().map(|&x| self.to_original[x]).collect(),
        }
    }

    /// Maps an original-label permutation to internal labels.
    pub fn map_input(&self, sigma: &Permutation) -> Permutation {
        Permutation {
            slots: sigma.slots.iter().map(|&x| self.to_internal[x]).collect(),
        }
    }
}

/// Contents of one slot of a bounding state: a placeholder or an item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    Star,
    Item(usize),
}

impl Slot {
    pub fn item(self) -> Option<usize> {
        match self {
            Slot::Item(a) => Some(a),
            Slot::Star => None,
        }
    }

    pub fn is_star(self) -> bool {
        matches!(self, Slot::Star)
    }
}

/// The order extended by a placeholder symbol: `Star ⪯ x` and `x ⪯ Star`
/// are false for every item, while `Star ⪯ Star` is true, so two adjacent
/// placeholders never swap.
#[inline]
pub fn extended_precedes(a: Slot, b: Slot, relation: &Relation) -> bool {
    match (a, b) {
        (Slot::Item(x), Slot::Item(y)) => relation.precedes(x, y),
        (Slot::Star, Slot::Star) => true,
        _ => false,
    }
}

/// `slots[p]` is the item at position `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    slots: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            slots: (0..n).collect(),
        }
    }

    /// Returns `None` unless `slots` is a bijection on `0..slots.len()`.
    pub fn new(slots: Vec<usize>) -> Option<Self> {
        let n = slots.len();
        is_bijection(&slots, n).then_some(Permutation { slots })
    }

    pub fn from_one_based(labels: &[usize]) -> Option<Self> {
        if labels.contains(&0) {
            return None;
        }
        Permutation::new(labels.iter().map(|&x| x - 1).collect())
    }

    pub(crate) fn from_vec_unchecked(slots: Vec<usize>) -> Self {
        debug_assert!(is_bijection(&slots, slots.len()));
        Permutation { slots }
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.slots.iter().map(|&x| x + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.slots
    }

    #[inline]
    pub fn get(&self, position: usize) -> usize {
        self.slots[position]
    }

    #[inline]
    pub(crate) fn swap_adjacent(&mut self, position: usize) {
        self.slots.swap(position, position + 1);
    }

    /// Position of `item`, by linear scan.
    pub fn position_of(&self, item: usize) -> Option<usize> {
        self.slots.iter().position(|&x| x == item)
    }

    /// Every permutation of `0..n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation { slots: cur.clone() });
                return;
            }
            for x in 0..n {
                if !used[x] {
                    used[x] = true;
                    cur.push(x);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[x] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", x + 1)?;
        }
        Ok(())
    }
}

/// Parses the poset text format into `(n, pairs)` with 1-based labels.
///
/// ```text
/// # comment
/// n 5
/// 1 3
/// 3 5
/// ```
pub fn parse_pairs(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut n = None;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let Some(count) = n else {
            if fields.len() != 2 || fields[0] != "n" {
                return Err(parse_err(format!("expected `n <count>`, found `{line}`")));
            }
            let count: usize = fields[1]
                .parse()
                .map_err(|_| parse_err(format!("invalid item count `{}`", fields[1])))?;
            if count == 0 {
                return Err(parse_err("item count must be at least 1".into()));
            }
            n = Some(count);
            continue;
        };
        if fields.len() != 2 {
            return Err(parse_err(format!("expected `<i> <j>`, found `{line}`")));
        }
        let mut ij = [0usize; 2];
        for (slot, field) in ij.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .map_err(|_| parse_err(format!("invalid item label `{field}`")))?;
            if *slot == 0 || *slot > count {
                return Err(parse_err(format!("item {slot} is out of range 1..={count}")));
            }
        }
        pairs.push((ij[0], ij[1]));
    }
    match n {
        Some(n) => Ok((n, pairs)),
        None => Err(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing `n <count>` header".into(),
        }),
    }
}

/// Writes `relation` in the text format, one strict pair per line.
pub fn format_pairs(relation: &Relation) -> String {
    let mut out = format!("n {}\n", relation.len());
    for (a, b) in relation.pairs() {
        out.push_str(&format!("{a} {b}\n"));
    }
    out
}
