//! Brute-force ground truth for small posets.

use serde::{Deserialize, Serialize};

use crate::coins::CoinStream;
use crate::error::{Error, Result};
use crate::poset::{Permutation, Relation};

/// Largest `n` enumerated by default.
pub const ENUMERATION_CAP: usize = 10;
/// Largest `n` counted by the downset recursion.
pub const COUNT_CAP: usize = 20;

/// Every linear extension of a relation, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionSet {
    extensions: Vec<Permutation>,
}

impl ExtensionSet {
    pub fn count(&self) -> usize {
        self.extensions.len()
    }

    pub fn extensions(&self) -> &[Permutation] {
        &self.extensions
    }

    /// Canonical index of `sigma`, if it is a member.
    pub fn index_of(&self, sigma: &Permutation) -> Option<usize> {
        self.extensions.binary_search(sigma).ok()
    }

    pub fn get(&self, index: usize) -> Option<&Permutation> {
        self.extensions.get(index)
    }
}

/// Backtracking enumeration with the default cap.
pub fn enumerate_extensions(relation: &Relation) -> Result<ExtensionSet> {
    enumerate_extensions_capped(relation, ENUMERATION_CAP)
}

/// Fills positions left to right; at each position any unplaced item whose
/// strict predecessors are all placed may go next. Candidates are tried in
/// ascending order, so the output comes out sorted.
pub fn enumerate_extensions_capped(relation: &Relation, cap: usize) -> Result<ExtensionSet> {
    let n = relation.len();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let preds: Vec<Vec<usize>> = (0..n)
        .map(|b| (0..n).filter(|&a| a != b && relation.precedes(a, b)).collect())
        .collect();

    struct Walk<'a> {
        preds: &'a [Vec<usize>],
        placed: Vec<bool>,
        prefix: Vec<usize>,
        out: Vec<Permutation>,
    }
    impl Walk<'_> {
        fn go(&mut self) {
            let n = self.placed.len();
            if self.prefix.len() == n {
                self.out.push(Permutation::from_vec_unchecked(self.prefix.clone()));
                return;
            }
            for x in 0..n {
                if self.placed[x] || !self.preds[x].iter().all(|&p| self.placed[p]) {
                    continue;
                }
                self.placed[x] = true;
                self.prefix.push(x);
                self.go();
                self.prefix.pop();
                self.placed[x] = false;
            }
        }
    }

    let mut walk = Walk {
        preds: &preds,
        placed: vec![false; n],
        prefix: Vec::with_capacity(n),
        out: Vec::new(),
    };
    walk.go();
    Ok(ExtensionSet {
        extensions: walk.out,
    })
}

/// Counts linear extensions with a recursion over downsets: the number of
/// ways to order a downset `D` is the sum over its maximal elements `x` of
/// the count for `D \ {x}`. Computed forward over bitmasks.
pub fn count_extensions(relation: &Relation) -> Result<u128> {
    let n = relation.len();
    if n > COUNT_CAP {
        return Err(Error::CapExceeded { n, cap: COUNT_CAP });
    }
    let pred_mask: Vec<u32> = (0..n)
        .map(|b| {
            (0..n)
                .filter(|&a| a != b && relation.precedes(a, b))
                .fold(0u32, |m, a| m | (1 << a))
        })
        .collect();
    let full = (1usize << n) - 1;
    let mut ways = vec![0u128; full + 1];
    ways[0] = 1;
    for set in 0..full {
        let w = ways[set];
        if w == 0 {
            continue;
        }
        for (x, &pm) in pred_mask.iter().enumerate() {
            let bit = 1usize << x;
            if set & bit == 0 && (pm as usize) & !set == 0 {
                ways[set | bit] += w;
            }
        }
    }
    Ok(ways[full])
}

/// Exact uniform draw: a uniform index into the enumerated set.
pub fn oracle_uniform_sample(set: &ExtensionSet, stream: &mut CoinStream) -> Permutation {
    let idx = stream.uniform_below(set.count() as u64) as usize;
    set.extensions[idx].clone()
}
