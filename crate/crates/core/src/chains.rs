//! Step functions for the adjacent-transposition chain, its bounding chain,
//! and the coupled step that runs both on one coin.
//!
//! Positions are 0-based: a substep at position `i` looks at slots `i` and
//! `i + 1`, so `i` ranges over `0..n - 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::poset::{extended_precedes, Permutation, Relation, Slot};

/// One fair bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coin(bool);

impl Coin {
    pub const ZERO: Coin = Coin(false);
    pub const ONE: Coin = Coin(true);

    pub fn from_bit(bit: bool) -> Self {
        Coin(bit)
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.0
    }

    /// `1 - c`.
    #[inline]
    pub fn flipped(self) -> Self {
        Coin(!self.0)
    }
}

/// A vector of slots holding either a placeholder or an active item, plus
/// the number `k` of active items. Items `0..k` are active.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundingState {
    r: Vec<Slot>,
    k: usize,
}

impl BoundingState {
    /// All placeholders except item 0 in the last slot.
    pub fn initial(n: usize) -> Self {
        assert!(n >= 1, "bounding state needs at least one item");
        let mut r = vec![Slot::Star; n];
        r[n - 1] = Slot::Item(0);
        BoundingState { r, k: 1 }
    }

    /// Builds a state from raw slots; `None` if the structural invariants
    /// (each active item exactly once, nothing inactive, star count `n - k`)
    /// fail. The order invariant is checked separately.
    pub fn from_slots(r: Vec<Slot>, k: usize) -> Option<Self> {
        let state = BoundingState { r, k };
        state.is_well_formed().then_some(state)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn active(&self) -> usize {
        self.k
    }

    pub fn slots(&self) -> &[Slot] {
        &self.r
    }

    /// True once every item is active, i.e. the state is a single permutation.
    pub fn is_permutation(&self) -> bool {
        self.k == self.r.len()
    }

    pub fn to_permutation(&self) -> Option<Permutation> {
        if !self.is_permutation() {
            return None;
        }
        let slots = self.r.iter().map(|s| s.item().expect("no stars left")).collect();
        Some(Permutation::from_vec_unchecked(slots))
    }

    pub fn star_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.r.iter().enumerate().filter(|(_, s)| s.is_star()).map(|(p, _)| p)
    }

    fn is_well_formed(&self) -> bool {
        let n = self.r.len();
        if self.k > n {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stars = 0;
        for slot in &self.r {
            match *slot {
                Slot::Star => stars += 1,
                Slot::Item(a) => {
                    if a >= self.k || seen[a] {
                        return false;
                    }
                    seen[a] = true;
                }
            }
        }
        stars == n - self.k
    }

    /// Both bounding invariants: every active item appears exactly once, and
    /// active items appear in an order consistent with `relation`.
    pub fn satisfies_invariants(&self, relation: &Relation) -> bool {
        if !self.is_well_formed() {
            return false;
        }
        let active: Vec<usize> = self.r.iter().filter_map(|s| s.item()).collect();
        for (i, &a) in active.iter().enumerate() {
            for &b in &active[i + 1..] {
                if relation.precedes(b, a) {
                    return false;
                }
            }
        }
        true
    }

    fn promote_last(&mut self) -> bool {
        let last = self.r.len() - 1;
        if self.r[last].is_star() {
            self.r[last] = Slot::Item(self.k);
            self.k += 1;
            true
        } else {
            false
        }
    }
}

impl fmt::Debug for BoundingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.r.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match s {
                Slot::Star => write!(f, "*")?,
                Slot::Item(a) => write!(f, "{}", a + 1)?,
            }
        }
        write!(f, "; k={})", self.k)
    }
}

/// Underlying chain substep: swap positions `i` and `i + 1` when the coin
/// is 1 and the order does not force the current arrangement.
#[inline]
pub fn adj_step(sigma: &mut Permutation, i: usize, c: Coin, relation: &Relation) -> bool {
    if c.is_one() && !relation.precedes(sigma.get(i), sigma.get(i + 1)) {
        sigma.swap_adjacent(i);
        true
    } else {
        false
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoundingOutcome {
    pub swapped: bool,
    pub promoted: bool,
}

/// Bounding chain substep: the same swap rule under the extended order,
/// followed by promotion of a placeholder that has reached the last slot.
#[inline]
pub fn bc_step(y: &mut BoundingState, i: usize, c: Coin, relation: &Relation) -> BoundingOutcome {
    let swapped = c.is_one() && !extended_precedes(y.r[i], y.r[i + 1], relation);
    if swapped {
        y.r.swap(i, i + 1);
    }
    let promoted = y.promote_last();
    BoundingOutcome { swapped, promoted }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CoupledOutcome {
    pub underlying_swapped: bool,
    pub bounding_swapped: bool,
    pub promoted: bool,
}

/// Coupled substep. The underlying chain uses the complemented coin when the
/// item at `i` is the one the bounding state holds at `i + 1`; otherwise both
/// chains share the coin. The flip is decided from the pre-step states, then
/// the bounding step (with promotion) runs, then the underlying step.
#[inline]
pub fn sim_step(
    sigma: &mut Permutation,
    y: &mut BoundingState,
    i: usize,
    c: Coin,
    relation: &Relation,
) -> CoupledOutcome {
    let c_underlying = if y.r[i + 1] == Slot::Item(sigma.get(i)) {
        c.flipped()
    } else {
        c
    };
    let b = bc_step(y, i, c, relation);
    let underlying_swapped = adj_step(sigma, i, c_underlying, relation);
    CoupledOutcome {
        underlying_swapped,
        bounding_swapped: b.swapped,
        promoted: b.promoted,
    }
}

/// `y` bounds `sigma` when every active item sits in `sigma` at or before
/// its slot in `y`.
pub fn bounds(y: &BoundingState, sigma: &Permutation) -> bool {
    let n = y.len();
    if sigma.len() != n {
        return false;
    }
    let mut pos_sigma = vec![0; n];
    for (p, &a) in sigma.as_slice().iter().enumerate() {
        pos_sigma[a] = p;
    }
    y.r.iter().enumerate().all(|(p, slot)| match *slot {
        Slot::Item(a) if a < y.k => pos_sigma[a] <= p,
        _ => true,
    })
}

/// Work done by one or more sweeps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepCounts {
    pub substeps: u64,
    pub bounding_swaps: u64,
    pub underlying_swaps: u64,
}

impl std::ops::AddAssign for SweepCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.substeps += rhs.substeps;
        self.bounding_swaps += rhs.bounding_swaps;
        self.underlying_swaps += rhs.underlying_swaps;
    }
}

/// Deterministic scan of the bounding chain alone: one substep per position
/// `0..n - 1`, in order, with `coins[i]` at position `i`.
pub fn sweep_bounding(y: &mut BoundingState, coins: &[Coin], relation: &Relation) -> SweepCounts {
    assert_eq!(coins.len() + 1, y.len(), "one coin per adjacent pair");
    let mut counts = SweepCounts::default();
    for (i, &c) in coins.iter().enumerate() {
        let out = bc_step(y, i, c, relation);
        counts.substeps += 1;
        counts.bounding_swaps += out.swapped as u64;
    }
    counts
}

/// Deterministic scan of the coupled chain.
pub fn sweep_coupled(
    sigma: &mut Permutation,
    y: &mut BoundingState,
    coins: &[Coin],
    relation: &Relation,
) -> SweepCounts {
    assert_eq!(coins.len() + 1, y.len(), "one coin per adjacent pair");
    let mut counts = SweepCounts::default();
    for (i, &c) in coins.iter().enumerate() {
        let out = sim_step(sigma, y, i, c, relation);
        debug_assert!(bounds(y, sigma), "coupled step lost the bound: {y:?} vs {sigma:?}");
        counts.substeps += 1;
        counts.bounding_swaps += out.bounding_swapped as u64;
        counts.underlying_swaps += out.underlying_swapped as u64;
    }
    counts
}

/// Deterministic scan of the underlying chain alone.
pub fn sweep_underlying(sigma: &mut Permutation, coins: &[Coin], relation: &Relation) -> SweepCounts {
    assert_eq!(coins.len() + 1, sigma.len(), "one coin per adjacent pair");
    let mut counts = SweepCounts::default();
    for (i, &c) in coins.iter().enumerate() {
        counts.substeps += 1;
        counts.underlying_swaps += adj_step(sigma, i, c, relation) as u64;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Poset;

    fn five() -> Poset {
        Poset::from_pairs(5, &[(1, 3), (1, 5), (2, 3), (2, 5), (3, 5), (4, 5)]).unwrap()
    }

    fn perm(labels: &[usize]) -> Permutation {
        Permutation::from_one_based(labels).unwrap()
    }

    fn state(slots: &[Option<usize>], k: usize) -> BoundingState {
        let r = slots
            .iter()
            .map(|s| s.map_or(Slot::Star, |a| Slot::Item(a - 1)))
            .collect();
        BoundingState::from_slots(r, k).unwrap()
    }

    #[test]
    fn adj_step_swaps_incomparable() {
        let p = five();
        let mut s = perm(&[1, 2, 3, 4, 5]);
        assert!(adj_step(&mut s, 2, Coin::ONE, p.relation()));
        assert_eq!(s, perm(&[1, 2, 4, 3, 5]));
    }

    #[test]
    fn adj_step_respects_order_and_zero_coin() {
        let p = five();
        let mut s = perm(&[1, 2, 3, 4, 5]);
        assert!(!adj_step(&mut s, 3, Coin::ONE, p.relation()));
        assert_eq!(s, perm(&[1, 2, 3, 4, 5]));
        for i in 0..4 {
            assert!(!adj_step(&mut s, i, Coin::ZERO, p.relation()));
        }
        assert_eq!(s, perm(&[1, 2, 3, 4, 5]));
    }

    #[test]
    fn initial_states() {
        assert_eq!(format!("{:?}", BoundingState::initial(5)), "(*,*,*,*,1; k=1)");
        assert!(BoundingState::initial(1).is_permutation());
        assert_eq!(format!("{:?}", BoundingState::initial(2)), "(*,1; k=1)");
    }

    #[test]
    fn star_passes_item_and_is_promoted() {
        let p = five();
        let mut y = BoundingState::initial(5);
        let out = bc_step(&mut y, 3, Coin::ONE, p.relation());
        assert!(out.swapped && out.promoted);
        assert_eq!(y, state(&[None, None, None, Some(1), Some(2)], 2));
    }

    #[test]
    fn zero_coin_leaves_state_alone() {
        let p = five();
        let y0 = state(&[None, Some(2), None, Some(1), Some(3)], 3);
        for i in 0..4 {
            let mut y = y0.clone();
            assert_eq!(bc_step(&mut y, i, Coin::ZERO, p.relation()), BoundingOutcome::default());
            assert_eq!(y, y0);
        }
    }

    #[test]
    fn order_blocks_bounding_swap() {
        let p = five();
        // 1 ⪯ 3 with both active and adjacent in the last two slots.
        let mut y = state(&[None, None, Some(2), Some(1), Some(3)], 3);
        let before = y.clone();
        assert!(!bc_step(&mut y, 3, Coin::ONE, p.relation()).swapped);
        assert_eq!(y, before);
    }

    #[test]
    fn adjacent_stars_do_not_swap() {
        let p = five();
        let mut y = BoundingState::initial(5);
        assert!(!bc_step(&mut y, 0, Coin::ONE, p.relation()).swapped);
        assert_eq!(y, BoundingState::initial(5));
    }

    #[test]
    fn coupled_step_flips_coin_for_the_shared_item() {
        let rel = Relation::antichain(2);
        let mut sigma = Permutation::identity(2);
        let mut y = BoundingState::initial(2);
        assert!(bounds(&y, &sigma));
        let out = sim_step(&mut sigma, &mut y, 0, Coin::ONE, &rel);
        assert_eq!(
            out,
            CoupledOutcome {
                underlying_swapped: false,
                bounding_swapped: true,
                promoted: true
            }
        );
        assert_eq!(sigma, Permutation::identity(2));
        assert_eq!(y.to_permutation(), Some(Permutation::identity(2)));
        assert!(bounds(&y, &sigma));
    }

    #[test]
    fn bounds_definition() {
        let y = state(&[None, Some(2), None, Some(1), Some(3)], 3);
        assert!(bounds(&y, &perm(&[2, 1, 4, 3, 5])));
        // item 1 at position 5 > 4
        assert!(!bounds(&y, &perm(&[2, 3, 4, 5, 1])));
        let y1 = BoundingState::initial(5);
        for s in Permutation::all(5) {
            assert!(bounds(&y1, &s));
        }
        let full = state(&[Some(2), Some(1), Some(4), Some(3), Some(5)], 5);
        assert!(bounds(&full, &full.to_permutation().unwrap()));
    }

    #[test]
    fn sweep_marches_leading_star() {
        let rel = five();
        let mut y = BoundingState::initial(5);
        let coins = [Coin::ONE; 4];
        let counts = sweep_bounding(&mut y, &coins, rel.relation());
        // stars never swap with each other, so only the substep at 3 moves
        // anything: item 1 slides left and the star behind it is promoted.
        assert_eq!(y, state(&[None, None, None, Some(1), Some(2)], 2));
        assert_eq!(counts.substeps, 4);
        assert_eq!(counts.bounding_swaps, 1);
        let counts = sweep_bounding(&mut y, &coins, rel.relation());
        assert_eq!(y, state(&[None, None, Some(1), Some(2), Some(3)], 3));
        assert_eq!(counts.bounding_swaps, 2);
    }

    #[test]
    fn zero_sweep_is_idle_once_last_slot_filled() {
        let p = five();
        let y0 = state(&[None, Some(2), None, Some(1), Some(3)], 3);
        let mut y = y0.clone();
        let counts = sweep_bounding(&mut y, &[Coin::ZERO; 4], p.relation());
        assert_eq!(y, y0);
        assert_eq!(counts.bounding_swaps, 0);
    }

    #[test]
    fn zero_coins_can_still_move_the_coupled_underlying_chain() {
        // σ(1) = 2 = r(2), so the underlying chain sees the complemented coin.
        let p = five();
        let mut y = state(&[None, Some(2), None, Some(1), Some(3)], 3);
        let mut sigma = perm(&[2, 1, 4, 3, 5]);
        let y0 = y.clone();
        let counts = sweep_coupled(&mut sigma, &mut y, &[Coin::ZERO; 4], p.relation());
        assert_eq!(y, y0);
        assert_eq!(sigma, perm(&[1, 2, 4, 3, 5]));
        assert_eq!(counts.underlying_swaps, 1);
        assert!(bounds(&y, &sigma));
    }

    #[test]
    fn invariant_checker() {
        let p = five();
        assert!(state(&[None, Some(2), None, Some(1), Some(3)], 3).satisfies_invariants(p.relation()));
        // 3 before 1 violates 1 ⪯ 3.
        let bad = BoundingState::from_slots(
            vec![Slot::Item(2), Slot::Item(0), Slot::Item(1), Slot::Star, Slot::Star],
            3,
        )
        .unwrap();
        assert!(!bad.satisfies_invariants(p.relation()));
        assert!(BoundingState::from_slots(vec![Slot::Item(0), Slot::Item(0)], 2).is_none());
        assert!(BoundingState::from_slots(vec![Slot::Star, Slot::Item(1)], 1).is_none());
    }
}
