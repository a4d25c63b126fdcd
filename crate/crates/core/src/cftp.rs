//! Coupling from the past with the bounding chain.
//!
//! A run works through levels `0, 1, 2, ...`. Level `ℓ` draws `t_ℓ` sweeps of
//! coins from its own seed and runs the bounding chain alone from the
//! initial state. The first level whose bounding state becomes a permutation
//! supplies that permutation as its output. Every shallower level then replays
//! its own coins through the coupled chain, starting from the output of the
//! level below, and the output of level 0 is the sample.
//!
//! Levels are processed iteratively, deepest first on the way back, so deep
//! runs do not grow the call stack. Coins are never stored: a replay
//! regenerates them from the level seed.

use serde::{Deserialize, Serialize};

use crate::chains::{sweep_bounding, sweep_coupled, BoundingState, SweepCounts};
use crate::coins::{mix64, CoinTape, GENERATOR};
use crate::error::{Error, Result};
use crate::poset::{Permutation, Poset};

/// How many sweeps each level runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "driver", rename_all = "snake_case")]
pub enum Schedule {
    /// Every level uses the same `t`.
    Fixed { t: u64 },
    /// Level `ℓ` uses `t0 · 2^ℓ`.
    Doubling { t0: u64 },
}

impl Schedule {
    /// Doubling from `t0 = n`.
    pub fn default_for(n: usize) -> Self {
        Schedule::Doubling {
            t0: (n as u64).max(1),
        }
    }

    /// Fixed at [`recommended_t`].
    pub fn recommended(n: usize) -> Self {
        Schedule::Fixed {
            t: recommended_t(n),
        }
    }

    pub fn sweeps_at(&self, level: u32) -> u64 {
        match *self {
            Schedule::Fixed { t } => t,
            Schedule::Doubling { t0 } => t0.checked_shl(level).unwrap_or(u64::MAX),
        }
    }

    /// Rejects schedules that can never coalesce. Each sweep promotes at most
    /// one placeholder (only the last substep can reach the final slot), so a
    /// level needs at least `n - 1` sweeps.
    pub fn validate(&self, n: usize) -> Result<()> {
        let min = n.saturating_sub(1) as u64;
        match *self {
            Schedule::Fixed { t } if t == 0 || t < min => Err(Error::ScheduleTooShort { t, min: min.max(1) }),
            Schedule::Doubling { t0: 0 } => Err(Error::ScheduleTooShort { t: 0, min: 1 }),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Schedule::Fixed { t } => write!(f, "fixed t={t}"),
            Schedule::Doubling { t0 } => write!(f, "doubling t0={t0}"),
        }
    }
}

/// Sweep count after which the bounding chain has coalesced with
/// probability at least 1/2: `ceil((n² − n + 3) · ceil(log2 n) / 2)`.
pub fn recommended_t(n: usize) -> u64 {
    if n < 2 {
        return 1;
    }
    let n = n as u64;
    let log2_ceil = 64 - (n - 1).leading_zeros() as u64;
    ((n * n - n + 3) * log2_ceil).div_ceil(2)
}

/// `(*, *, ..., *, 1)` with one active item.
pub fn initial_bounding_state(n: usize) -> BoundingState {
    BoundingState::initial(n)
}

/// Seed of level `level` under `master`.
pub fn level_seed(master: u64, level: u32) -> u64 {
    mix64(master, level as u64)
}

/// Counters for one sampling run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    /// Sweeps run, counting both the bounding-only passes and the replays.
    pub sweeps_executed: u64,
    /// Fair bits drawn. Replays regenerate bits and are not counted again.
    pub bits_consumed: u64,
    /// Substep calls, `sweeps_executed · (n − 1)`.
    pub substeps: u64,
    pub bounding_swaps: u64,
    pub underlying_swaps: u64,
    /// `bounding_swaps + underlying_swaps`.
    pub swap_ops: u64,
    /// Index of the level that coalesced; 0 if the first level did.
    pub recursion_depth: u32,
    pub success: bool,
}

impl RunStats {
    fn add_counts(&mut self, counts: SweepCounts) {
        self.substeps += counts.substeps;
        self.bounding_swaps += counts.bounding_swaps;
        self.underlying_swaps += counts.underlying_swaps;
        self.swap_ops = self.bounding_swaps + self.underlying_swaps;
    }
}

/// What happened at one level. Used to check that replays see exactly the
/// coins of the first pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelTrace {
    pub level: u32,
    pub seed: u64,
    pub sweeps: u64,
    pub coalesced: bool,
    pub first_pass_digest: u64,
    pub replay_digest: Option<u64>,
}

/// A sample in internal labels with its counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub permutation: Permutation,
    pub stats: RunStats,
}

/// Per-run record in the caller's labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    /// 1-based original labels, by position.
    pub permutation: Vec<usize>,
    pub sweeps_executed: u64,
    pub bits_consumed: u64,
    pub substeps: u64,
    pub swap_ops: u64,
    pub recursion_depth: u32,
    pub generator: String,
}

impl Sample {
    pub fn report(&self, poset: &Poset) -> SampleReport {
        SampleReport {
            permutation: poset.map_output(&self.permutation).to_one_based(),
            sweeps_executed: self.stats.sweeps_executed,
            bits_consumed: self.stats.bits_consumed,
            substeps: self.stats.substeps,
            swap_ops: self.stats.swap_ops,
            recursion_depth: self.stats.recursion_depth,
            generator: GENERATOR.to_string(),
        }
    }

    /// The sample in original labels.
    pub fn original(&self, poset: &Poset) -> Permutation {
        poset.map_output(&self.permutation)
    }
}

/// Draws one exactly uniform linear extension (internal labels).
pub fn sample(poset: &Poset, schedule: Schedule, master_seed: u64) -> Result<Sample> {
    run(poset, schedule, master_seed, None)
}

/// As [`sample`], also returning a per-level trace.
pub fn sample_traced(
    poset: &Poset,
    schedule: Schedule,
    master_seed: u64,
) -> Result<(Sample, Vec<LevelTrace>)> {
    let mut trace = Vec::new();
    let s = run(poset, schedule, master_seed, Some(&mut trace))?;
    Ok((s, trace))
}

/// Same `t` at every level.
pub fn cftp_fixed(poset: &Poset, t: u64, master_seed: u64) -> Result<Sample> {
    sample(poset, Schedule::Fixed { t }, master_seed)
}

/// `t` doubles at every level.
pub fn cftp_doubling(poset: &Poset, t0: u64, master_seed: u64) -> Result<Sample> {
    sample(poset, Schedule::Doubling { t0 }, master_seed)
}

fn run(
    poset: &Poset,
    schedule: Schedule,
    master_seed: u64,
    mut trace: Option<&mut Vec<LevelTrace>>,
) -> Result<Sample> {
    let n = poset.len();
    schedule.validate(n)?;
    let relation = poset.relation();
    let mut stats = RunStats::default();
    if n == 1 {
        stats.success = true;
        return Ok(Sample {
            permutation: Permutation::identity(1),
            stats,
        });
    }

    let width = n - 1;
    let mut tapes: Vec<CoinTape> = Vec::new();
    let mut level = 0u32;
    let mut sigma = loop {
        let tape = CoinTape::new(level_seed(master_seed, level), schedule.sweeps_at(level), width);
        let mut y = initial_bounding_state(n);
        let mut counts = SweepCounts::default();
        let stream = tape.for_each_sweep(|coins| counts += sweep_bounding(&mut y, coins, relation));
        stats.add_counts(counts);
        stats.sweeps_executed += tape.sweeps;
        stats.bits_consumed += tape.len();
        let coalesced = y.is_permutation();
        if let Some(trace) = trace.as_deref_mut() {
            trace.push(LevelTrace {
                level,
                seed: tape.seed,
                sweeps: tape.sweeps,
                coalesced,
                first_pass_digest: stream.digest(),
                replay_digest: None,
            });
        }
        if let Some(p) = y.to_permutation() {
            break p;
        }
        tapes.push(tape);
        level += 1;
    };
    stats.recursion_depth = level;

    for (lvl, tape) in tapes.iter().enumerate().rev() {
        let mut y = initial_bounding_state(n);
        let mut counts = SweepCounts::default();
        let stream = tape.for_each_sweep(|coins| counts += sweep_coupled(&mut sigma, &mut y, coins, relation));
        stats.add_counts(counts);
        stats.sweeps_executed += tape.sweeps;
        if let Some(trace) = trace.as_deref_mut() {
            trace[lvl].replay_digest = Some(stream.digest());
        }
    }
    stats.success = true;
    debug_assert!(poset.is_linear_extension(&sigma));
    Ok(Sample {
        permutation: sigma,
        stats,
    })
}

/// Runs the bounding chain alone for `t` sweeps from the initial state with
/// coins from `seed`, and reports whether it coalesced.
pub fn bounding_only_coalesces(n: usize, t: u64, seed: u64) -> bool {
    if n < 2 {
        return true;
    }
    // Placeholder motion never depends on the order, so any relation works.
    let relation = crate::poset::Relation::antichain(n);
    let mut y = initial_bounding_state(n);
    CoinTape::new(seed, t, n - 1).for_each_sweep(|coins| {
        sweep_bounding(&mut y, coins, &relation);
    });
    y.is_permutation()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five() -> Poset {
        Poset::from_pairs(5, &[(1, 3), (1, 5), (2, 3), (2, 5), (3, 5), (4, 5)]).unwrap()
    }

    #[test]
    fn recommended_t_values() {
        assert_eq!(recommended_t(5), 35);
        assert_eq!(recommended_t(2), 3);
        assert_eq!(recommended_t(4), 15);
        assert_eq!(recommended_t(1), 1);
        // (64 - 8 + 3) * 3 / 2 = 88.5
        assert_eq!(recommended_t(8), 89);
    }

    #[test]
    fn schedules() {
        assert_eq!(Schedule::Doubling { t0: 3 }.sweeps_at(2), 12);
        assert_eq!(Schedule::Fixed { t: 3 }.sweeps_at(5), 3);
        assert_eq!(Schedule::default_for(5), Schedule::Doubling { t0: 5 });
        assert!(Schedule::Fixed { t: 3 }.validate(5).is_err());
        assert!(Schedule::Fixed { t: 4 }.validate(5).is_ok());
        assert!(Schedule::Doubling { t0: 0 }.validate(5).is_err());
        assert!(Schedule::Doubling { t0: 1 }.validate(5).is_ok());
    }

    #[test]
    fn single_item() {
        let p = Poset::from_pairs(1, &[]).unwrap();
        let s = cftp_fixed(&p, 1, 0).unwrap();
        assert_eq!(s.permutation, Permutation::identity(1));
        assert_eq!(s.stats.bits_consumed, 0);
        assert_eq!(s.stats.recursion_depth, 0);
    }

    #[test]
    fn chain_has_one_extension() {
        let pairs: Vec<_> = (1..6).map(|i| (i, i + 1)).collect();
        let p = Poset::from_pairs(6, &pairs).unwrap();
        for seed in 0..20 {
            assert_eq!(cftp_doubling(&p, 1, seed).unwrap().permutation, Permutation::identity(6));
        }
    }

    #[test]
    fn doubling_from_one_returns_an_extension() {
        let p = five();
        for seed in 0..50 {
            let s = cftp_doubling(&p, 1, seed).unwrap();
            assert!(p.is_linear_extension(&s.permutation));
            assert!(s.stats.success);
            assert!(s.stats.recursion_depth >= 2, "t=1,2 cannot coalesce for n=5");
        }
    }

    #[test]
    fn replay_sees_first_pass_coins() {
        let p = five();
        let (s, trace) = sample_traced(&p, Schedule::Doubling { t0: 1 }, 17).unwrap();
        assert_eq!(trace.len() as u32, s.stats.recursion_depth + 1);
        let (last, rest) = trace.split_last().unwrap();
        assert!(last.coalesced && last.replay_digest.is_none());
        for lvl in rest {
            assert!(!lvl.coalesced);
            assert_eq!(lvl.replay_digest, Some(lvl.first_pass_digest));
        }
    }

    #[test]
    fn counters_add_up() {
        let p = five();
        let s = sample(&p, Schedule::Doubling { t0: 1 }, 5).unwrap();
        let d = s.stats.recursion_depth;
        let first: u64 = (0..=d).map(|l| 1u64 << l).sum();
        let replay: u64 = (0..d).map(|l| 1u64 << l).sum();
        assert_eq!(s.stats.bits_consumed, first * 4);
        assert_eq!(s.stats.sweeps_executed, first + replay);
        assert_eq!(s.stats.substeps, s.stats.sweeps_executed * 4);
        assert_eq!(s.stats.swap_ops, s.stats.bounding_swaps + s.stats.underlying_swaps);
    }

    #[test]
    fn deterministic_given_seed() {
        let p = five();
        let a = sample(&p, Schedule::default_for(5), 123).unwrap();
        let b = sample(&p, Schedule::default_for(5), 123).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn relabeled_output_extends_original_order() {
        let p = Poset::from_pairs(4, &[(4, 1), (3, 2)]).unwrap();
        assert!(!p.is_trivially_labeled());
        for seed in 0..30 {
            let s = sample(&p, Schedule::default_for(4), seed).unwrap();
            let orig = s.original(&p);
            assert!(p.original().is_linear_extension(orig.as_slice()));
            assert_eq!(s.report(&p).permutation, orig.to_one_based());
        }
    }

    #[test]
    fn short_fixed_schedule_is_an_error() {
        assert!(matches!(
            cftp_fixed(&five(), 2, 0),
            Err(Error::ScheduleTooShort { t: 2, min: 4 })
        ));
    }
}
