//! Statistical harness: goodness-of-fit against exact targets, placeholder
//! travel times, coalescence curves and cost aggregation.
//!
//! Every replicate `i` of a harness call runs on `mix64(seed, i)`, so results
//! do not depend on how replicates are scheduled across threads.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::cftp::{self, recommended_t, RunStats, Schedule};
use crate::chains::{bc_step, BoundingState};
use crate::coins::{mix64, CoinStream, CoinTape};
use crate::error::Result;
use crate::oracle::enumerate_extensions;
use crate::poset::{Permutation, Poset, Relation};

/// Significance level used by every acceptance gate.
pub const SIGNIFICANCE: f64 = 1e-3;

pub(crate) fn replicate<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
pub fn chi_square_sf(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("dof > 0");
    dist.sf(stat).clamp(0.0, 1.0)
}

/// Observed counts over a fixed list of cells against target probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    /// Cell labels, 1-based permutations in canonical order.
    pub labels: Vec<Vec<usize>>,
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
    pub trials: u64,
    /// Samples that matched no cell.
    pub unmatched: u64,
    /// Samples that landed in a cell with target probability zero.
    pub zero_cell_hits: u64,
    pub chi_square: f64,
    /// Number of positive-probability cells minus one.
    pub dof: usize,
    pub p_value: f64,
}

impl FrequencyReport {
    /// Pearson's statistic over the positive-probability cells. Cells with
    /// target zero are left out of the statistic and the degrees of freedom
    /// and reported through `zero_cell_hits` instead.
    pub fn from_counts(labels: Vec<Vec<usize>>, observed: Vec<u64>, expected: Vec<f64>, unmatched: u64) -> Self {
        assert_eq!(observed.len(), expected.len());
        assert_eq!(labels.len(), expected.len());
        let trials = observed.iter().sum::<u64>() + unmatched;
        let mut chi = 0.0;
        let mut live = 0usize;
        let mut zero_cell_hits = 0;
        for (&o, &p) in observed.iter().zip(&expected) {
            if p > 0.0 {
                let e = p * trials as f64;
                chi += (o as f64 - e).powi(2) / e;
                live += 1;
            } else {
                zero_cell_hits += o;
            }
        }
        let dof = live.saturating_sub(1);
        FrequencyReport {
            labels,
            observed,
            expected,
            trials,
            unmatched,
            zero_cell_hits,
            chi_square: chi,
            dof,
            p_value: chi_square_sf(chi, dof),
        }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.observed
            .iter()
            .map(|&o| o as f64 / self.trials.max(1) as f64)
            .collect()
    }

    /// No stray samples and the chi-square test is not rejected at `alpha`.
    pub fn passes(&self, alpha: f64) -> bool {
        self.unmatched == 0 && self.zero_cell_hits == 0 && self.p_value >= alpha
    }
}

/// Bins `samples` over `cells` and tests them against `expected`.
pub fn cells_report<'a>(
    cells: &[Permutation],
    expected: &[f64],
    samples: impl IntoIterator<Item = &'a Permutation>,
) -> FrequencyReport {
    let mut observed = vec![0u64; cells.len()];
    let mut unmatched = 0;
    for s in samples {
        match cells.iter().position(|c| c == s) {
            Some(i) => observed[i] += 1,
            None => unmatched += 1,
        }
    }
    FrequencyReport::from_counts(
        cells.iter().map(Permutation::to_one_based).collect(),
        observed,
        expected.to_vec(),
        unmatched,
    )
}

/// Draws `trials` samples with `sampler(replicate_seed)` (original labels)
/// and tests them against the uniform distribution on the extensions of the
/// original relation.
pub fn uniformity_test<F>(poset: &Poset, sampler: F, trials: usize, seed: u64) -> Result<FrequencyReport>
where
    F: Fn(u64) -> Permutation + Sync + Send,
{
    let set = enumerate_extensions(poset.original())?;
    let samples = replicate(trials, |i| sampler(mix64(seed, i as u64)));
    let mut observed = vec![0u64; set.count()];
    let mut unmatched = 0;
    for s in &samples {
        match set.index_of(s) {
            Some(i) => observed[i] += 1,
            None => unmatched += 1,
        }
    }
    let p = 1.0 / set.count() as f64;
    Ok(FrequencyReport::from_counts(
        set.extensions().iter().map(Permutation::to_one_based).collect(),
        observed,
        vec![p; set.count()],
        unmatched,
    ))
}

/// CFTP sampler in original labels, for use with [`uniformity_test`].
pub fn cftp_sampler(poset: &Poset, schedule: Schedule) -> impl Fn(u64) -> Permutation + Sync + Send + '_ {
    move |seed| {
        cftp::sample(poset, schedule, seed)
            .expect("schedule validated by caller")
            .original(poset)
    }
}

/// Sweeps taken by a tagged placeholder, started in the first slot, to be
/// promoted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSample {
    pub n: usize,
    pub values: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSummary {
    pub n: usize,
    pub replicates: usize,
    pub mean: f64,
    pub std_error: f64,
    pub max: u64,
    /// `(n² − n + 2) / 2`
    pub mean_bound: f64,
    /// `(n² − n + 3) / 2`
    pub tail_threshold: f64,
    /// Fraction of replicates with `τ ≥ tail_threshold`.
    pub tail_fraction: f64,
}

impl TauSample {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<u64>() as f64 / self.values.len() as f64
    }

    pub fn std_error(&self) -> f64 {
        let m = self.mean();
        let len = self.values.len() as f64;
        if len < 2.0 {
            return 0.0;
        }
        let var = self.values.iter().map(|&v| (v as f64 - m).powi(2)).sum::<f64>() / (len - 1.0);
        (var / len).sqrt()
    }

    pub fn mean_bound(&self) -> f64 {
        let n = self.n as f64;
        (n * n - n + 2.0) / 2.0
    }

    pub fn tail_threshold(&self) -> f64 {
        let n = self.n as f64;
        (n * n - n + 3.0) / 2.0
    }

    /// Fraction of values at or above `a`.
    pub fn tail_fraction(&self, a: f64) -> f64 {
        self.values.iter().filter(|&&v| v as f64 >= a).count() as f64 / self.values.len() as f64
    }

    pub fn summary(&self) -> TauSummary {
        TauSummary {
            n: self.n,
            replicates: self.values.len(),
            mean: self.mean(),
            std_error: self.std_error(),
            max: self.values.iter().copied().max().unwrap_or(0),
            mean_bound: self.mean_bound(),
            tail_threshold: self.tail_threshold(),
            tail_fraction: self.tail_fraction(self.tail_threshold()),
        }
    }
}

/// Runs the bounding chain and follows one placeholder through it.
///
/// Placeholders are interchangeable in the state itself, so the tag is
/// carried alongside: when two placeholders sit at a substep whose coin is 1
/// the tag moves as if they had swapped. This leaves the state untouched and
/// makes the tagged symbol move on every 1-coin at its boundary, exactly like
/// a placeholder next to an item.
struct TaggedRun {
    relation: Relation,
    y: BoundingState,
    tag: usize,
}

impl TaggedRun {
    fn new(n: usize, tag: usize) -> Self {
        let y = BoundingState::initial(n);
        assert!(y.slots()[tag].is_star(), "tag must start on a placeholder");
        TaggedRun {
            relation: Relation::antichain(n),
            y,
            tag,
        }
    }

    /// One sweep; returns true once the tagged placeholder has been promoted.
    fn sweep(&mut self, stream: &mut CoinStream) -> bool {
        let n = self.y.len();
        for i in 0..n - 1 {
            let c = stream.next_coin();
            let partner = if self.tag == i {
                Some(i + 1)
            } else if self.tag == i + 1 {
                Some(i)
            } else {
                None
            };
            let partner_is_item = partner.is_some_and(|p| !self.y.slots()[p].is_star());
            let out = bc_step(&mut self.y, i, c, &self.relation);
            if let Some(p) = partner {
                if c.is_one() {
                    debug_assert!(!partner_is_item || out.swapped);
                    self.tag = p;
                }
            }
            if self.tag == n - 1 {
                debug_assert!(out.promoted);
                return true;
            }
        }
        false
    }
}

/// Sweeps until the placeholder starting in slot 1 is promoted, for each of
/// `replicates` runs.
pub fn measure_tau(n: usize, replicates: usize, seed: u64) -> TauSample {
    assert!(n >= 2, "τ needs at least two slots");
    let values = replicate(replicates, |i| {
        let mut stream = CoinStream::new(mix64(seed, i as u64));
        let mut run = TaggedRun::new(n, 0);
        let mut sweeps = 0u64;
        loop {
            sweeps += 1;
            if run.sweep(&mut stream) {
                break sweeps;
            }
        }
    });
    TauSample { n, values }
}

/// Signed displacement of a tagged placeholder over one sweep, starting at
/// 0-based slot `start` of an `n`-slot initial state. A promoted placeholder
/// reports `n - 1 - start`.
pub fn star_displacements(n: usize, start: usize, replicates: usize, seed: u64) -> Vec<i64> {
    assert!(start + 1 < n);
    replicate(replicates, |i| {
        let mut stream = CoinStream::new(mix64(seed, i as u64));
        let mut run = TaggedRun::new(n, start);
        run.sweep(&mut stream);
        run.tag as i64 - start as i64
    })
}

/// First sweep after which the bounding chain alone is a permutation, or
/// `None` if that has not happened within `max_t` sweeps.
pub fn coalescence_time(n: usize, max_t: u64, seed: u64) -> Option<u64> {
    if n < 2 {
        return Some(0);
    }
    let relation = Relation::antichain(n);
    let mut y = BoundingState::initial(n);
    let mut stream = CoinTape::new(seed, max_t, n - 1).stream();
    for t in 1..=max_t {
        for i in 0..n - 1 {
            bc_step(&mut y, i, stream.next_coin(), &relation);
        }
        if y.is_permutation() {
            return Some(t);
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: u64,
    pub successes: u64,
    pub replicates: u64,
    pub fraction: f64,
}

/// Fraction of bounding-only runs that have coalesced after `t` sweeps, for
/// every `t` in `ts`. Each replicate is one run, read off at every `t`.
pub fn success_curve(n: usize, ts: &[u64], replicates: usize, seed: u64) -> Vec<CurvePoint> {
    let max_t = ts.iter().copied().max().unwrap_or(0);
    let times = replicate(replicates, |i| coalescence_time(n, max_t, mix64(seed, i as u64)));
    ts.iter()
        .map(|&t| {
            let successes = times.iter().filter(|c| c.is_some_and(|c| c <= t)).count() as u64;
            CurvePoint {
                t,
                successes,
                replicates: replicates as u64,
                fraction: successes as f64 / replicates.max(1) as f64,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub max: u64,
}

impl Moments {
    fn of(values: impl Iterator<Item = u64> + Clone) -> Self {
        let count = values.clone().count().max(1) as f64;
        Moments {
            mean: values.clone().sum::<u64>() as f64 / count,
            max: values.max().unwrap_or(0),
        }
    }
}

/// Aggregate cost of `runs` independent samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub n: usize,
    pub runs: usize,
    pub schedule: Schedule,
    pub bits: Moments,
    pub substeps: Moments,
    pub sweeps: Moments,
    pub swap_ops: Moments,
    pub recursion_depth: Moments,
    /// `1.83 · n³ · ln n`
    pub bits_bound: f64,
    /// `2.75 · n³ · ln n`
    pub ops_bound: f64,
    /// `n (n² − n + 3) ceil(log2 n)`
    pub ops_exact_bound: f64,
    /// With a fixed schedule `t`: `2 t (n − 1)` bits and `3 t (n − 1)`
    /// substeps (per-substep units), and `2 t`, `3 t` in sweeps.
    pub fixed_t: Option<FixedTBounds>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedTBounds {
    pub t: u64,
    pub bits_per_substep_bound: f64,
    pub substeps_bound: f64,
    pub bits_per_sweep_bound: f64,
    pub sweeps_bound: f64,
    /// Mean bits divided by `n − 1`, comparable to `bits_per_sweep_bound`.
    pub mean_bit_sweeps: f64,
}

impl CostReport {
    pub fn from_runs(n: usize, schedule: Schedule, stats: &[RunStats]) -> Self {
        let nf = n as f64;
        let cube_log = nf.powi(3) * nf.ln();
        let log2_ceil = if n < 2 { 0 } else { 64 - (n as u64 - 1).leading_zeros() };
        let bits = Moments::of(stats.iter().map(|s| s.bits_consumed));
        let fixed_t = match schedule {
            Schedule::Fixed { t } => {
                let tf = t as f64;
                let width = (n.max(1) - 1) as f64;
                Some(FixedTBounds {
                    t,
                    bits_per_substep_bound: 2.0 * tf * width,
                    substeps_bound: 3.0 * tf * width,
                    bits_per_sweep_bound: 2.0 * tf,
                    sweeps_bound: 3.0 * tf,
                    mean_bit_sweeps: if width > 0.0 { bits.mean / width } else { 0.0 },
                })
            }
            Schedule::Doubling { .. } => None,
        };
        CostReport {
            n,
            runs: stats.len(),
            schedule,
            bits,
            substeps: Moments::of(stats.iter().map(|s| s.substeps)),
            sweeps: Moments::of(stats.iter().map(|s| s.sweeps_executed)),
            swap_ops: Moments::of(stats.iter().map(|s| s.swap_ops)),
            recursion_depth: Moments::of(stats.iter().map(|s| s.recursion_depth as u64)),
            bits_bound: 1.83 * cube_log,
            ops_bound: 2.75 * cube_log,
            ops_exact_bound: nf * (nf * nf - nf + 3.0) * log2_ceil as f64,
            fixed_t,
        }
    }
}

/// Runs `runs` samples of `poset` under `schedule` and aggregates their costs.
pub fn cost_report(poset: &Poset, schedule: Schedule, runs: usize, seed: u64) -> Result<CostReport> {
    schedule.validate(poset.len())?;
    let stats = replicate(runs, |i| {
        cftp::sample(poset, schedule, mix64(seed, i as u64))
            .expect("validated schedule")
            .stats
    });
    Ok(CostReport::from_runs(poset.len(), schedule, &stats))
}

/// Cost report at the fixed recommended `t`.
pub fn cost_report_recommended(poset: &Poset, runs: usize, seed: u64) -> Result<CostReport> {
    cost_report(poset, Schedule::Fixed { t: recommended_t(poset.len()) }, runs, seed)
}

/// One-sided binomial standard error of a fraction `p` over `n` trials.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::erf::erfc;

    #[test]
    fn two_cell_p_value_matches_closed_form() {
        // With one degree of freedom the statistic is a squared standard
        // normal, so P(X ≥ x) = erfc(sqrt(x / 2)).
        for (o, n) in [(480u64, 1000u64), (530, 1000), (5, 20), (9_000, 18_500)] {
            let r = FrequencyReport::from_counts(
                vec![vec![1, 2], vec![2, 1]],
                vec![o, n - o],
                vec![0.5, 0.5],
                0,
            );
            let z = (o as f64 - n as f64 / 2.0) / (n as f64 / 4.0).sqrt();
            assert!((r.chi_square - z * z).abs() < 1e-9 * (z * z).max(1.0));
            let closed = erfc((r.chi_square / 2.0).sqrt());
            assert!(
                ((r.p_value - closed) / closed).abs() < 1e-9,
                "{} vs {closed}",
                r.p_value
            );
        }
    }

    #[test]
    fn reference_values() {
        // scipy.stats.chisquare([1,2,3,4], [2,3,4,1]) → (10.0833.., 0.017870..)
        let r = FrequencyReport::from_counts(
            vec![vec![]; 4],
            vec![1, 2, 3, 4],
            vec![0.2, 0.3, 0.4, 0.1],
            0,
        );
        assert!((r.chi_square - 10.083333333333334).abs() < 1e-9);
        assert!((r.p_value - 0.017870892893625558).abs() < 1e-9);
    }

    #[test]
    fn zero_cells_are_excluded_from_dof() {
        let r = FrequencyReport::from_counts(
            vec![vec![]; 4],
            vec![50, 50, 0, 0],
            vec![0.5, 0.5, 0.0, 0.0],
            0,
        );
        assert_eq!(r.dof, 1);
        assert_eq!(r.chi_square, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(r.passes(SIGNIFICANCE));
        let hit = FrequencyReport::from_counts(vec![vec![]; 2], vec![10, 1], vec![1.0, 0.0], 0);
        assert_eq!(hit.zero_cell_hits, 1);
        assert!(!hit.passes(SIGNIFICANCE));
    }

    #[test]
    fn single_cell_chain() {
        let p = Poset::from_pairs(3, &[(1, 2), (2, 3)]).unwrap();
        let r = uniformity_test(&p, cftp_sampler(&p, Schedule::default_for(3)), 200, 1).unwrap();
        assert_eq!(r.observed, vec![200]);
        assert_eq!(r.frequencies(), vec![1.0]);
        assert_eq!(r.chi_square, 0.0);
        assert_eq!(r.dof, 0);
    }

    #[test]
    fn tau_for_two_slots_is_geometric() {
        let s = measure_tau(2, 20_000, 3);
        assert!(s.values.iter().all(|&v| v >= 1));
        assert_eq!(s.mean_bound(), 2.0);
        assert!((s.mean() - 2.0).abs() < 4.0 * s.std_error());
    }

    #[test]
    fn curve_starts_at_zero_and_is_monotone() {
        let c = success_curve(5, &[0, 4, 10, 35, 70], 500, 9);
        assert_eq!(c[0].fraction, 0.0);
        for w in c.windows(2) {
            assert!(w[0].fraction <= w[1].fraction);
        }
    }

    #[test]
    fn cost_of_single_item_is_zero() {
        let p = Poset::from_pairs(1, &[]).unwrap();
        let r = cost_report_recommended(&p, 10, 0).unwrap();
        assert_eq!(r.bits.max, 0);
        assert_eq!(r.substeps.max, 0);
    }

    #[test]
    fn tagged_star_motion_is_consistent_with_state() {
        // debug assertions inside TaggedRun check the tag against the state
        let d = star_displacements(12, 5, 2_000, 4);
        assert!(d.iter().all(|&x| x >= -1));
    }
}
