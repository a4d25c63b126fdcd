//! Browser demo. Each operation takes plain inputs and returns a JSON string
//! for the page to draw. The `demo` module holds the logic and runs natively;
//! the exported functions only convert errors for JavaScript.

use wasm_bindgen::prelude::*;

pub mod demo {
    use serde::Serialize;

    use lexsamp::chains::sweep_bounding;
    use lexsamp::coins::CoinStream;
    use lexsamp::stats::{self, cftp_sampler, CurvePoint, FrequencyReport, TauSummary, SIGNIFICANCE};
    use lexsamp::{recommended_t, BoundingState, Coin, Poset, Schedule, Slot};

    pub const MAX_SAMPLES: u32 = 200_000;
    pub const MAX_CURVE_N: u32 = 40;
    pub const MAX_REPLICATES: u32 = 20_000;
    pub const MAX_TRACE_SWEEPS: u32 = 10_000;

    #[derive(Debug, Serialize)]
    pub struct Histogram {
        pub seed: u64,
        pub count: usize,
        pub passed: bool,
        pub significance: f64,
        pub frequencies: Vec<f64>,
        pub report: FrequencyReport,
    }

    /// Draws `samples` extensions of the poset in `text` and bins them
    /// against the uniform distribution.
    pub fn histogram(text: &str, samples: u32, seed: u64) -> Result<Histogram, String> {
        if samples == 0 || samples > MAX_SAMPLES {
            return Err(format!("samples must be in 1..={MAX_SAMPLES}"));
        }
        let poset = Poset::parse(text).map_err(|e| e.to_string())?;
        let schedule = Schedule::default_for(poset.len());
        let report = stats::uniformity_test(&poset, cftp_sampler(&poset, schedule), samples as usize, seed)
            .map_err(|e| e.to_string())?;
        Ok(Histogram {
            seed,
            count: report.labels.len(),
            passed: report.passes(SIGNIFICANCE),
            significance: SIGNIFICANCE,
            frequencies: report.frequencies(),
            report,
        })
    }

    #[derive(Debug, Serialize)]
    pub struct Coalescence {
        pub n: usize,
        pub recommended_t: u64,
        pub curve: Vec<CurvePoint>,
        pub tau: TauSummary,
    }

    /// Fraction of bounding chains on `n` items that have coalesced after
    /// `t` sweeps, for `t` up to twice the recommended value.
    pub fn coalescence(n: u32, replicates: u32, seed: u64) -> Result<Coalescence, String> {
        if !(2..=MAX_CURVE_N).contains(&n) {
            return Err(format!("n must be in 2..={MAX_CURVE_N}"));
        }
        if replicates == 0 || replicates > MAX_REPLICATES {
            return Err(format!("replicates must be in 1..={MAX_REPLICATES}"));
        }
        let n = n as usize;
        let t_rec = recommended_t(n);
        let step = (2 * t_rec / 60).max(1);
        let ts: Vec<u64> = (0..=2 * t_rec).step_by(step as usize).collect();
        Ok(Coalescence {
            n,
            recommended_t: t_rec,
            curve: stats::success_curve(n, &ts, replicates as usize, seed),
            tau: stats::measure_tau(n, replicates as usize, seed ^ 0x7a).summary(),
        })
    }

    #[derive(Debug, Serialize)]
    pub struct Trace {
        pub n: usize,
        pub seed: u64,
        /// One row per sweep, starting with the initial state. Each cell is
        /// an original 1-based label, or `null` for a placeholder.
        pub states: Vec<Vec<Option<usize>>>,
        pub coalesced: bool,
    }

    /// Runs the bounding chain alone from its initial state, one snapshot
    /// per sweep, until every placeholder has been replaced.
    pub fn trace(text: &str, seed: u64, max_sweeps: u32) -> Result<Trace, String> {
        if max_sweeps > MAX_TRACE_SWEEPS {
            return Err(format!("sweeps must be at most {MAX_TRACE_SWEEPS}"));
        }
        let poset = Poset::parse(text).map_err(|e| e.to_string())?;
        let n = poset.len();
        let relation = poset.relation();
        let snapshot = |y: &BoundingState| {
            y.slots()
                .iter()
                .map(|s| match s {
                    Slot::Item(a) => Some(poset.to_original()[*a] + 1),
                    Slot::Star => None,
                })
                .collect::<Vec<_>>()
        };
        let mut y = BoundingState::initial(n);
        let mut states = vec![snapshot(&y)];
        let mut coins = vec![Coin::ZERO; n - 1];
        let mut stream = CoinStream::new(seed);
        while !y.is_permutation() && states.len() <= max_sweeps as usize {
            stream.fill(&mut coins);
            sweep_bounding(&mut y, &coins, relation);
            states.push(snapshot(&y));
        }
        Ok(Trace {
            n,
            seed,
            coalesced: y.is_permutation(),
            states,
        })
    }

    pub fn to_json<T: Serialize>(value: &T) -> String {
        serde_json::to_string(value).expect("serializable")
    }
}

fn js<T: serde::Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.map(|v| demo::to_json(&v)).map_err(|e| JsValue::from_str(&e))
}

/// Seeds arrive as `f64` from JavaScript; fractional parts are dropped.
fn seed_from(seed: f64) -> u64 {
    seed.max(0.0) as u64
}

#[wasm_bindgen]
pub fn histogram(poset: &str, samples: u32, seed: f64) -> Result<String, JsValue> {
    js(demo::histogram(poset, samples, seed_from(seed)))
}

#[wasm_bindgen]
pub fn coalescence(n: u32, replicates: u32, seed: f64) -> Result<String, JsValue> {
    js(demo::coalescence(n, replicates, seed_from(seed)))
}

#[wasm_bindgen]
pub fn trace(poset: &str, seed: f64, max_sweeps: u32) -> Result<String, JsValue> {
    js(demo::trace(poset, seed_from(seed), max_sweeps))
}
