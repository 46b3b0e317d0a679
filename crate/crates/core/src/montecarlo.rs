//! Repeated-trial sampling of protocol outcomes, compared with the closed
//! forms through per-class binomial z-scores.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branching::{Classification, Node, ProtocolOutcome};
use crate::cavity::{self, CavityParams};
use crate::error::{Error, Result};
use crate::protocols::{self, analytic_probabilities, WCoefficients};

/// Identifier recorded in reports for the generator behind [`simulate_trials`].
pub const RNG_ALGORITHM: &str = "chacha20";
pub const DEFAULT_THRESHOLD: f64 = 4.0;
/// Analytic probabilities this close to 0 or 1 are treated as certain.
const CERTAIN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Protocol1,
    Protocol2,
    Cavity,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [Self::Protocol1, Self::Protocol2, Self::Cavity];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Protocol1 => "protocol1",
            Self::Protocol2 => "protocol2",
            Self::Cavity => "cavity",
        }
    }

    /// Classes this protocol can end in.
    pub fn classes(self) -> &'static [Classification] {
        match self {
            Self::Protocol2 => &Classification::ALL,
            _ => &[Classification::WSuccess, Classification::Failure],
        }
    }

    /// Closed-form probability of each class.
    pub fn analytic(self, w: &WCoefficients) -> BTreeMap<Classification, f64> {
        let p = analytic_probabilities(w);
        match self {
            Self::Protocol2 => BTreeMap::from([
                (Classification::WSuccess, p.p_w),
                (Classification::BellSuccess, p.p_bell),
                (Classification::Failure, p.p_fail),
            ]),
            _ => BTreeMap::from([
                (Classification::WSuccess, p.p_w),
                (Classification::Failure, 1.0 - p.p_w),
            ]),
        }
    }

    /// Measurement tree; `params` is used by the cavity scheme only.
    pub fn tree(self, w: &WCoefficients, params: &CavityParams) -> Result<Node> {
        match self {
            Self::Protocol1 => protocols::protocol1_tree(w),
            Self::Protocol2 => protocols::protocol2_tree(w),
            Self::Cavity => cavity::cavity_tree(w, params),
        }
    }

    /// Exact branch enumeration.
    pub fn run(self, w: &WCoefficients, params: &CavityParams) -> Result<Vec<ProtocolOutcome>> {
        self.tree(w, params)?.enumerate()
    }
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Input(format!("unknown protocol {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquaredCoefficients {
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
}

impl From<&WCoefficients> for SquaredCoefficients {
    fn from(w: &WCoefficients) -> Self {
        let (a2, b2, c2) = w.squares();
        Self { a2, b2, c2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialConfig {
    pub n_trials: u64,
    pub seed: u64,
    /// Number of independent streams; trials are split evenly across them.
    pub workers: usize,
    pub cavity: CavityParams,
}

impl TrialConfig {
    pub fn new(n_trials: u64, seed: u64) -> Self {
        Self {
            n_trials,
            seed,
            workers: 1,
            cavity: CavityParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub protocol: ProtocolKind,
    pub coefficients: SquaredCoefficients,
    pub n_trials: u64,
    pub counts: BTreeMap<Classification, u64>,
    pub frequencies: BTreeMap<Classification, f64>,
    pub analytic: BTreeMap<Classification, f64>,
    /// `(freq − p)/√(p(1−p)/n)`; `None` when `p` is 0 or 1.
    pub z_scores: BTreeMap<Classification, Option<f64>>,
    pub seed: u64,
    pub rng: String,
    pub workers: usize,
}

impl TrialReport {
    /// Report for externally supplied counts. Classes missing from `counts`
    /// are taken as zero.
    pub fn from_counts(
        protocol: ProtocolKind,
        w: &WCoefficients,
        counts: &BTreeMap<Classification, u64>,
        seed: u64,
        workers: usize,
    ) -> Result<Self> {
        if let Some(c) = counts.keys().find(|c| !protocol.classes().contains(c)) {
            return Err(Error::Input(format!("{protocol} cannot produce {c}")));
        }
        let n_trials: u64 = counts.values().sum();
        if n_trials == 0 {
            return Err(Error::Input("no trials".into()));
        }
        let analytic = protocol.analytic(w);
        let n = n_trials as f64;
        let mut full_counts = BTreeMap::new();
        let mut frequencies = BTreeMap::new();
        let mut z_scores = BTreeMap::new();
        for &class in protocol.classes() {
            let k = counts.get(&class).copied().unwrap_or(0);
            let freq = k as f64 / n;
            let p = analytic[&class];
            full_counts.insert(class, k);
            frequencies.insert(class, freq);
            z_scores.insert(class, z_score(freq, p, n_trials));
        }
        Ok(Self {
            protocol,
            coefficients: w.into(),
            n_trials,
            counts: full_counts,
            frequencies,
            analytic,
            z_scores,
            seed,
            rng: RNG_ALGORITHM.to_owned(),
            workers,
        })
    }
}

/// Binomial z-score, undefined for certain events.
pub fn z_score(freq: f64, p: f64, n: u64) -> Option<f64> {
    if p <= CERTAIN_TOL || p >= 1.0 - CERTAIN_TOL {
        return None;
    }
    Some((freq - p) / (p * (1.0 - p) / n as f64).sqrt())
}

/// Generator for `worker` under master `seed`: one ChaCha20 stream per worker.
pub fn worker_rng(seed: u64, worker: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

/// Runs `config.n_trials` independent trials, sampling every measurement.
pub fn simulate_trials(protocol: ProtocolKind, w: &WCoefficients, config: &TrialConfig) -> Result<TrialReport> {
    if config.n_trials == 0 {
        return Err(Error::Input("n_trials must be at least 1".into()));
    }
    let workers = config.workers.max(1);
    let tree = protocol.tree(w, &config.cavity)?;
    let per = config.n_trials / workers as u64;
    let extra = config.n_trials % workers as u64;

    let partials = (0..workers)
        .into_par_iter()
        .map(|i| {
            let n = per + u64::from((i as u64) < extra);
            let mut rng = worker_rng(config.seed, i);
            let mut counts = [0u64; 3];
            for _ in 0..n {
                counts[tree.sample(&mut rng)?.index()] += 1;
            }
            Ok(counts)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut counts = BTreeMap::new();
    for class in Classification::ALL {
        let k: u64 = partials.iter().map(|c| c[class.index()]).sum();
        if k > 0 || protocol.classes().contains(&class) {
            counts.insert(class, k);
        }
    }
    TrialReport::from_counts(protocol, w, &counts, config.seed, workers)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub threshold: f64,
    pub z_scores: BTreeMap<Classification, Option<f64>>,
    /// Classes that failed, including certain events that were contradicted.
    pub failed: Vec<Classification>,
}

/// Passes iff every defined `|z| < threshold`. Classes with `p ∈ {0, 1}` pass
/// only if the observed frequency equals `p`.
pub fn compare_frequencies(report: &TrialReport, threshold: f64) -> Verdict {
    let failed = report
        .z_scores
        .iter()
        .filter(|(class, z)| match z {
            Some(z) => !(z.abs() < threshold),
            None => (report.frequencies[class] - report.analytic[class]).abs() > CERTAIN_TOL,
        })
        .map(|(c, _)| *c)
        .collect::<Vec<_>>();
    Verdict {
        pass: failed.is_empty(),
        threshold,
        z_scores: report.z_scores.clone(),
        failed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> WCoefficients {
        WCoefficients::from_squares(0.5, 0.3, 0.2).unwrap()
    }

    #[test]
    fn certain_success_for_w_state() {
        let w = WCoefficients::from_squares(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0).unwrap();
        let r = simulate_trials(ProtocolKind::Protocol1, &w, &TrialConfig::new(1000, 5)).unwrap();
        assert_eq!(r.counts[&Classification::WSuccess], 1000);
        assert!(r.z_scores.values().all(Option::is_none));
        assert!(compare_frequencies(&r, DEFAULT_THRESHOLD).pass);
    }

    #[test]
    fn protocol1_frequency_within_bound() {
        let r = simulate_trials(ProtocolKind::Protocol1, &sample(), &TrialConfig::new(100_000, 42)).unwrap();
        let f = r.frequencies[&Classification::WSuccess];
        assert!((f - 0.6).abs() < 4.0 * (0.24f64 / 1e5).sqrt(), "{f}");
    }

    #[test]
    fn exact_frequencies_give_zero_z() {
        let counts = BTreeMap::from([(Classification::WSuccess, 600), (Classification::Failure, 400)]);
        let r = TrialReport::from_counts(ProtocolKind::Protocol1, &sample(), &counts, 0, 1).unwrap();
        let v = compare_frequencies(&r, 4.0);
        assert!(v.pass);
        assert!(r.z_scores.values().all(|z| z.unwrap().abs() < 1e-9));
    }

    #[test]
    fn ten_sigma_off_fails() {
        // sigma = sqrt(0.24/10000) ≈ 0.0049
        let counts = BTreeMap::from([(Classification::WSuccess, 6490), (Classification::Failure, 3510)]);
        let r = TrialReport::from_counts(ProtocolKind::Protocol1, &sample(), &counts, 0, 1).unwrap();
        assert!(!compare_frequencies(&r, 4.0).pass);
    }

    #[test]
    fn threshold_is_strict() {
        let counts = BTreeMap::from([(Classification::WSuccess, 6490), (Classification::Failure, 3510)]);
        let r = TrialReport::from_counts(ProtocolKind::Protocol1, &sample(), &counts, 0, 1).unwrap();
        let z = r.z_scores[&Classification::WSuccess].unwrap().abs();
        assert!(!compare_frequencies(&r, z).pass);
        assert!(compare_frequencies(&r, z * (1.0 + 1e-12)).pass);
    }

    #[test]
    fn contradicted_certainty_fails() {
        let w = WCoefficients::from_squares(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0).unwrap();
        let counts = BTreeMap::from([(Classification::WSuccess, 99), (Classification::Failure, 1)]);
        let r = TrialReport::from_counts(ProtocolKind::Protocol1, &w, &counts, 0, 1).unwrap();
        assert!(!compare_frequencies(&r, 4.0).pass);
    }

    #[test]
    fn deterministic_given_seed_and_workers() {
        let mut cfg = TrialConfig::new(20_000, 9);
        cfg.workers = 4;
        let a = simulate_trials(ProtocolKind::Protocol2, &sample(), &cfg).unwrap();
        let b = simulate_trials(ProtocolKind::Protocol2, &sample(), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_trials, 20_000);
    }

    #[test]
    fn report_json_round_trip() {
        let r = simulate_trials(ProtocolKind::Cavity, &sample(), &TrialConfig::new(500, 1)).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: TrialReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn protocol_names_parse() {
        for k in ProtocolKind::ALL {
            assert_eq!(k.as_str().parse::<ProtocolKind>().unwrap(), k);
        }
        assert!("protocol3".parse::<ProtocolKind>().is_err());
    }
}
