use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use wdistill::montecarlo::{SquaredCoefficients, Verdict};
use wdistill::protocols::{self, PARTICLES, PARTICLE_2, PARTICLE_3};
use wdistill::{Classification, Frame, ProtocolKind, ProtocolOutcome, TrialReport, WCoefficients};

/// Amplitudes below this are left out of printed kets.
const KET_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analytic {
    pub p_w: f64,
    pub p_bell: f64,
    pub p_fail: f64,
}

impl Analytic {
    pub fn new(protocol: ProtocolKind, w: &WCoefficients) -> Self {
        let map = protocol.analytic(w);
        let get = |c| map.get(&c).copied().unwrap_or(0.0);
        Self {
            p_w: get(Classification::WSuccess),
            p_bell: get(Classification::BellSuccess),
            p_fail: get(Classification::Failure),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub label: String,
    pub probability: f64,
    pub classification: Classification,
    /// Fidelity of the surviving particles with `|W₃⟩`.
    pub fidelity: Option<f64>,
    /// Concurrence of particles 2 and 3.
    pub concurrence: Option<f64>,
    /// Post-measurement state of particles 1, 2, 3 as a ket.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
}

impl Branch {
    pub fn from_outcome(o: &ProtocolOutcome) -> Self {
        let particles = o
            .post_state
            .as_ref()
            .filter(|s| s.labels().iter().map(String::as_str).eq(PARTICLES));
        Self {
            label: o.label.clone(),
            probability: o.probability,
            classification: o.classification,
            fidelity: particles.and_then(|s| s.fidelity(&protocols::w3()).ok()),
            concurrence: particles.and_then(|s| {
                s.partial_trace(&[PARTICLE_2, PARTICLE_3])
                    .and_then(|rho| rho.concurrence())
                    .ok()
            }),
            state: particles.map(|s| s.ket_string(KET_THRESHOLD)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityInfo {
    pub dt1: f64,
    pub dt2: f64,
    pub frame: Frame,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub report: TrialReport,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub classification: Classification,
    pub outcomes: Vec<(String, usize)>,
    pub events: usize,
    pub log: String,
}

/// Top-level document emitted by `run` and `montecarlo`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub protocol: ProtocolKind,
    pub coefficients: SquaredCoefficients,
    pub analytic: Analytic,
    pub branches: Vec<Branch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity: Option<CavityInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub montecarlo: Option<MonteCarlo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session: Option<SessionInfo>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.montecarlo.as_ref().is_none_or(|m| m.verdict.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,probability,classification,fidelity,concurrence\n");
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.16e}")).unwrap_or_default();
        for b in &self.branches {
            let _ = writeln!(
                out,
                "{},{:.16e},{},{},{}",
                b.label,
                b.probability,
                b.classification,
                opt(b.fidelity),
                opt(b.concurrence)
            );
        }
        out
    }

    pub fn to_human(&self) -> String {
        let c = &self.coefficients;
        let a = &self.analytic;
        let mut out = String::new();
        let _ = writeln!(out, "protocol    {}", self.protocol);
        let _ = writeln!(out, "squares     a2={:.12} b2={:.12} c2={:.12}", c.a2, c.b2, c.c2);
        if let Some(p) = self.permutation {
            let _ = writeln!(out, "reordered   {p:?}");
        }
        let _ = writeln!(
            out,
            "analytic    p_w={:.12} p_bell={:.12} p_fail={:.12}",
            a.p_w, a.p_bell, a.p_fail
        );
        if let Some(cav) = &self.cavity {
            let _ = writeln!(out, "cavity      dt1={:.12} dt2={:.12} frame={}", cav.dt1, cav.dt2, cav.frame);
        }
        let _ = writeln!(out, "branches (kets are |particle1 particle2 particle3>)");
        for b in &self.branches {
            let _ = write!(out, "  {:<16} {:<12} p={:.12}", b.label, b.classification.as_str(), b.probability);
            if let Some(f) = b.fidelity {
                let _ = write!(out, " F={f:.12}");
            }
            if let Some(cc) = b.concurrence {
                let _ = write!(out, " C23={cc:.12}");
            }
            out.push('\n');
            if let Some(s) = &b.state {
                let _ = writeln!(out, "    {s}");
            }
        }
        if let Some(mc) = &self.montecarlo {
            let r = &mc.report;
            let _ = writeln!(
                out,
                "montecarlo  n={} seed={} rng={} workers={} threshold={} {}",
                r.n_trials,
                r.seed,
                r.rng,
                r.workers,
                mc.verdict.threshold,
                if mc.verdict.pass { "PASS" } else { "FAIL" }
            );
            for (class, k) in &r.counts {
                let z = r.z_scores[class].map_or("-".to_owned(), |z| format!("{z:+.3}"));
                let _ = writeln!(
                    out,
                    "  {:<12} count={k} freq={:.6} p={:.6} z={z}",
                    class.as_str(), r.frequencies[class], r.analytic[class]
                );
            }
        }
        if let Some(s) = &self.session {
            let _ = writeln!(
                out,
                "session     {} after {:?}, {} events logged to {}",
                s.classification, s.outcomes, s.events, s.log
            );
        }
        out
    }
}

/// Replay summary for `locc-replay`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutput {
    pub events: usize,
    pub rejected: usize,
    pub owners: BTreeMap<String, String>,
    pub labels: Vec<String>,
    pub state: String,
}
