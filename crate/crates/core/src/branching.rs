//! Measurement trees: a protocol run after all unitaries have been applied,
//! reduced to a sequence of heralding measurements.
//!
//! The same tree is either enumerated exactly (every branch with its joint
//! probability) or sampled one trial at a time.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::statevec::PureState;

/// What a terminal branch delivered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    WSuccess,
    BellSuccess,
    Failure,
}

impl Classification {
    pub const ALL: [Classification; 3] = [Self::WSuccess, Self::BellSuccess, Self::Failure];

    /// Position in [`Classification::ALL`].
    pub fn index(self) -> usize {
        match self {
            Self::WSuccess => 0,
            Self::BellSuccess => 1,
            Self::Failure => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::WSuccess => "W_SUCCESS",
            Self::BellSuccess => "BELL_SUCCESS",
            Self::Failure => "FAILURE",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One terminal branch of a protocol run.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolOutcome {
    /// Measurement path, e.g. `anc=1;anc2=0`.
    pub label: String,
    /// Joint probability from the initial state.
    pub probability: f64,
    /// Normalized state of the surviving register, measured ancillas removed.
    pub post_state: Option<PureState>,
    pub classification: Classification,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Leaf {
        classification: Classification,
        state: Option<PureState>,
    },
    Measure {
        /// Normalized state right before the measurement.
        state: PureState,
        subsystem: String,
        /// Prefix used in branch labels, usually the subsystem label.
        tag: String,
        /// One child per level of `subsystem`.
        children: Vec<Node>,
    },
}

impl Node {
    /// Measures `subsystem` of `state` and builds one child per outcome from
    /// the collapsed state with `subsystem` removed. Zero-weight outcomes get
    /// `None`.
    pub fn measure<F>(state: PureState, subsystem: &str, tag: &str, mut child: F) -> Result<Node>
    where
        F: FnMut(usize, Option<PureState>) -> Result<Node>,
    {
        let resolution = state.measure_subsystem(subsystem)?;
        let children = resolution
            .branches
            .iter()
            .map(|b| {
                let post = match &b.post_state {
                    Some(s) => Some(s.slice(subsystem, b.outcome)?.normalized()?),
                    None => None,
                };
                child(b.outcome, post)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Node::Measure {
            state,
            subsystem: subsystem.to_owned(),
            tag: tag.to_owned(),
            children,
        })
    }

    pub fn leaf(classification: Classification, state: Option<PureState>) -> Node {
        Node::Leaf {
            classification,
            state,
        }
    }

    /// Every terminal branch with its joint probability, in outcome order.
    pub fn enumerate(&self) -> Result<Vec<ProtocolOutcome>> {
        let mut out = Vec::new();
        self.enumerate_into("", 1.0, &mut out)?;
        Ok(out)
    }

    fn enumerate_into(&self, prefix: &str, weight: f64, out: &mut Vec<ProtocolOutcome>) -> Result<()> {
        match self {
            Node::Leaf {
                classification,
                state,
            } => out.push(ProtocolOutcome {
                label: prefix.to_owned(),
                probability: weight,
                post_state: if weight > 0.0 { state.clone() } else { None },
                classification: *classification,
            }),
            Node::Measure {
                state,
                subsystem,
                tag,
                children,
            } => {
                let probs = state.outcome_probabilities(subsystem)?;
                for (outcome, (p, child)) in probs.iter().zip(children).enumerate() {
                    let label = if prefix.is_empty() {
                        format!("{tag}={outcome}")
                    } else {
                        format!("{prefix};{tag}={outcome}")
                    };
                    child.enumerate_into(&label, weight * p, out)?;
                }
            }
        }
        Ok(())
    }

    /// Runs one trial, sampling each measurement on the way down.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Classification> {
        let mut node = self;
        loop {
            match node {
                Node::Leaf { classification, .. } => return Ok(*classification),
                Node::Measure {
                    state,
                    subsystem,
                    children,
                    ..
                } => {
                    let outcome = state.sample_measurement(subsystem, rng)?;
                    node = &children[outcome];
                }
            }
        }
    }
}

/// Sum of outcome probabilities per classification.
pub fn totals(outcomes: &[ProtocolOutcome]) -> [f64; 3] {
    let mut t = [0.0; 3];
    for o in outcomes {
        t[o.classification.index()] += o.probability;
    }
    t
}
