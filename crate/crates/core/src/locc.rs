//! Locality bookkeeping for the distributed protocols.
//!
//! Every subsystem has exactly one owner. Joint operations are accepted only
//! when all operands share an owner; measurement outcomes are broadcast to
//! everyone; particles can be handed from one location to another. The event
//! log is line-delimited JSON and can be replayed.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::branching::Classification;
use crate::cavity::{self, CavityParams, CAVITY};
use crate::error::{Error, Result};
use crate::protocols::{
    self, WCoefficients, ANCILLA, PARTICLE_1, PARTICLE_2, PARTICLE_3, RECYCLE_ANCILLA,
};
use crate::statevec::{JointUnitary, PureState, C64, NULL_BRANCH_TOL};

pub const ALICE: &str = "Alice";
pub const BOB: &str = "Bob";
pub const CLIFF: &str = "Cliff";

/// A named site holding subsystems.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Location(String);

impl Location {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Location {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum EventKind {
    /// Initial state and ownership; always the first event.
    Init {
        state: PureState,
        owners: BTreeMap<String, Location>,
    },
    /// Fresh subsystem in `|0⟩` appended to the register.
    Prepare { subsystem: String, dim: usize },
    /// Operator on the listed subsystems, first listed varying fastest.
    Apply {
        op: String,
        subsystems: Vec<String>,
        matrix: Vec<C64>,
    },
    Measure {
        subsystem: String,
        outcome: usize,
        probability: f64,
    },
    Broadcast { message: String },
    Transfer {
        subsystem: String,
        from: Location,
        to: Location,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub ordinal: u64,
    pub location: Location,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// Chooses measurement outcomes for a session.
pub trait OutcomeSource {
    fn choose(&mut self, state: &PureState, subsystem: &str) -> Result<usize>;
}

/// Draws outcomes with the Born probabilities.
pub struct Sampled<R>(pub R);

impl<R: Rng> OutcomeSource for Sampled<R> {
    fn choose(&mut self, state: &PureState, subsystem: &str) -> Result<usize> {
        state.sample_measurement(subsystem, &mut self.0)
    }
}

/// Replays a fixed list of outcomes.
#[derive(Clone, Debug, Default)]
pub struct Scripted(VecDeque<usize>);

impl Scripted {
    pub fn new(outcomes: impl IntoIterator<Item = usize>) -> Self {
        Self(outcomes.into_iter().collect())
    }
}

impl OutcomeSource for Scripted {
    fn choose(&mut self, _: &PureState, subsystem: &str) -> Result<usize> {
        self.0
            .pop_front()
            .ok_or_else(|| Error::Input(format!("no scripted outcome left for {subsystem:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoccSession {
    owners: BTreeMap<String, Location>,
    state: PureState,
    log: Vec<Event>,
    rejected: usize,
}

impl LoccSession {
    pub fn new<I, S, L>(state: PureState, ownership: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, L)>,
        S: Into<String>,
        L: Into<Location>,
    {
        let owners: BTreeMap<String, Location> =
            ownership.into_iter().map(|(s, l)| (s.into(), l.into())).collect();
        for label in state.labels() {
            if !owners.contains_key(label) {
                return Err(Error::Registry(format!("subsystem {label:?} has no owner")));
            }
        }
        if let Some(extra) = owners.keys().find(|k| !state.labels().contains(k)) {
            return Err(Error::Registry(format!("owner given for unknown subsystem {extra:?}")));
        }
        let mut session = Self {
            owners: owners.clone(),
            state: state.clone(),
            log: Vec::new(),
            rejected: 0,
        };
        session.push(Location::new("*"), EventKind::Init { state, owners });
        Ok(session)
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn log(&self) -> &[Event] {
        &self.log
    }

    pub fn owners(&self) -> &BTreeMap<String, Location> {
        &self.owners
    }

    /// Number of operations refused for locality or ownership reasons.
    pub fn rejected(&self) -> usize {
        self.rejected
    }

    pub fn owner(&self, subsystem: &str) -> Result<&Location> {
        self.owners
            .get(subsystem)
            .ok_or_else(|| Error::Registry(format!("unknown subsystem {subsystem:?}")))
    }

    fn push(&mut self, location: Location, kind: EventKind) {
        let ordinal = self.log.len() as u64;
        self.log.push(Event {
            ordinal,
            location,
            kind,
        });
    }

    /// Common owner of `subsystems`, or a locality violation.
    fn co_located(&mut self, op: &str, subsystems: &[String]) -> Result<Location> {
        let owners = subsystems
            .iter()
            .map(|s| self.owner(s).cloned())
            .collect::<Result<Vec<_>>>()?;
        match owners.split_first() {
            Some((first, rest)) if rest.iter().all(|o| o == first) => Ok(first.clone()),
            Some(_) => {
                self.rejected += 1;
                Err(Error::LocalityViolation {
                    op: op.to_owned(),
                    subsystems: subsystems.to_vec(),
                    owners: owners.iter().map(|o| o.to_string()).collect(),
                })
            }
            None => Err(Error::Input(format!("{op} acts on no subsystems"))),
        }
    }

    /// Appends a fresh subsystem in `|0⟩`, owned by `location`.
    pub fn prepare_ancilla(&mut self, location: impl Into<Location>, label: &str, dim: usize) -> Result<()> {
        let location = location.into();
        let fresh = PureState::basis(&[label], &[dim], &[0])?;
        self.state = self.state.tensor(&fresh)?;
        self.owners.insert(label.to_owned(), location.clone());
        self.push(
            location,
            EventKind::Prepare {
                subsystem: label.to_owned(),
                dim,
            },
        );
        Ok(())
    }

    /// Applies an operator that must act within a single location.
    pub fn local_apply_operator(&mut self, op: &str, subsystems: &[&str], matrix: &[C64]) -> Result<()> {
        let subsystems: Vec<String> = subsystems.iter().map(|s| s.to_string()).collect();
        let location = self.co_located(op, &subsystems)?;
        self.state = self.state.apply_operator(&subsystems, matrix)?;
        self.push(
            location,
            EventKind::Apply {
                op: op.to_owned(),
                subsystems,
                matrix: matrix.to_vec(),
            },
        );
        Ok(())
    }

    pub fn local_apply(&mut self, op: &str, u: &JointUnitary, p: &str, a: &str) -> Result<()> {
        let location = self.co_located(op, &[p.to_owned(), a.to_owned()])?;
        self.state = self.state.apply_joint_unitary(u, p, a)?;
        self.push(
            location,
            EventKind::Apply {
                op: op.to_owned(),
                subsystems: vec![p.to_owned(), a.to_owned()],
                matrix: u.row_major(),
            },
        );
        Ok(())
    }

    /// Jaynes–Cummings evolution of `atom` with the cavity `field`.
    pub fn local_jc_evolve(&mut self, atom: &str, field: &str, params: &CavityParams, t: f64) -> Result<()> {
        self.co_located("jc", &[atom.to_owned(), field.to_owned()])?;
        // run the guarded path first so truncation errors surface here
        cavity::jc_evolve(&self.state, atom, field, params, t)?;
        self.local_apply_operator("jc", &[atom, field], &cavity::jc_propagator(params, t)?)
    }

    /// Measures `q` at its owner's location, collapses the state, and
    /// broadcasts the outcome as `q=outcome`.
    pub fn local_measure(&mut self, q: &str, source: &mut dyn OutcomeSource) -> Result<usize> {
        let outcome = source.choose(&self.state, q)?;
        let location = self.collapse(q, outcome)?;
        self.broadcast(location, &format!("{q}={outcome}"));
        Ok(outcome)
    }

    fn collapse(&mut self, q: &str, outcome: usize) -> Result<Location> {
        let location = self.owner(q)?.clone();
        let probs = self.state.outcome_probabilities(q)?;
        let probability = *probs
            .get(outcome)
            .ok_or_else(|| Error::Input(format!("outcome {outcome} out of range for {q:?}")))?;
        if probability < NULL_BRANCH_TOL {
            return Err(Error::Input(format!(
                "outcome {outcome} of {q:?} has probability {probability:e}"
            )));
        }
        self.state = self.state.project(q, outcome)?.normalized()?;
        self.push(
            location.clone(),
            EventKind::Measure {
                subsystem: q.to_owned(),
                outcome,
                probability,
            },
        );
        Ok(location)
    }

    /// Classical message from `from`, visible to every location.
    pub fn broadcast(&mut self, from: impl Into<Location>, message: &str) {
        self.push(
            from.into(),
            EventKind::Broadcast {
                message: message.to_owned(),
            },
        );
    }

    /// Physically hands `q` from one location to another.
    pub fn transfer_particle(&mut self, q: &str, from: impl Into<Location>, to: impl Into<Location>) -> Result<()> {
        let (from, to) = (from.into(), to.into());
        let owner = self.owner(q)?.clone();
        if owner != from {
            self.rejected += 1;
            return Err(Error::Registry(format!(
                "{from} cannot send {q:?}, it is held by {owner}"
            )));
        }
        self.owners.insert(q.to_owned(), to.clone());
        self.push(
            from.clone(),
            EventKind::Transfer {
                subsystem: q.to_owned(),
                from,
                to,
            },
        );
        Ok(())
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        self.log
            .iter()
            .map(|e| serde_json::to_string(e).expect("events serialize") + "\n")
            .collect()
    }

    /// Rebuilds a session from its log, re-checking every locality
    /// constraint and re-applying recorded measurement outcomes.
    pub fn replay(events: &[Event]) -> Result<Self> {
        let (first, rest) = events
            .split_first()
            .ok_or_else(|| Error::Log("empty log".into()))?;
        let EventKind::Init { state, owners } = &first.kind else {
            return Err(Error::Log("log does not start with an init event".into()));
        };
        let state = PureState::from_amplitudes(state.labels(), state.dims(), state.amplitudes().to_vec())?;
        let mut s = Self::new(state, owners.clone())?;
        for e in rest {
            match &e.kind {
                EventKind::Init { .. } => return Err(Error::Log(format!("second init at {}", e.ordinal))),
                EventKind::Prepare { subsystem, dim } => {
                    s.prepare_ancilla(e.location.clone(), subsystem, *dim)?
                }
                EventKind::Apply {
                    op,
                    subsystems,
                    matrix,
                } => {
                    let subs: Vec<&str> = subsystems.iter().map(String::as_str).collect();
                    s.local_apply_operator(op, &subs, matrix)?
                }
                EventKind::Measure {
                    subsystem, outcome, ..
                } => {
                    s.collapse(subsystem, *outcome)?;
                }
                EventKind::Broadcast { message } => s.broadcast(e.location.clone(), message),
                EventKind::Transfer { subsystem, from, to } => {
                    s.transfer_particle(subsystem, from.clone(), to.clone())?
                }
            }
        }
        Ok(s)
    }

    pub fn replay_jsonl(text: &str) -> Result<Self> {
        let events = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::Log(format!("line {}: {e}", i + 1))))
            .collect::<Result<Vec<Event>>>()?;
        Self::replay(&events)
    }
}

/// Alice holds particle 1, Bob holds particles 2 and 3.
pub fn standard_ownership() -> [(&'static str, &'static str); 3] {
    [(PARTICLE_1, ALICE), (PARTICLE_2, BOB), (PARTICLE_3, BOB)]
}

/// Outcome of a protocol run inside a session.
#[derive(Clone, Debug)]
pub struct SessionRun {
    pub session: LoccSession,
    pub classification: Classification,
    /// `(subsystem, outcome)` in measurement order.
    pub outcomes: Vec<(String, usize)>,
}

impl SessionRun {
    /// State of particles 1, 2, 3 with the measured subsystems sliced out at
    /// their recorded outcomes, normalized.
    pub fn particles(&self) -> Result<PureState> {
        let mut s = self.session.state().clone();
        for (q, o) in &self.outcomes {
            s = s.slice(q, *o)?;
        }
        s.normalized()
    }
}

fn finish(mut session: LoccSession, classification: Classification, outcomes: Vec<(String, usize)>) -> Result<SessionRun> {
    if classification != Classification::Failure {
        session.transfer_particle(PARTICLE_3, BOB, CLIFF)?;
    }
    Ok(SessionRun {
        session,
        classification,
        outcomes,
    })
}

/// Protocol 1 with Alice holding particle 1 and Bob the rest.
pub fn run_protocol1_session(w: &WCoefficients, source: &mut dyn OutcomeSource) -> Result<SessionRun> {
    let mut s = LoccSession::new(protocols::make_wprime(w), standard_ownership())?;
    s.prepare_ancilla(BOB, ANCILLA, 2)?;
    s.local_apply("U1", &protocols::build_u1(w)?, PARTICLE_3, ANCILLA)?;
    s.local_apply("U2", &protocols::build_u2(w)?, PARTICLE_2, ANCILLA)?;
    let o = s.local_measure(ANCILLA, source)?;
    let class = if o == 0 { Classification::WSuccess } else { Classification::Failure };
    finish(s, class, vec![(ANCILLA.into(), o)])
}

/// Protocol 2 including garbage recycling.
pub fn run_protocol2_session(w: &WCoefficients, source: &mut dyn OutcomeSource) -> Result<SessionRun> {
    let mut s = LoccSession::new(protocols::make_wprime(w), standard_ownership())?;
    s.prepare_ancilla(BOB, ANCILLA, 2)?;
    s.local_apply("U1'", &protocols::build_u1_prime(w)?, PARTICLE_3, ANCILLA)?;
    if w.b() > 0.0 {
        s.local_apply("U2'", &protocols::build_u2_prime(w)?, PARTICLE_2, ANCILLA)?;
    }
    let o = s.local_measure(ANCILLA, source)?;
    let mut outcomes = vec![(ANCILLA.to_owned(), o)];
    if o == 0 {
        return finish(s, Classification::WSuccess, outcomes);
    }
    if (w.a() - w.b()).abs() < protocols::EQUAL_AB_TOL * w.a() {
        s.broadcast(BOB, "bell");
        return finish(s, Classification::BellSuccess, outcomes);
    }
    if w.b2_minus_c2() < protocols::EQUAL_AB_TOL {
        return finish(s, Classification::Failure, outcomes);
    }
    s.prepare_ancilla(BOB, RECYCLE_ANCILLA, 2)?;
    s.local_apply("U3'", &protocols::build_u3_prime(w)?, PARTICLE_3, RECYCLE_ANCILLA)?;
    let o2 = s.local_measure(RECYCLE_ANCILLA, source)?;
    outcomes.push((RECYCLE_ANCILLA.to_owned(), o2));
    let class = if o2 == 0 { Classification::BellSuccess } else { Classification::Failure };
    finish(s, class, outcomes)
}

/// Cavity scheme; the cavity and detector are Bob's.
pub fn run_cavity_session(
    w: &WCoefficients,
    params: &CavityParams,
    source: &mut dyn OutcomeSource,
) -> Result<SessionRun> {
    params.require_resonant()?;
    let times = cavity::optimal_times(w, params.epsilon)?;
    let mut s = LoccSession::new(protocols::make_wprime(w), standard_ownership())?;
    s.prepare_ancilla(BOB, CAVITY, params.fock_dim())?;
    s.local_jc_evolve(PARTICLE_3, CAVITY, params, times.dt1)?;
    s.local_jc_evolve(PARTICLE_2, CAVITY, params, times.dt2)?;
    let o = s.local_measure(CAVITY, source)?;
    let class = if o == 0 { Classification::WSuccess } else { Classification::Failure };
    finish(s, class, vec![(CAVITY.into(), o)])
}
