//! Simulation of single-copy entanglement distillation for W-class states
//! `a|001⟩ + b|010⟩ + c|100⟩`.
//!
//! * [`statevec`]: dense pure-state engine with exact measurement branches.
//! * [`protocols`]: the two ancilla-assisted protocols and garbage recycling.
//! * [`cavity`]: Jaynes–Cummings realization of the first protocol.
//! * [`locc`]: ownership registry enforcing local operations.
//! * [`montecarlo`]: repeated-trial sampling against the closed forms.

pub mod branching;
pub mod cavity;
pub mod error;
pub mod locc;
pub mod montecarlo;
pub mod protocols;
pub mod statevec;

pub use branching::{Classification, ProtocolOutcome};
pub use cavity::{CavityParams, Frame, InteractionTimes};
pub use error::{Error, Result};
pub use locc::{Location, LoccSession};
pub use montecarlo::{ProtocolKind, TrialReport};
pub use protocols::{AnalyticProbabilities, WCoefficients};
pub use statevec::{DensityMatrix, JointUnitary, MeasurementResolution, PureState};
