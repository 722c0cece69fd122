//! Exact finite-dimensional simulation of Von Neumann measurement chains.
//!
//! A system with outcomes `o_1..o_n` is coupled to an apparatus whose labels
//! are `ready` and one record per outcome, then optionally to an environment.
//! Measurement unitaries are only constrained on the ready subspace; this
//! crate builds their completions, perturbs the initial apparatus and
//! environment preparations, and measures how much weight lands on liar
//! states, where the record disagrees with the system.
//!
//! - [`tensor`]: dense states and operators over ordered tensor products.
//! - [`measurement`]: calibrated measurement unitaries and premeasurement.
//! - [`liar`]: liar weights, record distributions, stability sweeps.
//! - [`decoherence`]: environment coupling, reduced states, coherence.
//! - [`repeat`]: two-register repeat measurements.
//! - [`harness`]: JSON scenarios in, CSV/JSON tables out.

pub mod completion;
pub mod decoherence;
pub mod error;
pub mod harness;
pub mod liar;
pub mod measurement;
pub mod repeat;
pub mod tensor;

pub use completion::{CompletionSpec, PermutationTable};
pub use error::{Error, Result};
pub use measurement::{ApparatusPreparation, MeasurementUnitary, ModelDims, SystemPreparation};
pub use num_complex::Complex64;
