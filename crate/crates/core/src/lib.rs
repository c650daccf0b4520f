//! Teleportation channel-quality laboratory.
//!
//! Builds the five two-qubit resources (non-orthogonal entangled state, Werner
//! state, non-maximally entangled state, non-orthogonal mixture, GHZ/W mixture),
//! runs the standard teleportation protocol on them with explicit density-matrix
//! arithmetic, and compares the simulated figures of merit with their closed forms.

pub mod cmatrix;
pub mod entanglement;
pub mod error;
pub mod states;
pub mod sweep;
pub mod teleport;
pub mod verify;

pub use cmatrix::{Complex, ComplexMatrix, StateVector, Subsystem};
pub use entanglement::EntanglementReport;
pub use error::{Error, Result};
pub use states::{Channel, ChannelKind, ChannelParams, InputQubit};
pub use sweep::{FigureId, Metric, Param, SweepRow, SweepSpec, Table};
pub use teleport::{AveragingMethod, BellOutcome, FidelityEstimate, TeleportResult};
