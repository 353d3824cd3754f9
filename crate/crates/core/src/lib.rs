//! Simulation engine for multi-walker discrete-time quantum walks on circles
//! in phase space.
//!
//! The crate is organised as five layers:
//! - [`numerics`]: dense complex matrices, tensor products, Hermitian matrix
//!   exponentials, partial traces, and least-squares fitting.
//! - [`walk`]: ideal coined walks on a sparse integer lattice of phase-space
//!   angles, plus the classical random-walk baseline.
//! - [`stats`]: wrapped phase distributions, the Holevo spread measure, and
//!   spread-versus-step scaling fits.
//! - [`open`]: Lindblad dynamics of two cavity-qubit pairs realising the walk
//!   with cavity decay and qubit dephasing, average-fidelity diagnostics, and
//!   phase-space observables of the cavity fields.
//! - [`synth`]: dispersive cavity-QED parameter maps and numerical checks
//!   that pulse sequences synthesise the walk's coin and shift operations.
//! - [`presets`]: the canned experiment definitions (scaling table,
//!   dissipation ladders, sensitivity pairs) driven by the CLI.

pub mod numerics;
pub mod open;
pub mod presets;
pub mod stats;
pub mod synth;
pub mod walk;

/// Engine version, echoed into run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use num_complex::Complex64 as C64;
pub use numerics::{ComplexMatrix, NumericsError, RegressionResult};
pub use open::{CavityInit, DensityMatrix, NoisyDiagnostics, OpenError, OpenSystemConfig, RunReport};
pub use stats::{PhaseDistribution, Sigma, SigmaSeries, StatsError};
pub use synth::{DeviceParams, GateReport, SynthError};
pub use walk::{CoinKind, CoinSpec, InitialCoin, WalkConfig, WalkError, WalkLatticeState};
