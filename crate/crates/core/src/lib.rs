//! Simulation of Majorana zero-mode braiding in networks of Kitaev wires.
//!
//! States are Gaussian and stored as Majorana covariance matrices; a dense
//! Fock-space representation is kept as an exact oracle for small systems.

pub mod braid;
pub mod builder;
pub mod covariance;
pub mod dj;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod geometry;
pub mod mode;
pub mod pfaffian;
pub mod quadratic;
pub mod schedule;
pub mod spectral;

pub use builder::{
    build_local_op, build_network, build_wire, check_step_continuity, step_hamiltonian, Direction,
    ErrorModel, LocalOp, ProtocolStep, WireParams,
};
pub use covariance::CovarianceState;
pub use error::{Error, Result};
pub use evolution::{
    apply_exact_braid, evolve, ground_state, EvolveOptions, Observable, Parity, ParityChoice,
    Trajectory,
};
pub use geometry::{Flavor, MajoranaLabel, NetworkGeometry, SiteIndex};
pub use mode::MajoranaMode;
pub use quadratic::QuadraticHamiltonian;
pub use schedule::{compile_word, BraidGenerator, BraidWord, Ramp, RampShape, Schedule};
pub use spectral::{spectrum, zero_modes, Edge, LocalizedMode, SpectrumReport};
