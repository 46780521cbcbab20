//! Evolved quantum feature maps for kernel support vector machines.
//!
//! A circuit genome is decoded into a layered feature-map circuit, the
//! circuit defines a fidelity-style kernel between classical points, and a
//! precomputed-kernel SVM scores it. NSGA-II trades accuracy against circuit
//! size; [`interpret`] splits good circuits into independent qubit clusters.

pub mod cli;
pub mod data;
pub mod error;
pub mod evolve;
pub mod genome;
pub mod interpret;
pub mod qsim;
pub mod qsvm;
pub mod seed;

pub use error::{Error, Result};
pub use genome::{decode_genome, CircuitSpec, Gate, GateSpec, Genome};
pub use qsim::{KernelMode, QuantumKernel};
pub use qsvm::{SvmParams, TrainedMulticlassModel};
