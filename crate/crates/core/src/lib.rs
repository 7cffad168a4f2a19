//! Block-diagram DSP engine: filters and filter design, spectral analysis,
//! linear prediction, k-means classification and a QFT statevector simulator.

pub mod design;
pub mod error;
pub mod filter;
pub mod graph;
pub mod lpc;
pub mod ml;
pub mod quantum;
pub mod rng;
pub mod roots;
pub mod signal;
pub mod spectral;

pub use error::{DspError, Result};
pub use filter::{FrequencyResponse, PoleZeroSet, TransferFunction};
pub use graph::{Graph, GraphError, Value, ValueKind};
pub use num_complex::Complex64;
pub use signal::Signal;
pub use spectral::Spectrum;

/// Reported in run responses.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
