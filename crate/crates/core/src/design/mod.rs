//! FIR (Kaiser window, frequency sampling, Parks–McClellan) and IIR
//! (Butterworth, Chebyshev I/II, elliptic) filter design.

pub mod elliptic;
mod fir;
mod iir;
mod remez;

pub use fir::{
    bessel_i0, design_fir_freq_sampling, design_fir_kaiser, kaiser_params, kaiser_taps, FirKind,
    FirSpec, KaiserParams,
};
pub use iir::{
    butterworth_prototype, chebyshev1_prototype, chebyshev2_prototype, design_iir,
    design_iir_detailed, elliptic_prototype, IirDesign, IirFamily, IirSpec, Zpk,
};
pub use remez::{
    design_fir_equiripple, EquirippleResult, EquirippleSpec, CONVERGENCE_TOL, GRID_DENSITY,
    MAX_ITERATIONS,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::filter::TransferFunction;

/// FIR design request, tagged by `method`; the remaining fields mirror the
/// corresponding spec type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum FirDesignRequest {
    Kaiser(FirSpec),
    #[serde(alias = "freq_sampling")]
    Sampling { desired_mag: Vec<f64> },
    Equiripple(EquirippleSpec),
}

impl FirDesignRequest {
    pub fn design(&self) -> Result<TransferFunction> {
        match self {
            FirDesignRequest::Kaiser(spec) => design_fir_kaiser(spec),
            FirDesignRequest::Sampling { desired_mag } => design_fir_freq_sampling(desired_mag),
            FirDesignRequest::Equiripple(spec) => design_fir_equiripple(spec).map(|r| r.tf),
        }
    }
}
