//! Command-line and HTTP front ends for the jdsp engine. Both call into
//! [`api`], so a graph run from either produces the same numbers.

pub mod api;
pub mod cli;
pub mod fsio;
pub mod http;
