use thiserror::Error;

use crate::{hankel, nulling, series, simulate, specfun, words};

/// Any error raised by the library, tagged with the module it came from.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ncwords: {0}")]
    Words(#[from] words::WordError),
    #[error("ncseries: {0}")]
    Series(#[from] series::SeriesError),
    #[error("hankel: {0}")]
    Hankel(#[from] hankel::HankelError),
    #[error("specfun: {0}")]
    SpecFun(#[from] specfun::SpecFunError),
    #[error("simulate: {0}")]
    Simulate(#[from] simulate::SimulateError),
    #[error("nulling: {0}")]
    Nulling(#[from] nulling::NullingError),
}
