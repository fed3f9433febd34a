use thiserror::Error;

/// Errors surfaced by the simulation and verification layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state blow-up: {0}")]
    StateBlowUp(String),

    #[error("cutoff exceeds Nyquist: 2^{{l+1}} = {cutoff} > {nyquist} for l = {level}")]
    CutoffExceedsNyquist {
        level: i32,
        cutoff: f64,
        nyquist: f64,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("cutoff does not fit box: 2R(1+delta) = {extent} >= L/2 = {half_box}")]
    CutoffDoesNotFit { extent: f64, half_box: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("no contraction at this T: horizon {horizon}, measured ratio {ratio}")]
    NoContraction { horizon: f64, ratio: f64 },

    #[error("not yet absorbed at t = {t_burn}: norms still decaying (relative slope {slope})")]
    NotYetAbsorbed { t_burn: f64, slope: f64 },

    #[error("blow-up in one branch: {0}")]
    BranchBlowUp(String),

    #[error("empty sample")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, Error>;
