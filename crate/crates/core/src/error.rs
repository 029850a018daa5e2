use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{name}` = {value}: must be {requirement}")]
    Invalid { name: &'static str, value: f64, requirement: &'static str },
    #[error("degenerate rates: {0}")]
    Degenerate(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("sweep needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("singular linear system: {0}")]
    Singular(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("step size underflow at t = {t} (h = {h}); state {state:?}")]
    Stiffness { t: f64, h: f64, state: Vec<f64> },
    #[error("no steady state by t = {t}: residual {residual:e}, photon number {photon_number}")]
    NoConvergence { t: f64, residual: f64, photon_number: f64, state: Vec<f64> },
    #[error("invalid integrator setting `{0}`")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}
