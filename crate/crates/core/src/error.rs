use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point ({0}, {1}) lies outside the domain")]
    OutOfDomain(f64, f64),
    #[error("point is not on the switching manifold (h = {0:e})")]
    NotOnSigma(f64),
    #[error("contact order exceeds the cap of {0}")]
    DegenerateContact(usize),
    #[error("h has a singular point on the switching manifold near ({0}, {1})")]
    SingularSwitching(f64, f64),
    #[error("value {0:e} is within the near-degenerate band")]
    NearDegenerate(f64),
    #[error("point is not in a sliding region")]
    NotSliding,
    #[error("sliding denominator {0:e} is too close to zero")]
    DenominatorNearZero(f64),
    #[error("trajectory left the domain at ({x}, {y}) after time {t}")]
    DomainExit { x: f64, y: f64, t: f64 },
    #[error("no section hit within the allowed flight time")]
    NoHit,
    #[error("section hit at ({0}, {1}) is tangential")]
    TangentialHit(f64, f64),
    #[error("forward orbit through ({0}, {1}) is not unique")]
    NonDeterministicExit(f64, f64),
    #[error("step size underflow at t = {0}")]
    StepSizeUnderflow(f64),
    #[error("least-squares problem is ill conditioned (estimate {0:e})")]
    IllConditioned(f64),
    #[error("window is too small for the requested fit")]
    WindowTooSmall,
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("x = {0} lies in the exclusion set of the involution")]
    InExclusionSet(f64),
    #[error("orbit does not return to the switching manifold")]
    NoReturn,
    #[error("involution around an odd contact is not defined")]
    OddContact,
    #[error("unsupported singularity: {0}")]
    UnsupportedSingularity(String),
    #[error("connecting orbit meets a sliding region at ({0}, {1})")]
    OrbitHitsSliding(f64, f64),
    #[error("x = {0} lies outside the model window")]
    OutsideWindow(f64),
    #[error("Newton iteration did not converge")]
    NoConvergence,
    #[error("Jacobian is singular")]
    SingularJacobian,
    #[error("iterate {0} escaped the annulus")]
    EscapedAnnulus(f64),
    #[error("lambda1 = {0} is negative")]
    NegativeLambda(f64),
    #[error("curve {0} is not defined for this sign of the parameter")]
    WrongSign(String),
    #[error("scenario hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::HypothesisViolated(_) => 2,
            Error::Io(_) => 4,
            _ => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            4 => "io",
            _ => "numeric",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.to_string())
        } else {
            Error::InvalidInput(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
