use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },

    /// The adaptive integrator ran out of subdivisions. Carries the best
    /// estimate available at that point.
    #[error(
        "quadrature did not converge within {subdivisions} subdivisions \
         (estimate {estimate:e}, error bound {error_bound:e})"
    )]
    NonConvergence {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },

    /// Failure while evaluating the paired-interferer functional F.
    #[error("evaluating F(s = {s:?}, alpha = {alpha:?}, R = {r_link:?}): {source}")]
    Functional {
        s: f64,
        alpha: f64,
        r_link: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True when the failure is an invalid input rather than a numerical
    /// breakdown.
    pub fn is_domain(&self) -> bool {
        match self {
            Error::Domain(_) => true,
            Error::Context { source, .. } => source.is_domain(),
            _ => false,
        }
    }
}
