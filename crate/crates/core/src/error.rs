use thiserror::Error;

/// Errors raised by the analytic and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("{name} = {value} is outside the domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A parameter bundle violates one of its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Adaptive quadrature ran out of subdivisions before meeting tolerance.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate}, error bound {error_bound})"
    )]
    NonConvergence {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_domain(
    name: &'static str,
    value: f64,
    expected: &'static str,
    ok: bool,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected,
        })
    }
}

pub(crate) fn nonneg(name: &'static str, value: f64) -> Result<()> {
    check_domain(
        name,
        value,
        "finite and >= 0",
        value.is_finite() && value >= 0.0,
    )
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<()> {
    check_domain(
        name,
        value,
        "finite and > 0",
        value.is_finite() && value > 0.0,
    )
}
