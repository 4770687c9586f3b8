use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A gamma factor was requested at a non-positive integer.
    Pole { x: f64 },
    /// The result does not fit in an `f64`.
    Overflow { x: f64 },
    /// An argument or parameter is outside the accepted domain.
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    /// Solver called with a problem whose forcing does not match the theorem.
    WrongForcing { expected: &'static str },
    /// Corollary identifiers run from 1 to 18.
    UnknownCase(u32),
    /// Sample grids and refinement sequences.
    InvalidGrid(&'static str),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, requirement: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            requirement,
        }
    }

    /// Name of the offending parameter, when the error is about one.
    pub fn parameter(&self) -> Option<&'static str> {
        match self {
            Error::Domain { name, .. } => Some(name),
            _ => None,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Pole { x } => write!(f, "gamma function pole at {x}"),
            Error::Overflow { x } => write!(f, "result overflows f64 at argument {x}"),
            Error::Domain {
                name,
                value,
                requirement,
            } => write!(f, "{name} = {value} is invalid: requires {requirement}"),
            Error::WrongForcing { expected } => {
                write!(
                    f,
                    "problem forcing does not match the solver (expected {expected})"
                )
            }
            Error::UnknownCase(id) => write!(f, "unknown corollary case {id} (valid: 1..=18)"),
            Error::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
        }
    }
}

impl core::error::Error for Error {}
