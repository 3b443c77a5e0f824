use core::fmt;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A square matrix of even dimension was expected.
    OddDimension,
    /// Operand dimensions do not match.
    DimensionMismatch,
    /// A pivot of the `U V U^T` factorization is non-positive or non-finite.
    NotPositiveDefinite,
    /// The symplectic block identities fail beyond tolerance.
    NotSymplectic,
    /// The matrix is not unitary within tolerance.
    NotUnitary,
    /// Integer entries were expected.
    NotIntegral,
    /// The coordinate chart is singular here (e.g. `det D` too small);
    /// the caller should perturb or use another chart.
    ChartSingular,
    /// A numerical step left its domain of validity.
    NumericalBreakdown(&'static str),
    /// Eigenvalue clusters could not be separated within tolerance.
    DegenerateSpectrum,
    /// An iteration cap was reached before the stopping condition held.
    IterationLimit(&'static str),
    /// A lattice enumeration would exceed the configured guard.
    TooLarge(u64),
    /// An integer entry exceeded the exact-arithmetic guard (2^40).
    EntryOverflow,
    /// The input point is not in the fundamental domain.
    NotInDomain,
    /// Too few Monte Carlo samples survive the requested threshold.
    InsufficientSamples,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OddDimension => write!(f, "matrix dimension must be even"),
            Error::DimensionMismatch => write!(f, "operand dimensions do not match"),
            Error::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
            Error::NotSymplectic => write!(f, "matrix is not symplectic within tolerance"),
            Error::NotUnitary => write!(f, "matrix is not unitary within tolerance"),
            Error::NotIntegral => write!(f, "matrix is not integral"),
            Error::ChartSingular => write!(f, "coordinate chart is singular at this point"),
            Error::NumericalBreakdown(what) => write!(f, "numerical breakdown: {what}"),
            Error::DegenerateSpectrum => write!(f, "degenerate spectrum beyond cluster tolerance"),
            Error::IterationLimit(what) => write!(f, "iteration limit reached: {what}"),
            Error::TooLarge(count) => write!(f, "lattice enumeration too large ({count} points)"),
            Error::EntryOverflow => write!(f, "integer entry exceeds the 2^40 guard"),
            Error::NotInDomain => write!(f, "point is not in the fundamental domain"),
            Error::InsufficientSamples => write!(f, "not enough samples exceed the threshold"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
