use thiserror::Error;

/// Errors raised by the numerical and protocol-parameter layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("operator is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("operator is not a projector (residual {0:.3e})")]
    NotProjector(f64),

    #[error("state is not pure (purity {0})")]
    NotPure(f64),

    #[error("rank {k} out of range for dimension {d}")]
    RankOutOfRange { k: usize, d: usize },

    #[error("cannot normalize an operator with trace {0:.3e}")]
    ZeroTrace(f64),

    #[error("{0} qubits exceeds the dense-simulation limit")]
    TooManyQubits(usize),

    #[error("dimension {0} is not a power of two")]
    NotQubitDimension(usize),

    #[error("index {index} outside [0, {bound})")]
    IndexOutOfRange { index: u64, bound: u64 },

    #[error("parameter {name} = {value} out of range ({expected})")]
    Parameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_param(name: &'static str, value: f64, ok: bool, expected: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter { name, value, expected })
    }
}
