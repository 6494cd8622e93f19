use core::fmt;

/// Which coordinate of a bivariate sample an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => f.write_str("x"),
            Axis::Y => f.write_str("y"),
        }
    }
}

/// Errors raised by the estimation core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Fewer observations than the operation needs.
    DegenerateSample { n: usize, required: usize },
    /// A coordinate is NaN or infinite.
    NonFinite { row: usize, axis: Axis },
    /// Duplicated values under `TiePolicy::Error`. Rows are zero based.
    TiesPresent { axis: Axis, first_row: usize, second_row: usize },
    /// An argument left the unit square.
    OutOfDomain { x: f64, y: f64 },
    /// A rectangle volume below the rounding tolerance.
    NotTwoIncreasing { row: usize, col: usize, mass: f64 },
    /// A grid or mass matrix does not have uniform margins.
    NonUniformMargins { index: usize, deviation: f64 },
    /// Evaluator point set is empty.
    EmptyPointSet,
    /// Parameter outside of its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
    /// Buffer lengths do not match the declared dimensions.
    ShapeMismatch { expected: usize, found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateSample { n, required } => {
                write!(f, "degenerate sample: n = {n}, at least {required} observations required")
            }
            Error::NonFinite { row, axis } => {
                write!(f, "non-finite {axis} value in row {row}")
            }
            Error::TiesPresent { axis, first_row, second_row } => write!(
                f,
                "tied {axis} values in rows {first_row} and {second_row} (use the random tie policy to break ties)"
            ),
            Error::OutOfDomain { x, y } => {
                write!(f, "point ({x}, {y}) lies outside the unit square")
            }
            Error::NotTwoIncreasing { row, col, mass } => {
                write!(f, "negative cell mass {mass} at cell ({row}, {col})")
            }
            Error::NonUniformMargins { index, deviation } => {
                write!(f, "margin {index} deviates from uniform by {deviation}")
            }
            Error::EmptyPointSet => f.write_str("empty evaluation point set"),
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid value {value} for parameter `{name}`")
            }
            Error::ShapeMismatch { expected, found } => {
                write!(f, "expected {expected} values, found {found}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_unit_square(x: f64, y: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
        Ok(())
    } else {
        Err(Error::OutOfDomain { x, y })
    }
}
