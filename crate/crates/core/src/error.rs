use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("point ({x}, {y}) lies outside the stored field")]
    OutsideField { x: i64, y: i64 },
    #[error("increment {index} ({dx}, {dy}) is not an admissible step")]
    InvalidStep { index: usize, dx: i64, dy: i64 },
    #[error("interpolants do not meet: {0}")]
    NoMeeting(String),
    #[error("sub-crossing {0} is missing")]
    MissingSubCrossing(usize),
    #[error("sub-crossings {0} and {1} do not intersect")]
    Disjoint(usize, usize),
    #[error("lifted path is not a crossing: {0}")]
    NotACrossing(String),
    #[error("configuration pair is not good")]
    NotGood,
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("window exceeds trajectory: {0}")]
    Window(String),
    #[error("indicator is not monotone: {0}")]
    NotMonotone(String),
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}
