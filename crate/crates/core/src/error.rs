use thiserror::Error;

use crate::protocol::InputMultiset;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("population of size {0} is too small: at least two agents are required")]
    InvalidPopulation(u64),

    #[error("exploration budget exceeded after {explored} configurations{}", input_suffix(.input))]
    BudgetExceeded {
        explored: usize,
        input: Option<InputMultiset>,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid interaction graph: {0}")]
    InvalidGraph(String),

    #[error("unknown catalog entry `{0}`")]
    NotFound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn input_suffix(input: &Option<InputMultiset>) -> String {
    match input {
        Some(x) => format!(" (input {:?})", x.counts()),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}
