use thiserror::Error;

/// Errors raised while validating inputs or evaluating bounds.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} is not a probability")]
    InvalidProbability { name: String, value: f64 },

    #[error("{name} sums to {sum}, expected 1")]
    NotNormalized { name: String, sum: f64 },

    #[error("positivity violated: {0}")]
    Positivity(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("stratum {stratum} has no rows with e = {missing}")]
    EmptyArm { stratum: String, missing: u8 },

    #[error("invalid count table: {0}")]
    InvalidCount(String),

    #[error("zero denominator in {0}")]
    ZeroDenominator(String),

    #[error("infeasible sensitivity parameters{}: requires {requirement} (M* = {max_star}, m* = {min_star})", stratum_suffix(.stratum))]
    InfeasibleParams {
        requirement: String,
        max_star: f64,
        min_star: f64,
        stratum: Option<String>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mean {mean} lies outside its support [{low}, {high}]")]
    SupportViolation { mean: f64, low: f64, high: f64 },

    #[error("bisection bracket does not contain the target for {0}")]
    BracketFailure(String),

    #[error("replicate {index}: {source}")]
    Replicate { index: u64, source: Box<Error> },

    #[error("csv: {0}")]
    Csv(String),
}

fn stratum_suffix(stratum: &Option<String>) -> String {
    match stratum {
        Some(s) => format!(" in stratum {s}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach a stratum label to a feasibility error.
    pub(crate) fn in_stratum(self, label: &str) -> Self {
        match self {
            Error::InfeasibleParams {
                requirement,
                max_star,
                min_star,
                ..
            } => Error::InfeasibleParams {
                requirement,
                max_star,
                min_star,
                stratum: Some(label.to_string()),
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
