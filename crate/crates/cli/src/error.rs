use serde_json::{json, Value};
use weylkit::dynamics::{DynamicsError, RealizationError};
use weylkit::polynomial::ParseError;
use weylkit::recurrence::RecurrenceError;
use weylkit::weyl::{FamilyParseError, WeylError};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NOT_STABILIZED: u8 = 3;
pub const EXIT_MISSING_REALIZATION: u8 = 4;
pub const EXIT_VALIDATION: u8 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
    pub detail: Option<Value>,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, message: message.into(), detail: None }
    }
}

impl From<WeylError> for CliError {
    fn from(e: WeylError) -> Self {
        match &e {
            WeylError::NotStabilized { k_max, trace } => Self {
                code: EXIT_NOT_STABILIZED,
                message: e.to_string(),
                detail: Some(json!({ "k_max": k_max, "trace": trace })),
            },
            _ => Self::config(e.to_string()),
        }
    }
}

impl From<RealizationError> for CliError {
    fn from(e: RealizationError) -> Self {
        let code = match e {
            RealizationError::Missing(_) => EXIT_MISSING_REALIZATION,
            RealizationError::Syntax(_) => EXIT_CONFIG,
        };
        Self { code, message: e.to_string(), detail: None }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        Self::config(e.to_string())
    }
}

impl From<FamilyParseError> for CliError {
    fn from(e: FamilyParseError) -> Self {
        match e {
            FamilyParseError::Parse(p) => p.into(),
            FamilyParseError::Family(w) => w.into(),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Realization(r) => r.into(),
            DynamicsError::Weyl(w) => w.into(),
            other => Self::config(other.to_string()),
        }
    }
}

impl From<RecurrenceError> for CliError {
    fn from(e: RecurrenceError) -> Self {
        match e {
            RecurrenceError::Realization(r) => r.into(),
            RecurrenceError::Weyl(w) => w.into(),
            other => Self::config(other.to_string()),
        }
    }
}
