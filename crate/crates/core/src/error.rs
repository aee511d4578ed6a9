use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown nullflavor '{0}'")]
    UnknownNullFlavor(String),

    #[error("cannot parse {what} literal '{literal}': {reason}")]
    Parse {
        what: &'static str,
        literal: String,
        reason: String,
    },

    #[error("division by zero")]
    DivideByZero,

    #[error("unknown unit atom '{0}'")]
    UnknownAtom(String),

    #[error("unknown metric prefix '{prefix}' on atom '{atom}'")]
    UnknownPrefix { prefix: String, atom: String },

    #[error("unsupported unit '{0}'")]
    UnsupportedUnit(String),

    #[error("unit syntax error in '{unit}': {reason}")]
    UnitSyntax { unit: String, reason: String },

    #[error("unit registry line {line}: {reason}")]
    RegistryFormat { line: usize, reason: String },

    #[error("unit registry cycle through atom '{0}'")]
    RegistryCycle(String),

    #[error("'{left}' does not compare to '{right}'")]
    NotComparable { left: String, right: String },

    #[error("operand is null ({0})")]
    NullOperand(String),

    #[error("invalid date '{0}'")]
    InvalidDate(String),

    #[error("interval bounds reversed in '{0}'")]
    BoundsReversed(String),

    #[error("value for domain {flavor} violates check constraint \"{constraint}\"")]
    ConstraintViolation { flavor: String, constraint: String },

    #[error("invalid code '{code}' for codeSystem {system}")]
    InvalidCode { code: String, system: String },

    #[error("unknown concept domain '{0}'")]
    UnknownDomain(String),

    #[error("unknown code '{code}' in code system {system}")]
    UnknownCode { code: String, system: String },

    #[error("unknown code system '{0}'")]
    UnknownCodeSystem(String),

    #[error("concepts are from different code systems ({0} and {1})")]
    DifferentCodeSystem(String, String),

    #[error("terminology file line {line}: {reason}")]
    TerminologyFormat { line: usize, reason: String },

    #[error("terminology references undefined {kind} '{name}'")]
    DanglingReference { kind: &'static str, name: String },

    #[error("parent cycle in code system {system} through code '{code}'")]
    TerminologyCycle { system: String, code: String },

    #[error("invalid instance identifier root '{0}'")]
    InvalidRoot(String),

    #[error("nullflavor '{0}' not allowed on a nonnull type")]
    NullNotAllowed(String),

    #[error("nullflavor '{flavor}' is not allowed on {type_name}")]
    FlavorNotAllowed { flavor: String, type_name: &'static str },

    #[error("cannot cast {from} to {to}")]
    Cast { from: &'static str, to: &'static str },

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn parse(what: &'static str, literal: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            literal: literal.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn syntax(unit: &str, reason: impl Into<String>) -> Self {
        Error::UnitSyntax {
            unit: unit.to_string(),
            reason: reason.into(),
        }
    }
}
