use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a solver declined to run on an otherwise valid instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RefusalReason {
    /// Exhaustive methods (brute force, branch-and-bound) above their size cap.
    TooManySchools,
    /// The cost-indexed DP needs integral costs and budget.
    NonIntegerCosts,
    /// A lookup table would exceed the configured memory budget.
    MemoryBudget,
    /// The fixed-point value grid does not fit.
    GridOverflow,
    /// Homogeneous solvers need unit application costs.
    NotHomogeneous,
    /// Schools locked into a what-if query already exceed the budget.
    InfeasibleLocks,
    /// The request ran past its time budget.
    TimeBudget,
}

impl RefusalReason {
    pub fn code(self) -> &'static str {
        match self {
            RefusalReason::TooManySchools => "too_many_schools",
            RefusalReason::NonIntegerCosts => "non_integer_costs",
            RefusalReason::MemoryBudget => "memory_budget",
            RefusalReason::GridOverflow => "grid_overflow",
            RefusalReason::NotHomogeneous => "not_homogeneous",
            RefusalReason::InfeasibleLocks => "infeasible_locks",
            RefusalReason::TimeBudget => "budget_exceeded",
        }
    }
}

impl fmt::Display for RefusalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or out-of-domain input. `path` names the offending field
    /// (`schools[2].f`) when there is one.
    #[error("{}", display_invalid(path.as_deref(), message))]
    Invalid {
        path: Option<String>,
        message: String,
    },
    /// Valid input that a particular solver will not handle.
    #[error("{message}")]
    Refused {
        reason: RefusalReason,
        message: String,
    },
}

fn display_invalid(path: Option<&str>, message: &str) -> String {
    match path {
        Some(p) if !p.is_empty() => format!("{p}: {message}"),
        _ => message.to_string(),
    }
}

impl Error {
    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid {
            path: None,
            message: message.into(),
        }
    }

    pub fn invalid_at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            path: Some(path.into()),
            message: message.into(),
        }
    }

    pub fn refused(reason: RefusalReason, message: impl Into<String>) -> Self {
        Error::Refused {
            reason,
            message: message.into(),
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            Error::Invalid { path, .. } => path.as_deref(),
            Error::Refused { .. } => None,
        }
    }

    pub fn refusal(&self) -> Option<RefusalReason> {
        match self {
            Error::Refused { reason, .. } => Some(*reason),
            Error::Invalid { .. } => None,
        }
    }
}
