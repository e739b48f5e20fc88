//! Meta-operations on terms: suspension, opposites, inverses with their
//! cancellation witnesses, and lifting along a set of variables.

mod hexcomp;
mod inverse;
mod lift;
mod opposite;
mod suspend;

use thiserror::Error;

use crate::kernel::Diagnostic;
use crate::pasting::PastingError;
use crate::syntax::SyntaxError;

pub use hexcomp::hexcomp;
pub use inverse::{bar_subst, cancel_counit, cancel_unit, cancellator, invert, is_invertible, Side};
pub use lift::{depth, lift_ctx, lift_sub, lift_tm, lift_ty, lifted_set, Lifted, VarSet};
pub use opposite::{opposite_ctx, opposite_head, opposite_sub, opposite_tm, opposite_ty, OppositeSet};
pub use suspend::{suspend_ctx, suspend_head, suspend_sub, suspend_tm, suspend_tm_n, suspend_ty, Suspension};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetaError {
    #[error("`{0}` is not invertible")]
    NotInvertible(String),
    #[error("lifting depth {found} exceeds the supported depth 1")]
    DepthTooLarge { found: i32 },
    #[error("variable set is not closed upwards: `{0}` depends on it")]
    NotUpClosed(String),
    #[error("nothing to lift: the term does not involve the lifted variables")]
    NothingToLift,
    #[error("node budget exhausted")]
    BudgetExceeded,
    #[error("could not build a witness: {0}")]
    SynthesisFailed(String),
    #[error(transparent)]
    Pasting(#[from] PastingError),
    #[error(transparent)]
    Kernel(#[from] Diagnostic),
}

impl From<SyntaxError> for MetaError {
    fn from(e: SyntaxError) -> Self {
        MetaError::Pasting(e.into())
    }
}
