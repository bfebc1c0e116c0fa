//! Type-directed partial evaluation for a lambda calculus with sums and
//! delimited control, in call-by-name and call-by-value.

pub mod corpus;
pub mod equational;
pub mod eval;
pub mod gen;
pub mod normalize;
pub mod semantics;
pub mod syntax;
pub mod typing;

pub use normalize::{extract_disjunct, tdpe, tdpe_cbn, tdpe_cbv, NormalizeError, Side, TdpeResult};
pub use semantics::StrategyKind;
