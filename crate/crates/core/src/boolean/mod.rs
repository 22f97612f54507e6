//! Boolean functions: expressions, truth tables, DNF covers and their
//! compilation into exactly-evaluating MPS.

mod compile;
mod dnf;
mod expr;
mod minimize;
mod table;

pub use compile::{
    boolean_feature_maps, compile, compile_gate, compiled_parameter_count, complexity_report, verify, CompiledGate,
    ComplexityReport, GateKind, VerifyReport, EXHAUSTIVE_VERIFY_MAX_ARITY,
};
pub use dnf::{to_dnf, Dnf, Literal, Term};
pub use expr::{parse_expr, BoolExpr};
pub use minimize::{minimize, EXACT_COVER_MAX_ARITY};
pub use table::{TruthTable, MAX_ARITY};
