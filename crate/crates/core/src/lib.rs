pub mod corpus;
pub mod equivalences;
pub mod error;
pub mod hml;
mod lex;
pub mod lts;
pub mod mcrl2;
pub mod sos;
pub mod syntax;
pub mod translator;

pub use error::{Error, ParseError, Pos, ResourceError, Result, Violation};
pub use syntax::{
    parse_expr, parse_spec, parse_spec_with, parse_valuation, ActionId, CommFunction, DomainDef,
    Expr, InitSpec, ParseOptions, ProcId, ProcessExpr, RecursiveSpec, TransitionLabel,
    Valuation, ValueId, VarId,
};
pub use lts::{explore, find_isomorphism, parse_aut, Lts};
pub use sos::{
    generate_lts, generate_lts_from, reachable_exprs, step, ExplorationConfig, GvLts, GvState,
};
pub use hml::{
    build_state_space, eval, parse_formula, satisfies, Formula, Fragment, HmlFormula, Model, StateSpace,
};
pub use equivalences::{
    distinguish_strong, distinguishing_formula_state_based, distinguishing_formula_stateless,
    refine, state_based_bisim, stateless_bisim, strong_bisim, Refinement,
};
pub use mcrl2::{
    apply_comm, apply_hide, generate_lts_mcrl2, sem_multiaction, step_mcrl2, ActionLabel,
    CommRule, DataExpr, DataValue, Mcrl2Lts, Mcrl2Process, Mcrl2Spec, MultiAction, MultiSet,
    SemMultiAction,
};
pub use translator::{
    check_bisim_preservation, check_formula_preservation, emit_mcrl2_files, translate, translate_formula,
    translate_multi, validate_parseq, verify_variable_consistency, ConsistencyViolation, Pipeline,
    Translation, VariableMode,
};
