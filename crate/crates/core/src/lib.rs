//! Local computation over valuation algebras: join-tree propagation,
//! set-chain construction and query answering.

pub mod algebra;
pub mod axioms;
pub mod error;
pub mod hypergraph;
pub mod instances;
pub mod markov_tree;
pub mod pipeline;
pub mod propagation;
pub mod query;
pub mod random;
pub mod setchain;
mod table;
pub mod variable;

pub use algebra::{Counting, OpCounts, ValuationAlgebra, DEFAULT_TOLERANCE};
pub use error::{Error, Result};
pub use hypergraph::{
    cover_hypertree, cover_with_details, graham_test, reduce, Covering, GrahamAction, GrahamOutcome, GrahamStep,
    GrahamTrace, Hypergraph,
};
pub use instances::{
    AnyAlgebra, AnyValuation, BooleanAlgebra, BooleanRelation, CommonalityAlgebra, CommonalityTable, InstanceKind,
    MassFunction, ProbabilityAlgebra, ProbabilityPotential,
};
pub use markov_tree::{build_markov_tree, MarkovTree};
pub use pipeline::{compile, Compiled};
pub use propagation::{marginal_at, message, propagate_all, MessageStore, Padding, Propagation, TreeAssignment};
pub use query::{
    evaluate_query, modified_graham, plan_query, union_marginal, union_marginal_unprojected, PlanNode, QueryExpr,
    QueryPlan,
};
pub use setchain::{
    build_setchain, build_setchain_with, order_nodes, reconstruct_joint, verify_marginals, ChainOptions, ChainState,
    ChainStats, MarginalReport, Numbering, SetChain, SetChainFactor,
};
pub use variable::{config_count, Configuration, Frames, VarId, VarSet, Variable};
