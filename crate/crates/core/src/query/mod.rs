//! Query answering from a set chain without touching the rest of the tree.

mod expr;
mod plan;

pub use expr::QueryExpr;
pub use plan::{
    evaluate_query, modified_graham, plan_query, sum_satisfying, union_marginal, union_marginal_unprojected, PlanNode,
    QueryPlan,
};
