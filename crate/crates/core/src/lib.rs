//! Exhaustive censuses of finite groupoids under equational identities.
//!
//! The crate parses identities over a single binary operation from a
//! small formula language, represents order-n groupoids as dense Cayley
//! tables, and counts the tables satisfying given identities — in total
//! and up to isomorphism — with two independent engines: a plain sweep
//! over every table and a pruned backtracking search. A built-in catalog
//! carries the Bol-Moufang-type identities the crate ships reference
//! counts for.
//!
//! Counting is data-parallel over deterministic table-prefix shards when
//! the `parallel` feature (on by default) is enabled; every count is
//! identical whatever the worker count.

pub mod catalog;
pub mod census;
pub mod eval;
pub mod groupoid;
pub mod term;

pub use catalog::{catalog, CatalogEntry, Source};
pub use census::{
    backtracking_count, count_all, count_conjunction, count_iso_classes, duality_check,
    partitioned_count, run, run_with_jobs, CensusError, CensusQuery, CensusResult, Engine,
    IdentityCount, Partition,
};
pub use eval::{evaluate, evaluate_partial, holds, EvalError};
pub use groupoid::{Groupoid, GroupoidError, PartialGroupoid, Permutation};
pub use term::{format_identity, parse_identity, parse_term, Identity, ParseError, Term};
