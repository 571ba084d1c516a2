//! Core of the hbs hardware build orchestrator.
//!
//! Build descriptions live in `.hbs` files written in a small Tcl-subset
//! DSL. This crate discovers and sources them ([`registry`]), evaluates
//! them ([`tclish`]), runs targets through an argument-memoized dependency
//! engine with graph capture ([`flow`]), drives EDA tool flows through
//! staged backends ([`backends`]) and runs testbenches in parallel
//! ([`testrunner`]).

pub mod backends;
pub mod error;
pub mod flow;
pub mod glob;
pub mod graph;
pub mod registry;
pub mod tclish;
pub mod testrunner;

pub use error::{Error, ErrorKind, EvalResult, Exception};
pub use flow::{RunContext, RunOptions};
pub use graph::DepGraph;
pub use registry::{DiscoveryList, Registry};
pub use tclish::{Interp, OutputSink};

/// Interpreter with both the core builtins and the full `hbs::*` command
/// surface installed, ready to source `.hbs` files.
pub fn new_interp() -> Interp {
    let mut interp = Interp::new();
    flow::install(&mut interp);
    interp
}
