//! Instance files, solver routing, generators and the solver cross-check
//! behind the `omanip` command.

pub mod crosscheck;
pub mod gen;
pub mod instance;
pub mod solve;

pub use instance::{InstanceFile, ParseError, ValidationError};
pub use solve::{CliError, Solver, SolverChoice};
