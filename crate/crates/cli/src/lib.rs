//! Front end for `cr-constancy`: spec files, the expression grammar,
//! reports, the numeric point oracle and the fuzzing harness.

pub mod app;
pub mod commands;
pub mod expr;
pub mod fuzz;
pub mod oracle;
pub mod report;
pub mod spec;
