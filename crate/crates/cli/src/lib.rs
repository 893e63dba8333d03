//! Library half of the `cvcomp` binary. Every subcommand writes its report
//! to a caller-supplied writer so tests can run it in-process.

// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod error;
pub mod estimate;
pub mod sweep;
pub mod verify;

use std::io::Write;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};

pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Sweep(a) => sweep::cmd_sweep(a, out),
        Command::Verify(a) => verify::cmd_verify(a, out),
        Command::Estimate(a) => estimate::cmd_estimate(a, out),
        Command::ReduceDemo(a) => estimate::cmd_reduce_demo(a, out),
    }
}
