use std::io::Write;

use cvcomp::homodyne::{COVERAGE_SIGMAS, RNG_ALGORITHM};
use cvcomp::{
    estimate_complementarity, estimate_vm, iconcurrence_from_vm, local_antisqueeze, sample,
    vm_beamsplitter_state, vm_tmss, VarianceMatrix64,
};

use crate::args::{EstimateArgs, ReduceDemoArgs, TargetState};
use crate::error::{CliError, CliResult};

/// Tolerance on the reduced matrix, relaxed with its scale `cosh r`.
pub fn reduction_tolerance(r: f64) -> f64 {
    1e-10 * r.cosh()
}

pub fn write_matrix(out: &mut dyn Write, label: &str, m: &[[f64; 4]; 4]) -> std::io::Result<()> {
    writeln!(out, "{label}:")?;
    for row in m {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>20.12e}")).collect();
        writeln!(out, "  {}", cells.join(" "))?;
    }
    Ok(())
}

fn check_r(r: f64) -> CliResult<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--r must be finite and >= 0, got {r}"
        )))
    }
}

/// The matrix handed to the sampler, plus the reduction deviation when
/// `--reduce` was given.
pub fn target_vm(args: &EstimateArgs) -> CliResult<(VarianceMatrix64, Option<f64>)> {
    check_r(args.r)?;
    match (args.state, args.reduce) {
        (TargetState::Tmss, false) => Ok((vm_tmss(args.r), None)),
        (TargetState::Tmss, true) => Err(CliError::Usage(
            "--reduce applies to --state beamsplitter only".into(),
        )),
        (TargetState::Beamsplitter, false) => Ok((vm_beamsplitter_state(args.r), None)),
        (TargetState::Beamsplitter, true) => {
            let reduced =
                vm_beamsplitter_state(args.r).apply_symplectic(&local_antisqueeze(args.r));
            let deviation = reduced.max_abs_diff(&vm_tmss(args.r / 2.0));
            Ok((reduced, Some(deviation)))
        }
    }
}

pub fn cmd_estimate(args: &EstimateArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.shots == 0 {
        return Err(CliError::Usage("--shots must be >= 1".into()));
    }
    let (truth, deviation) = target_vm(args)?;
    let name = match args.state {
        TargetState::Tmss => "tmss",
        TargetState::Beamsplitter => "beamsplitter",
    };
    writeln!(out, "state: {name} r = {}", args.r)?;
    if let Some(dev) = deviation {
        let tol = reduction_tolerance(args.r);
        writeln!(
            out,
            "reduced by local anti-squeeze; max |V - V_tmss(r/2)| = {dev:.3e} ({} tol {tol:.1e})",
            if dev <= tol { "within" } else { "OUTSIDE" }
        )?;
    }
    if args.state == TargetState::Beamsplitter && !args.reduce {
        writeln!(
            out,
            "note: local blocks are not isotropic; C_I^2 below uses V11 as-is"
        )?;
    }
    write_matrix(out, "true VM", truth.as_array())?;

    let batch = sample(&truth, args.shots, args.seed)?;
    let est = estimate_vm(&batch)?;
    writeln!(
        out,
        "shots: {}  seed: {}  rng: {RNG_ALGORITHM}",
        args.shots, args.seed
    )?;
    write_matrix(out, "estimated VM", est.v_hat.as_array())?;
    write_matrix(out, "standard errors", &est.standard_errors)?;

    let c = estimate_complementarity(&est);
    let true_c = iconcurrence_from_vm(truth.get(0, 0))?;
    let (lo, hi) = c.interval();
    writeln!(
        out,
        "C_I^2 = {:.6} +/- {:.6} (1 sigma); {COVERAGE_SIGMAS} sigma interval [{lo:.6}, {hi:.6}]{}",
        c.c_i_sq,
        c.std_error,
        if c.clamped {
            "; clamped at V11 = 1"
        } else {
            ""
        }
    )?;
    writeln!(out, "true C_I^2 = {true_c:.6}")?;
    writeln!(
        out,
        "truth within {COVERAGE_SIGMAS} sigma: {}",
        if c.covers(true_c) { "yes" } else { "no" }
    )?;
    Ok(())
}

pub fn cmd_reduce_demo(args: &ReduceDemoArgs, out: &mut dyn Write) -> CliResult<()> {
    check_r(args.r)?;
    let r = args.r;
    let v = vm_beamsplitter_state(r);
    let s = local_antisqueeze(r);
    let reduced = v.apply_symplectic(&s);
    let deviation = reduced.max_abs_diff(&vm_tmss(r / 2.0));
    writeln!(out, "r = {r}")?;
    write_matrix(out, "V_xi(r), beam-splitter state", v.as_array())?;
    write_matrix(out, "S, local anti-squeeze", s.matrix())?;
    write_matrix(out, "S V S^T", reduced.as_array())?;
    write_matrix(out, "V_tmss(r/2)", vm_tmss(r / 2.0).as_array())?;
    writeln!(out, "max deviation: {deviation:.3e}")?;
    Ok(())
}
