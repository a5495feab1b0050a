use crate::commands::{load_config, prepare_out_dir};
use crate::CliError;
use clap::Args;
use hup_core::uniqueness::{bootstrap, c_lemma, ExponentPair};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

#[derive(Args)]
pub struct BootstrapArgs {
    /// JSON config document; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Slack subtracted at each improvement step.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Starting regularity C (default C(α,β)+1, the guaranteed-divergence edge).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize, Default)]
struct BootstrapConfig {
    alpha: Option<f64>,
    beta: Option<f64>,
    epsilon: Option<f64>,
    c: Option<f64>,
    max_iter: Option<usize>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Effective {
    command: &'static str,
    alpha: f64,
    beta: f64,
    epsilon: f64,
    c: f64,
    max_iter: usize,
}

pub fn run(args: BootstrapArgs) -> Result<(), CliError> {
    let cfg: BootstrapConfig = load_config(&args.config)?;
    let alpha = args.alpha.or(cfg.alpha).unwrap_or(0.2);
    let beta = args.beta.or(cfg.beta).unwrap_or(0.2);
    let epsilon = args.epsilon.or(cfg.epsilon).unwrap_or(1e-3);
    let max_iter = args.max_iter.or(cfg.max_iter).unwrap_or(10_000);
    let out = args
        .out
        .or(cfg.out)
        .unwrap_or_else(|| PathBuf::from("out/bootstrap"));

    let pair = ExponentPair::new(alpha, beta);
    // The verdict is judged against the closed-form threshold, which needs
    // alpha + beta < 1; surface its domain error as a precondition.
    let c_closed = c_lemma(pair)?;
    let c = args.c.or(cfg.c).unwrap_or(c_closed as f64 + 1.0);
    if epsilon <= 0.0 || epsilon.is_nan() || c < 0.0 {
        return Err(CliError::precondition(
            "epsilon must be positive and C nonnegative",
        ));
    }
    prepare_out_dir(
        &out,
        &Effective {
            command: "bootstrap",
            alpha,
            beta,
            epsilon,
            c,
            max_iter,
        },
    )?;

    let traj = bootstrap(pair, epsilon, c, max_iter);

    let mut csv = String::from("step,j,k\n");
    for (i, s) in traj.steps.iter().enumerate() {
        writeln!(csv, "{},{},{}", i, s.j, s.k).expect("string write");
    }
    let verdict = if traj.diverged {
        "diverged".to_string()
    } else {
        format!("stalled: {}", traj.stall_reason.clone().unwrap_or_default())
    };
    writeln!(csv, "# verdict: {verdict}").expect("string write");
    fs::write(out.join("trajectory.csv"), csv)?;

    // Consistency of the observed verdict with the closed-form threshold:
    // C ≥ C(α,β)+1 guarantees divergence, C < 1 guarantees a stall.
    let consistent = if c >= c_closed as f64 + 1.0 {
        traj.diverged
    } else if c < 1.0 {
        !traj.diverged
    } else {
        true
    };

    let report = json!({
        "alpha": alpha,
        "beta": beta,
        "epsilon": epsilon,
        "c": c,
        "c_lemma": c_closed,
        "steps": traj.steps.len(),
        "diverged": traj.diverged,
        "stall_reason": traj.stall_reason,
        "consistent_with_threshold": consistent,
    });
    fs::write(
        out.join("report.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;

    println!(
        "bootstrap (α={alpha}, β={beta}, ε={epsilon}, C={c}): {verdict} after {} steps; C(α,β) = {c_closed}",
        traj.steps.len()
    );
    if !consistent {
        return Err(CliError::numeric(
            "bootstrap verdict contradicts the closed-form threshold",
        ));
    }
    Ok(())
}
