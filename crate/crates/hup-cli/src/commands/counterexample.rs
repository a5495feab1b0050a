use crate::commands::{load_config, prepare_out_dir};
use crate::CliError;
use clap::Args;
use hup_core::counterexample::{build_counterexample, counterexample_lambda, second_line_max};
use hup_core::extension::extension_quadrature;
use hup_core::uniqueness::lambda_points;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

#[derive(Args)]
pub struct CounterexampleArgs {
    /// JSON config document; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Support radius of the odd profile ψ.
    #[arg(long)]
    r: Option<f64>,
    /// Slope of the through-origin line the construction defeats.
    #[arg(long)]
    a: Option<f64>,
    /// Coefficient of the horizontal samples (must exceed r).
    #[arg(long)]
    c2: Option<f64>,
    /// Coefficient of the through-origin samples.
    #[arg(long)]
    c1: Option<f64>,
    /// Exponent of the through-origin samples (n^{-alpha}).
    #[arg(long)]
    alpha: Option<f64>,
    /// Exponent of the horizontal samples (n^{beta/2}).
    #[arg(long)]
    beta: Option<f64>,
    /// Λ truncation index.
    #[arg(long)]
    n_max: Option<u32>,
    /// Quadrature tolerance for the vanishing scan.
    #[arg(long)]
    tol: Option<f64>,
    /// Slope of the probing second line (default 2a).
    #[arg(long)]
    d: Option<f64>,
    /// Vanishing threshold for the report verdict.
    #[arg(long)]
    threshold: Option<f64>,
    /// Also write the materialized density as density.json and density.csv.
    #[arg(long)]
    export_density: bool,
    /// Output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize, Default)]
struct CounterexampleConfig {
    r: Option<f64>,
    a: Option<f64>,
    c2: Option<f64>,
    c1: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    n_max: Option<u32>,
    tol: Option<f64>,
    d: Option<f64>,
    threshold: Option<f64>,
    export_density: Option<bool>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Effective {
    command: &'static str,
    r: f64,
    a: f64,
    c2: f64,
    c1: f64,
    alpha: f64,
    beta: f64,
    n_max: u32,
    tol: f64,
    d: f64,
    threshold: f64,
    export_density: bool,
}

pub fn run(args: CounterexampleArgs) -> Result<(), CliError> {
    let cfg: CounterexampleConfig = load_config(&args.config)?;
    let r = args.r.or(cfg.r).unwrap_or(0.5);
    let a = args.a.or(cfg.a).unwrap_or(1.0);
    let c2 = args.c2.or(cfg.c2).unwrap_or(1.0);
    let c1 = args.c1.or(cfg.c1).unwrap_or(1.0);
    let alpha = args.alpha.or(cfg.alpha).unwrap_or(0.25);
    let beta = args.beta.or(cfg.beta).unwrap_or(0.25);
    let n_max = args.n_max.or(cfg.n_max).unwrap_or(50);
    let tol = args.tol.or(cfg.tol).unwrap_or(1e-10);
    let d = args.d.or(cfg.d).unwrap_or(2.0 * a);
    let threshold = args.threshold.or(cfg.threshold).unwrap_or(1e-9);
    let export_density = args.export_density || cfg.export_density.unwrap_or(false);
    let out = args
        .out
        .or(cfg.out)
        .unwrap_or_else(|| PathBuf::from("out/counterexample"));

    prepare_out_dir(
        &out,
        &Effective {
            command: "counterexample",
            r,
            a,
            c2,
            c1,
            alpha,
            beta,
            n_max,
            tol,
            d,
            threshold,
            export_density,
        },
    )?;

    let build = build_counterexample(r, a, c2)?;
    if export_density {
        fs::write(
            out.join("density.json"),
            serde_json::to_string(&build.measure)? + "\n",
        )?;
        if let hup_core::DensityKind::SampleTable(table) = &build.measure.density.kind {
            let mut buf = Vec::new();
            table.to_csv(&mut buf)?;
            fs::write(out.join("density.csv"), buf)?;
        }
    }
    let spec = counterexample_lambda(c1, alpha, a, c2, beta);
    let points = lambda_points(&spec, n_max)?;

    let rows: Vec<(f64, f64, f64, f64)> = points
        .par_iter()
        .map(|p| {
            extension_quadrature(&build.measure, *p, tol)
                .map(|est| (p.xi, p.eta, est.value.norm(), est.est_error))
        })
        .collect::<Result<_, _>>()?;

    let mut csv = String::from("xi,eta,abs,est_error\n");
    let mut max_abs = 0.0f64;
    let mut worst = (0.0, 0.0);
    for &(xi, eta, abs, err) in &rows {
        writeln!(csv, "{xi},{eta},{abs},{err}").expect("string write");
        if abs >= max_abs {
            max_abs = abs;
            worst = (xi, eta);
        }
    }
    fs::write(out.join("lambda_abs.csv"), csv)?;

    let second = second_line_max(&build.measure, d, 16, tol.max(1e-8))?;
    let passed = build.mass.value > 0.0 && max_abs < threshold && second >= 1e-3;
    let report = json!({
        "label": build.measure.label,
        "mass": build.mass.value,
        "mass_converged": build.mass.converged,
        "table_l1_error": build.table_l1_error,
        "table_half_width": build.table_half_width,
        "points_checked": rows.len(),
        "max_abs": max_abs,
        "worst_point": {"xi": worst.0, "eta": worst.1},
        "vanishing_threshold": threshold,
        "second_line_slope": d,
        "second_line_max": second,
        "passed": passed,
    });
    fs::write(
        out.join("report.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;

    println!(
        "counterexample: mass {:.5}, max |μ̂| on Λ₁ = {:.3e} over {} points, second line (y = {d}x) max = {:.3e}",
        build.mass.value,
        max_abs,
        rows.len(),
        second
    );
    println!("wrote {}", out.join("report.json").display());
    if !passed {
        return Err(CliError::numeric(format!(
            "counterexample checks failed: mass {:.3e}, max_abs {:.3e} (threshold {threshold:.1e}), second line {:.3e}",
            build.mass.value, max_abs, second
        )));
    }
    Ok(())
}
