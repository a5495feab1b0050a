use crate::commands::{load_config, load_measure, prepare_out_dir};
use crate::CliError;
use clap::Args;
use hup_core::extension::{extension_quadrature, EvalPoint};
use hup_core::Error;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

#[derive(Args)]
pub struct EvalArgs {
    /// JSON config document; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Measure document ({label, density} or a bare density).
    #[arg(long, short)]
    measure: Option<PathBuf>,
    #[arg(long)]
    xi_min: Option<f64>,
    #[arg(long)]
    xi_max: Option<f64>,
    #[arg(long)]
    xi_n: Option<usize>,
    #[arg(long)]
    eta_min: Option<f64>,
    #[arg(long)]
    eta_max: Option<f64>,
    #[arg(long)]
    eta_n: Option<usize>,
    /// Quadrature tolerance per point.
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize, Default)]
struct EvalConfig {
    measure: Option<PathBuf>,
    xi_min: Option<f64>,
    xi_max: Option<f64>,
    xi_n: Option<usize>,
    eta_min: Option<f64>,
    eta_max: Option<f64>,
    eta_n: Option<usize>,
    tol: Option<f64>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Effective {
    command: &'static str,
    measure: PathBuf,
    xi_min: f64,
    xi_max: f64,
    xi_n: usize,
    eta_min: f64,
    eta_max: f64,
    eta_n: usize,
    tol: f64,
}

pub fn run(args: EvalArgs) -> Result<(), CliError> {
    let cfg: EvalConfig = load_config(&args.config)?;
    let measure_path = args
        .measure
        .or(cfg.measure)
        .ok_or_else(|| CliError::input("--measure is required".to_string()))?;
    let xi_min = args.xi_min.or(cfg.xi_min).unwrap_or(-3.0);
    let xi_max = args.xi_max.or(cfg.xi_max).unwrap_or(3.0);
    let xi_n = args.xi_n.or(cfg.xi_n).unwrap_or(21);
    let eta_min = args.eta_min.or(cfg.eta_min).unwrap_or(-3.0);
    let eta_max = args.eta_max.or(cfg.eta_max).unwrap_or(3.0);
    let eta_n = args.eta_n.or(cfg.eta_n).unwrap_or(21);
    let m = load_measure(&measure_path)?;
    let tol = args
        .tol
        .or(cfg.tol)
        .unwrap_or_else(|| m.density.default_tolerance());
    let out = args
        .out
        .or(cfg.out)
        .unwrap_or_else(|| PathBuf::from("out/eval"));

    let misordered = |lo: f64, hi: f64| lo.is_nan() || hi.is_nan() || hi < lo;
    if xi_n < 1
        || eta_n < 1
        || tol <= 0.0
        || tol.is_nan()
        || misordered(xi_min, xi_max)
        || misordered(eta_min, eta_max)
    {
        return Err(CliError::precondition("degenerate grid or tolerance"));
    }
    prepare_out_dir(
        &out,
        &Effective {
            command: "eval",
            measure: measure_path,
            xi_min,
            xi_max,
            xi_n,
            eta_min,
            eta_max,
            eta_n,
            tol,
        },
    )?;

    let step = |lo: f64, hi: f64, n: usize| {
        if n > 1 {
            (hi - lo) / (n - 1) as f64
        } else {
            0.0
        }
    };
    let dx = step(xi_min, xi_max, xi_n);
    let de = step(eta_min, eta_max, eta_n);
    let pts: Vec<EvalPoint> = (0..xi_n)
        .flat_map(|i| {
            (0..eta_n).map(move |j| EvalPoint::new(xi_min + dx * i as f64, eta_min + de * j as f64))
        })
        .collect();

    // A non-convergent point still contributes its partial value and achieved
    // error; the run then exits with a numeric failure after writing the grid.
    let rows: Vec<(EvalPoint, num_complex::Complex64, f64, bool)> = pts
        .par_iter()
        .map(|&p| match extension_quadrature(&m, p, tol) {
            Ok(est) => (p, est.value, est.est_error, true),
            Err(Error::NonConvergence {
                partial, achieved, ..
            }) => (p, partial, achieved, false),
            Err(_) => (
                p,
                num_complex::Complex64::new(f64::NAN, f64::NAN),
                f64::INFINITY,
                false,
            ),
        })
        .collect();

    let mut csv = String::from("xi,eta,re,im,abs,est_error\n");
    let mut failed = 0usize;
    for (p, v, err, ok) in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            p.xi,
            p.eta,
            v.re,
            v.im,
            v.norm(),
            err
        )
        .expect("string write");
        failed += usize::from(!ok);
    }
    fs::write(out.join("grid.csv"), csv)?;
    println!(
        "eval: {} points ({} non-convergent), wrote {}",
        rows.len(),
        failed,
        out.join("grid.csv").display()
    );
    if failed > 0 {
        return Err(CliError::numeric(format!(
            "{failed} grid points did not reach tol = {tol:.1e}"
        )));
    }
    Ok(())
}
