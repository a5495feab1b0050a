use crate::commands::{load_config, prepare_out_dir};
use crate::CliError;
use clap::Args;
use hup_core::symmetry::{map_lambda, MappedLambda, MoebiusParams};
use hup_core::uniqueness::{lambda_points, LambdaSpec};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

#[derive(Args)]
pub struct LambdaArgs {
    /// JSON config document; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// LambdaSpec JSON document.
    #[arg(long, short)]
    spec: Option<PathBuf>,
    /// Truncation index.
    #[arg(long)]
    n_max: Option<u32>,
    /// Apply the Moebius point map "a,b,c,d" to the node set.
    #[arg(long)]
    map: Option<String>,
    /// Output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize, Default)]
struct LambdaConfig {
    spec: Option<PathBuf>,
    n_max: Option<u32>,
    map: Option<[f64; 4]>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Effective {
    command: &'static str,
    spec: PathBuf,
    n_max: u32,
    map: Option<[f64; 4]>,
}

fn points_csv(points: &[hup_core::EvalPoint]) -> String {
    let mut csv = String::from("xi,eta\n");
    for p in points {
        writeln!(csv, "{},{}", p.xi, p.eta).expect("string write");
    }
    csv
}

pub fn run(args: LambdaArgs) -> Result<(), CliError> {
    let cfg: LambdaConfig = load_config(&args.config)?;
    let spec_path = args
        .spec
        .or(cfg.spec)
        .ok_or_else(|| CliError::input("--spec is required".to_string()))?;
    let n_max = args.n_max.or(cfg.n_max).unwrap_or(50);
    let map: Option<[f64; 4]> = match args.map {
        Some(s) => {
            let vals: Vec<f64> = s
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::input(format!("--map: {e}")))?;
            if vals.len() != 4 {
                return Err(CliError::input("--map needs exactly four numbers a,b,c,d"));
            }
            Some([vals[0], vals[1], vals[2], vals[3]])
        }
        None => cfg.map,
    };
    let out = args
        .out
        .or(cfg.out)
        .unwrap_or_else(|| PathBuf::from("out/lambda"));
    if n_max == 0 {
        return Err(CliError::precondition("n_max must be at least 1"));
    }

    let text = fs::read_to_string(&spec_path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", spec_path.display())))?;
    let spec: LambdaSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", spec_path.display())))?;

    prepare_out_dir(
        &out,
        &Effective {
            command: "lambda",
            spec: spec_path,
            n_max,
            map,
        },
    )?;

    let points = lambda_points(&spec, n_max)?;
    fs::write(out.join("points.csv"), points_csv(&points))?;
    println!("lambda: {} points at n_max = {n_max}", points.len());

    if let Some([a, b, c, d]) = map {
        let mp = MoebiusParams::new(a, b, c, d)?;
        let mapped = map_lambda(&spec, &mp, n_max)?;
        match &mapped {
            MappedLambda::Spec(s) => {
                fs::write(
                    out.join("mapped_spec.json"),
                    serde_json::to_string_pretty(s)? + "\n",
                )?;
                println!("map: structured image with {} branches", s.branches.len());
            }
            MappedLambda::Points(_) => {
                println!("map: image is not a recognizable line family; raw points only");
            }
        }
        let mapped_points = mapped.points(n_max)?;
        fs::write(out.join("mapped_points.csv"), points_csv(&mapped_points))?;
    }
    println!("wrote {}", out.join("points.csv").display());
    Ok(())
}
