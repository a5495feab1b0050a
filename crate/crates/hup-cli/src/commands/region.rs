use crate::commands::{load_config, prepare_out_dir};
use crate::{svg, CliError};
use clap::Args;
use hup_core::uniqueness::{c_lemma, region_a_contains, region_a_supremum_detailed, ExponentPair};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

#[derive(Args)]
pub struct RegionArgs {
    /// JSON config document; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cells per axis of the (0,1)² scan.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Skip the SVG figure.
    #[arg(long)]
    no_svg: bool,
    /// Output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Serialize, Deserialize, Default)]
struct RegionConfig {
    grid_n: Option<usize>,
    svg: Option<bool>,
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Effective {
    command: &'static str,
    grid_n: usize,
    svg: bool,
}

pub fn run(args: RegionArgs) -> Result<(), CliError> {
    let cfg: RegionConfig = load_config(&args.config)?;
    let grid_n = args.grid_n.or(cfg.grid_n).unwrap_or(200);
    let svg_wanted = if args.no_svg {
        false
    } else {
        cfg.svg.unwrap_or(true)
    };
    let out = args
        .out
        .or(cfg.out)
        .unwrap_or_else(|| PathBuf::from("out/region"));

    if grid_n < 50 {
        return Err(CliError::precondition(format!(
            "grid_n = {grid_n} is below the minimum of 50"
        )));
    }
    prepare_out_dir(
        &out,
        &Effective {
            command: "region",
            grid_n,
            svg: svg_wanted,
        },
    )?;

    let mut csv = String::from("alpha,beta,in_A,c_lemma\n");
    let mut inside = 0usize;
    for i in 0..grid_n {
        let alpha = (i as f64 + 0.5) / grid_n as f64;
        for j in 0..grid_n {
            let beta = (j as f64 + 0.5) / grid_n as f64;
            let p = ExponentPair::new(alpha, beta);
            let in_a = region_a_contains(p);
            inside += in_a as usize;
            let c = if alpha + beta < 1.0 {
                c_lemma(p).map(|c| c.to_string()).unwrap_or_default()
            } else {
                String::new()
            };
            writeln!(csv, "{alpha},{beta},{in_a},{c}").expect("string write");
        }
    }
    fs::write(out.join("region.csv"), csv)?;

    let sup = region_a_supremum_detailed(grid_n.max(100));
    if svg_wanted {
        fs::write(out.join("region.svg"), svg::region_figure(&sup))?;
    }

    let fraction = inside as f64 / (grid_n * grid_n) as f64;
    println!(
        "region: {} cells, area fraction {:.4}, sup min/(1-α-β) = {:.6} at ({:.5}, {:.5})",
        grid_n * grid_n,
        fraction,
        sup.value,
        sup.argmax.alpha,
        sup.argmax.beta
    );
    println!("wrote {}", out.join("region.csv").display());
    Ok(())
}
