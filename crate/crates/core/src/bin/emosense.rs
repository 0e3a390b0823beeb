use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use emosense::classify::Algorithm;
use emosense::cli::{
    cmd_compare, cmd_evaluate, cmd_extract, cmd_synth, GridFilter, PipelineConfig, Setting,
};
use emosense::eval::LooMode;
use emosense::features::SensorMask;
use emosense::model::Target;

#[derive(Parser)]
#[command(
    name = "emosense",
    version,
    about = "Emotion recognition from EEG, GSR and EMG"
)]
struct Args {
    /// JSON pipeline configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Leave out one instance or one subject per fold.
    #[arg(long, global = true)]
    loo: Option<LooMode>,
    /// Stamp reports with the current time.
    #[arg(long, global = true)]
    timestamps: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write synthetic sessions (manifest + six trace files each).
    Synth {
        #[arg(long)]
        subjects: Option<usize>,
    },
    /// Turn session manifests into a feature CSV.
    Extract {
        /// Manifests to process; defaults to every manifest under <out>/sessions.
        manifests: Vec<PathBuf>,
    },
    /// LOO-evaluate the sensor × classifier × target grid.
    Evaluate {
        /// Feature CSV; defaults to <out>/features.csv.
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        mask: Option<SensorMask>,
        #[arg(long)]
        clf: Option<Algorithm>,
        #[arg(long)]
        target: Option<Target>,
    },
    /// McNemar test between two settings, each given as MASK:CLF.
    Compare {
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        a: Setting,
        #[arg(long)]
        b: Setting,
        #[arg(long)]
        target: Target,
    },
}

fn run(args: Args) -> anyhow::Result<()> {
    let mut cfg = match &args.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.synth.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.out_dir = out;
    }
    if let Some(loo) = args.loo {
        cfg.evaluation = loo;
    }
    cfg.timestamps |= args.timestamps;

    match args.command {
        Command::Synth { subjects } => {
            if let Some(n) = subjects {
                cfg.subjects = n;
            }
            for path in cmd_synth(&cfg).context("synth failed")? {
                println!("{}", path.display());
            }
        }
        Command::Extract { manifests } => {
            let path = cmd_extract(&cfg, &manifests).context("extract failed")?;
            println!("{}", path.display());
        }
        Command::Evaluate {
            features,
            mask,
            clf,
            target,
        } => {
            let features = features.unwrap_or_else(|| cfg.features_path());
            let filter = GridFilter {
                mask,
                algorithm: clf,
                target,
            };
            let out = cmd_evaluate(&cfg, &features, &filter).context("evaluate failed")?;
            print!("{}", out.table);
            println!("{}\n{}", out.json_path.display(), out.csv_path.display());
        }
        Command::Compare {
            features,
            a,
            b,
            target,
        } => {
            let features = features.unwrap_or_else(|| cfg.features_path());
            let (o, path) = cmd_compare(&cfg, &features, a, b, target).context("compare failed")?;
            println!(
                "{target}: {a} F1 {:.3} vs {b} F1 {:.3}; b={} c={} statistic {:.3} p {:.4}",
                o.f1_a, o.f1_b, o.mcnemar.b, o.mcnemar.c, o.mcnemar.statistic, o.mcnemar.p_value
            );
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // wrapped errors already print their cause; skip repeats
            let mut msg = String::new();
            for cause in e.chain() {
                let text = cause.to_string();
                if !msg.contains(&text) {
                    if !msg.is_empty() {
                        msg.push_str(": ");
                    }
                    msg.push_str(&text);
                }
            }
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
