//! Files on disk end to end, the same path the CLI takes: write synthetic
//! sessions, read the manifests back, extract the feature CSV and evaluate
//! one cell.
//!
//! cargo run --example synth_end_to_end -- [out_dir]

use std::path::PathBuf;

use emosense::classify::Algorithm;
use emosense::cli::{cmd_evaluate, cmd_extract, cmd_synth, GridFilter, PipelineConfig};
use emosense::features::SensorMask;
use emosense::model::Target;

fn main() -> anyhow::Result<()> {
    let scratch = tempfile::tempdir()?;
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| scratch.path().to_path_buf());
    let mut cfg = PipelineConfig {
        subjects: 4,
        out_dir: out.clone(),
        ..PipelineConfig::default()
    };
    cfg.synth.arousal_gsr_gain = 6.0;
    cfg.synth.seed = 21;

    let manifests = cmd_synth(&cfg)?;
    println!(
        "wrote {} sessions under {}",
        manifests.len(),
        cfg.sessions_dir().display()
    );
    let manifest = std::fs::read_to_string(&manifests[0])?;
    println!("first manifest:\n{manifest}");

    let features = cmd_extract(&cfg, &[])?;
    let rows = std::fs::read_to_string(&features)?.lines().count() - 1;
    println!("{rows} feature rows in {}", features.display());

    let filter = GridFilter {
        mask: Some(SensorMask::GSR),
        algorithm: Some(Algorithm::Nb),
        target: Some(Target::Arousal),
    };
    let report = cmd_evaluate(&cfg, &features, &filter)?;
    print!("\n{}", report.table);
    println!(
        "reports: {} and {}",
        report.json_path.display(),
        report.csv_path.display()
    );
    Ok(())
}
