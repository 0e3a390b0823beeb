//! The full sensor-combination grid (7 masks x 3 learners x 2 targets) on a
//! synthetic cohort, printed next to the published reference F1 values.
//!
//! cargo run --release --example comparison_grid -- [subjects] [arousal_gsr_gain]

use emosense::dsp::DspConfig;
use emosense::eval::{run_comparison, GridOptions};
use emosense::features::build_dataset;
use emosense::model::{ProtocolTimeline, VideoLabelTable};
use emosense::pipeline::process_session;
use emosense::synth::{generate_session, subject_ids, ModulationSpec};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let subjects: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(19);
    let gain: f64 = args.next().map(|a| a.parse()).transpose()?.unwrap_or(2.0);
    let spec = ModulationSpec {
        arousal_gsr_gain: gain,
        arousal_emg_gain: 0.3,
        valence_alpha_gain: 0.5,
        ..ModulationSpec::default()
    };
    let table = VideoLabelTable::default();
    let sessions = subject_ids(subjects)
        .iter()
        .map(|id| {
            let s = generate_session(id, &ProtocolTimeline::default(), &table, &spec)?;
            Ok(process_session(&s, &DspConfig::default())?)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let ds = build_dataset(&sessions, &table)?;

    let grid = run_comparison(&ds, &GridOptions::default())?;
    print!("{}", grid.summary_table());
    for target in [
        emosense::model::Target::Arousal,
        emosense::model::Target::Valence,
    ] {
        if let Some(best) = grid.best(target) {
            println!(
                "best {target}: {} / {} (F1 {:.3})",
                best.mask,
                best.algorithm.display_name(),
                best.f1
            );
        }
    }
    Ok(())
}
