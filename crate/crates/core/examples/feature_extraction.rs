//! The full per-session pipeline: six raw channels in, one 58-value feature
//! vector per video out.
//!
//! cargo run --example feature_extraction [video_id]

use emosense::dsp::DspConfig;
use emosense::features::{feature_names, Block};
use emosense::model::{ProtocolTimeline, VideoLabelTable};
use emosense::pipeline::process_session;
use emosense::synth::{generate_session, ModulationSpec};

fn main() -> anyhow::Result<()> {
    let video: u32 = std::env::args()
        .nth(1)
        .map(|a| a.parse())
        .transpose()?
        .unwrap_or(63);
    let table = VideoLabelTable::default();
    let session = generate_session(
        "s01",
        &ProtocolTimeline::default(),
        &table,
        &ModulationSpec::default(),
    )?;
    let features = process_session(&session, &DspConfig::default())?;
    println!(
        "{} videos processed for {}",
        features.rows.len(),
        features.subject_id
    );

    let (_, row) = features
        .rows
        .iter()
        .find(|(id, _)| *id == video)
        .ok_or_else(|| anyhow::anyhow!("video {video} is not in the protocol"))?;
    let names = feature_names();
    for block in [Block::Eeg, Block::Gsr, Block::Emg] {
        println!("\n{} block ({} features)", block.as_str(), block.size());
        for i in block.range() {
            println!("  {:<34} {:>14.6}", names[i], row.values()[i]);
        }
    }
    Ok(())
}
