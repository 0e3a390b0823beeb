//! EEG band power per video: STFT band power of a synthetic session whose
//! alpha power is raised during High-valence videos.
//!
//! cargo run --example eeg_band_power

use emosense::dsp::{band_powers, BandSpec};
use emosense::features::feature_window;
use emosense::model::{segment_session, ProtocolTimeline, SensorKind, VideoLabelTable};
use emosense::synth::{generate_session, ModulationSpec};

fn main() -> anyhow::Result<()> {
    let table = VideoLabelTable::default();
    let timeline = ProtocolTimeline::default();
    let spec = ModulationSpec {
        valence_alpha_gain: 3.0,
        seed: 4,
        ..ModulationSpec::default()
    };
    let session = generate_session("s01", &timeline, &table, &spec)?;
    let bands = BandSpec::defaults();
    let series = band_powers(&session.traces[&SensorKind::EegRaw], &bands)?;

    print!("{:>6} {:>8}", "video", "valence");
    for b in &bands {
        print!(" {:>9}", b.name.as_str());
    }
    println!();
    for video in segment_session(&timeline)
        .iter()
        .flat_map(|t| t.videos.clone())
    {
        let (valence, _) = table.lookup(video.video_id)?;
        print!("{:>6} {:>8}", video.video_id, format!("{valence:?}"));
        for s in &series {
            let v = s.values_in(feature_window(video.window));
            print!(" {:>9.1}", v.iter().sum::<f64>() / v.len() as f64);
        }
        println!();
    }
    println!("(mean band power over the last 30 s of each video, uV^2)");
    Ok(())
}
