//! GSR conditioning: tonic/phasic split, wavelet denoising and SCR peak
//! detection, with skin-conductance responses made more frequent under
//! High arousal.
//!
//! cargo run --example gsr_peaks

use emosense::dsp::{detect_peaks, gsr_decompose, wavelet_denoise, WaveletConfig};
use emosense::features::feature_window;
use emosense::model::{segment_session, ProtocolTimeline, SensorKind, VideoLabelTable};
use emosense::synth::{generate_session, ModulationSpec};

fn main() -> anyhow::Result<()> {
    let table = VideoLabelTable::default();
    let timeline = ProtocolTimeline::default();
    let spec = ModulationSpec {
        arousal_gsr_gain: 6.0,
        seed: 2,
        ..ModulationSpec::default()
    };
    let session = generate_session("s01", &timeline, &table, &spec)?;
    let gsr = &session.traces[&SensorKind::Gsr];
    let (tonic, phasic) = gsr_decompose(gsr, 0.05)?;
    let denoised = wavelet_denoise(&phasic, &WaveletConfig::default())?;
    println!(
        "tonic level {:.2}..{:.2} uS over {:.0} s",
        tonic.values.iter().cloned().fold(f64::INFINITY, f64::min),
        tonic
            .values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max),
        gsr.duration_s()
    );

    println!(
        "\n{:>6} {:>8} {:>6} {:>10} {:>10}",
        "video", "arousal", "peaks", "mean amp", "mean width"
    );
    for video in segment_session(&timeline)
        .iter()
        .flat_map(|t| t.videos.clone())
    {
        let (_, arousal) = table.lookup(video.video_id)?;
        let peaks = detect_peaks(&denoised.slice(feature_window(video.window)), 0.5, 0.01)?;
        let mean = |f: fn(&emosense::dsp::Peak) -> f64| {
            if peaks.is_empty() {
                0.0
            } else {
                peaks.peaks.iter().map(f).sum::<f64>() / peaks.len() as f64
            }
        };
        println!(
            "{:>6} {:>8} {:>6} {:>10.3} {:>9.2}s",
            video.video_id,
            format!("{arousal:?}"),
            peaks.len(),
            mean(|p| p.amplitude),
            mean(|p| p.width_s)
        );
    }
    Ok(())
}
