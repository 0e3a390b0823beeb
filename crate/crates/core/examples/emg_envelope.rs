//! EMG envelope: band-pass, rectify and smooth both EMG channels, then
//! compare the envelope level in Low and High arousal videos over six
//! synthetic subjects.
//!
//! cargo run --example emg_envelope

use emosense::dsp::{bandpass_filter, emg_envelope};
use emosense::features::feature_window;
use emosense::model::{segment_session, Class, ProtocolTimeline, SensorKind, VideoLabelTable};
use emosense::synth::{generate_session, subject_ids, ModulationSpec};

fn main() -> anyhow::Result<()> {
    let table = VideoLabelTable::default();
    let timeline = ProtocolTimeline::default();
    let spec = ModulationSpec {
        arousal_emg_gain: 1.5,
        seed: 8,
        ..ModulationSpec::default()
    };
    let sessions = subject_ids(6)
        .iter()
        .map(|id| generate_session(id, &timeline, &table, &spec))
        .collect::<Result<Vec<_>, _>>()?;
    let videos: Vec<_> = segment_session(&timeline)
        .into_iter()
        .flat_map(|t| t.videos)
        .collect();

    for kind in [SensorKind::EmgCh1, SensorKind::EmgCh2] {
        // [low, high] running sum and sample count
        let mut sums = [(0.0, 0usize); 2];
        for session in &sessions {
            let filtered = bandpass_filter(&session.traces[&kind], 20.0, 125.0, 4)?;
            let env = emg_envelope(&filtered, 0.1)?;
            for video in &videos {
                let (_, arousal) = table.lookup(video.video_id)?;
                let class = arousal.class().expect("videos carry a class");
                let v = env.values_in(feature_window(video.window));
                let slot = &mut sums[class.index()];
                slot.0 += v.iter().sum::<f64>();
                slot.1 += v.len();
            }
        }
        let mean = |c: Class| sums[c.index()].0 / sums[c.index()].1 as f64;
        println!(
            "{kind}: mean envelope {:.2} uV in Low arousal, {:.2} uV in High arousal",
            mean(Class::Low),
            mean(Class::High)
        );
    }
    Ok(())
}
