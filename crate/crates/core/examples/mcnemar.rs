//! Paired McNemar comparison of two sensor settings evaluated on the same
//! instances, plus the test on raw discordant counts.
//!
//! cargo run --example mcnemar

use emosense::classify::{Algorithm, ClassifierSpec};
use emosense::dsp::DspConfig;
use emosense::eval::{
    evaluate, mcnemar_from_counts, mcnemar_test, LooMode, McNemarMethod, MethodChoice,
};
use emosense::features::{build_dataset, project_sensors, Dataset, SensorMask};
use emosense::model::{ProtocolTimeline, Target, VideoLabelTable};
use emosense::pipeline::process_session;
use emosense::synth::{generate_session, subject_ids, ModulationSpec};

fn cohort(spec: &ModulationSpec, subjects: usize) -> anyhow::Result<Dataset> {
    let table = VideoLabelTable::default();
    let sessions = subject_ids(subjects)
        .iter()
        .map(|id| {
            let s = generate_session(id, &ProtocolTimeline::default(), &table, spec)?;
            Ok(process_session(&s, &DspConfig::default())?)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(build_dataset(&sessions, &table)?)
}

fn main() -> anyhow::Result<()> {
    for (b, c) in [(5, 15), (12, 30), (0, 0)] {
        for choice in [
            MethodChoice::Auto,
            MethodChoice::Force(McNemarMethod::ChiSquareCc),
        ] {
            let r = mcnemar_from_counts(b, c, choice);
            println!(
                "b={b:<2} c={c:<2} {choice:?}: statistic {:.3}, p {:.4} ({:?})",
                r.statistic, r.p_value, r.method
            );
        }
    }

    // GSR carries the arousal signal here, EEG does not
    let spec = ModulationSpec {
        arousal_gsr_gain: 6.0,
        ..ModulationSpec::default()
    };
    let ds = cohort(&spec, 8)?;
    let svm = ClassifierSpec::default_for(Algorithm::Svm);
    let gsr = evaluate(
        &svm,
        &project_sensors(&ds, SensorMask::GSR)?,
        Target::Arousal,
        LooMode::Instance,
    )?;
    let eeg = evaluate(
        &svm,
        &project_sensors(&ds, SensorMask::EEG)?,
        Target::Arousal,
        LooMode::Instance,
    )?;
    let r = mcnemar_test(&gsr.predictions, &eeg.predictions, MethodChoice::Auto)?;
    println!(
        "\nGSR/SVM F1 {:.3} vs EEG/SVM F1 {:.3}: only GSR right {}, only EEG right {}, p = {:.2e} ({:?})",
        gsr.f1(),
        eeg.f1(),
        r.b,
        r.c,
        r.p_value,
        r.method
    );
    Ok(())
}
