//! Leave-one-out evaluation of one sensor setting: instance-level folds as
//! in the reference protocol, and subject-level folds for comparison.
//!
//! cargo run --example loo_evaluation -- [MASK] [CLF]   (defaults: GSR svm)

use emosense::classify::{Algorithm, ClassifierSpec};
use emosense::dsp::DspConfig;
use emosense::eval::{evaluate, LooMode};
use emosense::features::{build_dataset, project_sensors, Dataset, SensorMask};
use emosense::model::{Class, ProtocolTimeline, Target, VideoLabelTable};
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
    let mut args = std::env::args().skip(1);
    let mask: SensorMask = args
        .next()
        .as_deref()
        .unwrap_or("GSR")
        .parse()
        .map_err(anyhow::Error::msg)?;
    let alg: Algorithm = args
        .next()
        .as_deref()
        .unwrap_or("svm")
        .parse()
        .map_err(anyhow::Error::msg)?;
    let spec = ModulationSpec {
        arousal_gsr_gain: 4.0,
        arousal_emg_gain: 0.5,
        ..ModulationSpec::default()
    };
    let ds = project_sensors(&cohort(&spec, 8)?, mask)?;

    for mode in [LooMode::Instance, LooMode::Subject] {
        let report = evaluate(
            &ClassifierSpec::default_for(alg),
            &ds,
            Target::Arousal,
            mode,
        )?;
        let [[ll, lh], [hl, hh]] = report.confusion.counts;
        println!(
            "{mask} / {} / arousal, {mode} LOO over {} instances",
            alg.display_name(),
            ds.len()
        );
        println!("  confusion (gold x predicted)   low  high");
        println!("    low                         {ll:>4}  {lh:>4}");
        println!("    high                        {hl:>4}  {hh:>4}");
        for class in [Class::Low, Class::High] {
            let m = report.per_class[class.index()];
            println!(
                "  {:<5} P {:.3}  R {:.3}  F1 {:.3}",
                class.as_str(),
                m.precision,
                m.recall,
                m.f1
            );
        }
        let m = report.macro_avg;
        println!(
            "  macro P {:.3}  R {:.3}  F1 {:.3}\n",
            m.precision, m.recall, m.f1
        );
    }
    Ok(())
}
