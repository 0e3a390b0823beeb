//! Train the three learners on a synthetic cohort, inspect what they learned
//! and save/load a model as JSON.
//!
//! cargo run --example classifiers

use emosense::classify::{train, Algorithm, ClassifierSpec, Model, ModelParams};
use emosense::dsp::DspConfig;
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
    let spec = ModulationSpec {
        arousal_gsr_gain: 8.0,
        ..ModulationSpec::default()
    };
    let gsr = project_sensors(&cohort(&spec, 6)?, SensorMask::GSR)?;
    let names = gsr.feature_names();
    println!(
        "{} instances, {} GSR features\n",
        gsr.len(),
        gsr.dimension()
    );

    for alg in Algorithm::ALL {
        let model = train(&ClassifierSpec::default_for(alg), &gsr, Target::Arousal)?;
        let correct = gsr
            .instances()
            .iter()
            .filter(|i| {
                model
                    .predict(&i.features)
                    .map(|p| p.class == i.arousal)
                    .unwrap_or(false)
            })
            .count();
        println!(
            "{}: training accuracy {}/{}",
            alg.display_name(),
            correct,
            gsr.len()
        );
        match &model.params {
            ModelParams::Nb(nb) => {
                println!("  priors low/high {:.3}/{:.3}", nb.priors[0], nb.priors[1])
            }
            ModelParams::Tree(tree) => println!(
                "  {} leaves, depth {}, root {}",
                tree.root.leaves().len(),
                tree.root.depth(),
                match &tree.root {
                    emosense::classify::Node::Split {
                        feature, threshold, ..
                    } => format!("{} <= {threshold:.4}", names[*feature]),
                    emosense::classify::Node::Leaf { counts } => format!("leaf {counts:?}"),
                }
            ),
            ModelParams::Svm(svm) => println!(
                "  {} support vectors, bias {:.4}, converged {}",
                svm.support.len(),
                svm.bias,
                svm.converged
            ),
        }
        let restored = Model::from_json(&model.to_json())?;
        assert_eq!(restored, model);
    }
    println!("\nevery model survives a JSON round trip unchanged");
    Ok(())
}
