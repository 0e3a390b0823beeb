//! Batch entry points behind the `emosense` binary: generate synthetic
//! sessions, extract features, evaluate the comparison grid and run a paired
//! comparison between two settings.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::{Algorithm, ClassifierSpec, ClassifyError, NbParams, SvmParams, TreeParams};
use crate::dsp::{DspConfig, DspError};
use crate::eval::{
    evaluate, mcnemar_test, run_comparison, ComparisonGrid, EvalError, EvaluationReport,
    GridOptions, LooMode, McNemarResult, MethodChoice,
};
use crate::features::{
    build_dataset, project_sensors, read_feature_csv, write_feature_csv, Dataset, FeatureError,
    SensorMask,
};
use crate::model::{parse_manifest, ModelError, Target, VideoLabelTable};
use crate::pipeline::{load_session, process_session, PipelineError};
use crate::synth::{generate_session, subject_ids, write_session, ModulationSpec, SynthError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no session manifests found in {}", .0.display())]
    NoManifests(PathBuf),
    #[error("manifest {}: {source}", path.display())]
    Manifest {
        path: PathBuf,
        #[source]
        source: ModelError,
    },
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("{}: {source}", path.display())]
    Features {
        path: PathBuf,
        #[source]
        source: FeatureError,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSettings {
    pub nb: NbParams,
    pub tree: TreeParams,
    pub svm: SvmParams,
}

impl ClassifierSettings {
    pub fn spec(&self, algorithm: Algorithm) -> ClassifierSpec {
        match algorithm {
            Algorithm::Nb => ClassifierSpec::Nb(self.nb),
            Algorithm::Tree => ClassifierSpec::Tree(self.tree),
            Algorithm::Svm => ClassifierSpec::Svm(self.svm),
        }
    }
}

/// Everything a batch run needs. Loaded from JSON; command-line flags
/// override individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub dsp: DspConfig,
    pub classifiers: ClassifierSettings,
    pub evaluation: LooMode,
    pub mcnemar: MethodChoice,
    /// Synthetic-data settings, including the run seed.
    pub synth: ModulationSpec,
    pub subjects: usize,
    pub out_dir: PathBuf,
    /// Stamp reports with the wall-clock time (breaks byte-identical reruns).
    pub timestamps: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            dsp: DspConfig::default(),
            classifiers: ClassifierSettings::default(),
            evaluation: LooMode::Instance,
            mcnemar: MethodChoice::Auto,
            synth: ModulationSpec::default(),
            subjects: 19,
            out_dir: PathBuf::from("out"),
            timestamps: false,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let cfg: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.dsp
            .validate()
            .map_err(|e: DspError| CliError::Config(e.to_string()))?;
        for alg in Algorithm::ALL {
            self.classifiers
                .spec(alg)
                .validate()
                .map_err(|e: ClassifyError| CliError::Config(e.to_string()))?;
        }
        self.synth
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if self.subjects == 0 {
            return Err(CliError::Config("subjects must be at least 1".into()));
        }
        Ok(())
    }

    pub fn sessions_dir(&self) -> PathBuf {
        self.out_dir.join("sessions")
    }

    pub fn features_path(&self) -> PathBuf {
        self.out_dir.join("features.csv")
    }
}

/// Fixed so that reruns write identical manifests.
const SESSION_START: &str = "2024-01-01T09:00:00Z";

/// Generate `cfg.subjects` sessions into `<out>/sessions`; returns the
/// manifest paths.
pub fn cmd_synth(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let table = VideoLabelTable::default();
    let timeline = crate::model::ProtocolTimeline::default();
    let dir = cfg.sessions_dir();
    subject_ids(cfg.subjects)
        .iter()
        .map(|sid| {
            let session = generate_session(sid, &timeline, &table, &cfg.synth)?;
            Ok(write_session(&dir, &session, SESSION_START)?)
        })
        .collect()
}

/// All `*.json` files in `dir`, sorted by name.
pub fn find_manifests(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut found: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    found.sort();
    if found.is_empty() {
        return Err(CliError::NoManifests(dir.to_path_buf()));
    }
    Ok(found)
}

/// Process every manifest and build the labeled dataset.
pub fn extract_dataset(cfg: &PipelineConfig, manifests: &[PathBuf]) -> Result<Dataset, CliError> {
    let table = VideoLabelTable::default();
    let mut sessions = Vec::with_capacity(manifests.len());
    for path in manifests {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let mut manifest = parse_manifest(&text, &table).map_err(|source| CliError::Manifest {
            path: path.clone(),
            source,
        })?;
        manifest.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        let traces = load_session(&manifest)?;
        sessions.push(process_session(&traces, &cfg.dsp)?);
    }
    build_dataset(&sessions, &table).map_err(|source| CliError::Features {
        path: PathBuf::from("<sessions>"),
        source,
    })
}

/// Extract features for `manifests` (or every manifest under
/// `<out>/sessions`) into `<out>/features.csv`; returns that path.
pub fn cmd_extract(cfg: &PipelineConfig, manifests: &[PathBuf]) -> Result<PathBuf, CliError> {
    cfg.validate()?;
    let manifests = if manifests.is_empty() {
        find_manifests(&cfg.sessions_dir())?
    } else {
        manifests.to_vec()
    };
    let dataset = extract_dataset(cfg, &manifests)?;
    fs::create_dir_all(&cfg.out_dir).map_err(io_err(&cfg.out_dir))?;
    let path = cfg.features_path();
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    write_feature_csv(std::io::BufWriter::new(file), &dataset).map_err(|source| {
        CliError::Features {
            path: path.clone(),
            source,
        }
    })?;
    Ok(path)
}

pub fn load_features(path: &Path) -> Result<Dataset, CliError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    read_feature_csv(std::io::BufReader::new(file)).map_err(|source| CliError::Features {
        path: path.to_path_buf(),
        source,
    })
}

/// Optional restriction of the grid to single masks, learners or targets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridFilter {
    pub mask: Option<SensorMask>,
    pub algorithm: Option<Algorithm>,
    pub target: Option<Target>,
}

impl GridFilter {
    pub fn options(&self, cfg: &PipelineConfig) -> GridOptions {
        let masks = match self.mask {
            Some(m) => vec![m],
            None => SensorMask::COMBINATIONS.to_vec(),
        };
        let algs = match self.algorithm {
            Some(a) => vec![a],
            None => Algorithm::ALL.to_vec(),
        };
        let targets = match self.target {
            Some(t) => vec![t],
            None => vec![Target::Arousal, Target::Valence],
        };
        GridOptions {
            masks,
            classifiers: algs.into_iter().map(|a| cfg.classifiers.spec(a)).collect(),
            targets,
            mode: cfg.evaluation,
            mcnemar: cfg.mcnemar,
        }
    }
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<String>,
    config: &'a PipelineConfig,
    features: String,
    grid: &'a ComparisonGrid,
}

fn timestamp(cfg: &PipelineConfig) -> Option<String> {
    cfg.timestamps.then(|| chrono::Utc::now().to_rfc3339())
}

pub struct EvaluateOutput {
    pub grid: ComparisonGrid,
    pub json_path: PathBuf,
    pub csv_path: PathBuf,
    pub table: String,
}

/// Evaluate the (filtered) grid on a feature CSV and write
/// `<out>/report.json` and `<out>/report.csv`.
pub fn cmd_evaluate(
    cfg: &PipelineConfig,
    features: &Path,
    filter: &GridFilter,
) -> Result<EvaluateOutput, CliError> {
    cfg.validate()?;
    let dataset = load_features(features)?;
    let grid = run_comparison(&dataset, &filter.options(cfg))?;
    fs::create_dir_all(&cfg.out_dir).map_err(io_err(&cfg.out_dir))?;

    let json_path = cfg.out_dir.join("report.json");
    let doc = ReportDoc {
        generated_at: timestamp(cfg),
        config: cfg,
        features: features.display().to_string(),
        grid: &grid,
    };
    let json = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    fs::write(&json_path, json).map_err(io_err(&json_path))?;

    let csv_path = cfg.out_dir.join("report.csv");
    let file = fs::File::create(&csv_path).map_err(io_err(&csv_path))?;
    grid.write_csv(file)?;

    let table = grid.summary_table();
    Ok(EvaluateOutput {
        grid,
        json_path,
        csv_path,
        table,
    })
}

/// One side of a paired comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Setting {
    pub mask: SensorMask,
    pub algorithm: Algorithm,
}

impl std::str::FromStr for Setting {
    type Err = String;

    /// `MASK:CLF`, e.g. `EEG+GSR:svm`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (mask, alg) = s
            .rsplit_once(':')
            .ok_or_else(|| format!("expected MASK:CLF, got '{s}'"))?;
        Ok(Setting {
            mask: mask.parse()?,
            algorithm: alg.parse()?,
        })
    }
}

impl std::fmt::Display for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.mask, self.algorithm)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonOutcome {
    pub target: Target,
    pub a: Setting,
    pub b: Setting,
    pub f1_a: f64,
    pub f1_b: f64,
    pub mcnemar: McNemarResult,
}

fn evaluate_setting(
    cfg: &PipelineConfig,
    ds: &Dataset,
    s: Setting,
    target: Target,
) -> Result<EvaluationReport, CliError> {
    let projected =
        project_sensors(ds, s.mask).map_err(|e| CliError::Eval(EvalError::Feature(e)))?;
    Ok(evaluate(
        &cfg.classifiers.spec(s.algorithm),
        &projected,
        target,
        cfg.evaluation,
    )?)
}

/// Evaluate two settings on the same instances and test the difference;
/// writes `<out>/compare.json`.
pub fn cmd_compare(
    cfg: &PipelineConfig,
    features: &Path,
    a: Setting,
    b: Setting,
    target: Target,
) -> Result<(ComparisonOutcome, PathBuf), CliError> {
    cfg.validate()?;
    let ds = load_features(features)?;
    let ra = evaluate_setting(cfg, &ds, a, target)?;
    let rb = evaluate_setting(cfg, &ds, b, target)?;
    let outcome = ComparisonOutcome {
        target,
        a,
        b,
        f1_a: ra.f1(),
        f1_b: rb.f1(),
        mcnemar: mcnemar_test(&ra.predictions, &rb.predictions, cfg.mcnemar)?,
    };
    fs::create_dir_all(&cfg.out_dir).map_err(io_err(&cfg.out_dir))?;
    let path = cfg.out_dir.join("compare.json");
    let json = serde_json::to_string_pretty(&outcome).expect("outcome serializes") + "\n";
    fs::write(&path, json).map_err(io_err(&path))?;
    Ok((outcome, path))
}
