//! Session-level processing: load the six channels of a session, derive the
//! conditioned series, baseline-correct them per trial and compute one
//! feature vector per video.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::dsp::{
    band_powers, bandpass_filter, baseline_correct, detect_peaks, emg_envelope, gsr_decompose,
    wavelet_denoise, DerivedSeries, DspConfig, DspError, SeriesKind,
};
use crate::features::{
    eeg_features, emg_features, feature_window, gsr_features, FeatureError, FeatureVector,
    SessionFeatures,
};
use crate::model::{
    load_trace, segment_session, ModelError, ProtocolTimeline, RawTrace, SensorKind,
    SessionManifest,
};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("channel {kind} ({}): {source}", path.display())]
    Channel {
        kind: SensorKind,
        path: PathBuf,
        #[source]
        source: ModelError,
    },
    #[error("subject {subject_id}: channel {kind} covers {found_s:.3} s, the protocol needs {needed_s:.3} s")]
    TraceTooShort {
        subject_id: String,
        kind: SensorKind,
        found_s: f64,
        needed_s: f64,
    },
    #[error("subject {subject_id}: missing channel {kind}")]
    MissingChannel {
        subject_id: String,
        kind: SensorKind,
    },
    #[error("subject {subject_id}, {stage}: {source}")]
    Dsp {
        subject_id: String,
        stage: &'static str,
        #[source]
        source: DspError,
    },
    #[error("subject {subject_id}, video {video_id}: {source}")]
    Feature {
        subject_id: String,
        video_id: u32,
        #[source]
        source: FeatureError,
    },
}

/// All raw channels of one session plus its protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionTraces {
    pub subject_id: String,
    pub timeline: ProtocolTimeline,
    pub traces: BTreeMap<SensorKind, RawTrace>,
}

impl SessionTraces {
    pub fn trace(&self, kind: SensorKind) -> Result<&RawTrace, PipelineError> {
        self.traces
            .get(&kind)
            .ok_or_else(|| PipelineError::MissingChannel {
                subject_id: self.subject_id.clone(),
                kind,
            })
    }
}

/// Read every channel listed in a manifest. Errors name the failing channel and file.
pub fn load_session(manifest: &SessionManifest) -> Result<SessionTraces, PipelineError> {
    let mut traces = BTreeMap::new();
    for kind in SensorKind::ALL {
        let path = manifest.channel(kind);
        let trace = load_trace(path, kind).map_err(|source| PipelineError::Channel {
            kind,
            path: path.to_path_buf(),
            source,
        })?;
        traces.insert(kind, trace);
    }
    Ok(SessionTraces {
        subject_id: manifest.subject_id.clone(),
        timeline: manifest.timeline.clone(),
        traces,
    })
}

/// Session-long derived series, before baseline correction.
#[derive(Debug, Clone)]
pub struct DerivedSession {
    pub eeg: Vec<DerivedSeries>,
    pub phasic: DerivedSeries,
    pub denoised: DerivedSeries,
    pub emg: [DerivedSeries; 2],
}

pub fn derive_series(
    session: &SessionTraces,
    cfg: &DspConfig,
) -> Result<DerivedSession, PipelineError> {
    let sid = &session.subject_id;
    let dsp = |stage: &'static str| {
        move |source: DspError| PipelineError::Dsp {
            subject_id: sid.clone(),
            stage,
            source,
        }
    };

    let needed = session.timeline.session_duration_s();
    for (kind, trace) in &session.traces {
        // allow one sample of slack for rate rounding
        if trace.start_offset_s() + trace.duration_s() + 1.0 / trace.sampling_rate_hz() < needed {
            return Err(PipelineError::TraceTooShort {
                subject_id: sid.clone(),
                kind: *kind,
                found_s: trace.duration_s(),
                needed_s: needed,
            });
        }
    }

    let mut eeg = band_powers(session.trace(SensorKind::EegRaw)?, &cfg.bands)
        .map_err(dsp("EEG band power"))?;
    for (kind, series_kind) in [
        (SensorKind::EegAttention, SeriesKind::Attention),
        (SensorKind::EegMeditation, SeriesKind::Meditation),
    ] {
        let t = session.trace(kind)?;
        eeg.push(DerivedSeries::new(
            series_kind,
            t.sampling_rate_hz(),
            t.start_offset_s(),
            t.samples().to_vec(),
        ));
    }

    let (_, phasic) = gsr_decompose(session.trace(SensorKind::Gsr)?, cfg.gsr_tonic_cutoff_hz)
        .map_err(dsp("GSR decomposition"))?;
    let denoised = wavelet_denoise(&phasic, &cfg.wavelet).map_err(dsp("GSR wavelet denoising"))?;

    let envelope = |kind: SensorKind| -> Result<DerivedSeries, PipelineError> {
        let (lo, hi) = cfg.emg_band_hz;
        let filtered = bandpass_filter(session.trace(kind)?, lo, hi, cfg.emg_filter_order)
            .map_err(dsp("EMG band-pass"))?;
        emg_envelope(&filtered, cfg.emg_window_s).map_err(dsp("EMG envelope"))
    };
    let emg = [envelope(SensorKind::EmgCh1)?, envelope(SensorKind::EmgCh2)?];

    Ok(DerivedSession {
        eeg,
        phasic,
        denoised,
        emg,
    })
}

/// Cut each derived series to the trial, subtract its baseline mean and
/// compute the 58 features over the last 30 s of every video in the trial.
pub fn extract_features(
    session: &SessionTraces,
    derived: &DerivedSession,
    cfg: &DspConfig,
) -> Result<SessionFeatures, PipelineError> {
    let sid = &session.subject_id;
    let mut rows = Vec::new();
    for trial in segment_session(&session.timeline) {
        let extent = crate::model::Window::new(
            trial.trial_start_s,
            trial.trial_start_s + session.timeline.trial_duration_s(),
        );
        let correct = |s: &DerivedSeries| {
            baseline_correct(&s.slice(extent), trial.baseline).map_err(|source| {
                PipelineError::Dsp {
                    subject_id: sid.clone(),
                    stage: "baseline correction",
                    source,
                }
            })
        };
        let eeg = derived
            .eeg
            .iter()
            .map(correct)
            .collect::<Result<Vec<_>, _>>()?;
        let phasic = correct(&derived.phasic)?;
        let denoised = correct(&derived.denoised)?;
        let emg1 = correct(&derived.emg[0])?;
        let emg2 = correct(&derived.emg[1])?;

        for video in &trial.videos {
            let fw = feature_window(video.window);
            let feature_err = |source| PipelineError::Feature {
                subject_id: sid.clone(),
                video_id: video.video_id,
                source,
            };
            let peaks = detect_peaks(
                &denoised.slice(fw),
                cfg.peak_prominence_factor,
                cfg.peak_min_prominence_us,
            )
            .map_err(|source| PipelineError::Dsp {
                subject_id: sid.clone(),
                stage: "peak detection",
                source,
            })?;
            let e = eeg_features(&eeg, fw).map_err(feature_err)?;
            let g = gsr_features(&phasic, &denoised, &peaks, fw).map_err(feature_err)?;
            let m = emg_features(&emg1, &emg2, fw).map_err(feature_err)?;
            rows.push((video.video_id, FeatureVector::from_blocks(&e, &g, &m)));
        }
    }
    Ok(SessionFeatures {
        subject_id: sid.clone(),
        rows,
    })
}

/// Derive, correct and extract in one go.
pub fn process_session(
    session: &SessionTraces,
    cfg: &DspConfig,
) -> Result<SessionFeatures, PipelineError> {
    let derived = derive_series(session, cfg)?;
    extract_features(session, &derived, cfg)
}
