//! Seeded synthetic sessions: band-limited EEG with valence-dependent alpha
//! power, GSR with bi-exponential SCRs whose rate rises with arousal, EMG
//! bursts scaled by arousal and bounded attention/meditation walks.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::model::{
    segment_session, serialize_manifest, write_trace, Class, ModelError, ProtocolTimeline,
    RawTrace, SensorKind, SessionManifest, VideoLabelTable, Window,
};
use crate::pipeline::SessionTraces;

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid modulation spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Signal shapes and background levels. Defaults give plausible magnitudes
/// (µV for EEG/EMG, µS for GSR).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignalModel {
    /// RMS per band: delta, theta, alpha, beta, gamma.
    pub eeg_band_rms_uv: [f64; 5],
    pub eeg_noise_rms_uv: f64,
    pub tonic_level_us: (f64, f64),
    pub tonic_drift_us: f64,
    pub scr_rise_s: f64,
    pub scr_decay_s: f64,
    pub scr_base_rate_per_min: f64,
    /// Each pulse's height is drawn uniformly from this range.
    pub scr_amplitude_us: (f64, f64),
    pub gsr_noise_rms_us: f64,
    pub emg_noise_rms_uv: f64,
    pub emg_burst_rate_per_min: f64,
    pub emg_burst_duration_s: (f64, f64),
    pub emg_burst_rms_uv: f64,
    pub esense_step_sd: f64,
}

impl Default for SignalModel {
    fn default() -> Self {
        SignalModel {
            eeg_band_rms_uv: [12.0, 7.0, 8.0, 4.0, 2.0],
            eeg_noise_rms_uv: 1.0,
            tonic_level_us: (2.0, 10.0),
            tonic_drift_us: 0.4,
            scr_rise_s: 1.0,
            scr_decay_s: 3.0,
            scr_base_rate_per_min: 1.0,
            scr_amplitude_us: (0.2, 0.6),
            gsr_noise_rms_us: 0.005,
            emg_noise_rms_uv: 4.0,
            emg_burst_rate_per_min: 4.0,
            emg_burst_duration_s: (0.4, 1.2),
            emg_burst_rms_uv: 30.0,
            esense_step_sd: 3.0,
        }
    }
}

/// How strongly labels shape the signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModulationSpec {
    /// Extra SCR pulses per minute during High-arousal videos.
    pub arousal_gsr_gain: f64,
    /// Burst amplitude is multiplied by `1 + gain` during High-arousal videos.
    pub arousal_emg_gain: f64,
    /// Alpha power is multiplied by `1 + gain` during High-valence videos.
    pub valence_alpha_gain: f64,
    /// Scales the additive sensor noise on every channel.
    pub noise_level: f64,
    pub seed: u64,
    pub signal: SignalModel,
}

impl Default for ModulationSpec {
    fn default() -> Self {
        ModulationSpec {
            arousal_gsr_gain: 0.0,
            arousal_emg_gain: 0.0,
            valence_alpha_gain: 0.0,
            noise_level: 1.0,
            seed: 0,
            signal: SignalModel::default(),
        }
    }
}

impl ModulationSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        if !(self.arousal_gsr_gain.is_finite() && self.arousal_gsr_gain >= 0.0) {
            return bad(format!("arousal_gsr_gain = {}", self.arousal_gsr_gain));
        }
        if !(self.arousal_emg_gain.is_finite() && self.arousal_emg_gain >= 0.0) {
            return bad(format!("arousal_emg_gain = {}", self.arousal_emg_gain));
        }
        if !(self.valence_alpha_gain.is_finite() && self.valence_alpha_gain > -1.0) {
            return bad(format!(
                "valence_alpha_gain = {} (must exceed -1)",
                self.valence_alpha_gain
            ));
        }
        if !(self.noise_level.is_finite() && self.noise_level > 0.0) {
            return bad(format!("noise_level = {}", self.noise_level));
        }
        let s = &self.signal;
        if !(s.scr_rise_s > 0.0 && s.scr_decay_s > s.scr_rise_s) {
            return bad("SCR decay must be slower than its rise".into());
        }
        if s.scr_base_rate_per_min < 0.0 || s.emg_burst_rate_per_min < 0.0 {
            return bad("event rates must be non-negative".into());
        }
        Ok(())
    }
}

/// Per-channel RNG seed from the run seed, subject and channel name (FNV-1a).
fn stream_seed(seed: u64, subject_id: &str, channel: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in subject_id.bytes().chain([0u8]).chain(channel.bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Class of each video window for one target, in session time.
fn labelled_windows(
    timeline: &ProtocolTimeline,
    table: &VideoLabelTable,
    arousal: bool,
) -> Vec<(Window, Class)> {
    segment_session(timeline)
        .iter()
        .flat_map(|t| t.videos.iter())
        .filter_map(|v| {
            let (val, aro) = table.lookup(v.video_id).ok()?;
            let class = if arousal { aro.class() } else { val.class() }?;
            Some((v.window, class))
        })
        .collect()
}

fn high_at(windows: &[(Window, Class)], t: f64) -> bool {
    windows
        .iter()
        .any(|(w, c)| *c == Class::High && w.contains(t))
}

/// White noise restricted to `[low, high)` Hz by spectral masking, scaled to
/// unit RMS.
fn band_noise(
    rng: &mut ChaCha8Rng,
    n: usize,
    rate: f64,
    bands: &[(f64, f64)],
    planner: &mut FftPlanner<f64>,
) -> Vec<Vec<f64>> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut spectrum: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(normal.sample(rng), 0.0))
        .collect();
    planner.plan_fft_forward(n).process(&mut spectrum);
    let inverse = planner.plan_fft_inverse(n);
    bands
        .iter()
        .map(|&(lo, hi)| {
            let mut s: Vec<Complex<f64>> = spectrum
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let f = k.min(n - k) as f64 * rate / n as f64;
                    if f >= lo && f < hi {
                        *c
                    } else {
                        Complex::new(0.0, 0.0)
                    }
                })
                .collect();
            inverse.process(&mut s);
            let x: Vec<f64> = s.iter().map(|c| c.re).collect();
            let rms = (x.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
            x.into_iter()
                .map(|v| if rms > 0.0 { v / rms } else { 0.0 })
                .collect()
        })
        .collect()
}

/// Event onsets of a Poisson process whose rate (per minute) is
/// `base + extra` inside High windows and `base` elsewhere.
fn poisson_onsets(
    rng: &mut ChaCha8Rng,
    duration_s: f64,
    base_per_min: f64,
    extra_per_min: f64,
    windows: &[(Window, Class)],
) -> Vec<f64> {
    // piecewise-constant rate: walk the boundaries
    let mut cuts: Vec<f64> = vec![0.0, duration_s];
    for (w, _) in windows {
        cuts.push(w.start_s.clamp(0.0, duration_s));
        cuts.push(w.end_s.clamp(0.0, duration_s));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut onsets = Vec::new();
    for seg in cuts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let mid = (a + b) / 2.0;
        let rate = (base_per_min
            + if high_at(windows, mid) {
                extra_per_min
            } else {
                0.0
            })
            / 60.0;
        if rate <= 0.0 {
            continue;
        }
        let gap = Exp::new(rate).expect("positive rate");
        let mut t = a + gap.sample(rng);
        while t < b {
            onsets.push(t);
            t += gap.sample(rng);
        }
    }
    onsets
}

/// Bi-exponential SCR shape with unit peak; `t` seconds after onset.
pub fn scr_shape(t: f64, rise_s: f64, decay_s: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let raw = |t: f64| (-t / decay_s).exp() - (-t / rise_s).exp();
    let t_peak = (decay_s / rise_s).ln() * rise_s * decay_s / (decay_s - rise_s);
    raw(t) / raw(t_peak)
}

fn samples(duration_s: f64, rate: f64) -> usize {
    (duration_s * rate).round() as usize
}

fn gen_eeg(
    spec: &ModulationSpec,
    n: usize,
    rate: f64,
    valence: &[(Window, Class)],
    rng: &mut ChaCha8Rng,
    planner: &mut FftPlanner<f64>,
) -> Vec<f64> {
    let s = &spec.signal;
    let bands = [
        (0.5, 4.0),
        (4.0, 7.5),
        (8.0, 12.5),
        (13.0, 30.0),
        (30.0, 100.0),
    ];
    let comps = band_noise(rng, n, rate, &bands, planner);
    let alpha_boost = (1.0 + spec.valence_alpha_gain).sqrt();
    let noise = Normal::new(0.0, s.eeg_noise_rms_uv * spec.noise_level).expect("finite sd");
    (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            let mut v = 0.0;
            for (b, comp) in comps.iter().enumerate() {
                let mut amp = s.eeg_band_rms_uv[b];
                if b == 2 && high_at(valence, t) {
                    amp *= alpha_boost;
                }
                v += amp * comp[i];
            }
            v + noise.sample(rng)
        })
        .collect()
}

fn gen_gsr(
    spec: &ModulationSpec,
    n: usize,
    rate: f64,
    arousal: &[(Window, Class)],
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let s = &spec.signal;
    let duration = n as f64 / rate;
    let level = rng.random_range(s.tonic_level_us.0..=s.tonic_level_us.1);
    // three slow sinusoids with periods of 100 to 400 s
    let drift: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(0.3..1.0) * s.tonic_drift_us,
                1.0 / rng.random_range(100.0..400.0),
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            level
                + drift
                    .iter()
                    .map(|(a, f, ph)| a * (2.0 * PI * f * t + ph).sin())
                    .sum::<f64>()
        })
        .collect();
    let onsets = poisson_onsets(
        rng,
        duration,
        s.scr_base_rate_per_min,
        spec.arousal_gsr_gain,
        arousal,
    );
    let tail = 10.0 * s.scr_decay_s;
    for onset in onsets {
        let amp = rng.random_range(s.scr_amplitude_us.0..=s.scr_amplitude_us.1);
        let first = (onset * rate).ceil() as usize;
        let last = (((onset + tail) * rate) as usize).min(n);
        for (i, v) in x.iter_mut().enumerate().take(last).skip(first) {
            *v += amp * scr_shape(i as f64 / rate - onset, s.scr_rise_s, s.scr_decay_s);
        }
    }
    let noise = Normal::new(0.0, s.gsr_noise_rms_us * spec.noise_level).expect("finite sd");
    // conductance cannot go negative
    x.into_iter()
        .map(|v| (v + noise.sample(rng)).max(0.01))
        .collect()
}

fn gen_emg(
    spec: &ModulationSpec,
    n: usize,
    rate: f64,
    arousal: &[(Window, Class)],
    rng: &mut ChaCha8Rng,
    planner: &mut FftPlanner<f64>,
) -> Vec<f64> {
    let s = &spec.signal;
    let comps = band_noise(rng, n, rate, &[(20.0, 125.0), (20.0, 125.0)], planner);
    let mut envelope = vec![0.0; n];
    let onsets = poisson_onsets(rng, n as f64 / rate, s.emg_burst_rate_per_min, 0.0, &[]);
    for onset in onsets {
        let dur = rng.random_range(s.emg_burst_duration_s.0..=s.emg_burst_duration_s.1);
        let mut amp = s.emg_burst_rms_uv * rng.random_range(0.5..=1.5);
        if high_at(arousal, onset) {
            amp *= 1.0 + spec.arousal_emg_gain;
        }
        let first = (onset * rate).ceil() as usize;
        let last = (((onset + dur) * rate) as usize).min(n);
        for (i, e) in envelope.iter_mut().enumerate().take(last).skip(first) {
            let phase = (i as f64 / rate - onset) / dur;
            *e += amp * (PI * phase).sin().powi(2);
        }
    }
    let floor = s.emg_noise_rms_uv * spec.noise_level;
    (0..n)
        .map(|i| floor * comps[0][i] + envelope[i] * comps[1][i])
        .collect()
}

fn gen_esense(spec: &ModulationSpec, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let step = Normal::new(0.0, spec.signal.esense_step_sd).expect("finite sd");
    let mut v: f64 = rng.random_range(30.0..70.0);
    (0..n)
        .map(|_| {
            v += step.sample(rng);
            // reflect at the bounds
            if v < 0.0 {
                v = -v;
            }
            if v > 100.0 {
                v = 200.0 - v;
            }
            v = v.clamp(0.0, 100.0);
            v.round()
        })
        .collect()
}

/// Generate all six channels of one session.
pub fn generate_session(
    subject_id: &str,
    timeline: &ProtocolTimeline,
    table: &VideoLabelTable,
    spec: &ModulationSpec,
) -> Result<SessionTraces, SynthError> {
    spec.validate()?;
    timeline.validate(table)?;
    let duration = timeline.session_duration_s();
    let valence = labelled_windows(timeline, table, false);
    let arousal = labelled_windows(timeline, table, true);
    let mut planner = FftPlanner::new();
    let mut traces = BTreeMap::new();
    for kind in SensorKind::ALL {
        let rate = kind.expected_rate_hz();
        let n = samples(duration, rate);
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(spec.seed, subject_id, kind.as_str()));
        let x = match kind {
            SensorKind::EegRaw => gen_eeg(spec, n, rate, &valence, &mut rng, &mut planner),
            SensorKind::EegAttention | SensorKind::EegMeditation => gen_esense(spec, n, &mut rng),
            SensorKind::Gsr => gen_gsr(spec, n, rate, &arousal, &mut rng),
            SensorKind::EmgCh1 | SensorKind::EmgCh2 => {
                gen_emg(spec, n, rate, &arousal, &mut rng, &mut planner)
            }
        };
        traces.insert(kind, RawTrace::new(kind, rate, 0.0, x)?);
    }
    Ok(SessionTraces {
        subject_id: subject_id.to_string(),
        timeline: timeline.clone(),
        traces,
    })
}

/// File name used for one channel of a written session.
pub fn trace_file_name(subject_id: &str, kind: SensorKind) -> String {
    format!("{subject_id}_{kind}.csv")
}

/// Write every trace next to a `<subject>.json` manifest in `dir` and return
/// the manifest path. Channel paths in the manifest are relative to `dir`.
pub fn write_session(
    dir: &Path,
    session: &SessionTraces,
    session_start: &str,
) -> Result<PathBuf, SynthError> {
    fs::create_dir_all(dir).map_err(|source| SynthError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut channels = BTreeMap::new();
    for (kind, trace) in &session.traces {
        let name = trace_file_name(&session.subject_id, *kind);
        write_trace(&dir.join(&name), trace)?;
        channels.insert(*kind, PathBuf::from(name));
    }
    let manifest = SessionManifest {
        subject_id: session.subject_id.clone(),
        channels,
        timeline: session.timeline.clone(),
        session_start: session_start.to_string(),
    };
    let path = dir.join(format!("{}.json", session.subject_id));
    fs::write(&path, serialize_manifest(&manifest) + "\n").map_err(|source| SynthError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Conventional subject ids `s01`, `s02`, ...
pub fn subject_ids(count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("s{i:02}")).collect()
}
