use super::{summary_stats, FeatureError, EEG_FEATURES, EMG_FEATURES, GSR_FEATURES};
use crate::dsp::{BandName, DerivedSeries, PeakSet, SeriesKind};
use crate::model::{SensorKind, Window};

/// Length of the analysed tail of each video.
pub const FEATURE_WINDOW_S: f64 = 30.0;

/// The EEG series in feature order.
pub const EEG_SERIES: [SeriesKind; 7] = [
    SeriesKind::BandPower(BandName::Alpha),
    SeriesKind::BandPower(BandName::Beta),
    SeriesKind::BandPower(BandName::Gamma),
    SeriesKind::BandPower(BandName::Delta),
    SeriesKind::BandPower(BandName::Theta),
    SeriesKind::Attention,
    SeriesKind::Meditation,
];

/// The last 30 s of a video window.
pub fn feature_window(video: Window) -> Window {
    Window::new(
        (video.end_s - FEATURE_WINDOW_S).max(video.start_s),
        video.end_s,
    )
}

fn find(series: &[DerivedSeries], kind: SeriesKind) -> Result<&DerivedSeries, FeatureError> {
    series
        .iter()
        .find(|s| s.kind == kind)
        .ok_or_else(|| FeatureError::MissingSeries(format!("{kind:?}")))
}

fn window_stats(series: &DerivedSeries, window: Window) -> Result<[f64; 5], FeatureError> {
    Ok(summary_stats(series.values_in(window))?.to_array())
}

/// 7 series x (mean, min, max, variance, std).
pub fn eeg_features(
    series: &[DerivedSeries],
    window: Window,
) -> Result<[f64; EEG_FEATURES], FeatureError> {
    let mut out = [0.0; EEG_FEATURES];
    for (chunk, kind) in out.chunks_exact_mut(5).zip(EEG_SERIES) {
        chunk.copy_from_slice(&window_stats(find(series, kind)?, window)?);
    }
    Ok(out)
}

/// Phasic statistics, derivative features of the denoised phasic, and peak
/// features. `peaks` should come from the same window.
pub fn gsr_features(
    phasic: &DerivedSeries,
    denoised: &DerivedSeries,
    peaks: &PeakSet,
    window: Window,
) -> Result<[f64; GSR_FEATURES], FeatureError> {
    if phasic.kind != SeriesKind::GsrPhasic {
        return Err(FeatureError::MissingSeries("GsrPhasic".into()));
    }
    if denoised.kind != SeriesKind::GsrPhasicDenoised {
        return Err(FeatureError::MissingSeries("GsrPhasicDenoised".into()));
    }
    let mut out = [0.0; GSR_FEATURES];
    out[..5].copy_from_slice(&window_stats(phasic, window)?);

    let d = denoised.values_in(window);
    if d.is_empty() {
        return Err(FeatureError::EmptyWindow);
    }
    let derivs: Vec<f64> = d
        .windows(2)
        .map(|w| (w[1] - w[0]) * denoised.rate_hz)
        .collect();
    let negative: Vec<f64> = derivs.iter().copied().filter(|v| *v < 0.0).collect();
    let mean = |v: &[f64]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    out[5] = mean(&derivs);
    out[6] = mean(&negative);
    out[7] = if derivs.is_empty() {
        0.0
    } else {
        negative.len() as f64 / derivs.len() as f64
    };

    if !peaks.is_empty() {
        let widths: Vec<f64> = peaks.peaks.iter().map(|p| p.width_s).collect();
        let w = summary_stats(&widths)?;
        let amp_sum: f64 = peaks.peaks.iter().map(|p| p.amplitude).sum();
        out[8] = w.mean;
        out[9] = w.min;
        out[10] = w.max;
        out[11] = peaks.len() as f64 / w.min;
        out[12] = amp_sum / w.min;
    }
    Ok(out)
}

/// Envelope statistics for channel 1 then channel 2.
pub fn emg_features(
    envelope_ch1: &DerivedSeries,
    envelope_ch2: &DerivedSeries,
    window: Window,
) -> Result<[f64; EMG_FEATURES], FeatureError> {
    let mut out = [0.0; EMG_FEATURES];
    for (chunk, (env, ch)) in out.chunks_exact_mut(5).zip([
        (envelope_ch1, SensorKind::EmgCh1),
        (envelope_ch2, SensorKind::EmgCh2),
    ]) {
        if env.kind != SeriesKind::EmgEnvelope(ch) {
            return Err(FeatureError::MissingSeries(format!("EmgEnvelope({ch})")));
        }
        chunk.copy_from_slice(&window_stats(env, window)?);
    }
    Ok(out)
}
