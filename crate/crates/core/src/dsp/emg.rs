use super::{DerivedSeries, DspError, SeriesKind};
use crate::model::RawTrace;

/// Linear envelope of a band-passed EMG channel: full-wave rectification
/// followed by a centred moving average of `window_s` seconds. Near the
/// edges the average runs over the samples that exist.
pub fn emg_envelope(emg: &RawTrace, window_s: f64) -> Result<DerivedSeries, DspError> {
    let kind = emg.sensor_kind();
    if !kind.is_emg() {
        return Err(DspError::WrongKind {
            expected: "EMG_ch1 or EMG_ch2",
            found: kind.to_string(),
        });
    }
    let fs = emg.sampling_rate_hz();
    let w = (window_s * fs).round() as usize;
    if w == 0 {
        return Err(DspError::BadParameter(format!(
            "EMG window {window_s} s is below one sample"
        )));
    }
    let x = emg.samples();
    if x.len() < w {
        return Err(DspError::TooShort {
            len: x.len(),
            needed: w,
        });
    }
    let half = w / 2;
    let mut prefix = Vec::with_capacity(x.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in x {
        acc += v.abs();
        prefix.push(acc);
    }
    let n = x.len();
    let values = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            ((prefix[hi] - prefix[lo]) / (hi - lo) as f64).max(0.0)
        })
        .collect();
    Ok(DerivedSeries::new(
        SeriesKind::EmgEnvelope(kind),
        fs,
        emg.start_offset_s(),
        values,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SensorKind;

    fn emg(x: Vec<f64>) -> RawTrace {
        RawTrace::new(SensorKind::EmgCh1, 512.0, 0.0, x).unwrap()
    }

    #[test]
    fn constants_either_sign() {
        for a in [0.7, -0.7] {
            let env = emg_envelope(&emg(vec![a; 2000]), 0.1).unwrap();
            assert_eq!(env.kind, SeriesKind::EmgEnvelope(SensorKind::EmgCh1));
            assert_eq!(env.rate_hz, 512.0);
            assert!(env.values.iter().all(|v| (v - 0.7).abs() < 1e-12));
        }
    }

    #[test]
    fn square_wave() {
        let a = 0.3;
        let x: Vec<f64> = (0..512 * 4)
            .map(|i| {
                let s = (2.0 * std::f64::consts::PI * 50.0 * i as f64 / 512.0).sin();
                if s >= 0.0 {
                    a
                } else {
                    -a
                }
            })
            .collect();
        let env = emg_envelope(&emg(x), 0.1).unwrap();
        for v in &env.values[60..env.len() - 60] {
            assert!((v - a).abs() <= 0.02 * a);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(
            emg_envelope(&emg(vec![1.0; 10]), 0.1),
            Err(DspError::TooShort { .. })
        ));
        let gsr = RawTrace::new(SensorKind::Gsr, 128.0, 0.0, vec![1.0; 1000]).unwrap();
        assert!(matches!(
            emg_envelope(&gsr, 0.1),
            Err(DspError::WrongKind { .. })
        ));
    }

    proptest::proptest! {
        #[test]
        fn non_negative(x in proptest::collection::vec(-5.0f64..5.0, 60..600)) {
            let env = emg_envelope(&emg(x), 0.1).unwrap();
            proptest::prop_assert!(env.values.iter().all(|v| *v >= 0.0));
        }
    }
}
