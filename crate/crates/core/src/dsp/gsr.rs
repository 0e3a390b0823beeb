use super::filter::butter_lowpass;
use super::{DerivedSeries, DspError, SeriesKind};
use crate::model::{RawTrace, SensorKind};

/// Split skin conductance into a slow tonic level (zero-phase 2nd-order
/// Butterworth low-pass at `tonic_cutoff_hz`) and the phasic residual.
/// `tonic + phasic` reproduces the input sample by sample.
pub fn gsr_decompose(
    gsr: &RawTrace,
    tonic_cutoff_hz: f64,
) -> Result<(DerivedSeries, DerivedSeries), DspError> {
    if gsr.sensor_kind() != SensorKind::Gsr {
        return Err(DspError::WrongKind {
            expected: "GSR",
            found: gsr.sensor_kind().to_string(),
        });
    }
    let fs = gsr.sampling_rate_hz();
    let sos = butter_lowpass(2, tonic_cutoff_hz, fs)?;
    let tonic = sos.filtfilt(gsr.samples(), 3 * sos.order())?;
    let phasic: Vec<f64> = gsr
        .samples()
        .iter()
        .zip(&tonic)
        .map(|(x, t)| x - t)
        .collect();
    let t0 = gsr.start_offset_s();
    Ok((
        DerivedSeries::new(SeriesKind::GsrTonic, fs, t0, tonic),
        DerivedSeries::new(SeriesKind::GsrPhasic, fs, t0, phasic),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gsr(x: Vec<f64>) -> RawTrace {
        RawTrace::new(SensorKind::Gsr, 128.0, 0.0, x).unwrap()
    }

    #[test]
    fn constant_goes_to_tonic() {
        let (tonic, phasic) = gsr_decompose(&gsr(vec![4.2; 128 * 60]), 0.05).unwrap();
        assert!(tonic.values.iter().all(|v| (v - 4.2).abs() <= 1e-6));
        assert!(phasic.values.iter().all(|v| v.abs() <= 1e-6));
    }

    #[test]
    fn pulse_lands_in_phasic() {
        // slow ramp 2 -> 3 uS over 120 s plus a 1 s raised-cosine pulse of 0.5 uS at t = 60 s
        let n = 128 * 120;
        let pulse = |i: usize| {
            let u = (i as f64 - 128.0 * 60.0) / 128.0;
            if (0.0..1.0).contains(&u) {
                0.25 * (1.0 - (2.0 * std::f64::consts::PI * u).cos())
            } else {
                0.0
            }
        };
        let ramp = |i: usize| 2.0 + i as f64 / n as f64;
        let with_pulse: Vec<f64> = (0..n).map(|i| ramp(i) + pulse(i)).collect();
        let ramp_only: Vec<f64> = (0..n).map(ramp).collect();
        let (tonic, phasic) = gsr_decompose(&gsr(with_pulse), 0.05).unwrap();
        let (_, phasic_ramp) = gsr_decompose(&gsr(ramp_only), 0.05).unwrap();

        // The decomposition is linear, so the pulse's own phasic response is
        // the difference of the two runs.
        let pulse_energy: f64 = (0..n).map(|i| pulse(i).powi(2)).sum();
        let phasic_energy: f64 = (0..n)
            .map(|i| (phasic.values[i] - phasic_ramp.values[i]).powi(2))
            .sum();
        assert!(
            phasic_energy / pulse_energy >= 0.9,
            "{}",
            phasic_energy / pulse_energy
        );
        let bump = tonic.values[128 * 60 + 64] - ramp(128 * 60 + 64);
        assert!(bump.abs() < 0.05, "{bump}");
    }

    #[test]
    fn wrong_kind_and_short() {
        let eeg = RawTrace::new(SensorKind::EegRaw, 512.0, 0.0, vec![0.0; 1000]).unwrap();
        assert!(matches!(
            gsr_decompose(&eeg, 0.05),
            Err(DspError::WrongKind { .. })
        ));
        assert!(matches!(
            gsr_decompose(&gsr(vec![1.0; 4]), 0.05),
            Err(DspError::TooShort { .. })
        ));
    }

    proptest::proptest! {
        #[test]
        fn additive_reconstruction(x in proptest::collection::vec(0.0f64..40.0, 16..2000)) {
            let (tonic, phasic) = gsr_decompose(&gsr(x.clone()), 0.05).unwrap();
            for ((t, p), v) in tonic.values.iter().zip(&phasic.values).zip(&x) {
                proptest::prop_assert!((t + p - v).abs() <= 1e-12 * v.abs().max(1.0));
            }
        }
    }
}
