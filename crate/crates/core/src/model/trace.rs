use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SensorKind {
    #[serde(rename = "EEG_raw")]
    EegRaw,
    #[serde(rename = "EEG_attention")]
    EegAttention,
    #[serde(rename = "EEG_meditation")]
    EegMeditation,
    #[serde(rename = "GSR")]
    Gsr,
    #[serde(rename = "EMG_ch1")]
    EmgCh1,
    #[serde(rename = "EMG_ch2")]
    EmgCh2,
}

impl SensorKind {
    pub const ALL: [SensorKind; 6] = [
        SensorKind::EegRaw,
        SensorKind::EegAttention,
        SensorKind::EegMeditation,
        SensorKind::Gsr,
        SensorKind::EmgCh1,
        SensorKind::EmgCh2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SensorKind::EegRaw => "EEG_raw",
            SensorKind::EegAttention => "EEG_attention",
            SensorKind::EegMeditation => "EEG_meditation",
            SensorKind::Gsr => "GSR",
            SensorKind::EmgCh1 => "EMG_ch1",
            SensorKind::EmgCh2 => "EMG_ch2",
        }
    }

    /// Nominal device rate in Hz.
    pub fn expected_rate_hz(self) -> f64 {
        match self {
            SensorKind::EegRaw | SensorKind::EmgCh1 | SensorKind::EmgCh2 => 512.0,
            SensorKind::Gsr => 128.0,
            SensorKind::EegAttention | SensorKind::EegMeditation => 1.0,
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            SensorKind::EegRaw => "uV",
            SensorKind::Gsr => "uS",
            SensorKind::EmgCh1 | SensorKind::EmgCh2 => "mV",
            SensorKind::EegAttention | SensorKind::EegMeditation => "",
        }
    }

    pub fn is_emg(self) -> bool {
        matches!(self, SensorKind::EmgCh1 | SensorKind::EmgCh2)
    }
}

impl fmt::Display for SensorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SensorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SensorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown sensor kind '{s}'"))
    }
}

/// One uniformly sampled sensor channel.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTrace {
    sensor_kind: SensorKind,
    sampling_rate_hz: f64,
    start_offset_s: f64,
    samples: Vec<f64>,
}

impl RawTrace {
    pub fn new(
        sensor_kind: SensorKind,
        sampling_rate_hz: f64,
        start_offset_s: f64,
        samples: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if !(sampling_rate_hz.is_finite() && sampling_rate_hz > 0.0) {
            return Err(ModelError::InvalidTrace(format!(
                "sampling rate {sampling_rate_hz}"
            )));
        }
        if !(start_offset_s.is_finite() && start_offset_s >= 0.0) {
            return Err(ModelError::InvalidTrace(format!(
                "start offset {start_offset_s}"
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::InvalidTrace(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(RawTrace {
            sensor_kind,
            sampling_rate_hz,
            start_offset_s,
            samples,
        })
    }

    pub fn sensor_kind(&self) -> SensorKind {
        self.sensor_kind
    }

    pub fn sampling_rate_hz(&self) -> f64 {
        self.sampling_rate_hz
    }

    pub fn start_offset_s(&self) -> f64 {
        self.start_offset_s
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sampling_rate_hz
    }

    /// Same metadata, new samples. Used by filters that preserve length.
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> RawTrace {
        debug_assert!(samples.iter().all(|v| v.is_finite()));
        RawTrace {
            samples,
            ..self.clone()
        }
    }
}

fn malformed(path: &Path, reason: impl Into<String>) -> ModelError {
    ModelError::MalformedTrace {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn parse_header(path: &Path, line: &str) -> Result<(SensorKind, f64), ModelError> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| malformed(path, "missing '# kind=... rate_hz=...' header"))?;
    let mut kind = None;
    let mut rate = None;
    for token in body.split_whitespace() {
        match token.split_once('=') {
            Some(("kind", v)) => {
                kind = Some(v.parse::<SensorKind>().map_err(|e| malformed(path, e))?)
            }
            Some(("rate_hz", v)) => {
                rate = Some(
                    v.parse::<f64>()
                        .map_err(|_| malformed(path, format!("bad rate '{v}'")))?,
                )
            }
            _ => {
                return Err(malformed(
                    path,
                    format!("unexpected header token '{token}'"),
                ))
            }
        }
    }
    match (kind, rate) {
        (Some(k), Some(r)) => Ok((k, r)),
        _ => Err(malformed(path, "header needs both kind= and rate_hz=")),
    }
}

/// Read a trace CSV: a `# kind=<kind> rate_hz=<rate>` header then one sample
/// per line. The header rate must equal the nominal rate for `sensor_kind`.
pub fn load_trace(path: &Path, sensor_kind: SensorKind) -> Result<RawTrace, ModelError> {
    let text = fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| malformed(path, "empty file"))?;
    let (kind, rate) = parse_header(path, header.trim())?;
    if kind != sensor_kind {
        return Err(malformed(
            path,
            format!("header declares {kind}, expected {sensor_kind}"),
        ));
    }
    let expected = sensor_kind.expected_rate_hz();
    if (rate - expected).abs() > 1e-9 * expected {
        return Err(ModelError::RateMismatch {
            path: path.to_path_buf(),
            kind,
            expected,
            found: rate,
        });
    }
    let mut samples = Vec::with_capacity(text.len() / 8);
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| malformed(path, format!("line {}: '{line}' is not a number", i + 2)))?;
        if !v.is_finite() {
            return Err(ModelError::NonFinite {
                path: path.to_path_buf(),
                line: i + 2,
            });
        }
        samples.push(v);
    }
    RawTrace::new(kind, rate, 0.0, samples)
}

pub fn write_trace(path: &Path, trace: &RawTrace) -> Result<(), ModelError> {
    let io_err = |source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(
        w,
        "# kind={} rate_hz={}",
        trace.sensor_kind(),
        trace.sampling_rate_hz()
    )
    .map_err(io_err)?;
    for v in trace.samples() {
        writeln!(w, "{v}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}
