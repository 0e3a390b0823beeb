use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EEG_FEATURES, EMG_FEATURES, GSR_FEATURES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    Eeg,
    Gsr,
    Emg,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::Eeg, Block::Gsr, Block::Emg];

    pub fn size(self) -> usize {
        match self {
            Block::Eeg => EEG_FEATURES,
            Block::Gsr => GSR_FEATURES,
            Block::Emg => EMG_FEATURES,
        }
    }

    /// Position inside the full 58-value vector.
    pub fn range(self) -> Range<usize> {
        match self {
            Block::Eeg => 0..EEG_FEATURES,
            Block::Gsr => EEG_FEATURES..EEG_FEATURES + GSR_FEATURES,
            Block::Emg => EEG_FEATURES + GSR_FEATURES..EEG_FEATURES + GSR_FEATURES + EMG_FEATURES,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Block::Eeg => "EEG",
            Block::Gsr => "GSR",
            Block::Emg => "EMG",
        }
    }
}

/// Which sensor blocks a dataset or model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SensorMask {
    pub eeg: bool,
    pub gsr: bool,
    pub emg: bool,
}

impl SensorMask {
    pub const ALL: SensorMask = SensorMask::new(true, true, true);
    pub const EEG: SensorMask = SensorMask::new(true, false, false);
    pub const GSR: SensorMask = SensorMask::new(false, true, false);
    pub const EMG: SensorMask = SensorMask::new(false, false, true);

    pub const fn new(eeg: bool, gsr: bool, emg: bool) -> Self {
        SensorMask { eeg, gsr, emg }
    }

    /// The seven non-empty combinations: single sensors, then pairs, then all.
    pub const COMBINATIONS: [SensorMask; 7] = [
        SensorMask::new(true, false, false),
        SensorMask::new(false, true, false),
        SensorMask::new(false, false, true),
        SensorMask::new(true, true, false),
        SensorMask::new(false, true, true),
        SensorMask::new(true, false, true),
        SensorMask::new(true, true, true),
    ];

    pub fn has(self, block: Block) -> bool {
        match block {
            Block::Eeg => self.eeg,
            Block::Gsr => self.gsr,
            Block::Emg => self.emg,
        }
    }

    pub fn blocks(self) -> impl Iterator<Item = Block> {
        Block::ALL.into_iter().filter(move |b| self.has(*b))
    }

    pub fn is_empty(self) -> bool {
        !(self.eeg || self.gsr || self.emg)
    }

    pub fn is_subset_of(self, other: SensorMask) -> bool {
        Block::ALL.iter().all(|b| !self.has(*b) || other.has(*b))
    }

    /// Feature dimension: 35 per EEG, 13 per GSR, 10 per EMG block.
    pub fn dimension(self) -> usize {
        self.blocks().map(Block::size).sum()
    }

    /// Indices into the full 58-vector, in canonical order.
    pub fn full_indices(self) -> Vec<usize> {
        self.blocks().flat_map(Block::range).collect()
    }

    /// Where `block` sits inside a vector laid out by this mask.
    pub fn offset_of(self, block: Block) -> Option<usize> {
        if !self.has(block) {
            return None;
        }
        Some(
            self.blocks()
                .take_while(|b| *b != block)
                .map(Block::size)
                .sum(),
        )
    }
}

impl fmt::Display for SensorMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == SensorMask::ALL {
            return f.write_str("All");
        }
        let parts: Vec<&str> = self.blocks().map(Block::as_str).collect();
        if parts.is_empty() {
            f.write_str("None")
        } else {
            f.write_str(&parts.join("+"))
        }
    }
}

impl FromStr for SensorMask {
    type Err = String;

    /// Accepts `EEG`, `GSR+EMG`, `eeg,gsr`, `All`, case-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(SensorMask::ALL);
        }
        let mut mask = SensorMask::new(false, false, false);
        for part in s.split(['+', ',']) {
            match part.trim().to_ascii_uppercase().as_str() {
                "EEG" => mask.eeg = true,
                "GSR" => mask.gsr = true,
                "EMG" => mask.emg = true,
                other => return Err(format!("unknown sensor '{other}' in mask '{s}'")),
            }
        }
        Ok(mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(SensorMask::ALL.dimension(), 58);
        assert_eq!(SensorMask::EMG.dimension(), 10);
        assert_eq!("EEG+GSR".parse::<SensorMask>().unwrap().dimension(), 48);
        assert_eq!("EEG+EMG".parse::<SensorMask>().unwrap().dimension(), 45);
        assert_eq!("GSR+EMG".parse::<SensorMask>().unwrap().dimension(), 23);
        let dims: Vec<usize> = SensorMask::COMBINATIONS
            .iter()
            .map(|m| m.dimension())
            .collect();
        assert_eq!(dims, vec![35, 13, 10, 48, 23, 45, 58]);
    }

    #[test]
    fn parse_and_display() {
        for m in SensorMask::COMBINATIONS {
            assert_eq!(m.to_string().parse::<SensorMask>().unwrap(), m);
        }
        assert_eq!(
            "gsr,emg".parse::<SensorMask>().unwrap(),
            SensorMask::new(false, true, true)
        );
        assert!("EEG+PPG".parse::<SensorMask>().is_err());
    }

    #[test]
    fn offsets() {
        let m = SensorMask::new(true, false, true);
        assert_eq!(m.offset_of(Block::Eeg), Some(0));
        assert_eq!(m.offset_of(Block::Emg), Some(35));
        assert_eq!(m.offset_of(Block::Gsr), None);
        assert_eq!(SensorMask::GSR.full_indices(), (35..48).collect::<Vec<_>>());
    }
}
