pub mod classify;
pub mod cli;
pub mod dsp;
pub mod eval;
pub mod features;
pub mod model;
pub mod pipeline;
pub mod synth;
