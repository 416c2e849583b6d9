use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Sampling step of the meter data, in seconds.
pub const STEP_SECONDS: u32 = 300;

/// Samples in one day at [`STEP_SECONDS`].
pub const SAMPLES_PER_DAY: usize = 288;

/// One substation's aligned, gap-free measurements.
///
/// `start` is a Unix timestamp (UTC seconds) of the first sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstationSeries {
    pub id: String,
    pub start: i64,
    pub step: u32,
    pub supply: Vec<f64>,
    pub return_temp: Vec<f64>,
    pub flow: Vec<f64>,
    pub outdoor: Vec<f64>,
}

impl SubstationSeries {
    /// Validates that every channel has the same length and no missing values.
    pub fn new(
        id: String,
        start: i64,
        supply: Vec<f64>,
        return_temp: Vec<f64>,
        flow: Vec<f64>,
        outdoor: Vec<f64>,
    ) -> Result<Self> {
        for channel in [&return_temp, &flow, &outdoor] {
            if channel.len() != supply.len() {
                return Err(Error::LengthMismatch { left: supply.len(), right: channel.len() });
            }
        }
        for channel in [&supply, &return_temp, &flow, &outdoor] {
            if let Some(index) = channel.iter().position(|v| !v.is_finite()) {
                return Err(Error::MissingValue { id, index });
            }
        }
        Ok(Self { id, start, step: STEP_SECONDS, supply, return_temp, flow, outdoor })
    }

    pub fn len(&self) -> usize {
        self.supply.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supply.is_empty()
    }
}
