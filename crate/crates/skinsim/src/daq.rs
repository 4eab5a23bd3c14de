//! The electrical acquisition chain: per-taxel voltage divider, 10-bit ADC,
//! multiplexed whole-array scans.
//!
//! The divider reads the voltage across the taxel, so the digital code is
//! `floor(2^bits * R_tax / (R_div + R_tax))` and *loading decreases the
//! code* (pressure lowers `R_tax`). Downstream processing works on the
//! magnitude of deviation from a baseline, which keeps that sign convention
//! local to this module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::SkinLayout;
use crate::rng::{derive_seed, SeedDomain};
use crate::substrate::{SubstrateModel, SubstrateState};

/// Divider network constants, converter width and scan timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionConfig {
    /// Regulated supply voltage, volts.
    pub v_in: f64,
    /// Divider reference resistance, ohms.
    pub r_div: f64,
    /// Converter width in bits.
    pub adc_bits: u32,
    /// Full-array frames per second.
    pub scan_rate: f64,
    /// Number of taxels per frame.
    pub taxel_count: usize,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        AcquisitionConfig {
            v_in: 5.0,
            r_div: 5_100.0,
            adc_bits: 10,
            scan_rate: 100.0,
            taxel_count: 34,
        }
    }
}

impl AcquisitionConfig {
    pub fn for_layout(layout: &SkinLayout) -> AcquisitionConfig {
        AcquisitionConfig {
            taxel_count: layout.len(),
            ..AcquisitionConfig::default()
        }
    }

    /// Full-scale count, `2^adc_bits`.
    pub fn full_scale(&self) -> u32 {
        1u32 << self.adc_bits
    }

    /// Largest representable code, `2^adc_bits - 1`.
    pub fn max_code(&self) -> u16 {
        (self.full_scale() - 1) as u16
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_in.is_finite() && self.v_in > 0.0) {
            return Err(Error::domain("v_in must be > 0"));
        }
        if !(self.r_div.is_finite() && self.r_div > 0.0) {
            return Err(Error::domain("r_div must be > 0"));
        }
        if self.adc_bits == 0 || self.adc_bits > 16 {
            return Err(Error::domain("adc_bits must be in 1..=16"));
        }
        if !(self.scan_rate.is_finite() && self.scan_rate > 0.0) {
            return Err(Error::domain("scan_rate must be > 0"));
        }
        if self.taxel_count == 0 {
            return Err(Error::domain("taxel_count must be > 0"));
        }
        Ok(())
    }
}

/// One timestamped full-array scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    /// 16-bit sequence number; wraps.
    pub seq: u16,
    /// Seconds since stream start.
    pub t: f64,
    /// Per-taxel ADC counts.
    pub values: Vec<u16>,
}

/// Divider + converter: code for one taxel resistance.
pub fn adc_code(r_tax: f64, cfg: &AcquisitionConfig) -> Result<u16> {
    if !r_tax.is_finite() || r_tax < 0.0 {
        return Err(Error::domain(format!(
            "taxel resistance must be finite and >= 0, got {r_tax}"
        )));
    }
    cfg.validate()?;
    let fs = cfg.full_scale() as f64;
    let code = (fs * r_tax / (cfg.r_div + r_tax)).floor();
    Ok(code.min(cfg.max_code() as f64) as u16)
}

/// Multiplexed scanner over an array of taxels sharing one substrate model.
///
/// All taxels are sampled at one instant per frame (no intra-mux skew). The
/// scanner substeps the substrate integration internally whenever the frame
/// period exceeds the model's `tau_min/5` bound, so any scan rate is valid.
#[derive(Debug, Clone)]
pub struct Scanner {
    model: SubstrateModel,
    cfg: AcquisitionConfig,
    states: Vec<SubstrateState>,
    frame_index: u64,
}

impl Scanner {
    pub fn new(
        model: SubstrateModel,
        layout: &SkinLayout,
        cfg: AcquisitionConfig,
        seed: u64,
    ) -> Result<Scanner> {
        model.validate()?;
        cfg.validate()?;
        layout.validate()?;
        if cfg.taxel_count != layout.len() {
            return Err(Error::contract(format!(
                "config expects {} taxels, layout has {}",
                cfg.taxel_count,
                layout.len()
            )));
        }
        let states = (0..layout.len())
            .map(|i| {
                SubstrateState::at_rest(&model, derive_seed(seed, SeedDomain::TaxelNoise, i as u64))
            })
            .collect();
        Ok(Scanner {
            model,
            cfg,
            states,
            frame_index: 0,
        })
    }

    pub fn config(&self) -> &AcquisitionConfig {
        &self.cfg
    }

    pub fn model(&self) -> &SubstrateModel {
        &self.model
    }

    /// Advance every taxel by `dt` under the given pressures and emit a frame.
    pub fn scan_frame(&mut self, pressures: &[f64], dt: f64) -> Result<Frame> {
        if pressures.len() != self.states.len() {
            return Err(Error::contract(format!(
                "pressure vector has {} entries for {} taxels",
                pressures.len(),
                self.states.len()
            )));
        }
        let substeps = (dt / self.model.max_dt()).ceil().max(1.0) as u32;
        let sub_dt = dt / substeps as f64;
        let mut values = Vec::with_capacity(self.states.len());
        for (state, &p) in self.states.iter_mut().zip(pressures) {
            let mut r = state.r_filtered;
            for _ in 0..substeps {
                r = state.step(&self.model, p, sub_dt)?;
            }
            values.push(adc_code(r, &self.cfg)?);
        }
        let seq = (self.frame_index % 65_536) as u16;
        let t = self.frame_index as f64 / self.cfg.scan_rate;
        self.frame_index += 1;
        Ok(Frame { seq, t, values })
    }

    /// Scan one frame at the configured rate (`dt = 1/scan_rate`).
    pub fn scan(&mut self, pressures: &[f64]) -> Result<Frame> {
        self.scan_frame(pressures, 1.0 / self.cfg.scan_rate)
    }

    /// Run the array at rest for `duration` seconds without emitting frames.
    pub fn settle(&mut self, pressures: &[f64], duration: f64) -> Result<()> {
        let frames = (duration * self.cfg.scan_rate).ceil().max(1.0) as u64;
        for _ in 0..frames {
            self.scan(pressures)?;
        }
        Ok(())
    }

    /// Reset sequence numbering and timestamps without touching taxel state.
    pub fn rewind_clock(&mut self) {
        self.frame_index = 0;
    }
}
