//! Signal processing on frames: baseline zeroing, contact detection and
//! activation-weighted contact localization.
//!
//! Loading lowers ADC codes (the divider reads the voltage across the
//! taxel), so deviations are computed as `baseline - frame`: a loaded taxel
//! yields a positive activation.

use serde::{Deserialize, Serialize};

use crate::daq::{Frame, Scanner};
use crate::error::{Error, Result};
use crate::forest::ForestModel;
use crate::layout::SkinLayout;

/// Class id the contact classifier assigns to frames with an object touching
/// the array (class 0 is "no contact").
pub const CONTACT_CLASS: usize = 1;

/// Signed per-taxel deviation from a rest baseline; positive under load.
pub fn zero_baseline(frame: &Frame, baseline: &Frame) -> Result<Vec<i32>> {
    if frame.values.len() != baseline.values.len() {
        return Err(Error::contract(format!(
            "frame has {} taxels, baseline {}",
            frame.values.len(),
            baseline.values.len()
        )));
    }
    Ok(baseline
        .values
        .iter()
        .zip(&frame.values)
        .map(|(&b, &v)| b as i32 - v as i32)
        .collect())
}

/// `zero_baseline` as the float feature vector classifiers consume.
pub fn deviation_features(frame: &Frame, baseline: &Frame) -> Result<Vec<f64>> {
    Ok(zero_baseline(frame, baseline)?
        .into_iter()
        .map(|d| d as f64)
        .collect())
}

/// Average `frames` rest scans into a reference frame (per-taxel rounded
/// mean), the usual way an experiment is zeroed before it starts.
pub fn averaged_baseline(scanner: &mut Scanner, frames: usize) -> Result<Frame> {
    if frames == 0 {
        return Err(Error::contract("need at least one baseline frame"));
    }
    let zeros = vec![0.0; scanner.config().taxel_count];
    let mut acc = vec![0.0f64; scanner.config().taxel_count];
    let mut last = None;
    for _ in 0..frames {
        let frame = scanner.scan(&zeros)?;
        for (a, &v) in acc.iter_mut().zip(&frame.values) {
            *a += v as f64;
        }
        last = Some(frame);
    }
    let last = last.unwrap();
    Ok(Frame {
        seq: last.seq,
        t: last.t,
        values: acc
            .iter()
            .map(|a| (a / frames as f64).round() as u16)
            .collect(),
    })
}

/// Per-taxel standard deviation of rest codes over a window; the noise floor
/// the localization threshold is derived from.
pub fn measure_noise_std(scanner: &mut Scanner, window_s: f64) -> Result<Vec<f64>> {
    let k = scanner.config().taxel_count;
    let zeros = vec![0.0; k];
    let frames = (window_s * scanner.config().scan_rate).ceil().max(2.0) as usize;
    let mut sum = vec![0.0f64; k];
    let mut sum_sq = vec![0.0f64; k];
    for _ in 0..frames {
        let frame = scanner.scan(&zeros)?;
        for (i, &v) in frame.values.iter().enumerate() {
            sum[i] += v as f64;
            sum_sq[i] += (v as f64) * (v as f64);
        }
    }
    let n = frames as f64;
    Ok(sum
        .iter()
        .zip(&sum_sq)
        .map(|(s, sq)| (sq / n - (s / n) * (s / n)).max(0.0).sqrt())
        .collect())
}

/// Default activation threshold: four times the worst per-taxel noise std
/// measured from a 1 s rest window, and never below one count.
pub fn default_threshold(noise_std: &[f64]) -> f64 {
    let worst = noise_std.iter().cloned().fold(0.0f64, f64::max);
    (4.0 * worst).max(1.0)
}

/// Where and how hard the array is being touched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactEstimate {
    pub in_contact: bool,
    /// Activation-weighted mean of active taxel centers, mm; present iff the
    /// active set is nonempty.
    pub centroid: Option<(f64, f64)>,
    pub active_taxels: Vec<usize>,
    /// Summed deviation counts over the active set.
    pub total_activation: f64,
}

/// Threshold the deviations and reduce the active set to a weighted centroid.
pub fn localize_contact(deviations: &[f64], layout: &SkinLayout, theta: f64) -> Result<ContactEstimate> {
    if deviations.len() != layout.len() {
        return Err(Error::contract(format!(
            "{} deviations for {} taxels",
            deviations.len(),
            layout.len()
        )));
    }
    let mut active = Vec::new();
    let mut total = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for taxel in &layout.taxels {
        let d = deviations[taxel.id];
        if d > theta {
            active.push(taxel.id);
            total += d;
            cx += d * taxel.cx;
            cy += d * taxel.cy;
        }
    }
    if active.is_empty() {
        return Ok(ContactEstimate {
            in_contact: false,
            centroid: None,
            active_taxels: active,
            total_activation: 0.0,
        });
    }
    Ok(ContactEstimate {
        in_contact: true,
        centroid: Some((cx / total, cy / total)),
        active_taxels: active,
        total_activation: total,
    })
}

/// Anything that can decide "is the array in contact" from a deviation
/// vector.
pub trait ContactDetector: Send + Sync {
    fn detect(&self, deviations: &[f64]) -> bool;
}

/// Trained-classifier detector.
pub struct ForestDetector {
    pub model: ForestModel,
}

impl ContactDetector for ForestDetector {
    fn detect(&self, deviations: &[f64]) -> bool {
        self.model.predict(deviations) == CONTACT_CLASS
    }
}

/// Rule-based fallback for ablation: contact iff any taxel deviates past
/// theta.
pub struct ThresholdDetector {
    pub theta: f64,
}

impl ContactDetector for ThresholdDetector {
    fn detect(&self, deviations: &[f64]) -> bool {
        deviations.iter().any(|&d| d > self.theta)
    }
}
