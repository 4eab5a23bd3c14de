//! Piezoresistive substrate models.
//!
//! A substrate maps an applied pressure history to an instantaneous taxel
//! resistance through three stages:
//!
//! 1. a rate-independent play (backlash) operator on pressure, which is the
//!    sole source of hysteresis,
//! 2. a static resistance law evaluated at the hysteresis-filtered pressure,
//! 3. first-order relaxation toward that static value, optionally split into
//!    a fast component and a slow creep component.
//!
//! Zero-mean Gaussian noise enters on conductance and the result is converted
//! back to a strictly positive resistance. All state transitions are exact
//! exponential updates, so the integrator is stable for any `dt` that honors
//! the oversampling precondition.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Conductance floor after noise injection; caps resistance at 1 GΩ, far
/// above anything the acquisition chain can distinguish from open circuit.
const CONDUCTANCE_FLOOR: f64 = 1e-9;

/// The four characterized materials plus an escape hatch for user files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Material {
    #[serde(rename = "eeontex")]
    EeonTex,
    #[serde(rename = "wearic")]
    Wearic,
    #[serde(rename = "foam_high_density")]
    FoamHighDensity,
    #[serde(rename = "foam_low_density")]
    FoamLowDensity,
    #[serde(rename = "custom")]
    Custom,
}

impl Material {
    pub const ALL: [Material; 4] = [
        Material::FoamLowDensity,
        Material::FoamHighDensity,
        Material::Wearic,
        Material::EeonTex,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Material::EeonTex => "eeontex",
            Material::Wearic => "wearic",
            Material::FoamHighDensity => "foam_high_density",
            Material::FoamLowDensity => "foam_low_density",
            Material::Custom => "custom",
        }
    }
}

impl std::fmt::Display for Material {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

/// Shape of the static resistance-vs-pressure law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `R(p) = r_sat + (r_zero - r_sat) * exp(-p / p_char)`; visible
    /// saturation, used for the foams and the Wearic fabric.
    ExpSaturating,
    /// `1/R(p) = (1 + p / p_char) / r_zero`; conductance linear in pressure,
    /// used for the near-linear EeonTex fabric. `r_sat` acts as a floor only.
    LinearConductance,
}

/// Calibrated parameters for one material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstrateModel {
    pub name: Material,
    pub model_kind: ModelKind,
    /// Resistance at zero load, ohms.
    pub r_zero: f64,
    /// Asymptotic resistance under full load, ohms.
    pub r_sat: f64,
    /// Characteristic pressure, pascals; governs the sensitivity range.
    pub p_char: f64,
    /// Loading time constant, seconds.
    pub tau_rise: f64,
    /// Unloading time constant, seconds.
    pub tau_fall: f64,
    /// Optional slow creep time constant, seconds.
    #[serde(default)]
    pub tau_secondary: Option<f64>,
    /// Share of each step handled by the creep component, in [0, 1).
    #[serde(default)]
    pub secondary_fraction: f64,
    /// Half-width of the hysteresis dead band, pascals.
    pub hyst_width: f64,
    /// Standard deviation of zero-mean conductance noise, siemens.
    pub noise_sigma: f64,
}

impl SubstrateModel {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.r_zero,
            self.r_sat,
            self.p_char,
            self.tau_rise,
            self.tau_fall,
            self.secondary_fraction,
            self.hyst_width,
            self.noise_sigma,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::domain("substrate parameters must be finite"));
        }
        if self.r_zero <= 0.0 || self.r_sat <= 0.0 || self.r_sat >= self.r_zero {
            return Err(Error::domain(format!(
                "need 0 < r_sat < r_zero, got r_sat={} r_zero={}",
                self.r_sat, self.r_zero
            )));
        }
        if self.p_char <= 0.0 {
            return Err(Error::domain("p_char must be > 0"));
        }
        if self.tau_rise <= 0.0 || self.tau_fall <= 0.0 {
            return Err(Error::domain("time constants must be > 0"));
        }
        if let Some(tau2) = self.tau_secondary {
            if !tau2.is_finite() || tau2 <= 0.0 {
                return Err(Error::domain("tau_secondary must be > 0"));
            }
        }
        if !(0.0..1.0).contains(&self.secondary_fraction) {
            return Err(Error::domain("secondary_fraction must be in [0, 1)"));
        }
        if self.tau_secondary.is_none() && self.secondary_fraction != 0.0 {
            return Err(Error::domain(
                "secondary_fraction requires tau_secondary to be set",
            ));
        }
        if self.hyst_width < 0.0 {
            return Err(Error::domain("hyst_width must be >= 0"));
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::domain("noise_sigma must be >= 0"));
        }
        Ok(())
    }

    /// Static resistance law, strictly monotone non-increasing in pressure.
    pub fn static_resistance(&self, p: f64) -> Result<f64> {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::domain(format!(
                "pressure must be finite and >= 0, got {p}"
            )));
        }
        Ok(self.static_resistance_raw(p))
    }

    pub(crate) fn static_resistance_raw(&self, p: f64) -> f64 {
        match self.model_kind {
            ModelKind::ExpSaturating => {
                self.r_sat + (self.r_zero - self.r_sat) * (-p / self.p_char).exp()
            }
            ModelKind::LinearConductance => (self.r_zero / (1.0 + p / self.p_char)).max(self.r_sat),
        }
    }

    /// Smallest active time constant; callers must step with `dt <= tau_min/5`.
    pub fn tau_min(&self) -> f64 {
        let mut t = self.tau_rise.min(self.tau_fall);
        if let Some(tau2) = self.tau_secondary {
            t = t.min(tau2);
        }
        t
    }

    /// Largest active time constant; settling windows scale with this.
    pub fn tau_max(&self) -> f64 {
        let mut t = self.tau_rise.max(self.tau_fall);
        if let Some(tau2) = self.tau_secondary {
            t = t.max(tau2);
        }
        t
    }

    /// Largest simulation step honoring the oversampling precondition.
    pub fn max_dt(&self) -> f64 {
        self.tau_min() / 5.0
    }

    /// A noise-free, hysteresis-free copy; handy for oracles and baselines.
    pub fn ideal(&self) -> SubstrateModel {
        SubstrateModel {
            hyst_width: 0.0,
            noise_sigma: 0.0,
            ..self.clone()
        }
    }
}

/// Evolving state of one taxel's substrate patch.
#[derive(Debug, Clone)]
pub struct SubstrateState {
    /// Hysteresis-filtered pressure, pascals.
    pub p_effective: f64,
    /// Fast first-order resistance component, ohms.
    pub r_filtered: f64,
    /// Slow creep resistance component, ohms (tracks `r_filtered` when the
    /// model has no secondary time constant).
    pub r_secondary: f64,
    rng: ChaCha8Rng,
    normal: Option<Normal<f64>>,
}

impl SubstrateState {
    /// State of an unloaded, fully relaxed patch.
    pub fn at_rest(model: &SubstrateModel, seed: u64) -> SubstrateState {
        let normal = if model.noise_sigma > 0.0 {
            Some(Normal::new(0.0, model.noise_sigma).expect("validated sigma"))
        } else {
            None
        };
        SubstrateState {
            p_effective: 0.0,
            r_filtered: model.r_zero,
            r_secondary: model.r_zero,
            rng: rng::stream(seed),
            normal,
        }
    }

    /// Advance the state by `dt` seconds under applied pressure `p_applied`
    /// and return the (noisy) instantaneous resistance.
    pub fn step(&mut self, model: &SubstrateModel, p_applied: f64, dt: f64) -> Result<f64> {
        if !p_applied.is_finite() || p_applied < 0.0 {
            return Err(Error::domain(format!(
                "applied pressure must be finite and >= 0, got {p_applied}"
            )));
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::domain(format!("dt must be finite and > 0, got {dt}")));
        }
        if dt > model.max_dt() * (1.0 + 1e-9) {
            return Err(Error::domain(format!(
                "dt {dt} exceeds tau_min/5 = {}; oversample the fastest time constant",
                model.max_dt()
            )));
        }

        // Play operator: output follows input only past the dead band.
        let w = model.hyst_width;
        self.p_effective = self
            .p_effective
            .clamp((p_applied - w).max(0.0), p_applied + w);

        let target = model.static_resistance_raw(self.p_effective);

        // Loading pulls resistance down; pick the time constant by direction.
        let tau = if target < self.r_filtered {
            model.tau_rise
        } else {
            model.tau_fall
        };
        self.r_filtered = target + (self.r_filtered - target) * (-dt / tau).exp();

        match model.tau_secondary {
            Some(tau2) => {
                self.r_secondary = target + (self.r_secondary - target) * (-dt / tau2).exp();
            }
            None => self.r_secondary = self.r_filtered,
        }

        let f = model.secondary_fraction;
        let blended = (1.0 - f) * self.r_filtered + f * self.r_secondary;

        let out = match (&self.normal, model.noise_sigma > 0.0) {
            (Some(normal), true) => {
                let g = 1.0 / blended + normal.sample(&mut self.rng);
                1.0 / g.max(CONDUCTANCE_FLOOR)
            }
            _ => blended,
        };
        Ok(out)
    }

    /// Advance for `duration` seconds at constant pressure, stepping at
    /// `dt <= tau_min/5`. Returns the final resistance sample.
    pub fn advance(&mut self, model: &SubstrateModel, p_applied: f64, duration: f64) -> Result<f64> {
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::domain("duration must be finite and > 0"));
        }
        let dt = model.max_dt();
        let steps = (duration / dt).ceil().max(1.0) as u64;
        let dt = duration / steps as f64;
        let mut r = self.r_filtered;
        for _ in 0..steps {
            r = self.step(model, p_applied, dt)?;
        }
        Ok(r)
    }
}

/// Functional form of [`SubstrateState::step`]: returns the advanced state
/// alongside the resistance sample.
pub fn step_state(
    model: &SubstrateModel,
    state: &SubstrateState,
    p_applied: f64,
    dt: f64,
) -> Result<(SubstrateState, f64)> {
    let mut next = state.clone();
    let r = next.step(model, p_applied, dt)?;
    Ok((next, r))
}

/// The four calibrated material presets.
///
/// Resistance ranges, time constants and noise levels are calibration
/// choices; the hysteresis widths are fixed by bisection against the
/// benchtop hysteresis measurement so that the measured loop percentages
/// land on the characterization targets (see `benchtop` tests).
pub fn default_substrates() -> Vec<SubstrateModel> {
    Material::ALL.iter().map(|m| default_substrate(*m)).collect()
}

/// Preset for one material. Panics only for [`Material::Custom`], which has
/// no preset by definition.
pub fn default_substrate(material: Material) -> SubstrateModel {
    let model = match material {
        Material::FoamLowDensity => SubstrateModel {
            name: Material::FoamLowDensity,
            model_kind: ModelKind::ExpSaturating,
            r_zero: 20_000.0,
            r_sat: 1_500.0,
            p_char: 180.0,
            tau_rise: 0.050,
            tau_fall: 0.080,
            tau_secondary: None,
            secondary_fraction: 0.0,
            hyst_width: 14.6357,
            noise_sigma: 4.0e-7,
        },
        Material::FoamHighDensity => SubstrateModel {
            name: Material::FoamHighDensity,
            model_kind: ModelKind::ExpSaturating,
            r_zero: 24_000.0,
            r_sat: 2_500.0,
            p_char: 620.0,
            tau_rise: 0.060,
            tau_fall: 0.090,
            tau_secondary: Some(2.0),
            secondary_fraction: 0.22,
            hyst_width: 28.4956,
            noise_sigma: 7.0e-7,
        },
        Material::Wearic => SubstrateModel {
            name: Material::Wearic,
            model_kind: ModelKind::ExpSaturating,
            r_zero: 18_000.0,
            r_sat: 2_000.0,
            p_char: 420.0,
            tau_rise: 0.040,
            tau_fall: 0.060,
            tau_secondary: None,
            secondary_fraction: 0.0,
            hyst_width: 17.0827,
            noise_sigma: 2.5e-7,
        },
        Material::EeonTex => SubstrateModel {
            name: Material::EeonTex,
            model_kind: ModelKind::LinearConductance,
            r_zero: 16_000.0,
            r_sat: 800.0,
            p_char: 6_000.0,
            tau_rise: 0.030,
            tau_fall: 0.045,
            tau_secondary: None,
            secondary_fraction: 0.0,
            hyst_width: 30.4504,
            noise_sigma: 2.5e-7,
        },
        Material::Custom => panic!("no preset for custom material"),
    };
    debug_assert!(model.validate().is_ok());
    model
}

/// On-disk substrate parameter sets, keyed by material name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubstrateFile {
    pub format_version: u32,
    pub materials: std::collections::BTreeMap<String, SubstrateModel>,
}

impl SubstrateFile {
    pub fn from_models(models: &[SubstrateModel]) -> SubstrateFile {
        SubstrateFile {
            format_version: 1,
            materials: models
                .iter()
                .map(|m| (m.name.key().to_string(), m.clone()))
                .collect(),
        }
    }

    pub fn parse(json: &str) -> Result<SubstrateFile> {
        let file: SubstrateFile =
            serde_json::from_str(json).map_err(|e| Error::format(format!("substrate file: {e}")))?;
        if file.format_version != 1 {
            return Err(Error::format(format!(
                "unsupported substrate file version {}",
                file.format_version
            )));
        }
        for model in file.materials.values() {
            model.validate()?;
        }
        Ok(file)
    }

    pub fn get(&self, material: Material) -> Option<&SubstrateModel> {
        self.materials.get(material.key())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_model() -> SubstrateModel {
        SubstrateModel {
            name: Material::Custom,
            model_kind: ModelKind::ExpSaturating,
            r_zero: 20_000.0,
            r_sat: 2_000.0,
            p_char: 300.0,
            tau_rise: 0.05,
            tau_fall: 0.05,
            tau_secondary: None,
            secondary_fraction: 0.0,
            hyst_width: 0.0,
            noise_sigma: 0.0,
        }
    }

    #[test]
    fn zero_load_resistance_is_r_zero() {
        for model in default_substrates() {
            assert_eq!(model.static_resistance(0.0).unwrap(), model.r_zero);
        }
    }

    #[test]
    fn exp_law_matches_closed_form() {
        let model = exp_model();
        // evaluate the closed form by hand: 2000 + 18000 * e^-1
        let expected = 2_000.0 + 18_000.0 * (-1.0f64).exp();
        let got = model.static_resistance(300.0).unwrap();
        assert!((got - expected).abs() < 1e-9, "got {got}, want {expected}");
        assert!((got - 8_621.83).abs() < 0.01);
    }

    #[test]
    fn linear_conductance_doubles_at_p_char() {
        let model = SubstrateModel {
            model_kind: ModelKind::LinearConductance,
            r_zero: 20_000.0,
            p_char: 1_000.0,
            r_sat: 500.0,
            ..exp_model()
        };
        let got = model.static_resistance(1_000.0).unwrap();
        assert!((got - 10_000.0).abs() < 1e-9);
    }

    #[test]
    fn negative_pressure_is_a_domain_error() {
        let model = exp_model();
        assert!(matches!(
            model.static_resistance(-1.0),
            Err(Error::Domain(_))
        ));
        let mut state = SubstrateState::at_rest(&model, 0);
        assert!(matches!(
            state.step(&model, -1.0, 0.001),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            state.step(&model, f64::NAN, 0.001),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn oversampling_precondition_is_enforced() {
        let model = exp_model();
        let mut state = SubstrateState::at_rest(&model, 0);
        assert!(state.step(&model, 0.0, model.tau_rise / 5.0).is_ok());
        assert!(state.step(&model, 0.0, model.tau_rise / 4.0).is_err());
    }

    #[test]
    fn constant_pressure_converges_to_static_law() {
        let mut model = exp_model();
        model.hyst_width = 25.0;
        let mut state = SubstrateState::at_rest(&model, 0);
        let p = 400.0;
        let r = state.advance(&model, p, 10.0 * model.tau_rise).unwrap();
        // Play operator settles at p - hyst_width on loading.
        let want = model.static_resistance(p - model.hyst_width).unwrap();
        assert!(
            (r - want).abs() / want < 0.01,
            "steady state {r} vs static {want}"
        );
    }

    #[test]
    fn step_response_crosses_ten_ninety_band_at_ln9_tau() {
        let model = exp_model();
        let mut state = SubstrateState::at_rest(&model, 0);
        let p = 500.0;
        let target = model.static_resistance(p).unwrap();
        let excursion = model.r_zero - target;
        let dt = model.tau_rise / 100.0;
        let (mut t10, mut t90) = (None, None);
        let mut t = 0.0;
        while t < 10.0 * model.tau_rise {
            let r = state.step(&model, p, dt).unwrap();
            t += dt;
            let drop = model.r_zero - r;
            if t10.is_none() && drop >= 0.1 * excursion {
                t10 = Some(t);
            }
            if t90.is_none() && drop >= 0.9 * excursion {
                t90 = Some(t);
                break;
            }
        }
        let rise = t90.unwrap() - t10.unwrap();
        let want = 9.0f64.ln() * model.tau_rise;
        assert!(
            (rise - want).abs() / want < 0.02,
            "10-90 rise {rise} vs ln(9)*tau {want}"
        );
    }

    #[test]
    fn zero_width_play_is_identity_and_loops_coincide() {
        let model = exp_model();
        let mut loading = Vec::new();
        let mut unloading = Vec::new();
        let mut state = SubstrateState::at_rest(&model, 0);
        let peak = 600.0;
        let n = 200;
        for i in 0..=n {
            let p = peak * i as f64 / n as f64;
            state.advance(&model, p, 14.0 * model.tau_max()).unwrap();
            loading.push((p, state.r_filtered));
        }
        for i in (0..=n).rev() {
            let p = peak * i as f64 / n as f64;
            state.advance(&model, p, 14.0 * model.tau_max()).unwrap();
            unloading.push((p, state.r_filtered));
        }
        for ((p_l, r_l), (p_u, r_u)) in loading.iter().zip(unloading.iter().rev()) {
            assert_eq!(p_l, p_u);
            assert!(
                (r_l - r_u).abs() / r_l < 1e-6,
                "loading/unloading diverge at {p_l}: {r_l} vs {r_u}"
            );
        }
    }

    #[test]
    fn nonzero_width_separates_the_branches() {
        let mut model = exp_model();
        model.hyst_width = 30.0;
        let mut state = SubstrateState::at_rest(&model, 0);
        let peak = 600.0;
        state.advance(&model, peak, 10.0 * model.tau_max()).unwrap();
        // Return to half pressure from above vs. from below.
        state.advance(&model, 300.0, 10.0 * model.tau_max()).unwrap();
        let from_above = state.r_filtered;

        let mut fresh = SubstrateState::at_rest(&model, 0);
        fresh.advance(&model, 300.0, 10.0 * model.tau_max()).unwrap();
        let from_below = fresh.r_filtered;
        assert!(
            (from_above - from_below).abs() > 1.0,
            "play operator should separate branches: {from_above} vs {from_below}"
        );
    }

    #[test]
    fn noise_off_cycle_returns_to_rest() {
        let model = exp_model();
        let mut state = SubstrateState::at_rest(&model, 0);
        state.advance(&model, 500.0, 5.0 * model.tau_rise).unwrap();
        state.advance(&model, 0.0, 10.0 * model.tau_fall).unwrap();
        assert!(
            (state.r_filtered - model.r_zero).abs() / model.r_zero < 1e-3,
            "resistance should recover to r_zero, got {}",
            state.r_filtered
        );
    }

    #[test]
    fn equal_seeds_give_bit_identical_noisy_traces() {
        let mut model = exp_model();
        model.noise_sigma = 5e-7;
        let mut a = SubstrateState::at_rest(&model, 99);
        let mut b = SubstrateState::at_rest(&model, 99);
        for i in 0..500 {
            let p = 400.0 * (i % 50) as f64 / 50.0;
            let ra = a.step(&model, p, 0.005).unwrap();
            let rb = b.step(&model, p, 0.005).unwrap();
            assert_eq!(ra.to_bits(), rb.to_bits());
        }
    }

    #[test]
    fn secondary_component_keeps_creeping_after_fast_settle() {
        let mut model = exp_model();
        model.tau_secondary = Some(1.0);
        model.secondary_fraction = 0.25;
        let mut state = SubstrateState::at_rest(&model, 0);
        let p = 500.0;
        state.advance(&model, p, 6.0 * model.tau_rise).unwrap();
        let after_fast = (1.0 - model.secondary_fraction) * state.r_filtered
            + model.secondary_fraction * state.r_secondary;
        state.advance(&model, p, 5.0).unwrap();
        let settled = (1.0 - model.secondary_fraction) * state.r_filtered
            + model.secondary_fraction * state.r_secondary;
        // Creep continues pulling resistance down well after 6 tau_rise.
        assert!(
            after_fast - settled > 0.05 * (model.r_zero - settled),
            "expected visible creep: {after_fast} -> {settled}"
        );
    }

    #[test]
    fn only_high_density_foam_has_a_secondary_constant() {
        for model in default_substrates() {
            let has = model.tau_secondary.is_some();
            assert_eq!(has, model.name == Material::FoamHighDensity, "{}", model.name);
        }
    }

    #[test]
    fn presets_round_trip_through_json() {
        let file = SubstrateFile::from_models(&default_substrates());
        let json = serde_json::to_string_pretty(&file).unwrap();
        let parsed = SubstrateFile::parse(&json).unwrap();
        for material in Material::ALL {
            assert_eq!(
                parsed.get(material).unwrap(),
                &default_substrate(material)
            );
        }
    }

    #[test]
    fn shipped_substrate_file_matches_presets() {
        let shipped = SubstrateFile::parse(include_str!("../data/substrates.json")).unwrap();
        for material in Material::ALL {
            assert_eq!(
                shipped.get(material).unwrap(),
                &default_substrate(material),
                "data/substrates.json is out of sync with the presets for {material}"
            );
        }
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let mut m = exp_model();
        m.r_sat = m.r_zero;
        assert!(m.validate().is_err());
        let mut m = exp_model();
        m.p_char = 0.0;
        assert!(m.validate().is_err());
        let mut m = exp_model();
        m.secondary_fraction = 0.5; // without tau_secondary
        assert!(m.validate().is_err());
        let mut m = exp_model();
        m.secondary_fraction = 1.0;
        m.tau_secondary = Some(1.0);
        assert!(m.validate().is_err());
    }
}
