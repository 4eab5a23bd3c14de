//! Benchtop characterization procedures on simulated substrates: weighted
//! step response with trial averaging, 10-90% rise/fall times, a sensitivity
//! sweep over a staircase of weights, and the hysteresis loop percentage.
//!
//! All procedures observe the substrate directly: the measured output is the
//! resistance drop below the unloaded value, so a pressure step produces an
//! exact first-order trace when the model has a single time constant. Loads
//! are applied as calibration weights of known mass and footprint.

use crate::error::{Error, Result};
use crate::rng::{derive_seed, SeedDomain};
use crate::substrate::{SubstrateModel, SubstrateState};

pub const GRAVITY_M_S2: f64 = 9.81;

/// Footprint of the hexagonal calibration weight, m² (5.85 cm²).
pub const WEIGHT_FOOTPRINT_M2: f64 = 5.85e-4;

/// Pressure exerted by a calibration weight resting on `area_m2`.
pub fn pressure_of_weight(mass_g: f64, area_m2: f64) -> Result<f64> {
    if !mass_g.is_finite() || mass_g < 0.0 {
        return Err(Error::domain(format!("mass must be >= 0, got {mass_g}")));
    }
    if !area_m2.is_finite() || area_m2 <= 0.0 {
        return Err(Error::domain(format!("area must be > 0, got {area_m2}")));
    }
    Ok(mass_g / 1_000.0 * GRAVITY_M_S2 / area_m2)
}

/// Trial-averaged normalized response to placing and removing a weight.
#[derive(Debug, Clone)]
pub struct ResponseTrace {
    /// Sample times, seconds.
    pub t: Vec<f64>,
    /// Per-sample mean of the normalized output deviation (0..1 scale).
    pub mean: Vec<f64>,
    /// Per-sample standard deviation across trials.
    pub std: Vec<f64>,
    pub trials: usize,
}

/// A [`ResponseTrace`] together with the instants the load went on and off.
#[derive(Debug, Clone)]
pub struct StepExperiment {
    pub trace: ResponseTrace,
    pub load_at: f64,
    pub unload_at: f64,
}

#[derive(Debug, Clone)]
pub struct StepConfig {
    pub mass_g: f64,
    pub area_m2: f64,
    /// Quiet time before the load is applied, seconds.
    pub pre_s: f64,
    /// How long the weight stays on, seconds.
    pub hold_s: f64,
    /// Recording time after removal, seconds.
    pub tail_s: f64,
    pub trials: usize,
    pub sample_hz: f64,
    pub seed: u64,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            mass_g: 20.0,
            area_m2: WEIGHT_FOOTPRINT_M2,
            pre_s: 1.0,
            hold_s: 6.0,
            tail_s: 6.0,
            trials: 15,
            sample_hz: 500.0,
            seed: 0,
        }
    }
}

/// Place the weight at `pre_s`, remove it at `pre_s + hold_s`, repeat over
/// independently seeded trials, and average the normalized output deviation.
///
/// The deviation is `r_zero - r(t)` scaled by the static deviation the
/// loaded, hysteresis-settled substrate would reach, so a fully settled
/// plateau reads 1.0.
pub fn step_response(model: &SubstrateModel, cfg: &StepConfig) -> Result<StepExperiment> {
    model.validate()?;
    if cfg.trials == 0 {
        return Err(Error::contract("trials must be >= 1"));
    }
    if !(cfg.sample_hz.is_finite() && cfg.sample_hz > 0.0) {
        return Err(Error::domain("sample_hz must be > 0"));
    }
    if cfg.sample_hz < 5.0 / model.tau_min() {
        return Err(Error::domain(format!(
            "sample_hz {} undersamples tau_min {}; need >= 5/tau_min",
            cfg.sample_hz,
            model.tau_min()
        )));
    }
    let pressure = pressure_of_weight(cfg.mass_g, cfg.area_m2)?;
    let p_settled = (pressure - model.hyst_width).max(0.0);
    let d_static = model.r_zero - model.static_resistance_raw(p_settled);
    if d_static <= 0.0 {
        return Err(Error::measurement(
            "load too small to produce a measurable deviation",
        ));
    }

    let total_s = cfg.pre_s + cfg.hold_s + cfg.tail_s;
    let n = (total_s * cfg.sample_hz).round() as usize;
    let dt = 1.0 / cfg.sample_hz;
    let substeps = (dt / model.max_dt()).ceil().max(1.0) as u32;
    let sub_dt = dt / substeps as f64;

    let t: Vec<f64> = (1..=n).map(|i| i as f64 * dt).collect();
    // Welford across trials: exact zeros when trials are identical.
    let mut mean = vec![0.0; n];
    let mut m2 = vec![0.0; n];
    for trial in 0..cfg.trials {
        let mut state = SubstrateState::at_rest(
            model,
            derive_seed(cfg.seed, SeedDomain::BenchTrial, trial as u64),
        );
        let count = (trial + 1) as f64;
        for (i, &ti) in t.iter().enumerate() {
            let p = if ti >= cfg.pre_s && ti < cfg.pre_s + cfg.hold_s {
                pressure
            } else {
                0.0
            };
            let mut r = model.r_zero;
            for _ in 0..substeps {
                r = state.step(model, p, sub_dt)?;
            }
            let dev = (model.r_zero - r) / d_static;
            let delta = dev - mean[i];
            mean[i] += delta / count;
            m2[i] += delta * (dev - mean[i]);
        }
    }
    let nf = cfg.trials as f64;
    let std: Vec<f64> = m2.iter().map(|v| (v / nf).max(0.0).sqrt()).collect();
    Ok(StepExperiment {
        trace: ResponseTrace {
            t,
            mean,
            std,
            trials: cfg.trials,
        },
        load_at: cfg.pre_s,
        unload_at: cfg.pre_s + cfg.hold_s,
    })
}

/// 10-90% transition times measured on the mean trace with linear
/// interpolation between samples. Each window must contain one completed
/// monotone excursion (rise in `load_window`, fall in `unload_window`).
pub fn rise_fall_times(
    trace: &ResponseTrace,
    load_window: (f64, f64),
    unload_window: (f64, f64),
) -> Result<(f64, f64)> {
    let rise = transition_time(trace, load_window)?;
    let fall = transition_time(trace, unload_window)?;
    Ok((rise, fall))
}

fn transition_time(trace: &ResponseTrace, window: (f64, f64)) -> Result<f64> {
    let idx: Vec<usize> = trace
        .t
        .iter()
        .enumerate()
        .filter(|(_, &t)| t >= window.0 && t <= window.1)
        .map(|(i, _)| i)
        .collect();
    if idx.len() < 3 {
        return Err(Error::measurement(format!(
            "window {window:?} holds too few samples"
        )));
    }
    // Direction from the window's ends; excursion from its extremes, so the
    // settled plateau defines the 100% level even if the window edges clip a
    // sample of the neighboring phase.
    let rising = trace.mean[*idx.last().unwrap()] > trace.mean[idx[0]];
    let lo_val = idx.iter().map(|&i| trace.mean[i]).fold(f64::INFINITY, f64::min);
    let hi_val = idx
        .iter()
        .map(|&i| trace.mean[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let (v0, v1) = if rising { (lo_val, hi_val) } else { (hi_val, lo_val) };
    let excursion = v1 - v0;
    if excursion == 0.0 {
        return Err(Error::measurement("flat trace in window"));
    }
    let t10 = crossing(trace, &idx, v0 + 0.1 * excursion, rising)?;
    let t90 = crossing(trace, &idx, v0 + 0.9 * excursion, rising)?;
    if t90 <= t10 {
        return Err(Error::measurement("crossings out of order"));
    }
    Ok(t90 - t10)
}

fn crossing(trace: &ResponseTrace, idx: &[usize], level: f64, rising: bool) -> Result<f64> {
    for pair in idx.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (va, vb) = (trace.mean[a], trace.mean[b]);
        let crossed = if rising {
            va < level && vb >= level
        } else {
            va > level && vb <= level
        };
        if crossed {
            let frac = (level - va) / (vb - va);
            return Ok(trace.t[a] + frac * (trace.t[b] - trace.t[a]));
        }
    }
    Err(Error::measurement(format!(
        "no monotone crossing of level {level}"
    )))
}

/// Settled output versus pressure over a staircase of weights.
#[derive(Debug, Clone)]
pub struct SensitivityCurve {
    /// Pressure at each staircase step, pascals, strictly increasing.
    pub pressure_pa: Vec<f64>,
    /// Normalized settled output per step; min is exactly 0, max exactly 1.
    pub mean_output: Vec<f64>,
    pub samples_per_step: usize,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub masses_g: Vec<f64>,
    pub area_m2: f64,
    /// Settling time after adding each weight before recording, seconds.
    pub settle_s: f64,
    /// Recording time per step, seconds.
    pub record_s: f64,
    /// Samples averaged per step, spread evenly over `record_s`.
    pub samples_per_step: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            masses_g: default_sweep_masses(),
            area_m2: WEIGHT_FOOTPRINT_M2,
            settle_s: 4.0,
            record_s: 5.0,
            samples_per_step: 1_625,
            seed: 0,
        }
    }
}

/// 0 to 100 g in 5 g increments.
pub fn default_sweep_masses() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 5.0).collect()
}

/// Stack weights one increment at a time; after each increment wait
/// `settle_s`, then record and average `samples_per_step` readings. The
/// resulting curve is normalized so its minimum maps to 0 and maximum to 1.
pub fn sensitivity_sweep(model: &SubstrateModel, cfg: &SweepConfig) -> Result<SensitivityCurve> {
    model.validate()?;
    if cfg.masses_g.is_empty() {
        return Err(Error::contract("sweep needs at least one mass"));
    }
    if cfg.masses_g.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::contract("masses must be non-decreasing"));
    }
    if cfg.samples_per_step == 0 {
        return Err(Error::contract("samples_per_step must be >= 1"));
    }
    let mut state = SubstrateState::at_rest(model, derive_seed(cfg.seed, SeedDomain::BenchTrial, 0));
    let mut pressure_pa = Vec::with_capacity(cfg.masses_g.len());
    let mut raw = Vec::with_capacity(cfg.masses_g.len());
    let sample_dt = cfg.record_s / cfg.samples_per_step as f64;
    let substeps = (sample_dt / model.max_dt()).ceil().max(1.0) as u32;
    let sub_dt = sample_dt / substeps as f64;
    for &mass in &cfg.masses_g {
        let p = pressure_of_weight(mass, cfg.area_m2)?;
        if cfg.settle_s > 0.0 {
            state.advance(model, p, cfg.settle_s)?;
        }
        let mut acc = 0.0;
        for _ in 0..cfg.samples_per_step {
            let mut r = model.r_zero;
            for _ in 0..substeps {
                r = state.step(model, p, sub_dt)?;
            }
            acc += model.r_zero - r;
        }
        pressure_pa.push(p);
        raw.push(acc / cfg.samples_per_step as f64);
    }
    // Deduplicate equal pressures (repeated masses) keeping the last reading
    // so the pressure axis is strictly increasing.
    let mut dedup_p = Vec::new();
    let mut dedup_v = Vec::new();
    for (p, v) in pressure_pa.into_iter().zip(raw) {
        if dedup_p.last() == Some(&p) {
            *dedup_v.last_mut().unwrap() = v;
        } else {
            dedup_p.push(p);
            dedup_v.push(v);
        }
    }
    let lo = dedup_v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = dedup_v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return Err(Error::measurement("sweep produced a flat curve"));
    }
    let mean_output = dedup_v.iter().map(|v| (v - lo) / (hi - lo)).collect();
    Ok(SensitivityCurve {
        pressure_pa: dedup_p,
        mean_output,
        samples_per_step: cfg.samples_per_step,
    })
}

#[derive(Debug, Clone)]
pub struct HysteresisConfig {
    pub mass_g: f64,
    pub area_m2: f64,
    pub cycles: usize,
    /// Pressure levels per leg of the quasi-static staircase.
    pub levels_per_leg: usize,
    /// Settling time per level, in units of the slowest time constant.
    pub settle_taus: f64,
    /// Readings averaged per level after settling.
    pub record_samples: usize,
    pub seed: u64,
}

impl Default for HysteresisConfig {
    fn default() -> Self {
        HysteresisConfig {
            mass_g: 20.0,
            area_m2: WEIGHT_FOOTPRINT_M2,
            cycles: 20,
            levels_per_leg: 48,
            settle_taus: 10.0,
            record_samples: 100,
            seed: 0,
        }
    }
}

/// Loop percentage from quasi-static place-and-remove cycles.
///
/// Each cycle walks pressure up a staircase to the weight's pressure and
/// back down, settling at every level for `settle_taus` times the slowest
/// time constant before recording, so dynamic lag is negligible and the
/// measured loop is the rate-independent play-operator loop. The per-cycle
/// figure is the maximum loading/unloading output gap at equal pressure over
/// the full-scale output range, in percent; cycles are averaged.
pub fn hysteresis_percent(model: &SubstrateModel, cfg: &HysteresisConfig) -> Result<f64> {
    model.validate()?;
    if cfg.cycles == 0 {
        return Err(Error::contract("cycles must be >= 1"));
    }
    if cfg.levels_per_leg < 2 {
        return Err(Error::contract("need at least 2 levels per leg"));
    }
    let p_max = pressure_of_weight(cfg.mass_g, cfg.area_m2)?;
    let settle_s = cfg.settle_taus * model.tau_max();
    let mut state = SubstrateState::at_rest(model, derive_seed(cfg.seed, SeedDomain::BenchTrial, 1));
    let dt = model.max_dt();
    let levels = cfg.levels_per_leg;

    let record = |state: &mut SubstrateState, p: f64| -> Result<f64> {
        state.advance(model, p, settle_s)?;
        let mut acc = 0.0;
        for _ in 0..cfg.record_samples.max(1) {
            acc += state.step(model, p, dt)?;
        }
        Ok(acc / cfg.record_samples.max(1) as f64)
    };

    let mut total_pct = 0.0;
    for _ in 0..cfg.cycles {
        let mut loading = Vec::with_capacity(levels + 1);
        let mut unloading = Vec::with_capacity(levels + 1);
        for i in 0..=levels {
            let p = p_max * i as f64 / levels as f64;
            loading.push(record(&mut state, p)?);
        }
        for i in (0..=levels).rev() {
            let p = p_max * i as f64 / levels as f64;
            unloading.push(record(&mut state, p)?);
        }
        unloading.reverse(); // index by level, same as `loading`
        let mut gap: f64 = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (l, u) in loading.iter().zip(&unloading) {
            gap = gap.max((l - u).abs());
            lo = lo.min(*l).min(*u);
            hi = hi.max(*l).max(*u);
        }
        if hi <= lo {
            return Err(Error::measurement("hysteresis cycle produced no range"));
        }
        total_pct += 100.0 * gap / (hi - lo);
    }
    Ok(total_pct / cfg.cycles as f64)
}

/// Normalized output change between two pressures, linearly interpolated on
/// the sweep grid.
pub fn normalized_change(curve: &SensitivityCurve, p_lo: f64, p_hi: f64) -> f64 {
    value_at(curve, p_hi) - value_at(curve, p_lo)
}

/// First pressure at which the normalized output reaches `fraction` of its
/// maximum, linearly interpolated.
pub fn saturation_pressure(curve: &SensitivityCurve, fraction: f64) -> Result<f64> {
    let target = fraction;
    for i in 1..curve.pressure_pa.len() {
        let (v0, v1) = (curve.mean_output[i - 1], curve.mean_output[i]);
        if v0 < target && v1 >= target {
            let frac = (target - v0) / (v1 - v0);
            return Ok(curve.pressure_pa[i - 1]
                + frac * (curve.pressure_pa[i] - curve.pressure_pa[i - 1]));
        }
    }
    if curve.mean_output.first().copied().unwrap_or(0.0) >= target {
        return Ok(curve.pressure_pa[0]);
    }
    Err(Error::measurement(format!(
        "curve never reaches fraction {fraction}"
    )))
}

/// Coefficient of determination of the straight-line fit output-vs-pressure.
pub fn linear_r2(curve: &SensitivityCurve) -> f64 {
    let n = curve.pressure_pa.len() as f64;
    let mx = curve.pressure_pa.iter().sum::<f64>() / n;
    let my = curve.mean_output.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in curve.pressure_pa.iter().zip(&curve.mean_output) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    let slope = sxy / sxx;
    let ss_res = syy - slope * sxy;
    1.0 - ss_res / syy
}

fn value_at(curve: &SensitivityCurve, p: f64) -> f64 {
    let ps = &curve.pressure_pa;
    let vs = &curve.mean_output;
    if p <= ps[0] {
        return vs[0];
    }
    for i in 1..ps.len() {
        if p <= ps[i] {
            let frac = (p - ps[i - 1]) / (ps[i] - ps[i - 1]);
            return vs[i - 1] + frac * (vs[i] - vs[i - 1]);
        }
    }
    *vs.last().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substrate::{default_substrate, Material, ModelKind};

    #[test]
    fn weight_pressure_hand_values() {
        // 0.020 kg * 9.81 / 5.85e-4 m^2, by hand
        let p = pressure_of_weight(20.0, WEIGHT_FOOTPRINT_M2).unwrap();
        assert!((p - 335.3846).abs() < 1e-3, "{p}");
        assert_eq!(pressure_of_weight(0.0, 1.0).unwrap(), 0.0);
        let p100 = pressure_of_weight(100.0, WEIGHT_FOOTPRINT_M2).unwrap();
        assert!((p100 - 1_676.923).abs() < 1e-2, "{p100}");
        assert!((p100 - 5.0 * p).abs() < 1e-9);
        assert!(pressure_of_weight(10.0, 0.0).is_err());
        assert!(pressure_of_weight(-1.0, 1.0).is_err());
    }

    #[test]
    fn zero_noise_trials_have_zero_std() {
        let model = default_substrate(Material::FoamLowDensity).ideal();
        let cfg = StepConfig {
            trials: 5,
            hold_s: 2.0,
            tail_s: 2.0,
            pre_s: 0.5,
            ..StepConfig::default()
        };
        let exp = step_response(&model, &cfg).unwrap();
        assert!(exp.trace.std.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn plateau_matches_static_deviation() {
        let model = default_substrate(Material::FoamLowDensity).ideal();
        let cfg = StepConfig {
            hold_s: 10.0 * model.tau_rise,
            tail_s: 1.0,
            trials: 1,
            ..StepConfig::default()
        };
        let exp = step_response(&model, &cfg).unwrap();
        // last sample before unload
        let plateau = exp
            .trace
            .t
            .iter()
            .zip(&exp.trace.mean)
            .filter(|(&t, _)| t < exp.unload_at)
            .last()
            .unwrap()
            .1;
        assert!((plateau - 1.0).abs() < 0.01, "plateau {plateau}");
    }

    #[test]
    fn low_density_trace_rises_plateaus_falls() {
        let model = default_substrate(Material::FoamLowDensity);
        let cfg = StepConfig {
            trials: 15,
            hold_s: 2.0,
            tail_s: 2.0,
            pre_s: 0.5,
            seed: 3,
            ..StepConfig::default()
        };
        let exp = step_response(&model, &cfg).unwrap();
        let at = |t: f64| {
            let i = exp.trace.t.iter().position(|&ti| ti >= t).unwrap();
            exp.trace.mean[i]
        };
        assert!(at(0.4) < 0.05, "quiet before load");
        assert!(at(1.0) > 0.9, "risen after 10 tau");
        assert!(at(2.4) > 0.9, "still on plateau");
        assert!(at(4.4) < 0.1, "released at the end");
    }

    #[test]
    fn first_order_rise_time_is_ln9_tau() {
        let mut model = default_substrate(Material::FoamLowDensity).ideal();
        model.tau_rise = 0.050;
        model.tau_fall = 0.050;
        let cfg = StepConfig {
            trials: 1,
            pre_s: 0.5,
            hold_s: 2.0,
            tail_s: 2.0,
            sample_hz: 2_000.0,
            ..StepConfig::default()
        };
        let exp = step_response(&model, &cfg).unwrap();
        let (rise, fall) = rise_fall_times(
            &exp.trace,
            (exp.load_at, exp.unload_at),
            (exp.unload_at, *exp.trace.t.last().unwrap()),
        )
        .unwrap();
        let want = 9.0f64.ln() * 0.050; // 109.86 ms
        assert!((rise - want).abs() / want < 0.05, "rise {rise} want {want}");
        assert!((fall - want).abs() / want < 0.05, "fall {fall} want {want}");
        assert!((rise - fall).abs() / want < 0.05, "symmetric taus");
    }

    #[test]
    fn analytic_first_order_trace_recovers_ln9_tau_within_one_percent() {
        // rise_fall_times checked against pure math, independent of the
        // substrate integrator: y = 1 - exp(-t/tau) then exp decay.
        let tau = 0.07;
        let hz = 2_000.0; // >= 1000/tau
        let n = (4.0 * hz) as usize;
        let mut t = Vec::new();
        let mut mean = Vec::new();
        for i in 1..=n {
            let ti = i as f64 / hz;
            t.push(ti);
            let v = if ti < 2.0 {
                1.0 - (-ti / tau).exp()
            } else {
                (1.0 - (-2.0f64 / tau).exp()) * (-(ti - 2.0) / tau).exp()
            };
            mean.push(v);
        }
        let trace = ResponseTrace {
            std: vec![0.0; t.len()],
            t,
            mean,
            trials: 1,
        };
        let (rise, fall) = rise_fall_times(&trace, (0.0, 2.0), (2.0, 4.0)).unwrap();
        let want = 9.0f64.ln() * tau;
        assert!((rise - want).abs() / want < 0.01, "rise {rise}");
        assert!((fall - want).abs() / want < 0.01, "fall {fall}");
    }

    #[test]
    fn secondary_component_stretches_the_rise() {
        let model = default_substrate(Material::FoamHighDensity).ideal();
        assert!(model.tau_secondary.is_some());
        let cfg = StepConfig {
            trials: 1,
            pre_s: 0.5,
            hold_s: 14.0,
            tail_s: 2.0,
            ..StepConfig::default()
        };
        let exp = step_response(&model, &cfg).unwrap();
        let (rise, _) = rise_fall_times(
            &exp.trace,
            (exp.load_at, exp.unload_at),
            (exp.unload_at, *exp.trace.t.last().unwrap()),
        )
        .unwrap();
        assert!(
            rise > 9.0f64.ln() * model.tau_rise * 1.5,
            "two-exponential rise {rise} should exceed the first-order value"
        );
    }

    #[test]
    fn flat_window_is_a_measurement_error() {
        let trace = ResponseTrace {
            t: (1..100).map(|i| i as f64 * 0.01).collect(),
            mean: vec![0.5; 99],
            std: vec![0.0; 99],
            trials: 1,
        };
        assert!(matches!(
            rise_fall_times(&trace, (0.0, 0.5), (0.5, 1.0)),
            Err(Error::Measurement(_))
        ));
    }

    #[test]
    fn sweep_is_normalized_monotone_and_deterministic() {
        for material in Material::ALL {
            let model = default_substrate(material).ideal();
            let cfg = SweepConfig {
                samples_per_step: 50,
                settle_s: 2.0,
                record_s: 0.5,
                ..SweepConfig::default()
            };
            let curve = sensitivity_sweep(&model, &cfg).unwrap();
            assert_eq!(curve.pressure_pa.len(), 21);
            assert_eq!(curve.mean_output[0], 0.0);
            assert!((curve.mean_output.last().unwrap() - 1.0).abs() < 1e-12);
            assert!(
                curve.mean_output.windows(2).all(|w| w[1] >= w[0]),
                "{material}: sweep must be monotone with noise off"
            );
        }
        // determinism with noise on
        let model = default_substrate(Material::FoamLowDensity);
        let cfg = SweepConfig {
            samples_per_step: 40,
            settle_s: 1.0,
            record_s: 0.2,
            seed: 9,
            ..SweepConfig::default()
        };
        let a = sensitivity_sweep(&model, &cfg).unwrap();
        let b = sensitivity_sweep(&model, &cfg).unwrap();
        assert_eq!(a.mean_output, b.mean_output);
    }

    #[test]
    fn zero_width_loop_measures_zero_percent() {
        let model = default_substrate(Material::FoamLowDensity).ideal();
        let cfg = HysteresisConfig {
            cycles: 2,
            levels_per_leg: 16,
            settle_taus: 12.0,
            record_samples: 4,
            ..HysteresisConfig::default()
        };
        let pct = hysteresis_percent(&model, &cfg).unwrap();
        assert!(pct < 0.05, "expected ~0%, got {pct}");
    }

    #[test]
    fn loop_percent_is_monotone_in_width() {
        let base = default_substrate(Material::FoamLowDensity).ideal();
        let cfg = HysteresisConfig {
            cycles: 2,
            levels_per_leg: 24,
            settle_taus: 10.0,
            record_samples: 4,
            ..HysteresisConfig::default()
        };
        let mut last = -1.0;
        for w in [0.0, 5.0, 10.0, 20.0, 40.0] {
            let mut model = base.clone();
            model.hyst_width = w;
            let pct = hysteresis_percent(&model, &cfg).unwrap();
            assert!(
                pct >= last - 1e-9,
                "hysteresis percent must not decrease with width: {pct} after {last}"
            );
            last = pct;
        }
    }

    #[test]
    fn linear_conductance_sweep_is_nearly_linear() {
        let model = default_substrate(Material::EeonTex).ideal();
        let cfg = SweepConfig {
            samples_per_step: 50,
            settle_s: 1.0,
            record_s: 0.5,
            ..SweepConfig::default()
        };
        let curve = sensitivity_sweep(&model, &cfg).unwrap();
        assert!(linear_r2(&curve) > 0.98, "r2 {}", linear_r2(&curve));
    }

    #[test]
    fn saturation_pressure_interpolates() {
        let curve = SensitivityCurve {
            pressure_pa: vec![0.0, 100.0, 200.0],
            mean_output: vec![0.0, 0.8, 1.0],
            samples_per_step: 1,
        };
        let p = saturation_pressure(&curve, 0.9).unwrap();
        assert!((p - 150.0).abs() < 1e-9);
        assert!((normalized_change(&curve, 0.0, 50.0) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn exp_saturating_kind_is_used_where_expected() {
        assert_eq!(
            default_substrate(Material::FoamLowDensity).model_kind,
            ModelKind::ExpSaturating
        );
        assert_eq!(
            default_substrate(Material::EeonTex).model_kind,
            ModelKind::LinearConductance
        );
    }
}
