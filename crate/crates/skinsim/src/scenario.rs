//! Physically plausible taxel pressure fields over time for the three
//! experiment families: probe-vs-object motion arrest, object placement for
//! recognition, and grasp/lift contact-pattern sequences.
//!
//! Contact mechanics are a linear-spring penetration model: probing an
//! object builds force at `stiffness * penetration` until the object gives
//! way (topples, or collapses when fragile), after which it stops resisting.
//! Forces spread over the object's footprint patches in proportion to pad
//! overlap, so the summed `pressure * pad_area` over the array equals the
//! applied normal force for any on-array pose.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{ProbeCatalog, RecognitionCatalog};
use crate::daq::{AcquisitionConfig, Frame, Scanner};
use crate::error::{Error, Result};
use crate::forest::{train_forest, Dataset, ForestParams};
use crate::geometry::{polygon_area, rect_overlap_area, rect_polygon, Polygon};
use crate::layout::SkinLayout;
use crate::perception::{
    averaged_baseline, deviation_features, ContactDetector, ForestDetector,
};
use crate::rng::{derive_seed, stream, SeedDomain};
use crate::substrate::SubstrateModel;

pub const GRAVITY_M_S2: f64 = 9.81;

/// One rectangular contact patch of an object, object-local mm, carrying
/// `share` of the total contact force.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootprintPatch {
    pub cx: f64,
    pub cy: f64,
    pub width: f64,
    pub height: f64,
    pub share: f64,
}

/// An object as the contact model sees it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub name: String,
    pub footprint: Vec<FootprintPatch>,
    pub mass_g: f64,
    /// Contact spring constant for probe scenarios, N/mm.
    pub stiffness_n_per_mm: f64,
    /// Force at which the object falls (or collapses when fragile), N.
    pub topple_force_n: f64,
    /// Collapses under minor load (e.g. a tower of loose cubes).
    pub fragile: bool,
}

/// Placement of an object on the sensor plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub dx_mm: f64,
    pub dy_mm: f64,
    pub rotation_rad: f64,
}

impl Pose {
    pub fn identity() -> Pose {
        Pose {
            dx_mm: 0.0,
            dy_mm: 0.0,
            rotation_rad: 0.0,
        }
    }

    pub fn offset(dx_mm: f64, dy_mm: f64) -> Pose {
        Pose {
            dx_mm,
            dy_mm,
            rotation_rad: 0.0,
        }
    }
}

fn patch_polygons(footprint: &[FootprintPatch], pose: &Pose) -> Vec<(Polygon, f64)> {
    let (s, c) = pose.rotation_rad.sin_cos();
    footprint
        .iter()
        .map(|p| {
            let cx = pose.dx_mm + p.cx * c - p.cy * s;
            let cy = pose.dy_mm + p.cx * s + p.cy * c;
            (
                rect_polygon(cx, cy, p.width, p.height, pose.rotation_rad),
                p.share,
            )
        })
        .collect()
}

/// Spread `force_n` over the array: each patch carries its share, divided
/// among the pads it overlaps in proportion to overlap area. Returns
/// per-taxel pressures in pascals. Patches that miss every pad contribute
/// nothing (their force never reaches the sensing surface).
pub fn distribute_force(
    footprint: &[FootprintPatch],
    pose: &Pose,
    layout: &SkinLayout,
    force_n: f64,
) -> Result<Vec<f64>> {
    if !force_n.is_finite() || force_n < 0.0 {
        return Err(Error::domain(format!("force must be >= 0, got {force_n}")));
    }
    let mut pressures = vec![0.0; layout.len()];
    if force_n == 0.0 {
        return Ok(pressures);
    }
    for (poly, share) in patch_polygons(footprint, pose) {
        if polygon_area(&poly) <= 0.0 {
            continue;
        }
        let overlaps: Vec<f64> = layout
            .taxels
            .iter()
            .map(|t| rect_overlap_area(&poly, t.cx, t.cy, t.width, t.height))
            .collect();
        let total: f64 = overlaps.iter().sum();
        if total <= 0.0 {
            continue;
        }
        for (taxel, overlap) in layout.taxels.iter().zip(&overlaps) {
            if *overlap > 0.0 {
                let taxel_force = force_n * share * overlap / total;
                pressures[taxel.id] += taxel_force / taxel.area_m2();
            }
        }
    }
    Ok(pressures)
}

/// Static per-taxel pressures from an object resting under its own weight.
pub fn place_object(object: &ObjectSpec, pose: &Pose, layout: &SkinLayout) -> Result<Vec<f64>> {
    let weight_n = object.mass_g / 1_000.0 * GRAVITY_M_S2;
    distribute_force(&object.footprint, pose, layout, weight_n)
}

/// One probing action: approach, contact, detect, halt.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub object: ObjectSpec,
    pub approach_speed_mm_s: f64,
    pub start_distance_mm: f64,
    pub orientation: usize,
    /// Controller delay between detection and halt, frames.
    pub stop_latency_frames: u32,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.approach_speed_mm_s.is_finite() && self.approach_speed_mm_s > 0.0) {
            return Err(Error::domain("approach speed must be > 0"));
        }
        if !(self.start_distance_mm.is_finite() && self.start_distance_mm >= 0.0) {
            return Err(Error::domain("start distance must be >= 0"));
        }
        Ok(())
    }
}

pub const DEFAULT_START_DISTANCE_MM: f64 = 120.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactOutcome {
    pub detected: bool,
    pub frames_to_detect: Option<u32>,
    pub peak_force_n: f64,
    pub toppled: bool,
}

/// Per-frame record of a probe run.
#[derive(Debug, Clone)]
pub struct ProbeLog {
    pub frames: Vec<Frame>,
    pub forces_n: Vec<f64>,
    pub baseline: Frame,
}

/// Frames recorded after the halt (or the yield) before the run ends.
const PROBE_TAIL_FRAMES: u32 = 20;
/// The trajectory ends if the probe burrows this far without stopping.
const MAX_PENETRATION_MM: f64 = 30.0;

/// Drive the array toward the object in a straight line, scanning and
/// classifying every frame; on detection, halt after the configured latency.
pub fn run_probe(
    spec: &ScenarioSpec,
    model: &SubstrateModel,
    layout: &SkinLayout,
    cfg: &AcquisitionConfig,
    detector: &dyn ContactDetector,
) -> Result<(ContactOutcome, ProbeLog)> {
    spec.validate()?;
    let mut scanner = Scanner::new(
        model.clone(),
        layout,
        cfg.clone(),
        derive_seed(spec.seed, SeedDomain::Scenario, 0),
    )?;
    let zeros = vec![0.0; layout.len()];
    scanner.settle(&zeros, 1.0)?;
    let baseline = averaged_baseline(&mut scanner, 50)?;

    // Contact patches centered on the array.
    let (min_x, min_y, max_x, max_y) = layout.center_bounds();
    let pose = Pose::offset((min_x + max_x) / 2.0, (min_y + max_y) / 2.0);

    let dt = 1.0 / cfg.scan_rate;
    let mut traveled = 0.0;
    let mut yielded = false;
    let mut halted = false;
    let mut detected_at: Option<u32> = None;
    let mut halt_at: Option<u32> = None;
    let mut yield_at: Option<u32> = None;
    let mut peak_force: f64 = 0.0;
    let mut frames = Vec::new();
    let mut forces = Vec::new();

    let mut frame_idx: u32 = 0;
    loop {
        if !halted {
            traveled += spec.approach_speed_mm_s * dt;
        }
        let penetration = (traveled - spec.start_distance_mm).max(0.0);
        let mut force = if yielded {
            0.0
        } else {
            spec.object.stiffness_n_per_mm * penetration
        };
        if !yielded && force >= spec.object.topple_force_n {
            force = spec.object.topple_force_n;
            yielded = true;
            yield_at = Some(frame_idx);
        }
        peak_force = peak_force.max(force);

        let pressures = distribute_force(&spec.object.footprint, &pose, layout, force)?;
        let frame = scanner.scan(&pressures)?;
        let devs = deviation_features(&frame, &baseline)?;
        if detected_at.is_none() && detector.detect(&devs) {
            detected_at = Some(frame_idx);
        }
        if let Some(d) = detected_at {
            if !halted && frame_idx >= d + spec.stop_latency_frames {
                halted = true;
                halt_at = Some(frame_idx);
            }
        }
        frames.push(frame);
        forces.push(force);

        let done = halt_at.map_or(false, |h| frame_idx >= h + PROBE_TAIL_FRAMES)
            || (halt_at.is_none()
                && yield_at.map_or(false, |y| frame_idx >= y + PROBE_TAIL_FRAMES))
            || penetration >= MAX_PENETRATION_MM;
        if done {
            break;
        }
        frame_idx += 1;
    }

    let toppled = yielded;
    Ok((
        ContactOutcome {
            detected: detected_at.is_some(),
            frames_to_detect: detected_at,
            peak_force_n: peak_force,
            toppled,
        },
        ProbeLog {
            frames,
            forces_n: forces,
            baseline,
        },
    ))
}

/// One row of the motion-arrest results table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteRow {
    pub substrate: String,
    pub object: String,
    pub orientation: usize,
    pub detected: bool,
    pub toppled: bool,
    pub frames_to_detect: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct ProbeSuiteConfig {
    pub approach_speed_mm_s: f64,
    pub start_distance_mm: f64,
    pub stop_latency_frames: u32,
    /// Training-set size for each substrate's contact classifier.
    pub detector_frames: usize,
    pub detector_trees: usize,
    pub seed: u64,
}

impl Default for ProbeSuiteConfig {
    fn default() -> Self {
        ProbeSuiteConfig {
            approach_speed_mm_s: 20.0,
            start_distance_mm: DEFAULT_START_DISTANCE_MM,
            stop_latency_frames: 3,
            detector_frames: 14_000,
            detector_trees: 100,
            seed: 0,
        }
    }
}

/// 6 objects x 3 orientations for each substrate, with a contact classifier
/// trained per substrate on synthetic push data. Rows come back sorted by
/// (substrate, object, orientation).
pub fn run_probe_suite(
    substrates: &[SubstrateModel],
    suite: &ProbeSuiteConfig,
) -> Result<Vec<SuiteRow>> {
    run_probe_suite_with(substrates, suite, |model, seed| {
        Ok(Box::new(train_contact_detector(
            model,
            &SkinLayout::palm34(),
            suite.detector_frames,
            suite.detector_trees,
            seed,
        )?))
    })
}

/// Same suite with detector construction injected (ablations swap in a
/// threshold rule or an oracle here).
pub fn run_probe_suite_with(
    substrates: &[SubstrateModel],
    suite: &ProbeSuiteConfig,
    make_detector: impl Fn(&SubstrateModel, u64) -> Result<Box<dyn ContactDetector>>,
) -> Result<Vec<SuiteRow>> {
    let catalog = ProbeCatalog::builtin();
    let layout = SkinLayout::palm34();
    let cfg = AcquisitionConfig::for_layout(&layout);
    let mut rows = Vec::new();
    for model in substrates {
        let detector_seed = derive_seed(suite.seed, SeedDomain::Scenario, 7_000);
        let detector = make_detector(model, detector_seed)?;
        for (oi, object) in catalog.objects.iter().enumerate() {
            for orientation in 0..object.orientations.len() {
                let spec = ScenarioSpec {
                    object: object.resolve(orientation)?,
                    approach_speed_mm_s: suite.approach_speed_mm_s,
                    start_distance_mm: suite.start_distance_mm,
                    orientation,
                    stop_latency_frames: suite.stop_latency_frames,
                    seed: derive_seed(
                        suite.seed,
                        SeedDomain::Scenario,
                        (oi * 8 + orientation) as u64 + 1,
                    ),
                };
                let (outcome, _) = run_probe(&spec, model, &layout, &cfg, detector.as_ref())?;
                rows.push(SuiteRow {
                    substrate: model.name.key().to_string(),
                    object: object.name.clone(),
                    orientation,
                    detected: outcome.detected,
                    toppled: outcome.toppled,
                    frames_to_detect: outcome.frames_to_detect,
                });
            }
        }
    }
    Ok(rows)
}

/// Train the default forest contact detector for one substrate.
pub fn train_contact_detector(
    model: &SubstrateModel,
    layout: &SkinLayout,
    frames: usize,
    trees: usize,
    seed: u64,
) -> Result<ForestDetector> {
    let spec = ContactDatasetSpec {
        frames,
        seed: derive_seed(seed, SeedDomain::Scenario, 1),
        ..ContactDatasetSpec::default()
    };
    let data = generate_contact_dataset(model, layout, &spec)?;
    // Deep trees so a quiet path can rule out most of the array one taxel at
    // a time (contact anywhere must fire); wide leaves keep isolated
    // borderline frames from forming contact pockets inside the noise cloud.
    let params = ForestParams {
        n_trees: trees,
        max_depth: 22,
        min_leaf: 15,
        seed: derive_seed(seed, SeedDomain::ForestTree, 2),
        ..ForestParams::default()
    };
    Ok(ForestDetector {
        model: train_forest(&data, &params)?,
    })
}

/// Push-through training data generation: straight-line approaches that
/// either keep pushing after contact or stop and hold a light force,
/// mirroring a five-repetition collection protocol over a set of varied
/// rigid training shapes. Frames are labeled by ground truth (any contact
/// force present) and subsampled to the requested prevalence.
#[derive(Debug, Clone)]
pub struct ContactDatasetSpec {
    pub frames: usize,
    pub contact_fraction: f64,
    pub approach_mm: f64,
    pub push_mm: f64,
    pub speed_mm_s: f64,
    pub repetitions: usize,
    /// Frames dropped right after contact onset, while the substrate is
    /// still relaxing toward the new load and the reading is not yet
    /// distinguishable from rest. Keeping them would put contact labels on
    /// noise-shaped features.
    pub transition_skip_frames: u32,
    /// Target forces for the hold runs, newtons. Light settled contacts pin
    /// the low end of the learnable boundary for the sensitive substrates.
    pub hold_forces_n: Vec<f64>,
    pub seed: u64,
}

impl Default for ContactDatasetSpec {
    fn default() -> Self {
        ContactDatasetSpec {
            frames: 57_334,
            contact_fraction: 0.45,
            approach_mm: 24.0,
            push_mm: 20.0,
            speed_mm_s: 20.0,
            repetitions: 5,
            transition_skip_frames: 8,
            hold_forces_n: vec![0.012, 0.025, 0.05, 0.1, 0.2, 0.4],
            seed: 0,
        }
    }
}

/// Varied rigid shapes used only to generate training pressure fields.
/// Mostly small, localized contacts: a palm meets object protrusions and
/// edges far more often than full faces.
fn training_shapes() -> Vec<(Vec<FootprintPatch>, f64)> {
    let patch = |cx: f64, cy: f64, w: f64, h: f64, share: f64| FootprintPatch {
        cx,
        cy,
        width: w,
        height: h,
        share,
    };
    vec![
        // Probe tip: contact focused on a single pad.
        (vec![patch(0.0, 0.0, 6.0, 6.0, 1.0)], 0.5),
        (vec![patch(0.0, 0.0, 10.0, 10.0, 1.0)], 0.4),
        (vec![patch(0.0, 0.0, 12.0, 8.0, 1.0)], 0.6),
        (
            vec![
                patch(-8.0, 0.0, 8.0, 8.0, 0.5),
                patch(8.0, 0.0, 8.0, 8.0, 0.5),
            ],
            0.7,
        ),
        (vec![patch(0.0, 0.0, 14.0, 12.0, 1.0)], 0.8),
        (vec![patch(0.0, 0.0, 16.0, 10.0, 1.0)], 0.5),
        (
            vec![
                patch(-6.0, -6.0, 8.0, 8.0, 0.34),
                patch(6.0, -6.0, 8.0, 8.0, 0.33),
                patch(0.0, 8.0, 8.0, 8.0, 0.33),
            ],
            0.8,
        ),
        (vec![patch(0.0, 0.0, 22.0, 14.0, 1.0)], 0.9),
        (vec![patch(0.0, 0.0, 12.0, 26.0, 1.0)], 0.6),
        (vec![patch(2.0, -2.0, 28.0, 24.0, 1.0)], 0.9),
        (vec![patch(0.0, 0.0, 34.0, 12.0, 1.0)], 0.8),
    ]
}

/// Generate labeled contact/no-contact frames at the requested prevalence.
pub fn generate_contact_dataset(
    model: &SubstrateModel,
    layout: &SkinLayout,
    spec: &ContactDatasetSpec,
) -> Result<Dataset> {
    if spec.frames == 0 {
        return Err(Error::contract("need at least one frame"));
    }
    if !(0.0..=1.0).contains(&spec.contact_fraction) {
        return Err(Error::contract("contact_fraction must be in [0, 1]"));
    }
    let cfg = AcquisitionConfig::for_layout(layout);
    let (min_x, min_y, max_x, max_y) = layout.center_bounds();
    let center = ((min_x + max_x) / 2.0, (min_y + max_y) / 2.0);
    let shapes = training_shapes();

    let want_contact = (spec.frames as f64 * spec.contact_fraction).round() as usize;
    let want_rest = spec.frames - want_contact;
    let mut contact_pool: Vec<Vec<f64>> = Vec::with_capacity(want_contact + 256);
    let mut rest_pool: Vec<Vec<f64>> = Vec::with_capacity(want_rest + 256);

    let dt_frames_per_mm = cfg.scan_rate / spec.speed_mm_s;
    let mut run: u64 = 0;
    while contact_pool.len() < want_contact || rest_pool.len() < want_rest {
        let run_seed = derive_seed(spec.seed, SeedDomain::Scenario, 100 + run);
        let mut jitter = stream(derive_seed(spec.seed, SeedDomain::Placement, 100 + run));
        let shape_idx = (run as usize / spec.repetitions.max(1)) % shapes.len();
        let (footprint, stiffness) = &shapes[shape_idx];
        let pose = Pose {
            dx_mm: center.0 + jitter.random_range(-12.0..12.0),
            dy_mm: center.1 + jitter.random_range(-12.0..12.0),
            rotation_rad: jitter.random_range(0.0..std::f64::consts::TAU),
        };
        let mut scanner = Scanner::new(model.clone(), layout, cfg.clone(), run_seed)?;
        let zeros = vec![0.0; layout.len()];
        scanner.settle(&zeros, 0.5)?;
        let baseline = averaged_baseline(&mut scanner, 50)?;

        // Every third run stops at a light target force and holds; the rest
        // push all the way through.
        let hold_target = if !spec.hold_forces_n.is_empty() && run % 3 == 2 {
            Some(spec.hold_forces_n[(run as usize / 3) % spec.hold_forces_n.len()])
        } else {
            None
        };
        let total_frames = ((spec.approach_mm + spec.push_mm) * dt_frames_per_mm).round() as u32;
        let mut traveled = -spec.approach_mm;
        let mut contact_age: Option<u32> = None;
        for _ in 0..total_frames {
            let moving = match hold_target {
                Some(target) => stiffness * (traveled.max(0.0)) < target,
                None => true,
            };
            if moving {
                traveled += spec.speed_mm_s / cfg.scan_rate;
            }
            let penetration = traveled.max(0.0);
            let force = (stiffness * penetration).min(3.0);
            let pressures = distribute_force(footprint, &pose, layout, force)?;
            let frame = scanner.scan(&pressures)?;
            let features = deviation_features(&frame, &baseline)?;
            if force > 0.0 {
                let age = contact_age.map_or(0, |a| a + 1);
                contact_age = Some(age);
                if age >= spec.transition_skip_frames && contact_pool.len() < want_contact + 256 {
                    contact_pool.push(features);
                }
            } else if rest_pool.len() < want_rest + 256 {
                rest_pool.push(features);
            }
        }
        run += 1;
        if run > 100_000 {
            return Err(Error::contract("contact dataset generation did not converge"));
        }
    }

    // Deterministic shuffle inside each pool, then interleave to targets.
    let mut rng = stream(derive_seed(spec.seed, SeedDomain::Placement, 0));
    shuffle(&mut contact_pool, &mut rng);
    shuffle(&mut rest_pool, &mut rng);
    contact_pool.truncate(want_contact);
    rest_pool.truncate(want_rest);

    let mut features = Vec::with_capacity(spec.frames);
    let mut labels = Vec::with_capacity(spec.frames);
    for item in rest_pool {
        features.push(item);
        labels.push(0);
    }
    for item in contact_pool {
        features.push(item);
        labels.push(1);
    }
    let order = shuffled_indices(features.len(), &mut rng);
    let features = order.iter().map(|&i| std::mem::take(&mut features[i])).collect();
    let labels = order.iter().map(|&i| labels[i]).collect();

    Ok(Dataset {
        features,
        labels,
        label_names: vec!["no_contact".into(), "contact".into()],
        split_seed: derive_seed(spec.seed, SeedDomain::DatasetSplit, 0),
    })
}

#[derive(Debug, Clone)]
pub struct RecognitionDatasetSpec {
    pub total_samples: usize,
    pub trials: usize,
    pub offset_jitter_mm: f64,
    /// Settling time under load before the sample frame is taken.
    pub settle_s: f64,
    pub seed: u64,
}

impl Default for RecognitionDatasetSpec {
    fn default() -> Self {
        RecognitionDatasetSpec {
            total_samples: 1_172,
            trials: 3,
            offset_jitter_mm: 3.0,
            settle_s: 1.0,
            seed: 0,
        }
    }
}

/// Place-and-sample dataset over the recognition catalog: each sample picks
/// the object up, replaces it near the array center at a random orientation,
/// waits for the substrate to settle and records one frame. The object order
/// is reshuffled between trials.
pub fn generate_recognition_dataset(
    model: &SubstrateModel,
    layout: &SkinLayout,
    catalog: &RecognitionCatalog,
    spec: &RecognitionDatasetSpec,
) -> Result<Dataset> {
    if spec.trials == 0 || spec.total_samples < catalog.objects.len() {
        return Err(Error::contract(
            "need at least one trial and one sample per object",
        ));
    }
    let cfg = AcquisitionConfig::for_layout(layout);
    let n_objects = catalog.objects.len();

    // Spread total_samples over (trial, object) cells as evenly as possible,
    // deterministically.
    let cells = spec.trials * n_objects;
    let base = spec.total_samples / cells;
    let extra = spec.total_samples % cells;
    let count_for = |cell: usize| base + usize::from(cell < extra);

    let mut features = Vec::with_capacity(spec.total_samples);
    let mut labels = Vec::with_capacity(spec.total_samples);
    for trial in 0..spec.trials {
        let trial_seed = derive_seed(spec.seed, SeedDomain::Scenario, 500 + trial as u64);
        let mut scanner = Scanner::new(model.clone(), layout, cfg.clone(), trial_seed)?;
        let zeros = vec![0.0; layout.len()];
        scanner.settle(&zeros, 1.0)?;
        let baseline = averaged_baseline(&mut scanner, 50)?;
        let mut rng = stream(derive_seed(spec.seed, SeedDomain::Placement, 500 + trial as u64));

        let mut order: Vec<usize> = (0..n_objects).collect();
        for i in (1..order.len()).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
        for &obj_idx in &order {
            let object = catalog.objects[obj_idx].resolve();
            let samples = count_for(trial * n_objects + obj_idx);
            for _ in 0..samples {
                let pose = Pose {
                    dx_mm: rng.random_range(-spec.offset_jitter_mm..=spec.offset_jitter_mm),
                    dy_mm: rng.random_range(-spec.offset_jitter_mm..=spec.offset_jitter_mm),
                    rotation_rad: rng.random_range(0.0..std::f64::consts::TAU),
                };
                let pressures = place_object(&object, &pose, layout)?;
                scanner.settle(&pressures, spec.settle_s)?;
                let frame = scanner.scan(&pressures)?;
                features.push(deviation_features(&frame, &baseline)?);
                labels.push(obj_idx);
                // Pick the object back up and let the substrate relax.
                scanner.settle(&zeros, spec.settle_s)?;
            }
        }
    }
    Ok(Dataset {
        features,
        labels,
        label_names: catalog.names(),
        split_seed: derive_seed(spec.seed, SeedDomain::DatasetSplit, 1),
    })
}

/// Reach / grasp / lift phases of a manipulation sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraspPhase {
    Reach,
    Grasp,
    Lift,
}

/// How the contact pattern changes when the object leaves the table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftShift {
    pub dx_mm: f64,
    pub dy_mm: f64,
    pub force_scale: f64,
}

impl LiftShift {
    pub fn none() -> LiftShift {
        LiftShift {
            dx_mm: 0.0,
            dy_mm: 0.0,
            force_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GraspLog {
    pub frames: Vec<Frame>,
    pub baseline: Frame,
    pub phases: Vec<GraspPhase>,
    pub grasp_start: usize,
    pub lift_start: usize,
}

#[derive(Debug, Clone)]
pub struct GraspConfig {
    pub reach_s: f64,
    pub grasp_s: f64,
    pub lift_s: f64,
    /// Grip force as a multiple of the object's weight.
    pub grip_factor: f64,
    pub seed: u64,
}

impl Default for GraspConfig {
    fn default() -> Self {
        GraspConfig {
            reach_s: 1.0,
            grasp_s: 2.0,
            lift_s: 2.0,
            grip_factor: 1.5,
            seed: 0,
        }
    }
}

/// Emit a reach (no contact) / grasp (pattern A) / lift (pattern A shifted
/// and re-weighted) frame sequence with labeled phase boundaries.
pub fn grasp_lift_sequence(
    object: &ObjectSpec,
    grasp_pose: &Pose,
    lift_shift: &LiftShift,
    model: &SubstrateModel,
    layout: &SkinLayout,
    cfg: &GraspConfig,
) -> Result<GraspLog> {
    let acq = AcquisitionConfig::for_layout(layout);
    let mut scanner = Scanner::new(
        model.clone(),
        layout,
        acq.clone(),
        derive_seed(cfg.seed, SeedDomain::Scenario, 9_000),
    )?;
    let zeros = vec![0.0; layout.len()];
    scanner.settle(&zeros, 1.0)?;
    let baseline = averaged_baseline(&mut scanner, 50)?;

    let grip_force = object.mass_g / 1_000.0 * GRAVITY_M_S2 * cfg.grip_factor;
    let grasp_pressures = distribute_force(&object.footprint, grasp_pose, layout, grip_force)?;
    let lift_pose = Pose {
        dx_mm: grasp_pose.dx_mm + lift_shift.dx_mm,
        dy_mm: grasp_pose.dy_mm + lift_shift.dy_mm,
        rotation_rad: grasp_pose.rotation_rad,
    };
    let lift_pressures = distribute_force(
        &object.footprint,
        &lift_pose,
        layout,
        grip_force * lift_shift.force_scale,
    )?;

    let n_reach = (cfg.reach_s * acq.scan_rate).round() as usize;
    let n_grasp = (cfg.grasp_s * acq.scan_rate).round() as usize;
    let n_lift = (cfg.lift_s * acq.scan_rate).round() as usize;
    let mut frames = Vec::with_capacity(n_reach + n_grasp + n_lift);
    let mut phases = Vec::with_capacity(n_reach + n_grasp + n_lift);
    for (count, pressures, phase) in [
        (n_reach, &zeros, GraspPhase::Reach),
        (n_grasp, &grasp_pressures, GraspPhase::Grasp),
        (n_lift, &lift_pressures, GraspPhase::Lift),
    ] {
        for _ in 0..count {
            frames.push(scanner.scan(pressures)?);
            phases.push(phase);
        }
    }
    Ok(GraspLog {
        frames,
        baseline,
        phases,
        grasp_start: n_reach,
        lift_start: n_reach + n_grasp,
    })
}

fn shuffle<T>(items: &mut [T], rng: &mut rand_chacha::ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}

fn shuffled_indices(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    shuffle(&mut order, rng);
    order
}
