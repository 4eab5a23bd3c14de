//! Versioned object catalogs for the scenario experiments. The canonical
//! entries live in `data/*.json`, embedded at compile time; user catalogs in
//! the same format can be loaded at run time.
//!
//! Every number in the catalogs is a calibrated simulation parameter, never
//! a measured property of a physical object.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{FootprintPatch, ObjectSpec};

const PROBE_JSON: &str = include_str!("../data/probe_objects.json");
const RECOGNITION_JSON: &str = include_str!("../data/recognition_objects.json");

/// One probe object orientation: which patches touch the array first and at
/// what force the object gives way (topples, or collapses when fragile).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrientationDef {
    pub yield_force_n: f64,
    pub patches: Vec<FootprintPatch>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeObjectDef {
    pub name: String,
    pub mass_g: f64,
    pub stiffness_n_per_mm: f64,
    pub fragile: bool,
    pub orientations: Vec<OrientationDef>,
}

impl ProbeObjectDef {
    /// Resolve one orientation into a flat [`ObjectSpec`].
    pub fn resolve(&self, orientation: usize) -> Result<ObjectSpec> {
        let def = self.orientations.get(orientation).ok_or_else(|| {
            Error::contract(format!(
                "{} has {} orientations, asked for {orientation}",
                self.name,
                self.orientations.len()
            ))
        })?;
        Ok(ObjectSpec {
            name: self.name.clone(),
            footprint: def.patches.clone(),
            mass_g: self.mass_g,
            stiffness_n_per_mm: self.stiffness_n_per_mm,
            topple_force_n: def.yield_force_n,
            fragile: self.fragile,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeCatalog {
    pub format_version: u32,
    #[serde(default)]
    pub comment: String,
    pub objects: Vec<ProbeObjectDef>,
}

impl ProbeCatalog {
    pub fn builtin() -> ProbeCatalog {
        ProbeCatalog::parse(PROBE_JSON).expect("embedded probe catalog is valid")
    }

    pub fn parse(json: &str) -> Result<ProbeCatalog> {
        let catalog: ProbeCatalog = serde_json::from_str(json)
            .map_err(|e| Error::format(format!("probe catalog: {e}")))?;
        if catalog.format_version != 1 {
            return Err(Error::format("unsupported probe catalog version"));
        }
        for object in &catalog.objects {
            if object.orientations.is_empty() {
                return Err(Error::format(format!("{} has no orientations", object.name)));
            }
            for def in &object.orientations {
                if def.yield_force_n <= 0.0 {
                    return Err(Error::format(format!("{}: yield must be > 0", object.name)));
                }
                validate_patches(&object.name, &def.patches)?;
            }
        }
        Ok(catalog)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecognitionObjectDef {
    pub name: String,
    pub mass_g: f64,
    pub patches: Vec<FootprintPatch>,
}

impl RecognitionObjectDef {
    pub fn resolve(&self) -> ObjectSpec {
        ObjectSpec {
            name: self.name.clone(),
            footprint: self.patches.clone(),
            mass_g: self.mass_g,
            // Placement scenarios never probe; these fields are inert here.
            stiffness_n_per_mm: 1.0,
            topple_force_n: f64::INFINITY,
            fragile: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecognitionCatalog {
    pub format_version: u32,
    #[serde(default)]
    pub comment: String,
    pub objects: Vec<RecognitionObjectDef>,
}

impl RecognitionCatalog {
    pub fn builtin() -> RecognitionCatalog {
        RecognitionCatalog::parse(RECOGNITION_JSON).expect("embedded recognition catalog is valid")
    }

    pub fn parse(json: &str) -> Result<RecognitionCatalog> {
        let catalog: RecognitionCatalog = serde_json::from_str(json)
            .map_err(|e| Error::format(format!("recognition catalog: {e}")))?;
        if catalog.format_version != 1 {
            return Err(Error::format("unsupported recognition catalog version"));
        }
        for object in &catalog.objects {
            validate_patches(&object.name, &object.patches)?;
        }
        Ok(catalog)
    }

    pub fn names(&self) -> Vec<String> {
        self.objects.iter().map(|o| o.name.clone()).collect()
    }
}

fn validate_patches(name: &str, patches: &[FootprintPatch]) -> Result<()> {
    if patches.is_empty() {
        return Err(Error::format(format!("{name} has no contact patches")));
    }
    let share: f64 = patches.iter().map(|p| p.share).sum();
    if (share - 1.0).abs() > 1e-9 {
        return Err(Error::format(format!(
            "{name}: patch shares sum to {share}, expected 1"
        )));
    }
    if patches.iter().any(|p| p.width <= 0.0 || p.height <= 0.0) {
        return Err(Error::format(format!("{name}: patch with non-positive size")));
    }
    if patches.iter().any(|p| p.share <= 0.0) {
        return Err(Error::format(format!("{name}: patch with non-positive share")));
    }
    Ok(())
}
