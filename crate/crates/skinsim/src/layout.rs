//! Taxel geometry: where each sensing element sits and how large it is.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One tactile element. Position is the pad center in millimeters within the
/// sensor plane; width/height are the pad dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Taxel {
    pub id: usize,
    pub cx: f64,
    pub cy: f64,
    pub width: f64,
    pub height: f64,
}

impl Taxel {
    /// Pad area in square meters.
    pub fn area_m2(&self) -> f64 {
        self.width * self.height * 1e-6
    }
}

/// Geometric placement of every sensing element in an array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkinLayout {
    pub format_version: u32,
    pub name: String,
    pub taxels: Vec<Taxel>,
}

impl SkinLayout {
    /// The 34-pad palm arrangement: staggered rows tapering like a palm,
    /// every pad 1 cm².
    pub fn palm34() -> SkinLayout {
        let rows: [(usize, f64); 7] = [
            (4, 0.0),
            (5, 11.0),
            (6, 22.0),
            (6, 33.0),
            (5, 44.0),
            (4, 55.0),
            (4, 66.0),
        ];
        let mut taxels = Vec::with_capacity(34);
        let mut id = 0;
        for (count, y) in rows {
            let span = (count - 1) as f64 * 11.0;
            for i in 0..count {
                taxels.push(Taxel {
                    id,
                    cx: i as f64 * 11.0 - span / 2.0,
                    cy: y,
                    width: 10.0,
                    height: 10.0,
                });
                id += 1;
            }
        }
        let layout = SkinLayout {
            format_version: 1,
            name: "palm34".into(),
            taxels,
        };
        debug_assert!(layout.validate().is_ok());
        layout
    }

    /// The 5x4 rectangular array used for object recognition: 20 pads of
    /// 1 cm² on an 11 mm pitch, centered on the origin.
    pub fn grid5x4() -> SkinLayout {
        SkinLayout::grid("grid5x4", 5, 4, 11.0, 10.0)
    }

    pub fn grid(name: &str, cols: usize, rows: usize, pitch: f64, pad: f64) -> SkinLayout {
        let mut taxels = Vec::with_capacity(cols * rows);
        let x0 = -((cols - 1) as f64) * pitch / 2.0;
        let y0 = -((rows - 1) as f64) * pitch / 2.0;
        for r in 0..rows {
            for c in 0..cols {
                taxels.push(Taxel {
                    id: r * cols + c,
                    cx: x0 + c as f64 * pitch,
                    cy: y0 + r as f64 * pitch,
                    width: pad,
                    height: pad,
                });
            }
        }
        let layout = SkinLayout {
            format_version: 1,
            name: name.into(),
            taxels,
        };
        debug_assert!(layout.validate().is_ok());
        layout
    }

    pub fn len(&self) -> usize {
        self.taxels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taxels.is_empty()
    }

    /// Smallest center-to-center distance between any two pads.
    pub fn pitch(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.taxels.iter().enumerate() {
            for b in &self.taxels[i + 1..] {
                let d = ((a.cx - b.cx).powi(2) + (a.cy - b.cy).powi(2)).sqrt();
                best = best.min(d);
            }
        }
        best
    }

    /// Bounding box of pad centers: (min_x, min_y, max_x, max_y).
    pub fn center_bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for t in &self.taxels {
            b.0 = b.0.min(t.cx);
            b.1 = b.1.min(t.cy);
            b.2 = b.2.max(t.cx);
            b.3 = b.3.max(t.cy);
        }
        b
    }

    pub fn validate(&self) -> Result<()> {
        if self.taxels.is_empty() {
            return Err(Error::contract("layout has no taxels"));
        }
        let mut seen = vec![false; self.taxels.len()];
        for t in &self.taxels {
            if t.id >= self.taxels.len() || seen[t.id] {
                return Err(Error::contract(format!(
                    "taxel ids must be unique and dense 0..K-1; bad id {}",
                    t.id
                )));
            }
            seen[t.id] = true;
            if !(t.width > 0.0 && t.height > 0.0) {
                return Err(Error::contract(format!("taxel {} has non-positive area", t.id)));
            }
        }
        Ok(())
    }

    pub fn parse(json: &str) -> Result<SkinLayout> {
        let layout: SkinLayout =
            serde_json::from_str(json).map_err(|e| Error::format(format!("layout file: {e}")))?;
        if layout.format_version != 1 {
            return Err(Error::format(format!(
                "unsupported layout version {}",
                layout.format_version
            )));
        }
        layout.validate()?;
        Ok(layout)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }
}
