//! Plot-ready CSV emission and parsing for frames, traces, sweeps, datasets
//! and result tables, plus atomic file writing. All formatting is fixed so
//! identical inputs produce byte-identical files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::daq::Frame;
use crate::error::{Error, Result};
use crate::forest::Dataset;
use crate::benchtop::{ResponseTrace, SensitivityCurve};
use crate::scenario::SuiteRow;

/// Write through a temp file and rename, so readers never observe a partial
/// file and reruns replace outputs in one step.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let parent = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(parent)
        .map_err(|e| Error::format(format!("creating {}: {e}", parent.display())))?;
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, contents).map_err(|e| Error::format(format!("writing {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| Error::format(format!("renaming into {}: {e}", path.display())))?;
    Ok(())
}

/// Frames as CSV rows `t,seq,v0,...,v{K-1}`.
pub fn frames_to_csv(frames: &[Frame]) -> String {
    let k = frames.first().map_or(0, |f| f.values.len());
    let mut out = String::from("t,seq");
    for i in 0..k {
        out.push_str(&format!(",v{i}"));
    }
    out.push('\n');
    for frame in frames {
        out.push_str(&format!("{:.6},{}", frame.t, frame.seq));
        for v in &frame.values {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

pub fn frames_from_csv(text: &str) -> Result<Vec<Frame>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::format("empty frames CSV"))?;
    if !header.starts_with("t,seq") {
        return Err(Error::format("frames CSV must start with `t,seq`"));
    }
    let k = header.split(',').count().saturating_sub(2);
    let mut frames = Vec::new();
    for (no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != k + 2 {
            return Err(Error::format(format!(
                "frames CSV line {}: expected {} fields, got {}",
                no + 2,
                k + 2,
                fields.len()
            )));
        }
        let t: f64 = fields[0]
            .parse()
            .map_err(|_| Error::format(format!("bad t on line {}", no + 2)))?;
        let seq: u16 = fields[1]
            .parse()
            .map_err(|_| Error::format(format!("bad seq on line {}", no + 2)))?;
        let values = fields[2..]
            .iter()
            .map(|f| f.parse::<u16>())
            .collect::<std::result::Result<Vec<u16>, _>>()
            .map_err(|_| Error::format(format!("bad value on line {}", no + 2)))?;
        frames.push(Frame { t, seq, values });
    }
    Ok(frames)
}

/// Response trace as `t,mean,std` rows.
pub fn trace_to_csv(trace: &ResponseTrace) -> String {
    let mut out = String::from("t,mean,std\n");
    for i in 0..trace.t.len() {
        out.push_str(&format!(
            "{:.6},{:.9},{:.9}\n",
            trace.t[i], trace.mean[i], trace.std[i]
        ));
    }
    out
}

/// Sensitivity curve as `pressure_pa,mean_output` rows.
pub fn sweep_to_csv(curve: &SensitivityCurve) -> String {
    let mut out = String::from("pressure_pa,mean_output\n");
    for (p, v) in curve.pressure_pa.iter().zip(&curve.mean_output) {
        out.push_str(&format!("{p:.6},{v:.9}\n"));
    }
    out
}

/// Dataset rows `label,v0,...,v{K-1}`; deviations are signed counts.
pub fn dataset_to_csv(data: &Dataset) -> String {
    let k = data.n_features();
    let mut out = String::from("label");
    for i in 0..k {
        out.push_str(&format!(",v{i}"));
    }
    out.push('\n');
    for (features, label) in data.features.iter().zip(&data.labels) {
        out.push_str(&format!("{label}"));
        for f in features {
            // Deviations are integral counts; keep them that way on disk.
            out.push_str(&format!(",{}", *f as i64));
        }
        out.push('\n');
    }
    out
}

/// JSON sidecar carrying everything the CSV cannot.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub format_version: u32,
    pub kind: String,
    pub label_names: Vec<String>,
    pub split_seed: u64,
    pub train_fraction: f64,
    pub taxel_count: usize,
    pub layout: String,
}

pub fn dataset_from_csv(csv: &str, meta: &DatasetMeta) -> Result<Dataset> {
    let mut lines = csv.lines();
    let header = lines.next().ok_or_else(|| Error::format("empty dataset CSV"))?;
    if !header.starts_with("label,") {
        return Err(Error::format("dataset CSV must start with `label,`"));
    }
    let k = header.split(',').count() - 1;
    if k != meta.taxel_count {
        return Err(Error::format(format!(
            "dataset CSV has {k} features, sidecar says {}",
            meta.taxel_count
        )));
    }
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let label: usize = fields
            .next()
            .unwrap()
            .parse()
            .map_err(|_| Error::format(format!("bad label on line {}", no + 2)))?;
        let row = fields
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| Error::format(format!("bad feature on line {}", no + 2)))?;
        if row.len() != k {
            return Err(Error::format(format!("short row on line {}", no + 2)));
        }
        features.push(row);
        labels.push(label);
    }
    let data = Dataset {
        features,
        labels,
        label_names: meta.label_names.clone(),
        split_seed: meta.split_seed,
    };
    data.validate()?;
    Ok(data)
}

/// Motion-arrest results table.
pub fn suite_to_csv(rows: &[SuiteRow]) -> String {
    let mut out = String::from("substrate,object,orientation,detected,toppled,frames_to_detect\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.substrate,
            row.object,
            row.orientation,
            row.detected,
            row.toppled,
            row.frames_to_detect.map_or(String::new(), |f| f.to_string()),
        ));
    }
    out
}

/// Confusion matrix with label names on both axes.
pub fn confusion_to_csv(labels: &[String], confusion: &[Vec<u32>]) -> String {
    let mut out = String::from("true\\predicted");
    for name in labels {
        out.push_str(&format!(",{name}"));
    }
    out.push('\n');
    for (name, row) in labels.iter().zip(confusion) {
        out.push_str(name);
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_csv_round_trip() {
        let frames = vec![
            Frame {
                seq: 0,
                t: 0.0,
                values: vec![816, 512],
            },
            Frame {
                seq: 1,
                t: 0.01,
                values: vec![815, 511],
            },
        ];
        let csv = frames_to_csv(&frames);
        assert!(csv.starts_with("t,seq,v0,v1\n"));
        let parsed = frames_from_csv(&csv).unwrap();
        assert_eq!(parsed, frames);
    }

    #[test]
    fn dataset_csv_round_trip() {
        let data = Dataset {
            features: vec![vec![0.0, 12.0], vec![-3.0, 200.0]],
            labels: vec![0, 1],
            label_names: vec!["no_contact".into(), "contact".into()],
            split_seed: 9,
        };
        let meta = DatasetMeta {
            format_version: 1,
            kind: "contact".into(),
            label_names: data.label_names.clone(),
            split_seed: 9,
            train_fraction: 0.8,
            taxel_count: 2,
            layout: "grid5x4".into(),
        };
        let parsed = dataset_from_csv(&dataset_to_csv(&data), &meta).unwrap();
        assert_eq!(parsed.features, data.features);
        assert_eq!(parsed.labels, data.labels);
    }

    #[test]
    fn malformed_csv_is_a_format_error() {
        assert!(frames_from_csv("nope\n1,2,3\n").is_err());
        let meta = DatasetMeta {
            format_version: 1,
            kind: "contact".into(),
            label_names: vec!["a".into()],
            split_seed: 0,
            train_fraction: 0.8,
            taxel_count: 1,
            layout: "grid5x4".into(),
        };
        assert!(dataset_from_csv("label,v0\nx,1\n", &meta).is_err());
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = std::env::temp_dir().join("skinsim-export-test");
        let path = dir.join("out.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
        let _ = fs::remove_dir_all(&dir);
    }
}
