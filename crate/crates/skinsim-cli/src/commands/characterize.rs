use serde::Serialize;

use skinsim::benchtop::{
    hysteresis_percent, linear_r2, normalized_change, rise_fall_times, saturation_pressure,
    sensitivity_sweep, step_response, HysteresisConfig, StepConfig, SweepConfig,
};
use skinsim::export::{sweep_to_csv, to_json_pretty, trace_to_csv, write_atomic};
use skinsim::rng::{derive_seed, SeedDomain};
use skinsim::substrate::Material;

use crate::{apply_config, parse_material, resolve_substrate, CharacterizeArgs, CliError};

#[derive(Debug, Serialize)]
struct SensitivitySummary {
    change_0_300: f64,
    p95_saturation_pa: f64,
    linear_r2: f64,
}

#[derive(Debug, Serialize)]
struct MaterialSummary {
    material: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    hysteresis_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_rise_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_fall_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sensitivity: Option<SensitivitySummary>,
}

#[derive(Debug, Serialize)]
struct Summary {
    format_version: u32,
    seed: u64,
    materials: Vec<MaterialSummary>,
}

pub fn run(mut args: CharacterizeArgs) -> Result<(), CliError> {
    let mut seed = args.seed;
    apply_config(&mut args.common, &mut seed)?;

    let materials: Vec<Material> = if args.all {
        Material::ALL.to_vec()
    } else {
        let name = args.material.as_deref().ok_or_else(|| {
            CliError::Config("give a material name or --all".to_string())
        })?;
        vec![parse_material(name)?]
    };

    // No procedure flag means run everything.
    let all = !(args.step || args.sweep || args.hysteresis);
    let (do_step, do_sweep, do_hyst) = (
        all || args.step,
        all || args.sweep,
        all || args.hysteresis,
    );

    let mut summaries = Vec::new();
    for (index, material) in materials.iter().enumerate() {
        let model = resolve_substrate(*material, args.common.substrates.as_ref())?;
        let base = derive_seed(seed, SeedDomain::BenchTrial, index as u64 * 16);

        let mut entry = MaterialSummary {
            material: material.key().to_string(),
            hysteresis_pct: None,
            t_rise_s: None,
            t_fall_s: None,
            sensitivity: None,
        };

        if do_step {
            let cfg = StepConfig {
                seed: base.wrapping_add(1),
                ..StepConfig::default()
            };
            let exp = step_response(&model, &cfg)?;
            let end = *exp.trace.t.last().unwrap();
            let (rise, fall) = rise_fall_times(
                &exp.trace,
                (exp.load_at, exp.unload_at),
                (exp.unload_at, end),
            )?;
            entry.t_rise_s = Some(rise);
            entry.t_fall_s = Some(fall);
            write_atomic(
                &args.common.out.join(format!("step_{}.csv", material.key())),
                trace_to_csv(&exp.trace).as_bytes(),
            )?;
        }

        if do_sweep {
            let cfg = SweepConfig {
                seed: base.wrapping_add(2),
                ..SweepConfig::default()
            };
            let curve = sensitivity_sweep(&model, &cfg)?;
            entry.sensitivity = Some(SensitivitySummary {
                change_0_300: normalized_change(&curve, 0.0, 300.0),
                p95_saturation_pa: saturation_pressure(&curve, 0.95)?,
                linear_r2: linear_r2(&curve),
            });
            write_atomic(
                &args.common.out.join(format!("sweep_{}.csv", material.key())),
                sweep_to_csv(&curve).as_bytes(),
            )?;
        }

        if do_hyst {
            let cfg = HysteresisConfig {
                seed: base.wrapping_add(3),
                ..HysteresisConfig::default()
            };
            entry.hysteresis_pct = Some(hysteresis_percent(&model, &cfg)?);
        }

        println!(
            "{}: hysteresis {} rise {} fall {}",
            material.key(),
            entry
                .hysteresis_pct
                .map_or("-".into(), |v| format!("{v:.2}%")),
            entry.t_rise_s.map_or("-".into(), |v| format!("{v:.4}s")),
            entry.t_fall_s.map_or("-".into(), |v| format!("{v:.4}s")),
        );
        summaries.push(entry);
    }

    let summary = Summary {
        format_version: 1,
        seed,
        materials: summaries,
    };
    write_atomic(
        &args.common.out.join("summary.json"),
        to_json_pretty(&summary).as_bytes(),
    )?;
    Ok(())
}
