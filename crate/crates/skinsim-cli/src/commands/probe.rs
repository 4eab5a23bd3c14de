use skinsim::export::{suite_to_csv, write_atomic};
use skinsim::scenario::{run_probe_suite, ProbeSuiteConfig};
use skinsim::substrate::Material;

use crate::{apply_config, resolve_substrate, CliError, ProbeSuiteArgs};

pub fn run(mut args: ProbeSuiteArgs) -> Result<(), CliError> {
    let mut seed = args.seed;
    apply_config(&mut args.common, &mut seed)?;

    let materials = match args.substrate.as_str() {
        "ld" => vec![Material::FoamLowDensity],
        "hd" => vec![Material::FoamHighDensity],
        "both" => vec![Material::FoamLowDensity, Material::FoamHighDensity],
        other => {
            return Err(CliError::Config(format!(
                "unknown substrate `{other}` (expected ld, hd or both)"
            )))
        }
    };
    let models = materials
        .iter()
        .map(|m| resolve_substrate(*m, args.common.substrates.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;

    let suite = ProbeSuiteConfig {
        stop_latency_frames: args.latency,
        seed,
        ..ProbeSuiteConfig::default()
    };
    let rows = run_probe_suite(&models, &suite)?;

    for material in &materials {
        let key = material.key();
        let total = rows.iter().filter(|r| r.substrate == key).count();
        let detected = rows
            .iter()
            .filter(|r| r.substrate == key && r.detected)
            .count();
        println!("{key}: detected {detected}/{total}");
    }
    let path = args.common.out.join("probe_results.csv");
    write_atomic(&path, suite_to_csv(&rows).as_bytes())?;
    println!("results -> {}", path.display());
    Ok(())
}
