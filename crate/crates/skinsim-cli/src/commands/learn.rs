use std::path::Path;

use skinsim::catalog::RecognitionCatalog;
use skinsim::export::{
    confusion_to_csv, dataset_from_csv, dataset_to_csv, to_json_pretty, write_atomic, DatasetMeta,
};
use skinsim::forest::{evaluate, train_forest, Dataset, ForestModel, ForestParams};
use skinsim::scenario::{
    generate_contact_dataset, generate_recognition_dataset, ContactDatasetSpec,
    RecognitionDatasetSpec,
};

use crate::{
    apply_config, parse_material, read_file, resolve_layout, resolve_substrate, CliError,
    DatasetArgs, EvalArgs, TrainArgs,
};

const TRAIN_FRACTION: f64 = 0.8;

pub fn run_dataset(mut args: DatasetArgs) -> Result<(), CliError> {
    let mut seed = args.seed;
    apply_config(&mut args.common, &mut seed)?;
    let material = parse_material(&args.material)?;
    let model = resolve_substrate(material, args.common.substrates.as_ref())?;

    let (dataset, layout_name) = match args.kind.as_str() {
        "contact" => {
            let layout = resolve_layout(args.common.layout.as_deref(), "palm34")?;
            let spec = ContactDatasetSpec {
                frames: args.frames,
                seed,
                ..ContactDatasetSpec::default()
            };
            (
                generate_contact_dataset(&model, &layout, &spec)?,
                args.common.layout.clone().unwrap_or_else(|| "palm34".into()),
            )
        }
        "recognition" => {
            let layout = resolve_layout(args.common.layout.as_deref(), "grid5x4")?;
            let spec = RecognitionDatasetSpec {
                total_samples: args.samples,
                seed,
                ..RecognitionDatasetSpec::default()
            };
            (
                generate_recognition_dataset(&model, &layout, &RecognitionCatalog::builtin(), &spec)?,
                args.common.layout.clone().unwrap_or_else(|| "grid5x4".into()),
            )
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown dataset kind `{other}` (expected contact or recognition)"
            )))
        }
    };

    let meta = DatasetMeta {
        format_version: 1,
        kind: args.kind.clone(),
        label_names: dataset.label_names.clone(),
        split_seed: dataset.split_seed,
        train_fraction: TRAIN_FRACTION,
        taxel_count: dataset.n_features(),
        layout: layout_name,
    };
    let csv_path = args.common.out.join(format!("{}.csv", args.kind));
    write_atomic(&csv_path, dataset_to_csv(&dataset).as_bytes())?;
    write_atomic(
        &args.common.out.join(format!("{}.meta.json", args.kind)),
        to_json_pretty(&meta).as_bytes(),
    )?;
    println!(
        "{}: {} rows, {} classes -> {}",
        args.kind,
        dataset.len(),
        dataset.n_classes(),
        csv_path.display()
    );
    Ok(())
}

pub(crate) fn load_dataset(csv_path: &Path) -> Result<(Dataset, DatasetMeta), CliError> {
    let meta_path = csv_path.with_extension("meta.json");
    let meta: DatasetMeta = serde_json::from_str(&read_file(&meta_path)?)
        .map_err(|e| CliError::Data(format!("sidecar {}: {e}", meta_path.display())))?;
    let dataset = dataset_from_csv(&read_file(csv_path)?, &meta)
        .map_err(|e| CliError::Data(e.to_string()))?;
    Ok((dataset, meta))
}

pub fn run_train(mut args: TrainArgs) -> Result<(), CliError> {
    let mut seed = args.seed;
    apply_config(&mut args.common, &mut seed)?;
    let (dataset, meta) = load_dataset(&args.data)?;
    let (train, _) = dataset.split(meta.train_fraction)?;
    let params = ForestParams {
        n_trees: args.trees,
        max_depth: args.max_depth,
        min_leaf: args.min_leaf,
        feature_subsample: None,
        seed,
    };
    let model = train_forest(&train, &params)?;
    let path = args.common.out.join("model.json");
    write_atomic(&path, model.to_json().as_bytes())?;
    println!(
        "trained {} trees on {} rows ({} classes) -> {}",
        params.n_trees,
        train.len(),
        train.n_classes(),
        path.display()
    );
    Ok(())
}

pub fn run_eval(mut args: EvalArgs) -> Result<(), CliError> {
    let mut seed = 0;
    apply_config(&mut args.common, &mut seed)?;
    let model =
        ForestModel::parse(&read_file(&args.model)?).map_err(|e| CliError::Data(e.to_string()))?;
    let (dataset, meta) = load_dataset(&args.data)?;
    let (_, test) = dataset.split(meta.train_fraction)?;
    let metrics = evaluate(&model, &test)?;

    write_atomic(
        &args.common.out.join("metrics.json"),
        to_json_pretty(&metrics).as_bytes(),
    )?;
    write_atomic(
        &args.common.out.join("confusion.csv"),
        confusion_to_csv(&model.label_names, &metrics.confusion).as_bytes(),
    )?;
    let chance = 1.0 / model.n_classes as f64;
    println!(
        "accuracy {:.4} (chance {:.3})",
        metrics.accuracy, chance
    );
    println!("macro_f1 {:.4}", metrics.macro_f1);
    Ok(())
}
