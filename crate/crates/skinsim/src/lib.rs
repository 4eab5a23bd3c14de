//! Deterministic simulator and analysis toolkit for piezoresistive tactile
//! skins.
//!
//! The crate models pressure-to-resistance substrates, the voltage-divider /
//! ADC acquisition chain with a byte-exact wire protocol, the benchtop
//! characterization procedures used to calibrate the four material presets,
//! and the perception stack (baseline zeroing, random-forest contact
//! detection and object recognition, contact localization) together with the
//! scenario generators that exercise it. Every stochastic path is seeded;
//! identical seeds give bit-identical results.

pub mod benchtop;
pub mod catalog;
pub mod daq;
pub mod error;
pub mod export;
pub mod forest;
pub mod geometry;
pub mod layout;
pub mod perception;
pub mod rng;
pub mod scenario;
pub mod substrate;
pub mod wire;

pub use daq::{adc_code, AcquisitionConfig, Frame, Scanner};
pub use error::{Error, Result};
pub use forest::{evaluate, train_forest, Dataset, ForestModel, ForestParams, Metrics};
pub use layout::{SkinLayout, Taxel};
pub use perception::{
    localize_contact, zero_baseline, ContactDetector, ContactEstimate, ForestDetector,
    ThresholdDetector,
};
pub use scenario::{
    generate_contact_dataset, generate_recognition_dataset, grasp_lift_sequence, place_object,
    run_probe, run_probe_suite, ContactOutcome, ObjectSpec, Pose, ScenarioSpec,
};
pub use substrate::{
    default_substrate, default_substrates, Material, ModelKind, SubstrateModel, SubstrateState,
};
pub use wire::{encode_frame, encode_stream, parse_all, ParseEvent, StreamParser};
