use skinsim::daq::{AcquisitionConfig, Scanner};
use skinsim::layout::SkinLayout;
use skinsim::perception::{averaged_baseline, deviation_features};
use skinsim::scenario::{distribute_force, train_contact_detector, FootprintPatch, Pose};
use skinsim::substrate::{default_substrate, Material};

#[test]
#[ignore]
fn votes() {
    let model = default_substrate(Material::FoamLowDensity);
    let layout = SkinLayout::palm34();
    for (frames, trees) in [(4_000usize, 30usize), (14_000, 100)] {
        let det = train_contact_detector(&model, &layout, frames, trees, 12).unwrap();
        let cfg = AcquisitionConfig::for_layout(&layout);
        let mut scanner = Scanner::new(model.clone(), &layout, cfg, 777).unwrap();
        let zeros = vec![0.0; layout.len()];
        scanner.settle(&zeros, 1.0).unwrap();
        let baseline = averaged_baseline(&mut scanner, 50).unwrap();
        let tip = [FootprintPatch { cx: 0.0, cy: 0.0, width: 6.0, height: 6.0, share: 1.0 }];
        for force in [0.05, 0.1, 0.3] {
            let target = &layout.taxels[12];
            let pressures = distribute_force(&tip, &Pose::offset(target.cx, target.cy), &layout, force).unwrap();
            scanner.settle(&pressures, 1.0).unwrap();
            let frame = scanner.scan(&pressures).unwrap();
            let devs = deviation_features(&frame, &baseline).unwrap();
            let votes: usize = det.model.trees.iter().filter(|t| t.predict(&devs) == 1).count();
            println!("cfg({frames},{trees}) force {force}: dev12={:.0} votes {votes}/{trees}", devs[12]);
            scanner.settle(&zeros, 1.0).unwrap();
        }
    }
}
