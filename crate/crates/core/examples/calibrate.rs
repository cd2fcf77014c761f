//! Path-loss sweep over (pl0, exponent, inter-BSS loss). Prints every point
//! where both toy geometries show the intended regimes and the sum-throughput
//! optimum sits at full reuse, (-72, 20) in the strong toy and (-72, 10) in
//! the weak one.
//!
//! cargo run --release -p srsim --example calibrate

use srsim::channel::{PathLossModel, RateTable};
use srsim::engine::{
    build_deployment, calibration_gate, toy_action_set, ScenarioKind, ScenarioSpec,
};
use srsim::mac::{brute_force_optimum, Objective, RadioParams};
use srsim::rng::substream;

fn optimum(kind: ScenarioKind, path_loss: PathLossModel) -> Vec<usize> {
    let mut spec = ScenarioSpec::new(kind);
    spec.path_loss = path_loss;
    let dep = build_deployment(&spec, &mut substream(0, 0)).unwrap();
    brute_force_optimum(&dep, &toy_action_set(), Objective::Sum)
        .unwrap()
        .profile
}

fn main() {
    let table = RateTable::default();
    let default = PathLossModel::default();
    let mut hits = 0;
    println!("{:>6} {:>9} {:>9}", "pl0", "exponent", "inter_bss");
    for inter in [0.0, 5.0, 10.0, 15.0, 20.0] {
        for pl0_step in 0..=30 {
            let pl0 = 30.0 + pl0_step as f64;
            for exp_step in 0..=8 {
                let exponent = 2.0 + 0.5 * exp_step as f64;
                let pl = PathLossModel {
                    pl0_db: pl0,
                    exponent,
                    inter_bss_loss_db: inter,
                    ..default
                };
                let gate = calibration_gate(RadioParams::default(), pl, &table).unwrap();
                if gate.passed()
                    && optimum(ScenarioKind::ToyStrong, pl) == [1, 1]
                    && optimum(ScenarioKind::ToyWeak, pl) == [0, 0]
                {
                    hits += 1;
                    let mark = if pl == default { "  <- default" } else { "" };
                    println!("{pl0:>6} {exponent:>9} {inter:>9}{mark}");
                }
            }
        }
    }
    println!("{hits} points pass");
}
