//! Identical scenario and configuration give identical traces, whatever the
//! thread count.

use influence::scenario::{fixtures, write_trace};
use influence::sim::{self, SimulationConfig, UpdateModel};

fn csv(name: &str, model: UpdateModel, threads: Option<usize>, seed: u64) -> Vec<u8> {
    let s = fixtures::load(name).unwrap();
    let mut config = SimulationConfig::new(model, 300);
    config.trials = 6;
    config.base_seed = seed;
    config.threads = threads;
    config.record_stride = 7;
    config.record_forecasts = true;
    config.record_diagnostics = true;
    let trace = sim::run(&s, &config).unwrap();
    let mut out = Vec::new();
    write_trace(&s, &trace, &mut out).unwrap();
    out
}

#[test]
fn repeated_runs_are_bit_identical() {
    assert_eq!(
        csv("fig6_caseA", UpdateModel::Diffusion, None, 3),
        csv("fig6_caseA", UpdateModel::Diffusion, None, 3)
    );
}

#[test]
fn thread_count_does_not_matter() {
    let one = csv("fig6_caseB", UpdateModel::SelfAware, Some(1), 5);
    for threads in [2, 4, 7] {
        assert_eq!(
            one,
            csv("fig6_caseB", UpdateModel::SelfAware, Some(threads), 5)
        );
    }
}

#[test]
fn seeds_and_trials_differ() {
    assert_ne!(
        csv("three_agent_violated", UpdateModel::Diffusion, None, 1),
        csv("three_agent_violated", UpdateModel::Diffusion, None, 2)
    );
    let s = fixtures::load("three_agent_violated").unwrap();
    let mut config = SimulationConfig::new(UpdateModel::Diffusion, 100);
    config.trials = 2;
    let trace = sim::run(&s, &config).unwrap();
    assert_ne!(trace.trials[0].last(), trace.trials[1].last());
}

#[test]
fn trial_does_not_depend_on_trial_count() {
    let s = fixtures::load("fig6_caseA").unwrap();
    let mut config = SimulationConfig::new(UpdateModel::Diffusion, 200);
    config.trials = 1;
    let alone = sim::run(&s, &config).unwrap();
    config.trials = 5;
    let many = sim::run(&s, &config).unwrap();
    assert_eq!(alone.trials[0], many.trials[0]);
}
