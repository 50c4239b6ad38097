mod common;

use common::identification::*;
use masonry_ham::fem::NewtonOptions;
use masonry_ham::identify::{evaluate_pool, lhs_sample, run_stage, select_best, two_stage, MOISTURE_PARAMETERS, THERMAL_PARAMETERS};
use masonry_ham::Model;

fn truth() -> Model {
    let mut m = Model::default();
    m.set("mortar.lambda0", 0.5).unwrap();
    m.set("brick.b_tcs", 8.0).unwrap();
    m.set("brick.w80", 120.0).unwrap();
    m.set("interface.beta_int", 6.0e-9).unwrap();
    m
}

fn tolerance() -> f64 {
    NewtonOptions::default().tol
}

#[test]
fn thermal_round_trip_recovers_truth() {
    let stage = thermal_stage(&truth(), &truth(), 24.0, 3600.0, 1.1);
    let r = run_stage(&stage, POOL, SEED, 3, None).unwrap();
    let best = r.best().unwrap();
    assert_eq!(best.id, 0);
    assert!(best.objective <= tolerance(), "{}", best.objective);
    assert!(r.selection.best[1].objective > 1.0);
    let values: Vec<f64> = THERMAL_PARAMETERS.iter().map(|n| truth().get(n).unwrap()).collect();
    assert_eq!(best.params, values);
}

#[test]
fn two_stage_pipeline_recovers_both_sets() {
    let t = truth();
    let thermal = thermal_stage(&t, &t, 24.0, 3600.0, 1.1);
    let moisture = moisture_stage(&t, &Model::default(), 24.0, 3600.0, 0.9);
    let r = two_stage(&thermal, &moisture, POOL, SEED, None).unwrap();
    let best = r.stages[1].best().unwrap();
    assert_eq!(best.id, 0);
    assert!(best.objective <= tolerance(), "{}", best.objective);
    for n in THERMAL_PARAMETERS.iter().chain(&MOISTURE_PARAMETERS) {
        assert_eq!(r.model.get(n).unwrap(), t.get(n).unwrap(), "{n}");
    }
}

#[test]
fn identical_samples_score_identically() {
    let stage = thermal_stage(&truth(), &Model::default(), 6.0, 3600.0, 1.0);
    let names: Vec<String> = THERMAL_PARAMETERS.iter().map(|s| s.to_string()).collect();
    let one = lhs_sample(&stage.priors, 1, 3).unwrap();
    let pool = vec![one[0].clone(); 4];
    let r = evaluate_pool(&names, &pool, &stage.spec, &stage.observed, Some(2)).unwrap();
    assert!(r.iter().all(|x| x.objective == r[0].objective && x.objective.is_finite()));
}

#[test]
fn ranking_is_deterministic_and_thread_count_free() {
    let stage = thermal_stage(&truth(), &Model::default(), 6.0, 3600.0, 1.0);
    let a = run_stage(&stage, 8, 11, 8, Some(1)).unwrap();
    let b = run_stage(&stage, 8, 11, 8, Some(4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn failed_realizations_are_isolated() {
    let stage = thermal_stage(&truth(), &Model::default(), 6.0, 3600.0, 1.0);
    let names: Vec<String> = THERMAL_PARAMETERS.iter().map(|s| s.to_string()).collect();
    let good = lhs_sample(&stage.priors, 2, 5).unwrap();
    let mut bad = good[0].clone();
    bad[0] = -1.0;
    let pool = vec![good[0].clone(), bad, good[1].clone()];
    let r = evaluate_pool(&names, &pool, &stage.spec, &stage.observed, None).unwrap();
    assert!(r[0].objective.is_finite() && r[2].objective.is_finite());
    assert!(r[1].objective.is_infinite() && r[1].error.is_some());
    let s = select_best(&r, 10);
    assert_eq!(s.best.len(), 3);
    assert_eq!(s.best[2].id, 1);
}
