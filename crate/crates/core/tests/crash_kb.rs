//! The shipped rule base on the shipped scenarios.

use std::collections::BTreeSet;

use norman::builtin::{builtin_rulebase, builtin_scenario, builtin_scenarios, catalogue};
use norman::engine::{persistence_schemas, Extension, Stratum};
use norman::explain::{collect_anomalies, explain, AnomalyKind};
use norman::kb::validate_crossrefs;
use norman::{run_strata, RunOptions, RunResult, RunStatus};

fn run(name: &str, opts: &RunOptions) -> RunResult {
    let s = builtin_scenario(name).expect("shipped scenario");
    run_strata(&builtin_rulebase(), &s, opts).expect("engine runs")
}

fn find<'e>(ext: &'e Extension, shown: &str) -> Option<&'e norman::Literal> {
    ext.literals.iter().find(|l| l.to_string() == shown)
}

/// Rule that produced `shown` in `ext`, panicking if the literal is absent.
fn source(ext: &Extension, shown: &str) -> String {
    let l = find(ext, shown).unwrap_or_else(|| panic!("`{shown}` missing from the extension"));
    ext.trace.get(l).map_or("given", |d| d.source.id()).to_string()
}

fn anomaly_strings(r: &RunResult) -> BTreeSet<String> {
    r.anomaly_atoms().iter().map(ToString::to_string).collect()
}

#[test]
fn inventory_matches_expectation() {
    let rb = builtin_rulebase();
    let strict: Vec<(String, u8)> = rb.strict.iter().map(|r| (r.id.to_string(), r.layer)).collect();
    let expected_strict =
        [("R1", 2), ("R2", 1), ("R3", 1), ("R4", 1), ("R5", 2), ("R6", 2), ("RF", 1), ("RF'", 1), ("RB1", 1)];
    assert_eq!(strict, expected_strict.map(|(id, l)| (id.to_string(), l)).to_vec());
    let defaults: Vec<(String, u8, bool)> =
        rb.defaults.iter().map(|d| (d.id.to_string(), d.layer, d.is_normal())).collect();
    let expected_defaults = [("D1", 1, true), ("D2", 2, false), ("D5", 2, true), ("D6", 2, true)];
    assert_eq!(defaults, expected_defaults.map(|(id, l, n)| (id.to_string(), l, n)).to_vec());

    let names = |v: Vec<norman::logic::Symbol>| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    assert_eq!(names(rb.static_predicates()), ["parked", "same_file"]);
    assert_eq!(names(rb.backward_persistent_predicates()), ["is_follower"]);
    assert_eq!(names(rb.unforeseeable_predicates()), ["disruptive_factor"]);

    let kernel = rb.predicates.iter().filter(|p| p.is_kernel()).count();
    let layer2 = rb.predicates.iter().filter(|p| p.layer == 2).count();
    assert_eq!(kernel, 7);
    assert!(layer2 >= 9, "{layer2} layer-2 predicates");

    let persist: Vec<String> = persistence_schemas(&rb).iter().map(|d| d.id.to_string()).collect();
    assert_eq!(persist, ["persist_fwd_parked", "persist_fwd_same_file", "persist_back_is_follower"]);
    assert!(rb.defaults.len() + persist.len() >= 6);
}

#[test]
fn shipped_scenarios_validate() {
    let rb = builtin_rulebase();
    let labels: Vec<String> = builtin_scenarios().iter().map(|s| s.label.clone()).collect();
    for name in ["b21", "bend", "perturb", "b21_no_control", "calm"] {
        assert!(labels.iter().any(|l| l == name), "{name} not shipped");
    }
    for s in builtin_scenarios() {
        assert!(validate_crossrefs(&rb, &s).is_empty());
    }
}

#[test]
fn b21_reproduces_the_derivation_chain() {
    let r = run("b21", &RunOptions::default());
    assert_eq!(r.status, RunStatus::AnomalyFound);
    assert_eq!(r.extensions.len(), 1);
    let ext = &r.extensions[0];
    assert_eq!(source(ext, "holds(is_follower, B, A, 1)"), "persist_back_is_follower");
    assert_eq!(source(ext, "-holds(stops, B, 2)"), "R1");
    assert_eq!(source(ext, "holds(control, B, 1)"), "D1");
    assert_eq!(source(ext, "normally(control, B, 0)"), "R3");
    assert_eq!(source(ext, "must(control, B, 0)"), "R2");
    assert_eq!(source(ext, "must(stops, B, 1)"), "D2");
    assert_eq!(source(ext, "able(stops, B, 1)"), "R4");
    assert_eq!(source(ext, "b_an(stops, B, 1)"), "RF");
    assert!(ext.applied.iter().any(|i| i == "D2{Ag=A, Ag'=B, T=1}"), "{:?}", ext.applied);
    assert_eq!(anomaly_strings(&r), BTreeSet::from(["b_an(stops, B, 1)".to_string()]));

    // the control premise of D1 is the R3 conclusion
    let control = find(ext, "holds(control, B, 1)").unwrap();
    let premises: Vec<String> = ext.trace[control].premises.iter().map(ToString::to_string).collect();
    assert_eq!(premises, ["normally(control, B, 0)"]);

    let reports = collect_anomalies(&r);
    assert_eq!(reports.len(), 1);
    let a = &reports[0];
    assert_eq!((a.kind, a.predicate.as_str(), a.agent.as_str(), a.state), (AnomalyKind::F, "stops", "B", 1));
    assert_eq!(a.transition, Some((1, 2)));
    let support: Vec<(String, &str)> = a.support.iter().map(|(l, id)| (l.to_string(), id.as_str())).collect();
    assert_eq!(
        support,
        [
            ("must(stops, B, 1)".to_string(), "D2"),
            ("able(stops, B, 1)".to_string(), "R4"),
            ("-holds(stops, B, 2)".to_string(), "R1"),
        ]
    );
    assert_eq!(explain(a), "because vehicle B did not stop at state 2");
}

#[test]
fn support_literals_are_in_the_extension_and_catalogued() {
    let cat = catalogue();
    for name in ["b21", "bend", "perturb"] {
        let r = run(name, &RunOptions::default());
        for a in collect_anomalies(&r) {
            for (l, id) in &a.support {
                assert!(r.extensions[a.extension].contains(l), "{name}: {l}");
                assert!(id == "given" || cat.get(id).is_some(), "{name}: `{id}` not catalogued");
            }
        }
    }
}

#[test]
fn missing_control_blocks_the_follower_default() {
    for all_extensions in [false, true] {
        let r = run("b21_no_control", &RunOptions { all_extensions, ..RunOptions::default() });
        assert_eq!(r.status, RunStatus::NoAnomaly);
        assert!(!r.extensions.is_empty());
        for ext in &r.extensions {
            assert!(find(ext, "must(stops, B, 1)").is_none());
            assert!(!ext.applied.iter().any(|i| i == "D2{Ag=A, Ag'=B, T=1}"), "D2 applied: {:?}", ext.applied);
            assert!(find(ext, "-holds(control, B, 1)").is_some());
        }
    }
}

#[test]
fn bend_blames_speed() {
    let r = run("bend", &RunOptions::default());
    assert_eq!(anomaly_strings(&r), BTreeSet::from(["b_an(runs_slowly, C, 1)".to_string()]));
    let ext = &r.extensions[0];
    assert_eq!(source(ext, "must(runs_slowly, C, 1)"), "D5");
    assert_eq!(source(ext, "-holds(runs_slowly, C, 2)"), "D5");
    assert_eq!(source(ext, "able(runs_slowly, C, 1)"), "R5");
    assert_eq!(source(ext, "holds(control, C, 1)"), "D1");
    let reports = collect_anomalies(&r);
    assert_eq!(reports.len(), 1);
    assert_eq!(explain(&reports[0]), "because vehicle C did not slow down at state 2");
}

#[test]
fn perturbation_path() {
    let r = run("perturb", &RunOptions::default());
    assert_eq!(anomaly_strings(&r), BTreeSet::from(["b_an(slippery, D, 1)".to_string()]));
    let ext = &r.extensions[0];
    assert_eq!(source(ext, "perturb(slippery, D, 1)"), "RB1");
    assert_eq!(source(ext, "b_an(slippery, D, 1)"), "RF'");
    let reports = collect_anomalies(&r);
    assert_eq!(reports.len(), 1);
    let a = &reports[0];
    assert_eq!(a.kind, AnomalyKind::FPrime);
    assert_eq!(a.transition, None);
    assert!(a.support.iter().any(|(l, id)| l.to_string() == "perturb(slippery, D, 1)" && id == "RB1"));
    assert_eq!(explain(a), "because of an abnormal perturbation (slippery) affecting vehicle D at state 1");
}

#[test]
fn calm_has_no_anomaly() {
    let r = run("calm", &RunOptions::default());
    assert_eq!(r.status, RunStatus::NoAnomaly);
    assert!(collect_anomalies(&r).is_empty());
    assert!(r.stratum_log.iter().all(|e| !e.halted));
    assert_eq!(r.stratum_log.len(), 3);
}

#[test]
fn strata_agree_with_global_run() {
    for s in builtin_scenarios() {
        let layered = run(&s.label, &RunOptions::default());
        let global = run(&s.label, &RunOptions { strata: false, ..RunOptions::default() });
        assert_eq!(anomaly_strings(&layered), anomaly_strings(&global), "{}", s.label);
        assert_eq!(global.stratum_log.len(), 1);
        assert_eq!(global.stratum_log[0].stratum, Stratum::Global);
        if layered.status == RunStatus::AnomalyFound {
            let last = layered.stratum_log.last().unwrap();
            assert!(last.halted);
            assert_eq!(layered.stratum_log.iter().filter(|e| e.halted).count(), 1);
        }
    }
}

#[test]
fn anomalies_stop_at_the_kernel() {
    let r = run("b21", &RunOptions::default());
    let strata: Vec<Stratum> = r.stratum_log.iter().map(|e| e.stratum).collect();
    assert_eq!(strata, [Stratum::Layer(3), Stratum::Layer(2), Stratum::Layer(1)]);
    assert!(r.warnings.is_empty());
}
