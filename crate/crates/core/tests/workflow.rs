use ductflow_core::conditions::{self, check_initial_slopes, Status};
use ductflow_core::config::{preset, RunConfig};
use ductflow_core::diagnostics::{max_principle_run, slope_inequality_check, k_on};
use ductflow_core::geometry::table::TableProfile;
use ductflow_core::io;
use ductflow_core::pipeline;
use ductflow_core::solver::FieldSnapshot;

fn small(nu: f64) -> RunConfig {
    let mut cfg = preset("experiment1").unwrap();
    cfg.sweep.nu.clear();
    cfg.gas.nu = Some(nu);
    cfg.grid.dx = Some(0.1);
    cfg.solver.t_final = 2.0;
    cfg
}

#[test]
fn table_paths_resolve_next_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let x: Vec<f64> = (0..=90).map(|i| 1.0 + 0.1 * i as f64).collect();
    let a: Vec<f64> = x.iter().map(|x| x.exp()).collect();
    std::fs::create_dir(dir.path().join("ducts")).unwrap();
    TableProfile::write(&dir.path().join("ducts/exp.dat"), &x, &a).unwrap();
    let mut cfg = small(1e-3);
    cfg.profile.kind = "table".into();
    cfg.profile.table = Some("ducts/exp.dat".into());
    let path = dir.path().join("run.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    let loaded = RunConfig::load(&path).unwrap();
    let profile = loaded.profile().unwrap();
    // a = e^x has k = 1
    assert!((profile.k(4.05) - 1.0).abs() < 1e-3);
    assert!(pipeline::validate(&loaded, 1e-3).is_ok());
}

#[test]
fn validation_is_deterministic() {
    let cfg = small(1e-3);
    assert_eq!(pipeline::validate(&cfg, 1e-3).unwrap(), pipeline::validate(&cfg, 1e-3).unwrap());
}

#[test]
fn failure_witness_reproduces() {
    let mut cfg = small(0.1);
    cfg.data.s0_prime = Some(0.2);
    let rep = pipeline::validate(&cfg, 0.1).unwrap();
    let k2 = rep.get("k2").unwrap();
    assert_eq!(k2.status, Status::Fail);
    let w = k2.witness.unwrap();
    let gas = cfg.gas(0.1).unwrap();
    let profile = cfg.profile().unwrap();
    let data = cfg.data(&profile, &gas).unwrap();
    let again = check_initial_slopes(data.initial.as_ref(), profile.as_ref(), &gas, &[w]).unwrap();
    assert_eq!(again[2].status, Status::Fail);
    assert!(again[2].margin.unwrap() < 0.0);
}

#[test]
fn claims_reproduce_on_stored_snapshots() {
    let cfg = small(1e-3);
    let run = pipeline::simulate(&cfg, 1e-3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let snaps = run.record.snapshot_refs();
    io::write_snapshots(dir.path(), &snaps, 1).unwrap();
    let back = io::read_snapshots(dir.path(), run.gas).unwrap();
    let back_refs: Vec<&FieldSnapshot> = back.iter().collect();

    let m = 2.0;
    let a = max_principle_run(snaps.iter().copied(), m, 1e-8);
    let b = max_principle_run(back_refs.iter().copied(), m, 1e-8);
    assert_eq!(a.worst_margin.to_bits(), b.worst_margin.to_bits());
    let k = k_on(run.profile.as_ref(), snaps[0].x());
    let a = slope_inequality_check(snaps.iter().copied(), &k, &run.gas, 1e-6);
    let b = slope_inequality_check(back_refs.iter().copied(), &k, &run.gas, 1e-6);
    for (p, q) in a.iter().zip(&b) {
        assert_eq!(p.worst_margin.to_bits(), q.worst_margin.to_bits());
    }
}

#[test]
fn spherical_duct_runs_through_validation() {
    let mut cfg = small(1e-3);
    cfg.profile.kind = "spherical".into();
    cfg.profile.n = Some(3);
    let rep = pipeline::validate(&cfg, 1e-3).unwrap();
    assert_ne!(rep.get("spherical-gamma").unwrap().status, Status::NotApplicable);
    let gas = cfg.gas(1e-3).unwrap();
    let profile = cfg.profile().unwrap();
    let data = cfg.data(&profile, &gas).unwrap();
    let again = conditions::validate(&gas, profile.as_ref(), &data, &cfg.validation_settings()).unwrap();
    assert_eq!(rep, again);
}
