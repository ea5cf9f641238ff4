use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_cqed-vacua");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env("CQED_VACUA_OUT", dir)
        .output()
        .expect("binary runs")
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect()
}

fn cheap_invocations(sweep_csv: Option<&str>) -> Vec<Vec<String>> {
    let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let mut v = vec![
        s(&["derive", "--set", "phi01=3.0"]),
        s(&["fluxonium", "--set", "wavefunctions=true"]),
        s(&["polariton", "--set", "rabi_steps=21"]),
        s(&["spectrum", "--set", "n_atoms=2", "--set", "n_modes=1", "--set", "count=4"]),
        s(&["splitting-sweep", "--set", "g_values=[1.2,1.4,1.6,1.8]"]),
        s(&["overlap", "--set", "n_atoms=2", "--set", "n_modes=1", "--set", "g_values=[0.8,1.0]"]),
        s(&["disorder", "--seed", "11", "--set", "realizations=8"]),
    ];
    if let Some(csv) = sweep_csv {
        v.push(vec!["fit-beta".into(), "--set".into(), format!("input={csv:?}")]);
    }
    v
}

/// Runs every command once into `dir`; returns the sweep table path.
pub fn run_all(dir: &Path, extra: &[&str]) -> String {
    for args in cheap_invocations(None) {
        let mut a: Vec<&str> = args.iter().map(String::as_str).collect();
        a.extend(extra);
        let out = run(dir, &a);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let sweep = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| {
            let name = p.file_name().unwrap().to_string_lossy();
            name.starts_with("splitting-sweep-") && name.ends_with(".csv")
        })
        .unwrap();
    let fit = cheap_invocations(Some(&sweep.display().to_string())).pop().unwrap();
    let mut a: Vec<&str> = fit.iter().map(String::as_str).collect();
    a.extend(extra);
    let out = run(dir, &a);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    sweep.display().to_string()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_all(a.path(), &[]);
    // The fit reads the sweep table by absolute path, which lands in the config hash.
    let sa = snapshot(a.path());
    run_all(b.path(), &[]);
    let sb = snapshot(b.path());
    let strip = |m: BTreeMap<String, Vec<u8>>| -> BTreeMap<String, Vec<u8>> {
        m.into_iter().filter(|(k, _)| !k.starts_with("fit-beta")).collect()
    };
    assert_eq!(strip(sa), strip(sb));
}

#[test]
fn thread_count_does_not_change_results() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (dir, jobs) in [(&a, "1"), (&b, "4")] {
        for cmd in [
            vec!["splitting-sweep", "--set", "g_values=[1.0,1.3]"],
            vec!["disorder", "--set", "realizations=6"],
        ] {
            let mut args = cmd.clone();
            args.extend(["--jobs", jobs]);
            assert!(run(dir.path(), &args).status.success());
        }
    }
    let data = |d: &Path| -> BTreeMap<String, Vec<u8>> {
        snapshot(d).into_iter().filter(|(k, _)| !k.ends_with(".manifest.json")).collect()
    };
    assert_eq!(data(a.path()), data(b.path()));
}

#[test]
fn manifest_echoes_the_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["spectrum", "--set", "n_atoms=2", "--set", "n_modes=1"]);
    assert!(out.status.success());
    let files = snapshot(dir.path());
    let (name, body) = files.iter().find(|(k, _)| k.ends_with(".manifest.json")).unwrap();
    let m: serde_json::Value = serde_json::from_slice(body).unwrap();
    let hash = m["config_sha256"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(name.starts_with(&format!("spectrum-{}", &hash[..12])));
    assert_eq!(m["config"]["safety"], 4.0);
    assert_eq!(m["config"]["sector"], "full");
    assert_eq!(m["config"]["n_atoms"], 2);
    assert!(files.keys().all(|k| k.contains(&hash[..12])));
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "command = \"polariton\"\nomega_k = 2.0\nomega_f = 0.5\nrabi_steps = 3\nseed = 5\n").unwrap();
    let out = run(dir.path(), &["polariton", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let files = snapshot(dir.path());
    let manifest = files.iter().find(|(k, _)| k.ends_with(".manifest.json")).unwrap().1;
    let m: serde_json::Value = serde_json::from_slice(manifest).unwrap();
    assert_eq!(m["config"]["omega_k"], 2.0);
    assert_eq!(m["config"]["seed"], 9);
    let csv = files.iter().find(|(k, _)| k.ends_with(".csv")).unwrap().1;
    assert_eq!(String::from_utf8_lossy(csv).lines().count(), 4);

    let wrong = run(dir.path(), &["spectrum", "--config", cfg.to_str().unwrap()]);
    assert!(!wrong.status.success());
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "seed = 1\nomega_fF = 2.0\n").unwrap();
    let out = run(dir.path(), &["polariton", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("omega_fF") && err.contains("line 2"), "{err}");
    let out = run(dir.path(), &["polariton", "--set", "frobnicate=1"]);
    assert!(!out.status.success());
}

#[test]
fn empty_grid_writes_an_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["splitting-sweep", "--set", "g_values=[]"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
    let files = snapshot(dir.path());
    let csv = files.iter().find(|(k, _)| k.ends_with(".csv")).unwrap().1;
    assert_eq!(
        String::from_utf8_lossy(csv).trim(),
        "N,N_m,g,n_max_1,E_even,E_odd,delta,delta_over_omegaF,converged"
    );
}

#[test]
fn oversized_disorder_runs_fall_back_to_the_labeled_analytic_engine() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["disorder", "--set", "dimension_budget=10", "--set", "realizations=4"]);
    assert!(out.status.success());
    let files = snapshot(dir.path());
    let (_, body) = files
        .iter()
        .find(|(k, _)| k.ends_with(".json") && !k.ends_with(".manifest.json"))
        .unwrap();
    let summary: serde_json::Value = serde_json::from_slice(body).unwrap();
    assert_eq!(summary["engine"], "analytic");
    let csv = files.iter().find(|(k, _)| k.ends_with(".csv")).unwrap().1;
    assert!(String::from_utf8_lossy(csv).starts_with("realization,seed,omega_F_1,omega_F_2,delta\n"));
}

#[test]
fn fit_without_enough_points_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["splitting-sweep", "--set", "g_values=[1.0,1.2]"]).status.success());
    let sweep = snapshot(dir.path()).into_keys().find(|k| k.ends_with(".csv")).unwrap();
    let path = dir.path().join(sweep);
    let out = run(dir.path(), &["fit-beta", "--set", &format!("input={:?}", path.display().to_string())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("distinct g"));
}
