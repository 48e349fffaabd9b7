use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lowpower"));
    c.env_remove("LOWPOWER_WORKERS");
    c
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("lowpower-cli-{}-{tag}", std::process::id()));
    fs::create_dir_all(&d).unwrap();
    d
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("spawn lowpower")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_owned()
}

#[test]
fn default_headers() {
    let dir = scratch("headers");
    let cases = [
        (
            "swcap",
            "v_b_off_V,v_b_on_V,alpha,diode_term_V,refresh_term_V,voltage_error_V,v_g_avg_off_V,\
             v_g_avg_on_V,leakage_A,leakage_conventional_A,r_on_ohm,r_on_conventional_ohm,\
             f_refresh_Hz,v_b_off_opt_V",
        ),
        ("nems-pg", "node,r,alpha,T_K,e_g,saving_pct,breakeven_r"),
        ("dt-amp", "sample_index,t_s,v_in_V,v_out_V,fault_flags"),
        (
            "piezo",
            "p_out_W,fom,e_out_J,e_inv_J,e_loss_rtot_J,e_loss_rpz_J,e_loss_flip_J,e_ctrl_J,\
             t_span_s,cycle_time_s,accumulation_time_s,audit_residual_J",
        ),
        (
            "compare",
            "x_V,fom_investment,fom_pre_charge,fom_double_pile_up,fom_bias_flip,fom_sece,fom_proposed",
        ),
    ];
    for (cmd, want) in cases {
        let out = dir.join(format!("{cmd}.csv"));
        let o = run(bin().arg(cmd).arg("--out").arg(&out));
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
        assert_eq!(header(&out), want, "{cmd}");
    }
}

#[test]
fn unknown_field_is_config_error() {
    let dir = scratch("unknown");
    let cfg = dir.join("bad.json");
    fs::write(
        &cfg,
        r#"{"name":"x","module":"piezo","bogus":1,"output":"x.csv"}"#,
    )
    .unwrap();
    let o = run(bin().args(["run", "--config"]).arg(&cfg));
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.starts_with("error kind=config message=\""), "{e}");
    assert!(e.contains("bogus"), "{e}");
}

#[test]
fn malformed_json_and_missing_file() {
    let dir = scratch("malformed");
    let cfg = dir.join("bad.json");
    fs::write(&cfg, "{not json").unwrap();
    let o = run(bin().args(["run", "--config"]).arg(&cfg));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = run(bin().args(["run", "--config"]).arg(dir.join("absent.json")));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn module_mismatch_is_config_error() {
    let o = run(bin()
        .args(["swcap", "--config"])
        .arg(scenarios().join("piezo_minimal.json"))
        .arg("--out")
        .arg(scratch("mismatch").join("m.csv")));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_parameter_is_config_error() {
    let dir = scratch("invalid");
    let cfg = dir.join("neg.json");
    fs::write(
        &cfg,
        r#"{"name":"x","module":"piezo","parameters":{"rectifier":{"xdcr":{"c_pz":-1.0}}},"output":"x.csv"}"#,
    )
    .unwrap();
    let o = run(bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("x.csv")));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn deadlock_is_simulation_error() {
    let dir = scratch("deadlock");
    let cfg = dir.join("dl.json");
    fs::write(
        &cfg,
        r#"{"name":"x","module":"piezo","parameters":{"rectifier":{"flip_loss_v":2.5}},"output":"x.csv"}"#,
    )
    .unwrap();
    let o = run(bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("x.csv")));
    assert_eq!(o.status.code(), Some(3));
    let e = stderr(&o);
    assert!(e.starts_with("error kind=simulation"), "{e}");
    assert!(e.contains("deadlock"), "{e}");
}

#[test]
fn unloaded_steady_state_diverges() {
    let dir = scratch("diverge");
    let cfg = dir.join("st.json");
    fs::write(
        &cfg,
        r#"{"name":"x","module":"piezo","parameters":{"rectifier":{"r_l":"inf"},"report":"steady"},"output":"x.csv"}"#,
    )
    .unwrap();
    let o = run(bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("x.csv")));
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn every_scenario_runs() {
    let dir = scratch("scenarios");
    let mut n = 0;
    for entry in fs::read_dir(scenarios()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let out = dir.join(path.file_stem().unwrap()).with_extension("csv");
        let o = run(bin()
            .args(["run", "--config"])
            .arg(&path)
            .arg("--out")
            .arg(&out));
        assert!(o.status.success(), "{}: {}", path.display(), stderr(&o));
        let text = fs::read_to_string(&out).unwrap();
        assert!(text.lines().count() >= 2, "{}", path.display());
        assert!(!text.contains('\r'));
        n += 1;
    }
    assert_eq!(n, 12);
}

#[test]
fn output_independent_of_workers() {
    let dir = scratch("workers");
    let cfg = scenarios().join("piezo_vmax_sweep.json");
    let go = |w: &str, out: &Path| {
        let o = run(bin()
            .args(["--workers", w, "run", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out));
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read(out).unwrap()
    };
    let one = go("1", &dir.join("w1.csv"));
    let again = go("1", &dir.join("w1b.csv"));
    let four = go("4", &dir.join("w4.csv"));
    assert_eq!(one, again);
    assert_eq!(one, four);
}

#[test]
fn environment_overrides_worker_flag() {
    let dir = scratch("env");
    let cfg = scenarios().join("swcap_vb_sweep.json");
    let base = dir.join("base.csv");
    let o = run(bin()
        .args(["--workers", "1", "run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&base));
    assert!(o.status.success(), "{}", stderr(&o));
    let env = dir.join("env.csv");
    let o = run(bin()
        .env("LOWPOWER_WORKERS", "3")
        .args(["--workers", "1", "run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&env));
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(base).unwrap(), fs::read(env).unwrap());
}

#[test]
fn repro_bundle_passes() {
    let dir = scratch("repro");
    let out = dir.join("t35.csv");
    let o = run(bin().args(["repro", "table-3.5", "--out"]).arg(&out));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().any(|l| l.starts_with("PASS")), "{text}");
    assert!(!text.lines().any(|l| l.starts_with("FAIL")), "{text}");
    assert!(out.exists());
}
