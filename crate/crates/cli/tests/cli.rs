use std::process::{Command, Output};

fn qmix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmix")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows (header row included) and `#` lines, separately.
fn split(csv: &str) -> (Vec<Vec<String>>, Vec<String>) {
    let mut rows = Vec::new();
    let mut meta = Vec::new();
    for line in csv.lines() {
        if let Some(m) = line.strip_prefix("# ") {
            meta.push(m.to_string());
        } else {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    (rows, meta)
}

fn meta_value(meta: &[String], key: &str) -> Option<String> {
    meta.iter().find_map(|m| m.strip_prefix(&format!("{key} = ")).map(str::to_string))
}

fn float(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s:?}"))
}

fn mode_of(args: &[&str]) -> f64 {
    let out = stdout(&qmix(args));
    let (_, meta) = split(&out);
    float(&meta_value(&meta, "mode").unwrap())
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        vec!["dist-r", "--samples", "0"],
        vec!["dist-r", "--dims", "2by2"],
        vec!["dist-r", "--n", "5", "--dims", "2x2"],
        vec!["psep", "--dims", "3x3", "--samples", "10"],
        vec!["dist-r", "--alpha", "2"],
        vec!["dist-r", "--measure", "gaussian"],
        vec!["borel", "--ns", "2,8"],
        vec!["dist-r", "--not-a-flag"],
    ] {
        let o = qmix(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn runtime_errors_exit_with_three() {
    let o = qmix(&["borel", "--ns", "8", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn header_records_the_run_config() {
    let out = stdout(&qmix(&["rstar", "--etas", "1", "--samples", "100", "--seed", "7"]));
    let (_, meta) = split(&out);
    assert!(meta[0].starts_with("qmix "));
    for (k, v) in [
        ("command", "rstar"),
        ("n", "4"),
        ("dims", "2x2"),
        ("measure", "dirichlet:1"),
        ("samples", "100"),
        ("seed", "7"),
        ("alpha", "0.01"),
        ("etas", "1"),
    ] {
        assert_eq!(meta_value(&meta, k).as_deref(), Some(v), "{k}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# sample run\nmeasure = dirichlet:0.5\nsamples = 5\nseed = 3\n").unwrap();
    let out = stdout(&qmix(&["sample", "--config", cfg.to_str().unwrap(), "--samples", "7"]));
    let (rows, meta) = split(&out);
    assert_eq!(meta_value(&meta, "measure").as_deref(), Some("dirichlet:0.5"));
    assert_eq!(meta_value(&meta, "seed").as_deref(), Some("3"));
    assert_eq!(rows.len(), 8);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(qmix(&["sample", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn fixed_r_samples_keep_their_participation_ratio() {
    let (rows, _) = split(&stdout(&qmix(&["sample", "--measure", "fixed-r:2.0", "--samples", "100"])));
    assert_eq!(rows[0], ["lambda_0", "lambda_1", "lambda_2", "lambda_3"]);
    for row in &rows[1..] {
        let l: Vec<f64> = row.iter().map(|s| float(s)).collect();
        let r = 1.0 / l.iter().map(|x| x * x).sum::<f64>();
        // 12 printed digits bound the round-trip error.
        assert!((r - 2.0).abs() <= 1e-10, "R = {r}");
    }
}

#[test]
fn dirichlet_samples_are_spectra() {
    let (rows, _) = split(&stdout(&qmix(&["sample", "--measure", "dirichlet:0.5", "--samples", "1000"])));
    assert_eq!(rows.len(), 1001);
    for row in &rows[1..] {
        let l: Vec<f64> = row.iter().map(|s| float(s)).collect();
        assert!(l.iter().all(|&x| x >= 0.0));
        assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn sample_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.csv");
    let write = || {
        let o = qmix(&["sample", "--dims", "2x3", "--states", "--samples", "50", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
        std::fs::read(&p).unwrap()
    };
    let first = write();
    assert_eq!(first, write());
    let (rows, _) = split(&String::from_utf8(first).unwrap());
    assert_eq!(rows[0].len(), 6 + 2 * 36);
}

#[test]
fn dist_r_two_qubits_matches_closed_form() {
    let out = stdout(&qmix(&["dist-r", "--samples", "1000000", "--seed", "5"]));
    let (rows, meta) = split(&out);
    assert_eq!(rows[0], ["R_bin_center", "empirical_density", "empirical_ci", "analytic_density", "z_score"]);
    assert_eq!(rows.len(), 201);
    assert!(rows[1..].iter().all(|r| !r[3].is_empty()));
    let z = float(&meta_value(&meta, "max_abs_z").unwrap());
    assert!(z < 4.0, "max |z| = {z}");
}

#[test]
fn dist_r_qubit_qutrit_has_tail_only() {
    let out = stdout(&qmix(&["dist-r", "--dims", "2x3", "--samples", "200000", "--bins", "50"]));
    let (rows, _) = split(&out);
    for r in &rows[1..] {
        let x = float(&r[0]);
        assert_eq!(!r[3].is_empty(), x >= 5.0, "R = {x}");
    }
}

#[test]
fn dist_lmax_records_breakpoints() {
    let out = stdout(&qmix(&["dist-lmax", "--dims", "2x3", "--samples", "200000"]));
    let (rows, meta) = split(&out);
    assert_eq!(meta_value(&meta, "breakpoints").as_deref(), Some("0.2,0.25,0.333333333333,0.5"));
    assert!(rows[1..].iter().all(|r| !r[3].is_empty()));
    assert!(float(&meta_value(&meta, "max_abs_z").unwrap()) < 4.0);
}

#[test]
fn dirichlet_parameter_shifts_the_lmax_peak() {
    let mode = |eta: &str| {
        let m = format!("dirichlet:{eta}");
        mode_of(&["dist-lmax", "--measure", &m, "--samples", "200000", "--bins", "50", "--seed", "2"])
    };
    let (low, mid, high) = (mode("0.5"), mode("1"), mode("2"));
    assert!(low > mid && mid > high, "modes {low} {mid} {high}");
}

/// Density of the largest of `n` uniform spacings, by inclusion–exclusion.
fn lmax_density(n: usize, t: f64) -> f64 {
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 1..=n {
        binom *= (n + 1 - k) as f64 / k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * binom * (k * (n - 1)) as f64 * (1.0 - k as f64 * t).max(0.0).powi(n as i32 - 2);
    }
    sum
}

#[test]
fn lmax_peak_sits_near_one_over_n() {
    let n = 12;
    let m = mode_of(&["dist-lmax", "--n", "12", "--samples", "100000"]);
    let lo = 1.0 / n as f64;
    let exact = (0..=20_000)
        .map(|i| lo + (1.0 - lo) * i as f64 / 20_000.0)
        .max_by(|a, b| lmax_density(n, *a).total_cmp(&lmax_density(n, *b)))
        .unwrap();
    let bin = (1.0 - lo) / 200.0;
    assert!((m - exact).abs() <= 3.0 * bin, "mode {m}, exact {exact}");
    assert!(m < 3.0 / n as f64);
}

#[test]
fn psep_sweep() {
    let out = stdout(&qmix(&["psep", "--etas", "0.5,1,50", "--samples", "100000"]));
    let (rows, meta) = split(&out);
    assert_eq!(rows[0], ["eta", "P_ppt", "ci", "P_entropic_violation", "ci"]);
    let p: Vec<f64> = rows[1..].iter().map(|r| float(&r[1])).collect();
    assert!(p[0] < p[1] && p[1] < p[2]);
    assert!(p[2] > 0.999);
    assert!((p[1] - 0.6312).abs() < 0.01);
    assert_eq!(meta_value(&meta, "check P_ppt nondecreasing in eta").as_deref(), Some("pass"));
    assert_eq!(meta_value(&meta, "check P_entropic_violation <= 1 - P_ppt").as_deref(), Some("pass"));
}

#[test]
fn rstar_sweep() {
    let out = stdout(&qmix(&["rstar", "--etas", "0.05,0.1,0.5,1,2,10", "--samples", "50000"]));
    let (rows, meta) = split(&out);
    let exact: Vec<f64> = rows[1..].iter().map(|r| float(&r[1])).collect();
    assert_eq!(exact[3], 2.5);
    assert!(exact.windows(2).all(|w| w[1] > w[0]));
    let low = &rows[1];
    assert!((float(&low[1]) - float(&low[2])).abs() < 0.1);
    assert_eq!(meta_value(&meta, "check mean_R >= R_star").as_deref(), Some("pass"));
}

#[test]
fn borel_sweep() {
    let out = stdout(&qmix(&["borel", "--ns", "16,64,1000"]));
    let (rows, meta) = split(&out);
    assert_eq!(rows[0], ["N", "r_star", "ratio"]);
    let err = float(&meta_value(&meta, "final_abs_error").unwrap());
    assert!(err / 1.4327 < 0.05);
}
