use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn atomsched(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_atomsched"));
    cmd.args(args);
    match workers {
        Some(w) => cmd.env("ATOMSCHED_WORKERS", w),
        None => cmd.env_remove("ATOMSCHED_WORKERS"),
    };
    cmd.output().expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Decimal expansion of `base^exp` by schoolbook multiplication.
fn power_decimal(base: u32, exp: u32) -> String {
    let mut digits = vec![1u32]; // little endian
    for _ in 0..exp {
        let mut carry = 0;
        for d in digits.iter_mut() {
            let v = *d * base + carry;
            *d = v % 10;
            carry = v / 10;
        }
        while carry > 0 {
            digits.push(carry % 10);
            carry /= 10;
        }
    }
    digits.iter().rev().map(|d| char::from_digit(*d, 10).unwrap()).collect()
}

#[test]
fn enumerate_reports_the_exact_size_when_too_large() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = String::from("version = 1\nhorizon = 24\n");
    for i in 0..100 {
        doc.push_str(&format!("\n[[appliance]]\nname = \"unit-{i}\"\nalpha = 0\nbeta = 23\npattern = [1.0]\n"));
    }
    let file = dir.path().join("worst.toml");
    fs::write(&file, doc).unwrap();
    let out = atomsched(&["enumerate", path_str(&file)], None);
    assert_eq!(out.status.code(), Some(3));
    let expected = power_decimal(24, 100);
    assert_eq!(expected.len(), 139);
    assert!(text(&out.stderr).contains(&expected), "{}", text(&out.stderr));
}

#[test]
fn solve_par_for_a_single_dish_washer() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("dw.toml");
    fs::write(&file, "version = 1\n[[appliance]]\ncatalog = \"dish_washer\"\n").unwrap();
    let out = atomsched(&["solve", path_str(&file), "--objective", "par", "--format", "json"], None);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ub = report["ub"].as_f64().unwrap();
    let lb = report["lb"].as_f64().unwrap();
    // H / delta for the Boolean schedule; the relaxation spreads the load evenly
    assert!((ub - 12.0).abs() < 1e-9, "ub {ub}");
    assert!((lb - 1.0).abs() < 1e-6, "lb {lb}");
    assert_eq!(report["schedule"].as_array().unwrap().len(), 1);
}

#[test]
fn solve_formats_agree() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("i.toml");
    assert!(atomsched(&["gen", "--n", "4", "--seed", "9", "--out", path_str(&file)], None).status.success());
    let json = atomsched(&["solve", path_str(&file), "--format", "json", "--n-d", "2"], None);
    let csv = atomsched(&["solve", path_str(&file), "--format", "csv", "--n-d", "2"], None);
    let report: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let csv = text(&csv.stdout);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "objective,lb,ub,gap,iterations,appliance,name,start,start_time,end_time"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for (row, placement) in rows.iter().zip(report["schedule"].as_array().unwrap()) {
        assert_eq!(row[1].parse::<f64>().unwrap(), report["lb"].as_f64().unwrap());
        assert_eq!(row[2].parse::<f64>().unwrap(), report["ub"].as_f64().unwrap());
        assert_eq!(row[7].parse::<u64>().unwrap(), placement["start"].as_u64().unwrap());
    }
}

#[test]
fn phev_renders_clock_times() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("phev.toml");
    fs::write(&file, "version = 1\n[[appliance]]\ncatalog = \"phev\"\n").unwrap();
    let out = atomsched(&["enumerate", path_str(&file)], None);
    assert!(out.status.success());
    let stdout = text(&out.stdout);
    assert!(stdout.contains("evaluations    6"), "{stdout}");
    assert!(stdout.contains("slot  0  00:00-03:00"), "{stdout}");
}

#[test]
fn bench_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("results.csv");
    let out = atomsched(
        &["bench", "--n-range", "2-8", "--n-d-list", "1,5", "--seeds", "1-20", "--objective", "cost", "--out", path_str(&file)],
        None,
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    let csv = fs::read_to_string(&file).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "n,n_d,seed,objective,lb,ub,gap,iterations,wall_ms");
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    assert_eq!(rows.len(), 7 * 2 * 20);
    for row in &rows {
        let gap: f64 = row[6].parse().unwrap();
        assert!(gap >= -1e-6, "{row:?}");
    }
}

#[test]
fn bench_output_is_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "3", "8", "1"].into_iter().enumerate() {
        let file = dir.path().join(format!("run{i}.csv"));
        let out = atomsched(
            &["bench", "--n-range", "2-5", "--n-d-list", "1,10", "--seeds", "0-4", "--objective", "par", "--no-timing", "--out", path_str(&file)],
            Some(workers),
        );
        assert!(out.status.success(), "{}", text(&out.stderr));
        outputs.push(fs::read(&file).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn gen_is_deterministic() {
    let a = atomsched(&["gen", "--n", "3", "--seed", "42"], None);
    let b = atomsched(&["gen", "--n", "3", "--seed", "42"], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(text(&a.stdout).starts_with("version = 1\n"));
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.toml");
    fs::write(&file, "version = 1\n\n[[appliance]]\nname = \"w\"\nalpha = 3\nbeta = 5\nlevel = 1.0\ndelta = 4\n").unwrap();
    let out = atomsched(&["solve", path_str(&file)], None);
    assert_eq!(out.status.code(), Some(1));
    let stderr = text(&out.stderr);
    assert!(stderr.contains("line 3") && stderr.contains("alpha + delta - 1"), "{stderr}");

    assert_eq!(atomsched(&["solve", "/nonexistent/x.toml"], None).status.code(), Some(1));
    assert_eq!(atomsched(&["gen", "--n", "0", "--seed", "1"], None).status.code(), Some(1));
    assert_eq!(atomsched(&["solve", path_str(&file), "--objective", "peak"], None).status.code(), Some(1));
    assert_eq!(atomsched(&["bench", "--n-range", "9-2"], None).status.code(), Some(1));
}

#[test]
fn solver_configuration_errors_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("i.toml");
    fs::write(&file, "version = 1\n[[appliance]]\ncatalog = \"phev\"\n").unwrap();
    let out = atomsched(&["solve", path_str(&file), "--theta-d", "1.5"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("theta_d"));
}
