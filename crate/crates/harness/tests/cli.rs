use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

fn rcga(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_rcga")).args(args).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn summary(dir: &Path) -> String {
    fs::read_to_string(dir.join("summary.txt")).unwrap()
}

const TINY_RUN: &str = r#"
kind = "run"
n = 1
r = 2
repetitions = 100
[k]
rule = "explicit"
value = 2
[acceptance]
min_success_fraction = 1.0
"#;

#[test]
fn smallest_instance_always_succeeds() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", TINY_RUN);
    let out = tmp.path().join("out");
    let (code, _) = rcga(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let s = summary(&out);
    assert!(s.contains("optimum_found=true\n"), "{s}");
    assert!(s.contains("optimum_found_count=100\n"), "{s}");
    let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
    assert!(runs.starts_with("n,r,K,replica,seed,iterations,found\n"));
    assert_eq!(runs.lines().count(), 101);
    assert!(runs.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn constant_objective_has_no_biased_steps() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "drift.toml",
        r#"
kind = "drift"
objective = "constant"
n = [5, 20]
r = [2, 4]
repetitions = 4
[k]
rule = "explicit"
value = 40
[max_iterations]
rule = "explicit"
value = 500
[acceptance]
max_biased_steps = 0
"#,
    );
    let out = tmp.path().join("out");
    let (code, _) = rcga(&["drift", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_path(out.join("drift.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "biased_steps").unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        assert_eq!(&rec.unwrap()[col], "0");
        rows += 1;
    }
    assert_eq!(rows, 16);
    let series = fs::read_to_string(out.join("drift_series_n20_r4.csv")).unwrap();
    assert!(series.starts_with("t,position,class,delta_numerator,K,mu_numerator\n"));
    assert!(!series.contains(",biased,"));
}

#[test]
fn malformed_config_writes_nothing() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    for body in ["kind = ", "kind = \"run\"\nn = \"many\"", "kind = \"run\"\nunknown_key = 1"] {
        let cfg = write_config(tmp.path(), "bad.toml", body);
        let (code, err) = rcga(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(code, 2, "{body}: {err}");
        assert!(!out.exists());
    }
    let (code, _) = rcga(&["run", "--config", tmp.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn error_statuses_are_distinct() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let out = out.to_str().unwrap();

    let cfg = write_config(tmp.path(), "kind.toml", TINY_RUN);
    assert_eq!(rcga(&["scaling", "--config", &cfg, "--out", out]).0, 2);

    let cfg = write_config(tmp.path(), "oracle.toml", "kind = \"verify\"\n[[verify.checks]]\noracle = \"jump\"\n");
    assert_eq!(rcga(&["verify", "--config", &cfg, "--out", out]).0, 2);

    let cfg = write_config(
        tmp.path(),
        "k.toml",
        "kind = \"run\"\nn = 3\nr = 4\n[k]\nrule = \"explicit\"\nvalue = 10\nround_up = false\n",
    );
    assert_eq!(rcga(&["run", "--config", &cfg, "--out", out]).0, 3);
    assert!(!Path::new(out).exists());

    let cfg = write_config(
        tmp.path(),
        "fail.toml",
        "kind = \"run\"\nobjective = \"constant\"\nn = 3\nr = 4\n[k]\nrule = \"explicit\"\nvalue = 8\n\
         [max_iterations]\nrule = \"explicit\"\nvalue = 50\n[acceptance]\nmin_success_fraction = 0.5\n",
    );
    let (code, err) = rcga(&["run", "--config", &cfg, "--out", out]);
    assert_eq!(code, 4, "{err}");
    assert!(summary(Path::new(out)).contains("acceptance_passed=false"));
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn artifacts_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "scaling.toml",
        r#"
kind = "scaling"
n = [8, 16]
r = [3, 4]
repetitions = 6
base_seed = 77
[k]
rule = "theorem"
c = 0.05
"#,
    );
    let dirs: Vec<_> = ["a", "b", "c"].iter().map(|d| tmp.path().join(d)).collect();
    for (dir, threads) in dirs.iter().zip(["1", "2", "3"]) {
        let (code, err) =
            rcga(&["scaling", "--config", &cfg, "--out", dir.to_str().unwrap(), "--threads", threads, "--emit-plots"]);
        assert_eq!(code, 0, "{err}");
    }
    let first = read_dir(&dirs[0]);
    let names: Vec<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["scaling.csv", "scaling.svg", "scaling_summary.csv", "summary.txt"]);
    for dir in &dirs[1..] {
        assert_eq!(read_dir(dir), first);
    }
    let (code, _) = rcga(&["scaling", "--config", &cfg, "--out", dirs[2].to_str().unwrap(), "--seed", "78"]);
    assert_eq!(code, 0);
    assert_ne!(read_dir(&dirs[2]), first);
}

#[test]
fn example_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let config = rcga_harness::ExperimentConfig::load(&path).unwrap();
        assert!(config.kind.is_some(), "{}", path.display());
        if config.kind != Some(rcga_harness::ExperimentKind::Verify) {
            config.cells().unwrap();
        }
        seen += 1;
    }
    assert_eq!(seen, 5);
}
