use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use topk_lsh::bench::CSV_HEADER;
use topk_lsh::cli::ANALYZE_HEADER;

const EXAMPLE: &str = "# worked example\nt1\t2 5 4 3\nt2\t1 4 7 5\nt3\t0 8 7 5\n";

fn topk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topk-lsh"))
        .args(args)
        .output()
        .expect("run topk-lsh")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_example(dir: &Path) -> String {
    let path = dir.join("example.txt");
    fs::write(&path, EXAMPLE).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn generate_writes_deterministic_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for path in [&a, &b] {
        let out = topk(&[
            "generate",
            "--n",
            "2500",
            "--k",
            "10",
            "--domain",
            "600",
            "--dist",
            "uniform",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(stdout(&out).contains("n=2500 k=10"));
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    assert_eq!(text.iter().filter(|&&c| c == b'\n').count(), 2500);
}

#[test]
fn generate_rejects_small_domain() {
    let dir = tempfile::tempdir().unwrap();
    let out = topk(&[
        "generate",
        "--k",
        "10",
        "--domain",
        "5",
        "--out",
        dir.path().join("x.txt").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn query_lists_results_by_distance() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_example(dir.path());
    let out = topk(&[
        "query", "--data", &data, "--q", "8 1 0 6", "--theta", "0.5625", "--method", "invin",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.starts_with("# method=invin k=4 theta=0.5625 theta_d=9 candidates=2 results=1\n"),
        "{text}"
    );
    assert!(text.ends_with("t3\t6\n"));

    // τ₁ is disjoint from the query: distance 16 exceeds 0.999 * 16.
    let out = topk(&[
        "query", "--data", &data, "--q", "8 1 0 6", "--theta", "0.999",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<String> = stdout(&out).lines().skip(1).map(str::to_owned).collect();
    assert_eq!(lines, ["t3\t6", "t2\t10"]);

    let out = topk(&[
        "query", "--data", &data, "--q", "8 5 7 0", "--theta", "0.5", "--method", "scheme1", "--l",
        "safe",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn query_errors_have_stable_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_example(dir.path());
    assert_eq!(
        topk(&["query", "--data", &data, "--q", "8 1", "--theta", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        topk(&["query", "--data", &data, "--q", "8 8 1 0", "--theta", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        topk(&["query", "--data", &data, "--q", "8 1 0 6", "--theta", "1.0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        topk(&[
            "query", "--data", &data, "--q", "8 1 0 6", "--theta", "0.5", "--method", "scheme1",
            "--l", "7"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        topk(&["query", "--data", &data, "--q", "8 1 0 6", "--theta", "0.5", "--method", "nope"])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        topk(&[
            "query",
            "--data",
            missing.to_str().unwrap(),
            "--q",
            "1 2 3 4",
            "--theta",
            "0.5"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(topk(&[]).status.code(), Some(2));
}

fn strip_timing(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_owned())
        .collect()
}

#[test]
fn bench_emits_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("small.txt");
    let out = topk(&[
        "generate",
        "--n",
        "3000",
        "--k",
        "10",
        "--domain",
        "800",
        "--seed",
        "3",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let csv_path = dir.path().join("grid.csv");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let out = topk(&[
            "bench",
            "--data",
            data.to_str().unwrap(),
            "--thetas",
            "0.1,0.2,0.3",
            "--ls",
            "1,3,6,10",
            "--methods",
            "invin,invin-drop,scheme1,scheme2",
            "--queries",
            "60",
            "--seed",
            "9",
            "--out",
            csv_path.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        runs.push(fs::read_to_string(&csv_path).unwrap());
    }
    let lines: Vec<&str> = runs[0].lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 30);
    assert!(lines[1].starts_with("small,invin,10,0.1,,60,"));
    assert_eq!(strip_timing(&runs[0]), strip_timing(&runs[1]));

    let out = topk(&[
        "bench",
        "--data",
        data.to_str().unwrap(),
        "--methods",
        "invin",
        "--queries",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').nth(8) == Some("1")));

    let out = topk(&[
        "bench",
        "--data",
        data.to_str().unwrap(),
        "--methods",
        "scheme1",
        "--ls",
        "40,50",
        "--queries",
        "12",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("clamped to 45"));
    assert_eq!(
        topk(&["bench", "--data", data.to_str().unwrap(), "--thetas", "1.5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn analyze_emits_model_curves() {
    let out = topk(&[
        "analyze",
        "--k",
        "10",
        "--thetas",
        "0,0.09,0.3",
        "--ls",
        "1,3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(ANALYZE_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 2 * 2);

    let at = |theta: &str, scheme: &str, l: &str| {
        rows.iter()
            .find(|r| r[1] == theta && r[2] == scheme && r[4] == l)
            .unwrap()
            .clone()
    };
    assert_eq!(at("0.09", "scheme1", "1")[5], "0.538462");
    assert_eq!(at("0.09", "scheme2", "1")[5], "0.91");
    assert_eq!(at("0.09", "scheme1", "1")[7], "0.318616");
    assert_eq!(at("0.09", "scheme1", "1")[3], "2");
    assert_eq!(at("0.09", "scheme2", "1")[3], "1");
    assert_eq!(at("0", "scheme1", "1")[6], "1");
    assert_eq!(at("0", "scheme2", "3")[6], "1");
    assert!(rows.iter().all(|r| r[7].parse::<f64>().unwrap() <= 1.0));

    assert_eq!(
        topk(&["analyze", "--k", "10", "--thetas", "1.2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(topk(&["analyze", "--k", "0"]).status.code(), Some(2));
}
