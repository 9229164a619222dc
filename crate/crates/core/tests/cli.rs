use std::fs;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prandtl-vp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV printed by the binary, as string fields.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(
        bin(&["solve", "--example", "9", "--N", "8"]).status.code(),
        Some(2)
    );
    assert_eq!(
        bin(&["solve", "--example", "1", "--N", "8", "--n", "12"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    // H present on the banded path
    assert_eq!(
        bin(&["solve", "--example", "3", "--N", "8", "--solver", "banded"])
            .status
            .code(),
        Some(2)
    );
    let missing = bin(&["solve", "--samples", "/nonexistent/x.csv", "--sigma", "1"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn solve_example3_small_error() {
    let o = bin(&["solve", "--example", "3", "--N", "32"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("n,m,cond_inf,error_weighted,residual_inf,path\n"));
    let r = &rows(&text)[0];
    assert_eq!(
        (r[0].as_str(), r[1].as_str(), r[5].as_str()),
        ("48", "16", "dense")
    );
    let err: f64 = r[3].parse().unwrap();
    assert!(err <= 1e-3, "{err}");
}

#[test]
fn table_example4_errors_decrease() {
    for flag in [["--N", "8,16,32,64,128"], ["--n", "12,24,48,96,192"]] {
        let o = bin(&[
            "table",
            "--example",
            "4",
            flag[0],
            flag[1],
            "--format",
            "csv",
        ]);
        assert!(o.status.success());
        let errs: Vec<f64> = rows(&stdout(&o))
            .iter()
            .map(|r| r[2].parse().unwrap())
            .collect();
        assert_eq!(errs.len(), 5);
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "{errs:?}");
        }
    }
}

#[test]
fn table_markdown() {
    let o = bin(&["table", "--example", "1", "--N", "8,16", "--format", "md"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(
        text.lines().filter(|l| l.starts_with('|')).count() >= 4,
        "{text}"
    );
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let body = |name: &str| {
        let path = dir.path().join(name);
        let o = bin(&[
            "table",
            "--example",
            "2",
            "--N",
            "8,16,32",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        // drop the wall-clock column
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(body("a.csv"), body("b.csv"));
}

#[test]
fn probe_dominance_negative_sigma() {
    let o = bin(&[
        "probe",
        "--what",
        "dominance",
        "--n",
        "512",
        "--sigma",
        "-5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = &rows(&stdout(&o))[0];
    assert_eq!(r[3], "4");
    let margin: f64 = r[4].parse().unwrap();
    assert!((margin + 1.0 / 168.0).abs() < 1e-15, "{margin}");
    assert_eq!(r[5], "false");

    let o = bin(&[
        "probe",
        "--what",
        "dominance",
        "--n",
        "48,96",
        "--sigma",
        "2",
    ]);
    assert!(rows(&stdout(&o)).iter().all(|r| r[5] == "true"));
}

#[test]
fn probe_decoupling_and_lebesgue() {
    let o = bin(&["probe", "--what", "decoupling", "--n", "24,96,384"]);
    assert!(o.status.success());
    for r in rows(&stdout(&o)) {
        assert!(r[4].parse::<f64>().unwrap() < 1e-13);
    }
    let o = bin(&["probe", "--what", "lebesgue", "--n", "24,48"]);
    for r in rows(&stdout(&o)) {
        let l: f64 = r[2].parse().unwrap();
        assert!((1.0..=4.0).contains(&l));
    }
}

#[test]
fn samples_mode() {
    let dir = tempfile::tempdir().unwrap();
    let n = 12;
    // g = 1 sampled at the nodes, sigma = 0 without K: D f~ = g
    let mut text = String::from("k,g_value\n# constant\n");
    for k in 1..=n {
        text.push_str(&format!("{k}, 1.0\n"));
    }
    let input = dir.path().join("g.csv");
    fs::write(&input, &text).unwrap();
    let coeffs = dir.path().join("c.csv");
    let o = bin(&[
        "solve",
        "--samples",
        input.to_str().unwrap(),
        "--sigma",
        "0",
        "--coeffs",
        coeffs.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &rows(&stdout(&o))[0];
    assert_eq!((r[0].as_str(), r[1].as_str()), ("12", "4"));
    let c: Vec<f64> = rows(&fs::read_to_string(coeffs).unwrap())
        .iter()
        .map(|r| r[1].parse().unwrap())
        .collect();
    assert!((c[0] - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-14);
    assert!(c[1..].iter().all(|v| v.abs() < 1e-14));

    // size mismatch and non-dominant banded request
    let o = bin(&[
        "solve",
        "--samples",
        input.to_str().unwrap(),
        "--sigma",
        "0",
        "--n",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&[
        "solve",
        "--samples",
        input.to_str().unwrap(),
        "--sigma",
        "-5",
        "--solver",
        "banded",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dominant"));
    // without K that matrix is exactly singular (1 - 5/5 on row 4)
    let o = bin(&[
        "solve",
        "--samples",
        input.to_str().unwrap(),
        "--sigma",
        "-5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    // with K, auto falls back to the dense path
    let o = bin(&[
        "solve",
        "--samples",
        input.to_str().unwrap(),
        "--sigma",
        "-5",
        "--with-K",
    ]);
    assert!(o.status.success());
    assert_eq!(rows(&stdout(&o))[0][5], "dense");

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,1\n1,2\n").unwrap();
    let o = bin(&["solve", "--samples", bad.to_str().unwrap(), "--sigma", "1"]);
    assert_ne!(o.status.code(), Some(0));
}
