//! CLI cases with checked-in expected output under `tests/golden`.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

const fn case(name: &'static str, args: &'static [&'static str], exit: i32) -> Case {
    Case { name, args, exit }
}

/// Arguments starting with `@` name files in the golden directory.
pub const CASES: &[Case] = &[
    case(
        "apply-nabla-left-sum",
        &["apply", "nabla-left-sum", "--alpha", "1/2", "-i", "@ones.csv"],
        0,
    ),
    case(
        "apply-nabla-left-sum-inclusive",
        &[
            "apply",
            "nabla-left-sum",
            "--alpha",
            "1/2",
            "--convention",
            "inclusive-base",
            "-i",
            "@ones.csv",
        ],
        0,
    ),
    case(
        "apply-delta-left-diff",
        &["apply", "delta-left-diff", "--alpha", "3/2", "-i", "@mixed.csv"],
        0,
    ),
    case(
        "apply-nabla-right-diff",
        &["apply", "nabla-right-diff", "--alpha", "7/3", "-i", "@mixed.csv"],
        0,
    ),
    case(
        "apply-delta-right-sum-float",
        &[
            "--mode",
            "float",
            "apply",
            "delta-right-sum",
            "--alpha",
            "5/4",
            "-i",
            "@mixed.csv",
        ],
        0,
    ),
    case("apply-q-reflect", &["apply", "q-reflect", "-i", "@mixed.csv"], 0),
    case(
        "apply-too-short",
        &["apply", "delta-left-diff", "--alpha", "11/2", "-i", "@ones.csv"],
        3,
    ),
    case(
        "check-table",
        &["check", "all", "--alpha", "1/2,2", "--trials", "3", "--seed", "7"],
        0,
    ),
    case(
        "check-json",
        &[
            "check",
            "dual-left-sum",
            "cauchy-integer-left-nabla",
            "--alpha",
            "3/2,2",
            "--trials",
            "2",
            "--json",
        ],
        0,
    ),
    case(
        "check-float",
        &[
            "--mode",
            "float",
            "check",
            "semigroup-nabla-left",
            "ibp-sum-delta",
            "--alpha",
            "5/4,7/3",
            "--trials",
            "4",
        ],
        0,
    ),
    case(
        "check-standard-convention",
        &[
            "check",
            "dual-left-sum",
            "--alpha",
            "1/2",
            "--convention",
            "standard",
            "--trials",
            "2",
        ],
        1,
    ),
    case("solve-affine", &["solve", "@affine.json"], 0),
    case("solve-forced", &["solve", "@forced.json", "--plot-data"], 0),
    case("solve-nonlinear", &["solve", "@nonlinear.json"], 0),
    case("kernel-exact", &["kernel", "--alpha", "1/2", "--to", "8"], 0),
    case(
        "kernel-negative-order",
        &["kernel", "--alpha", "-3/2", "--from", "2", "--to", "7"],
        0,
    ),
    case(
        "kernel-bad-range",
        &["kernel", "--alpha", "1/2", "--from", "-2", "--to", "6"],
        2,
    ),
    case(
        "kernel-float",
        &["--mode", "float", "kernel", "--alpha", "7/3", "--to", "6"],
        0,
    ),
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

pub struct Output {
    pub stdout: Vec<u8>,
    pub exit: i32,
}

pub fn run(case: &Case) -> Output {
    let dir = golden_dir();
    let args: Vec<String> = case
        .args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(file) => dir.join(file).to_string_lossy().into_owned(),
            None => a.to_string(),
        })
        .collect();
    let out = Command::new(env!("CARGO_BIN_EXE_fracdiff"))
        .args(&args)
        .env_remove("FRACDIFF_MODE")
        .output()
        .expect("fracdiff runs");
    Output {
        stdout: out.stdout,
        exit: out.status.code().unwrap_or(-1),
    }
}

pub fn expected(case: &Case) -> Vec<u8> {
    let path = golden_dir().join(format!("{}.out", case.name));
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
