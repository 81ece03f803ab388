#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

/// Every documented command example, with its expected exit status.
pub const CASES: &[Case] = &[
    Case {
        name: "check_heisenberg",
        args: &["check", "@heisenberg"],
        exit: 0,
    },
    Case {
        name: "check_bad_involution",
        args: &["check", "@bad_involution"],
        exit: 2,
    },
    Case {
        name: "finite_type_heisenberg",
        args: &["finite-type", "@heisenberg", "--max-depth", "4"],
        exit: 0,
    },
    Case {
        name: "finite_type_levi_flat",
        args: &["finite-type", "@levi_flat", "--max-depth", "6"],
        exit: 0,
    },
    Case {
        name: "finite_type_k2",
        args: &["finite-type", "@k2", "--max-depth", "4"],
        exit: 0,
    },
    Case {
        name: "verify_heisenberg_pair",
        args: &["verify", "@heisenberg_pair"],
        exit: 0,
    },
    Case {
        name: "verify_heisenberg_pair_structured",
        args: &["--format", "structured", "verify", "@heisenberg_pair"],
        exit: 0,
    },
    Case {
        name: "verify_heisenberg_w",
        args: &["verify", "@heisenberg", "--f", "w1", "--g", "1"],
        exit: 3,
    },
    Case {
        name: "verify_heisenberg_low_order",
        args: &[
            "--order",
            "3",
            "verify",
            "@heisenberg",
            "--f",
            "2*z1",
            "--g",
            "z1",
        ],
        exit: 4,
    },
    Case {
        name: "verify_levi_flat_w",
        args: &["verify", "@levi_flat", "--f", "w1", "--g", "1"],
        exit: 3,
    },
    Case {
        name: "defect_heisenberg_w",
        args: &["defect", "@heisenberg", "--f", "w1"],
        exit: 0,
    },
    Case {
        name: "defect_heisenberg_pair",
        args: &["defect", "@heisenberg_pair"],
        exit: 0,
    },
    Case {
        name: "real_heisenberg_constant",
        args: &["real", "@heisenberg", "--f", "7"],
        exit: 0,
    },
    Case {
        name: "real_heisenberg_w",
        args: &["real", "@heisenberg", "--f", "w1"],
        exit: 3,
    },
    Case {
        name: "eval_oracle_heisenberg",
        args: &["eval-oracle", "@heisenberg", "--points", "50"],
        exit: 0,
    },
    Case {
        name: "fuzz_heisenberg_proportional",
        args: &[
            "--order",
            "32",
            "fuzz",
            "@heisenberg",
            "--mode",
            "proportional",
            "--trials",
            "100",
        ],
        exit: 0,
    },
    Case {
        name: "fuzz_heisenberg_generic",
        args: &["fuzz", "@heisenberg", "--trials", "1000"],
        exit: 0,
    },
    Case {
        name: "fuzz_levi_flat_generic",
        args: &["fuzz", "@levi_flat", "--trials", "200"],
        exit: 0,
    },
];

pub fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(format!("{name}.spec"))
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.txt"))
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary; `@name` arguments expand to the bundled spec files.
pub fn run(args: &[&str]) -> Output {
    let args: Vec<String> = args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(name) => spec_path(name).to_string_lossy().into_owned(),
            None => a.to_string(),
        })
        .collect();
    let out = Command::new(env!("CARGO_BIN_EXE_crconst"))
        .args(&args)
        .output()
        .expect("spawn crconst");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

pub struct GoldenResult {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

/// Compares one case against its golden file. With `CRCONST_BLESS=1` the
/// file is rewritten instead.
pub fn check_golden(case: &Case) -> GoldenResult {
    let out = run(case.args);
    let path = golden_path(case.name);
    if std::env::var_os("CRCONST_BLESS").is_some() {
        std::fs::write(&path, &out.stdout).expect("write golden");
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_default();
    let mut problems = Vec::new();
    if out.code != case.exit {
        problems.push(format!(
            "exit {} (want {}), stderr: {}",
            out.code,
            case.exit,
            out.stderr.trim()
        ));
    }
    if out.stdout != expected {
        let line = out
            .stdout
            .lines()
            .zip(expected.lines())
            .position(|(a, b)| a != b);
        problems.push(format!(
            "report differs from {} (first differing line {:?})",
            path.display(),
            line.map(|l| l + 1)
        ));
    }
    GoldenResult {
        name: case.name,
        ok: problems.is_empty(),
        detail: problems.join("; "),
    }
}
