#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helfrich-forge"))
        .args(args)
        .env_remove("HELFRICH_FORGE_THREADS")
        .output()
        .expect("spawn helfrich-forge")
}

pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full = args.to_vec();
    let d = dir.to_str().unwrap();
    full.extend(["--out", d]);
    run(&full)
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("terminated by signal")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

pub fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "bad json ({e}): {}\nstderr: {}",
            stdout(o),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

/// Column `name` of a CSV document as floats.
pub fn column(text: &str, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let i = r
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    r.records()
        .map(|rec| rec.unwrap()[i].parse().unwrap())
        .collect()
}
