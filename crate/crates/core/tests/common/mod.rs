#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use defect_tune::dataset::{Instance, Release, NUM_ATTRIBUTES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Column order of the public PROMISE CK files.
pub const PROMISE_HEADER: &str = "name,version,name,wmc,dit,noc,cbo,rfc,lcom,ca,ce,npm,lcom3,loc,dam,moa,mfa,cam,ic,cbm,amc,max_cc,avg_cc,bug";

const PROMISE_ORDER: [&str; NUM_ATTRIBUTES] = [
    "wmc", "dit", "noc", "cbo", "rfc", "lcom", "ca", "ce", "npm", "lcom3", "loc", "dam", "moa", "mfa", "cam", "ic", "cbm",
    "amc", "max_cc", "avg_cc",
];

/// Class-level metrics loosely shaped like CK data; larger, more coupled
/// classes carry more bugs.
pub fn synthetic_rows(n: usize, defect_bias: f64, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let size: f64 = rng.gen_range(0.0f64..1.0).powi(2);
            let coupling: f64 = rng.gen_range(0.0..1.0);
            let mut by_name = std::collections::BTreeMap::new();
            by_name.insert("wmc", (size * 60.0 + rng.gen_range(0.0..5.0)).round());
            by_name.insert("dit", rng.gen_range(1..6) as f64);
            by_name.insert("noc", if rng.gen_bool(0.8) { 0.0 } else { rng.gen_range(1..10) as f64 });
            by_name.insert("cbo", (coupling * 30.0).round());
            by_name.insert("rfc", (size * 150.0 + coupling * 40.0).round());
            by_name.insert("lcom", (size * size * 900.0).round());
            by_name.insert("ca", (coupling * 12.0 * rng.gen_range(0.0..1.0)).round());
            by_name.insert("ce", (coupling * 18.0).round());
            by_name.insert("npm", (size * 40.0).round());
            by_name.insert("lcom3", rng.gen_range(0.0..2.0));
            by_name.insert("loc", (size * 2500.0 + rng.gen_range(0.0..40.0)).round());
            by_name.insert("dam", rng.gen_range(0.0..1.0));
            by_name.insert("moa", rng.gen_range(0..4) as f64);
            by_name.insert("mfa", rng.gen_range(0.0..1.0));
            by_name.insert("cam", 1.0 - 0.8 * size);
            by_name.insert("ic", rng.gen_range(0..3) as f64);
            by_name.insert("cbm", rng.gen_range(0..5) as f64);
            by_name.insert("amc", size * 80.0 + rng.gen_range(0.0..10.0));
            by_name.insert("max_cc", (size * 20.0).round() + 1.0);
            by_name.insert("avg_cc", size * 4.0 + 1.0);
            let mut metrics = [0.0; NUM_ATTRIBUTES];
            for (i, name) in defect_tune::dataset::ATTRIBUTE_NAMES.iter().enumerate() {
                metrics[i] = by_name[name];
            }
            let risk = defect_bias + 1.6 * size + 0.6 * coupling + rng.gen_range(-0.4..0.4);
            let bugs = if risk > 1.0 { 1 + ((risk - 1.0) * 3.0).floor() as u32 } else { 0 };
            Instance::new(metrics, bugs).unwrap()
        })
        .collect()
}

pub fn synthetic_releases(project: &str, count: usize, rows: usize, seed: u64) -> Vec<Release> {
    (0..count)
        .map(|v| {
            let bias = 0.1 * (v % 3) as f64;
            Release::new(project, v, synthetic_rows(rows, bias, seed.wrapping_add(v as u64 * 7919))).unwrap()
        })
        .collect()
}

/// Writes a release in the PROMISE column layout.
pub fn promise_csv(release: &Release, project: &str, version: &str) -> String {
    let mut out = String::from(PROMISE_HEADER);
    out.push('\n');
    for (k, inst) in release.instances().iter().enumerate() {
        write!(out, "{project},{version},org.example.C{k}").unwrap();
        for name in PROMISE_ORDER {
            let a = defect_tune::dataset::Attribute::from_name(name).unwrap();
            write!(out, ",{}", inst.metric(a)).unwrap();
        }
        writeln!(out, ",{}", inst.defect_count()).unwrap();
    }
    out
}

/// Writes `count` releases of `project` plus `<project>.manifest` into
/// `dir` and returns the manifest path.
pub fn write_project(dir: &Path, project: &str, count: usize, rows: usize, seed: u64) -> PathBuf {
    let mut manifest = format!("# {project}\n");
    for (v, release) in synthetic_releases(project, count, rows, seed).iter().enumerate() {
        let version = format!("1.{v}");
        let file = format!("{project}-{version}.csv");
        fs::write(dir.join(&file), promise_csv(release, project, &version)).unwrap();
        manifest.push_str(&file);
        manifest.push('\n');
    }
    let path = dir.join(format!("{project}.manifest"));
    fs::write(&path, manifest).unwrap();
    path
}

/// Every (attribute, midpoint) candidate scored directly from the two
/// sides' sample variances.
pub fn exhaustive_splits(rows: &[Instance]) -> Vec<(usize, f64, f64)> {
    let n = rows.len() as f64;
    let mut out = Vec::new();
    for a in 0..NUM_ATTRIBUTES {
        let mut values: Vec<f64> = rows.iter().map(|r| r.metrics()[a]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let cut = (w[0] + w[1]) / 2.0;
            let mut score = 0.0;
            for side in [true, false] {
                let ys: Vec<f64> = rows
                    .iter()
                    .filter(|r| (r.metrics()[a] <= cut) == side)
                    .map(|r| r.defect_count() as f64)
                    .collect();
                let m = ys.iter().sum::<f64>() / ys.len() as f64;
                let var = ys.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / ys.len() as f64;
                score += var.sqrt() * ys.len() as f64 / n;
            }
            out.push((a, cut, score));
        }
    }
    out
}

pub fn small_set(seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..20)
        .map(|_| {
            let mut m = [0.0; NUM_ATTRIBUTES];
            for v in m.iter_mut() {
                *v = rng.gen_range(0..12) as f64;
            }
            let bugs = if m[10] + m[4] > 12.0 { rng.gen_range(0..5) } else { rng.gen_range(0..2) };
            Instance::new(m, bugs).unwrap()
        })
        .collect()
}
