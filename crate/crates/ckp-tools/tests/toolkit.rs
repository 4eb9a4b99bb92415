//! Cross-module integration checks for the toolkit library: golden export,
//! generator-to-solver pipelines, and directory-level filtering.

use std::fs;

use ckp_core::model::{parse_instance, write_instance, Instance, Item};
use ckp_tools::bench::{run_bench, Algo};
use ckp_tools::export::export_ilp;
use ckp_tools::gen::{generate, Family, GenConfig};
use ckp_tools::trivial::{filter_trivial_dir, is_trivial};

fn fig1() -> Instance {
    Instance::new(
        2,
        10,
        vec![
            Item { weight: 6, profit: 15, color: 1 },
            Item { weight: 4, profit: 8, color: 1 },
            Item { weight: 2, profit: 3, color: 2 },
            Item { weight: 1, profit: 1, color: 2 },
        ],
    )
}

fn small_config(seed: u64) -> GenConfig {
    GenConfig {
        family: if seed % 2 == 0 { Family::Uniform } else { Family::Zipf },
        n: 4 + (seed as usize % 8),
        b: 20,
        m: 1 + (seed as u32 % 4),
        weight_interval: (0.1, 0.8),
        profit_range: (-10, 60),
        zipf_exponent: 1.0,
        seed,
    }
}

#[test]
fn export_matches_committed_golden() {
    assert_eq!(export_ilp(&fig1()), include_str!("golden/fig1.lp"));
}

#[test]
fn generated_instances_roundtrip_and_validate() {
    for seed in 0..50 {
        let inst = generate(&small_config(seed)).unwrap();
        assert!(ckp_core::model::validate(&inst).is_ok());
        assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }
}

#[test]
fn bench_over_generated_corpus_has_no_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..100 {
        let inst = generate(&small_config(seed)).unwrap();
        fs::write(dir.path().join(format!("i{seed:03}.ckp")), write_instance(&inst)).unwrap();
    }
    // run_bench aborts with an error on any objective disagreement.
    let report = run_bench(dir.path(), &[Algo::Dp1, Algo::Dp2]).unwrap();
    assert_eq!(report.records.len(), 200);
    assert!(report.records.iter().all(|r| r.objective.is_some()));
}

#[test]
fn filter_moves_only_trivial_instances() {
    let dir = tempfile::tempdir().unwrap();
    let easy = Instance::new(
        2,
        10,
        vec![
            Item { weight: 3, profit: 5, color: 1 },
            Item { weight: 3, profit: 5, color: 2 },
        ],
    );
    assert!(is_trivial(&easy).0);
    fs::write(dir.path().join("easy.ckp"), write_instance(&easy)).unwrap();
    fs::write(dir.path().join("hard.ckp"), write_instance(&fig1())).unwrap();

    let summary = filter_trivial_dir(dir.path()).unwrap();
    assert_eq!(summary.examined, 2);
    assert_eq!(summary.moved, vec!["easy.ckp".to_string()]);
    assert!(dir.path().join("trivial/easy.ckp").is_file());
    assert!(dir.path().join("hard.ckp").is_file());
    assert!(!dir.path().join("easy.ckp").exists());

    // Idempotent: the trivial/ subdirectory is not rescanned.
    let again = filter_trivial_dir(dir.path()).unwrap();
    assert_eq!(again.examined, 1);
    assert!(again.moved.is_empty());
}
