//! Benchmark harness: runs chosen solvers over a directory of instance
//! files and reports one CSV row per (instance, algo) plus per-algo average
//! times. All solved objectives for one instance must agree; a disagreement
//! is a solver bug and aborts the run. Cells run sequentially so timings are
//! not co-scheduled.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use ckp_core::dp1::{solve_dp1, Dp1Options, SolveStats};
use ckp_core::dp2::{solve_dp2, Dp2Options};
use ckp_core::model::{parse_instance, Instance};
use ckp_core::oracle::brute_force_ckp;

use crate::trivial::instance_files;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Dp1,
    Dp2,
    Oracle,
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dp1" => Ok(Algo::Dp1),
            "dp2" => Ok(Algo::Dp2),
            "oracle" => Ok(Algo::Oracle),
            other => Err(format!("unknown algo {other:?} (expected dp1, dp2, or oracle)")),
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Dp1 => "dp1",
            Algo::Dp2 => "dp2",
            Algo::Oracle => "oracle",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Solved,
    /// The oracle refuses instances beyond its enumeration guard.
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Solved => "solved",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub instance: String,
    pub algo: Algo,
    pub status: Status,
    /// Present exactly when status is Solved.
    pub objective: Option<i64>,
    /// Wall time of one solve after one excluded warm-up solve.
    pub time_ms: Option<f64>,
    /// State counters; the oracle has none and leaves them empty.
    pub states_created: Option<u64>,
    pub states_fathomed: Option<u64>,
    pub peak_states: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path} is not an instance file: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(
        "objective mismatch on {instance}: {algo_a} = {value_a}, {algo_b} = {value_b} \
         (solver bug, aborting)"
    )]
    Mismatch {
        instance: String,
        algo_a: Algo,
        value_a: i64,
        algo_b: Algo,
        value_b: i64,
    },
}

#[derive(Debug)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
}

enum Outcome {
    Solved { objective: i64, stats: Option<SolveStats> },
    Skipped,
}

fn solve_once(instance: &Instance, algo: Algo) -> Outcome {
    match algo {
        Algo::Dp1 => {
            let r = solve_dp1(instance, &Dp1Options::default());
            Outcome::Solved { objective: r.solution.profit, stats: Some(r.stats) }
        }
        Algo::Dp2 => {
            let r = solve_dp2(instance, &Dp2Options::default());
            Outcome::Solved { objective: r.solution.profit, stats: Some(r.stats) }
        }
        Algo::Oracle => match brute_force_ckp(instance) {
            Ok(r) => Outcome::Solved { objective: r.value, stats: None },
            Err(_) => Outcome::Skipped,
        },
    }
}

pub fn run_bench(dir: &Path, algos: &[Algo]) -> Result<BenchReport, BenchError> {
    let files =
        instance_files(dir).map_err(|source| BenchError::Io { path: dir.to_path_buf(), source })?;
    let mut records = Vec::new();
    for path in files {
        let text = fs::read_to_string(&path)
            .map_err(|source| BenchError::Io { path: path.clone(), source })?;
        let instance = parse_instance(&text)
            .map_err(|e| BenchError::Parse { path: path.clone(), message: e.to_string() })?;
        let name = path.file_name().expect("regular file").to_string_lossy().into_owned();

        let mut agreed: Option<(Algo, i64)> = None;
        for &algo in algos {
            let record = match solve_once(&instance, algo) {
                Outcome::Skipped => BenchRecord {
                    instance: name.clone(),
                    algo,
                    status: Status::Skipped,
                    objective: None,
                    time_ms: None,
                    states_created: None,
                    states_fathomed: None,
                    peak_states: None,
                },
                Outcome::Solved { .. } => {
                    // Warm-up above; the measured run below.
                    let start = Instant::now();
                    let timed = solve_once(&instance, algo);
                    let time_ms = start.elapsed().as_secs_f64() * 1e3;
                    let Outcome::Solved { objective, stats } = timed else {
                        unreachable!("warm-up solved but the timed run did not")
                    };
                    match agreed {
                        None => agreed = Some((algo, objective)),
                        Some((algo_a, value_a)) if value_a != objective => {
                            return Err(BenchError::Mismatch {
                                instance: name,
                                algo_a,
                                value_a,
                                algo_b: algo,
                                value_b: objective,
                            });
                        }
                        Some(_) => {}
                    }
                    BenchRecord {
                        instance: name.clone(),
                        algo,
                        status: Status::Solved,
                        objective: Some(objective),
                        time_ms: Some(time_ms),
                        states_created: stats.as_ref().map(|s| s.states_created),
                        states_fathomed: stats
                            .as_ref()
                            .map(|s| s.fathomed_bound + s.fathomed_infeasible),
                        peak_states: stats.as_ref().map(|s| s.peak_live_states),
                    }
                }
            };
            records.push(record);
        }
    }
    Ok(BenchReport { records })
}

impl BenchReport {
    /// Header, one row per record, then a per-algo average block as comment
    /// lines (omitted when there are no records).
    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record([
            "instance",
            "algo",
            "status",
            "objective",
            "time_ms",
            "states_created",
            "states_fathomed",
            "peak_states",
        ])
        .expect("writing to memory");
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.records {
            wtr.write_record([
                r.instance.clone(),
                r.algo.to_string(),
                r.status.to_string(),
                opt(r.objective.map(|v| v.to_string())),
                opt(r.time_ms.map(|t| format!("{t:.3}"))),
                opt(r.states_created.map(|v| v.to_string())),
                opt(r.states_fathomed.map(|v| v.to_string())),
                opt(r.peak_states.map(|v| v.to_string())),
            ])
            .expect("writing to memory");
        }
        let mut out =
            String::from_utf8(wtr.into_inner().expect("flush to memory")).expect("utf-8 csv");

        let mut seen: Vec<Algo> = Vec::new();
        for r in &self.records {
            if !seen.contains(&r.algo) {
                seen.push(r.algo);
            }
        }
        for algo in seen {
            let times: Vec<f64> = self
                .records
                .iter()
                .filter(|r| r.algo == algo && r.status == Status::Solved)
                .filter_map(|r| r.time_ms)
                .collect();
            let skipped =
                self.records.iter().filter(|r| r.algo == algo && r.status == Status::Skipped).count();
            let avg = if times.is_empty() {
                f64::NAN
            } else {
                times.iter().sum::<f64>() / times.len() as f64
            };
            let _ = writeln!(
                out,
                "# avg {algo}: time_ms={avg:.3} solved={} skipped={skipped}",
                times.len()
            );
        }
        out
    }
}
