//! Instances whose plain-knapsack optimum already interleaves are "trivial":
//! the colored problem is solved by ignoring colors. Benchmark corpora filter
//! them out so measurements reflect the constrained search.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use ckp_core::kp::solve_plain_kp;
use ckp_core::model::{parse_instance, Instance, Solution};

/// Tests whether the deterministic plain-knapsack optimum (ties prefer not
/// packing; witness takes the smallest indices) is color-feasible, returning
/// that optimum as the witness either way.
pub fn is_trivial(instance: &Instance) -> (bool, Solution) {
    let kp = solve_plain_kp(&instance.items, instance.b);
    let solution = Solution::from_selected(instance, kp.selected.iter().map(|&i| i + 1));
    (solution.is_color_feasible(), solution)
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct FilterSummary {
    pub examined: usize,
    /// File names moved into the `trivial/` subdirectory, sorted.
    pub moved: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum FilterError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path} is not an instance file: {message}")]
    Parse { path: PathBuf, message: String },
}

/// Regular files of `dir`, sorted by path; subdirectories (including a
/// previous run's `trivial/`) are skipped.
pub(crate) fn instance_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Moves every trivial instance in `dir` (non-recursive; every regular file
/// must parse as an instance) into `dir/trivial/`.
pub fn filter_trivial_dir(dir: &Path) -> Result<FilterSummary, FilterError> {
    let mut summary = FilterSummary::default();
    let sink = dir.join("trivial");
    let files = instance_files(dir)
        .map_err(|source| FilterError::Io { path: dir.to_path_buf(), source })?;
    for path in files {
        let text = fs::read_to_string(&path)
            .map_err(|source| FilterError::Io { path: path.clone(), source })?;
        let instance = parse_instance(&text)
            .map_err(|e| FilterError::Parse { path: path.clone(), message: e.to_string() })?;
        summary.examined += 1;
        if is_trivial(&instance).0 {
            fs::create_dir_all(&sink)
                .map_err(|source| FilterError::Io { path: sink.clone(), source })?;
            let name = path.file_name().expect("regular file has a name").to_owned();
            fs::rename(&path, sink.join(&name))
                .map_err(|source| FilterError::Io { path: path.clone(), source })?;
            summary.moved.push(name.to_string_lossy().into_owned());
        }
    }
    Ok(summary)
}
