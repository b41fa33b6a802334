//! The default corpus: ranks 2–8, every instance kind, four seeds each.

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use crate::error::{io_error, Result};
use crate::instance::{generate_instance, Instance, InstanceKind};

pub const CORPUS_RANKS: RangeInclusive<usize> = 2..=8;
pub const CORPUS_SEEDS: u64 = 4;
pub const INSTANCE_EXTENSION: &str = "lat";

/// The checked-in corpus directory of this crate.
pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// Regenerates the default corpus, ordered by rank, kind, then seed.
pub fn default_corpus() -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for rank in CORPUS_RANKS {
        for kind in InstanceKind::ALL {
            for seed in 0..CORPUS_SEEDS {
                out.push(generate_instance(kind, rank, seed)?);
            }
        }
    }
    Ok(out)
}

pub fn write_corpus(dir: &Path, instances: &[Instance]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_error(dir))?;
    for inst in instances {
        inst.write(&dir.join(format!("{}.{INSTANCE_EXTENSION}", inst.name)))?;
    }
    Ok(())
}

/// Every instance file in `dir`, sorted by file name; unreadable files keep their own error.
pub fn load_corpus(dir: &Path) -> Result<Vec<(PathBuf, Result<Instance>)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io_error(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == INSTANCE_EXTENSION))
        .collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|p| {
            let inst = Instance::read(&p);
            (p, inst)
        })
        .collect())
}

/// Loads `dir` and fails on the first unreadable file; the result is ordered by rank, then name.
pub fn load_corpus_strict(dir: &Path) -> Result<Vec<Instance>> {
    let mut out = load_corpus(dir)?
        .into_iter()
        .map(|(_, r)| r)
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| (a.rank(), &a.name).cmp(&(b.rank(), &b.name)));
    Ok(out)
}
