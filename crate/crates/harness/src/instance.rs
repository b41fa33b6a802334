//! Instance files and the seeded instance generators.
//!
//! File layout: `#` comment lines, a header `n m`, `n` rows of `m` rationals
//! (`num/den`, denominator omitted when one), and an optional target row `t: ...`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use s2d_core::lattice::LatticeBasis;
use s2d_core::rational::{format_rational, parse_rational, rat, Int, Rational, RationalVector};

use crate::error::{io_error, HarnessError, Result};

/// Largest rank the generators produce.
pub const GENERATOR_RANK_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub basis: LatticeBasis,
    pub target: Option<RationalVector>,
    pub comments: Vec<String>,
}

impl Instance {
    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn parse(name: &str, text: &str) -> Result<Instance> {
        let mut comments = Vec::new();
        let mut header: Option<(usize, usize)> = None;
        let mut rows = Vec::new();
        let mut target = None;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = k + 1;
            let err = |message: String| HarnessError::Parse { line: lineno, message };
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                comments.push(c.trim().to_string());
                continue;
            }
            let Some((n, m)) = header else {
                let fields: Vec<&str> = line.split_whitespace().collect();
                let [n, m] = fields[..] else {
                    return Err(err(format!("expected header `n m`, found `{line}`")));
                };
                let n: usize = n.parse().map_err(|_| err(format!("bad rank `{n}`")))?;
                let m: usize = m.parse().map_err(|_| err(format!("bad dimension `{m}`")))?;
                header = Some((n, m));
                continue;
            };
            let (is_target, body) = match line.strip_prefix("t:") {
                Some(rest) => (true, rest),
                None => (false, line),
            };
            let values = body
                .split_whitespace()
                .map(parse_rational)
                .collect::<std::result::Result<Vec<Rational>, _>>()
                .map_err(|e| err(e.to_string()))?;
            if values.len() != m {
                return Err(err(format!("expected {m} entries, found {}", values.len())));
            }
            if is_target {
                if target.is_some() {
                    return Err(err("second target row".into()));
                }
                target = Some(RationalVector(values));
            } else {
                if rows.len() == n {
                    return Err(err(format!("more than {n} basis rows")));
                }
                rows.push(RationalVector(values));
            }
        }
        let Some((n, _)) = header else {
            return Err(HarnessError::Parse {
                line: 0,
                message: "missing header".into(),
            });
        };
        if rows.len() != n {
            return Err(HarnessError::Parse {
                line: 0,
                message: format!("expected {n} basis rows, found {}", rows.len()),
            });
        }
        Ok(Instance {
            name: name.to_string(),
            basis: LatticeBasis::new(rows)?,
            target,
            comments,
        })
    }

    pub fn read(path: &Path) -> Result<Instance> {
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        let name = path
            .file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        Instance::parse(&name, &text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string()).map_err(io_error(path))
    }
}

fn write_row(f: &mut fmt::Formatter<'_>, v: &RationalVector) -> fmt::Result {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    writeln!(f, "{}", parts.join(" "))
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.comments {
            writeln!(f, "# {c}")?;
        }
        writeln!(f, "{} {}", self.basis.rank(), self.basis.ambient_dim())?;
        for row in self.basis.rows() {
            write_row(f, row)?;
        }
        if let Some(t) = &self.target {
            write!(f, "t: ")?;
            write_row(f, t)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InstanceKind {
    Diagonal,
    UnimodularScramble,
    PlantedShort,
    PlantedClose,
    Random,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 5] = [
        InstanceKind::Diagonal,
        InstanceKind::UnimodularScramble,
        InstanceKind::PlantedShort,
        InstanceKind::PlantedClose,
        InstanceKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Diagonal => "diagonal",
            InstanceKind::UnimodularScramble => "unimodular-scramble",
            InstanceKind::PlantedShort => "planted-short",
            InstanceKind::PlantedClose => "planted-close",
            InstanceKind::Random => "random",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        InstanceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Unknown {
                what: "instance kind",
                value: s.to_string(),
            })
    }
}

fn rng_for(kind: InstanceKind, rank: usize, seed: u64) -> ChaCha8Rng {
    let tag = (kind as u64) << 56 | (rank as u64) << 48;
    ChaCha8Rng::seed_from_u64(seed ^ tag)
}

fn independent_rows(rng: &mut ChaCha8Rng, n: usize, draw: impl Fn(&mut ChaCha8Rng, usize) -> Vec<i64>) -> LatticeBasis {
    loop {
        let rows: Vec<Vec<Int>> = (0..n).map(|i| draw(rng, i).into_iter().map(Int::from).collect()).collect();
        if let Ok(b) = LatticeBasis::from_big_int_rows(&rows) {
            return b;
        }
    }
}

/// `count` seeded operations `b_i += c·b_j` with `c ∈ {±1, ±2}`, plus sign flips.
fn scramble(basis: &LatticeBasis, rng: &mut ChaCha8Rng, count: usize) -> Result<LatticeBasis> {
    let n = basis.rank();
    if n < 2 {
        return Ok(basis.clone());
    }
    let mut u: Vec<Vec<Int>> = (0..n)
        .map(|i| (0..n).map(|j| Int::from(i64::from(i == j))).collect())
        .collect();
    for _ in 0..count {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = [-2i64, -1, 1, 2][rng.gen_range(0..4)];
        let row_j = u[j].clone();
        for (a, b) in u[i].iter_mut().zip(&row_j) {
            *a += b * c;
        }
        if rng.gen_bool(0.25) {
            for a in &mut u[i] {
                *a = -a.clone();
            }
        }
    }
    Ok(basis.transformed(&u)?)
}

fn random_rational(rng: &mut ChaCha8Rng, range: i64) -> Rational {
    rat(rng.gen_range(-range..=range), rng.gen_range(1..=7))
}

/// A target `Σ x_i b_i` with rational `x_i ∈ [0, 1)`, so it sits in the fundamental parallelepiped.
fn parallelepiped_target(basis: &LatticeBasis, rng: &mut ChaCha8Rng) -> RationalVector {
    let mut t = RationalVector::zeros(basis.ambient_dim());
    for row in basis.rows() {
        let d = rng.gen_range(2..=9);
        t = t.add_scaled(&rat(rng.gen_range(0..d), d), row);
    }
    t
}

/// Deterministic seeded instance of the given kind.
pub fn generate_instance(kind: InstanceKind, rank: usize, seed: u64) -> Result<Instance> {
    if rank == 0 || rank > GENERATOR_RANK_CAP {
        return Err(HarnessError::CapExceeded {
            rank,
            cap: GENERATOR_RANK_CAP,
        });
    }
    let n = rank;
    let mut rng = rng_for(kind, rank, seed);
    let mut comments = vec![format!("kind={kind} rank={rank} seed={seed}")];
    let (basis, target) = match kind {
        InstanceKind::Diagonal => {
            let entries: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
            let rows: Vec<Vec<Int>> = (0..n)
                .map(|i| (0..n).map(|j| Int::from(if i == j { entries[i] } else { 0 })).collect())
                .collect();
            let b = LatticeBasis::from_big_int_rows(&rows)?;
            let t = parallelepiped_target(&b, &mut rng);
            (b, t)
        }
        InstanceKind::UnimodularScramble => {
            let b = scramble(&LatticeBasis::identity(n), &mut rng, 3 * n)?;
            comments.push("scrambled basis of the integer lattice, lambda1_sq=1".into());
            let t = RationalVector((0..n).map(|_| random_rational(&mut rng, 30)).collect());
            (b, t)
        }
        InstanceKind::PlantedShort => {
            let b = independent_rows(&mut rng, n, |r, i| {
                if i == 0 {
                    loop {
                        let v: Vec<i64> = (0..n).map(|_| r.gen_range(-1..=1)).collect();
                        if v.iter().any(|&x| x != 0) {
                            return v;
                        }
                    }
                }
                (0..n).map(|_| r.gen_range(-25..=25)).collect()
            });
            let planted = b.row(0).norm_sq();
            let b = scramble(&b, &mut rng, 2 * n)?;
            comments.push(format!("planted vector norm_sq={}", format_rational(&planted)));
            let t = parallelepiped_target(&b, &mut rng);
            (b, t)
        }
        InstanceKind::PlantedClose => {
            let b = independent_rows(&mut rng, n, |r, _| (0..n).map(|_| r.gen_range(-12..=12)).collect());
            let coeffs: Vec<Int> = (0..n).map(|_| Int::from(rng.gen_range(-3..=3))).collect();
            let y = b.combination(&coeffs);
            let delta = RationalVector((0..n).map(|_| rat(rng.gen_range(-2..=2), 10)).collect());
            comments.push(format!("planted offset norm_sq={}", format_rational(&delta.norm_sq())));
            let t = &y + &delta;
            (b, t)
        }
        InstanceKind::Random => {
            let b = independent_rows(&mut rng, n, |r, _| (0..n).map(|_| r.gen_range(-20..=20)).collect());
            let t = RationalVector((0..n).map(|_| random_rational(&mut rng, 40)).collect());
            (b, t)
        }
    };
    Ok(Instance {
        name: format!("{kind}-n{rank}-s{seed}"),
        basis,
        target: Some(target),
        comments,
    })
}
