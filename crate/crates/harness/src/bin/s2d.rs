use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use s2d_core::lattice::LatticePoint;
use s2d_core::oracle::PolicyKind;
use s2d_core::primes::Prime;
use s2d_core::rational::{format_rational, parse_rational, rat, Int, Rational};
use s2d_core::solvers::{cvp_exact, svp_exact, EnumerationBudget};
use s2d_core::sparsify::{random_z, sparsify};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use s2d_harness::corpus::{corpus_dir, default_corpus, load_corpus, write_corpus};
use s2d_harness::experiment::{run_experiment, ReductionKind, RunConfig};
use s2d_harness::instance::{generate_instance, Instance, InstanceKind};
use s2d_harness::validate::{
    monte_carlo_validation, sparsification_validation, validate_covering_bounds, validate_dual_identity,
    validate_lll_bounds, validate_point_count, validate_sparsify_index, ValidationReport,
};
use s2d_harness::{HarnessError, Result};

#[derive(Parser)]
#[command(name = "s2d", about = "Exact lattice solvers, oracle reductions and their checks", version)]
struct Cli {
    /// Enumeration node budget for every exact solver call.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget_nodes: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Svp,
    Cvp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Sparsification,
    LllBounds,
    PointCount,
    CoveringBounds,
    DualIdentity,
    SparsifyIndex,
}

#[derive(Subcommand)]
enum Command {
    /// Exact shortest or closest vector of an instance file.
    Solve { problem: Problem, file: PathBuf },
    /// Run one reduction against simulated oracles and check it against the exact optimum.
    Reduce {
        #[arg(value_parser = parse_reduction)]
        reduction: ReductionKind,
        file: PathBuf,
        #[arg(long, value_parser = parse_rat, default_value = "1")]
        gamma: Rational,
        #[arg(long, value_parser = parse_rat)]
        a: Option<Rational>,
        #[arg(long, default_value_t = 1)]
        ell: u32,
        #[arg(long, value_parser = parse_int, default_value = "5")]
        p: Int,
        #[arg(long, value_parser = parse_rat, default_value = "2")]
        h: Rational,
        #[arg(long, value_parser = parse_policy, default_value = "honest")]
        policy: PolicyKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u32,
        /// Stop a probabilistic reduction at its first successful seed.
        #[arg(long)]
        stop_at_first_success: bool,
        /// Count a run as successful only when it is exactly optimal.
        #[arg(long)]
        require_exact: bool,
    },
    /// Draw one sparsified sublattice.
    Sparsify {
        file: PathBuf,
        #[arg(long, value_parser = parse_int, default_value = "349")]
        p: Int,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Structural checks over a corpus directory.
    Validate {
        check: Check,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, value_parser = parse_int, default_value = "349")]
        p: Int,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sampled targets per instance (covering-bounds), Monte-Carlo trials (sparsification).
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Generate one seeded instance.
    Gen {
        #[arg(value_parser = parse_kind)]
        kind: InstanceKind,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the default corpus.
    Corpus {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate the key=value report files in a directory.
    Report { dir: PathBuf },
}

fn parse_rat(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_int(s: &str) -> std::result::Result<Int, String> {
    s.parse().map_err(|_| format!("bad integer `{s}`"))
}

fn parse_policy(s: &str) -> std::result::Result<PolicyKind, String> {
    s.parse().map_err(|e: s2d_core::Error| e.to_string())
}

fn parse_reduction(s: &str) -> std::result::Result<ReductionKind, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn parse_kind(s: &str) -> std::result::Result<InstanceKind, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn print_point(prefix: &str, p: &LatticePoint) {
    let coeffs: Vec<String> = p.coefficients.iter().map(Int::to_string).collect();
    println!("{prefix}.coefficients={}", coeffs.join(","));
    println!("{prefix}.vector={}", p.coordinates);
}

fn corpus_instances(dir: &Path) -> Result<(Vec<Instance>, ValidationReport)> {
    let mut errors = ValidationReport::default();
    let mut ok = Vec::new();
    for (path, inst) in load_corpus(dir)? {
        match inst {
            Ok(i) => ok.push(i),
            Err(e) => errors.rows.push(s2d_harness::validate::CheckRow {
                instance: path.display().to_string(),
                check: "parse",
                pass: false,
                detail: format!("error: {e}"),
            }),
        }
    }
    ok.sort_by(|a, b| (a.rank(), &a.name).cmp(&(b.rank(), &b.name)));
    Ok((ok, errors))
}

fn run(cli: Cli) -> Result<bool> {
    let budget = EnumerationBudget {
        max_nodes: cli.budget_nodes,
        ..EnumerationBudget::default()
    };
    match cli.command {
        Command::Solve { problem, file } => {
            let inst = Instance::read(&file)?;
            println!("instance={}", inst.name);
            match problem {
                Problem::Svp => {
                    let y = svp_exact(&inst.basis, &budget)?;
                    println!("lambda1_sq={}", format_rational(&y.norm_sq()));
                    print_point("shortest", &y);
                }
                Problem::Cvp => {
                    let t = inst
                        .target
                        .as_ref()
                        .ok_or_else(|| HarnessError::Config(format!("{} has no target row", inst.name)))?;
                    let s = cvp_exact(&inst.basis, t, &budget)?;
                    println!("dist_sq={}", format_rational(&s.dist_sq));
                    print_point("closest", &s.point);
                }
            }
            Ok(true)
        }
        Command::Reduce {
            reduction,
            file,
            gamma,
            a,
            ell,
            p,
            h,
            policy,
            seed,
            trials,
            stop_at_first_success,
            require_exact,
        } => {
            let inst = Instance::read(&file)?;
            let config = RunConfig {
                reduction,
                gamma,
                a,
                ell,
                p,
                h,
                policy,
                seed,
                trials,
                stop_at_first_success,
                require_exact,
                budget,
            };
            let report = run_experiment(&config, std::slice::from_ref(&inst))?;
            println!("{report}");
            Ok(report.summary.passed())
        }
        Command::Sparsify { file, p, seed } => {
            let inst = Instance::read(&file)?;
            let p = Prime::new(p)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z = random_z(p.value(), inst.rank(), &mut rng);
            let s = sparsify(&inst.basis, &p, &z)?;
            let zs: Vec<String> = s.z.iter().map(Int::to_string).collect();
            println!("instance={}", inst.name);
            println!("p={}", s.prime);
            println!("seed={seed}");
            println!("z={}", zs.join(","));
            let sub = Instance {
                name: format!("{}-sparsified", inst.name),
                basis: s.sublattice,
                target: None,
                comments: Vec::new(),
            };
            print!("{sub}");
            Ok(true)
        }
        Command::Validate {
            check,
            corpus,
            p,
            seed,
            samples,
        } => {
            let dir = corpus.unwrap_or_else(corpus_dir);
            let (instances, mut report) = corpus_instances(&dir)?;
            let mut ok = report.passed();
            match check {
                Check::Sparsification => {
                    let p = Prime::new(p)?;
                    let small: Vec<Instance> = instances.into_iter().filter(|i| i.rank() <= 2).collect();
                    let rows = sparsification_validation(&p, &small, 4, 1 << 24, &budget);
                    for r in &rows {
                        println!("{r}");
                        ok &= r.pass;
                    }
                    if let Some(trials) = samples {
                        for r in monte_carlo_validation(&p, &small, &rows, trials, 5, seed, &budget) {
                            println!("monte_carlo {r}");
                            ok &= r.pass;
                        }
                    }
                    println!("{report}");
                    println!("summary.rows={}", rows.len());
                    println!("summary.all_pass={ok}");
                    return Ok(ok);
                }
                Check::LllBounds => report.merge(validate_lll_bounds(&instances, &budget)),
                Check::PointCount => report.merge(validate_point_count(
                    &instances,
                    &[rat(1, 1), rat(3, 2), rat(2, 1)],
                    &budget,
                )),
                Check::CoveringBounds => report.merge(validate_covering_bounds(
                    &instances,
                    samples.unwrap_or(200) as usize,
                    seed,
                    &budget,
                )),
                Check::DualIdentity => report.merge(validate_dual_identity(&instances)),
                Check::SparsifyIndex => {
                    let p = Prime::new(p)?;
                    report.merge(validate_sparsify_index(&instances, &p, samples.unwrap_or(3) as usize, seed))
                }
            }
            ok = report.passed();
            println!("{report}");
            Ok(ok)
        }
        Command::Gen { kind, rank, seed, out } => {
            let inst = generate_instance(kind, rank, seed)?;
            match out {
                Some(path) => {
                    inst.write(&path)?;
                    println!("wrote={}", path.display());
                }
                None => print!("{inst}"),
            }
            Ok(true)
        }
        Command::Corpus { out } => {
            let dir = out.unwrap_or_else(corpus_dir);
            let instances = default_corpus()?;
            write_corpus(&dir, &instances)?;
            println!("dir={}", dir.display());
            println!("instances={}", instances.len());
            Ok(true)
        }
        Command::Report { dir } => report_dir(&dir),
    }
}

/// Counts `pass=`/`summary.pass=` records in every file of `dir`; fails if any is false.
fn report_dir(dir: &Path) -> Result<bool> {
    let io = |e| HarnessError::Io {
        path: dir.to_path_buf(),
        source: e,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut all = true;
    for path in &paths {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.clone(),
            source,
        })?;
        let (mut passes, mut failures) = (0u64, 0u64);
        for field in text.split_whitespace() {
            match field.rsplit_once("pass=").map(|(k, v)| (k.is_empty() || k.ends_with('.'), v)) {
                Some((true, "true")) => passes += 1,
                Some((true, "false")) => failures += 1,
                _ => {}
            }
        }
        println!("file={} passes={passes} failures={failures}", path.display());
        all &= failures == 0;
    }
    println!("summary.files={}", paths.len());
    println!("summary.pass={all}");
    Ok(all)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
