//! Running one reduction over a list of instances and summarising the outcome.

use std::fmt;
use std::str::FromStr;

use num_traits::One;

use s2d_core::oracle::{
    audit_wrap, EstimationConfig, HsvpPolicy, OraclePolicy, PolicyKind, SimulatedGapCvp, SimulatedGapSvp,
    SimulatedHsvp, SimulatedUsvp,
};
use s2d_core::rational::{format_rational, int, rat, Int, Rational, RationalVector};
use s2d_core::reductions::{
    cvp_chain_via_usvp, cvp_guided, det_cvp, det_svp, svp_to_gapsvp, svp_to_usvp, usvp_policy_for, GuidedConfig,
    ReductionReport, SvpToUsvpConfig,
};
use s2d_core::solvers::EnumerationBudget;

use crate::error::{HarnessError, Result};
use crate::instance::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    SvpUsvp,
    SvpGapsvp,
    CvpGuided,
    DetSvp,
    DetCvp,
    CvpChain,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 6] = [
        ReductionKind::SvpUsvp,
        ReductionKind::SvpGapsvp,
        ReductionKind::CvpGuided,
        ReductionKind::DetSvp,
        ReductionKind::DetCvp,
        ReductionKind::CvpChain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::SvpUsvp => "svp-usvp",
            ReductionKind::SvpGapsvp => "svp-gapsvp",
            ReductionKind::CvpGuided => "cvp-guided",
            ReductionKind::DetSvp => "det-svp",
            ReductionKind::DetCvp => "det-cvp",
            ReductionKind::CvpChain => "cvp-chain",
        }
    }

    pub fn needs_target(self) -> bool {
        matches!(self, ReductionKind::CvpGuided | ReductionKind::DetCvp | ReductionKind::CvpChain)
    }

    /// Guarantee holds with constant probability per run; success means some seed succeeds.
    pub fn probabilistic(self) -> bool {
        matches!(self, ReductionKind::SvpUsvp | ReductionKind::SvpGapsvp | ReductionKind::CvpChain)
    }

    /// The chain's inner CVP leg is substituted, so its bound is measured only.
    pub fn bound_asserted(self) -> bool {
        self != ReductionKind::CvpChain
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReductionKind {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        ReductionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Unknown {
                what: "reduction",
                value: s.to_string(),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub reduction: ReductionKind,
    pub gamma: Rational,
    /// `None` uses the reduction's default.
    pub a: Option<Rational>,
    pub ell: u32,
    pub p: Int,
    pub h: Rational,
    pub policy: PolicyKind,
    pub seed: u64,
    /// Seeds `seed, seed+1, …` tried per instance.
    pub trials: u32,
    /// For probabilistic reductions, stop an instance at its first successful seed.
    pub stop_at_first_success: bool,
    /// Count a run as successful only when it is exactly optimal.
    pub require_exact: bool,
    pub budget: EnumerationBudget,
}

impl RunConfig {
    pub fn new(reduction: ReductionKind, gamma: Rational) -> Self {
        RunConfig {
            reduction,
            gamma,
            a: None,
            ell: 1,
            p: int(5),
            h: rat(2, 1),
            policy: PolicyKind::HonestThreshold,
            seed: 0,
            trials: 1,
            stop_at_first_success: false,
            require_exact: false,
            budget: EnumerationBudget::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma < Rational::one() {
            return Err(HarnessError::Config(format!("gamma {} is below 1", self.gamma)));
        }
        if self.h < Rational::one() {
            return Err(HarnessError::Config(format!("h {} is below 1", self.h)));
        }
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.ell == 0 {
            return Err(HarnessError::Config("ell must be at least 1".into()));
        }
        Ok(())
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "config.reduction={}", self.reduction)?;
        writeln!(f, "config.gamma={}", format_rational(&self.gamma))?;
        if let Some(a) = &self.a {
            writeln!(f, "config.a={}", format_rational(a))?;
        }
        writeln!(f, "config.ell={}", self.ell)?;
        writeln!(f, "config.p={}", self.p)?;
        writeln!(f, "config.h={}", format_rational(&self.h))?;
        writeln!(f, "config.policy={}", self.policy)?;
        writeln!(f, "config.seed={}", self.seed)?;
        writeln!(f, "config.trials={}", self.trials)?;
        writeln!(f, "config.require_exact={}", self.require_exact)?;
        write!(f, "config.budget_nodes={}", self.budget.max_nodes)
    }
}

fn target_of(instance: &Instance) -> Result<&RationalVector> {
    instance
        .target
        .as_ref()
        .ok_or_else(|| HarnessError::Config(format!("{} has no target row", instance.name)))
}

/// One run of the configured reduction on `instance` with `seed`, compared against the exact optimum.
pub fn run_once(config: &RunConfig, instance: &Instance, seed: u64) -> Result<ReductionReport> {
    let basis = &instance.basis;
    let rank = Some(basis.rank());
    let policy = OraclePolicy::new(config.policy, seed);
    let gamma = config.gamma.clone();
    let budget = config.budget;
    let estimation = EstimationConfig::default();
    let target = if config.reduction.needs_target() {
        Some(target_of(instance)?)
    } else {
        None
    };
    let mut report = match config.reduction {
        ReductionKind::SvpUsvp => {
            let usvp = SimulatedUsvp::new(gamma, usvp_policy_for(&policy), budget)?;
            let (usvp, _) = audit_wrap(usvp, rank);
            svp_to_usvp(basis, &usvp, &SvpToUsvpConfig::new(config.a.clone(), seed))?
        }
        ReductionKind::SvpGapsvp => {
            svp_to_gapsvp(basis, &gamma, &policy, &SvpToUsvpConfig::new(config.a.clone(), seed), &budget)?.0
        }
        ReductionKind::CvpGuided => {
            let (gapcvp, _) = audit_wrap(SimulatedGapCvp::new(gamma, policy, budget)?, rank);
            let hpolicy = if config.h.is_one() {
                HsvpPolicy::Exact
            } else {
                HsvpPolicy::SeededDegraded { seed }
            };
            let (hsvp, _) = audit_wrap(SimulatedHsvp::new(config.h.clone(), hpolicy, budget)?, rank);
            let mut guided = GuidedConfig::new(config.ell);
            guided.estimation = estimation;
            cvp_guided(basis, target.expect("target checked"), &guided, &gapcvp, &hsvp)?
        }
        ReductionKind::DetSvp => {
            let (gapsvp, _) = audit_wrap(SimulatedGapSvp::new(gamma, policy, budget)?, rank);
            det_svp(basis, &config.p, &gapsvp, &estimation)?
        }
        ReductionKind::DetCvp => {
            let (gapcvp, _) = audit_wrap(SimulatedGapCvp::new(gamma, policy, budget)?, rank);
            det_cvp(basis, target.expect("target checked"), &config.p, &gapcvp, &estimation)?
        }
        ReductionKind::CvpChain => {
            let usvp = SimulatedUsvp::new(gamma, usvp_policy_for(&policy), budget)?;
            let (usvp, _) = audit_wrap(usvp, rank);
            cvp_chain_via_usvp(basis, target.expect("target checked"), &usvp, seed)?
        }
    };
    report.parameters.seed = Some(seed);
    report.compare_with_exact(basis, target, &budget)?;
    Ok(report)
}

/// All runs of one instance.
#[derive(Clone, Debug)]
pub struct InstanceOutcome {
    pub instance: String,
    pub rank: usize,
    pub runs: Vec<ReductionReport>,
    pub success: bool,
    pub dimension_ok: bool,
    pub error: Option<String>,
}

fn run_succeeded(config: &RunConfig, r: &ReductionReport) -> bool {
    if config.require_exact {
        r.is_exact() == Some(true)
    } else if config.reduction.bound_asserted() {
        r.meets_bound() == Some(true)
    } else {
        true
    }
}

pub fn run_instance(config: &RunConfig, instance: &Instance) -> InstanceOutcome {
    let rank = instance.rank();
    let mut runs = Vec::new();
    let mut error = None;
    for k in 0..config.trials {
        match run_once(config, instance, config.seed + u64::from(k)) {
            Ok(r) => {
                let ok = run_succeeded(config, &r);
                runs.push(r);
                if ok && config.stop_at_first_success && config.reduction.probabilistic() {
                    break;
                }
            }
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
    }
    let dimension_ok = runs.iter().all(|r| r.audit.max_call_dimension <= rank);
    let success = error.is_none()
        && !runs.is_empty()
        && if config.reduction.probabilistic() {
            runs.iter().any(|r| run_succeeded(config, r))
        } else {
            runs.iter().all(|r| run_succeeded(config, r))
        };
    InstanceOutcome {
        instance: instance.name.clone(),
        rank,
        runs,
        success,
        dimension_ok,
        error,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentSummary {
    pub instances: usize,
    pub successes: usize,
    pub errors: usize,
    pub dimension_violations: usize,
    pub runs: usize,
    /// Worst achieved squared factor over all runs.
    pub max_achieved_factor_sq: Option<Rational>,
    pub total_calls: u64,
    pub max_dimension: usize,
    pub max_paths: Option<u64>,
}

impl ExperimentSummary {
    pub fn passed(&self) -> bool {
        self.errors == 0 && self.dimension_violations == 0 && self.successes == self.instances
    }

    pub fn success_rate(&self) -> Rational {
        if self.instances == 0 {
            return Rational::one();
        }
        Rational::new(Int::from(self.successes), Int::from(self.instances))
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub config: RunConfig,
    pub outcomes: Vec<InstanceOutcome>,
    pub summary: ExperimentSummary,
}

pub fn summarize(outcomes: &[InstanceOutcome]) -> ExperimentSummary {
    let mut s = ExperimentSummary {
        instances: outcomes.len(),
        ..Default::default()
    };
    for o in outcomes {
        s.successes += usize::from(o.success);
        s.errors += usize::from(o.error.is_some());
        s.dimension_violations += usize::from(!o.dimension_ok);
        for r in &o.runs {
            s.runs += 1;
            s.total_calls += r.audit.total_calls;
            s.max_dimension = s.max_dimension.max(r.audit.max_call_dimension);
            if let Some(m) = r.max_paths {
                s.max_paths = Some(s.max_paths.map_or(m, |x| x.max(m)));
            }
            if let Some(f) = &r.achieved_factor_sq {
                if s.max_achieved_factor_sq.as_ref().is_none_or(|x| f > x) {
                    s.max_achieved_factor_sq = Some(f.clone());
                }
            }
        }
    }
    s
}

/// Runs `config` over `instances` in order. Per-instance errors are recorded, never dropped.
pub fn run_experiment(config: &RunConfig, instances: &[Instance]) -> Result<ExperimentReport> {
    config.validate()?;
    let outcomes: Vec<InstanceOutcome> = instances.iter().map(|i| run_instance(config, i)).collect();
    let summary = summarize(&outcomes);
    Ok(ExperimentReport {
        config: config.clone(),
        outcomes,
        summary,
    })
}

impl fmt::Display for ExperimentSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "summary.instances={}", self.instances)?;
        writeln!(f, "summary.successes={}", self.successes)?;
        writeln!(f, "summary.success_rate={}", format_rational(&self.success_rate()))?;
        writeln!(f, "summary.errors={}", self.errors)?;
        writeln!(f, "summary.dimension_violations={}", self.dimension_violations)?;
        writeln!(f, "summary.runs={}", self.runs)?;
        if let Some(m) = &self.max_achieved_factor_sq {
            writeln!(f, "summary.max_achieved_factor_sq={}", format_rational(m))?;
        }
        if let Some(m) = self.max_paths {
            writeln!(f, "summary.max_paths={m}")?;
        }
        writeln!(f, "summary.total_calls={}", self.total_calls)?;
        writeln!(f, "summary.max_call_dimension={}", self.max_dimension)?;
        write!(f, "summary.pass={}", self.passed())
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.config)?;
        for o in &self.outcomes {
            writeln!(f)?;
            writeln!(f, "instance={}", o.instance)?;
            writeln!(f, "rank={}", o.rank)?;
            for r in &o.runs {
                write!(f, "{r}")?;
            }
            if let Some(e) = &o.error {
                writeln!(f, "error={e}")?;
            }
            writeln!(f, "instance_success={}", o.success)?;
        }
        writeln!(f)?;
        write!(f, "{}", self.summary)
    }
}
