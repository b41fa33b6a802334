use std::fmt;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Which oracle a call went to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CallKind {
    GapSvp,
    GapCvp,
    Usvp,
    Hsvp,
}

impl CallKind {
    pub const ALL: [CallKind; 4] = [CallKind::GapSvp, CallKind::GapCvp, CallKind::Usvp, CallKind::Hsvp];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            CallKind::GapSvp => "gapsvp",
            CallKind::GapCvp => "gapcvp",
            CallKind::Usvp => "usvp",
            CallKind::Hsvp => "hsvp",
        }
    }
}

#[derive(Debug, Default)]
struct Counters {
    total: AtomicU64,
    per_kind: [AtomicU64; 4],
    max_rank: AtomicUsize,
    limit: AtomicUsize,
}

/// Shared call counters. Clones observe the same counters, so an audit handle
/// can be kept by the caller while the oracle it wraps is moved elsewhere.
#[derive(Clone, Debug)]
pub struct OracleAudit {
    counters: Arc<Counters>,
}

impl OracleAudit {
    /// `limit = None` records without enforcing a dimension bound.
    pub fn new(limit: Option<usize>) -> Self {
        let counters = Counters::default();
        counters.limit.store(limit.unwrap_or(usize::MAX), Ordering::Relaxed);
        OracleAudit {
            counters: Arc::new(counters),
        }
    }

    pub fn set_limit(&self, limit: Option<usize>) {
        self.counters
            .limit
            .store(limit.unwrap_or(usize::MAX), Ordering::Relaxed);
    }

    pub fn limit(&self) -> Option<usize> {
        match self.counters.limit.load(Ordering::Relaxed) {
            usize::MAX => None,
            l => Some(l),
        }
    }

    /// Counts one call of the given rank; fails when the rank exceeds the limit.
    pub fn record(&self, kind: CallKind, rank: usize) -> Result<()> {
        let c = &self.counters;
        c.total.fetch_add(1, Ordering::Relaxed);
        c.per_kind[kind.index()].fetch_add(1, Ordering::Relaxed);
        c.max_rank.fetch_max(rank, Ordering::Relaxed);
        let limit = c.limit.load(Ordering::Relaxed);
        if rank > limit {
            return Err(Error::DimensionViolation { rank, limit });
        }
        Ok(())
    }

    pub fn snapshot(&self) -> AuditSnapshot {
        let c = &self.counters;
        AuditSnapshot {
            total_calls: c.total.load(Ordering::Relaxed),
            max_call_dimension: c.max_rank.load(Ordering::Relaxed),
            per_kind: std::array::from_fn(|i| c.per_kind[i].load(Ordering::Relaxed)),
        }
    }
}

impl Default for OracleAudit {
    fn default() -> Self {
        OracleAudit::new(None)
    }
}

/// Counter values at one point in time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AuditSnapshot {
    pub total_calls: u64,
    pub max_call_dimension: usize,
    pub per_kind: [u64; 4],
}

impl AuditSnapshot {
    pub fn calls(&self, kind: CallKind) -> u64 {
        self.per_kind[kind.index()]
    }

    /// Combines the audits of several oracles used by one run.
    pub fn merge(&self, other: &AuditSnapshot) -> AuditSnapshot {
        AuditSnapshot {
            total_calls: self.total_calls + other.total_calls,
            max_call_dimension: self.max_call_dimension.max(other.max_call_dimension),
            per_kind: std::array::from_fn(|i| self.per_kind[i] + other.per_kind[i]),
        }
    }
}

impl fmt::Display for AuditSnapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "calls={} max_dim={}",
            self.total_calls, self.max_call_dimension
        )?;
        for kind in CallKind::ALL {
            write!(f, " {}={}", kind.name(), self.calls(kind))?;
        }
        Ok(())
    }
}
