//! Reduction certificates: the cover sequence, per-level lift sets and the
//! (l, genus) trace emitted alongside every computed invariant.

use crate::graph::CurveClass;
use serde::Serialize;

/// One recursion level of the descent to genus-zero base cases.
#[derive(Debug, Clone, Serialize)]
pub struct TraceNode {
    pub gamma: Vec<(u32, u64)>,
    pub l: usize,
    pub genus: u32,
    pub step: TraceStep,
}

#[derive(Debug, Clone, Serialize)]
pub enum TraceStep {
    /// Tree support evaluated directly.
    Base { value: String },
    /// Class vanishes by a structural rule.
    Vanishing { reason: String },
    /// Cyclic cover taken; every deck orbit of connected lifts recursed.
    Cover {
        m: u32,
        cut_edge: u32,
        lifts: Vec<TraceLift>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceLift {
    pub class: Vec<(u32, u64)>,
    pub multiplicity: u64,
    pub child: TraceNode,
}

/// Certificate for a full N_{n,γ} evaluation through the multiple cover sum.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub n: i64,
    pub gamma: Vec<(u32, u64)>,
    pub value: String,
    /// The critical-locus assumption is recorded, never checked.
    pub assumes_critical_locus: bool,
    pub terms: Vec<CoverTerm>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverTerm {
    pub k: u64,
    pub gamma_over_k: Vec<(u32, u64)>,
    pub n1_value: String,
    pub trace: TraceNode,
}

pub fn class_to_pairs(gamma: &CurveClass) -> Vec<(u32, u64)> {
    gamma.iter().map(|(v, a)| (v.0, a)).collect()
}

impl TraceNode {
    /// Depth of the reduction tree: 0 for a base or vanishing leaf.
    pub fn depth(&self) -> usize {
        match &self.step {
            TraceStep::Base { .. } | TraceStep::Vanishing { .. } => 0,
            TraceStep::Cover { lifts, .. } => {
                1 + lifts.iter().map(|l| l.child.depth()).max().unwrap_or(0)
            }
        }
    }

    /// Check that (−l, genus) strictly decreases into every child.
    pub fn lex_decreasing(&self) -> bool {
        match &self.step {
            TraceStep::Base { .. } | TraceStep::Vanishing { .. } => true,
            TraceStep::Cover { lifts, .. } => lifts.iter().all(|lift| {
                let c = &lift.child;
                let decreases =
                    c.l > self.l || (c.l == self.l && c.genus < self.genus);
                decreases && c.lex_decreasing()
            }),
        }
    }
}
