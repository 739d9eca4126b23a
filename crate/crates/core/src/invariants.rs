//! Local generalized Donaldson-Thomas invariants N_{n,γ}: closed-form base
//! cases, structural vanishing rules, the multiple cover formula and the
//! cyclic-cover descent recursion.

use crate::certificate::{class_to_pairs, Certificate, CoverTerm, TraceLift, TraceNode, TraceStep};
use crate::cover::build_cover;
use crate::error::{Error, Result};
use crate::graph::{classify, CurveClass, Classification, DualGraph};
use crate::rational::{format_rat, rat, rat_int, sign_pow, Rat};
use num::Zero;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    SuperRigid,
    SurfaceType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    Behrend,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Descent,
    UserSupplied,
}

/// Genus-zero input table γ → N_{1,γ}. Classes of total degree at most
/// `complete_to` that are absent are zero; queries beyond that bound are
/// missing data.
#[derive(Debug, Clone)]
pub struct GvTable {
    entries: BTreeMap<CurveClass, (Rat, Provenance)>,
    complete_to: u64,
}

impl GvTable {
    pub fn new(complete_to: u64) -> Self {
        GvTable {
            entries: BTreeMap::new(),
            complete_to,
        }
    }

    pub fn set(&mut self, gamma: CurveClass, value: Rat, provenance: Provenance) {
        if value.is_zero() {
            self.entries.remove(&gamma);
        } else {
            self.entries.insert(gamma, (value, provenance));
        }
    }

    pub fn get(&self, gamma: &CurveClass) -> Result<Rat> {
        if let Some((v, _)) = self.entries.get(gamma) {
            return Ok(v.clone());
        }
        if gamma.d() <= self.complete_to {
            return Ok(Rat::zero());
        }
        Err(Error::MissingData(format!(
            "N_1 value for class of degree {} beyond table bound {}",
            gamma.d(),
            self.complete_to
        )))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&CurveClass, &Rat)> {
        self.entries.iter().map(|(g, (v, _))| (g, v))
    }
}

/// Σ_{k ≥ 1, k | (n, γ)} (1/k²) N_{1, γ/k}.
pub fn multiple_cover_eval(n: i64, gamma: &CurveClass, table: &GvTable) -> Result<Rat> {
    let arith = crate::graph::class_arith(gamma, n)?;
    let mut total = Rat::zero();
    for k in arith.divisors {
        let reduced = gamma
            .div_exact(k)
            .ok_or_else(|| Error::Internal("divisor does not divide class".into()))?;
        total += table.get(&reduced)? / rat_int((k * k) as i64);
    }
    Ok(total)
}

/// Base values on a chain with full support: ±1/k² when every multidegree
/// equals k and k divides n, zero otherwise. Positive for the rigid case,
/// negative for surface type.
pub fn base_chain(n: i64, a: &[u64], kind: GeometryKind) -> Rat {
    assert!(!a.is_empty() && a.iter().all(|&x| x >= 1));
    let k = a[0];
    if a.iter().any(|&x| x != k) {
        return Rat::zero();
    }
    if n.unsigned_abs() % k != 0 {
        return Rat::zero();
    }
    let v = rat(1, (k * k) as i64);
    match kind {
        GeometryKind::SuperRigid => v,
        GeometryKind::SurfaceType => -v,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VanishingDecision {
    Zero(&'static str),
    ReduceToN1,
    NoDecision,
}

/// Structural vanishing: disconnected or non-rational support is zero;
/// primitive classes reduce to n = 1.
pub fn vanishing_rules(graph: &DualGraph, gamma: &CurveClass, _n: i64) -> VanishingDecision {
    if gamma.is_zero() {
        return VanishingDecision::NoDecision;
    }
    let supp = gamma.support();
    for v in &supp {
        if let Some(vx) = graph.vertex(*v) {
            if !vx.rational {
                return VanishingDecision::Zero("non-rational component in support");
            }
        }
    }
    if !graph.subset_connected(&supp) {
        return VanishingDecision::Zero("disconnected support");
    }
    let arith = crate::graph::class_arith(gamma, 1).expect("nonzero class");
    if arith.is_primitive {
        return VanishingDecision::ReduceToN1;
    }
    VanishingDecision::NoDecision
}

/// N_{n, m[C_1] + … + m[C_N]} on a cycle of N rational curves:
/// ±Σ_{k | (n, m)} N/k².
pub fn type_in_closed_form(n_components: u32, m: u64, n: i64, kind: GeometryKind) -> Rat {
    assert!(n_components >= 1 && m >= 1);
    let g = {
        let mut a = m;
        let mut b = n.unsigned_abs();
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    };
    let mut total = Rat::zero();
    for k in 1..=g {
        if g % k == 0 {
            total += rat_int(n_components as i64) / rat_int((k * k) as i64);
        }
    }
    match kind {
        GeometryKind::SuperRigid => total,
        GeometryKind::SurfaceType => -total,
    }
}

/// Euler-characteristic invariants of a single 0-super rigid (−1,−1)-curve:
/// N^χ_{0,m[C]} = (−1)^{m−1}/m², N^χ_{1,m[C]} = 1 iff m = 1.
pub fn euler_variant_rigid_m1m1(n: i64, m: u64) -> Result<Rat> {
    assert!(m >= 1);
    match n {
        0 => Ok(sign_pow(m + 1) / rat_int((m * m) as i64)),
        1 => Ok(if m == 1 { rat_int(1) } else { Rat::zero() }),
        _ => Err(Error::Unsupported(format!(
            "Euler-variant rigid invariant is only known for n in {{0, 1}}, got {n}"
        ))),
    }
}

/// Lookup contract for genus-zero base cases on trees.
pub trait BaseProvider {
    fn base_value(
        &self,
        tree: &DualGraph,
        gamma: &CurveClass,
        n: i64,
        kind: GeometryKind,
    ) -> Option<Rat>;
}

/// Built-in provider: chains evaluate by the closed form; everything else is
/// left to a user table.
pub struct ChainProvider;

impl BaseProvider for ChainProvider {
    fn base_value(
        &self,
        tree: &DualGraph,
        gamma: &CurveClass,
        n: i64,
        kind: GeometryKind,
    ) -> Option<Rat> {
        match classify(tree, gamma).ok()? {
            Classification::Chain(_) => {
                let a: Vec<u64> = gamma.iter().map(|(_, x)| x).collect();
                Some(base_chain(n, &a, kind))
            }
            _ => None,
        }
    }
}

/// User-supplied base values, matched by the sorted multiset of nonzero
/// multidegrees (tree shapes with equal multisets are not distinguished) and
/// optionally by n.
#[derive(Debug, Clone, Default)]
pub struct UserTableProvider {
    pub entries: Vec<UserBaseEntry>,
}

#[derive(Debug, Clone)]
pub struct UserBaseEntry {
    pub multidegrees: Vec<u64>,
    pub n: Option<i64>,
    pub value: Rat,
}

impl BaseProvider for UserTableProvider {
    fn base_value(
        &self,
        _tree: &DualGraph,
        gamma: &CurveClass,
        n: i64,
        _kind: GeometryKind,
    ) -> Option<Rat> {
        let mut degs: Vec<u64> = gamma.iter().map(|(_, a)| a).collect();
        degs.sort_unstable();
        self.entries
            .iter()
            .find(|e| {
                let mut key = e.multidegrees.clone();
                key.sort_unstable();
                key == degs && e.n.map_or(true, |en| en == n)
            })
            .map(|e| e.value.clone())
    }
}

/// Chain closed form first, then the user table.
pub struct LayeredProvider {
    pub user: UserTableProvider,
}

impl BaseProvider for LayeredProvider {
    fn base_value(
        &self,
        tree: &DualGraph,
        gamma: &CurveClass,
        n: i64,
        kind: GeometryKind,
    ) -> Option<Rat> {
        ChainProvider
            .base_value(tree, gamma, n, kind)
            .or_else(|| self.user.base_value(tree, gamma, n, kind))
    }
}

/// Smallest odd covering degree strictly greater than d: large enough that
/// no connected lift wraps the cut cycle, odd for the sign rule.
pub fn standard_cover_degree(d: u64) -> u32 {
    let mut m = d as u32 + 1;
    if m % 2 == 0 {
        m += 1;
    }
    m
}

const MAX_DEPTH: usize = 64;

/// N_{1,γ} by the covering descent: a genus ≥ 1 support is unwound by a
/// cyclic cover and N_{1,γ} = (1/m) Σ_{σ_*γ̃ = γ} N_{1,γ̃} over all lifts.
/// Disconnected lifts vanish and are skipped; connected lifts are grouped
/// into deck orbits since the invariant is deck-invariant.
pub fn descent_n1(
    graph: &DualGraph,
    gamma: &CurveClass,
    kind: GeometryKind,
    provider: &dyn BaseProvider,
) -> Result<(Rat, TraceNode)> {
    descent_n1_at(graph, gamma, kind, provider, 0, None, None)
}

fn descent_n1_at(
    graph: &DualGraph,
    gamma: &CurveClass,
    kind: GeometryKind,
    provider: &dyn BaseProvider,
    depth: usize,
    loop_index: Option<usize>,
    m_override: Option<u32>,
) -> Result<(Rat, TraceNode)> {
    if depth > MAX_DEPTH {
        return Err(Error::Internal(
            "descent recursion exceeded the depth bound".into(),
        ));
    }
    if gamma.is_zero() {
        return Err(Error::Domain("descent of the zero class".into()));
    }
    let pairs = class_to_pairs(gamma);
    let node = |genus, step| TraceNode {
        gamma: pairs.clone(),
        l: gamma.l(),
        genus,
        step,
    };

    match vanishing_rules(graph, gamma, 1) {
        VanishingDecision::Zero(reason) => {
            return Ok((
                Rat::zero(),
                node(
                    0,
                    TraceStep::Vanishing {
                        reason: reason.to_string(),
                    },
                ),
            ));
        }
        _ => {}
    }

    let sub = graph.induced_subgraph(&gamma.support());
    let genus = sub.genus()?;
    if genus == 0 {
        let value = provider
            .base_value(&sub, gamma, 1, kind)
            .ok_or_else(|| {
                Error::MissingBase(format!(
                    "no base value for tree support with multidegrees {:?}",
                    gamma.iter().map(|(_, a)| a).collect::<Vec<_>>()
                ))
            })?;
        return Ok((
            value.clone(),
            node(
                0,
                TraceStep::Base {
                    value: format_rat(&value),
                },
            ),
        ));
    }

    let basis = sub.cycle_basis()?;
    let chosen = loop_index.unwrap_or(0).min(basis.len() - 1);
    let loop_class = &basis[chosen];
    let m = m_override.unwrap_or_else(|| standard_cover_degree(gamma.d()));
    let cover = build_cover(&sub, loop_class, m)?;

    let mut total = Rat::zero();
    let mut lifts_out = Vec::new();
    for lift in cover.enumerate_lifts(gamma, true, true) {
        let (value, child) =
            descent_n1_at(&cover.graph, &lift.class, kind, provider, depth + 1, None, None)?;
        total += rat_int(lift.multiplicity as i64) * value;
        lifts_out.push(TraceLift {
            class: class_to_pairs(&lift.class),
            multiplicity: lift.multiplicity,
            child,
        });
    }
    total /= rat_int(m as i64);
    Ok((
        total,
        node(
            genus,
            TraceStep::Cover {
                m,
                cut_edge: loop_class.cut.0,
                lifts: lifts_out,
            },
        ),
    ))
}

/// Same descent with an explicit basis-loop choice at the top level, used to
/// verify loop-choice independence.
pub fn descent_n1_with_loop(
    graph: &DualGraph,
    gamma: &CurveClass,
    kind: GeometryKind,
    provider: &dyn BaseProvider,
    loop_index: usize,
) -> Result<(Rat, TraceNode)> {
    descent_n1_at(graph, gamma, kind, provider, 0, Some(loop_index), None)
}

/// Same descent with an explicit covering degree at the top level; any odd
/// m > d(γ) must give the same value.
pub fn descent_n1_with_degree(
    graph: &DualGraph,
    gamma: &CurveClass,
    kind: GeometryKind,
    provider: &dyn BaseProvider,
    m: u32,
) -> Result<(Rat, TraceNode)> {
    descent_n1_at(graph, gamma, kind, provider, 0, None, Some(m))
}

/// Complete genus-zero table on a graph: N_{1,γ} for every class of total
/// degree at most D, by descent. Disconnected supports are zero and skipped.
pub fn gv_table_via_descent(
    graph: &DualGraph,
    max_d: u64,
    kind: GeometryKind,
    provider: &dyn BaseProvider,
) -> Result<GvTable> {
    let mut table = GvTable::new(max_d);
    for gamma in crate::graph::classes_up_to_degree(graph, max_d) {
        if !graph.subset_connected(&gamma.support()) {
            continue;
        }
        let (value, _) = descent_n1(graph, &gamma, kind, provider)?;
        table.set(gamma, value, Provenance::Descent);
    }
    Ok(table)
}

/// Build the table of N_{1, γ/k} needed by the multiple cover sum for (n, γ).
pub fn gv_table_for(
    graph: &DualGraph,
    gamma: &CurveClass,
    n: i64,
    kind: GeometryKind,
    provider: &dyn BaseProvider,
) -> Result<(GvTable, Vec<CoverTerm>)> {
    let arith = crate::graph::class_arith(gamma, n)?;
    let mut table = GvTable::new(0);
    let mut terms = Vec::new();
    for k in arith.divisors {
        let reduced = gamma.div_exact(k).expect("divisor divides the class");
        let (value, trace) = descent_n1(graph, &reduced, kind, provider)?;
        table.set(reduced.clone(), value.clone(), Provenance::Descent);
        terms.push(CoverTerm {
            k,
            gamma_over_k: class_to_pairs(&reduced),
            n1_value: format_rat(&value),
            trace,
        });
    }
    Ok((table, terms))
}

/// Full evaluation of N_{n,γ}: vanishing rules, then the multiple cover sum
/// over a descent-generated genus-zero table, with a reduction certificate.
pub fn reduce_and_compute(
    graph: &DualGraph,
    gamma: &CurveClass,
    n: i64,
    kind: GeometryKind,
    weight: WeightKind,
    provider: &dyn BaseProvider,
) -> Result<(Rat, Certificate)> {
    if gamma.is_zero() {
        return Err(Error::Domain("invariant of the zero class".into()));
    }
    let mut cert = Certificate {
        n,
        gamma: class_to_pairs(gamma),
        value: String::new(),
        assumes_critical_locus: true,
        terms: Vec::new(),
    };

    if weight == WeightKind::Euler {
        match kind {
            GeometryKind::SuperRigid => {
                // The known Euler values cover only a single smooth rigid
                // curve; the multiple cover formula fails here, so nothing
                // else may be extrapolated.
                if graph.num_vertices() == 1 && graph.num_edges() == 0 && gamma.l() == 1 {
                    let m = gamma.d();
                    let value = euler_variant_rigid_m1m1(n, m)?;
                    cert.value = format_rat(&value);
                    return Ok((value, cert));
                }
                return Err(Error::Unsupported(
                    "Euler weight with super-rigid geometry is only known for a \
                     single smooth rational curve"
                        .into(),
                ));
            }
            // Surface type: the covering reduction applies verbatim to the
            // Euler weight, with the same base values.
            GeometryKind::SurfaceType => {}
        }
    }

    match vanishing_rules(graph, gamma, n) {
        VanishingDecision::Zero(reason) => {
            cert.value = "0".into();
            cert.terms.push(CoverTerm {
                k: 1,
                gamma_over_k: class_to_pairs(gamma),
                n1_value: "0".into(),
                trace: TraceNode {
                    gamma: class_to_pairs(gamma),
                    l: gamma.l(),
                    genus: 0,
                    step: TraceStep::Vanishing {
                        reason: reason.to_string(),
                    },
                },
            });
            return Ok((Rat::zero(), cert));
        }
        _ => {}
    }

    let (table, terms) = gv_table_for(graph, gamma, n, kind, provider)?;
    cert.terms = terms;
    let value = multiple_cover_eval(n, gamma, &table)?;
    cert.value = format_rat(&value);
    Ok((value, cert))
}
