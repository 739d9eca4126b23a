//! Truncated multivariate formal power series in q^n t^γ over exact
//! rationals, graded by the total degree d(γ). Supports multiplication,
//! logarithm, exponential, rational-exponent powers and the product form
//! assembled from genus-zero invariants.

use crate::error::{Error, Result};
use crate::graph::{CurveClass, DualGraph, VertexId};
use crate::invariants::GvTable;
use crate::rational::{is_integer, rat_int, sign_pow, Rat};
use num::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermIndex {
    pub n: i64,
    pub gamma: CurveClass,
}

impl TermIndex {
    pub fn constant() -> Self {
        TermIndex {
            n: 0,
            gamma: CurveClass::zero(),
        }
    }
}

/// Truncation context shared by all series in a computation: the vertex set
/// of the underlying graph, the maximal total degree D and the n window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesContext {
    pub vertices: BTreeSet<VertexId>,
    pub truncation: u64,
    pub n_bound: i64,
}

impl SeriesContext {
    pub fn new(graph: &DualGraph, truncation: u64, n_bound: i64) -> Self {
        SeriesContext {
            vertices: graph.vertex_ids().collect(),
            truncation,
            n_bound,
        }
    }

    fn admits(&self, idx: &TermIndex) -> bool {
        idx.gamma.d() <= self.truncation
            && idx.n.abs() <= self.n_bound
            && idx.gamma.support().iter().all(|v| self.vertices.contains(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSeries {
    pub context: SeriesContext,
    terms: BTreeMap<TermIndex, Rat>,
}

impl FormalSeries {
    pub fn zero(context: SeriesContext) -> Self {
        FormalSeries {
            context,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(context: SeriesContext, c: Rat) -> Self {
        let mut s = Self::zero(context);
        s.insert(TermIndex::constant(), c);
        s
    }

    pub fn one(context: SeriesContext) -> Self {
        Self::constant(context, Rat::one())
    }

    pub fn from_terms(
        context: SeriesContext,
        terms: impl IntoIterator<Item = (TermIndex, Rat)>,
    ) -> Result<Self> {
        let mut s = Self::zero(context);
        for (idx, c) in terms {
            if idx.gamma.is_zero() && idx.n != 0 {
                return Err(Error::Domain(
                    "pure q^n term with zero curve class".into(),
                ));
            }
            s.add_term(idx, c);
        }
        Ok(s)
    }

    fn insert(&mut self, idx: TermIndex, c: Rat) {
        if c.is_zero() || !self.context.admits(&idx) {
            return;
        }
        self.terms.insert(idx, c);
    }

    fn add_term(&mut self, idx: TermIndex, c: Rat) {
        if c.is_zero() || !self.context.admits(&idx) {
            return;
        }
        let entry = self.terms.entry(idx.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&idx);
        }
    }

    pub fn coeff(&self, idx: &TermIndex) -> Rat {
        self.terms.get(idx).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermIndex, &Rat)> {
        self.terms.iter()
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&TermIndex::constant())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.check_context(other)?;
        let mut out = self.clone();
        for (idx, c) in other.terms() {
            out.add_term(idx.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> FormalSeries {
        let mut out = FormalSeries::zero(self.context.clone());
        for (idx, c) in self.terms() {
            out.insert(idx.clone(), -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rat) -> FormalSeries {
        let mut out = FormalSeries::zero(self.context.clone());
        if k.is_zero() {
            return out;
        }
        for (idx, c) in self.terms() {
            out.insert(idx.clone(), c * k);
        }
        out
    }

    fn check_context(&self, other: &FormalSeries) -> Result<()> {
        if self.context != other.context {
            return Err(Error::ContextMismatch(
                "series built over different contexts".into(),
            ));
        }
        Ok(())
    }
}

pub fn series_mul(a: &FormalSeries, b: &FormalSeries) -> Result<FormalSeries> {
    a.check_context(b)?;
    let mut out = FormalSeries::zero(a.context.clone());
    for (ia, ca) in a.terms() {
        for (ib, cb) in b.terms() {
            if ia.gamma.d() + ib.gamma.d() > a.context.truncation {
                continue;
            }
            let idx = TermIndex {
                n: ia.n + ib.n,
                gamma: ia.gamma.add(&ib.gamma),
            };
            out.add_term(idx, ca * cb);
        }
    }
    Ok(out)
}

/// log s = Σ_{l≥1} ((−1)^{l−1}/l)(s − 1)^l. Finite per degree since s − 1
/// has no constant term; l = D terms suffice.
pub fn series_log(s: &FormalSeries) -> Result<FormalSeries> {
    if s.constant_term() != Rat::one() {
        return Err(Error::Domain("log of a series with constant term != 1".into()));
    }
    let one = FormalSeries::one(s.context.clone());
    let u = s.sub(&one)?;
    let mut out = FormalSeries::zero(s.context.clone());
    let mut power = FormalSeries::one(s.context.clone());
    for l in 1..=s.context.truncation.max(1) {
        power = series_mul(&power, &u)?;
        if power.is_zero() {
            break;
        }
        let coeff = sign_pow(l + 1) / rat_int(l as i64);
        out = out.add(&power.scale(&coeff))?;
    }
    Ok(out)
}

/// exp s = Σ_{l≥0} s^l / l!, for s with zero constant term.
pub fn series_exp(s: &FormalSeries) -> Result<FormalSeries> {
    if !s.constant_term().is_zero() {
        return Err(Error::Domain(
            "exp of a series with nonzero constant term".into(),
        ));
    }
    let mut out = FormalSeries::one(s.context.clone());
    let mut power = FormalSeries::one(s.context.clone());
    let mut factorial = Rat::one();
    for l in 1..=s.context.truncation.max(1) {
        power = series_mul(&power, s)?;
        if power.is_zero() {
            break;
        }
        factorial *= rat_int(l as i64);
        out = out.add(&power.scale(&(Rat::one() / &factorial)))?;
    }
    Ok(out)
}

/// s^e for rational e and s with constant term 1, via exp(e · log s).
pub fn series_pow(s: &FormalSeries, e: &Rat) -> Result<FormalSeries> {
    series_exp(&series_log(s)?.scale(e))
}

/// How the factor set of the product form is made finite: either a slope
/// constraint fixing n = μ · (ω · γ) per class, or an explicit support list.
#[derive(Debug, Clone)]
pub enum FactorFamily {
    Slope(Rat),
    Explicit(Vec<(i64, CurveClass)>),
}

use crate::graph::classes_up_to_degree;

/// The product ∏_γ (1 − (−1)^{γ·H} q^n t^γ)^{(γ·H) N_{1,γ}} over all classes
/// of total degree at most D admitted by the factor family.
pub fn gv_product_side(
    table: &GvTable,
    graph: &DualGraph,
    family: &FactorFamily,
    context: SeriesContext,
) -> Result<FormalSeries> {
    let mut factors: Vec<(i64, CurveClass)> = Vec::new();
    match family {
        FactorFamily::Slope(mu) => {
            for gamma in classes_up_to_degree(graph, context.truncation) {
                let omega = rat_int(gamma.omega_pairing(graph) as i64);
                let n = mu * &omega;
                if !is_integer(&n) {
                    continue;
                }
                let n: i64 = n.to_integer().try_into().map_err(|_| {
                    Error::Domain("slope-forced n exceeds machine range".into())
                })?;
                factors.push((n, gamma));
            }
        }
        FactorFamily::Explicit(list) => factors = list.clone(),
    }

    let mut product = FormalSeries::one(context.clone());
    for (n, gamma) in factors {
        let gh = gamma.h_pairing(graph);
        let n1 = table.get(&gamma)?;
        let exponent = rat_int(gh as i64) * n1;
        if exponent.is_zero() {
            continue;
        }
        // 1 − (−1)^{γ·H} q^n t^γ
        let base = FormalSeries::from_terms(
            context.clone(),
            [
                (TermIndex::constant(), Rat::one()),
                (TermIndex { n, gamma }, -sign_pow(gh)),
            ],
        )?;
        product = series_mul(&product, &series_pow(&base, &exponent)?)?;
    }
    Ok(product)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::Provenance;
    use crate::rational::{binomial_rat, rat};

    fn ctx() -> SeriesContext {
        SeriesContext::new(&DualGraph::cycle_graph(1, 1), 4, 8)
    }

    fn qt(n: i64, k: u64) -> TermIndex {
        TermIndex {
            n,
            gamma: CurveClass::single(VertexId(0), k),
        }
    }

    fn monomial(c: &SeriesContext, n: i64, k: u64, coeff: Rat) -> FormalSeries {
        FormalSeries::from_terms(c.clone(), [(qt(n, k), coeff)]).unwrap()
    }

    #[test]
    fn mul_difference_of_squares() {
        let c = ctx();
        let one = FormalSeries::one(c.clone());
        let p = one.add(&monomial(&c, 1, 1, Rat::one())).unwrap();
        let m = one.sub(&monomial(&c, 1, 1, Rat::one())).unwrap();
        let prod = series_mul(&p, &m).unwrap();
        let expect = one.sub(&monomial(&c, 2, 2, Rat::one())).unwrap();
        assert_eq!(prod, expect);
    }

    #[test]
    fn mul_identity_and_distributivity() {
        let c = SeriesContext::new(&DualGraph::cycle_graph(2, 1), 4, 8);
        let one = FormalSeries::one(c.clone());
        let g1 = CurveClass::single(VertexId(0), 1);
        let g2 = CurveClass::single(VertexId(1), 1);
        let a = one
            .add(&FormalSeries::from_terms(c.clone(), [(TermIndex { n: 1, gamma: g1.clone() }, Rat::one())]).unwrap())
            .unwrap();
        let b = one
            .add(&FormalSeries::from_terms(c.clone(), [(TermIndex { n: 1, gamma: g2.clone() }, Rat::one())]).unwrap())
            .unwrap();
        assert_eq!(series_mul(&one, &b).unwrap(), b);
        let prod = series_mul(&a, &b).unwrap();
        assert_eq!(prod.coeff(&TermIndex { n: 1, gamma: g1.clone() }), Rat::one());
        assert_eq!(prod.coeff(&TermIndex { n: 1, gamma: g2.clone() }), Rat::one());
        assert_eq!(
            prod.coeff(&TermIndex { n: 2, gamma: g1.add(&g2) }),
            Rat::one()
        );
    }

    #[test]
    fn mul_rejects_context_mismatch() {
        let a = FormalSeries::one(ctx());
        let b = FormalSeries::one(SeriesContext::new(&DualGraph::cycle_graph(2, 1), 4, 8));
        assert!(series_mul(&a, &b).is_err());
    }

    #[test]
    fn log_examples() {
        let c = ctx();
        let one = FormalSeries::one(c.clone());
        assert!(series_log(&one).unwrap().is_zero());

        let s = one.add(&monomial(&c, 1, 1, Rat::one())).unwrap();
        let l = series_log(&s).unwrap();
        assert_eq!(l.coeff(&qt(1, 1)), Rat::one());
        assert_eq!(l.coeff(&qt(2, 2)), rat(-1, 2));
        assert_eq!(l.coeff(&qt(3, 3)), rat(1, 3));

        assert!(series_log(&monomial(&c, 1, 1, Rat::one())).is_err());
    }

    #[test]
    fn exp_examples() {
        let c = ctx();
        let zero = FormalSeries::zero(c.clone());
        assert_eq!(series_exp(&zero).unwrap(), FormalSeries::one(c.clone()));

        let e = series_exp(&monomial(&c, 1, 1, Rat::one())).unwrap();
        assert_eq!(e.coeff(&TermIndex::constant()), Rat::one());
        assert_eq!(e.coeff(&qt(1, 1)), Rat::one());
        assert_eq!(e.coeff(&qt(2, 2)), rat(1, 2));

        assert!(series_exp(&FormalSeries::one(c)).is_err());
    }

    #[test]
    fn log_exp_round_trips() {
        let c = ctx();
        let x = monomial(&c, 1, 1, rat_int(3))
            .add(&monomial(&c, 2, 2, rat(-1, 2)))
            .unwrap();
        assert_eq!(series_log(&series_exp(&x).unwrap()).unwrap(), x);

        let s = FormalSeries::one(c.clone())
            .add(&monomial(&c, 2, 2, rat_int(5)))
            .unwrap();
        assert_eq!(series_exp(&series_log(&s).unwrap()).unwrap(), s);
    }

    #[test]
    fn pow_matches_generalized_binomial() {
        // (1 − u)^e expanded by exp(e log) must match Σ C(e, j)(−u)^j.
        let c = ctx();
        let u = monomial(&c, 1, 1, Rat::one());
        let base = FormalSeries::one(c.clone()).sub(&u).unwrap();
        for e in [rat_int(3), rat(1, 2), rat(-5, 3)] {
            let p = series_pow(&base, &e).unwrap();
            for j in 0..=4u64 {
                let expect = binomial_rat(&e, j) * sign_pow(j);
                let idx = if j == 0 { TermIndex::constant() } else { qt(j as i64, j) };
                assert_eq!(p.coeff(&idx), expect, "e={e} j={j}");
            }
        }
    }

    #[test]
    fn gv_product_examples() {
        let g = DualGraph::cycle_graph(1, 1);
        let c = SeriesContext::new(&g, 2, 4);
        let v = VertexId(0);

        let empty = GvTable::new(2);
        let s = gv_product_side(&empty, &g, &FactorFamily::Slope(rat_int(1)), c.clone()).unwrap();
        assert_eq!(s, FormalSeries::one(c.clone()));

        let mut table = GvTable::new(2);
        table.set(CurveClass::single(v, 1), Rat::one(), Provenance::UserSupplied);
        let s = gv_product_side(&table, &g, &FactorFamily::Slope(rat_int(1)), c.clone()).unwrap();
        // H·C = 1, N = 1: the factor (1 + q t)^1.
        let mut expect = FormalSeries::one(c.clone());
        expect = expect.add(&monomial(&c, 1, 1, Rat::one())).unwrap();
        assert_eq!(s, expect);
    }
}
