//! Dual graphs of nodal rational curve configurations: decorated multigraphs
//! with self-loops, genus, spanning-tree cycle bases, shape classification and
//! curve-class bookkeeping.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    /// ω · C_i, the degree entering slope constraints. Defaults to 1.
    pub omega_deg: u32,
    /// H · C_i, the marking degree.
    pub h_deg: u32,
    /// False marks a component that is not rational; its invariants vanish.
    pub rational: bool,
}

impl Vertex {
    pub fn new(id: u32, h_deg: u32) -> Self {
        Vertex {
            id: VertexId(id),
            omega_deg: 1,
            h_deg,
            rational: true,
        }
    }
}

/// An edge (a node of the curve). Endpoints are stored ordered; for a
/// self-loop the (tail, head) order fixes the orientation convention used
/// when unrolling cyclic covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

/// Direction in which an oriented walk traverses an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopDir {
    Forward,
    Backward,
}

/// An oriented closed walk with a distinguished cut edge whose removal keeps
/// the graph connected.
#[derive(Debug, Clone)]
pub struct LoopClass {
    pub steps: Vec<(EdgeId, LoopDir)>,
    pub cut: EdgeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    connected: bool,
    index: BTreeMap<VertexId, usize>,
}

impl DualGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (pos, v) in vertices.iter().enumerate() {
            if index.insert(v.id, pos).is_some() {
                return Err(Error::InvalidConfig(format!(
                    "duplicate vertex id {}",
                    v.id.0
                )));
            }
            if v.omega_deg == 0 {
                return Err(Error::InvalidConfig(format!(
                    "vertex {} has omega degree 0",
                    v.id.0
                )));
            }
        }
        for e in &edges {
            if !index.contains_key(&e.tail) || !index.contains_key(&e.head) {
                return Err(Error::InvalidConfig(format!(
                    "edge {} references missing vertex",
                    e.id.0
                )));
            }
        }
        let mut g = DualGraph {
            vertices,
            edges,
            connected: false,
            index,
        };
        g.connected = g.subset_connected(&g.vertex_ids().collect::<BTreeSet<_>>());
        Ok(g)
    }

    /// Chain of `n` vertices joined by `n - 1` edges, all h-degrees given.
    pub fn chain_graph(n: usize, h_deg: u32) -> Self {
        let vertices = (0..n).map(|i| Vertex::new(i as u32, h_deg)).collect();
        let edges = (0..n.saturating_sub(1))
            .map(|i| Edge {
                id: EdgeId(i as u32),
                tail: VertexId(i as u32),
                head: VertexId(i as u32 + 1),
            })
            .collect();
        DualGraph::new(vertices, edges).expect("chain graph is valid")
    }

    /// Cycle of `n` vertices (type I_n for n >= 2; n = 1 is a single vertex
    /// with a self-loop, type I_1).
    pub fn cycle_graph(n: usize, h_deg: u32) -> Self {
        let vertices: Vec<Vertex> = (0..n).map(|i| Vertex::new(i as u32, h_deg)).collect();
        let edges = (0..n)
            .map(|i| Edge {
                id: EdgeId(i as u32),
                tail: VertexId(i as u32),
                head: VertexId(((i + 1) % n) as u32),
            })
            .collect();
        DualGraph::new(vertices, edges).expect("cycle graph is valid")
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().map(|v| v.id)
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.index.get(&id).map(|&pos| &self.vertices[pos])
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Adjacency as (edge, neighbor) pairs; a self-loop appears twice.
    fn neighbors(&self, v: VertexId) -> Vec<(EdgeId, VertexId)> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.tail == v {
                out.push((e.id, e.head));
            }
            if e.head == v {
                out.push((e.id, e.tail));
            }
        }
        out
    }

    /// Whether the given vertex subset induces a connected subgraph.
    /// The empty set counts as connected.
    pub fn subset_connected(&self, subset: &BTreeSet<VertexId>) -> bool {
        let Some(&start) = subset.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::new();
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for (_, w) in self.neighbors(v) {
                if subset.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == subset.len()
    }

    /// Subgraph induced by a vertex subset, keeping original ids.
    pub fn induced_subgraph(&self, subset: &BTreeSet<VertexId>) -> DualGraph {
        let vertices = self
            .vertices
            .iter()
            .filter(|v| subset.contains(&v.id))
            .cloned()
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| subset.contains(&e.tail) && subset.contains(&e.head))
            .copied()
            .collect();
        DualGraph::new(vertices, edges).expect("induced subgraph of a valid graph is valid")
    }

    /// First Betti number: #edges - #vertices + 1.
    pub fn genus(&self) -> Result<u32> {
        if !self.connected {
            return Err(Error::Domain("genus of a disconnected graph".into()));
        }
        Ok((self.num_edges() + 1 - self.num_vertices()) as u32)
    }

    /// Spanning-tree cycle basis: one loop per non-tree edge, with that edge
    /// as the cut edge. BFS from the smallest vertex id makes the result
    /// deterministic.
    pub fn cycle_basis(&self) -> Result<Vec<LoopClass>> {
        if !self.connected {
            return Err(Error::Domain("cycle basis of a disconnected graph".into()));
        }
        if self.vertices.is_empty() {
            return Ok(Vec::new());
        }
        let root = self.vertices.iter().map(|v| v.id).min().unwrap();
        let mut parent: BTreeMap<VertexId, (EdgeId, LoopDir, VertexId)> = BTreeMap::new();
        let mut tree_edges: BTreeSet<EdgeId> = BTreeSet::new();
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let mut nbrs = self.neighbors(v);
            nbrs.sort_by_key(|&(e, w)| (w, e));
            for (eid, w) in nbrs {
                if seen.insert(w) {
                    let e = self.edges.iter().find(|e| e.id == eid).unwrap();
                    let dir = if e.tail == v {
                        LoopDir::Forward
                    } else {
                        LoopDir::Backward
                    };
                    parent.insert(w, (eid, dir, v));
                    tree_edges.insert(eid);
                    queue.push_back(w);
                }
            }
        }

        let path_to_root = |mut v: VertexId| -> Vec<(EdgeId, LoopDir, VertexId)> {
            let mut path = Vec::new();
            while let Some(&(e, dir, p)) = parent.get(&v) {
                path.push((e, dir, v));
                v = p;
            }
            path
        };

        let mut basis = Vec::new();
        let mut chords: Vec<&Edge> = self
            .edges
            .iter()
            .filter(|e| !tree_edges.contains(&e.id))
            .collect();
        chords.sort_by_key(|e| e.id);
        for chord in chords {
            // Walk chord tail -> head, then head -> tail through the tree.
            let mut steps = vec![(chord.id, LoopDir::Forward)];
            let tail_path = path_to_root(chord.tail);
            let head_path = path_to_root(chord.head);
            // Drop the common suffix (shared ancestors).
            let mut ti = tail_path.len();
            let mut hi = head_path.len();
            while ti > 0 && hi > 0 && tail_path[ti - 1].0 == head_path[hi - 1].0 {
                ti -= 1;
                hi -= 1;
            }
            // head -> meeting point: traverse head_path forward, reversed dir.
            for &(e, dir, _) in &head_path[..hi] {
                let rev = match dir {
                    LoopDir::Forward => LoopDir::Backward,
                    LoopDir::Backward => LoopDir::Forward,
                };
                steps.push((e, rev));
            }
            // meeting point -> tail: traverse tail_path backward, same dir.
            for &(e, dir, _) in tail_path[..ti].iter().rev() {
                steps.push((e, dir));
            }
            basis.push(LoopClass {
                steps,
                cut: chord.id,
            });
        }
        Ok(basis)
    }
}

/// Shape of the subgraph induced by a class support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Path of n vertices (A_n).
    Chain(usize),
    /// Cycle of n vertices (I_n); I_1 is one vertex with a self-loop.
    CycleI(usize),
    AdeTree(AdeKind),
    GeneralTree,
    HigherGenus,
    Disconnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdeKind {
    D(usize),
    E6,
    E7,
    E8,
}

/// Classify the subgraph induced by the support of `support`.
pub fn classify(graph: &DualGraph, support: &CurveClass) -> Result<Classification> {
    let supp = support.support();
    if supp.is_empty() {
        return Err(Error::Domain("classify requires nonempty support".into()));
    }
    let sub = graph.induced_subgraph(&supp);
    if !sub.is_connected() {
        return Ok(Classification::Disconnected);
    }
    let g = sub.genus()?;
    if g >= 2 {
        return Ok(Classification::HigherGenus);
    }
    let degs: BTreeMap<VertexId, usize> = sub
        .vertices
        .iter()
        .map(|v| {
            let d = sub
                .edges
                .iter()
                .map(|e| (e.tail == v.id) as usize + (e.head == v.id) as usize)
                .sum();
            (v.id, d)
        })
        .collect();
    if g == 1 {
        // A genus-one graph is a cycle iff every vertex has degree 2.
        if degs.values().all(|&d| d == 2) {
            return Ok(Classification::CycleI(sub.num_vertices()));
        }
        return Ok(Classification::HigherGenus);
    }
    // Tree.
    let n = sub.num_vertices();
    if n == 1 || degs.values().all(|&d| d <= 2) {
        return Ok(Classification::Chain(n));
    }
    let branch_vertices: Vec<_> = degs.iter().filter(|(_, &d)| d >= 3).collect();
    if branch_vertices.len() == 1 && *branch_vertices[0].1 == 3 {
        let center = *branch_vertices[0].0;
        let mut arms: Vec<usize> = Vec::new();
        for (_, start) in sub.neighbors(center) {
            let mut len = 1;
            let mut prev = center;
            let mut cur = start;
            loop {
                let next: Vec<_> = sub
                    .neighbors(cur)
                    .into_iter()
                    .map(|(_, w)| w)
                    .filter(|&w| w != prev)
                    .collect();
                match next.as_slice() {
                    [] => break,
                    [w] => {
                        prev = cur;
                        cur = *w;
                        len += 1;
                    }
                    _ => break,
                }
            }
            arms.push(len);
        }
        arms.sort_unstable();
        if let [a, b, _] = arms[..] {
            if a == 1 && b == 1 {
                return Ok(Classification::AdeTree(AdeKind::D(n)));
            }
            match (arms[0], arms[1], arms[2]) {
                (1, 2, 2) => return Ok(Classification::AdeTree(AdeKind::E6)),
                (1, 2, 3) => return Ok(Classification::AdeTree(AdeKind::E7)),
                (1, 2, 4) => return Ok(Classification::AdeTree(AdeKind::E8)),
                _ => {}
            }
        }
    }
    Ok(Classification::GeneralTree)
}

/// All nonzero classes of total degree at most `max_d` on the graph's
/// vertices, in sorted order.
pub fn classes_up_to_degree(graph: &DualGraph, max_d: u64) -> Vec<CurveClass> {
    let ids: Vec<VertexId> = graph.vertex_ids().collect();
    let mut out = Vec::new();
    let mut stack: Vec<(usize, CurveClass)> = vec![(0, CurveClass::zero())];
    while let Some((pos, partial)) = stack.pop() {
        if pos == ids.len() {
            if !partial.is_zero() {
                out.push(partial);
            }
            continue;
        }
        let remaining = max_d - partial.d();
        for a in 0..=remaining {
            stack.push((pos + 1, partial.add(&CurveClass::single(ids[pos], a))));
        }
    }
    out.sort();
    out
}

/// A one-cycle class: non-negative multidegree over a graph's vertices.
/// Zero coefficients are not stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CurveClass {
    coeffs: BTreeMap<VertexId, u64>,
}

impl CurveClass {
    pub fn zero() -> Self {
        CurveClass {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs(coeffs: impl IntoIterator<Item = (VertexId, u64)>) -> Self {
        let coeffs = coeffs.into_iter().filter(|&(_, a)| a > 0).collect();
        CurveClass { coeffs }
    }

    pub fn single(v: VertexId, a: u64) -> Self {
        Self::from_coeffs([(v, a)])
    }

    pub fn coeff(&self, v: VertexId) -> u64 {
        self.coeffs.get(&v).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, u64)> + '_ {
        self.coeffs.iter().map(|(&v, &a)| (v, a))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total degree d(γ) = Σ aᵢ.
    pub fn d(&self) -> u64 {
        self.coeffs.values().sum()
    }

    /// Support size l(γ) = #{i : aᵢ > 0}.
    pub fn l(&self) -> usize {
        self.coeffs.len()
    }

    pub fn support(&self) -> BTreeSet<VertexId> {
        self.coeffs.keys().copied().collect()
    }

    pub fn add(&self, other: &CurveClass) -> CurveClass {
        let mut coeffs = self.coeffs.clone();
        for (v, a) in other.iter() {
            *coeffs.entry(v).or_insert(0) += a;
        }
        CurveClass { coeffs }
    }

    pub fn scale(&self, k: u64) -> CurveClass {
        if k == 0 {
            return CurveClass::zero();
        }
        CurveClass {
            coeffs: self.coeffs.iter().map(|(&v, &a)| (v, a * k)).collect(),
        }
    }

    /// γ / k when every coefficient is divisible by k.
    pub fn div_exact(&self, k: u64) -> Option<CurveClass> {
        if k == 0 {
            return None;
        }
        let mut coeffs = BTreeMap::new();
        for (&v, &a) in &self.coeffs {
            if a % k != 0 {
                return None;
            }
            coeffs.insert(v, a / k);
        }
        Some(CurveClass { coeffs })
    }

    /// Checked subtraction; None if any coefficient would go negative.
    pub fn sub_checked(&self, other: &CurveClass) -> Option<CurveClass> {
        let mut coeffs = self.coeffs.clone();
        for (v, a) in other.iter() {
            let cur = coeffs.get(&v).copied().unwrap_or(0);
            if cur < a {
                return None;
            }
            if cur == a {
                coeffs.remove(&v);
            } else {
                coeffs.insert(v, cur - a);
            }
        }
        Some(CurveClass { coeffs })
    }

    /// ω · γ = Σ aᵢ · ω_deg(Cᵢ).
    pub fn omega_pairing(&self, graph: &DualGraph) -> u64 {
        self.iter()
            .map(|(v, a)| a * graph.vertex(v).map_or(1, |vx| vx.omega_deg as u64))
            .sum()
    }

    /// γ · H = Σ aᵢ · h_deg(Cᵢ).
    pub fn h_pairing(&self, graph: &DualGraph) -> u64 {
        self.iter()
            .map(|(v, a)| a * graph.vertex(v).map_or(0, |vx| vx.h_deg as u64))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassArith {
    pub d: u64,
    pub l: usize,
    pub gcd_gamma: u64,
    pub gcd_n_gamma: u64,
    pub is_primitive: bool,
    pub divisors: Vec<u64>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Divisor data of (n, γ): gcd of the coefficients, its gcd with |n|, and the
/// set of k dividing both.
pub fn class_arith(gamma: &CurveClass, n: i64) -> Result<ClassArith> {
    if gamma.is_zero() {
        return Err(Error::Domain("class arithmetic of the zero class".into()));
    }
    let gcd_gamma = gamma.iter().map(|(_, a)| a).fold(0, gcd);
    let gcd_n_gamma = gcd(gcd_gamma, n.unsigned_abs());
    let divisors = (1..=gcd_n_gamma)
        .filter(|k| gcd_n_gamma % k == 0)
        .collect();
    Ok(ClassArith {
        d: gamma.d(),
        l: gamma.l(),
        gcd_gamma,
        gcd_n_gamma,
        is_primitive: gcd_gamma == 1,
        divisors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vid(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn genus_examples() {
        assert_eq!(DualGraph::cycle_graph(1, 1).genus().unwrap(), 1);
        assert_eq!(DualGraph::chain_graph(3, 1).genus().unwrap(), 0);
        assert_eq!(DualGraph::cycle_graph(2, 1).genus().unwrap(), 1);
    }

    #[test]
    fn genus_rejects_disconnected() {
        let g = DualGraph::new(vec![Vertex::new(0, 1), Vertex::new(1, 1)], vec![]).unwrap();
        assert!(g.genus().is_err());
    }

    #[test]
    fn cycle_basis_examples() {
        assert!(DualGraph::chain_graph(4, 1).cycle_basis().unwrap().is_empty());

        let i1 = DualGraph::cycle_graph(1, 1);
        let basis = i1.cycle_basis().unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].steps.len(), 1);
        assert_eq!(basis[0].cut, basis[0].steps[0].0);

        let i3 = DualGraph::cycle_graph(3, 1);
        let basis = i3.cycle_basis().unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0].steps.len(), 3);
    }

    #[test]
    fn cycle_basis_size_matches_genus() {
        for g in [
            DualGraph::cycle_graph(1, 1),
            DualGraph::cycle_graph(4, 1),
            DualGraph::chain_graph(5, 1),
        ] {
            assert_eq!(g.cycle_basis().unwrap().len() as u32, g.genus().unwrap());
        }
        // Two vertices, three parallel edges: genus 2.
        let g = DualGraph::new(
            vec![Vertex::new(0, 1), Vertex::new(1, 1)],
            (0..3)
                .map(|i| Edge {
                    id: EdgeId(i),
                    tail: vid(0),
                    head: vid(1),
                })
                .collect(),
        )
        .unwrap();
        assert_eq!(g.genus().unwrap(), 2);
        assert_eq!(g.cycle_basis().unwrap().len(), 2);
    }

    #[test]
    fn classify_examples() {
        let i1 = DualGraph::cycle_graph(1, 1);
        let c = CurveClass::single(vid(0), 1);
        assert_eq!(classify(&i1, &c).unwrap(), Classification::CycleI(1));

        let chain = DualGraph::chain_graph(4, 1);
        let full = CurveClass::from_coeffs((0..4).map(|i| (vid(i), 1)));
        assert_eq!(classify(&chain, &full).unwrap(), Classification::Chain(4));

        // D4 star: center 0 joined to 1, 2, 3.
        let star = DualGraph::new(
            (0..4).map(|i| Vertex::new(i, 1)).collect(),
            (1..4)
                .map(|i| Edge {
                    id: EdgeId(i - 1),
                    tail: vid(0),
                    head: vid(i),
                })
                .collect(),
        )
        .unwrap();
        let full = CurveClass::from_coeffs((0..4).map(|i| (vid(i), 1)));
        assert_eq!(
            classify(&star, &full).unwrap(),
            Classification::AdeTree(AdeKind::D(4))
        );
    }

    #[test]
    fn classify_is_relabel_invariant() {
        // Same D4 star with permuted ids.
        let star = DualGraph::new(
            vec![
                Vertex::new(7, 1),
                Vertex::new(2, 1),
                Vertex::new(9, 1),
                Vertex::new(4, 1),
            ],
            vec![
                Edge {
                    id: EdgeId(0),
                    tail: vid(9),
                    head: vid(7),
                },
                Edge {
                    id: EdgeId(1),
                    tail: vid(9),
                    head: vid(2),
                },
                Edge {
                    id: EdgeId(2),
                    tail: vid(9),
                    head: vid(4),
                },
            ],
        )
        .unwrap();
        let full = CurveClass::from_coeffs([(vid(7), 1), (vid(2), 1), (vid(9), 1), (vid(4), 1)]);
        assert_eq!(
            classify(&star, &full).unwrap(),
            Classification::AdeTree(AdeKind::D(4))
        );
    }

    #[test]
    fn class_arith_examples() {
        let g = DualGraph::chain_graph(2, 1);
        let _ = g;
        let gamma = CurveClass::from_coeffs([(vid(0), 2), (vid(1), 2)]);
        let a = class_arith(&gamma, 0).unwrap();
        assert_eq!(a.gcd_n_gamma, 2);
        assert_eq!(a.divisors, vec![1, 2]);

        let gamma = CurveClass::from_coeffs([(vid(0), 3), (vid(1), 1)]);
        let a = class_arith(&gamma, 5).unwrap();
        assert!(a.is_primitive);
        assert_eq!(a.divisors, vec![1]);

        let gamma = CurveClass::single(vid(0), 6);
        let a = class_arith(&gamma, 4).unwrap();
        assert_eq!(a.gcd_n_gamma, 2);
        assert_eq!(a.divisors, vec![1, 2]);
    }

    #[test]
    fn induced_subgraph_genus_monotone() {
        let i3 = DualGraph::cycle_graph(3, 1);
        let sub = i3.induced_subgraph(&BTreeSet::from([vid(0), vid(1)]));
        assert!(sub.is_connected());
        assert!(sub.genus().unwrap() <= i3.genus().unwrap());
    }
}
