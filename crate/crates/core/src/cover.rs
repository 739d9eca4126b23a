//! Cyclic covers of dual graphs. The m-fold cover along a loop is cut along
//! one edge of the loop: sheets are glued trivially everywhere except across
//! the cut edge, where the sheet index shifts by one.

use crate::error::Result;
use crate::graph::{CurveClass, DualGraph, Edge, EdgeId, LoopClass, Vertex, VertexId};
use std::collections::{BTreeMap, BTreeSet};

/// A lift of a base class, with multiplicity 1 or, when lifts are grouped by
/// the deck action, the size of its orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lift {
    pub class: CurveClass,
    pub multiplicity: u64,
}

#[derive(Debug, Clone)]
pub struct CoverGraph {
    pub base: DualGraph,
    pub m: u32,
    pub graph: DualGraph,
    pub cut: EdgeId,
    /// Sheet carrying the lifted divisor. Sheet 0 unless overridden.
    pub h_sheet: u32,
    base_vpos: BTreeMap<VertexId, u32>,
    nb: u32,
}

/// Build the m-fold cyclic cover of `g` along `loop_class`, with the lifted
/// divisor on sheet 0.
pub fn build_cover(g: &DualGraph, loop_class: &LoopClass, m: u32) -> Result<CoverGraph> {
    build_cover_with_sheet(g, loop_class, m, 0)
}

/// Same as `build_cover` but placing the lifted divisor on a chosen sheet.
pub fn build_cover_with_sheet(
    g: &DualGraph,
    loop_class: &LoopClass,
    m: u32,
    h_sheet: u32,
) -> Result<CoverGraph> {
    assert!(m >= 1, "covering degree must be positive");
    let nb = g.num_vertices() as u32;
    let base_vpos: BTreeMap<VertexId, u32> = g
        .vertices
        .iter()
        .enumerate()
        .map(|(pos, v)| (v.id, pos as u32))
        .collect();

    let mut vertices = Vec::with_capacity((nb * m) as usize);
    for sheet in 0..m {
        for v in &g.vertices {
            vertices.push(Vertex {
                id: VertexId(sheet * nb + base_vpos[&v.id]),
                omega_deg: v.omega_deg,
                h_deg: if sheet == h_sheet % m { v.h_deg } else { 0 },
                rational: v.rational,
            });
        }
    }

    let ne = g.num_edges() as u32;
    let mut edges = Vec::with_capacity((ne * m) as usize);
    for sheet in 0..m {
        for (pos, e) in g.edges.iter().enumerate() {
            let shift = if e.id == loop_class.cut { 1 } else { 0 };
            edges.push(Edge {
                id: EdgeId(sheet * ne + pos as u32),
                tail: VertexId(sheet * nb + base_vpos[&e.tail]),
                head: VertexId(((sheet + shift) % m) * nb + base_vpos[&e.head]),
            });
        }
    }

    let graph = DualGraph::new(vertices, edges)?;
    Ok(CoverGraph {
        base: g.clone(),
        m,
        graph,
        cut: loop_class.cut,
        h_sheet: h_sheet % m,
        base_vpos,
        nb,
    })
}

impl CoverGraph {
    pub fn cover_vertex(&self, base: VertexId, sheet: u32) -> VertexId {
        VertexId((sheet % self.m) * self.nb + self.base_vpos[&base])
    }

    /// (base vertex, sheet) of a cover vertex.
    pub fn split_vertex(&self, cv: VertexId) -> (VertexId, u32) {
        let sheet = cv.0 / self.nb;
        let pos = cv.0 % self.nb;
        let base = *self
            .base_vpos
            .iter()
            .find(|&(_, &p)| p == pos)
            .expect("cover vertex over a base vertex")
            .0;
        (base, sheet)
    }

    /// The deck translate of a cover class by `g` sheets.
    pub fn deck_translate(&self, class: &CurveClass, g: u32) -> CurveClass {
        CurveClass::from_coeffs(class.iter().map(|(cv, a)| {
            let (b, sheet) = self.split_vertex(cv);
            (self.cover_vertex(b, sheet + g), a)
        }))
    }

    /// σ_*γ̃: sum the fiber coefficients.
    pub fn pushforward(&self, class: &CurveClass) -> CurveClass {
        let mut coeffs: BTreeMap<VertexId, u64> = BTreeMap::new();
        for (cv, a) in class.iter() {
            let (b, _) = self.split_vertex(cv);
            *coeffs.entry(b).or_insert(0) += a;
        }
        CurveClass::from_coeffs(coeffs)
    }

    /// γ̃ · H̃, using the sheet carrying the lifted divisor.
    pub fn lift_h_pairing(&self, class: &CurveClass) -> u64 {
        class.h_pairing(&self.graph)
    }

    /// All γ̃ with σ_*γ̃ = γ. With `connected_only`, only lifts whose support
    /// induces a connected subgraph of the cover. With `up_to_deck`, one
    /// canonical representative per deck orbit, carrying its orbit size.
    pub fn enumerate_lifts(
        &self,
        gamma: &CurveClass,
        connected_only: bool,
        up_to_deck: bool,
    ) -> Vec<Lift> {
        let mut lifts = if connected_only {
            self.connected_lifts(gamma)
        } else {
            self.all_lifts(gamma)
        };
        lifts.sort();
        if !up_to_deck {
            return lifts
                .into_iter()
                .map(|class| Lift {
                    class,
                    multiplicity: 1,
                })
                .collect();
        }
        let mut seen: BTreeSet<CurveClass> = BTreeSet::new();
        let mut out = Vec::new();
        for class in lifts {
            if seen.contains(&class) {
                continue;
            }
            let orbit: BTreeSet<CurveClass> =
                (0..self.m).map(|g| self.deck_translate(&class, g)).collect();
            let rep = orbit.iter().next().unwrap().clone();
            let multiplicity = orbit.len() as u64;
            seen.extend(orbit);
            out.push(Lift {
                class: rep,
                multiplicity,
            });
        }
        out.sort_by(|a, b| a.class.cmp(&b.class));
        out
    }

    fn all_lifts(&self, gamma: &CurveClass) -> Vec<CurveClass> {
        let supp: Vec<(VertexId, u64)> = gamma.iter().collect();
        let mut out = vec![CurveClass::zero()];
        for &(v, a) in &supp {
            let comps = compositions(a, self.m as usize);
            let mut next = Vec::with_capacity(out.len() * comps.len());
            for partial in &out {
                for comp in &comps {
                    let piece = CurveClass::from_coeffs(
                        comp.iter()
                            .enumerate()
                            .filter(|&(_, &c)| c > 0)
                            .map(|(i, &c)| (self.cover_vertex(v, i as u32), c)),
                    );
                    next.push(partial.add(&piece));
                }
            }
            out = next;
        }
        out
    }

    /// Connected lifts via connected support subsets: enumerate connected
    /// vertex subsets of the cover over supp(γ) whose fiber counts fit the
    /// multidegrees, then distribute each multidegree by positive
    /// compositions. Avoids the stars-and-bars blowup of full enumeration.
    fn connected_lifts(&self, gamma: &CurveClass) -> Vec<CurveClass> {
        if gamma.is_zero() {
            return vec![CurveClass::zero()];
        }
        let base_supp = gamma.support();
        let allowed: Vec<VertexId> = (0..self.m)
            .flat_map(|sheet| base_supp.iter().map(move |&v| self.cover_vertex(v, sheet)))
            .collect();
        let allowed_set: BTreeSet<VertexId> = allowed.iter().copied().collect();
        let adj = {
            let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = allowed
                .iter()
                .map(|&v| (v, BTreeSet::new()))
                .collect();
            for e in &self.graph.edges {
                if allowed_set.contains(&e.tail) && allowed_set.contains(&e.head) && e.tail != e.head
                {
                    adj.get_mut(&e.tail).unwrap().insert(e.head);
                    adj.get_mut(&e.head).unwrap().insert(e.tail);
                }
            }
            adj
        };
        let d_total = gamma.d();
        let mut subsets: Vec<BTreeSet<VertexId>> = Vec::new();
        let mut order: Vec<VertexId> = allowed.clone();
        order.sort();
        for (i, &anchor) in order.iter().enumerate() {
            let banned: BTreeSet<VertexId> = order[..i].iter().copied().collect();
            let mut cur = BTreeSet::from([anchor]);
            let mut ext: Vec<VertexId> = adj[&anchor]
                .iter()
                .copied()
                .filter(|v| !banned.contains(v))
                .collect();
            self.grow_subsets(gamma, d_total, &adj, &banned, &mut cur, &mut ext, &mut subsets);
        }

        let mut out = Vec::new();
        for s in subsets {
            // Per base vertex: which cover copies were chosen.
            let mut fiber: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
            for &cv in &s {
                let (b, _) = self.split_vertex(cv);
                fiber.entry(b).or_default().push(cv);
            }
            if fiber.len() != base_supp.len() {
                continue;
            }
            let mut choices = vec![CurveClass::zero()];
            let mut ok = true;
            for (b, copies) in &fiber {
                let a = gamma.coeff(*b);
                if (copies.len() as u64) > a {
                    ok = false;
                    break;
                }
                let comps = positive_compositions(a, copies.len());
                let mut next = Vec::with_capacity(choices.len() * comps.len());
                for partial in &choices {
                    for comp in &comps {
                        let piece = CurveClass::from_coeffs(
                            copies.iter().copied().zip(comp.iter().copied()),
                        );
                        next.push(partial.add(&piece));
                    }
                }
                choices = next;
            }
            if ok {
                out.extend(choices);
            }
        }
        out
    }

    fn grow_subsets(
        &self,
        gamma: &CurveClass,
        d_total: u64,
        adj: &BTreeMap<VertexId, BTreeSet<VertexId>>,
        banned: &BTreeSet<VertexId>,
        cur: &mut BTreeSet<VertexId>,
        ext: &mut Vec<VertexId>,
        out: &mut Vec<BTreeSet<VertexId>>,
    ) {
        // Fiber-count feasibility: each chosen copy needs coefficient >= 1.
        let mut counts: BTreeMap<VertexId, u64> = BTreeMap::new();
        for &cv in cur.iter() {
            let (b, _) = self.split_vertex(cv);
            *counts.entry(b).or_insert(0) += 1;
        }
        if counts.iter().any(|(b, &c)| c > gamma.coeff(*b)) {
            return;
        }
        let candidate = ext.iter().position(|v| !cur.contains(v));
        match candidate {
            None => out.push(cur.clone()),
            Some(pos) => {
                let v = ext[pos];
                // Branch 1: include v.
                if (cur.len() as u64) < d_total {
                    cur.insert(v);
                    let mut ext2: Vec<VertexId> = ext.clone();
                    ext2.extend(
                        adj[&v]
                            .iter()
                            .copied()
                            .filter(|w| !banned.contains(w) && !cur.contains(w)),
                    );
                    self.grow_subsets(gamma, d_total, adj, banned, cur, &mut ext2, out);
                    cur.remove(&v);
                }
                // Branch 2: exclude v for the rest of this subtree.
                let mut ext2: Vec<VertexId> = ext
                    .iter()
                    .copied()
                    .filter(|&w| w != v)
                    .collect();
                let mut banned2 = banned.clone();
                banned2.insert(v);
                self.grow_subsets(gamma, d_total, adj, &banned2, cur, &mut ext2, out);
            }
        }
    }
}

/// All ways to write `a` as an ordered sum of `parts` non-negative integers.
pub fn compositions(a: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 0 {
        return if a == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![a]];
    }
    let mut out = Vec::new();
    for first in 0..=a {
        for mut rest in compositions(a - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All ways to write `a` as an ordered sum of `parts` positive integers.
pub fn positive_compositions(a: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 0 || a < parts as u64 {
        return if parts == 0 && a == 0 {
            vec![vec![]]
        } else {
            vec![]
        };
    }
    compositions(a - parts as u64, parts)
        .into_iter()
        .map(|c| c.into_iter().map(|x| x + 1).collect())
        .collect()
}
