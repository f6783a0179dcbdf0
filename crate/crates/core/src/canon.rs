//! Canonical forms up to isomorphism.
//!
//! Every structure (graph, model, cover) is first flattened into a
//! [`Structure`]: labelled nodes joined by labelled directed arcs. The
//! canonical form is the lexicographically least encoding over the leaves of
//! an individualization-refinement search tree. Transpositions of twin nodes
//! (same label, same arcs) are automorphisms, so only one twin per cell is
//! individualized.

use std::collections::{BTreeMap, BTreeSet};

use crate::covers::CoverDatum;
use crate::graph::{DualGraph, Position};
use crate::ids::VertexId;

/// Labelled nodes and labelled directed arcs.
#[derive(Clone, Debug, Default)]
pub struct Structure {
    labels: Vec<String>,
    arcs: Vec<(usize, usize, String)>,
}

impl Structure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, label: impl Into<String>) -> usize {
        self.labels.push(label.into());
        self.labels.len() - 1
    }

    pub fn arc(&mut self, from: usize, to: usize, label: impl Into<String>) {
        self.arcs.push((from, to, label.into()));
    }

    pub fn canonical_form(&self) -> String {
        Search::new(self).run()
    }
}

struct Search {
    n: usize,
    node_label: Vec<u32>,
    node_dict: Vec<String>,
    arc_dict: Vec<String>,
    /// Per node: sorted (direction, other, label) with direction 0 = out, 1 = in.
    incident: Vec<Vec<(u8, usize, u32)>>,
    arcs: Vec<(usize, usize, u32)>,
}

impl Search {
    fn new(s: &Structure) -> Self {
        let node_dict: Vec<String> =
            s.labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let arc_dict: Vec<String> =
            s.arcs.iter().map(|a| a.2.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let rank = |dict: &[String], l: &str| dict.binary_search_by(|x| x.as_str().cmp(l)).unwrap() as u32;
        let n = s.labels.len();
        let node_label = s.labels.iter().map(|l| rank(&node_dict, l)).collect();
        let arcs: Vec<(usize, usize, u32)> =
            s.arcs.iter().map(|(a, b, l)| (*a, *b, rank(&arc_dict, l))).collect();
        let mut incident = vec![Vec::new(); n];
        for &(a, b, l) in &arcs {
            incident[a].push((0, b, l));
            incident[b].push((1, a, l));
        }
        for list in &mut incident {
            list.sort_unstable();
        }
        Search { n, node_label, node_dict, arc_dict, incident, arcs }
    }

    fn run(&self) -> String {
        let mut initial: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for v in 0..self.n {
            initial.entry(self.node_label[v]).or_default().push(v);
        }
        let cells: Vec<Vec<usize>> = initial.into_values().collect();
        let cells = self.refine(cells);
        let mut best: Option<Vec<u32>> = None;
        self.descend(cells, &mut best);
        let code = best.unwrap_or_default();
        let body: Vec<String> = code.iter().map(|x| x.to_string()).collect();
        format!(
            "N[{}]A[{}]C[{}]",
            self.node_dict.join("|"),
            self.arc_dict.join("|"),
            body.join(",")
        )
    }

    fn refine(&self, mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let mut cell_of = vec![0usize; self.n];
        loop {
            for (i, c) in cells.iter().enumerate() {
                for &v in c {
                    cell_of[v] = i;
                }
            }
            let mut next = Vec::with_capacity(cells.len());
            let mut changed = false;
            for c in &cells {
                if c.len() == 1 {
                    next.push(c.clone());
                    continue;
                }
                let mut groups: BTreeMap<Vec<(u8, usize, u32)>, Vec<usize>> = BTreeMap::new();
                for &v in c {
                    let mut sig: Vec<(u8, usize, u32)> =
                        self.incident[v].iter().map(|&(d, o, l)| (d, cell_of[o], l)).collect();
                    sig.sort_unstable();
                    groups.entry(sig).or_default().push(v);
                }
                if groups.len() > 1 {
                    changed = true;
                }
                next.extend(groups.into_values());
            }
            cells = next;
            if !changed {
                return cells;
            }
        }
    }

    fn descend(&self, cells: Vec<Vec<usize>>, best: &mut Option<Vec<u32>>) {
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            let code = self.encode(&cells);
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
            return;
        };
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cells[target] {
            if tried.iter().any(|&u| self.are_twins(u, v)) {
                continue;
            }
            tried.push(v);
            let mut split = cells.clone();
            let rest: Vec<usize> = split[target].iter().copied().filter(|&x| x != v).collect();
            split[target] = vec![v];
            split.insert(target + 1, rest);
            self.descend(self.refine(split), best);
        }
    }

    /// Whether swapping `u` and `v` is an automorphism.
    fn are_twins(&self, u: usize, v: usize) -> bool {
        if self.node_label[u] != self.node_label[v] {
            return false;
        }
        let swap = |x: usize| if x == u { v } else if x == v { u } else { x };
        let mut mapped: Vec<(u8, usize, u32)> =
            self.incident[u].iter().map(|&(d, o, l)| (d, swap(o), l)).collect();
        mapped.sort_unstable();
        mapped == self.incident[v]
    }

    fn encode(&self, cells: &[Vec<usize>]) -> Vec<u32> {
        let mut pos = vec![0u32; self.n];
        for (i, c) in cells.iter().enumerate() {
            pos[c[0]] = i as u32;
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| pos[v]);
        let mut code: Vec<u32> = Vec::with_capacity(1 + self.n + 3 * self.arcs.len());
        code.push(self.n as u32);
        code.extend(order.iter().map(|&v| self.node_label[v]));
        let mut arcs: Vec<(u32, u32, u32)> =
            self.arcs.iter().map(|&(a, b, l)| (pos[a], pos[b], l)).collect();
        arcs.sort_unstable();
        for (a, b, l) in arcs {
            code.extend([a, b, l]);
        }
        code
    }
}

fn positions_label(mut ps: Vec<Position>) -> String {
    ps.sort();
    let parts: Vec<String> = ps.iter().map(|p| format!("{}/{}", p.numer(), p.denom())).collect();
    parts.join(";")
}

/// Adds one node per vertex and per edge of `g`, labels prefixed by `tag`.
/// Returns the node index of each vertex and edge.
pub(crate) fn add_graph(
    s: &mut Structure,
    g: &DualGraph,
    tag: &str,
    vertex_extra: &dyn Fn(VertexId) -> String,
    legs_as_counts: bool,
) -> (BTreeMap<VertexId, usize>, BTreeMap<crate::ids::EdgeId, usize>) {
    let mut vnode = BTreeMap::new();
    for (&v, d) in g.vertices() {
        let legs = if legs_as_counts { g.num_legs_at(v) } else { 0 };
        vnode.insert(v, s.node(format!("{tag}V g{} l{} {}", d.genus, legs, vertex_extra(v))));
    }
    let mut enode = BTreeMap::new();
    for (&id, e) in g.edges() {
        let n = s.node(format!("{tag}E t{}", e.thickness));
        enode.insert(id, n);
        let offsets: Vec<Position> = g
            .edge_markings()
            .values()
            .filter(|m| m.edge == id)
            .map(|m| g.marking_offset(m).unwrap())
            .collect();
        let t = Position::from_integer(e.thickness as i64);
        let from_end0 = positions_label(offsets.clone());
        let from_end1 = positions_label(offsets.iter().map(|&p| t - p).collect());
        s.arc(n, vnode[&e.ends[0]], format!("inc {from_end0}"));
        s.arc(n, vnode[&e.ends[1]], format!("inc {from_end1}"));
    }
    (vnode, enode)
}

/// Canonical byte string of a dual graph: equal iff the graphs are
/// isomorphic preserving genera, thicknesses, leg counts and marking
/// positions.
pub fn canonicalize(g: &DualGraph) -> String {
    let mut s = Structure::new();
    add_graph(&mut s, g, "", &|_| String::new(), true);
    s.canonical_form()
}

/// Canonical string of a graph together with a distinguished vertex set
/// (the exceptional locus of a model).
pub fn canonicalize_marked_set(g: &DualGraph, set: &BTreeSet<VertexId>) -> String {
    let mut s = Structure::new();
    add_graph(&mut s, g, "", &|v| if set.contains(&v) { "x".into() } else { String::new() }, true);
    s.canonical_form()
}

/// Canonical string of a cover, optionally with exceptional loci on both
/// sides. Records degrees, dilations and the leg correspondence.
pub fn canonicalize_cover(
    c: &CoverDatum,
    ex: Option<(&BTreeSet<VertexId>, &BTreeSet<VertexId>)>,
) -> String {
    let flag = |set: Option<&BTreeSet<VertexId>>, v: VertexId| {
        if set.is_some_and(|s| s.contains(&v)) {
            "x"
        } else {
            ""
        }
    };
    let mut s = Structure::new();
    s.node(format!("N{}", c.global_degree));
    let (tv, te) = add_graph(&mut s, &c.target, "t", &|v| flag(ex.map(|e| e.1), v).to_string(), false);
    let degree = |v: VertexId| format!("d{}{}", c.vertex_degree.get(&v).copied().unwrap_or(0), flag(ex.map(|e| e.0), v));
    let (sv, se) = add_graph(&mut s, &c.source, "s", &degree, false);
    for (v, w) in &c.vertex_map {
        if let (Some(&a), Some(&b)) = (sv.get(v), tv.get(w)) {
            s.arc(a, b, "map");
        }
    }
    for (e, y) in &c.edge_map {
        if let (Some(&a), Some(&b)) = (se.get(e), te.get(y)) {
            s.arc(a, b, format!("dil {}", c.edge_dilation.get(e).copied().unwrap_or(0)));
        }
    }
    let mut tl = BTreeMap::new();
    for (&n, w) in c.target.legs() {
        let node = s.node("tL");
        s.arc(node, tv[w], "at");
        tl.insert(n, node);
    }
    for (&l, v) in c.source.legs() {
        let node = s.node(format!("sL d{}", c.leg_degree_of(l)));
        s.arc(node, sv[v], "at");
        if let Some(&t) = c.leg_map.get(&l).and_then(|n| tl.get(n)) {
            s.arc(node, t, "map");
        }
    }
    s.canonical_form()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle3(genera: [u32; 3], t: [u64; 3]) -> DualGraph {
        DualGraph::new()
            .with_vertex(0, genera[0])
            .with_vertex(1, genera[1])
            .with_vertex(2, genera[2])
            .with_edge(0, 0, 1, t[0])
            .with_edge(1, 1, 2, t[1])
            .with_edge(2, 2, 0, t[2])
    }

    #[test]
    fn rotations_agree() {
        assert_eq!(
            canonicalize(&cycle3([0, 0, 1], [1, 1, 1])),
            canonicalize(&cycle3([0, 1, 0], [1, 1, 1]))
        );
    }

    #[test]
    fn different_thickness_multisets_differ() {
        assert_ne!(
            canonicalize(&cycle3([0, 0, 0], [1, 1, 2])),
            canonicalize(&cycle3([0, 0, 0], [1, 2, 2]))
        );
    }

    #[test]
    fn marking_side_matters() {
        let base = DualGraph::new().with_vertex(0, 0).with_vertex(1, 2).with_edge(0, 0, 1, 3);
        let near0 = base.clone().with_edge_marking(0, 0, 0, Position::from_integer(1));
        let near1 = base.clone().with_edge_marking(0, 0, 1, Position::from_integer(1));
        let near0_again = base.with_edge_marking(5, 0, 1, Position::from_integer(2));
        assert_ne!(canonicalize(&near0), canonicalize(&near1));
        assert_eq!(canonicalize(&near0), canonicalize(&near0_again));
    }

    #[test]
    fn symmetric_structures_terminate_quickly() {
        // Twelve parallel edges and a long cycle: twin pruning keeps this small.
        let mut g = DualGraph::new().with_vertex(0, 0).with_vertex(1, 0);
        for e in 0..12 {
            g = g.with_edge(e, 0, 1, 1);
        }
        let mut c = DualGraph::new();
        for v in 0..10 {
            c = c.with_vertex(v, 0).with_edge(v, v, (v + 1) % 10, 1);
        }
        assert!(!canonicalize(&g).is_empty());
        assert!(!canonicalize(&c).is_empty());
    }

    #[test]
    fn cover_forms_see_degrees() {
        let g = cycle3([0, 1, 2], [1, 1, 1]);
        let id = CoverDatum::identity(&g);
        let mut other = id.clone();
        other.vertex_degree.insert(VertexId(0), 2);
        assert_ne!(canonicalize_cover(&id, None), canonicalize_cover(&other, None));
        assert_eq!(canonicalize_cover(&id, None), canonicalize_cover(&id.clone(), None));
    }
}
