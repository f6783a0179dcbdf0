//! Dual graphs of semi-stable fibers.
//!
//! A [`DualGraph`] has one vertex per irreducible component (labelled by its
//! geometric genus), one edge per node, legs for markings that specialize to
//! the smooth locus and edge markings for those that specialize into the
//! interior of a node's resolution chain. Every edge carries a thickness: the
//! valuation `t` of the local equation `uv = π^t` of its node.
//!
//! Half-edges are implicit: edge `e` owns `(e, 0)` at `ends[0]` and `(e, 1)`
//! at `ends[1]`. A loop has both half-edges at the same vertex and therefore
//! contributes 2 to the valence.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;

use crate::diagnostics::Diagnostics;
use crate::error::{Error, Result};
use crate::ids::{EdgeId, HalfEdge, LegId, MarkingId, VertexId};

/// Exact rational position along an edge, in units of the base valuation.
pub type Position = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexData {
    pub genus: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub ends: [VertexId; 2],
    pub thickness: u64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }

    /// The end opposite to `v`; for a loop this is `v` again.
    pub fn other_end(&self, v: VertexId) -> VertexId {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeMarking {
    pub edge: EdgeId,
    /// Orientation anchor: the position is measured from this end.
    pub from: VertexId,
    pub position: Position,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DualGraph {
    vertices: BTreeMap<VertexId, VertexData>,
    edges: BTreeMap<EdgeId, Edge>,
    legs: BTreeMap<LegId, VertexId>,
    edge_markings: BTreeMap<MarkingId, EdgeMarking>,
}

impl DualGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertex(mut self, id: u32, genus: u32) -> Self {
        self.insert_vertex(VertexId(id), genus);
        self
    }

    pub fn with_edge(mut self, id: u32, a: u32, b: u32, thickness: u64) -> Self {
        self.insert_edge(EdgeId(id), VertexId(a), VertexId(b), thickness);
        self
    }

    pub fn with_leg(mut self, id: u32, v: u32) -> Self {
        self.insert_leg(LegId(id), VertexId(v));
        self
    }

    pub fn with_edge_marking(mut self, id: u32, edge: u32, from: u32, position: Position) -> Self {
        self.insert_edge_marking(
            MarkingId(id),
            EdgeMarking { edge: EdgeId(edge), from: VertexId(from), position },
        );
        self
    }

    pub fn insert_vertex(&mut self, id: VertexId, genus: u32) {
        self.vertices.insert(id, VertexData { genus });
    }

    pub fn insert_edge(&mut self, id: EdgeId, a: VertexId, b: VertexId, thickness: u64) {
        self.edges.insert(id, Edge { ends: [a, b], thickness });
    }

    pub fn insert_leg(&mut self, id: LegId, v: VertexId) {
        self.legs.insert(id, v);
    }

    pub fn insert_edge_marking(&mut self, id: MarkingId, marking: EdgeMarking) {
        self.edge_markings.insert(id, marking);
    }

    pub fn remove_vertex(&mut self, id: VertexId) -> Option<VertexData> {
        self.vertices.remove(&id)
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Option<Edge> {
        self.edges.remove(&id)
    }

    pub fn remove_leg(&mut self, id: LegId) -> Option<VertexId> {
        self.legs.remove(&id)
    }

    pub fn remove_edge_marking(&mut self, id: MarkingId) -> Option<EdgeMarking> {
        self.edge_markings.remove(&id)
    }

    pub fn set_thickness(&mut self, id: EdgeId, thickness: u64) {
        if let Some(e) = self.edges.get_mut(&id) {
            e.thickness = thickness;
        }
    }

    pub fn set_genus(&mut self, id: VertexId, genus: u32) {
        if let Some(v) = self.vertices.get_mut(&id) {
            v.genus = genus;
        }
    }

    pub fn vertices(&self) -> &BTreeMap<VertexId, VertexData> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeMap<EdgeId, Edge> {
        &self.edges
    }

    pub fn legs(&self) -> &BTreeMap<LegId, VertexId> {
        &self.legs
    }

    pub fn edge_markings(&self) -> &BTreeMap<MarkingId, EdgeMarking> {
        &self.edge_markings
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    pub fn genus(&self, v: VertexId) -> Result<u32> {
        self.vertices.get(&v).map(|d| d.genus).ok_or(Error::UnknownVertex(v))
    }

    pub fn edge(&self, e: EdgeId) -> Option<&Edge> {
        self.edges.get(&e)
    }

    /// Half-edges attached to `v`, in ascending order.
    pub fn half_edges_at(&self, v: VertexId) -> Vec<HalfEdge> {
        let mut out = Vec::new();
        for (&id, e) in &self.edges {
            for side in 0..2u8 {
                if e.ends[side as usize] == v {
                    out.push(HalfEdge { edge: id, side });
                }
            }
        }
        out
    }

    pub fn vertex_of(&self, h: HalfEdge) -> Option<VertexId> {
        self.edges.get(&h.edge).map(|e| e.ends[h.side as usize])
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.edges
            .values()
            .map(|e| e.ends.iter().filter(|&&x| x == v).count())
            .sum()
    }

    pub fn legs_at(&self, v: VertexId) -> Vec<LegId> {
        self.legs.iter().filter(|(_, &w)| w == v).map(|(&l, _)| l).collect()
    }

    pub fn num_legs_at(&self, v: VertexId) -> usize {
        self.legs.values().filter(|&&w| w == v).count()
    }

    pub fn max_vertex_id(&self) -> Option<VertexId> {
        self.vertices.keys().next_back().copied()
    }

    pub fn max_edge_id(&self) -> Option<EdgeId> {
        self.edges.keys().next_back().copied()
    }

    /// Position of an edge marking measured from side 0 of its edge.
    pub fn marking_offset(&self, m: &EdgeMarking) -> Option<Position> {
        let e = self.edges.get(&m.edge)?;
        if e.is_loop() || m.from == e.ends[0] {
            Some(m.position)
        } else {
            Some(Position::from_integer(e.thickness as i64) - m.position)
        }
    }

    /// Every invariant violation, empty iff the graph is well formed.
    pub fn validate(&self) -> Diagnostics {
        let mut d = Diagnostics::new();
        for (&id, e) in &self.edges {
            for end in e.ends {
                if !self.vertices.contains_key(&end) {
                    d.push(
                        "unknown-vertex",
                        [id.to_string(), end.to_string()],
                        format!("edge {id} ends at missing vertex {end}"),
                    );
                }
            }
            if e.thickness == 0 {
                d.push(
                    "thickness-positive",
                    [id.to_string()],
                    format!("edge {id} has thickness 0; thicknesses are positive integers"),
                );
            }
        }
        for (&id, &v) in &self.legs {
            if !self.vertices.contains_key(&v) {
                d.push(
                    "unknown-vertex",
                    [id.to_string(), v.to_string()],
                    format!("leg {id} is attached to missing vertex {v}"),
                );
            }
        }
        let mut seen_points: BTreeMap<(EdgeId, Position), MarkingId> = BTreeMap::new();
        for (&id, m) in &self.edge_markings {
            if self.legs.contains_key(&LegId(id.0)) {
                d.push(
                    "id-collision",
                    [id.to_string(), LegId(id.0).to_string()],
                    format!("marking id {} is also used by a leg", id.0),
                );
            }
            let Some(e) = self.edges.get(&m.edge) else {
                d.push(
                    "marking-unknown-edge",
                    [id.to_string(), m.edge.to_string()],
                    format!("marking {id} lies on missing edge {}", m.edge),
                );
                continue;
            };
            if !e.ends.contains(&m.from) {
                d.push(
                    "marking-anchor",
                    [id.to_string(), m.from.to_string()],
                    format!("marking {id} is anchored at {} which is not an end of {}", m.from, m.edge),
                );
                continue;
            }
            let t = Position::from_integer(e.thickness as i64);
            if m.position <= Position::from_integer(0) || m.position >= t {
                d.push(
                    "marking-in-interior",
                    [id.to_string(), m.edge.to_string()],
                    format!(
                        "marking {id} at position {} is not strictly inside (0, {})",
                        m.position, e.thickness
                    ),
                );
                continue;
            }
            let offset = self.marking_offset(m).expect("edge exists");
            if let Some(prev) = seen_points.insert((m.edge, offset), id) {
                d.push(
                    "marking-collision",
                    [prev.to_string(), id.to_string()],
                    format!("markings {prev} and {id} specialize to the same point of {}", m.edge),
                );
            }
        }
        d
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        self.validate().into_result()
    }

    /// Degree of the relative dualizing sheaf on the component `v`:
    /// `2 g(v) - 2 + valence(v)`, plus the number of legs when
    /// `include_markings` is set. Edge markings must have been turned into
    /// legs first.
    pub fn omega_degree(&self, v: VertexId, include_markings: bool) -> Result<i64> {
        let genus = self.genus(v)? as i64;
        let mut deg = 2 * genus - 2 + self.valence(v) as i64;
        if include_markings {
            if !self.edge_markings.is_empty() {
                return Err(Error::precondition(
                    "edge-markings-present",
                    self.edge_markings.keys().map(|m| m.to_string()),
                    "the marked degree counts legs only; base change and desingularize first",
                ));
            }
            deg += self.num_legs_at(v) as i64;
        }
        Ok(deg)
    }

    /// Connected components as vertex sets, ordered by their smallest vertex.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut adjacency: BTreeMap<VertexId, Vec<VertexId>> =
            self.vertices.keys().map(|&v| (v, Vec::new())).collect();
        for e in self.edges.values() {
            if let (true, true) = (
                adjacency.contains_key(&e.ends[0]),
                adjacency.contains_key(&e.ends[1]),
            ) {
                adjacency.get_mut(&e.ends[0]).unwrap().push(e.ends[1]);
                adjacency.get_mut(&e.ends[1]).unwrap().push(e.ends[0]);
            }
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in adjacency.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                if !comp.insert(v) {
                    continue;
                }
                seen.insert(v);
                stack.extend(adjacency[&v].iter().copied().filter(|w| !comp.contains(w)));
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// `b1 + Σ genus(v)`. The graph must be connected.
    pub fn arithmetic_genus(&self) -> Result<u32> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let betti = self.edges.len() + 1 - self.vertices.len();
        let genera: u32 = self.vertices.values().map(|d| d.genus).sum();
        Ok(betti as u32 + genera)
    }

    /// Whether some connected component is entirely contained in `set`.
    pub fn component_inside(&self, set: &BTreeSet<VertexId>) -> Option<BTreeSet<VertexId>> {
        self.components().into_iter().find(|c| c.is_subset(set))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> Position {
        Position::new(p, r)
    }

    #[test]
    fn smooth_irreducible_fiber_is_valid() {
        let g = DualGraph::new().with_vertex(0, 2);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn zero_thickness_is_reported() {
        let g = DualGraph::new().with_vertex(0, 0).with_vertex(1, 1).with_edge(0, 0, 1, 0);
        assert!(g.validate().has_rule("thickness-positive"));
    }

    #[test]
    fn marking_outside_interior_is_reported() {
        let g = DualGraph::new()
            .with_vertex(0, 0)
            .with_vertex(1, 1)
            .with_edge(0, 0, 1, 2)
            .with_edge_marking(7, 0, 0, q(5, 2));
        assert_eq!(g.validate().rules(), vec!["marking-in-interior"]);
    }

    #[test]
    fn colliding_markings_are_reported() {
        // 1/2 from v0 and 3/2 from v1 on a thickness-2 edge are the same point.
        let g = DualGraph::new()
            .with_vertex(0, 0)
            .with_vertex(1, 1)
            .with_edge(0, 0, 1, 2)
            .with_edge_marking(1, 0, 0, q(1, 2))
            .with_edge_marking(2, 0, 1, q(3, 2));
        assert!(g.validate().has_rule("marking-collision"));
    }

    #[test]
    fn leg_and_marking_ids_are_disjoint() {
        let g = DualGraph::new()
            .with_vertex(0, 1)
            .with_vertex(1, 1)
            .with_edge(0, 0, 1, 2)
            .with_leg(4, 0)
            .with_edge_marking(4, 0, 0, q(1, 1));
        assert!(g.validate().has_rule("id-collision"));
    }

    #[test]
    fn omega_degree_examples() {
        let two_neighbors = DualGraph::new()
            .with_vertex(0, 1)
            .with_vertex(1, 0)
            .with_vertex(2, 1)
            .with_edge(0, 0, 1, 1)
            .with_edge(1, 1, 2, 1);
        assert_eq!(two_neighbors.omega_degree(VertexId(1), false).unwrap(), 0);

        let isolated = DualGraph::new().with_vertex(0, 2);
        assert_eq!(isolated.omega_degree(VertexId(0), false).unwrap(), 2);

        let looped = DualGraph::new().with_vertex(0, 0).with_edge(0, 0, 0, 1);
        assert_eq!(looped.omega_degree(VertexId(0), false).unwrap(), 0);

        let legged = DualGraph::new()
            .with_vertex(0, 0)
            .with_vertex(1, 1)
            .with_edge(0, 0, 1, 1)
            .with_leg(0, 0)
            .with_leg(1, 0);
        assert_eq!(legged.omega_degree(VertexId(0), true).unwrap(), 1);
        assert_eq!(legged.omega_degree(VertexId(0), false).unwrap(), -1);
    }

    #[test]
    fn omega_degree_rejects_unknown_vertex_and_edge_markings() {
        let g = DualGraph::new()
            .with_vertex(0, 0)
            .with_vertex(1, 1)
            .with_edge(0, 0, 1, 2)
            .with_edge_marking(3, 0, 0, q(1, 1));
        assert!(matches!(g.omega_degree(VertexId(9), false), Err(Error::UnknownVertex(_))));
        assert_eq!(g.omega_degree(VertexId(0), true).unwrap_err().rule(), "edge-markings-present");
    }

    #[test]
    fn arithmetic_genus_examples() {
        let triangle = DualGraph::new()
            .with_vertex(0, 0)
            .with_vertex(1, 0)
            .with_vertex(2, 0)
            .with_edge(0, 0, 1, 1)
            .with_edge(1, 1, 2, 1)
            .with_edge(2, 2, 0, 1);
        assert_eq!(triangle.arithmetic_genus().unwrap(), 1);
        assert_eq!(DualGraph::new().with_vertex(0, 3).arithmetic_genus().unwrap(), 3);

        let banana = DualGraph::new()
            .with_vertex(0, 1)
            .with_vertex(1, 1)
            .with_edge(0, 0, 1, 1)
            .with_edge(1, 0, 1, 1);
        assert_eq!(banana.arithmetic_genus().unwrap(), 3);
        let omega_sum: i64 = banana.vertex_ids().map(|v| banana.omega_degree(v, false).unwrap()).sum();
        assert_eq!(omega_sum, 2 * 3 - 2);
    }

    #[test]
    fn disconnected_genus_is_an_error() {
        let g = DualGraph::new().with_vertex(0, 1).with_vertex(1, 1);
        assert!(matches!(g.arithmetic_genus(), Err(Error::Disconnected)));
    }
}
