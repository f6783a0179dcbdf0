//! Seeded random instances for property suites.

use std::collections::BTreeSet;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::covers::CoverDatum;
use crate::enumerate::{build_cover, Chooser, GenusRule};
use crate::graph::{DualGraph, EdgeMarking, Position};
use crate::ids::{EdgeId, MarkingId, VertexId};
use crate::models::{make_marked_model, make_model, Model};

pub const DEFAULT_SEED: u64 = 20_240_611;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Adapts an RNG to drive [`build_cover`].
pub struct RandomChooser<'a, R: Rng>(pub &'a mut R);

impl<R: Rng> Chooser for RandomChooser<'_, R> {
    fn pick(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }
}

#[derive(Clone, Debug)]
pub struct GraphParams {
    pub max_vertices: u32,
    pub max_extra_edges: u32,
    pub genus: Range<u32>,
    pub thickness: Range<u64>,
    pub max_legs: u32,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams { max_vertices: 8, max_extra_edges: 3, genus: 0..3, thickness: 1..4, max_legs: 0 }
    }
}

/// A connected graph: a random spanning tree plus extra edges, loops
/// allowed.
pub fn random_graph<R: Rng>(rng: &mut R, p: &GraphParams) -> DualGraph {
    let n = rng.random_range(1..=p.max_vertices.max(1));
    let mut g = DualGraph::new();
    for v in 0..n {
        g.insert_vertex(VertexId(v), rng.random_range(p.genus.clone()));
    }
    let mut e = 0;
    for v in 1..n {
        let parent = rng.random_range(0..v);
        g.insert_edge(EdgeId(e), VertexId(parent), VertexId(v), rng.random_range(p.thickness.clone()));
        e += 1;
    }
    for _ in 0..rng.random_range(0..=p.max_extra_edges) {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        g.insert_edge(EdgeId(e), VertexId(a), VertexId(b), rng.random_range(p.thickness.clone()));
        e += 1;
    }
    for l in 0..rng.random_range(0..=p.max_legs) {
        g.insert_leg(l.into(), VertexId(rng.random_range(0..n)));
    }
    g
}

/// A valid model on a regular top. Genus 0 is favoured so that chains of
/// (-2)-curves are common.
pub fn random_model<R: Rng>(rng: &mut R, max_vertices: u32) -> Model {
    loop {
        let params = GraphParams { max_vertices, genus: 0..1, thickness: 1..2, ..Default::default() };
        let mut top = random_graph(rng, &params);
        for v in top.vertex_ids().collect::<Vec<_>>() {
            if rng.random_bool(0.3) {
                top.set_genus(v, rng.random_range(1..3));
            }
        }
        let mut ex: BTreeSet<VertexId> = top.vertex_ids().filter(|_| rng.random_bool(0.6)).collect();
        ex.retain(|&v| !(top.genus(v).is_ok_and(|g| g == 0) && top.valence(v) == 1));
        if let Ok(m) = make_model(top, ex) {
            return m;
        }
    }
}

/// A marked model whose top carries legs and edge markings at rational
/// positions, with thick edges.
pub fn random_marked_model<R: Rng>(rng: &mut R, max_vertices: u32) -> Model {
    loop {
        let params = GraphParams { max_vertices, max_legs: 2, ..Default::default() };
        let mut top = random_graph(rng, &params);
        let edges: Vec<(EdgeId, crate::graph::Edge)> = top.edges().iter().map(|(&e, &d)| (e, d)).collect();
        for (i, (e, edge)) in edges.iter().enumerate() {
            if !rng.random_bool(0.5) {
                continue;
            }
            let q = rng.random_range(1..5i64);
            let limit = edge.thickness as i64 * q;
            if limit <= 1 {
                continue;
            }
            let p = rng.random_range(1..limit);
            let from = edge.ends[rng.random_range(0..2)];
            let m = EdgeMarking { edge: *e, from, position: Position::new(p, q) };
            top.insert_edge_marking(MarkingId(i as u32), m);
        }
        if !top.is_valid() {
            continue;
        }
        let ex: BTreeSet<VertexId> = top.vertex_ids().filter(|_| rng.random_bool(0.5)).collect();
        if let Ok(m) = make_marked_model(top, ex) {
            return m;
        }
    }
}

/// A cover of a random connected target with at most `max_target`
/// vertices and degree at most `max_degree`; connected source of genus at
/// least 2.
pub fn random_cover<R: Rng>(rng: &mut R, max_target: u32, max_degree: u64) -> CoverDatum {
    loop {
        let params = GraphParams { max_vertices: max_target, max_extra_edges: 2, ..Default::default() };
        let target = random_graph(rng, &params);
        let n = rng.random_range(1..=max_degree);
        let Some(c) = build_cover(&target, n, false, GenusRule::MinimalOrNext, &mut RandomChooser(rng)) else {
            continue;
        };
        if c.source.arithmetic_genus().is_ok_and(|g| g >= 2) {
            return c;
        }
    }
}

/// A marked cover unramified away from nodes and legs, so that the marked
/// dualizing degree upstairs is `d_v` times the one downstairs. The target
/// has `2g - 2 + #legs > 1`.
pub fn random_marked_cover<R: Rng>(rng: &mut R, max_target: u32, max_degree: u64) -> CoverDatum {
    loop {
        let params = GraphParams { max_vertices: max_target, max_extra_edges: 2, max_legs: 3, ..Default::default() };
        let target = random_graph(rng, &params);
        let g = target.arithmetic_genus().unwrap_or(0) as i64;
        if 2 * g - 2 + target.legs().len() as i64 <= 1 {
            continue;
        }
        let n = rng.random_range(1..=max_degree);
        let Some(c) = build_cover(&target, n, true, GenusRule::Unramified, &mut RandomChooser(rng)) else {
            continue;
        };
        if c.source.is_connected() {
            return c;
        }
    }
}
