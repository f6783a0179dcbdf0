//! Finite morphisms of semi-stable models as harmonic morphisms of dual
//! graphs.
//!
//! A [`CoverDatum`] records, for a finite morphism `X → Y` of semi-stable
//! models, where each component and node of `X_s` goes, the degree `d_v` of
//! each component map and the common ramification index (dilation) `d_e` of
//! the two branches at each node. The combinatorial laws are:
//!
//! * thickness: `thickness(image(e)) = d_e · thickness(e)`;
//! * harmonicity: at every source vertex `v` and every target edge `y` at
//!   the image of `v`, the dilations of the edges at `v` over `y` sum to
//!   `d_v` per branch of `y` (twice for loops);
//! * degree: over every target vertex, the `d_v` sum to the global degree;
//! * marked: every source leg lies over a target leg, and over each target
//!   leg every source component above its carrier has legs whose local
//!   degrees sum to `d_v`.

mod marked;
mod quotient;
mod stable;

use std::collections::{BTreeMap, BTreeSet};

use crate::diagnostics::Diagnostics;
use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::ids::{EdgeId, LegId, VertexId};
use crate::moves::base_change;

pub use marked::{target_stable_marked_cover, target_stable_marked_model};
pub use quotient::{edge_stabilizer_orders, quotient_by_action, Automorphism, GroupAction};
pub use stable::{
    contract_cover_vertex, infinite_auto_certificate, is_stable_cover, qualifying_vertices,
    stable_hull_of_cover, stable_hull_of_cover_with, stable_model_of_cover, stable_model_of_cover_by,
    stable_model_of_cover_with, CoverStep, Exceptional, StableOptions, StepKind,
};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoverDatum {
    pub source: DualGraph,
    pub target: DualGraph,
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
    pub vertex_degree: BTreeMap<VertexId, u64>,
    pub edge_dilation: BTreeMap<EdgeId, u64>,
    pub global_degree: u64,
    pub leg_map: BTreeMap<LegId, LegId>,
    /// Local degree at each source leg; missing entries default to 1.
    pub leg_degree: BTreeMap<LegId, u64>,
}

impl CoverDatum {
    /// The identity cover of `g`.
    pub fn identity(g: &DualGraph) -> CoverDatum {
        CoverDatum {
            source: g.clone(),
            target: g.clone(),
            vertex_map: g.vertex_ids().map(|v| (v, v)).collect(),
            edge_map: g.edges().keys().map(|&e| (e, e)).collect(),
            vertex_degree: g.vertex_ids().map(|v| (v, 1)).collect(),
            edge_dilation: g.edges().keys().map(|&e| (e, 1)).collect(),
            global_degree: 1,
            leg_map: g.legs().keys().map(|&l| (l, l)).collect(),
            leg_degree: BTreeMap::new(),
        }
    }

    pub fn preimages(&self, w: VertexId) -> Vec<VertexId> {
        self.vertex_map.iter().filter(|(_, &t)| t == w).map(|(&s, _)| s).collect()
    }

    pub fn is_marked(&self) -> bool {
        !self.source.legs().is_empty() || !self.target.legs().is_empty() || !self.leg_map.is_empty()
    }

    pub fn leg_degree_of(&self, l: LegId) -> u64 {
        self.leg_degree.get(&l).copied().unwrap_or(1)
    }

    /// The same cover with all markings forgotten.
    pub fn without_legs(&self) -> CoverDatum {
        let mut c = self.clone();
        for l in self.source.legs().keys() {
            c.source.remove_leg(*l);
        }
        for l in self.target.legs().keys() {
            c.target.remove_leg(*l);
        }
        c.leg_map.clear();
        c.leg_degree.clear();
        c
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        validate_cover(self).into_result()
    }
}

fn subset_sum_reaches(values: &[u64], goal: u64) -> bool {
    let mut reachable = BTreeSet::from([0u64]);
    for &v in values {
        let next: Vec<u64> = reachable.iter().map(|r| r + v).filter(|&s| s <= goal).collect();
        reachable.extend(next);
    }
    reachable.contains(&goal)
}

/// Every violated cover law, with element ids.
pub fn validate_cover(c: &CoverDatum) -> Diagnostics {
    let mut d = c.source.validate().prefixed("source:");
    d.extend(c.target.validate().prefixed("target:"));
    if !d.is_empty() {
        return d;
    }
    let (s, t) = (&c.source, &c.target);

    for (&v, &w) in &c.vertex_map {
        if !s.contains_vertex(v) || !t.contains_vertex(w) {
            d.push("unknown-id", [v.to_string(), w.to_string()], format!("vertex map entry {v} -> {w}"));
        }
    }
    for v in s.vertex_ids() {
        if !c.vertex_map.contains_key(&v) {
            d.push("vertex-map-total", [v.to_string()], format!("source vertex {v} has no image"));
        }
        match c.vertex_degree.get(&v) {
            Some(&k) if k > 0 => {}
            _ => d.push("vertex-degree-positive", [v.to_string()], format!("source vertex {v} needs a positive degree")),
        }
    }
    let hit: BTreeSet<VertexId> = c.vertex_map.values().copied().collect();
    for w in t.vertex_ids() {
        if !hit.contains(&w) {
            d.push("vertex-map-surjective", [w.to_string()], format!("target vertex {w} has no preimage"));
        }
    }
    for (&e, &y) in &c.edge_map {
        if s.edge(e).is_none() || t.edge(y).is_none() {
            d.push("unknown-id", [e.to_string(), y.to_string()], format!("edge map entry {e} -> {y}"));
        }
    }
    for &e in s.edges().keys() {
        if !c.edge_map.contains_key(&e) {
            d.push("edge-map-total", [e.to_string()], format!("source edge {e} has no image"));
        }
        match c.edge_dilation.get(&e) {
            Some(&k) if k > 0 => {}
            _ => d.push("dilation-positive", [e.to_string()], format!("source edge {e} needs a positive dilation")),
        }
    }
    if c.global_degree == 0 {
        d.push("global-degree-positive", [], "the global degree must be positive");
    }
    if !d.is_empty() {
        return d;
    }

    for (&e, se) in s.edges() {
        let y = c.edge_map[&e];
        let te = t.edge(y).unwrap();
        let mut imgs = [c.vertex_map[&se.ends[0]], c.vertex_map[&se.ends[1]]];
        let mut ends = te.ends;
        imgs.sort();
        ends.sort();
        if imgs != ends {
            d.push(
                "edge-map-endpoints",
                [e.to_string(), y.to_string()],
                format!("{e} lies over {} and {} but {y} joins {} and {}", imgs[0], imgs[1], ends[0], ends[1]),
            );
            continue;
        }
        let dil = c.edge_dilation[&e];
        if te.thickness != dil * se.thickness {
            d.push(
                "thickness-law",
                [e.to_string(), y.to_string()],
                format!("thickness({y}) = {} but {dil} * thickness({e}) = {}", te.thickness, dil * se.thickness),
            );
        }
    }
    if !d.is_empty() {
        return d;
    }

    for v in s.vertex_ids() {
        let w = c.vertex_map[&v];
        let dv = c.vertex_degree[&v];
        let mut over: BTreeMap<EdgeId, (u64, Vec<u64>)> = BTreeMap::new();
        for h in s.half_edges_at(v) {
            let e = h.edge;
            let entry = over.entry(c.edge_map[&e]).or_default();
            let dil = c.edge_dilation[&e];
            if s.edge(e).unwrap().is_loop() {
                // Each loop at v shows up twice; count one branch per visit.
                entry.0 += dil;
                if h.side == 0 {
                    entry.1.push(0);
                }
            } else {
                entry.0 += dil;
                entry.1.push(dil);
            }
        }
        for th in t.half_edges_at(w) {
            if th.side == 1 && t.edge(th.edge).unwrap().is_loop() {
                continue;
            }
            let y = th.edge;
            let mult = if t.edge(y).unwrap().is_loop() { 2 } else { 1 };
            let (sum, _) = over.get(&y).cloned().unwrap_or_default();
            if sum != mult * dv {
                d.push(
                    "harmonicity",
                    [v.to_string(), y.to_string()],
                    format!("dilations at {v} over {y} sum to {sum}, expected {}", mult * dv),
                );
                continue;
            }
            if mult == 2 {
                // Loop branches must split evenly: non-loop source edges land
                // on one branch each, source loops on both.
                let loops_at_v: u64 = s
                    .edges()
                    .iter()
                    .filter(|(id, e)| e.is_loop() && e.ends[0] == v && c.edge_map[id] == y)
                    .map(|(id, _)| c.edge_dilation[id])
                    .sum();
                let singles: Vec<u64> = s
                    .edges()
                    .iter()
                    .filter(|(id, e)| !e.is_loop() && e.ends.contains(&v) && c.edge_map[id] == y)
                    .map(|(id, _)| c.edge_dilation[id])
                    .collect();
                if loops_at_v > dv || !subset_sum_reaches(&singles, dv - loops_at_v) {
                    d.push(
                        "harmonicity",
                        [v.to_string(), y.to_string()],
                        format!("branches at {v} over the loop {y} cannot each carry degree {dv}"),
                    );
                }
            }
        }
    }

    let mut fiber_degree: BTreeMap<VertexId, u64> = BTreeMap::new();
    for (&v, &w) in &c.vertex_map {
        *fiber_degree.entry(w).or_default() += c.vertex_degree[&v];
    }
    for w in t.vertex_ids() {
        let total = fiber_degree.get(&w).copied().unwrap_or(0);
        if total != c.global_degree {
            d.push(
                "degree-law",
                [w.to_string()],
                format!("degrees over {w} sum to {total}, global degree is {}", c.global_degree),
            );
        }
    }

    if c.is_marked() {
        validate_marked(c, &mut d);
    }
    d
}

fn validate_marked(c: &CoverDatum, d: &mut Diagnostics) {
    let (s, t) = (&c.source, &c.target);
    for (&l, &n) in &c.leg_map {
        if !s.legs().contains_key(&l) || !t.legs().contains_key(&n) {
            d.push("unknown-id", [l.to_string(), n.to_string()], format!("leg map entry {l} -> {n}"));
        }
    }
    for (&l, &k) in &c.leg_degree {
        if !s.legs().contains_key(&l) || k == 0 {
            d.push("leg-degree-positive", [l.to_string()], format!("leg degree entry for {l} is invalid"));
        }
    }
    for (&l, &v) in s.legs() {
        let Some(&n) = c.leg_map.get(&l) else {
            d.push("leg-map-total", [l.to_string()], format!("source leg {l} lies over no target leg"));
            continue;
        };
        if let Some(&w) = t.legs().get(&n) {
            if c.vertex_map[&v] != w {
                d.push(
                    "leg-map-vertex",
                    [l.to_string(), n.to_string()],
                    format!("{l} sits on {v} but {n} sits on {w}, not its image"),
                );
            }
        }
    }
    let hit: BTreeSet<LegId> = c.leg_map.values().copied().collect();
    for (&n, &w) in t.legs() {
        if !hit.contains(&n) {
            d.push("leg-map-surjective", [n.to_string()], format!("target leg {n} has no preimage"));
            continue;
        }
        for v in c.preimages(w) {
            let above: Vec<LegId> = c
                .leg_map
                .iter()
                .filter(|(l, &m)| m == n && s.legs().get(l) == Some(&v))
                .map(|(&l, _)| l)
                .collect();
            if above.is_empty() {
                d.push(
                    "marked-preimage",
                    [v.to_string(), n.to_string()],
                    format!("{v} lies over the carrier of {n} but has no leg over it"),
                );
                continue;
            }
            let sum: u64 = above.iter().map(|&l| c.leg_degree_of(l)).sum();
            let dv = c.vertex_degree[&v];
            if sum != dv {
                let defaulted = above.iter().any(|l| !c.leg_degree.contains_key(l));
                let rule = if defaulted && sum < dv { "leg-degree-unspecified" } else { "leg-degree-sum" };
                d.push(
                    rule,
                    [v.to_string(), n.to_string()],
                    format!("local degrees of legs at {v} over {n} sum to {sum}, expected {dv}"),
                );
            }
        }
    }
}

/// Scales source and target by the same ramification index; dilations and
/// degrees are unchanged.
pub fn base_change_cover(c: &CoverDatum, e: u64) -> Result<CoverDatum> {
    if e == 0 {
        return Err(Error::ZeroIndex);
    }
    c.ensure_valid()?;
    Ok(CoverDatum {
        source: base_change(&c.source, e)?,
        target: base_change(&c.target, e)?,
        ..c.clone()
    })
}

/// `(2g(v) - 2) - d_v (2g(w) - 2) - Σ_{e at v} (d_e - 1)`: the ramification
/// left for smooth points of `v` by tame Riemann-Hurwitz. Negative values
/// mean the datum is not realizable by a tame cover.
pub fn rh_defect(c: &CoverDatum, v: VertexId) -> Result<i64> {
    c.ensure_valid()?;
    let w = *c.vertex_map.get(&v).ok_or(Error::UnknownVertex(v))?;
    let gv = c.source.genus(v)? as i64;
    let gw = c.target.genus(w)? as i64;
    let dv = c.vertex_degree[&v] as i64;
    let nodes: i64 = c
        .source
        .half_edges_at(v)
        .iter()
        .map(|h| c.edge_dilation[&h.edge] as i64 - 1)
        .sum();
    Ok((2 * gv - 2) - dv * (2 * gw - 2) - nodes)
}

/// [`rh_defect`] with the marked points also accounted for: zero exactly
/// when the component map is unramified away from nodes and legs.
pub fn marked_rh_defect(c: &CoverDatum, v: VertexId) -> Result<i64> {
    let base = rh_defect(c, v)?;
    let legs: i64 = c.source.legs_at(v).iter().map(|&l| c.leg_degree_of(l) as i64 - 1).sum();
    Ok(base - legs)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Target d1(g0) - d2(g1) with a thickness-3 node; source c1(g0) - c2(g2)
    /// with a unit node of dilation 3, everything of degree 3.
    pub(crate) fn stable_g() -> CoverDatum {
        let source = DualGraph::new().with_vertex(1, 0).with_vertex(2, 2).with_edge(0, 1, 2, 1);
        let target = DualGraph::new().with_vertex(1, 0).with_vertex(2, 1).with_edge(0, 1, 2, 3);
        CoverDatum {
            source,
            target,
            vertex_map: [(VertexId(1), VertexId(1)), (VertexId(2), VertexId(2))].into(),
            edge_map: [(EdgeId(0), EdgeId(0))].into(),
            vertex_degree: [(VertexId(1), 3), (VertexId(2), 3)].into(),
            edge_dilation: [(EdgeId(0), 3)].into(),
            global_degree: 3,
            ..Default::default()
        }
    }

    #[test]
    fn identity_cover_is_valid() {
        let g = DualGraph::new()
            .with_vertex(0, 1)
            .with_vertex(1, 0)
            .with_edge(0, 0, 1, 2)
            .with_edge(1, 1, 1, 1)
            .with_leg(3, 1);
        assert!(validate_cover(&CoverDatum::identity(&g)).is_empty());
    }

    #[test]
    fn thickness_law_boundary() {
        let mut c = stable_g();
        assert!(validate_cover(&c).is_empty());
        c.target.set_thickness(EdgeId(0), 2);
        assert!(validate_cover(&c).has_rule("thickness-law"));
    }

    #[test]
    fn degree_law_boundary() {
        let mut c = stable_g();
        c.vertex_degree.insert(VertexId(1), 1);
        c.edge_dilation.insert(EdgeId(0), 1);
        c.target.set_thickness(EdgeId(0), 1);
        let d = validate_cover(&c);
        assert!(d.has_rule("degree-law"));
        assert!(d.has_rule("harmonicity"));
    }

    #[test]
    fn two_sheets_over_degree_three() {
        let g = DualGraph::new().with_vertex(0, 1);
        let source = DualGraph::new().with_vertex(0, 1).with_vertex(1, 1);
        let c = CoverDatum {
            source,
            target: g,
            vertex_map: [(VertexId(0), VertexId(0)), (VertexId(1), VertexId(0))].into(),
            vertex_degree: [(VertexId(0), 1), (VertexId(1), 1)].into(),
            global_degree: 3,
            ..Default::default()
        };
        assert_eq!(validate_cover(&c).rules(), vec!["degree-law"]);
    }

    #[test]
    fn loop_branches_must_split_evenly() {
        // Degree-2 vertex over a loop with source edges of dilation 1 and 3:
        // the total matches 2 * d_v but no branch split carries 2 on each side.
        let target = DualGraph::new().with_vertex(0, 0).with_vertex(1, 2).with_edge(0, 0, 0, 3).with_edge(1, 0, 1, 2);
        let source = DualGraph::new()
            .with_vertex(0, 0)
            .with_vertex(2, 0)
            .with_vertex(1, 2)
            .with_edge(0, 0, 2, 3)
            .with_edge(1, 0, 2, 1)
            .with_edge(2, 0, 1, 1)
            .with_edge(3, 2, 1, 1);
        let c = CoverDatum {
            source,
            target,
            vertex_map: [(VertexId(0), VertexId(0)), (VertexId(2), VertexId(0)), (VertexId(1), VertexId(1))].into(),
            edge_map: [(EdgeId(0), EdgeId(0)), (EdgeId(1), EdgeId(0)), (EdgeId(2), EdgeId(1)), (EdgeId(3), EdgeId(1))].into(),
            vertex_degree: [(VertexId(0), 2), (VertexId(2), 2), (VertexId(1), 4)].into(),
            edge_dilation: [(EdgeId(0), 1), (EdgeId(1), 3), (EdgeId(2), 2), (EdgeId(3), 2)].into(),
            global_degree: 4,
            ..Default::default()
        };
        let d = validate_cover(&c);
        assert_eq!(d.rules(), vec!["harmonicity", "harmonicity"]);
    }

    #[test]
    fn marked_condition_rules() {
        let g = DualGraph::new().with_vertex(0, 2).with_leg(0, 0);
        let mut c = CoverDatum {
            source: DualGraph::new().with_vertex(0, 3).with_leg(0, 0),
            target: g,
            vertex_map: [(VertexId(0), VertexId(0))].into(),
            vertex_degree: [(VertexId(0), 2)].into(),
            global_degree: 2,
            leg_map: [(LegId(0), LegId(0))].into(),
            ..Default::default()
        };
        assert_eq!(validate_cover(&c).rules(), vec!["leg-degree-unspecified"]);
        c.leg_degree.insert(LegId(0), 2);
        assert!(validate_cover(&c).is_empty());
        c.leg_degree.insert(LegId(0), 3);
        assert_eq!(validate_cover(&c).rules(), vec!["leg-degree-sum"]);
        c.leg_map.clear();
        c.leg_degree.clear();
        let rules = validate_cover(&c).rules();
        assert!(rules.contains(&"leg-map-total"));
        assert!(rules.contains(&"leg-map-surjective"));
    }

    #[test]
    fn base_change_cover_examples() {
        let c = stable_g();
        assert_eq!(base_change_cover(&c, 1).unwrap(), c);
        assert!(validate_cover(&base_change_cover(&c, 5).unwrap()).is_empty());
        assert!(matches!(base_change_cover(&c, 0), Err(Error::ZeroIndex)));
    }

    #[test]
    fn rh_defect_examples() {
        // Double cover of a two-vertex cycle by a two-vertex cycle, ramified
        // at both nodes.
        let cyc = DualGraph::new()
            .with_vertex(0, 0)
            .with_vertex(1, 2)
            .with_edge(0, 0, 1, 2)
            .with_edge(1, 0, 1, 2);
        let src = DualGraph::new()
            .with_vertex(0, 0)
            .with_vertex(1, 3)
            .with_edge(0, 0, 1, 1)
            .with_edge(1, 0, 1, 1);
        let c = CoverDatum {
            source: src,
            target: cyc.clone(),
            vertex_map: [(VertexId(0), VertexId(0)), (VertexId(1), VertexId(1))].into(),
            edge_map: [(EdgeId(0), EdgeId(0)), (EdgeId(1), EdgeId(1))].into(),
            vertex_degree: [(VertexId(0), 2), (VertexId(1), 2)].into(),
            edge_dilation: [(EdgeId(0), 2), (EdgeId(1), 2)].into(),
            global_degree: 2,
            ..Default::default()
        };
        assert!(validate_cover(&c).is_empty());
        assert_eq!(rh_defect(&c, VertexId(0)).unwrap(), 0);

        let id = CoverDatum::identity(&cyc);
        for v in cyc.vertex_ids() {
            assert_eq!(rh_defect(&id, v).unwrap(), 0);
        }

        let bad = CoverDatum {
            source: DualGraph::new().with_vertex(0, 0),
            target: DualGraph::new().with_vertex(0, 1),
            vertex_map: [(VertexId(0), VertexId(0))].into(),
            vertex_degree: [(VertexId(0), 1)].into(),
            global_degree: 1,
            ..Default::default()
        };
        assert_eq!(rh_defect(&bad, VertexId(0)).unwrap(), -2);
    }
}
