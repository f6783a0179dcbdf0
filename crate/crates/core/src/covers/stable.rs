//! Stable models and stable hulls of covers, obtained by contracting a
//! target component together with its whole preimage.

use std::collections::BTreeSet;
use std::fmt;

use super::{validate_cover, CoverDatum};
use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::ids::{EdgeId, VertexId};
use crate::moves::{contract_with, Image, LegPolicy};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StableOptions {
    /// Accept source genus 1, asserting potentially good reduction.
    pub genus_one_good_reduction: bool,
}

/// Exceptional loci of the source and target models of a cover, both
/// given on the tops.
#[derive(Clone, Copy, Debug)]
pub struct Exceptional<'a> {
    pub source: &'a BTreeSet<VertexId>,
    pub target: &'a BTreeSet<VertexId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// A bridge component: its two nodes become one.
    Smooth,
    /// A tail: removed together with its node.
    Blowdown,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Smooth => "smooth",
            StepKind::Blowdown => "blowdown",
        })
    }
}

/// One contraction of a target component and its preimage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverStep {
    pub target_vertex: VertexId,
    pub source_vertices: Vec<VertexId>,
    pub kind: StepKind,
}

fn degree(g: &DualGraph, v: VertexId, policy: LegPolicy) -> Result<i64> {
    g.omega_degree(v, policy == LegPolicy::Transfer)
}

/// Target components that can be contracted together with their preimage:
/// non-positive degree upstairs and downstairs, not a whole component, and
/// inside the exceptional loci when those are given.
pub fn qualifying_vertices(
    c: &CoverDatum,
    ex: Option<Exceptional<'_>>,
    policy: LegPolicy,
) -> Result<Vec<VertexId>> {
    let mut out = Vec::new();
    'w: for w in c.target.vertex_ids() {
        if degree(&c.target, w, policy)? > 0 {
            continue;
        }
        if c.target.component_inside(&BTreeSet::from([w])).is_some() {
            continue;
        }
        if let Some(ex) = ex {
            if !ex.target.contains(&w) {
                continue;
            }
        }
        for v in c.preimages(w) {
            if degree(&c.source, v, policy)? > 0 {
                continue 'w;
            }
            if let Some(ex) = ex {
                if !ex.source.contains(&v) {
                    continue 'w;
                }
            }
        }
        out.push(w);
    }
    Ok(out)
}

/// Contracts the target component `w` and all of its preimages, carrying the
/// cover data along. Every preimage must have non-positive degree.
pub fn contract_cover_vertex(c: &CoverDatum, w: VertexId, policy: LegPolicy) -> Result<(CoverDatum, CoverStep)> {
    if !c.target.contains_vertex(w) {
        return Err(Error::UnknownVertex(w));
    }
    let pre = c.preimages(w);
    let kind = match c.target.valence(w) {
        2 => StepKind::Smooth,
        1 => StepKind::Blowdown,
        k => {
            return Err(Error::precondition(
                "omega-positive",
                [w.to_string()],
                format!("{w} has valence {k} and cannot be contracted"),
            ))
        }
    };
    for &u in &pre {
        let val = c.source.valence(u);
        match (kind, val) {
            (StepKind::Blowdown, 1) | (StepKind::Smooth, 2) => {}
            (StepKind::Blowdown, 2) => {
                return Err(Error::precondition(
                    "node-over-smooth-point",
                    [u.to_string(), w.to_string()],
                    format!("contracting {u} would leave a node over a smooth point of the contracted {w}"),
                ))
            }
            _ => {
                return Err(Error::Internal(format!(
                    "{u} over {w} has valence {val}, inconsistent with harmonicity"
                )))
            }
        }
    }

    let (tgt, ttrace) = contract_with(&c.target, &BTreeSet::from([w]), policy)?;
    let victims: BTreeSet<VertexId> = pre.iter().copied().collect();
    let (src, strace) = contract_with(&c.source, &victims, policy)?;

    let mut out = CoverDatum {
        source: src,
        target: tgt,
        global_degree: c.global_degree,
        leg_map: c.leg_map.clone(),
        leg_degree: c.leg_degree.clone(),
        ..Default::default()
    };
    for v in out.source.vertex_ids() {
        out.vertex_map.insert(v, c.vertex_map[&v]);
        out.vertex_degree.insert(v, c.vertex_degree[&v]);
    }
    let new_edges: Vec<EdgeId> = out.source.edges().keys().copied().collect();
    for e in new_edges {
        let parts = strace.preimage_edges(e);
        let mut image = None;
        let mut dilation = None;
        for p in parts {
            let Image::Edge(y) = ttrace.edge_image[&c.edge_map[&p]] else {
                return Err(Error::Internal(format!("edge {p} lies over a contracted component")));
            };
            let dil = c.edge_dilation[&p];
            if image.is_some_and(|i| i != y) || dilation.is_some_and(|d| d != dil) {
                return Err(Error::Internal(format!("merged edge {e} has inconsistent images")));
            }
            image = Some(y);
            dilation = Some(dil);
        }
        let (Some(y), Some(dil)) = (image, dilation) else {
            return Err(Error::Internal(format!("edge {e} has no preimage in the trace")));
        };
        out.edge_map.insert(e, y);
        out.edge_dilation.insert(e, dil);
    }

    let d = validate_cover(&out);
    if !d.is_empty() {
        return Err(Error::Internal(format!("cover laws broken after contracting {w}:\n{d}")));
    }
    for (before, after) in [(&c.source, &out.source), (&c.target, &out.target)] {
        if before.arithmetic_genus().ok() != after.arithmetic_genus().ok() {
            return Err(Error::Internal(format!("arithmetic genus changed while contracting {w}")));
        }
    }
    let step = CoverStep { target_vertex: w, source_vertices: pre, kind };
    Ok((out, step))
}

fn check_genus(c: &CoverDatum, opts: &StableOptions) -> Result<u32> {
    let g = c.source.arithmetic_genus()?;
    c.target.arithmetic_genus()?;
    if g >= 2 || (g == 1 && opts.genus_one_good_reduction) {
        Ok(g)
    } else {
        Err(Error::precondition(
            "genus-too-small",
            [],
            format!("source genus {g}; stable covers need genus at least 2"),
        ))
    }
}

fn run(
    mut c: CoverDatum,
    mut ex: Option<(BTreeSet<VertexId>, BTreeSet<VertexId>)>,
    policy: LegPolicy,
    choose: &mut dyn FnMut(&[VertexId]) -> VertexId,
) -> Result<(CoverDatum, Vec<CoverStep>)> {
    let mut steps = Vec::new();
    loop {
        let view = ex.as_ref().map(|(s, t)| Exceptional { source: s, target: t });
        let candidates = qualifying_vertices(&c, view, policy)?;
        if candidates.is_empty() {
            return Ok((c, steps));
        }
        let w = choose(&candidates);
        if !candidates.contains(&w) {
            return Err(Error::precondition(
                "bad-choice",
                [w.to_string()],
                format!("{w} is not among the contractible components"),
            ));
        }
        let (next, step) = contract_cover_vertex(&c, w, policy)?;
        if let Some((s, t)) = ex.as_mut() {
            t.remove(&w);
            for v in &step.source_vertices {
                s.remove(v);
            }
        }
        steps.push(step);
        c = next;
    }
}

/// Whether every target component of non-positive degree has a preimage of
/// positive degree. Markings are ignored.
pub fn is_stable_cover(c: &CoverDatum) -> Result<bool> {
    c.ensure_valid()?;
    for w in c.target.vertex_ids() {
        if c.target.omega_degree(w, false)? > 0 {
            continue;
        }
        let mut lifted = false;
        for v in c.preimages(w) {
            if c.source.omega_degree(v, false)? > 0 {
                lifted = true;
            }
        }
        if !lifted {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Stable model of a cover: repeatedly contracts target components whose
/// whole fiber is contractible, smallest id first. Markings are forgotten.
pub fn stable_model_of_cover(c: &CoverDatum) -> Result<(CoverDatum, Vec<CoverStep>)> {
    stable_model_of_cover_with(c, &StableOptions::default())
}

pub fn stable_model_of_cover_with(c: &CoverDatum, opts: &StableOptions) -> Result<(CoverDatum, Vec<CoverStep>)> {
    stable_model_of_cover_by(c, opts, &mut |cands| cands[0])
}

/// [`stable_model_of_cover_with`] with a caller-chosen contraction order.
pub fn stable_model_of_cover_by(
    c: &CoverDatum,
    opts: &StableOptions,
    choose: &mut dyn FnMut(&[VertexId]) -> VertexId,
) -> Result<(CoverDatum, Vec<CoverStep>)> {
    c.ensure_valid()?;
    let genus = check_genus(c, opts)?;
    let (out, steps) = run(c.without_legs(), None, LegPolicy::Reject, choose)?;
    if genus >= 2 && !is_stable_cover(&out)? {
        return Err(Error::Internal("contraction stopped before the cover became stable".into()));
    }
    Ok((out, steps))
}

/// Stable hull of a cover of models: contracts target exceptional components
/// whose preimages are all exceptional and contractible. Markings are
/// forgotten.
pub fn stable_hull_of_cover(
    c: &CoverDatum,
    ex_source: &BTreeSet<VertexId>,
    ex_target: &BTreeSet<VertexId>,
) -> Result<(CoverDatum, Vec<CoverStep>)> {
    stable_hull_of_cover_with(c, ex_source, ex_target, &StableOptions::default())
}

pub fn stable_hull_of_cover_with(
    c: &CoverDatum,
    ex_source: &BTreeSet<VertexId>,
    ex_target: &BTreeSet<VertexId>,
    opts: &StableOptions,
) -> Result<(CoverDatum, Vec<CoverStep>)> {
    c.ensure_valid()?;
    for (g, ex, side) in [(&c.source, ex_source, "source"), (&c.target, ex_target, "target")] {
        for &v in ex {
            if !g.contains_vertex(v) {
                return Err(Error::precondition(
                    "unknown-vertex",
                    [v.to_string()],
                    format!("exceptional {v} is not a {side} component"),
                ));
            }
        }
        if let Some(comp) = g.component_inside(ex) {
            return Err(Error::precondition(
                "full-component-exceptional",
                comp.iter().map(|v| v.to_string()),
                format!("a whole {side} component is exceptional"),
            ));
        }
    }
    for (&v, &w) in &c.vertex_map {
        if ex_target.contains(&w) && !ex_source.contains(&v) {
            return Err(Error::precondition(
                "domination-incompatible",
                [v.to_string(), w.to_string()],
                format!("{v} is not exceptional but maps to exceptional {w}"),
            ));
        }
    }
    check_genus(c, opts)?;
    let ex = Some((ex_source.clone(), ex_target.clone()));
    run(c.without_legs(), ex, LegPolicy::Reject, &mut |cands| cands[0])
}

/// A target component of non-positive degree all of whose preimages also
/// have non-positive degree: a witness that the cover is not stable, so
/// that its automorphism group is infinite.
pub fn infinite_auto_certificate(c: &CoverDatum) -> Result<Option<VertexId>> {
    c.ensure_valid()?;
    for w in c.target.vertex_ids() {
        if c.target.omega_degree(w, false)? > 0 {
            continue;
        }
        let mut all = true;
        for v in c.preimages(w) {
            if c.source.omega_degree(v, false)? > 0 {
                all = false;
            }
        }
        if all {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::super::tests::stable_g;
    use super::*;
    use crate::ids::VertexId as V;

    #[test]
    fn stable_g_contracts_in_one_step() {
        let c = stable_g();
        assert!(!is_stable_cover(&c).unwrap());
        assert_eq!(infinite_auto_certificate(&c).unwrap(), Some(V(1)));
        let (out, steps) = stable_model_of_cover(&c).unwrap();
        assert_eq!(steps, vec![CoverStep { target_vertex: V(1), source_vertices: vec![V(1)], kind: StepKind::Blowdown }]);
        assert_eq!(out.source, DualGraph::new().with_vertex(2, 2));
        assert_eq!(out.target, DualGraph::new().with_vertex(2, 1));
        assert_eq!(out.vertex_degree[&V(2)], 3);
        assert!(is_stable_cover(&out).unwrap());
        let (again, none) = stable_model_of_cover(&out).unwrap();
        assert_eq!(again, out);
        assert!(none.is_empty());
    }

    #[test]
    fn degree_two_chain() {
        let target = DualGraph::new()
            .with_vertex(0, 2)
            .with_vertex(1, 0)
            .with_vertex(2, 2)
            .with_edge(0, 0, 1, 1)
            .with_edge(1, 1, 2, 1);
        let source = DualGraph::new()
            .with_vertex(0, 2)
            .with_vertex(2, 2)
            .with_vertex(3, 0)
            .with_vertex(4, 0)
            .with_edge(0, 0, 3, 1)
            .with_edge(1, 0, 4, 1)
            .with_edge(2, 3, 2, 1)
            .with_edge(3, 4, 2, 1);
        let c = CoverDatum {
            source,
            target,
            vertex_map: [(V(0), V(0)), (V(2), V(2)), (V(3), V(1)), (V(4), V(1))].into(),
            edge_map: [(EdgeId(0), EdgeId(0)), (EdgeId(1), EdgeId(0)), (EdgeId(2), EdgeId(1)), (EdgeId(3), EdgeId(1))].into(),
            vertex_degree: [(V(0), 2), (V(2), 2), (V(3), 1), (V(4), 1)].into(),
            edge_dilation: (0..4).map(|e| (EdgeId(e), 1)).collect(),
            global_degree: 2,
            ..Default::default()
        };
        assert!(validate_cover(&c).is_empty());
        let (out, steps) = stable_model_of_cover(&c).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(out.target.num_edges(), 1);
        assert_eq!(out.target.edge(EdgeId(0)).unwrap().thickness, 2);
        assert_eq!(out.source.num_edges(), 2);
        assert!(out.source.edges().values().all(|e| e.thickness == 2 && !e.is_loop()));
        assert!(out.edge_dilation.values().all(|&d| d == 1));
        assert_eq!(out.source.arithmetic_genus().unwrap(), 5);
        assert!(is_stable_cover(&out).unwrap());
    }

    #[test]
    fn genus_one_preimage_keeps_a_bridge() {
        // Target bridge of genus 0 covered by a genus-1 component.
        let target = DualGraph::new()
            .with_vertex(0, 2)
            .with_vertex(1, 0)
            .with_vertex(2, 2)
            .with_edge(0, 0, 1, 2)
            .with_edge(1, 1, 2, 2);
        let source = DualGraph::new()
            .with_vertex(0, 4)
            .with_vertex(1, 1)
            .with_vertex(2, 4)
            .with_edge(0, 0, 1, 1)
            .with_edge(1, 1, 2, 1);
        let c = CoverDatum {
            source,
            target,
            vertex_map: [(V(0), V(0)), (V(1), V(1)), (V(2), V(2))].into(),
            edge_map: [(EdgeId(0), EdgeId(0)), (EdgeId(1), EdgeId(1))].into(),
            vertex_degree: [(V(0), 2), (V(1), 2), (V(2), 2)].into(),
            edge_dilation: [(EdgeId(0), 2), (EdgeId(1), 2)].into(),
            global_degree: 2,
            ..Default::default()
        };
        assert!(validate_cover(&c).is_empty());
        assert!(is_stable_cover(&c).unwrap());
        let ex = BTreeSet::from([V(1)]);
        let (out, steps) = stable_hull_of_cover(&c, &ex, &ex).unwrap();
        assert!(steps.is_empty());
        assert_eq!(out, c);
    }

    /// Inserts a bridge of genus 0 on both sides of the stable example.
    fn subdivided() -> CoverDatum {
        let source = DualGraph::new()
            .with_vertex(1, 0)
            .with_vertex(2, 2)
            .with_vertex(3, 0)
            .with_edge(0, 1, 3, 1)
            .with_edge(1, 3, 2, 2);
        let target = DualGraph::new()
            .with_vertex(1, 0)
            .with_vertex(2, 1)
            .with_vertex(3, 0)
            .with_edge(0, 1, 3, 3)
            .with_edge(1, 3, 2, 6);
        let mut c = stable_g();
        c.source = source;
        c.target = target;
        c.vertex_map.insert(V(3), V(3));
        c.vertex_degree.insert(V(3), 3);
        c.edge_map.insert(EdgeId(1), EdgeId(1));
        c.edge_dilation.insert(EdgeId(1), 3);
        c
    }

    #[test]
    fn bridge_is_smoothed_on_both_sides() {
        let c = subdivided();
        assert!(validate_cover(&c).is_empty());
        assert!(!is_stable_cover(&c).unwrap());
        assert_eq!(infinite_auto_certificate(&c).unwrap(), Some(V(1)));
        let (out, steps) = stable_model_of_cover(&c).unwrap();
        let kinds: Vec<StepKind> = steps.iter().map(|s| s.kind).collect();
        assert_eq!(kinds, vec![StepKind::Blowdown, StepKind::Blowdown]);
        assert_eq!(out, stable_model_of_cover(&stable_g()).unwrap().0);

        // Contracting only the bridge merges the nodes.
        let ex = BTreeSet::from([V(3)]);
        let (bridge, _) = stable_hull_of_cover(&c, &ex, &ex).unwrap();
        assert_eq!(bridge.target.edge(EdgeId(0)).unwrap().thickness, 9);
        assert_eq!(bridge.source.edge(EdgeId(0)).unwrap().thickness, 3);
    }

    #[test]
    fn hull_respects_exceptional_loci() {
        let c = subdivided();
        let none = BTreeSet::new();
        let (same, steps) = stable_hull_of_cover(&c, &none, &none).unwrap();
        assert_eq!(same, c);
        assert!(steps.is_empty());
        let all = BTreeSet::from([V(1), V(3)]);
        let (out, _) = stable_hull_of_cover(&c, &all, &all).unwrap();
        assert_eq!(out, stable_model_of_cover(&c).unwrap().0);
        let ex = BTreeSet::from([V(3)]);
        let err = stable_hull_of_cover(&c, &none, &ex).unwrap_err();
        assert_eq!(err.rule(), "domination-incompatible");
    }

    #[test]
    fn genus_preconditions() {
        let mut c = CoverDatum::identity(&DualGraph::new().with_vertex(0, 1));
        assert_eq!(stable_model_of_cover(&c).unwrap_err().rule(), "genus-too-small");
        let opts = StableOptions { genus_one_good_reduction: true };
        assert!(stable_model_of_cover_with(&c, &opts).is_ok());
        c.source.set_genus(V(0), 0);
        c.target.set_genus(V(0), 0);
        assert_eq!(stable_model_of_cover_with(&c, &opts).unwrap_err().rule(), "genus-too-small");
    }

    #[test]
    fn tail_with_node_over_smooth_point_is_rejected() {
        // Target: genus-2 component with a rational tail. Source: two
        // unramified sheets glued along the tail preimage u of valence 2.
        let target = DualGraph::new().with_vertex(0, 2).with_vertex(1, 0).with_edge(0, 0, 1, 1);
        let source = DualGraph::new()
            .with_vertex(0, 2)
            .with_vertex(1, 2)
            .with_vertex(2, 0)
            .with_edge(0, 0, 2, 1)
            .with_edge(1, 1, 2, 1);
        let c = CoverDatum {
            source,
            target,
            vertex_map: [(V(0), V(0)), (V(1), V(0)), (V(2), V(1))].into(),
            edge_map: [(EdgeId(0), EdgeId(0)), (EdgeId(1), EdgeId(0))].into(),
            vertex_degree: [(V(0), 1), (V(1), 1), (V(2), 2)].into(),
            edge_dilation: [(EdgeId(0), 1), (EdgeId(1), 1)].into(),
            global_degree: 2,
            ..Default::default()
        };
        assert!(validate_cover(&c).is_empty());
        assert_eq!(stable_model_of_cover(&c).unwrap_err().rule(), "node-over-smooth-point");
    }

    #[test]
    fn order_does_not_matter_on_a_chain() {
        // Two bridges in a row on both sides.
        let source = DualGraph::new()
            .with_vertex(0, 2)
            .with_vertex(1, 0)
            .with_vertex(2, 0)
            .with_vertex(3, 1)
            .with_edge(0, 0, 1, 1)
            .with_edge(1, 1, 2, 1)
            .with_edge(2, 2, 3, 1);
        let c = CoverDatum::identity(&source);
        let (a, _) = stable_model_of_cover(&c).unwrap();
        let (b, _) = stable_model_of_cover_by(&c, &StableOptions::default(), &mut |cs| *cs.last().unwrap()).unwrap();
        assert_eq!(crate::canon::canonicalize(&a.source), crate::canon::canonicalize(&b.source));
        assert_eq!(a.source.num_vertices(), 2);
    }
}
