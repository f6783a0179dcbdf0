//! Normal models presented through their minimal desingularization: a
//! regular semi-stable dual graph (the top) together with the set of its
//! components that are contracted to points (the exceptional locus).

use std::collections::BTreeSet;

use crate::diagnostics::Diagnostics;
use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::ids::VertexId;
use crate::moves::{base_change, contract, contract_with, desingularize, splitting_index, ContractionTrace, LegPolicy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    top: DualGraph,
    exceptional: BTreeSet<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullResult {
    pub hull: DualGraph,
    pub trace: ContractionTrace,
    /// Exceptional components that survive; all have positive degree.
    pub kept_exceptional: BTreeSet<VertexId>,
}

/// Builds a model, checking that `top` is regular and that `exceptional`
/// is the exceptional locus of a minimal desingularization.
pub fn make_model(top: DualGraph, exceptional: BTreeSet<VertexId>) -> Result<Model> {
    let mut d = top.validate();
    if !d.is_empty() {
        return Err(Error::Invalid(d));
    }
    for (&id, e) in top.edges() {
        if e.thickness != 1 {
            d.push(
                "not-regular",
                [id.to_string()],
                format!("edge {id} has thickness {}; the top of a model is regular", e.thickness),
            );
        }
    }
    for &v in &exceptional {
        if top.num_legs_at(v) > 0 {
            d.push("marked-exceptional", [v.to_string()], format!("exceptional {v} carries a leg"));
        }
    }
    d.extend(exceptional_rules(&top, &exceptional));
    d.into_result()?;
    Ok(Model { top, exceptional })
}

/// Builds a marked model. Legs may sit on exceptional components, the top
/// may carry edge markings and thick edges; both are resolved by
/// [`stable_marked_hull`].
pub fn make_marked_model(top: DualGraph, exceptional: BTreeSet<VertexId>) -> Result<Model> {
    let d = top.validate();
    if !d.is_empty() {
        return Err(Error::Invalid(d));
    }
    exceptional_rules(&top, &exceptional).into_result()?;
    Ok(Model { top, exceptional })
}

fn exceptional_rules(top: &DualGraph, exceptional: &BTreeSet<VertexId>) -> Diagnostics {
    let mut d = Diagnostics::new();
    for &v in exceptional {
        let Ok(genus) = top.genus(v) else {
            d.push("unknown-vertex", [v.to_string()], format!("exceptional {v} is not a vertex"));
            continue;
        };
        if genus == 0 && top.valence(v) == 1 && top.num_legs_at(v) == 0 {
            d.push(
                "(-1)-in-exceptional",
                [v.to_string()],
                format!("exceptional {v} is a (-1)-curve; the desingularization is not minimal"),
            );
        }
    }
    if exceptional.iter().all(|v| top.contains_vertex(*v)) {
        if let Some(comp) = top.component_inside(exceptional) {
            d.push(
                "full-component-exceptional",
                comp.iter().map(|v| v.to_string()),
                "a whole connected component is exceptional",
            );
        }
    }
    d
}

impl Model {
    pub fn top(&self) -> &DualGraph {
        &self.top
    }

    pub fn exceptional(&self) -> &BTreeSet<VertexId> {
        &self.exceptional
    }

    /// The exceptional (-2)-curves: genus 0, meeting the rest in two points.
    pub fn minus_two_curves(&self) -> BTreeSet<VertexId> {
        self.exceptional
            .iter()
            .copied()
            .filter(|&v| self.top.genus(v).is_ok_and(|g| g == 0) && self.top.valence(v) == 2)
            .collect()
    }
}

/// Contracts the (-2)-curves of the exceptional locus.
pub fn stable_hull(m: &Model) -> Result<HullResult> {
    let victims = m.minus_two_curves();
    let (hull, trace) = contract(&m.top, &victims)?;
    let kept_exceptional: BTreeSet<VertexId> = m.exceptional.difference(&victims).copied().collect();
    for &v in &kept_exceptional {
        if hull.omega_degree(v, false)? <= 0 {
            return Err(Error::Internal(format!("kept exceptional {v} has non-positive degree")));
        }
    }
    Ok(HullResult { hull, trace, kept_exceptional })
}

pub fn is_relatively_minimal(m: &Model) -> bool {
    m.exceptional.iter().all(|&v| m.top.omega_degree(v, false).is_ok_and(|d| d > 0))
}

/// Scales the base by `e` and presents the result through its minimal
/// desingularization: the new chain components join the exceptional locus.
pub fn base_change_model(m: &Model, e: u64) -> Result<Model> {
    let scaled = base_change(&m.top, e)?;
    let (top, inserted, _) = desingularize(&scaled)?;
    let exceptional = m.exceptional.union(&inserted).copied().collect();
    Ok(Model { top, exceptional })
}

/// Stable marked hull. Edge markings must sit at integral positions (else
/// the error carries the base change index that makes them integral); they
/// are first turned into legs by resolving their nodes, then every
/// exceptional component of non-positive marked degree is contracted.
///
/// The returned trace is relative to the resolved top.
pub fn stable_marked_hull(m: &Model) -> Result<HullResult> {
    let d = splitting_index(&m.top)?;
    if d > 1 {
        return Err(Error::NonIntegralMarking { splitting_index: d });
    }
    let (resolved, inserted, _) = desingularize(&m.top)?;
    let exceptional: BTreeSet<VertexId> = m.exceptional.union(&inserted).copied().collect();
    let marked_degree = |g: &DualGraph, v: VertexId| g.omega_degree(v, true);

    let mut victims = BTreeSet::new();
    for &v in &exceptional {
        if marked_degree(&resolved, v)? <= 0 {
            victims.insert(v);
        }
    }
    let (hull, trace) = contract_with(&resolved, &victims, LegPolicy::Transfer)?;
    let kept_exceptional: BTreeSet<VertexId> = exceptional.difference(&victims).copied().collect();
    for &v in &kept_exceptional {
        if marked_degree(&hull, v)? <= 0 {
            return Err(Error::Internal(format!(
                "exceptional {v} became contractible after the first pass"
            )));
        }
    }
    Ok(HullResult { hull, trace, kept_exceptional })
}

/// Contracts components of non-positive marked degree until every
/// component has positive degree.
pub fn stable_marked_model(g: &DualGraph) -> Result<DualGraph> {
    stable_marked_model_by(g, |candidates| candidates[0])
}

/// Same as [`stable_marked_model`] with a caller-chosen contraction order.
pub fn stable_marked_model_by(
    g: &DualGraph,
    mut choose: impl FnMut(&[VertexId]) -> VertexId,
) -> Result<DualGraph> {
    g.ensure_valid()?;
    if !g.edge_markings().is_empty() {
        return Err(Error::precondition(
            "edge-markings-present",
            g.edge_markings().keys().map(|m| m.to_string()),
            "markings must be legs; base change and desingularize first",
        ));
    }
    let genus = g.arithmetic_genus()? as i64;
    let euler = 2 * genus - 2 + g.legs().len() as i64;
    if euler < 1 {
        return Err(Error::precondition(
            "unstable-type",
            [],
            format!("2g - 2 + #legs = {euler} < 1; no stable marked model exists"),
        ));
    }
    let mut cur = g.clone();
    loop {
        let mut candidates = Vec::new();
        for v in cur.vertex_ids() {
            if cur.omega_degree(v, true)? <= 0 {
                candidates.push(v);
            }
        }
        if candidates.is_empty() {
            return Ok(cur);
        }
        let v = choose(&candidates);
        cur = contract_with(&cur, &BTreeSet::from([v]), LegPolicy::Transfer)?.0;
    }
}

/// Smallest model dominating both inputs, for models sharing their top.
pub fn join_models(m1: &Model, m2: &Model) -> Result<Model> {
    if m1.top != m2.top {
        return Err(Error::precondition(
            "different-top",
            [],
            "joins are computed on a common desingularization",
        ));
    }
    Ok(Model {
        top: m1.top.clone(),
        exceptional: m1.exceptional.intersection(&m2.exceptional).copied().collect(),
    })
}
