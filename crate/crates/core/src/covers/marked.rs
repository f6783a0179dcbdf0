use super::CoverDatum;
use crate::canon::canonicalize;
use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::ids::VertexId;
use crate::models::stable_marked_model;
use crate::moves::LegPolicy;

use super::stable::contract_cover_vertex;

/// Stable marked model of the target of a marked cover, computed through
/// the cover: each target component of non-positive marked degree is
/// contracted together with its preimage. The cover must be a morphism at
/// every step, i.e. each preimage must itself be contractible; when it is
/// not, a verification error names the offending components.
///
/// The target must satisfy `2g - 2 + #legs > 1`.
pub fn target_stable_marked_model(c: &CoverDatum) -> Result<DualGraph> {
    Ok(target_stable_marked_cover(c)?.target)
}

/// [`target_stable_marked_model`] keeping the contracted source and maps.
pub fn target_stable_marked_cover(c: &CoverDatum) -> Result<CoverDatum> {
    c.ensure_valid()?;
    for g in [&c.source, &c.target] {
        if !g.edge_markings().is_empty() {
            return Err(Error::precondition(
                "edge-markings-present",
                g.edge_markings().keys().map(|m| m.to_string()),
                "markings must be legs",
            ));
        }
    }
    let genus = c.target.arithmetic_genus()? as i64;
    c.source.arithmetic_genus()?;
    let euler = 2 * genus - 2 + c.target.legs().len() as i64;
    if euler <= 1 {
        return Err(Error::precondition(
            "unstable-type-target",
            [],
            format!("target has 2g - 2 + #legs = {euler}, need more than 1"),
        ));
    }

    let mut cur = c.clone();
    loop {
        let mut next = None;
        for w in cur.target.vertex_ids() {
            if cur.target.omega_degree(w, true)? <= 0 {
                next = Some(w);
                break;
            }
        }
        let Some(w) = next else { break };
        let bad: Vec<VertexId> = cur
            .preimages(w)
            .into_iter()
            .filter(|&v| cur.source.omega_degree(v, true).map_or(true, |d| d > 0))
            .collect();
        if !bad.is_empty() {
            return Err(Error::Verification(format!(
                "contracting {w} downstairs but its preimages {bad:?} have positive marked degree"
            )));
        }
        cur = contract_cover_vertex(&cur, w, LegPolicy::Transfer)?.0;
    }

    let direct = stable_marked_model(&c.target)?;
    if canonicalize(&direct) != canonicalize(&cur.target) {
        return Err(Error::Internal("target contraction disagrees with the direct stable marked model".into()));
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::validate_cover;
    use crate::ids::{EdgeId, LegId, VertexId as V};

    #[test]
    fn unramified_double_cover_of_a_marked_tail() {
        // Target: genus-2 component with a rational tail carrying one leg.
        // Source: the tail is covered by two disjoint copies, each carrying
        // one leg, both attached to a genus-3 component.
        let target = DualGraph::new()
            .with_vertex(0, 2)
            .with_vertex(1, 0)
            .with_edge(0, 0, 1, 1)
            .with_leg(0, 1);
        let source = DualGraph::new()
            .with_vertex(0, 3)
            .with_vertex(1, 0)
            .with_vertex(2, 0)
            .with_edge(0, 0, 1, 1)
            .with_edge(1, 0, 2, 1)
            .with_leg(0, 1)
            .with_leg(1, 2);
        let c = CoverDatum {
            source,
            target,
            vertex_map: [(V(0), V(0)), (V(1), V(1)), (V(2), V(1))].into(),
            edge_map: [(EdgeId(0), EdgeId(0)), (EdgeId(1), EdgeId(0))].into(),
            vertex_degree: [(V(0), 2), (V(1), 1), (V(2), 1)].into(),
            edge_dilation: [(EdgeId(0), 1), (EdgeId(1), 1)].into(),
            global_degree: 2,
            leg_map: [(LegId(0), LegId(0)), (LegId(1), LegId(0))].into(),
            ..Default::default()
        };
        assert!(validate_cover(&c).is_empty());
        let out = target_stable_marked_cover(&c).unwrap();
        assert_eq!(target_stable_marked_model(&c).unwrap(), out.target);
        assert_eq!(out.target.num_vertices(), 1);
        assert_eq!(out.target.legs()[&LegId(0)], V(0));
        assert_eq!(out.source.num_legs_at(V(0)), 2);
        assert!(validate_cover(&out).is_empty());
    }

    #[test]
    fn non_morphism_is_reported() {
        // A genus-1 source component over a rational tail.
        let target = DualGraph::new().with_vertex(0, 2).with_vertex(1, 0).with_edge(0, 0, 1, 2);
        let source = DualGraph::new().with_vertex(0, 3).with_vertex(1, 1).with_edge(0, 0, 1, 1);
        let c = CoverDatum {
            source,
            target,
            vertex_map: [(V(0), V(0)), (V(1), V(1))].into(),
            edge_map: [(EdgeId(0), EdgeId(0))].into(),
            vertex_degree: [(V(0), 2), (V(1), 2)].into(),
            edge_dilation: [(EdgeId(0), 2)].into(),
            global_degree: 2,
            ..Default::default()
        };
        assert!(validate_cover(&c).is_empty());
        assert!(matches!(target_stable_marked_model(&c), Err(Error::Verification(_))));
    }

    #[test]
    fn identity_of_stable_marked_graph_and_unstable_type() {
        let g = DualGraph::new().with_vertex(0, 1).with_vertex(1, 0).with_edge(0, 0, 1, 1).with_leg(0, 1).with_leg(1, 1);
        assert_eq!(target_stable_marked_model(&CoverDatum::identity(&g)).unwrap(), g);
        let one = DualGraph::new().with_vertex(0, 1).with_leg(0, 0);
        let err = target_stable_marked_model(&CoverDatum::identity(&one)).unwrap_err();
        assert_eq!(err.rule(), "unstable-type-target");
    }
}
