//! Elementary moves on dual graphs: contraction of components with
//! non-positive dualizing degree, minimal desingularization of thick nodes,
//! and ramified base change.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::graph::{DualGraph, EdgeMarking, Position};
use crate::ids::{EdgeId, LegId, MarkingId, VertexId};

/// Where an element of the contracted graph ended up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Image {
    Vertex(VertexId),
    Edge(EdgeId),
}

/// Vertex/edge correspondence produced by a contraction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContractionTrace {
    pub vertex_image: BTreeMap<VertexId, Image>,
    pub edge_image: BTreeMap<EdgeId, Image>,
    /// For each merged image edge, the thicknesses of the source edges it is
    /// made of, ordered from side 0 to side 1.
    pub merged: BTreeMap<EdgeId, Vec<u64>>,
}

impl ContractionTrace {
    pub fn identity(g: &DualGraph) -> Self {
        ContractionTrace {
            vertex_image: g.vertex_ids().map(|v| (v, Image::Vertex(v))).collect(),
            edge_image: g.edges().keys().map(|&e| (e, Image::Edge(e))).collect(),
            merged: BTreeMap::new(),
        }
    }

    /// Source edges lying over `image`, sorted.
    pub fn preimage_edges(&self, image: EdgeId) -> Vec<EdgeId> {
        self.edge_image
            .iter()
            .filter(|(_, &im)| im == Image::Edge(image))
            .map(|(&e, _)| e)
            .collect()
    }
}

/// What to do with legs on contracted components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LegPolicy {
    /// Victims must carry no legs; degrees ignore markings.
    Reject,
    /// Degrees include legs; a leg on a contracted tail moves to the point
    /// where the tail was attached.
    Transfer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Elem {
    V(VertexId),
    E(EdgeId),
}

/// Contracts `victims`, which must all have non-positive dualizing degree,
/// into a semi-stable graph. Legs on victims are rejected.
pub fn contract(g: &DualGraph, victims: &BTreeSet<VertexId>) -> Result<(DualGraph, ContractionTrace)> {
    contract_with(g, victims, LegPolicy::Reject)
}

pub fn contract_with(
    g: &DualGraph,
    victims: &BTreeSet<VertexId>,
    policy: LegPolicy,
) -> Result<(DualGraph, ContractionTrace)> {
    g.ensure_valid()?;
    let marked = policy == LegPolicy::Transfer;
    for &v in victims {
        if !g.contains_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
        let deg = if marked {
            g.omega_degree(v, false)? + g.num_legs_at(v) as i64
        } else {
            g.omega_degree(v, false)?
        };
        if deg > 0 {
            return Err(Error::precondition(
                "omega-positive",
                [v.to_string()],
                format!("{v} has dualizing degree {deg} > 0 and cannot be contracted"),
            ));
        }
        if !marked && g.num_legs_at(v) > 0 {
            return Err(Error::precondition(
                "marked-victim",
                [v.to_string()],
                format!("{v} carries a leg"),
            ));
        }
    }
    if let Some(comp) = g.component_inside(victims) {
        return Err(Error::precondition(
            "full-component",
            comp.iter().map(|v| v.to_string()),
            "a whole connected component would be contracted",
        ));
    }

    let mut out = g.clone();
    let mut segments: BTreeMap<EdgeId, Vec<(EdgeId, u64)>> =
        g.edges().iter().map(|(&id, e)| (id, vec![(id, e.thickness)])).collect();
    let mut forward: BTreeMap<Elem, Elem> = BTreeMap::new();

    for &v in victims {
        let halves = out.half_edges_at(v);
        let legs = out.legs_at(v);
        match (halves.as_slice(), legs.len()) {
            ([h1, h2], 0) if h1.edge != h2.edge => {
                let e1 = *out.edge(h1.edge).unwrap();
                let e2 = *out.edge(h2.edge).unwrap();
                let x = e1.ends[1 - h1.side as usize];
                let y = e2.ends[1 - h2.side as usize];
                let (t1, t2) = (e1.thickness, e2.thickness);
                let keep = h1.edge.min(h2.edge);
                let drop = h1.edge.max(h2.edge);

                let mut seg1 = segments.remove(&h1.edge).unwrap();
                if h1.side == 0 {
                    seg1.reverse();
                }
                let mut seg2 = segments.remove(&h2.edge).unwrap();
                if h2.side == 1 {
                    seg2.reverse();
                }
                seg1.extend(seg2);
                segments.insert(keep, seg1);

                let moved: Vec<(MarkingId, EdgeMarking)> = out
                    .edge_markings()
                    .iter()
                    .filter(|(_, m)| m.edge == h1.edge || m.edge == h2.edge)
                    .map(|(&id, m)| (id, *m))
                    .collect();
                let mut relocated = Vec::new();
                for (id, m) in moved {
                    let off = out.marking_offset(&m).unwrap();
                    let from_x = if m.edge == h1.edge {
                        if h1.side == 1 {
                            off
                        } else {
                            Position::from_integer(t1 as i64) - off
                        }
                    } else {
                        let from_v = if h2.side == 0 {
                            off
                        } else {
                            Position::from_integer(t2 as i64) - off
                        };
                        Position::from_integer(t1 as i64) + from_v
                    };
                    relocated.push((id, EdgeMarking { edge: keep, from: x, position: from_x }));
                }
                out.remove_edge(h1.edge);
                out.remove_edge(h2.edge);
                out.remove_vertex(v);
                out.insert_edge(keep, x, y, t1 + t2);
                for (id, m) in relocated {
                    out.insert_edge_marking(id, m);
                }
                forward.insert(Elem::V(v), Elem::E(keep));
                forward.insert(Elem::E(drop), Elem::E(keep));
            }
            ([h], n) if n <= 1 || !marked => {
                let e = *out.edge(h.edge).unwrap();
                let x = e.ends[1 - h.side as usize];
                if let Some((&mid, _)) = out.edge_markings().iter().find(|(_, m)| m.edge == h.edge) {
                    return Err(Error::precondition(
                        "marking-on-deleted-edge",
                        [mid.to_string(), h.edge.to_string()],
                        format!("marking {mid} lies on the node of the contracted tail {v}"),
                    ));
                }
                for l in legs {
                    out.insert_leg(l, x);
                }
                out.remove_edge(h.edge);
                out.remove_vertex(v);
                segments.remove(&h.edge);
                forward.insert(Elem::V(v), Elem::V(x));
                forward.insert(Elem::E(h.edge), Elem::V(x));
            }
            _ => {
                return Err(Error::Internal(format!(
                    "victim {v} reached an uncontractible configuration ({} half-edges, {} legs)",
                    halves.len(),
                    legs.len()
                )))
            }
        }
    }

    let resolve = |mut el: Elem| -> Image {
        while let Some(&next) = forward.get(&el) {
            el = next;
        }
        match el {
            Elem::V(v) => Image::Vertex(v),
            Elem::E(e) => Image::Edge(e),
        }
    };
    let trace = ContractionTrace {
        vertex_image: g.vertex_ids().map(|v| (v, resolve(Elem::V(v)))).collect(),
        edge_image: g.edges().keys().map(|&e| (e, resolve(Elem::E(e)))).collect(),
        merged: segments
            .into_iter()
            .filter(|(_, s)| s.len() > 1)
            .map(|(id, s)| (id, s.into_iter().map(|(_, t)| t).collect()))
            .collect(),
    };
    Ok((out, trace))
}

/// Replaces every edge of thickness `t` by a chain of `t` unit edges through
/// `t - 1` new genus-0 components. Edge markings at integral positions become
/// legs (keeping their id) on the corresponding new component.
///
/// Returns the regular graph, the set of inserted components, and the trace
/// of the contraction that undoes the resolution.
pub fn desingularize(g: &DualGraph) -> Result<(DualGraph, BTreeSet<VertexId>, ContractionTrace)> {
    g.ensure_valid()?;
    let d = splitting_index(g)?;
    if d > 1 {
        return Err(Error::NonIntegralMarking { splitting_index: d });
    }
    let mut out = g.clone();
    let mut trace = ContractionTrace::identity(g);
    let mut inserted = BTreeSet::new();
    let mut next_vertex = g.max_vertex_id().map_or(0, |v| v.0 + 1);
    let mut next_edge = g.max_edge_id().map_or(0, |e| e.0 + 1);

    let mut integral_markings: BTreeMap<EdgeId, Vec<(MarkingId, u64)>> = BTreeMap::new();
    for (&id, m) in g.edge_markings() {
        let off = g.marking_offset(m).unwrap();
        integral_markings.entry(m.edge).or_default().push((id, off.to_integer() as u64));
    }

    for (&id, e) in g.edges() {
        if e.thickness == 1 {
            continue;
        }
        let t = e.thickness;
        let chain: Vec<VertexId> = (0..t - 1)
            .map(|_| {
                let v = VertexId(next_vertex);
                next_vertex += 1;
                v
            })
            .collect();
        out.remove_edge(id);
        let mut prev = e.ends[0];
        for (i, &n) in chain.iter().enumerate() {
            out.insert_vertex(n, 0);
            inserted.insert(n);
            trace.vertex_image.insert(n, Image::Edge(id));
            let seg = if i == 0 {
                id
            } else {
                let s = EdgeId(next_edge);
                next_edge += 1;
                s
            };
            out.insert_edge(seg, prev, n, 1);
            trace.edge_image.insert(seg, Image::Edge(id));
            prev = n;
        }
        let last = EdgeId(next_edge);
        next_edge += 1;
        out.insert_edge(last, prev, e.ends[1], 1);
        trace.edge_image.insert(last, Image::Edge(id));
        trace.merged.insert(id, vec![1; t as usize]);

        for &(mid, k) in integral_markings.get(&id).into_iter().flatten() {
            out.remove_edge_marking(mid);
            out.insert_leg(LegId(mid.0), chain[(k - 1) as usize]);
        }
    }
    Ok((out, inserted, trace))
}

/// Ramified base change of index `e`: node thicknesses and marking
/// positions scale by `e`.
pub fn base_change(g: &DualGraph, e: u64) -> Result<DualGraph> {
    if e == 0 {
        return Err(Error::ZeroIndex);
    }
    g.ensure_valid()?;
    let mut out = g.clone();
    for (&id, edge) in g.edges() {
        out.set_thickness(id, edge.thickness * e);
    }
    for (&id, m) in g.edge_markings() {
        out.insert_edge_marking(
            id,
            EdgeMarking { position: m.position * Position::from_integer(e as i64), ..*m },
        );
    }
    Ok(out)
}

/// Least base change index after which every edge marking sits at an
/// integral position.
pub fn splitting_index(g: &DualGraph) -> Result<u64> {
    g.ensure_valid()?;
    Ok(g.edge_markings()
        .values()
        .map(|m| *m.position.denom() as u64)
        .fold(1, |acc, d| acc.lcm(&d)))
}
