use std::collections::{BTreeMap, BTreeSet};

use super::{rh_defect, validate_cover, CoverDatum};
use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::ids::{EdgeId, LegId, VertexId};

/// A graph automorphism. Half-edges follow the vertex map on ordinary edges;
/// for loops the caller says which ones have their two branches swapped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Automorphism {
    pub vertices: BTreeMap<VertexId, VertexId>,
    pub edges: BTreeMap<EdgeId, EdgeId>,
    pub legs: BTreeMap<LegId, LegId>,
    pub flipped_loops: BTreeSet<EdgeId>,
}

/// A finite group of automorphisms, listed element by element.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupAction {
    pub elements: Vec<Automorphism>,
}

/// Half-edge level image of an edge: (image edge, sides swapped).
type EdgeAction = BTreeMap<EdgeId, (EdgeId, bool)>;

fn bad(rule: &'static str, msg: String) -> Error {
    Error::precondition(rule, [], msg)
}

fn is_bijection<K: Ord + Copy>(map: &BTreeMap<K, K>, domain: &BTreeSet<K>) -> bool {
    let keys: BTreeSet<K> = map.keys().copied().collect();
    let vals: BTreeSet<K> = map.values().copied().collect();
    keys == *domain && vals == *domain
}

fn edge_action(g: &DualGraph, a: &Automorphism, i: usize) -> Result<EdgeAction> {
    let vs: BTreeSet<VertexId> = g.vertex_ids().collect();
    let es: BTreeSet<EdgeId> = g.edges().keys().copied().collect();
    let ls: BTreeSet<LegId> = g.legs().keys().copied().collect();
    if !is_bijection(&a.vertices, &vs) || !is_bijection(&a.edges, &es) || !is_bijection(&a.legs, &ls) {
        return Err(bad("not-an-automorphism", format!("element {i} is not a bijection on vertices, edges and legs")));
    }
    for (&v, &w) in &a.vertices {
        if g.genus(v)? != g.genus(w)? {
            return Err(bad("not-invariant", format!("element {i} maps {v} to {w} of different genus")));
        }
    }
    for (&l, &m) in &a.legs {
        if a.vertices[&g.legs()[&l]] != g.legs()[&m] {
            return Err(bad("not-an-automorphism", format!("element {i} moves {l} off the image of its vertex")));
        }
    }
    let mut out = EdgeAction::new();
    for (&e, &f) in &a.edges {
        let (se, fe) = (g.edge(e).unwrap(), g.edge(f).unwrap());
        if se.thickness != fe.thickness {
            return Err(bad("not-invariant", format!("element {i} maps {e} to {f} of different thickness")));
        }
        let img = [a.vertices[&se.ends[0]], a.vertices[&se.ends[1]]];
        let flip = if se.is_loop() {
            if !fe.is_loop() || img[0] != fe.ends[0] {
                return Err(bad("not-an-automorphism", format!("element {i} maps loop {e} to {f}")));
            }
            a.flipped_loops.contains(&e)
        } else if img == fe.ends {
            false
        } else if img == [fe.ends[1], fe.ends[0]] {
            true
        } else {
            return Err(bad("not-an-automorphism", format!("element {i} does not respect the ends of {e}")));
        };
        out.insert(e, (f, flip));
    }
    Ok(out)
}

fn compose(x: &Automorphism, xe: &EdgeAction, y: &Automorphism, ye: &EdgeAction) -> (Automorphism, EdgeAction) {
    // x after y
    let vertices = y.vertices.iter().map(|(&v, w)| (v, x.vertices[w])).collect();
    let legs = y.legs.iter().map(|(&l, m)| (l, x.legs[m])).collect();
    let mut edges = BTreeMap::new();
    let mut act = EdgeAction::new();
    let mut flipped_loops = BTreeSet::new();
    for (&e, &(f, s1)) in ye {
        let (h, s2) = xe[&f];
        edges.insert(e, h);
        act.insert(e, (h, s1 ^ s2));
        if s1 ^ s2 {
            flipped_loops.insert(e);
        }
    }
    (Automorphism { vertices, edges, legs, flipped_loops }, act)
}

/// Quotient of `g` by a finite group of automorphisms, as a cover
/// `g → g/G`. Thickness of a quotient edge is the thickness of its
/// preimages times the edge stabilizer order.
///
/// Quotient genera cannot be read off the graph: vertices with a nontrivial
/// stabilizer need an entry in `quotient_genera` (keyed by any vertex of the
/// orbit); the others keep their genus.
pub fn quotient_by_action(
    g: &DualGraph,
    action: &GroupAction,
    edge_stabilizer_orders: &BTreeMap<EdgeId, u64>,
    quotient_genera: &BTreeMap<VertexId, u32>,
) -> Result<CoverDatum> {
    g.ensure_valid()?;
    if !g.edge_markings().is_empty() {
        return Err(bad("edge-markings-unsupported", "quotients act on graphs with legs only".into()));
    }
    let acts: Vec<EdgeAction> = action
        .elements
        .iter()
        .enumerate()
        .map(|(i, a)| edge_action(g, a, i))
        .collect::<Result<_>>()?;

    let key = |act: &EdgeAction, a: &Automorphism| (a.vertices.clone(), act.clone(), a.legs.clone());
    let keys: Vec<_> = action.elements.iter().zip(&acts).map(|(a, x)| key(x, a)).collect();
    let set: BTreeSet<_> = keys.iter().cloned().collect();
    if set.len() != keys.len() {
        return Err(bad("not-a-group", "repeated group element".into()));
    }
    let has_identity = action.elements.iter().zip(&acts).any(|(a, x)| {
        a.vertices.iter().all(|(v, w)| v == w) && x.iter().all(|(e, (f, s))| e == f && !s) && a.legs.iter().all(|(l, m)| l == m)
    });
    if !has_identity {
        return Err(bad("not-a-group", "the identity is missing".into()));
    }
    for (a, x) in action.elements.iter().zip(&acts) {
        for (b, y) in action.elements.iter().zip(&acts) {
            let (ab, xy) = compose(a, x, b, y);
            if !set.contains(&key(&xy, &ab)) {
                return Err(bad("not-a-group", "the element list is not closed under composition".into()));
            }
        }
    }

    for (i, x) in acts.iter().enumerate() {
        for (&e, &(f, s)) in x {
            if e == f && s {
                return Err(Error::precondition(
                    "edge-inversion",
                    [e.to_string()],
                    format!("element {i} swaps the two branches of {e}"),
                ));
            }
        }
    }

    let order = action.elements.len() as u64;
    let orbit_rep_v = |v: VertexId| action.elements.iter().map(|a| a.vertices[&v]).min().unwrap();
    let orbit_rep_e = |e: EdgeId| action.elements.iter().map(|a| a.edges[&e]).min().unwrap();
    let orbit_rep_l = |l: LegId| action.elements.iter().map(|a| a.legs[&l]).min().unwrap();
    let stab_v = |v: VertexId| action.elements.iter().filter(|a| a.vertices[&v] == v).count() as u64;
    let stab_e = |e: EdgeId| action.elements.iter().filter(|a| a.edges[&e] == e).count() as u64;
    let stab_l = |l: LegId| action.elements.iter().filter(|a| a.legs[&l] == l).count() as u64;

    for &e in g.edges().keys() {
        let actual = stab_e(e);
        match edge_stabilizer_orders.get(&e) {
            Some(&k) if k == actual => {}
            other => {
                return Err(Error::precondition(
                    "inconsistent-stabilizers",
                    [e.to_string()],
                    format!("stabilizer of {e} has order {actual}, given {other:?}"),
                ))
            }
        }
    }

    let mut target = DualGraph::new();
    let mut c = CoverDatum { global_degree: order, ..Default::default() };
    for v in g.vertex_ids() {
        let rep = orbit_rep_v(v);
        let k = stab_v(v);
        c.vertex_map.insert(v, rep);
        c.vertex_degree.insert(v, k);
        if v != rep {
            continue;
        }
        let orbit: BTreeSet<VertexId> = action.elements.iter().map(|a| a.vertices[&v]).collect();
        let supplied = orbit.iter().find_map(|u| quotient_genera.get(u).copied());
        let genus = match (k, supplied) {
            (_, Some(q)) => q,
            (1, None) => g.genus(v)?,
            (_, None) => {
                return Err(Error::precondition(
                    "quotient-genus-required",
                    [v.to_string()],
                    format!("{v} has a stabilizer of order {k}; supply the genus of its quotient"),
                ))
            }
        };
        target.insert_vertex(rep, genus);
    }
    for (&e, edge) in g.edges() {
        let rep = orbit_rep_e(e);
        let k = stab_e(e);
        c.edge_map.insert(e, rep);
        c.edge_dilation.insert(e, k);
        if e == rep {
            target.insert_edge(rep, orbit_rep_v(edge.ends[0]), orbit_rep_v(edge.ends[1]), edge.thickness * k);
        }
    }
    for &l in g.legs().keys() {
        let rep = orbit_rep_l(l);
        c.leg_map.insert(l, rep);
        let k = stab_l(l);
        if k != 1 {
            c.leg_degree.insert(l, k);
        }
        if l == rep {
            target.insert_leg(rep, orbit_rep_v(g.legs()[&l]));
        }
    }
    c.source = g.clone();
    c.target = target;

    let d = validate_cover(&c);
    if !d.is_empty() {
        return Err(Error::Internal(format!("quotient breaks the cover laws:\n{d}")));
    }
    for v in g.vertex_ids() {
        let defect = rh_defect(&c, v)?;
        if defect < 0 {
            return Err(Error::precondition(
                "rh-inconsistent-genus",
                [v.to_string(), c.vertex_map[&v].to_string()],
                format!("Riemann-Hurwitz defect {defect} at {v}; the quotient genus is too large"),
            ));
        }
    }
    Ok(c)
}

/// Edge stabilizer orders computed from the action itself.
pub fn edge_stabilizer_orders(g: &DualGraph, action: &GroupAction) -> BTreeMap<EdgeId, u64> {
    g.edges()
        .keys()
        .map(|&e| {
            let k = action.elements.iter().filter(|a| a.edges.get(&e) == Some(&e)).count() as u64;
            (e, k)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::VertexId as V;

    fn identity(g: &DualGraph) -> Automorphism {
        Automorphism {
            vertices: g.vertex_ids().map(|v| (v, v)).collect(),
            edges: g.edges().keys().map(|&e| (e, e)).collect(),
            legs: g.legs().keys().map(|&l| (l, l)).collect(),
            flipped_loops: BTreeSet::new(),
        }
    }

    #[test]
    fn trivial_group_gives_identity_cover() {
        let g = DualGraph::new().with_vertex(0, 2).with_vertex(1, 1).with_edge(0, 0, 1, 3).with_leg(0, 1);
        let act = GroupAction { elements: vec![identity(&g)] };
        let c = quotient_by_action(&g, &act, &edge_stabilizer_orders(&g, &act), &BTreeMap::new()).unwrap();
        assert_eq!(c, CoverDatum::identity(&g));
    }

    fn two_parallel() -> DualGraph {
        DualGraph::new().with_vertex(0, 1).with_vertex(1, 1).with_edge(0, 0, 1, 2).with_edge(1, 0, 1, 2)
    }

    #[test]
    fn swap_gives_a_loop() {
        let g = two_parallel();
        let swap = Automorphism {
            vertices: [(V(0), V(1)), (V(1), V(0))].into(),
            edges: [(EdgeId(0), EdgeId(1)), (EdgeId(1), EdgeId(0))].into(),
            ..Default::default()
        };
        let act = GroupAction { elements: vec![identity(&g), swap] };
        let c = quotient_by_action(&g, &act, &edge_stabilizer_orders(&g, &act), &BTreeMap::new()).unwrap();
        assert_eq!(c.global_degree, 2);
        assert_eq!(c.target.num_vertices(), 1);
        let e = c.target.edge(EdgeId(0)).unwrap();
        assert!(e.is_loop());
        assert_eq!(e.thickness, 2);
        // 2g - 2 pushes forward: 2 * 3 - 2 = 2 * (2 * 2 - 2) + 0.
        let (gx, gy) = (c.source.arithmetic_genus().unwrap() as i64, c.target.arithmetic_genus().unwrap() as i64);
        assert_eq!(2 * gx - 2, 2 * (2 * gy - 2));
    }

    #[test]
    fn edge_stabilizer_doubles_thickness() {
        // Both vertices fixed, each edge fixed: an involution acting on the
        // components only.
        let g = DualGraph::new().with_vertex(0, 2).with_vertex(1, 2).with_edge(0, 0, 1, 3);
        let act = GroupAction { elements: vec![identity(&g), identity(&g)] };
        // Listing the identity twice is not a group.
        assert_eq!(
            quotient_by_action(&g, &act, &edge_stabilizer_orders(&g, &act), &BTreeMap::new()).unwrap_err().rule(),
            "not-a-group"
        );
        // The nontrivial involution is invisible on the graph, so it is
        // presented through the stabilizer orders of a marked copy: give
        // each component a pair of legs that it swaps.
        let g = g.with_leg(0, 0).with_leg(1, 0).with_leg(2, 1).with_leg(3, 1);
        let mut inv = identity(&g);
        inv.legs = [(LegId(0), LegId(1)), (LegId(1), LegId(0)), (LegId(2), LegId(3)), (LegId(3), LegId(2))].into();
        let act = GroupAction { elements: vec![identity(&g), inv] };
        let genera = BTreeMap::from([(V(0), 0), (V(1), 0)]);
        let c = quotient_by_action(&g, &act, &edge_stabilizer_orders(&g, &act), &genera).unwrap();
        assert_eq!(c.target.edge(EdgeId(0)).unwrap().thickness, 6);
        assert_eq!(c.edge_dilation[&EdgeId(0)], 2);
        assert_eq!(c.vertex_degree[&V(0)], 2);

        let missing = quotient_by_action(&g, &act, &edge_stabilizer_orders(&g, &act), &BTreeMap::new());
        assert_eq!(missing.unwrap_err().rule(), "quotient-genus-required");
        let wrong = BTreeMap::from([(EdgeId(0), 1)]);
        assert_eq!(quotient_by_action(&g, &act, &wrong, &genera).unwrap_err().rule(), "inconsistent-stabilizers");
        let too_big = BTreeMap::from([(V(0), 2), (V(1), 2)]);
        assert_eq!(
            quotient_by_action(&g, &act, &edge_stabilizer_orders(&g, &act), &too_big).unwrap_err().rule(),
            "rh-inconsistent-genus"
        );
    }

    #[test]
    fn inversion_is_rejected() {
        let g = DualGraph::new().with_vertex(0, 2).with_vertex(1, 2).with_edge(0, 0, 1, 1);
        let flip = Automorphism {
            vertices: [(V(0), V(1)), (V(1), V(0))].into(),
            edges: [(EdgeId(0), EdgeId(0))].into(),
            ..Default::default()
        };
        let act = GroupAction { elements: vec![identity(&g), flip] };
        let err = quotient_by_action(&g, &act, &edge_stabilizer_orders(&g, &act), &BTreeMap::new()).unwrap_err();
        assert_eq!(err.rule(), "edge-inversion");
    }

    #[test]
    fn genus_must_be_invariant() {
        let g = DualGraph::new().with_vertex(0, 2).with_vertex(1, 1).with_edge(0, 0, 1, 1).with_edge(1, 0, 1, 1);
        let swap = Automorphism {
            vertices: [(V(0), V(1)), (V(1), V(0))].into(),
            edges: [(EdgeId(0), EdgeId(1)), (EdgeId(1), EdgeId(0))].into(),
            ..Default::default()
        };
        let act = GroupAction { elements: vec![identity(&g), swap] };
        let err = quotient_by_action(&g, &act, &edge_stabilizer_orders(&g, &act), &BTreeMap::new()).unwrap_err();
        assert_eq!(err.rule(), "not-invariant");
    }
}
