//! Exhaustive small families: connected dual graphs, models on them, and
//! harmonic covers of small targets.
//!
//! Covers are built by a single routine driven by a [`Chooser`]. Random
//! generation feeds it random choices; exhaustive enumeration replays it
//! over every choice sequence.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;

use crate::canon::{canonicalize, canonicalize_cover};
use crate::covers::CoverDatum;
use crate::graph::DualGraph;
use crate::ids::{EdgeId, LegId, VertexId};
use crate::models::{make_model, Model};

/// Source of discrete choices: `pick(n)` returns a value in `0..n`.
pub trait Chooser {
    fn pick(&mut self, n: usize) -> usize;
}

/// Replays a recorded prefix, then always picks 0 while recording.
struct Replay {
    trail: Vec<(usize, usize)>,
    pos: usize,
}

impl Chooser for Replay {
    fn pick(&mut self, n: usize) -> usize {
        assert!(n > 0, "empty choice");
        if self.pos < self.trail.len() {
            let c = self.trail[self.pos].0;
            self.pos += 1;
            return c;
        }
        self.trail.push((0, n));
        self.pos += 1;
        0
    }
}

/// Runs `f` once for every sequence of choices it can make.
pub fn for_each_choice<T>(mut f: impl FnMut(&mut dyn Chooser) -> T, mut sink: impl FnMut(T)) {
    let mut trail: Vec<(usize, usize)> = Vec::new();
    loop {
        let mut r = Replay { trail, pos: 0 };
        let out = f(&mut r);
        sink(out);
        trail = r.trail;
        trail.truncate(r.pos);
        while let Some(&(c, n)) = trail.last() {
            if c + 1 < n {
                break;
            }
            trail.pop();
        }
        match trail.last_mut() {
            Some(last) => last.0 += 1,
            None => return,
        }
    }
}

/// Partitions of `n` into positive parts, largest part first.
pub fn partitions(n: u64) -> Vec<Vec<u64>> {
    fn go(n: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            go(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

/// How source genera are chosen in [`build_cover`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenusRule {
    /// The least genus with non-negative defect.
    Minimal,
    /// The least genus, optionally plus one on components of degree ≥ 2.
    MinimalOrNext,
    /// Marked defect exactly zero; the build fails when parity forbids it.
    Unramified,
}

/// Builds a harmonic cover of `target` of global degree `degree`. Each
/// target vertex gets a partition of the degree into source components;
/// over each edge the two partitions are laid out as intervals of
/// `[0, degree]` (the second in a chosen order) and every piece of the
/// common refinement is split into parallel source edges. Target
/// thicknesses are multiplied by the lcm of the dilations over them. With
/// `marked`, every target leg is lifted with chosen local degrees.
///
/// Returns `None` when the genus rule cannot be met.
pub fn build_cover(
    target: &DualGraph,
    degree: u64,
    marked: bool,
    genus_rule: GenusRule,
    ch: &mut dyn Chooser,
) -> Option<CoverDatum> {
    let parts_n = partitions(degree);
    let mut next_v = 0u32;
    let mut fiber: BTreeMap<VertexId, Vec<(VertexId, u64)>> = BTreeMap::new();
    let mut c = CoverDatum { global_degree: degree, ..Default::default() };
    for w in target.vertex_ids() {
        let p = &parts_n[ch.pick(parts_n.len())];
        let mut list = Vec::new();
        for &d in p {
            let v = VertexId(next_v);
            next_v += 1;
            list.push((v, d));
            c.vertex_map.insert(v, w);
            c.vertex_degree.insert(v, d);
        }
        fiber.insert(w, list);
    }

    let mut edges: Vec<(VertexId, VertexId, u64, EdgeId)> = Vec::new();
    let mut tgt = target.clone();
    for (&y, e) in target.edges() {
        let side0 = fiber[&e.ends[0]].clone();
        let orders = permutations(&fiber[&e.ends[1]]);
        let side1 = &orders[ch.pick(orders.len())];
        let cuts = |list: &[(VertexId, u64)]| {
            let mut acc = 0;
            list.iter().map(|&(v, d)| {
                acc += d;
                (acc, v)
            }).collect::<Vec<_>>()
        };
        let (a, b) = (cuts(&side0), cuts(side1));
        let mut points: BTreeSet<u64> = a.iter().chain(&b).map(|x| x.0).collect();
        points.insert(0);
        let points: Vec<u64> = points.into_iter().collect();
        let owner = |list: &[(u64, VertexId)], x: u64| list.iter().find(|(end, _)| *end > x).unwrap().1;
        let mut lcm = 1u64;
        for win in points.windows(2) {
            let len = win[1] - win[0];
            let (u, v) = (owner(&a, win[0]), owner(&b, win[0]));
            let splits = partitions(len);
            for &p in &splits[ch.pick(splits.len())] {
                lcm = lcm.lcm(&p);
                edges.push((u, v, p, y));
            }
        }
        tgt.set_thickness(y, e.thickness * lcm);
    }
    let mut src = DualGraph::new();
    for (i, &(u, v, d, y)) in edges.iter().enumerate() {
        let id = EdgeId(i as u32);
        let t = tgt.edge(y).unwrap().thickness / d;
        src.insert_edge(id, u, v, t);
        c.edge_map.insert(id, y);
        c.edge_dilation.insert(id, d);
    }

    let mut next_l = 0u32;
    let mut leg_ramification: BTreeMap<VertexId, u64> = BTreeMap::new();
    if marked {
        for (&n, w) in target.legs() {
            for &(v, d) in &fiber[w] {
                let splits = partitions(d);
                for &k in &splits[ch.pick(splits.len())] {
                    let l = LegId(next_l);
                    next_l += 1;
                    src.insert_leg(l, v);
                    c.leg_map.insert(l, n);
                    if k != 1 {
                        c.leg_degree.insert(l, k);
                    }
                    *leg_ramification.entry(v).or_default() += k - 1;
                }
            }
        }
    } else {
        for l in target.legs().keys().copied().collect::<Vec<_>>() {
            tgt.remove_leg(l);
        }
    }

    for (&v, &w) in &c.vertex_map.clone() {
        let d = c.vertex_degree[&v] as i64;
        let gw = target.genus(w).ok()? as i64;
        let nodes: i64 = edges
            .iter()
            .map(|&(a, b, k, _)| (k as i64 - 1) * ((a == v) as i64 + (b == v) as i64))
            .sum();
        let legs = leg_ramification.get(&v).copied().unwrap_or(0) as i64;
        let rhs = d * (2 * gw - 2) + nodes + if genus_rule == GenusRule::Unramified { legs } else { 0 };
        let genus = match genus_rule {
            GenusRule::Unramified => {
                if rhs % 2 != 0 || rhs + 2 < 0 {
                    return None;
                }
                (rhs + 2) / 2
            }
            GenusRule::Minimal | GenusRule::MinimalOrNext => {
                let mut g = (rhs + 3).div_euclid(2).max(0);
                if genus_rule == GenusRule::MinimalOrNext && d >= 2 {
                    g += ch.pick(2) as i64;
                }
                g
            }
        };
        src.insert_vertex(v, genus as u32);
    }
    c.source = src;
    c.target = tgt;
    Some(c)
}

/// Connected graphs with at most `max_vertices` vertices and arithmetic
/// genus at most `max_genus`, all edges of thickness 1, no legs, one per
/// isomorphism class.
pub fn connected_graphs(max_vertices: u32, max_genus: u32) -> Vec<DualGraph> {
    let mut trees: Vec<DualGraph> = vec![DualGraph::new().with_vertex(0, 0)];
    let mut all_shapes: Vec<DualGraph> = trees.clone();
    for n in 2..=max_vertices {
        let mut next = BTreeMap::new();
        for t in &trees {
            for v in 0..n - 1 {
                let g = t.clone().with_vertex(n - 1, 0).with_edge(n - 2, v, n - 1, 1);
                next.entry(canonicalize(&g)).or_insert(g);
            }
        }
        trees = next.into_values().collect();
        all_shapes.extend(trees.iter().cloned());
    }
    // Add up to max_genus extra edges, loops included.
    let mut shapes: BTreeMap<String, (DualGraph, u32)> =
        all_shapes.into_iter().map(|g| (canonicalize(&g), (g, 0))).collect();
    let mut layer: Vec<DualGraph> = shapes.values().map(|(g, _)| g.clone()).collect();
    for b1 in 1..=max_genus {
        let mut next = BTreeMap::new();
        for g in &layer {
            let vs: Vec<VertexId> = g.vertex_ids().collect();
            let id = g.max_edge_id().map_or(0, |e| e.0 + 1);
            for (i, &a) in vs.iter().enumerate() {
                for &b in &vs[i..] {
                    let h = g.clone().with_edge(id, a.0, b.0, 1);
                    next.entry(canonicalize(&h)).or_insert(h);
                }
            }
        }
        layer = next.values().cloned().collect();
        for (k, g) in next {
            shapes.entry(k).or_insert((g, b1));
        }
    }
    let mut out = BTreeMap::new();
    for (g, b1) in shapes.into_values() {
        let vs: Vec<VertexId> = g.vertex_ids().collect();
        for genera in genus_assignments(vs.len(), max_genus - b1) {
            let mut h = g.clone();
            for (v, &k) in vs.iter().zip(&genera) {
                h.set_genus(*v, k);
            }
            out.entry(canonicalize(&h)).or_insert(h);
        }
    }
    out.into_values().collect()
}

fn genus_assignments(n: usize, budget: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for g in 0..=budget {
        for mut rest in genus_assignments(n - 1, budget - g) {
            rest.insert(0, g);
            out.push(rest);
        }
    }
    out
}

/// Every valid model on `top`, one per exceptional set.
pub fn models_on(top: &DualGraph) -> Vec<Model> {
    let vs: Vec<VertexId> = top.vertex_ids().collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << vs.len()) {
        let ex: BTreeSet<VertexId> = vs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
        if let Ok(m) = make_model(top.clone(), ex) {
            out.push(m);
        }
    }
    out
}

/// Covers of every target in `targets` of degree `1..=max_degree`, one per
/// isomorphism class, keeping only those accepted by `keep`.
pub fn covers_of(
    targets: &[DualGraph],
    max_degree: u64,
    marked: bool,
    genus_rule: GenusRule,
    mut keep: impl FnMut(&CoverDatum) -> bool,
) -> Vec<CoverDatum> {
    let mut out = BTreeMap::new();
    for t in targets {
        for n in 1..=max_degree {
            for_each_choice(
                |ch| build_cover(t, n, marked, genus_rule, ch),
                |c| {
                    if let Some(c) = c {
                        if keep(&c) {
                            out.entry(canonicalize_cover(&c, None)).or_insert(c);
                        }
                    }
                },
            );
        }
    }
    out.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::{marked_rh_defect, rh_defect, validate_cover};

    #[test]
    fn partitions_of_small_numbers() {
        assert_eq!(partitions(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(partitions(4).len(), 5);
    }

    #[test]
    fn replay_visits_every_sequence() {
        let mut seen = Vec::new();
        for_each_choice(|ch| (ch.pick(2), ch.pick(3)), |x| seen.push(x));
        assert_eq!(seen.len(), 6);
        let distinct: BTreeSet<_> = seen.iter().collect();
        assert_eq!(distinct.len(), 6);
    }

    #[test]
    fn graph_counts() {
        // Trees on up to three vertices with genus 0: the point, the edge, the path.
        assert_eq!(connected_graphs(3, 0).len(), 3);
        // One vertex, genus ≤ 1: genus 0, genus 1, a loop.
        assert_eq!(connected_graphs(1, 1).len(), 3);
        for g in connected_graphs(4, 2) {
            assert!(g.is_valid());
            assert!(g.arithmetic_genus().unwrap() <= 2);
        }
    }

    #[test]
    fn built_covers_are_valid() {
        let targets = connected_graphs(3, 1);
        let all = covers_of(&targets, 3, false, GenusRule::Minimal, |_| true);
        assert!(all.len() > 50);
        for c in &all {
            assert!(validate_cover(c).is_empty(), "{:?}", validate_cover(c));
            for v in c.source.vertex_ids() {
                assert!(rh_defect(c, v).unwrap() >= 0);
            }
        }
    }

    #[test]
    fn unramified_marked_covers_have_zero_defect() {
        let targets: Vec<DualGraph> =
            connected_graphs(2, 1).into_iter().map(|g| {
                let v = g.vertex_ids().next().unwrap();
                g.with_leg(0, v.0)
            }).collect();
        let all = covers_of(&targets, 2, true, GenusRule::Unramified, |_| true);
        assert!(!all.is_empty());
        for c in &all {
            assert!(validate_cover(c).is_empty(), "{:?}", validate_cover(c));
            for v in c.source.vertex_ids() {
                assert_eq!(marked_rh_defect(c, v).unwrap(), 0);
            }
        }
    }
}
