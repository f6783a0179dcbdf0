//! Brute-force ground truth: every contraction order, deduplicated up to
//! isomorphism, arranged as a poset.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::canon::{canonicalize_cover, canonicalize_marked_set};
use crate::covers::{contract_cover_vertex, qualifying_vertices, CoverDatum, Exceptional};
use crate::error::{Error, Result};
use crate::graph::DualGraph;
use crate::ids::VertexId;
use crate::models::Model;
use crate::moves::{contract, LegPolicy};

pub const DEFAULT_MODEL_BOUND: usize = 8;
pub const DEFAULT_COVER_BOUND: usize = 5;

/// Elements are canonical strings; `(i, j)` in `covers_relation` means
/// element `i` is obtained from element `j` by one contraction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DominationPoset {
    pub elements: Vec<String>,
    pub covers_relation: Vec<(usize, usize)>,
    pub minimal_elements: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub bound: usize,
    /// Worker threads for expanding a BFS level; 1 runs inline.
    pub jobs: usize,
}

impl OracleOptions {
    pub fn models() -> Self {
        OracleOptions { bound: DEFAULT_MODEL_BOUND, jobs: 1 }
    }

    pub fn covers() -> Self {
        OracleOptions { bound: DEFAULT_COVER_BOUND, jobs: 1 }
    }
}

/// Level-by-level closure. `key` canonicalizes a state, `expand` lists its
/// one-step successors. Each level is sorted by key before numbering, so the
/// result does not depend on the number of jobs.
fn closure<S, K, X>(start: S, jobs: usize, key: K, expand: X) -> Result<DominationPoset>
where
    S: Send + Sync,
    K: Fn(&S) -> String + Sync,
    X: Fn(&S) -> Result<Vec<S>> + Sync,
{
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut elements = vec![key(&start)];
    index.insert(elements[0].clone(), 0);
    let mut frontier = vec![(0usize, start)];
    let mut relation = BTreeSet::new();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;

    while !frontier.is_empty() {
        let expanded: Vec<Result<Vec<(String, S)>>> = if jobs > 1 {
            pool.install(|| {
                frontier
                    .par_iter()
                    .map(|(_, s)| expand(s).map(|v| v.into_iter().map(|t| (key(&t), t)).collect()))
                    .collect()
            })
        } else {
            frontier
                .iter()
                .map(|(_, s)| expand(s).map(|v| v.into_iter().map(|t| (key(&t), t)).collect()))
                .collect()
        };
        let mut fresh: BTreeMap<String, S> = BTreeMap::new();
        let mut edges = Vec::new();
        for ((parent, _), children) in frontier.iter().zip(expanded) {
            for (k, state) in children? {
                edges.push((k.clone(), *parent));
                if !index.contains_key(&k) {
                    fresh.entry(k).or_insert(state);
                }
            }
        }
        let mut next = Vec::new();
        for (k, state) in fresh {
            let i = elements.len();
            elements.push(k.clone());
            index.insert(k, i);
            next.push((i, state));
        }
        for (k, parent) in edges {
            relation.insert((index[&k], parent));
        }
        frontier = next;
    }

    let has_successor: BTreeSet<usize> = relation.iter().map(|&(_, j)| j).collect();
    let minimal_elements = (0..elements.len()).filter(|i| !has_successor.contains(i)).collect();
    Ok(DominationPoset { elements, covers_relation: relation.into_iter().collect(), minimal_elements })
}

/// All models reachable from `m` by contracting exceptional components one
/// at a time, up to isomorphism.
pub fn enumerate_contractions(m: &Model, opts: OracleOptions) -> Result<DominationPoset> {
    let size = m.top().num_vertices();
    if size > opts.bound {
        return Err(Error::BoundExceeded { size, bound: opts.bound });
    }
    let start = (m.top().clone(), m.exceptional().clone());
    closure(
        start,
        opts.jobs,
        |(g, ex)| canonicalize_marked_set(g, ex),
        |(g, ex)| {
            let mut out = Vec::new();
            for &v in ex {
                if g.omega_degree(v, false)? > 0 || g.num_legs_at(v) > 0 {
                    continue;
                }
                let victims = BTreeSet::from([v]);
                if g.component_inside(&victims).is_some() {
                    continue;
                }
                let (h, _) = contract(g, &victims)?;
                let mut rest = ex.clone();
                rest.remove(&v);
                out.push((h, rest));
            }
            Ok(out)
        },
    )
}

/// All covers reachable by contracting a qualifying target component with
/// its preimage, up to isomorphism. Without exceptional loci every
/// contractible component qualifies, as in the stable model computation.
pub fn enumerate_cover_contractions(
    c: &CoverDatum,
    ex: Option<(&BTreeSet<VertexId>, &BTreeSet<VertexId>)>,
    opts: OracleOptions,
) -> Result<DominationPoset> {
    let size = c.target.num_vertices();
    if size > opts.bound {
        return Err(Error::BoundExceeded { size, bound: opts.bound });
    }
    c.ensure_valid()?;
    let start = (c.without_legs(), ex.map(|(s, t)| (s.clone(), t.clone())));
    closure(
        start,
        opts.jobs,
        |(c, ex)| canonicalize_cover(c, ex.as_ref().map(|(s, t)| (s, t))),
        |(c, ex)| {
            let view = ex.as_ref().map(|(s, t)| Exceptional { source: s, target: t });
            let mut out = Vec::new();
            for w in qualifying_vertices(c, view, LegPolicy::Reject)? {
                let (next, step) = contract_cover_vertex(c, w, LegPolicy::Reject)?;
                let rest = ex.as_ref().map(|(s, t)| {
                    let mut s = s.clone();
                    let mut t = t.clone();
                    t.remove(&w);
                    for v in &step.source_vertices {
                        s.remove(v);
                    }
                    (s, t)
                });
                out.push((next, rest));
            }
            Ok(out)
        },
    )
}

/// True iff the relation is acyclic and has exactly one minimal element;
/// every maximal chain of a finite acyclic poset then ends there.
pub fn check_confluence(p: &DominationPoset) -> bool {
    let n = p.elements.len();
    if n == 0 || p.covers_relation.iter().any(|&(i, j)| i >= n || j >= n) {
        return false;
    }
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for &(i, j) in &p.covers_relation {
        succ[j].push(i);
        indegree[i] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut seen = 0;
    while let Some(j) = queue.pop() {
        seen += 1;
        for &i in &succ[j] {
            indegree[i] -= 1;
            if indegree[i] == 0 {
                queue.push(i);
            }
        }
    }
    if seen != n {
        return false;
    }
    let minimal: Vec<usize> = (0..n).filter(|&j| succ[j].is_empty()).collect();
    minimal.len() == 1
}

/// Relatively minimal semi-stable models below `g`, as labelled sets of
/// surviving components: every contraction order of components with
/// non-positive degree is followed until nothing is contractible. Unlike
/// [`enumerate_contractions`], results are not identified up to isomorphism.
pub fn relatively_minimal_models(g: &DualGraph, bound: usize) -> Result<Vec<(BTreeSet<VertexId>, DualGraph)>> {
    if g.num_vertices() > bound {
        return Err(Error::BoundExceeded { size: g.num_vertices(), bound });
    }
    g.ensure_valid()?;
    let mut seen: BTreeSet<BTreeSet<VertexId>> = BTreeSet::new();
    let mut stack = vec![g.clone()];
    let mut out = BTreeMap::new();
    while let Some(cur) = stack.pop() {
        let key: BTreeSet<VertexId> = cur.vertex_ids().collect();
        if !seen.insert(key.clone()) {
            continue;
        }
        let mut any = false;
        for v in cur.vertex_ids() {
            let victims = BTreeSet::from([v]);
            if cur.omega_degree(v, false)? > 0 || cur.num_legs_at(v) > 0 || cur.component_inside(&victims).is_some() {
                continue;
            }
            any = true;
            stack.push(contract(&cur, &victims)?.0);
        }
        if !any {
            out.insert(key, cur);
        }
    }
    Ok(out.into_iter().collect())
}
