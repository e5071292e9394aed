use super::edges::EdgeMultiset;
use super::joint::{ESet, JointGraph, Side};
use crate::localsearch::NeighborLists;
use crate::model::{Instance, Solution};
use crate::{Cost, Error, Load, Result};

/// Intermediate edge set of the base parent after exchanging an E-set:
/// base edges of the E-set are removed and the other parent's added.
/// Dummy loops are skipped. `base_edges` must not contain loops.
pub fn apply_eset(
    base_edges: &EdgeMultiset,
    base: Side,
    graph: &JointGraph,
    eset: &ESet,
) -> Result<EdgeMultiset> {
    let mut out = base_edges.clone();
    for &k in &eset.edges {
        let e = graph.edges()[k];
        if e.is_loop() {
            continue;
        }
        if e.side == base {
            if !out.remove(e.u, e.v) {
                return Err(Error::Internal(format!(
                    "edge ({}, {}) missing from base",
                    e.u, e.v
                )));
            }
        } else {
            out.insert(e.u, e.v);
        }
    }
    Ok(out)
}

/// Closed tour through `depots[0]`, path 0, `depots[1]`, path 1, ... and
/// back to `depots[0]`. Depots are pairwise distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct MegaTour {
    pub depots: Vec<usize>,
    pub paths: Vec<Vec<usize>>,
}

/// An intermediate decomposed into depot routes, mega tours through several
/// depots and depot-less customer cycles.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Intermediate {
    pub routes: Vec<(usize, Vec<usize>)>,
    pub mega_tours: Vec<MegaTour>,
    pub subtours: Vec<Vec<usize>>,
}

impl Intermediate {
    /// Requires degree 2 at every customer vertex and even depot degrees.
    pub fn decompose(edges: &EdgeMultiset, instance: &Instance) -> Result<Self> {
        let m = instance.num_depots();
        let total = m + instance.num_customers();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
        for (u, v) in edges.iter() {
            if u == v {
                return Err(Error::Internal("loop in intermediate".into()));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (v, a) in adj.iter().enumerate() {
            if v >= m && a.len() != 2 {
                return Err(Error::Internal(format!(
                    "customer vertex {v} has degree {}",
                    a.len()
                )));
            }
            if v < m && a.len() % 2 != 0 {
                return Err(Error::Internal(format!("depot {v} has odd degree")));
            }
        }
        let take = |adj: &mut Vec<Vec<usize>>, u: usize, v: usize| {
            let p = adj[u].iter().position(|&x| x == v).expect("edge present");
            adj[u].swap_remove(p);
            let p = adj[v].iter().position(|&x| x == u).expect("edge present");
            adj[v].swap_remove(p);
        };

        // Depot-to-depot paths.
        let mut paths: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        for d in 0..m {
            while let Some(&c) = adj[d].iter().min() {
                take(&mut adj, d, c);
                let mut seq = Vec::new();
                let mut cur = c;
                while cur >= m {
                    seq.push(cur - m);
                    let next = adj[cur][0];
                    take(&mut adj, cur, next);
                    cur = next;
                }
                paths.push((d, seq, cur));
            }
        }
        let mut subtours = Vec::new();
        for start in m..total {
            if adj[start].is_empty() {
                continue;
            }
            let mut seq = vec![start - m];
            let mut cur = start;
            loop {
                let next = adj[cur][0];
                take(&mut adj, cur, next);
                if next == start {
                    break;
                }
                seq.push(next - m);
                cur = next;
            }
            subtours.push(seq);
        }

        let mut out = Intermediate {
            subtours,
            ..Default::default()
        };
        let mut inc: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut used = vec![false; paths.len()];
        for (k, (a, seq, b)) in paths.iter().enumerate() {
            if a == b {
                out.routes.push((*a, seq.clone()));
                used[k] = true;
            } else {
                inc[*a].push(k);
                inc[*b].push(k);
            }
        }
        // Split the depot multigraph into cycles with distinct depots.
        for s in 0..m {
            loop {
                let Some(&first) = inc[s].iter().find(|&&k| !used[k]) else {
                    break;
                };
                let mut stack_d = vec![s];
                let mut stack_p: Vec<Vec<usize>> = Vec::new();
                let mut k = first;
                loop {
                    used[k] = true;
                    let cur = *stack_d.last().expect("nonempty");
                    let (a, seq, b) = &paths[k];
                    let (next, oriented) = if *a == cur {
                        (*b, seq.clone())
                    } else {
                        (*a, seq.iter().rev().copied().collect())
                    };
                    stack_p.push(oriented);
                    if let Some(pos) = stack_d.iter().position(|&x| x == next) {
                        out.mega_tours.push(MegaTour {
                            depots: stack_d.split_off(pos),
                            paths: stack_p.split_off(pos),
                        });
                        stack_d.push(next);
                        if stack_p.is_empty() {
                            break;
                        }
                    } else {
                        stack_d.push(next);
                    }
                    let at = *stack_d.last().expect("nonempty");
                    k = *inc[at]
                        .iter()
                        .find(|&&k| !used[k])
                        .ok_or_else(|| Error::Internal(format!("depot {at} walk stuck")))?;
                }
            }
        }
        Ok(out)
    }

    pub fn num_customers(&self) -> usize {
        self.routes.iter().map(|r| r.1.len()).sum::<usize>()
            + self
                .mega_tours
                .iter()
                .flat_map(|t| &t.paths)
                .map(Vec::len)
                .sum::<usize>()
            + self.subtours.iter().map(Vec::len).sum::<usize>()
    }
}

fn nearest_depot(instance: &Instance, depots: &[usize], j: usize) -> usize {
    *depots
        .iter()
        .min_by(|&&a, &&b| {
            instance
                .dc(a, j)
                .total_cmp(&instance.dc(b, j))
                .then(a.cmp(&b))
        })
        .expect("nonempty depot list")
}

/// Reduces every mega tour to a single-depot route by repeatedly splicing
/// out one depot: the one with the smallest residual capacity, or with the
/// largest travel saving when depots are uncapacitated. Residuals count the
/// loads of finished routes plus the current tour's customers attributed to
/// their nearest remaining depot of the tour. Removed depots are appended to
/// `trace` in order.
pub fn split_mega_tours(
    mut inter: Intermediate,
    instance: &Instance,
    mut trace: Option<&mut Vec<usize>>,
) -> Intermediate {
    let mut load: Vec<Load> = vec![0; instance.num_depots()];
    for (d, seq) in &inter.routes {
        load[*d] += seq.iter().map(|&j| instance.demand(j)).sum::<Load>();
    }
    let uncapacitated = instance.depots_uncapacitated();
    for mut tour in std::mem::take(&mut inter.mega_tours) {
        while tour.depots.len() > 1 {
            let k = tour.depots.len();
            let remove = if uncapacitated {
                (0..k)
                    .map(|t| {
                        let a = instance
                            .cv(*tour.paths[(t + k - 1) % k].last().expect("nonempty path"));
                        let b = instance.cv(tour.paths[t][0]);
                        let d = tour.depots[t];
                        (instance.c(a, d) + instance.c(d, b) - instance.c(a, b), d, t)
                    })
                    .max_by(|x, y| x.0.total_cmp(&y.0).then(y.1.cmp(&x.1)))
                    .expect("k >= 2")
                    .2
            } else {
                let mut extra: Vec<Load> = vec![0; instance.num_depots()];
                for &j in tour.paths.iter().flatten() {
                    extra[nearest_depot(instance, &tour.depots, j)] += instance.demand(j);
                }
                let residual = |d: usize| instance.depots[d].capacity - load[d] - extra[d];
                (0..k)
                    .min_by_key(|&t| (residual(tour.depots[t]), tour.depots[t]))
                    .expect("k >= 2")
            };
            if let Some(t) = trace.as_deref_mut() {
                t.push(tour.depots[remove]);
            }
            let prev = (remove + k - 1) % k;
            let tail = tour.paths.remove(remove);
            let prev = if prev > remove { prev - 1 } else { prev };
            tour.paths[prev].extend(tail);
            tour.depots.remove(remove);
        }
        let d = tour.depots[0];
        let seq = tour.paths.pop().expect("one path left");
        load[d] += seq.iter().map(|&j| instance.demand(j)).sum::<Load>();
        inter.routes.push((d, seq));
    }
    inter
}

fn granular(lists: &NeighborLists, instance: &Instance, u: usize, v: usize) -> bool {
    let m = instance.num_depots();
    (v >= m && lists.of_vertex(u).contains(&(v - m)))
        || (u >= m && lists.of_vertex(v).contains(&(u - m)))
}

/// Best reconnection of a cycle into a route: the cycle is cut at one edge
/// and the resulting path is inserted between two consecutive route vertices.
/// Returns `(delta, route, insert position, path)`.
fn best_reconnection(
    routes: &[(usize, Vec<usize>)],
    cycle: &[usize],
    instance: &Instance,
    filter: impl Fn(usize, usize, usize, usize) -> bool,
) -> Option<(Cost, usize, usize, Vec<usize>)> {
    let l = cycle.len();
    let mut best: Option<(Cost, usize, usize, usize, bool)> = None;
    for (r, (d, seq)) in routes.iter().enumerate() {
        let vert = |p: usize| {
            if p == 0 || p == seq.len() + 1 {
                *d
            } else {
                instance.cv(seq[p - 1])
            }
        };
        for pos in 0..=seq.len() {
            let (p, q) = (vert(pos), vert(pos + 1));
            for i in 0..l {
                let x = instance.cv(cycle[i]);
                let y = instance.cv(cycle[(i + 1) % l]);
                // Forward path starts at y and ends at x; reversed starts at x.
                for rev in [false, true] {
                    let (first, last) = if rev { (x, y) } else { (y, x) };
                    if !filter(p, first, last, q) {
                        continue;
                    }
                    let delta = instance.c(p, first) + instance.c(last, q)
                        - instance.c(x, y)
                        - instance.c(p, q);
                    if best.as_ref().map_or(true, |b| delta < b.0) {
                        best = Some((delta, r, pos, i, rev));
                    }
                }
            }
        }
    }
    best.map(|(delta, r, pos, i, rev)| {
        let mut path: Vec<usize> = (1..=l).map(|s| cycle[(i + s) % l]).collect();
        if rev {
            path.reverse();
        }
        (delta, r, pos, path)
    })
}

/// Links every depot-less subtour into a depot route through the cheapest
/// 2-opt*-style reconnection, restricted to granular endpoint pairs with a
/// fallback to all pairs. Mega tours must already be split.
pub fn eliminate_subtours(
    inter: Intermediate,
    lists: &NeighborLists,
    instance: &Instance,
) -> Result<Solution> {
    if !inter.mega_tours.is_empty() {
        return Err(Error::Internal(
            "mega tours must be split before subtour elimination".into(),
        ));
    }
    let mut routes = inter.routes;
    let mut subtours = inter.subtours;
    if routes.is_empty() {
        let Some(sub) = subtours.first().cloned() else {
            return Err(Error::Internal("intermediate without customers".into()));
        };
        let (d, j) = (0..instance.num_depots())
            .flat_map(|d| sub.iter().map(move |&j| (d, j)))
            .min_by(|&(d1, j1), &(d2, j2)| {
                let k1 = instance.depots[d1].opening_cost + 2.0 * instance.dc(d1, j1);
                let k2 = instance.depots[d2].opening_cost + 2.0 * instance.dc(d2, j2);
                k1.total_cmp(&k2)
            })
            .expect("nonempty subtour");
        let pos = sub.iter().position(|&x| x == j).expect("member");
        let l = sub.len();
        let fwd: Vec<usize> = (0..l).map(|s| sub[(pos + s) % l]).collect();
        let bwd: Vec<usize> = (0..l).map(|s| sub[(pos + l - s) % l]).collect();
        let tail = |s: &[usize]| {
            instance.dc(d, *s.last().expect("nonempty")) - instance.cc(s[l - 1], s[0])
        };
        routes.push((d, if tail(&fwd) <= tail(&bwd) { fwd } else { bwd }));
        subtours.remove(0);
    }
    for sub in subtours {
        let best = best_reconnection(&routes, &sub, instance, |p, f, l, q| {
            granular(lists, instance, p, f) || granular(lists, instance, l, q)
        })
        .or_else(|| best_reconnection(&routes, &sub, instance, |_, _, _, _| true))
        .expect("routes exist");
        let (_, r, pos, path) = best;
        routes[r].1.splice(pos..pos, path);
    }
    Solution::from_routes(instance, routes, &[])
}
