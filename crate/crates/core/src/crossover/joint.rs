use rand::seq::SliceRandom;
use rand::Rng;

use super::edges::EdgeMultiset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }

    fn idx(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JointEdge {
    pub u: usize,
    pub v: usize,
    pub side: Side,
}

impl JointEdge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    fn other_end(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Symmetric difference of the two extended parent edge multisets, every
/// copy labelled with the parent that owns the surplus.
#[derive(Debug, Clone)]
pub struct JointGraph {
    num_vertices: usize,
    edges: Vec<JointEdge>,
    adj: Vec<[Vec<usize>; 2]>,
}

impl JointGraph {
    pub fn build(ea: &EdgeMultiset, eb: &EdgeMultiset, num_vertices: usize) -> Result<Self> {
        let mut edges = Vec::new();
        let mut keys: Vec<(usize, usize)> =
            ea.entries().chain(eb.entries()).map(|(k, _)| k).collect();
        keys.sort_unstable();
        keys.dedup();
        for (u, v) in keys {
            let (ca, cb) = (ea.count(u, v), eb.count(u, v));
            let side = if ca > cb { Side::A } else { Side::B };
            for _ in 0..ca.abs_diff(cb) {
                edges.push(JointEdge { u, v, side });
            }
        }
        let mut adj = vec![[Vec::new(), Vec::new()]; num_vertices];
        for (k, e) in edges.iter().enumerate() {
            if e.u >= num_vertices || e.v >= num_vertices {
                return Err(Error::Internal("joint edge vertex out of range".into()));
            }
            adj[e.u][e.side.idx()].push(k);
            if !e.is_loop() {
                adj[e.v][e.side.idx()].push(k);
            }
        }
        let g = JointGraph {
            num_vertices,
            edges,
            adj,
        };
        for v in 0..num_vertices {
            let (a, b) = (g.degree(v, Side::A), g.degree(v, Side::B));
            if a != b || (a + b) % 2 != 0 {
                return Err(Error::Internal(format!(
                    "joint graph unbalanced at vertex {v}: {a} A vs {b} B"
                )));
            }
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[JointEdge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Degree contributed by edges of one side; loops count twice.
    pub fn degree(&self, v: usize, side: Side) -> usize {
        self.adj[v][side.idx()]
            .iter()
            .map(|&k| if self.edges[k].is_loop() { 2 } else { 1 })
            .sum()
    }
}

/// Closed walk in the joint graph; edge labels alternate starting with A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbCycle {
    pub edges: Vec<usize>,
}

impl AbCycle {
    pub fn vertices(&self, graph: &JointGraph) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .edges
            .iter()
            .flat_map(|&k| [graph.edges[k].u, graph.edges[k].v])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

/// Splits the joint graph into AB-cycles by random alternating walks.
pub fn partition_ab_cycles(graph: &JointGraph, rng: &mut impl Rng) -> Result<Vec<AbCycle>> {
    let mut used = vec![false; graph.edges.len()];
    let mut cycles = Vec::new();
    loop {
        let open: Vec<usize> = (0..graph.edges.len())
            .filter(|&k| !used[k] && graph.edges[k].side == Side::A)
            .collect();
        let Some(&first) = open.choose(rng) else {
            break;
        };
        let e = graph.edges[first];
        let start = if rng.gen::<bool>() { e.u } else { e.v };
        let mut path_v = vec![start];
        let mut path_e: Vec<usize> = Vec::new();
        loop {
            let side = if path_e.len() % 2 == 0 {
                Side::A
            } else {
                Side::B
            };
            let at = *path_v.last().expect("nonempty path");
            let cand: Vec<usize> = graph.adj[at][side.idx()]
                .iter()
                .copied()
                .filter(|&k| !used[k])
                .collect();
            let k = if path_e.is_empty() {
                first
            } else {
                *cand.choose(rng).ok_or_else(|| {
                    Error::Internal(format!("alternating walk stuck at vertex {at}"))
                })?
            };
            used[k] = true;
            let next = graph.edges[k].other_end(at);
            path_e.push(k);
            path_v.push(next);
            let len = path_e.len();
            let close = (0..len)
                .rev()
                .find(|&s| path_v[s] == next && (len - s) % 2 == 0);
            if let Some(s) = close {
                let mut edges = path_e.split_off(s);
                path_v.truncate(s + 1);
                // Rotate so the cycle starts with an A edge.
                if graph.edges[edges[0]].side == Side::B {
                    edges.rotate_left(1);
                }
                cycles.push(AbCycle { edges });
                if path_e.is_empty() {
                    break;
                }
            }
        }
    }
    Ok(cycles)
}

/// Union of AB-cycles; `edges` index the joint graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ESet {
    pub cycles: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Merges cycles that share a vertex, then merges random pairs of E-sets
/// until at most `beta` remain.
pub fn group_esets(
    graph: &JointGraph,
    cycles: &[AbCycle],
    beta: usize,
    rng: &mut impl Rng,
) -> Vec<ESet> {
    let mut parent: Vec<usize> = (0..cycles.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let mut owner: Vec<Option<usize>> = vec![None; graph.num_vertices];
    for (c, cyc) in cycles.iter().enumerate() {
        for v in cyc.vertices(graph) {
            match owner[v] {
                Some(o) => {
                    let (ra, rb) = (find(&mut parent, o), find(&mut parent, c));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
                None => owner[v] = Some(c),
            }
        }
    }
    let mut sets: Vec<ESet> = Vec::new();
    let mut slot: Vec<Option<usize>> = vec![None; cycles.len()];
    for c in 0..cycles.len() {
        let r = find(&mut parent, c);
        let s = *slot[r].get_or_insert_with(|| {
            sets.push(ESet {
                cycles: Vec::new(),
                edges: Vec::new(),
            });
            sets.len() - 1
        });
        sets[s].cycles.push(c);
        sets[s].edges.extend_from_slice(&cycles[c].edges);
    }
    let beta = beta.max(1);
    while sets.len() > beta {
        let i = rng.gen_range(0..sets.len());
        let mut j = rng.gen_range(0..sets.len() - 1);
        if j >= i {
            j += 1;
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let taken = sets.swap_remove(hi);
        sets[lo].cycles.extend(taken.cycles);
        sets[lo].edges.extend(taken.edges);
    }
    for s in &mut sets {
        s.cycles.sort_unstable();
    }
    sets
}
