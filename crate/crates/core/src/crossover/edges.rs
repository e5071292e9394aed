use std::collections::BTreeMap;

use crate::model::{Instance, Solution};
use crate::{Error, Result};

/// Undirected edge multiset over vertex ids (depots first, then customers).
/// Loops `(i, i)` stand for the dummy depot loops and add 2 to the degree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeMultiset {
    counts: BTreeMap<(usize, usize), u32>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

impl EdgeMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Route edges of every route: depot to first, consecutive customers,
    /// last back to depot.
    pub fn from_solution(solution: &Solution, instance: &Instance) -> Self {
        let mut set = Self::new();
        for r in &solution.routes {
            let mut prev = r.depot;
            for &j in &r.customers {
                set.insert(prev, instance.cv(j));
                prev = instance.cv(j);
            }
            set.insert(prev, r.depot);
        }
        set
    }

    pub fn insert(&mut self, u: usize, v: usize) {
        *self.counts.entry(key(u, v)).or_default() += 1;
    }

    /// Removes one copy; false when absent.
    pub fn remove(&mut self, u: usize, v: usize) -> bool {
        let k = key(u, v);
        match self.counts.get_mut(&k) {
            Some(c) if *c > 1 => {
                *c -= 1;
                true
            }
            Some(_) => {
                self.counts.remove(&k);
                true
            }
            None => false,
        }
    }

    pub fn count(&self, u: usize, v: usize) -> u32 {
        self.counts.get(&key(u, v)).copied().unwrap_or(0)
    }

    /// Distinct edges with multiplicities, in ascending order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), u32)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    /// Every copy of every edge, in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries()
            .flat_map(|(k, c)| std::iter::repeat(k).take(c as usize))
    }

    pub fn len(&self) -> usize {
        self.counts.values().map(|&c| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn degrees(&self, num_vertices: usize) -> Vec<usize> {
        let mut deg = vec![0; num_vertices];
        for ((u, v), c) in self.entries() {
            deg[u] += c as usize;
            deg[v] += c as usize;
        }
        deg
    }

    pub fn without_loops(&self) -> Self {
        EdgeMultiset {
            counts: self
                .counts
                .iter()
                .filter(|(k, _)| k.0 != k.1)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }
}

/// Edge multisets of both parents, with dummy loops added at each depot on
/// the side with the smaller degree so that every depot degree matches.
pub fn extend_with_dummy_loops(
    parent_a: &Solution,
    parent_b: &Solution,
    instance: &Instance,
) -> Result<(EdgeMultiset, EdgeMultiset)> {
    let total = instance.num_depots() + instance.num_customers();
    let mut ea = EdgeMultiset::from_solution(parent_a, instance);
    let mut eb = EdgeMultiset::from_solution(parent_b, instance);
    let (da, db) = (ea.degrees(total), eb.degrees(total));
    for v in 0..total {
        if v >= instance.num_depots() {
            if da[v] != 2 || db[v] != 2 {
                return Err(Error::Internal(format!(
                    "customer vertex {v} does not have degree 2"
                )));
            }
            continue;
        }
        let diff = da[v].abs_diff(db[v]);
        if diff % 2 != 0 {
            return Err(Error::Internal(format!(
                "odd degree difference at depot {v}"
            )));
        }
        let lesser = if da[v] < db[v] { &mut ea } else { &mut eb };
        for _ in 0..diff / 2 {
            lesser.insert(v, v);
        }
    }
    Ok((ea, eb))
}
