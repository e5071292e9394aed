use crate::model::Instance;

/// For every vertex (depots first, then customers), the `alpha` nearest
/// customers sorted by travel cost, ties broken by customer index.
#[derive(Debug, Clone)]
pub struct NeighborLists {
    alpha: usize,
    lists: Vec<Vec<usize>>,
}

impl NeighborLists {
    pub fn build(instance: &Instance, alpha: usize) -> Self {
        let alpha = alpha.max(1);
        let n = instance.num_customers();
        let total = instance.num_depots() + n;
        let mut lists = Vec::with_capacity(total);
        for v in 0..total {
            let mut cand: Vec<usize> = (0..n).filter(|&j| instance.cv(j) != v).collect();
            cand.sort_by(|&a, &b| {
                instance
                    .c(v, instance.cv(a))
                    .total_cmp(&instance.c(v, instance.cv(b)))
                    .then(a.cmp(&b))
            });
            cand.truncate(alpha);
            lists.push(cand);
        }
        NeighborLists { alpha, lists }
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Nearest customers of vertex `v`.
    pub fn of_vertex(&self, v: usize) -> &[usize] {
        &self.lists[v]
    }

    /// Nearest customers of customer `j`, given the instance's depot count.
    pub fn of_customer(&self, m: usize, j: usize) -> &[usize] {
        &self.lists[m + j]
    }

    pub fn is_neighbor(&self, m: usize, a: usize, b: usize) -> bool {
        self.lists[m + a].contains(&b)
    }
}
