use crate::model::Signature;
use crate::Cost;

/// Indices of the members ADQ removes, in removal order, until `keep`
/// remain. Clones go first; then the member with the worst biased fitness
/// `rank_f + (1 - n_elite / size) * rank_div` leaves, never the best-f one.
/// Ranks are 0-based and ties break by index; among equally bad members
/// the highest index leaves.
pub fn adq_removals(
    costs: &[Cost],
    sigs: &[Signature],
    keep: usize,
    n_close: usize,
    n_elite: usize,
) -> Vec<usize> {
    let n = costs.len();
    let mut dist = vec![vec![0u32; n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let d = sigs[a]
                .distance(&sigs[b])
                .expect("signatures of one instance");
            dist[a][b] = d;
            dist[b][a] = d;
        }
    }
    let mut alive: Vec<usize> = (0..n).collect();
    let mut removed = Vec::new();
    let best_of = |alive: &[usize]| {
        *alive
            .iter()
            .min_by(|&&a, &&b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)))
            .expect("nonempty")
    };
    while alive.len() > keep.max(1) {
        let best = best_of(&alive);
        let clone = alive.iter().copied().filter(|&a| a != best).find(|&a| {
            alive
                .iter()
                .any(|&b| b != a && dist[a][b] == 0 && (b < a || b == best))
        });
        let victim =
            clone.unwrap_or_else(|| worst_biased(&alive, costs, &dist, n_close, n_elite, best));
        alive.retain(|&x| x != victim);
        removed.push(victim);
    }
    removed
}

fn worst_biased(
    alive: &[usize],
    costs: &[Cost],
    dist: &[Vec<u32>],
    n_close: usize,
    n_elite: usize,
    best: usize,
) -> usize {
    let size = alive.len();
    let contribution: Vec<f64> = alive
        .iter()
        .map(|&a| {
            let mut ds: Vec<u32> = alive
                .iter()
                .filter(|&&b| b != a)
                .map(|&b| dist[a][b])
                .collect();
            ds.sort_unstable();
            let k = n_close.min(ds.len()).max(1);
            ds.iter().take(k).map(|&d| d as f64).sum::<f64>() / k as f64
        })
        .collect();
    let mut by_f: Vec<usize> = (0..size).collect();
    by_f.sort_by(|&x, &y| {
        costs[alive[x]]
            .total_cmp(&costs[alive[y]])
            .then(alive[x].cmp(&alive[y]))
    });
    let mut by_div: Vec<usize> = (0..size).collect();
    by_div.sort_by(|&x, &y| {
        contribution[y]
            .total_cmp(&contribution[x])
            .then(alive[x].cmp(&alive[y]))
    });
    let mut rank_f = vec![0.0; size];
    let mut rank_div = vec![0.0; size];
    for (r, &x) in by_f.iter().enumerate() {
        rank_f[x] = r as f64;
    }
    for (r, &x) in by_div.iter().enumerate() {
        rank_div[x] = r as f64;
    }
    let w = 1.0 - n_elite as f64 / size as f64;
    (0..size)
        .filter(|&x| alive[x] != best)
        .max_by(|&x, &y| {
            let (bx, by) = (rank_f[x] + w * rank_div[x], rank_f[y] + w * rank_div[y]);
            bx.total_cmp(&by).then(alive[x].cmp(&alive[y]))
        })
        .map(|x| alive[x])
        .expect("at least two members")
}
