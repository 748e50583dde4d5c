//! Exact solvers for the square assignment problems behind the permutation
//! quotient metrics.

use std::collections::VecDeque;

/// Row-major `n × n` cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    /// # Panics
    /// If `data.len() != n * n`.
    pub fn new(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "cost matrix must be square");
        Self { n, data }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, data }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    /// Total cost of assigning row `i` to column `assignment[i]`.
    pub fn total(&self, assignment: &[usize]) -> f64 {
        assignment.iter().enumerate().map(|(i, &j)| self.get(i, j)).sum()
    }

    /// Largest single cost of an assignment.
    pub fn max_edge(&self, assignment: &[usize]) -> f64 {
        assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| self.get(i, j))
            .fold(0.0, f64::max)
    }
}

/// Minimum-sum perfect assignment.
///
/// Shortest augmenting paths with dual potentials (the Jonker–Volgenant /
/// Hungarian family), `O(n³)`. Returns `assignment[row] = col` and its cost.
pub fn solve_min_sum(cost: &CostMatrix) -> (Vec<usize>, f64) {
    let n = cost.size();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // 1-based internally; index 0 is the virtual root column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost.get(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[row_of[j] - 1] = j - 1;
    }
    let total = cost.total(&assignment);
    (assignment, total)
}

/// Minimum-bottleneck perfect assignment.
///
/// Binary search over the distinct costs; each threshold is tested with a
/// Hopcroft–Karp maximum matching on the edges at or below it.
pub fn solve_bottleneck(cost: &CostMatrix) -> (Vec<usize>, f64) {
    let n = cost.size();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    let mut levels: Vec<f64> = cost.data.clone();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    // The largest cost always admits the complete bipartite graph.
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    let mut best = perfect_matching(cost, levels[hi]).expect("complete graph has a perfect matching");
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match perfect_matching(cost, levels[mid]) {
            Some(m) => {
                best = m;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    (best, levels[lo])
}

/// Perfect matching using only edges with cost `<= threshold`, if one exists.
fn perfect_matching(cost: &CostMatrix, threshold: f64) -> Option<Vec<usize>> {
    let n = cost.size();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| cost.get(i, j) <= threshold).collect())
        .collect();
    let matching = hopcroft_karp(n, &adj);
    matching.iter().all(Option::is_some).then(|| matching.into_iter().flatten().collect())
}

/// Maximum bipartite matching; returns the column matched to each row.
fn hopcroft_karp(n: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    const INF: usize = usize::MAX;
    let mut match_row: Vec<Option<usize>> = vec![None; n];
    let mut match_col: Vec<Option<usize>> = vec![None; n];
    let mut dist = vec![INF; n];

    loop {
        let mut queue = VecDeque::new();
        for i in 0..n {
            if match_row[i].is_none() {
                dist[i] = 0;
                queue.push_back(i);
            } else {
                dist[i] = INF;
            }
        }
        let mut found = false;
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                match match_col[j] {
                    None => found = true,
                    Some(k) if dist[k] == INF => {
                        dist[k] = dist[i] + 1;
                        queue.push_back(k);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        for i in 0..n {
            if match_row[i].is_none() {
                augment(i, adj, &mut match_row, &mut match_col, &mut dist);
            }
        }
    }
    match_row
}

fn augment(
    i: usize,
    adj: &[Vec<usize>],
    match_row: &mut [Option<usize>],
    match_col: &mut [Option<usize>],
    dist: &mut [usize],
) -> bool {
    for &j in &adj[i] {
        let ok = match match_col[j] {
            None => true,
            Some(k) => dist[k] == dist[i] + 1 && augment(k, adj, match_row, match_col, dist),
        };
        if ok {
            match_row[i] = Some(j);
            match_col[j] = Some(i);
            return true;
        }
    }
    dist[i] = usize::MAX;
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(cost: &CostMatrix, score: impl Fn(&CostMatrix, &[usize]) -> f64) -> f64 {
        fn rec(
            k: usize,
            perm: &mut Vec<usize>,
            cost: &CostMatrix,
            score: &dyn Fn(&CostMatrix, &[usize]) -> f64,
            best: &mut f64,
        ) {
            if k == perm.len() {
                *best = best.min(score(cost, perm));
                return;
            }
            for i in k..perm.len() {
                perm.swap(k, i);
                rec(k + 1, perm, cost, score, best);
                perm.swap(k, i);
            }
        }
        let mut perm: Vec<usize> = (0..cost.size()).collect();
        let mut best = f64::INFINITY;
        rec(0, &mut perm, cost, &score, &mut best);
        best
    }

    #[test]
    fn classic_three_by_three() {
        let c = CostMatrix::new(3, vec![4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0]);
        let (a, total) = solve_min_sum(&c);
        assert_eq!(total, 5.0);
        assert_eq!(a, vec![1, 0, 2]);
    }

    #[test]
    fn bottleneck_small() {
        let c = CostMatrix::new(2, vec![1.0, 5.0, 4.0, 1.0]);
        assert_eq!(solve_bottleneck(&c).1, 1.0);
        let c = CostMatrix::new(2, vec![1.0, 2.0, 1.5, 9.0]);
        // Diagonal max is 9, anti-diagonal max is 2.
        let (a, b) = solve_bottleneck(&c);
        assert_eq!((a, b), (vec![1, 0], 2.0));
    }

    #[test]
    fn empty_and_singleton() {
        assert_eq!(solve_min_sum(&CostMatrix::new(0, vec![])).1, 0.0);
        assert_eq!(solve_bottleneck(&CostMatrix::new(1, vec![3.5])), (vec![0], 3.5));
    }

    #[test]
    fn matches_brute_force_on_pseudo_random_costs() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for n in 1..=6 {
            for _ in 0..30 {
                let c = CostMatrix::new(n, (0..n * n).map(|_| next()).collect());
                let (a, total) = solve_min_sum(&c);
                assert!((total - brute(&c, CostMatrix::total)).abs() < 1e-12);
                assert!((c.total(&a) - total).abs() < 1e-15);
                let (b, bott) = solve_bottleneck(&c);
                assert_eq!(bott, brute(&c, CostMatrix::max_edge));
                assert_eq!(c.max_edge(&b), bott);
            }
        }
    }
}
