//! Slow reference implementations shared by the oracle tests.
#![allow(dead_code)]

use raterpower_core::Direction;

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

pub fn brute_p_value(alt: &[f64], null: &[f64]) -> (f64, Direction) {
    let greater = median(alt) >= median(null);
    let mut hits = 0u64;
    for &a in alt {
        for &z in null {
            let extreme = if greater { z >= a } else { z < a };
            hits += extreme as u64;
        }
    }
    let dir = if greater { Direction::GreaterEqual } else { Direction::Less };
    (hits as f64 / (alt.len() * null.len()) as f64, dir)
}

// Min-cost flow on the complete bipartite graph: x_i supplies |y| units,
// y_j demands |x| units, so every unit carries mass 1/(|x||y|).
pub fn transport_lp(x: &[f64], y: &[f64]) -> f64 {
    let (m, n) = (x.len(), y.len());
    let nodes = m + n + 2;
    let (src, dst) = (m + n, m + n + 1);
    let mut cap = vec![vec![0i64; nodes]; nodes];
    let mut cost = vec![vec![0f64; nodes]; nodes];
    for i in 0..m {
        cap[src][i] = n as i64;
        for j in 0..n {
            cap[i][m + j] = i64::MAX / 4;
            cost[i][m + j] = (x[i] - y[j]).abs();
            cost[m + j][i] = -(x[i] - y[j]).abs();
        }
    }
    for j in 0..n {
        cap[m + j][dst] = m as i64;
    }
    let mut total = 0.0;
    loop {
        // Bellman-Ford on the residual graph
        let mut dist = vec![f64::INFINITY; nodes];
        let mut prev = vec![usize::MAX; nodes];
        dist[src] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for u in 0..nodes {
                if dist[u].is_infinite() {
                    continue;
                }
                for v in 0..nodes {
                    if cap[u][v] > 0 && dist[u] + cost[u][v] < dist[v] - 1e-15 {
                        dist[v] = dist[u] + cost[u][v];
                        prev[v] = u;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[dst].is_infinite() {
            break;
        }
        let mut push = i64::MAX;
        let mut v = dst;
        while v != src {
            push = push.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = dst;
        while v != src {
            let u = prev[v];
            cap[u][v] -= push;
            cap[v][u] += push;
            v = u;
        }
        total += push as f64 * dist[dst];
    }
    total / (m * n) as f64
}

pub fn brute_ranks(abs: &[f64]) -> Vec<f64> {
    abs.iter()
        .map(|&a| {
            let below = abs.iter().filter(|&&b| b < a).count() as f64;
            let equal = abs.iter().filter(|&&b| b == a).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn brute_wilcoxon(d: &[f64]) -> f64 {
    let nz: Vec<f64> = d.iter().copied().filter(|&v| v != 0.0).collect();
    let ranks = brute_ranks(&nz.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let observed: f64 = nz.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let m = nz.len();
    let mut hits = 0u64;
    for mask in 0u64..(1 << m) {
        let w: f64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        hits += (w >= observed) as u64;
    }
    hits as f64 / (1u64 << m) as f64
}

pub fn brute_permutation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let observed = mean(y) - mean(x);
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let (mut xs, mut ys) = (x.to_vec(), y.to_vec());
        for i in 0..n {
            if mask >> i & 1 == 1 {
                std::mem::swap(&mut xs[i], &mut ys[i]);
            }
        }
        hits += (mean(&ys) - mean(&xs) >= observed) as u64;
    }
    hits as f64 / (1u64 << n) as f64
}
