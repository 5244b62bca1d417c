//! Exact discrete optimal transport (Wasserstein-1) by successive shortest
//! paths with Dijkstra potentials on the dense bipartite network.

/// min Σ c_ij f_ij over couplings f of the probability vectors `a`, `b`.
/// Both inputs are normalized to unit mass first. `cost[i][j] ≥ 0`.
pub fn transport_cost(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let m = b.len();
    if n == 0 || m == 0 {
        return 0.0;
    }
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    let mut supply: Vec<f64> = a.iter().map(|x| x / sa).collect();
    let mut demand: Vec<f64> = b.iter().map(|x| x / sb).collect();
    let mut flow = vec![vec![0.0f64; m]; n];
    // Potentials: sources 0..n, sinks n..n+m.
    let mut pot = vec![0.0f64; n + m];
    for j in 0..m {
        pot[n + j] = (0..n).map(|i| cost[i][j]).fold(f64::INFINITY, f64::min);
    }
    const EPS: f64 = 1e-15;
    let mut dist = vec![0.0f64; n + m];
    let mut prev = vec![usize::MAX; n + m];
    let mut done = vec![false; n + m];
    loop {
        let remaining: f64 = supply.iter().sum();
        if remaining <= 1e-14 || demand.iter().sum::<f64>() <= 1e-14 {
            break;
        }
        for v in 0..n + m {
            dist[v] = f64::INFINITY;
            prev[v] = usize::MAX;
            done[v] = false;
        }
        for i in 0..n {
            if supply[i] > EPS {
                dist[i] = 0.0;
            }
        }
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..n + m {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u < n {
                for j in 0..m {
                    let v = n + j;
                    if done[v] {
                        continue;
                    }
                    let rc = (cost[u][j] + pot[u] - pot[v]).max(0.0);
                    if best + rc < dist[v] {
                        dist[v] = best + rc;
                        prev[v] = u;
                    }
                }
            } else {
                let j = u - n;
                for i in 0..n {
                    if done[i] || flow[i][j] <= EPS {
                        continue;
                    }
                    let rc = (-cost[i][j] + pot[u] - pot[i]).max(0.0);
                    if best + rc < dist[i] {
                        dist[i] = best + rc;
                        prev[i] = u;
                    }
                }
            }
        }
        let mut target = usize::MAX;
        let mut best = f64::INFINITY;
        for j in 0..m {
            if demand[j] > EPS && dist[n + j] < best {
                best = dist[n + j];
                target = n + j;
            }
        }
        if target == usize::MAX {
            break;
        }
        for v in 0..n + m {
            pot[v] += dist[v].min(best);
        }
        let mut bottleneck = demand[target - n];
        let mut v = target;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u >= n {
                bottleneck = bottleneck.min(flow[v][u - n]);
            }
            v = u;
        }
        bottleneck = bottleneck.min(supply[v]);
        let source = v;
        let mut v = target;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u < n {
                flow[u][v - n] += bottleneck;
            } else {
                flow[v][u - n] -= bottleneck;
            }
            v = u;
        }
        supply[source] -= bottleneck;
        demand[target - n] -= bottleneck;
    }
    let mut total = crate::stats::CompensatedSum::new();
    for i in 0..n {
        for j in 0..m {
            if flow[i][j] > 0.0 {
                total.add(flow[i][j] * cost[i][j]);
            }
        }
    }
    total.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    #[test]
    fn split_mass_to_a_point() {
        let c = vec![vec![0.0], vec![3.0]];
        assert!((transport_cost(&[0.5, 0.5], &[1.0], &c) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn uniform_assignment_matches_permutation_brute_force() {
        let pts_a = [0.1f64, 0.7, 0.35, 0.9, 0.2];
        let pts_b = [0.5, 0.05, 0.95, 0.3, 0.6];
        let cost: Vec<Vec<f64>> = pts_a
            .iter()
            .map(|x| pts_b.iter().map(|y: &f64| (x - y).abs().sqrt()).collect())
            .collect();
        let best = (0..5)
            .permutations(5)
            .map(|p| p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
            / 5.0;
        let w = transport_cost(&[0.2; 5], &[0.2; 5], &cost);
        assert!((w - best).abs() < 1e-12, "{w} vs {best}");
    }

    #[test]
    fn one_dimensional_closed_form() {
        // W1 on the line equals the L1 distance between the CDFs.
        let xs = [0.0f64, 1.0, 2.5, 4.0];
        let a = [0.1, 0.4, 0.3, 0.2];
        let b = [0.3, 0.1, 0.1, 0.5];
        let cost: Vec<Vec<f64>> = xs.iter().map(|x| xs.iter().map(|y| (x - y).abs()).collect()).collect();
        let mut ca = 0.0f64;
        let mut cb = 0.0f64;
        let mut expect = 0.0;
        for k in 0..3 {
            ca += a[k];
            cb += b[k];
            expect += (ca - cb).abs() * (xs[k + 1] - xs[k]);
        }
        assert!((transport_cost(&a, &b, &cost) - expect).abs() < 1e-12);
    }
}
