//! Exact localization number for tiny instances, plus an independent
//! game-tree oracle used to validate it.

use super::GameError;
use crate::distances::{hop_distances, INF_HOPS};
use crate::rgg::GraphInstance;

/// State-space cap for the fixed-point solver (subsets of the vertex set).
pub const EXACT_MAX_VERTICES: usize = 12;
/// Cap for the slower validation oracle.
pub const TREE_ORACLE_MAX_VERTICES: usize = 6;

const UNREACH: u8 = u8::MAX;

/// Pairwise hop distances as a flat byte matrix, via per-vertex BFS.
fn distance_matrix(g: &GraphInstance) -> Result<Vec<u8>, GameError> {
    let n = g.n();
    let mut mat = vec![UNREACH; n * n];
    for v in 0..n as u32 {
        let d = hop_distances(g, v)?;
        for u in 0..n {
            mat[v as usize * n + u] = if d[u] == INF_HOPS {
                UNREACH
            } else {
                d[u] as u8
            };
        }
    }
    Ok(mat)
}

/// Closed-neighborhood bitmask of a vertex set.
fn closed_mask(members: u16, nbr: &[u16]) -> u16 {
    let mut out = members;
    let mut m = members;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        out |= nbr[v];
        m &= m - 1;
    }
    out
}

/// Partition the vertices of `scope` by their signature against the sensor
/// set `sensors` (a bitmask); emits each class as a bitmask. Signatures are
/// packed into a u128 key, eight bits per sensor.
fn partition_masks(scope: u16, sensors: u16, n: usize, mat: &[u8]) -> Vec<u16> {
    let mut groups: Vec<(u128, u16)> = Vec::new();
    let mut m = scope;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        let mut key: u128 = 0;
        let mut s = sensors;
        while s != 0 {
            let si = s.trailing_zeros() as usize;
            s &= s - 1;
            key = (key << 8) | u128::from(mat[si * n + v]);
        }
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, mask)) => *mask |= 1 << v,
            None => groups.push((key, 1 << v)),
        }
    }
    groups.into_iter().map(|(_, mask)| mask).collect()
}

fn sensor_sets(n: usize, k: usize) -> Vec<u16> {
    let full = ((1u32 << n) - 1) as u16;
    (0..=full)
        .filter(|m| m.count_ones() as usize == k)
        .collect()
}

/// Smallest `k` such that the cops have a winning strategy, computed as a
/// least fixed point over candidate classes: a class `R` is cop-winning for
/// `k` iff some sensor set of size `k` makes every class of the refined
/// closed neighborhood `N[R]` a singleton or cop-winning. Instances are
/// capped at [`EXACT_MAX_VERTICES`] vertices.
pub fn exact_zeta(g: &GraphInstance) -> Result<u32, GameError> {
    let n = g.n();
    if n == 0 {
        return Err(GameError::Rgg(crate::rgg::RggError::EmptyInstance));
    }
    if n > EXACT_MAX_VERTICES {
        return Err(GameError::TooLarge {
            n,
            max: EXACT_MAX_VERTICES,
        });
    }
    let mat = distance_matrix(g)?;
    let nbr: Vec<u16> = (0..n)
        .map(|v| {
            let mut m = 1u16 << v;
            for u in 0..n {
                if mat[v * n + u] == 1 {
                    m |= 1 << u;
                }
            }
            m
        })
        .collect();
    let full = ((1u32 << n) - 1) as u16;

    for k in 0..n {
        if cops_win_with(k, n, full, &mat, &nbr) {
            return Ok(k as u32);
        }
    }
    // Sensors on all but one vertex always win in round one.
    Ok(n as u32 - 1)
}

fn cops_win_with(k: usize, n: usize, full: u16, mat: &[u8], nbr: &[u16]) -> bool {
    let sets = sensor_sets(n, k);
    let mut winning = vec![false; usize::from(full) + 1];
    for v in 0..n {
        winning[1 << v] = true;
    }
    // Least fixed point: iterate until no class flips to winning.
    loop {
        let mut changed = false;
        for mask in 1..=full {
            if winning[usize::from(mask)] {
                continue;
            }
            let scope = closed_mask(mask, nbr);
            let wins = sets.iter().any(|&s| {
                partition_masks(scope, s, n, mat)
                    .into_iter()
                    .all(|c| winning[usize::from(c)])
            });
            if wins {
                winning[usize::from(mask)] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // Round one partitions the whole vertex set (no neighborhood expansion).
    sets.iter().any(|&s| {
        partition_masks(full, s, n, mat)
            .into_iter()
            .all(|c| winning[usize::from(c)])
    })
}

/// Independent validation oracle: top-down game-tree search with explicit
/// round budgets, over distances computed by Floyd-Warshall instead of BFS.
/// Capped at [`TREE_ORACLE_MAX_VERTICES`] vertices.
pub fn exact_zeta_tree_oracle(g: &GraphInstance) -> Result<u32, GameError> {
    let n = g.n();
    if n == 0 {
        return Err(GameError::Rgg(crate::rgg::RggError::EmptyInstance));
    }
    if n > TREE_ORACLE_MAX_VERTICES {
        return Err(GameError::TooLarge {
            n,
            max: TREE_ORACLE_MAX_VERTICES,
        });
    }
    // Floyd-Warshall on the metric adjacency.
    let r2 = g.r() * g.r();
    let big = 100u32; // larger than any finite distance on <= 6 vertices
    let mut dist = vec![big; n * n];
    for u in 0..n {
        dist[u * n + u] = 0;
        for v in 0..n {
            if u != v && g.vertex_dist2(u as u32, v as u32) <= r2 {
                dist[u * n + v] = 1;
            }
        }
    }
    for w in 0..n {
        for u in 0..n {
            for v in 0..n {
                let through = dist[u * n + w].saturating_add(dist[w * n + v]);
                if through < dist[u * n + v] {
                    dist[u * n + v] = through;
                }
            }
        }
    }

    let full = ((1u32 << n) - 1) as u16;
    let neighborhood = |mask: u16| -> u16 {
        let mut out = mask;
        for v in 0..n {
            if mask & (1 << v) != 0 {
                for u in 0..n {
                    if dist[v * n + u] <= 1 {
                        out |= 1 << u;
                    }
                }
            }
        }
        out
    };
    let split = |scope: u16, sensors: &[usize]| -> Vec<u16> {
        let mut classes: Vec<(Vec<u32>, u16)> = Vec::new();
        for v in 0..n {
            if scope & (1 << v) == 0 {
                continue;
            }
            let sig: Vec<u32> = sensors.iter().map(|&s| dist[s * n + v]).collect();
            match classes.iter_mut().find(|(k, _)| *k == sig) {
                Some((_, m)) => *m |= 1 << v,
                None => classes.push((sig, 1 << v)),
            }
        }
        classes.into_iter().map(|(_, m)| m).collect()
    };

    let all_sets = |k: usize| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for v in start..n {
                cur.push(v);
                rec(v + 1, n, k, cur, out);
                cur.pop();
            }
        }
        rec(0, n, k, &mut cur, &mut out);
        out
    };

    // cops_can_pin(class, budget): the cops force a singleton within
    // `budget` further rounds. A budget of 2^n rounds is enough for any
    // winnable position since winning strategies never need to revisit a
    // class without progress.
    let budget_cap = 1usize << n;
    for k in 0..n {
        let sets = all_sets(k);
        let mut memo: std::collections::HashMap<(u16, usize), bool> =
            std::collections::HashMap::new();
        fn pin(
            class: u16,
            budget: usize,
            sets: &[Vec<usize>],
            neighborhood: &dyn Fn(u16) -> u16,
            split: &dyn Fn(u16, &[usize]) -> Vec<u16>,
            memo: &mut std::collections::HashMap<(u16, usize), bool>,
        ) -> bool {
            if class.count_ones() == 1 {
                return true;
            }
            if budget == 0 {
                return false;
            }
            if let Some(&v) = memo.get(&(class, budget)) {
                return v;
            }
            let scope = neighborhood(class);
            let res = sets.iter().any(|s| {
                split(scope, s)
                    .into_iter()
                    .all(|c| pin(c, budget - 1, sets, neighborhood, split, memo))
            });
            memo.insert((class, budget), res);
            res
        }
        let wins = sets.iter().any(|s| {
            split(full, s)
                .into_iter()
                .all(|c| pin(c, budget_cap, &sets, &neighborhood, &split, &mut memo))
        });
        if wins {
            return Ok(k as u32);
        }
    }
    Ok(n as u32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::rgg::{sample_instance, MetricMode, ModelParams, SampleMode};

    fn instance(positions: Vec<Point>, side: f64, r: f64) -> GraphInstance {
        GraphInstance::from_parts(
            side,
            r,
            MetricMode::Torus,
            SampleMode::Binomial,
            0,
            positions,
        )
    }

    /// Complete graph on m vertices: a tight cluster.
    pub(crate) fn complete(m: usize) -> GraphInstance {
        let positions = (0..m)
            .map(|i| Point::new(10.0 + 0.01 * i as f64, 10.0))
            .collect();
        instance(positions, 30.0, 1.0)
    }

    /// Path on m vertices: collinear points spaced 0.9 r.
    pub(crate) fn path(m: usize) -> GraphInstance {
        let positions = (0..m)
            .map(|i| Point::new(5.0 + 0.9 * i as f64, 10.0))
            .collect();
        instance(positions, 30.0, 1.0)
    }

    #[test]
    fn single_vertex_needs_no_sensors() {
        let g = instance(vec![Point::new(1.0, 1.0)], 10.0, 1.0);
        assert_eq!(exact_zeta(&g).unwrap(), 0);
        assert_eq!(exact_zeta_tree_oracle(&g).unwrap(), 0);
    }

    #[test]
    fn complete_graphs_need_m_minus_one() {
        for m in 2..=6 {
            assert_eq!(exact_zeta(&complete(m)).unwrap(), m as u32 - 1, "K_{m}");
        }
    }

    #[test]
    fn paths_need_one_sensor() {
        for m in 2..=6 {
            assert_eq!(exact_zeta(&path(m)).unwrap(), 1, "P_{m}");
        }
    }

    #[test]
    fn tree_oracle_agrees_on_named_families() {
        for m in 2..=6 {
            assert_eq!(
                exact_zeta(&complete(m)).unwrap(),
                exact_zeta_tree_oracle(&complete(m)).unwrap()
            );
            assert_eq!(
                exact_zeta(&path(m)).unwrap(),
                exact_zeta_tree_oracle(&path(m)).unwrap()
            );
        }
    }

    #[test]
    fn tree_oracle_agrees_on_random_small_instances() {
        for seed in 0..12 {
            let n = 3 + seed % 4;
            let g = sample_instance(&ModelParams::new(n, 2.2, seed)).unwrap();
            assert_eq!(
                exact_zeta(&g).unwrap(),
                exact_zeta_tree_oracle(&g).unwrap(),
                "n={n} seed={seed}"
            );
        }
    }

    #[test]
    fn oversized_instance_rejected() {
        let g = sample_instance(&ModelParams::new(13, 2.0, 0)).unwrap();
        assert!(matches!(exact_zeta(&g), Err(GameError::TooLarge { .. })));
        let g7 = sample_instance(&ModelParams::new(7, 2.0, 0)).unwrap();
        assert!(matches!(
            exact_zeta_tree_oracle(&g7),
            Err(GameError::TooLarge { .. })
        ));
    }

    #[test]
    fn empty_instance_rejected() {
        let g = instance(vec![], 10.0, 1.0);
        assert!(exact_zeta(&g).is_err());
    }
}
