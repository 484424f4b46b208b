//! Single-source hop distances over implicit adjacency.
//!
//! Layered frontier expansion on a fine cell grid, processed cell by cell.
//! Exact prunings keep the per-layer work near-linear at millions of
//! vertices:
//!
//! * a vertex reachable in `k` hops is within metric distance `k * r` of the
//!   source, so cells and vertices beyond that bound are skipped outright;
//! * for a candidate cell, frontier cells are visited in order of increasing
//!   rect-to-rect lower-bound distance; a nonempty frontier cell whose
//!   rect-to-rect upper bound is within `r` settles the whole candidate cell
//!   at once, with no per-point tests;
//! * remaining "crossing" frontier cells hold their points sorted by source
//!   distance, and a frontier point within `r` of `v` satisfies
//!   `|d_src(p) - d_src(v)| <= r`, so only that window is ever scanned.

use crate::geometry::Point;
use crate::rgg::{GraphInstance, RggError, VertexId};

/// Sentinel hop count for unreachable vertices.
pub const INF_HOPS: u32 = u32::MAX;

/// Exact unweighted shortest-hop distances from `source`; `INF_HOPS` marks
/// unreachable vertices.
pub fn hop_distances(g: &GraphInstance, source: VertexId) -> Result<Vec<u32>, RggError> {
    g.check_vertex(source)?;
    let n = g.n();
    let positions = g.positions();
    let r = g.r();
    let r2 = r * r;
    let side = g.side();
    let wrap = g.wraps();
    let fine = g.fine_grid();
    let m = fine.cells_per_axis() as usize;
    let cs = fine.cell_side();

    let src_pos = positions[source as usize];
    let mut dist = vec![INF_HOPS; n];
    dist[source as usize] = 0;
    if n == 1 {
        return Ok(dist);
    }

    // Metric distance from the source to every vertex, fixed for the run.
    let d_src: Vec<f64> = positions.iter().map(|&p| g.distance(src_pos, p)).collect();
    let slack = 1e-9 * (side + r);

    // Offsets between cells, sorted by the rect-to-rect lower bound distance
    // `lb`. `ub_gap` is the matching upper bound. When the offset block would
    // wrap onto itself, fall back to scanning all frontier cells.
    let max_rad = (r / cs).ceil() as i64 + 1;
    let dense = 2 * max_rad + 1 >= m as i64;
    let mut offsets: Vec<CellOffset> = Vec::new();
    if !dense {
        for di in -max_rad..=max_rad {
            for dj in -max_rad..=max_rad {
                let gx = cs * ((di.abs() - 1).max(0)) as f64;
                let gy = cs * ((dj.abs() - 1).max(0)) as f64;
                let lb2 = gx * gx + gy * gy;
                if lb2 <= r2 {
                    let hx = cs * (di.abs() + 1) as f64;
                    let hy = cs * (dj.abs() + 1) as f64;
                    offsets.push(CellOffset {
                        di: di as i32,
                        dj: dj as i32,
                        lb2,
                        ub2: hx * hx + hy * hy,
                    });
                }
            }
        }
        offsets.sort_unstable_by(|a, b| a.lb2.partial_cmp(&b.lb2).unwrap());
    }

    // Lower bound on metric distance from the source point to each cell.
    let cell_src_lb: Vec<f64> = (0..m * m)
        .map(|idx| {
            let row = (idx / m) as f64;
            let col = (idx % m) as f64;
            let (gx, _) = axis_bounds(src_pos.x, col * cs, (col + 1.0) * cs, side, wrap);
            let (gy, _) = axis_bounds(src_pos.y, row * cs, (row + 1.0) * cs, side, wrap);
            (gx * gx + gy * gy).sqrt()
        })
        .collect();

    // Per-cell unlabeled vertex lists (the source starts labeled).
    let mut unlabeled: Vec<Vec<u32>> = vec![Vec::new(); m * m];
    {
        for row in 0..m as u32 {
            for col in 0..m as u32 {
                let idx = row as usize * m + col as usize;
                unlabeled[idx] = fine
                    .ids_in(row, col)
                    .iter()
                    .copied()
                    .filter(|&v| v != source)
                    .collect();
            }
        }
    }
    let mut remaining = n - 1;

    // Frontier storage: per-cell (d_src, id) sorted by d_src.
    let mut fcells: Vec<Vec<(f64, u32)>> = vec![Vec::new(); m * m];
    let mut touched: Vec<usize> = Vec::new();

    let mut frontier: Vec<u32> = vec![source];
    let mut layer: u32 = 0;
    let mut test_cells: Vec<usize> = Vec::new();

    while !frontier.is_empty() && remaining > 0 {
        layer += 1;
        let limit = layer as f64 * r * (1.0 + 1e-12) + slack;

        for &p in &frontier {
            let (row, col) = fine.cell_of(positions[p as usize]);
            let idx = row as usize * m + col as usize;
            if fcells[idx].is_empty() {
                touched.push(idx);
            }
            fcells[idx].push((d_src[p as usize], p));
        }
        for &idx in &touched {
            fcells[idx].sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        }

        let mut next: Vec<u32> = Vec::new();
        for cidx in 0..m * m {
            if unlabeled[cidx].is_empty() || cell_src_lb[cidx] > limit {
                continue;
            }
            let row = (cidx / m) as i64;
            let col = (cidx % m) as i64;

            // Gather reachable frontier cells; stop early on a bulk cover.
            let mut bulk = false;
            test_cells.clear();
            if dense {
                test_cells.extend_from_slice(&touched);
            } else {
                let mi = m as i64;
                for off in &offsets {
                    let rr = row + i64::from(off.di);
                    let cc = col + i64::from(off.dj);
                    let (rr, cc) = if wrap {
                        (rr.rem_euclid(mi), cc.rem_euclid(mi))
                    } else {
                        if !(0..mi).contains(&rr) || !(0..mi).contains(&cc) {
                            continue;
                        }
                        (rr, cc)
                    };
                    let fidx = rr as usize * m + cc as usize;
                    if fcells[fidx].is_empty() {
                        continue;
                    }
                    if off.ub2 <= r2 {
                        bulk = true;
                        break;
                    }
                    test_cells.push(fidx);
                }
            }

            if bulk {
                // Every point of this cell is within r of a frontier point.
                for v in unlabeled[cidx].drain(..) {
                    dist[v as usize] = layer;
                    next.push(v);
                }
                continue;
            }
            if test_cells.is_empty() {
                continue;
            }

            let list = std::mem::take(&mut unlabeled[cidx]);
            let mut kept = Vec::with_capacity(list.len());
            for v in list {
                let dv = d_src[v as usize];
                if dv > limit {
                    kept.push(v);
                    continue;
                }
                let pv = positions[v as usize];
                let lo = dv - r - slack;
                let hi = dv + r + slack;
                let mut hit = false;
                for &fidx in &test_cells {
                    let pts = &fcells[fidx];
                    // Cheap interval prune before the binary search.
                    if pts[pts.len() - 1].0 < lo || pts[0].0 > hi {
                        continue;
                    }
                    let start = pts.partition_point(|&(d, _)| d < lo);
                    for &(d, p) in &pts[start..] {
                        if d > hi {
                            break;
                        }
                        if g.dist2(pv, positions[p as usize]) <= r2 {
                            hit = true;
                            break;
                        }
                    }
                    if hit {
                        break;
                    }
                }
                if hit {
                    dist[v as usize] = layer;
                    next.push(v);
                } else {
                    kept.push(v);
                }
            }
            unlabeled[cidx] = kept;
        }

        remaining -= next.len();

        for &idx in &touched {
            fcells[idx].clear();
        }
        touched.clear();
        frontier = next;
    }
    Ok(dist)
}

struct CellOffset {
    di: i32,
    dj: i32,
    lb2: f64,
    ub2: f64,
}

/// Min and max distance from coordinate `x` to the interval `[a, b]` along
/// one axis, under the wrap metric when `wrap` is set. The max is a tight
/// upper bound capped at `side / 2` on the torus.
#[inline]
fn axis_bounds(x: f64, a: f64, b: f64, side: f64, wrap: bool) -> (f64, f64) {
    let direct_gap = if x < a {
        a - x
    } else if x > b {
        x - b
    } else {
        0.0
    };
    let direct_max = (x - a).abs().max((x - b).abs());
    if !wrap {
        return (direct_gap, direct_max);
    }
    let gap_left = if x + side < a {
        a - x - side
    } else if x + side > b {
        (x + side - b).max(0.0)
    } else {
        0.0
    };
    let gap_right = if x - side > b {
        x - side - b
    } else if x - side < a {
        (a - x + side).max(0.0)
    } else {
        0.0
    };
    let g = direct_gap.min(gap_left).min(gap_right);
    (g, direct_max.min(side * 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rgg::{sample_instance, MetricMode, ModelParams, SampleMode};

    fn brute_bfs(g: &GraphInstance, source: u32) -> Vec<u32> {
        let n = g.n();
        let r2 = g.r() * g.r();
        let mut adj = vec![Vec::new(); n];
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if g.vertex_dist2(u, v) <= r2 {
                    adj[u as usize].push(v);
                    adj[v as usize].push(u);
                }
            }
        }
        let mut dist = vec![INF_HOPS; n];
        dist[source as usize] = 0;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u as usize] {
                if dist[v as usize] == INF_HOPS {
                    dist[v as usize] = dist[u as usize] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    #[test]
    fn two_vertices_within_radius() {
        let g = GraphInstance::from_parts(
            10.0,
            2.0,
            MetricMode::Torus,
            SampleMode::Binomial,
            0,
            vec![Point::new(1.0, 1.0), Point::new(2.0, 1.5)],
        );
        assert_eq!(hop_distances(&g, 0).unwrap(), vec![0, 1]);
    }

    #[test]
    fn source_distance_is_zero() {
        let g = sample_instance(&ModelParams::new(200, 2.0, 5)).unwrap();
        let d = hop_distances(&g, 37).unwrap();
        assert_eq!(d[37], 0);
    }

    #[test]
    fn matches_explicit_bfs_on_random_instances() {
        for seed in 0..8 {
            let n = 150 + 50 * (seed as u64 % 4);
            let r = 1.2 + 0.6 * (seed as f64 % 3.0);
            let g = sample_instance(&ModelParams::new(n, r, seed)).unwrap();
            let src = (seed as u32 * 13) % n as u32;
            assert_eq!(
                hop_distances(&g, src).unwrap(),
                brute_bfs(&g, src),
                "n={n} r={r} seed={seed}"
            );
        }
    }

    #[test]
    fn matches_explicit_bfs_on_square_metric() {
        for seed in 0..4 {
            let params = ModelParams {
                metric: MetricMode::Square,
                ..ModelParams::new(250, 1.6, seed)
            };
            let g = sample_instance(&params).unwrap();
            assert_eq!(hop_distances(&g, 0).unwrap(), brute_bfs(&g, 0));
        }
    }

    #[test]
    fn disconnected_vertices_get_sentinel() {
        let g = GraphInstance::from_parts(
            100.0,
            1.0,
            MetricMode::Torus,
            SampleMode::Binomial,
            0,
            vec![
                Point::new(1.0, 1.0),
                Point::new(1.5, 1.0),
                Point::new(50.0, 50.0),
            ],
        );
        assert_eq!(hop_distances(&g, 0).unwrap(), vec![0, 1, INF_HOPS]);
    }

    #[test]
    fn dense_instance_is_single_hop() {
        // r exceeds the half-diagonal: complete graph.
        let g = sample_instance(&ModelParams::new(80, 9.0, 2)).unwrap();
        let d = hop_distances(&g, 0).unwrap();
        assert!(d.iter().enumerate().all(|(v, &x)| x == u32::from(v != 0)));
    }

    #[test]
    fn lipschitz_along_edges() {
        let g = sample_instance(&ModelParams::new(400, 2.5, 17)).unwrap();
        let d = hop_distances(&g, 3).unwrap();
        for u in 0..g.n() as u32 {
            for v in g.neighbors(u).unwrap() {
                let (du, dv) = (d[u as usize], d[v as usize]);
                if du != INF_HOPS || dv != INF_HOPS {
                    assert!(du.abs_diff(dv) <= 1, "edge ({u},{v}): {du} vs {dv}");
                }
            }
        }
    }

    #[test]
    fn invalid_source_rejected() {
        let g = sample_instance(&ModelParams::new(10, 1.0, 0)).unwrap();
        assert!(hop_distances(&g, 10).is_err());
    }
}
