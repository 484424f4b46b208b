//! Resolving sets (one-round win certificates) and twin-pair lower-bound
//! certificates.

use super::StrategyError;
use crate::distances::{hop_distances, INF_HOPS};
use crate::rgg::{GraphInstance, VertexId};
use crate::rng::Stream;

const MATRIX_CAP: usize = 20_000;
const UNREACH: u16 = u16::MAX;

/// Full hop-distance matrix as u16, for instances small enough to afford it.
fn distance_matrix(g: &GraphInstance) -> Result<Vec<u16>, StrategyError> {
    let n = g.n();
    assert!(
        n <= MATRIX_CAP,
        "distance-matrix operations are capped at {MATRIX_CAP} vertices"
    );
    let mut mat = vec![UNREACH; n * n];
    for v in 0..n as u32 {
        let d = hop_distances(g, v)?;
        for u in 0..n {
            if d[u] != INF_HOPS {
                mat[v as usize * n + u] = d[u] as u16;
            }
        }
    }
    Ok(mat)
}

/// Classes of identical signatures under the given sensors.
fn classes_under(mat: &[u16], n: usize, sensors: &[VertexId]) -> Vec<Vec<VertexId>> {
    let mut classes: Vec<Vec<VertexId>> = vec![(0..n as u32).collect()];
    for &s in sensors {
        let row = &mat[s as usize * n..(s as usize + 1) * n];
        let mut next = Vec::with_capacity(classes.len());
        for class in classes {
            if class.len() == 1 {
                next.push(class);
                continue;
            }
            let mut parts: Vec<(u16, Vec<VertexId>)> = Vec::new();
            for v in class {
                let key = row[v as usize];
                match parts.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, vs)) => vs.push(v),
                    None => parts.push((key, vec![v])),
                }
            }
            next.extend(parts.into_iter().map(|(_, vs)| vs));
        }
        classes = next;
    }
    classes
}

fn all_singletons(classes: &[Vec<VertexId>]) -> bool {
    classes.iter().all(|c| c.len() == 1)
}

/// Greedy resolving set: iteratively add the vertex splitting the most
/// unresolved pairs until every vertex has a unique signature. Fails with
/// the offending pairs if true same-signature twins make progress
/// impossible (only possible with duplicate positions).
pub fn greedy_resolving_set(g: &GraphInstance) -> Result<Vec<VertexId>, StrategyError> {
    let n = g.n();
    if n <= 1 {
        return Ok(Vec::new());
    }
    let mat = distance_matrix(g)?;
    let mut sensors: Vec<VertexId> = Vec::new();
    let mut classes: Vec<Vec<VertexId>> = vec![(0..n as u32).collect()];
    while !all_singletons(&classes) {
        let mut best: Option<(usize, VertexId)> = None;
        for v in 0..n as u32 {
            if sensors.contains(&v) {
                continue;
            }
            let row = &mat[v as usize * n..(v as usize + 1) * n];
            let mut gain = 0usize;
            for class in classes.iter().filter(|c| c.len() > 1) {
                let mut counts: Vec<(u16, usize)> = Vec::new();
                for &u in class {
                    let key = row[u as usize];
                    match counts.iter_mut().find(|(k, _)| *k == key) {
                        Some((_, c)) => *c += 1,
                        None => counts.push((key, 1)),
                    }
                }
                let whole = class.len() * (class.len() - 1) / 2;
                let kept: usize = counts.iter().map(|&(_, c)| c * (c - 1) / 2).sum();
                gain += whole - kept;
            }
            // Ascending scan with strict improvement: ties go to the
            // smallest id.
            let better = match best {
                None => gain > 0,
                Some((bg, _)) => gain > bg,
            };
            if better {
                best = Some((gain, v));
            }
        }
        match best {
            Some((_, v)) => {
                sensors.push(v);
                classes = classes_under(&mat, n, &sensors);
            }
            None => {
                let twins = classes
                    .iter()
                    .filter(|c| c.len() > 1)
                    .map(|c| (c[0], c[1]))
                    .collect();
                return Err(StrategyError::UnresolvableTwins(twins));
            }
        }
    }
    sensors.sort_unstable();
    Ok(sensors)
}

/// Random resolving set: a `p`-sample of the vertices, patched by adding the
/// smallest member of each still-unresolved class until all signatures are
/// unique.
pub fn random_resolving_set(
    g: &GraphInstance,
    p: f64,
    seed: u64,
) -> Result<Vec<VertexId>, StrategyError> {
    assert!((0.0..=1.0).contains(&p), "p must be a probability");
    let n = g.n();
    if n <= 1 {
        return Ok(Vec::new());
    }
    let mat = distance_matrix(g)?;
    let mut stream = Stream::new(seed, "random-resolving-sample", 0);
    let mut sensors: Vec<VertexId> = (0..n as u32).filter(|_| stream.bernoulli(p)).collect();
    let mut classes = classes_under(&mat, n, &sensors);
    loop {
        // A sensor vertex is its own singleton: distance 0 identifies it.
        let unresolved = classes.iter().position(|c| {
            c.len() > 1 && !c.iter().all(|v| sensors.binary_search(v).is_ok())
        });
        let fully_twinned: Vec<&Vec<VertexId>> = classes
            .iter()
            .filter(|c| c.len() > 1 && c.iter().all(|v| sensors.binary_search(v).is_ok()))
            .collect();
        if !fully_twinned.is_empty() {
            // All members already carry sensors yet share signatures: only
            // possible with coincident positions.
            return Err(StrategyError::UnresolvableTwins(
                fully_twinned.iter().map(|c| (c[0], c[1])).collect(),
            ));
        }
        match unresolved {
            None => break,
            Some(i) => {
                let v = *classes[i]
                    .iter()
                    .find(|v| sensors.binary_search(v).is_err())
                    .expect("class has a non-sensor member");
                let pos = sensors.binary_search(&v).unwrap_err();
                sensors.insert(pos, v);
                classes = classes_under(&mat, n, &sensors);
            }
        }
    }
    Ok(sensors)
}

/// Check that a sensor set gives every vertex a unique signature (sensors
/// are unique by their own zero reading).
pub fn is_resolving(g: &GraphInstance, sensors: &[VertexId]) -> Result<bool, StrategyError> {
    let n = g.n();
    if n <= 1 {
        return Ok(true);
    }
    if sensors.is_empty() {
        return Ok(false);
    }
    let arrays: Vec<Vec<u32>> = sensors
        .iter()
        .map(|&s| hop_distances(g, s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut sigs: Vec<Vec<u32>> = (0..n)
        .map(|v| arrays.iter().map(|d| d[v]).collect())
        .collect();
    sigs.sort_unstable();
    Ok(sigs.windows(2).all(|w| w[0] != w[1]))
}

/// Greedy maximal disjoint collection of adjacent pairs whose radius-`r`
/// ball symmetric difference contains no third vertex. Each pair is
/// certified by an exhaustive scan, and the count lower-bounds the metric
/// dimension: no sensor outside such a pair distinguishes it.
pub fn twin_pair_count(g: &GraphInstance) -> (usize, Vec<(VertexId, VertexId)>) {
    let n = g.n();
    let r = g.r();
    let r2 = r * r;
    let mut used = vec![false; n];
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
    for u in 0..n as u32 {
        if used[u as usize] {
            continue;
        }
        let nbrs = g.neighbors(u).expect("valid id");
        for &v in nbrs.iter().filter(|&&v| v > u) {
            if used[u as usize] || used[v as usize] {
                continue;
            }
            // Exhaustive third-vertex scan over both balls.
            let mut twin = true;
            let pu = g.position(u);
            let pv = g.position(v);
            g.for_each_in_ball(pu, r, |w| {
                if twin && w != u && w != v && g.dist2(g.position(w), pv) > r2 {
                    twin = false;
                }
            });
            if twin {
                g.for_each_in_ball(pv, r, |w| {
                    if twin && w != u && w != v && g.dist2(g.position(w), pu) > r2 {
                        twin = false;
                    }
                });
            }
            if twin {
                used[u as usize] = true;
                used[v as usize] = true;
                pairs.push((u, v));
                break;
            }
        }
    }
    (pairs.len(), pairs)
}
