//! Vertex-disjoint close pairs inside a hiding ball, harvested from a fine
//! square tessellation.

use crate::geometry::{Ball, Point};
use crate::rgg::{GraphInstance, VertexId};
use serde::Serialize;

/// Pairs of vertices at distance at most `eps`, pairwise vertex-disjoint (a
/// matching), all inside `ball`.
#[derive(Debug, Clone, Serialize)]
pub struct SpecialFamily {
    pub pairs: Vec<(VertexId, VertexId)>,
    pub eps: f64,
    pub ball: Ball,
}

impl SpecialFamily {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Tessellate the torus into squares of side at most `eps / sqrt(2)` and
/// collect the pair from every square that holds exactly two vertices and
/// lies entirely inside `ball`. Squares are disjoint, so the family is a
/// matching; the square diagonal is at most `eps`, bounding pair distances.
pub fn special_family(g: &GraphInstance, ball: Ball, eps: f64) -> SpecialFamily {
    assert!(eps > 0.0, "eps must be positive");
    let l = g.side();
    let k = ((l * 2.0f64.sqrt() / eps).ceil() as u64).max(1);
    let tile = l / k as f64;
    // Tile occupancy: id of the lone occupant, or a tombstone for 2+.
    let mut occupancy: std::collections::HashMap<(u64, u64), (u32, Option<VertexId>, Option<VertexId>)> =
        std::collections::HashMap::new();
    for (v, p) in g.positions().iter().enumerate() {
        let col = ((p.x / tile) as u64).min(k - 1);
        let row = ((p.y / tile) as u64).min(k - 1);
        let e = occupancy.entry((row, col)).or_insert((0, None, None));
        e.0 += 1;
        if e.1.is_none() {
            e.1 = Some(v as u32);
        } else if e.2.is_none() {
            e.2 = Some(v as u32);
        }
    }
    let r2 = ball.radius * ball.radius;
    let corner_inside = |x: f64, y: f64| g.dist2(Point::new(x, y), ball.center) <= r2;
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
    let mut keys: Vec<(u64, u64)> = occupancy
        .iter()
        .filter(|(_, &(count, _, _))| count == 2)
        .map(|(&k, _)| k)
        .collect();
    keys.sort_unstable();
    for (row, col) in keys {
        let x0 = col as f64 * tile;
        let y0 = row as f64 * tile;
        let inside = corner_inside(x0, y0)
            && corner_inside(x0 + tile, y0)
            && corner_inside(x0, y0 + tile)
            && corner_inside(x0 + tile, y0 + tile);
        if !inside {
            continue;
        }
        let (_, a, b) = occupancy[&(row, col)];
        let (a, b) = (a.unwrap(), b.unwrap());
        pairs.push(if a < b { (a, b) } else { (b, a) });
    }
    SpecialFamily { pairs, eps, ball }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rgg::{sample_instance, ModelParams};

    #[test]
    fn pairs_are_close_disjoint_and_inside_ball() {
        let g = sample_instance(&ModelParams::new(20_000, 20.0, 7)).unwrap();
        let l = g.side();
        let ball = Ball::new(Point::new(l / 2.0, l / 2.0), g.r() / 3.0).unwrap();
        let eps = 1.0;
        let fam = special_family(&g, ball, eps);
        assert!(!fam.is_empty(), "family should be nonempty at this density");
        let mut used = std::collections::HashSet::new();
        for &(a, b) in &fam.pairs {
            assert!(a < b);
            assert!(used.insert(a), "vertex {a} reused");
            assert!(used.insert(b), "vertex {b} reused");
            assert!(
                g.vertex_dist2(a, b).sqrt() <= eps + 1e-12,
                "pair ({a},{b}) too far apart"
            );
            for v in [a, b] {
                assert!(
                    g.distance(g.position(v), ball.center) <= ball.radius + 1e-12,
                    "vertex {v} outside the ball"
                );
            }
        }
    }

    #[test]
    fn family_is_deterministic() {
        let g = sample_instance(&ModelParams::new(5_000, 10.0, 3)).unwrap();
        let ball = Ball::new(Point::new(30.0, 30.0), g.r() / 3.0).unwrap();
        let a = special_family(&g, ball, 0.8);
        let b = special_family(&g, ball, 0.8);
        assert_eq!(a.pairs, b.pairs);
    }

    #[test]
    fn empty_family_when_ball_tiny() {
        let g = sample_instance(&ModelParams::new(1000, 3.0, 1)).unwrap();
        let ball = Ball::new(Point::new(1.0, 1.0), 0.01).unwrap();
        let fam = special_family(&g, ball, 0.5);
        assert!(fam.is_empty());
    }
}
