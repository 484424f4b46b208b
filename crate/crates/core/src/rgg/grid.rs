//! Uniform cell grid over the torus square, CSR layout.

use crate::geometry::Point;

/// Spatial index mapping each vertex to a square cell. Cells evenly divide
/// the side, so `cell_side = side / m <= target`, and wrap-around lookups use
/// modular cell coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGrid {
    m: u32,
    cell_side: f64,
    side: f64,
    starts: Vec<u32>,
    ids: Vec<u32>,
}

impl CellGrid {
    /// Build a grid whose cell side is the largest even divisor of `side`
    /// not exceeding `target`.
    pub fn build(positions: &[Point], side: f64, target: f64) -> CellGrid {
        assert!(side > 0.0 && target > 0.0);
        let m = ((side / target).ceil() as u32).max(1);
        let cell_side = side / f64::from(m);
        let ncells = (m as usize) * (m as usize);
        let mut counts = vec![0u32; ncells];
        let cell_of = |p: &Point| -> usize {
            let col = ((p.x / cell_side) as u32).min(m - 1);
            let row = ((p.y / cell_side) as u32).min(m - 1);
            (row as usize) * (m as usize) + col as usize
        };
        for p in positions {
            counts[cell_of(p)] += 1;
        }
        let mut starts = vec![0u32; ncells + 1];
        for i in 0..ncells {
            starts[i + 1] = starts[i] + counts[i];
        }
        let mut ids = vec![0u32; positions.len()];
        let mut cursor = starts[..ncells].to_vec();
        for (v, p) in positions.iter().enumerate() {
            let c = cell_of(p);
            ids[cursor[c] as usize] = v as u32;
            cursor[c] += 1;
        }
        // Vertex ids within one cell ascend because we inserted in id order.
        CellGrid {
            m,
            cell_side,
            side,
            starts,
            ids,
        }
    }

    #[inline]
    pub fn cells_per_axis(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn cell_side(&self) -> f64 {
        self.cell_side
    }

    /// (row, col) of the cell containing `p` (canonical coordinates).
    #[inline]
    pub fn cell_of(&self, p: Point) -> (u32, u32) {
        let col = ((p.x / self.cell_side) as u32).min(self.m - 1);
        let row = ((p.y / self.cell_side) as u32).min(self.m - 1);
        (row, col)
    }

    #[inline]
    pub fn ids_in(&self, row: u32, col: u32) -> &[u32] {
        let c = (row as usize) * (self.m as usize) + col as usize;
        &self.ids[self.starts[c] as usize..self.starts[c + 1] as usize]
    }

    /// All vertex ids, grouped by cell.
    #[inline]
    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    /// Iterate the distinct cells within Chebyshev distance `rad` of
    /// `(row, col)`, wrapping modulo the grid when `wrap` is set.
    pub fn for_each_cell_near<F: FnMut(u32, u32)>(
        &self,
        row: u32,
        col: u32,
        rad: u32,
        wrap: bool,
        mut f: F,
    ) {
        let m = self.m as i64;
        let span = i64::from(rad) * 2 + 1;
        if span >= m {
            for rr in 0..self.m {
                for cc in 0..self.m {
                    f(rr, cc);
                }
            }
            return;
        }
        for dr in -i64::from(rad)..=i64::from(rad) {
            let rr = i64::from(row) + dr;
            let rr = if wrap {
                rr.rem_euclid(m)
            } else if (0..m).contains(&rr) {
                rr
            } else {
                continue;
            };
            for dc in -i64::from(rad)..=i64::from(rad) {
                let cc = i64::from(col) + dc;
                let cc = if wrap {
                    cc.rem_euclid(m)
                } else if (0..m).contains(&cc) {
                    cc
                } else {
                    continue;
                };
                f(rr as u32, cc as u32);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn random_points(n: usize, side: f64, seed: u64) -> Vec<Point> {
        let mut s = Stream::new(seed, "grid-test", 0);
        (0..n)
            .map(|_| Point::new(s.uniform(side), s.uniform(side)))
            .collect()
    }

    #[test]
    fn every_vertex_appears_exactly_once() {
        let pts = random_points(500, 30.0, 1);
        let g = CellGrid::build(&pts, 30.0, 4.0);
        let mut seen = vec![false; 500];
        for row in 0..g.cells_per_axis() {
            for col in 0..g.cells_per_axis() {
                for &v in g.ids_in(row, col) {
                    assert!(!seen[v as usize], "vertex {v} listed twice");
                    seen[v as usize] = true;
                    let (r2, c2) = g.cell_of(pts[v as usize]);
                    assert_eq!((r2, c2), (row, col));
                }
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn rebuild_is_identical() {
        let pts = random_points(300, 20.0, 2);
        let a = CellGrid::build(&pts, 20.0, 3.0);
        let b = CellGrid::build(&pts, 20.0, 3.0);
        assert_eq!(a, b);
    }

    #[test]
    fn cell_side_never_exceeds_target() {
        for (side, target) in [(10.0, 3.0), (100.0, 7.0), (5.0, 9.0), (1.0, 0.1)] {
            let g = CellGrid::build(&[], side, target);
            assert!(g.cell_side() <= target + 1e-12 || g.cells_per_axis() == 1);
            if g.cells_per_axis() > 1 {
                assert!(g.cell_side() <= target * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn near_cells_wrap_without_duplicates() {
        let g = CellGrid::build(&[], 10.0, 2.0); // 5x5 grid
        let mut seen = std::collections::HashSet::new();
        g.for_each_cell_near(0, 0, 1, true, |r, c| {
            assert!(seen.insert((r, c)), "cell ({r},{c}) visited twice");
        });
        assert_eq!(seen.len(), 9);
        assert!(seen.contains(&(4, 4)), "wrapped corner cell missing");

        // Radius so large the whole grid is covered exactly once.
        let mut all = std::collections::HashSet::new();
        g.for_each_cell_near(2, 2, 3, true, |r, c| {
            assert!(all.insert((r, c)));
        });
        assert_eq!(all.len(), 25);
    }

    #[test]
    fn near_cells_clamp_without_wrap() {
        let g = CellGrid::build(&[], 10.0, 2.0);
        let mut seen = Vec::new();
        g.for_each_cell_near(0, 0, 1, false, |r, c| seen.push((r, c)));
        assert_eq!(seen.len(), 4); // 2x2 corner block
    }
}
