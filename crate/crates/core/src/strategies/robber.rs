//! Robber strategies and the sparse-site construction.

use super::StrategyError;
use crate::distances::CandidateClass;
use crate::game::RobberStrategy;
use crate::geometry::{Ball, Point};
use crate::rgg::{GraphInstance, VertexId};
use crate::strategies::SpecialFamily;
use serde::Serialize;

/// Perfect-information adversary: picks the largest offered class, ties by
/// smallest member id.
#[derive(Debug, Default)]
pub struct MaxClassRobber;

fn max_class_index(offered: &[CandidateClass]) -> usize {
    let mut best = 0usize;
    for (i, c) in offered.iter().enumerate().skip(1) {
        let b = &offered[best];
        if c.len() > b.len() || (c.len() == b.len() && c.min_id() < b.min_id()) {
            best = i;
        }
    }
    best
}

impl RobberStrategy for MaxClassRobber {
    fn choose(&mut self, _g: &GraphInstance, offered: &[CandidateClass]) -> usize {
        max_class_index(offered)
    }
}

/// Hides inside a fixed ball: prefers any class containing both members of a
/// special pair, then the class with the most ball members, and flags the
/// round when every offered class misses the ball.
#[derive(Debug)]
pub struct BallHider {
    ball_members: Vec<VertexId>,
    pairs: Vec<(VertexId, VertexId)>,
    flags: Vec<String>,
}

impl BallHider {
    pub fn new(g: &GraphInstance, ball: Ball, family: &SpecialFamily) -> Self {
        let ball_members = g.vertices_in(&crate::rgg::Region::Ball(ball));
        BallHider {
            ball_members,
            pairs: family.pairs.clone(),
            flags: Vec::new(),
        }
    }

    fn ball_overlap(&self, class: &CandidateClass) -> usize {
        let mut count = 0;
        let (mut i, mut j) = (0usize, 0usize);
        let ms = class.members();
        while i < ms.len() && j < self.ball_members.len() {
            match ms[i].cmp(&self.ball_members[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }
}

impl RobberStrategy for BallHider {
    fn choose(&mut self, _g: &GraphInstance, offered: &[CandidateClass]) -> usize {
        // A class holding a full special pair keeps the hiding invariant.
        for &(a, b) in &self.pairs {
            if let Some(i) = offered
                .iter()
                .position(|c| c.contains(a) && c.contains(b))
            {
                return i;
            }
        }
        // Fall back to the class with the most ball members; ties to the
        // larger class, then the smaller min id.
        let mut best: Option<usize> = None;
        for (i, c) in offered.iter().enumerate() {
            let ov = self.ball_overlap(c);
            if ov == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some(bi) => {
                    let b = &offered[bi];
                    let bov = self.ball_overlap(b);
                    ov > bov
                        || (ov == bov && c.len() > b.len())
                        || (ov == bov && c.len() == b.len() && c.min_id() < b.min_id())
                }
            };
            if better {
                best = Some(i);
            }
        }
        if let Some(i) = best {
            return i;
        }
        self.flags.push("no-ball-class".to_string());
        max_class_index(offered)
    }

    fn take_flags(&mut self) -> Vec<String> {
        std::mem::take(&mut self.flags)
    }
}

/// A tessellation square whose center annulus at radius `r` is empty of
/// vertices, so no outside sensor distinguishes the ball occupants.
#[derive(Debug, Clone, Serialize)]
pub struct SparseSite {
    pub center: Point,
    pub ball_radius: f64,
    pub annulus_empty: bool,
    pub occupants: Vec<VertexId>,
}

/// Occupancy target `log n / (50 log(r^2 / log n))` for the sparse-site
/// mechanism; meaningful when `r^2` clearly exceeds `log n`.
pub fn xi_target(r: f64, n: u64) -> f64 {
    let ln = (n.max(2) as f64).ln();
    ln / (50.0 * (r * r / ln).ln())
}

/// Tessellate into side-`3r` squares and return the site with an empty
/// annulus `[r - w, r + w]` around its center (w = log n / 16 r) that
/// maximizes the number of occupants of the center ball of radius `w`.
pub fn sparse_site_finder(g: &GraphInstance) -> Result<SparseSite, StrategyError> {
    let l = g.side();
    let r = g.r();
    let n = g.n() as u64;
    let w = (n.max(2) as f64).ln() / (16.0 * r);
    let k = ((l / (3.0 * r)).round() as u32).max(1);
    let tile = l / f64::from(k);
    let mut best: Option<SparseSite> = None;
    for row in 0..k {
        for col in 0..k {
            let center = Point::new((f64::from(col) + 0.5) * tile, (f64::from(row) + 0.5) * tile);
            let mut empty = true;
            let lo2 = (r - w).max(0.0) * (r - w).max(0.0);
            let hi = r + w;
            g.for_each_in_ball(center, hi, |v| {
                if !empty {
                    return;
                }
                let d2 = g.dist2(g.position(v), center);
                if d2 >= lo2 {
                    empty = false;
                }
            });
            if !empty {
                continue;
            }
            let occupants = g.vertices_in(&crate::rgg::Region::Ball(
                Ball::new(center, w).expect("nonnegative radius"),
            ));
            let replace = match &best {
                None => true,
                Some(b) => occupants.len() > b.occupants.len(),
            };
            if replace {
                best = Some(SparseSite {
                    center,
                    ball_radius: w,
                    annulus_empty: true,
                    occupants,
                });
            }
        }
    }
    best.ok_or(StrategyError::NoEmptyAnnulus)
}

/// Hides among the occupants of a sparse site: prefers the class holding the
/// most occupants.
#[derive(Debug)]
pub struct SparseSiteHider {
    occupants: Vec<VertexId>,
    flags: Vec<String>,
}

impl SparseSiteHider {
    pub fn new(site: &SparseSite) -> Self {
        SparseSiteHider {
            occupants: site.occupants.clone(),
            flags: Vec::new(),
        }
    }

    fn overlap(&self, class: &CandidateClass) -> usize {
        class
            .members()
            .iter()
            .filter(|v| self.occupants.binary_search(v).is_ok())
            .count()
    }
}

impl RobberStrategy for SparseSiteHider {
    fn choose(&mut self, _g: &GraphInstance, offered: &[CandidateClass]) -> usize {
        let mut best: Option<(usize, usize)> = None;
        for (i, c) in offered.iter().enumerate() {
            let ov = self.overlap(c);
            if ov > 0 {
                let better = match best {
                    None => true,
                    Some((bov, _)) => ov > bov,
                };
                if better {
                    best = Some((ov, i));
                }
            }
        }
        if let Some((_, i)) = best {
            return i;
        }
        self.flags.push("no-ball-class".to_string());
        max_class_index(offered)
    }

    fn take_flags(&mut self) -> Vec<String> {
        std::mem::take(&mut self.flags)
    }
}
