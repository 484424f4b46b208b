//! Circular-arc boundary extraction: the pieces of equal-radius circles that
//! lie inside a small clipping ball and outside every other disc.

use super::{ANG_TOL, ArcSet, Ball, CircularArc, GeomError, Point};
use std::f64::consts::PI;

/// Arcs of the circles `C(center_i, r)` that lie strictly inside `clip` and
/// outside every other ball `B(center_j, r)`.
///
/// Requires `clip.radius <= r / 3` and points in general position: circle
/// pairs meeting at an angular separation below [`ANG_TOL`] are rejected as
/// `DegenerateTangency` rather than silently perturbed.
///
/// The total arc length is at most the clip perimeter `2 pi clip.radius`.
/// Planar computation; callers on the torus unwrap coordinates first.
pub fn boundary_arcs(centers: &[Point], r: f64, clip: Ball) -> Result<ArcSet, GeomError> {
    if !(r > 0.0) {
        return Err(GeomError::NegativeInput("circle radius"));
    }
    if clip.radius > r / 3.0 {
        return Err(GeomError::Invalid("clip radius must be at most r/3"));
    }
    let mut arcs = Vec::new();
    for (i, &ci) in centers.iter().enumerate() {
        let d = ci.dist(clip.center);
        if d >= r + clip.radius {
            continue; // circle never enters the clip ball
        }
        if d <= r - clip.radius {
            continue; // clip lies inside the disc, its boundary outside
        }
        // Angular interval of C(ci, r) inside the clip ball.
        let cos_a = (d * d + r * r - clip.radius * clip.radius) / (2.0 * d * r);
        let alpha = guarded_acos(cos_a)?;
        let phi = (clip.center.y - ci.y).atan2(clip.center.x - ci.x);
        // Work on the real line around phi; the window has length < pi.
        let mut intervals: Vec<(f64, f64)> = vec![(phi - alpha, phi + alpha)];

        for (j, &cj) in centers.iter().enumerate() {
            if j == i {
                continue;
            }
            let e = ci.dist(cj);
            if e >= 2.0 * r {
                if e - 2.0 * r < ANG_TOL * r {
                    return Err(GeomError::DegenerateTangency);
                }
                continue; // too far to cover any of circle i
            }
            if e < 1e-12 {
                // Coincident center: the closed ball covers the whole circle.
                intervals.clear();
                break;
            }
            // Coverage of circle i by ball j: cos(theta - psi) >= e / 2r.
            let beta = guarded_acos(e / (2.0 * r))?;
            let psi = (cj.y - ci.y).atan2(cj.x - ci.x);
            // Subtract every unwrapped image overlapping the window.
            for k in -1..=1 {
                let lo = psi + 2.0 * PI * f64::from(k) - beta;
                let hi = psi + 2.0 * PI * f64::from(k) + beta;
                subtract_interval(&mut intervals, lo, hi);
                if intervals.is_empty() {
                    break;
                }
            }
            if intervals.is_empty() {
                break;
            }
        }

        for (lo, hi) in intervals {
            if hi - lo > ANG_TOL {
                arcs.push(CircularArc {
                    center: ci,
                    radius: r,
                    start: lo,
                    end: hi,
                });
            }
        }
    }
    Ok(ArcSet::from_arcs(arcs))
}

/// acos with a degeneracy guard: arguments within tolerance of +-1 signal
/// tangency, slightly-out-of-range arguments from rounding are clamped.
fn guarded_acos(x: f64) -> Result<f64, GeomError> {
    if (1.0 - x.abs()).abs() < ANG_TOL * ANG_TOL {
        return Err(GeomError::DegenerateTangency);
    }
    if !(-1.0..=1.0).contains(&x) {
        if x.abs() - 1.0 < 1e-9 {
            return Err(GeomError::DegenerateTangency);
        }
        return Err(GeomError::Invalid("acos argument out of range"));
    }
    let a = x.acos();
    if a < ANG_TOL || PI - a < ANG_TOL {
        return Err(GeomError::DegenerateTangency);
    }
    Ok(a)
}

/// Remove `[lo, hi]` from a sorted list of disjoint intervals.
fn subtract_interval(intervals: &mut Vec<(f64, f64)>, lo: f64, hi: f64) {
    if lo >= hi {
        return;
    }
    let mut out = Vec::with_capacity(intervals.len() + 1);
    for &(a, b) in intervals.iter() {
        if hi <= a || lo >= b {
            out.push((a, b));
            continue;
        }
        if lo > a {
            out.push((a, lo));
        }
        if hi < b {
            out.push((hi, b));
        }
    }
    *intervals = out;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use approx::assert_relative_eq;

    #[test]
    fn far_centers_give_empty_set() {
        let clip = Ball::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let set = boundary_arcs(&[Point::new(10.0, 0.0)], 3.0, clip).unwrap();
        assert!(set.is_empty());
        assert_eq!(set.total_length, 0.0);
    }

    #[test]
    fn clip_inside_disc_gives_empty_set() {
        let clip = Ball::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let set = boundary_arcs(&[Point::new(0.5, 0.0)], 3.0, clip).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn single_crossing_circle_matches_analytic_arc() {
        let r = 3.0;
        let rp = 1.0;
        let d = 3.2; // crosses the clip
        let clip = Ball::new(Point::new(0.0, 0.0), rp).unwrap();
        let set = boundary_arcs(&[Point::new(d, 0.0)], r, clip).unwrap();
        assert_eq!(set.arcs.len(), 1);
        let alpha = ((d * d + r * r - rp * rp) / (2.0 * d * r)).acos();
        assert_relative_eq!(set.total_length, 2.0 * alpha * r, max_relative = 1e-12);
        // Arc endpoints lie on the clip circle, midpoint strictly inside.
        let arc = &set.arcs[0];
        assert!(clip.contains(arc.midpoint()));
        assert_relative_eq!(
            arc.point_at(arc.start).dist(clip.center),
            rp,
            max_relative = 1e-9
        );
    }

    #[test]
    fn oversized_clip_rejected() {
        let clip = Ball::new(Point::new(0.0, 0.0), 2.0).unwrap();
        assert!(matches!(
            boundary_arcs(&[Point::new(1.0, 0.0)], 3.0, clip),
            Err(GeomError::Invalid(_))
        ));
    }

    #[test]
    fn coincident_centers_cover_each_other() {
        let clip = Ball::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let c = Point::new(3.1, 0.0);
        let set = boundary_arcs(&[c, c], 3.0, clip).unwrap();
        assert!(set.is_empty(), "coincident circles cover one another");
    }

    #[test]
    fn tangent_circles_are_rejected() {
        let clip = Ball::new(Point::new(0.0, 0.0), 1.0).unwrap();
        let r = 3.0;
        let res = boundary_arcs(&[Point::new(2.9, 0.0), Point::new(2.9 - 2.0 * r, 0.0)], r, clip);
        assert_eq!(res.unwrap_err(), GeomError::DegenerateTangency);
    }

    #[test]
    fn total_length_bounded_by_clip_perimeter_on_random_configs() {
        let mut s = Stream::new(99, "arc-bound", 0);
        let mut done = 0;
        let mut attempts = 0;
        while done < 200 && attempts < 2000 {
            attempts += 1;
            let r = 1.0 + s.uniform(5.0);
            let rp = r / 3.0 * (0.3 + 0.7 * s.next_f64());
            let clip = Ball::new(Point::new(0.0, 0.0), rp).unwrap();
            let k = 1 + s.below(20) as usize;
            let centers: Vec<Point> = (0..k)
                .map(|_| {
                    let ang = s.uniform(2.0 * PI);
                    let dist = s.uniform(r + rp + 0.5 * r);
                    Point::new(dist * ang.cos(), dist * ang.sin())
                })
                .collect();
            match boundary_arcs(&centers, r, clip) {
                Ok(set) => {
                    assert!(
                        set.total_length <= 2.0 * PI * rp + 1e-6,
                        "length {} exceeds clip perimeter {}",
                        set.total_length,
                        2.0 * PI * rp
                    );
                    // Arc points are inside the clip and outside other balls.
                    for arc in &set.arcs {
                        let m = arc.midpoint();
                        assert!(clip.contains(m));
                        for &c in &centers {
                            if c != arc.center {
                                assert!(m.dist(c) >= r - 1e-9);
                            }
                        }
                    }
                    done += 1;
                }
                Err(GeomError::DegenerateTangency) => {} // measure-zero input, retry
                Err(e) => panic!("unexpected {e}"),
            }
        }
        assert!(done >= 200, "only {done} non-degenerate configurations");
    }
}
