use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// A bounded open region Ω together with its closure and boundary S.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// Axis-aligned box `lo < x < hi`.
    Box { lo: Vec3, hi: Vec3 },
    /// Open ball `|x - center| < radius`.
    Ball { center: Vec3, radius: f64 },
}

impl Domain {
    pub fn cuboid(lo: Vec3, hi: Vec3) -> Result<Self> {
        let d = Domain::Box { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_cube() -> Self {
        Domain::Box { lo: Vec3::zeros(), hi: Vec3::new(1.0, 1.0, 1.0) }
    }

    pub fn ball(center: Vec3, radius: f64) -> Result<Self> {
        let d = Domain::Ball { center, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_ball() -> Self {
        Domain::Ball { center: Vec3::zeros(), radius: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Domain::Box { lo, hi } => {
                if lo.iter().chain(hi.iter()).any(|v| !v.is_finite()) {
                    return Err(Error::invalid("domain", "box corners must be finite"));
                }
                if (0..3).any(|a| lo[a] >= hi[a]) {
                    return Err(Error::invalid("domain", "box requires lo < hi componentwise"));
                }
            }
            Domain::Ball { center, radius } => {
                if center.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("domain", "ball center must be finite"));
                }
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::invalid("domain", "ball radius must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        match *self {
            Domain::Box { lo, hi } => (lo, hi),
            Domain::Ball { center, radius } => {
                let r = Vec3::repeat(radius);
                (center - r, center + r)
            }
        }
    }

    /// Membership in the open set, shrunk by `margin` so that points lying on
    /// S up to rounding are not counted as inside.
    pub fn contains_strictly(&self, x: &Vec3, margin: f64) -> bool {
        match *self {
            Domain::Box { lo, hi } => (0..3).all(|a| x[a] > lo[a] + margin && x[a] < hi[a] - margin),
            Domain::Ball { center, radius } => (x - center).norm() < radius - margin,
        }
    }

    /// Euclidean nearest point of the closed domain.
    pub fn project(&self, x: &Vec3) -> Vec3 {
        match *self {
            Domain::Box { lo, hi } => Vec3::from_fn(|a, _| x[a].clamp(lo[a], hi[a])),
            Domain::Ball { center, radius } => {
                let d = x - center;
                let r = d.norm();
                if r <= radius {
                    *x
                } else {
                    center + d * (radius / r)
                }
            }
        }
    }

    /// Unsigned distance from `x` to the boundary S.
    pub fn distance_to_boundary(&self, x: &Vec3) -> f64 {
        match *self {
            Domain::Box { lo, hi } => {
                let clamped = self.project(x);
                let outside = (x - clamped).norm();
                if outside > 0.0 {
                    outside
                } else {
                    (0..3).map(|a| (x[a] - lo[a]).min(hi[a] - x[a])).fold(f64::INFINITY, f64::min)
                }
            }
            Domain::Ball { center, radius } => ((x - center).norm() - radius).abs(),
        }
    }

    pub fn volume(&self) -> f64 {
        match *self {
            Domain::Box { lo, hi } => (hi - lo).product(),
            Domain::Ball { radius, .. } => 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3),
        }
    }

    pub fn surface_area(&self) -> f64 {
        match *self {
            Domain::Box { lo, hi } => {
                let e = hi - lo;
                2.0 * (e.x * e.y + e.y * e.z + e.z * e.x)
            }
            Domain::Ball { radius, .. } => 4.0 * std::f64::consts::PI * radius * radius,
        }
    }

    /// Fraction of the axis-aligned cube of side `h` centered at `center`
    /// that lies in the closed domain. Exact for boxes; the ball uses a 4³
    /// midpoint subsample inside a narrow band around S.
    pub fn cube_fraction(&self, center: &Vec3, h: f64) -> f64 {
        match *self {
            Domain::Box { lo, hi } => (0..3)
                .map(|a| {
                    let a0 = (center[a] - 0.5 * h).max(lo[a]);
                    let a1 = (center[a] + 0.5 * h).min(hi[a]);
                    ((a1 - a0) / h).max(0.0)
                })
                .product(),
            Domain::Ball { center: c, radius } => {
                let r = (center - c).norm();
                let reach = 0.5 * h * 3f64.sqrt();
                if r + reach <= radius {
                    return 1.0;
                }
                if r - reach >= radius {
                    return 0.0;
                }
                const SUB: usize = 4;
                let mut inside = 0usize;
                for i in 0..SUB {
                    for j in 0..SUB {
                        for k in 0..SUB {
                            let off = Vec3::new(i as f64, j as f64, k as f64)
                                .map(|t| ((t + 0.5) / SUB as f64 - 0.5) * h);
                            if (center + off - c).norm() <= radius {
                                inside += 1;
                            }
                        }
                    }
                }
                inside as f64 / (SUB * SUB * SUB) as f64
            }
        }
    }

    /// Removes the components of an energy gradient `g` at `x` that would
    /// push `x` out of the closed domain. Interior points are unaffected.
    pub fn tangential_gradient(&self, x: &Vec3, g: &Vec3) -> Vec3 {
        const ON_BOUNDARY: f64 = 1e-12;
        match *self {
            Domain::Box { lo, hi } => {
                let scale = (hi - lo).amax();
                let mut out = *g;
                for a in 0..3 {
                    let at_lo = x[a] - lo[a] <= ON_BOUNDARY * scale;
                    let at_hi = hi[a] - x[a] <= ON_BOUNDARY * scale;
                    // descent direction is -g
                    if (at_lo && g[a] > 0.0) || (at_hi && g[a] < 0.0) {
                        out[a] = 0.0;
                    }
                }
                out
            }
            Domain::Ball { center, radius } => {
                let d = x - center;
                let r = d.norm();
                if r < radius * (1.0 - ON_BOUNDARY) {
                    return *g;
                }
                let n = d / r;
                let gn = g.dot(&n);
                if gn < 0.0 {
                    g - n * gn
                } else {
                    *g
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_domains() {
        assert!(Domain::cuboid(Vec3::zeros(), Vec3::new(1.0, 0.0, 1.0)).is_err());
        assert!(Domain::ball(Vec3::zeros(), 0.0).is_err());
        assert!(Domain::ball(Vec3::zeros(), -1.0).is_err());
        assert!(Domain::ball(Vec3::zeros(), 2.0).is_ok());
    }

    #[test]
    fn projection_onto_ball_and_box() {
        let ball = Domain::unit_ball();
        let p = ball.project(&Vec3::new(3.0, 0.0, 4.0));
        assert!((p - Vec3::new(0.6, 0.0, 0.8)).norm() < 1e-15);
        let inside = Vec3::new(0.1, 0.2, 0.3);
        assert_eq!(ball.project(&inside), inside);

        let cube = Domain::unit_cube();
        assert_eq!(cube.project(&Vec3::new(-1.0, 0.5, 2.0)), Vec3::new(0.0, 0.5, 1.0));
    }

    #[test]
    fn boundary_distance() {
        let cube = Domain::unit_cube();
        assert!((cube.distance_to_boundary(&Vec3::new(0.5, 0.5, 0.9)) - 0.1).abs() < 1e-15);
        assert!((cube.distance_to_boundary(&Vec3::new(2.0, 0.5, 0.5)) - 1.0).abs() < 1e-15);
        let ball = Domain::unit_ball();
        assert!((ball.distance_to_boundary(&Vec3::new(0.0, 0.3, 0.0)) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn box_cube_fraction_is_trapezoidal() {
        let cube = Domain::unit_cube();
        let h = 0.25;
        assert_eq!(cube.cube_fraction(&Vec3::new(0.5, 0.5, 0.5), h), 1.0);
        assert_eq!(cube.cube_fraction(&Vec3::new(0.5, 0.0, 0.5), h), 0.5);
        assert_eq!(cube.cube_fraction(&Vec3::new(0.5, 0.0, 1.0), h), 0.25);
        assert_eq!(cube.cube_fraction(&Vec3::new(0.5, -0.5, 0.5), h), 0.0);
    }

    #[test]
    fn ball_cube_fraction_limits() {
        let ball = Domain::unit_ball();
        assert_eq!(ball.cube_fraction(&Vec3::zeros(), 0.1), 1.0);
        assert_eq!(ball.cube_fraction(&Vec3::new(2.0, 0.0, 0.0), 0.1), 0.0);
        let f = ball.cube_fraction(&Vec3::new(1.0, 0.0, 0.0), 0.1);
        assert!((f - 0.5).abs() < 0.1, "{f}");
    }

    #[test]
    fn tangential_gradient_on_sphere() {
        let ball = Domain::unit_ball();
        let x = Vec3::new(1.0, 0.0, 0.0);
        // gradient pointing inward means descent pushes outward: normal part removed
        let g = Vec3::new(-2.0, 1.0, 0.0);
        assert_eq!(ball.tangential_gradient(&x, &g), Vec3::new(0.0, 1.0, 0.0));
        // descent pointing inward is feasible: untouched
        let g = Vec3::new(2.0, 1.0, 0.0);
        assert_eq!(ball.tangential_gradient(&x, &g), g);
        let interior = Vec3::new(0.5, 0.0, 0.0);
        assert_eq!(ball.tangential_gradient(&interior, &Vec3::new(-2.0, 1.0, 0.0)), Vec3::new(-2.0, 1.0, 0.0));
    }
}
