//! Regularized contributions of the 1/r kernel over a single cell or panel.

use std::f64::consts::PI;

/// `∫ dV / |x|` over the unit cube centred at the origin.
///
/// Closed form `2 (3 ln((1 + √3)/√2) − π/4)`, i.e. eight octant cubes of side
/// ½ each contributing `¼ ∫_{[0,1]³} dV/|x|`.
pub const UNIT_CUBE_INVERSE_DISTANCE: f64 = 2.380_077_363_979_553;

/// `∫ dV / |x - c|` over the cube of side `h` centred at `c`.
#[inline]
pub fn cube_self_integral(h: f64) -> f64 {
    UNIT_CUBE_INVERSE_DISTANCE * h * h
}

const DISC_ANGLES: usize = 96;

/// Mean of `1/|x - y|` over `y` in a flat disc of radius `radius`, for a
/// target `x` at height `normal_offset` above the disc plane whose foot is
/// `in_plane_offset` from the disc centre.
///
/// Integrates the radial part in closed form along rays from the foot point
/// and the angular part with the midpoint rule. For feet outside the disc the
/// angle is reparametrized so the integrand stays smooth at the tangent rays.
pub fn disc_mean_inverse_distance(radius: f64, normal_offset: f64, in_plane_offset: f64) -> f64 {
    let a = radius;
    let z = normal_offset.abs();
    let d = in_plane_offset.abs();
    let area = PI * a * a;
    if d == 0.0 {
        return 2.0 * PI * ((a * a + z * z).sqrt() - z) / area;
    }
    let radial = |t: f64| (t * t + z * z).sqrt();
    let n = DISC_ANGLES;
    let mut acc = 0.0;
    if d <= a {
        let dphi = 2.0 * PI / n as f64;
        for k in 0..n {
            let phi = (k as f64 + 0.5) * dphi;
            let (s, c) = phi.sin_cos();
            let t_max = d * c + (a * a - d * d * s * s).max(0.0).sqrt();
            acc += (radial(t_max) - z) * dphi;
        }
    } else {
        // sin(phi) = (a/d) sin(s), s in (-π/2, π/2)
        let ds = PI / n as f64;
        for k in 0..n {
            let s = -0.5 * PI + (k as f64 + 0.5) * ds;
            let sin_phi = a / d * s.sin();
            let cos_phi = (1.0 - sin_phi * sin_phi).sqrt();
            let half_chord = a * s.cos();
            let t_near = d * cos_phi - half_chord;
            let t_far = d * cos_phi + half_chord;
            let jacobian = a / d * s.cos() / cos_phi;
            acc += (radial(t_far) - radial(t_near)) * jacobian * ds;
        }
    }
    acc / area
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Six pyramids from the centre to the faces: each contributes
    /// `¼ ∬_face dy dz / sqrt(¼ + y² + z²)`, a smooth integrand.
    fn cube_oracle(n: usize) -> f64 {
        let mut face = 0.0;
        for i in 0..n {
            for j in 0..n {
                let y = (i as f64 + 0.5) / n as f64 - 0.5;
                let z = (j as f64 + 0.5) / n as f64 - 0.5;
                face += 1.0 / (0.25 + y * y + z * z).sqrt();
            }
        }
        6.0 * 0.25 * face / (n * n) as f64
    }

    #[test]
    fn cube_constant_matches_pyramid_quadrature() {
        assert!((cube_oracle(2000) - UNIT_CUBE_INVERSE_DISTANCE).abs() < 1e-6);
        let closed = 2.0 * (3.0 * ((1.0 + 3f64.sqrt()) / 2f64.sqrt()).ln() - PI / 4.0);
        assert!((closed - UNIT_CUBE_INVERSE_DISTANCE).abs() < 1e-15);
    }

    /// Brute-force midpoint sum over a fine Cartesian raster of the disc;
    /// only used for targets off the disc plane, where 1/r is bounded.
    fn disc_oracle(a: f64, z: f64, d: f64, n: usize) -> f64 {
        let step = 2.0 * a / n as f64;
        let (mut acc, mut area) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let x = -a + (i as f64 + 0.5) * step;
                let y = -a + (j as f64 + 0.5) * step;
                if x * x + y * y <= a * a {
                    acc += 1.0 / ((x - d).powi(2) + y * y + z * z).sqrt();
                    area += 1.0;
                }
            }
        }
        acc / area
    }

    #[test]
    fn disc_on_axis_closed_form() {
        let a = 0.3;
        assert!((disc_mean_inverse_distance(a, 0.0, 0.0) - 2.0 / a).abs() < 1e-14);
        let z = 0.2;
        let expect = 2.0 * PI * ((a * a + z * z).sqrt() - z) / (PI * a * a);
        assert!((disc_mean_inverse_distance(a, z, 0.0) - expect).abs() < 1e-14);
    }

    #[test]
    fn disc_off_axis_matches_raster() {
        for (z, d) in [(0.1, 0.1), (0.05, 0.25), (0.2, 0.45), (0.02, 0.5), (0.3, 0.9)] {
            let got = disc_mean_inverse_distance(0.3, z, d);
            let want = disc_oracle(0.3, z, d, 1500);
            assert!((got - want).abs() / want < 2e-4, "z={z} d={d}: {got} vs {want}");
        }
    }

    #[test]
    fn disc_in_plane_rim_value() {
        // potential of a unit-density disc at its rim is 4a
        let a = 0.7;
        let mean = disc_mean_inverse_distance(a, 0.0, a);
        assert!((mean * PI * a * a - 4.0 * a).abs() / (4.0 * a) < 1e-3);
    }

    #[test]
    fn disc_far_field_tends_to_point() {
        let got = disc_mean_inverse_distance(0.1, 3.0, 4.0);
        assert!((got - 0.2).abs() / 0.2 < 1e-3);
    }
}
