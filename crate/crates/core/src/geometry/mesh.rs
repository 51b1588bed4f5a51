use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Domain;
use crate::{Error, Result, Vec3};

/// Flat surface element: centroid, area and outward unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub centroid: Vec3,
    pub area: f64,
    pub normal: Vec3,
}

impl Panel {
    /// Characteristic panel size, `sqrt(area)`.
    pub fn size(&self) -> f64 {
        self.area.sqrt()
    }
}

/// Panelization of the boundary S of a domain.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SurfaceMesh {
    panels: Vec<Panel>,
}

impl SurfaceMesh {
    pub fn new(panels: Vec<Panel>) -> Result<Self> {
        for (index, p) in panels.iter().enumerate() {
            if !(p.area > 0.0 && p.area.is_finite()) || p.centroid.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { what: "panel", index });
            }
            if (p.normal.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("normal", format!("panel {index} normal is not unit length")));
            }
        }
        Ok(SurfaceMesh { panels })
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Panel> {
        self.panels.iter()
    }

    pub fn total_area(&self) -> f64 {
        self.panels.iter().map(|p| p.area).sum()
    }
}

/// Panelizes the boundary of `domain` at resolution `n`.
///
/// Boxes get an `n x n` subdivision of each face. Balls get `n` equal-angle
/// latitude bands; band `k` is split into about `2n sin(theta)` longitude
/// cells so panels stay roughly square, and each panel carries its exact
/// spherical area with the centroid placed on the sphere at the band's
/// area midpoint.
pub fn panelize(domain: &Domain, n: usize) -> Result<SurfaceMesh> {
    domain.validate()?;
    if n == 0 {
        return Err(Error::invalid("n", "panel resolution must be at least 1"));
    }
    let panels = match *domain {
        Domain::Box { lo, hi } => box_panels(lo, hi, n),
        Domain::Ball { center, radius } => ball_panels(center, radius, n),
    };
    Ok(SurfaceMesh { panels })
}

/// Smallest ball panelization with at least `min_panels` panels; boxes use
/// the smallest `n` with `6 n^2 >= min_panels`.
pub fn panelize_at_least(domain: &Domain, min_panels: usize) -> Result<SurfaceMesh> {
    let mut n = 1;
    loop {
        let mesh = panelize(domain, n)?;
        if mesh.len() >= min_panels {
            return Ok(mesh);
        }
        n += 1;
    }
}

fn box_panels(lo: Vec3, hi: Vec3, n: usize) -> Vec<Panel> {
    let mut out = Vec::with_capacity(6 * n * n);
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        let du = (hi[u] - lo[u]) / n as f64;
        let dv = (hi[v] - lo[v]) / n as f64;
        for (side, sign) in [(lo[axis], -1.0), (hi[axis], 1.0)] {
            let mut normal = Vec3::zeros();
            normal[axis] = sign;
            for a in 0..n {
                for b in 0..n {
                    let mut c = Vec3::zeros();
                    c[axis] = side;
                    c[u] = lo[u] + (a as f64 + 0.5) * du;
                    c[v] = lo[v] + (b as f64 + 0.5) * dv;
                    out.push(Panel { centroid: c, area: du * dv, normal });
                }
            }
        }
    }
    out
}

fn ball_panels(center: Vec3, radius: f64, n: usize) -> Vec<Panel> {
    let mut out = Vec::new();
    let dtheta = PI / n as f64;
    for band in 0..n {
        let t0 = band as f64 * dtheta;
        let t1 = t0 + dtheta;
        let (c0, c1) = (t0.cos(), t1.cos());
        let mid = 0.5 * (t0 + t1);
        let cells = ((2.0 * n as f64 * mid.sin()).round() as usize).max(3);
        let dphi = 2.0 * PI / cells as f64;
        let area = radius * radius * dphi * (c0 - c1);
        let cos_c = 0.5 * (c0 + c1);
        let sin_c = (1.0 - cos_c * cos_c).max(0.0).sqrt();
        for cell in 0..cells {
            let phi = (cell as f64 + 0.5) * dphi;
            let normal = Vec3::new(sin_c * phi.cos(), sin_c * phi.sin(), cos_c);
            let normal = normal / normal.norm();
            out.push(Panel { centroid: center + normal * radius, area, normal });
        }
    }
    out
}

/// Points `centroid ± offset * normal` for one-sided normal differences.
pub fn normal_probe_points(mesh: &SurfaceMesh, offset: f64) -> Result<(Vec<Vec3>, Vec<Vec3>)> {
    if !(offset > 0.0 && offset.is_finite()) {
        return Err(Error::invalid("offset", format!("probe offset must be positive, got {offset}")));
    }
    Ok(mesh
        .iter()
        .map(|p| (p.centroid + p.normal * offset, p.centroid - p.normal * offset))
        .unzip())
}
