use serde::{Deserialize, Serialize};

use super::Domain;
use crate::{Error, Result, Vec3};

/// Classification of a grid node relative to the discretized domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeLabel {
    /// Strictly inside Ω with all six axis neighbours present in the grid.
    Interior,
    /// Not interior, but 6-adjacent to an interior node.
    Boundary,
    Exterior,
}

/// Relative margin (in units of h) used to decide strict containment.
const CONTAINMENT_MARGIN: f64 = 1e-9;

/// Uniform isotropic grid over the (padded) bounding box of a domain.
///
/// Nodes are stored x-fastest: `index = i + nx * (j + ny * k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid3 {
    origin: Vec3,
    h: f64,
    dims: [usize; 3],
    labels: Vec<NodeLabel>,
    domain: Domain,
}

/// Builds the grid covering `domain` grown by `padding` on every side.
///
/// The domain's lower bounding-box corner always falls on a node, and the
/// padding is rounded up to whole cells.
pub fn build_grid(domain: Domain, h: f64, padding: f64) -> Result<Grid3> {
    domain.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("h", format!("spacing must be positive, got {h}")));
    }
    if !(padding >= 0.0 && padding.is_finite()) {
        return Err(Error::invalid("padding", format!("padding must be nonnegative, got {padding}")));
    }
    let (lo, hi) = domain.bounding_box();
    let pad_cells = (padding / h - CONTAINMENT_MARGIN).ceil().max(0.0) as usize;
    let mut dims = [0usize; 3];
    for a in 0..3 {
        let cells = ((hi[a] - lo[a]) / h - CONTAINMENT_MARGIN).ceil().max(0.0) as usize;
        dims[a] = cells + 1 + 2 * pad_cells;
    }
    let origin = lo - Vec3::repeat(pad_cells as f64 * h);
    let n = dims[0] * dims[1] * dims[2];

    let mut grid = Grid3 { origin, h, dims, labels: vec![NodeLabel::Exterior; n], domain };
    let margin = CONTAINMENT_MARGIN * h;
    for idx in 0..n {
        let [i, j, k] = grid.ijk(idx);
        let has_stencil = (0..3).all(|a| {
            let c = [i, j, k][a];
            c > 0 && c + 1 < dims[a]
        });
        if has_stencil && domain.contains_strictly(&grid.position(idx), margin) {
            grid.labels[idx] = NodeLabel::Interior;
        }
    }
    let mut any_interior = false;
    for idx in 0..n {
        if grid.labels[idx] == NodeLabel::Interior {
            any_interior = true;
            continue;
        }
        if grid.neighbors(idx).any(|nb| grid.labels[nb] == NodeLabel::Interior) {
            grid.labels[idx] = NodeLabel::Boundary;
        }
    }
    if !any_interior {
        return Err(Error::DomainTooSmall { h });
    }
    Ok(grid)
}

impl Grid3 {
    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn label(&self, idx: usize) -> NodeLabel {
        self.labels[idx]
    }

    pub fn cell_volume(&self) -> f64 {
        self.h * self.h * self.h
    }

    /// Lower and upper corners of the grid box.
    pub fn extent(&self) -> (Vec3, Vec3) {
        let span = Vec3::new(
            (self.dims[0] - 1) as f64,
            (self.dims[1] - 1) as f64,
            (self.dims[2] - 1) as f64,
        ) * self.h;
        (self.origin, self.origin + span)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn ijk(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let rest = idx / self.dims[0];
        [i, rest % self.dims[1], rest / self.dims[1]]
    }

    #[inline]
    pub fn position(&self, idx: usize) -> Vec3 {
        let [i, j, k] = self.ijk(idx);
        self.origin + Vec3::new(i as f64, j as f64, k as f64) * self.h
    }

    /// Neighbour along `axis` in direction `+1` (`forward`) or `-1`.
    #[inline]
    pub fn neighbor(&self, idx: usize, axis: usize, forward: bool) -> Option<usize> {
        let c = self.ijk(idx)[axis];
        let stride = match axis {
            0 => 1,
            1 => self.dims[0],
            _ => self.dims[0] * self.dims[1],
        };
        if forward {
            (c + 1 < self.dims[axis]).then(|| idx + stride)
        } else {
            (c > 0).then(|| idx - stride)
        }
    }

    /// Existing 6-connected neighbours.
    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        (0..3).flat_map(move |a| [false, true].into_iter().filter_map(move |f| self.neighbor(idx, a, f)))
    }

    /// Whether all six axis neighbours exist.
    pub fn has_full_stencil(&self, idx: usize) -> bool {
        let ijk = self.ijk(idx);
        (0..3).all(|a| ijk[a] > 0 && ijk[a] + 1 < self.dims[a])
    }

    pub fn nodes_with(&self, label: NodeLabel) -> impl Iterator<Item = usize> + '_ {
        self.labels.iter().enumerate().filter(move |(_, l)| **l == label).map(|(i, _)| i)
    }

    pub fn count(&self, label: NodeLabel) -> usize {
        self.labels.iter().filter(|l| **l == label).count()
    }

    /// Node whose position coincides with `x` up to a small fraction of h.
    pub fn locate(&self, x: &Vec3) -> Option<usize> {
        let rel = (x - self.origin) / self.h;
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let r = rel[a].round();
            if (rel[a] - r).abs() > 1e-6 || r < 0.0 || r as usize >= self.dims[a] {
                return None;
            }
            ijk[a] = r as usize;
        }
        Some(self.index(ijk[0], ijk[1], ijk[2]))
    }

    /// Same node layout (origin, spacing, dims, domain).
    pub fn same_layout(&self, other: &Grid3) -> bool {
        std::ptr::eq(self, other)
            || (self.origin == other.origin && self.h == other.h && self.dims == other.dims && self.domain == other.domain)
    }
}
