//! Matrix-free conjugate gradients for the interior 7-point system
//! `6 u_i − Σ_{interior j ~ i} u_j = Σ_{boundary j ~ i} f_j`.

use crate::{Grid3, NodeLabel};

const NONE: u32 = u32::MAX;

pub(super) struct InteriorSystem {
    pub nodes: Vec<usize>,
    links: Vec<[u32; 6]>,
    pub rhs: Vec<f64>,
}

impl InteriorSystem {
    pub fn new(grid: &Grid3, boundary: &[f64]) -> Self {
        let mut slot = vec![NONE; grid.len()];
        let nodes: Vec<usize> = grid.nodes_with(NodeLabel::Interior).collect();
        for (k, &n) in nodes.iter().enumerate() {
            slot[n] = k as u32;
        }
        let mut links = Vec::with_capacity(nodes.len());
        let mut rhs = Vec::with_capacity(nodes.len());
        for &n in &nodes {
            let mut l = [NONE; 6];
            let mut b = 0.0;
            for (s, nb) in grid.neighbors(n).enumerate() {
                if slot[nb] == NONE {
                    b += boundary[nb];
                } else {
                    l[s] = slot[nb];
                }
            }
            links.push(l);
            rhs.push(b);
        }
        InteriorSystem { nodes, links, rhs }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (k, l) in self.links.iter().enumerate() {
            let mut acc = 6.0 * x[k];
            for &j in l {
                if j != NONE {
                    acc -= x[j as usize];
                }
            }
            out[k] = acc;
        }
    }

    pub fn residual(&self, x: &[f64], out: &mut [f64]) {
        self.apply(x, out);
        for (r, b) in out.iter_mut().zip(&self.rhs) {
            *r = b - *r;
        }
    }

    /// Diagonal of the operator restricted to interior nodes.
    pub fn diagonal(&self) -> f64 {
        6.0
    }
}

pub(super) struct CgOutcome {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Runs CG from `x` until the true residual satisfies `max |r| <= threshold`.
/// The recurrence residual is only trusted as a trigger; on a false alarm the
/// iteration restarts from the recomputed residual.
pub(super) fn conjugate_gradient(
    sys: &InteriorSystem,
    x: &mut [f64],
    threshold: f64,
    max_iter: usize,
    jacobi: bool,
) -> CgOutcome {
    let n = sys.len();
    let inv_diag = if jacobi { 1.0 / sys.diagonal() } else { 1.0 };
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    sys.residual(x, &mut r);
    let mut res = max_abs(&r);
    let mut iterations = 0;
    'restart: loop {
        if res <= threshold {
            return CgOutcome { iterations, residual: res, converged: true };
        }
        let mut z: Vec<f64> = r.iter().map(|v| v * inv_diag).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            sys.apply(&p, &mut ap);
            let pap = dot(&p, &ap);
            if pap <= 0.0 {
                break;
            }
            let alpha = rz / pap;
            for k in 0..n {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            iterations += 1;
            if max_abs(&r) <= threshold {
                sys.residual(x, &mut r);
                res = max_abs(&r);
                continue 'restart;
            }
            for k in 0..n {
                z[k] = r[k] * inv_diag;
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..n {
                p[k] = z[k] + beta * p[k];
            }
        }
        sys.residual(x, &mut r);
        res = max_abs(&r);
        return CgOutcome { iterations, residual: res, converged: res <= threshold };
    }
}
