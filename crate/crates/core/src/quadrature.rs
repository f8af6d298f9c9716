//! Tensor-product Gauss–Legendre quadrature on momentum-space cubes.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::linalg::Vec3;

/// Nodes (ascending) and weights of the `n`-point Gauss–Legendre rule on
/// `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let degree = NonZeroUsize::new(n).expect("quadrature needs at least one node");
    let mut pairs = GaussLegendre::new(degree).into_node_weight_pairs().into_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Cube `center ± half_width` per axis with `points` nodes per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeGrid {
    pub center: Vec3,
    pub half_width: f64,
    pub points: usize,
}

impl CubeGrid {
    /// Nodes and weights in a fixed order (x slowest).
    pub fn nodes(&self) -> Vec<(Vec3, f64)> {
        let (x, w) = gauss_legendre(self.points);
        let h = self.half_width;
        let mut out = Vec::with_capacity(self.points.pow(3));
        for (xi, wi) in x.iter().zip(&w) {
            for (xj, wj) in x.iter().zip(&w) {
                for (xk, wk) in x.iter().zip(&w) {
                    let p = [
                        self.center[0] + h * xi,
                        self.center[1] + h * xj,
                        self.center[2] + h * xk,
                    ];
                    out.push((p, wi * wj * wk * h * h * h));
                }
            }
        }
        out
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|i| (p[i] - self.center[i]).abs() <= self.half_width)
    }
}
