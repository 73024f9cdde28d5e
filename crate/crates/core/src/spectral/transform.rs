//! Separable synthesis/analysis kernels between coefficient space and the
//! quadrature grid.
//!
//! Horizontal functions are `e_n(x) = (sin k_n x + cos k_n x)/√l` with
//! `k_n = 2nπ/l`; they are orthonormal on `[0, l)` and satisfy
//! `e_n' = k_n e_{−n}`, so horizontal differentiation only permutes and
//! scales coefficients. Grid values are stored `[p * qy + q]`.

use super::domain::{DomainSpec, Resolution};
use super::quadrature::GridQuadrature;
use crate::real::Real;

#[derive(Clone, Debug)]
pub struct XTable<T> {
    nx: usize,
    qx: usize,
    qy: usize,
    k: Vec<T>,
    /// `e_n(x_p)` at `[n_idx * qx + p]`
    e: Vec<T>,
    /// `w_p e_n(x_p)`
    we: Vec<T>,
}

impl<T: Real> XTable<T> {
    pub fn new(domain: &DomainSpec<T>, res: &Resolution, quad: &GridQuadrature<T>) -> Self {
        let nx = res.nx;
        let qx = quad.nx_points();
        let inv_sqrt_l = T::one() / domain.l.sqrt();
        let mut k = Vec::with_capacity(2 * nx + 1);
        let mut e = Vec::with_capacity((2 * nx + 1) * qx);
        let mut we = Vec::with_capacity((2 * nx + 1) * qx);
        for idx in 0..(2 * nx + 1) {
            let n = idx as i32 - nx as i32;
            let kn = domain.wavenumber(n);
            k.push(kn);
            for p in 0..qx {
                let a = kn * quad.x[p];
                let v = (a.sin() + a.cos()) * inv_sqrt_l;
                e.push(v);
                we.push(v * quad.wx[p]);
            }
        }
        Self {
            nx,
            qx,
            qy: quad.ny_points(),
            k,
            e,
            we,
        }
    }

    pub fn modes(&self) -> usize {
        2 * self.nx + 1
    }

    pub fn max_n(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn n_of(&self, idx: usize) -> i32 {
        idx as i32 - self.nx as i32
    }

    #[inline]
    pub fn idx_of(&self, n: i32) -> usize {
        (n + self.nx as i32) as usize
    }

    /// Index of `e_{−n}`.
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        2 * self.nx - idx
    }

    #[inline]
    pub fn k(&self, idx: usize) -> T {
        self.k[idx]
    }

    pub fn k_max(&self) -> T {
        self.k[2 * self.nx]
    }

    /// `d^order e_n/dx^order = factor · e_target`.
    #[inline]
    pub fn deriv(&self, idx: usize, order: usize) -> (T, usize) {
        let kn = self.k[idx];
        let mag = kn.powi(order as i32);
        let factor = if order % 4 >= 2 { -mag } else { mag };
        let target = if order % 2 == 1 { self.mirror(idx) } else { idx };
        (factor, target)
    }

    pub fn value(&self, idx: usize, p: usize) -> T {
        self.e[idx * self.qx + p]
    }

    /// `grid[p,q] = Σ_n ∂ₓ^order e_n(x_p) · profiles[n,q]`, profiles at `[n_idx * qy + q]`.
    pub fn synthesize(&self, profiles: &[T], order: usize, grid: &mut [T]) {
        let qy = self.qy;
        grid.iter_mut().for_each(|v| *v = T::zero());
        for idx in 0..self.modes() {
            let g = &profiles[idx * qy..(idx + 1) * qy];
            if g.iter().all(|v| *v == T::zero()) {
                continue;
            }
            let (factor, target) = self.deriv(idx, order);
            if factor == T::zero() {
                continue;
            }
            let erow = &self.e[target * self.qx..(target + 1) * self.qx];
            for (p, ev) in erow.iter().enumerate() {
                let a = factor * *ev;
                let out = &mut grid[p * qy..(p + 1) * qy];
                for (o, gv) in out.iter_mut().zip(g) {
                    *o += a * *gv;
                }
            }
        }
    }

    /// `profiles[n,q] = Σ_p w_p e_n(x_p) grid[p,q]`.
    pub fn analyze(&self, grid: &[T], profiles: &mut [T]) {
        let qy = self.qy;
        profiles.iter_mut().for_each(|v| *v = T::zero());
        for idx in 0..self.modes() {
            let out = &mut profiles[idx * qy..(idx + 1) * qy];
            let wrow = &self.we[idx * self.qx..(idx + 1) * self.qx];
            for (p, w) in wrow.iter().enumerate() {
                let row = &grid[p * qy..(p + 1) * qy];
                for (o, g) in out.iter_mut().zip(row) {
                    *o += *w * *g;
                }
            }
        }
    }
}

/// `profile[q] = Σ_j coeffs[j] · table[j, q]`
pub fn synth_profile<T: Real>(coeffs: &[T], table: &[T], qy: usize, profile: &mut [T]) {
    profile.iter_mut().for_each(|v| *v = T::zero());
    for (j, c) in coeffs.iter().enumerate() {
        if *c == T::zero() {
            continue;
        }
        let row = &table[j * qy..(j + 1) * qy];
        for (o, t) in profile.iter_mut().zip(row) {
            *o += *c * *t;
        }
    }
}

/// `coeffs[j] += Σ_q wy_q profile[q] table[j, q]`
pub fn analyze_profile<T: Real>(profile: &[T], wy: &[T], table: &[T], coeffs: &mut [T]) {
    let qy = wy.len();
    for (j, c) in coeffs.iter_mut().enumerate() {
        let row = &table[j * qy..(j + 1) * qy];
        let mut s = T::zero();
        for ((pv, w), t) in profile.iter().zip(wy).zip(row) {
            s += *pv * *w * *t;
        }
        *c += s;
    }
}
