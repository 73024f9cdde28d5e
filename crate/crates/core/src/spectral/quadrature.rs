//! Tensor-product quadrature: uniform trapezoid in the periodic direction,
//! Gauss–Legendre across the channel.

use super::domain::{DomainSpec, Resolution};
use crate::real::Real;

#[derive(Clone, Debug)]
pub struct GridQuadrature<T> {
    pub x: Vec<T>,
    pub wx: Vec<T>,
    pub y: Vec<T>,
    pub wy: Vec<T>,
}

impl<T: Real> GridQuadrature<T> {
    pub fn new(domain: &DomainSpec<T>, res: &Resolution) -> Self {
        let (x, wx) = trapezoid(domain.l, res.quad_x);
        let (y, wy) = gauss_legendre_unit(res.quad_y);
        Self { x, wx, y, wy }
    }

    pub fn nx_points(&self) -> usize {
        self.x.len()
    }

    pub fn ny_points(&self) -> usize {
        self.y.len()
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Integrates grid values laid out as `[p * ny + q]`.
    pub fn integrate(&self, values: &[T]) -> T {
        let ny = self.ny_points();
        let mut total = T::zero();
        for (p, wx) in self.wx.iter().enumerate() {
            let row = &values[p * ny..(p + 1) * ny];
            let mut s = T::zero();
            for (v, wy) in row.iter().zip(&self.wy) {
                s += *v * *wy;
            }
            total += *wx * s;
        }
        total
    }
}

/// `n` equispaced points on `[0, l)` with equal weights `l/n`.
pub fn trapezoid<T: Real>(l: T, n: usize) -> (Vec<T>, Vec<T>) {
    let h = l / T::from_count(n);
    let x = (0..n).map(|p| T::from_count(p) * h).collect();
    (x, vec![h; n])
}

/// Gauss–Legendre nodes and weights on `[0, 1]`, nodes ascending.
pub fn gauss_legendre_unit<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let (xs, ws) = gauss_legendre(n);
    let half = T::lit(0.5);
    (
        xs.iter().map(|&x| half * (x + T::one())).collect(),
        ws.iter().map(|&w| half * w).collect(),
    )
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut xs = vec![T::zero(); n];
    let mut ws = vec![T::zero(); n];
    let nf = T::from_count(n);
    let eps = T::epsilon();
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root.
        let mut x = (T::PI() * (T::from_count(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::lit(4.0) * eps * x.abs().max(T::one()) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        xs[n - 1 - i] = x;
        ws[n - 1 - i] = w;
        xs[i] = -x;
        ws[i] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = T::zero();
    }
    (xs, ws)
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, T::zero());
    }
    for k in 2..=n {
        let kf = T::from_count(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_count(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let n = 12;
        let (y, w) = gauss_legendre_unit::<f64>(n);
        for deg in 0..(2 * n) {
            let approx: f64 = y.iter().zip(&w).map(|(y, w)| w * y.powi(deg as i32)).sum();
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((approx - exact).abs() < 1e-14, "deg {deg}: {approx} vs {exact}");
        }
    }

    #[test]
    fn nodes_ascending_and_inside() {
        for n in [1usize, 2, 5, 40, 137] {
            let (y, w) = gauss_legendre_unit::<f64>(n);
            assert!(y.windows(2).all(|p| p[0] < p[1]));
            assert!(y.iter().all(|&v| v > 0.0 && v < 1.0));
            let total: f64 = w.iter().sum();
            assert!((total - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn trapezoid_exact_for_band() {
        let l = 2.0 * std::f64::consts::PI;
        let q = 7;
        let (x, w) = trapezoid(l, q);
        for k in 1..q {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (k as f64 * x).cos()).sum();
            assert!(s.abs() < 1e-13);
        }
    }
}
