//! Clamped–clamped beam eigenfunctions on `[0, 1]`.
//!
//! `φ_j'''' = λ_j⁴ φ_j` with `φ = φ' = 0` at both ends; the `λ_j` are the
//! positive roots of `cos λ · cosh λ = 1`. Evaluation uses an
//! exponentially scaled form so large `λ` does not overflow or cancel.

use crate::real::Real;

/// Roots `λ_1 < λ_2 < …` of `cos λ cosh λ = 1`, found by bisection.
pub fn beam_roots<T: Real>(count: usize) -> Vec<T> {
    (1..=count).map(beam_root).collect()
}

/// The `j`-th root (1-based), bracketed in `[jπ, (j+1)π]`.
pub fn beam_root<T: Real>(j: usize) -> T {
    let f = |lam: T| lam.cos() - T::one() / lam.cosh();
    let mut lo = T::from_count(j) * T::PI();
    let mut hi = T::from_count(j + 1) * T::PI();
    let mut flo = f(lo);
    let tol = T::lit(1e-13).max(T::lit(4.0) * T::epsilon() * hi);
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        let fm = f(mid);
        if fm == T::zero() {
            return mid;
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= tol {
            break;
        }
    }
    T::lit(0.5) * (lo + hi)
}

/// One clamped beam mode with precomputed stable coefficients.
#[derive(Clone, Copy, Debug)]
pub struct BeamMode<T> {
    pub lambda: T,
    /// `σ = (cosh λ − cos λ)/(sinh λ − sin λ)`
    sigma: T,
    /// `(cos λ − sin λ − e^{−λ}) / (1 − e^{−2λ} − 2e^{−λ} sin λ)`
    growing: T,
}

impl<T: Real> BeamMode<T> {
    pub fn new(lambda: T) -> Self {
        let two = T::lit(2.0);
        let em = (-lambda).exp();
        let den = T::one() - em * em - two * em * lambda.sin();
        let sigma = (T::one() + em * em - two * em * lambda.cos()) / den;
        let growing = (lambda.cos() - lambda.sin() - em) / den;
        Self { lambda, sigma, growing }
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// `d^order φ / dy^order` at `y ∈ [0, 1]`, for any `order`.
    ///
    /// `φ(y) = cosh λy − cos λy − σ (sinh λy − sin λy)`, written as
    /// `A e^{λy} + B e^{−λy} − cos λy + σ sin λy` with `A e^{λy}` evaluated as
    /// `growing · e^{λ(y−1)}`.
    pub fn eval(&self, y: T, order: usize) -> T {
        let lam = self.lambda;
        let half = T::lit(0.5);
        let a_term = self.growing * (lam * (y - T::one())).exp();
        let b_term = half * (T::one() + self.sigma) * (-lam * y).exp();
        let sign = if order.is_multiple_of(2) { T::one() } else { -T::one() };
        let shift = T::from_count(order % 4) * T::FRAC_PI_2();
        let phase = lam * y + shift;
        let value = a_term + sign * b_term - phase.cos() + self.sigma * phase.sin();
        value * lam.powi(order as i32)
    }
}
