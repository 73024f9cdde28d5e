//! Linear operators: powers of the Dirichlet Laplacian, norms, `rot` in its
//! scalar and vector forms, the Leray projection and the Stokes operator.

use std::sync::Arc;

use super::basis::SolenoidalBasis;
use super::field::{Component, GridField, GridVector, ScalarField, SolenoidalField};
use crate::error::{Error, Result};
use crate::real::Real;

/// Supported powers `A^p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    Half,
    One,
    ThreeHalves,
    Two,
    Three,
}

impl Exponent {
    /// Parses the reduced or unreduced ratio `num/den`.
    pub fn from_ratio(num: u32, den: u32) -> Result<Self> {
        let unsupported = Error::UnsupportedExponent { num, den };
        if den == 0 {
            return Err(unsupported);
        }
        let g = gcd(num, den);
        match (num / g.max(1), den / g.max(1)) {
            (1, 2) => Ok(Self::Half),
            (1, 1) => Ok(Self::One),
            (3, 2) => Ok(Self::ThreeHalves),
            (2, 1) => Ok(Self::Two),
            (3, 1) => Ok(Self::Three),
            _ => Err(unsupported),
        }
    }

    #[inline]
    pub fn apply<T: Real>(self, beta: T) -> T {
        match self {
            Self::Half => beta.sqrt(),
            Self::One => beta,
            Self::ThreeHalves => beta * beta.sqrt(),
            Self::Two => beta * beta,
            Self::Three => beta * beta * beta,
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `(|f|, ‖f‖, |Af|, |A^{3/2} f|)`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarNorms<T> {
    pub l2: T,
    pub h1: T,
    pub h2_proxy: T,
    pub h3_proxy: T,
}

impl<T: Real> ScalarField<T> {
    /// `A f = −Δf`, diagonal in the eigenbasis.
    pub fn apply_a(&self) -> Self {
        self.apply_a_frac(Exponent::One)
    }

    pub fn apply_a_frac(&self, p: Exponent) -> Self {
        let beta = self.basis().eigenvalues();
        let coeffs = self.coeffs().iter().zip(beta).map(|(c, b)| *c * p.apply(*b)).collect();
        Self::from_coeffs(self.basis(), coeffs).expect("same basis")
    }

    /// Squared norms `Σ β^p c²` for `p = 0, 1, 2, 3`.
    pub fn norms_sq(&self) -> [T; 4] {
        let mut acc = [T::zero(); 4];
        for (c, b) in self.coeffs().iter().zip(self.basis().eigenvalues()) {
            let c2 = *c * *c;
            acc[0] += c2;
            acc[1] += *b * c2;
            acc[2] += *b * *b * c2;
            acc[3] += *b * *b * *b * c2;
        }
        acc
    }

    pub fn norms(&self) -> ScalarNorms<T> {
        let [a, b, c, d] = self.norms_sq();
        ScalarNorms {
            l2: a.sqrt(),
            h1: b.sqrt(),
            h2_proxy: c.sqrt(),
            h3_proxy: d.sqrt(),
        }
    }

    /// Full H³ norm `(Σ_{|α|≤3} |D^α f|²)^{1/2}` by spectral differentiation on the grid.
    pub fn h3_norm_direct(&self) -> T {
        let quad = self.basis().quadrature();
        let mut total = T::zero();
        for order in 0..=3 {
            for dx in 0..=order {
                let g = self.synthesize(dx, order - dx);
                total += quad.integrate(&g.data.iter().map(|v| *v * *v).collect::<Vec<_>>());
            }
        }
        total.sqrt()
    }
}

/// `rot ω = (∂ω/∂x₂, −∂ω/∂x₁)` on the grid.
pub fn rot_scalar<T: Real>(w: &ScalarField<T>) -> GridVector<T> {
    let dy = w.synthesize(0, 1);
    let dx = w.synthesize(1, 0);
    GridVector {
        x: dy,
        y: dx.map(|v| -v),
    }
}

/// `rot u = ∂u₂/∂x₁ − ∂u₁/∂x₂` on the grid.
pub fn rot_vector<T: Real>(u: &SolenoidalField<T>) -> GridField<T> {
    let a = u.synthesize(Component::Y, 1, 0);
    let b = u.synthesize(Component::X, 0, 1);
    a.zip_map(&b, |p, q| p - q)
}

/// `rot rot u = (∂_y rot u, −∂_x rot u)` on the grid.
pub fn rot_rot<T: Real>(u: &SolenoidalField<T>) -> GridVector<T> {
    let u2xy = u.synthesize(Component::Y, 1, 1);
    let u1yy = u.synthesize(Component::X, 0, 2);
    let u2xx = u.synthesize(Component::Y, 2, 0);
    let u1xy = u.synthesize(Component::X, 1, 1);
    GridVector {
        x: u2xy.zip_map(&u1yy, |a, b| a - b),
        y: u2xx.zip_map(&u1xy, |a, b| b - a),
    }
}

/// `−Δu` componentwise on the grid.
pub fn neg_laplacian<T: Real>(u: &SolenoidalField<T>) -> GridVector<T> {
    let lap = |c: Component| {
        let xx = u.synthesize(c, 2, 0);
        let yy = u.synthesize(c, 0, 2);
        xx.zip_map(&yy, |a, b| -(a + b))
    };
    GridVector {
        x: lap(Component::X),
        y: lap(Component::Y),
    }
}

/// Best L² approximation of `g` in the divergence-free basis.
pub fn leray_project<T: Real>(basis: &Arc<SolenoidalBasis<T>>, g: &GridVector<T>) -> Result<SolenoidalField<T>> {
    let load = SolenoidalField::load_vector(basis, g);
    SolenoidalField::from_load(basis, load)
}

impl<T: Real> SolenoidalField<T> {
    /// Weak Stokes operator: `M w = K u` per wavenumber.
    pub fn apply_stokes(&self) -> Result<Self> {
        let basis = self.basis().clone();
        let jy = basis.modes_per_block();
        let mut out = vec![T::zero(); basis.len()];
        for (idx, block) in basis.blocks().iter().enumerate() {
            block
                .stokes
                .matvec(self.block_coeffs(idx), &mut out[idx * jy..(idx + 1) * jy]);
        }
        Self::from_coeffs(&basis, out)
    }

    /// `(|u|², ‖u‖², |A_S u|²)`
    pub fn norms_sq(&self) -> Result<[T; 3]> {
        let w = self.apply_stokes()?;
        Ok([self.inner(self)?, self.grad_inner(self)?, w.inner(&w)?])
    }
}
