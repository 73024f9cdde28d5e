use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{Discretization, GridField, ScalarBasis, ScalarField, SolenoidalBasis, SolenoidalField};

/// `(u, ω, θ)` at time `t`.
#[derive(Clone, Debug)]
pub struct State<T> {
    pub u: SolenoidalField<T>,
    pub omega: ScalarField<T>,
    pub theta: ScalarField<T>,
    pub t: T,
}

/// Squared norms of one state, in ledger column order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StateNorms<T> {
    pub u_l2sq: T,
    pub u_h1sq: T,
    pub u_stokes_sq: T,
    pub omega_l2sq: T,
    pub omega_h1sq: T,
    pub omega_a_sq: T,
    pub theta_l2sq: T,
    pub theta_h1sq: T,
    pub theta_a_sq: T,
}

impl<T: Real> StateNorms<T> {
    /// `|u|² + |ω|² + |θ|²`
    pub fn y(&self) -> T {
        self.u_l2sq + self.omega_l2sq + self.theta_l2sq
    }

    /// `‖u‖² + ‖ω‖² + ‖θ‖²`
    pub fn y_strong(&self) -> T {
        self.u_h1sq + self.omega_h1sq + self.theta_h1sq
    }
}

impl<T: Real> State<T> {
    pub fn zeros(disc: &Discretization<T>) -> Self {
        Self {
            u: SolenoidalField::zeros(&disc.velocity),
            omega: ScalarField::zeros(&disc.scalar),
            theta: ScalarField::zeros(&disc.scalar),
            t: T::zero(),
        }
    }

    pub fn new(u: SolenoidalField<T>, omega: ScalarField<T>, theta: ScalarField<T>, t: T) -> Result<Self> {
        let s = Self { u, omega, theta, t };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.omega.same_basis(&self.theta)?;
        let (rv, rs) = (self.u.basis().resolution(), self.omega.basis().resolution());
        if rv != rs || self.u.basis().domain() != self.omega.basis().domain() {
            return Err(Error::BasisMismatch(format!("velocity {rv:?} vs scalars {rs:?}")));
        }
        if !self.is_finite() || !self.t.is_finite() {
            return Err(Error::NonFinite {
                t: self.t.to_f64_lossy(),
                term: "state".into(),
            });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.omega.is_finite() && self.theta.is_finite()
    }

    pub fn scalar_basis(&self) -> &Arc<ScalarBasis<T>> {
        self.omega.basis()
    }

    pub fn velocity_basis(&self) -> &Arc<SolenoidalBasis<T>> {
        self.u.basis()
    }

    pub fn norms(&self) -> Result<StateNorms<T>> {
        let [u0, u1, u2] = self.u.norms_sq()?;
        let [w0, w1, w2, _] = self.omega.norms_sq();
        let [t0, t1, t2, _] = self.theta.norms_sq();
        Ok(StateNorms {
            u_l2sq: u0,
            u_h1sq: u1,
            u_stokes_sq: u2,
            omega_l2sq: w0,
            omega_h1sq: w1,
            omega_a_sq: w2,
            theta_l2sq: t0,
            theta_h1sq: t1,
            theta_a_sq: t2,
        })
    }

    /// `self − other`, clock taken from `self`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            u: self.u.sub(&other.u)?,
            omega: self.omega.sub(&other.omega)?,
            theta: self.theta.sub(&other.theta)?,
            t: self.t,
        })
    }

    /// `self + s·other`
    pub fn add_scaled(&self, s: T, other: &Self) -> Result<Self> {
        Ok(Self {
            u: self.u.add(&other.u.scaled(s))?,
            omega: self.omega.add(&other.omega.scaled(s))?,
            theta: self.theta.add(&other.theta.scaled(s))?,
            t: self.t,
        })
    }

    /// Copies the coefficients shared with a (coarser or finer) discretization;
    /// modes absent from `self` are zero.
    pub fn transfer(&self, disc: &Discretization<T>) -> Result<Self> {
        if disc.domain() != self.scalar_basis().domain() {
            return Err(Error::BasisMismatch("transfer between different periods".into()));
        }
        let mut out = Self::zeros(disc);
        out.t = self.t;
        let src = self.scalar_basis();
        for (slot, c) in self.omega.coeffs().iter().enumerate() {
            let (n, m) = src.mode_of_slot(slot);
            if let Some(dst) = disc.scalar.slot(n, m) {
                out.omega.coeffs_mut()[dst] = *c;
                out.theta.coeffs_mut()[dst] = self.theta.coeffs()[slot];
            }
        }
        let vb = self.velocity_basis();
        let jy = vb.modes_per_block();
        for (idx, block) in vb.blocks().iter().enumerate() {
            for j in 0..jy {
                if let Some(dst) = disc.velocity.slot(block.n, j) {
                    out.u.coeffs_mut()[dst] = self.u.coeffs()[idx * jy + j];
                }
            }
        }
        Ok(out)
    }
}

/// Temperature `T = 1 − y + θ` from the perturbation, on the grid.
pub fn unlift<T: Real>(theta: &ScalarField<T>) -> GridField<T> {
    let quad = theta.basis().quadrature();
    let th = theta.synthesize(0, 0);
    let ny = quad.ny_points();
    let mut out = th;
    for (i, v) in out.data.iter_mut().enumerate() {
        *v += T::one() - quad.y[i % ny];
    }
    out
}

/// Perturbation `θ = T − (1 − y)` projected onto the scalar basis, with the
/// L² residual of the projection (nonzero when `T` violates the wall values).
pub fn lift_temperature<T: Real>(basis: &Arc<ScalarBasis<T>>, temperature: &GridField<T>) -> (ScalarField<T>, T) {
    let quad = basis.quadrature();
    let ny = quad.ny_points();
    let mut pert = temperature.clone();
    for (i, v) in pert.data.iter_mut().enumerate() {
        *v -= T::one() - quad.y[i % ny];
    }
    let theta = ScalarField::project(basis, &pert);
    let back = theta.synthesize(0, 0);
    let r = pert.zip_map(&back, |a, b| (a - b) * (a - b));
    (theta, quad.integrate(&r.data).sqrt())
}
