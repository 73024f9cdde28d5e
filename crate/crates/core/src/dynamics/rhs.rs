use std::sync::Arc;

use super::params::PhysParams;
use super::state::State;
use crate::error::{Error, Result};
use crate::nonlinear::{gradient, rot_dot_grad, VelocityGrid};
use crate::real::Real;
use crate::spectral::{GridField, GridVector, ScalarBasis, ScalarField, SolenoidalBasis, SolenoidalField};

/// Explicitly treated terms: the velocity load vector (before the mass
/// solve) and the projected scalar forcings.
#[derive(Clone, Debug, PartialEq)]
pub struct Explicit<T> {
    pub u_load: Vec<T>,
    pub omega: Vec<T>,
    pub theta: Vec<T>,
}

impl<T: Real> Explicit<T> {
    /// `a·self + b·other`
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        let mix = |x: &[T], y: &[T]| x.iter().zip(y).map(|(p, q)| a * *p + b * *q).collect();
        Self {
            u_load: mix(&self.u_load, &other.u_load),
            omega: mix(&self.omega, &other.omega),
            theta: mix(&self.theta, &other.theta),
        }
    }
}

/// Coefficient time derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Tendency<T> {
    pub du: Vec<T>,
    pub domega: Vec<T>,
    pub dtheta: Vec<T>,
}

/// Galerkin system for fixed bases and parameters.
#[derive(Clone, Debug)]
pub struct Model<T> {
    params: PhysParams<T>,
    scalar: Arc<ScalarBasis<T>>,
    velocity: Arc<SolenoidalBasis<T>>,
    advection: bool,
    omega_rate: Vec<T>,
    theta_rate: Vec<T>,
}

fn check_grid<T: Real>(g: &GridField<T>, t: T, term: &str) -> Result<()> {
    if g.data.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            t: t.to_f64_lossy(),
            term: term.into(),
        })
    }
}

impl<T: Real> Model<T> {
    pub fn new(
        scalar: &Arc<ScalarBasis<T>>,
        velocity: &Arc<SolenoidalBasis<T>>,
        params: PhysParams<T>,
    ) -> Result<Self> {
        params.validate_degenerate()?;
        if scalar.resolution() != velocity.resolution() || scalar.domain() != velocity.domain() {
            return Err(Error::BasisMismatch("scalar and velocity bases differ".into()));
        }
        if (scalar.domain().l - params.l).abs() > T::epsilon() * params.l * T::lit(16.0) {
            return Err(Error::Params(format!(
                "period l = {} differs from the domain period {}",
                params.l,
                scalar.domain().l
            )));
        }
        let four_nsq = T::lit(4.0) * params.nsq;
        let omega_rate = scalar
            .eigenvalues()
            .iter()
            .map(|b| params.pr * (*b / params.lsq + four_nsq))
            .collect();
        Ok(Self {
            params,
            scalar: scalar.clone(),
            velocity: velocity.clone(),
            advection: true,
            omega_rate,
            theta_rate: scalar.eigenvalues().to_vec(),
        })
    }

    pub fn for_state(s: &State<T>, params: PhysParams<T>) -> Result<Self> {
        s.validate()?;
        Self::new(s.scalar_basis(), s.velocity_basis(), params)
    }

    /// Drops the transport terms `(u·∇)u`, `u·∇ω`, `u·∇θ` and `D rot ω·∇θ`,
    /// leaving the linearization about the conduction state.
    pub fn without_advection(mut self) -> Self {
        self.advection = false;
        self
    }

    pub fn advection(&self) -> bool {
        self.advection
    }

    pub fn params(&self) -> &PhysParams<T> {
        &self.params
    }

    pub fn scalar_basis(&self) -> &Arc<ScalarBasis<T>> {
        &self.scalar
    }

    pub fn velocity_basis(&self) -> &Arc<SolenoidalBasis<T>> {
        &self.velocity
    }

    /// Implicit decay rates `Pr(β/L² + 4N²)` of the microrotation modes.
    pub fn omega_rate(&self) -> &[T] {
        &self.omega_rate
    }

    /// Implicit decay rates `β` of the temperature modes.
    pub fn theta_rate(&self) -> &[T] {
        &self.theta_rate
    }

    pub fn explicit(&self, s: &State<T>) -> Result<Explicit<T>> {
        let p = &self.params;
        let two_nsq_pr = T::lit(2.0) * p.nsq * p.pr;
        let vg = VelocityGrid::new(&s.u);
        let gw = gradient(&s.omega);
        let gt = gradient(&s.theta);
        let th = s.theta.synthesize(0, 0);

        // −(u·∇)u + Pr(2N² rot ω + Ra θ e₂), rot ω = (∂_y ω, −∂ₓ ω)
        let mut force = GridVector {
            x: gw.y.map(|v| two_nsq_pr * v),
            y: gw.x.zip_map(&th, |wx, t| p.pr * (p.ra * t) - two_nsq_pr * wx),
        };
        if self.advection {
            let adv = vg.self_advection();
            force.x = force.x.zip_map(&adv.x, |a, b| a - b);
            force.y = force.y.zip_map(&adv.y, |a, b| a - b);
        }
        check_grid(&force.x, s.t, "velocity forcing")?;
        check_grid(&force.y, s.t, "velocity forcing")?;
        let u_load = SolenoidalField::load_vector(&self.velocity, &force);

        // −u·∇ω + 2N²Pr rot u
        let mut fw = vg.rot().map(|v| two_nsq_pr * v);
        if self.advection {
            fw = fw.zip_map(&vg.u.dot(&gw), |a, b| a - b);
        }
        check_grid(&fw, s.t, "microrotation forcing")?;
        let omega = ScalarField::project(&self.scalar, &fw).into_coeffs();

        // −u·∇θ + D rot ω·∇θ + D ∂ₓω + u₂
        let mut ft = gw.x.zip_map(&vg.u.y, |wx, u2| p.d * wx + u2);
        if self.advection {
            let transport = rot_dot_grad(&gw, &gt).zip_map(&vg.u.dot(&gt), |r, a| p.d * r - a);
            ft = ft.zip_map(&transport, |a, b| a + b);
        }
        check_grid(&ft, s.t, "temperature forcing")?;
        let theta = ScalarField::project(&self.scalar, &ft).into_coeffs();
        Ok(Explicit { u_load, omega, theta })
    }

    /// Full right-hand side of the Galerkin ODE.
    pub fn rhs(&self, s: &State<T>) -> Result<Tendency<T>> {
        let e = self.explicit(s)?;
        let jy = self.velocity.modes_per_block();
        let mut du = e.u_load;
        let mut tmp = vec![T::zero(); jy];
        for (idx, block) in self.velocity.blocks().iter().enumerate() {
            block.stiffness.matvec(s.u.block_coeffs(idx), &mut tmp);
            let out = &mut du[idx * jy..(idx + 1) * jy];
            for (o, k) in out.iter_mut().zip(&tmp) {
                *o -= self.params.pr * *k;
            }
            block.mass_cholesky().solve_in_place(out);
        }
        let decay = |f: &ScalarField<T>, rate: &[T], forcing: Vec<T>| -> Vec<T> {
            forcing
                .into_iter()
                .zip(f.coeffs().iter().zip(rate))
                .map(|(g, (c, r))| g - *r * *c)
                .collect()
        };
        Ok(Tendency {
            du,
            domega: decay(&s.omega, &self.omega_rate, e.omega),
            dtheta: decay(&s.theta, &self.theta_rate, e.theta),
        })
    }

    /// Largest admissible step for the explicit terms at state `s`.
    ///
    /// Advective CFL `0.5·h/(|u|∞ + D|rot ω|∞)` on the coarsest mode spacing,
    /// capped by `1/(2N²Pr·k + D·k + Ra·Pr + 1)` for the linear couplings with
    /// `k = sqrt(β_max)`.
    pub fn dt_max(&self, s: &State<T>) -> T {
        let p = &self.params;
        let res = self.scalar.resolution();
        let h = (p.l / T::from_count(2 * res.nx + 1)).min(T::one() / T::from_count(res.my.max(res.jy) + 1));
        let u = s.u.velocity().max_abs();
        let rw = if p.d > T::zero() {
            let gw = gradient(&s.omega);
            p.d * gw.max_abs()
        } else {
            T::zero()
        };
        let speed = u + rw;
        let k = self.scalar.beta_max().max(self.velocity_kmax_sq()).sqrt();
        let cap = T::one() / (T::lit(2.0) * p.nsq * p.pr * k + p.d * k + p.ra * p.pr + T::one());
        if speed > T::zero() {
            cap.min(T::lit(0.5) * h / speed)
        } else {
            cap
        }
    }

    fn velocity_kmax_sq(&self) -> T {
        let kx = self.velocity.xtable().k_max();
        let ky = T::PI() * T::from_count(self.velocity.modes_per_block() + 1);
        kx * kx + ky * ky
    }
}

/// Right-hand side of the Galerkin system at `s`.
pub fn assemble_rhs<T: Real>(s: &State<T>, p: &PhysParams<T>) -> Result<Tendency<T>> {
    Model::for_state(s, *p)?.rhs(s)
}
