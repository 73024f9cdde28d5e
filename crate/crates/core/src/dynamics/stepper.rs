use std::fmt;
use std::str::FromStr;

use super::params::PhysParams;
use super::rhs::{Explicit, Model};
use super::state::State;
use crate::analysis::ledger::EnergyLedger;
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, DenseMatrix};
use crate::real::Real;

/// Time discretization; both treat the dissipative linear terms implicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Backward Euler on the stiff part, forward Euler on the rest.
    ImexEuler,
    /// Crank–Nicolson with second-order Adams–Bashforth.
    Cnab2,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::ImexEuler => "imex_euler",
            Self::Cnab2 => "cnab2",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Self::ImexEuler => 0,
            Self::Cnab2 => 1,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(Self::ImexEuler),
            1 => Some(Self::Cnab2),
            _ => None,
        }
    }

    fn implicit_weight<T: Real>(self) -> T {
        match self {
            Self::ImexEuler => T::one(),
            Self::Cnab2 => T::lit(0.5),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "imex_euler" => Ok(Self::ImexEuler),
            "cnab2" => Ok(Self::Cnab2),
            other => Err(Error::Stepper(format!("unknown scheme {other:?} (imex_euler | cnab2)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepperConfig<T> {
    pub dt: T,
    pub scheme: Scheme,
    /// Absolute end time; the run takes `round(t_end/dt)` steps from `t = 0`.
    pub t_end: T,
    pub ledger_stride: usize,
}

impl<T: Real> StepperConfig<T> {
    pub fn new(dt: T, scheme: Scheme, t_end: T, ledger_stride: usize) -> Result<Self> {
        let c = Self {
            dt,
            scheme,
            t_end,
            ledger_stride,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return Err(Error::Stepper(format!("dt > 0 violated (dt = {})", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= T::zero()) {
            return Err(Error::Stepper(format!("t_end ≥ 0 violated (t_end = {})", self.t_end)));
        }
        if self.ledger_stride == 0 {
            return Err(Error::Stepper("ledger_stride ≥ 1 violated".into()));
        }
        Ok(())
    }

    pub fn total_steps(&self) -> u64 {
        (self.t_end / self.dt).round().to_f64_lossy() as u64
    }
}

/// IMEX integrator with the implicit operators factored once.
#[derive(Clone, Debug)]
pub struct Integrator<T> {
    model: Model<T>,
    cfg: StepperConfig<T>,
    lhs: Vec<Cholesky<T>>,
    rhs: Vec<DenseMatrix<T>>,
    omega_lhs: Vec<T>,
    omega_rhs: Vec<T>,
    theta_lhs: Vec<T>,
    theta_rhs: Vec<T>,
    prev: Option<Explicit<T>>,
    index: u64,
}

impl<T: Real> Integrator<T> {
    pub fn new(model: Model<T>, cfg: StepperConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let g: T = cfg.scheme.implicit_weight();
        let (dt, pr) = (cfg.dt, model.params().pr);
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for block in model.velocity_basis().blocks() {
            let a = block.mass.add_scaled(g * dt * pr, &block.stiffness);
            lhs.push(Cholesky::factor(&a, "implicit velocity operator")?);
            rhs.push(block.mass.add_scaled(-(T::one() - g) * dt * pr, &block.stiffness));
        }
        let split = |rates: &[T]| -> (Vec<T>, Vec<T>) {
            rates
                .iter()
                .map(|r| (T::one() + g * dt * *r, T::one() - (T::one() - g) * dt * *r))
                .unzip()
        };
        let (omega_lhs, omega_rhs) = split(model.omega_rate());
        let (theta_lhs, theta_rhs) = split(model.theta_rate());
        Ok(Self {
            model,
            cfg,
            lhs,
            rhs,
            omega_lhs,
            omega_rhs,
            theta_lhs,
            theta_rhs,
            prev: None,
            index: 0,
        })
    }

    pub fn model(&self) -> &Model<T> {
        &self.model
    }

    pub fn config(&self) -> &StepperConfig<T> {
        &self.cfg
    }

    /// Steps taken so far (including those restored from a checkpoint).
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Explicit terms of the previous step, used by the multistep scheme.
    pub fn history(&self) -> Option<&Explicit<T>> {
        self.prev.as_ref()
    }

    /// Restores the step counter and multistep history after a resume.
    pub fn restore(&mut self, index: u64, history: Option<Explicit<T>>) {
        self.index = index;
        self.prev = history;
    }

    /// One step from `s`.
    pub fn step(&mut self, s: &State<T>) -> Result<State<T>> {
        let dt = self.cfg.dt;
        let limit = self.model.dt_max(s);
        if dt > limit {
            return Err(Error::StepTooLarge {
                dt: dt.to_f64_lossy(),
                dt_max: limit.to_f64_lossy(),
                t: s.t.to_f64_lossy(),
            });
        }
        let e = self.model.explicit(s)?;
        let ex = match (self.cfg.scheme, &self.prev) {
            (Scheme::Cnab2, Some(p)) => e.combine(T::lit(1.5), p, T::lit(-0.5)),
            _ => e.clone(),
        };

        let mut next = s.clone();
        let jy = self.model.velocity_basis().modes_per_block();
        let mut buf = vec![T::zero(); jy];
        for (idx, (chol, m)) in self.lhs.iter().zip(&self.rhs).enumerate() {
            m.matvec(s.u.block_coeffs(idx), &mut buf);
            for (b, f) in buf.iter_mut().zip(&ex.u_load[idx * jy..(idx + 1) * jy]) {
                *b += dt * *f;
            }
            chol.solve_in_place(&mut buf);
            next.u.coeffs_mut()[idx * jy..(idx + 1) * jy].copy_from_slice(&buf);
        }
        let update = |out: &mut [T], old: &[T], f: &[T], l: &[T], r: &[T]| {
            for i in 0..out.len() {
                out[i] = (r[i] * old[i] + dt * f[i]) / l[i];
            }
        };
        update(
            next.omega.coeffs_mut(),
            s.omega.coeffs(),
            &ex.omega,
            &self.omega_lhs,
            &self.omega_rhs,
        );
        update(
            next.theta.coeffs_mut(),
            s.theta.coeffs(),
            &ex.theta,
            &self.theta_lhs,
            &self.theta_rhs,
        );
        next.t = s.t + dt;
        for (ok, term) in [
            (next.u.is_finite(), "velocity update"),
            (next.omega.is_finite(), "microrotation update"),
            (next.theta.is_finite(), "temperature update"),
        ] {
            if !ok {
                return Err(Error::NonFinite {
                    t: next.t.to_f64_lossy(),
                    term: term.into(),
                });
            }
        }
        self.prev = Some(e);
        self.index += 1;
        Ok(next)
    }

    /// Advances to `t_end`, calling `observe(state, index)` at the start, at
    /// every multiple of the ledger stride and at the final state.
    pub fn run(&mut self, s0: &State<T>, mut observe: impl FnMut(&State<T>, u64) -> Result<()>) -> Result<State<T>> {
        let total = self.cfg.total_steps();
        let stride = self.cfg.ledger_stride as u64;
        let mut s = s0.clone();
        observe(&s, self.index)?;
        let mut last = self.index;
        while self.index < total {
            s = self.step(&s)?;
            if self.index.is_multiple_of(stride) {
                observe(&s, self.index)?;
                last = self.index;
            }
        }
        if last != self.index {
            observe(&s, self.index)?;
        }
        Ok(s)
    }
}

/// One step without multistep history (the first step of either scheme).
pub fn step<T: Real>(s: &State<T>, p: &PhysParams<T>, cfg: &StepperConfig<T>) -> Result<State<T>> {
    Integrator::new(Model::for_state(s, *p)?, *cfg)?.step(s)
}

/// Result of [`simulate`].
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub final_state: State<T>,
    pub steps: u64,
}

/// Integrates from `s0` to `cfg.t_end`, recording the energy ledger.
pub fn simulate<T: Real>(
    s0: &State<T>,
    p: &PhysParams<T>,
    cfg: &StepperConfig<T>,
) -> Result<(Trajectory<T>, EnergyLedger<T>)> {
    let mut integ = Integrator::new(Model::for_state(s0, *p)?, *cfg)?;
    simulate_with(&mut integ, s0)
}

/// As [`simulate`] with a prepared (possibly restored) integrator.
pub fn simulate_with<T: Real>(integ: &mut Integrator<T>, s0: &State<T>) -> Result<(Trajectory<T>, EnergyLedger<T>)> {
    let mut ledger = EnergyLedger::new();
    let final_state = integ.run(s0, |s, _| ledger.push_state(s))?;
    Ok((
        Trajectory {
            final_state,
            steps: integ.index(),
        },
        ledger,
    ))
}
