//! Paired-trajectory experiments: continuous dependence on the initial data
//! and self-convergence of the Galerkin truncation.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::ledger::EnergyLedger;
use super::report::{format_real, KeyValues};
use crate::dynamics::presets::{normalize_h1, random_state, DataBand};
use crate::dynamics::{Integrator, Model, PhysParams, Preset, State, StepperConfig};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{Discretization, DomainSpec, Resolution};

/// Difference norms between two trajectories at one ledger time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DifferenceRow<T> {
    pub t: T,
    /// `(|u|² + |ω|² + |θ|²)^{1/2}`
    pub l2: T,
    /// `(‖u‖² + ‖ω‖² + ‖θ‖²)^{1/2}`
    pub h1: T,
    /// `(|u|² + ‖ω‖² + |θ|²)^{1/2}`, the norm of the mixed-regularity theory.
    pub mixed: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DependenceReport<T> {
    pub delta: T,
    pub seed: u64,
    pub rows: Vec<DifferenceRow<T>>,
    pub sup_l2: T,
    pub sup_h1: T,
    pub sup_mixed: T,
    /// Fitted `K` in `difference ≤ C·δ·e^{Kt}` (mixed norm); `None` if no
    /// row rises above round-off.
    pub rate: Option<T>,
    pub prefactor: Option<T>,
    /// `N²L² < 1`
    pub uniqueness_condition: bool,
}

impl<T: Real> DependenceReport<T> {
    /// `sup_t difference / δ` in the mixed norm.
    pub fn sup_ratio(&self) -> T {
        if self.delta > T::zero() {
            self.sup_mixed / self.delta
        } else {
            T::zero()
        }
    }

    pub fn key_values(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.push_real("depend.delta", self.delta);
        kv.push("depend.seed", self.seed);
        kv.push_real("depend.sup_l2", self.sup_l2);
        kv.push_real("depend.sup_h1", self.sup_h1);
        kv.push_real("depend.sup_mixed", self.sup_mixed);
        kv.push_real("depend.sup_ratio", self.sup_ratio());
        match (self.rate, self.prefactor) {
            (Some(k), Some(c)) => {
                kv.push_real("depend.rate_K", k);
                kv.push_real("depend.prefactor_C", c);
            }
            _ => {
                kv.push("depend.rate_K", "none");
                kv.push("depend.prefactor_C", "none");
            }
        }
        kv.push("depend.nsq_lsq_below_one", self.uniqueness_condition);
        kv
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("t,l2,h1,mixed\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                format_real(r.t),
                format_real(r.l2),
                format_real(r.h1),
                format_real(r.mixed)
            );
        }
        s
    }
}

fn record<T: Real>(integ: &mut Integrator<T>, s0: &State<T>) -> Result<Vec<State<T>>> {
    let mut out = Vec::new();
    integ.run(s0, |s, _| {
        out.push(s.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Least squares of `ln d = a + K t` over rows with `d` above the round-off floor.
fn fit_rate<T: Real>(rows: &[DifferenceRow<T>], floor: T) -> Option<(T, T)> {
    let pts: Vec<(T, T)> = rows
        .iter()
        .filter(|r| r.mixed > floor)
        .map(|r| (r.t, r.mixed.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = T::from_count(pts.len());
    let mt = pts.iter().map(|p| p.0).fold(T::zero(), |a, b| a + b) / n;
    let my = pts.iter().map(|p| p.1).fold(T::zero(), |a, b| a + b) / n;
    let sxx = pts
        .iter()
        .map(|p| (p.0 - mt) * (p.0 - mt))
        .fold(T::zero(), |a, b| a + b);
    if sxx <= T::zero() {
        return None;
    }
    let sxy = pts
        .iter()
        .map(|p| (p.0 - mt) * (p.1 - my))
        .fold(T::zero(), |a, b| a + b);
    let k = sxy / sxx;
    Some((k, my - k * mt))
}

/// Runs `s0` and `s0 + δ·φ` side by side, `φ` a seeded random field of unit
/// `H¹` norm, and measures their separation.
pub fn continuous_dependence_experiment<T: Real>(
    s0: &State<T>,
    delta: T,
    p: &PhysParams<T>,
    cfg: &StepperConfig<T>,
    seed: u64,
) -> Result<DependenceReport<T>> {
    if !(delta >= T::zero() && delta.is_finite()) {
        return Err(Error::Params(format!("perturbation size δ ≥ 0 violated (δ = {delta})")));
    }
    let disc = Discretization {
        scalar: s0.scalar_basis().clone(),
        velocity: s0.velocity_basis().clone(),
    };
    let res = *disc.resolution();
    let band = DataBand {
        nx: res.nx,
        my: res.my,
        jy: res.jy,
    };
    let two = T::lit(2.0);
    let phi = normalize_h1(&random_state(&disc, seed, 1, [two, two, two], band))?;
    let s1 = s0.add_scaled(delta, &phi)?;
    let model = Model::for_state(s0, *p)?;
    let mut a = Integrator::new(model.clone(), *cfg)?;
    let mut b = Integrator::new(model, *cfg)?;
    let (ra, rb) = rayon::join(|| record(&mut a, s0), || record(&mut b, &s1));
    let (ra, rb) = (ra?, rb?);
    let mut rows = Vec::with_capacity(ra.len());
    let mut scale = T::zero();
    for (x, y) in ra.iter().zip(&rb) {
        let n = y.difference(x)?.norms()?;
        scale = scale.max(x.norms()?.y().sqrt());
        rows.push(DifferenceRow {
            t: x.t,
            l2: n.y().sqrt(),
            h1: n.y_strong().sqrt(),
            mixed: (n.u_l2sq + n.omega_h1sq + n.theta_l2sq).sqrt(),
        });
    }
    let sup = |f: fn(&DifferenceRow<T>) -> T| rows.iter().map(f).fold(T::zero(), T::max);
    let floor = T::lit(1e3) * T::epsilon() * scale.max(T::one());
    let fit = if delta > T::zero() {
        fit_rate(&rows, floor)
    } else {
        None
    };
    Ok(DependenceReport {
        delta,
        seed,
        sup_l2: sup(|r| r.l2),
        sup_h1: sup(|r| r.h1),
        sup_mixed: sup(|r| r.mixed),
        rate: fit.map(|f| f.0),
        prefactor: fit.map(|f| f.1.exp() / delta),
        uniqueness_condition: p.mixed_uniqueness(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport<T> {
    pub preset: Preset,
    pub seed: u64,
    pub resolutions: Vec<Resolution>,
    /// `sup_t y(t)` per resolution.
    pub sup_y: Vec<T>,
    /// `sup_t |y_{i+1}(t) − y_i(t)|` between successive resolutions.
    pub y_differences: Vec<T>,
    /// `sup_t` energy of the coefficient difference (coarse embedded in fine).
    pub state_differences: Vec<T>,
}

impl<T: Real> ConvergenceReport<T> {
    /// Whether the successive differences strictly decrease.
    pub fn monotone(&self) -> bool {
        self.y_differences.windows(2).all(|w| w[1] < w[0])
    }

    pub fn key_values(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.push("converge.preset", self.preset);
        kv.push("converge.seed", self.seed);
        for (r, y) in self.resolutions.iter().zip(&self.sup_y) {
            kv.push_real(format!("converge.sup_y.{}x{}x{}", r.nx, r.my, r.jy), *y);
        }
        for (i, (d, s)) in self.y_differences.iter().zip(&self.state_differences).enumerate() {
            let (a, b) = (&self.resolutions[i], &self.resolutions[i + 1]);
            let key = format!("{}x{}x{}_{}x{}x{}", a.nx, a.my, a.jy, b.nx, b.my, b.jy);
            kv.push_real(format!("converge.y_difference.{key}"), *d);
            kv.push_real(format!("converge.state_difference.{key}"), *s);
        }
        kv.push("converge.monotone", self.monotone());
        kv
    }
}

/// Discretization, sampled states and ledger of one resolution.
type Run<T> = (Discretization<T>, Vec<State<T>>, EnergyLedger<T>);

/// Runs the preset at each resolution (all with the same time step) and
/// compares successive ledgers.
pub fn galerkin_convergence_study<T: Real>(
    preset: Preset,
    seed: u64,
    band: DataBand,
    domain: DomainSpec<T>,
    p: &PhysParams<T>,
    cfg: &StepperConfig<T>,
    resolutions: &[Resolution],
) -> Result<ConvergenceReport<T>> {
    if resolutions.len() < 2 {
        return Err(Error::Resolution(
            "convergence study needs at least two resolutions".into(),
        ));
    }
    for w in resolutions.windows(2) {
        if !w[0].nested_in(&w[1]) {
            return Err(Error::Resolution(format!("{:?} is not nested in {:?}", w[0], w[1])));
        }
    }
    let runs: Vec<Result<Run<T>>> = resolutions
        .par_iter()
        .map(|res| {
            let disc = Discretization::new(domain, *res)?;
            let s0 = preset.initial_state(&disc, seed, band)?;
            let mut integ = Integrator::new(Model::for_state(&s0, *p)?, *cfg)?;
            let states = record(&mut integ, &s0)?;
            let mut ledger = EnergyLedger::new();
            for s in &states {
                ledger.push_state(s)?;
            }
            Ok((disc, states, ledger))
        })
        .collect();
    let runs: Vec<_> = runs.into_iter().collect::<Result<_>>()?;
    let sup_y = runs
        .iter()
        .map(|r| r.2.rows().iter().map(|x| x.y).fold(T::zero(), T::max))
        .collect();
    let mut y_differences = Vec::new();
    let mut state_differences = Vec::new();
    for w in runs.windows(2) {
        let (coarse, fine) = (&w[0], &w[1]);
        let dy = coarse
            .2
            .rows()
            .iter()
            .zip(fine.2.rows())
            .map(|(a, b)| (a.y - b.y).abs())
            .fold(T::zero(), T::max);
        let mut ds = T::zero();
        for (a, b) in coarse.1.iter().zip(&fine.1) {
            let up = a.transfer(&fine.0)?;
            ds = ds.max(b.difference(&up)?.norms()?.y());
        }
        y_differences.push(dy);
        state_differences.push(ds);
    }
    Ok(ConvergenceReport {
        preset,
        seed,
        resolutions: resolutions.to_vec(),
        sup_y,
        y_differences,
        state_differences,
    })
}
