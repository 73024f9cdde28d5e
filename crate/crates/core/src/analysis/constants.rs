//! Empirical constants of the functional inequalities.
//!
//! Each constant is the supremum of its defining ratio over every basis
//! element and over `trials` random band-limited fields, each of which is
//! then improved by a short seeded hill-climb. Climbs are per trial, so
//! enlarging the trial set can only raise the estimate.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::report::KeyValues;
use crate::dynamics::presets::{random_scalar, random_velocity, DataBand};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{Discretization, DomainSpec, GridField, Resolution, ScalarField, SolenoidalField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstantName {
    /// Poincaré: `|v| ≤ k₁‖v‖`.
    K1,
    /// `‖v‖_{L⁴} ≤ k₂|v|^{1/2}‖v‖_{H¹}^{1/2}`.
    K2,
    /// `‖v‖_∞ ≤ k₃|v|^{1/2}‖v‖_{H²}^{1/2}`.
    K3,
    /// Ladyzhenskaya: `‖v‖_{L⁴} ≤ k₄|v|^{1/2}‖v‖^{1/2}`.
    K4,
    /// `‖∇v‖_{L⁴} ≤ k₅‖v‖^{1/2}|Av|^{1/2}`.
    K5,
    /// Agmon: `‖v‖_∞ ≤ k₆|v|^{1/2}|Av|^{1/2}`.
    K6,
    /// Agmon for velocities: `‖u‖_∞ ≤ k₇|u|^{1/2}|A_S u|^{1/2}`.
    K7,
}

impl ConstantName {
    pub const ALL: [ConstantName; 7] = [Self::K1, Self::K2, Self::K3, Self::K4, Self::K5, Self::K6, Self::K7];

    pub fn name(self) -> &'static str {
        match self {
            Self::K1 => "k1",
            Self::K2 => "k2",
            Self::K3 => "k3",
            Self::K4 => "k4",
            Self::K5 => "k5",
            Self::K6 => "k6",
            Self::K7 => "k7",
        }
    }

    fn is_velocity(self) -> bool {
        self == Self::K7
    }
}

impl fmt::Display for ConstantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstantName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|c| c.name() == lower)
            .ok_or_else(|| Error::Params(format!("unknown constant {s:?} (k1..k7)")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantEstimate<T> {
    pub name: ConstantName,
    pub value: T,
    pub trials: usize,
    pub seed: u64,
    /// `"mode(n,m)"`, `"mode(n,j)"` or `"trial(i)"`.
    pub maximizer: String,
    /// Coefficients of the maximizing field in storage order.
    pub maximizer_coeffs: Vec<T>,
    /// Best ratio among single basis elements.
    pub basis_value: T,
    /// Closed-form value where known (`k₁ = β₁^{−1/2}`).
    pub exact: Option<T>,
}

impl<T: Real> ConstantEstimate<T> {
    pub fn key_values(&self) -> KeyValues {
        let p = self.name.name();
        let mut kv = KeyValues::new();
        kv.push_real(format!("{p}.value"), self.value);
        kv.push(format!("{p}.trials"), self.trials);
        kv.push(format!("{p}.seed"), self.seed);
        kv.push(format!("{p}.maximizer"), &self.maximizer);
        kv.push_real(format!("{p}.basis_value"), self.basis_value);
        if let Some(e) = self.exact {
            kv.push_real(format!("{p}.exact"), e);
        }
        kv
    }
}

fn l4<T: Real>(disc: &Discretization<T>, g: &GridField<T>) -> T {
    let q = disc.quadrature();
    let v: Vec<T> = g.data.iter().map(|x| (*x * *x) * (*x * *x)).collect();
    q.integrate(&v).max(T::zero()).sqrt().sqrt()
}

fn l4_pair<T: Real>(disc: &Discretization<T>, a: &GridField<T>, b: &GridField<T>) -> T {
    let q = disc.quadrature();
    let v: Vec<T> = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| {
            let s = *x * *x + *y * *y;
            s * s
        })
        .collect();
    q.integrate(&v).max(T::zero()).sqrt().sqrt()
}

fn h2_full_sq<T: Real>(f: &ScalarField<T>) -> T {
    let q = f.basis().quadrature();
    let mut total = T::zero();
    for order in 0..=2 {
        for dx in 0..=order {
            let g = f.synthesize(dx, order - dx);
            total += q.integrate(&g.data.iter().map(|v| *v * *v).collect::<Vec<_>>());
        }
    }
    total
}

fn scalar_ratio<T: Real>(name: ConstantName, disc: &Discretization<T>, f: &ScalarField<T>) -> T {
    let [n0, n1, n2, _] = f.norms_sq();
    if n0 <= T::zero() {
        return T::zero();
    }
    let quarter = |x: T| x.sqrt().sqrt();
    match name {
        ConstantName::K1 => (n0 / n1).sqrt(),
        ConstantName::K2 => l4(disc, &f.synthesize(0, 0)) / (quarter(n0) * quarter(n0 + n1)),
        ConstantName::K3 => f.synthesize(0, 0).max_abs() / (quarter(n0) * quarter(h2_full_sq(f))),
        ConstantName::K4 => l4(disc, &f.synthesize(0, 0)) / (quarter(n0) * quarter(n1)),
        ConstantName::K5 => l4_pair(disc, &f.synthesize(1, 0), &f.synthesize(0, 1)) / (quarter(n1) * quarter(n2)),
        ConstantName::K6 => f.synthesize(0, 0).max_abs() / (quarter(n0) * quarter(n2)),
        ConstantName::K7 => unreachable!("velocity constant"),
    }
}

fn velocity_ratio<T: Real>(u: &SolenoidalField<T>) -> T {
    let Ok([n0, _, n2]) = u.norms_sq() else {
        return T::zero();
    };
    if n0 <= T::zero() {
        return T::zero();
    }
    let v = u.velocity();
    let sup =
        v.x.data
            .iter()
            .zip(&v.y.data)
            .map(|(a, b)| (*a * *a + *b * *b).sqrt())
            .fold(T::zero(), T::max);
    sup / (n0.sqrt().sqrt() * n2.sqrt().sqrt())
}

/// Defining ratio of `name` for a coefficient vector.
pub fn constant_ratio<T: Real>(name: ConstantName, disc: &Discretization<T>, coeffs: &[T]) -> Result<T> {
    if name.is_velocity() {
        Ok(velocity_ratio(&SolenoidalField::from_coeffs(
            &disc.velocity,
            coeffs.to_vec(),
        )?))
    } else {
        Ok(scalar_ratio(
            name,
            disc,
            &ScalarField::from_coeffs(&disc.scalar, coeffs.to_vec())?,
        ))
    }
}

fn eval<T: Real>(name: ConstantName, disc: &Discretization<T>, c: &[T]) -> T {
    constant_ratio(name, disc, c).unwrap_or(T::zero())
}

const CLIMB_STEPS: usize = 40;
const BASIS_CLIMB_STEPS: usize = 400;

/// Stream 0 is the climb from the best basis element, `1 + i` that of trial `i`.
fn climb<T: Real>(
    name: ConstantName,
    disc: &Discretization<T>,
    start: Vec<T>,
    seed: u64,
    stream: u64,
    steps: usize,
) -> (T, Vec<T>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut best = start;
    let mut val = eval(name, disc, &best);
    let mut sigma = T::lit(0.3);
    for _ in 0..steps {
        let rms = (best.iter().map(|c| *c * *c).fold(T::zero(), |a, b| a + b) / T::from_count(best.len())).sqrt();
        let cand: Vec<T> = best
            .iter()
            .map(|c| {
                let z: f64 = StandardNormal.sample(&mut rng);
                *c + sigma * rms * T::lit(z)
            })
            .collect();
        let v = eval(name, disc, &cand);
        if v > val {
            best = cand;
            val = v;
            sigma = (sigma * T::lit(1.5)).min(T::one());
        } else {
            sigma *= T::lit(0.6);
        }
    }
    (val, best)
}

/// Estimates constant `name` at resolution `res` on the period `l`.
pub fn estimate_constant<T: Real>(
    name: ConstantName,
    trials: usize,
    domain: DomainSpec<T>,
    res: Resolution,
    seed: u64,
) -> Result<ConstantEstimate<T>> {
    let disc = Discretization::new(domain, res.with_quartic_quadrature())?;
    let len = if name.is_velocity() {
        disc.velocity.len()
    } else {
        disc.scalar.len()
    };

    let mut best = (T::neg_infinity(), String::new(), Vec::new());
    for slot in 0..len {
        let mut c = vec![T::zero(); len];
        c[slot] = T::one();
        let v = eval(name, &disc, &c);
        if v > best.0 {
            let label = if name.is_velocity() {
                let jy = disc.velocity.modes_per_block();
                let n = disc.velocity.blocks()[slot / jy].n;
                format!("mode({n},{})", slot % jy)
            } else {
                let (n, m) = disc.scalar.mode_of_slot(slot);
                format!("mode({n},{m})")
            };
            best = (v, label, c);
        }
    }
    let basis_value = best.0;
    let (v, c) = climb(name, &disc, best.2.clone(), seed, 0, BASIS_CLIMB_STEPS);
    if v > best.0 {
        best = (v, format!("{} (climbed)", best.1), c);
    }

    let band = DataBand {
        nx: res.nx,
        my: res.my,
        jy: res.jy,
    };
    let smooth = [T::zero(), T::one(), T::lit(2.0)];
    let climbed: Vec<(T, Vec<T>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = smooth[i % smooth.len()];
            let start = if name.is_velocity() {
                random_velocity(&disc, seed, 16 + i as u64, s, band).into_coeffs()
            } else {
                random_scalar(&disc, seed, 16 + i as u64, s, band).into_coeffs()
            };
            climb(name, &disc, start, seed, 1 + i as u64, CLIMB_STEPS)
        })
        .collect();
    for (i, (v, c)) in climbed.into_iter().enumerate() {
        if v > best.0 {
            best = (v, format!("trial({i})"), c);
        }
    }
    let exact = (name == ConstantName::K1).then(|| disc.scalar.beta_min().sqrt().recip());
    Ok(ConstantEstimate {
        name,
        value: best.0,
        trials,
        seed,
        maximizer: best.1,
        maximizer_coeffs: best.2,
        basis_value,
        exact,
    })
}
