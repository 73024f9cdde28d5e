//! Seeded initial data.
//!
//! Every coefficient is drawn from its own ChaCha stream position, keyed by
//! the seed, the field and the mode label, so the data seen by a coarse
//! resolution is the exact truncation of the data seen by a finer one.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::params::PhysParams;
use super::state::State;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{Discretization, ScalarField, SolenoidalField};

/// Modes that carry random data, clipped to the run resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DataBand {
    pub nx: usize,
    pub my: usize,
    pub jy: usize,
}

impl Default for DataBand {
    fn default() -> Self {
        Self { nx: 8, my: 8, jy: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Velocity,
    Omega,
    Theta,
}

impl Field {
    fn tag(self) -> u64 {
        match self {
            Self::Velocity => 1,
            Self::Omega => 2,
            Self::Theta => 3,
        }
    }
}

const WORDS_PER_MODE: u128 = 64;
const LABEL_SPAN: u128 = 1 << 14;

fn draw(seed: u64, stream: u64, n: i32, m: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let label = (n as i128 + (LABEL_SPAN as i128 / 2)) as u128 * LABEL_SPAN + m as u128;
    rng.set_word_pos(label * WORDS_PER_MODE);
    StandardNormal.sample(&mut rng)
}

/// Random band-limited scalar field with coefficients `N(0,1)·β^{−s/2}`.
pub fn random_scalar<T: Real>(
    disc: &Discretization<T>,
    seed: u64,
    stream: u64,
    s: T,
    band: DataBand,
) -> ScalarField<T> {
    let basis = &disc.scalar;
    let mut f = ScalarField::zeros(basis);
    let beta = basis.eigenvalues().to_vec();
    for (slot, c) in f.coeffs_mut().iter_mut().enumerate() {
        let (n, m) = basis.mode_of_slot(slot);
        if n.unsigned_abs() as usize <= band.nx && m <= band.my {
            *c = T::lit(draw(seed, stream, n, m)) * beta[slot].powf(-s / T::lit(2.0));
        }
    }
    f
}

/// Random divergence-free field; element `(n, j)` is scaled by
/// `(k_n² + ((j+1)π)²)^{−s/2}`.
pub fn random_velocity<T: Real>(
    disc: &Discretization<T>,
    seed: u64,
    stream: u64,
    s: T,
    band: DataBand,
) -> SolenoidalField<T> {
    let basis = &disc.velocity;
    let mut u = SolenoidalField::zeros(basis);
    let jy = basis.modes_per_block();
    for block in basis.blocks() {
        if block.n.unsigned_abs() as usize > band.nx {
            continue;
        }
        for j in 0..jy.min(band.jy) {
            let slot = basis.slot(block.n, j).expect("in range");
            let ky = T::PI() * T::from_count(j + 1);
            let scale = (block.k * block.k + ky * ky).powf(-s / T::lit(2.0));
            u.coeffs_mut()[slot] = T::lit(draw(seed, stream, block.n, j)) * scale;
        }
    }
    u
}

/// Random state with per-field smoothness exponents, unnormalized.
pub fn random_state<T: Real>(
    disc: &Discretization<T>,
    seed: u64,
    salt: u64,
    smoothness: [T; 3],
    band: DataBand,
) -> State<T> {
    let stream = |f: Field| salt * 4 + f.tag();
    State {
        u: random_velocity(disc, seed, stream(Field::Velocity), smoothness[0], band),
        omega: random_scalar(disc, seed, stream(Field::Omega), smoothness[1], band),
        theta: random_scalar(disc, seed, stream(Field::Theta), smoothness[2], band),
        t: T::zero(),
    }
}

/// Scales `s` so that `|u|² + |ω|² + |θ|² = 1` (unchanged if zero).
pub fn normalize_energy<T: Real>(s: &State<T>) -> Result<State<T>> {
    let y = s.norms()?.y();
    if y == T::zero() {
        return Ok(s.clone());
    }
    let zero = State {
        u: s.u.scaled(T::zero()),
        omega: s.omega.scaled(T::zero()),
        theta: s.theta.scaled(T::zero()),
        t: s.t,
    };
    zero.add_scaled(T::one() / y.sqrt(), s)
}

/// Scales `s` so that `‖u‖² + ‖ω‖² + ‖θ‖² = 1` (unchanged if zero).
pub fn normalize_h1<T: Real>(s: &State<T>) -> Result<State<T>> {
    let y = s.norms()?.y_strong();
    if y == T::zero() {
        return Ok(s.clone());
    }
    let zero = State {
        u: s.u.scaled(T::zero()),
        omega: s.omega.scaled(T::zero()),
        theta: s.theta.scaled(T::zero()),
        t: s.t,
    };
    zero.add_scaled(T::one() / y.sqrt(), s)
}

/// Named initial-data presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Zero perturbation: the conduction profile `T = 1 − y`.
    Conduction,
    /// Rough data, coefficients decaying like `β^{−1/2}`.
    SmallRa,
    /// Data decaying like `β^{−1}`.
    H1,
    /// Rough `u₀`, `θ₀` with a smoother `ω₀`.
    MixedL2H1,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Self::Conduction, Self::SmallRa, Self::H1, Self::MixedL2H1];

    pub fn name(self) -> &'static str {
        match self {
            Self::Conduction => "conduction",
            Self::SmallRa => "smallRa",
            Self::H1 => "H1",
            Self::MixedL2H1 => "mixed-L2H1",
        }
    }

    pub fn params<T: Real>(self) -> PhysParams<T> {
        PhysParams::small_ra()
    }

    /// Coefficient decay exponents `s` for `(u, ω, θ)`.
    pub fn smoothness<T: Real>(self) -> [T; 3] {
        let (one, two) = (T::one(), T::lit(2.0));
        match self {
            Self::Conduction | Self::SmallRa => [one, one, one],
            Self::H1 => [two, two, two],
            Self::MixedL2H1 => [one, two, one],
        }
    }

    /// Whether the weak-solution Gronwall monitor is asserted for this preset.
    pub fn asserts_weak_envelope(self) -> bool {
        !matches!(self, Self::MixedL2H1)
    }

    /// Initial state of unit energy (zero for [`Preset::Conduction`]).
    pub fn initial_state<T: Real>(self, disc: &Discretization<T>, seed: u64, band: DataBand) -> Result<State<T>> {
        if self == Self::Conduction {
            return Ok(State::zeros(disc));
        }
        normalize_energy(&random_state(disc, seed, 0, self.smoothness(), band))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Params(format!("unknown preset {s:?} (conduction | smallRa | H1 | mixed-L2H1)")))
    }
}
