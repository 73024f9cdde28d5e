//! Binary checkpoints. Layout (all little-endian) is described in
//! `docs/checkpoint.md`.

use std::io::{Read, Write};

use super::params::PhysParams;
use super::rhs::Explicit;
use super::state::State;
use super::stepper::Scheme;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{Discretization, DomainSpec, Resolution, ScalarField, SolenoidalField};

pub const MAGIC: [u8; 4] = *b"MPCK";
pub const VERSION: u32 = 1;

/// Multistep history stored alongside the state.
#[derive(Clone, Debug, PartialEq)]
pub struct History<T> {
    pub dt: T,
    pub scheme: Scheme,
    pub explicit: Explicit<T>,
}

#[derive(Clone, Debug)]
pub struct Checkpoint<T> {
    pub domain: DomainSpec<T>,
    pub resolution: Resolution,
    pub params: PhysParams<T>,
    pub state: State<T>,
    pub step: u64,
    pub history: Option<History<T>>,
}

struct Writer<'a, W> {
    w: &'a mut W,
}

impl<W: Write> Writer<'_, W> {
    fn bytes(&mut self, b: &[u8]) -> Result<()> {
        self.w.write_all(b)?;
        Ok(())
    }
    fn u32(&mut self, v: u32) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }
    fn u64(&mut self, v: u64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }
    fn f64(&mut self, v: f64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }
    fn count(&mut self, v: usize) -> Result<()> {
        self.u32(u32::try_from(v).map_err(|_| Error::Checkpoint(format!("count {v} too large")))?)
    }
    fn array<T: Real>(&mut self, a: impl IntoIterator<Item = T>) -> Result<()> {
        for v in a {
            self.f64(v.to_f64_lossy())?;
        }
        Ok(())
    }
}

struct Reader<'a, R> {
    r: &'a mut R,
}

impl<R: Read> Reader<'_, R> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.r
            .read_exact(&mut b)
            .map_err(|e| Error::Checkpoint(format!("truncated file: {e}")))?;
        Ok(b)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
    fn real<T: Real>(&mut self) -> Result<T> {
        Ok(T::lit(self.f64()?))
    }
    fn array<T: Real>(&mut self, n: usize) -> Result<Vec<T>> {
        (0..n).map(|_| self.real()).collect()
    }
}

/// Scalar coefficients are stored in eigenvalue rank order (the manifest's
/// `[scalar_modes]` listing); this maps rank to storage slot.
fn rank_slots<T: Real>(disc: &Discretization<T>) -> Vec<usize> {
    disc.scalar.modes().iter().map(|m| m.slot).collect()
}

pub fn write_checkpoint<T: Real, W: Write>(
    out: &mut W,
    params: &PhysParams<T>,
    state: &State<T>,
    step: u64,
    history: Option<&History<T>>,
) -> Result<()> {
    state.validate()?;
    let basis = state.scalar_basis();
    let res = basis.resolution();
    let disc = Discretization {
        scalar: state.scalar_basis().clone(),
        velocity: state.velocity_basis().clone(),
    };
    let order = rank_slots(&disc);
    let mut w = Writer { w: out };
    w.bytes(&MAGIC)?;
    w.u32(VERSION)?;
    w.f64(basis.domain().l.to_f64_lossy())?;
    for v in [res.nx, res.my, res.jy, res.quad_x, res.quad_y] {
        w.count(v)?;
    }
    w.array([params.pr, params.ra, params.nsq, params.lsq, params.d, params.l])?;
    w.f64(state.t.to_f64_lossy())?;
    w.u64(step)?;
    w.count(state.u.coeffs().len())?;
    w.count(state.omega.coeffs().len())?;
    w.array(state.u.coeffs().iter().copied())?;
    w.array(order.iter().map(|s| state.omega.coeffs()[*s]))?;
    w.array(order.iter().map(|s| state.theta.coeffs()[*s]))?;
    match history {
        None => w.bytes(&[0])?,
        Some(h) => {
            w.bytes(&[1, h.scheme.code()])?;
            w.f64(h.dt.to_f64_lossy())?;
            w.array(h.explicit.u_load.iter().copied())?;
            w.array(order.iter().map(|s| h.explicit.omega[*s]))?;
            w.array(order.iter().map(|s| h.explicit.theta[*s]))?;
        }
    }
    Ok(())
}

/// Reads a checkpoint, rebuilding the discretization it was written with.
pub fn read_checkpoint<T: Real, R: Read>(input: &mut R) -> Result<(Checkpoint<T>, Discretization<T>)> {
    let mut r = Reader { r: input };
    if r.take::<4>()? != MAGIC {
        return Err(Error::Checkpoint("bad magic (expected MPCK)".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let domain = DomainSpec::new(r.real::<T>()?)?;
    let mut dims = [0usize; 5];
    for d in dims.iter_mut() {
        *d = r.u32()? as usize;
    }
    let resolution = Resolution {
        nx: dims[0],
        my: dims[1],
        jy: dims[2],
        quad_x: dims[3],
        quad_y: dims[4],
    };
    let p: Vec<T> = r.array(6)?;
    let params = PhysParams {
        pr: p[0],
        ra: p[1],
        nsq: p[2],
        lsq: p[3],
        d: p[4],
        l: p[5],
    };
    params.validate_degenerate()?;
    let t: T = r.real()?;
    let step = r.u64()?;
    let disc = Discretization::new(domain, resolution)?;
    let (nu, ns) = (r.u32()? as usize, r.u32()? as usize);
    if nu != disc.velocity.len() || ns != disc.scalar.len() {
        return Err(Error::Checkpoint(format!(
            "coefficient counts ({nu}, {ns}) do not match the resolution ({}, {})",
            disc.velocity.len(),
            disc.scalar.len()
        )));
    }
    let order = rank_slots(&disc);
    let unrank = |ranked: Vec<T>| {
        let mut v = vec![T::zero(); ranked.len()];
        for (c, s) in ranked.into_iter().zip(&order) {
            v[*s] = c;
        }
        v
    };
    let u = SolenoidalField::from_coeffs(&disc.velocity, r.array(nu)?)?;
    let omega = ScalarField::from_coeffs(&disc.scalar, unrank(r.array(ns)?))?;
    let theta = ScalarField::from_coeffs(&disc.scalar, unrank(r.array(ns)?))?;
    let state = State::new(u, omega, theta, t)?;
    let history = match r.u8()? {
        0 => None,
        1 => {
            let scheme = Scheme::from_code(r.u8()?).ok_or_else(|| Error::Checkpoint("unknown scheme code".into()))?;
            let dt = r.real()?;
            let u_load = r.array(nu)?;
            let omega = unrank(r.array(ns)?);
            let theta = unrank(r.array(ns)?);
            Some(History {
                dt,
                scheme,
                explicit: Explicit { u_load, omega, theta },
            })
        }
        f => return Err(Error::Checkpoint(format!("bad history flag {f}"))),
    };
    let mut trailing = [0u8; 1];
    if r.r.read(&mut trailing)? != 0 {
        return Err(Error::Checkpoint("trailing bytes after payload".into()));
    }
    Ok((
        Checkpoint {
            domain,
            resolution,
            params,
            state,
            step,
            history,
        },
        disc,
    ))
}
