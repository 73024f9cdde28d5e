//! Coefficient fields over the two bases, and grid functions on the
//! quadrature mesh.

use std::sync::Arc;

use super::basis::{ScalarBasis, SolenoidalBasis};
use super::transform::{analyze_profile, synth_profile};
use crate::error::{Error, Result};
use crate::real::{dot, Real};

/// Values on the quadrature grid, `[p * ny + q]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField<T> {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<T>,
}

impl<T: Real> GridField<T> {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            data: vec![T::zero(); nx * ny],
        }
    }

    pub fn from_fn(x: &[T], y: &[T], f: impl Fn(T, T) -> T) -> Self {
        let mut data = Vec::with_capacity(x.len() * y.len());
        for &xv in x {
            for &yv in y {
                data.push(f(xv, yv));
            }
        }
        Self {
            nx: x.len(),
            ny: y.len(),
            data,
        }
    }

    #[inline]
    pub fn at(&self, p: usize, q: usize) -> T {
        self.data[p * self.ny + q]
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.data.len(), other.data.len());
        Self {
            nx: self.nx,
            ny: self.ny,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            nx: self.nx,
            ny: self.ny,
            data: self.data.iter().map(|v| f(*v)).collect(),
        }
    }
}

/// A vector-valued grid function.
#[derive(Clone, Debug, PartialEq)]
pub struct GridVector<T> {
    pub x: GridField<T>,
    pub y: GridField<T>,
}

impl<T: Real> GridVector<T> {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            x: GridField::zeros(nx, ny),
            y: GridField::zeros(nx, ny),
        }
    }

    pub fn max_abs(&self) -> T {
        self.x
            .data
            .iter()
            .zip(&self.y.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a * *a + *b * *b).sqrt()))
    }

    /// Pointwise dot product with another vector field.
    pub fn dot(&self, other: &Self) -> GridField<T> {
        let mut out = self.x.zip_map(&other.x, |a, b| a * b);
        for (o, (a, b)) in out.data.iter_mut().zip(self.y.data.iter().zip(&other.y.data)) {
            *o += *a * *b;
        }
        out
    }
}

fn check_finite<T: Real>(coeffs: &[T], what: &str) -> Result<()> {
    if let Some(i) = coeffs.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            t: f64::NAN,
            term: format!("{what} coefficient {i}"),
        });
    }
    Ok(())
}

/// Real coefficients over the scalar eigenbasis.
#[derive(Clone, Debug)]
pub struct ScalarField<T> {
    basis: Arc<ScalarBasis<T>>,
    coeffs: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(basis: &Arc<ScalarBasis<T>>) -> Self {
        Self {
            basis: basis.clone(),
            coeffs: vec![T::zero(); basis.len()],
        }
    }

    pub fn from_coeffs(basis: &Arc<ScalarBasis<T>>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "scalar field has {} coefficients, basis has {}",
                coeffs.len(),
                basis.len()
            )));
        }
        check_finite(&coeffs, "scalar")?;
        Ok(Self {
            basis: basis.clone(),
            coeffs,
        })
    }

    /// The basis element `v_nm`.
    pub fn mode(basis: &Arc<ScalarBasis<T>>, n: i32, m: usize) -> Option<Self> {
        let slot = basis.slot(n, m)?;
        let mut f = Self::zeros(basis);
        f.coeffs[slot] = T::one();
        Some(f)
    }

    pub fn basis(&self) -> &Arc<ScalarBasis<T>> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn same_basis(&self, other: &Self) -> Result<()> {
        same_scalar_basis(&self.basis, &other.basis)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| *c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a + *b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a - *b).collect(),
        })
    }

    /// L² inner product (Parseval in the orthonormal basis).
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.same_basis(other)?;
        Ok(dot(&self.coeffs, &other.coeffs))
    }

    /// Grid values of `∂ₓ^dx ∂_y^dy f`, `dx + dy ≤ 4`.
    pub fn synthesize(&self, dx: usize, dy: usize) -> GridField<T> {
        let b = &*self.basis;
        let quad = b.quadrature();
        let (qx, qy) = (quad.nx_points(), quad.ny_points());
        let my = b.resolution().my;
        let xt = b.xtable();
        let table = b.y_table(dy);
        let mut profiles = vec![T::zero(); xt.modes() * qy];
        for idx in 0..xt.modes() {
            synth_profile(
                &self.coeffs[idx * my..(idx + 1) * my],
                table,
                qy,
                &mut profiles[idx * qy..(idx + 1) * qy],
            );
        }
        let mut grid = GridField::zeros(qx, qy);
        xt.synthesize(&profiles, dx, &mut grid.data);
        grid
    }

    /// L²-orthogonal (Galerkin) projection of a grid function.
    pub fn project(basis: &Arc<ScalarBasis<T>>, grid: &GridField<T>) -> Self {
        let quad = basis.quadrature();
        let qy = quad.ny_points();
        let my = basis.resolution().my;
        let xt = basis.xtable();
        let mut profiles = vec![T::zero(); xt.modes() * qy];
        xt.analyze(&grid.data, &mut profiles);
        let mut coeffs = vec![T::zero(); basis.len()];
        let table = basis.y_table(0);
        for idx in 0..xt.modes() {
            analyze_profile(
                &profiles[idx * qy..(idx + 1) * qy],
                &quad.wy,
                table,
                &mut coeffs[idx * my..(idx + 1) * my],
            );
        }
        Self {
            basis: basis.clone(),
            coeffs,
        }
    }
}

pub(crate) fn same_scalar_basis<T: Real>(a: &Arc<ScalarBasis<T>>, b: &Arc<ScalarBasis<T>>) -> Result<()> {
    if Arc::ptr_eq(a, b) || (a.resolution() == b.resolution() && a.domain() == b.domain()) {
        Ok(())
    } else {
        Err(Error::BasisMismatch(format!(
            "scalar bases differ: {:?} vs {:?}",
            a.resolution(),
            b.resolution()
        )))
    }
}

pub(crate) fn same_velocity_basis<T: Real>(a: &Arc<SolenoidalBasis<T>>, b: &Arc<SolenoidalBasis<T>>) -> Result<()> {
    if Arc::ptr_eq(a, b) || (a.resolution() == b.resolution() && a.domain() == b.domain()) {
        Ok(())
    } else {
        Err(Error::BasisMismatch(format!(
            "velocity bases differ: {:?} vs {:?}",
            a.resolution(),
            b.resolution()
        )))
    }
}

/// Which velocity component to synthesize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    X,
    Y,
}

/// Streamfunction-based coefficients of a divergence-free, no-slip velocity.
#[derive(Clone, Debug)]
pub struct SolenoidalField<T> {
    basis: Arc<SolenoidalBasis<T>>,
    coeffs: Vec<T>,
}

impl<T: Real> SolenoidalField<T> {
    pub fn zeros(basis: &Arc<SolenoidalBasis<T>>) -> Self {
        Self {
            basis: basis.clone(),
            coeffs: vec![T::zero(); basis.len()],
        }
    }

    pub fn from_coeffs(basis: &Arc<SolenoidalBasis<T>>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "velocity field has {} coefficients, basis has {}",
                coeffs.len(),
                basis.len()
            )));
        }
        check_finite(&coeffs, "velocity")?;
        Ok(Self {
            basis: basis.clone(),
            coeffs,
        })
    }

    pub fn mode(basis: &Arc<SolenoidalBasis<T>>, n: i32, j: usize) -> Option<Self> {
        let slot = basis.slot(n, j)?;
        let mut f = Self::zeros(basis);
        f.coeffs[slot] = T::one();
        Some(f)
    }

    pub fn basis(&self) -> &Arc<SolenoidalBasis<T>> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn block_coeffs(&self, idx: usize) -> &[T] {
        let jy = self.basis.modes_per_block();
        &self.coeffs[idx * jy..(idx + 1) * jy]
    }

    pub fn same_basis(&self, other: &Self) -> Result<()> {
        same_velocity_basis(&self.basis, &other.basis)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| *c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a + *b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a - *b).collect(),
        })
    }

    fn block_form(&self, other: &Self, stiffness: bool) -> T {
        let jy = self.basis.modes_per_block();
        let mut tmp = vec![T::zero(); jy];
        let mut total = T::zero();
        for (idx, block) in self.basis.blocks().iter().enumerate() {
            let m = if stiffness { &block.stiffness } else { &block.mass };
            m.matvec(other.block_coeffs(idx), &mut tmp);
            total += dot(self.block_coeffs(idx), &tmp);
        }
        total
    }

    /// L² inner product `(u, v)` through the per-wavenumber mass matrices.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.same_basis(other)?;
        Ok(self.block_form(other, false))
    }

    /// Dirichlet form `((u, v)) = ∫ ∇u : ∇v`.
    pub fn grad_inner(&self, other: &Self) -> Result<T> {
        self.same_basis(other)?;
        Ok(self.block_form(other, true))
    }

    /// Grid values of `∂ₓ^dx ∂_y^dy u_c`, `dy ≤ 3`.
    pub fn synthesize(&self, component: Component, dx: usize, dy: usize) -> GridField<T> {
        let b = &*self.basis;
        let quad = b.quadrature();
        let (qx, qy) = (quad.nx_points(), quad.ny_points());
        let xt = b.xtable();
        let mut profiles = vec![T::zero(); xt.modes() * qy];
        for idx in 0..xt.modes() {
            // u₁ carries e_n; u₂ carries e_{−n}, so its profile sits at the mirror slot.
            let (src, table) = match component {
                Component::X => (idx, b.block(idx).p_table(dy)),
                Component::Y => {
                    let src = xt.mirror(idx);
                    (src, b.block(src).q_table(dy))
                }
            };
            synth_profile(
                self.block_coeffs(src),
                table,
                qy,
                &mut profiles[idx * qy..(idx + 1) * qy],
            );
        }
        let mut grid = GridField::zeros(qx, qy);
        xt.synthesize(&profiles, dx, &mut grid.data);
        grid
    }

    pub fn velocity(&self) -> GridVector<T> {
        GridVector {
            x: self.synthesize(Component::X, 0, 0),
            y: self.synthesize(Component::Y, 0, 0),
        }
    }

    /// Pointwise divergence on the grid.
    pub fn divergence(&self) -> GridField<T> {
        let a = self.synthesize(Component::X, 1, 0);
        let b = self.synthesize(Component::Y, 0, 1);
        a.zip_map(&b, |p, q| p + q)
    }

    /// Test-function loads `(g, Φ_i)` of a grid vector field against every basis element.
    pub fn load_vector(basis: &Arc<SolenoidalBasis<T>>, g: &GridVector<T>) -> Vec<T> {
        let quad = basis.quadrature();
        let qy = quad.ny_points();
        let xt = basis.xtable();
        let jy = basis.modes_per_block();
        let mut h1 = vec![T::zero(); xt.modes() * qy];
        let mut h2 = vec![T::zero(); xt.modes() * qy];
        xt.analyze(&g.x.data, &mut h1);
        xt.analyze(&g.y.data, &mut h2);
        let mut load = vec![T::zero(); basis.len()];
        for idx in 0..xt.modes() {
            let block = basis.block(idx);
            let out = &mut load[idx * jy..(idx + 1) * jy];
            analyze_profile(&h1[idx * qy..(idx + 1) * qy], &quad.wy, block.p_table(0), out);
            let mirror = xt.mirror(idx);
            analyze_profile(&h2[mirror * qy..(mirror + 1) * qy], &quad.wy, block.q_table(0), out);
        }
        load
    }

    /// Solves `M a = load` blockwise.
    pub fn from_load(basis: &Arc<SolenoidalBasis<T>>, mut load: Vec<T>) -> Result<Self> {
        let jy = basis.modes_per_block();
        for (idx, block) in basis.blocks().iter().enumerate() {
            block
                .mass_cholesky()
                .solve_in_place(&mut load[idx * jy..(idx + 1) * jy]);
        }
        Self::from_coeffs(basis, load)
    }
}
