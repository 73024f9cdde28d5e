//! Dealiased pseudospectral evaluation of the trilinear forms and the
//! quadratic couplings.
//!
//! Fields are synthesized on the quadrature grid, multiplied pointwise and
//! projected back. With `quad_x ≥ 3·nx + 1` trapezoid points (the 3/2 rule on
//! the `2·nx + 1` horizontal band) and the default Gauss–Legendre count, every
//! triple product of basis functions is integrated to round-off, so the
//! projected terms are the exact Galerkin terms.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::field::same_scalar_basis;
use crate::spectral::{
    Component, GridField, GridVector, Resolution, ScalarBasis, ScalarField, SolenoidalBasis, SolenoidalField,
};

/// Padded grid sizes used for products.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DealiasPlan {
    pub padded_x: usize,
    pub padded_y: usize,
    pub band_x: usize,
    pub band_y: usize,
}

impl DealiasPlan {
    pub fn new(res: &Resolution) -> Result<Self> {
        res.validate()?;
        let plan = Self {
            padded_x: res.quad_x,
            padded_y: res.quad_y,
            band_x: res.x_modes(),
            band_y: res.my.max(res.jy),
        };
        if 2 * plan.padded_x < 3 * plan.band_x - 1 {
            return Err(Error::Resolution(format!(
                "padded x grid {} below 3/2 of band {}",
                plan.padded_x, plan.band_x
            )));
        }
        Ok(plan)
    }

    /// Whether products of three band-limited fields integrate exactly in `x`.
    pub fn exact_for_triple_products(&self) -> bool {
        self.padded_x > 3 * (self.band_x / 2)
    }
}

/// Velocity and its first derivatives on the grid.
#[derive(Clone, Debug)]
pub struct VelocityGrid<T> {
    pub u: GridVector<T>,
    pub dx: GridVector<T>,
    pub dy: GridVector<T>,
}

impl<T: Real> VelocityGrid<T> {
    pub fn new(u: &SolenoidalField<T>) -> Self {
        Self {
            u: u.velocity(),
            dx: GridVector {
                x: u.synthesize(Component::X, 1, 0),
                y: u.synthesize(Component::Y, 1, 0),
            },
            dy: GridVector {
                x: u.synthesize(Component::X, 0, 1),
                y: u.synthesize(Component::Y, 0, 1),
            },
        }
    }

    /// `(u·∇)u`
    pub fn self_advection(&self) -> GridVector<T> {
        let adv = |dx: &GridField<T>, dy: &GridField<T>| {
            let mut out = dx.zip_map(&self.u.x, |a, b| a * b);
            for ((o, d), v) in out.data.iter_mut().zip(&dy.data).zip(&self.u.y.data) {
                *o += *d * *v;
            }
            out
        };
        GridVector {
            x: adv(&self.dx.x, &self.dy.x),
            y: adv(&self.dx.y, &self.dy.y),
        }
    }

    /// `rot u = ∂u₂/∂x − ∂u₁/∂y`
    pub fn rot(&self) -> GridField<T> {
        self.dx.y.zip_map(&self.dy.x, |a, b| a - b)
    }
}

/// Gradient of a scalar field on the grid.
pub fn gradient<T: Real>(f: &ScalarField<T>) -> GridVector<T> {
    GridVector {
        x: f.synthesize(1, 0),
        y: f.synthesize(0, 1),
    }
}

/// `a · ∇f` given the gradient of `f`.
pub fn directional<T: Real>(a: &GridVector<T>, grad: &GridVector<T>) -> GridField<T> {
    a.dot(grad)
}

fn check_pair<T: Real>(u: &SolenoidalField<T>, f: &ScalarField<T>) -> Result<()> {
    let (r1, r2) = (u.basis().resolution(), f.basis().resolution());
    if r1 != r2 || u.basis().domain() != f.basis().domain() {
        return Err(Error::BasisMismatch(format!(
            "velocity basis {r1:?} vs scalar basis {r2:?}"
        )));
    }
    Ok(())
}

fn integrate<T: Real>(basis: &ScalarBasis<T>, g: &GridField<T>) -> T {
    basis.quadrature().integrate(&g.data)
}

fn integrate_v<T: Real>(basis: &SolenoidalBasis<T>, g: &GridField<T>) -> T {
    basis.quadrature().integrate(&g.data)
}

/// `b_S(u, v, w) = Σ_{ij} ∫ u_i ∂_i v_j w_j`
pub fn trilinear_bs<T: Real>(u: &SolenoidalField<T>, v: &SolenoidalField<T>, w: &SolenoidalField<T>) -> Result<T> {
    u.same_basis(v)?;
    u.same_basis(w)?;
    let ug = u.velocity();
    let vg = VelocityGrid::new(v);
    let wg = w.velocity();
    let adv = GridVector {
        x: directional(
            &ug,
            &GridVector {
                x: vg.dx.x.clone(),
                y: vg.dy.x.clone(),
            },
        ),
        y: directional(
            &ug,
            &GridVector {
                x: vg.dx.y.clone(),
                y: vg.dy.y.clone(),
            },
        ),
    };
    Ok(integrate_v(u.basis(), &adv.dot(&wg)))
}

/// `b(u, f, g) = Σ_i ∫ u_i ∂_i f g`
pub fn trilinear_b<T: Real>(u: &SolenoidalField<T>, f: &ScalarField<T>, g: &ScalarField<T>) -> Result<T> {
    check_pair(u, f)?;
    same_scalar_basis(f.basis(), g.basis())?;
    let adv = directional(&u.velocity(), &gradient(f));
    let gg = g.synthesize(0, 0);
    Ok(integrate(f.basis(), &adv.zip_map(&gg, |a, b| a * b)))
}

/// Galerkin projection of `u·∇f` onto the scalar basis.
pub fn advect_scalar<T: Real>(u: &SolenoidalField<T>, f: &ScalarField<T>) -> Result<ScalarField<T>> {
    check_pair(u, f)?;
    let adv = directional(&u.velocity(), &gradient(f));
    Ok(ScalarField::project(f.basis(), &adv))
}

/// Galerkin projection of `rot ω · ∇θ`.
pub fn rotw_grad<T: Real>(omega: &ScalarField<T>, theta: &ScalarField<T>) -> Result<ScalarField<T>> {
    omega.same_basis(theta)?;
    let g = rot_dot_grad(&gradient(omega), &gradient(theta));
    Ok(ScalarField::project(theta.basis(), &g))
}

/// `rot ω · ∇θ = ω_y θ_x − ω_x θ_y` from the two gradients.
pub fn rot_dot_grad<T: Real>(grad_omega: &GridVector<T>, grad_theta: &GridVector<T>) -> GridField<T> {
    let mut out = grad_omega.y.zip_map(&grad_theta.x, |a, b| a * b);
    for ((o, wx), ty) in out.data.iter_mut().zip(&grad_omega.x.data).zip(&grad_theta.y.data) {
        *o -= *wx * *ty;
    }
    out
}

/// Loads `b_S(u, u, Φ_i)` against every velocity basis element.
pub fn convective_load<T: Real>(u: &SolenoidalField<T>) -> Vec<T> {
    let adv = VelocityGrid::new(u).self_advection();
    SolenoidalField::load_vector(u.basis(), &adv)
}

/// Galerkin projection of `(u·∇)u` onto the divergence-free basis.
pub fn advect_velocity<T: Real>(u: &SolenoidalField<T>) -> Result<SolenoidalField<T>> {
    SolenoidalField::from_load(u.basis(), convective_load(u))
}
