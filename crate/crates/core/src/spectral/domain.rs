use crate::error::{Error, Result};
use crate::real::Real;

/// Periodic channel `(0, l) × (0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainSpec<T> {
    /// Horizontal period.
    pub l: T,
}

impl<T: Real> DomainSpec<T> {
    pub fn new(l: T) -> Result<Self> {
        let d = Self { l };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l.is_finite() && self.l > T::zero()) {
            return Err(Error::Domain(format!("period l must be positive, got {}", self.l)));
        }
        Ok(())
    }

    /// Horizontal wavenumber `2nπ/l`.
    #[inline]
    pub fn wavenumber(&self, n: i32) -> T {
        T::lit(2.0 * n as f64) * T::PI() / self.l
    }
}

/// Galerkin truncation and quadrature sizes.
///
/// * `nx`: horizontal modes `n ∈ {-nx, …, nx}`
/// * `my`: sine modes `m ∈ {1, …, my}` for ω and θ
/// * `jy`: wall-normal velocity modes per horizontal wavenumber
/// * `quad_x`: uniform trapezoid points, at least `3·nx + 1`
/// * `quad_y`: Gauss–Legendre points, at least `2·max(my, jy) + 8`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Resolution {
    pub nx: usize,
    pub my: usize,
    pub jy: usize,
    pub quad_x: usize,
    pub quad_y: usize,
}

impl Resolution {
    /// Resolution with the default quadrature sizes.
    pub fn new(nx: usize, my: usize, jy: usize) -> Self {
        Self {
            nx,
            my,
            jy,
            quad_x: Self::default_quad_x(nx),
            quad_y: Self::default_quad_y(my, jy),
        }
    }

    /// Same mode count in every direction.
    pub fn uniform(n: usize) -> Self {
        Self::new(n, n, n)
    }

    pub fn default_quad_x(nx: usize) -> usize {
        3 * nx + 1
    }

    /// Enough Gauss–Legendre points to integrate quartic products of the
    /// wall-normal profiles to round-off.
    pub fn default_quad_y(my: usize, jy: usize) -> usize {
        4 * my.max(jy) + 8
    }

    pub fn min_quad_y(my: usize, jy: usize) -> usize {
        2 * my.max(jy) + 8
    }

    /// Copy with quadrature fine enough for quartic integrands in `x` as well.
    pub fn with_quartic_quadrature(mut self) -> Self {
        self.quad_x = self.quad_x.max(4 * self.nx + 1);
        self.quad_y = self.quad_y.max(Self::default_quad_y(self.my, self.jy));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.my == 0 || self.jy == 0 {
            return Err(Error::Resolution(format!(
                "mode counts must be positive (nx={}, my={}, jy={})",
                self.nx, self.my, self.jy
            )));
        }
        if self.quad_x < 3 * self.nx + 1 {
            return Err(Error::Resolution(format!(
                "quad_x={} below dealiasing minimum 3·nx+1={}",
                self.quad_x,
                3 * self.nx + 1
            )));
        }
        let min_y = Self::min_quad_y(self.my, self.jy);
        if self.quad_y < min_y {
            return Err(Error::Resolution(format!(
                "quad_y={} below minimum 2·max(my,jy)+8={}",
                self.quad_y, min_y
            )));
        }
        Ok(())
    }

    /// Number of horizontal modes `2·nx + 1`.
    pub fn x_modes(&self) -> usize {
        2 * self.nx + 1
    }

    pub fn scalar_len(&self) -> usize {
        self.x_modes() * self.my
    }

    pub fn solenoidal_len(&self) -> usize {
        self.x_modes() * self.jy
    }

    /// Whether every mode of `self` also exists in `other`.
    pub fn nested_in(&self, other: &Resolution) -> bool {
        self.nx <= other.nx && self.my <= other.my && self.jy <= other.jy
    }
}
