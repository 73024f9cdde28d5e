//! Scalar eigenbasis of the Dirichlet Laplacian and the divergence-free
//! velocity basis built from clamped-beam streamfunctions.

use std::fmt::Write as _;
use std::sync::Arc;

use super::beam::{beam_roots, BeamMode};
use super::domain::{DomainSpec, Resolution};
use super::quadrature::GridQuadrature;
use super::transform::XTable;
use crate::error::Result;
use crate::linalg::{Cholesky, DenseMatrix};
use crate::real::Real;

/// Highest wall-normal derivative tabulated for scalar profiles.
pub const SCALAR_DERIVS: usize = 4;
/// Highest wall-normal derivative tabulated for velocity profiles.
pub const VELOCITY_DERIVS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarMode<T> {
    pub n: i32,
    pub m: usize,
    pub beta: T,
    /// Position of the coefficient in storage order.
    pub slot: usize,
}

/// Eigenfunctions `v_nm = e_n(x) · √2 sin(mπy)` with eigenvalues
/// `β_nm = (2nπ/l)² + (mπ)²`.
///
/// Coefficients are stored `[(n + nx) * my + (m − 1)]`; [`ScalarBasis::modes`]
/// lists them in nondecreasing `β` order.
#[derive(Debug)]
pub struct ScalarBasis<T> {
    domain: DomainSpec<T>,
    res: Resolution,
    quad: Arc<GridQuadrature<T>>,
    xtab: Arc<XTable<T>>,
    beta: Vec<T>,
    sorted: Vec<ScalarMode<T>>,
    /// `d^d s_m/dy^d` at `[d][(m−1) * qy + q]`
    ytab: Vec<Vec<T>>,
}

impl<T: Real> ScalarBasis<T> {
    pub fn new(domain: DomainSpec<T>, res: Resolution) -> Result<Self> {
        domain.validate()?;
        res.validate()?;
        let quad = Arc::new(GridQuadrature::new(&domain, &res));
        let xtab = Arc::new(XTable::new(&domain, &res, &quad));
        Ok(Self::with_tables(domain, res, quad, xtab))
    }

    pub(crate) fn with_tables(
        domain: DomainSpec<T>,
        res: Resolution,
        quad: Arc<GridQuadrature<T>>,
        xtab: Arc<XTable<T>>,
    ) -> Self {
        let my = res.my;
        let mut beta = Vec::with_capacity(res.scalar_len());
        let mut sorted = Vec::with_capacity(res.scalar_len());
        for idx in 0..res.x_modes() {
            let n = xtab.n_of(idx);
            let k = xtab.k(idx);
            for m in 1..=my {
                let ky = T::from_count(m) * T::PI();
                let b = k * k + ky * ky;
                let slot = idx * my + (m - 1);
                beta.push(b);
                sorted.push(ScalarMode { n, m, beta: b, slot });
            }
        }
        sorted.sort_by(|a, b| {
            a.beta
                .partial_cmp(&b.beta)
                .expect("finite eigenvalues")
                .then(a.n.unsigned_abs().cmp(&b.n.unsigned_abs()))
                .then(a.n.signum().cmp(&b.n.signum()))
                .then(a.m.cmp(&b.m))
        });

        let qy = quad.ny_points();
        let sqrt2 = T::lit(2.0).sqrt();
        let ytab = (0..=SCALAR_DERIVS)
            .map(|d| {
                let mut t = Vec::with_capacity(my * qy);
                for m in 1..=my {
                    let ky = T::from_count(m) * T::PI();
                    let shift = T::from_count(d % 4) * T::FRAC_PI_2();
                    let scale = sqrt2 * ky.powi(d as i32);
                    for &y in &quad.y {
                        t.push(scale * (ky * y + shift).sin());
                    }
                }
                t
            })
            .collect();
        Self {
            domain,
            res,
            quad,
            xtab,
            beta,
            sorted,
            ytab,
        }
    }

    pub fn domain(&self) -> &DomainSpec<T> {
        &self.domain
    }

    pub fn resolution(&self) -> &Resolution {
        &self.res
    }

    pub fn quadrature(&self) -> &GridQuadrature<T> {
        &self.quad
    }

    pub fn xtable(&self) -> &XTable<T> {
        &self.xtab
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    /// Eigenvalues in storage order.
    pub fn eigenvalues(&self) -> &[T] {
        &self.beta
    }

    /// Modes sorted by eigenvalue.
    pub fn modes(&self) -> &[ScalarMode<T>] {
        &self.sorted
    }

    /// Smallest eigenvalue `β₁ = π²`.
    pub fn beta_min(&self) -> T {
        self.sorted[0].beta
    }

    pub fn beta_max(&self) -> T {
        self.sorted[self.sorted.len() - 1].beta
    }

    pub fn slot(&self, n: i32, m: usize) -> Option<usize> {
        if n.unsigned_abs() as usize > self.res.nx || m == 0 || m > self.res.my {
            return None;
        }
        Some(self.xtab.idx_of(n) * self.res.my + (m - 1))
    }

    pub fn mode_of_slot(&self, slot: usize) -> (i32, usize) {
        let idx = slot / self.res.my;
        (self.xtab.n_of(idx), slot % self.res.my + 1)
    }

    /// `d^order/dy^order` of `√2 sin(mπy)` at the quadrature nodes.
    pub fn y_table(&self, order: usize) -> &[T] {
        &self.ytab[order]
    }

    /// Pointwise evaluation of `v_nm` (independent of the tables).
    pub fn eval_mode(&self, n: i32, m: usize, x: T, y: T) -> T {
        let k = self.domain.wavenumber(n);
        let a = k * x;
        (T::lit(2.0) / self.domain.l).sqrt() * (a.sin() + a.cos()) * (T::from_count(m) * T::PI() * y).sin()
    }
}

/// Velocity basis functions for one horizontal wavenumber.
///
/// Element `j` is `u = (e_n(x) P_j(y), e_{−n}(x) Q_j(y))`. For `n ≠ 0` it
/// derives from the streamfunction `e_n(x) φ_j(y)` with a clamped beam mode
/// `φ_j` (`P = sφ'`, `Q = −s k φ`); for `n = 0` it is the mean flow
/// `(√2 sin(jπy), 0)`. Each element has unit L² norm.
#[derive(Clone, Debug)]
pub struct VelocityBlock<T> {
    pub n: i32,
    pub k: T,
    /// `[d][j * qy + q]`
    p: Vec<Vec<T>>,
    q: Vec<Vec<T>>,
    /// Wall-normal streamfunction profile `Ψ_j` with `u = (∂_y ψ, −∂_x ψ)`,
    /// zero for the mean-flow block.
    psi_scale: Vec<T>,
    pub mass: DenseMatrix<T>,
    pub stiffness: DenseMatrix<T>,
    /// `M⁻¹K`
    pub stokes: DenseMatrix<T>,
    mass_chol: Cholesky<T>,
}

impl<T: Real> VelocityBlock<T> {
    pub fn p_table(&self, order: usize) -> &[T] {
        &self.p[order]
    }

    pub fn q_table(&self, order: usize) -> &[T] {
        &self.q[order]
    }

    pub fn mass_cholesky(&self) -> &Cholesky<T> {
        &self.mass_chol
    }

    pub fn streamfunction_scale(&self) -> &[T] {
        &self.psi_scale
    }

    pub fn len(&self) -> usize {
        self.mass.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Divergence-free, no-slip velocity basis, block diagonal in the
/// horizontal wavenumber. Coefficients are stored `[(n + nx) * jy + j]`.
#[derive(Debug)]
pub struct SolenoidalBasis<T> {
    domain: DomainSpec<T>,
    res: Resolution,
    quad: Arc<GridQuadrature<T>>,
    xtab: Arc<XTable<T>>,
    roots: Vec<T>,
    blocks: Vec<VelocityBlock<T>>,
}

impl<T: Real> SolenoidalBasis<T> {
    pub fn new(domain: DomainSpec<T>, res: Resolution) -> Result<Self> {
        domain.validate()?;
        res.validate()?;
        let quad = Arc::new(GridQuadrature::new(&domain, &res));
        let xtab = Arc::new(XTable::new(&domain, &res, &quad));
        Self::with_tables(domain, res, quad, xtab)
    }

    pub(crate) fn with_tables(
        domain: DomainSpec<T>,
        res: Resolution,
        quad: Arc<GridQuadrature<T>>,
        xtab: Arc<XTable<T>>,
    ) -> Result<Self> {
        let jy = res.jy;
        let qy = quad.ny_points();
        let roots: Vec<T> = beam_roots(jy);
        let beams: Vec<BeamMode<T>> = roots.iter().map(|&l| BeamMode::new(l)).collect();
        // φ^{(d)} at the nodes, d = 0..=VELOCITY_DERIVS + 1
        let phi: Vec<Vec<T>> = (0..=VELOCITY_DERIVS + 1)
            .map(|d| {
                let mut t = Vec::with_capacity(jy * qy);
                for b in &beams {
                    for &y in &quad.y {
                        t.push(b.eval(y, d));
                    }
                }
                t
            })
            .collect();
        let sqrt2 = T::lit(2.0).sqrt();

        let mut blocks = Vec::with_capacity(res.x_modes());
        for idx in 0..res.x_modes() {
            let n = xtab.n_of(idx);
            let k = xtab.k(idx);
            let mut p: Vec<Vec<T>> = (0..=VELOCITY_DERIVS).map(|_| Vec::with_capacity(jy * qy)).collect();
            let mut q: Vec<Vec<T>> = (0..=VELOCITY_DERIVS).map(|_| Vec::with_capacity(jy * qy)).collect();
            let mut psi_scale = vec![T::zero(); jy];
            if n == 0 {
                for j in 1..=jy {
                    let ky = T::from_count(j) * T::PI();
                    for d in 0..=VELOCITY_DERIVS {
                        let shift = T::from_count(d % 4) * T::FRAC_PI_2();
                        let scale = sqrt2 * ky.powi(d as i32);
                        for &y in &quad.y {
                            p[d].push(scale * (ky * y + shift).sin());
                            q[d].push(T::zero());
                        }
                    }
                }
            } else {
                for j in 0..jy {
                    let row = |d: usize| &phi[d][j * qy..(j + 1) * qy];
                    let mut nrm = T::zero();
                    for (qi, w) in quad.wy.iter().enumerate() {
                        let a = row(1)[qi];
                        let b = k * row(0)[qi];
                        nrm += *w * (a * a + b * b);
                    }
                    let s = T::one() / nrm.sqrt();
                    psi_scale[j] = s;
                    for d in 0..=VELOCITY_DERIVS {
                        p[d].extend(row(d + 1).iter().map(|v| s * *v));
                        q[d].extend(row(d).iter().map(|v| -s * k * *v));
                    }
                }
            }
            let gram = |a: &[T], b: &[T], i: usize, j: usize| -> T {
                let ai = &a[i * qy..(i + 1) * qy];
                let bj = &b[j * qy..(j + 1) * qy];
                let mut s = T::zero();
                for ((x, y), w) in ai.iter().zip(bj).zip(&quad.wy) {
                    s += *w * *x * *y;
                }
                s
            };
            let k2 = k * k;
            let mut mass = DenseMatrix::from_fn(jy, |i, j| gram(&p[0], &p[0], i, j) + gram(&q[0], &q[0], i, j));
            let mut stiffness = DenseMatrix::from_fn(jy, |i, j| {
                k2 * (gram(&p[0], &p[0], i, j) + gram(&q[0], &q[0], i, j))
                    + gram(&p[1], &p[1], i, j)
                    + gram(&q[1], &q[1], i, j)
            });
            symmetrize(&mut mass);
            symmetrize(&mut stiffness);
            let context = format!("velocity mass matrix, n={n}");
            let mass_chol = Cholesky::factor(&mass, &context)?;
            Cholesky::factor(&stiffness, &format!("velocity stiffness matrix, n={n}"))?;
            let mut stokes = DenseMatrix::zeros(jy);
            for col in 0..jy {
                let rhs: Vec<T> = (0..jy).map(|i| stiffness[(i, col)]).collect();
                let sol = mass_chol.solve(&rhs);
                for (i, v) in sol.into_iter().enumerate() {
                    stokes[(i, col)] = v;
                }
            }
            blocks.push(VelocityBlock {
                n,
                k,
                p,
                q,
                psi_scale,
                mass,
                stiffness,
                stokes,
                mass_chol,
            });
        }
        Ok(Self {
            domain,
            res,
            quad,
            xtab,
            roots,
            blocks,
        })
    }

    pub fn domain(&self) -> &DomainSpec<T> {
        &self.domain
    }

    pub fn resolution(&self) -> &Resolution {
        &self.res
    }

    pub fn quadrature(&self) -> &GridQuadrature<T> {
        &self.quad
    }

    pub fn xtable(&self) -> &XTable<T> {
        &self.xtab
    }

    pub fn beam_roots(&self) -> &[T] {
        &self.roots
    }

    pub fn blocks(&self) -> &[VelocityBlock<T>] {
        &self.blocks
    }

    pub fn block(&self, idx: usize) -> &VelocityBlock<T> {
        &self.blocks[idx]
    }

    pub fn len(&self) -> usize {
        self.res.solenoidal_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn modes_per_block(&self) -> usize {
        self.res.jy
    }

    pub fn slot(&self, n: i32, j: usize) -> Option<usize> {
        if n.unsigned_abs() as usize > self.res.nx || j >= self.res.jy {
            return None;
        }
        Some(self.xtab.idx_of(n) * self.res.jy + j)
    }

    /// Pointwise evaluation of element `(n, j)` (independent of the tables).
    pub fn eval_mode(&self, n: i32, j: usize, x: T, y: T) -> (T, T) {
        let idx = self.xtab.idx_of(n);
        let k = self.domain.wavenumber(n);
        let inv_sqrt_l = T::one() / self.domain.l.sqrt();
        let e = |kk: T| ((kk * x).sin() + (kk * x).cos()) * inv_sqrt_l;
        if n == 0 {
            let ky = T::from_count(j + 1) * T::PI();
            (e(k) * T::lit(2.0).sqrt() * (ky * y).sin(), T::zero())
        } else {
            let beam = BeamMode::new(self.roots[j]);
            let s = self.blocks[idx].psi_scale[j];
            (e(k) * s * beam.eval(y, 1), -e(-k) * s * k * beam.eval(y, 0))
        }
    }
}

fn symmetrize<T: Real>(m: &mut DenseMatrix<T>) {
    let n = m.dim();
    let half = T::lit(0.5);
    for i in 0..n {
        for j in 0..i {
            let v = half * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Both bases over one shared quadrature.
#[derive(Clone, Debug)]
pub struct Discretization<T> {
    pub scalar: Arc<ScalarBasis<T>>,
    pub velocity: Arc<SolenoidalBasis<T>>,
}

impl<T: Real> Discretization<T> {
    pub fn new(domain: DomainSpec<T>, res: Resolution) -> Result<Self> {
        domain.validate()?;
        res.validate()?;
        let quad = Arc::new(GridQuadrature::new(&domain, &res));
        let xtab = Arc::new(XTable::new(&domain, &res, &quad));
        let scalar = Arc::new(ScalarBasis::with_tables(domain, res, quad.clone(), xtab.clone()));
        let velocity = Arc::new(SolenoidalBasis::with_tables(domain, res, quad, xtab)?);
        Ok(Self { scalar, velocity })
    }

    pub fn domain(&self) -> &DomainSpec<T> {
        self.scalar.domain()
    }

    pub fn resolution(&self) -> &Resolution {
        self.scalar.resolution()
    }

    pub fn quadrature(&self) -> &GridQuadrature<T> {
        self.scalar.quadrature()
    }

    /// Plain-text manifest of modes, eigenvalues and beam roots.
    pub fn manifest(&self) -> String {
        let res = self.resolution();
        let mut out = String::new();
        let _ = writeln!(out, "# micropolar basis manifest v1");
        let _ = writeln!(out, "l = {:.17e}", self.domain().l.to_f64_lossy());
        let _ = writeln!(
            out,
            "resolution nx={} my={} jy={} quad_x={} quad_y={}",
            res.nx, res.my, res.jy, res.quad_x, res.quad_y
        );
        let _ = writeln!(out, "[scalar_modes] count={}", self.scalar.len());
        let _ = writeln!(out, "# rank slot n m beta");
        for (rank, m) in self.scalar.modes().iter().enumerate() {
            let _ = writeln!(
                out,
                "{} {} {} {} {:.17e}",
                rank + 1,
                m.slot,
                m.n,
                m.m,
                m.beta.to_f64_lossy()
            );
        }
        let _ = writeln!(out, "[velocity_modes] count={}", self.velocity.len());
        let _ = writeln!(out, "# slot n j kind");
        for block in self.velocity.blocks() {
            for j in 0..block.len() {
                let slot = self.velocity.slot(block.n, j).expect("in range");
                let kind = if block.n == 0 { "mean" } else { "beam" };
                let _ = writeln!(out, "{} {} {} {}", slot, block.n, j, kind);
            }
        }
        let _ = writeln!(out, "[beam_roots] count={}", self.velocity.beam_roots().len());
        for (j, r) in self.velocity.beam_roots().iter().enumerate() {
            let _ = writeln!(out, "{} {:.17e}", j + 1, r.to_f64_lossy());
        }
        out
    }
}
