//! Basis and operator identities of the spectral core.

use std::f64::consts::PI;
use std::sync::Arc;

use micropolar::spectral::quadrature::{gauss_legendre_unit, trapezoid};
use micropolar::spectral::{leray_project, neg_laplacian, rot_rot, rot_scalar, rot_vector, Component};
use micropolar::{Discretization64, Domain64, Exponent, GridVector, Resolution, ScalarField64, SolenoidalField64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn disc(l: f64, nx: usize, my: usize, jy: usize) -> Discretization64 {
    Discretization64::new(Domain64::new(l).unwrap(), Resolution::new(nx, my, jy)).unwrap()
}

fn random_scalar(d: &Discretization64, rng: &mut ChaCha8Rng) -> ScalarField64 {
    let c = (0..d.scalar.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    ScalarField64::from_coeffs(&d.scalar, c).unwrap()
}

fn random_velocity(d: &Discretization64, rng: &mut ChaCha8Rng) -> SolenoidalField64 {
    let c = (0..d.velocity.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SolenoidalField64::from_coeffs(&d.velocity, c).unwrap()
}

/// Independent quadrature oracle: closed-form `v_nm` and its gradient.
fn rayleigh_quotient_oracle(l: f64, n: i32, m: usize) -> f64 {
    let k = 2.0 * n as f64 * PI / l;
    let ky = m as f64 * PI;
    let (xs, wx) = trapezoid(l, 64);
    let (ys, wy) = gauss_legendre_unit::<f64>(96);
    let c = (2.0 / l).sqrt();
    let (mut num, mut den) = (0.0, 0.0);
    for (x, wxv) in xs.iter().zip(&wx) {
        for (y, wyv) in ys.iter().zip(&wy) {
            let s = (k * x).sin() + (k * x).cos();
            let v = c * s * (ky * y).sin();
            let vx = c * k * ((k * x).cos() - (k * x).sin()) * (ky * y).sin();
            let vy = c * s * ky * (ky * y).cos();
            num += wxv * wyv * (vx * vx + vy * vy);
            den += wxv * wyv * v * v;
        }
    }
    num / den
}

#[test]
fn eigenvalue_examples() {
    let d = disc(1.0, 2, 3, 3);
    let b0 = d.scalar.eigenvalues()[d.scalar.slot(0, 1).unwrap()];
    let b1 = d.scalar.eigenvalues()[d.scalar.slot(1, 1).unwrap()];
    assert!((b0 - rayleigh_quotient_oracle(1.0, 0, 1)).abs() < 1e-10);
    assert!((b0 - 9.869604401089358).abs() < 1e-12);
    assert!((b1 - rayleigh_quotient_oracle(1.0, 1, 1)).abs() < 1e-10);
    assert!((b1 - 5.0 * PI * PI).abs() < 1e-12);
}

#[test]
fn modes_sorted_with_tie_break() {
    let d = disc(1.0, 3, 4, 2);
    let modes = d.scalar.modes();
    assert!(modes.windows(2).all(|w| w[0].beta <= w[1].beta));
    assert_eq!((modes[0].n, modes[0].m), (0, 1));
    // β(−1, m) = β(1, m): the negative index comes first.
    let pos = |n, m| modes.iter().position(|md| md.n == n && md.m == m).unwrap();
    assert!(pos(-1, 1) < pos(1, 1));
    assert!(pos(-2, 3) < pos(2, 3));
    assert!(modes.iter().all(|m| m.beta > 0.0));
}

#[test]
fn scalar_gram_is_identity() {
    for l in [1.0, 2.0 * PI] {
        let d = disc(l, 4, 5, 2);
        let quad = d.quadrature();
        let grids: Vec<_> = (0..d.scalar.len())
            .map(|s| {
                let mut c = vec![0.0; d.scalar.len()];
                c[s] = 1.0;
                ScalarField64::from_coeffs(&d.scalar, c).unwrap().synthesize(0, 0)
            })
            .collect();
        for (i, a) in grids.iter().enumerate() {
            for (j, b) in grids.iter().enumerate() {
                let g = quad.integrate(&a.zip_map(b, |p, q| p * q).data);
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g - e).abs() < 1e-12, "l={l} ({i},{j}) {g}");
            }
        }
    }
}

#[test]
fn apply_a_examples() {
    let d = disc(1.0, 2, 3, 2);
    let v01 = ScalarField64::mode(&d.scalar, 0, 1).unwrap();
    let av = v01.apply_a();
    assert!((av.coeffs()[d.scalar.slot(0, 1).unwrap()] - PI * PI).abs() < 1e-12);
    let zero = ScalarField64::zeros(&d.scalar);
    assert!(zero.apply_a().coeffs().iter().all(|c| *c == 0.0));
    let v12 = ScalarField64::mode(&d.scalar, 1, 2).unwrap();
    let sum = v01.add(&v12).unwrap().apply_a();
    let expect = v01
        .scaled(PI * PI)
        .add(&v12.scaled(4.0 * PI * PI + 4.0 * PI * PI))
        .unwrap();
    for (a, b) in sum.coeffs().iter().zip(expect.coeffs()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn fractional_powers_compose() {
    let d = disc(1.0, 3, 4, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = random_scalar(&d, &mut rng);
    let a32 = f.apply_a_frac(Exponent::ThreeHalves);
    let twice = a32.apply_a_frac(Exponent::ThreeHalves);
    let cube = f.apply_a_frac(Exponent::Three);
    for (a, b) in twice.coeffs().iter().zip(cube.coeffs()) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
    }
    let one = f.apply_a_frac(Exponent::One);
    assert_eq!(one.coeffs(), f.apply_a().coeffs());
    let vk = ScalarField64::mode(&d.scalar, 1, 1).unwrap();
    let beta = 5.0 * PI * PI;
    let slot = d.scalar.slot(1, 1).unwrap();
    assert!((vk.apply_a_frac(Exponent::ThreeHalves).coeffs()[slot] - beta.powf(1.5)).abs() < 1e-10);
}

#[test]
fn norms_of_basis_element() {
    let d = disc(1.0, 2, 3, 2);
    let vk = ScalarField64::mode(&d.scalar, -1, 2).unwrap();
    let beta = 4.0 * PI * PI + 4.0 * PI * PI;
    let n = vk.norms();
    assert!((n.l2 - 1.0).abs() < 1e-14);
    assert!((n.h1 - beta.sqrt()).abs() < 1e-12);
    assert!((n.h2_proxy - beta).abs() < 1e-10);
    assert!((n.h3_proxy - beta.powf(1.5)).abs() < 1e-8);
}

#[test]
fn h3_proxy_equivalent_to_direct_norm() {
    let d = disc(1.0, 3, 4, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for _ in 0..100 {
        let f = random_scalar(&d, &mut rng);
        let ratio = f.norms().h3_proxy / f.h3_norm_direct();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    assert!(lo > 0.0 && hi.is_finite());
    assert!(hi / lo < 4.0, "spread [{lo}, {hi}]");
}

#[test]
fn rot_scalar_examples() {
    let d = disc(1.0, 2, 3, 2);
    let zero = rot_scalar(&ScalarField64::zeros(&d.scalar));
    assert_eq!(zero.max_abs(), 0.0);
    let r = rot_scalar(&ScalarField64::mode(&d.scalar, 0, 1).unwrap());
    let q = d.quadrature();
    for (p, _) in q.x.iter().enumerate() {
        for (qi, y) in q.y.iter().enumerate() {
            let expect = PI * (PI * y).cos() * 2.0_f64.sqrt();
            assert!((r.x.at(p, qi) - expect).abs() < 1e-12);
            assert!(r.y.at(p, qi).abs() < 1e-12);
        }
    }
}

#[test]
fn rot_vector_of_mean_flow() {
    let d = disc(1.0, 2, 3, 3);
    // Basis element (0, 0) is √(2/l)·(sin πy, 0); with l = 1 this is √2 (sin πy, 0).
    let u = SolenoidalField64::mode(&d.velocity, 0, 0).unwrap();
    let r = rot_vector(&u);
    let q = d.quadrature();
    for p in 0..q.nx_points() {
        for (qi, y) in q.y.iter().enumerate() {
            let expect = -2.0_f64.sqrt() * PI * (PI * y).cos();
            assert!((r.at(p, qi) - expect).abs() < 1e-11);
        }
    }
    let zero = rot_vector(&SolenoidalField64::zeros(&d.velocity));
    assert_eq!(zero.max_abs(), 0.0);
}

#[test]
fn velocity_basis_divergence_free_and_no_slip() {
    let d = disc(1.0, 4, 3, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let u = random_velocity(&d, &mut rng);
        let div = u.divergence();
        let scale = u.synthesize(Component::X, 1, 0).max_abs().max(1.0);
        assert!(div.max_abs() <= 1e-10 * scale, "div {}", div.max_abs());
        for (x, y) in [(0.13, 0.0), (0.77, 1.0), (0.5, 0.0)] {
            let mut s = (0.0_f64, 0.0_f64);
            for n in -4..=4 {
                for j in 0..12 {
                    let c = u.coeffs()[d.velocity.slot(n, j).unwrap()];
                    let (a, b) = d.velocity.eval_mode(n, j, x, y);
                    s.0 += c * a;
                    s.1 += c * b;
                }
            }
            assert!(s.0.abs() < 1e-10 && s.1.abs() < 1e-10, "wall velocity {s:?}");
        }
    }
}

#[test]
fn velocity_matrices_spd() {
    let d = disc(2.0 * PI, 3, 3, 20);
    for b in d.velocity.blocks() {
        assert!(b.mass.max_asymmetry() < 1e-14);
        assert!(b.stiffness.max_asymmetry() < 1e-9 * b.stiffness[(0, 0)]);
        for j in 0..b.len() {
            assert!((b.mass[(j, j)] - 1.0).abs() < 1e-12);
        }
        micropolar::linalg::Cholesky::factor(&b.mass, "m").unwrap();
        micropolar::linalg::Cholesky::factor(&b.stiffness, "k").unwrap();
    }
}

#[test]
fn stokes_examples() {
    let d = disc(1.0, 2, 3, 5);
    for m in 0..5 {
        let u = SolenoidalField64::mode(&d.velocity, 0, m).unwrap();
        let w = u.apply_stokes().unwrap();
        let lam = ((m + 1) as f64 * PI).powi(2);
        for (a, b) in w.coeffs().iter().zip(u.coeffs()) {
            assert!((a - lam * b).abs() < 1e-9 * lam);
        }
    }
    let zero = SolenoidalField64::zeros(&d.velocity).apply_stokes().unwrap();
    assert!(zero.coeffs().iter().all(|c| *c == 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let u = random_velocity(&d, &mut rng);
        let w = u.apply_stokes().unwrap();
        let lhs = w.inner(&u).unwrap();
        let rhs = u.grad_inner(&u).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }
}

#[test]
fn rot_adjoint_and_rot_rot() {
    let d = disc(1.0, 3, 4, 6);
    let q = d.quadrature();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let w = random_scalar(&d, &mut rng);
        let u = random_velocity(&d, &mut rng);
        let lhs = q.integrate(&rot_scalar(&w).dot(&u.velocity()).data);
        let wg = w.synthesize(0, 0);
        let rhs = q.integrate(&wg.zip_map(&rot_vector(&u), |a, b| a * b).data);
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "{lhs} vs {rhs}");

        let rr = rot_rot(&u);
        let lap = neg_laplacian(&u);
        let scale = lap.max_abs();
        let diff = GridVector {
            x: rr.x.zip_map(&lap.x, |a, b| a - b),
            y: rr.y.zip_map(&lap.y, |a, b| a - b),
        };
        assert!(diff.max_abs() <= 1e-10 * scale);
    }
}

#[test]
fn leray_projection_properties() {
    let d = disc(1.0, 3, 4, 8);
    let q = d.quadrature();
    let vel = &d.velocity;
    let mut rng = ChaCha8Rng::seed_from_u64(13);

    // Gradients of smooth periodic potentials are orthogonal to H_S.
    let grad = GridVector {
        x: micropolar::GridField::from_fn(&q.x, &q.y, |x, y| 2.0 * PI * (2.0 * PI * x).cos() * (y * y + 0.3)),
        y: micropolar::GridField::from_fn(&q.x, &q.y, |x, y| (2.0 * PI * x).sin() * 2.0 * y + 3.0 * y * y),
    };
    let pg = leray_project(vel, &grad).unwrap();
    assert!(
        pg.coeffs().iter().all(|c| c.abs() < 1e-10),
        "{:?}",
        pg.coeffs().iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    );

    for _ in 0..10 {
        let u = random_velocity(&d, &mut rng);
        let pu = leray_project(vel, &u.velocity()).unwrap();
        for (a, b) in pu.coeffs().iter().zip(u.coeffs()) {
            assert!((a - b).abs() < 1e-10);
        }
        let g = GridVector {
            x: micropolar::GridField::from_fn(&q.x, &q.y, |x, y| (x * 3.0).sin() * y + rng_val(x, y)),
            y: micropolar::GridField::from_fn(&q.x, &q.y, |x, y| (y * 5.0).cos() * x),
        };
        let h = GridVector {
            x: micropolar::GridField::from_fn(&q.x, &q.y, |x, y| (x * y * 7.0).cos()),
            y: micropolar::GridField::from_fn(&q.x, &q.y, |x, y| (x + y).exp()),
        };
        let pg = leray_project(vel, &g).unwrap();
        let ppg = leray_project(vel, &pg.velocity()).unwrap();
        for (a, b) in pg.coeffs().iter().zip(ppg.coeffs()) {
            assert!((a - b).abs() < 1e-10);
        }
        let ph = leray_project(vel, &h).unwrap();
        let lhs = q.integrate(&pg.velocity().dot(&h).data);
        let rhs = q.integrate(&g.dot(&ph.velocity()).data);
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }
    let _ = Arc::clone(vel);
}

fn rng_val(x: f64, y: f64) -> f64 {
    (x * 12.9898 + y * 78.233).sin() * 0.1
}
