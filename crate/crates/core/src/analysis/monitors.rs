//! Energy-inequality monitors over a recorded ledger.
//!
//! Residuals are relative, `(lhs − bound)/bound`, so a positive value means
//! the bound is broken; a check passes when every residual is `≤ tol`.

use super::ledger::{EnergyLedger, LedgerRow};
use super::report::KeyValues;
use crate::dynamics::PhysParams;
use crate::error::{Error, Result};
use crate::real::Real;

/// `c₂ = min{(1−N²)Pr, 2Pr/L², 1}` and `c₃ = max{Ra²Pr/(1−N²), 2D², 2}`.
pub fn derive_c2_c3<T: Real>(p: &PhysParams<T>) -> (T, T) {
    let two = T::lit(2.0);
    let one_m = T::one() - p.nsq;
    let c2 = (one_m * p.pr).min(two * p.pr / p.lsq).min(T::one());
    let c3 = (p.ra * p.ra * p.pr / one_m).max(two * p.d * p.d).max(two);
    (c2, c3)
}

/// `c₃` with the Poincaré factor `k₁²` kept on the buoyancy term.
pub fn c3_with_poincare<T: Real>(p: &PhysParams<T>, k1: T) -> T {
    let two = T::lit(2.0);
    (k1 * k1 * p.ra * p.ra * p.pr / (T::one() - p.nsq))
        .max(two * p.d * p.d)
        .max(two)
}

/// Default relative slack: `1e−6` plus the time step.
pub fn default_tolerance<T: Real>(dt: T) -> T {
    T::lit(1e-6) + dt
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check<T> {
    pub name: String,
    /// Largest residual over the ledger.
    pub max_violation: T,
    pub t_at_max: T,
    /// First row (and its time) whose residual exceeds the tolerance.
    pub first_violation: Option<(usize, T)>,
    pub tol: T,
    pub asserted: bool,
}

impl<T: Real> Check<T> {
    fn from_pairs(name: &str, rows: &[LedgerRow<T>], pairs: &[(T, T)], tol: T, asserted: bool) -> Self {
        let mut max_violation = T::neg_infinity();
        let mut t_at_max = T::zero();
        let mut first_violation = None;
        for (i, (lhs, bound)) in pairs.iter().enumerate() {
            let r = residual(*lhs, *bound);
            if r > max_violation {
                max_violation = r;
                t_at_max = rows[i].t;
            }
            if r > tol && first_violation.is_none() {
                first_violation = Some((i, rows[i].t));
            }
        }
        Self {
            name: name.to_string(),
            max_violation,
            t_at_max,
            first_violation,
            tol,
            asserted,
        }
    }

    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

fn residual<T: Real>(lhs: T, bound: T) -> T {
    let diff = lhs - bound;
    if bound > T::zero() {
        diff / bound
    } else if diff > T::zero() {
        T::infinity()
    } else {
        T::zero()
    }
}

/// Per-inequality outcomes plus informational values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InequalityReport<T> {
    pub checks: Vec<Check<T>>,
    pub info: Vec<(String, T)>,
}

impl<T: Real> InequalityReport<T> {
    /// Whether every asserted check holds.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.asserted).all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check<T>> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn info(&self, name: &str) -> Option<T> {
        self.info.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn key_values(&self, prefix: &str) -> KeyValues {
        let mut kv = KeyValues::new();
        for c in &self.checks {
            let key = format!("{prefix}.{}", c.name);
            kv.push(format!("{key}.status"), if c.passed() { "pass" } else { "fail" });
            kv.push(format!("{key}.asserted"), c.asserted);
            kv.push_real(format!("{key}.max_violation"), c.max_violation);
            kv.push_real(format!("{key}.t_at_max"), c.t_at_max);
            kv.push_real(format!("{key}.tol"), c.tol);
            match c.first_violation {
                Some((row, t)) => {
                    kv.push(format!("{key}.first_violation_row"), row);
                    kv.push_real(format!("{key}.first_violation_t"), t);
                }
                None => kv.push(format!("{key}.first_violation_row"), "none"),
            }
        }
        for (k, v) in &self.info {
            kv.push_real(format!("{prefix}.{k}"), *v);
        }
        kv
    }
}

/// Running trapezoid integral of `f(row)` over the ledger times.
fn cumulative<T: Real>(rows: &[LedgerRow<T>], f: impl Fn(&LedgerRow<T>) -> T) -> Vec<T> {
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        if i > 0 {
            let prev = &rows[i - 1];
            acc += T::lit(0.5) * (r.t - prev.t) * (f(r) + f(prev));
        }
        out.push(acc);
    }
    out
}

/// Weak-solution Gronwall envelope.
///
/// Asserted checks (for `asserted = true`), at every ledger row `s`:
/// `y(s) ≤ e^{c₃s} y(0)` and `∫₀ˢ y_strong ≤ (e^{c₃s}/c₂) y(0)`.
/// The combined form `y(s) + c₂∫₀ˢ e^{c₃(s−t)} y_strong dt ≤ e^{c₃s} y(0)` and
/// the envelope with `k₁²`-corrected `c₃` are reported only.
pub fn check_gronwall_weak<T: Real>(
    ledger: &EnergyLedger<T>,
    p: &PhysParams<T>,
    k1: T,
    tol: T,
    asserted: bool,
) -> Result<InequalityReport<T>> {
    let rows = ledger.rows();
    let first = rows.first().ok_or(Error::EmptyLedger)?;
    let (c2, c3) = derive_c2_c3(p);
    let y0 = first.y;
    let t0 = first.t;
    let env = |c: T, t: T| (c * (t - t0)).exp() * y0;

    let sup: Vec<(T, T)> = rows.iter().map(|r| (r.y, env(c3, r.t))).collect();
    let integ = cumulative(rows, |r| r.y_strong);
    let l2: Vec<(T, T)> = rows.iter().zip(&integ).map(|(r, i)| (*i, env(c3, r.t) / c2)).collect();
    // e^{c₃s}∫₀ˢ e^{−c₃t} α dt, accumulated without overflow for moderate c₃·s.
    let weighted = cumulative(rows, |r| (-c3 * (r.t - t0)).exp() * r.y_strong);
    let combined: Vec<(T, T)> = rows
        .iter()
        .zip(&weighted)
        .map(|(r, w)| (r.y + c2 * (c3 * (r.t - t0)).exp() * *w, env(c3, r.t)))
        .collect();
    let c3k = c3_with_poincare(p, k1);
    let corrected: Vec<(T, T)> = rows.iter().map(|r| (r.y, env(c3k, r.t))).collect();

    let mut report = InequalityReport::default();
    report
        .checks
        .push(Check::from_pairs("sup_energy", rows, &sup, tol, asserted));
    report
        .checks
        .push(Check::from_pairs("dissipation_integral", rows, &l2, tol, asserted));
    report
        .checks
        .push(Check::from_pairs("combined", rows, &combined, tol, false));
    report.checks.push(Check::from_pairs(
        "sup_energy_k1_corrected",
        rows,
        &corrected,
        tol,
        false,
    ));
    let last = rows.last().expect("nonempty");
    report.info.extend([
        ("c2".to_string(), c2),
        ("c3".to_string(), c3),
        ("c3_k1_corrected".to_string(), c3k),
        ("y0".to_string(), y0),
        ("T".to_string(), last.t - t0),
        ("y_final".to_string(), last.y),
        ("dissipation_integral".to_string(), *integ.last().expect("nonempty")),
    ]);
    Ok(report)
}

/// Integrated Gronwall envelope `y(0)e^{∫β} + ∫α e^{∫β}` for `y' ≤ α + βy`.
fn gronwall_envelope<T: Real>(rows: &[LedgerRow<T>], y: &[T], alpha: &[T], beta: &[T]) -> Vec<T> {
    let mut b = T::zero();
    let mut a = T::zero();
    let mut out = Vec::with_capacity(rows.len());
    let mut prev_w = T::zero();
    for i in 0..rows.len() {
        if i > 0 {
            let h = rows[i].t - rows[i - 1].t;
            b += T::lit(0.5) * h * (beta[i] + beta[i - 1]);
        }
        let w = alpha[i] * (-b).exp();
        if i > 0 {
            a += T::lit(0.5) * (rows[i].t - rows[i - 1].t) * (w + prev_w);
        }
        prev_w = w;
        out.push(b.exp() * (y[0] + a));
    }
    out
}

struct StrongForm<T> {
    y: Vec<T>,
    /// `α/C` and `β/C`; both forcings scale linearly with the constant.
    alpha: Vec<T>,
    beta: Vec<T>,
}

impl<T: Real> StrongForm<T> {
    fn velocity(rows: &[LedgerRow<T>]) -> Self {
        let n = |r: &LedgerRow<T>| r.norms;
        Self {
            y: rows.iter().map(|r| n(r).u_h1sq + n(r).omega_h1sq).collect(),
            alpha: rows.iter().map(|r| n(r).theta_l2sq).collect(),
            beta: rows
                .iter()
                .map(|r| n(r).u_l2sq * n(r).u_h1sq + n(r).u_l2sq * n(r).omega_h1sq + T::one())
                .collect(),
        }
    }

    fn temperature(rows: &[LedgerRow<T>]) -> Self {
        let n = |r: &LedgerRow<T>| r.norms;
        Self {
            y: rows.iter().map(|r| n(r).theta_h1sq).collect(),
            alpha: rows.iter().map(|r| n(r).omega_h1sq + n(r).u_l2sq).collect(),
            beta: rows
                .iter()
                .map(|r| n(r).u_l2sq * n(r).u_h1sq + n(r).omega_h1sq * n(r).omega_a_sq)
                .collect(),
        }
    }

    fn pairs(&self, rows: &[LedgerRow<T>], c: T) -> Vec<(T, T)> {
        let a: Vec<T> = self.alpha.iter().map(|v| c * *v).collect();
        let b: Vec<T> = self.beta.iter().map(|v| c * *v).collect();
        let env = gronwall_envelope(rows, &self.y, &a, &b);
        self.y.iter().copied().zip(env).collect()
    }

    fn holds(&self, rows: &[LedgerRow<T>], c: T, tol: T) -> bool {
        self.pairs(rows, c).iter().all(|(l, b)| residual(*l, *b) <= tol)
    }

    /// Smallest constant for which the envelope holds, by bisection.
    fn fit(&self, rows: &[LedgerRow<T>], tol: T) -> Option<T> {
        if self.holds(rows, T::zero(), tol) {
            return Some(T::zero());
        }
        let mut hi = T::one();
        let mut tries = 0;
        while !self.holds(rows, hi, tol) {
            hi *= T::lit(2.0);
            tries += 1;
            if tries > 200 || !hi.is_finite() {
                return None;
            }
        }
        let mut lo = T::zero();
        for _ in 0..80 {
            let mid = T::lit(0.5) * (lo + hi);
            if self.holds(rows, mid, tol) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

/// Strong-solution envelopes for `y = ‖u‖² + ‖ω‖²` (constant `C₁`) and
/// `y = ‖θ‖²` (constant `C₂`), checked in the integrated Gronwall form.
///
/// The constants are not known numerically; when `None` the fitted minimal
/// constant is used. Checks are informational.
pub fn check_strong_differential<T: Real>(
    ledger: &EnergyLedger<T>,
    c1: Option<T>,
    c2: Option<T>,
    tol: T,
) -> Result<InequalityReport<T>> {
    let rows = ledger.rows();
    if rows.is_empty() {
        return Err(Error::EmptyLedger);
    }
    let mut report = InequalityReport::default();
    for (name, form, given) in [
        ("velocity_microrotation", StrongForm::velocity(rows), c1),
        ("temperature", StrongForm::temperature(rows), c2),
    ] {
        let fitted = form.fit(rows, tol);
        let c = given.or(fitted).unwrap_or(T::infinity());
        let pairs = if c.is_finite() {
            form.pairs(rows, c)
        } else {
            form.y.iter().map(|y| (*y, T::infinity())).collect()
        };
        report.checks.push(Check::from_pairs(name, rows, &pairs, tol, false));
        report.info.push((format!("{name}.constant_used"), c));
        report
            .info
            .push((format!("{name}.constant_fitted"), fitted.unwrap_or(T::infinity())));
        let env = pairs.last().map(|p| p.1).unwrap_or(T::zero());
        report.info.push((format!("{name}.envelope_final"), env));
    }
    Ok(report)
}
