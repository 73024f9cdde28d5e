use std::io::{BufRead, Write};

use crate::dynamics::{State, StateNorms};
use crate::error::{Error, Result};
use crate::real::Real;

pub const COLUMNS: [&str; 12] = [
    "t",
    "u_l2sq",
    "u_h1sq",
    "u_stokes_sq",
    "omega_l2sq",
    "omega_h1sq",
    "omega_a_sq",
    "theta_l2sq",
    "theta_h1sq",
    "theta_a_sq",
    "y",
    "y_strong",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LedgerRow<T> {
    pub t: T,
    pub norms: StateNorms<T>,
    pub y: T,
    pub y_strong: T,
}

impl<T: Real> LedgerRow<T> {
    pub fn new(t: T, norms: StateNorms<T>) -> Self {
        Self {
            t,
            norms,
            y: norms.y(),
            y_strong: norms.y_strong(),
        }
    }

    pub fn values(&self) -> [T; 12] {
        let n = &self.norms;
        [
            self.t,
            n.u_l2sq,
            n.u_h1sq,
            n.u_stokes_sq,
            n.omega_l2sq,
            n.omega_h1sq,
            n.omega_a_sq,
            n.theta_l2sq,
            n.theta_h1sq,
            n.theta_a_sq,
            self.y,
            self.y_strong,
        ]
    }

    fn from_values(v: &[T; 12]) -> Self {
        Self {
            t: v[0],
            norms: StateNorms {
                u_l2sq: v[1],
                u_h1sq: v[2],
                u_stokes_sq: v[3],
                omega_l2sq: v[4],
                omega_h1sq: v[5],
                omega_a_sq: v[6],
                theta_l2sq: v[7],
                theta_h1sq: v[8],
                theta_a_sq: v[9],
            },
            y: v[10],
            y_strong: v[11],
        }
    }
}

/// Time series of the norms entering the energy estimates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyLedger<T> {
    rows: Vec<LedgerRow<T>>,
}

impl<T: Real> EnergyLedger<T> {
    pub fn new() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn rows(&self) -> &[LedgerRow<T>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a row, enforcing increasing time and finite nonnegative entries.
    pub fn push(&mut self, row: LedgerRow<T>) -> Result<()> {
        let v = row.values();
        if let Some(bad) = v.iter().position(|x| !x.is_finite() || (*x < T::zero())) {
            return Err(Error::Ledger(format!(
                "column {} = {} at t = {}",
                COLUMNS[bad], v[bad], row.t
            )));
        }
        if let Some(last) = self.rows.last() {
            if row.t <= last.t {
                return Err(Error::Ledger(format!("time {} not after {}", row.t, last.t)));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn push_state(&mut self, s: &State<T>) -> Result<()> {
        self.push(LedgerRow::new(s.t, s.norms()?))
    }

    /// Rows with `t ≥ t0`.
    pub fn since(&self, t0: T) -> &[LedgerRow<T>] {
        let start = self.rows.iter().position(|r| r.t >= t0).unwrap_or(self.rows.len());
        &self.rows[start..]
    }

    /// CSV with a header row and 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", COLUMNS.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row
                .values()
                .iter()
                .map(|v| format!("{:.16e}", v.to_f64_lossy()))
                .collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Ledger("missing header".into()))??;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols != COLUMNS {
            return Err(Error::Ledger(format!("unexpected header {header:?}")));
        }
        let mut ledger = Self::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut v = [T::zero(); 12];
            let mut fields = line.trim().split(',');
            for (slot, name) in v.iter_mut().zip(COLUMNS) {
                let f = fields
                    .next()
                    .ok_or_else(|| Error::Ledger(format!("row {}: missing column {name}", i + 1)))?;
                let x: f64 = f
                    .trim()
                    .parse()
                    .map_err(|e| Error::Ledger(format!("row {}: column {name}: {e}", i + 1)))?;
                *slot = T::lit(x);
            }
            if fields.next().is_some() {
                return Err(Error::Ledger(format!("row {}: too many columns", i + 1)));
            }
            ledger.push(LedgerRow::from_values(&v))?;
        }
        Ok(ledger)
    }
}
