//! Experiment drivers and artifact emission.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use micropolar::analysis::{
    check_gronwall_weak, check_strong_differential, continuous_dependence_experiment, default_tolerance,
    estimate_constant, galerkin_convergence_study, ConstantName, EnergyLedger, InequalityReport, KeyValues,
};
use micropolar::dynamics::{
    read_checkpoint, simulate_with, write_checkpoint, History, Integrator, Model, PhysParams, Preset, State,
    StepperConfig,
};
use micropolar::{Discretization64, Resolution};

use crate::config::{Experiment, RunConfig};

pub const LEDGER_FILE: &str = "ledger.csv";
pub const REPORT_FILE: &str = "report.txt";
pub const CHECKPOINT_FILE: &str = "final.ckpt";
pub const RUN_MANIFEST_FILE: &str = "run_manifest.txt";
pub const BASIS_MANIFEST_FILE: &str = "basis_manifest.txt";

/// Exit status and files written by one invocation.
#[derive(Clone, Debug)]
pub struct Outcome {
    /// 0 when every asserted monitor passes, 1 otherwise.
    pub exit_code: i32,
    pub artifacts: Vec<PathBuf>,
    pub summary: String,
}

struct Sink {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Sink {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let p = self.path(name);
        fs::write(&p, body).with_context(|| format!("writing {}", p.display()))
    }
}

fn k1_of(disc: &Discretization64) -> f64 {
    disc.scalar.beta_min().sqrt().recip()
}

/// Whether the weak envelope is a hard check: the absorption step behind it
/// needs `Ra ≥ 1`, and the mixed-regularity preset is report-only.
fn weak_asserted(params: &PhysParams<f64>, preset: Option<Preset>) -> bool {
    params.ra >= 1.0 && preset.is_none_or(Preset::asserts_weak_envelope)
}

/// `t_end/dt` an integer, `dt` at most half the limit at `s0`.
fn auto_dt(model: &Model<f64>, s0: &State<f64>, t_end: f64) -> f64 {
    let target = 0.5 * model.dt_max(s0);
    if t_end <= 0.0 {
        return target;
    }
    let n = (t_end / target).ceil().max(1.0);
    t_end / n
}

fn run_manifest(cfg: &RunConfig, extra: &KeyValues) -> Result<String> {
    let mut kv = KeyValues::new();
    kv.push("micropolar_cli.version", env!("CARGO_PKG_VERSION"));
    kv.push("micropolar.version", micropolar::VERSION);
    kv.push("experiment", serde_json::to_string(&cfg.experiment)?.trim_matches('"'));
    kv.push("seed", cfg.seed);
    kv.push("preset", &cfg.initial.preset);
    kv.push("config", serde_json::to_string(cfg)?);
    kv.extend(extra.clone());
    Ok(kv.render())
}

fn monitors_kv(weak: &InequalityReport<f64>, strong: &InequalityReport<f64>) -> KeyValues {
    let mut kv = weak.key_values("weak");
    kv.extend(strong.key_values("strong"));
    kv.push("weak.overall", if weak.passed() { "pass" } else { "fail" });
    kv
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.experiment {
        Experiment::Simulate => simulate_cmd(cfg),
        Experiment::Verify => verify_cmd(cfg),
        Experiment::Constants => constants_cmd(cfg),
        Experiment::Depend => depend_cmd(cfg),
        Experiment::Converge => converge_cmd(cfg),
        Experiment::Basis => basis_cmd(cfg),
    }
}

fn simulate_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let mut sink = Sink::new(&cfg.output)?;
    let (disc, s0, params, restored, preset) = match &cfg.initial.checkpoint {
        Some(path) => {
            let mut r = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
            let (ck, disc) =
                read_checkpoint::<f64, _>(&mut r).with_context(|| format!("reading {}", path.display()))?;
            (disc, ck.state, ck.params, Some((ck.step, ck.history)), None)
        }
        None => {
            let disc = Discretization64::new(cfg.domain_spec(), cfg.resolution())?;
            let preset = cfg.preset();
            let s0 = preset.initial_state(&disc, cfg.seed, cfg.band())?;
            (disc, s0, cfg.params(), None, Some(preset))
        }
    };
    let model = Model::for_state(&s0, params)?;
    let scheme = cfg.scheme();
    let dt = match (cfg.stepper.dt, &restored) {
        (Some(dt), _) => dt,
        (None, Some((_, Some(h)))) => h.dt,
        (None, _) => auto_dt(&model, &s0, cfg.stepper.t_end),
    };
    let scfg = StepperConfig::new(dt, scheme, cfg.stepper.t_end, cfg.stepper.ledger_stride)?;
    let mut integ = Integrator::new(model, scfg)?;
    let mut history_reused = false;
    if let Some((step, history)) = restored {
        let h = history.filter(|h| h.scheme == scheme && h.dt == dt);
        history_reused = h.is_some();
        integ.restore(step, h.map(|h| h.explicit));
    }
    let (traj, ledger) = simulate_with(&mut integ, &s0)?;

    ledger.write_csv(BufWriter::new(File::create(sink.path(LEDGER_FILE))?))?;
    let history = integ.history().map(|e| History {
        dt,
        scheme,
        explicit: e.clone(),
    });
    let mut w = BufWriter::new(File::create(sink.path(CHECKPOINT_FILE))?);
    write_checkpoint(&mut w, &params, &traj.final_state, integ.index(), history.as_ref())?;
    w.flush()?;

    let tol = cfg.monitors.tolerance.unwrap_or_else(|| default_tolerance(dt));
    let asserted = weak_asserted(&params, preset);
    let weak = check_gronwall_weak(&ledger, &params, k1_of(&disc), tol, asserted)?;
    let strong = check_strong_differential(&ledger, cfg.monitors.strong_c1, cfg.monitors.strong_c2, tol)?;
    let mut kv = monitors_kv(&weak, &strong);
    kv.push("weak.asserted", asserted);
    sink.text(REPORT_FILE, &kv.render())?;

    let mut extra = KeyValues::new();
    extra.push_real("dt", dt);
    extra.push("scheme", scheme);
    extra.push("steps", traj.steps);
    extra.push("resumed", cfg.initial.checkpoint.is_some());
    extra.push("history_reused", history_reused);
    extra.push("params", params);
    sink.text(RUN_MANIFEST_FILE, &run_manifest(cfg, &extra)?)?;
    sink.text(BASIS_MANIFEST_FILE, &disc.manifest())?;

    let pass = weak.passed();
    Ok(Outcome {
        exit_code: if pass { 0 } else { 1 },
        summary: format!(
            "simulate: {} steps to t={:.6}, weak envelope {} ({})",
            traj.steps,
            traj.final_state.t,
            if pass { "pass" } else { "FAIL" },
            if asserted { "asserted" } else { "report-only" }
        ),
        artifacts: sink.written,
    })
}

fn verify_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let Some(path) = &cfg.verify.ledger else {
        bail!("verify needs a ledger (verify.ledger or the LEDGER argument)");
    };
    let ledger = EnergyLedger::<f64>::read_csv(BufReader::new(File::open(path)?))
        .with_context(|| format!("reading {}", path.display()))?;
    let params = cfg.params();
    let disc = Discretization64::new(cfg.domain_spec(), Resolution::new(1, 1, 1))?;
    let spacing = ledger
        .rows()
        .windows(2)
        .map(|w| w[1].t - w[0].t)
        .fold(f64::INFINITY, f64::min);
    let dt = cfg
        .stepper
        .dt
        .unwrap_or(if spacing.is_finite() { spacing } else { 0.0 });
    let tol = cfg.monitors.tolerance.unwrap_or_else(|| default_tolerance(dt));
    let asserted = weak_asserted(&params, Some(cfg.preset()));
    let weak = check_gronwall_weak(&ledger, &params, k1_of(&disc), tol, asserted)?;
    let strong = check_strong_differential(&ledger, cfg.monitors.strong_c1, cfg.monitors.strong_c2, tol)?;
    let mut sink = Sink::new(&cfg.output)?;
    let mut kv = monitors_kv(&weak, &strong);
    kv.push("weak.asserted", asserted);
    kv.push("ledger", path.display());
    sink.text("verify_report.txt", &kv.render())?;
    let pass = weak.passed();
    Ok(Outcome {
        exit_code: if pass { 0 } else { 1 },
        summary: format!(
            "verify: {} rows, weak envelope {}",
            ledger.len(),
            if pass { "pass" } else { "FAIL" }
        ),
        artifacts: sink.written,
    })
}

fn constants_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let mut kv = KeyValues::new();
    kv.push("constants.seed", cfg.seed);
    for name in &cfg.constants.names {
        let name: ConstantName = name.parse()?;
        let est = estimate_constant(
            name,
            cfg.constants.trials,
            cfg.domain_spec(),
            cfg.resolution(),
            cfg.seed,
        )?;
        kv.extend(est.key_values());
    }
    let mut sink = Sink::new(&cfg.output)?;
    sink.text("constants.txt", &kv.render())?;
    Ok(Outcome {
        exit_code: 0,
        summary: kv.render(),
        artifacts: sink.written,
    })
}

fn depend_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let disc = Discretization64::new(cfg.domain_spec(), cfg.resolution())?;
    let s0 = cfg.preset().initial_state(&disc, cfg.seed, cfg.band())?;
    let params = cfg.params();
    let model = Model::for_state(&s0, params)?;
    let dt = cfg
        .stepper
        .dt
        .unwrap_or_else(|| auto_dt(&model, &s0, cfg.stepper.t_end));
    let scfg = StepperConfig::new(dt, cfg.scheme(), cfg.stepper.t_end, cfg.stepper.ledger_stride)?;
    let mut sink = Sink::new(&cfg.output)?;
    let mut kv = KeyValues::new();
    kv.push_real("depend.dt", dt);
    let mut sups = Vec::new();
    for (i, delta) in cfg.depend.deltas.iter().enumerate() {
        // The perturbation direction is seeded from the run seed.
        let r = continuous_dependence_experiment(&s0, *delta, &params, &scfg, cfg.seed)?;
        for (k, v) in r.key_values().entries() {
            kv.push(k.replacen("depend.", &format!("depend.{i}."), 1), v);
        }
        sink.text(&format!("depend_{i}.csv"), &r.csv())?;
        sups.push((*delta, r.sup_mixed));
    }
    for (i, w) in sups.windows(2).enumerate() {
        if w[1].0 > 0.0 && w[1].1 > 0.0 {
            kv.push_real(format!("depend.scaling.{i}"), (w[0].1 / w[1].1) / (w[0].0 / w[1].0));
        }
    }
    sink.text("depend.txt", &kv.render())?;
    Ok(Outcome {
        exit_code: 0,
        summary: kv.render(),
        artifacts: sink.written,
    })
}

fn converge_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let resolutions: Vec<Resolution> = cfg
        .converge
        .resolutions
        .iter()
        .map(|n| Resolution::uniform(*n))
        .collect();
    let finest = Discretization64::new(cfg.domain_spec(), *resolutions.last().expect("validated"))?;
    let preset = cfg.preset();
    let params = cfg.params();
    let s0 = preset.initial_state(&finest, cfg.seed, cfg.band())?;
    let model = Model::for_state(&s0, params)?;
    let dt = cfg
        .stepper
        .dt
        .unwrap_or_else(|| auto_dt(&model, &s0, cfg.stepper.t_end));
    let scfg = StepperConfig::new(dt, cfg.scheme(), cfg.stepper.t_end, cfg.stepper.ledger_stride)?;
    let report = galerkin_convergence_study(
        preset,
        cfg.seed,
        cfg.band(),
        cfg.domain_spec(),
        &params,
        &scfg,
        &resolutions,
    )?;
    let mut kv = report.key_values();
    kv.push_real("converge.dt", dt);
    let mut sink = Sink::new(&cfg.output)?;
    sink.text("converge.txt", &kv.render())?;
    Ok(Outcome {
        exit_code: if report.monotone() { 0 } else { 1 },
        summary: kv.render(),
        artifacts: sink.written,
    })
}

fn basis_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let disc = Discretization64::new(cfg.domain_spec(), cfg.resolution())?;
    let manifest = disc.manifest();
    let mut sink = Sink::new(&cfg.output)?;
    sink.text(BASIS_MANIFEST_FILE, &manifest)?;
    Ok(Outcome {
        exit_code: 0,
        summary: manifest,
        artifacts: sink.written,
    })
}
