//! Parameter sweeps over `(a, t)` grids, closed-form comparison, the
//! verification suite behind `qswitch verify`, and CSV/JSON output.
//!
//! The input register is `|A 0 1>` with `|A> = sin(a)|0> + cos(a)|1>`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channels::{
    average_fidelity_closed, average_fidelity_monte_carlo, average_fidelity_numeric, make_channel,
    ChannelKind,
};
use crate::entanglement::{self as ent, LogBase, Side};
use crate::error::{Error, Result};
use crate::qmatrix::C64;
use crate::qstate::{qubit_from_angle, tensor, DensityMatrix, PureState};
use crate::qswitch;

/// Default tolerance of `verify` for every measure except average fidelity.
pub const DEFAULT_TOL: f64 = 1e-9;
pub const AVG_FIDELITY_TOL: f64 = 1e-10;
pub const PF_BF_TOL: f64 = 1e-12;
/// Decoherence probability used when none is given.
pub const DEFAULT_P: f64 = 0.74;
pub const MONTE_CARLO_SAMPLES: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    Schmidt,
    Ppt,
    Concurrence,
    Iconcurrence,
    Entropy,
    Fidelity,
    AvgFidelity,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::Schmidt,
        Measure::Ppt,
        Measure::Concurrence,
        Measure::Iconcurrence,
        Measure::Entropy,
        Measure::Fidelity,
        Measure::AvgFidelity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Schmidt => "schmidt",
            Measure::Ppt => "ppt",
            Measure::Concurrence => "concurrence",
            Measure::Iconcurrence => "iconcurrence",
            Measure::Entropy => "entropy",
            Measure::Fidelity => "fidelity",
            Measure::AvgFidelity => "avg_fidelity",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| {
                let names: Vec<_> = Measure::ALL.iter().map(|m| m.name()).collect();
                Error::Config(format!("unknown measure '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

/// Evenly spaced points from `min` to `max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Axis> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::Config(format!("range bounds must be finite, got {min}..{max}")));
        }
        if min > max {
            return Err(Error::Config(format!("range minimum {min} exceeds maximum {max}")));
        }
        if steps == 0 || (steps == 1 && min != max) {
            return Err(Error::Config(format!("a range {min}..{max} needs at least 2 steps")));
        }
        Ok(Axis { min, max, steps })
    }

    pub fn single(x: f64) -> Result<Axis> {
        Axis::new(x, x, 1)
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i == self.steps - 1 {
                    self.max
                } else {
                    self.min + (self.max - self.min) * (i as f64 / last)
                }
            })
            .collect()
    }
}

/// Channel applied to the instantaneous state: kind, probability and the
/// qubit it acts on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub p: f64,
    pub qubit: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub measure: Measure,
    /// Angle of `|A>`; for `avg_fidelity` this axis carries `p` instead.
    pub a: Axis,
    pub t: Axis,
    pub channel: Option<ChannelSpec>,
    pub log_base: LogBase,
    pub compare: bool,
    pub seed: u64,
    /// Added to every closed-form value; nonzero only to check that
    /// verification notices a wrong formula.
    pub closed_offset: f64,
}

impl SweepConfig {
    pub fn new(measure: Measure) -> SweepConfig {
        SweepConfig {
            measure,
            a: Axis { min: 0.0, max: FRAC_PI_2, steps: 21 },
            t: Axis { min: 0.0, max: FRAC_PI_2, steps: 101 },
            channel: None,
            log_base: LogBase::E,
            compare: false,
            seed: 0,
            closed_offset: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        Axis::new(self.a.min, self.a.max, self.a.steps)?;
        Axis::new(self.t.min, self.t.max, self.t.steps)?;
        if self.t.steps < 2 {
            return Err(Error::Config("the time axis needs at least 2 steps".into()));
        }
        if let Some(ch) = self.channel {
            if !(0.0..=1.0).contains(&ch.p) {
                return Err(Error::Probability(ch.p));
            }
        }
        match (self.measure, self.channel) {
            (Measure::Schmidt | Measure::Fidelity, Some(_)) => Err(Error::Config(format!(
                "{} is defined for pure states only; drop --channel",
                self.measure
            ))),
            (Measure::AvgFidelity, None) => Err(Error::Config(
                "avg_fidelity compares a noisy switch with the ideal one; --channel is required".into(),
            )),
            (Measure::AvgFidelity, Some(ch)) if ch.qubit > 2 => Err(Error::Config(format!(
                "noise qubit {} out of range for the 3-qubit register",
                ch.qubit
            ))),
            (Measure::AvgFidelity, Some(_)) if self.a.min < 0.0 => Err(Error::Probability(self.a.min)),
            (Measure::AvgFidelity, Some(_)) if self.a.max > 1.0 => Err(Error::Probability(self.a.max)),
            (Measure::AvgFidelity, Some(_)) => Ok(()),
            (_, Some(ch)) if ch.qubit > 1 => Err(Error::Config(format!(
                "noise qubit {} out of range: the measured pair is qubits 0 (A) and 1 (B)",
                ch.qubit
            ))),
            _ => Ok(()),
        }
    }

    fn grid(&self) -> Vec<(f64, f64)> {
        let ts = self.t.points();
        self.a
            .points()
            .into_iter()
            .flat_map(|a| ts.iter().map(move |&t| (a, t)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub a: f64,
    pub value: f64,
    pub value_closed: Option<f64>,
    pub abs_err: Option<f64>,
}

impl SweepRow {
    fn new(a: f64, t: f64, value: f64, value_closed: Option<f64>) -> SweepRow {
        SweepRow {
            t,
            a,
            value,
            value_closed,
            abs_err: value_closed.map(|c| (value - c).abs()),
        }
    }
}

fn amplitudes(a: f64) -> (C64, C64) {
    (C64::new(a.sin(), 0.0), C64::new(a.cos(), 0.0))
}

fn pair_state(a: f64, t: f64, channel: Option<ChannelSpec>) -> Result<DensityMatrix> {
    let (alpha0, beta0) = amplitudes(a);
    match channel {
        None => Ok(ent::switch_pair_state_evolved(alpha0, beta0, t)?.to_density()),
        Some(ch) => ent::noisy_switch_pair(ch.kind, ch.p, ch.qubit, alpha0, beta0, t),
    }
}

/// Numeric value and, where one exists, the closed form at one grid point.
fn evaluate(cfg: &SweepConfig, a: f64, t: f64, channel: Option<ChannelSpec>) -> Result<(f64, Option<f64>)> {
    let (alpha0, beta0) = amplitudes(a);
    let clean = channel.is_none();
    let out = match cfg.measure {
        Measure::Schmidt => {
            let psi = ent::switch_pair_state_evolved(alpha0, beta0, t)?;
            let num = ent::schmidt_coefficients(&psi)?.lambda0;
            (num, Some(ent::schmidt_closed(beta0, t).lambda0))
        }
        Measure::Fidelity => {
            let register = tensor(&[qubit_from_angle(a), PureState::basis(1, 0)?, PureState::basis(1, 1)?])?;
            let num = qswitch::switch_fidelity(&register, t)?;
            (num, Some(qswitch::switch_fidelity_closed_a01(alpha0.re, beta0.re, t)))
        }
        Measure::Ppt => {
            let num = ent::ppt_min_eigenvalue(&pair_state(a, t, channel)?)?;
            (num, clean.then(|| ent::ppt_closed(alpha0, beta0, t)[0]))
        }
        Measure::Concurrence => {
            let num = ent::concurrence(&pair_state(a, t, channel)?)?;
            (num, clean.then(|| ent::concurrence_closed(beta0, t)))
        }
        Measure::Iconcurrence => {
            let num = ent::iconcurrence(&pair_state(a, t, channel)?, Side::B)?;
            let closed = match channel {
                None => Some(ent::iconcurrence_closed(alpha0, beta0, t)),
                Some(ch) if ch.qubit == 0 => {
                    Some(ent::iconcurrence_noisy_closed(ch.kind, ch.p, t, alpha0, beta0)?)
                }
                Some(_) => None,
            };
            (num, closed)
        }
        Measure::Entropy => {
            let num = ent::reduced_entropy(&pair_state(a, t, channel)?, cfg.log_base)?;
            (num, clean.then(|| ent::reduced_entropy_closed(alpha0, beta0, t, cfg.log_base)))
        }
        Measure::AvgFidelity => {
            let ch = channel.ok_or_else(|| Error::Config("avg_fidelity needs a channel".into()))?;
            // The first axis carries p here.
            let p = a;
            let lifted = make_channel(ch.kind, p)?.lift(ch.qubit, 3)?;
            let num = average_fidelity_numeric(&qswitch::switch_unitary(t).matrix, &lifted)?;
            (num, (ch.qubit == 0).then(|| average_fidelity_closed(ch.kind, p, t)))
        }
    };
    Ok((out.0, out.1.map(|c| c + cfg.closed_offset)))
}

/// One row per grid point in grid order (`a` outer, `t` fastest). The closed
/// form column is filled only when `compare` is set.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    cfg.grid()
        .par_iter()
        .map(|&(a, t)| {
            let (value, closed) = evaluate(cfg, a, t, cfg.channel)?;
            Ok(SweepRow::new(a, t, value, closed.filter(|_| cfg.compare)))
        })
        .collect()
}

/// `|noisy - clean|` per grid point; the closed column holds the same
/// difference of closed forms when both exist.
pub fn diff_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let channel = cfg
        .channel
        .ok_or_else(|| Error::Config("diff needs --channel".into()))?;
    if cfg.measure == Measure::AvgFidelity {
        return Err(Error::Config(
            "diff compares noisy and clean entanglement; avg_fidelity has no clean counterpart".into(),
        ));
    }
    cfg.grid()
        .par_iter()
        .map(|&(a, t)| {
            let (noisy, noisy_closed) = evaluate(cfg, a, t, Some(channel))?;
            let (clean, clean_closed) = evaluate(cfg, a, t, None)?;
            let closed = match (noisy_closed, clean_closed) {
                (Some(x), Some(y)) if cfg.compare => Some((x - y).abs()),
                _ => None,
            };
            Ok(SweepRow::new(a, t, (noisy - clean).abs(), closed))
        })
        .collect()
}

/// Outcome of one verification check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_err: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_err <= self.tol
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: max_err={:.3e} tol={:.3e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.max_err,
            self.tol
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

fn max_abs_err(rows: &[SweepRow]) -> Result<f64> {
    rows.iter().try_fold(0.0f64, |m, r| {
        let e = r
            .abs_err
            .ok_or_else(|| Error::Config("no closed form exists for this configuration".into()))?;
        // NaN must fail the check rather than vanish in max().
        Ok(if e.is_nan() { f64::INFINITY } else { m.max(e) })
    })
}

fn tolerance_for(measure: Measure) -> f64 {
    if measure == Measure::AvgFidelity {
        AVG_FIDELITY_TOL
    } else {
        DEFAULT_TOL
    }
}

/// Checks one configured sweep against its closed form.
pub fn verify_config(cfg: &SweepConfig, tol: Option<f64>) -> Result<Check> {
    let cfg = SweepConfig {
        compare: true,
        ..cfg.clone()
    };
    let rows = run_sweep(&cfg)?;
    let label = match cfg.channel {
        Some(ch) if cfg.measure == Measure::AvgFidelity => {
            format!("{} {} qubit={} (p,t)", cfg.measure, ch.kind, ch.qubit)
        }
        Some(ch) => format!("{} {} p={} qubit={}", cfg.measure, ch.kind, ch.p, ch.qubit),
        None => format!("{} clean", cfg.measure),
    };
    Ok(Check {
        name: format!("{label} {}x{}", cfg.a.steps, cfg.t.steps),
        max_err: max_abs_err(&rows)?,
        tol: tol.unwrap_or_else(|| tolerance_for(cfg.measure)),
    })
}

/// Which closed forms the suite should perturb.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Perturb {
    None,
    Only(Measure),
    All,
}

impl FromStr for Perturb {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Perturb::All),
            "none" => Ok(Perturb::None),
            other => Ok(Perturb::Only(other.parse()?)),
        }
    }
}

/// Size of the deliberate error injected by [`Perturb`].
pub const PERTURBATION: f64 = 1e-6;

impl Perturb {
    fn offset(self, m: Measure) -> f64 {
        match self {
            Perturb::All => PERTURBATION,
            Perturb::Only(x) if x == m => PERTURBATION,
            _ => 0.0,
        }
    }
}

/// The full suite: every clean measure on a 50x50 `(a, t)` grid, average
/// fidelity of all four channels on a 20x20 `(p, t)` grid, phase flip against
/// bit flip, noisy I-concurrence at five probabilities, and a Monte Carlo
/// estimate of the average fidelity.
pub fn verify_suite(seed: u64, log_base: LogBase, perturb: Perturb) -> Result<VerifyReport> {
    let square = Axis { min: 0.0, max: FRAC_PI_2, steps: 50 };
    let unit = Axis { min: 0.0, max: 1.0, steps: 20 };
    let mut checks = Vec::new();

    for m in [
        Measure::Schmidt,
        Measure::Ppt,
        Measure::Concurrence,
        Measure::Iconcurrence,
        Measure::Entropy,
        Measure::Fidelity,
    ] {
        let cfg = SweepConfig {
            a: square,
            t: square,
            log_base,
            closed_offset: perturb.offset(m),
            ..SweepConfig::new(m)
        };
        checks.push(verify_config(&cfg, None)?);
    }

    for kind in ChannelKind::ALL {
        let cfg = SweepConfig {
            a: unit,
            t: Axis { steps: 20, ..square },
            channel: Some(ChannelSpec { kind, p: DEFAULT_P, qubit: 0 }),
            closed_offset: perturb.offset(Measure::AvgFidelity),
            ..SweepConfig::new(Measure::AvgFidelity)
        };
        checks.push(verify_config(&cfg, None)?);
    }

    checks.push(phase_flip_equals_bit_flip(unit, Axis { steps: 20, ..square })?);

    for kind in ChannelKind::ALL {
        let mut worst = 0.0f64;
        for p in [0.0, 0.25, 0.5, DEFAULT_P, 1.0] {
            let cfg = SweepConfig {
                channel: Some(ChannelSpec { kind, p, qubit: 0 }),
                closed_offset: perturb.offset(Measure::Iconcurrence),
                ..SweepConfig::new(Measure::Iconcurrence)
            };
            worst = worst.max(verify_config(&cfg, None)?.max_err);
        }
        checks.push(Check {
            name: format!("iconcurrence {kind} p in {{0,0.25,0.5,0.74,1}} qubit=0 21x101"),
            max_err: worst,
            tol: DEFAULT_TOL,
        });
    }

    for kind in ChannelKind::ALL {
        checks.push(monte_carlo_check(kind, seed, perturb.offset(Measure::AvgFidelity))?);
    }
    Ok(VerifyReport { checks })
}

fn phase_flip_equals_bit_flip(ps: Axis, ts: Axis) -> Result<Check> {
    let mut worst = 0.0f64;
    for p in ps.points() {
        let pf = make_channel(ChannelKind::PhaseFlip, p)?.lift(0, 3)?;
        let bf = make_channel(ChannelKind::BitFlip, p)?.lift(0, 3)?;
        for t in ts.points() {
            let u = qswitch::switch_unitary(t).matrix;
            let d = (average_fidelity_numeric(&u, &pf)? - average_fidelity_numeric(&u, &bf)?).abs();
            worst = worst.max(d);
        }
    }
    Ok(Check {
        name: format!("avg_fidelity pf vs bf {}x{}", ps.steps, ts.steps),
        max_err: worst,
        tol: PF_BF_TOL,
    })
}

/// Haar sampling against the closed form at `p = 0.74`, `t = pi/3`, with a
/// tolerance of three standard errors.
pub fn monte_carlo_check(kind: ChannelKind, seed: u64, offset: f64) -> Result<Check> {
    let (p, t) = (DEFAULT_P, FRAC_PI_3);
    let lifted = make_channel(kind, p)?.lift(0, 3)?;
    let u = qswitch::switch_unitary(t).matrix;
    let est = average_fidelity_monte_carlo(&u, &lifted, MONTE_CARLO_SAMPLES, seed)?;
    Ok(Check {
        name: format!("avg_fidelity {kind} monte carlo n={} seed={seed}", est.samples),
        max_err: (est.mean - (average_fidelity_closed(kind, p, t) + offset)).abs(),
        tol: 3.0 * est.std_err,
    })
}

/// `%.12g`: 12 significant digits, shortest of fixed or exponent notation,
/// trailing zeros removed, `-0` printed as `0`.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format '{s}' (expected csv or json)"))),
        }
    }
}

fn opt_csv(x: Option<f64>) -> String {
    x.map(format_g12).unwrap_or_default()
}

fn json_num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format_g12(v),
        _ => "null".into(),
    }
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: Format, out: &mut W) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "t,a,value,value_closed,abs_err")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    format_g12(r.t),
                    format_g12(r.a),
                    format_g12(r.value),
                    opt_csv(r.value_closed),
                    opt_csv(r.abs_err)
                )?;
            }
        }
        Format::Json => {
            if rows.is_empty() {
                return writeln!(out, "[]");
            }
            writeln!(out, "[")?;
            for (i, r) in rows.iter().enumerate() {
                let sep = if i + 1 == rows.len() { "" } else { "," };
                writeln!(
                    out,
                    "  {{\"t\": {}, \"a\": {}, \"value\": {}, \"value_closed\": {}, \"abs_err\": {}}}{sep}",
                    json_num(Some(r.t)),
                    json_num(Some(r.a)),
                    json_num(Some(r.value)),
                    json_num(r.value_closed),
                    json_num(r.abs_err)
                )?;
            }
            writeln!(out, "]")?;
        }
    }
    Ok(())
}

/// Writes `rows` to `dest`, or to standard output when `dest` is `None`.
pub fn emit(rows: &[SweepRow], format: Format, dest: Option<&Path>) -> Result<()> {
    match dest {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_rows(rows, format, &mut lock)
                .and_then(|_| lock.flush())
                .map_err(|source| Error::Io { path: "<stdout>".into(), source })
        }
        Some(path) => {
            let io_err = |source| Error::Io { path: path.to_path_buf(), source };
            let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
            write_rows(rows, format, &mut w)
                .and_then(|_| w.flush())
                .map_err(io_err)
        }
    }
}

/// Parses `0.3`, `pi`, `pi/4`, `3pi/8`, `3*pi/8` or `-pi/2`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot parse '{s}' as a number or multiple of pi"));
    let text = s.trim().to_ascii_lowercase();
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, text.as_str()),
    };
    let value = match body.find("pi") {
        None => body.parse::<f64>().map_err(|_| bad())?,
        Some(pos) => {
            let coef = body[..pos].trim_end_matches('*');
            let coef = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
            let rest = &body[pos + 2..];
            let denom = match rest.strip_prefix('/') {
                Some(d) => d.parse::<f64>().map_err(|_| bad())?,
                None if rest.is_empty() => 1.0,
                None => return Err(bad()),
            };
            coef * std::f64::consts::PI / denom
        }
    };
    let value = sign * value;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Parses a single value (one grid point) or `lo:hi` with `steps` points.
pub fn parse_axis(s: &str, steps: usize) -> Result<Axis> {
    match s.split_once(':') {
        Some((lo, hi)) => Axis::new(parse_angle(lo)?, parse_angle(hi)?, steps),
        None => Axis::single(parse_angle(s)?),
    }
}
