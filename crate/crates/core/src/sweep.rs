//! Parameter sweeps, figure tables and root finding on fidelity curves.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::entanglement::{
    self, concurrence_nmes_closed, concurrence_noes_closed, concurrence_werner_closed,
    negativity_nonorth_closed, nu_nonorth_closed,
};
use crate::error::{Error, Result};
use crate::states::{epsilon_bound, g_from_epsilon, g_threshold, ChannelKind, ChannelParams};
use crate::teleport::{
    self, avg_fidelity_nmes_closed, avg_fidelity_noes_closed, avg_fidelity_nonorth_closed,
    avg_fidelity_rho_new_closed, avg_fidelity_werner_closed, fidelity_nmes_closed,
    fidelity_noes_closed, AveragingMethod, CLASSICAL_FIDELITY,
};

/// Significant digits used for every emitted float.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Target residual for threshold and crossing bisection.
pub const ROOT_TOL: f64 = 1e-10;

const SCAN_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    R,
    Theta,
    P,
    S,
    G,
    Eps,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::R => "r",
            Param::Theta => "theta",
            Param::P => "p",
            Param::S => "s",
            Param::G => "g",
            Param::Eps => "eps",
        }
    }
}

impl FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "r" => Param::R,
            "theta" => Param::Theta,
            "p" => Param::P,
            "s" => Param::S,
            "g" => Param::G,
            "eps" | "epsilon" => Param::Eps,
            other => return Err(Error::InvalidSweep(format!("unknown parameter `{other}`"))),
        })
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters a family accepts; the first entry is required unless noted in `resolve_params`.
pub fn family_params(kind: ChannelKind) -> &'static [Param] {
    match kind {
        ChannelKind::Noes => &[Param::R, Param::Theta],
        ChannelKind::Werner | ChannelKind::RhoNew => &[Param::P],
        ChannelKind::Nmes => &[Param::S],
        ChannelKind::NonorthMixed => &[Param::R, Param::Theta, Param::G, Param::Eps],
    }
}

/// Turn named values into channel parameters. `theta` defaults to 0; the
/// non-orthogonal mixture takes exactly one of `g` or `eps`.
pub fn resolve_params(kind: ChannelKind, values: &BTreeMap<Param, f64>) -> Result<ChannelParams> {
    let allowed = family_params(kind);
    if let Some(extra) = values.keys().find(|p| !allowed.contains(p)) {
        return Err(Error::InvalidSweep(format!(
            "parameter `{extra}` does not apply to channel `{kind}`"
        )));
    }
    let need = |p: Param| {
        values
            .get(&p)
            .copied()
            .ok_or_else(|| Error::InvalidSweep(format!("channel `{kind}` needs `{p}`")))
    };
    let theta = values.get(&Param::Theta).copied().unwrap_or(0.0);
    Ok(match kind {
        ChannelKind::Noes => ChannelParams::Noes {
            r: need(Param::R)?,
            theta,
        },
        ChannelKind::Werner => ChannelParams::Werner { p: need(Param::P)? },
        ChannelKind::Nmes => ChannelParams::Nmes { s: need(Param::S)? },
        ChannelKind::RhoNew => ChannelParams::RhoNew { p: need(Param::P)? },
        ChannelKind::NonorthMixed => {
            let r = need(Param::R)?;
            let g = match (values.get(&Param::G), values.get(&Param::Eps)) {
                (Some(&g), None) => g,
                (None, Some(&eps)) => g_from_epsilon(r, eps)?,
                _ => {
                    return Err(Error::InvalidSweep(
                        "nonorth-mixed needs exactly one of `g` or `eps`".into(),
                    ))
                }
            };
            ChannelParams::NonorthMixed { r, theta, g }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// 2 sqrt(det) for pure channels, Wootters otherwise.
    Concurrence,
    /// 2 sqrt(det) only; rejects mixed channels.
    ConcurrencePure,
    ConcurrenceClosed,
    Negativity,
    NegativityClosed,
    Nu,
    NuClosed,
    AvgFidelityClosed,
    AvgFidelityNumeric,
    AvgFidelityHorodecki,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Concurrence => "concurrence",
            Metric::ConcurrencePure => "concurrence_pure",
            Metric::ConcurrenceClosed => "concurrence_closed",
            Metric::Negativity => "negativity",
            Metric::NegativityClosed => "negativity_closed",
            Metric::Nu => "nu",
            Metric::NuClosed => "nu_closed",
            Metric::AvgFidelityClosed => "avg_fidelity_closed",
            Metric::AvgFidelityNumeric => "avg_fidelity_numeric",
            Metric::AvgFidelityHorodecki => "avg_fidelity_horodecki",
        }
    }

    pub const ALL: [Metric; 10] = [
        Metric::Concurrence,
        Metric::ConcurrencePure,
        Metric::ConcurrenceClosed,
        Metric::Negativity,
        Metric::NegativityClosed,
        Metric::Nu,
        Metric::NuClosed,
        Metric::AvgFidelityClosed,
        Metric::AvgFidelityNumeric,
        Metric::AvgFidelityHorodecki,
    ];

    /// Reject metric/family pairs that can never be evaluated.
    pub fn check_applicable(self, kind: ChannelKind) -> Result<()> {
        let reason = match (self, kind) {
            (Metric::ConcurrencePure, k) if !k.is_pure() => "channel is mixed",
            (Metric::ConcurrenceClosed, ChannelKind::NonorthMixed | ChannelKind::RhoNew) => {
                "no closed-form concurrence for this family"
            }
            (Metric::NegativityClosed | Metric::NuClosed, k) if k != ChannelKind::NonorthMixed => {
                "closed form exists only for nonorth-mixed"
            }
            _ => return Ok(()),
        };
        Err(Error::InapplicableMetric {
            metric: self.name(),
            channel: kind.name(),
            reason: reason.into(),
        })
    }

    pub fn evaluate(self, params: &ChannelParams, numeric: AveragingMethod) -> Result<f64> {
        self.check_applicable(params.kind())?;
        match self {
            Metric::ConcurrenceClosed => Ok(match *params {
                ChannelParams::Noes { r, .. } => concurrence_noes_closed(r),
                ChannelParams::Werner { p } => concurrence_werner_closed(p),
                ChannelParams::Nmes { s } => concurrence_nmes_closed(s),
                _ => unreachable!("checked above"),
            }),
            Metric::NegativityClosed | Metric::NuClosed => {
                let ChannelParams::NonorthMixed { r, g, .. } = *params else {
                    unreachable!("checked above")
                };
                Ok(if self == Metric::NegativityClosed {
                    negativity_nonorth_closed(r, g)
                } else {
                    nu_nonorth_closed(r, g - g_threshold(r))
                })
            }
            Metric::AvgFidelityClosed => Ok(teleport::avg_fidelity_closed(params)?.value),
            _ => {
                let channel = params.build()?;
                match self {
                    Metric::Concurrence => Ok(entanglement::report(&channel)?.concurrence),
                    Metric::ConcurrencePure => {
                        entanglement::concurrence_pure(channel.pure_vector().expect("checked pure"))
                    }
                    Metric::Negativity => entanglement::negativity(channel.rho()),
                    Metric::Nu => entanglement::horodecki_nu(channel.rho()),
                    Metric::AvgFidelityNumeric => {
                        Ok(teleport::avg_fidelity_numeric(&channel, numeric)?.mean)
                    }
                    Metric::AvgFidelityHorodecki => teleport::avg_fidelity_horodecki(&channel),
                    _ => unreachable!("closed metrics handled above"),
                }
            }
        }
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidSweep(format!("unknown metric `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: ChannelKind,
    pub param: Param,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub metrics: Vec<Metric>,
    pub fixed: BTreeMap<Param, f64>,
    /// Used by [`Metric::AvgFidelityNumeric`].
    pub numeric: AveragingMethod,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(Error::InvalidSweep(format!(
                "need from < to, got {} .. {}",
                self.from, self.to
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidSweep("steps must be at least 2".into()));
        }
        if self.metrics.is_empty() {
            return Err(Error::InvalidSweep("no metrics requested".into()));
        }
        if !family_params(self.family).contains(&self.param) {
            return Err(Error::InvalidSweep(format!(
                "parameter `{}` does not apply to channel `{}`",
                self.param, self.family
            )));
        }
        if self.fixed.contains_key(&self.param) {
            return Err(Error::InvalidSweep(format!(
                "`{}` is both swept and fixed",
                self.param
            )));
        }
        for m in &self.metrics {
            m.check_applicable(self.family)?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        linspace(self.from, self.to, self.steps)
    }
}

/// `n` points from `a` to `b` inclusive; the endpoints are exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    /// One value per requested metric, in request order.
    pub values: Vec<f64>,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    spec.grid()
        .into_par_iter()
        .map(|t| {
            let mut values = spec.fixed.clone();
            values.insert(spec.param, t);
            let params = resolve_params(spec.family, &values)?;
            let metrics = spec
                .metrics
                .iter()
                .map(|m| m.evaluate(&params, spec.numeric))
                .collect::<Result<Vec<f64>>>()?;
            if let Some(bad) = metrics.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidSweep(format!(
                    "non-finite value {bad} at {} = {t}",
                    spec.param
                )));
            }
            Ok(SweepRow {
                param: t,
                values: metrics,
            })
        })
        .collect()
}

pub fn sweep_table(spec: &SweepSpec, rows: &[SweepRow]) -> Table {
    let mut columns = vec!["param".to_string()];
    columns.extend(spec.metrics.iter().map(|m| m.name().to_string()));
    Table {
        columns,
        rows: rows
            .iter()
            .map(|r| {
                std::iter::once(Some(r.param))
                    .chain(r.values.iter().copied().map(Some))
                    .collect()
            })
            .collect(),
    }
}

/// Rectangular numeric table; `None` marks an omitted cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Header plus rows, LF endings, empty field for omitted cells.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| c.map(format_value).unwrap_or_default())
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// C `%.12g`: 12 significant digits, trailing zeros trimmed.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = SIGNIFICANT_DIGITS;
    // the exponent after rounding decides fixed vs scientific
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
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

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FigureId(u8);

impl FigureId {
    pub fn new(id: u8) -> Result<Self> {
        if (1..=5).contains(&id) {
            Ok(Self(id))
        } else {
            Err(Error::OutOfRange {
                name: "figure id",
                value: id as f64,
                expected: "1..=5".into(),
            })
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Epsilon used by figures 4 and 5 when none is given.
    pub fn default_eps(self) -> Option<f64> {
        match self.0 {
            4 => Some(0.2),
            5 => Some(0.4),
            _ => None,
        }
    }
}

/// Data behind each figure, on a shared parameter `t` in [0, 1].
pub fn figure_dataset(fig: FigureId, points: usize, eps: Option<f64>) -> Result<Table> {
    if points < 10 {
        return Err(Error::InvalidSampleCount {
            n: points,
            reason: "figures need at least 10 points",
        });
    }
    let grid = linspace(0.0, 1.0, points);
    let cols = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let table = match fig.get() {
        1 => Table {
            columns: cols(&["t", "f_noes", "f_werner", "f_nmes"]),
            rows: grid
                .iter()
                .map(|&t| {
                    vec![
                        Some(t),
                        Some(avg_fidelity_noes_closed(t)),
                        Some(avg_fidelity_werner_closed(t)),
                        Some(avg_fidelity_nmes_closed(t)),
                    ]
                })
                .collect(),
        },
        2 => Table {
            columns: cols(&["t", "c_noes", "c_werner", "c_nmes"]),
            rows: grid
                .iter()
                .map(|&t| {
                    vec![
                        Some(t),
                        Some(concurrence_noes_closed(t)),
                        Some(concurrence_werner_closed(t)),
                        Some(concurrence_nmes_closed(t)),
                    ]
                })
                .collect(),
        },
        3 => Table {
            columns: cols(&["t", "c_noes", "f_noes", "c_nmes", "f_nmes"]),
            rows: grid
                .iter()
                .map(|&t| {
                    vec![
                        Some(t),
                        Some(concurrence_noes_closed(t)),
                        Some(avg_fidelity_noes_closed(t)),
                        Some(concurrence_nmes_closed(t)),
                        Some(avg_fidelity_nmes_closed(t)),
                    ]
                })
                .collect(),
        },
        _ => {
            let eps = eps
                .or(fig.default_eps())
                .expect("figs 4 and 5 have defaults");
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::OutOfRange {
                    name: "eps",
                    value: eps,
                    expected: "eps > 0".into(),
                });
            }
            Table {
                columns: cols(&[
                    "t",
                    "f_nonorth",
                    "nonorth_admissible",
                    "f_rho_new",
                    "rho_new_at_bound",
                    "classical",
                ]),
                rows: grid
                    .iter()
                    .map(|&t| {
                        let admissible = t < 1.0 && eps <= epsilon_bound(t) + 1e-12;
                        let rn = avg_fidelity_rho_new_closed(t);
                        vec![
                            Some(t),
                            admissible.then(|| avg_fidelity_nonorth_closed(t, eps)),
                            Some(if admissible { 1.0 } else { 0.0 }),
                            Some(rn.value),
                            Some(if rn.at_classical_bound { 1.0 } else { 0.0 }),
                            Some(CLASSICAL_FIDELITY),
                        ]
                    })
                    .collect(),
            }
        }
    };
    Ok(table)
}

/// gnuplot script plotting `csv_name` (path relative to the script).
pub fn gnuplot_script(fig: FigureId, csv_name: &str, table: &Table) -> String {
    let (xlabel, ylabel, series): (&str, &str, Vec<(usize, usize)>) = match fig.get() {
        1 => (
            "channel parameter",
            "average fidelity",
            vec![(1, 2), (1, 3), (1, 4)],
        ),
        2 => (
            "channel parameter",
            "concurrence",
            vec![(1, 2), (1, 3), (1, 4)],
        ),
        3 => ("concurrence", "average fidelity", vec![(2, 3), (4, 5)]),
        _ => (
            "channel parameter",
            "average fidelity",
            vec![(1, 2), (1, 4), (1, 6)],
        ),
    };
    let mut s = String::new();
    let _ = writeln!(s, "# figure {}", fig.get());
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set xlabel '{xlabel}'");
    let _ = writeln!(s, "set ylabel '{ylabel}'");
    let _ = writeln!(s, "set terminal pngcairo size 800,600");
    let _ = writeln!(s, "set output 'fig{}.png'", fig.get());
    let plots: Vec<String> = series
        .iter()
        .map(|&(x, y)| {
            let style = if table.columns[y - 1] == "classical" {
                "lines dashtype 2"
            } else {
                "lines"
            };
            format!(
                "'{csv_name}' using {x}:{y} with {style} title '{}'",
                table.columns[y - 1]
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

/// Named one-parameter curves on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    NoesPoint { ysq: f64 },
    NmesPoint { ysq: f64 },
    NoesAvg,
    WernerAvg,
    NmesAvg,
    NonorthAvg { eps: f64 },
    RhoNewAvg,
}

impl Curve {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Curve::NoesPoint { ysq } => fidelity_noes_closed(t, ysq),
            Curve::NmesPoint { ysq } => fidelity_nmes_closed(t, ysq),
            Curve::NoesAvg => avg_fidelity_noes_closed(t),
            Curve::WernerAvg => avg_fidelity_werner_closed(t),
            Curve::NmesAvg => avg_fidelity_nmes_closed(t),
            Curve::NonorthAvg { eps } => avg_fidelity_nonorth_closed(t, eps),
            Curve::RhoNewAvg => avg_fidelity_rho_new_closed(t).value,
        }
    }
}

/// Where `f` meets `target` on `[lo, hi]`. `f` must be monotone there.
pub fn find_threshold(f: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64) -> Result<f64> {
    let grid = linspace(lo, hi, SCAN_POINTS);
    let vals: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let rising = vals.windows(2).all(|w| w[1] >= w[0] - 1e-15);
    let falling = vals.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    if !(rising || falling) {
        let idx = vals
            .windows(3)
            .position(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0)
            .unwrap_or(0);
        return Err(Error::NotMonotone(grid[idx + 1]));
    }
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a) - target, f(b) - target);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::ThresholdNotBracketed { lo, hi });
    }
    bisect(|t| f(t) - target, &mut a, &mut b, fa);
    Ok(0.5 * (a + b))
}

/// Single interior crossing of `f` and `g` on `[lo, hi]`.
pub fn find_crossing(
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let d = |t: f64| f(t) - g(t);
    let grid = linspace(lo, hi, SCAN_POINTS);
    let mut brackets = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for &t in &grid {
        let v = d(t);
        if v == 0.0 {
            continue;
        }
        if let Some((t0, v0)) = last {
            if v0.signum() != v.signum() {
                brackets.push((t0, t));
            }
        }
        last = Some((t, v));
    }
    if brackets.len() != 1 {
        return Err(Error::CrossingCount { brackets });
    }
    let (mut a, mut b) = brackets[0];
    let fa = d(a);
    bisect(d, &mut a, &mut b, fa);
    Ok(0.5 * (a + b))
}

fn bisect(h: impl Fn(f64) -> f64, a: &mut f64, b: &mut f64, mut ha: f64) {
    for _ in 0..200 {
        let mid = 0.5 * (*a + *b);
        if mid <= *a || mid >= *b {
            break;
        }
        let hm = h(mid);
        if hm == 0.0 {
            *a = mid;
            *b = mid;
            break;
        }
        if hm.signum() == ha.signum() {
            *a = mid;
            ha = hm;
        } else {
            *b = mid;
        }
    }
}
