//! Coupling sweeps around the critical point and critical-exponent
//! extraction by log-log least squares.

use std::collections::BTreeSet;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{mean_field_steady_state, Branch, DriftDiffusion, ModelParams, Phase};
use crate::spectral::eigen_spectrum;
use crate::steady::{
    number_fluctuations, purity, quadrature_moments, solve_lyapunov, QuadratureMoments,
    QUADRATURE_LABELS,
};

/// Which side(s) of the transition a sweep covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Normal,
    Superradiant,
    Both,
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(Side::Normal),
            "superradiant" => Ok(Side::Superradiant),
            "both" => Ok(Side::Both),
            other => Err(Error::Domain(format!(
                "unknown side '{other}' (expected normal, superradiant or both)"
            ))),
        }
    }
}

/// Observables a sweep can evaluate. `Quadratures` expands to the nine
/// second moments of [`QuadratureMoments`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Observable {
    Adr,
    ImLambda,
    Dn1,
    Dn2,
    Dnb,
    Purity,
    Quadratures,
}

impl Observable {
    pub const ALL: [Observable; 7] = [
        Observable::Adr,
        Observable::ImLambda,
        Observable::Dn1,
        Observable::Dn2,
        Observable::Dnb,
        Observable::Purity,
        Observable::Quadratures,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Observable::Adr => "adr",
            Observable::ImLambda => "im_lambda",
            Observable::Dn1 => "dn1",
            Observable::Dn2 => "dn2",
            Observable::Dnb => "dnb",
            Observable::Purity => "purity",
            Observable::Quadratures => "quadratures",
        }
    }

    /// Whether this observable needs the covariance solve.
    fn needs_covariance(&self) -> bool {
        !matches!(self, Observable::Adr | Observable::ImLambda)
    }
}

impl FromStr for Observable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .iter()
            .copied()
            .find(|o| o.label() == s)
            .ok_or_else(|| Error::Domain(format!("unknown observable '{s}'")))
    }
}

/// Specification of a coupling sweep: a log-spaced grid of relative
/// distances `eps = |g - g_c| / g_c` on one or both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub side: Side,
    pub rel_eps_min: f64,
    pub rel_eps_max: f64,
    pub points_per_decade: usize,
    pub observables: BTreeSet<Observable>,
}

impl Default for SweepSpec {
    /// The default window used for every exponent table: two decades,
    /// `eps` from 1e-4 to 1e-2, 20 points per decade, everything on.
    fn default() -> Self {
        SweepSpec {
            side: Side::Both,
            rel_eps_min: 1e-4,
            rel_eps_max: 1e-2,
            points_per_decade: 20,
            observables: Observable::ALL.into_iter().collect(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_eps_min > 0.0 && self.rel_eps_max > self.rel_eps_min) {
            return Err(Error::Domain(format!(
                "need 0 < rel_eps_min < rel_eps_max, got [{}, {}]",
                self.rel_eps_min, self.rel_eps_max
            )));
        }
        if self.rel_eps_max >= 1.0 {
            return Err(Error::Domain(format!(
                "rel_eps_max = {} puts the lower sweep edge at g <= 0",
                self.rel_eps_max
            )));
        }
        if self.points_per_decade < 5 {
            return Err(Error::Domain(format!(
                "points_per_decade = {} must be >= 5",
                self.points_per_decade
            )));
        }
        if self.observables.is_empty() {
            return Err(Error::Domain("no observables requested".into()));
        }
        Ok(())
    }

    /// The log-spaced grid `eps_i = eps_min * 10^(i / ppd)`, capped at
    /// `rel_eps_max`.
    pub fn epsilons(&self) -> Vec<f64> {
        let decades = (self.rel_eps_max / self.rel_eps_min).log10();
        let n = (decades * self.points_per_decade as f64).floor() as usize + 1;
        (0..n)
            .map(|i| self.rel_eps_min * 10f64.powf(i as f64 / self.points_per_decade as f64))
            .collect()
    }

    fn phases(&self) -> Vec<Phase> {
        match self.side {
            Side::Normal => vec![Phase::Normal],
            Side::Superradiant => vec![Phase::Superradiant],
            Side::Both => vec![Phase::Normal, Phase::Superradiant],
        }
    }
}

/// Why a sweep row carries no values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    NotHurwitz,
    DegenerateModel,
    NumericalFailure,
}

impl std::fmt::Display for RowStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RowStatus::Ok => "ok",
            RowStatus::NotHurwitz => "not_hurwitz",
            RowStatus::DegenerateModel => "degenerate_model",
            RowStatus::NumericalFailure => "numerical_failure",
        };
        write!(f, "{s}")
    }
}

/// One evaluated grid point. Failed points keep only `g`, `eps`,
/// `phase` and the failure status; unrequested observables stay `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub g: f64,
    pub eps: f64,
    pub phase: Phase,
    pub status: RowStatus,
    pub adr: Option<f64>,
    /// Imaginary part of the slowest eigenvalue (the positive member of
    /// a slow conjugate pair; zero for a real slow mode).
    pub im_lambda_plus: Option<f64>,
    pub dn1: Option<f64>,
    pub dn2: Option<f64>,
    pub dnb: Option<f64>,
    pub purity: Option<f64>,
    pub moments: Option<QuadratureMoments>,
}

impl SweepRow {
    fn failed(g: f64, eps: f64, phase: Phase, status: RowStatus) -> Self {
        SweepRow {
            g,
            eps,
            phase,
            status,
            adr: None,
            im_lambda_plus: None,
            dn1: None,
            dn2: None,
            dnb: None,
            purity: None,
            moments: None,
        }
    }

    /// Largest observable magnitude in the row; the scale against which
    /// a value counts as numerically zero.
    pub fn magnitude_scale(&self) -> f64 {
        let mut scale = 0.0f64;
        let mut take = |v: Option<f64>| {
            if let Some(x) = v {
                scale = scale.max(x.abs());
            }
        };
        take(self.adr);
        take(self.im_lambda_plus);
        take(self.dn1);
        take(self.dn2);
        take(self.dnb);
        take(self.purity);
        if let Some(m) = &self.moments {
            for v in m.values() {
                scale = scale.max(v.abs());
            }
        }
        scale
    }
}

/// A fully evaluated sweep, rows sorted by `eps` ascending (normal side
/// first at equal `eps`).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepDataset {
    /// Parameters the sweep was built from (its `g` is ignored).
    pub base: ModelParams,
    /// Critical coupling recomputed from `base`.
    pub g_c: f64,
    pub rows: Vec<SweepRow>,
}

fn evaluate_point(
    base: &ModelParams,
    g_c: f64,
    eps: f64,
    phase: Phase,
    observables: &BTreeSet<Observable>,
) -> SweepRow {
    let sign = match phase {
        Phase::Normal => -1.0,
        Phase::Superradiant => 1.0,
    };
    let g = g_c * (1.0 + sign * eps);
    let params = match base.with_g(g) {
        Ok(p) => p,
        Err(_) => return SweepRow::failed(g, eps, phase, RowStatus::NumericalFailure),
    };
    let state = mean_field_steady_state(&params, Branch::Plus);
    let dd = match DriftDiffusion::build(&params, &state) {
        Ok(dd) => dd,
        Err(Error::DegenerateModel { .. }) => {
            return SweepRow::failed(g, eps, phase, RowStatus::DegenerateModel)
        }
        Err(_) => return SweepRow::failed(g, eps, phase, RowStatus::NumericalFailure),
    };
    let spectrum = match eigen_spectrum(&dd.a) {
        Ok(s) => s,
        Err(_) => return SweepRow::failed(g, eps, phase, RowStatus::NumericalFailure),
    };

    let needs_cov = observables.iter().any(Observable::needs_covariance);
    let cov = if needs_cov {
        match solve_lyapunov(&dd.a, &dd.d) {
            Ok(v) => Some(v),
            Err(Error::NotHurwitz { .. }) => {
                return SweepRow::failed(g, eps, phase, RowStatus::NotHurwitz)
            }
            Err(_) => return SweepRow::failed(g, eps, phase, RowStatus::NumericalFailure),
        }
    } else {
        None
    };

    let mut row = SweepRow::failed(g, eps, phase, RowStatus::Ok);
    if observables.contains(&Observable::Adr) {
        row.adr = Some(spectrum.adr);
    }
    if observables.contains(&Observable::ImLambda) {
        row.im_lambda_plus = Some(spectrum.eigenvalues[0].im);
    }
    if let Some(cov) = cov {
        let n = number_fluctuations(&cov);
        if observables.contains(&Observable::Dn1) {
            row.dn1 = Some(n.dn1);
        }
        if observables.contains(&Observable::Dn2) {
            row.dn2 = Some(n.dn2);
        }
        if observables.contains(&Observable::Dnb) {
            row.dnb = Some(n.dnb);
        }
        if observables.contains(&Observable::Purity) {
            match purity(&cov) {
                Ok(mu) => row.purity = Some(mu),
                Err(_) => return SweepRow::failed(g, eps, phase, RowStatus::NumericalFailure),
            }
        }
        if observables.contains(&Observable::Quadratures) {
            row.moments = Some(quadrature_moments(&cov));
        }
    }
    row
}

/// Evaluates every grid point of `spec` around the critical coupling of
/// `params_base` (its stored `g` is ignored; `g_c` is recomputed here).
/// Points are independent and evaluated in parallel; the row order is
/// deterministic.
pub fn sweep(params_base: &ModelParams, spec: &SweepSpec) -> Result<SweepDataset> {
    spec.validate()?;
    let g_c = params_base.critical_coupling();
    let mut tasks = Vec::new();
    for eps in spec.epsilons() {
        for phase in spec.phases() {
            tasks.push((eps, phase));
        }
    }
    let mut rows: Vec<SweepRow> = tasks
        .par_iter()
        .map(|&(eps, phase)| evaluate_point(params_base, g_c, eps, phase, &spec.observables))
        .collect();
    rows.sort_by(|a, b| a.eps.total_cmp(&b.eps).then(a.phase.cmp(&b.phase)));
    Ok(SweepDataset {
        base: *params_base,
        g_c,
        rows,
    })
}

/// Result of an ordinary least-squares fit of `ln(value)` against
/// `ln(eps)`: `value ~ exp(log_amplitude) * eps^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    /// Natural-log amplitude (intercept of the regression line).
    pub log_amplitude: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// `(eps_min, eps_max)` actually used.
    pub window: (f64, f64),
}

/// Log-log least squares on `(eps, value)` pairs.
///
/// Needs at least five points, all with `eps > 0` and `value > 0`;
/// offending indices are reported by [`Error::NonPositiveValue`].
///
/// ```
/// use dicke_ep::scaling::fit_power_law;
///
/// let pts: Vec<(f64, f64)> = (1..=10)
///     .map(|i| {
///         let eps = i as f64 * 1e-3;
///         (eps, 3.0 * eps * eps)
///     })
///     .collect();
/// let fit = fit_power_law(&pts).unwrap();
/// assert!((fit.exponent - 2.0).abs() < 1e-12);
/// ```
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let bad: Vec<usize> = points
        .iter()
        .enumerate()
        .filter(|(_, (e, v))| !(e.is_finite() && v.is_finite() && *e > 0.0 && *v > 0.0))
        .map(|(i, _)| i)
        .collect();
    if !bad.is_empty() {
        return Err(Error::NonPositiveValue { rows: bad });
    }
    if points.len() < 5 {
        return Err(Error::InsufficientData {
            need: 5,
            got: points.len(),
        });
    }

    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(e, v)| (e.ln(), v.ln())).collect();
    let mean_x = logs.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = logs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let syy: f64 = logs.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain(
            "all fit points share the same eps; slope is undefined".into(),
        ));
    }
    let exponent = sxy / sxx;
    let log_amplitude = mean_y - exponent * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|(x, y)| (y - (log_amplitude + exponent * x)).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let window = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(e, _)| {
            (lo.min(e), hi.max(e))
        });
    Ok(PowerLawFit {
        exponent,
        log_amplitude,
        r_squared,
        n_points: points.len(),
        window,
    })
}

/// Relative threshold below which an observable counts as numerically
/// zero; matches the noise floor of the covariance solve.
pub const ZERO_TOL: f64 = 1e-8;

/// Minimum dynamic range (decades) an observable must span before a
/// power-law exponent is reported rather than a flatness flag.
pub const FLAT_DECADES: f64 = 0.1;

/// What the fitter decided for one observable on one side.
#[derive(Debug, Clone, PartialEq)]
pub enum FitOutcome {
    Fit(PowerLawFit),
    /// Dynamic range below [`FLAT_DECADES`]; `slope` records the
    /// (meaningless) regression slope for reference.
    Flat {
        slope: f64,
        log_range: f64,
    },
    /// All values vanish relative to the row scale.
    Zero,
    Failed(String),
}

/// One row of an exponent table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    /// Column label: an [`Observable::label`] or one of
    /// [`QUADRATURE_LABELS`].
    pub observable: String,
    pub phase: Phase,
    pub outcome: FitOutcome,
}

/// Exponent fits keyed by observable and phase.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentReport {
    pub g_c: f64,
    pub window: (f64, f64),
    pub entries: Vec<ReportEntry>,
}

impl ExponentReport {
    pub fn get(&self, observable: &str, phase: Phase) -> Option<&FitOutcome> {
        self.entries
            .iter()
            .find(|e| e.observable == observable && e.phase == phase)
            .map(|e| &e.outcome)
    }
}

fn classify(points: &[(f64, f64, f64)]) -> FitOutcome {
    if points.is_empty() {
        return FitOutcome::Failed("no usable rows".into());
    }
    if points
        .iter()
        .all(|&(_, v, scale)| v.abs() <= ZERO_TOL * scale)
    {
        return FitOutcome::Zero;
    }
    // A sign-definite series is fitted through its magnitude (cross
    // moments carry no positivity guarantee); genuinely mixed signs
    // cannot follow one power law.
    let all_pos = points.iter().all(|&(_, v, _)| v > 0.0);
    let all_neg = points.iter().all(|&(_, v, _)| v < 0.0);
    if !(all_pos || all_neg) {
        return FitOutcome::Failed("values change sign across the window".into());
    }
    let series: Vec<(f64, f64)> = points.iter().map(|&(e, v, _)| (e, v.abs())).collect();
    let (min, max) = series
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(_, v)| {
            (lo.min(v), hi.max(v))
        });
    let log_range = (max / min).log10();
    if log_range < FLAT_DECADES {
        let slope = fit_power_law(&series).map(|f| f.exponent).unwrap_or(0.0);
        return FitOutcome::Flat { slope, log_range };
    }
    match fit_power_law(&series) {
        Ok(fit) => FitOutcome::Fit(fit),
        Err(e) => FitOutcome::Failed(e.to_string()),
    }
}

/// Labels the report produces for a requested observable.
fn report_columns(observable: Observable) -> Vec<&'static str> {
    match observable {
        Observable::Quadratures => QUADRATURE_LABELS.to_vec(),
        other => vec![other.label()],
    }
}

fn column_value(row: &SweepRow, column: &str) -> Option<f64> {
    match column {
        "adr" => row.adr,
        "im_lambda" => row.im_lambda_plus,
        "dn1" => row.dn1,
        "dn2" => row.dn2,
        "dnb" => row.dnb,
        "purity" => row.purity,
        _ => row.moments.map(|m| {
            let idx = QUADRATURE_LABELS.iter().position(|l| *l == column).unwrap();
            m.values()[idx]
        }),
    }
}

/// Runs [`sweep`] and fits every requested observable on every requested
/// side. Fit failures land in the corresponding entry instead of
/// aborting the table.
pub fn exponent_report(params_base: &ModelParams, spec: &SweepSpec) -> Result<ExponentReport> {
    let dataset = sweep(params_base, spec)?;
    Ok(report_from_dataset(&dataset, spec))
}

/// Fits an already evaluated dataset; used by [`exponent_report`] and by
/// consumers that want both the rows and the table from a single sweep.
pub fn report_from_dataset(dataset: &SweepDataset, spec: &SweepSpec) -> ExponentReport {
    let mut entries = Vec::new();
    for phase in spec.phases() {
        for observable in &spec.observables {
            for column in report_columns(*observable) {
                let points: Vec<(f64, f64, f64)> = dataset
                    .rows
                    .iter()
                    .filter(|r| r.phase == phase && r.status == RowStatus::Ok)
                    .filter_map(|r| {
                        column_value(r, column).map(|v| (r.eps, v, r.magnitude_scale()))
                    })
                    .collect();
                entries.push(ReportEntry {
                    observable: column.to_string(),
                    phase,
                    outcome: classify(&points),
                });
            }
        }
    }
    ExponentReport {
        g_c: dataset.g_c,
        window: (spec.rel_eps_min, spec.rel_eps_max),
        entries,
    }
}
