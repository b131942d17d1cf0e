//! Reaching-time bound and performance metrics over simulation logs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Upper bound on the reaching time `|s(0)|/(α - B_Δ̇)`.
pub fn finite_time_bound<T: Real>(s0: T, alpha: T, b_delta_dot: T) -> Result<T> {
    if !(b_delta_dot >= T::zero()) || !(alpha > b_delta_dot) {
        return Err(Error::StabilityAssumption {
            alpha: alpha.as_f64(),
            bound: b_delta_dot.as_f64(),
        });
    }
    Ok(s0.abs() / (alpha - b_delta_dot))
}

/// Signals of one control channel.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelTrace {
    pub u_b: Vec<f64>,
    pub u_t: Vec<f64>,
    pub s: Vec<f64>,
    pub xn_rate: Vec<f64>,
    pub delta: Vec<f64>,
}

/// Uniformly sampled columns the metrics are computed from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsInput {
    pub t: Vec<f64>,
    pub output: Vec<f64>,
    pub reference: Vec<f64>,
    /// Non-negative tracking error per sample.
    pub error: Vec<f64>,
    /// Whether rise, settling and overshoot make sense for this trace.
    pub step_response: bool,
    pub channels: Vec<ChannelTrace>,
    /// Euclidean error from the first on-track sample on, robot runs only.
    pub euclid: Option<Vec<f64>>,
}

pub trait MetricsSource {
    fn metrics_input(&self) -> MetricsInput;
}

impl MetricsSource for MetricsInput {
    fn metrics_input(&self) -> MetricsInput {
        self.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsOptions {
    /// Step-response metrics only look at `t < transient_end_s`.
    pub transient_end_s: Option<f64>,
    /// Window at the end of the log for `ub_decay_ratio`.
    pub final_window_s: f64,
    /// Settling band as a fraction of the step size.
    pub settling_band: f64,
    /// Lower limit of the `|s|` convergence threshold, normally `δ`.
    pub s_threshold_floor: f64,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        Self {
            transient_end_s: None,
            final_window_s: 2.0,
            settling_band: 0.02,
            s_threshold_floor: crate::surface::DEFAULT_DELTA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EmpiricalBounds {
    pub max_abs_ut_rate: f64,
    pub max_abs_xn_ddot: f64,
    pub max_abs_delta_rate: f64,
}

/// Absent values (`null` in JSON) mark metrics the log cannot support,
/// such as a rise time when the output never crosses the reference.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub rise_time_s: Option<f64>,
    pub settling_time_s: Option<f64>,
    pub overshoot_pct: Option<f64>,
    pub mean_abs_error: f64,
    pub mean_euclid_err_m: Option<f64>,
    pub s_convergence_time_s: Option<f64>,
    pub ub_decay_ratio: f64,
    #[serde(flatten)]
    pub empirical_bounds: EmpiricalBounds,
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Largest central difference `|(v[k+1] - v[k-1]) / (t[k+1] - t[k-1])|`.
fn max_central_rate(t: &[f64], v: &[f64]) -> f64 {
    (1..v.len().saturating_sub(1))
        .map(|k| (v[k + 1] - v[k - 1]) / (t[k + 1] - t[k - 1]))
        .fold(0.0, |m, r| m.max(r.abs()))
}

/// First time after which `|s|` stays below `threshold` for good.
fn convergence_time(t: &[f64], s: &[f64], threshold: f64) -> Option<f64> {
    match s.iter().rposition(|v| v.abs() >= threshold) {
        None => t.first().copied(),
        Some(last) => t.get(last + 1).copied(),
    }
}

struct StepMetrics {
    rise: Option<f64>,
    settling: Option<f64>,
    overshoot: Option<f64>,
}

fn step_metrics(t: &[f64], y: &[f64], target: f64, band: f64) -> StepMetrics {
    let none = StepMetrics {
        rise: None,
        settling: None,
        overshoot: None,
    };
    let y0 = y[0];
    let span = target - y0;
    if !(span.abs() > 1e-12) {
        return none;
    }
    let progress = |v: f64| (v - y0) / span;
    let t10 = y.iter().position(|&v| progress(v) >= 0.1);
    let t90 = y.iter().position(|&v| progress(v) >= 0.9);
    let rise = match (t10, t90) {
        (Some(a), Some(b)) => Some(t[b] - t[a]),
        _ => None,
    };
    let tol = band * span.abs();
    let settling = match y.iter().rposition(|&v| (v - target).abs() > tol) {
        None => Some(t[0]),
        Some(last) => t.get(last + 1).copied(),
    };
    let peak = y.iter().map(|&v| progress(v) - 1.0).fold(0.0, f64::max);
    StepMetrics {
        rise,
        settling,
        overshoot: Some(100.0 * peak),
    }
}

pub fn compute_metrics(log: &impl MetricsSource, opts: &MetricsOptions) -> Result<Metrics> {
    let m = log.metrics_input();
    let n = m.t.len();
    if n == 0 {
        return Err(Error::EmptyLog);
    }
    for (what, len) in std::iter::once(("output", m.output.len()))
        .chain([("reference", m.reference.len()), ("error", m.error.len())])
        .chain(m.channels.iter().map(|c| ("channel", c.s.len())))
    {
        if len != n {
            return Err(Error::LengthMismatch {
                what,
                expected: n,
                actual: len,
            });
        }
    }

    let (rise, settling, overshoot) = if m.step_response {
        let end = match opts.transient_end_s {
            Some(te) => m.t.iter().position(|&t| t >= te).unwrap_or(n).max(1),
            None => n,
        };
        let sm = step_metrics(
            &m.t[..end],
            &m.output[..end],
            m.reference[end - 1],
            opts.settling_band,
        );
        (sm.rise, sm.settling, sm.overshoot)
    } else {
        (None, None, None)
    };

    // per-sample magnitudes across channels
    let s_mag: Vec<f64> = (0..n)
        .map(|k| max_abs(m.channels.iter().map(|c| c.s[k])))
        .collect();
    let ub_mag: Vec<f64> = (0..n)
        .map(|k| {
            m.channels
                .iter()
                .map(|c| c.u_b[k] * c.u_b[k])
                .sum::<f64>()
                .sqrt()
        })
        .collect();

    let s_peak = max_abs(s_mag.iter().copied());
    let s_threshold = opts.s_threshold_floor.max(0.01 * s_peak);
    let s_conv = convergence_time(&m.t, &s_mag, s_threshold);

    let t_end = m.t[n - 1];
    let tail_start =
        m.t.iter()
            .position(|&t| t >= t_end - opts.final_window_s + 1e-9)
            .unwrap_or(n - 1);
    let ub_peak = max_abs(ub_mag.iter().copied());
    let ub_decay_ratio = if ub_peak > 0.0 {
        mean(&ub_mag[tail_start..]) / ub_peak
    } else {
        0.0
    };

    let bound = |f: fn(&ChannelTrace) -> &Vec<f64>| {
        m.channels
            .iter()
            .map(|c| max_central_rate(&m.t, f(c)))
            .fold(0.0, f64::max)
    };
    let empirical_bounds = EmpiricalBounds {
        max_abs_ut_rate: bound(|c| &c.u_t),
        max_abs_xn_ddot: bound(|c| &c.xn_rate),
        max_abs_delta_rate: bound(|c| &c.delta),
    };

    Ok(Metrics {
        rise_time_s: rise,
        settling_time_s: settling,
        overshoot_pct: overshoot,
        mean_abs_error: mean(&m.error),
        mean_euclid_err_m: m.euclid.as_ref().filter(|e| !e.is_empty()).map(|e| mean(e)),
        s_convergence_time_s: s_conv,
        ub_decay_ratio,
        empirical_bounds,
    })
}

/// Which controller did better on a metric (lower is better throughout).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Flc,
    Clelc,
    Tie,
    /// One or both values are absent.
    Undecided,
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::Flc => "flc",
            Winner::Clelc => "clelc",
            Winner::Tie => "tie",
            Winner::Undecided => "n/a",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: String,
    pub flc: Option<f64>,
    pub clelc: Option<f64>,
    /// `clelc / flc`.
    pub ratio: Option<f64>,
    pub winner: Winner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub flc: Metrics,
    pub clelc: Metrics,
    pub rows: Vec<MetricRow>,
}

fn row(metric: &str, flc: Option<f64>, clelc: Option<f64>) -> MetricRow {
    let (ratio, winner) = match (flc, clelc) {
        (Some(a), Some(b)) => {
            let ratio = if a != 0.0 { Some(b / a) } else { None };
            let scale = a.abs().max(b.abs());
            let winner = if (a - b).abs() <= 1e-9 * scale || scale == 0.0 {
                Winner::Tie
            } else if b < a {
                Winner::Clelc
            } else {
                Winner::Flc
            };
            (ratio, winner)
        }
        _ => (None, Winner::Undecided),
    };
    MetricRow {
        metric: metric.to_string(),
        flc,
        clelc,
        ratio,
        winner,
    }
}

/// Side-by-side comparison of two runs of the same scenario.
pub fn compare(flc: &Metrics, clelc: &Metrics) -> ComparisonReport {
    let rows = vec![
        row("rise_time_s", flc.rise_time_s, clelc.rise_time_s),
        row(
            "settling_time_s",
            flc.settling_time_s,
            clelc.settling_time_s,
        ),
        row("overshoot_pct", flc.overshoot_pct, clelc.overshoot_pct),
        row(
            "mean_abs_error",
            Some(flc.mean_abs_error),
            Some(clelc.mean_abs_error),
        ),
        row(
            "mean_euclid_err_m",
            flc.mean_euclid_err_m,
            clelc.mean_euclid_err_m,
        ),
        row(
            "s_convergence_time_s",
            flc.s_convergence_time_s,
            clelc.s_convergence_time_s,
        ),
        row(
            "ub_decay_ratio",
            Some(flc.ub_decay_ratio),
            Some(clelc.ub_decay_ratio),
        ),
    ];
    ComparisonReport {
        flc: *flc,
        clelc: *clelc,
        rows,
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<22} {:>14} {:>14} {:>10} {:>7}",
            "metric", "flc", "clelc", "ratio", "winner"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<22} {:>14} {:>14} {:>10} {:>7}",
                r.metric,
                cell(r.flc),
                cell(r.clelc),
                r.ratio
                    .map_or_else(|| "-".to_string(), |v| format!("{v:.4}")),
                r.winner.to_string()
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = &self.empirical_bounds;
        let rows = [
            ("rise_time_s", self.rise_time_s),
            ("settling_time_s", self.settling_time_s),
            ("overshoot_pct", self.overshoot_pct),
            ("mean_abs_error", Some(self.mean_abs_error)),
            ("mean_euclid_err_m", self.mean_euclid_err_m),
            ("s_convergence_time_s", self.s_convergence_time_s),
            ("ub_decay_ratio", Some(self.ub_decay_ratio)),
            ("max_abs_ut_rate", Some(b.max_abs_ut_rate)),
            ("max_abs_xn_ddot", Some(b.max_abs_xn_ddot)),
            ("max_abs_delta_rate", Some(b.max_abs_delta_rate)),
        ];
        for (name, v) in rows {
            writeln!(f, "{name:<22} {:>14}", cell(v))?;
        }
        Ok(())
    }
}

/// Samples with `|s| > δ` and how many of them are followed by a
/// non-increasing `½s²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DescentStats {
    pub eligible: usize,
    pub descending: usize,
}

impl DescentStats {
    pub fn fraction(&self) -> Option<f64> {
        (self.eligible > 0).then(|| self.descending as f64 / self.eligible as f64)
    }
}

pub fn lyapunov_descent(s: &[f64], delta: f64) -> DescentStats {
    let mut stats = DescentStats::default();
    for w in s.windows(2) {
        if w[0].abs() > delta {
            stats.eligible += 1;
            if w[1] * w[1] <= w[0] * w[0] {
                stats.descending += 1;
            }
        }
    }
    stats
}
