//! Time-indexed simulation traces and their CSV form.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{ChannelTrace, MetricsInput, MetricsSource};
use crate::control::ControlDecomposition;
use crate::error::Result;

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn push_row(out: &mut String, values: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str(&fmt_f64(v));
    }
    out.push('\n');
}

/// Guard activations counted over a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunEvents {
    /// Steps where every rule strength underflowed and firing fell back to uniform.
    pub firing_fallbacks: usize,
    /// Robot steps below the speed guard, driven with `ω = 0`.
    pub speed_singularities: usize,
    /// Robot steps with the yaw-rate command at its limit.
    pub omega_saturations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub e: Vec<f64>,
    pub control: ControlDecomposition<f64>,
    pub s: f64,
    /// Disturbance at `t`.
    pub delta: f64,
    /// `ẋₙ` used for the surface value.
    pub xn_rate: f64,
}

/// Trace of a chain-of-integrators run, one sample per controller period.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SimLog {
    pub order: usize,
    pub samples: Vec<PlantSample>,
    pub events: RunEvents,
}

impl SimLog {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }

    pub fn header(&self) -> String {
        let n = self.order;
        let mut cols = vec!["t".to_string()];
        for p in ["x", "r", "e"] {
            cols.extend((1..=n).map(|i| format!("{p}{i}")));
        }
        cols.extend(["u_b", "u_f", "u_n", "u_t", "u", "s", "delta"].map(String::from));
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for s in &self.samples {
            let c = &s.control;
            let row = std::iter::once(s.t)
                .chain(s.x.iter().copied())
                .chain(s.r.iter().copied())
                .chain(s.e.iter().copied())
                .chain([c.u_b, c.u_f, c.u_n, c.u_t, c.u, s.s, s.delta]);
            push_row(&mut out, row);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Column `i` (0-based) of the state.
    pub fn state(&self, i: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.x[i]).collect()
    }
}

impl MetricsSource for SimLog {
    fn metrics_input(&self) -> MetricsInput {
        let col = |f: fn(&PlantSample) -> f64| self.samples.iter().map(f).collect::<Vec<_>>();
        MetricsInput {
            t: col(|s| s.t),
            output: col(|s| s.x[0]),
            reference: col(|s| s.r[0]),
            error: col(|s| s.e[0].abs()),
            step_response: true,
            channels: vec![ChannelTrace {
                u_b: col(|s| s.control.u_b),
                u_t: col(|s| s.control.u_t),
                s: col(|s| s.s),
                xn_rate: col(|s| s.xn_rate),
                delta: col(|s| s.delta),
            }],
            euclid: None,
        }
    }
}

/// Per-axis quantities of one robot sample.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisSample {
    pub u_b: f64,
    pub u_f: f64,
    pub u_n: f64,
    pub u_t: f64,
    pub s: f64,
    /// Slip acceleration on this axis.
    pub delta: f64,
    /// Planar acceleration used for the surface value.
    pub accel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSample {
    pub t: f64,
    /// `[p_x, p_y, ṗ_x, ṗ_y]`.
    pub x: [f64; 4],
    pub r: [f64; 4],
    pub e: [f64; 4],
    pub axes: [AxisSample; 2],
    pub xi: f64,
    pub px: f64,
    pub py: f64,
    pub theta: f64,
    pub v: f64,
    /// Yaw-rate command after saturation.
    pub omega: f64,
    pub theta_r: f64,
    pub v_d: f64,
    pub omega_d: f64,
    pub euclid_err: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RobotLog {
    pub samples: Vec<RobotSample>,
    pub events: RunEvents,
    /// Distance below which the robot counts as on track.
    pub on_track_threshold_m: f64,
}

pub const ROBOT_CSV_HEADER: &str = "t,x1,x2,x3,x4,r1,r2,r3,r4,e1,e2,e3,e4,\
u_b1,u_b2,u_f1,u_f2,u_n1,u_n2,u_t1,u_t2,xi,s1,s2,delta1,delta2,\
px,py,theta,v,omega,theta_r,v_d,omega_d,euclid_err";

impl RobotLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * 400);
        let _ = writeln!(out, "{ROBOT_CSV_HEADER}");
        for s in &self.samples {
            let [a, b] = s.axes;
            let row = std::iter::once(s.t)
                .chain(s.x)
                .chain(s.r)
                .chain(s.e)
                .chain([a.u_b, b.u_b, a.u_f, b.u_f, a.u_n, b.u_n, a.u_t, b.u_t, s.xi])
                .chain([a.s, b.s, a.delta, b.delta])
                .chain([
                    s.px,
                    s.py,
                    s.theta,
                    s.v,
                    s.omega,
                    s.theta_r,
                    s.v_d,
                    s.omega_d,
                    s.euclid_err,
                ]);
            push_row(&mut out, row);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Index of the first sample closer than the on-track threshold.
    pub fn on_track_index(&self) -> Option<usize> {
        self.samples
            .iter()
            .position(|s| s.euclid_err < self.on_track_threshold_m)
    }
}

impl MetricsSource for RobotLog {
    fn metrics_input(&self) -> MetricsInput {
        let col = |f: &dyn Fn(&RobotSample) -> f64| self.samples.iter().map(f).collect::<Vec<_>>();
        let channel = |j: usize| ChannelTrace {
            u_b: col(&|s| s.axes[j].u_b),
            u_t: col(&|s| s.axes[j].u_t),
            s: col(&|s| s.axes[j].s),
            xn_rate: col(&|s| s.axes[j].accel),
            delta: col(&|s| s.axes[j].delta),
        };
        let euclid = match self.on_track_index() {
            Some(k) => self.samples[k..].iter().map(|s| s.euclid_err).collect(),
            None => Vec::new(),
        };
        MetricsInput {
            t: col(&|s| s.t),
            output: col(&|s| s.x[0]),
            reference: col(&|s| s.r[0]),
            error: col(&|s| s.euclid_err),
            step_response: false,
            channels: vec![channel(0), channel(1)],
            euclid: Some(euclid),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: f64) -> PlantSample {
        PlantSample {
            t,
            x: vec![1.0, -1.0, -10.0],
            r: vec![0.0; 3],
            e: vec![-1.0, 1.0, 10.0],
            control: ControlDecomposition {
                u_b: 90.0,
                u_f: 0.0,
                u_n: 0.0,
                u_t: 90.0,
                u: 88.8,
            },
            s: 0.1,
            delta: 0.0,
            xn_rate: 0.0,
        }
    }

    #[test]
    fn plant_csv_layout() {
        let mut log = SimLog::new(3);
        log.samples.push(sample(0.0));
        log.samples.push(sample(0.01));
        let csv = log.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,x1,x2,x3,r1,r2,r3,e1,e2,e3,u_b,u_f,u_n,u_t,u,s,delta"
        );
        assert_eq!(
            lines.next().unwrap(),
            "0.0,1.0,-1.0,-10.0,0.0,0.0,0.0,-1.0,1.0,10.0,90.0,0.0,0.0,90.0,88.8,0.1,0.0"
        );
        assert_eq!(lines.count(), 1);
    }

    #[test]
    fn floats_round_trip() {
        for v in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            9.99,
        ] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn robot_header_columns() {
        assert_eq!(ROBOT_CSV_HEADER.split(',').count(), 35);
        let log = RobotLog::default();
        assert_eq!(log.to_csv().trim_end(), ROBOT_CSV_HEADER);
    }
}
