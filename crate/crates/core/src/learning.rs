//! Sliding-mode adaptation of the neuro-fuzzy parameters.
//!
//! Continuous-time laws, with `g` the smoothed sign of `s`:
//!
//! ```text
//! ċ_ik = ė_i + (e_i - c_ik)·α·g
//! σ̇_ik = -(σ_ik + σ_ik³/(e_i - c_ik)²)·α·g
//! ḟ_r  = w̃_r / Σ_j w̃_j² · α·g
//! ```
//!
//! Along these laws every normalized offset `M_ik = (e_i - c_ik)/σ_ik`
//! satisfies `M_ik·Ṁ_ik = α·g`, so all `M²` drift together, the normalized
//! firing strengths stay put and the network output moves at exactly `α·g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{
    firing_strengths, ordered_sum, FiringState, NeuroFuzzyParams, DEFAULT_SIGMA_MIN,
};
use crate::scalar::Real;
use crate::surface::{implicit_smoothed_sign, smoothed_sign, DEFAULT_DELTA};

/// How the smoothed sign of `s` is evaluated inside a sampling interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    /// `s/(|s| + δ)` at the sample.
    Explicit,
    /// Smoothed sign at the end of the interval, see
    /// [`implicit_smoothed_sign`](crate::surface::implicit_smoothed_sign).
    #[default]
    Implicit,
}

/// Discretization of the center and width laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PremiseUpdate {
    /// Forward Euler on `ċ` and `σ̇`, widths clamped at `sigma_min`.
    Euler,
    /// Closed-form flow of the offsets over one interval followed by a
    /// per-input renormalization of `M²`. See [`exact_premise_step`].
    #[default]
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningConfig<T> {
    pub alpha: T,
    pub delta: T,
    pub sigma_min: T,
    pub center_guard_eps: T,
    pub dt: T,
    #[serde(default)]
    pub sign_mode: SignMode,
    #[serde(default)]
    pub premise: PremiseUpdate,
    /// Lower bound on `min_k M_ik²` kept by the exact premise step.
    pub premise_floor: T,
}

impl<T: Real> LearningConfig<T> {
    /// Guards at their defaults, explicit sign and Euler premises.
    pub fn new(alpha: T, dt: T) -> Self {
        Self {
            alpha,
            delta: T::of(DEFAULT_DELTA),
            sigma_min: T::of(DEFAULT_SIGMA_MIN),
            center_guard_eps: T::of(1e-3),
            dt,
            sign_mode: SignMode::Explicit,
            premise: PremiseUpdate::Euler,
            premise_floor: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("delta", self.delta),
            ("sigma_min", self.sigma_min),
            ("center_guard_eps", self.center_guard_eps),
            ("dt", self.dt),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.premise_floor >= T::zero()) || !self.premise_floor.is_finite() {
            return Err(Error::Config(format!(
                "premise_floor must be non-negative, got {}",
                self.premise_floor
            )));
        }
        Ok(())
    }

    /// Smoothed sign of `s` under the configured [`SignMode`].
    pub fn sign_of(&self, s: T) -> T {
        match self.sign_mode {
            SignMode::Explicit => smoothed_sign(s, self.delta),
            SignMode::Implicit => implicit_smoothed_sign(s, self.delta, self.alpha * self.dt),
        }
    }
}

/// Rate bounds that the learning rate has to dominate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundEstimates<T> {
    pub b_udot_t: T,
    pub b_xddot_n: T,
    pub b_delta_dot: T,
}

impl<T: Real> BoundEstimates<T> {
    pub fn new(b_udot_t: T, b_xddot_n: T, b_delta_dot: T) -> Result<Self> {
        for v in [b_udot_t, b_xddot_n, b_delta_dot] {
            if !(v >= T::zero()) {
                return Err(Error::Config(format!(
                    "rate bounds must be non-negative, got {v}"
                )));
            }
        }
        Ok(Self {
            b_udot_t,
            b_xddot_n,
            b_delta_dot,
        })
    }

    /// `α > B_u̇t + B_ẍn`, required for the output to reach the surface.
    pub fn learning_rate_dominates(&self, alpha: T) -> bool {
        alpha > self.b_udot_t + self.b_xddot_n
    }

    /// `α > B_Δ̇`, required for finite-time reaching in closed loop.
    pub fn reaching_condition_holds(&self, alpha: T) -> bool {
        alpha > self.b_delta_dot
    }
}

/// `ċ = ė + (e - c)·α·g`.
#[inline]
pub fn center_rate<T: Real>(e_i: T, edot_i: T, c_ik: T, alpha: T, sgn_s: T) -> T {
    edot_i + (e_i - c_ik) * alpha * sgn_s
}

/// `σ̇ = -(σ + σ³/max((e - c)², ε²))·α·g`.
#[inline]
pub fn width_rate<T: Real>(
    e_i: T,
    c_ik: T,
    sigma_ik: T,
    alpha: T,
    sgn_s: T,
    cfg: &LearningConfig<T>,
) -> T {
    let d = e_i - c_ik;
    let den = (d * d).max(cfg.center_guard_eps * cfg.center_guard_eps);
    -(sigma_ik + sigma_ik * sigma_ik * sigma_ik / den) * alpha * sgn_s
}

/// `ḟ_r = w̃_r / Σ w̃² · α·g` for every rule.
pub fn consequent_rates<T: Real>(firing: &FiringState<T>, alpha: T, sgn_s: T) -> Result<Vec<T>> {
    let mut squares: Vec<T> = firing.normalized.iter().map(|&w| w * w).collect();
    let energy = ordered_sum(&mut squares);
    if !(energy > T::zero()) || !energy.is_finite() {
        return Err(Error::NonFinite {
            what: "firing energy",
            index: 0,
        });
    }
    let gain = alpha * sgn_s / energy;
    Ok(firing.normalized.iter().map(|&w| w * gain).collect())
}

fn check_lengths<T: Real>(params: &NeuroFuzzyParams<T>, e: &[T], edot: &[T]) -> Result<()> {
    for (what, got) in [
        ("learning errors", e.len()),
        ("learning error rates", edot.len()),
    ] {
        if got != params.inputs() {
            return Err(Error::LengthMismatch {
                what,
                expected: params.inputs(),
                actual: got,
            });
        }
    }
    Ok(())
}

fn ensure_finite<T: Real>(values: &[T], what: &'static str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { what, index }),
        None => Ok(()),
    }
}

/// One adaptation step computing the smoothed sign from `s`.
pub fn learning_step<T: Real>(
    params: &NeuroFuzzyParams<T>,
    e: &[T],
    edot: &[T],
    s: T,
    cfg: &LearningConfig<T>,
) -> Result<NeuroFuzzyParams<T>> {
    learning_step_with_sign(params, e, edot, cfg.sign_of(s), cfg)
}

/// One adaptation step for a given smoothed sign `sgn_s`.
///
/// Consequents always take a forward Euler step. Premises follow
/// `cfg.premise`.
pub fn learning_step_with_sign<T: Real>(
    params: &NeuroFuzzyParams<T>,
    e: &[T],
    edot: &[T],
    sgn_s: T,
    cfg: &LearningConfig<T>,
) -> Result<NeuroFuzzyParams<T>> {
    check_lengths(params, e, edot)?;
    let firing = firing_strengths(e, params)?;
    let f_rate = consequent_rates(&firing, cfg.alpha, sgn_s)?;

    let mut next = match cfg.premise {
        PremiseUpdate::Euler => euler_premise_step(params, e, edot, sgn_s, cfg)?,
        PremiseUpdate::Exact => exact_premise_step(params, e, edot, sgn_s, cfg)?,
    };
    for (f, rate) in next.consequents.iter_mut().zip(&f_rate) {
        *f = *f + *rate * cfg.dt;
    }
    ensure_finite(&next.consequents, "consequent")?;
    Ok(next)
}

/// Forward Euler on the center and width laws.
pub fn euler_premise_step<T: Real>(
    params: &NeuroFuzzyParams<T>,
    e: &[T],
    edot: &[T],
    sgn_s: T,
    cfg: &LearningConfig<T>,
) -> Result<NeuroFuzzyParams<T>> {
    check_lengths(params, e, edot)?;
    let k = params.mf_per_input();
    let mut next = params.clone();
    for j in 0..params.centers.len() {
        let i = j / k;
        let (c, sigma) = (params.centers[j], params.widths[j]);
        let c_dot = center_rate(e[i], edot[i], c, cfg.alpha, sgn_s);
        let s_dot = width_rate(e[i], c, sigma, cfg.alpha, sgn_s, cfg);
        next.centers[j] = c + c_dot * cfg.dt;
        next.widths[j] = (sigma + s_dot * cfg.dt).max(cfg.sigma_min);
    }
    ensure_finite(&next.centers, "center")?;
    ensure_finite(&next.widths, "width")?;
    Ok(next)
}

/// Premise update that integrates the offset dynamics in closed form.
///
/// With `d = e - c` and `ė` held over the interval, the laws give
/// `ḋ = -α·g·d` and `d(M²)/dt = 2α·g`, hence after `Δt`
///
/// ```text
/// d' = d·exp(-α·g·Δt),   M'² = M² + 2α·g·Δt,   c' = e + ė·Δt - d',   σ' = |d'|/M'
/// ```
///
/// The raw laws drive `σ → 0` whenever some `M² → 0`. To stay well posed,
/// every `M'²` of an input is raised by the same amount whenever the
/// smallest one falls below `cfg.premise_floor`. A uniform shift of `M²`
/// across an input scales every rule strength by the same factor, so the
/// normalized firing strengths and the output are unaffected. Memberships
/// sitting exactly on their input move their center instead of their width.
pub fn exact_premise_step<T: Real>(
    params: &NeuroFuzzyParams<T>,
    e: &[T],
    edot: &[T],
    sgn_s: T,
    cfg: &LearningConfig<T>,
) -> Result<NeuroFuzzyParams<T>> {
    check_lengths(params, e, edot)?;
    let k = params.mf_per_input();
    let a = cfg.alpha * sgn_s * cfg.dt;
    let decay = (-a).exp();
    let mut next = params.clone();

    for i in 0..params.inputs() {
        let e_next = e[i] + edot[i] * cfg.dt;
        let range = i * k..(i + 1) * k;
        let mut offsets = Vec::with_capacity(k);
        let mut m2 = Vec::with_capacity(k);
        for j in range.clone() {
            let d = e[i] - params.centers[j];
            let m = d / params.widths[j];
            offsets.push(d * decay);
            m2.push(m * m + a + a);
        }
        let lowest = m2.iter().cloned().fold(T::infinity(), T::min);
        if lowest < cfg.premise_floor {
            let lift = cfg.premise_floor - lowest;
            m2.iter_mut().for_each(|v| *v = *v + lift);
        }
        m2.iter_mut().for_each(|v| *v = v.max(T::zero()));
        for (slot, j) in range.enumerate() {
            let (d, m2) = (offsets[slot], m2[slot]);
            let m = m2.sqrt();
            let (d, sigma) = if d == T::zero() || m == T::zero() {
                // offset or normalized offset vanished: keep the width, place the center
                let sigma = params.widths[j];
                (
                    m * sigma
                        * if sgn_s < T::zero() {
                            -T::one()
                        } else {
                            T::one()
                        },
                    sigma,
                )
            } else {
                (d, (d.abs() / m).max(cfg.sigma_min))
            };
            next.centers[j] = e_next - d;
            next.widths[j] = sigma;
        }
    }
    ensure_finite(&next.centers, "center")?;
    ensure_finite(&next.widths, "width")?;
    Ok(next)
}
