//! Sliding surface of the closed-loop error dynamics and the feedback gains
//! it induces.
//!
//! The surface is `s = (d/dt + λ)^n e₁`, which in error coordinates reads
//! `s = ėₙ + Σ kᵢ eᵢ` with `kᵢ = C(n, n-i+1) λ^(n-i+1)`. Gains are stored in
//! the order that multiplies the error vector, so `k[0]` pairs with `e₁`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{dot, Real};

/// Highest supported surface order. Binomial coefficients stay exact well
/// past this; the cap keeps `λ^n` within a sane range.
pub const MAX_ORDER: usize = 8;

/// Default boundary-layer width of the smoothed sign.
pub const DEFAULT_DELTA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlidingSurfaceSpec<T> {
    order: usize,
    slope: T,
}

impl<T: Real> SlidingSurfaceSpec<T> {
    pub fn new(order: usize, slope: T) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::Config(format!(
                "surface order must be in 1..={MAX_ORDER}, got {order}"
            )));
        }
        if !(slope > T::zero()) || !slope.is_finite() {
            return Err(Error::Config(format!(
                "surface slope must be positive, got {slope}"
            )));
        }
        Ok(Self { order, slope })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn slope(&self) -> T {
        self.slope
    }
}

/// Feedback gains `k₁..kₙ`, all strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GainVector<T>(Vec<T>);

impl<T: Real> GainVector<T> {
    /// Wraps hand-picked gains. Every gain must be positive and finite.
    pub fn new(gains: Vec<T>) -> Result<Self> {
        if gains.is_empty() {
            return Err(Error::Config("gain vector is empty".into()));
        }
        if let Some(bad) = gains.iter().find(|k| !(**k > T::zero()) || !k.is_finite()) {
            return Err(Error::Config(format!("gains must be positive, got {bad}")));
        }
        Ok(Self(gains))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Synthesizes the gains of `(d/dt + λ)^n`, ordered so that element `i`
/// multiplies error `eᵢ`.
pub fn gain_vector<T: Real>(spec: &SlidingSurfaceSpec<T>) -> GainVector<T> {
    let n = spec.order;
    let gains = (1..=n)
        .map(|i| {
            let power = n - i + 1;
            T::of(binomial(n, power) as f64) * spec.slope.powi(power as i32)
        })
        .collect();
    GainVector(gains)
}

/// `s = ėₙ + Σ kᵢ eᵢ`.
pub fn sliding_value<T: Real>(errors: &[T], error_rate_n: T, gains: &GainVector<T>) -> Result<T> {
    if errors.len() != gains.len() {
        return Err(Error::LengthMismatch {
            what: "error vector vs gains",
            expected: gains.len(),
            actual: errors.len(),
        });
    }
    Ok(error_rate_n + dot(errors, gains.as_slice()))
}

/// Boundary-layer sign `s / (|s| + δ)`.
#[inline]
pub fn smoothed_sign<T: Real>(s: T, delta: T) -> T {
    s / (s.abs() + delta)
}

/// Smoothed sign evaluated at the end of a sampling interval.
///
/// Returns `g` solving `g = y / (|y| + δ)` with `y = s - gain·g`, where `gain`
/// is the per-sample increment `α·Δt` of the compensator output. Since
/// `∂s/∂uₙ = -1` in closed loop, `y` is the surface value after the
/// compensator has moved by `gain·g`. The root has `y` on the same side of
/// zero as `s` and `|y| < |s|`, so the discrete update never crosses the
/// surface. As `gain → 0` this reduces to [`smoothed_sign`].
pub fn implicit_smoothed_sign<T: Real>(s: T, delta: T, gain: T) -> T {
    if s == T::zero() {
        return T::zero();
    }
    let m = s.abs();
    // y² + (δ - m + gain)·y - m·δ = 0, positive root
    let b = delta - m + gain;
    let disc = (b * b + T::of(4.0) * m * delta).sqrt();
    let y = if b > T::zero() {
        T::of(2.0) * m * delta / (b + disc)
    } else {
        (disc - b) / T::of(2.0)
    };
    s.signum() * y / (y + delta)
}
