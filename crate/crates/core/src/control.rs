//! Feedback, feedforward and the two control laws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{dot, Real};
use crate::surface::GainVector;

/// Default guard on `|b(x)|`.
pub const DEFAULT_B_MIN: f64 = 1e-9;

/// Per-step split of the control action.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlDecomposition<T> {
    pub u_b: T,
    pub u_f: T,
    pub u_n: T,
    /// `u_b + u_f + u_n`.
    pub u_t: T,
    /// Physical plant input.
    pub u: T,
}

impl<T: Real> ControlDecomposition<T> {
    pub fn to_f64(&self) -> ControlDecomposition<f64> {
        ControlDecomposition {
            u_b: self.u_b.as_f64(),
            u_f: self.u_f.as_f64(),
            u_n: self.u_n.as_f64(),
            u_t: self.u_t.as_f64(),
            u: self.u.as_f64(),
        }
    }
}

/// Reference chain `r₁..rₙ` plus `r_{n+1} = ṙₙ` and `ṙ_{n+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSignal<T> {
    pub r: Vec<T>,
    pub r_np1: T,
    pub r_dot_np1: T,
}

impl<T: Real> ReferenceSignal<T> {
    pub fn zero(order: usize) -> Self {
        Self {
            r: vec![T::zero(); order],
            r_np1: T::zero(),
            r_dot_np1: T::zero(),
        }
    }

    pub fn order(&self) -> usize {
        self.r.len()
    }
}

/// Tracking errors `eᵢ = rᵢ - xᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ErrorVector<T>(Vec<T>);

impl<T: Real> ErrorVector<T> {
    pub fn new(e: Vec<T>) -> Self {
        Self(e)
    }

    pub fn between(reference: &ReferenceSignal<T>, x: &[T]) -> Result<Self> {
        if reference.r.len() != x.len() {
            return Err(Error::LengthMismatch {
                what: "reference vs state",
                expected: x.len(),
                actual: reference.r.len(),
            });
        }
        Ok(Self(
            reference.r.iter().zip(x).map(|(&r, &x)| r - x).collect(),
        ))
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

    /// Error rates given the highest-order state rate: `ėᵢ = eᵢ₊₁` for
    /// `i < n`, `ėₙ = r_{n+1} - ẋₙ`.
    pub fn rates(&self, reference: &ReferenceSignal<T>, xn_rate: T) -> Vec<T> {
        let mut rates: Vec<T> = self.0.iter().skip(1).copied().collect();
        rates.push(reference.r_np1 - xn_rate);
        rates
    }
}

/// `u_b = Σ kᵢ eᵢ`.
pub fn feedback_control<T: Real>(e: &ErrorVector<T>, k: &GainVector<T>) -> Result<T> {
    if e.len() != k.len() {
        return Err(Error::LengthMismatch {
            what: "error vector vs gains",
            expected: k.len(),
            actual: e.len(),
        });
    }
    Ok(dot(e.as_slice(), k.as_slice()))
}

/// `u_f = ṙₙ`.
pub fn feedforward_control<T: Real>(reference: &ReferenceSignal<T>) -> T {
    reference.r_np1
}

/// `u = (-a + u_b + u_f)/b`.
pub fn flc_law<T: Real>(
    a_x: T,
    b_x: T,
    u_b: T,
    u_f: T,
    b_min: T,
) -> Result<ControlDecomposition<T>> {
    clelc_law(a_x, b_x, u_b, u_f, T::zero(), b_min)
}

/// `u = (-a + u_b + u_f + u_n)/b`.
pub fn clelc_law<T: Real>(
    a_x: T,
    b_x: T,
    u_b: T,
    u_f: T,
    u_n: T,
    b_min: T,
) -> Result<ControlDecomposition<T>> {
    if !(b_x.abs() > b_min) {
        return Err(Error::SingularPlant {
            b: b_x.as_f64(),
            b_min: b_min.as_f64(),
        });
    }
    let u_t = u_b + u_f + u_n;
    let u = (u_t - a_x) / b_x;
    if !u.is_finite() {
        return Err(Error::NonFinite {
            what: "plant input",
            index: 0,
        });
    }
    Ok(ControlDecomposition {
        u_b,
        u_f,
        u_n,
        u_t,
        u,
    })
}
