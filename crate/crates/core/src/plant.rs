//! Chain-of-integrators plant `ẋᵢ = xᵢ₊₁`, `ẋₙ = a(x) + b(x)·u + Δ(x, u, t)`
//! and a fixed-step integrator.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

type StateFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
type DisturbanceFn<T> = Arc<dyn Fn(&[T], T, T) -> T + Send + Sync>;

/// Plant with nonlinearities `a(x)`, `b(x)` and an additive uncertainty
/// `Δ(x, u, t)` unknown to the controller.
#[derive(Clone)]
pub struct PlantModel<T> {
    order: usize,
    a_fn: StateFn<T>,
    b_fn: StateFn<T>,
    disturbance: DisturbanceFn<T>,
}

impl<T> fmt::Debug for PlantModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlantModel")
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

impl<T: Real> PlantModel<T> {
    pub fn new(
        order: usize,
        a: impl Fn(&[T]) -> T + Send + Sync + 'static,
        b: impl Fn(&[T]) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::Config("plant order must be at least 1".into()));
        }
        Ok(Self {
            order,
            a_fn: Arc::new(a),
            b_fn: Arc::new(b),
            disturbance: Arc::new(|_, _, _| T::zero()),
        })
    }

    pub fn with_disturbance(mut self, d: impl Fn(&[T], T, T) -> T + Send + Sync + 'static) -> Self {
        self.disturbance = Arc::new(d);
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn a(&self, x: &[T]) -> T {
        (self.a_fn)(x)
    }

    pub fn b(&self, x: &[T]) -> T {
        (self.b_fn)(x)
    }

    pub fn disturbance(&self, x: &[T], u: T, t: T) -> T {
        (self.disturbance)(x, u, t)
    }

    /// `ẋₙ` without the disturbance-free split, checked for finiteness.
    pub fn top_rate(&self, x: &[T], u: T, t: T) -> Result<T> {
        let a = self.a(x);
        let b = self.b(x);
        let d = self.disturbance(x, u, t);
        for (what, v) in [("a(x)", a), ("b(x)", b), ("disturbance", d)] {
            if !v.is_finite() {
                return Err(Error::NonFinite { what, index: 0 });
            }
        }
        Ok(a + b * u + d)
    }
}

/// `Δ(t) = amplitude·sin(ω·t)` for `t ≥ onset`, zero before.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchedSine<T> {
    pub onset_s: T,
    pub amplitude: T,
    pub omega: T,
}

impl<T: Real> SwitchedSine<T> {
    pub fn value(&self, t: T) -> T {
        if t >= self.onset_s {
            self.amplitude * (self.omega * t).sin()
        } else {
            T::zero()
        }
    }

    /// Right-hand time derivative.
    pub fn rate(&self, t: T) -> T {
        if t >= self.onset_s {
            self.amplitude * self.omega * (self.omega * t).cos()
        } else {
            T::zero()
        }
    }
}

/// Default disturbance of the third-order benchmark.
pub fn benchmark_disturbance<T: Real>() -> SwitchedSine<T> {
    SwitchedSine {
        onset_s: T::of(10.0),
        amplitude: T::of(5.0),
        omega: T::one(),
    }
}

/// `a(x) = -2x₁ - x₂ - sin x₃ + e^{x₁}`.
pub fn benchmark_a<T: Real>(x: &[T]) -> T {
    -(x[0] + x[0]) - x[1] - x[2].sin() + x[0].exp()
}

/// Third-order benchmark with `b = 1` and the switched sinusoidal disturbance.
pub fn benchmark_plant<T: Real>() -> PlantModel<T> {
    benchmark_plant_with(Some(benchmark_disturbance()))
}

pub fn benchmark_plant_with<T: Real>(disturbance: Option<SwitchedSine<T>>) -> PlantModel<T> {
    let model = PlantModel::new(3, benchmark_a, |_: &[T]| T::one()).expect("order 3");
    match disturbance {
        Some(d) => model.with_disturbance(move |_, _, t| d.value(t)),
        None => model,
    }
}

/// `[x₂, …, xₙ, a(x) + b(x)·u + Δ]`.
pub fn dynamics<T: Real>(model: &PlantModel<T>, x: &[T], u: T, t: T) -> Result<Vec<T>> {
    if x.len() != model.order {
        return Err(Error::LengthMismatch {
            what: "plant state",
            expected: model.order,
            actual: x.len(),
        });
    }
    let mut rate: Vec<T> = x[1..].to_vec();
    rate.push(model.top_rate(x, u, t)?);
    Ok(rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Euler,
    #[default]
    Rk4,
}

/// Largest representable time strictly below `t`.
///
/// Stage times at the end of a step use this so that a switch aligned with
/// the step boundary belongs to the next step.
#[inline]
pub(crate) fn left_limit<T: Real>(t: T) -> T {
    if t == T::zero() {
        return t;
    }
    let below = t - t.abs() * T::epsilon();
    if below < t {
        below
    } else {
        t
    }
}

/// One fixed step of `ẏ = f(t, y)`.
pub fn ode_step<T, F>(y: &[T], t: T, h: T, method: Integrator, mut f: F) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(T, &[T]) -> Result<Vec<T>>,
{
    let axpy =
        |y: &[T], k: &[T], s: T| -> Vec<T> { y.iter().zip(k).map(|(&y, &k)| y + k * s).collect() };
    let next = match method {
        Integrator::Euler => axpy(y, &f(t, y)?, h),
        Integrator::Rk4 => {
            let half = h / T::of(2.0);
            let k1 = f(t, y)?;
            let k2 = f(t + half, &axpy(y, &k1, half))?;
            let k3 = f(t + half, &axpy(y, &k2, half))?;
            let k4 = f(left_limit(t + h), &axpy(y, &k3, h))?;
            let sixth = h / T::of(6.0);
            y.iter()
                .enumerate()
                .map(|(j, &y)| y + sixth * (k1[j] + (k2[j] + k3[j]) * T::of(2.0) + k4[j]))
                .collect()
        }
    };
    match next.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            what: "state",
            index,
        }),
        None => Ok(next),
    }
}

/// Advances the plant one step with `u` held constant.
pub fn integrate_step<T: Real>(
    model: &PlantModel<T>,
    x: &[T],
    u: T,
    t: T,
    dt: T,
    method: Integrator,
) -> Result<Vec<T>> {
    if !(dt > T::zero()) {
        return Err(Error::Config(format!(
            "integration step must be positive, got {dt}"
        )));
    }
    ode_step(x, t, dt, method, |t, x| dynamics(model, x, u, t))
}
