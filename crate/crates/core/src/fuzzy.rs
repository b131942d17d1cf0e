//! Zeroth-order Takagi-Sugeno-Kang network with Gaussian memberships.
//!
//! Inputs are error signals `e₁..e_I`; each input has `K` Gaussian
//! membership functions, and the rule base is the full grid of `K^I` rules
//! enumerated row-major over `(k₁, …, k_I)` with `k₁` most significant.
//! Rule `r` fires with the product of its memberships, and the network
//! output is the normalized-firing-weighted mean of the rule consequents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default lower bound on membership widths.
pub const DEFAULT_SIGMA_MIN: f64 = 1e-3;

/// Gaussian membership value `exp(-½((e - c)/σ)²)`.
///
/// Fails when `sigma` is below `sigma_min`.
pub fn membership<T: Real>(e: T, c: T, sigma: T, sigma_min: T) -> Result<T> {
    if !(sigma >= sigma_min) {
        return Err(Error::WidthBelowFloor {
            sigma: sigma.as_f64(),
            sigma_min: sigma_min.as_f64(),
        });
    }
    Ok(gaussian(e, c, sigma))
}

#[inline]
pub(crate) fn gaussian<T: Real>(e: T, c: T, sigma: T) -> T {
    let m = (e - c) / sigma;
    (-(m * m) / T::of(2.0)).exp()
}

/// Sum that does not depend on the order of its terms.
///
/// Terms are summed in ascending order, so permuting the rule base leaves
/// firing normalization and network output bit-identical.
pub(crate) fn ordered_sum<T: Real>(terms: &mut [T]) -> T {
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    terms.iter().fold(T::zero(), |acc, &v| acc + v)
}

/// Premise and consequent parameters of the network.
///
/// `centers` and `widths` are stored input-major: entry `i·K + k` belongs to
/// membership `k` of input `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuroFuzzyParams<T> {
    inputs: usize,
    mf_per_input: usize,
    pub(crate) centers: Vec<T>,
    pub(crate) widths: Vec<T>,
    pub(crate) consequents: Vec<T>,
}

impl<T: Real> NeuroFuzzyParams<T> {
    pub fn new(
        inputs: usize,
        mf_per_input: usize,
        centers: Vec<T>,
        widths: Vec<T>,
        consequents: Vec<T>,
    ) -> Result<Self> {
        if inputs == 0 || mf_per_input == 0 {
            return Err(Error::Config(
                "network needs at least one input and one membership".into(),
            ));
        }
        let rules = mf_per_input
            .checked_pow(inputs as u32)
            .filter(|n| *n <= 1 << 20)
            .ok_or_else(|| {
                Error::Config(format!("rule grid {mf_per_input}^{inputs} is too large"))
            })?;
        let premise = inputs * mf_per_input;
        for (what, got, want) in [
            ("centers", centers.len(), premise),
            ("widths", widths.len(), premise),
            ("consequents", consequents.len(), rules),
        ] {
            if got != want {
                return Err(Error::LengthMismatch {
                    what,
                    expected: want,
                    actual: got,
                });
            }
        }
        for (what, values) in [
            ("center", &centers),
            ("width", &widths),
            ("consequent", &consequents),
        ] {
            if let Some(index) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { what, index });
            }
        }
        if let Some(bad) = widths.iter().find(|w| !(**w > T::zero())) {
            return Err(Error::Config(format!(
                "membership widths must be positive, got {bad}"
            )));
        }
        Ok(Self {
            inputs,
            mf_per_input,
            centers,
            widths,
            consequents,
        })
    }

    /// Grid initialization: for input `i`, centers evenly spaced over
    /// `[-ranges[i], ranges[i]]`, widths equal to the center spacing
    /// (the full span when `K = 1`) and all consequents zero, so the network
    /// starts with zero output.
    pub fn uniform_grid(ranges: &[T], mf_per_input: usize) -> Result<Self> {
        if let Some(bad) = ranges.iter().find(|r| !(**r > T::zero()) || !r.is_finite()) {
            return Err(Error::Config(format!(
                "membership ranges must be positive, got {bad}"
            )));
        }
        let k = mf_per_input;
        let mut centers = Vec::with_capacity(ranges.len() * k);
        let mut widths = Vec::with_capacity(ranges.len() * k);
        for &range in ranges {
            let span = range + range;
            let spacing = if k > 1 {
                span / T::of((k - 1) as f64)
            } else {
                span
            };
            for j in 0..k {
                let c = if k > 1 {
                    -range + spacing * T::of(j as f64)
                } else {
                    T::zero()
                };
                centers.push(c);
                widths.push(spacing);
            }
        }
        let rules = k.checked_pow(ranges.len() as u32).unwrap_or(usize::MAX);
        if rules > 1 << 20 {
            return Err(Error::Config(format!(
                "rule grid {k}^{} is too large",
                ranges.len()
            )));
        }
        Self::new(ranges.len(), k, centers, widths, vec![T::zero(); rules])
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn mf_per_input(&self) -> usize {
        self.mf_per_input
    }

    pub fn rule_count(&self) -> usize {
        self.consequents.len()
    }

    pub fn center(&self, input: usize, mf: usize) -> T {
        self.centers[input * self.mf_per_input + mf]
    }

    pub fn width(&self, input: usize, mf: usize) -> T {
        self.widths[input * self.mf_per_input + mf]
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    pub fn widths(&self) -> &[T] {
        &self.widths
    }

    pub fn consequents(&self) -> &[T] {
        &self.consequents
    }

    pub fn consequents_mut(&mut self) -> &mut [T] {
        &mut self.consequents
    }

    /// Membership indices `(k₁, …, k_I)` of rule `rule`.
    pub fn rule_index(&self, rule: usize) -> Vec<usize> {
        let mut idx = vec![0; self.inputs];
        let mut rest = rule;
        for slot in idx.iter_mut().rev() {
            *slot = rest % self.mf_per_input;
            rest /= self.mf_per_input;
        }
        idx
    }

    /// Inverse of [`rule_index`](Self::rule_index).
    pub fn rule_id(&self, memberships: &[usize]) -> usize {
        memberships
            .iter()
            .fold(0, |acc, &k| acc * self.mf_per_input + k)
    }

    /// Firing state and crisp output for the given error inputs.
    pub fn evaluate(&self, inputs: &[T]) -> Result<(FiringState<T>, T)> {
        let firing = firing_strengths(inputs, self)?;
        let u = output(&firing, &self.consequents)?;
        Ok((firing, u))
    }

    pub fn snapshot(&self) -> ParamSnapshot<T> {
        let k = self.mf_per_input;
        ParamSnapshot {
            centers: self.centers.chunks(k).map(<[T]>::to_vec).collect(),
            widths: self.widths.chunks(k).map(<[T]>::to_vec).collect(),
            consequents: self.consequents.clone(),
            inputs: self.inputs,
            mf_per_input: k,
        }
    }

    pub fn from_snapshot(snap: ParamSnapshot<T>) -> Result<Self> {
        let flatten = |rows: Vec<Vec<T>>, what| -> Result<Vec<T>> {
            if rows.len() != snap.inputs || rows.iter().any(|r| r.len() != snap.mf_per_input) {
                return Err(Error::LengthMismatch {
                    what,
                    expected: snap.inputs * snap.mf_per_input,
                    actual: rows.iter().map(Vec::len).sum(),
                });
            }
            Ok(rows.into_iter().flatten().collect())
        };
        let centers = flatten(snap.centers, "snapshot centers")?;
        let widths = flatten(snap.widths, "snapshot widths")?;
        Self::new(
            snap.inputs,
            snap.mf_per_input,
            centers,
            widths,
            snap.consequents,
        )
    }
}

/// JSON checkpoint of a network: `{centers, widths, consequents, I, K}` with
/// `centers[i][k]` and `widths[i][k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSnapshot<T> {
    pub centers: Vec<Vec<T>>,
    pub widths: Vec<Vec<T>>,
    pub consequents: Vec<T>,
    #[serde(rename = "I")]
    pub inputs: usize,
    #[serde(rename = "K")]
    pub mf_per_input: usize,
}

/// Memberships, raw and normalized firing strengths of one evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FiringState<T> {
    /// Input-major `μ_ik`, same layout as the network centers.
    pub memberships: Vec<T>,
    pub raw: Vec<T>,
    pub normalized: Vec<T>,
    /// Set when every raw strength underflowed and the normalized strengths
    /// fell back to uniform.
    pub fallback: bool,
}

impl<T: Real> FiringState<T> {
    /// Builds a state directly from raw strengths.
    pub fn from_raw(raw: Vec<T>) -> Self {
        let n = raw.len();
        let total = ordered_sum(&mut raw.clone());
        let (normalized, fallback) = if total > T::zero() && total.is_finite() {
            (raw.iter().map(|&w| w / total).collect(), false)
        } else {
            (vec![T::one() / T::of(n as f64); n], true)
        };
        Self {
            memberships: Vec::new(),
            raw,
            normalized,
            fallback,
        }
    }
}

/// Prod-t firing strengths and their normalization.
pub fn firing_strengths<T: Real>(
    inputs: &[T],
    params: &NeuroFuzzyParams<T>,
) -> Result<FiringState<T>> {
    if inputs.len() != params.inputs {
        return Err(Error::LengthMismatch {
            what: "network inputs",
            expected: params.inputs,
            actual: inputs.len(),
        });
    }
    let k = params.mf_per_input;
    let memberships: Vec<T> = params
        .centers
        .iter()
        .zip(&params.widths)
        .enumerate()
        .map(|(j, (&c, &sigma))| gaussian(inputs[j / k], c, sigma))
        .collect();

    let raw = (0..params.rule_count())
        .map(|r| {
            let mut rest = r;
            let mut digits = vec![0usize; params.inputs];
            for d in digits.iter_mut().rev() {
                *d = rest % k;
                rest /= k;
            }
            digits
                .iter()
                .enumerate()
                .fold(T::one(), |w, (i, &mf)| w * memberships[i * k + mf])
        })
        .collect();

    let mut state = FiringState::from_raw(raw);
    state.memberships = memberships;
    Ok(state)
}

/// Crisp network output `Σ w̃_r f_r`.
pub fn output<T: Real>(firing: &FiringState<T>, consequents: &[T]) -> Result<T> {
    if firing.normalized.len() != consequents.len() {
        return Err(Error::LengthMismatch {
            what: "consequents vs rules",
            expected: firing.normalized.len(),
            actual: consequents.len(),
        });
    }
    let mut terms: Vec<T> = firing
        .normalized
        .iter()
        .zip(consequents)
        .map(|(&w, &f)| w * f)
        .collect();
    Ok(ordered_sum(&mut terms))
}
