//! Closed-form asymptotics of the secrecy capacity: low-intensity
//! coefficients, the per-unit-cost slope `phi`, the continuous-time upper
//! bound, the loglog sandwich and the high-intensity constant.

use alloc::format;
use alloc::string::String;

use crate::channel::{rates, ChannelParams, DiscreteDistribution, IntensityConstraints, TruncationPolicy};
use crate::error::{Error, Result};
use crate::math::bisect;

/// `((1 + u) ln(1 + u) - u) / u`, accurate for small `u`.
fn r(u: f64) -> f64 {
    if u < 1e-3 {
        u / 2.0 - u * u / 6.0 + u * u * u / 12.0 - u * u * u * u / 20.0
    } else {
        ((1.0 + u) * libm::log1p(u) - u) / u
    }
}

/// Per-unit-cost slope
/// `phi(x) = (a_E - a_B) + (a_B + l_B/x) ln(1 + a_B x/l_B) - (a_E + l_E/x) ln(1 + a_E x/l_E)`.
pub fn phi(x: f64, params: &ChannelParams) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("phi needs a finite x > 0, got {x}")));
    }
    let (ab, lb, ae, le) = (params.alpha_b(), params.lambda_b(), params.alpha_e(), params.lambda_e());
    Ok(ab * r(ab * x / lb) - ae * r(ae * x / le))
}

/// Coefficient `c` in `C_S ~ c A^2` as `A -> 0` with `E = p A`.
pub fn low_intensity_quadratic(params: &ChannelParams, p: f64) -> Result<f64> {
    params.require_degraded()?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("the average-to-peak ratio must lie in (0, 1], got {p}")));
    }
    let c = params.alpha_b() * params.alpha_b() / params.lambda_b()
        - params.alpha_e() * params.alpha_e() / params.lambda_e();
    Ok(if p >= 0.5 { c / 8.0 } else { 0.5 * p * (1.0 - p) * c })
}

/// Slope `phi(A)` in `C_S ~ phi(A) E` as `E -> 0` with `A` fixed.
pub fn low_intensity_linear_slope(params: &ChannelParams, peak: f64) -> Result<f64> {
    phi(peak, params)
}

/// Slope `a ln(l_E / l_B)` of the average-only law with equal gains.
pub fn avg_only_equal_gains_slope(params: &ChannelParams) -> Result<f64> {
    if params.alpha_b() != params.alpha_e() {
        return Err(Error::WrongRegime(format!(
            "the equal-gains slope needs alpha_b == alpha_e, got {} and {}",
            params.alpha_b(),
            params.alpha_e()
        )));
    }
    params.require_degraded()?;
    Ok(params.alpha_b() * libm::log(params.lambda_e() / params.lambda_b()))
}

/// Gap parameters of the auxiliary channel used in the upper bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DegradationParams {
    pub lambda_d: f64,
    pub alpha_tilde: f64,
    pub lambda_tilde: f64,
}

impl DegradationParams {
    pub fn new(params: &ChannelParams) -> Result<Self> {
        params.require_degraded()?;
        let (ab, lb, ae, le) = (params.alpha_b(), params.lambda_b(), params.alpha_e(), params.lambda_e());
        let lambda_d = if ab == ae { le - lb } else { ab / ae * le - lb };
        Ok(DegradationParams { lambda_d, alpha_tilde: ab - ae, lambda_tilde: (ab / ae - 1.0) * le })
    }
}

/// Lower and upper bounds of the average-only law with different gains.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SandwichBounds {
    pub lower: f64,
    pub upper: f64,
    /// Nonzero mass point of the binary law behind `lower`.
    pub zeta: f64,
}

/// `lower` is `f0` of the binary law `{0, zeta}` with mean `E`,
/// `zeta = sqrt(l_B / (a_B^2 Delta) ln(1/E))`; `upper` is
/// `a_B ln(l_E a_B / (l_B a_E)) E + 2 (a_B - a_E) E ln ln(1/E)`.
pub fn avg_only_diff_gains_bounds(params: &ChannelParams, average: f64) -> Result<SandwichBounds> {
    params.require_degraded()?;
    let (ab, lb, ae, le) = (params.alpha_b(), params.lambda_b(), params.alpha_e(), params.lambda_e());
    if !(ab > ae) {
        return Err(Error::WrongRegime(format!("the loglog law needs alpha_b > alpha_e, got {ab} and {ae}")));
    }
    if !(average > 0.0 && average < libm::exp(-1.0)) {
        return Err(Error::WrongRegime(format!("the loglog law needs 0 < E < 1/e, got {average}")));
    }
    let ln_inv = -libm::log(average);
    let zeta = libm::sqrt(lb / (ab * ab * params.delta()) * ln_inv);
    if zeta < average {
        return Err(Error::WrongRegime(format!("E = {average} exceeds the binary mass point {zeta}")));
    }
    let q = average / zeta;
    let dist = DiscreteDistribution::new(alloc::vec![0.0, zeta], alloc::vec![1.0 - q, q])?;
    let lower = rates(&dist, params, &TruncationPolicy::default())?.f0;
    let upper = ab * libm::log(le * ab / (lb * ae)) * average + 2.0 * (ab - ae) * average * libm::log(ln_inv);
    Ok(SandwichBounds { lower, upper, zeta })
}

/// Upper bound on the limit of `C_S` as the intensities grow:
/// `(l_D^2 / 2 + l_D / Delta) / l_B`, plus `ln(a_B / a_E) / Delta` when
/// the gains differ.
pub fn high_intensity_bound(params: &ChannelParams) -> Result<f64> {
    let lambda_d = DegradationParams::new(params)?.lambda_d;
    let delta = params.delta();
    let base = (lambda_d * lambda_d / 2.0 + lambda_d / delta) / params.lambda_b();
    if params.alpha_b() == params.alpha_e() {
        Ok(base)
    } else {
        Ok(base + libm::log(params.alpha_b() / params.alpha_e()) / delta)
    }
}

/// Secrecy capacity of the continuous-time channel and its optimal on-probability.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CtBound {
    pub value: f64,
    pub p_star: f64,
}

/// `K(x) - K(0)` for `K(x) = (a_B x + l_B) ln(a_B x + l_B) - (a_E x + l_E) ln(a_E x + l_E)`.
fn k_rise(x: f64, params: &ChannelParams) -> f64 {
    let part = |a: f64, l: f64| a * x * libm::log(a * x + l) + l * libm::log1p(a * x / l);
    part(params.alpha_b(), params.lambda_b()) - part(params.alpha_e(), params.lambda_e())
}

fn k_slope(x: f64, params: &ChannelParams) -> f64 {
    let part = |a: f64, l: f64| a * libm::log(a * x + l) + a;
    part(params.alpha_b(), params.lambda_b()) - part(params.alpha_e(), params.lambda_e())
}

/// `K(x)` itself.
pub fn ct_k(x: f64, params: &ChannelParams) -> f64 {
    let part = |a: f64, l: f64| (a * x + l) * libm::log(a * x + l);
    part(params.alpha_b(), params.lambda_b()) - part(params.alpha_e(), params.lambda_e())
}

/// `p K(A) + (1 - p) K(0) - K(p A)` at the on-probability `p` solving
/// `K'(p A) = (K(A) - K(0)) / A`, clamped to `E / A` under an average bound.
pub fn ct_secrecy_capacity(params: &ChannelParams, peak: f64, average: Option<f64>) -> Result<CtBound> {
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::Domain(format!("the peak must be finite and > 0, got {peak}")));
    }
    params.require_degraded()?;
    if let Some(e) = average {
        if !(e > 0.0) {
            return Err(Error::Domain(format!("the average must be > 0, got {e}")));
        }
    }
    let clamp = |p: f64| average.map_or(p, |e| p.min(e / peak));
    if params.is_identical() {
        return Ok(CtBound { value: 0.0, p_star: clamp(0.5) });
    }
    let chord = k_rise(peak, params) / peak;
    let root = bisect(|p| k_slope(p * peak, params) - chord, 1e-12, 1.0, 1e-15)?;
    let p = clamp(root);
    Ok(CtBound { value: p * k_rise(peak, params) - k_rise(p * peak, params), p_star: p })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Regime {
    PeakOnlyLow,
    PeakAvgRatioLow,
    FixedPeakAvgLow,
    AvgOnlyEqualGainsLow,
    AvgOnlyDiffGainsLow,
    HighIntensity,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::PeakOnlyLow => "peak-only-low",
            Regime::PeakAvgRatioLow => "peak-avg-ratio-low",
            Regime::FixedPeakAvgLow => "fixed-peak-avg-low",
            Regime::AvgOnlyEqualGainsLow => "avg-only-equal-gains-low",
            Regime::AvgOnlyDiffGainsLow => "avg-only-diff-gains-low",
            Regime::HighIntensity => "high-intensity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Estimate {
    Coefficient(f64),
    Bounds { lower: f64, upper: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AsymptoticReport {
    pub regime: Regime,
    pub value_or_bounds: Estimate,
    pub scaling_law: String,
    pub note: Option<String>,
}

/// Intensities at or below `LOW_INTENSITY_FRACTION * l_B / a_B` count as
/// low.
pub const LOW_INTENSITY_FRACTION: f64 = 0.1;

/// Picks the asymptotic law that applies to the constraint set and
/// evaluates its coefficient or bounds.
pub fn classify_regime(params: &ChannelParams, constraints: &IntensityConstraints) -> Result<AsymptoticReport> {
    params.require_degraded()?;
    let low = LOW_INTENSITY_FRACTION * params.lambda_b() / params.alpha_b();
    let report = |regime, value_or_bounds, law: &str, note: Option<String>| AsymptoticReport {
        regime,
        value_or_bounds,
        scaling_law: law.into(),
        note,
    };
    let high = || -> Result<AsymptoticReport> {
        Ok(report(
            Regime::HighIntensity,
            Estimate::Coefficient(high_intensity_bound(params)?),
            "C_S = O(1)",
            Some("upper bound on the limiting constant".into()),
        ))
    };
    match (constraints.peak(), constraints.average()) {
        (Some(a), avg) => match constraints.binding_average() {
            None if a <= low => {
                let c = low_intensity_quadratic(params, avg.map_or(1.0, |e| e / a))?;
                Ok(report(Regime::PeakOnlyLow, Estimate::Coefficient(c), "C_S ~ c*A^2", None))
            }
            Some(e) if a <= low => {
                let c = low_intensity_quadratic(params, e / a)?;
                Ok(report(Regime::PeakAvgRatioLow, Estimate::Coefficient(c), "C_S ~ c*A^2", None))
            }
            Some(e) if e <= low => {
                let c = low_intensity_linear_slope(params, a)?;
                Ok(report(Regime::FixedPeakAvgLow, Estimate::Coefficient(c), "C_S ~ c*E", None))
            }
            _ => high(),
        },
        (None, Some(e)) if e <= low => {
            if params.alpha_b() == params.alpha_e() {
                let c = avg_only_equal_gains_slope(params)?;
                return Ok(report(Regime::AvgOnlyEqualGainsLow, Estimate::Coefficient(c), "C_S ~ c*E", None));
            }
            match avg_only_diff_gains_bounds(params, e) {
                Ok(b) => Ok(report(
                    Regime::AvgOnlyDiffGainsLow,
                    Estimate::Bounds { lower: b.lower, upper: b.upper },
                    "C_S ~ c*E*loglog(1/E)",
                    Some("the finite-E upper bound keeps the linear term; only its loglog coefficient is asymptotically sharp".into()),
                )),
                Err(Error::WrongRegime(_)) => high(),
                Err(err) => Err(err),
            }
        }
        (None, Some(_)) => high(),
        (None, None) => Err(Error::domain("constraints need a peak or an average bound")),
    }
}
