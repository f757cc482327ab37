use alloc::format;

use crate::error::{Error, Result};

/// Which receiver a kernel refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Side {
    Legitimate,
    Eavesdropper,
}

/// Physical parameters of the wiretap pair. All fields are strictly
/// positive; the dark currents in particular may not be zero.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawParams", into = "RawParams"))]
pub struct ChannelParams {
    alpha_b: f64,
    lambda_b: f64,
    alpha_e: f64,
    lambda_e: f64,
    delta: f64,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct RawParams {
    alpha_b: f64,
    lambda_b: f64,
    alpha_e: f64,
    lambda_e: f64,
    delta: f64,
}

#[cfg(feature = "serde")]
impl TryFrom<RawParams> for ChannelParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        ChannelParams::new(r.alpha_b, r.lambda_b, r.alpha_e, r.lambda_e, r.delta)
    }
}

#[cfg(feature = "serde")]
impl From<ChannelParams> for RawParams {
    fn from(p: ChannelParams) -> Self {
        RawParams { alpha_b: p.alpha_b, lambda_b: p.lambda_b, alpha_e: p.alpha_e, lambda_e: p.lambda_e, delta: p.delta }
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::domain(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl ChannelParams {
    pub fn new(alpha_b: f64, lambda_b: f64, alpha_e: f64, lambda_e: f64, delta: f64) -> Result<Self> {
        Ok(ChannelParams {
            alpha_b: positive("alpha_b", alpha_b)?,
            lambda_b: positive("lambda_b", lambda_b)?,
            alpha_e: positive("alpha_e", alpha_e)?,
            lambda_e: positive("lambda_e", lambda_e)?,
            delta: positive("delta", delta)?,
        })
    }

    /// A pair whose two receivers both see the channel `(alpha, lambda)`.
    /// Solving it with `mu = 1` gives the capacity of that single channel.
    pub fn single(alpha: f64, lambda: f64, delta: f64) -> Result<Self> {
        Self::new(alpha, lambda, alpha, lambda, delta)
    }

    pub fn alpha_b(&self) -> f64 {
        self.alpha_b
    }
    pub fn lambda_b(&self) -> f64 {
        self.lambda_b
    }
    pub fn alpha_e(&self) -> f64 {
        self.alpha_e
    }
    pub fn lambda_e(&self) -> f64 {
        self.lambda_e
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gain(&self, side: Side) -> f64 {
        match side {
            Side::Legitimate => self.alpha_b,
            Side::Eavesdropper => self.alpha_e,
        }
    }

    pub fn dark(&self, side: Side) -> f64 {
        match side {
            Side::Legitimate => self.lambda_b,
            Side::Eavesdropper => self.lambda_e,
        }
    }

    /// Returns a copy with `delta` replaced.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.alpha_b, self.lambda_b, self.alpha_e, self.lambda_e, delta)
    }

    /// The legitimate receiver's channel on its own, as an identical pair.
    pub fn legitimate_only(&self) -> Self {
        Self { alpha_e: self.alpha_b, lambda_e: self.lambda_b, ..*self }
    }

    /// The eavesdropper's channel on its own, as an identical pair.
    pub fn eavesdropper_only(&self) -> Self {
        Self { alpha_b: self.alpha_e, lambda_b: self.lambda_e, ..*self }
    }

    /// Both degradedness inequalities hold, ignoring strictness.
    pub fn is_weakly_degraded(&self) -> bool {
        self.alpha_b >= self.alpha_e && self.lambda_b * self.alpha_e <= self.lambda_e * self.alpha_b
    }

    /// `alpha_b >= alpha_e` and `lambda_b/alpha_b <= lambda_e/alpha_e`, with
    /// at least one strict.
    pub fn is_degraded(&self) -> bool {
        self.is_weakly_degraded() && !self.is_identical()
    }

    pub fn is_identical(&self) -> bool {
        self.alpha_b == self.alpha_e && self.lambda_b == self.lambda_e
    }

    /// Succeeds for degraded and for identical pairs.
    pub fn require_degraded(&self) -> Result<()> {
        if self.is_weakly_degraded() {
            Ok(())
        } else {
            Err(Error::NotDegraded {
                alpha_b: self.alpha_b,
                lambda_b: self.lambda_b,
                alpha_e: self.alpha_e,
                lambda_e: self.lambda_e,
            })
        }
    }
}

/// Peak bound `A` and/or average bound `E` on the input intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawConstraints", into = "RawConstraints"))]
pub struct IntensityConstraints {
    peak: Option<f64>,
    average: Option<f64>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct RawConstraints {
    peak: Option<f64>,
    average: Option<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawConstraints> for IntensityConstraints {
    type Error = Error;
    fn try_from(r: RawConstraints) -> Result<Self> {
        IntensityConstraints::new(r.peak, r.average)
    }
}

#[cfg(feature = "serde")]
impl From<IntensityConstraints> for RawConstraints {
    fn from(c: IntensityConstraints) -> Self {
        RawConstraints { peak: c.peak, average: c.average }
    }
}

impl IntensityConstraints {
    /// At least one bound is required. An average bound above the peak is
    /// vacuous and is clamped to the peak.
    pub fn new(peak: Option<f64>, average: Option<f64>) -> Result<Self> {
        if peak.is_none() && average.is_none() {
            return Err(Error::domain("constraints need a peak or an average bound (both missing)"));
        }
        let peak = peak.map(|a| positive("peak", a)).transpose()?;
        let mut average = average.map(|e| positive("average", e)).transpose()?;
        if let (Some(a), Some(e)) = (peak, average) {
            if e > a {
                average = Some(a);
            }
        }
        Ok(IntensityConstraints { peak, average })
    }

    pub fn peak_only(peak: f64) -> Result<Self> {
        Self::new(Some(peak), None)
    }

    pub fn average_only(average: f64) -> Result<Self> {
        Self::new(None, Some(average))
    }

    pub fn peak_and_average(peak: f64, average: f64) -> Result<Self> {
        Self::new(Some(peak), Some(average))
    }

    pub fn peak(&self) -> Option<f64> {
        self.peak
    }

    pub fn average(&self) -> Option<f64> {
        self.average
    }

    /// The average bound if it can bind, i.e. is strictly below the peak.
    pub fn binding_average(&self) -> Option<f64> {
        match (self.peak, self.average) {
            (Some(a), Some(e)) if e >= a => None,
            (_, e) => e,
        }
    }
}
