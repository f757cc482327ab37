use crate::error::{Error, Result};
use crate::math::ln_factorial;

/// Where the infinite Poisson sums are cut off.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TruncationPolicy {
    /// Largest admissible tail mass `P[N > Y_max]`.
    pub epsilon_tail: f64,
    /// Hard upper bound on the summation index.
    pub y_max_cap: u64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { epsilon_tail: 1e-12, y_max_cap: 100_000 }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_tail > 0.0 && self.epsilon_tail < 1.0) {
            return Err(Error::Domain(alloc::format!("epsilon_tail must lie in (0, 1), got {}", self.epsilon_tail)));
        }
        if self.y_max_cap == 0 {
            return Err(Error::domain("y_max_cap must be positive"));
        }
        Ok(())
    }
}

/// Chernoff bound on `ln P[N >= k]` for `N ~ Poisson(mean)` and `k > mean`.
fn ln_chernoff_tail(mean: f64, k: f64) -> f64 {
    -mean + k - k * libm::log(k / mean)
}

fn ln_pmf(mean: f64, y: u64) -> f64 {
    -mean + y as f64 * libm::log(mean) - ln_factorial(y)
}

/// Upper bound on `P[N > k]`: the terms `k+1 ..= k+m` summed exactly plus a
/// geometric bound on the rest (term ratios `mean/(j+1)` fall below one
/// past the mode).
fn tail_above(mean: f64, k: u64) -> f64 {
    let mut j = k + 1;
    let mut term = libm::exp(ln_pmf(mean, j));
    let mut sum = 0.0;
    loop {
        sum += term;
        let ratio = mean / (j + 1) as f64;
        let next = term * ratio;
        if ratio < 0.5 && next < 1e-20 * sum.max(f64::MIN_POSITIVE) {
            return sum + next / (1.0 - ratio);
        }
        if next == 0.0 {
            return sum;
        }
        term = next;
        j += 1;
    }
}

/// Smallest `Y_max >= mean` with `P[Poisson(mean) > Y_max] < epsilon_tail`.
///
/// The Chernoff bound locates a certified starting index; the exact tail,
/// accumulated downward from there, then pins the smallest admissible one.
pub fn truncation_index(mean: f64, policy: &TruncationPolicy) -> Result<u64> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::Domain(alloc::format!("Poisson mean must be finite and >= 0, got {mean}")));
    }
    policy.validate()?;
    if mean == 0.0 {
        return Ok(0);
    }
    let floor = libm::ceil(mean) as u64;
    let ln_eps = libm::log(policy.epsilon_tail);
    // P[N > y] = P[N >= y + 1]
    let mut upper = floor.max(1);
    while ((upper + 1) as f64) <= mean || ln_chernoff_tail(mean, (upper + 1) as f64) >= ln_eps {
        upper += 1 + upper / 64;
        if upper > policy.y_max_cap {
            upper = policy.y_max_cap;
            break;
        }
    }
    let mut tail = tail_above(mean, upper);
    if tail >= policy.epsilon_tail {
        return Err(Error::TruncationOverflow { mean, cap: policy.y_max_cap });
    }
    let mut k = upper;
    while k > floor {
        let t = tail + libm::exp(ln_pmf(mean, k));
        if t >= policy.epsilon_tail {
            break;
        }
        tail = t;
        k -= 1;
    }
    Ok(k)
}
