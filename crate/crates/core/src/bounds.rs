//! Covering-number bounds for `K = [0,1]^(d×n)` under column permutations,
//! evaluated exactly with arbitrary-precision integers.
//!
//! | formula | value |
//! |---|---|
//! | quotient (upper) | `C(n + k^d − 1, n)`, `k = ⌈1/(2ε)⌉` |
//! | Hilbert, order `m` (upper) | `C(n + ⌈1/(2δ)⌉ − 1, n)`, `δ = (ε − 2^(−m−1))^d / 4` |
//! | lexsort (lower) | `k^((d−1)n + 1)`, `ε = 1/(2k)` |
//! | hypercube (exact) | `k^(nd)`, `ε = 1/(2k)` |
//!
//! Without an order the Hilbert bound uses the `m → ∞` limit `δ = ε^d / 4`.
//! Every [`LogValue`] carries a `log10` computed independently of its exact
//! integer (log-gamma or a sum of logarithms), so the two can be cross-checked.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};

/// Exact integers are not materialised beyond this many decimal digits.
pub const MAX_EXACT_DIGITS: f64 = 200_000.0;

/// A strictly positive exact rational tolerance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Epsilon(BigRational);

impl Epsilon {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if numer == 0 || denom == 0 {
            return domain(format!("epsilon {numer}/{denom} must be positive and finite"));
        }
        Ok(Self(BigRational::new(numer.into(), denom.into())))
    }

    /// `1 / (2k)`.
    pub fn from_half_inverse(k: u64) -> Result<Self> {
        Self::new(1, 2 * k)
    }

    /// Converts a float, snapping to `1/q` when it agrees to 1e−12 relative.
    pub fn from_f64(value: f64) -> Result<Self> {
        if !(value > 0.0) || !value.is_finite() {
            return domain(format!("epsilon must be positive, got {value}"));
        }
        let q = (1.0 / value).round();
        if q >= 1.0 && q < 1e15 && ((1.0 / q) - value).abs() <= 1e-12 * value {
            return Self::new(1, q as u64);
        }
        BigRational::from_float(value)
            .map(Self)
            .ok_or_else(|| Error::Domain(format!("cannot represent epsilon {value}")))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.0)
    }

    /// `⌈1/(2ε)⌉`.
    pub fn cells_per_axis(&self) -> BigUint {
        ceil_pos(&(self.0.recip() / BigInt::from(2)))
    }

    /// `k` such that `ε = 1/(2k)`, if there is one.
    pub fn half_inverse(&self) -> Option<BigUint> {
        let r = self.0.recip() / BigInt::from(2);
        r.is_integer().then(|| r.to_integer().magnitude().clone())
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    /// Accepts `p/q`, integers and plain decimals (`0.125` is read as `1/8`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Domain(format!("cannot parse epsilon '{s}'"));
        let ratio = if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            BigRational::new(p, q)
        } else {
            let (int, frac) = s.split_once('.').unwrap_or((s, ""));
            if frac.chars().any(|c| !c.is_ascii_digit()) {
                return Err(bad());
            }
            let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
            BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32))
        };
        if !ratio.is_positive() {
            return domain(format!("epsilon must be positive, got '{s}'"));
        }
        Ok(Self(ratio))
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn ceil_pos(r: &BigRational) -> BigUint {
    r.ceil().to_integer().magnitude().clone()
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Inputs shared by the bound formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundQuery {
    pub n: u64,
    pub d: u32,
    pub epsilon: Epsilon,
    /// Hilbert curve order; `None` is the `m → ∞` limit.
    pub order: Option<u32>,
}

impl BoundQuery {
    pub fn new(n: u64, d: u32, epsilon: Epsilon) -> Self {
        Self {
            n,
            d,
            epsilon,
            order: None,
        }
    }

    pub fn with_order(mut self, order: Option<u32>) -> Self {
        self.order = order;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return domain(format!("n and d must be at least 1 (n = {}, d = {})", self.n, self.d));
        }
        if self.epsilon.0 >= BigRational::one() {
            return domain(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        Ok(())
    }

    fn half_inverse(&self) -> Result<BigUint> {
        self.epsilon.half_inverse().ok_or_else(|| {
            Error::Domain(format!(
                "epsilon = {} is not of the form 1/(2k) for an integer k",
                self.epsilon
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaId {
    QuotientUpper,
    HilbertUpper,
    LexsortLower,
    HypercubeExact,
    GroupCardinality,
    MultisetCount,
}

impl FormulaId {
    pub fn label(self) -> &'static str {
        match self {
            FormulaId::QuotientUpper => "Quotient (upper bound)",
            FormulaId::HilbertUpper => "Hilbert (upper bound)",
            FormulaId::LexsortLower => "Lexsort (lower bound)",
            FormulaId::HypercubeExact => "Hypercube (exact)",
            FormulaId::GroupCardinality => "Group cardinality (upper bound)",
            FormulaId::MultisetCount => "Multiset count",
        }
    }
}

/// A possibly astronomically large count: its base-10 logarithm and, when
/// affordable, the exact integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    pub log10: f64,
    #[serde(skip)]
    pub exact: Option<BigUint>,
    pub formula: FormulaId,
}

impl LogValue {
    fn new(log10: f64, exact: Option<BigUint>, formula: FormulaId) -> Self {
        Self {
            log10,
            exact,
            formula,
        }
    }

    /// Mantissa digits (as an integer with `sig` digits) and decimal exponent.
    fn rounded(&self, sig: usize) -> (u64, i64) {
        let sig = sig.max(1);
        if let Some(x) = &self.exact {
            let digits = x.to_str_radix(10);
            let exp = digits.len() as i64 - 1;
            if digits.len() <= sig {
                let m: u64 = digits.parse().unwrap_or(0);
                return (m * 10u64.pow((sig - digits.len()) as u32), exp);
            }
            let head: u64 = digits[..sig].parse().unwrap_or(0);
            let up = digits.as_bytes()[sig] >= b'5';
            let m = head + up as u64;
            if m == 10u64.pow(sig as u32) {
                return (m / 10, exp + 1);
            }
            return (m, exp);
        }
        let mut exp = self.log10.floor() as i64;
        let frac = self.log10 - exp as f64;
        let scale = 10f64.powi(sig as i32 - 1);
        let mut m = (10f64.powf(frac) * scale).round() as u64;
        if m >= 10u64.pow(sig as u32) {
            m /= 10;
            exp += 1;
        }
        (m, exp)
    }

    /// Mantissa rounded to `sig` significant figures and the decimal exponent.
    pub fn mantissa_exponent(&self, sig: usize) -> (f64, i64) {
        let (m, e) = self.rounded(sig);
        (m as f64 / 10f64.powi(sig.max(1) as i32 - 1), e)
    }

    /// Scientific notation with two significant figures, e.g. `2.1e+0036`.
    pub fn sci(&self) -> String {
        let (m, e) = self.rounded(2);
        let sign = if e < 0 { '-' } else { '+' };
        format!("{}.{}e{sign}{:04}", m / 10, m % 10, e.abs())
    }

    /// Number of decimal digits, `⌊log10⌋ + 1`.
    pub fn digits(&self) -> u64 {
        match &self.exact {
            Some(x) => x.to_str_radix(10).len() as u64,
            None => self.log10.floor() as u64 + 1,
        }
    }

    /// `log10` recomputed from the exact integer, if present.
    pub fn exact_log10(&self) -> Option<f64> {
        self.exact.as_ref().map(big_log10)
    }
}

/// Base-10 logarithm of a big integer from its leading digits.
pub fn big_log10(x: &BigUint) -> f64 {
    let s = x.to_str_radix(10);
    let lead = &s[..s.len().min(17)];
    let lead_value: f64 = lead.parse().unwrap_or(0.0);
    lead_value.log10() + (s.len() - lead.len()) as f64
}

const LN_10: f64 = std::f64::consts::LN_10;

/// `log10 C(top, k)` without forming the integer.
fn log10_binomial(top: &BigUint, k: u64) -> f64 {
    let top_f = top.to_f64().unwrap_or(f64::INFINITY);
    let k_f = k as f64;
    if top_f < 4.5e15 {
        (ln_gamma(top_f + 1.0) - ln_gamma(k_f + 1.0) - ln_gamma(top_f - k_f + 1.0)) / LN_10
    } else {
        // log-gamma loses all precision here; sum log((top − k + i)/i) instead.
        (1..=k).map(|i| ((top_f - k_f + i as f64) / i as f64).log10()).sum()
    }
}

fn exact_binomial(top: &BigUint, k: u64, log10: f64) -> Option<BigUint> {
    (log10 < MAX_EXACT_DIGITS).then(|| binomial(top, k))
}

/// `C(top, k)` by the multiplicative formula.
pub fn binomial(top: &BigUint, k: u64) -> BigUint {
    let kb = BigUint::from(k);
    if &kb > top {
        return BigUint::zero();
    }
    let k = k.min((top - &kb).to_u64().unwrap_or(u64::MAX));
    let base = top - BigUint::from(k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= &base + BigUint::from(i);
        acc /= BigUint::from(i);
    }
    acc
}

fn power(base: &BigUint, exp: u64, formula: FormulaId) -> Result<LogValue> {
    let log10 = exp as f64 * base.to_f64().unwrap_or(f64::INFINITY).log10();
    let exact = if log10 < MAX_EXACT_DIGITS {
        let e = u32::try_from(exp).map_err(|_| Error::Size(format!("exponent {exp} too large")))?;
        Some(base.pow(e))
    } else {
        None
    };
    Ok(LogValue::new(log10, exact, formula))
}

/// `C(n + m − 1, n)`: the number of multisets of size `n` drawn from `m` symbols,
/// i.e. the orbits of `[m]^n` under permutation of coordinates.
pub fn multiset_count(n: u64, m: u64) -> Result<BigUint> {
    if n == 0 || m == 0 {
        return domain("multiset_count needs n, m >= 1");
    }
    Ok(binomial(&BigUint::from(n + m - 1), n))
}

fn multiset_bound(n: u64, symbols: &BigUint, formula: FormulaId) -> LogValue {
    let top = symbols + BigUint::from(n) - BigUint::one();
    let log10 = log10_binomial(&top, n);
    LogValue::new(log10, exact_binomial(&top, n, log10), formula)
}

/// Upper bound on the covering number of the quotient `K/S_n`.
pub fn bound_quotient_upper(q: &BoundQuery) -> Result<LogValue> {
    q.validate()?;
    let k = q.epsilon.cells_per_axis();
    let cells = k.pow(q.d);
    Ok(multiset_bound(q.n, &cells, FormulaId::QuotientUpper))
}

/// Lower bound on the covering number of the lexsort image; `ε` must be `1/(2k)`.
pub fn bound_lexsort_lower(q: &BoundQuery) -> Result<LogValue> {
    q.validate()?;
    let k = q.half_inverse()?;
    let exp = (q.d as u64 - 1) * q.n + 1;
    power(&k, exp, FormulaId::LexsortLower)
}

/// Exact covering number of the hypercube `[0,1]^(d×n)` under `ρ_∞`; `ε = 1/(2k)`.
pub fn bound_hypercube_exact(q: &BoundQuery) -> Result<LogValue> {
    q.validate()?;
    let k = q.half_inverse()?;
    power(&k, q.n * q.d as u64, FormulaId::HypercubeExact)
}

/// Upper bound on the covering number of the order-`m` Hilbert canonization image.
///
/// Requires `ε > 2^(−m−1)`; with no order the `m → ∞` limit is used.
pub fn bound_hilbert_upper(q: &BoundQuery) -> Result<LogValue> {
    q.validate()?;
    let margin = match q.order {
        Some(m) => {
            let half_cell = BigRational::new(BigInt::one(), BigInt::one() << (m as usize + 1));
            let margin = q.epsilon.as_ratio() - half_cell;
            if !margin.is_positive() {
                return Err(Error::Hypothesis(format!(
                    "epsilon = {} must exceed 2^-{} for curve order {m}",
                    q.epsilon,
                    m + 1
                )));
            }
            margin
        }
        None => q.epsilon.as_ratio().clone(),
    };
    let delta = num_traits::pow(margin, q.d as usize) / BigInt::from(4);
    let cells = ceil_pos(&(delta.recip() / BigInt::from(2)));
    Ok(multiset_bound(q.n, &cells, FormulaId::HilbertUpper))
}

/// `|G| · N(K/G)`, the covering number of `K` bounded through a finite group.
pub fn bound_group_cardinality(quotient: &LogValue, group_size: &BigUint) -> Result<LogValue> {
    if group_size.is_zero() {
        return domain("group size must be at least 1");
    }
    let log10 = quotient.log10 + big_log10(group_size);
    let exact = quotient.exact.as_ref().map(|x| x * group_size);
    Ok(LogValue::new(log10, exact, FormulaId::GroupCardinality))
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Inputs of the robustness-style generalization bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizationInputs {
    /// Lipschitz constant of the loss.
    pub c_loss: f64,
    /// Lipschitz constant of the learned hypothesis.
    pub c_hypothesis: f64,
    /// Lipschitz constant of the target function.
    pub c_target: f64,
    pub epsilon: f64,
    /// Upper bound on the loss.
    pub loss_bound: f64,
    pub covering_number: f64,
    /// Failure probability.
    pub delta: f64,
    pub samples: u64,
}

/// `2 c_ℓ (c_h + c_f) ε + M √((2 N ln 2 + 2 ln(1/δ)) / n)`.
///
/// The covering number enters linearly, not through its logarithm.
pub fn generalization_rhs(g: &GeneralizationInputs) -> Result<f64> {
    if !(g.delta > 0.0 && g.delta <= 1.0) {
        return domain(format!("delta must lie in (0, 1], got {}", g.delta));
    }
    if g.samples == 0 {
        return domain("sample count must be positive");
    }
    let non_negative = [
        g.c_loss,
        g.c_hypothesis,
        g.c_target,
        g.epsilon,
        g.loss_bound,
        g.covering_number,
    ];
    if non_negative.iter().any(|v| !(*v >= 0.0)) {
        return domain("Lipschitz constants, epsilon, loss bound and covering number must be >= 0");
    }
    let lipschitz = 2.0 * g.c_loss * (g.c_hypothesis + g.c_target) * g.epsilon;
    let inner = (2.0 * g.covering_number * std::f64::consts::LN_2 + 2.0 * (1.0 / g.delta).ln())
        / g.samples as f64;
    Ok(lipschitz + g.loss_bound * inner.sqrt())
}

/// One column of the bounds table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub n: u64,
    pub quotient: LogValue,
    pub hilbert: LogValue,
    pub lexsort: LogValue,
    pub hypercube: LogValue,
}

impl BoundsRow {
    pub fn values(&self) -> [&LogValue; 4] {
        [&self.quotient, &self.hilbert, &self.lexsort, &self.hypercube]
    }
}

/// All four bounds for every `n` in `ns`.
pub fn bounds_table(ns: &[u64], d: u32, epsilon: &Epsilon, order: Option<u32>) -> Result<Vec<BoundsRow>> {
    ns.iter()
        .map(|&n| {
            let q = BoundQuery::new(n, d, epsilon.clone()).with_order(order);
            Ok(BoundsRow {
                n,
                quotient: bound_quotient_upper(&q)?,
                hilbert: bound_hilbert_upper(&q)?,
                lexsort: bound_lexsort_lower(&q)?,
                hypercube: bound_hypercube_exact(&q)?,
            })
        })
        .collect()
}
