//! Truncated formal power series in `u`, with exact rational or complex
//! floating-point coefficients.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Coefficient ring of a [`Series`]. Both carriers are fields of
/// characteristic zero, so `exp` and `log` are well defined.
pub trait Coefficient: Num + Clone + Neg<Output = Self> + Debug {
    fn from_i64(k: i64) -> Self;
    fn to_complex(&self) -> Complex64;
}

impl Coefficient for BigRational {
    fn from_i64(k: i64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl Coefficient for Complex64 {
    fn from_i64(k: i64) -> Self {
        Complex64::new(k as f64, 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }
}

/// Coefficients of `u^0 ..= u^order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    coeffs: Vec<C>,
}

impl<C: Coefficient> Series<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(C::zero());
        }
        Series { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![C::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = C::one();
        s
    }

    /// `c * u^k` truncated at `order`.
    pub fn monomial(c: C, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Series::new((0..=order).map(|k| self.coeff(k)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Series::new(
            (0..=order)
                .map(|k| self.coeffs[k].clone() + other.coeffs[k].clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Series::new(
            (0..=order)
                .map(|k| self.coeffs[k].clone() - other.coeffs[k].clone())
                .collect(),
        )
    }

    pub fn scale(&self, c: &C) -> Self {
        Series::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![C::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Series::new(out)
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeffs[0].clone();
        if c0.is_zero() {
            return Err(Error::Series(
                "inverse needs a nonzero constant term".into(),
            ));
        }
        let n = self.order();
        let mut out: Vec<C> = Vec::with_capacity(n + 1);
        out.push(C::one() / c0.clone());
        for k in 1..=n {
            let mut acc = C::zero();
            for i in 1..=k {
                acc = acc + self.coeffs[i].clone() * out[k - i].clone();
            }
            out.push(-(acc / c0.clone()));
        }
        Ok(Series::new(out))
    }

    /// `exp(s)` via `f' = s' f`; the constant term must vanish.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Series("exp needs a zero constant term".into()));
        }
        let n = self.order();
        let mut out: Vec<C> = Vec::with_capacity(n + 1);
        out.push(C::one());
        for m in 1..=n {
            let mut acc = C::zero();
            for k in 1..=m {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc = acc + C::from_i64(k as i64) * self.coeffs[k].clone() * out[m - k].clone();
            }
            out.push(acc / C::from_i64(m as i64));
        }
        Ok(Series::new(out))
    }

    /// `log(s)`; the constant term must be one.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Series("log needs constant term 1".into()));
        }
        let n = self.order();
        let mut out: Vec<C> = vec![C::zero(); n + 1];
        for m in 1..=n {
            let mut acc = C::zero();
            for (k, o) in out.iter().enumerate().take(m).skip(1) {
                acc = acc + C::from_i64(k as i64) * o.clone() * self.coeffs[m - k].clone();
            }
            out[m] = self.coeffs[m].clone() - acc / C::from_i64(m as i64);
        }
        Ok(Series::new(out))
    }

    /// Integer power; negative exponents need a nonzero constant term.
    pub fn powi(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Series::one(self.order());
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            k >>= 1;
        }
        Ok(acc)
    }

    /// `s^e = exp(e log s)` for a general exponent; constant term must be 1.
    pub fn pow(&self, e: &C) -> Result<Self> {
        self.log()?.scale(e).exp()
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * u + c.to_complex())
    }

    /// Evaluation plus a bound on the omitted tail, see [`TailModel`].
    pub fn eval_with_tail(&self, u: Complex64, model: Option<TailModel>) -> Evaluation {
        let tail_bound = model.map_or(f64::NAN, |m| m.tail_bound(self.order(), u.norm()));
        Evaluation {
            value: self.eval(u),
            tail_bound,
        }
    }
}

impl Series<BigRational> {
    pub fn to_float(&self) -> Series<Complex64> {
        Series::new(self.coeffs.iter().map(Coefficient::to_complex).collect())
    }

    /// `(1 - u^k)^{-e}` for an integer `e`, written out by the binomial series.
    pub fn one_minus_power_pow(k: usize, e: i64, order: usize) -> Result<Self> {
        let base = Series::one(order).sub(&Series::monomial(BigRational::one(), k, order));
        base.powi(-e)
    }
}

/// Value of a truncated series with a bound on `|sum_{j > order} c_j u^j|`
/// (`NaN` when no bound was requested, infinite outside the disc).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Majorant for zeta series whose coefficients satisfy
/// `0 <= N_j <= mass * D (D-1)^{j-1}`.
///
/// Then `Z(u) = exp(sum N_j u^j / j)` is dominated coefficientwise by
/// `(1 - (D-1) u)^{-a}` with `a = mass * D / (D-1)`, whose tail is summed
/// explicitly and closed with a geometric remainder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailModel {
    pub degree_bound: usize,
    /// `tau(1)`: vertex count in counting mode, 1 in normalized mode.
    pub total_mass: f64,
}

impl TailModel {
    pub fn tail_bound(&self, order: usize, modulus: f64) -> f64 {
        let d = self.degree_bound as f64;
        if self.degree_bound <= 1 {
            return 0.0;
        }
        let q = (d - 1.0) * modulus;
        if q >= 1.0 {
            return f64::INFINITY;
        }
        let a = self.total_mass * d / (d - 1.0);
        // t_j = binom(a + j - 1, j) q^j
        let mut term = 1.0f64;
        for j in 0..=order {
            term *= (a + j as f64) / (j as f64 + 1.0) * q;
        }
        let mut sum = 0.0;
        let mut j = order + 1;
        loop {
            sum += term;
            let ratio = ((a + j as f64) / (j as f64 + 1.0) * q).max(q);
            if ratio < 1.0 {
                let rest = term * ratio / (1.0 - ratio);
                if rest <= 1e-17 * sum || rest == 0.0 || j > order + 100_000 {
                    return sum + rest;
                }
            }
            term *= (a + j as f64) / (j as f64 + 1.0) * q;
            j += 1;
        }
    }
}

/// Coefficient mode tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesMode {
    Exact,
    Float,
}

/// A truncated series in either coefficient mode. Binary operations reject
/// mixed modes instead of converting.
#[derive(Clone, Debug, PartialEq)]
pub enum TruncatedSeries {
    Exact(Series<BigRational>),
    Float(Series<Complex64>),
}

impl TruncatedSeries {
    pub fn mode(&self) -> SeriesMode {
        match self {
            TruncatedSeries::Exact(_) => SeriesMode::Exact,
            TruncatedSeries::Float(_) => SeriesMode::Float,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            TruncatedSeries::Exact(s) => s.order(),
            TruncatedSeries::Float(s) => s.order(),
        }
    }

    pub fn exp(&self) -> Result<Self> {
        Ok(match self {
            TruncatedSeries::Exact(s) => TruncatedSeries::Exact(s.exp()?),
            TruncatedSeries::Float(s) => TruncatedSeries::Float(s.exp()?),
        })
    }

    pub fn log(&self) -> Result<Self> {
        Ok(match self {
            TruncatedSeries::Exact(s) => TruncatedSeries::Exact(s.log()?),
            TruncatedSeries::Float(s) => TruncatedSeries::Float(s.log()?),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (TruncatedSeries::Exact(a), TruncatedSeries::Exact(b)) => {
                Ok(TruncatedSeries::Exact(a.mul(b)))
            }
            (TruncatedSeries::Float(a), TruncatedSeries::Float(b)) => {
                Ok(TruncatedSeries::Float(a.mul(b)))
            }
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (TruncatedSeries::Exact(a), TruncatedSeries::Exact(b)) => {
                Ok(TruncatedSeries::Exact(a.add(b)))
            }
            (TruncatedSeries::Float(a), TruncatedSeries::Float(b)) => {
                Ok(TruncatedSeries::Float(a.add(b)))
            }
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        Ok(match self {
            TruncatedSeries::Exact(s) => TruncatedSeries::Exact(s.powi(e)?),
            TruncatedSeries::Float(s) => TruncatedSeries::Float(s.powi(e)?),
        })
    }

    /// Rational power `s^(num/den)`; the constant term must be 1 unless the
    /// exponent is an integer.
    pub fn pow_ratio(&self, num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Series("zero denominator in exponent".into()));
        }
        if num % den == 0 {
            return self.powi(num / den);
        }
        Ok(match self {
            TruncatedSeries::Exact(s) => TruncatedSeries::Exact(
                s.pow(&BigRational::new(BigInt::from(num), BigInt::from(den)))?,
            ),
            TruncatedSeries::Float(s) => {
                TruncatedSeries::Float(s.pow(&Complex64::new(num as f64 / den as f64, 0.0))?)
            }
        })
    }

    pub fn eval(&self, u: Complex64, model: Option<TailModel>) -> Evaluation {
        match self {
            TruncatedSeries::Exact(s) => s.eval_with_tail(u, model),
            TruncatedSeries::Float(s) => s.eval_with_tail(u, model),
        }
    }

    pub fn as_exact(&self) -> Option<&Series<BigRational>> {
        match self {
            TruncatedSeries::Exact(s) => Some(s),
            TruncatedSeries::Float(_) => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    order: usize,
    coeffs: serde_json::Value,
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = match self {
            TruncatedSeries::Exact(x) => serde_json::Value::from(
                x.coeffs()
                    .iter()
                    .map(|c| vec![c.numer().to_string(), c.denom().to_string()])
                    .collect::<Vec<_>>(),
            ),
            TruncatedSeries::Float(x) => serde_json::Value::from(
                x.coeffs()
                    .iter()
                    .map(|c| vec![c.re, c.im])
                    .collect::<Vec<_>>(),
            ),
        };
        SeriesJson {
            order: self.order(),
            coeffs,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(d)?;
        let items = raw
            .coeffs
            .as_array()
            .ok_or_else(|| D::Error::custom("coeffs must be a list"))?;
        if items.len() != raw.order + 1 {
            return Err(D::Error::custom("coefficient count does not match order"));
        }
        let exact = items
            .first()
            .and_then(|c| c.get(0))
            .is_some_and(|v| v.is_string());
        if exact {
            let coeffs = items
                .iter()
                .map(|c| {
                    let part = |i: usize| -> std::result::Result<BigInt, D::Error> {
                        c.get(i)
                            .and_then(|v| v.as_str())
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| D::Error::custom("expected [\"num\",\"den\"]"))
                    };
                    let den = part(1)?;
                    if den.is_zero() {
                        return Err(D::Error::custom("zero denominator"));
                    }
                    Ok(BigRational::new(part(0)?, den))
                })
                .collect::<std::result::Result<Vec<_>, D::Error>>()?;
            Ok(TruncatedSeries::Exact(Series::new(coeffs)))
        } else {
            let coeffs = items
                .iter()
                .map(|c| {
                    let part = |i: usize| c.get(i).and_then(|v| v.as_f64());
                    match (part(0), part(1)) {
                        (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                        _ => Err(D::Error::custom("expected [re,im]")),
                    }
                })
                .collect::<std::result::Result<Vec<_>, D::Error>>()?;
            Ok(TruncatedSeries::Float(Series::new(coeffs)))
        }
    }
}

/// Shorthand for an exact integer coefficient.
pub fn int(k: i64) -> BigRational {
    BigRational::from_i64(k)
}

/// Shorthand for an exact ratio `p / q`.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
