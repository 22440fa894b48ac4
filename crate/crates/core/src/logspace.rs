//! Log-space arithmetic shared by the tree and circuit engines.
//!
//! Every probability is carried as its natural logarithm. `-inf` is the
//! representation of probability zero and is a legal value everywhere.

use std::fmt::Debug;

use num_traits::Float;

/// Floating-point type an engine evaluates in.
pub trait LogReal: Float + Debug + Default + Send + Sync + 'static {
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl LogReal for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

impl LogReal for f32 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

/// Arithmetic width used for query evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    F32,
    #[default]
    F64,
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "32" | "f32" => Ok(Precision::F32),
            "64" | "f64" => Ok(Precision::F64),
            other => Err(format!("unknown precision {other:?}, expected 32 or 64")),
        }
    }
}

/// `ln(exp(a) + exp(b))`.
#[inline]
pub fn log_add<T: LogReal>(a: T, b: T) -> T {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == T::neg_infinity() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Max-shifted `ln(sum(exp(x)))`. Empty input and all-`-inf` input give `-inf`.
pub fn log_sum_exp<T: LogReal>(values: &[T]) -> T {
    let max = values
        .iter()
        .copied()
        .fold(T::neg_infinity(), |m, v| if v > m { v } else { m });
    if !max.is_finite() {
        return max;
    }
    let total = values
        .iter()
        .fold(T::zero(), |acc, &v| acc + (v - max).exp());
    max + total.ln()
}

/// Index of the largest value; ties resolve to the lowest index.
pub fn arg_max<T: LogReal>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Equality for log-values where `-inf == -inf` and finite values agree within `tol`.
pub fn log_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol
}
