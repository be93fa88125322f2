//! Field abstraction shared by the exact and the floating-point backends.
//!
//! Every algebraic routine in the crate is written against [`Scalar`], which
//! is implemented for `Complex<R>` whenever `R: Real`. The two backends used
//! throughout are Gaussian rationals (`Complex<BigRational>`) and
//! `Complex<f64>`; `Complex<f32>` also satisfies the bounds.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Tolerance used by the floating-point backend wherever an exact backend
/// would test for equality (e.g. the Fuchs relation).
pub const APPROX_ZERO_TOL: f64 = 1e-12;

/// Real coefficient type of a complex scalar.
pub trait Real:
    Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_text(&self) -> String;
    fn parse_text(s: &str) -> Result<Self>;
}

impl Real for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }

    fn parse_text(s: &str) -> Result<Self> {
        if s.contains('/') {
            return Err(Error::Parse(format!(
                "rational literal `{s}` given to the approximate backend"
            )));
        }
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("`{s}`: {e}")))
    }
}

impl Real for f32 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }

    fn parse_text(s: &str) -> Result<Self> {
        f64::parse_text(s).map(|v| v as f32)
    }
}

impl Real for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_text(&self) -> String {
        if self.denom() == &BigInt::from(1) {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn parse_text(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('.') || s.contains('e') || s.contains('E') {
            return Err(Error::Parse(format!(
                "decimal literal `{s}` given to the exact backend"
            )));
        }
        let parse_int = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("`{s}`: {e}")))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("`{s}`: zero denominator")));
                }
                Ok(BigRational::new(parse_int(n)?, d))
            }
            None => Ok(BigRational::from_integer(parse_int(s)?)),
        }
    }
}

/// A complex scalar field element.
pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// True for backends with exact equality.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// `re_num/re_den + (im_num/im_den) i`.
    fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self;

    fn imag_unit() -> Self;

    fn to_c64(&self) -> Complex64;

    /// Exact backends test `== 0`; floating backends compare the modulus
    /// against `tol`.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Text form `a`, `a+b*i` or `a-b*i`, with rational or decimal parts.
    fn to_text(&self) -> String;

    fn parse_text(s: &str) -> Result<Self>;

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

impl<R: Real> Scalar for Complex<R> {
    const EXACT: bool = R::EXACT;

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(R::from_ratio(num, den), R::zero())
    }

    fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self {
        Complex::new(R::from_ratio(re.0, re.1), R::from_ratio(im.0, im.1))
    }

    fn imag_unit() -> Self {
        Complex::new(R::zero(), R::one())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn is_negligible(&self, tol: f64) -> bool {
        if R::EXACT {
            self.is_zero()
        } else {
            self.to_c64().norm() <= tol
        }
    }

    fn to_text(&self) -> String {
        let re = self.re.to_text();
        if self.im.is_zero() {
            return re;
        }
        let (sign, mag) = if self.im < R::zero() {
            ('-', (-self.im.clone()).to_text())
        } else {
            ('+', self.im.to_text())
        };
        if self.re.is_zero() {
            if sign == '-' {
                format!("-{mag}*i")
            } else {
                format!("{mag}*i")
            }
        } else {
            format!("{re}{sign}{mag}*i")
        }
    }

    fn parse_text(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar literal".into()));
        }
        let Some(body) = s.strip_suffix("*i") else {
            return Ok(Complex::new(R::parse_text(&s)?, R::zero()));
        };
        // Split at the last sign that is not leading and not an exponent sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let c = bytes[idx];
            if (c == b'+' || c == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
                split = Some(idx);
                break;
            }
        }
        match split {
            Some(idx) => {
                let re = R::parse_text(&body[..idx])?;
                let im_txt = &body[idx..];
                let im = match im_txt.strip_prefix('+') {
                    Some(rest) => R::parse_text(rest)?,
                    None => -R::parse_text(&im_txt[1..])?,
                };
                Ok(Complex::new(re, im))
            }
            None => Ok(Complex::new(R::zero(), R::parse_text(body)?)),
        }
    }
}

/// Gaussian rationals: the exact backend.
pub type ExactScalar = Complex<BigRational>;
/// Double-precision complex numbers: the approximate backend.
pub type ApproxScalar = Complex64;

/// Converts a Gaussian rational into the approximate backend.
pub fn to_approx(z: &ExactScalar) -> ApproxScalar {
    z.to_c64()
}

/// The exact value of a finite double-precision complex number.
pub fn to_exact(z: &ApproxScalar) -> Result<ExactScalar> {
    match (BigRational::from_float(z.re), BigRational::from_float(z.im)) {
        (Some(re), Some(im)) => Ok(Complex::new(re, im)),
        _ => Err(Error::InvalidParameters(format!("{z} is not finite"))),
    }
}

/// Which backend a document or command line literal belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Exact,
    Approx,
}

impl FieldKind {
    /// Classifies a list of literals: any `/` means exact, any decimal point
    /// or exponent means approximate; both at once is an error. Pure
    /// integers default to exact.
    pub fn classify<'a>(literals: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut rational = false;
        let mut decimal = false;
        for lit in literals {
            if lit.contains('/') {
                rational = true;
            }
            let stripped = lit.trim().trim_end_matches("*i");
            if stripped.contains('.') || stripped.contains('e') || stripped.contains('E') {
                decimal = true;
            }
        }
        match (rational, decimal) {
            (true, true) => Err(Error::Parse(
                "rational and decimal literals cannot be mixed".into(),
            )),
            (_, true) => Ok(FieldKind::Approx),
            _ => Ok(FieldKind::Exact),
        }
    }
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldKind::Exact => f.write_str("exact"),
            FieldKind::Approx => f.write_str("approx"),
        }
    }
}
