//! Precision-managed complex arithmetic and polynomials in τ.
//!
//! Everything downstream works through [`BigComplex`], a complex number bound
//! to a [`PrecisionContext`] that fixes the decimal digit budget (`digits`
//! significant digits plus `guard` internal digits). Transcendental constants
//! are recomputed at the active precision on demand and never cached across
//! precision changes.
//!
//! The one numerically load-bearing contract here is the division guard:
//! dividing by a value with absolute value below `10^-digits` is an error
//! (poles must be detected by the callers before they reach the arithmetic).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::{NegAssign, PowAssign};
use rug::{Complex, Float, Integer};

use crate::error::Error;
use crate::Result;

/// log₂(10), used to convert decimal digit budgets into mantissa bits.
const LOG2_10: f64 = 3.321928094887362;

/// Immutable precision policy: decimal digit budget, guard digits, and the
/// absolute threshold below which q-series tails are truncated.
///
/// Invariants: `digits ≥ 15`, `guard ≥ 10`, `series_tail_tol ≤ 10^-digits`.
/// The working mantissa carries `digits + guard` decimal digits.
#[derive(Debug, Clone)]
pub struct PrecisionContext {
    digits: u32,
    guard: u32,
    prec_bits: u32,
    series_tail_tol: Float,
}

impl PrecisionContext {
    /// Default context: 128 digits with 15 guard digits, sized so the
    /// 115-digit modularity checks of the worked examples run with headroom.
    pub fn default_budget() -> Self {
        Self::new(128).expect("128/15 is a valid budget")
    }

    /// Context with `digits` significant digits and the default 15 guard
    /// digits. Tail tolerance defaults to `10^-(digits + guard)`.
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, 15)
    }

    /// Context with an explicit guard budget.
    pub fn with_guard(digits: u32, guard: u32) -> Result<Self> {
        if digits < 15 || guard < 10 {
            return Err(Error::InvalidPrecision { digits, guard });
        }
        let prec_bits = ((digits + guard) as f64 * LOG2_10).ceil() as u32 + 8;
        let tol = Self::pow10(prec_bits, -((digits + guard) as i32));
        Ok(PrecisionContext {
            digits,
            guard,
            prec_bits,
            series_tail_tol: tol,
        })
    }

    /// Context with an explicit tail tolerance, which must be ≤ `10^-digits`.
    pub fn with_tail_tol(digits: u32, guard: u32, tail_tol: &str) -> Result<Self> {
        let mut ctx = Self::with_guard(digits, guard)?;
        let tol = ctx.real(tail_tol)?;
        let bound = Self::pow10(ctx.prec_bits, -(digits as i32));
        if !(tol > 0) || tol > bound {
            return Err(Error::InvalidInput(format!(
                "series_tail_tol must lie in (0, 10^-{digits}], got {tail_tol}"
            )));
        }
        ctx.series_tail_tol = tol;
        Ok(ctx)
    }

    fn pow10(prec_bits: u32, exp: i32) -> Float {
        let mut f = Float::with_val(prec_bits, 10);
        f.pow_assign(exp);
        f
    }

    /// Decimal significant digits of the target mantissa.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Extra decimal digits carried internally.
    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Working mantissa size in bits (covers `digits + guard` decimal digits).
    pub fn prec_bits(&self) -> u32 {
        self.prec_bits
    }

    /// Absolute threshold below which q-series tails are truncated.
    pub fn series_tail_tol(&self) -> &Float {
        &self.series_tail_tol
    }

    /// π recomputed at the working precision.
    pub fn pi(&self) -> Float {
        Float::with_val(self.prec_bits, Constant::Pi)
    }

    /// 2πi at the working precision.
    pub fn two_pi_i(&self) -> BigComplex {
        let mut pi = self.pi();
        pi *= 2;
        BigComplex {
            v: Complex::with_val(self.prec_bits, (Float::new(self.prec_bits), pi)),
            digits: self.digits,
        }
    }

    /// `10^exp` at the working precision.
    pub fn pow10_real(&self, exp: i32) -> Float {
        Self::pow10(self.prec_bits, exp)
    }

    /// Parse a decimal string into a working-precision real.
    pub fn real(&self, s: &str) -> Result<Float> {
        let parsed = Float::parse(s)
            .map_err(|e| Error::InvalidInput(format!("bad decimal literal {s:?}: {e}")))?;
        Ok(Float::with_val(self.prec_bits, parsed))
    }

    /// Real from a small exact integer.
    pub fn real_from_i64(&self, v: i64) -> Float {
        Float::with_val(self.prec_bits, v)
    }

    /// Parse a decimal pair into a complex value.
    pub fn complex(&self, re: &str, im: &str) -> Result<BigComplex> {
        let re = self.real(re)?;
        let im = self.real(im)?;
        Ok(self.complex_from_parts(re, im))
    }

    /// Complex value from already-built parts (rounded to working precision).
    pub fn complex_from_parts(&self, re: Float, im: Float) -> BigComplex {
        BigComplex {
            v: Complex::with_val(self.prec_bits, (re, im)),
            digits: self.digits,
        }
    }

    /// Purely real complex value.
    pub fn complex_from_real(&self, re: Float) -> BigComplex {
        self.complex_from_parts(re, Float::new(self.prec_bits))
    }

    /// Complex value from small exact integers.
    pub fn complex_from_i64(&self, re: i64, im: i64) -> BigComplex {
        BigComplex {
            v: Complex::with_val(self.prec_bits, (re, im)),
            digits: self.digits,
        }
    }

    /// Additive identity.
    pub fn zero(&self) -> BigComplex {
        self.complex_from_i64(0, 0)
    }

    /// Multiplicative identity.
    pub fn one(&self) -> BigComplex {
        self.complex_from_i64(1, 0)
    }

    /// The imaginary unit.
    pub fn i(&self) -> BigComplex {
        self.complex_from_i64(0, 1)
    }
}

/// A complex number carrying the digit budget of the context that made it.
///
/// Arithmetic is closed and deterministic at fixed precision. Division by a
/// value with absolute value below `10^-digits` is a contract violation:
/// [`BigComplex::checked_div`] reports it as [`Error::TinyDivisor`], and the
/// `/` operator panics on it (callers are expected to pre-screen poles).
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    v: Complex,
    digits: u32,
}

impl BigComplex {
    /// Real part.
    pub fn re(&self) -> &Float {
        self.v.real()
    }

    /// Imaginary part.
    pub fn im(&self) -> &Float {
        self.v.imag()
    }

    /// Digit budget inherited from the originating context.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Mantissa precision in bits.
    pub fn prec_bits(&self) -> u32 {
        self.v.real().prec()
    }

    /// |self| as a real.
    pub fn abs(&self) -> Float {
        self.v
            .real()
            .clone()
            .hypot(&Float::with_val(self.v.imag().prec(), self.v.imag()))
    }

    /// |self|² as a real (one multiply cheaper than `abs`).
    pub fn norm2(&self) -> Float {
        let re2 = self.v.real().clone().square();
        let im2 = self.v.imag().clone().square();
        re2 + im2
    }

    /// Complex conjugate.
    pub fn conj(&self) -> BigComplex {
        BigComplex {
            v: self.v.clone().conj(),
            digits: self.digits,
        }
    }

    /// Multiplication by i (`negative` flips to -i).
    pub fn mul_i(&self, negative: bool) -> BigComplex {
        BigComplex {
            v: self.v.clone().mul_i(negative),
            digits: self.digits,
        }
    }

    /// Complex exponential.
    pub fn exp(&self) -> BigComplex {
        BigComplex {
            v: self.v.clone().exp(),
            digits: self.digits,
        }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> BigComplex {
        BigComplex {
            v: self.v.clone().sqrt(),
            digits: self.digits,
        }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> BigComplex {
        BigComplex {
            v: self.v.clone().ln(),
            digits: self.digits,
        }
    }

    /// Integer power (binary exponentiation via MPC).
    pub fn powi(&self, e: i32) -> BigComplex {
        let mut v = self.v.clone();
        v.pow_assign(e);
        BigComplex { v, digits: self.digits }
    }

    /// True if both parts are exactly zero.
    pub fn is_zero(&self) -> bool {
        self.v.real().is_zero() && self.v.imag().is_zero()
    }

    /// Scale by an exact integer.
    pub fn mul_int(&self, n: &Integer) -> BigComplex {
        let mut v = self.v.clone();
        v *= n;
        BigComplex { v, digits: self.digits }
    }

    /// Scale by a real.
    pub fn mul_real(&self, f: &Float) -> BigComplex {
        let mut v = self.v.clone();
        v *= f;
        BigComplex { v, digits: self.digits }
    }

    /// Quick order-of-magnitude test: true when |self| is certainly below
    /// `10^-digits` (measured on the larger of |re|, |im|, so conservative by
    /// at most a factor √2).
    fn below_tiny_threshold(&self) -> bool {
        let bound = -((self.digits as f64) * LOG2_10) as i64 - 1;
        let e = |f: &Float| f.get_exp().unwrap_or(i32::MIN as i64 as i32);
        let max_exp = e(self.v.real()).max(e(self.v.imag()));
        (max_exp as i64) < bound
    }

    /// Division with the tiny-divisor contract surfaced as an error.
    pub fn checked_div(&self, rhs: &BigComplex) -> Result<BigComplex> {
        if rhs.below_tiny_threshold() {
            return Err(Error::TinyDivisor { digits: rhs.digits });
        }
        let mut v = self.v.clone();
        v /= &rhs.v;
        Ok(BigComplex { v, digits: self.digits })
    }

    /// Division under the relative-precision contract: only an exact zero
    /// divisor is rejected.  For divisors that are structurally nonzero and
    /// carried to full relative precision — scale normalizations by a basis
    /// vector, logarithmic derivatives away from the zero set — the quotient
    /// is well-conditioned even when the divisor underflows the absolute
    /// heuristic of [`BigComplex::checked_div`], whose job is to catch
    /// divisors that may be nothing but accumulated noise.
    pub fn checked_div_relative(&self, rhs: &BigComplex) -> Result<BigComplex> {
        if rhs.is_zero() {
            return Err(Error::TinyDivisor { digits: rhs.digits });
        }
        let mut v = self.v.clone();
        v /= &rhs.v;
        Ok(BigComplex {
            v,
            digits: self.digits,
        })
    }

    /// Reciprocal with the same contract as [`BigComplex::checked_div`].
    pub fn checked_recip(&self) -> Result<BigComplex> {
        if self.below_tiny_threshold() {
            return Err(Error::TinyDivisor { digits: self.digits });
        }
        let one = Complex::with_val(self.v.prec().0, (1, 0));
        let mut v = one;
        v /= &self.v;
        Ok(BigComplex { v, digits: self.digits })
    }

    /// |self - other|.
    pub fn dist(&self, other: &BigComplex) -> Float {
        (self - other).abs()
    }

    /// Decimal rendering with `sig` significant digits, suitable for JSON
    /// records (deterministic, locale-free).
    pub fn to_parts_strings(&self, sig: usize) -> (String, String) {
        (fmt_float(self.v.real(), sig), fmt_float(self.v.imag(), sig))
    }
}

/// Format a real to `sig` significant decimal digits in scientific notation.
pub fn fmt_float(f: &Float, sig: usize) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    // The precision field counts significant digits for this type, not
    // digits after the point.
    format!("{:.*e}", sig.max(1), f)
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_parts_strings(20);
        write!(fm, "BigComplex({re} + {im}·i)")
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = self.digits as usize;
        let (re, im) = self.to_parts_strings(sig);
        write!(fm, "({re}, {im})")
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $assign:tt) => {
        impl $trait<&BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &BigComplex) -> BigComplex {
                let mut v = self.v.clone();
                v $assign &rhs.v;
                BigComplex { v, digits: self.digits.min(rhs.digits) }
            }
        }
        impl $trait<BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                self.$method(&rhs)
            }
        }
        impl $trait<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &BigComplex) -> BigComplex {
                (&self).$method(rhs)
            }
        }
        impl $trait<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, +=);
forward_binop!(Sub, sub, -=);
forward_binop!(Mul, mul, *=);

impl Div<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        self.checked_div(rhs)
            .expect("division by a value below the 10^-digits threshold; pre-screen poles")
    }
}

impl Div<BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: BigComplex) -> BigComplex {
        self / &rhs
    }
}

impl Div<&BigComplex> for BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        &self / rhs
    }
}

impl Div<BigComplex> for BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: BigComplex) -> BigComplex {
        &self / &rhs
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        let mut v = self.v.clone();
        v.neg_assign();
        BigComplex { v, digits: self.digits }
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -&self
    }
}

impl AddAssign<&BigComplex> for BigComplex {
    fn add_assign(&mut self, rhs: &BigComplex) {
        self.v += &rhs.v;
        self.digits = self.digits.min(rhs.digits);
    }
}

impl SubAssign<&BigComplex> for BigComplex {
    fn sub_assign(&mut self, rhs: &BigComplex) {
        self.v -= &rhs.v;
        self.digits = self.digits.min(rhs.digits);
    }
}

impl MulAssign<&BigComplex> for BigComplex {
    fn mul_assign(&mut self, rhs: &BigComplex) {
        self.v *= &rhs.v;
        self.digits = self.digits.min(rhs.digits);
    }
}

impl Mul<i64> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: i64) -> BigComplex {
        let mut v = self.v.clone();
        v *= rhs;
        BigComplex { v, digits: self.digits }
    }
}

impl Mul<i64> for BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: i64) -> BigComplex {
        &self * rhs
    }
}

/// Polynomial in τ with complex coefficients (degree ≤ k-2 in practice).
///
/// Trailing zero coefficients are normalized away; the zero polynomial has an
/// empty coefficient list.
#[derive(Debug, Clone, PartialEq)]
pub struct TauPolynomial {
    coeffs: Vec<BigComplex>,
}

impl TauPolynomial {
    /// Build from coefficients (index = power of τ), trimming exact trailing
    /// zeros.
    pub fn new(mut coeffs: Vec<BigComplex>) -> Self {
        while coeffs.last().is_some_and(BigComplex::is_zero) {
            coeffs.pop();
        }
        TauPolynomial { coeffs }
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        TauPolynomial { coeffs: Vec::new() }
    }

    /// Constant polynomial.
    pub fn constant(c: BigComplex) -> Self {
        Self::new(vec![c])
    }

    /// Coefficient list (index = power of τ, no trailing zeros).
    pub fn coeffs(&self) -> &[BigComplex] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation at τ.
    pub fn eval(&self, tau: &BigComplex, ctx: &PrecisionContext) -> BigComplex {
        let mut acc = ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * tau + c;
        }
        acc
    }

    /// Coefficient-wise sum.
    pub fn add(&self, other: &TauPolynomial, ctx: &PrecisionContext) -> TauPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let mut c = ctx.zero();
            if let Some(a) = self.coeffs.get(j) {
                c += a;
            }
            if let Some(b) = other.coeffs.get(j) {
                c += b;
            }
            out.push(c);
        }
        TauPolynomial::new(out)
    }
}

/// Horner evaluation of `p` at `τ` (free-function form of
/// [`TauPolynomial::eval`]).
pub fn eval_tau_poly(p: &TauPolynomial, tau: &BigComplex, ctx: &PrecisionContext) -> BigComplex {
    p.eval(tau, ctx)
}

/// True iff |a - b| < tol at working precision.
pub fn approx_equal(a: &BigComplex, b: &BigComplex, tol: &Float) -> bool {
    matches!(a.dist(b).partial_cmp(tol), Some(Ordering::Less))
}
