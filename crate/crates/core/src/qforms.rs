//! q-expansions on the upper half-plane: Dedekind η, built-in cusp forms,
//! the weight-2 Eisenstein series with its non-holomorphic completion, and
//! the absolutely convergent G_{2n}.
//!
//! Built-in coefficient tables are generated from exact integer power-series
//! products (sparse pentagonal-number factors), never transcribed, and cached
//! process-wide so repeated evaluations share one table. All series are
//! truncated adaptively: the term budget is derived from `|q|` at the
//! evaluation point and the context's tail tolerance, with a slack exponent
//! covering polynomial coefficient growth.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rug::ops::Pow;
use rug::{Complete, Float, Integer, Rational};

use crate::error::Error;
use crate::precision::{BigComplex, PrecisionContext, TauPolynomial};
use crate::Result;

/// Hard ceiling on adaptively chosen series lengths, so a point pathologically
/// close to the real line fails loudly instead of hanging.
const MAX_SERIES_TERMS: usize = 4_000_000;

/// Minimum number of series terms regardless of how fast the tail decays.
const MIN_SERIES_TERMS: usize = 32;

pub(crate) fn require_upper(tau: &BigComplex, what: &'static str) -> Result<()> {
    if tau.im().is_sign_positive() && !tau.im().is_zero() {
        Ok(())
    } else {
        Err(Error::NotInUpperHalfPlane {
            what,
            im: crate::precision::fmt_float(tau.im(), 6),
        })
    }
}

/// `q = e^{2πiτ}`.
pub fn q_of_tau(tau: &BigComplex, ctx: &PrecisionContext) -> BigComplex {
    (ctx.two_pi_i() * tau).exp()
}

/// Pick a series length `n` with `|q|^n · n^growth < tail_tol`, where
/// `ln_inv_q = -ln|q| > 0`, via a short fixed-point iteration.
pub(crate) fn series_budget(ln_inv_q: f64, tail_tol: &Float, growth: f64) -> Result<usize> {
    let target = -tail_tol.to_f64().ln();
    debug_assert!(target.is_finite() && target > 0.0);
    let mut n = target / ln_inv_q + 8.0;
    for _ in 0..4 {
        n = (target + growth * n.max(2.0).ln()) / ln_inv_q + 8.0;
    }
    let n = (n.ceil() as usize).max(MIN_SERIES_TERMS);
    if n > MAX_SERIES_TERMS {
        return Err(Error::InvalidInput(format!(
            "series would need {n} terms (Im τ too small for the digit budget)"
        )));
    }
    Ok(n)
}

pub(crate) fn ln_inv_abs_q(tau: &BigComplex) -> f64 {
    2.0 * std::f64::consts::PI * tau.im().to_f64()
}

/// Dedekind η(τ) = q^{1/24} ∏_{n≥1} (1 - q^n), truncated when `|q|^n` falls
/// below the tail tolerance.
pub fn dedekind_eta(tau: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
    require_upper(tau, "dedekind_eta")?;
    let n_max = series_budget(ln_inv_abs_q(tau), ctx.series_tail_tol(), 0.0)?;
    let q = q_of_tau(tau, ctx);
    // q^{1/24} on the principal branch via exp(2πiτ/24).
    let scale = ctx.complex_from_real(ctx.real_from_i64(24)).checked_recip()?;
    let prefactor = (ctx.two_pi_i() * tau * scale).exp();
    let mut prod = ctx.one();
    let mut qn = ctx.one();
    for _ in 1..=n_max {
        qn *= &q;
        prod *= &(ctx.one() - &qn);
    }
    Ok(prefactor * prod)
}

/// Congruence-group descriptor attached to a cusp form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupDescriptor {
    /// The full modular group.
    Full,
    /// Hecke congruence subgroup Γ₀(N).
    Gamma0(i64),
    /// Γ₁(N).
    Gamma1(i64),
}

impl GroupDescriptor {
    /// The level (1 for the full group).
    pub fn level(&self) -> i64 {
        match self {
            GroupDescriptor::Full => 1,
            GroupDescriptor::Gamma0(n) | GroupDescriptor::Gamma1(n) => *n,
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Full => write!(f, "SL2(Z)"),
            GroupDescriptor::Gamma0(n) => write!(f, "Gamma0({n})"),
            GroupDescriptor::Gamma1(n) => write!(f, "Gamma1({n})"),
        }
    }
}

/// Identifiers of the coefficient engines with exact regeneration recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Builtin {
    /// Δ = q∏(1-q^n)²⁴, weight 12, level 1.
    Delta,
    /// η(3τ)⁸ = q∏(1-q^{3n})⁸, weight 4, Γ₀(9).
    Eta3Pow8,
    /// η(τ)²η(11τ)² = q∏(1-q^n)²(1-q^{11n})², weight 2, Γ₀(11).
    X011,
}

/// Sparse pentagonal-number expansion of ∏(1-q^{s·n}): pairs
/// `(exponent, ±1)` with exponent `s·j(3j-1)/2 ≤ n_max`.
fn pentagonal_sparse(n_max: usize, stretch: usize) -> Vec<(usize, i32)> {
    let mut terms = vec![(0usize, 1i32)];
    let mut j: i64 = 1;
    loop {
        let mut grew = false;
        for g in [j * (3 * j - 1) / 2, j * (3 * j + 1) / 2] {
            let e = (g as usize) * stretch;
            if e <= n_max {
                terms.push((e, if j % 2 == 0 { 1 } else { -1 }));
                grew = true;
            }
        }
        if !grew {
            break;
        }
        j += 1;
    }
    terms.sort_unstable();
    terms
}

/// Dense-by-sparse polynomial product truncated at degree `n_max`.
fn mul_sparse(dense: &[Integer], sparse: &[(usize, i32)], n_max: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); n_max + 1];
    for &(e, s) in sparse {
        for (i, c) in dense.iter().enumerate() {
            if i + e > n_max {
                break;
            }
            if c.is_zero() {
                continue;
            }
            if s > 0 {
                out[i + e] += c;
            } else {
                out[i + e] -= c;
            }
        }
    }
    out
}

impl Builtin {
    fn weight(self) -> u32 {
        match self {
            Builtin::Delta => 12,
            Builtin::Eta3Pow8 => 4,
            Builtin::X011 => 2,
        }
    }

    fn group(self) -> GroupDescriptor {
        match self {
            Builtin::Delta => GroupDescriptor::Full,
            Builtin::Eta3Pow8 => GroupDescriptor::Gamma0(9),
            Builtin::X011 => GroupDescriptor::Gamma0(11),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Builtin::Delta => "delta",
            Builtin::Eta3Pow8 => "eta3p8",
            Builtin::X011 => "x011",
        }
    }

    /// Eta-product recipe as (stretch, power) factors; the leading `q` shift
    /// is implicit (every builtin is `q · ∏ factors`).
    fn factors(self) -> &'static [(usize, usize)] {
        match self {
            Builtin::Delta => &[(1, 24)],
            Builtin::Eta3Pow8 => &[(3, 8)],
            Builtin::X011 => &[(1, 2), (11, 2)],
        }
    }

    /// Exact coefficients a_1..a_{n_max} via repeated sparse products.
    fn generate(self, n_max: usize) -> Vec<Integer> {
        let deg = n_max.saturating_sub(1);
        let mut dense = vec![Integer::from(1)];
        for &(stretch, power) in self.factors() {
            let sparse = pentagonal_sparse(deg, stretch);
            for _ in 0..power {
                dense = mul_sparse(&dense, &sparse, deg);
            }
        }
        // a_n = [q^{n-1}] of the product part (the engines all carry q¹).
        let mut coeffs = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            coeffs.push(dense.get(n - 1).cloned().unwrap_or_default());
        }
        coeffs
    }
}

/// Process-wide cache of builtin coefficient tables (the longest generated
/// table per builtin is retained and shared).
static COEFF_CACHE: Lazy<Mutex<HashMap<Builtin, Arc<Vec<Integer>>>>> =
    Lazy::new(Default::default);

fn builtin_coefficients(b: Builtin, n_max: usize) -> Arc<Vec<Integer>> {
    let mut cache = COEFF_CACHE.lock().expect("coefficient cache poisoned");
    if let Some(existing) = cache.get(&b) {
        if existing.len() >= n_max {
            return existing.clone();
        }
    }
    // Regenerate with headroom so near-miss requests don't thrash.
    let table = Arc::new(b.generate(n_max + n_max / 4 + 16));
    cache.insert(b, table.clone());
    table
}

/// A cusp form given by its exact integer q-expansion a_1, a_2, … (a_0 = 0).
#[derive(Debug, Clone)]
pub struct CuspForm {
    name: String,
    weight: u32,
    group: GroupDescriptor,
    /// `coeffs[n-1] = a_n`.
    coeffs: Arc<Vec<Integer>>,
    builtin: Option<Builtin>,
}

impl CuspForm {
    /// Look up a built-in form by name (`"delta"`, `"eta3p8"`, `"x011"`)
    /// with at least `n_max` exact coefficients.
    pub fn by_name(name: &str, n_max: usize) -> Result<CuspForm> {
        let b = match name {
            "delta" => Builtin::Delta,
            "eta3p8" => Builtin::Eta3Pow8,
            "x011" => Builtin::X011,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown built-in form {name:?} (available: delta, eta3p8, x011)"
                )))
            }
        };
        if n_max == 0 {
            return Err(Error::InvalidInput("n_max must be at least 1".into()));
        }
        Ok(CuspForm {
            name: b.name().to_string(),
            weight: b.weight(),
            group: b.group(),
            coeffs: builtin_coefficients(b, n_max),
            builtin: Some(b),
        })
    }

    /// Δ with `n_max` exact coefficients (Ramanujan numbers).
    pub fn delta(n_max: usize) -> CuspForm {
        Self::by_name("delta", n_max).expect("delta is built in")
    }

    /// η(3τ)⁸ with `n_max` exact coefficients.
    pub fn eta3_pow8(n_max: usize) -> CuspForm {
        Self::by_name("eta3p8", n_max).expect("eta3p8 is built in")
    }

    /// Import a user-supplied form from `(n, a_n)` pairs.
    pub fn import_pairs(
        name: &str,
        weight: u32,
        group: GroupDescriptor,
        pairs: &[(u64, Integer)],
    ) -> Result<CuspForm> {
        if weight < 2 || weight % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "weight must be an even integer ≥ 2, got {weight}"
            )));
        }
        let n_max = pairs.iter().map(|(n, _)| *n).max().unwrap_or(0) as usize;
        if n_max == 0 {
            return Err(Error::InvalidInput(
                "no coefficients supplied (need n ≥ 1 pairs)".into(),
            ));
        }
        let mut coeffs = vec![Integer::new(); n_max];
        for (n, a) in pairs {
            if *n == 0 {
                if !a.is_zero() {
                    return Err(Error::InvalidInput(
                        "a_0 must be 0 for a cusp form".into(),
                    ));
                }
                continue;
            }
            coeffs[(*n - 1) as usize] = a.clone();
        }
        Ok(CuspForm {
            name: name.to_string(),
            weight,
            group,
            coeffs: Arc::new(coeffs),
            builtin: None,
        })
    }

    /// Import from plain text: one `n a_n` integer pair per line, `#`
    /// comments and blank lines ignored.
    pub fn import_text(
        name: &str,
        weight: u32,
        group: GroupDescriptor,
        text: &str,
    ) -> Result<CuspForm> {
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(n), Some(a), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::InvalidInput(format!(
                    "line {}: expected `n a_n`, got {raw:?}",
                    idx + 1
                )));
            };
            let n: u64 = n
                .parse()
                .map_err(|e| Error::InvalidInput(format!("line {}: bad index: {e}", idx + 1)))?;
            let a = Integer::parse(a)
                .map_err(|e| Error::InvalidInput(format!("line {}: bad integer: {e}", idx + 1)))?
                .complete();
            pairs.push((n, a));
        }
        Self::import_pairs(name, weight, group, &pairs)
    }

    /// Import from JSON of the shape
    /// `{"name": "...", "weight": k, "level": N, "coeffs": [[n, a_n], ...]}`.
    pub fn import_json(text: &str) -> Result<CuspForm> {
        #[derive(serde::Deserialize)]
        struct Raw {
            name: String,
            weight: u32,
            level: i64,
            coeffs: Vec<(u64, i64)>,
        }
        let raw: Raw = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("bad cusp-form JSON: {e}")))?;
        let group = if raw.level == 1 {
            GroupDescriptor::Full
        } else {
            GroupDescriptor::Gamma0(raw.level)
        };
        let pairs: Vec<(u64, Integer)> = raw
            .coeffs
            .into_iter()
            .map(|(n, a)| (n, Integer::from(a)))
            .collect();
        Self::import_pairs(&raw.name, raw.weight, group, &pairs)
    }

    /// Human-readable identifier.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Weight k.
    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Congruence group.
    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    /// Number of stored coefficients.
    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }

    /// a_n (None beyond the stored range).
    pub fn coefficient(&self, n: usize) -> Option<&Integer> {
        if n == 0 {
            return None;
        }
        self.coeffs.get(n - 1)
    }

    /// Coefficient table of length ≥ `n`, regenerating built-ins on demand.
    /// Imported forms cannot be extended and report how much is missing.
    pub fn coefficients_up_to(&self, n: usize) -> Result<Arc<Vec<Integer>>> {
        if self.coeffs.len() >= n {
            return Ok(self.coeffs.clone());
        }
        match self.builtin {
            Some(b) => Ok(builtin_coefficients(b, n)),
            None => Err(Error::InsufficientCoefficients {
                needed: n,
                have: self.coeffs.len(),
            }),
        }
    }

    /// Point evaluation f(τ) = Σ_{n≥1} a_n q^n with adaptive truncation.
    pub fn eval(&self, tau: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
        require_upper(tau, "cusp-form evaluation")?;
        let ln_inv_q = ln_inv_abs_q(tau);
        // |a_n| ≲ n^{(k-1)/2}·d(n); slack exponent (k+3)/2 covers it.
        let growth = (self.weight as f64 + 3.0) / 2.0;
        let budget = series_budget(ln_inv_q, ctx.series_tail_tol(), growth)?;
        let coeffs = self.coefficients_up_to(budget)?;
        let q = q_of_tau(tau, ctx);
        let mut sum = ctx.zero();
        let mut qn = ctx.one();
        let mut small_run = 0usize;
        for (idx, a) in coeffs.iter().take(budget).enumerate() {
            qn *= &q;
            if a.is_zero() {
                continue;
            }
            let term = qn.mul_int(a);
            let negligible = term.abs() < *ctx.series_tail_tol();
            sum += &term;
            if idx + 1 >= MIN_SERIES_TERMS {
                if negligible {
                    small_run += 1;
                    if small_run >= 8 {
                        break;
                    }
                } else {
                    small_run = 0;
                }
            }
        }
        Ok(sum)
    }
}

/// Exact Bernoulli numbers B_0..B_m (B_1 = -1/2) by the defining recursion.
fn bernoulli_numbers(m_max: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        if m == 0 {
            b.push(Rational::from(1));
            continue;
        }
        // B_m = -1/(m+1) Σ_{j<m} C(m+1, j) B_j
        let mut acc = Rational::new();
        let mut binom = Integer::from(1); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate() {
            acc += (bj * &binom).complete();
            // C(m+1, j+1) = C(m+1, j)·(m+1-j)/(j+1)
            binom *= (m + 1 - j) as u64;
            binom /= (j + 1) as u64;
        }
        acc /= -((m as i64) + 1);
        b.push(acc);
    }
    b
}

/// ζ(2n) = (-1)^{n+1} B_{2n} (2π)^{2n} / (2·(2n)!) at working precision.
fn zeta_even(n: u32, ctx: &PrecisionContext) -> Float {
    let b = bernoulli_numbers(2 * n as usize);
    let b2n = &b[2 * n as usize];
    let mut two_pi = ctx.pi();
    two_pi *= 2;
    let mut val = two_pi.pow(2 * n);
    val *= Float::with_val(ctx.prec_bits(), b2n);
    let fact = Integer::from(2) * Integer::from(Integer::factorial(2 * n));
    val /= Float::with_val(ctx.prec_bits(), &fact);
    if n % 2 == 0 {
        val = -val;
    }
    val
}

/// Divisor-power sums σ_e(1..n_max) by sieve.
fn divisor_power_sums(n_max: usize, e: u32) -> Vec<Integer> {
    let mut sums = vec![Integer::new(); n_max];
    for d in 1..=n_max {
        let de = Integer::from(d).pow(e);
        let mut m = d;
        while m <= n_max {
            sums[m - 1] += &de;
            m += d;
        }
    }
    sums
}

/// Quasi-modular weight-2 Eisenstein series
/// G₂(τ) = 2ζ(2) - 8π² Σ_{n≥1} σ₁(n) qⁿ.
pub fn eisenstein_g2(tau: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
    require_upper(tau, "eisenstein_g2")?;
    eisenstein_series(tau, 1, ctx)
}

/// Non-holomorphic completion G₂*(τ) = G₂(τ) - π/Im(τ), which transforms
/// with plain weight 2.
pub fn eisenstein_g2_star(tau: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
    require_upper(tau, "eisenstein_g2_star")?;
    let g2 = eisenstein_g2(tau, ctx)?;
    let mut corr = ctx.pi();
    corr /= tau.im();
    Ok(g2 - ctx.complex_from_real(corr))
}

/// G_{2n} on the τ-lattice ℤτ + ℤ via its q-series (n ≥ 2: the absolutely
/// convergent range).
pub fn eisenstein_g2n_tau(tau: &BigComplex, n: u32, ctx: &PrecisionContext) -> Result<BigComplex> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "eisenstein_g2n needs n ≥ 2 (weight 2n ≥ 4), got n = {n}"
        )));
    }
    require_upper(tau, "eisenstein_g2n")?;
    eisenstein_series(tau, n, ctx)
}

/// Shared q-series: 2ζ(2n) + 2(2πi)^{2n}/(2n-1)! · Σ σ_{2n-1}(m) q^m.
fn eisenstein_series(tau: &BigComplex, n: u32, ctx: &PrecisionContext) -> Result<BigComplex> {
    let growth = 2.0 * n as f64 + 1.0;
    let budget = series_budget(ln_inv_abs_q(tau), ctx.series_tail_tol(), growth)?;
    let sigma = divisor_power_sums(budget, 2 * n - 1);
    let q = q_of_tau(tau, ctx);
    let mut sum = ctx.zero();
    let mut qm = ctx.one();
    for s in &sigma {
        qm *= &q;
        sum += &qm.mul_int(s);
    }
    // 2(2πi)^{2n}/(2n-1)! is real: (-1)^n 2(2π)^{2n}/(2n-1)!.
    let mut two_pi = ctx.pi();
    two_pi *= 2;
    let mut coeff = two_pi.pow(2 * n);
    coeff *= 2;
    coeff /= Float::with_val(ctx.prec_bits(), &Integer::from(Integer::factorial(2 * n - 1)));
    if n % 2 == 1 {
        coeff = -coeff;
    }
    let mut constant = zeta_even(n, ctx);
    constant *= 2;
    Ok(ctx.complex_from_real(constant) + sum.mul_real(&coeff))
}

/// A finite q-expansion with τ-polynomial coefficients and an overall
/// prefactor; `n_min` may be negative to carry a principal part.
#[derive(Debug, Clone)]
pub struct QExpansion {
    /// Multiplies the whole sum.
    pub prefactor: BigComplex,
    /// Exponent of the first stored coefficient.
    pub n_min: i64,
    /// `coeffs[j]` multiplies `q^{n_min + j}`.
    pub coeffs: Vec<TauPolynomial>,
}

impl QExpansion {
    /// Evaluate `prefactor · Σ_j coeffs[j](τ) q^{n_min+j}` at τ.
    pub fn eval(&self, tau: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
        require_upper(tau, "q-expansion evaluation")?;
        let q = q_of_tau(tau, ctx);
        // Horner in q from the top exponent down, then one q^{n_min} factor.
        let mut acc = ctx.zero();
        for p in self.coeffs.iter().rev() {
            acc = acc * &q + p.eval(tau, ctx);
        }
        let lead = if self.n_min >= 0 {
            q.powi(self.n_min as i32)
        } else {
            q.checked_recip()?.powi((-self.n_min) as i32)
        };
        Ok(&self.prefactor * acc * lead)
    }
}
