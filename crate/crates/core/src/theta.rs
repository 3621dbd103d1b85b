//! Jacobi theta functions: the odd one-variable ϑ with characteristic (½,½),
//! the general lattice theta attached to an integral Gram matrix, the product
//! theta, and the raising log-derivative (Y₊θ)/θ.
//!
//! All sums are Gaussian: the summation window is derived from the digit
//! budget and the quadratic decay, and arguments far from the fundamental
//! cell are reduced first through the exact ellipticity cocycle, so no
//! intermediate exponential can overflow the working range.

use rug::Float;
use rug::Integer;

use crate::error::Error;
use crate::precision::{BigComplex, PrecisionContext};
use crate::symrep::bareiss_det;
use crate::Result;

fn require_upper(tau: &BigComplex, what: &'static str) -> Result<()> {
    if tau.im().is_sign_positive() && !tau.im().is_zero() {
        Ok(())
    } else {
        Err(Error::NotInUpperHalfPlane {
            what,
            im: crate::precision::fmt_float(tau.im(), 6),
        })
    }
}

/// `iπ` as a working-precision imaginary number.
fn i_pi(ctx: &PrecisionContext) -> BigComplex {
    ctx.complex_from_parts(Float::new(ctx.prec_bits()), ctx.pi())
}

/// Decimal-digit target of the context (`digits + guard`) in natural-log
/// units, used for Gaussian window bounds.
fn ln_target(ctx: &PrecisionContext) -> f64 {
    -ctx.series_tail_tol().to_f64().ln()
}

/// Round a real to the nearest integer, returned as i64.
fn round_to_i64(f: &Float) -> i64 {
    let v = f.to_f64();
    debug_assert!(v.abs() < 9.0e15, "reduction multiple exceeds exact f64 range");
    v.round() as i64
}

/// A symmetric positive-definite integer matrix pairing the theta variables.
///
/// Positive definiteness is verified exactly through leading principal
/// minors. An even diagonal (the standard normalization for integral
/// lattices) is recorded as a flag rather than enforced: the half-integer
/// characteristic bridge to ϑ needs the odd-diagonal identity matrix, and
/// every formula here is well-defined without evenness — only 1-periodicity
/// in τ relies on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    entries: Vec<Vec<i64>>,
    even_diagonal: bool,
}

impl GramMatrix {
    /// Validate squareness, symmetry and positive definiteness.
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let g = entries.len();
        if g == 0 {
            return Err(Error::InvalidInput("Gram matrix must be non-empty".into()));
        }
        if entries.iter().any(|row| row.len() != g) {
            return Err(Error::InvalidInput("Gram matrix must be square".into()));
        }
        for i in 0..g {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "Gram matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        for k in 1..=g {
            let minor: Vec<Vec<Integer>> = (0..k)
                .map(|i| (0..k).map(|j| Integer::from(entries[i][j])).collect())
                .collect();
            if bareiss_det(minor) <= 0 {
                return Err(Error::InvalidInput(format!(
                    "Gram matrix not positive definite (leading {k}×{k} minor ≤ 0)"
                )));
            }
        }
        let even_diagonal = (0..g).all(|i| entries[i][i] % 2 == 0);
        Ok(GramMatrix { entries, even_diagonal })
    }

    /// The identity pairing in `g` variables (odd diagonal).
    pub fn identity(g: usize) -> GramMatrix {
        let entries = (0..g)
            .map(|i| (0..g).map(|j| i64::from(i == j)).collect())
            .collect();
        GramMatrix { entries, even_diagonal: false }
    }

    /// Number of variables.
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Entry (i, j).
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    /// Whether every diagonal entry is even (the integral-lattice
    /// normalization; required for 1-periodicity in τ).
    pub fn has_even_diagonal(&self) -> bool {
        self.even_diagonal
    }

    /// ℓᵀGℓ on integer vectors.
    pub fn quadratic_form(&self, l: &[i64]) -> i64 {
        let mut q = 0i64;
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                q += e * l[i] * l[j];
            }
        }
        q
    }

    /// Gℓ on integer vectors.
    pub fn apply_int(&self, l: &[i64]) -> Vec<i64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(l).map(|(e, x)| e * x).sum())
            .collect()
    }

    /// Gz⃗ on complex vectors.
    pub fn apply_complex(&self, z: &[BigComplex], ctx: &PrecisionContext) -> Vec<BigComplex> {
        self.entries
            .iter()
            .map(|row| {
                let mut acc = ctx.zero();
                for (e, x) in row.iter().zip(z) {
                    if *e != 0 {
                        acc += &(x * *e);
                    }
                }
                acc
            })
            .collect()
    }

    /// f64 lower estimate of the smallest eigenvalue (inverse power
    /// iteration), used only to size summation windows.
    fn min_eigenvalue_estimate(&self) -> f64 {
        let g = self.size();
        let a: Vec<Vec<f64>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|&e| e as f64).collect())
            .collect();
        let mut v: Vec<f64> = (0..g).map(|i| 1.0 + 0.1 * i as f64).collect();
        let mut lambda = 1.0f64;
        for _ in 0..40 {
            let w = solve_f64(&a, &v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                break;
            }
            lambda = 1.0 / norm * v.iter().zip(&w).map(|(x, y)| x * y).sum::<f64>().abs().max(f64::MIN_POSITIVE);
            v = w.iter().map(|x| x / norm).collect();
        }
        // Rayleigh quotient at the converged vector is a robust estimate.
        let gv = {
            let mut out = vec![0.0; g];
            for i in 0..g {
                for j in 0..g {
                    out[i] += a[i][j] * v[j];
                }
            }
            out
        };
        let num: f64 = v.iter().zip(&gv).map(|(x, y)| x * y).sum();
        let den: f64 = v.iter().map(|x| x * x).sum();
        let rayleigh = num / den;
        // Guard against a failed iteration: eigenvalues of a PD integer
        // matrix are ≥ det/∏(trace bound) > 0; fall back to a safe floor.
        if rayleigh.is_finite() && rayleigh > 0.0 {
            rayleigh.min(lambda.max(f64::MIN_POSITIVE))
        } else {
            0.5
        }
    }
}

/// Solve `A x = b` in f64 with partial pivoting (tiny systems only).
fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut x = b.to_vec();
    for p in 0..n {
        let piv = (p..n)
            .max_by(|&i, &j| m[i][p].abs().total_cmp(&m[j][p].abs()))
            .unwrap();
        m.swap(p, piv);
        x.swap(p, piv);
        for r in p + 1..n {
            let f = m[r][p] / m[p][p];
            for c in p..n {
                m[r][c] -= f * m[p][c];
            }
            x[r] -= f * x[p];
        }
    }
    for p in (0..n).rev() {
        for c in p + 1..n {
            let t = m[p][c] * x[c];
            x[p] -= t;
        }
        x[p] /= m[p][p];
    }
    x
}

/// A base point (τ, z⃗) with τ in the upper half-plane.
#[derive(Debug, Clone)]
pub struct EllipticPoint {
    tau: BigComplex,
    z: Vec<BigComplex>,
}

impl EllipticPoint {
    /// Validate Im(τ) > 0.
    pub fn new(tau: BigComplex, z: Vec<BigComplex>) -> Result<Self> {
        require_upper(&tau, "EllipticPoint")?;
        Ok(EllipticPoint { tau, z })
    }

    /// The modulus τ.
    pub fn tau(&self) -> &BigComplex {
        &self.tau
    }

    /// The elliptic variables z⃗.
    pub fn z(&self) -> &[BigComplex] {
        &self.z
    }
}

/// ϑ(τ, z) = Σ_{n ∈ ½+ℤ} e^{πin²τ + 2πin(z+½)} (odd in z).
pub fn theta_char(tau: &BigComplex, z: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
    Ok(theta_char_with_dz(tau, z, ctx)?.0)
}

/// ∂ϑ/∂z via the termwise derivative, sharing the truncation window with ϑ.
pub fn theta_char_dz(tau: &BigComplex, z: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
    Ok(theta_char_with_dz(tau, z, ctx)?.1)
}

/// (ϑ, ∂ϑ/∂z) from one pass. Arguments with |Im z| > Im(τ)/2 are reduced
/// modulo ℤτ + ℤ first; the exact cocycle
/// ϑ(z_r + mτ + n) = (-1)^{m+n} e^{-πim²τ - 2πimz_r} ϑ(z_r)
/// (and its z-derivative) restores the requested value.
pub fn theta_char_with_dz(
    tau: &BigComplex,
    z: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<(BigComplex, BigComplex)> {
    require_upper(tau, "theta_char")?;
    let m = {
        let ratio = Float::with_val(ctx.prec_bits(), z.im() / tau.im());
        round_to_i64(&ratio)
    };
    let zm = z - &(tau * m);
    let n = round_to_i64(zm.re());
    let zr = &zm - &ctx.complex_from_i64(n, 0);

    let (th, dth) = theta_char_core(tau, &zr, ctx);
    if m == 0 && n == 0 {
        return Ok((th, dth));
    }
    // P = (-1)^{m+n} e^{-πim²τ - 2πimz_r}
    let ipi = i_pi(ctx);
    let expo = -(&ipi * tau * (m * m)) - (&ipi * &zr * (2 * m));
    let mut p = expo.exp();
    if (m + n).rem_euclid(2) == 1 {
        p = -p;
    }
    let two_pi_i_m = ctx.two_pi_i() * m;
    let dth_out = &p * &(dth - &(&two_pi_i_m * &th));
    let th_out = p * th;
    Ok((th_out, dth_out))
}

/// Direct Gaussian sum at a reduced argument (|Im z| ≤ Im(τ)/2 + 1).
fn theta_char_core(
    tau: &BigComplex,
    z: &BigComplex,
    ctx: &PrecisionContext,
) -> (BigComplex, BigComplex) {
    let im_t = tau.im().to_f64();
    let r_max = ((ln_target(ctx) / (std::f64::consts::PI * im_t)).sqrt().ceil() as i64 + 2).max(2);

    let ipi = i_pi(ctx);
    let u = (&ipi * tau).exp(); // e^{πiτ}
    let u2 = &u * &u;
    let u4 = {
        let quarter = ctx.real("0.25").unwrap();
        (&ipi * tau).mul_real(&quarter).exp() // e^{πiτ/4}
    };
    let half = ctx.complex("0.5", "0").unwrap();
    let zs = z + &half; // z + ½
    let h = (&ipi * &zs).exp(); // e^{πi(z+½)}
    let hinv = (-(&ipi * &zs)).exp();
    let v = &h * &h;
    let vinv = &hinv * &hinv;

    let two_pi_i = ctx.two_pi_i();
    let mut theta = ctx.zero();
    let mut dtheta = ctx.zero();
    let mut upow = ctx.one(); // u^{r²+r}
    let mut ustep = u2.clone(); // u^{2r+2}
    let mut vp = ctx.one(); // v^r
    let mut vm = ctx.one(); // v^{-r}
    for r in 0..=r_max {
        let base = &u4 * &upow;
        let term_plus = &base * &(&h * &vp);
        let term_minus = base * (&hinv * &vm);
        theta += &(&term_plus + &term_minus);
        // derivative factor 2πi·n with n = ±(r+½)
        let n_half = ctx.complex_from_i64(2 * r + 1, 0) * &half;
        dtheta += &(&two_pi_i * &n_half * (term_plus - term_minus));
        upow *= &ustep;
        ustep *= &u2;
        vp *= &v;
        vm *= &vinv;
    }
    (theta, dtheta)
}

/// θ_G(τ, z⃗) = Σ_{ℓ∈ℤ^g} e^{πi ℓᵀGℓ τ + 2πi ℓᵀGz⃗}.
pub fn theta_lattice(
    tau: &BigComplex,
    z: &[BigComplex],
    gram: &GramMatrix,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    Ok(theta_lattice_with_dz(tau, z, gram, ctx)?.0)
}

/// (θ, [∂θ/∂z_j]_j) for the lattice theta, one truncation window for all.
///
/// Components with |Im z_i| > Im(τ)/2 are reduced by ℓ⃗τ + n⃗ shifts using
/// θ(z_r + m⃗τ + n⃗) = e^{-πiτ·m⃗ᵀGm⃗} e^{-2πi·z_rᵀGm⃗} θ(z_r).
pub fn theta_lattice_with_dz(
    tau: &BigComplex,
    z: &[BigComplex],
    gram: &GramMatrix,
    ctx: &PrecisionContext,
) -> Result<(BigComplex, Vec<BigComplex>)> {
    require_upper(tau, "theta_lattice")?;
    let g = gram.size();
    if z.len() != g {
        return Err(Error::InvalidInput(format!(
            "theta_lattice: Gram has size {g} but z⃗ has {} components",
            z.len()
        )));
    }

    // Componentwise reduction to the fundamental cell.
    let mut m_vec = vec![0i64; g];
    let mut zr = Vec::with_capacity(g);
    for (i, zi) in z.iter().enumerate() {
        let ratio = Float::with_val(ctx.prec_bits(), zi.im() / tau.im());
        let mi = round_to_i64(&ratio);
        let shifted = zi - &(tau * mi);
        let ni = round_to_i64(shifted.re());
        m_vec[i] = mi;
        zr.push(&shifted - &ctx.complex_from_i64(ni, 0));
    }

    let (th_r, dth_r) = theta_lattice_core(tau, &zr, gram, ctx)?;
    if m_vec.iter().all(|&m| m == 0) {
        return Ok((th_r, dth_r));
    }

    let gm = gram.apply_int(&m_vec);
    let q_mm = gram.quadratic_form(&m_vec);
    let ipi = i_pi(ctx);
    // z_rᵀ G m⃗
    let mut zgm = ctx.zero();
    for (zi, gmi) in zr.iter().zip(&gm) {
        zgm += &(zi * *gmi);
    }
    let cocycle = (-(&ipi * tau * q_mm) - (ctx.two_pi_i() * zgm)).exp();
    let theta = &cocycle * &th_r;
    let dtheta = dth_r
        .iter()
        .zip(&gm)
        .map(|(d, gmj)| &cocycle * &(d - &(&ctx.two_pi_i() * &th_r * *gmj)))
        .collect();
    Ok((theta, dtheta))
}

/// Box-summed lattice theta at reduced arguments.
fn theta_lattice_core(
    tau: &BigComplex,
    z: &[BigComplex],
    gram: &GramMatrix,
    ctx: &PrecisionContext,
) -> Result<(BigComplex, Vec<BigComplex>)> {
    let g = gram.size();
    let im_t = tau.im().to_f64();
    let lambda_min = gram.min_eigenvalue_estimate();
    let r = ((ln_target(ctx) / (std::f64::consts::PI * lambda_min * im_t))
        .sqrt()
        .ceil() as i64
        + 2)
        .max(2);

    // Upper bound for ℓᵀGℓ over the box, sizing the power table for e^{πiτ·q}.
    let abs_sum: i64 = gram
        .entries
        .iter()
        .flat_map(|row| row.iter())
        .map(|e| e.abs())
        .sum();
    let q_bound = abs_sum
        .checked_mul(r * r)
        .ok_or_else(|| Error::InvalidInput("theta window overflows the index range".into()))?;
    if q_bound > 4_000_000 {
        return Err(Error::InvalidInput(format!(
            "theta summation table would need {q_bound} entries; Gram norm or window too large"
        )));
    }

    let ipi = i_pi(ctx);
    let u = (&ipi * tau).exp(); // e^{πiτ}
    let mut upow_table = Vec::with_capacity(q_bound as usize + 1);
    upow_table.push(ctx.one());
    for q in 1..=q_bound as usize {
        let next = &upow_table[q - 1] * &u;
        upow_table.push(next);
    }

    // Tables y_i^s = e^{2πi (Gz)_i s} for s ∈ [-r, r].
    let gz = gram.apply_complex(z, ctx);
    let mut ypow: Vec<Vec<BigComplex>> = Vec::with_capacity(g);
    for w in &gz {
        let y = (ctx.two_pi_i() * w).exp();
        let yinv = (-(ctx.two_pi_i() * w)).exp();
        let len = (2 * r + 1) as usize;
        let mut table = vec![ctx.one(); len];
        for s in 1..=r {
            table[(r + s) as usize] = &table[(r + s - 1) as usize] * &y;
            table[(r - s) as usize] = &table[(r - s + 1) as usize] * &yinv;
        }
        ypow.push(table);
    }

    let mut theta = ctx.zero();
    let mut dsum = vec![ctx.zero(); g];
    let mut idx = vec![-r; g];
    loop {
        let q = gram.quadratic_form(&idx);
        debug_assert!(q >= 0 && q <= q_bound);
        let mut term = upow_table[q as usize].clone();
        for (i, &s) in idx.iter().enumerate() {
            term *= &ypow[i][(r + s) as usize];
        }
        let gl = gram.apply_int(&idx);
        theta += &term;
        for (j, glj) in gl.iter().enumerate() {
            if *glj != 0 {
                dsum[j] += &(&term * *glj);
            }
        }
        // Odometer increment over the box.
        let mut carry = true;
        for slot in idx.iter_mut() {
            if *slot < r {
                *slot += 1;
                carry = false;
                break;
            }
            *slot = -r;
        }
        if carry {
            break;
        }
    }
    let two_pi_i = ctx.two_pi_i();
    let dtheta = dsum.into_iter().map(|s| &two_pi_i * &s).collect();
    Ok((theta, dtheta))
}

/// ∏_i ϑ(τ, z_i), the theta used by the assembled vector-valued form.
pub fn theta_product(tau: &BigComplex, z: &[BigComplex], ctx: &PrecisionContext) -> Result<BigComplex> {
    let mut prod = ctx.one();
    for zi in z {
        prod *= &theta_char(tau, zi, ctx)?;
    }
    Ok(prod)
}

/// The raising log-derivative
/// (Y₊θ)/θ with Y₊ = ∂/∂z_j + 2πi·Im((Gz⃗)_j)/Im(τ),
/// evaluated with θ and ∂θ from the same summation window.
///
/// Points on the theta divisor (|θ| < 10^-digits) are reported as poles.
pub fn raising_log_derivative(
    tau: &BigComplex,
    z: &[BigComplex],
    j: usize,
    gram: &GramMatrix,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    if j >= gram.size() {
        return Err(Error::InvalidInput(format!(
            "component index {j} out of range for a size-{} Gram matrix",
            gram.size()
        )));
    }
    let (theta, dtheta) = theta_lattice_with_dz(tau, z, gram, ctx)?;
    let theta_abs = theta.abs();
    if theta_abs < ctx.pow10_real(-(ctx.digits() as i32)) {
        return Err(Error::PoleHit {
            component: j,
            distance: crate::precision::fmt_float(&theta_abs, 6),
        });
    }
    let gz = gram.apply_complex(z, ctx);
    let mut corr = Float::with_val(ctx.prec_bits(), gz[j].im());
    corr *= 2;
    corr *= ctx.pi();
    corr /= tau.im();
    // (∂_jθ + 2πi·Im((Gz)_j)/Im(τ)·θ) / θ
    let numer = &dtheta[j] + &theta.mul_real(&corr).mul_i(false);
    numer.checked_div(&theta)
}
