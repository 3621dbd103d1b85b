//! Weierstrass-type functions attached to rank-2 lattices in the plane.
//!
//! [`Lattice2D`] stores an oriented basis together with a Gauss-reduced copy
//! that all series evaluation is routed through.  On top of it the module
//! provides the quasi-periodic logarithmic derivative [`zeta_raw`], its
//! non-holomorphic but fully periodic completion [`zeta_star`], the
//! multi-variable sigma product [`sigma`], second logarithmic derivatives
//! [`wp_ji`] by numerical differentiation, the completion slope
//! [`s_lattice`], and the Laurent data of the completed zeta around the
//! origin ([`laurent_zeta_star`]).
//!
//! Conventions: a lattice basis `(w1, w2)` is always stored so that
//! `Im(w2/w1) > 0`.  The reduced basis `(b1, b2)` satisfies
//! `|b1| <= |b2|` and `|Re(b2/b1)| <= 1/2`, so `tau = b2/b1` lies in the
//! usual fundamental strip and theta series converge as fast as the lattice
//! allows.  Evaluation at a point closer to a lattice point than
//! `10^(-digits/2) * |b1|` reports a pole hit rather than a huge value.

use std::collections::BTreeMap;

use rug::ops::CompleteRound;
use rug::{Float, Integer};

use crate::error::Error;
use crate::precision::{BigComplex, PrecisionContext};
use crate::Result;
use crate::qforms::{eisenstein_g2, eisenstein_g2_star, eisenstein_g2n_tau};
use crate::theta::{theta_char, theta_char_with_dz};

/// A rank-2 lattice `Z w1 + Z w2` with `Im(w2/w1) > 0`.
///
/// The constructor negates `w2` if the pair is presented with the opposite
/// orientation and rejects degenerate pairs (collinear periods or a zero
/// period).  A Gauss-reduced basis of the same lattice is precomputed and
/// used by every series evaluation.
#[derive(Debug, Clone)]
pub struct Lattice2D {
    omega1: BigComplex,
    omega2: BigComplex,
    b1: BigComplex,
    b2: BigComplex,
    tau_red: BigComplex,
    volume: Float,
}

impl Lattice2D {
    /// Builds the lattice spanned by `w1` and `w2`, enforcing orientation.
    pub fn new(w1: &BigComplex, w2: &BigComplex, ctx: &PrecisionContext) -> Result<Lattice2D> {
        let a1 = w1.abs();
        let a2 = w2.abs();
        if a1.is_zero() || a2.is_zero() {
            return Err(Error::DegenerateLattice);
        }
        // Signed area of the pair; its sign is the orientation and its
        // magnitude over |w1||w2| is the sine of the angle between them.
        let cross = signed_area(w1, w2);
        let sine = (cross.clone() / (a1 * a2)).abs();
        if sine < ctx.pow10_real(-(ctx.digits() as i32)) {
            return Err(Error::DegenerateLattice);
        }
        let omega1 = w1.clone();
        let omega2 = if cross < 0 { -w2.clone() } else { w2.clone() };

        let (b1, b2) = gauss_reduce(&omega1, &omega2);
        let tau_red = b2.checked_div(&b1)?;
        let volume = signed_area(&b1, &b2);
        Ok(Lattice2D {
            omega1,
            omega2,
            b1,
            b2,
            tau_red,
            volume,
        })
    }

    /// The lattice `Z + Z tau` for `tau` in the upper half-plane.
    pub fn standard(tau: &BigComplex, ctx: &PrecisionContext) -> Result<Lattice2D> {
        Lattice2D::new(&ctx.one(), tau, ctx)
    }

    /// First stored period (as given by the caller).
    pub fn omega1(&self) -> &BigComplex {
        &self.omega1
    }

    /// Second stored period (possibly negated to fix orientation).
    pub fn omega2(&self) -> &BigComplex {
        &self.omega2
    }

    /// Shorter vector of the Gauss-reduced basis.
    pub fn b1(&self) -> &BigComplex {
        &self.b1
    }

    /// Second vector of the Gauss-reduced basis.
    pub fn b2(&self) -> &BigComplex {
        &self.b2
    }

    /// Shape parameter `b2/b1` of the reduced basis; lies in the strip
    /// `|Re| <= 1/2` with `|tau| >= 1` up to rounding at the boundary.
    pub fn tau(&self) -> &BigComplex {
        &self.tau_red
    }

    /// Covolume (area of a fundamental cell).
    pub fn volume(&self) -> &Float {
        &self.volume
    }

    /// Real coordinates `(x, y)` of `z = x b1 + y b2` in the reduced frame.
    pub fn reduced_coordinates(&self, z: &BigComplex) -> (Float, Float) {
        // The area form is bilinear, so area(z, b2) = x area(b1, b2) and
        // area(b1, z) = y area(b1, b2): two cross products replace a 2x2
        // solve.
        let x = signed_area(z, &self.b2) / self.volume.clone();
        let y = signed_area(&self.b1, z) / self.volume.clone();
        (x, y)
    }

    /// Reduces `z` modulo the lattice into the cell centred at the origin.
    pub fn reduce_mod(&self, z: &BigComplex) -> BigComplex {
        let (z_red, _, _) = self.reduce_with_shift(z);
        z_red
    }

    /// Reduction together with the integers `(m, n)` such that
    /// `z = z_red + m b1 + n b2`.
    pub fn reduce_with_shift(&self, z: &BigComplex) -> (BigComplex, Integer, Integer) {
        let (x, y) = self.reduced_coordinates(z);
        let m = round_to_integer(&x);
        let n = round_to_integer(&y);
        let shift = self.b1.mul_int(&m) + self.b2.mul_int(&n);
        (z - &shift, m, n)
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn distance_to_lattice(&self, z: &BigComplex) -> Float {
        let z_red = self.reduce_mod(z);
        let mut best = z_red.abs();
        // Coordinate rounding picks the nearest grid point, which for a skew
        // cell need not be the nearest lattice point; the true minimiser is
        // within one step in each direction.
        for m in -1i64..=1 {
            for n in -1i64..=1 {
                if m == 0 && n == 0 {
                    continue;
                }
                let cand = &z_red - &(&self.b1 * m + &self.b2 * n);
                let d = cand.abs();
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    /// Errors with [`Error::PoleHit`] when `z` is within
    /// `10^(-digits/2) |b1|` of a lattice point.
    pub fn check_not_near_pole(
        &self,
        z: &BigComplex,
        component: usize,
        ctx: &PrecisionContext,
    ) -> Result<()> {
        let dist = self.distance_to_lattice(z);
        let threshold = self.b1.abs() * ctx.pow10_real(-((ctx.digits() / 2) as i32));
        if dist < threshold {
            return Err(Error::PoleHit {
                component,
                distance: crate::precision::fmt_float(&dist, 6),
            });
        }
        Ok(())
    }
}

/// `Im(conj(a) * b)`, the signed area of the parallelogram `(a, b)`.
pub(crate) fn signed_area(a: &BigComplex, b: &BigComplex) -> Float {
    let t1 = (a.re() * b.im()).complete(a.re().prec());
    let t2 = (a.im() * b.re()).complete(a.re().prec());
    t1 - t2
}

fn round_to_integer(x: &Float) -> Integer {
    x.clone()
        .round()
        .to_integer()
        .unwrap_or_else(|| Integer::from(0))
}

/// Lagrange–Gauss reduction of an oriented basis.  Returns `(b1, b2)` with
/// `|b1| <= |b2|`, `|Re(b2/b1)| <= 1/2` and `Im(b2/b1) > 0`.
fn gauss_reduce(w1: &BigComplex, w2: &BigComplex) -> (BigComplex, BigComplex) {
    let mut b1 = w1.clone();
    let mut b2 = w2.clone();
    loop {
        // Projection coefficient Re(b2/b1) computed as an inner product to
        // avoid a complex division.
        let n1 = b1.norm2();
        let inner = (b2.re() * b1.re()).complete(n1.prec())
            + (b2.im() * b1.im()).complete(n1.prec());
        let mu = inner / n1;
        let r = round_to_integer(&mu);
        if r != 0 {
            b2 -= &b1.mul_int(&r);
        }
        if b2.norm2() < b1.norm2() {
            std::mem::swap(&mut b1, &mut b2);
        } else {
            break;
        }
    }
    if signed_area(&b1, &b2) < 0 {
        b2 = -b2;
    }
    (b1, b2)
}

/// Quasi-period slope `u(tau)` of the one-variable sigma factor: the weight-2
/// Eisenstein limit value, so that `zeta(z + 1) - zeta(z) = u(tau)` on the
/// standard lattice.
pub fn quasi_period_u(tau: &BigComplex, ctx: &PrecisionContext) -> Result<BigComplex> {
    eisenstein_g2(tau, ctx)
}

/// Evaluates the odd theta quotient in the frame of the reduced basis: the
/// common core of `zeta_raw` and `zeta_star`.  The argument is reduced to the
/// fundamental cell here, and the discarded shift `(m, n)` with
/// `z = z_red + m b1 + n b2` is returned so quasi-periodic callers can
/// restore it exactly.  Reduction cannot be left to the theta cocycle: its
/// exponent grows like `pi m^2 Im(tau)`, which for extreme-aspect lattices
/// overflows the floating-point exponent range long before precision becomes
/// the binding constraint.
fn zeta_core(
    lattice: &Lattice2D,
    z: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<(BigComplex, BigComplex, Integer, Integer)> {
    let (z_red, m, n) = lattice.reduce_with_shift(z);
    lattice.check_not_near_pole(&z_red, 0, ctx)?;
    let w = z_red.checked_div_relative(&lattice.b1)?;
    let (theta, dtheta) = theta_char_with_dz(&lattice.tau_red, &w, ctx)?;
    // The pole guard keeps `w` away from the theta zeros, and theta carries
    // full relative precision however small its overall scale (for lattices
    // with an extreme aspect ratio it underflows the absolute noise
    // heuristic), so the logarithmic derivative divides under the
    // relative-precision contract.
    let log_derivative = dtheta.checked_div_relative(&theta)?;
    Ok((w, log_derivative, m, n))
}

/// Quasi-periodic zeta: logarithmic derivative of the sigma function.  In the
/// reduced frame `zeta(z) = b1^{-1} (theta'/theta (z/b1) + u(tau) z/b1)`,
/// extended to arguments outside the fundamental cell by the exact
/// quasi-period steps `eta1 = u/b1` and `eta2 = (u tau - 2 pi i)/b1`
/// (Legendre: `eta1 b2 - eta2 b1 = 2 pi i`).
pub fn zeta_raw(
    lattice: &Lattice2D,
    z: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let (w, log_derivative, m, n) = zeta_core(lattice, z, ctx)?;
    let u = eisenstein_g2(&lattice.tau_red, ctx)?;
    let mut value = (log_derivative + &u * &w).checked_div_relative(&lattice.b1)?;
    if m != 0 || n != 0 {
        let eta1 = u.checked_div_relative(&lattice.b1)?;
        let eta2 = (&u * &lattice.tau_red - ctx.two_pi_i()).checked_div_relative(&lattice.b1)?;
        value = value + eta1.mul_int(&m) + eta2.mul_int(&n);
    }
    Ok(value)
}

/// Completed zeta: fully lattice-periodic but no longer holomorphic.  In the
/// reduced frame `zeta*(z) = b1^{-1} (theta'/theta (w) + 2 pi i Im(w)/Im(tau))`
/// with `w = z/b1`; periodicity makes the discarded reduction shift exact.
pub fn zeta_star(
    lattice: &Lattice2D,
    z: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let (w, log_derivative, _, _) = zeta_core(lattice, z, ctx)?;
    let ratio = (w.im() / lattice.tau_red.im()).complete(w.prec_bits());
    let correction = ctx.two_pi_i().mul_real(&ratio);
    (log_derivative + correction).checked_div_relative(&lattice.b1)
}

/// Completion slope `S(Lambda)`: the coefficient relating the two zetas via
/// `zeta*(z) = zeta(z) - S z - (pi / volume) conj(z)`.  Basis-independent and
/// homogeneous of degree -2.
pub fn s_lattice(lattice: &Lattice2D, ctx: &PrecisionContext) -> Result<BigComplex> {
    let g2s = eisenstein_g2_star(&lattice.tau_red, ctx)?;
    let b1_sq = &lattice.b1 * &lattice.b1;
    g2s.checked_div_relative(&b1_sq)
}

/// Multi-variable sigma on the standard lattice of `tau`:
/// `sigma(z) = exp(u(tau) sum z_i^2 / 2) * prod theta(tau, z_i)`.
pub fn sigma(tau: &BigComplex, z: &[BigComplex], ctx: &PrecisionContext) -> Result<BigComplex> {
    let u = eisenstein_g2(tau, ctx)?;
    let mut q = ctx.zero();
    let mut product = ctx.one();
    for zi in z {
        q += &(zi * zi);
        product *= &theta_char(tau, zi, ctx)?;
    }
    let half = ctx.real("0.5").expect("constant parses");
    let exponent = (u * q).mul_real(&half);
    Ok(exponent.exp() * product)
}

/// Component zeta of the multi-variable sigma:
/// `zeta_j(z) = d/dz_j log sigma = u(tau) z_j + theta'/theta (z_j)`.
fn sigma_log_derivative(
    tau: &BigComplex,
    z_j: &BigComplex,
    component: usize,
    lattice: &Lattice2D,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    lattice.check_not_near_pole(z_j, component, ctx)?;
    let (theta, dtheta) = theta_char_with_dz(tau, z_j, ctx)?;
    let u = eisenstein_g2(tau, ctx)?;
    Ok(dtheta.checked_div_relative(&theta)? + u * z_j.clone())
}

/// Partial derivative `d/dz_i` of the component zeta `zeta_j`, by central
/// differencing at step `10^(-digits/3)` with one Richardson step.  For the
/// product sigma the mixed entries (`i != j`) vanish and the diagonal entries
/// are the negative of the classical elliptic second derivative.
pub fn wp_ji(
    tau: &BigComplex,
    z: &[BigComplex],
    i: usize,
    j: usize,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    if i >= z.len() || j >= z.len() {
        return Err(Error::UnsupportedComponent(i.max(j)));
    }
    let lattice = Lattice2D::standard(tau, ctx)?;
    let h = ctx.pow10_real(-((ctx.digits() / 3) as i32));
    let zeta_at = |offset: Float| -> Result<BigComplex> {
        let mut z_var = z.to_vec();
        z_var[i] += &ctx.complex_from_real(offset);
        sigma_log_derivative(tau, &z_var[j], j, &lattice, ctx)
    };
    let stencil = |step: &Float| -> Result<BigComplex> {
        let plus = zeta_at(step.clone())?;
        let minus = zeta_at(-step.clone())?;
        let two_h = ctx.complex_from_real(step.clone() * 2u32);
        (plus - minus).checked_div(&two_h)
    };
    let d1 = stencil(&h)?;
    let half_h = h / 2u32;
    let d2 = stencil(&half_h)?;
    // Richardson for a second-order stencil: (4 D(h/2) - D(h)) / 3.
    let third = ctx
        .complex_from_i64(3, 0)
        .checked_recip()
        .expect("3 is not tiny");
    Ok((d2 * 4i64 - d1) * third)
}

/// Laurent data of `zeta*` around the origin:
/// `zeta*(z) = c/z + a z + sum_p c_p z^p + b conj(z)` with `c = 1`,
/// `a = -S(Lambda)`, `c_p = -G_{p+1}(Lambda)` for odd `p >= 3`, and
/// `b = -pi / volume`.
#[derive(Debug, Clone)]
pub struct LaurentExpansion {
    pole_coeff: BigComplex,
    linear_z: BigComplex,
    odd_coeffs: BTreeMap<u32, BigComplex>,
    antiholo_zbar: BigComplex,
}

impl LaurentExpansion {
    /// Coefficient of `1/z` (always 1 for `zeta*`).
    pub fn pole_coeff(&self) -> &BigComplex {
        &self.pole_coeff
    }

    /// Coefficient of `z`.
    pub fn linear_z(&self) -> &BigComplex {
        &self.linear_z
    }

    /// Coefficients of odd powers `z^p`, `p >= 3`, keyed by `p`.
    pub fn odd_coeffs(&self) -> &BTreeMap<u32, BigComplex> {
        &self.odd_coeffs
    }

    /// Coefficient of `conj(z)`.
    pub fn antiholo_zbar(&self) -> &BigComplex {
        &self.antiholo_zbar
    }

    /// Evaluates the truncated expansion at `z`.
    pub fn eval(&self, z: &BigComplex) -> Result<BigComplex> {
        let mut acc = self.pole_coeff.checked_div(z)?;
        acc += &(&self.linear_z * z);
        for (&p, coeff) in &self.odd_coeffs {
            acc += &(coeff * &z.powi(p as i32));
        }
        acc += &(&self.antiholo_zbar * &z.conj());
        Ok(acc)
    }
}

/// Laurent expansion of `zeta*` for `lattice`, including odd powers up to
/// `max_order` (which must be at least 3).
pub fn laurent_zeta_star(
    lattice: &Lattice2D,
    max_order: u32,
    ctx: &PrecisionContext,
) -> Result<LaurentExpansion> {
    if max_order < 3 {
        return Err(Error::InvalidInput(format!(
            "laurent expansion needs max_order >= 3, got {max_order}"
        )));
    }
    let s = s_lattice(lattice, ctx)?;
    let mut odd_coeffs = BTreeMap::new();
    let mut p = 3u32;
    while p <= max_order {
        let g = eisenstein_g2n_lattice(lattice, (p + 1) / 2, ctx)?;
        odd_coeffs.insert(p, -g);
        p += 2;
    }
    let pi_over_vol = ctx.pi() / lattice.volume.clone();
    Ok(LaurentExpansion {
        pole_coeff: ctx.one(),
        linear_z: -s,
        odd_coeffs,
        antiholo_zbar: -ctx.complex_from_real(pi_over_vol),
    })
}

/// Weight-`2n` Eisenstein value of an arbitrary lattice, via homogeneity
/// `G_{2n}(Lambda) = b1^{-2n} G_{2n}(b2/b1)`.
pub fn eisenstein_g2n_lattice(
    lattice: &Lattice2D,
    n: u32,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let g = eisenstein_g2n_tau(&lattice.tau_red, n, ctx)?;
    // High powers of a short basis vector underflow the absolute heuristic
    // while staying exactly representable in relative terms.
    let b1_pow = lattice.b1.powi(2 * n as i32);
    g.checked_div_relative(&b1_pow)
}
