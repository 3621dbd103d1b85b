//! Eichler integrals, period symbols, and period-lattice recovery.
//!
//! For a cusp form `f` of weight `k` the components computed here are the
//! iterated tail integrals
//!
//! ```text
//! E_{f,ℓ}(τ) = ∫_τ^{i∞} f(t) t^ℓ dt,        0 ≤ ℓ ≤ k − 2,
//! ```
//!
//! evaluated termwise on the `q`-expansion of `f`.  Each `q^n` contributes
//! `c · q^n · Σ_{j=0}^{ℓ} ℓ!/(ℓ−j)! · c^j · τ^{ℓ−j}` with `c = i/(2πn)`, so the
//! whole vector `(E_{f,0}, …, E_{f,k−2})` comes out of a single pass over the
//! coefficients.  Differentiating in `τ` returns `−f(τ)τ^ℓ`, which is the
//! convention every downstream sign in this crate is pinned to.
//!
//! Under `τ ↦ γτ` the vector fails to transform under the symmetric-power
//! action by a constant: the defect `E(γτ) − N(γ)E(τ)` does not depend on `τ`
//! and equals `−N(γ)P(γ)`, where `P(γ)` is the period symbol computed by
//! [`period_polynomial`].  Collecting the symbol components over a set of
//! group elements (optionally together with the Fricke-involution symbol) and
//! feeding them to [`recover_lattice`] produces the rank-2 lattice spanned by
//! the accessible periods, against which [`modularity_defect`] resolves the
//! defect of any group element into exact integer coordinates.

use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::Error;
use crate::precision::{BigComplex, PrecisionContext};
use crate::qforms::{self, CuspForm, GroupDescriptor};
use crate::symrep::{n_matrix, SymVector, SL2Z};
use crate::weierstrass::{signed_area, Lattice2D};
use crate::Result;

/// Largest denominator considered when snapping lattice coordinates to
/// rationals during recovery refinement.
const MAX_COORD_DENOMINATOR: i128 = 10_000;

/// Fractional distance below which a lattice coordinate counts as an integer
/// during recovery and defect resolution.  Clean inputs sit many orders of
/// magnitude below this; a miss at this scale means the span is genuinely
/// finer than the current basis.
const INTEGER_COORD_TOL: f64 = 1e-9;

/// Two algebraically identical but numerically independent arrangements of
/// the per-`n` Eichler term.  `FactoredPrefix` accumulates
/// `c · Σ_j (…) c^j τ^{ℓ−j}` with the leading `c` factored out;
/// `NestedPowers` folds it in as `Σ_j (…) c^{j+1} τ^{ℓ−j}`.  Agreement of the
/// two routes is a correctness check on the summation itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Arrangement {
    FactoredPrefix,
    NestedPowers,
}

/// Value of the Eichler-integral vector expressed in a chosen frame.
///
/// `components` holds `(E_{f,0}, …, E_{f,k−2})` multiplied by the
/// symmetric-power matrix `N(M⁻¹)`; `basis_tag` records `M⁻¹` so the frame
/// can always be undone.  The standard frame has tag `I`.
#[derive(Debug, Clone)]
pub struct EichlerValue {
    weight: u32,
    components: Vec<BigComplex>,
    basis_tag: SL2Z,
}

impl EichlerValue {
    /// Weight of the underlying cusp form.
    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Frame-transformed components, index `ℓ = 0, …, k−2`.
    pub fn components(&self) -> &[BigComplex] {
        &self.components
    }

    /// Matrix that was applied to the standard-frame vector.
    pub fn basis_tag(&self) -> &SL2Z {
        &self.basis_tag
    }
}

/// One collected period value together with a human-readable provenance
/// label such as `"(4,-1;9,-2)[2]"` (group element and component index) or
/// `"W[0]"` for Fricke symbols.
#[derive(Debug, Clone)]
pub struct PeriodGenerator {
    /// The period value itself.
    pub value: BigComplex,
    /// Where the value came from.
    pub label: String,
}

impl fmt::Display for PeriodGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

/// Rank-2 period lattice `ω₁ℤ ⊕ ω₂ℤ` recovered from a set of period values,
/// with the generating values retained for reporting.
///
/// `omega1`/`omega2` form the canonical display pair (sign-normalised,
/// ordered by ascending argument); `basis` is the Gauss-reduced form used for
/// all metric computations.  `residual` bounds how far the input values sit
/// from exact integer combinations of the basis.
#[derive(Debug, Clone)]
pub struct PeriodLattice {
    basis: Lattice2D,
    omega1: BigComplex,
    omega2: BigComplex,
    generators: Vec<PeriodGenerator>,
    residual: Float,
}

impl PeriodLattice {
    /// Builds a lattice directly from an explicit basis, bypassing recovery.
    /// The pair is kept verbatim as the display basis, so coordinates are
    /// reported against exactly the generators handed in.
    pub fn from_basis(
        omega1: BigComplex,
        omega2: BigComplex,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let basis = Lattice2D::new(&omega1, &omega2, ctx)?;
        Ok(PeriodLattice {
            basis,
            omega1,
            omega2,
            generators: Vec::new(),
            residual: Float::with_val(ctx.prec_bits(), 0),
        })
    }

    /// First display generator.
    pub fn omega1(&self) -> &BigComplex {
        &self.omega1
    }

    /// Second display generator.
    pub fn omega2(&self) -> &BigComplex {
        &self.omega2
    }

    /// Gauss-reduced lattice for metric work (volume, pole distances, …).
    pub fn basis(&self) -> &Lattice2D {
        &self.basis
    }

    /// Period values the lattice was recovered from (empty for
    /// [`PeriodLattice::from_basis`]).
    pub fn generators(&self) -> &[PeriodGenerator] {
        &self.generators
    }

    /// Worst distance of any generating value from the lattice, in absolute
    /// units of the basis vectors.
    pub fn residual(&self) -> &Float {
        &self.residual
    }

    /// Real coordinates `(a, b)` with `z = a·ω₁ + b·ω₂`, resolved against the
    /// display basis.
    pub fn coordinates(&self, z: &BigComplex) -> (Float, Float) {
        planar_coordinates(&self.omega1, &self.omega2, z)
    }

    /// Integer coordinates of a lattice point over the display basis.
    /// Fails if either coordinate is farther than `1e-9` from an integer.
    pub fn integer_coordinates(&self, z: &BigComplex) -> Result<(Integer, Integer)> {
        let (a, b) = self.coordinates(z);
        let (ra, fa) = round_and_frac(&a);
        let (rb, fb) = round_and_frac(&b);
        if fa > INTEGER_COORD_TOL || fb > INTEGER_COORD_TOL {
            return Err(Error::LatticeRecovery(format!(
                "value is not an integer combination of the basis \
                 (coordinates {:.6} and {:.6} have fractional parts {:.3e} and {:.3e})",
                a.to_f64(),
                b.to_f64(),
                fa,
                fb
            )));
        }
        Ok((ra, rb))
    }
}

/// Eichler integral `E_{f,ℓ}(τ)` via the factored-prefix termwise summation.
pub fn eichler_series(
    f: &CuspForm,
    ell: usize,
    tau: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let mut values = eichler_components_up_to(f, ell, tau, ctx, Arrangement::FactoredPrefix)?;
    Ok(values.swap_remove(ell))
}

/// Eichler integral `E_{f,ℓ}(τ)` via the nested-powers arrangement.  Same
/// value as [`eichler_series`] through a different floating-point path, kept
/// as an internal consistency oracle.
pub fn eichler_quadrature(
    f: &CuspForm,
    ell: usize,
    tau: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let mut values = eichler_components_up_to(f, ell, tau, ctx, Arrangement::NestedPowers)?;
    Ok(values.swap_remove(ell))
}

/// Full Eichler vector `N(M⁻¹) · (E_{f,0}, …, E_{f,k−2})(τ)`, tagged with the
/// frame `M⁻¹`.  Pass the identity for the standard frame.
pub fn eichler_vector(
    f: &CuspForm,
    tau: &BigComplex,
    m: &SL2Z,
    ctx: &PrecisionContext,
) -> Result<EichlerValue> {
    let k = f.weight();
    let top = (k - 2) as usize;
    let components = eichler_components_up_to(f, top, tau, ctx, Arrangement::FactoredPrefix)?;
    let tag = m.inverse();
    let components = if tag == SL2Z::identity() {
        components
    } else {
        n_matrix(&tag, k)?.matvec(&components, ctx)
    };
    Ok(EichlerValue {
        weight: k,
        components,
        basis_tag: tag,
    })
}

/// Reorders a standard-frame component vector into the alternating display
/// convention used by the reporting layer: entry `j` of the output is
/// `(−1)^j` times component `k−2−j` of the input.
pub fn display_components(components: &[BigComplex]) -> Vec<BigComplex> {
    let n = components.len();
    (0..n)
        .map(|j| {
            let v = components[n - 1 - j].clone();
            if j % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// Single component `P_ℓ(γ)` of the period symbol; see [`period_polynomial`].
pub fn period_integral(
    f: &CuspForm,
    gamma: &SL2Z,
    ell: usize,
    ctx: &PrecisionContext,
) -> Result<BigComplex> {
    let k = f.weight();
    if ell + 2 > k as usize {
        return Err(Error::UnsupportedComponent(ell));
    }
    let mut values = period_components(f, gamma, ctx)?;
    Ok(values.swap_remove(ell))
}

/// Period symbol `P(γ) = E(z₀) − N(γ⁻¹) E(γz₀)` as a symmetric-power vector
/// in the standard frame.
///
/// The basepoint `z₀ = p/r + i/|r|` (for `γ⁻¹ = (p, q; r, u)`, `r ≠ 0`) sits
/// on the geodesic between the cusps `γ⁻¹∞` and `∞` at the height where
/// `Im(γz₀) = Im(z₀)`, which balances the two series evaluations.  For
/// parabolic `γ` fixing `∞` (`r = 0`) the symbol vanishes identically and is
/// returned as exact zeros.  Componentwise,
/// `∫_{γ⁻¹∞}^{∞} f(t) tᵉ dt = (−1)ᵉ P_{k−2−ᵉ}(γ)`.
pub fn period_polynomial(
    f: &CuspForm,
    gamma: &SL2Z,
    ctx: &PrecisionContext,
) -> Result<SymVector> {
    let values = period_components(f, gamma, ctx)?;
    SymVector::standard(f.weight(), values)
}

/// Eigenvalue `c_f` of `f` under the Fricke involution
/// `W_N : τ ↦ −1/(Nτ)`, measured as
/// `f(−1/(Nτ_t)) / (N^{k/2} τ_t^k f(τ_t))` at a fixed test point.  For the
/// newforms handled here this is `±1` to working precision.
pub fn fricke_eigenvalue(f: &CuspForm, ctx: &PrecisionContext) -> Result<BigComplex> {
    let k = f.weight();
    if k % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "Fricke eigenvalue measurement requires even weight, got {k}"
        )));
    }
    let level = f.group().level();
    let tau_t = ctx.complex("0", "0.3")?;
    let f_t = f.eval(&tau_t, ctx)?;
    let w = -(&tau_t * level).checked_recip()?;
    let f_w = f.eval(&w, ctx)?;
    let scale = Float::with_val(ctx.prec_bits(), level).pow((k / 2) as i32);
    let denom = tau_t.powi(k as i32).mul_real(&scale) * &f_t;
    f_w.checked_div(&denom)
}

/// Period symbols of the Fricke involution,
/// `r_ℓ = E_ℓ(i/√N) − c_f (−1)^ℓ N^{k/2−1−ℓ} E_{k−2−ℓ}(i/√N)`,
/// evaluated at the Fricke fixed point `i/√N`.  For level 1 these reduce to
/// the period symbol of `S = (0,−1;1,0)`.
pub fn fricke_period_symbols(f: &CuspForm, ctx: &PrecisionContext) -> Result<Vec<BigComplex>> {
    let k = f.weight();
    let dim = (k - 1) as usize;
    let level = f.group().level();
    let prec = ctx.prec_bits();
    let im = Float::with_val(prec, level).sqrt().recip();
    let fixed_point = ctx.complex_from_parts(Float::with_val(prec, 0), im);
    let e = eichler_components_up_to(f, dim - 1, &fixed_point, ctx, Arrangement::FactoredPrefix)?;
    let cf = fricke_eigenvalue(f, ctx)?;
    let mut out = Vec::with_capacity(dim);
    for ell in 0..dim {
        let npow = Float::with_val(prec, level).pow(k as i32 / 2 - 1 - ell as i32);
        let mut twisted = e[dim - 1 - ell].mul_real(&npow) * &cf;
        if ell % 2 == 1 {
            twisted = -twisted;
        }
        out.push(&e[ell] - &twisted);
    }
    Ok(out)
}

/// Modularity defect `λ(γ) = E(γτ) − N(γ)E(τ)` resolved into integer
/// coordinates over the lattice's display basis, one `(a, b)` pair per
/// component.  The defect is independent of `τ` and equals `−N(γ)P(γ)`, so a
/// failure to resolve means the lattice does not contain the symbol span.
pub fn modularity_defect(
    f: &CuspForm,
    gamma: &SL2Z,
    tau: &BigComplex,
    lattice: &PeriodLattice,
    ctx: &PrecisionContext,
) -> Result<Vec<(Integer, Integer)>> {
    let k = f.weight();
    let top = (k - 2) as usize;
    let e_tau = eichler_components_up_to(f, top, tau, ctx, Arrangement::FactoredPrefix)?;
    let gamma_tau = gamma.apply(tau, ctx);
    let e_gamma_tau =
        eichler_components_up_to(f, top, &gamma_tau, ctx, Arrangement::FactoredPrefix)?;
    let twisted = n_matrix(gamma, k)?.matvec(&e_tau, ctx);
    let mut out = Vec::with_capacity(top + 1);
    for ell in 0..=top {
        let defect = &e_gamma_tau[ell] - &twisted[ell];
        let coords = lattice.integer_coordinates(&defect).map_err(|e| {
            Error::LatticeRecovery(format!("defect component {ell} of {gamma}: {e}"))
        })?;
        out.push(coords);
    }
    Ok(out)
}

/// Recovers the lattice spanned by a set of period values.
///
/// Values below `10^{−digits/2}` in magnitude are treated as exact zeros and
/// dropped.  A Gauss-reduced initial basis is built from the first value and
/// the first value independent of it; every remaining value is then resolved
/// against the current basis, and any non-integer coordinates are snapped to
/// rationals with denominator at most `10⁴` (continued-fraction best
/// approximation), after which the basis is refined through a two-row Hermite
/// normal form and re-reduced.  The result is sign-normalised and ordered by
/// ascending argument.
pub fn recover_lattice(values: &[BigComplex], ctx: &PrecisionContext) -> Result<PeriodLattice> {
    let labelled = values
        .iter()
        .enumerate()
        .map(|(i, v)| PeriodGenerator {
            value: v.clone(),
            label: format!("value[{i}]"),
        })
        .collect();
    recover_from_generators(labelled, ctx)
}

/// Collects period symbols over a finite probe set of group elements
/// (optionally extended by the Fricke symbols) and recovers the lattice they
/// span.
///
/// The probe set is `{T, S}` for the full modular group, a curated generator
/// list for the levels with known small presentations, and an enumerated
/// batch of small group elements otherwise.  `include_fricke` adds the
/// Fricke-involution symbols from [`fricke_period_symbols`]; for levels with
/// extra symmetry this can refine the lattice beyond the span of the group
/// symbols alone.
pub fn period_lattice_for_form(
    f: &CuspForm,
    include_fricke: bool,
    ctx: &PrecisionContext,
) -> Result<PeriodLattice> {
    let mut generators = Vec::new();
    for gamma in probe_elements(f.group())? {
        let components = period_components(f, &gamma, ctx)?;
        for (ell, value) in components.into_iter().enumerate() {
            generators.push(PeriodGenerator {
                value,
                label: format!("{gamma}[{ell}]"),
            });
        }
    }
    if include_fricke {
        for (ell, value) in fricke_period_symbols(f, ctx)?.into_iter().enumerate() {
            generators.push(PeriodGenerator {
                value,
                label: format!("W[{ell}]"),
            });
        }
    }
    recover_from_generators(generators, ctx)
}

/// Computes `(E_{f,0}, …, E_{f,max_ell})(τ)` in one pass over the
/// `q`-expansion, in the requested summation arrangement.
fn eichler_components_up_to(
    f: &CuspForm,
    max_ell: usize,
    tau: &BigComplex,
    ctx: &PrecisionContext,
    arrangement: Arrangement,
) -> Result<Vec<BigComplex>> {
    let k = f.weight();
    if k < 2 || max_ell > (k - 2) as usize {
        return Err(Error::UnsupportedComponent(max_ell));
    }
    qforms::require_upper(tau, "Eichler integral")?;
    let budget = eichler_budget(f, max_ell, tau, ctx)?;
    let coeffs = f.coefficients_up_to(budget)?;
    let prec = ctx.prec_bits();
    let q = qforms::q_of_tau(tau, ctx);

    let mut tau_pows = Vec::with_capacity(max_ell + 1);
    let mut p = ctx.one();
    for _ in 0..=max_ell {
        tau_pows.push(p.clone());
        p *= tau;
    }
    let two_pi = {
        let mut t = ctx.pi();
        t *= 2;
        t
    };

    let mut sums = vec![ctx.zero(); max_ell + 1];
    let mut qn = ctx.one();
    for (idx, a) in coeffs.iter().take(budget).enumerate() {
        qn *= &q;
        if *a == 0 {
            continue;
        }
        let n = (idx + 1) as i64;
        // c = i/(2πn)
        let c = {
            let mut c_im = Float::with_val(prec, &two_pi);
            c_im *= n;
            c_im.recip_mut();
            ctx.complex_from_parts(Float::with_val(prec, 0), c_im)
        };
        let aqn = qn.mul_int(a);
        for (ell, sum) in sums.iter_mut().enumerate() {
            let mut inner = ctx.zero();
            let mut c_pow = match arrangement {
                Arrangement::FactoredPrefix => ctx.one(),
                Arrangement::NestedPowers => c.clone(),
            };
            let mut falling = Integer::from(1);
            for j in 0..=ell {
                let mut term = &tau_pows[ell - j] * &c_pow;
                if falling != 1 {
                    term = term.mul_int(&falling);
                }
                inner += &term;
                falling *= (ell - j) as u64;
                c_pow *= &c;
            }
            let contribution = match arrangement {
                Arrangement::FactoredPrefix => (&aqn * &inner) * &c,
                Arrangement::NestedPowers => &aqn * &inner,
            };
            *sum += &contribution;
        }
    }
    Ok(sums)
}

/// Series budget for the Eichler tail, with the combinatorial prefactor
/// `ℓ! · max(1, |τ|)^ℓ` of the largest component folded into the tolerance.
fn eichler_budget(
    f: &CuspForm,
    max_ell: usize,
    tau: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<usize> {
    let growth = (f.weight() as f64 + 3.0) / 2.0;
    let tau_abs = tau.abs().to_f64().max(1.0);
    let mut slack = 1.0f64;
    for j in 1..=max_ell {
        slack *= j as f64 * tau_abs;
    }
    let mut tol = ctx.series_tail_tol().clone();
    if slack > 1.0 {
        tol /= &Float::with_val(ctx.prec_bits(), slack);
    }
    qforms::series_budget(qforms::ln_inv_abs_q(tau), &tol, growth)
}

/// Shared implementation of [`period_polynomial`] returning the raw
/// component vector.
fn period_components(
    f: &CuspForm,
    gamma: &SL2Z,
    ctx: &PrecisionContext,
) -> Result<Vec<BigComplex>> {
    let k = f.weight();
    let dim = (k - 1) as usize;
    let gi = gamma.inverse();
    if gi.c == 0 {
        return Ok(vec![ctx.zero(); dim]);
    }
    let prec = ctx.prec_bits();
    let re = Float::with_val(prec, gi.a) / Float::with_val(prec, gi.c);
    let im = Float::with_val(prec, gi.c).abs().recip();
    let z0 = ctx.complex_from_parts(re, im);
    let gz0 = gamma.apply(&z0, ctx);
    let e_base = eichler_components_up_to(f, dim - 1, &z0, ctx, Arrangement::FactoredPrefix)?;
    let e_image = eichler_components_up_to(f, dim - 1, &gz0, ctx, Arrangement::FactoredPrefix)?;
    let twisted = n_matrix(&gi, k)?.matvec(&e_image, ctx);
    Ok(e_base
        .iter()
        .zip(twisted.iter())
        .map(|(a, b)| a - b)
        .collect())
}

/// Probe elements whose period symbols span (a finite-index sublattice of)
/// the period lattice.
fn probe_elements(group: GroupDescriptor) -> Result<Vec<SL2Z>> {
    match group {
        GroupDescriptor::Full => Ok(vec![SL2Z::t(), SL2Z::s()]),
        GroupDescriptor::Gamma0(9) => Ok(vec![
            SL2Z::t(),
            SL2Z::neg_identity(),
            SL2Z::new(4, -1, 9, -2)?,
            SL2Z::new(7, -4, 9, -5)?,
        ]),
        GroupDescriptor::Gamma0(11) => Ok(vec![
            SL2Z::t(),
            SL2Z::neg_identity(),
            SL2Z::new(1, 0, 11, 1)?,
            SL2Z::new(2, 1, 11, 6)?,
            SL2Z::new(3, 1, 11, 4)?,
            SL2Z::new(4, 1, 11, 3)?,
            SL2Z::new(5, 4, 11, 9)?,
            SL2Z::new(7, 5, 11, 8)?,
            SL2Z::new(3, 2, 22, 15)?,
            SL2Z::new(5, 3, 33, 20)?,
        ]),
        GroupDescriptor::Gamma0(n) => enumerate_probes(n, false),
        GroupDescriptor::Gamma1(n) => enumerate_probes(n, true),
    }
}

/// Enumerates a batch of small group elements of `Γ₀(n)` (or `Γ₁(n)` when
/// `unit_diagonal` is set) with `c ∈ {n, 2n, 3n}` and balanced top row.
fn enumerate_probes(n: i64, unit_diagonal: bool) -> Result<Vec<SL2Z>> {
    let mut out = vec![SL2Z::t()];
    if !unit_diagonal {
        out.push(SL2Z::neg_identity());
    }
    for mult in 1..=3i64 {
        let c = n * mult;
        for d in 1..c {
            if gcd_i64(d, c) != 1 {
                continue;
            }
            if unit_diagonal && d % n != 1 {
                continue;
            }
            let mut a = mod_inverse(d, c);
            if a > c / 2 {
                a -= c;
            }
            let b = (a * d - 1) / c;
            out.push(SL2Z::new(a, b, c, d)?);
            if out.len() >= 10 {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

fn gcd_i64(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `d` modulo `c` for coprime inputs, in `1..c`.
fn mod_inverse(d: i64, c: i64) -> i64 {
    let (mut r0, mut r1) = (c, d.rem_euclid(c));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(c)
}

/// Coordinates of `z` in the real plane spanned by `(w1, w2)` via signed
/// areas: `a = area(z, w2)/area(w1, w2)` and `b = area(w1, z)/area(w1, w2)`.
fn planar_coordinates(w1: &BigComplex, w2: &BigComplex, z: &BigComplex) -> (Float, Float) {
    let det = signed_area(w1, w2);
    let mut a = signed_area(z, w2);
    a /= &det;
    let mut b = signed_area(w1, z);
    b /= &det;
    (a, b)
}

/// Nearest integer and fractional distance of a real coordinate.
fn round_and_frac(x: &Float) -> (Integer, f64) {
    let rounded = x.clone().round();
    let mut frac = x.clone();
    frac -= &rounded;
    let frac = frac.abs().to_f64();
    let rounded = rounded
        .to_integer()
        .expect("rounded finite Float converts to Integer");
    (rounded, frac)
}

/// Best rational approximation `p/q` to `x` with `q ≤ max_den`, by continued
/// fractions with the closing semiconvergent considered.
fn limit_denominator(x: f64, max_den: i128) -> (i128, i128) {
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (0, 1, 1, 0);
    for _ in 0..64 {
        let floor = v.floor();
        if !(floor < 1e18) {
            break;
        }
        let a = floor as i128;
        let q2 = a * q1 + q0;
        if q2 > max_den {
            let k = if q1 == 0 { 0 } else { (max_den - q0) / q1 };
            let (sp, sq) = (p0 + k * p1, q0 + k * q1);
            let best = if sq > 0 && q1 > 0 {
                let err_conv = (x.abs() - p1 as f64 / q1 as f64).abs();
                let err_semi = (x.abs() - sp as f64 / sq as f64).abs();
                if err_semi < err_conv {
                    (sp, sq)
                } else {
                    (p1, q1)
                }
            } else {
                (p1, q1)
            };
            return (if neg { -best.0 } else { best.0 }, best.1.max(1));
        }
        (p0, q0, p1, q1) = (p1, q1, a * p1 + p0, q2);
        let frac = v - floor;
        if frac < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    (if neg { -p1 } else { p1 }, q1.max(1))
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Hermite normal form of an integer row system of rank 2, returned as the
/// two nonzero rows `(g0, h0)` (pivot in column 0) and `(0, h1)`.
fn hnf_two_rows(mut rows: Vec<[i128; 2]>) -> Result<([i128; 2], [i128; 2])> {
    loop {
        let mut nonzero: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][0] != 0).collect();
        if nonzero.len() <= 1 {
            break;
        }
        nonzero.sort_by_key(|&i| rows[i][0].abs());
        let pivot = rows[nonzero[0]];
        for &i in &nonzero[1..] {
            let q = rows[i][0].div_euclid(pivot[0]);
            rows[i][0] -= q * pivot[0];
            rows[i][1] -= q * pivot[1];
        }
    }
    let first = rows.iter().copied().find(|r| r[0] != 0);
    let mut col1: Vec<i128> = rows
        .iter()
        .filter(|r| r[0] == 0)
        .map(|r| r[1])
        .filter(|&v| v != 0)
        .collect();
    while col1.len() > 1 {
        col1.sort_by_key(|v| v.abs());
        let p = col1[0].abs();
        for v in col1.iter_mut().skip(1) {
            *v = v.rem_euclid(p);
        }
        col1.retain(|&v| v != 0);
    }
    match (first, col1.first()) {
        (Some(mut r0), Some(&g1)) => {
            if r0[0] < 0 {
                r0 = [-r0[0], -r0[1]];
            }
            Ok((r0, [0, g1.abs()]))
        }
        _ => Err(Error::LatticeRecovery(
            "rational refinement produced a rank-deficient row system".into(),
        )),
    }
}

/// Gauss-reduces a basis pair through [`Lattice2D`].
fn gauss_pair(
    w1: &BigComplex,
    w2: &BigComplex,
    ctx: &PrecisionContext,
) -> Result<(BigComplex, BigComplex)> {
    let lat = Lattice2D::new(w1, w2, ctx)?;
    Ok((lat.b1().clone(), lat.b2().clone()))
}

/// Sign-normalises each basis vector into the right half-plane (positive
/// imaginary axis included) and orders the pair by ascending argument.
fn canonical_pair(
    w1: &BigComplex,
    w2: &BigComplex,
    ctx: &PrecisionContext,
) -> (BigComplex, BigComplex) {
    let tol = ctx.pow10_real(-(ctx.digits() as i32) + 8);
    let normalise = |w: &BigComplex| -> BigComplex {
        let re = w.re();
        let negate = *re < -tol.clone() || (re.clone().abs() <= tol && *w.im() < 0);
        if negate {
            -w.clone()
        } else {
            w.clone()
        }
    };
    let c1 = normalise(w1);
    let c2 = normalise(w2);
    let a1 = c1.im().clone().atan2(c1.re());
    let a2 = c2.im().clone().atan2(c2.re());
    if a1 > a2 {
        (c2, c1)
    } else {
        (c1, c2)
    }
}

/// Core of [`recover_lattice`]: keeps the provenance labels so refinement
/// failures can name the offending generator.
fn recover_from_generators(
    generators: Vec<PeriodGenerator>,
    ctx: &PrecisionContext,
) -> Result<PeriodLattice> {
    let prec = ctx.prec_bits();
    let drop_tol = ctx.pow10_real(-(ctx.digits() as i32) / 2);
    let live: Vec<usize> = (0..generators.len())
        .filter(|&i| generators[i].value.abs() > drop_tol)
        .collect();
    if live.len() < 2 {
        return Err(Error::LatticeRecovery(format!(
            "need at least two generators of non-negligible size, have {}",
            live.len()
        )));
    }

    let v0 = &generators[live[0]].value;
    let mut partner = None;
    for &i in &live[1..] {
        let ratio = generators[i].value.checked_div(v0)?;
        let mut rel = ratio.im().clone().abs();
        rel /= &ratio.abs();
        if rel > 1e-12 {
            partner = Some(generators[i].value.clone());
            break;
        }
    }
    let Some(partner) = partner else {
        return Err(Error::LatticeRecovery(
            "generators are collinear; a rank-2 span is required".into(),
        ));
    };
    let (mut w1, mut w2) = gauss_pair(v0, &partner, ctx)?;

    for &i in &live {
        let v = &generators[i].value;
        let (a, b) = planar_coordinates(&w1, &w2, v);
        let (_, fa) = round_and_frac(&a);
        let (_, fb) = round_and_frac(&b);
        if fa < INTEGER_COORD_TOL && fb < INTEGER_COORD_TOL {
            continue;
        }
        let (na, da) = limit_denominator(a.to_f64(), MAX_COORD_DENOMINATOR);
        let (nb, db) = limit_denominator(b.to_f64(), MAX_COORD_DENOMINATOR);
        let qq = da / gcd_i128(da, db) * db;
        if qq > MAX_COORD_DENOMINATOR {
            return Err(Error::LatticeRecovery(format!(
                "generator {} needs coordinate denominator {} beyond the bound {}",
                generators[i], qq, MAX_COORD_DENOMINATOR
            )));
        }
        let rows = vec![
            [qq, 0],
            [0, qq],
            [na * (qq / da), nb * (qq / db)],
        ];
        let (r0, r1) = hnf_two_rows(rows)?;
        let inv_qq = Float::with_val(prec, Integer::from(qq)).recip();
        let refined1 = (w1.mul_int(&Integer::from(r0[0])) + w2.mul_int(&Integer::from(r0[1])))
            .mul_real(&inv_qq);
        let refined2 = (w1.mul_int(&Integer::from(r1[0])) + w2.mul_int(&Integer::from(r1[1])))
            .mul_real(&inv_qq);
        (w1, w2) = gauss_pair(&refined1, &refined2, ctx)?;
        let (a2, b2) = planar_coordinates(&w1, &w2, v);
        let (_, fa2) = round_and_frac(&a2);
        let (_, fb2) = round_and_frac(&b2);
        if fa2 >= INTEGER_COORD_TOL || fb2 >= INTEGER_COORD_TOL {
            return Err(Error::LatticeRecovery(format!(
                "refinement failed to capture generator {} (fractional parts {:.3e}, {:.3e})",
                generators[i], fa2, fb2
            )));
        }
    }

    let (omega1, omega2) = canonical_pair(&w1, &w2, ctx);
    let mut residual = Float::with_val(prec, 0);
    for &i in &live {
        let (a, b) = planar_coordinates(&omega1, &omega2, &generators[i].value);
        let (_, fa) = round_and_frac(&a);
        let (_, fb) = round_and_frac(&b);
        let mut da = omega1.abs();
        da *= fa;
        let mut db = omega2.abs();
        db *= fb;
        if da > residual {
            residual = da;
        }
        if db > residual {
            residual = db;
        }
    }

    let basis = Lattice2D::new(&w1, &w2, ctx)?;
    Ok(PeriodLattice {
        basis,
        omega1,
        omega2,
        generators,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_digits(digits: u32) -> PrecisionContext {
        PrecisionContext::new(digits).expect("valid precision")
    }

    fn c(ctx: &PrecisionContext, re: &str, im: &str) -> BigComplex {
        ctx.complex(re, im).expect("parse fixture")
    }

    fn assert_close(value: &BigComplex, reference: &BigComplex, tol: f64, what: &str) {
        let dist = value.dist(reference).to_f64();
        let scale = reference.abs().to_f64().max(1e-300);
        assert!(
            dist <= tol * scale || dist <= tol * 1e-30,
            "{what}: |Δ| = {dist:.3e} exceeds {tol:.1e} × {scale:.3e}"
        );
    }

    fn delta_form() -> CuspForm {
        CuspForm::by_name("delta", 2_000).expect("delta built-in")
    }

    fn eta3p8_form() -> CuspForm {
        CuspForm::by_name("eta3p8", 2_000).expect("eta3p8 built-in")
    }

    fn x011_form() -> CuspForm {
        CuspForm::by_name("x011", 4_000).expect("x011 built-in")
    }

    /// Standard-frame Eichler components of the weight-12 level-1 form at
    /// `τ = 2i`, frozen from an independent 80-digit evaluation.
    const DELTA_E_2I: [(&str, &str); 11] = [
        ("0", "5.55004547948998416256436929223e-7"),
        ("-1.19834266141738431769989065389e-6", "0"),
        ("0", "-2.60147019522549382947435476754e-6"),
        ("5.68217092073785741052096067728e-6", "0"),
        ("0", "1.24975219142309488559542832175e-5"),
        ("-2.77055319163482644596942175878e-5", "0"),
        ("0", "-6.19775633586239926070315404051e-5"),
        ("1.40089903224264312065236339094e-4", "0"),
        ("0", "3.20451744039443764832936025386e-4"),
        ("-7.43181743093065024247121456399e-4", "0"),
        ("0", "-1.75114945702955018450786499344e-3"),
    ];

    /// Period symbol of `S` for the weight-12 level-1 form, frozen from the
    /// same independent evaluation.
    const DELTA_P_S: [(&str, &str); 11] = [
        ("0", "0.005958964989578237853835564"),
        ("-0.003707710464948065294503214", "0"),
        ("0", "-0.002541756054196643430247145"),
        ("0.001931099200493784007553757", "0"),
        ("0", "0.001633986034840699348016022"),
        ("-0.001544879360395027206043006", "0"),
        ("0", "-0.001633986034840699348016022"),
        ("0.001931099200493784007553757", "0"),
        ("0", "0.002541756054196643430247145"),
        ("-0.003707710464948065294503214", "0"),
        ("0", "-0.005958964989578237853835564"),
    ];

    const W1_DELTA: &str = "7.72439680197513603021502890198e-5";
    const W2_DELTA: &str = "2.62740960739781210486576914277e-7";
    const W1_CM: &str = "0.0577504719877191584835594176398328";
    const W2_CM: &str = "0.0111140835159791994161240294275608";

    /// Period symbols of the four curated `Γ₀(9)` generators `±σ₁^{±1}`,
    /// frozen from an independent evaluation; rows are components `ℓ = 0..2`.
    const CM_P_SIGMA1: [(&str, &str); 3] = [
        (
            "-0.346502831926314950901356505839",
            "-0.600160509862876768470697589088",
        ),
        (
            "-0.0577504719877191584835594176398",
            "-0.166711252739687991241860441413",
        ),
        ("0", "-0.0444563340639167976644961177102"),
    ];
    const CM_P_SIGMA2: [(&str, &str); 3] = [
        ("0.693005663852629901802713011678", "0"),
        (
            "0.404253303914034109384915923479",
            "0.0333422505479375982483720882827",
        ),
        (
            "0.231001887950876633934237670559",
            "0.0444563340639167976644961177102",
        ),
    ];
    const CM_P_SIGMA1_INV: [(&str, &str); 3] = [
        ("-0.693005663852629901802713011678", "0"),
        (
            "-0.288752359938595792417797088199",
            "-0.0333422505479375982483720882827",
        ),
        (
            "-0.11550094397543831696711883528",
            "-0.0222281670319583988322480588551",
        ),
    ];
    const CM_P_SIGMA2_INV: [(&str, &str); 3] = [
        (
            "0.346502831926314950901356505839",
            "-0.600160509862876768470697589088",
        ),
        (
            "0.288752359938595792417797088199",
            "-0.433449257123188777228837147675",
        ),
        (
            "0.231001887950876633934237670559",
            "-0.311194338447417583651472823972",
        ),
    ];

    /// Fricke period symbols of the weight-4 level-9 form.
    const CM_FRICKE_R: [(&str, &str); 3] = [
        ("0", "0.0666845010958751964967441765654"),
        ("-0.0192501573292397194945198058799", "0"),
        ("0", "-0.00740938901065279961074935295171"),
    ];

    fn sigma1() -> SL2Z {
        SL2Z::new(4, -1, 9, -2).unwrap()
    }

    fn sigma2() -> SL2Z {
        SL2Z::new(7, -4, 9, -5).unwrap()
    }

    fn cm_tau0(ctx: &PrecisionContext) -> BigComplex {
        let mut im = Float::with_val(ctx.prec_bits(), 7);
        im = im.sqrt();
        im /= 2;
        ctx.complex_from_parts(ctx.real("0.5").unwrap(), im)
    }

    #[test]
    fn eichler_components_match_reference_values() {
        let ctx = ctx_digits(60);
        let f = delta_form();
        let tau = c(&ctx, "0", "2");
        let e = eichler_components_up_to(&f, 10, &tau, &ctx, Arrangement::FactoredPrefix)
            .expect("series converges");
        for (ell, (re, im)) in DELTA_E_2I.iter().enumerate() {
            assert_close(
                &e[ell],
                &c(&ctx, re, im),
                1e-24,
                &format!("E_{{Δ,{ell}}}(2i)"),
            );
        }
        // Alternating display map: entry j picks component 10−j with sign (−1)^j.
        let display = display_components(&e);
        assert_close(&display[0], &e[10], 1e-50, "display row 0");
        let neg = -e[9].clone();
        assert_close(&display[1], &neg, 1e-50, "display row 1");
    }

    #[test]
    fn eichler_components_match_reference_values_weight_four() {
        let ctx = ctx_digits(60);
        let f = eta3p8_form();
        let tau0 = cm_tau0(&ctx);
        let e = eichler_components_up_to(&f, 2, &tau0, &ctx, Arrangement::FactoredPrefix)
            .expect("series converges");
        let refs = [
            ("0", "-0.0000390858539323960542330195070026"),
            (
                "0.0000579264315010283928568728800231",
                "-0.0000195429269661980271165097535013",
            ),
            (
                "0.0000579264315010283928568728800231",
                "0.0000770673367163429167353829591328",
            ),
        ];
        for (ell, (re, im)) in refs.iter().enumerate() {
            assert_close(
                &e[ell],
                &c(&ctx, re, im),
                1e-26,
                &format!("E_{{f,{ell}}}(τ₀)"),
            );
        }
    }

    #[test]
    fn series_and_quadrature_arrangements_agree() {
        let ctx = PrecisionContext::default_budget();
        let tol = 10f64.powi(-((ctx.digits() - 2 * ctx.guard()) as i32));
        let f = delta_form();
        for (re, im) in [("0", "2"), ("0.37", "0.9"), ("-1.25", "0.31")] {
            let tau = c(&ctx, re, im);
            for ell in [0usize, 1, 10] {
                let a = eichler_series(&f, ell, &tau, &ctx).unwrap();
                let b = eichler_quadrature(&f, ell, &tau, &ctx).unwrap();
                assert_close(&a, &b, tol, &format!("arrangements at ℓ={ell}, τ={re}+{im}i"));
            }
        }
        let f = eta3p8_form();
        let tau0 = cm_tau0(&ctx);
        for ell in 0..=2 {
            let a = eichler_series(&f, ell, &tau0, &ctx).unwrap();
            let b = eichler_quadrature(&f, ell, &tau0, &ctx).unwrap();
            assert_close(&a, &b, tol, &format!("arrangements at ℓ={ell}, τ=τ₀"));
        }
    }

    /// Gauss–Legendre panel quadrature of `∫_τ^{τ+iH} f(t) tᵉ dt` plus the
    /// termwise tail from `τ+iH`, as an independent oracle for the termwise
    /// value at `τ`.
    fn vertical_integral_oracle(
        f: &CuspForm,
        ell: usize,
        tau: &BigComplex,
        height: u32,
        panels: u32,
        ctx: &PrecisionContext,
    ) -> BigComplex {
        let prec = ctx.prec_bits();
        let nodes = gauss_legendre_16(prec);
        let mut total = ctx.zero();
        for panel in 0..panels {
            let lo = Float::with_val(prec, height) / Float::with_val(prec, panels)
                * Float::with_val(prec, panel);
            let hi = Float::with_val(prec, height) / Float::with_val(prec, panels)
                * Float::with_val(prec, panel + 1);
            let mut half = hi.clone();
            half -= &lo;
            half /= 2;
            let mut mid = hi;
            mid += &lo;
            mid /= 2;
            for (x, w) in &nodes {
                let mut s = Float::with_val(prec, x);
                s *= &half;
                s += &mid;
                let t = ctx.complex_from_parts(tau.re().clone(), {
                    let mut im = tau.im().clone();
                    im += &s;
                    im
                });
                let val = f.eval(&t, ctx).unwrap() * t.powi(ell as i32);
                let mut weight = Float::with_val(prec, w);
                weight *= &half;
                total += &val.mul_real(&weight);
            }
        }
        // dt = i ds along the vertical segment.
        total = total.mul_i(false);
        let top = ctx.complex_from_parts(tau.re().clone(), {
            let mut im = tau.im().clone();
            im += height;
            im
        });
        let tail = eichler_series(f, ell, &top, ctx).unwrap();
        total + tail
    }

    /// 16-point Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton
    /// iteration on the Legendre recurrence.
    fn gauss_legendre_16(prec: u32) -> Vec<(Float, Float)> {
        let n = 16usize;
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let guess = {
                let mut g = pi.clone();
                g *= Float::with_val(prec, i as f64 + 0.75);
                g /= Float::with_val(prec, n as f64 + 0.5);
                g.cos()
            };
            let mut x = guess;
            let mut dp = Float::with_val(prec, 0);
            for _ in 0..200 {
                let (p, d) = legendre_pair(n, &x, prec);
                dp = d;
                let mut step = p;
                step /= &dp;
                x -= &step;
                if step.to_f64().abs() < 1e-60 {
                    break;
                }
            }
            let weight = {
                let mut one_minus = x.clone();
                one_minus.square_mut();
                let mut w = Float::with_val(prec, 1);
                w -= &one_minus;
                let mut d2 = dp;
                d2.square_mut();
                w *= &d2;
                w.recip_mut();
                w *= 2;
                w
            };
            out.push((x, weight));
        }
        out
    }

    /// Legendre polynomial `P_n(x)` and its derivative.
    fn legendre_pair(n: usize, x: &Float, prec: u32) -> (Float, Float) {
        let mut p0 = Float::with_val(prec, 1);
        let mut p1 = x.clone();
        for j in 2..=n {
            let mut p2 = x.clone();
            p2 *= &p1;
            p2 *= Float::with_val(prec, 2 * j as u32 - 1);
            let mut sub = p0.clone();
            sub *= Float::with_val(prec, j as u32 - 1);
            p2 -= &sub;
            p2 /= Float::with_val(prec, j as u32);
            p0 = p1;
            p1 = p2;
        }
        // P'_n(x) = n (x P_n − P_{n−1}) / (x² − 1)
        let mut num = x.clone();
        num *= &p1;
        num -= &p0;
        num *= Float::with_val(prec, n as u32);
        let mut den = x.clone();
        den.square_mut();
        den -= 1;
        num /= &den;
        (p1, num)
    }

    #[test]
    fn quadrature_matches_gauss_legendre_integration() {
        let ctx = ctx_digits(30);
        let f = delta_form();
        let tau = c(&ctx, "0", "2");
        for ell in [0usize, 1] {
            let termwise = eichler_quadrature(&f, ell, &tau, &ctx).unwrap();
            let oracle = vertical_integral_oracle(&f, ell, &tau, 30, 30, &ctx);
            assert_close(&termwise, &oracle, 1e-20, &format!("GL oracle, Δ, ℓ={ell}"));
        }
        let f = eta3p8_form();
        let tau0 = cm_tau0(&ctx);
        let termwise = eichler_quadrature(&f, 1, &tau0, &ctx).unwrap();
        let oracle = vertical_integral_oracle(&f, 1, &tau0, 30, 30, &ctx);
        assert_close(&termwise, &oracle, 1e-20, "GL oracle, weight-4 form, ℓ=1");
    }

    #[test]
    fn eichler_derivative_recovers_integrand() {
        // d/dτ E_{f,ℓ} = −f(τ) τᵉ, checked by Richardson-extrapolated central
        // differences.
        let ctx = ctx_digits(60);
        let cases: [(CuspForm, usize, BigComplex); 3] = [
            (delta_form(), 0, c(&ctx, "0", "2")),
            (delta_form(), 3, c(&ctx, "0", "2")),
            (eta3p8_form(), 2, cm_tau0(&ctx)),
        ];
        for (f, ell, tau) in &cases {
            let h = ctx.pow10_real(-12);
            let diff = |step: &Float| -> BigComplex {
                let hp = ctx.complex_from_parts(step.clone(), Float::with_val(ctx.prec_bits(), 0));
                let plus = {
                    let mut t = tau.clone();
                    t += &hp;
                    t
                };
                let minus = {
                    let mut t = tau.clone();
                    t -= &hp;
                    t
                };
                let num = eichler_series(f, *ell, &plus, &ctx).unwrap()
                    - eichler_series(f, *ell, &minus, &ctx).unwrap();
                let mut inv = step.clone();
                inv *= 2;
                inv.recip_mut();
                num.mul_real(&inv)
            };
            let d1 = diff(&h);
            let mut h2 = h.clone();
            h2 /= 2;
            let d2 = diff(&h2);
            // Richardson: (4 D(h/2) − D(h)) / 3
            let mut refined = d2 * 4i64;
            refined -= &d1;
            let third = Float::with_val(ctx.prec_bits(), 3).recip();
            let refined = refined.mul_real(&third);
            let expected = -(f.eval(tau, &ctx).unwrap() * tau.powi(*ell as i32));
            assert_close(
                &refined,
                &expected,
                1e-25,
                &format!("FTC check, weight {} ℓ={ell}", f.weight()),
            );
        }
    }

    #[test]
    fn eichler_vector_applies_contravariant_frame() {
        let ctx = ctx_digits(45);
        let f = delta_form();
        let tau = c(&ctx, "0.3", "1.1");
        let standard = eichler_vector(&f, &tau, &SL2Z::identity(), &ctx).unwrap();
        assert_eq!(*standard.basis_tag(), SL2Z::identity());
        assert_eq!(standard.weight(), 12);
        let s = SL2Z::s();
        let framed = eichler_vector(&f, &tau, &s, &ctx).unwrap();
        assert_eq!(*framed.basis_tag(), s.inverse());
        // Undo the frame: N(S) N(S⁻¹) E = E.
        let undone = n_matrix(&s, 12)
            .unwrap()
            .matvec(framed.components(), &ctx);
        for (ell, (u, e)) in undone.iter().zip(standard.components()).enumerate() {
            assert_close(u, e, 1e-38, &format!("frame round-trip ℓ={ell}"));
        }
    }

    #[test]
    fn eichler_vector_vanishes_at_infinity() {
        let ctx = ctx_digits(60);
        let f = delta_form();
        let tau = c(&ctx, "0.3", "40");
        let e = eichler_vector(&f, &tau, &SL2Z::identity(), &ctx).unwrap();
        // |E_ℓ| ≈ e^{-80π} |τ|^ℓ / 2π, so the bound loosens with ℓ.
        for (ell, v) in e.components().iter().enumerate() {
            assert!(
                v.abs().to_f64() < 1e-92,
                "E_{{Δ,{ell}}}(0.3+40i) should be ≲ e^{{-80π}}·|τ|^{ell}, got {:.3e}",
                v.abs().to_f64()
            );
        }
        assert!(e.components()[0].abs().to_f64() < 1e-108);
    }

    #[test]
    fn period_symbol_of_parabolic_and_minus_identity_vanishes() {
        let ctx = ctx_digits(30);
        for f in [delta_form(), eta3p8_form()] {
            for gamma in [SL2Z::t(), SL2Z::neg_identity()] {
                let p = period_polynomial(&f, &gamma, &ctx).unwrap();
                for v in &p.entries {
                    assert!(v.re().is_zero() && v.im().is_zero());
                }
            }
        }
    }

    #[test]
    fn period_symbols_match_reference_and_rational_ratios() {
        let ctx = ctx_digits(60);
        let f = delta_form();
        let p = period_polynomial(&f, &SL2Z::s(), &ctx).unwrap();
        for (ell, (re, im)) in DELTA_P_S.iter().enumerate() {
            assert_close(
                &p.entries[ell],
                &c(&ctx, re, im),
                1e-22,
                &format!("P_{ell}(S)"),
            );
        }
        // The even components are rational multiples of P₀, the odd ones of P₁.
        let ratios: [(usize, i64, i64, usize); 6] = [
            (2, -691, 1620, 0),
            (3, -25, 48, 1),
            (4, 691, 2520, 0),
            (5, 5, 12, 1),
            (9, 1, 1, 1),
            (10, -1, 1, 0),
        ];
        for (ell, num, den, base) in ratios {
            let ratio = p.entries[ell].checked_div(&p.entries[base]).unwrap();
            let expected = {
                let mut r = ctx.complex_from_i64(num, 0);
                let inv_den = Float::with_val(ctx.prec_bits(), den).recip();
                r = r.mul_real(&inv_den);
                r
            };
            assert_close(
                &ratio,
                &expected,
                1e-28,
                &format!("P_{ell}(S)/P_{base}(S) = {num}/{den}"),
            );
        }
        // The literal cusp-to-cusp integral flips odd-index signs and reverses
        // the order: ∫_{S⁻¹∞}^∞ f tᵉ dt = (−1)ᵉ P_{10−ᵉ}(S).
        let int0 = period_integral(&f, &SL2Z::s(), 10, &ctx).unwrap();
        assert_close(&int0, &p.entries[10], 1e-40, "ℓ=10 component accessor");
    }

    #[test]
    fn period_polynomial_components_match_printed_tables() {
        let ctx = PrecisionContext::default_budget();
        let f = eta3p8_form();
        let table: [(SL2Z, &[(&str, &str); 3]); 4] = [
            (sigma1(), &CM_P_SIGMA1),
            (sigma2(), &CM_P_SIGMA2),
            (sigma1().inverse(), &CM_P_SIGMA1_INV),
            (sigma2().inverse(), &CM_P_SIGMA2_INV),
        ];
        for (gamma, rows) in &table {
            let p = period_polynomial(&f, gamma, &ctx).unwrap();
            for (ell, (re, im)) in rows.iter().enumerate() {
                assert_close(
                    &p.entries[ell],
                    &c(&ctx, re, im),
                    1e-26,
                    &format!("P_{ell}({gamma})"),
                );
            }
        }
    }

    /// Raw defect vector `E(γτ) − N(γ)E(τ)` in the standard frame, computed
    /// through the public evaluation API.
    fn raw_defect(
        f: &CuspForm,
        gamma: &SL2Z,
        tau: &BigComplex,
        ctx: &PrecisionContext,
    ) -> Vec<BigComplex> {
        let e_tau = eichler_vector(f, tau, &SL2Z::identity(), ctx).unwrap();
        let gamma_tau = gamma.apply(tau, ctx);
        let e_gamma_tau = eichler_vector(f, &gamma_tau, &SL2Z::identity(), ctx).unwrap();
        let twisted = n_matrix(gamma, f.weight())
            .unwrap()
            .matvec(e_tau.components(), ctx);
        e_gamma_tau
            .components()
            .iter()
            .zip(twisted.iter())
            .map(|(a, b)| a - b)
            .collect()
    }

    #[test]
    fn period_cocycle_and_symbol_defect_identity() {
        let ctx = ctx_digits(80);
        let f = eta3p8_form();
        let tau = c(&ctx, "0.3", "0.7");
        // λ(γ) = −N(γ) P(γ), independent of τ.
        for gamma in [sigma1(), sigma2()] {
            let lambda = raw_defect(&f, &gamma, &tau, &ctx);
            let p = period_polynomial(&f, &gamma, &ctx).unwrap();
            let expected: Vec<BigComplex> = n_matrix(&gamma, 4)
                .unwrap()
                .matvec(&p.entries, &ctx)
                .into_iter()
                .map(|v| -v)
                .collect();
            for (ell, (l, e)) in lambda.iter().zip(expected.iter()).enumerate() {
                assert_close(l, e, 1e-55, &format!("λ = −N(γ)P(γ), ℓ={ell}"));
            }
        }
        // Cocycle relation λ(γ₁γ₂) = λ(γ₁) + N(γ₁) λ(γ₂).
        let g1 = sigma1();
        let g2 = sigma2();
        let product = g1.mul(&g2);
        let lhs = raw_defect(&f, &product, &tau, &ctx);
        let l1 = raw_defect(&f, &g1, &tau, &ctx);
        let l2 = raw_defect(&f, &g2, &tau, &ctx);
        let n1l2 = n_matrix(&g1, 4).unwrap().matvec(&l2, &ctx);
        for ell in 0..3 {
            let mut rhs = l1[ell].clone();
            rhs += &n1l2[ell];
            assert_close(&lhs[ell], &rhs, 1e-55, &format!("cocycle ℓ={ell}"));
        }
        // Same identity for the level-1 form under S.
        let f = delta_form();
        let tau = c(&ctx, "0.2", "1.3");
        let s = SL2Z::s();
        let lambda = raw_defect(&f, &s, &tau, &ctx);
        let p = period_polynomial(&f, &s, &ctx).unwrap();
        let expected: Vec<BigComplex> = n_matrix(&s, 12)
            .unwrap()
            .matvec(&p.entries, &ctx)
            .into_iter()
            .map(|v| -v)
            .collect();
        for (ell, (l, e)) in lambda.iter().zip(expected.iter()).enumerate() {
            assert_close(l, e, 1e-50, &format!("λ(S) = −N(S)P(S), ℓ={ell}"));
        }
    }

    #[test]
    fn recover_lattice_handles_simple_and_refined_spans() {
        let ctx = ctx_digits(40);
        // Trivial span: {1, i, 3+2i} → 1ℤ ⊕ iℤ.
        let values = [c(&ctx, "1", "0"), c(&ctx, "0", "1"), c(&ctx, "3", "2")];
        let lat = recover_lattice(&values, &ctx).unwrap();
        assert_close(lat.omega1(), &c(&ctx, "1", "0"), 1e-30, "trivial ω₁");
        assert_close(lat.omega2(), &c(&ctx, "0", "1"), 1e-30, "trivial ω₂");
        // Rational refinement: {1, i, 0.5 + 0.25i} generates the index-4
        // refinement of ℤ ⊕ iℤ with volume 1/4.  The point 0.5 alone is not
        // in that group, so refinement must not overshoot to (1/2)ℤ ⊕ (i/4)ℤ.
        let values = [c(&ctx, "1", "0"), c(&ctx, "0", "1"), c(&ctx, "0.5", "0.25")];
        let lat = recover_lattice(&values, &ctx).unwrap();
        assert!(
            (lat.basis().volume().to_f64() - 0.25).abs() < 1e-30,
            "refined volume, got {}",
            lat.basis().volume().to_f64()
        );
        assert!(lat.residual().to_f64() < 1e-30);
        for v in &values {
            lat.integer_coordinates(v).expect("input value is a lattice point");
        }
        assert!(lat.integer_coordinates(&c(&ctx, "0.5", "0")).is_err());
    }

    #[test]
    fn recover_lattice_is_idempotent_over_integer_combinations() {
        let ctx = ctx_digits(40);
        let w1 = c(&ctx, W1_DELTA, "0");
        let w2 = c(&ctx, "0", W2_DELTA);
        let reference = recover_lattice(&[w1.clone(), w2.clone()], &ctx).unwrap();
        // Twenty pseudo-random integer combinations, deterministic seed.
        let mut state = 0x2545F491u64;
        let mut rand_small = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 11) as i64 - 5
        };
        for trial in 0..20 {
            let mut values = vec![w1.clone(), w2.clone()];
            for _ in 0..3 {
                let a = rand_small();
                let b = rand_small();
                let mut v = &w1 * a;
                v += &(&w2 * b);
                values.push(v);
            }
            let lat = recover_lattice(&values, &ctx).unwrap();
            assert_close(
                lat.omega1(),
                reference.omega1(),
                1e-35,
                &format!("idempotent ω₁, trial {trial}"),
            );
            assert_close(
                lat.omega2(),
                reference.omega2(),
                1e-35,
                &format!("idempotent ω₂, trial {trial}"),
            );
        }
    }

    #[test]
    fn recover_lattice_rejects_degenerate_inputs() {
        let ctx = ctx_digits(40);
        // Collinear values have no rank-2 span.
        let values = [c(&ctx, "1", "0"), c(&ctx, "2", "0"), c(&ctx, "-3", "0")];
        match recover_lattice(&values, &ctx) {
            Err(Error::LatticeRecovery(msg)) => assert!(msg.contains("collinear")),
            other => panic!("expected collinear failure, got {other:?}"),
        }
        // A coordinate needing a denominator beyond the bound cannot be
        // captured by refinement.
        let values = [c(&ctx, "1", "0"), c(&ctx, "0", "1"), c(&ctx, "1e-5", "1e-5")];
        assert!(matches!(
            recover_lattice(&values, &ctx),
            Err(Error::LatticeRecovery(_))
        ));
        // Too few usable generators after dropping negligible ones.
        let values = [c(&ctx, "1", "0"), c(&ctx, "1e-30", "0")];
        assert!(matches!(
            recover_lattice(&values, &ctx),
            Err(Error::LatticeRecovery(_))
        ));
    }

    #[test]
    fn lattice_of_level_one_form_matches_reference() {
        let ctx = PrecisionContext::default_budget();
        let f = delta_form();
        let lat = period_lattice_for_form(&f, false, &ctx).unwrap();
        assert_close(
            lat.omega1(),
            &c(&ctx, W1_DELTA, "0"),
            1e-28,
            "ω₁ of the weight-12 lattice",
        );
        assert_close(
            lat.omega2(),
            &c(&ctx, "0", W2_DELTA),
            1e-28,
            "ω₂ of the weight-12 lattice",
        );
        assert!(lat.residual().to_f64() < 1e-50);
        assert!(lat.omega1().im().is_zero() || lat.omega1().im().to_f64().abs() < 1e-40);
        // Generator labels carry provenance, and each stored symbol resolves
        // to exact integer coordinates.
        assert!(lat.generators().iter().any(|g| g.label == "(0,-1;1,0)[3]"));
        for g in lat.generators() {
            if g.value.abs().to_f64() < 1e-60 {
                continue;
            }
            lat.integer_coordinates(&g.value)
                .unwrap_or_else(|e| panic!("generator {} should be integral: {e}", g.label));
        }
    }

    #[test]
    fn lattice_of_cm_form_spans_and_their_refinements() {
        let ctx = PrecisionContext::default_budget();
        let f = eta3p8_form();
        let w1 = ctx.real(W1_CM).unwrap();
        let w2 = ctx.real(W2_CM).unwrap();

        // Group symbols alone span the index-2 sublattice generated by
        // ω₁ ± ω₂ and 2ω₂ — not ω₁ℤ ⊕ ω₂ℤ itself.  (ω₁+ω₂ and ω₁−ω₂ have
        // equal norm, so the reduced long generator is pinned only up to that
        // choice; the assertions below are invariant under it.)
        let lat = period_lattice_for_form(&f, false, &ctx).unwrap();
        let expected_volume = {
            let mut v = w1.clone();
            v *= &w2;
            v *= 2;
            v
        };
        let mut vol_err = lat.basis().volume().clone();
        vol_err -= &expected_volume;
        assert!(
            vol_err.to_f64().abs() < 1e-28,
            "group-span volume 2ω₁ω₂, got {}",
            lat.basis().volume().to_f64()
        );
        let double_im = {
            let mut t = w2.clone();
            t *= 2;
            ctx.complex_from_parts(Float::with_val(ctx.prec_bits(), 0), t)
        };
        assert_close(lat.omega2(), &double_im, 1e-25, "group-span short vector 2ω₂");
        assert!(lat.residual().to_f64() < 1e-40);
        // The real and |imaginary| parts of the long generator are exactly
        // the conventional basis pair…
        let mut re_err = lat.omega1().re().clone();
        re_err -= &w1;
        assert!(re_err.to_f64().abs() < 1e-28, "Re of the long generator is ω₁");
        let mut im_err = lat.omega1().im().clone().abs();
        im_err -= &w2;
        assert!(im_err.to_f64().abs() < 1e-28, "|Im| of the long generator is ω₂");
        // …and the composed point ω₁ + iω₂ is in the span, but the point ω₁
        // itself is NOT: one of its coordinates sits at a half-integer.
        let long_gen = ctx.complex_from_parts(w1.clone(), w2.clone());
        lat.integer_coordinates(&long_gen)
            .expect("ω₁ + iω₂ lies in the group span");
        let omega1_point = ctx.complex_from_parts(w1.clone(), Float::with_val(ctx.prec_bits(), 0));
        assert!(lat.integer_coordinates(&omega1_point).is_err());
        let (a, b) = lat.coordinates(&omega1_point);
        let frac = |x: &Float| {
            let (_, f) = round_and_frac(x);
            f
        };
        assert!(
            frac(&a).max(frac(&b)) > 0.4,
            "ω₁ should sit at a half-integer coordinate, got ({}, {})",
            a.to_f64(),
            b.to_f64()
        );

        // Adding the Fricke symbols refines the span strictly below the
        // conventional lattice, to (ω₁/3)ℤ ⊕ (ω₂/3)ℤ.
        let lat_fricke = period_lattice_for_form(&f, true, &ctx).unwrap();
        let third1 = {
            let mut t = w1.clone();
            t /= 3;
            ctx.complex_from_parts(t, Float::with_val(ctx.prec_bits(), 0))
        };
        let third2 = {
            let mut t = w2.clone();
            t /= 3;
            ctx.complex_from_parts(Float::with_val(ctx.prec_bits(), 0), t)
        };
        assert_close(lat_fricke.omega1(), &third1, 1e-25, "Fricke-span ω₁/3");
        assert_close(lat_fricke.omega2(), &third2, 1e-25, "Fricke-span ω₂/3");
        let coords = lat_fricke.integer_coordinates(&omega1_point).unwrap();
        assert_eq!(coords, (Integer::from(3), Integer::from(0)));
    }

    #[test]
    fn lattice_of_weight_two_form_uses_fricke_refinement() {
        let ctx = PrecisionContext::default_budget();
        let f = x011_form();
        let lat = period_lattice_for_form(&f, true, &ctx).unwrap();
        // ω₁ ± ω₂ tie in norm, so pin the invariant parts: the short vector,
        // the volume, and the real/|imaginary| split of the long generator.
        let w1 = c(
            &ctx,
            "0.232177875650357485568719768478",
            "-0.0202000934594316396072095992687",
        );
        let w2 = c(&ctx, "0", "0.0404001869188632792144191985373");
        assert_close(lat.omega2(), &w2, 1e-26, "weight-2 short vector");
        let mut re_err = lat.omega1().re().clone();
        re_err -= w1.re();
        assert!(re_err.to_f64().abs() < 1e-27, "Re of the weight-2 long generator");
        let mut im_err = lat.omega1().im().clone().abs();
        im_err -= &w1.im().clone().abs();
        assert!(im_err.to_f64().abs() < 1e-27, "|Im| of the weight-2 long generator");
        let mut vol_err = lat.basis().volume().clone();
        vol_err -= &ctx.real("0.009380029574699037564593725").unwrap();
        assert!(vol_err.to_f64().abs() < 1e-26, "weight-2 lattice volume");
        assert!(lat.residual().to_f64() < 1e-45);

        // Frozen coordinates of each probe symbol over the reference pair
        // (ω₁, ω₂), resolved through an explicit-basis lattice so the asserts
        // don't depend on which reduced representative recovery returned.
        let reference = PeriodLattice::from_basis(w1, w2, &ctx).unwrap();
        let expected: [(&str, (i64, i64)); 8] = [
            ("(2,1;11,6)[0]", (0, -5)),
            ("(3,1;11,4)[0]", (1, -2)),
            ("(4,1;11,3)[0]", (1, 3)),
            ("(5,4;11,9)[0]", (0, 5)),
            ("(7,5;11,8)[0]", (-1, 2)),
            ("(3,2;22,15)[0]", (-1, -3)),
            ("(5,3;33,20)[0]", (-1, -8)),
            ("W[0]", (0, 1)),
        ];
        for (label, (a, b)) in expected {
            let g = lat
                .generators()
                .iter()
                .find(|g| g.label == label)
                .unwrap_or_else(|| panic!("generator {label} missing"));
            let coords = reference.integer_coordinates(&g.value).unwrap();
            assert_eq!(coords, (Integer::from(a), Integer::from(b)), "{label}");
            lat.integer_coordinates(&g.value)
                .unwrap_or_else(|e| panic!("{label} should be integral over the recovered basis: {e}"));
        }

        // Without the Fricke symbol the group span has index 5.
        let lat_group = period_lattice_for_form(&f, false, &ctx).unwrap();
        let mut ratio = lat_group.basis().volume().clone();
        ratio /= lat.basis().volume();
        assert!(
            (ratio.to_f64() - 5.0).abs() < 1e-25,
            "index of the group span, got {}",
            ratio.to_f64()
        );
    }

    #[test]
    fn fricke_eigenvalues_and_symbols_match_references() {
        let ctx = ctx_digits(60);
        let one = ctx.one();
        let minus_one = -ctx.one();
        let cf = fricke_eigenvalue(&delta_form(), &ctx).unwrap();
        assert_close(&cf, &one, 1e-40, "c_f for the weight-12 form");
        let cf = fricke_eigenvalue(&eta3p8_form(), &ctx).unwrap();
        assert_close(&cf, &one, 1e-40, "c_f for the weight-4 form");
        let cf = fricke_eigenvalue(&x011_form(), &ctx).unwrap();
        assert_close(&cf, &minus_one, 1e-40, "c_f for the weight-2 form");

        let r = fricke_period_symbols(&eta3p8_form(), &ctx).unwrap();
        for (ell, (re, im)) in CM_FRICKE_R.iter().enumerate() {
            assert_close(&r[ell], &c(&ctx, re, im), 1e-26, &format!("r_{ell}"));
        }
        // r₂ = −r₀/9 exactly for this form.
        let scaled = {
            let ninth = Float::with_val(ctx.prec_bits(), 9).recip();
            -r[0].mul_real(&ninth)
        };
        assert_close(&r[2], &scaled, 1e-40, "r₂ = −r₀/9");

        let r = fricke_period_symbols(&x011_form(), &ctx).unwrap();
        assert_close(
            &r[0],
            &c(&ctx, "0", "0.0404001869188632792144191985373"),
            1e-26,
            "weight-2 r₀",
        );

        // At level 1 the Fricke involution is S itself.
        let r = fricke_period_symbols(&delta_form(), &ctx).unwrap();
        let p = period_polynomial(&delta_form(), &SL2Z::s(), &ctx).unwrap();
        for (ell, (a, b)) in r.iter().zip(p.entries.iter()).enumerate() {
            assert_close(a, b, 1e-40, &format!("level-1 Fricke = P(S), ℓ={ell}"));
        }
    }

    #[test]
    fn modularity_defect_reproduces_reference_integers() {
        let ctx = PrecisionContext::default_budget();
        // Weight 12, level 1, γ = (2,5;1,3): frozen integer pairs, the same
        // at two unrelated base points.
        let f = delta_form();
        let lat = period_lattice_for_form(&f, false, &ctx).unwrap();
        let gamma = SL2Z::new(2, 5, 1, 3).unwrap();
        let expected: [(i64, i64); 11] = [
            (0, 22680),
            (-48, 45360),
            (-192, 81046),
            (-551, 123396),
            (-1336, 136923),
            (-2860, 14030),
            (-5456, -503319),
            (-9159, -1943634),
            (-12912, -5251302),
            (-12960, -11895660),
            (0, -23814000),
        ];
        for (re, im) in [("0", "2"), ("0.2", "1.3")] {
            let tau = c(&ctx, re, im);
            let coords = modularity_defect(&f, &gamma, &tau, &lat, &ctx).unwrap();
            for (ell, ((a, b), (ea, eb))) in coords.iter().zip(expected.iter()).enumerate() {
                assert_eq!(a, ea, "defect ℓ={ell} at τ={re}+{im}i");
                assert_eq!(b, eb, "defect ℓ={ell} at τ={re}+{im}i");
            }
        }

        // Weight 4, level 9: resolved over the conventional basis pair
        // ω₁ = 0.0577504…, ω₂ = 0.0111140…i supplied explicitly.
        let f = eta3p8_form();
        let basis = PeriodLattice::from_basis(
            c(&ctx, W1_CM, "0"),
            ctx.complex_from_parts(
                Float::with_val(ctx.prec_bits(), 0),
                ctx.real(W2_CM).unwrap(),
            ),
            &ctx,
        )
        .unwrap();
        let tau = c(&ctx, "0.5", "1.32288");
        let cases: [(SL2Z, [(i64, i64); 3]); 5] = [
            (sigma1(), [(-12, 0), (-5, -3), (-2, -2)]),
            (sigma2(), [(6, -54), (5, -39), (4, -28)]),
            (sigma1().inverse(), [(-6, -54), (-1, -15), (0, -4)]),
            (sigma2().inverse(), [(12, 0), (7, 3), (4, 4)]),
            (SL2Z::t(), [(0, 0), (0, 0), (0, 0)]),
        ];
        for (gamma, rows) in &cases {
            let coords = modularity_defect(&f, gamma, &tau, &basis, &ctx).unwrap();
            for (ell, ((a, b), (ea, eb))) in coords.iter().zip(rows.iter()).enumerate() {
                assert_eq!(a, ea, "CM defect ℓ={ell} of {gamma}");
                assert_eq!(b, eb, "CM defect ℓ={ell} of {gamma}");
            }
        }

        // Weight 2, level 11: over the reference basis of the Fricke-refined
        // lattice, supplied explicitly so the pins are reduction-independent.
        let f = x011_form();
        let lat = PeriodLattice::from_basis(
            c(
                &ctx,
                "0.232177875650357485568719768478",
                "-0.0202000934594316396072095992687",
            ),
            c(&ctx, "0", "0.0404001869188632792144191985373"),
            &ctx,
        )
        .unwrap();
        let tau = c(&ctx, "0.23", "0.9");
        let cases: [(SL2Z, (i64, i64)); 4] = [
            (SL2Z::new(1, 0, 11, 1).unwrap(), (0, 0)),
            (SL2Z::new(2, 1, 11, 6).unwrap(), (0, 5)),
            (SL2Z::new(3, 1, 11, 4).unwrap(), (-1, 2)),
            (SL2Z::new(4, 1, 11, 3).unwrap(), (-1, -3)),
        ];
        for (gamma, (ea, eb)) in &cases {
            let coords = modularity_defect(&f, gamma, &tau, &lat, &ctx).unwrap();
            assert_eq!(coords.len(), 1);
            assert_eq!(&coords[0].0, ea, "weight-2 defect of {gamma}");
            assert_eq!(&coords[0].1, eb, "weight-2 defect of {gamma}");
        }
    }

    #[test]
    fn modularity_defect_is_integral_over_the_recovered_span() {
        let ctx = PrecisionContext::default_budget();
        let f = eta3p8_form();
        // Over the honestly recovered group span the defect coordinates are
        // exact integers in the recovered basis, the same at unrelated base
        // points, and reconstruct the raw defect value.
        let lat = period_lattice_for_form(&f, false, &ctx).unwrap();
        for gamma in [sigma1(), sigma2()] {
            let tau_a = c(&ctx, "0.5", "1.32288");
            let tau_b = c(&ctx, "0.3", "0.7");
            let coords_a = modularity_defect(&f, &gamma, &tau_a, &lat, &ctx).unwrap();
            let coords_b = modularity_defect(&f, &gamma, &tau_b, &lat, &ctx).unwrap();
            assert_eq!(coords_a, coords_b, "defect of {gamma} is τ-independent");
            let raw = raw_defect(&f, &gamma, &tau_a, &ctx);
            for (ell, (a, b)) in coords_a.iter().enumerate() {
                let mut rebuilt = lat.omega1().mul_int(a);
                rebuilt += &lat.omega2().mul_int(b);
                assert_close(
                    &rebuilt,
                    &raw[ell],
                    1e-30,
                    &format!("coordinate reconstruction ℓ={ell} of {gamma}"),
                );
            }
        }
        // A mismatched lattice is reported, not silently rounded.
        let wrong = PeriodLattice::from_basis(c(&ctx, "1", "0"), c(&ctx, "0", "1"), &ctx).unwrap();
        let tau = c(&ctx, "0.3", "0.7");
        assert!(matches!(
            modularity_defect(&f, &sigma1(), &tau, &wrong, &ctx),
            Err(Error::LatticeRecovery(_))
        ));
    }

    #[test]
    fn period_integral_rejects_out_of_range_component() {
        let ctx = ctx_digits(30);
        let f = delta_form();
        assert!(matches!(
            period_integral(&f, &SL2Z::s(), 11, &ctx),
            Err(Error::UnsupportedComponent(11))
        ));
        let tau = c(&ctx, "0", "2");
        assert!(matches!(
            eichler_series(&f, 11, &tau, &ctx),
            Err(Error::UnsupportedComponent(11))
        ));
    }
}
