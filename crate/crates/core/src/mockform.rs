//! Evaluation of the assembled lattice-zeta vector form.
//!
//! For a cusp form `f` of even weight `k` with period lattice `Λ`, the
//! assembled form at `τ` in a coordinate frame `M ∈ SL₂(ℤ)` is
//!
//! ```text
//! F(τ, M) = N(M) · (ζ*_Λ(z_0), …, ζ*_Λ(z_{k−2})),    z = N(M⁻¹) E_f(τ),
//! ```
//!
//! where `E_f` is the iterated antiderivative vector and `ζ*_Λ` the completed
//! lattice zeta function.  The result is expressed in the standard basis, so
//! different frames probe different argument directions of the same function.
//! [`MockFormContext`] bundles form, lattice, and precision and exposes point
//! evaluation with pole diagnostics, the frame-change identity check, a
//! finite-difference shadow measurement, `q`-expansions of the holomorphic
//! part, and a scanner for poles of the assembled form.

use crate::error::Error;
use crate::periods::{eichler_vector, period_lattice_for_form, PeriodLattice};
use crate::precision::{fmt_float, BigComplex, PrecisionContext, TauPolynomial};
use crate::qforms::{CuspForm, QExpansion};
use crate::symrep::{n_matrix, sym_power_of_point, SymVector, SL2Z};
use crate::weierstrass::{laurent_zeta_star, zeta_star};
use crate::Result;
use rug::ops::Pow;
use rug::{Float, Integer};

/// One evaluation of the assembled form: the vector `F(τ, M)` in the
/// standard basis plus pole diagnostics for the frame-basis arguments.
#[derive(Debug, Clone)]
pub struct FValue {
    /// Assembled vector in the standard basis.
    pub value: SymVector,
    /// Evaluation point.
    pub tau: BigComplex,
    /// Coordinate frame `M` the zeta arguments were formed in.
    pub frame: SL2Z,
    /// True when at least one argument fell inside the pole guard; the
    /// affected entries carry local-expansion approximations instead of the
    /// (divergent) direct value.
    pub pole_flag: bool,
    /// One report per argument inside the pole guard.
    pub poles: Vec<PoleReport>,
}

/// Pole diagnostics for a single frame-basis argument `z_ℓ`.
#[derive(Debug, Clone)]
pub struct PoleReport {
    /// Index `ℓ` of the affected argument component.
    pub component: usize,
    /// Integer coordinates of the nearest lattice point over the reduced
    /// basis.
    pub shift: (Integer, Integer),
    /// Offset from that lattice point — the local expansion variable.
    pub offset: BigComplex,
    /// Distance from the argument to the lattice.
    pub distance: Float,
}

/// Result of a finite-difference shadow measurement.
#[derive(Debug, Clone)]
pub struct ShadowCheck {
    /// `−2i · conj(∂F/∂τ̄)` measured with the four-point stencil.
    pub computed: SymVector,
    /// `−(2πi / Vol Λ) · f(τ) · (1, τ, …, τ^{k−2})`.
    pub expected: SymVector,
    /// Largest componentwise deviation relative to the largest expected
    /// component (absolute when the expected vector vanishes).
    pub deviation: Float,
}

/// A location where one argument of the assembled form approaches the
/// lattice, found by [`MockFormContext::pole_scan`].
#[derive(Debug, Clone)]
pub struct PoleScanHit {
    /// Refined location in the upper half-plane.
    pub tau: BigComplex,
    /// Frame the argument vector was formed in.
    pub frame: SL2Z,
    /// Argument component that approaches the lattice.
    pub component: usize,
    /// Distance of that component to the lattice at `tau`.
    pub distance: Float,
}

/// Evaluation context for the assembled form: a cusp form, its period
/// lattice, and the working precision.
#[derive(Debug, Clone)]
pub struct MockFormContext {
    form: CuspForm,
    lattice: PeriodLattice,
    ctx: PrecisionContext,
}

impl MockFormContext {
    /// Builds the context by recovering the period lattice from the form's
    /// group symbols (optionally refined by the Fricke involution).
    pub fn new(form: CuspForm, include_fricke: bool, ctx: &PrecisionContext) -> Result<Self> {
        let lattice = period_lattice_for_form(&form, include_fricke, ctx)?;
        Self::with_lattice(form, lattice, ctx)
    }

    /// Builds the context over an explicitly supplied lattice.  The lattice
    /// must identify the periods to within the pole-guard resolution.
    pub fn with_lattice(
        form: CuspForm,
        lattice: PeriodLattice,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let k = form.weight();
        if k < 2 || k % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "assembled form needs an even weight >= 2, got {k}"
            )));
        }
        let bound = ctx.pow10_real(-((ctx.digits() / 2) as i32));
        if *lattice.residual() > bound {
            return Err(Error::LatticeRecovery(format!(
                "lattice residual {} exceeds the working bound {}",
                fmt_float(lattice.residual(), 6),
                fmt_float(&bound, 6)
            )));
        }
        Ok(MockFormContext {
            form,
            lattice,
            ctx: ctx.clone(),
        })
    }

    /// The underlying cusp form.
    pub fn form(&self) -> &CuspForm {
        &self.form
    }

    /// The period lattice the zeta function is taken over.
    pub fn lattice(&self) -> &PeriodLattice {
        &self.lattice
    }

    /// Weight `k` of the form; the assembled vector has `k − 1` entries.
    pub fn weight(&self) -> u32 {
        self.form.weight()
    }

    /// Working precision.
    pub fn precision(&self) -> &PrecisionContext {
        &self.ctx
    }

    fn dim(&self) -> usize {
        (self.weight() - 1) as usize
    }

    /// Applies the completed zeta componentwise and recombines with `N(M)`:
    /// entry `j` is `Σ_t N(M)_{jt} ζ*_Λ(z_t)`.  With the identity frame this
    /// is the plain componentwise map; at weight 2 it is frame-independent.
    /// Errors with [`Error::PoleHit`] when an argument sits on the lattice.
    pub fn directional_zeta(&self, z: &[BigComplex], frame: &SL2Z) -> Result<Vec<BigComplex>> {
        if z.len() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "directional zeta needs {} arguments, got {}",
                self.dim(),
                z.len()
            )));
        }
        let basis = self.lattice.basis();
        let mut values = Vec::with_capacity(z.len());
        for (i, zi) in z.iter().enumerate() {
            let v = zeta_star(basis, zi, &self.ctx).map_err(|e| match e {
                Error::PoleHit { distance, .. } => Error::PoleHit {
                    component: i,
                    distance,
                },
                other => other,
            })?;
            values.push(v);
        }
        let n = n_matrix(frame, self.weight())?;
        Ok(n.matvec(&values, &self.ctx))
    }

    /// Evaluates the assembled form `F(τ, M)` in the standard basis.
    ///
    /// Arguments inside the pole guard do not abort the evaluation: the
    /// affected entries are replaced by the local expansion of `ζ*` around
    /// the nearest lattice point and reported in
    /// [`poles`](FValue::poles).
    pub fn f_value(&self, tau: &BigComplex, frame: &SL2Z) -> Result<FValue> {
        let e = eichler_vector(&self.form, tau, frame, &self.ctx)?;
        let basis = self.lattice.basis();
        let mut zeta_vals = Vec::with_capacity(self.dim());
        let mut poles = Vec::new();
        for (i, zi) in e.components().iter().enumerate() {
            match zeta_star(basis, zi, &self.ctx) {
                Ok(v) => zeta_vals.push(v),
                Err(Error::PoleHit { .. }) => {
                    let (offset, s1, s2) = basis.reduce_with_shift(zi);
                    let local = laurent_zeta_star(basis, 3, &self.ctx)?;
                    let approx = local.eval(&offset)?;
                    poles.push(PoleReport {
                        component: i,
                        shift: (s1, s2),
                        offset,
                        distance: basis.distance_to_lattice(zi),
                    });
                    zeta_vals.push(approx);
                }
                Err(other) => return Err(other),
            }
        }
        let n = n_matrix(frame, self.weight())?;
        let assembled = n.matvec(&zeta_vals, &self.ctx);
        Ok(FValue {
            value: SymVector::standard(self.weight(), assembled)?,
            tau: tau.clone(),
            frame: *frame,
            pole_flag: !poles.is_empty(),
            poles,
        })
    }

    /// Largest componentwise deviation in the frame-change identity
    /// `F(γτ, M) = N(γ) F(τ, γ⁻¹M)`, which holds exactly for `γ` in the
    /// form's group.  Errors when either evaluation lands in the pole guard.
    pub fn rho_invariance_check(
        &self,
        gamma: &SL2Z,
        tau: &BigComplex,
        frame: &SL2Z,
    ) -> Result<Float> {
        let lhs = self.f_value(&gamma.apply(tau, &self.ctx), frame)?;
        let pulled = gamma.inverse().mul(frame);
        let rhs_raw = self.f_value(tau, &pulled)?;
        if let Some(rep) = lhs.poles.first().or_else(|| rhs_raw.poles.first()) {
            return Err(Error::PoleHit {
                component: rep.component,
                distance: fmt_float(&rep.distance, 6),
            });
        }
        let n = n_matrix(gamma, self.weight())?;
        let rhs = n.matvec(&rhs_raw.value.entries, &self.ctx);
        let mut dev = Float::with_val(self.ctx.prec_bits(), 0);
        for (l, r) in lhs.value.entries.iter().zip(&rhs) {
            let d = l.dist(r);
            if d > dev {
                dev = d;
            }
        }
        Ok(dev)
    }

    /// The step the shadow stencil uses when none is supplied:
    /// `10^(−digits/6)`, balancing the `O(h²)` truncation error against
    /// cancellation in the differences.
    pub fn default_stencil_step(&self) -> Float {
        self.ctx.pow10_real(-((self.ctx.digits() / 6) as i32))
    }

    /// The target the measured shadow is compared against:
    /// `−(2πi / Vol Λ) · f(τ) · (1, τ, …, τ^{k−2})` in the standard basis.
    /// The image is frame-independent because the antiholomorphic part of
    /// `ζ*` is linear and the frame matrices are real.
    pub fn expected_shadow(&self, tau: &BigComplex) -> Result<SymVector> {
        let f_tau = self.form.eval(tau, &self.ctx)?;
        let mut inv_vol = self.lattice.basis().volume().clone();
        inv_vol.recip_mut();
        inv_vol = -inv_vol;
        let coeff = (&f_tau * &self.ctx.two_pi_i()).mul_real(&inv_vol);
        let powers = sym_power_of_point(tau, self.weight(), &self.ctx)?;
        let entries = powers.entries.iter().map(|p| &coeff * p).collect();
        SymVector::standard(self.weight(), entries)
    }

    /// Measures `ξ₀ F = −2i · conj(∂F/∂τ̄)` with the four-point stencil
    ///
    /// ```text
    /// ∂F/∂τ̄ ≈ [ (F(τ+h) − F(τ−h)) + i (F(τ+ih) − F(τ−ih)) ] / (4h)
    /// ```
    ///
    /// and compares it against [`expected_shadow`](Self::expected_shadow).
    /// The truncation error is `O(h²)`, so halving `h` quarters the
    /// deviation.  Errors when any stencil point lands in the pole guard.
    pub fn shadow_check(
        &self,
        tau: &BigComplex,
        frame: &SL2Z,
        step: Option<&Float>,
    ) -> Result<ShadowCheck> {
        let h = match step {
            Some(h) => {
                if !(h.clone() > 0) {
                    return Err(Error::InvalidInput(
                        "stencil step must be positive".into(),
                    ));
                }
                h.clone()
            }
            None => self.default_stencil_step(),
        };
        let hc = self.ctx.complex_from_real(h.clone());
        let hic = hc.mul_i(false);
        let fe = self.f_value(&(tau + &hc), frame)?;
        let fw = self.f_value(&(tau - &hc), frame)?;
        let fn_ = self.f_value(&(tau + &hic), frame)?;
        let fs = self.f_value(&(tau - &hic), frame)?;
        for fv in [&fe, &fw, &fn_, &fs] {
            if let Some(rep) = fv.poles.first() {
                return Err(Error::PoleHit {
                    component: rep.component,
                    distance: fmt_float(&rep.distance, 6),
                });
            }
        }
        let mut inv_4h = Float::with_val(self.ctx.prec_bits(), &h * 4u32);
        inv_4h.recip_mut();
        let mut computed = Vec::with_capacity(self.dim());
        for j in 0..self.dim() {
            let horiz = &fe.value.entries[j] - &fw.value.entries[j];
            let vert = (&fn_.value.entries[j] - &fs.value.entries[j]).mul_i(false);
            let dbar = (&horiz + &vert).mul_real(&inv_4h);
            computed.push(dbar.conj().mul_i(true).mul_real(&Float::with_val(
                self.ctx.prec_bits(),
                2,
            )));
        }
        let expected = self.expected_shadow(tau)?;
        let mut dev = Float::with_val(self.ctx.prec_bits(), 0);
        let mut scale = Float::with_val(self.ctx.prec_bits(), 0);
        for (c, e) in computed.iter().zip(&expected.entries) {
            let d = c.dist(e);
            if d > dev {
                dev = d;
            }
            let m = e.abs();
            if m > scale {
                scale = m;
            }
        }
        if !scale.is_zero() {
            dev /= &scale;
        }
        Ok(ShadowCheck {
            computed: SymVector::standard(self.weight(), computed)?,
            expected,
            deviation: dev,
        })
    }

    /// `q`-expansion of the holomorphic part of the first assembled
    /// component, normalized so the value is `prefactor · Σ c_n q^n` with
    /// `prefactor = −2πi`.  Writing `w = Σ_{n≥1} (a_n/n) q^n`, the bracket is
    ///
    /// ```text
    /// 1/w − Σ_{odd p} (−1)^((p−1)/2) c_p (2π)^(−p−1) w^p,
    /// ```
    ///
    /// where `c_p` are the odd Laurent coefficients of `ζ*` (the linear one
    /// for `p = 1`); the rescaling absorbs `z = (i/2π) w`.  Coefficients run
    /// from `q^(−1)` through `q^(n_terms)`.  Only component 0 is 1-periodic;
    /// other components are rejected.
    pub fn holomorphic_part_q(&self, component: usize, n_terms: usize) -> Result<QExpansion> {
        if component != 0 {
            return Err(Error::UnsupportedComponent(component));
        }
        let bracket = self.holomorphic_bracket(true, n_terms)?;
        Ok(QExpansion {
            prefactor: -&self.ctx.two_pi_i(),
            n_min: -1,
            coeffs: bracket.into_iter().map(TauPolynomial::constant).collect(),
        })
    }

    /// Display-convention variant of [`holomorphic_part_q`](Self::holomorphic_part_q):
    /// the plain coefficient series `w = Σ a_n q^n` is substituted literally
    /// for the expansion variable of the `ζ*` Laurent series (no `1/n`
    /// division, no `2π` rescaling) and the prefactor is `π`.  This is a
    /// bookkeeping convention for readable tables, not the analytic
    /// expansion; the two variants differ beyond an overall constant.
    pub fn holomorphic_part_display(
        &self,
        component: usize,
        n_terms: usize,
    ) -> Result<QExpansion> {
        if component != 0 {
            return Err(Error::UnsupportedComponent(component));
        }
        let bracket = self.holomorphic_bracket(false, n_terms)?;
        Ok(QExpansion {
            prefactor: self.ctx.complex_from_real(self.ctx.pi()),
            n_min: -1,
            coeffs: bracket.into_iter().map(TauPolynomial::constant).collect(),
        })
    }

    /// Shared series engine for the two `q`-expansion conventions.  Returns
    /// the bracket coefficients of `q^(−1) ..= q^(n_terms)`.
    fn holomorphic_bracket(
        &self,
        true_convention: bool,
        n_terms: usize,
    ) -> Result<Vec<BigComplex>> {
        if n_terms < 1 {
            return Err(Error::InvalidInput(
                "q-expansion needs n_terms >= 1".into(),
            ));
        }
        let prec = self.ctx.prec_bits();
        let len = n_terms + 2;
        let coeffs = self.form.coefficients_up_to(len - 1)?;
        let mut w = vec![self.ctx.zero(); len];
        for (m, slot) in w.iter_mut().enumerate().skip(1) {
            let a = &coeffs[m - 1];
            if *a == 0 {
                continue;
            }
            let mut c = Float::with_val(prec, a);
            if true_convention {
                c /= &Float::with_val(prec, m as u64);
            }
            *slot = self.ctx.complex_from_real(c);
        }
        if w[1].is_zero() {
            return Err(Error::InvalidInput(
                "q-expansion inversion needs a_1 != 0".into(),
            ));
        }
        let unit: Vec<BigComplex> = (0..len - 1).map(|j| w[j + 1].clone()).collect();
        let inv_unit = invert_unit_series(&unit, len - 1, &self.ctx)?;
        let mut out = vec![self.ctx.zero(); n_terms + 2];
        for (slot, v) in out.iter_mut().zip(&inv_unit) {
            *slot = v.clone();
        }
        let p_max = if n_terms >= 3 {
            n_terms - (1 - n_terms % 2)
        } else {
            1
        };
        let local = laurent_zeta_star(self.lattice.basis(), p_max.max(3) as u32, &self.ctx)?;
        let two_pi = {
            let mut t = self.ctx.pi();
            t *= 2;
            t
        };
        let w2 = series_mul(&w, &w, len, &self.ctx);
        let mut wp = w.clone();
        let mut p = 1usize;
        loop {
            let coeff = if p == 1 {
                local.linear_z().clone()
            } else {
                match local.odd_coeffs().get(&(p as u32)) {
                    Some(c) => c.clone(),
                    None => {
                        return Err(Error::InvalidInput(format!(
                            "zeta expansion lacks the order-{p} coefficient"
                        )))
                    }
                }
            };
            let x = if true_convention {
                let mut s = two_pi.clone().pow(p as i32 + 1);
                s.recip_mut();
                let rescaled = coeff.mul_real(&s);
                if ((p - 1) / 2) % 2 == 0 {
                    -&rescaled
                } else {
                    rescaled
                }
            } else {
                coeff
            };
            for m in p..=n_terms {
                if wp[m].is_zero() {
                    continue;
                }
                out[m + 1] += &(&x * &wp[m]);
            }
            if p + 2 > p_max {
                break;
            }
            wp = series_mul(&wp, &w2, len, &self.ctx);
            p += 2;
        }
        Ok(out)
    }

    /// Argument vector the zeta map receives in `frame` at `tau`.
    fn frame_components(&self, tau: &BigComplex, frame: &SL2Z) -> Result<Vec<BigComplex>> {
        Ok(eichler_vector(&self.form, tau, frame, &self.ctx)?
            .components()
            .to_vec())
    }

    /// Scans the axis-aligned rectangle spanned by `lower_left` and
    /// `upper_right` on a `grid × grid` mesh, in every supplied frame, for
    /// argument components within `eps` of the lattice.  Each flagged mesh
    /// point is refined by twenty shrinking-neighborhood steps (clamped to
    /// the rectangle), so the reported distance is a local minimum of the
    /// distance function.  Hits are sorted by (Im τ, Re τ, frame order,
    /// component); adjacent mesh points converging to the same pole are
    /// reported separately.
    pub fn pole_scan(
        &self,
        lower_left: &BigComplex,
        upper_right: &BigComplex,
        grid: usize,
        frames: &[SL2Z],
        eps: &Float,
    ) -> Result<Vec<PoleScanHit>> {
        if grid < 2 {
            return Err(Error::InvalidInput("pole scan needs grid >= 2".into()));
        }
        if frames.is_empty() {
            return Err(Error::InvalidInput(
                "pole scan needs at least one frame".into(),
            ));
        }
        if !(eps.clone() > 0) {
            return Err(Error::InvalidInput("pole scan needs eps > 0".into()));
        }
        let prec = self.ctx.prec_bits();
        let (re_lo, im_lo) = (lower_left.re().clone(), lower_left.im().clone());
        let (re_hi, im_hi) = (upper_right.re().clone(), upper_right.im().clone());
        if !(im_lo.clone() > 0) || !(re_hi.clone() > re_lo.clone()) || !(im_hi.clone() > im_lo.clone())
        {
            return Err(Error::InvalidInput(
                "pole scan region must be a rectangle in the upper half-plane".into(),
            ));
        }
        let steps = (grid - 1) as u32;
        let mut dx = Float::with_val(prec, &re_hi - &re_lo);
        dx /= steps;
        let mut dy = Float::with_val(prec, &im_hi - &im_lo);
        dy /= steps;
        let basis = self.lattice.basis();
        let mut keyed: Vec<(usize, PoleScanHit)> = Vec::new();
        for (fi, frame) in frames.iter().enumerate() {
            for b in 0..grid {
                let mut im = dy.clone();
                im *= b as u64;
                im += &im_lo;
                for a in 0..grid {
                    let mut re = dx.clone();
                    re *= a as u64;
                    re += &re_lo;
                    let tau = self.ctx.complex_from_parts(re, im.clone());
                    let components = self.frame_components(&tau, frame)?;
                    for (ci, z) in components.iter().enumerate() {
                        let d = basis.distance_to_lattice(z);
                        if d < *eps {
                            let (hit_tau, hit_dist) = self.refine_pole(
                                &tau,
                                frame,
                                ci,
                                &dx,
                                &dy,
                                (&re_lo, &re_hi, &im_lo, &im_hi),
                            )?;
                            keyed.push((
                                fi,
                                PoleScanHit {
                                    tau: hit_tau,
                                    frame: *frame,
                                    component: ci,
                                    distance: hit_dist,
                                },
                            ));
                        }
                    }
                }
            }
        }
        keyed.sort_by(|(fa, a), (fb, b)| {
            a.tau
                .im()
                .partial_cmp(b.tau.im())
                .unwrap()
                .then_with(|| a.tau.re().partial_cmp(b.tau.re()).unwrap())
                .then_with(|| fa.cmp(fb))
                .then_with(|| a.component.cmp(&b.component))
        });
        Ok(keyed.into_iter().map(|(_, h)| h).collect())
    }

    /// Local minimization of the component distance around a flagged mesh
    /// point: twenty rounds over the eight compass neighbors with the
    /// neighborhood halved each round.
    fn refine_pole(
        &self,
        start: &BigComplex,
        frame: &SL2Z,
        component: usize,
        cell_w: &Float,
        cell_h: &Float,
        bounds: (&Float, &Float, &Float, &Float),
    ) -> Result<(BigComplex, Float)> {
        let basis = self.lattice.basis();
        let (re_lo, re_hi, im_lo, im_hi) = bounds;
        let mut cur = start.clone();
        let mut best = basis.distance_to_lattice(&self.frame_components(&cur, frame)?[component]);
        let mut sw = cell_w.clone();
        sw /= 2u32;
        let mut sh = cell_h.clone();
        sh /= 2u32;
        for _ in 0..20 {
            let mut improved: Option<BigComplex> = None;
            for (ex, ey) in [
                (-1i32, -1i32),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1),
            ] {
                let mut re = sw.clone();
                re *= ex;
                re += cur.re();
                let mut im = sh.clone();
                im *= ey;
                im += cur.im();
                let cand = self.ctx.complex_from_parts(
                    clamp(re, re_lo, re_hi),
                    clamp(im, im_lo, im_hi),
                );
                let d = basis
                    .distance_to_lattice(&self.frame_components(&cand, frame)?[component]);
                if d < best {
                    best = d;
                    improved = Some(cand);
                }
            }
            if let Some(next) = improved {
                cur = next;
            }
            sw /= 2u32;
            sh /= 2u32;
        }
        Ok((cur, best))
    }
}

fn clamp(v: Float, lo: &Float, hi: &Float) -> Float {
    if v < *lo {
        lo.clone()
    } else if v > *hi {
        hi.clone()
    } else {
        v
    }
}

/// Truncated product of two `q`-series given by absolute-power coefficient
/// tables.
fn series_mul(
    a: &[BigComplex],
    b: &[BigComplex],
    len: usize,
    ctx: &PrecisionContext,
) -> Vec<BigComplex> {
    let mut out = vec![ctx.zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if bj.is_zero() {
                continue;
            }
            out[i + j] += &(ai * bj);
        }
    }
    out
}

/// Reciprocal of a power series with invertible constant term, truncated to
/// `len` coefficients.
fn invert_unit_series(
    u: &[BigComplex],
    len: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<BigComplex>> {
    let lead_inv = u[0].checked_recip()?;
    let mut inv = Vec::with_capacity(len);
    inv.push(lead_inv.clone());
    for n in 1..len {
        let mut acc = ctx.zero();
        for j in 1..=n.min(u.len() - 1) {
            if u[j].is_zero() || inv[n - j].is_zero() {
                continue;
            }
            acc += &(&u[j] * &inv[n - j]);
        }
        inv.push((-&acc) * &lead_inv);
    }
    Ok(inv)
}
