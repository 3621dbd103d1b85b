//! Machine-readable result records with a stable, versioned JSON layout.
//!
//! Every record carries `"schema": 1` and a `"kind"` discriminator, and is a
//! plain struct whose serialization order is its declaration order, so that
//! identical inputs produce bit-identical JSON.  Complex numbers appear as
//! two-element arrays `[re, im]` of decimal strings rendered at the full
//! requested precision; arbitrary-size integers are decimal strings too, so
//! no numeric field ever passes through a binary float.
//!
//! Record kinds and their payloads:
//!
//! * `"periods"` — recovered or supplied lattice basis: `omega1`, `omega2`,
//!   recovery `residual`, cell `volume`, Gauss-reduced `tau_reduced`, and the
//!   number of generator values the recovery consumed.
//! * `"eichler"` — the integral vector at `tau` in a frame: `components`.
//! * `"value"` — an assembled vector value: `entries`, plus `pole_flag` and a
//!   `poles` list (component, lattice `shift`, local `offset`, `distance`)
//!   when the evaluation point sits on a polar divisor.
//! * `"shadow"` — stencil-differentiated image vs the analytic target:
//!   `computed`, `expected`, scalar `deviation`, stencil `step`.
//! * `"invariance"` — the frame-change identity residual for one `gamma`.
//! * `"pole_scan"` — rectangle, grid and threshold echoed back with the
//!   refined `hits`.
//! * `"q_expansion"` — prefactor, starting exponent and per-power
//!   coefficient lists of a component's holomorphic part.

use rug::Float;
use serde::Serialize;

use crate::mockform::{FValue, PoleScanHit, ShadowCheck};
use crate::periods::{EichlerValue, PeriodLattice};
use crate::precision::{fmt_float, BigComplex, PrecisionContext};
use crate::qforms::QExpansion;
use crate::symrep::SL2Z;

/// Layout version stamped into every record.
pub const SCHEMA_VERSION: u32 = 1;

/// `[re, im]` decimal strings at `digits` significant digits.
pub fn complex_strings(z: &BigComplex, digits: u32) -> [String; 2] {
    let (re, im) = z.to_parts_strings(digits as usize);
    [re, im]
}

/// Decimal string at `digits` significant digits.
pub fn float_string(x: &Float, digits: u32) -> String {
    fmt_float(x, digits as usize)
}

/// Matrix entries in row-major order.
pub fn matrix_ints(m: &SL2Z) -> [i64; 4] {
    [m.a, m.b, m.c, m.d]
}

/// Serializes a record as pretty-printed JSON with a trailing newline.
pub fn render<T: Serialize>(record: &T) -> String {
    let mut out = serde_json::to_string_pretty(record).expect("records contain only plain data");
    out.push('\n');
    out
}

/// Lattice basis record (`"kind": "periods"`).
#[derive(Debug, Clone, Serialize)]
pub struct PeriodsRecord {
    pub schema: u32,
    pub kind: &'static str,
    pub form: String,
    pub digits: u32,
    pub omega1: [String; 2],
    pub omega2: [String; 2],
    pub residual: String,
    pub volume: String,
    pub tau_reduced: [String; 2],
    pub generators: usize,
}

/// Builds the `"periods"` record from a lattice.
pub fn periods_record(form: &str, lattice: &PeriodLattice, ctx: &PrecisionContext) -> PeriodsRecord {
    let d = ctx.digits();
    PeriodsRecord {
        schema: SCHEMA_VERSION,
        kind: "periods",
        form: form.to_owned(),
        digits: d,
        omega1: complex_strings(lattice.omega1(), d),
        omega2: complex_strings(lattice.omega2(), d),
        residual: float_string(lattice.residual(), d),
        volume: float_string(lattice.basis().volume(), d),
        tau_reduced: complex_strings(lattice.basis().tau(), d),
        generators: lattice.generators().len(),
    }
}

/// Eichler integral record (`"kind": "eichler"`).
#[derive(Debug, Clone, Serialize)]
pub struct EichlerRecord {
    pub schema: u32,
    pub kind: &'static str,
    pub form: String,
    pub digits: u32,
    pub weight: u32,
    pub tau: [String; 2],
    pub frame: [i64; 4],
    pub components: Vec<[String; 2]>,
}

/// Builds the `"eichler"` record from an integral vector.
pub fn eichler_record(
    form: &str,
    value: &EichlerValue,
    tau: &BigComplex,
    frame: &SL2Z,
    ctx: &PrecisionContext,
) -> EichlerRecord {
    let d = ctx.digits();
    EichlerRecord {
        schema: SCHEMA_VERSION,
        kind: "eichler",
        form: form.to_owned(),
        digits: d,
        weight: value.weight(),
        tau: complex_strings(tau, d),
        frame: matrix_ints(frame),
        components: value.components().iter().map(|z| complex_strings(z, d)).collect(),
    }
}

/// One polar divisor met during evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct PoleRecord {
    pub component: usize,
    pub shift: [String; 2],
    pub offset: [String; 2],
    pub distance: String,
}

/// Assembled vector value record (`"kind": "value"`).
#[derive(Debug, Clone, Serialize)]
pub struct ValueRecord {
    pub schema: u32,
    pub kind: &'static str,
    pub form: String,
    pub digits: u32,
    pub weight: u32,
    pub tau: [String; 2],
    pub frame: [i64; 4],
    pub entries: Vec<[String; 2]>,
    pub pole_flag: bool,
    pub poles: Vec<PoleRecord>,
}

/// Builds the `"value"` record from an evaluation result.
pub fn value_record(form: &str, fv: &FValue, ctx: &PrecisionContext) -> ValueRecord {
    let d = ctx.digits();
    ValueRecord {
        schema: SCHEMA_VERSION,
        kind: "value",
        form: form.to_owned(),
        digits: d,
        weight: fv.value.weight,
        tau: complex_strings(&fv.tau, d),
        frame: matrix_ints(&fv.frame),
        entries: fv.value.entries.iter().map(|z| complex_strings(z, d)).collect(),
        pole_flag: fv.pole_flag,
        poles: fv
            .poles
            .iter()
            .map(|p| PoleRecord {
                component: p.component,
                shift: [p.shift.0.to_string(), p.shift.1.to_string()],
                offset: complex_strings(&p.offset, d),
                distance: float_string(&p.distance, d),
            })
            .collect(),
    }
}

/// Stencil shadow record (`"kind": "shadow"`).
#[derive(Debug, Clone, Serialize)]
pub struct ShadowRecord {
    pub schema: u32,
    pub kind: &'static str,
    pub form: String,
    pub digits: u32,
    pub weight: u32,
    pub tau: [String; 2],
    pub frame: [i64; 4],
    pub step: String,
    pub computed: Vec<[String; 2]>,
    pub expected: Vec<[String; 2]>,
    pub deviation: String,
}

/// Builds the `"shadow"` record from a stencil check.
pub fn shadow_record(
    form: &str,
    check: &ShadowCheck,
    tau: &BigComplex,
    frame: &SL2Z,
    step: &Float,
    ctx: &PrecisionContext,
) -> ShadowRecord {
    let d = ctx.digits();
    ShadowRecord {
        schema: SCHEMA_VERSION,
        kind: "shadow",
        form: form.to_owned(),
        digits: d,
        weight: check.computed.weight,
        tau: complex_strings(tau, d),
        frame: matrix_ints(frame),
        step: float_string(step, d),
        computed: check.computed.entries.iter().map(|z| complex_strings(z, d)).collect(),
        expected: check.expected.entries.iter().map(|z| complex_strings(z, d)).collect(),
        deviation: float_string(&check.deviation, d),
    }
}

/// Frame-change identity record (`"kind": "invariance"`).
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceRecord {
    pub schema: u32,
    pub kind: &'static str,
    pub form: String,
    pub digits: u32,
    pub tau: [String; 2],
    pub gamma: [i64; 4],
    pub frame: [i64; 4],
    pub deviation: String,
}

/// Builds the `"invariance"` record from a measured residual.
pub fn invariance_record(
    form: &str,
    tau: &BigComplex,
    gamma: &SL2Z,
    frame: &SL2Z,
    deviation: &Float,
    ctx: &PrecisionContext,
) -> InvarianceRecord {
    let d = ctx.digits();
    InvarianceRecord {
        schema: SCHEMA_VERSION,
        kind: "invariance",
        form: form.to_owned(),
        digits: d,
        tau: complex_strings(tau, d),
        gamma: matrix_ints(gamma),
        frame: matrix_ints(frame),
        deviation: float_string(deviation, d),
    }
}

/// One refined hit of the pole scanner.
#[derive(Debug, Clone, Serialize)]
pub struct ScanHitRecord {
    pub tau: [String; 2],
    pub frame: [i64; 4],
    pub component: usize,
    pub distance: String,
}

/// Pole scan record (`"kind": "pole_scan"`).
#[derive(Debug, Clone, Serialize)]
pub struct PoleScanRecord {
    pub schema: u32,
    pub kind: &'static str,
    pub form: String,
    pub digits: u32,
    pub re_min: String,
    pub im_min: String,
    pub re_max: String,
    pub im_max: String,
    pub grid: u32,
    pub eps: String,
    pub frames: Vec<[i64; 4]>,
    pub hits: Vec<ScanHitRecord>,
}

/// Builds the `"pole_scan"` record, echoing the scan region back.
#[allow(clippy::too_many_arguments)]
pub fn pole_scan_record(
    form: &str,
    lower_left: &BigComplex,
    upper_right: &BigComplex,
    grid: u32,
    eps: &Float,
    frames: &[SL2Z],
    hits: &[PoleScanHit],
    ctx: &PrecisionContext,
) -> PoleScanRecord {
    let d = ctx.digits();
    PoleScanRecord {
        schema: SCHEMA_VERSION,
        kind: "pole_scan",
        form: form.to_owned(),
        digits: d,
        re_min: float_string(lower_left.re(), d),
        im_min: float_string(lower_left.im(), d),
        re_max: float_string(upper_right.re(), d),
        im_max: float_string(upper_right.im(), d),
        grid,
        eps: float_string(eps, d),
        frames: frames.iter().map(matrix_ints).collect(),
        hits: hits
            .iter()
            .map(|h| ScanHitRecord {
                tau: complex_strings(&h.tau, d),
                frame: matrix_ints(&h.frame),
                component: h.component,
                distance: float_string(&h.distance, d),
            })
            .collect(),
    }
}

/// Holomorphic-part expansion record (`"kind": "q_expansion"`).
///
/// Each entry of `coefficients` is the coefficient list of one power of `q`
/// starting at `n_min`, itself a (possibly empty) polynomial coefficient
/// list in the outer variable; component-0 expansions carry constants, so
/// the inner lists have at most one element.
#[derive(Debug, Clone, Serialize)]
pub struct QExpansionRecord {
    pub schema: u32,
    pub kind: &'static str,
    pub form: String,
    pub digits: u32,
    pub component: usize,
    pub convention: String,
    pub prefactor: [String; 2],
    pub n_min: i64,
    pub coefficients: Vec<Vec<[String; 2]>>,
}

/// Builds the `"q_expansion"` record; `convention` names the bracket recipe.
pub fn q_expansion_record(
    form: &str,
    component: usize,
    convention: &str,
    expansion: &QExpansion,
    ctx: &PrecisionContext,
) -> QExpansionRecord {
    let d = ctx.digits();
    QExpansionRecord {
        schema: SCHEMA_VERSION,
        kind: "q_expansion",
        form: form.to_owned(),
        digits: d,
        component,
        convention: convention.to_owned(),
        prefactor: complex_strings(&expansion.prefactor, d),
        n_min: expansion.n_min,
        coefficients: expansion
            .coeffs
            .iter()
            .map(|p| p.coeffs().iter().map(|c| complex_strings(c, d)).collect())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mockform::MockFormContext;
    use crate::periods::eichler_vector;
    use crate::qforms::CuspForm;

    fn ctx20() -> PrecisionContext {
        PrecisionContext::new(20).unwrap()
    }

    fn small_context(ctx: &PrecisionContext) -> MockFormContext {
        let form = CuspForm::by_name("eta3p8", 400).unwrap();
        let w1 = ctx
            .complex("0.0577504719877191584835594176398328", "0")
            .unwrap();
        let w2 = ctx
            .complex("0", "0.0111140835159791994161240294275608")
            .unwrap();
        let lattice = PeriodLattice::from_basis(w1, w2, ctx).unwrap();
        MockFormContext::with_lattice(form, lattice, ctx).unwrap()
    }

    #[test]
    fn value_record_serializes_deterministically_with_schema_header() {
        let ctx = ctx20();
        let ctxm = small_context(&ctx);
        let tau = ctx.complex("0.1", "2.5").unwrap();
        let frame = SL2Z::new(1, 1, 0, 1).unwrap();

        let make = || {
            let fv = ctxm.f_value(&tau, &frame).unwrap();
            render(&value_record("eta3p8", &fv, &ctx))
        };
        let first = make();
        let second = make();
        assert_eq!(first, second, "identical inputs must render identical JSON");
        assert!(first.starts_with("{\n  \"schema\": 1,\n  \"kind\": \"value\""));
        assert!(first.ends_with("\n"));

        let parsed: serde_json::Value = serde_json::from_str(&first).unwrap();
        assert_eq!(parsed["digits"], 20);
        assert_eq!(parsed["weight"], 4);
        assert_eq!(parsed["frame"], serde_json::json!([1, 1, 0, 1]));
        assert_eq!(parsed["entries"].as_array().unwrap().len(), 3);
        assert_eq!(parsed["pole_flag"], false);
        assert_eq!(parsed["poles"].as_array().unwrap().len(), 0);
        // Both parts of a complex entry are decimal strings.
        assert!(parsed["entries"][0][0].is_string());
        assert!(parsed["entries"][0][1].is_string());
    }

    #[test]
    fn complex_strings_carry_the_requested_precision() {
        let ctx = PrecisionContext::new(60).unwrap();
        let z = ctx.complex_from_real(ctx.pi());
        let [re, im] = complex_strings(&z, ctx.digits());
        assert!(re.starts_with("3.14159265358979323846264338327950288419716939937510582097494"));
        assert_eq!(im, "0");
        // Round trip through the parser stays within one ulp of the target.
        let back = ctx.complex(&re, &im).unwrap();
        let err = back.dist(&z);
        assert!(err < ctx.pow10_real(-58), "round-trip error {err}");
    }

    #[test]
    fn every_record_kind_carries_its_documented_name() {
        let ctx = ctx20();
        let ctxm = small_context(&ctx);
        let tau = ctx.complex("0", "2").unwrap();
        let id = SL2Z::identity();

        let lattice = PeriodLattice::from_basis(ctx.one(), ctx.i(), &ctx).unwrap();
        let p = periods_record("synthetic", &lattice, &ctx);
        assert_eq!((p.schema, p.kind), (1, "periods"));
        assert!(p.omega1[0].starts_with("1.000"));
        assert_eq!(p.omega1[1], "0");
        assert!(p.volume.starts_with("1.000"));

        let ev = eichler_vector(ctxm.form(), &tau, &id, &ctx).unwrap();
        let e = eichler_record("eta3p8", &ev, &tau, &id, &ctx);
        assert_eq!((e.schema, e.kind), (1, "eichler"));
        assert_eq!(e.components.len(), 3);

        let sc = ctxm
            .shadow_check(&tau, &id, Some(&ctx.pow10_real(-4)))
            .unwrap();
        let s = shadow_record("eta3p8", &sc, &tau, &id, &ctx.pow10_real(-4), &ctx);
        assert_eq!((s.schema, s.kind), (1, "shadow"));
        assert_eq!(s.computed.len(), s.expected.len());

        let dev = ctxm
            .rho_invariance_check(&SL2Z::new(1, 1, 0, 1).unwrap(), &tau, &id)
            .unwrap();
        let iv = invariance_record("eta3p8", &tau, &SL2Z::new(1, 1, 0, 1).unwrap(), &id, &dev, &ctx);
        assert_eq!((iv.schema, iv.kind), (1, "invariance"));

        let ll = ctx.complex("0", "1.9").unwrap();
        let ur = ctx.complex("0.1", "2.1").unwrap();
        let eps = ctx.pow10_real(-3);
        let hits = ctxm.pole_scan(&ll, &ur, 2, &[id], &eps).unwrap();
        let ps = pole_scan_record("eta3p8", &ll, &ur, 2, &eps, &[id], &hits, &ctx);
        assert_eq!((ps.schema, ps.kind), (1, "pole_scan"));
        assert_eq!(ps.frames, vec![[1i64, 0, 0, 1]]);

        let qe = ctxm.holomorphic_part_q(0, 3).unwrap();
        let qr = q_expansion_record("eta3p8", 0, "analytic", &qe, &ctx);
        assert_eq!((qr.schema, qr.kind), (1, "q_expansion"));
        assert_eq!(qr.n_min, -1);
        // Constant coefficient lists: at most one inner element each.
        assert!(qr.coefficients.iter().all(|c| c.len() <= 1));
        // The analytic prefactor is -2 pi i.
        assert_eq!(qr.prefactor[0], "0");
        assert!(qr.prefactor[1].starts_with("-6.283185307179586"));
    }
}
