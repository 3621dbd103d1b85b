//! Integer matrices of SL₂(ℤ) and the symmetric-power representation.
//!
//! For weight `k` the representation space is the degree-(k-2) part of the
//! symmetric algebra on two letters, with basis monomials indexed by
//! `ℓ = 0..=k-2`. A coordinate vector lists the coefficients `z_ℓ` in that
//! basis (binomial normalizations are carried by the basis, never by the
//! coordinates). The representing matrix of `M = (a b; c d)` is
//!
//! ```text
//! N(M)_{ℓ t} = [sᵗ] (a·s + b)^ℓ (c·s + d)^{k-2-ℓ},
//! ```
//!
//! which has exact integer entries, satisfies `N(M₁M₂) = N(M₁)·N(M₂)` and
//! `det N(M) = 1`, and therefore preserves integer coordinate lattices.

use std::fmt;

use rug::Integer;

use crate::error::Error;
use crate::precision::{BigComplex, PrecisionContext};
use crate::Result;

/// A 2×2 integer matrix of determinant one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SL2Z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl SL2Z {
    /// Build from entries, checking `ad - bc = 1` exactly.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
        if det != 1 {
            return Err(Error::InvalidInput(format!(
                "matrix ({a},{b};{c},{d}) has determinant {det}, expected 1"
            )));
        }
        Ok(SL2Z { a, b, c, d })
    }

    /// The identity matrix.
    pub fn identity() -> Self {
        SL2Z { a: 1, b: 0, c: 0, d: 1 }
    }

    /// The inversion generator `S = (0 -1; 1 0)`.
    pub fn s() -> Self {
        SL2Z { a: 0, b: -1, c: 1, d: 0 }
    }

    /// The translation generator `T = (1 1; 0 1)`.
    pub fn t() -> Self {
        SL2Z { a: 1, b: 1, c: 0, d: 1 }
    }

    /// `-I`, which is in the group (determinant one).
    pub fn neg_identity() -> Self {
        SL2Z { a: -1, b: 0, c: 0, d: -1 }
    }

    /// Matrix product `self · rhs` (panics on i64 overflow in debug builds).
    pub fn mul(&self, rhs: &SL2Z) -> SL2Z {
        SL2Z {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Exact inverse `(d -b; -c a)`.
    pub fn inverse(&self) -> SL2Z {
        SL2Z {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// True when the lower-left entry is divisible by `level` (membership in
    /// the Hecke congruence subgroup of that level).
    pub fn in_gamma0(&self, level: i64) -> bool {
        level != 0 && self.c % level == 0
    }

    /// Möbius action `(aτ + b)/(cτ + d)` on a point of the upper half-plane.
    pub fn apply(&self, tau: &BigComplex, ctx: &PrecisionContext) -> BigComplex {
        let num = tau * self.a + ctx.complex_from_i64(self.b, 0);
        let den = self.j_factor(tau, ctx);
        num / den
    }

    /// Automorphy factor `cτ + d`.
    pub fn j_factor(&self, tau: &BigComplex, ctx: &PrecisionContext) -> BigComplex {
        tau * self.c + ctx.complex_from_i64(self.d, 0)
    }

    /// Parse `"a,b,c,d"` (commas and/or whitespace as separators).
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s
            .split(|ch: char| ch == ',' || ch.is_whitespace() || ch == ';')
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() != 4 {
            return Err(Error::InvalidInput(format!(
                "expected four integers a,b,c,d, got {s:?}"
            )));
        }
        let ints: Vec<i64> = parts
            .iter()
            .map(|p| {
                p.parse::<i64>()
                    .map_err(|e| Error::InvalidInput(format!("bad integer {p:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        Self::new(ints[0], ints[1], ints[2], ints[3])
    }
}

impl fmt::Display for SL2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)
    }
}

/// Multiply two integer polynomials given as coefficient vectors.
fn poly_mul(p: &[Integer], q: &[Integer]) -> Vec<Integer> {
    let mut out = vec![Integer::new(); p.len() + q.len() - 1];
    for (i, pi) in p.iter().enumerate() {
        if pi.is_zero() {
            continue;
        }
        for (j, qj) in q.iter().enumerate() {
            out[i + j] += (pi * qj).complete();
        }
    }
    out
}

use rug::Complete;

/// The exact integer matrix representing `M` on the weight-`k` coordinate
/// space (dimension `k - 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymRepMatrix {
    weight: u32,
    /// Row-major entries, `rows[ℓ][t]`.
    rows: Vec<Vec<Integer>>,
}

/// Compute the representing matrix `N(M)` for weight `k ≥ 2`.
///
/// Row `ℓ` holds the coefficients of `(a·s + b)^ℓ (c·s + d)^{k-2-ℓ}` in `s`.
pub fn n_matrix(m: &SL2Z, weight: u32) -> Result<SymRepMatrix> {
    if weight < 2 {
        return Err(Error::InvalidInput(format!(
            "weight must be at least 2, got {weight}"
        )));
    }
    let deg = (weight - 2) as usize;
    let lin_ab = vec![Integer::from(m.b), Integer::from(m.a)];
    let lin_cd = vec![Integer::from(m.d), Integer::from(m.c)];

    // Power tables (a·s+b)^ℓ and (c·s+d)^m for 0..=deg.
    let mut pow_ab: Vec<Vec<Integer>> = vec![vec![Integer::from(1)]];
    let mut pow_cd: Vec<Vec<Integer>> = vec![vec![Integer::from(1)]];
    for e in 1..=deg {
        pow_ab.push(poly_mul(&pow_ab[e - 1], &lin_ab));
        pow_cd.push(poly_mul(&pow_cd[e - 1], &lin_cd));
    }

    let mut rows = Vec::with_capacity(deg + 1);
    for l in 0..=deg {
        let prod = poly_mul(&pow_ab[l], &pow_cd[deg - l]);
        let mut row = vec![Integer::new(); deg + 1];
        for (t, c) in prod.into_iter().enumerate() {
            if t <= deg {
                row[t] = c;
            } else {
                debug_assert!(c.is_zero());
            }
        }
        rows.push(row);
    }
    Ok(SymRepMatrix { weight, rows })
}

impl SymRepMatrix {
    /// Identity on the weight-`k` coordinate space.
    pub fn identity(weight: u32) -> Result<Self> {
        n_matrix(&SL2Z::identity(), weight)
    }

    /// Weight whose coordinate space this matrix acts on.
    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Matrix dimension, `k - 1`.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Entry at row `ℓ`, column `t`.
    pub fn entry(&self, l: usize, t: usize) -> &Integer {
        &self.rows[l][t]
    }

    /// Exact matrix product `self · rhs`.
    pub fn mul(&self, rhs: &SymRepMatrix) -> SymRepMatrix {
        assert_eq!(self.weight, rhs.weight, "weight mismatch in matrix product");
        let n = self.dim();
        let mut rows = vec![vec![Integer::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Integer::new();
                for t in 0..n {
                    acc += (&self.rows[i][t] * &rhs.rows[t][j]).complete();
                }
                rows[i][j] = acc;
            }
        }
        SymRepMatrix { weight: self.weight, rows }
    }

    /// Standard matrix-vector product: `out_ℓ = Σ_t N_{ℓt} v_t`.
    pub fn matvec(&self, v: &[BigComplex], ctx: &PrecisionContext) -> Vec<BigComplex> {
        assert_eq!(v.len(), self.dim(), "dimension mismatch in matvec");
        self.rows
            .iter()
            .map(|row| {
                let mut acc = ctx.zero();
                for (c, x) in row.iter().zip(v) {
                    if !c.is_zero() {
                        acc += &x.mul_int(c);
                    }
                }
                acc
            })
            .collect()
    }

    /// Exact integer matrix-vector product.
    pub fn matvec_int(&self, v: &[Integer]) -> Vec<Integer> {
        assert_eq!(v.len(), self.dim(), "dimension mismatch in matvec");
        self.rows
            .iter()
            .map(|row| {
                let mut acc = Integer::new();
                for (c, x) in row.iter().zip(v) {
                    acc += (c * x).complete();
                }
                acc
            })
            .collect()
    }

    /// Exact determinant via fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Integer {
        bareiss_det(self.rows.clone())
    }
}

/// Exact determinant of an integer matrix by fraction-free (Bareiss)
/// elimination.
pub(crate) fn bareiss_det(mut m: Vec<Vec<Integer>>) -> Integer {
    let n = m.len();
    if n == 0 {
        return Integer::from(1);
    }
    let mut sign = 1i32;
    let mut prev = Integer::from(1);
    for p in 0..n {
        if m[p][p].is_zero() {
            let Some(swap) = (p + 1..n).find(|&r| !m[r][p].is_zero()) else {
                return Integer::new();
            };
            m.swap(p, swap);
            sign = -sign;
        }
        for r in p + 1..n {
            for c in p + 1..n {
                let num = (&m[r][c] * &m[p][p]).complete() - (&m[r][p] * &m[p][c]).complete();
                let (q, rem) = num.div_rem(prev.clone());
                debug_assert!(rem.is_zero(), "Bareiss divisions are exact");
                m[r][c] = q;
            }
            m[r][p] = Integer::new();
        }
        prev = m[p][p].clone();
    }
    let mut det = m[n - 1][n - 1].clone();
    if sign < 0 {
        det = -det;
    }
    det
}

/// Coordinate vector on the weight-`k` space, tagged with the group element
/// describing which transformed basis the coordinates refer to (identity tag
/// means the standard basis).
#[derive(Debug, Clone)]
pub struct SymVector {
    /// Weight `k`; the vector has `k - 1` entries.
    pub weight: u32,
    /// Coefficients `z_ℓ` for `ℓ = 0..=k-2`.
    pub entries: Vec<BigComplex>,
    /// Basis frame: coordinates refer to the `basis_tag`-transformed basis.
    pub basis_tag: SL2Z,
}

impl SymVector {
    /// Vector in the standard basis (identity tag).
    pub fn standard(weight: u32, entries: Vec<BigComplex>) -> Result<Self> {
        if entries.len() != (weight as usize).saturating_sub(1) {
            return Err(Error::InvalidInput(format!(
                "weight {weight} needs {} entries, got {}",
                weight - 1,
                entries.len()
            )));
        }
        Ok(SymVector {
            weight,
            entries,
            basis_tag: SL2Z::identity(),
        })
    }
}

/// Rewrite `v` in the basis transformed by `M`: coordinates pick up `N(M)`
/// and the frame tag is composed on the left. Applying `M` then `M⁻¹`
/// restores the original vector exactly.
pub fn act_basis(m: &SL2Z, v: &SymVector, ctx: &PrecisionContext) -> Result<SymVector> {
    let n = n_matrix(m, v.weight)?;
    Ok(SymVector {
        weight: v.weight,
        entries: n.matvec(&v.entries, ctx),
        basis_tag: m.mul(&v.basis_tag),
    })
}

/// The coordinate vector with entries `τ^ℓ`, `ℓ = 0..=k-2`, standard basis.
pub fn sym_power_of_point(tau: &BigComplex, weight: u32, ctx: &PrecisionContext) -> Result<SymVector> {
    if weight < 2 {
        return Err(Error::InvalidInput(format!(
            "weight must be at least 2, got {weight}"
        )));
    }
    let mut entries = Vec::with_capacity((weight - 1) as usize);
    let mut p = ctx.one();
    for _ in 0..=(weight - 2) {
        entries.push(p.clone());
        p *= tau;
    }
    SymVector::standard(weight, entries)
}
