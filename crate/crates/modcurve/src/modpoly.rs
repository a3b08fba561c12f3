//! Classical modular polynomials Φ_N by exact linear algebra on q-expansions
//! of j(z) and j(Nz).
//!
//! Φ_N ∈ Z[x, y] is the minimal polynomial of j(Nz) over C(j): symmetric,
//! monic in x, of degree ψ(N) in each variable. It is pinned down by a
//! linear system over the symmetric unknowns {c_rs : 0 ≤ s ≤ r ≤ ψ(N)}:
//! the Laurent coefficients of Σ c_rs (j(z)^r j(Nz)^s + j(z)^s j(Nz)^r)
//! (halving the diagonal) must all vanish.
//!
//! Soundness is layered exactly as in the implicitization module:
//!
//! - The kernel is computed on the full window of Laurent exponents from
//!   −(N+1)ψ(N) — the lowest exponent occurring in any column, attained by
//!   the (ψ, ψ) monomial — through 2ψ² − (N+1)ψ + 4. Multiplying by
//!   (Δ(z)Δ(Nz))^ψ turns each monomial into a holomorphic form of weight
//!   24ψ on Γ0(N), and a nonzero form of that weight has valuation at ∞ at
//!   most 24ψ·ψ/12 = 2ψ² (valence formula); vanishing across this window
//!   therefore forces an exact identity, so every kernel vector is a true
//!   relation — no shorter heuristic window is ever trusted. (Narrower
//!   windows really do lie: at N = 7 the system restricted to the first
//!   #unknowns + 16 rows has a two-dimensional kernel.)
//! - Any true relation with per-variable degrees ≤ ψ is a constant multiple
//!   of Φ_N (minimal polynomial of j(Nz) over C(j), with the quotient
//!   forced to degree 0 in both variables), so the kernel is provably
//!   one-dimensional; the assert on that is a consistency check, not a
//!   hope. The primitive integral vector normalized to coeff(ψ, 0) = 1 *is*
//!   Φ_N, and its residual is still re-verified across the whole window.
//!
//! Degrees stay desk-scale (default N ≤ 7): the point is exactness and
//! cross-checkability against the plane models, not competing with
//! isogeny-based methods for large N.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use sha2::{Digest, Sha256};

use crate::arith;
use crate::forms;
use crate::implicit::HomogPoly3;
use crate::linalg::IntMatrix;
use crate::qseries::LaurentSeries;
use crate::{par, Error, Result};

/// Largest level `phi` accepts by default. Φ_7 (ψ = 8, 45 symmetric
/// unknowns, coefficients up to ~60 digits) stays comfortably desk-scale;
/// beyond that use `phi_with_limit` explicitly.
pub const DEFAULT_N_MAX: u64 = 7;

/// A nonzero polynomial in Z[x, y], stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivarPoly {
    coeffs: BTreeMap<(u32, u32), BigInt>,
}

impl BivarPoly {
    /// Builds from a coefficient map; zero coefficients are dropped.
    /// Panics on the zero polynomial.
    pub fn new(coeffs: BTreeMap<(u32, u32), BigInt>) -> Self {
        let coeffs: BTreeMap<(u32, u32), BigInt> =
            coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        assert!(!coeffs.is_empty(), "zero polynomial");
        BivarPoly { coeffs }
    }

    /// Coefficient of x^r y^s (zero off the support).
    pub fn coeff(&self, r: u32, s: u32) -> BigInt {
        self.coeffs.get(&(r, s)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Terms in descending lexicographic order of (r, s).
    pub fn terms_desc(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.coeffs.iter().rev()
    }

    pub fn deg_x(&self) -> u32 {
        self.coeffs.keys().map(|&(r, _)| r).max().unwrap()
    }

    pub fn deg_y(&self) -> u32 {
        self.coeffs.keys().map(|&(_, s)| s).max().unwrap()
    }

    /// Max of r + s over the support.
    pub fn total_degree(&self) -> u32 {
        self.coeffs.keys().map(|&(r, s)| r + s).max().unwrap()
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs
            .iter()
            .all(|(&(r, s), c)| self.coeff(s, r) == *c)
    }

    /// Degree of P(x, x), honoring exact cancellation; None if the
    /// specialization is identically zero.
    pub fn diagonal_degree(&self) -> Option<u32> {
        let mut diag: BTreeMap<u32, BigInt> = BTreeMap::new();
        for (&(r, s), c) in &self.coeffs {
            *diag.entry(r + s).or_insert_with(BigInt::zero) += c;
        }
        diag.into_iter().rev().find(|(_, c)| !c.is_zero()).map(|(k, _)| k)
    }

    /// x0^D · P(x1/x0, x2/x0) with D = total_degree, as a primitive
    /// sign-normalized ternary form. Constants (D = 0) are rejected: a
    /// degree-0 "curve" has no defining equation.
    pub fn homogenize(&self) -> HomogPoly3 {
        let d = self.total_degree();
        assert!(d >= 1, "cannot homogenize a constant polynomial");
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&(r, s), c)| ((d - r - s, r, s), c.clone()))
            .collect();
        HomogPoly3::new(d, coeffs)
    }

    /// Sparse text form: one line "r s coefficient" per term, descending
    /// lexicographic in (r, s).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (&(r, s), c) in self.terms_desc() {
            out.push_str(&format!("{} {} {}\n", r, s, c));
        }
        out
    }
}

/// The symmetric unknown pairs {(r, s) : 0 ≤ s ≤ r ≤ psi}, descending
/// lexicographic — the column order of the linear system.
fn symmetric_pairs(psi: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for r in (0..=psi).rev() {
        for s in (0..=r).rev() {
            out.push((r, s));
        }
    }
    out
}

/// Φ_N for 2 ≤ N ≤ DEFAULT_N_MAX.
pub fn phi(n: u64) -> Result<BivarPoly> {
    phi_with_limit(n, DEFAULT_N_MAX)
}

/// Φ_N with an explicit level ceiling (memory and runtime grow quickly:
/// matrix width is (ψ+1)(ψ+2)/2 and series carry ~ψ·N·ψ coefficients).
pub fn phi_with_limit(n: u64, n_max: u64) -> Result<BivarPoly> {
    if n < 2 || n > n_max {
        return Err(Error::LevelOutOfRange { n, max: n_max });
    }
    let psi = arith::psi(n) as u32;
    let pairs = symmetric_pairs(psi);
    let unknowns = pairs.len();
    debug_assert_eq!(unknowns as u32, (psi + 1) * (psi + 2) / 2);

    // Laurent window [e_lo, cap): everything up to the valence bound after
    // clearing denominators with (ΔΔ(N·))^ψ (see the module docs), and at
    // least unknowns + 16 rows so the system is overdetermined even at
    // tiny levels. The kernel is solved on the whole window.
    let e_lo = -((n as i64 + 1) * psi as i64);
    let cap = (2 * (psi as i64) * (psi as i64) + e_lo)
        .max(e_lo + unknowns as i64 + 16)
        + 5;
    let solve_rows = (cap - e_lo) as usize;
    let j_prec = cap + (n as i64 + 1) * psi as i64 + 4;
    let base_prec = (j_prec - 1).div_euclid(n as i64) + 2;

    let jz = forms::j_invariant(j_prec);
    let jn = forms::j_invariant(base_prec).dilate(n);
    debug_assert!(jn.prec() >= j_prec);

    // Memoized powers (precision decays by |val| per multiplication, which
    // the j_prec margin absorbs).
    let mut a_pows = Vec::with_capacity(psi as usize + 1);
    a_pows.push(LaurentSeries::one(j_prec));
    for r in 1..=psi as usize {
        a_pows.push(a_pows[r - 1].mul_to_prec(&jz, j_prec));
    }
    let mut b_pows = Vec::with_capacity(psi as usize + 1);
    b_pows.push(LaurentSeries::one(j_prec));
    for s in 1..=psi as usize {
        b_pows.push(b_pows[s - 1].mul_to_prec(&jn, j_prec));
    }

    // Symmetric columns j^r j(N·)^s + j^s j(N·)^r (diagonal not doubled),
    // all cut to the common cap.
    let columns: Vec<LaurentSeries> = par::map_collect(&pairs, |&(r, s)| {
        let main = a_pows[r as usize].mul_to_prec(&b_pows[s as usize], cap);
        if r == s {
            main
        } else {
            &main + &a_pows[s as usize].mul_to_prec(&b_pows[r as usize], cap)
        }
    });
    for col in &columns {
        assert!(col.prec() >= cap, "column precision shortfall");
        assert!(col.val() >= e_lo);
        assert!(col.is_integral());
    }

    let rows: Vec<Vec<BigInt>> = (0..solve_rows)
        .map(|i| {
            let e = e_lo + i as i64;
            columns.iter().map(|c| c.coeff(e).numer().clone()).collect()
        })
        .collect();
    let kernel = IntMatrix::from_rows(rows).kernel_basis();
    assert_eq!(
        kernel.len(),
        1,
        "the modular polynomial system at N={n} must have a one-dimensional \
         kernel (got {}); the minimal polynomial of j(Nz) over C(j) is unique",
        kernel.len()
    );
    let mut v = kernel.into_iter().next().unwrap();

    // Primitive vector equals ±Φ_N; make it monic. c(ψ,0) sits right after
    // the ψ+1 entries (ψ,ψ)…(ψ,0) — index ψ in descending pair order.
    let monic_idx = pairs.iter().position(|&p| p == (psi, 0)).unwrap();
    assert!(
        v[monic_idx].abs().is_one(),
        "primitive kernel vector must be ±monic in x"
    );
    if v[monic_idx].is_negative() {
        for c in v.iter_mut() {
            *c = -&*c;
        }
    }

    // Certify: the residual of the full bivariate polynomial vanishes
    // through the valence window (each symmetric column already carries
    // both mirror monomials).
    let mut residual = LaurentSeries::zero(cap);
    for (idx, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        residual = &residual
            + &columns[idx].scale(&num_rational::BigRational::from_integer(c.clone()));
    }
    assert!(
        residual.is_zero() && residual.prec() >= cap,
        "Φ_{n} residual must vanish through the valence window"
    );

    let mut coeffs = BTreeMap::new();
    for (idx, &(r, s)) in pairs.iter().enumerate() {
        if v[idx].is_zero() {
            continue;
        }
        coeffs.insert((r, s), v[idx].clone());
        coeffs.insert((s, r), v[idx].clone());
    }
    let p = BivarPoly::new(coeffs);
    assert_eq!(p.deg_x(), psi, "deg_x Φ_{n} must be ψ(N)");
    assert_eq!(p.deg_y(), psi, "deg_y Φ_{n} must be ψ(N)");
    assert!(p.is_symmetric());
    assert!(p.coeff(psi, 0).is_one());
    assert!(p.coeff(0, psi).is_one());
    Ok(p)
}

/// Kronecker's congruence: Φ_p(x, y) ≡ (x^p − y)(x − y^p) mod p for prime p
/// — a strong independent checksum on every coefficient.
pub fn kronecker_congruence_holds(p: &BivarPoly, n: u64) -> bool {
    assert!(
        arith::factorize(n) == vec![(n, 1)],
        "Kronecker congruence needs a prime level"
    );
    let nn = BigInt::from(n);
    let m = n as u32;
    // (x^n − y)(x − y^n) = x^(n+1) − x^n y^n − x y + y^(n+1)
    let mut expected: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
    expected.insert((m + 1, 0), BigInt::one());
    expected.insert((m, m), -BigInt::one());
    expected.insert((1, 1), -BigInt::one());
    expected.insert((0, m + 1), BigInt::one());
    let mut support: Vec<(u32, u32)> = p.coeffs.keys().copied().collect();
    support.extend(expected.keys().copied());
    support.sort_unstable();
    support.dedup();
    support.into_iter().all(|(r, s)| {
        let lhs = p.coeff(r, s).mod_floor(&nn);
        let rhs = expected
            .get(&(r, s))
            .cloned()
            .unwrap_or_else(BigInt::zero)
            .mod_floor(&nn);
        lhs == rhs
    })
}

/// JSON wrapper for golden-file testing: invariants plus a SHA-256 of the
/// canonical sparse text form.
pub fn phi_report_json(n: u64, p: &BivarPoly) -> serde_json::Value {
    let text = p.to_text();
    let digest = Sha256::digest(text.as_bytes());
    let sha: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    serde_json::json!({
        "schema_version": 1,
        "N": n,
        "psi": arith::psi(n),
        "deg_x": p.deg_x(),
        "deg_y": p.deg_y(),
        "total_degree": p.total_degree(),
        "diag_degree": p.diagonal_degree(),
        "sha256": sha,
        "terms": p
            .terms_desc()
            .map(|(&(r, s), c)| serde_json::json!({"r": r, "s": s, "c": c.to_string()}))
            .collect::<Vec<_>>(),
    })
}
