//! Classical modular forms as exact q-expansions, cusps of Γ0(N), and
//! explicit cuspidal divisors.
//!
//! Everything here is level-decorated series plumbing around four forms:
//! Δ, E4³ and their dilations Δ(Nz), E4³(Nz), all initially level-1 objects
//! viewed in M_12(Γ0(N)). Conventions:
//!
//! - E4(z) = 1 + 240 Σ σ3(n) qⁿ, E6(z) = 1 − 504 Σ σ5(n) qⁿ,
//!   Δ = (E4³ − E6²)/1728 = q − 24q² + 252q³ − ⋯, j = E4³/Δ.
//! - Cusps of Γ0(N): one class for each divisor k | N and each residue
//!   a ∈ (Z/(k, N/k))^×, represented by p/q with q = k and p the smallest
//!   non-negative integer ≡ a (mod (k, N/k)) coprime to k; the class of the
//!   cusp ∞ is k = N (∞ ~ 1/N). The width of a class-k cusp is
//!   N/(k·(k, N/k)), and Σ widths over all cusps equals ψ(N).
//! - div(Δ) on X_0(N) has multiplicity (N/k)/(k, N/k) at every class-k
//!   cusp; div(Δ(N·)) has k/(k, N/k). Both have total degree ψ(N), as any
//!   divisor of a weight-12 form must. div(E4³) is supported away from the
//!   cusps, on the Γ0(N)-orbits above j = 0; the individual multiplicities
//!   are not resolved here (only the total degree ψ(N) and the disjointness
//!   from cusp supports are consumed), so the divisor carries one opaque
//!   elliptic entry of full degree.
//!
//! The divisor multiplicities are cross-checked in the tests against the
//! Ligozat order formula for η(δz)^24 and the cusp data against a
//! brute-force orbit computation on P¹(Z/N).
//!
//! References: Diamond–Shurman, *A First Course in Modular Forms*, §3.8;
//! Ligozat, *Courbes modulaires de genre 1*, Prop. 3.2.8.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{self, euler_phi, gcd};
use crate::qseries::LaurentSeries;

/// A q-expansion with tracked weight, level, and a human-readable label.
///
/// The weight/level metadata follows the usual bookkeeping (products add
/// weights; dilation by n multiplies the level) but is tracked, not proved:
/// the series is the ground truth.
#[derive(Clone, Debug)]
pub struct ModularForm {
    pub series: LaurentSeries,
    pub weight: u64,
    pub level: u64,
    pub label: String,
}

impl ModularForm {
    pub fn new(series: LaurentSeries, weight: u64, level: u64, label: impl Into<String>) -> Self {
        assert!(weight % 2 == 0, "odd weight");
        assert!(level >= 1, "level must be positive");
        ModularForm {
            series,
            weight,
            level,
            label: label.into(),
        }
    }

    /// f·g: weights add, levels merge by lcm.
    pub fn product(&self, other: &ModularForm) -> ModularForm {
        let level = self.level / gcd(self.level, other.level) * other.level;
        ModularForm {
            series: &self.series * &other.series,
            weight: self.weight + other.weight,
            level,
            label: format!("{}*{}", self.label, other.label),
        }
    }

    /// f(nz): the level multiplies by n.
    pub fn dilate(&self, n: u64) -> ModularForm {
        ModularForm {
            series: self.series.dilate(n),
            weight: self.weight,
            level: self.level * n,
            label: format!("{}({}z)", self.label, n),
        }
    }

    /// a·f + b·g for forms of equal weight.
    pub fn linear_combination(a: &BigInt, f: &ModularForm, b: &BigInt, g: &ModularForm) -> ModularForm {
        assert_eq!(f.weight, g.weight, "cannot add forms of different weights");
        let level = f.level / gcd(f.level, g.level) * g.level;
        let fa = f.series.scale(&BigRational::from_integer(a.clone()));
        let gb = g.series.scale(&BigRational::from_integer(b.clone()));
        ModularForm {
            series: &fa + &gb,
            weight: f.weight,
            level,
            label: format!("{}*{}{:+}*{}", a, f.label, b, g.label),
        }
    }

    /// Truncates the underlying series to a lower precision.
    pub fn truncate(&self, prec: i64) -> ModularForm {
        ModularForm {
            series: self.series.truncate(prec),
            ..self.clone()
        }
    }
}

/// σ_k(n) for 1 ≤ n < prec, by the divisor sieve.
fn sigma_vec(prec: i64, k: u32) -> Vec<BigInt> {
    assert!(prec >= 1);
    let len = prec as usize;
    let mut out = vec![BigInt::zero(); len];
    for d in 1..len {
        let dk = BigInt::from(d).pow(k);
        let mut m = d;
        while m < len {
            out[m] += &dk;
            m += d;
        }
    }
    out
}

/// E4 = 1 + 240 Σ σ3(n) qⁿ to the given precision (weight 4, level 1).
pub fn eisenstein_e4(prec: i64) -> ModularForm {
    assert!(prec >= 1, "prec must be >= 1");
    let mut coeffs = sigma_vec(prec, 3);
    for c in coeffs.iter_mut().skip(1) {
        *c *= 240;
    }
    coeffs[0] = BigInt::one();
    ModularForm::new(LaurentSeries::from_int_coeffs(0, coeffs), 4, 1, "E4")
}

/// E6 = 1 − 504 Σ σ5(n) qⁿ to the given precision (weight 6, level 1).
pub fn eisenstein_e6(prec: i64) -> ModularForm {
    assert!(prec >= 1, "prec must be >= 1");
    let mut coeffs = sigma_vec(prec, 5);
    for c in coeffs.iter_mut().skip(1) {
        *c *= -504;
    }
    coeffs[0] = BigInt::one();
    ModularForm::new(LaurentSeries::from_int_coeffs(0, coeffs), 6, 1, "E6")
}

/// Δ = (E4³ − E6²)/1728 = q − 24q² + 252q³ − ⋯ (weight 12, level 1).
///
/// Panics if the division leaves a non-integral coefficient — that would
/// mean the Eisenstein series themselves are wrong.
pub fn delta(prec: i64) -> ModularForm {
    assert!(prec >= 2, "prec must be >= 2");
    let e4 = eisenstein_e4(prec).series;
    let e6 = eisenstein_e6(prec).series;
    let num = &e4.pow(3) - &e6.pow(2);
    let series = num.scale(&BigRational::new(BigInt::one(), BigInt::from(1728)));
    assert!(series.is_integral(), "Δ must have integral coefficients");
    assert_eq!(series.val(), 1, "Δ must vanish to order exactly 1 at ∞");
    assert!(series.coeff(1).is_one(), "Δ must be monic in q");
    ModularForm::new(series, 12, 1, "Delta")
}

/// E4³ = 1 + 720q + 179280q² + ⋯ (weight 12, level 1).
pub fn e4_cubed(prec: i64) -> ModularForm {
    let e4 = eisenstein_e4(prec);
    ModularForm::new(e4.series.pow(3), 12, 1, "E4^3")
}

/// j = E4³/Δ = q⁻¹ + 744 + 196884q + ⋯, a weight-0 Laurent series with
/// exactly `prec` as its precision (coefficients through q^(prec−1)).
pub fn j_invariant(prec: i64) -> LaurentSeries {
    assert!(prec >= 1, "prec must be >= 1");
    let work = prec + 2;
    let num = e4_cubed(work).series;
    let den = delta(work).series;
    let j = &num / &den;
    debug_assert_eq!(j.val(), -1);
    debug_assert!(j.coeff(-1).is_one());
    j.truncate(prec)
}

// ---------------------------------------------------------------------------
// Cusps
// ---------------------------------------------------------------------------

/// A representative p/q of a Γ0(N)-orbit of cusps.
///
/// `k = gcd(q, N)` classifies the orbit family; within the family there are
/// exactly φ((k, N/k)) orbits. `width` is the ramification index of the
/// covering X_0(N) → X(1) at this cusp, N/(k·(k, N/k)).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CuspRep {
    pub p: u64,
    pub q: u64,
    pub k: u64,
    pub width: u64,
}

/// All cusps of Γ0(N), one representative per orbit, sorted by (k, p).
///
/// For each k | N and each residue a ∈ (Z/g)^× with g = (k, N/k), the
/// representative is p/k with p the least non-negative integer ≡ a (mod g)
/// coprime to k. The k = N entry is the orbit of ∞ (∞ ~ 1/N); k = 1 is the
/// orbit of 0.
pub fn cusps(n: u64) -> Vec<CuspRep> {
    assert!(n >= 1);
    let mut out = Vec::new();
    for k in arith::divisors(n) {
        let g = gcd(k, n / k);
        let width = n / (k * g);
        for a in 0..g {
            if gcd(a, g) != 1 {
                continue;
            }
            let mut p = a;
            while gcd(p, k) != 1 {
                p += g;
            }
            out.push(CuspRep { p, q: k, k, width });
        }
    }
    out.sort_by_key(|c| (c.k, c.p));
    out
}

// ---------------------------------------------------------------------------
// Divisors
// ---------------------------------------------------------------------------

/// A point of X_0(N) as far as divisors care: a cusp representative, or an
/// opaque label for a union of elliptic/interior orbits whose individual
/// multiplicities are not resolved.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Point {
    Cusp { p: u64, q: u64 },
    Elliptic(String),
}

impl Point {
    pub fn label(&self) -> String {
        match self {
            Point::Cusp { p, q } => format!("{}/{}", p, q),
            Point::Elliptic(s) => s.clone(),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A divisor with exact rational multiplicities and finite support.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DivisorQ {
    support: BTreeMap<Point, BigRational>,
}

impl DivisorQ {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the multiplicity at a point (zero removes it from the support).
    pub fn set(&mut self, point: Point, value: BigRational) {
        if value.is_zero() {
            self.support.remove(&point);
        } else {
            self.support.insert(point, value);
        }
    }

    /// Multiplicity at a point (zero off the support).
    pub fn get(&self, point: &Point) -> BigRational {
        self.support.get(point).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &BigRational)> {
        self.support.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.support.keys()
    }

    /// Exact total degree Σ multiplicities.
    pub fn degree(&self) -> BigRational {
        self.support.values().fold(BigRational::zero(), |acc, v| acc + v)
    }

    pub fn is_integral(&self) -> bool {
        self.support.values().all(|v| v.denom().is_one())
    }

    pub fn is_effective(&self) -> bool {
        self.support.values().all(|v| !v.is_negative())
    }

    /// True when the supports share no point.
    pub fn support_disjoint(&self, other: &DivisorQ) -> bool {
        self.support.keys().all(|p| !other.support.contains_key(p))
    }

    /// JSON as a sorted array of {label, num, den}.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.support
                .iter()
                .map(|(p, v)| {
                    serde_json::json!({
                        "label": p.label(),
                        "num": v.numer().to_string(),
                        "den": v.denom().to_string(),
                    })
                })
                .collect(),
        )
    }
}

/// True when weight-m forms have integral elliptic corrections at both
/// e = 2 and e = 3 orbits (their local contributions m(e−1)/(2e) are whole),
/// which holds exactly when 12 | m. The divisor constructors below only
/// support those weights.
fn elliptic_corrections_integral(m: u64) -> bool {
    (m * (2 - 1)) % (2 * 2) == 0 && (m * (3 - 1)) % (2 * 3) == 0
}

/// div(Δ) on X_0(N): multiplicity (N/k)/(k, N/k) at each class-k cusp.
pub fn divisor_delta(n: u64) -> DivisorQ {
    assert!(n >= 1);
    assert!(elliptic_corrections_integral(12));
    let mut d = DivisorQ::new();
    for c in cusps(n) {
        let g = gcd(c.k, n / c.k);
        d.set(
            Point::Cusp { p: c.p, q: c.q },
            BigRational::from_integer(BigInt::from((n / c.k) / g)),
        );
    }
    d
}

/// div(Δ(N·)) on X_0(N): multiplicity k/(k, N/k) at each class-k cusp.
pub fn divisor_delta_dilated(n: u64) -> DivisorQ {
    assert!(n >= 1);
    assert!(elliptic_corrections_integral(12));
    let mut d = DivisorQ::new();
    for c in cusps(n) {
        let g = gcd(c.k, n / c.k);
        d.set(
            Point::Cusp { p: c.p, q: c.q },
            BigRational::from_integer(BigInt::from(c.k / g)),
        );
    }
    d
}

/// div(E4³) on X_0(N): supported away from the cusps, on the orbits above
/// j = 0 (the SL2(Z)-orbit of ρ = (1+√−3)/2). The individual multiplicities
/// are deliberately not resolved — only the total degree ψ(N) and the
/// disjointness from every cuspidal divisor are meaningful, so the whole
/// elliptic part is a single opaque entry.
pub fn divisor_e4_cubed(n: u64) -> DivisorQ {
    assert!(n >= 1);
    assert!(elliptic_corrections_integral(12));
    let mut d = DivisorQ::new();
    d.set(
        Point::Elliptic("rho-orbits".into()),
        BigRational::from_integer(BigInt::from(arith::psi(n))),
    );
    d
}

/// Σ_a min(c_{Δ(N·)Δ}(a), c_{E4³Δ(N·)}(a), c_{E4³(N·)Δ}(a)) over cusps a,
/// where c_f counts cusp multiplicities with 1 subtracted at every cusp:
/// in closed form Σ_{k|N} φ((k, N/k))·min(k, N/k)/(k, N/k) − ν∞(N).
pub fn min_sum_weight24_triple(n: u64) -> u64 {
    assert!(n >= 2);
    let mut sum = 0u64;
    for k in arith::divisors(n) {
        let g = gcd(k, n / k);
        sum += euler_phi(g) * (k.min(n / k) / g);
    }
    sum - arith::nu_inf(n)
}

// ---------------------------------------------------------------------------
// The triples fed to implicitization
// ---------------------------------------------------------------------------

/// (Δ, E4³, αΔ(Nz) + βE4³(Nz)): three weight-12 forms on Γ0(N), each with
/// series precision exactly `prec`.
pub fn ab_combination(n: u64, a: i64, b: i64, prec: i64) -> (ModularForm, ModularForm, ModularForm) {
    assert!(n >= 2);
    assert!(prec >= 2);
    let base_prec = (prec - 1).div_euclid(n as i64) + 2;
    let d = delta(prec.max(base_prec));
    let e = e4_cubed(prec.max(base_prec));
    let h = ModularForm::linear_combination(
        &BigInt::from(a),
        &d.dilate(n),
        &BigInt::from(b),
        &e.dilate(n),
    );
    (d.truncate(prec), e.truncate(prec), h.truncate(prec))
}

/// (Δ(Nz)·Δ, E4³·Δ(Nz), E4³(Nz)·Δ): three weight-24 forms on Γ0(N), each
/// with series precision exactly `prec`. Projectively these coordinates
/// realize z ↦ (1 : j(z) : j(Nz)).
pub fn weight24_triple(n: u64, prec: i64) -> (ModularForm, ModularForm, ModularForm) {
    assert!(n >= 2);
    assert!(prec >= 2);
    let base_prec = prec + n as i64 + 2;
    let d = delta(base_prec);
    let e = e4_cubed(base_prec);
    let dn = d.dilate(n);
    let en = e.dilate(n);
    let f = dn.product(&d).truncate(prec);
    let g = e.product(&dn).truncate(prec);
    let h = en.product(&d).truncate(prec);
    (f, g, h)
}

/// The 4×4 coefficient matrix of {Δ, E4³, Δ(Nz), E4³(Nz)} on the exponents
/// {0, 1, 2, N} (N ≥ 3) or {0, 1, 2, 3} (N = 2) — the exponent N is needed
/// so the dilated cusp form contributes its leading coefficient.
pub fn independence_matrix(n: u64) -> crate::linalg::IntMatrix {
    assert!(n >= 2);
    let exps: Vec<i64> = if n == 2 { vec![0, 1, 2, 3] } else { vec![0, 1, 2, n as i64] };
    let prec = n as i64 + 2;
    let d = delta(prec);
    let e = e4_cubed(prec);
    let rows = [d.series.clone(), e.series.clone(), d.series.dilate(n), e.series.dilate(n)]
        .iter()
        .map(|s| {
            exps.iter()
                .map(|&x| {
                    let c = s.coeff(x);
                    assert!(c.denom().is_one());
                    c.numer().clone()
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>();
    crate::linalg::IntMatrix::from_rows(rows)
}

/// True when Δ, E4³, Δ(Nz), E4³(Nz) are linearly independent over Q,
/// certified by full rank of `independence_matrix`.
pub fn quadruple_is_independent(n: u64) -> bool {
    independence_matrix(n).rank() == 4
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{genus, nu_inf, psi, total_degree_formula};
    use num_traits::ToPrimitive;
    use std::collections::{BTreeSet, HashMap, HashSet};

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    // -- Eisenstein series against direct divisor sums ----------------------

    fn sigma_naive(n: u64, k: u32) -> BigInt {
        let mut s = BigInt::zero();
        for d in 1..=n {
            if n % d == 0 {
                s += BigInt::from(d).pow(k);
            }
        }
        s
    }

    #[test]
    fn eisenstein_coefficients_match_divisor_sums() {
        let e4 = eisenstein_e4(30);
        let e6 = eisenstein_e6(30);
        assert!(e4.series.coeff(0).is_one());
        assert!(e6.series.coeff(0).is_one());
        assert_eq!(e4.series.coeff(1), rat(240));
        assert_eq!(e4.series.coeff(2), rat(2160)); // 240·σ3(2) = 240·9
        for n in 1..30u64 {
            assert_eq!(
                *e4.series.coeff(n as i64).numer(),
                sigma_naive(n, 3) * BigInt::from(240)
            );
            assert_eq!(
                *e6.series.coeff(n as i64).numer(),
                sigma_naive(n, 5) * BigInt::from(-504)
            );
        }
        assert_eq!((e4.weight, e4.level), (4, 1));
    }

    // -- Δ against the η(q)^24 product expansion ----------------------------

    /// q·∏_{n≥1} (1−qⁿ)^24 truncated at q^prec, by direct polynomial
    /// multiplication with binomial expansion of each factor.
    fn delta_by_eta_product(prec: usize) -> Vec<BigInt> {
        let mut poly = vec![BigInt::zero(); prec];
        poly[0] = BigInt::one();
        // binomials C(24, j)·(−1)^j
        let mut binom = vec![BigInt::zero(); 25];
        binom[0] = BigInt::one();
        for j in 1..=24usize {
            binom[j] = &binom[j - 1] * BigInt::from(24 - j as i64 + 1) / BigInt::from(j as i64);
        }
        for n in 1..prec {
            let mut next = vec![BigInt::zero(); prec];
            for (e, c) in poly.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for j in 0..=24usize {
                    let exp = e + n * j;
                    if exp >= prec {
                        break;
                    }
                    let term = if j % 2 == 0 { c * &binom[j] } else { -(c * &binom[j]) };
                    next[exp] += term;
                }
            }
            poly = next;
        }
        // shift by q
        let mut out = vec![BigInt::zero(); prec];
        for i in 1..prec {
            out[i] = poly[i - 1].clone();
        }
        out
    }

    #[test]
    fn delta_matches_eta_product_and_known_prefix() {
        let d = delta(40);
        assert_eq!(d.series.val(), 1);
        assert_eq!(d.series.coeff(0), rat(0));
        assert_eq!(d.series.coeff(1), rat(1));
        assert_eq!(d.series.coeff(2), rat(-24));
        assert_eq!(d.series.coeff(3), rat(252));
        assert_eq!(d.series.coeff(5), rat(4830));
        let eta = delta_by_eta_product(40);
        for n in 0..40 {
            assert_eq!(*d.series.coeff(n as i64).numer(), eta[n], "τ mismatch at q^{n}");
        }
    }

    // -- E4³ against a hand-rolled integer cube -----------------------------

    #[test]
    fn e4_cubed_matches_direct_convolution() {
        let prec = 20usize;
        let mut e4 = vec![BigInt::zero(); prec];
        e4[0] = BigInt::one();
        for n in 1..prec {
            e4[n] = sigma_naive(n as u64, 3) * BigInt::from(240);
        }
        let mut cube = vec![BigInt::zero(); prec];
        for a in 0..prec {
            for b in 0..prec - a {
                for c in 0..prec - a - b {
                    cube[a + b + c] += &e4[a] * &e4[b] * &e4[c];
                }
            }
        }
        let e = e4_cubed(prec as i64);
        for n in 0..prec {
            assert_eq!(*e.series.coeff(n as i64).numer(), cube[n]);
        }
        assert_eq!(cube[1], BigInt::from(720));
        assert_eq!(cube[2], BigInt::from(179280));
        assert_eq!((e.weight, e.level), (12, 1));
    }

    // -- j against a hand-rolled long division ------------------------------

    #[test]
    fn j_invariant_matches_manual_division() {
        let j = j_invariant(6);
        assert_eq!(j.val(), -1);
        assert!(j.coeff(-1).is_one());
        assert_eq!(j.coeff(0), rat(744));
        assert_eq!(j.coeff(1), rat(196884));
        assert_eq!(j.prec(), 6);

        // independent long division of E4³ by Δ over Q
        let prec = 10usize;
        let e = e4_cubed(prec as i64);
        let d = delta(prec as i64);
        let num: Vec<BigRational> = (0..prec).map(|n| e.series.coeff(n as i64)).collect();
        let den: Vec<BigRational> = (0..prec).map(|n| d.series.coeff(n as i64)).collect();
        // divide: result exponents -1 .. prec-2; den[1] = 1 is the lead
        let mut rem = num;
        let mut quot = Vec::new();
        for step in 0..prec - 1 {
            let c = rem[step].clone(); // coefficient of q^step, matched by den lead q^1
            quot.push(c.clone());
            for i in 0..prec - step - 1 {
                let t = &c * &den[i + 1];
                rem[step + i] = &rem[step + i] - &t;
            }
        }
        for (i, qc) in quot.iter().enumerate().take(7) {
            assert_eq!(j.coeff(i as i64 - 1), *qc, "j coefficient mismatch at q^{}", i as i64 - 1);
        }
    }

    // -- Cusps against the P¹(Z/N) orbit oracle -----------------------------

    /// Canonical form of (c:d) in P¹(Z/N): the lexicographically least
    /// representative under multiplication by units of Z/N.
    fn p1_canonical(c: u64, d: u64, n: u64) -> (u64, u64) {
        let mut best = (u64::MAX, u64::MAX);
        for u in 1..=n {
            if gcd(u, n) != 1 {
                continue;
            }
            let cand = ((u * c) % n, (u * d) % n);
            if cand < best {
                best = cand;
            }
        }
        best
    }

    fn p1_points(n: u64) -> BTreeSet<(u64, u64)> {
        let mut pts = BTreeSet::new();
        for c in 0..n {
            for d in 0..n {
                if gcd(gcd(c, d), n) == 1 {
                    pts.insert(p1_canonical(c, d, n));
                }
            }
        }
        pts
    }

    /// Orbits of T: (c:d) ↦ (c:c+d) on P¹(Z/N); returns canonical-point →
    /// (orbit id, orbit size).
    fn t_orbits(n: u64) -> HashMap<(u64, u64), (usize, u64)> {
        let pts = p1_points(n);
        let mut seen: HashMap<(u64, u64), (usize, u64)> = HashMap::new();
        let mut orbit_id = 0usize;
        for &(c, d) in &pts {
            if seen.contains_key(&(c, d)) {
                continue;
            }
            let mut orbit = Vec::new();
            let mut cur = (c, d);
            loop {
                orbit.push(cur);
                cur = p1_canonical(cur.0, (cur.0 + cur.1) % n, n);
                if cur == (c, d) {
                    break;
                }
            }
            let size = orbit.len() as u64;
            for pt in orbit {
                seen.insert(pt, (orbit_id, size));
            }
            orbit_id += 1;
        }
        seen
    }

    /// The P¹(Z/N) point of the cusp p/q: bottom row (q : d) of a matrix
    /// [[p, b], [q, d]] of determinant 1.
    fn cusp_to_p1(c: &CuspRep, n: u64) -> (u64, u64) {
        let (p, q) = (c.p as i64, c.q as i64);
        // solve p·d − b·q = 1
        let (mut old_r, mut r) = (p, q);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let quo = old_r.div_euclid(r);
            old_r -= quo * r;
            std::mem::swap(&mut old_r, &mut r);
            old_s -= quo * s;
            std::mem::swap(&mut old_s, &mut s);
        }
        assert_eq!(old_r, 1, "p, q not coprime");
        // old_s·p ≡ 1 (mod q), so d = old_s works
        let d = old_s.rem_euclid(n as i64) as u64;
        p1_canonical(c.q % n, d, n)
    }

    #[test]
    fn cusps_match_p1_orbit_oracle() {
        for n in 2..=40u64 {
            let orbits = t_orbits(n);
            let reps = cusps(n);
            let orbit_count = orbits.values().map(|&(id, _)| id).collect::<HashSet<_>>().len();
            assert_eq!(reps.len(), orbit_count, "ν∞ mismatch at N={n}");
            assert_eq!(reps.len() as u64, nu_inf(n), "ν∞ formula mismatch at N={n}");
            // |P¹(Z/N)| = ψ(N) and Σ orbit sizes = ψ(N)
            assert_eq!(p1_points(n).len() as u64, psi(n));
            let mut seen_orbits = HashSet::new();
            for rep in &reps {
                let pt = cusp_to_p1(rep, n);
                let (id, size) = orbits[&pt];
                assert!(seen_orbits.insert(id), "two reps hit one orbit at N={n}");
                assert_eq!(size, rep.width, "width mismatch for {}/{} at N={n}", rep.p, rep.q);
            }
        }
    }

    #[test]
    fn cusp_counts_and_widths() {
        assert_eq!(cusps(1).len(), 1);
        assert_eq!(cusps(11).len(), 2);
        let c4 = cusps(4);
        assert_eq!(c4.iter().map(|c| c.k).collect::<Vec<_>>(), vec![1, 2, 4]);
        assert_eq!(c4.iter().map(|c| c.width).collect::<Vec<_>>(), vec![4, 1, 1]);
        for n in 1..=500u64 {
            let reps = cusps(n);
            assert_eq!(reps.len() as u64, nu_inf(n));
            assert_eq!(reps.iter().map(|c| c.width).sum::<u64>(), psi(n), "Σ widths ≠ ψ at N={n}");
            // per-class count is φ((k, N/k)); reps are coprime fractions
            let mut by_k: HashMap<u64, u64> = HashMap::new();
            for c in &reps {
                assert_eq!(gcd(c.p, c.q), 1);
                assert_eq!(gcd(c.q, n), c.k);
                assert_eq!(c.width, n / (c.k * gcd(c.k, n / c.k)));
                *by_k.entry(c.k).or_insert(0) += 1;
            }
            for (k, count) in by_k {
                assert_eq!(count, euler_phi(gcd(k, n / k)));
            }
        }
    }

    // -- Divisors against the Ligozat order formula -------------------------

    /// Order of η(δz)^24 at a class-k cusp of X_0(N) (Ligozat):
    /// N·(k,δ)²/((k,N/k)·k·δ).
    fn ligozat_order(n: u64, delta_div: u64, k: u64) -> BigRational {
        let g = gcd(k, n / k);
        BigRational::new(
            BigInt::from(n * gcd(k, delta_div) * gcd(k, delta_div)),
            BigInt::from(g * k * delta_div),
        )
    }

    #[test]
    fn divisors_match_ligozat_and_have_degree_psi() {
        for n in 1..=200u64 {
            let dd = divisor_delta(n);
            let ddn = divisor_delta_dilated(n);
            for c in cusps(n) {
                let pt = Point::Cusp { p: c.p, q: c.q };
                assert_eq!(dd.get(&pt), ligozat_order(n, 1, c.k), "div Δ at N={n}, k={}", c.k);
                assert_eq!(ddn.get(&pt), ligozat_order(n, n, c.k), "div Δ(N·) at N={n}, k={}", c.k);
            }
            assert!(dd.is_integral() && dd.is_effective());
            assert!(ddn.is_integral() && ddn.is_effective());
        }
        for n in 1..=500u64 {
            let want = BigRational::from_integer(BigInt::from(psi(n)));
            assert_eq!(divisor_delta(n).degree(), want);
            assert_eq!(divisor_delta_dilated(n).degree(), want);
            assert_eq!(divisor_e4_cubed(n).degree(), want);
        }
    }

    #[test]
    fn divisor_values_at_small_levels() {
        // N=1: single cusp with multiplicity 1
        let d1 = divisor_delta(1);
        assert_eq!(d1.degree(), rat(1));
        assert_eq!(d1.iter().count(), 1);
        // N=2: div Δ = {k=1: 2, k=2: 1}; div Δ(2·) = {k=1: 1, k=2: 2}
        let d2 = divisor_delta(2);
        assert_eq!(d2.get(&Point::Cusp { p: 0, q: 1 }), rat(2));
        assert_eq!(d2.get(&Point::Cusp { p: 1, q: 2 }), rat(1));
        let d2n = divisor_delta_dilated(2);
        assert_eq!(d2n.get(&Point::Cusp { p: 0, q: 1 }), rat(1));
        assert_eq!(d2n.get(&Point::Cusp { p: 1, q: 2 }), rat(2));
        // N=4: div Δ = {4, 1, 1}; div Δ(4·) = {1, 1, 4}
        let d4 = divisor_delta(4);
        assert_eq!(d4.get(&Point::Cusp { p: 0, q: 1 }), rat(4));
        assert_eq!(d4.get(&Point::Cusp { p: 1, q: 2 }), rat(1));
        assert_eq!(d4.get(&Point::Cusp { p: 1, q: 4 }), rat(1));
        let d4n = divisor_delta_dilated(4);
        assert_eq!(d4n.get(&Point::Cusp { p: 0, q: 1 }), rat(1));
        assert_eq!(d4n.get(&Point::Cusp { p: 1, q: 2 }), rat(1));
        assert_eq!(d4n.get(&Point::Cusp { p: 1, q: 4 }), rat(4));
        // the multiplicity at the ∞-class (k = N) matches the q-valuation
        for n in 2..=50u64 {
            let inf = cusps(n).into_iter().find(|c| c.k == n).unwrap();
            let pt = Point::Cusp { p: inf.p, q: inf.q };
            assert_eq!(divisor_delta(n).get(&pt), rat(1), "val_∞ Δ at N={n}");
            assert_eq!(divisor_delta_dilated(n).get(&pt), rat(n as i64), "val_∞ Δ(N·) at N={n}");
        }
    }

    #[test]
    fn e4_cubed_divisor_is_disjoint_from_cusps() {
        for n in [1u64, 2, 6, 11, 36, 120] {
            let ell = divisor_e4_cubed(n);
            assert!(ell.support_disjoint(&divisor_delta(n)));
            assert!(ell.support_disjoint(&divisor_delta_dilated(n)));
            assert!(divisor_delta(n).support_disjoint(&ell));
        }
    }

    // -- The min-sum of the weight-24 triple --------------------------------

    /// Recomputes the min-sum from the three explicit weight-24 cuspidal
    /// divisors: Σ_cusps (min of the three multiplicities − 1).
    fn min_sum_from_divisors(n: u64) -> BigRational {
        let dd = divisor_delta(n);
        let ddn = divisor_delta_dilated(n);
        // cusp parts: Δ(N·)Δ → dd + ddn; E4³Δ(N·) → ddn; E4³(N·)Δ → dd
        let mut sum = BigRational::zero();
        for c in cusps(n) {
            let pt = Point::Cusp { p: c.p, q: c.q };
            let m1 = dd.get(&pt) + ddn.get(&pt);
            let m2 = ddn.get(&pt);
            let m3 = dd.get(&pt);
            let min = m1.min(m2).min(m3);
            sum += min - BigRational::one();
        }
        sum
    }

    #[test]
    fn min_sum_matches_divisor_computation_and_closed_loop() {
        assert_eq!(min_sum_weight24_triple(2), 0);
        assert_eq!(min_sum_weight24_triple(4), 0);
        for n in 2..=500u64 {
            let v = min_sum_weight24_triple(n);
            assert_eq!(
                BigRational::from_integer(BigInt::from(v)),
                min_sum_from_divisors(n),
                "min-sum mismatch at N={n}"
            );
            // deg Φ_N = dim S_24(Γ0(N)) + g − 1 − min-sum, and the closed
            // form on the right is total_degree_formula
            let (dim_s24, _) = crate::arith::dim_spaces(n, 24);
            let lhs = dim_s24 as i64 + genus(n) as i64 - 1 - v as i64;
            assert_eq!(lhs, total_degree_formula(n) as i64, "degree loop broken at N={n}");
        }
        // N=9 spot value from the closed loop
        let v9 = min_sum_weight24_triple(9);
        let (s24, _) = crate::arith::dim_spaces(9, 24);
        assert_eq!(s24 as i64 + genus(9) as i64 - 1 - v9 as i64, total_degree_formula(9) as i64);
    }

    // -- Independence and the triple constructors ---------------------------

    #[test]
    fn quadruple_independent_for_small_levels() {
        for n in 2..=50u64 {
            assert!(quadruple_is_independent(n), "dependent quadruple at N={n}");
        }
        assert_eq!(independence_matrix(5).rank(), 4);
    }

    #[test]
    fn ab_combination_shapes() {
        let (f, g, h) = ab_combination(2, 3, -1, 25);
        assert_eq!((f.weight, g.weight, h.weight), (12, 12, 12));
        assert_eq!((f.level, g.level, h.level), (1, 1, 2));
        assert_eq!(f.series.prec(), 25);
        assert_eq!(g.series.prec(), 25);
        assert_eq!(h.series.prec(), 25);
        // h = 3Δ(2z) − E4³(2z) = −1 + 3q² − 720q² ... check q⁰ and q²
        assert_eq!(h.series.coeff(0), rat(-1));
        assert_eq!(h.series.coeff(2), rat(3 - 720));
        assert_eq!(h.label, "3*Delta(2z)-1*E4^3(2z)");
    }

    #[test]
    fn weight24_triple_shapes() {
        let (f, g, h) = weight24_triple(3, 20);
        assert_eq!((f.weight, g.weight, h.weight), (24, 24, 24));
        assert_eq!((f.level, g.level, h.level), (3, 3, 3));
        for s in [&f, &g, &h] {
            assert_eq!(s.series.prec(), 20);
        }
        // valuations: Δ(3z)Δ starts at q⁴, E4³Δ(3z) at q³, E4³(3z)Δ at q¹
        assert_eq!(f.series.val(), 4);
        assert_eq!(g.series.val(), 3);
        assert_eq!(h.series.val(), 1);
        assert_eq!(f.label, "Delta(3z)*Delta");
        // products track weights: (E4³·Δ)(q) coefficient sanity via j·Δ² = E4³·Δ
        let jd = &j_invariant(10) * &delta(12).series.pow(2);
        let ed = &e4_cubed(12).series * &delta(12).series;
        let cap = jd.prec().min(ed.prec());
        assert_eq!(jd.truncate(cap), ed.truncate(cap));
    }

    #[test]
    fn divisor_json_is_sorted_and_exact() {
        let d = divisor_delta(2);
        let v = d.to_json();
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 2);
        assert_eq!(arr[0]["label"], "0/1");
        assert_eq!(arr[0]["num"], "2");
        assert_eq!(arr[0]["den"], "1");
        assert_eq!(divisor_delta(2).degree().to_integer().to_i64(), Some(3));
    }
}
