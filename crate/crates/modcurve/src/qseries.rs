//! Truncated Laurent series over exact rationals.
//!
//! The computational substrate for all q-expansions: a series is a dense
//! coefficient window
//!
//! ```text
//! f = c_0 q^val + c_1 q^(val+1) + ... + c_(L-1) q^(prec-1) + O(q^prec)
//! ```
//!
//! with `val` the lowest stored exponent (possibly negative), `prec` the
//! exclusive upper bound on *known* exponents, and exact `BigRational`
//! coefficients. Invariants maintained by every constructor and operation:
//!
//! - `coeffs.len() == prec - val`;
//! - the leading stored coefficient is nonzero, except for the canonical
//!   zero-to-precision series, which has empty `coeffs` and `val == prec`
//!   (the precision of a zero series is still meaningful data: it records
//!   *to what order* the series is known to vanish);
//! - asking for a coefficient at exponent `>= prec` is a hard panic, never a
//!   silent zero — precision contracts are part of every result.
//!
//! Precision bookkeeping follows the usual truncated-ring rules:
//!
//! - `add`: prec = min(prec_a, prec_b)
//! - `mul`: val = val_a + val_b, prec = min(prec_a + val_b, prec_b + val_a)
//! - `div`: val = val_a − val_b, prec = min(prec_a − val_b, prec_b − 2 val_b + val_a)
//! - `dilate` by N (q ↦ q^N): val = N·val, prec = N·(prec−1) + 1
//!
//! Multiplication clears denominators and convolves integer vectors
//! (Karatsuba above a length threshold); the all-integral case — which is
//! every series of interest here except intermediate rational work — never
//! touches rational normalization in the inner loop.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Length at which integer convolutions switch from (truncated) schoolbook
/// to Karatsuba.
const KARATSUBA_THRESHOLD: usize = 64;

/// A truncated Laurent series with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    val: i64,
    prec: i64,
    coeffs: Vec<BigRational>,
}

impl LaurentSeries {
    /// Builds a series from the coefficient of `q^val` onward.
    ///
    /// `prec` is implied as `val + coeffs.len()`. Leading zeros are trimmed
    /// (raising `val`); a window of all zeros normalizes to the canonical
    /// zero-to-precision form.
    pub fn from_coeffs(val: i64, coeffs: Vec<BigRational>) -> Self {
        let prec = val + coeffs.len() as i64;
        let mut s = LaurentSeries { val, prec, coeffs };
        s.normalize();
        s
    }

    /// Same, from integer coefficients.
    pub fn from_int_coeffs(val: i64, coeffs: Vec<BigInt>) -> Self {
        Self::from_coeffs(
            val,
            coeffs.into_iter().map(BigRational::from_integer).collect(),
        )
    }

    /// The zero series, known to vanish to order `prec`.
    pub fn zero(prec: i64) -> Self {
        LaurentSeries {
            val: prec,
            prec,
            coeffs: Vec::new(),
        }
    }

    /// The constant 1 with known exponents `0..prec`.
    pub fn one(prec: i64) -> Self {
        assert!(prec > 0, "the unit series needs prec >= 1");
        let mut coeffs = vec![BigRational::zero(); prec as usize];
        coeffs[0] = BigRational::one();
        LaurentSeries {
            val: 0,
            prec,
            coeffs,
        }
    }

    /// The monomial `c·q^exp` with known exponents `exp..prec`.
    pub fn monomial(exp: i64, c: BigRational, prec: i64) -> Self {
        assert!(prec > exp, "monomial precision must exceed its exponent");
        let mut coeffs = vec![BigRational::zero(); (prec - exp) as usize];
        coeffs[0] = c;
        Self::from_coeffs(exp, coeffs)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(0) => {}
            Some(k) => {
                self.coeffs.drain(..k);
                self.val += k as i64;
            }
            None => {
                self.coeffs.clear();
                self.val = self.prec;
            }
        }
        debug_assert_eq!(self.coeffs.len() as i64, self.prec - self.val);
    }

    /// Lowest known exponent (equals `prec` for a zero-to-precision series).
    pub fn val(&self) -> i64 {
        self.val
    }

    /// Exclusive upper bound on known exponents.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// True iff the series vanishes to its stated precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The coefficient of `q^e`.
    ///
    /// Zero for `e < val`; panics for `e >= prec` — the coefficient there is
    /// simply not known, and pretending it is zero would corrupt downstream
    /// precision claims.
    pub fn coeff(&self, e: i64) -> BigRational {
        assert!(
            e < self.prec,
            "coefficient of q^{e} requested, but series is only known to O(q^{})",
            self.prec
        );
        if e < self.val {
            BigRational::zero()
        } else {
            self.coeffs[(e - self.val) as usize].clone()
        }
    }

    /// Coefficients for the exponent window `lo..hi` (clones; zero-padded
    /// below `val`). Panics if `hi > prec`.
    pub fn coeff_window(&self, lo: i64, hi: i64) -> Vec<BigRational> {
        assert!(hi <= self.prec, "window end {hi} beyond precision {}", self.prec);
        (lo..hi).map(|e| {
            if e < self.val {
                BigRational::zero()
            } else {
                self.coeffs[(e - self.val) as usize].clone()
            }
        })
        .collect()
    }

    /// Lowers the precision to `new_prec` (no-op if already lower).
    pub fn truncate(&self, new_prec: i64) -> Self {
        if new_prec >= self.prec {
            return self.clone();
        }
        if new_prec <= self.val {
            return LaurentSeries::zero(new_prec);
        }
        let keep = (new_prec - self.val) as usize;
        let mut s = LaurentSeries {
            val: self.val,
            prec: new_prec,
            coeffs: self.coeffs[..keep].to_vec(),
        };
        s.normalize();
        s
    }

    /// True iff every stored coefficient has denominator 1.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    /// Multiplies every coefficient by the nonzero rational `c`.
    pub fn scale(&self, c: &BigRational) -> Self {
        assert!(!c.is_zero(), "scaling by zero discards precision structure; use zero()");
        LaurentSeries {
            val: self.val,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Substitutes q ↦ q^n.
    ///
    /// Exponent e becomes n·e, so val ↦ n·val, and the highest known
    /// exponent prec−1 becomes n·(prec−1): prec ↦ n·(prec−1)+1.
    pub fn dilate(&self, n: u64) -> Self {
        assert!(n >= 1, "dilation factor must be >= 1");
        let n_i = n as i64;
        if n == 1 {
            return self.clone();
        }
        if self.is_zero() {
            return LaurentSeries::zero(n_i * (self.prec - 1) + 1);
        }
        let new_val = n_i * self.val;
        let new_prec = n_i * (self.prec - 1) + 1;
        let mut coeffs = vec![BigRational::zero(); (new_prec - new_val) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[i * n as usize] = c.clone();
            }
        }
        LaurentSeries {
            val: new_val,
            prec: new_prec,
            coeffs,
        }
    }

    /// Truncated product: like `a * b` but with the result precision capped
    /// at `prec_cap` so no work is spent on coefficients beyond the cap.
    pub fn mul_to_prec(&self, other: &Self, prec_cap: i64) -> Self {
        mul_impl(self, other, Some(prec_cap))
    }

    /// `self^e` by binary exponentiation.
    ///
    /// `a^0` is the unit with the *relative* precision of `a` (prec − val
    /// known coefficients), which is what repeated multiplication preserves.
    pub fn pow(&self, e: u64) -> Self {
        let rel = self.prec - self.val;
        if e == 0 {
            return LaurentSeries::one(rel.max(1));
        }
        let mut base = self.clone();
        let mut acc: Option<LaurentSeries> = None;
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = &base * &base;
        }
        acc.unwrap()
    }

    /// Division that reports failure instead of panicking when the divisor
    /// is zero to its precision.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        Some(div_impl(self, other))
    }

    /// Serializes as `{"val", "prec", "coeffs": ["n" or "n/d", ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<String> = self.coeffs.iter().map(rational_string).collect();
        serde_json::json!({
            "val": self.val,
            "prec": self.prec,
            "coeffs": coeffs,
        })
    }
}

/// `n` for integers, `n/d` otherwise.
pub fn rational_string(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl std::fmt::Display for LaurentSeries {
    /// Human-readable form, e.g. `q^-1 + 744 + 196884*q + O(q^2)`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.val + i as i64;
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let mag_one = mag.is_one();
            match (e, mag_one) {
                (0, _) => write!(f, "{}", rational_string(&mag))?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{}*q", rational_string(&mag))?,
                (_, true) => write!(f, "q^{e}")?,
                (_, false) => write!(f, "{}*q^{e}", rational_string(&mag))?,
            }
        }
        if first {
            write!(f, "O(q^{})", self.prec)
        } else {
            write!(f, " + O(q^{})", self.prec)
        }
    }
}

impl std::ops::Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        LaurentSeries {
            val: self.val,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl std::ops::Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, other: &LaurentSeries) -> LaurentSeries {
        let prec = self.prec.min(other.prec);
        if self.is_zero() {
            return other.truncate(prec);
        }
        if other.is_zero() {
            return self.truncate(prec);
        }
        let val = self.val.min(other.val);
        if val >= prec {
            return LaurentSeries::zero(prec);
        }
        let len = (prec - val) as usize;
        let mut coeffs = vec![BigRational::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.val + i as i64;
            if e < prec {
                coeffs[(e - val) as usize] = c.clone();
            }
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            let e = other.val + i as i64;
            if e < prec && !c.is_zero() {
                let slot = &mut coeffs[(e - val) as usize];
                *slot = &*slot + c;
            }
        }
        LaurentSeries::from_coeffs(val, coeffs).with_prec_floor(prec)
    }
}

impl std::ops::Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, other: &LaurentSeries) -> LaurentSeries {
        self + &(-other)
    }
}

impl std::ops::Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, other: &LaurentSeries) -> LaurentSeries {
        mul_impl(self, other, None)
    }
}

impl std::ops::Div for &LaurentSeries {
    type Output = LaurentSeries;
    /// Panics if `other` is zero to its precision.
    fn div(self, other: &LaurentSeries) -> LaurentSeries {
        self.checked_div(other)
            .expect("division by a series that is zero to its precision")
    }
}

impl LaurentSeries {
    /// Restores an exact precision bound after from_coeffs (which infers prec
    /// from the window length and may have seen an all-zero window).
    fn with_prec_floor(mut self, prec: i64) -> Self {
        if self.is_zero() {
            self.val = prec;
            self.prec = prec;
        }
        self
    }
}

fn mul_impl(a: &LaurentSeries, b: &LaurentSeries, prec_cap: Option<i64>) -> LaurentSeries {
    let mut prec = (a.prec + b.val).min(b.prec + a.val);
    if let Some(cap) = prec_cap {
        prec = prec.min(cap);
    }
    if a.is_zero() || b.is_zero() {
        return LaurentSeries::zero(prec);
    }
    let val = a.val + b.val;
    if prec <= val {
        return LaurentSeries::zero(prec);
    }
    let out_len = (prec - val) as usize;

    // Clear denominators once per operand; the integer convolution then runs
    // gcd-free, and each output coefficient is normalized exactly once.
    let (na, da) = clear_denominators(&a.coeffs);
    let (nb, db) = clear_denominators(&b.coeffs);
    let conv = int_convolve(&na, &nb, out_len);
    let den: BigInt = &da * &db;
    let coeffs = if den.is_one() {
        conv.into_iter().map(BigRational::from_integer).collect()
    } else {
        conv.into_iter()
            .map(|n| BigRational::new(n, den.clone()))
            .collect()
    };
    LaurentSeries::from_coeffs(val, coeffs).with_prec_floor(prec)
}

/// Laurent long division.
///
/// With b normalized so its leading coefficient b_0 (at exponent val_b) is
/// nonzero, the quotient coefficients solve c_k = (a_k − Σ_{i<k} c_i b_{k−i})/b_0
/// relative to the shifted exponents. The result precision is
/// min(prec_a − val_b, prec_b − 2·val_b + val_a): both operands' relative
/// precision limits the quotient's.
fn div_impl(a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
    debug_assert!(!b.is_zero());
    let val = a.val - b.val;
    let prec = (a.prec - b.val).min(b.prec - 2 * b.val + a.val);
    if a.is_zero() || prec <= val {
        return LaurentSeries::zero(prec);
    }
    let out_len = (prec - val) as usize;
    let (na, da) = clear_denominators(&a.coeffs);
    let (nb, db) = clear_denominators(&b.coeffs);

    // Integer fast path when the divisor's leading integer coefficient is ±1
    // (Δ and its powers, the only divisions on hot paths).
    if nb[0].magnitude().is_one() {
        let neg = nb[0].is_negative();
        let mut q: Vec<BigInt> = Vec::with_capacity(out_len);
        for k in 0..out_len {
            let mut acc = if k < na.len() { na[k].clone() } else { BigInt::zero() };
            for i in 0..k {
                if let Some(bc) = nb.get(k - i) {
                    if !bc.is_zero() && !q[i].is_zero() {
                        acc -= &q[i] * bc;
                    }
                }
            }
            q.push(if neg { -acc } else { acc });
        }
        // a/b = (na/da)/(nb/db) = (na/nb)·(db/da)
        let scale = BigRational::new(db, da);
        let coeffs = q
            .into_iter()
            .map(|n| BigRational::from_integer(n) * &scale)
            .collect();
        return LaurentSeries::from_coeffs(val, coeffs).with_prec_floor(prec);
    }

    // General rational long division.
    let b0 = BigRational::from_integer(nb[0].clone());
    let mut q: Vec<BigRational> = Vec::with_capacity(out_len);
    for k in 0..out_len {
        let mut acc = if k < na.len() {
            BigRational::from_integer(na[k].clone())
        } else {
            BigRational::zero()
        };
        for i in 0..k {
            if let Some(bc) = nb.get(k - i) {
                if !bc.is_zero() && !q[i].is_zero() {
                    acc -= &q[i] * &BigRational::from_integer(bc.clone());
                }
            }
        }
        q.push(acc / &b0);
    }
    let scale = BigRational::new(db, da);
    let coeffs = q.into_iter().map(|c| c * &scale).collect();
    LaurentSeries::from_coeffs(val, coeffs).with_prec_floor(prec)
}

/// Pulls out the lcm D of all denominators: returns (n_i, D) with c_i = n_i/D.
fn clear_denominators(coeffs: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let mut den = BigInt::one();
    for c in coeffs {
        if !c.denom().is_one() {
            den = den.lcm(c.denom());
        }
    }
    if den.is_one() {
        (coeffs.iter().map(|c| c.numer().clone()).collect(), den)
    } else {
        (
            coeffs
                .iter()
                .map(|c| c.numer() * (&den / c.denom()))
                .collect(),
            den,
        )
    }
}

/// Truncated integer convolution: the first `out_len` coefficients of a·b.
fn int_convolve(a: &[BigInt], b: &[BigInt], out_len: usize) -> Vec<BigInt> {
    // Full Karatsuba only pays when we want most of the full product;
    // otherwise the truncated schoolbook loop does strictly less work.
    let full = a.len() + b.len() - 1;
    if a.len().min(b.len()) >= KARATSUBA_THRESHOLD && 4 * out_len > 3 * full {
        let mut v = karatsuba(a, b);
        v.truncate(out_len);
        v.resize(out_len, BigInt::zero());
        return v;
    }
    let mut out = vec![BigInt::zero(); out_len];
    for (i, ai) in a.iter().enumerate() {
        if i >= out_len {
            break;
        }
        if ai.is_zero() {
            continue;
        }
        let jmax = (out_len - i).min(b.len());
        for (j, bj) in b.iter().enumerate().take(jmax) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn karatsuba(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let (la, lb) = (a.len(), b.len());
    if la.min(lb) < KARATSUBA_THRESHOLD {
        return int_convolve(a, b, la + lb - 1);
    }
    let m = la.max(lb) / 2;
    let (a0, a1) = (&a[..m.min(la)], a.get(m..).unwrap_or(&[]));
    let (b0, b1) = (&b[..m.min(lb)], b.get(m..).unwrap_or(&[]));
    let z0 = karatsuba_or_empty(a0, b0);
    let z2 = karatsuba_or_empty(a1, b1);
    let sa = vec_add(a0, a1);
    let sb = vec_add(b0, b1);
    let mut z1 = karatsuba_or_empty(&sa, &sb);
    sub_assign(&mut z1, &z0);
    sub_assign(&mut z1, &z2);
    let mut out = vec![BigInt::zero(); la + lb - 1];
    for (i, c) in z0.into_iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in z1.into_iter().enumerate() {
        if !c.is_zero() {
            out[i + m] += c;
        }
    }
    for (i, c) in z2.into_iter().enumerate() {
        if !c.is_zero() {
            out[i + 2 * m] += c;
        }
    }
    out
}

fn karatsuba_or_empty(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        Vec::new()
    } else {
        karatsuba(a, b)
    }
}

fn vec_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

fn sub_assign(a: &mut Vec<BigInt>, b: &[BigInt]) {
    if a.len() < b.len() {
        a.resize(b.len(), BigInt::zero());
    }
    for (i, c) in b.iter().enumerate() {
        a[i] -= c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(val: i64, coeffs: &[i64]) -> LaurentSeries {
        LaurentSeries::from_int_coeffs(val, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn add_cancellation_renormalizes_valuation() {
        // (q − 24q² + O(q³)) + (24q² + O(q³)) = q + O(q³)
        let a = s(1, &[1, -24]);
        let b = s(2, &[24]);
        let c = &a + &b;
        assert_eq!(c.val(), 1);
        assert_eq!(c.prec(), 3);
        assert_eq!(c.coeff(1), q(1, 1));
        assert_eq!(c.coeff(2), q(0, 1));
    }

    #[test]
    fn add_zero_is_identity_and_laurent_merge_works() {
        let a = s(1, &[1, -24, 252]);
        let z = LaurentSeries::zero(10);
        assert_eq!((&a + &z).coeff(3), q(252, 1));
        assert_eq!((&a + &z).prec(), 4); // min(4, 10)
        // (1 + O(q^5)) + (q^-1 + O(q^5)) = q^-1 + 1 + O(q^5)
        let one = LaurentSeries::one(5);
        let qi = LaurentSeries::monomial(-1, q(1, 1), 5);
        let m = &one + &qi;
        assert_eq!(m.val(), -1);
        assert_eq!(m.prec(), 5);
        assert_eq!(m.coeff(-1), q(1, 1));
        assert_eq!(m.coeff(0), q(1, 1));
    }

    #[test]
    fn mul_valuation_arithmetic() {
        // (q + O(q^4)) × (q^-1 + O(q^2)) = 1 + O(q^3)
        let a = LaurentSeries::monomial(1, q(1, 1), 4);
        let b = LaurentSeries::monomial(-1, q(1, 1), 2);
        let p = &a * &b;
        assert_eq!(p.val(), 0);
        assert_eq!(p.prec(), 3);
        assert_eq!(p.coeff(0), q(1, 1));
        // unit multiplication preserves the Δ prefix
        let d = s(1, &[1, -24, 252]);
        let u = LaurentSeries::one(10);
        assert_eq!(&d * &u, d);
    }

    #[test]
    fn mul_matches_direct_convolution_with_rationals() {
        let a = LaurentSeries::from_coeffs(0, vec![q(1, 2), q(1, 3), q(-2, 5)]);
        let b = LaurentSeries::from_coeffs(-1, vec![q(3, 1), q(0, 1), q(7, 2)]);
        let p = &a * &b;
        assert_eq!(p.val(), -1);
        // prec = min(3 + (−1), 2 + 0) = 2
        assert_eq!(p.prec(), 2);
        assert_eq!(p.coeff(-1), q(3, 2)); // (1/2)(3)
        assert_eq!(p.coeff(0), q(1, 1)); // (1/3)(3)
        assert_eq!(p.coeff(1), &(q(-2, 5) * q(3, 1)) + &(q(1, 2) * q(7, 2)));
    }

    #[test]
    fn div_inverts_mul_and_handles_monomials() {
        let a = s(0, &[2, 6, -4, 10, 8, -2, 12, 1]);
        let b = s(0, &[1, -3, 5, 7, -1, 2, 9, -6]);
        let c = &a / &b;
        let back = &c * &b;
        for e in 0..back.prec() {
            assert_eq!(back.coeff(e), a.coeff(e), "mismatch at q^{e}");
        }
        // q² / q = q
        let n = LaurentSeries::monomial(2, q(1, 1), 9);
        let d = LaurentSeries::monomial(1, q(1, 1), 9);
        let r = &n / &d;
        assert_eq!(r.val(), 1);
        assert_eq!(r.coeff(1), q(1, 1));
        // a / a = 1
        let aa = &a / &a;
        assert_eq!(aa.coeff(0), q(1, 1));
        assert!(aa.coeff_window(1, aa.prec()).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn div_general_rational_leading_coefficient() {
        let a = LaurentSeries::from_coeffs(0, vec![q(1, 1), q(2, 1), q(3, 1), q(4, 1)]);
        let b = LaurentSeries::from_coeffs(0, vec![q(2, 3), q(1, 5), q(-1, 2), q(1, 1)]);
        let c = &a / &b;
        let back = &c * &b;
        for e in 0..back.prec() {
            assert_eq!(back.coeff(e), a.coeff(e));
        }
    }

    #[test]
    #[should_panic(expected = "zero to its precision")]
    fn div_by_zero_series_panics() {
        let a = s(0, &[1, 2]);
        let z = LaurentSeries::zero(5);
        let _ = &a / &z;
    }

    #[test]
    fn dilate_spreads_exponents() {
        // dilate(Δ-prefix, 2) = q² − 24q⁴ + 252q⁶
        let d = s(1, &[1, -24, 252]);
        let d2 = d.dilate(2);
        assert_eq!(d2.val(), 2);
        assert_eq!(d2.prec(), 2 * (4 - 1) + 1);
        assert_eq!(d2.coeff(2), q(1, 1));
        assert_eq!(d2.coeff(3), q(0, 1));
        assert_eq!(d2.coeff(4), q(-24, 1));
        assert_eq!(d2.coeff(6), q(252, 1));
        // dilate by 1 is the identity
        assert_eq!(d.dilate(1), d);
        // 1 + 720q ↦ 1 + 720q³
        let e = s(0, &[1, 720]);
        let e3 = e.dilate(3);
        assert_eq!(e3.coeff(0), q(1, 1));
        assert_eq!(e3.coeff(3), q(720, 1));
    }

    #[test]
    fn pow_small_cases() {
        let a = s(0, &[1, 1, 0, 0]);
        assert_eq!(a.pow(0).coeff(0), q(1, 1));
        assert_eq!(a.pow(1), a);
        let sq = a.pow(2);
        assert_eq!(sq.coeff(0), q(1, 1));
        assert_eq!(sq.coeff(1), q(2, 1));
        assert_eq!(sq.coeff(2), q(1, 1));
        // (q^-1 + 1)^3 has val −3 and binomial coefficients
        let b = s(-1, &[1, 1, 0, 0, 0]);
        let cu = b.pow(3);
        assert_eq!(cu.val(), -3);
        assert_eq!(cu.coeff(-2), q(3, 1));
        assert_eq!(cu.coeff(-1), q(3, 1));
        assert_eq!(cu.coeff(0), q(1, 1));
    }

    #[test]
    fn karatsuba_agrees_with_schoolbook() {
        // lengths beyond the threshold, deterministic pseudo-random-ish input
        let n = 3 * KARATSUBA_THRESHOLD + 7;
        let a: Vec<BigInt> = (0..n)
            .map(|i| BigInt::from((i as i64 * 773 + 41) % 1009 - 500))
            .collect();
        let b: Vec<BigInt> = (0..n)
            .map(|i| BigInt::from((i as i64 * 227 + 99) % 911 - 455))
            .collect();
        let full = a.len() + b.len() - 1;
        let fast = karatsuba(&a, &b);
        // schoolbook reference
        let mut slow = vec![BigInt::zero(); full];
        for i in 0..a.len() {
            for j in 0..b.len() {
                slow[i + j] += &a[i] * &b[j];
            }
        }
        assert_eq!(fast, slow);
        // and the truncated entry point agrees on a prefix
        let tr = int_convolve(&a, &b, 40);
        assert_eq!(&tr[..], &slow[..40]);
    }

    #[test]
    fn precision_access_panics_beyond_prec() {
        let a = s(0, &[1, 2, 3]);
        assert_eq!(a.coeff(2), q(3, 1));
        let r = std::panic::catch_unwind(|| a.coeff(3));
        assert!(r.is_err());
    }

    #[test]
    fn zero_series_carries_precision() {
        let z = LaurentSeries::zero(17);
        assert!(z.is_zero());
        assert_eq!(z.prec(), 17);
        let a = s(1, &[5]);
        let p = &a * &z; // prec = min(2 + 17, 17 + 1) = 18... via rule
        assert!(p.is_zero());
        assert_eq!(p.prec(), (a.prec() + z.val()).min(z.prec() + a.val()));
    }

    #[test]
    fn json_shape_and_rational_strings() {
        let a = LaurentSeries::from_coeffs(-1, vec![q(1, 1), q(744, 1), q(-5, 2)]);
        let v = a.to_json();
        assert_eq!(v["val"], -1);
        assert_eq!(v["prec"], 2);
        assert_eq!(v["coeffs"][0], "1");
        assert_eq!(v["coeffs"][2], "-5/2");
    }

    #[test]
    fn display_is_readable() {
        let a = LaurentSeries::from_coeffs(-1, vec![q(1, 1), q(744, 1), q(196884, 1)]);
        assert_eq!(format!("{a}"), "q^-1 + 744 + 196884*q + O(q^2)");
        assert_eq!(format!("{}", LaurentSeries::zero(4)), "O(q^4)");
    }

    #[test]
    fn truncate_and_window() {
        let a = s(0, &[1, 2, 3, 4, 5]);
        let t = a.truncate(3);
        assert_eq!(t.prec(), 3);
        assert_eq!(t.coeff(2), q(3, 1));
        assert_eq!(a.coeff_window(-2, 2), vec![q(0, 1), q(0, 1), q(1, 1), q(2, 1)]);
    }

    #[test]
    fn mul_to_prec_caps_work_and_agrees() {
        let a = s(0, &[3, -1, 4, 1, -5, 9, 2, 6]);
        let b = s(0, &[2, 7, -1, 8, 2, -8, 1, 8]);
        let full = &a * &b;
        let capped = a.mul_to_prec(&b, 4);
        assert_eq!(capped.prec(), 4);
        for e in 0..4 {
            assert_eq!(capped.coeff(e), full.coeff(e));
        }
    }
}
