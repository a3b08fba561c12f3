//! Exact kernels of integer matrices.
//!
//! The implicitization systems and the Φ_N solve both reduce to one
//! primitive: given a dense integer matrix M, produce a basis of its right
//! kernel over Q, scaled to primitive integer vectors. Three layers:
//!
//! 1. **Fraction-free Bareiss elimination** with complete pivoting on the
//!    nonzero entry of minimal bit length (ties: lowest original column,
//!    then lowest original row). Every intermediate entry is a minor of the
//!    input, so divisions are exact and growth stays polynomial. This is the
//!    reference path and the only path for small matrices.
//! 2. **Modular prescreening**: full column rank mod a single prime already
//!    proves the rational kernel is trivial (rank can only drop under
//!    reduction), which is the common case in minimal-degree scans.
//! 3. **Certified multi-modular kernels** for the large systems: kernels are
//!    computed mod a deterministic stream of 62-bit primes, combined by CRT,
//!    lifted by rational reconstruction, and then *verified exactly*:
//!    M·v = 0 is checked in BigInt arithmetic for every reconstructed
//!    vector, and the dimension is certified by the sandwich
//!    rank_Q ≥ rank_p (one prime) together with the verified independent
//!    vectors. Nothing is ever trusted from the modular side alone; any
//!    failure falls back to Bareiss.
//!
//! Basis convention: one vector per free column (non-pivot column), ordered
//! by ascending free-column index, each vector primitive (content 1) with
//! its first nonzero entry positive. For a 1-dimensional kernel this is the
//! unique primitive sign-normalized generator, independent of the algorithm
//! that produced it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Matrices at least this wide and tall go through the modular layers first.
const MODULAR_MIN_DIM: usize = 16;

/// A dense integer matrix (row-major).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    /// Zero matrix of the given shape.
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    /// Builds from integer rows (all rows must share a length).
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        IntMatrix { rows: r, cols: c, data }
    }

    /// Builds from rational rows, clearing each row by its common denominator
    /// (row scaling does not change the kernel).
    pub fn from_rational_rows(rows: &[Vec<BigRational>]) -> Self {
        let cleared = rows
            .iter()
            .map(|row| {
                let mut den = BigInt::one();
                for c in row {
                    if !c.denom().is_one() {
                        den = den.lcm(c.denom());
                    }
                }
                row.iter()
                    .map(|c| c.numer() * (&den / c.denom()))
                    .collect()
            })
            .collect();
        Self::from_rows(cleared)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    /// M·v with exact integer arithmetic.
    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = BigInt::zero();
                for c in 0..self.cols {
                    let m = self.entry(r, c);
                    if !m.is_zero() && !v[c].is_zero() {
                        acc += m * &v[c];
                    }
                }
                acc
            })
            .collect()
    }

    /// Exact rank over Q (Bareiss).
    pub fn rank(&self) -> usize {
        self.echelonize().pivots
    }

    /// Basis of the right kernel over Q as primitive integer vectors.
    ///
    /// Empty iff the kernel is trivial. See the module docs for the basis
    /// convention and the certification story.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        if self.cols == 0 {
            return Vec::new();
        }
        if self.rows == 0 {
            // Kernel is everything; canonical basis is the standard one.
            return (0..self.cols)
                .map(|f| {
                    let mut v = vec![BigInt::zero(); self.cols];
                    v[f] = BigInt::one();
                    v
                })
                .collect();
        }
        if self.rows >= MODULAR_MIN_DIM && self.cols >= MODULAR_MIN_DIM {
            if let Some(basis) = self.kernel_multimodular() {
                return basis;
            }
        }
        self.kernel_basis_bareiss()
    }

    /// The always-exact fraction-free reference path (also the bench baseline).
    pub fn kernel_basis_bareiss(&self) -> Vec<Vec<BigInt>> {
        let ech = self.echelonize();
        let rank = ech.pivots;
        let free: Vec<usize> = {
            let pivot_cols: std::collections::BTreeSet<usize> =
                ech.col_perm[..rank].iter().copied().collect();
            (0..self.cols).filter(|c| !pivot_cols.contains(c)).collect()
        };
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut x = vec![BigRational::zero(); self.cols];
            x[f] = BigRational::one();
            // Solve U·x = 0 upward; row i has its pivot at permuted column i.
            for i in (0..rank).rev() {
                let mut acc = BigRational::zero();
                let ri = ech.row_perm[i];
                for pos in (i + 1)..self.cols {
                    let cj = ech.col_perm[pos];
                    if !x[cj].is_zero() {
                        let m = ech.mat.entry(ri, cj);
                        if !m.is_zero() {
                            acc += BigRational::from_integer(m.clone()) * &x[cj];
                        }
                    }
                }
                let piv = ech.mat.entry(ri, ech.col_perm[i]);
                x[ech.col_perm[i]] = -acc / BigRational::from_integer(piv.clone());
            }
            basis.push(rational_to_primitive(&x));
        }
        basis
    }

    /// Complete-pivoting fraction-free elimination; shared by rank and kernel.
    fn echelonize(&self) -> Echelon {
        let mut mat = self.clone();
        let mut row_perm: Vec<usize> = (0..self.rows).collect();
        let mut col_perm: Vec<usize> = (0..self.cols).collect();
        let mut prev = BigInt::one();
        let steps = self.rows.min(self.cols);
        let mut t = 0;
        while t < steps {
            // minimal-bit-length nonzero pivot in the remaining block,
            // ties to the lowest original column index, then lowest row
            let mut best: Option<(u64, usize, usize, usize, usize)> = None;
            for (ri, &r) in row_perm.iter().enumerate().skip(t) {
                for (ci, &c) in col_perm.iter().enumerate().skip(t) {
                    let e = mat.entry(r, c);
                    if e.is_zero() {
                        continue;
                    }
                    let key = (e.bits(), c, r);
                    match best {
                        Some((b, bc, br, _, _)) if (b, bc, br) <= key => {}
                        _ => best = Some((key.0, key.1, key.2, ri, ci)),
                    }
                }
            }
            let Some((_, _, _, ri, ci)) = best else { break };
            row_perm.swap(t, ri);
            col_perm.swap(t, ci);
            let (pr, pc) = (row_perm[t], col_perm[t]);
            let pivot = mat.entry(pr, pc).clone();
            for &r in row_perm.iter().skip(t + 1) {
                let lead = mat.entry(r, pc).clone();
                for &c in col_perm.iter().skip(t + 1) {
                    let num = &pivot * mat.entry(r, c) - &lead * mat.entry(pr, c);
                    let (q, rem) = num.div_rem(&prev);
                    debug_assert!(rem.is_zero(), "fraction-free division not exact");
                    mat.set(r, c, q);
                }
                mat.set(r, pc, BigInt::zero());
            }
            prev = pivot;
            t += 1;
        }
        Echelon {
            mat,
            row_perm,
            col_perm,
            pivots: t,
        }
    }

    /// CRT + rational reconstruction kernel with exact verification.
    /// Returns None when the modular route cannot be certified.
    fn kernel_multimodular(&self) -> Option<Vec<Vec<BigInt>>> {
        let mut primes = modp::PrimeStream::new();
        let mut base_p = primes.next()?;
        let mut base = modp::reduced_rref(self, base_p);
        // An unlucky base prime can only under-estimate rank / push pivots
        // right; scan a few primes and keep the structurally best one.
        for _ in 0..2 {
            let p = primes.next()?;
            let cand = modp::reduced_rref(self, p);
            if cand.rank > base.rank
                || (cand.rank == base.rank && cand.pivot_cols < base.pivot_cols)
            {
                base = cand;
                base_p = p;
            }
        }
        let dim = self.cols - base.rank;
        if dim == 0 {
            // rank_Q >= rank_p = cols: certified trivial kernel.
            return Some(Vec::new());
        }
        let free: Vec<usize> = (0..self.cols)
            .filter(|c| !base.pivot_cols.contains(c))
            .collect();

        // Accumulated CRT state: per free column, a full-length residue
        // vector and the running modulus.
        let mut residues: Vec<Vec<BigInt>> =
            vec![vec![BigInt::zero(); self.cols]; dim];
        let mut modulus = BigInt::one();
        let include = |rref: &modp::Rref,
                           p: u64,
                           residues: &mut Vec<Vec<BigInt>>,
                           modulus: &mut BigInt| {
            let kern = modp::kernel_from_rref(rref, &free, p);
            let pb = BigInt::from(p);
            let inv = modinv_big(modulus, &pb);
            for (vres, vp) in residues.iter_mut().zip(kern.iter()) {
                for (res, &xp) in vres.iter_mut().zip(vp.iter()) {
                    // res' ≡ res (mod modulus), res' ≡ xp (mod p)
                    let cur = res.mod_floor(&pb).to_u64().unwrap();
                    let diff = modp::submod(xp, cur, p);
                    let t = modp::mulmod(diff, inv, p);
                    *res += &*modulus * BigInt::from(t);
                }
            }
            *modulus *= pb;
        };
        include(&base, base_p, &mut residues, &mut modulus);

        // Hadamard-style cap: once the modulus dwarfs any possible minor,
        // further primes cannot help and the structure guess must be wrong.
        let max_bits = (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| self.entry(r, c).bits()))
            .max()
            .unwrap_or(1);
        let cap_bits = 2 * (self.cols as u64) * (max_bits + 64) + 128;

        let mut next_checkpoint = 4usize;
        let mut used = 1usize;
        loop {
            let p = primes.next()?;
            let rref = modp::reduced_rref(self, p);
            if rref.rank > base.rank
                || (rref.rank == base.rank && rref.pivot_cols < base.pivot_cols)
            {
                // Base structure was unlucky; restart from this prime
                // (the restarted run re-derives the dimension from it).
                return self.kernel_multimodular_from(rref, p, primes);
            }
            if rref.rank < base.rank || rref.pivot_cols != base.pivot_cols {
                continue; // unlucky prime for the established structure
            }
            include(&rref, p, &mut residues, &mut modulus);
            used += 1;
            if used >= next_checkpoint {
                next_checkpoint *= 2;
                if let Some(basis) = self.try_lift(&residues, &modulus) {
                    return Some(basis);
                }
                if modulus.bits() > cap_bits {
                    return None;
                }
            }
        }
    }

    /// Restarted multimodular run with a fixed base structure (avoids
    /// unbounded recursion: at most one restart per rank/profile improvement,
    /// and both improve monotonically).
    fn kernel_multimodular_from(
        &self,
        base: modp::Rref,
        base_p: u64,
        mut primes: modp::PrimeStream,
    ) -> Option<Vec<Vec<BigInt>>> {
        let dim = self.cols - base.rank;
        if dim == 0 {
            return Some(Vec::new());
        }
        let free: Vec<usize> = (0..self.cols)
            .filter(|c| !base.pivot_cols.contains(c))
            .collect();
        let mut residues: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); self.cols]; dim];
        let mut modulus = BigInt::one();
        let mut stage = vec![(base.clone(), base_p)];
        let max_bits = (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| self.entry(r, c).bits()))
            .max()
            .unwrap_or(1);
        let cap_bits = 2 * (self.cols as u64) * (max_bits + 64) + 128;
        let mut next_checkpoint = 4usize;
        loop {
            for (rref, p) in stage.drain(..) {
                let kern = modp::kernel_from_rref(&rref, &free, p);
                let pb = BigInt::from(p);
                let inv = modinv_big(&modulus, &pb);
                for (vres, vp) in residues.iter_mut().zip(kern.iter()) {
                    for (res, &xp) in vres.iter_mut().zip(vp.iter()) {
                        let cur = res.mod_floor(&pb).to_u64().unwrap();
                        let diff = modp::submod(xp, cur, p);
                        let t = modp::mulmod(diff, inv, p);
                        *res += &modulus * BigInt::from(t);
                    }
                }
                modulus *= pb;
            }
            let used = estimate_prime_count(&modulus);
            if used >= next_checkpoint {
                next_checkpoint *= 2;
                if let Some(basis) = self.try_lift(&residues, &modulus) {
                    return Some(basis);
                }
                if modulus.bits() > cap_bits {
                    return None;
                }
            }
            // gather the next prime consistent with the structure
            loop {
                let p = primes.next()?;
                let rref = modp::reduced_rref(self, p);
                if rref.rank > base.rank
                    || (rref.rank == base.rank && rref.pivot_cols < base.pivot_cols)
                {
                    return None; // second structural surprise: give up to Bareiss
                }
                if rref.rank == base.rank && rref.pivot_cols == base.pivot_cols {
                    stage.push((rref, p));
                    break;
                }
            }
        }
    }

    /// Rational-reconstructs every entry, clears to primitive integer
    /// vectors, and verifies M·v = 0 exactly. None if anything fails.
    fn try_lift(&self, residues: &[Vec<BigInt>], modulus: &BigInt) -> Option<Vec<Vec<BigInt>>> {
        let mut basis = Vec::with_capacity(residues.len());
        for vres in residues {
            let mut rat = Vec::with_capacity(vres.len());
            for r in vres {
                rat.push(rational_reconstruct(r, modulus)?);
            }
            let v = rational_to_primitive(&rat);
            if !self.mul_vec(&v).iter().all(Zero::is_zero) {
                return None;
            }
            basis.push(v);
        }
        Some(basis)
    }
}

fn estimate_prime_count(modulus: &BigInt) -> usize {
    (modulus.bits() / 61) as usize
}

/// Echelon form data from `echelonize`.
struct Echelon {
    mat: IntMatrix,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    pivots: usize,
}

/// Clears denominators and content; flips sign so the first nonzero entry is
/// positive. Panics on the zero vector (kernel vectors are never zero).
pub(crate) fn rational_to_primitive(x: &[BigRational]) -> Vec<BigInt> {
    let mut den = BigInt::one();
    for c in x {
        if !c.denom().is_one() {
            den = den.lcm(c.denom());
        }
    }
    let mut v: Vec<BigInt> = x.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    let mut content = BigInt::zero();
    for c in &v {
        if !c.is_zero() {
            content = content.gcd(c);
        }
    }
    assert!(!content.is_zero(), "zero vector cannot be normalized");
    if !content.is_one() {
        for c in v.iter_mut() {
            *c /= &content;
        }
    }
    if let Some(first) = v.iter().find(|c| !c.is_zero()) {
        if first.is_negative() {
            for c in v.iter_mut() {
                *c = -&*c;
            }
        }
    }
    v
}

/// Modular inverse of a mod m for BigInt (m prime in our use).
fn modinv_big(a: &BigInt, m: &BigInt) -> u64 {
    let am = a.mod_floor(m).to_u64().unwrap();
    let p = m.to_u64().unwrap();
    modp::invmod(am, p)
}

/// Rational reconstruction (Wang): the unique n/d with |n|, d ≤ √(m/2),
/// n ≡ r·d (mod m), if it exists.
fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = sqrt_floor(&(m / BigInt::from(2)));
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    let (num, den) = (r1, s1);
    if den.is_zero() || den.abs() > bound {
        return None;
    }
    // gcd(0, ±1) = 1, so x = 0 passes; any shared factor means failure
    if !num.gcd(&den).is_one() {
        return None;
    }
    let out = if den.is_negative() {
        BigRational::new(-num, -den)
    } else {
        BigRational::new(num, den)
    };
    Some(out)
}

fn sqrt_floor(n: &BigInt) -> BigInt {
    use num_bigint::Sign;
    if n.sign() == Sign::Minus {
        panic!("sqrt of negative");
    }
    n.sqrt()
}

pub(crate) mod modp {
    //! Word-size modular arithmetic, deterministic prime generation, and
    //! Gauss–Jordan reduction mod p.

    use super::IntMatrix;
    use num_bigint::{BigInt, Sign};

    pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    pub fn addmod(a: u64, b: u64, p: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % p as u128) as u64
    }

    pub fn submod(a: u64, b: u64, p: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            p - (b - a)
        }
    }

    pub fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        a %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, a, p);
            }
            a = mulmod(a, a, p);
            e >>= 1;
        }
        acc
    }

    pub fn invmod(a: u64, p: u64) -> u64 {
        // p prime; Fermat
        powmod(a, p - 2, p)
    }

    /// Deterministic Miller–Rabin, complete for u64 with this witness set.
    pub fn is_prime_u64(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            if n == p {
                return true;
            }
            if n % p == 0 {
                return false;
            }
        }
        let mut d = n - 1;
        let mut s = 0;
        while d % 2 == 0 {
            d /= 2;
            s += 1;
        }
        'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            let mut x = powmod(a, d, n);
            if x == 1 || x == n - 1 {
                continue;
            }
            for _ in 0..s - 1 {
                x = mulmod(x, x, n);
                if x == n - 1 {
                    continue 'witness;
                }
            }
            return false;
        }
        true
    }

    /// Deterministic descending stream of primes just below 2^62.
    pub struct PrimeStream {
        next_candidate: u64,
    }

    impl PrimeStream {
        pub fn new() -> Self {
            PrimeStream {
                next_candidate: (1u64 << 62) - 1,
            }
        }
    }

    impl Iterator for PrimeStream {
        type Item = u64;
        fn next(&mut self) -> Option<u64> {
            let mut c = self.next_candidate;
            while !is_prime_u64(c) {
                c -= 2;
            }
            self.next_candidate = c - 2;
            Some(c)
        }
    }

    /// x mod p for BigInt via Horner over the u64 digits (no big division).
    pub fn bigint_mod_u64(x: &BigInt, p: u64) -> u64 {
        let (sign, digits) = x.to_u64_digits();
        let base = ((1u128 << 64) % p as u128) as u64;
        let mut acc = 0u64;
        for d in digits.iter().rev() {
            acc = mulmod(acc, base, p);
            acc = addmod(acc, d % p, p);
        }
        match sign {
            Sign::Minus if acc != 0 => p - acc,
            _ => acc,
        }
    }

    /// Reduced-row-echelon data of a matrix mod p.
    #[derive(Clone)]
    pub struct Rref {
        pub rank: usize,
        /// Ascending pivot column indices (the mod-p column rank profile).
        pub pivot_cols: Vec<usize>,
        /// The reduced rows (rank many), full width.
        pub rows: Vec<Vec<u64>>,
        pub cols: usize,
    }

    /// Reduce an integer matrix mod p and row-reduce it fully.
    pub fn reduced_rref(m: &IntMatrix, p: u64) -> Rref {
        let rows: Vec<Vec<u64>> = (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| bigint_mod_u64(m.entry(r, c), p)).collect())
            .collect();
        rref_mod_p(rows, m.cols(), p)
    }

    /// Gauss–Jordan elimination mod p with left-to-right greedy pivots.
    pub fn rref_mod_p(mut rows: Vec<Vec<u64>>, cols: usize, p: u64) -> Rref {
        let nrows = rows.len();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == nrows {
                break;
            }
            let Some(pr) = (r..nrows).find(|&i| rows[i][c] != 0) else {
                continue;
            };
            rows.swap(r, pr);
            let inv = invmod(rows[r][c], p);
            for j in c..cols {
                rows[r][j] = mulmod(rows[r][j], inv, p);
            }
            for i in 0..nrows {
                if i != r && rows[i][c] != 0 {
                    let f = rows[i][c];
                    for j in c..cols {
                        let t = mulmod(f, rows[r][j], p);
                        rows[i][j] = submod(rows[i][j], t, p);
                    }
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
        rows.truncate(r);
        Rref {
            rank: r,
            pivot_cols,
            rows,
            cols,
        }
    }

    /// Kernel vectors mod p from an rref: for each free column f,
    /// the vector with x_f = 1, other free coordinates 0, and pivot
    /// coordinates read off the reduced rows.
    pub fn kernel_from_rref(rref: &Rref, free: &[usize], p: u64) -> Vec<Vec<u64>> {
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; rref.cols];
                v[f] = 1;
                for (i, &pc) in rref.pivot_cols.iter().enumerate() {
                    let coeff = rref.rows[i][f];
                    if coeff != 0 {
                        v[pc] = p - coeff;
                    }
                }
                v
            })
            .collect()
    }
}
