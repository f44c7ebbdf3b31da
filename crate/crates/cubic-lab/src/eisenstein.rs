//! Exact arithmetic in the ring of Eisenstein integers Z[ω], ω = e^{2πi/3}:
//! norms, units, Euclidean division, gcd, factorization into canonical primary
//! primes, the cubic residue symbol (a direct power-residue implementation and
//! a fast Euclidean/reciprocity implementation), and enumeration of the
//! primary elements and admissible moduli the rest of the crate sums over.
//!
//! Conventions used throughout:
//! * an element is written `a + bω` with ω² + ω + 1 = 0 and norm a² − ab + b²;
//! * `λ = 1 − ω` is the ramified prime above 3, with 3 = −ω²·λ²;
//! * an element coprime to 3 is *primary* when a ≡ 1 (mod 3) and b ≡ 0
//!   (mod 3); each such element has exactly one primary associate;
//! * canonical primes: `λ` itself, `−p` for an inert rational prime
//!   p ≡ 2 (mod 3), and for a split rational prime p ≡ 1 (mod 3) the two
//!   conjugate primary primes above p (the one with b > 0 is the one
//!   [`primary_prime_above`] returns).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;

use crate::numerics::{factor_u64, primes_up_to};

/// Errors from Eisenstein-integer arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EisensteinError {
    /// Division or reduction by zero.
    DivisionByZero,
    /// The operation needs an argument coprime to 3 (equivalently to λ).
    RamifiedArgument(EisensteinInt),
    /// The rational prime is not split, so no primary prime of that norm exists.
    NotSplitPrime(u64),
}

impl fmt::Display for EisensteinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EisensteinError::DivisionByZero => write!(f, "division by zero in Z[ω]"),
            EisensteinError::RamifiedArgument(z) => {
                write!(f, "{z} is divisible by λ (norm divisible by 3)")
            }
            EisensteinError::NotSplitPrime(p) => {
                write!(f, "{p} is not a rational prime ≡ 1 mod 3")
            }
        }
    }
}

impl std::error::Error for EisensteinError {}

/// An Eisenstein integer a + bω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EisensteinInt {
    pub a: i64,
    pub b: i64,
}

pub const ZERO: EisensteinInt = EisensteinInt { a: 0, b: 0 };
pub const ONE: EisensteinInt = EisensteinInt { a: 1, b: 0 };
pub const OMEGA: EisensteinInt = EisensteinInt { a: 0, b: 1 };
/// λ = 1 − ω, the ramified prime of norm 3.
pub const LAMBDA: EisensteinInt = EisensteinInt { a: 1, b: -1 };

impl EisensteinInt {
    pub const fn new(a: i64, b: i64) -> Self {
        EisensteinInt { a, b }
    }

    /// Field norm a² − ab + b² (always nonnegative).
    pub fn norm(&self) -> i64 {
        let a = self.a as i128;
        let b = self.b as i128;
        let n = a * a - a * b + b * b;
        debug_assert!(n <= i64::MAX as i128);
        n as i64
    }

    /// Complex conjugate: a + bω̄ = (a − b) − bω.
    pub fn conj(&self) -> Self {
        EisensteinInt::new(self.a - self.b, -self.b)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    /// The six units ±1, ±ω, ±ω².
    pub fn units() -> [Self; 6] {
        [
            EisensteinInt::new(1, 0),
            EisensteinInt::new(-1, 0),
            EisensteinInt::new(0, 1),
            EisensteinInt::new(0, -1),
            EisensteinInt::new(-1, -1),
            EisensteinInt::new(1, 1),
        ]
    }

    /// Primary: coprime to 3 with a ≡ 1 and b ≡ 0 (mod 3).
    pub fn is_primary(&self) -> bool {
        self.a.rem_euclid(3) == 1 && self.b.rem_euclid(3) == 0
    }

    /// The unique primary associate of an element coprime to 3.
    pub fn primary_associate(&self) -> Result<Self, EisensteinError> {
        if self.is_zero() || self.norm() % 3 == 0 {
            return Err(EisensteinError::RamifiedArgument(*self));
        }
        for u in Self::units() {
            let cand = u * *self;
            if cand.is_primary() {
                return Ok(cand);
            }
        }
        unreachable!("every element coprime to 3 has a primary associate");
    }

    /// Euclidean division: z = q·w + r with N(r) ≤ (3/4)·N(w).
    pub fn divmod(&self, w: &Self) -> Result<(Self, Self), EisensteinError> {
        if w.is_zero() {
            return Err(EisensteinError::DivisionByZero);
        }
        // z/w = z·conj(w)/N(w); round both coordinates to the nearest integer.
        let num = mul_raw(*self, w.conj());
        let den = w.norm() as i128;
        let qa = round_div(num.0, den);
        let qb = round_div(num.1, den);
        let q = EisensteinInt::new(qa as i64, qb as i64);
        let r = *self - q * *w;
        debug_assert!(4 * r.norm() <= 3 * w.norm());
        Ok((q, r))
    }

    /// Remainder of Euclidean division.
    pub fn reduce_mod(&self, w: &Self) -> Result<Self, EisensteinError> {
        Ok(self.divmod(w)?.1)
    }

    /// Exact quotient, or `None` if `w` does not divide `self`.
    pub fn exact_div(&self, w: &Self) -> Option<Self> {
        match self.divmod(w) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    /// Modular exponentiation: self^exp reduced mod `modulus`.
    pub fn pow_mod(&self, mut exp: u64, modulus: &Self) -> Result<Self, EisensteinError> {
        if modulus.is_zero() {
            return Err(EisensteinError::DivisionByZero);
        }
        let mut base = self.reduce_mod(modulus)?;
        let mut acc = ONE.reduce_mod(modulus)?;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = (acc * base).reduce_mod(modulus)?;
            }
            base = (base * base).reduce_mod(modulus)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    /// Embeds the complex value a + b·e^{2πi/3}.
    pub fn to_complex(&self) -> Complex64 {
        let om = Complex64::new(-0.5, 3.0f64.sqrt() / 2.0);
        Complex64::new(self.a as f64, 0.0) + om * self.b as f64
    }
}

fn mul_raw(z: EisensteinInt, w: EisensteinInt) -> (i128, i128) {
    // (a+bω)(c+dω) = (ac − bd) + (ad + bc − bd)ω, using ω² = −1 − ω.
    let (a, b) = (z.a as i128, z.b as i128);
    let (c, d) = (w.a as i128, w.b as i128);
    (a * c - b * d, a * d + b * c - b * d)
}

/// Round n/d (d > 0) to the nearest integer, half away from floor.
fn round_div(n: i128, d: i128) -> i128 {
    debug_assert!(d > 0);
    (2 * n + d).div_euclid(2 * d)
}

impl std::ops::Add for EisensteinInt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        EisensteinInt::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl std::ops::Sub for EisensteinInt {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        EisensteinInt::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl std::ops::Neg for EisensteinInt {
    type Output = Self;
    fn neg(self) -> Self {
        EisensteinInt::new(-self.a, -self.b)
    }
}

impl std::ops::Mul for EisensteinInt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = mul_raw(self, rhs);
        assert!(
            a.abs() <= i64::MAX as i128 && b.abs() <= i64::MAX as i128,
            "Eisenstein product overflow"
        );
        EisensteinInt::new(a as i64, b as i64)
    }
}

impl From<i64> for EisensteinInt {
    fn from(n: i64) -> Self {
        EisensteinInt::new(n, 0)
    }
}

impl PartialOrd for EisensteinInt {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EisensteinInt {
    /// Orders by (norm, a, b), so sorted lists read in norm order.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.norm(), self.a, self.b).cmp(&(other.norm(), other.a, other.b))
    }
}

impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}ω"),
            (a, b) if b < 0 => write!(f, "{a}{b}ω"),
            (a, b) => write!(f, "{a}+{b}ω"),
        }
    }
}

/// Greatest common divisor by the Euclidean algorithm. The result is a gcd up
/// to units; call [`EisensteinInt::primary_associate`] to canonicalize when
/// the gcd is coprime to 3.
pub fn gcd(mut z: EisensteinInt, mut w: EisensteinInt) -> EisensteinInt {
    while !w.is_zero() {
        let r = z.reduce_mod(&w).expect("nonzero divisor");
        z = w;
        w = r;
    }
    z
}

/// Whether `n` is prime in Z[ω]: an associate of λ, of a split primary prime,
/// or of an inert rational prime.
pub fn is_prime_eis(n: &EisensteinInt) -> bool {
    let norm = n.norm();
    if norm == 3 {
        return true;
    }
    let nu = norm as u64;
    if crate::numerics::is_prime(nu) {
        // Norms are never ≡ 2 mod 3, so this is a split prime (or 3 above).
        return nu % 3 == 1;
    }
    // Inert candidates have norm p² with p ≡ 2 mod 3; all elements of such a
    // norm are associates of p, hence prime.
    let r = (norm as f64).sqrt().round() as u64;
    r * r == nu && crate::numerics::is_prime(r) && r % 3 == 2
}

/// The primary prime π = a + bω with b > 0 lying above a split rational prime
/// p ≡ 1 (mod 3); its conjugate-associate is the other prime above p.
pub fn primary_prime_above(p: u64) -> Result<EisensteinInt, EisensteinError> {
    if p % 3 != 1 || !crate::numerics::is_prime(p) {
        return Err(EisensteinError::NotSplitPrime(p));
    }
    // Solve a² − ab + b² = p with b a positive multiple of 3 and a ≡ 1 mod 3:
    // a = (b ± √(4p − 3b²)) / 2.
    let mut b = 3i64;
    while 3 * b * b <= 4 * p as i64 {
        let disc = 4 * p as i64 - 3 * b * b;
        let d = (disc as f64).sqrt().round() as i64;
        if d * d == disc {
            for a in [(b - d) / 2, (b + d) / 2] {
                let cand = EisensteinInt::new(a, b);
                if cand.is_primary() && cand.norm() == p as i64 {
                    return Ok(cand);
                }
            }
        }
        b += 3;
    }
    unreachable!("every split prime has a primary prime with b > 0 above it");
}

/// Factorization into canonical primes: `n = unit · ∏ πᵢ^{eᵢ}` with the πᵢ
/// canonical (λ, −p inert, or primary split primes) sorted by (norm, a, b).
pub fn factor(
    n: &EisensteinInt,
) -> Result<(EisensteinInt, Vec<(EisensteinInt, u32)>), EisensteinError> {
    if n.is_zero() {
        return Err(EisensteinError::DivisionByZero);
    }
    let mut rest = *n;
    let mut out: Vec<(EisensteinInt, u32)> = Vec::new();
    for (p, _) in factor_u64(n.norm() as u64) {
        let candidates: Vec<EisensteinInt> = if p == 3 {
            vec![LAMBDA]
        } else if p % 3 == 2 {
            vec![EisensteinInt::new(-(p as i64), 0)]
        } else {
            let pi = primary_prime_above(p)?;
            vec![pi, pi.conj().primary_associate()?]
        };
        for prime in candidates {
            let mut e = 0u32;
            while let Some(q) = rest.exact_div(&prime) {
                rest = q;
                e += 1;
            }
            if e > 0 {
                out.push((prime, e));
            }
        }
    }
    debug_assert!(rest.is_unit());
    out.sort_by(|x, y| x.0.cmp(&y.0));
    Ok((rest, out))
}

/// Möbius function of the ideal (n): 0 unless squarefree, else (−1)^#primes.
pub fn mobius(n: &EisensteinInt) -> Result<i32, EisensteinError> {
    let (_, primes) = factor(n)?;
    if primes.iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if primes.len() % 2 == 0 { 1 } else { -1 })
}

// ---------------------------------------------------------------------------
// cubic residue symbol
// ---------------------------------------------------------------------------

/// Value of the cubic residue symbol: zero or a cube root of unity ω^k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CubicValue {
    Zero,
    Root(u8),
}

impl CubicValue {
    pub fn mul(self, other: CubicValue) -> CubicValue {
        match (self, other) {
            (CubicValue::Root(j), CubicValue::Root(k)) => CubicValue::Root((j + k) % 3),
            _ => CubicValue::Zero,
        }
    }

    pub fn pow(self, e: u32) -> CubicValue {
        match self {
            CubicValue::Zero => {
                if e == 0 {
                    CubicValue::Root(0)
                } else {
                    CubicValue::Zero
                }
            }
            CubicValue::Root(k) => CubicValue::Root((k as u32 * e % 3) as u8),
        }
    }

    /// Complex conjugate (equivalently the inverse for nonzero values).
    pub fn conj(self) -> CubicValue {
        match self {
            CubicValue::Zero => CubicValue::Zero,
            CubicValue::Root(k) => CubicValue::Root((3 - k) % 3),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            CubicValue::Zero => Complex64::new(0.0, 0.0),
            CubicValue::Root(0) => Complex64::new(1.0, 0.0),
            CubicValue::Root(1) => Complex64::new(-0.5, 3.0f64.sqrt() / 2.0),
            CubicValue::Root(2) => Complex64::new(-0.5, -(3.0f64.sqrt() / 2.0)),
            CubicValue::Root(_) => unreachable!("root exponents are reduced mod 3"),
        }
    }
}

impl fmt::Display for CubicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CubicValue::Zero => write!(f, "0"),
            CubicValue::Root(0) => write!(f, "1"),
            CubicValue::Root(1) => write!(f, "ω"),
            CubicValue::Root(2) => write!(f, "ω²"),
            CubicValue::Root(_) => unreachable!(),
        }
    }
}

/// ω-exponent of a unit: u = ±ω^k ↦ k. (Signs are invisible to cubic
/// symbols because −1 is a cube.)
fn unit_omega_exponent(u: &EisensteinInt) -> Option<u8> {
    match (u.a, u.b) {
        (1, 0) | (-1, 0) => Some(0),
        (0, 1) | (0, -1) => Some(1),
        (-1, -1) | (1, 1) => Some(2),
        _ => None,
    }
}

/// Cubic residue symbol modulo a single prime π (norm coprime to 3), by the
/// defining power residue: the cube root of unity ≡ m^{(N(π)−1)/3} (mod π).
fn symbol_mod_prime(m: &EisensteinInt, pi: &EisensteinInt) -> Result<CubicValue, EisensteinError> {
    let norm = pi.norm();
    if norm % 3 == 0 {
        return Err(EisensteinError::RamifiedArgument(*pi));
    }
    let e = ((norm - 1) / 3) as u64;
    let r = m.pow_mod(e, pi)?;
    if r.is_zero() {
        return Ok(CubicValue::Zero);
    }
    let mut omega_k = ONE;
    for k in 0u8..3 {
        if (r - omega_k).reduce_mod(pi)?.is_zero() {
            return Ok(CubicValue::Root(k));
        }
        omega_k = omega_k * OMEGA;
    }
    unreachable!("m^((N−1)/3) is always congruent to a cube root of unity");
}

/// Cubic residue symbol (m/n)₃ by factoring the modulus and multiplying the
/// prime-power residues. Slow but definitionally direct; the fast Euclidean
/// implementation is checked against this one.
pub fn cubic_symbol_direct(
    m: &EisensteinInt,
    n: &EisensteinInt,
) -> Result<CubicValue, EisensteinError> {
    if n.is_zero() {
        return Err(EisensteinError::DivisionByZero);
    }
    if n.norm() % 3 == 0 {
        return Err(EisensteinError::RamifiedArgument(*n));
    }
    let (_, primes) = factor(n)?;
    let mut acc = CubicValue::Root(0);
    for (pi, e) in primes {
        acc = acc.mul(symbol_mod_prime(m, &pi)?.pow(e));
    }
    Ok(acc)
}

/// ω-exponent of (λ/n)₃ for primary n, which depends only on n mod 9. The
/// nine-entry table is bootstrapped once from small primes in each primary
/// residue class via the direct power-residue symbol; the fast symbol below
/// then never needs another factorization.
fn lambda_exponent(n: &EisensteinInt) -> u8 {
    static TABLE: OnceLock<[[u8; 3]; 3]> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = [[0u8; 3]; 3];
        for (ai, row) in t.iter_mut().enumerate() {
            for (bi, slot) in row.iter_mut().enumerate() {
                let (ta, tb) = (1 + 3 * ai as i64, 3 * bi as i64);
                // Smallest-norm primary prime in the class (ta, tb) mod 9.
                let mut best: Option<EisensteinInt> = None;
                for s in -10i64..=10 {
                    for u in -10i64..=10 {
                        let cand = EisensteinInt::new(ta + 9 * s, tb + 9 * u);
                        if is_prime_eis(&cand) && best.map_or(true, |b| cand.norm() < b.norm()) {
                            best = Some(cand);
                        }
                    }
                }
                let pi = best.expect("each primary class mod 9 contains a small prime");
                match symbol_mod_prime(&LAMBDA, &pi).expect("prime modulus is coprime to 3") {
                    CubicValue::Root(k) => *slot = k,
                    CubicValue::Zero => unreachable!("λ is coprime to split/inert primes"),
                }
            }
        }
        t
    });
    debug_assert!(n.is_primary());
    let ai = ((n.a.rem_euclid(9) - 1) / 3) as usize;
    let bi = (n.b.rem_euclid(9) / 3) as usize;
    table[ai][bi]
}

/// ω-exponent of (ω/n)₃ for n of norm coprime to 3: (N(n) − 1)/3 mod 3.
fn omega_exponent(n: &EisensteinInt) -> u8 {
    ((n.norm() - 1) / 3).rem_euclid(3) as u8
}

/// Cubic residue symbol (m/n)₃ for any modulus n of norm coprime to 3,
/// computed without factoring by Euclidean reduction and cubic reciprocity
/// ((m/n)₃ = (n/m)₃ for primary m, n), with the unit and λ contributions
/// peeled off through the supplementary laws. Runs in O(log² N) like a
/// Jacobi-symbol computation.
pub fn cubic_symbol(
    m: &EisensteinInt,
    n: &EisensteinInt,
) -> Result<CubicValue, EisensteinError> {
    if n.is_zero() {
        return Err(EisensteinError::DivisionByZero);
    }
    if n.norm() % 3 == 0 {
        return Err(EisensteinError::RamifiedArgument(*n));
    }
    // The symbol depends on the modulus only through its ideal, so replace n
    // by its primary associate.
    let mut n = n.primary_associate()?;
    let mut m = *m;
    let mut acc = 0u8; // running ω-exponent
    loop {
        m = m.reduce_mod(&n)?;
        if m.is_zero() {
            return Ok(if n.is_unit() {
                CubicValue::Root(acc % 3)
            } else {
                CubicValue::Zero
            });
        }
        // Split off λ^t and the unit: m = (±ω^j) · λ^t · m′ with m′ primary.
        let mut t = 0u32;
        while let Some(q) = m.exact_div(&LAMBDA) {
            m = q;
            t += 1;
        }
        let m_primary = m.primary_associate()?;
        let unit = m
            .exact_div(&m_primary)
            .expect("an element divides its associates");
        let j = unit_omega_exponent(&unit).expect("quotient of associates is a unit") as u32;
        acc = ((acc as u32
            + j * omega_exponent(&n) as u32
            + t * lambda_exponent(&n) as u32)
            % 3) as u8;
        if m_primary == ONE {
            return Ok(CubicValue::Root(acc));
        }
        // Reciprocity: (m′/n)₃ = (n/m′)₃ for primary m′, n.
        m = n;
        n = m_primary;
    }
}

/// Cubic residue symbol with a rational integer as the numerator.
pub fn cubic_symbol_int(m: i64, n: &EisensteinInt) -> Result<CubicValue, EisensteinError> {
    cubic_symbol(&EisensteinInt::from(m), n)
}

// ---------------------------------------------------------------------------
// enumeration
// ---------------------------------------------------------------------------

/// All primary elements with 1 ≤ norm ≤ `max_norm`, sorted by (norm, a, b).
pub fn enumerate_primary(max_norm: i64) -> Vec<EisensteinInt> {
    let mut out = Vec::new();
    if max_norm < 1 {
        return out;
    }
    let sq = (max_norm as f64).sqrt();
    let bmax = (2.0 * sq / 3.0f64.sqrt()).ceil() as i64;
    let mut b = -(bmax / 3) * 3 - 3;
    while b <= bmax + 3 {
        // a ranges over ≡ 1 mod 3 within |a − b/2| ≤ √max_norm.
        let lo = (b as f64 / 2.0 - sq).floor() as i64 - 2;
        let hi = (b as f64 / 2.0 + sq).ceil() as i64 + 2;
        let mut a = lo + (1 - lo).rem_euclid(3);
        while a <= hi {
            let z = EisensteinInt::new(a, b);
            let norm = z.norm();
            if norm >= 1 && norm <= max_norm {
                out.push(z);
            }
            a += 3;
        }
        b += 3;
    }
    out.sort();
    out
}

/// A modulus from the admissible family: squarefree products of distinct
/// split primary primes with no conjugate pair (so no rational prime divides
/// the product), including the empty product 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleModulus {
    pub n: EisensteinInt,
    /// Canonical primary prime divisors, sorted.
    pub primes: Vec<EisensteinInt>,
}

impl AdmissibleModulus {
    pub fn norm(&self) -> i64 {
        self.n.norm()
    }
}

/// All admissible moduli with norm in [lo, hi], sorted by (norm, a, b).
pub fn enumerate_admissible(lo: i64, hi: i64) -> Vec<AdmissibleModulus> {
    let mut out = Vec::new();
    if hi < 1 || lo > hi {
        return out;
    }
    let split: Vec<EisensteinInt> = primes_up_to(hi as u64)
        .into_iter()
        .filter(|&p| p % 3 == 1)
        .map(|p| primary_prime_above(p).expect("p ≡ 1 mod 3 is split"))
        .collect();
    // Depth-first products: for each split prime use it, use its conjugate,
    // or skip it; conjugates are never combined (their product is rational).
    let mut stack: Vec<EisensteinInt> = Vec::new();
    fn dfs(
        split: &[EisensteinInt],
        idx: usize,
        current: EisensteinInt,
        hi: i64,
        stack: &mut Vec<EisensteinInt>,
        out: &mut Vec<AdmissibleModulus>,
    ) {
        out.push(AdmissibleModulus {
            n: current,
            primes: stack.clone(),
        });
        for (k, pi) in split.iter().enumerate().skip(idx) {
            let p = pi.norm();
            if current.norm().saturating_mul(p) > hi {
                continue;
            }
            for cand in [*pi, pi.conj().primary_associate().expect("split prime")] {
                stack.push(cand);
                dfs(split, k + 1, current * cand, hi, stack, out);
                stack.pop();
            }
        }
    }
    dfs(&split, 0, ONE, hi, &mut stack, &mut out);
    out.retain(|m| m.norm() >= lo);
    for m in &mut out {
        m.primes.sort();
    }
    out.sort_by(|x, y| x.n.cmp(&y.n));
    out
}

/// Count of ideals of each norm up to `limit`: entry k holds #{ideals of
/// norm k}, computed by counting lattice points and dividing out the six
/// units per ideal.
pub fn ideal_norm_counts(limit: i64) -> Vec<u32> {
    let mut counts = vec![0u32; (limit.max(0) + 1) as usize];
    if limit < 1 {
        return counts;
    }
    let sq = (limit as f64).sqrt();
    let bmax = (2.0 * sq / 3.0f64.sqrt()).ceil() as i64 + 1;
    for b in -bmax..=bmax {
        let lo = (b as f64 / 2.0 - sq).floor() as i64 - 1;
        let hi = (b as f64 / 2.0 + sq).ceil() as i64 + 1;
        for a in lo..=hi {
            if a == 0 && b == 0 {
                continue;
            }
            let n = EisensteinInt::new(a, b).norm();
            if n <= limit {
                counts[n as usize] += 1;
            }
        }
    }
    for c in &mut counts {
        debug_assert!(*c % 6 == 0);
        *c /= 6;
    }
    counts
}
