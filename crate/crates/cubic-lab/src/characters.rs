//! Cubic Dirichlet characters over the rational integers: enumeration of all
//! characters of order dividing 3 for a given modulus (via primitive roots
//! and discrete logarithms on each prime-power factor), conductors and
//! primitivity, Gauss sums, and the character attached to an admissible
//! Eisenstein modulus through the cubic residue symbol.
//!
//! Every character of order dividing 3 is even (χ(−1) is simultaneously a
//! square root and a cube root of unity), so evenness is a checked invariant
//! rather than a parameter.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::eisenstein::{cubic_symbol_int, CubicValue, EisensteinInt};
use crate::numerics::{factor_u64, gcd_u64, pow_mod};

/// Errors from character construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharacterError {
    /// The requested modulus was zero.
    ZeroModulus,
    /// The Eisenstein modulus is not coprime to 3, so it does not induce a
    /// rational residue character.
    RamifiedModulus(EisensteinInt),
}

impl fmt::Display for CharacterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharacterError::ZeroModulus => write!(f, "character modulus must be positive"),
            CharacterError::RamifiedModulus(n) => {
                write!(f, "modulus {n} has norm divisible by 3")
            }
        }
    }
}

impl std::error::Error for CharacterError {}

/// A Dirichlet character of order dividing 3, stored as its full value table
/// over residues. Values are exact cube roots of unity (or zero off the
/// coprime residues), so character identity is plain equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CubicCharacter {
    pub modulus: u64,
    /// `values[m]` is χ(m) for 0 ≤ m < modulus.
    pub values: Vec<CubicValue>,
}

impl CubicCharacter {
    /// The principal character for the modulus.
    pub fn principal(q: u64) -> Result<Self, CharacterError> {
        if q == 0 {
            return Err(CharacterError::ZeroModulus);
        }
        let values = (0..q)
            .map(|m| {
                if gcd_u64(m, q) == 1 {
                    CubicValue::Root(0)
                } else {
                    CubicValue::Zero
                }
            })
            .collect();
        Ok(CubicCharacter { modulus: q, values })
    }

    pub fn eval(&self, m: u64) -> CubicValue {
        self.values[(m % self.modulus) as usize]
    }

    pub fn eval_int(&self, m: i64) -> CubicValue {
        self.values[m.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn eval_complex(&self, m: u64) -> Complex64 {
        self.eval(m).to_complex()
    }

    pub fn is_principal(&self) -> bool {
        self.values
            .iter()
            .all(|v| matches!(v, CubicValue::Zero | CubicValue::Root(0)))
    }

    /// χ(−1) = 1 always holds for cubic characters; exposed for checking.
    pub fn is_even(&self) -> bool {
        self.modulus == 1 || self.eval(self.modulus - 1) == CubicValue::Root(0)
    }

    /// Pointwise conjugate (= inverse) character.
    pub fn conjugate(&self) -> Self {
        CubicCharacter {
            modulus: self.modulus,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Smallest d | q such that χ is trivial on every m ≡ 1 (mod d) coprime
    /// to q.
    pub fn conductor(&self) -> u64 {
        let q = self.modulus;
        'next_d: for d in 1..=q {
            if q % d != 0 {
                continue;
            }
            let mut m = 1u64;
            while m < q.max(2) {
                if gcd_u64(m, q) == 1 && self.eval(m) != CubicValue::Root(0) {
                    continue 'next_d;
                }
                m += d;
            }
            return d;
        }
        q
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// Gauss sum τ(χ) = Σ_{a mod q} χ(a) e^{2πi a / q}.
    pub fn gauss_sum(&self) -> Complex64 {
        let q = self.modulus;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..q {
            if let CubicValue::Root(_) = self.values[a as usize] {
                let phase = 2.0 * std::f64::consts::PI * a as f64 / q as f64;
                acc += self.values[a as usize].to_complex() * Complex64::from_polar(1.0, phase);
            }
        }
        acc
    }
}

/// One prime-power factor of a modulus together with the discrete-log table
/// used to read off character values.
struct FactorData {
    pe: u64,
    /// Discrete log base a fixed primitive root, reduced mod 3; only present
    /// when the unit group order is divisible by 3 (so cubic characters can
    /// be nontrivial on this factor).
    dlog_mod3: Option<Vec<u8>>,
}

/// Smallest primitive root modulo p^e for odd prime p.
fn primitive_root(p: u64, e: u32) -> u64 {
    let pe = p.pow(e);
    let order_p = p - 1;
    let prime_divs: Vec<u64> = factor_u64(order_p).into_iter().map(|(r, _)| r).collect();
    let mut g = 2u64;
    loop {
        if gcd_u64(g, p) == 1
            && prime_divs
                .iter()
                .all(|&r| pow_mod(g, order_p / r, p) != 1)
        {
            break;
        }
        g += 1;
    }
    if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        // g generates (Z/p)* but not (Z/p²)*; g + p always does.
        g += p;
    }
    debug_assert!(g < pe);
    g
}

fn factor_data(p: u64, e: u32) -> FactorData {
    let pe = p.pow(e);
    let group_order = if p == 2 {
        pe / 2
    } else {
        pe / p * (p - 1)
    };
    // Cubic characters are nontrivial on this factor only when 3 divides the
    // unit-group order; for p = 2 the group is a 2-group, so never.
    if p == 2 || group_order % 3 != 0 {
        return FactorData { pe, dlog_mod3: None };
    }
    let g = primitive_root(p, e);
    let mut dlog = vec![0u8; pe as usize];
    let mut acc = 1u64;
    for t in 0..group_order {
        dlog[acc as usize] = (t % 3) as u8;
        acc = acc * g % pe;
    }
    debug_assert_eq!(acc, 1, "primitive root order mismatch");
    FactorData {
        pe,
        dlog_mod3: Some(dlog),
    }
}

/// All characters of order dividing 3 for the modulus, the principal
/// character first, in a deterministic order (lexicographic in the ω-exponent
/// chosen on each prime-power factor, factors in increasing order).
pub fn enumerate_cubic_characters(q: u64) -> Result<Vec<CubicCharacter>, CharacterError> {
    if q == 0 {
        return Err(CharacterError::ZeroModulus);
    }
    let factors: Vec<FactorData> = factor_u64(q)
        .into_iter()
        .map(|(p, e)| factor_data(p, e))
        .collect();
    let capable: Vec<usize> = factors
        .iter()
        .enumerate()
        .filter(|(_, f)| f.dlog_mod3.is_some())
        .map(|(i, _)| i)
        .collect();
    let mut out = Vec::with_capacity(3usize.pow(capable.len() as u32));
    // Odometer over ω-exponent choices j ∈ {0, 1, 2} per capable factor.
    let mut js = vec![0u8; capable.len()];
    loop {
        let mut values = Vec::with_capacity(q as usize);
        for m in 0..q {
            if gcd_u64(m, q) != 1 {
                values.push(CubicValue::Zero);
                continue;
            }
            let mut exp = 0u32;
            for (slot, &fi) in capable.iter().enumerate() {
                let f = &factors[fi];
                let table = f.dlog_mod3.as_ref().expect("capable factor has a table");
                exp += js[slot] as u32 * table[(m % f.pe) as usize] as u32;
            }
            values.push(CubicValue::Root((exp % 3) as u8));
        }
        out.push(CubicCharacter { modulus: q, values });
        // advance odometer (most significant slot last so the principal
        // character, all zeros, comes first)
        let mut slot = js.len();
        loop {
            if slot == 0 {
                return Ok(out);
            }
            slot -= 1;
            if js[slot] < 2 {
                js[slot] += 1;
                for j in js.iter_mut().skip(slot + 1) {
                    *j = 0;
                }
                break;
            }
        }
    }
}

/// The primitive characters among [`enumerate_cubic_characters`], i.e. those
/// of conductor exactly q.
pub fn enumerate_primitive_cubic(q: u64) -> Result<Vec<CubicCharacter>, CharacterError> {
    Ok(enumerate_cubic_characters(q)?
        .into_iter()
        .filter(|c| !c.is_principal() && c.is_primitive())
        .collect())
}

/// The Dirichlet character m ↦ (m/n)₃ attached to an Eisenstein modulus of
/// norm coprime to 3. For admissible moduli (squarefree split products) the
/// result is a primitive cubic character modulo N(n).
pub fn character_of_modulus(n: &EisensteinInt) -> Result<CubicCharacter, CharacterError> {
    if n.is_zero() || n.norm() % 3 == 0 {
        return Err(CharacterError::RamifiedModulus(*n));
    }
    let q = n.norm() as u64;
    let values = (0..q)
        .map(|m| cubic_symbol_int(m as i64, n).expect("modulus is coprime to 3"))
        .collect();
    Ok(CubicCharacter { modulus: q, values })
}
