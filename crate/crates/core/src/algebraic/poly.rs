use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

/// Polynomial with arbitrary-precision integer coefficients, stored
/// little-endian (index `i` holds the coefficient of `tⁱ`). The leading
/// coefficient is nonzero unless the polynomial is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// `c·tᵏ`.
    pub fn monomial(k: usize, c: impl Into<BigInt>) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c.into();
        Self::new(v)
    }

    /// `tᵇ − 1`.
    pub fn t_pow_minus_one(b: usize) -> Self {
        let mut v = vec![BigInt::zero(); b + 1];
        v[0] = BigInt::from(-1);
        v[b] += 1;
        Self::new(v)
    }

    /// `Σ dᵢ t^{n−i}` for the word `d₁⋯dₙ`: the word read as a base-`t`
    /// integer.
    pub fn from_digits(digits: &[u8]) -> Self {
        Self::new(digits.iter().rev().map(|&d| BigInt::from(d)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(|c| c.is_one())
    }

    pub fn neg(&self) -> Self {
        IntPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigInt::zero();
        Self::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplication by `tᵏ`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigInt::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs: v }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::new(v)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    /// Remainder modulo a monic polynomial; stays in `ℤ[t]`.
    pub fn rem_monic(&self, p: &IntPoly) -> Self {
        debug_assert!(p.is_monic());
        let dp = p.degree().expect("nonzero modulus");
        let mut v = self.coeffs.clone();
        while v.len() > dp {
            let top = v.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let base = v.len() - dp;
            for (j, c) in p.coeffs[..dp].iter().enumerate() {
                v[base + j] -= &top * c;
            }
        }
        Self::new(v)
    }

    /// `lc(b)^{deg a − deg b + 1}·a mod b`, together with the exponent used.
    fn pseudo_rem(&self, b: &IntPoly) -> (IntPoly, u32) {
        let db = b.degree().expect("nonzero divisor");
        let lb = b.lead().unwrap().clone();
        let mut r = self.coeffs.clone();
        let mut e = 0u32;
        while r.len() > db && !r.is_empty() {
            let top = r.pop().unwrap();
            e += 1;
            for c in r.iter_mut() {
                *c *= &lb;
            }
            if top.is_zero() {
                continue;
            }
            let base = r.len() - db;
            for (j, c) in b.coeffs[..db].iter().enumerate() {
                r[base + j] -= &top * c;
            }
            while r.last().is_some_and(|c| c.is_zero()) && r.len() > db {
                r.pop();
                e += 1;
                for c in r.iter_mut() {
                    *c *= &lb;
                }
            }
        }
        (IntPoly::new(r), e)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the (positive) content.
    pub fn primitive(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntPoly { coeffs: self.coeffs.iter().map(|c| c / &g).collect() }
    }

    /// Greatest common divisor over `ℚ[t]`, returned primitive with a
    /// positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.primitive(), other.primitive());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let (r, _) = a.pseudo_rem(&b);
            a = b;
            b = r.primitive();
        }
        if a.lead().is_some_and(|c| c.is_negative()) {
            a = a.neg();
        }
        a
    }

    /// `2^{s·deg}·p(x / 2^s)`, an integer with the sign of `p(x / 2^s)`.
    pub fn eval_dyadic(&self, x: &BigInt, s: u64) -> BigInt {
        let d = match self.degree() {
            Some(d) => d,
            None => return BigInt::zero(),
        };
        let mut acc = self.coeffs[d].clone();
        for i in (0..d).rev() {
            acc = acc * x + (&self.coeffs[i] << (s as usize * (d - i)));
        }
        acc
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    /// Sturm sequence `p, p', −rem, …` built from sign-corrected primitive
    /// pseudo-remainders, so that only signs are meaningful.
    fn sturm_sequence(&self) -> Vec<IntPoly> {
        let mut seq = vec![self.primitive(), self.derivative().primitive()];
        loop {
            let n = seq.len();
            let b = &seq[n - 1];
            if b.degree().is_none_or(|d| d == 0) {
                break;
            }
            let (r, e) = seq[n - 2].pseudo_rem(b);
            if r.is_zero() {
                break;
            }
            let flip = b.lead().unwrap().is_negative() && e % 2 == 1;
            let next = if flip { r.primitive() } else { r.primitive().neg() };
            seq.push(next);
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`
    /// for integers `a < b` with `p(a) ≠ 0`.
    pub fn count_roots_between(&self, a: &BigInt, b: &BigInt) -> usize {
        let seq = self.sturm_sequence();
        let variations = |x: &BigInt| {
            let signs: Vec<Sign> = seq.iter().map(|p| p.eval_int(x).sign()).filter(|s| *s != Sign::NoSign).collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        variations(a).saturating_sub(variations(b))
    }

    /// `(self, t − a)` division when `a` is a root; used to drop a factor.
    pub fn divide_by_root(&self, a: &BigInt) -> IntPoly {
        let mut out = vec![BigInt::zero(); self.coeffs.len().saturating_sub(1)];
        let mut carry = BigInt::zero();
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i] + &carry * a;
            if i > 0 {
                out[i - 1] = c.clone();
            }
            carry = c;
        }
        IntPoly::new(out)
    }

    pub fn sign_at_int(&self, x: &BigInt) -> Ordering {
        self.eval_int(x).sign().cmp_zero()
    }
}

trait SignCmp {
    fn cmp_zero(self) -> Ordering;
}

impl SignCmp for Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

pub(crate) fn sign_of(x: &BigInt) -> Ordering {
    x.sign().cmp_zero()
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for IntPoly {
    /// Coefficients little-endian; values outside the 64-bit range are
    /// written as decimal strings.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            match c.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}
