use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::poly::{sign_of, IntPoly};
use crate::digits::{Digit, EpSeq};
use crate::error::{Error, Result};

/// A closed interval with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RationalInterval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }
}

/// Bits of precision needed for an interval width of at most `precision`.
fn bits_for(precision: f64) -> u64 {
    if precision.is_nan() || precision <= 0.0 || precision >= 1.0 {
        return 1;
    }
    (-precision.log2()).ceil() as u64
}

/// Dyadic bisection state `[lo, hi] / 2^bits` around the root.
#[derive(Clone, Debug)]
struct Bracket {
    bits: u64,
    lo: BigInt,
    hi: BigInt,
    exact: bool,
}

impl Bracket {
    fn refine(&mut self, p: &IntPoly, sign_hi: Ordering, target_bits: u64) {
        while !self.exact && self.bits < target_bits {
            self.bits += 1;
            let mid = &self.lo + &self.hi;
            self.lo <<= 1;
            self.hi <<= 1;
            match sign_of(&p.eval_dyadic(&mid, self.bits)) {
                Ordering::Equal => {
                    self.lo = mid.clone();
                    self.hi = mid;
                    self.exact = true;
                }
                s if s == sign_hi => self.hi = mid,
                _ => self.lo = mid,
            }
        }
    }

    fn to_rational(&self) -> RationalInterval {
        let den = BigInt::one() << self.bits as usize;
        RationalInterval {
            lo: BigRational::new(self.lo.clone(), den.clone()),
            hi: BigRational::new(self.hi.clone(), den),
        }
    }
}

/// Brackets the unique root of `p` in `(1, M+1]` to width `2^{-bits}`.
fn bracket_root(p: &IntPoly, m: Digit, bits: u64) -> Result<(Bracket, Ordering)> {
    let one = BigInt::one();
    let top = BigInt::from(m as u32 + 1);
    let mut q = p.clone();
    while !q.is_zero() && q.eval_int(&one).is_zero() {
        q = q.divide_by_root(&one);
    }
    if q.is_zero() || q.count_roots_between(&one, &top) != 1 {
        return Err(Error::Degenerate(format!("{p} does not have exactly one root in (1, {}]", m as u32 + 1)));
    }
    let sign_hi = sign_of(&p.eval_int(&top));
    let mut br = Bracket { bits: 0, lo: one.clone(), hi: top.clone(), exact: sign_hi == Ordering::Equal };
    if br.exact {
        br.lo = top;
        return Ok((br, sign_hi));
    }
    // The width starts at M; a few extra halvings bring it below 2^{-bits}.
    br.refine(p, sign_hi, bits + 8);
    if !br.exact && br.lo == (BigInt::one() << br.bits as usize) {
        let s1 = sign_of(&p.eval_int(&one));
        if s1 == sign_hi || s1 == Ordering::Equal {
            return Err(Error::Degenerate(format!("{p} has no sign change in (1, {}]", m as u32 + 1)));
        }
    }
    Ok((br, sign_hi))
}

/// Rational interval of width at most `precision` around the unique root
/// of `p` in `(1, M+1]`, found by bisection with exact evaluation.
pub fn isolate_root(p: &IntPoly, m: Digit, precision: f64) -> Result<RationalInterval> {
    Ok(bracket_root(p, m, bits_for(precision))?.0.to_rational())
}

/// Powers of the bracket endpoints, pre-scaled so that interval evaluation
/// of any polynomial of degree `< deg P` is a plain dot product.
#[derive(Debug)]
struct Enclosure {
    bracket: Bracket,
    lo_pows: Vec<BigInt>,
    hi_pows: Vec<BigInt>,
}

impl Enclosure {
    fn new(bracket: Bracket, top_degree: usize) -> Self {
        let pows = |x: &BigInt| {
            let mut out = Vec::with_capacity(top_degree + 1);
            let mut xp = BigInt::one();
            for i in 0..=top_degree {
                out.push(&xp << (bracket.bits as usize * (top_degree - i)));
                xp *= x;
            }
            out
        };
        let lo_pows = pows(&bracket.lo);
        let hi_pows = pows(&bracket.hi);
        Enclosure { bracket, lo_pows, hi_pows }
    }

    /// Lower and upper bounds of `d` over the bracket, on a common scale.
    /// Valid because every point of the bracket exceeds 1, so each monomial
    /// is increasing there.
    fn bounds(&self, d: &IntPoly) -> (BigInt, BigInt) {
        let mut low = BigInt::zero();
        let mut high = BigInt::zero();
        for (i, c) in d.coeffs().iter().enumerate() {
            if c.is_positive() {
                low += c * &self.lo_pows[i];
                high += c * &self.hi_pows[i];
            } else if c.is_negative() {
                low += c * &self.hi_pows[i];
                high += c * &self.lo_pows[i];
            }
        }
        (low, high)
    }
}

/// The number field `ℚ(q)` of one base, together with the current
/// isolating interval of `q`.
///
/// The interval only ever shrinks; refinement takes a write lock, reads take
/// a snapshot, so concurrent comparisons are safe.
pub struct QField {
    m: Digit,
    modulus: IntPoly,
    sign_hi: Ordering,
    enclosure: RwLock<Arc<Enclosure>>,
    den_cache: Mutex<HashMap<Denom, IntPoly>>,
}

impl fmt::Debug for QField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QField").field("modulus", &self.modulus.to_string()).finish()
    }
}

impl QField {
    /// Field generated by the root of the monic polynomial `p` in `(1, M+1]`,
    /// isolated to width `precision`.
    pub fn new(p: IntPoly, m: Digit, precision: f64) -> Result<Arc<QField>> {
        if !p.is_monic() {
            return Err(Error::Degenerate(format!("defining polynomial {p} is not monic")));
        }
        let (bracket, sign_hi) = bracket_root(&p, m, bits_for(precision).max(32))?;
        let top = p.degree().unwrap().saturating_sub(1);
        Ok(Arc::new(QField {
            m,
            modulus: p,
            sign_hi,
            enclosure: RwLock::new(Arc::new(Enclosure::new(bracket, top))),
            den_cache: Mutex::new(HashMap::new()),
        }))
    }

    pub fn alphabet_bound(&self) -> Digit {
        self.m
    }

    pub fn defining_poly(&self) -> &IntPoly {
        &self.modulus
    }

    fn top_degree(&self) -> usize {
        self.modulus.degree().unwrap().saturating_sub(1)
    }

    fn snapshot(&self) -> Arc<Enclosure> {
        self.enclosure.read().expect("enclosure lock").clone()
    }

    /// Shrinks the isolating interval to width at most `2^{-bits}`.
    pub fn refine_to_bits(&self, bits: u64) {
        let mut guard = self.enclosure.write().expect("enclosure lock");
        if guard.bracket.exact || guard.bracket.bits >= bits {
            return;
        }
        let mut br = guard.bracket.clone();
        br.refine(&self.modulus, self.sign_hi, bits);
        *guard = Arc::new(Enclosure::new(br, self.top_degree()));
    }

    /// Current isolating interval.
    pub fn interval(&self) -> RationalInterval {
        self.snapshot().bracket.to_rational()
    }

    /// Approximation of `q`, accurate to about `1e-15`.
    pub fn q_f64(&self) -> f64 {
        self.refine_to_bits(56);
        self.interval().midpoint_f64()
    }

    pub(crate) fn reduce(&self, p: &IntPoly) -> IntPoly {
        p.rem_monic(&self.modulus)
    }

    fn den_poly(&self, d: &Denom) -> IntPoly {
        let mut cache = self.den_cache.lock().expect("cache lock");
        cache.entry(d.clone()).or_insert_with(|| self.reduce(&d.poly())).clone()
    }

    /// Does the reduced polynomial `d` vanish at `q`? Decided through
    /// `g = gcd(d, P)`: `q` is a simple root of `P`, so it is a root of `g`
    /// exactly when `g` changes sign across the bracket.
    fn vanishes_at_q(&self, d: &IntPoly, enc: &Enclosure) -> bool {
        let g = d.gcd(&self.modulus);
        if g.degree().is_none_or(|k| k == 0) {
            return false;
        }
        let br = &enc.bracket;
        let s_lo = sign_of(&g.eval_dyadic(&br.lo, br.bits));
        let s_hi = sign_of(&g.eval_dyadic(&br.hi, br.bits));
        s_lo == Ordering::Equal || s_hi == Ordering::Equal || s_lo != s_hi
    }

    /// Exact sign of `d(q)` for a polynomial already reduced modulo `P`.
    fn sign_reduced(&self, d: &IntPoly) -> Ordering {
        if d.is_zero() {
            return Ordering::Equal;
        }
        let mut gcd_checked = false;
        loop {
            let enc = self.snapshot();
            let (low, high) = enc.bounds(d);
            if low.is_positive() {
                return Ordering::Greater;
            }
            if high.is_negative() {
                return Ordering::Less;
            }
            if enc.bracket.exact {
                return sign_of(&low);
            }
            if !gcd_checked {
                gcd_checked = true;
                if self.vanishes_at_q(d, &enc) {
                    return Ordering::Equal;
                }
            }
            self.refine_to_bits(enc.bracket.bits * 2);
        }
    }

    /// The integer `k` as a field element.
    pub fn int(self: &Arc<Self>, k: i64) -> AlgebraicReal {
        AlgebraicReal { num: self.reduce(&IntPoly::constant(k)), den: Denom::one(), field: self.clone() }
    }

    /// The base `q` itself.
    pub fn q(self: &Arc<Self>) -> AlgebraicReal {
        self.int(1).mul_q()
    }
}

/// Denominator `q^a · Π (q^b − 1)^{e_b}`, kept factored so that positivity
/// for `q > 1` is evident.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Denom {
    q_pow: u32,
    cyclo: BTreeMap<u32, u32>,
}

impl Denom {
    pub fn one() -> Self {
        Denom::default()
    }

    pub fn q_power(a: u32) -> Self {
        Denom { q_pow: a, cyclo: BTreeMap::new() }
    }

    fn with_cyclo(mut self, b: u32) -> Self {
        *self.cyclo.entry(b).or_insert(0) += 1;
        self
    }

    fn lcm(&self, other: &Denom) -> Denom {
        let mut cyclo = self.cyclo.clone();
        for (&b, &e) in &other.cyclo {
            let slot = cyclo.entry(b).or_insert(0);
            *slot = (*slot).max(e);
        }
        Denom { q_pow: self.q_pow.max(other.q_pow), cyclo }
    }

    /// `self / other`, assuming `other` divides `self`.
    fn quotient(&self, other: &Denom) -> Denom {
        let mut cyclo = BTreeMap::new();
        for (&b, &e) in &self.cyclo {
            let rest = e - other.cyclo.get(&b).copied().unwrap_or(0);
            if rest > 0 {
                cyclo.insert(b, rest);
            }
        }
        Denom { q_pow: self.q_pow - other.q_pow, cyclo }
    }

    /// The denominator expanded as a polynomial in `t`.
    pub fn poly(&self) -> IntPoly {
        let mut p = IntPoly::monomial(self.q_pow as usize, 1);
        for (&b, &e) in &self.cyclo {
            p = p.mul(&IntPoly::t_pow_minus_one(b as usize).pow(e));
        }
        p
    }
}

/// An element `num(q)/den(q)` of `ℚ(q)`.
///
/// The numerator is kept reduced modulo the defining polynomial. Ordering
/// and equality are exact; values from different fields must not be mixed.
#[derive(Clone)]
pub struct AlgebraicReal {
    num: IntPoly,
    den: Denom,
    field: Arc<QField>,
}

impl AlgebraicReal {
    pub fn field(&self) -> &Arc<QField> {
        &self.field
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.num
    }

    pub fn denominator(&self) -> &Denom {
        &self.den
    }

    fn same_field(&self, other: &AlgebraicReal) {
        assert!(Arc::ptr_eq(&self.field, &other.field), "values from different base contexts");
    }

    /// Numerators of both values over their least common denominator.
    fn align(&self, other: &AlgebraicReal) -> (IntPoly, IntPoly, Denom) {
        self.same_field(other);
        if self.den == other.den {
            return (self.num.clone(), other.num.clone(), self.den.clone());
        }
        let l = self.den.lcm(&other.den);
        let f = &self.field;
        let a = f.reduce(&self.num.mul(&f.den_poly(&l.quotient(&self.den))));
        let b = f.reduce(&other.num.mul(&f.den_poly(&l.quotient(&other.den))));
        (a, b, l)
    }

    pub fn add(&self, other: &AlgebraicReal) -> AlgebraicReal {
        let (a, b, den) = self.align(other);
        AlgebraicReal { num: a.add(&b), den, field: self.field.clone() }
    }

    pub fn sub(&self, other: &AlgebraicReal) -> AlgebraicReal {
        let (a, b, den) = self.align(other);
        AlgebraicReal { num: a.sub(&b), den, field: self.field.clone() }
    }

    pub fn neg(&self) -> AlgebraicReal {
        AlgebraicReal { num: self.num.neg(), den: self.den.clone(), field: self.field.clone() }
    }

    /// `q·x`.
    pub fn mul_q(&self) -> AlgebraicReal {
        if self.den.q_pow > 0 {
            let mut den = self.den.clone();
            den.q_pow -= 1;
            return AlgebraicReal { num: self.num.clone(), den, field: self.field.clone() };
        }
        AlgebraicReal {
            num: self.field.reduce(&self.num.shift_up(1)),
            den: self.den.clone(),
            field: self.field.clone(),
        }
    }

    /// `x − k`.
    pub fn sub_int(&self, k: i64) -> AlgebraicReal {
        let d = self.field.den_poly(&self.den);
        let num = self.num.sub(&d.scale(&BigInt::from(k)));
        AlgebraicReal { num, den: self.den.clone(), field: self.field.clone() }
    }

    /// The digit map `T_k(x) = q·x − k`.
    pub fn apply_tk(&self, k: Digit) -> AlgebraicReal {
        self.mul_q().sub_int(k as i64)
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        self.field.sign_reduced(&self.num)
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == Ordering::Equal
    }

    /// Exact comparison.
    pub fn compare(&self, other: &AlgebraicReal) -> Ordering {
        let (a, b, _) = self.align(other);
        if a == b {
            return Ordering::Equal;
        }
        self.field.sign_reduced(&a.sub(&b))
    }

    /// Rational approximation with absolute error below `10^{-places}`.
    pub fn approx(&self, places: u32) -> BigRational {
        let f = &self.field;
        let tol = BigRational::new(BigInt::one(), BigInt::from(10).pow(places + 1));
        let dpoly = f.den_poly(&self.den);
        loop {
            let enc = f.snapshot();
            let (nl, nh) = enc.bounds(&self.num);
            let (dl, dh) = enc.bounds(&dpoly);
            if dl.is_positive() {
                let cands = [
                    BigRational::new(nl.clone(), dl.clone()),
                    BigRational::new(nl.clone(), dh.clone()),
                    BigRational::new(nh.clone(), dl.clone()),
                    BigRational::new(nh.clone(), dh.clone()),
                ];
                let lo = cands.iter().min().unwrap().clone();
                let hi = cands.iter().max().unwrap().clone();
                if &hi - &lo <= tol || enc.bracket.exact {
                    return (lo + hi) / BigRational::from_integer(2.into());
                }
            }
            f.refine_to_bits(enc.bracket.bits * 2);
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.approx(17).to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal string rounded to `places` digits after the point.
    pub fn decimal(&self, places: u32) -> String {
        decimal_string(&self.approx(places + 2), places)
    }
}

/// Rounds a rational to `places` decimals (half away from zero).
pub(crate) fn decimal_string(x: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10).pow(places);
    let scaled = x * BigRational::from_integer(scale.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let r = if scaled.is_negative() { -((-scaled + half).floor()) } else { (scaled + half).floor() };
    let n = r.to_integer();
    let neg = n.is_negative();
    let digits = n.abs().to_string();
    let digits = format!("{:0>width$}", digits, width = places as usize + 1);
    let (int, frac) = digits.split_at(digits.len() - places as usize);
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

impl PartialEq for AlgebraicReal {
    fn eq(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Equal
    }
}

impl Eq for AlgebraicReal {}

impl PartialOrd for AlgebraicReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlgebraicReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

impl fmt::Debug for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({}) ≈ {}", self.num, self.den.poly(), self.decimal(12))
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.decimal(12))
    }
}

impl Serialize for AlgebraicReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("AlgebraicReal", 3)?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.den.poly())?;
        st.serialize_field("approx", &self.decimal(12))?;
        st.end()
    }
}

/// Exact value `Σ cᵢ q^{−i}` of an eventually periodic digit sequence:
/// for preperiod `w` and period `p`,
/// `(W(q)(q^{|p|} − 1) + P(q)) / (q^{|w|}(q^{|p|} − 1))`.
pub fn value_of_sequence(field: &Arc<QField>, s: &EpSeq) -> AlgebraicReal {
    let a = s.preperiod().len() as u32;
    let w = IntPoly::from_digits(s.preperiod());
    if s.period() == [0] {
        return AlgebraicReal { num: field.reduce(&w), den: Denom::q_power(a), field: field.clone() };
    }
    let b = s.period().len();
    let cyc = IntPoly::t_pow_minus_one(b);
    let num = w.mul(&cyc).add(&IntPoly::from_digits(s.period()));
    AlgebraicReal { num: field.reduce(&num), den: Denom::q_power(a).with_cyclo(b as u32), field: field.clone() }
}
