//! Exact arithmetic in the field generated by the base `q`.
//!
//! The base is never a floating-point number. It is the unique root in
//! `(1, M+1]` of an integer polynomial `P` read off from `β(q)`, pinned down
//! by a dyadic isolating interval that is refined on demand. Every point we
//! care about is a fraction `num(q)/den(q)` whose denominator is a product of
//! powers of `q` and `qᵇ − 1`, hence syntactically positive. Signs are
//! decided by interval evaluation; exact zeros are detected through
//! `gcd(D, P)` so the comparison always terminates.

mod field;
mod poly;

pub use field::{isolate_root, value_of_sequence, AlgebraicReal, Denom, QField, RationalInterval};
pub use poly::IntPoly;

use crate::digits::{Digit, EpSeq};
use crate::error::{Error, Result};

/// The polynomial `P` with `P(q) = 0` obtained by clearing denominators in
/// `1 = Σ βᵢ q^{−i}`.
///
/// A finite `β = d₁⋯d_K 0^∞` gives `t^K − d₁t^{K−1} − ⋯ − d_K`. An
/// eventually periodic `β = w p^∞` gives
/// `t^{|w|}(t^{|p|} − 1) − W(t)(t^{|p|} − 1) − P_p(t)`, which is monic as well.
pub fn base_polynomial(m: Digit, beta: &EpSeq) -> Result<IntPoly> {
    beta.check_alphabet(m)?;
    if *beta == EpSeq::finite(vec![1]) {
        return Err(Error::BaseIsOne);
    }
    if beta.is_zero() {
        return Err(Error::NotGreedy(beta.to_string()));
    }
    let w = IntPoly::from_digits(beta.preperiod());
    let a = beta.preperiod().len();
    if let Some(word) = beta.finite_part() {
        return Ok(IntPoly::monomial(word.len(), 1).sub(&IntPoly::from_digits(word.digits())));
    }
    let b = beta.period().len();
    let cyc = IntPoly::t_pow_minus_one(b);
    let p = IntPoly::from_digits(beta.period());
    Ok(IntPoly::monomial(a, 1).mul(&cyc).sub(&w.mul(&cyc)).sub(&p))
}
