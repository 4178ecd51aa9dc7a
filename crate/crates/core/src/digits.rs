//! Finite words and eventually periodic digit sequences over `{0, …, M}`.
//!
//! Every sequence that appears in this crate is eventually periodic, so it is
//! stored as a preperiod followed by a repeated period. Sequences are kept in
//! canonical form (primitive period, shortest preperiod), which makes
//! sequence equality the same thing as structural equality.
//!
//! The text form is the one used across the command-line tool and JSON:
//! digits are written directly (`"111(0)"`, `"(110)"`) unless some digit is
//! at least 10, in which case all digits are comma separated (`"3,12(0)"`).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A single digit. The alphabet bound `M` is passed explicitly wherever it
/// matters, never stored with the digit.
pub type Digit = u8;

fn check_alphabet(digits: &[Digit], m: Digit) -> Result<()> {
    match digits.iter().find(|&&d| d > m) {
        Some(&d) => Err(Error::Alphabet { digit: d as u32, m }),
        None => Ok(()),
    }
}

fn write_digits(f: &mut fmt::Formatter<'_>, digits: &[Digit], wide: bool) -> fmt::Result {
    for (i, d) in digits.iter().enumerate() {
        if wide && i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{d}")?;
    }
    Ok(())
}

fn parse_digits(input: &str, part: &str) -> Result<Vec<Digit>> {
    let err = |reason: String| Error::Parse { input: input.to_string(), reason };
    if part.is_empty() {
        return Ok(Vec::new());
    }
    if part.contains(',') {
        part.split(',').map(|tok| tok.trim().parse::<Digit>().map_err(|_| err(format!("bad digit {tok:?}")))).collect()
    } else {
        part.chars()
            .map(|c| c.to_digit(10).map(|d| d as Digit).ok_or_else(|| err(format!("bad digit {c:?}"))))
            .collect()
    }
}

/// A finite word `c₁⋯cₙ`, possibly empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Digit>);

impl Word {
    pub fn new(digits: Vec<Digit>) -> Self {
        Word(digits)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn digits(&self) -> &[Digit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_digits(self) -> Vec<Digit> {
        self.0
    }

    /// Digit-wise `M − c`.
    pub fn reflect(&self, m: Digit) -> Result<Word> {
        check_alphabet(&self.0, m)?;
        Ok(Word(self.0.iter().map(|&d| m - d).collect()))
    }

    /// `w⁺`: the last digit increased by one.
    pub fn succ(&self, m: Digit) -> Result<Word> {
        let mut v = self.0.clone();
        match v.last_mut() {
            Some(d) if *d < m => *d += 1,
            Some(d) => return Err(Error::Alphabet { digit: *d as u32 + 1, m }),
            None => return Err(Error::InvalidArgument("successor of the empty word".into())),
        }
        Ok(Word(v))
    }

    /// `w⁻`: the last digit decreased by one.
    pub fn pred(&self) -> Result<Word> {
        let mut v = self.0.clone();
        match v.last_mut() {
            Some(d) if *d > 0 => *d -= 1,
            _ => return Err(Error::InvalidArgument("predecessor needs a last digit > 0".into())),
        }
        Ok(Word(v))
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// The word repeated `k` times.
    pub fn repeat(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }
}

impl From<Vec<Digit>> for Word {
    fn from(v: Vec<Digit>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_digits(f, &self.0, self.0.iter().any(|&d| d >= 10))
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Word> {
        Ok(Word(parse_digits(s, s.trim())?))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// An eventually periodic sequence `w p p p ⋯`, always in canonical form.
///
/// Ordering (`Ord`) is the lexicographic order of the infinite sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpSeq {
    pre: Vec<Digit>,
    period: Vec<Digit>,
}

impl EpSeq {
    /// Builds `pre · period^∞` and brings it into canonical form.
    pub fn new(pre: Vec<Digit>, period: Vec<Digit>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidArgument("period must be nonempty".into()));
        }
        Ok(Self::canonical(pre, period))
    }

    /// `period^∞`.
    pub fn periodic(period: Vec<Digit>) -> Result<Self> {
        Self::new(Vec::new(), period)
    }

    /// `word · 0^∞`.
    pub fn finite(word: Vec<Digit>) -> Self {
        Self::canonical(word, vec![0])
    }

    /// `0^∞`.
    pub fn zero() -> Self {
        EpSeq { pre: Vec::new(), period: vec![0] }
    }

    /// `d^∞`.
    pub fn constant(d: Digit) -> Self {
        EpSeq { pre: Vec::new(), period: vec![d] }
    }

    fn canonical(mut pre: Vec<Digit>, mut period: Vec<Digit>) -> Self {
        let n = period.len();
        if let Some(d) = (1..=n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| period[i] == period[i - d])) {
            period.truncate(d);
        }
        while let (Some(&last), Some(&plast)) = (pre.last(), period.last()) {
            if last != plast {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        EpSeq { pre, period }
    }

    pub fn preperiod(&self) -> &[Digit] {
        &self.pre
    }

    pub fn period(&self) -> &[Digit] {
        &self.period
    }

    /// Digit at 0-based position `i` (written `c_{i+1}` in 1-based notation).
    pub fn digit(&self, i: usize) -> Digit {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    /// The first `n` digits.
    pub fn prefix(&self, n: usize) -> Word {
        Word((0..n).map(|i| self.digit(i)).collect())
    }

    /// Length of preperiod plus period: shifting by more than this only
    /// repeats sequences already seen.
    pub fn window(&self) -> usize {
        self.pre.len() + self.period.len()
    }

    pub fn is_zero(&self) -> bool {
        self.pre.is_empty() && self.period == [0]
    }

    /// Ends in `0^∞` without being `0^∞` itself.
    pub fn is_finite(&self) -> bool {
        self.period == [0] && !self.pre.is_empty()
    }

    /// For a finite sequence, the digits up to and including the last
    /// nonzero one.
    pub fn finite_part(&self) -> Option<Word> {
        self.is_finite().then(|| Word(self.pre.clone()))
    }

    pub fn check_alphabet(&self, m: Digit) -> Result<()> {
        check_alphabet(&self.pre, m)?;
        check_alphabet(&self.period, m)
    }

    /// Digit-wise `M − c`.
    pub fn reflect(&self, m: Digit) -> Result<EpSeq> {
        self.check_alphabet(m)?;
        Ok(Self::canonical(self.pre.iter().map(|&d| m - d).collect(), self.period.iter().map(|&d| m - d).collect()))
    }

    /// Drops the first `n` digits.
    pub fn shift(&self, n: usize) -> EpSeq {
        if n <= self.pre.len() {
            return Self::canonical(self.pre[n..].to_vec(), self.period.clone());
        }
        let mut period = self.period.clone();
        let r = (n - self.pre.len()) % period.len();
        period.rotate_left(r);
        Self::canonical(Vec::new(), period)
    }

    /// `word · self`.
    pub fn prepend(&self, word: &[Digit]) -> EpSeq {
        let mut pre = word.to_vec();
        pre.extend_from_slice(&self.pre);
        Self::canonical(pre, self.period.clone())
    }

    /// Both the sequence and its reflection are infinite; `0^∞` and `M^∞`
    /// count as doubly infinite.
    pub fn is_doubly_infinite(&self, m: Digit) -> bool {
        let all_max = self.pre.iter().chain(&self.period).all(|&d| d == m);
        self.is_zero() || all_max || (self.period != [0] && self.period != [m])
    }
}

/// Lexicographic comparison of two eventually periodic sequences.
pub fn lex_cmp(a: &EpSeq, b: &EpSeq) -> Ordering {
    let n = a.pre.len().max(b.pre.len()) + a.period.len().lcm(&b.period.len());
    (0..n).map(|i| a.digit(i).cmp(&b.digit(i))).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

impl Ord for EpSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        lex_cmp(self, other)
    }
}

impl PartialOrd for EpSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EpSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.pre.iter().chain(&self.period).any(|&d| d >= 10);
        write_digits(f, &self.pre, wide)?;
        f.write_str("(")?;
        write_digits(f, &self.period, wide)?;
        f.write_str(")")
    }
}

impl FromStr for EpSeq {
    type Err = Error;

    /// Accepts `pre(period)`, optionally followed by `^` or `^∞`; a string
    /// without parentheses is read as a finite word followed by `0^∞`.
    fn from_str(s: &str) -> Result<EpSeq> {
        let t = s.trim();
        let t = t.strip_suffix("^∞").or_else(|| t.strip_suffix('^')).unwrap_or(t);
        let err = |reason: &str| Error::Parse { input: s.to_string(), reason: reason.to_string() };
        match t.find('(') {
            None => {
                if t.contains(')') {
                    return Err(err("unbalanced parenthesis"));
                }
                let digits = parse_digits(s, t)?;
                if digits.is_empty() {
                    return Err(err("empty sequence"));
                }
                Ok(EpSeq::finite(digits))
            }
            Some(open) => {
                let close = t.rfind(')').ok_or_else(|| err("missing ')'"))?;
                if close != t.len() - 1 || close < open {
                    return Err(err("period must close the sequence"));
                }
                let pre = parse_digits(s, t[..open].trim_end_matches(','))?;
                let period = parse_digits(s, &t[open + 1..close])?;
                if period.is_empty() {
                    return Err(err("empty period"));
                }
                EpSeq::new(pre, period)
            }
        }
    }
}

impl Serialize for EpSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Position of a base `q` relative to the univoque set `U` and the set `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseClass {
    InU,
    InClosureUNotU,
    InVNotClosureU,
    NotInV,
}

impl BaseClass {
    /// Short name used in text and JSON output.
    pub fn name(self) -> &'static str {
        match self {
            BaseClass::InU => "U",
            BaseClass::InClosureUNotU => "closureU\\U",
            BaseClass::InVNotClosureU => "V\\closureU",
            BaseClass::NotInV => "notV",
        }
    }

    /// Bases for which the univoque graph is defined.
    pub fn has_graph(self) -> bool {
        matches!(self, BaseClass::InClosureUNotU | BaseClass::InVNotClosureU)
    }
}

impl fmt::Display for BaseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for BaseClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Strict (`<`) or weak (`≤`) lexicographic bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strictness {
    Strict,
    Weak,
}

impl Strictness {
    pub fn admits(self, o: Ordering) -> bool {
        match self {
            Strictness::Strict => o == Ordering::Less,
            Strictness::Weak => o != Ordering::Greater,
        }
    }
}

/// Every `n ≥ 1` at which the digit `s_n` satisfies `select` has
/// `tail(σⁿ s)` admitted against `bound`.
fn shifted_tails_bounded(
    s: &EpSeq,
    bound: &EpSeq,
    how: Strictness,
    select: impl Fn(Digit) -> bool,
    tail: impl Fn(EpSeq) -> EpSeq,
) -> bool {
    (1..=s.window()).all(|n| !select(s.digit(n - 1)) || how.admits(lex_cmp(&tail(s.shift(n)), bound)))
}

/// Is `s` the greedy expansion `β(q)` of 1 for some base `q`?
///
/// Checks `σⁿ s < s` whenever `s_n < M`. The word `1 0^∞` passes; it
/// stands for the excluded base `q = 1`.
pub fn is_greedy_beta(m: Digit, s: &EpSeq) -> bool {
    if s.is_zero() || s.check_alphabet(m).is_err() {
        return false;
    }
    shifted_tails_bounded(s, s, Strictness::Strict, |d| d < m, |t| t)
}

/// Is `s` the quasi-greedy expansion `α(q)` of 1 for some base `q`?
///
/// The sequence must be infinite (or `0^∞`) and satisfy `σⁿ s ≤ s`
/// whenever `s_n < M`.
pub fn is_quasigreedy_alpha(m: Digit, s: &EpSeq) -> bool {
    if s.check_alphabet(m).is_err() || s.is_finite() {
        return false;
    }
    shifted_tails_bounded(s, s, Strictness::Weak, |d| d < m, |t| t)
}

/// `β(q)` from `α(q)`: a purely periodic `(α₁⋯α_N)^∞` with `α_N < M`
/// gives the finite `α₁⋯α_N⁺ 0^∞`; otherwise the two coincide.
pub fn beta_from_alpha(m: Digit, alpha: &EpSeq) -> EpSeq {
    if alpha.is_zero() {
        return EpSeq::finite(vec![1]);
    }
    match alpha.period.last() {
        Some(&last) if alpha.pre.is_empty() && last < m => {
            let mut w = alpha.period.clone();
            *w.last_mut().unwrap() += 1;
            EpSeq::finite(w)
        }
        _ => alpha.clone(),
    }
}

/// `α(q)` from `β(q)`: a finite `b₁⋯bₙ 0^∞` gives `(b₁⋯bₙ⁻)^∞`; an infinite
/// greedy expansion is already quasi-greedy.
pub fn alpha_from_beta(beta: &EpSeq) -> EpSeq {
    match beta.finite_part() {
        Some(w) => {
            let mut v = w.into_digits();
            *v.last_mut().unwrap() -= 1;
            EpSeq::canonical(Vec::new(), v)
        }
        None => beta.clone(),
    }
}

/// Classifies the base whose quasi-greedy expansion of 1 is `alpha`,
/// returning the finest class whose reflected-shift test passes.
pub fn classify_alpha(m: Digit, alpha: &EpSeq) -> Result<BaseClass> {
    if !is_quasigreedy_alpha(m, alpha) {
        return Err(Error::NotQuasiGreedy(alpha.to_string()));
    }
    if alpha.is_zero() {
        return Err(Error::BaseIsOne);
    }
    let refl = |t: EpSeq| t.reflect(m).expect("alphabet checked");
    let beta = beta_from_alpha(m, alpha);
    let class = if shifted_tails_bounded(&beta, &beta, Strictness::Strict, |d| d > 0, refl) {
        BaseClass::InU
    } else if shifted_tails_bounded(alpha, alpha, Strictness::Strict, |d| d > 0, refl) {
        BaseClass::InClosureUNotU
    } else if shifted_tails_bounded(alpha, alpha, Strictness::Weak, |d| d > 0, refl) {
        BaseClass::InVNotClosureU
    } else {
        BaseClass::NotInV
    };
    Ok(class)
}

/// Which lexicographic characterization [`is_unique_expansion_seq`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExpansionMode {
    /// The sequence is the only expansion of its value.
    Unique,
    /// The sequence is the unique doubly infinite expansion of its value
    /// (the value lies in `V_q`).
    DoublyInfinite,
}

/// Tests `c` against the bound `alpha = α(q)`:
/// `σⁿ c` below `α` whenever `c_n < M`, and the reflection of `σⁿ c` below
/// `α` whenever `c_n > 0`, for every `n ≥ 1`; strictly in
/// [`ExpansionMode::Unique`] mode, weakly otherwise.
pub fn is_unique_expansion_seq(alpha: &EpSeq, c: &EpSeq, m: Digit, mode: ExpansionMode) -> bool {
    if c.check_alphabet(m).is_err() {
        return false;
    }
    let how = match mode {
        ExpansionMode::Unique => Strictness::Strict,
        ExpansionMode::DoublyInfinite => Strictness::Weak,
    };
    shifted_tails_bounded(c, alpha, how, |d| d < m, |t| t)
        && shifted_tails_bounded(c, alpha, how, |d| d > 0, |t| t.reflect(m).expect("alphabet checked"))
}
