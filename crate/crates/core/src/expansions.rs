//! Expansions of concrete points: greedy and quasi-greedy digit generation,
//! exact counting of all expansions, and points with a prescribed finite
//! number of expansions.
//!
//! Every step works on exact remainders `r ∈ ℚ(q)`: reading the digit `d`
//! maps `r` to `T_d(r) = q·r − d`, and `d` is feasible when the result stays
//! in `[0, M/(q−1)]`. For eventually periodic inputs the set of reachable
//! remainders is finite in practice, so the branching structure of all
//! expansions is a finite digraph that can be analysed exactly.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::algebraic::AlgebraicReal;
use crate::base::BaseContext;
use crate::digits::{lex_cmp, BaseClass, Digit, EpSeq, Strictness, Word};
use crate::digraph;
use crate::error::{Error, Result};

/// Default limit on the number of distinct remainders explored by
/// [`count_expansions`].
pub const DEFAULT_CAP: usize = 10_000;
/// Step limit of [`quasi_greedy_expand`] before giving up on finding a period.
pub const QUASI_GREEDY_STEP_LIMIT: usize = 10_000;
/// Largest number of expansions materialized in an [`ExpansionCount`].
pub const MAX_WITNESSES: usize = 1024;
/// Largest number of candidate tails tried by [`default_witness_tail`].
pub const TAIL_SEARCH_LIMIT: usize = 2_000_000;

fn check_range(ctx: &BaseContext, x: &AlgebraicReal) -> Result<()> {
    if x.signum().is_lt() || x > &ctx.max_value() {
        return Err(Error::OutOfRange(x.decimal(12)));
    }
    Ok(())
}

/// The first `len` digits of the greedy expansion of `x`: at each step the
/// largest digit leaving a nonnegative remainder.
pub fn greedy_expand(ctx: &BaseContext, x: &AlgebraicReal, len: usize) -> Result<Word> {
    check_range(ctx, x)?;
    let mut r = x.clone();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let qr = r.mul_q();
        let d = (0..=ctx.m())
            .rev()
            .find(|&d| !qr.sub_int(d as i64).signum().is_lt())
            .expect("digit 0 is always admissible");
        r = qr.sub_int(d as i64);
        out.push(d);
    }
    Ok(Word::new(out))
}

/// The quasi-greedy expansion of `x`: at each step the largest digit
/// leaving a positive remainder, and `0^∞` once the remainder vanishes.
/// Remainders are tracked exactly until one repeats.
pub fn quasi_greedy_expand(ctx: &BaseContext, x: &AlgebraicReal) -> Result<EpSeq> {
    check_range(ctx, x)?;
    let mut seen: BTreeMap<AlgebraicReal, usize> = BTreeMap::new();
    let mut digits = Vec::new();
    let mut r = x.clone();
    for step in 0..QUASI_GREEDY_STEP_LIMIT {
        if r.is_zero() {
            return EpSeq::new(digits, vec![0]);
        }
        if let Some(&start) = seen.get(&r) {
            let period = digits.split_off(start);
            return EpSeq::new(digits, period);
        }
        seen.insert(r.clone(), step);
        let qr = r.mul_q();
        let d = (0..=ctx.m())
            .rev()
            .find(|&d| qr.sub_int(d as i64).signum().is_gt())
            .ok_or_else(|| Error::Inconsistent(format!("no positive remainder after {step} digits")))?;
        r = qr.sub_int(d as i64);
        digits.push(d);
    }
    Err(Error::BoundExceeded(QUASI_GREEDY_STEP_LIMIT))
}

/// Outcome of [`count_expansions`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "count", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CountKind {
    /// Exactly this many expansions.
    Exact(usize),
    /// Infinitely many expansions: a branching remainder lies on a cycle.
    InfiniteCycle,
    /// The exploration hit the state cap without reaching a verdict.
    CapExceeded,
}

impl fmt::Display for CountKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountKind::Exact(k) => write!(f, "EXACT({k})"),
            CountKind::InfiniteCycle => f.write_str("INFINITE_CYCLE"),
            CountKind::CapExceeded => f.write_str("CAP_EXCEEDED"),
        }
    }
}

/// Number of expansions of a point, with the expansions themselves when
/// there are finitely many (at most [`MAX_WITNESSES`] are listed).
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionCount {
    pub kind: CountKind,
    /// Distinct remainders explored.
    pub states: usize,
    pub witnesses: Vec<EpSeq>,
}

/// The branching structure of all expansions of one point.
struct RemainderGraph {
    succ: Vec<Vec<(Digit, usize)>>,
    complete: bool,
}

fn explore(ctx: &BaseContext, x: &AlgebraicReal, cap: usize) -> RemainderGraph {
    let top = ctx.max_value();
    let mut index: BTreeMap<AlgebraicReal, usize> = BTreeMap::new();
    let mut states = vec![x.clone()];
    let mut succ: Vec<Vec<(Digit, usize)>> = Vec::new();
    index.insert(x.clone(), 0);
    let mut next = 0;
    while next < states.len() {
        let qr = states[next].mul_q();
        let mut out = Vec::new();
        for d in 0..=ctx.m() {
            let t = qr.sub_int(d as i64);
            if t.signum().is_lt() || t > top {
                continue;
            }
            let id = match index.get(&t) {
                Some(&id) => id,
                None => {
                    if states.len() >= cap {
                        succ.push(out);
                        return RemainderGraph { succ, complete: false };
                    }
                    let id = states.len();
                    index.insert(t.clone(), id);
                    states.push(t);
                    id
                }
            };
            out.push((d, id));
        }
        succ.push(out);
        next += 1;
    }
    RemainderGraph { succ, complete: true }
}

/// Counts the expansions of `x` by exploring every remainder reachable
/// through feasible digits, identifying equal remainders exactly.
///
/// The count is infinite exactly when some remainder with two or more
/// feasible digits lies on a cycle; otherwise each cycle is followed
/// deterministically and the expansions are the paths into the cycles.
pub fn count_expansions(ctx: &BaseContext, x: &AlgebraicReal, cap: usize) -> Result<ExpansionCount> {
    check_range(ctx, x)?;
    if cap == 0 {
        return Err(Error::InvalidArgument("cap must be positive".into()));
    }
    let rg = explore(ctx, x, cap);
    let n = rg.succ.len();
    // Only fully expanded states take part in the cycle analysis.
    let adj: Vec<Vec<usize>> = rg.succ.iter().map(|s| s.iter().map(|&(_, t)| t).filter(|&t| t < n).collect()).collect();
    let comps = digraph::tarjan(&adj);
    let mut on_cycle = vec![false; n];
    for comp in &comps {
        if digraph::is_cyclic(&adj, comp) {
            if comp.iter().any(|&v| rg.succ[v].len() >= 2) {
                return Ok(ExpansionCount { kind: CountKind::InfiniteCycle, states: n, witnesses: Vec::new() });
            }
            for &v in comp {
                on_cycle[v] = true;
            }
        }
    }
    if !rg.complete {
        return Ok(ExpansionCount { kind: CountKind::CapExceeded, states: n, witnesses: Vec::new() });
    }
    // Paths into the cycles, counted in depth-first postorder.
    let mut count = vec![0u128; n];
    let mut done = vec![false; n];
    for root in 0..n {
        if done[root] {
            continue;
        }
        let mut stack = vec![(root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if done[v] {
                continue;
            }
            if on_cycle[v] {
                count[v] = 1;
                done[v] = true;
                continue;
            }
            if expanded {
                count[v] = rg.succ[v].iter().map(|&(_, t)| count[t]).fold(0u128, |a, b| a.saturating_add(b));
                done[v] = true;
                continue;
            }
            stack.push((v, true));
            for &(_, t) in &rg.succ[v] {
                if !done[t] {
                    stack.push((t, false));
                }
            }
        }
    }
    let total = usize::try_from(count[0]).map_err(|_| Error::BoundExceeded(usize::MAX))?;
    let mut witnesses = Vec::new();
    let mut prefix = Vec::new();
    collect_witnesses(&rg.succ, &on_cycle, 0, &mut prefix, &mut witnesses)?;
    if total <= MAX_WITNESSES && witnesses.len() != total {
        return Err(Error::Inconsistent(format!("counted {total} expansions but listed {}", witnesses.len())));
    }
    Ok(ExpansionCount { kind: CountKind::Exact(total), states: n, witnesses })
}

fn collect_witnesses(
    succ: &[Vec<(Digit, usize)>],
    on_cycle: &[bool],
    v: usize,
    prefix: &mut Vec<Digit>,
    out: &mut Vec<EpSeq>,
) -> Result<()> {
    if out.len() >= MAX_WITNESSES {
        return Ok(());
    }
    if on_cycle[v] {
        let mut period = Vec::new();
        let mut u = v;
        loop {
            let (d, t) = succ[u][0];
            period.push(d);
            u = t;
            if u == v {
                break;
            }
        }
        out.push(EpSeq::new(prefix.clone(), period)?);
        return Ok(());
    }
    for &(d, t) in &succ[v] {
        prefix.push(d);
        collect_witnesses(succ, on_cycle, t, prefix, out)?;
        prefix.pop();
    }
    Ok(())
}

/// Which lexicographic condition on a tail sequence failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterCondition {
    /// `c_{n+1}c_{n+2}⋯` below `α(q)` for `n = 0` and whenever `c_n < M`.
    TailBelowAlpha,
    /// The reflection of `c_{n+1}c_{n+2}⋯` below `α(q)` for `n = 0` and
    /// whenever `c_n > 0`.
    ReflectedTailBelowAlpha,
    /// `α_{k+1}⋯α_N⁺ c` below `α(q)` whenever `1 ≤ k < N` and `α_k < M`.
    CarriedPrefixBelowAlpha,
}

/// Where a tail sequence failed the filter: the condition and the shift
/// `n` (or the split point `k` for the carried-prefix condition).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FilterFailure {
    pub condition: FilterCondition,
    pub index: usize,
}

/// Result of [`f_family_filter`].
#[derive(Clone, Debug, Serialize)]
pub struct FilterReport {
    pub strictness: &'static str,
    pub passed: bool,
    pub failure: Option<FilterFailure>,
    /// The simpler sufficient pair: `c₁⋯c_k ≤ \overline{α₁⋯α_k}` and
    /// `c_{k+1}c_{k+2}⋯ ≤ α(q)` whenever `1 ≤ k < N` and `α_k < M`.
    pub prefix_split_pair: bool,
    /// `c` starts with `\overline{α₁⋯α_N}`.
    pub normal_form: bool,
}

fn require_finite_beta(ctx: &BaseContext) -> Result<Word> {
    ctx.beta().finite_part().ok_or(Error::UnsupportedClass(ctx.class()))
}

/// First split point `k` (`1 ≤ k < N`, `β_k < M`) at which
/// `β_{k+1}⋯β_N c` is not admitted below `bound`, where `β₁⋯β_N` is the
/// finite greedy expansion of 1 in the base of `ctx`.
pub fn carry_prefixes_below(ctx: &BaseContext, c: &EpSeq, bound: &EpSeq, how: Strictness) -> Result<Option<usize>> {
    let b = require_finite_beta(ctx)?;
    let b = b.digits();
    let m = ctx.m();
    Ok((1..b.len()).find(|&k| b[k - 1] < m && !how.admits(lex_cmp(&c.prepend(&b[k..]), bound))))
}

/// Checks the lexicographic conditions on a tail sequence `c` under which
/// the points `(1 0^{(m−1)N} c)_q` have exactly `m` expansions (strict
/// form), or their weak relaxation. Also reports the simpler sufficient
/// pair of conditions and whether `c` is in normal form.
pub fn f_family_filter(ctx: &BaseContext, c: &EpSeq, how: Strictness) -> Result<FilterReport> {
    c.check_alphabet(ctx.m())?;
    let alpha = ctx.alpha();
    let m = ctx.m();
    let w = require_finite_beta(ctx)?;
    let n = ctx.n_period();
    let reflect = |s: &EpSeq| s.reflect(m).expect("alphabet checked");

    let mut failure = None;
    for i in 0..=c.window() {
        let digit = (i > 0).then(|| c.digit(i - 1));
        let tail = c.shift(i);
        if digit.is_none_or(|d| d < m) && !how.admits(lex_cmp(&tail, alpha)) {
            failure = Some(FilterFailure { condition: FilterCondition::TailBelowAlpha, index: i });
            break;
        }
        if digit.is_none_or(|d| d > 0) && !how.admits(lex_cmp(&reflect(&tail), alpha)) {
            failure = Some(FilterFailure { condition: FilterCondition::ReflectedTailBelowAlpha, index: i });
            break;
        }
    }
    if failure.is_none() {
        if let Some(k) = carry_prefixes_below(ctx, c, alpha, how)? {
            failure = Some(FilterFailure { condition: FilterCondition::CarriedPrefixBelowAlpha, index: k });
        }
    }

    let a = ctx.alpha_word();
    let abar = a.reflect(m)?;
    let prefix_split_pair = (1..n)
        .filter(|&k| a.digits()[k - 1] < m)
        .all(|k| c.prefix(k).digits() <= &abar.digits()[..k] && lex_cmp(&c.shift(k), alpha).is_le());
    let normal_form = c.prefix(n) == abar;
    debug_assert_eq!(w.len(), n);
    Ok(FilterReport {
        strictness: match how {
            Strictness::Strict => "strict",
            Strictness::Weak => "weak",
        },
        passed: failure.is_none(),
        failure,
        prefix_split_pair,
        normal_form,
    })
}

/// The lexicographically least tail `\overline{α₁⋯α_N} p^∞` with
/// `1 ≤ |p| ≤ 2N` that passes the strict filter.
pub fn default_witness_tail(ctx: &BaseContext) -> Result<EpSeq> {
    require_finite_beta(ctx)?;
    let m = ctx.m();
    let n = ctx.n_period();
    let head = ctx.alpha_word().reflect(m)?.into_digits();
    let radix = m as u64 + 1;
    let mut tried = 0u64;
    let mut best: Option<EpSeq> = None;
    for len in 1..=2 * n as u32 {
        let words = radix.checked_pow(len).filter(|&w| tried + w <= TAIL_SEARCH_LIMIT as u64);
        let Some(words) = words else {
            return Err(Error::BoundExceeded(TAIL_SEARCH_LIMIT));
        };
        tried += words;
        for code in 0..words {
            let mut p = vec![0 as Digit; len as usize];
            let mut rest = code;
            for slot in p.iter_mut().rev() {
                *slot = (rest % radix) as Digit;
                rest /= radix;
            }
            let c = EpSeq::new(head.clone(), p)?;
            if best.as_ref().is_none_or(|b| lex_cmp(&c, b).is_lt())
                && f_family_filter(ctx, &c, Strictness::Strict)?.passed
            {
                best = Some(c);
            }
        }
    }
    best.ok_or_else(|| Error::FilterFailed(format!("no tail of period at most {} passes the strict filter", 2 * n)))
}

/// A point with a prescribed number of expansions, together with the
/// expansions that account for that number.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessPoint {
    pub m: usize,
    pub tail: EpSeq,
    pub value: AlgebraicReal,
    pub expansions: Vec<EpSeq>,
}

/// The point `x_m = (1 0^{(m−1)N} c)_q` and its `m` expansions
/// `1 0^{(m−1)N} c` and `0 (α₁⋯α_N)^j α₁⋯α_N⁺ 0^{(m−2−j)N} c`,
/// `j = 0, …, m−2`. Each listed expansion is checked to have value `x_m`
/// exactly. The tail must pass the strict filter.
pub fn build_witness_xm(ctx: &BaseContext, m: usize, c: &EpSeq) -> Result<WitnessPoint> {
    if m == 0 {
        return Err(Error::InvalidArgument("the number of expansions must be at least 1".into()));
    }
    let report = f_family_filter(ctx, c, Strictness::Strict)?;
    if let Some(f) = report.failure {
        return Err(Error::FilterFailed(format!("{c}: {:?} at index {}", f.condition, f.index)));
    }
    let n = ctx.n_period();
    let w = ctx.alpha_word();
    let wp = w.succ(ctx.m())?;
    let mut head = vec![1];
    head.extend(std::iter::repeat_n(0, (m - 1) * n));
    let given = c.prepend(&head);
    let value = ctx.value_of(&given);
    let mut expansions = vec![given];
    for j in 0..m.saturating_sub(1) {
        let mut d = vec![0];
        d.extend_from_slice(w.repeat(j).digits());
        d.extend_from_slice(wp.digits());
        d.extend(std::iter::repeat_n(0, (m - 2 - j) * n));
        expansions.push(c.prepend(&d));
    }
    for e in &expansions {
        if ctx.value_of(e) != value {
            return Err(Error::Inconsistent(format!("expansion {e} does not have the witness value")));
        }
    }
    Ok(WitnessPoint { m, tail: c.clone(), value, expansions })
}

/// Block decomposition of `α(q)` for a base `q` strictly inside the window
/// `(p_L, p_R)` above `p_L`: with `w` the period of `α(p_L)`,
/// `α(q) = w⁺ (\overline{w}^{k₁} \overline{w⁺}) (w^{k₂} w⁺) (\overline{w}^{k₃} \overline{w⁺}) ⋯`.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaStructure {
    pub w: Word,
    /// `q = p_L`: the decomposition is just `w⁺`.
    pub trivial: bool,
    /// The exponents `k_j` before they become periodic.
    pub ks_preperiod: Vec<usize>,
    /// The periodic part of the exponents.
    pub ks_period: Vec<usize>,
    /// Every `k_j` is at most `k₁`.
    pub bounded_by_first: bool,
    /// `ℓ` such that the finite greedy word of 1 ends with `w⁺ \overline{w}^ℓ`,
    /// if it does.
    pub greedy_tail_power: Option<usize>,
}

/// Decomposes `α(q)` into blocks over the period `w` of `α(p_L)`. Returns
/// `None` when `q` does not lie in `[p_L, p_R)`.
pub fn alpha_structure(ctx: &BaseContext, pl: &BaseContext) -> Result<Option<AlphaStructure>> {
    if !matches!(pl.class(), BaseClass::InVNotClosureU | BaseClass::InClosureUNotU) {
        return Err(Error::UnsupportedClass(pl.class()));
    }
    if ctx.m() != pl.m() {
        return Err(Error::InvalidArgument("bases over different alphabets".into()));
    }
    let pr = pl.p_right()?;
    let alpha = ctx.alpha();
    if lex_cmp(alpha, pl.alpha()).is_lt() || lex_cmp(alpha, pr.alpha()).is_ge() {
        return Ok(None);
    }
    let m = ctx.m();
    let w = pl.alpha_word();
    let wp = w.succ(m)?;
    let wbar = w.reflect(m)?;
    let wpbar = wp.reflect(m)?;
    let greedy_tail_power = ctx.beta().finite_part().and_then(|b| {
        let mut b = b.digits();
        let mut ell = 0;
        while b.len() >= wbar.len() && b.ends_with(wbar.digits()) {
            b = &b[..b.len() - wbar.len()];
            ell += 1;
        }
        b.ends_with(wp.digits()).then_some(ell)
    });
    if lex_cmp(alpha, pl.alpha()).is_eq() {
        return Ok(Some(AlphaStructure {
            w,
            trivial: true,
            ks_preperiod: Vec::new(),
            ks_period: Vec::new(),
            bounded_by_first: true,
            greedy_tail_power,
        }));
    }
    if !matches!(ctx.class(), BaseClass::InVNotClosureU | BaseClass::InClosureUNotU) {
        return Err(Error::UnsupportedClass(ctx.class()));
    }
    let len = w.len();
    let block = |pos: usize| alpha.prefix(pos + len).digits()[pos..].to_vec();
    if block(0) != wp.digits() {
        return Err(Error::Inconsistent(format!("α = {alpha} does not start with w⁺ = {wp}")));
    }
    let pre = alpha.preperiod().len();
    let per = alpha.period().len();
    let normalize = |pos: usize| if pos < pre { pos } else { pre + (pos - pre) % per };
    let mut ks = Vec::new();
    let mut seen: BTreeMap<(usize, bool), usize> = BTreeMap::new();
    let mut pos = len;
    let mut odd = true;
    let limit = alpha.window() + len;
    loop {
        let key = (normalize(pos), odd);
        if let Some(&start) = seen.get(&key) {
            let period = ks.split_off(start);
            let k1 = ks.first().or(period.first()).copied().unwrap_or(0);
            let bounded_by_first = ks.iter().chain(&period).all(|&k| k <= k1);
            return Ok(Some(AlphaStructure {
                w,
                trivial: false,
                ks_preperiod: ks,
                ks_period: period,
                bounded_by_first,
                greedy_tail_power,
            }));
        }
        seen.insert(key, ks.len());
        let (rep, close) = if odd { (&wbar, &wpbar) } else { (&w, &wp) };
        let mut k = 0;
        while block(pos) == rep.digits() {
            pos += len;
            k += 1;
            if k > limit {
                return Err(Error::Inconsistent(format!("α = {alpha} ends in a repeated block")));
            }
        }
        if block(pos) != close.digits() {
            return Err(Error::Inconsistent(format!("α = {alpha} does not split into blocks over w = {w}")));
        }
        pos += len;
        ks.push(k);
        odd = !odd;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(m: Digit, beta: &str) -> BaseContext {
        BaseContext::parse(m, beta).unwrap()
    }

    #[test]
    fn greedy_expansion_of_one() {
        let c = ctx(1, "111(0)");
        assert_eq!(greedy_expand(&c, &c.int(1), 5).unwrap().to_string(), "11100");
    }

    #[test]
    fn quasi_greedy_expansion_of_one_is_alpha() {
        let c = ctx(1, "111(0)");
        assert_eq!(quasi_greedy_expand(&c, &c.int(1)).unwrap(), *c.alpha());
    }
}
