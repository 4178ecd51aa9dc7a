//! Brute-force references used to cross-check the graph and the expansion
//! search. Nothing here goes through the graph or expansion machinery:
//! admissible words come from the lexicographic conditions alone, and
//! expansion bounds come from plain enumeration of digit prefixes.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::algebraic::AlgebraicReal;
use crate::base::BaseContext;
use crate::digits::{Digit, EpSeq, Word};
use crate::digraph;
use crate::error::{Error, Result};

/// Longest word length accepted by the word enumerators.
pub const MAX_ORACLE_LEN: usize = 12;
/// Deepest prefix length accepted by [`brute_count_expansions`].
pub const MAX_ORACLE_DEPTH: usize = 24;
/// Step limit when following a greedy orbit to its period.
const ORBIT_LIMIT: usize = 10_000;

/// Which set of sequences the words must extend into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum WordMode {
    /// Sequences `c` with `σⁿc < α(q)` whenever `c_n < M` and
    /// `\overline{σⁿc} < α(q)` whenever `c_n > 0` (unique expansions).
    UPrefix,
    /// The same conditions with `≤` (unique doubly infinite expansions).
    VPrefix,
}

/// Follower state: the phases (mod `N`) at which pending comparisons of a
/// shifted tail against `α(q) = (α₁⋯α_N)^∞` are still tied, for the direct
/// and the reflected conditions. In [`WordMode::UPrefix`] the run also
/// carries the breakpoint obligations: ties that were pending at the last
/// breakpoint and have not yet been resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Follower {
    up: u64,
    lo: u64,
    owe_up: u64,
    owe_lo: u64,
    accepting: bool,
}

struct Automaton {
    m: Digit,
    states: Vec<Follower>,
    next: Vec<Vec<Option<usize>>>,
    live: Vec<bool>,
}

fn advance(period: &[Digit], set: u64, digit: Digit) -> Option<u64> {
    let n = period.len();
    let mut out = 0u64;
    for (p, a) in period.iter().enumerate() {
        if set & (1 << p) == 0 {
            continue;
        }
        match digit.cmp(a) {
            std::cmp::Ordering::Greater => return None,
            std::cmp::Ordering::Equal => out |= 1 << ((p + 1) % n),
            std::cmp::Ordering::Less => {}
        }
    }
    Some(out)
}

fn step(period: &[Digit], m: Digit, mode: WordMode, s: Follower, d: Digit) -> Option<Follower> {
    let mut up = advance(period, s.up, d)?;
    let mut lo = advance(period, s.lo, m - d)?;
    if d < m {
        up |= 1;
    }
    if d > 0 {
        lo |= 1;
    }
    if mode == WordMode::VPrefix {
        return Some(Follower { up, lo, owe_up: 0, owe_lo: 0, accepting: false });
    }
    let owe_up = advance(period, s.owe_up, d).expect("obligations are pending ties");
    let owe_lo = advance(period, s.owe_lo, m - d).expect("obligations are pending ties");
    Some(if owe_up | owe_lo == 0 {
        Follower { up, lo, owe_up: up, owe_lo: lo, accepting: true }
    } else {
        Follower { up, lo, owe_up, owe_lo, accepting: false }
    })
}

impl Automaton {
    fn build(ctx: &BaseContext, mode: WordMode) -> Result<Self> {
        let alpha = ctx.alpha();
        if !alpha.preperiod().is_empty() {
            return Err(Error::UnsupportedClass(ctx.class()));
        }
        let period = alpha.period();
        if period.len() > 64 {
            return Err(Error::InvalidArgument(format!("period length {} exceeds 64", period.len())));
        }
        let m = ctx.m();
        let start = Follower { up: 0, lo: 0, owe_up: 0, owe_lo: 0, accepting: false };
        let mut index = HashMap::from([(start, 0usize)]);
        let mut states = vec![start];
        let mut next = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let s = states[i];
            let row = (0..=m)
                .map(|d| {
                    step(period, m, mode, s, d).map(|t| {
                        *index.entry(t).or_insert_with(|| {
                            states.push(t);
                            states.len() - 1
                        })
                    })
                })
                .collect();
            next.push(row);
            i += 1;
        }
        let adj: Vec<Vec<usize>> =
            next.iter().map(|r: &Vec<Option<usize>>| r.iter().flatten().copied().collect()).collect();
        let comps = digraph::tarjan(&adj);
        let good: Vec<usize> = comps
            .iter()
            .filter(|c| {
                digraph::is_cyclic(&adj, c) && (mode == WordMode::VPrefix || c.iter().any(|&v| states[v].accepting))
            })
            .flatten()
            .copied()
            .collect();
        let mut rev = vec![Vec::new(); adj.len()];
        for (v, outs) in adj.iter().enumerate() {
            for &t in outs {
                rev[t].push(v);
            }
        }
        let live = digraph::reachable(&rev, good);
        Ok(Automaton { m, states, next, live })
    }

    fn walk(&self, s: usize, len: usize, word: &mut Vec<Digit>, visit: &mut impl FnMut(&[Digit])) {
        if word.len() == len {
            visit(word);
            return;
        }
        for d in 0..=self.m {
            if let Some(t) = self.next[s][d as usize] {
                if self.live[t] {
                    word.push(d);
                    self.walk(t, len, word, visit);
                    word.pop();
                }
            }
        }
    }
}

fn check_len(len: usize) -> Result<()> {
    if len > MAX_ORACLE_LEN {
        return Err(Error::InvalidArgument(format!("word length {len} exceeds {MAX_ORACLE_LEN}")));
    }
    Ok(())
}

/// Calls `visit` on every word of length `len` that extends to a sequence
/// satisfying the conditions of `mode`, in lexicographic order.
pub fn visit_admissible_words(
    ctx: &BaseContext,
    len: usize,
    mode: WordMode,
    mut visit: impl FnMut(&[Digit]),
) -> Result<()> {
    check_len(len)?;
    let a = Automaton::build(ctx, mode)?;
    if a.live[0] {
        a.walk(0, len, &mut Vec::with_capacity(len), &mut visit);
    }
    Ok(())
}

/// All words of length `len` that extend to a sequence satisfying the
/// conditions of `mode`, sorted.
pub fn enumerate_admissible_words(ctx: &BaseContext, len: usize, mode: WordMode) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    visit_admissible_words(ctx, len, mode, |w| out.push(Word::new(w.to_vec())))?;
    Ok(out)
}

/// Number of follower states of the automaton behind the enumerators.
pub fn follower_state_count(ctx: &BaseContext, mode: WordMode) -> Result<usize> {
    Ok(Automaton::build(ctx, mode)?.states.len())
}

/// Bounds on the number of expansions of a point from its digit prefixes
/// of a fixed length.
///
/// Distinct feasible prefixes extend to distinct expansions, so `feasible`
/// is a lower bound on the number of expansions. A prefix is `pinned` when
/// its remainder has a unique expansion; when every feasible prefix is
/// pinned the number of expansions is exactly `feasible`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionBounds {
    pub pinned: usize,
    pub feasible: usize,
}

impl ExpansionBounds {
    /// The exact number of expansions, when the prefixes determine it.
    pub fn exact(&self) -> Option<usize> {
        (self.pinned == self.feasible).then_some(self.feasible)
    }
}

/// The greedy expansion of `r`, followed until a remainder repeats.
fn greedy_orbit(ctx: &BaseContext, r: &AlgebraicReal) -> Option<EpSeq> {
    let mut seen: BTreeMap<AlgebraicReal, usize> = BTreeMap::new();
    let mut digits = Vec::new();
    let mut r = r.clone();
    for i in 0..ORBIT_LIMIT {
        if let Some(&start) = seen.get(&r) {
            let period = digits.split_off(start);
            return EpSeq::new(digits, period).ok();
        }
        seen.insert(r.clone(), i);
        let qr = r.mul_q();
        let d = (0..=ctx.m()).rev().find(|&d| !qr.sub_int(d as i64).signum().is_lt())?;
        r = qr.sub_int(d as i64);
        digits.push(d);
    }
    None
}

/// Does `r` have exactly one expansion? Decided by comparing the greedy
/// expansion with the lazy one (the reflection of the greedy expansion of
/// the reflected point).
fn has_unique_expansion(ctx: &BaseContext, r: &AlgebraicReal) -> bool {
    let greedy = greedy_orbit(ctx, r);
    let lazy = greedy_orbit(ctx, &ctx.max_value().sub(r)).and_then(|s| s.reflect(ctx.m()).ok());
    matches!((greedy, lazy), (Some(g), Some(l)) if g == l)
}

/// Enumerates every digit prefix of length `depth` whose remainder stays
/// in `[0, M/(q−1)]`, and counts how many of them pin a unique tail.
pub fn brute_count_expansions(ctx: &BaseContext, x: &AlgebraicReal, depth: usize) -> Result<ExpansionBounds> {
    if depth > MAX_ORACLE_DEPTH {
        return Err(Error::InvalidArgument(format!("depth {depth} exceeds {MAX_ORACLE_DEPTH}")));
    }
    let top = ctx.max_value();
    if x.signum().is_lt() || x > &top {
        return Err(Error::OutOfRange(x.decimal(12)));
    }
    let mut layer = vec![x.clone()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for r in &layer {
            let qr = r.mul_q();
            for d in 0..=ctx.m() {
                let t = qr.sub_int(d as i64);
                if !t.signum().is_lt() && t <= top {
                    next.push(t);
                }
            }
        }
        layer = next;
    }
    let mut memo: BTreeMap<AlgebraicReal, bool> = BTreeMap::new();
    let mut pinned = 0;
    for r in &layer {
        let unique = match memo.get(r) {
            Some(&u) => u,
            None => {
                let u = has_unique_expansion(ctx, r);
                memo.insert(r.clone(), u);
                u
            }
        };
        pinned += usize::from(unique);
    }
    Ok(ExpansionBounds { pinned, feasible: layer.len() })
}
