//! Base contexts and the special points of the univoque graph.
//!
//! A base is always given symbolically, by its greedy expansion of 1
//! (`β(q)`) or its quasi-greedy expansion (`α(q)`); the numeric value of `q`
//! only ever appears as an isolating interval inside [`QField`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algebraic::{base_polynomial, value_of_sequence, AlgebraicReal, IntPoly, QField, RationalInterval};
use crate::digits::{
    alpha_from_beta, beta_from_alpha, classify_alpha, is_greedy_beta, is_quasigreedy_alpha, BaseClass, Digit, EpSeq,
    Word,
};
use crate::error::{Error, Result};

/// Width of the isolating interval computed when a context is created.
pub const DEFAULT_PRECISION: f64 = 1e-12;

/// Everything known about one base `q` over the alphabet `{0, …, M}`.
///
/// Cloning is cheap: the field, with its refinable interval, is shared.
#[derive(Clone)]
pub struct BaseContext {
    m: Digit,
    beta: EpSeq,
    alpha: EpSeq,
    class: BaseClass,
    field: Arc<QField>,
}

impl fmt::Debug for BaseContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaseContext")
            .field("M", &self.m)
            .field("beta", &self.beta.to_string())
            .field("alpha", &self.alpha.to_string())
            .field("class", &self.class)
            .finish()
    }
}

impl BaseContext {
    /// Context for the base whose greedy expansion of 1 is `beta`.
    pub fn new(m: Digit, beta: EpSeq) -> Result<Self> {
        Self::with_precision(m, beta, DEFAULT_PRECISION)
    }

    pub fn with_precision(m: Digit, beta: EpSeq, precision: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("the alphabet bound M must be at least 1".into()));
        }
        beta.check_alphabet(m)?;
        if !is_greedy_beta(m, &beta) {
            return Err(Error::NotGreedy(beta.to_string()));
        }
        if beta == EpSeq::finite(vec![1]) {
            return Err(Error::BaseIsOne);
        }
        let alpha = alpha_from_beta(&beta);
        if !is_quasigreedy_alpha(m, &alpha) || beta_from_alpha(m, &alpha) != beta {
            return Err(Error::Inconsistent(format!("α/β conversion failed for β = {beta}")));
        }
        let class = classify_alpha(m, &alpha)?;
        let field = QField::new(base_polynomial(m, &beta)?, m, precision)?;
        Ok(BaseContext { m, beta, alpha, class, field })
    }

    /// Context for the base whose quasi-greedy expansion of 1 is `alpha`.
    pub fn from_alpha(m: Digit, alpha: EpSeq) -> Result<Self> {
        alpha.check_alphabet(m)?;
        if !is_quasigreedy_alpha(m, &alpha) {
            return Err(Error::NotQuasiGreedy(alpha.to_string()));
        }
        Self::new(m, beta_from_alpha(m, &alpha))
    }

    /// Parses `β` in the digit-string grammar.
    pub fn parse(m: Digit, beta: &str) -> Result<Self> {
        Self::new(m, EpSeq::from_str(beta)?)
    }

    /// The smallest base in `V`: `β = mm 0^∞` for `M = 2m − 1`, and
    /// `β = (m+1) 0^∞` (so `q = m + 1`) for `M = 2m`.
    pub fn golden_ratio_base(m: Digit) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("the alphabet bound M must be at least 1".into()));
        }
        let beta = if m % 2 == 1 {
            let h = m.div_ceil(2);
            EpSeq::finite(vec![h, h])
        } else {
            EpSeq::finite(vec![m / 2 + 1])
        };
        Self::new(m, beta)
    }

    pub fn m(&self) -> Digit {
        self.m
    }

    pub fn beta(&self) -> &EpSeq {
        &self.beta
    }

    pub fn alpha(&self) -> &EpSeq {
        &self.alpha
    }

    pub fn class(&self) -> BaseClass {
        self.class
    }

    /// Length `N` of the shortest period of `α(q)`.
    pub fn n_period(&self) -> usize {
        self.alpha.period().len()
    }

    /// `q ≤ q_GR`: the univoque set is trivial and no graph exists.
    pub fn below_golden_ratio(&self) -> bool {
        self.class == BaseClass::NotInV
    }

    pub fn field(&self) -> &Arc<QField> {
        &self.field
    }

    pub fn defining_poly(&self) -> &IntPoly {
        self.field.defining_poly()
    }

    pub fn isolating_interval(&self) -> RationalInterval {
        self.field.interval()
    }

    pub fn q_f64(&self) -> f64 {
        self.field.q_f64()
    }

    /// Exact value of a digit sequence in this base.
    pub fn value_of(&self, s: &EpSeq) -> AlgebraicReal {
        value_of_sequence(&self.field, s)
    }

    pub fn int(&self, k: i64) -> AlgebraicReal {
        self.field.int(k)
    }

    /// `M/(q−1)`, the right end of the interval of expandable numbers.
    pub fn max_value(&self) -> AlgebraicReal {
        self.value_of(&EpSeq::constant(self.m))
    }

    /// The period word `α₁⋯α_N`.
    pub fn alpha_word(&self) -> Word {
        Word::new(self.alpha.period().to_vec())
    }

    pub(crate) fn require_graph_class(&self) -> Result<()> {
        if self.class.has_graph() && self.alpha.preperiod().is_empty() {
            Ok(())
        } else {
            Err(Error::UnsupportedClass(self.class))
        }
    }

    /// The base `q⁺` with `α(q⁺) = (α₁⋯α_N⁺ \overline{α₁⋯α_N⁺})^∞`.
    pub fn v_successor(&self) -> Result<Self> {
        self.require_graph_class()?;
        let wp = self.alpha_word().succ(self.m)?;
        let period = wp.concat(&wp.reflect(self.m)?);
        Self::from_alpha(self.m, EpSeq::periodic(period.into_digits())?)
    }

    /// The base `r_k` with `β(r_k) = α₁⋯α_N⁺ (\overline{α₁⋯α_N})^k 0^∞`.
    /// Checks that `r₁` lands in `V \ closure(U)` and `r_k`, `k ≥ 2`, in
    /// `closure(U) \ U`.
    pub fn r_chain(&self, k: usize) -> Result<Self> {
        self.require_graph_class()?;
        if k == 0 {
            return Ok(self.clone());
        }
        let w = self.alpha_word();
        let beta = w.succ(self.m)?.concat(&w.reflect(self.m)?.repeat(k));
        let ctx = Self::new(self.m, EpSeq::finite(beta.into_digits()))?;
        let expected = if k == 1 { BaseClass::InVNotClosureU } else { BaseClass::InClosureUNotU };
        if ctx.class != expected {
            return Err(Error::Inconsistent(format!(
                "r_{k} for β = {} is {:?}, expected {expected:?}",
                self.beta, ctx.class
            )));
        }
        Ok(ctx)
    }

    /// The right end `p_R` of the window above this base:
    /// `α(p_R) = α₁⋯α_N⁺ (\overline{α₁⋯α_N})^∞`.
    pub fn p_right(&self) -> Result<Self> {
        self.require_graph_class()?;
        let w = self.alpha_word();
        let alpha = EpSeq::new(w.succ(self.m)?.into_digits(), w.reflect(self.m)?.into_digits())?;
        Self::from_alpha(self.m, alpha)
    }

    /// The points `a_i`, `b_i`, `θ_j`, `η_j` with exact values and
    /// quasi-greedy comparison keys.
    pub fn special_points(&self) -> Result<SpecialPoints> {
        self.require_graph_class()?;
        let m = self.m;
        let n = self.n_period();
        let alpha = &self.alpha;
        let top = self.max_value();
        let w = self.alpha_word();
        let wp = w.succ(m)?;
        let reflect = |s: &EpSeq| s.reflect(m).expect("alphabet checked");

        let mut a = Vec::with_capacity(n + 1);
        let mut b = Vec::with_capacity(n + 1);
        for i in 1..=n {
            let tail = EpSeq::finite(wp.digits()[i - 1..].to_vec());
            let value = self.value_of(&tail);
            let key = alpha.shift(i - 1);
            b.push(Point { name: PointName::B(i), value: top.sub(&value), key: reflect(&key) });
            a.push(Point { name: PointName::A(i), value, key });
        }
        a.push(Point { name: PointName::A(n + 1), value: self.int(0), key: EpSeq::zero() });
        b.push(Point { name: PointName::B(n + 1), value: top.clone(), key: EpSeq::constant(m) });

        let theta: Vec<Point> = (0..=m)
            .map(|j| Point {
                name: PointName::Theta(j as usize),
                value: self.value_of(&EpSeq::finite(vec![j])),
                key: if j == 0 { EpSeq::zero() } else { alpha.prepend(&[j - 1]) },
            })
            .collect();
        let eta: Vec<Point> = (1..=m as usize + 1)
            .map(|j| Point {
                name: PointName::Eta(j),
                value: self.value_of(&EpSeq::constant(m).prepend(&[j as Digit - 1])),
                key: reflect(&theta[m as usize + 1 - j].key),
            })
            .collect();
        Ok(SpecialPoints { m, n, a, b, theta, eta })
    }

    /// Total order of `a₁…a_N, b₁…b_N, θ₀…θ_M, η₁…η_{M+1}`, with equal
    /// values merged. The order is computed twice, by exact comparison of
    /// values and by lexicographic comparison of quasi-greedy keys, and the
    /// two must agree.
    pub fn order_points(&self) -> Result<PointOrder> {
        let sp = self.special_points()?;
        PointOrder::from_points(sp.partition_points())
    }
}

impl Serialize for BaseContext {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let q = self.value_of(&EpSeq::finite(vec![1])).mul_q().mul_q().decimal(12);
        let mut st = s.serialize_struct("BaseContext", 6)?;
        st.serialize_field("M", &self.m)?;
        st.serialize_field("beta", &self.beta)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("class", &self.class)?;
        st.serialize_field("q_approx", &q)?;
        st.serialize_field("poly", self.defining_poly())?;
        st.end()
    }
}

/// Symbolic name of a special point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PointName {
    A(usize),
    B(usize),
    Theta(usize),
    Eta(usize),
}

impl fmt::Display for PointName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointName::A(i) => write!(f, "a{i}"),
            PointName::B(i) => write!(f, "b{i}"),
            PointName::Theta(j) => write!(f, "θ{j}"),
            PointName::Eta(j) => write!(f, "η{j}"),
        }
    }
}

impl FromStr for PointName {
    type Err = Error;

    /// Accepts `a3`, `b1`, `θ2` / `t2` / `theta2`, `η1` / `e1` / `eta1`.
    fn from_str(s: &str) -> Result<PointName> {
        let s = s.trim();
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (head, idx) = s.split_at(split);
        let idx: usize =
            idx.parse().map_err(|_| Error::Parse { input: s.to_string(), reason: "missing point index".into() })?;
        match head {
            "a" => Ok(PointName::A(idx)),
            "b" => Ok(PointName::B(idx)),
            "θ" | "t" | "theta" => Ok(PointName::Theta(idx)),
            "η" | "e" | "eta" => Ok(PointName::Eta(idx)),
            _ => Err(Error::Parse { input: s.to_string(), reason: "unknown point family".into() }),
        }
    }
}

impl Serialize for PointName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A special point with its exact value and the quasi-greedy expansion used
/// as an independent comparison key.
#[derive(Clone, Debug)]
pub struct Point {
    pub name: PointName,
    pub value: AlgebraicReal,
    pub key: EpSeq,
}

/// The special points of a base in `V \ U`.
///
/// `a_{N+1} = θ₀ = 0` and `b_{N+1} = η_{M+1} = M/(q−1)`.
#[derive(Clone, Debug)]
pub struct SpecialPoints {
    pub m: Digit,
    pub n: usize,
    pub a: Vec<Point>,
    pub b: Vec<Point>,
    pub theta: Vec<Point>,
    pub eta: Vec<Point>,
}

impl SpecialPoints {
    pub fn get(&self, name: PointName) -> Option<&Point> {
        match name {
            PointName::A(i) => i.checked_sub(1).and_then(|k| self.a.get(k)),
            PointName::B(i) => i.checked_sub(1).and_then(|k| self.b.get(k)),
            PointName::Theta(j) => self.theta.get(j),
            PointName::Eta(j) => j.checked_sub(1).and_then(|k| self.eta.get(k)),
        }
    }

    /// The points that cut `[0, M/(q−1)]` into graph vertices:
    /// `a₁…a_N, b₁…b_N, θ₀…θ_M, η₁…η_{M+1}`.
    pub fn partition_points(&self) -> Vec<Point> {
        let n = self.n;
        self.a[..n].iter().chain(&self.b[..n]).chain(&self.theta).chain(&self.eta).cloned().collect()
    }
}

/// Points with equal value, merged. Names are sorted with the `a`, then
/// `b`, then `θ`, then `η` families first.
#[derive(Clone, Debug)]
pub struct PointClass {
    pub names: Vec<PointName>,
    pub value: AlgebraicReal,
    pub key: EpSeq,
}

impl PointClass {
    /// Name used for display.
    pub fn label(&self) -> PointName {
        self.names[0]
    }

    pub fn contains(&self, name: PointName) -> bool {
        self.names.contains(&name)
    }
}

/// The strictly increasing chain of point classes.
#[derive(Clone, Debug)]
pub struct PointOrder {
    pub classes: Vec<PointClass>,
}

impl PointOrder {
    fn group(points: &[Point], eq: impl Fn(&Point, &Point) -> bool) -> Vec<Vec<Point>> {
        let mut groups: Vec<Vec<Point>> = Vec::new();
        for p in points {
            match groups.last_mut() {
                Some(g) if eq(&g[0], p) => g.push(p.clone()),
                _ => groups.push(vec![p.clone()]),
            }
        }
        groups
    }

    fn from_points(points: Vec<Point>) -> Result<PointOrder> {
        let mut by_value = points.clone();
        by_value.sort_by(|x, y| x.value.compare(&y.value).then(x.name.cmp(&y.name)));
        let mut by_key = points;
        by_key.sort_by(|x, y| x.key.cmp(&y.key).then(x.name.cmp(&y.name)));
        let value_groups = Self::group(&by_value, |x, y| x.value == y.value);
        let key_groups = Self::group(&by_key, |x, y| x.key == y.key);
        let names = |gs: &[Vec<Point>]| -> Vec<Vec<PointName>> {
            gs.iter().map(|g| g.iter().map(|p| p.name).collect()).collect()
        };
        if names(&value_groups) != names(&key_groups) {
            return Err(Error::Inconsistent(format!(
                "point order by value {:?} differs from order by expansion {:?}",
                names(&value_groups),
                names(&key_groups)
            )));
        }
        let classes = value_groups
            .into_iter()
            .map(|g| PointClass {
                names: g.iter().map(|p| p.name).collect(),
                value: g[0].value.clone(),
                key: g[0].key.clone(),
            })
            .collect();
        Ok(PointOrder { classes })
    }

    /// Index of the class containing `name`.
    pub fn class_of(&self, name: PointName) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(name))
    }

    /// The chain as sets of names, lowest first.
    pub fn name_sets(&self) -> Vec<Vec<PointName>> {
        self.classes.iter().map(|c| c.names.clone()).collect()
    }

    /// Parses a chain such as `"θ0<b1<a3=θ1<η2"` into name sets.
    pub fn parse_chain(chain: &str) -> Result<Vec<Vec<PointName>>> {
        chain
            .split('<')
            .map(|cls| {
                let mut v = cls.split('=').map(PointName::from_str).collect::<Result<Vec<_>>>()?;
                v.sort();
                Ok(v)
            })
            .collect()
    }

    /// Do the classes match the given chain, class by class as sets?
    pub fn matches_chain(&self, chain: &str) -> Result<bool> {
        Ok(self.name_sets() == Self::parse_chain(chain)?)
    }
}

impl fmt::Display for PointOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.classes.iter().enumerate() {
            if i > 0 {
                f.write_str("<")?;
            }
            for (k, n) in c.names.iter().enumerate() {
                if k > 0 {
                    f.write_str("=")?;
                }
                write!(f, "{n}")?;
            }
        }
        Ok(())
    }
}

/// Compares two points by exact value.
pub fn compare_points(x: &Point, y: &Point) -> Ordering {
    x.value.compare(&y.value)
}
