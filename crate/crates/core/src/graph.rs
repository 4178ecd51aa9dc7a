//! The univoque graph `G(q)` and its subgraphs `G̃(q)`, `G̃₁(q)`.
//!
//! Vertices are the open intervals between consecutive special points that
//! are not swallowed by the switch region `S_q = ⋃ [θ_j, η_j]`. There is an
//! edge `I --k--> J` when `T_k(I) ⊇ J`. Endpoints are kept as indices into
//! the [`PointOrder`] of the base, so a vertex is named by its endpoint
//! classes and never by a floating-point value.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::algebraic::AlgebraicReal;
use crate::base::{BaseContext, PointClass, PointName, PointOrder};
use crate::digits::{BaseClass, Digit, Word};
use crate::digraph;
use crate::error::{Error, Result};

/// Which graph to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `G(q)`: every vertex.
    Full,
    /// `G̃(q)`: the vertices inside `(b₁, a₁)`.
    Tilde,
    /// `G̃₁(q)`: the vertices of `G̃(q)` of the form `(a_i⁻, a_i)` or
    /// `(b_i, b_i⁺)`.
    Tilde1,
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Variant> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Variant::Full),
            "tilde" => Ok(Variant::Tilde),
            "tilde1" => Ok(Variant::Tilde1),
            _ => Err(Error::InvalidArgument(format!("unknown graph variant {s:?} (full, tilde, tilde1)"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Full => "full",
            Variant::Tilde => "tilde",
            Variant::Tilde1 => "tilde1",
        })
    }
}

/// Shape of a vertex according to its endpoints. A vertex may have several.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VertexKind {
    /// `(a_i⁻, a_i)`: the right endpoint is some `a_i`, `i ≤ N`.
    ARight,
    /// `(b_i, b_i⁺)`: the left endpoint is some `b_i`, `i ≤ N`.
    BLeft,
    /// `(a_i, b_j)`.
    Ab,
    /// `(θ_i⁻, θ_i)`, `i ≥ 1`.
    ThetaLeft,
    /// `(η_j, η_j⁺)`, `j ≤ M`.
    EtaRight,
}

/// An interval vertex `(left, right)`; endpoints are class indices into the
/// point order of the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub left: usize,
    pub right: usize,
    pub kinds: Vec<VertexKind>,
    /// The digit every expansion of a point of the interval starts with.
    pub label: Digit,
}

impl Vertex {
    pub fn has_kind(&self, k: VertexKind) -> bool {
        self.kinds.contains(&k)
    }
}

/// A labeled edge `from --label--> to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub from: usize,
    pub label: Digit,
    pub to: usize,
}

/// A univoque graph together with the base it was built from.
#[derive(Clone)]
pub struct UnivoqueGraph {
    ctx: BaseContext,
    order: Arc<PointOrder>,
    variant: Variant,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    succ: Vec<Vec<usize>>,
}

impl fmt::Debug for UnivoqueGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnivoqueGraph")
            .field("beta", &self.ctx.beta().to_string())
            .field("variant", &self.variant)
            .field("vertices", &self.vertex_names())
            .field("edges", &self.edges.len())
            .finish()
    }
}

fn has_a(c: &PointClass, n: usize) -> bool {
    c.names.iter().any(|p| matches!(p, PointName::A(i) if *i <= n))
}

fn has_b(c: &PointClass, n: usize) -> bool {
    c.names.iter().any(|p| matches!(p, PointName::B(i) if *i <= n))
}

/// Index of the first class whose value is `≥ x` (or `> x` when `strict`).
fn lower_bound(order: &PointOrder, x: &AlgebraicReal, strict: bool) -> usize {
    let (mut lo, mut hi) = (0, order.classes.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        let c = order.classes[mid].value.compare(x);
        let before = if strict { c != Ordering::Greater } else { c == Ordering::Less };
        if before {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

impl UnivoqueGraph {
    /// Builds the requested graph for a base in `V \ U`.
    pub fn build(ctx: &BaseContext, variant: Variant) -> Result<UnivoqueGraph> {
        let full = Self::build_full(ctx)?;
        Ok(match variant {
            Variant::Full => full,
            Variant::Tilde | Variant::Tilde1 => full.restrict_to(variant),
        })
    }

    fn build_full(ctx: &BaseContext) -> Result<UnivoqueGraph> {
        ctx.require_graph_class()?;
        let order = Arc::new(ctx.order_points()?);
        let m = ctx.m();
        let n = ctx.n_period();
        let cls = |p: PointName| {
            order.class_of(p).ok_or_else(|| Error::Inconsistent(format!("point {p} missing from the order")))
        };
        let mut switch = Vec::with_capacity(m as usize);
        for j in 1..=m as usize {
            let (t, e) = (cls(PointName::Theta(j))?, cls(PointName::Eta(j))?);
            if t > e {
                return Err(Error::Inconsistent(format!("θ{j} > η{j}")));
            }
            if e > t + 1 {
                return Err(Error::Inconsistent(format!(
                    "point {} lies inside the switch interval [θ{j}, η{j}]",
                    order.classes[t + 1].label()
                )));
            }
            switch.push((t, e));
        }

        let mut vertices = Vec::new();
        for c in 0..order.classes.len().saturating_sub(1) {
            if switch.iter().any(|&(t, e)| t <= c && c < e) {
                continue;
            }
            let digit = switch.iter().filter(|&&(_, e)| e <= c).count();
            if let Some(&(t, _)) = switch.get(digit) {
                if c + 1 > t {
                    return Err(Error::Inconsistent(format!("no forced digit for the interval at class {c}")));
                }
            }
            let (l, r) = (&order.classes[c], &order.classes[c + 1]);
            let mut kinds = Vec::new();
            if has_a(r, n) {
                kinds.push(VertexKind::ARight);
            }
            if has_b(l, n) {
                kinds.push(VertexKind::BLeft);
            }
            if has_a(l, n) && has_b(r, n) {
                kinds.push(VertexKind::Ab);
            }
            if r.names.iter().any(|p| matches!(p, PointName::Theta(i) if *i >= 1)) {
                kinds.push(VertexKind::ThetaLeft);
            }
            if l.names.iter().any(|p| matches!(p, PointName::Eta(j) if *j <= m as usize)) {
                kinds.push(VertexKind::EtaRight);
            }
            vertices.push(Vertex { left: c, right: c + 1, kinds, label: digit as Digit });
        }

        let by_left: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, v)| (v.left, i)).collect();
        let mut edges = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            for k in 0..=m {
                let lo = order.classes[v.left].value.apply_tk(k);
                let hi = order.classes[v.right].value.apply_tk(k);
                let first = lower_bound(&order, &lo, false);
                let last = lower_bound(&order, &hi, true);
                if first + 1 >= last {
                    continue;
                }
                for (_, &j) in by_left.range(first..last - 1) {
                    if vertices[j].right < last {
                        edges.push(Edge { from: i, label: k, to: j });
                    }
                }
            }
        }
        let g = Self::assemble(ctx.clone(), order, Variant::Full, vertices, edges);
        for (i, v) in g.vertices.iter().enumerate() {
            if g.succ[i].is_empty() {
                return Err(Error::Inconsistent(format!("vertex {} has no outgoing edge", g.vertex_name(i))));
            }
            if let Some(e) = g.edges.iter().find(|e| e.from == i && e.label != v.label) {
                return Err(Error::Inconsistent(format!(
                    "edge from {} carries label {} instead of the forced digit {}",
                    g.vertex_name(i),
                    e.label,
                    v.label
                )));
            }
        }
        Ok(g)
    }

    fn assemble(
        ctx: BaseContext,
        order: Arc<PointOrder>,
        variant: Variant,
        vertices: Vec<Vertex>,
        mut edges: Vec<Edge>,
    ) -> UnivoqueGraph {
        edges.sort();
        edges.dedup();
        let mut succ = vec![Vec::new(); vertices.len()];
        for e in &edges {
            succ[e.from].push(e.to);
        }
        UnivoqueGraph { ctx, order, variant, vertices, edges, succ }
    }

    fn restrict_to(&self, variant: Variant) -> UnivoqueGraph {
        let n = self.ctx.n_period();
        let b1 = self.order.class_of(PointName::B(1)).unwrap_or(0);
        let a1 = self.order.class_of(PointName::A(1)).unwrap_or(usize::MAX);
        let keep: Vec<bool> = self
            .vertices
            .iter()
            .map(|v| {
                let tilde = b1 <= v.left && v.right <= a1;
                match variant {
                    Variant::Full => true,
                    Variant::Tilde => tilde,
                    Variant::Tilde1 => {
                        tilde && (has_a(&self.order.classes[v.right], n) || has_b(&self.order.classes[v.left], n))
                    }
                }
            })
            .collect();
        let mut index = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if keep[i] {
                index[i] = vertices.len();
                vertices.push(v.clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.from] && keep[e.to])
            .map(|e| Edge { from: index[e.from], label: e.label, to: index[e.to] })
            .collect();
        Self::assemble(self.ctx.clone(), self.order.clone(), variant, vertices, edges)
    }

    /// The subgraph induced by the given vertices (ids of `self`), keeping
    /// their relative order.
    pub fn induced(&self, keep: &[usize]) -> UnivoqueGraph {
        let mut ids = keep.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let mut index = vec![usize::MAX; self.vertices.len()];
        for (k, &i) in ids.iter().enumerate() {
            index[i] = k;
        }
        let vertices = ids.iter().map(|&i| self.vertices[i].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| index[e.from] != usize::MAX && index[e.to] != usize::MAX)
            .map(|e| Edge { from: index[e.from], label: e.label, to: index[e.to] })
            .collect();
        Self::assemble(self.ctx.clone(), self.order.clone(), self.variant, vertices, edges)
    }

    pub fn context(&self) -> &BaseContext {
        &self.ctx
    }

    pub fn order(&self) -> &PointOrder {
        &self.order
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Successors of `v`, ascending and without repetition.
    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub(crate) fn adjacency(&self) -> &[Vec<usize>] {
        &self.succ
    }

    pub fn has_edge(&self, from: usize, label: Digit, to: usize) -> bool {
        self.edges.binary_search(&Edge { from, label, to }).is_ok()
    }

    pub fn left_class(&self, v: usize) -> &PointClass {
        &self.order.classes[self.vertices[v].left]
    }

    pub fn right_class(&self, v: usize) -> &PointClass {
        &self.order.classes[self.vertices[v].right]
    }

    /// `"(b1,a3)"`, using the preferred name of each endpoint class.
    pub fn vertex_name(&self, v: usize) -> String {
        format!("({},{})", self.left_class(v).label(), self.right_class(v).label())
    }

    pub fn vertex_names(&self) -> Vec<String> {
        (0..self.len()).map(|v| self.vertex_name(v)).collect()
    }

    /// The vertex whose left endpoint class contains `left` and whose right
    /// endpoint class contains `right`.
    pub fn find_vertex(&self, left: PointName, right: PointName) -> Option<usize> {
        let (l, r) = (self.order.class_of(left)?, self.order.class_of(right)?);
        self.vertex_by_classes(l, r)
    }

    fn vertex_by_classes(&self, l: usize, r: usize) -> Option<usize> {
        self.vertices.iter().position(|v| v.left == l && v.right == r)
    }

    /// The vertex `M/(q−1) − I` mirroring `v`, if present in this graph.
    pub fn reflect_vertex(&self, v: usize) -> Option<usize> {
        let last = self.order.classes.len() - 1;
        let x = &self.vertices[v];
        self.vertex_by_classes(last - x.right, last - x.left)
    }

    /// Vertices from which an infinite path starts.
    pub fn live_vertices(&self) -> Vec<bool> {
        let mut live = vec![true; self.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..self.len() {
                if live[v] && !self.succ[v].iter().any(|&w| live[w]) {
                    live[v] = false;
                    changed = true;
                }
            }
        }
        live
    }

    /// Graphviz rendering; vertices in interval order.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph univoque {{");
        let _ = writeln!(s, "  // M={} beta={} variant={}", self.ctx.m(), self.ctx.beta(), self.variant);
        for v in 0..self.len() {
            let _ = writeln!(s, "  v{v} [label=\"{}\"];", self.vertex_name(v));
        }
        for e in &self.edges {
            let _ = writeln!(s, "  v{} -> v{} [label=\"{}\"];", e.from, e.to, e.label);
        }
        s.push_str("}\n");
        s
    }

    /// Serializable view with decimal endpoint approximations.
    pub fn to_view(&self) -> GraphView {
        GraphView {
            m: self.ctx.m(),
            beta: self.ctx.beta().to_string(),
            variant: self.variant,
            vertices: (0..self.len())
                .map(|v| VertexView {
                    id: v,
                    name: self.vertex_name(v),
                    left: self.left_class(v).names.iter().map(ToString::to_string).collect(),
                    right: self.right_class(v).names.iter().map(ToString::to_string).collect(),
                    left_approx: self.left_class(v).value.decimal(12),
                    right_approx: self.right_class(v).value.decimal(12),
                    kinds: self.vertices[v].kinds.clone(),
                    label: self.vertices[v].label,
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexView {
    pub id: usize,
    pub name: String,
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub left_approx: String,
    pub right_approx: String,
    pub kinds: Vec<VertexKind>,
    pub label: Digit,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphView {
    #[serde(rename = "M")]
    pub m: Digit,
    pub beta: String,
    pub variant: Variant,
    pub vertices: Vec<VertexView>,
    pub edges: Vec<Edge>,
}

/// Strongly connected components and their condensation.
#[derive(Clone, Debug, Serialize)]
pub struct SccReport {
    /// Components with sorted members, ordered by smallest member.
    pub components: Vec<Vec<usize>>,
    /// Edges between distinct components, as component indices.
    pub condensation: Vec<(usize, usize)>,
    pub strongly_connected: bool,
}

impl SccReport {
    pub fn component_of(&self, v: usize) -> Option<usize> {
        self.components.iter().position(|c| c.contains(&v))
    }
}

pub fn scc(g: &UnivoqueGraph) -> SccReport {
    let components = digraph::tarjan(g.adjacency());
    let of = digraph::component_map(g.len(), &components);
    let mut condensation: Vec<(usize, usize)> =
        g.edges().iter().map(|e| (of[e.from], of[e.to])).filter(|(a, b)| a != b).collect();
    condensation.sort_unstable();
    condensation.dedup();
    SccReport { strongly_connected: components.len() == 1, components, condensation }
}

/// Strong connectivity of `G̃(q)` decided three ways.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectivityReport {
    /// Direct verdict from the SCC decomposition of `G̃(q)`.
    pub strongly_connected: bool,
    /// Every `(a_i, b_j)` and `(θ_i⁻, θ_i)` vertex is reachable from
    /// `G̃₁(q)`. Equivalent to strong connectivity.
    pub reachability_criterion: bool,
    /// `b₂ < min {a_i : 1 < i < N}`, which is sufficient for strong
    /// connectivity. Absent when `N < 2`.
    pub b2_below_inner_a: Option<bool>,
    /// For `M = 1`: every `(a_i, b_j)` vertex is reachable from `G̃₁(q)`.
    pub ab_reachability: Option<bool>,
    pub components: Vec<Vec<String>>,
    /// Vertices of `G̃(q)` not reachable from `G̃₁(q)`.
    pub unreached: Vec<String>,
    /// Vertices of `G(q)` with no incoming edge. Reported only; no
    /// property of the construction rules them out.
    pub without_in_edges: Vec<String>,
}

/// Vertices with no incoming edge.
pub fn vertices_without_in_edges(g: &UnivoqueGraph) -> Vec<usize> {
    let mut has_in = vec![false; g.len()];
    for e in g.edges() {
        has_in[e.to] = true;
    }
    (0..g.len()).filter(|&v| !has_in[v]).collect()
}

pub fn connectivity_report(ctx: &BaseContext) -> Result<ConnectivityReport> {
    if ctx.class() != BaseClass::InClosureUNotU {
        return Err(Error::UnsupportedClass(ctx.class()));
    }
    let g = UnivoqueGraph::build(ctx, Variant::Tilde)?;
    let full = UnivoqueGraph::build(ctx, Variant::Full)?;
    let n = ctx.n_period();
    let order = g.order();
    let sccs = scc(&g);
    let seeds = (0..g.len()).filter(|&v| has_a(g.right_class(v), n) || has_b(g.left_class(v), n));
    let reached = digraph::reachable(g.adjacency(), seeds);
    let all_reached = |kinds: &[VertexKind]| {
        g.vertices().iter().enumerate().all(|(v, x)| reached[v] || !kinds.iter().any(|&k| x.has_kind(k)))
    };
    let reachability_criterion = all_reached(&[VertexKind::Ab, VertexKind::ThetaLeft]);
    if reachability_criterion != sccs.strongly_connected {
        return Err(Error::Inconsistent(format!(
            "reachability from G̃₁ ({reachability_criterion}) disagrees with the SCC verdict ({}) for β = {}",
            sccs.strongly_connected,
            ctx.beta()
        )));
    }
    let b2_below_inner_a = (n >= 2).then(|| {
        let b2 = order.class_of(PointName::B(2)).expect("b2 is a partition point");
        (2..n).all(|i| b2 < order.class_of(PointName::A(i)).expect("a_i is a partition point"))
    });
    let ab_reachability = (ctx.m() == 1).then(|| all_reached(&[VertexKind::Ab]));
    Ok(ConnectivityReport {
        strongly_connected: sccs.strongly_connected,
        reachability_criterion,
        b2_below_inner_a,
        ab_reachability,
        components: sccs.components.iter().map(|c| c.iter().map(|&v| g.vertex_name(v)).collect()).collect(),
        unreached: (0..g.len()).filter(|&v| !reached[v]).map(|v| g.vertex_name(v)).collect(),
        without_in_edges: vertices_without_in_edges(&full).into_iter().map(|v| full.vertex_name(v)).collect(),
    })
}

fn is_isomorphism(g1: &UnivoqueGraph, g2: &UnivoqueGraph, map: &[usize]) -> bool {
    g1.edges().len() == g2.edges().len()
        && g1.vertices().iter().zip(map).all(|(v, &w)| v.label == g2.vertices()[w].label)
        && g1.edges().iter().all(|e| g2.has_edge(map[e.from], e.label, map[e.to]))
}

/// Largest graph handed to the exhaustive isomorphism search.
pub const ISOMORPHISM_SEARCH_LIMIT: usize = 64;

/// A label- and edge-preserving bijection `g1 → g2`, if one exists.
///
/// Vertices are first matched in increasing interval order, which is how
/// the isomorphism between consecutive graphs of a chain arises. When that
/// fails, graphs with at most [`ISOMORPHISM_SEARCH_LIMIT`] vertices are
/// searched exhaustively; larger ones are reported as not isomorphic only
/// if an invariant separates them.
pub fn check_isomorphic(g1: &UnivoqueGraph, g2: &UnivoqueGraph) -> Option<Vec<usize>> {
    if g1.len() != g2.len() || g1.edges().len() != g2.edges().len() {
        return None;
    }
    let identity: Vec<usize> = (0..g1.len()).collect();
    if is_isomorphism(g1, g2, &identity) {
        return Some(identity);
    }
    if g1.len() > ISOMORPHISM_SEARCH_LIMIT {
        return None;
    }
    search_isomorphism(g1, g2)
}

fn signatures(g: &UnivoqueGraph) -> Vec<(Digit, usize, usize, bool)> {
    let mut indeg = vec![0; g.len()];
    for e in g.edges() {
        indeg[e.to] += 1;
    }
    (0..g.len())
        .map(|v| (g.vertices()[v].label, g.successors(v).len(), indeg[v], g.successors(v).contains(&v)))
        .collect()
}

fn search_isomorphism(g1: &UnivoqueGraph, g2: &UnivoqueGraph) -> Option<Vec<usize>> {
    let (s1, s2) = (signatures(g1), signatures(g2));
    let mut sorted1 = s1.clone();
    let mut sorted2 = s2.clone();
    sorted1.sort_unstable();
    sorted2.sort_unstable();
    if sorted1 != sorted2 {
        return None;
    }
    let n = g1.len();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        v: usize,
        g1: &UnivoqueGraph,
        g2: &UnivoqueGraph,
        s1: &[(Digit, usize, usize, bool)],
        s2: &[(Digit, usize, usize, bool)],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if v == map.len() {
            return true;
        }
        for w in 0..map.len() {
            if used[w] || s1[v] != s2[w] {
                continue;
            }
            map[v] = w;
            let consistent = g1.edges().iter().all(|e| {
                let (a, b) = (map[e.from], map[e.to]);
                e.from > v || e.to > v || g2.has_edge(a, e.label, b)
            });
            if consistent {
                used[w] = true;
                if extend(v + 1, g1, g2, s1, s2, map, used) {
                    return true;
                }
                used[w] = false;
            }
            map[v] = usize::MAX;
        }
        false
    }

    extend(0, g1, g2, &s1, &s2, &mut map, &mut used).then_some(map)
}

/// The nested structure of the graphs `G(q₁) ⊂ G(q₂) ⊂ ⋯ ⊂ G(q_m)` along
/// the successor chain of a base `q₀ ∈ closure(U) \ U`.
#[derive(Clone, Debug)]
pub struct TowerDecomposition {
    /// `q₁, …, q_m`.
    pub contexts: Vec<BaseContext>,
    /// `G(q_m)`.
    pub graph: UnivoqueGraph,
    /// `V₁, …, V_m` as vertex ids of `G(q_m)`.
    pub blocks: Vec<Vec<usize>>,
    /// `C₂, …, C_m`, each listed along the cycle starting from the vertex
    /// whose right endpoint is `a₁` of the graph where the cycle appears.
    pub cycles: Vec<Vec<usize>>,
    /// The label word read once around each cycle.
    pub cycle_words: Vec<Word>,
}

impl TowerDecomposition {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}

/// Image of a point class of `G(q_j)` among the points of `q_{j+1}`:
/// `a_i ↦ ã_i` for `i ≠ n, 2n`, `θ_j ↦ θ̃_j`, `η_j ↦ η̃_j` except
/// `η_d ↦ ã_n` where `d` is the `n`-th digit of `α(q_j)` and `2n` its period.
fn embed_point(class: &PointClass, n: usize, d: usize, next: &PointOrder) -> Result<usize> {
    let mut image = None;
    for &p in &class.names {
        let target = match p {
            PointName::A(i) if i != n && i != 2 * n => Some(PointName::A(i)),
            PointName::Theta(j) => Some(PointName::Theta(j)),
            PointName::Eta(j) if j == d => Some(PointName::A(n)),
            PointName::Eta(j) => Some(PointName::Eta(j)),
            _ => None,
        };
        if let Some(t) = target {
            let c = next
                .class_of(t)
                .ok_or_else(|| Error::Inconsistent(format!("image point {t} is not a partition point")))?;
            if image.is_some_and(|prev| prev != c) {
                return Err(Error::Inconsistent(format!("the points of class {p} have different images")));
            }
            image = Some(c);
        }
    }
    image.ok_or_else(|| Error::Inconsistent(format!("no image for point class {}", class.label())))
}

/// Embeds `G(q_j)` into `G(q_{j+1})` by sending the vertex `(x, x⁺)` to
/// `(f(x), f(x)⁺)`, and checks that the image spans an isomorphic copy.
fn embed_graph(g: &UnivoqueGraph, next: &UnivoqueGraph) -> Result<Vec<usize>> {
    let n2 = g.context().n_period();
    if !n2.is_multiple_of(2) {
        return Err(Error::Inconsistent(format!("period of α(q) = {} is odd", g.context().alpha())));
    }
    let n = n2 / 2;
    let d = g.context().alpha().period()[n - 1] as usize;
    let mut point_map = HashMap::new();
    let mut map = Vec::with_capacity(g.len());
    for v in 0..g.len() {
        let x = &g.vertices()[v];
        let mut img = |c: usize| -> Result<usize> {
            if let Some(&i) = point_map.get(&c) {
                return Ok(i);
            }
            let i = embed_point(&g.order().classes[c], n, d, next.order())?;
            point_map.insert(c, i);
            Ok(i)
        };
        let l = img(x.left)?;
        let w = next.vertices().iter().position(|y| y.left == l).ok_or_else(|| {
            Error::Inconsistent(format!("image of vertex {} is not a vertex of the next graph", g.vertex_name(v)))
        })?;
        map.push(w);
    }
    let mut seen = map.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != map.len() {
        return Err(Error::Inconsistent("embedding is not injective".into()));
    }
    let image = next.induced(&map);
    if image.edges().len() != g.edges().len()
        || !g.edges().iter().all(|e| next.has_edge(map[e.from], e.label, map[e.to]))
    {
        return Err(Error::Inconsistent(format!(
            "embedding of G(q) for β = {} does not preserve edges",
            g.context().beta()
        )));
    }
    Ok(map)
}

/// Orders the vertex set `block` along its unique cycle, starting at
/// `start`; fails unless the spanned subgraph is a single cycle.
fn single_cycle(g: &UnivoqueGraph, block: &[usize], start: usize) -> Result<(Vec<usize>, Word)> {
    let inside = |v: usize| block.contains(&v);
    let mut indeg: HashMap<usize, usize> = block.iter().map(|&v| (v, 0)).collect();
    for e in g.edges() {
        if inside(e.from) && inside(e.to) {
            *indeg.get_mut(&e.to).unwrap() += 1;
        }
    }
    let mut cycle = Vec::with_capacity(block.len());
    let mut word = Vec::with_capacity(block.len());
    let mut v = start;
    loop {
        let next: Vec<usize> = g.successors(v).iter().copied().filter(|&w| inside(w)).collect();
        if next.len() != 1 || indeg[&v] != 1 {
            return Err(Error::Inconsistent(format!("vertex {} breaks the cycle structure", g.vertex_name(v))));
        }
        cycle.push(v);
        word.push(g.vertices()[v].label);
        v = next[0];
        if v == start {
            break;
        }
        if cycle.len() > block.len() {
            return Err(Error::Inconsistent("cycle does not close".into()));
        }
    }
    if cycle.len() != block.len() {
        return Err(Error::Inconsistent(format!(
            "new vertices form more than one cycle ({} of {})",
            cycle.len(),
            block.len()
        )));
    }
    Ok((cycle, Word::new(word)))
}

/// Builds `G(q₁), …, G(q_m)` along the successor chain of `ctx0`, embeds
/// each graph in the next one and verifies the tower structure: the new
/// vertices of `G(q_j)`, `j ≥ 2`, number `2^{j−1} n` and span a single
/// cycle, and paths only lead from `V_j` to `V_k` when `j ≤ k`.
///
/// `V₁` is all of `G(q₁)`, which has `2n + M − 1` vertices.
pub fn tower_decompose(ctx0: &BaseContext, m: usize) -> Result<TowerDecomposition> {
    if ctx0.class() != BaseClass::InClosureUNotU {
        return Err(Error::UnsupportedClass(ctx0.class()));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("tower depth must be at least 1".into()));
    }
    let n = ctx0.n_period();
    let mut contexts = vec![ctx0.v_successor()?];
    for _ in 1..m {
        let next = contexts.last().unwrap().v_successor()?;
        contexts.push(next);
    }
    let graphs = contexts.iter().map(|c| UnivoqueGraph::build(c, Variant::Full)).collect::<Result<Vec<_>>>()?;

    // blocks[j] and cycles are kept as ids of the current top graph and
    // pushed through every later embedding.
    let mut blocks: Vec<Vec<usize>> = vec![(0..graphs[0].len()).collect()];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut cycle_words = Vec::new();
    for j in 1..m {
        let map = embed_graph(&graphs[j - 1], &graphs[j])?;
        for b in blocks.iter_mut().chain(cycles.iter_mut()) {
            for v in b.iter_mut() {
                *v = map[*v];
            }
        }
        let g = &graphs[j];
        let mut covered = vec![false; g.len()];
        for &w in &map {
            covered[w] = true;
        }
        let fresh: Vec<usize> = (0..g.len()).filter(|&v| !covered[v]).collect();
        let expected = n << j;
        if fresh.len() != expected {
            return Err(Error::Inconsistent(format!("V_{} has {} vertices, expected {expected}", j + 1, fresh.len())));
        }
        let start = *fresh
            .iter()
            .find(|&&v| g.right_class(v).contains(PointName::A(1)))
            .ok_or_else(|| Error::Inconsistent(format!("no new vertex ends at a1 in G(q_{})", j + 1)))?;
        let (cycle, word) = single_cycle(g, &fresh, start)?;
        blocks.push(fresh);
        cycles.push(cycle);
        cycle_words.push(word);
    }

    let g = graphs.last().unwrap().clone();
    let mut block_of = vec![usize::MAX; g.len()];
    for (b, vs) in blocks.iter().enumerate() {
        for &v in vs {
            block_of[v] = b;
        }
    }
    if block_of.contains(&usize::MAX) {
        return Err(Error::Inconsistent("blocks do not cover the graph".into()));
    }
    for (j, vs) in blocks.iter().enumerate() {
        let reach = digraph::reachable(g.adjacency(), vs.iter().copied());
        for (k, ws) in blocks.iter().enumerate() {
            let path = ws.iter().any(|&w| reach[w]);
            if path != (j <= k) {
                return Err(Error::Inconsistent(format!(
                    "path from V_{} to V_{} is {}",
                    j + 1,
                    k + 1,
                    if path { "present" } else { "missing" }
                )));
            }
        }
    }
    Ok(TowerDecomposition { contexts, graph: g, blocks, cycles, cycle_words })
}

/// Number of distinct label words of length `L` read along infinite paths.
///
/// Counted by dynamic programming over the sets of vertices at which a
/// word can end, so distinct paths carrying the same word count once.
pub fn count_label_paths(g: &UnivoqueGraph, len: usize) -> u128 {
    let live = g.live_vertices();
    let start: Vec<usize> = (0..g.len()).filter(|&v| live[v]).collect();
    if start.is_empty() {
        return 0;
    }
    let mut layer: HashMap<Vec<usize>, u128> = HashMap::from([(start, 1)]);
    for _ in 0..len {
        let mut next: HashMap<Vec<usize>, u128> = HashMap::new();
        for (set, count) in layer {
            for (_, targets) in step_by_digit(g, &set, &live) {
                *next.entry(targets).or_insert(0) += count;
            }
        }
        layer = next;
    }
    layer.values().sum()
}

/// Splits `set` by vertex label and returns, for every label present, the
/// sorted set of live successors.
fn step_by_digit(g: &UnivoqueGraph, set: &[usize], live: &[bool]) -> BTreeMap<Digit, Vec<usize>> {
    let mut out: BTreeMap<Digit, Vec<usize>> = BTreeMap::new();
    for &v in set {
        let entry = out.entry(g.vertices()[v].label).or_default();
        entry.extend(g.successors(v).iter().copied().filter(|&w| live[w]));
    }
    for targets in out.values_mut() {
        targets.sort_unstable();
        targets.dedup();
    }
    out
}

/// Calls `visit` on every label word of length `len` read along an
/// infinite path, in lexicographic order.
pub fn visit_path_words(g: &UnivoqueGraph, len: usize, mut visit: impl FnMut(&[Digit])) {
    let live = g.live_vertices();
    let start: Vec<usize> = (0..g.len()).filter(|&v| live[v]).collect();
    if start.is_empty() {
        return;
    }
    let mut word = Vec::with_capacity(len);
    walk(g, &live, &start, len, &mut word, &mut visit);
}

fn walk(
    g: &UnivoqueGraph,
    live: &[bool],
    set: &[usize],
    len: usize,
    word: &mut Vec<Digit>,
    visit: &mut impl FnMut(&[Digit]),
) {
    if word.len() == len {
        visit(word);
        return;
    }
    for (d, targets) in step_by_digit(g, set, live) {
        word.push(d);
        walk(g, live, &targets, len, word, visit);
        word.pop();
    }
}

/// Longest word length accepted by [`path_words`].
pub const MAX_WORD_LEN: usize = 14;
/// Largest word list returned by [`path_words`].
pub const MAX_WORDS: usize = 1_000_000;

/// All label words of length `len` read along infinite paths, sorted.
pub fn path_words(g: &UnivoqueGraph, len: usize) -> Result<Vec<Word>> {
    if len > MAX_WORD_LEN {
        return Err(Error::InvalidArgument(format!("word length {len} exceeds {MAX_WORD_LEN}")));
    }
    let count = count_label_paths(g, len);
    if count > MAX_WORDS as u128 {
        return Err(Error::BoundExceeded(MAX_WORDS));
    }
    let mut out = Vec::with_capacity(count as usize);
    visit_path_words(g, len, |w| out.push(Word::new(w.to_vec())));
    Ok(out)
}
