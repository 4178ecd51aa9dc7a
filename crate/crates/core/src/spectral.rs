//! Perron radius, entropy and dimension of the sets generated by a graph.
//!
//! Radii are computed per strongly connected component by power iteration
//! on `B + I`, which is primitive for every irreducible `B`, so periodic
//! components converge as well. The iteration stops on the Collatz–Wielandt
//! bracket `min (Bx)_i/x_i ≤ r ≤ max (Bx)_i/x_i`, which also provides the
//! reported error bound. Small components are cross-checked against the
//! exact characteristic polynomial.
//!
//! Everything here is generic over the float type; `f64` is the default
//! used by the rest of the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Signed, Zero};
use serde::Serialize;

use crate::base::BaseContext;
use crate::digits::BaseClass;
use crate::digraph;
use crate::error::{Error, Result};
use crate::graph::{UnivoqueGraph, Variant};

/// Largest component whose radius is cross-checked against the exact
/// characteristic polynomial.
pub const CHAR_POLY_LIMIT: usize = 12;
/// Iteration cap of the power method.
pub const MAX_ITERATIONS: usize = 100_000;

/// A radius estimate with a rigorous-in-exact-arithmetic error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Radius<T> {
    pub value: T,
    pub error: T,
    pub iterations: usize,
}

/// Radius of one strongly connected component.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentReport<T> {
    pub vertices: Vec<String>,
    #[serde(skip)]
    pub ids: Vec<usize>,
    pub radius: T,
    pub radius_err: T,
    /// Whether the component carries a cycle (otherwise its radius is 0).
    pub cyclic: bool,
}

/// Spectral data of one graph.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport<T> {
    #[serde(skip)]
    pub matrix: Vec<Vec<u32>>,
    pub radius: T,
    pub radius_err: T,
    pub entropy: T,
    pub dimension: T,
    pub scc: Vec<ComponentReport<T>>,
}

/// Edge-count matrix of the graph, rows and columns in vertex order.
pub fn adjacency_matrix(g: &UnivoqueGraph) -> Vec<Vec<u32>> {
    let mut a = vec![vec![0u32; g.len()]; g.len()];
    for e in g.edges() {
        a[e.from][e.to] += 1;
    }
    a
}

fn cast<T: Float + FromPrimitive>(x: f64) -> T {
    T::from_f64(x).expect("float conversion")
}

/// Stopping tolerance: `max(1e-12, 100·ε)` relative.
pub fn tolerance<T: Float + FromPrimitive>() -> T {
    cast::<T>(1e-12).max(T::epsilon() * cast(100.0))
}

/// Perron radius of the irreducible nonnegative matrix `b` (given as a
/// dense square matrix), by power iteration on `b + I`.
pub fn perron_radius<T: Float + FromPrimitive>(b: &[Vec<u32>]) -> Radius<T> {
    let n = b.len();
    if n == 0 {
        return Radius { value: T::zero(), error: T::zero(), iterations: 0 };
    }
    let tol = tolerance::<T>();
    let mut x = vec![T::one(); n];
    let mut lo = T::zero();
    let mut hi = T::infinity();
    let mut it = 0;
    while it < MAX_ITERATIONS {
        it += 1;
        let y: Vec<T> = (0..n)
            .map(|i| {
                let mut s = x[i];
                for (j, &c) in b[i].iter().enumerate() {
                    if c != 0 {
                        s = s + cast::<T>(c as f64) * x[j];
                    }
                }
                s
            })
            .collect();
        let ratios = y.iter().zip(&x).map(|(&yi, &xi)| yi / xi);
        let (mut mn, mut mx) = (T::infinity(), T::zero());
        for r in ratios {
            mn = mn.min(r);
            mx = mx.max(r);
        }
        lo = lo.max(mn);
        hi = hi.min(mx);
        let norm = y.iter().fold(T::zero(), |a, &v| a.max(v));
        x = y.into_iter().map(|v| v / norm).collect();
        if hi - lo <= tol * hi {
            break;
        }
    }
    let two = cast::<T>(2.0);
    Radius { value: (lo + hi) / two - T::one(), error: (hi - lo) / two, iterations: it }
}

/// Characteristic polynomial `det(tI − A)`, little-endian, by the
/// Faddeev–LeVerrier recursion in exact integer arithmetic.
pub fn characteristic_polynomial(a: &[Vec<u32>]) -> Vec<BigInt> {
    let n = a.len();
    let am: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mul = |x: &Vec<Vec<BigInt>>, y: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).fold(BigInt::zero(), |s, k| s + &x[i][k] * &y[k][j])).collect()).collect()
    };
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::from(1);
    let mut mk: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I, c_{n−k} = −tr(A·M_k)/k.
        let mut next = mul(&am, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        mk = next;
        let amk = mul(&am, &mk);
        let tr = (0..n).fold(BigInt::zero(), |s, i| s + &amk[i][i]);
        coeffs[n - k] = -(tr / BigInt::from(k));
    }
    coeffs
}

fn eval_rational(p: &[BigInt], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
}

/// Does the characteristic polynomial of `a` change sign on
/// `[r − δ, r + δ]` with `δ = max(1e-9, 1000·ε)·r`?
pub fn char_poly_brackets<T: Float + FromPrimitive>(a: &[Vec<u32>], r: T) -> bool {
    let p = characteristic_polynomial(a);
    let rel = cast::<T>(1e-9).max(T::epsilon() * cast(1000.0));
    let delta = (r * rel).max(rel);
    let to_q = |v: T| BigRational::from_float(v.to_f64().unwrap_or(f64::NAN));
    let (Some(lo), Some(hi)) = (to_q(r - delta), to_q(r + delta)) else {
        return false;
    };
    let (pl, ph) = (eval_rational(&p, &lo), eval_rational(&p, &hi));
    pl.is_zero() || ph.is_zero() || pl.is_negative() != ph.is_negative()
}

/// Radius, error and per-component breakdown of a graph, without the
/// base-dependent entropy normalization.
pub fn spectral_radius<T: Float + FromPrimitive>(g: &UnivoqueGraph) -> Result<(Radius<T>, Vec<ComponentReport<T>>)> {
    let a = adjacency_matrix(g);
    let comps = digraph::tarjan(g.adjacency());
    let mut reports = Vec::with_capacity(comps.len());
    let mut best = Radius { value: T::zero(), error: T::zero(), iterations: 0 };
    for comp in comps {
        let cyclic = digraph::is_cyclic(g.adjacency(), &comp);
        let sub: Vec<Vec<u32>> = comp.iter().map(|&i| comp.iter().map(|&j| a[i][j]).collect()).collect();
        let r = if cyclic {
            perron_radius::<T>(&sub)
        } else {
            Radius { value: T::zero(), error: T::zero(), iterations: 0 }
        };
        if cyclic && comp.len() <= CHAR_POLY_LIMIT && !char_poly_brackets(&sub, r.value) {
            return Err(Error::Inconsistent(format!(
                "power iteration radius {} is not bracketed by the characteristic polynomial",
                r.value.to_f64().unwrap_or(f64::NAN)
            )));
        }
        if r.value > best.value {
            best = r;
        }
        reports.push(ComponentReport {
            vertices: comp.iter().map(|&v| g.vertex_name(v)).collect(),
            ids: comp,
            radius: r.value,
            radius_err: r.error,
            cyclic,
        });
    }
    Ok((best, reports))
}

/// Full spectral report: radius, entropy `log r`, dimension
/// `log r / log q`, and the per-component radii.
pub fn spectral_report<T: Float + FromPrimitive>(g: &UnivoqueGraph) -> Result<SpectralReport<T>> {
    let (r, scc) = spectral_radius::<T>(g)?;
    let q = cast::<T>(g.context().q_f64());
    let entropy = r.value.max(T::one()).ln();
    Ok(SpectralReport {
        matrix: adjacency_matrix(g),
        radius: r.value,
        radius_err: r.error,
        entropy,
        dimension: entropy / q.ln(),
        scc,
    })
}

/// `log r / log q` for the graph of `ctx`.
pub fn dimension_of(g: &UnivoqueGraph) -> Result<f64> {
    Ok(spectral_report::<f64>(g)?.dimension)
}

/// Per-component radii of `G̃(q)` and whether `G̃₁(q)` carries the full
/// entropy of `G̃(q)`.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentDimensions<T> {
    pub tilde: SpectralReport<T>,
    pub tilde1_radius: T,
    pub tilde1_dimension: T,
    /// `G̃(q)` is strongly connected, or the radius of `G̃₁(q)` equals that
    /// of `G̃(q)` within `1e-9`.
    pub tilde1_carries_dimension: bool,
}

pub fn component_dimensions<T: Float + FromPrimitive>(ctx: &BaseContext) -> Result<ComponentDimensions<T>> {
    if ctx.class() != BaseClass::InClosureUNotU {
        return Err(Error::UnsupportedClass(ctx.class()));
    }
    let tilde = spectral_report::<T>(&UnivoqueGraph::build(ctx, Variant::Tilde)?)?;
    let t1 = spectral_report::<T>(&UnivoqueGraph::build(ctx, Variant::Tilde1)?)?;
    let close = (t1.radius - tilde.radius).abs() <= cast::<T>(1e-9).max(tolerance::<T>() * tilde.radius * cast(10.0));
    Ok(ComponentDimensions {
        tilde1_carries_dimension: tilde.scc.len() == 1 || close,
        tilde1_radius: t1.radius,
        tilde1_dimension: t1.dimension,
        tilde,
    })
}
