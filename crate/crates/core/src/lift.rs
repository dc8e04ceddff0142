//! Lifting a moment web to three dimensions.
//!
//! Along a compact edge from `T` to `T'` with stabiliser `r` and degrees
//! `(t, s)`:
//!
//! ```text
//! λ(T') = λ(T) − s·J₂(r)
//! ν₃(T') = ν₃(T) + t·⟨r, λ(T)⟩
//! ```
//!
//! `λ` is single valued; `ν₃` may pick up a residual around cycles.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::classes::{cup_on_divisor, curve_degree, ClassError, CohClass};
use crate::fan::{FanError, FanTriangulation};
use crate::lattice::{j2, primitive_integer_direction, RatVec2, Rational};
use crate::web::{EdgeSource, MomentWeb};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("edge {0} has no bundle degree s")]
    MissingS(usize),
    #[error("edge {edge} has non-integral bundle degree {s}")]
    NonIntegralS { edge: usize, s: Rational },
    #[error("bundle degrees are not closed: λ around edge {edge} (`{from}` → `{to}`) is off by {defect}")]
    LambdaHolonomy {
        edge: usize,
        from: String,
        to: String,
        defect: RatVec2,
        /// Set for fan-built webs, where this cannot happen.
        internal: bool,
    },
    #[error("web was not built from this fan")]
    FanMismatch,
    #[error("internal consistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Fan(#[from] FanError),
}

impl LiftError {
    pub fn is_internal(&self) -> bool {
        match self {
            LiftError::LambdaHolonomy { internal, .. } => *internal,
            LiftError::Internal(_) => true,
            LiftError::Fan(e) => e.is_internal(),
            _ => false,
        }
    }
}

/// Where the bundle degrees come from.
#[derive(Debug, Clone, Copy)]
pub enum Bundle<'a> {
    Fan {
        fan: &'a FanTriangulation,
        omega: &'a CohClass,
        f: &'a CohClass,
    },
    /// Use the `s` values already stored on the web edges.
    Web,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResidualSite {
    /// Compact divisor dual to an interior ray (index into the fan rays).
    InteriorRay(usize),
    /// Fundamental cycle closed by a non-tree edge.
    Cycle(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub site: ResidualSite,
    pub name: String,
    /// Vertices visited by the cycle, for display.
    pub vertices: Vec<usize>,
    pub value: Rational,
    /// Pairing `([ω] ∪ [F])·E` for interior rays.
    pub pairing: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedWeb {
    pub base: MomentWeb,
    pub lambda: Vec<RatVec2>,
    /// Spanning-tree values; single valued exactly when `closed`.
    pub nu3: Vec<Rational>,
    /// Per interior ray for fan webs, per fundamental cycle otherwise.
    pub residuals: Vec<Residual>,
    /// Fundamental-cycle residuals; equal to `residuals` for user webs.
    pub cycle_residuals: Vec<Residual>,
    pub closed: bool,
    pub rays3d: Vec<[BigInt; 3]>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GaugeShift {
    pub lambda0: RatVec2,
}

/// Change of `ν₃` crossing edge `e` in its stored direction.
fn nu3_step(web: &MomentWeb, lambda: &[RatVec2], e: usize) -> Rational {
    let edge = &web.edges[e];
    &edge.t * lambda[edge.from].pair(edge.stabiliser)
}

/// `ν₃` change walking from `a` across edge `e`.
fn signed_step(web: &MomentWeb, lambda: &[RatVec2], e: usize, a: usize) -> Rational {
    let step = nu3_step(web, lambda, e);
    if web.edges[e].from == a {
        step
    } else {
        -step
    }
}

fn tree_path_to_root(web: &MomentWeb, mut v: usize) -> Vec<usize> {
    let mut path = vec![v];
    while let Some(e) = web.tree.parent_edge[v] {
        let edge = &web.edges[e];
        v = if edge.to == v { edge.from } else { edge.to };
        path.push(v);
    }
    path
}

fn fundamental_residuals(web: &MomentWeb, lambda: &[RatVec2], nu3: &[Rational]) -> Vec<Residual> {
    (0..web.edges.len())
        .filter(|&e| !web.tree.is_tree_edge(e))
        .map(|e| {
            let edge = &web.edges[e];
            let value = &nu3[edge.from] + nu3_step(web, lambda, e) - &nu3[edge.to];
            Residual {
                site: ResidualSite::Cycle(e),
                name: format!("{}→{}", web.vertices[edge.from].id, web.vertices[edge.to].id),
                vertices: cycle_order(web, edge.from, edge.to),
                value,
                pairing: None,
            }
        })
        .collect()
}

/// Vertices of the fundamental cycle through the non-tree edge `from → to`.
fn cycle_order(web: &MomentWeb, from: usize, to: usize) -> Vec<usize> {
    let a = tree_path_to_root(web, from);
    let b = tree_path_to_root(web, to);
    let lca = *a.iter().find(|v| b.contains(v)).expect("tree is connected");
    let mut cycle: Vec<usize> = a.iter().copied().take_while(|&v| v != lca).collect();
    cycle.reverse();
    let mut out = vec![lca];
    out.extend(cycle);
    out.extend(b.iter().copied().take_while(|&v| v != lca));
    out
}

/// `ν₃` change walking each star clockwise, with the matching pairing.
fn star_residuals(
    fan: &FanTriangulation,
    omega: &CohClass,
    f: &CohClass,
    web: &MomentWeb,
    lambda: &[RatVec2],
) -> Result<Vec<Residual>, LiftError> {
    let mut out = Vec::new();
    for star in fan.stars() {
        let m = star.len();
        let mut value = Rational::zero();
        for j in 0..m {
            let e = star.spokes[j];
            // Crossing spoke j clockwise goes from triangles[j] to triangles[j−1].
            value += signed_step(web, lambda, e, star.triangles[j]);
        }
        let pairing = cup_on_divisor(fan, omega, f, star.center)?;
        out.push(Residual {
            site: ResidualSite::InteriorRay(star.center),
            name: fan.ray_id(star.center).to_string(),
            vertices: star.triangles.clone(),
            value,
            pairing: Some(pairing),
        });
    }
    Ok(out)
}

pub fn ray_directions_3d(web: &MomentWeb, lambda: &[RatVec2]) -> Vec<[BigInt; 3]> {
    web.rays
        .iter()
        .map(|ray| {
            let r = ray.stabiliser;
            let triple = [
                Rational::from_integer((-r.y).into()),
                Rational::from_integer(r.x.into()),
                lambda[ray.at].pair(r),
            ];
            let v = primitive_integer_direction(&triple);
            [v[0].clone(), v[1].clone(), v[2].clone()]
        })
        .collect()
}

pub fn build_lift(
    web: &MomentWeb,
    bundle: Bundle<'_>,
    basepoint_lambda: RatVec2,
    basepoint_nu3: Rational,
) -> Result<LiftedWeb, LiftError> {
    let mut base = web.clone();
    if let Bundle::Fan { fan, f, .. } = bundle {
        f.require_integral(fan)?;
        for edge in base.edges.iter_mut() {
            let EdgeSource::Fan(i) = edge.source else {
                return Err(LiftError::FanMismatch);
            };
            if i >= fan.internal_edges.len() {
                return Err(LiftError::FanMismatch);
            }
            edge.s = Some(curve_degree(fan, f, i)?);
        }
    }
    for (e, edge) in base.edges.iter().enumerate() {
        match &edge.s {
            None => return Err(LiftError::MissingS(e)),
            Some(s) if !s.is_integer() => return Err(LiftError::NonIntegralS { edge: e, s: s.clone() }),
            Some(_) => {}
        }
    }

    let n = base.vertices.len();
    let mut lambda = vec![RatVec2::zero(); n];
    let mut nu3 = vec![Rational::zero(); n];
    lambda[base.basepoint] = basepoint_lambda;
    nu3[base.basepoint] = basepoint_nu3;
    for &v in &base.tree.order[1..] {
        let e = base.tree.parent_edge[v].expect("non-root vertex has a parent edge");
        let edge = &base.edges[e];
        let s = edge.s.as_ref().expect("checked above");
        let shift = RatVec2::scaled_lattice(s, j2(edge.stabiliser));
        if edge.to == v {
            lambda[v] = &lambda[edge.from] - &shift;
            nu3[v] = &nu3[edge.from] + nu3_step(&base, &lambda, e);
        } else {
            lambda[v] = &lambda[edge.to] + &shift;
            nu3[v] = &nu3[edge.to] - &edge.t * lambda[edge.to].pair(edge.stabiliser);
        }
    }

    let fan_built = matches!(bundle, Bundle::Fan { .. });
    for (e, edge) in base.edges.iter().enumerate() {
        let s = edge.s.as_ref().expect("checked above");
        let expected = &lambda[edge.from] - &RatVec2::scaled_lattice(s, j2(edge.stabiliser));
        if expected != lambda[edge.to] {
            return Err(LiftError::LambdaHolonomy {
                edge: e,
                from: base.vertices[edge.from].id.clone(),
                to: base.vertices[edge.to].id.clone(),
                defect: &lambda[edge.to] - &expected,
                internal: fan_built,
            });
        }
        let at_from = &edge.t * lambda[edge.from].pair(edge.stabiliser);
        let at_to = &edge.t * lambda[edge.to].pair(edge.stabiliser);
        if at_from != at_to {
            return Err(LiftError::Internal(format!("ν₃ step on edge {e} depends on the endpoint")));
        }
    }

    let cycle_residuals = fundamental_residuals(&base, &lambda, &nu3);
    let residuals = match bundle {
        Bundle::Fan { fan, omega, f } => {
            let stars = star_residuals(fan, omega, f, &base, &lambda)?;
            if stars.len() != cycle_residuals.len() {
                return Err(LiftError::Internal(format!(
                    "{} interior rays but cycle rank {}",
                    stars.len(),
                    cycle_residuals.len()
                )));
            }
            let stars_closed = stars.iter().all(|r| r.value.is_zero());
            let cycles_closed = cycle_residuals.iter().all(|r| r.value.is_zero());
            if stars_closed != cycles_closed {
                return Err(LiftError::Internal("star residuals disagree with cycle residuals".into()));
            }
            stars
        }
        Bundle::Web => cycle_residuals.clone(),
    };
    let closed = residuals.iter().all(|r| r.value.is_zero());
    let rays3d = ray_directions_3d(&base, &lambda);
    let lifted = LiftedWeb {
        base,
        lambda,
        nu3,
        residuals,
        cycle_residuals,
        closed,
        rays3d,
    };
    closure_report(&lifted)?;
    Ok(lifted)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub closed: bool,
    pub per_divisor: Vec<(String, Rational)>,
}

/// Closure verdict, cross-checking each star residual against its pairing.
pub fn closure_report(lifted: &LiftedWeb) -> Result<ClosureReport, LiftError> {
    for r in &lifted.residuals {
        if let Some(p) = &r.pairing {
            if *p != r.value {
                return Err(LiftError::Internal(format!(
                    "residual {} at {} but ([ω]∪[F])·{} = {}",
                    r.value, r.name, r.name, p
                )));
            }
        }
    }
    Ok(ClosureReport {
        closed: lifted.residuals.iter().all(|r| r.value.is_zero()),
        per_divisor: lifted.residuals.iter().map(|r| (r.name.clone(), r.value.clone())).collect(),
    })
}

/// Applies `ν₃ ↦ ν₃ − λ⁰₂μ₁ + λ⁰₁μ₂` and `λ ↦ λ + λ⁰`.
pub fn gauge_transform(lifted: &LiftedWeb, shift: &GaugeShift) -> LiftedWeb {
    let l0 = &shift.lambda0;
    let mut out = lifted.clone();
    for (v, vertex) in lifted.base.vertices.iter().enumerate() {
        out.nu3[v] = &lifted.nu3[v] - &l0.y * &vertex.mu.x + &l0.x * &vertex.mu.y;
        out.lambda[v] = &lifted.lambda[v] + l0;
    }
    out.rays3d = ray_directions_3d(&out.base, &out.lambda);
    out
}
