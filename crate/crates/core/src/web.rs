//! The planar moment web: one vertex per fixed point, a compact edge per
//! invariant sphere and a ray per non-compact invariant curve.
//!
//! Positions are propagated from a basepoint with
//! `μ(to) = μ(from) + t·J₂(r)`, where `r` is the primitive stabiliser of the
//! edge and `t` the symplectic degree of the curve.

use std::collections::{HashMap, VecDeque};

use num_traits::Zero;
use thiserror::Error;

use crate::classes::{curve_degree, CohClass};
use crate::fan::{star_of_interior_ray, FanError, FanTriangulation};
use crate::lattice::{is_primitive, j2, LatticeVec2, RatVec2, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WebError {
    #[error("web has no vertices")]
    Empty,
    #[error("class is not Kähler: non-positive degree on {}", .0.join(", "))]
    NonKaehler(Vec<String>),
    #[error("{what} has non-primitive vector {v}")]
    NotPrimitive { what: String, v: LatticeVec2 },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("edge {0} joins vertex `{1}` to itself")]
    SelfLoop(usize, String),
    #[error("ray at `{at}`: stabiliser {stabiliser} is not orthogonal to direction {direction}")]
    RayStabiliser {
        at: String,
        stabiliser: LatticeVec2,
        direction: LatticeVec2,
    },
    #[error("vertex `{0}` meets {1} edge ends, expected 3")]
    NotTrivalent(String, usize),
    #[error("zero-tension fails at `{0}`: outgoing directions sum to {1}")]
    ZeroTension(String, LatticeVec2),
    #[error("vertex `{vertex}` given at {given} but propagation places it at {propagated}")]
    PositionMismatch {
        vertex: String,
        given: RatVec2,
        propagated: RatVec2,
    },
    #[error("edge {edge} (`{from}` → `{to}`) closes a cycle with non-zero position holonomy {residual}")]
    InconsistentCycle {
        edge: usize,
        from: String,
        to: String,
        residual: RatVec2,
    },
    #[error("vertex `{0}` is not connected to the basepoint")]
    Disconnected(String),
    #[error("basepoint {0} does not exist")]
    BadBasepoint(String),
    #[error("internal consistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Fan(#[from] FanError),
}

impl WebError {
    pub fn is_internal(&self) -> bool {
        match self {
            WebError::Internal(_) => true,
            WebError::Fan(e) => e.is_internal(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WebVertex {
    pub id: String,
    pub mu: RatVec2,
    /// Cone of the fixed point, for fan-built webs.
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSource {
    /// Index into `FanTriangulation::internal_edges`.
    Fan(usize),
    User,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WebEdge {
    pub from: usize,
    pub to: usize,
    pub stabiliser: LatticeVec2,
    /// Symplectic degree; `μ(to) − μ(from) = t·J₂(stabiliser)`.
    pub t: Rational,
    /// Bundle degree, once known.
    pub s: Option<Rational>,
    pub source: EdgeSource,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WebRay {
    pub at: usize,
    /// Normalised so that `J₂(stabiliser) == direction`.
    pub stabiliser: LatticeVec2,
    pub direction: LatticeVec2,
}

/// Breadth-first spanning tree over the compact edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    /// Vertices in visiting order, basepoint first.
    pub order: Vec<usize>,
    /// Edge through which each vertex was reached.
    pub parent_edge: Vec<Option<usize>>,
}

impl SpanningTree {
    pub fn is_tree_edge(&self, edge: usize) -> bool {
        self.parent_edge.contains(&Some(edge))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentWeb {
    pub vertices: Vec<WebVertex>,
    pub edges: Vec<WebEdge>,
    pub rays: Vec<WebRay>,
    pub basepoint: usize,
    pub tree: SpanningTree,
    /// Edges with `t ≤ 0`; empty for Kähler data.
    pub nonpositive_edges: Vec<usize>,
    pub warnings: Vec<String>,
}

impl MomentWeb {
    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn is_kaehler(&self) -> bool {
        self.nonpositive_edges.is_empty()
    }

    /// Displacement `t·J₂(r)` along edge `e`, from its `from` end.
    pub fn displacement(&self, e: usize) -> RatVec2 {
        let edge = &self.edges[e];
        RatVec2::scaled_lattice(&edge.t, j2(edge.stabiliser))
    }

    /// Primitive directions leaving vertex `v`.
    pub fn outgoing_directions(&self, v: usize) -> Vec<LatticeVec2> {
        let mut out = Vec::new();
        for edge in &self.edges {
            if edge.from == v {
                out.push(j2(edge.stabiliser));
            }
            if edge.to == v {
                out.push(-j2(edge.stabiliser));
            }
        }
        out.extend(self.rays.iter().filter(|r| r.at == v).map(|r| r.direction));
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WebOptions {
    pub basepoint_mu: Option<RatVec2>,
    pub allow_non_kaehler: bool,
}

fn spanning_tree(n: usize, edges: &[(usize, usize)], root: usize) -> SpanningTree {
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in edges.iter().enumerate() {
        adjacency[a].push((b, e));
        adjacency[b].push((a, e));
    }
    for list in &mut adjacency {
        list.sort();
    }
    let mut parent_edge = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(w, e) in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                parent_edge[w] = Some(e);
                queue.push_back(w);
            }
        }
    }
    SpanningTree { order, parent_edge }
}

/// Walks the tree assigning positions, returning them in vertex order.
fn propagate_positions(web_edges: &[WebEdge], tree: &SpanningTree, n: usize, base: RatVec2) -> Vec<Option<RatVec2>> {
    let mut mu: Vec<Option<RatVec2>> = vec![None; n];
    mu[tree.order[0]] = Some(base);
    for &v in &tree.order[1..] {
        let e = tree.parent_edge[v].expect("non-root vertex has a parent edge");
        let edge = &web_edges[e];
        let step = RatVec2::scaled_lattice(&edge.t, j2(edge.stabiliser));
        mu[v] = Some(if edge.to == v {
            mu[edge.from].as_ref().expect("parent placed first") + &step
        } else {
            mu[edge.to].as_ref().expect("parent placed first") - &step
        });
    }
    mu
}

/// Edges whose endpoint positions disagree with `t·J₂(r)`, with the defect.
fn position_defects(web: &MomentWeb) -> Vec<(usize, RatVec2)> {
    (0..web.edges.len())
        .filter_map(|e| {
            let edge = &web.edges[e];
            let actual = &web.vertices[edge.to].mu - &web.vertices[edge.from].mu;
            let defect = &actual - &web.displacement(e);
            (!defect.is_zero()).then_some((e, defect))
        })
        .collect()
}

pub fn build_moment_web(
    fan: &FanTriangulation,
    omega: &CohClass,
    basepoint_triangle: usize,
    opts: &WebOptions,
) -> Result<MomentWeb, WebError> {
    let n = fan.triangles.len();
    if basepoint_triangle >= n {
        return Err(WebError::BadBasepoint(format!("triangle {basepoint_triangle}")));
    }
    let pairs: Vec<(usize, usize)> = fan.internal_edges.iter().map(|e| e.triangles).collect();
    let tree = spanning_tree(n, &pairs, basepoint_triangle);
    let mut rank = vec![0usize; n];
    for (k, &v) in tree.order.iter().enumerate() {
        rank[v] = k;
    }

    let mut edges = Vec::with_capacity(fan.internal_edges.len());
    let mut nonpositive = Vec::new();
    for (i, ie) in fan.internal_edges.iter().enumerate() {
        let (x, y) = ie.rays;
        let (t0, t1) = ie.triangles;
        // r is the reversed edge vector as the source triangle traverses it.
        let (from, to, r) = if rank[t0] <= rank[t1] {
            (t0, t1, fan.u(x) - fan.u(y))
        } else {
            (t1, t0, fan.u(y) - fan.u(x))
        };
        let t = curve_degree(fan, omega, i)?;
        if t <= Rational::zero() {
            nonpositive.push(i);
        }
        edges.push(WebEdge {
            from,
            to,
            stabiliser: r,
            t,
            s: None,
            source: EdgeSource::Fan(i),
        });
    }
    if !nonpositive.is_empty() && !opts.allow_non_kaehler {
        let names = nonpositive
            .iter()
            .map(|&i| {
                let (x, y) = fan.internal_edges[i].rays;
                format!("{}–{}", fan.ray_id(x), fan.ray_id(y))
            })
            .collect();
        return Err(WebError::NonKaehler(names));
    }

    let base = opts.basepoint_mu.clone().unwrap_or_default();
    let mu = propagate_positions(&edges, &tree, n, base);
    let vertices = (0..n)
        .map(|t| WebVertex {
            id: format!("T{t}"),
            mu: mu[t].clone().expect("dual graph is connected"),
            label: Some(fan.triangle_ids(t).join(",")),
        })
        .collect();

    let rays = fan
        .boundary_edges
        .iter()
        .map(|b| {
            let r = fan.u(b.rays.0) - fan.u(b.rays.1);
            WebRay {
                at: b.triangle,
                stabiliser: r,
                direction: j2(r),
            }
        })
        .collect();

    let mut web = MomentWeb {
        vertices,
        edges,
        rays,
        basepoint: basepoint_triangle,
        tree,
        nonpositive_edges: nonpositive.clone(),
        warnings: Vec::new(),
    };

    if let Some((e, defect)) = position_defects(&web).into_iter().next() {
        return Err(WebError::Internal(format!(
            "position holonomy {defect} across dual edge {e}"
        )));
    }
    for v in 0..n {
        let degree = web.outgoing_directions(v).len();
        if degree != 3 {
            return Err(WebError::Internal(format!("vertex T{v} has degree {degree}")));
        }
    }
    if let Some(bad) = zero_tension_check(&web).into_iter().next() {
        return Err(WebError::Internal(format!(
            "zero-tension fails at {}: sum {}",
            web.vertices[bad.vertex].id, bad.sum
        )));
    }
    for &i in &nonpositive {
        let (x, y) = fan.internal_edges[i].rays;
        web.warnings.push(format!(
            "non-positive degree {} on curve {}–{}",
            web.edges[i].t,
            fan.ray_id(x),
            fan.ray_id(y)
        ));
    }
    web.warnings.extend(check_embedding(&web));
    Ok(web)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensionViolation {
    pub vertex: usize,
    pub sum: LatticeVec2,
}

pub fn zero_tension_check(web: &MomentWeb) -> Vec<TensionViolation> {
    (0..web.vertices.len())
        .filter_map(|v| {
            let sum = web
                .outgoing_directions(v)
                .into_iter()
                .fold(LatticeVec2::ZERO, |acc, d| acc + d);
            (!sum.is_zero()).then_some(TensionViolation { vertex: v, sum })
        })
        .collect()
}

/// `Σ_j t_j·J₂(u_j − u_E)` around every interior ray, in ray order.
pub fn mu_holonomy_check(fan: &FanTriangulation, omega: &CohClass) -> Result<Vec<(usize, RatVec2)>, FanError> {
    let mut out = Vec::new();
    for &e in &fan.interior_rays {
        let star = star_of_interior_ray(fan, e)?;
        let mut sum = RatVec2::zero();
        for (j, &n) in star.neighbors.iter().enumerate() {
            let t = curve_degree(fan, omega, star.spokes[j])?;
            sum = &sum + &RatVec2::scaled_lattice(&t, j2(fan.u(n) - fan.u(e)));
        }
        out.push((e, sum));
    }
    Ok(out)
}

/// Coincident vertices and vertices lying inside non-incident edges.
pub fn check_embedding(web: &MomentWeb) -> Vec<String> {
    let mut warnings = Vec::new();
    let n = web.vertices.len();
    for a in 0..n {
        for b in a + 1..n {
            if web.vertices[a].mu == web.vertices[b].mu {
                warnings.push(format!(
                    "vertices {} and {} coincide at {}",
                    web.vertices[a].id, web.vertices[b].id, web.vertices[a].mu
                ));
            }
        }
    }
    for edge in &web.edges {
        let p = &web.vertices[edge.from].mu;
        let q = &web.vertices[edge.to].mu;
        let d = q - p;
        let len2 = &d.x * &d.x + &d.y * &d.y;
        if len2.is_zero() {
            continue;
        }
        for (v, vertex) in web.vertices.iter().enumerate() {
            if v == edge.from || v == edge.to {
                continue;
            }
            let w = &vertex.mu - p;
            let cross = &d.x * &w.y - &d.y * &w.x;
            let along = &d.x * &w.x + &d.y * &w.y;
            if cross.is_zero() && along > Rational::zero() && along < len2 {
                warnings.push(format!(
                    "vertex {} lies on edge {}–{}",
                    vertex.id, web.vertices[edge.from].id, web.vertices[edge.to].id
                ));
            }
        }
    }
    warnings
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserVertex {
    pub id: String,
    pub mu: Option<RatVec2>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserEdge {
    pub from: String,
    pub to: String,
    pub r: LatticeVec2,
    pub t: Rational,
    pub s: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserRay {
    pub at: String,
    pub direction: LatticeVec2,
    pub stabiliser: Option<LatticeVec2>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UserWeb {
    pub vertices: Vec<UserVertex>,
    pub edges: Vec<UserEdge>,
    pub rays: Vec<UserRay>,
}

/// Completes and validates a decorated graph supplied directly by the user.
pub fn ingest_user_web(user: &UserWeb, basepoint: Option<&str>, opts: &WebOptions) -> Result<MomentWeb, WebError> {
    if user.vertices.is_empty() {
        return Err(WebError::Empty);
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, v) in user.vertices.iter().enumerate() {
        if index.insert(v.id.as_str(), i).is_some() {
            return Err(WebError::DuplicateVertex(v.id.clone()));
        }
    }
    let lookup = |id: &str| index.get(id).copied().ok_or_else(|| WebError::UnknownVertex(id.to_string()));

    let mut edges = Vec::with_capacity(user.edges.len());
    let mut nonpositive = Vec::new();
    for (e, ue) in user.edges.iter().enumerate() {
        let (from, to) = (lookup(&ue.from)?, lookup(&ue.to)?);
        if from == to {
            return Err(WebError::SelfLoop(e, ue.from.clone()));
        }
        if !is_primitive(ue.r) {
            return Err(WebError::NotPrimitive {
                what: format!("edge {e} (`{}` → `{}`)", ue.from, ue.to),
                v: ue.r,
            });
        }
        if ue.t <= Rational::zero() {
            nonpositive.push(e);
        }
        edges.push(WebEdge {
            from,
            to,
            stabiliser: ue.r,
            t: ue.t.clone(),
            s: ue.s.clone(),
            source: EdgeSource::User,
        });
    }
    if !nonpositive.is_empty() && !opts.allow_non_kaehler {
        let names = nonpositive
            .iter()
            .map(|&e| format!("edge {e} (`{}` → `{}`)", user.edges[e].from, user.edges[e].to))
            .collect();
        return Err(WebError::NonKaehler(names));
    }

    let mut rays = Vec::with_capacity(user.rays.len());
    for ur in &user.rays {
        let at = lookup(&ur.at)?;
        if !is_primitive(ur.direction) {
            return Err(WebError::NotPrimitive {
                what: format!("ray at `{}`", ur.at),
                v: ur.direction,
            });
        }
        let r = LatticeVec2::new(ur.direction.y, -ur.direction.x);
        if let Some(given) = ur.stabiliser {
            if given != r && given != -r {
                return Err(WebError::RayStabiliser {
                    at: ur.at.clone(),
                    stabiliser: given,
                    direction: ur.direction,
                });
            }
        }
        rays.push(WebRay {
            at,
            stabiliser: r,
            direction: ur.direction,
        });
    }

    let root = match basepoint {
        Some(id) => index
            .get(id)
            .copied()
            .ok_or_else(|| WebError::BadBasepoint(format!("vertex `{id}`")))?,
        None => 0,
    };
    let base = match (&opts.basepoint_mu, &user.vertices[root].mu) {
        (Some(b), Some(given)) if b != given => {
            return Err(WebError::PositionMismatch {
                vertex: user.vertices[root].id.clone(),
                given: given.clone(),
                propagated: b.clone(),
            })
        }
        (Some(b), _) => b.clone(),
        (None, Some(given)) => given.clone(),
        (None, None) => RatVec2::zero(),
    };

    let n = user.vertices.len();
    let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.from, e.to)).collect();
    let tree = spanning_tree(n, &pairs, root);
    let mu = propagate_positions(&edges, &tree, n, base);
    let mut vertices = Vec::with_capacity(n);
    for (v, uv) in user.vertices.iter().enumerate() {
        let placed = mu[v].clone().ok_or_else(|| WebError::Disconnected(uv.id.clone()))?;
        if let Some(given) = &uv.mu {
            if *given != placed {
                return Err(WebError::PositionMismatch {
                    vertex: uv.id.clone(),
                    given: given.clone(),
                    propagated: placed,
                });
            }
        }
        vertices.push(WebVertex {
            id: uv.id.clone(),
            mu: placed,
            label: None,
        });
    }

    let mut web = MomentWeb {
        vertices,
        edges,
        rays,
        basepoint: root,
        tree,
        nonpositive_edges: nonpositive.clone(),
        warnings: Vec::new(),
    };
    if let Some((e, residual)) = position_defects(&web).into_iter().next() {
        return Err(WebError::InconsistentCycle {
            edge: e,
            from: user.edges[e].from.clone(),
            to: user.edges[e].to.clone(),
            residual,
        });
    }
    for v in 0..n {
        let degree = web.outgoing_directions(v).len();
        if degree != 3 {
            return Err(WebError::NotTrivalent(web.vertices[v].id.clone(), degree));
        }
    }
    if let Some(bad) = zero_tension_check(&web).into_iter().next() {
        return Err(WebError::ZeroTension(web.vertices[bad.vertex].id.clone(), bad.sum));
    }
    for &e in &nonpositive {
        web.warnings.push(format!("non-positive degree {} on edge {e}", web.edges[e].t));
    }
    web.warnings.extend(check_embedding(&web));
    Ok(web)
}

/// Decorated graphs used in tests and examples.
pub mod fixtures {
    use super::*;
    use crate::lattice::rat;

    /// Canonical bundle of `CP¹ × CP¹` with Kähler degrees `(k·m, k·n)` and
    /// bundle degrees `(m, −n)` on the two rulings.
    pub fn mmn(m: i64, n: i64, k: &Rational) -> UserWeb {
        let km = k * rat(m);
        let kn = k * rat(n);
        let v = |id: &str| UserVertex { id: id.into(), mu: None };
        let e = |from: &str, to: &str, r: (i64, i64), t: &Rational, s: i64| UserEdge {
            from: from.into(),
            to: to.into(),
            r: LatticeVec2::new(r.0, r.1),
            t: t.clone(),
            s: Some(rat(s)),
        };
        let ray = |at: &str, d: (i64, i64)| UserRay {
            at: at.into(),
            direction: LatticeVec2::new(d.0, d.1),
            stabiliser: None,
        };
        UserWeb {
            vertices: vec![v("A"), v("B"), v("C"), v("D")],
            edges: vec![
                e("A", "B", (1, 0), &kn, -n),
                e("B", "D", (0, -1), &km, m),
                e("A", "C", (0, -1), &km, m),
                e("C", "D", (1, 0), &kn, -n),
            ],
            rays: vec![ray("A", (-1, -1)), ray("B", (-1, 1)), ray("C", (1, -1)), ray("D", (1, 1))],
        }
    }
}
