//! Height-one lattice fans given by a unimodular triangulation of a polygon.
//!
//! Every ray `u` is stored by its planar offset; the fan ray itself is the
//! lift `(u, 1)`. Triangles are canonicalised to anticlockwise order when the
//! fan is validated and every sign convention downstream depends on that.

use std::collections::{BTreeMap, HashMap, VecDeque};

use thiserror::Error;

use crate::lattice::{det2, is_anticlockwise, LatticeVec2, COORD_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("fan has no rays or no triangles")]
    Empty,
    #[error("duplicate ray id `{0}`")]
    DuplicateRayId(String),
    #[error("rays `{0}` and `{1}` have the same coordinates {2}")]
    DuplicateRayCoords(String, String, LatticeVec2),
    #[error("ray `{0}` has a coordinate outside ±{COORD_LIMIT}")]
    CoordinateTooLarge(String),
    #[error("triangle {index} refers to unknown ray `{id}`")]
    UnknownRay { index: usize, id: String },
    #[error("triangle {index} repeats ray `{id}`")]
    RepeatedRay { index: usize, id: String },
    #[error("triangle {index} ({ids}) is degenerate (collinear rays)")]
    DegenerateTriangle { index: usize, ids: String },
    #[error("triangle {index} ({ids}) is not unimodular: determinant {det}")]
    NonUnimodular { index: usize, ids: String, det: i64 },
    #[error("edge `{0}`–`{1}` is shared by {2} triangles")]
    EdgeOvershared(String, String, usize),
    #[error("edge `{0}`–`{1}` is traversed in the same direction by two triangles")]
    InconsistentOrientation(String, String),
    #[error("ray `{ray}` lies inside edge `{a}`–`{b}` (T-junction)")]
    TJunction { ray: String, a: String, b: String },
    #[error("ray `{0}` is not used by any triangle")]
    UnusedRay(String),
    #[error("triangles around ray `{0}` do not form a single fan (non-manifold vertex)")]
    NonManifoldVertex(String),
    #[error("dual graph of the triangulation is disconnected")]
    Disconnected,
    #[error("ray `{0}` is not an interior ray")]
    NotInterior(String),
    #[error("internal consistency: quadrilateral relation at edge `{0}`–`{1}` has no integral solution")]
    QuadInconsistent(String, String),
}

impl FanError {
    pub fn is_internal(&self) -> bool {
        matches!(self, FanError::QuadInconsistent(..))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ray {
    pub id: String,
    pub u: LatticeVec2,
}

impl Ray {
    pub fn new(id: impl Into<String>, x: i64, y: i64) -> Self {
        Ray {
            id: id.into(),
            u: LatticeVec2::new(x, y),
        }
    }
}

/// Ray indices in anticlockwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub rays: [usize; 3],
}

impl Triangle {
    /// Directed edges of the anticlockwise boundary cycle.
    pub fn cycle_edges(&self) -> [(usize, usize); 3] {
        let [a, b, c] = self.rays;
        [(a, b), (b, c), (c, a)]
    }

    pub fn apex(&self, x: usize, y: usize) -> usize {
        self.rays
            .iter()
            .copied()
            .find(|&r| r != x && r != y)
            .expect("edge of a triangle leaves one apex")
    }
}

/// An edge shared by two triangles; `rays` is the direction in which the
/// first triangle's anticlockwise cycle traverses it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InternalEdge {
    pub rays: (usize, usize),
    pub triangles: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub rays: (usize, usize),
    pub triangle: usize,
}

/// `u_apex1 + u_apex2 + y1·u_edge1 + y2·u_edge2 = 0` on height-one lifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadRelation {
    pub apex1: usize,
    pub apex2: usize,
    pub edge1: usize,
    pub edge2: usize,
    pub y1: i64,
    pub y2: i64,
}

/// Rays around an interior ray in anticlockwise order. `triangles[j]` is the
/// cone on `(center, neighbors[j], neighbors[j+1])` and `spokes[j]` the
/// internal edge `(center, neighbors[j])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub center: usize,
    pub neighbors: Vec<usize>,
    pub triangles: Vec<usize>,
    pub spokes: Vec<usize>,
}

impl Star {
    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanTriangulation {
    pub rays: Vec<Ray>,
    pub triangles: Vec<Triangle>,
    pub internal_edges: Vec<InternalEdge>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub interior_rays: Vec<usize>,
    pub warnings: Vec<String>,
    index: HashMap<String, usize>,
    stars: BTreeMap<usize, Star>,
}

impl FanTriangulation {
    pub fn ray_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn ray_id(&self, i: usize) -> &str {
        &self.rays[i].id
    }

    pub fn u(&self, i: usize) -> LatticeVec2 {
        self.rays[i].u
    }

    pub fn is_interior(&self, ray: usize) -> bool {
        self.stars.contains_key(&ray)
    }

    pub fn triangle_ids(&self, t: usize) -> [String; 3] {
        self.triangles[t].rays.map(|r| self.rays[r].id.clone())
    }

    pub fn internal_edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.internal_edges.iter().position(|e| {
            let (x, y) = e.rays;
            (x, y) == (a, b) || (x, y) == (b, a)
        })
    }

    /// Looks up an internal edge by ray ids.
    pub fn internal_edge(&self, a: &str, b: &str) -> Option<usize> {
        self.internal_edge_between(self.ray_index(a)?, self.ray_index(b)?)
    }

    /// Stars of all interior rays, ordered by ray index.
    pub fn stars(&self) -> impl Iterator<Item = &Star> {
        self.stars.values()
    }

    /// Triangle ids as given to [`validate_fan`], for re-validation.
    pub fn raw_triangles(&self) -> Vec<[String; 3]> {
        (0..self.triangles.len()).map(|t| self.triangle_ids(t)).collect()
    }
}

fn joined(ids: &[&str]) -> String {
    ids.join(",")
}

pub fn validate_fan(rays: Vec<Ray>, triangles: &[[String; 3]]) -> Result<FanTriangulation, FanError> {
    if rays.is_empty() || triangles.is_empty() {
        return Err(FanError::Empty);
    }
    let mut index = HashMap::new();
    let mut by_coords: HashMap<LatticeVec2, usize> = HashMap::new();
    for (i, ray) in rays.iter().enumerate() {
        if ray.u.x.abs() > COORD_LIMIT || ray.u.y.abs() > COORD_LIMIT {
            return Err(FanError::CoordinateTooLarge(ray.id.clone()));
        }
        if index.insert(ray.id.clone(), i).is_some() {
            return Err(FanError::DuplicateRayId(ray.id.clone()));
        }
        if let Some(&j) = by_coords.get(&ray.u) {
            return Err(FanError::DuplicateRayCoords(rays[j].id.clone(), ray.id.clone(), ray.u));
        }
        by_coords.insert(ray.u, i);
    }

    let mut tris = Vec::with_capacity(triangles.len());
    for (t, ids) in triangles.iter().enumerate() {
        let mut idx = [0usize; 3];
        for (k, id) in ids.iter().enumerate() {
            idx[k] = *index.get(id).ok_or_else(|| FanError::UnknownRay {
                index: t,
                id: id.clone(),
            })?;
            if idx[..k].contains(&idx[k]) {
                return Err(FanError::RepeatedRay { index: t, id: id.clone() });
            }
        }
        let [a, b, c] = idx.map(|i| rays[i].u);
        let names = joined(&[&ids[0], &ids[1], &ids[2]]);
        let anticlockwise = is_anticlockwise(a, b, c)
            .map_err(|_| FanError::DegenerateTriangle { index: t, ids: names.clone() })?;
        let det = det2(b - a, c - a);
        if det.abs() != 1 {
            return Err(FanError::NonUnimodular { index: t, ids: names, det });
        }
        if !anticlockwise {
            idx.swap(1, 2);
        }
        tris.push(Triangle { rays: idx });
    }

    // Directed edge -> triangle. An edge-to-edge orientable triangulation
    // uses each directed edge at most once.
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut undirected_count: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, tri) in tris.iter().enumerate() {
        for (x, y) in tri.cycle_edges() {
            let key = (x.min(y), x.max(y));
            let count = undirected_count.entry(key).or_insert(0);
            *count += 1;
            if *count > 2 {
                return Err(FanError::EdgeOvershared(rays[x].id.clone(), rays[y].id.clone(), *count));
            }
            if directed.insert((x, y), t).is_some() {
                return Err(FanError::InconsistentOrientation(rays[x].id.clone(), rays[y].id.clone()));
            }
            if *count == 1 {
                order.push((x, y));
            }
        }
    }

    let mut internal_edges = Vec::new();
    let mut boundary_edges = Vec::new();
    for &(x, y) in &order {
        let first = directed[&(x, y)];
        match directed.get(&(y, x)) {
            Some(&second) => internal_edges.push(InternalEdge { rays: (x, y), triangles: (first, second) }),
            None => boundary_edges.push(BoundaryEdge { rays: (x, y), triangle: first }),
        }
    }

    // No ray may sit in the relative interior of an edge.
    for &(x, y) in &order {
        let (a, b) = (rays[x].u, rays[y].u);
        for (r, ray) in rays.iter().enumerate() {
            if r == x || r == y {
                continue;
            }
            let p = ray.u;
            if det2(b - a, p - a) == 0 {
                let along = (p - a).dot(b - a);
                if along > 0 && along < (b - a).dot(b - a) {
                    return Err(FanError::TJunction {
                        ray: ray.id.clone(),
                        a: rays[x].id.clone(),
                        b: rays[y].id.clone(),
                    });
                }
            }
        }
    }

    // Dual connectivity.
    let mut adjacency = vec![Vec::new(); tris.len()];
    for e in &internal_edges {
        adjacency[e.triangles.0].push(e.triangles.1);
        adjacency[e.triangles.1].push(e.triangles.0);
    }
    let mut seen = vec![false; tris.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(t) = queue.pop_front() {
        for &n in &adjacency[t] {
            if !seen[n] {
                seen[n] = true;
                queue.push_back(n);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(FanError::Disconnected);
    }

    // Vertex links: a cycle marks an interior ray, a single path a boundary ray.
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); rays.len()];
    for (t, tri) in tris.iter().enumerate() {
        for &r in &tri.rays {
            incident[r].push(t);
        }
    }
    let mut stars = BTreeMap::new();
    let mut interior_rays = Vec::new();
    for (r, around) in incident.iter().enumerate() {
        if around.is_empty() {
            return Err(FanError::UnusedRay(rays[r].id.clone()));
        }
        // next[a] = (b, triangle) for each incident triangle rotated to (r, a, b).
        let mut next: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut has_pred: HashMap<usize, bool> = HashMap::new();
        for &t in around {
            let rot = rotate_to(&tris[t], r);
            next.insert(rot[1], (rot[2], t));
            has_pred.insert(rot[2], true);
        }
        let starts: Vec<usize> = next.keys().copied().filter(|a| !has_pred.contains_key(a)).collect();
        let start = match starts.len() {
            0 => rotate_to(&tris[around[0]], r)[1],
            1 => starts[0],
            _ => return Err(FanError::NonManifoldVertex(rays[r].id.clone())),
        };
        let mut neighbors = vec![start];
        let mut star_tris = Vec::new();
        let mut cur = start;
        while let Some(&(b, t)) = next.get(&cur) {
            star_tris.push(t);
            if b == start {
                break;
            }
            neighbors.push(b);
            cur = b;
            if star_tris.len() > around.len() {
                break;
            }
        }
        if star_tris.len() != around.len() {
            return Err(FanError::NonManifoldVertex(rays[r].id.clone()));
        }
        let closed = starts.is_empty();
        if closed {
            let spokes = neighbors
                .iter()
                .map(|&n| {
                    internal_edges
                        .iter()
                        .position(|e| e.rays == (r, n) || e.rays == (n, r))
                        .expect("spoke of a closed star is internal")
                })
                .collect();
            interior_rays.push(r);
            stars.insert(
                r,
                Star {
                    center: r,
                    neighbors,
                    triangles: star_tris,
                    spokes,
                },
            );
        }
    }

    let mut warnings = Vec::new();
    // Goodness: two consecutive boundary edges may not be collinear.
    let mut boundary_next: HashMap<usize, usize> = HashMap::new();
    for e in &boundary_edges {
        boundary_next.insert(e.rays.0, e.rays.1);
    }
    for e in &boundary_edges {
        let (x, y) = e.rays;
        if let Some(&z) = boundary_next.get(&y) {
            let (a, b, c) = (rays[x].u, rays[y].u, rays[z].u);
            if det2(b - a, c - b) == 0 {
                warnings.push(format!(
                    "boundary polygon is not good: ray `{}` lies inside a side of the polygon",
                    rays[y].id
                ));
            }
        }
    }
    for &e in &interior_rays {
        for &n in &stars[&e].neighbors {
            if stars.contains_key(&n) {
                warnings.push(format!(
                    "interior ray `{}` has interior neighbour `{}` (nested compact divisors)",
                    rays[e].id, rays[n].id
                ));
            }
        }
    }

    Ok(FanTriangulation {
        rays,
        triangles: tris,
        internal_edges,
        boundary_edges,
        interior_rays,
        warnings,
        index,
        stars,
    })
}

fn rotate_to(tri: &Triangle, r: usize) -> [usize; 3] {
    let [a, b, c] = tri.rays;
    if a == r {
        [a, b, c]
    } else if b == r {
        [b, c, a]
    } else {
        [c, a, b]
    }
}

/// Solves `u_apex1 + u_apex2 + y1·v1 + y2·v2 = 0` with `y1 + y2 = −2`.
pub fn quad_relation(fan: &FanTriangulation, edge: usize) -> Result<QuadRelation, FanError> {
    let e = fan.internal_edges[edge];
    let (v1, v2) = e.rays;
    let apex1 = fan.triangles[e.triangles.0].apex(v1, v2);
    let apex2 = fan.triangles[e.triangles.1].apex(v1, v2);
    let inconsistent = || FanError::QuadInconsistent(fan.rays[v1].id.clone(), fan.rays[v2].id.clone());

    // With y1 = −2 − y2: y2·(v2 − v1) = 2·v1 − u1 − u2.
    let step = fan.u(v2) - fan.u(v1);
    let rhs = 2 * fan.u(v1) - fan.u(apex1) - fan.u(apex2);
    let y2 = if step.x != 0 {
        if rhs.x % step.x != 0 {
            return Err(inconsistent());
        }
        rhs.x / step.x
    } else {
        if step.y == 0 || rhs.y % step.y != 0 {
            return Err(inconsistent());
        }
        rhs.y / step.y
    };
    if y2 * step != rhs {
        return Err(inconsistent());
    }
    Ok(QuadRelation {
        apex1,
        apex2,
        edge1: v1,
        edge2: v2,
        y1: -2 - y2,
        y2,
    })
}

impl QuadRelation {
    /// Coefficient carried by ray `r` in the relation (zero off the quadrilateral).
    pub fn coefficient(&self, r: usize) -> i64 {
        if r == self.edge1 {
            self.y1
        } else if r == self.edge2 {
            self.y2
        } else if r == self.apex1 || r == self.apex2 {
            1
        } else {
            0
        }
    }
}

pub fn star_of_interior_ray(fan: &FanTriangulation, ray: usize) -> Result<&Star, FanError> {
    fan.stars
        .get(&ray)
        .ok_or_else(|| FanError::NotInterior(fan.rays[ray].id.clone()))
}

/// Fixture fans used throughout the tests and documentation.
pub mod fixtures {
    use super::*;

    fn ids(t: [&str; 3]) -> [String; 3] {
        t.map(String::from)
    }

    /// Star triangulation of the hexagon around `E`.
    pub fn hexagon() -> (Vec<Ray>, Vec<[String; 3]>) {
        let rays = vec![
            Ray::new("u1", -1, -1),
            Ray::new("u2", 0, -1),
            Ray::new("u3", 1, 0),
            Ray::new("u4", 1, 1),
            Ray::new("u5", 0, 1),
            Ray::new("u6", -1, 0),
            Ray::new("E", 0, 0),
        ];
        let tris = (1..=6)
            .map(|j| {
                let a = format!("u{j}");
                let b = format!("u{}", j % 6 + 1);
                [String::from("E"), a, b]
            })
            .collect();
        (rays, tris)
    }

    /// Second resolution of the ℤ/3 quotient of the conifold.
    pub fn conifold_z3() -> (Vec<Ray>, Vec<[String; 3]>) {
        let rays = vec![
            Ray::new("u1", 0, 0),
            Ray::new("u2", 1, 0),
            Ray::new("u3", 0, 3),
            Ray::new("u4", -1, 3),
            Ray::new("v1", 0, 1),
            Ray::new("v2", 0, 2),
        ];
        let tris = vec![
            ids(["u1", "u2", "v1"]),
            ids(["u1", "v1", "u4"]),
            ids(["u2", "u4", "v1"]),
            ids(["u2", "u4", "v2"]),
            ids(["u2", "u3", "v2"]),
            ids(["u3", "u4", "v2"]),
        ];
        (rays, tris)
    }

    /// A single smooth cone: affine three-space.
    pub fn c3() -> (Vec<Ray>, Vec<[String; 3]>) {
        let rays = vec![Ray::new("a", 0, 0), Ray::new("b", 1, 0), Ray::new("c", 0, 1)];
        (rays, vec![ids(["a", "b", "c"])])
    }

    pub fn validated(data: (Vec<Ray>, Vec<[String; 3]>)) -> FanTriangulation {
        validate_fan(data.0, &data.1).expect("fixture fan is valid")
    }
}
