//! The serialisable result of a run. Every number is an exact string.

use std::fmt::Write as _;

use serde::Serialize;

use crate::fan::FanTriangulation;
use crate::lattice::{LatticeVec2, RatVec2};
use crate::lift::{LiftedWeb, ResidualSite};

use super::input::Mode;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexReport {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub mu: [String; 2],
    pub lambda: [String; 2],
    pub nu3: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeReport {
    pub from: String,
    pub to: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    pub r: [String; 2],
    pub t: String,
    pub s: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RayReport {
    pub at: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    pub stabiliser: [String; 2],
    pub direction: [String; 2],
    pub direction3d: [String; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidualReport {
    pub site: String,
    pub kind: &'static str,
    pub cycle: Vec<String>,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftReport {
    pub mode: String,
    pub closed: bool,
    pub kaehler: bool,
    pub basepoint: String,
    pub vertices: Vec<VertexReport>,
    pub edges: Vec<EdgeReport>,
    pub rays: Vec<RayReport>,
    pub residuals: Vec<ResidualReport>,
    pub warnings: Vec<String>,
}

fn lat(v: LatticeVec2) -> [String; 2] {
    [v.x.to_string(), v.y.to_string()]
}

fn rat(v: &RatVec2) -> [String; 2] {
    [v.x.to_string(), v.y.to_string()]
}

impl LiftReport {
    pub fn new(mode: Mode, lifted: &LiftedWeb, fan: Option<&FanTriangulation>, mut warnings: Vec<String>) -> Self {
        let web = &lifted.base;
        let name = |v: usize| web.vertices[v].id.clone();
        let vertices = web
            .vertices
            .iter()
            .enumerate()
            .map(|(v, vertex)| VertexReport {
                id: vertex.id.clone(),
                label: vertex.label.clone(),
                mu: rat(&vertex.mu),
                lambda: rat(&lifted.lambda[v]),
                nu3: lifted.nu3[v].to_string(),
            })
            .collect();
        let curve_name = |x: usize, y: usize| fan.map(|f| format!("{}–{}", f.ray_id(x), f.ray_id(y)));
        let edges = web
            .edges
            .iter()
            .map(|e| EdgeReport {
                from: name(e.from),
                to: name(e.to),
                curve: match e.source {
                    crate::web::EdgeSource::Fan(i) => fan.and_then(|f| {
                        let (x, y) = f.internal_edges[i].rays;
                        curve_name(x, y)
                    }),
                    crate::web::EdgeSource::User => None,
                },
                r: lat(e.stabiliser),
                t: e.t.to_string(),
                s: e.s.as_ref().map(ToString::to_string).unwrap_or_default(),
            })
            .collect();
        let rays = web
            .rays
            .iter()
            .zip(&lifted.rays3d)
            .enumerate()
            .map(|(i, (ray, d3))| RayReport {
                at: name(ray.at),
                curve: fan.and_then(|f| {
                    let (x, y) = f.boundary_edges[i].rays;
                    curve_name(x, y)
                }),
                stabiliser: lat(ray.stabiliser),
                direction: lat(ray.direction),
                direction3d: [d3[0].to_string(), d3[1].to_string(), d3[2].to_string()],
            })
            .collect();
        let residuals = lifted
            .residuals
            .iter()
            .map(|r| ResidualReport {
                site: r.name.clone(),
                kind: match r.site {
                    ResidualSite::InteriorRay(_) => "interior_ray",
                    ResidualSite::Cycle(_) => "cycle",
                },
                cycle: r.vertices.iter().map(|&v| name(v)).collect(),
                value: r.value.to_string(),
                pairing: r.pairing.as_ref().map(ToString::to_string),
            })
            .collect();
        warnings.extend(web.warnings.iter().cloned());
        LiftReport {
            mode: mode.to_string(),
            closed: lifted.closed,
            kaehler: web.is_kaehler(),
            basepoint: name(web.basepoint),
            vertices,
            edges,
            rays,
            residuals,
            warnings,
        }
    }

    /// Short human-readable verdict.
    pub fn summary(&self) -> String {
        let yes_no = |b: bool| if b { "yes" } else { "no" };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}: {} vertices, {} compact edges, {} rays",
            self.mode,
            self.vertices.len(),
            self.edges.len(),
            self.rays.len()
        );
        let _ = writeln!(out, "kaehler: {}", yes_no(self.kaehler));
        let _ = writeln!(out, "closed: {}", yes_no(self.closed));
        for r in &self.residuals {
            let _ = writeln!(out, "residual {}: {}", r.site, r.value);
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}
