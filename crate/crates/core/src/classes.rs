//! Degree-two classes as divisor coefficient vectors and the intersection
//! numbers needed to pair them with compact curves and compact divisors.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::fan::{quad_relation, star_of_interior_ray, FanError, FanTriangulation};
use crate::lattice::{rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("class refers to unknown ray `{0}`")]
    UnknownRay(String),
    #[error("bundle class must be integral; coefficient of `{0}` is {1}")]
    NonIntegral(String, Rational),
    #[error("class has {got} coefficients but the fan has {expected} rays")]
    WrongLength { expected: usize, got: usize },
    #[error("triple intersection with `{0}` is outside the closed star of `{1}`")]
    NotInClosedStar(String, String),
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// `Σ c_i D_i` over the ray divisors, with no normal form imposed modulo the
/// linear relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohClass {
    coeffs: Vec<Rational>,
}

impl CohClass {
    pub fn zero(fan: &FanTriangulation) -> Self {
        CohClass {
            coeffs: vec![Rational::zero(); fan.rays.len()],
        }
    }

    pub fn from_coeffs(fan: &FanTriangulation, coeffs: Vec<Rational>) -> Result<Self, ClassError> {
        if coeffs.len() != fan.rays.len() {
            return Err(ClassError::WrongLength {
                expected: fan.rays.len(),
                got: coeffs.len(),
            });
        }
        Ok(CohClass { coeffs })
    }

    /// Missing rays get coefficient zero.
    pub fn from_map(fan: &FanTriangulation, map: &BTreeMap<String, Rational>) -> Result<Self, ClassError> {
        let mut cls = CohClass::zero(fan);
        for (id, c) in map {
            let i = fan.ray_index(id).ok_or_else(|| ClassError::UnknownRay(id.clone()))?;
            cls.coeffs[i] = c.clone();
        }
        Ok(cls)
    }

    /// Convenience for small literal classes: `[("u1", 1), ("u2", 2)]`.
    pub fn from_pairs(fan: &FanTriangulation, pairs: &[(&str, Rational)]) -> Result<Self, ClassError> {
        let map = pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        CohClass::from_map(fan, &map)
    }

    pub fn coeff(&self, ray: usize) -> &Rational {
        &self.coeffs[ray]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Errors unless every coefficient is an integer.
    pub fn require_integral(&self, fan: &FanTriangulation) -> Result<(), ClassError> {
        match self.coeffs.iter().position(|c| !c.is_integer()) {
            Some(i) => Err(ClassError::NonIntegral(fan.ray_id(i).to_string(), self.coeffs[i].clone())),
            None => Ok(()),
        }
    }

    pub fn add(&self, other: &CohClass) -> CohClass {
        CohClass {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> CohClass {
        CohClass {
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }
}

/// Degree of the class on the compact curve dual to internal edge `edge`.
pub fn curve_degree(fan: &FanTriangulation, cls: &CohClass, edge: usize) -> Result<Rational, FanError> {
    let q = quad_relation(fan, edge)?;
    Ok(cls.coeff(q.apex1) + cls.coeff(q.apex2) + rat(q.y1) * cls.coeff(q.edge1) + rat(q.y2) * cls.coeff(q.edge2))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KaehlerReport {
    pub ok: bool,
    /// Internal edges with non-positive degree.
    pub violations: Vec<usize>,
}

pub fn kaehler_cone_check(fan: &FanTriangulation, omega: &CohClass) -> Result<KaehlerReport, FanError> {
    let mut violations = Vec::new();
    for e in 0..fan.internal_edges.len() {
        if curve_degree(fan, omega, e)? <= Rational::zero() {
            violations.push(e);
        }
    }
    Ok(KaehlerReport {
        ok: violations.is_empty(),
        violations,
    })
}

/// `A·B·E` for `A`, `B` in the closed star of the interior ray `e`.
pub fn restricted_triple(fan: &FanTriangulation, e: usize, a: usize, b: usize) -> Result<i64, ClassError> {
    let star = star_of_interior_ray(fan, e)?;
    let m = star.len();
    let slot = |r: usize| -> Result<Option<usize>, ClassError> {
        if r == e {
            return Ok(None);
        }
        star.neighbors
            .iter()
            .position(|&n| n == r)
            .map(Some)
            .ok_or_else(|| ClassError::NotInClosedStar(fan.ray_id(r).to_string(), fan.ray_id(e).to_string()))
    };
    // (a_j, b_j): coefficients of u_j and u_E in the relation at spoke j.
    let spoke = |j: usize| -> Result<(i64, i64), ClassError> {
        let q = quad_relation(fan, star.spokes[j])?;
        Ok((q.coefficient(star.neighbors[j]), q.coefficient(e)))
    };
    match (slot(a)?, slot(b)?) {
        (None, None) => {
            let mut sum = 0;
            for j in 0..m {
                sum += spoke(j)?.1;
            }
            Ok(-sum)
        }
        (Some(j), None) | (None, Some(j)) => Ok(spoke(j)?.1),
        (Some(j), Some(k)) if j == k => Ok(spoke(j)?.0),
        (Some(j), Some(k)) => {
            let adjacent = (j + 1) % m == k || (k + 1) % m == j;
            Ok(i64::from(adjacent))
        }
    }
}

/// `([ω] ∪ [F]) · E` via the spoke degrees: `Σ_j t_j (f_j − f_E)`.
pub fn cup_on_divisor(
    fan: &FanTriangulation,
    omega: &CohClass,
    f: &CohClass,
    e: usize,
) -> Result<Rational, ClassError> {
    let star = star_of_interior_ray(fan, e)?;
    let f_e = f.coeff(e);
    let mut total = Rational::zero();
    for (j, &n) in star.neighbors.iter().enumerate() {
        let t = curve_degree(fan, omega, star.spokes[j])?;
        total += t * (f.coeff(n) - f_e);
    }
    Ok(total)
}

/// The same pairing expanded through restricted triple intersections:
/// `w_E f_E E³ + Σ (w_j f_E + w_E f_j) A_j E² + Σ w_j f_k A_j A_k E`.
pub fn cup_on_divisor_expanded(
    fan: &FanTriangulation,
    omega: &CohClass,
    f: &CohClass,
    e: usize,
) -> Result<Rational, ClassError> {
    let star = star_of_interior_ray(fan, e)?;
    let (w_e, f_e) = (omega.coeff(e), f.coeff(e));
    let mut total = w_e * f_e * rat(restricted_triple(fan, e, e, e)?);
    for &a in &star.neighbors {
        total += (omega.coeff(a) * f_e + w_e * f.coeff(a)) * rat(restricted_triple(fan, e, a, e)?);
        for &b in &star.neighbors {
            total += omega.coeff(a) * f.coeff(b) * rat(restricted_triple(fan, e, a, b)?);
        }
    }
    Ok(total)
}

/// The three linear relations `Σ ⟨m, u_i⟩ D_i ~ 0`, one per coordinate of
/// the height-one lifts.
pub fn relation_classes(fan: &FanTriangulation) -> [CohClass; 3] {
    let coords = |f: &dyn Fn(usize) -> i64| CohClass {
        coeffs: (0..fan.rays.len()).map(|i| rat(f(i))).collect(),
    };
    [
        coords(&|i| fan.u(i).x),
        coords(&|i| fan.u(i).y),
        coords(&|_| 1),
    ]
}
