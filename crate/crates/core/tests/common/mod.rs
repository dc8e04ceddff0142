#![allow(dead_code)]

use pqlift::classes::CohClass;
use pqlift::fan::{validate_fan, FanTriangulation, Ray};
use pqlift::lattice::{rat, ratio, Rational};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

/// Rectangle `[0,a]×[0,b]` of unit squares, each cut along a chosen
/// diagonal, then moved by an SL(2,ℤ) matrix `[p11, p12, p21, p22]`.
pub fn grid_fan(a: i64, b: i64, diagonals: &[bool], m: [i64; 4]) -> FanTriangulation {
    let id = |x: i64, y: i64| format!("r{x}_{y}");
    let mut rays = Vec::new();
    for x in 0..=a {
        for y in 0..=b {
            rays.push(Ray::new(id(x, y), m[0] * x + m[1] * y, m[2] * x + m[3] * y));
        }
    }
    let mut triangles = Vec::new();
    let mut k = 0;
    for x in 0..a {
        for y in 0..b {
            let (c00, c10, c01, c11) = (id(x, y), id(x + 1, y), id(x, y + 1), id(x + 1, y + 1));
            if diagonals[k % diagonals.len()] {
                triangles.push([c00.clone(), c10, c11.clone()]);
                triangles.push([c00, c11, c01]);
            } else {
                triangles.push([c00, c10.clone(), c01.clone()]);
                triangles.push([c10, c11, c01]);
            }
            k += 1;
        }
    }
    validate_fan(rays, &triangles).expect("grid triangulations are valid")
}

pub fn grid_fan_strategy() -> impl Strategy<Value = FanTriangulation> {
    let transforms = prop_oneof![
        Just([1, 0, 0, 1]),
        Just([1, 1, 0, 1]),
        Just([0, -1, 1, 0]),
        Just([2, 1, 1, 1]),
        Just([1, 0, -3, 1]),
    ];
    (2i64..5, 2i64..4, proptest::collection::vec(any::<bool>(), 12), transforms)
        .prop_map(|(a, b, d, m)| grid_fan(a, b, &d, m))
}

pub fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-24i64..25, 1i64..7).prop_map(|(n, d)| ratio(n, d))
}

pub fn class_strategy(fan: &FanTriangulation) -> impl Strategy<Value = CohClass> {
    let fan = fan.clone();
    proptest::collection::vec(rational_strategy(), fan.rays.len())
        .prop_map(move |c| CohClass::from_coeffs(&fan, c).expect("length matches"))
}

pub fn integral_class_strategy(fan: &FanTriangulation) -> impl Strategy<Value = CohClass> {
    let fan = fan.clone();
    proptest::collection::vec((-5i64..6).prop_map(rat), fan.rays.len())
        .prop_map(move |c| CohClass::from_coeffs(&fan, c).expect("length matches"))
}

pub fn random_rational(rng: &mut StdRng) -> Rational {
    ratio(rng.gen_range(-40..=40), rng.gen_range(1..=9))
}

pub fn random_positive(rng: &mut StdRng) -> Rational {
    ratio(rng.gen_range(1..=40), rng.gen_range(1..=9))
}

pub fn random_integer(rng: &mut StdRng) -> Rational {
    rat(rng.gen_range(-6..=6))
}

pub fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}
