//! Acceptance criteria 1–7. Each test prints one PASS/FAIL line; all
//! comparisons are exact.

mod common;

use std::fmt::Display;
use std::process::Command;

use common::*;
use num_traits::Zero;
use pqlift::classes::{
    cup_on_divisor, cup_on_divisor_expanded, curve_degree, relation_classes, restricted_triple, ClassError, CohClass,
};
use pqlift::fan::fixtures::{conifold_z3, hexagon, validated};
use pqlift::fan::{quad_relation, validate_fan, FanError, FanTriangulation, Ray, Star};
use pqlift::io::{parse_input, run_pipeline, Payload};
use pqlift::lattice::{j2, rat, ratio, RatVec2, Rational};
use pqlift::lift::{build_lift, gauge_transform, Bundle, GaugeShift, LiftError, LiftedWeb};
use pqlift::web::{
    build_moment_web, fixtures::mmn, ingest_user_web, mu_holonomy_check, zero_tension_check, WebError, WebOptions,
};
use pqlift::Error;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRng, TestRunner};
use rand::rngs::StdRng;
use rand::SeedableRng;

struct Criterion {
    id: u32,
    title: &'static str,
    checks: usize,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Criterion {
            id,
            title,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures.push(label.into());
        }
    }

    fn eq<T: PartialEq + Display>(&mut self, label: impl Display, got: &T, want: &T) {
        self.check(format!("{label}: got {got}, expected {want}"), got == want);
    }

    fn finish(self) {
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {} [{}]: {verdict} ({} checks)", self.id, self.title, self.checks);
        for f in &self.failures {
            println!("    failed: {f}");
        }
        assert!(
            self.failures.is_empty(),
            "criterion {} failed {} of {} checks",
            self.id,
            self.failures.len(),
            self.checks
        );
    }
}

fn p(x: Rational, y: Rational) -> RatVec2 {
    RatVec2::new(x, y)
}

fn pi(x: i64, y: i64) -> RatVec2 {
    RatVec2::new(rat(x), rat(y))
}

fn scaled(k: &Rational, x: i64, y: i64) -> RatVec2 {
    RatVec2::new(k * rat(x), k * rat(y))
}

fn class(fan: &FanTriangulation, coeffs: &[i64]) -> CohClass {
    CohClass::from_coeffs(fan, coeffs.iter().map(|&c| rat(c)).collect()).unwrap()
}

fn permissive() -> WebOptions {
    WebOptions {
        allow_non_kaehler: true,
        ..Default::default()
    }
}

fn lift_fan(fan: &FanTriangulation, omega: &CohClass, f: &CohClass, basepoint: usize) -> LiftedWeb {
    let web = build_moment_web(fan, omega, basepoint, &permissive()).unwrap();
    build_lift(&web, Bundle::Fan { fan, omega, f }, RatVec2::zero(), rat(0)).unwrap()
}

#[test]
fn criterion_1_hexagon_golden() {
    let mut c = Criterion::new(1, "hexagon golden values");
    let fan = validated(hexagon());
    let omega = class(&fan, &[1, 2, 2, 1, 0, 0, 0]);
    let f = class(&fan, &[1, 1, -1, -1, 0, 0, 0]);
    let lifted = lift_fan(&fan, &omega, &f, 0);
    // q_j is the cone on (E, u_j, u_{j+1}), triangle j−1.
    let positions = [pi(0, 0), pi(1, 0), pi(1, 1), pi(0, 2), pi(-1, 2), pi(-1, 1)];
    for (j, want) in positions.iter().enumerate() {
        c.eq(format!("p{}", j + 1), &lifted.base.vertices[j].mu, want);
    }
    let lambdas = [pi(1, 0), pi(1, -1), pi(1, -1), pi(0, -1), pi(0, -2)];
    for (j, want) in lambdas.iter().enumerate() {
        c.eq(format!("λ(q{})", j + 2), &lifted.lambda[j + 1], want);
    }
    for (j, want) in [0, 0, 1, 1, 0, 0].into_iter().enumerate() {
        c.eq(format!("ν₃(q{})", j + 1), &lifted.nu3[j], &rat(want));
    }
    c.eq("residual(E)", &lifted.residuals[0].value, &rat(0));
    c.check("closed", lifted.closed);
    c.finish();
}

#[test]
fn criterion_2_hexagon_degree_formulas() {
    let mut c = Criterion::new(2, "hexagon curve degrees against t₁..t₆");
    let fan = validated(hexagon());
    let relations = relation_classes(&fan);
    let mut rng = StdRng::seed_from_u64(2);
    for trial in 0..32 {
        let w: Vec<Rational> = (0..4).map(|_| random_rational(&mut rng)).collect();
        let mut coeffs = w.clone();
        coeffs.extend([rat(0), rat(0), rat(0)]);
        // The engine sees the class shifted by a random relation.
        let mut omega = CohClass::from_coeffs(&fan, coeffs).unwrap();
        for rel in &relations {
            omega = omega.add(&rel.scale(&random_rational(&mut rng)));
        }
        let (w1, w2, w3, w4) = (&w[0], &w[1], &w[2], &w[3]);
        let formulas = [
            w2 - w1,
            w1 - w2 + w3,
            w2 - w3 + w4,
            w3 - w4,
            w4.clone(),
            w1.clone(),
        ];
        for (j, want) in formulas.iter().enumerate() {
            let edge = fan.internal_edge("E", &format!("u{}", j + 1)).unwrap();
            let got = curve_degree(&fan, &omega, edge).unwrap();
            c.eq(format!("trial {trial}: t{}", j + 1), &got, want);
        }
    }
    c.finish();
}

#[test]
fn criterion_3_mmn_golden() {
    let mut c = Criterion::new(3, "M_{m,n} in user-web mode");
    for (m, n, k) in [(1, 2, rat(1)), (2, 3, ratio(1, 6))] {
        let tag = format!("(m,n,k)=({m},{n},{k})");
        let web = ingest_user_web(&mmn(m, n, &k), None, &WebOptions::default()).unwrap();
        let lifted = build_lift(&web, Bundle::Web, RatVec2::zero(), rat(0)).unwrap();
        let (km, kn) = (&k * rat(m), &k * rat(n));
        let want = [
            ("A", rat(0), rat(0), rat(0)),
            ("B", rat(0), kn.clone(), rat(0)),
            ("C", km.clone(), rat(0), rat(0)),
            ("D", km.clone(), kn.clone(), -(&km * rat(n))),
        ];
        for (id, x, y, z) in want {
            let v = web.vertex_index(id).unwrap();
            c.eq(format!("{tag} μ({id})"), &lifted.base.vertices[v].mu, &p(x, y));
            c.eq(format!("{tag} ν₃({id})"), &lifted.nu3[v], &z);
        }
        let d = web.vertex_index("D").unwrap();
        c.eq(format!("{tag} λ(D)"), &lifted.lambda[d], &pi(-m, n));
        c.eq(format!("{tag} cycle count"), &lifted.residuals.len(), &1);
        for r in &lifted.residuals {
            c.eq(format!("{tag} residual {}", r.name), &r.value, &rat(0));
        }
        c.check(format!("{tag} closed"), lifted.closed);
    }
    let rejected = ingest_user_web(&mmn(1, 1, &rat(-1)), None, &WebOptions::default());
    c.check(
        "(m,n,k)=(1,1,-1) rejected by the t > 0 check",
        matches!(rejected, Err(WebError::NonKaehler(_))),
    );
    let spec = parse_input(&std::fs::read_to_string(fixture_path("mmn.json")).unwrap()).unwrap();
    let report = run_pipeline(&spec).unwrap();
    let d = report.vertices.iter().find(|v| v.id == "D").unwrap();
    c.eq("fixture file ν₃(D)", &d.nu3.as_str(), &"-2");
    c.finish();
}

#[test]
fn criterion_4_conifold_golden() {
    let mut c = Criterion::new(4, "conifold ℤ/3 symbolic checks");
    let fan = validated(conifold_z3());
    let tri = |ids: [&str; 3]| {
        let mut want: Vec<usize> = ids.iter().map(|id| fan.ray_index(id).unwrap()).collect();
        want.sort();
        (0..fan.triangles.len())
            .find(|&t| {
                let mut got = fan.triangles[t].rays.to_vec();
                got.sort();
                got == want
            })
            .unwrap()
    };
    let p1 = tri(["u2", "u4", "v1"]);
    let p2 = tri(["u2", "u4", "v2"]);
    let p3 = tri(["u1", "u2", "v1"]);
    let p6 = tri(["u2", "u3", "v2"]);
    let mut rng = StdRng::seed_from_u64(4);
    for trial in 0..10 {
        // Kähler: w₂ < 0, w₁ > −w₂, w₃ > −w₂.
        let a = random_positive(&mut rng);
        let w = [&a + random_positive(&mut rng), -a.clone(), &a + random_positive(&mut rng)];
        let f = if trial % 2 == 0 {
            let f2 = random_integer(&mut rng);
            [-f2.clone(), f2.clone(), -f2]
        } else {
            [random_integer(&mut rng), random_integer(&mut rng), random_integer(&mut rng)]
        };
        let pad = |x: &[Rational; 3]| {
            let mut v = x.to_vec();
            v.extend([rat(0), rat(0), rat(0)]);
            CohClass::from_coeffs(&fan, v).unwrap()
        };
        let (omega, fc) = (pad(&w), pad(&f));
        let web = build_moment_web(&fan, &omega, p1, &WebOptions::default()).unwrap();
        let lifted = build_lift(&web, Bundle::Fan { fan: &fan, omega: &omega, f: &fc }, RatVec2::zero(), rat(0)).unwrap();
        let mu = |t: usize| &lifted.base.vertices[t].mu;
        let tag = format!("trial {trial} w=({},{},{}) f=({},{},{})", w[0], w[1], w[2], f[0], f[1], f[2]);
        c.eq(format!("{tag}: p₂−p₁"), &(mu(p2) - mu(p1)), &scaled(&-w[1].clone(), 3, 2));
        c.eq(format!("{tag}: p₃−p₁"), &(mu(p3) - mu(p1)), &scaled(&-(&w[0] + &w[1]), 1, 1));
        c.eq(
            format!("{tag}: p₆−p₁"),
            &(mu(p6) - mu(p1)),
            &p(rat(2) * &w[2] - &w[1], &w[2] - &w[1]),
        );
        c.eq(format!("{tag}: λ(p₂)−λ(p₁)"), &(&lifted.lambda[p2] - &lifted.lambda[p1]), &scaled(&f[1], 3, 2));
        c.eq(
            format!("{tag}: ν₃(p₆)−ν₃(p₂)"),
            &(&lifted.nu3[p6] - &lifted.nu3[p2]),
            &(&f[1] * (&w[1] + &w[2])),
        );
        let residuals: Vec<Rational> = lifted.residuals.iter().map(|r| r.value.clone()).collect();
        let want = vec![(&f[0] + &f[1]) * (&w[0] + &w[1]), (&f[1] + &f[2]) * (&w[1] + &w[2])];
        c.check(
            format!("{tag}: residual pair {residuals:?} vs {want:?}"),
            residuals == want,
        );
        let condition = f[0] == -f[1].clone() && f[2] == f[0];
        c.check(format!("{tag}: closed iff f₁ = −f₂ = f₃"), lifted.closed == condition);
    }
    c.finish();
}

/// `ν₃` accumulated walking the star of `star.center` clockwise, computed
/// directly from the lifted `λ` values.
fn clockwise_walk(lifted: &LiftedWeb, star: &Star) -> Rational {
    let web = &lifted.base;
    let m = star.len();
    let mut total = Rational::zero();
    for j in 0..m {
        let (a, b) = (star.triangles[j], star.triangles[(j + m - 1) % m]);
        let edge = web
            .edges
            .iter()
            .find(|e| (e.from, e.to) == (a, b) || (e.from, e.to) == (b, a))
            .expect("consecutive star triangles share an edge");
        let r = if edge.from == a { edge.stabiliser } else { -edge.stabiliser };
        total += &edge.t * lifted.lambda[a].pair(r);
    }
    total
}

#[test]
fn criterion_5_three_way_closure() {
    let mut c = Criterion::new(5, "residual = Σ t_j(f_j − f_E) = ([ω]∪[F])·E");
    let mut rng = StdRng::seed_from_u64(5);
    let mut samples = 0;
    for (name, fan) in [("hexagon", validated(hexagon())), ("conifold", validated(conifold_z3()))] {
        for trial in 0..60 {
            let n = fan.rays.len();
            let omega = CohClass::from_coeffs(&fan, (0..n).map(|_| random_rational(&mut rng)).collect()).unwrap();
            let f = CohClass::from_coeffs(&fan, (0..n).map(|_| random_integer(&mut rng)).collect()).unwrap();
            let lifted = lift_fan(&fan, &omega, &f, 0);
            for star in fan.stars() {
                let walk = clockwise_walk(&lifted, star);
                let closed_form = cup_on_divisor(&fan, &omega, &f, star.center).unwrap();
                let expanded = cup_on_divisor_expanded(&fan, &omega, &f, star.center).unwrap();
                let tag = format!("{name} trial {trial} {}", fan.ray_id(star.center));
                c.eq(format!("{tag}: walk vs closed form"), &walk, &closed_form);
                c.eq(format!("{tag}: closed form vs expansion"), &closed_form, &expanded);
            }
            samples += 1;
        }
    }
    c.check(format!("{samples} samples ≥ 100"), samples >= 100);
    c.finish();
}

type Case = (FanTriangulation, CohClass, CohClass);

fn case_strategy() -> impl Strategy<Value = Case> {
    prop_oneof![
        1 => Just(validated(hexagon())),
        1 => Just(validated(conifold_z3())),
        3 => grid_fan_strategy(),
    ]
    .prop_flat_map(|fan| {
        let (w, f) = (class_strategy(&fan), integral_class_strategy(&fan));
        (Just(fan), w, f)
    })
}

fn property<S: Strategy>(
    c: &mut Criterion,
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) {
    let config = Config {
        cases: 48,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config.clone(), TestRng::deterministic_rng(config.rng_algorithm));
    let result = runner.run(&strategy, test);
    c.check(
        format!("{name}: {}", result.as_ref().err().map(ToString::to_string).unwrap_or_default()),
        result.is_ok(),
    );
}

#[test]
fn criterion_6_invariants() {
    let mut c = Criterion::new(6, "invariant suite");

    property(&mut c, "position holonomy", case_strategy(), |(fan, omega, _)| {
        for (_, residual) in mu_holonomy_check(&fan, &omega).unwrap() {
            prop_assert!(residual.is_zero());
        }
        Ok(())
    });

    property(&mut c, "λ holonomy", case_strategy(), |(fan, omega, f)| {
        let lifted = lift_fan(&fan, &omega, &f, 0);
        for edge in &lifted.base.edges {
            let s = edge.s.clone().unwrap();
            let want = &lifted.lambda[edge.from] - &RatVec2::scaled_lattice(&s, j2(edge.stabiliser));
            prop_assert_eq!(&lifted.lambda[edge.to], &want);
        }
        Ok(())
    });

    property(&mut c, "zero tension", case_strategy(), |(fan, omega, _)| {
        let web = build_moment_web(&fan, &omega, 0, &permissive()).unwrap();
        prop_assert!(zero_tension_check(&web).is_empty());
        for v in 0..web.vertices.len() {
            prop_assert_eq!(web.outgoing_directions(v).len(), 3);
        }
        Ok(())
    });

    property(&mut c, "endpoint symmetry", case_strategy(), |(fan, omega, f)| {
        let lifted = lift_fan(&fan, &omega, &f, 0);
        for edge in &lifted.base.edges {
            prop_assert_eq!(
                &edge.t * lifted.lambda[edge.from].pair(edge.stabiliser),
                &edge.t * lifted.lambda[edge.to].pair(edge.stabiliser)
            );
        }
        Ok(())
    });

    let gauge = (case_strategy(), rational_strategy(), rational_strategy());
    property(&mut c, "gauge covariance", gauge, |((fan, omega, f), a, b)| {
        let web = build_moment_web(&fan, &omega, 0, &permissive()).unwrap();
        let bundle = Bundle::Fan {
            fan: &fan,
            omega: &omega,
            f: &f,
        };
        let lambda0 = RatVec2::new(a, b);
        let plain = build_lift(&web, bundle, RatVec2::zero(), rat(0)).unwrap();
        let rebased = build_lift(&web, bundle, lambda0.clone(), rat(0)).unwrap();
        let shifted = gauge_transform(&plain, &GaugeShift { lambda0 });
        prop_assert_eq!(&shifted.lambda, &rebased.lambda);
        prop_assert_eq!(&shifted.nu3, &rebased.nu3);
        prop_assert_eq!(&shifted.residuals, &plain.residuals);
        prop_assert_eq!(&rebased.residuals, &plain.residuals);
        prop_assert_eq!(shifted.closed, plain.closed);
        prop_assert_eq!(&shifted.base, &plain.base);
        Ok(())
    });

    property(&mut c, "d_j identity", case_strategy(), |(fan, omega, f)| {
        let lifted = lift_fan(&fan, &omega, &f, 0);
        for star in fan.stars() {
            let m = star.len();
            let e = star.center;
            let d = |j: usize| {
                let (a, b) = (star.neighbors[j], star.neighbors[(j + 1) % m]);
                let (uj, uk, ue) = (fan.u(a), fan.u(b), fan.u(e));
                let x = RatVec2::scaled_lattice(f.coeff(e), uj - uk);
                let y = RatVec2::scaled_lattice(f.coeff(a), uk - ue);
                let z = RatVec2::scaled_lattice(f.coeff(b), uj - ue);
                &(&x + &y) - &z
            };
            for j in 1..m {
                let dj = &d(j) - &d(0);
                let want = RatVec2::new(-dj.y.clone(), dj.x.clone());
                prop_assert_eq!(&lifted.lambda[star.triangles[j]] - &lifted.lambda[star.triangles[0]], want);
            }
        }
        Ok(())
    });

    c.finish();
}

fn pqlift(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_pqlift"))
        .args(args)
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exit code")
}

#[test]
fn criterion_7_validation() {
    let mut c = Criterion::new(7, "validation suite");

    let rays = vec![Ray::new("a", 0, 0), Ray::new("b", 2, 0), Ray::new("c", 0, 1)];
    let err = validate_fan(rays, &[["a".into(), "b".into(), "c".into()]]).unwrap_err();
    c.check(
        format!("non-unimodular triangle reports its determinant: {err}"),
        matches!(err, FanError::NonUnimodular { det: 2, .. }) && err.to_string().contains("determinant 2"),
    );

    let fan = validated(hexagon());
    let e = fan.ray_index("E").unwrap();
    let b_sum: i64 = fan
        .stars()
        .next()
        .unwrap()
        .spokes
        .iter()
        .map(|&s| quad_relation(&fan, s).unwrap().coefficient(e))
        .sum();
    c.eq("hexagon −Σ b_j", &-b_sum, &6);
    c.eq("hexagon E³", &restricted_triple(&fan, e, e, e).unwrap(), &6);

    let hexagon_text = std::fs::read_to_string(fixture_path("hexagon.json")).unwrap();
    let float = parse_input(&hexagon_text.replace("\"u2\": \"2\"", "\"u2\": 1.5"));
    c.check(
        format!("float literal rejected: {float:?}"),
        matches!(&float, Err(e) if e.message.contains("\"3/2\"")),
    );

    let mut spec = parse_input(&hexagon_text).unwrap();
    let Payload::Fan { f, .. } = &mut spec.payload else { unreachable!() };
    f.insert("u1".into(), ratio(1, 2));
    let err = run_pipeline(&spec).unwrap_err();
    c.check(
        format!("non-integral F rejected in fan mode: {err}"),
        matches!(err, Error::Class(ClassError::NonIntegral(..))) && err.exit_code() == 1,
    );

    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path.to_string_lossy().into_owned()
    };
    let hex = fixture_path("hexagon.json");
    let open = write("open.json", &hexagon_text.replace("\"u3\": -1, \"u4\": -1", "\"u3\": 1, \"u4\": 1"));
    let bad_json = write("bad.json", "{\"mode\": ");
    let non_unimodular = write(
        "nonuni.json",
        r#"{"mode": "fan", "fan": {"rays": [{"id": "a", "u": [0, 0]}, {"id": "b", "u": [2, 0]}, {"id": "c", "u": [0, 1]}], "triangles": [["a", "b", "c"]]}, "omega": {}, "F": {}}"#,
    );
    c.eq("exit code: hexagon check", &pqlift(&["check", &hex]), &0);
    c.eq("exit code: closed with --require-closed", &pqlift(&["check", &hex, "--require-closed"]), &0);
    c.eq("exit code: open without --require-closed", &pqlift(&["check", &open]), &0);
    c.eq("exit code: open with --require-closed", &pqlift(&["lift", &open, "--require-closed"]), &2);
    c.eq("exit code: malformed JSON", &pqlift(&["check", &bad_json]), &1);
    c.eq("exit code: non-unimodular fan", &pqlift(&["check", &non_unimodular]), &1);
    c.eq("exit code: missing file", &pqlift(&["check", "/nonexistent/job.json"]), &1);
    let internal = [
        Error::Lift(LiftError::Internal("x".into())),
        Error::Web(WebError::Internal("x".into())),
        Error::Fan(FanError::QuadInconsistent("x".into(), "y".into())),
    ];
    for e in internal {
        c.eq(format!("exit code for internal failure `{e}`"), &e.exit_code(), &3);
    }
    c.finish();
}
