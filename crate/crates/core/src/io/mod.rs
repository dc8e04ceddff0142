//! Job files in, reports and drawings out.

pub mod emit;
pub mod input;
pub mod report;

use crate::classes::CohClass;
use crate::error::Error;
use crate::fan::validate_fan;
use crate::lattice::{RatVec2, Rational};
use crate::lift::{build_lift, Bundle, LiftedWeb};
use crate::web::{build_moment_web, ingest_user_web, WebOptions};

pub use emit::{emit_outputs, render_json, render_lines3d, render_svg, Targets};
pub use input::{parse_input, JobSpec, Mode, ParseError, Payload};
pub use report::LiftReport;

/// Runs the whole pipeline, keeping the lifted web alongside the report.
pub fn run_job(spec: &JobSpec) -> Result<(LiftedWeb, LiftReport), Error> {
    let b = &spec.basepoint;
    let opts = WebOptions {
        basepoint_mu: b.mu.clone(),
        allow_non_kaehler: spec.flags.allow_non_kaehler,
    };
    let lambda = b.lambda.clone().unwrap_or_else(RatVec2::zero);
    let nu3 = b.nu3.clone().unwrap_or_else(|| Rational::from_integer(0.into()));
    match &spec.payload {
        Payload::Fan { fan, omega, f } => {
            let fan = validate_fan(fan.rays.clone(), &fan.triangles)?;
            let omega = CohClass::from_map(&fan, omega)?;
            let f = CohClass::from_map(&fan, f)?;
            f.require_integral(&fan)?;
            let web = build_moment_web(&fan, &omega, b.triangle.unwrap_or(0), &opts)?;
            let lifted = build_lift(
                &web,
                Bundle::Fan {
                    fan: &fan,
                    omega: &omega,
                    f: &f,
                },
                lambda,
                nu3,
            )?;
            let report = LiftReport::new(Mode::Fan, &lifted, Some(&fan), fan.warnings.clone());
            Ok((lifted, report))
        }
        Payload::Web(user) => {
            let web = ingest_user_web(user, b.vertex.as_deref(), &opts)?;
            let lifted = build_lift(&web, Bundle::Web, lambda, nu3)?;
            let report = LiftReport::new(Mode::Web, &lifted, None, Vec::new());
            Ok((lifted, report))
        }
    }
}

pub fn run_pipeline(spec: &JobSpec) -> Result<LiftReport, Error> {
    run_job(spec).map(|(_, report)| report)
}
