//! JSON and human renderings of engine reports. All numbers are exact:
//! integers, or {num, den} pairs for rationals, never floats.

use serde_json::{json, Value};

use folcalc_core::birational::DiscrepancyRecord;
use folcalc_core::families::{FiberCompareReport, Obstruction};
use folcalc_core::singularity::{
    CertificateStep, NonLcCertificate, Rank1Status, Rank1Verdict, SurfaceClass, SurfaceReport,
};

pub fn discrepancy_json(rec: &DiscrepancyRecord, step: Option<usize>) -> Value {
    let mut v = json!({
        "op": "discrepancy",
        "a_F": rec.a_f,
        "epsilon": rec.epsilon,
        "content": rec.content.to_string(),
        "pullback": rec.saturated_pullback.to_string(),
        "lc": rec.satisfies_lc(),
    });
    if let Some(s) = step {
        v["step"] = json!(s);
    }
    v
}

pub fn discrepancy_human(rec: &DiscrepancyRecord, step: Option<usize>) -> String {
    let prefix = step.map(|s| format!("step {s}: ")).unwrap_or_default();
    format!(
        "{prefix}a(E) = {}, eps(E) = {}, content {}, saturated pullback {}{}",
        rec.a_f,
        rec.epsilon,
        rec.content.to_string_bare(),
        rec.saturated_pullback,
        if rec.satisfies_lc() {
            ""
        } else {
            "  [violates lc]"
        }
    )
}

fn status_str(s: Rank1Status) -> &'static str {
    match s {
        Rank1Status::RegularCanonical => "regular_canonical",
        Rank1Status::LcMultiplicative => "lc_multiplicative",
        Rank1Status::NotLc => "not_lc",
    }
}

pub fn verdict_json(v: &Rank1Verdict, point: &[i64]) -> Value {
    json!({
        "op": "lc-check",
        "point": point,
        "status": status_str(v.status),
        "linear_part": v.linear_part.as_ref().map(|m| {
            (0..m.rows)
                .map(|i| (0..m.cols).map(|j| m.get(i, j)).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        }),
        "multiplicative_at_point": v.multiplicative_at_point,
    })
}

pub fn verdict_human(v: &Rank1Verdict, point: &[i64]) -> String {
    let mut out = format!(
        "status at {:?}: {}{}",
        point,
        status_str(v.status),
        if v.multiplicative_at_point {
            " (multiplicative there)"
        } else {
            ""
        }
    );
    if let Some(m) = &v.linear_part {
        let rows: Vec<String> = (0..m.rows)
            .map(|i| {
                (0..m.cols)
                    .map(|j| m.get(i, j).to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        out = format!("{out}\nlinear part: [{}]", rows.join("; "));
    }
    out
}

pub fn certificate_json(cert: &NonLcCertificate) -> Value {
    let steps: Vec<Value> = cert
        .steps
        .iter()
        .map(|s| match s {
            CertificateStep::Coordinates { images } => json!({
                "kind": "coordinates",
                "images": images.iter().map(|f| f.to_string_bare()).collect::<Vec<_>>(),
            }),
            CertificateStep::Blowup { chart } => json!({
                "kind": "blowup",
                "chart": chart.to_string(),
            }),
        })
        .collect();
    json!({
        "op": "nonlc-cert",
        "steps": steps,
        "record": discrepancy_json(&cert.record, None),
        "final_vanishing_order": cert.final_vanishing_order,
    })
}

pub fn certificate_human(cert: &NonLcCertificate) -> String {
    let mut lines = vec!["non-lc certificate:".to_string()];
    for (i, s) in cert.steps.iter().enumerate() {
        match s {
            CertificateStep::Coordinates { images } => lines.push(format!(
                "  {}. coordinates: {}",
                i + 1,
                images
                    .iter()
                    .map(|f| f.to_string_bare())
                    .collect::<Vec<_>>()
                    .join(", ")
            )),
            CertificateStep::Blowup { chart } => {
                lines.push(format!("  {}. blow up: {}", i + 1, chart))
            }
        }
    }
    lines.push(format!(
        "  witness divisor: {}",
        discrepancy_human(&cert.record, None)
    ));
    lines.join("\n")
}

pub fn surface_json(report: &SurfaceReport) -> Value {
    json!({
        "class": match report.class {
            SurfaceClass::Regular => "regular",
            SurfaceClass::StrictlyLc => "strictly_lc",
            SurfaceClass::NotLc => "not_lc",
        },
        "matrix": report.matrix.as_ref().map(|m| {
            (0..m.rows)
                .map(|i| (0..m.cols).map(|j| m.get(i, j)).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        }),
        "generator": report.generator.to_string(),
        "rank1_status": status_str(report.rank1_status),
        "agrees": report.agrees,
    })
}

pub fn surface_human(report: &SurfaceReport) -> String {
    format!(
        "surface verdict: {:?} (rank-1 route: {}, agreement: {})",
        report.class,
        status_str(report.rank1_status),
        report.agrees
    )
}

pub fn compare_json(report: &FiberCompareReport) -> Value {
    json!({
        "op": "family-fiber",
        "base_value": report.base_value,
        "degree": report.degree_bound,
        "equal": report.equal,
        "fiber_kernel_dim": report.fiber_kernel_dim,
        "specialized_rank": report.specialized_family_rank,
        "lifts": report.lifts.iter()
            .map(|(g, l)| json!({"fiber": g.to_string(), "lift": l.to_string()}))
            .collect::<Vec<_>>(),
        "missing": report.missing.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    })
}

pub fn compare_human(report: &FiberCompareReport) -> String {
    let mut out = format!(
        "fiber t = {} at degree {}: specialized family constants {} the fiber constants \
         (fiber dim {}, specialized rank {})",
        report.base_value,
        report.degree_bound,
        if report.equal { "span" } else { "do NOT span" },
        report.fiber_kernel_dim,
        report.specialized_family_rank,
    );
    if !report.missing.is_empty() {
        out = format!(
            "{out}\nunliftable fiber constants: {}",
            report
                .missing
                .iter()
                .map(|f| f.to_string_bare())
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    out
}

pub fn obstruction_json(o: &Obstruction) -> Value {
    match o {
        Obstruction::TriviallyLiftable { lift } => {
            json!({"kind": "trivially_liftable", "lift": lift.to_string()})
        }
        Obstruction::Proof {
            forcing,
            ideal_gens,
        } => json!({
            "kind": "proof",
            "forcing": forcing.to_string(),
            "ideal": ideal_gens.iter().map(|f| f.to_string_bare()).collect::<Vec<_>>(),
        }),
        Obstruction::Unknown { reason } => json!({"kind": "unknown", "reason": reason}),
    }
}

pub fn obstruction_human(o: &Obstruction) -> String {
    match o {
        Obstruction::TriviallyLiftable { lift } => {
            format!("obstruction: none, already a family constant ({lift})")
        }
        Obstruction::Proof {
            forcing,
            ideal_gens,
        } => format!(
            "obstruction: PROVED. A lift would force D(F) = {}, which lies outside the \
             monomial ideal ({})",
            forcing,
            ideal_gens
                .iter()
                .map(|f| f.to_string_bare())
                .collect::<Vec<_>>()
                .join(", ")
        ),
        Obstruction::Unknown { reason } => format!("obstruction: unknown ({reason})"),
    }
}

/// Schema of the JSON report lines, served by `--schema`.
pub fn schema() -> String {
    let schema = json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "folcalc report line",
        "description": "Each output line is one JSON object tagged by `op`. \
                        All numbers are exact integers; rationals appear as \
                        {num, den} string pairs; polynomials and derivations \
                        are canonical text forms.",
        "type": "object",
        "required": ["op"],
        "properties": {
            "op": {"enum": [
                "classify", "constants", "blowup", "discrepancy",
                "sequence-end", "lc-check", "nonlc-cert", "fedder", "ann",
                "quotient-class", "family-fiber", "corpus-summary"
            ]}
        },
        "oneOf": [
            {"properties": {"op": {"const": "classify"},
                "status": {"enum": ["additive", "p_closed", "not_p_closed"]},
                "multiplier": {"type": ["object", "null"],
                    "properties": {"num": {"type": "string"}, "den": {"type": "string"}}},
                "p_power": {"type": "string"}}},
            {"properties": {"op": {"const": "constants"},
                "degree": {"type": "integer"}, "dim": {"type": "integer"},
                "touches_boundary": {"type": "boolean"},
                "basis": {"type": "array", "items": {"type": "string"}},
                "toric_generators": {"type": "array", "items": {"type": "string"}}}},
            {"properties": {"op": {"const": "blowup"},
                "chart": {"type": "string"}, "pullback": {"type": "string"}}},
            {"properties": {"op": {"const": "discrepancy"},
                "a_F": {"type": "integer"}, "epsilon": {"enum": [0, 1]},
                "content": {"type": "string"}, "pullback": {"type": "string"},
                "lc": {"type": "boolean"}, "step": {"type": "integer"}}},
            {"properties": {"op": {"const": "lc-check"},
                "status": {"enum": ["regular_canonical", "lc_multiplicative", "not_lc"]},
                "linear_part": {"type": ["array", "null"]},
                "multiplicative_at_point": {"type": "boolean"}}},
            {"properties": {"op": {"const": "nonlc-cert"},
                "steps": {"type": "array"}, "record": {"type": "object"},
                "final_vanishing_order": {"type": "integer"}}},
            {"properties": {"op": {"const": "fedder"}, "f_pure": {"type": "boolean"}}},
            {"properties": {"op": {"const": "ann"},
                "generators": {"type": "array", "items": {"type": "string"}},
                "surface": {"type": "object"}}},
            {"properties": {"op": {"const": "quotient-class"},
                "guaranteed": {"enum": ["terminal", "canonical", "klt", "lc", "not_lc"]},
                "explain": {"type": "string"}}},
            {"properties": {"op": {"const": "family-fiber"},
                "equal": {"type": "boolean"},
                "lifts": {"type": "array"}, "missing": {"type": "array"},
                "obstruction": {"type": "object"}}},
            {"properties": {"op": {"const": "corpus-summary"},
                "cases": {"type": "integer"}, "passed": {"type": "boolean"}}}
        ]
    });
    serde_json::to_string_pretty(&schema).unwrap()
}
