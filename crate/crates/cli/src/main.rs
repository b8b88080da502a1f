//! folcalc: exact computations with derivations and 1-foliations on affine
//! space over F_p.
//!
//! Exit codes: 0 success; 1 negative mathematical verdict under --strict;
//! 2 usage or parse error; 3 internal limit (degree cap, step budget).

mod reports;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use folcalc_core::birational::{discrepancy_rank1, toric_blowup_sequence, Chart, SequenceEnd};
use folcalc_core::constants::{certify_generators, kernel_truncated, toric_constants};
use folcalc_core::corpus::{corpus_passed, run_corpus};
use folcalc_core::derivation::{Derivation, PClosure};
use folcalc_core::families::{
    fiber_vs_quotient_compare, noncommutativity_obstruction, FamilyDerivation, Obstruction,
};
use folcalc_core::ledger::{transfer_class_guaranteed, SingClass};
use folcalc_core::parse::{parse_derivation, parse_poly};
use folcalc_core::poly::Ring;
use folcalc_core::singularity::{
    ann_foliation, ann_surface_classify, classify_rank1, fedder_f_pure, find_nonlc_divisor,
    Rank1Status,
};
use folcalc_core::EngineError;

const DEGREE_CAP_ENV: &str = "FOLCALC_DEGREE_CAP";

#[derive(Parser)]
#[command(
    name = "folcalc",
    about = "Exact symbolic computations with derivations and 1-foliations over F_p",
    version
)]
struct Cli {
    /// Prime characteristic of the base field.
    #[arg(short = 'p', long, global = true)]
    prime: Option<u64>,

    /// Ring variables, comma separated (default x,y).
    #[arg(long, global = true, value_delimiter = ',')]
    vars: Option<Vec<String>>,

    /// Emit JSON report lines instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,

    /// Truncation degree for kernel computations (default 3p).
    #[arg(long, global = true)]
    degree: Option<i64>,

    /// Seed for randomized audits.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Exit with code 1 on negative mathematical verdicts.
    #[arg(long, global = true)]
    strict: bool,

    /// Print the JSON report schema and exit.
    #[arg(long, global = true)]
    schema: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct ChartArgs {
    /// Blow-up center: comma-separated variables.
    #[arg(long, value_delimiter = ',')]
    center: Vec<String>,

    /// Chart variable (must belong to the center).
    #[arg(long)]
    chart: String,

    /// Optional chart weights, var=k (repeatable). Replaces the standard
    /// weight 1 on the given center variable.
    #[arg(long)]
    weight: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a derivation: additive, p-closed (with multiplier) or not
    /// p-closed; optionally test multiplicativity at a point.
    Classify {
        derivation: String,
        /// Point to test multiplicativity at, e.g. 0,0.
        #[arg(long)]
        at: Option<String>,
    },
    /// Truncated ring of constants of one or more derivations; for a
    /// diagonal derivation the toric monoid generators are included.
    Constants {
        derivations: Vec<String>,
        /// Verify that the listed polynomials generate the constants up to
        /// the truncation degree (comma separated).
        #[arg(long, value_delimiter = ',')]
        certify: Option<Vec<String>>,
    },
    /// Pull a derivation back along a blow-up chart.
    Blowup {
        derivation: String,
        #[command(flatten)]
        chart: ChartArgs,
    },
    /// Discrepancy record of the exceptional divisor of a chart.
    Discrepancy {
        derivation: Option<String>,
        #[command(flatten)]
        chart: ChartArgs,
        /// Iterate the origin blow-up on diagonal weights a,b instead.
        #[arg(long)]
        iterate: Option<String>,
        #[arg(long, default_value_t = 32)]
        max_steps: usize,
    },
    /// Pointwise log-canonicity verdict for a rank-1 generator. With
    /// several generators, runs the sufficient-only higher-rank test
    /// (all multiplicative at the point, pairwise commuting).
    LcCheck {
        derivations: Vec<String>,
        /// Point, e.g. 0,0 (default: origin).
        #[arg(long)]
        at: Option<String>,
    },
    /// Constructive non-lc certificate: blow-up path to a divisor with
    /// a(E) < -eps(E).
    NonlcCert {
        derivation: String,
        #[arg(long)]
        at: Option<String>,
        #[arg(long, default_value_t = 16)]
        max_steps: usize,
    },
    /// Fedder F-purity test for a hypersurface at the origin.
    Fedder { poly: String },
    /// Annihilator foliation generators of a polynomial; with --classify,
    /// the two-variable surface verdict.
    Ann {
        poly: String,
        #[arg(long)]
        classify: bool,
    },
    /// Best singularity class of the quotient guaranteed by the transfer
    /// theorem.
    QuotientClass {
        #[arg(long)]
        x_class: String,
        #[arg(long)]
        f_class: String,
        /// Show the inequality derivation.
        #[arg(long)]
        explain: bool,
        /// Audit the whole transfer table with this many samples per cell
        /// over p in {2,3,5,7}, seeded by --seed.
        #[arg(long)]
        audit: Option<usize>,
    },
    /// Compare specialized family constants against fiber constants.
    FamilyFiber {
        derivation: String,
        /// Base variable name.
        #[arg(long)]
        base: String,
        /// Base value of the fiber.
        #[arg(long, default_value_t = 0)]
        at: i64,
        /// Fiber constant to test for non-liftability.
        #[arg(long)]
        obstruct: Option<String>,
    },
    /// Run the regression corpus.
    Corpus {
        /// Only run cases whose group/id contains this substring.
        #[arg(long)]
        filter: Option<String>,
    },
}

/// Failure modes mapped to exit codes.
enum CliFailure {
    Usage(String),
    Limit(String),
}

impl From<EngineError> for CliFailure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::DegreeCapExceeded { .. } | EngineError::MaxStepsExhausted { .. } => {
                CliFailure::Limit(e.to_string())
            }
            other => CliFailure::Usage(other.to_string()),
        }
    }
}

impl From<folcalc_core::parse::ParseError> for CliFailure {
    fn from(e: folcalc_core::parse::ParseError) -> Self {
        CliFailure::Usage(e.to_string())
    }
}

type CliResult = Result<Verdict, CliFailure>;

/// Whether the mathematical verdict was "positive"; negative verdicts exit
/// with code 1 under --strict.
enum Verdict {
    Positive,
    Negative(String),
}

struct Session {
    ring: Ring,
    json: bool,
    degree: i64,
}

impl Session {
    fn emit(&self, value: serde_json::Value, human: String) {
        if self.json {
            println!("{value}");
        } else {
            println!("{human}");
        }
    }
}

/// Expressions are read from the argument, or from stdin when it is `-`.
fn read_expr(text: &str) -> Result<String, CliFailure> {
    if text != "-" {
        return Ok(text.to_string());
    }
    let mut buf = String::new();
    std::io::Read::read_to_string(&mut std::io::stdin(), &mut buf)
        .map_err(|e| CliFailure::Usage(format!("cannot read stdin: {e}")))?;
    Ok(buf.trim().to_string())
}

fn build_ring(cli: &Cli) -> Result<Ring, CliFailure> {
    let p = cli
        .prime
        .ok_or_else(|| CliFailure::Usage("missing -p <prime>".into()))?;
    if !folcalc_core::field::is_prime(p) {
        return Err(CliFailure::Usage(format!("{p} is not prime")));
    }
    let vars: Vec<String> = cli
        .vars
        .clone()
        .unwrap_or_else(|| vec!["x".into(), "y".into()]);
    let var_refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    for v in &var_refs {
        if !folcalc_core::poly::valid_identifier(v) {
            return Err(CliFailure::Usage(format!("invalid variable name `{v}`")));
        }
    }
    // d<var> tokens are reserved for derivation syntax
    for v in &var_refs {
        if let Some(rest) = v.strip_prefix('d') {
            if var_refs.contains(&rest) {
                return Err(CliFailure::Usage(format!(
                    "variable `{v}` collides with the differential token of `{rest}`"
                )));
            }
        }
    }
    let mut ring = Ring::new(p, &var_refs);
    if let Ok(cap) = std::env::var(DEGREE_CAP_ENV) {
        let cap: i64 = cap
            .parse()
            .map_err(|_| CliFailure::Usage(format!("bad {DEGREE_CAP_ENV} value `{cap}`")))?;
        ring = ring.with_degree_cap(cap);
    }
    Ok(ring)
}

fn parse_point(text: Option<&str>, ring: &Ring) -> Result<Vec<i64>, CliFailure> {
    match text {
        None => Ok(vec![0; ring.nvars()]),
        Some(t) => {
            let coords: Result<Vec<i64>, _> =
                t.split(',').map(|c| c.trim().parse::<i64>()).collect();
            let coords =
                coords.map_err(|_| CliFailure::Usage(format!("bad point `{t}`")))?;
            if coords.len() != ring.nvars() {
                return Err(CliFailure::Usage(format!(
                    "point `{t}` has {} coordinates, ring has {}",
                    coords.len(),
                    ring.nvars()
                )));
            }
            Ok(coords)
        }
    }
}

fn build_chart(args: &ChartArgs, ring: &Ring) -> Result<Chart, CliFailure> {
    let mut center = Vec::new();
    for name in &args.center {
        let idx = ring
            .var_index(name)
            .ok_or_else(|| CliFailure::Usage(format!("unknown center variable `{name}`")))?;
        center.push(idx);
    }
    let chart_var = ring
        .var_index(&args.chart)
        .ok_or_else(|| CliFailure::Usage(format!("unknown chart variable `{}`", args.chart)))?;
    if args.weight.is_empty() {
        return Ok(Chart::blowup(ring, &center, chart_var)?);
    }
    let mut weights = vec![0i64; ring.nvars()];
    for &i in &center {
        if i != chart_var {
            weights[i] = 1;
        }
    }
    for spec in &args.weight {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| CliFailure::Usage(format!("bad weight `{spec}`, expected var=k")))?;
        let idx = ring
            .var_index(name.trim())
            .ok_or_else(|| CliFailure::Usage(format!("unknown weight variable `{name}`")))?;
        let value: i64 = value
            .trim()
            .parse()
            .map_err(|_| CliFailure::Usage(format!("bad weight value in `{spec}`")))?;
        weights[idx] = value;
    }
    Ok(Chart::weighted(ring, chart_var, weights)?)
}

fn classify_json(d: &Derivation) -> Result<(serde_json::Value, String), CliFailure> {
    let c = d.classify()?;
    let (status, mult) = match &c.status {
        PClosure::Additive => ("additive", None),
        PClosure::NotPClosed => ("not_p_closed", None),
        PClosure::PClosed { num, den } => (
            "p_closed",
            Some(json!({
                "num": num.to_string_bare(),
                "den": den.to_string_bare(),
            })),
        ),
    };
    let value = json!({
        "op": "classify",
        "status": status,
        "multiplier": mult,
        "p_power": c.witness.to_string(),
    });
    let human = match &c.status {
        PClosure::Additive => format!("additive: D^[p] = 0  (D = {d})"),
        PClosure::NotPClosed => format!("not p-closed: D^[p] = {}", c.witness),
        PClosure::PClosed { num, den } => format!(
            "p-closed: D^[p] = ({} / {})·D",
            num.to_string_bare(),
            den.to_string_bare()
        ),
    };
    Ok((value, human))
}

fn run(cli: &Cli) -> CliResult {
    let Some(command) = &cli.command else {
        return Err(CliFailure::Usage(
            "no subcommand; try `folcalc --help`".into(),
        ));
    };

    // quotient-class and corpus do not need a ring
    match command {
        Command::QuotientClass {
            x_class,
            f_class,
            explain,
            audit,
        } => return run_quotient_class(cli, x_class, f_class, *explain, *audit),
        Command::Corpus { filter } => return run_corpus_cmd(cli, filter.as_deref()),
        _ => {}
    }

    let ring = build_ring(cli)?;
    let session = Session {
        degree: cli.degree.unwrap_or(3 * ring.p() as i64),
        json: cli.json,
        ring,
    };

    match command {
        Command::Classify { derivation, at } => {
            let d = parse_derivation(&read_expr(derivation)?, &session.ring)?;
            let (mut value, mut human) = classify_json(&d)?;
            if let Some(at) = at {
                let point = parse_point(Some(at), &session.ring)?;
                let mult = d.is_multiplicative_at(&point)?;
                value["multiplicative_at"] = json!({ "point": point, "result": mult });
                human = format!("{human}\nmultiplicative at ({at}): {mult}");
            }
            session.emit(value, human);
            Ok(Verdict::Positive)
        }
        Command::Constants {
            derivations,
            certify,
        } => {
            if derivations.is_empty() {
                return Err(CliFailure::Usage("no derivations given".into()));
            }
            let ds = derivations
                .iter()
                .map(|t| parse_derivation(t, &session.ring))
                .collect::<Result<Vec<_>, _>>()?;
            let kernel = kernel_truncated(&ds, session.degree)?;
            let basis: Vec<String> = kernel.basis.iter().map(|f| f.to_string()).collect();
            let mut value = json!({
                "op": "constants",
                "degree": session.degree,
                "dim": kernel.dim(),
                "touches_boundary": kernel.touches_boundary,
                "basis": basis,
            });
            let mut human = format!(
                "constants up to degree {} (dim {}{}):\n  {}",
                session.degree,
                kernel.dim(),
                if kernel.touches_boundary {
                    ", basis touches the degree bound"
                } else {
                    ""
                },
                kernel
                    .basis
                    .iter()
                    .map(|f| f.to_string())
                    .collect::<Vec<_>>()
                    .join("\n  ")
            );
            if ds.len() == 1 {
                if let Some(weights) = diagonal_weights(&ds[0]) {
                    let monoid = toric_constants(&weights, session.ring.p());
                    let gens: Vec<String> = monoid
                        .gens_as_polys(&session.ring)?
                        .iter()
                        .map(|f| f.to_string())
                        .collect();
                    human = format!(
                        "{human}\nminimal monomial generators: {}",
                        gens.join(", ")
                    );
                    value["toric_generators"] = json!(gens);
                }
            }
            let mut verdict = Verdict::Positive;
            if let Some(claimed_texts) = certify {
                let claimed = claimed_texts
                    .iter()
                    .map(|t| parse_poly(t, &session.ring))
                    .collect::<Result<Vec<_>, _>>()?;
                let report = certify_generators(&ds, &claimed, session.degree)?;
                value["certify"] = json!({
                    "pass": report.pass,
                    "witness": report.failing_witness.as_ref().map(|f| f.to_string()),
                });
                human = format!(
                    "{human}\ncertification: {}",
                    if report.pass {
                        "claimed generators span the kernel".to_string()
                    } else {
                        format!(
                            "FAILED, witness {}",
                            report.failing_witness.as_ref().unwrap()
                        )
                    }
                );
                if !report.pass {
                    verdict = Verdict::Negative("generator certification failed".into());
                }
            }
            session.emit(value, human);
            Ok(verdict)
        }
        Command::Blowup { derivation, chart } => {
            let d = parse_derivation(derivation, &session.ring)?;
            let chart = build_chart(chart, &session.ring)?;
            let pulled = chart.pullback(&d)?;
            session.emit(
                json!({
                    "op": "blowup",
                    "chart": chart.to_string(),
                    "pullback": pulled.to_string(),
                }),
                format!("chart: {chart}\npullback: {pulled}"),
            );
            Ok(Verdict::Positive)
        }
        Command::Discrepancy {
            derivation,
            chart,
            iterate,
            max_steps,
        } => {
            if let Some(weights) = iterate {
                let parts: Vec<i64> = weights
                    .split(',')
                    .map(|c| c.trim().parse().unwrap_or(0))
                    .collect();
                if parts.len() != 2 {
                    return Err(CliFailure::Usage(format!(
                        "--iterate expects a,b, got `{weights}`"
                    )));
                }
                let (records, end) =
                    toric_blowup_sequence(&session.ring, parts[0], parts[1], *max_steps)?;
                for (i, rec) in records.iter().enumerate() {
                    session.emit(
                        reports::discrepancy_json(rec, Some(i + 1)),
                        reports::discrepancy_human(rec, Some(i + 1)),
                    );
                }
                let done = matches!(end, SequenceEnd::Terminated(_));
                session.emit(
                    json!({"op": "sequence-end", "terminated": done, "steps": records.len()}),
                    format!(
                        "sequence {} after {} step(s)",
                        if done { "terminated" } else { "hit the step budget" },
                        records.len()
                    ),
                );
                if !done {
                    return Err(CliFailure::Limit("blow-up iteration budget exhausted".into()));
                }
                return Ok(Verdict::Positive);
            }
            let text = derivation
                .as_deref()
                .ok_or_else(|| CliFailure::Usage("missing derivation".into()))?;
            let d = parse_derivation(&read_expr(text)?, &session.ring)?;
            let chart = build_chart(chart, &session.ring)?;
            let rec = discrepancy_rank1(&d, &chart)?;
            let lc = rec.satisfies_lc();
            session.emit(
                reports::discrepancy_json(&rec, None),
                reports::discrepancy_human(&rec, None),
            );
            if lc {
                Ok(Verdict::Positive)
            } else {
                Ok(Verdict::Negative("divisor violates log canonicity".into()))
            }
        }
        Command::LcCheck { derivations, at } => {
            if derivations.is_empty() {
                return Err(CliFailure::Usage("missing derivation".into()));
            }
            let point = parse_point(at.as_deref(), &session.ring)?;
            if derivations.len() > 1 {
                let ds = derivations
                    .iter()
                    .map(|t| parse_derivation(t, &session.ring))
                    .collect::<Result<Vec<_>, _>>()?;
                let ok = folcalc_core::singularity::multiplicative_singularities_sufficient(
                    &ds, &point,
                )?;
                session.emit(
                    json!({
                        "op": "lc-check",
                        "point": point,
                        "sufficient_multiplicative": ok,
                        "note": "sufficient only: a negative answer decides nothing",
                    }),
                    format!(
                        "sufficient multiplicative test at {:?}: {} (sufficient only)",
                        point,
                        if ok { "passes" } else { "inconclusive" }
                    ),
                );
                return Ok(Verdict::Positive);
            }
            let d = parse_derivation(&read_expr(&derivations[0])?, &session.ring)?;
            let verdict = classify_rank1(&d, &point)?;
            session.emit(
                reports::verdict_json(&verdict, &point),
                reports::verdict_human(&verdict, &point),
            );
            match verdict.status {
                Rank1Status::NotLc => {
                    Ok(Verdict::Negative("not log canonical at the point".into()))
                }
                _ => Ok(Verdict::Positive),
            }
        }
        Command::NonlcCert {
            derivation,
            at,
            max_steps,
        } => {
            let d = parse_derivation(derivation, &session.ring)?;
            let point = parse_point(at.as_deref(), &session.ring)?;
            let cert = find_nonlc_divisor(&d, &point, *max_steps)?;
            session.emit(
                reports::certificate_json(&cert),
                reports::certificate_human(&cert),
            );
            // finding the certificate is the positive outcome here
            Ok(Verdict::Positive)
        }
        Command::Fedder { poly } => {
            let f = parse_poly(&read_expr(poly)?, &session.ring)?;
            let pure = fedder_f_pure(&f)?;
            session.emit(
                json!({"op": "fedder", "f_pure": pure, "hypersurface": f.to_string()}),
                format!(
                    "hypersurface ({f} = 0) is {}F-pure at the origin",
                    if pure { "" } else { "NOT " }
                ),
            );
            if pure {
                Ok(Verdict::Positive)
            } else {
                Ok(Verdict::Negative("not F-pure".into()))
            }
        }
        Command::Ann { poly, classify } => {
            let f = parse_poly(poly, &session.ring)?;
            let gens = ann_foliation(&f)?;
            let gen_strs: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
            let mut value = json!({"op": "ann", "generators": gen_strs});
            let mut human = format!(
                "annihilator generators:\n  {}",
                gen_strs.join("\n  ")
            );
            let mut verdict = Verdict::Positive;
            if *classify {
                let report = ann_surface_classify(&f, &vec![0; session.ring.nvars()])?;
                value["surface"] = reports::surface_json(&report);
                human = format!("{human}\n{}", reports::surface_human(&report));
                if report.class == folcalc_core::singularity::SurfaceClass::NotLc {
                    verdict = Verdict::Negative("annihilator not log canonical".into());
                }
            }
            session.emit(value, human);
            Ok(verdict)
        }
        Command::FamilyFiber {
            derivation,
            base,
            at,
            obstruct,
        } => {
            let base_idx = session.ring.var_index(base).ok_or_else(|| {
                CliFailure::Usage(format!("unknown base variable `{base}`"))
            })?;
            let d = parse_derivation(derivation, &session.ring)?;
            let fam =
                FamilyDerivation::new(&session.ring, d.coeffs().to_vec(), base_idx)?;
            let report = fiber_vs_quotient_compare(&fam, *at, session.degree)?;
            let mut value = reports::compare_json(&report);
            let mut human = reports::compare_human(&report);
            let mut verdict = if report.equal {
                Verdict::Positive
            } else {
                Verdict::Negative("fiber constants do not all lift".into())
            };
            if let Some(g_text) = obstruct {
                let g = parse_poly(g_text, &fam.fiber_ring())?;
                let obstruction = noncommutativity_obstruction(&fam, &g, *at)?;
                value["obstruction"] = reports::obstruction_json(&obstruction);
                human = format!("{human}\n{}", reports::obstruction_human(&obstruction));
                if matches!(obstruction, Obstruction::Proof { .. }) {
                    verdict = Verdict::Negative("non-liftability proved".into());
                }
            }
            session.emit(value, human);
            Ok(verdict)
        }
        Command::QuotientClass { .. } | Command::Corpus { .. } => unreachable!(),
    }
}

fn diagonal_weights(d: &Derivation) -> Option<Vec<i64>> {
    let ring = d.ring();
    let n = ring.nvars();
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let c = d.coeff(i);
        if c.is_zero() {
            weights.push(0);
            continue;
        }
        if c.nterms() != 1 {
            return None;
        }
        let (e, coeff) = c.leading().unwrap();
        let mut expected = folcalc_core::poly::ExponentVec::zeros(n);
        expected.0[i] = 1;
        if *e != expected {
            return None;
        }
        weights.push(coeff as i64);
    }
    Some(weights)
}

fn run_quotient_class(
    cli: &Cli,
    x_class: &str,
    f_class: &str,
    explain: bool,
    audit: Option<usize>,
) -> CliResult {
    let xc = SingClass::parse(x_class)
        .ok_or_else(|| CliFailure::Usage(format!("unknown class `{x_class}`")))?;
    let fc = SingClass::parse(f_class)
        .ok_or_else(|| CliFailure::Usage(format!("unknown class `{f_class}`")))?;
    if let Some(samples) = audit {
        let seed = cli.seed.unwrap_or(0);
        let report =
            folcalc_core::ledger::validate_transfer_table(samples, &[2, 3, 5, 7], seed);
        let clean = report.violations.is_empty();
        let line = json!({
            "op": "quotient-class",
            "audit": {
                "samples_per_cell": report.samples_per_cell,
                "cells": report.cells,
                "violations": report.violations.len(),
            },
        });
        if cli.json {
            println!("{line}");
        } else {
            println!(
                "transfer-table audit: {} cells x {} samples, {} violation(s)",
                report.cells,
                report.samples_per_cell,
                report.violations.len()
            );
        }
        return if clean {
            Ok(Verdict::Positive)
        } else {
            Ok(Verdict::Negative("transfer table audit found violations".into()))
        };
    }
    let guaranteed = transfer_class_guaranteed(xc, fc)?;
    let mut value = json!({
        "op": "quotient-class",
        "x_class": xc.as_str(),
        "f_class": fc.as_str(),
        "guaranteed": guaranteed.as_str(),
    });
    let mut human = format!(
        "quotient is at least {} (space {}, foliation {})",
        guaranteed.as_str(),
        xc.as_str(),
        fc.as_str()
    );
    if explain {
        let p = cli.prime.map(|p| p.to_string()).unwrap_or_else(|| "p".into());
        let explanation = format!(
            "transfer rule: a_E = c + ({p}-1)·b for invariant divisors, \
             a_E = (c + ({p}-1)·b)/{p} otherwise; with c bounded per `{}` and \
             b bounded per `{}` (b ≥/> -eps on the foliation side), every \
             transferred a_E satisfies the `{}` bound.",
            xc.as_str(),
            fc.as_str(),
            guaranteed.as_str()
        );
        value["explain"] = json!(explanation);
        human = format!("{human}\n{explanation}");
    }
    if cli.json {
        println!("{value}");
    } else {
        println!("{human}");
    }
    Ok(Verdict::Positive)
}

fn run_corpus_cmd(cli: &Cli, filter: Option<&str>) -> CliResult {
    let outcomes = run_corpus(filter);
    for o in &outcomes {
        if cli.json {
            println!("{}", serde_json::to_string(o).unwrap());
        } else {
            println!(
                "{} {}/{} ({} ms){}",
                if o.passed { "PASS" } else { "FAIL" },
                o.group,
                o.id,
                o.millis,
                if o.detail.is_empty() {
                    String::new()
                } else {
                    format!(" :: {}", o.detail)
                }
            );
        }
    }
    let passed = corpus_passed(&outcomes);
    let summary = json!({
        "op": "corpus-summary",
        "cases": outcomes.len(),
        "passed": passed,
    });
    if cli.json {
        println!("{summary}");
    } else {
        println!(
            "{} of {} cases passed",
            outcomes.iter().filter(|o| o.passed).count(),
            outcomes.len()
        );
    }
    if passed {
        Ok(Verdict::Positive)
    } else {
        Err(CliFailure::Usage("corpus failures".into()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.schema {
        println!("{}", reports::schema());
        return ExitCode::SUCCESS;
    }
    match run(&cli) {
        Ok(Verdict::Positive) => ExitCode::SUCCESS,
        Ok(Verdict::Negative(msg)) => {
            if cli.strict {
                eprintln!("verdict: {msg}");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliFailure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliFailure::Limit(msg)) => {
            eprintln!("limit: {msg}");
            ExitCode::from(3)
        }
    }
}
