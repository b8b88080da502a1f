//! Regression corpus: every worked example and property suite the engine
//! is expected to reproduce exactly, runnable as one batch with per-case
//! reporting. The CLI `corpus` subcommand and the acceptance tests both
//! drive this list.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::birational::{
    discrepancy_rank1, is_invariant, saturate_rank1, toric_blowup_sequence, Chart, SequenceEnd,
};
use crate::constants::{
    certify_generators, check_relation, kernel_truncated, subalgebra_member_truncated,
    toric_constants,
};
use crate::derivation::{CoactionKind, Derivation, PClosure};
use crate::families::{
    fiber_vs_quotient_compare, mu_p_family_commutes, noncommutativity_obstruction,
    FamilyDerivation, Obstruction,
};
use crate::ledger::{
    adjunction_residual, pullback_multiplicity, transfer_discrepancy, validate_transfer_table,
    DivisorLedger, LedgerEntry, Rational,
};
use crate::parse::{parse_derivation, parse_poly};
use crate::poly::{monomials_up_to, ExponentVec, Poly, Ring};
use crate::sampling::{random_commuting_pair, random_p_closed_origin, random_poly};
use crate::singularity::{
    ann_foliation, ann_surface_classify, classify_rank1, fedder_f_pure, find_nonlc_divisor,
    Rank1Status, SurfaceClass,
};

/// Result line for one corpus case.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusOutcome {
    pub group: String,
    pub id: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

type CaseFn = fn() -> Result<(), String>;

pub struct CorpusCase {
    pub group: &'static str,
    pub id: &'static str,
    pub run: CaseFn,
}

fn ring2(p: u64) -> Ring {
    Ring::new(p, &["x", "y"])
}

fn pt(ring: &Ring, terms: &[(&[i64], i64)]) -> Poly {
    Poly::from_terms(ring, terms).unwrap()
}

fn frobenius_field(p: u64) -> Derivation {
    let r = ring2(p);
    let e = p as i64;
    Derivation::new(&r, vec![pt(&r, &[(&[e, 0], 1)]), pt(&r, &[(&[0, e], 1)])])
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ee<T>(r: crate::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------
// constants
// ---------------------------------------------------------------------

fn case_toric_kernel_oracle() -> Result<(), String> {
    for p in [2u64, 3, 5] {
        let r = ring2(p);
        let d_bound = 3 * p as i64;
        for a in 1..p as i64 {
            for b in 1..p as i64 {
                let d = Derivation::diagonal(&r, &[a, b]);
                let kernel = ee(kernel_truncated(&[d], d_bound))?;
                let expected: Vec<Poly> = monomials_up_to(&r, d_bound)
                    .into_iter()
                    .filter(|e| (a * e.0[0] + b * e.0[1]).rem_euclid(p as i64) == 0)
                    .map(|e| Poly::monomial(&r, e, 1).unwrap())
                    .collect();
                check(
                    kernel.dim() == expected.len(),
                    format!(
                        "p={p} weights ({a},{b}): kernel dim {} vs brute-force {}",
                        kernel.dim(),
                        expected.len()
                    ),
                )?;
                for f in &expected {
                    check(
                        kernel.contains(f),
                        format!("p={p} ({a},{b}): {} missing from kernel", f),
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn case_frobenius_constants() -> Result<(), String> {
    for p in [2u64, 3] {
        let r = ring2(p);
        let e = p as i64;
        let d = frobenius_field(p);
        check(
            ee(d.p_power())?.is_zero(),
            format!("p={p}: p-th power of the Frobenius-power field must vanish"),
        )?;
        let claimed = [
            pt(&r, &[(&[e, 0], 1)]),
            pt(&r, &[(&[0, e], 1)]),
            pt(&r, &[(&[e, 1], 1), (&[1, e], -1)]),
        ];
        let report = ee(certify_generators(&[d], &claimed, 3 * e))?;
        check(
            report.pass,
            format!("p={p}: generator certification failed: {:?}", report.failing_witness),
        )?;
        // presentation s^p = u^p v − u v^p (the displayed form at p = 2)
        let rel_ring = Ring::new(p, &["u", "v", "s"]);
        let relation = pt(
            &rel_ring,
            &[(&[0, 0, e], 1), (&[e, 1, 0], -1), (&[1, e, 0], 1)],
        );
        let images = vec![
            pt(&r, &[(&[e, 0], 1)]),
            pt(&r, &[(&[0, e], 1)]),
            pt(&r, &[(&[e, 1], 1), (&[1, e], -1)]),
        ];
        check(
            ee(check_relation(&relation, &r, &images))?,
            format!("p={p}: presentation relation failed"),
        )?;
    }
    Ok(())
}

fn case_toric_monoid_generators() -> Result<(), String> {
    let m = toric_constants(&[1, 1], 2);
    check(
        m.minimal_gens
            == vec![
                ExponentVec(vec![0, 2]),
                ExponentVec(vec![1, 1]),
                ExponentVec(vec![2, 0]),
            ],
        "weights (1,1) over p=2",
    )?;
    let m = toric_constants(&[1, 0], 3);
    check(
        m.minimal_gens == vec![ExponentVec(vec![0, 1]), ExponentVec(vec![3, 0])],
        "weights (1,0) over p=3",
    )?;
    let m = toric_constants(&[1, 4], 5);
    check(
        m.minimal_gens.contains(&ExponentVec(vec![1, 1])),
        "weights (1,4) over p=5 must contain xy",
    )
}

fn case_subalgebra_products() -> Result<(), String> {
    let r = ring2(2);
    let x2 = pt(&r, &[(&[2, 0], 1)]);
    let y2 = pt(&r, &[(&[0, 2], 1)]);
    check(
        ee(subalgebra_member_truncated(
            &pt(&r, &[(&[2, 2], 1)]),
            &[x2.clone(), y2.clone()],
            4,
        ))?,
        "x^2 y^2 in <x^2, y^2>",
    )?;
    check(
        !ee(subalgebra_member_truncated(
            &pt(&r, &[(&[1, 1], 1)]),
            &[x2, y2],
            2,
        ))?,
        "xy outside <x^2, y^2>",
    )?;
    for p in [2u64, 3] {
        let rp = ring2(p);
        let e = p as i64;
        let gens = [
            pt(&rp, &[(&[e, 0], 1)]),
            pt(&rp, &[(&[0, e], 1)]),
            pt(&rp, &[(&[e, 1], 1), (&[1, e], -1)]),
        ];
        let f = pt(&rp, &[(&[2 * e, 1], 1), (&[e + 1, e], -1)]);
        check(
            ee(subalgebra_member_truncated(&f, &gens, 2 * e + 1))?,
            format!("p={p}: product membership"),
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// derivation
// ---------------------------------------------------------------------

fn case_diagonal_eigenvalues() -> Result<(), String> {
    for p in [2u64, 3, 5] {
        let r = ring2(p);
        for a in 0..p as i64 {
            for b in 0..p as i64 {
                let d = Derivation::diagonal(&r, &[a, b]);
                for i in 0..3i64 {
                    for j in 0..3i64 {
                        let m = pt(&r, &[(&[i, j], 1)]);
                        let expected = m.scale(a * i + b * j);
                        check(
                            ee(d.apply(&m))? == expected,
                            format!("p={p} ({a},{b}) on x^{i}y^{j}"),
                        )?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn case_p_power_examples() -> Result<(), String> {
    for p in [2u64, 3, 5] {
        let r = ring2(p);
        for a in 0..p as i64 {
            for b in 0..p as i64 {
                let d = Derivation::diagonal(&r, &[a, b]);
                check(
                    ee(d.p_power())? == d,
                    format!("diagonal field fixed by p-th power, p={p}"),
                )?;
            }
        }
        check(
            ee(frobenius_field(p).p_power())?.is_zero(),
            format!("Frobenius-power field additive, p={p}"),
        )?;
    }
    let r = ring2(2);
    let swap = Derivation::new(&r, vec![Poly::var(&r, 1), Poly::var(&r, 0)]);
    check(
        ee(swap.p_power())? == Derivation::diagonal(&r, &[1, 1]),
        "square of the swap field at p=2",
    )
}

fn case_classify_examples() -> Result<(), String> {
    let r = ring2(3);
    let diag = Derivation::diagonal(&r, &[1, 1]);
    match ee(diag.classify())?.status {
        PClosure::PClosed { num, den } => {
            check(
                num == Poly::constant(&r, 1) && den == Poly::constant(&r, 1),
                "diagonal multiplier must be 1",
            )?;
        }
        s => return Err(format!("diagonal field should be p-closed, got {s:?}")),
    }
    let r2 = ring2(2);
    let swap = Derivation::new(&r2, vec![Poly::var(&r2, 1), Poly::var(&r2, 0)]);
    check(
        matches!(ee(swap.classify())?.status, PClosure::NotPClosed),
        "swap field not p-closed at p=2",
    )?;
    for p in [2u64, 3, 5] {
        let rp = ring2(p);
        let sq = Derivation::new(&rp, vec![pt(&rp, &[(&[2, 0], 1)]), Poly::zero(&rp)]);
        check(
            matches!(ee(sq.classify())?.status, PClosure::Additive),
            format!("x^2 dx additive, p={p}"),
        )?;
    }
    // pointwise multiplicativity
    let r = ring2(3);
    check(
        ee(Derivation::diagonal(&r, &[1, 1]).is_multiplicative_at(&[0, 0]))?,
        "diagonal multiplicative at origin",
    )?;
    let sq = Derivation::new(&r, vec![pt(&r, &[(&[2, 0], 1)]), Poly::zero(&r)]);
    check(
        !ee(sq.is_multiplicative_at(&[0, 0]))?,
        "additive field not multiplicative",
    )?;
    Ok(())
}

fn case_hochschild_suite() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x701);
    for p in [2u64, 3, 5] {
        let r = ring2(p);
        for i in 0..500 {
            let a = random_poly(&mut rng, &r, 2, 3);
            let d = Derivation::new(
                &r,
                vec![
                    random_poly(&mut rng, &r, 2, 2),
                    random_poly(&mut rng, &r, 2, 2),
                ],
            );
            let residual = ee(d.hochschild_residual(&a))?;
            check(
                residual.is_zero(),
                format!("scaling identity failed at p={p}, sample {i}"),
            )?;
        }
    }
    Ok(())
}

fn case_jacobson_suite() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x702);
    for p in [2u64, 3, 5] {
        let r = ring2(p);
        for i in 0..500 {
            let (d1, d2) = random_commuting_pair(&mut rng, &r, 2);
            let residual = ee(d1.jacobson_commuting_residual(&d2))?;
            check(
                residual.is_zero(),
                format!("commuting-sum identity failed at p={p}, sample {i}"),
            )?;
        }
    }
    Ok(())
}

fn case_rescale_additive() -> Result<(), String> {
    for p in [2u64, 3, 5] {
        let r = ring2(p);
        let xdx = Derivation::new(&r, vec![Poly::var(&r, 0), Poly::zero(&r)]);
        let rescaled = ee(xdx.additive_rescale(&Poly::var(&r, 0)))?;
        check(
            ee(rescaled.p_power())?.is_zero(),
            format!("rescaled field must be additive, p={p}"),
        )?;
    }
    let r = ring2(2);
    let diag = Derivation::diagonal(&r, &[1, 1]);
    let rescaled = ee(diag.additive_rescale(&Poly::var(&r, 0)))?;
    let expected = Derivation::new(&r, vec![pt(&r, &[(&[2, 0], 1)]), pt(&r, &[(&[1, 1], 1)])]);
    check(rescaled == expected, "x·(x dx + y dy) at p=2")?;
    let ddx = Derivation::new(&r, vec![Poly::constant(&r, 1), Poly::zero(&r)]);
    check(
        ddx.additive_rescale(&Poly::var(&r, 1)).is_err(),
        "rescaling pivot with D(x)=0 must fail",
    )
}

fn case_coaction_examples() -> Result<(), String> {
    let r = ring2(3);
    let ddx = Derivation::new(&r, vec![Poly::constant(&r, 1), Poly::zero(&r)]);
    let alpha = ee(ddx.coaction_expand(&Poly::var(&r, 0), CoactionKind::AlphaP))?;
    check(
        alpha[0] == Poly::var(&r, 0)
            && alpha[1] == Poly::constant(&r, 1)
            && alpha[2].is_zero(),
        "translation coaction coefficients",
    )?;
    for p in [2u64, 3, 5] {
        let rp = ring2(p);
        let xdx = Derivation::new(&rp, vec![Poly::var(&rp, 0), Poly::zero(&rp)]);
        let basis = ee(xdx.coaction_t_basis(&Poly::var(&rp, 0), CoactionKind::MuP))?;
        check(
            basis[1] == Poly::var(&rp, 0)
                && basis.iter().enumerate().all(|(i, c)| i == 1 || c.is_zero()),
            format!("scaling coaction must send x to x·t, p={p}"),
        )?;
    }
    let x = Poly::var(&r, 0);
    let x2 = ee(x.mul(&x))?;
    let xdx = Derivation::new(&r, vec![x.clone(), Poly::zero(&r)]);
    check(
        ee(xdx.coaction_homomorphism_check(&x2, &x, CoactionKind::MuP))?,
        "scaling coaction is a ring map on (x^2, x) at p=3",
    )?;
    let add = frobenius_field(3);
    check(
        ee(add.coaction_homomorphism_check(&x2, &x2, CoactionKind::AlphaP))?,
        "additive coaction is a ring map on (x^2, x^2) at p=3",
    )
}

fn case_fixed_ideal() -> Result<(), String> {
    let r = ring2(5);
    let d = Derivation::diagonal(&r, &[2, 3]);
    check(
        d.fixed_ideal_gens() == vec![Poly::var(&r, 0).scale(2), Poly::var(&r, 1).scale(3)],
        "diagonal fixed ideal",
    )?;
    let ddx = Derivation::new(&r, vec![Poly::constant(&r, 1), Poly::zero(&r)]);
    check(
        ddx.fixed_ideal_gens() == vec![Poly::constant(&r, 1)],
        "translation field has empty fixed locus",
    )?;
    for p in [2u64, 3] {
        let rf = Ring::new(p, &["x", "y", "z", "t"]);
        let e = p as i64;
        let fam = Derivation::with_frozen(
            &rf,
            vec![
                pt(&rf, &[(&[e, 0, 0, 0], 1)]),
                pt(&rf, &[(&[0, e, 0, 0], 1)]),
                Poly::var(&rf, 3),
                Poly::zero(&rf),
            ],
            &[3],
        );
        let gens = fam.fixed_ideal_gens();
        let one = Poly::constant(&rf, 1);
        check(
            gens.len() == 3 && !ee(one.monomial_ideal_member(&gens))?,
            format!("p={p}: unit outside the monomial fixed ideal"),
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// blowup
// ---------------------------------------------------------------------

fn case_blowup_weight_shift() -> Result<(), String> {
    for p in [2u64, 3, 5] {
        let r = ring2(p);
        let chart = ee(Chart::blowup(&r, &[0, 1], 0))?;
        let src = chart.source_ring();
        for a in 0..p as i64 {
            for b in 0..p as i64 {
                let d = Derivation::diagonal(&r, &[a, b]);
                let lifted = ee(chart.pullback(&d))?;
                check(
                    lifted == Derivation::diagonal(&src, &[a, b - a]),
                    format!("p={p}: lift of ({a},{b}) must have weights ({a},{})", b - a),
                )?;
                if a == 0 || b == 0 {
                    continue;
                }
                let rec = ee(discrepancy_rank1(&d, &chart))?;
                if (a - b).rem_euclid(p as i64) == 0 {
                    check(
                        rec.a_f == -1
                            && rec.epsilon == 1
                            && rec.content == Poly::var(&src, 0),
                        format!("p={p}: equal weights give a=-1, eps=1, content u"),
                    )?;
                } else {
                    check(
                        rec.a_f == 0
                            && rec.epsilon == 0
                            && rec.content == Poly::constant(&src, 1),
                        format!("p={p}: distinct weights give a=0, eps=0, content 1"),
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn case_toric_sequences() -> Result<(), String> {
    for p in [2u64, 3, 5] {
        let r = ring2(p);
        for b in 1..p as i64 {
            let (recs, end) = ee(toric_blowup_sequence(&r, 1, b, 2 * p as usize))?;
            let expected_steps = b as usize; // min{n>0 : b − n ≡ 0 mod p}
            check(
                end == SequenceEnd::Terminated(expected_steps),
                format!("p={p} b={b}: expected {expected_steps} steps, got {end:?}"),
            )?;
            let last = recs.last().unwrap();
            check(
                last.a_f == -1 && last.epsilon == 1,
                format!("p={p} b={b}: terminal record must be (-1, eps 1)"),
            )?;
            for rec in &recs[..recs.len() - 1] {
                check(
                    rec.a_f == 0 && rec.epsilon == 0,
                    format!("p={p} b={b}: intermediate records must be (0, eps 0)"),
                )?;
            }
        }
        check(
            toric_blowup_sequence(&r, 1, 0, 4).is_err(),
            "zero weight rejected",
        )?;
    }
    Ok(())
}

fn case_weighted_chart_regular() -> Result<(), String> {
    for p in [2u64, 3, 5] {
        let r = Ring::new(p, &["x1", "x2", "x3"]);
        let mut weights = vec![0i64; 3];
        weights[2] = p as i64;
        let chart = ee(Chart::weighted(&r, 0, weights))?;
        let d = Derivation::new(
            &r,
            vec![Poly::constant(&r, 1), Poly::zero(&r), Poly::zero(&r)],
        );
        let rec = ee(discrepancy_rank1(&d, &chart))?;
        check(
            rec.a_f == 0,
            format!("p={p}: weighted chart must leave the regular field at valuation 0"),
        )?;
    }
    Ok(())
}

fn case_quadratic_pullback() -> Result<(), String> {
    let p = 2;
    let r = ring2(p);
    let chart = ee(Chart::blowup(&r, &[0, 1], 0))?;
    let src = chart.source_ring();
    let d = Derivation::new(&r, vec![pt(&r, &[(&[2, 0], 1)]), pt(&r, &[(&[0, 2], 1)])]);
    let raw = ee(chart.pullback(&d))?;
    let expected = Derivation::new(
        &src,
        vec![
            pt(&src, &[(&[2, 0], 1)]),
            pt(&src, &[(&[1, 2], 1), (&[1, 1], -1)]),
        ],
    );
    check(raw == expected, "raw pullback of the quadratic field")?;
    let (sat, content) = ee(saturate_rank1(&raw))?;
    check(content == Poly::var(&src, 0), "content must be the exceptional variable")?;
    check(
        ee(is_invariant(&sat, &Poly::var(&src, 0)))?,
        "exceptional divisor invariant after saturation",
    )?;
    let rec = ee(discrepancy_rank1(&d, &chart))?;
    check(
        rec.a_f == -1 && rec.epsilon == 0 && !rec.satisfies_lc(),
        "quadratic field violates log canonicity on the first blow-up",
    )
}

fn case_regular_blowup_nonneg() -> Result<(), String> {
    for p in [2u64, 3] {
        let r2 = ring2(p);
        let ddx = Derivation::new(&r2, vec![Poly::constant(&r2, 1), Poly::zero(&r2)]);
        for chart_var in [0usize, 1] {
            let chart = ee(Chart::blowup(&r2, &[0, 1], chart_var))?;
            let rec = ee(discrepancy_rank1(&ddx, &chart))?;
            check(
                rec.a_f >= 0,
                format!("p={p}: regular field must have nonnegative discrepancy"),
            )?;
        }
        let r3 = Ring::new(p, &["x", "y", "z"]);
        let ddx3 = Derivation::new(
            &r3,
            vec![Poly::constant(&r3, 1), Poly::zero(&r3), Poly::zero(&r3)],
        );
        let chart = ee(Chart::blowup(&r3, &[0, 1, 2], 2))?;
        let rec = ee(discrepancy_rank1(&ddx3, &chart))?;
        check(rec.a_f >= 0, format!("p={p}: 3-variable regular field"))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// lc
// ---------------------------------------------------------------------

fn case_lc_multiplicative_agreement() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5c5);
    for p in [2u64, 3, 5] {
        let r = ring2(p);
        let mut produced = 0usize;
        let mut attempts = 0usize;
        while produced < 200 {
            attempts += 1;
            if attempts > 20_000 {
                return Err(format!("sample generator starved at p={p}"));
            }
            let Some(d) = random_p_closed_origin(&mut rng, &r) else {
                continue;
            };
            produced += 1;
            let verdict = ee(classify_rank1(&d, &[0, 0]))?;
            let lc = verdict.status == Rank1Status::LcMultiplicative;
            let mult = verdict.multiplicative_at_point;
            check(
                lc == mult,
                format!(
                    "p={p} sample {produced}: lc={lc} vs multiplicative={mult} on {d}"
                ),
            )?;
        }
    }
    Ok(())
}

fn case_fedder_surface_consistency() -> Result<(), String> {
    // not-F-pure quotient matches the non-lc field at p = 2
    let r = Ring::new(2, &["u", "v", "s"]);
    let f = pt(&r, &[(&[0, 0, 2], 1), (&[2, 1, 0], -1), (&[1, 2, 0], 1)]);
    check(!ee(fedder_f_pure(&f))?, "quartic quotient not F-pure at p=2")?;
    let d = Derivation::new(
        &ring2(2),
        vec![pt(&ring2(2), &[(&[2, 0], 1)]), pt(&ring2(2), &[(&[0, 2], 1)])],
    );
    check(
        ee(classify_rank1(&d, &[0, 0]))?.status == Rank1Status::NotLc,
        "quadratic field not lc at p=2",
    )?;
    // F-pure cone matches the strictly lc diagonal field at p ∈ {3, 5}
    for p in [3u64, 5] {
        let r = Ring::new(p, &["u", "v", "s"]);
        let f = pt(&r, &[(&[0, 0, 2], 1), (&[1, 1, 0], -1)]);
        check(ee(fedder_f_pure(&f))?, format!("cone F-pure at p={p}"))?;
        let d = Derivation::diagonal(&ring2(p), &[1, -1]);
        check(
            ee(classify_rank1(&d, &[0, 0]))?.status == Rank1Status::LcMultiplicative,
            format!("diagonal (1,-1) lc at p={p}"),
        )?;
    }
    Ok(())
}

fn case_nonlc_certificates() -> Result<(), String> {
    // inputs with zero linear part across primes
    for p in [2u64, 3, 5] {
        let d = frobenius_field(p);
        let cert = ee(find_nonlc_divisor(&d, &[0, 0], 4))?;
        check(
            cert.record.a_f < -(cert.record.epsilon as i64),
            format!("p={p}: certificate must violate a >= -eps"),
        )?;
        check(
            cert.record.a_f <= -(p as i64) + 1,
            format!("p={p}: order-{p} vanishing needs a <= -{}", p - 1),
        )?;
    }
    // order-2 example at p = 2
    let r = ring2(2);
    let d = Derivation::new(&r, vec![pt(&r, &[(&[2, 0], 1)]), pt(&r, &[(&[0, 2], 1)])]);
    let cert = ee(find_nonlc_divisor(&d, &[0, 0], 4))?;
    check(
        cert.record.a_f == -1 && cert.record.epsilon == 0 && cert.final_vanishing_order == 2,
        "quadratic certificate shape",
    )?;
    // nilpotent nonzero linear part: one chain blow-up then the point
    for p in [3u64, 5] {
        let r = ring2(p);
        let d = Derivation::new(&r, vec![Poly::var(&r, 1), pt(&r, &[(&[p as i64, 0], 1)])]);
        let cert = ee(find_nonlc_divisor(&d, &[0, 0], 4))?;
        check(
            cert.intermediate.len() == 1
                && cert.intermediate[0].a_f == 0
                && cert.intermediate[0].epsilon == 0,
            format!("p={p}: chain step must be an invariant zero-discrepancy divisor"),
        )?;
        check(
            cert.record.a_f < -(cert.record.epsilon as i64),
            format!("p={p}: chain certificate must violate log canonicity"),
        )?;
    }
    // three variables, within 2n blow-ups
    let r3 = Ring::new(2, &["x", "y", "z"]);
    let d3 = Derivation::new(
        &r3,
        vec![
            pt(&r3, &[(&[2, 0, 0], 1)]),
            pt(&r3, &[(&[0, 2, 0], 1)]),
            pt(&r3, &[(&[0, 0, 2], 1)]),
        ],
    );
    let cert = ee(find_nonlc_divisor(&d3, &[0, 0, 0], 6))?;
    check(
        cert.record.a_f < -(cert.record.epsilon as i64) && cert.record.a_f <= -1,
        "three-variable certificate",
    )
}

fn case_ann_annihilation() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa22);
    let mut produced = 0usize;
    let mut attempts = 0usize;
    while produced < 100 {
        attempts += 1;
        if attempts > 5000 {
            return Err("generator starved".into());
        }
        let p = [2u64, 3, 5][rng.random_range(0..3)];
        let r = ring2(p);
        let s = random_poly(&mut rng, &r, 3, 4);
        let gens = match ann_foliation(&s) {
            Ok(g) => g,
            Err(_) => continue, // p-th power draw
        };
        produced += 1;
        for g in &gens {
            check(
                ee(g.apply(&s))?.is_zero(),
                format!("annihilator output must kill its input ({s})"),
            )?;
        }
    }
    Ok(())
}

fn case_ann_surface_agreement() -> Result<(), String> {
    let cases: Vec<(u64, Vec<(&[i64], i64)>, SurfaceClass)> = vec![
        (5, vec![(&[1, 1][..], 1)], SurfaceClass::StrictlyLc),
        (
            5,
            vec![(&[1, 0][..], 1), (&[0, 3][..], 1)],
            SurfaceClass::Regular,
        ),
        (
            3,
            vec![(&[2, 1][..], 1), (&[1, 2][..], 1)],
            SurfaceClass::NotLc,
        ),
        (
            5,
            vec![(&[2, 0][..], 1), (&[1, 1][..], 1), (&[0, 2][..], 1)],
            SurfaceClass::StrictlyLc,
        ),
    ];
    for (p, terms, expected) in cases {
        let r = ring2(p);
        let phi = pt(&r, &terms);
        let report = ee(ann_surface_classify(&phi, &[0, 0]))?;
        check(
            report.class == expected,
            format!("p={p} {}: expected {:?}, got {:?}", phi, expected, report.class),
        )?;
        check(
            report.agrees,
            format!("p={p} {}: 2-jet route disagrees with the rank-1 route", phi),
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// ledger
// ---------------------------------------------------------------------

fn case_ledger_roundtrip_residual() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1ed);
    for p in [2u64, 3, 5, 7] {
        check(pullback_multiplicity(0, p) == 1, "invariant multiplicity")?;
        check(
            pullback_multiplicity(1, p) == p as i64,
            "non-invariant multiplicity",
        )?;
        for _ in 0..50 {
            let entries: Vec<LedgerEntry> = (0..5)
                .map(|i| LedgerEntry {
                    id: format!("D{i}"),
                    coeff: Rational::new(rng.random_range(-9..9), rng.random_range(1..6)),
                    epsilon: rng.random_range(0..2u8),
                })
                .collect();
            let ledger = DivisorLedger::new(p, entries);
            check(
                adjunction_residual(&ledger).is_zero(),
                format!("adjunction residual nonzero at p={p}"),
            )?;
        }
    }
    Ok(())
}

fn case_transfer_table_audit() -> Result<(), String> {
    let report = validate_transfer_table(10_000, &[2, 3, 5, 7], 0xbeef);
    check(
        report.violations.is_empty(),
        format!(
            "transfer table violated: {:?}",
            report.violations.first().map(|v| format!(
                "x={:?} f={:?} c={} b={} inv={} p={} a={}",
                v.x_class, v.f_class, v.c, v.b, v.invariant, v.p, v.transferred
            ))
        ),
    )
}

fn case_quotient_discrepancy_crosscheck() -> Result<(), String> {
    // blow-up data of the equal-weights field over p = 2, combined with the
    // smooth-surface discrepancy c = 1, must transfer to exactly 0
    let r = ring2(2);
    let chart = ee(Chart::blowup(&r, &[0, 1], 0))?;
    let d = Derivation::diagonal(&r, &[1, 1]);
    let rec = ee(discrepancy_rank1(&d, &chart))?;
    let b = Rational::from(rec.a_f);
    let invariant = rec.epsilon == 0;
    let a = transfer_discrepancy(Rational::from(1), b, invariant, 2);
    check(
        a == Rational::from(0),
        format!("expected transferred discrepancy 0, got {a}"),
    )
}

// ---------------------------------------------------------------------
// families
// ---------------------------------------------------------------------

fn case_family_lift_witness() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfa1);
    let r = Ring::new(2, &["x", "y", "t"]);
    for sample in 0..12 {
        // coefficients x^2 + t·f(t), y^2 + t·g(t) with deg f, g ≤ 2 so the
        // corrector stays within total degree 4
        let f = random_poly_in_t(&mut rng, &r, 2);
        let g = random_poly_in_t(&mut rng, &r, 2);
        let cx = pt(&r, &[(&[2, 0, 0], 1)]).add(&ee(Poly::var(&r, 2).mul(&f))?);
        let cy = pt(&r, &[(&[0, 2, 0], 1)]).add(&ee(Poly::var(&r, 2).mul(&g))?);
        let fam = ee(FamilyDerivation::new(
            &r,
            vec![cx, cy, Poly::zero(&r)],
            2,
        ))?;
        let report = ee(fiber_vs_quotient_compare(&fam, 0, 4))?;
        check(
            report.equal,
            format!("sample {sample}: kernels must agree at degree 4"),
        )?;
        let fr = fam.fiber_ring();
        let cubic = Poly::from_terms(&fr, &[(&[2, 1], 1), (&[1, 2], 1)]).unwrap();
        let lift = report
            .lifts
            .iter()
            .find(|(fib, _)| *fib == cubic)
            .map(|(_, l)| l.clone())
            .ok_or_else(|| format!("sample {sample}: cubic constant missing"))?;
        check(
            ee(fam.derivation().apply(&lift))?.is_zero(),
            format!("sample {sample}: lift is not a family constant"),
        )?;
        // the explicit corrector h = g·x + f·y also works
        let h = ee(g.mul(&Poly::var(&r, 0)))?.add(&ee(f.mul(&Poly::var(&r, 1)))?);
        let candidate = pt(&r, &[(&[2, 1, 0], 1), (&[1, 2, 0], 1)])
            .add(&ee(Poly::var(&r, 2).mul(&h))?);
        check(
            ee(fam.derivation().apply(&candidate))?.is_zero(),
            format!("sample {sample}: explicit corrector failed"),
        )?;
    }
    Ok(())
}

fn random_poly_in_t(rng: &mut ChaCha8Rng, ring: &Ring, max_deg: i64) -> Poly {
    let mut f = Poly::zero(ring);
    for k in 0..=max_deg {
        let c = rng.random_range(0..ring.p() as i64);
        f = f.add(&Poly::monomial(ring, ExponentVec(vec![0, 0, k]), c).unwrap());
    }
    f
}

fn case_family_obstruction() -> Result<(), String> {
    for p in [2u64, 3] {
        let r = Ring::new(p, &["x", "y", "z", "t"]);
        let e = p as i64;
        let fam = ee(FamilyDerivation::new(
            &r,
            vec![
                pt(&r, &[(&[e, 0, 0, 0], 1)]),
                pt(&r, &[(&[0, e, 0, 0], 1)]),
                Poly::var(&r, 3),
                Poly::zero(&r),
            ],
            3,
        ))?;
        let fr = fam.fiber_ring();
        let z = Poly::var(&fr, 2);
        match ee(noncommutativity_obstruction(&fam, &z, 0))? {
            Obstruction::Proof { forcing, .. } => {
                check(
                    forcing == Poly::constant(fam.ring(), -1),
                    format!("p={p}: forcing constant must be -1"),
                )?;
            }
            other => return Err(format!("p={p}: expected proof, got {other:?}")),
        }
        let report = ee(fiber_vs_quotient_compare(&fam, 0, 3))?;
        check(
            !report.equal && report.missing.contains(&z),
            format!("p={p}: z must be unliftable"),
        )?;
    }
    Ok(())
}

fn case_multiplicative_family_commutes() -> Result<(), String> {
    for p in [2u64, 3, 5] {
        let r = Ring::new(p, &["x", "y", "t"]);
        let u = Poly::constant(&r, 1).add(&Poly::var(&r, 2));
        let weight_b = if p == 2 { 1 } else { 2 };
        let fam = ee(FamilyDerivation::new(
            &r,
            vec![
                ee(u.mul(&Poly::var(&r, 0)))?,
                ee(u.mul(&Poly::var(&r, 1)))?.scale(weight_b),
                Poly::zero(&r),
            ],
            2,
        ))?;
        let report = ee(mu_p_family_commutes(&fam, 0, 3 * p as i64))?;
        check(report.equal, format!("p={p}: multiplicative family must commute"))?;
    }
    // the additive family is rejected by the precondition
    let r = Ring::new(3, &["x", "y", "z", "t"]);
    let fam = ee(FamilyDerivation::new(
        &r,
        vec![
            pt(&r, &[(&[3, 0, 0, 0], 1)]),
            pt(&r, &[(&[0, 3, 0, 0], 1)]),
            Poly::var(&r, 3),
            Poly::zero(&r),
        ],
        3,
    ))?;
    check(
        mu_p_family_commutes(&fam, 0, 3).is_err(),
        "additive family must be rejected",
    )
}

fn case_base_change_blowup() -> Result<(), String> {
    // one-parameter additive family with base twisted by u ↦ u^n: blowing
    // up the origin of the total space gives an invariant exceptional
    // divisor with a(E) = -min(n-1, p-1), and the quotient discrepancy
    // transfers to 3 + (p-1)·a(E)
    for (p, n) in [(3u64, 2i64), (3, 4), (5, 3)] {
        let r = Ring::new(p, &["x", "y", "z", "u"]);
        let e = p as i64;
        let d = Derivation::new(
            &r,
            vec![
                pt(&r, &[(&[e, 0, 0, 0], 1)]),
                pt(&r, &[(&[0, e, 0, 0], 1)]),
                pt(&r, &[(&[0, 0, 0, n], 1)]),
                Poly::zero(&r),
            ],
        );
        let chart = ee(Chart::blowup(&r, &[0, 1, 2, 3], 2))?;
        let rec = ee(discrepancy_rank1(&d, &chart))?;
        let expected = -(n - 1).min(e - 1);
        check(
            rec.a_f == expected && rec.epsilon == 0,
            format!(
                "p={p} n={n}: expected a={expected}, eps=0, got ({}, {})",
                rec.a_f, rec.epsilon
            ),
        )?;
        // smooth 4-fold point blow-up has c = 3; E invariant
        let a = transfer_discrepancy(
            Rational::from(3),
            Rational::from(rec.a_f),
            rec.epsilon == 0,
            p,
        );
        check(
            a == Rational::from(3 + (e - 1) * expected),
            format!("p={p} n={n}: transferred discrepancy {a}"),
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// parse
// ---------------------------------------------------------------------

fn case_parse_roundtrip() -> Result<(), String> {
    let r = ring2(5);
    let polys = ["x^2*y + 4*y^3", "2*x + 1", "x^3 + y^3"];
    for text in polys {
        let f = parse_poly(text, &r).map_err(|e| e.to_string())?;
        let printed = format!("{f}");
        let g = parse_poly(&printed, &r).map_err(|e| e.to_string())?;
        check(f == g, format!("round trip failed on {text}"))?;
    }
    let derivs = ["2*x*dx + 3*y*dy", "x^2*dx + y^2*dy", "(x + y)*dx + dy"];
    for text in derivs {
        let d = parse_derivation(text, &r).map_err(|e| e.to_string())?;
        let printed = format!("{d}");
        let e = parse_derivation(&printed, &r).map_err(|e| e.to_string())?;
        check(d == e, format!("round trip failed on {text}"))?;
    }
    Ok(())
}

fn case_parse_errors() -> Result<(), String> {
    let r = ring2(5);
    let err = parse_poly("x +", &r).unwrap_err();
    check(err.offset == 3, format!("offset {} for `x +`", err.offset))?;
    check(parse_poly("x + w", &r).is_err(), "unknown variable")?;
    check(
        parse_derivation("x*dx*dy", &r).is_err(),
        "double differential",
    )?;
    check(parse_poly("x^2 (mod 7)", &r).is_err(), "modulus mismatch")
}

/// The full corpus in deterministic order.
pub fn all_cases() -> Vec<CorpusCase> {
    vec![
        CorpusCase { group: "constants", id: "toric_kernel_oracle", run: case_toric_kernel_oracle },
        CorpusCase { group: "constants", id: "frobenius_power_constants", run: case_frobenius_constants },
        CorpusCase { group: "constants", id: "toric_monoid_generators", run: case_toric_monoid_generators },
        CorpusCase { group: "constants", id: "subalgebra_products", run: case_subalgebra_products },
        CorpusCase { group: "derivation", id: "diagonal_eigenvalues", run: case_diagonal_eigenvalues },
        CorpusCase { group: "derivation", id: "p_power_examples", run: case_p_power_examples },
        CorpusCase { group: "derivation", id: "classify_examples", run: case_classify_examples },
        CorpusCase { group: "derivation", id: "scaling_identity_suite", run: case_hochschild_suite },
        CorpusCase { group: "derivation", id: "commuting_sum_suite", run: case_jacobson_suite },
        CorpusCase { group: "derivation", id: "additive_rescale", run: case_rescale_additive },
        CorpusCase { group: "derivation", id: "coaction_examples", run: case_coaction_examples },
        CorpusCase { group: "derivation", id: "fixed_ideal_generators", run: case_fixed_ideal },
        CorpusCase { group: "blowup", id: "weight_shift_lifts", run: case_blowup_weight_shift },
        CorpusCase { group: "blowup", id: "toric_iteration", run: case_toric_sequences },
        CorpusCase { group: "blowup", id: "weighted_chart_regular", run: case_weighted_chart_regular },
        CorpusCase { group: "blowup", id: "quadratic_pullback", run: case_quadratic_pullback },
        CorpusCase { group: "blowup", id: "regular_nonnegative", run: case_regular_blowup_nonneg },
        CorpusCase { group: "lc", id: "multiplicative_agreement", run: case_lc_multiplicative_agreement },
        CorpusCase { group: "lc", id: "fedder_surface_consistency", run: case_fedder_surface_consistency },
        CorpusCase { group: "lc", id: "nonlc_certificates", run: case_nonlc_certificates },
        CorpusCase { group: "lc", id: "annihilator_outputs", run: case_ann_annihilation },
        CorpusCase { group: "lc", id: "annihilator_surface_agreement", run: case_ann_surface_agreement },
        CorpusCase { group: "ledger", id: "roundtrip_and_residual", run: case_ledger_roundtrip_residual },
        CorpusCase { group: "ledger", id: "transfer_table_audit", run: case_transfer_table_audit },
        CorpusCase { group: "ledger", id: "quotient_discrepancy_crosscheck", run: case_quotient_discrepancy_crosscheck },
        CorpusCase { group: "families", id: "lift_witness", run: case_family_lift_witness },
        CorpusCase { group: "families", id: "noncommutativity_obstruction", run: case_family_obstruction },
        CorpusCase { group: "families", id: "multiplicative_commutes", run: case_multiplicative_family_commutes },
        CorpusCase { group: "families", id: "base_change_blowup", run: case_base_change_blowup },
        CorpusCase { group: "parse", id: "roundtrip", run: case_parse_roundtrip },
        CorpusCase { group: "parse", id: "error_offsets", run: case_parse_errors },
    ]
}

/// Run a case list, optionally filtered by a substring of `group/id`.
pub fn run_cases(cases: Vec<CorpusCase>, filter: Option<&str>) -> Vec<CorpusOutcome> {
    cases
        .into_iter()
        .filter(|c| {
            filter
                .map(|f| format!("{}/{}", c.group, c.id).contains(f))
                .unwrap_or(true)
        })
        .map(|c| {
            let start = Instant::now();
            let result = (c.run)();
            CorpusOutcome {
                group: c.group.to_string(),
                id: c.id.to_string(),
                passed: result.is_ok(),
                detail: result.err().unwrap_or_default(),
                millis: start.elapsed().as_millis(),
            }
        })
        .collect()
}

/// Run the full corpus, optionally filtered by a substring of `group/id`.
pub fn run_corpus(filter: Option<&str>) -> Vec<CorpusOutcome> {
    run_cases(all_cases(), filter)
}

pub fn corpus_passed(outcomes: &[CorpusOutcome]) -> bool {
    !outcomes.is_empty() && outcomes.iter().all(|o| o.passed)
}

/// Run a single case by its id; None when the id is unknown.
pub fn run_case(id: &str) -> Option<Result<(), String>> {
    all_cases()
        .into_iter()
        .find(|c| c.id == id)
        .map(|c| (c.run)())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_selects_cases() {
        let outcomes = run_corpus(Some("toric"));
        assert!(!outcomes.is_empty());
        assert!(outcomes.iter().all(|o| format!("{}/{}", o.group, o.id).contains("toric")));
    }

    #[test]
    fn parse_cases_pass() {
        let outcomes = run_corpus(Some("parse"));
        assert!(corpus_passed(&outcomes), "{outcomes:?}");
    }

    #[test]
    fn failing_case_is_identified() {
        fn bad() -> Result<(), String> {
            Err("expected 0, got 1".into())
        }
        let cases = vec![
            CorpusCase { group: "demo", id: "good", run: case_parse_roundtrip },
            CorpusCase { group: "demo", id: "bad_expected_value", run: bad },
        ];
        let outcomes = run_cases(cases, None);
        assert!(!corpus_passed(&outcomes));
        let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].id, "bad_expected_value");
        assert_eq!(failed[0].detail, "expected 0, got 1");
    }
}
