//! One-parameter families of 1-foliations: fiber restriction, comparison
//! of specialized family constants against fiberwise constants at a
//! truncation degree, and certificates for (non-)commutation of quotients
//! with fibers.

use crate::constants::{kernel_truncated, span_solve};
use crate::derivation::Derivation;
use crate::error::{EngineError, Result};
use crate::poly::{ExponentVec, Poly, Ring};

/// A derivation on a ring with one designated base variable t, O_S-linear
/// (the base variable is frozen: D(t) = 0). Every F_p-fiber must be
/// p-closed so the fibers are 1-foliations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyDerivation {
    derivation: Derivation,
    base: usize,
}

impl FamilyDerivation {
    pub fn new(ring: &Ring, coeffs: Vec<Poly>, base: usize) -> Result<FamilyDerivation> {
        let derivation = Derivation::with_frozen(ring, coeffs, &[base]);
        let fam = FamilyDerivation { derivation, base };
        for s in 0..ring.p() as i64 {
            let fiber = fam.fiber_restrict(s)?;
            if !fiber.classify()?.is_p_closed() {
                return Err(EngineError::Precondition(format!(
                    "fiber at {}={} is not p-closed",
                    ring.var_name(base),
                    s
                )));
            }
        }
        Ok(fam)
    }

    pub fn derivation(&self) -> &Derivation {
        &self.derivation
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn ring(&self) -> &Ring {
        self.derivation.ring()
    }

    pub fn fiber_ring(&self) -> Ring {
        let keep: Vec<usize> = (0..self.ring().nvars())
            .filter(|&i| i != self.base)
            .collect();
        self.ring().restrict(&keep)
    }

    /// Restrict to the fiber over t = s: substitute the base value and drop
    /// the base variable from the ring.
    pub fn fiber_restrict(&self, s: i64) -> Result<Derivation> {
        let ring = self.ring().clone();
        let fiber = self.fiber_ring();
        let images: Vec<Poly> = (0..ring.nvars())
            .map(|i| {
                if i == self.base {
                    Poly::constant(&ring, s)
                } else {
                    Poly::var(&ring, i)
                }
            })
            .collect();
        let coeffs = (0..ring.nvars())
            .filter(|&i| i != self.base)
            .map(|i| {
                let substituted = self.derivation.coeff(i).substitute_self(&images)?;
                project_to_fiber(&substituted, &fiber, self.base)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Derivation::new(&fiber, coeffs))
    }

    /// Inject a fiber polynomial into the family ring (base exponent zero).
    pub fn inject(&self, f: &Poly) -> Result<Poly> {
        inject_from_fiber(f, self.ring(), self.base)
    }
}

fn project_to_fiber(f: &Poly, fiber: &Ring, base: usize) -> Result<Poly> {
    let mut out = Poly::zero(fiber);
    for (e, c) in f.terms() {
        assert_eq!(e.0[base], 0, "base variable survived substitution");
        let mut exps: Vec<i64> = e.0.clone();
        exps.remove(base);
        out = out.add(&Poly::monomial(fiber, ExponentVec(exps), c as i64)?);
    }
    Ok(out)
}

fn inject_from_fiber(f: &Poly, family: &Ring, base: usize) -> Result<Poly> {
    let mut out = Poly::zero(family);
    for (e, c) in f.terms() {
        let mut exps: Vec<i64> = e.0.clone();
        exps.insert(base, 0);
        out = out.add(&Poly::monomial(family, ExponentVec(exps), c as i64)?);
    }
    Ok(out)
}

/// Outcome of comparing the specialized family constants with the fiber
/// constants at a truncation degree. Equality is degree-truncated and the
/// bound is part of the report; no scheme-theoretic claim is made.
#[derive(Debug, Clone)]
pub struct FiberCompareReport {
    pub base_value: i64,
    pub degree_bound: i64,
    pub equal: bool,
    pub fiber_kernel_dim: usize,
    pub specialized_family_rank: usize,
    /// Fiber constants paired with a family constant specializing to them.
    pub lifts: Vec<(Poly, Poly)>,
    /// Fiber constants with no family lift at this degree.
    pub missing: Vec<Poly>,
}

/// Compare the two kernels over the fiber t = s: the specialized family
/// kernel always injects into the fiber kernel; the report records whether
/// it spans it, with explicit lifts or missing witnesses.
pub fn fiber_vs_quotient_compare(
    fam: &FamilyDerivation,
    s: i64,
    d: i64,
) -> Result<FiberCompareReport> {
    let family_kernel = kernel_truncated(&[fam.derivation().clone()], d)?;
    let fiber_d = fam.fiber_restrict(s)?;
    let fiber_kernel = kernel_truncated(&[fiber_d], d)?;
    let ring = fam.ring().clone();
    let base = fam.base();
    let fiber = fam.fiber_ring();
    let images: Vec<Poly> = (0..ring.nvars())
        .map(|i| {
            if i == base {
                Poly::constant(&ring, s)
            } else {
                Poly::var(&ring, i)
            }
        })
        .collect();
    let specialized: Vec<Poly> = family_kernel
        .basis
        .iter()
        .map(|f| project_to_fiber(&f.substitute_self(&images)?, &fiber, base))
        .collect::<Result<Vec<_>>>()?;
    let mut lifts = Vec::new();
    let mut missing = Vec::new();
    for g in &fiber_kernel.basis {
        match span_solve(&specialized, g) {
            Some(coeffs) => {
                let mut lift = Poly::zero(&ring);
                for (c, fkb) in coeffs.iter().zip(&family_kernel.basis) {
                    if *c != 0 {
                        lift = lift.add(&fkb.scale(*c as i64));
                    }
                }
                lifts.push((g.clone(), lift));
            }
            None => missing.push(g.clone()),
        }
    }
    let rank = {
        let nonzero: Vec<Poly> = specialized.iter().filter(|f| !f.is_zero()).cloned().collect();
        // rank of the specialized span
        let mut count = 0usize;
        let mut remaining: Vec<Poly> = Vec::new();
        for f in nonzero {
            if !crate::constants::span_contains(&remaining, &f) {
                remaining.push(f);
                count += 1;
            }
        }
        count
    };
    Ok(FiberCompareReport {
        base_value: s,
        degree_bound: d,
        equal: missing.is_empty(),
        fiber_kernel_dim: fiber_kernel.dim(),
        specialized_family_rank: rank,
        lifts,
        missing,
    })
}

/// Why a fiber constant cannot lift to a family constant, when provable.
#[derive(Debug, Clone)]
pub enum Obstruction {
    /// The constant is already a family constant.
    TriviallyLiftable { lift: Poly },
    /// Any lift g + (t−s)·F forces D(F) to equal a polynomial lying
    /// outside the monomial ideal generated by the coefficient monomials
    /// and (t−s); no such F exists because D(F) always lies inside it.
    Proof {
        forcing: Poly,
        ideal_gens: Vec<Poly>,
    },
    /// The monomial-ideal test is inconclusive.
    Unknown { reason: String },
}

/// Certify that a fiber constant g (over t = s) admits no family lift, via
/// the monomial-ideal obstruction. Exact only when the fixed-locus ideal
/// generators and the base offset are monomials.
pub fn noncommutativity_obstruction(
    fam: &FamilyDerivation,
    g: &Poly,
    s: i64,
) -> Result<Obstruction> {
    let fiber_d = fam.fiber_restrict(s)?;
    if !fiber_d.apply(g)?.is_zero() {
        return Err(EngineError::Precondition(
            "obstruction input must be a fiber constant".into(),
        ));
    }
    let ring = fam.ring().clone();
    let lifted = fam.inject(g)?;
    let image = fam.derivation().apply(&lifted)?;
    if image.is_zero() {
        return Ok(Obstruction::TriviallyLiftable { lift: lifted });
    }
    let offset = Poly::var(&ring, fam.base()).sub(&Poly::constant(&ring, s));
    let quotient = image
        .exact_divide(&offset)?
        .expect("D(g) vanishes on the fiber, so (t - s) divides it");
    let forcing = quotient.neg();
    let mut ideal_gens = fam.derivation().fixed_ideal_gens();
    if !ideal_gens.contains(&offset) {
        ideal_gens.push(offset);
    }
    if ideal_gens.iter().any(|f| f.nterms() != 1) {
        return Ok(Obstruction::Unknown {
            reason: "fixed-locus ideal is not monomial; test inconclusive".into(),
        });
    }
    if !forcing.monomial_ideal_member(&ideal_gens)? {
        Ok(Obstruction::Proof {
            forcing,
            ideal_gens,
        })
    } else {
        Ok(Obstruction::Unknown {
            reason: "forcing term lies in the monomial ideal; test inconclusive".into(),
        })
    }
}

/// Comparison for multiplicative families: requires the family derivation
/// itself to be multiplicative at the origin of the fiber t = s (which
/// restricts to multiplicativity of the fiber). Inequality of the kernels
/// would then contradict the commutation theorem, so it is reported as a
/// consistency failure rather than a result.
pub fn mu_p_family_commutes(
    fam: &FamilyDerivation,
    s: i64,
    d: i64,
) -> Result<FiberCompareReport> {
    let mut point = vec![0i64; fam.ring().nvars()];
    point[fam.base()] = s;
    if !fam.derivation().is_multiplicative_at(&point)? {
        return Err(EngineError::Precondition(
            "family derivation is not multiplicative at the fiber origin".into(),
        ));
    }
    let report = fiber_vs_quotient_compare(fam, s, d)?;
    if !report.equal {
        return Err(EngineError::ConsistencyFailure(format!(
            "multiplicative family failed kernel comparison at t={s}, degree {d}: {} fiber constants unliftable",
            report.missing.len()
        )));
    }
    Ok(report)
}
