//! Pointwise singularity classification of rank-1 foliations: the
//! linear-part nilpotence criterion, the constructive non-lc certificate,
//! Fedder's F-purity test and the two-variable annihilator classifier.

use crate::birational::{discrepancy_rank1, Chart, DiscrepancyRecord};
use crate::derivation::Derivation;
use crate::error::{EngineError, Result};
use crate::linalg::FpMatrix;
use crate::poly::{monomial_content, ExponentVec, Poly, Ring};

/// Pointwise verdict for the rank-1 classifier. `regular_canonical` when a
/// coefficient is a unit at the point, `lc_multiplicative` when the linear
/// part is non-nilpotent, `not_lc` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank1Status {
    RegularCanonical,
    LcMultiplicative,
    NotLc,
}

/// Verdict plus its evidence: the linear part when the field vanishes at
/// the point, the witnessing coefficient index when it does not, and the
/// recorded multiplicativity cross-check.
#[derive(Debug, Clone)]
pub struct Rank1Verdict {
    pub status: Rank1Status,
    pub linear_part: Option<FpMatrix>,
    pub witness_coeff: Option<usize>,
    pub multiplicative_at_point: bool,
}

impl Rank1Verdict {
    pub fn is_lc(&self) -> bool {
        !matches!(self.status, Rank1Status::NotLc)
    }
}

/// Local primitivity of a rank-1 generator at F_p-rational points: the
/// monomial content must be trivial (any nontrivial monomial vanishes at
/// the origin of some chart), and the pairwise division probe must not
/// find a shared non-monomial coefficient factor.
pub fn primitivity_check(d: &Derivation) -> Result<()> {
    if d.is_zero() {
        return Err(EngineError::ZeroInput("rank-1 generator"));
    }
    let content = monomial_content(d.coeffs())?;
    if content.0.iter().any(|&e| e != 0) {
        return Err(EngineError::Precondition(format!(
            "generator has monomial content {:?}; saturate first",
            content.0
        )));
    }
    let base = d.ring().polynomial_ring();
    let plain = d.cast_ring(&base)?;
    let nonzero: Vec<&Poly> = plain.coeffs().iter().filter(|c| !c.is_zero()).collect();
    for cand in &nonzero {
        if cand.total_degree().unwrap_or(0) == 0 || cand.nterms() == 1 {
            continue;
        }
        if nonzero
            .iter()
            .all(|c| c.exact_divide(cand).map(|q| q.is_some()).unwrap_or(false))
        {
            return Err(EngineError::Precondition(format!(
                "generator coefficients share the factor {}; saturate first",
                cand
            )));
        }
    }
    Ok(())
}

/// Matrix of the endomorphism induced on the cotangent directions at the
/// point: M\[i\]\[j\] is the x_i-coefficient of D(x_j) after translating the
/// point to the origin. Defined only when every coefficient vanishes at
/// the point.
pub fn linear_part(d: &Derivation, point: &[i64]) -> Result<FpMatrix> {
    let ring = d.ring().clone();
    let translated = d.translate_to_origin(point)?;
    let n = ring.nvars();
    let mut m = FpMatrix::zeros(n, n, ring.p());
    for j in 0..n {
        let c = translated.coeff(j);
        if c.constant_coeff() != 0 {
            return Err(EngineError::Precondition(format!(
                "derivation does not vanish at the point (coefficient of d{} has a unit term)",
                ring.var_name(j)
            )));
        }
        for i in 0..n {
            let e = ExponentVec::unit(n, i);
            m.set(i, j, c.coeff(&e) as i64);
        }
    }
    Ok(m)
}

pub fn is_nilpotent(m: &FpMatrix) -> bool {
    m.is_nilpotent()
}

/// The rank-1 trichotomy at an F_p-rational point. Requires a p-closed,
/// locally primitive generator; the engine never rescales implicitly since
/// scaling changes the additive/multiplicative classification.
pub fn classify_rank1(d: &Derivation, point: &[i64]) -> Result<Rank1Verdict> {
    let base = d.ring().polynomial_ring();
    let d = d.cast_ring(&base)?;
    if !d.classify()?.is_p_closed() {
        return Err(EngineError::Precondition(
            "rank-1 classification requires a p-closed generator".into(),
        ));
    }
    primitivity_check(&d)?;
    let translated = d.translate_to_origin(point)?;
    let multiplicative = d.is_multiplicative_at(point)?;
    for (j, c) in translated.coeffs().iter().enumerate() {
        if c.constant_coeff() != 0 {
            return Ok(Rank1Verdict {
                status: Rank1Status::RegularCanonical,
                linear_part: None,
                witness_coeff: Some(j),
                multiplicative_at_point: multiplicative,
            });
        }
    }
    let m = linear_part(&d, point)?;
    let status = if m.is_nilpotent() {
        Rank1Status::NotLc
    } else {
        Rank1Status::LcMultiplicative
    };
    Ok(Rank1Verdict {
        status,
        linear_part: Some(m),
        witness_coeff: None,
        multiplicative_at_point: multiplicative,
    })
}

/// Sufficient (not necessary) test for at-worst-multiplicative
/// singularities of a higher-rank foliation at a point: every listed
/// generator multiplicative there and all pairwise brackets zero. A
/// `false` answer decides nothing, since the foliation may admit a better
/// generating set.
pub fn multiplicative_singularities_sufficient(
    gens: &[Derivation],
    point: &[i64],
) -> Result<bool> {
    for (i, a) in gens.iter().enumerate() {
        if !a.is_multiplicative_at(point)? {
            return Ok(false);
        }
        for b in &gens[i + 1..] {
            if !a.lie_bracket(b)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One step of a non-lc certificate path.
#[derive(Debug, Clone)]
pub enum CertificateStep {
    /// Linear change of coordinates, recorded as the images substituted
    /// for the variables.
    Coordinates { images: Vec<Poly> },
    Blowup { chart: Chart },
}

/// Constructive witness of non-log-canonicity: a path of coordinate
/// changes and blow-ups ending in an exceptional divisor with
/// a(E) < −ε(E).
#[derive(Debug, Clone)]
pub struct NonLcCertificate {
    pub steps: Vec<CertificateStep>,
    pub intermediate: Vec<DiscrepancyRecord>,
    pub record: DiscrepancyRecord,
    /// Order of vanishing of the generator at the final blow-up point.
    pub final_vanishing_order: i64,
}

/// Execute the constructive procedure behind the nilpotence criterion:
/// while the linear part is nilpotent nonzero, change coordinates so a
/// maximal Jordan chain occupies the leading variables and blow up its
/// span in the chart of the chain's top variable; once the linear part is
/// zero, one blow-up of the point produces the violating divisor.
pub fn find_nonlc_divisor(
    d: &Derivation,
    point: &[i64],
    max_steps: usize,
) -> Result<NonLcCertificate> {
    let verdict = classify_rank1(d, point)?;
    if verdict.status != Rank1Status::NotLc {
        return Err(EngineError::Precondition(
            "non-lc certificate requested for an lc input".into(),
        ));
    }
    let base = d.ring().polynomial_ring();
    let origin = vec![0i64; base.nvars()];
    let mut current = d.cast_ring(&base)?.translate_to_origin(point)?;
    let mut steps: Vec<CertificateStep> = Vec::new();
    if point.iter().any(|&c| c != 0) {
        let images = (0..base.nvars())
            .map(|i| Poly::var(&base, i).add(&Poly::constant(&base, point[i])))
            .collect();
        steps.push(CertificateStep::Coordinates { images });
    }
    let mut intermediate = Vec::new();
    for _ in 0..max_steps {
        let m = linear_part(&current, &origin)?;
        if m.is_zero() {
            let order = current.vanishing_order().expect("nonzero generator");
            let n = base.nvars();
            let center: Vec<usize> = (0..n).collect();
            let chart = Chart::blowup(&base, &center, 0)?;
            let record = discrepancy_rank1(&current, &chart)?;
            if record.a_f >= -(record.epsilon as i64) {
                return Err(EngineError::ConsistencyFailure(format!(
                    "final blow-up failed to violate log canonicity (a={}, eps={})",
                    record.a_f, record.epsilon
                )));
            }
            if order >= 2 && record.a_f > -order + 1 {
                return Err(EngineError::ConsistencyFailure(format!(
                    "discrepancy bound a <= -d+1 failed (a={}, d={order})",
                    record.a_f
                )));
            }
            steps.push(CertificateStep::Blowup {
                chart: chart.clone(),
            });
            return Ok(NonLcCertificate {
                steps,
                intermediate,
                record,
                final_vanishing_order: order,
            });
        }
        // Nilpotent nonzero linear part: align a maximal Jordan chain with
        // the leading coordinates.
        if !m.is_nilpotent() {
            return Err(EngineError::ConsistencyFailure(
                "intermediate generator became log canonical at the origin".into(),
            ));
        }
        let (r, basis) = jordan_chain_basis(&m);
        let images = linear_images(&base, &basis.inverse());
        let rewritten = change_coordinates(&current, &basis, &images)?;
        steps.push(CertificateStep::Coordinates {
            images: images.clone(),
        });
        let center: Vec<usize> = (0..r).collect();
        let chart = Chart::blowup(&base, &center, r - 1)?;
        let record = discrepancy_rank1(&rewritten, &chart)?;
        steps.push(CertificateStep::Blowup {
            chart: chart.clone(),
        });
        current = record.saturated_pullback.cast_ring(&base)?;
        intermediate.push(record);
        if !current.vanishes_at(&origin)? {
            return Err(EngineError::Precondition(
                "blow-up left the singular locus; input was not a primitive non-lc generator"
                    .into(),
            ));
        }
    }
    Err(EngineError::MaxStepsExhausted { steps: max_steps })
}

/// Jordan chain data for a nilpotent matrix: the nilpotency index r and an
/// invertible matrix whose first r rows are a maximal chain z_1,…,z_r with
/// M·z_{i+1} = z_i (as coordinate columns) and M·z_1 = 0.
fn jordan_chain_basis(m: &FpMatrix) -> (usize, FpMatrix) {
    let n = m.rows;
    let p = m.p();
    assert!(m.is_nilpotent() && !m.is_zero());
    let mut r = 1;
    while !m.pow(r as u64).is_zero() {
        r += 1;
    }
    // pick a unit vector surviving r−1 applications
    let top = m.pow(r as u64 - 1);
    let k = (0..n)
        .find(|&k| (0..n).any(|i| top.get(i, k) != 0))
        .expect("nonzero power has a nonzero column");
    let mut v = vec![0u64; n];
    v[k] = 1;
    let mut chain = vec![v.clone()];
    for _ in 1..r {
        let prev = chain.last().unwrap();
        chain.push(m.matvec(prev));
    }
    chain.reverse(); // chain[0] = M^{r-1}v, …, chain[r-1] = v
    let mut rows: Vec<Vec<i64>> = chain
        .iter()
        .map(|v| v.iter().map(|&x| x as i64).collect())
        .collect();
    for k in 0..n {
        if rows.len() == n {
            break;
        }
        let mut cand = vec![0i64; n];
        cand[k] = 1;
        let mut probe = rows.clone();
        probe.push(cand.clone());
        if FpMatrix::from_rows(&probe, p).rank() == probe.len() {
            rows.push(cand);
        }
    }
    assert_eq!(rows.len(), n, "chain extension failed");
    (r, FpMatrix::from_rows(&rows, p))
}

/// Substitution images x_k ↦ Σ_m inv\[k\]\[m\]·x_m for a linear coordinate
/// change with matrix rows z_i = Σ_k Z\[i\]\[k\] x_k.
fn linear_images(ring: &Ring, inv: &FpMatrix) -> Vec<Poly> {
    (0..ring.nvars())
        .map(|k| {
            let mut f = Poly::zero(ring);
            for mcol in 0..ring.nvars() {
                f = f.add(&Poly::var(ring, mcol).scale(inv.get(k, mcol) as i64));
            }
            f
        })
        .collect()
}

/// Rewrite a derivation in the linear coordinates z = Z·x: the i-th new
/// coefficient is Σ_k Z\[i\]\[k\]·f_k with x substituted by Z^{-1}z.
fn change_coordinates(
    d: &Derivation,
    z: &FpMatrix,
    images: &[Poly],
) -> Result<Derivation> {
    let ring = d.ring().clone();
    let n = ring.nvars();
    let mut coeffs = Vec::with_capacity(n);
    for i in 0..n {
        let mut combo = Poly::zero(&ring);
        for k in 0..n {
            combo = combo.add(&d.coeff(k).scale(z.get(i, k) as i64));
        }
        coeffs.push(combo.substitute_self(images)?);
    }
    Ok(Derivation::new(&ring, coeffs))
}

/// Fedder's criterion at the origin for the hypersurface (f = 0):
/// F-pure iff f^{p−1} ∉ (x_1^p, …, x_n^p).
pub fn fedder_f_pure(f: &Poly) -> Result<bool> {
    if f.is_zero() {
        return Err(EngineError::ZeroInput("hypersurface equation"));
    }
    let ring = f.ring().clone();
    let p = ring.p();
    let power = f.pow(p - 1)?;
    let gens: Vec<Poly> = (0..ring.nvars())
        .map(|i| {
            Poly::monomial(
                &ring,
                {
                    let mut e = ExponentVec::zeros(ring.nvars());
                    e.0[i] = p as i64;
                    e
                },
                1,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(!power.monomial_ideal_member(&gens)?)
}

/// For a derivation with D^\[p\] = D vanishing at the point, the induced
/// linear endomorphism satisfies M^p = M (so it is semisimple with
/// eigenvalues in F_p).
pub fn semisimple_linear_check(d: &Derivation, point: &[i64]) -> Result<bool> {
    if d.p_power()? != *d {
        return Err(EngineError::Precondition(
            "semisimplicity check requires D^[p] = D exactly".into(),
        ));
    }
    let m = linear_part(d, point)?;
    Ok(m.pow(d.ring().p()) == m)
}

/// The corank-1 annihilator generators of a non-p-th-power s: with
/// s_i = ∂s/∂x_i and pivot the first index with s_pivot ≠ 0, the n−1
/// derivations s_j·∂_pivot − s_pivot·∂_j annihilate s.
pub fn ann_foliation(s: &Poly) -> Result<Vec<Derivation>> {
    let ring = s.ring().clone();
    let n = ring.nvars();
    let partials: Vec<Poly> = (0..n).map(|i| s.partial(i)).collect();
    let pivot = partials
        .iter()
        .position(|f| !f.is_zero())
        .ok_or_else(|| EngineError::Precondition("input is a p-th power".into()))?;
    let mut out = Vec::new();
    for j in 0..n {
        if j == pivot {
            continue;
        }
        let mut coeffs = vec![Poly::zero(&ring); n];
        coeffs[pivot] = partials[j].clone();
        coeffs[j] = partials[pivot].neg();
        let d = Derivation::new(&ring, coeffs);
        debug_assert!(d.apply(s).unwrap().is_zero());
        out.push(d);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceClass {
    Regular,
    StrictlyLc,
    NotLc,
}

/// Classification of the annihilator foliation of a two-variable function,
/// with the independent rank-1 route recorded for cross-validation.
#[derive(Debug, Clone)]
pub struct SurfaceReport {
    pub class: SurfaceClass,
    pub matrix: Option<FpMatrix>,
    pub generator: Derivation,
    pub rank1_status: Rank1Status,
    pub agrees: bool,
}

/// Classify Ann(φ) at a point of the plane from the 2-jet of φ: regular
/// when dφ has a unit coefficient, otherwise strictly lc iff the matrix
/// [\[φ11, −2φ20\], \[2φ02, −φ11\]] of Taylor coefficients is non-nilpotent.
/// Requires the partials to have no common monomial factor at the point
/// (probed via monomial content).
pub fn ann_surface_classify(phi: &Poly, point: &[i64]) -> Result<SurfaceReport> {
    let ring = phi.ring().clone();
    if ring.nvars() != 2 {
        return Err(EngineError::Precondition(
            "surface classifier needs exactly two variables".into(),
        ));
    }
    let shifted = phi.shift_origin(point)?;
    let gx = shifted.partial(0);
    let gy = shifted.partial(1);
    if gx.is_zero() && gy.is_zero() {
        return Err(EngineError::Precondition("input is a p-th power".into()));
    }
    let content = monomial_content(&[gx.clone(), gy.clone()])?;
    if content.0.iter().any(|&e| e != 0) {
        return Err(EngineError::Precondition(
            "partials share a monomial factor at the point; classification skipped".into(),
        ));
    }
    let coeff = |i: i64, j: i64| shifted.coeff(&ExponentVec(vec![i, j])) as i64;
    let (c10, c01) = (coeff(1, 0), coeff(0, 1));
    // Generator in the original coordinates, classified at the point.
    let gen = Derivation::new(
        &ring,
        vec![phi.partial(1), phi.partial(0).neg()],
    );
    let verdict = classify_rank1(&gen, point)?;
    if c10 != 0 || c01 != 0 {
        return Ok(SurfaceReport {
            class: SurfaceClass::Regular,
            matrix: None,
            generator: gen,
            rank1_status: verdict.status,
            agrees: verdict.status == Rank1Status::RegularCanonical,
        });
    }
    let m = FpMatrix::from_rows(
        &[
            vec![coeff(1, 1), -2 * coeff(2, 0)],
            vec![2 * coeff(0, 2), -coeff(1, 1)],
        ],
        ring.p(),
    );
    let class = if m.is_nilpotent() {
        SurfaceClass::NotLc
    } else {
        SurfaceClass::StrictlyLc
    };
    let expected = match class {
        SurfaceClass::StrictlyLc => Rank1Status::LcMultiplicative,
        SurfaceClass::NotLc => Rank1Status::NotLc,
        SurfaceClass::Regular => Rank1Status::RegularCanonical,
    };
    Ok(SurfaceReport {
        class,
        matrix: Some(m),
        generator: gen,
        rank1_status: verdict.status,
        agrees: verdict.status == expected,
    })
}
