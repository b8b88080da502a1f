//! Rings of constants: exact combinatorics for diagonal derivations,
//! degree-truncated kernel computation for general ones, and truncated
//! subalgebra-membership certification.

use std::collections::HashMap;

use crate::derivation::Derivation;
use crate::error::{EngineError, Result};
use crate::linalg::FpMatrix;
use crate::poly::{monomials_up_to, ExponentVec, Poly, Ring};

/// Exact F_p-basis of the constants of total degree ≤ `degree_bound`.
/// Every basis element is annihilated exactly (outputs are never truncated,
/// so membership is not merely up-to-degree). `touches_boundary` flags
/// kernels whose basis reaches the truncation degree; generators of the
/// full ring of constants may then live beyond the bound.
#[derive(Debug, Clone)]
pub struct TruncatedKernel {
    pub degree_bound: i64,
    pub basis: Vec<Poly>,
    pub touches_boundary: bool,
}

impl TruncatedKernel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Linear membership of f in the span of the basis.
    pub fn contains(&self, f: &Poly) -> bool {
        span_contains(&self.basis, f)
    }
}

/// Minimal monomial generators of {e ≥ 0 : λ·e ≡ 0 mod p}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricMonoid {
    pub weights: Vec<u64>,
    pub p: u64,
    pub minimal_gens: Vec<ExponentVec>,
}

impl ToricMonoid {
    pub fn gens_as_polys(&self, ring: &Ring) -> Result<Vec<Poly>> {
        assert_eq!(ring.nvars(), self.weights.len());
        self.minimal_gens
            .iter()
            .map(|e| Poly::monomial(ring, e.clone(), 1))
            .collect()
    }
}

/// Minimal monomial generators of the monoid of diagonal constants.
/// Since x_i^p is always a constant, any generator component exceeding p
/// would decompose, so the box \[0, p\]^n is an exhaustive search space.
pub fn toric_constants(weights: &[i64], p: u64) -> ToricMonoid {
    let n = weights.len();
    let w: Vec<u64> = weights.iter().map(|&a| a.rem_euclid(p as i64) as u64).collect();
    let mut members: Vec<Vec<i64>> = Vec::new();
    let mut cursor = vec![0i64; n];
    loop {
        let dot: u64 = cursor
            .iter()
            .zip(&w)
            .map(|(&e, &a)| e as u64 * a)
            .sum();
        if dot % p == 0 && cursor.iter().any(|&e| e > 0) {
            members.push(cursor.clone());
        }
        // odometer over the box [0, p]^n
        let mut i = 0;
        loop {
            if i == n {
                let minimal = minimal_elements(&members);
                return ToricMonoid {
                    weights: w,
                    p,
                    minimal_gens: minimal,
                };
            }
            cursor[i] += 1;
            if cursor[i] <= p as i64 {
                break;
            }
            cursor[i] = 0;
            i += 1;
        }
    }
}

fn minimal_elements(members: &[Vec<i64>]) -> Vec<ExponentVec> {
    let mut out: Vec<ExponentVec> = members
        .iter()
        .filter(|e| {
            !members.iter().any(|f| {
                f != *e && f.iter().zip(e.iter()).all(|(a, b)| a <= b)
            })
        })
        .map(|e| ExponentVec(e.clone()))
        .collect();
    out.sort();
    out
}

/// Exact nullspace of f ↦ (D_1(f), …, D_m(f)) on the span of monomials of
/// total degree ≤ d. Output coordinates range over every monomial that
/// actually appears, so kernel elements are genuine constants.
pub fn kernel_truncated(gens: &[Derivation], d: i64) -> Result<TruncatedKernel> {
    let ring = gens
        .first()
        .expect("at least one derivation")
        .ring()
        .clone();
    for g in gens {
        assert!(g.ring() == &ring, "derivations must share the ring");
    }
    let inputs = monomials_up_to(&ring, d);
    let mut images: Vec<Vec<Poly>> = Vec::with_capacity(gens.len());
    for g in gens {
        let row: Vec<Poly> = inputs
            .iter()
            .map(|e| {
                let m = Poly::monomial(&ring, e.clone(), 1)?;
                g.apply(&m)
            })
            .collect::<Result<Vec<_>>>()?;
        images.push(row);
    }
    // Row space: one block of output monomials per generator derivation.
    let mut row_index: Vec<HashMap<ExponentVec, usize>> = Vec::new();
    let mut total_rows = 0usize;
    for block in &images {
        let mut idx = HashMap::new();
        for f in block {
            for (e, _) in f.terms() {
                if !idx.contains_key(e) {
                    idx.insert(e.clone(), total_rows);
                    total_rows += 1;
                }
            }
        }
        row_index.push(idx);
    }
    let mut m = FpMatrix::zeros(total_rows, inputs.len(), ring.p());
    for (k, block) in images.iter().enumerate() {
        for (col, f) in block.iter().enumerate() {
            for (e, c) in f.terms() {
                m.set(row_index[k][e], col, c as i64);
            }
        }
    }
    let null = m.nullspace();
    // Canonicalize: reduced row echelon with respect to the monomial order,
    // leading (largest) monomial first.
    let mut echelon = FpMatrix::zeros(null.len(), inputs.len(), ring.p());
    for (i, v) in null.iter().enumerate() {
        for (j, &c) in v.iter().enumerate() {
            // reverse columns so rref pivots on the largest monomial
            echelon.set(i, inputs.len() - 1 - j, c as i64);
        }
    }
    echelon.rref();
    let mut basis = Vec::new();
    for i in 0..echelon.rows {
        let mut f = Poly::zero(&ring);
        for j in 0..inputs.len() {
            let c = echelon.get(i, inputs.len() - 1 - j);
            if c != 0 {
                f = f.add(&Poly::monomial(&ring, inputs[j].clone(), c as i64)?);
            }
        }
        if !f.is_zero() {
            basis.push(f);
        }
    }
    let touches_boundary = basis
        .iter()
        .any(|f| f.total_degree() == Some(d));
    Ok(TruncatedKernel {
        degree_bound: d,
        basis,
        touches_boundary,
    })
}

/// Linear span membership over F_p.
pub fn span_contains(span: &[Poly], f: &Poly) -> bool {
    if f.is_zero() {
        return true;
    }
    let ring = f.ring();
    let mut mono_index: HashMap<ExponentVec, usize> = HashMap::new();
    let mut count = 0usize;
    for g in span.iter().chain(std::iter::once(f)) {
        for (e, _) in g.terms() {
            if !mono_index.contains_key(e) {
                mono_index.insert(e.clone(), count);
                count += 1;
            }
        }
    }
    let fill = |polys: &[&Poly]| {
        let mut m = FpMatrix::zeros(polys.len(), count, ring.p());
        for (i, g) in polys.iter().enumerate() {
            for (e, c) in g.terms() {
                m.set(i, mono_index[e], c as i64);
            }
        }
        m
    };
    let span_refs: Vec<&Poly> = span.iter().collect();
    let base_rank = fill(&span_refs).rank();
    let mut with_f = span_refs;
    with_f.push(f);
    fill(&with_f).rank() == base_rank
}

/// Solve f = Σ c_i·span_i over F_p; returns the coefficient vector of one
/// solution (free coordinates zero), or None when f is outside the span.
pub fn span_solve(span: &[Poly], f: &Poly) -> Option<Vec<u64>> {
    let ring = f.ring();
    let mut mono_index: HashMap<ExponentVec, usize> = HashMap::new();
    let mut count = 0usize;
    for g in span.iter().chain(std::iter::once(f)) {
        for (e, _) in g.terms() {
            if !mono_index.contains_key(e) {
                mono_index.insert(e.clone(), count);
                count += 1;
            }
        }
    }
    // augmented system [A | f] with columns indexed by span members
    let mut m = FpMatrix::zeros(count, span.len() + 1, ring.p());
    for (j, g) in span.iter().enumerate() {
        for (e, c) in g.terms() {
            m.set(mono_index[e], j, c as i64);
        }
    }
    for (e, c) in f.terms() {
        m.set(mono_index[e], span.len(), c as i64);
    }
    let pivots = m.rref();
    if pivots.contains(&span.len()) {
        return None;
    }
    let mut solution = vec![0u64; span.len()];
    for (row, &col) in pivots.iter().enumerate() {
        solution[col] = m.get(row, span.len());
    }
    Some(solution)
}

/// All products of the generators with total degree ≤ d (total degree is
/// additive, so exponent tuples are bounded by Σ a_i·deg(g_i) ≤ d), plus
/// the empty product 1.
fn bounded_products(gens: &[Poly], d: i64) -> Result<Vec<Poly>> {
    let ring = gens
        .first()
        .map(|g| g.ring().clone())
        .expect("at least one generator");
    let positive: Vec<&Poly> = gens
        .iter()
        .filter(|g| g.total_degree().map(|k| k > 0).unwrap_or(false))
        .collect();
    let mut out = vec![Poly::constant(&ring, 1)];
    fn rec(
        out: &mut Vec<Poly>,
        gens: &[&Poly],
        pos: usize,
        acc: &Poly,
        left: i64,
    ) -> Result<()> {
        if pos == gens.len() {
            return Ok(());
        }
        rec(out, gens, pos + 1, acc, left)?;
        let deg = gens[pos].total_degree().unwrap();
        let mut power = acc.clone();
        let mut used = 0;
        while used + deg <= left {
            power = power.mul(gens[pos])?;
            used += deg;
            out.push(power.clone());
            rec(out, gens, pos + 1, &power, left - used)?;
        }
        Ok(())
    }
    let acc = Poly::constant(&ring, 1);
    rec(&mut out, &positive, 0, &acc, d.max(0))?;
    Ok(out)
}

/// True iff f lies in the F_p-span of products of the generators of total
/// degree ≤ d.
pub fn subalgebra_member_truncated(f: &Poly, gens: &[Poly], d: i64) -> Result<bool> {
    if f.total_degree().unwrap_or(0) > d {
        return Err(EngineError::Precondition(
            "membership degree bound below deg f".into(),
        ));
    }
    let products = bounded_products(gens, d)?;
    Ok(span_contains(&products, f))
}

/// Report from a generator-certification run.
#[derive(Debug, Clone)]
pub struct CertifyReport {
    pub pass: bool,
    pub kernel_dim: usize,
    pub degree_bound: i64,
    pub touches_boundary: bool,
    /// First kernel element missing from the claimed subalgebra, if any.
    pub failing_witness: Option<Poly>,
}

/// Verify that the claimed polynomials generate the constants up to the
/// truncation degree: every claimed element must be annihilated by every
/// derivation (precondition), and kernel ⊆ claimed-subalgebra is checked
/// one kernel basis element at a time.
pub fn certify_generators(
    gens_d: &[Derivation],
    claimed: &[Poly],
    d: i64,
) -> Result<CertifyReport> {
    for g in claimed {
        for dv in gens_d {
            if !dv.apply(g)?.is_zero() {
                return Err(EngineError::Precondition(format!(
                    "claimed generator {} is not a constant",
                    g
                )));
            }
        }
    }
    let kernel = kernel_truncated(gens_d, d)?;
    for f in &kernel.basis {
        if !subalgebra_member_truncated(f, claimed, d)? {
            return Ok(CertifyReport {
                pass: false,
                kernel_dim: kernel.dim(),
                degree_bound: d,
                touches_boundary: kernel.touches_boundary,
                failing_witness: Some(f.clone()),
            });
        }
    }
    Ok(CertifyReport {
        pass: true,
        kernel_dim: kernel.dim(),
        degree_bound: d,
        touches_boundary: kernel.touches_boundary,
        failing_witness: None,
    })
}

/// Substitute the assignment into the relation and test identical
/// vanishing. `images\[i\]` is the value of the i-th variable of the
/// relation's ring.
pub fn check_relation(relation: &Poly, target: &Ring, images: &[Poly]) -> Result<bool> {
    assert_eq!(
        relation.ring().p(),
        target.p(),
        "presentation rings must share the prime"
    );
    Ok(relation.substitute(target, images)?.is_zero())
}
