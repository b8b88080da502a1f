//! Sparse multivariate polynomials over F_p with named variables.
//!
//! Polynomials are maps from exponent vectors to nonzero coefficients, kept
//! in graded-lexicographic order so equal polynomials have identical
//! representations. One designated variable per ring may carry negative
//! exponents (the Laurent slot); blow-up pullbacks introduce poles only
//! along the exceptional coordinate, so a single slot suffices.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{EngineError, Result};
use crate::field::{is_prime, FpScalar};

#[derive(Debug, PartialEq, Eq)]
struct RingInner {
    p: u64,
    vars: Vec<String>,
    laurent: Option<usize>,
    degree_cap: i64,
}

/// Shared ring descriptor: ordered variable names, the prime modulus, an
/// optional Laurent slot and the total-degree cap (default 10p).
#[derive(Debug, Clone)]
pub struct Ring(Arc<RingInner>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Ring {}

pub fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Ring {
    pub fn new(p: u64, vars: &[&str]) -> Ring {
        Ring::build(p, vars, None, 10 * p as i64)
    }

    pub fn with_laurent(p: u64, vars: &[&str], laurent_var: &str) -> Ring {
        let idx = vars
            .iter()
            .position(|v| *v == laurent_var)
            .unwrap_or_else(|| panic!("Laurent variable `{laurent_var}` not in ring"));
        Ring::build(p, vars, Some(idx), 10 * p as i64)
    }

    fn build(p: u64, vars: &[&str], laurent: Option<usize>, degree_cap: i64) -> Ring {
        assert!(is_prime(p), "modulus {p} is not prime");
        for v in vars {
            assert!(valid_identifier(v), "invalid variable name `{v}`");
        }
        for (i, v) in vars.iter().enumerate() {
            assert!(
                !vars[i + 1..].contains(v),
                "duplicate variable name `{v}`"
            );
        }
        Ring(Arc::new(RingInner {
            p,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            laurent,
            degree_cap,
        }))
    }

    /// Same ring with the Laurent slot moved to `var`.
    pub fn laurent_in(&self, var: usize) -> Ring {
        assert!(var < self.nvars());
        Ring(Arc::new(RingInner {
            p: self.p(),
            vars: self.0.vars.clone(),
            laurent: Some(var),
            degree_cap: self.0.degree_cap,
        }))
    }

    /// Same ring without a Laurent slot.
    pub fn polynomial_ring(&self) -> Ring {
        Ring(Arc::new(RingInner {
            p: self.p(),
            vars: self.0.vars.clone(),
            laurent: None,
            degree_cap: self.0.degree_cap,
        }))
    }

    pub fn with_degree_cap(&self, cap: i64) -> Ring {
        Ring(Arc::new(RingInner {
            p: self.p(),
            vars: self.0.vars.clone(),
            laurent: self.0.laurent,
            degree_cap: cap,
        }))
    }

    /// Ring over the same prime restricted to a subset of the variables.
    pub fn restrict(&self, keep: &[usize]) -> Ring {
        let vars: Vec<&str> = keep.iter().map(|&i| self.var_name(i)).collect();
        Ring::build(self.p(), &vars, None, self.0.degree_cap)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn var_name(&self, idx: usize) -> &str {
        &self.0.vars[idx]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    pub fn laurent_slot(&self) -> Option<usize> {
        self.0.laurent
    }

    pub fn degree_cap(&self) -> i64 {
        self.0.degree_cap
    }

    fn check_exponents(&self, exps: &ExponentVec) -> Result<()> {
        assert_eq!(exps.0.len(), self.nvars(), "exponent length mismatch");
        for (i, &e) in exps.0.iter().enumerate() {
            if e < 0 && self.0.laurent != Some(i) {
                return Err(EngineError::LaurentViolation {
                    var: self.var_name(i).to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Exponent vector of a monomial, ordered graded-lexicographically:
/// higher total degree first, ties broken by the earlier variable's
/// exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVec(pub Vec<i64>);

impl ExponentVec {
    pub fn zeros(n: usize) -> Self {
        ExponentVec(vec![0; n])
    }

    pub fn unit(n: usize, idx: usize) -> Self {
        let mut v = vec![0; n];
        v[idx] = 1;
        ExponentVec(v)
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &ExponentVec) -> ExponentVec {
        ExponentVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &ExponentVec) -> ExponentVec {
        ExponentVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &ExponentVec) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for ExponentVec {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                for (a, b) in self.0.iter().zip(&other.0) {
                    if a != b {
                        return a.cmp(b);
                    }
                }
                std::cmp::Ordering::Equal
            })
    }
}

impl PartialOrd for ExponentVec {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial over F_p. Invariants: no stored zero coefficients, all
/// coefficients reduced mod p, exponents valid for the ring's Laurent slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    ring: Ring,
    terms: BTreeMap<ExponentVec, u64>,
}

impl Poly {
    pub fn zero(ring: &Ring) -> Poly {
        Poly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, c: i64) -> Poly {
        let v = FpScalar::new(c, ring.p()).value();
        let mut terms = BTreeMap::new();
        if v != 0 {
            terms.insert(ExponentVec::zeros(ring.nvars()), v);
        }
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn var(ring: &Ring, idx: usize) -> Poly {
        assert!(idx < ring.nvars());
        let mut terms = BTreeMap::new();
        terms.insert(ExponentVec::unit(ring.nvars(), idx), 1);
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn monomial(ring: &Ring, exps: ExponentVec, coeff: i64) -> Result<Poly> {
        ring.check_exponents(&exps)?;
        let c = FpScalar::new(coeff, ring.p()).value();
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(exps, c);
        }
        Ok(Poly {
            ring: ring.clone(),
            terms,
        })
    }

    pub fn from_terms(ring: &Ring, list: &[(&[i64], i64)]) -> Result<Poly> {
        let mut acc = Poly::zero(ring);
        for (exps, c) in list {
            let ev = ExponentVec(exps.to_vec());
            acc = acc.add(&Poly::monomial(ring, ev, *c)?);
        }
        Ok(acc)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVec, u64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coeff(&self, exps: &ExponentVec) -> u64 {
        self.terms.get(exps).copied().unwrap_or(0)
    }

    pub fn constant_coeff(&self) -> u64 {
        self.coeff(&ExponentVec::zeros(self.ring.nvars()))
    }

    /// Maximal total degree over the terms; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| e.total_degree()).max()
    }

    pub fn leading(&self) -> Option<(&ExponentVec, u64)> {
        self.terms.iter().next_back().map(|(e, &c)| (e, c))
    }

    fn assert_same_ring(&self, other: &Poly) {
        assert!(
            self.ring == other.ring,
            "ring mismatch: {:?} vs {:?}",
            self.ring.vars(),
            other.ring.vars()
        );
    }

    fn insert_term(&mut self, exps: ExponentVec, c: u64) {
        if c == 0 {
            return;
        }
        let p = self.ring.p();
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = (o.get() + c) % p;
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c % p);
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.assert_same_ring(other);
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.insert_term(e.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let p = self.ring.p();
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| (e.clone(), (p - c) % p))
                .filter(|(_, c)| *c != 0)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: i64) -> Poly {
        let s = FpScalar::new(c, self.ring.p());
        if s.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, &v)| (e.clone(), (v * s.value()) % self.ring.p()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.assert_same_ring(other);
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.ring));
        }
        // Total degree is additive over a domain, so the cap can be
        // enforced before any term products are formed.
        let deg = self.total_degree().unwrap() + other.total_degree().unwrap();
        let cap = self.ring.degree_cap();
        if deg > cap {
            return Err(EngineError::DegreeCapExceeded { degree: deg, cap });
        }
        let p = self.ring.p();
        let mut out = Poly::zero(&self.ring);
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                out.insert_term(e1.add(e2), (c1 * c2) % p);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u64) -> Result<Poly> {
        let mut acc = Poly::constant(&self.ring, 1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Formal partial derivative; exponents divisible by p contribute zero.
    pub fn partial(&self, var: usize) -> Poly {
        assert!(var < self.ring.nvars());
        let p = self.ring.p();
        let mut out = Poly::zero(&self.ring);
        for (e, &c) in &self.terms {
            let k = e.0[var];
            if k == 0 {
                continue;
            }
            let factor = FpScalar::new(k, p);
            if factor.is_zero() {
                continue;
            }
            let mut ne = e.clone();
            ne.0[var] -= 1;
            out.insert_term(ne, (c * factor.value()) % p);
        }
        out
    }

    /// Inverse of a single-term polynomial, in a ring where the inverted
    /// exponents are representable.
    pub fn monomial_inverse(&self) -> Result<Poly> {
        if self.terms.len() != 1 {
            return Err(EngineError::Precondition(
                "only single-term polynomials are invertible".into(),
            ));
        }
        let (e, c) = self.leading().unwrap();
        let inv_exp = ExponentVec(e.0.iter().map(|&x| -x).collect());
        let inv_c = FpScalar::new(c as i64, self.ring.p()).inv();
        Poly::monomial(&self.ring, inv_exp, inv_c.value() as i64)
    }

    /// Ring-homomorphic substitution into `target`: variable i of `self`'s
    /// ring maps to `images\[i\]`. Negative source exponents require the image
    /// to be an invertible single term.
    pub fn substitute(&self, target: &Ring, images: &[Poly]) -> Result<Poly> {
        assert_eq!(images.len(), self.ring.nvars(), "one image per variable");
        for img in images {
            assert!(img.ring() == target, "image outside target ring");
        }
        let mut out = Poly::zero(target);
        for (e, &c) in &self.terms {
            let mut term = Poly::constant(target, c as i64);
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let factor = if k > 0 {
                    images[i].pow(k as u64)?
                } else {
                    images[i].monomial_inverse()?.pow((-k) as u64)?
                };
                term = term.mul(&factor)?;
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Substitution within the same ring, by variable index map.
    pub fn substitute_self(&self, images: &[Poly]) -> Result<Poly> {
        self.substitute(&self.ring.clone(), images)
    }

    /// Reinterpret over a ring with the same prime and variables but a
    /// possibly different Laurent slot; fails if an exponent is invalid in
    /// the target.
    pub fn cast_ring(&self, target: &Ring) -> Result<Poly> {
        assert_eq!(self.ring.p(), target.p(), "cast across primes");
        assert_eq!(self.ring.vars(), target.vars(), "cast across variable sets");
        for e in self.terms.keys() {
            target.check_exponents(e)?;
        }
        Ok(Poly {
            ring: target.clone(),
            terms: self.terms.clone(),
        })
    }

    /// Move the given point to the origin: x_i ↦ x_i + point_i.
    pub fn shift_origin(&self, point: &[i64]) -> Result<Poly> {
        assert_eq!(point.len(), self.ring.nvars());
        let images: Vec<Poly> = (0..self.ring.nvars())
            .map(|i| Poly::var(&self.ring, i).add(&Poly::constant(&self.ring, point[i])))
            .collect();
        self.substitute_self(&images)
    }

    /// Evaluate at an F_p-rational point. Negative exponents require the
    /// corresponding coordinate to be nonzero.
    pub fn eval(&self, point: &[i64]) -> Result<FpScalar> {
        assert_eq!(point.len(), self.ring.nvars());
        let p = self.ring.p();
        let coords: Vec<FpScalar> = point.iter().map(|&c| FpScalar::new(c, p)).collect();
        let mut acc = FpScalar::zero(p);
        for (e, &c) in &self.terms {
            let mut t = FpScalar::new(c as i64, p);
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if k > 0 {
                    t = t.mul(&coords[i].pow(k as u64));
                } else {
                    if coords[i].is_zero() {
                        return Err(EngineError::DivisionByZero);
                    }
                    t = t.mul(&coords[i].inv().pow((-k) as u64));
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    pub fn vanishes_at(&self, point: &[i64]) -> Result<bool> {
        Ok(self.eval(point)?.is_zero())
    }

    /// Minimal exponent of `var` over all terms; `None` means +∞ (zero
    /// polynomial).
    pub fn var_valuation(&self, var: usize) -> Option<i64> {
        self.terms.keys().map(|e| e.0[var]).min()
    }

    /// Multiply by a bare monomial x^exps (exps may be negative in the
    /// Laurent slot).
    pub fn mul_monomial(&self, exps: &ExponentVec) -> Result<Poly> {
        let mut out = Poly::zero(&self.ring);
        for (e, &c) in &self.terms {
            let ne = e.add(exps);
            self.ring.check_exponents(&ne)?;
            out.insert_term(ne, c);
        }
        Ok(out)
    }

    /// Exact division in the principal ideal (g): returns Some(q) with
    /// f = q·g when f ∈ (g), None otherwise. A single divisor under the
    /// graded-lex order is complete for principal ideals.
    pub fn exact_divide(&self, g: &Poly) -> Result<Option<Poly>> {
        self.assert_same_ring(g);
        if g.is_zero() {
            return Err(EngineError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Some(Poly::zero(&self.ring)));
        }
        // Clear Laurent denominators so the division loop runs over honest
        // polynomials, where graded-lex is a well-order.
        let (f_sh, g_sh, shift) = match self.ring.laurent_slot() {
            Some(l) => {
                let va = self.var_valuation(l).unwrap();
                let vb = g.var_valuation(l).unwrap();
                let mut down_a = ExponentVec::zeros(self.ring.nvars());
                down_a.0[l] = -va;
                let mut down_b = ExponentVec::zeros(self.ring.nvars());
                down_b.0[l] = -vb;
                let mut back = ExponentVec::zeros(self.ring.nvars());
                back.0[l] = va - vb;
                (
                    self.mul_monomial(&down_a)?,
                    g.mul_monomial(&down_b)?,
                    Some(back),
                )
            }
            None => (self.clone(), g.clone(), None),
        };
        let p = self.ring.p();
        let (g_lead, g_lc) = g_sh.leading().unwrap();
        let g_lead = g_lead.clone();
        let g_lc_inv = FpScalar::new(g_lc as i64, p).inv();
        let mut rem = f_sh;
        let mut quot = Poly::zero(&self.ring);
        while let Some((r_lead, r_lc)) = rem.leading() {
            let q_exp = r_lead.sub(&g_lead);
            if q_exp.0.iter().any(|&e| e < 0) {
                return Ok(None);
            }
            let q_c = (r_lc * g_lc_inv.value()) % p;
            let q_term = Poly::monomial(&self.ring, q_exp, q_c as i64)?;
            quot = quot.add(&q_term);
            rem = rem.sub(&q_term.mul(&g_sh)?);
        }
        match shift {
            Some(back) if !back.is_constant() => Ok(Some(quot.mul_monomial(&back)?)),
            _ => Ok(Some(quot)),
        }
    }

    /// Membership in the monomial ideal generated by `gens`: every term of
    /// `self` must be divisible by some generator.
    pub fn monomial_ideal_member(&self, gens: &[Poly]) -> Result<bool> {
        let mut gen_exps = Vec::with_capacity(gens.len());
        for g in gens {
            self.assert_same_ring(g);
            if g.nterms() != 1 {
                return Err(EngineError::Precondition(
                    "monomial ideal generators must be single terms".into(),
                ));
            }
            gen_exps.push(g.leading().unwrap().0.clone());
        }
        Ok(self
            .terms
            .keys()
            .all(|e| gen_exps.iter().any(|g| g.divides(e))))
    }

    /// Exponent-wise formatting without the modulus suffix.
    pub fn to_string_bare(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, &c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            if c != 1 || e.is_constant() {
                factors.push(c.to_string());
            }
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if k == 1 {
                    factors.push(self.ring.var_name(i).to_string());
                } else {
                    factors.push(format!("{}^{}", self.ring.var_name(i), k));
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.to_string_bare(), self.ring.p())
    }
}

/// All monomial exponent vectors of total degree ≤ d with nonnegative
/// entries, in ascending graded-lex order.
pub fn monomials_up_to(ring: &Ring, d: i64) -> Vec<ExponentVec> {
    let n = ring.nvars();
    let mut out = Vec::new();
    let mut current = vec![0i64; n];
    fn rec(out: &mut Vec<ExponentVec>, current: &mut Vec<i64>, pos: usize, left: i64) {
        if pos == current.len() {
            out.push(ExponentVec(current.clone()));
            return;
        }
        for e in 0..=left {
            current[pos] = e;
            rec(out, current, pos + 1, left - e);
        }
        current[pos] = 0;
    }
    rec(&mut out, &mut current, 0, d.max(0));
    out.sort();
    out
}

/// Largest monomial dividing every term of every listed polynomial; zero
/// entries are ignored by convention, all-zero input is rejected. In the
/// Laurent slot the minimum may be negative.
pub fn monomial_content(polys: &[Poly]) -> Result<ExponentVec> {
    let nonzero: Vec<&Poly> = polys.iter().filter(|f| !f.is_zero()).collect();
    let first = nonzero
        .first()
        .ok_or(EngineError::ZeroInput("monomial content input"))?;
    let n = first.ring().nvars();
    let mut content = vec![i64::MAX; n];
    for f in &nonzero {
        for (e, _) in f.terms() {
            for i in 0..n {
                content[i] = content[i].min(e.0[i]);
            }
        }
    }
    Ok(ExponentVec(content))
}
