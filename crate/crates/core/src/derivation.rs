//! The derivation algebra on F_p\[x_1,…,x_n\]: application, Lie bracket,
//! p-th power, p-closedness classification and the group-scheme coaction
//! expansions.

use std::fmt;

use crate::error::{EngineError, Result};
use crate::field::FpScalar;
use crate::linalg::FpMatrix;
use crate::poly::{monomials_up_to, ExponentVec, Poly, Ring};

/// A vector field Σ f_i ∂/∂x_i, one coefficient polynomial per variable.
/// Frozen variables (used for the base directions of families) carry an
/// identically-zero coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    ring: Ring,
    coeffs: Vec<Poly>,
    frozen: Vec<bool>,
}

/// Outcome of the p-closedness test. A p-closed derivation satisfies
/// D^\[p\] = (num/den)·D; `den` is 1 whenever a polynomial multiplier exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PClosure {
    Additive,
    PClosed { num: Poly, den: Poly },
    NotPClosed,
}

/// Classification together with the computed witness D^\[p\].
#[derive(Debug, Clone)]
pub struct Classification {
    pub status: PClosure,
    pub witness: Derivation,
}

impl Classification {
    pub fn is_p_closed(&self) -> bool {
        !matches!(self.status, PClosure::NotPClosed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoactionKind {
    AlphaP,
    MuP,
}

impl Derivation {
    pub fn new(ring: &Ring, coeffs: Vec<Poly>) -> Derivation {
        Derivation::with_frozen(ring, coeffs, &[])
    }

    pub fn with_frozen(ring: &Ring, coeffs: Vec<Poly>, frozen: &[usize]) -> Derivation {
        assert_eq!(coeffs.len(), ring.nvars(), "one coefficient per variable");
        for c in &coeffs {
            assert!(c.ring() == ring, "coefficient outside the ring");
        }
        let mut fr = vec![false; ring.nvars()];
        for &i in frozen {
            fr[i] = true;
            assert!(
                coeffs[i].is_zero(),
                "frozen variable `{}` must have zero coefficient",
                ring.var_name(i)
            );
        }
        Derivation {
            ring: ring.clone(),
            coeffs,
            frozen: fr,
        }
    }

    pub fn zero(ring: &Ring) -> Derivation {
        Derivation::new(ring, vec![Poly::zero(ring); ring.nvars()])
    }

    /// Linear derivation attached to a matrix: the j-th coefficient is
    /// Σ_i M\[i\]\[j\]·x_i, so the induced endomorphism of the span of the
    /// variables is M in column convention.
    pub fn linear(ring: &Ring, m: &FpMatrix) -> Derivation {
        let n = ring.nvars();
        assert_eq!((m.rows, m.cols), (n, n));
        let coeffs = (0..n)
            .map(|j| {
                let mut f = Poly::zero(ring);
                for i in 0..n {
                    f = f.add(&Poly::var(ring, i).scale(m.get(i, j) as i64));
                }
                f
            })
            .collect();
        Derivation::new(ring, coeffs)
    }

    /// Σ λ_i x_i ∂/∂x_i with weights in F_p.
    pub fn diagonal(ring: &Ring, weights: &[i64]) -> Derivation {
        assert_eq!(weights.len(), ring.nvars());
        let coeffs = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Poly::var(ring, i).scale(w))
            .collect();
        Derivation::new(ring, coeffs)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn coeff(&self, i: usize) -> &Poly {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn frozen(&self) -> Vec<usize> {
        self.frozen
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn assert_compatible(&self, other: &Derivation) {
        assert!(self.ring == other.ring, "ring mismatch between derivations");
        assert_eq!(self.frozen, other.frozen, "frozen-variable mismatch");
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        self.assert_compatible(other);
        Derivation {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
            frozen: self.frozen.clone(),
        }
    }

    pub fn sub(&self, other: &Derivation) -> Derivation {
        self.assert_compatible(other);
        Derivation {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
            frozen: self.frozen.clone(),
        }
    }

    pub fn scale_const(&self, c: i64) -> Derivation {
        Derivation {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|f| f.scale(c)).collect(),
            frozen: self.frozen.clone(),
        }
    }

    pub fn scale_poly(&self, a: &Poly) -> Result<Derivation> {
        assert!(a.ring() == &self.ring);
        Ok(Derivation {
            ring: self.ring.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|f| f.mul(a))
                .collect::<Result<Vec<_>>>()?,
            frozen: self.frozen.clone(),
        })
    }

    /// Apply the derivation: D(f) = Σ f_i·∂f/∂x_i.
    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        assert!(f.ring() == &self.ring, "ring mismatch");
        let mut out = Poly::zero(&self.ring);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = out.add(&c.mul(&f.partial(i))?);
        }
        Ok(out)
    }

    /// Apply the derivation n times.
    pub fn apply_iterated(&self, f: &Poly, n: u64) -> Result<Poly> {
        let mut out = f.clone();
        for _ in 0..n {
            out = self.apply(&out)?;
        }
        Ok(out)
    }

    /// \[D1, D2\] = D1∘D2 − D2∘D1, determined by its values on coordinates.
    pub fn lie_bracket(&self, other: &Derivation) -> Result<Derivation> {
        self.assert_compatible(other);
        let coeffs = (0..self.ring.nvars())
            .map(|j| Ok(self.apply(&other.coeffs[j])?.sub(&other.apply(&self.coeffs[j])?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Derivation {
            ring: self.ring.clone(),
            coeffs,
            frozen: self.frozen.clone(),
        })
    }

    /// D^\[p\], the p-fold composition, computed literally on coordinates.
    /// In characteristic p the result is again a derivation, so its
    /// coordinate values determine it.
    pub fn p_power(&self) -> Result<Derivation> {
        let p = self.ring.p();
        let coeffs = (0..self.ring.nvars())
            .map(|j| self.apply_iterated(&Poly::var(&self.ring, j), p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Derivation {
            ring: self.ring.clone(),
            coeffs,
            frozen: self.frozen.clone(),
        })
    }

    /// Additive / p-closed / not-p-closed classification. p-closedness is a
    /// generic-point condition, so the multiplier is allowed to be the
    /// rational pair (num, den); cross-products D^\[p\]_i·D_j = D^\[p\]_j·D_i
    /// decide parallelism exactly over the domain.
    pub fn classify(&self) -> Result<Classification> {
        let w = self.p_power()?;
        if w.is_zero() {
            return Ok(Classification {
                status: PClosure::Additive,
                witness: w,
            });
        }
        let n = self.ring.nvars();
        for i in 0..n {
            for j in (i + 1)..n {
                let lhs = w.coeffs[i].mul(&self.coeffs[j])?;
                let rhs = w.coeffs[j].mul(&self.coeffs[i])?;
                if lhs != rhs {
                    return Ok(Classification {
                        status: PClosure::NotPClosed,
                        witness: w,
                    });
                }
            }
        }
        let i0 = match (0..n).find(|&i| !self.coeffs[i].is_zero()) {
            Some(i) => i,
            // D = 0 with w ≠ 0 is impossible; guard anyway.
            None => {
                return Ok(Classification {
                    status: PClosure::NotPClosed,
                    witness: w,
                })
            }
        };
        // If the multiplier is a polynomial, division succeeds at every
        // nonzero coordinate, so probing one is enough.
        let status = match w.coeffs[i0].exact_divide(&self.coeffs[i0])? {
            Some(q) => PClosure::PClosed {
                num: q,
                den: Poly::constant(&self.ring, 1),
            },
            None => PClosure::PClosed {
                num: w.coeffs[i0].clone(),
                den: self.coeffs[i0].clone(),
            },
        };
        if let PClosure::PClosed { num, den } = &status {
            // cross-identity num·D_i = den·D^[p]_i, forced by the pairwise
            // checks over a domain
            debug_assert!((0..n).all(|i| {
                num.mul(&self.coeffs[i]).unwrap() == den.mul(&w.coeffs[i]).unwrap()
            }));
        }
        Ok(Classification { status, witness: w })
    }

    /// Whether D^\[p\] = u·D with u a unit in the local ring at the point.
    /// The stored (num, den) pair need not be reduced; when both vanish at
    /// the point, the reduced fraction is recovered by exact linear algebra
    /// on the relation n·den = d·num.
    pub fn is_multiplicative_at(&self, point: &[i64]) -> Result<bool> {
        match self.classify()?.status {
            PClosure::Additive => Ok(false),
            PClosure::NotPClosed => Err(EngineError::Precondition(
                "multiplicativity test requires a p-closed derivation".into(),
            )),
            PClosure::PClosed { num, den } => {
                let nv = num.eval(point)?;
                let dv = den.eval(point)?;
                if !dv.is_zero() {
                    return Ok(!nv.is_zero());
                }
                if !nv.is_zero() {
                    // Pole of the reduced fraction at the point.
                    return Ok(false);
                }
                reduced_fraction_unit_at(&num, &den, point)
            }
        }
    }

    /// Multiplicative rescaling to an additive representative: with
    /// a = D(x)^{p-1}, the derivation a·D is additive.
    pub fn additive_rescale(&self, x: &Poly) -> Result<Derivation> {
        let dx = self.apply(x)?;
        if dx.is_zero() {
            return Err(EngineError::Precondition(
                "rescaling pivot must satisfy D(x) ≠ 0".into(),
            ));
        }
        if !self.classify()?.is_p_closed() {
            return Err(EngineError::Precondition(
                "additive rescaling requires a p-closed derivation".into(),
            ));
        }
        let a = dx.pow(self.ring.p() - 1)?;
        let out = self.scale_poly(&a)?;
        assert!(
            out.p_power()?.is_zero(),
            "rescaled derivation failed to be additive"
        );
        Ok(out)
    }

    /// (aD)^\[p\] − a^p·D^\[p\] − ((aD)^\[p−1\](a))·D; identically zero.
    pub fn hochschild_residual(&self, a: &Poly) -> Result<Derivation> {
        let p = self.ring.p();
        let ad = self.scale_poly(a)?;
        let lhs = ad.p_power()?;
        let t1 = self.p_power()?.scale_poly(&a.pow(p)?)?;
        let w = ad.apply_iterated(a, p - 1)?;
        let t2 = self.scale_poly(&w)?;
        Ok(lhs.sub(&t1).sub(&t2))
    }

    /// (D1+D2)^\[p\] − D1^\[p\] − D2^\[p\] for commuting inputs; identically zero.
    pub fn jacobson_commuting_residual(&self, other: &Derivation) -> Result<Derivation> {
        if !self.lie_bracket(other)?.is_zero() {
            return Err(EngineError::Precondition(
                "Jacobson residual requires commuting derivations".into(),
            ));
        }
        let sum = self.add(other).p_power()?;
        Ok(sum.sub(&self.p_power()?).sub(&other.p_power()?))
    }

    /// Coefficients of the coaction attached to D.
    ///
    /// For α_p (D^\[p\] = 0) the list is \[D^∘i(s)/i!\], the coefficients of
    /// t^i in O ⊗ k\[t\]/(t^p). For μ_p (D^\[p\] = D) the list holds s followed
    /// by the weight-space projections π_i(s) for i = 1,…,p−1, which are
    /// the coefficients in the basis {1, t−1, …, t^{p−1}−1} of k\[t\]/(t^p−1);
    /// equivalently s ↦ Σ_i π_i(s)·t^i is the Z/p-grading decomposition.
    pub fn coaction_expand(&self, s: &Poly, kind: CoactionKind) -> Result<Vec<Poly>> {
        let p = self.ring.p();
        match kind {
            CoactionKind::AlphaP => {
                if !self.p_power()?.is_zero() {
                    return Err(EngineError::Precondition(
                        "α_p coaction requires D^[p] = 0".into(),
                    ));
                }
                let mut out = Vec::with_capacity(p as usize);
                let mut iterate = s.clone();
                let mut factorial = FpScalar::one(p);
                out.push(s.clone());
                for i in 1..p {
                    iterate = self.apply(&iterate)?;
                    factorial = factorial.mul(&FpScalar::new(i as i64, p));
                    out.push(iterate.scale(factorial.inv().value() as i64));
                }
                Ok(out)
            }
            CoactionKind::MuP => {
                if self.p_power()? != *self {
                    return Err(EngineError::Precondition(
                        "μ_p coaction requires D^[p] = D exactly".into(),
                    ));
                }
                let mut out = Vec::with_capacity(p as usize);
                out.push(s.clone());
                for j in 1..p {
                    out.push(self.weight_projection(s, j as i64)?);
                }
                Ok(out)
            }
        }
    }

    /// Projection of s onto the weight-j eigenspace of a derivation with
    /// D^\[p\] = D, via the interpolation operator Π_{c≠j}(D − c)/(j − c).
    pub fn weight_projection(&self, s: &Poly, j: i64) -> Result<Poly> {
        let p = self.ring.p();
        let mut num = s.clone();
        let mut den = FpScalar::one(p);
        let jj = FpScalar::new(j, p);
        for c in 0..p {
            let cc = FpScalar::new(c as i64, p);
            if cc == jj {
                continue;
            }
            num = self.apply(&num)?.sub(&num.scale(c as i64));
            den = den.mul(&jj.sub(&cc));
        }
        Ok(num.scale(den.inv().value() as i64))
    }

    /// Coaction coefficients in the monomial basis 1, t, …, t^{p−1} of the
    /// Hopf algebra; used for the ring-homomorphism check.
    pub fn coaction_t_basis(&self, s: &Poly, kind: CoactionKind) -> Result<Vec<Poly>> {
        let p = self.ring.p();
        match kind {
            CoactionKind::AlphaP => self.coaction_expand(s, kind),
            CoactionKind::MuP => {
                if self.p_power()? != *self {
                    return Err(EngineError::Precondition(
                        "μ_p coaction requires D^[p] = D exactly".into(),
                    ));
                }
                (0..p as i64).map(|j| self.weight_projection(s, j)).collect()
            }
        }
    }

    /// Check that the coaction is multiplicative on the pair (s1, s2):
    /// expansion(s1·s2) = expansion(s1)·expansion(s2) in O ⊗ k\[t\]/(t^p)
    /// resp. O ⊗ k\[t\]/(t^p − 1).
    pub fn coaction_homomorphism_check(
        &self,
        s1: &Poly,
        s2: &Poly,
        kind: CoactionKind,
    ) -> Result<bool> {
        let p = self.ring.p() as usize;
        let e1 = self.coaction_t_basis(s1, kind)?;
        let e2 = self.coaction_t_basis(s2, kind)?;
        let prod_expansion = self.coaction_t_basis(&s1.mul(s2)?, kind)?;
        let mut conv = vec![Poly::zero(&self.ring); p];
        for (i, a) in e1.iter().enumerate() {
            for (j, b) in e2.iter().enumerate() {
                let idx = i + j;
                match kind {
                    CoactionKind::AlphaP => {
                        if idx < p {
                            conv[idx] = conv[idx].add(&a.mul(b)?);
                        }
                        // t^p = 0 truncates the rest
                    }
                    CoactionKind::MuP => {
                        let idx = idx % p;
                        conv[idx] = conv[idx].add(&a.mul(b)?);
                    }
                }
            }
        }
        Ok(conv == prod_expansion)
    }

    /// Generators {D(x_i)} of the fixed-locus ideal (the ideal generated by
    /// the whole image D(A), by the Leibniz rule). Zero coefficients and
    /// frozen variables are omitted.
    pub fn fixed_ideal_gens(&self) -> Vec<Poly> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, c)| !self.frozen[*i] && !c.is_zero())
            .map(|(_, c)| c.clone())
            .collect()
    }

    /// Reinterpret the coefficients over a ring with the same prime and
    /// variables (e.g. dropping or moving the Laurent slot); fails if a
    /// coefficient has exponents invalid in the target.
    pub fn cast_ring(&self, target: &Ring) -> Result<Derivation> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.cast_ring(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(Derivation {
            ring: target.clone(),
            coeffs,
            frozen: self.frozen.clone(),
        })
    }

    /// All coefficients vanish at the point.
    pub fn vanishes_at(&self, point: &[i64]) -> Result<bool> {
        for c in &self.coeffs {
            if !c.vanishes_at(point)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Order of vanishing at the origin: the minimal total degree over all
    /// terms of all coefficients. `None` for the zero derivation.
    pub fn vanishing_order(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .flat_map(|c| c.terms().map(|(e, _)| e.total_degree()))
            .min()
    }

    /// Rewrite in coordinates translated so that `point` becomes the
    /// origin: the coefficients become f_i(x + point).
    pub fn translate_to_origin(&self, point: &[i64]) -> Result<Derivation> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.shift_origin(point))
            .collect::<Result<Vec<_>>>()?;
        Ok(Derivation {
            ring: self.ring.clone(),
            coeffs,
            frozen: self.frozen.clone(),
        })
    }
}

/// Decide whether the reduced form of num/den has nonvanishing numerator
/// and denominator at the point, given that the presented pair both vanish
/// there. All pairs (n, d) with n·den = d·num are polynomial multiples of
/// the reduced pair, so it suffices to scan a nullspace basis of that
/// bilinear relation for a vector whose two halves are nonzero at the point.
fn reduced_fraction_unit_at(num: &Poly, den: &Poly, point: &[i64]) -> Result<bool> {
    let ring = num.ring().clone();
    let p = ring.p();
    for f in [num, den] {
        if (0..ring.nvars()).any(|i| f.var_valuation(i).map(|v| v < 0).unwrap_or(false)) {
            return Err(EngineError::Precondition(
                "pointwise multiplier reduction needs polynomial data; clear Laurent terms first"
                    .into(),
            ));
        }
    }
    let bound_n = num.total_degree().unwrap_or(0);
    let bound_d = den.total_degree().unwrap_or(0);
    let mons_n = monomials_up_to(&ring, bound_n);
    let mons_d = monomials_up_to(&ring, bound_d);
    // Row space: all monomials of any product appearing in n·den − d·num.
    let max_deg = (bound_n + bound_d).max(0);
    let rows = monomials_up_to(&ring, max_deg);
    let row_index: std::collections::HashMap<&ExponentVec, usize> =
        rows.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let cols = mons_n.len() + mons_d.len();
    let mut m = FpMatrix::zeros(rows.len(), cols, p);
    for (j, mu) in mons_n.iter().enumerate() {
        let prod = den.mul_monomial(mu)?;
        for (e, c) in prod.terms() {
            m.set(row_index[e], j, c as i64);
        }
    }
    for (j, nu) in mons_d.iter().enumerate() {
        let prod = num.mul_monomial(nu)?;
        for (e, c) in prod.terms() {
            m.set(row_index[e], mons_n.len() + j, -(c as i64));
        }
    }
    for v in m.nullspace() {
        let mut n_poly = Poly::zero(&ring);
        for (j, mu) in mons_n.iter().enumerate() {
            if v[j] != 0 {
                n_poly = n_poly.add(&Poly::monomial(&ring, mu.clone(), v[j] as i64)?);
            }
        }
        let mut d_poly = Poly::zero(&ring);
        for (j, nu) in mons_d.iter().enumerate() {
            let c = v[mons_n.len() + j];
            if c != 0 {
                d_poly = d_poly.add(&Poly::monomial(&ring, nu.clone(), c as i64)?);
            }
        }
        if n_poly.is_zero() && d_poly.is_zero() {
            continue;
        }
        if !n_poly.eval(point)?.is_zero() && !d_poly.eval(point)?.is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 (mod {})", self.ring.p());
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let dv = format!("d{}", self.ring.var_name(i));
            let one = Poly::constant(&self.ring, 1);
            if *c == one {
                parts.push(dv);
            } else if c.nterms() == 1 {
                parts.push(format!("{}*{}", c.to_string_bare(), dv));
            } else {
                parts.push(format!("({})*{}", c.to_string_bare(), dv));
            }
        }
        write!(f, "{} (mod {})", parts.join(" + "), self.ring.p())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ring2(p: u64) -> Ring {
        Ring::new(p, &["x", "y"])
    }

    fn pt(ring: &Ring, terms: &[(&[i64], i64)]) -> Poly {
        Poly::from_terms(ring, terms).unwrap()
    }

    /// x^p ∂x + y^p ∂y, the standard additive example.
    fn frobenius_field(p: u64) -> Derivation {
        let r = ring2(p);
        let e = p as i64;
        Derivation::new(
            &r,
            vec![pt(&r, &[(&[e, 0], 1)]), pt(&r, &[(&[0, e], 1)])],
        )
    }

    fn random_poly(rng: &mut ChaCha8Rng, ring: &Ring, max_deg: i64, terms: usize) -> Poly {
        let mons = monomials_up_to(ring, max_deg);
        let mut f = Poly::zero(ring);
        for _ in 0..terms {
            let e = mons[rng.random_range(0..mons.len())].clone();
            let c = rng.random_range(0..ring.p() as i64);
            f = f.add(&Poly::monomial(ring, e, c).unwrap());
        }
        f
    }

    #[test]
    fn apply_diagonal_on_monomials() {
        for p in [3u64, 5] {
            let r = ring2(p);
            for a in 0..p as i64 {
                for b in 0..p as i64 {
                    let d = Derivation::diagonal(&r, &[a, b]);
                    for (i, j) in [(1i64, 0i64), (0, 1), (2, 3), (1, 1)] {
                        let m = pt(&r, &[(&[i, j], 1)]);
                        let expected = m.scale(a * i + b * j);
                        assert_eq!(d.apply(&m).unwrap(), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn apply_kills_constants() {
        let r = ring2(5);
        let d = Derivation::diagonal(&r, &[1, 2]);
        assert!(d.apply(&Poly::constant(&r, 3)).unwrap().is_zero());
    }

    #[test]
    fn frobenius_field_annihilates_its_constants() {
        for p in [2u64, 3] {
            let r = ring2(p);
            let d = frobenius_field(p);
            let e = p as i64;
            let s = pt(&r, &[(&[e, 1], 1), (&[1, e], -1)]);
            assert!(d.apply(&s).unwrap().is_zero());
            assert!(d.apply(&pt(&r, &[(&[e, 0], 1)])).unwrap().is_zero());
        }
    }

    #[test]
    fn lie_bracket_cases() {
        let r = ring2(3);
        let ddx = Derivation::new(&r, vec![Poly::constant(&r, 1), Poly::zero(&r)]);
        let xdx = Derivation::new(&r, vec![Poly::var(&r, 0), Poly::zero(&r)]);
        assert_eq!(ddx.lie_bracket(&xdx).unwrap(), ddx);
        assert!(xdx.lie_bracket(&xdx).unwrap().is_zero());
        let ydy = Derivation::new(&r, vec![Poly::zero(&r), Poly::var(&r, 1)]);
        assert!(xdx.lie_bracket(&ydy).unwrap().is_zero());
    }

    #[test]
    fn p_power_diagonal_is_itself() {
        for p in [2u64, 3, 5] {
            let r = ring2(p);
            for a in 0..p as i64 {
                for b in 0..p as i64 {
                    let d = Derivation::diagonal(&r, &[a, b]);
                    assert_eq!(d.p_power().unwrap(), d);
                }
            }
        }
    }

    #[test]
    fn p_power_swap_char_two() {
        let r = ring2(2);
        let d = Derivation::new(&r, vec![Poly::var(&r, 1), Poly::var(&r, 0)]);
        let diag = Derivation::diagonal(&r, &[1, 1]);
        assert_eq!(d.p_power().unwrap(), diag);
    }

    #[test]
    fn p_power_additive_example() {
        for p in [2u64, 3, 5] {
            assert!(frobenius_field(p).p_power().unwrap().is_zero());
        }
    }

    #[test]
    fn classify_cases() {
        let r = ring2(3);
        let diag = Derivation::diagonal(&r, &[1, 1]);
        match diag.classify().unwrap().status {
            PClosure::PClosed { num, den } => {
                assert_eq!(num, Poly::constant(&r, 1));
                assert_eq!(den, Poly::constant(&r, 1));
            }
            s => panic!("expected p-closed, got {s:?}"),
        }

        let r2 = ring2(2);
        let swap = Derivation::new(&r2, vec![Poly::var(&r2, 1), Poly::var(&r2, 0)]);
        assert!(matches!(
            swap.classify().unwrap().status,
            PClosure::NotPClosed
        ));

        for p in [2u64, 3, 5] {
            let rp = ring2(p);
            let d = Derivation::new(&rp, vec![pt(&rp, &[(&[2, 0], 1)]), Poly::zero(&rp)]);
            assert!(matches!(d.classify().unwrap().status, PClosure::Additive));
        }
    }

    #[test]
    fn classify_scaling_keeps_status_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3, 5] {
            let r = ring2(p);
            let d = Derivation::diagonal(&r, &[1, (p as i64) - 1]);
            for lambda in 1..p as i64 {
                let scaled = d.scale_const(lambda);
                assert!(scaled.classify().unwrap().is_p_closed());
            }
            // additive stays p-closed under constant scaling too
            let add = frobenius_field(p);
            let lambda = rng.random_range(1..p as i64);
            assert!(matches!(
                add.scale_const(lambda).classify().unwrap().status,
                PClosure::Additive
            ));
        }
    }

    #[test]
    fn multiplicative_at_point() {
        let r = ring2(3);
        let diag = Derivation::diagonal(&r, &[1, 1]);
        assert!(diag.is_multiplicative_at(&[0, 0]).unwrap());

        let sq = Derivation::new(&r, vec![pt(&r, &[(&[2, 0], 1)]), Poly::zero(&r)]);
        assert!(!sq.is_multiplicative_at(&[0, 0]).unwrap());

        let r2 = ring2(2);
        let swap = Derivation::new(&r2, vec![Poly::var(&r2, 1), Poly::var(&r2, 0)]);
        assert!(swap.is_multiplicative_at(&[0, 0]).is_err());
    }

    #[test]
    fn multiplicative_is_representative_dependent() {
        // On k[x, x^-1] the module generated by ∂x equals the one generated
        // by x∂x, yet the classification differs per representative.
        let r = Ring::with_laurent(3, &["x"], "x");
        let xdx = Derivation::new(&r, vec![Poly::var(&r, 0)]);
        assert!(xdx.is_multiplicative_at(&[1]).unwrap());
        let ddx = Derivation::new(&r, vec![Poly::constant(&r, 1)]);
        assert!(!ddx.is_multiplicative_at(&[1]).unwrap());
    }

    #[test]
    fn multiplicative_with_unreduced_fraction() {
        // u·∂_{1,2} with u a unit at the origin: the multiplier of the
        // presented pair has numerator and denominator both vanishing at 0,
        // but the reduced fraction is a unit there.
        let p = 3;
        let r = ring2(p);
        let u = Poly::constant(&r, 1).add(&Poly::var(&r, 0));
        let d0 = Derivation::diagonal(&r, &[1, 2]);
        let d = d0.scale_poly(&u).unwrap();
        assert!(d.is_multiplicative_at(&[0, 0]).unwrap());
        // additive seed scaled by a unit stays non-multiplicative
        let add = frobenius_field(p).scale_poly(&u).unwrap();
        assert!(!add.is_multiplicative_at(&[0, 0]).unwrap());
    }

    #[test]
    fn additive_rescale_examples() {
        for p in [2u64, 3] {
            let r = ring2(p);
            let xdx = Derivation::new(&r, vec![Poly::var(&r, 0), Poly::zero(&r)]);
            let rescaled = xdx.additive_rescale(&Poly::var(&r, 0)).unwrap();
            let expected = Derivation::new(
                &r,
                vec![pt(&r, &[(&[p as i64, 0], 1)]), Poly::zero(&r)],
            );
            assert_eq!(rescaled, expected);
        }

        // x·∂_{1,1} at p = 2, verified additive by two applications
        let r = ring2(2);
        let diag = Derivation::diagonal(&r, &[1, 1]);
        let rescaled = diag.additive_rescale(&Poly::var(&r, 0)).unwrap();
        let expected = Derivation::new(
            &r,
            vec![pt(&r, &[(&[2, 0], 1)]), pt(&r, &[(&[1, 1], 1)])],
        );
        assert_eq!(rescaled, expected);

        let ddx = Derivation::new(&r, vec![Poly::constant(&r, 1), Poly::zero(&r)]);
        assert!(ddx.additive_rescale(&Poly::var(&r, 1)).is_err());
    }

    #[test]
    fn hochschild_vanishes() {
        let r2 = ring2(2);
        let ddx = Derivation::new(&r2, vec![Poly::constant(&r2, 1), Poly::zero(&r2)]);
        assert!(ddx.hochschild_residual(&Poly::var(&r2, 0)).unwrap().is_zero());

        let r3 = ring2(3);
        let d = Derivation::diagonal(&r3, &[1, 2]);
        assert!(d
            .hochschild_residual(&Poly::constant(&r3, 1))
            .unwrap()
            .is_zero());

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [2u64, 3] {
            let r = ring2(p);
            for _ in 0..20 {
                let a = random_poly(&mut rng, &r, 2, 3);
                let d = Derivation::new(
                    &r,
                    vec![
                        random_poly(&mut rng, &r, 1, 2),
                        random_poly(&mut rng, &r, 1, 2),
                    ],
                );
                assert!(d.hochschild_residual(&a).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn jacobson_vanishes() {
        let r3 = ring2(3);
        let xdx = Derivation::new(&r3, vec![Poly::var(&r3, 0), Poly::zero(&r3)]);
        let ydy = Derivation::new(&r3, vec![Poly::zero(&r3), Poly::var(&r3, 1)]);
        assert!(xdx.jacobson_commuting_residual(&ydy).unwrap().is_zero());

        let r2 = ring2(2);
        let ddx = Derivation::new(&r2, vec![Poly::constant(&r2, 1), Poly::zero(&r2)]);
        let ddy = Derivation::new(&r2, vec![Poly::zero(&r2), Poly::constant(&r2, 1)]);
        assert!(ddx.jacobson_commuting_residual(&ddy).unwrap().is_zero());

        // D + D = 2D, and (2D)^[p] = 2^p D^[p] = 2 D^[p]
        assert!(xdx.jacobson_commuting_residual(&xdx).unwrap().is_zero());

        // non-commuting inputs are rejected
        let ydx = Derivation::new(&r3, vec![Poly::var(&r3, 1), Poly::zero(&r3)]);
        assert!(xdx.jacobson_commuting_residual(&ydx).is_err());
    }

    #[test]
    fn coaction_alpha_taylor() {
        let r = ring2(3);
        let ddx = Derivation::new(&r, vec![Poly::constant(&r, 1), Poly::zero(&r)]);
        let out = ddx
            .coaction_expand(&Poly::var(&r, 0), CoactionKind::AlphaP)
            .unwrap();
        assert_eq!(out[0], Poly::var(&r, 0));
        assert_eq!(out[1], Poly::constant(&r, 1));
        assert!(out[2].is_zero());
        // precondition: multiplicative input rejected for α_p
        let xdx = Derivation::new(&r, vec![Poly::var(&r, 0), Poly::zero(&r)]);
        assert!(xdx
            .coaction_expand(&Poly::var(&r, 0), CoactionKind::AlphaP)
            .is_err());
    }

    #[test]
    fn coaction_mu_realizes_scaling() {
        // x∂x sends x to x·t: in the basis {1, t−1, t^2−1, …} this reads
        // x + x·(t−1).
        for p in [2u64, 3, 5] {
            let r = ring2(p);
            let xdx = Derivation::new(&r, vec![Poly::var(&r, 0), Poly::zero(&r)]);
            let out = xdx
                .coaction_expand(&Poly::var(&r, 0), CoactionKind::MuP)
                .unwrap();
            assert_eq!(out[0], Poly::var(&r, 0));
            assert_eq!(out[1], Poly::var(&r, 0));
            for c in &out[2..] {
                assert!(c.is_zero());
            }
            // t-basis form is exactly x·t
            let tb = xdx
                .coaction_t_basis(&Poly::var(&r, 0), CoactionKind::MuP)
                .unwrap();
            assert!(tb[0].is_zero());
            assert_eq!(tb[1], Poly::var(&r, 0));
        }
    }

    #[test]
    fn coaction_homomorphism() {
        let p = 3;
        let r = ring2(p);
        let x = Poly::var(&r, 0);
        let x2 = x.mul(&x).unwrap();
        let xdx = Derivation::new(&r, vec![x.clone(), Poly::zero(&r)]);
        assert!(xdx
            .coaction_homomorphism_check(&x, &x, CoactionKind::MuP)
            .unwrap());
        assert!(xdx
            .coaction_homomorphism_check(&x2, &x, CoactionKind::MuP)
            .unwrap());
        let add = frobenius_field(p);
        let y = Poly::var(&r, 1);
        assert!(add
            .coaction_homomorphism_check(&x, &y, CoactionKind::AlphaP)
            .unwrap());
        assert!(add
            .coaction_homomorphism_check(&x2, &x2, CoactionKind::AlphaP)
            .unwrap());
    }

    #[test]
    fn fixed_ideal_generators() {
        let r = ring2(5);
        let d = Derivation::diagonal(&r, &[2, 3]);
        let gens = d.fixed_ideal_gens();
        assert_eq!(gens, vec![Poly::var(&r, 0).scale(2), Poly::var(&r, 1).scale(3)]);

        let ddx = Derivation::new(&r, vec![Poly::constant(&r, 1), Poly::zero(&r)]);
        assert_eq!(ddx.fixed_ideal_gens(), vec![Poly::constant(&r, 1)]);

        let p = 3i64;
        let rf = Ring::new(3, &["x", "y", "z", "t"]);
        let fam = Derivation::with_frozen(
            &rf,
            vec![
                Poly::from_terms(&rf, &[(&[p, 0, 0, 0], 1)]).unwrap(),
                Poly::from_terms(&rf, &[(&[0, p, 0, 0], 1)]).unwrap(),
                Poly::var(&rf, 3),
                Poly::zero(&rf),
            ],
            &[3],
        );
        let gens = fam.fixed_ideal_gens();
        assert_eq!(gens.len(), 3);
        assert_eq!(gens[2], Poly::var(&rf, 3));
    }

    #[test]
    fn leibniz_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for p in [2u64, 3, 5] {
            let r = ring2(p);
            for _ in 0..10 {
                let d = Derivation::new(
                    &r,
                    vec![
                        random_poly(&mut rng, &r, 2, 3),
                        random_poly(&mut rng, &r, 2, 3),
                    ],
                );
                let f = random_poly(&mut rng, &r, 2, 3);
                let g = random_poly(&mut rng, &r, 2, 3);
                let lhs = d.apply(&f.mul(&g).unwrap()).unwrap();
                let rhs = f
                    .mul(&d.apply(&g).unwrap())
                    .unwrap()
                    .add(&g.mul(&d.apply(&f).unwrap()).unwrap());
                assert_eq!(lhs, rhs);
                // p-th power is again a derivation: Leibniz for D^[p]
                let w = d.p_power().unwrap();
                let lhs = w.apply(&f.mul(&g).unwrap()).unwrap();
                let rhs = f
                    .mul(&w.apply(&g).unwrap())
                    .unwrap()
                    .add(&g.mul(&w.apply(&f).unwrap()).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn determined_by_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let r = ring2(3);
        let d1 = Derivation::new(&r, vec![pt(&r, &[(&[1, 1], 2)]), Poly::var(&r, 0)]);
        let d2 = Derivation::new(&r, vec![pt(&r, &[(&[1, 1], 2)]), Poly::var(&r, 0)]);
        for _ in 0..10 {
            let f = random_poly(&mut rng, &r, 3, 4);
            assert_eq!(d1.apply(&f).unwrap(), d2.apply(&f).unwrap());
        }
    }

    #[test]
    fn display_grammar() {
        let r = ring2(5);
        let d = Derivation::new(
            &r,
            vec![pt(&r, &[(&[2, 0], 1)]), pt(&r, &[(&[0, 2], 1)])],
        );
        assert_eq!(format!("{d}"), "x^2*dx + y^2*dy (mod 5)");
        let e = Derivation::new(
            &r,
            vec![Poly::var(&r, 0).add(&Poly::var(&r, 1)), Poly::constant(&r, 1)],
        );
        assert_eq!(format!("{e}"), "(x + y)*dx + dy (mod 5)");
    }
}
