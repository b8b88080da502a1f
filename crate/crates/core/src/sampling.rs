//! Seeded random generators for the property suites: random polynomials,
//! commuting derivation pairs, and p-closed rank-1 generators vanishing at
//! the origin (built by scaling multiplicative or additive seeds, which
//! preserves p-closedness).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::derivation::Derivation;
use crate::linalg::FpMatrix;
use crate::poly::{monomials_up_to, Poly, Ring};
use crate::singularity::primitivity_check;

pub fn random_poly(rng: &mut ChaCha8Rng, ring: &Ring, max_deg: i64, terms: usize) -> Poly {
    let mons = monomials_up_to(ring, max_deg);
    let mut f = Poly::zero(ring);
    for _ in 0..terms {
        let e = mons[rng.random_range(0..mons.len())].clone();
        let c = rng.random_range(0..ring.p() as i64);
        f = f.add(&Poly::monomial(ring, e, c).unwrap());
    }
    f
}

/// Random polynomial with a nonzero constant term (a unit at the origin).
pub fn random_unit_poly(rng: &mut ChaCha8Rng, ring: &Ring, max_deg: i64, terms: usize) -> Poly {
    let c0 = rng.random_range(1..ring.p() as i64);
    let tail = random_poly(rng, ring, max_deg, terms);
    let adjust = c0 - tail.constant_coeff() as i64;
    tail.add(&Poly::constant(ring, adjust))
}

pub fn random_derivation(
    rng: &mut ChaCha8Rng,
    ring: &Ring,
    max_deg: i64,
    terms: usize,
) -> Derivation {
    let coeffs = (0..ring.nvars())
        .map(|_| random_poly(rng, ring, max_deg, terms))
        .collect();
    Derivation::new(ring, coeffs)
}

pub fn random_invertible_matrix(rng: &mut ChaCha8Rng, n: usize, p: u64) -> FpMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(0..p as i64)).collect())
            .collect();
        let m = FpMatrix::from_rows(&rows, p);
        if m.rank() == n {
            return m;
        }
    }
}

/// Random semisimple matrix with eigenvalues in F_p: a conjugated diagonal.
pub fn random_semisimple_matrix(rng: &mut ChaCha8Rng, n: usize, p: u64) -> FpMatrix {
    let s = random_invertible_matrix(rng, n, p);
    let mut diag = FpMatrix::zeros(n, n, p);
    for i in 0..n {
        diag.set(i, i, rng.random_range(0..p as i64));
    }
    s.mul(&diag).mul(&s.inverse())
}

/// A pair of commuting derivations: either supported on disjoint variables,
/// or constant multiples of a single derivation.
pub fn random_commuting_pair(
    rng: &mut ChaCha8Rng,
    ring: &Ring,
    max_deg: i64,
) -> (Derivation, Derivation) {
    let n = ring.nvars();
    assert!(n >= 2);
    if rng.random_bool(0.5) {
        // disjoint single-variable fields f(x_i)∂_i, g(x_j)∂_j
        let i = rng.random_range(0..n);
        let j = loop {
            let j = rng.random_range(0..n);
            if j != i {
                break j;
            }
        };
        let single_var = |rng: &mut ChaCha8Rng, var: usize| {
            let mut f = Poly::zero(ring);
            for _ in 0..2 {
                let e = rng.random_range(0..=max_deg);
                let mut exps = crate::poly::ExponentVec::zeros(n);
                exps.0[var] = e;
                f = f.add(
                    &Poly::monomial(ring, exps, rng.random_range(0..ring.p() as i64)).unwrap(),
                );
            }
            f
        };
        let mut c1 = vec![Poly::zero(ring); n];
        c1[i] = single_var(rng, i);
        let mut c2 = vec![Poly::zero(ring); n];
        c2[j] = single_var(rng, j);
        (Derivation::new(ring, c1), Derivation::new(ring, c2))
    } else {
        let d = random_derivation(rng, ring, max_deg, 2);
        let a = rng.random_range(0..ring.p() as i64);
        let b = rng.random_range(0..ring.p() as i64);
        (d.scale_const(a), d.scale_const(b))
    }
}

/// Random p-closed rank-1 generator vanishing at the origin and primitive
/// there, or None when the draw fails the primitivity probe. Construction:
/// scale a multiplicative seed (semisimple linear derivation) or an
/// additive seed by a random unit; Hochschild's identity keeps the result
/// p-closed.
pub fn random_p_closed_origin(rng: &mut ChaCha8Rng, ring: &Ring) -> Option<Derivation> {
    let p = ring.p();
    let n = ring.nvars();
    let unit = random_unit_poly(rng, ring, 2, 2);
    let seed = match rng.random_range(0..3u8) {
        0 => {
            // multiplicative linear seed
            let m = random_semisimple_matrix(rng, n, p);
            Derivation::linear(ring, &m)
        }
        1 => {
            // additive seed from power fields x_i^{a_i}∂_i with a_i ≠ 1 (p)
            let coeffs = (0..n)
                .map(|i| {
                    let mut a = rng.random_range(2..=p as i64 + 1);
                    if (a - 1) % p as i64 == 0 {
                        a += 1;
                    }
                    let mut e = crate::poly::ExponentVec::zeros(n);
                    e.0[i] = a;
                    Poly::monomial(ring, e, 1).unwrap()
                })
                .collect();
            Derivation::new(ring, coeffs)
        }
        _ => {
            if p >= 3 && n >= 2 {
                // additive seed with nilpotent nonzero linear part:
                // y∂x + x^p∂y (plus zero elsewhere)
                let mut coeffs = vec![Poly::zero(ring); n];
                coeffs[0] = Poly::var(ring, 1);
                let mut e = crate::poly::ExponentVec::zeros(n);
                e.0[0] = p as i64;
                coeffs[1] = Poly::monomial(ring, e, 1).unwrap();
                Derivation::new(ring, coeffs)
            } else {
                let m = random_semisimple_matrix(rng, n, p);
                Derivation::linear(ring, &m)
            }
        }
    };
    if seed.is_zero() {
        return None;
    }
    let candidate = seed.scale_poly(&unit).ok()?;
    if candidate.is_zero() || !candidate.vanishes_at(&vec![0; n]).ok()? {
        return None;
    }
    if primitivity_check(&candidate).is_err() {
        return None;
    }
    debug_assert!(candidate.classify().unwrap().is_p_closed());
    Some(candidate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn p_closed_generator_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for p in [2u64, 3, 5] {
            let ring = Ring::new(p, &["x", "y"]);
            let mut produced = 0;
            let mut attempts = 0;
            while produced < 30 && attempts < 500 {
                attempts += 1;
                if let Some(d) = random_p_closed_origin(&mut rng, &ring) {
                    produced += 1;
                    assert!(d.classify().unwrap().is_p_closed());
                    assert!(d.vanishes_at(&[0, 0]).unwrap());
                }
            }
            assert!(produced >= 30, "generator starved at p={p}");
        }
    }

    #[test]
    fn commuting_pairs_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        for p in [2u64, 3, 5] {
            let ring = Ring::new(p, &["x", "y"]);
            for _ in 0..20 {
                let (d1, d2) = random_commuting_pair(&mut rng, &ring, 2);
                assert!(d1.lie_bracket(&d2).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn unit_polys_are_units() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let ring = Ring::new(5, &["x", "y"]);
        for _ in 0..50 {
            let u = random_unit_poly(&mut rng, &ring, 2, 3);
            assert_ne!(u.constant_coeff(), 0);
        }
    }
}
