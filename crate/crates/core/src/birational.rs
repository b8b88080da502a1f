//! Blow-up charts, derivation pullback, rank-1 saturation, divisor
//! invariance and per-divisor discrepancy extraction.
//!
//! A chart reuses the ambient variable names as coordinates: the map sends
//! x_i ↦ x_i · x_j^{w_i} where x_j is the chart variable cutting the
//! exceptional divisor (w_j = 0, standard blow-ups have w_i = 1 on the
//! center). Pullback coefficients may carry poles only along x_j, which is
//! exactly the Laurent slot of the source ring.

use std::fmt;

use crate::derivation::Derivation;
use crate::error::{EngineError, Result};
use crate::poly::{monomial_content, ExponentVec, Poly, Ring};

/// One affine chart of an (optionally weighted) blow-up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    ring: Ring,
    chart_var: usize,
    weights: Vec<i64>,
}

impl Chart {
    /// Standard blow-up of the coordinate subspace cut out by `center`,
    /// in the chart of `chart_var`.
    pub fn blowup(ring: &Ring, center: &[usize], chart_var: usize) -> Result<Chart> {
        if center.is_empty() {
            return Err(EngineError::Precondition("empty blow-up center".into()));
        }
        if !center.contains(&chart_var) {
            return Err(EngineError::Precondition(format!(
                "chart variable `{}` is not in the center",
                ring.var_name(chart_var)
            )));
        }
        let mut weights = vec![0i64; ring.nvars()];
        for &i in center {
            if i != chart_var {
                weights[i] = 1;
            }
        }
        Ok(Chart {
            ring: ring.polynomial_ring(),
            chart_var,
            weights,
        })
    }

    /// Weighted monomial chart x_i ↦ x_i·x_j^{w_i}; covers blow-ups of
    /// ideals like (x_1, x_n^p) on the x_1-chart.
    pub fn weighted(ring: &Ring, chart_var: usize, weights: Vec<i64>) -> Result<Chart> {
        assert_eq!(weights.len(), ring.nvars());
        if weights[chart_var] != 0 {
            return Err(EngineError::Precondition(
                "chart variable must carry weight 0".into(),
            ));
        }
        if weights.iter().any(|&w| w < 0) {
            return Err(EngineError::Precondition(
                "chart weights must be nonnegative".into(),
            ));
        }
        Ok(Chart {
            ring: ring.polynomial_ring(),
            chart_var,
            weights,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn chart_var(&self) -> usize {
        self.chart_var
    }

    pub fn exceptional_var_name(&self) -> &str {
        self.ring.var_name(self.chart_var)
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Source coordinate ring: ambient names with the Laurent slot at the
    /// exceptional variable.
    pub fn source_ring(&self) -> Ring {
        self.ring.laurent_in(self.chart_var)
    }

    /// The substitution images x_i ↦ x_i·x_j^{w_i} in the source ring.
    pub fn images(&self) -> Vec<Poly> {
        let src = self.source_ring();
        (0..self.ring.nvars())
            .map(|i| {
                let mut e = ExponentVec::unit(self.ring.nvars(), i);
                e.0[self.chart_var] += self.weights[i];
                Poly::monomial(&src, e, 1).expect("chart image is a valid monomial")
            })
            .collect()
    }

    /// Pull a function back along π (composition with the chart map).
    pub fn apply_to_poly(&self, f: &Poly) -> Result<Poly> {
        let base = f.cast_ring(&self.ring)?;
        base.substitute(&self.source_ring(), &self.images())
    }

    /// Pull a derivation back along the chart: the unique D' with
    /// D'(g∘π) = D(g)∘π. Coefficients may be Laurent in the exceptional
    /// variable. Writing y_m = x_m·x_j^{-w_m}, the coefficient is
    /// D'(y_m) = x_j^{-w_m}·D(x_m)∘π − w_m·y_m·x_j^{-1}·D(x_j)∘π.
    pub fn pullback(&self, d: &Derivation) -> Result<Derivation> {
        let src = self.source_ring();
        let n = self.ring.nvars();
        let j = self.chart_var;
        let pulled: Vec<Poly> = (0..n)
            .map(|i| self.apply_to_poly(d.coeff(i)))
            .collect::<Result<Vec<_>>>()?;
        let mut coeffs = Vec::with_capacity(n);
        for m in 0..n {
            if m == j {
                coeffs.push(pulled[j].clone());
                continue;
            }
            let w = self.weights[m];
            if w == 0 {
                coeffs.push(pulled[m].clone());
                continue;
            }
            let mut down_w = ExponentVec::zeros(n);
            down_w.0[j] = -w;
            let term_a = pulled[m].mul_monomial(&down_w)?;
            let mut shift = ExponentVec::unit(n, m);
            shift.0[j] = -1;
            let term_b = pulled[j].mul_monomial(&shift)?.scale(w);
            coeffs.push(term_a.sub(&term_b));
        }
        Ok(Derivation::new(&src, coeffs))
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let maps: Vec<String> = (0..self.ring.nvars())
            .map(|i| {
                let v = self.ring.var_name(i);
                let j = self.ring.var_name(self.chart_var);
                match self.weights[i] {
                    0 => format!("{v} -> {v}"),
                    1 => format!("{v} -> {j}*{v}"),
                    w => format!("{v} -> {j}^{w}*{v}"),
                }
            })
            .collect();
        write!(
            f,
            "{} [exceptional: {}]",
            maps.join(", "),
            self.exceptional_var_name()
        )
    }
}

/// Per-exceptional-divisor data extracted from one chart: the foliation
/// discrepancy a(E), the invariance flag ε(E) (0 when the exceptional
/// divisor is invariant), the extracted monomial content and the primitive
/// (saturated) pullback.
#[derive(Debug, Clone)]
pub struct DiscrepancyRecord {
    pub chart_path: Vec<Chart>,
    pub a_f: i64,
    pub epsilon: u8,
    pub content: Poly,
    pub saturated_pullback: Derivation,
}

impl DiscrepancyRecord {
    /// The log-canonical inequality a(E) ≥ −ε(E) for this divisor.
    pub fn satisfies_lc(&self) -> bool {
        self.a_f >= -(self.epsilon as i64)
    }
}

/// Divide out the monomial content of a rank-1 generator, including
/// negative powers of the exceptional slot. Fails when the coefficients
/// visibly share a non-monomial factor (probed by pairwise exact division):
/// full polynomial saturation is out of scope and a wrong discrepancy must
/// not be returned silently.
pub fn saturate_rank1(d: &Derivation) -> Result<(Derivation, Poly)> {
    if d.is_zero() {
        return Err(EngineError::ZeroInput("saturation input"));
    }
    let ring = d.ring().clone();
    let content = monomial_content(d.coeffs())?;
    let down = ExponentVec(content.0.iter().map(|&e| -e).collect());
    let coeffs: Vec<Poly> = d
        .coeffs()
        .iter()
        .map(|c| {
            if c.is_zero() {
                Ok(c.clone())
            } else {
                c.mul_monomial(&down)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let primitive = Derivation::new(&ring, coeffs);
    let residual = monomial_content(primitive.coeffs())?;
    assert!(
        residual.0.iter().all(|&e| e == 0),
        "saturation left monomial content behind"
    );
    // Heuristic probe for non-monomial common factors. Division runs in
    // the polynomial subring: in the Laurent ring the slot variable is a
    // unit and divisibility would be vacuous.
    let base = ring.polynomial_ring();
    let plain = primitive.cast_ring(&base)?;
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
                "coefficients share the non-monomial factor {}; polynomial saturation unsupported",
                cand
            )));
        }
    }
    let content_poly = Poly::monomial(&ring, content, 1)?;
    Ok((primitive, content_poly))
}

/// ε-invariance of the divisor (f = 0): true iff D(f) ∈ (f). Divisibility
/// is decided in the polynomial subring; in the Laurent ring the slot
/// variable is a unit, which would make invariance of the exceptional
/// divisor vacuously true.
pub fn is_invariant(d: &Derivation, f: &Poly) -> Result<bool> {
    if f.is_zero() {
        return Err(EngineError::ZeroInput("divisor equation"));
    }
    let base = d.ring().polynomial_ring();
    let d = d.cast_ring(&base)?;
    let f = f.cast_ring(&base)?;
    let df = d.apply(&f)?;
    Ok(df.exact_divide(&f)?.is_some())
}

/// Discrepancy data of the exceptional divisor of one chart for the rank-1
/// foliation generated by the primitive derivation `d`:
/// a(E) = −(minimal exceptional valuation of the raw pullback), ε from
/// invariance of the exceptional divisor under the saturated pullback.
pub fn discrepancy_rank1(d: &Derivation, chart: &Chart) -> Result<DiscrepancyRecord> {
    let raw = chart.pullback(d)?;
    if raw.is_zero() {
        return Err(EngineError::ZeroInput("pullback"));
    }
    let min_val = raw
        .coeffs()
        .iter()
        .filter_map(|c| c.var_valuation(chart.chart_var()))
        .min()
        .expect("nonzero pullback has a valuation");
    let (saturated, content) = saturate_rank1(&raw)?;
    let exc = Poly::var(&chart.source_ring(), chart.chart_var());
    let invariant = is_invariant(&saturated, &exc)?;
    Ok(DiscrepancyRecord {
        chart_path: vec![chart.clone()],
        a_f: -min_val,
        epsilon: if invariant { 0 } else { 1 },
        content,
        saturated_pullback: saturated,
    })
}

/// How a toric blow-up iteration ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceEnd {
    /// The weight pair reached (a, 0) after this many origin blow-ups.
    Terminated(usize),
    MaxStepsExhausted,
}

/// Iterate origin blow-ups on the diagonal derivation with weights (a, b),
/// which transform as (a, b) ↦ (a, b−a) on the first chart, until the
/// second weight vanishes. The terminal step exhibits the
/// canonical-violating divisor.
pub fn toric_blowup_sequence(
    ring: &Ring,
    a: i64,
    b: i64,
    max_steps: usize,
) -> Result<(Vec<DiscrepancyRecord>, SequenceEnd)> {
    assert_eq!(ring.nvars(), 2, "toric iteration is a surface procedure");
    let p = ring.p() as i64;
    let (a, mut b_cur) = (a.rem_euclid(p), b.rem_euclid(p));
    if a == 0 || b_cur == 0 {
        return Err(EngineError::Precondition(
            "toric iteration requires both weights nonzero".into(),
        ));
    }
    let chart = Chart::blowup(ring, &[0, 1], 0)?;
    let mut records = Vec::new();
    for step in 1..=max_steps {
        let d = Derivation::diagonal(ring, &[a, b_cur]);
        records.push(discrepancy_rank1(&d, &chart)?);
        b_cur = (b_cur - a).rem_euclid(p);
        if b_cur == 0 {
            return Ok((records, SequenceEnd::Terminated(step)));
        }
    }
    Ok((records, SequenceEnd::MaxStepsExhausted))
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

    #[test]
    fn chart_construction() {
        let r = ring2(5);
        let c = Chart::blowup(&r, &[0, 1], 0).unwrap();
        assert_eq!(c.weights(), &[0, 1]);
        assert_eq!(c.exceptional_var_name(), "x");
        assert!(Chart::blowup(&r, &[1], 0).is_err());

        let r3 = Ring::new(5, &["x1", "x2", "x3"]);
        let c = Chart::blowup(&r3, &[0, 1, 2], 0).unwrap();
        assert_eq!(c.weights(), &[0, 1, 1]);

        let w = Chart::weighted(&r3, 0, vec![0, 0, 5]).unwrap();
        assert_eq!(w.weights(), &[0, 0, 5]);
    }

    #[test]
    fn chart_map_on_functions() {
        let r = ring2(5);
        let c = Chart::blowup(&r, &[0, 1], 0).unwrap();
        let xy = pt(&r, &[(&[1, 1], 1)]);
        // xy ∘ π = x·(xy) = x^2 y
        let img = c.apply_to_poly(&xy).unwrap();
        assert_eq!(img.to_string_bare(), "x^2*y");
    }

    #[test]
    fn pullback_of_diagonal_shifts_weights() {
        for p in [2u64, 3, 5] {
            let r = ring2(p);
            let c = Chart::blowup(&r, &[0, 1], 0).unwrap();
            let src = c.source_ring();
            for a in 0..p as i64 {
                for b in 0..p as i64 {
                    let d = Derivation::diagonal(&r, &[a, b]);
                    let lifted = c.pullback(&d).unwrap();
                    assert_eq!(lifted, Derivation::diagonal(&src, &[a, b - a]));
                }
            }
        }
    }

    #[test]
    fn pullback_of_quadratic_field() {
        let p = 5;
        let r = ring2(p);
        let c = Chart::blowup(&r, &[0, 1], 0).unwrap();
        let src = c.source_ring();
        let d = Derivation::new(
            &r,
            vec![pt(&r, &[(&[2, 0], 1)]), pt(&r, &[(&[0, 2], 1)])],
        );
        let lifted = c.pullback(&d).unwrap();
        // x^2 ∂x + x·y(y−1) ∂y in chart coordinates
        let expected = Derivation::new(
            &src,
            vec![
                pt(&src, &[(&[2, 0], 1)]),
                pt(&src, &[(&[1, 2], 1), (&[1, 1], -1)]),
            ],
        );
        assert_eq!(lifted, expected);
    }

    #[test]
    fn weighted_chart_keeps_regular_field_regular() {
        for p in [2u64, 3, 5] {
            let r = Ring::new(p, &["x1", "x2", "x3"]);
            let mut weights = vec![0i64; 3];
            weights[2] = p as i64;
            let c = Chart::weighted(&r, 0, weights).unwrap();
            let d = Derivation::new(
                &r,
                vec![Poly::constant(&r, 1), Poly::zero(&r), Poly::zero(&r)],
            );
            let lifted = c.pullback(&d).unwrap();
            let src = c.source_ring();
            let expected = Derivation::new(
                &src,
                vec![Poly::constant(&src, 1), Poly::zero(&src), Poly::zero(&src)],
            );
            assert_eq!(lifted, expected);
            let rec = discrepancy_rank1(&d, &c).unwrap();
            assert_eq!(rec.a_f, 0);
        }
    }

    #[test]
    fn pullback_chain_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in [2u64, 3, 5] {
            let r = ring2(p);
            let charts = [
                Chart::blowup(&r, &[0, 1], 0).unwrap(),
                Chart::blowup(&r, &[0, 1], 1).unwrap(),
            ];
            let mons = crate::poly::monomials_up_to(&r, 3);
            for chart in &charts {
                for _ in 0..10 {
                    let mut g = Poly::zero(&r);
                    for _ in 0..3 {
                        let e = mons[rng.random_range(0..mons.len())].clone();
                        g = g.add(&Poly::monomial(&r, e, rng.random_range(0..p as i64)).unwrap());
                    }
                    let d = Derivation::new(
                        &r,
                        vec![
                            pt(&r, &[(&[1, 1], 1), (&[2, 0], 1)]),
                            pt(&r, &[(&[0, 2], 1)]),
                        ],
                    );
                    let lifted = chart.pullback(&d).unwrap();
                    let lhs = lifted.apply(&chart.apply_to_poly(&g).unwrap()).unwrap();
                    let rhs = chart.apply_to_poly(&d.apply(&g).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn saturation_cases() {
        let r = ring2(5);
        let c = Chart::blowup(&r, &[0, 1], 0).unwrap();
        let src = c.source_ring();

        // u∂u saturates to ∂u with content u
        let d = Derivation::new(&src, vec![Poly::var(&src, 0), Poly::zero(&src)]);
        let (prim, content) = saturate_rank1(&d).unwrap();
        assert_eq!(
            prim,
            Derivation::new(&src, vec![Poly::constant(&src, 1), Poly::zero(&src)])
        );
        assert_eq!(content, Poly::var(&src, 0));

        // u^2∂u + u·v(v−1)∂v saturates by u
        let d = Derivation::new(
            &src,
            vec![
                pt(&src, &[(&[2, 0], 1)]),
                pt(&src, &[(&[1, 2], 1), (&[1, 1], -1)]),
            ],
        );
        let (prim, content) = saturate_rank1(&d).unwrap();
        assert_eq!(content, Poly::var(&src, 0));
        let expected = Derivation::new(
            &src,
            vec![
                pt(&src, &[(&[1, 0], 1)]),
                pt(&src, &[(&[0, 2], 1), (&[0, 1], -1)]),
            ],
        );
        assert_eq!(prim, expected);

        // distinct weights need no saturation
        let d = Derivation::diagonal(&src, &[2, 1]);
        let (prim, content) = saturate_rank1(&d).unwrap();
        assert_eq!(prim, d);
        assert_eq!(content, Poly::constant(&src, 1));

        assert!(saturate_rank1(&Derivation::zero(&src)).is_err());
    }

    #[test]
    fn saturation_idempotent_and_flags_polynomial_content() {
        let r = ring2(3);
        let d = Derivation::diagonal(&r, &[1, 2]);
        let (prim, _) = saturate_rank1(&d).unwrap();
        let (again, content) = saturate_rank1(&prim).unwrap();
        assert_eq!(again, prim);
        assert_eq!(content, Poly::constant(&r, 1));

        // (1+y)∂x + (1+y)y∂y has the invisible-to-monomials factor 1+y
        let shared = Poly::constant(&r, 1).add(&Poly::var(&r, 1));
        let d = Derivation::new(
            &r,
            vec![shared.clone(), shared.mul(&Poly::var(&r, 1)).unwrap()],
        );
        assert!(saturate_rank1(&d).is_err());
    }

    #[test]
    fn invariance_cases() {
        let r = ring2(5);
        let diag = Derivation::diagonal(&r, &[2, 3]);
        assert!(is_invariant(&diag, &Poly::var(&r, 0)).unwrap());

        let ddx = Derivation::new(&r, vec![Poly::constant(&r, 1), Poly::zero(&r)]);
        assert!(!is_invariant(&ddx, &Poly::var(&r, 0)).unwrap());

        // ε is unchanged by scaling with a polynomial coprime to f
        let coprime = Poly::constant(&r, 1).add(&Poly::var(&r, 1));
        let scaled = diag.scale_poly(&coprime).unwrap();
        assert!(is_invariant(&scaled, &Poly::var(&r, 0)).unwrap());
        let scaled_ddx = ddx.scale_poly(&coprime).unwrap();
        assert!(!is_invariant(&scaled_ddx, &Poly::var(&r, 0)).unwrap());
    }

    #[test]
    fn discrepancies_of_origin_blowup() {
        for p in [2u64, 3, 5] {
            let r = ring2(p);
            let chart = Chart::blowup(&r, &[0, 1], 0).unwrap();

            // equal weights: content u, a = −1, exceptional not invariant
            let d = Derivation::diagonal(&r, &[1, 1]);
            let rec = discrepancy_rank1(&d, &chart).unwrap();
            assert_eq!(rec.a_f, -1);
            assert_eq!(rec.epsilon, 1);
            assert_eq!(rec.content, Poly::var(&chart.source_ring(), 0));
            assert!(rec.satisfies_lc());

            // distinct nonzero weights: no content, a = 0, invariant
            if p > 2 {
                let d = Derivation::diagonal(&r, &[1, 2]);
                let rec = discrepancy_rank1(&d, &chart).unwrap();
                assert_eq!(rec.a_f, 0);
                assert_eq!(rec.epsilon, 0);
                assert_eq!(rec.content, Poly::constant(&chart.source_ring(), 1));
            }
        }

        // quadratic example: a = −1 with invariant exceptional divisor
        let r = ring2(2);
        let chart = Chart::blowup(&r, &[0, 1], 0).unwrap();
        let d = Derivation::new(
            &r,
            vec![pt(&r, &[(&[2, 0], 1)]), pt(&r, &[(&[0, 2], 1)])],
        );
        let rec = discrepancy_rank1(&d, &chart).unwrap();
        assert_eq!(rec.a_f, -1);
        assert_eq!(rec.epsilon, 0);
        assert!(!rec.satisfies_lc());
    }

    #[test]
    fn regular_field_has_nonnegative_discrepancy() {
        for p in [2u64, 3] {
            let r2 = ring2(p);
            let ddx = Derivation::new(&r2, vec![Poly::constant(&r2, 1), Poly::zero(&r2)]);
            for chart_var in [0usize, 1] {
                let chart = Chart::blowup(&r2, &[0, 1], chart_var).unwrap();
                let rec = discrepancy_rank1(&ddx, &chart).unwrap();
                assert!(rec.a_f >= 0, "p={p} chart {chart_var}: a={}", rec.a_f);
            }
            let r3 = Ring::new(p, &["x", "y", "z"]);
            let ddx3 = Derivation::new(
                &r3,
                vec![Poly::constant(&r3, 1), Poly::zero(&r3), Poly::zero(&r3)],
            );
            let chart = Chart::blowup(&r3, &[0, 1, 2], 1).unwrap();
            let rec = discrepancy_rank1(&ddx3, &chart).unwrap();
            assert!(rec.a_f >= 0);
        }
    }

    #[test]
    fn toric_iteration() {
        // equal weights stop in one step at the non-invariant divisor
        let r = ring2(2);
        let (recs, end) = toric_blowup_sequence(&r, 1, 1, 10).unwrap();
        assert_eq!(end, SequenceEnd::Terminated(1));
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].a_f, -1);
        assert_eq!(recs[0].epsilon, 1);

        // weights (1, 3) over p = 5 take three steps
        let r = ring2(5);
        let (recs, end) = toric_blowup_sequence(&r, 1, 3, 10).unwrap();
        assert_eq!(end, SequenceEnd::Terminated(3));
        assert_eq!(recs.len(), 3);
        for rec in &recs[..2] {
            assert_eq!((rec.a_f, rec.epsilon), (0, 0));
        }
        assert_eq!((recs[2].a_f, recs[2].epsilon), (-1, 1));

        // degenerate weights rejected
        assert!(toric_blowup_sequence(&r, 1, 0, 10).is_err());

        // max_steps exhaustion is reported, not fatal
        let (recs, end) = toric_blowup_sequence(&r, 1, 3, 2).unwrap();
        assert_eq!(end, SequenceEnd::MaxStepsExhausted);
        assert_eq!(recs.len(), 2);
    }
}
