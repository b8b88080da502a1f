//! Symbolic MMP bookkeeping for infinitesimal quotients: divisor
//! pushforward/pullback along the quotient map, the log-adjunction
//! residual, discrepancy transfer and the singularity-class transfer table.
//!
//! Canonical classes are symbolic here; only the exceptional corrections
//! (the a, b, c numbers) carry arithmetic, and all of it is exact rational.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{EngineError, Result};

pub type Rational = Ratio<i64>;

/// One divisor entry: identifier, coefficient and the invariance flag
/// (ε = 0 for invariant divisors, 1 otherwise).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub id: String,
    pub coeff: Rational,
    pub epsilon: u8,
}

/// A formal Q-divisor supported on finitely many prime divisors, tracked
/// together with the characteristic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorLedger {
    pub p: u64,
    pub entries: Vec<LedgerEntry>,
}

impl DivisorLedger {
    pub fn new(p: u64, entries: Vec<LedgerEntry>) -> DivisorLedger {
        let mut seen = std::collections::BTreeSet::new();
        for e in &entries {
            assert!(seen.insert(e.id.clone()), "duplicate divisor id {}", e.id);
            assert!(e.epsilon <= 1);
        }
        DivisorLedger { p, entries }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.coeff == Rational::from(0))
    }

    fn map<F: Fn(&LedgerEntry) -> LedgerEntry>(&self, f: F) -> DivisorLedger {
        DivisorLedger {
            p: self.p,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

/// Push a divisor forward along the quotient: each coefficient picks up
/// the factor 1 − ε·(p−1)/p, and ids move to their images.
pub fn pushforward_ledger(delta: &DivisorLedger) -> DivisorLedger {
    let p = Rational::from(delta.p as i64);
    delta.map(|e| {
        let factor = if e.epsilon == 1 {
            Rational::from(1) - (p - Rational::from(1)) / p
        } else {
            Rational::from(1)
        };
        LedgerEntry {
            id: format!("q({})", e.id),
            coeff: e.coeff * factor,
            epsilon: e.epsilon,
        }
    })
}

/// Pull the image divisor back: multiplicity 1 for invariant divisors,
/// p otherwise.
pub fn pullback_multiplicity(epsilon: u8, p: u64) -> i64 {
    if epsilon == 1 {
        p as i64
    } else {
        1
    }
}

pub fn pullback_ledger(delta_y: &DivisorLedger) -> DivisorLedger {
    let p = delta_y.p;
    delta_y.map(|e| LedgerEntry {
        id: e
            .id
            .strip_prefix("q(")
            .and_then(|s| s.strip_suffix(')'))
            .unwrap_or(&e.id)
            .to_string(),
        coeff: e.coeff * Rational::from(pullback_multiplicity(e.epsilon, p)),
        epsilon: e.epsilon,
    })
}

/// The divisorial content of log adjunction: q^*(pushforward(Δ)) − Δ,
/// identically zero entry by entry.
pub fn adjunction_residual(delta: &DivisorLedger) -> DivisorLedger {
    let round = pullback_ledger(&pushforward_ledger(delta));
    DivisorLedger {
        p: delta.p,
        entries: round
            .entries
            .iter()
            .zip(&delta.entries)
            .map(|(r, d)| LedgerEntry {
                id: d.id.clone(),
                coeff: r.coeff - d.coeff,
                epsilon: d.epsilon,
            })
            .collect(),
    }
}

/// Discrepancy transfer from (variety, foliation) data to the quotient:
/// a = c + (p−1)b for invariant divisors, (c + (p−1)b)/p otherwise.
pub fn transfer_discrepancy(c: Rational, b: Rational, invariant: bool, p: u64) -> Rational {
    let pm1 = Rational::from(p as i64 - 1);
    let total = c + pm1 * b;
    if invariant {
        total
    } else {
        total / Rational::from(p as i64)
    }
}

/// MMP singularity classes, ordered by the implications
/// terminal ⇒ canonical ⇒ lc and terminal ⇒ klt ⇒ lc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingClass {
    Terminal,
    Canonical,
    Klt,
    Lc,
    NotLc,
}

impl SingClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SingClass::Terminal => "terminal",
            SingClass::Canonical => "canonical",
            SingClass::Klt => "klt",
            SingClass::Lc => "lc",
            SingClass::NotLc => "not_lc",
        }
    }

    pub fn parse(s: &str) -> Option<SingClass> {
        match s {
            "terminal" => Some(SingClass::Terminal),
            "canonical" => Some(SingClass::Canonical),
            "klt" => Some(SingClass::Klt),
            "lc" => Some(SingClass::Lc),
            "not_lc" | "not-lc" => Some(SingClass::NotLc),
            _ => None,
        }
    }

    pub fn implies(&self, other: &SingClass) -> bool {
        use SingClass::*;
        match (self, other) {
            (a, b) if a == b => true,
            (Terminal, Canonical | Klt | Lc) => true,
            (Canonical, Lc) => true,
            (Klt, Lc) => true,
            (_, NotLc) => true,
            _ => false,
        }
    }
}

/// Best singularity class of the quotient guaranteed by the transfer
/// theorem, never a claim about the actual quotient, whose class can be
/// strictly better.
///
/// A canonical foliation preserves the class; a klt foliation sends
/// everything lc-or-better to klt; an lc foliation sends klt to klt and lc
/// to lc (terminal and canonical inputs pass through their implied klt
/// resp. lc classes).
pub fn transfer_class_guaranteed(x_class: SingClass, f_class: SingClass) -> Result<SingClass> {
    use SingClass::*;
    if x_class == NotLc {
        return Ok(NotLc);
    }
    match f_class {
        Canonical => Ok(x_class),
        Klt => Ok(Klt),
        Lc => Ok(match x_class {
            Terminal | Klt => Klt,
            Canonical | Lc => Lc,
            NotLc => unreachable!(),
        }),
        _ => Err(EngineError::Precondition(
            "class transfer requires the foliation to be canonical, klt or lc".into(),
        )),
    }
}

fn class_bound_ok(class: SingClass, a: Rational) -> bool {
    let zero = Rational::from(0);
    let minus_one = Rational::from(-1);
    match class {
        SingClass::Terminal => a > zero,
        SingClass::Canonical => a >= zero,
        SingClass::Klt => a > minus_one,
        SingClass::Lc => a >= minus_one,
        SingClass::NotLc => true,
    }
}

/// A single sampled violation of the transfer table, if any exist.
#[derive(Debug, Clone)]
pub struct TransferViolation {
    pub x_class: SingClass,
    pub f_class: SingClass,
    pub c: Rational,
    pub b: Rational,
    pub invariant: bool,
    pub p: u64,
    pub transferred: Rational,
    pub promised: SingClass,
}

#[derive(Debug, Clone)]
pub struct TransferTableReport {
    pub samples_per_cell: usize,
    pub cells: usize,
    pub violations: Vec<TransferViolation>,
}

/// Randomized audit of the transfer table: sample discrepancy data
/// satisfying each cell's hypotheses (with the ε-dependent bound on the
/// foliation side) and check the transferred discrepancy against the
/// promised class. Boundary values are included so the non-strict
/// inequalities are exercised exactly.
pub fn validate_transfer_table(
    samples: usize,
    primes: &[u64],
    seed: u64,
) -> TransferTableReport {
    use SingClass::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_classes = [Terminal, Canonical, Klt, Lc];
    let f_classes = [Canonical, Klt, Lc];
    let mut violations = Vec::new();
    let rand_rational = |rng: &mut ChaCha8Rng, min: Rational, strict: bool| {
        let den = rng.random_range(1..=4i64);
        // offsets in units of 1/den, from the boundary up
        let start = if strict { 1 } else { 0 };
        let num_offset = rng.random_range(start..=(3 * den));
        min + Rational::new(num_offset, den)
    };
    for &p in primes {
        for &xc in &x_classes {
            for &fc in &f_classes {
                for _ in 0..samples {
                    let invariant = rng.random_bool(0.5);
                    let eps = if invariant { 0i64 } else { 1 };
                    let (c_min, c_strict) = match xc {
                        Terminal => (Rational::from(0), true),
                        Canonical => (Rational::from(0), false),
                        Klt => (Rational::from(-1), true),
                        Lc => (Rational::from(-1), false),
                        NotLc => unreachable!(),
                    };
                    let (b_min, b_strict) = match fc {
                        Canonical => (Rational::from(0), false),
                        Klt => (Rational::from(-eps), true),
                        Lc => (Rational::from(-eps), false),
                        _ => unreachable!(),
                    };
                    let c = rand_rational(&mut rng, c_min, c_strict);
                    let b = rand_rational(&mut rng, b_min, b_strict);
                    let a = transfer_discrepancy(c, b, invariant, p);
                    let promised = transfer_class_guaranteed(xc, fc).unwrap();
                    if !class_bound_ok(promised, a) {
                        violations.push(TransferViolation {
                            x_class: xc,
                            f_class: fc,
                            c,
                            b,
                            invariant,
                            p,
                            transferred: a,
                            promised,
                        });
                    }
                }
            }
        }
    }
    TransferTableReport {
        samples_per_cell: samples,
        cells: x_classes.len() * f_classes.len() * primes.len(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str, num: i64, den: i64, eps: u8) -> LedgerEntry {
        LedgerEntry {
            id: id.into(),
            coeff: Rational::new(num, den),
            epsilon: eps,
        }
    }

    #[test]
    fn pushforward_scales_by_invariance() {
        let l = DivisorLedger::new(2, vec![entry("E", 1, 1, 1)]);
        let out = pushforward_ledger(&l);
        assert_eq!(out.entries[0].coeff, Rational::new(1, 2));
        assert_eq!(out.entries[0].id, "q(E)");

        let l = DivisorLedger::new(5, vec![entry("E", 1, 1, 0)]);
        assert_eq!(pushforward_ledger(&l).entries[0].coeff, Rational::from(1));

        let l = DivisorLedger::new(3, vec![entry("E", 2, 3, 1)]);
        assert_eq!(pushforward_ledger(&l).entries[0].coeff, Rational::new(2, 9));
    }

    #[test]
    fn pullback_multiplicities() {
        assert_eq!(pullback_multiplicity(0, 5), 1);
        assert_eq!(pullback_multiplicity(1, 5), 5);
    }

    #[test]
    fn roundtrip_is_identity() {
        for p in [2u64, 3, 5] {
            for eps in [0u8, 1] {
                let l = DivisorLedger::new(p, vec![entry("E", 1, 1, eps)]);
                let round = pullback_ledger(&pushforward_ledger(&l));
                assert_eq!(round.entries[0].coeff, Rational::from(1));
                assert_eq!(round.entries[0].id, "E");
            }
        }
    }

    #[test]
    fn adjunction_residual_vanishes() {
        let single = DivisorLedger::new(3, vec![entry("E", 5, 7, 1)]);
        assert!(adjunction_residual(&single).is_zero());

        let empty = DivisorLedger::new(3, vec![]);
        assert!(adjunction_residual(&empty).is_zero());

        let mixed = DivisorLedger::new(
            3,
            vec![entry("A", 1, 2, 0), entry("B", -4, 3, 1), entry("C", 7, 1, 1)],
        );
        assert!(adjunction_residual(&mixed).is_zero());

        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [2u64, 3, 5, 7] {
            let entries: Vec<LedgerEntry> = (0..6)
                .map(|i| {
                    entry(
                        &format!("D{i}"),
                        rng.random_range(-8..8),
                        rng.random_range(1..5),
                        rng.random_range(0..2u8),
                    )
                })
                .collect();
            let l = DivisorLedger::new(p, entries);
            assert!(adjunction_residual(&l).is_zero());
        }
    }

    #[test]
    fn discrepancy_transfer_values() {
        let r = |n, d| Rational::new(n, d);
        assert_eq!(
            transfer_discrepancy(r(0, 1), r(0, 1), true, 3),
            Rational::from(0)
        );
        // smooth surface blow-up against the equal-weights foliation over
        // p = 2: c = 1, b = −1, non-invariant divisor, a = 0
        assert_eq!(
            transfer_discrepancy(r(1, 1), r(-1, 1), false, 2),
            Rational::from(0)
        );
        assert_eq!(
            transfer_discrepancy(r(1, 1), r(0, 1), true, 3),
            Rational::from(1)
        );
        // lc boundary: c = −1, b = −1, non-invariant, any p gives exactly −1
        for p in [2u64, 3, 5, 7] {
            assert_eq!(
                transfer_discrepancy(r(-1, 1), r(-1, 1), false, p),
                Rational::from(-1)
            );
        }
    }

    #[test]
    fn transfer_is_monotone_and_strict() {
        let r = |n, d| Rational::new(n, d);
        for p in [2u64, 3, 5] {
            for invariant in [false, true] {
                let base = transfer_discrepancy(r(-1, 1), r(0, 1), invariant, p);
                let better_c = transfer_discrepancy(r(-1, 2), r(0, 1), invariant, p);
                let better_b = transfer_discrepancy(r(-1, 1), r(1, 2), invariant, p);
                assert!(better_c > base);
                assert!(better_b > base);
            }
        }
    }

    #[test]
    fn class_table_entries() {
        use SingClass::*;
        assert_eq!(
            transfer_class_guaranteed(Terminal, Canonical).unwrap(),
            Terminal
        );
        assert_eq!(transfer_class_guaranteed(Lc, Klt).unwrap(), Klt);
        assert_eq!(transfer_class_guaranteed(Klt, Lc).unwrap(), Klt);
        assert_eq!(transfer_class_guaranteed(Canonical, Lc).unwrap(), Lc);
        assert_eq!(transfer_class_guaranteed(Terminal, Lc).unwrap(), Klt);
        assert!(transfer_class_guaranteed(Lc, Terminal).is_err());
        assert!(transfer_class_guaranteed(Lc, NotLc).is_err());
        assert_eq!(transfer_class_guaranteed(NotLc, Canonical).unwrap(), NotLc);
    }

    #[test]
    fn table_validates_clean() {
        let report = validate_transfer_table(500, &[2, 3, 5, 7], 42);
        assert!(
            report.violations.is_empty(),
            "violations: {:?}",
            report.violations.first()
        );
    }

    #[test]
    fn implication_order() {
        use SingClass::*;
        assert!(Terminal.implies(&Canonical));
        assert!(Terminal.implies(&Klt));
        assert!(Canonical.implies(&Lc));
        assert!(Klt.implies(&Lc));
        assert!(!Canonical.implies(&Klt));
        assert!(!Klt.implies(&Canonical));
    }
}
