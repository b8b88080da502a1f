//! Scalar arithmetic in the prime field F_p.

use std::fmt;

/// An element of F_p, stored as the reduced residue together with the modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u64,
    p: u64,
}

impl FpScalar {
    pub fn new(value: i64, p: u64) -> Self {
        debug_assert!(is_prime(p), "modulus {p} is not prime");
        let m = p as i64;
        let v = ((value % m) + m) % m;
        FpScalar { value: v as u64, p }
    }

    pub fn zero(p: u64) -> Self {
        FpScalar { value: 0, p }
    }

    pub fn one(p: u64) -> Self {
        FpScalar::new(1, p)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn add(&self, other: &FpScalar) -> FpScalar {
        self.check(other);
        FpScalar {
            value: (self.value + other.value) % self.p,
            p: self.p,
        }
    }

    pub fn sub(&self, other: &FpScalar) -> FpScalar {
        self.check(other);
        FpScalar {
            value: (self.value + self.p - other.value) % self.p,
            p: self.p,
        }
    }

    pub fn mul(&self, other: &FpScalar) -> FpScalar {
        self.check(other);
        FpScalar {
            value: (self.value * other.value) % self.p,
            p: self.p,
        }
    }

    pub fn neg(&self) -> FpScalar {
        FpScalar {
            value: (self.p - self.value) % self.p,
            p: self.p,
        }
    }

    /// Multiplicative inverse; panics on zero (field invariant).
    pub fn inv(&self) -> FpScalar {
        assert!(self.value != 0, "inverse of zero in F_{}", self.p);
        self.pow(self.p - 2)
    }

    pub fn pow(&self, mut e: u64) -> FpScalar {
        let mut base = *self;
        let mut acc = FpScalar::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    fn check(&self, other: &FpScalar) {
        assert_eq!(self.p, other.p, "mixed moduli {} and {}", self.p, other.p);
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Trial-division primality check; moduli here are small machine words.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        let a = FpScalar::new(3, 5);
        let b = FpScalar::new(4, 5);
        assert_eq!(a.add(&b).value(), 2);
        assert_eq!(a.mul(&b).value(), 2);
        assert_eq!(a.sub(&b).value(), 4);
        assert_eq!(b.inv().mul(&b).value(), 1);
        assert_eq!(FpScalar::new(-1, 5).value(), 4);
    }

    #[test]
    fn fermat_little() {
        for p in [2u64, 3, 5, 7] {
            for v in 1..p {
                let x = FpScalar::new(v as i64, p);
                assert_eq!(x.pow(p).value(), x.value());
            }
        }
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(is_prime(65537));
        assert!(!is_prime(1));
        assert!(!is_prime(9));
        assert!(!is_prime(91));
    }
}
