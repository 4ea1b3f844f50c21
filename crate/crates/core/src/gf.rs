//! Prime fields GF(p) and quadratic extensions GF(p²) = GF(p)[X]/⟨Q⟩.
//!
//! Moduli are small (a few thousand at most), so every product fits in a
//! `u64` without widening.

use crate::error::{Error, Result};

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// The first `count` primes satisfying `p >= lower`, in increasing order.
pub fn primes_from(lower: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = lower.max(2);
    while out.len() < count {
        if is_prime(n) {
            out.push(n);
        }
        n += 1;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, x: u64) -> u64 {
        x % self.p
    }

    pub fn reduce_signed(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        (x + y) % self.p
    }

    pub fn sub(&self, x: u64, y: u64) -> u64 {
        (x + self.p - y % self.p) % self.p
    }

    pub fn neg(&self, x: u64) -> u64 {
        (self.p - x % self.p) % self.p
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        (x % self.p) * (y % self.p) % self.p
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn inv(&self, x: u64) -> Result<u64> {
        let x = x % self.p;
        if x == 0 {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.p as i64, x as i64);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce_signed(s0))
    }
}

/// Smallest monic irreducible quadratic `X² + q1·X + q0` over GF(p), ordered
/// lexicographically by `(q1, q0)`. Returned as `(q0, q1)`.
pub fn find_irreducible_quadratic(p: u64) -> (u64, u64) {
    assert!(is_prime(p), "{p} is not prime");
    for q1 in 0..p {
        for q0 in 0..p {
            if !has_root(p, q0, q1) {
                return (q0, q1);
            }
        }
    }
    unreachable!("every prime field has an irreducible quadratic")
}

fn has_root(p: u64, q0: u64, q1: u64) -> bool {
    (0..p).any(|x| (x * x + q1 * x + q0).is_multiple_of(p))
}

/// An element `c0 + c1·X` of GF(p²).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ext2 {
    pub c0: u64,
    pub c1: u64,
}

impl Ext2 {
    pub const ZERO: Ext2 = Ext2 { c0: 0, c1: 0 };
    pub const ONE: Ext2 = Ext2 { c0: 1, c1: 0 };

    pub fn new(c0: u64, c1: u64) -> Self {
        Self { c0, c1 }
    }

    /// Embeds a base-field value (already reduced).
    pub fn base(c0: u64) -> Self {
        Self { c0, c1: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }
}

/// GF(p²) as GF(p)[X] modulo a monic irreducible `Q = X² + q1·X + q0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadExtField {
    base: PrimeField,
    q0: u64,
    q1: u64,
}

impl QuadExtField {
    /// Builds the extension with the deterministic modulus from
    /// [`find_irreducible_quadratic`].
    pub fn new(p: u64) -> Result<Self> {
        let base = PrimeField::new(p)?;
        let (q0, q1) = find_irreducible_quadratic(p);
        Ok(Self { base, q0, q1 })
    }

    pub fn with_modulus(p: u64, q0: u64, q1: u64) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if q0 >= p || q1 >= p {
            return Err(Error::OutOfRange(format!(
                "modulus coefficients ({q0}, {q1}) must be reduced mod {p}"
            )));
        }
        if has_root(p, q0, q1) {
            return Err(Error::InvalidParameter(format!(
                "X^2 + {q1}X + {q0} has a root in GF({p})"
            )));
        }
        Ok(Self { base, q0, q1 })
    }

    pub fn characteristic(&self) -> u64 {
        self.base.modulus()
    }

    pub fn base_field(&self) -> &PrimeField {
        &self.base
    }

    /// `(q0, q1)` of the modulus `X² + q1·X + q0`.
    pub fn modulus(&self) -> (u64, u64) {
        (self.q0, self.q1)
    }

    pub fn order(&self) -> u64 {
        let p = self.characteristic();
        p * p
    }

    /// The `index`-th element in `(c1, c0)` lexicographic order.
    pub fn element(&self, index: u64) -> Ext2 {
        let p = self.characteristic();
        debug_assert!(index < p * p);
        Ext2::new(index % p, index / p)
    }

    pub fn elements(&self) -> impl Iterator<Item = Ext2> + '_ {
        (0..self.order()).map(|i| self.element(i))
    }

    pub fn is_reduced(&self, x: Ext2) -> bool {
        x.c0 < self.characteristic() && x.c1 < self.characteristic()
    }

    pub fn add(&self, x: Ext2, y: Ext2) -> Ext2 {
        Ext2::new(self.base.add(x.c0, y.c0), self.base.add(x.c1, y.c1))
    }

    pub fn sub(&self, x: Ext2, y: Ext2) -> Ext2 {
        Ext2::new(self.base.sub(x.c0, y.c0), self.base.sub(x.c1, y.c1))
    }

    pub fn neg(&self, x: Ext2) -> Ext2 {
        Ext2::new(self.base.neg(x.c0), self.base.neg(x.c1))
    }

    pub fn scale(&self, x: Ext2, s: u64) -> Ext2 {
        Ext2::new(self.base.mul(x.c0, s), self.base.mul(x.c1, s))
    }

    pub fn mul(&self, x: Ext2, y: Ext2) -> Ext2 {
        let f = &self.base;
        // X² ≡ −q1·X − q0
        let hi = f.mul(x.c1, y.c1);
        let c0 = f.sub(f.mul(x.c0, y.c0), f.mul(self.q0, hi));
        let mid = f.add(f.mul(x.c0, y.c1), f.mul(x.c1, y.c0));
        let c1 = f.sub(mid, f.mul(self.q1, hi));
        Ext2::new(c0, c1)
    }

    /// Reduces the integer polynomial `k0 + k1·X + k2·X²` modulo `(p, Q)`.
    pub fn reduce_quadratic(&self, k0: u64, k1: u64, k2: u64) -> Ext2 {
        let f = &self.base;
        let k2 = f.reduce(k2);
        let c0 = f.sub(f.reduce(k0), f.mul(self.q0, k2));
        let c1 = f.sub(f.reduce(k1), f.mul(self.q1, k2));
        Ext2::new(c0, c1)
    }

    pub fn pow(&self, x: Ext2, mut e: u64) -> Ext2 {
        let mut acc = Ext2::ONE;
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse via the norm: `x⁻¹ = x̄ / N(x)` with `x̄ = x^p`.
    pub fn inv(&self, x: Ext2) -> Result<Ext2> {
        if x.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let conj = self.pow(x, self.characteristic());
        let norm = self.mul(x, conj);
        debug_assert_eq!(norm.c1, 0, "norm lies in the base field");
        let norm_inv = self.base.inv(norm.c0)?;
        Ok(self.scale(conj, norm_inv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_from(5, 4), vec![5, 7, 11, 13]);
    }

    #[test]
    fn irreducible_over_gf2() {
        // monic quadratics over GF(2): X², X²+1, X²+X, X²+X+1; only the last is root-free
        assert_eq!(find_irreducible_quadratic(2), (1, 1));
    }

    #[test]
    fn irreducible_over_gf3() {
        assert_eq!(find_irreducible_quadratic(3), (1, 0));
    }

    #[test]
    fn irreducible_has_no_roots() {
        for p in [5, 7, 11, 13, 97] {
            let (q0, q1) = find_irreducible_quadratic(p);
            assert!((0..p).all(|x| (x * x + q1 * x + q0) % p != 0));
        }
    }

    #[test]
    fn x_squared_over_gf4() {
        let f = QuadExtField::new(2).unwrap();
        let x = Ext2::new(0, 1);
        assert_eq!(f.mul(x, x), Ext2::new(1, 1));
    }

    #[test]
    fn identity_and_negation() {
        let f = QuadExtField::new(7).unwrap();
        for x in f.elements() {
            assert_eq!(f.mul(x, Ext2::ONE), x);
            assert!(f.add(x, f.neg(x)).is_zero());
        }
    }

    #[test]
    fn inverses_over_gf9() {
        let f = QuadExtField::new(3).unwrap();
        let nonzero: Vec<_> = f.elements().filter(|x| !x.is_zero()).collect();
        assert_eq!(nonzero.len(), 8);
        for x in nonzero {
            assert_eq!(f.mul(f.inv(x).unwrap(), x), Ext2::ONE);
        }
        assert!(matches!(f.inv(Ext2::ZERO), Err(Error::ZeroInverse)));
    }

    #[test]
    fn frobenius_fixes_everything() {
        for p in [2, 3, 5, 7] {
            let f = QuadExtField::new(p).unwrap();
            assert_eq!(f.elements().count() as u64, p * p);
            for x in f.elements() {
                assert_eq!(f.pow(x, p * p), x);
            }
        }
    }

    #[test]
    fn ring_laws_on_random_triples() {
        let f = QuadExtField::new(89).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rand_elem = |rng: &mut ChaCha8Rng| f.element(rng.gen_range(0..f.order()));
        for _ in 0..1000 {
            let (x, y, z) = (rand_elem(&mut rng), rand_elem(&mut rng), rand_elem(&mut rng));
            assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
            assert_eq!(f.mul(x, y), f.mul(y, x));
            assert_eq!(f.add(x, y), f.add(y, x));
            assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
        }
    }

    #[test]
    fn coefficient_split_round_trip() {
        let f = QuadExtField::new(11).unwrap();
        for x in f.elements() {
            let rebuilt = f.add(Ext2::base(x.c0), f.mul(Ext2::base(x.c1), Ext2::new(0, 1)));
            assert_eq!(rebuilt, x);
        }
    }

    #[test]
    fn quadratic_reduction_matches_field_multiplication() {
        let f = QuadExtField::new(13).unwrap();
        let x = Ext2::new(0, 1);
        let x2 = f.mul(x, x);
        assert_eq!(f.reduce_quadratic(0, 0, 1), x2);
        assert_eq!(f.reduce_quadratic(5, 3, 0), Ext2::new(5, 3));
        // integer coefficients larger than p reduce first
        assert_eq!(f.reduce_quadratic(13 + 2, 26, 13), Ext2::new(2, 0));
    }

    #[test]
    fn rejects_reducible_modulus() {
        assert!(QuadExtField::with_modulus(5, 0, 0).is_err());
        assert!(QuadExtField::new(9).is_err());
    }
}
