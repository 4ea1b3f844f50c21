//! The single-prime set-disjointness protocol the multi-prime protocol
//! generalizes.
//!
//! `a, b ∈ {0,1}^d` with `d = s²` are viewed as `s × s` matrices; each column
//! is encoded by a Reed–Solomon code of length `p` over GF(p), `p` the
//! smallest prime above `4s`. Merlin sends the column-product sum `m`,
//! Alice checks it has degree `≤ 2s − 2` and a zero prefix of length `s`,
//! and a random row `i ∈ [p]` is compared against `m(i)`.
//!
//! The code is realized as [`MultCodePair`] over GF(p²) with `n = p`: the
//! first `p` evaluation points are exactly the base field, so base-field
//! messages stay in the base field.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitVector;
use crate::codes::MultCodePair;
use crate::error::{Error, Result};
use crate::gf::{is_prime, Ext2, QuadExtField};

/// Number of random zero-prefix codewords tried as cheating messages.
const CHEATING_SAMPLES: usize = 64;

#[derive(Clone, Debug)]
pub struct Aw09 {
    side: usize,
    code: MultCodePair,
}

impl Aw09 {
    pub fn new(d: usize) -> Result<Self> {
        let side = (d as f64).sqrt().round() as usize;
        if d == 0 || side * side != d {
            return Err(Error::InvalidParameter(format!("dimension {d} is not a positive perfect square")));
        }
        let p = (4 * side as u64 + 1..).find(|&x| is_prime(x)).expect("primes are unbounded");
        let code = MultCodePair::new(QuadExtField::new(p)?, side, p as usize)?;
        Ok(Self { side, code })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn prime(&self) -> u64 {
        self.code.field().characteristic()
    }

    /// Encoded matrix, `p` rows of `s` symbols.
    pub fn encode(&self, x: &BitVector) -> Result<Vec<Vec<Ext2>>> {
        let s = self.side;
        if x.len() != s * s {
            return Err(Error::DimensionMismatch {
                expected: s * s,
                got: x.len(),
            });
        }
        let columns = (0..s)
            .map(|j| {
                let col: Vec<Ext2> = (0..s).map(|i| Ext2::base(x.get(i * s + j) as u64)).collect();
                self.code.encode(&col)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((0..self.code.codeword_len())
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect())
    }

    fn row_product(&self, ea: &[Vec<Ext2>], eb: &[Vec<Ext2>], i: usize) -> Ext2 {
        let f = self.code.field();
        ea[i].iter().zip(&eb[i]).fold(Ext2::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
    }

    pub fn honest_message(&self, a: &BitVector, b: &BitVector) -> Result<Vec<Ext2>> {
        let (ea, eb) = (self.encode(a)?, self.encode(b)?);
        Ok((0..self.code.codeword_len()).map(|i| self.row_product(&ea, &eb, i)).collect())
    }

    /// Alice's check: degree `≤ 2s − 2` and zero on the first `s` rows.
    pub fn check(&self, m: &[Ext2]) -> bool {
        self.code.is_product_codeword(m) && m[..self.side].iter().all(Ext2::is_zero)
    }

    /// Exact acceptance probability over the `p` row choices.
    pub fn acceptance(&self, a: &BitVector, b: &BitVector, m: &[Ext2]) -> Result<Ratio<u64>> {
        if !self.check(m) {
            return Ok(Ratio::from_integer(0));
        }
        let (ea, eb) = (self.encode(a)?, self.encode(b)?);
        let hits = (0..m.len()).filter(|&i| self.row_product(&ea, &eb, i) == m[i]).count();
        Ok(Ratio::new(hits as u64, m.len() as u64))
    }

    /// The honest message with its prefix forced to zero and the free rows
    /// kept, re-extended to a codeword: the cheating message that agrees
    /// with the honest one on the most informative rows.
    pub fn repaired_message(&self, a: &BitVector, b: &BitVector) -> Result<Vec<Ext2>> {
        let honest = self.honest_message(a, b)?;
        let s = self.side;
        let mut prefix = honest[..2 * s - 1].to_vec();
        prefix[..s].fill(Ext2::ZERO);
        self.code.product_codeword_from_prefix(&prefix)
    }

    /// Random check-passing messages, deterministic in `seed`.
    pub fn cheating_messages(&self, count: usize, seed: u64) -> Vec<Vec<Ext2>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, p) = (self.side, self.prime());
        (0..count)
            .map(|_| {
                let mut prefix = vec![Ext2::ZERO; 2 * s - 1];
                for slot in prefix.iter_mut().skip(s) {
                    *slot = Ext2::base(rng.gen_range(0..p));
                }
                self.code
                    .product_codeword_from_prefix(&prefix)
                    .expect("prefix has the product-code dimension")
            })
            .collect()
    }
}

/// Acceptance probability of the baseline protocol. With `honest` the
/// honest message is used; otherwise the best of the repaired message and
/// a fixed set of random check-passing messages.
pub fn aw09_disjointness_baseline(a: &BitVector, b: &BitVector, honest: bool) -> Result<Ratio<u64>> {
    let proto = Aw09::new(a.len())?;
    if honest {
        return proto.acceptance(a, b, &proto.honest_message(a, b)?);
    }
    let mut best = proto.acceptance(a, b, &proto.repaired_message(a, b)?)?;
    for m in proto.cheating_messages(CHEATING_SAMPLES, 0) {
        best = best.max(proto.acceptance(a, b, &m)?);
    }
    Ok(best)
}
