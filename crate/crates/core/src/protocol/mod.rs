//! Merlin–Arthur protocol for inner product over a small alphabet.
//!
//! Alice holds `a ∈ {0,1}^d` and the claimed value `σ`, Bob holds `b`. Both
//! view their vector as a `(d/T) × T` matrix (row-major, entry `(i, j)` is
//! bit `i·T + j`, zero-based), encode every column with one systematic code
//! per prime `p_ℓ`, and split each GF(p_ℓ²) entry into its two
//! GF(p_ℓ) coefficients. Merlin sends integer column-product sums; Alice
//! checks them against `σ` and against the product code; then a public
//! random point `(ℓ, i, α, β)` selects the triplet `(a′, b′, σ′)`.
//!
//! Integer quantities (`m0`, `m_{ℓ,α,β}`, `σ′`) never wrap: they are
//! reduced into GF(p_ℓ) or GF(p_ℓ²) only when Alice assembles `m_ℓ`.
//!
//! The randomness space is tiny, so every probability here is computed
//! exactly by enumerating it.

pub mod adversary;
pub mod aw09;

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;

use crate::bits::BitVector;
use crate::codes::MultCodePair;
use crate::error::{Error, Result};
use crate::gf::{Ext2, QuadExtField};
use crate::params::{bits_for, ProtocolParams};

pub use adversary::{adversarial_merlin_samples, Strategy};
pub use aw09::{aw09_disjointness_baseline, Aw09};

/// Protocol instantiation: parameters plus one field and code pair per prime.
#[derive(Clone, Debug)]
pub struct Protocol {
    params: ProtocolParams,
    fields: Vec<QuadExtField>,
    codes: Vec<MultCodePair>,
}

/// One party's encoded matrix for prime `ℓ`: `n_ℓ × T`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Ext2>,
}

impl EncodedMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> Ext2 {
        self.entries[i * self.cols + j]
    }

    /// Entry `(i, j)` of the coefficient matrix `x^{(ℓ, α)}`.
    pub fn coeff(&self, alpha: usize, i: usize, j: usize) -> u64 {
        let e = self.entry(i, j);
        if alpha == 0 {
            e.c0
        } else {
            e.c1
        }
    }

    pub fn coeff_row(&self, alpha: usize, i: usize) -> Vec<u64> {
        (0..self.cols).map(|j| self.coeff(alpha, i, j)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Ext2> {
        (0..self.rows).map(|i| self.entry(i, j)).collect()
    }
}

/// A party's input after column encoding under every prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedInput {
    bits: BitVector,
    per_prime: Vec<EncodedMatrix>,
}

impl EncodedInput {
    /// The (zero-padded) input vector.
    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    pub fn prime(&self, l: usize) -> &EncodedMatrix {
        &self.per_prime[l]
    }
}

/// Merlin's message: `m0` and the parts `m_{ℓ,α,β}`, indexed `2α + β`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MerlinMessage {
    pub m0: Vec<u64>,
    pub parts: Vec<[Vec<u64>; 4]>,
}

impl MerlinMessage {
    pub fn zeros(params: &ProtocolParams) -> Self {
        Self {
            m0: vec![0; params.msg_len],
            parts: params
                .code_lens
                .iter()
                .map(|&n| std::array::from_fn(|_| vec![0; n]))
                .collect(),
        }
    }

    pub fn part(&self, l: usize, alpha: usize, beta: usize) -> &[u64] {
        &self.parts[l][2 * alpha + beta]
    }

    pub fn part_mut(&mut self, l: usize, alpha: usize, beta: usize) -> &mut Vec<u64> {
        &mut self.parts[l][2 * alpha + beta]
    }

    /// Shape and entry-bound check.
    pub fn validate(&self, params: &ProtocolParams) -> std::result::Result<(), RejectReason> {
        if self.m0.len() != params.msg_len || self.parts.len() != params.num_primes() {
            return Err(RejectReason::Malformed(format!(
                "expected {} m0 entries and {} prime blocks, got {} and {}",
                params.msg_len,
                params.num_primes(),
                self.m0.len(),
                self.parts.len()
            )));
        }
        if let Some(&x) = self.m0.iter().find(|&&x| x > params.m0_bound()) {
            return Err(RejectReason::EntryBound {
                value: x,
                bound: params.m0_bound(),
            });
        }
        let bound = params.part_bound();
        for (l, block) in self.parts.iter().enumerate() {
            for part in block {
                if part.len() != params.code_lens[l] {
                    return Err(RejectReason::Malformed(format!(
                        "prime block {} has a part of length {}, expected {}",
                        l + 1,
                        part.len(),
                        params.code_lens[l]
                    )));
                }
                if let Some(&x) = part.iter().find(|&&x| x > bound) {
                    return Err(RejectReason::EntryBound { value: x, bound });
                }
            }
        }
        Ok(())
    }

    /// Fixed-width big-endian serialization: `m0`, then parts in
    /// `(ℓ, α, β)` lexicographic order.
    pub fn to_bits(&self, params: &ProtocolParams) -> BitVector {
        let w0 = bits_for(params.m0_bound()) as usize;
        let w1 = bits_for(params.part_bound()) as usize;
        let mut out = BitVector::zeros(params.merlin_bits as usize);
        let mut pos = 0;
        let mut put = |value: u64, width: usize| {
            for k in 0..width {
                if value >> (width - 1 - k) & 1 == 1 {
                    out.set(pos + k, true);
                }
            }
            pos += width;
        };
        for &x in &self.m0 {
            put(x, w0);
        }
        for block in &self.parts {
            for part in block {
                for &x in part {
                    put(x, w1);
                }
            }
        }
        out
    }

    pub fn from_bits(params: &ProtocolParams, bits: &BitVector) -> Result<Self> {
        if bits.len() as u64 != params.merlin_bits {
            return Err(Error::DimensionMismatch {
                expected: params.merlin_bits as usize,
                got: bits.len(),
            });
        }
        let w0 = bits_for(params.m0_bound()) as usize;
        let w1 = bits_for(params.part_bound()) as usize;
        let mut pos = 0;
        let mut take = |width: usize| {
            let v = (0..width).fold(0u64, |acc, k| acc << 1 | bits.get(pos + k) as u64);
            pos += width;
            v
        };
        let mut msg = MerlinMessage::zeros(params);
        for x in msg.m0.iter_mut() {
            *x = take(w0);
        }
        for block in msg.parts.iter_mut() {
            for part in block.iter_mut() {
                for x in part.iter_mut() {
                    *x = take(w1);
                }
            }
        }
        msg.validate(params).map_err(Error::Rejected)?;
        Ok(msg)
    }
}

/// Why Alice rejected. Prime and row indices are zero-based internally and
/// printed one-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    Malformed(String),
    EntryBound { value: u64, bound: u64 },
    /// Check 2a: `Σ m0 ≠ σ`.
    SumMismatch { sum: u64, sigma: u64 },
    /// Check 2b: systematic rows disagree with `m0`.
    Consistency { prime_index: usize, row: usize },
    /// Check 2c: assembled `m_ℓ` is not a product-code codeword.
    NotProductCodeword { prime_index: usize },
}

impl RejectReason {
    /// Short tag naming the failed check.
    pub fn check(&self) -> &'static str {
        match self {
            RejectReason::Malformed(_) | RejectReason::EntryBound { .. } => "bounds",
            RejectReason::SumMismatch { .. } => "2a",
            RejectReason::Consistency { .. } => "2b",
            RejectReason::NotProductCodeword { .. } => "2c",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Malformed(msg) => write!(f, "malformed message: {msg}"),
            RejectReason::EntryBound { value, bound } => {
                write!(f, "entry {value} exceeds bound {bound}")
            }
            RejectReason::SumMismatch { sum, sigma } => {
                write!(f, "check 2a: sum of m0 is {sum}, claimed {sigma}")
            }
            RejectReason::Consistency { prime_index, row } => write!(
                f,
                "check 2b: prime {} row {} disagrees with m0",
                prime_index + 1,
                row + 1
            ),
            RejectReason::NotProductCodeword { prime_index } => write!(
                f,
                "check 2c: m_l for prime {} is not a product-code codeword",
                prime_index + 1
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// Public randomness `(ℓ*, i*, α*, β*)`, zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RandomnessPoint {
    pub prime_index: usize,
    pub row: usize,
    pub alpha: usize,
    pub beta: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripletOutput {
    pub a_prime: Vec<u64>,
    pub b_prime: Vec<u64>,
    pub sigma_prime: u64,
}

impl TripletOutput {
    pub fn inner_product(&self) -> u64 {
        self.a_prime.iter().zip(&self.b_prime).map(|(x, y)| x * y).sum()
    }

    pub fn matches(&self) -> bool {
        self.inner_product() == self.sigma_prime
    }
}

impl Protocol {
    pub fn new(params: ProtocolParams) -> Result<Self> {
        let fields = params
            .primes
            .iter()
            .zip(&params.irreducibles)
            .map(|(&p, &(q0, q1))| QuadExtField::with_modulus(p, q0, q1))
            .collect::<Result<Vec<_>>>()?;
        let codes = fields
            .iter()
            .zip(&params.code_lens)
            .map(|(&field, &n)| MultCodePair::new(field, params.msg_len, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params,
            fields,
            codes,
        })
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn field(&self, l: usize) -> &QuadExtField {
        &self.fields[l]
    }

    pub fn code(&self, l: usize) -> &MultCodePair {
        &self.codes[l]
    }

    fn padded(&self, x: &BitVector) -> Result<BitVector> {
        let p = &self.params;
        if x.len() == p.dim {
            Ok(x.clone())
        } else if x.len() == p.requested_dim {
            Ok(x.zero_extend(p.dim))
        } else {
            Err(Error::DimensionMismatch {
                expected: p.requested_dim,
                got: x.len(),
            })
        }
    }

    /// Matrix-view entry `(i, j)` of a (padded) input.
    pub fn matrix_entry(&self, x: &BitVector, i: usize, j: usize) -> bool {
        x.get(i * self.params.block_width + j)
    }

    pub fn encode_input(&self, x: &BitVector) -> Result<EncodedInput> {
        let bits = self.padded(x)?;
        let (k, t) = (self.params.msg_len, self.params.block_width);
        let per_prime = self
            .codes
            .iter()
            .map(|code| {
                let n = code.codeword_len();
                let mut entries = vec![Ext2::ZERO; n * t];
                for j in 0..t {
                    let column: Vec<Ext2> = (0..k)
                        .map(|i| Ext2::base(self.matrix_entry(&bits, i, j) as u64))
                        .collect();
                    for (i, symbol) in code.encode(&column)?.into_iter().enumerate() {
                        entries[i * t + j] = symbol;
                    }
                }
                Ok(EncodedMatrix {
                    rows: n,
                    cols: t,
                    entries,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EncodedInput { bits, per_prime })
    }

    /// Honest Merlin on already-encoded inputs.
    pub fn honest_message(&self, a: &EncodedInput, b: &EncodedInput) -> MerlinMessage {
        let (k, t) = (self.params.msg_len, self.params.block_width);
        let m0 = (0..k)
            .map(|i| {
                (0..t)
                    .filter(|&j| self.matrix_entry(&a.bits, i, j) && self.matrix_entry(&b.bits, i, j))
                    .count() as u64
            })
            .collect();
        let parts = a
            .per_prime
            .iter()
            .zip(&b.per_prime)
            .map(|(ea, eb)| {
                std::array::from_fn(|ab| {
                    let (alpha, beta) = (ab / 2, ab % 2);
                    (0..ea.rows)
                        .map(|i| (0..t).map(|j| ea.coeff(alpha, i, j) * eb.coeff(beta, i, j)).sum())
                        .collect()
                })
            })
            .collect();
        MerlinMessage { m0, parts }
    }

    pub fn honest_merlin(&self, a: &BitVector, b: &BitVector) -> Result<MerlinMessage> {
        Ok(self.honest_message(&self.encode_input(a)?, &self.encode_input(b)?))
    }

    /// `m_ℓ = m_{ℓ,0,0} + (m_{ℓ,0,1} + m_{ℓ,1,0})·X + m_{ℓ,1,1}·X² mod (p_ℓ, Q_ℓ)`.
    pub fn assemble(&self, msg: &MerlinMessage, l: usize) -> Vec<Ext2> {
        let field = &self.fields[l];
        let [m00, m01, m10, m11] = &msg.parts[l];
        (0..m00.len())
            .map(|i| field.reduce_quadratic(m00[i], m01[i] + m10[i], m11[i]))
            .collect()
    }

    /// Alice's checks 2a–2c. Depends only on the message and `σ`.
    pub fn alice_check(&self, msg: &MerlinMessage, sigma: u64) -> Verdict {
        if let Err(reason) = msg.validate(&self.params) {
            return Verdict::Reject(reason);
        }
        let sum: u64 = msg.m0.iter().sum();
        if sum != sigma {
            return Verdict::Reject(RejectReason::SumMismatch { sum, sigma });
        }
        for l in 0..self.params.num_primes() {
            for (i, &m0) in msg.m0.iter().enumerate() {
                let consistent = msg.part(l, 0, 0)[i] == m0
                    && msg.part(l, 0, 1)[i] == 0
                    && msg.part(l, 1, 0)[i] == 0
                    && msg.part(l, 1, 1)[i] == 0;
                if !consistent {
                    return Verdict::Reject(RejectReason::Consistency {
                        prime_index: l,
                        row: i,
                    });
                }
            }
        }
        for l in 0..self.params.num_primes() {
            if !self.codes[l].is_product_codeword(&self.assemble(msg, l)) {
                return Verdict::Reject(RejectReason::NotProductCodeword { prime_index: l });
            }
        }
        Verdict::Accept
    }

    /// All randomness points in `(ℓ, i, α, β)` lexicographic order.
    pub fn randomness_points(&self) -> impl Iterator<Item = RandomnessPoint> + '_ {
        self.params.code_lens.iter().enumerate().flat_map(|(l, &n)| {
            (0..n).flat_map(move |row| {
                (0..4).map(move |ab| RandomnessPoint {
                    prime_index: l,
                    row,
                    alpha: ab / 2,
                    beta: ab % 2,
                })
            })
        })
    }

    /// Probability of one point: `1/(#primes) · 1/n_ℓ · 1/4`.
    pub fn weight(&self, r: &RandomnessPoint) -> Ratio<u64> {
        Ratio::new(1, 4 * self.params.num_primes() as u64 * self.params.code_lens[r.prime_index] as u64)
    }

    /// Common denominator `W` of all point weights; point `r` has weight
    /// `multiplicity(r)/W`.
    pub fn weight_denominator(&self) -> u64 {
        let l = self.params.num_primes() as u64;
        self.params
            .code_lens
            .iter()
            .fold(1u64, |acc, &n| acc.lcm(&(4 * l * n as u64)))
    }

    pub fn multiplicity(&self, r: &RandomnessPoint) -> u64 {
        let w = self.weight(r);
        self.weight_denominator() / w.denom() * w.numer()
    }

    /// `a′ = row_{i*}(a^{(ℓ*, α*)})`; depends only on Alice's input and `r`.
    pub fn alice_output(&self, a: &EncodedInput, r: &RandomnessPoint) -> Vec<u64> {
        a.per_prime[r.prime_index].coeff_row(r.alpha, r.row)
    }

    /// `b′ = row_{i*}(b^{(ℓ*, β*)})`; depends only on Bob's input and `r`.
    pub fn bob_output(&self, b: &EncodedInput, r: &RandomnessPoint) -> Vec<u64> {
        b.per_prime[r.prime_index].coeff_row(r.beta, r.row)
    }

    /// `σ′ = m_{ℓ*,α*,β*}(i*)`; depends only on the message and `r`.
    pub fn sigma_output(&self, msg: &MerlinMessage, r: &RandomnessPoint) -> u64 {
        msg.part(r.prime_index, r.alpha, r.beta)[r.row]
    }

    pub fn run_point(
        &self,
        a: &EncodedInput,
        b: &EncodedInput,
        msg: &MerlinMessage,
        r: &RandomnessPoint,
    ) -> TripletOutput {
        TripletOutput {
            a_prime: self.alice_output(a, r),
            b_prime: self.bob_output(b, r),
            sigma_prime: self.sigma_output(msg, r),
        }
    }

    /// Exact probability that `⟨a′, b′⟩ = σ′`, zero if Alice rejects.
    pub fn acceptance_probability_encoded(
        &self,
        a: &EncodedInput,
        b: &EncodedInput,
        sigma: u64,
        msg: &MerlinMessage,
    ) -> Ratio<u64> {
        if !self.alice_check(msg, sigma).is_accept() {
            return Ratio::from_integer(0);
        }
        let matched: u64 = self
            .randomness_points()
            .filter(|r| self.run_point(a, b, msg, r).matches())
            .map(|r| self.multiplicity(&r))
            .sum();
        Ratio::new(matched, self.weight_denominator())
    }

    pub fn acceptance_probability(
        &self,
        a: &BitVector,
        b: &BitVector,
        sigma: u64,
        msg: &MerlinMessage,
    ) -> Result<Ratio<u64>> {
        let (ea, eb) = (self.encode_input(a)?, self.encode_input(b)?);
        Ok(self.acceptance_probability_encoded(&ea, &eb, sigma, msg))
    }

    /// One line per point: `ℓ* i* α* β* σ′ ⟨a′,b′⟩ match?`, `ℓ*` and `i*`
    /// one-based.
    pub fn transcript(&self, a: &EncodedInput, b: &EncodedInput, msg: &MerlinMessage) -> String {
        let mut out = String::new();
        for r in self.randomness_points() {
            let triplet = self.run_point(a, b, msg, &r);
            out.push_str(&format!(
                "{} {} {} {} {} {} {}\n",
                r.prime_index + 1,
                r.row + 1,
                r.alpha,
                r.beta,
                triplet.sigma_prime,
                triplet.inner_product(),
                if triplet.matches() { "yes" } else { "no" }
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BinaryVector;
    use crate::params::plan_protocol;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bits(d: usize, rng: &mut ChaCha8Rng) -> BitVector {
        BitVector::from_bools(&(0..d).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>())
    }

    fn protocol(d: usize, t: usize) -> Protocol {
        Protocol::new(plan_protocol(d, t).unwrap()).unwrap()
    }

    #[test]
    fn zero_inputs_give_zero_message() {
        let pr = protocol(8, 2);
        let z = BitVector::zeros(8);
        let msg = pr.honest_merlin(&z, &z).unwrap();
        assert!(msg.m0.iter().all(|&x| x == 0));
        assert!(msg.parts.iter().flatten().flatten().all(|&x| x == 0));
    }

    #[test]
    fn all_ones_m0() {
        let pr = protocol(4, 2);
        let ones = BitVector::ones(4);
        let msg = pr.honest_merlin(&ones, &ones).unwrap();
        assert_eq!(msg.m0, vec![2, 2]);
    }

    #[test]
    fn m0_sums_to_inner_product() {
        let pr = protocol(24, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (a, b) = (random_bits(24, &mut rng), random_bits(24, &mut rng));
            let msg = pr.honest_merlin(&a, &b).unwrap();
            assert_eq!(msg.m0.iter().sum::<u64>(), a.dot(&b));
        }
    }

    #[test]
    fn honest_message_accepted_with_probability_one() {
        let pr = protocol(12, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let (a, b) = (random_bits(12, &mut rng), random_bits(12, &mut rng));
            let msg = pr.honest_merlin(&a, &b).unwrap();
            let sigma = a.dot(&b);
            assert_eq!(pr.alice_check(&msg, sigma), Verdict::Accept);
            assert_eq!(pr.acceptance_probability(&a, &b, sigma, &msg).unwrap(), Ratio::from_integer(1));
        }
    }

    #[test]
    fn wrong_sigma_rejected_at_2a() {
        let pr = protocol(8, 2);
        let a: BitVector = "11011010".parse().unwrap();
        let b: BitVector = "10011110".parse().unwrap();
        let msg = pr.honest_merlin(&a, &b).unwrap();
        let verdict = pr.alice_check(&msg, a.dot(&b) + 1);
        assert!(matches!(verdict, Verdict::Reject(RejectReason::SumMismatch { .. })));
        assert_eq!(pr.acceptance_probability(&a, &b, a.dot(&b) + 1, &msg).unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn bumped_systematic_entry_rejected_at_2b() {
        let pr = protocol(8, 2);
        let a: BitVector = "11011010".parse().unwrap();
        let b: BitVector = "10011110".parse().unwrap();
        let mut msg = pr.honest_merlin(&a, &b).unwrap();
        msg.part_mut(3, 0, 0)[1] += 1;
        assert_eq!(
            pr.alice_check(&msg, a.dot(&b)),
            Verdict::Reject(RejectReason::Consistency { prime_index: 3, row: 1 })
        );
        let mut msg = pr.honest_merlin(&a, &b).unwrap();
        msg.part_mut(0, 1, 1)[0] = 1;
        assert!(matches!(
            pr.alice_check(&msg, a.dot(&b)),
            Verdict::Reject(RejectReason::Consistency { prime_index: 0, row: 0 })
        ));
    }

    #[test]
    fn bumped_parity_entry_rejected_at_2c() {
        let pr = protocol(8, 2);
        let a: BitVector = "11011010".parse().unwrap();
        let b: BitVector = "10011110".parse().unwrap();
        let mut msg = pr.honest_merlin(&a, &b).unwrap();
        let k = pr.params().msg_len;
        msg.part_mut(5, 0, 1)[k + 3] += 1;
        assert_eq!(
            pr.alice_check(&msg, a.dot(&b)),
            Verdict::Reject(RejectReason::NotProductCodeword { prime_index: 5 })
        );
    }

    #[test]
    fn all_zero_message_on_nonzero_sigma() {
        let pr = protocol(8, 2);
        let a = BitVector::ones(8);
        let msg = MerlinMessage::zeros(pr.params());
        assert_eq!(pr.acceptance_probability(&a, &a, 3, &msg).unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn weights_sum_to_one() {
        let pr = protocol(10, 4);
        let total = pr
            .randomness_points()
            .fold(Ratio::from_integer(0u64), |acc, r| acc + pr.weight(&r));
        assert_eq!(total, Ratio::from_integer(1));
        assert_eq!(pr.randomness_points().count() as u64, pr.params().randomness_space_size);
        assert_eq!(pr.weight_denominator(), pr.params().randomness_space_size);
    }

    #[test]
    fn systematic_rows_and_coefficient_split() {
        let pr = protocol(12, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_bits(12, &mut rng);
        let enc = pr.encode_input(&a).unwrap();
        for l in 0..pr.params().num_primes() {
            let m = enc.prime(l);
            let field = pr.field(l);
            for i in 0..m.rows() {
                for j in 0..3 {
                    let e = m.entry(i, j);
                    let x = Ext2::new(0, 1);
                    let rebuilt = field.add(Ext2::base(m.coeff(0, i, j)), field.mul(Ext2::base(m.coeff(1, i, j)), x));
                    assert_eq!(rebuilt, e);
                    if i < pr.params().msg_len {
                        assert_eq!(m.coeff(0, i, j), pr.matrix_entry(&a, i, j) as u64);
                        assert_eq!(m.coeff(1, i, j), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn assembled_message_equals_field_column_products() {
        let pr = protocol(8, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let (a, b) = (random_bits(8, &mut rng), random_bits(8, &mut rng));
            let (ea, eb) = (pr.encode_input(&a).unwrap(), pr.encode_input(&b).unwrap());
            let msg = pr.honest_message(&ea, &eb);
            for l in 0..pr.params().num_primes() {
                let code = pr.code(l);
                let field = pr.field(l);
                let mut expected = vec![Ext2::ZERO; code.codeword_len()];
                for j in 0..4 {
                    let prod = code.star(&ea.prime(l).column(j), &eb.prime(l).column(j));
                    for (e, p) in expected.iter_mut().zip(prod) {
                        *e = field.add(*e, p);
                    }
                }
                assert_eq!(pr.assemble(&msg, l), expected);
            }
        }
    }

    #[test]
    fn party_outputs_are_separated() {
        let pr = protocol(8, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_bits(8, &mut rng);
        let (b1, b2) = (random_bits(8, &mut rng), random_bits(8, &mut rng));
        let ea = pr.encode_input(&a).unwrap();
        let (e1, e2) = (pr.encode_input(&b1).unwrap(), pr.encode_input(&b2).unwrap());
        let msg1 = pr.honest_message(&ea, &e1);
        let msg2 = pr.honest_message(&ea, &e2);
        for r in pr.randomness_points().step_by(7) {
            assert_eq!(pr.run_point(&ea, &e1, &msg1, &r).a_prime, pr.run_point(&ea, &e2, &msg2, &r).a_prime);
            assert_eq!(pr.bob_output(&e1, &r), pr.run_point(&ea, &e1, &msg2, &r).b_prime);
        }
    }

    #[test]
    fn zero_alice_gives_zero_rows() {
        let pr = protocol(8, 2);
        let a = BitVector::zeros(8);
        let b = BitVector::ones(8);
        let (ea, eb) = (pr.encode_input(&a).unwrap(), pr.encode_input(&b).unwrap());
        let msg = pr.honest_message(&ea, &eb);
        for r in pr.randomness_points() {
            let out = pr.run_point(&ea, &eb, &msg, &r);
            assert!(out.a_prime.iter().all(|&x| x == 0));
            assert_eq!(out.sigma_prime, 0);
        }
    }

    #[test]
    fn serialization_round_trip_and_length() {
        let pr = protocol(8, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (a, b) = (random_bits(8, &mut rng), random_bits(8, &mut rng));
        let msg = pr.honest_merlin(&a, &b).unwrap();
        let bits = msg.to_bits(pr.params());
        assert_eq!(bits.len() as u64, pr.params().merlin_bits);
        assert_eq!(MerlinMessage::from_bits(pr.params(), &bits).unwrap(), msg);
    }

    #[test]
    fn deserialization_checks_bounds() {
        let pr = protocol(4, 4);
        let mut msg = MerlinMessage::zeros(pr.params());
        // m0 entries take 3 bits (T = 4), so 7 fits the width but breaks the bound
        msg.m0[0] = 7;
        let bits = msg.to_bits(pr.params());
        assert!(matches!(
            MerlinMessage::from_bits(pr.params(), &bits),
            Err(Error::Rejected(RejectReason::EntryBound { value: 7, bound: 4 }))
        ));
    }

    #[test]
    fn padded_input_is_accepted() {
        let pr = protocol(7, 4);
        let a: BitVector = "1011011".parse().unwrap();
        let b: BitVector = "1110001".parse().unwrap();
        let msg = pr.honest_merlin(&a, &b).unwrap();
        assert_eq!(pr.acceptance_probability(&a, &b, a.dot(&b), &msg).unwrap(), Ratio::from_integer(1));
        assert!(pr.encode_input(&BitVector::zeros(5)).is_err());
    }

    #[test]
    fn transcript_has_one_line_per_point() {
        let pr = protocol(4, 2);
        let a: BitVector = "1101".parse().unwrap();
        let (ea, eb) = (pr.encode_input(&a).unwrap(), pr.encode_input(&a).unwrap());
        let msg = pr.honest_message(&ea, &eb);
        let text = pr.transcript(&ea, &eb, &msg);
        assert_eq!(text.lines().count() as u64, pr.params().randomness_space_size);
        assert!(text.lines().all(|l| l.ends_with("yes") && l.split(' ').count() == 7));
        assert!(text.starts_with("1 1 0 0 "));
    }
}
