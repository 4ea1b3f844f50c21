//! Cheating Merlins. Every strategy produces messages that pass all of
//! Alice's checks for the claimed `σ`; a message that would be rejected
//! outright says nothing about soundness.
//!
//! The common tool is codeword surgery: a `C⋆` codeword `D` is chosen by
//! its first `2k − 1` symbols (zero, or matching an `m0` shift, on the
//! systematic rows and free on the next `k − 1`), and each parity row `i`
//! of the integer parts is moved so that the assembled `m_ℓ(i)` shifts by
//! `D(i)`. Since `C⋆` is linear, the result stays a codeword.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MerlinMessage, Protocol, Verdict};
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::gf::Ext2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Honest message with `m0` shifted to sum to `σ`, parity rows repaired.
    ShiftedHonest,
    /// Fresh random `C⋆` codewords consistent with a random `m0` summing to `σ`.
    RandomCodeword,
    /// A shifted honest message with one parity entry altered and repaired.
    EntryCorruption,
    /// A shifted honest message with one prime block replaced by a different codeword.
    BlockCorruption,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::ShiftedHonest,
        Strategy::RandomCodeword,
        Strategy::EntryCorruption,
        Strategy::BlockCorruption,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::ShiftedHonest => "shifted-honest",
            Strategy::RandomCodeword => "random-codeword",
            Strategy::EntryCorruption => "entry-corruption",
            Strategy::BlockCorruption => "block-corruption",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy {s:?}")))
    }
}

/// Up to `count` check-passing messages for claim `σ` on inputs `(a, b)`.
///
/// Deterministic in `seed`. Returns fewer messages (possibly none) when the
/// strategy cannot meet the checks, e.g. when `σ` exceeds `(d/T)·T`.
pub fn adversarial_merlin_samples(
    protocol: &Protocol,
    a: &BitVector,
    b: &BitVector,
    sigma: u64,
    strategy: Strategy,
    count: usize,
    seed: u64,
) -> Result<Vec<MerlinMessage>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let params = protocol.params();
    let capacity = params.msg_len as u64 * params.m0_bound();
    if sigma > capacity {
        log::warn!(
            "{strategy}: sigma {sigma} exceeds the largest representable sum {capacity}, no messages"
        );
        return Ok(Vec::new());
    }
    let honest = protocol.honest_merlin(a, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let msg = match strategy {
            Strategy::ShiftedHonest => shifted_honest(protocol, &honest, sigma, true, &mut rng),
            Strategy::RandomCodeword => random_codeword(protocol, sigma, &mut rng),
            Strategy::EntryCorruption => {
                let base = shifted_honest(protocol, &honest, sigma, false, &mut rng);
                corrupt_entry(protocol, base, &mut rng)
            }
            Strategy::BlockCorruption => {
                let base = shifted_honest(protocol, &honest, sigma, false, &mut rng);
                corrupt_block(protocol, base, &mut rng)
            }
        };
        match protocol.alice_check(&msg, sigma) {
            Verdict::Accept => out.push(msg),
            Verdict::Reject(reason) => {
                log::warn!("{strategy}: generated message rejected ({reason}), skipped")
            }
        }
    }
    Ok(out)
}

/// Random `m0` with entries in `0..=bound` summing to `sigma`, starting from
/// `start` and moving mass at random rows.
fn reshape_m0(start: &[u64], sigma: u64, bound: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut m0 = start.to_vec();
    let mut sum: u64 = m0.iter().sum();
    let rows = m0.len();
    while sum != sigma {
        let i = rng.gen_range(0..rows);
        if sum < sigma && m0[i] < bound {
            let step = rng.gen_range(1..=(sigma - sum).min(bound - m0[i]));
            m0[i] += step;
            sum += step;
        } else if sum > sigma && m0[i] > 0 {
            let step = rng.gen_range(1..=(sum - sigma).min(m0[i]));
            m0[i] -= step;
            sum -= step;
        }
    }
    // a zero-sum transfer so the shift is not always confined to few rows
    if rows >= 2 && rng.gen_bool(0.5) {
        let (i, j) = (rng.gen_range(0..rows), rng.gen_range(0..rows));
        if i != j && m0[i] > 0 && m0[j] < bound {
            let step = rng.gen_range(1..=m0[i].min(bound - m0[j]));
            m0[i] -= step;
            m0[j] += step;
        }
    }
    m0
}

fn random_element(protocol: &Protocol, l: usize, rng: &mut ChaCha8Rng) -> Ext2 {
    let p = protocol.params().primes[l];
    Ext2::new(rng.gen_range(0..p), rng.gen_range(0..p))
}

/// Representative of `current + delta (mod p)` in `0..=bound`, nearest to
/// `current`.
fn shift_residue(current: u64, delta: u64, p: u64, bound: u64) -> u64 {
    let up = current + delta % p;
    if up <= bound && (delta % p <= p / 2 || up < p) {
        up
    } else {
        up - p
    }
}

/// Adds `delta` to the assembled symbol of row `row` of prime `l` by moving
/// `m_{ℓ,0,0}` and `m_{ℓ,0,1}`, which enter the free and the linear
/// coefficient with weight one.
fn apply_symbol_delta(protocol: &Protocol, msg: &mut MerlinMessage, l: usize, row: usize, delta: Ext2) {
    let p = protocol.params().primes[l];
    let bound = protocol.params().part_bound();
    let m00 = &mut msg.part_mut(l, 0, 0)[row];
    *m00 = shift_residue(*m00, delta.c0, p, bound);
    let m01 = &mut msg.part_mut(l, 0, 1)[row];
    *m01 = shift_residue(*m01, delta.c1, p, bound);
}

/// Applies the `C⋆` codeword `D` determined by `prefix` to the parity rows
/// `k..n` of prime `l`. The systematic rows of `prefix` must already be
/// reflected in `m0`.
fn apply_codeword_delta(protocol: &Protocol, msg: &mut MerlinMessage, l: usize, prefix: &[Ext2]) {
    let k = protocol.params().msg_len;
    let delta = protocol
        .code(l)
        .product_codeword_from_prefix(prefix)
        .expect("prefix has the product-code dimension");
    for (row, &d) in delta.iter().enumerate().skip(k) {
        if !d.is_zero() {
            apply_symbol_delta(protocol, msg, l, row, d);
        }
    }
}

fn shifted_honest(
    protocol: &Protocol,
    honest: &MerlinMessage,
    sigma: u64,
    randomize_free_rows: bool,
    rng: &mut ChaCha8Rng,
) -> MerlinMessage {
    let params = protocol.params();
    let k = params.msg_len;
    let new_m0 = reshape_m0(&honest.m0, sigma, params.m0_bound(), rng);
    let mut msg = honest.clone();
    for l in 0..params.num_primes() {
        let field = protocol.field(l);
        let mut prefix = vec![Ext2::ZERO; 2 * k - 1];
        for i in 0..k {
            let p = params.primes[l];
            prefix[i] = field.sub(Ext2::base(new_m0[i] % p), Ext2::base(honest.m0[i] % p));
        }
        if randomize_free_rows {
            for slot in prefix.iter_mut().skip(k) {
                *slot = random_element(protocol, l, rng);
            }
        }
        apply_codeword_delta(protocol, &mut msg, l, &prefix);
        for i in 0..k {
            msg.part_mut(l, 0, 0)[i] = new_m0[i];
        }
    }
    msg.m0 = new_m0;
    msg
}

fn random_codeword(protocol: &Protocol, sigma: u64, rng: &mut ChaCha8Rng) -> MerlinMessage {
    let params = protocol.params();
    let k = params.msg_len;
    let bound = params.part_bound();
    let m0 = reshape_m0(&vec![0; k], sigma, params.m0_bound(), rng);
    let mut msg = MerlinMessage::zeros(params);
    for l in 0..params.num_primes() {
        let p = params.primes[l];
        let (q0, q1) = params.irreducibles[l];
        let mut prefix: Vec<Ext2> = m0.iter().map(|&x| Ext2::base(x % p)).collect();
        prefix.extend((k..2 * k - 1).map(|_| random_element(protocol, l, rng)));
        let word = protocol
            .code(l)
            .product_codeword_from_prefix(&prefix)
            .expect("prefix has the product-code dimension");
        for i in 0..k {
            msg.part_mut(l, 0, 0)[i] = m0[i];
        }
        for (i, e) in word.iter().enumerate().skip(k) {
            // c0 = m00 − q0·m11, c1 = m01 + m10 − q1·m11
            let m11 = rng.gen_range(0..p);
            let m10 = rng.gen_range(0..p);
            let m00 = (e.c0 + q0 * m11) % p;
            let m01 = (e.c1 + 2 * p * p - m10 + q1 * m11) % p;
            let lift = |x: u64, rng: &mut ChaCha8Rng| x + p * rng.gen_range(0..=((bound - x) / p).min(3));
            msg.part_mut(l, 0, 0)[i] = lift(m00, rng);
            msg.part_mut(l, 0, 1)[i] = lift(m01, rng);
            msg.part_mut(l, 1, 0)[i] = lift(m10, rng);
            msg.part_mut(l, 1, 1)[i] = lift(m11, rng);
        }
    }
    msg.m0 = m0;
    msg
}

fn corrupt_entry(protocol: &Protocol, mut msg: MerlinMessage, rng: &mut ChaCha8Rng) -> MerlinMessage {
    let params = protocol.params();
    let (k, bound) = (params.msg_len, params.part_bound());
    let l = rng.gen_range(0..params.num_primes());
    let (p, n) = (params.primes[l], params.code_lens[l]);
    let (q0, q1) = params.irreducibles[l];
    let row = rng.gen_range(k..n);
    let kinds: &[u8] = if k >= 2 { &[0, 1, 2, 3] } else { &[0, 1, 2] };
    match *kinds.choose(rng).expect("non-empty") {
        // invisible modulo p: move one part by a multiple of p
        0 => {
            let (alpha, beta) = (rng.gen_range(0..2), rng.gen_range(0..2));
            let x = &mut msg.part_mut(l, alpha, beta)[row];
            let up = (bound - *x) / p;
            let down = *x / p;
            if up > 0 && (down == 0 || rng.gen_bool(0.5)) {
                *x += p * rng.gen_range(1..=up.min(4));
            } else if down > 0 {
                *x -= p * rng.gen_range(1..=down.min(4));
            }
        }
        // m01 and m10 enter the assembly only through their sum
        1 => {
            let (from, to) = if rng.gen_bool(0.5) { ((0, 1), (1, 0)) } else { ((1, 0), (0, 1)) };
            let avail = msg.part(l, from.0, from.1)[row].min(bound - msg.part(l, to.0, to.1)[row]);
            if avail > 0 {
                let step = rng.gen_range(1..=avail);
                msg.part_mut(l, from.0, from.1)[row] -= step;
                msg.part_mut(l, to.0, to.1)[row] += step;
            }
        }
        // raise m11 by s and compensate through the reduction X² = −q1·X − q0
        2 => {
            let s = rng.gen_range(1..p);
            let x = &mut msg.part_mut(l, 1, 1)[row];
            *x = shift_residue(*x, s, p, bound);
            let m00 = &mut msg.part_mut(l, 0, 0)[row];
            *m00 = shift_residue(*m00, q0 * s % p, p, bound);
            let m01 = &mut msg.part_mut(l, 0, 1)[row];
            *m01 = shift_residue(*m01, q1 * s % p, p, bound);
        }
        // change one symbol on a free anchor row and repair the parity rows
        _ => {
            let anchor = rng.gen_range(k..2 * k - 1);
            let mut prefix = vec![Ext2::ZERO; 2 * k - 1];
            while prefix[anchor].is_zero() {
                prefix[anchor] = random_element(protocol, l, rng);
            }
            apply_codeword_delta(protocol, &mut msg, l, &prefix);
        }
    }
    msg
}

fn corrupt_block(protocol: &Protocol, mut msg: MerlinMessage, rng: &mut ChaCha8Rng) -> MerlinMessage {
    let params = protocol.params();
    let k = params.msg_len;
    let l = rng.gen_range(0..params.num_primes());
    let mut prefix = vec![Ext2::ZERO; 2 * k - 1];
    for slot in prefix.iter_mut().skip(k) {
        *slot = random_element(protocol, l, rng);
    }
    apply_codeword_delta(protocol, &mut msg, l, &prefix);
    msg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BinaryVector;
    use crate::params::plan_protocol;
    use num_rational::Ratio;

    fn setup() -> (Protocol, BitVector, BitVector) {
        let pr = Protocol::new(plan_protocol(12, 2).unwrap()).unwrap();
        let a: BitVector = "110110100111".parse().unwrap();
        let b: BitVector = "100111101010".parse().unwrap();
        (pr, a, b)
    }

    #[test]
    fn strategy_names_round_trip() {
        for st in Strategy::ALL {
            assert_eq!(st.name().parse::<Strategy>().unwrap(), st);
        }
        assert!("nope".parse::<Strategy>().is_err());
    }

    #[test]
    fn zero_count_is_empty() {
        let (pr, a, b) = setup();
        for st in Strategy::ALL {
            assert!(adversarial_merlin_samples(&pr, &a, &b, 1, st, 0, 7).unwrap().is_empty());
        }
    }

    #[test]
    fn every_strategy_passes_checks_and_stays_sound() {
        let (pr, a, b) = setup();
        let truth = a.dot(&b);
        let bound = Ratio::new(49, 50);
        for sigma in [0, truth - 1, truth + 1, 12] {
            for st in Strategy::ALL {
                let msgs = adversarial_merlin_samples(&pr, &a, &b, sigma, st, 20, 11).unwrap();
                assert_eq!(msgs.len(), 20, "{st} at sigma {sigma}");
                for m in &msgs {
                    assert!(pr.alice_check(m, sigma).is_accept());
                    assert!(m.validate(pr.params()).is_ok());
                    assert!(pr.acceptance_probability(&a, &b, sigma, m).unwrap() <= bound);
                }
            }
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let (pr, a, b) = setup();
        for st in Strategy::ALL {
            let x = adversarial_merlin_samples(&pr, &a, &b, 2, st, 5, 3).unwrap();
            let y = adversarial_merlin_samples(&pr, &a, &b, 2, st, 5, 3).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn messages_vary() {
        let (pr, a, b) = setup();
        for st in Strategy::ALL {
            let msgs = adversarial_merlin_samples(&pr, &a, &b, 3, st, 30, 5).unwrap();
            let distinct: std::collections::HashSet<_> = msgs.iter().collect();
            assert!(distinct.len() > 1, "{st} produced a single message");
        }
    }

    #[test]
    fn unreachable_sigma_is_skipped() {
        let (pr, a, b) = setup();
        assert!(adversarial_merlin_samples(&pr, &a, &b, 13, Strategy::ShiftedHonest, 5, 1)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn shift_residue_stays_in_range() {
        for p in [5u64, 7, 11] {
            let bound = 2 * p * p;
            for current in 0..=bound {
                for delta in 0..p {
                    let x = shift_residue(current, delta, p, bound);
                    assert!(x <= bound);
                    assert_eq!(x % p, (current + delta) % p);
                }
            }
        }
    }
}
