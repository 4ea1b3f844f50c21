//! Derived parameters for one protocol instantiation and for the
//! IP → Apx-Max-IP reduction.

use crate::error::{Error, Result};
use crate::gadget;
use crate::gf::{find_irreducible_quadratic, primes_from};

/// Everything the protocol derives from `(d, T)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolParams {
    /// Dimension as requested by the caller.
    pub requested_dim: usize,
    /// Dimension after zero-padding to a multiple of `block_width`.
    pub dim: usize,
    /// `T`: number of columns of the matrix view.
    pub block_width: usize,
    /// Smallest `t ≥ 2` with `t^t ≥ T`.
    pub t: u32,
    /// `10t` distinct primes, increasing.
    pub primes: Vec<u64>,
    /// Alphabet bound: the largest prime.
    pub q: u64,
    /// Per-prime irreducible quadratic `(q0, q1)` for `X² + q1·X + q0`.
    pub irreducibles: Vec<(u64, u64)>,
    /// `d/T`, the code message length.
    pub msg_len: usize,
    /// Per-prime codeword length.
    pub code_lens: Vec<usize>,
    /// `Σ_ℓ 4·n_ℓ`: size of the enumerated randomness space.
    pub randomness_space_size: u64,
    /// Bit length of a serialized Merlin message.
    pub merlin_bits: u64,
}

impl ProtocolParams {
    pub fn padding(&self) -> usize {
        self.dim - self.requested_dim
    }

    pub fn num_primes(&self) -> usize {
        self.primes.len()
    }

    /// Upper bound on `m0` entries.
    pub fn m0_bound(&self) -> u64 {
        self.block_width as u64
    }

    /// Upper bound on `m_{ℓ,α,β}` entries and on `σ′`: `T·q²`.
    pub fn part_bound(&self) -> u64 {
        self.block_width as u64 * self.q * self.q
    }
}

/// Bits needed to write any integer in `0..=bound`.
pub fn bits_for(bound: u64) -> u64 {
    (u64::BITS - bound.leading_zeros()) as u64
}

/// Smallest integer `t ≥ 2` with `t^t ≥ block_width`.
pub fn min_self_power(block_width: u64) -> u32 {
    (2u32..)
        .find(|&t| {
            let mut acc: u128 = 1;
            for _ in 0..t {
                acc = acc.saturating_mul(t as u128);
            }
            acc >= block_width as u128
        })
        .expect("t^t grows without bound")
}

fn ceil_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

pub fn plan_protocol(d: usize, block_width: usize) -> Result<ProtocolParams> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if block_width < 2 {
        return Err(Error::InvalidParameter("block width T must be at least 2".into()));
    }
    let msg_len = d.div_ceil(block_width);
    let dim = msg_len * block_width;
    let t = min_self_power(block_width as u64);
    let n = 10 * msg_len;
    // p ≥ t for the divisor count, p² ≥ n so GF(p²) has n evaluation points
    let lower = (t as u64).max(ceil_sqrt(n as u64));
    let primes = primes_from(lower, 10 * t as usize);
    let q = *primes.last().expect("at least 20 primes");
    if let Some(&p) = primes.iter().find(|&&p| p * p < n as u64) {
        return Err(Error::Unrealizable(format!(
            "prime {p} gives a field of size {} < codeword length {n}; need primes of at least {}",
            p * p,
            ceil_sqrt(n as u64)
        )));
    }
    let irreducibles = primes.iter().map(|&p| find_irreducible_quadratic(p)).collect();
    let code_lens = vec![n; primes.len()];
    let randomness_space_size = code_lens.iter().map(|&n| 4 * n as u64).sum();

    let part_bound = (block_width as u64)
        .checked_mul(q * q)
        .ok_or_else(|| Error::Overflow("T·q² exceeds 64 bits".into()))?;
    let merlin_bits = msg_len as u64 * bits_for(block_width as u64)
        + code_lens.iter().map(|&n| 4 * n as u64).sum::<u64>() * bits_for(part_bound);

    Ok(ProtocolParams {
        requested_dim: d,
        dim,
        block_width,
        t,
        primes,
        q,
        irreducibles,
        msg_len,
        code_lens,
        randomness_space_size,
        merlin_bits,
    })
}

/// Concrete numbers behind the `δ` of the IP → Apx-Max-IP reduction.
#[derive(Clone, Debug)]
pub struct ParameterPlan {
    pub epsilon: f64,
    pub c: f64,
    pub set_size: u64,
    /// `⌈c·log₂ N⌉`.
    pub dim: usize,
    pub block_width: usize,
    pub protocol: ProtocolParams,
    pub gadget_dim: u128,
    /// `d′ = W · gadget_dim`.
    pub d_prime: u128,
    /// `δ = 0.01·W/d′`.
    pub delta: f64,
    /// `ε·log₂(N)/2` at the literal `N`.
    pub budget_bits: f64,
    /// Whether `L ≤ ε·log₂(N)/2` at the literal `N`.
    pub budget_met: bool,
    pub search_rounds: u32,
}

const MAX_DOUBLINGS: u32 = 48;

/// Picks the smallest `T` with `L ≤ ε·log₂(N′)/2`, where `N′` is the set
/// size whose `c·log₂ N′` equals the `T`-padded dimension, then derives the
/// protocol and gadget sizes and `δ`.
pub fn plan_reduction(epsilon: f64, c: f64, set_size: u64) -> Result<ParameterPlan> {
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 2), got {epsilon}")));
    }
    if !(c >= 1.0) {
        return Err(Error::InvalidParameter(format!("c must be at least 1, got {c}")));
    }
    if set_size < 2 {
        return Err(Error::InvalidParameter("N must be at least 2".into()));
    }
    let dim = (c * (set_size as f64).log2()).ceil().max(1.0) as usize;

    let fits = |block_width: usize| -> Result<(bool, ProtocolParams)> {
        let params = plan_protocol(dim, block_width)?;
        let budget = epsilon * (params.dim as f64 / c) / 2.0;
        Ok(((params.merlin_bits as f64) <= budget, params))
    };

    let mut rounds = 0;
    let mut hi = 2usize;
    loop {
        rounds += 1;
        let (ok, params) = fits(hi)?;
        if ok {
            break;
        }
        if rounds >= MAX_DOUBLINGS {
            return Err(Error::NonConvergence {
                rounds,
                last_block_width: hi as u64,
                last_bits: params.merlin_bits,
                budget: epsilon * (params.dim as f64 / c) / 2.0,
            });
        }
        hi *= 2;
    }
    // smallest passing T in (hi/2, hi]
    let mut lo = hi / 2;
    while hi - lo > 1 {
        rounds += 1;
        let mid = lo + (hi - lo) / 2;
        if fits(mid)?.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let protocol = fits(hi)?.1;

    let gadget_dim = gadget::dimension_for(protocol.block_width as u64, protocol.q);
    let w = protocol.randomness_space_size as u128;
    let d_prime = w * gadget_dim;
    let delta = 0.01 * w as f64 / d_prime as f64;
    let budget_bits = epsilon * (set_size as f64).log2() / 2.0;
    Ok(ParameterPlan {
        epsilon,
        c,
        set_size,
        dim,
        block_width: hi,
        budget_met: (protocol.merlin_bits as f64) <= budget_bits,
        protocol,
        gadget_dim,
        d_prime,
        delta,
        budget_bits,
        search_rounds: rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::is_prime;

    #[test]
    fn self_power() {
        assert_eq!(min_self_power(2), 2);
        assert_eq!(min_self_power(4), 2);
        assert_eq!(min_self_power(5), 3);
        assert_eq!(min_self_power(27), 3);
        assert_eq!(min_self_power(28), 4);
        assert_eq!(min_self_power(256), 4);
        assert_eq!(min_self_power(257), 5);
    }

    #[test]
    fn d8_t4() {
        let p = plan_protocol(8, 4).unwrap();
        // 1^1 < 4 <= 2^2
        assert_eq!(p.t, 2);
        assert_eq!(p.msg_len, 2);
        assert_eq!(p.num_primes(), 20);
        // n = 20 forces p ≥ 5
        assert_eq!(p.primes[0], 5);
        assert_eq!(p.q, 79);
        assert_eq!(p.code_lens, vec![20; 20]);
        assert_eq!(p.randomness_space_size, 20 * 4 * 20);
        assert_eq!(p.padding(), 0);
    }

    #[test]
    fn rate_exactly_a_tenth() {
        let p = plan_protocol(4, 4).unwrap();
        assert_eq!(p.msg_len, 1);
        assert!(p.code_lens.iter().all(|&n| n == 10));
    }

    #[test]
    fn pads_to_multiple_of_block_width() {
        let p = plan_protocol(7, 4).unwrap();
        assert_eq!(p.dim, 8);
        assert_eq!(p.requested_dim, 7);
        assert_eq!(p.padding(), 1);
    }

    #[test]
    fn invariants_hold_across_grid() {
        for block_width in [2usize, 3, 4, 5, 8, 16, 27, 28, 100] {
            for d in [1usize, 7, 16, 64, 200] {
                let p = plan_protocol(d, block_width).unwrap();
                let t = p.t as u64;
                assert!(t.pow(p.t) >= block_width as u64);
                assert!((t - 1).pow(p.t - 1) < block_width as u64);
                assert_eq!(p.primes.len(), 10 * p.t as usize);
                assert!(p.primes.windows(2).all(|w| w[0] < w[1]));
                assert!(p.primes.iter().all(|&q| is_prime(q) && q >= t));
                assert_eq!(p.dim % block_width, 0);
                for &n in &p.code_lens {
                    let k = p.msg_len;
                    assert!(p.primes.iter().all(|&q| q * q >= n as u64));
                    assert_eq!(n, 10 * k);
                    assert!(10 * (n - (2 * k - 1)) >= n);
                }
                let serialized = p.msg_len as u64 * bits_for(p.m0_bound())
                    + p.randomness_space_size * bits_for(p.part_bound());
                assert_eq!(p.merlin_bits, serialized);
            }
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(plan_protocol(37, 6).unwrap(), plan_protocol(37, 6).unwrap());
    }

    #[test]
    fn few_primes_divide_small_values() {
        for block_width in [2usize, 4, 9, 27, 64, 300] {
            let p = plan_protocol(block_width * 3, block_width).unwrap();
            for v in 1..=block_width as u64 {
                let dividing = p.primes.iter().filter(|&&q| v % q == 0).count();
                assert!(dividing <= p.t as usize, "v={v} T={block_width}");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(plan_protocol(0, 4).is_err());
        assert!(plan_protocol(4, 1).is_err());
        assert!(plan_reduction(0.0, 1.0, 16).is_err());
        assert!(plan_reduction(2.0, 1.0, 16).is_err());
        assert!(plan_reduction(1.0, 0.5, 16).is_err());
        assert!(plan_reduction(1.0, 1.0, 1).is_err());
    }

    #[test]
    fn delta_restates_formula() {
        let plan = plan_reduction(1.0, 1.0, 1 << 16).unwrap();
        let w = plan.protocol.randomness_space_size as f64;
        assert_eq!(plan.delta, 0.01 * w / plan.d_prime as f64);
        assert!(plan.delta > 0.0 && plan.delta < 1.0);
        assert_eq!(plan.d_prime, plan.protocol.randomness_space_size as u128 * plan.gadget_dim);
    }

    #[test]
    fn block_width_is_smallest_passing() {
        let plan = plan_reduction(1.0, 2.0, 1 << 20).unwrap();
        let check = |bw: usize| {
            let p = plan_protocol(plan.dim, bw).unwrap();
            p.merlin_bits as f64 <= 1.0 * (p.dim as f64 / 2.0) / 2.0
        };
        assert!(check(plan.block_width));
        assert!(!check(plan.block_width - 1));
    }

    #[test]
    fn delta_below_one_on_grid() {
        for eps in [0.25, 0.5, 1.0, 1.5] {
            for c in [1.0, 2.0, 3.0, 8.0] {
                for log_n in [4u32, 16, 40] {
                    let plan = plan_reduction(eps, c, 1u64 << log_n).unwrap();
                    assert!(plan.delta > 0.0 && plan.delta < 1.0);
                }
            }
        }
    }
}
