//! Brute-force oracles. Every solver scans all `N_A · N_B` cross pairs,
//! parallel over the A side, and breaks ties by the lowest
//! `(a-index, b-index)`.

use std::cmp::Reverse;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::bits::{BinaryVector, BitVector};
use crate::error::{Error, Result};
use crate::reduce::{CpInstance, IpInstance, MaxIpInstance, Metric, MinIpInstance};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult<T> {
    pub optimum: T,
    /// `(index in A, index in B)` attaining the optimum.
    pub witness: (usize, usize),
    pub comparisons: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpAnswer {
    pub witness: Option<(usize, usize)>,
    pub comparisons: u64,
}

impl IpAnswer {
    pub fn found(&self) -> bool {
        self.witness.is_some()
    }
}

/// A closest-pair optimum: the exact integer quantity (Hamming distance,
/// `ℓp^p`, or edit distance) and the distance itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpValue {
    pub exact: u64,
    pub distance: f64,
}

/// Lexicographically smallest `(key, i, j)` over all cross pairs.
fn best_pair<K, F>(na: usize, nb: usize, key: F) -> Option<(K, usize, usize)>
where
    K: Ord + Copy + Send,
    F: Fn(usize, usize) -> K + Sync,
{
    (0..na)
        .into_par_iter()
        .filter_map(|i| (0..nb).map(|j| (key(i, j), i, j)).min())
        .min()
}

fn finish<K, T, F>(na: usize, nb: usize, key: F, value: impl Fn(K) -> T) -> Result<SolveResult<T>>
where
    K: Ord + Copy + Send + std::fmt::Debug,
    F: Fn(usize, usize) -> K + Sync,
{
    let (k, i, j) = best_pair(na, nb, &key).ok_or(Error::Empty)?;
    assert_eq!(key(i, j), k, "witness does not attain the reported optimum");
    Ok(SolveResult {
        optimum: value(k),
        witness: (i, j),
        comparisons: (na * nb) as u64,
    })
}

pub fn solve_ip(instance: &IpInstance) -> IpAnswer {
    let (a, b, sigma) = (&instance.a, &instance.b, instance.sigma);
    let found = best_pair(a.len(), b.len(), |i, j| a[i].dot(&b[j]) != sigma)
        .filter(|&(miss, _, _)| !miss)
        .map(|(_, i, j)| (i, j));
    if let Some((i, j)) = found {
        assert_eq!(a[i].dot(&b[j]), sigma);
    }
    IpAnswer {
        witness: found,
        comparisons: (a.len() * b.len()) as u64,
    }
}

/// `max ⟨a, b⟩` over cross pairs.
pub fn max_inner_product<V: BinaryVector + Sync>(a: &[V], b: &[V]) -> Result<SolveResult<u64>> {
    finish(a.len(), b.len(), |i, j| Reverse(a[i].dot(&b[j])), |Reverse(v)| v)
}

/// `min ⟨a, b⟩` over cross pairs.
pub fn min_inner_product<V: BinaryVector + Sync>(a: &[V], b: &[V]) -> Result<SolveResult<u64>> {
    finish(a.len(), b.len(), |i, j| a[i].dot(&b[j]), |v| v)
}

pub fn solve_maxip<V: BinaryVector + Sync>(instance: &MaxIpInstance<V>) -> Result<SolveResult<u64>> {
    max_inner_product(&instance.a, &instance.b)
}

pub fn solve_minip<V: BinaryVector + Sync>(instance: &MinIpInstance<V>) -> Result<SolveResult<u64>> {
    min_inner_product(&instance.a, &instance.b)
}

/// Unit-cost edit distance (Wagner–Fischer, two rows).
pub fn edit_distance(x: &BitVector, y: &BitVector) -> u64 {
    let xs: Vec<bool> = x.iter().collect();
    let ys: Vec<bool> = y.iter().collect();
    let mut prev: Vec<u64> = (0..=ys.len() as u64).collect();
    let mut cur = vec![0u64; ys.len() + 1];
    for (i, &cx) in xs.iter().enumerate() {
        cur[0] = i as u64 + 1;
        for (j, &cy) in ys.iter().enumerate() {
            let sub = prev[j] + (cx != cy) as u64;
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[ys.len()]
}

/// ℓp distance of two binary vectors: `Δ(x, y)^(1/p)`.
pub fn lp_distance<V: BinaryVector>(x: &V, y: &V, p: f64) -> f64 {
    (x.hamming(y) as f64).powf(1.0 / p)
}

/// Closest pair under Hamming or ℓp for any binary representation. On
/// binary vectors ℓp is monotone in Hamming distance, so the scan compares
/// exact Hamming distances.
pub fn solve_cp_binary<V: BinaryVector + Sync>(instance: &CpInstance<V>) -> Result<SolveResult<CpValue>> {
    let (a, b) = (&instance.a, &instance.b);
    let to_distance = |h: u64| match instance.metric {
        Metric::Lp(p) => (h as f64).powf(1.0 / p),
        _ => h as f64,
    };
    match instance.metric {
        Metric::Edit => Err(Error::InvalidParameter(
            "edit distance needs explicit strings".into(),
        )),
        _ => finish(a.len(), b.len(), |i, j| a[i].hamming(&b[j]), |h| CpValue {
            exact: h,
            distance: to_distance(h),
        }),
    }
}

pub fn solve_cp(instance: &CpInstance<BitVector>) -> Result<SolveResult<CpValue>> {
    match instance.metric {
        Metric::Edit => {
            let (a, b) = (&instance.a, &instance.b);
            finish(a.len(), b.len(), |i, j| edit_distance(&a[i], &b[j]), |e| CpValue {
                exact: e,
                distance: e as f64,
            })
        }
        _ => solve_cp_binary(instance),
    }
}

/// A δ-additive Apx-Max-IP solver: reports a value in `[M − δ·d, M]`.
pub trait ApxMaxIp: Sync {
    fn delta(&self) -> Ratio<u128>;

    fn estimate<V: BinaryVector + Sync>(&self, instance: &MaxIpInstance<V>) -> Result<u64>;

    /// `⌊δ·d⌋`, the additive slack at dimension `d`.
    fn slack(&self, dim: u64) -> u64 {
        let delta = self.delta();
        (delta.numer() * dim as u128 / delta.denom()) as u64
    }
}

/// Returns the exact optimum, which meets any additive contract.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactOracle;

impl ApxMaxIp for ExactOracle {
    fn delta(&self) -> Ratio<u128> {
        Ratio::from_integer(0)
    }

    fn estimate<V: BinaryVector + Sync>(&self, instance: &MaxIpInstance<V>) -> Result<u64> {
        Ok(solve_maxip(instance)?.optimum)
    }
}

/// Returns `max(M − ⌊δ·d⌋, 0)`: the worst answer the contract allows.
#[derive(Clone, Copy, Debug)]
pub struct PerturbedOracle {
    delta: Ratio<u128>,
}

impl PerturbedOracle {
    pub fn new(delta: Ratio<u128>) -> Self {
        Self { delta }
    }
}

impl ApxMaxIp for PerturbedOracle {
    fn delta(&self) -> Ratio<u128> {
        self.delta
    }

    fn estimate<V: BinaryVector + Sync>(&self, instance: &MaxIpInstance<V>) -> Result<u64> {
        let exact = solve_maxip(instance)?.optimum;
        Ok(exact.saturating_sub(self.slack(instance.dim())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::maxip_to_cp_hamming;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn random_bits(d: usize, rng: &mut ChaCha8Rng) -> BitVector {
        BitVector::from_bools(&(0..d).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>())
    }

    #[test]
    fn ip_examples() {
        let z = IpInstance::new(vec![bits("000")], vec![bits("000")], 0).unwrap();
        assert_eq!(solve_ip(&z).witness, Some((0, 0)));
        let miss = IpInstance::new(vec![bits("100")], vec![bits("010")], 1).unwrap();
        assert!(!solve_ip(&miss).found());
    }

    #[test]
    fn ip_matches_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let d = rng.gen_range(1..12);
            let n = rng.gen_range(1..5);
            let a: Vec<BitVector> = (0..n).map(|_| random_bits(d, &mut rng)).collect();
            let b: Vec<BitVector> = (0..n).map(|_| random_bits(d, &mut rng)).collect();
            let sigma = rng.gen_range(0..=d as u64);
            let mut naive = None;
            'outer: for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    let ip = x.iter().zip(y.iter()).filter(|&(p, q)| p && q).count() as u64;
                    if ip == sigma {
                        naive = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let inst = IpInstance::new(a, b, sigma).unwrap();
            assert_eq!(solve_ip(&inst).witness, naive);
        }
    }

    #[test]
    fn maxip_and_minip() {
        let ones = MaxIpInstance::new(vec![BitVector::ones(7); 3], vec![BitVector::ones(7); 2]).unwrap();
        let r = solve_maxip(&ones).unwrap();
        assert_eq!(r.optimum, 7);
        assert_eq!(r.witness, (0, 0));
        assert_eq!(r.comparisons, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let a: Vec<BitVector> = (0..5).map(|_| random_bits(20, &mut rng)).collect();
            let b: Vec<BitVector> = (0..5).map(|_| random_bits(20, &mut rng)).collect();
            let max = max_inner_product(&a, &b).unwrap();
            let min = min_inner_product(&a, &b).unwrap();
            assert!(max.optimum >= min.optimum);
            let mut best = (0, 0, 0);
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    let v = x.dot(y);
                    if v > best.0 || (i, j) == (0, 0) {
                        best = (v, i, j);
                    }
                }
            }
            assert_eq!((max.optimum, max.witness), (best.0, (best.1, best.2)));
        }
        let empty: MaxIpInstance = MaxIpInstance { a: vec![], b: vec![], provenance: None };
        assert!(matches!(solve_maxip(&empty), Err(Error::Empty)));
    }

    #[test]
    fn edit_distance_examples() {
        assert_eq!(edit_distance(&bits("0011"), &bits("0101")), 2);
        assert_eq!(edit_distance(&bits(""), &bits("101")), 3);
        assert_eq!(edit_distance(&bits("1010"), &bits("0101")), 2);
        assert_eq!(edit_distance(&bits("111"), &bits("111")), 0);
    }

    #[test]
    fn edit_distance_triangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let mut gen = || random_bits(rng.gen_range(0..14), &mut rng);
            let (x, y, z) = (gen(), gen(), gen());
            assert_eq!(edit_distance(&x, &x), 0);
            assert_eq!(edit_distance(&x, &y), edit_distance(&y, &x));
            assert!(edit_distance(&x, &z) <= edit_distance(&x, &y) + edit_distance(&y, &z));
        }
    }

    #[test]
    fn cp_examples() {
        let same = CpInstance::new(vec![bits("0110")], vec![bits("0110")], Metric::Hamming).unwrap();
        assert_eq!(solve_cp(&same).unwrap().optimum.exact, 0);
        let l2 = CpInstance::new(vec![bits("00")], vec![bits("11")], Metric::Lp(2.0)).unwrap();
        assert!((solve_cp(&l2).unwrap().optimum.distance - 2f64.sqrt()).abs() < 1e-12);
        let ed = CpInstance::new(vec![bits("0011")], vec![bits("0101"), bits("1111")], Metric::Edit).unwrap();
        let r = solve_cp(&ed).unwrap();
        assert_eq!((r.optimum.exact, r.witness), (2, (0, 0)));
    }

    #[test]
    fn l2_of_hamming_image() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let d = 16;
            let inst = MaxIpInstance::new(
                (0..4).map(|_| random_bits(d, &mut rng)).collect(),
                (0..4).map(|_| random_bits(d, &mut rng)).collect(),
            )
            .unwrap();
            let m = solve_maxip(&inst).unwrap();
            let mut cp = maxip_to_cp_hamming(&inst);
            cp.metric = Metric::Lp(2.0);
            let r = solve_cp_binary(&cp).unwrap();
            let expected = ((2 * d as u64 - 2 * m.optimum) as f64).sqrt();
            assert!((r.optimum.distance - expected).abs() < 1e-12);
            assert_eq!(r.witness, m.witness);
        }
    }

    #[test]
    fn perturbed_oracle_within_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let d = 30;
            let inst = MaxIpInstance::new(
                (0..3).map(|_| random_bits(d, &mut rng)).collect(),
                (0..3).map(|_| random_bits(d, &mut rng)).collect(),
            )
            .unwrap();
            let m = ExactOracle.estimate(&inst).unwrap();
            assert_eq!(m, solve_maxip(&inst).unwrap().optimum);
            let oracle = PerturbedOracle::new(Ratio::new(1, 10));
            let v = oracle.estimate(&inst).unwrap();
            assert!(v <= m && v + 3 >= m);
            assert_eq!(v, m.saturating_sub(3));
        }
    }

    proptest! {
        #[test]
        fn hamming_and_l1_agree(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = rng.gen_range(1..24);
            let a: Vec<BitVector> = (0..3).map(|_| random_bits(d, &mut rng)).collect();
            let b: Vec<BitVector> = (0..3).map(|_| random_bits(d, &mut rng)).collect();
            let h = solve_cp(&CpInstance::new(a.clone(), b.clone(), Metric::Hamming).unwrap()).unwrap();
            let l1 = solve_cp(&CpInstance::new(a.clone(), b.clone(), Metric::Lp(1.0)).unwrap()).unwrap();
            prop_assert_eq!(h.optimum.exact, l1.optimum.exact);
            prop_assert!((h.optimum.distance - l1.optimum.distance).abs() < 1e-12);
            for p in [1.0, 2.0, 3.0] {
                for x in &a {
                    for y in &b {
                        let lp = lp_distance(x, y, p);
                        prop_assert!((lp.powf(p) - x.hamming(y) as f64).abs() < 1e-9);
                    }
                }
            }
        }
    }
}
