//! Problem instances and the reductions between them:
//!
//! * IP → additive Apx-Max-IP, by running the protocol for one Merlin
//!   message over the whole randomness space and gadget-encoding each
//!   triplet;
//! * Max-IP → CP under Hamming distance, by weight normalization;
//! * Hamming CP → ℓp CP (identity on binary vectors);
//! * Hamming CP → edit-distance CP, by a per-bit string gadget;
//! * Max-IP → Min-IP, by complementing one side.
//!
//! The IP → Max-IP images are far too long to hold as bits, so they are
//! kept as [`BlockVector`]s, whose inner products are computed exactly
//! region by region. The normalization wrappers are generic over any
//! [`BinaryVector`] so they apply to both representations.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::bits::{BinaryVector, BitVector};
use crate::error::{Error, Result};
use crate::gadget::{GadgetBlock, GadgetSpec, Side};
use crate::protocol::{EncodedInput, MerlinMessage, Protocol, RandomnessPoint, Verdict};
use crate::solvers::{self, edit_distance, ApxMaxIp};

/// Largest dimension for which the edit gadget is checked pair by pair.
pub const EDIT_VALIDATION_CAP: u64 = 8;

/// Half-length of the edit-gadget separator `1^s 0^s`.
pub const EDIT_SEPARATOR: usize = 4;

/// `ED(enc(a), enc(b)) = EDIT_CONSTANT · Δ(a, b)`.
pub const EDIT_CONSTANT: u64 = 2;

/// Largest vector, in bits, that [`Materialize::to_bits`] will build.
pub const MATERIALIZE_CAP: u64 = 1 << 31;

/// Which side of a bipartite instance a vector belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    A,
    B,
}

/// Traceability record attached to reduced instances.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Provenance {
    pub id: String,
    pub notes: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            notes: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.notes.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.notes.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Chains a new step onto this record.
    pub fn derive(&self, step: &str) -> Self {
        Self {
            id: format!("{}>{step}", self.id),
            notes: self.notes.clone(),
        }
    }
}

fn uniform_dim<V: BinaryVector>(a: &[V], b: &[V]) -> Result<u64> {
    let first = a.first().or(b.first()).ok_or(Error::Empty)?;
    let d = first.dim();
    for v in a.iter().chain(b) {
        if v.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d as usize,
                got: v.dim() as usize,
            });
        }
    }
    Ok(d)
}

/// Does some `(a, b) ∈ A × B` have `⟨a, b⟩ = σ`?
#[derive(Clone, Debug, PartialEq)]
pub struct IpInstance {
    pub a: Vec<BitVector>,
    pub b: Vec<BitVector>,
    pub sigma: u64,
}

impl IpInstance {
    pub fn new(a: Vec<BitVector>, b: Vec<BitVector>, sigma: u64) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Empty);
        }
        let d = uniform_dim(&a, &b)?;
        if sigma > d {
            return Err(Error::OutOfRange(format!("sigma {sigma} exceeds dimension {d}")));
        }
        Ok(Self { a, b, sigma })
    }

    pub fn dim(&self) -> usize {
        self.a[0].len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxIpInstance<V = BitVector> {
    pub a: Vec<V>,
    pub b: Vec<V>,
    pub provenance: Option<Provenance>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinIpInstance<V = BitVector> {
    pub a: Vec<V>,
    pub b: Vec<V>,
    pub provenance: Option<Provenance>,
}

impl<V: BinaryVector> MaxIpInstance<V> {
    pub fn new(a: Vec<V>, b: Vec<V>) -> Result<Self> {
        uniform_dim(&a, &b)?;
        Ok(Self {
            a,
            b,
            provenance: None,
        })
    }

    pub fn dim(&self) -> u64 {
        self.a.first().or(self.b.first()).map_or(0, |v| v.dim())
    }
}

impl<V: BinaryVector> MinIpInstance<V> {
    pub fn new(a: Vec<V>, b: Vec<V>) -> Result<Self> {
        uniform_dim(&a, &b)?;
        Ok(Self {
            a,
            b,
            provenance: None,
        })
    }

    pub fn dim(&self) -> u64 {
        self.a.first().or(self.b.first()).map_or(0, |v| v.dim())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    Hamming,
    /// ℓp with the given exponent `p > 0`.
    Lp(f64),
    Edit,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Hamming => f.write_str("hamming"),
            Metric::Lp(p) => write!(f, "lp:{p}"),
            Metric::Edit => f.write_str("edit"),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamming" => Ok(Metric::Hamming),
            "edit" => Ok(Metric::Edit),
            _ => {
                let p = s
                    .strip_prefix("lp:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown metric {s:?}")))?;
                if p > 0.0 {
                    Ok(Metric::Lp(p))
                } else {
                    Err(Error::InvalidParameter(format!("lp exponent must be positive, got {p}")))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CpInstance<V = BitVector> {
    pub a: Vec<V>,
    pub b: Vec<V>,
    pub metric: Metric,
    pub provenance: Option<Provenance>,
}

impl<V: BinaryVector> CpInstance<V> {
    /// Vectors must share one dimension unless the metric is edit distance.
    pub fn new(a: Vec<V>, b: Vec<V>, metric: Metric) -> Result<Self> {
        if metric != Metric::Edit {
            uniform_dim(&a, &b)?;
        }
        Ok(Self {
            a,
            b,
            metric,
            provenance: None,
        })
    }
}

/// Vectors that can be expanded into explicit bits.
pub trait Materialize {
    fn to_bits(&self) -> Result<BitVector>;
}

impl Materialize for BitVector {
    fn to_bits(&self) -> Result<BitVector> {
        Ok(self.clone())
    }
}

fn check_materializable(dim: u64) -> Result<usize> {
    if dim > MATERIALIZE_CAP {
        return Err(Error::Overflow(format!(
            "vector of {dim} bits is too long to materialize (cap {MATERIALIZE_CAP})"
        )));
    }
    Ok(dim as usize)
}

/// Concatenation of gadget images, one per randomness point, point `r`
/// repeated `weights[r]` times.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVector {
    spec: Arc<GadgetSpec>,
    weights: Arc<Vec<u64>>,
    blocks: Vec<GadgetBlock>,
}

impl BlockVector {
    pub fn new(spec: Arc<GadgetSpec>, weights: Arc<Vec<u64>>, blocks: Vec<GadgetBlock>) -> Result<Self> {
        if weights.len() != blocks.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                got: blocks.len(),
            });
        }
        Ok(Self { spec, weights, blocks })
    }

    pub fn spec(&self) -> &GadgetSpec {
        &self.spec
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn blocks(&self) -> &[GadgetBlock] {
        &self.blocks
    }

    pub fn side(&self) -> Option<Side> {
        self.blocks.first().map(|b| b.side)
    }
}

impl BinaryVector for BlockVector {
    fn dim(&self) -> u64 {
        self.weights.iter().sum::<u64>() * self.spec.dim()
    }

    fn count_ones(&self) -> u64 {
        self.weights
            .iter()
            .zip(&self.blocks)
            .map(|(&w, b)| w * self.spec.block_weight(b))
            .sum()
    }

    fn dot(&self, other: &Self) -> u64 {
        assert!(
            Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec,
            "block vectors built from different gadgets"
        );
        assert_eq!(self.weights, other.weights, "block vectors with different weights");
        self.weights
            .iter()
            .zip(self.blocks.iter().zip(&other.blocks))
            .map(|(&w, (x, y))| w * self.spec.block_dot(x, y))
            .sum()
    }
}

impl Materialize for BlockVector {
    fn to_bits(&self) -> Result<BitVector> {
        check_materializable(self.dim())?;
        let parts = self
            .blocks
            .iter()
            .map(|b| self.spec.materialize(b))
            .collect::<Result<Vec<_>>>()?;
        let mut refs = Vec::new();
        for (part, &w) in parts.iter().zip(self.weights.iter()) {
            refs.extend(std::iter::repeat_n(part, w as usize));
        }
        Ok(BitVector::concat(&refs))
    }
}

/// `a ↦ (a, u_a, 0^d)` on side A and `b ↦ (b, 0^d, u_b)` on side B, where
/// `u_x` is `d − |x|` ones followed by zeros. Every image has weight `d`,
/// so `Δ(a″, b″) = 2d − 2⟨a, b⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct HammingImage<V> {
    inner: V,
    role: Role,
    base_dim: u64,
    pad: u64,
}

impl<V: BinaryVector> HammingImage<V> {
    pub fn new(inner: V, role: Role) -> Self {
        let base_dim = inner.dim();
        let pad = base_dim - inner.count_ones();
        Self {
            inner,
            role,
            base_dim,
            pad,
        }
    }

    pub fn inner(&self) -> &V {
        &self.inner
    }

    pub fn role(&self) -> Role {
        self.role
    }
}

impl<V: BinaryVector> BinaryVector for HammingImage<V> {
    fn dim(&self) -> u64 {
        3 * self.base_dim
    }

    fn count_ones(&self) -> u64 {
        self.base_dim
    }

    fn dot(&self, other: &Self) -> u64 {
        let data = self.inner.dot(&other.inner);
        if self.role == other.role {
            data + self.pad.min(other.pad)
        } else {
            data
        }
    }
}

impl<V: BinaryVector + Materialize> Materialize for HammingImage<V> {
    fn to_bits(&self) -> Result<BitVector> {
        let d = check_materializable(self.base_dim)?;
        check_materializable(self.dim())?;
        let data = self.inner.to_bits()?;
        let mut u = BitVector::zeros(d);
        u.set_range(0, self.pad as usize);
        let zero = BitVector::zeros(d);
        Ok(match self.role {
            Role::A => BitVector::concat(&[&data, &u, &zero]),
            Role::B => BitVector::concat(&[&data, &zero, &u]),
        })
    }
}

/// `a ↦ (a, 1^{d−|a|} 0^{|a|})` on side A and `b ↦ (1 − b, 1^d)` on side B,
/// so that `⟨a″, b″⟩ = d − ⟨a, b⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlipImage<V> {
    inner: V,
    role: Role,
    base_dim: u64,
    weight: u64,
}

impl<V: BinaryVector> FlipImage<V> {
    pub fn new(inner: V, role: Role) -> Self {
        Self {
            base_dim: inner.dim(),
            weight: inner.count_ones(),
            inner,
            role,
        }
    }

    pub fn inner(&self) -> &V {
        &self.inner
    }

    pub fn role(&self) -> Role {
        self.role
    }
}

impl<V: BinaryVector> BinaryVector for FlipImage<V> {
    fn dim(&self) -> u64 {
        2 * self.base_dim
    }

    fn count_ones(&self) -> u64 {
        match self.role {
            Role::A => self.base_dim,
            Role::B => 2 * self.base_dim - self.weight,
        }
    }

    fn dot(&self, other: &Self) -> u64 {
        let d = self.base_dim;
        let raw = self.inner.dot(&other.inner);
        match (self.role, other.role) {
            (Role::A, Role::A) => raw + (d - self.weight).min(d - other.weight),
            (Role::A, Role::B) => (self.weight - raw) + (d - self.weight),
            (Role::B, Role::A) => (other.weight - raw) + (d - other.weight),
            (Role::B, Role::B) => (d + raw - self.weight - other.weight) + d,
        }
    }
}

impl<V: BinaryVector + Materialize> Materialize for FlipImage<V> {
    fn to_bits(&self) -> Result<BitVector> {
        let d = check_materializable(self.base_dim)?;
        check_materializable(self.dim())?;
        let data = self.inner.to_bits()?;
        Ok(match self.role {
            Role::A => {
                let mut pad = BitVector::zeros(d);
                pad.set_range(0, (self.base_dim - self.weight) as usize);
                BitVector::concat(&[&data, &pad])
            }
            Role::B => BitVector::concat(&[&data.complement(), &BitVector::ones(d)]),
        })
    }
}

/// Output of the IP → Apx-Max-IP reduction for one Merlin message.
#[derive(Clone, Debug)]
pub struct GadgetReduction {
    pub instance: MaxIpInstance<BlockVector>,
    pub spec: Arc<GadgetSpec>,
    /// `W`: total block count, the common denominator of the point weights.
    pub block_count: u64,
}

impl GadgetReduction {
    pub fn gamma(&self) -> u64 {
        self.spec.gamma()
    }

    /// `W·Γ`, attained exactly by a pair with `⟨a, b⟩ = σ` under the honest message.
    pub fn target(&self) -> u64 {
        self.block_count * self.spec.gamma()
    }

    /// `d′ = W · dim(gadget)`.
    pub fn d_prime(&self) -> u64 {
        self.block_count * self.spec.dim()
    }

    /// Whether `value ≤ W·(Γ − 0.02)`.
    pub fn is_far(&self, value: u64) -> bool {
        100 * value as u128 <= self.block_count as u128 * (100 * self.spec.gamma() as u128 - 2)
    }

    /// Whether `value ≥ W·(Γ − 0.01)`.
    pub fn clears_threshold(&self, value: u64) -> bool {
        100 * value as u128 >= self.block_count as u128 * (100 * self.spec.gamma() as u128 - 1)
    }

    /// `δ = 0.01·W/d′`.
    pub fn delta(&self) -> Ratio<u128> {
        Ratio::new(self.block_count as u128, 100 * self.d_prime() as u128)
    }
}

/// Stable 64-bit fingerprint of a message (FNV-1a over its entries).
pub fn message_fingerprint(msg: &MerlinMessage) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let values = msg.m0.iter().chain(msg.parts.iter().flatten().flatten());
    for &x in values {
        for byte in x.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

fn encode_side(
    protocol: &Protocol,
    spec: &Arc<GadgetSpec>,
    weights: &Arc<Vec<u64>>,
    points: &[RandomnessPoint],
    msg: &MerlinMessage,
    vectors: &[BitVector],
    side: Side,
) -> Result<Vec<BlockVector>> {
    vectors
        .par_iter()
        .map(|x| {
            let enc: EncodedInput = protocol.encode_input(x)?;
            let blocks = points
                .iter()
                .map(|r| {
                    let values = match side {
                        Side::G => protocol.alice_output(&enc, r),
                        Side::H => protocol.bob_output(&enc, r),
                    };
                    spec.block(side, &values, protocol.sigma_output(msg, r))
                })
                .collect::<Result<Vec<_>>>()?;
            BlockVector::new(spec.clone(), weights.clone(), blocks)
        })
        .collect()
}

/// IP → Apx-Max-IP for one Merlin message. Refuses messages Alice rejects.
pub fn ip_to_apx_maxip(
    instance: &IpInstance,
    protocol: &Protocol,
    msg: &MerlinMessage,
    spec: Arc<GadgetSpec>,
) -> Result<GadgetReduction> {
    let params = protocol.params();
    if spec.block_width() != params.block_width as u64 || spec.q() != params.q {
        return Err(Error::InvalidParameter(format!(
            "gadget built for T={}, q={} but the protocol has T={}, q={}",
            spec.block_width(),
            spec.q(),
            params.block_width,
            params.q
        )));
    }
    if let Verdict::Reject(reason) = protocol.alice_check(msg, instance.sigma) {
        return Err(Error::Rejected(reason));
    }
    let points: Vec<RandomnessPoint> = protocol.randomness_points().collect();
    let weights = Arc::new(points.iter().map(|r| protocol.multiplicity(r)).collect::<Vec<_>>());
    let block_count = protocol.weight_denominator();
    let a = encode_side(protocol, &spec, &weights, &points, msg, &instance.a, Side::G)?;
    let b = encode_side(protocol, &spec, &weights, &points, msg, &instance.b, Side::H)?;
    let provenance = Provenance::new(format!(
        "ip-to-maxip:N={}:d={}:sigma={}:msg={:016x}",
        instance.a.len(),
        instance.dim(),
        instance.sigma,
        message_fingerprint(msg)
    ))
    .with("W", block_count)
    .with("Gamma", spec.gamma())
    .with("T", spec.block_width())
    .with("q", spec.q());
    Ok(GadgetReduction {
        instance: MaxIpInstance {
            a,
            b,
            provenance: Some(provenance),
        },
        spec,
        block_count,
    })
}

/// Per-message record of [`ip_decision_via_oracle`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MessageOutcome {
    /// Alice rejects the message for this `σ`.
    Rejected,
    /// The oracle's value on the reduced instance.
    Value { reported: u64, cleared: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleDecision {
    pub accepted: bool,
    /// First message whose reduced instance cleared the threshold.
    pub accepting_message: Option<usize>,
    pub outcomes: Vec<MessageOutcome>,
}

/// Accepts iff the oracle reports at least `W·(Γ − 0.01)` on the reduced
/// instance of some provided message. With `audit`, every report is
/// compared against the exact optimum and a contract violation is an error.
pub fn ip_decision_via_oracle<O: ApxMaxIp>(
    instance: &IpInstance,
    protocol: &Protocol,
    spec: Arc<GadgetSpec>,
    messages: &[MerlinMessage],
    oracle: &O,
    audit: bool,
) -> Result<OracleDecision> {
    let mut decision = OracleDecision {
        accepted: false,
        accepting_message: None,
        outcomes: Vec::with_capacity(messages.len()),
    };
    for (idx, msg) in messages.iter().enumerate() {
        if !protocol.alice_check(msg, instance.sigma).is_accept() {
            decision.outcomes.push(MessageOutcome::Rejected);
            continue;
        }
        let reduced = ip_to_apx_maxip(instance, protocol, msg, spec.clone())?;
        let reported = oracle.estimate(&reduced.instance)?;
        if audit {
            let exact = solvers::solve_maxip(&reduced.instance)?.optimum;
            let slack = oracle.slack(reduced.instance.dim());
            if reported > exact || reported + slack < exact {
                return Err(Error::OracleContract {
                    reported,
                    exact,
                    slack,
                });
            }
        }
        let cleared = reduced.clears_threshold(reported);
        decision.outcomes.push(MessageOutcome::Value { reported, cleared });
        if cleared && !decision.accepted {
            decision.accepted = true;
            decision.accepting_message = Some(idx);
        }
    }
    Ok(decision)
}

/// Max-IP → Hamming CP by weight normalization; dimension `3d`.
pub fn maxip_to_cp_hamming<V: BinaryVector + Clone>(instance: &MaxIpInstance<V>) -> CpInstance<HammingImage<V>> {
    let d = instance.dim();
    let provenance = instance
        .provenance
        .clone()
        .unwrap_or_else(|| Provenance::new("maxip"))
        .derive("cp-hamming")
        .with("hamming", format!("2*{d}-2*ip"))
        .with("delta_cp", "delta/2");
    CpInstance {
        a: instance.a.iter().map(|v| HammingImage::new(v.clone(), Role::A)).collect(),
        b: instance.b.iter().map(|v| HammingImage::new(v.clone(), Role::B)).collect(),
        metric: Metric::Hamming,
        provenance: Some(provenance),
    }
}

/// Reinterprets a binary Hamming instance under ℓp: `ℓp(a, b)^p = Δ(a, b)`.
pub fn cp_hamming_to_lp<V: Clone>(instance: &CpInstance<V>, p: f64) -> Result<CpInstance<V>> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("lp exponent must be positive, got {p}")));
    }
    if instance.metric != Metric::Hamming {
        return Err(Error::InvalidParameter(format!(
            "expected a Hamming instance, got {}",
            instance.metric
        )));
    }
    let provenance = instance
        .provenance
        .clone()
        .unwrap_or_else(|| Provenance::new("cp-hamming"))
        .derive(&format!("cp-lp:{p}"))
        .with("lp_gap", format!("(1+d')-approx in lp gives (1+d')^{p} in hamming"));
    Ok(CpInstance {
        a: instance.a.clone(),
        b: instance.b.clone(),
        metric: Metric::Lp(p),
        provenance: Some(provenance),
    })
}

/// The per-bit edit gadget: `1^s 0^s` followed by `00` or `11`.
pub fn edit_encode(x: &BitVector) -> BitVector {
    let s = EDIT_SEPARATOR;
    let block = 2 * s + 2;
    let mut out = BitVector::zeros(x.len() * block);
    for i in 0..x.len() {
        let base = i * block;
        out.set_range(base, base + s);
        if x.get(i) {
            out.set_range(base + 2 * s, base + block);
        }
    }
    out
}

/// Hamming CP → edit-distance CP with `ED = 2·Δ`. For dimension up to
/// [`EDIT_VALIDATION_CAP`] every cross pair is checked with the DP oracle.
pub fn cp_hamming_to_edit(instance: &CpInstance<BitVector>) -> Result<CpInstance<BitVector>> {
    if instance.metric != Metric::Hamming {
        return Err(Error::InvalidParameter(format!(
            "expected a Hamming instance, got {}",
            instance.metric
        )));
    }
    let a: Vec<BitVector> = instance.a.iter().map(edit_encode).collect();
    let b: Vec<BitVector> = instance.b.iter().map(edit_encode).collect();
    let d = instance.a.first().or(instance.b.first()).map_or(0, |v| v.len() as u64);
    if d <= EDIT_VALIDATION_CAP {
        let failure = (0..a.len())
            .into_par_iter()
            .flat_map_iter(|i| (0..b.len()).map(move |j| (i, j)))
            .find_first(|&(i, j)| {
                edit_distance(&a[i], &b[j]) != EDIT_CONSTANT * instance.a[i].hamming(&instance.b[j])
            });
        if let Some((i, j)) = failure {
            return Err(Error::EditGadget {
                left: a[i].to_string(),
                right: b[j].to_string(),
                edit: edit_distance(&a[i], &b[j]),
                expected: EDIT_CONSTANT * instance.a[i].hamming(&instance.b[j]),
            });
        }
    }
    let provenance = instance
        .provenance
        .clone()
        .unwrap_or_else(|| Provenance::new("cp-hamming"))
        .derive("cp-edit")
        .with("c_ed", EDIT_CONSTANT)
        .with("separator", EDIT_SEPARATOR)
        .with("validated", d <= EDIT_VALIDATION_CAP);
    Ok(CpInstance {
        a,
        b,
        metric: Metric::Edit,
        provenance: Some(provenance),
    })
}

/// Max-IP → Min-IP with `⟨a″, b″⟩ = d − ⟨a, b⟩`; dimension `2d`.
pub fn maxip_minip_flip<V: BinaryVector + Clone>(instance: &MaxIpInstance<V>) -> MinIpInstance<FlipImage<V>> {
    let provenance = instance
        .provenance
        .clone()
        .unwrap_or_else(|| Provenance::new("maxip"))
        .derive("minip")
        .with("minip", format!("{}-ip", instance.dim()));
    MinIpInstance {
        a: instance.a.iter().map(|v| FlipImage::new(v.clone(), Role::A)).collect(),
        b: instance.b.iter().map(|v| FlipImage::new(v.clone(), Role::B)).collect(),
        provenance: Some(provenance),
    }
}

impl<V: Materialize> MaxIpInstance<V> {
    pub fn to_dense(&self) -> Result<MaxIpInstance<BitVector>> {
        Ok(MaxIpInstance {
            a: self.a.iter().map(Materialize::to_bits).collect::<Result<_>>()?,
            b: self.b.iter().map(Materialize::to_bits).collect::<Result<_>>()?,
            provenance: self.provenance.clone(),
        })
    }
}

impl<V: Materialize> MinIpInstance<V> {
    pub fn to_dense(&self) -> Result<MinIpInstance<BitVector>> {
        Ok(MinIpInstance {
            a: self.a.iter().map(Materialize::to_bits).collect::<Result<_>>()?,
            b: self.b.iter().map(Materialize::to_bits).collect::<Result<_>>()?,
            provenance: self.provenance.clone(),
        })
    }
}

impl<V: Materialize> CpInstance<V> {
    pub fn to_dense(&self) -> Result<CpInstance<BitVector>> {
        Ok(CpInstance {
            a: self.a.iter().map(Materialize::to_bits).collect::<Result<_>>()?,
            b: self.b.iter().map(Materialize::to_bits).collect::<Result<_>>()?,
            metric: self.metric,
            provenance: self.provenance.clone(),
        })
    }
}
