//! Encoding gadget: maps `(a, σ)` and `(b, σ)` with `a, b ∈ {0..q}^T`,
//! `σ ∈ {0..T·q²}` to binary vectors `g`, `h` with
//!
//! ```text
//! ⟨g(a, σ), h(b, σ)⟩ = Γ − (⟨a, b⟩ − σ)²
//! ```
//!
//! for a uniform `Γ`. The building block is a `Q × Q` grid where the `g`
//! side sets rows `r < x` and the `h` side sets columns `c < y`, so the
//! grids meet in exactly `x·y` ones.
//!
//! Writing `v = ⟨a, b⟩`, `M = T·q²` and `u = M − v`:
//!
//! * `u = ⟨(a, q − a), (q − b, q)⟩`, both sides non-negative and `≤ q`;
//! * the tensor region realizes `v·u = v·M − v²` with `T·2T` grids of side `q²`;
//! * `c_v` copies of the `v` grids and `c_u` copies of the `u` grids add
//!   `c_v·v + c_u·u`, where `c_v = max(2σ − M, 0)`, `c_u = max(M − 2σ, 0)`;
//! * the total so far is `σ² + c_u·M − (v − σ)²`, and both sides fill the
//!   same pad prefix with `Γ − σ² − c_u·M` ones.
//!
//! Layout, in order: tensor grids, `M` slots of `v` grids, `M` slots of `u`
//! grids, pad. `dim = 7M² + M`, `Γ = 2M² + M`.

use crate::bits::{BinaryVector, BitVector};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Alice's side (`g`): grids filled by rows.
    G,
    /// Bob's side (`h`): grids filled by columns.
    H,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    Tensor,
    LinearV,
    LinearU,
    Pad,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub kind: RegionKind,
    pub offset: u64,
    pub len: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetSpec {
    block_width: u64,
    q: u64,
    max_ip: u64,
    dim: u64,
    gamma: u64,
    layout: Vec<Region>,
    pad_skew: i64,
}

/// Exact gadget dimension `7M² + M` with `M = T·q²`, without overflow.
pub fn dimension_for(block_width: u64, q: u64) -> u128 {
    let m = block_width as u128 * q as u128 * q as u128;
    7 * m * m + m
}

impl GadgetSpec {
    pub fn new(block_width: u64, q: u64) -> Result<Self> {
        if block_width == 0 || q == 0 {
            return Err(Error::InvalidParameter("gadget needs T >= 1 and q >= 1".into()));
        }
        let total = dimension_for(block_width, q);
        if total > u64::MAX as u128 {
            return Err(Error::Overflow(format!(
                "gadget dimension {total} for T={block_width}, q={q} exceeds 64 bits"
            )));
        }
        let t = block_width;
        let m = t * q * q;
        let tensor = 2 * t * t * (q * q) * (q * q);
        let linear_v = m * t * q * q;
        let linear_u = m * 2 * t * q * q;
        let gamma = 2 * m * m + m;
        let mut offset = 0;
        let layout = [
            (RegionKind::Tensor, tensor),
            (RegionKind::LinearV, linear_v),
            (RegionKind::LinearU, linear_u),
            (RegionKind::Pad, gamma),
        ]
        .into_iter()
        .map(|(kind, len)| {
            let region = Region { kind, offset, len };
            offset += len;
            region
        })
        .collect();
        debug_assert_eq!(offset as u128, total);
        Ok(Self {
            block_width,
            q,
            max_ip: m,
            dim: offset,
            gamma,
            layout,
            pad_skew: 0,
        })
    }

    /// A copy whose pad length is off by `skew` on the `g` side; only useful
    /// as a negative control for the verifier.
    #[doc(hidden)]
    pub fn with_pad_skew(mut self, skew: i64) -> Self {
        self.pad_skew = skew;
        self
    }

    pub fn block_width(&self) -> u64 {
        self.block_width
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `M = T·q²`, the largest possible `⟨a, b⟩`.
    pub fn max_ip(&self) -> u64 {
        self.max_ip
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    pub fn layout(&self) -> &[Region] {
        &self.layout
    }

    fn region(&self, kind: RegionKind) -> Region {
        *self.layout.iter().find(|r| r.kind == kind).expect("fixed layout")
    }

    fn linear_coefficients(&self, sigma: u64) -> (u64, u64) {
        let m = self.max_ip;
        (
            (2 * sigma).saturating_sub(m),
            m.saturating_sub(2 * sigma),
        )
    }

    /// Describes `g(a, σ)` (side `G`) or `h(b, σ)` (side `H`) by its grid
    /// values, without materializing bits.
    pub fn block(&self, side: Side, values: &[u64], sigma: u64) -> Result<GadgetBlock> {
        let t = self.block_width as usize;
        if values.len() != t {
            return Err(Error::DimensionMismatch {
                expected: t,
                got: values.len(),
            });
        }
        if let Some(&bad) = values.iter().find(|&&x| x > self.q) {
            return Err(Error::OutOfRange(format!("entry {bad} exceeds q = {}", self.q)));
        }
        if sigma > self.max_ip {
            return Err(Error::OutOfRange(format!(
                "sigma {sigma} exceeds T·q² = {}",
                self.max_ip
            )));
        }
        let q = self.q;
        let partner: Vec<u64> = match side {
            Side::G => values.iter().copied().chain(values.iter().map(|&x| q - x)).collect(),
            Side::H => values.iter().map(|&x| q - x).chain(std::iter::repeat_n(q, t)).collect(),
        };
        let tensor = values
            .iter()
            .flat_map(|&x| partner.iter().map(move |&y| x * y))
            .collect();
        let (v_copies, u_copies) = self.linear_coefficients(sigma);
        let base_pad = self.gamma - sigma * sigma - u_copies * self.max_ip;
        let pad = match side {
            Side::G => base_pad.saturating_add_signed(self.pad_skew),
            Side::H => base_pad,
        };
        Ok(GadgetBlock {
            side,
            sigma,
            v_vals: values.to_vec(),
            u_vals: partner,
            tensor,
            v_copies,
            u_copies,
            pad,
        })
    }

    /// Exact `⟨x, y⟩` of two blocks computed region by region.
    pub fn block_dot(&self, x: &GadgetBlock, y: &GadgetBlock) -> u64 {
        let (q, qq) = (self.q, self.q * self.q);
        let grids = |xs: &[u64], ys: &[u64], side_len: u64| -> u64 {
            xs.iter()
                .zip(ys)
                .map(|(&a, &b)| grid_dot(x.side, a, y.side, b, side_len))
                .sum()
        };
        grids(&x.tensor, &y.tensor, qq)
            + x.v_copies.min(y.v_copies) * grids(&x.v_vals, &y.v_vals, q)
            + x.u_copies.min(y.u_copies) * grids(&x.u_vals, &y.u_vals, q)
            + x.pad.min(y.pad)
    }

    pub fn block_weight(&self, x: &GadgetBlock) -> u64 {
        let (q, qq) = (self.q, self.q * self.q);
        x.tensor.iter().sum::<u64>() * qq
            + x.v_copies * x.v_vals.iter().sum::<u64>() * q
            + x.u_copies * x.u_vals.iter().sum::<u64>() * q
            + x.pad
    }

    /// Materializes a block as bits.
    pub fn materialize(&self, block: &GadgetBlock) -> Result<BitVector> {
        let dim = usize::try_from(self.dim)
            .map_err(|_| Error::Overflow("gadget dimension exceeds usize".into()))?;
        let mut bits = BitVector::zeros(dim);
        let (q, qq) = (self.q as usize, (self.q * self.q) as usize);
        let t = self.block_width as usize;

        let tensor = self.region(RegionKind::Tensor).offset as usize;
        for (g, &x) in block.tensor.iter().enumerate() {
            fill_grid(&mut bits, block.side, tensor + g * qq * qq, qq, x as usize);
        }
        let linear_v = self.region(RegionKind::LinearV).offset as usize;
        for copy in 0..block.v_copies as usize {
            for (i, &x) in block.v_vals.iter().enumerate() {
                fill_grid(&mut bits, block.side, linear_v + (copy * t + i) * q * q, q, x as usize);
            }
        }
        let linear_u = self.region(RegionKind::LinearU).offset as usize;
        for copy in 0..block.u_copies as usize {
            for (j, &x) in block.u_vals.iter().enumerate() {
                fill_grid(&mut bits, block.side, linear_u + (copy * 2 * t + j) * q * q, q, x as usize);
            }
        }
        let pad = self.region(RegionKind::Pad);
        let pad_len = block.pad.min(pad.len) as usize;
        bits.set_range(pad.offset as usize, pad.offset as usize + pad_len);
        Ok(bits)
    }

    pub fn encode_g(&self, a: &[u64], sigma: u64) -> Result<BitVector> {
        self.materialize(&self.block(Side::G, a, sigma)?)
    }

    pub fn encode_h(&self, b: &[u64], sigma: u64) -> Result<BitVector> {
        self.materialize(&self.block(Side::H, b, sigma)?)
    }
}

/// Shorthand for [`GadgetSpec::new`].
pub fn build_gadget(block_width: u64, q: u64) -> Result<GadgetSpec> {
    GadgetSpec::new(block_width, q)
}

fn grid_dot(sx: Side, x: u64, sy: Side, y: u64, side_len: u64) -> u64 {
    if sx == sy {
        x.min(y) * side_len
    } else {
        x * y
    }
}

fn fill_grid(bits: &mut BitVector, side: Side, offset: usize, side_len: usize, value: usize) {
    match side {
        Side::G => bits.set_range(offset, offset + value * side_len),
        Side::H => {
            for r in 0..side_len {
                let row = offset + r * side_len;
                bits.set_range(row, row + value);
            }
        }
    }
}

/// One gadget image described by its grid values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GadgetBlock {
    pub side: Side,
    sigma: u64,
    v_vals: Vec<u64>,
    u_vals: Vec<u64>,
    tensor: Vec<u64>,
    v_copies: u64,
    u_copies: u64,
    pad: u64,
}

impl GadgetBlock {
    /// The `a` or `b` vector this block encodes.
    pub fn values(&self) -> &[u64] {
        &self.v_vals
    }

    pub fn sigma(&self) -> u64 {
        self.sigma
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub sigma: u64,
    pub got: u64,
    pub expected: i128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetReport {
    pub block_width: u64,
    pub q: u64,
    pub gamma: u64,
    pub dim: u64,
    pub checked: u64,
    pub counterexample: Option<Counterexample>,
}

impl GadgetReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Cap on `(q+1)^(2T)·(M+1)` for exhaustive sweeps.
pub const EXHAUSTIVE_CAP: u64 = 10_000_000;

fn all_vectors(len: usize, q: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=q).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// Checks `⟨g(a,σ), h(b,σ)⟩ = Γ − (⟨a,b⟩ − σ)²` on materialized bits for
/// every in-range `(a, b, σ)`; also cross-checks [`GadgetSpec::block_dot`].
pub fn verify_spec_exhaustive(spec: &GadgetSpec) -> Result<GadgetReport> {
    let t = spec.block_width() as usize;
    let q = spec.q();
    let m = spec.max_ip();
    let combos = (q + 1)
        .checked_pow(2 * t as u32)
        .and_then(|x| x.checked_mul(m + 1))
        .filter(|&c| c <= EXHAUSTIVE_CAP)
        .ok_or_else(|| {
            Error::InvalidParameter(format!("T={t}, q={q} is too large for an exhaustive sweep"))
        })?;
    let vectors = all_vectors(t, q);
    let mut report = GadgetReport {
        block_width: spec.block_width(),
        q,
        gamma: spec.gamma(),
        dim: spec.dim(),
        checked: 0,
        counterexample: None,
    };
    for sigma in 0..=m {
        let gs = vectors
            .iter()
            .map(|a| {
                let block = spec.block(Side::G, a, sigma)?;
                Ok((spec.materialize(&block)?, block))
            })
            .collect::<Result<Vec<_>>>()?;
        let hs = vectors
            .iter()
            .map(|b| {
                let block = spec.block(Side::H, b, sigma)?;
                Ok((spec.materialize(&block)?, block))
            })
            .collect::<Result<Vec<_>>>()?;
        for (a, (g_bits, g_block)) in vectors.iter().zip(&gs) {
            for (b, (h_bits, h_block)) in vectors.iter().zip(&hs) {
                let v: u64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let deficit = v as i128 - sigma as i128;
                let expected = spec.gamma() as i128 - deficit * deficit;
                let got = g_bits.dot(h_bits);
                report.checked += 1;
                if got as i128 != expected || spec.block_dot(g_block, h_block) != got {
                    report.counterexample = Some(Counterexample {
                        a: a.clone(),
                        b: b.clone(),
                        sigma,
                        got,
                        expected,
                    });
                    return Ok(report);
                }
            }
        }
    }
    debug_assert_eq!(report.checked, combos);
    Ok(report)
}

/// Runs [`verify_spec_exhaustive`] for every `1 ≤ T ≤ t_max`, `1 ≤ q ≤ q_max`
/// small enough for exhaustion.
pub fn verify_gadget_exhaustive(t_max: u64, q_max: u64) -> Result<Vec<GadgetReport>> {
    let mut reports = Vec::new();
    for t in 1..=t_max {
        for q in 1..=q_max {
            let combos = (q + 1)
                .checked_pow(2 * t as u32)
                .and_then(|x| x.checked_mul(t * q * q + 1));
            if combos.is_some_and(|c| c <= EXHAUSTIVE_CAP) {
                reports.push(verify_spec_exhaustive(&GadgetSpec::new(t, q)?)?);
            }
        }
    }
    Ok(reports)
}
