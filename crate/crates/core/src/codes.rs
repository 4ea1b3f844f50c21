//! Systematic Reed–Solomon codes over GF(p²) with the multiplication
//! property.
//!
//! The base code `C` evaluates polynomials of degree `< k` and the product
//! code `C⋆` polynomials of degree `≤ 2k − 2`, both on the first `n` field
//! elements in `(c1, c0)` order. Pointwise products of `C` codewords are
//! `C⋆` codewords. `C` is systematic on the first `k` points and `C⋆` on
//! the first `2k − 1`.

use crate::error::{Error, Result};
use crate::gf::{Ext2, QuadExtField};

#[derive(Clone, Debug)]
pub struct MultCodePair {
    field: QuadExtField,
    k: usize,
    n: usize,
    points: Vec<Ext2>,
    /// `generator[j][i]` is the `i`-th Lagrange basis polynomial over the
    /// first `k` points, evaluated at point `j`.
    generator: Vec<Vec<Ext2>>,
    /// Same for the product code: basis over the first `2k − 1` points,
    /// evaluated at points `2k − 1..n`.
    product_extension: Vec<Vec<Ext2>>,
}

impl MultCodePair {
    pub fn new(field: QuadExtField, k: usize, n: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("message length must be positive".into()));
        }
        if n < 2 * k - 1 {
            return Err(Error::InvalidParameter(format!(
                "codeword length {n} is shorter than the product-code dimension {}",
                2 * k - 1
            )));
        }
        if n as u64 > field.order() {
            return Err(Error::FieldTooSmall {
                n,
                field_size: field.order(),
            });
        }
        let points: Vec<Ext2> = (0..n as u64).map(|i| field.element(i)).collect();
        let generator = lagrange_table(&field, &points[..k], &points)?;
        let product_extension = lagrange_table(&field, &points[..2 * k - 1], &points[2 * k - 1..])?;
        Ok(Self {
            field,
            k,
            n,
            points,
            generator,
            product_extension,
        })
    }

    pub fn field(&self) -> &QuadExtField {
        &self.field
    }

    pub fn message_len(&self) -> usize {
        self.k
    }

    pub fn codeword_len(&self) -> usize {
        self.n
    }

    pub fn eval_points(&self) -> &[Ext2] {
        &self.points
    }

    pub fn base_degree(&self) -> usize {
        self.k - 1
    }

    pub fn product_degree(&self) -> usize {
        2 * self.k - 2
    }

    /// Minimum distance of `C⋆`: distinct polynomials of degree `≤ 2k − 2`
    /// agree on at most `2k − 2` points.
    pub fn product_distance(&self) -> usize {
        self.n - self.product_degree()
    }

    /// Whether rate `k/n ≥ 0.1` and relative distance of `C⋆` `≥ 0.1` both hold.
    pub fn satisfies_contract(&self) -> bool {
        10 * self.k >= self.n && 10 * self.product_distance() >= self.n
    }

    pub fn encode(&self, msg: &[Ext2]) -> Result<Vec<Ext2>> {
        if msg.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: msg.len(),
            });
        }
        Ok(self
            .generator
            .iter()
            .map(|row| self.combine(row, msg))
            .collect())
    }

    /// Membership in `C⋆`: interpolate through the first `2k − 1` symbols and
    /// verify the remaining ones.
    pub fn is_product_codeword(&self, w: &[Ext2]) -> bool {
        if w.len() != self.n {
            return false;
        }
        let (prefix, rest) = w.split_at(2 * self.k - 1);
        self.product_extension
            .iter()
            .zip(rest)
            .all(|(row, &value)| self.combine(row, prefix) == value)
    }

    /// The unique `C⋆` codeword whose first `2k − 1` symbols are `prefix`.
    pub fn product_codeword_from_prefix(&self, prefix: &[Ext2]) -> Result<Vec<Ext2>> {
        if prefix.len() != 2 * self.k - 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.k - 1,
                got: prefix.len(),
            });
        }
        let mut out = prefix.to_vec();
        out.extend(self.product_extension.iter().map(|row| self.combine(row, prefix)));
        Ok(out)
    }

    pub fn star(&self, x: &[Ext2], y: &[Ext2]) -> Vec<Ext2> {
        x.iter().zip(y).map(|(&a, &b)| self.field.mul(a, b)).collect()
    }

    fn combine(&self, coeffs: &[Ext2], values: &[Ext2]) -> Ext2 {
        coeffs
            .iter()
            .zip(values)
            .fold(Ext2::ZERO, |acc, (&c, &v)| self.field.add(acc, self.field.mul(c, v)))
    }
}

/// Free-function form of [`MultCodePair::new`].
pub fn build_code_pair(field: QuadExtField, k: usize, n: usize) -> Result<MultCodePair> {
    MultCodePair::new(field, k, n)
}

/// `table[j][i] = L_i(targets[j])` for the Lagrange basis over `nodes`,
/// via barycentric weights.
fn lagrange_table(field: &QuadExtField, nodes: &[Ext2], targets: &[Ext2]) -> Result<Vec<Vec<Ext2>>> {
    let weights = nodes
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let denom = nodes
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != i)
                .fold(Ext2::ONE, |acc, (_, &xm)| field.mul(acc, field.sub(xi, xm)));
            field.inv(denom)
        })
        .collect::<Result<Vec<_>>>()?;

    targets
        .iter()
        .map(|&x| {
            if let Some(pos) = nodes.iter().position(|&node| node == x) {
                let mut row = vec![Ext2::ZERO; nodes.len()];
                row[pos] = Ext2::ONE;
                return Ok(row);
            }
            let full = nodes
                .iter()
                .fold(Ext2::ONE, |acc, &xm| field.mul(acc, field.sub(x, xm)));
            nodes
                .iter()
                .zip(&weights)
                .map(|(&xi, &wi)| {
                    let inv = field.inv(field.sub(x, xi))?;
                    Ok(field.mul(full, field.mul(wi, inv)))
                })
                .collect()
        })
        .collect()
}
