//! Text instance files.
//!
//! ```text
//! FGRED v1 <kind> N=<n> d=<d> [sigma=<s>] [metric=<m>] [prov=<id>] [enc=gadget T=<T> q=<q> W=<W>] [wrap=hamming|flip]
//! ```
//!
//! followed by `2N` body lines, the A side then the B side. Dense vectors
//! are written as `0`/`1` strings, edit-distance strings in double quotes.
//! Gadget-encoded vectors (the images of the IP → Max-IP reduction, too
//! long to write out) list one `σ′:x1,…,xT` token per randomness point; the
//! A side holds `g` images, the B side `h` images, every point has weight
//! one and `d` is the dimension the tokens stand for. `wrap` records a
//! normalization applied on top of the gadget vectors.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use crate::bits::{BinaryVector, BitVector};
use crate::error::{Error, Result};
use crate::gadget::{GadgetSpec, Side};
use crate::reduce::{BlockVector, Metric};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Ip,
    MaxIp,
    MinIp,
    Cp,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Ip => "ip",
            Kind::MaxIp => "maxip",
            Kind::MinIp => "minip",
            Kind::Cp => "cp",
        }
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Kind::Ip, Kind::MaxIp, Kind::MinIp, Kind::Cp]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown instance kind {s:?}")))
    }
}

/// Normalization layered over gadget-encoded vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wrap {
    Hamming,
    Flip,
}

impl Wrap {
    fn name(self) -> &'static str {
        match self {
            Wrap::Hamming => "hamming",
            Wrap::Flip => "flip",
        }
    }

    /// Dimension of the wrapped vector given the inner dimension.
    pub fn outer_dim(self, inner: u64) -> u64 {
        match self {
            Wrap::Hamming => 3 * inner,
            Wrap::Flip => 2 * inner,
        }
    }
}

/// One gadget-encoded vector: `(σ′, values)` per randomness point.
pub type GadgetRow = Vec<(u64, Vec<u64>)>;

#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Dense { a: Vec<BitVector>, b: Vec<BitVector> },
    Gadget {
        block_width: u64,
        q: u64,
        a: Vec<GadgetRow>,
        b: Vec<GadgetRow>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub kind: Kind,
    pub dim: u64,
    pub sigma: Option<u64>,
    pub metric: Option<Metric>,
    pub provenance: Option<String>,
    pub wrap: Option<Wrap>,
    pub body: Body,
}

impl InstanceFile {
    pub fn dense(kind: Kind, a: Vec<BitVector>, b: Vec<BitVector>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "instance files need |A| = |B| ≥ 1, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let dim = a[0].len() as u64;
        Ok(Self {
            kind,
            dim,
            sigma: None,
            metric: None,
            provenance: None,
            wrap: None,
            body: Body::Dense { a, b },
        })
    }

    /// Writes gadget-encoded vectors; all must share one spec and unit weights.
    pub fn gadget(kind: Kind, a: &[BlockVector], b: &[BlockVector]) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "instance files need |A| = |B| ≥ 1, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let spec = a[0].spec().clone();
        let rows = |vs: &[BlockVector]| -> Result<Vec<GadgetRow>> {
            vs.iter()
                .map(|v| {
                    if v.spec() != &spec || v.weights().iter().any(|&w| w != 1) {
                        return Err(Error::InvalidParameter(
                            "gadget files need one spec and unit point weights".into(),
                        ));
                    }
                    Ok(v.blocks().iter().map(|blk| (blk.sigma(), blk.values().to_vec())).collect())
                })
                .collect()
        };
        Ok(Self {
            kind,
            dim: a[0].dim(),
            sigma: None,
            metric: None,
            provenance: None,
            wrap: None,
            body: Body::Gadget {
                block_width: spec.block_width(),
                q: spec.q(),
                a: rows(a)?,
                b: rows(b)?,
            },
        })
    }

    pub fn len(&self) -> usize {
        match &self.body {
            Body::Dense { a, .. } => a.len(),
            Body::Gadget { a, .. } => a.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dense A and B sides.
    pub fn dense_vectors(&self) -> Result<(&[BitVector], &[BitVector])> {
        match &self.body {
            Body::Dense { a, b } => Ok((a, b)),
            Body::Gadget { .. } => Err(Error::InvalidParameter(
                "operation needs a dense instance, this one is gadget-encoded".into(),
            )),
        }
    }

    /// Rebuilds the gadget-encoded A and B sides.
    pub fn gadget_vectors(&self) -> Result<(Vec<BlockVector>, Vec<BlockVector>)> {
        let Body::Gadget { block_width, q, a, b } = &self.body else {
            return Err(Error::InvalidParameter("instance is not gadget-encoded".into()));
        };
        let spec = Arc::new(GadgetSpec::new(*block_width, *q)?);
        let points = a.first().map_or(0, Vec::len);
        let weights = Arc::new(vec![1u64; points]);
        let build = |rows: &[GadgetRow], side: Side| -> Result<Vec<BlockVector>> {
            rows.iter()
                .map(|row| {
                    let blocks = row
                        .iter()
                        .map(|(sigma, vals)| spec.block(side, vals, *sigma))
                        .collect::<Result<Vec<_>>>()?;
                    BlockVector::new(spec.clone(), weights.clone(), blocks)
                })
                .collect()
        };
        Ok((build(a, Side::G)?, build(b, Side::H)?))
    }

    fn block_count(&self) -> Option<usize> {
        match &self.body {
            Body::Gadget { a, .. } => Some(a.first().map_or(0, Vec::len)),
            Body::Dense { .. } => None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty file".into(),
        })?;
        let herr = |msg: String| Error::Parse { line: 1, msg };
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some("FGRED") || tokens.next() != Some("v1") {
            return Err(herr("header must start with \"FGRED v1\"".into()));
        }
        let kind: Kind = tokens
            .next()
            .ok_or_else(|| herr("missing kind".into()))?
            .parse()
            .map_err(|e: Error| herr(e.to_string()))?;
        let (mut n, mut dim, mut sigma, mut metric, mut prov, mut wrap) = (None, None, None, None, None, None);
        let (mut enc, mut t, mut q, mut w) = (None, None, None, None);
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| herr(format!("expected key=value, got {tok:?}")))?;
            let num = || value.parse::<u64>().map_err(|_| herr(format!("bad number in {tok:?}")));
            match key {
                "N" => n = Some(num()?),
                "d" => dim = Some(num()?),
                "sigma" => sigma = Some(num()?),
                "metric" => metric = Some(value.parse::<Metric>().map_err(|e| herr(e.to_string()))?),
                "prov" => prov = Some(value.to_string()),
                "enc" => enc = Some(value.to_string()),
                "T" => t = Some(num()?),
                "q" => q = Some(num()?),
                "W" => w = Some(num()?),
                "wrap" => {
                    wrap = Some(match value {
                        "hamming" => Wrap::Hamming,
                        "flip" => Wrap::Flip,
                        _ => return Err(herr(format!("unknown wrap {value:?}"))),
                    })
                }
                _ => return Err(herr(format!("unknown header field {key:?}"))),
            }
        }
        let n = n.ok_or_else(|| herr("missing N".into()))? as usize;
        let dim = dim.ok_or_else(|| herr("missing d".into()))?;
        if kind == Kind::Ip && sigma.is_none() {
            return Err(herr("ip instances need sigma".into()));
        }
        if kind == Kind::Cp && metric.is_none() {
            return Err(herr("cp instances need a metric".into()));
        }
        let body_lines: Vec<(usize, &str)> = lines.map(|(i, l)| (i + 1, l.trim())).collect();
        if body_lines.len() != 2 * n {
            return Err(Error::Parse {
                line: body_lines.last().map_or(1, |l| l.0),
                msg: format!("expected {} body lines, found {}", 2 * n, body_lines.len()),
            });
        }
        let body = match enc.as_deref() {
            None => {
                if wrap.is_some() {
                    return Err(herr("wrap is only meaningful for gadget-encoded bodies".into()));
                }
                let edit = metric == Some(Metric::Edit);
                let vectors = body_lines
                    .iter()
                    .map(|&(line, l)| parse_dense(l, dim, edit).map_err(|msg| Error::Parse { line, msg }))
                    .collect::<Result<Vec<_>>>()?;
                let b = vectors[n..].to_vec();
                let mut a = vectors;
                a.truncate(n);
                Body::Dense { a, b }
            }
            Some("gadget") => {
                let (t, q, w) = match (t, q, w) {
                    (Some(t), Some(q), Some(w)) => (t, q, w),
                    _ => return Err(herr("gadget bodies need T, q and W".into())),
                };
                let rows = body_lines
                    .iter()
                    .map(|&(line, l)| parse_gadget_row(l, t as usize, w as usize).map_err(|msg| Error::Parse { line, msg }))
                    .collect::<Result<Vec<_>>>()?;
                let b = rows[n..].to_vec();
                let mut a = rows;
                a.truncate(n);
                Body::Gadget { block_width: t, q, a, b }
            }
            Some(other) => return Err(herr(format!("unknown encoding {other:?}"))),
        };
        let file = Self {
            kind,
            dim,
            sigma,
            metric,
            provenance: prov,
            wrap,
            body,
        };
        if let Some(expected) = file.expected_gadget_dim()? {
            if expected != dim {
                return Err(herr(format!("d={dim} but the gadget body stands for dimension {expected}")));
            }
        }
        Ok(file)
    }

    fn expected_gadget_dim(&self) -> Result<Option<u64>> {
        let Body::Gadget { block_width, q, a, .. } = &self.body else {
            return Ok(None);
        };
        let spec = GadgetSpec::new(*block_width, *q)?;
        let inner = a.first().map_or(0, |r| r.len() as u64) * spec.dim();
        Ok(Some(self.wrap.map_or(inner, |w| w.outer_dim(inner))))
    }
}

fn parse_dense(line: &str, dim: u64, quoted: bool) -> std::result::Result<BitVector, String> {
    let raw = if quoted {
        line.strip_prefix('"')
            .and_then(|l| l.strip_suffix('"'))
            .ok_or_else(|| "edit-distance strings must be double-quoted".to_string())?
    } else {
        line
    };
    let v: BitVector = raw.parse().map_err(|e: Error| e.to_string())?;
    if v.len() as u64 != dim {
        return Err(format!("vector has length {}, header says d={dim}", v.len()));
    }
    Ok(v)
}

fn parse_gadget_row(line: &str, t: usize, w: usize) -> std::result::Result<GadgetRow, String> {
    let row = line
        .split_whitespace()
        .map(|tok| {
            let (sigma, vals) = tok.split_once(':').ok_or_else(|| format!("bad point token {tok:?}"))?;
            let sigma = sigma.parse::<u64>().map_err(|_| format!("bad sigma in {tok:?}"))?;
            let vals = vals
                .split(',')
                .map(|x| x.parse::<u64>().map_err(|_| format!("bad value in {tok:?}")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if vals.len() != t {
                return Err(format!("point {tok:?} has {} values, expected T={t}", vals.len()));
            }
            Ok((sigma, vals))
        })
        .collect::<std::result::Result<GadgetRow, String>>()?;
    if row.len() != w {
        return Err(format!("{} points, header says W={w}", row.len()));
    }
    Ok(row)
}

impl fmt::Display for InstanceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FGRED v1 {} N={} d={}", self.kind.name(), self.len(), self.dim)?;
        if let Some(s) = self.sigma {
            write!(f, " sigma={s}")?;
        }
        if let Some(m) = self.metric {
            write!(f, " metric={m}")?;
        }
        if let Some(p) = &self.provenance {
            write!(f, " prov={p}")?;
        }
        if let Body::Gadget { block_width, q, .. } = &self.body {
            write!(
                f,
                " enc=gadget T={block_width} q={q} W={}",
                self.block_count().unwrap_or(0)
            )?;
        }
        if let Some(w) = self.wrap {
            write!(f, " wrap={}", w.name())?;
        }
        writeln!(f)?;
        match &self.body {
            Body::Dense { a, b } => {
                let quoted = self.metric == Some(Metric::Edit);
                for v in a.iter().chain(b) {
                    if quoted {
                        writeln!(f, "\"{v}\"")?;
                    } else {
                        writeln!(f, "{v}")?;
                    }
                }
            }
            Body::Gadget { a, b, .. } => {
                for row in a.iter().chain(b) {
                    let mut line = String::new();
                    for (k, (sigma, vals)) in row.iter().enumerate() {
                        if k > 0 {
                            line.push(' ');
                        }
                        write!(line, "{sigma}:").expect("string write");
                        for (m, x) in vals.iter().enumerate() {
                            if m > 0 {
                                line.push(',');
                            }
                            write!(line, "{x}").expect("string write");
                        }
                    }
                    writeln!(f, "{line}")?;
                }
            }
        }
        Ok(())
    }
}
