//! Toll functions, initial conditions and size-split trees.
//!
//! A [`TollSpec`] fixes the branching factor `m`, the toll family `t_n`
//! (defined for `n >= m - 1`) and the initial values `b_0..b_{m-2}` of the
//! functional on trees too small to hold a full node.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Result, SstError};
use crate::num::{Field, Mpf, Real};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum TollFamily {
    Constant(f64),
    Power(f64),
    Log,
    LogBinomial,
    /// Dense values starting at index `m - 1`.
    Explicit(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TollSpec {
    pub m: usize,
    pub family: TollFamily,
    pub initial: Vec<f64>,
}

/// Scalars that can evaluate tolls, possibly refusing transcendental values.
pub trait TollScalar: Field {
    fn ln_of(n: u64) -> Option<Self>;
    fn pow_of(n: u64, alpha: f64) -> Option<Self>;
}

impl TollScalar for f64 {
    fn ln_of(n: u64) -> Option<Self> {
        Some((n as f64).ln())
    }
    fn pow_of(n: u64, alpha: f64) -> Option<Self> {
        Some((n as f64).powf(alpha))
    }
}

impl TollScalar for Mpf {
    fn ln_of(n: u64) -> Option<Self> {
        Some(Mpf::from_i64(n as i64).ln())
    }
    fn pow_of(n: u64, alpha: f64) -> Option<Self> {
        if alpha.fract() == 0.0 && alpha >= 0.0 {
            return Some(Mpf::from_i64(n as i64).powi(alpha as u32));
        }
        Some(Mpf::from_i64(n as i64).powf(&Mpf::from_f64(alpha)))
    }
}

impl TollScalar for BigRational {
    fn ln_of(n: u64) -> Option<Self> {
        (n == 1).then(<BigRational as Zero>::zero)
    }
    fn pow_of(n: u64, alpha: f64) -> Option<Self> {
        if alpha.fract() == 0.0 && alpha >= 0.0 {
            Some(BigRational::from_integer(BigInt::from(n).pow(alpha as u32)))
        } else {
            None
        }
    }
}

impl TollSpec {
    pub fn new(m: usize, family: TollFamily) -> Result<Self> {
        Self::with_initial(m, family, vec![0.0; m.saturating_sub(1)])
    }

    pub fn with_initial(m: usize, family: TollFamily, initial: Vec<f64>) -> Result<Self> {
        if m < 2 {
            return Err(SstError::InvalidParameter(format!("m must be >= 2, got {m}")));
        }
        if initial.len() != m - 1 {
            return Err(SstError::InvalidParameter(format!(
                "expected {} initial values, got {}",
                m - 1,
                initial.len()
            )));
        }
        if let TollFamily::Power(a) = family {
            if !(a > 0.0) {
                return Err(SstError::InvalidParameter(format!("power exponent must be > 0, got {a}")));
            }
        }
        Ok(TollSpec { m, family, initial })
    }

    /// Degenerate toll `t * min(m-1, n)` with matching initial values.
    pub fn degenerate(m: usize, t: f64) -> Self {
        let initial = (0..m - 1).map(|j| t * j as f64).collect();
        TollSpec {
            m,
            family: TollFamily::Constant(t * (m - 1) as f64),
            initial,
        }
    }

    /// Space-requirement toll: one node per full node, b_0 = 0, b_j = 1 otherwise.
    pub fn space_requirement(m: usize) -> Self {
        let initial = (0..m - 1).map(|j| if j == 0 { 0.0 } else { 1.0 }).collect();
        TollSpec {
            m,
            family: TollFamily::Constant(1.0),
            initial,
        }
    }

    pub fn is_exact(&self) -> bool {
        match &self.family {
            TollFamily::Constant(_) | TollFamily::Explicit(_) => true,
            TollFamily::Power(a) => a.fract() == 0.0,
            TollFamily::Log | TollFamily::LogBinomial => false,
        }
    }

    pub fn explicit_len(&self) -> Option<usize> {
        match &self.family {
            TollFamily::Explicit(v) => Some(v.len()),
            _ => None,
        }
    }

    /// Toll value t_n for n >= m - 1.
    pub fn toll<F: TollScalar>(&self, n: usize) -> Result<F> {
        if n + 1 < self.m {
            return Err(SstError::Domain(format!(
                "toll t_{n} is undefined for m = {} (requires n >= {})",
                self.m,
                self.m - 1
            )));
        }
        let inexact = || SstError::Unsupported(format!("toll {} has no exact value at n = {n}", self.family));
        match &self.family {
            TollFamily::Constant(c) => Ok(F::from_f64(*c)),
            TollFamily::Power(a) => F::pow_of(n as u64, *a).ok_or_else(inexact),
            TollFamily::Log => F::ln_of(n as u64).ok_or_else(inexact),
            TollFamily::LogBinomial => {
                let k = self.m - 1;
                if n == k {
                    return Ok(F::zero());
                }
                let mut acc = F::zero();
                for i in 0..k {
                    acc += F::ln_of((n - i) as u64).ok_or_else(inexact)?;
                    acc -= F::ln_of((i + 1) as u64).ok_or_else(inexact)?;
                }
                Ok(acc)
            }
            TollFamily::Explicit(v) => v
                .get(n + 1 - self.m)
                .map(|x| F::from_f64(*x))
                .ok_or_else(|| SstError::Range(format!("explicit toll has no value for n = {n}"))),
        }
    }

    pub fn toll_value(&self, n: usize) -> Result<f64> {
        self.toll::<f64>(n)
    }

    /// Input sequence b_0..=b_{n_max}: initial values below m - 1, tolls above.
    pub fn input_sequence<F: TollScalar>(&self, n_max: usize) -> Result<Vec<F>> {
        (0..=n_max)
            .map(|n| {
                if n + 1 < self.m {
                    Ok(F::from_f64(self.initial[n]))
                } else {
                    self.toll(n)
                }
            })
            .collect()
    }

    /// Smooth extension of the toll to real arguments, used for tail estimates.
    pub fn continuation<R: Real>(&self, x: &R) -> Result<R> {
        match &self.family {
            TollFamily::Constant(c) => Ok(R::from_f64(*c)),
            TollFamily::Power(a) => Ok(x.powf(&R::from_f64(*a))),
            TollFamily::Log => Ok(x.ln()),
            TollFamily::LogBinomial => {
                let k = R::from_i64(self.m as i64 - 1);
                Ok((x.clone() + R::one()).ln_gamma()
                    - (x.clone() - k.clone() + R::one()).ln_gamma()
                    - (k + R::one()).ln_gamma())
            }
            TollFamily::Explicit(_) => Err(SstError::Unsupported(
                "explicit tolls have no continuation beyond their stored values".into(),
            )),
        }
    }

    /// Same specification with every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let family = match &self.family {
            TollFamily::Constant(x) => TollFamily::Constant(c * x),
            TollFamily::Explicit(v) => TollFamily::Explicit(v.iter().map(|x| c * x).collect()),
            _ => {
                return Err(SstError::Unsupported(
                    "only constant and explicit tolls can be rescaled".into(),
                ))
            }
        };
        Ok(TollSpec {
            m: self.m,
            family,
            initial: self.initial.iter().map(|x| c * x).collect(),
        })
    }
}

impl fmt::Display for TollFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TollFamily::Constant(c) => write!(f, "constant:{c}"),
            TollFamily::Power(a) => write!(f, "power:{a}"),
            TollFamily::Log => write!(f, "log"),
            TollFamily::LogBinomial => write!(f, "logbinomial"),
            TollFamily::Explicit(v) => write!(f, "explicit[{}]", v.len()),
        }
    }
}

impl FromStr for TollFamily {
    type Err = SstError;

    /// Parses `constant[:C]`, `power:A`, `log`, `logbinomial`, or
    /// `explicit:PATH` (one value per line, the first being t_{m-1}).
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let num = |a: Option<&str>, what: &str| -> Result<f64> {
            a.ok_or_else(|| SstError::InvalidParameter(format!("{what} needs a value")))?
                .parse::<f64>()
                .map_err(|e| SstError::InvalidParameter(format!("{what}: {e}")))
        };
        match head {
            "constant" => Ok(TollFamily::Constant(match arg {
                Some(_) => num(arg, "constant")?,
                None => 1.0,
            })),
            "power" => Ok(TollFamily::Power(num(arg, "power")?)),
            "log" => Ok(TollFamily::Log),
            "logbinomial" => Ok(TollFamily::LogBinomial),
            "explicit" => {
                let path = arg.ok_or_else(|| SstError::InvalidParameter("explicit needs a path".into()))?;
                let text = std::fs::read_to_string(path)
                    .map_err(|e| SstError::InvalidParameter(format!("{path}: {e}")))?;
                let vals = text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(|l| {
                        l.parse::<f64>()
                            .map_err(|e| SstError::InvalidParameter(format!("{path}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(TollFamily::Explicit(vals))
            }
            other => Err(SstError::InvalidParameter(format!("unknown toll family '{other}'"))),
        }
    }
}

/// Tree shape recorded only through subtree sizes.
#[derive(Clone, Debug, PartialEq)]
pub enum SizeSplitTree {
    Leaf(usize),
    Internal(Vec<SizeSplitTree>),
}

impl SizeSplitTree {
    pub fn size(&self, m: usize) -> usize {
        match self {
            SizeSplitTree::Leaf(k) => *k,
            SizeSplitTree::Internal(ch) => ch.iter().map(|c| c.size(m)).sum::<usize>() + m - 1,
        }
    }

    /// Binary right chain on `n` keys.
    pub fn right_chain(n: usize) -> Self {
        if n == 0 {
            return SizeSplitTree::Leaf(0);
        }
        SizeSplitTree::Internal(vec![SizeSplitTree::Leaf(0), Self::right_chain(n - 1)])
    }

    /// Builds the tree by splitting each size with `split(size)` until sizes drop below m - 1.
    pub fn from_splits(m: usize, n: usize, split: &mut impl FnMut(usize) -> Vec<usize>) -> Self {
        if n + 1 < m {
            return SizeSplitTree::Leaf(n);
        }
        let parts = split(n);
        SizeSplitTree::Internal(parts.into_iter().map(|s| Self::from_splits(m, s, split)).collect())
    }

    pub fn validate(&self, m: usize) -> Result<usize> {
        match self {
            SizeSplitTree::Leaf(k) if *k + 2 <= m => Ok(*k),
            SizeSplitTree::Leaf(k) => Err(SstError::Structural(format!(
                "leaf with {k} keys exceeds m - 2 = {}",
                m - 2
            ))),
            SizeSplitTree::Internal(ch) => {
                if ch.len() != m {
                    return Err(SstError::Structural(format!(
                        "internal node has {} children, expected {m}",
                        ch.len()
                    )));
                }
                let mut s = m - 1;
                for c in ch {
                    s += c.validate(m)?;
                }
                Ok(s)
            }
        }
    }
}

/// Evaluates the additive functional bottom-up.
pub fn functional_eval<F: TollScalar>(tree: &SizeSplitTree, spec: &TollSpec) -> Result<F> {
    tree.validate(spec.m)?;
    fn go<F: TollScalar>(t: &SizeSplitTree, spec: &TollSpec) -> Result<(F, usize)> {
        match t {
            SizeSplitTree::Leaf(k) => Ok((F::from_f64(spec.initial[*k]), *k)),
            SizeSplitTree::Internal(ch) => {
                let mut acc = F::zero();
                let mut size = spec.m - 1;
                for c in ch {
                    let (v, s) = go::<F>(c, spec)?;
                    acc += v;
                    size += s;
                }
                Ok((acc + spec.toll::<F>(size)?, size))
            }
        }
    }
    Ok(go::<F>(tree, spec)?.0)
}
