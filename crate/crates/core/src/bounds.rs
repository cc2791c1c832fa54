//! Lower-bound and tradeoff formulas, and reports that set them against
//! constructed spanners and exact minima.
//!
//! Every formula is evaluated exactly as a rational. The constants are the
//! explicit ones from the lower-bound theorems; the bounds themselves are
//! asymptotic, so at small `n` they are far below the trivial `n - 1`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ackermann::{alpha_k, alpha_two_param};
use crate::construct::{build_general, BuildError};
use crate::eps::Eps;
use crate::oracle::{min_edges_bnb, OracleError, SearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerBoundKind {
    /// `n log n / 16`, two hops on the uniform metric.
    Uniform2,
    /// `n log log n / 40`, three hops on the uniform metric.
    Uniform3,
    /// `n alpha_2(n) / 256`, two hops on a dense subspace of a sparse metric.
    Subspace2,
    /// `n alpha_3(n) / 1024`, three hops on a dense subspace.
    Subspace3,
    /// `n alpha_k(n) / 2^(6 floor(k/2) + 4)`, `k` hops on a dense subspace.
    GeneralSubspace,
    /// `n alpha_k(n) / 2^(6 floor(k/2) + 2)`, `k` hops on the full metric.
    GeneralUniform,
    /// [`GeneralSubspace`](Self::GeneralSubspace), divided by `eps` once `eps > 1/2`.
    MainEps,
}

impl LowerBoundKind {
    pub const ALL: [LowerBoundKind; 7] = [
        LowerBoundKind::Uniform2,
        LowerBoundKind::Uniform3,
        LowerBoundKind::Subspace2,
        LowerBoundKind::Subspace3,
        LowerBoundKind::GeneralSubspace,
        LowerBoundKind::GeneralUniform,
        LowerBoundKind::MainEps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LowerBoundKind::Uniform2 => "uniform-2",
            LowerBoundKind::Uniform3 => "uniform-3",
            LowerBoundKind::Subspace2 => "subspace-2",
            LowerBoundKind::Subspace3 => "subspace-3",
            LowerBoundKind::GeneralSubspace => "general-subspace",
            LowerBoundKind::GeneralUniform => "general-uniform",
            LowerBoundKind::MainEps => "main-eps",
        }
    }

    /// Whether the formula is stated for hop bound `k`.
    pub fn accepts(self, k: u32) -> bool {
        match self {
            LowerBoundKind::Uniform2 | LowerBoundKind::Subspace2 => k == 2,
            LowerBoundKind::Uniform3 | LowerBoundKind::Subspace3 => k == 3,
            _ => k >= 2,
        }
    }

    /// Hypotheses of the underlying theorem, for report metadata.
    pub fn preconditions(self, k: u32) -> Vec<String> {
        let density = match self {
            LowerBoundKind::Subspace2 => Some("31/32".to_string()),
            LowerBoundKind::Subspace3 => Some("127/128".to_string()),
            LowerBoundKind::GeneralSubspace | LowerBoundKind::MainEps => {
                Some(format!("1 - 2^-{}", k + 4))
            }
            _ => None,
        };
        let mut out = Vec::new();
        if let Some(d) = density {
            out.push("n >= 1000".to_string());
            out.push(format!("subspace holds at least a {d} fraction of the points"));
        }
        match self {
            LowerBoundKind::MainEps => out.push("stated for eps <= 1/2; scaled by 1/eps above".into()),
            _ => out.push("eps <= 1/2".into()),
        }
        out
    }
}

impl fmt::Display for LowerBoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LowerBoundKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LowerBoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown bound kind {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("bound {kind} is not stated for k = {k}")]
    KindMismatch { kind: LowerBoundKind, k: u32 },
    #[error("n must be at least 1")]
    NoPoints,
    #[error("m = {m} >= n * alpha_0(n) for n = {n}: no k satisfies the region inequalities")]
    NoRegion { m: u64, n: u64 },
    #[error("need m >= n, got m = {m}, n = {n}")]
    TooFewEdges { m: u64, n: u64 },
    #[error("need m < n^2 / 32, got m = {m}, n = {n}")]
    TooManyEdges { m: u64, n: u64 },
}

fn floor_log2(x: u64) -> u64 {
    if x == 0 {
        0
    } else {
        u64::from(x.ilog2())
    }
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

fn general_exponent(k: u32, extra: u32) -> u32 {
    6 * (k / 2) + extra
}

/// Exact value of the named lower bound on the edge count.
///
/// Logarithms of non powers of two are rounded down (`floor(log2 n)`, and
/// `floor(log2 floor(log2 n))` for the double logarithm), with `log x = 0` for
/// `x <= 1`, so the value never exceeds the real-valued formula.
pub fn lower_bound_edges(kind: LowerBoundKind, n: u64, k: u32, eps: Eps) -> Result<BigRational, BoundsError> {
    if n == 0 {
        return Err(BoundsError::NoPoints);
    }
    if !kind.accepts(k) {
        return Err(BoundsError::KindMismatch { kind, k });
    }
    let nn = BigInt::from(n);
    let frac = |num: BigInt, den: BigInt| BigRational::new(num, den);
    let alpha = |j: u32| BigInt::from(alpha_k(j, n));
    Ok(match kind {
        LowerBoundKind::Uniform2 => frac(nn * floor_log2(n), 16.into()),
        LowerBoundKind::Uniform3 => frac(nn * floor_log2(floor_log2(n)), 40.into()),
        LowerBoundKind::Subspace2 => frac(nn * alpha(2), 256.into()),
        LowerBoundKind::Subspace3 => frac(nn * alpha(3), 1024.into()),
        LowerBoundKind::GeneralSubspace => frac(nn * alpha(k), pow2(general_exponent(k, 4))),
        LowerBoundKind::GeneralUniform => frac(nn * alpha(k), pow2(general_exponent(k, 2))),
        LowerBoundKind::MainEps => {
            let base = lower_bound_edges(LowerBoundKind::GeneralSubspace, n, k, eps)?;
            let e = BigRational::new(eps.numer().into(), eps.denom().into());
            if e > BigRational::new(1.into(), 2.into()) {
                base / e
            } else {
                base
            }
        }
    })
}

// Beyond this many levels every alpha_k(n) has reached its limit value.
const REGION_SCAN: u32 = 128;

/// The `k` with `n alpha_k(n) <= m < n alpha_{k-1}(n)`.
///
/// The scan returns the least such `k`. Requires `m < n alpha_0(n)`.
pub fn unique_k_region(m: u64, n: u64) -> Result<u32, BoundsError> {
    if n == 0 {
        return Err(BoundsError::NoPoints);
    }
    let level = |k: u32| u128::from(n) * u128::from(alpha_k(k, n));
    if u128::from(m) >= level(0) {
        return Err(BoundsError::NoRegion { m, n });
    }
    (1..=REGION_SCAN)
        .find(|&k| level(k) <= u128::from(m))
        .ok_or(BoundsError::NoRegion { m, n })
}

/// The `k` with `n alpha_k(n) / 2^(6 floor(k/2) + 4) <= m` and
/// `m < n alpha_{k-1}(n) / 2^(6 floor((k-1)/2) + 4)`; the least one if several.
pub fn scaled_k_region(m: u64, n: u64) -> Result<u32, BoundsError> {
    if n == 0 {
        return Err(BoundsError::NoPoints);
    }
    // n alpha_k(n) <= m 2^e, with m 2^e saturating once e is large.
    let reached = |k: u32| {
        let lhs = u128::from(n) * u128::from(alpha_k(k, n));
        let e = general_exponent(k, 4);
        let rhs = if e >= 64 { u128::MAX } else { u128::from(m) << e };
        lhs <= rhs
    };
    if reached(0) {
        return Err(BoundsError::NoRegion { m, n });
    }
    (1..=REGION_SCAN).find(|&k| reached(k)).ok_or(BoundsError::NoRegion { m, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TradeoffVariant {
    /// Stretch-1 spanners: hop diameter at least `alpha(m, n)`.
    Stretch1,
    /// Stretch `1 + eps` with `eps <= 1/2`: at least `alpha(m, n) - 6 floor(k/2) - 4`.
    StretchEps,
}

impl FromStr for TradeoffVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stretch1" | "stretch-1" => Ok(TradeoffVariant::Stretch1),
            "stretch-eps" => Ok(TradeoffVariant::StretchEps),
            _ => Err(format!("unknown variant {s:?} (expected stretch1 or stretch-eps)")),
        }
    }
}

/// Lower bound on the hop diameter of any `m`-edge spanner on `n` points.
///
/// `StretchEps` takes `k` from [`scaled_k_region`] and floors the result at 0.
pub fn hop_lower_bound_from_edges(m: u64, n: u64, variant: TradeoffVariant) -> Result<u64, BoundsError> {
    if n == 0 {
        return Err(BoundsError::NoPoints);
    }
    if m < n {
        return Err(BoundsError::TooFewEdges { m, n });
    }
    let alpha = alpha_two_param(m, n).expect("m, n >= 1");
    match variant {
        TradeoffVariant::Stretch1 => Ok(alpha),
        TradeoffVariant::StretchEps => {
            if 32 * u128::from(m) >= u128::from(n) * u128::from(n) {
                return Err(BoundsError::TooManyEdges { m, n });
            }
            let k = scaled_k_region(m, n)?;
            Ok(alpha.saturating_sub(u64::from(general_exponent(k, 4))))
        }
    }
}

fn ser_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// One `(n, k, eps)` combination of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsRow {
    pub n: u64,
    pub k: u32,
    pub eps: Eps,
    pub lb_kind: LowerBoundKind,
    #[serde(serialize_with = "ser_display")]
    pub lb_value: BigRational,
    pub construction_edges: u64,
    pub oracle_min: Option<u64>,
}

impl BoundsRow {
    /// `lb_value <= oracle_min <= construction_edges`, where an oracle value exists.
    pub fn sandwich_holds(&self) -> bool {
        let lb_ok = |x: u64| self.lb_value <= BigRational::from_integer(x.into());
        match self.oracle_min {
            Some(o) => lb_ok(o) && o <= self.construction_edges,
            None => lb_ok(self.construction_edges),
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The bound a report row is compared against.
pub fn report_kind(eps: Eps) -> LowerBoundKind {
    if eps.ratio() * 2 > 1.into() {
        LowerBoundKind::MainEps
    } else {
        LowerBoundKind::GeneralSubspace
    }
}

/// One row per `(n, k, eps)`, sorted lexicographically, over the uniform metric `1..=n`.
pub fn make_report(
    n_list: &[u64],
    k_list: &[u32],
    eps_list: &[Eps],
    with_oracle: bool,
) -> Result<Vec<BoundsRow>, ReportError> {
    let mut ns = n_list.to_vec();
    let mut ks = k_list.to_vec();
    let mut es = eps_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    ks.sort_unstable();
    ks.dedup();
    es.sort_unstable_by_key(|e| e.ratio());
    es.dedup();
    let mut rows = Vec::new();
    for &n in &ns {
        let points: Vec<i64> = (1..=n as i64).collect();
        for &k in &ks {
            let (_, stats) = build_general(points.clone(), k)?;
            for &eps in &es {
                let lb_kind = report_kind(eps);
                let lb_value = lower_bound_edges(lb_kind, n, k, eps)?;
                let oracle_min = if with_oracle {
                    let res = min_edges_bnb(&points, &SearchConfig::new(eps, u64::from(k)))?;
                    Some(res.minimum as u64)
                } else {
                    None
                };
                rows.push(BoundsRow { n, k, eps, lb_kind, lb_value, construction_edges: stats.edge_count, oracle_min });
            }
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct CsvRecord<'a> {
    n: u64,
    k: u32,
    eps: String,
    lb_kind: &'a str,
    lb_value: String,
    construction_edges: u64,
    oracle_min: Option<u64>,
}

/// Columns `n,k,eps,lb_kind,lb_value,construction_edges,oracle_min`; an absent
/// oracle value is an empty field.
pub fn write_csv<W: Write>(rows: &[BoundsRow], out: W) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRecord {
            n: r.n,
            k: r.k,
            eps: r.eps.to_string(),
            lb_kind: r.lb_kind.name(),
            lb_value: r.lb_value.to_string(),
            construction_edges: r.construction_edges,
            oracle_min: r.oracle_min,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    #[serde(flatten)]
    row: &'a BoundsRow,
    asymptotic: bool,
    preconditions: Vec<String>,
}

/// The CSV rows as a JSON array, each with its theorem's hypotheses attached.
pub fn write_json<W: Write>(rows: &[BoundsRow], mut out: W) -> Result<(), ReportError> {
    let items: Vec<JsonRow> = rows
        .iter()
        .map(|row| JsonRow { row, asymptotic: true, preconditions: row.lb_kind.preconditions(row.k) })
        .collect();
    serde_json::to_writer_pretty(&mut out, &items)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// `lb_value` as a decimal with `digits` fractional digits, truncated.
pub fn decimal(value: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (value * BigRational::from_integer(scale.clone())).floor().to_integer();
    let (int, frac) = (&scaled / &scale, &scaled % &scale);
    if digits == 0 {
        return int.to_string();
    }
    let frac = frac.to_string();
    format!("{int}.{}{frac}", "0".repeat(digits as usize - frac.len()))
}
