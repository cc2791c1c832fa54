//! Hop-diameter bounded spanners on uniform and sparse line metrics.
//!
//! * [`ackermann`]: the `A`/`B` hierarchies and their inverses `alpha_k`, `alpha(n)`, `alpha(m, n)`.
//! * [`linemetric`]: uniform and `t`-sparse line metrics, the separation window.
//! * [`spanner`]: spanner graphs and exact stretch / hop-diameter verification.
//! * [`construct`]: stretch-1 builders with hop diameter 2, 3 and general `k`.
//! * [`oracle`]: exact minimum spanner size on small point sets.
//! * [`bounds`]: lower-bound and tradeoff formulas, comparison reports.
//! * [`cli`]: the `hopspanner` command line.

pub mod ackermann;
pub mod bounds;
pub mod cli;
pub mod construct;
pub mod eps;
pub mod linemetric;
pub mod oracle;
pub mod spanner;

pub use eps::Eps;
pub use linemetric::SparseLineMetric;
pub use spanner::{HopMode, Spanner};
