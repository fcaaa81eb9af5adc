//! Randomized bound-vs-truth sweeps emitting deterministic CSV: one row
//! per instance comparing the simple and gamma paving bounds, the mixed
//! characteristic bound, and (when enumeration is cheap) the true best
//! paving quality.

use crate::bounds::{mixed_char_bound, paving_gamma};
use crate::error::Error;
use crate::paving::paving_search;
use crate::random::random_psd_contraction;
use crate::{par, subset};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Instance cap for the exhaustive-search column inside sweeps.
const SWEEP_SEARCH_CAP: u128 = 1 << 18;

/// Sweep configuration: the cross product of the value lists times
/// `samples` instances each.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub r_values: Vec<usize>,
    /// Diagonal budgets; 0 produces formula-only rows with no random
    /// instance.
    pub alpha_values: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

/// One output row. Optional fields print as empty CSV cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub id: usize,
    pub n: usize,
    pub r: usize,
    /// Realized max diagonal entry when an instance was drawn, otherwise
    /// the configured budget.
    pub alpha: f64,
    /// 1/r.
    pub eps: f64,
    /// 4 r^{-1/4} + alpha.
    pub bound_simple: f64,
    /// Barrier bound, when alpha lies in (0, 1).
    pub bound_gamma: Option<f64>,
    /// Mixed characteristic headline bound at (eps, r), when in regime.
    pub bound_mixed: Option<f64>,
    /// Best paving quality from exhaustive search.
    pub true_root: Option<f64>,
    /// All applicable inequalities held within tolerance.
    pub verified: bool,
}

pub const CSV_HEADER: &str =
    "id,n,r,alpha,eps,bound_simple,bound_gamma,bound_mixed,true_root,verified";

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{:.16e},{:.16e},{:.16e},{},{},{},{}",
            self.id,
            self.n,
            self.r,
            self.alpha,
            self.eps,
            self.bound_simple,
            fmt_opt(self.bound_gamma),
            fmt_opt(self.bound_mixed),
            fmt_opt(self.true_root),
            self.verified
        )
    }
}

fn instance_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&(id as u64).to_le_bytes());
    ChaCha8Rng::from_seed(bytes)
}

fn sweep_row(id: usize, n: usize, r: usize, alpha_cfg: f64, seed: u64) -> SweepRow {
    let eps = 1.0 / r as f64;
    let (alpha, true_root) = if alpha_cfg > 0.0 {
        let mut rng = instance_rng(seed, id);
        let a = random_psd_contraction(n, alpha_cfg, &mut rng)
            .expect("validated configuration");
        let realized = a.diag().into_iter().fold(0.0f64, f64::max);
        let best = if (r as u128).checked_pow(n as u32).is_some_and(|t| t <= SWEEP_SEARCH_CAP)
        {
            Some(paving_search(&a, r, false).expect("guarded size").lambda_max())
        } else {
            None
        };
        (realized, best)
    } else {
        (alpha_cfg, None)
    };
    let bound_simple = 4.0 * (r as f64).powf(-0.25) + alpha;
    let bound_gamma = if alpha > 0.0 && alpha < 1.0 {
        Some(paving_gamma(eps, alpha).expect("validated domain"))
    } else {
        None
    };
    let bound_mixed = mixed_char_bound(eps, r as u32).ok().map(|b| b.headline);
    let in_regime = alpha > 0.0 && alpha.sqrt() + eps.sqrt() <= 1.0;
    let mut verified = true;
    if let Some(g) = bound_gamma {
        if in_regime && g > bound_simple + 1e-12 {
            verified = false;
        }
    }
    if let Some(t) = true_root {
        let cap = if in_regime { bound_simple.min(1.0) } else { 1.0 };
        if t > cap + 1e-8 {
            verified = false;
        }
    }
    if let Some(m) = bound_mixed {
        let mss = {
            let s = (r as f64 * eps).sqrt();
            (1.0 + s) * (1.0 + s)
        };
        if m < mss - 1e-12 {
            verified = false;
        }
    }
    SweepRow {
        id,
        n,
        r,
        alpha,
        eps,
        bound_simple,
        bound_gamma,
        bound_mixed,
        true_root,
        verified,
    }
}

/// Runs the sweep and renders the CSV (header plus one row per
/// instance, LF line endings). Instances are computed in a worker pool
/// but emitted in id order, so reruns with the same config are
/// byte-identical.
pub fn run_sweep(cfg: &SweepConfig) -> Result<String, Error> {
    if cfg.n_values.is_empty() || cfg.r_values.is_empty() || cfg.alpha_values.is_empty() {
        return Err(Error::Domain("sweep needs at least one n, r, and alpha value"));
    }
    if cfg.samples == 0 {
        return Err(Error::Domain("sweep needs at least one sample per combination"));
    }
    for &n in &cfg.n_values {
        if n == 0 || n > crate::multiaffine::MAX_VARS {
            return Err(Error::SizeGuard {
                size: n as u128,
                limit: crate::multiaffine::MAX_VARS as u128,
            });
        }
    }
    for &r in &cfg.r_values {
        if r == 0 {
            return Err(Error::Domain("block counts must be positive"));
        }
    }
    for &alpha in &cfg.alpha_values {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Domain("alpha values must lie in [0, 1)"));
        }
    }
    // reject infeasible instance-bearing combinations before any work
    for &alpha in &cfg.alpha_values {
        if alpha == 0.0 {
            continue;
        }
        for &n in &cfg.n_values {
            if n > 12 {
                return Err(Error::SizeGuard { size: n as u128, limit: 12 });
            }
            let _ = subset::lattice_size(n);
        }
    }
    let mut combos = Vec::new();
    for &n in &cfg.n_values {
        for &r in &cfg.r_values {
            for &alpha in &cfg.alpha_values {
                for _ in 0..cfg.samples {
                    combos.push((n, r, alpha));
                }
            }
        }
    }
    let seed = cfg.seed;
    let rows = par::map_range(combos.len(), |id| {
        let (n, r, alpha) = combos[id];
        sweep_row(id, n, r, alpha, seed)
    });
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    Ok(out)
}
