//! Tukey HSD pairwise comparisons and the studentized range
//! distribution computed by nested numeric quadrature.
//!
//! The CDF of the studentized range Q(k, df) is
//!
//! ```text
//! P(Q <= q) = Integral_0^inf  f_S(s; df) * P_range(q * s; k) ds
//! P_range(w; k) = k * Integral phi(z) * [Phi(z) - Phi(z - w)]^(k-1) dz
//! ```
//!
//! where `f_S` is the density of `sqrt(chi^2_df / df)`. The outer
//! integral collapses for `df = inf`. Critical values are found by
//! bisection on the CDF and cached per `(k, df, alpha)`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::corpus::CoarseClass;

use super::anova::{decompose, GroupedSamples};
use super::special::{adaptive_simpson, ln_gamma, normal_cdf, normal_pdf};
use super::StatsError;

/// Tail half-width for integrals over the standard normal.
const NORMAL_TAIL: f64 = 9.0;
const INNER_TOL: f64 = 1e-8;
const OUTER_TOL: f64 = 1e-7;

/// CDF of the range of `k` iid standard normals.
fn normal_range_cdf(w: f64, k: usize) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let integrand = move |z: f64| {
        normal_pdf(z) * (normal_cdf(z) - normal_cdf(z - w)).powi(k as i32 - 1)
    };
    (k as f64 * adaptive_simpson(&integrand, -NORMAL_TAIL, NORMAL_TAIL, INNER_TOL)).clamp(0.0, 1.0)
}

/// Log density of S = sqrt(chi^2_df / df).
fn ln_scaled_chi_pdf(s: f64, df: f64) -> f64 {
    let half = df / 2.0;
    (2.0f64).ln() + half * half.ln() - ln_gamma(half) + (df - 1.0) * s.ln() - half * s * s
}

/// CDF of the studentized range; `df = f64::INFINITY` gives the pure
/// normal-range limit.
pub fn studentized_range_cdf(q: f64, k: usize, df: f64) -> f64 {
    assert!(k >= 2, "studentized range needs k >= 2");
    if q <= 0.0 {
        return 0.0;
    }
    if df.is_infinite() {
        return normal_range_cdf(q, k);
    }
    // integration support of the scaled chi density
    let spread = 12.0 / (2.0 * df).sqrt();
    let lo = (1.0 - spread).max(1e-9);
    let hi = 1.0 + spread.max(0.5);
    let integrand = move |s: f64| ln_scaled_chi_pdf(s, df).exp() * normal_range_cdf(q * s, k);
    adaptive_simpson(&integrand, lo, hi, OUTER_TOL).clamp(0.0, 1.0)
}

/// Critical value q*(k, df, alpha): the (1 - alpha) quantile.
pub fn studentized_range_quantile(k: usize, df: f64, alpha: f64) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64, u64), f64>>> = OnceLock::new();
    let key = (k, df.to_bits(), alpha.to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&q) = cache.lock().unwrap().get(&key) {
        return q;
    }

    let target = 1.0 - alpha;
    let mut lo = 0.0f64;
    let mut hi = 10.0f64;
    while studentized_range_cdf(hi, k, df) < target && hi < 1e4 {
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if studentized_range_cdf(mid, k, df) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-7 {
            break;
        }
    }
    let q = 0.5 * (lo + hi);
    cache.lock().unwrap().insert(key, q);
    q
}

#[derive(Debug, Clone, Serialize)]
pub struct TukeyPair {
    pub class_a: CoarseClass,
    pub class_b: CoarseClass,
    /// mean(a) - mean(b).
    pub mean_diff: f64,
    pub q_statistic: f64,
    pub significant_at_05: bool,
    pub significant_at_01: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TukeyResult {
    pub pairs: Vec<TukeyPair>,
    pub df_within: usize,
}

/// Tukey HSD over all class pairs, with the Tukey-Kramer standard error
/// for unequal group sizes. Significance is tested at the 0.05 and 0.01
/// levels against the studentized range critical values.
pub fn tukey_hsd(g: &GroupedSamples) -> Result<TukeyResult, StatsError> {
    let d = decompose(g)?;
    let k = d.means.len();
    let msw = d.mean_square_within();
    let df = d.df_within as f64;

    let q05 = studentized_range_quantile(k, df, 0.05);
    let q01 = studentized_range_quantile(k, df, 0.01);

    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let (class_a, mean_a) = d.means[i];
            let (class_b, mean_b) = d.means[j];
            let (n_a, n_b) = (d.sizes[i] as f64, d.sizes[j] as f64);
            let se = (msw / 2.0 * (1.0 / n_a + 1.0 / n_b)).sqrt();
            let q = (mean_a - mean_b).abs() / se;
            pairs.push(TukeyPair {
                class_a,
                class_b,
                mean_diff: mean_a - mean_b,
                q_statistic: q,
                significant_at_05: q > q05,
                significant_at_01: q > q01,
            });
        }
    }
    Ok(TukeyResult {
        pairs,
        df_within: d.df_within,
    })
}
