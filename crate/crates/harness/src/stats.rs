//! Wilcoxon signed-rank test: two-sided, zero differences dropped, normal
//! approximation with tie correction, no continuity correction.

/// Two-sided 5% critical value of the standard normal.
const Z_CRITICAL: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignificanceFlag {
    /// First sample significantly lower (better, since lower fitness wins).
    Better,
    Worse,
    Indistinguishable,
}

impl SignificanceFlag {
    pub fn symbol(self) -> &'static str {
        match self {
            SignificanceFlag::Better => "+",
            SignificanceFlag::Worse => "-",
            SignificanceFlag::Indistinguishable => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult {
    /// min(W+, W-), the classic reported statistic.
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Pairs remaining after zero differences are dropped.
    pub n_effective: usize,
    pub z: f64,
    pub flag: SignificanceFlag,
}

/// Paired two-sided test at the 5% level, oriented so that `Better` means
/// the first sample is significantly lower.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> WilcoxonResult {
    assert_eq!(a.len(), b.len(), "samples must be paired");
    assert!(a.len() >= 6, "need at least 6 pairs");
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return WilcoxonResult {
            statistic: 0.0,
            w_plus: 0.0,
            w_minus: 0.0,
            n_effective: 0,
            z: 0.0,
            flag: SignificanceFlag::Indistinguishable,
        };
    }

    // Average ranks of |d|, with tie bookkeeping for the variance.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks = vec![0.0f64; n];
    let mut tie_term = 0.0f64;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[order[j + 1]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg_rank;
        }
        tie_term += t * t * t - t;
        i = j + 1;
    }

    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let nf = n as f64;
    let w_minus = nf * (nf + 1.0) / 2.0 - w_plus;
    let mean = nf * (nf + 1.0) / 4.0;
    let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let z = (w_plus - mean) / variance.sqrt();
    let flag = if z.abs() > Z_CRITICAL {
        if z < 0.0 {
            SignificanceFlag::Better
        } else {
            SignificanceFlag::Worse
        }
    } else {
        SignificanceFlag::Indistinguishable
    };
    WilcoxonResult {
        statistic: w_plus.min(w_minus),
        w_plus,
        w_minus,
        n_effective: n,
        z,
        flag,
    }
}
