//! Knee-point cut over a sorted priority sequence.

/// Indices of `priorities` sorted ascending (ties by index), cut at the knee
/// and returned as the prefix through the knee point.
///
/// Both axes are normalised to [0, 1] and the knee is the point furthest
/// from the chord between the first and last point; with endpoints pinned at
/// (0,0) and (1,1) that is the argmax of |y - x|, earliest index on ties.
/// All-equal priorities have no knee and every index is returned. The cut is
/// invariant under affine transforms of the priorities because min-max
/// normalisation absorbs them.
pub fn knee_prefix(priorities: &[f64]) -> Vec<usize> {
    let m = priorities.len();
    if m == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        priorities[a]
            .partial_cmp(&priorities[b])
            .expect("priorities are sentinel-mapped, never NaN")
            .then(a.cmp(&b))
    });
    let lo = priorities[order[0]];
    let hi = priorities[order[m - 1]];
    if m == 1 || lo == hi || !(hi - lo).is_finite() {
        // Degenerate chord; +inf sentinels also land here and keep everything.
        return order;
    }
    let span = hi - lo;
    let mut knee = 0usize;
    let mut best = f64::NEG_INFINITY;
    for (i, &idx) in order.iter().enumerate() {
        let x = i as f64 / (m - 1) as f64;
        let y = (priorities[idx] - lo) / span;
        let d = (y - x).abs();
        if d > best {
            best = d;
            knee = i;
        }
    }
    order.truncate(knee + 1);
    order
}
