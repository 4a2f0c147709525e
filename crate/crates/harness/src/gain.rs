//! Classification of extra offspring (those beyond the first |P|) that the
//! surrogate promotes into the evaluated set.

/// `scored` holds (estimated, true) fitness for all generated offspring in
/// generation order; the first `base_count` are the base offspring and the
/// rest are extras. Among extras whose estimated rank falls within the top
/// `cutoff` of the whole batch: correctly added have a true rank within the
/// top `cutoff` too, the rest are incorrectly added.
pub fn extra_offspring_gain(
    scored: &[(f64, f64)],
    base_count: usize,
    cutoff: usize,
) -> (usize, usize) {
    assert!(base_count <= scored.len());
    let top = |key: fn(&(f64, f64)) -> f64| -> Vec<bool> {
        let mut order: Vec<usize> = (0..scored.len()).collect();
        order.sort_by(|&a, &b| key(&scored[a]).total_cmp(&key(&scored[b])).then(a.cmp(&b)));
        let mut selected = vec![false; scored.len()];
        for &i in order.iter().take(cutoff) {
            selected[i] = true;
        }
        selected
    };
    let estimated_top = top(|p| p.0);
    let true_top = top(|p| p.1);
    let mut correct = 0;
    let mut incorrect = 0;
    for i in base_count..scored.len() {
        if estimated_top[i] {
            if true_top[i] {
                correct += 1;
            } else {
                incorrect += 1;
            }
        }
    }
    (correct, incorrect)
}
