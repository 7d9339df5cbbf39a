/// Indices of the points not dominated under (maximize u, maximize d),
/// sorted by u descending. Equal points are all kept.
pub fn pareto_front(scores: &[(f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].0.total_cmp(&scores[a].0).then(scores[b].1.total_cmp(&scores[a].1)));
    let mut front = Vec::new();
    // Best d among points with strictly greater u than the current group.
    let mut best_prev = f64::NEG_INFINITY;
    let mut seen_any = false;
    let mut i = 0;
    while i < order.len() {
        let u = scores[order[i]].0;
        let top = scores[order[i]].1;
        let mut j = i;
        while j < order.len() && scores[order[j]].0 == u {
            if scores[order[j]].1 == top && (!seen_any || top > best_prev) {
                front.push(order[j]);
            }
            j += 1;
        }
        if !seen_any || top > best_prev {
            best_prev = top;
        }
        seen_any = true;
        i = j;
    }
    front
}

/// Position of the median of a front of length `k`, rounding toward the
/// high-uncertainty end: `floor((k - 1) / 2)`.
pub fn pick_median(front_len: usize) -> usize {
    assert!(front_len > 0, "empty front");
    (front_len - 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        assert_eq!(pareto_front(&[(1.0, 1.0), (0.0, 0.0)]), vec![0]);
        assert_eq!(pareto_front(&[(2.0, 0.0), (0.0, 2.0), (1.0, 1.0)]), vec![0, 2, 1]);
        assert_eq!(pareto_front(&[(1.0, 1.0), (1.0, 1.0), (1.0, 0.5)]).len(), 2);
        assert_eq!(pareto_front(&[(1.0, 1.0), (0.5, 1.0)]), vec![0]);
    }

    #[test]
    fn median_rounds_toward_uncertainty() {
        assert_eq!(pick_median(1), 0);
        assert_eq!(pick_median(3), 1);
        assert_eq!(pick_median(4), 1);
    }
}
