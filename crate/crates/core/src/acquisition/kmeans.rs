use rand::Rng;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    centroids
        .iter()
        .enumerate()
        .map(|(i, c)| (i, sq_dist(point, c)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Lloyd's k-means with k-means++ seeding. Returns the row indices of each
/// non-empty cluster, in cluster order. Clusters that go empty are re-seeded
/// with the point farthest from its centroid; with at least `k` rows every
/// cluster ends up non-empty.
pub fn kmeans<R: Rng + ?Sized>(rows: &[Vec<f64>], k: usize, max_iter: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let n = rows.len();
    let k = k.min(n);
    if k == 0 {
        return Vec::new();
    }

    let mut centroids = vec![rows[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = rows.iter().map(|r| sq_dist(r, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut t = rng.random_range(0.0..total);
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if t < w {
                    pick = i;
                    break;
                }
                t -= w;
            }
            // Float round-off could land on a zero-weight row.
            if d2[pick] == 0.0 {
                pick = (0..n).fold(0, |b, i| if d2[i] > d2[b] { i } else { b });
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centroids.push(rows[next].clone());
        for (d, r) in d2.iter_mut().zip(rows) {
            *d = d.min(sq_dist(r, &centroids[centroids.len() - 1]));
        }
    }

    let mut labels = vec![usize::MAX; n];
    for _ in 0..max_iter.max(1) {
        let mut changed = false;
        for (i, r) in rows.iter().enumerate() {
            let c = nearest(r, &centroids).0;
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        reseed_empty(rows, &mut labels, &mut centroids);
        let dims = rows[0].len();
        let mut sums = vec![vec![0.0; dims]; k];
        let mut counts = vec![0usize; k];
        for (r, &l) in rows.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(r) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        if !changed {
            break;
        }
    }

    let mut clusters = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        clusters[l].push(i);
    }
    clusters.retain(|c| !c.is_empty());
    clusters
}

fn reseed_empty(rows: &[Vec<f64>], labels: &mut [usize], centroids: &mut [Vec<f64>]) {
    let k = centroids.len();
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = (0..k).find(|&c| counts[c] == 0) else { return };
        let donor = (0..rows.len())
            .filter(|&i| counts[labels[i]] >= 2)
            .map(|i| (i, sq_dist(&rows[i], &centroids[labels[i]])))
            .fold(None, |best: Option<(usize, f64)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            });
        let Some((i, _)) = donor else { return };
        labels[i] = empty;
        centroids[empty] = rows[i].clone();
    }
}
