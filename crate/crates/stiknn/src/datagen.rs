//! Synthetic datasets and label/imbalance transforms.
//!
//! Every generator is a pure function of its parameters and seed. The PRNG
//! is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`) and Gaussian noise
//! comes from `rand_distr::Normal`. Angles are evenly spaced, so with zero
//! noise the geometry is exact and the only randomness is the noise itself.

use std::f64::consts::PI;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use stiknn_core::{Dataset, LabelId, LabeledPoint, Role};

use crate::error::{Error, Result};

pub const DEFAULT_FACTOR: f64 = 0.5;
pub const DEFAULT_NOISE: f64 = 0.1;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn binary_names() -> Vec<String> {
    vec!["0".to_string(), "1".to_string()]
}

fn noise(std: f64) -> Result<Option<Normal<f64>>> {
    if !(std >= 0.0 && std.is_finite()) {
        return Err(Error::Invalid(format!("noise_std must be finite and >= 0, got {std}")));
    }
    if std == 0.0 {
        return Ok(None);
    }
    Normal::new(0.0, std).map(Some).map_err(|e| Error::Invalid(e.to_string()))
}

fn jitter(points: &mut [LabeledPoint], std: f64, seed: u64) -> Result<()> {
    if let Some(normal) = noise(std)? {
        let mut rng = rng(seed);
        for p in points {
            for x in &mut p.features {
                *x += normal.sample(&mut rng);
            }
        }
    }
    Ok(())
}

/// Two concentric circles: class `0` on the unit circle, class `1` on
/// radius `factor`. Class 0 points come first.
pub fn make_circles(n_per_class: usize, factor: f64, noise_std: f64, seed: u64) -> Result<Dataset> {
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::Invalid(format!("factor must lie in (0, 1), got {factor}")));
    }
    if n_per_class == 0 {
        return Err(Error::Invalid("n_per_class must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(2 * n_per_class);
    for (label, radius) in [(0u32, 1.0), (1, factor)] {
        for i in 0..n_per_class {
            let theta = 2.0 * PI * i as f64 / n_per_class as f64;
            let xy = vec![radius * theta.cos(), radius * theta.sin()];
            points.push(LabeledPoint::new(xy, LabelId(label)));
        }
    }
    jitter(&mut points, noise_std, seed)?;
    Ok(Dataset::new(points, binary_names(), Role::Train)?)
}

/// Two interleaving half circles: class `0` at `(cos θ, sin θ)` and class `1`
/// at `(1 - cos θ, 0.5 - sin θ)`, θ evenly spaced over `[0, π]`.
pub fn make_moons(n_per_class: usize, noise_std: f64, seed: u64) -> Result<Dataset> {
    if n_per_class == 0 {
        return Err(Error::Invalid("n_per_class must be at least 1".into()));
    }
    let theta = |i: usize| {
        if n_per_class == 1 {
            0.0
        } else {
            PI * i as f64 / (n_per_class - 1) as f64
        }
    };
    let mut points = Vec::with_capacity(2 * n_per_class);
    for i in 0..n_per_class {
        let t = theta(i);
        points.push(LabeledPoint::new(vec![t.cos(), t.sin()], LabelId(0)));
    }
    for i in 0..n_per_class {
        let t = theta(i);
        points.push(LabeledPoint::new(vec![1.0 - t.cos(), 0.5 - t.sin()], LabelId(1)));
    }
    jitter(&mut points, noise_std, seed)?;
    Ok(Dataset::new(points, binary_names(), Role::Train)?)
}

/// Uniform points in the unit square with `classes` uniformly drawn labels.
pub fn random_instance(n: usize, classes: u32, seed: u64) -> Result<Dataset> {
    if classes == 0 {
        return Err(Error::Invalid("need at least one class".into()));
    }
    let mut rng = rng(seed);
    let points = (0..n)
        .map(|_| {
            let xy = vec![rng.random::<f64>(), rng.random::<f64>()];
            LabeledPoint::new(xy, LabelId(rng.random_range(0..classes)))
        })
        .collect();
    let names = (0..classes).map(|c| c.to_string()).collect();
    Ok(Dataset::new(points, names, Role::Train)?)
}

/// Flips the labels of `floor(fraction * n)` distinct points, each to a
/// uniformly chosen different class present in the dataset. Returns the new
/// dataset and the flipped indices in ascending order.
pub fn inject_label_noise(dataset: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Vec<usize>)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Invalid(format!("fraction must lie in [0, 1], got {fraction}")));
    }
    let classes = dataset.classes();
    if classes.len() < 2 {
        return Err(stiknn_core::Error::SingleClass.into());
    }
    let n = dataset.len();
    let count = ((fraction * n as f64).floor() as usize).min(n);
    let mut rng = rng(seed);
    let mut flipped = index::sample(&mut rng, n, count).into_vec();
    flipped.sort_unstable();
    let mut labels = dataset.labels();
    for &i in &flipped {
        let others: Vec<LabelId> = classes.iter().copied().filter(|&c| c != labels[i]).collect();
        labels[i] = others[rng.random_range(0..others.len())];
    }
    Ok((dataset.relabeled(&labels)?, flipped))
}

/// Keeps `round(keep_fraction * m)` uniformly chosen members of `class`
/// (of `m`), leaving other points untouched and in order.
pub fn subsample_class(dataset: &Dataset, class: LabelId, keep_fraction: f64, seed: u64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&keep_fraction) {
        return Err(Error::Invalid(format!("keep_fraction must lie in [0, 1], got {keep_fraction}")));
    }
    let members: Vec<usize> = (0..dataset.len()).filter(|&i| dataset.label(i) == class).collect();
    if members.is_empty() {
        return Err(Error::Invalid(format!("class {class} does not occur in the dataset")));
    }
    let keep = (keep_fraction * members.len() as f64).round() as usize;
    let mut rng = rng(seed);
    let mut kept = vec![false; dataset.len()];
    for slot in index::sample(&mut rng, members.len(), keep) {
        kept[members[slot]] = true;
    }
    let indices: Vec<usize> = (0..dataset.len())
        .filter(|&i| dataset.label(i) != class || kept[i])
        .collect();
    Ok(dataset.select(&indices)?)
}

/// Seeded shuffle, then the first `round(test_fraction * n)` shuffled points
/// (at least one, at most `n - 1`) become the test set. Both parts keep the
/// original relative order.
pub fn train_test_split(dataset: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let n = dataset.len();
    if n < 2 {
        return Err(Error::Invalid("need at least two points to split".into()));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Invalid(format!("test_fraction must lie in (0, 1), got {test_fraction}")));
    }
    let n_test = ((test_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut rng = rng(seed);
    let perm = index::sample(&mut rng, n, n).into_vec();
    let mut test: Vec<usize> = perm[..n_test].to_vec();
    let mut train: Vec<usize> = perm[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((
        dataset.select(&train)?.with_role(Role::Train),
        dataset.select(&test)?.with_role(Role::Test),
    ))
}

/// The circle setting used by the experiments: 300 training points per
/// class and a test set of 50 per class drawn with the next seed.
pub fn circle_experiment(seed: u64) -> Result<(Dataset, Dataset)> {
    let train = make_circles(300, DEFAULT_FACTOR, DEFAULT_NOISE, seed)?;
    let test = make_circles(50, DEFAULT_FACTOR, DEFAULT_NOISE, seed.wrapping_add(1))?.with_role(Role::Test);
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_circles_are_exact() {
        let ds = make_circles(300, 0.5, 0.0, 7).unwrap();
        assert_eq!(ds.len(), 600);
        for p in ds.points() {
            let r = p.features[0].hypot(p.features[1]);
            let want = if p.label == LabelId(0) { 1.0 } else { 0.5 };
            assert!((r - want).abs() < 1e-12);
        }
        let counts = ds.labels().iter().filter(|l| **l == LabelId(0)).count();
        assert_eq!(counts, 300);
    }

    #[test]
    fn generators_validate_arguments() {
        assert!(make_circles(10, 1.0, 0.1, 0).is_err());
        assert!(make_circles(10, 0.0, 0.1, 0).is_err());
        assert!(make_circles(0, 0.5, 0.1, 0).is_err());
        assert!(make_circles(10, 0.5, -1.0, 0).is_err());
        assert!(make_moons(0, 0.1, 0).is_err());
    }

    #[test]
    fn moons_endpoints_and_balance() {
        let ds = make_moons(5, 0.0, 0).unwrap();
        assert_eq!(ds.point(0).features, vec![1.0, 0.0]);
        assert_eq!(ds.point(5).features, vec![0.0, 0.5]);
        assert_eq!(ds.classes().len(), 2);
        assert_eq!(ds.labels().iter().filter(|l| **l == LabelId(1)).count(), 5);
    }

    #[test]
    fn seeds_are_deterministic() {
        assert_eq!(make_circles(50, 0.5, 0.1, 3).unwrap(), make_circles(50, 0.5, 0.1, 3).unwrap());
        assert_ne!(make_circles(50, 0.5, 0.1, 3).unwrap(), make_circles(50, 0.5, 0.1, 4).unwrap());
        assert_eq!(make_moons(50, 0.1, 3).unwrap(), make_moons(50, 0.1, 3).unwrap());
    }

    #[test]
    fn label_noise_edges() {
        let ds = make_circles(10, 0.5, 0.1, 1).unwrap();
        let (same, flips) = inject_label_noise(&ds, 0.0, 5).unwrap();
        assert_eq!(same, ds);
        assert!(flips.is_empty());

        let (all, flips) = inject_label_noise(&ds, 1.0, 5).unwrap();
        assert_eq!(flips, (0..20).collect::<Vec<_>>());
        for i in 0..20 {
            assert_ne!(all.label(i), ds.label(i));
        }

        let (a, fa) = inject_label_noise(&ds, 0.3, 9).unwrap();
        let (b, fb) = inject_label_noise(&ds, 0.3, 9).unwrap();
        assert_eq!((a, fa.clone()), (b, fb));
        assert_eq!(fa.len(), 6);

        let single = Dataset::from_rows(&[vec![0.0], vec![1.0]], &["a", "a"], Role::Train).unwrap();
        assert!(inject_label_noise(&single, 0.5, 0).is_err());
    }

    #[test]
    fn subsampling_edges() {
        let ds = make_circles(10, 0.5, 0.1, 1).unwrap();
        assert_eq!(subsample_class(&ds, LabelId(0), 1.0, 2).unwrap(), ds);
        let gone = subsample_class(&ds, LabelId(0), 0.0, 2).unwrap();
        assert_eq!(gone.len(), 10);
        assert!(gone.labels().iter().all(|l| *l == LabelId(1)));
        let half = subsample_class(&ds, LabelId(1), 0.5, 2).unwrap();
        assert_eq!(half, subsample_class(&ds, LabelId(1), 0.5, 2).unwrap());
        assert_eq!(half.len(), 15);
        assert!(subsample_class(&ds, LabelId(7), 0.5, 2).is_err());
    }

    #[test]
    fn split_is_eighty_twenty() {
        let ds = make_moons(50, 0.1, 1).unwrap();
        let (train, test) = train_test_split(&ds, 0.2, 11).unwrap();
        assert_eq!((train.len(), test.len()), (80, 20));
        assert_eq!(test.role(), Role::Test);
        assert_eq!(train_test_split(&ds, 0.2, 11).unwrap().1, test);
    }
}
