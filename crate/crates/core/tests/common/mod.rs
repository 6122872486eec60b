#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stiknn_core::{Dataset, LabelId, LabeledPoint, Role};

/// Random 2-D instance with `classes` labels shared by train and test.
pub fn random_instance(n: usize, t: usize, classes: u32, seed: u64) -> (Dataset, Dataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..classes).map(|c| c.to_string()).collect();
    let mut draw = |count: usize| -> Vec<LabeledPoint> {
        (0..count)
            .map(|_| {
                let features = vec![rng.random::<f64>(), rng.random::<f64>()];
                LabeledPoint::new(features, LabelId(rng.random_range(0..classes)))
            })
            .collect()
    };
    let train = draw(n);
    let test = draw(t);
    (
        Dataset::new(train, names.clone(), Role::Train).unwrap(),
        Dataset::new(test, names, Role::Test).unwrap(),
    )
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
