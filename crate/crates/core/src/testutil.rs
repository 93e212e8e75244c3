//! Synthetic data helpers shared across unit tests.

use rand::Rng;

use crate::data::{Dataset, Modality};
use crate::matrix::Matrix;
use crate::rng::rng_from_seed;

/// Standard normal via Box-Muller.
pub(crate) fn gauss(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Two Gaussian blobs separated by `sep` along every coordinate; the +1 class
/// sits on the positive side and comes first.
pub(crate) fn blobs(n_per_class: usize, d: usize, sep: f64, seed: u64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let n = 2 * n_per_class;
    let mut data = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for class in [1i8, -1i8] {
        let center = f64::from(class) * sep / 2.0;
        for _ in 0..n_per_class {
            for _ in 0..d {
                data.push(center + gauss(&mut rng));
            }
            y.push(class);
        }
    }
    let ids = (0..d).map(|j| format!("f{j}")).collect();
    Dataset::new(Matrix::from_vec(n, d, data).unwrap(), y, ids, Modality::GM).unwrap()
}
