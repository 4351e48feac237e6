//! Random beliefs for property checks, oracle suites and benchmarks.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::measures::{CategoricalDistribution, SecondOrderSample};

/// A flat-Dirichlet draw on `k` classes. Roughly one draw in eight has some
/// classes zeroed out, and one in sixteen is a point mass, so boundary cases
/// of the simplex are exercised.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, k: usize) -> CategoricalDistribution {
    let roll: f64 = rng.random();
    if roll < 1.0 / 16.0 {
        let c = rng.random_range(0..k);
        return CategoricalDistribution::point_mass(k, c).expect("k >= 2");
    }
    let sparse = roll < 3.0 / 16.0;
    let mut w: Vec<f64> = (0..k)
        .map(|_| {
            if sparse && rng.random_bool(0.4) {
                0.0
            } else {
                Exp1.sample(rng)
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.random_range(0..k)] = 1.0;
    }
    normalize(w)
}

/// Dirichlet-like draw concentrated around `center` (larger `concentration`
/// means tighter). Classes with zero center mass stay at zero.
pub fn perturbed<R: Rng + ?Sized>(
    rng: &mut R,
    center: &CategoricalDistribution,
    concentration: f64,
) -> CategoricalDistribution {
    let w: Vec<f64> = center
        .probs()
        .iter()
        .map(|&c| {
            if c == 0.0 {
                0.0
            } else {
                gamma(rng, concentration * c)
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        return center.clone();
    }
    normalize(w)
}

fn gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    rand_distr::Gamma::new(shape.max(1e-3), 1.0)
        .expect("positive shape")
        .sample(rng)
}

fn normalize(w: Vec<f64>) -> CategoricalDistribution {
    let sum: f64 = w.iter().sum();
    CategoricalDistribution::from_trusted(w.into_iter().map(|x| x / sum).collect())
}

/// `m` members on `k` classes: either independent flat draws or a cluster
/// around a random center, chosen at random.
pub fn random_sample<R: Rng + ?Sized>(rng: &mut R, k: usize, m: usize) -> SecondOrderSample {
    let members = if rng.random_bool(0.5) {
        (0..m).map(|_| random_distribution(rng, k)).collect()
    } else {
        let center = random_distribution(rng, k);
        let concentration = 10f64.powf(rng.random_range(0.0..3.0));
        (0..m)
            .map(|_| perturbed(rng, &center, concentration))
            .collect()
    };
    SecondOrderSample::new(members).expect("members share k")
}
