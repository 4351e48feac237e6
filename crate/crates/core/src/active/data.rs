//! Tabular datasets and synthetic generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Result, UqError};

/// Dense row-major features with class labels in `0..n_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    features: Vec<f64>,
    dim: usize,
    labels: Vec<usize>,
    n_classes: usize,
}

impl TabularDataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(UqError::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::from_flat(rows.concat(), dim, labels, n_classes)
    }

    pub fn from_flat(
        features: Vec<f64>,
        dim: usize,
        labels: Vec<usize>,
        n_classes: usize,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(UqError::BadConfig(
                "feature dimension must be at least 1".into(),
            ));
        }
        if n_classes < 2 {
            return Err(UqError::TooFewClasses(n_classes));
        }
        if features.len() != labels.len() * dim {
            return Err(UqError::DimensionMismatch {
                expected: labels.len() * dim,
                found: features.len(),
            });
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(UqError::LabelOutOfRange {
                label,
                classes: n_classes,
            });
        }
        Ok(Self {
            features,
            dim,
            labels,
            n_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Rows `indices` (in the given order) as a new dataset.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(UqError::IndexOutOfRange {
                    index: i,
                    len: self.len(),
                });
            }
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Ok(Self {
            features,
            dim: self.dim,
            labels,
            n_classes: self.n_classes,
        })
    }
}

/// Isotropic Gaussian clusters, one per class.
#[derive(Debug, Clone, PartialEq)]
pub struct BlobConfig {
    pub n_classes: usize,
    pub n_per_class: usize,
    pub dim: usize,
    /// Noise standard deviation in units of the smallest inter-center distance.
    pub spread: f64,
    pub centers_seed: u64,
    pub noise_seed: u64,
}

/// Cluster centers drawn uniformly in `[-1, 1]^dim` and rescaled so the
/// closest pair is exactly one unit apart.
pub fn blob_centers(n_classes: usize, dim: usize, centers_seed: u64) -> Result<Vec<Vec<f64>>> {
    if n_classes < 2 {
        return Err(UqError::BadConfig(format!(
            "need at least 2 classes, got {n_classes}"
        )));
    }
    if dim == 0 {
        return Err(UqError::BadConfig(
            "feature dimension must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(centers_seed);
    let centers: Vec<Vec<f64>> = (0..n_classes)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let mut min_dist = f64::INFINITY;
    for a in 0..n_classes {
        for b in a + 1..n_classes {
            min_dist = min_dist.min(euclidean(&centers[a], &centers[b]));
        }
    }
    if min_dist.is_nan() || min_dist <= 0.0 {
        return Err(UqError::BadConfig("degenerate cluster centers".into()));
    }
    Ok(centers
        .into_iter()
        .map(|c| c.into_iter().map(|v| v / min_dist).collect())
        .collect())
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Samples `n_per_class` points around each center from [`blob_centers`].
/// Rows are interleaved by class: row `i` has label `i % n_classes`.
pub fn make_blobs(config: &BlobConfig) -> Result<TabularDataset> {
    if config.n_per_class == 0 {
        return Err(UqError::BadConfig("n_per_class must be at least 1".into()));
    }
    if !config.spread.is_finite() || config.spread < 0.0 {
        return Err(UqError::BadConfig(format!(
            "invalid spread {}",
            config.spread
        )));
    }
    let centers = blob_centers(config.n_classes, config.dim, config.centers_seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.noise_seed);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let n = config.n_classes * config.n_per_class;
    let mut features = Vec::with_capacity(n * config.dim);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..config.n_per_class {
        for (k, center) in centers.iter().enumerate() {
            features.extend(
                center
                    .iter()
                    .map(|c| c + config.spread * noise.sample(&mut rng)),
            );
            labels.push(k);
        }
    }
    TabularDataset::from_flat(features, config.dim, labels, config.n_classes)
}

/// Knobs of the epistemic-gap benchmark.
///
/// Two classes live in a "covered" region, separated along the first feature
/// (centers `(-1, 0)` and `(1, 0)`). A distant "gap" region sits on the
/// covered decision boundary at height `gap_distance`; there the class is
/// decided by the second feature instead (sub-clusters half a unit below and
/// above). A learner trained on covered data only cannot know this, and its
/// bootstrap replicates disagree about the gap.
#[derive(Debug, Clone, PartialEq)]
pub struct GapConfig {
    /// Size of the initial labeled set (covered region).
    pub n_labeled_region: usize,
    /// Gap-region points in the unlabeled pool.
    pub n_gap_region: usize,
    /// Covered-region points in the unlabeled pool.
    pub n_pool_covered: usize,
    /// Test points per region.
    pub n_test_per_region: usize,
    pub cluster_std: f64,
    pub gap_distance: f64,
    pub seed: u64,
}

impl GapConfig {
    pub fn new(n_labeled_region: usize, n_gap_region: usize, seed: u64) -> Self {
        Self {
            n_labeled_region,
            n_gap_region,
            n_pool_covered: 6 * n_gap_region,
            n_test_per_region: 100,
            cluster_std: 0.25,
            gap_distance: 8.0,
            seed,
        }
    }
}

/// Output of [`make_epistemic_gap`]: index sets into `data`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpistemicGap {
    pub data: TabularDataset,
    pub initial: Vec<usize>,
    pub pool: Vec<usize>,
    pub test: Vec<usize>,
    /// `true` for rows drawn from the gap region.
    pub in_gap: Vec<bool>,
}

pub fn make_epistemic_gap(
    n_labeled_region: usize,
    n_gap_region: usize,
    seed: u64,
) -> Result<EpistemicGap> {
    make_epistemic_gap_with(&GapConfig::new(n_labeled_region, n_gap_region, seed))
}

pub fn make_epistemic_gap_with(config: &GapConfig) -> Result<EpistemicGap> {
    if config.n_labeled_region == 0 || config.n_gap_region == 0 {
        return Err(UqError::BadConfig(
            "region counts must be at least 1".into(),
        ));
    }
    if config.n_test_per_region == 0 {
        return Err(UqError::BadConfig("test set must not be empty".into()));
    }
    if !config.cluster_std.is_finite()
        || config.cluster_std <= 0.0
        || config.gap_distance < 6.0 * config.cluster_std
    {
        return Err(UqError::BadConfig(
            "gap must lie at least 6 standard deviations from the covered region".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise = Normal::new(0.0, config.cluster_std).expect("positive std");
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut in_gap = Vec::new();

    let mut draw = |gap: bool, label: usize, rng: &mut ChaCha8Rng| {
        let (cx, cy) = if gap {
            (
                0.0,
                config.gap_distance + if label == 0 { -0.5 } else { 0.5 },
            )
        } else {
            (if label == 0 { -1.0 } else { 1.0 }, 0.0)
        };
        features.push(cx + noise.sample(rng));
        features.push(cy + noise.sample(rng));
        labels.push(label);
        in_gap.push(gap);
        labels.len() - 1
    };

    let initial: Vec<usize> = (0..config.n_labeled_region)
        .map(|i| draw(false, i % 2, &mut rng))
        .collect();
    let mut pool: Vec<usize> = (0..config.n_pool_covered)
        .map(|i| draw(false, i % 2, &mut rng))
        .collect();
    pool.extend((0..config.n_gap_region).map(|i| draw(true, i % 2, &mut rng)));
    let mut test: Vec<usize> = (0..config.n_test_per_region)
        .map(|i| draw(false, i % 2, &mut rng))
        .collect();
    test.extend((0..config.n_test_per_region).map(|i| draw(true, i % 2, &mut rng)));

    let data = TabularDataset::from_flat(features, 2, labels, 2)?;
    Ok(EpistemicGap {
        data,
        initial,
        pool,
        test,
        in_gap,
    })
}
