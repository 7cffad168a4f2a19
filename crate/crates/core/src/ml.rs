//! k-means clustering, nearest-centroid classification, confusion matrices
//! and the formant-based phoneme recognition experiment.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{DspError, Result};
use crate::filter::{filter_samples, TransferFunction};
use crate::lpc::{bandwidth_to_radius, fit_frame, formants_from_lpc, frame_signal, FrameSpec};
use crate::rng::{derive_seed, seeded};
use crate::signal::Signal;
use crate::spectral::WindowKind;

pub const DEFAULT_MAX_ITER: usize = 300;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const TRAIN_FRACTION: f64 = 0.7;

/// Row-major `n_points × dim` matrix with optional integer labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub n_points: usize,
    pub dim: usize,
    pub data: Vec<f64>,
    pub column_names: Vec<String>,
    #[serde(default)]
    pub labels: Option<Vec<usize>>,
    #[serde(default)]
    pub class_names: Vec<String>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            let bad = rows.iter().find(|r| r.len() != dim).map_or(0, Vec::len);
            return Err(DspError::DimensionMismatch { expected: dim, actual: bad });
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(DspError::InvalidSpec("feature values must be finite".into()));
        }
        Ok(FeatureMatrix {
            n_points: rows.len(),
            dim,
            data: rows.concat(),
            column_names: (1..=dim).map(|i| format!("x{i}")).collect(),
            labels: None,
            class_names: Vec::new(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_points {
            return Err(DspError::LengthMismatch { expected: self.n_points, actual: labels.len() });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(DspError::LabelOutOfRange { label: bad, n_classes: class_names.len() });
        }
        self.labels = Some(labels);
        self.class_names = class_names;
        Ok(self)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_points).map(move |i| self.row(i))
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    fn subset(&self, idx: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            n_points: idx.len(),
            dim: self.dim,
            data: idx.iter().flat_map(|&i| self.row(i).iter().copied()).collect(),
            column_names: self.column_names.clone(),
            labels: self.labels.as_ref().map(|l| idx.iter().map(|&i| l[i]).collect()),
            class_names: self.class_names.clone(),
        }
    }
}

/// Parses `label,f1,f2[,f3]` with a header line. Integer labels are used as
/// class ids directly; otherwise distinct names are numbered in sorted order.
pub fn parse_features_csv(text: &str) -> Result<FeatureMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or(DspError::EmptyData)?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    if header.len() < 2 || header[0] != "label" {
        return Err(DspError::UnsupportedFormat("features CSV must start with a 'label' column".into()));
    }
    let mut names = Vec::new();
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(DspError::DimensionMismatch { expected: header.len(), actual: cells.len() });
        }
        let row = cells[1..]
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| DspError::UnsupportedFormat(format!("line {}: bad number {c:?}", ln + 2)))
            })
            .collect::<Result<Vec<_>>>()?;
        names.push(cells[0].to_string());
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DspError::EmptyData);
    }
    let numeric: Option<Vec<usize>> = names.iter().map(|n| n.parse::<usize>().ok()).collect();
    let (labels, class_names) = match numeric {
        Some(ids) => {
            let n = ids.iter().max().map_or(0, |m| m + 1);
            (ids, (0..n).map(|i| i.to_string()).collect())
        }
        None => {
            let distinct: Vec<String> = names.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
            let ids = names.iter().map(|n| distinct.iter().position(|d| d == n).unwrap_or(0)).collect();
            (ids, distinct)
        }
    };
    let mut m = FeatureMatrix::from_rows(&rows)?.with_labels(labels, class_names)?;
    m.column_names = header[1..].to_vec();
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansModel {
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    pub iterations: usize,
    pub assignments: Vec<usize>,
    /// Inertia after every assignment step, initial seeding included.
    pub inertia_history: Vec<f64>,
}

impl KMeansModel {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn assign(data: &FeatureMatrix, centroids: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let mut inertia = 0.0;
    let labels = data
        .rows()
        .map(|p| {
            let (j, d) = nearest(p, centroids);
            inertia += d;
            j
        })
        .collect();
    (labels, inertia)
}

fn kmeans_pp(data: &FeatureMatrix, k: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let n = data.n_points;
    let mut centroids = vec![data.row(rng.random_range(0..n)).to_vec()];
    let mut d2: Vec<f64> = data.rows().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, d) in d2.iter().enumerate() {
                acc += d;
                if acc > target && *d > 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = data.row(pick).to_vec();
        for (i, p) in data.rows().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Lloyd iterations from k-means++ seeding. Stops when no centroid moves by
/// `tol` or more (Euclidean), or after `max_iter` updates.
pub fn kmeans(data: &FeatureMatrix, k: usize, seed: u64, max_iter: usize, tol: f64) -> Result<KMeansModel> {
    if data.n_points == 0 || data.dim == 0 {
        return Err(DspError::EmptyData);
    }
    if k == 0 || k > data.n_points {
        return Err(DspError::InvalidK { k, n_points: data.n_points });
    }
    let mut rng = seeded(seed);
    let mut centroids = kmeans_pp(data, k, &mut rng);
    let (mut labels, mut inertia) = assign(data, &centroids);
    let mut history = vec![inertia];
    let mut iterations = 0;
    for it in 1..=max_iter {
        let mut sums = vec![vec![0.0; data.dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &j) in data.rows().zip(&labels) {
            counts[j] += 1;
            for (s, v) in sums[j].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut next: Vec<Vec<f64>> = sums
            .into_iter()
            .zip(&counts)
            .zip(&centroids)
            .map(|((s, &c), old)| if c > 0 { s.iter().map(|v| v / c as f64).collect() } else { old.clone() })
            .collect();
        let mut owner = labels.clone();
        for j in 0..k {
            if counts[j] > 0 {
                continue;
            }
            // seize the point farthest from its centroid, from a cluster that can spare one
            let victim = (0..data.n_points)
                .filter(|&i| counts[owner[i]] > 1)
                .map(|i| (i, sq_dist(data.row(i), &next[owner[i]])))
                .fold(None, |best: Option<(usize, f64)>, cur| match best {
                    Some(b) if b.1 >= cur.1 => Some(b),
                    _ => Some(cur),
                });
            if let Some((i, _)) = victim {
                counts[owner[i]] -= 1;
                owner[i] = j;
                counts[j] = 1;
                next[j] = data.row(i).to_vec();
            }
        }
        let movement = centroids.iter().zip(&next).map(|(a, b)| sq_dist(a, b).sqrt()).fold(0.0, f64::max);
        centroids = next;
        (labels, inertia) = assign(data, &centroids);
        history.push(inertia);
        iterations = it;
        if movement < tol {
            break;
        }
    }
    Ok(KMeansModel { centroids, inertia, iterations, assignments: labels, inertia_history: history })
}

/// Nearest centroid per point; ties go to the lower index.
pub fn nearest_centroid_classify(model: &KMeansModel, points: &FeatureMatrix) -> Result<Vec<usize>> {
    let d = model.centroids.first().map_or(0, Vec::len);
    if points.dim != d {
        return Err(DspError::DimensionMismatch { expected: d, actual: points.dim });
    }
    Ok(points.rows().map(|p| nearest(p, &model.centroids).0).collect())
}

/// Majority true label per cluster; empty clusters map to 0, ties to the
/// lower class id.
pub fn map_clusters_to_labels(assignments: &[usize], true_labels: &[usize], k: usize) -> Result<Vec<usize>> {
    if assignments.len() != true_labels.len() {
        return Err(DspError::LengthMismatch { expected: assignments.len(), actual: true_labels.len() });
    }
    let n_classes = true_labels.iter().max().map_or(1, |m| m + 1);
    let mut votes = vec![vec![0usize; n_classes]; k];
    for (&c, &t) in assignments.iter().zip(true_labels) {
        if c >= k {
            return Err(DspError::LabelOutOfRange { label: c, n_classes: k });
        }
        votes[c][t] += 1;
    }
    Ok(votes
        .iter()
        .map(|v| {
            let mut best = 0;
            for (class, &count) in v.iter().enumerate() {
                if count > v[best] {
                    best = class;
                }
            }
            best
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// `counts[true][predicted]`.
    pub counts: Vec<Vec<u64>>,
    pub class_names: Vec<String>,
    pub total: u64,
    pub correct: u64,
    pub accuracy: f64,
    pub no_samples: bool,
}

impl ConfusionMatrix {
    pub fn to_csv(&self) -> String {
        let mut out = self.class_names.join(",");
        out.push('\n');
        for row in &self.counts {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        let _ = writeln!(out, "accuracy,{}", self.accuracy);
        out
    }

    pub fn trace(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }
}

pub fn confusion_matrix(true_labels: &[usize], predicted: &[usize], n_classes: usize) -> Result<ConfusionMatrix> {
    confusion_matrix_named(true_labels, predicted, &(0..n_classes).map(|i| i.to_string()).collect::<Vec<_>>())
}

pub fn confusion_matrix_named(true_labels: &[usize], predicted: &[usize], class_names: &[String]) -> Result<ConfusionMatrix> {
    let n_classes = class_names.len();
    if true_labels.len() != predicted.len() {
        return Err(DspError::LengthMismatch { expected: true_labels.len(), actual: predicted.len() });
    }
    let mut counts = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in true_labels.iter().zip(predicted) {
        for l in [t, p] {
            if l >= n_classes {
                return Err(DspError::LabelOutOfRange { label: l, n_classes });
            }
        }
        counts[t][p] += 1;
    }
    let total = true_labels.len() as u64;
    let correct = (0..n_classes).map(|i| counts[i][i]).sum();
    Ok(ConfusionMatrix {
        counts,
        class_names: class_names.to_vec(),
        total,
        correct,
        accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        no_samples: total == 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub confusion: ConfusionMatrix,
    pub model: KMeansModel,
    pub cluster_labels: Vec<usize>,
    pub n_train: usize,
    pub n_test: usize,
}

/// Seeded 70/30 split, k-means on the training rows, majority mapping of
/// clusters to classes, confusion matrix on the test rows.
pub fn classify_features(features: &FeatureMatrix, k: usize, seed: u64) -> Result<ExperimentResult> {
    let labels = features
        .labels
        .as_ref()
        .ok_or_else(|| DspError::InvalidSpec("features need labels".into()))?;
    let n = features.n_points;
    if n == 0 {
        return Err(DspError::EmptyData);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded(derive_seed(seed, "split")));
    let n_train = ((n as f64 * TRAIN_FRACTION).round() as usize).clamp(k.min(n), n);
    let train = features.subset(&order[..n_train]);
    let test = features.subset(&order[n_train..]);
    let model = kmeans(&train, k, derive_seed(seed, "kmeans"), DEFAULT_MAX_ITER, DEFAULT_TOL)?;
    let train_labels = train.labels.as_deref().unwrap_or(&[]);
    let cluster_labels = map_clusters_to_labels(&model.assignments, train_labels, k)?;
    let predicted: Vec<usize> =
        nearest_centroid_classify(&model, &test)?.into_iter().map(|c| cluster_labels[c]).collect();
    let test_labels = test.labels.as_deref().unwrap_or(&[]);
    let mut names = features.class_names.clone();
    let needed = labels.iter().chain(&cluster_labels).max().map_or(0, |m| m + 1);
    while names.len() < needed {
        names.push(names.len().to_string());
    }
    let confusion = confusion_matrix_named(test_labels, &predicted, &names)?;
    Ok(ExperimentResult { confusion, model, cluster_labels, n_train, n_test: n - n_train })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhonemeConfig {
    pub k: usize,
    pub seed: u64,
    #[serde(default)]
    pub noise_snr_db: Option<f64>,
    pub order: usize,
    pub frame: FrameSpec,
    #[serde(default)]
    pub use_f3: bool,
}

impl PhonemeConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        PhonemeConfig {
            k,
            seed,
            noise_snr_db: None,
            order: 10,
            frame: FrameSpec::new(256, 256, WindowKind::Hamming),
            use_f3: false,
        }
    }
}

/// Adds white Gaussian noise scaled to the requested SNR over the whole signal.
pub fn add_noise(x: &Signal, snr_db: f64, seed: u64) -> Result<Signal> {
    if !snr_db.is_finite() {
        return Err(DspError::InvalidSpec("SNR must be finite".into()));
    }
    let power = x.energy() / x.len().max(1) as f64;
    let sigma = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    let mut rng = seeded(seed);
    let samples = x.samples.iter().map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal)).collect();
    Signal::new(samples, x.sample_rate_hz)
}

/// Formant feature rows for labeled utterances; frames yielding too few
/// formants are dropped.
pub fn formant_features(utterances: &[(Signal, usize)], class_names: &[String], cfg: &PhonemeConfig) -> Result<FeatureMatrix> {
    let want = if cfg.use_f3 { 3 } else { 2 };
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, (sig, label)) in utterances.iter().enumerate() {
        let sig = match cfg.noise_snr_db {
            Some(snr) => add_noise(sig, snr, derive_seed(cfg.seed, &format!("noise/{i}")))?,
            None => sig.clone(),
        };
        for frame in frame_signal(&sig, &cfg.frame)? {
            let model = fit_frame(&frame, cfg.order)?;
            let formants = match formants_from_lpc(&model, sig.sample_rate_hz) {
                Ok(f) => f,
                Err(DspError::NoConvergence { .. }) => continue,
                Err(e) => return Err(e),
            };
            if formants.len() >= want {
                rows.push(formants[..want].iter().map(|f| f.frequency_hz).collect::<Vec<_>>());
                labels.push(*label);
            }
        }
    }
    let mut m = if rows.is_empty() {
        FeatureMatrix { n_points: 0, dim: want, data: Vec::new(), column_names: Vec::new(), labels: None, class_names: Vec::new() }
    } else {
        FeatureMatrix::from_rows(&rows)?
    };
    m.column_names = ["f1", "f2", "f3"][..want].iter().map(|s| s.to_string()).collect();
    m.with_labels(labels, class_names.to_vec())
}

/// Formant extraction (optionally after adding noise) followed by
/// [`classify_features`].
pub fn phoneme_experiment(utterances: &[(Signal, usize)], class_names: &[String], cfg: &PhonemeConfig) -> Result<ExperimentResult> {
    let features = formant_features(utterances, class_names, cfg)?;
    classify_features(&features, cfg.k, cfg.seed)
}

/// Two-resonance all-pole filter with the given (frequency, bandwidth) pairs.
pub fn resonator(formants: &[(f64, f64)], fs: f64) -> Result<TransferFunction> {
    let mut a = vec![1.0];
    for &(f, b) in formants {
        let r = bandwidth_to_radius(b, fs);
        let theta = 2.0 * std::f64::consts::PI * f / fs;
        let section = [1.0, -2.0 * r * theta.cos(), r * r];
        let mut next = vec![0.0; a.len() + 2];
        for (i, ai) in a.iter().enumerate() {
            for (j, sj) in section.iter().enumerate() {
                next[i + j] += ai * sj;
            }
        }
        a = next;
    }
    TransferFunction::new(vec![1.0], a)
}

pub const SYNTHETIC_BANDWIDTH_HZ: f64 = 80.0;

/// Two synthetic vowels: AR(4) resonators at (700, 1200) Hz and
/// (300, 2300) Hz driven by seeded white noise.
pub fn synthetic_vowel_corpus(per_class: usize, length: usize, fs: f64, seed: u64) -> Result<(Vec<(Signal, usize)>, Vec<String>)> {
    let classes = [[(700.0, SYNTHETIC_BANDWIDTH_HZ), (1200.0, SYNTHETIC_BANDWIDTH_HZ)], [
        (300.0, SYNTHETIC_BANDWIDTH_HZ),
        (2300.0, SYNTHETIC_BANDWIDTH_HZ),
    ]];
    let mut out = Vec::new();
    for i in 0..per_class {
        for (label, formants) in classes.iter().enumerate() {
            let tf = resonator(formants, fs)?;
            let mut rng = seeded(derive_seed(seed, &format!("vowel/{label}/{i}")));
            let drive: Vec<f64> = (0..length).map(|_| rng.sample(StandardNormal)).collect();
            out.push((Signal::new(filter_samples(&tf, &drive), fs)?, label));
        }
    }
    Ok((out, vec!["aa".to_string(), "iy".to_string()]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(rows: &[&[f64]]) -> FeatureMatrix {
        FeatureMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn k_one_gives_mean() {
        let d = fm(&[&[1.0, 2.0], &[3.0, 6.0], &[5.0, 1.0]]);
        let m = kmeans(&d, 1, 7, 300, 1e-6).unwrap();
        assert!((m.centroids[0][0] - 3.0).abs() < 1e-12);
        assert!((m.centroids[0][1] - 3.0).abs() < 1e-12);
        assert_eq!(m.assignments, vec![0, 0, 0]);
    }

    #[test]
    fn two_points_two_clusters() {
        let d = fm(&[&[0.0], &[10.0]]);
        let m = kmeans(&d, 2, 3, 300, 1e-6).unwrap();
        let mut c: Vec<f64> = m.centroids.iter().map(|c| c[0]).collect();
        c.sort_by(f64::total_cmp);
        assert_eq!(c, vec![0.0, 10.0]);
        assert_eq!(m.inertia, 0.0);
        assert_eq!(kmeans(&d, 3, 0, 10, 1e-6), Err(DspError::InvalidK { k: 3, n_points: 2 }));
        assert_eq!(kmeans(&d, 0, 0, 10, 1e-6), Err(DspError::InvalidK { k: 0, n_points: 2 }));
    }

    #[test]
    fn duplicate_points_repair_empty_clusters() {
        let d = fm(&[&[1.0], &[1.0], &[1.0], &[5.0]]);
        let m = kmeans(&d, 3, 11, 50, 1e-6).unwrap();
        assert_eq!(m.k(), 3);
        assert!(m.assignments.iter().all(|&a| a < 3));
    }

    #[test]
    fn classify_ties_and_consistency() {
        let model = KMeansModel {
            centroids: vec![vec![0.0], vec![2.0]],
            inertia: 0.0,
            iterations: 0,
            assignments: vec![],
            inertia_history: vec![],
        };
        assert_eq!(nearest_centroid_classify(&model, &fm(&[&[1.0], &[2.0], &[-3.0]])).unwrap(), vec![0, 1, 0]);
        assert!(nearest_centroid_classify(&model, &fm(&[&[1.0, 1.0]])).is_err());
    }

    #[test]
    fn cluster_mapping_rules() {
        assert_eq!(map_clusters_to_labels(&[0, 0, 0], &[1, 1, 2], 1).unwrap(), vec![1]);
        assert_eq!(map_clusters_to_labels(&[0, 0], &[2, 1], 1).unwrap(), vec![1]);
        assert_eq!(map_clusters_to_labels(&[0, 1], &[1, 0], 3).unwrap(), vec![1, 0, 0]);
        assert!(map_clusters_to_labels(&[0], &[0, 1], 2).is_err());
    }

    #[test]
    fn confusion_examples() {
        let perfect = confusion_matrix(&[0, 1, 2, 1], &[0, 1, 2, 1], 3).unwrap();
        assert_eq!(perfect.counts, vec![vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 1]]);
        assert_eq!(perfect.accuracy, 1.0);
        let zero_col = confusion_matrix(&[0, 1, 2], &[0, 0, 0], 3).unwrap();
        assert!(zero_col.counts.iter().all(|r| r[1] == 0 && r[2] == 0 && r[0] == 1));
        let empty = confusion_matrix(&[], &[], 2).unwrap();
        assert!(empty.no_samples);
        assert_eq!(empty.accuracy, 0.0);
        assert_eq!(confusion_matrix(&[0], &[3], 2).unwrap_err(), DspError::LabelOutOfRange { label: 3, n_classes: 2 });
        assert_eq!(perfect.to_csv(), "0,1,2\n1,0,0\n0,2,0\n0,0,1\naccuracy,1\n");
    }

    #[test]
    fn features_csv_round_trip() {
        let m = parse_features_csv("label,f1,f2\niy,300,2300\naa,700,1200\niy,310,2250\n").unwrap();
        assert_eq!(m.class_names, vec!["aa", "iy"]);
        assert_eq!(m.labels, Some(vec![1, 0, 1]));
        assert_eq!(m.row(1), &[700.0, 1200.0]);
        let numeric = parse_features_csv("label,f1,f2,f3\n2,1,2,3\n0,4,5,6\n").unwrap();
        assert_eq!(numeric.n_classes(), 3);
        assert_eq!(numeric.dim, 3);
        assert!(parse_features_csv("f1,f2\n1,2\n").is_err());
        assert!(parse_features_csv("label,f1\na,x\n").is_err());
        assert!(parse_features_csv("label,f1\n").is_err());
    }

    #[test]
    fn separated_points_give_diagonal() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..30 {
            let c = i % 3;
            rows.push(vec![100.0 * c as f64 + (i as f64) * 1e-3, 0.0]);
            labels.push(c);
        }
        let names = vec!["a".into(), "b".into(), "c".into()];
        let f = FeatureMatrix::from_rows(&rows).unwrap().with_labels(labels, names).unwrap();
        let r = classify_features(&f, 3, 5).unwrap();
        assert_eq!(r.confusion.accuracy, 1.0);
        for (t, row) in r.confusion.counts.iter().enumerate() {
            for (p, &c) in row.iter().enumerate() {
                if t != p {
                    assert_eq!(c, 0);
                }
            }
        }
        assert_eq!(r.n_train + r.n_test, 30);
        assert_eq!(r.n_train, 21);
    }
}
