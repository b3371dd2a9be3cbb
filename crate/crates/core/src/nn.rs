//! A small dense classifier for measuring what a quantized activation does
//! to accuracy: train with the exact function, then evaluate with the
//! bit-accurate table substituted in the hidden layer, without retraining.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcref::{ActivationKind, ActivationSpec};
use crate::tabulator::{build_table, parse_variant, QuantizedFunctionTable, SamplingConvention};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Split {
    Train,
    Test,
}

/// Rows of real features with integer labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dim: usize,
    classes: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
    splits: Vec<Split>,
}

impl Dataset {
    /// All rows are tagged `Train`.
    pub fn new(dim: usize, classes: usize, features: Vec<f64>, labels: Vec<usize>) -> Result<Self> {
        let splits = vec![Split::Train; labels.len()];
        Self::with_splits(dim, classes, features, labels, splits)
    }

    pub fn with_splits(
        dim: usize,
        classes: usize,
        features: Vec<f64>,
        labels: Vec<usize>,
        splits: Vec<Split>,
    ) -> Result<Self> {
        if dim == 0 || classes < 2 {
            return Err(Error::Dataset(format!("need dim >= 1 and at least 2 classes, got {dim} and {classes}")));
        }
        if features.len() != labels.len() * dim || splits.len() != labels.len() {
            return Err(Error::Dataset("feature, label and split counts disagree".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::Dataset(format!("label {bad} out of range for {classes} classes")));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Dataset("non-finite feature".into()));
        }
        Ok(Dataset {
            dim,
            classes,
            features,
            labels,
            splits,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
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

    pub fn split(&self, i: usize) -> Split {
        self.splits[i]
    }

    /// The rows tagged `split`, in order.
    pub fn subset(&self, split: Split) -> Dataset {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.splits[i] == split).collect();
        Dataset {
            dim: self.dim,
            classes: self.classes,
            features: keep.iter().flat_map(|&i| self.row(i).iter().copied()).collect(),
            labels: keep.iter().map(|&i| self.labels[i]).collect(),
            splits: vec![split; keep.len()],
        }
    }

    /// One dataset holding `train` rows tagged `Train` and `test` rows tagged
    /// `Test`.
    pub fn join(train: &Dataset, test: &Dataset) -> Result<Dataset> {
        if train.dim != test.dim {
            return Err(Error::Dataset(format!("feature counts differ: {} and {}", train.dim, test.dim)));
        }
        let classes = train.classes.max(test.classes);
        let features = [&train.features[..], &test.features].concat();
        let labels = [&train.labels[..], &test.labels].concat();
        let splits = std::iter::repeat_n(Split::Train, train.len())
            .chain(std::iter::repeat_n(Split::Test, test.len()))
            .collect();
        Dataset::with_splits(train.dim, classes, features, labels, splits)
    }

    /// CSV with header `f0,...,f{D-1},label`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (0..self.dim).map(|j| format!("f{j}")).collect();
        header.push("label".into());
        wr.write_record(&header)?;
        for i in 0..self.len() {
            let mut rec: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            rec.push(self.labels[i].to_string());
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads the CSV layout of [`Dataset::write_csv`]. Lines starting with
    /// `#` are skipped. The class count is `classes`, or one more than the
    /// largest label.
    pub fn read_csv<R: std::io::Read>(r: R, classes: Option<usize>) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let header = rd.headers()?.clone();
        let dim = header.len().saturating_sub(1);
        let expected: Vec<String> = (0..dim).map(|j| format!("f{j}")).chain(["label".to_string()]).collect();
        if header.iter().ne(expected.iter().map(String::as_str)) {
            return Err(Error::Dataset(format!("expected header f0,...,f{},label", dim.saturating_sub(1))));
        }
        let (mut features, mut labels) = (Vec::new(), Vec::new());
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            let bad = |what: &str| Error::Dataset(format!("row {}: bad {what}", i + 1));
            for j in 0..dim {
                features.push(rec[j].trim().parse::<f64>().map_err(|_| bad("feature"))?);
            }
            labels.push(rec[dim].trim().parse::<usize>().map_err(|_| bad("label"))?);
        }
        let classes = classes.unwrap_or_else(|| labels.iter().max().map_or(2, |&m| (m + 1).max(2)));
        Dataset::new(dim, classes, features, labels)
    }
}

/// Synthetic task parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub classes: usize,
    pub dim: usize,
    pub n: usize,
    /// Blobs per class; blobs sit on a circle and classes alternate around it,
    /// so no class is linearly separable from the rest once this exceeds 1.
    pub blobs_per_class: usize,
    pub radius: f64,
    pub spread: f64,
    pub test_fraction: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            classes: 3,
            dim: 2,
            n: 3000,
            blobs_per_class: 2,
            radius: 2.0,
            spread: 0.4,
            test_fraction: 0.25,
        }
    }
}

/// Gaussian blobs, deterministic per seed. Dimensions past the first two
/// carry pure noise.
pub fn generate_synthetic(seed: u64, config: &SyntheticConfig) -> Result<Dataset> {
    let c = config;
    if c.classes < 2 || c.dim < 2 || c.blobs_per_class == 0 || c.n == 0 {
        return Err(Error::Dataset("synthetic data needs 2+ classes, 2+ dims, 1+ blobs and 1+ rows".into()));
    }
    if !(0.0..1.0).contains(&c.test_fraction) || !(c.spread > 0.0) {
        return Err(Error::Dataset("test fraction must be in [0, 1) and spread positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, c.spread).expect("positive spread");
    let blobs = c.classes * c.blobs_per_class;
    let (mut features, mut labels) = (Vec::with_capacity(c.n * c.dim), Vec::with_capacity(c.n));
    for i in 0..c.n {
        let blob = i % blobs;
        let angle = std::f64::consts::TAU * blob as f64 / blobs as f64;
        let center = [c.radius * angle.cos(), c.radius * angle.sin()];
        for j in 0..c.dim {
            features.push(center.get(j).copied().unwrap_or(0.0) + noise.sample(&mut rng));
        }
        labels.push(blob % c.classes);
    }
    let n_test = (c.n as f64 * c.test_fraction).round() as usize;
    let mut order: Vec<usize> = (0..c.n).collect();
    order.shuffle(&mut rng);
    let mut splits = vec![Split::Train; c.n];
    for &i in &order[..n_test] {
        splits[i] = Split::Test;
    }
    Dataset::with_splits(c.dim, c.classes, features, labels, splits)
}

/// `D -> H -> C` with the given hidden activation and a softmax output.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpModel {
    dims: [usize; 3],
    activation: ActivationSpec,
    /// `H x D`, row-major.
    w1: Vec<f64>,
    b1: Vec<f64>,
    /// `C x H`, row-major.
    w2: Vec<f64>,
    b2: Vec<f64>,
}

impl PartialEq for ActivationSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind() == other.kind()
            && self.alpha() == other.alpha()
            && self.lambda() == other.lambda()
            && self.custom_function().is_none()
            && other.custom_function().is_none()
    }
}

/// Parameter gradient, laid out like [`MlpModel::parameters`].
pub type Gradient = Vec<f64>;

impl MlpModel {
    /// Glorot-uniform weights, zero biases.
    pub fn init(dims: [usize; 3], activation: ActivationSpec, seed: u64) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidParameter(format!("layer sizes must be positive, got {dims:?}")));
        }
        if activation.kind() == ActivationKind::Custom {
            return Err(Error::InvalidParameter("training needs a built-in activation".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layer = |fan_in: usize, fan_out: usize| -> Vec<f64> {
            let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
            (0..fan_in * fan_out).map(|_| rng.gen_range(-a..a)).collect()
        };
        let [d, h, c] = dims;
        let w1 = layer(d, h);
        let w2 = layer(h, c);
        Ok(MlpModel {
            dims,
            activation,
            w1,
            b1: vec![0.0; h],
            w2,
            b2: vec![0.0; c],
        })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn activation(&self) -> &ActivationSpec {
        &self.activation
    }

    /// `w1, b1, w2, b2` concatenated.
    pub fn parameters(&self) -> Vec<f64> {
        [&self.w1[..], &self.b1, &self.w2, &self.b2].concat()
    }

    pub fn set_parameters(&mut self, p: &[f64]) -> Result<()> {
        let sizes = [self.w1.len(), self.b1.len(), self.w2.len(), self.b2.len()];
        if p.len() != sizes.iter().sum::<usize>() {
            return Err(Error::InvalidParameter(format!("expected {} parameters, got {}", sizes.iter().sum::<usize>(), p.len())));
        }
        let mut rest = p;
        for (dst, n) in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2].into_iter().zip(sizes) {
            dst.copy_from_slice(&rest[..n]);
            rest = &rest[n..];
        }
        Ok(())
    }

    fn hidden_pre(&self, x: &[f64]) -> Vec<f64> {
        let [d, h, _] = self.dims;
        (0..h)
            .map(|k| self.b1[k] + (0..d).map(|j| self.w1[k * d + j] * x[j]).sum::<f64>())
            .collect()
    }

    fn logits(&self, hidden: &[f64]) -> Vec<f64> {
        let [_, h, c] = self.dims;
        (0..c)
            .map(|o| self.b2[o] + (0..h).map(|k| self.w2[o * h + k] * hidden[k]).sum::<f64>())
            .collect()
    }

    /// Hidden activations of one example under `act`.
    pub fn hidden_with(&self, x: &[f64], act: &dyn Fn(f64) -> f64) -> Vec<f64> {
        self.hidden_pre(x).into_iter().map(act).collect()
    }

    /// Predicted class under `act` in the hidden layer.
    pub fn predict_with(&self, x: &[f64], act: &dyn Fn(f64) -> f64) -> usize {
        let z = self.logits(&self.hidden_with(x, act));
        argmax(&z)
    }

    /// Percentage of correctly classified rows under `act`.
    pub fn accuracy_with(&self, data: &Dataset, act: &dyn Fn(f64) -> f64) -> Result<f64> {
        self.check_data(data)?;
        if data.is_empty() {
            return Err(Error::Dataset("accuracy of an empty dataset".into()));
        }
        let correct = (0..data.len()).filter(|&i| self.predict_with(data.row(i), act) == data.label(i)).count();
        Ok(100.0 * correct as f64 / data.len() as f64)
    }

    /// Accuracy with the exact activation.
    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        let f = &self.activation;
        self.accuracy_with(data, &|v| f.eval(v))
    }

    fn check_data(&self, data: &Dataset) -> Result<()> {
        if data.dim() != self.dims[0] || data.classes() != self.dims[2] {
            return Err(Error::Dataset(format!(
                "model is {}->{}->{}, data has {} features and {} classes",
                self.dims[0],
                self.dims[1],
                self.dims[2],
                data.dim(),
                data.classes()
            )));
        }
        Ok(())
    }

    /// Mean softmax cross-entropy over `rows` and its gradient.
    pub fn loss_and_gradient(&self, data: &Dataset, rows: &[usize]) -> (f64, Gradient) {
        let [d, h, c] = self.dims;
        let mut grad = vec![0.0; self.w1.len() + h + self.w2.len() + c];
        let (gw1, rest) = grad.split_at_mut(h * d);
        let (gb1, rest) = rest.split_at_mut(h);
        let (gw2, gb2) = rest.split_at_mut(c * h);
        let mut loss = 0.0;
        for &i in rows {
            let x = data.row(i);
            let pre = self.hidden_pre(x);
            let hid: Vec<f64> = pre.iter().map(|&v| self.activation.eval(v)).collect();
            let z = self.logits(&hid);
            let p = softmax(&z);
            let y = data.label(i);
            loss -= p[y].max(f64::MIN_POSITIVE).ln();
            let dz: Vec<f64> = (0..c).map(|o| p[o] - if o == y { 1.0 } else { 0.0 }).collect();
            for o in 0..c {
                gb2[o] += dz[o];
                for k in 0..h {
                    gw2[o * h + k] += dz[o] * hid[k];
                }
            }
            for k in 0..h {
                let dh: f64 = (0..c).map(|o| self.w2[o * h + k] * dz[o]).sum();
                let dpre = dh * self.activation.derivative(pre[k]);
                gb1[k] += dpre;
                for j in 0..d {
                    gw1[k * d + j] += dpre * x[j];
                }
            }
        }
        let scale = 1.0 / rows.len().max(1) as f64;
        grad.iter_mut().for_each(|g| *g *= scale);
        (loss * scale, grad)
    }
}

fn argmax(z: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in z.iter().enumerate() {
        if v > z[best] {
            best = i;
        }
    }
    best
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|&v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden: 16,
            epochs: 60,
            learning_rate: 0.1,
            batch_size: 32,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: MlpModel,
    /// Mean training loss per epoch.
    pub losses: Vec<f64>,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

/// Minibatch SGD on the `Train` rows; accuracy is also reported on the `Test`
/// rows (or on the training rows when there are none).
pub fn train(data: &Dataset, activation: ActivationSpec, config: &TrainConfig) -> Result<TrainOutcome> {
    if config.batch_size == 0 || !(config.learning_rate > 0.0) {
        return Err(Error::InvalidParameter("batch size and learning rate must be positive".into()));
    }
    let train_set = data.subset(Split::Train);
    let test_set = data.subset(Split::Test);
    if train_set.is_empty() {
        return Err(Error::Dataset("no training rows".into()));
    }
    let mut model = MlpModel::init([data.dim(), config.hidden, data.classes()], activation, config.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(config.batch_size) {
            let (loss, grad) = model.loss_and_gradient(&train_set, batch);
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::Diverged { epoch, loss });
            }
            total += loss * batch.len() as f64;
            let mut p = model.parameters();
            for (w, g) in p.iter_mut().zip(&grad) {
                *w -= config.learning_rate * g;
            }
            model.set_parameters(&p)?;
        }
        losses.push(total / train_set.len() as f64);
    }
    let train_accuracy = model.accuracy(&train_set)?;
    let test_accuracy = if test_set.is_empty() {
        train_accuracy
    } else {
        model.accuracy(&test_set)?
    };
    Ok(TrainOutcome {
        model,
        losses,
        train_accuracy,
        test_accuracy,
    })
}

/// Accuracy with every hidden activation replaced by the table's
/// bit-accurate wrapped output. Weights stay at full precision.
pub fn infer_quantized(model: &MlpModel, data: &Dataset, table: &QuantizedFunctionTable) -> Result<f64> {
    let (m, t) = (model.activation(), table.activation());
    if m != t {
        return Err(Error::KindMismatch {
            model: m.name().to_string(),
            table: t.name().to_string(),
        });
    }
    model.accuracy_with(data, &|v| table.reference_eval(v))
}

/// Largest relative difference between the analytic gradient and central
/// differences, over `coords` parameter indices.
pub fn gradient_check(model: &MlpModel, data: &Dataset, rows: &[usize], coords: &[usize], h: f64) -> Result<f64> {
    let (_, grad) = model.loss_and_gradient(data, rows);
    let base = model.parameters();
    let mut probe = model.clone();
    let mut worst = 0.0f64;
    for &i in coords {
        if i >= base.len() {
            return Err(Error::InvalidParameter(format!("parameter index {i} out of range")));
        }
        let mut p = base.clone();
        p[i] = base[i] + h;
        probe.set_parameters(&p)?;
        let up = probe.loss_and_gradient(data, rows).0;
        p[i] = base[i] - h;
        probe.set_parameters(&p)?;
        let down = probe.loss_and_gradient(data, rows).0;
        let numeric = (up - down) / (2.0 * h);
        let denom = grad[i].abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((grad[i] - numeric).abs() / denom);
    }
    Ok(worst)
}

/// One row of the bit-width sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variant: String,
    pub accuracy_percent: f64,
    /// Accuracy minus the float baseline, in points.
    pub delta_points: f64,
}

/// The float baseline followed by one row per variant name (`tanh_7_4`,
/// output bits then input bits), each built with `convention`.
pub fn sweep_report(
    model: &MlpModel,
    data: &Dataset,
    variants: &[&str],
    convention: SamplingConvention,
) -> Result<Vec<SweepRow>> {
    let baseline = model.accuracy(data)?;
    let mut rows = vec![SweepRow {
        variant: "float".into(),
        accuracy_percent: baseline,
        delta_points: 0.0,
    }];
    for &v in variants {
        let (f, in_fmt, out_fmt) = parse_variant(v)?;
        let table = build_table(&f, in_fmt, out_fmt, convention)?;
        let acc = infer_quantized(model, data, &table)?;
        rows.push(SweepRow {
            variant: table.variant_name(),
            accuracy_percent: acc,
            delta_points: acc - baseline,
        });
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: std::io::Read>(r: R) -> Result<Vec<SweepRow>> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    Ok(rd.deserialize().collect::<std::result::Result<_, _>>()?)
}

const CHECKPOINT_FORMAT: &str = "afc-mlp";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    version: u32,
    activation: String,
    alpha: f64,
    lambda: f64,
    dims: [usize; 3],
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

impl MlpModel {
    /// JSON checkpoint: format tag, version, activation with its parameters,
    /// layer sizes, then row-major weights and biases.
    pub fn write_checkpoint<W: Write>(&self, w: W) -> Result<()> {
        let c = Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            activation: self.activation.name().into(),
            alpha: self.activation.alpha(),
            lambda: self.activation.lambda(),
            dims: self.dims,
            w1: self.w1.clone(),
            b1: self.b1.clone(),
            w2: self.w2.clone(),
            b2: self.b2.clone(),
        };
        serde_json::to_writer_pretty(w, &c)?;
        Ok(())
    }

    pub fn read_checkpoint<R: BufRead>(r: R) -> Result<Self> {
        let c: Checkpoint = serde_json::from_reader(r)?;
        if c.format != CHECKPOINT_FORMAT || c.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported checkpoint {} v{}", c.format, c.version)));
        }
        let [d, h, k] = c.dims;
        if c.w1.len() != h * d || c.b1.len() != h || c.w2.len() != k * h || c.b2.len() != k {
            return Err(Error::Checkpoint(format!("parameter counts do not match dims {:?}", c.dims)));
        }
        if [&c.w1, &c.b1, &c.w2, &c.b2].iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::Checkpoint("non-finite parameter".into()));
        }
        let kind: ActivationKind = c.activation.parse()?;
        let activation = ActivationSpec::new(kind)
            .with_alpha(c.alpha)?
            .with_lambda(c.lambda)?;
        Ok(MlpModel {
            dims: c.dims,
            activation,
            w1: c.w1,
            b1: c.b1,
            w2: c.w2,
            b2: c.b2,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabulator::build_table;

    fn data(seed: u64) -> Dataset {
        generate_synthetic(seed, &SyntheticConfig::default()).unwrap()
    }

    fn quick() -> TrainConfig {
        TrainConfig {
            epochs: 20,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn synthetic_shape_and_determinism() {
        let a = data(7);
        assert_eq!(a.len(), 3000);
        assert!(a.labels().iter().all(|&l| l < 3));
        assert_eq!(a, data(7));
        assert_ne!(a, data(8));
        assert_eq!(a.subset(Split::Test).len(), 750);
        assert_eq!(a.subset(Split::Train).len() + a.subset(Split::Test).len(), 3000);
    }

    #[test]
    fn csv_round_trip() {
        let d = data(1).subset(Split::Test);
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("f0,f1,label\n"));
        let back = Dataset::read_csv(text.as_bytes(), Some(3)).unwrap();
        assert_eq!(back.labels(), d.labels());
        for i in 0..d.len() {
            assert_eq!(back.row(i), d.row(i));
        }
        let full = data(1);
        let joined = Dataset::join(&full.subset(Split::Train), &d).unwrap();
        assert_eq!(joined.len(), 3000);
        assert_eq!(joined.subset(Split::Test), d);
        assert!(Dataset::read_csv("a,b\n1,2\n".as_bytes(), None).is_err());
        assert!(Dataset::read_csv("f0,label\nx,1\n".as_bytes(), None).is_err());
    }

    #[test]
    fn zero_epochs_is_the_initial_model() {
        let d = data(3);
        let cfg = TrainConfig { epochs: 0, ..TrainConfig::default() };
        let out = train(&d, ActivationSpec::tanh(), &cfg).unwrap();
        let init = MlpModel::init([2, 16, 3], ActivationSpec::tanh(), cfg.seed).unwrap();
        assert_eq!(out.model, init);
        assert!(out.losses.is_empty());
    }

    #[test]
    fn training_is_deterministic_and_learns() {
        let d = data(42);
        let a = train(&d, ActivationSpec::tanh(), &quick()).unwrap();
        let b = train(&d, ActivationSpec::tanh(), &quick()).unwrap();
        assert_eq!(a.model.parameters(), b.model.parameters());
        assert!(a.losses.last().unwrap() < &a.losses[0]);
        assert!(a.test_accuracy > 80.0, "{}", a.test_accuracy);
    }

    #[test]
    fn divergence_is_reported() {
        let d = data(42);
        let cfg = TrainConfig {
            learning_rate: 1e300,
            ..quick()
        };
        assert!(matches!(train(&d, ActivationSpec::selu(), &cfg), Err(Error::Diverged { .. })));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let d = data(5);
        let rows: Vec<usize> = (0..64).collect();
        for f in [ActivationSpec::tanh(), ActivationSpec::selu()] {
            let m = MlpModel::init([2, 16, 3], f, 9).unwrap();
            let n = m.parameters().len();
            let coords: Vec<usize> = (0..10).map(|i| (i * 37 + 3) % n).collect();
            let err = gradient_check(&m, &d, &rows, &coords, 1e-6).unwrap();
            assert!(err < 1e-4, "{err}");
        }
    }

    #[test]
    fn quantized_hidden_values_lie_on_the_grid() {
        let d = data(42);
        let m = train(&d, ActivationSpec::tanh(), &quick()).unwrap().model;
        let t = build_table(&ActivationSpec::tanh(), "U1.3".parse().unwrap(), "U1.6".parse().unwrap(), SamplingConvention::default()).unwrap();
        for i in 0..50 {
            for v in m.hidden_with(d.row(i), &|x| t.reference_eval(x)) {
                let code = v * 64.0;
                assert_eq!(code, code.round());
                assert!(code.abs() <= 64.0);
            }
        }
    }

    #[test]
    fn fine_table_tracks_float_and_coarse_collapses() {
        let d = data(42);
        let test = d.subset(Split::Test);
        let m = train(&d, ActivationSpec::tanh(), &quick()).unwrap().model;
        let float = m.accuracy(&test).unwrap();
        let fine = build_table(&ActivationSpec::tanh(), "U1.11".parse().unwrap(), "U1.11".parse().unwrap(), SamplingConvention::default()).unwrap();
        assert!((infer_quantized(&m, &test, &fine).unwrap() - float).abs() <= 0.5);
        let coarse = build_table(&ActivationSpec::tanh(), "U1.0".parse().unwrap(), "U1.0".parse().unwrap(), SamplingConvention::default()).unwrap();
        let c = infer_quantized(&m, &test, &coarse).unwrap(); assert!(c < float - 10.0, "{c} {float}");

        let selu = build_table(&ActivationSpec::selu(), "U2.3".parse().unwrap(), "U1.7".parse().unwrap(), SamplingConvention::default()).unwrap();
        assert!(matches!(infer_quantized(&m, &test, &selu), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn sweep_csv_round_trip() {
        let d = data(42);
        let test = d.subset(Split::Test);
        let m = train(&d, ActivationSpec::tanh(), &quick()).unwrap().model;
        let rows = sweep_report(&m, &test, &["tanh_5_4", "tanh_7_6"], SamplingConvention::default()).unwrap();
        assert_eq!(rows[0].delta_points, 0.0);
        assert_eq!(rows[2].variant, "tanh_7_6");
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        assert_eq!(read_sweep_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn checkpoint_round_trip() {
        let m = MlpModel::init([2, 4, 3], ActivationSpec::selu(), 1).unwrap();
        let mut buf = Vec::new();
        m.write_checkpoint(&mut buf).unwrap();
        assert_eq!(MlpModel::read_checkpoint(&buf[..]).unwrap(), m);
        let text = String::from_utf8(buf).unwrap().replace("\"version\": 1", "\"version\": 9");
        assert!(matches!(MlpModel::read_checkpoint(text.as_bytes()), Err(Error::Checkpoint(_))));
    }
}
