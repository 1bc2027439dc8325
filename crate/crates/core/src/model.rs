//! Per-predicate probabilistic linear classifiers.
//!
//! Each predicate gets an L2-regularized, class-weighted logistic regression
//! trained by seeded SGD. It covers the same hypothesis class as a linear SVM
//! but its outputs are probabilities, which the samplers need directly.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Label, SparseVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub l2_lambda: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            l2_lambda: 1e-4,
            epochs: 30,
            learning_rate: 0.1,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return Err(Error::invalid("l2Lambda", "must be finite and >= 0"));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epochs", "must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learningRate", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// `w_c = n / (2 n_c)` for each class; returns `(w_in, w_out)`.
pub fn balanced_class_weights(labels: &[Label]) -> Result<(f64, f64)> {
    let n = labels.len();
    let n_in = labels.iter().filter(|l| l.is_in()).count();
    let n_out = n - n_in;
    if n_in == 0 || n_out == 0 {
        return Err(Error::SingleClass);
    }
    Ok((n as f64 / (2.0 * n_in as f64), n as f64 / (2.0 * n_out as f64)))
}

#[derive(Debug, Clone)]
pub struct TrainingSet {
    examples: Vec<(SparseVector, Label)>,
    class_weights: (f64, f64),
}

impl TrainingSet {
    /// Uses balanced class weights.
    pub fn new(examples: Vec<(SparseVector, Label)>) -> Result<Self> {
        let labels: Vec<Label> = examples.iter().map(|(_, l)| *l).collect();
        let class_weights = balanced_class_weights(&labels)?;
        Ok(TrainingSet { examples, class_weights })
    }

    pub fn with_weights(examples: Vec<(SparseVector, Label)>, w_in: f64, w_out: f64) -> Result<Self> {
        if !(w_in > 0.0 && w_out > 0.0) {
            return Err(Error::Config("class weights must be positive".into()));
        }
        if !examples.iter().any(|(_, l)| l.is_in()) || !examples.iter().any(|(_, l)| !l.is_in()) {
            return Err(Error::SingleClass);
        }
        Ok(TrainingSet {
            examples,
            class_weights: (w_in, w_out),
        })
    }

    pub fn examples(&self) -> &[(SparseVector, Label)] {
        &self.examples
    }

    pub fn class_weights(&self) -> (f64, f64) {
        self.class_weights
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    fn weight(&self, label: Label) -> f64 {
        if label.is_in() {
            self.class_weights.0
        } else {
            self.class_weights.1
        }
    }

    fn min_dimension(&self) -> usize {
        self.examples.iter().map(|(x, _)| x.min_dimension()).max().unwrap_or(0)
    }
}

fn sign(label: Label) -> f64 {
    if label.is_in() {
        1.0
    } else {
        -1.0
    }
}

/// `ln(1 + e^{-m})` without overflow.
fn log1p_exp_neg(m: f64) -> f64 {
    if m > 0.0 {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn dot(weights: &[f64], x: &SparseVector) -> f64 {
    x.entries().iter().map(|&(i, v)| weights[i] * v).sum()
}

/// Weighted regularized logistic loss
/// `(1/n) Σ c_{y_i} ln(1 + exp(-y_i (w·x_i + b))) + λ‖w‖²`.
pub fn objective(weights: &[f64], bias: f64, set: &TrainingSet, l2_lambda: f64) -> f64 {
    let n = set.len() as f64;
    let data: f64 = set
        .examples
        .iter()
        .map(|(x, y)| set.weight(*y) * log1p_exp_neg(sign(*y) * (dot(weights, x) + bias)))
        .sum();
    data / n + l2_lambda * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Analytic gradient of [`objective`]; returns `(∂w, ∂b)`.
pub fn objective_gradient(weights: &[f64], bias: f64, set: &TrainingSet, l2_lambda: f64) -> (Vec<f64>, f64) {
    let n = set.len() as f64;
    let mut gw: Vec<f64> = weights.iter().map(|w| 2.0 * l2_lambda * w).collect();
    let mut gb = 0.0;
    for (x, y) in &set.examples {
        let s = sign(*y);
        let coef = -set.weight(*y) * s * sigmoid(-s * (dot(weights, x) + bias)) / n;
        for &(i, v) in x.entries() {
            gw[i] += coef * v;
        }
        gb += coef;
    }
    (gw, gb)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyperparams: Hyperparams,
}

impl LinearModel {
    /// Ignores its input and always predicts `prob_in`.
    pub fn constant(dimension: usize, prob_in: f64) -> Self {
        let p = prob_in.clamp(1e-9, 1.0 - 1e-9);
        LinearModel {
            weights: vec![0.0; dimension],
            bias: (p / (1.0 - p)).ln(),
            hyperparams: Hyperparams::default(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn decision_value(&self, x: &SparseVector) -> Result<f64> {
        if x.min_dimension() > self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                found: x.min_dimension() - 1,
            });
        }
        Ok(dot(&self.weights, x) + self.bias)
    }

    /// `σ(w·x + b)`, read as the probability that the predicate holds.
    pub fn predict_proba(&self, x: &SparseVector) -> Result<f64> {
        // keeps the result strictly inside (0, 1)
        Ok(sigmoid(self.decision_value(x)?.clamp(-30.0, 30.0)))
    }

    /// Text dump: `bias\t<b>` then one `index\tweight` line per nonzero weight.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "dimension\t{}", self.weights.len())?;
        writeln!(w, "bias\t{}", self.bias)?;
        for (i, v) in self.weights.iter().enumerate() {
            if *v != 0.0 {
                writeln!(w, "{i}\t{v}")?;
            }
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let bad = |line: &str| Error::Config(format!("malformed model line `{line}`"));
        let mut dimension = None;
        let mut bias = None;
        let mut weights = Vec::new();
        for line in r.lines() {
            let line = line.map_err(|e| Error::io("<model>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let (key, value) = line.split_once('\t').ok_or_else(|| bad(&line))?;
            let value: f64 = value.parse().map_err(|_| bad(&line))?;
            match key {
                "dimension" => {
                    dimension = Some(value as usize);
                    weights = vec![0.0; value as usize];
                }
                "bias" => bias = Some(value),
                idx => {
                    let i: usize = idx.parse().map_err(|_| bad(&line))?;
                    if dimension.is_none() || i >= weights.len() {
                        return Err(bad(&line));
                    }
                    weights[i] = value;
                }
            }
        }
        match (dimension, bias) {
            (Some(_), Some(bias)) => Ok(LinearModel {
                weights,
                bias,
                hyperparams: Hyperparams::default(),
            }),
            _ => Err(Error::Config("model dump lacks dimension or bias".into())),
        }
    }
}

/// Trains a model of width `dimension` by SGD on [`objective`].
///
/// Examples are reshuffled every epoch from `hyperparams.seed`; the step size
/// in epoch `e` (0-based) is `learning_rate / sqrt(e + 1)`.
pub fn train(set: &TrainingSet, dimension: usize, hyperparams: Hyperparams) -> Result<LinearModel> {
    hyperparams.validate()?;
    if set.is_empty() {
        return Err(Error::SingleClass);
    }
    let needed = set.min_dimension();
    if needed > dimension {
        return Err(Error::DimensionMismatch {
            expected: dimension,
            found: needed - 1,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(hyperparams.seed);
    let mut order: Vec<usize> = (0..set.len()).collect();
    // w = scale * v, so the L2 shrink is O(1) per step
    let mut v = vec![0.0; dimension];
    let mut scale = 1.0f64;
    let mut bias = 0.0f64;

    for epoch in 0..hyperparams.epochs {
        order.shuffle(&mut rng);
        let eta = hyperparams.learning_rate / ((epoch + 1) as f64).sqrt();
        let shrink = 1.0 - 2.0 * eta * hyperparams.l2_lambda;
        for &k in &order {
            let (x, y) = &set.examples[k];
            let s = sign(*y);
            let z = scale * dot(&v, x) + bias;
            let coef = -set.weight(*y) * s * sigmoid(-s * z);
            if shrink > 0.0 {
                scale *= shrink;
            } else {
                v.iter_mut().for_each(|w| *w = 0.0);
                scale = 1.0;
            }
            let step = eta * coef / scale;
            for &(i, xv) in x.entries() {
                v[i] -= step * xv;
            }
            bias -= eta * coef;
            if scale < 1e-100 {
                v.iter_mut().for_each(|w| *w *= scale);
                scale = 1.0;
            }
        }
        let weights: Vec<f64> = v.iter().map(|w| w * scale).collect();
        let loss = objective(&weights, bias, set, hyperparams.l2_lambda);
        if !loss.is_finite() || !bias.is_finite() {
            return Err(Error::NonFinite { epoch: epoch + 1 });
        }
    }

    Ok(LinearModel {
        weights: v.into_iter().map(|w| w * scale).collect(),
        bias,
        hyperparams,
    })
}

/// One classifier per predicate, indexed by predicate position.
#[derive(Debug, Clone, Default)]
pub struct ModelRegistry {
    predicate_ids: Vec<String>,
    models: Vec<Option<LinearModel>>,
}

impl ModelRegistry {
    pub fn new(predicate_ids: Vec<String>) -> Self {
        let models = vec![None; predicate_ids.len()];
        ModelRegistry { predicate_ids, models }
    }

    pub fn insert(&mut self, predicate: usize, model: LinearModel) {
        self.models[predicate] = Some(model);
    }

    pub fn get(&self, predicate: usize) -> Result<&LinearModel> {
        match self.models.get(predicate) {
            Some(Some(m)) => Ok(m),
            Some(None) => Err(Error::MissingModel(self.predicate_ids[predicate].clone())),
            None => Err(Error::UnknownPredicate(predicate.to_string())),
        }
    }

    pub fn num_predicates(&self) -> usize {
        self.predicate_ids.len()
    }

    pub fn predicate_ids(&self) -> &[String] {
        &self.predicate_ids
    }

    pub fn is_complete(&self) -> bool {
        self.models.iter().all(Option::is_some)
    }
}
