//! Agenda-weighted outlier learner.
//!
//! Every agenda `Y` of a bank scores an object `a` by how small its object
//! concept is in the subcontext on `Y`:
//!
//! ```text
//! s_Y(a) = exp(-γ (|Cl_Y({a})| / |A|)²)
//! ```
//!
//! Scores are combined as `p = sigmoid(w·s + b)` and `(w, b)` is fitted by
//! full-batch gradient descent on a class-weighted binary cross-entropy.
//! The learned agenda is the mass `|wᵢ| / Σ|wⱼ|` on the bank agendas.

use std::collections::BTreeMap;
use std::io::Read;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::fca::FormalContext;
use crate::mass::{Level, MassFunction, MassJson};
use crate::scaling::base_feature_of;

/// Logits are clamped to `[-LOGIT_CLAMP, LOGIT_CLAMP]`.
pub const LOGIT_CLAMP: f64 = 30.0;
/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` inside the loss.
pub const PROB_EPS: f64 = 1e-15;
/// Half-width of the uniform weight initialisation.
pub const INIT_SCALE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub gamma: f64,
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
    pub pos_weight: f64,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            gamma: 4.0,
            lr: 0.1,
            epochs: 200,
            seed: 7,
            pos_weight: 10.0,
        }
    }
}

/// Agendas over the attributes of a (scaled) context.
#[derive(Debug, Clone, PartialEq)]
pub struct AgendaBank {
    universe: Vec<String>,
    agendas: Vec<BitSet>,
}

/// `{"level": "base"|"scaled", "agendas": [["f1", "f2"], ["f3"]]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankJson {
    pub level: Level,
    pub agendas: Vec<Vec<String>>,
}

impl AgendaBank {
    /// Duplicate agendas are dropped, keeping the first occurrence.
    pub fn new(universe: Vec<String>, agendas: Vec<BitSet>) -> Result<Self> {
        let mut kept: Vec<BitSet> = Vec::with_capacity(agendas.len());
        for y in agendas {
            if y.width() != universe.len() {
                return Err(Error::Dimension {
                    expected: universe.len(),
                    actual: y.width(),
                });
            }
            if kept.contains(&y) {
                log::warn!("dropping duplicate agenda");
                continue;
            }
            kept.push(y);
        }
        if kept.is_empty() {
            return Err(Error::Empty("agenda bank"));
        }
        Ok(AgendaBank { universe, agendas: kept })
    }

    /// Resolves agenda ids against the context attributes. Base-level ids
    /// stand for all scaled attributes of that feature.
    pub fn from_json(json: &BankJson, ctx: &FormalContext) -> Result<Self> {
        let universe = ctx.attributes().to_vec();
        let mut by_feature: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        if json.level == Level::Base {
            for (i, attr) in universe.iter().enumerate() {
                let (base, _) = base_feature_of(attr)?;
                by_feature.entry(base).or_default().push(i);
            }
        }
        let agendas = json
            .agendas
            .iter()
            .map(|ids| {
                let mut set = BitSet::empty(universe.len());
                for id in ids {
                    match json.level {
                        Level::Scaled => set.insert(ctx.attribute_index(id)?),
                        Level::Base => {
                            let cols = by_feature.get(id).ok_or_else(|| Error::UnknownId {
                                kind: "feature",
                                id: id.clone(),
                            })?;
                            cols.iter().for_each(|&i| set.insert(i));
                        }
                    }
                }
                Ok(set)
            })
            .collect::<Result<Vec<_>>>()?;
        AgendaBank::new(universe, agendas)
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn agendas(&self) -> &[BitSet] {
        &self.agendas
    }

    pub fn len(&self) -> usize {
        self.agendas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agendas.is_empty()
    }

    pub fn names(&self) -> Vec<Vec<String>> {
        self.agendas
            .iter()
            .map(|y| y.iter().map(|i| self.universe[i].clone()).collect())
            .collect()
    }
}

/// Labelled objects; `true` marks an outlier.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub objects: Vec<usize>,
    pub labels: Vec<bool>,
}

impl TrainingSet {
    pub fn new(ctx: &FormalContext, labels: &[(String, bool)]) -> Result<Self> {
        let mut objects = Vec::with_capacity(labels.len());
        for (id, _) in labels {
            let i = ctx.object_index(id)?;
            if objects.contains(&i) {
                return Err(Error::DuplicateId {
                    kind: "label object",
                    id: id.clone(),
                });
            }
            objects.push(i);
        }
        Ok(TrainingSet {
            objects,
            labels: labels.iter().map(|(_, l)| *l).collect(),
        })
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|l| **l).count()
    }
}

/// Reads `object,label` rows with labels `0` or `1`.
pub fn read_labels<R: Read>(reader: R) -> Result<Vec<(String, bool)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::Parse(format!("label row has {} fields, expected 2", record.len())));
        }
        let label = match &record[1] {
            "0" => false,
            "1" => true,
            other => return Err(Error::Parse(format!("label `{other}` is not 0 or 1"))),
        };
        out.push((record[0].to_string(), label));
    }
    Ok(out)
}

/// `exp(-γ (|Cl_Y({a})| / |A|)²)`.
pub fn extent_score(ctx: &FormalContext, agenda: &BitSet, object: usize, gamma: f64) -> f64 {
    let a = BitSet::from_indices(ctx.object_count(), [object]);
    let size = ctx.object_closure_under(&a, agenda).len() as f64;
    let ratio = size / ctx.object_count() as f64;
    (-gamma * ratio * ratio).exp()
}

/// `S[k][i]` is the score of `objects[k]` under agenda `i`.
pub fn score_matrix(ctx: &FormalContext, bank: &AgendaBank, objects: &[usize], gamma: f64) -> Result<Vec<Vec<f64>>> {
    if bank.universe() != ctx.attributes() {
        return Err(Error::UniverseMismatch);
    }
    let row = |&a: &usize| -> Vec<f64> { bank.agendas().iter().map(|y| extent_score(ctx, y, a, gamma)).collect() };
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let chunk = objects.len().div_ceil(threads).max(1);
    Ok(std::thread::scope(|scope| {
        let handles: Vec<_> = objects
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(row).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("score worker panicked"))
            .collect()
    }))
}

pub fn sigmoid(z: f64) -> f64 {
    let z = z.clamp(-LOGIT_CLAMP, LOGIT_CLAMP);
    1.0 / (1.0 + (-z).exp())
}

fn dot(scores: &[f64], w: &[f64]) -> Result<f64> {
    if scores.len() != w.len() {
        return Err(Error::Dimension {
            expected: w.len(),
            actual: scores.len(),
        });
    }
    Ok(scores.iter().zip(w).map(|(s, w)| s * w).sum())
}

/// `sigmoid(w·s + b)` with the logit clamped.
pub fn aggregate(scores: &[f64], w: &[f64], b: f64) -> Result<f64> {
    Ok(sigmoid(dot(scores, w)? + b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    /// Trainable `sigmoid(w·s + b)`.
    #[default]
    Logistic,
    /// Largest score among agendas with nonzero weight.
    Max,
    /// Smallest score among agendas with nonzero weight.
    Min,
}

impl std::str::FromStr for Aggregator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(Aggregator::Logistic),
            "max" => Ok(Aggregator::Max),
            "min" => Ok(Aggregator::Min),
            other => Err(Error::Parse(format!("unknown aggregator `{other}`"))),
        }
    }
}

/// Mean class-weighted binary cross-entropy; positives weigh `pos_weight`.
pub fn loss(predictions: &[f64], labels: &[bool], pos_weight: f64) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::Dimension {
            expected: labels.len(),
            actual: predictions.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::Empty("predictions"));
    }
    let mut total = 0.0;
    for (&p, &y) in predictions.iter().zip(labels) {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Training(format!("prediction {p} outside [0, 1]")));
        }
        let p = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
        total -= if y { pos_weight * p.ln() } else { (1.0 - p).ln() };
    }
    Ok(total / predictions.len() as f64)
}

/// Loss and its gradient with respect to `(w, b)` on a score matrix.
pub fn loss_and_gradient(scores: &[Vec<f64>], labels: &[bool], w: &[f64], b: f64, pos_weight: f64) -> Result<(f64, Vec<f64>, f64)> {
    let n = scores.len() as f64;
    let mut preds = Vec::with_capacity(scores.len());
    let mut grad_w = vec![0.0; w.len()];
    let mut grad_b = 0.0;
    for (row, &y) in scores.iter().zip(labels) {
        let z = dot(row, w)? + b;
        let p = sigmoid(z);
        preds.push(p);
        if z.abs() >= LOGIT_CLAMP {
            continue;
        }
        // d/dz of -(ω y ln p + (1 - y) ln(1 - p))
        let dz = if y { pos_weight * (p - 1.0) } else { p } / n;
        for (g, s) in grad_w.iter_mut().zip(row) {
            *g += dz * s;
        }
        grad_b += dz;
    }
    Ok((loss(&preds, labels, pos_weight)?, grad_w, grad_b))
}

/// Result of gradient descent on a fixed score matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Loss before each update, one entry per epoch.
    pub loss_trace: Vec<f64>,
    /// Loss after the last update.
    pub final_loss: f64,
}

pub fn initial_weights(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-INIT_SCALE..=INIT_SCALE)).collect()
}

/// Full-batch gradient descent from seeded weights and zero bias.
pub fn fit(scores: &[Vec<f64>], labels: &[bool], hyper: &Hyper) -> Result<Fit> {
    if hyper.epochs == 0 {
        return Err(Error::Training("epochs must be at least 1".into()));
    }
    if !(hyper.gamma > 0.0 && hyper.lr > 0.0 && hyper.pos_weight > 0.0) {
        return Err(Error::Training("gamma, lr and pos-weight must be positive".into()));
    }
    if scores.len() != labels.len() {
        return Err(Error::Dimension {
            expected: labels.len(),
            actual: scores.len(),
        });
    }
    let positives = labels.iter().filter(|l| **l).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::Training("labels must contain both classes".into()));
    }
    let n = scores.first().map(Vec::len).unwrap_or(0);
    let mut w = initial_weights(n, hyper.seed);
    let mut b = 0.0;
    let mut loss_trace = Vec::with_capacity(hyper.epochs);
    for _ in 0..hyper.epochs {
        let (l, gw, gb) = loss_and_gradient(scores, labels, &w, b, hyper.pos_weight)?;
        loss_trace.push(l);
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi -= hyper.lr * g;
        }
        b -= hyper.lr * gb;
    }
    let (final_loss, _, _) = loss_and_gradient(scores, labels, &w, b, hyper.pos_weight)?;
    Ok(Fit {
        weights: w,
        bias: b,
        loss_trace,
        final_loss,
    })
}

/// Trained weights together with the agendas and hyperparameters that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    /// Attribute ids of the context the model was trained on.
    pub universe: Vec<String>,
    pub agendas: Vec<Vec<String>>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub hyper: Hyper,
    /// Interval count used to scale the training context, if known.
    #[serde(default)]
    pub scale_s: Option<usize>,
    pub loss_trace: Vec<f64>,
    pub final_loss: f64,
    /// Learned agenda `|wᵢ| / Σ|wⱼ|`.
    pub mass: MassJson,
}

impl TrainedModel {
    pub fn bank(&self) -> Result<AgendaBank> {
        let agendas = self
            .agendas
            .iter()
            .map(|ids| {
                let mut set = BitSet::empty(self.universe.len());
                for id in ids {
                    let i = self.universe.iter().position(|u| u == id).ok_or_else(|| Error::UnknownId {
                        kind: "attribute",
                        id: id.clone(),
                    })?;
                    set.insert(i);
                }
                Ok(set)
            })
            .collect::<Result<Vec<_>>>()?;
        AgendaBank::new(self.universe.clone(), agendas)
    }

    pub fn learned_agenda(&self) -> Result<MassFunction<f64>> {
        MassFunction::from_json(&self.mass)
    }
}

pub fn train(ctx: &FormalContext, bank: &AgendaBank, set: &TrainingSet, hyper: &Hyper) -> Result<TrainedModel> {
    let scores = score_matrix(ctx, bank, &set.objects, hyper.gamma)?;
    let fit = fit(&scores, &set.labels, hyper)?;
    let mass = weights_to_mass(bank, &fit.weights)?;
    Ok(TrainedModel {
        universe: bank.universe().to_vec(),
        agendas: bank.names(),
        weights: fit.weights,
        bias: fit.bias,
        hyper: *hyper,
        scale_s: None,
        loss_trace: fit.loss_trace,
        final_loss: fit.final_loss,
        mass: mass.to_json(Level::Scaled),
    })
}

/// Mass `|wᵢ| / Σ|wⱼ|` on agenda `i`; zero-weight agendas are dropped.
pub fn weights_to_mass(bank: &AgendaBank, w: &[f64]) -> Result<MassFunction<f64>> {
    if w.len() != bank.len() {
        return Err(Error::Dimension {
            expected: bank.len(),
            actual: w.len(),
        });
    }
    let total: f64 = w.iter().map(|x| x.abs()).sum();
    if total == 0.0 || !total.is_finite() {
        return Err(Error::Training("all agenda weights are zero".into()));
    }
    let entries = bank
        .agendas()
        .iter()
        .zip(w)
        .filter(|(_, x)| **x != 0.0)
        .map(|(y, x)| (y.clone(), x.abs() / total));
    MassFunction::new(bank.universe().to_vec(), entries)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectPrediction {
    pub object: String,
    /// Final score in `[0, 1]`.
    pub p: f64,
    pub logit: f64,
    /// Raw per-agenda scores.
    pub scores: Vec<f64>,
    /// `wᵢ sᵢ`; with the bias these sum to the logit.
    pub contributions: Vec<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub aggregator: Aggregator,
    pub threshold: f64,
    pub bias: f64,
    pub agendas: Vec<Vec<String>>,
    pub predictions: Vec<ObjectPrediction>,
}

/// Scores `objects` (all objects when `None`) with the model's agendas.
pub fn predict(
    model: &TrainedModel,
    ctx: &FormalContext,
    objects: Option<&[&str]>,
    aggregator: Aggregator,
    threshold: f64,
) -> Result<PredictionReport> {
    if model.universe != ctx.attributes() {
        return Err(Error::UniverseMismatch);
    }
    let bank = model.bank()?;
    let idx: Vec<usize> = match objects {
        Some(ids) => ids.iter().map(|id| ctx.object_index(id)).collect::<Result<_>>()?,
        None => (0..ctx.object_count()).collect(),
    };
    let matrix = score_matrix(ctx, &bank, &idx, model.hyper.gamma)?;
    let active = |s: &[f64]| s.iter().zip(&model.weights).filter(|(_, w)| **w != 0.0).map(|(s, _)| *s).collect::<Vec<_>>();
    let predictions = idx
        .iter()
        .zip(matrix)
        .map(|(&a, scores)| {
            let contributions: Vec<f64> = scores.iter().zip(&model.weights).map(|(s, w)| s * w).collect();
            let logit = contributions.iter().sum::<f64>() + model.bias;
            let p = match aggregator {
                Aggregator::Logistic => sigmoid(logit),
                Aggregator::Max => active(&scores).into_iter().fold(0.0, f64::max),
                Aggregator::Min => active(&scores).into_iter().fold(1.0, f64::min),
            };
            ObjectPrediction {
                object: ctx.objects()[a].clone(),
                p,
                logit,
                scores,
                contributions,
                flagged: p >= threshold,
            }
        })
        .collect();
    Ok(PredictionReport {
        aggregator,
        threshold,
        bias: model.bias,
        agendas: model.agendas.clone(),
        predictions,
    })
}

/// Area under the ROC curve by the Mann-Whitney statistic; ties count half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Dimension {
            expected: labels.len(),
            actual: scores.len(),
        });
    }
    let pos: Vec<f64> = scores.iter().zip(labels).filter(|(_, l)| **l).map(|(s, _)| *s).collect();
    let neg: Vec<f64> = scores.iter().zip(labels).filter(|(_, l)| !**l).map(|(s, _)| *s).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Training("AUC needs both classes".into()));
    }
    let mut wins = 0.0;
    for p in &pos {
        for n in &neg {
            wins += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    Ok(wins / (pos.len() * neg.len()) as f64)
}
