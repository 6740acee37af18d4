//! Seeded trial runner shared by every property check.
//!
//! Trials are cut into fixed-size chunks. Chunk `k` draws from a ChaCha8
//! stream `k` keyed by the run seed and the axiom, so the drawn inputs do not
//! depend on how rayon schedules the chunks. The worst violator is picked by
//! maximum violation, ties broken by the lexicographically smallest inputs.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AxiomId, AxiomReport, CheckConfig, Counterexample, Verdict};
use crate::embedding::ExtendedVector;
use crate::error::{Error, Result};

const CHUNK: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputValue {
    Scalar(f64),
    Vector(Vec<f64>),
    Extended(ExtendedVector),
}

impl InputValue {
    fn flatten_into(&self, out: &mut Vec<f64>) {
        match self {
            InputValue::Scalar(v) => out.push(*v),
            InputValue::Vector(v) => out.extend_from_slice(v),
            InputValue::Extended(e) => {
                out.extend_from_slice(e.body());
                out.push(e.cash());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedInput {
    pub name: String,
    pub value: InputValue,
}

/// The inputs of one trial, in a fixed order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Inputs(pub Vec<NamedInput>);

impl Inputs {
    pub fn with(mut self, name: &str, value: InputValue) -> Self {
        self.0.push(NamedInput {
            name: name.to_string(),
            value,
        });
        self
    }

    pub fn vector(self, name: &str, v: Vec<f64>) -> Self {
        self.with(name, InputValue::Vector(v))
    }

    pub fn scalar(self, name: &str, v: f64) -> Self {
        self.with(name, InputValue::Scalar(v))
    }

    pub fn extended(self, name: &str, v: ExtendedVector) -> Self {
        self.with(name, InputValue::Extended(v))
    }

    fn get(&self, name: &str) -> Result<&InputValue> {
        self.0
            .iter()
            .find(|n| n.name == name)
            .map(|n| &n.value)
            .ok_or_else(|| Error::InvalidParameter(format!("missing trial input {name:?}")))
    }

    pub fn get_vector(&self, name: &str) -> Result<&[f64]> {
        match self.get(name)? {
            InputValue::Vector(v) => Ok(v),
            _ => Err(Error::InvalidParameter(format!(
                "input {name:?} is not a vector"
            ))),
        }
    }

    pub fn get_scalar(&self, name: &str) -> Result<f64> {
        match self.get(name)? {
            InputValue::Scalar(v) => Ok(*v),
            _ => Err(Error::InvalidParameter(format!(
                "input {name:?} is not a scalar"
            ))),
        }
    }

    pub fn get_extended(&self, name: &str) -> Result<&ExtendedVector> {
        match self.get(name)? {
            InputValue::Extended(v) => Ok(v),
            _ => Err(Error::InvalidParameter(format!(
                "input {name:?} is not an extended vector"
            ))),
        }
    }

    fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for n in &self.0 {
            n.value.flatten_into(&mut out);
        }
        out
    }
}

/// How the two sides of a trial are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// `lhs = rhs`; violation `|lhs - rhs|`.
    Identity,
    /// `lhs ≤ rhs`; violation `lhs - rhs`.
    Inequality,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
}

impl Sides {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs }
    }

    pub fn violation(self, form: Form) -> f64 {
        let v = match form {
            Form::Identity => (self.lhs - self.rhs).abs(),
            Form::Inequality => self.lhs - self.rhs,
        };
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// Draws trial inputs. Entries are uniform on `[center - box, center + box]`.
pub struct Sampler {
    rng: ChaCha8Rng,
    dim: usize,
    center: f64,
    half_width: f64,
}

impl Sampler {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn vector(&mut self) -> Vec<f64> {
        self.vector_of(self.dim)
    }

    pub fn vector_of(&mut self, dim: usize) -> Vec<f64> {
        let (lo, hi) = (self.center - self.half_width, self.center + self.half_width);
        (0..dim).map(|_| self.rng.random_range(lo..=hi)).collect()
    }

    /// Uniform on `[-box, box]`.
    pub fn signed_shift(&mut self) -> f64 {
        self.rng.random_range(-self.half_width..=self.half_width)
    }

    /// Uniform on `[0, box]`.
    pub fn nonneg_shift(&mut self) -> f64 {
        self.rng.random_range(0.0..=self.half_width)
    }

    /// Non-negative perturbation; each entry is exactly zero with probability 1/4.
    pub fn perturbation(&mut self, dim: usize) -> Vec<f64> {
        (0..dim)
            .map(|_| {
                if self.rng.random_ratio(1, 4) {
                    0.0
                } else {
                    self.rng.random_range(0.0..=self.half_width)
                }
            })
            .collect()
    }

    pub fn unit_interval(&mut self) -> f64 {
        self.rng.random_range(0.0..=1.0)
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn open_unit_interval(&mut self) -> f64 {
        loop {
            let v: f64 = self.rng.random_range(0.0..1.0);
            if v > 0.0 {
                return v;
            }
        }
    }

    pub fn direction(&mut self) -> Vec<f64> {
        (0..self.dim)
            .map(|_| self.rng.random_range(-1.0..=1.0))
            .collect()
    }

    pub fn pick<T: Copy>(&mut self, options: &[T]) -> T {
        options[self.rng.random_range(0..options.len())]
    }
}

struct Candidate {
    violation: f64,
    inputs: Inputs,
    sides: Sides,
    flat: Vec<f64>,
}

fn prefer(a: Candidate, b: Candidate) -> Candidate {
    match a.violation.total_cmp(&b.violation) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            let lex = a
                .flat
                .iter()
                .zip(&b.flat)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or_else(|| a.flat.len().cmp(&b.flat.len()));
            if lex.is_le() {
                a
            } else {
                b
            }
        }
    }
}

fn merge(acc: Option<Candidate>, next: Option<Candidate>) -> Option<Candidate> {
    match (acc, next) {
        (Some(a), Some(b)) => Some(prefer(a, b)),
        (a, b) => a.or(b),
    }
}

/// Everything a report needs besides the trial closures.
pub struct TrialSpec<'a> {
    pub axiom: AxiomId,
    pub config: &'a CheckConfig,
    pub dim: usize,
    pub tolerance: f64,
    pub form: Form,
    pub epsilon: Option<f64>,
}

impl TrialSpec<'_> {
    fn stream_key(&self) -> u64 {
        let salt = self.axiom as u64 + 1;
        let eps_bits = self.epsilon.map_or(0, f64::to_bits);
        self.config.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ eps_bits.rotate_left(17)
    }

    fn evaluate<M>(&self, inputs: Inputs, measure: &M) -> Result<Candidate>
    where
        M: Fn(&Inputs) -> Result<Sides>,
    {
        let sides = measure(&inputs)?;
        Ok(Candidate {
            violation: sides.violation(self.form),
            flat: inputs.flat(),
            inputs,
            sides,
        })
    }

    fn finish(&self, trials: usize, worst: Option<Candidate>) -> AxiomReport {
        let max_violation = worst.as_ref().map_or(f64::NEG_INFINITY, |c| c.violation);
        let verdict = if max_violation > self.tolerance {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        let counterexample = match (verdict, worst) {
            (Verdict::Fail, Some(c)) => Some(Counterexample {
                inputs: c.inputs,
                lhs: c.sides.lhs,
                rhs: c.sides.rhs,
            }),
            _ => None,
        };
        AxiomReport {
            axiom: self.axiom,
            verdict,
            trials,
            tolerance: self.tolerance,
            max_violation,
            counterexample,
            seed: self.config.seed,
            epsilon: self.epsilon,
        }
    }

    /// Runs `config.trials` random trials.
    pub fn run<S, M>(&self, sample: S, measure: M) -> Result<AxiomReport>
    where
        S: Fn(&mut Sampler) -> Inputs + Sync,
        M: Fn(&Inputs) -> Result<Sides> + Sync,
    {
        let trials = self.config.trials;
        let chunks = trials.div_ceil(CHUNK);
        let key = self.stream_key();
        let per_chunk: Vec<Result<Option<Candidate>>> = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(key);
                rng.set_stream(chunk as u64);
                let mut sampler = Sampler {
                    rng,
                    dim: self.dim,
                    center: self.config.center,
                    half_width: self.config.box_half_width,
                };
                let n = CHUNK.min(trials - chunk * CHUNK);
                let mut worst = None;
                for _ in 0..n {
                    let inputs = sample(&mut sampler);
                    worst = merge(worst, Some(self.evaluate(inputs, &measure)?));
                }
                Ok(worst)
            })
            .collect();
        let mut worst = None;
        for chunk in per_chunk {
            worst = merge(worst, chunk?);
        }
        Ok(self.finish(trials, worst))
    }

    /// Runs a fixed list of trials, e.g. a grid.
    pub fn run_fixed<M>(&self, cases: Vec<Inputs>, measure: M) -> Result<AxiomReport>
    where
        M: Fn(&Inputs) -> Result<Sides>,
    {
        let trials = cases.len();
        let mut worst = None;
        for inputs in cases {
            worst = merge(worst, Some(self.evaluate(inputs, &measure)?));
        }
        Ok(self.finish(trials, worst))
    }
}
