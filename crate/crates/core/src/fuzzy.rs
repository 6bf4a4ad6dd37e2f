//! Look-up-table (Wang–Mendel) rule learning and Mamdani product inference
//! for one multi-input single-output fuzzy system.
//!
//! Every variable is covered by a [`Partition`] of Gaussian sets. Training
//! turns each sample into one rule built from the maximal-membership set of
//! every variable, weighted by the product of those memberships; rules that
//! share an antecedent are reduced to the heaviest one. Inference uses a
//! singleton fuzzifier, product conjunction and implication, max
//! aggregation, and centre-of-gravity defuzzification on a uniform grid.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SETS: usize = 3;
pub const DEFAULT_COG_GRID_POINTS: usize = 201;

/// Aggregate mass below which the centre of gravity is undefined and the
/// output-domain midpoint is returned instead.
pub const MIN_AGGREGATE_MASS: f64 = 1e-12;

/// Gaussian fuzzy set `exp(-((v - center) / sigma)^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianSetRepr")]
pub struct GaussianSet {
    pub label: String,
    pub center: f64,
    pub sigma: f64,
}

impl GaussianSet {
    pub fn new(label: impl Into<String>, center: f64, sigma: f64) -> Result<Self> {
        if !center.is_finite() || !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gaussian set needs finite center and positive sigma, got ({center}, {sigma})"
            )));
        }
        Ok(Self {
            label: label.into(),
            center,
            sigma,
        })
    }

    #[inline]
    pub fn membership(&self, v: f64) -> f64 {
        membership(self, v)
    }
}

#[inline]
pub fn membership(set: &GaussianSet, v: f64) -> f64 {
    let z = (v - set.center) / set.sigma;
    (-z * z).exp()
}

/// Ordered Gaussian sets covering `[domain_low, domain_high]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr")]
pub struct Partition {
    sets: Vec<GaussianSet>,
    domain_low: f64,
    domain_high: f64,
}

impl Partition {
    pub fn new(sets: Vec<GaussianSet>, domain_low: f64, domain_high: f64) -> Result<Self> {
        let (first, last) = match (sets.first(), sets.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::Empty("partition sets")),
        };
        if !(domain_low.is_finite() && domain_high.is_finite() && domain_low < domain_high) {
            return Err(Error::InvalidArgument(format!(
                "partition domain must satisfy low < high, got [{domain_low}, {domain_high}]"
            )));
        }
        if sets.windows(2).any(|w| w[0].center >= w[1].center) {
            return Err(Error::InvalidArgument(
                "partition centers must be strictly increasing".into(),
            ));
        }
        if first.center < domain_low || last.center > domain_high {
            return Err(Error::InvalidArgument(
                "partition centers must lie inside the domain".into(),
            ));
        }
        Ok(Self {
            sets,
            domain_low,
            domain_high,
        })
    }

    pub fn sets(&self) -> &[GaussianSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.domain_low, self.domain_high)
    }

    /// Index and degree of the set with the largest membership; ties go to
    /// the lower index.
    pub fn best_set(&self, v: f64) -> (usize, f64) {
        let mut best = (0, self.sets[0].membership(v));
        for (i, s) in self.sets.iter().enumerate().skip(1) {
            let mu = s.membership(v);
            if mu > best.1 {
                best = (i, mu);
            }
        }
        best
    }
}

/// `n_sets` Gaussians with equally spaced centers from `low` to `high` and
/// `sigma` equal to half the spacing. Adjacent sets cross at `exp(-1)`.
pub fn make_partition(low: f64, high: f64, n_sets: usize) -> Result<Partition> {
    if !(low.is_finite() && high.is_finite() && low < high) {
        return Err(Error::InvalidArgument(format!(
            "partition needs low < high, got ({low}, {high})"
        )));
    }
    if n_sets < 2 {
        return Err(Error::InvalidArgument(format!(
            "partition needs at least 2 sets, got {n_sets}"
        )));
    }
    let spacing = (high - low) / (n_sets - 1) as f64;
    let sets = (0..n_sets)
        .map(|i| {
            // Pin the last center to `high` exactly.
            let center = if i + 1 == n_sets {
                high
            } else {
                low + spacing * i as f64
            };
            GaussianSet::new(format!("S{}", i + 1), center, spacing / 2.0)
        })
        .collect::<Result<_>>()?;
    Partition::new(sets, low, high)
}

// Deserialization goes through the validating constructors.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianSetRepr {
    label: String,
    center: f64,
    sigma: f64,
}

impl TryFrom<GaussianSetRepr> for GaussianSet {
    type Error = Error;

    fn try_from(r: GaussianSetRepr) -> Result<Self> {
        GaussianSet::new(r.label, r.center, r.sigma)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionRepr {
    sets: Vec<GaussianSet>,
    domain_low: f64,
    domain_high: f64,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = Error;

    fn try_from(r: PartitionRepr) -> Result<Self> {
        Partition::new(r.sets, r.domain_low, r.domain_high)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleBaseRepr {
    rules: Vec<FuzzyRule>,
    input_partitions: Vec<Partition>,
    output_partition: Partition,
    settings: InferenceSettings,
}

impl TryFrom<RuleBaseRepr> for RuleBase {
    type Error = Error;

    fn try_from(r: RuleBaseRepr) -> Result<Self> {
        RuleBase::new(r.rules, r.input_partitions, r.output_partition, r.settings)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyRule {
    pub antecedent: Vec<usize>,
    pub consequent: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferenceSettings {
    /// Uniform grid size for the centre-of-gravity integral.
    pub cog_grid_points: usize,
    /// Multiply firing strengths by the learned rule weights.
    pub use_rule_weights: bool,
}

impl Default for InferenceSettings {
    fn default() -> Self {
        Self {
            cog_grid_points: DEFAULT_COG_GRID_POINTS,
            use_rule_weights: true,
        }
    }
}

/// A consistent rule base with its partitions: one fitted MISO system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RuleBaseRepr")]
pub struct RuleBase {
    rules: Vec<FuzzyRule>,
    input_partitions: Vec<Partition>,
    output_partition: Partition,
    settings: InferenceSettings,
}

impl RuleBase {
    /// Assembles a rule base, checking indices, weights and antecedent
    /// uniqueness.
    pub fn new(
        rules: Vec<FuzzyRule>,
        input_partitions: Vec<Partition>,
        output_partition: Partition,
        settings: InferenceSettings,
    ) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::Empty("rule base"));
        }
        if input_partitions.is_empty() {
            return Err(Error::Empty("input partitions"));
        }
        if settings.cog_grid_points < 2 {
            return Err(Error::InvalidArgument("cog grid needs at least 2 points".into()));
        }
        let mut seen = BTreeMap::new();
        for (i, r) in rules.iter().enumerate() {
            if r.antecedent.len() != input_partitions.len() {
                return Err(Error::InvalidArgument(format!(
                    "rule {i} has {} antecedents for {} inputs",
                    r.antecedent.len(),
                    input_partitions.len()
                )));
            }
            let in_range = r.antecedent.iter().zip(&input_partitions).all(|(&a, p)| a < p.len())
                && r.consequent < output_partition.len();
            if !in_range {
                return Err(Error::InvalidArgument(format!("rule {i} references a missing set")));
            }
            if !(r.weight > 0.0 && r.weight <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "rule {i} weight {} not in (0, 1]",
                    r.weight
                )));
            }
            if seen.insert(r.antecedent.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("rule {i} duplicates an antecedent")));
            }
        }
        Ok(Self {
            rules,
            input_partitions,
            output_partition,
            settings,
        })
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub fn input_partitions(&self) -> &[Partition] {
        &self.input_partitions
    }

    pub fn output_partition(&self) -> &Partition {
        &self.output_partition
    }

    pub fn settings(&self) -> InferenceSettings {
        self.settings
    }

    pub fn with_settings(mut self, settings: InferenceSettings) -> Result<Self> {
        if settings.cog_grid_points < 2 {
            return Err(Error::InvalidArgument("cog grid needs at least 2 points".into()));
        }
        self.settings = settings;
        Ok(self)
    }

    pub fn n_inputs(&self) -> usize {
        self.input_partitions.len()
    }

    /// Crisp output for one input vector.
    pub fn infer(&self, x: &[f64]) -> Result<f64> {
        let grid = OutputGrid::new(self);
        self.infer_on(&grid, x)
    }

    /// Crisp outputs for many input vectors, sharing the output grid tables.
    pub fn infer_batch<R: AsRef<[f64]>>(&self, rows: &[R]) -> Result<Vec<f64>> {
        let grid = OutputGrid::new(self);
        rows.iter().map(|r| self.infer_on(&grid, r.as_ref())).collect()
    }

    fn firing_strength(&self, rule: &FuzzyRule, x: &[f64]) -> f64 {
        let w = if self.settings.use_rule_weights {
            rule.weight
        } else {
            1.0
        };
        rule.antecedent
            .iter()
            .zip(&self.input_partitions)
            .zip(x)
            .fold(w, |acc, ((&set, part), &v)| acc * part.sets[set].membership(v))
    }

    fn infer_on(&self, grid: &OutputGrid, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_inputs() {
            return Err(Error::LengthMismatch {
                expected: self.n_inputs(),
                found: x.len(),
            });
        }
        let mut aggregate = vec![0.0f64; grid.points.len()];
        for rule in &self.rules {
            let firing = self.firing_strength(rule, x);
            if firing == 0.0 {
                continue;
            }
            let table = &grid.consequent_mu[rule.consequent];
            for (a, &mu) in aggregate.iter_mut().zip(table) {
                *a = a.max(firing * mu);
            }
        }
        let (lo, hi) = self.output_partition.domain();
        let mass = trapezoid(&aggregate, grid.step);
        if !(mass >= MIN_AGGREGATE_MASS) {
            return Ok(0.5 * (lo + hi));
        }
        let moment: Vec<f64> = aggregate.iter().zip(&grid.points).map(|(a, y)| a * y).collect();
        Ok((trapezoid(&moment, grid.step) / mass).clamp(lo, hi))
    }

    /// One line per rule: `IF x1 is S2 AND x2 is S1 THEN y is S3 (w=0.81)`.
    pub fn dump(&self, input_names: &[&str], output_name: &str) -> String {
        let mut out = String::new();
        for r in &self.rules {
            let clauses: Vec<String> = r
                .antecedent
                .iter()
                .enumerate()
                .map(|(k, &set)| {
                    let name = input_names
                        .get(k)
                        .map_or_else(|| format!("x{}", k + 1), |n| n.to_string());
                    format!("{name} is {}", self.input_partitions[k].sets[set].label)
                })
                .collect();
            out.push_str(&format!(
                "IF {} THEN {output_name} is {} (w={:.4})\n",
                clauses.join(" AND "),
                self.output_partition.sets[r.consequent].label,
                r.weight
            ));
        }
        out
    }
}

impl fmt::Display for RuleBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump(&[], "y"))
    }
}

struct OutputGrid {
    points: Vec<f64>,
    step: f64,
    consequent_mu: Vec<Vec<f64>>,
}

impl OutputGrid {
    fn new(rb: &RuleBase) -> Self {
        let (lo, hi) = rb.output_partition.domain();
        let n = rb.settings.cog_grid_points;
        let step = (hi - lo) / (n - 1) as f64;
        let points: Vec<f64> = (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
            .collect();
        let consequent_mu = rb
            .output_partition
            .sets
            .iter()
            .map(|s| points.iter().map(|&y| s.membership(y)).collect())
            .collect();
        Self {
            points,
            step,
            consequent_mu,
        }
    }
}

fn trapezoid(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    let inner: f64 = values.iter().sum();
    step * (inner - 0.5 * (values[0] + values[n - 1]))
}

/// Wang–Mendel extraction: one candidate rule per sample, then the
/// highest-weight rule per antecedent (earliest sample on ties).
pub fn extract_rules<R: AsRef<[f64]>>(
    inputs: &[R],
    outputs: &[f64],
    input_partitions: Vec<Partition>,
    output_partition: Partition,
) -> Result<RuleBase> {
    if inputs.is_empty() {
        return Err(Error::Empty("training samples"));
    }
    if inputs.len() != outputs.len() {
        return Err(Error::LengthMismatch {
            expected: inputs.len(),
            found: outputs.len(),
        });
    }
    let mut strongest: BTreeMap<Vec<usize>, FuzzyRule> = BTreeMap::new();
    for (row, &y) in inputs.iter().zip(outputs) {
        let row = row.as_ref();
        if row.len() != input_partitions.len() {
            return Err(Error::LengthMismatch {
                expected: input_partitions.len(),
                found: row.len(),
            });
        }
        let mut antecedent = Vec::with_capacity(row.len());
        let mut weight = 1.0;
        for (part, &v) in input_partitions.iter().zip(row) {
            let (set, mu) = part.best_set(v);
            antecedent.push(set);
            weight *= mu;
        }
        let (consequent, mu_y) = output_partition.best_set(y);
        weight *= mu_y;
        if !(weight > 0.0) {
            // Underflow far outside every set carries no evidence.
            continue;
        }
        let candidate = FuzzyRule {
            antecedent: antecedent.clone(),
            consequent,
            weight,
        };
        match strongest.get_mut(&antecedent) {
            Some(kept) if kept.weight >= weight => {}
            Some(kept) => *kept = candidate,
            None => {
                strongest.insert(antecedent, candidate);
            }
        }
    }
    RuleBase::new(
        strongest.into_values().collect(),
        input_partitions,
        output_partition,
        InferenceSettings::default(),
    )
}

/// Builds partitions from the per-variable training range and extracts the
/// rule base.
pub fn fit_miso<R: AsRef<[f64]>>(inputs: &[R], outputs: &[f64], n_mx: usize, n_my: usize) -> Result<RuleBase> {
    if inputs.is_empty() {
        return Err(Error::Empty("training samples"));
    }
    if inputs.len() != outputs.len() {
        return Err(Error::LengthMismatch {
            expected: inputs.len(),
            found: outputs.len(),
        });
    }
    let n_inputs = inputs[0].as_ref().len();
    if n_inputs == 0 {
        return Err(Error::Empty("input vector"));
    }
    let mut input_partitions = Vec::with_capacity(n_inputs);
    for k in 0..n_inputs {
        let column = inputs.iter().map(|r| r.as_ref().get(k).copied());
        let mut values = Vec::with_capacity(inputs.len());
        for v in column {
            values.push(v.ok_or(Error::LengthMismatch {
                expected: n_inputs,
                found: k,
            })?);
        }
        let (lo, hi) = range(&values)?;
        if lo == hi {
            return Err(Error::DegenerateDomain(format!("x{}", k + 1)));
        }
        input_partitions.push(make_partition(lo, hi, n_mx)?);
    }
    let (lo, hi) = range(outputs)?;
    if lo == hi {
        return Err(Error::DegenerateDomain("y".into()));
    }
    let output_partition = make_partition(lo, hi, n_my)?;
    extract_rules(inputs, outputs, input_partitions, output_partition)
}

fn range(values: &[f64]) -> Result<(f64, f64)> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "training data contains non-finite values".into(),
        ));
    }
    Ok(values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    }))
}
