//! Search over the configuration space: exhaustive optimization and the
//! secretary-stopping stochastic solver, plus the general odds algorithm.
//!
//! A configuration is a (leader, team, skill assignment) triple. The
//! enumeration order is documented and stable: leaders ascending, then
//! teammate combinations in lexicographic order, then skill permutations in
//! lexicographic order of the assigned worker sequence. Every solver and
//! stream derives from this single indexing, so tie-breaking ("first in
//! enumeration order wins") is well defined everywhere.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::efficiency::{
    perceived_skills, team_efficiency, EfficiencyBreakdown, EfficiencyError, PerceivedSkills,
    PerceptionModel, ProjectSpec, TeamConfig,
};
use crate::model::Instance;

/// Largest configuration space a shuffled stream will materialize.
/// Larger spaces are rejected instead of silently sampled.
pub const MAX_STREAM_CONFIGS: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("infeasible project: {required} required skills exceed {available} workers")]
    InfeasibleProject { required: usize, available: usize },
    #[error("project requires at least one skill")]
    EmptyProject,
    #[error("configuration count overflows: {n_workers} workers, {n_required} required skills")]
    CountOverflow { n_workers: usize, n_required: usize },
    #[error("configuration space of {total} exceeds the streaming capacity of {max}")]
    CapacityExceeded { total: u128, max: u128 },
    #[error("exploration threshold {k} outside [0, {total}]")]
    ThresholdOutOfRange { k: u64, total: u64 },
    #[error("success probability list is empty")]
    EmptyProbabilities,
    #[error("candidate score stream is empty")]
    EmptyStream,
    #[error("success probability {value} at index {index} outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error(transparent)]
    Efficiency(#[from] EfficiencyError),
}

/// Whether a count refers to distinct configurations or to the raw
/// combinatorial formula N! * k! / (N-k)!, which counts every distinct
/// configuration (k-1)! times because reordering the non-leader teammates
/// does not change the triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    Distinct,
    Paper,
}

/// Size summary of the search space for a pool/project pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConfigurationSpace {
    pub n_workers: usize,
    pub n_required: usize,
    /// Count of distinct (leader, team, assignment) triples:
    /// N * C(N-1, k-1) * k!.
    pub total_distinct: u128,
    /// The raw formula N! * k! / (N-k)! = total_distinct * (k-1)!.
    pub total_paper: u128,
}

impl ConfigurationSpace {
    pub fn new(n_workers: usize, n_required: usize) -> Result<Self, SolverError> {
        Ok(ConfigurationSpace {
            n_workers,
            n_required,
            total_distinct: configuration_count(n_workers, n_required, CountMode::Distinct)?,
            total_paper: configuration_count(n_workers, n_required, CountMode::Paper)?,
        })
    }

    /// How many times each distinct configuration appears in the paper
    /// count: (k-1)!.
    pub fn duplication_factor(&self) -> u128 {
        factorial(self.n_required as u128 - 1).expect("validated at construction")
    }
}

fn factorial(n: u128) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 2..=n {
        acc = acc.checked_mul(i)?;
    }
    Some(acc)
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // Multiply before dividing; after step i the accumulator holds
        // C(n-k+i, i), so the division is always exact.
        acc = acc.checked_mul(n - k + i)? / i;
    }
    Some(acc)
}

/// Number of candidate configurations for a pool of `n_workers` and a
/// project with `n_required` skills.
pub fn configuration_count(
    n_workers: usize,
    n_required: usize,
    mode: CountMode,
) -> Result<u128, SolverError> {
    if n_required == 0 {
        return Err(SolverError::EmptyProject);
    }
    if n_required > n_workers {
        return Err(SolverError::InfeasibleProject {
            required: n_required,
            available: n_workers,
        });
    }
    let n = n_workers as u128;
    let k = n_required as u128;
    let overflow = || SolverError::CountOverflow {
        n_workers,
        n_required,
    };
    let distinct = n
        .checked_mul(binomial(n - 1, k - 1).ok_or_else(overflow)?)
        .and_then(|x| x.checked_mul(factorial(k)?))
        .ok_or_else(overflow)?;
    match mode {
        CountMode::Distinct => Ok(distinct),
        CountMode::Paper => distinct
            .checked_mul(factorial(k - 1).ok_or_else(overflow)?)
            .ok_or_else(overflow),
    }
}

/// Unranks the combination with lexicographic rank `rank` out of all
/// k-subsets of {0, .., n-1}.
fn unrank_combination(mut rank: u128, n: usize, k: usize) -> Vec<usize> {
    let mut result = Vec::with_capacity(k);
    let mut next = 0usize;
    let mut remaining = k;
    while remaining > 0 {
        let with_next = binomial((n - next - 1) as u128, (remaining - 1) as u128)
            .expect("combination bounds already validated");
        if rank < with_next {
            result.push(next);
            remaining -= 1;
        } else {
            rank -= with_next;
        }
        next += 1;
    }
    result
}

/// Unranks the permutation of `items` with lexicographic rank `rank`.
fn unrank_permutation(mut rank: u128, items: &[usize]) -> Vec<usize> {
    let mut pool = items.to_vec();
    let mut result = Vec::with_capacity(items.len());
    for position in (0..items.len()).rev() {
        let f = factorial(position as u128).expect("desk-scale team sizes");
        let idx = (rank / f) as usize;
        rank %= f;
        result.push(pool.remove(idx));
    }
    result
}

/// Deterministic enumeration support: maps an index in
/// [0, total_distinct) to its configuration.
#[derive(Debug, Clone)]
pub struct ConfigIndexer {
    n_workers: usize,
    required_skills: Vec<usize>,
    per_leader: u128,
    assignments: u128,
    total: u128,
}

impl ConfigIndexer {
    pub fn new(n_workers: usize, project: &ProjectSpec) -> Result<Self, SolverError> {
        let k = project.team_size();
        let total = configuration_count(n_workers, k, CountMode::Distinct)?;
        let assignments = factorial(k as u128).expect("validated by configuration_count");
        Ok(ConfigIndexer {
            n_workers,
            required_skills: project.required_skills.clone(),
            per_leader: total / n_workers as u128,
            assignments,
            total,
        })
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    /// The configuration at `index` in the documented order: leader
    /// ascending, teammate combination ascending, skill permutation
    /// ascending.
    pub fn config_at(&self, index: u128) -> TeamConfig {
        debug_assert!(index < self.total);
        let leader = (index / self.per_leader) as usize;
        let rem = index % self.per_leader;
        let comb_rank = rem / self.assignments;
        let perm_rank = rem % self.assignments;
        let k = self.required_skills.len();

        // Teammates are chosen from the pool without the leader; indices
        // at or above the leader shift up by one.
        let mut team: Vec<usize> = unrank_combination(comb_rank, self.n_workers - 1, k - 1)
            .into_iter()
            .map(|w| if w >= leader { w + 1 } else { w })
            .collect();
        team.push(leader);
        team.sort_unstable();

        let ordered = unrank_permutation(perm_rank, &team);
        TeamConfig::new(
            leader,
            self.required_skills
                .iter()
                .copied()
                .zip(ordered.iter().copied()),
        )
    }
}

fn feasible_space(
    instance: &Instance,
    project: &ProjectSpec,
) -> Result<ConfigIndexer, SolverError> {
    project.validate(instance.n_skills())?;
    ConfigIndexer::new(instance.n_workers(), project)
}

/// Yields every distinct configuration exactly once, in the documented
/// lexicographic order.
pub fn enumerate_configurations<'a>(
    instance: &Instance,
    project: &'a ProjectSpec,
) -> Result<impl Iterator<Item = TeamConfig> + 'a, SolverError> {
    let indexer = feasible_space(instance, project)?;
    let total = indexer.total();
    Ok((0..total).map(move |i| indexer.config_at(i)))
}

/// A uniformly random permutation of the distinct enumeration indices,
/// deterministic per seed.
pub fn shuffled_indices(total: u128, seed: u64) -> Result<Vec<u64>, SolverError> {
    if total > MAX_STREAM_CONFIGS {
        return Err(SolverError::CapacityExceeded {
            total,
            max: MAX_STREAM_CONFIGS,
        });
    }
    let mut indices: Vec<u64> = (0..total as u64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    Ok(indices)
}

/// Yields every distinct configuration exactly once, in uniformly random
/// order (Fisher–Yates over enumeration indices), deterministic per seed.
pub fn shuffled_configuration_stream<'a>(
    instance: &Instance,
    project: &'a ProjectSpec,
    seed: u64,
) -> Result<impl Iterator<Item = TeamConfig> + 'a, SolverError> {
    let indexer = feasible_space(instance, project)?;
    let indices = shuffled_indices(indexer.total(), seed)?;
    Ok(indices
        .into_iter()
        .map(move |i| indexer.config_at(i as u128)))
}

/// How the exploration length of the secretary rule is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExplorationRule {
    /// k = ceil(total / e), the classical fraction.
    OneOverE,
    /// A caller-supplied exploration length.
    Explicit(u64),
}

/// Resolves an exploration rule against the stream length.
pub fn exploration_threshold(total: u64, rule: ExplorationRule) -> Result<u64, SolverError> {
    match rule {
        ExplorationRule::OneOverE => {
            let k = (total as f64 / std::f64::consts::E).ceil() as u64;
            Ok(k.clamp(1, total.max(1)))
        }
        ExplorationRule::Explicit(k) => {
            if k > total {
                Err(SolverError::ThresholdOutOfRange { k, total })
            } else {
                Ok(k)
            }
        }
    }
}

/// What to return when nothing in the exploitation phase beats the
/// exploration maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    /// The final stream element: the classical secretary rule, which the
    /// probability analysis assumes.
    Last,
    /// The best configuration seen anywhere in the stream. Practical mode;
    /// not used when measuring the classical probabilities.
    BestSeen,
}

/// Result of running the secretary rule over a stream of scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOutcome {
    /// Stream position (0-based) of the selected element.
    pub position: usize,
    pub score: f64,
    /// Number of elements scored, exploration included.
    pub evaluations: u64,
    /// True when the exploration maximum was never beaten and the
    /// fallback applied.
    pub fell_back: bool,
}

/// The secretary rule applied to an already-scored candidate sequence.
/// Abstract form of [`secretary_solver`] for callers that bring their own
/// scores.
pub fn secretary_select(
    scores: &[f64],
    k: u64,
    fallback: Fallback,
) -> Result<ScanOutcome, SolverError> {
    if scores.is_empty() {
        return Err(SolverError::EmptyStream);
    }
    if k as usize > scores.len() {
        return Err(SolverError::ThresholdOutOfRange {
            k,
            total: scores.len() as u64,
        });
    }
    Ok(secretary_scan(
        scores.iter().copied(),
        scores.len(),
        k,
        fallback,
    ))
}

/// The secretary rule over an abstract score stream: observe the first `k`
/// scores without selecting, then select the first score strictly greater
/// than everything explored; fall back if none is.
///
/// An empty exploration (k = 0) behaves as a threshold of negative
/// infinity, so the first element is selected immediately.
pub(crate) fn secretary_scan(
    scores: impl IntoIterator<Item = f64>,
    total: usize,
    k: u64,
    fallback: Fallback,
) -> ScanOutcome {
    debug_assert!(total >= 1);
    let mut threshold = f64::NEG_INFINITY;
    let mut best_position = 0usize;
    let mut best_score = f64::NEG_INFINITY;
    let mut last_score = f64::NEG_INFINITY;
    let mut evaluations = 0u64;

    for (position, score) in scores.into_iter().enumerate() {
        evaluations += 1;
        last_score = score;
        if score > best_score {
            best_score = score;
            best_position = position;
        }
        if (position as u64) < k {
            threshold = threshold.max(score);
        } else if score > threshold {
            return ScanOutcome {
                position,
                score,
                evaluations,
                fell_back: false,
            };
        }
    }

    match fallback {
        Fallback::Last => ScanOutcome {
            position: total - 1,
            score: last_score,
            evaluations,
            fell_back: true,
        },
        Fallback::BestSeen => ScanOutcome {
            position: best_position,
            score: best_score,
            evaluations,
            fell_back: true,
        },
    }
}

/// Outcome of one solver run: the chosen configuration, its score
/// breakdown, and bookkeeping for benchmarking.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub chosen: TeamConfig,
    pub total_te: f64,
    pub breakdown: EfficiencyBreakdown,
    /// Number of configurations scored before the solver committed.
    pub evaluations: u64,
    pub wall_time: Duration,
    /// 1-based rank of the chosen configuration by efficiency, when an
    /// oracle pass over the whole space was affordable.
    pub rank: Option<u64>,
}

/// One perceived-skill matrix per candidate leader, all derived from the
/// same noise seed so competing solvers score identical values.
pub fn perceived_for_all_leaders(
    instance: &Instance,
    project: &ProjectSpec,
    model: &PerceptionModel,
    noise_seed: u64,
) -> Result<Vec<PerceivedSkills>, SolverError> {
    let seeded = model.with_seed(noise_seed);
    (0..instance.n_workers())
        .map(|leader| perceived_skills(instance, leader, project, &seeded).map_err(Into::into))
        .collect()
}

fn evaluate(
    instance: &Instance,
    project: &ProjectSpec,
    config: &TeamConfig,
    perceived: &[PerceivedSkills],
    model: &PerceptionModel,
) -> Result<EfficiencyBreakdown, SolverError> {
    team_efficiency(instance, project, config, &perceived[config.leader], model).map_err(Into::into)
}

/// Scores every distinct configuration and returns the maximum, breaking
/// ties toward the earliest enumeration index. Exact but exponential: the
/// benchmark optimum at desk scale.
pub fn exhaustive_solver(
    instance: &Instance,
    project: &ProjectSpec,
    model: &PerceptionModel,
    noise_seed: u64,
) -> Result<SolverReport, SolverError> {
    let (report, _) = exhaustive_solver_with_scores(instance, project, model, noise_seed)?;
    Ok(report)
}

/// [`exhaustive_solver`] variant that also returns the efficiency of every
/// configuration by enumeration index, for rank statistics.
pub fn exhaustive_solver_with_scores(
    instance: &Instance,
    project: &ProjectSpec,
    model: &PerceptionModel,
    noise_seed: u64,
) -> Result<(SolverReport, Vec<f64>), SolverError> {
    let indexer = feasible_space(instance, project)?;
    let total = indexer.total();
    if total > MAX_STREAM_CONFIGS {
        return Err(SolverError::CapacityExceeded {
            total,
            max: MAX_STREAM_CONFIGS,
        });
    }

    let started = Instant::now();
    let perceived = perceived_for_all_leaders(instance, project, model, noise_seed)?;
    let mut scores = Vec::with_capacity(total as usize);
    let mut best_index = 0u128;
    let mut best_te = f64::NEG_INFINITY;
    for index in 0..total {
        let config = indexer.config_at(index);
        let breakdown = evaluate(instance, project, &config, &perceived, model)?;
        scores.push(breakdown.total);
        if breakdown.total > best_te {
            best_te = breakdown.total;
            best_index = index;
        }
    }
    let chosen = indexer.config_at(best_index);
    let breakdown = evaluate(instance, project, &chosen, &perceived, model)?;
    let wall_time = started.elapsed();

    Ok((
        SolverReport {
            chosen,
            total_te: breakdown.total,
            breakdown,
            evaluations: total as u64,
            wall_time,
            rank: Some(1),
        },
        scores,
    ))
}

/// The secretary-stopping solver: scores configurations in uniformly
/// random order, observes the first `k` without committing, then commits
/// to the first configuration strictly better than everything explored.
/// Decisions are irrevocable, so if nothing beats the exploration maximum
/// the fallback applies.
///
/// Evaluation is lazy — the stream stops as soon as a configuration is
/// selected — which is where the computational saving over the exhaustive
/// solver comes from.
pub fn secretary_solver(
    instance: &Instance,
    project: &ProjectSpec,
    model: &PerceptionModel,
    noise_seed: u64,
    stream_seed: u64,
    k: u64,
    fallback: Fallback,
) -> Result<SolverReport, SolverError> {
    let indexer = feasible_space(instance, project)?;
    let total = indexer.total();
    if k as u128 > total {
        return Err(SolverError::ThresholdOutOfRange {
            k,
            total: total as u64,
        });
    }

    let started = Instant::now();
    let perceived = perceived_for_all_leaders(instance, project, model, noise_seed)?;
    let indices = shuffled_indices(total, stream_seed)?;

    let mut error = None;
    let outcome = secretary_scan(
        indices.iter().map(|&i| {
            let config = indexer.config_at(i as u128);
            match evaluate(instance, project, &config, &perceived, model) {
                Ok(b) => b.total,
                Err(e) => {
                    error = Some(e);
                    f64::NEG_INFINITY
                }
            }
        }),
        total as usize,
        k,
        fallback,
    );
    if let Some(e) = error {
        return Err(e);
    }

    let chosen = indexer.config_at(indices[outcome.position] as u128);
    let breakdown = evaluate(instance, project, &chosen, &perceived, model)?;
    let wall_time = started.elapsed();

    Ok(SolverReport {
        chosen,
        total_te: breakdown.total,
        breakdown,
        evaluations: outcome.evaluations,
        wall_time,
        rank: None,
    })
}

/// An optimal-stopping plan from the odds algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OddsPlan {
    /// 1-based index of the first event at which stopping is allowed:
    /// stop at the first success at or after this index.
    pub stop_index: usize,
    /// Probability that the strategy stops on the last success.
    pub win_probability: f64,
}

/// The odds algorithm for a sequence of independent success events with
/// probabilities `p_j`: sum the odds `p / (1 - p)` from the back and allow
/// stopping from the last index where the running sum still reaches 1
/// (from the first index if it never does). Stopping at the first success
/// from that index on maximizes the probability of stopping on the final
/// success.
///
/// A probability of exactly 1 has infinite odds, which pins the stop index
/// at or after that event.
pub fn odds_stopping_index(success_probabilities: &[f64]) -> Result<OddsPlan, SolverError> {
    if success_probabilities.is_empty() {
        return Err(SolverError::EmptyProbabilities);
    }
    for (index, &value) in success_probabilities.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) || value.is_nan() {
            return Err(SolverError::ProbabilityOutOfRange { index, value });
        }
    }
    let n = success_probabilities.len();

    let mut odds_sum = 0.0f64;
    let mut stop = 1usize;
    for j in (0..n).rev() {
        let p = success_probabilities[j];
        odds_sum += if p < 1.0 {
            p / (1.0 - p)
        } else {
            f64::INFINITY
        };
        if odds_sum >= 1.0 {
            stop = j + 1;
            break;
        }
    }

    // Win probability: the strategy wins when exactly one success occurs in
    // the tail [stop, n]. Computed as sum_i p_i * prod_{j != i} (1 - p_j),
    // which equals the product-times-odds-sum form but stays finite when
    // some p_j = 1.
    let tail = &success_probabilities[stop - 1..];
    let mut suffix = vec![1.0; tail.len() + 1];
    for j in (0..tail.len()).rev() {
        suffix[j] = suffix[j + 1] * (1.0 - tail[j]);
    }
    let mut prefix = 1.0;
    let mut win_probability = 0.0;
    for (j, &p) in tail.iter().enumerate() {
        win_probability += prefix * p * suffix[j + 1];
        prefix *= 1.0 - p;
    }

    Ok(OddsPlan {
        stop_index: stop,
        win_probability,
    })
}
