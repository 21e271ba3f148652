//! Leader perception noise and the team efficiency objective.
//!
//! A candidate solution is a [`TeamConfig`]: a leader plus a bijection from
//! the project's required skills to distinct workers (the leader covers one
//! of them). Its score is a weighted combination of four terms, each
//! normalized into [0, 1]:
//!
//! * mean perceived skill of the assigned workers,
//! * mean leader uncertainty over the team (subtracted),
//! * mean assignment cost (subtracted),
//! * mean pairwise social relationship over the team.
//!
//! The leader does not know true skills. They see each worker's skill plus
//! zero-mean Gaussian noise whose variance grows with graph distance, capped
//! at `u_max`. Noise is a pure function of (seed, leader, worker, skill), so
//! evaluation order never changes results and distinct solvers sharing a
//! seed score identical perceived skills.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Instance;

/// A project posting: which skills must be covered and how the four
/// objective terms are weighted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectSpec {
    /// Distinct skill indices that the team must cover, one worker each.
    pub required_skills: Vec<usize>,
    /// Non-negative weights for (skill, uncertainty, cost, social).
    pub gamma: [f64; 4],
}

impl ProjectSpec {
    pub fn new(required_skills: Vec<usize>, gamma: [f64; 4]) -> Result<Self, EfficiencyError> {
        let spec = ProjectSpec {
            required_skills,
            gamma,
        };
        spec.validate_shape()?;
        Ok(spec)
    }

    /// Number of required skills, which is also the team size.
    pub fn team_size(&self) -> usize {
        self.required_skills.len()
    }

    fn validate_shape(&self) -> Result<(), EfficiencyError> {
        if self.required_skills.is_empty() {
            return Err(EfficiencyError::NoRequiredSkills);
        }
        let mut seen = self.required_skills.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(EfficiencyError::DuplicateRequiredSkill);
        }
        if let Some(&g) = self.gamma.iter().find(|&&g| g < 0.0 || !g.is_finite()) {
            return Err(EfficiencyError::NegativeWeight(g));
        }
        Ok(())
    }

    /// Full validation against an instance's skill count.
    pub fn validate(&self, n_skills: usize) -> Result<(), EfficiencyError> {
        self.validate_shape()?;
        if let Some(&s) = self.required_skills.iter().find(|&&s| s >= n_skills) {
            return Err(EfficiencyError::SkillOutOfRange { skill: s, n_skills });
        }
        Ok(())
    }
}

/// How a leader's knowledge of other workers degrades with distance.
///
/// The perception error for worker `w` seen by leader `L` is drawn from a
/// zero-mean normal with variance `min(u_max, sigma0^2 * d(L, w))`; the
/// leader knows themself exactly and knows nothing (variance `u_max`) about
/// unreachable workers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptionModel {
    /// Noise standard deviation at one hop.
    pub sigma0: f64,
    /// Variance cap, in (0, 1].
    pub u_max: f64,
    pub seed: u64,
}

impl Default for PerceptionModel {
    fn default() -> Self {
        PerceptionModel {
            sigma0: 0.2,
            u_max: 1.0,
            seed: 0,
        }
    }
}

impl PerceptionModel {
    pub fn validate(&self) -> Result<(), EfficiencyError> {
        if self.sigma0 < 0.0 || !self.sigma0.is_finite() {
            return Err(EfficiencyError::InvalidSigma(self.sigma0));
        }
        if !(self.u_max > 0.0 && self.u_max <= 1.0) {
            return Err(EfficiencyError::InvalidVarianceCap(self.u_max));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        PerceptionModel { seed, ..*self }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EfficiencyError {
    #[error("a project needs at least one required skill")]
    NoRequiredSkills,
    #[error("required skill indices must be distinct")]
    DuplicateRequiredSkill,
    #[error("objective weight {0} must be finite and non-negative")]
    NegativeWeight(f64),
    #[error("required skill {skill} out of range for {n_skills} skills")]
    SkillOutOfRange { skill: usize, n_skills: usize },
    #[error("sigma0 {0} must be finite and non-negative")]
    InvalidSigma(f64),
    #[error("variance cap {0} must lie in (0, 1]")]
    InvalidVarianceCap(f64),
    #[error("worker index {worker} out of range for {n_workers} workers")]
    WorkerOutOfRange { worker: usize, n_workers: usize },
    #[error("perceived skills were produced for leader {expected}, not {found}")]
    LeaderMismatch { expected: usize, found: usize },
    #[error("invalid team configuration: {0}")]
    InvalidConfig(#[from] ConfigViolation),
}

/// The specific [`TeamConfig`] invariant a candidate violates.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigViolation {
    #[error("assignment covers {found} skills but the project requires {expected}")]
    WrongSize { expected: usize, found: usize },
    #[error("required skill {0} is not covered by the assignment")]
    SkillNotCovered(usize),
    #[error("skill {0} is assigned but not required by the project")]
    SkillNotRequired(usize),
    #[error("worker {0} is assigned more than one skill")]
    WorkerAssignedTwice(usize),
    #[error("leader {0} is not a member of the team")]
    LeaderNotInTeam(usize),
    #[error("assigned worker {worker} out of range for {n_workers} workers")]
    WorkerOutOfRange { worker: usize, n_workers: usize },
}

/// One candidate solution: a leader and a bijection from required skills to
/// distinct workers. The assignment is stored sorted by skill index, so two
/// configs built from the same pairs in any order compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TeamConfig {
    pub leader: usize,
    assignment: Vec<(usize, usize)>,
}

impl TeamConfig {
    /// Builds a config from (skill, worker) pairs in any order.
    pub fn new(leader: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut assignment: Vec<(usize, usize)> = pairs.into_iter().collect();
        assignment.sort_unstable();
        TeamConfig { leader, assignment }
    }

    /// The (skill, worker) pairs, sorted by skill index.
    pub fn assignment(&self) -> &[(usize, usize)] {
        &self.assignment
    }

    pub fn worker_for(&self, skill: usize) -> Option<usize> {
        self.assignment
            .binary_search_by_key(&skill, |&(s, _)| s)
            .ok()
            .map(|idx| self.assignment[idx].1)
    }

    /// Team members in assignment order (distinct once validated).
    pub fn team(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment.iter().map(|&(_, w)| w)
    }

    /// Checks every config invariant against a project and pool size,
    /// naming the violated clause.
    pub fn validate(&self, project: &ProjectSpec, n_workers: usize) -> Result<(), ConfigViolation> {
        if self.assignment.len() != project.team_size() {
            return Err(ConfigViolation::WrongSize {
                expected: project.team_size(),
                found: self.assignment.len(),
            });
        }
        for &(skill, worker) in &self.assignment {
            if !project.required_skills.contains(&skill) {
                return Err(ConfigViolation::SkillNotRequired(skill));
            }
            if worker >= n_workers {
                return Err(ConfigViolation::WorkerOutOfRange { worker, n_workers });
            }
        }
        for &skill in &project.required_skills {
            if self.worker_for(skill).is_none() {
                return Err(ConfigViolation::SkillNotCovered(skill));
            }
        }
        let mut workers: Vec<usize> = self.team().collect();
        workers.sort_unstable();
        if let Some(w) = workers.windows(2).find(|w| w[0] == w[1]) {
            return Err(ConfigViolation::WorkerAssignedTwice(w[0]));
        }
        if !workers.contains(&self.leader) {
            return Err(ConfigViolation::LeaderNotInTeam(self.leader));
        }
        Ok(())
    }
}

/// Leader confidence: the variance of the perception error for `worker` as
/// seen by `leader`. Zero for the leader themself, otherwise `sigma0^2`
/// per hop up to the cap. Unreachable workers take the d -> infinity limit
/// of that expression: the full cap, or 0 when the noise scale itself is 0
/// (so a noiseless model stays exact on disconnected graphs too).
pub fn uncertainty(
    instance: &Instance,
    leader: usize,
    worker: usize,
    model: &PerceptionModel,
) -> Result<f64, EfficiencyError> {
    let n = instance.n_workers();
    for idx in [leader, worker] {
        if idx >= n {
            return Err(EfficiencyError::WorkerOutOfRange {
                worker: idx,
                n_workers: n,
            });
        }
    }
    Ok(match instance.hop(leader, worker) {
        Some(0) => 0.0,
        Some(d) => (model.sigma0 * model.sigma0 * d as f64).min(model.u_max),
        None if model.sigma0 > 0.0 => model.u_max,
        None => 0.0,
    })
}

/// One zero-mean normal draw with the given variance, keyed purely by
/// (seed, leader, worker, skill). Counter-based: no shared stream exists,
/// so any evaluation order sees the same noise.
pub fn perception_noise(
    seed: u64,
    leader: usize,
    worker: usize,
    skill: usize,
    variance: f64,
) -> f64 {
    if variance == 0.0 {
        return 0.0;
    }
    let key = mix_key(seed, leader as u64, worker as u64, skill as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    let z: f64 = StandardNormal.sample(&mut rng);
    z * variance.sqrt()
}

fn mix_key(seed: u64, a: u64, b: u64, c: u64) -> u64 {
    // SplitMix64 finalizer over the combined words.
    let mut x = seed
        .wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(c.wrapping_mul(0x94D0_49BB_1331_11EB));
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// The skills of every worker in the project's required skills as one
/// leader perceives them: true skill plus noise, clamped back into [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct PerceivedSkills {
    leader: usize,
    team_size: usize,
    /// Row-major N x |required| values aligned with the project's
    /// required-skill order.
    values: Vec<f64>,
}

impl PerceivedSkills {
    pub fn leader(&self) -> usize {
        self.leader
    }

    /// Perceived skill of `worker` in the required skill at `position`
    /// within the project's required-skill list.
    pub fn get(&self, worker: usize, position: usize) -> f64 {
        self.values[worker * self.team_size + position]
    }
}

/// Samples the full perceived-skill matrix for one leader. Deterministic
/// in (model.seed, leader); the leader's own row is exact.
pub fn perceived_skills(
    instance: &Instance,
    leader: usize,
    project: &ProjectSpec,
    model: &PerceptionModel,
) -> Result<PerceivedSkills, EfficiencyError> {
    model.validate()?;
    project.validate(instance.n_skills())?;
    if leader >= instance.n_workers() {
        return Err(EfficiencyError::WorkerOutOfRange {
            worker: leader,
            n_workers: instance.n_workers(),
        });
    }
    let k = project.team_size();
    let mut values = Vec::with_capacity(instance.n_workers() * k);
    for worker in 0..instance.n_workers() {
        let variance = uncertainty(instance, leader, worker, model)?;
        for &skill in &project.required_skills {
            let noise = perception_noise(model.seed, leader, worker, skill, variance);
            values.push((instance.skill(worker, skill) + noise).clamp(0.0, 1.0));
        }
    }
    Ok(PerceivedSkills {
        leader,
        team_size: k,
        values,
    })
}

/// The four normalized objective terms and their weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyBreakdown {
    pub skill_term: f64,
    pub uncertainty_term: f64,
    pub cost_term: f64,
    pub social_term: f64,
    pub total: f64,
}

impl EfficiencyBreakdown {
    /// Combines stored terms into the total. This is the single place the
    /// weighted combination is evaluated, so the stored total always equals
    /// the recombination of the stored terms exactly.
    pub fn from_terms(
        skill_term: f64,
        uncertainty_term: f64,
        cost_term: f64,
        social_term: f64,
        gamma: &[f64; 4],
    ) -> Self {
        let total = gamma[0] * skill_term - gamma[1] * uncertainty_term - gamma[2] * cost_term
            + gamma[3] * social_term;
        EfficiencyBreakdown {
            skill_term,
            uncertainty_term,
            cost_term,
            social_term,
            total,
        }
    }
}

/// Scores one candidate configuration with the perceived skills of its
/// leader.
///
/// Terms are averaged so each lies in [0, 1]: skill, uncertainty and cost
/// over the team size, the social term over the number of ordered distinct
/// team pairs (zero for a singleton team, which has no pairs). Summation
/// order is canonical — required skills in project order, team pairs in
/// ascending worker order — so storage order of the assignment never
/// affects the result.
pub fn team_efficiency(
    instance: &Instance,
    project: &ProjectSpec,
    config: &TeamConfig,
    perceived: &PerceivedSkills,
    model: &PerceptionModel,
) -> Result<EfficiencyBreakdown, EfficiencyError> {
    config.validate(project, instance.n_workers())?;
    if perceived.leader() != config.leader {
        return Err(EfficiencyError::LeaderMismatch {
            expected: perceived.leader(),
            found: config.leader,
        });
    }
    let k = project.team_size();
    let size = k as f64;

    let mut skill_sum = 0.0;
    let mut uncertainty_sum = 0.0;
    let mut cost_sum = 0.0;
    for (position, &skill) in project.required_skills.iter().enumerate() {
        let worker = config
            .worker_for(skill)
            .expect("validated config covers every required skill");
        skill_sum += perceived.get(worker, position);
        uncertainty_sum += uncertainty(instance, config.leader, worker, model)?;
        cost_sum += instance.cost(worker, skill);
    }

    let social_term = if k > 1 {
        let mut members: Vec<usize> = config.team().collect();
        members.sort_unstable();
        let mut social_sum = 0.0;
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                if i != j {
                    social_sum += instance.relationship(a, b);
                }
            }
        }
        social_sum / (size * (size - 1.0))
    } else {
        0.0
    };

    Ok(EfficiencyBreakdown::from_terms(
        skill_sum / size,
        uncertainty_sum / size,
        cost_sum / size,
        social_term,
        &project.gamma,
    ))
}

/// The skill term recomputed with true skills instead of perceived ones.
/// Used for reporting how good a chosen team actually is, as opposed to
/// how good its leader believed it was.
pub fn true_skill_term(
    instance: &Instance,
    project: &ProjectSpec,
    config: &TeamConfig,
) -> Result<f64, EfficiencyError> {
    config.validate(project, instance.n_workers())?;
    let sum: f64 = project
        .required_skills
        .iter()
        .map(|&skill| {
            let worker = config.worker_for(skill).expect("validated config");
            instance.skill(worker, skill)
        })
        .sum();
    Ok(sum / project.team_size() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GenParams;
    use approx::assert_abs_diff_eq;

    fn line_instance() -> Instance {
        // 0 - 1 - 2 - 3 path graph, deterministic skills/costs.
        let skills = vec![
            vec![0.9, 0.1],
            vec![0.5, 0.5],
            vec![0.2, 0.8],
            vec![0.7, 0.3],
        ];
        let costs = vec![
            vec![0.1, 0.2],
            vec![0.3, 0.4],
            vec![0.5, 0.6],
            vec![0.7, 0.8],
        ];
        let mut adj = vec![vec![false; 4]; 4];
        for (i, j) in [(0, 1), (1, 2), (2, 3)] {
            adj[i][j] = true;
            adj[j][i] = true;
        }
        Instance::from_parts(skills, costs, adj).unwrap()
    }

    #[test]
    fn uncertainty_zero_for_self() {
        let inst = line_instance();
        let model = PerceptionModel::default();
        assert_eq!(uncertainty(&inst, 1, 1, &model).unwrap(), 0.0);
    }

    #[test]
    fn uncertainty_one_hop_is_sigma_squared() {
        let inst = line_instance();
        let model = PerceptionModel::default();
        assert_abs_diff_eq!(
            uncertainty(&inst, 0, 1, &model).unwrap(),
            0.04,
            epsilon = 1e-15
        );
    }

    #[test]
    fn uncertainty_capped_when_unreachable() {
        // node 4 isolated
        let mut adj = vec![vec![false; 5]; 5];
        adj[0][1] = true;
        adj[1][0] = true;
        let inst = Instance::from_parts(vec![vec![0.5]; 5], vec![vec![0.5]; 5], adj).unwrap();
        let model = PerceptionModel::default();
        assert_eq!(uncertainty(&inst, 0, 4, &model).unwrap(), 1.0);
    }

    #[test]
    fn unreachable_workers_stay_exact_without_noise() {
        // sigma0 = 0 means the leader is exact about everyone, reachable
        // or not: the d -> infinity limit of min(u_max, 0 * d) is 0.
        let mut adj = vec![vec![false; 3]; 3];
        adj[0][1] = true;
        adj[1][0] = true;
        let inst = Instance::from_parts(vec![vec![0.5]; 3], vec![vec![0.5]; 3], adj).unwrap();
        let model = PerceptionModel {
            sigma0: 0.0,
            ..Default::default()
        };
        assert_eq!(uncertainty(&inst, 0, 2, &model).unwrap(), 0.0);
        let project = ProjectSpec::new(vec![0], [0.25; 4]).unwrap();
        let perceived = perceived_skills(&inst, 0, &project, &model).unwrap();
        assert_eq!(perceived.get(2, 0), inst.skill(2, 0));
    }

    #[test]
    fn uncertainty_index_out_of_range() {
        let inst = line_instance();
        let model = PerceptionModel::default();
        assert!(matches!(
            uncertainty(&inst, 0, 9, &model),
            Err(EfficiencyError::WorkerOutOfRange { worker: 9, .. })
        ));
    }

    #[test]
    fn zero_sigma_gives_exact_perception() {
        let inst = line_instance();
        let project = ProjectSpec::new(vec![0, 1], [0.25; 4]).unwrap();
        let model = PerceptionModel {
            sigma0: 0.0,
            ..Default::default()
        };
        let perceived = perceived_skills(&inst, 0, &project, &model).unwrap();
        for w in 0..4 {
            for (pos, &skill) in project.required_skills.iter().enumerate() {
                assert_eq!(perceived.get(w, pos), inst.skill(w, skill));
            }
        }
    }

    #[test]
    fn leader_perceives_own_skills_exactly() {
        let inst = line_instance();
        let project = ProjectSpec::new(vec![0, 1], [0.25; 4]).unwrap();
        let model = PerceptionModel {
            sigma0: 0.7,
            seed: 42,
            ..Default::default()
        };
        let perceived = perceived_skills(&inst, 2, &project, &model).unwrap();
        for (pos, &skill) in project.required_skills.iter().enumerate() {
            assert_eq!(perceived.get(2, pos), inst.skill(2, skill));
        }
    }

    #[test]
    fn noise_is_zero_mean() {
        // Mean of (perceived - true) over many re-seeds for a 1-hop
        // worker with mid-range skill, where clamping is symmetric.
        let mut adj = vec![vec![false; 2]; 2];
        adj[0][1] = true;
        adj[1][0] = true;
        let inst =
            Instance::from_parts(vec![vec![0.3], vec![0.5]], vec![vec![0.1]; 2], adj).unwrap();
        let project = ProjectSpec::new(vec![0], [0.25; 4]).unwrap();
        let n = 100_000;
        let mut sum = 0.0;
        for seed in 0..n {
            let model = PerceptionModel {
                seed,
                ..Default::default()
            };
            let perceived = perceived_skills(&inst, 0, &project, &model).unwrap();
            sum += perceived.get(1, 0) - inst.skill(1, 0);
        }
        let mean = sum / n as f64;
        assert!(mean.abs() < 0.005, "sample mean {mean} too far from 0");
    }

    #[test]
    fn noise_variance_matches_uncertainty() {
        // Sample variance over 1e5 independent keys should reproduce the
        // requested variance 0.04.
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|seed| perception_noise(seed, 0, 1, 0, 0.04))
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        assert!(
            (var - 0.04).abs() < 0.002,
            "sample variance {var} too far from 0.04"
        );
    }

    #[test]
    fn perception_is_deterministic_per_seed() {
        let inst = line_instance();
        let project = ProjectSpec::new(vec![1, 0], [0.25; 4]).unwrap();
        let model = PerceptionModel {
            seed: 7,
            ..Default::default()
        };
        let a = perceived_skills(&inst, 0, &project, &model).unwrap();
        let b = perceived_skills(&inst, 0, &project, &model).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn extremal_term_combinations() {
        // All-good terms with equal quarter weights.
        let best = EfficiencyBreakdown::from_terms(1.0, 0.0, 0.0, 1.0, &[0.25; 4]);
        assert_abs_diff_eq!(best.total, 0.5, epsilon = 1e-15);
        // All-bad terms.
        let worst = EfficiencyBreakdown::from_terms(0.0, 1.0, 1.0, 0.0, &[0.25; 4]);
        assert_abs_diff_eq!(worst.total, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn breakdown_total_recombines_exactly() {
        let gamma = [0.4, 0.3, 0.2, 0.1];
        let b = EfficiencyBreakdown::from_terms(0.3, 0.7, 0.2, 0.9, &gamma);
        let recombined =
            gamma[0] * b.skill_term - gamma[1] * b.uncertainty_term - gamma[2] * b.cost_term
                + gamma[3] * b.social_term;
        assert_eq!(b.total, recombined);
    }

    #[test]
    fn matches_direct_reimplementation() {
        // Independent term-by-term evaluation straight from the matrices.
        let inst = line_instance();
        let project = ProjectSpec::new(vec![0, 1], [0.3, 0.2, 0.4, 0.1]).unwrap();
        let model = PerceptionModel {
            sigma0: 0.25,
            seed: 11,
            ..Default::default()
        };
        let leader = 1;
        let config = TeamConfig::new(leader, [(0, 1), (1, 2)]);
        let perceived = perceived_skills(&inst, leader, &project, &model).unwrap();
        let got = team_efficiency(&inst, &project, &config, &perceived, &model).unwrap();

        let s_hat = |worker: usize, skill: usize| {
            let d = inst.hop(leader, worker).map(|d| d as f64);
            let var = match d {
                Some(0.0) => 0.0,
                Some(d) => (model.sigma0 * model.sigma0 * d).min(model.u_max),
                None if model.sigma0 > 0.0 => model.u_max,
                None => 0.0,
            };
            (inst.skill(worker, skill) + perception_noise(model.seed, leader, worker, skill, var))
                .clamp(0.0, 1.0)
        };
        let skill = (s_hat(1, 0) + s_hat(2, 1)) / 2.0;
        let unc = (0.0 + 0.0625) / 2.0; // d(1,1)=0, d(1,2)=1 at sigma 0.25
        let cost = (inst.cost(1, 0) + inst.cost(2, 1)) / 2.0;
        let social = (inst.relationship(1, 2) + inst.relationship(2, 1)) / 2.0;
        let expected = 0.3 * skill - 0.2 * unc - 0.4 * cost + 0.1 * social;
        assert_abs_diff_eq!(got.total, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(got.skill_term, skill, epsilon = 1e-12);
        assert_abs_diff_eq!(got.uncertainty_term, unc, epsilon = 1e-12);
        assert_abs_diff_eq!(got.cost_term, cost, epsilon = 1e-12);
        assert_abs_diff_eq!(got.social_term, social, epsilon = 1e-12);
    }

    #[test]
    fn singleton_team_has_zero_social_term() {
        let inst = line_instance();
        let project = ProjectSpec::new(vec![1], [0.25; 4]).unwrap();
        let model = PerceptionModel::default();
        let config = TeamConfig::new(3, [(1, 3)]);
        let perceived = perceived_skills(&inst, 3, &project, &model).unwrap();
        let b = team_efficiency(&inst, &project, &config, &perceived, &model).unwrap();
        assert_eq!(b.social_term, 0.0);
    }

    #[test]
    fn invalid_configs_name_the_clause() {
        let inst = line_instance();
        let project = ProjectSpec::new(vec![0, 1], [0.25; 4]).unwrap();
        let model = PerceptionModel::default();
        let perceived = perceived_skills(&inst, 0, &project, &model).unwrap();

        let dup = TeamConfig::new(0, [(0, 0), (1, 0)]);
        assert!(matches!(
            team_efficiency(&inst, &project, &dup, &perceived, &model),
            Err(EfficiencyError::InvalidConfig(
                ConfigViolation::WorkerAssignedTwice(0)
            ))
        ));

        let no_leader = TeamConfig::new(0, [(0, 1), (1, 2)]);
        assert!(matches!(
            team_efficiency(&inst, &project, &no_leader, &perceived, &model),
            Err(EfficiencyError::InvalidConfig(
                ConfigViolation::LeaderNotInTeam(0)
            ))
        ));

        let missing = TeamConfig::new(0, [(0, 0)]);
        assert!(matches!(
            team_efficiency(&inst, &project, &missing, &perceived, &model),
            Err(EfficiencyError::InvalidConfig(
                ConfigViolation::WrongSize { .. }
            ))
        ));
    }

    #[test]
    fn pair_order_never_changes_terms() {
        let inst = Instance::generate(&GenParams {
            n_workers: 6,
            n_skills: 4,
            edge_probability: 0.5,
            seed: 5,
        })
        .unwrap();
        let project = ProjectSpec::new(vec![2, 0, 3], [0.25; 4]).unwrap();
        let model = PerceptionModel {
            seed: 9,
            ..Default::default()
        };
        let perceived = perceived_skills(&inst, 4, &project, &model).unwrap();
        let a = TeamConfig::new(4, [(2, 4), (0, 1), (3, 5)]);
        let b = TeamConfig::new(4, [(3, 5), (2, 4), (0, 1)]);
        assert_eq!(a, b);
        let ea = team_efficiency(&inst, &project, &a, &perceived, &model).unwrap();
        let eb = team_efficiency(&inst, &project, &b, &perceived, &model).unwrap();
        assert_eq!(ea, eb);
    }

    mod properties {
        use super::*;
        use crate::solvers::enumerate_configurations;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn total_is_linear_in_each_weight(
                seed in any::<u64>(),
                base in proptest::array::uniform4(0.0f64..2.0),
                bump in 0.0f64..3.0,
                component in 0usize..4,
            ) {
                let inst = Instance::generate(&GenParams {
                    n_workers: 5,
                    n_skills: 3,
                    edge_probability: 0.5,
                    seed,
                }).unwrap();
                let mut shifted = base;
                shifted[component] += bump;
                let p0 = ProjectSpec::new(vec![0, 2], base).unwrap();
                let p1 = ProjectSpec::new(vec![0, 2], shifted).unwrap();
                let model = PerceptionModel { seed, ..Default::default() };
                let config = TeamConfig::new(1, [(0, 1), (2, 3)]);
                let perceived = perceived_skills(&inst, 1, &p0, &model).unwrap();
                let a = team_efficiency(&inst, &p0, &config, &perceived, &model).unwrap();
                let b = team_efficiency(&inst, &p1, &config, &perceived, &model).unwrap();
                let sign = if component == 1 || component == 2 { -1.0 } else { 1.0 };
                let term = [a.skill_term, a.uncertainty_term, a.cost_term, a.social_term][component];
                prop_assert!((b.total - a.total - sign * bump * term).abs() < 1e-12);
            }

            #[test]
            fn skill_only_objective_reduces_to_skill_argmax(seed in any::<u64>()) {
                // With gamma = (1,0,0,0) and no noise, the best config by
                // efficiency is the best config by raw skill sum.
                let inst = Instance::generate(&GenParams {
                    n_workers: 5,
                    n_skills: 3,
                    edge_probability: 0.4,
                    seed,
                }).unwrap();
                let project = ProjectSpec::new(vec![0, 1], [1.0, 0.0, 0.0, 0.0]).unwrap();
                let model = PerceptionModel { sigma0: 0.0, seed, ..Default::default() };

                let mut best_te = f64::NEG_INFINITY;
                let mut best_te_config = None;
                let mut best_sum = f64::NEG_INFINITY;
                for config in enumerate_configurations(&inst, &project).unwrap() {
                    let perceived =
                        perceived_skills(&inst, config.leader, &project, &model).unwrap();
                    let te = team_efficiency(&inst, &project, &config, &perceived, &model)
                        .unwrap()
                        .total;
                    let sum: f64 = project.required_skills.iter()
                        .map(|&s| inst.skill(config.worker_for(s).unwrap(), s))
                        .sum();
                    if te > best_te {
                        best_te = te;
                        best_te_config = Some(config);
                    }
                    best_sum = best_sum.max(sum);
                }
                let chosen = best_te_config.unwrap();
                let chosen_sum: f64 = project.required_skills.iter()
                    .map(|&s| inst.skill(chosen.worker_for(s).unwrap(), s))
                    .sum();
                prop_assert!((chosen_sum - best_sum).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn social_term_depends_only_on_team_set() {
        let inst = line_instance();
        let project = ProjectSpec::new(vec![0, 1], [0.25; 4]).unwrap();
        let model = PerceptionModel {
            sigma0: 0.3,
            seed: 21,
            ..Default::default()
        };
        let perceived = perceived_skills(&inst, 1, &project, &model).unwrap();
        let ab = TeamConfig::new(1, [(0, 1), (1, 2)]);
        let ba = TeamConfig::new(1, [(0, 2), (1, 1)]);
        let ea = team_efficiency(&inst, &project, &ab, &perceived, &model).unwrap();
        let eb = team_efficiency(&inst, &project, &ba, &perceived, &model).unwrap();
        assert_eq!(ea.social_term, eb.social_term);
        assert_eq!(ea.uncertainty_term, eb.uncertainty_term);
    }
}
