//! Worker pool model: skill and cost matrices, the social graph, and the
//! derived hop/relationship matrices.
//!
//! An [`Instance`] is immutable after construction and safe to share
//! read-only across threads. The hop and relationship matrices are always
//! derived from the adjacency matrix, never stored independently, so a
//! loaded instance cannot drift out of sync with its graph.

use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hop distance between two workers: `Some(d)` is the minimum number of
/// edges on any path, `None` means no path exists.
pub type HopCount = Option<u32>;

/// Parameters for synthetic instance generation.
///
/// Skills and costs are drawn i.i.d. uniform on \[0, 1\]; the social graph is
/// Erdős–Rényi G(N, p). The same seed always reproduces the same instance
/// bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n_workers: usize,
    pub n_skills: usize,
    /// Probability of each undirected edge being present.
    pub edge_probability: f64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n_workers: 14,
            n_skills: 5,
            edge_probability: 0.3,
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_workers < 1 {
            return Err(ModelError::EmptyPool("n_workers"));
        }
        if self.n_skills < 1 {
            return Err(ModelError::EmptyPool("n_skills"));
        }
        if !(0.0..=1.0).contains(&self.edge_probability) {
            return Err(ModelError::ProbabilityOutOfRange(self.edge_probability));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{0} must be at least 1")]
    EmptyPool(&'static str),
    #[error("edge probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("adjacency matrix is not square: row {row} has {found} entries, expected {expected}")]
    AdjacencyNotSquare {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("adjacency matrix not symmetric at ({i}, {j})")]
    AdjacencyNotSymmetric { i: usize, j: usize },
    #[error("adjacency matrix has a self-loop at {0}")]
    AdjacencySelfLoop(usize),
    #[error("hop matrix invalid at ({i}, {j}): {reason}")]
    HopMatrixInvalid { i: usize, j: usize, reason: String },
    #[error("instance validation failed:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

/// One violated [`Instance`] invariant. Validation collects every
/// violation instead of stopping at the first.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("skills[{worker}][{skill}] = {value} outside [0, 1]")]
    SkillOutOfRange {
        worker: usize,
        skill: usize,
        value: f64,
    },
    #[error("costs[{worker}][{skill}] = {value} outside [0, 1]")]
    CostOutOfRange {
        worker: usize,
        skill: usize,
        value: f64,
    },
    #[error("{matrix} has wrong shape: expected {expected} rows/cols, row {row} has {found}")]
    ShapeMismatch {
        matrix: &'static str,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("adjacency not symmetric at ({i}, {j})")]
    AdjacencyNotSymmetric { i: usize, j: usize },
    #[error("adjacency diagonal entry {0} must be false")]
    AdjacencySelfLoop(usize),
    #[error("hops[{i}][{j}] = {found:?} but recomputed BFS distance is {expected:?}")]
    HopMismatch {
        i: usize,
        j: usize,
        found: HopCount,
        expected: HopCount,
    },
    #[error("relationship[{i}][{j}] = {found} but value derived from hops is {expected}")]
    RelationshipMismatch {
        i: usize,
        j: usize,
        found: f64,
        expected: f64,
    },
    #[error("relationship not symmetric at ({i}, {j}): {a} vs {b}")]
    RelationshipNotSymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("edge ({i}, {j}) out of range for {n} workers")]
    EdgeOutOfRange { i: usize, j: usize, n: usize },
    #[error("edge ({0}, {0}) is a self-loop")]
    EdgeSelfLoop(usize),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// The worker pool: true skills, requested costs, and the social graph
/// with its derived hop and relationship matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n_workers: usize,
    n_skills: usize,
    skills: Vec<Vec<f64>>,
    costs: Vec<Vec<f64>>,
    adjacency: Vec<Vec<bool>>,
    hops: Vec<Vec<HopCount>>,
    relationship: Vec<Vec<f64>>,
}

impl Instance {
    /// Builds an instance from raw matrices, deriving hops and
    /// relationships from the adjacency matrix. Returns every violated
    /// invariant if the inputs are inconsistent.
    pub fn from_parts(
        skills: Vec<Vec<f64>>,
        costs: Vec<Vec<f64>>,
        adjacency: Vec<Vec<bool>>,
    ) -> Result<Self, ModelError> {
        let n_workers = skills.len();
        let n_skills = skills.first().map_or(0, Vec::len);
        let mut violations = validate_entry_matrices(&skills, &costs, n_workers, n_skills);
        violations.extend(validate_adjacency(&adjacency, n_workers));
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        if n_workers < 1 {
            return Err(ModelError::EmptyPool("n_workers"));
        }
        if n_skills < 1 {
            return Err(ModelError::EmptyPool("n_skills"));
        }
        let hops = shortest_hop_matrix(&adjacency)?;
        let relationship = relationship_matrix(&hops)?;
        Ok(Instance {
            n_workers,
            n_skills,
            skills,
            costs,
            adjacency,
            hops,
            relationship,
        })
    }

    /// Draws a synthetic instance: uniform skills and costs, Erdős–Rényi
    /// edges. Deterministic in `params.seed`.
    pub fn generate(params: &GenParams) -> Result<Self, ModelError> {
        params.validate()?;
        let n = params.n_workers;
        let m = params.n_skills;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        // Draw order is part of the determinism contract: skills row by
        // row, then costs, then edges in (i, j) order with i < j.
        let skills: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.random::<f64>()).collect())
            .collect();
        let costs: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.random::<f64>()).collect())
            .collect();
        let mut adjacency = vec![vec![false; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < params.edge_probability {
                    adjacency[i][j] = true;
                    adjacency[j][i] = true;
                }
            }
        }
        Instance::from_parts(skills, costs, adjacency)
    }

    pub fn n_workers(&self) -> usize {
        self.n_workers
    }

    pub fn n_skills(&self) -> usize {
        self.n_skills
    }

    /// True expertise of `worker` in `skill`, in [0, 1].
    pub fn skill(&self, worker: usize, skill: usize) -> f64 {
        self.skills[worker][skill]
    }

    /// Cost requested by `worker` to provide `skill`, in [0, 1].
    pub fn cost(&self, worker: usize, skill: usize) -> f64 {
        self.costs[worker][skill]
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    /// Shortest-path edge count between two workers.
    pub fn hop(&self, i: usize, j: usize) -> HopCount {
        self.hops[i][j]
    }

    /// Social relationship weight in [0, 1]: 1 for directly connected
    /// pairs, decreasing with distance, 0 for disconnected pairs.
    pub fn relationship(&self, i: usize, j: usize) -> f64 {
        self.relationship[i][j]
    }

    /// Re-checks every invariant, returning all violations.
    pub fn validate(&self) -> Vec<Violation> {
        validate_matrices(
            &self.skills,
            &self.costs,
            &self.adjacency,
            Some(&self.hops),
            Some(&self.relationship),
        )
    }

    /// Canonical serializable form: edges sorted with i < j, derived
    /// matrices omitted.
    pub fn to_file(&self) -> InstanceFile {
        let mut edges = Vec::new();
        for i in 0..self.n_workers {
            for j in (i + 1)..self.n_workers {
                if self.adjacency[i][j] {
                    edges.push((i, j));
                }
            }
        }
        InstanceFile {
            n_workers: self.n_workers,
            n_skills: self.n_skills,
            skills: self.skills.clone(),
            costs: self.costs.clone(),
            edges,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
            ModelError::Invalid(vec![Violation::ShapeMismatch {
                matrix: "json",
                row: e.line(),
                expected: 0,
                found: e.column(),
            }])
        })?;
        file.into_instance()
    }
}

/// On-disk instance document. Hops and relationships are derived on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n_workers: usize,
    pub n_skills: usize,
    pub skills: Vec<Vec<f64>>,
    pub costs: Vec<Vec<f64>>,
    pub edges: Vec<(usize, usize)>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance, ModelError> {
        let mut violations = Vec::new();
        if self.skills.len() != self.n_workers {
            violations.push(Violation::ShapeMismatch {
                matrix: "skills",
                row: 0,
                expected: self.n_workers,
                found: self.skills.len(),
            });
        }
        if self.costs.len() != self.n_workers {
            violations.push(Violation::ShapeMismatch {
                matrix: "costs",
                row: 0,
                expected: self.n_workers,
                found: self.costs.len(),
            });
        }
        for row in self.skills.iter().chain(self.costs.iter()) {
            if row.len() != self.n_skills {
                violations.push(Violation::ShapeMismatch {
                    matrix: "skills/costs",
                    row: 0,
                    expected: self.n_skills,
                    found: row.len(),
                });
                break;
            }
        }
        let mut adjacency = vec![vec![false; self.n_workers]; self.n_workers];
        for &(i, j) in &self.edges {
            if i >= self.n_workers || j >= self.n_workers {
                violations.push(Violation::EdgeOutOfRange {
                    i,
                    j,
                    n: self.n_workers,
                });
                continue;
            }
            if i == j {
                violations.push(Violation::EdgeSelfLoop(i));
                continue;
            }
            adjacency[i][j] = true;
            adjacency[j][i] = true;
        }
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        Instance::from_parts(self.skills, self.costs, adjacency)
    }
}

/// All-pairs shortest hop counts by breadth-first search from every node.
///
/// Entry (i, j) is the minimum number of edges on any path from i to j,
/// `Some(0)` on the diagonal and `None` when no path exists.
pub fn shortest_hop_matrix(adjacency: &[Vec<bool>]) -> Result<Vec<Vec<HopCount>>, ModelError> {
    let n = adjacency.len();
    for (i, row) in adjacency.iter().enumerate() {
        if row.len() != n {
            return Err(ModelError::AdjacencyNotSquare {
                row: i,
                found: row.len(),
                expected: n,
            });
        }
        if row[i] {
            return Err(ModelError::AdjacencySelfLoop(i));
        }
        for j in 0..n {
            if adjacency[i][j] != adjacency[j][i] {
                return Err(ModelError::AdjacencyNotSymmetric { i, j });
            }
        }
    }

    let mut hops = vec![vec![None; n]; n];
    let mut queue = VecDeque::new();
    for source in 0..n {
        let dist = &mut hops[source];
        dist[source] = Some(0);
        queue.clear();
        queue.push_back(source);
        while let Some(node) = queue.pop_front() {
            let next = dist[node].expect("queued nodes have a distance") + 1;
            for (neighbor, &connected) in adjacency[node].iter().enumerate() {
                if connected && dist[neighbor].is_none() {
                    dist[neighbor] = Some(next);
                    queue.push_back(neighbor);
                }
            }
        }
    }
    Ok(hops)
}

/// Social relationship weights derived from hop counts.
///
/// R(i, j) = 1/d(i, j) for reachable pairs, so directly connected workers
/// get weight 1 and the weight falls off with distance; disconnected pairs
/// get exactly 0. The diagonal is 1 by convention and is never read by the
/// efficiency metric, which sums over distinct pairs only.
pub fn relationship_matrix(hops: &[Vec<HopCount>]) -> Result<Vec<Vec<f64>>, ModelError> {
    let n = hops.len();
    for (i, row) in hops.iter().enumerate() {
        if row.len() != n {
            return Err(ModelError::HopMatrixInvalid {
                i,
                j: row.len(),
                reason: "row length differs from matrix size".into(),
            });
        }
        if row[i] != Some(0) {
            return Err(ModelError::HopMatrixInvalid {
                i,
                j: i,
                reason: format!("diagonal entry is {:?}, expected Some(0)", row[i]),
            });
        }
        for (j, &d) in row.iter().enumerate() {
            if i != j && d == Some(0) {
                return Err(ModelError::HopMatrixInvalid {
                    i,
                    j,
                    reason: "off-diagonal distance of 0".into(),
                });
            }
        }
    }

    let mut rel = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            rel[i][j] = match hops[i][j] {
                _ if i == j => 1.0,
                Some(d) => 1.0 / d as f64,
                None => 0.0,
            };
        }
    }
    Ok(rel)
}

fn validate_entry_matrices(
    skills: &[Vec<f64>],
    costs: &[Vec<f64>],
    n_workers: usize,
    n_skills: usize,
) -> Vec<Violation> {
    let mut violations = Vec::new();
    let check = |matrix: &[Vec<f64>], name: &'static str, out: &mut Vec<Violation>| {
        if matrix.len() != n_workers {
            out.push(Violation::ShapeMismatch {
                matrix: name,
                row: 0,
                expected: n_workers,
                found: matrix.len(),
            });
            return;
        }
        for (w, row) in matrix.iter().enumerate() {
            if row.len() != n_skills {
                out.push(Violation::ShapeMismatch {
                    matrix: name,
                    row: w,
                    expected: n_skills,
                    found: row.len(),
                });
                continue;
            }
            for (s, &value) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    out.push(match name {
                        "skills" => Violation::SkillOutOfRange {
                            worker: w,
                            skill: s,
                            value,
                        },
                        _ => Violation::CostOutOfRange {
                            worker: w,
                            skill: s,
                            value,
                        },
                    });
                }
            }
        }
    };
    check(skills, "skills", &mut violations);
    check(costs, "costs", &mut violations);
    violations
}

fn validate_adjacency(adjacency: &[Vec<bool>], n_workers: usize) -> Vec<Violation> {
    let mut violations = Vec::new();
    if adjacency.len() != n_workers {
        violations.push(Violation::ShapeMismatch {
            matrix: "adjacency",
            row: 0,
            expected: n_workers,
            found: adjacency.len(),
        });
        return violations;
    }
    for (i, row) in adjacency.iter().enumerate() {
        if row.len() != n_workers {
            violations.push(Violation::ShapeMismatch {
                matrix: "adjacency",
                row: i,
                expected: n_workers,
                found: row.len(),
            });
            continue;
        }
        if row[i] {
            violations.push(Violation::AdjacencySelfLoop(i));
        }
        for j in (i + 1)..n_workers {
            if adjacency[i][j] != adjacency[j][i] {
                violations.push(Violation::AdjacencyNotSymmetric { i, j });
            }
        }
    }
    violations
}

/// Checks every instance invariant over raw matrices and reports all
/// violations: entry ranges, adjacency symmetry, and (when given) the
/// consistency of stored hop/relationship matrices against recomputation.
pub fn validate_matrices(
    skills: &[Vec<f64>],
    costs: &[Vec<f64>],
    adjacency: &[Vec<bool>],
    hops: Option<&[Vec<HopCount>]>,
    relationship: Option<&[Vec<f64>]>,
) -> Vec<Violation> {
    let n_workers = skills.len();
    let n_skills = skills.first().map_or(0, Vec::len);
    let mut violations = validate_entry_matrices(skills, costs, n_workers, n_skills);
    violations.extend(validate_adjacency(adjacency, n_workers));
    if !violations.is_empty() {
        return violations;
    }

    let derived_hops = shortest_hop_matrix(adjacency).expect("adjacency already validated");
    if let Some(stored) = hops {
        for i in 0..n_workers {
            for j in 0..n_workers {
                if stored[i][j] != derived_hops[i][j] {
                    violations.push(Violation::HopMismatch {
                        i,
                        j,
                        found: stored[i][j],
                        expected: derived_hops[i][j],
                    });
                }
            }
        }
    }
    if let Some(stored) = relationship {
        let derived =
            relationship_matrix(&derived_hops).expect("derived hop matrix is well-formed");
        for i in 0..n_workers {
            for j in 0..n_workers {
                if stored[i][j] != stored[j][i] {
                    violations.push(Violation::RelationshipNotSymmetric {
                        i,
                        j,
                        a: stored[i][j],
                        b: stored[j][i],
                    });
                } else if stored[i][j] != derived[i][j] {
                    violations.push(Violation::RelationshipMismatch {
                        i,
                        j,
                        found: stored[i][j],
                        expected: derived[i][j],
                    });
                }
            }
        }
    }
    violations
}
