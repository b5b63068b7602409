//! Combination matrices, weak-graph block structure and the spectral objects
//! derived from it.
//!
//! A combination matrix `A` is left-stochastic: entry `(l, k)` is the weight
//! agent `k` applies to data arriving from agent `l`, so every column sums to
//! one and the zero pattern is the directed graph (`l -> k` iff `a_lk > 0`).
//!
//! After classification the agents are reordered so that `A` becomes block
//! upper-triangular:
//!
//! ```text
//!         [ T_SS  T_SR ]
//!   A  =  [  0    T_RR ]
//! ```
//!
//! where `T_SS` is block-diagonal over the sending sub-networks and `T_RR`
//! collects the receiving sub-networks. Everything downstream (influence
//! matrix, limiting power, confinement matrix) is expressed in that canonical
//! order; helpers on [`NetworkPartition`] map back to the original labels.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

/// Absolute tolerance on column sums when ingesting a matrix.
pub const COLUMN_SUM_TOL: f64 = 1e-9;
/// Columns further than this from one are rescaled on ingestion.
pub const RENORMALIZE_TOL: f64 = 1e-12;
/// Default residual tolerance for power iteration.
pub const PERRON_TOL: f64 = 1e-12;
/// Iteration cap for power iteration.
pub const PERRON_MAX_ITERS: usize = 100_000;
/// `(I - T_RR)` is treated as singular once `rho(T_RR) > 1 - SINGULAR_MARGIN`.
pub const SINGULAR_MARGIN: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("matrix is empty")]
    Empty,

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("entry ({}, {}) is not finite", .row + 1, .col + 1)]
    NonFinite { row: usize, col: usize },

    #[error("entry ({}, {}) is negative: {value}", .row + 1, .col + 1)]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("column {} sums to {sum}, expected 1", .col + 1)]
    ColumnSumMismatch { col: usize, sum: f64 },

    #[error("expected {expected} agent labels, got {got}")]
    LabelCount { expected: usize, got: usize },

    #[error("network is not weakly structured: {0}")]
    NotWeaklyStructured(String),

    #[error("network has no sending sub-network")]
    NoSendingSubnetwork,

    #[error("power iteration did not converge in {max_iters} iterations")]
    NoConvergence { max_iters: usize },

    #[error("block is not irreducible")]
    NotIrreducible,

    #[error("I - T_RR is singular or nearly so (spectral radius {spectral_radius})")]
    SingularSystem { spectral_radius: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, GraphError>;

/// Validated left-stochastic combination matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationMatrix {
    weights: DMatrix<f64>,
    labels: Vec<String>,
}

impl CombinationMatrix {
    /// Validates `weights` and rescales columns whose sum is off by more than
    /// [`RENORMALIZE_TOL`].
    ///
    /// Labels default to `1..=n`.
    pub fn new(weights: DMatrix<f64>) -> Result<Self> {
        let labels = (1..=weights.ncols()).map(|k| k.to_string()).collect();
        Self::with_labels(weights, labels)
    }

    pub fn with_labels(mut weights: DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        let (rows, cols) = weights.shape();
        if rows == 0 && cols == 0 {
            return Err(GraphError::Empty);
        }
        if rows != cols {
            return Err(GraphError::NonSquare { rows, cols });
        }
        if labels.len() != cols {
            return Err(GraphError::LabelCount {
                expected: cols,
                got: labels.len(),
            });
        }
        for col in 0..cols {
            for row in 0..rows {
                let value = weights[(row, col)];
                if !value.is_finite() {
                    return Err(GraphError::NonFinite { row, col });
                }
                if value < 0.0 {
                    return Err(GraphError::NegativeEntry { row, col, value });
                }
            }
            let sum: f64 = weights.column(col).iter().sum();
            if (sum - 1.0).abs() > COLUMN_SUM_TOL {
                return Err(GraphError::ColumnSumMismatch { col, sum });
            }
            if (sum - 1.0).abs() > RENORMALIZE_TOL {
                weights.column_mut(col).iter_mut().for_each(|w| *w /= sum);
            }
        }
        Ok(Self { weights, labels })
    }

    /// Builds a matrix from row-major rows, `rows[l][k] = a_lk`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        for row in rows {
            if row.len() != n {
                return Err(GraphError::NonSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |l, k| rows[l][k]))
    }

    pub fn n_agents(&self) -> usize {
        self.weights.ncols()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Weight agent `k` applies to data from agent `l`.
    #[inline]
    pub fn weight(&self, l: usize, k: usize) -> f64 {
        self.weights[(l, k)]
    }

    /// Agents `l` with `a_lk > 0`, including `k` itself when it has a self-loop.
    pub fn neighbors(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_agents()).filter(move |&l| self.weights[(l, k)] > 0.0)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_agents())
            .map(|l| self.weights.row(l).iter().copied().collect())
            .collect()
    }
}

/// Successor lists of the pattern of `m`: `l -> k` whenever `m[(l, k)] > 0`.
fn successors(m: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    (0..n)
        .map(|l| (0..n).filter(|&k| m[(l, k)] > 0.0).collect())
        .collect()
}

/// Tarjan's algorithm, iterative. Returns the component id of every node.
fn tarjan(succ: &[Vec<usize>]) -> (Vec<usize>, usize) {
    const UNVISITED: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNVISITED; n];
    let mut n_comp = 0;
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        // (node, next successor position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp[w] = n_comp;
                    if w == v {
                        break;
                    }
                }
                n_comp += 1;
            }
        }
    }
    (comp, n_comp)
}

/// Strongly connected components of the pattern of `m`, each sorted, listed
/// in a topological order of the condensation. Among components that are
/// ready at the same time the one holding the smallest agent index goes first.
fn components_of(m: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let succ = successors(m);
    let (comp, n_comp) = tarjan(&succ);

    let mut members = vec![Vec::new(); n_comp];
    for (v, &c) in comp.iter().enumerate() {
        members[c].push(v);
    }
    let mut indegree = vec![0usize; n_comp];
    let mut dag = vec![Vec::new(); n_comp];
    for (v, targets) in succ.iter().enumerate() {
        for &w in targets {
            let (cv, cw) = (comp[v], comp[w]);
            if cv != cw && !dag[cv].contains(&cw) {
                dag[cv].push(cw);
                indegree[cw] += 1;
            }
        }
    }

    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..n_comp)
        .filter(|&c| indegree[c] == 0)
        .map(|c| Reverse((members[c][0], c)))
        .collect();
    let mut out = Vec::with_capacity(n_comp);
    while let Some(Reverse((_, c))) = ready.pop() {
        for &d in &dag[c] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.push(Reverse((members[d][0], d)));
            }
        }
        out.push(std::mem::take(&mut members[c]));
    }
    out
}

/// Strongly connected components of the communication graph, in topological
/// order of the condensation (components without external in-edges first).
pub fn strongly_connected_components(matrix: &CombinationMatrix) -> Vec<Vec<usize>> {
    components_of(&matrix.weights)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period of the strongly connected sub-graph spanned by `block`.
fn period(m: &DMatrix<f64>, block: &[usize]) -> usize {
    let mut level = vec![usize::MAX; block.len()];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut g = 0;
    while let Some(i) = queue.pop_front() {
        for (j, &w) in block.iter().enumerate() {
            if m[(block[i], w)] <= 0.0 {
                continue;
            }
            if level[j] == usize::MAX {
                level[j] = level[i] + 1;
                queue.push_back(j);
            } else {
                g = gcd(g, (level[i] + 1).abs_diff(level[j]));
            }
        }
    }
    g
}

/// Extracts the sub-matrix with the given row and column agent indices.
pub fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Classified weak-graph structure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkPartition {
    sending: Vec<Vec<usize>>,
    receiving: Vec<Vec<usize>>,
    /// `order[canonical] = original`.
    order: Vec<usize>,
    /// `position[original] = canonical`.
    position: Vec<usize>,
    #[serde(skip)]
    t_ss: DMatrix<f64>,
    #[serde(skip)]
    t_sr: DMatrix<f64>,
    #[serde(skip)]
    t_rr: DMatrix<f64>,
    receiving_radii: Vec<f64>,
    warnings: Vec<String>,
}

/// Which kind of sub-network an agent belongs to, with the block index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockRef {
    Sending(usize),
    Receiving(usize),
}

/// Splits the network into sending and receiving sub-networks and computes
/// the canonical block-triangular ordering.
pub fn classify(matrix: &CombinationMatrix) -> Result<NetworkPartition> {
    let a = matrix.weights();
    let n = matrix.n_agents();
    let components = strongly_connected_components(matrix);

    let mut sending = Vec::new();
    let mut receiving = Vec::new();
    let mut receiving_radii = Vec::new();
    let mut warnings = Vec::new();

    for block in components {
        let closed = block
            .iter()
            .all(|&k| (0..n).all(|l| block.contains(&l) || a[(l, k)] == 0.0));
        if closed {
            let self_loop = block.iter().any(|&k| a[(k, k)] > 0.0);
            if !self_loop && period(a, &block) != 1 {
                return Err(GraphError::NotWeaklyStructured(format!(
                    "closed sub-network {} is periodic",
                    display_block(&block)
                )));
            }
            sending.push(block);
        } else {
            let sub = submatrix(a, &block, &block);
            let rho = spectral_radius(&sub, PERRON_TOL)?;
            if rho > 1.0 - SINGULAR_MARGIN {
                return Err(GraphError::NotWeaklyStructured(format!(
                    "receiving sub-network {} has spectral radius {rho}",
                    display_block(&block)
                )));
            }
            if block.len() == 1 && a[(block[0], block[0])] == 0.0 {
                warnings.push(format!(
                    "receiving agent {} has no self-loop and forms a trivial block",
                    block[0] + 1
                ));
            }
            receiving.push(block);
            receiving_radii.push(rho);
        }
    }
    if sending.is_empty() {
        return Err(GraphError::NoSendingSubnetwork);
    }
    sending.sort_by_key(|b| b[0]);

    let order: Vec<usize> = sending
        .iter()
        .chain(receiving.iter())
        .flatten()
        .copied()
        .collect();
    let mut position = vec![0; n];
    for (canonical, &original) in order.iter().enumerate() {
        position[original] = canonical;
    }
    let s_idx: Vec<usize> = sending.iter().flatten().copied().collect();
    let r_idx: Vec<usize> = receiving.iter().flatten().copied().collect();

    Ok(NetworkPartition {
        t_ss: submatrix(a, &s_idx, &s_idx),
        t_sr: submatrix(a, &s_idx, &r_idx),
        t_rr: submatrix(a, &r_idx, &r_idx),
        sending,
        receiving,
        order,
        position,
        receiving_radii,
        warnings,
    })
}

fn display_block(block: &[usize]) -> String {
    let inner: Vec<String> = block.iter().map(|k| (k + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

impl NetworkPartition {
    pub fn sending_blocks(&self) -> &[Vec<usize>] {
        &self.sending
    }

    pub fn receiving_blocks(&self) -> &[Vec<usize>] {
        &self.receiving
    }

    /// Canonical order: `order()[canonical] = original`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, agent: usize) -> usize {
        self.position[agent]
    }

    pub fn is_identity_permutation(&self) -> bool {
        self.order.iter().enumerate().all(|(i, &o)| i == o)
    }

    pub fn t_ss(&self) -> &DMatrix<f64> {
        &self.t_ss
    }

    pub fn t_sr(&self) -> &DMatrix<f64> {
        &self.t_sr
    }

    pub fn t_rr(&self) -> &DMatrix<f64> {
        &self.t_rr
    }

    pub fn receiving_radii(&self) -> &[f64] {
        &self.receiving_radii
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `N_gS`.
    pub fn n_sending(&self) -> usize {
        self.t_ss.nrows()
    }

    /// `N_gR`.
    pub fn n_receiving(&self) -> usize {
        self.t_rr.nrows()
    }

    pub fn subnet_sizes(&self) -> Vec<usize> {
        self.sending
            .iter()
            .chain(&self.receiving)
            .map(Vec::len)
            .collect()
    }

    /// Sending agents in canonical order.
    pub fn sending_agents(&self) -> &[usize] {
        &self.order[..self.n_sending()]
    }

    /// Receiving agents in canonical order.
    pub fn receiving_agents(&self) -> &[usize] {
        &self.order[self.n_sending()..]
    }

    pub fn block_of(&self, agent: usize) -> BlockRef {
        if let Some(s) = self.sending.iter().position(|b| b.contains(&agent)) {
            return BlockRef::Sending(s);
        }
        let r = self
            .receiving
            .iter()
            .position(|b| b.contains(&agent))
            .expect("agent belongs to some block");
        BlockRef::Receiving(r)
    }

    /// Reorders an `N x N` matrix given in original agent order into
    /// canonical order.
    pub fn permute(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        submatrix(m, &self.order, &self.order)
    }

    /// Inverse of [`permute`](Self::permute).
    pub fn unpermute(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.order.len();
        DMatrix::from_fn(n, n, |i, j| m[(self.position[i], self.position[j])])
    }
}

/// Dominant eigenpair of a non-negative irreducible block.
#[derive(Debug, Clone, PartialEq)]
pub struct Perron {
    pub value: f64,
    /// Positive, sums to one.
    pub vector: DVector<f64>,
}

fn check_square_nonneg(block: &DMatrix<f64>) -> Result<()> {
    let (rows, cols) = block.shape();
    if rows == 0 {
        return Err(GraphError::Empty);
    }
    if rows != cols {
        return Err(GraphError::NonSquare { rows, cols });
    }
    for col in 0..cols {
        for row in 0..rows {
            let value = block[(row, col)];
            if !value.is_finite() {
                return Err(GraphError::NonFinite { row, col });
            }
            if value < 0.0 {
                return Err(GraphError::NegativeEntry { row, col, value });
            }
        }
    }
    Ok(())
}

/// Power iteration on `block + I`, which shares eigenvectors with `block` and
/// is primitive whenever `block` is irreducible.
pub fn perron(block: &DMatrix<f64>, tol: f64) -> Result<Perron> {
    check_square_nonneg(block)?;
    let n = block.nrows();
    if n == 1 {
        return Ok(Perron {
            value: block[(0, 0)],
            vector: DVector::from_element(1, 1.0),
        });
    }
    if components_of(block).len() != 1 {
        return Err(GraphError::NotIrreducible);
    }

    let mut y = DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..PERRON_MAX_ITERS {
        let z = block * &y;
        let value: f64 = z.sum();
        let residual = (&z - value * &y).amax();
        if residual <= tol {
            return Ok(Perron { value, vector: y });
        }
        y = (z + &y) / (value + 1.0);
    }
    Err(GraphError::NoConvergence {
        max_iters: PERRON_MAX_ITERS,
    })
}

/// Normalized Perron eigenvector of an irreducible non-negative block.
pub fn perron_vector(block: &DMatrix<f64>, tol: f64) -> Result<DVector<f64>> {
    perron(block, tol).map(|p| p.vector)
}

/// Spectral radius of a non-negative square matrix, reducible or not: the
/// largest Perron root over its irreducible diagonal blocks.
pub fn spectral_radius(block: &DMatrix<f64>, tol: f64) -> Result<f64> {
    check_square_nonneg(block)?;
    let mut rho: f64 = 0.0;
    for comp in components_of(block) {
        let value = if comp.len() == 1 {
            block[(comp[0], comp[0])]
        } else {
            perron(&submatrix(block, &comp, &comp), tol)?.value
        };
        rho = rho.max(value);
    }
    Ok(rho)
}

fn check_nonsingular(partition: &NetworkPartition) -> Result<()> {
    if partition.n_receiving() == 0 {
        return Ok(());
    }
    let rho = spectral_radius(partition.t_rr(), PERRON_TOL)?;
    if rho > 1.0 - SINGULAR_MARGIN {
        return Err(GraphError::SingularSystem {
            spectral_radius: rho,
        });
    }
    Ok(())
}

/// `W = T_SR (I - T_RR)^{-1}`, an `N_gS x N_gR` matrix whose column `j` holds
/// the limiting weights receiving agent `j` (canonical receiving position)
/// places on each sending agent.
pub fn influence_matrix(partition: &NetworkPartition) -> Result<DMatrix<f64>> {
    let (ns, nr) = (partition.n_sending(), partition.n_receiving());
    if nr == 0 {
        return Ok(DMatrix::zeros(ns, 0));
    }
    check_nonsingular(partition)?;
    // (I - T_RR)^T W^T = T_SR^T
    let system = (DMatrix::identity(nr, nr) - partition.t_rr()).transpose();
    let w_t =
        system
            .lu()
            .solve(&partition.t_sr().transpose())
            .ok_or(GraphError::SingularSystem {
                spectral_radius: f64::NAN,
            })?;
    Ok(w_t.transpose())
}

/// `C = (I - T_RR^T)^{-1}`.
pub fn confinement_matrix(partition: &NetworkPartition) -> Result<DMatrix<f64>> {
    let nr = partition.n_receiving();
    if nr == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    check_nonsingular(partition)?;
    (DMatrix::identity(nr, nr) - partition.t_rr().transpose())
        .lu()
        .try_inverse()
        .ok_or(GraphError::SingularSystem {
            spectral_radius: f64::NAN,
        })
}

/// `E = blockdiag{y_s 1^T}` over the sending blocks, canonical order.
pub fn perron_block_matrix(
    matrix: &CombinationMatrix,
    partition: &NetworkPartition,
) -> Result<DMatrix<f64>> {
    let ns = partition.n_sending();
    let mut e = DMatrix::zeros(ns, ns);
    let mut offset = 0;
    for block in partition.sending_blocks() {
        let y = perron_vector(&submatrix(matrix.weights(), block, block), PERRON_TOL)?;
        for i in 0..block.len() {
            for j in 0..block.len() {
                e[(offset + i, offset + j)] = y[i];
            }
        }
        offset += block.len();
    }
    Ok(e)
}

/// `lim A^n` in closed form, returned in the original agent order.
pub fn limiting_power(
    matrix: &CombinationMatrix,
    partition: &NetworkPartition,
) -> Result<DMatrix<f64>> {
    let n = matrix.n_agents();
    let ns = partition.n_sending();
    let e = perron_block_matrix(matrix, partition)?;
    let ew = &e * influence_matrix(partition)?;
    let mut canonical = DMatrix::zeros(n, n);
    canonical.view_mut((0, 0), (ns, ns)).copy_from(&e);
    canonical.view_mut((0, ns), (ns, n - ns)).copy_from(&ew);
    Ok(partition.unpermute(&canonical))
}

/// All spectral objects the prediction engine needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary {
    /// One Perron vector per sending block.
    pub perron_vectors: Vec<DVector<f64>>,
    /// `rho(A_r)` per receiving block.
    pub receiving_radii: Vec<f64>,
    /// Perron vector of each receiving block (eigenvalue `rho(A_r)`).
    pub receiving_perron: Vec<DVector<f64>>,
    /// `N_gS x N_gR`, canonical order.
    pub influence: DMatrix<f64>,
    /// `N_gS x N_gS`, canonical order.
    pub perron_blocks: DMatrix<f64>,
    /// `N x N`, original order.
    pub limiting_power: DMatrix<f64>,
    /// `N_gR x N_gR`, canonical order.
    pub confinement: DMatrix<f64>,
}

impl SpectralSummary {
    pub fn compute(matrix: &CombinationMatrix, partition: &NetworkPartition) -> Result<Self> {
        let a = matrix.weights();
        let perron_vectors = partition
            .sending_blocks()
            .iter()
            .map(|b| perron_vector(&submatrix(a, b, b), PERRON_TOL))
            .collect::<Result<Vec<_>>>()?;
        let receiving_perron = partition
            .receiving_blocks()
            .iter()
            .map(|b| perron_vector(&submatrix(a, b, b), PERRON_TOL))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            perron_vectors,
            receiving_radii: partition.receiving_radii().to_vec(),
            receiving_perron,
            influence: influence_matrix(partition)?,
            perron_blocks: perron_block_matrix(matrix, partition)?,
            limiting_power: limiting_power(matrix, partition)?,
            confinement: confinement_matrix(partition)?,
        })
    }
}
