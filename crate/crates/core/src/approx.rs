//! Sparse approximation engines and error metrics.
//!
//! Nonlinear approximation keeps the largest analysis coefficients of an
//! orthonormal basis; orthogonal matching pursuit greedily selects atoms
//! from a redundant dictionary and re-fits by least squares. Both report
//! NMSE `‖x̂−x‖²/‖x‖²` and SNR in dB (capped at 300 for exact
//! reconstructions).

use ndarray::Array2;

use crate::dictionary::Dictionary;
use crate::graph::{cut_count, Graph};
use crate::multires::{PartitionTree, WaveletBasis};
use crate::{Error, Result};

/// SNR ceiling standing in for +∞ on exact reconstructions.
pub const SNR_CAP_DB: f64 = 300.0;

/// Absolute threshold for counting a coefficient as nonzero.
pub const COEFF_ZERO_TOL: f64 = 1e-10;

/// Anything that exposes an indexed set of atoms over R^N.
pub trait AtomCollection {
    fn dim(&self) -> usize;
    fn atom_count(&self) -> usize;
    /// `⟨a_idx, v⟩`.
    fn atom_dot(&self, idx: usize, v: &[f64]) -> f64;
    /// `out += scale · a_idx`.
    fn atom_axpy(&self, idx: usize, scale: f64, out: &mut [f64]);
}

impl AtomCollection for Dictionary {
    fn dim(&self) -> usize {
        Dictionary::dim(self)
    }
    fn atom_count(&self) -> usize {
        self.len()
    }
    fn atom_dot(&self, idx: usize, v: &[f64]) -> f64 {
        self.atom(idx).vector.dot_dense(v)
    }
    fn atom_axpy(&self, idx: usize, scale: f64, out: &mut [f64]) {
        self.atom(idx).vector.axpy_into(scale, out);
    }
}

impl AtomCollection for WaveletBasis {
    fn dim(&self) -> usize {
        self.size()
    }
    fn atom_count(&self) -> usize {
        self.columns().len()
    }
    fn atom_dot(&self, idx: usize, v: &[f64]) -> f64 {
        self.column(idx).dot_dense(v)
    }
    fn atom_axpy(&self, idx: usize, scale: f64, out: &mut [f64]) {
        self.column(idx).axpy_into(scale, out);
    }
}

/// Dense orthonormal basis (e.g. the graph Fourier basis).
#[derive(Debug, Clone)]
pub struct DenseBasis {
    columns: Array2<f64>,
}

impl DenseBasis {
    pub fn from_columns(columns: Array2<f64>) -> Self {
        Self { columns }
    }

    pub fn columns(&self) -> &Array2<f64> {
        &self.columns
    }
}

impl AtomCollection for DenseBasis {
    fn dim(&self) -> usize {
        self.columns.nrows()
    }
    fn atom_count(&self) -> usize {
        self.columns.ncols()
    }
    fn atom_dot(&self, idx: usize, v: &[f64]) -> f64 {
        (0..self.columns.nrows()).map(|r| self.columns[[r, idx]] * v[r]).sum()
    }
    fn atom_axpy(&self, idx: usize, scale: f64, out: &mut [f64]) {
        for r in 0..self.columns.nrows() {
            out[r] += scale * self.columns[[r, idx]];
        }
    }
}

/// The Kronecker delta basis.
#[derive(Debug, Clone, Copy)]
pub struct DeltaBasis {
    pub n: usize,
}

impl AtomCollection for DeltaBasis {
    fn dim(&self) -> usize {
        self.n
    }
    fn atom_count(&self) -> usize {
        self.n
    }
    fn atom_dot(&self, idx: usize, v: &[f64]) -> f64 {
        v[idx]
    }
    fn atom_axpy(&self, idx: usize, scale: f64, out: &mut [f64]) {
        out[idx] += scale;
    }
}

/// Reconstruct `Σ coeff_i · a_{support_i}`.
pub fn synthesize_selected<A: AtomCollection + ?Sized>(
    atoms: &A,
    support: &[usize],
    coeffs: &[f64],
) -> Vec<f64> {
    let mut out = vec![0.0; atoms.dim()];
    for (&idx, &c) in support.iter().zip(coeffs) {
        atoms.atom_axpy(idx, c, &mut out);
    }
    out
}

/// Normalized mean square error `‖x̂−x‖² / ‖x‖²`.
pub fn nmse(xhat: &[f64], x: &[f64]) -> Result<f64> {
    if xhat.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: xhat.len() });
    }
    let energy: f64 = x.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let err: f64 = xhat.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(err / energy)
}

/// `−10·log10(nmse)`, capped at [`SNR_CAP_DB`].
pub fn snr_db(xhat: &[f64], x: &[f64]) -> Result<f64> {
    let e = nmse(xhat, x)?;
    Ok(snr_from_nmse(e))
}

pub fn snr_from_nmse(e: f64) -> f64 {
    if e <= 0.0 {
        return SNR_CAP_DB;
    }
    (-10.0 * e.log10()).min(SNR_CAP_DB)
}

/// Approximation method identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Nla,
    Omp,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Nla => "nla",
            Method::Omp => "omp",
        }
    }
}

/// Per-run error report.
#[derive(Debug, Clone)]
pub struct ApproxReport {
    pub method: Method,
    pub budget: usize,
    pub nmse: f64,
    pub snr_db: f64,
}

/// Keeps the `m` largest-magnitude analysis coefficients (ties broken by
/// lower column index) and reconstructs. Optimal among m-term
/// approximations when the collection is an orthonormal basis.
pub fn nonlinear_approx<A: AtomCollection + ?Sized>(
    basis: &A,
    x: &[f64],
    m: usize,
) -> Result<(Vec<f64>, ApproxReport)> {
    let count = basis.atom_count();
    if m == 0 || m > count {
        return Err(Error::BudgetOutOfRange { m, max: count });
    }
    if x.len() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), got: x.len() });
    }
    let coeffs: Vec<f64> = (0..count).map(|i| basis.atom_dot(i, x)).collect();
    let selected = largest_magnitude(&coeffs, m);
    let kept: Vec<f64> = selected.iter().map(|&i| coeffs[i]).collect();
    let xhat = synthesize_selected(basis, &selected, &kept);
    let e = nmse(&xhat, x)?;
    Ok((xhat, ApproxReport { method: Method::Nla, budget: m, nmse: e, snr_db: snr_from_nmse(e) }))
}

/// Indices of the `m` largest `|values|`, ties by lower index, ascending.
fn largest_magnitude(values: &[f64], m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].abs().total_cmp(&values[i].abs()).then(i.cmp(&j)));
    let mut selected: Vec<usize> = order.into_iter().take(m).collect();
    selected.sort_unstable();
    selected
}

/// Thresholding for redundant dictionaries: select the `m` atoms with the
/// largest analysis coefficients, then re-fit them jointly by least squares
/// (rank-deficient picks contribute nothing to the span and are skipped).
/// Coincides with [`nonlinear_approx`] on orthonormal collections, and the
/// nested supports make the error nonincreasing in `m`.
pub fn thresholded_least_squares<A: AtomCollection + ?Sized>(
    atoms: &A,
    x: &[f64],
    m: usize,
) -> Result<(Vec<f64>, ApproxReport)> {
    let count = atoms.atom_count();
    if m == 0 || m > count {
        return Err(Error::BudgetOutOfRange { m, max: count });
    }
    if x.len() != atoms.dim() {
        return Err(Error::DimensionMismatch { expected: atoms.dim(), got: x.len() });
    }
    let coeffs: Vec<f64> = (0..count).map(|i| atoms.atom_dot(i, x)).collect();
    let selection = largest_magnitude(&coeffs, m);

    let mut fit = LeastSquaresFit::new(x.to_vec());
    for &idx in &selection {
        fit.try_add(atoms, idx);
    }
    let (support, solved) = fit.solve(atoms);
    let xhat = synthesize_selected(atoms, &support, &solved);
    let e = nmse(&xhat, x)?;
    Ok((xhat, ApproxReport { method: Method::Nla, budget: m, nmse: e, snr_db: snr_from_nmse(e) }))
}

/// Outcome of an OMP run.
#[derive(Debug, Clone)]
pub struct SparseCode {
    /// Selected atom indices in selection order; distinct.
    pub support: Vec<usize>,
    /// Least-squares coefficients aligned with `support`.
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    /// `residual_history[t]` = ‖r‖ after `t` accepted atoms (entry 0 = ‖x‖).
    pub residual_history: Vec<f64>,
}

impl SparseCode {
    /// Number of coefficients above the ℓ₀ counting threshold.
    pub fn l0(&self) -> usize {
        self.coefficients.iter().filter(|c| c.abs() > COEFF_ZERO_TOL).count()
    }

    /// ‖r‖ after at most `budget` atoms (the greedy path is budget-oblivious,
    /// so prefixes of one run answer every smaller budget).
    pub fn residual_at_budget(&self, budget: usize) -> f64 {
        let t = budget.min(self.residual_history.len() - 1);
        self.residual_history[t]
    }
}

/// Incremental Cholesky of the Gram matrix of accepted atoms.
struct LeastSquaresFit {
    x: Vec<f64>,
    support: Vec<usize>,
    dense: Vec<Vec<f64>>,
    chol: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

const RANK_TOL: f64 = 1e-12;

impl LeastSquaresFit {
    fn new(x: Vec<f64>) -> Self {
        Self { x, support: Vec::new(), dense: Vec::new(), chol: Vec::new(), rhs: Vec::new() }
    }

    /// Extends the factorization with atom `idx`; returns false when the
    /// atom is (numerically) dependent on the current selection.
    fn try_add<A: AtomCollection + ?Sized>(&mut self, atoms: &A, idx: usize) -> bool {
        let mut col = vec![0.0; atoms.dim()];
        atoms.atom_axpy(idx, 1.0, &mut col);
        let d0: f64 = col.iter().map(|v| v * v).sum();
        if d0 <= 0.0 {
            return false;
        }
        let gram: Vec<f64> = self.dense.iter().map(|a| dot(a, &col)).collect();
        let w = forward_solve(&self.chol, &gram);
        let d2 = d0 - w.iter().map(|v| v * v).sum::<f64>();
        if d2 <= RANK_TOL * d0 {
            return false;
        }
        let mut row = w;
        row.push(d2.sqrt());
        self.chol.push(row);
        self.rhs.push(dot(&col, &self.x));
        self.dense.push(col);
        self.support.push(idx);
        true
    }

    /// Least-squares coefficients for the current support.
    fn solve<A: AtomCollection + ?Sized>(&self, _atoms: &A) -> (Vec<usize>, Vec<f64>) {
        let y = forward_solve(&self.chol, &self.rhs);
        let c = backward_solve(&self.chol, &y);
        (self.support.clone(), c)
    }

    fn residual(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut r = self.x.clone();
        for (col, &c) in self.dense.iter().zip(coeffs) {
            for (ri, v) in r.iter_mut().zip(col) {
                *ri -= c * v;
            }
        }
        r
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn forward_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; b.len()];
    for i in 0..b.len() {
        let s: f64 = (0..i).map(|j| l[i][j] * y[j]).sum();
        y[i] = (b[i] - s) / l[i][i];
    }
    y
}

fn backward_solve(l: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = y.len();
    let mut c = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = ((i + 1)..k).map(|j| l[j][i] * c[j]).sum();
        c[i] = (y[i] - s) / l[i][i];
    }
    c
}

/// Classic orthogonal matching pursuit.
///
/// Per iteration: select the atom maximizing |⟨r, a⟩| (ties by lower
/// index), re-fit all coefficients by least squares on the selected set,
/// update the residual. Stops when `‖r‖/‖x‖ ≤ tol` or the budget is
/// reached. Rank-deficient candidates are dropped and the next best atom
/// is taken instead.
pub fn omp<A: AtomCollection + ?Sized>(
    atoms: &A,
    x: &[f64],
    max_atoms: usize,
    tol: f64,
) -> Result<SparseCode> {
    if x.len() != atoms.dim() {
        return Err(Error::DimensionMismatch { expected: atoms.dim(), got: x.len() });
    }
    let x_norm = dot(x, x).sqrt();
    if x_norm == 0.0 {
        return Err(Error::ZeroSignal);
    }
    if max_atoms == 0 {
        return Err(Error::BudgetOutOfRange { m: 0, max: atoms.atom_count() });
    }

    let count = atoms.atom_count();
    let mut unavailable = vec![false; count];
    let mut fit = LeastSquaresFit::new(x.to_vec());
    let mut residual = x.to_vec();
    let mut residual_norm = x_norm;
    let mut coeffs: Vec<f64> = Vec::new();
    let mut history = vec![x_norm];

    while fit.support.len() < max_atoms {
        if residual_norm / x_norm <= tol {
            break;
        }
        // Drop rank-deficient candidates until one extends the basis.
        let accepted = loop {
            let mut best: Option<(f64, usize)> = None;
            for j in 0..count {
                if unavailable[j] {
                    continue;
                }
                let corr = atoms.atom_dot(j, &residual).abs();
                if best.map_or(true, |(b, _)| corr > b) {
                    best = Some((corr, j));
                }
            }
            match best {
                None => break false,
                Some((corr, j)) if corr <= 1e-13 * residual_norm => {
                    let _ = (corr, j);
                    break false;
                }
                Some((_, j)) => {
                    unavailable[j] = true;
                    if fit.try_add(atoms, j) {
                        break true;
                    }
                }
            }
        };
        if !accepted {
            break;
        }
        let (_, solved) = fit.solve(atoms);
        residual = fit.residual(&solved);
        residual_norm = dot(&residual, &residual).sqrt();
        coeffs = solved;
        history.push(residual_norm);
    }

    Ok(SparseCode {
        support: fit.support.clone(),
        coefficients: coeffs,
        residual_norm,
        iterations: fit.support.len(),
        residual_history: history,
    })
}

/// Denoising-based localization: OMP-reconstruct the noisy observation and
/// report the error against the ground truth when provided (otherwise
/// against the observation itself).
pub fn localize<A: AtomCollection + ?Sized>(
    atoms: &A,
    noisy: &[f64],
    truth: Option<&[f64]>,
    max_atoms: usize,
    tol: f64,
) -> Result<(Vec<f64>, ApproxReport)> {
    let code = omp(atoms, noisy, max_atoms, tol)?;
    let xhat = synthesize_selected(atoms, &code.support, &code.coefficients);
    let reference = truth.unwrap_or(noisy);
    let e = nmse(&xhat, reference)?;
    Ok((
        xhat,
        ApproxReport {
            method: Method::Omp,
            budget: code.support.len(),
            nmse: e,
            snr_db: snr_from_nmse(e),
        },
    ))
}

/// Wavelet sparsity bound `1 + ‖Δx‖₀ · L`.
pub fn pc_sparsity_bound(graph: &Graph, tree: &PartitionTree, x: &[f64]) -> Result<usize> {
    Ok(1 + cut_count(graph, x)? * tree.depth())
}

/// Piecewise-smooth sparsity bound `1 + 2K · ‖Δx_PC‖₀ · L`, evaluated on a
/// piecewise-constant template sharing the signal's pieces.
pub fn ps_sparsity_bound(
    graph: &Graph,
    tree: &PartitionTree,
    pc_template: &[f64],
    bandwidth: usize,
) -> Result<usize> {
    Ok(1 + 2 * bandwidth * cut_count(graph, pc_template)? * tree.depth())
}
