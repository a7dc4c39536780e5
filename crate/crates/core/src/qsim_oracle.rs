//! Exact density-matrix check of entanglement swapping along a chain of
//! noisy Bell pairs, and of the trace-norm error bookkeeping that bounds the
//! end-to-end error by the sum of the per-link errors.
//!
//! Qubit 0 is the most significant bit of a basis index. Trace norms are
//! unnormalized: `‖X‖₁ = Tr|X|`, so orthogonal pure states are at distance 2.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest chain [`swap_chain`] accepts.
pub const MAX_CHAIN: usize = 6;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = -1e-10;
/// Slack for the pass/fail comparisons in [`verify_error_chain`].
pub const BUDGET_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A validated density matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: DMatrix<Complex64>,
    qubits: usize,
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    // symmetrize to strip rounding noise before the Hermitian solver
    let h = (m + m.adjoint()) * c(0.5);
    SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity within tolerance.
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        let dim = data.nrows();
        if dim != data.ncols() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Domain(format!(
                "density matrix must be square with power-of-two size (got {}x{})",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("density matrix has non-finite entries".into()));
        }
        let asym = (&data - data.adjoint()).camax();
        if asym > HERMITIAN_TOL {
            return Err(Error::Domain(format!("matrix not Hermitian (deviation {asym:e})")));
        }
        let tr = data.trace();
        if (tr - c(1.0)).norm() > TRACE_TOL {
            return Err(Error::Domain(format!("trace must be 1 (got {tr})")));
        }
        let min_eig = hermitian_eigenvalues(&data)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < PSD_TOL {
            return Err(Error::Domain(format!(
                "matrix not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(DensityMatrix {
            qubits: dim.trailing_zeros() as usize,
            data,
        })
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v = hermitian_eigenvalues(&self.data);
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            data: self.data.kronecker(&other.data),
            qubits: self.qubits + other.qubits,
        }
    }

    /// `⟨Φ⁺|ρ|Φ⁺⟩` for a two-qubit state.
    pub fn bell_fidelity(&self) -> Result<f64> {
        self.require_two_qubits()?;
        let d = &self.data;
        Ok(0.5 * (d[(0, 0)] + d[(0, 3)] + d[(3, 0)] + d[(3, 3)]).re)
    }

    fn require_two_qubits(&self) -> Result<()> {
        if self.qubits != 2 {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: 4,
            });
        }
        Ok(())
    }
}

/// `|Φ⁺⟩⟨Φ⁺|`.
pub fn bell_state() -> DensityMatrix {
    werner_pair(1.0).expect("p = 1 is valid")
}

/// `p·|Φ⁺⟩⟨Φ⁺| + (1−p)·I/4`.
pub fn werner_pair(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("Werner parameter must be in [0,1] (got {p})")));
    }
    let mut m = DMatrix::from_diagonal_element(4, 4, c((1.0 - p) / 4.0));
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(i, j)] += c(p / 2.0);
    }
    DensityMatrix::new(m)
}

/// Unnormalized trace norm `Tr|ρ − σ|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    Ok(hermitian_eigenvalues(&(&rho.data - &sigma.data))
        .iter()
        .map(|x| x.abs())
        .sum())
}

/// Pauli matrices indexed as I, X, Z, XZ. Bell state `k` is
/// `(I ⊗ P_k)|Φ⁺⟩`, and `P_k` on the far qubit undoes outcome `k`.
fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    let (o, l) = (c(0.0), c(1.0));
    match k {
        0 => [[l, o], [o, l]],
        1 => [[o, l], [l, o]],
        2 => [[l, o], [o, -l]],
        3 => [[o, -l], [l, o]],
        _ => unreachable!(),
    }
}

/// Amplitudes `B_k[b][c]` of Bell state `k` on two qubits.
fn bell_vector(k: usize) -> [[Complex64; 2]; 2] {
    let p = pauli(k);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = [[c(0.0); 2]; 2];
    for (b, row) in v.iter_mut().enumerate() {
        for (cq, amp) in row.iter_mut().enumerate() {
            // (I ⊗ P)|Φ⁺⟩ = Σ_b |b⟩ ⊗ P|b⟩ / √2
            *amp = p[cq][b] * s;
        }
    }
    v
}

/// Swaps the junction between two pairs `(a,b)` and `(c,d)`: Bell
/// measurement on `b,c`, Pauli correction on `d`, averaged over outcomes.
/// Returns the state of `(a,d)`.
fn swap_two(left: &DensityMatrix, right: &DensityMatrix) -> DensityMatrix {
    let rho = left.tensor(right);
    let r = rho.matrix();
    let idx = |a: usize, b: usize, cq: usize, d: usize| (a << 3) | (b << 2) | (cq << 1) | d;
    let mut out = DMatrix::<Complex64>::zeros(4, 4);
    for k in 0..4 {
        let bv = bell_vector(k);
        // unnormalized post-measurement state on (a,d)
        let mut post = [[c(0.0); 4]; 4];
        for a in 0..2 {
            for d in 0..2 {
                for a2 in 0..2 {
                    for d2 in 0..2 {
                        let mut acc = c(0.0);
                        for b in 0..2 {
                            for cq in 0..2 {
                                let bra = bv[b][cq].conj();
                                if bra == c(0.0) {
                                    continue;
                                }
                                for b2 in 0..2 {
                                    for c2 in 0..2 {
                                        let ket = bv[b2][c2];
                                        if ket == c(0.0) {
                                            continue;
                                        }
                                        acc += bra * r[(idx(a, b, cq, d), idx(a2, b2, c2, d2))] * ket;
                                    }
                                }
                            }
                        }
                        post[2 * a + d][2 * a2 + d2] = acc;
                    }
                }
            }
        }
        // (I ⊗ P) post (I ⊗ P)†
        let p = pauli(k);
        for a in 0..2 {
            for d in 0..2 {
                for a2 in 0..2 {
                    for d2 in 0..2 {
                        let mut acc = c(0.0);
                        for x in 0..2 {
                            for y in 0..2 {
                                acc += p[d][x] * post[2 * a + x][2 * a2 + y] * p[d2][y].conj();
                            }
                        }
                        out[(2 * a + d, 2 * a2 + d2)] += acc;
                    }
                }
            }
        }
    }
    DensityMatrix {
        data: out,
        qubits: 2,
    }
}

fn check_chain(pairs: &[DensityMatrix]) -> Result<()> {
    if pairs.is_empty() || pairs.len() > MAX_CHAIN {
        return Err(Error::SizeLimit(format!(
            "chain length must be 1..={MAX_CHAIN} (got {}); for longer Werner chains \
             use the closed form p' = p1·p2·…·pn",
            pairs.len()
        )));
    }
    for (i, p) in pairs.iter().enumerate() {
        if p.qubits() != 2 {
            return Err(Error::Domain(format!(
                "chain element {i} has {} qubits, expected 2",
                p.qubits()
            )));
        }
    }
    Ok(())
}

/// End-to-end state after swapping every junction of the chain, left to
/// right. A single pair is returned unchanged.
pub fn swap_chain(pairs: &[DensityMatrix]) -> Result<DensityMatrix> {
    let order: Vec<usize> = (0..pairs.len().saturating_sub(1)).collect();
    swap_chain_ordered(pairs, &order)
}

/// Like [`swap_chain`] with junctions swapped in `order`; junction `j` sits
/// between pair `j` and pair `j+1`.
pub fn swap_chain_ordered(pairs: &[DensityMatrix], order: &[usize]) -> Result<DensityMatrix> {
    check_chain(pairs)?;
    let junctions = pairs.len() - 1;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..junctions).collect::<Vec<_>>() {
        return Err(Error::Domain(format!(
            "swap order must be a permutation of 0..{junctions}"
        )));
    }
    // segments as (first pair, last pair, state), kept in chain order
    let mut segments: Vec<(usize, usize, DensityMatrix)> =
        pairs.iter().enumerate().map(|(i, p)| (i, i, p.clone())).collect();
    for &j in order {
        let i = segments
            .iter()
            .position(|s| s.1 == j)
            .expect("junction ends a segment");
        let (lo, _, left) = segments.remove(i);
        let (_, hi, right) = segments.remove(i);
        segments.insert(i, (lo, hi, swap_two(&left, &right)));
    }
    Ok(segments.pop().expect("one segment remains").2)
}

/// Outcome of [`verify_error_chain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub pair_distances: Vec<f64>,
    pub final_fidelity: f64,
    pub trace_distance: f64,
    pub budget: f64,
    pub pass: bool,
}

/// Checks that the swapped chain is within `Σ per_pair_eps` of `|Φ⁺⟩` in
/// trace norm. Each pair must itself be within its own epsilon.
pub fn verify_error_chain(pairs: &[DensityMatrix], per_pair_eps: &[f64]) -> Result<ChainReport> {
    check_chain(pairs)?;
    if pairs.len() != per_pair_eps.len() {
        return Err(Error::Domain(format!(
            "{} pairs but {} epsilons",
            pairs.len(),
            per_pair_eps.len()
        )));
    }
    let bell = bell_state();
    let mut pair_distances = Vec::with_capacity(pairs.len());
    for (i, (p, &eps)) in pairs.iter().zip(per_pair_eps).enumerate() {
        let d = trace_distance(p, &bell)?;
        if eps.is_nan() || eps < 0.0 || d > eps + BUDGET_TOL {
            return Err(Error::Domain(format!(
                "pair {i} is at distance {d} from the Bell state, above its epsilon {eps}"
            )));
        }
        pair_distances.push(d);
    }
    let out = swap_chain(pairs)?;
    let distance = trace_distance(&out, &bell)?;
    let budget: f64 = per_pair_eps.iter().sum();
    Ok(ChainReport {
        pair_distances,
        final_fidelity: out.bell_fidelity()?,
        trace_distance: distance,
        budget,
        pass: distance <= budget + BUDGET_TOL,
    })
}
