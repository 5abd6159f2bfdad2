//! Quantum channels presented by Kraus operators, their confusability
//! operator system `span{I, E_i^* E_j}`, Knill-Laflamme verification of code
//! projections, and code search through the anticlique machinery.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{self, MatrixDto};
use crate::matcore::{self, CMatrix, Tolerance};
use crate::opsys::{self, OperatorSystem, Projection};
use crate::ramsey::{find_anticlique, SearchConfig};

/// A channel `T ↦ Σ E_i T E_i^*` with Kraus operators `E_i : C^in → C^out`.
///
/// Trace preservation (`Σ E_i^* E_i = I`) is checked on construction;
/// a violation is recorded rather than rejected, since subchannels are
/// legitimate inputs for everything this module does.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ChannelDto", into = "ChannelDto")]
pub struct QuantumChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMatrix>,
    trace_preserving: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelDto {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<MatrixDto>,
}

impl TryFrom<ChannelDto> for QuantumChannel {
    type Error = Error;
    fn try_from(dto: ChannelDto) -> Result<Self> {
        let kraus = dto
            .kraus
            .iter()
            .map(json::matrix_from_dto)
            .collect::<Result<Vec<_>>>()?;
        QuantumChannel::new(dto.in_dim, dto.out_dim, kraus, &Tolerance::default())
    }
}

impl From<QuantumChannel> for ChannelDto {
    fn from(ch: QuantumChannel) -> Self {
        ChannelDto {
            in_dim: ch.in_dim,
            out_dim: ch.out_dim,
            kraus: ch.kraus.iter().map(json::matrix_to_dto).collect(),
        }
    }
}

impl QuantumChannel {
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        kraus: Vec<CMatrix>,
        tol: &Tolerance,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::EmptyInput("channel with no Kraus operators".into()));
        }
        for (i, e) in kraus.iter().enumerate() {
            if e.shape() != (out_dim, in_dim) {
                return Err(Error::ShapeMismatch(format!(
                    "Kraus operator {i} has shape {:?}, expected {out_dim}×{in_dim}",
                    e.shape()
                )));
            }
        }
        let mut sum = CMatrix::zeros(in_dim, in_dim);
        for e in &kraus {
            sum += e.adjoint() * e;
        }
        let deviation = matcore::op_norm(&(sum - CMatrix::identity(in_dim, in_dim)));
        Ok(QuantumChannel {
            in_dim,
            out_dim,
            kraus,
            trace_preserving: deviation <= tol.residual_tol,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// False for subchannels; the confusability construction works either way.
    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }
}

/// The confusability operator system `span{I, E_i^* E_j}` on the input space.
pub fn confusability(ch: &QuantumChannel, tol: &Tolerance) -> Result<OperatorSystem> {
    let mut products = Vec::with_capacity(ch.kraus.len() * ch.kraus.len());
    for ei in &ch.kraus {
        for ej in &ch.kraus {
            products.push(ei.adjoint() * ej);
        }
    }
    Ok(opsys::normalize(&products, ch.in_dim, tol)?
        .with_label(format!("confusability(in={}, kraus={})", ch.in_dim, ch.kraus.len())))
}

/// Knill-Laflamme report for a projection: the scalars `λ_ij` with
/// `P E_i^* E_j P = λ_ij P` and the worst deviation from that form.
#[derive(Debug, Clone, Serialize)]
pub struct KLReport {
    pub kraus_count: usize,
    /// `λ_ij` as `[re, im]`, row-major over (i, j).
    pub lambda: Vec<Vec<[f64; 2]>>,
    pub max_residual: f64,
    pub passed: bool,
}

impl KLReport {
    /// The λ matrix as a dense complex matrix.
    pub fn lambda_matrix(&self) -> CMatrix {
        let k = self.kraus_count;
        CMatrix::from_fn(k, k, |i, j| {
            num_complex::Complex64::new(self.lambda[i][j][0], self.lambda[i][j][1])
        })
    }
}

/// Verify the Knill-Laflamme condition on the range of `p`: λ_ij is the
/// trace average of the compressed `E_i^* E_j`, extracted even when the
/// verification fails so failure reports stay informative.
pub fn kl_verify(ch: &QuantumChannel, p: &Projection, tol: &Tolerance) -> Result<KLReport> {
    if p.ambient_dim() != ch.in_dim {
        return Err(Error::ShapeMismatch(format!(
            "projection lives in dimension {}, channel input is {}",
            p.ambient_dim(),
            ch.in_dim
        )));
    }
    let w = p.frame();
    let k = p.rank() as f64;
    let n = ch.kraus.len();
    let mut lambda = vec![vec![[0.0, 0.0]; n]; n];
    let mut max_residual = 0.0f64;
    for (i, ei) in ch.kraus.iter().enumerate() {
        for (j, ej) in ch.kraus.iter().enumerate() {
            let compressed = w.adjoint() * (ei.adjoint() * ej) * w;
            let lam = compressed.trace() / num_complex::Complex64::new(k, 0.0);
            lambda[i][j] = [lam.re, lam.im];
            let residual = matcore::op_norm(
                &(&compressed
                    - CMatrix::identity(p.rank(), p.rank()).map(|z| z * lam)),
            );
            max_residual = max_residual.max(residual);
        }
    }
    Ok(KLReport {
        kraus_count: n,
        lambda,
        max_residual,
        passed: max_residual <= tol.residual_tol,
    })
}

/// Search for a k-dimensional error correcting code: a quantum k-anticlique
/// of the confusability system, re-verified through [`kl_verify`].
pub fn find_code(
    ch: &QuantumChannel,
    k: usize,
    cfg: &SearchConfig,
) -> Result<Option<(Projection, KLReport)>> {
    if k >= ch.in_dim {
        return Ok(None);
    }
    let system = confusability(ch, &cfg.tol)?;
    match find_anticlique(&system, k, cfg) {
        Some(p) => {
            let report = kl_verify(ch, &p, &cfg.tol)?;
            Ok(Some((p, report)))
        }
        None => Ok(None),
    }
}

/// Stock channels used across tests and the command-line examples.
pub mod fixtures {
    use super::*;
    use crate::matcore::{identity, CMatrix};
    use num_complex::Complex64 as C;

    pub fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[
            C::new(0., 0.), C::new(1., 0.),
            C::new(1., 0.), C::new(0., 0.),
        ])
    }

    pub fn pauli_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[
            C::new(0., 0.), C::new(0., -1.),
            C::new(0., 1.), C::new(0., 0.),
        ])
    }

    pub fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[
            C::new(1., 0.), C::new(0., 0.),
            C::new(0., 0.), C::new(-1., 0.),
        ])
    }

    /// Identity channel on C^d.
    pub fn identity_channel(d: usize) -> QuantumChannel {
        QuantumChannel::new(d, d, vec![identity(d)], &Tolerance::default()).unwrap()
    }

    /// Single-qubit bit flip: Kraus `{√(1−p)·I, √p·X}`.
    pub fn bit_flip(p: f64) -> QuantumChannel {
        let kraus = vec![
            identity(2).scale((1.0 - p).sqrt()),
            pauli_x().scale(p.sqrt()),
        ];
        QuantumChannel::new(2, 2, kraus, &Tolerance::default()).unwrap()
    }

    /// Single-qubit depolarizing presentation with Kraus `{½I, ½X, ½Y, ½Z}`.
    pub fn depolarizing_qubit() -> QuantumChannel {
        let kraus = vec![
            identity(2).scale(0.5),
            pauli_x().scale(0.5),
            pauli_y().scale(0.5),
            pauli_z().scale(0.5),
        ];
        QuantumChannel::new(2, 2, kraus, &Tolerance::default()).unwrap()
    }

    /// Three-qubit bit flip with independent single-qubit flips:
    /// Kraus `{√(1−p)·I, √(p/3)·X₁, √(p/3)·X₂, √(p/3)·X₃}`.
    pub fn three_qubit_bit_flip(p: f64) -> QuantumChannel {
        let i2 = identity(2);
        let x = pauli_x();
        let x1 = x.kronecker(&i2).kronecker(&i2);
        let x2 = i2.kronecker(&x).kronecker(&i2);
        let x3 = i2.kronecker(&i2).kronecker(&x);
        let kraus = vec![
            identity(8).scale((1.0 - p).sqrt()),
            x1.scale((p / 3.0).sqrt()),
            x2.scale((p / 3.0).sqrt()),
            x3.scale((p / 3.0).sqrt()),
        ];
        QuantumChannel::new(8, 8, kraus, &Tolerance::default()).unwrap()
    }

    /// The repetition-code projection onto `span{|000⟩, |111⟩}`.
    pub fn repetition_code() -> Projection {
        Projection::from_coordinates(8, &[0, 7]).unwrap()
    }
}
