//! Trajectory data containers, Hankel matrices, extended states, and
//! persistency-of-excitation checks.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numeric;

/// Recorded input-output data with an initialization prefix.
///
/// Data indices run from `-prefix_len + 1` to `data_len` and map to
/// zero-based storage with offset `prefix_len - 1`; the negative indices are
/// never exposed beyond the `*_at` accessors.
#[derive(Debug, Clone)]
pub struct IoTrajectory {
    inputs: Vec<DVector<f64>>,
    outputs: Vec<DVector<f64>>,
    prefix_len: usize,
}

impl IoTrajectory {
    pub fn new(
        inputs: Vec<DVector<f64>>,
        outputs: Vec<DVector<f64>>,
        prefix_len: usize,
    ) -> Result<Self> {
        if prefix_len < 1 {
            return Err(Error::InvalidArgument("prefix_len must be >= 1".into()));
        }
        if inputs.len() != outputs.len() {
            return Err(Error::dim(format!(
                "inputs ({}) and outputs ({}) differ in length",
                inputs.len(),
                outputs.len()
            )));
        }
        if inputs.len() <= prefix_len {
            return Err(Error::dim(format!(
                "trajectory length {} leaves no data after the {}-step prefix",
                inputs.len(),
                prefix_len
            )));
        }
        let m = inputs[0].len();
        let p = outputs[0].len();
        if m == 0 || p == 0 {
            return Err(Error::dim("zero-dimensional input or output"));
        }
        for (k, u) in inputs.iter().enumerate() {
            if u.len() != m {
                return Err(Error::dim(format!("input {k} has dimension {}", u.len())));
            }
            if !numeric::all_finite_vec(u) {
                return Err(Error::NonFinite(format!("input at storage index {k}")));
            }
        }
        for (k, y) in outputs.iter().enumerate() {
            if y.len() != p {
                return Err(Error::dim(format!("output {k} has dimension {}", y.len())));
            }
            if !numeric::all_finite_vec(y) {
                return Err(Error::NonFinite(format!("output at storage index {k}")));
            }
        }
        Ok(Self {
            inputs,
            outputs,
            prefix_len,
        })
    }

    /// Input dimension m.
    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    /// Output dimension p.
    pub fn output_dim(&self) -> usize {
        self.outputs[0].len()
    }

    /// Initialization prefix length T_ini.
    pub fn prefix_len(&self) -> usize {
        self.prefix_len
    }

    /// Data length T (excluding the prefix).
    pub fn data_len(&self) -> usize {
        self.inputs.len() - self.prefix_len
    }

    /// Extended-state dimension (m + p) * T_ini.
    pub fn xi_dim(&self) -> usize {
        (self.input_dim() + self.output_dim()) * self.prefix_len
    }

    fn storage(&self, i: i64) -> Result<usize> {
        let lo = 1 - self.prefix_len as i64;
        let hi = self.data_len() as i64;
        if i < lo || i > hi {
            return Err(Error::dim(format!(
                "data index {i} outside [{lo}, {hi}]"
            )));
        }
        Ok((i + self.prefix_len as i64 - 1) as usize)
    }

    /// Input at data index `i` (prefix indices are non-positive).
    pub fn input_at(&self, i: i64) -> Result<&DVector<f64>> {
        Ok(&self.inputs[self.storage(i)?])
    }

    /// Output at data index `i`.
    pub fn output_at(&self, i: i64) -> Result<&DVector<f64>> {
        Ok(&self.outputs[self.storage(i)?])
    }

    /// Inputs for data indices 1..=T as a sequence.
    pub fn data_inputs(&self) -> Vec<DVector<f64>> {
        self.inputs[self.prefix_len..].to_vec()
    }

    /// Outputs for data indices 1..=T as a sequence.
    pub fn data_outputs(&self) -> Vec<DVector<f64>> {
        self.outputs[self.prefix_len..].to_vec()
    }

    /// Extended state at data index `i` (valid for 1..=T+1).
    pub fn xi_at(&self, i: i64) -> Result<ExtendedState> {
        if i < 1 || i > self.data_len() as i64 + 1 {
            return Err(Error::dim(format!(
                "extended state index {i} outside [1, {}]",
                self.data_len() + 1
            )));
        }
        let t_ini = self.prefix_len as i64;
        let mut past_u = Vec::with_capacity(self.prefix_len);
        let mut past_y = Vec::with_capacity(self.prefix_len);
        for j in (i - t_ini)..i {
            past_u.push(self.input_at(j)?.clone());
            past_y.push(self.output_at(j)?.clone());
        }
        build_extended_state(&past_u, &past_y)
    }

    /// True if the data length supports a horizon of `n` steps
    /// (T >= T_ini + n).
    pub fn supports_horizon(&self, n: usize) -> bool {
        self.data_len() >= self.prefix_len + n
    }
}

/// Stacked window of past inputs and outputs, oldest first; inputs block
/// before outputs block.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState {
    pub xi: DVector<f64>,
}

impl ExtendedState {
    pub fn zeros(m: usize, p: usize, t_ini: usize) -> Self {
        Self {
            xi: DVector::zeros((m + p) * t_ini),
        }
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    /// Shift the window one step: drop the oldest (u, y) pair, append (u, y).
    pub fn advance(&self, m: usize, p: usize, u: &DVector<f64>, y: &DVector<f64>) -> Result<Self> {
        let t_ini = self.xi.len() / (m + p);
        if self.xi.len() != (m + p) * t_ini || u.len() != m || y.len() != p {
            return Err(Error::dim("extended-state advance dimension mismatch"));
        }
        let mut xi = DVector::zeros(self.xi.len());
        let ub = m * t_ini;
        // input block
        if t_ini > 1 {
            xi.rows_mut(0, m * (t_ini - 1))
                .copy_from(&self.xi.rows(m, m * (t_ini - 1)));
        }
        xi.rows_mut(m * (t_ini - 1), m).copy_from(u);
        // output block
        if t_ini > 1 {
            xi.rows_mut(ub, p * (t_ini - 1))
                .copy_from(&self.xi.rows(ub + p, p * (t_ini - 1)));
        }
        xi.rows_mut(ub + p * (t_ini - 1), p).copy_from(y);
        Ok(Self { xi })
    }
}

/// Block-Hankel matrix of a vector sequence.
#[derive(Debug, Clone)]
pub struct HankelMatrix {
    pub entries: DMatrix<f64>,
    pub order: usize,
    pub block_dim: usize,
}

impl HankelMatrix {
    /// Number of columns T - L + 1.
    pub fn width(&self) -> usize {
        self.entries.ncols()
    }
}

/// Build the block-Hankel matrix of order `order` from a vector sequence.
pub fn build_hankel(seq: &[DVector<f64>], order: usize) -> Result<HankelMatrix> {
    if order < 1 {
        return Err(Error::InvalidArgument("Hankel order must be >= 1".into()));
    }
    if seq.is_empty() {
        return Err(Error::dim("empty sequence"));
    }
    if order > seq.len() {
        return Err(Error::dim(format!(
            "Hankel order {order} exceeds sequence length {}",
            seq.len()
        )));
    }
    let n_s = seq[0].len();
    if seq.iter().any(|s| s.len() != n_s) {
        return Err(Error::dim("inconsistent vector dimensions in sequence"));
    }
    let width = seq.len() - order + 1;
    let mut entries = DMatrix::zeros(n_s * order, width);
    for j in 0..width {
        for l in 0..order {
            entries
                .view_mut((l * n_s, j), (n_s, 1))
                .copy_from(&seq[j + l]);
        }
    }
    Ok(HankelMatrix {
        entries,
        order,
        block_dim: n_s,
    })
}

/// Persistency of excitation of order `order`: the Hankel matrix has full
/// row rank `n_s * order`.
pub fn is_persistently_exciting(seq: &[DVector<f64>], order: usize) -> Result<bool> {
    let h = build_hankel(seq, order)?;
    let full = h.block_dim * h.order;
    Ok(numeric::numerical_rank(&h.entries) == full)
}

/// Stack the last `T_ini` inputs and outputs into an extended state.
pub fn build_extended_state(
    past_inputs: &[DVector<f64>],
    past_outputs: &[DVector<f64>],
) -> Result<ExtendedState> {
    if past_inputs.is_empty() || past_inputs.len() != past_outputs.len() {
        return Err(Error::dim(format!(
            "window lengths differ: {} inputs vs {} outputs",
            past_inputs.len(),
            past_outputs.len()
        )));
    }
    let m = past_inputs[0].len();
    let p = past_outputs[0].len();
    let t_ini = past_inputs.len();
    let mut xi = DVector::zeros((m + p) * t_ini);
    for (k, u) in past_inputs.iter().enumerate() {
        if u.len() != m {
            return Err(Error::dim("inconsistent input dimensions in window"));
        }
        xi.rows_mut(k * m, m).copy_from(u);
    }
    for (k, y) in past_outputs.iter().enumerate() {
        if y.len() != p {
            return Err(Error::dim("inconsistent output dimensions in window"));
        }
        xi.rows_mut(t_ini * m + k * p, p).copy_from(y);
    }
    Ok(ExtendedState { xi })
}

/// Extended-state data sequence: xi built from the window ending at i-1,
/// for i = 1..=T.
pub fn extended_state_data(traj: &IoTrajectory) -> Vec<ExtendedState> {
    (1..=traj.data_len() as i64)
        .map(|i| traj.xi_at(i).expect("index in range by construction"))
        .collect()
}

/// Columns [xi_1 ... xi_count] as a matrix (H_1 of the extended-state data).
pub fn xi_data_matrix(traj: &IoTrajectory, count: usize) -> Result<DMatrix<f64>> {
    if count == 0 || count > traj.data_len() + 1 {
        return Err(Error::dim(format!(
            "xi column count {count} outside [1, {}]",
            traj.data_len() + 1
        )));
    }
    let n_xi = traj.xi_dim();
    let mut out = DMatrix::zeros(n_xi, count);
    for i in 1..=count as i64 {
        out.set_column((i - 1) as usize, &traj.xi_at(i)?.xi);
    }
    Ok(out)
}

/// Columns [xi_{start} ... xi_{start+count-1}] as a matrix.
pub fn xi_data_matrix_from(traj: &IoTrajectory, start: i64, count: usize) -> Result<DMatrix<f64>> {
    let n_xi = traj.xi_dim();
    let mut out = DMatrix::zeros(n_xi, count);
    for k in 0..count as i64 {
        out.set_column(k as usize, &traj.xi_at(start + k)?.xi);
    }
    Ok(out)
}

/// H_1 of a vector sequence as a plain matrix (columns are the vectors).
pub fn h1_matrix(seq: &[DVector<f64>]) -> DMatrix<f64> {
    let n = seq[0].len();
    let mut out = DMatrix::zeros(n, seq.len());
    for (j, s) in seq.iter().enumerate() {
        out.set_column(j, s);
    }
    out
}
