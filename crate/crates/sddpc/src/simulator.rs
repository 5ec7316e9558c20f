//! Ground-truth ARX plant simulation, disturbance generation, data
//! collection, open-loop predictor evaluation, and closed-loop Monte Carlo
//! experiments.

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha12Rng;

use crate::behavioral::{self, ExtendedState, IoTrajectory};
use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::numeric;
use crate::rng;

/// True ARX plant `y_k = Phi xi_k + Psi u_k + d_k` with uniformly
/// distributed disturbance supported on a polytopic set.
#[derive(Debug, Clone)]
pub struct PlantModel {
    pub phi: DMatrix<f64>,
    pub psi: DMatrix<f64>,
    pub t_ini: usize,
    pub d_set: Polytope,
}

impl PlantModel {
    pub fn new(phi: DMatrix<f64>, psi: DMatrix<f64>, t_ini: usize, d_set: Polytope) -> Result<Self> {
        let p = phi.nrows();
        let m = psi.ncols();
        if psi.nrows() != p {
            return Err(Error::dim("Phi and Psi row counts differ"));
        }
        if phi.ncols() != (m + p) * t_ini {
            return Err(Error::dim(format!(
                "Phi has {} columns, expected (m+p)*T_ini = {}",
                phi.ncols(),
                (m + p) * t_ini
            )));
        }
        if d_set.dim() != p {
            return Err(Error::dim("disturbance set dimension must equal p"));
        }
        Ok(PlantModel {
            phi,
            psi,
            t_ini,
            d_set,
        })
    }

    pub fn output_dim(&self) -> usize {
        self.phi.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.psi.ncols()
    }

    pub fn xi_dim(&self) -> usize {
        self.phi.ncols()
    }

    /// Random plant with the extended-state matrix scaled to spectral radius
    /// at most `rho_target`.
    pub fn random_stable(
        m: usize,
        p: usize,
        t_ini: usize,
        d_set: Polytope,
        rho_target: f64,
        seed: u64,
    ) -> Result<Self> {
        use rand::Rng;
        let mut r = rng::substream(seed, 0);
        let n_xi = (m + p) * t_ini;
        let mut phi = DMatrix::from_fn(p, n_xi, |_, _| r.random_range(-1.0..1.0));
        let psi = DMatrix::from_fn(p, m, |_, _| r.random_range(-0.5..0.5));
        loop {
            let a_tilde = extended_a_matrix(&phi, m, p, t_ini);
            if numeric::spectral_radius(&a_tilde) <= rho_target {
                break;
            }
            phi *= 0.9;
        }
        PlantModel::new(phi, psi, t_ini, d_set)
    }

    /// Uniform disturbance draw (rejection from the bounding box).
    pub fn draw_disturbance(&self, rng: &mut ChaCha12Rng) -> Result<DVector<f64>> {
        sample_box_rejection(&self.d_set, rng)
    }
}

/// Extended-state transition matrix `col(A_bar, Phi)` for given `Phi`.
pub fn extended_a_matrix(phi: &DMatrix<f64>, m: usize, p: usize, t_ini: usize) -> DMatrix<f64> {
    let n_xi = (m + p) * t_ini;
    let mut a = DMatrix::zeros(n_xi, n_xi);
    for k in 0..m * (t_ini - 1) {
        a[(k, m + k)] = 1.0;
    }
    for k in 0..p * (t_ini - 1) {
        a[(m * t_ini + k, m * t_ini + p + k)] = 1.0;
    }
    a.view_mut((n_xi - p, 0), (p, n_xi)).copy_from(phi);
    a
}

/// Extended-state input matrix `col(B_bar, Psi)` for given `Psi`.
pub fn extended_b_matrix(psi: &DMatrix<f64>, m: usize, p: usize, t_ini: usize) -> DMatrix<f64> {
    let n_xi = (m + p) * t_ini;
    let mut b = DMatrix::zeros(n_xi, m);
    b.view_mut((m * (t_ini - 1), 0), (m, m))
        .copy_from(&DMatrix::identity(m, m));
    b.view_mut((n_xi - p, 0), (p, m)).copy_from(psi);
    b
}

/// Disturbance injection `col(0, I_p)` into the extended state.
pub fn extended_e_matrix(m: usize, p: usize, t_ini: usize) -> DMatrix<f64> {
    let n_xi = (m + p) * t_ini;
    let mut e = DMatrix::zeros(n_xi, p);
    e.view_mut((n_xi - p, 0), (p, p))
        .copy_from(&DMatrix::identity(p, p));
    e
}

/// One plant step: output equation plus extended-state window shift.
pub fn simulate_plant_step(
    plant: &PlantModel,
    xi: &ExtendedState,
    u: &DVector<f64>,
    d: &DVector<f64>,
) -> Result<(DVector<f64>, ExtendedState)> {
    if xi.dim() != plant.xi_dim() || u.len() != plant.input_dim() || d.len() != plant.output_dim() {
        return Err(Error::dim("plant step dimension mismatch"));
    }
    let y = &plant.phi * &xi.xi + &plant.psi * u + d;
    let next = xi.advance(plant.input_dim(), plant.output_dim(), u, &y)?;
    Ok((y, next))
}

pub(crate) fn sample_box_rejection(set: &Polytope, rng: &mut ChaCha12Rng) -> Result<DVector<f64>> {
    let (lo, hi) = set.bounding_box()?;
    for _ in 0..100_000 {
        let x = rng::uniform_box(rng, &lo, &hi);
        if set.contains(&x)? {
            return Ok(x);
        }
    }
    Err(Error::Numerical(
        "rejection sampling acceptance rate too low".into(),
    ))
}

/// Recorded open-loop experiment: the trajectory handed to identification
/// plus the ground-truth disturbances behind it (columns for data indices
/// `-T_ini+1 ..= T`), kept for oracle checks.
#[derive(Debug, Clone)]
pub struct CollectedData {
    pub trajectory: IoTrajectory,
    pub disturbances: DMatrix<f64>,
}

impl CollectedData {
    /// Ground-truth disturbance columns for data indices 1..=T.
    pub fn disturbance_data(&self) -> DMatrix<f64> {
        let t_ini = self.trajectory.prefix_len();
        let t = self.trajectory.data_len();
        self.disturbances.columns(t_ini, t).into_owned()
    }

    /// Leading `free_dim` columns of the ground-truth disturbance data.
    pub fn true_free_block(&self, free_dim: usize) -> DMatrix<f64> {
        self.disturbance_data().columns(0, free_dim).into_owned()
    }
}

/// Record an input-output trajectory of length `t` under uniformly drawn
/// admissible inputs, starting from a zero extended state. Persistency of
/// excitation of the generalized input `(u, d)` of order `pe_order` is
/// verified; the draw is repeated up to 10 times before giving up.
pub fn collect_data(
    plant: &PlantModel,
    t: usize,
    excitation: &Polytope,
    pe_order: usize,
    seed: u64,
) -> Result<CollectedData> {
    if excitation.dim() != plant.input_dim() {
        return Err(Error::dim("excitation set dimension mismatch"));
    }
    let (m, p, t_ini) = (plant.input_dim(), plant.output_dim(), plant.t_ini);
    let total = t_ini + t;
    for attempt in 0..10 {
        let mut r = rng::substream(seed, 1000 + attempt);
        let mut xi = ExtendedState::zeros(m, p, t_ini);
        let mut inputs = Vec::with_capacity(total);
        let mut outputs = Vec::with_capacity(total);
        let mut disturbances = DMatrix::zeros(p, total);
        let mut gen_inputs = Vec::with_capacity(total);
        for k in 0..total {
            let u = sample_box_rejection(excitation, &mut r)?;
            let d = plant.draw_disturbance(&mut r)?;
            let (y, next) = simulate_plant_step(plant, &xi, &u, &d)?;
            disturbances.set_column(k, &d);
            gen_inputs.push(numeric::vcat(&[&u, &d]));
            inputs.push(u);
            outputs.push(y);
            xi = next;
        }
        let gen: Vec<DVector<f64>> = gen_inputs[t_ini..].to_vec();
        if pe_order + 1 <= gen.len() && behavioral::is_persistently_exciting(&gen, pe_order)? {
            let trajectory = IoTrajectory::new(inputs, outputs, t_ini)?;
            return Ok(CollectedData {
                trajectory,
                disturbances,
            });
        }
    }
    Err(Error::InsufficientExcitation(format!(
        "no PE trajectory of order {pe_order} after 10 draws"
    )))
}

/// Brute-force rollout of the true plant: stacked outputs plus the terminal
/// extended state.
pub fn rollout(
    plant: &PlantModel,
    xi0: &ExtendedState,
    inputs: &[DVector<f64>],
    disturbances: &[DVector<f64>],
) -> Result<(DVector<f64>, ExtendedState)> {
    if inputs.len() != disturbances.len() {
        return Err(Error::dim("rollout input/disturbance length mismatch"));
    }
    let p = plant.output_dim();
    let mut xi = xi0.clone();
    let mut ys = DVector::zeros(p * inputs.len());
    for (k, (u, d)) in inputs.iter().zip(disturbances).enumerate() {
        let (y, next) = simulate_plant_step(plant, &xi, u, d)?;
        ys.rows_mut(k * p, p).copy_from(&y);
        xi = next;
    }
    Ok((ys, xi))
}
