//! Randomized stress tests of the cubic large-sieve inequality, plus a
//! second-moment scan of Hecke L-values near the critical line.
//!
//! The inequality under test bounds the family mean square
//!
//! ```text
//!   Σ_{𝔫 admissible, N(𝔫) ∈ [Q, 2Q]}  |Σ_{m ∈ [M, 2M)} a(m)·χ_𝔫(m)|²
//!     ≤  C · (M + Q^{5/3}) · Σ_m |a(m)|²
//! ```
//!
//! for arbitrary complex coefficients, with the dual form exchanging the
//! roles of the coefficient index m and the modulus 𝔫. At fixed desk scale
//! the ε-power usually written into the constant is vacuous, so reports
//! record the raw ratio LHS / ((M + Q^{5/3})·Σ|a|²) for each random trial;
//! the duality principle predicts that direct and dual grid maxima track
//! each other. Both coefficient windows are dyadic: m runs over [M, 2M) and
//! modulus norms over [Q, 2Q].
//!
//! The second-moment scan sums |L(1/2 + it, ψ_m)|² over non-cube m up to a
//! ladder of cutoffs (cube m give principal characters and are tallied
//! separately) and fits the growth exponent of the sum in the cutoff.
//!
//! Every trial and every summand is assigned to a fixed position before any
//! parallel dispatch, and reductions run in index order, so reports are
//! bitwise reproducible for a given seed no matter how the work is
//! scheduled.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::characters::character_of_modulus;
use crate::eisenstein::enumerate_admissible;
use crate::lfunctions::LfError;
use crate::numerics::fit_loglog;
use crate::par;

/// Default consistency tolerance for the scan's L-values: the slope fit and
/// the nonvanishing tallies only need a few digits.
const SCAN_REL_TOL: f64 = 1e-4;

/// Default smoothing-cutoff floor for the scan: far below the high-accuracy
/// floor, because the scan runs hundreds of evaluations near Re s = 1/2.
const SCAN_T_FLOOR: f64 = 20_000.0;

#[derive(Debug)]
pub enum SieveError {
    /// An experiment field is outside its allowed range.
    InvalidExperiment { field: &'static str },
    /// An L-value inside the scan failed to converge; `m` is the twist.
    Hecke { m: u64, source: LfError },
}

impl fmt::Display for SieveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SieveError::InvalidExperiment { field } => {
                write!(f, "experiment field `{field}` must be at least 1")
            }
            SieveError::Hecke { m, source } => {
                write!(f, "L-value at twist m = {m} failed: {source}")
            }
        }
    }
}

impl std::error::Error for SieveError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SieveError::Hecke { source, .. } => Some(source),
            SieveError::InvalidExperiment { .. } => None,
        }
    }
}

/// How random coefficients are drawn for a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// Independent uniform ±1.
    PmOne,
    /// Independent uniform points on the unit circle.
    ComplexUnit,
    /// Independent standard complex Gaussians.
    Gaussian,
}

impl Sampler {
    pub fn name(self) -> &'static str {
        match self {
            Sampler::PmOne => "pm_one",
            Sampler::ComplexUnit => "complex_unit",
            Sampler::Gaussian => "gaussian",
        }
    }

    fn draw(self, rng: &mut ChaCha8Rng) -> Complex64 {
        match self {
            Sampler::PmOne => {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                Complex64::new(sign, 0.0)
            }
            Sampler::ComplexUnit => {
                let angle = std::f64::consts::TAU * rng.gen::<f64>();
                Complex64::new(angle.cos(), angle.sin())
            }
            Sampler::Gaussian => {
                // One Box–Muller pair per coefficient: the two orthogonal
                // normals become the real and imaginary parts.
                let u1 = 1.0 - rng.gen::<f64>();
                let u2 = rng.gen::<f64>();
                let r = (-2.0 * u1.ln()).sqrt();
                let angle = std::f64::consts::TAU * u2;
                Complex64::new(r * angle.cos(), r * angle.sin())
            }
        }
    }
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Sampler {
    type Err = SieveError;

    fn from_str(text: &str) -> Result<Self, SieveError> {
        match text {
            "pm_one" => Ok(Sampler::PmOne),
            "complex_unit" => Ok(Sampler::ComplexUnit),
            "gaussian" => Ok(Sampler::Gaussian),
            _ => Err(SieveError::InvalidExperiment { field: "sampler" }),
        }
    }
}

/// One randomized sieve experiment: coefficient support length, modulus
/// norm scale, trial count, RNG seed, and the coefficient distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveExperiment {
    pub m: u64,
    pub q: u64,
    pub trials: u32,
    pub seed: u64,
    pub sampler: Sampler,
}

impl SieveExperiment {
    fn validate(&self) -> Result<(), SieveError> {
        if self.m < 1 {
            return Err(SieveError::InvalidExperiment { field: "M" });
        }
        if self.q < 1 {
            return Err(SieveError::InvalidExperiment { field: "Q" });
        }
        if self.trials < 1 {
            return Err(SieveError::InvalidExperiment { field: "trials" });
        }
        Ok(())
    }
}

/// The outcome of a sieve experiment: per-trial normalized ratios, their
/// maximum and mean, and the normalization (M + Q^{5/3}) that divided them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveReport {
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub per_trial: Vec<f64>,
    pub rhs_scale: f64,
}

impl SieveReport {
    /// Flatten the report to the CSV schema shared by both sieve forms.
    pub fn csv_row(&self, experiment_id: &str, exp: &SieveExperiment) -> SieveCsvRow {
        SieveCsvRow {
            experiment_id: experiment_id.to_owned(),
            m: exp.m,
            q: exp.q,
            trials: exp.trials,
            seed: exp.seed,
            sampler: exp.sampler.name().to_owned(),
            max_ratio: self.max_ratio,
            mean_ratio: self.mean_ratio,
            rhs_scale: self.rhs_scale,
        }
    }
}

/// One CSV line of a sieve report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveCsvRow {
    pub experiment_id: String,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "Q")]
    pub q: u64,
    pub trials: u32,
    pub seed: u64,
    pub sampler: String,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub rhs_scale: f64,
}

/// The normalization (M + Q^{5/3}) of every ratio.
fn rhs_scale(m: u64, q: u64) -> f64 {
    m as f64 + (q as f64).powf(5.0 / 3.0)
}

/// Norms and character value rows χ_𝔫(m) for every admissible 𝔫 with
/// N(𝔫) ∈ [lo, hi], sampled at m ∈ [m_start, m_start + m_len).
fn twist_table(m_start: u64, m_len: u64, lo: u64, hi: u64) -> (Vec<u64>, Vec<Vec<Complex64>>) {
    let moduli = enumerate_admissible(lo as i64, hi as i64);
    let norms: Vec<u64> = moduli.iter().map(|md| md.norm() as u64).collect();
    let rows = par::map_ordered(moduli, move |md| {
        let chi = character_of_modulus(&md.n).expect("admissible moduli avoid the ramified prime");
        (m_start..m_start + m_len)
            .map(|m| chi.eval_complex(m))
            .collect::<Vec<Complex64>>()
    });
    (norms, rows)
}

/// Direct-orientation left side: Σ over rows of |row · a|².
fn lhs_rows(rows: &[Vec<Complex64>], a: &[Complex64]) -> f64 {
    let mut total = 0.0;
    for row in rows {
        let mut inner = Complex64::new(0.0, 0.0);
        for (phi, coeff) in row.iter().zip(a) {
            inner += phi * coeff;
        }
        total += inner.norm_sqr();
    }
    total
}

/// Dual-orientation left side: Σ over columns of |Σ_j b_j·φ_{j,·}|².
fn lhs_columns(rows: &[Vec<Complex64>], b: &[Complex64]) -> f64 {
    let cols = rows.first().map_or(0, Vec::len);
    let mut inner = vec![Complex64::new(0.0, 0.0); cols];
    for (row, coeff) in rows.iter().zip(b) {
        for (slot, phi) in inner.iter_mut().zip(row) {
            *slot += coeff * phi;
        }
    }
    inner.iter().map(|z| z.norm_sqr()).sum()
}

/// The direct left side again, through the Gram matrix Φ*Φ: the quadratic
/// form a*(Φ*Φ)a must match Σ|Φa|² — an independent arithmetic route used
/// to validate the accumulation.
#[cfg(test)]
fn lhs_gram(rows: &[Vec<Complex64>], a: &[Complex64]) -> f64 {
    let cols = a.len();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..cols {
        let mut fold = Complex64::new(0.0, 0.0);
        for k in 0..cols {
            let mut gram_ik = Complex64::new(0.0, 0.0);
            for row in rows {
                gram_ik += row[i].conj() * row[k];
            }
            fold += gram_ik * a[k];
        }
        total += a[i].conj() * fold;
    }
    total.re
}

/// The dual left side through the other Gram matrix ΦΦ*.
fn lhs_gram_dual(rows: &[Vec<Complex64>], b: &[Complex64]) -> f64 {
    let mut total = Complex64::new(0.0, 0.0);
    for (j, row_j) in rows.iter().enumerate() {
        let mut fold = Complex64::new(0.0, 0.0);
        for (l, row_l) in rows.iter().enumerate() {
            let mut gram_jl = Complex64::new(0.0, 0.0);
            for (pj, pl) in row_j.iter().zip(row_l) {
                gram_jl += pj * pl.conj();
            }
            fold += gram_jl * b[l];
        }
        total += b[j].conj() * fold;
    }
    total.re
}

/// Coefficients for one trial: a fresh generator seeded by the experiment
/// seed on the trial's own stream, drawn in index order. Identical no
/// matter which thread runs the trial.
fn draw_coefficients(sampler: Sampler, seed: u64, trial: u64, len: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    (0..len).map(|_| sampler.draw(&mut rng)).collect()
}

fn ratio(lhs: f64, scale: f64, sq_norm: f64) -> f64 {
    if sq_norm == 0.0 {
        0.0
    } else {
        lhs / (scale * sq_norm)
    }
}

/// Assemble per-trial ratios into a report; max and mean are reduced in
/// trial order.
fn assemble(per_trial: Vec<f64>, scale: f64) -> SieveReport {
    let mut max_ratio = 0.0f64;
    let mut sum = 0.0f64;
    for &r in &per_trial {
        if r > max_ratio {
            max_ratio = r;
        }
        sum += r;
    }
    let mean_ratio = sum / per_trial.len() as f64;
    SieveReport {
        max_ratio,
        mean_ratio,
        per_trial,
        rhs_scale: scale,
    }
}

/// Run the direct form: random coefficients a(m) on m ∈ [M, 2M), left side
/// summed over admissible moduli with norm in [Q, 2Q].
pub fn large_sieve_ratio(exp: &SieveExperiment) -> Result<SieveReport, SieveError> {
    exp.validate()?;
    let (_norms, rows) = twist_table(exp.m, exp.m, exp.q, 2 * exp.q);
    let scale = rhs_scale(exp.m, exp.q);
    let seed = exp.seed;
    let sampler = exp.sampler;
    let len = exp.m as usize;
    let per_trial = par::map_range(exp.trials as usize, |t| {
        let a = draw_coefficients(sampler, seed, t as u64, len);
        let sq_norm: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        ratio(lhs_rows(&rows, &a), scale, sq_norm)
    });
    Ok(assemble(per_trial, scale))
}

/// Run the dual form: random coefficients b(𝔫) on the admissible moduli
/// with norm in [Q, 2Q], left side summed over m ∈ [M, 2M).
pub fn dual_large_sieve_ratio(exp: &SieveExperiment) -> Result<SieveReport, SieveError> {
    exp.validate()?;
    let (norms, rows) = twist_table(exp.m, exp.m, exp.q, 2 * exp.q);
    let scale = rhs_scale(exp.m, exp.q);
    let seed = exp.seed;
    let sampler = exp.sampler;
    let len = norms.len();
    let per_trial = par::map_range(exp.trials as usize, |t| {
        let b = draw_coefficients(sampler, seed, t as u64, len);
        let sq_norm: f64 = b.iter().map(|z| z.norm_sqr()).sum();
        ratio(lhs_columns(&rows, &b), scale, sq_norm)
    });
    Ok(assemble(per_trial, scale))
}

/// One cutoff of the second-moment scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentRow {
    /// The cutoff M of this row.
    pub m_cut: u64,
    /// Σ |L(1/2+it, ψ_m)|² over non-cube m ≤ M.
    pub sum: f64,
    /// The excluded principal-character terms (cube m ≤ M), tallied apart.
    pub principal_sum: f64,
    /// How many non-cube twists entered `sum`.
    pub count: u64,
}

/// The full scan: one row per requested cutoff and the fitted growth
/// exponent of `sum` against `m_cut` (needs at least two positive rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentScan {
    pub t: f64,
    pub rows: Vec<SecondMomentRow>,
    pub slope: Option<f64>,
}

fn is_cube(m: u64) -> bool {
    let r = (m as f64).cbrt().round() as u64;
    (r.saturating_sub(1)..=r + 1).any(|k| k.checked_pow(3) == Some(m))
}

/// Second-moment scan with default accuracy budget.
pub fn second_moment_scan(m_list: &[u64], t: f64) -> Result<SecondMomentScan, SieveError> {
    second_moment_scan_budgeted(m_list, t, SCAN_REL_TOL, SCAN_T_FLOOR, 1.0)
}

/// Second-moment scan with caller-chosen consistency tolerance, smoothing
/// floor, and smoothing-scale multiplier (two-scale audits double the
/// multiplier and compare).
pub fn second_moment_scan_budgeted(
    m_list: &[u64],
    t: f64,
    tol: f64,
    t_floor: f64,
    scale: f64,
) -> Result<SecondMomentScan, SieveError> {
    let m_max = m_list.iter().copied().max().unwrap_or(0);
    let s = Complex64::new(0.5, t);
    let values = par::map_range(m_max as usize, |i| {
        let m = i as u64 + 1;
        let value = crate::lfunctions::hecke_l_budgeted(s, m as i64, tol, t_floor, scale)
            .map_err(|source| SieveError::Hecke { m, source })?;
        Ok((value.value.norm_sqr(), is_cube(m)))
    });
    let mut square_mods = Vec::with_capacity(values.len());
    for v in values {
        square_mods.push(v?);
    }
    let rows: Vec<SecondMomentRow> = m_list
        .iter()
        .map(|&m_cut| {
            let mut sum = 0.0;
            let mut principal_sum = 0.0;
            let mut count = 0u64;
            for &(sq, cube) in square_mods.iter().take(m_cut as usize) {
                if cube {
                    principal_sum += sq;
                } else {
                    sum += sq;
                    count += 1;
                }
            }
            SecondMomentRow {
                m_cut,
                sum,
                principal_sum,
                count,
            }
        })
        .collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for row in &rows {
        if row.sum > 0.0 {
            xs.push(row.m_cut as f64);
            ys.push(row.sum);
        }
    }
    let slope = if xs.len() >= 2 {
        Some(fit_loglog(&xs, &ys))
    } else {
        None
    };
    Ok(SecondMomentScan { t, rows, slope })
}
