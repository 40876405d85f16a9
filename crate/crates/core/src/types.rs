//! Suspension sub-types, independent parameter sets, and the fully resolved
//! cap metric data.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::geometry::{triangle_angles, VertexAngles};

/// The five suspension families. III-OAE carries the index of its second OAS
/// base vertex; III-OAS carries the winding count of the base polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubType {
    IOee,
    IIAee,
    IIOee,
    IIIOae { oas_index: usize },
    IIIOas { winding: u32 },
}

impl SubType {
    pub fn is_type3(&self) -> bool {
        matches!(self, SubType::IIIOae { .. } | SubType::IIIOas { .. })
    }

    /// Base vertexes at which opposite face angles are supplementary rather
    /// than equal.
    pub fn oas_vertexes(&self) -> Vec<usize> {
        match self {
            SubType::IIIOae { oas_index } => vec![1, *oas_index],
            _ => vec![],
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SubType::IOee => "I-OEE",
            SubType::IIAee => "II-AEE",
            SubType::IIOee => "II-OEE",
            SubType::IIIOae { .. } => "III-OAE",
            SubType::IIIOas { .. } => "III-OAS",
        }
    }
}

impl fmt::Display for SubType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Independent parameters of one suspension instance.
///
/// Angles here are in degrees, matching the external file format and the
/// printed tables; everything downstream of expansion/completion is radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub subtype: SubType,
    pub n: usize,
    pub data: ParamData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ParamData {
    /// Edge-length parameterization for sub-types I/II. `m` is used only by
    /// II-OEE (l_1..l_M, m_1..m_M); I-OEE and II-AEE give all of l_1..l_N.
    Edges {
        l: Vec<f64>,
        m: Vec<f64>,
        base: Vec<f64>,
    },
    /// Seed parameterization for sub-type III: one length plus seed angles in
    /// degrees, then the free odd-index apical angles alpha_3, alpha_5, ...,
    /// alpha_{N-3}.
    Seed {
        l1: f64,
        alpha1: f64,
        beta1: f64,
        alpha2: f64,
        beta2: f64,
        odd_alphas: Vec<f64>,
    },
}

impl ParameterSet {
    pub fn m(&self) -> usize {
        self.n / 2
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let n = self.n;
        if n < 4 || n % 2 != 0 {
            return Err(ParamError::Invalid(format!("N must be even and >= 4, got {n}")));
        }
        let m = self.m();
        match (&self.subtype, &self.data) {
            (SubType::IOee | SubType::IIAee, ParamData::Edges { l, m: mm, base }) => {
                if l.len() != n {
                    return Err(ParamError::Invalid(format!("need {n} apical lengths l, got {}", l.len())));
                }
                if !mm.is_empty() {
                    return Err(ParamError::Invalid("m lengths are implied for this sub-type".into()));
                }
                if base.len() != m {
                    return Err(ParamError::Invalid(format!("need {m} base lengths L, got {}", base.len())));
                }
                check_positive(l).and_then(|()| check_positive(base))
            }
            (SubType::IIOee, ParamData::Edges { l, m: mm, base }) => {
                if l.len() != m || mm.len() != m || base.len() != m {
                    return Err(ParamError::Invalid(format!(
                        "need {m} lengths in each of l, m, L; got {}, {}, {}",
                        l.len(),
                        mm.len(),
                        base.len()
                    )));
                }
                check_positive(l)
                    .and_then(|()| check_positive(mm))
                    .and_then(|()| check_positive(base))
            }
            (SubType::IIIOae { oas_index }, ParamData::Seed { .. }) => {
                // the octahedron (N=4) pins the second OAS vertex at v_3
                let hi = (n - 2).max(3);
                if !(3..=hi).contains(oas_index) {
                    return Err(ParamError::Invalid(format!(
                        "OAS vertex index {oas_index} outside 3..={hi}"
                    )));
                }
                self.validate_seed()
            }
            (SubType::IIIOas { winding }, ParamData::Seed { .. }) => {
                if *winding < 1 {
                    return Err(ParamError::Invalid("winding count must be >= 1".into()));
                }
                self.validate_seed()
            }
            _ => Err(ParamError::Invalid(format!(
                "parameter data does not match sub-type {}",
                self.subtype
            ))),
        }
    }

    fn validate_seed(&self) -> Result<(), ParamError> {
        let ParamData::Seed { l1, alpha1, beta1, alpha2, beta2, odd_alphas } = &self.data else {
            unreachable!()
        };
        if *l1 <= 0.0 {
            return Err(ParamError::Invalid("l1 must be positive".into()));
        }
        let expected = if self.n == 4 { 0 } else { (self.n - 4) / 2 };
        if odd_alphas.len() != expected {
            return Err(ParamError::Invalid(format!(
                "need {expected} odd-index seed angles, got {}",
                odd_alphas.len()
            )));
        }
        for (name, a) in [("alpha1", alpha1), ("beta1", beta1), ("alpha2", alpha2), ("beta2", beta2)] {
            if !(0.0..180.0).contains(a) || *a == 0.0 {
                return Err(ParamError::Invalid(format!("{name} must lie in (0, 180) degrees")));
            }
        }
        for a in odd_alphas {
            if !(0.0..180.0).contains(a) || *a == 0.0 {
                return Err(ParamError::Invalid("seed angles must lie in (0, 180) degrees".into()));
            }
        }
        Ok(())
    }
}

fn check_positive(xs: &[f64]) -> Result<(), ParamError> {
    if xs.iter().all(|&x| x > 0.0 && x.is_finite()) {
        Ok(())
    } else {
        Err(ParamError::Invalid("all lengths must be positive and finite".into()))
    }
}

/// Complete resolved metric data of a suspension: every edge length and face
/// angle on both caps. Arrays are 1-indexed with slot 0 unused.
///
/// Face `f_k` spans `u v_{k+1} v_k` with sides `(L_k, l_{k+1}, l_k)` and
/// angles `alpha_k` at u, `beta_k` at v_k, `gamma_k` at v_{k+1}. Face `F_k`
/// spans `w v_k v_{k+1}` with sides `(L_k, m_{k+1}, m_k)` and angles `big_a_k`
/// at w, `big_b_k` at v_k, `big_g_k` at v_{k+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapGeometry {
    pub subtype: SubType,
    pub n: usize,
    pub l: Vec<f64>,
    pub m: Vec<f64>,
    pub base: Vec<f64>,
    pub alpha: Vec<f64>,
    pub big_a: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub big_b: Vec<f64>,
    pub big_g: Vec<f64>,
}

impl CapGeometry {
    pub fn empty(subtype: SubType, n: usize) -> Self {
        let z = vec![0.0; n + 1];
        CapGeometry {
            subtype,
            n,
            l: z.clone(),
            m: z.clone(),
            base: z.clone(),
            alpha: z.clone(),
            big_a: z.clone(),
            beta: z.clone(),
            gamma: z.clone(),
            big_b: z.clone(),
            big_g: z,
        }
    }

    pub fn m_half(&self) -> usize {
        self.n / 2
    }

    /// Successor index on the base cycle (1-indexed).
    pub fn next(&self, k: usize) -> usize {
        k % self.n + 1
    }

    /// Predecessor index on the base cycle (1-indexed).
    pub fn prev(&self, k: usize) -> usize {
        (k + self.n - 2) % self.n + 1
    }

    /// Solve all face angles from the edge-length table.
    pub fn fill_angles_from_lengths(&mut self) -> Result<(), ParamError> {
        for k in 1..=self.n {
            let kp = self.next(k);
            let (a, b, g) = checked_triangle(self.base[k], self.l[kp], self.l[k], k)?;
            self.alpha[k] = a;
            self.beta[k] = b;
            self.gamma[k] = g;
            let (aa, bb, gg) = checked_triangle(self.base[k], self.m[kp], self.m[k], k)?;
            self.big_a[k] = aa;
            self.big_b[k] = bb;
            self.big_g[k] = gg;
        }
        Ok(())
    }

    /// The four face angles meeting at base vertex v_k, in solver slot order.
    pub fn vertex_angles(&self, k: usize) -> VertexAngles {
        let km = self.prev(k);
        VertexAngles {
            beta: self.beta[k],
            gamma_prev: self.gamma[km],
            big_gamma_prev: self.big_g[km],
            big_b: self.big_b[k],
        }
    }

    /// Largest edge length; the natural scale for tolerances.
    pub fn scale(&self) -> f64 {
        self.l[1..]
            .iter()
            .chain(&self.m[1..])
            .chain(&self.base[1..])
            .fold(0.0_f64, |acc, &x| acc.max(x))
    }

    /// Worst relative law-of-sines mismatch over all faces.
    pub fn law_of_sines_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 1..=self.n {
            let kp = self.next(k);
            let r1 = self.base[k] / self.alpha[k].sin();
            let r2 = self.l[kp] / self.beta[k].sin();
            let r3 = self.l[k] / self.gamma[k].sin();
            worst = worst.max(((r2 - r1) / r1).abs()).max(((r3 - r1) / r1).abs());
            let s1 = self.base[k] / self.big_a[k].sin();
            let s2 = self.m[kp] / self.big_b[k].sin();
            let s3 = self.m[k] / self.big_g[k].sin();
            worst = worst.max(((s2 - s1) / s1).abs()).max(((s3 - s1) / s1).abs());
        }
        worst
    }

    /// Worst face angle-sum deviation from pi.
    pub fn angle_sum_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 1..=self.n {
            worst = worst.max((self.alpha[k] + self.beta[k] + self.gamma[k] - PI).abs());
            worst = worst.max((self.big_a[k] + self.big_b[k] + self.big_g[k] - PI).abs());
        }
        worst
    }
}

fn checked_triangle(a: f64, b: f64, c: f64, face: usize) -> Result<(f64, f64, f64), ParamError> {
    if a <= 0.0 || b <= 0.0 || c <= 0.0 || a + b <= c || b + c <= a || c + a <= b {
        return Err(ParamError::TriangleViolation(face));
    }
    Ok(triangle_angles(a, b, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges_params(subtype: SubType, n: usize, l: Vec<f64>, m: Vec<f64>, base: Vec<f64>) -> ParameterSet {
        ParameterSet { subtype, n, data: ParamData::Edges { l, m, base } }
    }

    #[test]
    fn validate_accepts_well_formed_sets() {
        let p = edges_params(SubType::IOee, 4, vec![10.0, 11.0, 12.0, 13.0], vec![], vec![8.0, 9.0]);
        assert!(p.validate().is_ok());
        let p = edges_params(SubType::IIOee, 4, vec![10.0, 13.0], vec![16.0, 12.0], vec![8.0, 7.0]);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn validate_rejects_odd_n_and_wrong_counts() {
        let p = edges_params(SubType::IOee, 5, vec![1.0; 5], vec![], vec![1.0; 2]);
        assert!(p.validate().is_err());
        let p = edges_params(SubType::IOee, 4, vec![1.0; 3], vec![], vec![1.0; 2]);
        assert!(p.validate().is_err());
    }

    #[test]
    fn validate_rejects_bad_oas_index() {
        let seed = ParamData::Seed {
            l1: 10.0,
            alpha1: 45.0,
            beta1: 55.0,
            alpha2: 30.0,
            beta2: 20.0,
            odd_alphas: vec![],
        };
        let p = ParameterSet { subtype: SubType::IIIOae { oas_index: 3 }, n: 4, data: seed.clone() };
        assert!(p.validate().is_ok());
        let p = ParameterSet { subtype: SubType::IIIOae { oas_index: 7 }, n: 8, data: seed.clone() };
        assert!(p.validate().is_err());
        let p = ParameterSet { subtype: SubType::IIIOas { winding: 1 }, n: 4, data: seed };
        assert!(p.validate().is_ok());
    }

    #[test]
    fn triangle_violation_reports_face() {
        let mut g = CapGeometry::empty(SubType::IOee, 4);
        g.l = vec![0.0, 1.0, 1.0, 1.0, 1.0];
        g.m = g.l.clone();
        g.base = vec![0.0, 5.0, 1.0, 5.0, 1.0];
        match g.fill_angles_from_lengths() {
            Err(ParamError::TriangleViolation(1)) => {}
            other => panic!("expected violation on face 1, got {other:?}"),
        }
    }
}
