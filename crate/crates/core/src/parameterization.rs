//! From independent parameters to a fully resolved cap: length expansion for
//! the symmetric sub-types, folding constraints for the axial sub-types, and
//! the recursive angle completion that builds III-OAE/III-OAS caps from a
//! five-angle seed.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::construction::{place_initial_faces, place_next};
use crate::error::ParamError;
use crate::geometry::{acot, cot_half, dihedral, quadratic_roots, solve_dihedral, tan_half, vertex_quadratic, QuadraticCoeffs};
use crate::types::{CapGeometry, ParamData, ParameterSet, SubType};

/// Expand the edge-length parameter set of a sub-type I/II suspension into a
/// full metric table and solve all face angles.
pub fn expand_type12(params: &ParameterSet) -> Result<CapGeometry, ParamError> {
    params.validate()?;
    let n = params.n;
    let m = params.m();
    let ParamData::Edges { l, m: mm, base } = &params.data else {
        return Err(ParamError::Invalid("edge-length data required".into()));
    };
    let mut g = CapGeometry::empty(params.subtype, n);
    match params.subtype {
        SubType::IOee => {
            // point symmetry: opposite apical edges swap caps, base repeats
            for k in 1..=n {
                g.l[k] = l[k - 1];
            }
            for k in 1..=m {
                g.base[k] = base[k - 1];
                g.base[k + m] = base[k - 1];
                g.m[k] = g.l[k + m];
                g.m[k + m] = g.l[k];
            }
        }
        SubType::IIAee => {
            // mirror symmetry through v_1 and v_{M+1}
            for k in 1..=n {
                g.l[k] = l[k - 1];
            }
            g.m[1] = g.l[1];
            for k in 2..=n {
                g.m[k] = g.l[n - k + 2];
            }
            for k in 1..=m {
                g.base[k] = base[k - 1];
                g.base[n + 1 - k] = base[k - 1];
            }
        }
        SubType::IIOee => {
            // mirror symmetry swapping the caps: both caps repeat with period M
            for k in 1..=m {
                g.l[k] = l[k - 1];
                g.l[k + m] = l[k - 1];
                g.m[k] = mm[k - 1];
                g.m[k + m] = mm[k - 1];
                g.base[k] = base[k - 1];
                g.base[k + m] = base[k - 1];
            }
        }
        _ => return Err(ParamError::Invalid("sub-type III uses seed completion".into())),
    }
    g.fill_angles_from_lengths()?;
    Ok(g)
}

/// Residuals of the two flat-folding constraints, for both the u-cap angle
/// set and the w-cap angle set.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FoldingReport {
    /// (plain sum constraint, alternating sum constraint) over alpha_k.
    pub alpha_residuals: (f64, f64),
    /// The same two constraints over the w-cap apex angles A_k.
    pub apex_residuals: (f64, f64),
}

impl FoldingReport {
    pub fn max_residual(&self) -> f64 {
        self.alpha_residuals
            .0
            .abs()
            .max(self.alpha_residuals.1.abs())
            .max(self.apex_residuals.0.abs())
            .max(self.apex_residuals.1.abs())
    }
}

fn folding_residuals(angles: &[f64], n: usize, subtype: &SubType) -> (f64, f64) {
    match subtype {
        SubType::IIIOae { oas_index } => {
            let lx = *oas_index;
            let mut s = 0.0;
            let mut alt = 0.0;
            for k in 1..=n {
                let sign = if k < lx { 1.0 } else { -1.0 };
                s += sign * angles[k];
                let par = if k % 2 == 1 { 1.0 } else { -1.0 };
                alt += sign * par * angles[k];
            }
            (s, alt)
        }
        SubType::IIIOas { winding } => {
            let mut s = 0.0;
            let mut alt = 0.0;
            for k in 1..=n {
                s += angles[k];
                alt += if k % 2 == 1 { angles[k] } else { -angles[k] };
            }
            (s - 2.0 * (*winding as f64) * PI, alt)
        }
        _ => (f64::NAN, f64::NAN),
    }
}

/// Evaluate the flat-folding angle constraints of a sub-type III cap.
pub fn check_folding_constraints(geom: &CapGeometry) -> FoldingReport {
    FoldingReport {
        alpha_residuals: folding_residuals(&geom.alpha, geom.n, &geom.subtype),
        apex_residuals: folding_residuals(&geom.big_a, geom.n, &geom.subtype),
    }
}

const GEN_REL_TOL: f64 = 1e-8;
const CROSS_CHECK_TOL: f64 = 1e-6;
/// Completions whose angle tables agree within this (radians) are one root
/// reached through different coefficient cases.
const MERGE_TOL: f64 = 1e-7 * PI / 180.0;

fn seed_radians(params: &ParameterSet) -> Result<(f64, f64, f64, f64, f64, Vec<f64>), ParamError> {
    let ParamData::Seed { l1, alpha1, beta1, alpha2, beta2, odd_alphas } = &params.data else {
        return Err(ParamError::Invalid("seed data required".into()));
    };
    let d = |x: f64| x.to_radians();
    Ok((
        *l1,
        d(*alpha1),
        d(*beta1),
        d(*alpha2),
        d(*beta2),
        odd_alphas.iter().map(|&x| d(x)).collect(),
    ))
}

struct SeedFaces {
    beta3: f64,
    b1: f64,
    l2: f64,
    l3: f64,
    base1: f64,
    base2: f64,
    gamma1: f64,
    gamma2: f64,
    big_g1: f64,
    big_b2: f64,
    big_b3: f64,
}

/// Both root branches of the generating-relation quadratic at the seeded pair
/// of faces: returns every (beta_3, B_1) candidate.
fn initial_candidates(
    l1: f64,
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    v3_oas: bool,
) -> Vec<SeedFaces> {
    let g1 = PI - a1 - b1;
    let g2 = PI - a2 - b2;
    let mut out = Vec::new();
    if !(0.0..PI).contains(&g1) || !(0.0..PI).contains(&g2) || g1 == 0.0 || g2 == 0.0 {
        return out;
    }
    let l2 = l1 * b1.sin() / g1.sin();
    let base1 = l1 * a1.sin() / g1.sin();
    let l3 = l2 * b2.sin() / g2.sin();
    let base2 = l2 * a2.sin() / g2.sin();
    let big_g1 = b2;
    let big_b2 = g1;
    let big_b3 = if v3_oas { PI - g2 } else { g2 };
    let a = base2 * big_g1.sin() / (base1 * big_b2.sin());
    let b = (base2 * big_g1.cos() - base1 * big_b2.cos()) / (base1 * big_b2.sin());
    let kcs = [
        tan_half(b1) * cot_half(big_b3),
        -tan_half(b1) * tan_half(big_b3),
        -cot_half(b1) * cot_half(big_b3),
        cot_half(b1) * tan_half(big_b3),
    ];
    let kts = [
        cot_half(b1) * cot_half(big_b3),
        -cot_half(b1) * tan_half(big_b3),
        -tan_half(b1) * cot_half(big_b3),
        tan_half(b1) * tan_half(big_b3),
    ];
    for (use_kc, k) in kcs.iter().map(|&k| (true, k)).chain(kts.iter().map(|&k| (false, k))) {
        let (qa, qb, qc) = if v3_oas {
            if use_kc {
                (k + a, 2.0 * b * k, -k * (a * k + 1.0))
            } else {
                (k - a, 2.0 * b * k, k * (a * k - 1.0))
            }
        } else if use_kc {
            (k - a, -2.0 * b * k, k * (a * k - 1.0))
        } else {
            (k + a, -2.0 * b * k, -k * (a * k + 1.0))
        };
        let Ok((y1, y2)) = quadratic_roots(&QuadraticCoeffs { a: qa, b: qb, c: qc }) else {
            continue;
        };
        let mut ys = vec![y1, y2];
        ys.dedup_by(|p, q| (*p - *q).abs() < 1e-15);
        for y in ys {
            if y <= 1e-9 {
                continue;
            }
            let beta3 = 2.0 * (1.0 / y).atan();
            if !(1e-9..PI - 1e-9).contains(&beta3) {
                continue;
            }
            let cot_b3 = beta3.cos() / beta3.sin();
            let cot_b1 = if v3_oas { (-cot_b3 - b) / a } else { (cot_b3 - b) / a };
            let big_b1 = acot(cot_b1);
            if !(1e-9..PI - 1e-9).contains(&big_b1) {
                continue;
            }
            let gen = cot_half(beta3) - k * if use_kc { cot_half(big_b1) } else { tan_half(big_b1) };
            if gen.abs() > GEN_REL_TOL * cot_half(beta3).abs().max(1.0) {
                continue;
            }
            out.push(SeedFaces {
                beta3,
                b1: big_b1,
                l2,
                l3,
                base1,
                base2,
                gamma1: g1,
                gamma2: g2,
                big_g1,
                big_b2,
                big_b3,
            });
        }
    }
    out
}

fn in_open(x: f64) -> bool {
    (1e-12..PI - 1e-12).contains(&x)
}

/// All valid octahedron (N=4) completions of a sub-type III seed, via the
/// closed-form angle relations of the four-face cap.
pub fn complete_octahedron(params: &ParameterSet) -> Result<Vec<CapGeometry>, ParamError> {
    params.validate()?;
    if params.n != 4 {
        return Err(ParamError::Invalid("octahedron completion requires N=4".into()));
    }
    if !params.subtype.is_type3() {
        return Err(ParamError::Invalid("sub-type III required".into()));
    }
    let (l1, a1, b1, a2, b2, _) = seed_radians(params)?;
    let oas = params.subtype.oas_vertexes();
    let is_oas = |k: usize| oas.contains(&k);
    let v3_oas = is_oas(3);
    let apex_oae = matches!(params.subtype, SubType::IIIOae { .. });
    let mut out: Vec<CapGeometry> = Vec::new();
    for c in initial_candidates(l1, a1, b1, a2, b2, v3_oas) {
        let mut g = CapGeometry::empty(params.subtype, 4);
        g.l[1] = l1;
        g.l[2] = c.l2;
        g.l[3] = c.l3;
        g.base[1] = c.base1;
        g.base[2] = c.base2;
        g.alpha[1] = a1;
        g.alpha[2] = a2;
        if apex_oae {
            g.alpha[3] = a1;
            g.alpha[4] = a2;
        } else {
            g.alpha[3] = PI - a1;
            g.alpha[4] = PI - a2;
        }
        g.beta[1] = b1;
        g.beta[2] = b2;
        g.beta[3] = c.beta3;
        g.gamma[1] = c.gamma1;
        g.gamma[2] = c.gamma2;
        g.gamma[3] = PI - g.alpha[3] - g.beta[3];
        g.big_g[1] = c.big_g1;
        g.big_b[1] = c.b1;
        g.big_b[2] = c.big_b2;
        g.big_b[3] = c.big_b3;
        g.big_g[2] = if v3_oas { PI - g.beta[3] } else { g.beta[3] };
        g.gamma[4] = if is_oas(1) { PI - g.big_b[1] } else { g.big_b[1] };
        g.big_g[4] = if is_oas(1) { PI - g.beta[1] } else { g.beta[1] };
        g.beta[4] = PI - g.alpha[4] - g.gamma[4];
        if !in_open(g.beta[4]) || !in_open(g.gamma[3]) {
            continue;
        }
        g.big_g[3] = if is_oas(4) { PI - g.beta[4] } else { g.beta[4] };
        g.big_b[4] = if is_oas(4) { PI - g.gamma[3] } else { g.gamma[3] };
        let mut ok = in_open(g.big_g[3]) && in_open(g.big_b[4]);
        for k in 1..=4 {
            g.big_a[k] = PI - g.big_b[k] - g.big_g[k];
            ok &= in_open(g.big_a[k]);
        }
        if !ok {
            continue;
        }
        g.l[4] = g.l[3] * g.beta[3].sin() / g.gamma[3].sin();
        g.base[3] = g.l[3] * g.alpha[3].sin() / g.gamma[3].sin();
        g.base[4] = g.l[4] * g.alpha[4].sin() / g.gamma[4].sin();
        let l1_chk = g.l[4] * g.beta[4].sin() / g.gamma[4].sin();
        if (l1_chk - l1).abs() > CROSS_CHECK_TOL * l1 {
            continue;
        }
        g.m[1] = g.base[1] * g.big_g[1].sin() / g.big_a[1].sin();
        g.m[2] = g.base[1] * g.big_b[1].sin() / g.big_a[1].sin();
        g.m[3] = g.base[2] * g.big_b[2].sin() / g.big_a[2].sin();
        g.m[4] = g.base[3] * g.big_b[3].sin() / g.big_a[3].sin();
        let m1_chk = g.base[4] * g.big_b[4].sin() / g.big_a[4].sin();
        let m2_chk = g.base[2] * g.big_g[2].sin() / g.big_a[2].sin();
        if (m1_chk - g.m[1]).abs() > CROSS_CHECK_TOL * g.m[1] {
            continue;
        }
        if (m2_chk - g.m[2]).abs() > CROSS_CHECK_TOL * g.m[2] {
            continue;
        }
        push_unique(&mut out, g);
    }
    if out.is_empty() {
        return Err(ParamError::NoCompletion);
    }
    Ok(out)
}

fn push_unique(out: &mut Vec<CapGeometry>, g: CapGeometry) {
    let same = |a: &CapGeometry, b: &CapGeometry| {
        (1..=a.n).all(|k| {
            (a.beta[k] - b.beta[k]).abs() < MERGE_TOL && (a.big_b[k] - b.big_b[k]).abs() < MERGE_TOL
        })
    };
    if !out.iter().any(|h| same(h, &g)) {
        out.push(g);
    }
}

/// k-value candidates for the recursion-step generating relation, built from
/// the anchor vertex's (B, beta) pair.
fn step_kvals(anchor_b: f64, anchor_beta: f64) -> ([f64; 4], [f64; 4]) {
    let tb = tan_half(anchor_b);
    let cb = cot_half(anchor_b);
    let tbe = tan_half(anchor_beta);
    let cbe = cot_half(anchor_beta);
    (
        [cb * tbe, tb * cbe, -tb * tbe, -cb * cbe],
        [-tb * cbe, -cb * tbe, cb * cbe, tb * tbe],
    )
}

/// Solve the recursion quadratic at a pair vertex: every valid (B_j, beta_j).
fn solve_pair_vertex(
    l_prev: f64,
    be_prev: f64,
    m_prev: f64,
    b_prev: f64,
    anchor_b: f64,
    anchor_beta: f64,
    j_oas: bool,
) -> Vec<(f64, f64)> {
    let a = m_prev * b_prev.sin() / (l_prev * be_prev.sin());
    let b = (m_prev * b_prev.cos() - l_prev * be_prev.cos()) / (l_prev * be_prev.sin());
    let (kcs, kts) = step_kvals(anchor_b, anchor_beta);
    let mut out = Vec::new();
    for (use_kc, k) in kcs.iter().map(|&k| (true, k)).chain(kts.iter().map(|&k| (false, k))) {
        let (qa, qb, qc) = if use_kc {
            (k - a, if j_oas { 2.0 * b * k } else { -2.0 * b * k }, k * (a * k - 1.0))
        } else {
            (k + a, if j_oas { 2.0 * b * k } else { -2.0 * b * k }, -k * (a * k + 1.0))
        };
        let Ok((y1, y2)) = quadratic_roots(&QuadraticCoeffs { a: qa, b: qb, c: qc }) else {
            continue;
        };
        let mut ys = vec![y1, y2];
        ys.dedup_by(|p, q| (*p - *q).abs() < 1e-15);
        for y in ys {
            if y <= 1e-9 {
                continue;
            }
            let big_bj = 2.0 * (1.0 / y).atan();
            if !(1e-9..PI - 1e-9).contains(&big_bj) {
                continue;
            }
            let cot_bj = big_bj.cos() / big_bj.sin();
            let cot_bej = if j_oas { (cot_bj + b) / a } else { (cot_bj - b) / a };
            let bej = acot(cot_bej);
            if !(1e-9..PI - 1e-9).contains(&bej) {
                continue;
            }
            let gen = cot_half(big_bj) - k * if use_kc { cot_half(bej) } else { tan_half(bej) };
            if gen.abs() > GEN_REL_TOL * cot_half(big_bj).abs().max(1.0) {
                continue;
            }
            out.push((big_bj, bej));
        }
    }
    out
}

/// All valid completions of a sub-type III seed for any even N, by the
/// stage-wise recursion over pair vertexes. For N=4 this reduces to the
/// single closing stage and must agree with `complete_octahedron`.
pub fn complete_suspension(params: &ParameterSet) -> Result<Vec<CapGeometry>, ParamError> {
    params.validate()?;
    if !params.subtype.is_type3() {
        return Err(ParamError::Invalid("sub-type III required".into()));
    }
    let n = params.n;
    let (l1, a1, b1, a2, b2, odd_alphas) = seed_radians(params)?;
    let oas = params.subtype.oas_vertexes();
    let is_oas = |k: usize| oas.contains(&k);
    let v3_oas = is_oas(3);

    let mut states: Vec<CapGeometry> = Vec::new();
    for c in initial_candidates(l1, a1, b1, a2, b2, v3_oas) {
        let mut g = CapGeometry::empty(params.subtype, n);
        g.l[1] = l1;
        g.l[2] = c.l2;
        g.l[3] = c.l3;
        g.base[1] = c.base1;
        g.base[2] = c.base2;
        g.alpha[1] = a1;
        g.alpha[2] = a2;
        g.beta[1] = b1;
        g.beta[2] = b2;
        g.beta[3] = c.beta3;
        g.gamma[1] = c.gamma1;
        g.gamma[2] = c.gamma2;
        g.big_g[1] = c.big_g1;
        g.big_b[1] = c.b1;
        g.big_b[2] = c.big_b2;
        g.big_b[3] = c.big_b3;
        g.big_g[2] = if v3_oas { PI - g.beta[3] } else { g.beta[3] };
        g.big_a[1] = PI - g.big_b[1] - g.big_g[1];
        g.big_a[2] = PI - g.big_b[2] - g.big_g[2];
        if !in_open(g.big_a[1]) || !in_open(g.big_a[2]) {
            continue;
        }
        g.m[1] = g.base[1] * g.big_g[1].sin() / g.big_a[1].sin();
        g.m[2] = g.base[1] * g.big_b[1].sin() / g.big_a[1].sin();
        let m2_chk = g.base[2] * g.big_g[2].sin() / g.big_a[2].sin();
        if (m2_chk - g.m[2]).abs() > CROSS_CHECK_TOL * g.m[2] {
            continue;
        }
        g.m[3] = g.base[2] * g.big_b[2].sin() / g.big_a[2].sin();
        states.push(g);
    }

    let mut first_empty_stage = None;
    let stages: Vec<usize> = (5..n).step_by(2).chain(std::iter::once(n)).collect();
    for &stage in &stages {
        let mut next: Vec<CapGeometry> = Vec::new();
        for g0 in &states {
            let mut g = g0.clone();
            let anchor;
            if stage < n {
                let a_jm2 = odd_alphas[(stage - 5) / 2];
                // u-cap face ahead of the previous pair vertex
                g.alpha[stage - 2] = a_jm2;
                g.gamma[stage - 2] = PI - a_jm2 - g.beta[stage - 2];
                if !in_open(g.gamma[stage - 2]) {
                    continue;
                }
                g.l[stage - 1] = g.l[stage - 2] * g.beta[stage - 2].sin() / g.gamma[stage - 2].sin();
                g.base[stage - 2] = g.l[stage - 2] * g.alpha[stage - 2].sin() / g.gamma[stage - 2].sin();
                // matching w-cap face by side-angle-side
                let m_prev = g.m[stage - 2];
                let bl = g.base[stage - 2];
                let m_next = (m_prev * m_prev + bl * bl - 2.0 * m_prev * bl * g.big_b[stage - 2].cos()).sqrt();
                g.m[stage - 1] = m_next;
                let cos_a = ((m_prev * m_prev + m_next * m_next - bl * bl) / (2.0 * m_prev * m_next))
                    .clamp(-1.0, 1.0);
                g.big_a[stage - 2] = cos_a.acos();
                g.big_g[stage - 2] = PI - g.big_a[stage - 2] - g.big_b[stage - 2];
                if !in_open(g.big_g[stage - 2]) {
                    continue;
                }
                let vprev_oas = is_oas(stage - 1);
                g.beta[stage - 1] = if vprev_oas { PI - g.big_g[stage - 2] } else { g.big_g[stage - 2] };
                g.big_b[stage - 1] = if vprev_oas { PI - g.gamma[stage - 2] } else { g.gamma[stage - 2] };
                anchor = (g.big_b[stage - 3], g.beta[stage - 3]);
            } else {
                anchor = (g.big_b[n - 2], g.beta[n - 2]);
            }
            let j_idx = if stage < n { stage } else { n };
            let j_oas = is_oas(j_idx) && stage < n;
            let solutions = solve_pair_vertex(
                g.l[stage - 1],
                g.beta[stage - 1],
                g.m[stage - 1],
                g.big_b[stage - 1],
                anchor.0,
                anchor.1,
                j_oas,
            );
            for (big_bj, bej) in solutions {
                let mut g2 = g.clone();
                g2.big_b[j_idx] = big_bj;
                g2.beta[j_idx] = bej;
                g2.gamma[stage - 1] = if j_oas { PI - big_bj } else { big_bj };
                g2.alpha[stage - 1] = PI - g2.beta[stage - 1] - g2.gamma[stage - 1];
                if !in_open(g2.alpha[stage - 1]) {
                    continue;
                }
                g2.l[j_idx] = g2.l[stage - 1] * g2.beta[stage - 1].sin() / g2.gamma[stage - 1].sin();
                g2.base[stage - 1] = g2.l[stage - 1] * g2.alpha[stage - 1].sin() / g2.gamma[stage - 1].sin();
                g2.big_g[stage - 1] = if j_oas { PI - bej } else { bej };
                g2.big_a[stage - 1] = PI - g2.big_b[stage - 1] - g2.big_g[stage - 1];
                if !in_open(g2.big_a[stage - 1]) {
                    continue;
                }
                g2.m[j_idx] = g2.m[stage - 1] * g2.big_b[stage - 1].sin() / g2.big_g[stage - 1].sin();
                let base_chk = g2.m[stage - 1] * g2.big_a[stage - 1].sin() / g2.big_g[stage - 1].sin();
                if (base_chk - g2.base[stage - 1]).abs() > CROSS_CHECK_TOL * g2.base[stage - 1] {
                    continue;
                }
                if stage == n {
                    let v1_oas = is_oas(1);
                    let gan = if v1_oas { PI - g2.big_b[1] } else { g2.big_b[1] };
                    let ggn = if v1_oas { PI - g2.beta[1] } else { g2.beta[1] };
                    g2.gamma[n] = gan;
                    g2.big_g[n] = ggn;
                    g2.alpha[n] = PI - g2.beta[n] - gan;
                    g2.big_a[n] = PI - g2.big_b[n] - ggn;
                    if !in_open(g2.alpha[n]) || !in_open(g2.big_a[n]) {
                        continue;
                    }
                    let l1_chk = g2.l[n] * g2.beta[n].sin() / gan.sin();
                    let m1_chk = g2.m[n] * g2.big_b[n].sin() / ggn.sin();
                    if (l1_chk - g2.l[1]).abs() > CROSS_CHECK_TOL * g2.l[1] {
                        continue;
                    }
                    if (m1_chk - g2.m[1]).abs() > CROSS_CHECK_TOL * g2.m[1] {
                        continue;
                    }
                    g2.base[n] = g2.l[n] * g2.alpha[n].sin() / gan.sin();
                    let base_n_chk = g2.m[n] * g2.big_a[n].sin() / ggn.sin();
                    if (base_n_chk - g2.base[n]).abs() > CROSS_CHECK_TOL * g2.base[n] {
                        continue;
                    }
                }
                if !partial_construction_filter(&g2, stage, FILTER_TOL) {
                    continue;
                }
                next.push(g2);
            }
        }
        if next.is_empty() && first_empty_stage.is_none() {
            first_empty_stage = Some(stage);
        }
        states = next;
    }
    let mut out = Vec::new();
    for g in states {
        push_unique(&mut out, g);
    }
    if out.is_empty() {
        return Err(match first_empty_stage {
            Some(j) => ParamError::RealizabilityFailure(j),
            None => ParamError::NoCompletion,
        });
    }
    Ok(out)
}

pub const FILTER_TOL: f64 = 1e-6;

fn a4_ok(g: &CapGeometry, k: usize, eps_k: f64, del_k: f64, tol: f64) -> bool {
    let b1 = crate::geometry::b1_ratio(g.beta[k], g.big_b[k]);
    let b2 = crate::geometry::b2_ratio(g.beta[k], g.big_b[k]);
    let oas = g.subtype.oas_vertexes().contains(&k);
    let (val, t1, t2) = if oas {
        (tan_half(eps_k) * cot_half(del_k), -b1, -b2)
    } else {
        (tan_half(eps_k) * tan_half(del_k), b1, b2)
    };
    if !val.is_finite() {
        return false;
    }
    let r = (val - t1).abs().min((val - t2).abs());
    r < tol * val.abs().max(1.0)
}

/// True iff the faces resolved through the given recursion stage admit a
/// partial construction at eps_1 = pi/2 in which every placed pair vertex
/// satisfies its cross-vertex dihedral relation.
pub fn partial_construction_filter(g: &CapGeometry, stage: usize, tol: f64) -> bool {
    let last = stage.min(g.n).saturating_sub(1);
    if last < 2 {
        return true;
    }
    let start = place_initial_faces(g, FRAC_PI_2);
    dfs_filter(g, &start.u, &start.w, &[start.v1, start.v2], 2, last, FRAC_PI_2, tol)
}

#[allow(clippy::too_many_arguments)]
fn dfs_filter(
    g: &CapGeometry,
    u: &crate::geometry::Vec3,
    w: &crate::geometry::Vec3,
    placed: &[crate::geometry::Vec3],
    k: usize,
    last: usize,
    eps_prev: f64,
    tol: f64,
) -> bool {
    if k > last {
        return true;
    }
    let Ok(q) = vertex_quadratic(&g.vertex_angles(k), eps_prev) else {
        return false;
    };
    for branch in [false, true] {
        let Ok(dk) = solve_dihedral(&q, branch) else {
            continue;
        };
        let vk = placed[k - 1];
        let vprev = placed[k - 2];
        let lnext = if k + 1 <= g.n { g.l[k + 1] } else { g.l[1] };
        let vnext = place_next(*u, vk, vprev, lnext, g.alpha[k], dk);
        let eps_k = dihedral(vk, vnext, *w, *u);
        let del_k = dihedral(vk, *w, vprev, vnext);
        if !a4_ok(g, k, eps_k, del_k, tol) {
            continue;
        }
        let mut nplaced = placed.to_vec();
        nplaced.push(vnext);
        if dfs_filter(g, u, w, &nplaced, k + 1, last, eps_k, tol) {
            return true;
        }
    }
    false
}
