//! Flexion analysis: analytic derivatives of the construction with respect to
//! the flexion variable, the numerical flexibility test, flexion-range
//! discovery, dihedral continuity adjustment, and folding enumeration.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::construction::{
    construct, construct_folding, place_initial_faces, symmetric_masks, DihedralIdentifier,
    Embedding, CLOSURE_TOL,
};
use crate::error::{ConstructError, FlexError};
use crate::geometry::{
    dihedral, dihedral_rate, solve_dihedral, tan_half, vertex_quadratic, Vec3, TWO_PI,
};
use crate::types::{CapGeometry, SubType};

/// Relative threshold on the closing-edge derivative: |d|v_N-v_1|^2/d eps1|
/// below `FLEX_TOL * L_N^2` counts as flexible.
pub const FLEX_TOL: f64 = 1e-6;

const SINGULAR_EPS: f64 = 1e-12;
/// Relative tolerance of the cross-vertex dihedral relation used to prune the
/// folding search; loose enough to survive accumulated roundoff mid-search.
const PRUNE_TOL: f64 = 2e-5;

/// One differentiated configuration: all dihedrals, their derivatives with
/// respect to the flexion variable, and the vertex velocities.
#[derive(Debug, Clone, Serialize)]
pub struct FlexState {
    pub eps1: f64,
    /// Apical u-cap dihedrals delta_k, 1-indexed; continuity-adjusted copies
    /// may leave [0, 2 pi).
    pub delta: Vec<f64>,
    /// Apical w-cap dihedrals Delta_k.
    pub big_delta: Vec<f64>,
    /// Base dihedrals eps_k.
    pub eps: Vec<f64>,
    pub delta_d: Vec<f64>,
    pub big_delta_d: Vec<f64>,
    pub eps_d: Vec<f64>,
    pub vd: Vec<Vec3>,
    pub ud: Vec3,
    pub wd: Vec3,
}

/// Closed intervals of the flexion variable over which a folding flexes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlexionRange {
    /// Disjoint closed intervals in radians; a wrapped interval has its upper
    /// end above 2 pi.
    pub intervals: Vec<(f64, f64)>,
    pub form: RangeForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RangeForm {
    TwoIntervals,
    Wrapped,
    SingleInterval,
    FullCircle,
}

impl FlexionRange {
    pub fn full_circle() -> Self {
        FlexionRange { intervals: vec![(0.0, TWO_PI)], form: RangeForm::FullCircle }
    }

    pub fn contains(&self, eps1: f64) -> bool {
        let e = eps1.rem_euclid(TWO_PI);
        self.intervals
            .iter()
            .any(|&(a, b)| (a <= e && e <= b) || (a <= e + TWO_PI && e + TWO_PI <= b))
    }
}

/// Derivative of `place_next` with respect to the flexion variable.
#[allow(clippy::too_many_arguments)]
fn place_next_deriv(
    u: Vec3,
    vk: Vec3,
    vkd: Vec3,
    vprev: Vec3,
    vprevd: Vec3,
    l_next: f64,
    alpha: f64,
    delta: f64,
    deltad: f64,
) -> Vec3 {
    let e = vk - u;
    let a = e.normalized();
    let ad = e.normalized_deriv(vkd);
    let r = vprev - u;
    let p = r.perp(a);
    let pd = vprevd - ad * r.dot(a) - a * (vprevd.dot(a) + r.dot(ad));
    let b0 = p.normalized();
    let b0d = p.normalized_deriv(pd);
    let n0d = ad.cross(b0) + a.cross(b0d);
    let n0 = a.cross(b0);
    let (sd, cd) = delta.sin_cos();
    let tang = (-b0 * sd + n0 * cd) * deltad;
    (ad * alpha.cos() + (b0d * cd + n0d * sd + tang) * alpha.sin()) * l_next
}

/// Vertex velocities and all dihedral derivatives at the embedding's
/// configuration, from implicit differentiation of the construction.
pub fn derivative_state(geom: &CapGeometry, emb: &Embedding) -> Result<FlexState, FlexError> {
    let n = geom.n;
    let (u, w) = (emb.u, emb.w);
    let ud = Vec3::ZERO;
    let (m1, bb1) = (geom.m[1], geom.big_b[1]);
    let wd = Vec3::new(
        -m1 * bb1.sin() * emb.eps1.sin(),
        m1 * bb1.sin() * emb.eps1.cos(),
        0.0,
    );
    let mut vd = vec![Vec3::ZERO; n + 1];
    let mut eps_prev = emb.eps1;
    let mut epsd_prev = 1.0;
    for k in 2..n {
        let angles = geom.vertex_angles(k);
        let dk = emb.delta(k);
        let (f_d, f_e) = angles.closure_partials(dk, eps_prev);
        if f_d.abs() < SINGULAR_EPS {
            return Err(FlexError::SingularDerivative(k));
        }
        let dkd = -f_e / f_d * epsd_prev;
        vd[k + 1] = place_next_deriv(
            u,
            emb.v[k],
            vd[k],
            emb.v[k - 1],
            vd[k - 1],
            geom.l[k + 1],
            geom.alpha[k],
            dk,
            dkd,
        );
        eps_prev = emb.eps(k);
        epsd_prev = dihedral_rate(emb.v[k], emb.v[k + 1], w, u, vd[k], vd[k + 1], wd, ud);
    }
    let mut st = FlexState {
        eps1: emb.eps1,
        delta: vec![0.0; n + 1],
        big_delta: vec![0.0; n + 1],
        eps: vec![0.0; n + 1],
        delta_d: vec![0.0; n + 1],
        big_delta_d: vec![0.0; n + 1],
        eps_d: vec![0.0; n + 1],
        vd,
        ud,
        wd,
    };
    for k in 1..=n {
        let kp = k % n + 1;
        let km = (k + n - 2) % n + 1;
        st.delta[k] = emb.delta(k);
        st.big_delta[k] = emb.big_delta(k);
        st.eps[k] = emb.eps(k);
        let vdk = st.vd[k];
        st.delta_d[k] =
            dihedral_rate(emb.v[k], u, emb.v[kp], emb.v[km], vdk, ud, st.vd[kp], st.vd[km]);
        st.big_delta_d[k] =
            dihedral_rate(emb.v[k], w, emb.v[km], emb.v[kp], vdk, wd, st.vd[km], st.vd[kp]);
        st.eps_d[k] = dihedral_rate(emb.v[k], emb.v[kp], w, u, vdk, st.vd[kp], wd, ud);
    }
    Ok(st)
}

/// The closing-edge term d|v_N - v_1|^2 / d eps1; its vanishing at a closed
/// configuration marks the folding as flexible there.
pub fn flexibility_test(geom: &CapGeometry, eps1: f64, di: DihedralIdentifier) -> Result<f64, FlexError> {
    let emb = construct(geom, eps1, di)?;
    flexibility_of(geom, &emb)
}

/// Same test on an already constructed embedding.
pub fn flexibility_of(geom: &CapGeometry, emb: &Embedding) -> Result<f64, FlexError> {
    let st = derivative_state(geom, emb)?;
    let n = geom.n;
    let gap = emb.v[n] - emb.v[1];
    Ok(2.0 * gap.dot(st.vd[n]))
}

/// Is this exact branch mask constructible, closed, and flexible at eps1? A
/// closed configuration with a singular derivative (flat state) counts as
/// flexible: it is a closed range endpoint.
fn sample_raw(geom: &CapGeometry, eps1: f64, di: DihedralIdentifier) -> bool {
    let Ok(emb) = construct(geom, eps1, di) else {
        return false;
    };
    if !emb.is_closed(geom) {
        return false;
    }
    let ln = geom.base[geom.n];
    match flexibility_of(geom, &emb) {
        Ok(v) => v.abs() < FLEX_TOL * ln * ln,
        Err(FlexError::SingularDerivative(_)) => true,
        Err(_) => false,
    }
}

const BISECT_TOL_DEG: f64 = 1e-4;

/// Flexion range of one folding: 1-degree sweep with bisection-refined
/// endpoints and form classification. Covers the motion under `di` and its
/// complementary mask together; the two raw ranges are joined at a shared
/// endpoint only where the junction configuration is flat.
pub fn find_flexion_range(geom: &CapGeometry, di: DihedralIdentifier) -> Result<FlexionRange, FlexError> {
    let ra = range_of_sampler(|e| sample_raw(geom, e, di));
    let rb = range_of_sampler(|e| sample_raw(geom, e, di.complemented()));
    match (ra, rb) {
        (Ok(a), Ok(b)) => Ok(union_ranges(geom, di, a, b)),
        (Ok(a), Err(FlexError::NotFlexible)) => Ok(a),
        (Err(FlexError::NotFlexible), Ok(b)) => Ok(b),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// Is the configuration at the junction value (snapped to the nearest
/// self-conjugate flexion value 0 or pi) flat, i.e. all vertexes coplanar?
fn flat_junction(geom: &CapGeometry, di: DihedralIdentifier, e: f64) -> bool {
    let e = e.rem_euclid(TWO_PI);
    let snapped = if e < FRAC_PI_2 || e > 1.5 * PI {
        0.0
    } else {
        PI
    };
    let Ok(emb) = construct_folding(geom, snapped, di) else {
        return false;
    };
    let n = geom.n;
    let mut pts = vec![emb.u, emb.w];
    pts.extend((1..=n).map(|k| emb.v[k]));
    let c = pts.iter().fold(Vec3::ZERO, |a, &p| a + p) * (1.0 / pts.len() as f64);
    // the largest cross product of centered positions gives a stable normal
    // even for base polygons that double over themselves when flat
    let mut normal = Vec3::ZERO;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let cr = (pts[i] - c).cross(pts[j] - c);
            if cr.norm() > normal.norm() {
                normal = cr;
            }
        }
    }
    if normal.norm() < 1e-12 * geom.scale() * geom.scale() {
        return false;
    }
    let nh = normal * (1.0 / normal.norm());
    pts.iter().all(|&p| (p - c).dot(nh).abs() < 1e-6 * geom.scale())
}

/// Union of the raw ranges of a branch mask and its complement. Intervals
/// that touch at a flat state are one continuity domain and merge; a non-flat
/// junction is a fold point of the flexion variable and stays a boundary.
fn union_ranges(
    geom: &CapGeometry,
    di: DihedralIdentifier,
    a: FlexionRange,
    b: FlexionRange,
) -> FlexionRange {
    const TOUCH: f64 = 0.02;
    if a.form == RangeForm::FullCircle || b.form == RangeForm::FullCircle {
        return FlexionRange::full_circle();
    }
    let mut iv: Vec<(f64, f64)> = a.intervals;
    iv.extend(b.intervals);
    iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in iv {
        if let Some(last) = merged.last_mut() {
            if lo <= last.1 + TOUCH {
                let touch_only = lo >= last.1 - TOUCH;
                if !touch_only || flat_junction(geom, di, 0.5 * (lo + last.1)) {
                    last.1 = last.1.max(hi);
                    continue;
                }
            }
        }
        merged.push((lo, hi));
    }
    // the last interval may continue past 2 pi into the first
    if let (Some(&(flo, fhi)), Some(&(llo, lhi))) = (merged.first(), merged.last()) {
        if flo + TWO_PI <= lhi + TOUCH {
            let touch_only = flo + TWO_PI >= lhi - TOUCH;
            let joined = !touch_only || flat_junction(geom, di, 0.5 * (flo + TWO_PI + lhi));
            if joined && merged.len() == 1 {
                return FlexionRange::full_circle();
            }
            if joined {
                merged.pop();
                merged.remove(0);
                merged.push((llo, fhi + TWO_PI));
                merged.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            }
        }
    }
    let form = match merged.len() {
        1 if merged[0].1 > TWO_PI => RangeForm::Wrapped,
        1 => RangeForm::SingleInterval,
        _ => RangeForm::TwoIntervals,
    };
    FlexionRange { intervals: merged, form }
}

/// Range discovery over an arbitrary per-angle flexibility predicate.
fn range_of_sampler(flexible_at: impl Fn(f64) -> bool) -> Result<FlexionRange, FlexError> {
    let flex: Vec<bool> = (0..360)
        .map(|d| flexible_at((d as f64).to_radians()))
        .collect();
    let count = flex.iter().filter(|&&f| f).count();
    if count == 0 {
        return Err(FlexError::NotFlexible);
    }
    if count == 360 {
        return Ok(FlexionRange::full_circle());
    }
    // maximal runs of flexible samples on the circular 1-degree grid; a run
    // may wrap past 359, in which case its end index exceeds 359
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for s in 0..360 {
        if flex[s] && !flex[(s + 359) % 360] {
            let mut e = s;
            while flex[(e + 1) % 360] {
                e += 1;
            }
            runs.push((s, e));
        }
    }
    // bisect between a flexible angle and a non-flexible angle (degrees),
    // returning the flexible-side boundary
    let refine = |flexible_deg: f64, nonflexible_deg: f64| -> f64 {
        let (mut a, mut b) = (flexible_deg, nonflexible_deg);
        while (b - a).abs() > BISECT_TOL_DEG {
            let mid = 0.5 * (a + b);
            if flexible_at(mid.to_radians().rem_euclid(TWO_PI)) {
                a = mid;
            } else {
                b = mid;
            }
        }
        a
    };
    let mut intervals = Vec::new();
    for &(s, e) in &runs {
        let lo_deg = refine(s as f64, s as f64 - 1.0);
        let hi_deg = refine(e as f64, e as f64 + 1.0);
        let lo = lo_deg.rem_euclid(360.0).to_radians();
        let width = (hi_deg - lo_deg).to_radians();
        intervals.push((lo, lo + width));
    }
    intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let form = match intervals.len() {
        1 if intervals[0].1 > TWO_PI => RangeForm::Wrapped,
        1 => RangeForm::SingleInterval,
        _ => RangeForm::TwoIntervals,
    };
    Ok(FlexionRange { intervals, form })
}

/// Make each dihedral series continuous in the flexion variable by adding
/// whole turns where the raw value wraps past 0 or 2 pi.
pub fn continuity_adjust(trace: &mut [FlexState]) -> Result<(), FlexError> {
    if trace.is_empty() {
        return Ok(());
    }
    let n = trace[0].delta.len() - 1;
    let mut worst: f64 = 0.0;
    for field in 0..3 {
        for k in 1..=n {
            let mut offset = 0.0;
            let mut prev_raw = f64::NAN;
            for st in trace.iter_mut() {
                let series = match field {
                    0 => &mut st.delta,
                    1 => &mut st.big_delta,
                    _ => &mut st.eps,
                };
                let raw = series[k];
                if prev_raw.is_finite() {
                    let jump = raw - prev_raw;
                    if jump > PI {
                        offset -= TWO_PI;
                    } else if jump < -PI {
                        offset += TWO_PI;
                    }
                    let eff = (raw + if jump > PI { -TWO_PI } else if jump < -PI { TWO_PI } else { 0.0 })
                        - prev_raw;
                    worst = worst.max(eff.abs());
                }
                prev_raw = raw;
                series[k] = raw + offset;
            }
        }
    }
    if worst > FRAC_PI_2 {
        return Err(FlexError::AliasWarning(worst));
    }
    Ok(())
}

/// Raw dihedrals [delta_1..n, Delta_1..n, eps_1..n] of one embedding.
fn dihedral_vec(emb: &Embedding, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(3 * n);
    out.extend((1..=n).map(|k| emb.delta(k)));
    out.extend((1..=n).map(|k| emb.big_delta(k)));
    out.extend((1..=n).map(|k| emb.eps(k)));
    out
}

/// Shift each raw dihedral by the whole turn landing nearest the base value;
/// returns the adjusted series and the worst residual step.
fn nearest_translate(raw: &[f64], base: &[f64]) -> (Vec<f64>, f64) {
    let adjusted: Vec<f64> = raw
        .iter()
        .zip(base)
        .map(|(&r, &b)| r + ((b - r) / TWO_PI).round() * TWO_PI)
        .collect();
    let worst = adjusted
        .iter()
        .zip(base)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    (adjusted, worst)
}

/// Closed embeddings at eps1 under the mask and its complement. Both close at
/// once near flat states and at fold endpoints of the flexion variable; when
/// neither closes (marginal closure at a refined range boundary) whatever
/// constructs is returned so the caller can still pick the nearer shape.
fn branch_candidates(
    geom: &CapGeometry,
    di: DihedralIdentifier,
    e: f64,
) -> Result<Vec<Embedding>, FlexError> {
    let e = e.rem_euclid(TWO_PI);
    let results = [construct(geom, e, di), construct(geom, e, di.complemented())];
    let closed: Vec<Embedding> = results
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .filter(|m| m.is_closed(geom))
        .cloned()
        .collect();
    if !closed.is_empty() {
        return Ok(closed);
    }
    let mut err = None;
    let any: Vec<Embedding> = results
        .into_iter()
        .filter_map(|r| r.map_err(|e| err.get_or_insert(e)).ok())
        .collect();
    if any.is_empty() {
        Err(err.unwrap().into())
    } else {
        Ok(any)
    }
}

/// Continuation of the dihedral series from `base` at `e_a` to `e_b`: the
/// branch candidate nearest the base (after whole-turn translation) is the
/// continuous one. When the motion is too fast for the choice to be
/// unambiguous (rates blow up as an inverse square root near flat states),
/// the step is bisected.
fn continue_embedding(
    geom: &CapGeometry,
    di: DihedralIdentifier,
    e_a: f64,
    base: &[f64],
    e_b: f64,
    depth: u32,
) -> Result<(Embedding, Vec<f64>), FlexError> {
    let n = geom.n;
    let best = branch_candidates(geom, di, e_b)?
        .into_iter()
        .map(|emb| {
            let (adj, worst) = nearest_translate(&dihedral_vec(&emb, n), base);
            (emb, adj, worst)
        })
        .min_by(|a, b| a.2.partial_cmp(&b.2).unwrap())
        .unwrap();
    if best.2 <= FRAC_PI_2 {
        return Ok((best.0, best.1));
    }
    if depth == 0 {
        return Err(FlexError::AliasWarning(best.2));
    }
    let mid = 0.5 * (e_a + e_b);
    let (_, at_mid) = continue_embedding(geom, di, e_a, base, mid, depth - 1)?;
    continue_embedding(geom, di, mid, &at_mid, e_b, depth - 1)
}

/// Differentiated state of one embedding, with NaN rates at flat states
/// where the derivative system is singular.
fn state_of(geom: &CapGeometry, e: f64, emb: &Embedding) -> Result<FlexState, FlexError> {
    match derivative_state(geom, emb) {
        Ok(st) => Ok(st),
        Err(FlexError::SingularDerivative(_)) => {
            // flat state: dihedrals are still well defined, rates are not
            let n = geom.n;
            let mut st = FlexState {
                eps1: e,
                delta: vec![0.0; n + 1],
                big_delta: vec![0.0; n + 1],
                eps: vec![0.0; n + 1],
                delta_d: vec![f64::NAN; n + 1],
                big_delta_d: vec![f64::NAN; n + 1],
                eps_d: vec![f64::NAN; n + 1],
                vd: vec![Vec3::ZERO; n + 1],
                ud: Vec3::ZERO,
                wd: Vec3::ZERO,
            };
            for k in 1..=n {
                st.delta[k] = emb.delta(k);
                st.big_delta[k] = emb.big_delta(k);
                st.eps[k] = emb.eps(k);
            }
            Ok(st)
        }
        Err(e) => Err(e),
    }
}

/// Differentiated states along one continuity domain of a flexion sweep.
/// `eps1_values` must be monotone within the domain (a wrapped domain keeps
/// running past 2 pi). The branch mask is chosen per sample for continuity;
/// at a fold endpoint of eps1 both the mask and its complement close with
/// mirror shapes and the naive preference would pick the wrong one.
pub fn sweep_states(
    geom: &CapGeometry,
    di: DihedralIdentifier,
    eps1_values: &[f64],
) -> Result<Vec<FlexState>, FlexError> {
    Ok(sweep_embedded(geom, di, eps1_values)?.into_iter().map(|(_, st)| st).collect())
}

/// Like [`sweep_states`], keeping the embedding each state was derived from.
pub fn sweep_embedded(
    geom: &CapGeometry,
    di: DihedralIdentifier,
    eps1_values: &[f64],
) -> Result<Vec<(Embedding, FlexState)>, FlexError> {
    let Some((&e0, rest)) = eps1_values.split_first() else {
        return Ok(Vec::new());
    };
    let n = geom.n;
    let mut cands = branch_candidates(geom, di, e0)?;
    let first = if cands.len() > 1 && !rest.is_empty() {
        // disambiguate against a point just inside the domain
        let probe = e0 + 0.125 * (rest[0] - e0);
        let inner = branch_candidates(geom, di, probe)?;
        let target = dihedral_vec(&inner[0], n);
        cands
            .into_iter()
            .min_by(|a, b| {
                let da = nearest_translate(&dihedral_vec(a, n), &target).1;
                let db = nearest_translate(&dihedral_vec(b, n), &target).1;
                da.partial_cmp(&db).unwrap()
            })
            .unwrap()
    } else {
        cands.swap_remove(0)
    };
    let mut base = dihedral_vec(&first, n);
    let mut out = vec![(first.clone(), state_of(geom, e0, &first)?)];
    for (i, &e) in rest.iter().enumerate() {
        let (emb, adj) = continue_embedding(geom, di, eps1_values[i], &base, e, 16)?;
        let mut st = state_of(geom, e, &emb)?;
        for k in 1..=n {
            st.delta[k] = adj[k - 1];
            st.big_delta[k] = adj[n + k - 1];
            st.eps[k] = adj[2 * n + k - 1];
        }
        out.push((emb, st));
        base = adj;
    }
    Ok(out)
}

/// All flexible foldings of the cap with their flexion ranges. Symmetric
/// sub-types test the symmetry-rule branch masks; axial sub-types search for
/// branch masks with the pruned depth-first construction at eps1 = pi/2.
pub fn enumerate_foldings(
    geom: &CapGeometry,
) -> Result<Vec<(DihedralIdentifier, FlexionRange)>, FlexError> {
    let candidates: Vec<DihedralIdentifier> = match geom.subtype {
        SubType::IOee | SubType::IIAee | SubType::IIOee => {
            symmetric_masks(geom.subtype, geom.n).map_err(FlexError::Construct)?
        }
        _ => flexible_dis_axial(geom),
    };
    collect_flexible(geom, candidates)
}

/// Exhaustive search over every branch mask; gated to small N because the
/// symmetric/pruned searches already cover everything the tables need.
pub fn enumerate_foldings_exhaustive(
    geom: &CapGeometry,
) -> Result<Vec<(DihedralIdentifier, FlexionRange)>, FlexError> {
    if geom.n > 12 {
        return Err(FlexError::Construct(ConstructError::Degenerate(geom.n)));
    }
    let n = geom.n;
    let candidates: Vec<DihedralIdentifier> = (0..(1u32 << (n - 2)))
        .map(|bits| DihedralIdentifier::new(bits << 1, n))
        .collect();
    collect_flexible(geom, candidates)
}

fn collect_flexible(
    geom: &CapGeometry,
    candidates: Vec<DihedralIdentifier>,
) -> Result<Vec<(DihedralIdentifier, FlexionRange)>, FlexError> {
    let n = geom.n;
    // construction bits 2..N-1; complementing them gives the partner mask
    let comp_bits = (1u32 << (n - 1)) - 2;
    let mut visited: Vec<u32> = Vec::new();
    let mut out: Vec<(DihedralIdentifier, FlexionRange)> = Vec::new();
    for di in candidates {
        let key = di.mask() & comp_bits;
        if visited.contains(&key) {
            continue;
        }
        let partner = DihedralIdentifier::new(key ^ comp_bits, n);
        visited.push(key);
        visited.push(partner.mask());
        let grid_a: Vec<bool> =
            (0..360).map(|d| sample_raw(geom, (d as f64).to_radians(), di)).collect();
        let grid_b: Vec<bool> =
            (0..360).map(|d| sample_raw(geom, (d as f64).to_radians(), partner)).collect();
        let any_a = grid_a.iter().any(|&f| f);
        let any_b = grid_b.iter().any(|&f| f);
        // the pair describes two distinct foldings only if both flex at a
        // common eps1 with different shapes; at flat states the two branch
        // masks coincide in one embedding and must not count as overlap
        let scale = geom.scale();
        let overlap = grid_a.iter().zip(&grid_b).enumerate().any(|(d, (&a, &b))| {
            if !(a && b) {
                return false;
            }
            let e = (d as f64).to_radians();
            match (construct(geom, e, di), construct(geom, e, partner)) {
                (Ok(ea), Ok(eb)) => (1..=n)
                    .any(|k| (ea.v[k] - eb.v[k]).norm() > 1e-6 * scale),
                _ => false,
            }
        });
        if overlap {
            // two distinct foldings that happen to be each other's mirror
            // image: both flex at the same eps1 with different shapes
            for m in [di, partner] {
                let range = range_of_sampler(|e| sample_raw(geom, e, m))?;
                push_folding(geom, m, range, &mut out);
            }
        } else if any_a || any_b {
            // one folding whose motion covers both masks' mirrored intervals
            let rep = if any_a { di } else { partner };
            let range = find_flexion_range(geom, rep)?;
            push_folding(geom, rep, range, &mut out);
        }
    }
    out.sort_by_key(|(d, _)| d.mask());
    Ok(out)
}

/// Record a folding under the full DI recovered at an interior range point.
fn push_folding(
    geom: &CapGeometry,
    di: DihedralIdentifier,
    range: FlexionRange,
    out: &mut Vec<(DihedralIdentifier, FlexionRange)>,
) {
    let probe = {
        let (a, b) = range.intervals[0];
        0.5 * (a + b)
    };
    let full = construct_folding(geom, probe.rem_euclid(TWO_PI), di)
        .map(|emb| emb.di)
        .unwrap_or(di);
    if !out.iter().any(|(d, _)| *d == full) {
        out.push((full, range));
    }
}

/// Depth-first search for flexible branch masks of an axial cap at
/// eps1 = pi/2, pruning with the cross-vertex dihedral relation at every
/// placed vertex, then keeping masks that close and pass the flexibility
/// test.
pub fn flexible_dis_axial(geom: &CapGeometry) -> Vec<DihedralIdentifier> {
    let n = geom.n;
    let eps1 = FRAC_PI_2;
    let start = place_initial_faces(geom, eps1);
    let mut found = Vec::new();
    let mut placed = vec![Vec3::ZERO; n + 1];
    placed[1] = start.v1;
    placed[2] = start.v2;
    dfs_axial(
        geom,
        start.u,
        start.w,
        &mut placed,
        2,
        eps1,
        DihedralIdentifier::zero(n),
        &mut found,
    );
    let ln = geom.base[n];
    let mut out: Vec<DihedralIdentifier> = Vec::new();
    for di in found {
        let Ok(emb) = construct(geom, eps1, di) else { continue };
        if !emb.is_closed(geom) {
            continue;
        }
        let Ok(v) = flexibility_of(geom, &emb) else { continue };
        if v.abs() < FLEX_TOL * ln * ln && !out.contains(&emb.di) {
            out.push(emb.di);
        }
    }
    out.sort_by_key(|d| d.mask());
    out
}

#[allow(clippy::too_many_arguments)]
fn dfs_axial(
    geom: &CapGeometry,
    u: Vec3,
    w: Vec3,
    placed: &mut Vec<Vec3>,
    k: usize,
    eps_prev: f64,
    di: DihedralIdentifier,
    found: &mut Vec<DihedralIdentifier>,
) {
    let n = geom.n;
    if k == n {
        let closure = ((placed[n] - placed[1]).norm() - geom.base[n]).abs();
        if closure < CLOSURE_TOL * geom.base[n] {
            found.push(di);
        }
        return;
    }
    let Ok(q) = vertex_quadratic(&geom.vertex_angles(k), eps_prev) else {
        return;
    };
    for branch in [false, true] {
        let Ok(dk) = solve_dihedral(&q, branch) else {
            continue;
        };
        let vnext = crate::construction::place_next(
            u,
            placed[k],
            placed[k - 1],
            geom.l[k + 1],
            geom.alpha[k],
            dk,
        );
        let eps_k = dihedral(placed[k], vnext, w, u);
        let del_k = dihedral(placed[k], w, placed[k - 1], vnext);
        if !prune_ok(geom, k, eps_k, del_k) {
            continue;
        }
        placed[k + 1] = vnext;
        dfs_axial(geom, u, w, placed, k + 1, eps_k, di.with_bit(k, branch), found);
    }
}

fn prune_ok(geom: &CapGeometry, k: usize, eps_k: f64, del_k: f64) -> bool {
    let b1 = crate::geometry::b1_ratio(geom.beta[k], geom.big_b[k]);
    let b2 = crate::geometry::b2_ratio(geom.beta[k], geom.big_b[k]);
    let oas = geom.subtype.oas_vertexes().contains(&k);
    let (val, t1, t2) = if oas {
        (tan_half(eps_k) * crate::geometry::cot_half(del_k), -b1, -b2)
    } else {
        (tan_half(eps_k) * tan_half(del_k), b1, b2)
    };
    if !val.is_finite() {
        return false;
    }
    (val - t1).abs().min((val - t2).abs()) < PRUNE_TOL * val.abs().max(1.0)
}
