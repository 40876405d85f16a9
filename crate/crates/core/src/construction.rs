//! Coordinate construction of a suspension from its cap metric: initial face
//! placement, the per-vertex branch recursion, symmetric completion for the
//! sub-types with a coordinate symmetry, and normalization into each
//! sub-type's model frame.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ConstructError, GeometryError};
use crate::geometry::{dihedral, solve_dihedral, vertex_quadratic, wrap_angle, Vec3, TWO_PI};
use crate::types::{CapGeometry, SubType};

/// Relative closure tolerance on the final base edge.
pub const CLOSURE_TOL: f64 = 1e-8;

/// N-bit folding selector: bit k (1-indexed from the LSB) chooses the root
/// branch of the dihedral quadratic at base vertex v_k, 1 meaning the plus
/// root. The recursion consumes bits 2..N-1; bits 1 and N are recovered from
/// the finished embedding by matching the measured dihedral to a root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DihedralIdentifier {
    mask: u32,
    n: usize,
}

impl DihedralIdentifier {
    pub fn new(mask: u32, n: usize) -> Self {
        DihedralIdentifier { mask, n }
    }

    pub fn zero(n: usize) -> Self {
        DihedralIdentifier { mask: 0, n }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bit(&self, k: usize) -> bool {
        (self.mask >> (k - 1)) & 1 == 1
    }

    pub fn with_bit(mut self, k: usize, b: bool) -> Self {
        if b {
            self.mask |= 1 << (k - 1);
        } else {
            self.mask &= !(1 << (k - 1));
        }
        self
    }

    /// The folding obtained by flipping every branch; together with
    /// eps1 -> 2*pi - eps1 this is the mirror image.
    pub fn complemented(&self) -> Self {
        DihedralIdentifier { mask: self.mask ^ ((1u32 << self.n) - 1), n: self.n }
    }

    pub fn hex(&self) -> String {
        format!("{:X}", self.mask)
    }

    /// Parse a decimal value or a 0x-prefixed hex value.
    pub fn parse(s: &str, n: usize) -> Result<Self, std::num::ParseIntError> {
        let s = s.trim();
        let mask = if let Some(h) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            u32::from_str_radix(h, 16)?
        } else {
            s.parse()?
        };
        Ok(DihedralIdentifier { mask, n })
    }
}

impl fmt::Display for DihedralIdentifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mask)
    }
}

/// Coordinates of a fully constructed suspension at one flexion value.
/// `v` is 1-indexed with slot 0 unused.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Embedding {
    pub u: Vec3,
    pub w: Vec3,
    pub v: Vec<Vec3>,
    pub eps1: f64,
    pub di: DihedralIdentifier,
    /// Absolute length mismatch on the closing base edge.
    pub closure: f64,
}

impl Embedding {
    pub fn n(&self) -> usize {
        self.v.len() - 1
    }

    fn nx(&self, k: usize) -> usize {
        k % self.n() + 1
    }

    fn pv(&self, k: usize) -> usize {
        (k + self.n() - 2) % self.n() + 1
    }

    /// Base dihedral on edge v_k v_{k+1}, measured from coordinates.
    pub fn eps(&self, k: usize) -> f64 {
        dihedral(self.v[k], self.v[self.nx(k)], self.w, self.u)
    }

    /// Apical dihedral on edge u v_k.
    pub fn delta(&self, k: usize) -> f64 {
        dihedral(self.v[k], self.u, self.v[self.nx(k)], self.v[self.pv(k)])
    }

    /// Apical dihedral on edge w v_k.
    pub fn big_delta(&self, k: usize) -> f64 {
        dihedral(self.v[k], self.w, self.v[self.pv(k)], self.v[self.nx(k)])
    }

    /// Worst relative mismatch between constructed and prescribed edge
    /// lengths, the closing base edge excluded.
    pub fn edge_residual(&self, geom: &CapGeometry) -> f64 {
        let n = self.n();
        let mut worst = 0.0_f64;
        let rel = |have: f64, want: f64| ((have - want) / want).abs();
        for k in 1..=n {
            worst = worst.max(rel((self.u - self.v[k]).norm(), geom.l[k]));
            worst = worst.max(rel((self.w - self.v[k]).norm(), geom.m[k]));
            if k < n {
                worst = worst.max(rel((self.v[k + 1] - self.v[k]).norm(), geom.base[k]));
            }
        }
        worst
    }

    pub fn is_closed(&self, geom: &CapGeometry) -> bool {
        self.closure < CLOSURE_TOL * geom.base[self.n()]
    }

    /// Apply a rigid motion given by an origin and a right-handed orthonormal
    /// frame (rows of the new coordinates).
    fn transformed(&self, origin: Vec3, ex: Vec3, ey: Vec3, ez: Vec3) -> Embedding {
        let t = |p: Vec3| {
            let d = p - origin;
            Vec3::new(ex.dot(d), ey.dot(d), ez.dot(d))
        };
        Embedding {
            u: t(self.u),
            w: t(self.w),
            v: self.v.iter().map(|&p| t(p)).collect(),
            ..self.clone()
        }
    }
}

/// The four directly placed points of the two seed faces.
pub struct InitialPlacement {
    pub u: Vec3,
    pub w: Vec3,
    pub v1: Vec3,
    pub v2: Vec3,
}

/// Place u, v_1, v_2 and w with the flexion dihedral eps1 on edge v_1 v_2.
pub fn place_initial_faces(geom: &CapGeometry, eps1: f64) -> InitialPlacement {
    let l1 = geom.l[1];
    let b1 = geom.beta[1];
    let m1 = geom.m[1];
    let bb1 = geom.big_b[1];
    InitialPlacement {
        u: Vec3::new(l1 * b1.sin(), 0.0, -l1 * b1.cos()),
        w: Vec3::new(
            m1 * bb1.sin() * eps1.cos(),
            m1 * bb1.sin() * eps1.sin(),
            -m1 * bb1.cos(),
        ),
        v1: Vec3::ZERO,
        v2: Vec3::new(0.0, 0.0, -geom.base[1]),
    }
}

/// Next base vertex by rotation about the apical edge u v_k: the new edge
/// makes face angle `alpha` with u v_k, rotated by the dihedral `delta` from
/// the previous face's half plane.
pub(crate) fn place_next(u: Vec3, vk: Vec3, vprev: Vec3, l_next: f64, alpha: f64, delta: f64) -> Vec3 {
    let a = (vk - u).normalized();
    let b0 = (vprev - u).perp(a).normalized();
    let n0 = a.cross(b0);
    u + (a * alpha.cos() + (b0 * delta.cos() + n0 * delta.sin()) * alpha.sin()) * l_next
}

fn branch_error(k: usize) -> impl Fn(GeometryError) -> ConstructError {
    move |e| match e {
        GeometryError::NoRealRoot => ConstructError::NoRealRoot(k),
        _ => ConstructError::Degenerate(k),
    }
}

/// Distance between two angles on the circle.
fn circ_dist(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(TWO_PI - d)
}

/// Build the full embedding at `eps1` with the branch choices of `di`
/// (bits 2..N-1). The returned DI has bits 1 and N filled in by matching the
/// measured dihedrals at v_1 and v_N against their quadratic roots.
pub fn construct(geom: &CapGeometry, eps1: f64, di: DihedralIdentifier) -> Result<Embedding, ConstructError> {
    let n = geom.n;
    let start = place_initial_faces(geom, eps1);
    let mut v = vec![Vec3::ZERO; n + 1];
    v[1] = start.v1;
    v[2] = start.v2;
    let (u, w) = (start.u, start.w);
    let mut eps_prev = eps1;
    for k in 2..n {
        let angles = geom.vertex_angles(k);
        if !angles.is_valid() {
            return Err(ConstructError::Degenerate(k));
        }
        let q = vertex_quadratic(&angles, eps_prev).map_err(branch_error(k))?;
        let dk = solve_dihedral(&q, di.bit(k)).map_err(branch_error(k))?;
        v[k + 1] = place_next(u, v[k], v[k - 1], geom.l[k + 1], geom.alpha[k], dk);
        eps_prev = dihedral(v[k], v[k + 1], w, u);
    }
    let closure = ((v[n] - v[1]).norm() - geom.base[n]).abs();
    let mut emb = Embedding { u, w, v, eps1, di, closure };
    // recover the undetermined end bits from the finished coordinates
    for k in [1, n] {
        let e_prev = emb.eps(emb.pv(k));
        let measured = emb.delta(k);
        if let Ok(q) = vertex_quadratic(&geom.vertex_angles(k), e_prev) {
            let dist = |branch: bool| {
                solve_dihedral(&q, branch)
                    .map(|d| circ_dist(d, measured))
                    .unwrap_or(f64::INFINITY)
            };
            emb.di = emb.di.with_bit(k, dist(true) < dist(false));
        }
    }
    Ok(emb)
}

/// Construct under `di`, falling back to the complementary branch mask when
/// the original fails to close. A physical motion crosses its flat states
/// into the complementary mask, so both masks describe the same folding; the
/// returned embedding's recovered DI tells which branch realized it.
pub fn construct_folding(
    geom: &CapGeometry,
    eps1: f64,
    di: DihedralIdentifier,
) -> Result<Embedding, ConstructError> {
    let eps1 = eps1.rem_euclid(std::f64::consts::TAU);
    let first = construct(geom, eps1, di);
    if let Ok(emb) = &first {
        if emb.is_closed(geom) {
            return first;
        }
    }
    match construct(geom, eps1, di.complemented()) {
        Ok(emb) if emb.is_closed(geom) => Ok(emb),
        _ => first,
    }
}

/// All branch masks consistent with the sub-type's symmetry rule, covering
/// construction bits 2..N-1. Exactly half of them survive the flexibility
/// test at a generic in-range flexion value.
pub fn symmetric_masks(subtype: SubType, n: usize) -> Result<Vec<DihedralIdentifier>, ConstructError> {
    let m = n / 2;
    let (free_lo, free_hi) = match subtype {
        SubType::IOee | SubType::IIOee => (2, m + 1),
        SubType::IIAee => (2, m),
        _ => return Err(ConstructError::NoSymmetryRule),
    };
    let free_n = free_hi - free_lo + 1;
    let mut out = Vec::with_capacity(1 << free_n);
    for free in 0..(1u32 << free_n) {
        let mut di = DihedralIdentifier::zero(n);
        for (i, k) in (free_lo..=free_hi).enumerate() {
            di = di.with_bit(k, (free >> i) & 1 == 1);
        }
        di = apply_symmetry_rule(di, subtype, n)?;
        out.push(di);
    }
    Ok(out)
}

/// Fill bits above the free range from their symmetry partners.
fn apply_symmetry_rule(
    mut di: DihedralIdentifier,
    subtype: SubType,
    n: usize,
) -> Result<DihedralIdentifier, ConstructError> {
    let m = n / 2;
    match subtype {
        SubType::IOee | SubType::IIOee => {
            // the partner vertex a half-turn away takes the other root
            for k in m + 2..n {
                di = di.with_bit(k, !di.bit(k - m));
            }
        }
        SubType::IIAee => {
            // partners are the mirror-paired base edges
            for k in m + 1..n {
                di = di.with_bit(k, !di.bit(n + 1 - k));
            }
        }
        _ => return Err(ConstructError::NoSymmetryRule),
    }
    Ok(di)
}

/// Construct from a branch prefix covering the free bits only; the remaining
/// branches follow the symmetry partner rule. The returned embedding records
/// the full DI.
pub fn symmetric_completion(
    geom: &CapGeometry,
    eps1: f64,
    prefix: DihedralIdentifier,
) -> Result<Embedding, ConstructError> {
    let di = apply_symmetry_rule(prefix, geom.subtype, geom.n)?;
    construct(geom, eps1, di)
}

const MODEL_TOL: f64 = 1e-6;

/// Rigidly move the embedding into the sub-type's model frame: a half-turn
/// about the y axis for point-symmetric expansions, a z -> -z reflection for
/// the mirror-symmetric ones. Returns the normalized embedding and the RMS
/// symmetry residual relative to the embedding scale.
pub fn normalize_to_model(emb: &Embedding, subtype: SubType) -> Result<(Embedding, f64), ConstructError> {
    let n = emb.n();
    let m = n / 2;
    let scale: f64 = {
        let c = centroid(emb);
        let mut s = (emb.u - c).norm().max((emb.w - c).norm());
        for k in 1..=n {
            s = s.max((emb.v[k] - c).norm());
        }
        s
    };
    let (out, pairs): (Embedding, Vec<(Vec3, Vec3)>) = match subtype {
        SubType::IOee => {
            // half-turn about the y axis swaps the caps; u, w land on the
            // z axis
            let c0 = (emb.u + emb.w) * 0.5;
            let mut axis = Vec3::ZERO;
            for k in 1..=m {
                let mid = (emb.v[k] + emb.v[k + m]) * 0.5 - c0;
                if mid.norm() > axis.norm() {
                    axis = mid;
                }
            }
            if axis.norm() < 1e-9 * scale {
                return Err(ConstructError::ModelMismatch(f64::INFINITY));
            }
            let ey = axis.normalized();
            let ez = (emb.u - c0).perp(ey).normalized();
            let ex = ey.cross(ez);
            let t = emb.transformed(c0, ex, ey, ez);
            let s = |p: Vec3| Vec3::new(-p.x, p.y, -p.z);
            let mut pairs = vec![(s(t.u), t.w)];
            for k in 1..=m {
                pairs.push((s(t.v[k]), t.v[k + m]));
            }
            (t, pairs)
        }
        SubType::IIAee => {
            // mirror plane z = 0 through v_1 and v_{M+1}; the apexes reflect
            // into each other
            let axis = emb.u - emb.w;
            if axis.norm() < 1e-9 * scale {
                return Err(ConstructError::ModelMismatch(f64::INFINITY));
            }
            let ez = axis.normalized();
            let c0 = (emb.u + emb.w) * 0.5;
            let span = emb.v[m + 1] - emb.v[1];
            if span.perp(ez).norm() < 1e-9 * scale {
                return Err(ConstructError::ModelMismatch(f64::INFINITY));
            }
            let ex = span.perp(ez).normalized();
            let ey = ez.cross(ex);
            let t = emb.transformed(c0, ex, ey, ez);
            let s = |p: Vec3| Vec3::new(p.x, p.y, -p.z);
            let mut pairs = vec![(s(t.u), t.w), (s(t.v[1]), t.v[1]), (s(t.v[m + 1]), t.v[m + 1])];
            for k in 2..=m {
                pairs.push((s(t.v[k]), t.v[n - k + 2]));
            }
            (t, pairs)
        }
        SubType::IIOee => {
            // mirror plane z = 0 through both apexes; base vertexes reflect
            // half a period apart
            let axis = emb.v[1] - emb.v[1 + m];
            if axis.norm() < 1e-9 * scale {
                return Err(ConstructError::ModelMismatch(f64::INFINITY));
            }
            let ez = axis.normalized();
            let c0 = (emb.v[1] + emb.v[1 + m]) * 0.5;
            let span = emb.w - emb.u;
            if span.perp(ez).norm() < 1e-9 * scale {
                return Err(ConstructError::ModelMismatch(f64::INFINITY));
            }
            let ex = span.perp(ez).normalized();
            let ey = ez.cross(ex);
            let t = emb.transformed(c0, ex, ey, ez);
            let s = |p: Vec3| Vec3::new(p.x, p.y, -p.z);
            let mut pairs = vec![(s(t.u), t.u), (s(t.w), t.w)];
            for k in 1..=m {
                pairs.push((s(t.v[k]), t.v[k + m]));
            }
            (t, pairs)
        }
        _ => return Err(ConstructError::NoSymmetryRule),
    };
    let mut sum = 0.0;
    for (a, b) in &pairs {
        sum += (*a - *b).dot(*a - *b);
    }
    let residual = (sum / pairs.len() as f64).sqrt() / scale;
    if residual > MODEL_TOL {
        return Err(ConstructError::ModelMismatch(residual));
    }
    Ok((out, residual))
}

fn centroid(emb: &Embedding) -> Vec3 {
    let n = emb.n();
    let mut c = emb.u + emb.w;
    for k in 1..=n {
        c = c + emb.v[k];
    }
    c * (1.0 / (n + 2) as f64)
}
