//! Property tests for the geometric kernel and the construction pipeline.

use std::f64::consts::PI;

use proptest::prelude::*;

use flexspan_core::geometry::{
    dihedral, quadratic_roots, rot_x, rot_z, solve_dihedral, triangle_angles, vertex_quadratic,
    wrap_angle, Mat3, VertexAngles, TWO_PI,
};
use flexspan_core::{
    catalog, construct, expand_type12, DihedralIdentifier, ParamData, ParameterSet, SubType,
};

fn approx(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() < tol
}

fn is_rotation(m: &Mat3) -> bool {
    let t = m.transpose();
    let mut ok = approx(m.det(), 1.0, 1e-12);
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                s += m.0[i][k] * t.0[k][j];
            }
            ok &= approx(s, if i == j { 1.0 } else { 0.0 }, 1e-12);
        }
    }
    ok
}

proptest! {
    #[test]
    fn wrap_angle_lands_in_principal_range(a in -50.0..50.0f64) {
        let w = wrap_angle(a);
        prop_assert!((0.0..TWO_PI).contains(&w));
        let turns = (a - w) / TWO_PI;
        prop_assert!(approx(turns, turns.round(), 1e-9));
    }

    #[test]
    fn rotation_matrices_are_orthogonal(a in -10.0..10.0f64) {
        prop_assert!(is_rotation(&rot_z(a)));
        prop_assert!(is_rotation(&rot_x(a)));
    }

    #[test]
    fn triangle_angles_sum_and_sines(a in 1.0..20.0f64, b in 1.0..20.0f64, c in 1.0..20.0f64) {
        prop_assume!(a + b > c && b + c > a && c + a > b);
        let (x, y, z) = triangle_angles(a, b, c);
        prop_assert!(x > 0.0 && y > 0.0 && z > 0.0);
        prop_assert!(approx(x + y + z, PI, 1e-12));
        let r = a / x.sin();
        prop_assert!(approx(b / y.sin(), r, 1e-9 * r));
        prop_assert!(approx(c / z.sin(), r, 1e-9 * r));
    }

    #[test]
    fn solved_dihedrals_satisfy_the_vertex_closure(
        beta in 0.2..2.9f64,
        gamma_prev in 0.2..2.9f64,
        big_gamma_prev in 0.2..2.9f64,
        big_b in 0.2..2.9f64,
        eps_prev in 0.05..6.2f64,
    ) {
        let angles = VertexAngles { beta, gamma_prev, big_gamma_prev, big_b };
        prop_assume!(angles.is_valid());
        let Ok(q) = vertex_quadratic(&angles, eps_prev) else {
            return Ok(());
        };
        if let Ok((lo, hi)) = quadratic_roots(&q) {
            prop_assert!(lo.is_finite() && hi.is_finite());
        }
        for branch in [false, true] {
            let Ok(delta) = solve_dihedral(&q, branch) else { continue };
            prop_assert!((0.0..TWO_PI).contains(&delta));
            let res = angles.closure_residual(delta, eps_prev);
            prop_assert!(res.abs() < 1e-8, "closure residual {res}");
        }
    }

    #[test]
    fn di_roundtrips_and_complement_involutes(mask in 0u32..(1 << 10), n in 4usize..=10) {
        prop_assume!(n % 2 == 0);
        let mask = mask & ((1 << n) - 1);
        let di = DihedralIdentifier::new(mask, n);
        prop_assert_eq!(DihedralIdentifier::parse(&di.to_string(), n).unwrap(), di);
        prop_assert_eq!(
            DihedralIdentifier::parse(&format!("0x{}", di.hex()), n).unwrap(),
            di
        );
        prop_assert_eq!(di.complemented().complemented(), di);
        for k in 1..=n {
            prop_assert_eq!(di.complemented().bit(k), !di.bit(k));
        }
    }

    #[test]
    fn expansion_preserves_metric_identities(
        l in prop::collection::vec(5.0..15.0f64, 4),
        base in prop::collection::vec(4.0..9.0f64, 2),
    ) {
        let p = ParameterSet {
            subtype: SubType::IOee,
            n: 4,
            data: ParamData::Edges { l: l.clone(), m: vec![], base: base.clone() },
        };
        let Ok(g) = expand_type12(&p) else {
            return Ok(());
        };
        let m = g.n / 2;
        for k in 1..=m {
            prop_assert!(approx(g.m[k], g.l[k + m], 1e-12));
            prop_assert!(approx(g.m[k + m], g.l[k], 1e-12));
            prop_assert!(approx(g.base[k + m], g.base[k], 1e-12));
        }
        prop_assert!(g.angle_sum_residual() < 1e-9);
        prop_assert!(g.law_of_sines_residual() < 1e-9);
    }

    #[test]
    fn constructed_edges_match_the_metric(
        mask in 0u32..4,
        eps1_deg in 1.0..359.0f64,
    ) {
        let p = catalog().find("d1-2").unwrap();
        let g = expand_type12(&p).unwrap();
        let di = DihedralIdentifier::new(mask << 1, g.n);
        let Ok(emb) = construct(&g, eps1_deg.to_radians(), di) else {
            return Ok(());
        };
        // every constructed edge must carry its prescribed length whether or
        // not the closing edge matches
        let scale = g.scale();
        for k in 1..=g.n {
            prop_assert!(approx((emb.u - emb.v[k]).norm(), g.l[k], 1e-8 * scale));
            prop_assert!(approx((emb.w - emb.v[k]).norm(), g.m[k], 1e-8 * scale));
            if k < g.n {
                prop_assert!(approx((emb.v[k] - emb.v[k + 1]).norm(), g.base[k], 1e-8 * scale));
            }
        }
        // measured dihedrals live in the principal range and reproduce eps1
        prop_assert!(approx(emb.eps(1), eps1_deg.to_radians(), 1e-9));
        for k in 1..=g.n {
            prop_assert!((0.0..TWO_PI).contains(&emb.delta(k)));
            prop_assert!((0.0..TWO_PI).contains(&emb.big_delta(k)));
        }
    }

    #[test]
    fn mirror_construction_conjugates_dihedrals(eps1_deg in 30.0..160.0f64, mask in 0u32..4) {
        let p = catalog().find("d1-1").unwrap();
        let g = expand_type12(&p).unwrap();
        let di = DihedralIdentifier::new(mask << 1, g.n);
        let e = eps1_deg.to_radians();
        let Ok(a) = construct(&g, e, di) else { return Ok(()) };
        let Ok(b) = construct(&g, TWO_PI - e, di.complemented()) else { return Ok(()) };
        for k in 1..=g.n {
            let (da, db) = (a.delta(k), b.delta(k));
            prop_assert!(
                approx(da, TWO_PI - db, 1e-7) || approx(da, db, 1e-7),
                "delta_{k}: {da} vs {db}"
            );
        }
        prop_assert!(approx(a.closure, b.closure, 1e-7 * g.scale()));
    }
}

#[test]
fn dihedral_of_known_quarter_turn() {
    use flexspan_core::geometry::Vec3;
    let p = Vec3::ZERO;
    let q = Vec3::new(0.0, 0.0, 1.0);
    let x = Vec3::new(1.0, 0.0, 0.5);
    let y = Vec3::new(0.0, 1.0, -0.3);
    let d = dihedral(p, q, x, y);
    assert!((d - PI / 2.0).abs() < 1e-12, "{d}");
}
