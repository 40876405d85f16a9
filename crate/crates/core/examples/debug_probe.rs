use flexspan_core::*;
use std::f64::consts::PI;

fn main() {
    let cat = catalog();
    for (id, mask) in [("d4-3", 20u32), ("d4-5", 292u32)] {
        let fix = cat.seed_fixtures().find(|f| f.id == id).unwrap();
        for g in complete_suspension(&fix.params).unwrap() {
            for (di, range) in enumerate_foldings(&g).unwrap() {
                if di.mask() != mask {
                    continue;
                }
                let s = validate_full(&g, di, &range).unwrap();
                println!("{id} {di} n={}", g.n);
                for r in s.samples.iter().step_by(90) {
                    let sig: Vec<String> =
                        r.sigma[1..].iter().map(|v| format!("{:.4}", v / PI)).collect();
                    println!(
                        "  e={:.3} su={:.4} sw={:.4} sv/pi=[{}]",
                        r.eps1,
                        r.sigma_u / PI,
                        r.sigma_w / PI,
                        sig.join(", ")
                    );
                }
            }
        }
    }
}
