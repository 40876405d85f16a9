use flexspan_core::*;

fn main() {
    let cat = catalog();
    for fix in cat.edge_fixtures() {
        let g = expand_type12(&fix.params).unwrap();
        for (di, range) in enumerate_foldings(&g).unwrap() {
            if let Err(e) = validate_full(&g, di, &range) {
                println!("{} di {di}: {e} range {:?}", fix.id, range.intervals);
            }
        }
    }
    for fix in cat.seed_fixtures() {
        for g in complete_suspension(&fix.params).unwrap() {
            for (di, range) in enumerate_foldings(&g).unwrap() {
                if let Err(e) = validate_full(&g, di, &range) {
                    println!("{} di {di}: {e} range {:?}", fix.id, range.intervals);
                }
            }
        }
    }
}
