//! Built-in regression fixtures: the published example parameter sets for all
//! five sub-types, with their expected completion angles, folding selectors,
//! and flexible-suspension counts.

use std::sync::OnceLock;

use crate::types::{ParamData, ParameterSet, SubType};

/// Edge-length fixture for the symmetric sub-types.
#[derive(Debug, Clone)]
pub struct EdgeFixture {
    pub id: &'static str,
    pub params: ParameterSet,
    /// Number of flexible foldings at a generic in-range flexion value.
    pub expected_foldings: usize,
}

/// Seed fixture for the axial sub-types.
#[derive(Debug, Clone)]
pub struct SeedFixture {
    pub id: &'static str,
    pub params: ParameterSet,
    /// Number of flexible suspensions over all completions.
    pub expected_fs: usize,
}

/// Expected completion of one seed fixture: the dependent apical angles, the
/// base-vertex angles beta_3..beta_N, and the folding selector.
#[derive(Debug, Clone)]
pub struct CompletionFixture {
    pub id: &'static str,
    pub n: usize,
    pub di: u32,
    /// alpha_4, alpha_6, ..., alpha_N in degrees.
    pub even_alpha_deg: Vec<f64>,
    /// beta_3, beta_4, ..., beta_N in degrees.
    pub beta_deg: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FixtureCatalog {
    pub table_d1: Vec<EdgeFixture>,
    pub table_d2: Vec<EdgeFixture>,
    pub table_d3: Vec<EdgeFixture>,
    pub table_d4: Vec<SeedFixture>,
    pub table_d5: Vec<SeedFixture>,
    pub table_d6: Vec<CompletionFixture>,
    pub table_d7: Vec<CompletionFixture>,
}

impl FixtureCatalog {
    /// Every edge-length fixture with its table name.
    pub fn edge_fixtures(&self) -> impl Iterator<Item = &EdgeFixture> {
        self.table_d1.iter().chain(&self.table_d2).chain(&self.table_d3)
    }

    /// Every seed fixture with its table name.
    pub fn seed_fixtures(&self) -> impl Iterator<Item = &SeedFixture> {
        self.table_d4.iter().chain(&self.table_d5)
    }

    pub fn find(&self, id: &str) -> Option<ParameterSet> {
        self.edge_fixtures()
            .find(|f| f.id == id)
            .map(|f| f.params.clone())
            .or_else(|| self.seed_fixtures().find(|f| f.id == id).map(|f| f.params.clone()))
    }

    pub fn ids(&self) -> Vec<&'static str> {
        self.edge_fixtures()
            .map(|f| f.id)
            .chain(self.seed_fixtures().map(|f| f.id))
            .collect()
    }
}

fn edges(
    id: &'static str,
    subtype: SubType,
    l: Vec<f64>,
    m: Vec<f64>,
    base: Vec<f64>,
    expected_foldings: usize,
) -> EdgeFixture {
    let n = match subtype {
        SubType::IIOee => l.len() * 2,
        _ => l.len(),
    };
    EdgeFixture {
        id,
        params: ParameterSet { subtype, n, data: ParamData::Edges { l, m, base } },
        expected_foldings,
    }
}

fn seed(
    id: &'static str,
    subtype: SubType,
    seed: [f64; 5],
    odd_alphas: Vec<f64>,
    expected_fs: usize,
) -> SeedFixture {
    let n = 4 + 2 * odd_alphas.len();
    let [l1, alpha1, beta1, alpha2, beta2] = seed;
    SeedFixture {
        id,
        params: ParameterSet {
            subtype,
            n,
            data: ParamData::Seed { l1, alpha1, beta1, alpha2, beta2, odd_alphas },
        },
        expected_fs,
    }
}

fn completion(
    id: &'static str,
    di: u32,
    even_alpha_deg: Vec<f64>,
    beta_deg: Vec<f64>,
) -> CompletionFixture {
    let n = beta_deg.len() + 2;
    assert_eq!(even_alpha_deg.len(), n / 2 - 1);
    CompletionFixture { id, n, di, even_alpha_deg, beta_deg }
}

static CATALOG: OnceLock<FixtureCatalog> = OnceLock::new();

/// The built-in fixture catalog.
pub fn catalog() -> &'static FixtureCatalog {
    CATALOG.get_or_init(build)
}

#[rustfmt::skip]
fn build() -> FixtureCatalog {
    use SubType::*;
    let d1 = vec![
        edges("d1-1", IOee, vec![10.,11.,12.,13.], vec![], vec![8.,9.], 2),
        edges("d1-2", IOee, vec![10.,12.,11.,12.,11.,13.], vec![], vec![3.,4.,5.], 4),
        edges("d1-3", IOee, vec![10.,12.,11.,13.,14.,16.,15.,14.], vec![], vec![4.,3.,5.,6.], 8),
        edges("d1-4", IOee, vec![10.,13.,15.,13.,16.,12.,15.,14.,12.,13.], vec![], vec![10.,11.,12.,14.,13.], 16),
        edges("d1-5", IOee, vec![10.,13.,15.,13.,16.,12.,15.,14.,12.,13.,14.,11.], vec![], vec![10.,11.,12.,14.,13.,12.], 32),
        edges("d1-6", IOee, vec![10.,13.,15.,13.,16.,12.,15.,14.,12.,13.,14.,11.,13.,12.], vec![], vec![10.,15.,12.,14.,13.,12.,11.], 64),
        edges("d1-7", IOee, vec![10.,11.,12.,10.,10.,12.,11.,12.,10.,12.,11.,12.,10.,12.,11.,12.], vec![], vec![10.,11.,12.,10.,12.,10.,12.,11.], 128),
    ];
    let d2 = vec![
        edges("d2-1", IIAee, vec![10.,11.,12.,13.], vec![], vec![5.,4.], 2),
        edges("d2-2", IIAee, vec![10.,14.,15.,12.,13.,11.], vec![], vec![5.,4.,6.], 4),
        edges("d2-3", IIAee, vec![10.,11.,12.,13.,12.,11.,14.,13.], vec![], vec![5.,6.,4.,3.], 8),
        edges("d2-4", IIAee, vec![10.,13.,14.,14.,12.,11.,13.,13.,17.,16.], vec![], vec![10.,9.,8.,7.,7.], 16),
        edges("d2-5", IIAee, vec![10.,12.,11.,14.,13.,16.,15.,18.,17.,20.,19.,22.], vec![], vec![15.,16.,17.,18.,19.,20.], 32),
        edges("d2-6", IIAee, vec![10.,12.,11.,14.,13.,16.,15.,18.,17.,20.,19.,22.,21.,24.], vec![], vec![16.,17.,18.,19.,20.,21.,22.], 64),
        edges("d2-7", IIAee, vec![10.,15.,20.,11.,16.,21.,12.,17.,22.,13.,18.,23.,14.,19.,24.,17.], vec![], vec![15.,16.,17.,18.,18.,17.,16.,15.], 128),
    ];
    let d3 = vec![
        edges("d3-1", IIOee, vec![10.,13.], vec![16.,12.], vec![8.,7.], 2),
        edges("d3-2", IIOee, vec![10.,11.,12.], vec![12.,13.,15.], vec![5.,3.,4.], 4),
        edges("d3-3", IIOee, vec![10.,12.,11.,13.], vec![14.,17.,15.,13.], vec![4.,3.,5.,6.], 8),
        edges("d3-4", IIOee, vec![10.,13.,14.,15.,12.], vec![18.,21.,19.,16.,15.], vec![9.,10.,8.,6.,7.], 16),
        edges("d3-5", IIOee, vec![10.,13.,14.,15.,12.,11.], vec![11.,14.,16.,13.,13.,12.], vec![5.,4.,7.,8.,3.,9.], 32),
        edges("d3-6", IIOee, vec![10.,13.,14.,15.,12.,11.,13.], vec![11.,14.,15.,16.,13.,12.,14.], vec![10.,10.,8.,7.,6.,9.,12.], 64),
        edges("d3-7", IIOee, vec![10.;8], vec![13.;8], vec![8.,10.,8.,10.,8.,10.,8.,10.], 128),
    ];
    let d4 = vec![
        seed("d4-1", IIIOae { oas_index: 3 }, [10.,45.,55.,30.,20.], vec![], 3),
        seed("d4-2", IIIOae { oas_index: 3 }, [10.,45.,55.,30.,20.], vec![25.], 3),
        seed("d4-3", IIIOae { oas_index: 4 }, [10.,22.,70.,100.,45.], vec![40.], 1),
        seed("d4-4", IIIOae { oas_index: 5 }, [10.,69.,55.,30.,45.], vec![25.,21.], 3),
        seed("d4-5", IIIOae { oas_index: 5 }, [10.,54.,75.,47.,47.], vec![35.,6.,41.], 8),
        seed("d4-6", IIIOae { oas_index: 7 }, [10.,75.,70.,30.,50.], vec![25.,35.,20.,40.], 5),
        seed("d4-7", IIIOae { oas_index: 8 }, [10.,71.,76.,70.,31.], vec![32.,29.,23.,37.,30.], 13),
        seed("d4-8", IIIOae { oas_index: 8 }, [10.,71.,76.,70.,30.], vec![36.,33.,23.,37.,31.,28.], 10),
    ];
    let d5 = vec![
        seed("d5-1", IIIOas { winding: 1 }, [10.,105.,30.,110.,25.], vec![], 2),
        seed("d5-2", IIIOas { winding: 1 }, [10.,45.,80.,42.,37.], vec![48.], 4),
        seed("d5-3", IIIOas { winding: 1 }, [10.,30.,85.,40.,70.], vec![45.,45.], 5),
        seed("d5-4", IIIOas { winding: 1 }, [10.,30.,91.,31.,75.], vec![27.,25.,30.], 3),
        seed("d5-5", IIIOas { winding: 1 }, [10.,41.,104.,29.,75.], vec![27.,48.,21.,33.], 1),
        seed("d5-6", IIIOas { winding: 2 }, [10.,55.,55.,100.,40.], vec![49.,57.,55.,48.,50.], 6),
        seed("d5-7", IIIOas { winding: 3 }, [10.,70.,63.,69.,59.], vec![62.,66.,69.,67.,68.,65.], 3),
    ];
    let d6 = vec![
        completion("d6-1", 9, vec![30.0],
            vec![112.12184, 87.83527]),
        completion("d6-2", 41, vec![16.40308, 13.59692],
            vec![112.12184, 118.35370, 126.47742, 104.23836]),
        completion("d6-3", 53, vec![83.30367, 16.69633],
            vec![21.45580, 60.58002, 74.47896, 82.03499]),
        completion("d6-4", 55, vec![83.32691, 60.25878, 53.06814],
            vec![107.57407, 60.98961, 111.23558, 23.65624, 79.35616, 41.30176]),
        completion("d6-5", 805, vec![100.88503, 94.89234, 42.70820, 10.28448],
            vec![27.48350, 53.22171, 151.69262, 22.74071, 126.67290, 37.49349, 100.91108, 12.47047]),
        completion("d6-6", 3149, vec![64.27757, 66.40444, 67.23134, 63.46828, 29.98240],
            vec![113.98589, 42.89481, 53.01637, 69.15124, 140.43696, 25.11212, 111.18488, 36.54932, 65.99163, 26.93834]),
        completion("d6-7", 1009, vec![79.94471, 64.21691, 28.13814, 69.71837, 106.32765, 9.97746],
            vec![130.35037, 72.30741, 29.55757, 46.24987, 18.56180, 90.38385, 131.26467, 51.31861, 24.06035, 41.67901, 19.54221, 122.67419]),
        completion("d6-8", 3697, vec![77.23450, 58.22912, 38.51987, 40.02534, 72.02307, 16.65480, 38.24054],
            vec![119.99899, 64.61507, 41.84098, 57.99019, 24.38078, 88.80814, 111.30147, 69.20590, 62.35174, 40.78832, 30.57510, 93.17456, 53.05563, 85.23613]),
    ];
    let d7 = vec![
        completion("d7-1", 3, vec![70.00000],
            vec![82.95205, 50.47518]),
        completion("d7-2", 49, vec![105.95429, 32.04571],
            vec![99.13918, 49.21957, 37.80644, 28.97738]),
        completion("d7-3", 53, vec![91.18022, 47.37676, 1.44302],
            vec![40.43044, 50.99966, 34.62276, 120.10265, 27.97615, 127.09938]),
        completion("d7-4", 799, vec![2.29641, 65.48725, 56.38952, 24.82681],
            vec![105.25131, 84.73441, 130.85701, 48.10408, 63.33243, 56.76065, 35.09934, 65.39581]),
        completion("d7-5", 4081, vec![90.80897, 16.13559, 3.70555, 23.68880, 16.66108],
            vec![53.32442, 35.56317, 23.46576, 104.33625, 67.20918, 115.40075, 87.09237, 109.81759, 109.93166, 129.25846]),
        completion("d7-6", 6197, vec![52.66573, 17.47293, 9.54257, 25.82052, 137.95959, 16.53867],
            vec![34.84383, 111.74521, 29.50679, 120.94430, 53.40928, 47.83117, 91.51635, 21.79280, 108.12969, 19.54775, 39.29289, 101.21476]),
        completion("d7-7", 14549, vec![35.52177, 88.31987, 87.36781, 70.20535, 39.37543, 64.82772, 85.38206],
            vec![56.25741, 52.29144, 77.21017, 32.20233, 69.65471, 50.95207, 36.56857, 62.72476, 44.85946, 78.08803, 76.63756, 42.06629, 62.48605, 36.20026]),
    ];
    FixtureCatalog { table_d1: d1, table_d2: d2, table_d3: d3, table_d4: d4, table_d5: d5, table_d6: d6, table_d7: d7 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixture_params_validate() {
        let c = catalog();
        for f in c.edge_fixtures() {
            f.params.validate().unwrap_or_else(|e| panic!("{}: {e}", f.id));
        }
        for f in c.seed_fixtures() {
            f.params.validate().unwrap_or_else(|e| panic!("{}: {e}", f.id));
        }
    }

    #[test]
    fn completion_rows_align_with_seed_rows() {
        let c = catalog();
        assert_eq!(c.table_d6.len(), c.table_d4.len());
        assert_eq!(c.table_d7.len(), c.table_d5.len());
        for (s, e) in c.table_d4.iter().zip(&c.table_d6) {
            assert_eq!(s.params.n, e.n, "{}", e.id);
        }
        for (s, e) in c.table_d5.iter().zip(&c.table_d7) {
            assert_eq!(s.params.n, e.n, "{}", e.id);
        }
    }

    #[test]
    fn lookup_by_id() {
        let c = catalog();
        assert!(c.find("d1-4").is_some());
        assert!(c.find("d5-7").is_some());
        assert!(c.find("nope").is_none());
        assert_eq!(c.ids().len(), 36);
    }
}
