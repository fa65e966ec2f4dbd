use energy_models::panel::{parse_csv, partition, PanelDataset, PanelRecord, Scaler, Variable};
use energy_models::{descriptive_stats, snapshot};
use proptest::prelude::*;

fn dataset(values: &[(f64, f64, f64, f64)]) -> PanelDataset {
    let records = values
        .iter()
        .enumerate()
        .map(|(i, &(co2, gdp, energy_use, population))| PanelRecord {
            country: if i % 2 == 0 { "Alpha".into() } else { "Beta".into() },
            year: 1995 + (i / 2) as i32,
            co2,
            gdp,
            energy_use,
            population,
        })
        .collect();
    PanelDataset::new(records, false).unwrap()
}

fn positive_rows() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((1e-3..1e3f64, 10.0..1e5f64, 1.0..1e4f64, 1e3..1e8f64), 4..40)
}

#[test]
fn snapshot_shape() {
    let ds = snapshot::balkan_panel();
    assert_eq!(ds.len(), 100);
    assert_eq!(
        ds.countries(),
        ["Bosnia and Herzegovina", "Croatia", "Macedonia", "Serbia", "Slovenia"]
    );
    assert!(ds.records().iter().all(|r| (1995..=2014).contains(&r.year)));
}

#[test]
fn snapshot_matches_quoted_descriptives() {
    let stats = descriptive_stats(&snapshot::balkan_panel()).unwrap();
    let svn = stats.get("Slovenia", Variable::Co2).unwrap();
    assert!((svn.mean - 7.58).abs() < 0.005 && (svn.sd - 0.502).abs() < 0.0005);
    let bih = stats.get("Bosnia and Herzegovina", Variable::Gdp).unwrap();
    assert!((bih.mean - 3617.605).abs() < 0.01 && (bih.sd - 1157.083).abs() < 0.01);
    assert_eq!(stats.rows.len(), 20);
    assert!(stats.rows.iter().all(|r| r.n == 20));
}

#[test]
fn snapshot_log_roundtrip() {
    let ds = snapshot::balkan_panel();
    let ln = ds.log_transform().unwrap();
    assert!(ln.is_transformed());
    for (a, b) in ds.records().iter().zip(ln.records()) {
        for v in Variable::ALL {
            let back = b.get(v).exp();
            assert!((back - a.get(v)).abs() <= 1e-10 * a.get(v), "{v:?}");
        }
    }
    assert!(ln.log_transform().is_err());
}

#[test]
fn fingerprint_tracks_content() {
    let ds = snapshot::balkan_panel();
    assert_eq!(ds.fingerprint(), snapshot::balkan_panel().fingerprint());
    assert_ne!(ds.fingerprint(), ds.log_transform().unwrap().fingerprint());
    let mut records = ds.records().to_vec();
    records[0].co2 *= 1.0 + 1e-12;
    assert_ne!(
        ds.fingerprint(),
        PanelDataset::new(records, false).unwrap().fingerprint()
    );
}

#[test]
fn partition_of_snapshot() {
    let p = partition(100, [0.70, 0.18, 0.12], 1).unwrap();
    assert_eq!(p.sizes(), (70, 18, 12));
    assert_eq!(p, partition(100, [0.70, 0.18, 0.12], 1).unwrap());
    assert_ne!(p.train_idx, partition(100, [0.70, 0.18, 0.12], 2).unwrap().train_idx);
}

proptest! {
    #[test]
    fn csv_roundtrip(rows in positive_rows()) {
        let ds = dataset(&rows);
        prop_assert_eq!(parse_csv(&ds.to_csv()).unwrap(), ds);
    }

    #[test]
    fn log_transform_preserves_order(rows in positive_rows()) {
        let ds = dataset(&rows);
        let ln = ds.log_transform().unwrap();
        for v in Variable::ALL {
            let raw = ds.column(v);
            let logged = ln.column(v);
            for i in 0..raw.len() {
                for j in 0..raw.len() {
                    if raw[i] < raw[j] {
                        prop_assert!(logged[i] <= logged[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn stats_match_two_pass(rows in positive_rows()) {
        let ds = dataset(&rows);
        let stats = descriptive_stats(&ds).unwrap();
        for country in ["Alpha", "Beta"] {
            for v in Variable::ALL {
                let xs: Vec<f64> = ds.records().iter().filter(|r| r.country == country).map(|r| r.get(v)).collect();
                let n = xs.len() as f64;
                let mean = xs.iter().sum::<f64>() / n;
                let sd = if xs.len() > 1 {
                    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
                } else {
                    0.0
                };
                let row = stats.get(country, v).unwrap();
                prop_assert!((row.mean - mean).abs() <= 1e-10 * mean.abs());
                prop_assert!((row.sd - sd).abs() <= 1e-10 * sd.max(mean.abs() * 1e-6));
            }
        }
    }

    #[test]
    fn scaling_inputs_leaves_standardized_values_unchanged(rows in positive_rows(), k in 0.1..50.0f64) {
        let ds = dataset(&rows);
        let scaled = dataset(&rows.iter().map(|&(a, b, c, d)| (a * k, b * k, c, d * k)).collect::<Vec<_>>());
        let idx: Vec<usize> = (0..ds.len()).collect();
        let vars = [Variable::Co2, Variable::Gdp, Variable::Population];
        if let (Ok(s1), Ok(s2)) = (Scaler::fit(&ds, &idx, &vars), Scaler::fit(&scaled, &idx, &vars)) {
            for (r1, r2) in ds.records().iter().zip(scaled.records()) {
                let z1 = s1.apply(&vars.map(|v| r1.get(v))).unwrap();
                let z2 = s2.apply(&vars.map(|v| r2.get(v))).unwrap();
                for (a, b) in z1.iter().zip(&z2) {
                    prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
                }
            }
        }
    }
}
