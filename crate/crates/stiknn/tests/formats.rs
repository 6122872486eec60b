use std::path::Path;

use proptest::prelude::*;
use stiknn::core::{Dataset, InteractionMatrix, LabelInterner, MatrixMeta, Role};
use stiknn::dataset_csv::{parse_csv, read_csv, to_csv_string, write_csv};
use stiknn::matrix_io::{heatmap_ppm, matrix_to_csv, parse_matrix_csv, read_matrix_csv, write_matrix_csv};

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
    ]
}

fn dataset() -> impl Strategy<Value = Dataset> {
    (1usize..5, 1usize..20).prop_flat_map(|(dim, n)| {
        (
            prop::collection::vec(prop::collection::vec(finite(), dim), n),
            prop::collection::vec("[a-z][a-z0-9_]{0,6}", n),
        )
            .prop_map(|(rows, labels)| Dataset::from_rows(&rows, &labels, Role::Train).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dataset_csv_round_trips(ds in dataset()) {
        let text = to_csv_string(&ds).unwrap();
        let mut labels = LabelInterner::new();
        let back = parse_csv(text.as_bytes(), Path::new("mem"), &mut labels, Role::Train).unwrap();
        prop_assert_eq!(back.len(), ds.len());
        for i in 0..ds.len() {
            let (a, b) = (ds.point(i), back.point(i));
            prop_assert_eq!(
                a.features.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
                b.features.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
            );
            prop_assert_eq!(ds.label_name(a.label), back.label_name(b.label));
        }
    }

    #[test]
    fn matrix_csv_round_trips(n in 1usize..8, seed in prop::collection::vec(finite(), 64)) {
        let values: Vec<f64> = (0..n * n).map(|i| seed[i % seed.len()]).collect();
        let m = InteractionMatrix::from_values(n, values, MatrixMeta::default()).unwrap();
        let back = parse_matrix_csv(&matrix_to_csv(&m), Path::new("mem")).unwrap();
        prop_assert_eq!(
            back.values().iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            m.values().iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn heatmap_has_one_pixel_per_cell(n in 1usize..12, v in -1.0..1.0f64) {
        let m = InteractionMatrix::from_values(n, vec![v; n * n], MatrixMeta::default()).unwrap();
        let ppm = heatmap_ppm(&m);
        let header = format!("P6\n{n} {n}\n255\n");
        prop_assert!(ppm.starts_with(header.as_bytes()));
        prop_assert_eq!(ppm.len(), header.len() + 3 * n * n);
    }
}

#[test]
fn files_round_trip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let ds = Dataset::from_rows(&[vec![0.1, -2.5], vec![1e-300, 3.0]], &["x", "y"], Role::Train).unwrap();
    let path = dir.path().join("d.csv");
    write_csv(&ds, &path).unwrap();
    assert_eq!(read_csv(&path, Role::Train).unwrap(), ds);

    let m = InteractionMatrix::from_values(2, vec![1.0 / 3.0, -0.1, -0.1, 0.5], MatrixMeta::default()).unwrap();
    let mpath = dir.path().join("m.csv");
    write_matrix_csv(&m, &mpath).unwrap();
    assert_eq!(read_matrix_csv(&mpath).unwrap().values(), m.values());
}

#[test]
fn header_only_and_empty_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    assert!(read_csv(&empty, Role::Train).unwrap_err().to_string().contains("empty"));
    let header = dir.path().join("header.csv");
    std::fs::write(&header, "x1,label\n").unwrap();
    assert!(read_csv(&header, Role::Train).unwrap_err().to_string().contains("no data rows"));
}
