use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use tacert::matrix::{psd_check, rank1_cut_matrix, sample_elliptope, SymMatrix};
use tacert::seed;

fn random_orthogonal(n: usize, s: u64) -> DMatrix<f64> {
    let mut rng = seed::rng(s);
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn samples_lie_in_elliptope(n in 1usize..=30, r_frac in 0.0f64..1.0, s in any::<u64>()) {
        let rank = 1 + ((n as f64 - 1.0) * r_frac).round() as usize;
        let x = sample_elliptope(n, rank, s).unwrap();
        prop_assert!(x.matrix().diagonal().iter().all(|&d| d == 1.0));
        prop_assert!(psd_check(x.matrix(), 1e-10).unwrap().is_psd);
        prop_assert!(x.matrix().max_abs() <= 1.0);
    }

    #[test]
    fn psd_verdict_is_spectrally_invariant(n in 2usize..=12, s in any::<u64>(), shift in -1.0f64..0.5) {
        // X - shift * I has a min eigenvalue near the PSD boundary.
        let x = sample_elliptope(n, n, s).unwrap();
        let m = x.matrix().map_entries(|i, j, v| if i == j { v + shift } else { v }).unwrap();
        let q = random_orthogonal(n, s ^ 0xABCD);
        let rotated = SymMatrix::from_dmatrix(&(q.transpose() * m.to_dmatrix() * &q)).unwrap();
        let a = psd_check(&m, 1e-9).unwrap();
        let b = psd_check(&rotated, 1e-9).unwrap();
        prop_assert!((a.min_eigenvalue - b.min_eigenvalue).abs() <= 1e-8);
        if (a.min_eigenvalue + 1e-9).abs() > 1e-8 {
            prop_assert_eq!(a.is_psd, b.is_psd);
        }
    }

    #[test]
    fn cut_matrix_sign_symmetry(x in prop::collection::vec(prop::bool::ANY, 1..16)) {
        let x: Vec<i8> = x.into_iter().map(|b| if b { 1 } else { -1 }).collect();
        let neg: Vec<i8> = x.iter().map(|s| -s).collect();
        let a = rank1_cut_matrix(&x).unwrap();
        prop_assert_eq!(&a, &rank1_cut_matrix(&neg).unwrap());
        if x.len() >= 2 {
            let v = psd_check(a.matrix(), 1e-9).unwrap();
            prop_assert!(v.is_psd && v.min_eigenvalue.abs() < 1e-12);
        }
    }

    #[test]
    fn verdict_matches_threshold(n in 1usize..=8, s in any::<u64>(), tol in 0.0f64..1e-3) {
        let x = sample_elliptope(n, n, s).unwrap();
        let v = psd_check(x.matrix(), tol).unwrap();
        prop_assert_eq!(v.is_psd, v.min_eigenvalue >= -tol);
        prop_assert_eq!(v.tolerance_used, tol);
    }
}

#[test]
fn matrix_file_round_trip() {
    let dir = tempfile_dir();
    let path = dir.join("x.txt");
    let x = sample_elliptope(5, 3, 17).unwrap();
    std::fs::write(&path, x.matrix().to_text()).unwrap();
    let back = SymMatrix::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(&back, x.matrix());
    std::fs::remove_dir_all(dir).unwrap();
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("tacert-core-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn load_symmetrizes() {
    let m = SymMatrix::parse("2\n1 0.25\n0.75 1\n").unwrap();
    assert_eq!(m.get(0, 1), 0.5);
    assert_eq!(m.get(1, 0), 0.5);
}
