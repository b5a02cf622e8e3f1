use finalg::exactmat::IntMatrix;
use finalg::families::{e_family, generalized_green_pairs, green, kk_family, random_family, r_family};
use finalg::ktheory::*;

fn family_chi(n: i64, m: i64, k: i64) -> IntMatrix {
    IntMatrix::from_i64(&[&[m * (n - k) + 1, n + m * k * (n - k)], &[m, m * k + 1]])
}

#[test]
fn chi_of_r_matches_closed_form() {
    for (n, m, k) in [(2, 1, 1), (3, 2, 1), (4, 2, 2), (3, 1, 2)] {
        let f = random_family(n, m, k, 1).unwrap();
        let a = r_family(&f).unwrap().into_algebra();
        let (n, m, k) = (n as i64, m as i64, k as i64);
        let chi = chi_matrix(&a).unwrap();
        assert_eq!(chi, family_chi(n, m, k));
        let expected = IntMatrix::from_i64(&[&[m * k + 1, -m], &[-n - m * k * (n - k), m * (n - k) + 1]]);
        assert_eq!(chi_inverse_transpose(&chi).unwrap(), expected);
    }
    let kk = r_family(&kk_family(2).unwrap()).unwrap().into_algebra();
    assert_eq!(chi_matrix(&kk).unwrap(), family_chi(2, 2, 1));
}

#[test]
fn chi_is_multiplicative_over_iterated_products() {
    for pq in [vec![(1, 1)], vec![(2, 1), (1, 3)], vec![(1, 2), (2, 2), (1, 1)]] {
        let p = generalized_green_pairs(&pq).unwrap();
        assert!(verify_iterated_chi(&p).unwrap());
    }
    for delta in [0, 1] {
        assert!(verify_iterated_chi(&e_family(2, 3, delta).unwrap()).unwrap());
    }
}

#[test]
fn green_chi_is_unitriangular() {
    for k in 0..=5 {
        let chi = chi_matrix(&green(k).unwrap().into_algebra()).unwrap();
        assert_eq!(chi.det().unwrap(), 1.into());
    }
}

#[test]
fn factorizations_round_trip() {
    for n in 2..=4 {
        for seed in 0..6 {
            let m = random_sl(n, 30, 200, seed);
            assert_eq!(word_product(n, &factor_sl(&m).unwrap()), m);
            if n <= 3 {
                assert_eq!(word_product(n, &factor_sl_compact(&m).unwrap()), m);
            }
        }
    }
    let bad = IntMatrix::from_i64(&[&[2, 0], &[0, 1]]);
    assert!(factor_sl(&bad).is_err());
    assert!(realize_green(&bad).is_err());
}

#[test]
fn realization_reproduces_the_matrix() {
    for n in 2..=3 {
        for seed in 0..3 {
            let m = random_sl(n, 12, 100, seed);
            let p = realize_green(&m).unwrap();
            assert_eq!(chi_matrix(p.algebra()).unwrap(), m);
            let word = factor_sl_compact(&m).unwrap();
            let dims = realization_dims(n, &word);
            let total: num::BigInt = dims.to_rows().into_iter().flatten().sum();
            assert_eq!(total, p.algebra().dim().into());
        }
    }
    let rot = IntMatrix::from_i64(&[&[0, -1], &[1, 0]]);
    let p = realize_green(&rot).unwrap();
    assert_eq!(p.factors.len(), 3);
    assert_eq!(chi_matrix(p.algebra()).unwrap(), rot);
    assert!(verify_iterated_chi(&p).unwrap());
    let id = realize_green(&IntMatrix::identity(3)).unwrap();
    assert_eq!(id.algebra().dim(), 3);
}
