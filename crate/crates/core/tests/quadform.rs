use std::collections::BTreeSet;

use finalg::families::{green, kronecker, random_family, r_family};
use finalg::quadform::*;
use num::{BigInt, One};

fn nonsquare_discriminants(max: i64) -> impl Iterator<Item = BigInt> {
    (2..=max).filter(|d| d % 4 == 0 || d % 4 == 1).filter(|&d| (d as f64).sqrt().round() as i64 * ((d as f64).sqrt().round() as i64) != d).map(BigInt::from)
}

#[test]
fn cycles_partition_reduced_forms() {
    for d in nonsquare_discriminants(500) {
        let forms = reduced_forms(&d).unwrap();
        let mut seen = BTreeSet::new();
        for f in &forms {
            if seen.contains(f) {
                continue;
            }
            let cyc = cycle(f).unwrap();
            assert_eq!(cyc.len() % 2, 0, "odd cycle for D={d}");
            for g in &cyc {
                assert!(is_reduced(g).unwrap());
                assert!(seen.insert(g.clone()), "{g} lies on two cycles");
            }
            // right_neighbor is a bijection on the cycle
            let images: BTreeSet<Bqf> = cyc.iter().map(|g| right_neighbor(g).unwrap()).collect();
            assert_eq!(images, cyc.iter().cloned().collect());
        }
        assert_eq!(seen.len(), forms.len());
    }
}

#[test]
fn equivalence_is_an_equivalence_relation() {
    for d in nonsquare_discriminants(200) {
        let forms = reduced_forms(&d).unwrap();
        for f in &forms {
            assert!(equivalent(f, f).unwrap());
            for g in &forms {
                let fg = equivalent(f, g).unwrap();
                assert_eq!(fg, equivalent(g, f).unwrap());
                if fg {
                    for h in &forms {
                        if equivalent(g, h).unwrap() {
                            assert!(equivalent(f, h).unwrap());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn represents_one_agrees_with_brute_force() {
    let one = BigInt::one();
    for d in nonsquare_discriminants(500) {
        for f in reduced_forms(&d).unwrap() {
            let exact = representation_of_one(&f).unwrap();
            if let Some((x, y)) = &exact {
                assert_eq!(f.eval(x, y), one);
            }
            let brute = brute_force_represents(&f, &one, 30);
            if brute.is_some() {
                assert!(exact.is_some(), "{f}");
            }
        }
    }
}

#[test]
fn family_sweep() {
    let one = BigInt::one();
    for n in 2..=6usize {
        for k in 1..n {
            for m in 1..=4usize {
                let q = euler_quadform_family(n, m, k);
                let f = family_f(n, m, k);
                assert_eq!(q.discriminant(), &f * &f - 4);
                if n == 2 {
                    let nf = semidefinite_normal_form(&q).unwrap();
                    assert_eq!(nf.h, BigInt::from(m + 1));
                    assert!(!represents_one(&q).unwrap());
                    continue;
                }
                let p = principal_form(&q.discriminant()).unwrap();
                let principal: BTreeSet<Bqf> = cycle(&p).unwrap().into_iter().collect();
                let expected: BTreeSet<Bqf> =
                    [Bqf::new(1, &f - 2, 2 - &f), Bqf::new(2 - &f, &f - 2, 1)].into_iter().collect();
                assert_eq!(principal, expected);
                let qp = family_reduced_form(n, m, k);
                // reduced exactly when k < n - 1; at k = n - 1 the middle coefficient is too small
                assert_eq!(is_reduced(&qp).unwrap(), k + 1 < n, "{qp}");
                assert!(equivalent(&q, &qp).unwrap());
                assert!(!principal.contains(&qp));
                assert!(!represents_one(&q).unwrap());
                if n <= 4 && m <= 2 {
                    assert!(brute_force_represents(&q, &one, 200).is_none());
                }
            }
        }
    }
}

#[test]
fn euler_form_from_chi_matches_closed_form() {
    let mut count = 0;
    for (n, k) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2)] {
        for m in 1..=4 {
            let a = r_family(&random_family(n, m, k, 13).unwrap()).unwrap().into_algebra();
            assert_eq!(euler_quadform(&a).unwrap(), euler_quadform_family(n, m, k));
            assert!(!exceptional_object_verdict(&a).unwrap());
            count += 1;
        }
    }
    assert_eq!(count, 20);
}

#[test]
fn projectives_give_exceptional_objects() {
    let one = BigInt::one();
    for n in 1..=5 {
        let a = kronecker(n, &vec![0; n]).unwrap().into_algebra();
        let q = euler_quadform(&a).unwrap();
        assert_eq!(q.eval(&BigInt::one(), &BigInt::from(0)), BigInt::one());
        assert!(exceptional_object_verdict(&a).unwrap());
    }
    for k in 0..=6 {
        let g = green(k).unwrap().into_algebra();
        let q = euler_quadform(&g).unwrap();
        let verdict = exceptional_object_verdict(&g).unwrap();
        assert_eq!(verdict, brute_force_represents(&q, &one, 50).is_some());
    }
}
