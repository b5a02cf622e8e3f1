
use finalg::algebra::*;
use finalg::exactmat::SparseVec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::*;

#[test]
fn quotient_complex_is_acyclic_on_random_ideals() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    let mut not_closed = 0;
    for a in samples() {
        assert!(a.validate().is_valid());
        assert!(a.has_differential());
        for _ in 0..20 {
            let gens: Vec<SparseVec> = (0..rng.gen_range(1..=2)).map(|_| random_homogeneous(&a, &mut rng)).collect();
            let i = ideal_generated_by(&a, &gens);
            assert!(is_two_sided(&a, &i));
            assert!(i.is_graded(&a));
            let minus = internal_ideal(&a, &i).unwrap();
            let plus = external_ideal(&a, &i).unwrap();
            assert!(i.contains_ideal(&minus) && plus.contains_ideal(&i));
            assert!(check_quotient_complex_acyclic(&a, &i).unwrap());
            if !is_d_closed(&a, &i) {
                not_closed += 1;
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 100);
    // the check is only interesting when I itself is not a DG ideal
    assert!(not_closed >= 10, "{not_closed}");
}

#[test]
fn dg_quotients_are_dg_algebras() {
    let a = three_vertex_dg();
    let a2 = SparseVec::unit(a.index_of("a2").unwrap());
    let i = ideal_generated_by(&a, &[a2]);
    assert!(quotient(&a, &i).is_err());
    let plus = external_ideal(&a, &i).unwrap();
    let quo = quotient(&a, &plus).unwrap();
    assert!(quo.validate().is_valid());
    assert_eq!(quo.dim(), a.dim() - plus.dim());
}

#[test]
fn radical_of_dual_numbers_and_semisimple() {
    let a = dual_numbers();
    let j = radical(&a);
    assert_eq!(j.dim(), 1);
    assert_eq!(nilpotency_index(&a, &j).unwrap(), 2);
    assert!(radical(&FinAlgebra::semisimple(3)).is_zero());
}
