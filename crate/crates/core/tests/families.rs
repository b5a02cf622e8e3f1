use finalg::exactmat::{q, RatMatrix, SparseVec};
use finalg::families::*;
use finalg::repmod::{global_dimension, minimal_resolution, ModuleContext, ModuleInput, Submodule, Verdict};

mod common;
use common::*;

fn looped_family() -> SubspaceFamily {
    // V_1 = ⟨a_1⟩ ⊂ W_1 = ⟨a_1, a_2⟩
    let v = RatMatrix::from_i64_rows(&[&[1], &[0], &[0]]);
    let w = RatMatrix::from_i64_rows(&[&[1, 0], &[0, 1], &[0, 0]]);
    SubspaceFamily::new(3, 1, vec![v], vec![w]).unwrap()
}

#[test]
fn r_family_dimensions_and_decomposition() {
    for f in sweep().into_iter().chain((1..=3).map(|m| kk_family(m).unwrap())) {
        let a = r_family(&f).unwrap().into_algebra();
        assert_eq!(a.dim(), f.expected_dim());
        assert_eq!(a.dim(), 2 + f.m + f.n + f.m * f.n + f.m * f.k * (f.n - f.k));
        assert!(a.validate().is_valid());
        let (v, w) = decomposition_spaces(&f, 5).unwrap();
        verify_decomposition(&f, &a, &v, &w).unwrap();
    }
}

#[test]
fn twisted_reconstruction_of_r() {
    for f in sweep().into_iter().chain((1..=3).map(|m| kk_family(m).unwrap())) {
        let check = twprod_reconstruction(&f).unwrap();
        assert_eq!(check.dim, f.expected_dim());
        assert_eq!(check.k_v_1_dim, 2 * f.k + 3);
        let r = 1 + (f.m - 1) * (f.n - f.k) + (f.m - 1);
        assert_eq!(check.left_projective, (r, f.n - f.k + 1));
    }
}

#[test]
fn reconstruction_needs_the_right_numbering() {
    let f = kk_family(2).unwrap();
    // V_2 ∩ W_1 ≠ 0, so pair 2 cannot be the last one
    assert!(twprod_reconstruction_with_last(&f, 1).is_err());
    assert!(twprod_reconstruction_with_last(&f, 0).is_ok());
    assert!(twprod_reconstruction(&looped_family()).is_err());
}

#[test]
fn gamma_quiver_examples() {
    let f = random_family(3, 2, 1, 9).unwrap();
    assert_eq!(f.gamma_quiver().longest_path(), Some(1));
    assert_eq!(f.gldim_by_criterion(), GldimCriterion::Finite(3));
    let kk = kk_family(2).unwrap();
    assert_eq!(kk.gamma_quiver().longest_path(), Some(3));
    assert_eq!(looped_family().gldim_by_criterion(), GldimCriterion::Infinite);
}

#[test]
fn looped_family_has_unbounded_resolutions() {
    let f = looped_family();
    let a = r_family(&f).unwrap().into_algebra();
    let ctx = ModuleContext::new(a).unwrap();
    let b1 = SparseVec::unit(ctx.algebra.index_of("b1").unwrap());
    for bound in [4, 8, 12] {
        let r = minimal_resolution(&ctx, &ModuleInput::Embedded(Submodule::right_ideal_of(&ctx, std::slice::from_ref(&b1))), bound).unwrap();
        assert_eq!(r.verdict, Verdict::ExceedsBound(bound));
        assert!(r.minimal && r.exact);
    }
    assert_eq!(global_dimension(&ctx, 10).unwrap().verdict, Verdict::ExceedsBound(10));
}

#[test]
fn criterion_matches_resolutions() {
    for f in sweep().into_iter().take(5).chain((1..=2).map(|m| kk_family(m).unwrap())) {
        let ctx = ModuleContext::new(r_family(&f).unwrap().into_algebra()).unwrap();
        let GldimCriterion::Finite(g) = f.gldim_by_criterion() else { panic!("acyclic") };
        assert_eq!(global_dimension(&ctx, 20).unwrap().verdict, Verdict::Finite(g));
    }
}

#[test]
fn kronecker_and_green_products() {
    for degrees in [vec![0], vec![0, 0], vec![0, 0, 0, 0], vec![1, -1, 0]] {
        verify_kronecker_split(&degrees).unwrap();
    }
    for k in 1..=7 {
        verify_green_step(k).unwrap();
    }
    let g = green(3).unwrap();
    assert_eq!(g.dim(), 8);
    assert_eq!(kronecker(2, &[]).unwrap().dim(), 4);
    assert_eq!(kronecker(0, &[]).unwrap().dim(), 2);
}

#[test]
fn kk_family_shapes() {
    let f = kk_family(3).unwrap();
    assert_eq!((f.n, f.m, f.k), (3, 3, 1));
    // W_2 = ⟨a_3, a_2 - a_1⟩
    let w2 = &f.w[1];
    assert_eq!(w2.column(0), vec![q(0), q(0), q(1)]);
    assert_eq!(w2.column(1), vec![q(-1), q(1), q(0)]);
    assert!(SubspaceFamily::new(1, 1, vec![], vec![]).is_err());
}
