use finalg::exactmat::{RatMatrix, SparseVec, Q};
use finalg::families::{arrow_combination, green, kk_family, r_family, random_family, GldimCriterion, SubspaceFamily};
use finalg::repmod::*;

fn context(f: &SubspaceFamily) -> ModuleContext {
    ModuleContext::new(r_family(f).unwrap().into_algebra()).unwrap()
}

fn b(ctx: &ModuleContext, i: usize) -> SparseVec {
    SparseVec::unit(ctx.algebra.index_of(&format!("b{}", i + 1)).unwrap())
}

fn column(m: &RatMatrix, col: usize) -> Vec<Q> {
    (0..m.rows()).map(|r| m[(r, col)].clone()).collect()
}

fn subspace_ideal(ctx: &ModuleContext, basis: &RatMatrix) -> Submodule {
    let gens: Vec<SparseVec> =
        (0..basis.cols()).map(|c| arrow_combination(&ctx.algebra, "c", &column(basis, c)).unwrap()).collect();
    Submodule::right_ideal_of(ctx, &gens)
}

#[test]
fn generic_family_resolutions() {
    for (n, m, k) in [(2, 1, 1), (3, 2, 1)] {
        let f = random_family(n, m, k, 7).unwrap();
        let ctx = context(&f);
        let g = global_dimension(&ctx, 20).unwrap();
        assert_eq!(g.verdict, Verdict::Finite(3));
        assert_eq!(g.simples[0].terms, vec![vec![1, 0], vec![0, m], vec![m * k, 0]]);
        assert_eq!(g.simples[1].terms, vec![vec![0, 1], vec![n, 0], vec![0, m * (n - k)], vec![m * k * (n - k), 0]]);
        assert!(g.simples.iter().all(|r| r.minimal && r.exact));
    }
}

#[test]
fn projective_dimensions_and_tops() {
    let f = random_family(3, 2, 1, 3).unwrap();
    let ctx = context(&f);
    let p1 = RightModule::projective(&ctx.algebra, 0).unwrap();
    assert_eq!(p1.dim, 1 + f.m * (f.n - f.k) + f.m);
    assert_eq!(top_multiplicities(&ctx, &ModuleInput::Explicit(p1)), vec![1, 0]);
    let s1 = RightModule::simple(&ctx, 0);
    let e2 = ctx.algebra.idempotents()[1];
    assert!(s1.action[e2].is_zero());
    let both = RightModule::direct_sum(&[s1.clone(), RightModule::simple(&ctx, 1)]);
    assert_eq!(top_multiplicities(&ctx, &ModuleInput::Explicit(both)), vec![1, 1]);

    // C R: covered by P_1^n with kernel ⊕ (b_i R)^{n-k}
    let c_all = subspace_ideal(&ctx, &RatMatrix::identity(f.n));
    let cover = projective_cover(&ctx, &ModuleInput::Embedded(c_all)).unwrap();
    assert_eq!(cover.tops, vec![f.n, 0]);
    let b_dim = Submodule::right_ideal_of(&ctx, &[b(&ctx, 0)]).dim();
    assert_eq!(cover.kernel.dim(), f.m * (f.n - f.k) * b_dim);

    // S_1: kernel of P_1 -> S_1 is B R = ⊕ b_i R
    let cover = projective_cover(&ctx, &ModuleInput::Explicit(s1)).unwrap();
    let br = Submodule::right_ideal_of(&ctx, &(0..f.m).map(|i| b(&ctx, i)).collect::<Vec<_>>());
    let parts: Vec<Submodule> = (0..f.m).map(|i| Submodule::right_ideal_of(&ctx, &[b(&ctx, i)])).collect();
    assert!(br.is_direct_sum_of(&parts));
    assert_eq!(cover.kernel.dim(), br.dim());
    assert_eq!(top_multiplicities(&ctx, &ModuleInput::Embedded(br)), vec![0, f.m]);
}

#[test]
fn kk_family_global_dimension() {
    for m in 1..=2 {
        let f = kk_family(m).unwrap();
        let ctx = context(&f);
        assert_eq!(global_dimension(&ctx, 30).unwrap().verdict, Verdict::Finite(2 * m + 1));
        assert_eq!(f.gldim_by_criterion(), GldimCriterion::Finite(2 * m + 1));
    }
}

#[test]
fn projective_dimension_of_b_and_v() {
    let f = kk_family(2).unwrap();
    let ctx = context(&f);
    let pd = |s: Submodule| minimal_resolution(&ctx, &ModuleInput::Embedded(s), 30).unwrap().pd().unwrap();
    for i in 0..f.m {
        let bi = pd(Submodule::right_ideal_of(&ctx, &[b(&ctx, i)]));
        let vi = pd(subspace_ideal(&ctx, &f.v[i]));
        assert_eq!(bi, vi + 1);
        let t = f.t_table();
        let expected = (0..f.m)
            .filter(|&j| t[i][j] != 0)
            .map(|j| pd(Submodule::right_ideal_of(&ctx, &[b(&ctx, j)])) + 1)
            .max();
        if let Some(e) = expected {
            assert_eq!(vi, e);
        }
    }
}

#[test]
fn left_multiplication_by_generic_arrow() {
    let f = random_family(3, 2, 1, 11).unwrap();
    let ctx = context(&f);
    // x = c_1 + 2 c_2 + 5 c_3 avoids the W_i for this seed
    let coeffs: Vec<Q> = [1, 2, 5].iter().map(|&v| Q::from_integer(v.into())).collect();
    let x = arrow_combination(&ctx.algebra, "c", &coeffs).unwrap();
    for i in 0..f.m {
        let mut wi = f.w[i].clone();
        let in_w = {
            let col = RatMatrix::from_columns(f.n, std::slice::from_ref(&coeffs));
            wi = wi.hstack(&col).unwrap();
            wi.rank() == f.n - f.k
        };
        assert!(!in_w);
        let bi = Submodule::right_ideal_of(&ctx, &[b(&ctx, i)]);
        let xbi = Submodule::right_ideal_of(&ctx, &[ctx.algebra.mul(&x, &b(&ctx, i))]);
        assert!(bi.left_mult_iso(&ctx, &x, &xbi));
        let ann_b = Submodule::right_annihilator(&ctx, &b(&ctx, i));
        let ann_xb = Submodule::right_annihilator(&ctx, &ctx.algebra.mul(&x, &b(&ctx, i)));
        assert_eq!(ann_b.dim(), ann_xb.dim());
    }
}

#[test]
fn annihilator_of_an_arrow() {
    let f = kk_family(3).unwrap();
    let ctx = context(&f);
    for l in 0..f.m {
        // c = first basis vector of W_l, so l ∈ T_c
        let coeffs = column(&f.w[l], 0);
        let c = arrow_combination(&ctx.algebra, "c", &coeffs).unwrap();
        let ann = Submodule::right_annihilator(&ctx, &c);
        let mut parts = vec![Submodule::right_ideal_of(&ctx, &[SparseVec::unit(ctx.algebra.idempotents()[1])])];
        for j in 0..f.m {
            let col = RatMatrix::from_columns(f.n, std::slice::from_ref(&coeffs));
            if f.w[j].hstack(&col).unwrap().rank() == f.n - f.k {
                parts.push(Submodule::right_ideal_of(&ctx, &[b(&ctx, j)]));
            }
        }
        assert!(parts.len() >= 2);
        assert!(ann.is_direct_sum_of(&parts));
    }
}

#[test]
fn endomorphisms_of_the_regular_module() {
    let a = green(4).unwrap().into_algebra();
    let reg = RightModule::regular_quotient(&a, &[]).unwrap();
    let e = dg_endomorphism_algebra(&a, &[reg]).unwrap();
    assert_eq!(e.dim(), a.dim());
    assert!(e.validate().is_valid());
    assert_eq!(e.vertex_count(), a.vertex_count());
    assert_eq!(finalg::families::peirce_dims(&e), finalg::families::peirce_dims(&a));
}

#[test]
fn hom_between_projectives_of_r() {
    let f = random_family(3, 2, 1, 5).unwrap();
    let ctx = context(&f);
    let a = &ctx.algebra;
    for i in 0..2 {
        for j in 0..2 {
            let h = hom_complex(a, &RightModule::projective(a, i).unwrap(), &RightModule::projective(a, j).unwrap()).unwrap();
            assert_eq!(h.dims().values().sum::<usize>(), a.peirce_space(j, i).len());
        }
    }
}

#[test]
fn endomorphism_algebra_of_radical_layers() {
    let f = random_family(2, 1, 1, 2).unwrap();
    let a = r_family(&f).unwrap().into_algebra();
    let mods = radical_layer_modules(&a, 3).unwrap();
    let e = dg_endomorphism_algebra(&a, &mods).unwrap();
    assert!(e.validate().is_valid());
    let h = finalg::algebra::cohomology_dims(&e);
    assert_eq!(h.values().sum::<usize>(), e.dim());
}

#[test]
fn parallel_matches_sequential() {
    let ctx = ModuleContext::new(green(5).unwrap().into_algebra()).unwrap();
    let a = global_dimension(&ctx, 20).unwrap();
    let b = global_dimension_parallel(&ctx, 20).unwrap();
    assert_eq!(a.verdict, b.verdict);
    assert_eq!(a.simples.iter().map(|r| &r.terms).collect::<Vec<_>>(), b.simples.iter().map(|r| &r.terms).collect::<Vec<_>>());
}

#[test]
fn truncated_resolution_reports_bound() {
    let ctx = ModuleContext::new(green(5).unwrap().into_algebra()).unwrap();
    assert_eq!(global_dimension(&ctx, 2).unwrap().verdict, Verdict::ExceedsBound(2));
}
