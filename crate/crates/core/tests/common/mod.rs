//! Fixtures shared by the integration suites and the acceptance runner.
#![allow(dead_code)]

use std::collections::BTreeMap;

use finalg::algebra::{FinAlgebra, GradedIdeal};
use finalg::exactmat::{q, RatMatrix, SparseVec};
use finalg::families::*;
use finalg::quiver::{Quiver, QuiverAlgebra};
use finalg::twisted::{canonical_setup, dg_twisted_product, NablaDeformation, RRing};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Ten seeded families over the shapes (n, m, k) used throughout.
pub fn sweep() -> Vec<SubspaceFamily> {
    let shapes = [(2, 1, 1), (3, 2, 1), (4, 2, 2), (5, 3, 2)];
    (0..10u64)
        .map(|s| {
            let (n, m, k) = shapes[s as usize % 4];
            random_family(n, m, k, 100 + s).unwrap()
        })
        .collect()
}

pub fn dual_numbers() -> FinAlgebra {
    let mult = vec![vec![SparseVec::unit(0), SparseVec::unit(1)], vec![SparseVec::unit(1), SparseVec::zero()]];
    FinAlgebra::from_table(vec!["1".into(), "x".into()], mult, SparseVec::unit(0), vec![0])
        .with_grading(vec![0, -1])
        .with_differential(vec![SparseVec::zero(), SparseVec::unit(0)])
}

pub fn kronecker_dg() -> QuiverAlgebra {
    let qa = kronecker(2, &[0, -1]).unwrap();
    let c1 = qa.element("c1").unwrap();
    qa.with_arrow_differential(&BTreeMap::from([(1usize, c1)])).unwrap()
}

pub fn three_vertex_dg() -> FinAlgebra {
    let mut qv = Quiver::new(3);
    qv.add_arrow("a1", 0, 1, 0).unwrap();
    qv.add_arrow("a2", 0, 1, -1).unwrap();
    qv.add_arrow("b1", 1, 2, 0).unwrap();
    qv.add_arrow("b2", 1, 2, 1).unwrap();
    let qa = QuiverAlgebra::path_algebra(qv).unwrap();
    let d = BTreeMap::from([(1usize, qa.element("a1").unwrap()), (2usize, qa.element("b2").unwrap())]);
    qa.with_arrow_differential(&d).unwrap().into_algebra()
}

/// `K_1 ⊗ K_1[-1]` over `S` with `∇(c2) = c1`, together with its factors.
pub fn degenerate_parts() -> (RRing, RRing, FinAlgebra) {
    let a = RRing::over_semisimple(kronecker_named(&["c1".into()], &[0]).unwrap().into_algebra()).unwrap();
    let b = RRing::over_semisimple(kronecker_named(&["c2".into()], &[-1]).unwrap().into_algebra()).unwrap();
    let (t, tau) = canonical_setup(&a, &b).unwrap();
    let c1 = a.algebra.index_of("c1").unwrap();
    let c2 = b.algebra.index_of("c2").unwrap();
    let mut table = vec![SparseVec::zero(); b.algebra.dim()];
    table[c2] = t.pure(&SparseVec::unit(c1), b.algebra.unit());
    let c = dg_twisted_product(&a, &b, &tau, Some(&NablaDeformation { table })).unwrap().algebra;
    (a, b, c)
}

pub fn degenerate_product() -> FinAlgebra {
    degenerate_parts().2
}

pub fn product_with_kronecker() -> FinAlgebra {
    let a = RRing::over_semisimple(kronecker_dg().into_algebra()).unwrap();
    let b = RRing::over_semisimple(kronecker(1, &[]).unwrap().into_algebra()).unwrap();
    let (_, tau) = canonical_setup(&a, &b).unwrap();
    dg_twisted_product(&a, &b, &tau, None).unwrap().algebra
}

/// Five DG algebras with nonzero differential.
pub fn samples() -> Vec<FinAlgebra> {
    vec![dual_numbers(), kronecker_dg().into_algebra(), three_vertex_dg(), degenerate_product(), product_with_kronecker()]
}

/// A homogeneous element supported on one Peirce component and degree.
pub fn random_homogeneous(a: &FinAlgebra, rng: &mut ChaCha8Rng) -> SparseVec {
    let pick = rng.gen_range(0..a.dim());
    let (ty, deg) = (a.peirce_type(pick), a.degree(pick));
    let mut v = SparseVec::zero();
    for x in (0..a.dim()).filter(|&x| a.peirce_type(x) == ty && a.degree(x) == deg) {
        let c = if x == pick { rng.gen_range(1..=3) } else { rng.gen_range(-2..=2) };
        v.add_scaled(&SparseVec::unit(x), &q(c));
    }
    v
}

pub fn arrow_ideal(qa: &QuiverAlgebra) -> GradedIdeal {
    let basis = qa.basis_paths().iter().enumerate().filter(|(_, p)| !p.is_trivial()).map(|(i, _)| SparseVec::unit(i));
    GradedIdeal::from_basis(basis.collect())
}

/// Every quiver-presented algebra the suites build.
pub fn suite() -> Vec<(String, QuiverAlgebra)> {
    let mut out = Vec::new();
    for k in 0..=6 {
        out.push((format!("G_{k}"), green(k).unwrap()));
    }
    for n in 0..=4 {
        out.push((format!("K_{n}"), kronecker(n, &[]).unwrap()));
    }
    for f in sweep() {
        out.push((format!("R({},{},{})", f.n, f.m, f.k), r_family(&f).unwrap()));
    }
    for m in 1..=4 {
        out.push((format!("kk({m})"), r_family(&kk_family(m).unwrap()).unwrap()));
    }
    for seed in 0..50 {
        out.push((format!("random {seed}"), random_quiver_algebra(2 + (seed % 3) as usize, seed).unwrap()));
    }
    out
}

/// The monomial relations of `G_k` as arrow words.
pub fn green_monomials(qa: &QuiverAlgebra, k: usize) -> Vec<Vec<usize>> {
    let (nc, nb) = (k.div_ceil(2), k / 2);
    let mut words = Vec::new();
    for i in 1..=nb {
        for j in 1..=nc {
            let w = if j <= i { format!("c{j}*b{i}") } else { format!("b{i}*c{j}") };
            words.push(qa.quiver().parse_path(&w).unwrap().arrows);
        }
    }
    words
}

/// `V_i = ⟨a_i⟩`, `W_i` spanned by the other coordinates except `a_{i+1}`: every relation is a monomial.
pub fn coordinate_family(n: usize, m: usize) -> SubspaceFamily {
    let unit = |j: usize| -> Vec<i64> { (0..n).map(|r| (r == j) as i64).collect() };
    let cols = |idx: Vec<usize>| -> RatMatrix {
        let rows: Vec<Vec<i64>> = (0..n).map(|r| idx.iter().map(|&j| unit(j)[r]).collect()).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        RatMatrix::from_i64_rows(&refs)
    };
    let v = (0..m).map(|i| cols(vec![i % n])).collect();
    let w = (0..m).map(|i| cols((0..n).filter(|&j| j != (i + 1) % n).collect())).collect();
    SubspaceFamily::new(n, 1, v, w).unwrap()
}
