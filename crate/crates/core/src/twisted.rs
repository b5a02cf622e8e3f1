//! Twisting maps and twisted tensor products over a base algebra `R`, including
//! the canonical map built from augmentations and ∇-deformed differentials.

use std::collections::HashMap;

use num::One;
use serde::Serialize;

use crate::algebra::FinAlgebra;
use crate::error::{Error, Result};
use crate::exactmat::{Echelon, SparseVec, Q};

/// Above this source dimension homomorphism checks run against generators only.
const HOM_FULL_LIMIT: usize = 80;

/// An algebra `A` with a structure map `ε: R -> A` and optionally an augmentation
/// `π: A -> R` with `π ∘ ε = id`.
#[derive(Clone, Debug)]
pub struct RRing {
    pub algebra: FinAlgebra,
    pub base: FinAlgebra,
    /// Image of each basis element of `R`.
    pub eps: Vec<SparseVec>,
    /// Image in `R` of each basis element of `A`.
    pub pi: Option<Vec<SparseVec>>,
}

fn sign(deg: i64) -> Q {
    if deg.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Applies the linear map with the given basis images.
pub fn apply(map: &[SparseVec], x: &SparseVec) -> SparseVec {
    let mut out = SparseVec::zero();
    for (i, c) in x.iter() {
        out.add_scaled(&map[i], c);
    }
    out
}

/// Checks that `map` (basis images) is a unital, degree-preserving algebra
/// homomorphism commuting with the differentials.
pub fn check_homomorphism(src: &FinAlgebra, tgt: &FinAlgebra, map: &[SparseVec], what: &str) -> Result<()> {
    check_hom(src, tgt, map, what, true)
}

/// Checks that `map` is a homomorphism in the sense of [`check_homomorphism`] and a
/// linear bijection.
pub fn check_isomorphism(src: &FinAlgebra, tgt: &FinAlgebra, map: &[SparseVec], what: &str) -> Result<()> {
    if src.dim() != tgt.dim() {
        return Err(Error::InvalidAlgebra(format!("{what}: dimensions {} and {} differ", src.dim(), tgt.dim())));
    }
    check_homomorphism(src, tgt, map, what)?;
    if Echelon::from_vectors(map.iter()).rank() != tgt.dim() {
        return Err(Error::InvalidAlgebra(format!("{what}: not bijective")));
    }
    Ok(())
}

fn check_hom(src: &FinAlgebra, tgt: &FinAlgebra, map: &[SparseVec], what: &str, with_d: bool) -> Result<()> {
    let fail = |msg: String| Err(Error::InvalidAlgebra(format!("{what}: {msg}")));
    if map.len() != src.dim() {
        return fail(format!("{} images for a {}-dimensional source", map.len(), src.dim()));
    }
    if apply(map, src.unit()) != *tgt.unit() {
        return fail("unit is not preserved".into());
    }
    for (i, img) in map.iter().enumerate() {
        if !img.is_zero() && tgt.homogeneous_degree(img) != Some(src.degree(i)) {
            return fail(format!("image of {} has the wrong degree", src.label(i)));
        }
        if with_d && (src.has_differential() || tgt.has_differential()) {
            let lhs = apply(map, &src.d(&SparseVec::unit(i)));
            if lhs != tgt.d(img) {
                return fail(format!("does not commute with d on {}", src.label(i)));
            }
        }
    }
    let right: Vec<SparseVec> = match src.generators() {
        Some(g) if src.dim() > HOM_FULL_LIMIT => g.to_vec(),
        _ => (0..src.dim()).map(SparseVec::unit).collect(),
    };
    for i in 0..src.dim() {
        let x = SparseVec::unit(i);
        for y in &right {
            if apply(map, &src.mul(&x, y)) != tgt.mul(&map[i], &apply(map, y)) {
                return fail(format!("not multiplicative at ({}, {y:?})", src.label(i)));
            }
        }
    }
    Ok(())
}

impl RRing {
    pub fn new(algebra: FinAlgebra, base: FinAlgebra, eps: Vec<SparseVec>, pi: Option<Vec<SparseVec>>) -> Result<Self> {
        check_homomorphism(&base, &algebra, &eps, "structure map")?;
        if let Some(p) = &pi {
            check_homomorphism(&algebra, &base, p, "augmentation")?;
            for r in 0..base.dim() {
                if apply(p, &eps[r]) != SparseVec::unit(r) {
                    return Err(Error::MissingAugmentation("π ∘ ε is not the identity".into()));
                }
            }
        }
        Ok(Self { algebra, base, eps, pi })
    }

    /// `A` as an `S`-ring for `S = ℚ^N` spanned by its declared idempotents, with the
    /// augmentation killing every non-idempotent basis element.
    pub fn over_semisimple(algebra: FinAlgebra) -> Result<Self> {
        let n = algebra.vertex_count();
        let base = FinAlgebra::semisimple(n);
        let eps: Vec<SparseVec> = algebra.idempotents().iter().map(|&e| SparseVec::unit(e)).collect();
        let mut pi = vec![SparseVec::zero(); algebra.dim()];
        for (r, &e) in algebra.idempotents().iter().enumerate() {
            pi[e] = SparseVec::unit(r);
        }
        Self::new(algebra, base, eps, Some(pi))
    }

    /// Same ring with the augmentation dropped.
    pub fn without_augmentation(mut self) -> Self {
        self.pi = None;
        self
    }

    fn pi(&self, what: &str) -> Result<&[SparseVec]> {
        self.pi.as_deref().ok_or_else(|| Error::MissingAugmentation(what.to_string()))
    }

    /// Index `r` of the base idempotent with `x ε(e_r) = x`, if any.
    fn right_type(&self, x: usize) -> Option<usize> {
        let v = SparseVec::unit(x);
        self.base.idempotents().iter().position(|&e| self.algebra.mul(&v, &self.eps[e]) == v)
    }

    fn left_type(&self, x: usize) -> Option<usize> {
        let v = SparseVec::unit(x);
        self.base.idempotents().iter().position(|&e| self.algebra.mul(&self.eps[e], &v) == v)
    }
}

/// The vector space `A ⊗_R B` with a basis of pure tensors `a_i ⊗ b_j`.
#[derive(Clone, Debug)]
pub struct RTensor {
    da: usize,
    db: usize,
    basis: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    relations: Option<TensorRelations>,
}

#[derive(Clone, Debug)]
struct TensorRelations {
    ech: Echelon,
    col: Vec<usize>,
    col_basis: Vec<Option<usize>>,
}

impl RTensor {
    /// `(A ⊗_ℚ B) / span{ar ⊗ b - a ⊗ rb}`.
    pub fn new(a: &RRing, b: &RRing) -> Result<Self> {
        if a.base != b.base {
            return Err(Error::DimensionMismatch("rings over different bases".into()));
        }
        let (da, db) = (a.algebra.dim(), b.algebra.dim());
        let base = &a.base;
        let semisimple_base = base.dim() == base.vertex_count();
        if semisimple_base {
            let ra: Vec<Option<usize>> = (0..da).map(|x| a.right_type(x)).collect();
            let lb: Vec<Option<usize>> = (0..db).map(|y| b.left_type(y)).collect();
            if ra.iter().all(Option::is_some) && lb.iter().all(Option::is_some) {
                let mut basis = Vec::new();
                for x in 0..da {
                    for y in 0..db {
                        if ra[x] == lb[y] {
                            basis.push((x, y));
                        }
                    }
                }
                let index = basis.iter().copied().enumerate().map(|(i, p)| (p, i)).collect();
                return Ok(Self { da, db, basis, index, relations: None });
            }
        }
        // pure tensors of idempotents are the least preferred pivots
        let idem_a: Vec<bool> = (0..da).map(|x| a.algebra.idempotents().contains(&x)).collect();
        let idem_b: Vec<bool> = (0..db).map(|y| b.algebra.idempotents().contains(&y)).collect();
        let mut order: Vec<usize> = (0..da * db).collect();
        order.sort_by_key(|&p| (idem_a[p / db] as u8 + idem_b[p % db] as u8, p));
        let mut col = vec![0; da * db];
        for (c, &p) in order.iter().enumerate() {
            col[p] = c;
        }
        let mut ech = Echelon::new();
        for r in 0..base.dim() {
            let (er_a, er_b) = (&a.eps[r], &b.eps[r]);
            for x in 0..da {
                let xr = a.algebra.mul(&SparseVec::unit(x), er_a);
                for y in 0..db {
                    let ry = b.algebra.mul(er_b, &SparseVec::unit(y));
                    let mut v = Vec::new();
                    for (i, c) in xr.iter() {
                        v.push((col[i * db + y], c.clone()));
                    }
                    for (j, c) in ry.iter() {
                        v.push((col[x * db + j], -c.clone()));
                    }
                    ech.insert(SparseVec::from_pairs(v));
                }
            }
        }
        let basis: Vec<(usize, usize)> =
            (0..da * db).filter(|&p| !ech.is_pivot(col[p])).map(|p| (p / db, p % db)).collect();
        let index: HashMap<(usize, usize), usize> = basis.iter().copied().enumerate().map(|(i, p)| (p, i)).collect();
        let mut col_basis = vec![None; da * db];
        for p in 0..da * db {
            col_basis[col[p]] = index.get(&(p / db, p % db)).copied();
        }
        Ok(Self { da, db, basis, index, relations: Some(TensorRelations { ech, col, col_basis }) })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    /// Normal form of `Σ c (a_i ⊗ b_j)`.
    pub fn reduce(&self, terms: &[((usize, usize), Q)]) -> SparseVec {
        match &self.relations {
            None => SparseVec::from_pairs(
                terms.iter().filter_map(|(p, c)| self.index.get(p).map(|&i| (i, c.clone()))),
            ),
            Some(rel) => {
                let v = SparseVec::from_pairs(terms.iter().map(|((x, y), c)| (rel.col[x * self.db + y], c.clone())));
                rel.ech.reduce(&v).remap(|k| Some(rel.col_basis[k].expect("normal form on basis")))
            }
        }
    }

    /// Normal form of `u ⊗ w`.
    pub fn pure(&self, u: &SparseVec, w: &SparseVec) -> SparseVec {
        let mut terms = Vec::with_capacity(u.nnz() * w.nnz());
        for (i, a) in u.iter() {
            for (j, b) in w.iter() {
                terms.push(((i, j), a * b));
            }
        }
        self.reduce(&terms)
    }

    /// Expands a normal form into pure tensors of basis elements.
    pub fn pairs<'a>(&'a self, v: &'a SparseVec) -> impl Iterator<Item = ((usize, usize), &'a Q)> + 'a {
        v.iter().map(move |(k, c)| (self.basis[k], c))
    }

    pub fn left_dim(&self) -> usize {
        self.da
    }

    pub fn right_dim(&self) -> usize {
        self.db
    }
}

/// `τ: B ⊗_R A -> A ⊗_R B`, stored on pairs of basis elements `[b][a]` as normal
/// forms in the target tensor space.
#[derive(Clone, Debug)]
pub struct TwistingMap {
    pub table: Vec<Vec<SparseVec>>,
}

/// The canonical map
/// `v(b ⊗ a) = ε_A π_B(b) a ⊗ 1 + 1 ⊗ b ε_B π_A(a) - ε_A π_B(b) ⊗ ε_B π_A(a)`.
pub fn canonical_v(a: &RRing, b: &RRing, t: &RTensor) -> Result<TwistingMap> {
    a.pi("canonical map needs an augmentation on the left factor")?;
    b.pi("canonical map needs an augmentation on the right factor")?;
    let (da, db) = (a.algebra.dim(), b.algebra.dim());
    let one_a = a.algebra.unit();
    let one_b = b.algebra.unit();
    let xs: Vec<SparseVec> = (0..db).map(|y| apply(&a.eps, &b.pi.as_ref().unwrap()[y])).collect();
    let ys: Vec<SparseVec> = (0..da).map(|x| apply(&b.eps, &a.pi.as_ref().unwrap()[x])).collect();
    let mut table = vec![vec![SparseVec::zero(); da]; db];
    for (yb, row) in table.iter_mut().enumerate() {
        let x = &xs[yb];
        let bv = SparseVec::unit(yb);
        for (xa, slot) in row.iter_mut().enumerate() {
            let y = &ys[xa];
            if x.is_zero() && y.is_zero() {
                continue;
            }
            let av = SparseVec::unit(xa);
            let mut v = t.pure(&a.algebra.mul(x, &av), one_b);
            v.add_scaled(&t.pure(one_a, &b.algebra.mul(&bv, y)), &Q::one());
            v.add_scaled(&t.pure(x, y), &-Q::one());
            *slot = v;
        }
    }
    Ok(TwistingMap { table })
}

/// The graded flip `b ⊗ a -> (-1)^{|a||b|} a ⊗ b`, defined when `R` is central
/// enough for it to descend to the tensor products (e.g. `R = ℚ`).
pub fn flip(a: &RRing, b: &RRing, t: &RTensor) -> TwistingMap {
    let (da, db) = (a.algebra.dim(), b.algebra.dim());
    let mut table = vec![vec![SparseVec::zero(); da]; db];
    for (y, row) in table.iter_mut().enumerate() {
        for (x, slot) in row.iter_mut().enumerate() {
            let s = sign(a.algebra.degree(x) * b.algebra.degree(y));
            *slot = t.pure(&SparseVec::single(x, s), &SparseVec::unit(y));
        }
    }
    TwistingMap { table }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TwistViolation {
    FixLeft { a: String },
    FixRight { b: String },
    Balanced { b: String, r: String, a: String },
    LeftLinear { r: String, b: String, a: String },
    RightLinear { b: String, a: String, r: String },
    Degree { b: String, a: String },
    Hexagon { b: String, b2: String, a: String, a2: String },
    ChainMap { b: String, a: String },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TwistReport {
    pub violations: Vec<TwistViolation>,
    pub quadruples_checked: usize,
}

impl TwistReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl TwistingMap {
    fn apply_pair(&self, y: usize, x: usize) -> &SparseVec {
        &self.table[y][x]
    }

    /// `τ(u ⊗ w)` for `u ∈ B`, `w ∈ A`.
    pub fn apply(&self, u: &SparseVec, w: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (y, c) in u.iter() {
            for (x, d) in w.iter() {
                out.add_scaled(&self.table[y][x], &(c * d));
            }
        }
        out
    }
}

/// Exhaustive check of the unit conditions, `R`-bilinearity, degree, the hexagon
/// on every basis quadruple and, with differentials, the chain-map property.
/// Stops collecting hexagon witnesses after the first one.
pub fn verify_twisting(a: &RRing, b: &RRing, t: &RTensor, tau: &TwistingMap) -> TwistReport {
    let (aa, ab) = (&a.algebra, &b.algebra);
    let (da, db) = (aa.dim(), ab.dim());
    let mut rep = TwistReport::default();
    let one_a = aa.unit().clone();
    let one_b = ab.unit().clone();
    for x in 0..da {
        let av = SparseVec::unit(x);
        if tau.apply(&one_b, &av) != t.pure(&av, &one_b) {
            rep.violations.push(TwistViolation::FixLeft { a: aa.label(x).into() });
        }
    }
    for y in 0..db {
        let bv = SparseVec::unit(y);
        if tau.apply(&bv, &one_a) != t.pure(&one_a, &bv) {
            rep.violations.push(TwistViolation::FixRight { b: ab.label(y).into() });
        }
    }
    let left_act = |r: &SparseVec, v: &SparseVec| -> SparseVec {
        let mut terms = Vec::new();
        for ((x, y), c) in t.pairs(v) {
            for (x2, d) in aa.mul(r, &SparseVec::unit(x)).iter() {
                terms.push(((x2, y), c * d));
            }
        }
        t.reduce(&terms)
    };
    let right_act = |v: &SparseVec, r: &SparseVec| -> SparseVec {
        let mut terms = Vec::new();
        for ((x, y), c) in t.pairs(v) {
            for (y2, d) in ab.mul(&SparseVec::unit(y), r).iter() {
                terms.push(((x, y2), c * d));
            }
        }
        t.reduce(&terms)
    };
    let base = &a.base;
    'bil: for r in 0..base.dim() {
        let (ra, rb) = (&a.eps[r], &b.eps[r]);
        for y in 0..db {
            let bv = SparseVec::unit(y);
            for x in 0..da {
                let av = SparseVec::unit(x);
                let names = || (ab.label(y).to_string(), base.label(r).to_string(), aa.label(x).to_string());
                if tau.apply(&ab.mul(&bv, rb), &av) != tau.apply(&bv, &aa.mul(ra, &av)) {
                    let (b, r, a) = names();
                    rep.violations.push(TwistViolation::Balanced { b, r, a });
                    break 'bil;
                }
                if tau.apply(&ab.mul(rb, &bv), &av) != left_act(ra, tau.apply_pair(y, x)) {
                    let (b, r, a) = names();
                    rep.violations.push(TwistViolation::LeftLinear { r, b, a });
                    break 'bil;
                }
                if tau.apply(&bv, &aa.mul(&av, ra)) != right_act(tau.apply_pair(y, x), rb) {
                    let (b, r, a) = names();
                    rep.violations.push(TwistViolation::RightLinear { b, a, r });
                    break 'bil;
                }
            }
        }
    }
    for y in 0..db {
        for x in 0..da {
            let v = tau.apply_pair(y, x);
            let deg = ab.degree(y) + aa.degree(x);
            if t.pairs(v).any(|((x2, y2), _)| aa.degree(x2) + ab.degree(y2) != deg) {
                rep.violations.push(TwistViolation::Degree { b: ab.label(y).into(), a: aa.label(x).into() });
            }
        }
    }
    // Peirce types let us skip quadruples that vanish in the R-tensor products.
    let semisimple_base = base.dim() == base.vertex_count();
    let ta: Vec<(Option<usize>, Option<usize>)> = (0..da).map(|x| (a.left_type(x), a.right_type(x))).collect();
    let tb: Vec<(Option<usize>, Option<usize>)> = (0..db).map(|y| (b.left_type(y), b.right_type(y))).collect();
    let compatible = |right: Option<usize>, left: Option<usize>| -> bool {
        !semisimple_base || right.is_none() || left.is_none() || right == left
    };
    'hex: for y in 0..db {
        for y2 in 0..db {
            if !compatible(tb[y].1, tb[y2].0) {
                continue;
            }
            let yy = ab.basis_product(y, y2);
            for x in 0..da {
                if !compatible(tb[y2].1, ta[x].0) {
                    continue;
                }
                let mid = tau.apply_pair(y2, x);
                for x2 in 0..da {
                    if !compatible(ta[x].1, ta[x2].0) {
                        continue;
                    }
                    rep.quadruples_checked += 1;
                    let lhs = tau.apply(yy, aa.basis_product(x, x2));
                    let mut terms: Vec<((usize, usize), Q)> = Vec::new();
                    for ((u, w), c) in t.pairs(mid) {
                        let left = tau.apply_pair(y, u);
                        let right = tau.apply_pair(w, x2);
                        for ((u1, w1), c1) in t.pairs(left) {
                            for ((u2, w2), c2) in t.pairs(right) {
                                let inner = tau.apply_pair(w1, u2);
                                let coef = c * c1 * c2;
                                for ((u3, w3), c3) in t.pairs(inner) {
                                    let ax = aa.basis_product(u1, u3);
                                    let by = ab.basis_product(w3, w2);
                                    for (i, ci) in ax.iter() {
                                        for (j, cj) in by.iter() {
                                            terms.push(((i, j), &coef * c3 * ci * cj));
                                        }
                                    }
                                }
                            }
                        }
                    }
                    if lhs != t.reduce(&terms) {
                        rep.violations.push(TwistViolation::Hexagon {
                            b: ab.label(y).into(),
                            b2: ab.label(y2).into(),
                            a: aa.label(x).into(),
                            a2: aa.label(x2).into(),
                        });
                        break 'hex;
                    }
                }
            }
        }
    }
    if aa.has_differential() || ab.has_differential() {
        'chain: for y in 0..db {
            for x in 0..da {
                let bv = SparseVec::unit(y);
                let av = SparseVec::unit(x);
                let mut lhs = tau.apply(&ab.d(&bv), &av);
                lhs.add_scaled(&tau.apply(&bv, &aa.d(&av)), &sign(ab.degree(y)));
                let rhs = tensor_d(aa, ab, t, tau.apply_pair(y, x));
                if lhs != rhs {
                    rep.violations.push(TwistViolation::ChainMap { b: ab.label(y).into(), a: aa.label(x).into() });
                    break 'chain;
                }
            }
        }
    }
    rep
}

/// The tensor differential `d(x ⊗ y) = dx ⊗ y + (-1)^{|x|} x ⊗ dy` on `A ⊗_R B`.
fn tensor_d(aa: &FinAlgebra, ab: &FinAlgebra, t: &RTensor, v: &SparseVec) -> SparseVec {
    let mut terms = Vec::new();
    for ((x, y), c) in t.pairs(v) {
        for (x2, d) in aa.d(&SparseVec::unit(x)).iter() {
            terms.push(((x2, y), c * d));
        }
        let s = sign(aa.degree(x));
        for (y2, d) in ab.d(&SparseVec::unit(y)).iter() {
            terms.push(((x, y2), c * d * &s));
        }
    }
    t.reduce(&terms)
}

/// `∇: B -> I_A ⊗_R B` of degree +1, stored as normal forms per basis element of `B`.
#[derive(Clone, Debug)]
pub struct NablaDeformation {
    pub table: Vec<SparseVec>,
}

/// `A ⊗^τ_R B` (with optional deformed differential) and its structure maps.
#[derive(Clone, Debug)]
pub struct TwistedProduct {
    pub algebra: FinAlgebra,
    pub tensor: RTensor,
    /// `a ↦ a ⊗ 1`.
    pub i_a: Vec<SparseVec>,
    /// `b ↦ 1 ⊗ b`.
    pub i_b: Vec<SparseVec>,
    /// `a ⊗ b ↦ a ε_A π_B(b)`, when `B` is augmented.
    pub p_a: Option<Vec<SparseVec>>,
    /// `a ⊗ b ↦ ε_B π_A(a) b`, when `A` is augmented.
    pub p_b: Option<Vec<SparseVec>>,
    /// `C` as an `R`-ring via `i_A ∘ ε_A`, augmented by `π_A ∘ p_A` when possible.
    pub ring: RRing,
}

fn pair_label(a: &FinAlgebra, b: &FinAlgebra, x: usize, y: usize) -> String {
    let ia = a.idempotents().contains(&x);
    let ib = b.idempotents().contains(&y);
    match (ia, ib) {
        (true, true) => a.label(x).to_string(),
        (true, false) => b.label(y).to_string(),
        (false, true) => a.label(x).to_string(),
        (false, false) => format!("{}*{}", a.label(x), b.label(y)),
    }
}

/// `μ_τ((a ⊗ b)(a' ⊗ b')) = Σ a x ⊗ y b'` over `τ(b ⊗ a') = Σ x ⊗ y`.
pub fn twisted_product(a: &RRing, b: &RRing, tau: &TwistingMap) -> Result<TwistedProduct> {
    let t = RTensor::new(a, b)?;
    build_product(a, b, t, tau, None)
}

/// Checks `τ` and then builds `A ⊗^{∇,τ}_R B`.
pub fn dg_twisted_product(a: &RRing, b: &RRing, tau: &TwistingMap, nabla: Option<&NablaDeformation>) -> Result<TwistedProduct> {
    let t = RTensor::new(a, b)?;
    build_product(a, b, t, tau, nabla)
}

/// Builds `A ⊗^v_R B` with the canonical twisting map.
pub fn canonical_product(a: &RRing, b: &RRing, nabla: Option<&NablaDeformation>) -> Result<TwistedProduct> {
    let t = RTensor::new(a, b)?;
    let tau = canonical_v(a, b, &t)?;
    build_product(a, b, t, &tau, nabla)
}

/// Tensor space for `A ⊗_R B` together with `τ = v`, for callers that need to
/// describe `∇` on the tensor basis before building the product.
pub fn canonical_setup(a: &RRing, b: &RRing) -> Result<(RTensor, TwistingMap)> {
    let t = RTensor::new(a, b)?;
    let tau = canonical_v(a, b, &t)?;
    Ok((t, tau))
}

pub fn build_product(
    a: &RRing,
    b: &RRing,
    t: RTensor,
    tau: &TwistingMap,
    nabla: Option<&NablaDeformation>,
) -> Result<TwistedProduct> {
    let (aa, ab) = (&a.algebra, &b.algebra);
    let n = t.dim();
    let mut mult = vec![vec![SparseVec::zero(); n]; n];
    for (p, &(x, y)) in t.basis().iter().enumerate() {
        for (p2, &(x2, y2)) in t.basis().iter().enumerate() {
            let mid = tau.apply_pair(y, x2);
            if mid.is_zero() {
                continue;
            }
            let mut terms = Vec::new();
            for ((u, w), c) in t.pairs(mid) {
                let ax = aa.basis_product(x, u);
                if ax.is_zero() {
                    continue;
                }
                let wy = ab.basis_product(w, y2);
                for (i, ci) in ax.iter() {
                    for (j, cj) in wy.iter() {
                        terms.push(((i, j), c * ci * cj));
                    }
                }
            }
            mult[p][p2] = t.reduce(&terms);
        }
    }
    let unit = t.pure(aa.unit(), ab.unit());
    let idempotents = product_idempotents(a, b, &t, &unit)?;
    let labels: Vec<String> = t.basis().iter().map(|&(x, y)| pair_label(aa, ab, x, y)).collect();
    let grading: Vec<i64> = t.basis().iter().map(|&(x, y)| aa.degree(x) + ab.degree(y)).collect();
    let i_a: Vec<SparseVec> = (0..aa.dim()).map(|x| t.pure(&SparseVec::unit(x), ab.unit())).collect();
    let i_b: Vec<SparseVec> = (0..ab.dim()).map(|y| t.pure(aa.unit(), &SparseVec::unit(y))).collect();
    let mut gens: Vec<SparseVec> = idempotents.iter().map(|&e| SparseVec::unit(e)).collect();
    match aa.generators() {
        Some(g) => gens.extend(g.iter().map(|v| apply(&i_a, v))),
        None => gens.extend(i_a.iter().cloned()),
    }
    match ab.generators() {
        Some(g) => gens.extend(g.iter().map(|v| apply(&i_b, v))),
        None => gens.extend(i_b.iter().cloned()),
    }
    gens.retain(|g| !g.is_zero());
    let mut c = FinAlgebra::from_table(labels, mult, unit, idempotents)
        .with_grading(grading)
        .with_generators(gens);
    if aa.has_differential() || ab.has_differential() || nabla.is_some() {
        let mut d = Vec::with_capacity(n);
        for &(x, y) in t.basis() {
            let mut terms = Vec::new();
            for (x2, c1) in aa.d(&SparseVec::unit(x)).iter() {
                terms.push(((x2, y), c1.clone()));
            }
            let s = sign(aa.degree(x));
            for (y2, c1) in ab.d(&SparseVec::unit(y)).iter() {
                terms.push(((x, y2), c1 * &s));
            }
            if let Some(nb) = nabla {
                for ((u, w), c1) in t.pairs(&nb.table[y]) {
                    for (i, ci) in aa.basis_product(x, u).iter() {
                        terms.push(((i, w), c1 * ci * &s));
                    }
                }
            }
            d.push(t.reduce(&terms));
        }
        c = c.with_differential(d);
    }
    let report = c.validate();
    if !report.is_valid() {
        return Err(Error::TwistingFailure(format!("product is not a DG algebra: {}", report.violations[0])));
    }
    let p_a = b.pi.as_ref().map(|_| {
        t.basis()
            .iter()
            .map(|&(x, y)| aa.mul(&SparseVec::unit(x), &b_eps_pi_in_a(a, b, y)))
            .collect::<Vec<_>>()
    });
    let p_b = a.pi.as_ref().map(|_| {
        t.basis().iter().map(|&(x, y)| ab.mul(&a_eps_pi_in_b(a, b, x), &SparseVec::unit(y))).collect::<Vec<_>>()
    });
    if let Some(nb) = nabla {
        let Some(pb) = &p_b else {
            return Err(Error::MissingAugmentation("∇ needs an augmented left factor".into()));
        };
        for (y, v) in nb.table.iter().enumerate() {
            if !apply(pb, v).is_zero() {
                return Err(Error::DifferentialFailure(format!("∇({}) is not in I_A ⊗ B", ab.label(y))));
            }
            if !v.is_zero() && c.homogeneous_degree(v) != Some(ab.degree(y) + 1) {
                return Err(Error::DifferentialFailure(format!("∇({}) has the wrong degree", ab.label(y))));
            }
        }
    }
    check_homomorphism(aa, &c, &i_a, "i_A")?;
    // ∇ deforms d on 1 ⊗ B, so i_B is only required to be multiplicative
    check_hom(ab, &c, &i_b, "i_B", nabla.is_none())?;
    if let Some(pb) = &p_b {
        check_homomorphism(&c, ab, pb, "p_B")?;
    }
    let eps_c: Vec<SparseVec> = a.eps.iter().map(|v| apply(&i_a, v)).collect();
    let pi_c = match (&p_a, &a.pi) {
        (Some(pa), Some(pia)) => {
            let cand: Vec<SparseVec> = pa.iter().map(|v| apply(pia, v)).collect();
            check_homomorphism(&c, &a.base, &cand, "augmentation").ok().map(|_| cand)
        }
        _ => None,
    };
    let ring = RRing { algebra: c.clone(), base: a.base.clone(), eps: eps_c, pi: pi_c };
    Ok(TwistedProduct { algebra: c, tensor: t, i_a, i_b, p_a, p_b, ring })
}

/// Images of the base idempotents when they are basis tensors; otherwise (e.g.
/// over `R = ℚ`) the basis tensors `e ⊗ f` of idempotents of both factors, which
/// must then sum to `1 ⊗ 1`.
fn product_idempotents(a: &RRing, b: &RRing, t: &RTensor, unit: &SparseVec) -> Result<Vec<usize>> {
    let mut idempotents = Vec::new();
    let mut from_base = true;
    for &e in a.base.idempotents() {
        let v = t.pure(&a.eps[e], b.algebra.unit());
        match (v.nnz(), v.leading()) {
            (0, _) => {}
            (1, Some((k, c))) if c.is_one() => idempotents.push(k),
            _ => from_base = false,
        }
    }
    if from_base {
        return Ok(idempotents);
    }
    let (ia, ib) = (a.algebra.idempotents(), b.algebra.idempotents());
    let pairs: Vec<usize> =
        (0..t.dim()).filter(|&k| ia.contains(&t.basis()[k].0) && ib.contains(&t.basis()[k].1)).collect();
    let sum = SparseVec::from_pairs(pairs.iter().map(|&k| (k, Q::one())));
    if sum != *unit {
        return Err(Error::InvalidAlgebra("idempotents of the factors do not give a complete set in the product".into()));
    }
    Ok(pairs)
}

fn b_eps_pi_in_a(a: &RRing, b: &RRing, y: usize) -> SparseVec {
    apply(&a.eps, &b.pi.as_ref().expect("augmented")[y])
}

fn a_eps_pi_in_b(a: &RRing, b: &RRing, x: usize) -> SparseVec {
    apply(&b.eps, &a.pi.as_ref().expect("augmented")[x])
}

/// `A ⊗^v_S B` for two algebras over the semisimple algebra of their idempotents.
pub fn canonical_product_over_s(a: &FinAlgebra, b: &FinAlgebra) -> Result<TwistedProduct> {
    let ra = RRing::over_semisimple(a.clone())?;
    let rb = RRing::over_semisimple(b.clone())?;
    canonical_product(&ra, &rb, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::cohomology_dims;
    use crate::exactmat::q;
    use crate::families::{kronecker, kronecker_named, kronecker_op_named};

    fn ring(a: FinAlgebra) -> RRing {
        RRing::over_semisimple(a).unwrap()
    }

    #[test]
    fn tensor_over_field_is_full() {
        let k1 = kronecker(1, &[]).unwrap().into_algebra();
        let mut a = RRing::over_semisimple(k1.clone()).unwrap();
        // view K1 over ℚ
        a.base = FinAlgebra::semisimple(1);
        a.eps = vec![k1.unit().clone()];
        a.pi = None;
        let t = RTensor::new(&a, &a).unwrap();
        assert_eq!(t.dim(), 9);
    }

    #[test]
    fn k1_over_s_dimension() {
        let a = ring(kronecker(1, &[]).unwrap().into_algebra());
        let t = RTensor::new(&a, &a).unwrap();
        // Σ_r dim(A e_r) dim(e_r A) = 2·1 + 1·2
        assert_eq!(t.dim(), 4);
    }

    #[test]
    fn canonical_v_kills_radical_pairs() {
        let a = ring(kronecker(1, &[]).unwrap().into_algebra());
        let b = ring(kronecker_op_named(&["b".into()], &[]).unwrap().into_algebra());
        let (t, tau) = canonical_setup(&a, &b).unwrap();
        let c = a.algebra.index_of("c1").unwrap();
        let bb = b.algebra.index_of("b").unwrap();
        assert!(tau.table[bb][c].is_zero());
        assert!(verify_twisting(&a, &b, &t, &tau).is_valid());
        let p = canonical_product(&a, &b, None).unwrap();
        assert_eq!(p.algebra.dim(), 5);
    }

    #[test]
    fn kronecker_products_recover_k2() {
        let a = ring(kronecker_named(&["c".into()], &[]).unwrap().into_algebra());
        let b = ring(kronecker_named(&["d".into()], &[]).unwrap().into_algebra());
        let p = canonical_product(&a, &b, None).unwrap();
        assert_eq!(p.algebra.dim(), 4);
        let c = p.algebra.index_of("c").unwrap();
        let d = p.algebra.index_of("d").unwrap();
        assert!(p.algebra.basis_product(c, d).is_zero());
        assert!(p.algebra.basis_product(d, c).is_zero());
    }

    #[test]
    fn degenerating_differential() {
        let a = ring(kronecker_named(&["c1".into()], &[0]).unwrap().into_algebra());
        let b = ring(kronecker_named(&["c2".into()], &[-1]).unwrap().into_algebra());
        let (t, tau) = canonical_setup(&a, &b).unwrap();
        let c1 = a.algebra.index_of("c1").unwrap();
        let c2 = b.algebra.index_of("c2").unwrap();
        let mut table = vec![SparseVec::zero(); b.algebra.dim()];
        table[c2] = t.pure(&SparseVec::unit(c1), b.algebra.unit());
        let nabla = NablaDeformation { table };
        let p = build_product(&a, &b, t, &tau, Some(&nabla)).unwrap();
        let h = cohomology_dims(&p.algebra);
        assert_eq!(h.get(&0), Some(&2));
        assert_eq!(h.values().sum::<usize>(), 2);
    }

    #[test]
    fn sign_error_breaks_hexagon() {
        let k1 = kronecker(1, &[]).unwrap().into_algebra();
        let mut a = ring(k1.clone());
        a.base = FinAlgebra::semisimple(1);
        a.eps = vec![k1.unit().clone()];
        a.pi = None;
        let t = RTensor::new(&a, &a).unwrap();
        let good = flip(&a, &a, &t);
        assert!(verify_twisting(&a, &a, &t, &good).is_valid());
        let mut bad = good.clone();
        let c = k1.index_of("c1").unwrap();
        bad.table[0][c] = bad.table[0][c].neg();
        let rep = verify_twisting(&a, &a, &t, &bad);
        assert!(rep.violations.iter().any(|v| matches!(v, TwistViolation::Hexagon { .. })));
    }

    #[test]
    fn quaternions_from_cyclic_twist() {
        // ℚ[x]/(x² + 1) twisted with ℚ[y]/(y² + 1) by τ(y ⊗ x) = -x ⊗ y.
        let dual = |name: &str| {
            let mult = vec![
                vec![SparseVec::unit(0), SparseVec::unit(1)],
                vec![SparseVec::unit(1), SparseVec::single(0, q(-1))],
            ];
            FinAlgebra::from_table(vec!["1".into(), name.into()], mult, SparseVec::unit(0), vec![0])
                .with_grading(vec![0, 0])
        };
        let base = FinAlgebra::semisimple(1);
        let a = RRing::new(dual("x"), base.clone(), vec![SparseVec::unit(0)], None).unwrap();
        let b = RRing::new(dual("y"), base, vec![SparseVec::unit(0)], None).unwrap();
        let t = RTensor::new(&a, &b).unwrap();
        let mut table = vec![vec![SparseVec::zero(); 2]; 2];
        for (yb, row) in table.iter_mut().enumerate() {
            for (xa, slot) in row.iter_mut().enumerate() {
                let s = if xa * yb == 1 { q(-1) } else { q(1) };
                *slot = t.pure(&SparseVec::single(xa, s), &SparseVec::unit(yb));
            }
        }
        let tau = TwistingMap { table };
        assert!(verify_twisting(&a, &b, &t, &tau).is_valid());
        let p = build_product(&a, &b, t, &tau, None).unwrap();
        assert_eq!(p.algebra.dim(), 4);
        // (xy)² = -1
        let x = p.i_a[1].clone();
        let y = p.i_b[1].clone();
        let xy = p.algebra.mul(&x, &y);
        assert_eq!(p.algebra.mul(&xy, &xy), p.algebra.unit().neg());
    }
}
