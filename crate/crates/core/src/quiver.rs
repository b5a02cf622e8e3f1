//! Graded quivers, paths and their truncated quotient algebras.
//!
//! Paths compose right to left: the word `c2*b1*c1` first traverses `c1`.
//! A path is stored as its arrows in written order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{One, Zero};

use crate::algebra::FinAlgebra;
use crate::error::{Error, Result};
use crate::exactmat::{Echelon, SparseVec, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertices: usize,
    arrows: Vec<Arrow>,
}

/// A path from `source` to `target`; empty `arrows` is the trivial path at a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Self { source: v, target: v, arrows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// `self · other`, i.e. `other` first, or `None` if the endpoints do not match.
    pub fn compose(&self, other: &Path) -> Option<Path> {
        if self.source != other.target {
            return None;
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&other.arrows);
        Some(Path { source: other.source, target: self.target, arrows })
    }

    pub fn contains_subpath(&self, sub: &[usize]) -> bool {
        !sub.is_empty() && self.arrows.windows(sub.len()).any(|w| w == sub)
    }
}

/// A linear combination of parallel paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(Q, Path)>,
}

impl Relation {
    pub fn monomial(p: Path) -> Self {
        Self { terms: vec![(Q::one(), p)] }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn min_len(&self) -> usize {
        self.terms.iter().map(|(_, p)| p.len()).min().unwrap_or(0)
    }
}

impl Quiver {
    pub fn new(vertices: usize) -> Self {
        Self { vertices, arrows: Vec::new() }
    }

    /// Adds an arrow between 0-based vertices and returns its index.
    pub fn add_arrow(&mut self, name: &str, source: usize, target: usize, degree: i64) -> Result<usize> {
        if source >= self.vertices || target >= self.vertices {
            return Err(Error::InvalidQuiver(format!("arrow {name}: vertex out of range")));
        }
        if name.is_empty() || self.arrow_index(name).is_some() {
            return Err(Error::InvalidQuiver(format!("duplicate or empty arrow name `{name}`")));
        }
        if name.starts_with('e') && name[1..].chars().all(|c| c.is_ascii_digit()) && name.len() > 1 {
            return Err(Error::InvalidQuiver(format!("arrow name `{name}` clashes with a vertex idempotent")));
        }
        self.arrows.push(Arrow { name: name.to_string(), source, target, degree });
        Ok(self.arrows.len() - 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, i: usize) -> &Arrow {
        &self.arrows[i]
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn arrow_path(&self, a: usize) -> Path {
        let ar = &self.arrows[a];
        Path { source: ar.source, target: ar.target, arrows: vec![a] }
    }

    pub fn degree(&self, p: &Path) -> i64 {
        p.arrows.iter().map(|&a| self.arrows[a].degree).sum()
    }

    pub fn is_path(&self, arrows: &[usize]) -> bool {
        arrows.windows(2).all(|w| self.arrows[w[0]].source == self.arrows[w[1]].target)
    }

    pub fn path_from_arrows(&self, arrows: Vec<usize>) -> Result<Path> {
        let (Some(&first), Some(&last)) = (arrows.first(), arrows.last()) else {
            return Err(Error::InvalidRelation("empty arrow word".into()));
        };
        if !self.is_path(&arrows) {
            return Err(Error::InvalidRelation(format!("`{}` is not a path", self.word(&arrows))));
        }
        Ok(Path { source: self.arrows[last].source, target: self.arrows[first].target, arrows })
    }

    /// Parses `e2` (1-based vertex) or `c2*b1*c1`.
    pub fn parse_path(&self, s: &str) -> Result<Path> {
        let s = s.trim();
        if let Some(v) = s.strip_prefix('e').and_then(|r| r.parse::<usize>().ok()) {
            if v == 0 || v > self.vertices {
                return Err(Error::InvalidRelation(format!("no vertex {v}")));
            }
            return Ok(Path::trivial(v - 1));
        }
        let arrows = s
            .split('*')
            .map(|t| {
                let t = t.trim();
                self.arrow_index(t).ok_or_else(|| Error::InvalidRelation(format!("unknown arrow `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.path_from_arrows(arrows)
    }

    pub fn word(&self, arrows: &[usize]) -> String {
        arrows.iter().map(|&a| self.arrows[a].name.as_str()).collect::<Vec<_>>().join("*")
    }

    pub fn path_label(&self, p: &Path) -> String {
        if p.is_trivial() {
            format!("e{}", p.source + 1)
        } else {
            self.word(&p.arrows)
        }
    }

    /// All paths of length at most `max_len`, ordered by length.
    pub fn paths_up_to(&self, max_len: usize) -> Vec<Path> {
        let mut out: Vec<Path> = (0..self.vertices).map(Path::trivial).collect();
        let mut layer: Vec<Path> = (0..self.arrows.len()).map(|a| self.arrow_path(a)).collect();
        for _ in 0..max_len {
            out.extend(layer.iter().cloned());
            let mut next = Vec::new();
            for p in &layer {
                for (a, ar) in self.arrows.iter().enumerate() {
                    if ar.source == p.target {
                        let mut arrows = vec![a];
                        arrows.extend_from_slice(&p.arrows);
                        next.push(Path { source: p.source, target: ar.target, arrows });
                    }
                }
            }
            layer = next;
        }
        out
    }

    /// Length of the longest path, or `None` when the quiver has an oriented cycle.
    pub fn longest_path(&self) -> Option<usize> {
        let mut best = vec![0usize; self.vertices];
        for round in 0..=self.vertices {
            let mut changed = false;
            for ar in &self.arrows {
                if best[ar.source] + 1 > best[ar.target] {
                    best[ar.target] = best[ar.source] + 1;
                    changed = true;
                }
            }
            if !changed {
                return Some(best.into_iter().max().unwrap_or(0));
            }
            if round == self.vertices {
                break;
            }
        }
        None
    }

    pub fn check_relation(&self, r: &Relation) -> Result<()> {
        let Some((_, first)) = r.terms.first() else {
            return Err(Error::InvalidRelation("empty relation".into()));
        };
        for (c, p) in &r.terms {
            if c.is_zero() {
                return Err(Error::InvalidRelation("zero coefficient".into()));
            }
            if p.source != first.source || p.target != first.target {
                return Err(Error::InvalidRelation(format!(
                    "`{}` and `{}` are not parallel",
                    self.path_label(first),
                    self.path_label(p)
                )));
            }
            if p.len() < 2 {
                return Err(Error::InvalidRelation(format!(
                    "`{}` has length < 2; relations must lie in the square of the arrow ideal",
                    self.path_label(p)
                )));
            }
            if self.degree(p) != self.degree(first) {
                return Err(Error::InvalidRelation("relation is not homogeneous".into()));
            }
        }
        Ok(())
    }
}

/// `kQ/I` together with the paths labelling its basis.
#[derive(Clone, Debug)]
pub struct QuiverAlgebra {
    quiver: Quiver,
    basis: Vec<Path>,
    index: HashMap<Path, usize>,
    bound: usize,
    ideal: Option<RelationIdeal>,
    monomials: Vec<Vec<usize>>,
    algebra: FinAlgebra,
}

/// Span of the relation ideal in the column order of `col`.
#[derive(Clone, Debug)]
struct RelationIdeal {
    ech: Echelon,
    col: HashMap<Path, usize>,
    col_basis: Vec<Option<usize>>,
}

impl QuiverAlgebra {
    /// The quotient `kQ/I` computed modulo paths of length `> bound`; every
    /// path of length `bound` must lie in `I`.
    pub fn new(quiver: Quiver, relations: &[Relation], bound: usize) -> Result<Self> {
        for r in relations {
            quiver.check_relation(r)?;
        }
        if relations.iter().all(Relation::is_monomial) {
            let monomials = relations.iter().map(|r| r.terms[0].1.arrows.clone()).collect();
            Self::monomial(quiver, monomials, bound)
        } else {
            Self::general(quiver, relations, bound)
        }
    }

    /// The path algebra of an acyclic quiver.
    pub fn path_algebra(quiver: Quiver) -> Result<Self> {
        let l = quiver
            .longest_path()
            .ok_or_else(|| Error::InvalidQuiver("quiver has an oriented cycle; give relations and a bound".into()))?;
        Self::new(quiver, &[], l + 1)
    }

    /// Linear-algebra route for arbitrary relations, also usable for monomial ones.
    pub fn general(quiver: Quiver, relations: &[Relation], bound: usize) -> Result<Self> {
        let all = quiver.paths_up_to(bound);
        // longer paths first so that pivots are long paths
        let mut order: Vec<Path> = all;
        order.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let col: HashMap<Path, usize> = order.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut by_target: BTreeMap<usize, Vec<&Path>> = BTreeMap::new();
        let mut by_source: BTreeMap<usize, Vec<&Path>> = BTreeMap::new();
        for p in &order {
            by_target.entry(p.target).or_default().push(p);
            by_source.entry(p.source).or_default().push(p);
        }
        let empty = Vec::new();
        let mut ech = Echelon::new();
        for r in relations {
            let (s, t) = (r.terms[0].1.source, r.terms[0].1.target);
            let room = bound.saturating_sub(r.min_len());
            for q in by_target.get(&s).unwrap_or(&empty) {
                if q.len() > room {
                    continue;
                }
                for p in by_source.get(&t).unwrap_or(&empty) {
                    if p.len() + q.len() > room {
                        continue;
                    }
                    let mut v = Vec::new();
                    for (c, term) in &r.terms {
                        let full = p.compose(term).and_then(|x| x.compose(q)).expect("composable");
                        if let Some(&k) = col.get(&full) {
                            v.push((k, c.clone()));
                        }
                    }
                    ech.insert(SparseVec::from_pairs(v));
                }
            }
        }
        for p in order.iter().filter(|p| p.len() == bound) {
            if !ech.is_pivot(col[p]) {
                return Err(Error::NotNilpotentAtBound { bound, path: quiver.path_label(p) });
            }
        }
        let mut basis: Vec<Path> = order.iter().filter(|p| !ech.is_pivot(col[p])).cloned().collect();
        sort_basis(&mut basis);
        let ideal = RelationIdeal { ech, col, col_basis: Vec::new() };
        Self::assemble(quiver, basis, bound, Some(ideal), Vec::new())
    }

    fn monomial(quiver: Quiver, monomials: Vec<Vec<usize>>, bound: usize) -> Result<Self> {
        let mut basis: Vec<Path> = (0..quiver.vertex_count()).map(Path::trivial).collect();
        let mut layer: Vec<Path> = basis.clone();
        for len in 1..=bound {
            let mut next = Vec::new();
            for p in &layer {
                for (a, ar) in quiver.arrows().iter().enumerate() {
                    if ar.source != p.target {
                        continue;
                    }
                    let mut arrows = vec![a];
                    arrows.extend_from_slice(&p.arrows);
                    // only prefixes can create a new forbidden occurrence
                    if monomials.iter().any(|m| arrows.starts_with(m)) {
                        continue;
                    }
                    next.push(Path { source: p.source, target: ar.target, arrows });
                }
            }
            if len == bound {
                if let Some(p) = next.first() {
                    return Err(Error::NotNilpotentAtBound { bound, path: quiver.path_label(p) });
                }
            }
            basis.extend(next.iter().cloned());
            layer = next;
        }
        sort_basis(&mut basis);
        Self::assemble(quiver, basis, bound, None, monomials)
    }

    fn assemble(
        quiver: Quiver,
        basis: Vec<Path>,
        bound: usize,
        mut ideal: Option<RelationIdeal>,
        monomials: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let index: HashMap<Path, usize> = basis.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        if let Some(id) = ideal.as_mut() {
            id.col_basis = vec![None; id.col.len()];
            for (p, &c) in &id.col {
                id.col_basis[c] = index.get(p).copied();
            }
        }
        let mut this = Self {
            quiver,
            basis,
            index,
            bound,
            ideal,
            monomials,
            algebra: FinAlgebra::semisimple(0),
        };
        let n = this.basis.len();
        let mut mult = vec![vec![SparseVec::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                if let Some(p) = this.basis[i].compose(&this.basis[j]) {
                    mult[i][j] = this.normal_form(&p);
                }
            }
        }
        let nv = this.quiver.vertex_count();
        let idempotents: Vec<usize> = (0..nv).map(|v| this.index[&Path::trivial(v)]).collect();
        let unit = SparseVec::from_pairs(idempotents.iter().map(|&e| (e, Q::one())));
        let labels = this.basis.iter().map(|p| this.quiver.path_label(p)).collect();
        let grading = this.basis.iter().map(|p| this.quiver.degree(p)).collect();
        let mut gens: Vec<SparseVec> = idempotents.iter().map(|&e| SparseVec::unit(e)).collect();
        for a in 0..this.quiver.arrows().len() {
            let g = this.normal_form(&this.quiver.arrow_path(a));
            if !g.is_zero() {
                gens.push(g);
            }
        }
        this.algebra = FinAlgebra::from_table(labels, mult, unit, idempotents)
            .with_grading(grading)
            .with_generators(gens);
        Ok(this)
    }

    /// The image of a path in the basis of the quotient.
    pub fn normal_form(&self, p: &Path) -> SparseVec {
        if p.len() >= self.bound {
            return SparseVec::zero();
        }
        match &self.ideal {
            None => {
                if self.monomials.iter().any(|m| p.contains_subpath(m)) {
                    SparseVec::zero()
                } else {
                    self.index.get(p).map_or_else(SparseVec::zero, |&i| SparseVec::unit(i))
                }
            }
            Some(id) => {
                let r = id.ech.reduce(&SparseVec::unit(id.col[p]));
                r.remap(|k| Some(id.col_basis[k].expect("normal forms live on basis paths")))
            }
        }
    }

    /// Puts an arrow differential on the algebra, extended by the Leibniz rule.
    /// `d` maps arrow indices to elements of the quotient.
    pub fn with_arrow_differential(mut self, d: &BTreeMap<usize, SparseVec>) -> Result<Self> {
        let n = self.basis.len();
        let arrow_d = |a: usize| d.get(&a).cloned().unwrap_or_default();
        let mut cols = Vec::with_capacity(n);
        for p in &self.basis {
            let mut out = SparseVec::zero();
            let mut sign_deg = 0i64;
            for (t, &a) in p.arrows.iter().enumerate() {
                let da = arrow_d(a);
                if !da.is_zero() {
                    let left = self.path_element(&p.arrows[..t], p.target);
                    let right = self.path_element(&p.arrows[t + 1..], p.source);
                    let term = self.algebra.mul(&self.algebra.mul(&left, &da), &right);
                    let sign = if sign_deg.rem_euclid(2) == 0 { Q::one() } else { -Q::one() };
                    out.add_scaled(&term, &sign);
                }
                sign_deg += self.quiver.arrow(a).degree;
            }
            cols.push(out);
        }
        self.algebra = self.algebra.with_differential(cols);
        self.algebra.validate().into_result().map_err(|e| Error::DifferentialFailure(e.to_string()))?;
        Ok(self)
    }

    fn path_element(&self, arrows: &[usize], vertex: usize) -> SparseVec {
        if arrows.is_empty() {
            return SparseVec::unit(self.index[&Path::trivial(vertex)]);
        }
        let p = self.quiver.path_from_arrows(arrows.to_vec()).expect("subpath of a path");
        self.normal_form(&p)
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn algebra(&self) -> &FinAlgebra {
        &self.algebra
    }

    pub fn into_algebra(self) -> FinAlgebra {
        self.algebra
    }

    pub fn basis_paths(&self) -> &[Path] {
        &self.basis
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Length of the longest nonzero path in the quotient.
    pub fn longest_nonzero_path(&self) -> usize {
        self.basis.iter().map(Path::len).max().unwrap_or(0)
    }

    /// The linear map sending `e_v` and each arrow to the given images, extended
    /// multiplicatively along paths. Whether it is a homomorphism is up to the caller.
    pub fn induced_map(&self, tgt: &FinAlgebra, vertex_images: &[SparseVec], arrow_images: &[SparseVec]) -> Result<Vec<SparseVec>> {
        if vertex_images.len() != self.quiver.vertex_count() || arrow_images.len() != self.quiver.arrows().len() {
            return Err(Error::DimensionMismatch("one image per vertex and per arrow required".into()));
        }
        Ok(self
            .basis
            .iter()
            .map(|p| {
                if p.is_trivial() {
                    return vertex_images[p.source].clone();
                }
                let mut acc = arrow_images[p.arrows[0]].clone();
                for &a in &p.arrows[1..] {
                    acc = tgt.mul(&acc, &arrow_images[a]);
                }
                acc
            })
            .collect())
    }

    /// Element of the quotient named by a path string such as `c2*b1`.
    pub fn element(&self, s: &str) -> Result<SparseVec> {
        Ok(self.normal_form(&self.quiver.parse_path(s)?))
    }
}

fn sort_basis(basis: &mut [Path]) {
    basis.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
}

/// Paths of length `< bound` containing none of `monomials` as a contiguous
/// subword, by exhaustive enumeration. Independent check of the monomial route.
pub fn monomial_basis_oracle(quiver: &Quiver, monomials: &[Vec<usize>], bound: usize) -> Vec<Path> {
    let mut out: Vec<Path> = quiver
        .paths_up_to(bound.saturating_sub(1))
        .into_iter()
        .filter(|p| !monomials.iter().any(|m| p.contains_subpath(m)))
        .collect();
    sort_basis(&mut out);
    out
}

impl fmt::Display for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} vertices;", self.vertices)?;
        for a in &self.arrows {
            write!(f, " {}: {} -> {} (deg {});", a.name, a.source + 1, a.target + 1, a.degree)?;
        }
        Ok(())
    }
}

/// The quiver with two vertices, `n` arrows `1 -> 2` and `m` arrows `2 -> 1`.
pub fn two_vertex_quiver(c_names: &[String], b_names: &[String], c_deg: &[i64], b_deg: &[i64]) -> Result<Quiver> {
    let mut q = Quiver::new(2);
    for (i, name) in c_names.iter().enumerate() {
        q.add_arrow(name, 0, 1, c_deg.get(i).copied().unwrap_or(0))?;
    }
    for (i, name) in b_names.iter().enumerate() {
        q.add_arrow(name, 1, 0, b_deg.get(i).copied().unwrap_or(0))?;
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::q;

    fn names(p: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{p}{i}")).collect()
    }

    #[test]
    fn commutative_square_quotient() {
        // 1 -> 2 -> 4 and 1 -> 3 -> 4 with a commutativity relation
        let mut qv = Quiver::new(4);
        let a = qv.add_arrow("a", 0, 1, 0).unwrap();
        let b = qv.add_arrow("b", 1, 3, 0).unwrap();
        let c = qv.add_arrow("c", 0, 2, 0).unwrap();
        let d = qv.add_arrow("d", 2, 3, 0).unwrap();
        let ba = qv.path_from_arrows(vec![b, a]).unwrap();
        let dc = qv.path_from_arrows(vec![d, c]).unwrap();
        let rel = Relation { terms: vec![(q(1), ba.clone()), (q(-1), dc.clone())] };
        let qa = QuiverAlgebra::new(qv.clone(), &[rel], 3).unwrap();
        assert_eq!(qa.dim(), 9);
        assert!(qa.algebra().validate().is_valid());
        assert_eq!(qa.normal_form(&ba), qa.normal_form(&dc));
        let free = QuiverAlgebra::path_algebra(qv).unwrap();
        assert_eq!(free.dim(), 10);
    }

    #[test]
    fn bound_too_small_is_reported() {
        let qv = two_vertex_quiver(&names("c", 1), &names("b", 1), &[], &[]).unwrap();
        let bc = qv.parse_path("b1*c1").unwrap();
        let err = QuiverAlgebra::new(qv, &[Relation::monomial(bc)], 2).unwrap_err();
        assert!(matches!(err, Error::NotNilpotentAtBound { bound: 2, .. }));
    }

    #[test]
    fn non_parallel_relation_rejected() {
        let qv = two_vertex_quiver(&names("c", 1), &names("b", 1), &[], &[]).unwrap();
        let bc = qv.parse_path("b1*c1").unwrap();
        let cb = qv.parse_path("c1*b1").unwrap();
        let r = Relation { terms: vec![(q(1), bc), (q(1), cb)] };
        assert!(matches!(QuiverAlgebra::new(qv, &[r], 3), Err(Error::InvalidRelation(_))));
    }

    #[test]
    fn monomial_routes_agree_with_oracle() {
        let qv = two_vertex_quiver(&names("c", 2), &names("b", 2), &[], &[]).unwrap();
        let mons: Vec<Path> = ["c1*b1", "b2*c1", "c2*b2", "b1*c2", "c1*b2*c2"]
            .iter()
            .map(|s| qv.parse_path(s).unwrap())
            .collect();
        let rels: Vec<Relation> = mons.iter().cloned().map(Relation::monomial).collect();
        let fast = QuiverAlgebra::new(qv.clone(), &rels, 6).unwrap();
        let slow = QuiverAlgebra::general(qv.clone(), &rels, 6).unwrap();
        let words: Vec<Vec<usize>> = mons.iter().map(|p| p.arrows.clone()).collect();
        let oracle = monomial_basis_oracle(&qv, &words, 6);
        assert_eq!(fast.basis_paths(), &oracle[..]);
        assert_eq!(slow.basis_paths(), &oracle[..]);
        assert_eq!(fast.algebra(), slow.algebra());
        assert!(fast.algebra().validate().is_valid());
    }

    #[test]
    fn arrow_differential_leibniz() {
        // Kronecker quiver with c1 in degree 0, c2 in degree -1 and d(c2) = c1.
        let qv = two_vertex_quiver(&names("c", 2), &[], &[0, -1], &[]).unwrap();
        let qa = QuiverAlgebra::path_algebra(qv).unwrap();
        let c1 = qa.element("c1").unwrap();
        let mut d = BTreeMap::new();
        d.insert(1usize, c1);
        let qa = qa.with_arrow_differential(&d).unwrap();
        let h = crate::algebra::cohomology_dims(qa.algebra());
        assert_eq!(h.values().sum::<usize>(), 2);
    }
}
