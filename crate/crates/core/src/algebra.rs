//! Finite-dimensional associative unital algebras given by structure constants,
//! optionally graded and carrying a differential.
//!
//! Basis elements are indexed `0..dim`. The product of basis elements `i` and `j`
//! is stored as a sparse vector. Declared idempotents are basis indices.

use std::collections::BTreeMap;
use std::fmt;

use num::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmat::{format_rational, kernel_basis, parse_rational, Echelon, RatMatrix, SparseVec, Q};

/// Above this dimension `validate` checks associativity and the Leibniz rule
/// against the declared generators instead of all basis triples.
pub const FULL_CHECK_LIMIT: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinAlgebra {
    labels: Vec<String>,
    mult: Vec<Vec<SparseVec>>,
    unit: SparseVec,
    idempotents: Vec<usize>,
    grading: Option<Vec<i64>>,
    differential: Option<Vec<SparseVec>>,
    generators: Option<Vec<SparseVec>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    TableShape,
    Associativity { i: usize, j: usize, k: usize },
    LeftUnit { i: usize },
    RightUnit { i: usize },
    Idempotent { i: usize, j: usize },
    IdempotentSum,
    Grading { i: usize, j: usize },
    UnitDegree,
    DifferentialDegree { i: usize },
    DifferentialSquare { i: usize },
    Leibniz { i: usize, j: usize },
    IdempotentDifferential { i: usize },
    NotGenerated,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TableShape => write!(f, "structure constant table has the wrong shape"),
            Violation::Associativity { i, j, k } => write!(f, "(b{i} b{j}) b{k} != b{i} (b{j} b{k})"),
            Violation::LeftUnit { i } => write!(f, "1 * b{i} != b{i}"),
            Violation::RightUnit { i } => write!(f, "b{i} * 1 != b{i}"),
            Violation::Idempotent { i, j } => write!(f, "e{i} e{j} != delta e{i}"),
            Violation::IdempotentSum => write!(f, "idempotents do not sum to 1"),
            Violation::Grading { i, j } => write!(f, "b{i} b{j} is not homogeneous of the expected degree"),
            Violation::UnitDegree => write!(f, "unit is not of degree 0"),
            Violation::DifferentialDegree { i } => write!(f, "d(b{i}) is not of degree deg(b{i}) + 1"),
            Violation::DifferentialSquare { i } => write!(f, "d(d(b{i})) != 0"),
            Violation::Leibniz { i, j } => write!(f, "Leibniz rule fails on (b{i}, b{j})"),
            Violation::IdempotentDifferential { i } => write!(f, "d(e{i}) != 0"),
            Violation::NotGenerated => write!(f, "declared generators do not generate the algebra"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// `true` when associativity/Leibniz were checked on every basis triple.
    pub exhaustive: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidAlgebra(v.to_string())),
        }
    }
}

impl FinAlgebra {
    /// Assembles an algebra without checking any axiom; see [`FinAlgebra::validate`].
    pub fn from_table(
        labels: Vec<String>,
        mult: Vec<Vec<SparseVec>>,
        unit: SparseVec,
        idempotents: Vec<usize>,
    ) -> Self {
        Self { labels, mult, unit, idempotents, grading: None, differential: None, generators: None }
    }

    pub fn with_grading(mut self, grading: Vec<i64>) -> Self {
        self.grading = Some(grading);
        self
    }

    pub fn with_differential(mut self, d: Vec<SparseVec>) -> Self {
        self.differential = Some(d);
        self
    }

    pub fn with_generators(mut self, g: Vec<SparseVec>) -> Self {
        self.generators = Some(g);
        self
    }

    pub fn without_differential(mut self) -> Self {
        self.differential = None;
        self
    }

    pub fn relabel(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim());
        self.labels = labels;
        self
    }

    /// The split semisimple algebra ℚ^n.
    pub fn semisimple(n: usize) -> Self {
        let mut mult = vec![vec![SparseVec::zero(); n]; n];
        for (i, row) in mult.iter_mut().enumerate() {
            row[i] = SparseVec::unit(i);
        }
        let unit = SparseVec::from_pairs((0..n).map(|i| (i, Q::one())));
        Self::from_table((1..=n).map(|i| format!("e{i}")).collect(), mult, unit, (0..n).collect())
            .with_grading(vec![0; n])
            .with_generators((0..n).map(SparseVec::unit).collect())
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn unit(&self) -> &SparseVec {
        &self.unit
    }

    pub fn idempotents(&self) -> &[usize] {
        &self.idempotents
    }

    pub fn vertex_count(&self) -> usize {
        self.idempotents.len()
    }

    pub fn grading(&self) -> Option<&[i64]> {
        self.grading.as_deref()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.grading.as_ref().map_or(0, |g| g[i])
    }

    pub fn differential(&self) -> Option<&[SparseVec]> {
        self.differential.as_deref()
    }

    pub fn has_differential(&self) -> bool {
        self.differential.is_some()
    }

    pub fn generators(&self) -> Option<&[SparseVec]> {
        self.generators.as_deref()
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &SparseVec {
        &self.mult[i][j]
    }

    pub fn mul(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let p = &self.mult[i][j];
                if !p.is_zero() {
                    out.add_scaled(p, &(a * b));
                }
            }
        }
        out
    }

    pub fn d(&self, x: &SparseVec) -> SparseVec {
        let Some(d) = &self.differential else {
            return SparseVec::zero();
        };
        let mut out = SparseVec::zero();
        for (i, c) in x.iter() {
            out.add_scaled(&d[i], c);
        }
        out
    }

    /// Degree of `x` if it is homogeneous (zero counts as homogeneous of degree 0).
    pub fn homogeneous_degree(&self, x: &SparseVec) -> Option<i64> {
        let mut deg = None;
        for (i, _) in x.iter() {
            let d = self.degree(i);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        Some(deg.unwrap_or(0))
    }

    pub fn degrees(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = (0..self.dim()).map(|i| self.degree(i)).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// `(j, i)` if basis element `b` satisfies `e_j b e_i = b`.
    pub fn peirce_type(&self, b: usize) -> Option<(usize, usize)> {
        let v = SparseVec::unit(b);
        for (jj, &ej) in self.idempotents.iter().enumerate() {
            if self.mult[ej][b] != v {
                continue;
            }
            for (ii, &ei) in self.idempotents.iter().enumerate() {
                if self.mult[b][ei] == v {
                    return Some((jj, ii));
                }
            }
        }
        None
    }

    /// Basis of `e_j A e_i` (vertex indices into the idempotent list).
    pub fn peirce_space(&self, j: usize, i: usize) -> Vec<SparseVec> {
        let ej = SparseVec::unit(self.idempotents[j]);
        let ei = SparseVec::unit(self.idempotents[i]);
        let mut ech = Echelon::new();
        for b in 0..self.dim() {
            ech.insert(self.mul(&self.mul(&ej, &SparseVec::unit(b)), &ei));
        }
        ech.rows().into_iter().cloned().collect()
    }

    /// Matrix of left multiplication by `x` (column `j` is `x b_j`).
    pub fn left_mult_matrix(&self, x: &SparseVec) -> RatMatrix {
        let cols: Vec<SparseVec> = (0..self.dim()).map(|j| self.mul(x, &SparseVec::unit(j))).collect();
        RatMatrix::from_sparse_columns(self.dim(), &cols)
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let mut v = Vec::new();
        if self.mult.len() != n || self.mult.iter().any(|r| r.len() != n) {
            return ValidationReport { violations: vec![Violation::TableShape], exhaustive: false };
        }
        if self.mult.iter().flatten().any(|p| p.max_index().is_some_and(|m| m >= n)) {
            return ValidationReport { violations: vec![Violation::TableShape], exhaustive: false };
        }
        for i in 0..n {
            let b = SparseVec::unit(i);
            if self.mul(&self.unit, &b) != b {
                v.push(Violation::LeftUnit { i });
            }
            if self.mul(&b, &self.unit) != b {
                v.push(Violation::RightUnit { i });
            }
        }
        let exhaustive = n <= FULL_CHECK_LIMIT || self.generators.is_none();
        if exhaustive {
            'outer: for i in 0..n {
                for j in 0..n {
                    let ij = &self.mult[i][j];
                    for k in 0..n {
                        let left = self.mul(ij, &SparseVec::unit(k));
                        let right = self.mul(&SparseVec::unit(i), &self.mult[j][k]);
                        if left != right {
                            v.push(Violation::Associativity { i, j, k });
                            break 'outer;
                        }
                    }
                }
            }
        } else {
            let gens = self.generators.as_ref().unwrap();
            if !self.generated_by(gens) {
                v.push(Violation::NotGenerated);
            }
            if let Some((i, j, k)) = self.associativity_against(gens) {
                v.push(Violation::Associativity { i, j, k });
            }
        }
        for (a, &ei) in self.idempotents.iter().enumerate() {
            for (b, &ej) in self.idempotents.iter().enumerate() {
                let expected = if a == b { SparseVec::unit(ei) } else { SparseVec::zero() };
                if self.mult[ei][ej] != expected {
                    v.push(Violation::Idempotent { i: a, j: b });
                }
            }
        }
        let sum = SparseVec::from_pairs(self.idempotents.iter().map(|&e| (e, Q::one())));
        if sum != self.unit {
            v.push(Violation::IdempotentSum);
        }
        if let Some(g) = &self.grading {
            if self.homogeneous_degree(&self.unit) != Some(0) {
                v.push(Violation::UnitDegree);
            }
            'grade: for i in 0..n {
                for j in 0..n {
                    if self.mult[i][j].iter().any(|(k, _)| g[k] != g[i] + g[j]) {
                        v.push(Violation::Grading { i, j });
                        break 'grade;
                    }
                }
            }
        }
        if let Some(d) = &self.differential {
            for i in 0..n {
                if d[i].iter().any(|(k, _)| self.degree(k) != self.degree(i) + 1) {
                    v.push(Violation::DifferentialDegree { i });
                }
                if !self.d(&d[i]).is_zero() {
                    v.push(Violation::DifferentialSquare { i });
                }
            }
            for (a, &e) in self.idempotents.iter().enumerate() {
                if !d[e].is_zero() {
                    v.push(Violation::IdempotentDifferential { i: a });
                }
            }
            let right: Vec<(usize, SparseVec)> = match &self.generators {
                Some(g) if n > 2 * FULL_CHECK_LIMIT => g.iter().cloned().enumerate().collect(),
                _ => (0..n).map(|j| (j, SparseVec::unit(j))).collect(),
            };
            'leib: for i in 0..n {
                let x = SparseVec::unit(i);
                let sign = if self.degree(i).rem_euclid(2) == 0 { Q::one() } else { -Q::one() };
                for (j, y) in &right {
                    let lhs = self.d(&self.mul(&x, y));
                    let mut rhs = self.mul(&d[i], y);
                    rhs.add_scaled(&self.mul(&x, &self.d(y)), &sign);
                    if lhs != rhs {
                        v.push(Violation::Leibniz { i, j: *j });
                        break 'leib;
                    }
                }
            }
        }
        ValidationReport { violations: v, exhaustive }
    }

    /// First `(i, j, g)` with `(b_i b_j) g != b_i (b_j g)`. Triples that vanish for
    /// Peirce reasons on both sides are skipped when every basis element and
    /// generator lies in a single `e_j A e_i`.
    fn associativity_against(&self, gens: &[SparseVec]) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        let types: Option<Vec<(usize, usize)>> = (0..n).map(|b| self.peirce_type(b)).collect();
        let gen_types: Option<Vec<(usize, usize)>> = types.as_ref().and_then(|t| {
            gens.iter()
                .map(|g| {
                    let mut it = g.iter().map(|(k, _)| t[k]);
                    let first = it.next()?;
                    it.all(|x| x == first).then_some(first)
                })
                .collect()
        });
        // right multiples b_j g
        let jg: Vec<Vec<SparseVec>> = (0..n)
            .map(|j| gens.iter().map(|g| self.mul(&SparseVec::unit(j), g)).collect())
            .collect();
        for i in 0..n {
            for j in 0..n {
                if let Some(t) = &types {
                    if t[i].1 != t[j].0 {
                        continue;
                    }
                }
                let ij = &self.mult[i][j];
                for (gk, _) in gens.iter().enumerate() {
                    if let (Some(t), Some(gt)) = (&types, &gen_types) {
                        if t[j].1 != gt[gk].0 {
                            continue;
                        }
                    }
                    let mut left = SparseVec::zero();
                    for (k, c) in ij.iter() {
                        left.add_scaled(&jg[k][gk], c);
                    }
                    let mut right = SparseVec::zero();
                    for (l, c) in jg[j][gk].iter() {
                        right.add_scaled(&self.mult[i][l], c);
                    }
                    if left != right {
                        return Some((i, j, gk));
                    }
                }
            }
        }
        None
    }

    /// Whether the unit and right multiplication by `gens` reach the whole algebra.
    pub fn generated_by(&self, gens: &[SparseVec]) -> bool {
        let mut ech = Echelon::new();
        let mut frontier = vec![self.unit.clone()];
        ech.insert(self.unit.clone());
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.mul(&x, g);
                if ech.insert(y.clone()) {
                    frontier.push(y);
                }
                if ech.rank() == self.dim() {
                    return true;
                }
            }
        }
        ech.rank() == self.dim()
    }

    /// Opposite algebra with the Koszul sign `a·b = (-1)^{|a||b|} b a`.
    pub fn opposite(&self) -> FinAlgebra {
        let n = self.dim();
        let mut mult = vec![vec![SparseVec::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let p = &self.mult[j][i];
                mult[i][j] = if (self.degree(i) * self.degree(j)).rem_euclid(2) == 1 { p.neg() } else { p.clone() };
            }
        }
        let mut out = FinAlgebra::from_table(self.labels.clone(), mult, self.unit.clone(), self.idempotents.clone());
        out.grading = self.grading.clone();
        out.differential = self.differential.clone();
        out.generators = self.generators.clone();
        out
    }

    /// Coordinates of every basis element on the idempotents modulo the radical,
    /// i.e. the matrix of the split projection `A -> S = ℚ^N`.
    pub fn split_projection(&self) -> Result<Vec<SparseVec>> {
        let j = radical(self);
        if j.dim() + self.vertex_count() != self.dim() {
            return Err(Error::NotSplit(format!(
                "dim A = {}, dim J = {}, {} idempotents",
                self.dim(),
                j.dim(),
                self.vertex_count()
            )));
        }
        if let Some(d) = &self.differential {
            for &e in &self.idempotents {
                if !d[e].is_zero() {
                    return Err(Error::NotSplit("d(e_i) != 0".into()));
                }
            }
            for x in j.basis() {
                if !j.contains(&self.d(x)) {
                    return Err(Error::NotSplit("radical is not closed under d".into()));
                }
            }
        }
        let order = IdempotentsLast::new(self);
        let ech = order.echelon(j.basis());
        let pos: BTreeMap<usize, usize> = self.idempotents.iter().enumerate().map(|(a, &e)| (e, a)).collect();
        let mut out = Vec::with_capacity(self.dim());
        for b in 0..self.dim() {
            let r = order.back(&ech.reduce(&order.fwd(&SparseVec::unit(b))));
            let mut coords = Vec::new();
            for (k, c) in r.iter() {
                match pos.get(&k) {
                    Some(&a) => coords.push((a, c.clone())),
                    None => return Err(Error::NotSplit("radical complement is not spanned by idempotents".into())),
                }
            }
            out.push(SparseVec::from_pairs(coords));
        }
        Ok(out)
    }
}

/// Column order putting declared idempotents last, higher indices first, so that
/// echelon pivots land on "long" basis elements and never on idempotents.
pub(crate) struct IdempotentsLast {
    to: Vec<usize>,
    from: Vec<usize>,
}

impl IdempotentsLast {
    pub(crate) fn new(a: &FinAlgebra) -> Self {
        let n = a.dim();
        let mut from: Vec<usize> = (0..n).rev().filter(|i| !a.idempotents.contains(i)).collect();
        from.extend(a.idempotents.iter().copied());
        let mut to = vec![0; n];
        for (new, &old) in from.iter().enumerate() {
            to[old] = new;
        }
        Self { to, from }
    }

    pub(crate) fn fwd(&self, v: &SparseVec) -> SparseVec {
        v.remap(|i| Some(self.to[i]))
    }

    pub(crate) fn back(&self, v: &SparseVec) -> SparseVec {
        v.remap(|i| Some(self.from[i]))
    }

    pub(crate) fn echelon<'a, I: IntoIterator<Item = &'a SparseVec>>(&self, vs: I) -> Echelon {
        let mut e = Echelon::new();
        for v in vs {
            e.insert(self.fwd(v));
        }
        e
    }
}

/// A subspace of an algebra closed under two-sided multiplication.
#[derive(Clone, Debug)]
pub struct GradedIdeal {
    ech: Echelon,
    basis: Vec<SparseVec>,
}

impl GradedIdeal {
    pub fn from_basis(vs: Vec<SparseVec>) -> Self {
        let ech = Echelon::from_vectors(vs.iter());
        let basis = ech.rows().into_iter().cloned().collect();
        Self { ech, basis }
    }

    pub fn zero() -> Self {
        Self::from_basis(Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.ech.contains(v)
    }

    pub fn contains_ideal(&self, other: &GradedIdeal) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn same_as(&self, other: &GradedIdeal) -> bool {
        self.dim() == other.dim() && self.contains_ideal(other)
    }

    /// Whether the subspace is spanned by homogeneous vectors.
    pub fn is_graded(&self, a: &FinAlgebra) -> bool {
        let total: usize = a.degrees().iter().map(|&l| self.component(a, l).len()).sum();
        total == self.dim()
    }

    /// Basis of the degree-`l` part, assuming the ideal is graded.
    pub fn component(&self, a: &FinAlgebra, l: i64) -> Vec<SparseVec> {
        project_degree(a, &self.basis, l)
    }
}

fn project_degree(a: &FinAlgebra, vs: &[SparseVec], l: i64) -> Vec<SparseVec> {
    let mut ech = Echelon::new();
    for v in vs {
        let p = SparseVec::from_pairs(v.iter().filter(|(i, _)| a.degree(*i) == l).map(|(i, c)| (i, c.clone())));
        ech.insert(p);
    }
    ech.rows().into_iter().cloned().collect()
}

/// A graded ideal closed under the differential.
#[derive(Clone, Debug)]
pub struct DgIdeal(GradedIdeal);

impl DgIdeal {
    pub fn ideal(&self) -> &GradedIdeal {
        &self.0
    }

    pub fn into_ideal(self) -> GradedIdeal {
        self.0
    }
}

impl std::ops::Deref for DgIdeal {
    type Target = GradedIdeal;
    fn deref(&self) -> &GradedIdeal {
        &self.0
    }
}

pub fn is_two_sided(a: &FinAlgebra, i: &GradedIdeal) -> bool {
    i.basis().iter().all(|x| {
        (0..a.dim()).all(|b| {
            let bv = SparseVec::unit(b);
            i.contains(&a.mul(&bv, x)) && i.contains(&a.mul(x, &bv))
        })
    })
}

pub fn is_d_closed(a: &FinAlgebra, i: &GradedIdeal) -> bool {
    i.basis().iter().all(|x| i.contains(&a.d(x)))
}

/// The two-sided ideal `A g A` spanned by `b_i g b_j` over all generators `g`.
pub fn ideal_generated_by(a: &FinAlgebra, gens: &[SparseVec]) -> GradedIdeal {
    let mut ech = Echelon::new();
    for g in gens {
        for j in 0..a.dim() {
            let gb = a.mul(g, &SparseVec::unit(j));
            if gb.is_zero() {
                continue;
            }
            for i in 0..a.dim() {
                ech.insert(a.mul(&SparseVec::unit(i), &gb));
            }
        }
    }
    GradedIdeal::from_basis(ech.rows().into_iter().cloned().collect())
}

/// Jacobson radical by the trace-form criterion: `x ∈ J` iff `tr(L_{xy}) = 0`
/// for every basis element `y`. Valid in characteristic zero.
pub fn radical(a: &FinAlgebra) -> GradedIdeal {
    let n = a.dim();
    let traces: Vec<Q> = (0..n).map(|k| (0..n).map(|l| a.basis_product(k, l).get(l)).sum()).collect();
    let mut form = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            form[(i, j)] = a.basis_product(i, j).dot(&traces);
        }
    }
    let k = kernel_basis(&form.transpose());
    GradedIdeal::from_basis((0..k.cols()).map(|j| k.sparse_column(j)).collect())
}

/// `I^p`, spanned by `p`-fold products of elements of `I`.
pub fn power_ideal(a: &FinAlgebra, i: &GradedIdeal, p: usize) -> GradedIdeal {
    if p == 0 {
        return GradedIdeal::from_basis(vec![a.unit().clone()]);
    }
    let mut cur = i.clone();
    for _ in 1..p {
        cur = product_ideal(a, &cur, i);
        if cur.is_zero() {
            break;
        }
    }
    cur
}

fn product_ideal(a: &FinAlgebra, x: &GradedIdeal, y: &GradedIdeal) -> GradedIdeal {
    let mut ech = Echelon::new();
    for u in x.basis() {
        for v in y.basis() {
            ech.insert(a.mul(u, v));
        }
    }
    GradedIdeal::from_basis(ech.rows().into_iter().cloned().collect())
}

/// Least `p` with `I^p = 0`.
pub fn nilpotency_index(a: &FinAlgebra, i: &GradedIdeal) -> Result<usize> {
    let mut p = 1;
    let mut cur = i.clone();
    while !cur.is_zero() {
        if p > a.dim() {
            return Err(Error::NotNilpotent(a.dim()));
        }
        cur = product_ideal(a, &cur, i);
        p += 1;
    }
    Ok(p)
}

fn require_ideal(a: &FinAlgebra, i: &GradedIdeal) -> Result<()> {
    if !is_two_sided(a, i) {
        return Err(Error::NotAnIdeal("subspace is not closed under multiplication".into()));
    }
    Ok(())
}

/// Internal DG ideal `{r ∈ I : d(r) ∈ I}`.
pub fn internal_ideal(a: &FinAlgebra, i: &GradedIdeal) -> Result<DgIdeal> {
    require_ideal(a, i)?;
    let n = a.dim();
    let cols: Vec<SparseVec> = i.basis().iter().map(|x| i.ech.reduce(&a.d(x))).collect();
    let k = kernel_basis(&RatMatrix::from_sparse_columns(n, &cols));
    let mut vs = Vec::new();
    for j in 0..k.cols() {
        let mut v = SparseVec::zero();
        for (r, x) in i.basis().iter().enumerate() {
            v.add_scaled(x, &k[(r, j)]);
        }
        vs.push(v);
    }
    let out = GradedIdeal::from_basis(vs);
    certify_dg(a, out)
}

/// External DG ideal `I + d(I)`.
pub fn external_ideal(a: &FinAlgebra, i: &GradedIdeal) -> Result<DgIdeal> {
    require_ideal(a, i)?;
    let mut vs: Vec<SparseVec> = i.basis().to_vec();
    vs.extend(i.basis().iter().map(|x| a.d(x)));
    certify_dg(a, GradedIdeal::from_basis(vs))
}

/// Checks two-sidedness and closure under `d`.
pub fn certify_dg(a: &FinAlgebra, i: GradedIdeal) -> Result<DgIdeal> {
    require_ideal(a, &i)?;
    if !is_d_closed(a, &i) {
        return Err(Error::NotDgIdeal("d(I) not contained in I".into()));
    }
    Ok(DgIdeal(i))
}

/// The quotient `A / I` on the complement of the pivot coordinates of `I`.
pub fn quotient(a: &FinAlgebra, i: &GradedIdeal) -> Result<FinAlgebra> {
    Ok(quotient_with_map(a, i)?.0)
}

/// Quotient algebra together with the projection `A -> A/I` (images of basis vectors).
pub fn quotient_with_map(a: &FinAlgebra, i: &GradedIdeal) -> Result<(FinAlgebra, Vec<SparseVec>)> {
    require_ideal(a, i)?;
    if a.has_differential() && !is_d_closed(a, i) {
        return Err(Error::NotDgIdeal("quotient by an ideal not closed under d".into()));
    }
    if a.grading().is_some() && !i.is_graded(a) {
        return Err(Error::NotAnIdeal("ideal is not graded".into()));
    }
    let order = IdempotentsLast::new(a);
    let ech = order.echelon(i.basis());
    let keep: Vec<usize> = (0..a.dim()).filter(|&b| !ech.is_pivot(order.to[b])).collect();
    let mut new_index = vec![None; a.dim()];
    for (k, &b) in keep.iter().enumerate() {
        new_index[b] = Some(k);
    }
    let project = |v: &SparseVec| -> SparseVec {
        let r = order.back(&ech.reduce(&order.fwd(v)));
        r.remap(|j| new_index[j])
    };
    let images: Vec<SparseVec> = (0..a.dim()).map(|b| project(&SparseVec::unit(b))).collect();
    let mult: Vec<Vec<SparseVec>> =
        keep.iter().map(|&x| keep.iter().map(|&y| project(a.basis_product(x, y))).collect()).collect();
    let mut idempotents = Vec::new();
    for &e in a.idempotents() {
        let img = &images[e];
        if img.is_zero() {
            continue;
        }
        match (img.nnz(), img.leading()) {
            (1, Some((k, c))) if c.is_one() => idempotents.push(k),
            _ => return Err(Error::InvalidAlgebra("idempotent image is not a basis vector".into())),
        }
    }
    let labels = keep.iter().map(|&b| a.label(b).to_string()).collect();
    let mut out = FinAlgebra::from_table(labels, mult, project(a.unit()), idempotents);
    if let Some(g) = a.grading() {
        out = out.with_grading(keep.iter().map(|&b| g[b]).collect());
    }
    if a.has_differential() {
        out = out.with_differential(keep.iter().map(|&b| project(&a.d(&SparseVec::unit(b)))).collect());
    }
    if let Some(gens) = a.generators() {
        out = out.with_generators(gens.iter().map(&project).filter(|g| !g.is_zero()).collect());
    }
    Ok((out, images))
}

/// Cohomology dimensions of the subquotient complex `big / small`, where both are
/// graded subspaces closed under `d` and `small ⊆ big`.
pub fn subquotient_cohomology(a: &FinAlgebra, big: &[SparseVec], small: &[SparseVec]) -> BTreeMap<i64, usize> {
    let degs = a.degrees();
    let big_parts: BTreeMap<i64, Vec<SparseVec>> = degs.iter().map(|&l| (l, project_degree(a, big, l))).collect();
    let small_parts: BTreeMap<i64, Vec<SparseVec>> = degs.iter().map(|&l| (l, project_degree(a, small, l))).collect();
    let empty = Vec::new();
    let rank_from = |l: i64| -> usize {
        let src = big_parts.get(&l).unwrap_or(&empty);
        let tgt_small = small_parts.get(&(l + 1)).unwrap_or(&empty);
        let mut ech = Echelon::from_vectors(tgt_small.iter());
        let base = ech.rank();
        for v in src {
            ech.insert(a.d(v));
        }
        ech.rank() - base
    };
    let mut out = BTreeMap::new();
    for &l in &degs {
        let q = big_parts[&l].len() - small_parts[&l].len();
        let h = q - rank_from(l) - rank_from(l - 1);
        out.insert(l, h);
    }
    out
}

/// `dim H^l(A, d)` for every occurring degree `l`.
pub fn cohomology_dims(a: &FinAlgebra) -> BTreeMap<i64, usize> {
    let all: Vec<SparseVec> = (0..a.dim()).map(SparseVec::unit).collect();
    subquotient_cohomology(a, &all, &[])
}

/// Whether the complex `I₊/I₋` is acyclic.
pub fn check_quotient_complex_acyclic(a: &FinAlgebra, i: &GradedIdeal) -> Result<bool> {
    let minus = internal_ideal(a, i)?;
    let plus = external_ideal(a, i)?;
    if !i.contains_ideal(&minus) || !plus.contains_ideal(i) {
        return Ok(false);
    }
    let h = subquotient_cohomology(a, plus.basis(), minus.basis());
    Ok(h.values().all(|&x| x == 0))
}

#[derive(Serialize, Deserialize)]
struct AlgebraJson {
    schema: u32,
    basis: Vec<String>,
    /// `[i, j, [[k, "p/q"], ...]]` for every nonzero product `b_i b_j`.
    mult: Vec<(usize, usize, Vec<(usize, String)>)>,
    unit: Vec<(usize, String)>,
    idempotents: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grading: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    differential: Option<Vec<Vec<(usize, String)>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<Vec<(usize, String)>>>,
}

fn vec_to_json(v: &SparseVec) -> Vec<(usize, String)> {
    v.iter().map(|(i, c)| (i, format_rational(c))).collect()
}

fn vec_from_json(v: &[(usize, String)]) -> Result<SparseVec> {
    let pairs: Result<Vec<(usize, Q)>> = v.iter().map(|(i, s)| Ok((*i, parse_rational(s)?))).collect();
    Ok(SparseVec::from_pairs(pairs?))
}

impl FinAlgebra {
    pub fn to_json(&self) -> serde_json::Value {
        let mut mult = Vec::new();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if !self.mult[i][j].is_zero() {
                    mult.push((i, j, vec_to_json(&self.mult[i][j])));
                }
            }
        }
        let doc = AlgebraJson {
            schema: 1,
            basis: self.labels.clone(),
            mult,
            unit: vec_to_json(&self.unit),
            idempotents: self.idempotents.clone(),
            grading: self.grading.clone(),
            differential: self.differential.as_ref().map(|d| d.iter().map(vec_to_json).collect()),
            generators: self.generators.as_ref().map(|g| g.iter().map(vec_to_json).collect()),
        };
        serde_json::to_value(doc).expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<FinAlgebra> {
        let doc: AlgebraJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Other(format!("algebra json: {e}")))?;
        if doc.schema != 1 {
            return Err(Error::Other(format!("unsupported algebra schema {}", doc.schema)));
        }
        let n = doc.basis.len();
        let mut mult = vec![vec![SparseVec::zero(); n]; n];
        for (i, j, v) in &doc.mult {
            if *i >= n || *j >= n {
                return Err(Error::InvalidAlgebra("product index out of range".into()));
            }
            mult[*i][*j] = vec_from_json(v)?;
        }
        let mut a = FinAlgebra::from_table(doc.basis, mult, vec_from_json(&doc.unit)?, doc.idempotents);
        a.grading = doc.grading;
        if let Some(d) = doc.differential {
            a.differential = Some(d.iter().map(|v| vec_from_json(v)).collect::<Result<_>>()?);
        }
        if let Some(g) = doc.generators {
            a.generators = Some(g.iter().map(|v| vec_from_json(v)).collect::<Result<_>>()?);
        }
        Ok(a)
    }
}
