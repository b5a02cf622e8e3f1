//! Right modules over basic split algebras: simples, projectives, minimal
//! projective resolutions, global dimension, Hom complexes and endomorphism
//! DG algebras.
//!
//! Syzygies are kept as subspaces of free modules `⊕ e_{v_t} A`, with coordinate
//! `t * dim A + b` for basis element `b` of summand `t`.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde::Serialize;

use crate::algebra::{radical, FinAlgebra, GradedIdeal};
use crate::error::{Error, Result};
use crate::exactmat::{sparse_kernel, BasisCoords, Echelon, RatMatrix, SparseVec, Q};

/// Per-algebra data shared by every module computation.
#[derive(Clone, Debug)]
pub struct ModuleContext {
    pub algebra: FinAlgebra,
    pub radical: GradedIdeal,
    left_type: Vec<usize>,
    right_type: Vec<usize>,
    /// Elements generating the radical as a two-sided ideal.
    rad_gens: Vec<SparseVec>,
    /// Elements generating the algebra.
    alg_gens: Vec<SparseVec>,
    /// `e_i J`, per vertex.
    vertex_radical: Vec<Echelon>,
    /// Split projection onto `ℚ^N`, per basis element.
    split: Vec<SparseVec>,
}

impl ModuleContext {
    pub fn new(algebra: FinAlgebra) -> Result<Self> {
        let split = algebra.split_projection()?;
        let mut left_type = Vec::with_capacity(algebra.dim());
        let mut right_type = Vec::with_capacity(algebra.dim());
        for b in 0..algebra.dim() {
            let (j, i) = algebra
                .peirce_type(b)
                .ok_or_else(|| Error::NotSplit(format!("basis element {} is not in any e_j A e_i", algebra.label(b))))?;
            left_type.push(j);
            right_type.push(i);
        }
        let rad = radical(&algebra);
        let idem: Vec<SparseVec> = algebra.idempotents().iter().map(|&e| SparseVec::unit(e)).collect();
        let alg_gens: Vec<SparseVec> = match algebra.generators() {
            Some(g) if algebra.generated_by(g) => g.to_vec(),
            _ => (0..algebra.dim()).map(SparseVec::unit).collect(),
        };
        let candidates: Vec<SparseVec> = alg_gens.iter().filter(|g| !idem.contains(g) && rad.contains(g)).cloned().collect();
        let rad_gens = if crate::algebra::ideal_generated_by(&algebra, &candidates).dim() == rad.dim() {
            candidates
        } else {
            rad.basis().to_vec()
        };
        let vertex_radical = idem
            .iter()
            .map(|e| Echelon::from_vectors(rad.basis().iter().map(|x| algebra.mul(e, x)).collect::<Vec<_>>().iter()))
            .collect();
        Ok(Self { algebra, radical: rad, left_type, right_type, rad_gens, alg_gens, vertex_radical, split })
    }

    pub fn vertex_count(&self) -> usize {
        self.algebra.vertex_count()
    }

    /// `A` as the free module `⊕_v e_v A` over all vertices.
    pub fn regular(&self) -> FreeModule {
        FreeModule { vertices: (0..self.vertex_count()).collect() }
    }

    /// Coordinates of `x ∈ A` in [`ModuleContext::regular`].
    pub fn embed(&self, x: &SparseVec) -> SparseVec {
        let n = self.dim_a();
        x.remap(|b| Some(self.left_type[b] * n + b))
    }

    fn dim_a(&self) -> usize {
        self.algebra.dim()
    }

    /// Basis elements of `e_v A`.
    fn row_basis(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim_a()).filter(move |&b| self.left_type[b] == v)
    }
}

/// A finite-dimensional right module given by action matrices: the coordinates of
/// `m·b` are `action[b] * coords(m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RightModule {
    pub dim: usize,
    pub action: Vec<RatMatrix>,
    pub grading: Option<Vec<i64>>,
    pub differential: Option<RatMatrix>,
    /// Left multiplication by each vertex idempotent, when the module is a
    /// quotient of the algebra by a two-sided ideal.
    pub left_idempotents: Option<Vec<RatMatrix>>,
}

impl RightModule {
    /// Checks `m(xy) = (mx)y`, unitality, and the DG conditions when present.
    pub fn validate(&self, a: &FinAlgebra) -> Result<()> {
        if self.action.len() != a.dim() {
            return Err(Error::InvalidModule("one action matrix per basis element required".into()));
        }
        let act_elem = |x: &SparseVec| -> RatMatrix {
            let mut m = RatMatrix::zeros(self.dim, self.dim);
            for (i, c) in x.iter() {
                for r in 0..self.dim {
                    for s in 0..self.dim {
                        let v = &self.action[i][(r, s)];
                        if !v.is_zero() {
                            m[(r, s)] += v * c;
                        }
                    }
                }
            }
            m
        };
        if act_elem(a.unit()) != RatMatrix::identity(self.dim) {
            return Err(Error::InvalidModule("unit does not act as the identity".into()));
        }
        for x in 0..a.dim() {
            for y in 0..a.dim() {
                let lhs = act_elem(a.basis_product(x, y));
                let rhs = self.action[y].mul(&self.action[x])?;
                if lhs != rhs {
                    return Err(Error::InvalidModule(format!("m({} {}) != (m {}) {}", a.label(x), a.label(y), a.label(x), a.label(y))));
                }
            }
        }
        if let (Some(g), Some(d)) = (&self.grading, &self.differential) {
            let dd = d.mul(d)?;
            if !dd.is_zero() {
                return Err(Error::InvalidModule("d² != 0".into()));
            }
            for x in 0..a.dim() {
                // d(m x) = d(m) x + (-1)^{|m|} m d(x)
                let dx = act_elem(&a.d(&SparseVec::unit(x)));
                for col in 0..self.dim {
                    let m = SparseVec::unit(col);
                    let mx = sparse_mat_vec(&self.action[x], &m);
                    let lhs = sparse_mat_vec(d, &mx);
                    let mut rhs = sparse_mat_vec(&self.action[x], &sparse_mat_vec(d, &m));
                    let s = if g[col].rem_euclid(2) == 0 { Q::one() } else { -Q::one() };
                    rhs.add_scaled(&sparse_mat_vec(&dx, &m), &s);
                    if lhs != rhs {
                        return Err(Error::InvalidModule("Leibniz rule fails".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// `S_i`: one-dimensional, acted on through the split projection.
    pub fn simple(ctx: &ModuleContext, i: usize) -> Self {
        let action = ctx.split.iter().map(|p| RatMatrix::from_rows(vec![vec![p.get(i)]]).expect("1x1")).collect();
        Self { dim: 1, action, grading: Some(vec![0]), differential: None, left_idempotents: None }
    }

    /// `A / I` for a right ideal `I`, on the non-pivot coordinates of `I`.
    pub fn regular_quotient(a: &FinAlgebra, ideal: &[SparseVec]) -> Result<Self> {
        let ech = Echelon::from_vectors(ideal.iter());
        let keep: Vec<usize> = (0..a.dim()).filter(|&b| !ech.is_pivot(b)).collect();
        let mut pos = vec![None; a.dim()];
        for (k, &b) in keep.iter().enumerate() {
            pos[b] = Some(k);
        }
        let project = |v: &SparseVec| ech.reduce(v).remap(|i| pos[i]);
        let n = keep.len();
        let mut action = Vec::with_capacity(a.dim());
        for x in 0..a.dim() {
            let cols: Vec<SparseVec> = keep.iter().map(|&b| project(a.basis_product(b, x))).collect();
            action.push(RatMatrix::from_sparse_columns(n, &cols));
        }
        let grading = Some(keep.iter().map(|&b| a.degree(b)).collect());
        let differential = if a.has_differential() {
            let cols: Vec<SparseVec> = keep.iter().map(|&b| project(&a.d(&SparseVec::unit(b)))).collect();
            Some(RatMatrix::from_sparse_columns(n, &cols))
        } else {
            None
        };
        let two_sided = a.idempotents().iter().all(|&e| {
            ideal.iter().all(|v| ech.reduce(&a.mul(&SparseVec::unit(e), v)).is_zero())
        });
        let left_idempotents = two_sided.then(|| {
            a.idempotents()
                .iter()
                .map(|&e| {
                    let cols: Vec<SparseVec> = keep.iter().map(|&b| project(a.basis_product(e, b))).collect();
                    RatMatrix::from_sparse_columns(n, &cols)
                })
                .collect()
        });
        let m = Self { dim: n, action, grading, differential, left_idempotents };
        m.validate(a)?;
        Ok(m)
    }

    /// `P_i = e_i A` as `A / (1 - e_i) A`.
    pub fn projective(a: &FinAlgebra, i: usize) -> Result<Self> {
        let e = *a.idempotents().get(i).ok_or_else(|| Error::InvalidModule(format!("no vertex {}", i + 1)))?;
        let mut comp = a.unit().clone();
        comp.add_scaled(&SparseVec::unit(e), &-Q::one());
        let ideal: Vec<SparseVec> = (0..a.dim()).map(|b| a.mul(&comp, &SparseVec::unit(b))).collect();
        Self::regular_quotient(a, &ideal)
    }

    pub fn direct_sum(parts: &[RightModule]) -> Self {
        let dim: usize = parts.iter().map(|p| p.dim).sum();
        let nact = parts.first().map_or(0, |p| p.action.len());
        let mut action = vec![RatMatrix::zeros(dim, dim); nact];
        let mut grading = Vec::with_capacity(dim);
        let mut differential = RatMatrix::zeros(dim, dim);
        let mut has_d = false;
        let mut off = 0;
        for p in parts {
            for (x, act) in action.iter_mut().enumerate() {
                for r in 0..p.dim {
                    for s in 0..p.dim {
                        act[(off + r, off + s)] = p.action[x][(r, s)].clone();
                    }
                }
            }
            grading.extend(p.grading.clone().unwrap_or_else(|| vec![0; p.dim]));
            if let Some(d) = &p.differential {
                has_d = true;
                for r in 0..p.dim {
                    for s in 0..p.dim {
                        differential[(off + r, off + s)] = d[(r, s)].clone();
                    }
                }
            }
            off += p.dim;
        }
        Self { dim, action, grading: Some(grading), differential: has_d.then_some(differential), left_idempotents: None }
    }

    fn degree(&self, i: usize) -> i64 {
        self.grading.as_ref().map_or(0, |g| g[i])
    }
}

fn sparse_mat_vec(m: &RatMatrix, v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::zero();
    for (j, c) in v.iter() {
        out.add_scaled(&m.sparse_column(j), c);
    }
    out
}

/// `⊕_t e_{vertices[t]} A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeModule {
    pub vertices: Vec<usize>,
}

/// A submodule of a free module, stored by an echelon basis.
#[derive(Clone, Debug)]
pub struct Submodule {
    pub free: FreeModule,
    basis: Vec<SparseVec>,
}

impl Submodule {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// `e_i A`.
    pub fn projective(ctx: &ModuleContext, i: usize) -> Self {
        let basis = ctx.row_basis(i).map(SparseVec::unit).collect();
        Self { free: FreeModule { vertices: vec![i] }, basis }
    }

    /// The right ideal generated by arbitrary elements of `A`, inside `A = ⊕_v e_v A`.
    pub fn right_ideal_of(ctx: &ModuleContext, gens: &[SparseVec]) -> Self {
        let embedded: Vec<SparseVec> = gens.iter().map(|g| ctx.embed(g)).collect();
        Self::generated(ctx, ctx.regular(), &embedded)
    }

    /// `{r ∈ A : x r = 0}`, inside `A = ⊕_v e_v A`.
    pub fn right_annihilator(ctx: &ModuleContext, x: &SparseVec) -> Self {
        let cols: Vec<SparseVec> = (0..ctx.dim_a()).map(|b| ctx.algebra.mul(x, &SparseVec::unit(b))).collect();
        let ker = sparse_kernel(&cols, ctx.dim_a());
        let embedded: Vec<SparseVec> = ker.iter().map(|k| ctx.embed(k)).collect();
        let ech = Echelon::from_vectors(embedded.iter());
        Self { free: ctx.regular(), basis: ech.rows().into_iter().cloned().collect() }
    }

    /// Whether `self` is the internal direct sum of `parts`, all inside the same free module.
    pub fn is_direct_sum_of(&self, parts: &[Submodule]) -> bool {
        if parts.iter().any(|p| p.free != self.free) {
            return false;
        }
        if parts.iter().map(Submodule::dim).sum::<usize>() != self.dim() {
            return false;
        }
        let whole = Echelon::from_vectors(self.basis.iter());
        let mut span = Echelon::new();
        for v in parts.iter().flat_map(|p| p.basis.iter()) {
            if !whole.contains(v) {
                return false;
            }
            span.insert(v.clone());
        }
        span.rank() == self.dim()
    }

    /// Left multiplication by `x` maps `self` isomorphically onto `target`; both
    /// must be right ideals of `A` inside [`ModuleContext::regular`].
    pub fn left_mult_iso(&self, ctx: &ModuleContext, x: &SparseVec, target: &Submodule) -> bool {
        let reg = ctx.regular();
        if self.free != reg || target.free != reg || self.dim() != target.dim() {
            return false;
        }
        let n = ctx.dim_a();
        let tgt = Echelon::from_vectors(target.basis.iter());
        let mut img = Echelon::new();
        for v in &self.basis {
            let mut w = SparseVec::zero();
            for (idx, c) in v.iter() {
                let prod = ctx.algebra.mul(x, &SparseVec::unit(idx % n));
                for (b2, d) in prod.iter() {
                    w.add_scaled(&SparseVec::unit(ctx.left_type[b2] * n + b2), &(c * d));
                }
            }
            if !tgt.contains(&w) {
                return false;
            }
            img.insert(w);
        }
        img.rank() == self.dim()
    }

    /// The right ideal `xA` of an element `x ∈ e_v A`.
    pub fn right_ideal(ctx: &ModuleContext, v: usize, gens: &[SparseVec]) -> Result<Self> {
        for g in gens {
            if g.iter().any(|(b, _)| ctx.left_type[b] != v) {
                return Err(Error::InvalidModule("generator does not lie in e_v A".into()));
            }
        }
        let free = FreeModule { vertices: vec![v] };
        Ok(Self::generated(ctx, free, gens))
    }

    /// The submodule of `free` generated by `gens`.
    pub fn generated(ctx: &ModuleContext, free: FreeModule, gens: &[SparseVec]) -> Self {
        let ech = close_under(ctx, &free, gens.to_vec());
        Self { free, basis: ech.rows().into_iter().cloned().collect() }
    }
}

/// Right action of basis element `x` on a vector of a free module.
fn act_free(ctx: &ModuleContext, v: &SparseVec, x: &SparseVec) -> SparseVec {
    let n = ctx.dim_a();
    let mut out = SparseVec::zero();
    for (idx, c) in v.iter() {
        let (t, b) = (idx / n, idx % n);
        let prod = ctx.algebra.mul(&SparseVec::unit(b), x);
        for (b2, d) in prod.iter() {
            out.add_scaled(&SparseVec::unit(t * n + b2), &(c * d));
        }
    }
    out
}

fn close_under(ctx: &ModuleContext, _free: &FreeModule, seeds: Vec<SparseVec>) -> Echelon {
    let mut ech = Echelon::new();
    let mut frontier = Vec::new();
    for s in seeds {
        if ech.insert(s.clone()) {
            frontier.push(s);
        }
    }
    while let Some(v) = frontier.pop() {
        for g in &ctx.alg_gens {
            let w = act_free(ctx, &v, g);
            if ech.insert(w.clone()) {
                frontier.push(w);
            }
        }
    }
    ech
}

/// A module to be resolved.
#[derive(Clone, Debug)]
pub enum ModuleInput {
    Explicit(RightModule),
    Embedded(Submodule),
}

impl ModuleInput {
    fn basis(&self) -> Vec<SparseVec> {
        match self {
            ModuleInput::Explicit(m) => (0..m.dim).map(SparseVec::unit).collect(),
            ModuleInput::Embedded(s) => s.basis.clone(),
        }
    }

    fn act(&self, ctx: &ModuleContext, v: &SparseVec, x: &SparseVec) -> SparseVec {
        match self {
            ModuleInput::Explicit(m) => {
                let mut out = SparseVec::zero();
                for (b, c) in x.iter() {
                    out.add_scaled(&sparse_mat_vec(&m.action[b], v), c);
                }
                out
            }
            ModuleInput::Embedded(_) => act_free(ctx, v, x),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ModuleInput::Explicit(m) => m.dim,
            ModuleInput::Embedded(s) => s.dim(),
        }
    }
}

/// One step `P -> M` of a minimal resolution.
#[derive(Clone, Debug)]
pub struct CoverStep {
    /// Multiplicity of each `P_i` in the cover.
    pub tops: Vec<usize>,
    /// `(vertex, image of e_vertex)` for each summand of the cover.
    pub generators: Vec<(usize, SparseVec)>,
    pub kernel: Submodule,
    /// Kernel lies in `P J`.
    pub minimal: bool,
    /// The cover is onto and the kernel has the complementary dimension.
    pub exact: bool,
}

/// `m_i = dim (M/MJ) e_i`.
pub fn top_multiplicities(ctx: &ModuleContext, m: &ModuleInput) -> Vec<usize> {
    let (tops, _) = tops_and_generators(ctx, m);
    tops
}

fn tops_and_generators(ctx: &ModuleContext, m: &ModuleInput) -> (Vec<usize>, Vec<(usize, SparseVec)>) {
    let basis = m.basis();
    // MJ: closure of {n g : g generating J} under the algebra generators
    let mut mj = Echelon::new();
    let mut frontier = Vec::new();
    for n in &basis {
        for g in &ctx.rad_gens {
            let w = m.act(ctx, n, g);
            if mj.insert(w.clone()) {
                frontier.push(w);
            }
        }
    }
    while let Some(v) = frontier.pop() {
        for g in &ctx.alg_gens {
            let w = m.act(ctx, &v, g);
            if mj.insert(w.clone()) {
                frontier.push(w);
            }
        }
    }
    let mj_rows: Vec<SparseVec> = mj.rows().into_iter().cloned().collect();
    let mut tops = vec![0; ctx.vertex_count()];
    let mut gens = Vec::new();
    for (i, &e) in ctx.algebra.idempotents().iter().enumerate() {
        let ev = SparseVec::unit(e);
        let mut ech = Echelon::from_vectors(mj_rows.iter().map(|r| m.act(ctx, r, &ev)).collect::<Vec<_>>().iter());
        for n in &basis {
            let ne = m.act(ctx, n, &ev);
            if ech.insert(ne.clone()) {
                tops[i] += 1;
                gens.push((i, ne));
            }
        }
    }
    (tops, gens)
}

/// Projective cover of `m` and its kernel.
pub fn projective_cover(ctx: &ModuleContext, m: &ModuleInput) -> Result<CoverStep> {
    let (tops, generators) = tops_and_generators(ctx, m);
    let n = ctx.dim_a();
    let free = FreeModule { vertices: generators.iter().map(|(v, _)| *v).collect() };
    let target_dim = match m {
        ModuleInput::Explicit(e) => e.dim,
        ModuleInput::Embedded(s) => s.free.vertices.len() * n,
    };
    let mut kernel = Vec::new();
    let mut rank = 0;
    for j in 0..ctx.vertex_count() {
        let mut dom = Vec::new();
        let mut cols = Vec::new();
        for (t, (v, g)) in generators.iter().enumerate() {
            for b in ctx.row_basis(*v).filter(|&b| ctx.right_type[b] == j) {
                dom.push(t * n + b);
                cols.push(m.act(ctx, g, &SparseVec::unit(b)));
            }
        }
        let k = sparse_kernel(&cols, target_dim);
        rank += cols.len() - k.len();
        for v in k {
            kernel.push(v.remap(|i| Some(dom[i])));
        }
    }
    let exact = rank == m.dim();
    let minimal = kernel.iter().all(|v| {
        let mut parts: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
        for (idx, c) in v.iter() {
            parts.entry(idx / n).or_default().push((idx % n, c.clone()));
        }
        parts.into_iter().all(|(t, p)| ctx.vertex_radical[free.vertices[t]].contains(&SparseVec::from_pairs(p)))
    });
    let ech = Echelon::from_vectors(kernel.iter());
    let kernel = Submodule { free, basis: ech.rows().into_iter().cloned().collect() };
    Ok(CoverStep { tops, generators, kernel, minimal, exact })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Finite(usize),
    ExceedsBound(usize),
}

impl Verdict {
    pub fn finite(&self) -> Option<usize> {
        match self {
            Verdict::Finite(d) => Some(*d),
            Verdict::ExceedsBound(_) => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Resolution {
    /// Multiplicities of `P_1..P_N` in each term, starting with the cover of the module.
    pub terms: Vec<Vec<usize>>,
    pub verdict: Verdict,
    pub minimal: bool,
    pub exact: bool,
    #[serde(skip)]
    pub generators: Vec<Vec<(usize, SparseVec)>>,
}

impl Resolution {
    pub fn pd(&self) -> Option<usize> {
        self.verdict.finite()
    }
}

pub fn default_bound(a: &FinAlgebra) -> usize {
    2 * a.dim()
}

/// Iterated projective covers until the syzygy vanishes or `bound` is exceeded.
pub fn minimal_resolution(ctx: &ModuleContext, m: &ModuleInput, bound: usize) -> Result<Resolution> {
    let mut terms = Vec::new();
    let mut generators = Vec::new();
    let mut minimal = true;
    let mut exact = true;
    if m.dim() == 0 {
        return Ok(Resolution { terms, verdict: Verdict::Finite(0), minimal, exact, generators });
    }
    let mut cur = m.clone();
    loop {
        let step = projective_cover(ctx, &cur)?;
        minimal &= step.minimal;
        exact &= step.exact;
        terms.push(step.tops);
        generators.push(step.generators);
        let stage = terms.len() - 1;
        if step.kernel.is_zero() {
            return Ok(Resolution { terms, verdict: Verdict::Finite(stage), minimal, exact, generators });
        }
        if stage >= bound {
            return Ok(Resolution { terms, verdict: Verdict::ExceedsBound(bound), minimal, exact, generators });
        }
        cur = ModuleInput::Embedded(step.kernel);
    }
}

pub fn simple_resolution(ctx: &ModuleContext, i: usize, bound: usize) -> Result<Resolution> {
    minimal_resolution(ctx, &ModuleInput::Explicit(RightModule::simple(ctx, i)), bound)
}

#[derive(Clone, Debug, Serialize)]
pub struct GlobalDimension {
    pub verdict: Verdict,
    pub simples: Vec<Resolution>,
}

/// Maximum projective dimension of the simple modules.
pub fn global_dimension(ctx: &ModuleContext, bound: usize) -> Result<GlobalDimension> {
    let simples: Vec<Resolution> =
        (0..ctx.vertex_count()).map(|i| simple_resolution(ctx, i, bound)).collect::<Result<_>>()?;
    let verdict = if simples.iter().any(|r| r.pd().is_none()) {
        Verdict::ExceedsBound(bound)
    } else {
        Verdict::Finite(simples.iter().filter_map(Resolution::pd).max().unwrap_or(0))
    };
    Ok(GlobalDimension { verdict, simples })
}

/// Same as [`global_dimension`], resolving the simples on separate threads.
pub fn global_dimension_parallel(ctx: &ModuleContext, bound: usize) -> Result<GlobalDimension> {
    let simples: Vec<Result<Resolution>> = std::thread::scope(|s| {
        let handles: Vec<_> =
            (0..ctx.vertex_count()).map(|i| s.spawn(move || simple_resolution(ctx, i, bound))).collect();
        handles.into_iter().map(|h| h.join().expect("resolution thread")).collect()
    });
    let simples: Vec<Resolution> = simples.into_iter().collect::<Result<_>>()?;
    let verdict = if simples.iter().any(|r| r.pd().is_none()) {
        Verdict::ExceedsBound(bound)
    } else {
        Verdict::Finite(simples.iter().filter_map(Resolution::pd).max().unwrap_or(0))
    };
    Ok(GlobalDimension { verdict, simples })
}

/// Graded Hom complex of right module maps `M -> N`; maps are flattened
/// row-major (`r * dim M + c`).
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub dim_m: usize,
    pub dim_n: usize,
    pub spaces: BTreeMap<i64, Vec<SparseVec>>,
    d_m: Option<RatMatrix>,
    d_n: Option<RatMatrix>,
}

pub fn hom_complex(a: &FinAlgebra, m: &RightModule, n: &RightModule) -> Result<HomComplex> {
    if m.action.len() != a.dim() || n.action.len() != a.dim() {
        return Err(Error::InvalidModule("modules over different algebras".into()));
    }
    let gens: Vec<usize> = (0..a.dim()).collect();
    let mut degs: Vec<i64> = Vec::new();
    for c in 0..m.dim {
        for r in 0..n.dim {
            degs.push(n.degree(r) - m.degree(c));
        }
    }
    degs.sort_unstable();
    degs.dedup();
    let mut spaces = BTreeMap::new();
    for q in degs {
        let vars: Vec<(usize, usize)> = (0..n.dim)
            .flat_map(|r| (0..m.dim).map(move |c| (r, c)))
            .filter(|&(r, c)| n.degree(r) - m.degree(c) == q)
            .collect();
        // constraint coordinates: (x, r, c) -> x * dim_n * dim_m + r * dim_m + c
        let block = n.dim * m.dim;
        let cols: Vec<SparseVec> = vars
            .iter()
            .map(|&(r, c)| {
                let mut v = Vec::new();
                for &x in &gens {
                    // (F A_M(x))[r][c'] gets A_M(x)[c][c']
                    for c2 in 0..m.dim {
                        let coef = &m.action[x][(c, c2)];
                        if !coef.is_zero() {
                            v.push((x * block + r * m.dim + c2, coef.clone()));
                        }
                    }
                    // -(A_N(x) F)[r'][c] gets -A_N(x)[r'][r]
                    for r2 in 0..n.dim {
                        let coef = &n.action[x][(r2, r)];
                        if !coef.is_zero() {
                            v.push((x * block + r2 * m.dim + c, -coef.clone()));
                        }
                    }
                }
                SparseVec::from_pairs(v)
            })
            .collect();
        let ker = sparse_kernel(&cols, gens.len() * block);
        let basis: Vec<SparseVec> = ker
            .into_iter()
            .map(|k| k.remap(|i| Some(vars[i].0 * m.dim + vars[i].1)))
            .collect();
        if !basis.is_empty() {
            spaces.insert(q, basis);
        }
    }
    Ok(HomComplex { dim_m: m.dim, dim_n: n.dim, spaces, d_m: m.differential.clone(), d_n: n.differential.clone() })
}

fn flat_to_matrix(v: &SparseVec, rows: usize, cols: usize) -> RatMatrix {
    let mut out = RatMatrix::zeros(rows, cols);
    for (i, c) in v.iter() {
        out[(i / cols, i % cols)] = c.clone();
    }
    out
}

fn matrix_to_flat(m: &RatMatrix) -> SparseVec {
    let mut pairs = Vec::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if !m[(r, c)].is_zero() {
                pairs.push((r * m.cols() + c, m[(r, c)].clone()));
            }
        }
    }
    SparseVec::from_pairs(pairs)
}

impl HomComplex {
    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.spaces.iter().map(|(q, b)| (*q, b.len())).collect()
    }

    /// `D(f) = d_N f - (-1)^q f d_M`.
    pub fn differential(&self, f: &SparseVec, q: i64) -> SparseVec {
        let fm = flat_to_matrix(f, self.dim_n, self.dim_m);
        let mut out = RatMatrix::zeros(self.dim_n, self.dim_m);
        if let Some(dn) = &self.d_n {
            out = dn.mul(&fm).expect("shapes");
        }
        if let Some(dm) = &self.d_m {
            let right = fm.mul(dm).expect("shapes");
            let s = if q.rem_euclid(2) == 0 { -Q::one() } else { Q::one() };
            for r in 0..self.dim_n {
                for c in 0..self.dim_m {
                    let x = &right[(r, c)] * &s;
                    out[(r, c)] += x;
                }
            }
        }
        matrix_to_flat(&out)
    }

    pub fn cohomology_dims(&self) -> BTreeMap<i64, usize> {
        let rank = |q: i64| -> usize {
            let Some(b) = self.spaces.get(&q) else { return 0 };
            let mut e = Echelon::new();
            for f in b {
                e.insert(self.differential(f, q));
            }
            e.rank()
        };
        self.spaces.iter().map(|(&q, b)| (q, b.len() - rank(q) - rank(q - 1))).collect()
    }
}

/// `End(⊕ M_p)` with composition `f·g = f ∘ g`, the grading by map degree and
/// differential `D`. Idempotents are left multiplication by the vertex idempotents
/// on each summand separately, or the summand's identity when no left action is known.
pub fn dg_endomorphism_algebra(a: &FinAlgebra, modules: &[RightModule]) -> Result<FinAlgebra> {
    for m in modules {
        m.validate(a)?;
    }
    let sum = RightModule::direct_sum(modules);
    let hom = hom_complex(a, &sum, &sum)?;
    let dim = sum.dim;
    let mut idems = Vec::new();
    let mut off = 0;
    for m in modules {
        let locals = m.left_idempotents.clone().unwrap_or_else(|| vec![RatMatrix::identity(m.dim)]);
        for l in &locals {
            let mut p = RatMatrix::zeros(dim, dim);
            for r in 0..m.dim {
                for c in 0..m.dim {
                    p[(off + r, off + c)] = l[(r, c)].clone();
                }
            }
            let v = matrix_to_flat(&p);
            if !v.is_zero() {
                idems.push(v);
            }
        }
        off += m.dim;
    }
    // basis: idempotents first in degree 0, then completions of every degree
    let mut basis: Vec<SparseVec> = Vec::new();
    let mut degree = Vec::new();
    let mut coords: BTreeMap<i64, (BasisCoords, usize)> = BTreeMap::new();
    for (&q, space) in &hom.spaces {
        let start = basis.len();
        let mut ech = Echelon::new();
        let mut chosen = Vec::new();
        if q == 0 {
            for e in &idems {
                if ech.insert(e.clone()) {
                    chosen.push(e.clone());
                }
            }
        }
        for f in space {
            if ech.insert(f.clone()) {
                chosen.push(f.clone());
            }
        }
        let bc = BasisCoords::new(&chosen, dim * dim)?;
        degree.extend(std::iter::repeat_n(q, chosen.len()));
        basis.extend(chosen);
        coords.insert(q, (bc, start));
    }
    let locate = |v: &SparseVec, q: i64| -> Result<SparseVec> {
        if v.is_zero() {
            return Ok(SparseVec::zero());
        }
        let (bc, start) = coords.get(&q).ok_or_else(|| Error::InvalidModule(format!("no maps of degree {q}")))?;
        let c = bc.coords(v).ok_or_else(|| Error::InvalidModule("composition left the Hom space".into()))?;
        Ok(c.remap(|i| Some(start + i)))
    };
    let n = basis.len();
    let mats: Vec<RatMatrix> = basis.iter().map(|v| flat_to_matrix(v, dim, dim)).collect();
    let mut mult = vec![vec![SparseVec::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let prod = matrix_to_flat(&mats[i].mul(&mats[j])?);
            mult[i][j] = locate(&prod, degree[i] + degree[j])?;
        }
    }
    let unit = locate(&matrix_to_flat(&RatMatrix::identity(dim)), 0)?;
    let idempotents: Vec<usize> = (0..idems.len()).collect();
    let labels: Vec<String> = (0..n)
        .map(|i| if i < idems.len() { format!("λ{}", i + 1) } else { format!("f{}", i + 1) })
        .collect();
    let mut out = FinAlgebra::from_table(labels, mult, unit, idempotents).with_grading(degree.clone());
    if sum.differential.is_some() {
        let d: Vec<SparseVec> =
            (0..n).map(|i| locate(&hom.differential(&basis[i], degree[i]), degree[i] + 1)).collect::<Result<_>>()?;
        out = out.with_differential(d);
    }
    Ok(out)
}

/// `R / (J^p)₋` for `p = 1..=count`, as right DG modules.
pub fn radical_layer_modules(a: &FinAlgebra, count: usize) -> Result<Vec<RightModule>> {
    let j = radical(a);
    let mut out = Vec::new();
    for p in 1..=count {
        let jp = crate::algebra::power_ideal(a, &j, p);
        let inner = crate::algebra::internal_ideal(a, &jp)?;
        out.push(RightModule::regular_quotient(a, inner.basis())?);
    }
    Ok(out)
}
