//! Named algebra families: Kronecker, Green, `K_ij[d]`, and the two-vertex
//! algebras `R_F` attached to a family of subspaces of the arrow space.

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::FinAlgebra;
use crate::error::{Error, Result};
use crate::exactmat::{format_rational, q, rref, subspace_intersection, Echelon, RatMatrix, SparseVec, Q};
use crate::quiver::{two_vertex_quiver, Path, Quiver, QuiverAlgebra, Relation};
use crate::twisted::{apply, canonical_product, canonical_product_over_s, check_isomorphism, RRing};

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// `K_n[d_1..d_n]`: `n` arrows `1 -> 2` with the given degrees (default 0).
pub fn kronecker(n: usize, degrees: &[i64]) -> Result<QuiverAlgebra> {
    kronecker_named(&numbered("c", n), degrees)
}

pub fn kronecker_named(names: &[String], degrees: &[i64]) -> Result<QuiverAlgebra> {
    if !degrees.is_empty() && degrees.len() != names.len() {
        return Err(Error::InvalidQuiver(format!("{} arrows but {} degrees", names.len(), degrees.len())));
    }
    QuiverAlgebra::path_algebra(two_vertex_quiver(names, &[], degrees, &[])?)
}

/// `K_n^op`: `n` arrows `2 -> 1`.
pub fn kronecker_op_named(names: &[String], degrees: &[i64]) -> Result<QuiverAlgebra> {
    if !degrees.is_empty() && degrees.len() != names.len() {
        return Err(Error::InvalidQuiver(format!("{} arrows but {} degrees", names.len(), degrees.len())));
    }
    QuiverAlgebra::path_algebra(two_vertex_quiver(&[], names, &[], degrees)?)
}

/// `K_ij[d]` on `vertices` vertices with `count` parallel arrows `i -> j` (1-based)
/// of degree `degree`.
pub fn kij(vertices: usize, i: usize, j: usize, count: usize, degree: i64, prefix: &str) -> Result<QuiverAlgebra> {
    if i == j || i == 0 || j == 0 || i > vertices || j > vertices {
        return Err(Error::InvalidQuiver(format!("K_{{{i}{j}}} needs distinct vertices in 1..={vertices}")));
    }
    let mut qv = Quiver::new(vertices);
    for t in 1..=count {
        let name = if count == 1 { prefix.to_string() } else { format!("{prefix}_{t}") };
        qv.add_arrow(&name, i - 1, j - 1, degree)?;
    }
    QuiverAlgebra::path_algebra(qv)
}

/// Green's algebra `G_k`: arrows `c_1..c_ceil(k/2)` (1 -> 2) and `b_1..b_floor(k/2)`
/// (2 -> 1), with `c_j b_i = 0` for `j <= i` and `b_i c_j = 0` for `i < j`.
pub fn green(k: usize) -> Result<QuiverAlgebra> {
    let nc = k.div_ceil(2);
    let nb = k / 2;
    let qv = two_vertex_quiver(&numbered("c", nc), &numbered("b", nb), &[], &[])?;
    let mut rels = Vec::new();
    for i in 1..=nb {
        for j in 1..=nc {
            if j <= i {
                rels.push(Relation::monomial(qv.parse_path(&format!("c{j}*b{i}"))?));
            }
            if i < j {
                rels.push(Relation::monomial(qv.parse_path(&format!("b{i}*c{j}"))?));
            }
        }
    }
    QuiverAlgebra::new(qv, &rels, k + 1)
}

/// Family of subspaces `V_1..V_m` (dim `k`) and `W_1..W_m` (dim `n-k`) of `C = ℚ^n`,
/// stored as column bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceFamily {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub v: Vec<RatMatrix>,
    pub w: Vec<RatMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GldimCriterion {
    Finite(usize),
    Infinite,
}

impl SubspaceFamily {
    pub fn new(n: usize, k: usize, v: Vec<RatMatrix>, w: Vec<RatMatrix>) -> Result<Self> {
        let m = v.len();
        if m == 0 || w.len() != m {
            return Err(Error::InvalidFamily(format!("{} V's and {} W's", v.len(), w.len())));
        }
        if k == 0 || k >= n {
            return Err(Error::InvalidFamily(format!("need 0 < k < n, got k = {k}, n = {n}")));
        }
        for (i, (vi, wi)) in v.iter().zip(&w).enumerate() {
            if vi.rows() != n || wi.rows() != n {
                return Err(Error::InvalidFamily(format!("subspace {} does not live in ℚ^{n}", i + 1)));
            }
            if vi.cols() != k || vi.rank() != k {
                return Err(Error::InvalidFamily(format!("V_{} is not {k}-dimensional", i + 1)));
            }
            if wi.cols() != n - k || wi.rank() != n - k {
                return Err(Error::InvalidFamily(format!("W_{} is not {}-dimensional", i + 1, n - k)));
            }
        }
        Ok(Self { n, m, k, v, w })
    }

    /// `t_ij = dim(V_i ∩ W_j)` (0-based indices).
    pub fn t(&self, i: usize, j: usize) -> usize {
        subspace_intersection(&self.v[i], &self.w[j]).expect("same ambient space").cols()
    }

    pub fn t_table(&self) -> Vec<Vec<usize>> {
        (0..self.m).map(|i| (0..self.m).map(|j| self.t(i, j)).collect()).collect()
    }

    pub fn is_generic(&self) -> bool {
        self.t_table().iter().flatten().all(|&t| t == 0)
    }

    /// Γ_F on vertices `b_1..b_m` (indices `0..m`) and `v_1..v_m` (`m..2m`).
    pub fn gamma_quiver(&self) -> Quiver {
        let m = self.m;
        let mut g = Quiver::new(2 * m);
        let t = self.t_table();
        for i in 0..m {
            g.add_arrow(&format!("bv{}", i + 1), i, m + i, 0).expect("valid vertex");
        }
        for i in 0..m {
            for j in 0..m {
                for s in 0..t[i][j] {
                    g.add_arrow(&format!("bb{}_{}_{}", i + 1, j + 1, s + 1), i, j, 0).expect("valid vertex");
                    g.add_arrow(&format!("vb{}_{}_{}", i + 1, j + 1, s + 1), m + i, j, 0).expect("valid vertex");
                }
            }
        }
        g
    }

    /// Global dimension read off Γ_F: longest path + 2, or infinite when Γ_F has an
    /// oriented cycle (loops included).
    pub fn gldim_by_criterion(&self) -> GldimCriterion {
        match self.gamma_quiver().longest_path() {
            Some(l) => GldimCriterion::Finite(l + 2),
            None => GldimCriterion::Infinite,
        }
    }

    /// Expected `(dim e1Re1, dim e1Re2, dim e2Re1, dim e2Re2)`.
    pub fn expected_peirce_dims(&self) -> [usize; 4] {
        let (n, m, k) = (self.n, self.m, self.k);
        [1 + m * (n - k), m, n + m * k * (n - k), 1 + m * k]
    }

    pub fn expected_dim(&self) -> usize {
        self.expected_peirce_dims().iter().sum()
    }

    /// The same family with subspace pairs `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut f = self.clone();
        f.v.swap(i, j);
        f.w.swap(i, j);
        f
    }

    pub fn without_last(&self) -> Option<Self> {
        if self.m < 2 {
            return None;
        }
        Some(Self {
            n: self.n,
            m: self.m - 1,
            k: self.k,
            v: self.v[..self.m - 1].to_vec(),
            w: self.w[..self.m - 1].to_vec(),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mat = |x: &RatMatrix| -> Vec<Vec<String>> {
            (0..x.rows()).map(|r| x.row(r).iter().map(format_rational).collect()).collect()
        };
        serde_json::json!({
            "n": self.n.to_string(), "m": self.m.to_string(), "k": self.k.to_string(),
            "V": self.v.iter().map(mat).collect::<Vec<_>>(),
            "W": self.w.iter().map(mat).collect::<Vec<_>>(),
        })
    }
}

/// The family with `V_i = ⟨a_i⟩` and `W_i = ⟨a_n..a_{i+1}, a_i - a_1..a_2 - a_1⟩`,
/// `k = 1`, `n = m`. For `m = 1` the ambient space is taken to be `ℚ²`, since
/// `k < n` forces `n >= 2`.
pub fn kk_family(m: usize) -> Result<SubspaceFamily> {
    if m == 0 {
        return Err(Error::InvalidFamily("m must be positive".into()));
    }
    let n = m.max(2);
    let a = |i: usize| -> Vec<Q> { (0..n).map(|r| if r == i { Q::one() } else { Q::zero() }).collect() };
    let mut vs = Vec::new();
    let mut ws = Vec::new();
    for i in 0..m {
        vs.push(RatMatrix::from_columns(n, &[a(i)]));
        let mut cols: Vec<Vec<Q>> = ((i + 1)..n).rev().map(a).collect();
        for l in (1..=i).rev() {
            cols.push(a(l).iter().zip(a(0)).map(|(x, y)| x - y).collect());
        }
        ws.push(RatMatrix::from_columns(n, &cols));
    }
    SubspaceFamily::new(n, 1, vs, ws)
}

/// A seeded family in general position: integer entries in `-3..=3`, resampled until
/// every `V_i ∩ W_j` is zero.
pub fn random_family(n: usize, m: usize, k: usize, seed: u64) -> Result<SubspaceFamily> {
    if k == 0 || k >= n || m == 0 {
        return Err(Error::InvalidFamily(format!("need 0 < k < n and m > 0 (n={n}, m={m}, k={k})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |cols: usize, rng: &mut ChaCha8Rng| -> RatMatrix {
        loop {
            let data: Vec<Vec<Q>> = (0..cols).map(|_| (0..n).map(|_| q(rng.gen_range(-3..=3))).collect()).collect();
            let mtx = RatMatrix::from_columns(n, &data);
            if mtx.rank() == cols {
                return mtx;
            }
        }
    };
    for _ in 0..10_000 {
        let v: Vec<RatMatrix> = (0..m).map(|_| sample(k, &mut rng)).collect();
        let w: Vec<RatMatrix> = (0..m).map(|_| sample(n - k, &mut rng)).collect();
        let f = SubspaceFamily::new(n, k, v, w)?;
        if f.is_generic() {
            return Ok(f);
        }
    }
    Err(Error::InvalidFamily("could not sample a family in general position".into()))
}

/// `R_F`: arrows `c_1..c_n` (1 -> 2), `b_1..b_m` (2 -> 1) with `b c b' = 0`,
/// `w b_i = 0` for `w ∈ W_i` and `b_i v = 0` for `v ∈ V_i`.
pub fn r_family(f: &SubspaceFamily) -> Result<QuiverAlgebra> {
    let (qv, rels) = r_family_relations(f)?;
    QuiverAlgebra::general(qv, &rels, 4)
}

/// The quiver of `R_𝔉` with the relations `b c b' = 0`, `W_i b_i = 0`, `b_i V_i = 0`.
pub fn r_family_relations(f: &SubspaceFamily) -> Result<(Quiver, Vec<Relation>)> {
    let qv = two_vertex_quiver(&numbered("c", f.n), &numbered("b", f.m), &[], &[])?;
    let c = |j: usize| qv.arrow_index(&format!("c{}", j + 1)).expect("arrow");
    let b = |i: usize| qv.arrow_index(&format!("b{}", i + 1)).expect("arrow");
    let path = |arrows: Vec<usize>| -> Result<Path> { qv.path_from_arrows(arrows) };
    let mut rels = Vec::new();
    for i in 0..f.m {
        for j in 0..f.n {
            for l in 0..f.m {
                rels.push(Relation::monomial(path(vec![b(i), c(j), b(l)])?));
            }
        }
    }
    for i in 0..f.m {
        for col in 0..f.w[i].cols() {
            let terms = (0..f.n)
                .filter(|&j| !f.w[i][(j, col)].is_zero())
                .map(|j| Ok((f.w[i][(j, col)].clone(), path(vec![c(j), b(i)])?)))
                .collect::<Result<Vec<_>>>()?;
            rels.push(Relation { terms });
        }
        for col in 0..f.v[i].cols() {
            let terms = (0..f.n)
                .filter(|&j| !f.v[i][(j, col)].is_zero())
                .map(|j| Ok((f.v[i][(j, col)].clone(), path(vec![b(i), c(j)])?)))
                .collect::<Result<Vec<_>>>()?;
            rels.push(Relation { terms });
        }
    }
    Ok((qv, rels))
}

/// One tensor factor of a generalized Green algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GreenFactor {
    /// `K_p[d]`: `arrows` arrows `1 -> 2` named `name` or `name_t`.
    Kronecker { arrows: usize, degree: i64, name: String },
    /// `K_p^op[d]`: `arrows` arrows `2 -> 1`.
    KroneckerOp { arrows: usize, degree: i64, name: String },
    /// `K_ij[d]` on `vertices` vertices, 1-based `i -> j`.
    Elementary { vertices: usize, i: usize, j: usize, count: usize, degree: i64, name: String },
}

impl GreenFactor {
    pub fn vertex_count(&self) -> usize {
        match self {
            GreenFactor::Elementary { vertices, .. } => *vertices,
            _ => 2,
        }
    }

    pub fn arrow_count(&self) -> usize {
        match self {
            GreenFactor::Kronecker { arrows, .. } | GreenFactor::KroneckerOp { arrows, .. } => *arrows,
            GreenFactor::Elementary { count, .. } => *count,
        }
    }

    pub fn algebra(&self) -> Result<FinAlgebra> {
        let names = |name: &str, n: usize| -> Vec<String> {
            if n == 1 {
                vec![name.to_string()]
            } else {
                (1..=n).map(|t| format!("{name}_{t}")).collect()
            }
        };
        Ok(match self {
            GreenFactor::Kronecker { arrows, degree, name } => {
                kronecker_named(&names(name, *arrows), &vec![*degree; *arrows])?.into_algebra()
            }
            GreenFactor::KroneckerOp { arrows, degree, name } => {
                kronecker_op_named(&names(name, *arrows), &vec![*degree; *arrows])?.into_algebra()
            }
            GreenFactor::Elementary { vertices, i, j, count, degree, name } => {
                kij(*vertices, *i, *j, *count, *degree, name)?.into_algebra()
            }
        })
    }
}

/// `F_1 ⊗^v_S F_2 ⊗^v_S ... ⊗^v_S F_r`, built left to right, with every
/// intermediate product kept.
#[derive(Clone, Debug)]
pub struct IteratedProduct {
    pub factors: Vec<FinAlgebra>,
    /// `partials[t] = F_1 ⊗ ... ⊗ F_{t+1}`.
    pub partials: Vec<FinAlgebra>,
}

impl IteratedProduct {
    pub fn algebra(&self) -> &FinAlgebra {
        self.partials.last().expect("at least one factor")
    }

    pub fn into_algebra(mut self) -> FinAlgebra {
        self.partials.pop().expect("at least one factor")
    }
}

/// Iterated canonical twisted product over `S = ℚ^N` of the given algebras.
pub fn iterated_product(factors: Vec<FinAlgebra>) -> Result<IteratedProduct> {
    let first = factors.first().ok_or_else(|| Error::InvalidAlgebra("no factors".into()))?;
    let mut ring = RRing::over_semisimple(first.clone())?;
    let mut partials = vec![first.clone()];
    for f in &factors[1..] {
        if f.vertex_count() != ring.base.vertex_count() {
            return Err(Error::InvalidAlgebra("factors on different vertex sets".into()));
        }
        let prod = canonical_product(&ring, &RRing::over_semisimple(f.clone())?, None)?;
        partials.push(prod.algebra);
        ring = prod.ring;
    }
    Ok(IteratedProduct { factors, partials })
}

/// Generalized Green algebra: the iterated canonical product of the factors in
/// the order given. Factors without arrows are the base itself and are skipped.
pub fn generalized_green(factors: &[GreenFactor]) -> Result<IteratedProduct> {
    let nv = factors.first().map_or(2, GreenFactor::vertex_count);
    let algs: Vec<FinAlgebra> =
        factors.iter().filter(|f| f.arrow_count() > 0).map(GreenFactor::algebra).collect::<Result<_>>()?;
    if algs.is_empty() {
        return iterated_product(vec![FinAlgebra::semisimple(nv)]);
    }
    iterated_product(algs)
}

/// `⟨p_n, q_n, ..., p_1, q_1⟩ = K_{p_n}^op ⊗ K_{q_n} ⊗ ... ⊗ K_{p_1}^op ⊗ K_{q_1}`,
/// given as `[(p_n, q_n), ..., (p_1, q_1)]`. Arrows of the `i`-th pair are named
/// `b{i}` and `c{i}`.
pub fn generalized_green_pairs(pq: &[(usize, usize)]) -> Result<IteratedProduct> {
    let n = pq.len();
    let mut factors = Vec::new();
    for (t, &(p, q)) in pq.iter().enumerate() {
        let i = n - t;
        factors.push(GreenFactor::KroneckerOp { arrows: p, degree: 0, name: format!("b{i}") });
        factors.push(GreenFactor::Kronecker { arrows: q, degree: 0, name: format!("c{i}") });
    }
    generalized_green(&factors)
}

/// `E_[p,q;δ] = K_p^op ⊗ K_1 ⊗ K_1^op[δ] ⊗ K_q`.
pub fn e_family(p: usize, q: usize, delta: i64) -> Result<IteratedProduct> {
    generalized_green(&[
        GreenFactor::KroneckerOp { arrows: p, degree: 0, name: "b2".into() },
        GreenFactor::Kronecker { arrows: 1, degree: 0, name: "c2".into() },
        GreenFactor::KroneckerOp { arrows: 1, degree: delta, name: "b1".into() },
        GreenFactor::Kronecker { arrows: q, degree: 0, name: "c1".into() },
    ])
}

/// `dim e_j A e_i` for 0-based vertices, indexed `[j][i]`.
pub fn peirce_dims(a: &FinAlgebra) -> Vec<Vec<usize>> {
    let nv = a.vertex_count();
    let mut out = vec![vec![0; nv]; nv];
    for b in 0..a.dim() {
        if let Some((j, i)) = a.peirce_type(b) {
            out[j][i] += 1;
        }
    }
    out
}

/// Element `Σ x_j c_j` of an algebra whose arrows are labelled `c1..cn`.
pub fn arrow_combination(a: &FinAlgebra, prefix: &str, coeffs: &[Q]) -> Result<SparseVec> {
    let mut v = SparseVec::zero();
    for (j, x) in coeffs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let label = format!("{prefix}{}", j + 1);
        let idx = a.index_of(&label).ok_or_else(|| Error::Other(format!("no basis element `{label}`")))?;
        v.add_scaled(&SparseVec::unit(idx), x);
    }
    Ok(v)
}

/// Subspaces `V, W ⊂ C` of dimensions `k`, `n - k` with `V ⊕ W = C`, `V ∩ W_i = 0`
/// and `W ∩ V_i = 0` for every `i`, sampled from a seeded generator and checked.
pub fn decomposition_spaces(f: &SubspaceFamily, seed: u64) -> Result<(RatMatrix, RatMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.n;
    let mut sample = |cols: usize| -> RatMatrix {
        let data: Vec<Vec<Q>> = (0..cols).map(|_| (0..n).map(|_| q(rng.gen_range(-3..=3))).collect()).collect();
        RatMatrix::from_columns(n, &data)
    };
    let meets = |x: &RatMatrix, y: &RatMatrix| subspace_intersection(x, y).map(|i| i.cols() > 0);
    for _ in 0..10_000 {
        let (v, w) = (sample(f.k), sample(n - f.k));
        if v.rank() != f.k || w.rank() != n - f.k || v.hstack(&w)?.rank() != n {
            continue;
        }
        let mut ok = true;
        for i in 0..f.m {
            if meets(&v, &f.w[i])? || meets(&w, &f.v[i])? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok((v, w));
        }
    }
    Err(Error::InvalidFamily("no complements found".into()))
}

/// Checks the decompositions of the four Peirce spaces of `R_F`:
/// `e1Re1 = ⟨e1⟩ ⊕ ⊕ b_j W`, `e1Re2 = B`, `e2Re1 = C ⊕ ⊕ V b_j W` and
/// `e2Re2 = ⟨e2⟩ ⊕ ⊕ V b_j`.
pub fn verify_decomposition(f: &SubspaceFamily, a: &FinAlgebra, v: &RatMatrix, w: &RatMatrix) -> Result<()> {
    let e = |i: usize| SparseVec::unit(a.idempotents()[i]);
    let combo = |m: &RatMatrix, col: usize| arrow_combination(a, "c", &m.column(col));
    let b = |j: usize| -> Result<SparseVec> { arrow_combination(a, "b", &unit_coeffs(f.m, j)) };
    let vs: Vec<SparseVec> = (0..v.cols()).map(|t| combo(v, t)).collect::<Result<_>>()?;
    let ws: Vec<SparseVec> = (0..w.cols()).map(|t| combo(w, t)).collect::<Result<_>>()?;
    let cs: Vec<SparseVec> =
        (0..f.n).map(|j| arrow_combination(a, "c", &unit_coeffs(f.n, j))).collect::<Result<_>>()?;
    let bs: Vec<SparseVec> = (0..f.m).map(b).collect::<Result<_>>()?;
    let mut s11 = vec![e(0)];
    let mut s21 = cs;
    let mut s22 = vec![e(1)];
    for bj in &bs {
        for x in &ws {
            s11.push(a.mul(bj, x));
            for y in &vs {
                s21.push(a.mul(y, &a.mul(bj, x)));
            }
        }
        for y in &vs {
            s22.push(a.mul(y, bj));
        }
    }
    let expected = f.expected_peirce_dims();
    let pieces = [(s11, (0, 0), expected[0]), (bs, (0, 1), expected[1]), (s21, (1, 0), expected[2]), (s22, (1, 1), expected[3])];
    for (span, (j, i), want) in pieces {
        let rank = Echelon::from_vectors(span.iter()).rank();
        let have = a.peirce_space(j, i).len();
        if span.len() != want || rank != want || have != want {
            return Err(Error::InvalidFamily(format!(
                "e{}Re{}: {} spanning vectors of rank {rank}, space of dimension {have}, expected {want}",
                j + 1,
                i + 1,
                span.len()
            )));
        }
    }
    Ok(())
}

fn unit_coeffs(n: usize, j: usize) -> Vec<Q> {
    (0..n).map(|r| if r == j { Q::one() } else { Q::zero() }).collect()
}

/// Multiplicities `(a, b)` with `M ≅ (K e1)^a ⊕ (K e2)^b` for an algebra `M` viewed as
/// a left module over the Kronecker algebra `K` through `eps` (images of
/// `e1, e2, x_1..x_k`). Such a module is projective exactly when the arrows act
/// jointly injectively `(e1 M)^k -> e2 M`.
pub fn left_kronecker_projective(m: &FinAlgebra, eps: &[SparseVec], k: usize) -> Result<(usize, usize)> {
    let left = |x: usize, i: usize| m.mul(&eps[i], &SparseVec::unit(x)) == SparseVec::unit(x);
    let e1m: Vec<usize> = (0..m.dim()).filter(|&x| left(x, 0)).collect();
    let e2m = (0..m.dim()).filter(|&x| left(x, 1)).count();
    if e1m.len() + e2m != m.dim() {
        return Err(Error::InvalidModule("basis is not adapted to e1, e2".into()));
    }
    let images: Vec<SparseVec> = (0..k)
        .flat_map(|t| e1m.iter().map(move |&x| (t, x)))
        .map(|(t, x)| m.mul(&eps[2 + t], &SparseVec::unit(x)))
        .collect();
    let rank = Echelon::from_vectors(images.iter()).rank();
    if rank != k * e1m.len() {
        return Err(Error::InvalidModule(format!("arrows act with rank {rank} < {} on e1 M", k * e1m.len())));
    }
    Ok((e1m.len(), e2m - rank))
}

/// Outcome of rebuilding `R_F` as `(K(V_m) ⊗^v_S K_1^op) ⊗^v_{K(V_m)} R_G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwProdCheck {
    /// `order[i]` is the original index of the pair placed at position `i`.
    pub order: Vec<usize>,
    pub dim: usize,
    pub k_v_1_dim: usize,
    /// `R_G ≅ (K e1)^a ⊕ (K e2)^b` as a left `K(V_m)`-module.
    pub left_projective: (usize, usize),
}

/// Rebuilds `R_F` as an iterated twisted product and verifies that the map on
/// generators (`c_j ↦ 1 ⊗ c_j`, `b_i ↦ 1 ⊗ b_i` for `i < m`, `b_m ↦ b ⊗ 1`) is a
/// bijective homomorphism. Pairs are renumbered so that `V_m ∩ W_i = 0` for all `i`.
pub fn twprod_reconstruction(f: &SubspaceFamily) -> Result<TwProdCheck> {
    let t = f.t_table();
    let last = (0..f.m)
        .find(|&i| t[i].iter().all(|&x| x == 0))
        .ok_or_else(|| Error::InvalidFamily("every V_i meets some W_j; Γ_F has an oriented cycle".into()))?;
    twprod_reconstruction_with_last(f, last)
}

/// [`twprod_reconstruction`] with pair `last` (0-based) moved to position `m`,
/// without checking `V_last ∩ W_i = 0`.
pub fn twprod_reconstruction_with_last(f: &SubspaceFamily, last: usize) -> Result<TwProdCheck> {
    if last >= f.m {
        return Err(Error::InvalidFamily(format!("no pair {}", last + 1)));
    }
    let order: Vec<usize> = (0..f.m).filter(|&i| i != last).chain([last]).collect();
    let fp = SubspaceFamily {
        n: f.n,
        m: f.m,
        k: f.k,
        v: order.iter().map(|&i| f.v[i].clone()).collect(),
        w: order.iter().map(|&i| f.w[i].clone()).collect(),
    };
    let (vm, wm) = (&fp.v[f.m - 1], &fp.w[f.m - 1]);

    let kv = kronecker_named(&numbered("v", f.k), &[])?;
    let kv_alg = kv.algebra().clone();
    let rg = match fp.without_last() {
        Some(g) => r_family(&g)?,
        None => kronecker(f.n, &[])?,
    };
    let rg_alg = rg.algebra().clone();
    let idem = |a: &FinAlgebra| -> Vec<SparseVec> { a.idempotents().iter().map(|&e| SparseVec::unit(e)).collect() };

    // ε: v_t ↦ Σ_j (V_m)_{jt} c_j
    let v_images: Vec<SparseVec> =
        (0..f.k).map(|col| arrow_combination(&rg_alg, "c", &vm.column(col))).collect::<Result<_>>()?;
    let eps = kv.induced_map(&rg_alg, &idem(&rg_alg), &v_images)?;
    // π: c_j ↦ its V_m-component in C = V_m ⊕ W_m, b_i ↦ 0
    let basis = vm.hstack(wm)?.hstack(&RatMatrix::identity(f.n))?;
    let (red, _, _) = rref(&basis);
    let mut arrow_pi = Vec::new();
    for arrow in rg.quiver().arrows() {
        let img = match arrow.name.strip_prefix('c').and_then(|s| s.parse::<usize>().ok()) {
            Some(j) => {
                let coeffs: Vec<Q> = (0..f.k).map(|r| red[(r, f.n + j - 1)].clone()).collect();
                arrow_combination(&kv_alg, "v", &coeffs)?
            }
            None => SparseVec::zero(),
        };
        arrow_pi.push(img);
    }
    let pi = rg.induced_map(&kv_alg, &idem(&kv_alg), &arrow_pi)?;
    let mut eps_full = idem(&rg_alg);
    eps_full.extend(v_images.iter().cloned());
    let left_projective = left_kronecker_projective(&rg_alg, &eps_full, f.k)?;
    let rg_ring = RRing::new(rg_alg, kv_alg.clone(), eps, Some(pi))?;

    // K(V_m; 1) = K(V_m) ⊗^v_S K_1^op, a K(V_m)-ring augmented by a ⊗ b ↦ a π(b)
    let k1op = kronecker_op_named(&["b".to_string()], &[])?.into_algebra();
    let kv1 = canonical_product_over_s(&kv_alg, &k1op)?;
    let pa = kv1.p_a.clone().ok_or_else(|| Error::MissingAugmentation("K(V_m; 1)".into()))?;
    let kv1_ring = RRing::new(kv1.algebra.clone(), kv_alg, kv1.i_a.clone(), Some(pa))?;
    let prod = canonical_product(&kv1_ring, &rg_ring, None)?;

    let rf = r_family(f)?;
    let b_m = apply(&prod.i_a, &kv1.i_b[k1op.index_of("b").expect("arrow b")]);
    let mut arrow_images = Vec::new();
    for arrow in rf.quiver().arrows() {
        let img = if arrow.name.starts_with('c') {
            apply(&prod.i_b, &rg.element(&arrow.name)?)
        } else {
            let orig: usize = arrow.name[1..].parse::<usize>().expect("arrow b_i") - 1;
            let pos = order.iter().position(|&i| i == orig).expect("permutation");
            if pos == f.m - 1 {
                b_m.clone()
            } else {
                apply(&prod.i_b, &rg.element(&format!("b{}", pos + 1))?)
            }
        };
        arrow_images.push(img);
    }
    let map = rf.induced_map(&prod.algebra, &idem(&prod.algebra), &arrow_images)?;
    check_isomorphism(rf.algebra(), &prod.algebra, &map, "R_F -> (K(V_m) ⊗ K_1^op) ⊗ R_G")?;
    Ok(TwProdCheck { order, dim: prod.algebra.dim(), k_v_1_dim: kv1.algebra.dim(), left_projective })
}

/// `K_n[d_1..d_n] ≅ K_1[d_n] ⊗^v_S K_{n-1}[d_1..d_{n-1}]` via `c_n ↦ c ⊗ 1`,
/// `c_j ↦ 1 ⊗ c_j`, checked as a bijective homomorphism.
pub fn verify_kronecker_split(degrees: &[i64]) -> Result<()> {
    let n = degrees.len();
    if n == 0 {
        return Err(Error::InvalidQuiver("K_0 has no arrow to split off".into()));
    }
    let first = kronecker_named(&["c".to_string()], &degrees[n - 1..])?;
    let rest = kronecker(n - 1, &degrees[..n - 1])?;
    let prod = canonical_product_over_s(first.algebra(), rest.algebra())?;
    let kn = kronecker(n, degrees)?;
    let mut arrows = Vec::new();
    for j in 1..n {
        arrows.push(apply(&prod.i_b, &rest.element(&format!("c{j}"))?));
    }
    arrows.push(apply(&prod.i_a, &first.element("c")?));
    iso_on_generators(&kn, &prod.algebra, &arrows, "K_n -> K_1 ⊗ K_{n-1}")
}

/// `G_{2n+1} ≅ K_1 ⊗^v_S G_{2n}` (new arrow `c_{n+1}`) and
/// `G_{2n} ≅ K_1^op ⊗^v_S G_{2n-1}` (new arrow `b_n`), for `k >= 1`.
pub fn verify_green_step(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidQuiver("G_0 is not a product".into()));
    }
    let prev = green(k - 1)?;
    let (first, new_arrow) = if k % 2 == 1 {
        (kronecker_named(&["x".to_string()], &[])?, format!("c{}", k.div_ceil(2)))
    } else {
        (kronecker_op_named(&["x".to_string()], &[])?, format!("b{}", k / 2))
    };
    let prod = canonical_product_over_s(first.algebra(), prev.algebra())?;
    let gk = green(k)?;
    let mut arrows = Vec::new();
    for arrow in gk.quiver().arrows() {
        arrows.push(if arrow.name == new_arrow {
            apply(&prod.i_a, &first.element("x")?)
        } else {
            apply(&prod.i_b, &prev.element(&arrow.name)?)
        });
    }
    iso_on_generators(&gk, &prod.algebra, &arrows, "G_k -> K_1 ⊗ G_{k-1}")
}

fn iso_on_generators(src: &QuiverAlgebra, tgt: &FinAlgebra, arrows: &[SparseVec], what: &str) -> Result<()> {
    let idem: Vec<SparseVec> = tgt.idempotents().iter().map(|&e| SparseVec::unit(e)).collect();
    let map = src.induced_map(tgt, &idem, arrows)?;
    check_isomorphism(src.algebra(), tgt, &map, what)
}

/// A seeded graded quiver algebra on `vertices` vertices: up to two arrows `i -> j`
/// for each `i < j`, degrees in `-1..=1`, and random homogeneous relations among
/// paths of length 2. Used to produce random augmented S-split algebras.
pub fn random_quiver_algebra(vertices: usize, seed: u64) -> Result<QuiverAlgebra> {
    if vertices < 2 {
        return Err(Error::InvalidQuiver("need at least two vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut qv = Quiver::new(vertices);
    let mut count = 0;
    for i in 0..vertices {
        for j in (i + 1)..vertices {
            for _ in 0..rng.gen_range(0..=2) {
                count += 1;
                qv.add_arrow(&format!("x{count}"), i, j, rng.gen_range(-1..=1))?;
            }
        }
    }
    if count == 0 {
        qv.add_arrow("x1", 0, 1, 0)?;
    }
    let mut groups: std::collections::BTreeMap<(usize, usize, i64), Vec<Path>> = Default::default();
    for p in qv.paths_up_to(2).into_iter().filter(|p| p.len() == 2) {
        let deg: i64 = p.arrows.iter().map(|&a| qv.arrow(a).degree).sum();
        groups.entry((p.source, p.target, deg)).or_default().push(p);
    }
    let mut rels = Vec::new();
    for paths in groups.values() {
        if rng.gen_bool(0.5) {
            let terms: Vec<(Q, Path)> =
                paths.iter().map(|p| (q(rng.gen_range(-2..=2)), p.clone())).filter(|(c, _)| !c.is_zero()).collect();
            if !terms.is_empty() {
                rels.push(Relation { terms });
            }
        }
    }
    let bound = qv.longest_path().expect("acyclic") + 1;
    QuiverAlgebra::general(qv, &rels, bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn green_three_dimension() {
        let g = green(3).unwrap();
        assert_eq!(g.dim(), 8);
        assert_eq!(g.longest_nonzero_path(), 3);
        assert!(g.algebra().validate().is_valid());
        assert_eq!(green(0).unwrap().dim(), 2);
        assert_eq!(green(1).unwrap().dim(), kronecker(1, &[]).unwrap().dim());
    }

    #[test]
    fn kronecker_dims() {
        assert_eq!(kronecker(2, &[]).unwrap().dim(), 4);
        assert_eq!(kronecker(0, &[]).unwrap().dim(), 2);
    }

    #[test]
    fn r_family_small_dimension() {
        let f = random_family(2, 1, 1, 7).unwrap();
        let r = r_family(&f).unwrap();
        assert_eq!(r.dim(), 8);
        assert_eq!(f.expected_dim(), 8);
        let d = peirce_dims(r.algebra());
        let e = f.expected_peirce_dims();
        assert_eq!([d[0][0], d[0][1], d[1][0], d[1][1]], e);
    }

    #[test]
    fn kk_gamma() {
        let f = kk_family(2).unwrap();
        assert_eq!(f.t_table(), vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(f.gldim_by_criterion(), GldimCriterion::Finite(5));
        assert_eq!(kk_family(1).unwrap().gldim_by_criterion(), GldimCriterion::Finite(3));
    }

    #[test]
    fn degenerate_family_has_cycle() {
        let mut f = random_family(2, 1, 1, 3).unwrap();
        f.w[0] = f.v[0].clone();
        assert_eq!(f.t(0, 0), 1);
        assert_eq!(f.gldim_by_criterion(), GldimCriterion::Infinite);
    }

    #[test]
    fn pairs_of_ones_give_green() {
        for n in 1..=3 {
            let pq = vec![(1, 1); n];
            let g = generalized_green_pairs(&pq).unwrap();
            let target = green(2 * n).unwrap();
            assert_eq!(g.algebra().dim(), target.dim());
            assert_eq!(peirce_dims(g.algebra()), peirce_dims(target.algebra()));
            let mut odd = pq.clone();
            odd[0].0 = 0;
            let g = generalized_green_pairs(&odd).unwrap();
            assert_eq!(g.algebra().dim(), green(2 * n - 1).unwrap().dim());
        }
    }

    #[test]
    fn random_family_is_deterministic() {
        assert_eq!(random_family(3, 2, 1, 11).unwrap(), random_family(3, 2, 1, 11).unwrap());
    }
}
