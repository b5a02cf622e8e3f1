//! Euler matrices of S-split (DG) algebras, their behaviour under twisted
//! products, and realization of `SL(n, ℤ)` matrices by generalized Green algebras.

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::FinAlgebra;
use crate::error::{Error, Result};
use crate::exactmat::IntMatrix;
use crate::families::{generalized_green, GreenFactor, IteratedProduct};

/// `Χ_ij = Σ_l (-1)^l dim e_j A^l e_i`.
pub fn chi_matrix(a: &FinAlgebra) -> Result<IntMatrix> {
    let n = a.vertex_count();
    let mut chi = IntMatrix::zeros(n, n);
    for b in 0..a.dim() {
        let (j, i) = a
            .peirce_type(b)
            .ok_or_else(|| Error::NotSplit(format!("basis element {} is not in any e_j A e_i", a.label(b))))?;
        if a.degree(b).rem_euclid(2) == 0 {
            chi[(i, j)] += 1;
        } else {
            chi[(i, j)] -= 1;
        }
    }
    Ok(chi)
}

/// `(Χ^{-1})^t`, the matrix of the Euler form in the basis of simples.
pub fn chi_inverse_transpose(chi: &IntMatrix) -> Result<IntMatrix> {
    Ok(chi.inverse_unimodular()?.transpose())
}

/// `Χ_C = Χ_B · Χ_A`.
pub fn verify_chi_multiplicative(a: &FinAlgebra, b: &FinAlgebra, c: &FinAlgebra) -> Result<bool> {
    Ok(chi_matrix(c)? == chi_matrix(b)?.mul(&chi_matrix(a)?)?)
}

/// Every intermediate product of an iterated construction satisfies
/// `Χ(P_t ⊗ F_{t+1}) = Χ(F_{t+1}) · Χ(P_t)`.
pub fn verify_iterated_chi(p: &IteratedProduct) -> Result<bool> {
    for t in 1..p.partials.len() {
        if !verify_chi_multiplicative(&p.partials[t - 1], &p.factors[t], &p.partials[t])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(E_ij^ε)^count = I + ε·count·E_ij`, with 0-based `i != j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transvection {
    pub i: usize,
    pub j: usize,
    pub sign: i8,
    pub count: usize,
}

impl Transvection {
    pub fn matrix(&self, n: usize) -> IntMatrix {
        IntMatrix::transvection(n, self.i, self.j, &(BigInt::from(self.sign) * BigInt::from(self.count)))
    }

    fn from_lambda(i: usize, j: usize, lambda: &BigInt) -> Option<Self> {
        if lambda.is_zero() {
            return None;
        }
        let count = lambda.abs().to_usize().expect("transvection multiplicity fits in usize");
        Some(Self { i, j, sign: if lambda.is_positive() { 1 } else { -1 }, count })
    }

    fn inverse(&self) -> Self {
        Self { sign: -self.sign, ..self.clone() }
    }
}

/// Ordered product of the word.
pub fn word_product(n: usize, word: &[Transvection]) -> IntMatrix {
    word.iter().fold(IntMatrix::identity(n), |acc, t| acc.mul(&t.matrix(n)).expect("square"))
}

fn check_sl(m: &IntMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSpecialLinear("matrix is not square".into()));
    }
    if m.det()? != BigInt::one() {
        return Err(Error::NotSpecialLinear("determinant is not 1".into()));
    }
    Ok(())
}

/// Expansion budget for one search in [`factor_sl_compact`].
const SEARCH_LIMIT: usize = 20_000;
/// Each search ranks states by `bound + w·Σ|m'|`; the cheapest word over these
/// weights wins. Larger weights head for the identity more greedily.
const PROGRESS_WEIGHTS: &[i128] = &[2, 5, 10, 30, 100];

/// A transvection word for `m` chosen to keep `realization_dims` small.
///
/// Best-first searches over ways of peeling transvections off either end of `m`.
/// With `L` and `R` the absolute products of the peeled left and right words,
/// the final dimension is at least `sum(L·|m'|·R)` for the remaining `m'`. This
/// bound never decreases along a peel and is exact once `m'` is the identity.
/// States are ranked by the bound plus a weighted pull toward the identity. Peel multipliers are `±1` and the quotients of matching
/// row or column entries. Falls back to [`factor_sl`] when no word is found or
/// entries are too large.
pub fn factor_sl_compact(m: &IntMatrix) -> Result<Vec<Transvection>> {
    check_sl(m)?;
    let n = m.rows();
    let limit = BigInt::from(1_000_000);
    if n < 2 || m.max_abs() > limit {
        return factor_sl(m);
    }
    let start: Vec<i64> = m.to_rows().iter().flatten().map(|x| x.to_i64().expect("bounded")).collect();
    let mut best: Option<(BigInt, Vec<Transvection>)> = None;
    for &w in PROGRESS_WEIGHTS {
        if let Some(word) = compact_search(n, start.clone(), w) {
            let cost: BigInt = realization_dims(n, &word).to_rows().into_iter().flatten().sum();
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((cost, word));
            }
        }
    }
    match best {
        Some((_, word)) if word_product(n, &word) == *m => Ok(word),
        _ => factor_sl(m),
    }
}

#[derive(Clone, Copy)]
struct Peel {
    left: bool,
    i: usize,
    j: usize,
    lambda: i64,
}

struct Node {
    cur: Vec<i64>,
    u: Vec<i64>,
    v: Vec<i64>,
    parent: Option<(usize, Peel)>,
}

fn bound_of(n: usize, cur: &[i64], u: &[i64], v: &[i64]) -> i128 {
    let mut s = 0i128;
    for r in 0..n {
        for c in 0..n {
            s += u[r] as i128 * cur[r * n + c].unsigned_abs() as i128 * v[c] as i128;
        }
    }
    s
}

/// Tie-breaker: among equal bounds, expand the state closest to the identity.
fn residual(cur: &[i64]) -> u64 {
    cur.iter().map(|x| x.unsigned_abs()).sum()
}

fn peel_candidates(n: usize, cur: &[i64]) -> Vec<Peel> {
    let mut out = Vec::new();
    let mut push = |left: bool, i: usize, j: usize, lambda: i64| {
        if lambda != 0 && !out.iter().any(|p: &Peel| p.left == left && p.i == i && p.j == j && p.lambda == lambda) {
            out.push(Peel { left, i, j, lambda });
        }
    };
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            // right: column j -= λ column i; left: row i -= λ row j
            for left in [false, true] {
                let (a, b): (Vec<i64>, Vec<i64>) = if left {
                    ((0..n).map(|c| cur[i * n + c]).collect(), (0..n).map(|c| cur[j * n + c]).collect())
                } else {
                    ((0..n).map(|r| cur[r * n + j]).collect(), (0..n).map(|r| cur[r * n + i]).collect())
                };
                for (x, y) in a.iter().zip(&b) {
                    if *y != 0 {
                        push(left, i, j, x.div_euclid(*y));
                        push(left, i, j, x.div_euclid(*y) + 1);
                        push(left, i, j, x / y);
                    }
                }
                push(left, i, j, 1);
                push(left, i, j, -1);
            }
        }
    }
    out
}

fn compact_search(n: usize, start: Vec<i64>, weight: i128) -> Option<Vec<Transvection>> {
    use std::cmp::Reverse;
    use std::collections::{BinaryHeap, HashMap};
    let identity: Vec<i64> = (0..n * n).map(|k| i64::from(k / n == k % n)).collect();
    let ones = vec![1i64; n];
    let key = |b: i128, cur: &[i64]| b + weight * residual(cur) as i128;
    let mut nodes = vec![Node { cur: start.clone(), u: ones.clone(), v: ones.clone(), parent: None }];
    let mut heap = BinaryHeap::new();
    let mut seen: HashMap<Vec<i64>, i128> = HashMap::new();
    heap.push(Reverse((key(bound_of(n, &start, &ones, &ones), &start), 0usize)));
    let mut expanded = 0;
    while let Some(Reverse((_, id))) = heap.pop() {
        if nodes[id].cur == identity {
            let mut left = Vec::new();
            let mut right = Vec::new();
            let mut at = id;
            while let Some((p, peel)) = nodes[at].parent {
                let t = Transvection::from_lambda(peel.i, peel.j, &BigInt::from(peel.lambda)).expect("nonzero");
                if peel.left {
                    left.push(t);
                } else {
                    right.push(t);
                }
                at = p;
            }
            // walking back from the leaf visits the innermost peels first
            left.reverse();
            let mut word = left;
            word.extend(right);
            return Some(merge_adjacent(word));
        }
        expanded += 1;
        if expanded > SEARCH_LIMIT {
            return None;
        }
        for peel in peel_candidates(n, &nodes[id].cur) {
            let node = &nodes[id];
            let mut cur = node.cur.clone();
            let mut u = node.u.clone();
            let mut v = node.v.clone();
            let l = peel.lambda;
            let (i, j) = (peel.i, peel.j);
            if peel.left {
                for c in 0..n {
                    cur[i * n + c] -= l * cur[j * n + c];
                }
                // u' = u |F|
                u[j] += l.abs() * u[i];
            } else {
                for r in 0..n {
                    cur[r * n + j] -= l * cur[r * n + i];
                }
                // v' = |F| v
                v[i] += l.abs() * v[j];
            }
            if cur.iter().any(|x| x.unsigned_abs() > 1 << 40) {
                continue;
            }
            let b = bound_of(n, &cur, &u, &v);
            if seen.get(&cur).is_some_and(|&old| old <= b) {
                continue;
            }
            seen.insert(cur.clone(), b);
            let k = key(b, &cur);
            nodes.push(Node { cur, u, v, parent: Some((id, peel)) });
            heap.push(Reverse((k, nodes.len() - 1)));
        }
    }
    None
}

/// Fuses neighbouring powers of the same transvection with the same sign, which
/// leaves both the product and its absolute product unchanged.
fn merge_adjacent(word: Vec<Transvection>) -> Vec<Transvection> {
    let mut out: Vec<Transvection> = Vec::new();
    for t in word {
        match out.last_mut() {
            Some(last) if last.i == t.i && last.j == t.j && last.sign == t.sign => last.count += t.count,
            _ => out.push(t),
        }
    }
    out
}

/// Writes `m ∈ SL(n, ℤ)` as an ordered product of transvections, by integer
/// row reduction to the identity. Pairs of `-1` left on the diagonal are
/// cleared with the word `(E_ij E_ji^{-1} E_ij)^2 = -1` on the `(i, j)` block.
pub fn factor_sl(m: &IntMatrix) -> Result<Vec<Transvection>> {
    check_sl(m)?;
    let n = m.rows();
    let mut a = m.clone();
    // row operations `row_i += λ row_j`, applied in order
    let mut ops: Vec<Transvection> = Vec::new();
    let mut op = |a: &mut IntMatrix, i: usize, j: usize, lambda: BigInt| {
        if let Some(t) = Transvection::from_lambda(i, j, &lambda) {
            for c in 0..n {
                let v = &a[(j, c)] * &lambda;
                a[(i, c)] += v;
            }
            ops.push(t);
        }
    };
    for c in 0..n {
        loop {
            let nonzero: Vec<usize> = (c..n).filter(|&r| !a[(r, c)].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&r| a[(r, c)].abs()).expect("nonempty");
            for &r in &nonzero {
                if r != p {
                    let rem = a[(r, c)].mod_floor(&a[(p, c)].abs());
                    let qt = (&a[(r, c)] - &rem) / &a[(p, c)];
                    op(&mut a, r, p, -qt);
                }
            }
        }
        let p = (c..n)
            .find(|&r| !a[(r, c)].is_zero())
            .ok_or_else(|| Error::NotSpecialLinear("singular matrix".into()))?;
        if p != c {
            op(&mut a, c, p, BigInt::one());
            let g = a[(c, c)].clone();
            op(&mut a, p, c, -g);
        }
        let g = a[(c, c)].clone();
        if !g.abs().is_one() {
            return Err(Error::NotSpecialLinear("pivot is not a unit".into()));
        }
        for r in 0..n {
            if r != c && !a[(r, c)].is_zero() {
                let lambda = -(&a[(r, c)] * &g);
                op(&mut a, r, c, lambda);
            }
        }
    }
    let negatives: Vec<usize> = (0..n).filter(|&r| a[(r, r)].is_negative()).collect();
    for pair in negatives.chunks(2) {
        let (i, j) = (pair[0], pair[1]);
        for _ in 0..2 {
            op(&mut a, i, j, BigInt::one());
            op(&mut a, j, i, -BigInt::one());
            op(&mut a, i, j, BigInt::one());
        }
    }
    debug_assert_eq!(a, IntMatrix::identity(n));
    // E_k ... E_1 m = 1, so m = E_1^{-1} ... E_k^{-1}
    let word: Vec<Transvection> = ops.iter().map(Transvection::inverse).collect();
    if word_product(n, &word) != *m {
        return Err(Error::Other("transvection word does not reproduce the matrix".into()));
    }
    Ok(word)
}

/// Entry-wise absolute value of the word's factor matrices, multiplied out. Its
/// entry sum is the dimension of the realizing algebra.
pub fn realization_dims(n: usize, word: &[Transvection]) -> IntMatrix {
    word.iter().fold(IntMatrix::identity(n), |acc, t| {
        let f = IntMatrix::transvection(n, t.i, t.j, &BigInt::from(t.count));
        acc.mul(&f).expect("square")
    })
}

/// The factor `K_ij[d]` with `Χ = I + (-1)^d count E_ij`.
pub fn elementary_factor(n: usize, t: &Transvection, name: &str) -> GreenFactor {
    GreenFactor::Elementary {
        vertices: n,
        i: t.i + 1,
        j: t.j + 1,
        count: t.count,
        degree: if t.sign > 0 { 0 } else { 1 },
        name: name.to_string(),
    }
}

/// A generalized Green DG algebra with `Χ = m`: `m = F_1 ⋯ F_T`, from
/// [`factor_sl_compact`], is realized as
/// `K(F_T) ⊗ ... ⊗ K(F_1)`, since `Χ(A ⊗ B) = Χ_B Χ_A`.
pub fn realize_green(m: &IntMatrix) -> Result<IteratedProduct> {
    let n = m.rows();
    let word = factor_sl_compact(m)?;
    if word.is_empty() {
        return generalized_green(&[GreenFactor::Elementary {
            vertices: n,
            i: 1,
            j: 2.min(n),
            count: 0,
            degree: 0,
            name: "x".into(),
        }]);
    }
    let factors: Vec<GreenFactor> = word
        .iter()
        .enumerate()
        .rev()
        .map(|(t, tr)| elementary_factor(n, tr, &format!("x{}", t + 1)))
        .collect();
    generalized_green(&factors)
}

/// A seeded matrix in `SL(n, ℤ)` with entries bounded by `max_entry`, built as a
/// random walk of unit transvections that never leaves the bound.
pub fn random_sl(n: usize, max_entry: u32, steps: usize, seed: u64) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = IntMatrix::identity(n);
    let bound = BigInt::from(max_entry);
    if n < 2 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let lambda = BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 });
        let next = IntMatrix::transvection(n, i, j, &lambda).mul(&m).expect("square");
        if next.max_abs() <= bound {
            m = next;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{green, kij, kronecker};

    #[test]
    fn semisimple_chi_is_identity() {
        assert_eq!(chi_matrix(&FinAlgebra::semisimple(3)).unwrap(), IntMatrix::identity(3));
    }

    #[test]
    fn elementary_chi() {
        let a = kij(3, 1, 3, 2, 1, "x").unwrap().into_algebra();
        assert_eq!(chi_matrix(&a).unwrap(), IntMatrix::from_i64(&[&[1, 0, -2], &[0, 1, 0], &[0, 0, 1]]));
        let k = kronecker(2, &[]).unwrap().into_algebra();
        assert_eq!(chi_matrix(&k).unwrap(), IntMatrix::from_i64(&[&[1, 2], &[0, 1]]));
    }

    #[test]
    fn rotation_factors_in_three_letters() {
        let m = IntMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let w = factor_sl(&m).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(word_product(2, &w), m);
        assert!(factor_sl(&IntMatrix::identity(3)).unwrap().is_empty());
    }

    #[test]
    fn minus_identity() {
        let m = IntMatrix::from_i64(&[&[-1, 0], &[0, -1]]);
        let w = factor_sl(&m).unwrap();
        assert_eq!(w.len(), 6);
        assert_eq!(word_product(2, &w), m);
    }

    #[test]
    fn rejects_wrong_determinant() {
        assert!(factor_sl(&IntMatrix::from_i64(&[&[2, 0], &[0, 1]])).is_err());
        assert!(factor_sl(&IntMatrix::from_i64(&[&[0, 1], &[1, 0]])).is_err());
    }

    #[test]
    fn realize_rotation() {
        let m = IntMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let r = realize_green(&m).unwrap();
        assert_eq!(r.factors.len(), 3);
        assert_eq!(chi_matrix(r.algebra()).unwrap(), m);
        assert!(verify_iterated_chi(&r).unwrap());
        assert!(r.algebra().validate().is_valid());
    }

    #[test]
    fn green_chi_is_unimodular() {
        for k in 0..5 {
            let chi = chi_matrix(green(k).unwrap().algebra()).unwrap();
            assert!(chi.det().unwrap().abs().is_one());
        }
    }
}
