//! Integral binary quadratic forms `ax² + bxy + cy²`: the Euler form of a
//! two-vertex algebra, Gauss reduction of indefinite forms, cycles of adjacent
//! reduced forms, and whether a form represents 1.
//!
//! Every comparison with `√D` is done by squaring integers.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::algebra::FinAlgebra;
use crate::error::{Error, Result};
use crate::exactmat::IntMatrix;
use crate::ktheory::chi_matrix;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bqf {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl fmt::Display for Bqf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl Serialize for Bqf {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a.to_string(), self.b.to_string(), self.c.to_string()].serialize(s)
    }
}

impl Bqf {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Bqf { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    /// `(a,b,c) [D=…]`.
    pub fn describe(&self) -> String {
        format!("{} [D={}]", self, self.discriminant())
    }

    /// The form `f(m₁₁X + m₁₂Y, m₂₁X + m₂₂Y)`.
    pub fn substitute(&self, m: &IntMatrix) -> Bqf {
        let (p, q, r, s) = (&m[(0, 0)], &m[(0, 1)], &m[(1, 0)], &m[(1, 1)]);
        let two = BigInt::from(2);
        Bqf {
            a: self.eval(p, r),
            b: &two * &self.a * p * q + &self.b * (p * s + q * r) + &two * &self.c * r * s,
            c: self.eval(q, s),
        }
    }

    fn unsupported(&self, reason: &str) -> Error {
        Error::UnsupportedForm { form: self.describe(), reason: reason.into() }
    }
}

pub fn discriminant(f: &Bqf) -> BigInt {
    f.discriminant()
}

fn is_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let r = n.sqrt();
        &r * &r == *n
    }
}

/// `x < √d` for `d > 0`.
fn lt_sqrt(x: &BigInt, d: &BigInt) -> bool {
    !x.is_positive() || x * x < *d
}

/// `x > √d` for `d > 0` not a square.
fn gt_sqrt(x: &BigInt, d: &BigInt) -> bool {
    x.is_positive() && x * x > *d
}

fn indefinite_d(f: &Bqf) -> Result<BigInt> {
    let d = f.discriminant();
    if !d.is_positive() {
        return Err(f.unsupported("discriminant is not positive"));
    }
    if is_square(&d) {
        return Err(f.unsupported("square discriminant"));
    }
    Ok(d)
}

/// `0 < b < √D` and `√D − b < 2|a| < √D + b`.
pub fn is_reduced(f: &Bqf) -> Result<bool> {
    let d = indefinite_d(f)?;
    let two_a = BigInt::from(2) * f.a.abs();
    Ok(f.b.is_positive() && lt_sqrt(&f.b, &d) && gt_sqrt(&(&two_a + &f.b), &d) && lt_sqrt(&(&two_a - &f.b), &d))
}

/// One reduction step `(a,b,c) -> (c, b', c')` with `b' ≡ -b (mod 2c)`, and the
/// substitution realizing it.
fn rho(f: &Bqf, d: &BigInt) -> (Bqf, IntMatrix) {
    let two_c = BigInt::from(2) * f.c.abs();
    let s = d.sqrt();
    let neg_b = -&f.b;
    let b_new = if lt_sqrt(&f.c.abs(), d) {
        // largest b' < √D in the class of -b
        &s - (&s - &neg_b).mod_floor(&two_c)
    } else {
        // -|c| < b' ≤ |c|
        let cabs = f.c.abs();
        let r = (&neg_b + &cabs).mod_floor(&two_c);
        if r.is_zero() {
            cabs
        } else {
            r - cabs
        }
    };
    let c_new = (&b_new * &b_new - d) / (BigInt::from(4) * &f.c);
    let t = (&f.b + &b_new) / (BigInt::from(2) * &f.c);
    let sub = IntMatrix::from_rows(vec![vec![BigInt::zero(), -BigInt::one()], vec![BigInt::one(), t]]).expect("2x2");
    (Bqf { a: f.c.clone(), b: b_new, c: c_new }, sub)
}

/// The unique reduced form adjacent to `f` on the right.
pub fn right_neighbor(f: &Bqf) -> Result<Bqf> {
    if !is_reduced(f)? {
        return Err(f.unsupported("form is not reduced"));
    }
    let d = f.discriminant();
    Ok(rho(f, &d).0)
}

/// A reduced form properly equivalent to `f`, with `g = f ∘ M`.
pub fn reduce(f: &Bqf) -> Result<(Bqf, IntMatrix)> {
    let d = indefinite_d(f)?;
    let mut g = f.clone();
    let mut m = IntMatrix::identity(2);
    while !is_reduced(&g)? {
        let (next, sub) = rho(&g, &d);
        debug_assert_eq!(g.substitute(&sub), next);
        m = m.mul(&sub)?;
        g = next;
    }
    Ok((g, m))
}

/// The cycle of reduced forms through `f`, in right-adjacency order.
pub fn cycle(f: &Bqf) -> Result<Vec<Bqf>> {
    let (start, _) = reduce(f)?;
    Ok(cycle_with_steps(&start).into_iter().map(|(g, _)| g).collect())
}

fn cycle_with_steps(start: &Bqf) -> Vec<(Bqf, IntMatrix)> {
    let d = start.discriminant();
    let mut out = vec![(start.clone(), IntMatrix::identity(2))];
    loop {
        let (g, m) = out.last().expect("nonempty");
        let (next, sub) = rho(g, &d);
        if next == *start {
            return out;
        }
        let m = m.mul(&sub).expect("2x2");
        out.push((next, m));
    }
}

/// `(1, b₀, (b₀² − D)/4)` with `b₀ ≡ D (mod 2)`, reduced.
pub fn principal_form(d: &BigInt) -> Result<Bqf> {
    let b0 = d.mod_floor(&BigInt::from(2));
    let f = Bqf { a: BigInt::one(), c: (&b0 * &b0 - d) / BigInt::from(4), b: b0 };
    Ok(reduce(&f)?.0)
}

/// Proper equivalence of indefinite forms: same discriminant and the reduced
/// forms lie on one cycle.
pub fn equivalent(f: &Bqf, g: &Bqf) -> Result<bool> {
    if f.discriminant() != g.discriminant() {
        return Ok(false);
    }
    let (rg, _) = reduce(g)?;
    Ok(cycle(f)?.contains(&rg))
}

/// `f = h·X²` after a unimodular substitution, for a form with `D = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemidefiniteNormalForm {
    pub h: BigInt,
    pub substitution: IntMatrix,
}

pub fn semidefinite_normal_form(f: &Bqf) -> Result<SemidefiniteNormalForm> {
    if !f.discriminant().is_zero() {
        return Err(f.unsupported("discriminant is not zero"));
    }
    if f.a.is_zero() && f.c.is_zero() {
        return Ok(SemidefiniteNormalForm { h: BigInt::zero(), substitution: IntMatrix::identity(2) });
    }
    // a = h p², c = h r², b = 2 h p r with gcd(p, r) = 1
    let mut h = f.a.gcd(&f.c);
    if f.a.is_negative() || (f.a.is_zero() && f.c.is_negative()) {
        h = -h;
    }
    let p = (&f.a / &h).sqrt();
    let mut r = (&f.c / &h).sqrt();
    if BigInt::from(2) * &h * &p * &r != f.b {
        r = -r;
    }
    let e = p.extended_gcd(&r);
    let sub = IntMatrix::from_rows(vec![vec![e.x, -r], vec![e.y, p]])?;
    let g = f.substitute(&sub);
    if g != Bqf::new(h.clone(), 0, 0) || sub.det()? != BigInt::one() {
        return Err(f.unsupported("semidefinite normal form substitution failed"));
    }
    Ok(SemidefiniteNormalForm { h, substitution: sub })
}

/// A pair `(x, y)` with `f(x, y) = 1`, or `None` when there is none.
///
/// Indefinite forms are decided by the cycle method, `D = 0` by the normal form
/// `h·X²`, definite forms by the bounded region `|D| y² ≤ 4a`.
pub fn representation_of_one(f: &Bqf) -> Result<Option<(BigInt, BigInt)>> {
    let d = f.discriminant();
    let one = BigInt::one();
    if d.is_zero() {
        let nf = semidefinite_normal_form(f)?;
        if nf.h != one {
            return Ok(None);
        }
        let s = &nf.substitution;
        return Ok(Some((s[(0, 0)].clone(), s[(1, 0)].clone())));
    }
    if d.is_negative() {
        if !f.a.is_positive() {
            return Ok(None);
        }
        // 4a·f = (2ax + by)² + |D|y²
        let four_a = BigInt::from(4) * &f.a;
        let ymax = (&four_a / d.abs()).sqrt();
        let mut y = -ymax.clone();
        while y <= ymax {
            let rest = &four_a - d.abs() * &y * &y;
            let u = rest.sqrt();
            if &u * &u == rest {
                for u in [u.clone(), -u] {
                    let num = &u - &f.b * &y;
                    let den = BigInt::from(2) * &f.a;
                    if num.is_multiple_of(&den) {
                        return Ok(Some((num / den, y)));
                    }
                }
            }
            y += 1;
        }
        return Ok(None);
    }
    let (g, m) = reduce(f)?;
    let principal = principal_form(&d)?;
    for (h, steps) in cycle_with_steps(&g) {
        if h == principal {
            // principal ∘ N = f ∘ M ∘ N' for the path back; f(M·steps·(w)) with principal(w) = 1
            let total = m.mul(&steps)?;
            let (x0, y0) = principal_one(&principal);
            let x = &total[(0, 0)] * &x0 + &total[(0, 1)] * &y0;
            let y = &total[(1, 0)] * &x0 + &total[(1, 1)] * &y0;
            debug_assert_eq!(f.eval(&x, &y), one);
            return Ok(Some((x, y)));
        }
    }
    Ok(None)
}

/// A point where the reduced principal form takes the value 1.
fn principal_one(p: &Bqf) -> (BigInt, BigInt) {
    if p.a.is_one() {
        return (BigInt::one(), BigInt::zero());
    }
    if p.c.is_one() {
        return (BigInt::zero(), BigInt::one());
    }
    // reduction of (1, b₀, ·) passes through a form with leading coefficient 1,
    // and its cycle contains one of them
    brute_force_represents(p, &BigInt::one(), 50).expect("principal form represents 1")
}

pub fn represents_one(f: &Bqf) -> Result<bool> {
    Ok(representation_of_one(f)?.is_some())
}

/// Exhaustive search over `|x|, |y| ≤ bound`.
pub fn brute_force_represents(f: &Bqf, value: &BigInt, bound: u32) -> Option<(BigInt, BigInt)> {
    let small = (f.a.to_i128(), f.b.to_i128(), f.c.to_i128(), value.to_i128());
    let bound = bound as i128;
    if let (Some(a), Some(b), Some(c), Some(v)) = small {
        if a.abs() < 1 << 40 && b.abs() < 1 << 40 && c.abs() < 1 << 40 && bound < 1 << 20 {
            for x in -bound..=bound {
                for y in -bound..=bound {
                    if a * x * x + b * x * y + c * y * y == v {
                        return Some((x.into(), y.into()));
                    }
                }
            }
            return None;
        }
    }
    for x in -bound..=bound {
        for y in -bound..=bound {
            let (x, y) = (BigInt::from(x), BigInt::from(y));
            if f.eval(&x, &y) == *value {
                return Some((x, y));
            }
        }
    }
    None
}

/// All reduced forms of a positive non-square discriminant.
pub fn reduced_forms(d: &BigInt) -> Result<Vec<Bqf>> {
    let probe = Bqf::new(1, d.mod_floor(&BigInt::from(2)), 0);
    if !d.is_positive() || is_square(d) {
        return Err(probe.unsupported("reduced forms need a positive non-square discriminant"));
    }
    let s = d.sqrt();
    let mut out = BTreeSet::new();
    let mut b = BigInt::one();
    while b <= s {
        let ac4 = &b * &b - d;
        if ac4.is_multiple_of(&BigInt::from(4)) {
            let ac = ac4 / BigInt::from(4);
            // |a| < √D for reduced forms
            let mut a = BigInt::one();
            while a <= s {
                if ac.is_multiple_of(&a) {
                    for sa in [a.clone(), -a.clone()] {
                        let f = Bqf { c: &ac / &sa, a: sa, b: b.clone() };
                        if is_reduced(&f)? {
                            out.insert(f);
                        }
                    }
                }
                a += 1;
            }
        }
        b += 1;
    }
    Ok(out.into_iter().collect())
}

/// `q(x, y) = (x y) Χ (x y)ᵗ`, the Euler form on classes of projectives.
pub fn euler_quadform(a: &FinAlgebra) -> Result<Bqf> {
    let chi = chi_matrix(a)?;
    if chi.rows() != 2 {
        return Err(Error::UnsupportedForm {
            form: format!("Euler form of an algebra with {} vertices", chi.rows()),
            reason: "two vertices required".into(),
        });
    }
    Ok(Bqf { a: chi[(0, 0)].clone(), b: &chi[(0, 1)] + &chi[(1, 0)], c: chi[(1, 1)].clone() })
}

/// `q_𝔉 = (m(n−k)+1, mk(n−k)+m+n, mk+1)`.
pub fn euler_quadform_family(n: usize, m: usize, k: usize) -> Bqf {
    let (n, m, k) = (BigInt::from(n), BigInt::from(m), BigInt::from(k));
    let nk = &n - &k;
    Bqf {
        a: &m * &nk + 1,
        b: &m * &k * &nk + &m + &n,
        c: &m * &k + 1,
    }
}

/// `F = mk(n−k) + n − m`.
pub fn family_f(n: usize, m: usize, k: usize) -> BigInt {
    BigInt::from(m * k * (n - k) + n) - BigInt::from(m)
}

/// `q′_𝔉 = (mk+1, F−2k, −(k(n−k)−1))`.
pub fn family_reduced_form(n: usize, m: usize, k: usize) -> Bqf {
    let f = family_f(n, m, k);
    Bqf {
        a: BigInt::from(m * k + 1),
        b: f - BigInt::from(2 * k),
        c: BigInt::one() - BigInt::from(k * (n - k)),
    }
}

/// `true` when the Euler form represents 1, i.e. exceptional objects are not
/// ruled out; `false` proves there are none.
pub fn exceptional_object_verdict(a: &FinAlgebra) -> Result<bool> {
    represents_one(&euler_quadform(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminants() {
        assert_eq!(Bqf::new(1, 0, -1).discriminant(), 4.into());
        assert_eq!(euler_quadform_family(2, 1, 1).discriminant(), 0.into());
        assert_eq!(euler_quadform_family(3, 1, 1), Bqf::new(3, 6, 2));
        assert_eq!(euler_quadform_family(3, 1, 1).discriminant(), 12.into());
    }

    #[test]
    fn reduced_examples() {
        assert!(is_reduced(&Bqf::new(1, 2, -2)).unwrap());
        assert!(is_reduced(&Bqf::new(-2, 2, 1)).unwrap());
        assert!(!is_reduced(&Bqf::new(3, 6, 2)).unwrap());
        assert!(is_reduced(&Bqf::new(1, 0, 0)).is_err());
        assert!(is_reduced(&Bqf::new(1, 0, -4)).is_err());
    }

    #[test]
    fn principal_cycle_of_twelve() {
        let p = Bqf::new(1, 2, -2);
        assert_eq!(right_neighbor(&p).unwrap(), Bqf::new(-2, 2, 1));
        assert_eq!(cycle(&p).unwrap(), vec![p.clone(), Bqf::new(-2, 2, 1)]);
        assert_eq!(principal_form(&12.into()).unwrap(), p);
        let other = cycle(&Bqf::new(2, 2, -1)).unwrap();
        assert_eq!(other, vec![Bqf::new(2, 2, -1), Bqf::new(-1, 2, 2)]);
        assert_eq!(reduced_forms(&12.into()).unwrap().len(), 4);
    }

    #[test]
    fn family_form_does_not_represent_one() {
        let q = euler_quadform_family(3, 1, 1);
        let qp = family_reduced_form(3, 1, 1);
        assert_eq!(qp, Bqf::new(2, 2, -1));
        assert!(is_reduced(&qp).unwrap());
        assert!(equivalent(&q, &qp).unwrap());
        assert!(!represents_one(&q).unwrap());
        assert!(brute_force_represents(&q, &BigInt::one(), 200).is_none());
        assert!(represents_one(&Bqf::new(1, 2, -2)).unwrap());
    }

    #[test]
    fn semidefinite_case() {
        for m in 1..5usize {
            let q = euler_quadform_family(2, m, 1);
            let nf = semidefinite_normal_form(&q).unwrap();
            assert_eq!(nf.h, BigInt::from(m + 1));
            assert_eq!(q.substitute(&nf.substitution), Bqf::new(m as i64 + 1, 0, 0));
            assert!(!represents_one(&q).unwrap());
        }
        assert!(represents_one(&Bqf::new(1, 2, 1)).unwrap());
    }

    #[test]
    fn definite_forms() {
        let f = Bqf::new(1, 1, 1);
        let (x, y) = representation_of_one(&f).unwrap().unwrap();
        assert_eq!(f.eval(&x, &y), BigInt::one());
        assert!(!represents_one(&Bqf::new(2, 1, 2)).unwrap());
        assert!(!represents_one(&Bqf::new(-1, 1, -1)).unwrap());
    }

    #[test]
    fn witnesses_are_exact() {
        for f in [Bqf::new(5, 11, 5), Bqf::new(-3, 7, 2), Bqf::new(7, 30, 31)] {
            if let Some((x, y)) = representation_of_one(&f).unwrap() {
                assert_eq!(f.eval(&x, &y), BigInt::one());
            }
        }
    }
}
