//! Exact sign questions for univariate rational polynomials.
//!
//! Polynomials are coefficient vectors, index = degree, with no trailing zeros.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

pub type Upoly = Vec<Rational>;

fn trim(mut p: Upoly) -> Upoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

pub fn mul(a: &[Rational], b: &[Rational]) -> Upoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Upoly {
    let n = a.len().max(b.len());
    let z = Rational::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

fn deriv(p: &[Rational]) -> Upoly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer((i as i64).into()))
            .collect(),
    )
}

/// Quotient and remainder.
fn divmod(a: &[Rational], b: &[Rational]) -> (Upoly, Upoly) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::zero(); r.len() - b.len() + 1];
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &f * c;
        }
        q[shift] = f;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

fn monic(p: Upoly) -> Upoly {
    match p.last().cloned() {
        Some(l) => p.into_iter().map(|c| c / &l).collect(),
        None => p,
    }
}

fn gcd(a: &[Rational], b: &[Rational]) -> Upoly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let (_, r) = divmod(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

fn is_const(p: &[Rational]) -> bool {
    p.len() <= 1
}

/// Yun's square-free factorisation; entry `i` has multiplicity `i + 1`.
fn square_free(p: &[Rational]) -> Vec<Upoly> {
    let f = trim(p.to_vec());
    let a0 = gcd(&f, &deriv(&f));
    let mut b = divmod(&f, &a0).0;
    let mut c = divmod(&deriv(&f), &a0).0;
    let mut d = sub(&c, &deriv(&b));
    let mut out = Vec::new();
    while !is_const(&b) {
        let a = gcd(&b, &d);
        b = divmod(&b, &a).0;
        c = divmod(&d, &a).0;
        d = sub(&c, &deriv(&b));
        out.push(a);
    }
    out
}

fn sturm_chain(p: &[Rational]) -> Vec<Upoly> {
    let mut chain = vec![trim(p.to_vec())];
    let mut next = deriv(p);
    while !next.is_empty() {
        let (_, r) = divmod(chain.last().unwrap(), &next);
        chain.push(next);
        next = r.into_iter().map(|c| -c).collect();
    }
    chain
}

fn changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

fn sign(q: &Rational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Number of distinct real roots in `(0, ∞)` of a square-free `p`.
fn positive_roots(p: &[Rational]) -> usize {
    if is_const(p) {
        return 0;
    }
    let chain = sturm_chain(p);
    let zero = Rational::zero();
    let at0 = changes(chain.iter().map(|q| sign(&eval(q, &zero))));
    let at_inf = changes(chain.iter().map(|q| sign(q.last().unwrap())));
    at0 - at_inf
}

/// Decides `p(t) ≥ 0` for all `t ≥ 0`.
pub fn nonnegative_on_halfline(p: &[Rational]) -> bool {
    let p = trim(p.to_vec());
    let Some(low) = p.iter().find(|c| !c.is_zero()) else {
        return true;
    };
    // Sign just right of 0, then no sign change on (0, ∞): the only sign
    // changes happen at roots of odd multiplicity.
    if low.is_negative() {
        return false;
    }
    let mut odd: Upoly = vec![Rational::from_integer(1.into())];
    for (i, f) in square_free(&p).iter().enumerate() {
        if i % 2 == 0 {
            odd = mul(&odd, f);
        }
    }
    positive_roots(&odd) == 0
}
