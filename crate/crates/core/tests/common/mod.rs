//! Shared test support: seeded generators and a naive dense-map algebra
//! used as an oracle against the library.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use polycon::polyring::{Coeff, Monomial, MonomialOrder, Polynomial, Ring};
use rand::Rng;

pub type Dense = BTreeMap<Vec<u32>, BigRational>;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ord3 {
    Lex,
    GrLex,
    GrevLex,
}

impl Ord3 {
    pub const ALL: [Ord3; 3] = [Ord3::Lex, Ord3::GrLex, Ord3::GrevLex];

    pub fn library(self) -> MonomialOrder {
        match self {
            Ord3::Lex => MonomialOrder::Lex,
            Ord3::GrLex => MonomialOrder::GrLex,
            Ord3::GrevLex => MonomialOrder::GrevLex,
        }
    }

    pub fn cmp(self, a: &[u32], b: &[u32]) -> Ordering {
        let deg = |m: &[u32]| m.iter().map(|&e| u64::from(e)).sum::<u64>();
        match self {
            Ord3::Lex => a.cmp(b),
            Ord3::GrLex => deg(a).cmp(&deg(b)).then_with(|| a.cmp(b)),
            Ord3::GrevLex => deg(a).cmp(&deg(b)).then_with(|| {
                // Smaller exponent in the last differing variable wins.
                for (x, y) in a.iter().zip(b).rev() {
                    if x != y {
                        return y.cmp(x);
                    }
                }
                Ordering::Equal
            }),
        }
    }
}

pub fn to_dense(p: &Polynomial) -> Dense {
    p.terms().map(|(m, c)| (m.exponents().to_vec(), c.clone())).collect()
}

pub fn from_dense(ring: &Ring, d: &Dense) -> Polynomial {
    Polynomial::from_terms(ring, d.iter().map(|(e, c)| (Monomial::new(e.clone()), c.clone()))).unwrap()
}

fn add_term(p: &mut Dense, e: Vec<u32>, c: BigRational) {
    let slot = p.entry(e.clone()).or_insert_with(BigRational::zero);
    *slot += c;
    if slot.is_zero() {
        p.remove(&e);
    }
}

pub fn lead(o: Ord3, p: &Dense) -> Option<(Vec<u32>, BigRational)> {
    p.iter()
        .max_by(|a, b| o.cmp(a.0, b.0))
        .map(|(e, c)| (e.clone(), c.clone()))
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn sub_exp(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add_exp(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `p - c·x^e·g`.
fn sub_scaled(p: &mut Dense, c: &BigRational, e: &[u32], g: &Dense) {
    for (ge, gc) in g {
        add_term(p, add_exp(e, ge), -(c * gc));
    }
}

/// Full remainder of `f` by `basis` (first divisor wins).
pub fn remainder(o: Ord3, f: &Dense, basis: &[Dense]) -> Dense {
    let leads: Vec<_> = basis.iter().map(|g| lead(o, g).expect("nonzero divisor")).collect();
    let mut p = f.clone();
    let mut r = Dense::new();
    while let Some((e, c)) = lead(o, &p) {
        match leads.iter().position(|(le, _)| divides(le, &e)) {
            Some(k) => {
                let (le, lc) = &leads[k];
                let coef = &c / lc;
                sub_scaled(&mut p, &coef, &sub_exp(&e, le), &basis[k]);
            }
            None => {
                p.remove(&e);
                add_term(&mut r, e, c);
            }
        }
    }
    r
}

pub fn s_poly(o: Ord3, f: &Dense, g: &Dense) -> Dense {
    let (fe, fc) = lead(o, f).unwrap();
    let (ge, gc) = lead(o, g).unwrap();
    let l: Vec<u32> = fe.iter().zip(&ge).map(|(a, b)| *a.max(b)).collect();
    let mut s = Dense::new();
    sub_scaled(&mut s, &-(BigRational::one() / &fc), &sub_exp(&l, &fe), f);
    sub_scaled(&mut s, &(BigRational::one() / &gc), &sub_exp(&l, &ge), g);
    s
}

/// Evaluates a dense polynomial exactly.
pub fn eval(p: &Dense, x: &[BigRational]) -> BigRational {
    p.iter().fold(BigRational::zero(), |acc, (e, c)| {
        let mut t = c.clone();
        for (v, &k) in x.iter().zip(e) {
            for _ in 0..k {
                t *= v;
            }
        }
        acc + t
    })
}

/// Random sparse polynomial: `1..=max_terms` terms, total degree at most
/// `max_deg`, coefficient numerators and denominators up to `max_coeff`.
pub fn random_poly<R: Rng>(rng: &mut R, ring: &Ring, max_terms: usize, max_deg: u32, max_coeff: i64) -> Polynomial {
    let n = ring.nvars();
    let terms = rng.gen_range(1..=max_terms);
    let mut out = Vec::new();
    for _ in 0..terms {
        let mut e = vec![0u32; n];
        let deg = rng.gen_range(0..=max_deg);
        for _ in 0..deg {
            e[rng.gen_range(0..n)] += 1;
        }
        let num = loop {
            let v = rng.gen_range(-max_coeff..=max_coeff);
            if v != 0 {
                break v;
            }
        };
        let den = rng.gen_range(1..=max_coeff);
        out.push((Monomial::new(e), q(num, den)));
    }
    Polynomial::from_terms(ring, out).unwrap()
}

pub fn random_nonzero_poly<R: Rng>(rng: &mut R, ring: &Ring, max_terms: usize, max_deg: u32, max_coeff: i64) -> Polynomial {
    loop {
        let p = random_poly(rng, ring, max_terms, max_deg, max_coeff);
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn random_coeff<R: Rng>(rng: &mut R, max: i64) -> Coeff {
    let num = loop {
        let v = rng.gen_range(-max..=max);
        if v != 0 {
            break v;
        }
    };
    q(num, rng.gen_range(1..=max))
}

/// Set of nodes reachable from `start` (including itself) along edges `i → j`.
pub fn reachable(n: usize, edges: &[(usize, usize)], start: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(i, j) in edges {
            if seen[i] && !seen[j] {
                seen[j] = true;
                changed = true;
            }
        }
    }
    seen
}

/// Number of source classes of the condensation, computed by brute force:
/// a node is in a source class iff every node reaching it is reached back.
pub fn brute_force_maximal_count(n: usize, edges: &[(usize, usize)]) -> usize {
    let reach: Vec<Vec<bool>> = (0..n).map(|s| reachable(n, edges, s)).collect();
    let mut counted = vec![false; n];
    let mut count = 0;
    for v in 0..n {
        if counted[v] {
            continue;
        }
        let source = (0..n).all(|u| !reach[u][v] || reach[v][u]);
        for u in 0..n {
            if reach[u][v] && reach[v][u] {
                counted[u] = true;
            }
        }
        if source {
            count += 1;
        }
    }
    count
}
