//! Buchberger's algorithm and the ideal operations built on it.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashSet};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::polyring::{
    from_sorted, s_polynomial, sorted_terms, sub_mul, BaseOrder, BlockOrder, Coeff, Monomial,
    MonomialOrder, PolyError, Polynomial, Ring, TermVec,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("input is not a Gröbner basis: S({0}, {1}) does not reduce to zero")]
    NotAGroebnerBasis(usize, usize),
    #[error("invalid elimination: {0}")]
    InvalidKeep(String),
}

/// Finite generating set of an ideal. Zero generators are dropped, so the zero
/// ideal has an empty generator list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    ring: Ring,
    generators: Vec<Polynomial>,
}

impl Ideal {
    pub fn new<I>(ring: &Ring, generators: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = Polynomial>,
    {
        let mut gens = Vec::new();
        for g in generators {
            if g.ring() != ring {
                return Err(PolyError::RingMismatch {
                    left: ring.to_string(),
                    right: g.ring().to_string(),
                });
            }
            if !g.is_zero() {
                gens.push(g);
            }
        }
        Ok(Ideal {
            ring: ring.clone(),
            generators: gens,
        })
    }

    pub fn zero(ring: &Ring) -> Self {
        Ideal {
            ring: ring.clone(),
            generators: Vec::new(),
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.generators.is_empty()
    }
}

/// Reduced Gröbner basis: monic elements sorted by descending leading monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    ring: Ring,
    order: MonomialOrder,
    elements: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn elements(&self) -> &[Polynomial] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<Polynomial> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True for the basis `{1}`, i.e. the whole ring.
    pub fn is_unit(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].is_constant()
    }

    /// Normal form of `f` modulo the basis.
    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial, PolyError> {
        if f.ring() != self.ring() {
            return Err(PolyError::RingMismatch {
                left: self.ring.to_string(),
                right: f.ring().to_string(),
            });
        }
        let basis: Vec<Elem> = self
            .elements
            .iter()
            .map(|g| Elem {
                terms: sorted_terms(g, &self.order),
                cof: None,
            })
            .collect();
        let reduced = reduce_full(
            Elem {
                terms: sorted_terms(f, &self.order),
                cof: None,
            },
            &basis,
            None,
            &self.order,
        );
        Ok(from_sorted(&self.ring, reduced.terms))
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool, PolyError> {
        Ok(self.normal_form(f)?.is_zero())
    }
}

impl fmt::Display for GroebnerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, g) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", g.display_with(&self.order))?;
        }
        f.write_str("}")
    }
}

/// Working element: sorted terms plus, when tracing, cofactors expressing the
/// element in terms of the input generators.
#[derive(Clone)]
struct Elem {
    terms: TermVec,
    cof: Option<Vec<Polynomial>>,
}

impl Elem {
    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn make_monic(&mut self) {
        let Some((_, lc)) = self.terms.first() else {
            return;
        };
        if lc.is_one() {
            return;
        }
        let inv = lc.recip();
        for (_, c) in &mut self.terms {
            *c *= &inv;
        }
        if let Some(cof) = &mut self.cof {
            for h in cof.iter_mut() {
                *h = h.scale(&inv);
            }
        }
    }
}

fn cof_sub_mul(a: &mut [Polynomial], c: &Coeff, m: &Monomial, b: &[Polynomial]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x = &*x - &y.mul_term(c, m);
    }
}

/// Fully reduces `p` against every basis element except `skip`.
fn reduce_full(mut p: Elem, basis: &[Elem], skip: Option<usize>, ord: &MonomialOrder) -> Elem {
    let mut rem: TermVec = Vec::new();
    let mut start = 0;
    while start < p.terms.len() {
        let (lm, lc) = &p.terms[start];
        let hit = basis.iter().enumerate().find_map(|(i, g)| {
            if Some(i) == skip {
                return None;
            }
            let (gm, gc) = &g.terms[0];
            lm.div(gm).map(|q| (i, q, lc / gc))
        });
        match hit {
            Some((i, qm, qc)) => {
                let g = &basis[i];
                p.terms = sub_mul(&p.terms[start..], &qc, &qm, &g.terms, ord);
                start = 0;
                if let (Some(pc), Some(gc)) = (&mut p.cof, &g.cof) {
                    cof_sub_mul(pc, &qc, &qm, gc);
                }
            }
            None => {
                rem.push(p.terms[start].clone());
                start += 1;
            }
        }
    }
    Elem {
        terms: rem,
        cof: p.cof,
    }
}

fn s_pair(f: &Elem, g: &Elem, ord: &MonomialOrder) -> Elem {
    let (fm, fc) = &f.terms[0];
    let (gm, gc) = &g.terms[0];
    let l = fm.lcm(gm);
    let mf = l.div(fm).expect("lcm divisible by LM(f)");
    let mg = l.div(gm).expect("lcm divisible by LM(g)");
    let cf = fc.recip();
    let cg = gc.recip();
    // (1/lc_f)·mf·f − (1/lc_g)·mg·g
    let scaled_f = sub_mul(&[], &-cf.clone(), &mf, &f.terms, ord);
    let terms = sub_mul(&scaled_f, &cg, &mg, &g.terms, ord);
    let cof = match (&f.cof, &g.cof) {
        (Some(a), Some(b)) => Some(
            a.iter()
                .zip(b)
                .map(|(x, y)| &x.mul_term(&cf, &mf) - &y.mul_term(&cg, &mg))
                .collect(),
        ),
        _ => None,
    };
    Elem { terms, cof }
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct PairKey {
    degree: u64,
    j: usize,
    i: usize,
}

/// Core Buchberger loop over already-monic inputs. Returns a (non-reduced)
/// Gröbner basis, or a single constant element if the ideal is the unit ideal.
fn buchberger_loop(mut basis: Vec<Elem>, ord: &MonomialOrder) -> Vec<Elem> {
    if let Some(unit) = basis.iter().find(|e| e.lm().is_one()) {
        return vec![unit.clone()];
    }
    let mut queue: BinaryHeap<Reverse<PairKey>> = BinaryHeap::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    let push = |queue: &mut BinaryHeap<_>, pending: &mut HashSet<_>, b: &[Elem], i: usize, j: usize| {
        let degree = b[i].lm().lcm(b[j].lm()).degree();
        queue.push(Reverse(PairKey { degree, j, i }));
        pending.insert((i, j));
    };
    for j in 1..basis.len() {
        for i in 0..j {
            push(&mut queue, &mut pending, &basis, i, j);
        }
    }
    while let Some(Reverse(PairKey { i, j, .. })) = queue.pop() {
        pending.remove(&(i, j));
        let (mi, mj) = (basis[i].lm(), basis[j].lm());
        if mi.is_coprime(mj) {
            continue;
        }
        let l = mi.lcm(mj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].lm().divides(&l)
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let s = s_pair(&basis[i], &basis[j], ord);
        let mut r = reduce_full(s, &basis, None, ord);
        if r.is_zero() {
            continue;
        }
        r.make_monic();
        if r.lm().is_one() {
            return vec![r];
        }
        basis.push(r);
        let n = basis.len() - 1;
        for k in 0..n {
            push(&mut queue, &mut pending, &basis, k, n);
        }
    }
    basis
}

/// Minimalizes and inter-reduces a Gröbner basis, sorting by descending LM.
fn reduce_elems(basis: Vec<Elem>, ord: &MonomialOrder) -> Vec<Elem> {
    let mut sorted = basis;
    sorted.retain(|e| !e.is_zero());
    sorted.sort_by(|a, b| ord.compare(a.lm(), b.lm()));
    let mut minimal: Vec<Elem> = Vec::new();
    for mut e in sorted {
        if minimal.iter().all(|k| !k.lm().divides(e.lm())) {
            e.make_monic();
            minimal.push(e);
        }
    }
    let mut out = minimal.clone();
    for i in 0..out.len() {
        let reduced = reduce_full(out[i].clone(), &out, Some(i), ord);
        out[i] = reduced;
    }
    for e in &mut out {
        e.make_monic();
    }
    out.sort_by(|a, b| ord.compare(b.lm(), a.lm()));
    out
}

fn seed(gens: &Ideal, ord: &MonomialOrder, traced: bool) -> Vec<Elem> {
    let n = gens.generators.len();
    gens.generators
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let cof = traced.then(|| {
                (0..n)
                    .map(|t| {
                        if t == k {
                            gens.ring.one()
                        } else {
                            gens.ring.zero()
                        }
                    })
                    .collect()
            });
            let mut e = Elem {
                terms: sorted_terms(g, ord),
                cof,
            };
            e.make_monic();
            e
        })
        .collect()
}

fn finish(ring: &Ring, ord: &MonomialOrder, elems: Vec<Elem>) -> (GroebnerBasis, Vec<Option<Vec<Polynomial>>>) {
    let mut cofs = Vec::with_capacity(elems.len());
    let mut elements = Vec::with_capacity(elems.len());
    for e in elems {
        elements.push(from_sorted(ring, e.terms));
        cofs.push(e.cof);
    }
    (
        GroebnerBasis {
            ring: ring.clone(),
            order: ord.clone(),
            elements,
        },
        cofs,
    )
}

/// Reduced Gröbner basis of `gens` under `ord`. The zero ideal yields the
/// empty basis.
pub fn buchberger(gens: &Ideal, ord: &MonomialOrder) -> GroebnerBasis {
    let basis = buchberger_loop(seed(gens, ord, false), ord);
    finish(&gens.ring, ord, reduce_elems(basis, ord)).0
}

/// As [`buchberger`], additionally returning for each basis element `g` the
/// cofactors `h` with `g = Σ hₖ·gens[k]`.
pub fn buchberger_traced(gens: &Ideal, ord: &MonomialOrder) -> (GroebnerBasis, Vec<Vec<Polynomial>>) {
    let basis = buchberger_loop(seed(gens, ord, true), ord);
    let (gb, cofs) = finish(&gens.ring, ord, reduce_elems(basis, ord));
    let cofs = cofs
        .into_iter()
        .map(|c| c.expect("traced run keeps cofactors"))
        .collect();
    (gb, cofs)
}

/// Turns a (possibly non-reduced) Gröbner basis into the reduced one. Fails
/// if some S-polynomial of the input does not reduce to zero.
pub fn reduce_basis(gb: &[Polynomial], ord: &MonomialOrder) -> Result<GroebnerBasis, GroebnerError> {
    let Some(first) = gb.first() else {
        return Err(GroebnerError::Poly(PolyError::NoDivisors));
    };
    let ring = first.ring().clone();
    let ideal = Ideal::new(&ring, gb.iter().cloned())?;
    let elems = seed(&ideal, ord, false);
    for j in 0..elems.len() {
        for i in 0..j {
            let s = s_pair(&elems[i], &elems[j], ord);
            if !reduce_full(s, &elems, None, ord).is_zero() {
                return Err(GroebnerError::NotAGroebnerBasis(i, j));
            }
        }
    }
    Ok(finish(&ring, ord, reduce_elems(elems, ord)).0)
}

/// Membership test: `f` lies in the ideal iff its remainder modulo `gb` is 0.
pub fn ideal_membership(f: &Polynomial, gb: &GroebnerBasis) -> Result<bool, PolyError> {
    gb.contains(f)
}

/// True iff the complex variety of `gens` is empty, i.e. 1 ∈ ⟨gens⟩.
pub fn variety_is_empty(gens: &Ideal) -> bool {
    buchberger(gens, &MonomialOrder::GrevLex).is_unit()
}

pub fn sum_ideal(i: &Ideal, j: &Ideal) -> Result<Ideal, PolyError> {
    if i.ring != j.ring {
        return Err(PolyError::RingMismatch {
            left: i.ring.to_string(),
            right: j.ring.to_string(),
        });
    }
    Ideal::new(&i.ring, i.generators.iter().chain(&j.generators).cloned())
}

/// Reduced Gröbner basis of `⟨gens⟩ ∩ k[keep]`, with grevlex inside both
/// blocks of the elimination order. Empty output means the zero ideal.
pub fn elimination_ideal(gens: &Ideal, keep: &BTreeSet<usize>) -> Result<Vec<Polynomial>, GroebnerError> {
    elimination_ideal_with(gens, keep, BaseOrder::GrevLex, BaseOrder::GrevLex)
}

pub fn elimination_ideal_with(
    gens: &Ideal,
    keep: &BTreeSet<usize>,
    eliminated_inner: BaseOrder,
    kept_inner: BaseOrder,
) -> Result<Vec<Polynomial>, GroebnerError> {
    let n = gens.ring.nvars();
    if keep.is_empty() || keep.len() >= n {
        return Err(GroebnerError::InvalidKeep(format!(
            "kept set must be a nonempty proper subset of the {n} variables"
        )));
    }
    if let Some(&v) = keep.iter().find(|&&v| v >= n) {
        return Err(GroebnerError::InvalidKeep(format!("variable index {v} out of range")));
    }
    let eliminate: Vec<usize> = (0..n).filter(|v| !keep.contains(v)).collect();
    let ord = MonomialOrder::Block(BlockOrder::new(n, &eliminate, eliminated_inner, kept_inner)?);
    let gb = buchberger(gens, &ord);
    Ok(gb
        .into_elements()
        .into_iter()
        .filter(|g| g.support().is_subset(keep))
        .collect())
}

/// True iff `S(gᵢ, gⱼ)` reduces to zero for every pair of `elements`.
pub fn s_pairs_reduce_to_zero(elements: &[Polynomial], ord: &MonomialOrder) -> Result<bool, PolyError> {
    if elements.is_empty() {
        return Ok(true);
    }
    for j in 0..elements.len() {
        for i in 0..j {
            let s = s_polynomial(&elements[i], &elements[j], ord)?;
            if s.is_zero() {
                continue;
            }
            let d = crate::polyring::multivariate_divide(&s, elements, ord)?;
            if !d.remainder.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether the reduced-basis shape conditions hold: monic, and no monomial of
/// any element divisible by another element's leading monomial.
pub fn is_reduced(elements: &[Polynomial], ord: &MonomialOrder) -> bool {
    let lts: Vec<_> = match elements.iter().map(|g| g.leading_term(ord)).collect::<Result<Vec<_>, _>>() {
        Ok(v) => v,
        Err(_) => return false,
    };
    if lts.iter().any(|t| !t.coeff.is_one()) {
        return false;
    }
    elements.iter().enumerate().all(|(i, g)| {
        g.terms().all(|(m, c)| {
            c.is_zero()
                || lts
                    .iter()
                    .enumerate()
                    .all(|(j, t)| i == j || !t.monomial.divides(m))
        })
    })
}
