//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A [`Polynomial`] lives in a [`Ring`], which is nothing more than an ordered
//! list of variable names. Variables are addressed by their index in that list;
//! names only matter when parsing and printing. Terms are stored in a map keyed
//! by exponent vector, so two polynomials are equal exactly when their term maps
//! are equal.
//!
//! Monomial orders ([`MonomialOrder`]) are passed explicitly to every operation
//! that needs one: leading terms, division, S-polynomials.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Coefficient field: arbitrary-precision rationals, always in lowest terms.
pub type Coeff = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("ring mismatch: [{left}] vs [{right}]")]
    RingMismatch { left: String, right: String },
    #[error("the zero polynomial has no leading term")]
    ZeroLeadingTerm,
    #[error("divisor {0} is the zero polynomial")]
    ZeroDivisor(usize),
    #[error("divisor list is empty")]
    NoDivisors,
    #[error("invalid block order: {0}")]
    InvalidBlock(String),
}

/// Ordered list of variable names shared by all polynomials of one ring.
#[derive(Clone)]
pub struct Ring(Arc<[String]>);

impl Ring {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ring(names.into_iter().map(Into::into).collect())
    }

    /// `prefix1, prefix2, …, prefixN`.
    pub fn indexed(prefix: &str, n: usize) -> Self {
        Ring::new((1..=n).map(|i| format!("{prefix}{i}")))
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self)
    }

    pub fn one(&self) -> Polynomial {
        Polynomial::constant(self, Coeff::one())
    }

    pub fn var(&self, i: usize) -> Polynomial {
        Polynomial::var(self, i)
    }

    fn check_same(&self, other: &Ring) -> Result<(), PolyError> {
        if self == other {
            Ok(())
        } else {
            Err(PolyError::RingMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring[{self}]")
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(", "))
    }
}

/// Exponent vector. The derived `Ord` is lex with the first variable largest.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents.into_boxed_slice())
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    /// `x_var^exp` in a ring with `nvars` variables.
    pub fn var(nvars: usize, var: usize, exp: u32) -> Self {
        let mut e = vec![0; nvars];
        e[var] = exp;
        Monomial::new(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// True when `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0
            .iter()
            .zip(other.0.iter())
            .all(|(&a, &b)| a == 0 || b == 0)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(&a, &b)| a.max(b))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }

    /// Product, or `None` if some exponent would overflow.
    pub fn checked_mul(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(&a, &b)| a.checked_add(b))
            .collect::<Option<Box<[u32]>>>()
            .map(Monomial)
    }

    /// Exact quotient `self / other`, if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Box<[u32]>>>()
            .map(Monomial)
    }

    /// Indices of variables with positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Orders usable on their own or inside a block of an elimination order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseOrder {
    Lex,
    GrLex,
    GrevLex,
}

impl BaseOrder {
    pub fn name(self) -> &'static str {
        match self {
            BaseOrder::Lex => "lex",
            BaseOrder::GrLex => "grlex",
            BaseOrder::GrevLex => "grevlex",
        }
    }
}

impl std::str::FromStr for BaseOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lex" => Ok(BaseOrder::Lex),
            "grlex" => Ok(BaseOrder::GrLex),
            "grevlex" => Ok(BaseOrder::GrevLex),
            other => Err(format!("unknown monomial order `{other}`")),
        }
    }
}

/// Elimination order: monomials are compared on the `big` variables first and
/// only on ties on the `small` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockOrder {
    big: Vec<usize>,
    small: Vec<usize>,
    big_inner: BaseOrder,
    small_inner: BaseOrder,
}

impl BlockOrder {
    /// Builds the order with `big` ≻ the remaining variables. Both blocks keep
    /// the ring's variable order internally.
    pub fn new(
        nvars: usize,
        big: &[usize],
        big_inner: BaseOrder,
        small_inner: BaseOrder,
    ) -> Result<Self, PolyError> {
        let mut in_big = vec![false; nvars];
        for &v in big {
            if v >= nvars {
                return Err(PolyError::InvalidBlock(format!(
                    "variable index {v} out of range for {nvars} variables"
                )));
            }
            if in_big[v] {
                return Err(PolyError::InvalidBlock(format!(
                    "variable index {v} listed twice"
                )));
            }
            in_big[v] = true;
        }
        let big = (0..nvars).filter(|&v| in_big[v]).collect();
        let small = (0..nvars).filter(|&v| !in_big[v]).collect();
        Ok(BlockOrder {
            big,
            small,
            big_inner,
            small_inner,
        })
    }

    pub fn big(&self) -> &[usize] {
        &self.big
    }

    pub fn small(&self) -> &[usize] {
        &self.small
    }

    fn nvars(&self) -> usize {
        self.big.len() + self.small.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    #[default]
    Lex,
    GrLex,
    GrevLex,
    Block(BlockOrder),
}

impl From<BaseOrder> for MonomialOrder {
    fn from(b: BaseOrder) -> Self {
        match b {
            BaseOrder::Lex => MonomialOrder::Lex,
            BaseOrder::GrLex => MonomialOrder::GrLex,
            BaseOrder::GrevLex => MonomialOrder::GrevLex,
        }
    }
}

impl MonomialOrder {
    /// Elimination order with `eliminate` ≻ everything else, grevlex inside
    /// each block.
    pub fn elimination(nvars: usize, eliminate: &[usize]) -> Result<Self, PolyError> {
        BlockOrder::new(nvars, eliminate, BaseOrder::GrevLex, BaseOrder::GrevLex)
            .map(MonomialOrder::Block)
    }

    /// Compares two exponent vectors of equal length. Lengths are not checked
    /// here; see [`monomial_compare`] for the checked entry point.
    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        debug_assert_eq!(a.nvars(), b.nvars());
        let (a, b) = (a.exponents(), b.exponents());
        match self {
            MonomialOrder::Lex => cmp_base(BaseOrder::Lex, a, b, None),
            MonomialOrder::GrLex => cmp_base(BaseOrder::GrLex, a, b, None),
            MonomialOrder::GrevLex => cmp_base(BaseOrder::GrevLex, a, b, None),
            MonomialOrder::Block(block) => cmp_base(block.big_inner, a, b, Some(&block.big))
                .then_with(|| cmp_base(block.small_inner, a, b, Some(&block.small))),
        }
    }

    fn check_width(&self, nvars: usize) -> Result<(), PolyError> {
        match self {
            MonomialOrder::Block(block) if block.nvars() != nvars => Err(PolyError::Dimension {
                expected: block.nvars(),
                found: nvars,
            }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonomialOrder::Lex => f.write_str("lex"),
            MonomialOrder::GrLex => f.write_str("grlex"),
            MonomialOrder::GrevLex => f.write_str("grevlex"),
            MonomialOrder::Block(b) => write!(
                f,
                "block({:?} {} > {:?} {})",
                b.big,
                b.big_inner.name(),
                b.small,
                b.small_inner.name()
            ),
        }
    }
}

fn cmp_base(kind: BaseOrder, a: &[u32], b: &[u32], idx: Option<&[usize]>) -> Ordering {
    let n = idx.map_or(a.len(), <[usize]>::len);
    let at = |v: &[u32], k: usize| idx.map_or(v[k], |i| v[i[k]]);
    let degree = |v: &[u32]| (0..n).map(|k| u64::from(at(v, k))).sum::<u64>();
    let lex = || {
        (0..n)
            .map(|k| at(a, k).cmp(&at(b, k)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    };
    match kind {
        BaseOrder::Lex => lex(),
        BaseOrder::GrLex => degree(a).cmp(&degree(b)).then_with(lex),
        BaseOrder::GrevLex => degree(a).cmp(&degree(b)).then_with(|| {
            // smaller exponent in the last differing variable wins
            (0..n)
                .rev()
                .map(|k| at(b, k).cmp(&at(a, k)))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        }),
    }
}

/// Checked comparison of two monomials under `ord`.
pub fn monomial_compare(
    a: &Monomial,
    b: &Monomial,
    ord: &MonomialOrder,
) -> Result<Ordering, PolyError> {
    if a.nvars() != b.nvars() {
        return Err(PolyError::Dimension {
            expected: a.nvars(),
            found: b.nvars(),
        });
    }
    ord.check_width(a.nvars())?;
    Ok(ord.compare(a, b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: Coeff,
    pub monomial: Monomial,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    ring: Ring,
    terms: BTreeMap<Monomial, Coeff>,
}

impl Polynomial {
    pub fn zero(ring: &Ring) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, c: Coeff) -> Self {
        let mut p = Polynomial::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ring.nvars()), c);
        }
        p
    }

    pub fn var(ring: &Ring, i: usize) -> Self {
        Polynomial::monomial(ring, Coeff::one(), Monomial::var(ring.nvars(), i, 1))
    }

    pub fn monomial(ring: &Ring, c: Coeff, m: Monomial) -> Self {
        let mut p = Polynomial::zero(ring);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Collects terms, summing duplicates and dropping zeros.
    pub fn from_terms<I>(ring: &Ring, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Monomial, Coeff)>,
    {
        let mut p = Polynomial::zero(ring);
        for (m, c) in terms {
            if m.nvars() != ring.nvars() {
                return Err(PolyError::Dimension {
                    expected: ring.nvars(),
                    found: m.nvars(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending lex order of their monomials.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn constant_term(&self) -> Coeff {
        self.coeff(&Monomial::one(self.ring.nvars()))
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ring.check_same(&other.ring)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ring.check_same(&other.ring)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.ring.check_same(&other.ring)?;
        let mut out = Polynomial::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// `c · m · self`.
    pub fn mul_term(&self, c: &Coeff, m: &Monomial) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(mm, a)| (mm.mul(m), a * c))
                .collect(),
        }
    }

    pub fn leading_term(&self, ord: &MonomialOrder) -> Result<Term, PolyError> {
        ord.check_width(self.ring.nvars())?;
        self.terms
            .iter()
            .max_by(|a, b| ord.compare(a.0, b.0))
            .map(|(m, c)| Term {
                coeff: c.clone(),
                monomial: m.clone(),
            })
            .ok_or(PolyError::ZeroLeadingTerm)
    }

    /// Scales so the leading coefficient under `ord` is 1. Zero stays zero.
    pub fn monic(&self, ord: &MonomialOrder) -> Polynomial {
        match self.leading_term(ord) {
            Ok(lt) => self.scale(&lt.coeff.recip()),
            Err(_) => self.clone(),
        }
    }

    /// Indices of variables occurring with positive exponent in some term.
    pub fn support(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(Monomial::support).collect()
    }

    /// `f(t, t, …, t)` as a polynomial in the single variable `t`.
    pub fn substitute_diagonal(&self) -> Polynomial {
        let ring = Ring::new(["t"]);
        let mut out = Polynomial::zero(&ring);
        for (m, c) in &self.terms {
            let d = u32::try_from(m.degree()).expect("diagonal degree fits in u32");
            out.add_term(Monomial::new(vec![d]), c.clone());
        }
        out
    }

    /// Moves the polynomial into a ring with the same variable count.
    pub fn with_ring(&self, ring: &Ring) -> Result<Polynomial, PolyError> {
        if ring.nvars() != self.ring.nvars() {
            return Err(PolyError::Dimension {
                expected: self.ring.nvars(),
                found: ring.nvars(),
            });
        }
        Ok(Polynomial {
            ring: ring.clone(),
            terms: self.terms.clone(),
        })
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, point: &[Coeff]) -> Result<Coeff, PolyError> {
        if point.len() != self.ring.nvars() {
            return Err(PolyError::Dimension {
                expected: self.ring.nvars(),
                found: point.len(),
            });
        }
        let mut acc = Coeff::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[v].clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Renders with terms in descending `ord` order.
    pub fn display_with<'a>(&'a self, ord: &'a MonomialOrder) -> impl fmt::Display + 'a {
        DisplayWith { poly: self, ord }
    }

    fn fmt_sorted(&self, f: &mut fmt::Formatter<'_>, terms: &[(&Monomial, &Coeff)]) -> fmt::Result {
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.is_one() {
                write!(f, "{abs}")?;
                continue;
            }
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            let mut first = true;
            for v in m.support() {
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(self.ring.name(v))?;
                let e = m.exponents()[v];
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

struct DisplayWith<'a> {
    poly: &'a Polynomial,
    ord: &'a MonomialOrder,
}

impl fmt::Display for DisplayWith<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by(|a, b| self.ord.compare(b.0, a.0));
        self.poly.fmt_sorted(f, &terms)
    }
}

/// Descending lex order.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<_> = self.terms.iter().rev().collect();
        self.fmt_sorted(f, &terms)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

// Operator forms panic on ring mismatch; use the `try_*` methods when the
// rings are not known to agree.
impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("polynomial addition across rings")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("polynomial subtraction across rings")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("polynomial multiplication across rings")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Coeff::one())
    }
}

pub fn poly_add(f: &Polynomial, g: &Polynomial) -> Result<Polynomial, PolyError> {
    f.try_add(g)
}

pub fn poly_mul(f: &Polynomial, g: &Polynomial) -> Result<Polynomial, PolyError> {
    f.try_mul(g)
}

pub fn leading_term(f: &Polynomial, ord: &MonomialOrder) -> Result<Term, PolyError> {
    f.leading_term(ord)
}

pub fn support(f: &Polynomial) -> BTreeSet<usize> {
    f.support()
}

pub fn substitute_diagonal(f: &Polynomial) -> Polynomial {
    f.substitute_diagonal()
}

/// Integer coefficient helper, mostly for tests and generators.
pub fn int(n: i64) -> Coeff {
    Coeff::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Coeff {
    Coeff::new(BigInt::from(n), BigInt::from(d))
}

// ---------------------------------------------------------------------------
// Order-sorted term vectors, the working representation for division and
// Gröbner basis computations.

pub(crate) type TermVec = Vec<(Monomial, Coeff)>;

/// Terms of `p` sorted descending under `ord`.
pub(crate) fn sorted_terms(p: &Polynomial, ord: &MonomialOrder) -> TermVec {
    let mut v: TermVec = p
        .terms
        .iter()
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect();
    v.sort_by(|a, b| ord.compare(&b.0, &a.0));
    v
}

pub(crate) fn from_sorted(ring: &Ring, terms: TermVec) -> Polynomial {
    Polynomial {
        ring: ring.clone(),
        terms: terms.into_iter().collect(),
    }
}

/// `a − c·m·b` for descending-sorted `a`, `b`. Multiplying by a monomial keeps
/// `b` sorted, so this is a single merge.
pub(crate) fn sub_mul(
    a: &[(Monomial, Coeff)],
    c: &Coeff,
    m: &Monomial,
    b: &[(Monomial, Coeff)],
    ord: &MonomialOrder,
) -> TermVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.iter().peekable();
    let mut ib = b.iter().map(|(mb, cb)| (mb.mul(m), cb * c)).peekable();
    loop {
        let step = match (ia.peek(), ib.peek()) {
            (None, None) => break,
            (Some(_), None) => Ordering::Greater,
            (None, Some(_)) => Ordering::Less,
            (Some(x), Some(y)) => ord.compare(&x.0, &y.0),
        };
        match step {
            Ordering::Greater => out.push(ia.next().unwrap().clone()),
            Ordering::Less => {
                let (mb, cb) = ib.next().unwrap();
                out.push((mb, -cb));
            }
            Ordering::Equal => {
                let (ma, ca) = ia.next().unwrap();
                let (_, cb) = ib.next().unwrap();
                let s = ca - cb;
                if !s.is_zero() {
                    out.push((ma.clone(), s));
                }
            }
        }
    }
    out
}

/// Quotients and remainder of the multivariate division algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Division {
    pub quotients: Vec<Polynomial>,
    pub remainder: Polynomial,
}

/// Divides `f` by `divisors` under `ord`.
///
/// At each step the leading term of the running dividend is cancelled by the
/// first divisor (in list order) whose leading monomial divides it; otherwise
/// it moves to the remainder. The result satisfies
/// `f = Σ qᵢ·gᵢ + r` with no term of `r` divisible by any `LM(gᵢ)`.
pub fn multivariate_divide(
    f: &Polynomial,
    divisors: &[Polynomial],
    ord: &MonomialOrder,
) -> Result<Division, PolyError> {
    if divisors.is_empty() {
        return Err(PolyError::NoDivisors);
    }
    ord.check_width(f.ring.nvars())?;
    for (i, g) in divisors.iter().enumerate() {
        f.ring.check_same(&g.ring)?;
        if g.is_zero() {
            return Err(PolyError::ZeroDivisor(i));
        }
    }
    let gs: Vec<TermVec> = divisors.iter().map(|g| sorted_terms(g, ord)).collect();
    let mut quotients: Vec<Polynomial> = vec![Polynomial::zero(&f.ring); divisors.len()];
    let mut remainder = Polynomial::zero(&f.ring);
    let mut p = sorted_terms(f, ord);
    let mut start = 0;
    while start < p.len() {
        let (lm, lc) = &p[start];
        let hit = gs.iter().enumerate().find_map(|(i, g)| {
            let (gm, gc) = &g[0];
            lm.div(gm).map(|q| (i, q, lc / gc))
        });
        match hit {
            Some((i, qm, qc)) => {
                quotients[i].add_term(qm.clone(), qc.clone());
                p = sub_mul(&p[start..], &qc, &qm, &gs[i], ord);
                start = 0;
            }
            None => {
                remainder.add_term(lm.clone(), lc.clone());
                start += 1;
            }
        }
    }
    Ok(Division {
        quotients,
        remainder,
    })
}

/// `S(f, g) = (lcm/LT(f))·f − (lcm/LT(g))·g`.
pub fn s_polynomial(
    f: &Polynomial,
    g: &Polynomial,
    ord: &MonomialOrder,
) -> Result<Polynomial, PolyError> {
    f.ring.check_same(&g.ring)?;
    let lf = f.leading_term(ord)?;
    let lg = g.leading_term(ord)?;
    let l = lf.monomial.lcm(&lg.monomial);
    let mf = l.div(&lf.monomial).expect("lcm divisible by LM(f)");
    let mg = l.div(&lg.monomial).expect("lcm divisible by LM(g)");
    let a = f.mul_term(&lf.coeff.recip(), &mf);
    let b = g.mul_term(&lg.coeff.recip(), &mg);
    a.try_sub(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Ring {
        Ring::new(["x", "y"])
    }

    fn xyz() -> Ring {
        Ring::new(["x", "y", "z"])
    }

    fn mono(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    /// Builds a polynomial from `(coeff, exponents)` pairs.
    fn poly(ring: &Ring, terms: &[(i64, &[u32])]) -> Polynomial {
        Polynomial::from_terms(ring, terms.iter().map(|(c, e)| (mono(e), int(*c)))).unwrap()
    }

    #[test]
    fn compare_examples() {
        let lex = MonomialOrder::Lex;
        assert_eq!(lex.compare(&mono(&[2, 0]), &mono(&[1, 1])), Ordering::Greater);
        let grlex = MonomialOrder::GrLex;
        assert_eq!(grlex.compare(&mono(&[1, 2]), &mono(&[2, 0])), Ordering::Greater);
        let grevlex = MonomialOrder::GrevLex;
        assert_eq!(
            grevlex.compare(&mono(&[0, 2, 0]), &mono(&[1, 0, 1])),
            Ordering::Greater
        );
        let block = MonomialOrder::elimination(3, &[0]).unwrap();
        assert_eq!(
            block.compare(&mono(&[1, 1, 0]), &mono(&[0, 5, 0])),
            Ordering::Greater
        );
        assert_eq!(lex.compare(&mono(&[1, 1]), &mono(&[1, 1])), Ordering::Equal);
    }

    #[test]
    fn compare_rejects_length_mismatch() {
        let err = monomial_compare(&mono(&[1]), &mono(&[1, 0]), &MonomialOrder::Lex);
        assert!(matches!(err, Err(PolyError::Dimension { .. })));
        let block = MonomialOrder::elimination(3, &[0]).unwrap();
        assert!(monomial_compare(&mono(&[1, 0]), &mono(&[0, 1]), &block).is_err());
    }

    #[test]
    fn block_order_validation() {
        assert!(BlockOrder::new(2, &[2], BaseOrder::Lex, BaseOrder::Lex).is_err());
        assert!(BlockOrder::new(2, &[0, 0], BaseOrder::Lex, BaseOrder::Lex).is_err());
        let b = BlockOrder::new(4, &[3, 1], BaseOrder::Lex, BaseOrder::Lex).unwrap();
        assert_eq!(b.big(), &[1, 3]);
        assert_eq!(b.small(), &[0, 2]);
    }

    #[test]
    fn add_examples() {
        let r = xy();
        let (x, y) = (r.var(0), r.var(1));
        assert_eq!(&(&x - &y) + &(&x + &y), x.scale(&int(2)));
        let f = &(&x * &x) + &r.one();
        assert_eq!(&f + &r.zero(), f);
        assert!((&f + &(-&f)).is_zero());
    }

    #[test]
    fn mul_examples() {
        let r = xy();
        let (x, y) = (r.var(0), r.var(1));
        assert_eq!(&(&x - &y) * &(&x + &y), poly(&r, &[(1, &[2, 0]), (-1, &[0, 2])]));
        assert_eq!(&x * &r.one(), x);
        let half_x = x.scale(&ratio(1, 2));
        let two_y = y.scale(&int(2));
        assert_eq!(&half_x * &two_y, poly(&r, &[(1, &[1, 1])]));
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = xy().var(0);
        let b = xyz().var(0);
        assert!(matches!(poly_add(&a, &b), Err(PolyError::RingMismatch { .. })));
        assert!(poly_mul(&a, &b).is_err());
    }

    #[test]
    fn leading_term_examples() {
        let r = xy();
        let f = poly(&r, &[(1, &[1, 0]), (1, &[0, 2])]);
        assert_eq!(f.leading_term(&MonomialOrder::Lex).unwrap().monomial, mono(&[1, 0]));
        assert_eq!(f.leading_term(&MonomialOrder::GrLex).unwrap().monomial, mono(&[0, 2]));
        let g = poly(&r, &[(3, &[2, 1]), (-5, &[1, 3])]);
        let lt = g.leading_term(&MonomialOrder::Lex).unwrap();
        assert_eq!((lt.coeff, lt.monomial), (int(3), mono(&[2, 1])));
        assert_eq!(r.zero().leading_term(&MonomialOrder::Lex), Err(PolyError::ZeroLeadingTerm));
    }

    #[test]
    fn support_examples() {
        let r = Ring::indexed("x", 4);
        let f = &r.var(1) - &r.var(0);
        assert_eq!(f.support(), BTreeSet::from([0, 1]));
        assert!(r.zero().support().is_empty());
        assert!(r.one().support().is_empty());
        let g = poly(&r, &[(1, &[1, 1, 1, 0]), (-1, &[0, 0, 0, 3])]);
        assert_eq!(g.support(), BTreeSet::from([0, 1, 2, 3]));
    }

    #[test]
    fn division_golden_case() {
        let r = xy();
        let f = poly(&r, &[(1, &[2, 1]), (1, &[1, 2]), (1, &[0, 2])]);
        let g1 = poly(&r, &[(1, &[1, 1]), (-1, &[0, 0])]);
        let g2 = poly(&r, &[(1, &[0, 2]), (-1, &[0, 0])]);
        let d = multivariate_divide(&f, &[g1, g2], &MonomialOrder::Lex).unwrap();
        assert_eq!(d.quotients[0], poly(&r, &[(1, &[1, 0]), (1, &[0, 1])]));
        assert_eq!(d.quotients[1], r.one());
        assert_eq!(d.remainder, poly(&r, &[(1, &[1, 0]), (1, &[0, 1]), (1, &[0, 0])]));
    }

    #[test]
    fn division_trivial_cases() {
        let r = xy();
        let f = poly(&r, &[(2, &[1, 1]), (-3, &[0, 0])]);
        let d = multivariate_divide(&f, std::slice::from_ref(&f), &MonomialOrder::Lex).unwrap();
        assert_eq!(d.quotients, vec![r.one()]);
        assert!(d.remainder.is_zero());

        let d = multivariate_divide(&r.var(1), &[r.var(0)], &MonomialOrder::Lex).unwrap();
        assert!(d.quotients[0].is_zero());
        assert_eq!(d.remainder, r.var(1));
    }

    #[test]
    fn division_errors() {
        let r = xy();
        assert_eq!(
            multivariate_divide(&r.var(0), &[], &MonomialOrder::Lex),
            Err(PolyError::NoDivisors)
        );
        assert_eq!(
            multivariate_divide(&r.var(0), &[r.var(1), r.zero()], &MonomialOrder::Lex),
            Err(PolyError::ZeroDivisor(1))
        );
    }

    #[test]
    fn s_polynomial_examples() {
        let r = xy();
        let f = poly(&r, &[(1, &[2, 0]), (1, &[0, 1])]);
        let g = poly(&r, &[(1, &[1, 1]), (1, &[0, 0])]);
        let s = s_polynomial(&f, &g, &MonomialOrder::Lex).unwrap();
        assert_eq!(s, poly(&r, &[(1, &[0, 2]), (-1, &[1, 0])]));
        assert!(s_polynomial(&f, &f, &MonomialOrder::Lex).unwrap().is_zero());
        assert!(s_polynomial(&r.var(0), &r.var(1), &MonomialOrder::Lex)
            .unwrap()
            .is_zero());
        assert!(s_polynomial(&f, &r.zero(), &MonomialOrder::Lex).is_err());
    }

    #[test]
    fn diagonal_examples() {
        let r = Ring::indexed("x", 5);
        let f = &(&r.var(1) + &r.var(4)) - &r.var(0).scale(&int(2));
        assert!(f.substitute_diagonal().is_zero());
        let g = &(&r.var(0) + &r.var(1)) + &r.one();
        let t = Ring::new(["t"]);
        assert_eq!(
            g.substitute_diagonal(),
            &t.var(0).scale(&int(2)) + &t.one()
        );
        let h = poly(&r, &[(1, &[1, 1, 1, 0, 0]), (-1, &[0, 0, 0, 3, 0])]);
        assert!(h.substitute_diagonal().is_zero());
    }

    #[test]
    fn rendering() {
        let r = Ring::indexed("x", 3);
        let f = Polynomial::from_terms(
            &r,
            [
                (mono(&[2, 1, 0]), int(3)),
                (mono(&[0, 0, 1]), ratio(-1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(f.to_string(), "3*x1^2*x2 - 1/2*x3");
        assert_eq!(r.zero().to_string(), "0");
        assert_eq!((-&r.var(0)).to_string(), "-x1");
        assert_eq!((&r.var(0) - &r.one()).to_string(), "x1 - 1");
        let g = poly(&r, &[(1, &[1, 0, 0]), (1, &[0, 2, 0])]);
        assert_eq!(g.display_with(&MonomialOrder::GrLex).to_string(), "x2^2 + x1");
    }

    #[test]
    fn eval_at_point() {
        let r = xy();
        let f = poly(&r, &[(1, &[2, 0]), (-3, &[0, 1]), (1, &[0, 0])]);
        assert_eq!(f.eval(&[int(2), ratio(1, 3)]).unwrap(), int(4));
        assert!(f.eval(&[int(1)]).is_err());
    }
}
