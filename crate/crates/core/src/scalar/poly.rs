//! Sparse multivariate polynomials over Q(i) with graded-lexicographic
//! term order, plus the gcd machinery used to keep rational functions
//! reduced.

use super::gaussian::GaussianRational;
use num_traits::Zero;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Ordered list of variable names shared by all values of one field.
/// Cloning is cheap; equality is by content.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSet(Arc<Vec<String>>);

impl VarSet {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Self {
        VarSet(Arc::new(names.into_iter().map(Into::into).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

/// Exponent vector; fixed length equal to the number of variables.
/// Graded-lexicographic order: higher total degree is greater, ties
/// broken lexicographically with earlier variables more significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn constant(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller must check divisibility first.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => self.0.cmp(&other.0),
            c => c,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial; no zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    pub vars: VarSet,
    pub terms: BTreeMap<Monomial, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(vars: VarSet) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: VarSet, c: GaussianRational) -> Self {
        let mut p = MultiPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::constant(p.vars.len()), c);
        }
        p
    }

    pub fn one(vars: VarSet) -> Self {
        MultiPoly::constant(vars, GaussianRational::one())
    }

    pub fn var(vars: VarSet, idx: usize) -> Self {
        let m = Monomial::var(vars.len(), idx);
        let mut p = MultiPoly::zero(vars);
        p.terms.insert(m, GaussianRational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().next().map_or(false, |(m, c)| m.is_constant() && c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_constant())
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        if self.terms.is_empty() {
            Some(GaussianRational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = &*e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.vars, other.vars);
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.vars, other.vars);
        let mut r = MultiPoly::zero(self.vars.clone());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }

    pub fn scale(&self, c: &GaussianRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.vars.clone());
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut r = MultiPoly::one(self.vars.clone());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// Leading term under graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Exact division; panics if `self` is not a multiple of `d`.
    /// Only called on products produced by the gcd routines.
    pub fn div_exact(&self, d: &MultiPoly) -> MultiPoly {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.vars.clone());
        let (dm, dc) = {
            let (m, c) = d.leading().unwrap();
            (m.clone(), c.clone())
        };
        while let Some((rm, rc)) = rem.leading() {
            assert!(dm.divides(rm), "inexact polynomial division");
            let qm = dm.div(rm);
            let qc = rc / &dc;
            let mut t = MultiPoly::zero(self.vars.clone());
            t.terms.insert(qm, qc);
            rem = rem.sub(&t.mul(d));
            quot = quot.add(&t);
        }
        quot
    }

    /// View as a univariate polynomial in `var`: coefficient polynomials
    /// keyed by the exponent of `var`, with that exponent zeroed out.
    fn coeffs_in_var(&self, var: usize) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut m2 = m.clone();
            m2.0[var] = 0;
            out.entry(e)
                .or_insert_with(|| MultiPoly::zero(self.vars.clone()))
                .add_term(m2, c.clone());
        }
        out
    }

    fn from_coeffs_in_var(vars: VarSet, var: usize, coeffs: BTreeMap<u32, MultiPoly>) -> MultiPoly {
        let mut r = MultiPoly::zero(vars);
        for (e, p) in coeffs {
            for (m, c) in p.terms {
                let mut m2 = m;
                m2.0[var] += e;
                r.add_term(m2, c);
            }
        }
        r
    }

    /// Highest-index variable actually occurring, if any.
    fn main_var(&self) -> Option<usize> {
        (0..self.vars.len()).rev().find(|&v| self.degree_in(v) > 0)
    }

    /// Makes the leading graded-lex coefficient 1.
    pub fn monic(&self) -> MultiPoly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.inv();
                self.scale(&inv)
            }
        }
    }
}

/// gcd over Q(i)[vars], monic-normalised. Content/primitive-part
/// recursion down to univariate Euclid; adequate for the small variable
/// counts used here.
pub fn poly_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    debug_assert_eq!(a.vars, b.vars);
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let va = a.main_var();
    let vb = b.main_var();
    let v = match (va, vb) {
        (None, _) | (_, None) => return MultiPoly::one(a.vars.clone()),
        (Some(x), Some(y)) => x.max(y),
    };
    // Treat both as univariate in v with polynomial coefficients.
    let ca = a.coeffs_in_var(v);
    let cb = b.coeffs_in_var(v);
    let cont_a = content(&ca, &a.vars);
    let cont_b = content(&cb, &b.vars);
    let pa = a.div_exact(&cont_a);
    let pb = b.div_exact(&cont_b);
    let cont_gcd = poly_gcd(&cont_a, &cont_b);
    let pp_gcd = primitive_prs_gcd(&pa, &pb, v);
    cont_gcd.mul(&pp_gcd).monic()
}

fn content(coeffs: &BTreeMap<u32, MultiPoly>, vars: &VarSet) -> MultiPoly {
    let mut g = MultiPoly::zero(vars.clone());
    for p in coeffs.values() {
        g = poly_gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    if g.is_zero() {
        MultiPoly::one(vars.clone())
    } else {
        g
    }
}

/// Primitive pseudo-remainder sequence in the main variable `v`.
fn primitive_prs_gcd(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let mut f = a.clone();
    let mut g = b.clone();
    if f.degree_in(v) < g.degree_in(v) {
        std::mem::swap(&mut f, &mut g);
    }
    while !g.is_zero() {
        if g.degree_in(v) == 0 {
            // Nonzero coefficient in the eliminated variables only: the
            // primitive parts are coprime in v.
            return MultiPoly::one(a.vars.clone());
        }
        let r = pseudo_rem(&f, &g, v);
        f = g;
        g = primitive_part(&r, v);
    }
    primitive_part(&f, v)
}

fn primitive_part(p: &MultiPoly, v: usize) -> MultiPoly {
    if p.is_zero() {
        return p.clone();
    }
    let coeffs = p.coeffs_in_var(v);
    let c = content(&coeffs, &p.vars);
    p.div_exact(&c)
}

/// prem(f, g) in variable v: the remainder of lc(g)^(df-dg+1) * f by g.
fn pseudo_rem(f: &MultiPoly, g: &MultiPoly, v: usize) -> MultiPoly {
    let df = f.degree_in(v);
    let dg = g.degree_in(v);
    debug_assert!(dg > 0 && df >= dg);
    let gc = g.coeffs_in_var(v);
    let lc_g = gc.get(&dg).unwrap().clone();
    let mut r = f.clone();
    while !r.is_zero() && r.degree_in(v) >= dg {
        let dr = r.degree_in(v);
        let rc = r.coeffs_in_var(v);
        let lc_r = rc.get(&dr).unwrap().clone();
        // r <- lc_g * r - lc_r * x^(dr-dg) * g
        let mut shift: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        shift.insert(dr - dg, lc_r);
        let shifted = MultiPoly::from_coeffs_in_var(f.vars.clone(), v, shift).mul(g);
        r = r.mul(&lc_g).sub(&shifted);
    }
    r
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Leading term first (descending graded-lex), signs folded in.
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    if e == 1 {
                        self.vars.names()[v].clone()
                    } else {
                        format!("{}^{}", self.vars.names()[v], e)
                    }
                })
                .collect();
            let coeff = render_coeff(c, mono.is_empty());
            let term = if mono.is_empty() {
                coeff.unwrap_or_else(|| "1".to_string())
            } else {
                match coeff.as_deref() {
                    None => mono.join("*"),
                    Some("-1") => format!("-{}", mono.join("*")),
                    Some(cs) => format!("{}*{}", cs, mono.join("*")),
                }
            };
            if n == 0 {
                write!(f, "{}", term)?;
            } else if let Some(rest) = term.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else {
                write!(f, " + {}", term)?;
            }
        }
        Ok(())
    }
}

/// Coefficient prefix for a term: `None` means an implicit 1.
/// Mixed real/imaginary coefficients are parenthesised so the rendered
/// expression re-parses term by term.
fn render_coeff(c: &GaussianRational, standalone: bool) -> Option<String> {
    if standalone {
        return Some(c.to_string());
    }
    if c.is_one() {
        return None;
    }
    if (-c).is_one() {
        return Some("-1".to_string());
    }
    if c.re.is_zero() || c.im.is_zero() {
        Some(c.to_string())
    } else {
        Some(format!("({})", c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> VarSet {
        VarSet::new(vec!["q", "r"])
    }

    fn q() -> MultiPoly {
        MultiPoly::var(vars(), 0)
    }

    #[test]
    fn grlex_order() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![0, 2]);
        let c = Monomial(vec![1, 0]);
        assert!(a > b); // same degree, earlier variable wins
        assert!(b > c); // higher degree wins
    }

    #[test]
    fn gcd_univariate() {
        // gcd(q^4 - 1, q^2 - 1) = q^2 - 1
        let one = MultiPoly::one(vars());
        let f = q().pow(4).sub(&one);
        let g = q().pow(2).sub(&one);
        let d = poly_gcd(&f, &g);
        assert_eq!(d, g.monic());
        assert_eq!(f.div_exact(&d), q().pow(2).add(&one));
    }

    #[test]
    fn gcd_multivariate() {
        // gcd((q+r)*q, (q+r)*r) = q+r
        let s = q().add(&MultiPoly::var(vars(), 1));
        let f = s.mul(&q());
        let g = s.mul(&MultiPoly::var(vars(), 1));
        assert_eq!(poly_gcd(&f, &g), s.monic());
    }

    #[test]
    fn display_ordering() {
        let p = q().pow(2).add(&MultiPoly::one(vars())).sub(&MultiPoly::var(vars(), 1));
        assert_eq!(p.to_string(), "q^2 - r + 1");
    }
}
