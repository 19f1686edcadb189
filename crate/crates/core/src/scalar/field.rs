//! Elements of the rational function field Q(i)(p1,...,pm), stored as
//! reduced fractions of sparse polynomials with a canonical normal form:
//! gcd(num, den) = 1 and den monic under graded-lex order. Equality of
//! normal forms is exact equality in the field.

use super::gaussian::GaussianRational;
use super::poly::{poly_gcd, MultiPoly, VarSet};
use crate::error::EngineError;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl Scalar {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Scalar, EngineError> {
        if den.is_zero() {
            return Err(EngineError::DivisionByZero);
        }
        Ok(Scalar::reduce(num, den))
    }

    fn reduce(num: MultiPoly, den: MultiPoly) -> Scalar {
        if num.is_zero() {
            return Scalar {
                num,
                den: MultiPoly::one(den.vars.clone()),
            };
        }
        let g = poly_gcd(&num, &den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        // Monic denominator fixes the representative.
        let lc = d.leading().unwrap().1.clone();
        if !lc.is_one() {
            let inv = lc.inv();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        Scalar { num: n, den: d }
    }

    pub fn vars(&self) -> &VarSet {
        &self.num.vars
    }

    pub fn zero(vars: VarSet) -> Scalar {
        Scalar {
            num: MultiPoly::zero(vars.clone()),
            den: MultiPoly::one(vars),
        }
    }

    pub fn one(vars: VarSet) -> Scalar {
        Scalar {
            num: MultiPoly::one(vars.clone()),
            den: MultiPoly::one(vars),
        }
    }

    pub fn from_int(vars: VarSet, n: i64) -> Scalar {
        Scalar::constant(vars, GaussianRational::from_int(n))
    }

    pub fn constant(vars: VarSet, c: GaussianRational) -> Scalar {
        Scalar {
            num: MultiPoly::constant(vars.clone(), c),
            den: MultiPoly::one(vars),
        }
    }

    pub fn i(vars: VarSet) -> Scalar {
        Scalar::constant(vars, GaussianRational::i())
    }

    pub fn var(vars: VarSet, idx: usize) -> Scalar {
        Scalar {
            num: MultiPoly::var(vars.clone(), idx),
            den: MultiPoly::one(vars),
        }
    }

    /// The named parameter as a field element; errors on unknown names.
    pub fn param(vars: &VarSet, name: &str) -> Result<Scalar, EngineError> {
        match vars.index_of(name) {
            Some(i) => Ok(Scalar::var(vars.clone(), i)),
            None => Err(EngineError::UnknownIdentifier {
                name: name.to_string(),
                offset: 0,
            }),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        Scalar::reduce(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        Scalar::reduce(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, EngineError> {
        if other.is_zero() {
            return Err(EngineError::DivisionByZero);
        }
        Ok(Scalar::reduce(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn inv(&self) -> Result<Scalar, EngineError> {
        Scalar::one(self.vars().clone()).div(self)
    }

    pub fn pow(&self, n: i64) -> Result<Scalar, EngineError> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut r = Scalar::one(self.vars().clone());
        for _ in 0..n {
            r = r.mul(self);
        }
        Ok(r)
    }

    /// Renormalises; a no-op on values built through the public API,
    /// kept as the idempotence hook for tests.
    pub fn normalize(&self) -> Scalar {
        Scalar::reduce(self.num.clone(), self.den.clone())
    }

    /// Exact substitution of parameters by field elements (possibly in
    /// the remaining parameters). Errors if any denominator vanishes.
    pub fn substitute(&self, bindings: &BTreeMap<String, Scalar>) -> Result<Scalar, EngineError> {
        let n = eval_poly(&self.num, bindings)?;
        let d = eval_poly(&self.den, bindings)?;
        if d.is_zero() {
            return Err(EngineError::DenominatorVanishes);
        }
        n.div(&d)
    }

    /// Rational constant value if no parameters occur.
    pub fn constant_value(&self) -> Option<GaussianRational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(&n / &d)
    }
}

fn eval_poly(p: &MultiPoly, bindings: &BTreeMap<String, Scalar>) -> Result<Scalar, EngineError> {
    let vars = &p.vars;
    let mut acc = Scalar::zero(vars.clone());
    for (m, c) in &p.terms {
        let mut term = Scalar::constant(vars.clone(), c.clone());
        for (v, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let base = match bindings.get(&vars.names()[v]) {
                Some(s) => s.clone(),
                None => Scalar::var(vars.clone(), v),
            };
            term = term.mul(&base.pow(e as i64)?);
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Rendering emits the parse grammar: `num` when the denominator is 1,
/// otherwise `num/den` with parentheses around composite operands.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &MultiPoly| {
            let s = p.to_string();
            if p.terms.len() > 1 || s.contains('*') || s.contains('^') || s.starts_with('-') {
                format!("({})", s)
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}
