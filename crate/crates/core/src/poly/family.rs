use num_bigint::BigInt;

use super::{parse_poly_lines, Monomial, MultiPoly, PolyError, VarNames};
use crate::fields::FieldCtx;
use crate::ring::{Integers, Rationals, Ring};

/// A polynomial in geometric variables `x0..x{nvars-1}` and parameters
/// `p1..p{nparams}`. Internally the parameters are variables
/// `nvars..nvars+nparams` of one polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricFamily<R: Ring> {
    poly: MultiPoly<R>,
    nvars: usize,
    nparams: usize,
    homogeneous_degree: Option<u32>,
}

impl<R: Ring> ParametricFamily<R> {
    pub fn new(poly: MultiPoly<R>, nvars: usize, nparams: usize) -> Result<Self, PolyError> {
        if poly.nvars() != nvars + nparams {
            return Err(PolyError::Arity { expected: nvars + nparams, got: poly.nvars() });
        }
        let homogeneous_degree = {
            let mut xdegs = poly.terms().map(|(m, _)| m.exps()[..nvars].iter().sum::<u32>());
            match xdegs.next() {
                Some(d) if xdegs.all(|e| e == d) => Some(d),
                _ => None,
            }
        };
        Ok(ParametricFamily { poly, nvars, nparams, homogeneous_degree })
    }

    pub fn poly(&self) -> &MultiPoly<R> {
        &self.poly
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    /// Common degree in the `x` variables, when every term shares one.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        self.homogeneous_degree
    }

    pub fn names(&self) -> VarNames {
        VarNames::family(self.nvars, self.nparams)
    }

    /// Substitutes a parameter point, leaving a polynomial in the `x` variables.
    pub fn specialize(&self, params: &[R::Elem]) -> Result<MultiPoly<R>, PolyError> {
        if params.len() != self.nparams {
            return Err(PolyError::Arity { expected: self.nparams, got: params.len() });
        }
        let r = self.poly.ring();
        if params.iter().any(|a| !r.owns(a)) {
            return Err(PolyError::ContextMismatch(format!(
                "parameter values do not belong to {r:?}"
            )));
        }
        let mut terms = Vec::with_capacity(self.poly.len());
        for (m, c) in self.poly.terms() {
            let (xs, ps) = m.exps().split_at(self.nvars);
            let mut v = c.clone();
            for (a, &e) in params.iter().zip(ps) {
                if e > 0 {
                    v = r.mul(&v, &r.pow(a, u64::from(e)));
                }
            }
            terms.push((Monomial::new(xs.to_vec()), v));
        }
        Ok(MultiPoly::from_terms(r.clone(), self.nvars, terms))
    }

    /// True when every term has degree at most one in the parameters.
    pub fn is_linear_in_params(&self) -> bool {
        self.poly
            .terms()
            .all(|(m, _)| m.exps()[self.nvars..].iter().sum::<u32>() <= 1)
    }

    /// Writes `f = c_0(x) + sum_j c_j(x) p_j`. `None` unless linear in the parameters.
    pub fn linear_parts(&self) -> Option<(MultiPoly<R>, Vec<MultiPoly<R>>)> {
        if !self.is_linear_in_params() {
            return None;
        }
        let r = self.poly.ring();
        let mut buckets: Vec<Vec<(Monomial, R::Elem)>> = vec![Vec::new(); self.nparams + 1];
        for (m, c) in self.poly.terms() {
            let (xs, ps) = m.exps().split_at(self.nvars);
            let slot = ps.iter().position(|&e| e == 1).map_or(0, |j| j + 1);
            buckets[slot].push((Monomial::new(xs.to_vec()), c.clone()));
        }
        let mut polys = buckets
            .into_iter()
            .map(|b| MultiPoly::from_terms(r.clone(), self.nvars, b));
        let c0 = polys.next().expect("constant bucket");
        Some((c0, polys.collect()))
    }

    pub fn map_ring<S: Ring>(&self, target: &S, f: impl Fn(&R::Elem) -> S::Elem) -> ParametricFamily<S> {
        ParametricFamily {
            poly: self.poly.map_ring(target, f),
            nvars: self.nvars,
            nparams: self.nparams,
            homogeneous_degree: self.homogeneous_degree,
        }
    }
}

impl ParametricFamily<Integers> {
    /// Parses a family with integer coefficients from its text form.
    pub fn parse(text: &str, nvars: usize, nparams: usize) -> Result<Self, PolyError> {
        let names = VarNames::family(nvars, nparams);
        let mut polys = parse_poly_lines(text, &names)?;
        if polys.len() != 1 {
            return Err(PolyError::Syntax {
                line: 1,
                col: 1,
                msg: format!("expected exactly one polynomial, found {}", polys.len()),
            });
        }
        let q = polys.pop().expect("one polynomial");
        let z = q.try_map_ring(&Integers, |c| {
            if c.is_integer() {
                Ok(c.numer().clone())
            } else {
                Err(PolyError::NonIntegral(c.to_string()))
            }
        })?;
        ParametricFamily::new(z, nvars, nparams)
    }

    /// Reduces the coefficients modulo the field characteristic.
    pub fn reduce(&self, field: &FieldCtx) -> ParametricFamily<FieldCtx> {
        self.map_ring(field, |c: &BigInt| field.from_bigint(c))
    }

    pub fn to_rationals(&self) -> ParametricFamily<Rationals> {
        self.map_ring(&Rationals, |c| Rationals.from_bigint(c))
    }
}

/// Infers `(nvars, nparams)` from the highest `x`/`p` indices used in `text`.
pub fn infer_family_shape(text: &str) -> (usize, usize) {
    let mut nvars = 0;
    let mut nparams = 0;
    for line in text.lines() {
        let body = line.split('#').next().unwrap_or("");
        let bytes = body.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let prev_ident = i > 0 && (bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_');
            if (c == b'x' || c == b'p') && !prev_ident {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j > i + 1 {
                    if let Ok(n) = body[i + 1..j].parse::<usize>() {
                        if c == b'x' {
                            nvars = nvars.max(n + 1);
                        } else {
                            nparams = nparams.max(n);
                        }
                    }
                }
                i = j;
            } else {
                i += 1;
            }
        }
    }
    (nvars, nparams)
}
