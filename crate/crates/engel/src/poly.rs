//! Sparse multivariate polynomials over one or two parameters.
//!
//! These are the first-class representation of parametrized submanifolds:
//! exact derivatives, exact composition with left translations and
//! dilations, reproducible evaluation.

/// Polynomial in `N` variables as a list of (exponent tuple, coefficient)
/// terms. Terms with equal exponents are merged on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<const N: usize> {
    terms: Vec<([u32; N], f64)>,
}

impl<const N: usize> Poly<N> {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![([0; N], c)])
    }

    /// The monomial for variable `axis`.
    pub fn var(axis: usize) -> Self {
        assert!(axis < N);
        let mut e = [0; N];
        e[axis] = 1;
        Poly::new(vec![(e, 1.0)])
    }

    pub fn new(terms: Vec<([u32; N], f64)>) -> Self {
        let mut merged: Vec<([u32; N], f64)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            if let Some(slot) = merged.iter_mut().find(|(f, _)| *f == e) {
                slot.1 += c;
            } else {
                merged.push((e, c));
            }
        }
        merged.retain(|(_, c)| *c != 0.0);
        merged.sort_by_key(|a| a.0);
        Poly { terms: merged }
    }

    pub fn terms(&self) -> &[([u32; N], f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, u: [f64; N]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (exp, x) in e.iter().zip(u) {
                t *= x.powi(*exp as i32);
            }
            acc += t;
        }
        acc
    }

    /// Exact partial derivative with respect to variable `axis`.
    pub fn partial(&self, axis: usize) -> Poly<N> {
        assert!(axis < N);
        let mut out = Vec::new();
        for (e, c) in &self.terms {
            if e[axis] > 0 {
                let mut f = *e;
                f[axis] -= 1;
                out.push((f, c * e[axis] as f64));
            }
        }
        Poly::new(out)
    }

    pub fn scaled(&self, s: f64) -> Poly<N> {
        Poly::new(self.terms.iter().map(|(e, c)| (*e, c * s)).collect())
    }

    pub fn add(&self, other: &Poly<N>) -> Poly<N> {
        let mut t = self.terms.clone();
        t.extend_from_slice(&other.terms);
        Poly::new(t)
    }

    pub fn add_constant(&self, c: f64) -> Poly<N> {
        self.add(&Poly::constant(c))
    }
}
