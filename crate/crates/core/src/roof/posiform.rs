use crate::qubo::Qubo;
use crate::scalar::Scalar;

/// A variable or its complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, negated: true }
    }

    pub fn value(&self, x: &[u8]) -> u8 {
        if self.negated {
            1 - x[self.var]
        } else {
            x[self.var]
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Term<S> {
    Unary(Literal, S),
    Pair(Literal, Literal, S),
}

/// `constant + sum of nonnegative multiples of literal products`.
#[derive(Clone, Debug, PartialEq)]
pub struct Posiform<S> {
    pub n: usize,
    pub constant: S,
    pub terms: Vec<Term<S>>,
}

impl<S: Scalar> Posiform<S> {
    pub fn evaluate(&self, x: &[u8]) -> S {
        self.terms.iter().fold(self.constant.clone(), |e, t| match t {
            Term::Unary(u, c) if u.value(x) == 1 => e + c.clone(),
            Term::Pair(u, v, c) if u.value(x) == 1 && v.value(x) == 1 => e + c.clone(),
            _ => e,
        })
    }
}

/// Rewrites negative couplings as `-b x_i (1 - x_j)` and negative linear
/// terms as `a - a (1 - x_i)` so every coefficient is nonnegative.
pub fn to_posiform<S: Scalar>(q: &Qubo<S>) -> Posiform<S> {
    let n = q.n();
    let mut lin: Vec<S> = (0..n).map(|i| q.linear(i)).collect();
    let mut terms = Vec::new();
    for (i, j, b) in q.quadratic_terms() {
        if b > &S::zero() {
            terms.push(Term::Pair(Literal::pos(i), Literal::pos(j), b.clone()));
        } else {
            terms.push(Term::Pair(Literal::pos(i), Literal::neg(j), -b.clone()));
            lin[i] = lin[i].clone() + b.clone();
        }
    }
    let mut constant = q.offset().clone();
    for (i, a) in lin.into_iter().enumerate() {
        if a > S::zero() {
            terms.push(Term::Unary(Literal::pos(i), a));
        } else if a < S::zero() {
            constant = constant + a.clone();
            terms.push(Term::Unary(Literal::neg(i), -a));
        }
    }
    Posiform { n, constant, terms }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_negative_variable() {
        let mut q = Qubo::<f64>::new(1);
        q.add_linear(0, -2.0);
        let p = to_posiform(&q);
        assert_eq!(p.constant, -2.0);
        assert_eq!(p.terms, vec![Term::Unary(Literal::neg(0), 2.0)]);
    }

    #[test]
    fn zero_qubo() {
        let p = to_posiform(&Qubo::<f64>::new(3));
        assert_eq!(p.constant, 0.0);
        assert!(p.terms.is_empty());
    }
}
