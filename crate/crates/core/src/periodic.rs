//! Closed-form sums of eventually periodic product series.
//!
//! Every expansion in this crate has the shape
//! `sum_{k>=1} w_k * prod_{j<k} f_j` where the pairs `(w_k, f_k)` repeat with
//! a fixed period after finitely many positions. Writing the periodic part as
//! `C = B + Pi * C` (with `B` the sum over one period and `Pi` the product of
//! its factors) gives `C = B / (1 - Pi)`, so the infinite sum is exact.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// One position of a product series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub weight: Rational,
    pub factor: Rational,
}

impl Term {
    pub fn new(weight: Rational, factor: Rational) -> Self {
        Term { weight, factor }
    }
}

/// Finite sum `sum_k w_k prod_{j<k} f_j` together with `prod_k f_k`.
pub fn partial(terms: &[Term]) -> (Rational, Rational) {
    let mut sum = Rational::zero();
    let mut product = Rational::one();
    for t in terms {
        if !t.weight.is_zero() {
            sum += &t.weight * &product;
        }
        product *= &t.factor;
    }
    (sum, product)
}

/// Infinite sum for `prefix` followed by `cycle` repeated forever.
///
/// Panics if the cycle's factor product is not strictly inside `(-1, 1)`;
/// callers only build cycles from validated matrices, where it always is.
pub fn sum(prefix: &[Term], cycle: &[Term]) -> Rational {
    assert!(!cycle.is_empty(), "periodic series needs a nonempty cycle");
    let (head, head_product) = partial(prefix);
    let (body, cycle_product) = partial(cycle);
    assert!(cycle_product.abs() < Rational::one(), "cycle factor product {cycle_product} does not contract");
    if body.is_zero() {
        return head;
    }
    head + head_product * body / (Rational::one() - cycle_product)
}
