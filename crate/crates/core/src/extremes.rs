//! Exact infimum and supremum of the analytic nega-series tails.
//!
//! Let `x_s` be the value of a digit sequence read from column `s` with the
//! analytic signs `-a + a - a ...`, so `x_s = -(a_{i,s} + q_{i,s} x_{s+1})`.
//! Then
//!
//! ```text
//! inf x_s = -max_i (a_{i,s} + q_{i,s} sup x_{s+1})
//! sup x_s = -min_i (a_{i,s} + q_{i,s} inf x_{s+1})
//! ```
//!
//! Since `0 <= sup < 1`, the infimum always takes the largest digit `m_s`.
//! The supremum takes digit 0 for many matrices (the alternating
//! `0, m, 0, m, ...` stream) but not for all of them: when `inf x_{s+1}` is
//! close to `-1` a larger digit with a heavy column entry wins. The periodic
//! part is therefore solved by policy iteration over the digit choice of the
//! supremum, and the prefix by backward induction.

use num_traits::Zero;

use crate::periodic::{self, Term};
use crate::qmatrix::QMatrix;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyticExtremes {
    prefix_len: usize,
    cycle_len: usize,
    lower: Vec<Rational>,
    upper: Vec<Rational>,
    sup_digit: Vec<usize>,
    inf_digit: Vec<usize>,
    zero_attains_sup: Vec<bool>,
}

impl AnalyticExtremes {
    pub fn compute(m: &QMatrix) -> Self {
        let p = m.prefix_len();
        let l = m.cycle_len();
        let n = p + l;
        let mut lower = vec![Rational::zero(); n + 1];
        let mut upper = vec![Rational::zero(); n + 1];
        let mut sup_digit = vec![0usize; n + 1];

        // Periodic part: positions p+1 ..= p+l, indexed by offset 0..l.
        let col = |off: usize| m.column(p + 1 + off);
        let mut policy = vec![0usize; l];
        let (cyc_lower, cyc_upper) = loop {
            let up: Vec<Rational> = (0..l)
                .map(|start| {
                    // U_s = (-a_{pi,s} + q_{pi,s} a_{m,s+1}) + q_{pi,s} q_{m,s+1} U_{s+2}
                    let terms: Vec<Term> = (0..l / 2)
                        .map(|k| {
                            let s = (start + 2 * k) % l;
                            let (c0, c1) = (col(s), col((s + 1) % l));
                            let (d, top) = (policy[s], c1.m());
                            Term::new(c0.q(d) * c1.a(top) - c0.a(d), c0.q(d) * c1.q(top))
                        })
                        .collect();
                    periodic::sum(&[], &terms)
                })
                .collect();
            let low: Vec<Rational> = (0..l)
                .map(|s| {
                    let c = col(s);
                    -(c.a(c.m()) + c.q(c.m()) * &up[(s + 1) % l])
                })
                .collect();

            let mut changed = false;
            for s in 0..l {
                let c = col(s);
                let next_low = &low[(s + 1) % l];
                let value = |i: usize| -(c.a(i) + c.q(i) * next_low);
                let current = value(policy[s]);
                let (best_i, best) = best_digit(c.m(), value);
                if best > current {
                    policy[s] = best_i;
                    changed = true;
                }
            }
            if !changed {
                break (low, up);
            }
        };
        for off in 0..l {
            lower[p + 1 + off] = cyc_lower[off].clone();
            upper[p + 1 + off] = cyc_upper[off].clone();
            sup_digit[p + 1 + off] = policy[off];
        }

        // Prefix by backward induction; column p+1 is the first cycle column.
        for s in (1..=p).rev() {
            let c = m.column(s);
            let next_low = lower[s + 1].clone();
            let next_up = upper[s + 1].clone();
            let (best_i, best) = best_digit(c.m(), |i| -(c.a(i) + c.q(i) * &next_low));
            upper[s] = best;
            sup_digit[s] = best_i;
            lower[s] = -(c.a(c.m()) + c.q(c.m()) * next_up);
        }

        let inf_digit = (0..=n).map(|s| if s == 0 { 0 } else { m.m(s) }).collect();
        let mut ext = AnalyticExtremes {
            prefix_len: p,
            cycle_len: l,
            lower,
            upper,
            sup_digit,
            inf_digit,
            zero_attains_sup: vec![true; n + 1],
        };
        for s in 1..=n {
            let c = m.column(s);
            let zero_value = -(c.q(0) * ext.inf(s + 1));
            ext.zero_attains_sup[s] = &zero_value == ext.sup(s);
        }
        ext
    }

    fn index(&self, s: usize) -> usize {
        assert!(s >= 1);
        if s <= self.prefix_len {
            s
        } else {
            self.prefix_len + 1 + (s - self.prefix_len - 1) % self.cycle_len
        }
    }

    /// Infimum of the analytic tail read from column `s`.
    pub fn inf(&self, s: usize) -> &Rational {
        &self.lower[self.index(s)]
    }

    /// Supremum of the analytic tail read from column `s`.
    pub fn sup(&self, s: usize) -> &Rational {
        &self.upper[self.index(s)]
    }

    pub fn width(&self, s: usize) -> Rational {
        self.sup(s) - self.inf(s)
    }

    /// Smallest digit starting a supremum-attaining tail at column `s`.
    pub fn sup_digit(&self, s: usize) -> usize {
        self.sup_digit[self.index(s)]
    }

    pub fn inf_digit(&self, s: usize) -> usize {
        self.inf_digit[self.index(s)]
    }

    /// Digits `s, s+1, ..., s+len-1` of a tail attaining the supremum
    /// (`upper = true`) or infimum from column `s`.
    pub fn extremal_digits(&self, s: usize, len: usize, upper: bool) -> Vec<usize> {
        (0..len)
            .map(|k| {
                let pos = s + k;
                if (k % 2 == 0) == upper {
                    self.sup_digit(pos)
                } else {
                    self.inf_digit(pos)
                }
            })
            .collect()
    }

    /// True when the alternating `0, m, 0, m, ...` and `m, 0, m, 0, ...`
    /// tails are extremal from every column. Then the range endpoints and
    /// the adjacency quantities coincide with their closed forms along those
    /// two streams.
    pub fn alternating_tails_extremal(&self) -> bool {
        self.zero_attains_sup.iter().skip(1).all(|&b| b)
    }
}

/// Smallest digit maximizing `value`, and the maximum.
fn best_digit(m: usize, value: impl Fn(usize) -> Rational) -> (usize, Rational) {
    let mut best_i = 0;
    let mut best = value(0);
    for i in 1..=m {
        let v = value(i);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    (best_i, best)
}
