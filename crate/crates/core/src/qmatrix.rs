//! The digit matrix: validation, column lookup, JSON form, and closed-form
//! tail sums along the extremal digit choices.

use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremes::AnalyticExtremes;
use crate::periodic::{self, Term};
use crate::rational::{format_rational, is_positive, parse_rational, Rational};

/// One column `q_{0,j}, ..., q_{m_j,j}` of the matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Column {
    entries: Vec<Rational>,
}

impl Column {
    /// Unchecked constructor; [`QMatrix::validate`] does the checking.
    pub fn new(entries: Vec<Rational>) -> Self {
        Column { entries }
    }

    /// `d` equal entries `1/d`.
    pub fn uniform(d: u64) -> Self {
        let q = Rational::new(1.into(), d.into());
        Column { entries: vec![q; d as usize] }
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    /// Largest admissible digit `m_j`.
    pub fn m(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn q(&self, i: usize) -> &Rational {
        &self.entries[i]
    }

    /// `a_{i,j} = q_{0,j} + ... + q_{i-1,j}`; zero for `i = 0`.
    pub fn a(&self, i: usize) -> Rational {
        self.entries[..i].iter().sum()
    }

    pub fn max(&self) -> &Rational {
        self.entries.iter().max().expect("validated columns are nonempty")
    }
}

/// Which digit an extremal tail takes in a column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DigitChoice {
    Zero,
    Max,
}

/// Per-parity digit choice, the only shape of selector the extremal tails use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParitySelector {
    pub odd: DigitChoice,
    pub even: DigitChoice,
}

impl ParitySelector {
    pub const fn new(odd: DigitChoice, even: DigitChoice) -> Self {
        ParitySelector { odd, even }
    }

    pub fn digit(&self, column: &Column, j: usize) -> usize {
        let choice = if j % 2 == 1 { self.odd } else { self.even };
        match choice {
            DigitChoice::Zero => 0,
            DigitChoice::Max => column.m(),
        }
    }
}

/// Serialized matrix: rationals as `"p/q"` strings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMatrix {
    #[serde(default)]
    pub prefix: Vec<Vec<String>>,
    pub cycle: Vec<Vec<String>>,
}

impl RawMatrix {
    fn parse_columns(cols: &[Vec<String>]) -> Result<Vec<Column>> {
        cols.iter()
            .map(|col| col.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>().map(Column::new))
            .collect()
    }
}

/// Eventually periodic, column-stochastic digit matrix.
///
/// Columns `1..=P` come from the prefix, later columns repeat the cycle. The
/// stored cycle always has even length (odd input cycles are doubled) so that
/// a column and its parity are both periodic with [`QMatrix::cycle_len`].
#[derive(Debug)]
pub struct QMatrix {
    prefix: Vec<Column>,
    cycle: Vec<Column>,
    declared_cycle_len: usize,
    extremes: OnceLock<AnalyticExtremes>,
}

impl Clone for QMatrix {
    fn clone(&self) -> Self {
        QMatrix {
            prefix: self.prefix.clone(),
            cycle: self.cycle.clone(),
            declared_cycle_len: self.declared_cycle_len,
            extremes: OnceLock::new(),
        }
    }
}

impl PartialEq for QMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.prefix == other.prefix && self.cycle == other.cycle && self.declared_cycle_len == other.declared_cycle_len
    }
}

impl Eq for QMatrix {}

impl QMatrix {
    /// Checks positivity, unit column sums and vanishing of every infinite
    /// digit product, then normalizes the cycle to even length.
    ///
    /// For an eventually periodic matrix, `prod_j q_{i_j,j} -> 0` for every
    /// digit choice iff the product of column maxima over one cycle is `< 1`.
    pub fn validate(prefix: Vec<Column>, cycle: Vec<Column>) -> Result<QMatrix> {
        if cycle.is_empty() {
            return Err(Error::EmptyCycle);
        }
        for (idx, col) in prefix.iter().chain(cycle.iter()).enumerate() {
            let column = idx + 1;
            if col.entries.is_empty() {
                return Err(Error::EmptyColumn { column });
            }
            if let Some((index, value)) = col.entries.iter().enumerate().find(|(_, q)| !is_positive(q)) {
                return Err(Error::NonPositiveEntry { column, index, value: value.clone() });
            }
            let sum: Rational = col.entries.iter().sum();
            if !sum.is_one() {
                return Err(Error::ColumnSumNotOne { column, sum });
            }
        }
        let max_product: Rational = cycle.iter().map(|c| c.max().clone()).product();
        if max_product >= Rational::one() {
            return Err(Error::Property3Violated { max_product });
        }
        if let Some(pos) = cycle.iter().position(|c| c.m() == 0) {
            return Err(Error::SingleDigitCycleColumn { column: prefix.len() + pos + 1 });
        }

        let declared_cycle_len = cycle.len();
        let cycle = if cycle.len() % 2 == 1 { cycle.iter().chain(cycle.iter()).cloned().collect() } else { cycle };
        Ok(QMatrix { prefix, cycle, declared_cycle_len, extremes: OnceLock::new() })
    }

    pub fn from_raw(raw: &RawMatrix) -> Result<QMatrix> {
        let prefix = RawMatrix::parse_columns(&raw.prefix)?;
        let cycle = RawMatrix::parse_columns(&raw.cycle)?;
        QMatrix::validate(prefix, cycle)
    }

    pub fn from_json(text: &str) -> Result<QMatrix> {
        let raw: RawMatrix = serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
        QMatrix::from_raw(&raw)
    }

    /// Inverse of [`QMatrix::from_raw`]; the cycle is emitted as declared.
    pub fn to_raw(&self) -> RawMatrix {
        let render = |cols: &[Column]| -> Vec<Vec<String>> {
            cols.iter().map(|c| c.entries.iter().map(format_rational).collect()).collect()
        };
        RawMatrix { prefix: render(&self.prefix), cycle: render(&self.cycle[..self.declared_cycle_len]) }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("string matrices always serialize")
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    /// Stored (even) cycle length.
    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    pub fn declared_cycle_len(&self) -> usize {
        self.declared_cycle_len
    }

    pub fn prefix(&self) -> &[Column] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Column] {
        &self.cycle
    }

    /// Column `j` (1-based).
    pub fn column(&self, j: usize) -> &Column {
        assert!(j >= 1, "columns are numbered from 1");
        if j <= self.prefix.len() {
            &self.prefix[j - 1]
        } else {
            &self.cycle[(j - self.prefix.len() - 1) % self.cycle.len()]
        }
    }

    pub fn m(&self, j: usize) -> usize {
        self.column(j).m()
    }

    pub fn q(&self, i: usize, j: usize) -> &Rational {
        self.column(j).q(i)
    }

    /// Prefix columns with a single digit. Allowed, but worth flagging.
    pub fn warnings(&self) -> Vec<usize> {
        self.prefix.iter().enumerate().filter(|(_, c)| c.m() == 0).map(|(i, _)| i + 1).collect()
    }

    /// Last column index before which positions may be aperiodic.
    pub(crate) fn settle(&self, start: usize) -> usize {
        self.prefix.len().max(start.saturating_sub(1))
    }

    /// `sum_{n>=start} coeff(n) * prod_{j=start}^{n} q_{chosen(j),j}`.
    ///
    /// `coeff` must depend only on the column and the parity of `n` beyond
    /// the prefix (i.e. be periodic with [`QMatrix::cycle_len`]); every tail
    /// used by the cylinder geometry is of that kind.
    pub fn tail_product_sum(
        &self,
        start: usize,
        selector: ParitySelector,
        coeff: impl Fn(usize) -> Rational,
    ) -> Rational {
        assert!(start >= 1);
        let settle = self.settle(start);
        let term = |n: usize| {
            let col = self.column(n);
            let f = col.q(selector.digit(col, n)).clone();
            let w = coeff(n);
            Term::new(if w.is_zero() { w } else { w * &f }, f)
        };
        let prefix: Vec<Term> = (start..=settle).map(term).collect();
        let cycle: Vec<Term> = (settle + 1..=settle + self.cycle_len()).map(term).collect();
        periodic::sum(&prefix, &cycle)
    }

    /// Exact infima/suprema of the analytic nega-series tails, computed once.
    pub fn analytic_extremes(&self) -> &AnalyticExtremes {
        self.extremes.get_or_init(|| AnalyticExtremes::compute(self))
    }
}
