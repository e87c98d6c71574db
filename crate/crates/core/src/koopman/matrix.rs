use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{decimal, fraction, int, max_rational, Interval, Rational};

/// Depth-`d` restriction of a Koopman power as a Markov matrix.
///
/// Rows and columns are cells `(a, y)` in ascending residue order with the
/// fiber index varying fastest; base systems have a single fiber element.
/// Entry `[i][j]` is `mu(C_i ∩ T^k C_j) / mu(C_i)`. Storage is sparse since
/// a power of an odometer moves each base cell to exactly one other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoiningMatrix {
    depth: usize,
    lag: u64,
    fiber: u32,
    rows: Vec<Vec<(usize, Interval)>>,
}

impl JoiningMatrix {
    /// Rows must list `(column, entry)` pairs with increasing columns.
    pub fn from_rows(depth: usize, lag: u64, fiber: u32, rows: Vec<Vec<(usize, Interval)>>) -> Result<Self> {
        let n = rows.len();
        for row in &rows {
            for pair in row.windows(2) {
                if pair[0].0 >= pair[1].0 {
                    return Err(Error::InvalidArgument("matrix row columns not increasing".into()));
                }
            }
            if row.iter().any(|(c, e)| *c >= n || e.lo() < &Rational::zero()) {
                return Err(Error::InvalidArgument("matrix entry out of range or negative".into()));
            }
        }
        if fiber == 0 || !n.is_multiple_of(fiber as usize) {
            return Err(Error::InvalidArgument(format!(
                "size {n} not a multiple of fiber {fiber}"
            )));
        }
        Ok(JoiningMatrix {
            depth,
            lag,
            fiber,
            rows,
        })
    }

    pub fn from_dense(depth: usize, lag: u64, fiber: u32, dense: &[Vec<Rational>]) -> Result<Self> {
        let rows = dense
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, Interval::point(v.clone())))
                    .collect()
            })
            .collect();
        Self::from_rows(depth, lag, fiber, rows)
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i, Interval::point(Rational::one()))]).collect();
        JoiningMatrix {
            depth: 0,
            lag: 0,
            fiber: 1,
            rows,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn lag(&self) -> u64 {
        self.lag
    }

    pub fn fiber(&self) -> u32 {
        self.fiber
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(usize, Interval)>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> Interval {
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(pos) => self.rows[i][pos].1.clone(),
            Err(_) => Interval::zero(),
        }
    }

    pub fn diagonal(&self, i: usize) -> Interval {
        self.get(i, i)
    }

    pub fn row_sums(&self) -> Vec<Interval> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(_, e)| e.clone()).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<Interval> {
        let mut sums = vec![Interval::zero(); self.size()];
        for row in &self.rows {
            for (j, e) in row {
                sums[*j] = &sums[*j] + e;
            }
        }
        sums
    }

    /// Entries are nonnegative and every row and column sum admits 1.
    pub fn is_bistochastic(&self) -> bool {
        let one = Rational::one();
        self.rows.iter().flatten().all(|(_, e)| e.lo() >= &Rational::zero())
            && self.row_sums().iter().all(|s| s.contains(&one))
            && self.col_sums().iter().all(|s| s.contains(&one))
    }

    /// Exact point-valued permutation/Markov check.
    pub fn is_exactly_bistochastic(&self) -> bool {
        let one = Interval::point(Rational::one());
        self.rows.iter().flatten().all(|(_, e)| e.is_point())
            && self.row_sums().iter().all(|s| *s == one)
            && self.col_sums().iter().all(|s| *s == one)
    }

    pub fn transpose(&self) -> JoiningMatrix {
        let mut rows: Vec<Vec<(usize, Interval)>> = vec![Vec::new(); self.size()];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, e) in row {
                rows[*j].push((i, e.clone()));
            }
        }
        JoiningMatrix {
            depth: self.depth,
            lag: self.lag,
            fiber: self.fiber,
            rows,
        }
    }

    /// Sums refined blocks down to a coarser cylinder algebra: base cells
    /// are grouped by residue modulo `coarse_cells`, and entries rescale by
    /// the refinement ratio.
    pub fn coarsen(&self, coarse_depth: usize, coarse_cells: usize) -> Result<JoiningMatrix> {
        let m = self.fiber as usize;
        let fine_cells = self.size() / m;
        if coarse_cells == 0 || !fine_cells.is_multiple_of(coarse_cells) {
            return Err(Error::InvalidArgument(format!(
                "{coarse_cells} cells do not coarsen {fine_cells}"
            )));
        }
        let ratio_inv = int((fine_cells / coarse_cells) as u64);
        let n = coarse_cells * m;
        let mut acc: Vec<std::collections::BTreeMap<usize, Interval>> = vec![Default::default(); n];
        let project = |idx: usize| (idx / m % coarse_cells) * m + idx % m;
        for (i, row) in self.rows.iter().enumerate() {
            let ci = project(i);
            for (j, e) in row {
                let slot = acc[ci].entry(project(*j)).or_insert_with(Interval::zero);
                *slot = &*slot + e;
            }
        }
        let rows = acc
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|(j, e)| (j, e.scale(&(Rational::one() / &ratio_inv))))
                    .collect()
            })
            .collect();
        Ok(JoiningMatrix {
            depth: coarse_depth,
            lag: self.lag,
            fiber: self.fiber,
            rows,
        })
    }

    /// `self ⊗ Π_m` where `Π_m` has every entry `1/m`; the fiber index of
    /// the product varies fastest.
    pub fn kron_uniform(&self, m: u32) -> JoiningMatrix {
        let mu = m as usize;
        let w = Rational::new(1.into(), (m as i64).into());
        let mut rows = Vec::with_capacity(self.size() * mu);
        for row in &self.rows {
            let expanded: Vec<(usize, Interval)> = row
                .iter()
                .flat_map(|(j, e)| {
                    let scaled = e.scale(&w);
                    (0..mu).map(move |y| (j * mu + y, scaled.clone()))
                })
                .collect();
            for _ in 0..mu {
                rows.push(expanded.clone());
            }
        }
        JoiningMatrix {
            depth: self.depth,
            lag: self.lag,
            fiber: self.fiber * m,
            rows,
        }
    }

    fn entry_union(&self, other: &JoiningMatrix, i: usize) -> Vec<usize> {
        let mut cols: Vec<usize> = self.rows[i]
            .iter()
            .chain(other.rows[i].iter())
            .map(|(j, _)| *j)
            .collect();
        cols.sort_unstable();
        cols.dedup();
        cols
    }

    /// Range of `max_{ij} |self_ij - other_ij|` over all admissible values.
    pub fn sup_distance(&self, other: &JoiningMatrix) -> Result<Interval> {
        self.check_shape(other)?;
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for i in 0..self.size() {
            for j in self.entry_union(other, i) {
                let d = (&self.get(i, j) - &other.get(i, j)).abs();
                lo = max_rational(&lo, d.lo()).clone();
                hi = max_rational(&hi, d.hi()).clone();
            }
        }
        Ok(Interval::new(lo, hi))
    }

    /// `max_{ij} |mid(self_ij) - mid(other_ij)|`.
    pub fn midpoint_distance(&self, other: &JoiningMatrix) -> Result<Rational> {
        self.check_shape(other)?;
        let mut best = Rational::zero();
        for i in 0..self.size() {
            for j in self.entry_union(other, i) {
                let d = (self.get(i, j).midpoint() - other.get(i, j).midpoint()).abs();
                if d > best {
                    best = d;
                }
            }
        }
        Ok(best)
    }

    pub fn max_width(&self) -> Rational {
        self.rows
            .iter()
            .flatten()
            .map(|(_, e)| e.width())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    fn check_shape(&self, other: &JoiningMatrix) -> Result<()> {
        if self.size() != other.size() {
            return Err(Error::InvalidArgument(format!(
                "matrix sizes differ: {} vs {}",
                self.size(),
                other.size()
            )));
        }
        Ok(())
    }

    /// One CSV row per stored entry: `row,col,lo,hi,lo_decimal,hi_decimal`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,lo,hi,lo_decimal,hi_decimal\n");
        for (i, row) in self.rows.iter().enumerate() {
            for (j, e) in row {
                let _ = writeln!(
                    out,
                    "{i},{j},{},{},{},{}",
                    fraction(e.lo()),
                    fraction(e.hi()),
                    decimal(e.lo()),
                    decimal(e.hi())
                );
            }
        }
        out
    }
}
