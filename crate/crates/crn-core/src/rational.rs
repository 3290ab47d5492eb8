//! Exact rational scalars, vectors and dense matrices.
//!
//! Every structural decision in this crate is made over `BigRational`;
//! floating point only appears in the numerical probe.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

pub type Rational = BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for a fraction `p/q`.
pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses "p" or "p/q". Used by file formats and witness round-trips.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((p, q)) => {
            let p = p.trim().parse::<BigInt>().ok()?;
            let q = q.trim().parse::<BigInt>().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Good enough for desk-scale magnitudes; the exact value stays rational.
    let nf = num.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = den.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut m = Self::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `M v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// `wᵀ M` for a row vector `w`.
    pub fn left_mul(&self, w: &[Rational]) -> Vec<Rational> {
        assert_eq!(w.len(), self.rows, "dimension mismatch");
        (0..self.cols)
            .map(|j| (0..self.rows).fold(Rational::zero(), |acc, i| acc + self.get(i, j) * &w[i]))
            .collect()
    }

    /// Rank over the rationals by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |m: &Vec<Rational>, i: usize, j: usize| m[i * cols + j].clone();
        let mut rank = 0;
        let mut pivot_row = 0;
        for col in 0..cols {
            let Some(sel) = (pivot_row..rows).find(|&r| !at(&m, r, col).is_zero()) else {
                continue;
            };
            for j in 0..cols {
                m.swap(pivot_row * cols + j, sel * cols + j);
            }
            let pivot = at(&m, pivot_row, col);
            for r in (pivot_row + 1)..rows {
                let factor = at(&m, r, col) / &pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in col..cols {
                    let sub = &factor * at(&m, pivot_row, j);
                    m[r * cols + j] = at(&m, r, j) - sub;
                }
            }
            rank += 1;
            pivot_row += 1;
            if pivot_row == rows {
                break;
            }
        }
        rank
    }
}

/// Scales a nonnegative rational vector to integers by the LCM of denominators.
pub fn scale_to_integers(v: &[Rational]) -> Vec<Rational> {
    let mut lcm = BigInt::one();
    for r in v {
        lcm = lcm.lcm(r.denom());
    }
    let factor = Rational::from_integer(lcm);
    v.iter().map(|r| r * &factor).collect()
}

pub fn is_strictly_positive(v: &[Rational]) -> bool {
    v.iter().all(|r| r.is_positive())
}

pub fn is_nonnegative(v: &[Rational]) -> bool {
    v.iter().all(|r| !r.is_negative())
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(|r| r.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_singular_matrix() {
        // two proportional rows
        let m = RationalMatrix::from_fn(2, 3, |i, j| rat((i as i64 + 1) * (j as i64 + 1)));
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_full() {
        let m = RationalMatrix::from_fn(3, 3, |i, j| if i == j { rat(1) } else { rat(0) });
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn parse_fractions() {
        assert_eq!(parse_rational("3/4"), Some(frac(3, 4)));
        assert_eq!(parse_rational("7"), Some(rat(7)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn integer_scaling() {
        let v = vec![frac(1, 2), frac(2, 3), rat(1)];
        let scaled = scale_to_integers(&v);
        assert_eq!(scaled, vec![rat(3), rat(4), rat(6)]);
    }
}
