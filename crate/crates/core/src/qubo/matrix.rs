use std::collections::HashMap;
use std::fmt::Write as _;

use super::Hamiltonian;
use crate::error::{Error, Result};

/// Accumulates quadratic terms before freezing them into a [`QuboMatrix`].
#[derive(Debug, Clone)]
pub struct QuboBuilder {
    dimension: usize,
    terms: HashMap<(usize, usize), f64>,
    constant: f64,
}

impl QuboBuilder {
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension,
            terms: HashMap::new(),
            constant: 0.0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Adds `coeff · x_a · x_b`. Diagonal terms (`a == b`) are linear since
    /// `x² = x` for binary variables.
    pub fn add(&mut self, a: usize, b: usize, coeff: f64) {
        assert!(
            a < self.dimension && b < self.dimension,
            "term ({a}, {b}) outside dimension {}",
            self.dimension
        );
        if coeff != 0.0 {
            *self.terms.entry((a.min(b), a.max(b))).or_insert(0.0) += coeff;
        }
    }

    pub fn add_constant(&mut self, c: f64) {
        self.constant += c;
    }

    /// Adds `scale · (Σ c_a x_a + offset)²`.
    pub fn add_squared_linear(&mut self, linear: &[(usize, f64)], offset: f64, scale: f64) {
        for (p, &(a, ca)) in linear.iter().enumerate() {
            self.add(a, a, scale * (ca * ca + 2.0 * offset * ca));
            for &(b, cb) in &linear[p + 1..] {
                self.add(a, b, scale * 2.0 * ca * cb);
            }
        }
        self.constant += scale * offset * offset;
    }

    pub fn add_matrix(&mut self, other: &QuboMatrix, scale: f64) -> Result<()> {
        if other.dimension() != self.dimension {
            return Err(Error::Dimension {
                expected: self.dimension,
                got: other.dimension(),
            });
        }
        for &(a, b, c) in other.terms() {
            self.add(a, b, scale * c);
        }
        self.constant += scale * other.constant();
        Ok(())
    }

    pub fn finish(self) -> QuboMatrix {
        let mut terms: Vec<(usize, usize, f64)> = self
            .terms
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|((a, b), c)| (a, b, c))
            .collect();
        terms.sort_unstable_by_key(|&(a, b, _)| (a, b));
        QuboMatrix::from_sorted(self.dimension, terms, self.constant)
    }
}

/// Sparse upper-triangular QUBO: `E(x) = Σ_{a≤b} W_ab x_a x_b + constant`.
///
/// Off-diagonal couplings are also indexed per variable so a flip updates
/// the cached local fields of its neighbours only.
#[derive(Debug, Clone)]
pub struct QuboMatrix {
    dimension: usize,
    terms: Vec<(usize, usize, f64)>,
    constant: f64,
    diagonal: Vec<f64>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    couplings: Vec<f64>,
}

impl QuboMatrix {
    pub fn zero(dimension: usize) -> Self {
        Self::from_sorted(dimension, Vec::new(), 0.0)
    }

    fn from_sorted(dimension: usize, terms: Vec<(usize, usize, f64)>, constant: f64) -> Self {
        let mut diagonal = vec![0.0; dimension];
        let mut counts = vec![0usize; dimension + 1];
        for &(a, b, c) in &terms {
            if a == b {
                diagonal[a] = c;
            } else {
                counts[a + 1] += 1;
                counts[b + 1] += 1;
            }
        }
        for i in 0..dimension {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let mut fill = offsets.clone();
        let mut neighbors = vec![0; offsets[dimension]];
        let mut couplings = vec![0.0; offsets[dimension]];
        for &(a, b, c) in terms.iter().filter(|t| t.0 != t.1) {
            neighbors[fill[a]] = b;
            couplings[fill[a]] = c;
            fill[a] += 1;
            neighbors[fill[b]] = a;
            couplings[fill[b]] = c;
            fill[b] += 1;
        }
        Self {
            dimension,
            terms,
            constant,
            diagonal,
            offsets,
            neighbors,
            couplings,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Non-zero terms `(a, b, coeff)` with `a ≤ b`, sorted.
    pub fn terms(&self) -> &[(usize, usize, f64)] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, a: usize, b: usize) -> f64 {
        let key = (a.min(b), a.max(b));
        self.terms
            .binary_search_by_key(&key, |&(x, y, _)| (x, y))
            .map_or(0.0, |i| self.terms[i].2)
    }

    fn row(&self, a: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[a]..self.offsets[a + 1];
        self.neighbors[r.clone()]
            .iter()
            .copied()
            .zip(self.couplings[r].iter().copied())
    }

    /// Serializes as `N constant` followed by one `a b coeff` line per term.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.dimension, self.constant);
        for &(a, b, c) in &self.terms {
            let _ = writeln!(out, "{a} {b} {c}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let bad = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_owned(),
        };
        let (line, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let mut head = header.split_whitespace();
        let dimension: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(line, "invalid dimension"))?;
        let constant: f64 = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(line, "invalid constant"))?;
        let mut builder = QuboBuilder::new(dimension);
        builder.add_constant(constant);
        for (line, l) in lines {
            let cols: Vec<&str> = l.split_whitespace().collect();
            if cols.len() != 3 {
                return Err(bad(line, "expected `a b coeff`"));
            }
            let a: usize = cols[0].parse().map_err(|_| bad(line, "invalid index"))?;
            let b: usize = cols[1].parse().map_err(|_| bad(line, "invalid index"))?;
            let c: f64 = cols[2].parse().map_err(|_| bad(line, "invalid coefficient"))?;
            if a >= dimension || b >= dimension {
                return Err(bad(line, "index outside dimension"));
            }
            builder.add(a, b, c);
        }
        Ok(builder.finish())
    }
}

impl Hamiltonian for QuboMatrix {
    /// Local field per variable: `W_aa + Σ_{b≠a} W_ab x_b`.
    type Fields = Vec<f64>;

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn energy(&self, bits: &[bool]) -> f64 {
        let mut e = self.constant;
        for &(a, b, c) in &self.terms {
            if bits[a] && bits[b] {
                e += c;
            }
        }
        e
    }

    fn init_fields(&self, bits: &[bool]) -> Vec<f64> {
        (0..self.dimension)
            .map(|a| {
                self.diagonal[a]
                    + self
                        .row(a)
                        .filter(|&(b, _)| bits[b])
                        .map(|(_, c)| c)
                        .sum::<f64>()
            })
            .collect()
    }

    #[inline]
    fn flip_delta(&self, fields: &Vec<f64>, bits: &[bool], a: usize) -> f64 {
        if bits[a] {
            -fields[a]
        } else {
            fields[a]
        }
    }

    fn commit_flip(&self, fields: &mut Vec<f64>, bits: &[bool], a: usize) {
        let sign = if bits[a] { -1.0 } else { 1.0 };
        for (b, c) in self.row(a) {
            fields[b] += sign * c;
        }
    }
}
