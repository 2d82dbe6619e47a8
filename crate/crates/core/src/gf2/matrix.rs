use super::{BitVector, Gf2Error};

/// A rectangular matrix over GF(2), stored as rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    cols: usize,
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        Self { rows: Vec::new(), cols }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self, Gf2Error> {
        for r in &rows {
            if r.len() != cols {
                return Err(Gf2Error::LengthMismatch {
                    left: cols,
                    right: r.len(),
                });
            }
        }
        Ok(Self { rows, cols })
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<(), Gf2Error> {
        if row.len() != self.cols {
            return Err(Gf2Error::LengthMismatch {
                left: self.cols,
                right: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rank(&self) -> usize {
        rref(self).num_rows()
    }

    /// Matrix-vector product `M v`.
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            out.set(i, r.dot(v));
        }
        out
    }
}

/// Reduced row-echelon form with zero rows dropped.
pub fn rref(m: &BitMatrix) -> BitMatrix {
    let mut rows: Vec<BitVector> = m.rows.clone();
    let mut pivot_row = 0;
    for col in 0..m.cols {
        let Some(found) = (pivot_row..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    BitMatrix { rows, cols: m.cols }
}
