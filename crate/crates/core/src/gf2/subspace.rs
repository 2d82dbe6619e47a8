use std::fmt;

use rand::Rng;

use super::{rref, BitMatrix, BitVector, Gf2Error};

/// A linear subspace of GF(2)^n held by its canonical RREF basis.
///
/// Two subspaces with the same span compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let basis: Vec<_> = (0..ambient).map(|i| BitVector::unit(ambient, i)).collect();
        Self {
            ambient,
            pivots: (0..ambient).collect(),
            basis,
        }
    }

    pub fn span(ambient: usize, vectors: &[BitVector]) -> Result<Self, Gf2Error> {
        let m = BitMatrix::from_rows(ambient, vectors.to_vec())?;
        Ok(Self::from_rref(rref(&m)))
    }

    fn from_rref(m: BitMatrix) -> Self {
        let ambient = m.num_cols();
        let basis = m.into_rows();
        let pivots = basis
            .iter()
            .map(|r| r.leading_one().expect("rref rows are nonzero"))
            .collect();
        Self {
            ambient,
            basis,
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(self.ambient, self.basis.clone()).expect("basis rows have ambient length")
    }

    /// Pivot column of each basis row.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// The lexicographically least element of `v + self`.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.ambient, "vector length differs from ambient dimension");
        let mut out = v.clone();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if out.get(p) {
                out.xor_assign(row);
            }
        }
        out
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    /// span(self ∪ {v}).
    pub fn extend(&self, v: &BitVector) -> Subspace {
        let mut rows = self.basis.clone();
        rows.push(v.clone());
        Subspace::span(self.ambient, &rows).expect("lengths already checked")
    }

    /// The orthogonal complement under the standard dot product.
    pub fn dual(&self) -> Subspace {
        let mut out = Vec::with_capacity(self.ambient - self.dim());
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.ambient).filter(|&c| !is_pivot[c]) {
            let mut v = BitVector::unit(self.ambient, free);
            for (row, &p) in self.basis.iter().zip(&self.pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            out.push(v);
        }
        Subspace::span(self.ambient, &out).expect("lengths match")
    }

    /// The element with coefficient vector `coeffs` over the RREF basis.
    pub fn element(&self, coeffs: u64) -> BitVector {
        let mut v = BitVector::zeros(self.ambient);
        for (k, row) in self.basis.iter().enumerate() {
            if (coeffs >> k) & 1 == 1 {
                v.xor_assign(row);
            }
        }
        v
    }

    /// All 2^dim elements. Intended for small dimensions.
    pub fn elements(&self) -> impl Iterator<Item = BitVector> + '_ {
        assert!(self.dim() < 32, "subspace too large to enumerate");
        (0..1u64 << self.dim()).map(move |c| self.element(c))
    }

    pub fn sample_element<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVector {
        let mut v = BitVector::zeros(self.ambient);
        for row in &self.basis {
            if rng.gen::<bool>() {
                v.xor_assign(row);
            }
        }
        v
    }

    /// Parses one basis row per line. The rows need not be in RREF.
    pub fn from_rows_text(ambient: usize, lines: &[&str]) -> Result<Self, Gf2Error> {
        let rows = lines
            .iter()
            .map(|l| l.trim().parse::<BitVector>())
            .collect::<Result<Vec<_>, _>>()?;
        let s = Subspace::span(ambient, &rows)?;
        if s.dim() != rows.len() {
            return Err(Gf2Error::Parse("basis rows are linearly dependent".into()));
        }
        Ok(s)
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(n={}, [", self.ambient)?;
        for (k, b) in self.basis.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("])")
    }
}

/// Textual form: one RREF basis row per line.
impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.basis {
            writeln!(f, "{b}")?;
        }
        Ok(())
    }
}

/// An affine coset `shift + space` with the shift reduced to its least representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineCoset {
    space: Subspace,
    shift: BitVector,
}

impl AffineCoset {
    pub fn new(space: Subspace, shift: &BitVector) -> Result<Self, Gf2Error> {
        if shift.len() != space.ambient_dim() {
            return Err(Gf2Error::LengthMismatch {
                left: space.ambient_dim(),
                right: shift.len(),
            });
        }
        let shift = space.reduce(shift);
        Ok(Self { space, shift })
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn shift(&self) -> &BitVector {
        &self.shift
    }

    pub fn contains(&self, v: &BitVector) -> Result<bool, Gf2Error> {
        Ok(self.space.contains(&v.try_xor(&self.shift)?))
    }

    pub fn elements(&self) -> impl Iterator<Item = BitVector> + '_ {
        self.space.elements().map(move |s| s.xor(&self.shift))
    }
}

/// Uniformly random `dim`-dimensional subspace of GF(2)^ambient.
pub fn sample_subspace<R: Rng + ?Sized>(
    ambient: usize,
    dim: usize,
    rng: &mut R,
) -> Result<Subspace, Gf2Error> {
    if dim > ambient {
        return Err(Gf2Error::DimensionTooLarge { dim, ambient });
    }
    loop {
        let rows: Vec<_> = (0..dim).map(|_| BitVector::random(ambient, rng)).collect();
        let s = Subspace::span(ambient, &rows)?;
        if s.dim() == dim {
            return Ok(s);
        }
    }
}

pub fn dual(s: &Subspace) -> Subspace {
    s.dual()
}

pub fn contains(c: &AffineCoset, v: &BitVector) -> Result<bool, Gf2Error> {
    c.contains(v)
}

/// The least vector of dual(S) outside dual(span(S, Δ)).
pub fn canonical_delta_hat(s: &Subspace, delta: &BitVector) -> Result<BitVector, Gf2Error> {
    if delta.len() != s.ambient_dim() {
        return Err(Gf2Error::LengthMismatch {
            left: s.ambient_dim(),
            right: delta.len(),
        });
    }
    if s.contains(delta) {
        return Err(Gf2Error::DeltaInSubspace);
    }
    let s_hat = s.extend(delta).dual();
    let outside = s
        .dual()
        .basis()
        .iter()
        .find(|b| !s_hat.contains(b))
        .cloned()
        .expect("dual(S) is strictly larger than dual(S + Δ)");
    Ok(s_hat.reduce(&outside))
}

pub fn sample_coset_vector<R: Rng + ?Sized>(c: &AffineCoset, rng: &mut R) -> BitVector {
    c.space.sample_element(rng).xor(&c.shift)
}

/// Decodes `v` against the cosets `S + shift` (bit 0) and `S + Δ + shift` (bit 1).
///
/// Returns `None` when `v` lies in neither coset.
pub fn coset_decode(s: &Subspace, delta: &BitVector, shift: &BitVector, v: &BitVector) -> Option<bool> {
    let d = s.reduce(&v.xor(shift));
    if d.is_zero() {
        Some(false)
    } else if d == s.reduce(delta) {
        Some(true)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn span(rows: &[&str]) -> Subspace {
        let n = rows[0].len();
        Subspace::span(n, &rows.iter().map(|r| bv(r)).collect::<Vec<_>>()).unwrap()
    }

    /// Brute-force orthogonal complement used as an independent check.
    fn brute_dual(s: &Subspace) -> Vec<BitVector> {
        let n = s.ambient_dim();
        (0..1u64 << n)
            .map(|c| BitVector::from_u64(c, n))
            .filter(|v| s.elements().all(|e| !e.dot(v)))
            .collect()
    }

    #[test]
    fn dual_matches_exhaustive_orthogonality() {
        let s = span(&["110", "011"]);
        assert_eq!(s.dual(), span(&["111"]));
        assert_eq!(brute_dual(&s), vec![bv("000"), bv("111")]);
        assert_eq!(Subspace::zero(4).dual(), Subspace::full(4));
    }

    #[test]
    fn coset_membership() {
        let s = span(&["11"]);
        let c0 = AffineCoset::new(s.clone(), &bv("00")).unwrap();
        let c1 = AffineCoset::new(s, &bv("01")).unwrap();
        assert!(c0.contains(&bv("11")).unwrap());
        assert!(!c1.contains(&bv("11")).unwrap());
        assert!(c1.contains(&bv("10")).unwrap());
        assert!(c1.contains(&bv("1")).is_err());
    }

    #[test]
    fn coset_shift_is_least_representative() {
        let c = AffineCoset::new(span(&["11"]), &bv("10")).unwrap();
        assert_eq!(c.shift(), &bv("01"));
        let mut members: Vec<_> = c.elements().collect();
        members.sort();
        assert_eq!(c.shift(), &members[0]);
    }

    #[test]
    fn delta_hat_example() {
        let s = span(&["10000", "01000", "00100"]);
        let d = canonical_delta_hat(&s, &bv("00010")).unwrap();
        assert_eq!(d, bv("00010"));
        assert!(matches!(
            canonical_delta_hat(&s, &bv("11000")),
            Err(Gf2Error::DeltaInSubspace)
        ));
    }

    #[test]
    fn delta_hat_is_least_by_enumeration() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..50 {
            let s = sample_subspace(5, 2, &mut rng).unwrap();
            let delta = loop {
                let d = BitVector::random(5, &mut rng);
                if !s.contains(&d) {
                    break d;
                }
            };
            let s_hat: Vec<_> = brute_dual(&s.extend(&delta));
            let least = brute_dual(&s)
                .into_iter()
                .filter(|v| !s_hat.contains(v))
                .min()
                .unwrap();
            assert_eq!(canonical_delta_hat(&s, &delta).unwrap(), least);
        }
    }

    #[test]
    fn decode_example() {
        let s = span(&["110"]);
        let delta = bv("001");
        let zero = bv("000");
        assert_eq!(coset_decode(&s, &delta, &zero, &bv("100")), None);
        assert_eq!(coset_decode(&s, &delta, &zero, &bv("110")), Some(false));
        assert_eq!(coset_decode(&s, &delta, &zero, &bv("111")), Some(true));
        let shift = bv("101");
        assert_eq!(coset_decode(&s, &delta, &shift, &shift), Some(false));
        assert_eq!(coset_decode(&s, &delta, &shift, &delta.xor(&shift)), Some(true));
    }

    #[test]
    fn sampling_edge_dimensions() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert_eq!(sample_subspace(3, 0, &mut rng).unwrap(), Subspace::zero(3));
        assert_eq!(sample_subspace(3, 3, &mut rng).unwrap(), Subspace::full(3));
        assert!(sample_subspace(3, 4, &mut rng).is_err());
    }

    #[test]
    fn coset_sampling_point_mass_and_split() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let point = AffineCoset::new(Subspace::zero(3), &bv("101")).unwrap();
        assert_eq!(sample_coset_vector(&point, &mut rng), bv("101"));
        let c = AffineCoset::new(span(&["11"]), &bv("01")).unwrap();
        let trials = 10_000;
        let hits = (0..trials)
            .filter(|_| sample_coset_vector(&c, &mut rng) == bv("01"))
            .count();
        let sigma = (trials as f64 * 0.25).sqrt();
        assert!((hits as f64 - trials as f64 / 2.0).abs() < 5.0 * sigma);
    }
}
