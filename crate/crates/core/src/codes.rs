//! Binary linear codes held in canonical (reduced row-echelon) form.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{parse_pair, BitMatrix, BitVector};

/// Largest dimension accepted by [`LinearCode::min_distance_bruteforce`].
pub const MAX_ENUMERATION_DIM: usize = 24;

/// A binary linear code. The generator is always in reduced row-echelon form,
/// so two codes are equal exactly when their generators are.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearCode {
    generator: BitMatrix,
    pivots: Vec<usize>,
}

impl LinearCode {
    pub fn from_spanning_set(length: usize, vectors: &[BitVector]) -> Result<Self> {
        let matrix = BitMatrix::from_rows(length, vectors.to_vec())?;
        Ok(Self::from_generator(&matrix))
    }

    /// Code spanned by the rows of `matrix`.
    pub fn from_generator(matrix: &BitMatrix) -> Self {
        let (generator, pivots) = matrix.row_reduce();
        Self { generator, pivots }
    }

    pub fn zero(length: usize) -> Self {
        Self {
            generator: BitMatrix::empty(length),
            pivots: Vec::new(),
        }
    }

    pub fn full(length: usize) -> Self {
        Self {
            generator: BitMatrix::identity(length),
            pivots: (0..length).collect(),
        }
    }

    pub fn repetition(length: usize) -> Self {
        Self::from_generator(&BitMatrix::from_rows(length, vec![BitVector::ones(length)]).unwrap())
    }

    pub fn length(&self) -> usize {
        self.generator.num_cols()
    }

    pub fn dimension(&self) -> usize {
        self.generator.num_rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dimension() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dimension() == self.length()
    }

    /// Canonical generator matrix.
    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    /// Reduces `v` against the canonical generator; the remainder is zero iff
    /// `v` is a codeword.
    fn remainder(&self, v: &BitVector) -> BitVector {
        let mut v = v.clone();
        for (row, &p) in self.generator.rows().iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.length() {
            return Err(Error::LengthMismatch {
                expected: self.length(),
                found: v.len(),
            });
        }
        Ok(self.remainder(v).is_zero())
    }

    /// True when every codeword of `self` lies in `other`.
    pub fn is_subcode_of(&self, other: &LinearCode) -> Result<bool> {
        for row in self.generator.rows() {
            if !other.contains(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn dual(&self) -> LinearCode {
        LinearCode::from_generator(&self.generator.nullspace_basis())
    }

    /// `message · G` for a message of length `dimension`.
    pub fn encode(&self, message: &BitVector) -> Result<BitVector> {
        self.generator.left_mul(message)
    }

    /// Minimum nonzero weight, by enumerating every codeword in Gray-code
    /// order so each step costs one row XOR.
    pub fn min_distance_bruteforce(&self) -> Result<usize> {
        let k = self.dimension();
        if k == 0 {
            return Err(Error::ZeroCode);
        }
        if k > MAX_ENUMERATION_DIM {
            return Err(Error::TooLarge {
                dim: k,
                limit: MAX_ENUMERATION_DIM,
            });
        }
        let rows = self.generator.rows();
        let mut word = BitVector::zeros(self.length());
        let mut best = usize::MAX;
        for step in 1u64..(1u64 << k) {
            word.xor_assign(&rows[step.trailing_zeros() as usize]);
            best = best.min(word.weight());
        }
        Ok(best)
    }

    /// Leftmost information set: the pivot columns of the canonical generator.
    pub fn information_set(&self) -> Result<Vec<usize>> {
        if self.is_zero() {
            return Err(Error::ZeroCode);
        }
        Ok(self.pivots.clone())
    }

    /// Punctured code `{c_T : c ∈ C}` on the coordinates `cols`.
    pub fn project_columns(&self, cols: &[usize]) -> Result<LinearCode> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.length()) {
            return Err(Error::InvalidParams(format!(
                "column {bad} out of range for length {}",
                self.length()
            )));
        }
        Ok(LinearCode::from_generator(
            &self.generator.select_columns(cols),
        ))
    }

    /// Text form: a `length dim` line followed by the generator in matrix
    /// text form.
    pub fn to_text(&self) -> String {
        format!(
            "{} {}\n{}",
            self.length(),
            self.dimension(),
            self.generator.to_text()
        )
    }

    pub fn from_text(text: &str) -> Result<LinearCode> {
        let (header, rest) = text
            .split_once('\n')
            .ok_or_else(|| Error::Parse("missing code header".into()))?;
        let (length, dim) = parse_pair(header)?;
        let generator = BitMatrix::from_text(rest)?;
        if generator.num_cols() != length {
            return Err(Error::Parse(format!(
                "header length {length} disagrees with {} generator columns",
                generator.num_cols()
            )));
        }
        let code = LinearCode::from_generator(&generator);
        if code.dimension() != dim {
            return Err(Error::Parse(format!(
                "header dimension {dim} disagrees with generator rank {}",
                code.dimension()
            )));
        }
        Ok(code)
    }
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearCode[{}, {}]", self.length(), self.dimension())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn v(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn spanning_set_edge_cases() {
        let z = LinearCode::from_spanning_set(4, &[]).unwrap();
        assert_eq!(z.dimension(), 0);
        assert_eq!(z, LinearCode::zero(4));
        let rep = LinearCode::from_spanning_set(4, &[v("1111")]).unwrap();
        assert_eq!(rep.dimension(), 1);
        assert_eq!(rep, LinearCode::repetition(4));
        assert!(LinearCode::from_spanning_set(4, &[v("111")]).is_err());
    }

    #[test]
    fn zero_vector_is_always_a_codeword() {
        for code in [
            LinearCode::zero(5),
            LinearCode::full(5),
            LinearCode::repetition(5),
        ] {
            assert!(code.contains(&BitVector::zeros(5)).unwrap());
        }
    }

    #[test]
    fn dual_of_full_space_is_zero() {
        assert_eq!(LinearCode::full(6).dual(), LinearCode::zero(6));
        assert_eq!(LinearCode::zero(6).dual(), LinearCode::full(6));
    }

    #[test]
    fn repetition_distance_and_information_set() {
        let rep = LinearCode::repetition(9);
        assert_eq!(rep.min_distance_bruteforce().unwrap(), 9);
        assert_eq!(rep.information_set().unwrap(), vec![0]);
        assert_eq!(
            LinearCode::full(5).information_set().unwrap(),
            vec![0, 1, 2, 3, 4]
        );
        assert_eq!(LinearCode::zero(3).information_set(), Err(Error::ZeroCode));
        assert_eq!(
            LinearCode::zero(3).min_distance_bruteforce(),
            Err(Error::ZeroCode)
        );
    }

    #[test]
    fn enumeration_guard() {
        assert!(matches!(
            LinearCode::full(25).min_distance_bruteforce(),
            Err(Error::TooLarge { dim: 25, .. })
        ));
    }

    #[test]
    fn projections() {
        let full = LinearCode::full(6);
        assert!(full.project_columns(&[1, 3, 5]).unwrap().is_full());
        let rep = LinearCode::repetition(9);
        assert_eq!(
            rep.project_columns(&[0, 4, 8]).unwrap(),
            LinearCode::repetition(3)
        );
        assert!(rep.project_columns(&[9]).is_err());
    }

    #[test]
    fn even_weight_code_members() {
        let ns = BitMatrix::from_strs(&["1111"]).unwrap().nullspace_basis();
        let even = LinearCode::from_generator(&ns);
        for bits in 0..16u64 {
            let x = BitVector::from_u64(4, bits);
            assert_eq!(even.contains(&x).unwrap(), x.weight().is_multiple_of(2));
        }
        assert_eq!(even.min_distance_bruteforce().unwrap(), 2);
    }

    #[test]
    fn text_round_trip() {
        let code = LinearCode::from_spanning_set(5, &[v("11000"), v("00111")]).unwrap();
        let text = code.to_text();
        assert!(text.starts_with("5 2\n2 5\n"));
        assert_eq!(LinearCode::from_text(&text).unwrap(), code);
        assert!(LinearCode::from_text("5 3\n2 5\n11000\n00111\n").is_err());
    }

    #[test]
    fn order_of_spanning_vectors_is_irrelevant() {
        let vs = vec![v("110100"), v("011010"), v("101001"), v("111111")];
        let base = LinearCode::from_spanning_set(6, &vs).unwrap();
        for perm in vs.iter().cloned().permutations(vs.len()) {
            assert_eq!(LinearCode::from_spanning_set(6, &perm).unwrap(), base);
        }
    }
}
