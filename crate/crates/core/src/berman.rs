//! Berman and Dual Berman codes.
//!
//! Coordinates of a length-`n^m` vector are indexed by tuples in `H^m` with
//! `H = {0, .., n-1}`. The first tuple component is the most significant
//! digit, so the `l`-th block of length `n^(m-1)` holds exactly the tuples
//! whose first component is `l`. The recursive definitions split vectors
//! into those blocks.
//!
//! Each family member can be obtained three ways that are cross-checked
//! against one another: the explicit basis ([`build`]), the recursive
//! membership test ([`recursive_membership`]), and the closed-form
//! parameters ([`dimension_formula`], [`min_distance_formula`]).

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// An element of `H^m`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexTuple {
    n: usize,
    digits: Vec<usize>,
}

impl IndexTuple {
    pub fn new(n: usize, digits: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!(
                "alphabet size n = {n} must be at least 2"
            )));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= n) {
            return Err(Error::InvalidParams(format!(
                "tuple component {d} outside 0..{n}"
            )));
        }
        Ok(Self { n, digits })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            n,
            digits: vec![0; m],
        }
    }

    pub fn from_index(n: usize, m: usize, mut index: usize) -> Self {
        let mut digits = vec![0; m];
        for slot in digits.iter_mut().rev() {
            *slot = index % n;
            index /= n;
        }
        debug_assert_eq!(index, 0, "index out of range");
        Self { n, digits }
    }

    /// All tuples of `H^m` in coordinate order.
    pub fn all(n: usize, m: usize) -> impl Iterator<Item = IndexTuple> {
        (0..n.pow(m as u32)).map(move |i| IndexTuple::from_index(n, m, i))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    /// Coordinate index, first component most significant.
    pub fn index(&self) -> usize {
        self.digits.iter().fold(0, |acc, &d| acc * self.n + d)
    }

    pub fn weight(&self) -> usize {
        self.digits.iter().filter(|&&d| d != 0).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.digits.len())
            .filter(|&l| self.digits[l] != 0)
            .collect()
    }

    /// The partial order: `self ⪯ other` iff `self` agrees with `other` on
    /// every nonzero position of `self`.
    pub fn precedes(&self, other: &IndexTuple) -> bool {
        debug_assert_eq!(self.n, other.n);
        debug_assert_eq!(self.digits.len(), other.digits.len());
        self.digits
            .iter()
            .zip(&other.digits)
            .all(|(&a, &b)| a == 0 || a == b)
    }

    /// Componentwise sum of two tuples with disjoint supports.
    pub fn disjoint_sum(&self, other: &IndexTuple) -> Result<IndexTuple> {
        if self
            .digits
            .iter()
            .zip(&other.digits)
            .any(|(&a, &b)| a != 0 && b != 0)
        {
            return Err(Error::OverlappingSupport);
        }
        Ok(IndexTuple {
            n: self.n,
            digits: self
                .digits
                .iter()
                .zip(&other.digits)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// `self - other`, defined when `other ⪯ self`.
    pub fn minus(&self, other: &IndexTuple) -> Result<IndexTuple> {
        if !other.precedes(self) {
            return Err(Error::PreconditionViolated(format!(
                "{other} does not precede {self}"
            )));
        }
        Ok(IndexTuple {
            n: self.n,
            digits: self
                .digits
                .iter()
                .zip(&other.digits)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.digits.iter().join(","))
    }
}

impl fmt::Debug for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BermanKind {
    Berman,
    DualBerman,
}

impl BermanKind {
    pub fn dual(self) -> Self {
        match self {
            BermanKind::Berman => BermanKind::DualBerman,
            BermanKind::DualBerman => BermanKind::Berman,
        }
    }
}

/// Identifies one family member: `Ber(n,r,m)` or `DBer(n,r,m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BermanParams {
    pub kind: BermanKind,
    pub n: usize,
    pub r: usize,
    pub m: usize,
}

impl BermanParams {
    pub fn new(kind: BermanKind, n: usize, r: usize, m: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n = {n} must be at least 2")));
        }
        if m < 1 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        if r > m {
            return Err(Error::InvalidParams(format!("r = {r} exceeds m = {m}")));
        }
        // keep n^m addressable
        if n.checked_pow(m as u32).is_none_or(|len| len > 1 << 24) {
            return Err(Error::InvalidParams(format!("length {n}^{m} is too large")));
        }
        Ok(Self { kind, n, r, m })
    }

    pub fn berman(n: usize, r: usize, m: usize) -> Result<Self> {
        Self::new(BermanKind::Berman, n, r, m)
    }

    pub fn dual_berman(n: usize, r: usize, m: usize) -> Result<Self> {
        Self::new(BermanKind::DualBerman, n, r, m)
    }

    pub fn length(&self) -> usize {
        self.n.pow(self.m as u32)
    }

    /// Parameters of the dual code.
    pub fn dual(&self) -> Self {
        Self {
            kind: self.kind.dual(),
            ..*self
        }
    }

    pub fn with_r(&self, r: usize) -> Result<Self> {
        Self::new(self.kind, self.n, r, self.m)
    }

    /// `Ber(n,m,m)` is the zero code.
    pub fn is_zero_code(&self) -> bool {
        self.kind == BermanKind::Berman && self.r == self.m
    }

    /// `DBer(n,m,m)` is the full space.
    pub fn is_full_space(&self) -> bool {
        self.kind == BermanKind::DualBerman && self.r == self.m
    }

    /// Every family member for the given `(n, m)`: Berman codes by
    /// increasing `r`, then Dual Berman codes by increasing `r`.
    pub fn family(n: usize, m: usize) -> Vec<BermanParams> {
        [BermanKind::Berman, BermanKind::DualBerman]
            .into_iter()
            .flat_map(|kind| (0..=m).map(move |r| BermanParams { kind, n, r, m }))
            .collect()
    }
}

impl fmt::Display for BermanParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            BermanKind::Berman => "Ber",
            BermanKind::DualBerman => "DBer",
        };
        write!(f, "{name}({},{},{})", self.n, self.r, self.m)
    }
}

impl FromStr for BermanParams {
    type Err = Error;

    /// Parses `Ber(n,r,m)` or `DBer(n,r,m)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected Ber(n,r,m) or DBer(n,r,m), got {s:?}"));
        let (kind, rest) = if let Some(rest) = s.strip_prefix("DBer(") {
            (BermanKind::DualBerman, rest)
        } else if let Some(rest) = s.strip_prefix("Ber(") {
            (BermanKind::Berman, rest)
        } else {
            return Err(bad());
        };
        let inner = rest.strip_suffix(')').ok_or_else(bad)?;
        let nums = inner
            .split(',')
            .map(|t| t.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        match nums[..] {
            [n, r, m] => BermanParams::new(kind, n, r, m),
            _ => Err(bad()),
        }
    }
}

/// Indicator of `{i : i ⪯ i'}`.
pub fn c_vector(i_prime: &IndexTuple) -> BitVector {
    let (n, m) = (i_prime.n(), i_prime.m());
    let support = i_prime.support();
    let mut v = BitVector::zeros(n.pow(m as u32));
    // The lower set of i' is every way of zeroing a subset of its support.
    for mask in 0u64..(1u64 << support.len()) {
        let mut digits = i_prime.digits().to_vec();
        for (bit, &pos) in support.iter().enumerate() {
            if (mask >> bit) & 1 == 1 {
                digits[pos] = 0;
            }
        }
        let idx = digits.iter().fold(0, |acc, &d| acc * n + d);
        v.set(idx, true);
    }
    v
}

/// Indicator of `{i : i ⪰ i'}`.
pub fn d_vector(i_prime: &IndexTuple) -> BitVector {
    let (n, m) = (i_prime.n(), i_prime.m());
    let mut v = BitVector::zeros(n.pow(m as u32));
    for t in IndexTuple::all(n, m) {
        if i_prime.precedes(&t) {
            v.set(t.index(), true);
        }
    }
    v
}

/// The family basis: `c_m(i')` with `r+1 ≤ wt(i')` for Berman codes,
/// `d_m(i')` with `wt(i') ≤ r` for Dual Berman codes.
pub fn basis(params: BermanParams) -> Vec<BitVector> {
    let BermanParams { kind, n, r, m } = params;
    IndexTuple::all(n, m)
        .filter(|t| match kind {
            BermanKind::Berman => t.weight() > r,
            BermanKind::DualBerman => t.weight() <= r,
        })
        .map(|t| match kind {
            BermanKind::Berman => c_vector(&t),
            BermanKind::DualBerman => d_vector(&t),
        })
        .collect()
}

pub fn build(params: BermanParams) -> LinearCode {
    LinearCode::from_spanning_set(params.length(), &basis(params))
        .expect("basis vectors have the code length")
}

/// Membership decided directly from the recursive definitions, without
/// building a generator matrix.
pub fn recursive_membership(params: BermanParams, v: &BitVector) -> Result<bool> {
    if v.len() != params.length() {
        return Err(Error::LengthMismatch {
            expected: params.length(),
            found: v.len(),
        });
    }
    Ok(member(params.kind, params.n, params.r, params.m, v))
}

fn member(kind: BermanKind, n: usize, r: usize, m: usize, v: &BitVector) -> bool {
    match kind {
        BermanKind::Berman => {
            if r == m {
                return v.is_zero();
            }
            if r == 0 {
                return v.weight().is_multiple_of(2);
            }
            let block = v.len() / n;
            let mut sum = BitVector::zeros(block);
            for l in 0..n {
                let part = v.slice(l * block, block);
                if !member(kind, n, r - 1, m - 1, &part) {
                    return false;
                }
                sum.xor_assign(&part);
            }
            member(kind, n, r, m - 1, &sum)
        }
        BermanKind::DualBerman => {
            if r == m {
                return true;
            }
            if r == 0 {
                let w = v.weight();
                return w == 0 || w == v.len();
            }
            let block = v.len() / n;
            let last = v.slice((n - 1) * block, block);
            if !member(kind, n, r, m - 1, &last) {
                return false;
            }
            (0..n - 1).all(|l| {
                let mut part = v.slice(l * block, block);
                part.xor_assign(&last);
                member(kind, n, r - 1, m - 1, &part)
            })
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of tuples in `H^m` of weight exactly `w`.
pub fn tuples_of_weight(n: usize, m: usize, w: usize) -> usize {
    binomial(m, w) * (n - 1).pow(w as u32)
}

pub fn dimension_formula(params: BermanParams) -> usize {
    let BermanParams { kind, n, r, m } = params;
    let weights = match kind {
        BermanKind::Berman => (r + 1)..=m,
        BermanKind::DualBerman => 0..=r,
    };
    weights.map(|w| tuples_of_weight(n, m, w)).sum()
}

/// `2^(r+1)` for Berman codes with `r < m`, `n^(m-r)` for Dual Berman codes.
pub fn min_distance_formula(params: BermanParams) -> Result<usize> {
    let BermanParams { kind, n, r, m } = params;
    match kind {
        BermanKind::Berman if r == m => Err(Error::ZeroCode),
        BermanKind::Berman => Ok(1 << (r + 1)),
        BermanKind::DualBerman => Ok(n.pow((m - r) as u32)),
    }
}

/// Reed–Muller code `RM(r, m)` from evaluations of the multilinear monomials
/// of degree at most `r` on `{0,1}^m`. Variable `x_l` reads bit `m-1-l` of
/// the coordinate index, matching the tuple digit order.
pub fn reed_muller(r: usize, m: usize) -> LinearCode {
    let len = 1usize << m;
    let monomials = (0u32..(1u32 << m))
        .filter(|mask| mask.count_ones() as usize <= r)
        .map(|mask| {
            // mask bit l selects x_l, i.e. coordinate bit m-1-l
            let coord_mask = (0..m)
                .filter(|l| (mask >> l) & 1 == 1)
                .fold(0usize, |acc, l| acc | 1 << (m - 1 - l));
            BitVector::from_ones(len, (0..len).filter(|i| i & coord_mask == coord_mask))
        })
        .collect::<Vec<_>>();
    LinearCode::from_spanning_set(len, &monomials).expect("monomials have length 2^m")
}

/// Which permutation family produced the witnesses for transitivity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermutationFamily {
    /// Permuting tuple positions together with per-position relabelings of `H`.
    TupleSymmetries,
    /// Unrestricted search over all coordinate permutations.
    FullSymmetric,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitivityReport {
    pub transitive: bool,
    /// Most general family that was needed; `None` when some pair had no
    /// witness.
    pub family: Option<PermutationFamily>,
    /// Coordinate pairs without a witness.
    pub failures: Vec<(usize, usize)>,
}

/// Longest code for which the unrestricted permutation search is attempted.
pub const FULL_SEARCH_MAX_LENGTH: usize = 8;

fn preserves(code: &LinearCode, perm: &[usize]) -> bool {
    code.generator().rows().iter().all(|row| {
        let image =
            BitVector::from_ones(row.len(), row.ones_indices().into_iter().map(|i| perm[i]));
        code.contains(&image).unwrap_or(false)
    })
}

/// Coordinate permutation induced by sending position `l` to `positions[l]`
/// and relabelling digit values at position `l` by `labels[l]`.
fn tuple_permutation(n: usize, m: usize, positions: &[usize], labels: &[Vec<usize>]) -> Vec<usize> {
    IndexTuple::all(n, m)
        .map(|t| {
            let mut image = vec![0; m];
            for l in 0..m {
                image[positions[l]] = labels[l][t.digits[l]];
            }
            image.iter().fold(0, |acc, &d| acc * n + d)
        })
        .collect()
}

/// Permutations of `0..n` sending `from` to `to`, generated lazily.
fn constrained_perms(n: usize, from: usize, to: usize) -> impl Iterator<Item = Vec<usize>> {
    let rest: Vec<usize> = (0..n).filter(|&x| x != to).collect();
    rest.into_iter().permutations(n - 1).map(move |p| {
        let mut perm = p;
        perm.insert(from, to);
        perm
    })
}

fn tuple_witness(code: &LinearCode, n: usize, m: usize, a: usize, b: usize) -> Option<Vec<usize>> {
    let ta = IndexTuple::from_index(n, m, a);
    let tb = IndexTuple::from_index(n, m, b);
    for positions in (0..m).permutations(m) {
        let mut labels = Vec::with_capacity(m);
        if let Some(p) = search_labels(code, n, m, &ta, &tb, &positions, &mut labels) {
            return Some(p);
        }
    }
    None
}

fn search_labels(
    code: &LinearCode,
    n: usize,
    m: usize,
    from: &IndexTuple,
    to: &IndexTuple,
    positions: &[usize],
    labels: &mut Vec<Vec<usize>>,
) -> Option<Vec<usize>> {
    let l = labels.len();
    if l == m {
        let perm = tuple_permutation(n, m, positions, labels);
        return preserves(code, &perm).then_some(perm);
    }
    for sigma in constrained_perms(n, from.digits[l], to.digits[positions[l]]) {
        labels.push(sigma);
        let found = search_labels(code, n, m, from, to, positions, labels);
        labels.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

fn full_witness(code: &LinearCode, a: usize, b: usize) -> Option<Vec<usize>> {
    constrained_perms(code.length(), a, b).find(|p| preserves(code, p))
}

/// Searches, for every ordered coordinate pair `(a, b)`, for a
/// code-preserving coordinate permutation mapping `a` to `b`. Tuple
/// symmetries are tried first; pairs they miss fall back to the unrestricted
/// search when the length is at most [`FULL_SEARCH_MAX_LENGTH`].
pub fn check_transitivity(code: &LinearCode, n: usize, m: usize) -> TransitivityReport {
    let len = code.length();
    assert_eq!(len, n.pow(m as u32));
    let mut family = PermutationFamily::TupleSymmetries;
    let mut failures = Vec::new();
    for (a, b) in (0..len).cartesian_product(0..len) {
        if tuple_witness(code, n, m, a, b).is_some() {
            continue;
        }
        if len <= FULL_SEARCH_MAX_LENGTH && full_witness(code, a, b).is_some() {
            family = PermutationFamily::FullSymmetric;
            continue;
        }
        failures.push((a, b));
    }
    TransitivityReport {
        transitive: failures.is_empty(),
        family: failures.is_empty().then_some(family),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: usize, digits: &[usize]) -> IndexTuple {
        IndexTuple::new(n, digits.to_vec()).unwrap()
    }

    #[test]
    fn tuple_index_examples() {
        assert_eq!(IndexTuple::zero(3, 4).index(), 0);
        let a = t(3, &[1, 2]);
        assert_eq!(a.index(), 5);
        assert_eq!(IndexTuple::from_index(3, 2, 5), a);
        let b = t(2, &[1, 0, 1]);
        assert_eq!(b.index(), 5);
        assert_eq!(IndexTuple::from_index(2, 3, 5), b);
        for (i, tup) in IndexTuple::all(4, 3).enumerate() {
            assert_eq!(tup.index(), i);
        }
        assert!(IndexTuple::new(3, vec![3]).is_err());
    }

    #[test]
    fn precedes_examples() {
        let zero = IndexTuple::zero(3, 2);
        for i in IndexTuple::all(3, 2) {
            assert!(zero.precedes(&i));
        }
        assert!(t(3, &[0, 2]).precedes(&t(3, &[1, 2])));
        assert!(!t(3, &[2, 2]).precedes(&t(3, &[1, 2])));
    }

    #[test]
    fn c_and_d_vector_examples() {
        assert_eq!(c_vector(&IndexTuple::zero(3, 2)), BitVector::unit(9, 0));
        assert_eq!(c_vector(&t(3, &[1, 2])).to_string(), "101101000");
        assert_eq!(d_vector(&IndexTuple::zero(3, 2)), BitVector::ones(9));
        assert_eq!(d_vector(&t(3, &[1, 0])).to_string(), "000111000");
    }

    #[test]
    fn basis_vector_weights() {
        for i in IndexTuple::all(3, 2) {
            assert_eq!(c_vector(&i).weight(), 1 << i.weight());
        }
        for i in IndexTuple::all(2, 3) {
            assert_eq!(d_vector(&i).weight(), 2usize.pow((3 - i.weight()) as u32));
        }
    }

    #[test]
    fn boundary_members() {
        for n in 2usize..5 {
            for m in 1..4 {
                let len = n.pow(m as u32);
                assert_eq!(
                    build(BermanParams::berman(n, m, m).unwrap()),
                    LinearCode::zero(len)
                );
                assert_eq!(
                    build(BermanParams::dual_berman(n, 0, m).unwrap()),
                    LinearCode::repetition(len)
                );
                assert_eq!(
                    build(BermanParams::dual_berman(n, m, m).unwrap()),
                    LinearCode::full(len)
                );
            }
        }
    }

    #[test]
    fn dber_3_1_2_parameters() {
        let p = BermanParams::dual_berman(3, 1, 2).unwrap();
        let code = build(p);
        assert_eq!(code.dimension(), 5);
        assert_eq!(dimension_formula(p), 5);
        assert_eq!(code.min_distance_bruteforce().unwrap(), 3);
        assert_eq!(min_distance_formula(p).unwrap(), 3);
    }

    #[test]
    fn formula_examples() {
        assert_eq!(dimension_formula(BermanParams::berman(3, 0, 2).unwrap()), 8);
        assert_eq!(
            dimension_formula(BermanParams::dual_berman(3, 3, 3).unwrap()),
            27
        );
        assert_eq!(
            dimension_formula(BermanParams::berman(3, 1, 3).unwrap()),
            20
        );
        assert_eq!(
            min_distance_formula(BermanParams::berman(2, 1, 3).unwrap()).unwrap(),
            4
        );
        assert_eq!(
            min_distance_formula(BermanParams::berman(3, 1, 2).unwrap()).unwrap(),
            4
        );
        assert_eq!(
            min_distance_formula(BermanParams::dual_berman(5, 2, 2).unwrap()).unwrap(),
            1
        );
        assert_eq!(
            min_distance_formula(BermanParams::berman(3, 2, 2).unwrap()),
            Err(Error::ZeroCode)
        );
    }

    #[test]
    fn recursive_membership_examples() {
        let ber = BermanParams::berman(3, 0, 2).unwrap();
        assert!(recursive_membership(ber, &BitVector::zeros(9)).unwrap());
        assert!(recursive_membership(ber, &"110000000".parse().unwrap()).unwrap());
        assert!(!recursive_membership(ber, &"100000000".parse().unwrap()).unwrap());
        assert!(recursive_membership(ber, &BitVector::zeros(8)).is_err());
    }

    #[test]
    fn name_round_trip() {
        for s in ["Ber(3,1,2)", "DBer(6,0,2)", "Ber(2,5,5)"] {
            let p: BermanParams = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        for bad in [
            "Ber(3,1)",
            "DBer(1,0,2)",
            "Ber(3,3,2)",
            "ber(3,1,2)",
            "Ber(3, 1, 2)",
            "DBer(3,1,2",
        ] {
            assert!(bad.parse::<BermanParams>().is_err(), "{bad}");
        }
    }

    #[test]
    fn reed_muller_small_cases() {
        assert_eq!(reed_muller(0, 3), LinearCode::repetition(8));
        assert_eq!(reed_muller(3, 3), LinearCode::full(8));
        let rm13 = reed_muller(1, 3);
        assert_eq!(rm13.dimension(), 4);
        assert_eq!(rm13.min_distance_bruteforce().unwrap(), 4);
    }

    #[test]
    fn transitivity_of_tiny_codes() {
        let p = BermanParams::dual_berman(3, 1, 2).unwrap();
        let report = check_transitivity(&build(p), 3, 2);
        assert!(report.transitive);
        assert_eq!(report.family, Some(PermutationFamily::TupleSymmetries));
    }

    #[test]
    fn non_transitive_code_is_reported() {
        // span{1100} fixes coordinates 2 and 3 apart from 0 and 1
        let code = LinearCode::from_spanning_set(4, &["1100".parse().unwrap()]).unwrap();
        let report = check_transitivity(&code, 2, 2);
        assert!(!report.transitive);
        assert!(report.failures.contains(&(0, 2)));
        assert_eq!(report.family, None);
    }
}
