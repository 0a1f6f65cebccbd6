//! Independent reference computations for the integration tests. Vectors of
//! length at most 128 are plain `u128` masks, bit `i` = coordinate `i`.

#![allow(dead_code)]

use std::collections::HashMap;

use berman_pir::berman::{self, BermanParams, IndexTuple};
use berman_pir::{BitVector, LinearCode};

/// The storage/retrieval pairs simulated end to end.
pub const ACCEPTANCE_PAIRS: [(&str, &str); 4] = [
    ("DBer(3,0,2)", "DBer(3,1,2)"),
    ("DBer(2,1,3)", "DBer(2,1,3)"),
    ("Ber(3,1,2)", "DBer(3,0,2)"),
    ("DBer(3,0,3)", "Ber(3,1,3)"),
];

pub fn params(s: &str) -> BermanParams {
    s.parse().unwrap()
}

/// Digits of `index`, most significant first.
pub fn digits(n: usize, m: usize, mut index: usize) -> Vec<usize> {
    let mut d = vec![0; m];
    for slot in d.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    d
}

pub fn weight(d: &[usize]) -> usize {
    d.iter().filter(|&&x| x != 0).count()
}

/// `a ⪯ b`: `a` agrees with `b` wherever `a` is nonzero.
pub fn precedes(a: &[usize], b: &[usize]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == 0 || x == y)
}

pub fn naive_c(n: usize, m: usize, j: &[usize]) -> u128 {
    (0..n.pow(m as u32))
        .filter(|&i| precedes(&digits(n, m, i), j))
        .fold(0, |acc, i| acc | 1 << i)
}

pub fn naive_d(n: usize, m: usize, j: &[usize]) -> u128 {
    (0..n.pow(m as u32))
        .filter(|&i| precedes(j, &digits(n, m, i)))
        .fold(0, |acc, i| acc | 1 << i)
}

/// Spanning set straight from the basis definitions.
pub fn naive_basis(p: BermanParams) -> Vec<u128> {
    let (n, m) = (p.n, p.m);
    (0..n.pow(m as u32))
        .map(|i| digits(n, m, i))
        .filter_map(|d| match p.kind {
            berman::BermanKind::Berman if weight(&d) > p.r => Some(naive_c(n, m, &d)),
            berman::BermanKind::DualBerman if weight(&d) <= p.r => Some(naive_d(n, m, &d)),
            _ => None,
        })
        .collect()
}

pub fn to_mask(v: &BitVector) -> u128 {
    assert!(v.len() <= 128);
    v.ones_indices().into_iter().fold(0, |acc, i| acc | 1 << i)
}

pub fn from_mask(len: usize, mask: u128) -> BitVector {
    BitVector::from_ones(len, (0..len).filter(|&i| mask >> i & 1 == 1))
}

pub fn code_masks(code: &LinearCode) -> Vec<u128> {
    code.generator().rows().iter().map(to_mask).collect()
}

/// XOR basis keyed by leading bit.
#[derive(Default, Clone)]
pub struct XorBasis {
    rows: HashMap<u32, u128>,
}

impl XorBasis {
    pub fn reduce(&self, mut v: u128) -> u128 {
        while v != 0 {
            let top = 127 - v.leading_zeros();
            match self.rows.get(&top) {
                Some(r) => v ^= r,
                None => break,
            }
        }
        v
    }

    pub fn insert(&mut self, v: u128) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        self.rows.insert(127 - v.leading_zeros(), v);
        true
    }

    pub fn contains(&self, v: u128) -> bool {
        self.reduce(v) == 0
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

pub fn span(vectors: &[u128]) -> XorBasis {
    let mut b = XorBasis::default();
    for &v in vectors {
        b.insert(v);
    }
    b
}

pub fn rank(vectors: &[u128]) -> usize {
    span(vectors).rank()
}

pub fn same_span(a: &[u128], b: &[u128]) -> bool {
    let sa = span(a);
    sa.rank() == rank(b) && b.iter().all(|&v| sa.contains(v))
}

/// All pairwise products.
pub fn naive_star(a: &[u128], b: &[u128]) -> Vec<u128> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x & y))
        .collect()
}

/// Minimum nonzero weight over the span, by enumerating every combination
/// of an extracted basis.
pub fn naive_min_distance(vectors: &[u128]) -> Option<u32> {
    let basis: Vec<u128> = {
        let mut b = XorBasis::default();
        vectors.iter().copied().filter(|&v| b.insert(v)).collect()
    };
    let k = basis.len();
    assert!(k <= 24, "dimension {k} too large to enumerate");
    (1u64..1 << k)
        .map(|mask| {
            (0..k)
                .filter(|&i| mask >> i & 1 == 1)
                .fold(0u128, |acc, i| acc ^ basis[i])
                .count_ones()
        })
        .min()
}

/// Dual dimension: `len - rank`.
pub fn dual_dimension(len: usize, vectors: &[u128]) -> usize {
    len - rank(vectors)
}

/// Unit vectors obtained so far by a staged construction.
pub struct Staged {
    pub n: usize,
    pub m: usize,
    pub obtained: HashMap<usize, u128>,
    /// Star products consumed, for the record.
    pub products_used: usize,
}

impl Staged {
    fn new(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            obtained: HashMap::new(),
            products_used: 0,
        }
    }

    /// Subtracts the already obtained units of `others` from the product
    /// `x` and checks that what remains is exactly `e_target`.
    fn derive(&mut self, x: u128, target: usize, others: &[usize]) -> Result<(), String> {
        self.products_used += 1;
        let mut v = x;
        for &o in others {
            let e = self
                .obtained
                .get(&o)
                .ok_or_else(|| format!("e_{o} needed before it was obtained"))?;
            v ^= e;
        }
        if v != 1 << target {
            return Err(format!("step for e_{target} produced {v:#x}"));
        }
        self.obtained.insert(target, v);
        Ok(())
    }

    pub fn complete(&self) -> bool {
        let len = self.n.pow(self.m as u32);
        (0..len).all(|i| self.obtained.get(&i) == Some(&(1 << i)))
    }
}

fn tuples(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0..n.pow(m as u32)).map(|i| digits(n, m, i)).collect()
}

fn index_of(n: usize, d: &[usize]) -> usize {
    d.iter().fold(0, |acc, &x| acc * n + x)
}

/// Standard basis from products of `Ber(n,m-1,m)` basis vectors, `n ≥ 3`:
/// `c(j) ⋆ c(l)` with `j, l` of full weight, equal on `supp(v)` and
/// different elsewhere, equals `c(v)`; peel off the lower units.
pub fn staged_berman_berman(n: usize, m: usize) -> Result<Staged, String> {
    assert!(n >= 3);
    let ber = BermanParams::berman(n, m - 1, m).unwrap();
    let basis = span(&naive_basis(ber));
    let mut st = Staged::new(n, m);
    let all = tuples(n, m);
    for k in 0..=m {
        for v in all.iter().filter(|v| weight(v) == k) {
            // full-weight j, l matching v on its support, 1 vs 2 elsewhere
            let j: Vec<usize> = v.iter().map(|&x| if x == 0 { 1 } else { x }).collect();
            let l: Vec<usize> = v.iter().map(|&x| if x == 0 { 2 } else { x }).collect();
            let (cj, cl) = (naive_c(n, m, &j), naive_c(n, m, &l));
            if !basis.contains(cj) || !basis.contains(cl) {
                return Err(format!("c({j:?}) or c({l:?}) outside Ber(n,m-1,m)"));
            }
            let lower: Vec<usize> = all
                .iter()
                .filter(|y| precedes(y, v) && *y != v)
                .map(|y| index_of(n, y))
                .collect();
            st.derive(cj & cl, index_of(n, v), &lower)?;
        }
    }
    Ok(st)
}

/// Standard basis from products of `Ber(n,r2-1,m)` and `DBer(n,r2,m)` basis
/// vectors, weight `r2` first, then downwards, then upwards.
pub fn staged_berman_dual(n: usize, m: usize, r2: usize) -> Result<Staged, String> {
    assert!(r2 >= 1 && r2 <= m);
    let ber = span(&naive_basis(BermanParams::berman(n, r2 - 1, m).unwrap()));
    let dber = span(&naive_basis(BermanParams::dual_berman(n, r2, m).unwrap()));
    let mut st = Staged::new(n, m);
    let all = tuples(n, m);
    let check = |c: u128, d: u128| -> Result<(), String> {
        if ber.contains(c) && dber.contains(d) {
            Ok(())
        } else {
            Err("factor outside its code".to_string())
        }
    };
    let between = |lo: &Vec<usize>, hi: &Vec<usize>| -> Vec<usize> {
        all.iter()
            .filter(|v| precedes(lo, v) && precedes(v, hi))
            .map(|v| index_of(n, v))
            .collect()
    };
    // weight r2: c(j) ⋆ d(j) = e_j
    for j in all.iter().filter(|j| weight(j) == r2) {
        let (c, d) = (naive_c(n, m, j), naive_d(n, m, j));
        check(c, d)?;
        st.derive(c & d, index_of(n, j), &[])?;
    }
    // weights r2-1 down to 0: c(j) ⋆ d(j') with j' ⪯ j, wt(j) = r2
    for k in 1..=r2 {
        for jp in all.iter().filter(|v| weight(v) == r2 - k) {
            let j = lift(jp, r2);
            let (c, d) = (naive_c(n, m, &j), naive_d(n, m, jp));
            check(c, d)?;
            let target = index_of(n, jp);
            let others: Vec<usize> = between(jp, &j)
                .into_iter()
                .filter(|&i| i != target)
                .collect();
            st.derive(c & d, target, &others)?;
        }
    }
    // weights r2+1 up to m: c(j) ⋆ d(j') with j' ⪯ j, wt(j') = r2
    for w in (r2 + 1)..=m {
        for j in all.iter().filter(|v| weight(v) == w) {
            let jp = lower_to(j, r2);
            let (c, d) = (naive_c(n, m, j), naive_d(n, m, &jp));
            check(c, d)?;
            let target = index_of(n, j);
            let others: Vec<usize> = between(&jp, j)
                .into_iter()
                .filter(|&i| i != target)
                .collect();
            st.derive(c & d, target, &others)?;
        }
    }
    Ok(st)
}

/// Some `j ⪰ jp` of weight `w`, filling zero positions with 1.
fn lift(jp: &[usize], w: usize) -> Vec<usize> {
    let mut j = jp.to_vec();
    let mut need = w - weight(jp);
    for x in j.iter_mut() {
        if need > 0 && *x == 0 {
            *x = 1;
            need -= 1;
        }
    }
    j
}

/// Some `jp ⪯ j` of weight `w`, keeping the first nonzero positions.
fn lower_to(j: &[usize], w: usize) -> Vec<usize> {
    let mut kept = 0;
    j.iter()
        .map(|&x| {
            if x != 0 && kept < w {
                kept += 1;
                x
            } else {
                0
            }
        })
        .collect()
}

pub fn tuple(n: usize, d: &[usize]) -> IndexTuple {
    IndexTuple::new(n, d.to_vec()).unwrap()
}
