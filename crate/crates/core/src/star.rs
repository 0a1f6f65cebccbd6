//! Star (Schur) products of vectors and codes, and the case analysis of
//! star products within the Berman family.

use std::fmt;

use serde::Serialize;

use crate::berman::{self, c_vector, d_vector, BermanKind, BermanParams, IndexTuple};
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Coordinatewise product.
pub fn star_vectors(a: &BitVector, b: &BitVector) -> Result<BitVector> {
    a.and(b)
}

/// `C ⋆ D`, spanned by the products of generator rows. Bilinearity makes
/// this the span of all codeword products.
pub fn star_codes(c: &LinearCode, d: &LinearCode) -> Result<LinearCode> {
    if c.length() != d.length() {
        return Err(Error::LengthMismatch {
            expected: c.length(),
            found: d.length(),
        });
    }
    let products = c
        .generator()
        .rows()
        .iter()
        .flat_map(|g| d.generator().rows().iter().map(move |h| g.and(h)))
        .collect::<Result<Vec<_>>>()?;
    LinearCode::from_spanning_set(c.length(), &products)
}

/// Predicted value of a family star product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarPrediction {
    Code(BermanParams),
    FullSpace,
    /// `DBer(r1) ⋆ DBer(r2)` with `r1 + r2 > m`; no closed form is claimed.
    Undefined,
}

impl StarPrediction {
    /// The predicted code, when there is one.
    pub fn to_code(&self, length: usize) -> Option<LinearCode> {
        match self {
            StarPrediction::Code(p) => Some(berman::build(*p)),
            StarPrediction::FullSpace => Some(LinearCode::full(length)),
            StarPrediction::Undefined => None,
        }
    }
}

impl fmt::Display for StarPrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarPrediction::Code(p) => write!(f, "{p}"),
            StarPrediction::FullSpace => f.write_str("FullSpace"),
            StarPrediction::Undefined => f.write_str("Undefined"),
        }
    }
}

/// Which result covers a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StarRegime {
    /// `DBer(r1) ⋆ DBer(r2) = DBer(r1 + r2)`, `r1 + r2 ≤ m`.
    DualDual,
    /// `Ber(r1) ⋆ DBer(r2) = Ber(r1 - r2)`, `r2 ≤ r1 < m`.
    BermanDual,
    /// `Ber(r1) ⋆ Ber(r2)` is the full space for `n ≥ 3`, `r1, r2 < m`.
    BermanBerman,
    /// `Ber(r1) ⋆ DBer(r2)` is the full space for `r1 < r2`.
    BermanDualFull,
    /// `n = 2` Berman pairs via `Ber(2,r,m) = RM(m-r-1,m)`.
    ReedMullerBerman,
    /// One factor is the zero code `Ber(n,m,m)`.
    ZeroFactor,
    /// `DBer(r1) ⋆ DBer(r2)` with `r1 + r2 > m`.
    Uncovered,
}

fn check_same_shape(p: BermanParams, q: BermanParams) -> Result<()> {
    if (p.n, p.m) != (q.n, q.m) {
        return Err(Error::ParamMismatch(format!(
            "{p} and {q} have different (n, m)"
        )));
    }
    Ok(())
}

/// Classifies a pair and predicts its star product.
pub fn classify_star(p: BermanParams, q: BermanParams) -> Result<(StarRegime, StarPrediction)> {
    check_same_shape(p, q)?;
    let (n, m) = (p.n, p.m);
    let zero = BermanParams {
        kind: BermanKind::Berman,
        n,
        r: m,
        m,
    };
    if p.is_zero_code() || q.is_zero_code() {
        return Ok((StarRegime::ZeroFactor, StarPrediction::Code(zero)));
    }
    use BermanKind::*;
    let out = match (p.kind, q.kind) {
        (DualBerman, DualBerman) => {
            if p.r + q.r <= m {
                (
                    StarRegime::DualDual,
                    StarPrediction::Code(p.with_r(p.r + q.r)?),
                )
            } else {
                (StarRegime::Uncovered, StarPrediction::Undefined)
            }
        }
        (Berman, DualBerman) | (DualBerman, Berman) => {
            let (ber, dber) = if p.kind == Berman { (p, q) } else { (q, p) };
            if dber.r <= ber.r {
                (
                    StarRegime::BermanDual,
                    StarPrediction::Code(ber.with_r(ber.r - dber.r)?),
                )
            } else {
                (StarRegime::BermanDualFull, StarPrediction::FullSpace)
            }
        }
        (Berman, Berman) => {
            if n >= 3 {
                (StarRegime::BermanBerman, StarPrediction::FullSpace)
            } else {
                let order = (m - p.r - 1) + (m - q.r - 1);
                if order <= m {
                    let rm = BermanParams::dual_berman(2, order, m)?;
                    (StarRegime::ReedMullerBerman, StarPrediction::Code(rm))
                } else {
                    (StarRegime::ReedMullerBerman, StarPrediction::FullSpace)
                }
            }
        }
    };
    Ok(out)
}

pub fn predict_star(p: BermanParams, q: BermanParams) -> Result<StarPrediction> {
    Ok(classify_star(p, q)?.1)
}

/// Outcome of checking one predicted star product against the constructed
/// product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarCaseResult {
    pub lhs: BermanParams,
    pub rhs: BermanParams,
    pub regime: StarRegime,
    pub predicted: StarPrediction,
    pub verified: bool,
    pub lhs_dim: usize,
    pub rhs_dim: usize,
    pub product_dim: usize,
    pub predicted_dim: Option<usize>,
}

impl StarCaseResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lhs": self.lhs.to_string(),
            "rhs": self.rhs.to_string(),
            "predicted": self.predicted.to_string(),
            "verified": self.verified,
            "dims": {
                "lhs": self.lhs_dim,
                "rhs": self.rhs_dim,
                "product": self.product_dim,
                "predicted": self.predicted_dim,
            },
        })
    }
}

/// Builds both factors, their product and the predicted code, and compares
/// the product with the prediction by span equality.
pub fn verify_star_case(p: BermanParams, q: BermanParams) -> Result<StarCaseResult> {
    verify_star_case_with(p, q, &berman::build)
}

/// As [`verify_star_case`], with factor codes obtained from `build`.
pub fn verify_star_case_with(
    p: BermanParams,
    q: BermanParams,
    build: &dyn Fn(BermanParams) -> LinearCode,
) -> Result<StarCaseResult> {
    let (regime, predicted) = classify_star(p, q)?;
    let expected = predicted
        .to_code(p.length())
        .ok_or_else(|| Error::UndefinedCase(format!("{p} ⋆ {q}")))?;
    let (a, b) = (build(p), build(q));
    let product = star_codes(&a, &b)?;
    Ok(StarCaseResult {
        lhs: p,
        rhs: q,
        regime,
        predicted,
        verified: product == expected,
        lhs_dim: a.dimension(),
        rhs_dim: b.dimension(),
        product_dim: product.dimension(),
        predicted_dim: Some(expected.dimension()),
    })
}

/// `d_m(j1 + j2)` computed as `d_m(j1) ⋆ d_m(j2)` for tuples with disjoint
/// supports. Fails if the identity does not hold.
pub fn disjoint_support_product(j1: &IndexTuple, j2: &IndexTuple) -> Result<BitVector> {
    let sum = j1.disjoint_sum(j2)?;
    let product = star_vectors(&d_vector(j1), &d_vector(j2))?;
    if product != d_vector(&sum) {
        return Err(Error::PreconditionViolated(format!(
            "d({j1}) ⋆ d({j2}) differs from d({sum})"
        )));
    }
    Ok(product)
}

/// `c_m(j - k)` computed as `c_m(j) ⋆ d_m(k) + c_m(j) ⋆ d_m(0)`, for `k` of
/// weight one with `k ⪯ j`. Fails if the identity does not hold.
pub fn berman_basis_identity(j: &IndexTuple, k: &IndexTuple) -> Result<BitVector> {
    if k.weight() != 1 {
        return Err(Error::PreconditionViolated(format!(
            "{k} must have weight 1"
        )));
    }
    let j_prime = j.minus(k)?;
    let cj = c_vector(j);
    let mut rhs = star_vectors(&cj, &d_vector(k))?;
    rhs.xor_assign(&star_vectors(
        &cj,
        &d_vector(&IndexTuple::zero(j.n(), j.m())),
    )?);
    if rhs != c_vector(&j_prime) {
        return Err(Error::PreconditionViolated(format!(
            "c({j}) ⋆ d({k}) + c({j}) differs from c({j_prime})"
        )));
    }
    Ok(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> BermanParams {
        s.parse().unwrap()
    }

    fn t(n: usize, d: &[usize]) -> IndexTuple {
        IndexTuple::new(n, d.to_vec()).unwrap()
    }

    #[test]
    fn vector_products() {
        let a: BitVector = "101101000".parse().unwrap();
        assert_eq!(star_vectors(&a, &BitVector::ones(9)).unwrap(), a);
        assert!(star_vectors(&a, &BitVector::zeros(9)).unwrap().is_zero());
        let b: BitVector = "000111000".parse().unwrap();
        assert_eq!(star_vectors(&a, &b).unwrap().to_string(), "000101000");
        assert!(star_vectors(&a, &BitVector::zeros(8)).is_err());
    }

    #[test]
    fn code_products_with_identity_and_zero() {
        let c = berman::build(p("Ber(3,1,2)"));
        assert_eq!(star_codes(&c, &LinearCode::repetition(9)).unwrap(), c);
        assert_eq!(
            star_codes(&c, &LinearCode::zero(9)).unwrap(),
            LinearCode::zero(9)
        );
        assert!(star_codes(&c, &LinearCode::zero(8)).is_err());
    }

    #[test]
    fn dual_dual_example() {
        let prod = star_codes(
            &berman::build(p("DBer(3,0,2)")),
            &berman::build(p("DBer(3,1,2)")),
        )
        .unwrap();
        assert_eq!(prod, berman::build(p("DBer(3,1,2)")));
    }

    #[test]
    fn predictions() {
        assert_eq!(
            predict_star(p("DBer(3,0,2)"), p("DBer(3,1,2)")).unwrap(),
            StarPrediction::Code(p("DBer(3,1,2)"))
        );
        assert_eq!(
            predict_star(p("Ber(3,1,2)"), p("DBer(3,1,2)")).unwrap(),
            StarPrediction::Code(p("Ber(3,0,2)"))
        );
        assert_eq!(
            predict_star(p("DBer(3,1,2)"), p("Ber(3,1,2)")).unwrap(),
            StarPrediction::Code(p("Ber(3,0,2)"))
        );
        assert_eq!(
            predict_star(p("Ber(3,0,2)"), p("Ber(3,0,2)")).unwrap(),
            StarPrediction::FullSpace
        );
        assert_eq!(
            predict_star(p("DBer(3,2,3)"), p("DBer(3,2,3)")).unwrap(),
            StarPrediction::Undefined
        );
        assert!(matches!(
            predict_star(p("DBer(3,1,2)"), p("DBer(2,1,2)")),
            Err(Error::ParamMismatch(_))
        ));
    }

    #[test]
    fn verification_examples() {
        let r = verify_star_case(p("Ber(2,1,3)"), p("DBer(2,2,3)")).unwrap();
        assert_eq!(r.predicted, StarPrediction::FullSpace);
        assert!(r.verified);
        let r = verify_star_case(p("DBer(2,1,3)"), p("DBer(2,1,3)")).unwrap();
        assert_eq!(r.predicted, StarPrediction::Code(p("DBer(2,2,3)")));
        assert!(r.verified);
        assert_eq!(berman::build(p("DBer(2,2,3)")), berman::reed_muller(2, 3));
        assert!(matches!(
            verify_star_case(p("DBer(3,2,3)"), p("DBer(3,2,3)")),
            Err(Error::UndefinedCase(_))
        ));
    }

    #[test]
    fn disjoint_support_examples() {
        let j1 = t(3, &[2, 0]);
        assert_eq!(
            disjoint_support_product(&j1, &IndexTuple::zero(3, 2)).unwrap(),
            d_vector(&j1)
        );
        let v = disjoint_support_product(&t(3, &[1, 0]), &t(3, &[0, 2])).unwrap();
        assert_eq!(v.to_string(), "000001000");
        assert_eq!(v, BitVector::unit(9, t(3, &[1, 2]).index()));
        assert_eq!(
            disjoint_support_product(&t(3, &[1, 1]), &t(3, &[0, 2])),
            Err(Error::OverlappingSupport)
        );
    }

    #[test]
    fn basis_identity_examples() {
        assert_eq!(
            berman_basis_identity(&t(3, &[1, 2]), &t(3, &[1, 0])).unwrap(),
            c_vector(&t(3, &[0, 2]))
        );
        assert_eq!(
            berman_basis_identity(&t(2, &[1, 1]), &t(2, &[0, 1])).unwrap(),
            c_vector(&t(2, &[1, 0]))
        );
        assert!(berman_basis_identity(&t(3, &[1, 2]), &t(3, &[2, 0])).is_err());
        assert!(berman_basis_identity(&t(3, &[1, 2]), &t(3, &[1, 2])).is_err());
    }
}
