use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;

use crate::berman::{self, dimension_formula, tuples_of_weight, BermanKind, BermanParams};
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::star::star_codes;

pub type Rate = Ratio<u64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeConfig {
    pub storage: BermanParams,
    pub retrieval: BermanParams,
    /// Number of files `M` in the library.
    pub files: usize,
    pub seed: u64,
}

/// The three admissible storage/retrieval combinations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    /// `DBer(r_C)` storage, `DBer(r_D)` retrieval.
    DualDual,
    /// `DBer(r_C)` storage, `Ber(r_D)` retrieval with `r_D ≥ r_C`.
    DualBerman,
    /// `Ber(r_C)` storage, `DBer(r_D)` retrieval with `r_C ≥ r_D`.
    BermanDual,
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairKind::DualDual => "DBer/DBer",
            PairKind::DualBerman => "DBer/Ber",
            PairKind::BermanDual => "Ber/DBer",
        })
    }
}

/// Determines which admissible combination a pair belongs to, naming the
/// violated condition otherwise.
pub fn classify_pair(storage: BermanParams, retrieval: BermanParams) -> Result<PairKind> {
    if (storage.n, storage.m) != (retrieval.n, retrieval.m) {
        return Err(Error::UnsupportedPair(format!(
            "{storage} and {retrieval} must share (n, m)"
        )));
    }
    if storage.is_zero_code() {
        return Err(Error::UnsupportedPair(format!(
            "storage code {storage} is the zero code"
        )));
    }
    if retrieval.is_zero_code() {
        return Err(Error::UnsupportedPair(format!(
            "retrieval code {retrieval} is the zero code"
        )));
    }
    use BermanKind::*;
    match (storage.kind, retrieval.kind) {
        (DualBerman, DualBerman) => Ok(PairKind::DualDual),
        (DualBerman, Berman) if retrieval.r >= storage.r => Ok(PairKind::DualBerman),
        (DualBerman, Berman) => Err(Error::UnsupportedPair(format!(
            "DBer storage with Ber retrieval requires r_D >= r_C, got r_C = {}, r_D = {}",
            storage.r, retrieval.r
        ))),
        (Berman, DualBerman) if storage.r >= retrieval.r => Ok(PairKind::BermanDual),
        (Berman, DualBerman) => Err(Error::UnsupportedPair(format!(
            "Ber storage with DBer retrieval requires r_C >= r_D, got r_C = {}, r_D = {}",
            storage.r, retrieval.r
        ))),
        (Berman, Berman) => Err(Error::UnsupportedPair(
            "Ber storage with Ber retrieval matches no admissible combination".into(),
        )),
    }
}

/// `(t, R_st, R_pir)` from the closed-form expressions for each combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RateTriple {
    pub t: usize,
    pub storage_rate: Rate,
    pub pir_rate: Rate,
}

fn weight_sum(n: usize, m: usize, weights: impl Iterator<Item = usize>) -> u64 {
    weights.map(|w| tuples_of_weight(n, m, w) as u64).sum()
}

pub fn closed_form(storage: BermanParams, retrieval: BermanParams) -> Result<RateTriple> {
    let kind = classify_pair(storage, retrieval)?;
    let (n, m) = (storage.n, storage.m);
    let (rc, rd) = (storage.r, retrieval.r);
    let servers = storage.length() as u64;
    let (st, pir, t) = match kind {
        PairKind::DualDual => (
            weight_sum(n, m, 0..=rc),
            weight_sum(n, m, (rc + rd + 1)..=m),
            (1usize << (rd + 1)) - 1,
        ),
        PairKind::DualBerman => (
            weight_sum(n, m, 0..=rc),
            weight_sum(n, m, 0..=(rd - rc)),
            n.pow((m - rd) as u32) - 1,
        ),
        PairKind::BermanDual => (
            weight_sum(n, m, (rc + 1)..=m),
            weight_sum(n, m, 0..=(rc - rd)),
            (1usize << (rd + 1)) - 1,
        ),
    };
    Ok(RateTriple {
        t,
        storage_rate: Rate::new(st, servers),
        pir_rate: Rate::new(pir, servers),
    })
}

/// Everything the protocol needs, derived from the configuration by
/// constructing the codes.
#[derive(Clone, Debug)]
pub struct SchemeDerived {
    pub config: SchemeConfig,
    pub pair: PairKind,
    /// Number of servers `n_s = n^m`.
    pub servers: usize,
    pub storage_code: LinearCode,
    pub retrieval_code: LinearCode,
    /// `C ⋆ D`.
    pub product_code: LinearCode,
    /// Generator of `(C ⋆ D)^⊥`, one row per recoverable symbol.
    pub parity: BitMatrix,
    /// `k_C`.
    pub storage_dim: usize,
    /// `dim((C ⋆ D)^⊥)`, symbols recovered per iteration.
    pub recover_per_iteration: usize,
    /// Collusion tolerance `d_min(D^⊥) - 1`.
    pub t: usize,
    pub storage_rate: Rate,
    pub pir_rate: Rate,
    /// Stripes `b` per file.
    pub stripes: usize,
    /// Iterations `S` per retrieval.
    pub iterations: usize,
}

impl SchemeDerived {
    /// Row of the stacked file matrix holding stripe `stripe` of `file`.
    pub fn row_of(&self, file: usize, stripe: usize) -> usize {
        file * self.stripes + stripe
    }

    /// `M · b`.
    pub fn total_rows(&self) -> usize {
        self.config.files * self.stripes
    }
}

pub fn derive_scheme(config: SchemeConfig) -> Result<SchemeDerived> {
    let pair = classify_pair(config.storage, config.retrieval)?;
    if config.files == 0 {
        return Err(Error::InvalidParams(
            "the library must hold at least one file".into(),
        ));
    }
    let servers = config.storage.length();
    let storage_code = berman::build(config.storage);
    let retrieval_code = berman::build(config.retrieval);
    let product_code = star_codes(&storage_code, &retrieval_code)?;
    let parity = product_code.dual().generator().clone();
    let recover = parity.num_rows();
    if recover == 0 {
        return Err(Error::ZeroRate);
    }
    let storage_dim = storage_code.dimension();
    debug_assert_eq!(storage_dim, dimension_formula(config.storage));
    let t = match berman::min_distance_formula(config.retrieval.dual()) {
        Ok(d) => d - 1,
        // D is the full space: every coalition sees uniform queries
        Err(Error::ZeroCode) => servers,
        Err(e) => return Err(e),
    };
    let g = recover.gcd(&storage_dim);
    let stripes = recover / g;
    let iterations = storage_dim / g;
    Ok(SchemeDerived {
        config,
        pair,
        servers,
        storage_code,
        retrieval_code,
        product_code,
        parity,
        storage_dim,
        recover_per_iteration: recover,
        t,
        storage_rate: Rate::new(storage_dim as u64, servers as u64),
        pir_rate: Rate::new(recover as u64, servers as u64),
        stripes,
        iterations,
    })
}
