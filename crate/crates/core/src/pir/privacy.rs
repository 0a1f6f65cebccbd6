//! Privacy checks for the query matrices.
//!
//! A coalition `T` of servers sees `Q[:, T] = D_rand[:, T] + E[:, T]`. When
//! the retrieval code projects onto `T` as the full space, each row of
//! `D_rand[:, T]` is uniform and the shift by `E` is invisible, so the rank
//! test is exact. The empirical test builds the distribution of `Q[:, T]`
//! directly, either by enumerating every choice of `D_rand` or by sampling.

use itertools::Itertools;
use serde::Serialize;

use super::protocol::{demand_matrix, PirScheme};
use super::rng::SimRng;
use super::scheme::SchemeConfig;
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, EchelonBasis};

/// Above this many coalitions the rank test samples.
pub const EXHAUSTIVE_T_LIMIT: u64 = 100_000;
/// Largest `Mb · t` whose query alphabet is enumerated.
pub const EMPIRICAL_ALPHABET_BITS: usize = 12;
/// Largest `dim(D) · Mb` for which every `D_rand` is enumerated.
pub const EXHAUSTIVE_RANDOMNESS_BITS: usize = 20;
pub const MIN_EMPIRICAL_TRIALS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrivacyMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

impl PrivacyMode {
    /// Exhaustive when there are at most `EXHAUSTIVE_T_LIMIT` coalitions.
    pub fn auto(servers: usize, t: usize, samples: usize, seed: u64) -> Self {
        if binomial(servers, t) <= EXHAUSTIVE_T_LIMIT {
            PrivacyMode::Exhaustive
        } else {
            PrivacyMode::Sampled { samples, seed }
        }
    }
}

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Uniform `k`-subset of `0..n`, sorted.
fn random_subset(n: usize, k: usize, rng: &mut SimRng) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.below(n - i);
        pool.swap(i, j);
    }
    let mut out = pool[..k].to_vec();
    out.sort_unstable();
    out
}

fn coalitions(servers: usize, t: usize, mode: PrivacyMode) -> Box<dyn Iterator<Item = Vec<usize>>> {
    match mode {
        PrivacyMode::Exhaustive => Box::new((0..servers).combinations(t)),
        PrivacyMode::Sampled { samples, seed } => {
            let mut rng = SimRng::new(seed);
            Box::new((0..samples).map(move |_| random_subset(servers, t, &mut rng)))
        }
    }
}

/// First coalition of size `t` onto which `code` does not project as the
/// full space, if any.
pub fn privacy_violation(
    code: &LinearCode,
    t: usize,
    mode: PrivacyMode,
) -> Result<Option<Vec<usize>>> {
    let n = code.length();
    if t > n {
        return Err(Error::PreconditionViolated(format!(
            "t = {t} exceeds length {n}"
        )));
    }
    if t > code.dimension() {
        // too few rows to be onto any t columns
        return Ok(Some((0..t).collect()));
    }
    let generator = code.generator();
    if mode == PrivacyMode::Exhaustive {
        let cols = generator.transpose().into_rows();
        let mut prefix = Vec::with_capacity(t);
        return Ok(first_dependent(
            &cols,
            t,
            &mut prefix,
            &mut EchelonBasis::new(),
        ));
    }
    Ok(coalitions(n, t, mode).find(|cols| generator.select_columns(cols).rank() < t))
}

/// Lexicographically first `t`-subset of `cols` that is dependent. Shares
/// elimination work between subsets with a common prefix and stops at the
/// first dependent prefix, which every completion inherits.
fn first_dependent(
    cols: &[BitVector],
    t: usize,
    prefix: &mut Vec<usize>,
    basis: &mut EchelonBasis,
) -> Option<Vec<usize>> {
    if prefix.len() == t {
        return None;
    }
    let start = prefix.last().map_or(0, |&c| c + 1);
    let need = t - prefix.len();
    for c in start..=(cols.len() - need) {
        if !basis.push(&cols[c]) {
            let mut found = prefix.clone();
            found.extend(c..c + need);
            return Some(found);
        }
        prefix.push(c);
        let found = first_dependent(cols, t, prefix, basis);
        prefix.pop();
        basis.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

pub fn verify_privacy_rank(code: &LinearCode, t: usize, mode: PrivacyMode) -> Result<bool> {
    Ok(privacy_violation(code, t, mode)?.is_none())
}

#[derive(Clone, Debug, Default)]
pub struct EmpiricalOptions {
    pub trials: usize,
    /// Sample even when enumeration is affordable.
    pub force_sampling: bool,
    /// Fixed coalition instead of the worst-case search.
    pub coalition: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrivacyReport {
    pub coalition: Vec<usize>,
    /// Rank of the retrieval code's generator on the coalition.
    pub coalition_rank: usize,
    pub exhaustive: bool,
    /// Draws per distribution.
    pub draws: u64,
    pub max_tv: f64,
    /// Iteration and demand pair attaining `max_tv`; `None` is the query
    /// distribution with no demand embedded.
    pub worst_iteration: usize,
    pub worst_pair: (Option<usize>, Option<usize>),
}

impl PrivacyReport {
    pub fn is_exactly_private(&self) -> bool {
        self.max_tv == 0.0
    }
}

pub fn verify_privacy_empirical(
    config: SchemeConfig,
    t: usize,
    trials: usize,
) -> Result<PrivacyReport> {
    verify_privacy_empirical_with(
        config,
        t,
        &EmpiricalOptions {
            trials,
            ..Default::default()
        },
    )
}

/// Maximum total-variation distance between the distributions of
/// `Q[:, T]` over all pairs of demands (plus the demand-free matrix
/// `D_rand`), maximized over iterations.
pub fn verify_privacy_empirical_with(
    config: SchemeConfig,
    t: usize,
    opts: &EmpiricalOptions,
) -> Result<PrivacyReport> {
    let scheme = PirScheme::new(config)?;
    let derived = &scheme.derived;
    let rows = derived.total_rows();
    if t == 0 || t > derived.servers {
        return Err(Error::PreconditionViolated(format!(
            "coalition size {t} must lie in 1..={}",
            derived.servers
        )));
    }
    if rows * t > EMPIRICAL_ALPHABET_BITS {
        return Err(Error::TooLarge {
            dim: rows * t,
            limit: EMPIRICAL_ALPHABET_BITS,
        });
    }
    let k_d = derived.retrieval_code.dimension();
    let exhaustive = !opts.force_sampling && k_d * rows <= EXHAUSTIVE_RANDOMNESS_BITS;
    if !exhaustive && opts.trials < MIN_EMPIRICAL_TRIALS {
        return Err(Error::PreconditionViolated(format!(
            "sampling needs at least {MIN_EMPIRICAL_TRIALS} trials, got {}",
            opts.trials
        )));
    }

    let generator = derived.retrieval_code.generator();
    let coalition = match &opts.coalition {
        Some(c) => {
            if c.len() != t || c.iter().any(|&j| j >= derived.servers) {
                return Err(Error::PreconditionViolated(format!(
                    "bad coalition {c:?} for t = {t}"
                )));
            }
            c.clone()
        }
        None => worst_coalition(&scheme, t, config.seed),
    };
    let coalition_rank = generator.select_columns(&coalition).rank();

    // projected generator rows as t-bit patterns
    let patterns: Vec<usize> = generator
        .rows()
        .iter()
        .map(|row| pack(&row.select(&coalition).iter().collect::<Vec<_>>()))
        .collect();
    let bins = 1usize << (rows * t);

    let (draws, reference_counts) = if exhaustive {
        (
            1u64 << (k_d * rows),
            enumerate_counts(&patterns, rows, t, bins),
        )
    } else {
        (opts.trials as u64, Vec::new())
    };

    let demands: Vec<Option<usize>> = std::iter::once(None)
        .chain((0..config.files).map(Some))
        .collect();
    let mut best = (0.0f64, 0usize, (None, None));
    let mut rng = SimRng::new(config.seed);
    for (tau, plan) in scheme.schedule.iterations.iter().enumerate() {
        let dists: Vec<Vec<u64>> = demands
            .iter()
            .map(|d| {
                let shift = match d {
                    Some(d) => {
                        demand_key(&demand_matrix(derived, &plan.assignments, *d), &coalition)
                    }
                    None => 0,
                };
                if exhaustive {
                    let mut out = vec![0u64; bins];
                    for (key, &c) in reference_counts.iter().enumerate() {
                        out[key ^ shift] = c;
                    }
                    out
                } else {
                    sample_counts(&patterns, rows, t, bins, opts.trials, shift, &mut rng)
                }
            })
            .collect();
        for (a, b) in (0..demands.len()).tuple_combinations() {
            let diff: u64 = dists[a]
                .iter()
                .zip(&dists[b])
                .map(|(x, y)| x.abs_diff(*y))
                .sum();
            let tv = diff as f64 / (2 * draws) as f64;
            if tv > best.0 {
                best = (tv, tau, (demands[a], demands[b]));
            }
        }
    }
    Ok(PrivacyReport {
        coalition,
        coalition_rank,
        exhaustive,
        draws,
        max_tv: best.0,
        worst_iteration: best.1,
        worst_pair: best.2,
    })
}

/// Coalition of size `t` minimizing the projected rank of the retrieval
/// code, ties broken by largest overlap with the first iteration's
/// coordinates, then lexicographically.
fn worst_coalition(scheme: &PirScheme, t: usize, seed: u64) -> Vec<usize> {
    let derived = &scheme.derived;
    let generator = derived.retrieval_code.generator();
    let first = scheme
        .schedule
        .iterations
        .first()
        .map(|p| p.coords())
        .unwrap_or_default();
    let mode = PrivacyMode::auto(derived.servers, t, 1000, seed);
    coalitions(derived.servers, t, mode)
        .map(|c| {
            let rank = generator.select_columns(&c).rank();
            let overlap = c.iter().filter(|j| first.contains(j)).count();
            (rank, std::cmp::Reverse(overlap), c)
        })
        .min()
        .map(|(_, _, c)| c)
        .expect("at least one coalition")
}

fn pack(bits: &[bool]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
}

fn demand_key(e: &BitMatrix, coalition: &[usize]) -> usize {
    let t = coalition.len();
    e.rows().iter().enumerate().fold(0, |acc, (r, row)| {
        acc | (pack(&row.select(coalition).iter().collect::<Vec<_>>()) << (r * t))
    })
}

/// Counts of `D_rand[:, T]` over every coefficient choice, visiting them in
/// Gray-code order so each step flips one generator row in one query row.
fn enumerate_counts(patterns: &[usize], rows: usize, t: usize, bins: usize) -> Vec<u64> {
    let k = patterns.len();
    let total_bits = k * rows;
    let mut counts = vec![0u64; bins];
    let mut key = 0usize;
    counts[key] += 1;
    for step in 1u64..(1u64 << total_bits) {
        let bit = step.trailing_zeros() as usize;
        let (row, g) = (bit / k, bit % k);
        key ^= patterns[g] << (row * t);
        counts[key] += 1;
    }
    counts
}

fn sample_counts(
    patterns: &[usize],
    rows: usize,
    t: usize,
    bins: usize,
    trials: usize,
    shift: usize,
    rng: &mut SimRng,
) -> Vec<u64> {
    let k = patterns.len();
    let mut counts = vec![0u64; bins];
    for _ in 0..trials {
        let mut key = shift;
        for row in 0..rows {
            let coeffs = rng.bits(k);
            let proj = coeffs
                .ones_indices()
                .into_iter()
                .fold(0, |acc, g| acc ^ patterns[g]);
            key ^= proj << (row * t);
        }
        counts[key] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::berman;

    fn code(s: &str) -> LinearCode {
        berman::build(s.parse().unwrap())
    }

    fn config(s: &str, r: &str, files: usize) -> SchemeConfig {
        SchemeConfig {
            storage: s.parse().unwrap(),
            retrieval: r.parse().unwrap(),
            files,
            seed: 17,
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(27, 8), 2_220_075);
        assert_eq!(binomial(9, 3), 84);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(200, 100), u64::MAX);
    }

    #[test]
    fn exhaustive_search_matches_plain_scan() {
        for s in ["DBer(3,1,2)", "Ber(2,1,3)", "DBer(2,2,3)", "Ber(3,0,2)"] {
            let c = code(s);
            let g = c.generator();
            for t in 1..=c.dimension().min(6) {
                let plain = (0..c.length())
                    .combinations(t)
                    .find(|cols| g.select_columns(cols).rank() < t);
                assert_eq!(
                    privacy_violation(&c, t, PrivacyMode::Exhaustive).unwrap(),
                    plain,
                    "{s} t = {t}"
                );
            }
        }
    }

    #[test]
    fn rank_test_on_small_codes() {
        assert!(
            verify_privacy_rank(&LinearCode::repetition(5), 1, PrivacyMode::Exhaustive).unwrap()
        );
        assert!(
            !verify_privacy_rank(&LinearCode::repetition(5), 2, PrivacyMode::Exhaustive).unwrap()
        );
        let d = code("DBer(3,1,2)");
        assert!(verify_privacy_rank(&d, 3, PrivacyMode::Exhaustive).unwrap());
        assert!(!verify_privacy_rank(&d, 4, PrivacyMode::Exhaustive).unwrap());
        assert!(verify_privacy_rank(&code("DBer(2,1,2)"), 3, PrivacyMode::Exhaustive).unwrap());
        assert!(verify_privacy_rank(&d, 0, PrivacyMode::Exhaustive).unwrap());
        assert!(verify_privacy_rank(&d, 10, PrivacyMode::Exhaustive).is_err());
    }

    #[test]
    fn zero_column_breaks_single_server_privacy() {
        let c = LinearCode::from_generator(&BitMatrix::from_strs(&["110", "010"]).unwrap());
        assert_eq!(
            privacy_violation(&c, 1, PrivacyMode::Exhaustive).unwrap(),
            Some(vec![2])
        );
    }

    #[test]
    fn sampled_mode_is_deterministic() {
        let d = code("Ber(3,1,3)");
        let mode = PrivacyMode::Sampled {
            samples: 500,
            seed: 3,
        };
        assert!(verify_privacy_rank(&d, 8, mode).unwrap());
        assert_eq!(
            privacy_violation(&d, 9, mode).unwrap(),
            privacy_violation(&d, 9, mode).unwrap()
        );
    }

    #[test]
    fn exhaustive_enumeration_single_file() {
        // b = 4 stripes, dim D = 5: 2^20 draws over a 12-bit alphabet
        let report =
            verify_privacy_empirical(config("DBer(3,0,2)", "DBer(3,1,2)", 1), 3, 0).unwrap();
        assert!(report.exhaustive);
        assert_eq!(report.draws, 1 << 20);
        assert_eq!(report.coalition_rank, 3);
        assert!(report.is_exactly_private());
    }

    #[test]
    fn exhaustive_enumeration_two_files() {
        let report =
            verify_privacy_empirical(config("DBer(2,1,3)", "DBer(2,1,3)", 2), 3, 0).unwrap();
        assert!(report.exhaustive);
        assert_eq!(report.max_tv, 0.0);
    }

    #[test]
    fn sampled_distance_is_small() {
        let opts = EmpiricalOptions {
            trials: 100_000,
            force_sampling: true,
            coalition: None,
        };
        let report =
            verify_privacy_empirical_with(config("DBer(2,1,3)", "DBer(2,1,3)", 2), 3, &opts)
                .unwrap();
        assert!(!report.exhaustive);
        assert!(report.max_tv < 0.02, "{}", report.max_tv);
    }

    #[test]
    fn weak_coalition_is_detected() {
        // four points of a plane: affine functions there have even weight
        let opts = EmpiricalOptions {
            trials: 0,
            force_sampling: false,
            coalition: Some(vec![0, 1, 2, 3]),
        };
        let report =
            verify_privacy_empirical_with(config("DBer(2,1,3)", "DBer(2,1,3)", 2), 4, &opts)
                .unwrap();
        assert_eq!(report.coalition_rank, 3);
        assert_eq!(report.max_tv, 1.0);
    }

    #[test]
    fn guards() {
        let c = config("DBer(3,0,2)", "DBer(3,1,2)", 2);
        assert!(matches!(
            verify_privacy_empirical(c, 3, 0),
            Err(Error::TooLarge { .. })
        ));
        let c = config("Ber(3,1,2)", "DBer(3,0,2)", 1);
        let opts = EmpiricalOptions {
            trials: 10,
            force_sampling: true,
            coalition: None,
        };
        assert!(matches!(
            verify_privacy_empirical_with(c, 1, &opts),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            verify_privacy_empirical(c, 0, 0),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
