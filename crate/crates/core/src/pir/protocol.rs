//! Storage encoding, query generation, server responses, decoding and the
//! end-to-end retrieval run.

use serde_json::{json, Value};

use super::rng::{SimRng, SIM_RNG_NAME};
use super::schedule::{build_schedule, Assignment, Schedule};
use super::scheme::{derive_scheme, Rate, SchemeConfig, SchemeDerived};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// A derived scheme together with its schedule.
#[derive(Clone, Debug)]
pub struct PirScheme {
    pub derived: SchemeDerived,
    pub schedule: Schedule,
}

impl PirScheme {
    pub fn new(config: SchemeConfig) -> Result<Self> {
        let derived = derive_scheme(config)?;
        let schedule = build_schedule(&derived)?;
        Ok(Self { derived, schedule })
    }

    /// `b·k_C / (S·n_s)` for the schedule actually used.
    pub fn achieved_rate(&self) -> Rate {
        let d = &self.derived;
        Rate::new(
            (d.stripes * d.storage_dim) as u64,
            (self.schedule.iterations.len() * d.servers) as u64,
        )
    }
}

/// `Y = X · G_C` where `X` stacks the files; row `file·b + stripe` of `Y` is
/// the codeword of that stripe and column `i` is what server `i` stores.
pub fn encode_storage(derived: &SchemeDerived, files: &[BitMatrix]) -> Result<BitMatrix> {
    if files.len() != derived.config.files {
        return Err(Error::ShapeMismatch(format!(
            "expected {} files, got {}",
            derived.config.files,
            files.len()
        )));
    }
    let mut rows = Vec::with_capacity(derived.total_rows());
    for (f, file) in files.iter().enumerate() {
        if file.num_rows() != derived.stripes || file.num_cols() != derived.storage_dim {
            return Err(Error::ShapeMismatch(format!(
                "file {f} is {}x{}, expected {}x{}",
                file.num_rows(),
                file.num_cols(),
                derived.stripes,
                derived.storage_dim
            )));
        }
        for stripe in file.rows() {
            rows.push(derived.storage_code.encode(stripe)?);
        }
    }
    BitMatrix::from_rows(derived.servers, rows)
}

/// `Q = D_rand + E`, each `Mb × n_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryMatrix {
    pub random: BitMatrix,
    pub demand: BitMatrix,
    pub query: BitMatrix,
}

impl QueryMatrix {
    /// Column `i`, sent to server `i`.
    pub fn server_query(&self, server: usize) -> BitVector {
        self.query.column(server)
    }
}

/// Query matrix for iteration `tau` when file `demand` is wanted. Every row
/// of `D_rand` is a fresh uniform codeword of the retrieval code.
pub fn gen_queries(
    derived: &SchemeDerived,
    schedule: &Schedule,
    demand: usize,
    tau: usize,
    rng: &mut SimRng,
) -> Result<QueryMatrix> {
    if demand >= derived.config.files {
        return Err(Error::InvalidParams(format!(
            "demand {demand} out of range for {} files",
            derived.config.files
        )));
    }
    let plan = schedule
        .iterations
        .get(tau)
        .ok_or_else(|| Error::InvalidParams(format!("iteration {tau} out of range")))?;
    let k_d = derived.retrieval_code.dimension();
    let mut random_rows = Vec::with_capacity(derived.total_rows());
    for _ in 0..derived.total_rows() {
        let coeffs = rng.bits(k_d);
        random_rows.push(derived.retrieval_code.encode(&coeffs)?);
    }
    let random = BitMatrix::from_rows(derived.servers, random_rows)?;
    let demand_part = demand_matrix(derived, &plan.assignments, demand);
    let query = BitMatrix::from_rows(
        derived.servers,
        random
            .rows()
            .iter()
            .zip(demand_part.rows())
            .map(|(a, b)| a.xor(b))
            .collect::<Result<_>>()?,
    )?;
    Ok(QueryMatrix {
        random,
        demand: demand_part,
        query,
    })
}

/// `E`: a 1 at `(row of (demand, a), j)` for each assigned pair `(a, j)`.
pub fn demand_matrix(
    derived: &SchemeDerived,
    assignments: &[Assignment],
    demand: usize,
) -> BitMatrix {
    let mut e = BitMatrix::zeros(derived.total_rows(), derived.servers);
    for a in assignments {
        e.set(derived.row_of(demand, a.stripe), a.coord, true);
    }
    e
}

/// `⟨q_i, Y_i⟩`.
pub fn server_respond(stored: &BitVector, query: &BitVector) -> Result<bool> {
    stored.dot(query)
}

/// Responses of all servers to one query matrix.
pub fn collect_responses(stored: &BitMatrix, queries: &QueryMatrix) -> Result<BitVector> {
    let y = stored.transpose();
    let q = queries.query.transpose();
    let bits = y
        .rows()
        .iter()
        .zip(q.rows())
        .map(|(yi, qi)| server_respond(yi, qi))
        .collect::<Result<Vec<_>>>()?;
    Ok(BitVector::from_bools(&bits))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Recovered {
    pub stripe: usize,
    pub coord: usize,
    pub bit: bool,
}

/// `H · rᵀ`.
pub fn syndrome(derived: &SchemeDerived, responses: &BitVector) -> Result<BitVector> {
    derived.parity.mul_vec(responses)
}

/// Recovers the desired codeword symbols of iteration `tau` from the
/// responses by solving `H[:, J] · y_J = H · rᵀ`.
pub fn decode_iteration(
    derived: &SchemeDerived,
    schedule: &Schedule,
    tau: usize,
    responses: &BitVector,
) -> Result<Vec<Recovered>> {
    if responses.len() != derived.servers {
        return Err(Error::LengthMismatch {
            expected: derived.servers,
            found: responses.len(),
        });
    }
    let plan = schedule
        .iterations
        .get(tau)
        .ok_or_else(|| Error::InvalidParams(format!("iteration {tau} out of range")))?;
    let sigma = syndrome(derived, responses)?;
    let coords = plan.coords();
    let values = if coords.len() == derived.recover_per_iteration {
        derived.parity.invert_columns(&coords)?.mul_vec(&sigma)?
    } else {
        let sub = derived.parity.select_columns(&coords);
        if sub.rank() != coords.len() {
            return Err(Error::Singular);
        }
        sub.solve(&sigma)?
    };
    Ok(plan
        .assignments
        .iter()
        .enumerate()
        .map(|(i, a)| Recovered {
            stripe: a.stripe,
            coord: a.coord,
            bit: values.get(i),
        })
        .collect())
}

/// Rebuilds the `b × k_C` file from recovered symbols, one stripe at a time.
pub fn reconstruct_file(derived: &SchemeDerived, recovered: &[Recovered]) -> Result<BitMatrix> {
    let generator = derived.storage_code.generator();
    let mut rows = Vec::with_capacity(derived.stripes);
    for stripe in 0..derived.stripes {
        let mut coords = Vec::new();
        let mut bits = Vec::new();
        for r in recovered.iter().filter(|r| r.stripe == stripe) {
            if !coords.contains(&r.coord) {
                coords.push(r.coord);
                bits.push(r.bit);
            }
        }
        if coords.len() < derived.storage_dim {
            return Err(Error::Incomplete(format!(
                "stripe {stripe} has {} of {} symbols",
                coords.len(),
                derived.storage_dim
            )));
        }
        coords.truncate(derived.storage_dim);
        bits.truncate(derived.storage_dim);
        let inverse = generator.invert_columns(&coords)?;
        rows.push(inverse.left_mul(&BitVector::from_bools(&bits))?);
    }
    BitMatrix::from_rows(derived.storage_dim, rows)
}

/// Uniformly random library of `M` files of shape `b × k_C`.
pub fn random_files(derived: &SchemeDerived, rng: &mut SimRng) -> Result<Vec<BitMatrix>> {
    (0..derived.config.files)
        .map(|_| {
            let rows = (0..derived.stripes)
                .map(|_| rng.bits(derived.storage_dim))
                .collect();
            BitMatrix::from_rows(derived.storage_dim, rows)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct IterationRecord {
    pub coords: Vec<usize>,
    pub assignments: Vec<Assignment>,
    pub responses: BitVector,
    pub syndrome: BitVector,
    pub recovered: Vec<Recovered>,
    /// `r` minus the demand contribution lies in `C ⋆ D`.
    pub response_algebra_ok: bool,
}

#[derive(Clone, Debug)]
pub struct Transcript {
    pub config: SchemeConfig,
    pub demand: usize,
    pub t: usize,
    pub storage_rate: Rate,
    pub pir_rate: Rate,
    pub stripes: usize,
    pub iterations: Vec<IterationRecord>,
    pub stored_file: BitMatrix,
    pub reconstructed: BitMatrix,
    pub downloaded_bits: usize,
    pub achieved_rate: Rate,
}

impl Transcript {
    pub fn reconstructed_ok(&self) -> bool {
        self.reconstructed == self.stored_file
    }

    pub fn response_algebra_ok(&self) -> bool {
        self.iterations.iter().all(|it| it.response_algebra_ok)
    }

    pub fn to_json(&self) -> Value {
        let hex_rows =
            |m: &BitMatrix| -> Vec<String> { m.rows().iter().map(BitVector::to_hex).collect() };
        let iterations: Vec<Value> = self
            .iterations
            .iter()
            .map(|it| {
                json!({
                    "J": it.coords,
                    "assignments": it.assignments.iter().map(|a| json!([a.stripe, a.coord])).collect::<Vec<_>>(),
                    "responses_hex": it.responses.to_hex(),
                    "syndrome_hex": it.syndrome.to_hex(),
                    "recovered": it.recovered.iter().map(|r| json!([r.stripe, r.coord, u8::from(r.bit)])).collect::<Vec<_>>(),
                    "response_algebra_ok": it.response_algebra_ok,
                })
            })
            .collect();
        json!({
            "config": {
                "storage": self.config.storage.to_string(),
                "retrieval": self.config.retrieval.to_string(),
                "files": self.config.files,
                "seed": self.config.seed,
                "demand": self.demand,
                "rng": SIM_RNG_NAME,
            },
            "derived": {
                "t": self.t,
                "R_st": self.storage_rate.to_string(),
                "R_pir": self.pir_rate.to_string(),
                "b": self.stripes,
                "S": self.iterations.len(),
            },
            "iterations": iterations,
            "stored_file_hex": hex_rows(&self.stored_file),
            "reconstructed_hex": hex_rows(&self.reconstructed),
            "reconstructed_ok": self.reconstructed_ok(),
            "downloaded_bits": self.downloaded_bits,
            "achieved_rate": self.achieved_rate.to_string(),
        })
    }
}

pub fn run_retrieval(config: SchemeConfig, demand: usize) -> Result<Transcript> {
    run_retrieval_with(&PirScheme::new(config)?, config.seed, demand)
}

/// One retrieval against a prepared scheme, seeding the simulator with
/// `seed`. Files are drawn first, then each iteration's `D_rand`.
pub fn run_retrieval_with(scheme: &PirScheme, seed: u64, demand: usize) -> Result<Transcript> {
    let derived = &scheme.derived;
    let schedule = &scheme.schedule;
    if demand >= derived.config.files {
        return Err(Error::InvalidParams(format!(
            "demand {demand} out of range for {} files",
            derived.config.files
        )));
    }
    let mut rng = SimRng::new(seed);
    let files = random_files(derived, &mut rng)?;
    let stored = encode_storage(derived, &files)?;

    let mut iterations = Vec::with_capacity(schedule.iterations.len());
    let mut recovered = Vec::new();
    for (tau, plan) in schedule.iterations.iter().enumerate() {
        let queries = gen_queries(derived, schedule, demand, tau, &mut rng)?;
        let responses = collect_responses(&stored, &queries)?;
        let response_algebra_ok = random_part_in_product(derived, &stored, &queries, &responses)?;
        let sigma = syndrome(derived, &responses)?;
        let symbols = decode_iteration(derived, schedule, tau, &responses)?;
        recovered.extend_from_slice(&symbols);
        iterations.push(IterationRecord {
            coords: plan.coords(),
            assignments: plan.assignments.clone(),
            responses,
            syndrome: sigma,
            recovered: symbols,
            response_algebra_ok,
        });
    }
    let reconstructed = reconstruct_file(derived, &recovered)?;
    Ok(Transcript {
        config: derived.config,
        demand,
        t: derived.t,
        storage_rate: derived.storage_rate,
        pir_rate: derived.pir_rate,
        stripes: derived.stripes,
        downloaded_bits: iterations.len() * derived.servers,
        iterations,
        stored_file: files[demand].clone(),
        reconstructed,
        achieved_rate: scheme.achieved_rate(),
    })
}

/// Subtracts `Σ_rows E[row] ⋆ Y[row]` from the responses and tests
/// membership of the remainder in `C ⋆ D`.
fn random_part_in_product(
    derived: &SchemeDerived,
    stored: &BitMatrix,
    queries: &QueryMatrix,
    responses: &BitVector,
) -> Result<bool> {
    let mut rest = responses.clone();
    for (e, y) in queries.demand.rows().iter().zip(stored.rows()) {
        rest.xor_assign(&e.and(y)?);
    }
    derived.product_code.contains(&rest)
}
