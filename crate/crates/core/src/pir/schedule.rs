//! Assignment of desired-file symbols to iterations.
//!
//! Each iteration `τ` retrieves the codeword symbols at a coordinate set
//! `J_τ`, one stripe per coordinate. Decoding an iteration needs the
//! parity-check columns `H[:, J_τ]` to be independent; reconstructing a
//! stripe needs its coordinates, over all iterations, to form an information
//! set of the storage code.
//!
//! Each retrieved symbol is an element carrying a coordinate, and the
//! elements are split two ways at once: into iterations, independent in the
//! columns of `H`, and into stripes, independent in the columns of `G_C`.
//! Both splits are matroid partitions over the same elements. Slots are
//! filled greedily with the least used coordinate both partitions can
//! absorb; absorbing an element may reshuffle earlier ones along a shortest
//! exchange path, which undoes bad early choices without blind backtracking.

use std::collections::VecDeque;

use serde::Serialize;

use super::scheme::SchemeDerived;
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Default cap on independence tests before giving up.
pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Assignment {
    pub stripe: usize,
    pub coord: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationPlan {
    pub assignments: Vec<Assignment>,
}

impl IterationPlan {
    /// `J_τ` in assignment order.
    pub fn coords(&self) -> Vec<usize> {
        self.assignments.iter().map(|a| a.coord).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub stripes: usize,
    pub iterations: Vec<IterationPlan>,
}

impl Schedule {
    /// Coordinates assigned to `stripe`, in the order they are retrieved.
    pub fn stripe_coords(&self, stripe: usize) -> Vec<usize> {
        self.iterations
            .iter()
            .flat_map(|it| it.assignments.iter())
            .filter(|a| a.stripe == stripe)
            .map(|a| a.coord)
            .collect()
    }

    /// Checks every schedule invariant against the scheme.
    pub fn validate(&self, derived: &SchemeDerived) -> Result<()> {
        let bad = |msg: String| Err(Error::ScheduleNotFound(msg));
        if self.stripes != derived.stripes {
            return bad(format!(
                "schedule has {} stripes, scheme needs {}",
                self.stripes, derived.stripes
            ));
        }
        for (tau, it) in self.iterations.iter().enumerate() {
            let coords = it.coords();
            if coords.len() > derived.recover_per_iteration {
                return bad(format!(
                    "iteration {tau} retrieves {} symbols",
                    coords.len()
                ));
            }
            let sub = derived.parity.select_columns(&coords);
            if sub.rank() != coords.len() {
                return bad(format!("parity columns of iteration {tau} are dependent"));
            }
            if it.assignments.iter().any(|a| a.stripe >= self.stripes) {
                return bad(format!("iteration {tau} names a stripe out of range"));
            }
        }
        for stripe in 0..self.stripes {
            let coords = self.stripe_coords(stripe);
            if coords.len() != derived.storage_dim {
                return bad(format!("stripe {stripe} has {} coordinates", coords.len()));
            }
            if derived
                .storage_code
                .generator()
                .invert_columns(&coords)
                .is_err()
            {
                return bad(format!(
                    "stripe {stripe} coordinates are not an information set"
                ));
            }
        }
        Ok(())
    }
}

/// Schedule with the minimal iteration count `S = b·k_C / d_perp`.
pub fn build_schedule(derived: &SchemeDerived) -> Result<Schedule> {
    build_schedule_with(derived, derived.iterations, DEFAULT_SEARCH_BUDGET)
}

/// Schedule spread over `iterations ≥ S` iterations. Using more than `S`
/// iterations lowers the achieved rate below `dim((C⋆D)^⊥)/n_s`.
pub fn build_schedule_with(
    derived: &SchemeDerived,
    iterations: usize,
    budget: u64,
) -> Result<Schedule> {
    let slots_total = derived.stripes * derived.storage_dim;
    let per_iteration = derived.recover_per_iteration;
    if per_iteration == 0 {
        return Err(Error::ZeroRate);
    }
    if iterations < derived.iterations {
        return Err(Error::InvalidParams(format!(
            "{iterations} iterations cannot carry {slots_total} symbols at {per_iteration} per iteration"
        )));
    }
    let fail = |reason: String| {
        Error::ScheduleNotFound(format!(
            "{} / {} with {iterations} iterations: {reason}",
            derived.config.storage, derived.config.retrieval
        ))
    };
    // spread slots as evenly as possible; the minimal count fills every iteration
    let quota: Vec<usize> = (0..iterations)
        .map(|tau| slots_total / iterations + usize::from(tau < slots_total % iterations))
        .collect();

    let storage_cols = derived.storage_code.generator().transpose().into_rows();
    let parity_cols = derived.parity.transpose().into_rows();
    let servers = derived.servers;
    let usable: Vec<usize> = (0..servers)
        .filter(|&j| !parity_cols[j].is_zero() && !storage_cols[j].is_zero())
        .collect();
    // a coordinate appears at most once per iteration and once per stripe
    let max_uses = iterations.min(derived.stripes);

    let mut by_iteration = Partition::new(&parity_cols, quota);
    let mut by_stripe = Partition::new(&storage_cols, vec![derived.storage_dim; derived.stripes]);
    let mut budget = Budget {
        spent: 0,
        limit: budget,
    };
    let mut coords = Vec::with_capacity(slots_total);
    let mut uses = vec![0usize; servers];
    for slot in 0..slots_total {
        let mut order: Vec<usize> = usable
            .iter()
            .copied()
            .filter(|&j| uses[j] < max_uses)
            .collect();
        order.sort_by_key(|&j| (uses[j], (j + servers - slot % servers) % servers));
        let mut placed = false;
        for j in order {
            let Some(first) = by_iteration.find_path(j, &mut budget) else {
                continue;
            };
            let Some(second) = by_stripe.find_path(j, &mut budget) else {
                continue;
            };
            by_iteration.apply(j, &first);
            by_stripe.apply(j, &second);
            coords.push(j);
            uses[j] += 1;
            placed = true;
            break;
        }
        if budget.exhausted() {
            return Err(fail(format!(
                "search budget of {} independence tests exhausted",
                budget.limit
            )));
        }
        if !placed {
            return Err(fail(format!(
                "no coordinate extends slot {slot} of {slots_total}"
            )));
        }
    }

    let mut plans = vec![
        IterationPlan {
            assignments: Vec::new()
        };
        iterations
    ];
    for (e, &coord) in coords.iter().enumerate() {
        plans[by_iteration.owner[e]].assignments.push(Assignment {
            stripe: by_stripe.owner[e],
            coord,
        });
    }
    for plan in &mut plans {
        plan.assignments.sort_by_key(|a| a.coord);
    }
    let schedule = Schedule {
        stripes: derived.stripes,
        iterations: plans,
    };
    schedule.validate(derived)?;
    Ok(schedule)
}

struct Budget {
    spent: u64,
    limit: u64,
}

impl Budget {
    fn tick(&mut self) -> bool {
        self.spent += 1;
        self.spent <= self.limit
    }

    fn exhausted(&self) -> bool {
        self.spent > self.limit
    }
}

/// One independent part, kept in echelon form with each reduced row's
/// combination of members so circuits can be read off directly.
#[derive(Clone, Default)]
struct Part {
    members: Vec<usize>,
    rows: Vec<(usize, BitVector, BitVector)>,
}

impl Part {
    fn rebuild(&mut self, cols: &[BitVector], coord: &[usize]) {
        let k = self.members.len();
        self.rows.clear();
        for (i, &e) in self.members.iter().enumerate() {
            let (v, combo) = self.reduce(&cols[coord[e]], BitVector::unit(k, i));
            let pivot = v.first_one().expect("part members are independent");
            self.rows.push((pivot, v, combo));
        }
    }

    fn reduce(&self, v: &BitVector, mut combo: BitVector) -> (BitVector, BitVector) {
        let mut v = v.clone();
        for (pivot, row, c) in &self.rows {
            if v.get(*pivot) {
                v.xor_assign(row);
                combo.xor_assign(c);
            }
        }
        (v, combo)
    }

    /// Members whose columns sum to `v`, or `None` if `v` is independent.
    fn circuit(&self, v: &BitVector) -> Option<Vec<usize>> {
        let (rest, combo) = self.reduce(v, BitVector::zeros(self.members.len()));
        rest.is_zero().then(|| {
            combo
                .ones_indices()
                .into_iter()
                .map(|i| self.members[i])
                .collect()
        })
    }
}

/// Elements split into parts, each independent in `cols` and capped in size.
struct Partition<'a> {
    cols: &'a [BitVector],
    caps: Vec<usize>,
    coord: Vec<usize>,
    owner: Vec<usize>,
    parts: Vec<Part>,
}

impl<'a> Partition<'a> {
    fn new(cols: &'a [BitVector], caps: Vec<usize>) -> Self {
        let parts = vec![Part::default(); caps.len()];
        Self {
            cols,
            caps,
            coord: Vec::new(),
            owner: Vec::new(),
            parts,
        }
    }

    /// Shortest exchange path admitting a new element at coordinate `j`, as
    /// `(element, destination part)` moves.
    fn find_path(&self, j: usize, budget: &mut Budget) -> Option<Vec<(usize, usize)>> {
        let new = self.coord.len();
        let coord_of = |e: usize| if e == new { j } else { self.coord[e] };
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; new + 1];
        let mut seen = vec![false; new + 1];
        seen[new] = true;
        let mut queue = VecDeque::from([new]);
        while let Some(y) = queue.pop_front() {
            for (p, part) in self.parts.iter().enumerate() {
                if y != new && self.owner[y] == p {
                    continue;
                }
                if !budget.tick() {
                    return None;
                }
                let col = &self.cols[coord_of(y)];
                let leaving = match part.circuit(col) {
                    None if part.members.len() < self.caps[p] => {
                        let mut moves = vec![(y, p)];
                        let mut cur = y;
                        while let Some((prev, q)) = parent[cur] {
                            moves.push((prev, q));
                            cur = prev;
                        }
                        return Some(moves);
                    }
                    // a full part: any member can make room
                    None => part.members.clone(),
                    Some(c) => c,
                };
                for z in leaving {
                    if !seen[z] {
                        seen[z] = true;
                        parent[z] = Some((y, p));
                        queue.push_back(z);
                    }
                }
            }
        }
        None
    }

    fn apply(&mut self, j: usize, moves: &[(usize, usize)]) {
        self.coord.push(j);
        self.owner.push(usize::MAX);
        let mut touched = vec![false; self.parts.len()];
        for &(e, _) in moves {
            let from = self.owner[e];
            if from != usize::MAX {
                self.parts[from].members.retain(|&x| x != e);
                touched[from] = true;
            }
        }
        for &(e, to) in moves {
            self.parts[to].members.push(e);
            self.owner[e] = to;
            touched[to] = true;
        }
        for (p, &t) in touched.iter().enumerate() {
            if t {
                self.parts[p].rebuild(self.cols, &self.coord);
            }
        }
    }
}
