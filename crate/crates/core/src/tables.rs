//! Reproduction of the published `(t, R_st, R_pir)` comparison tables.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde_json::{json, Value};

use crate::berman::BermanParams;
use crate::error::{Error, Result};
use crate::pir::scheme::{derive_scheme, Rate, SchemeConfig};

/// Column parameters `(n, m)` shared by all three tables.
pub const TABLE_COLUMNS: [(usize, usize); 4] = [(2, 5), (3, 3), (5, 2), (6, 2)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableId {
    /// `Ber(r_C)` storage, `DBer(r_D)` retrieval.
    II,
    /// `DBer(r_C)` storage, `DBer(r_D)` retrieval.
    III,
    /// `DBer(r_C)` storage, `Ber(r_D)` retrieval.
    IV,
}

/// How rates are printed in a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    /// Round half to even at this many decimals.
    HalfEven(u32),
    /// Drop digits past this many decimals.
    Truncate(u32),
}

impl TableId {
    pub const ALL: [TableId; 3] = [TableId::II, TableId::III, TableId::IV];

    pub fn name(self) -> &'static str {
        match self {
            TableId::II => "II",
            TableId::III => "III",
            TableId::IV => "IV",
        }
    }

    /// `(r_C, r_D)` row labels.
    pub fn rows(self) -> [(usize, usize); 3] {
        match self {
            TableId::II => [(0, 0), (1, 0), (1, 1)],
            TableId::III => [(0, 0), (0, 1), (1, 0)],
            TableId::IV => [(0, 0), (0, 1), (1, 1)],
        }
    }

    pub fn precision(self) -> Precision {
        match self {
            TableId::III => Precision::Truncate(2),
            _ => Precision::HalfEven(3),
        }
    }

    pub fn codes(
        self,
        n: usize,
        m: usize,
        rc: usize,
        rd: usize,
    ) -> Result<(BermanParams, BermanParams)> {
        Ok(match self {
            TableId::II => (
                BermanParams::berman(n, rc, m)?,
                BermanParams::dual_berman(n, rd, m)?,
            ),
            TableId::III => (
                BermanParams::dual_berman(n, rc, m)?,
                BermanParams::dual_berman(n, rd, m)?,
            ),
            TableId::IV => (
                BermanParams::dual_berman(n, rc, m)?,
                BermanParams::berman(n, rd, m)?,
            ),
        })
    }

    pub fn caption(self) -> &'static str {
        match self {
            TableId::II => "storage Ber(n,r_C,m), retrieval DBer(n,r_D,m)",
            TableId::III => "storage DBer(n,r_C,m), retrieval DBer(n,r_D,m)",
            TableId::IV => "storage DBer(n,r_C,m), retrieval Ber(n,r_D,m)",
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "II" | "2" => Ok(TableId::II),
            "III" | "3" => Ok(TableId::III),
            "IV" | "4" => Ok(TableId::IV),
            other => Err(Error::Parse(format!("unknown table {other:?}"))),
        }
    }
}

/// Decimal string of a rate in `[0, 1]` at the given precision, trailing
/// zeros removed (`0.960` prints as `0.96`, `0.300` as `0.3`).
pub fn format_rate(rate: Rate, precision: Precision) -> String {
    let (num, den) = (*rate.numer(), *rate.denom());
    let (digits, truncate) = match precision {
        Precision::HalfEven(d) => (d, false),
        Precision::Truncate(d) => (d, true),
    };
    let scale = 10u64.pow(digits);
    let (mut q, r) = (num * scale).div_rem(&den);
    if !truncate {
        let twice = 2 * r;
        if twice > den || (twice == den && q % 2 == 1) {
            q += 1;
        }
    }
    let int_part = q / scale;
    let frac = q % scale;
    if frac == 0 {
        return int_part.to_string();
    }
    let frac = format!("{frac:0width$}", width = digits as usize);
    format!("{int_part}.{}", frac.trim_end_matches('0'))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableCell {
    pub table: TableId,
    pub r_c: usize,
    pub r_d: usize,
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub storage_rate: Rate,
    pub pir_rate: Rate,
}

impl TableCell {
    pub fn storage_str(&self) -> String {
        format_rate(self.storage_rate, self.table.precision())
    }

    pub fn pir_str(&self) -> String {
        format_rate(self.pir_rate, self.table.precision())
    }

    /// `(t, R_st, R_pir)` as printed.
    pub fn triple(&self) -> String {
        format!("({}, {}, {})", self.t, self.storage_str(), self.pir_str())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "table": self.table.name(),
            "r_c": self.r_c,
            "r_d": self.r_d,
            "n": self.n,
            "m": self.m,
            "t": self.t,
            "r_st": self.storage_str(),
            "r_pir": self.pir_str(),
            "r_st_exact": self.storage_rate.to_string(),
            "r_pir_exact": self.pir_rate.to_string(),
        })
    }
}

/// One cell, computed by constructing the code pair.
pub fn table_cell(table: TableId, r_c: usize, r_d: usize, n: usize, m: usize) -> Result<TableCell> {
    let (storage, retrieval) = table.codes(n, m, r_c, r_d)?;
    let d = derive_scheme(SchemeConfig {
        storage,
        retrieval,
        files: 1,
        seed: 0,
    })?;
    Ok(TableCell {
        table,
        r_c,
        r_d,
        n,
        m,
        t: d.t,
        storage_rate: d.storage_rate,
        pir_rate: d.pir_rate,
    })
}

/// All cells of a table, row by row.
pub fn reproduce_table(table: TableId) -> Result<Vec<TableCell>> {
    let mut cells = Vec::new();
    for (r_c, r_d) in table.rows() {
        for (n, m) in TABLE_COLUMNS {
            cells.push(table_cell(table, r_c, r_d, n, m)?);
        }
    }
    Ok(cells)
}

pub const CSV_HEADER: &str = "table,r_c,r_d,n,m,t,r_st,r_pir";

pub fn cells_to_csv(cells: &[TableCell]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.table,
            c.r_c,
            c.r_d,
            c.n,
            c.m,
            c.t,
            c.storage_str(),
            c.pir_str()
        ));
    }
    out
}

pub fn cells_to_json(cells: &[TableCell]) -> Value {
    Value::Array(cells.iter().map(TableCell::to_json).collect())
}

/// Grid layout: one line per `(r_C, r_D)` row, one column per `(n, m)`.
pub fn table_to_text(table: TableId, cells: &[TableCell]) -> String {
    let mut out = format!("Table {table}: {}\n", table.caption());
    let mut header = vec!["(r_C, r_D)".to_string()];
    header.extend(
        TABLE_COLUMNS
            .iter()
            .map(|(n, m)| format!("(n,m) = ({n},{m})")),
    );
    let mut lines = vec![header];
    for (r_c, r_d) in table.rows() {
        let mut line = vec![format!("({r_c},{r_d})")];
        for (n, m) in TABLE_COLUMNS {
            let cell = cells
                .iter()
                .find(|c| c.table == table && (c.r_c, c.r_d, c.n, c.m) == (r_c, r_d, n, m));
            line.push(cell.map_or_else(|| "-".to_string(), TableCell::triple));
        }
        lines.push(line);
    }
    let widths: Vec<usize> = (0..lines[0].len())
        .map(|i| {
            lines
                .iter()
                .map(|l| l[i].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    for line in lines {
        let padded: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect();
        out.push_str(padded.join(" | ").trim_end());
        out.push('\n');
    }
    out
}
