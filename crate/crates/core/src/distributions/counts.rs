//! Count-table ingestion with plug-in frequencies (no smoothing).

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::distributions::{ObservedBinary, StratifiedObserved, Stratum};
use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountRow {
    pub e: u8,
    pub d: u8,
    pub z: Option<u32>,
    pub c: Option<u32>,
    pub count: u64,
}

/// Cell counts over exposure, outcome and optional mediator / covariate levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    rows: Vec<CountRow>,
}

impl CountTable {
    pub fn new(rows: Vec<CountRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidCount("table has no rows".into()));
        }
        if let Some(row) = rows.iter().find(|r| r.e > 1 || r.d > 1) {
            return Err(Error::InvalidCount(format!(
                "e and d must be 0 or 1, got e = {}, d = {}",
                row.e, row.d
            )));
        }
        let with_z = rows.iter().filter(|r| r.z.is_some()).count();
        let with_c = rows.iter().filter(|r| r.c.is_some()).count();
        if (with_z != 0 && with_z != rows.len()) || (with_c != 0 && with_c != rows.len()) {
            return Err(Error::InvalidCount(
                "z and c must be given on every row or on none".into(),
            ));
        }
        if rows.iter().map(|r| r.count).sum::<u64>() == 0 {
            return Err(Error::InvalidCount("total count is zero".into()));
        }
        Ok(Self { rows })
    }

    /// Parses `e,d,count` CSV with optional `z` and `c` columns in any order.
    /// Lines starting with `#` are skipped.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
        let column = |name: &str| headers.iter().position(|h| h == name);
        let (e_col, d_col, n_col) = match (column("e"), column("d"), column("count")) {
            (Some(e), Some(d), Some(n)) => (e, d, n),
            _ => {
                return Err(Error::Csv(
                    "header must contain e, d and count columns".into(),
                ))
            }
        };
        let (z_col, c_col) = (column("z"), column("c"));

        let mut rows = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Csv(e.to_string()))?;
            let field = |col: usize| -> Result<i64> {
                let raw = record.get(col).unwrap_or("");
                raw.parse::<i64>().map_err(|_| {
                    Error::Csv(format!("record {}: `{raw}` is not an integer", line + 1))
                })
            };
            let count = field(n_col)?;
            if count < 0 {
                return Err(Error::InvalidCount(format!(
                    "record {}: negative count {count}",
                    line + 1
                )));
            }
            let level = |col: Option<usize>, name: &str| -> Result<Option<u32>> {
                col.map(|c| {
                    let v = field(c)?;
                    u32::try_from(v).map_err(|_| {
                        Error::InvalidCount(format!("record {}: bad {name} level {v}", line + 1))
                    })
                })
                .transpose()
            };
            let binary = |col: usize, name: &str| -> Result<u8> {
                match field(col)? {
                    0 => Ok(0),
                    1 => Ok(1),
                    v => Err(Error::InvalidCount(format!(
                        "record {}: {name} must be 0 or 1, got {v}",
                        line + 1
                    ))),
                }
            };
            rows.push(CountRow {
                e: binary(e_col, "e")?,
                d: binary(d_col, "d")?,
                z: level(z_col, "z")?,
                c: level(c_col, "c")?,
                count: count as u64,
            });
        }
        Self::new(rows)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> std::io::Result<Result<Self>> {
        let file = std::fs::File::open(path)?;
        Ok(Self::from_csv_reader(file))
    }

    pub fn rows(&self) -> &[CountRow] {
        &self.rows
    }

    pub fn has_mediator(&self) -> bool {
        self.rows[0].z.is_some()
    }

    pub fn has_covariate(&self) -> bool {
        self.rows[0].c.is_some()
    }

    /// Count totals keyed by `(e, d)` for the rows of one stratum.
    fn arm_counts(&self, stratum: Option<u32>) -> [[u64; 2]; 2] {
        let mut cells = [[0u64; 2]; 2];
        for row in self.rows.iter().filter(|r| r.c == stratum) {
            cells[row.e as usize][row.d as usize] += row.count;
        }
        cells
    }
}

/// Result of ingesting a count table: a single law, or one law per stratum
/// when a `c` column is present.
#[derive(Debug, Clone, PartialEq)]
pub enum Observed<T> {
    Binary(ObservedBinary<T>),
    Stratified(StratifiedObserved<T>),
}

fn binary_from_cells<T: Scalar>(cells: [[u64; 2]; 2], stratum: &str) -> Result<ObservedBinary<T>> {
    let arm = |e: usize| cells[e][0] + cells[e][1];
    for e in 0..2 {
        if arm(e) == 0 {
            return Err(Error::EmptyArm {
                stratum: stratum.to_string(),
                missing: e as u8,
            });
        }
    }
    let n = T::from_u64_exact;
    let total = n(arm(0) + arm(1));
    ObservedBinary::new(
        n(arm(1)) / total,
        n(cells[1][1]) / n(arm(1)),
        n(cells[0][1]) / n(arm(0)),
    )
}

/// Plug-in frequencies, stratified by `c` when that column is present.
/// Mediator levels are summed over.
pub fn observed_from_counts<T: Scalar>(table: &CountTable) -> Result<Observed<T>> {
    if !table.has_covariate() {
        return binary_from_cells(table.arm_counts(None), "all").map(Observed::Binary);
    }
    let mut totals: BTreeMap<u32, u64> = BTreeMap::new();
    for row in table.rows() {
        *totals.entry(row.c.expect("covariate column")).or_default() += row.count;
    }
    let grand: u64 = totals.values().sum();
    let strata = totals
        .iter()
        .map(|(&c, &count)| {
            let label = c.to_string();
            Ok(Stratum {
                observed: binary_from_cells(table.arm_counts(Some(c)), &label)?,
                weight: T::from_u64_exact(count) / T::from_u64_exact(grand),
                label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    StratifiedObserved::new(strata).map(Observed::Stratified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{observed_from_joint, JointDEU};
    use num_rational::Rational64;

    fn parse(text: &str) -> Result<CountTable> {
        CountTable::from_csv_reader(text.as_bytes())
    }

    #[test]
    fn plug_in_frequencies_are_exact() {
        let t = parse("e,d,count\n1,1,27\n1,0,23\n0,1,8\n0,0,42\n").unwrap();
        let Observed::Binary(obs) = observed_from_counts::<Rational64>(&t).unwrap() else {
            panic!("expected unstratified law")
        };
        assert_eq!(obs.p_e1(), Rational64::new(1, 2));
        assert_eq!(obs.p_d1_e1(), Rational64::new(27, 50));
        assert_eq!(obs.p_d1_e0(), Rational64::new(4, 25));
    }

    #[test]
    fn equal_counts_give_halves() {
        let t = parse("# comment\ncount,d,e\n10,1,1\n10,0,1\n10,1,0\n10,0,0\n").unwrap();
        let Observed::Binary(obs) = observed_from_counts::<f64>(&t).unwrap() else {
            panic!()
        };
        assert_eq!((obs.p_e1(), obs.p_d1_e1(), obs.p_d1_e0()), (0.5, 0.5, 0.5));
    }

    #[test]
    fn missing_arm_and_bad_counts() {
        let t = parse("e,d,count\n1,1,5\n1,0,5\n").unwrap();
        assert!(matches!(
            observed_from_counts::<f64>(&t),
            Err(Error::EmptyArm { missing: 0, .. })
        ));
        assert!(matches!(
            parse("e,d,count\n1,1,-3\n0,0,5\n"),
            Err(Error::InvalidCount(_))
        ));
        assert!(matches!(parse("e,d\n1,1\n"), Err(Error::Csv(_))));
        assert!(matches!(parse("e,d,count\n2,1,3\n"), Err(Error::InvalidCount(_))));
    }

    #[test]
    fn stratum_shares_and_labels() {
        let t = parse(
            "c,e,d,count\n0,1,1,27\n0,1,0,23\n0,0,1,8\n0,0,0,42\n1,1,1,1\n1,1,0,1\n1,0,1,1\n1,0,0,1\n",
        )
        .unwrap();
        let Observed::Stratified(s) = observed_from_counts::<f64>(&t).unwrap() else {
            panic!()
        };
        assert_eq!(s.len(), 2);
        assert_eq!(s.strata()[0].label, "0");
        assert!((s.strata()[0].weight - 100.0 / 104.0).abs() < 1e-15);
        assert_eq!(s.strata()[1].observed.p_d1_e1(), 0.5);
    }

    #[test]
    fn empty_arm_names_the_stratum() {
        let t = parse("c,e,d,count\n0,1,1,2\n0,0,1,2\n3,1,1,4\n").unwrap();
        match observed_from_counts::<f64>(&t) {
            Err(Error::EmptyArm { stratum, missing }) => {
                assert_eq!(stratum, "3");
                assert_eq!(missing, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn point_mass_reconstruction_round_trips() {
        let t = parse("e,d,count\n1,1,3\n1,0,4\n0,1,5\n0,0,11\n").unwrap();
        let Observed::Binary(obs) = observed_from_counts::<Rational64>(&t).unwrap() else {
            panic!()
        };
        let joint = JointDEU::new(
            vec![Rational64::from_integer(1)],
            vec![obs.p_e1()],
            [vec![obs.p_d1_e0()], vec![obs.p_d1_e1()]],
        )
        .unwrap();
        assert_eq!(observed_from_joint(&joint).unwrap(), obs);
    }
}
