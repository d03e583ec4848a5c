//! Built-in copies of the published reference tables, so the estimator
//! commands can run without hours of pipeline work.

use crate::bridge::{Convention, MomentTable};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};

pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");
pub const TABLE2_CSV: &str = include_str!("../data/table2.csv");
pub const TABLE3_CSV: &str = include_str!("../data/table3.csv");
pub const TABLE4_CSV: &str = include_str!("../data/table4.csv");

/// One row of the cyclic-number table for the QR pipeline.
#[derive(Clone, Debug)]
pub struct ZetaMomentRow {
    pub n: u32,
    pub zeta_s: BigUint,
    pub zeta_e: BigUint,
    pub zeta: BigUint,
    pub m: BigInt,
}

/// One row of the cogrowth table for the symmetric generator sum.
#[derive(Clone, Debug)]
pub struct CogrowthRow {
    pub n: u32,
    pub norm_sq: BigUint,
    pub eta: BigUint,
    pub zeta: BigUint,
    pub m: BigInt,
}

/// One published estimator row; values carry the printed precision, so they
/// are kept as strings alongside parsed floats.
#[derive(Clone, Debug)]
pub struct EstimatorGoldenRow {
    pub n: u32,
    pub root: String,
    pub ratio: String,
    pub alpha: String,
    pub lambda_max: String,
    pub bracket: Option<String>,
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .skip(1) // header row
}

fn parse_err(what: &str) -> Error {
    Error::Decode(format!("golden table: bad {what}"))
}

pub fn table1() -> Result<Vec<ZetaMomentRow>> {
    data_lines(TABLE1_CSV)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(parse_err("field count"));
            }
            Ok(ZetaMomentRow {
                n: f[0].parse().map_err(|_| parse_err("n"))?,
                zeta_s: f[1].parse().map_err(|_| parse_err("zeta_s"))?,
                zeta_e: f[2].parse().map_err(|_| parse_err("zeta_e"))?,
                zeta: f[3].parse().map_err(|_| parse_err("zeta"))?,
                m: f[4].parse().map_err(|_| parse_err("m"))?,
            })
        })
        .collect()
}

pub fn table3() -> Result<Vec<CogrowthRow>> {
    data_lines(TABLE3_CSV)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(parse_err("field count"));
            }
            Ok(CogrowthRow {
                n: f[0].parse().map_err(|_| parse_err("n"))?,
                norm_sq: f[1].parse().map_err(|_| parse_err("norm_sq"))?,
                eta: f[2].parse().map_err(|_| parse_err("eta"))?,
                zeta: f[3].parse().map_err(|_| parse_err("zeta"))?,
                m: f[4].parse().map_err(|_| parse_err("m"))?,
            })
        })
        .collect()
}

fn parse_estimator(text: &str) -> Result<Vec<EstimatorGoldenRow>> {
    data_lines(text)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(parse_err("field count"));
            }
            Ok(EstimatorGoldenRow {
                n: f[0].parse().map_err(|_| parse_err("n"))?,
                root: f[1].to_string(),
                ratio: f[2].to_string(),
                alpha: f[3].to_string(),
                lambda_max: f[4].to_string(),
                bracket: if f[5].is_empty() { None } else { Some(f[5].to_string()) },
            })
        })
        .collect()
}

pub fn table2() -> Result<Vec<EstimatorGoldenRow>> {
    parse_estimator(TABLE2_CSV)
}

pub fn table4() -> Result<Vec<EstimatorGoldenRow>> {
    parse_estimator(TABLE4_CSV)
}

/// The published zeta column, n = 1..28.
pub fn table1_zetas() -> Result<Vec<BigInt>> {
    Ok(table1()?.into_iter().map(|r| BigInt::from(r.zeta)).collect())
}

/// The published QR moment table (m_0 = 1/4 convention).
pub fn table1_moments() -> Result<MomentTable> {
    let higher: Vec<BigInt> = table1()?.into_iter().map(|r| r.m).collect();
    MomentTable::from_integers(Convention::QuarterTrace, &higher)
}

/// The published symmetric-sum moment table (m_0 = 1 convention).
pub fn table3_moments() -> Result<MomentTable> {
    let higher: Vec<BigInt> = table3()?.into_iter().map(|r| r.m).collect();
    MomentTable::from_integers(Convention::UnitTrace, &higher)
}

/// A printed decimal zero-padded to five decimals, e.g. "2." -> 2.00000 and
/// "3.2016" -> 3.20160; the published tables show six significant digits
/// with trailing zeros dropped.
pub fn printed_to_f64(printed: &str) -> Result<f64> {
    printed.parse::<f64>().map_err(|_| parse_err("decimal"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn tables_have_28_rows() {
        assert_eq!(table1().unwrap().len(), 28);
        assert_eq!(table2().unwrap().len(), 28);
        assert_eq!(table3().unwrap().len(), 28);
        assert_eq!(table4().unwrap().len(), 28);
    }

    #[test]
    fn split_identity_holds() {
        for row in table1().unwrap() {
            if row.n >= 2 {
                assert_eq!(&row.zeta_s * 2u8 + &row.zeta_e * 4u8, row.zeta, "n={}", row.n);
            }
        }
    }

    #[test]
    fn first_bracket_is_missing() {
        let t2 = table2().unwrap();
        assert!(t2[0].bracket.is_none());
        assert!(t2[1].bracket.is_some());
    }

    #[test]
    fn zeta_column_starts_with_zeros() {
        let zetas = table1_zetas().unwrap();
        for (i, z) in zetas.iter().enumerate().take(4) {
            assert!(z.is_zero(), "zeta_{}", i + 1);
        }
    }

    #[test]
    fn moment_tables_parse_and_validate() {
        assert_eq!(table1_moments().unwrap().order(), 28);
        assert_eq!(table3_moments().unwrap().order(), 28);
    }
}
