//! Sample CSV: a header `x1,...,xn[,region]` and one row per point.

use std::io::{Read, Write};

use jointex_core::model::SampleBatch;

use crate::error::CliError;

/// `printf("%.17g")`: 17 significant digits, trailing zeros dropped.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, v);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn coord_header(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Points read back from CSV, with the optional region column kept verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
    pub regions: Option<Vec<String>>,
}

impl Table {
    pub fn read<R: Read>(input: R) -> Result<Self, CliError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let headers = rdr.headers()?.clone();
        let region_col = headers.iter().position(|h| h == "region");
        let n = headers.len() - usize::from(region_col.is_some());
        if n == 0 {
            return Err(CliError::Csv("no coordinate columns".into()));
        }
        let mut rows = Vec::new();
        let mut regions = region_col.map(|_| Vec::new());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let mut row = Vec::with_capacity(n);
            for (k, field) in rec.iter().enumerate() {
                if Some(k) == region_col {
                    if let Some(r) = regions.as_mut() {
                        r.push(field.to_string());
                    }
                    continue;
                }
                let v: f64 = field.parse().map_err(|_| {
                    CliError::Csv(format!("row {}: {field:?} is not a number", line + 1))
                })?;
                row.push(v);
            }
            rows.push(row);
        }
        Ok(Self { n, rows, regions })
    }

    pub fn from_batch(batch: &SampleBatch) -> Self {
        Self {
            n: batch.n(),
            rows: batch.rows().map(<[f64]>::to_vec).collect(),
            regions: Some(batch.regions().iter().map(ToString::to_string).collect()),
        }
    }

    pub fn write<W: Write>(&self, out: W, prefix: &str) -> Result<(), CliError> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = coord_header(prefix, self.n);
        if self.regions.is_some() {
            header.push("region".into());
        }
        wtr.write_record(&header)?;
        let mut rec = Vec::with_capacity(self.n + 1);
        for (k, row) in self.rows.iter().enumerate() {
            rec.clear();
            rec.extend(row.iter().map(|&v| fmt_num(v)));
            if let Some(r) = &self.regions {
                rec.push(r[k].clone());
            }
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(0.1), "0.10000000000000001");
        assert_eq!(fmt_num(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(fmt_num(-2.0), "-2");
        assert_eq!(fmt_num(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_num(1e20), "1e+20");
        assert_eq!(fmt_num(123456.0), "123456");
    }

    #[test]
    fn formatted_values_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 6.02e23, 0.123_456_789_012_345_68] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn table_round_trip() {
        let t = Table {
            n: 2,
            rows: vec![vec![0.0, 0.25], vec![0.1, 0.0]],
            regions: Some(vec!["axis:2".into(), "axis:1".into()]),
        };
        let mut buf = Vec::new();
        t.write(&mut buf, "x").unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "x1,x2,region\n0,0.25,axis:2\n0.10000000000000001,0,axis:1\n"
        );
        assert_eq!(Table::read(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn rejects_non_numeric_fields() {
        let err = Table::read("x1,x2\n1,abc\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("not a number"));
    }
}
