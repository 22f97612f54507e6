use std::fmt::Write as _;

use super::BoolExpr;
use crate::error::{Error, Result};

pub const MAX_ARITY: usize = 24;

/// Outputs of `f: {0,1}^n -> {0,1}` indexed by row, with `X1` the most
/// significant input bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: usize,
    outputs: Vec<bool>,
}

fn check_arity(arity: usize) -> Result<()> {
    if arity == 0 {
        return Err(Error::shape("truth tables need at least one input"));
    }
    if arity > MAX_ARITY {
        return Err(Error::Size {
            what: "truth table arity",
            size: arity as u128,
            limit: MAX_ARITY as u128,
        });
    }
    Ok(())
}

impl TruthTable {
    pub fn new(arity: usize, outputs: Vec<bool>) -> Result<Self> {
        check_arity(arity)?;
        if outputs.len() != 1 << arity {
            return Err(Error::shape(format!(
                "arity {arity} needs {} rows, got {}",
                1usize << arity,
                outputs.len()
            )));
        }
        Ok(TruthTable { arity, outputs })
    }

    pub fn from_fn(arity: usize, f: impl Fn(&[bool]) -> bool) -> Result<Self> {
        check_arity(arity)?;
        let mut bits = vec![false; arity];
        let outputs = (0..1usize << arity)
            .map(|row| {
                fill_row_bits(arity, row, &mut bits);
                f(&bits)
            })
            .collect();
        Ok(TruthTable { arity, outputs })
    }

    /// Exhaustive evaluation of `e` over `n` inputs.
    pub fn from_expr(e: &BoolExpr, n: usize) -> Result<Self> {
        check_arity(n)?;
        if e.max_var() > n {
            return Err(Error::shape(format!(
                "expression uses X{} but arity is {n}",
                e.max_var()
            )));
        }
        TruthTable::from_fn(n, |bits| e.eval(bits))
    }

    /// Builds a table of arity `n` from the packed low `2^n` bits of `word`
    /// (bit `row` is the output of `row`).
    pub fn from_word(arity: usize, word: u64) -> Result<Self> {
        check_arity(arity)?;
        if arity > 6 {
            return Err(Error::shape("packed words hold at most 64 rows"));
        }
        let outputs = (0..1usize << arity).map(|r| word >> r & 1 == 1).collect();
        Ok(TruthTable { arity, outputs })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn outputs(&self) -> &[bool] {
        &self.outputs
    }

    pub fn rows(&self) -> usize {
        self.outputs.len()
    }

    pub fn get(&self, row: usize) -> bool {
        self.outputs[row]
    }

    pub fn popcount(&self) -> usize {
        self.outputs.iter().filter(|&&b| b).count()
    }

    pub fn true_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.outputs.iter().enumerate().filter(|(_, &b)| b).map(|(r, _)| r)
    }

    /// Input bits of `row`, `X1` first.
    pub fn row_bits(&self, row: usize) -> Vec<bool> {
        let mut bits = vec![false; self.arity];
        fill_row_bits(self.arity, row, &mut bits);
        bits
    }

    /// Parses the text format: a header `n=<arity>` followed either by
    /// `2^n` lines `<bits> <output>` or by one packed hex string. Blank lines
    /// and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::Format("empty truth-table file".into()))?;
        let arity: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Format(format!("line {hline}: expected header 'n=<arity>', got '{header}'")))?;
        check_arity(arity)?;
        let body: Vec<(usize, &str)> = lines.collect();
        let rows = 1usize << arity;

        let looks_hex = body.len() == 1 && !body[0].1.contains(char::is_whitespace);
        if looks_hex {
            return Self::parse_hex(arity, body[0].0, body[0].1);
        }
        if body.len() != rows {
            return Err(Error::Format(format!(
                "arity {arity} needs {rows} rows, found {}",
                body.len()
            )));
        }
        let mut outputs = vec![None; rows];
        for (lineno, line) in body {
            let mut parts = line.split_whitespace();
            let (bits, out) = match (parts.next(), parts.next(), parts.next()) {
                (Some(b), Some(o), None) => (b, o),
                _ => return Err(Error::Format(format!("line {lineno}: expected '<bits> <output>'"))),
            };
            if bits.len() != arity || !bits.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::Format(format!(
                    "line {lineno}: '{bits}' is not a {arity}-bit input"
                )));
            }
            let row = usize::from_str_radix(bits, 2).expect("validated binary");
            let value = match out {
                "0" => false,
                "1" => true,
                _ => {
                    return Err(Error::Format(format!(
                        "line {lineno}: output must be 0 or 1, got '{out}'"
                    )))
                }
            };
            if outputs[row].replace(value).is_some() {
                return Err(Error::Format(format!("line {lineno}: duplicate row {bits}")));
            }
        }
        let outputs = outputs.into_iter().map(|o| o.expect("all rows seen")).collect();
        TruthTable::new(arity, outputs)
    }

    fn parse_hex(arity: usize, lineno: usize, s: &str) -> Result<Self> {
        let s = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
        let rows = 1usize << arity;
        let digits = rows.div_ceil(4);
        if s.len() != digits {
            return Err(Error::Format(format!(
                "line {lineno}: arity {arity} needs {digits} hex digits, got {}",
                s.len()
            )));
        }
        let mut outputs = Vec::with_capacity(digits * 4);
        for c in s.chars() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::Format(format!("line {lineno}: bad hex digit '{c}'")))?;
            for shift in (0..4).rev() {
                outputs.push(v >> shift & 1 == 1);
            }
        }
        if outputs[rows..].iter().any(|&b| b) {
            return Err(Error::Format(format!(
                "line {lineno}: padding bits beyond row {rows} must be zero"
            )));
        }
        outputs.truncate(rows);
        TruthTable::new(arity, outputs)
    }

    /// Row-per-line text form.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.arity);
        for (row, &v) in self.outputs.iter().enumerate() {
            let _ = writeln!(out, "{:0width$b} {}", row, u8::from(v), width = self.arity);
        }
        out
    }

    /// Packed hex form: row 0 is the high bit of the first digit.
    pub fn to_hex(&self) -> String {
        self.outputs
            .chunks(4)
            .map(|chunk| {
                let v = chunk
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (i, &b)| acc | (u32::from(b) << (3 - i)));
                char::from_digit(v, 16).expect("nibble")
            })
            .collect()
    }
}

fn fill_row_bits(arity: usize, row: usize, bits: &mut [bool]) {
    for (i, b) in bits.iter_mut().enumerate() {
        *b = row >> (arity - 1 - i) & 1 == 1;
    }
}
