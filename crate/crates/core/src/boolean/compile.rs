//! Boolean functions as exactly-evaluating MPS.
//!
//! Each product term of a disjoint sum owns one bond index. Boundary sites
//! hold the literal indicators of every term as a row (site 1) or column
//! (site n); interior sites hold two diagonal matrices, one per physical
//! component. Along a fixed bond index the chain multiplies the literals of
//! one term, so the contraction sums the term values and equals the function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{minimize, to_dnf, Dnf, TruthTable};
use crate::error::{Error, Result};
use crate::mps::{contract_boolean, Boundary, FeatureMap, Mps, SiteTensor};

/// Feature maps used by every compiled circuit except the NOT gate.
pub fn boolean_feature_maps(n: usize) -> Vec<FeatureMap> {
    vec![FeatureMap::BinaryIndicator; n]
}

/// The constant-zero chain with unit bonds.
fn zero_mps(n: usize) -> Mps {
    Mps::new((0..n).map(|_| SiteTensor::zeros(1, 2, 1, 0)).collect(), Boundary::Open).expect("unit bonds")
}

/// Compiles a DNF over `n` inputs into an open-boundary MPS.
///
/// Overlapping terms (as produced by [`minimize`]) are first rewritten into a
/// disjoint cover, so the bond dimension is the number of disjoint terms. A
/// don't-care literal sets both physical components of its entry to 1.
pub fn compile(d: &Dnf, n: usize) -> Result<Mps> {
    if d.arity() != n {
        return Err(Error::shape(format!(
            "DNF has arity {} but {n} inputs were requested",
            d.arity()
        )));
    }
    if d.is_empty() {
        return Ok(zero_mps(n));
    }
    let d = d.disjoint();
    let m = d.len();
    let lit = |site: usize, term: usize, s: usize| d.terms()[term].literals()[site].indicator()[s];

    if n == 1 {
        // One site is both boundaries; disjoint terms simply add up.
        let site = SiteTensor::from_fn(1, 2, 1, 0, |_, s, _, _| (0..m).map(|j| lit(0, j, s)).sum())?;
        return Mps::new(vec![site], Boundary::Open);
    }

    let mut sites = Vec::with_capacity(n);
    sites.push(SiteTensor::from_fn(1, 2, m, 0, |_, s, _, b| lit(0, b, s))?);
    for i in 1..n - 1 {
        sites.push(SiteTensor::from_fn(m, 2, m, 0, |_, s, a, b| {
            if a == b {
                lit(i, a, s)
            } else {
                0.0
            }
        })?);
    }
    sites.push(SiteTensor::from_fn(m, 2, 1, 0, |_, s, a, _| lit(n - 1, a, s))?);
    Mps::new(sites, Boundary::Open)
}

/// Named gates with their dedicated constructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateKind {
    And2,
    Or2,
    Not1,
    /// Conjunction of literals; `true` marks a positive literal.
    UniversalAnd(Vec<bool>),
    /// Disjunction of literals; `true` marks a positive literal.
    UniversalOr(Vec<bool>),
    Parity(usize),
    /// `Threshold(n, k)` fires when at least `k` of `n` inputs are 1.
    Threshold(usize, usize),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::And2 | GateKind::Or2 => 2,
            GateKind::Not1 => 1,
            GateKind::UniversalAnd(mask) | GateKind::UniversalOr(mask) => mask.len(),
            GateKind::Parity(n) | GateKind::Threshold(n, _) => *n,
        }
    }

    pub fn truth_table(&self) -> Result<TruthTable> {
        let n = self.arity();
        match self {
            GateKind::And2 => TruthTable::from_fn(2, |b| b[0] && b[1]),
            GateKind::Or2 => TruthTable::from_fn(2, |b| b[0] || b[1]),
            GateKind::Not1 => TruthTable::from_fn(1, |b| !b[0]),
            GateKind::UniversalAnd(mask) => TruthTable::from_fn(n, |b| b.iter().zip(mask).all(|(&x, &pos)| x == pos)),
            GateKind::UniversalOr(mask) => TruthTable::from_fn(n, |b| b.iter().zip(mask).any(|(&x, &pos)| x == pos)),
            GateKind::Parity(_) => TruthTable::from_fn(n, |b| b.iter().filter(|&&x| x).count() % 2 == 1),
            GateKind::Threshold(_, k) => TruthTable::from_fn(n, |b| b.iter().filter(|&&x| x).count() >= *k),
        }
    }
}

/// A compiled circuit together with its kernel.
#[derive(Debug, Clone)]
pub struct CompiledGate {
    pub mps: Mps,
    pub feature_maps: Vec<FeatureMap>,
    pub warning: Option<String>,
}

fn literal_chain(mask: &[bool]) -> Result<Mps> {
    let sites = mask
        .iter()
        .map(|&pos| {
            let (x, not_x) = if pos { (1.0, 0.0) } else { (0.0, 1.0) };
            SiteTensor::from_slices(&[vec![vec![x]], vec![vec![not_x]]])
        })
        .collect::<Result<Vec<_>>>()?;
    Mps::new(sites, Boundary::Open)
}

pub fn compile_gate(kind: &GateKind) -> Result<CompiledGate> {
    let n = kind.arity();
    if n == 0 {
        return Err(Error::Precondition("gates need at least one input".into()));
    }
    let mut warning = None;
    let mps = match kind {
        GateKind::And2 => literal_chain(&[true, true])?,
        GateKind::UniversalAnd(mask) => literal_chain(mask)?,
        GateKind::Not1 => {
            let site = SiteTensor::new(1, 1, 1, 0, vec![1.0])?;
            return Ok(CompiledGate {
                mps: Mps::new(vec![site], Boundary::Open)?,
                feature_maps: vec![FeatureMap::complement()],
                warning: None,
            });
        }
        GateKind::Threshold(n, k) if k > n => {
            let msg = format!("threshold {k} exceeds arity {n}; the gate is constant 0");
            log::warn!("{msg}");
            warning = Some(msg);
            compile(&to_dnf(&kind.truth_table()?), *n)?
        }
        _ => compile(&to_dnf(&kind.truth_table()?), n)?,
    };
    Ok(CompiledGate {
        mps,
        feature_maps: boolean_feature_maps(n),
        warning,
    })
}

/// Outcome of checking a circuit against a truth table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub rows_checked: usize,
    pub rows_total: usize,
    pub exhaustive: bool,
    /// First mismatching row with the circuit's output there.
    pub first_mismatch: Option<(usize, i64)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Arity up to which verification enumerates every row.
pub const EXHAUSTIVE_VERIFY_MAX_ARITY: usize = 16;
const SAMPLED_ROWS: usize = 1 << 16;

/// Compares the exact boolean evaluation of `mps` with `table`.
///
/// Every row is checked for arity up to 16; larger tables are checked on
/// `2^16` rows drawn with a fixed seed.
pub fn verify(mps: &Mps, fms: &[FeatureMap], table: &TruthTable) -> Result<VerifyReport> {
    let n = table.arity();
    if mps.len() != n {
        return Err(Error::shape(format!(
            "MPS has {} sites, table has arity {n}",
            mps.len()
        )));
    }
    if mps.output_dim() != 1 {
        return Err(Error::shape("verification needs a single-output MPS"));
    }
    let rows: Vec<usize> = if n <= EXHAUSTIVE_VERIFY_MAX_ARITY {
        (0..table.rows()).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        (0..SAMPLED_ROWS).map(|_| rng.random_range(0..table.rows())).collect()
    };
    for (checked, &row) in rows.iter().enumerate() {
        let got = contract_boolean(mps, fms, &table.row_bits(row))?[0];
        if got != i64::from(table.get(row)) {
            return Ok(VerifyReport {
                rows_checked: checked + 1,
                rows_total: table.rows(),
                exhaustive: n <= EXHAUSTIVE_VERIFY_MAX_ARITY,
                first_mismatch: Some((row, got)),
            });
        }
    }
    Ok(VerifyReport {
        rows_checked: rows.len(),
        rows_total: table.rows(),
        exhaustive: n <= EXHAUSTIVE_VERIFY_MAX_ARITY,
        first_mismatch: None,
    })
}

/// Size of the compiled circuit before and after minimization.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ComplexityReport {
    pub arity: usize,
    /// Terms of the input cover.
    pub m: usize,
    /// Terms of the minimized (prime) cover.
    pub m_minimized: usize,
    /// Bond dimension of the compiled minimized cover after disjointing.
    pub bond_dim_minimized: usize,
    /// Stored entries of the compiled input cover.
    pub parameter_count: usize,
    /// Stored entries of the compiled minimized cover.
    pub parameter_count_minimized: usize,
}

/// Stored entries of a compiled disjoint cover with `m` terms over `n` inputs:
/// `2 m (2 + (n - 2) m)` for `n >= 2`.
pub fn compiled_parameter_count(n: usize, m: usize) -> usize {
    match (n, m) {
        (_, 0) => 2 * n,
        (1, _) => 2,
        _ => 2 * m * (2 + (n - 2) * m),
    }
}

pub fn complexity_report(d: &Dnf) -> ComplexityReport {
    let n = d.arity();
    let disjoint = d.disjoint();
    let minimized = minimize(d);
    let minimized_disjoint = minimized.disjoint();
    ComplexityReport {
        arity: n,
        m: d.len(),
        m_minimized: minimized.len(),
        bond_dim_minimized: minimized_disjoint.len(),
        parameter_count: compiled_parameter_count(n, disjoint.len()),
        parameter_count_minimized: compiled_parameter_count(n, minimized_disjoint.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::{parse_expr, Literal, Term};

    fn exact_outputs(g: &CompiledGate) -> Vec<i64> {
        let n = g.mps.len();
        (0..1usize << n)
            .map(|row| {
                let bits: Vec<bool> = (0..n).map(|i| row >> (n - 1 - i) & 1 == 1).collect();
                contract_boolean(&g.mps, &g.feature_maps, &bits).unwrap()[0]
            })
            .collect()
    }

    #[test]
    fn and_not_direct_constructions() {
        let and = compile_gate(&GateKind::And2).unwrap();
        assert_eq!(and.mps.bond_dims(), vec![1, 1, 1]);
        assert_eq!(exact_outputs(&and), vec![0, 0, 0, 1]);

        let not = compile_gate(&GateKind::Not1).unwrap();
        assert_eq!(not.mps.phys_dims(), vec![1]);
        assert_eq!(exact_outputs(&not), vec![1, 0]);

        let ua = compile_gate(&GateKind::UniversalAnd(vec![true, false, true])).unwrap();
        let mut expected = vec![0; 8];
        expected[0b101] = 1;
        assert_eq!(exact_outputs(&ua), expected);
    }

    #[test]
    fn or2_has_bond_three() {
        let g = compile_gate(&GateKind::Or2).unwrap();
        assert_eq!(g.mps.bond_dims(), vec![1, 3, 1]);
        assert_eq!(exact_outputs(&g), vec![0, 1, 1, 1]);
    }

    #[test]
    fn threshold_edge_cases() {
        let g = compile_gate(&GateKind::Threshold(3, 0)).unwrap();
        assert_eq!(exact_outputs(&g), vec![1; 8]);
        let g = compile_gate(&GateKind::Threshold(3, 4)).unwrap();
        assert!(g.warning.is_some());
        assert_eq!(exact_outputs(&g), vec![0; 8]);
    }

    #[test]
    fn universal_or() {
        let g = compile_gate(&GateKind::UniversalOr(vec![true, false])).unwrap();
        // X1 | !X2 is false only on row 01.
        assert_eq!(exact_outputs(&g), vec![1, 0, 1, 1]);
    }

    #[test]
    fn empty_dnf_is_constant_zero() {
        let d = Dnf::new(3, vec![]).unwrap();
        let mps = compile(&d, 3).unwrap();
        assert_eq!(mps.bond_dims(), vec![1, 1, 1, 1]);
        let t = d.to_table();
        assert!(verify(&mps, &boolean_feature_maps(3), &t).unwrap().passed());
    }

    #[test]
    fn arity_mismatch() {
        let d = to_dnf(&TruthTable::from_word(2, 0b1000).unwrap());
        assert!(matches!(compile(&d, 3), Err(Error::Shape(_))));
    }

    #[test]
    fn dont_care_sets_both_components() {
        use Literal::{DontCare as D, Pos as P};
        let d = Dnf::new(3, vec![Term(vec![P, D, D]), Term(vec![D, D, P])]).unwrap();
        let mps = compile(&d, 3).unwrap();
        let t = d.to_table();
        assert!(verify(&mps, &boolean_feature_maps(3), &t).unwrap().passed());
        // The middle site is don't-care in every disjoint term.
        let mid = mps.site(1);
        for a in 0..mid.left_bond() {
            assert_eq!((mid.get(0, 0, a, a), mid.get(0, 1, a, a)), (1.0, 1.0));
        }
    }

    #[test]
    fn single_input_functions() {
        for word in 0..4u64 {
            let t = TruthTable::from_word(1, word).unwrap();
            for d in [to_dnf(&t), minimize(&to_dnf(&t))] {
                let mps = compile(&d, 1).unwrap();
                assert!(verify(&mps, &boolean_feature_maps(1), &t).unwrap().passed());
            }
        }
    }

    #[test]
    fn verify_reports_first_mismatch() {
        let t = TruthTable::from_expr(&parse_expr("X1 | X2").unwrap(), 2).unwrap();
        let mut mps = compile(&to_dnf(&t), 2).unwrap();
        mps.sites_mut()[0].data_mut()[0] = 2.0;
        let report = verify(&mps, &boolean_feature_maps(2), &t).unwrap();
        assert!(!report.passed());
        let (row, got) = report.first_mismatch.unwrap();
        // Term 0 is !X1 & X2; the corrupted X1 entry only shows up on row 11.
        assert_eq!((row, got), (3, 3));
    }

    #[test]
    fn parameter_count_formula_matches_structure() {
        for n in 1..6 {
            for word in [1u64, 3, 0x17, 0x96, 0xff] {
                let t = TruthTable::from_word(n.min(6), word & ((1u64 << (1 << n)) - 1)).unwrap();
                let d = to_dnf(&t);
                let mps = compile(&d, n).unwrap();
                assert_eq!(
                    mps.parameter_count(),
                    compiled_parameter_count(n, d.len()),
                    "n={n} word={word:#x}"
                );
            }
        }
    }

    #[test]
    fn complexity_of_small_cases() {
        let parity = to_dnf(&GateKind::Parity(3).truth_table().unwrap());
        let r = complexity_report(&parity);
        assert_eq!((r.m, r.parameter_count), (4, 48));
        assert_eq!(r.m_minimized, 4);

        let single = to_dnf(&TruthTable::from_word(3, 1 << 5).unwrap());
        let r = complexity_report(&single);
        assert_eq!((r.m, r.parameter_count), (1, 6));
    }
}
