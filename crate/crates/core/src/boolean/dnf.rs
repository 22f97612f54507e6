use std::collections::HashSet;
use std::fmt;

use super::TruthTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    /// `Xi`
    Pos,
    /// `!Xi`
    Neg,
    /// Variable absent from the term.
    DontCare,
}

impl Literal {
    pub fn accepts(self, bit: bool) -> bool {
        match self {
            Literal::Pos => bit,
            Literal::Neg => !bit,
            Literal::DontCare => true,
        }
    }

    /// Entries `[phi_0, phi_1]` this literal contributes to a compiled site
    /// (component 0 pairs with `x`, component 1 with `1 - x`).
    pub fn indicator(self) -> [f64; 2] {
        match self {
            Literal::Pos => [1.0, 0.0],
            Literal::Neg => [0.0, 1.0],
            Literal::DontCare => [1.0, 1.0],
        }
    }
}

/// A product term over all `n` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term(pub Vec<Literal>);

/// Bitmask view of a term: `care` marks constrained variables, `value` their
/// required bits, both laid out like truth-table rows (`X1` most significant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Cube {
    pub value: u32,
    pub care: u32,
}

impl Cube {
    pub fn contains(self, row: u32) -> bool {
        row & self.care == self.value
    }

    pub fn intersects(self, other: Cube) -> bool {
        let common = self.care & other.care;
        self.value & common == other.value & common
    }

    pub fn literal_count(self) -> u32 {
        self.care.count_ones()
    }
}

impl Term {
    pub fn minterm(arity: usize, row: usize) -> Self {
        Term(
            (0..arity)
                .map(|i| {
                    if row >> (arity - 1 - i) & 1 == 1 {
                        Literal::Pos
                    } else {
                        Literal::Neg
                    }
                })
                .collect(),
        )
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn accepts(&self, bits: &[bool]) -> bool {
        self.0.iter().zip(bits).all(|(l, &b)| l.accepts(b))
    }

    pub fn is_minterm(&self) -> bool {
        !self.0.contains(&Literal::DontCare)
    }

    pub(crate) fn to_cube(&self) -> Cube {
        let n = self.0.len();
        let mut cube = Cube { value: 0, care: 0 };
        for (i, l) in self.0.iter().enumerate() {
            let bit = 1u32 << (n - 1 - i);
            match l {
                Literal::Pos => {
                    cube.care |= bit;
                    cube.value |= bit;
                }
                Literal::Neg => cube.care |= bit,
                Literal::DontCare => {}
            }
        }
        cube
    }

    pub(crate) fn from_cube(arity: usize, cube: Cube) -> Self {
        Term(
            (0..arity)
                .map(|i| {
                    let bit = 1u32 << (arity - 1 - i);
                    match (cube.care & bit != 0, cube.value & bit != 0) {
                        (false, _) => Literal::DontCare,
                        (true, true) => Literal::Pos,
                        (true, false) => Literal::Neg,
                    }
                })
                .collect(),
        )
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, l) in self.0.iter().enumerate() {
            let s = match l {
                Literal::Pos => format!("X{}", i + 1),
                Literal::Neg => format!("!X{}", i + 1),
                Literal::DontCare => continue,
            };
            if !first {
                f.write_str(" & ")?;
            }
            f.write_str(&s)?;
            first = false;
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// A sum of product terms, `m = terms.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dnf {
    arity: usize,
    terms: Vec<Term>,
}

impl Dnf {
    pub fn new(arity: usize, terms: Vec<Term>) -> Result<Self> {
        if arity == 0 || arity > super::MAX_ARITY {
            return Err(Error::shape(format!("unsupported arity {arity}")));
        }
        let mut seen = HashSet::with_capacity(terms.len());
        for t in &terms {
            if t.0.len() != arity {
                return Err(Error::shape(format!(
                    "term of length {} in a DNF of arity {arity}",
                    t.0.len()
                )));
            }
            if !seen.insert(t) {
                return Err(Error::Precondition(format!("duplicate term {t}")));
            }
        }
        Ok(Dnf { arity, terms })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Number of terms, which becomes the bond dimension when compiled.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, bits: &[bool]) -> bool {
        self.terms.iter().any(|t| t.accepts(bits))
    }

    /// Expands the cover back into a truth table.
    pub fn to_table(&self) -> TruthTable {
        let cubes: Vec<Cube> = self.terms.iter().map(Term::to_cube).collect();
        let outputs = (0..1u32 << self.arity)
            .map(|row| cubes.iter().any(|c| c.contains(row)))
            .collect();
        TruthTable::new(self.arity, outputs).expect("arity validated")
    }

    /// True when no input satisfies two terms at once, so the arithmetic sum
    /// of the terms equals their disjunction.
    pub fn is_disjoint(&self) -> bool {
        let cubes: Vec<Cube> = self.terms.iter().map(Term::to_cube).collect();
        cubes
            .iter()
            .enumerate()
            .all(|(i, a)| cubes[i + 1..].iter().all(|b| !a.intersects(*b)))
    }

    /// An equivalent cover whose terms are pairwise disjoint.
    ///
    /// Each term in order is reduced by the cubes already emitted (cube
    /// sharp), so the result never has more terms than true rows.
    pub fn disjoint(&self) -> Dnf {
        if self.is_disjoint() {
            return self.clone();
        }
        let n = self.arity;
        let mut out: Vec<Cube> = Vec::new();
        for term in &self.terms {
            let mut pieces = vec![term.to_cube()];
            for &r in &out {
                pieces = pieces.into_iter().flat_map(|p| sharp(n, p, r)).collect();
            }
            out.extend(pieces);
        }
        Dnf {
            arity: n,
            terms: out.into_iter().map(|c| Term::from_cube(n, c)).collect(),
        }
    }
}

/// `p` minus `r` as disjoint cubes.
fn sharp(arity: usize, p: Cube, r: Cube) -> Vec<Cube> {
    if !p.intersects(r) {
        return vec![p];
    }
    let mut out = Vec::new();
    let mut cur = p;
    for i in 0..arity {
        let bit = 1u32 << (arity - 1 - i);
        if r.care & bit != 0 && cur.care & bit == 0 {
            out.push(Cube {
                value: cur.value | (!r.value & bit),
                care: cur.care | bit,
            });
            cur = Cube {
                value: cur.value | (r.value & bit),
                care: cur.care | bit,
            };
        }
    }
    out
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (j, t) in self.terms.iter().enumerate() {
            if j > 0 {
                f.write_str(" | ")?;
            }
            if self.terms.len() > 1 && t.0.iter().filter(|l| **l != Literal::DontCare).count() > 1 {
                write!(f, "({t})")?;
            } else {
                write!(f, "{t}")?;
            }
        }
        Ok(())
    }
}

/// One minterm per true row, in ascending row order.
pub fn to_dnf(t: &TruthTable) -> Dnf {
    Dnf {
        arity: t.arity(),
        terms: t.true_rows().map(|r| Term::minterm(t.arity(), r)).collect(),
    }
}
