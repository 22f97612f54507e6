//! Reference three-input gates: truth tables and site tensors.

use mpskit::mps::{contract_boolean, FeatureMap, Mps};

pub const OR3_TABLE: [[u8; 4]; 8] = [
    [0, 0, 0, 0],
    [1, 0, 0, 1],
    [0, 1, 0, 1],
    [0, 0, 1, 1],
    [0, 1, 1, 1],
    [1, 0, 1, 1],
    [1, 1, 0, 1],
    [1, 1, 1, 1],
];
pub const PARITY3_TABLE: [[u8; 4]; 8] = [
    [0, 0, 0, 0],
    [1, 0, 0, 1],
    [0, 1, 0, 1],
    [0, 0, 1, 1],
    [0, 1, 1, 0],
    [1, 0, 1, 0],
    [1, 1, 0, 0],
    [1, 1, 1, 1],
];
pub const TH32_TABLE: [[u8; 4]; 8] = [
    [0, 0, 0, 0],
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 1, 0],
    [0, 1, 1, 1],
    [1, 0, 1, 1],
    [1, 1, 0, 1],
    [1, 1, 1, 1],
];

/// Reference three-site tensors: first-site rows, interior diagonals
/// (component x, component 1-x) and last-site rows.
pub struct Golden3 {
    pub first: [&'static [u8]; 2],
    pub diag: [&'static [u8]; 2],
    pub last: [&'static [u8]; 2],
}

pub const OR3: Golden3 = Golden3 {
    first: [&[1, 0, 0, 0, 1, 1, 1], &[0, 1, 1, 1, 0, 0, 0]],
    diag: [&[0, 1, 0, 1, 0, 1, 1], &[1, 0, 1, 0, 1, 0, 0]],
    last: [&[0, 0, 1, 1, 1, 0, 1], &[1, 1, 0, 0, 0, 1, 0]],
};
pub const PARITY3: Golden3 = Golden3 {
    first: [&[1, 0, 0, 1], &[0, 1, 1, 0]],
    diag: [&[0, 1, 0, 1], &[1, 0, 1, 0]],
    last: [&[0, 0, 1, 1], &[1, 1, 0, 0]],
};
pub const TH32: Golden3 = Golden3 {
    first: [&[1, 1, 0, 1], &[0, 0, 1, 0]],
    diag: [&[1, 0, 1, 1], &[0, 1, 0, 0]],
    last: [&[0, 1, 1, 1], &[1, 0, 0, 0]],
};

pub fn golden_columns(g: &Golden3) -> Vec<[u8; 6]> {
    let mut cols: Vec<[u8; 6]> = (0..g.first[0].len())
        .map(|j| {
            [
                g.first[0][j],
                g.first[1][j],
                g.diag[0][j],
                g.diag[1][j],
                g.last[0][j],
                g.last[1][j],
            ]
        })
        .collect();
    cols.sort();
    cols
}

/// Per-bond literal columns of a compiled three-site chain, or `None` when
/// the interior tensor has an off-diagonal entry.
pub fn compiled_columns(mps: &Mps) -> Option<Vec<[u8; 6]>> {
    let m = mps.site(0).right_bond();
    let (a, b, c) = (mps.site(0), mps.site(1), mps.site(2));
    for s in 0..2 {
        for x in 0..m {
            for y in 0..m {
                if x != y && b.get(0, s, x, y) != 0.0 {
                    return None;
                }
            }
        }
    }
    let u = |v: f64| v as u8;
    let mut cols: Vec<[u8; 6]> = (0..m)
        .map(|j| {
            [
                u(a.get(0, 0, 0, j)),
                u(a.get(0, 1, 0, j)),
                u(b.get(0, 0, j, j)),
                u(b.get(0, 1, j, j)),
                u(c.get(0, 0, j, 0)),
                u(c.get(0, 1, j, 0)),
            ]
        })
        .collect();
    cols.sort();
    Some(cols)
}

/// Whether the exact boolean evaluation reproduces every row.
pub fn matches_table(mps: &Mps, rows: &[[u8; 4]; 8]) -> bool {
    let fms = vec![FeatureMap::BinaryIndicator; 3];
    rows.iter().all(|r| {
        let bits = [r[0] == 1, r[1] == 1, r[2] == 1];
        contract_boolean(mps, &fms, &bits).unwrap() == vec![i64::from(r[3])]
    })
}
