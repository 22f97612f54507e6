//! Block direct sums of two chains.
//!
//! Site `i` of the sum is block-diagonal: the first operand occupies the
//! leading bond (and, unless shared, physical and label) ranges and the
//! second operand the trailing ones; every mixed entry is zero. When both
//! chains are open the unit end bonds are shared rather than stacked, which
//! keeps the result open.

use crate::error::{Error, Result};
use crate::mps::{Boundary, FeatureMap, Mps, SiteTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Legs {
    /// Operands get disjoint index ranges.
    Stacked,
    /// Both operands use the same index range.
    Shared,
}

pub(crate) struct DirectSum {
    pub mps: Mps,
    pub feature_maps: Vec<FeatureMap>,
}

pub(crate) fn direct_sum(
    a: &Mps,
    fa: &[FeatureMap],
    b: &Mps,
    fb: &[FeatureMap],
    kernel: Legs,
    labels: Legs,
) -> Result<DirectSum> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::shape(format!("cannot sum chains of {n} and {} sites", b.len())));
    }
    if a.label_site() != b.label_site() {
        return Err(Error::shape(format!(
            "label legs sit on different sites ({:?} vs {:?})",
            a.label_site(),
            b.label_site()
        )));
    }
    if kernel == Legs::Shared && fa != fb {
        return Err(Error::Precondition("feature maps differ between the operands".into()));
    }
    let open = a.boundary() == Boundary::Open && b.boundary() == Boundary::Open;

    let mut sites = Vec::with_capacity(n);
    for i in 0..n {
        let (ta, tb) = (a.site(i), b.site(i));
        if kernel == Legs::Shared && ta.phys_dim() != tb.phys_dim() {
            return Err(Error::shape(format!("site {i}: phys dims differ")));
        }
        let share_left = open && i == 0;
        let share_right = open && i + 1 == n;
        let (left, b_left) = if share_left {
            (1, 0)
        } else {
            (ta.left_bond() + tb.left_bond(), ta.left_bond())
        };
        let (right, b_right) = if share_right {
            (1, 0)
        } else {
            (ta.right_bond() + tb.right_bond(), ta.right_bond())
        };
        let (phys, b_phys) = match kernel {
            Legs::Stacked => (ta.phys_dim() + tb.phys_dim(), ta.phys_dim()),
            Legs::Shared => (ta.phys_dim(), 0),
        };
        let (label, b_label) = match (ta.label_dim(), labels) {
            (0, _) => (0, 0),
            (_, Legs::Stacked) => (ta.label_dim() + tb.label_dim(), ta.label_dim()),
            (da, Legs::Shared) => {
                if tb.label_dim() != da {
                    return Err(Error::shape("shared label legs need equal dimensions"));
                }
                (da, 0)
            }
        };
        let mut t = SiteTensor::zeros(left, phys, right, label);
        for (src, offsets) in [(ta, (0, 0, 0, 0)), (tb, (b_label, b_phys, b_left, b_right))] {
            let (ol, os, oa, ob) = offsets;
            for l in 0..src.label_slices() {
                for s in 0..src.phys_dim() {
                    for x in 0..src.left_bond() {
                        for y in 0..src.right_bond() {
                            let v = src.get(l, s, x, y);
                            if v != 0.0 {
                                let (dl, ds, dx, dy) = (l + ol, s + os, x + oa, y + ob);
                                // Shared legs can place both operands on one entry.
                                let cur = t.get(dl, ds, dx, dy);
                                t.set(dl, ds, dx, dy, cur + v);
                            }
                        }
                    }
                }
            }
        }
        sites.push(t);
    }
    let boundary = if open { Boundary::Open } else { Boundary::Periodic };
    let feature_maps = match kernel {
        Legs::Stacked => fa.iter().zip(fb).map(|(x, y)| FeatureMap::concat(x, y)).collect(),
        Legs::Shared => fa.to_vec(),
    };
    Ok(DirectSum {
        mps: Mps::new(sites, boundary)?,
        feature_maps,
    })
}
