#![allow(dead_code)]

pub mod golden;

use mpskit::mps::{Boundary, FeatureMap, Mps};

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Sum over every bond configuration of the product of per-site entries,
/// enumerated explicitly without matrix products.
pub fn brute_force(mps: &Mps, fms: &[FeatureMap], x: &[f64]) -> Vec<f64> {
    let n = mps.len();
    let phis: Vec<Vec<f64>> = fms.iter().zip(x).map(|(f, &v)| f.eval(v).unwrap()).collect();
    let bonds = mps.bond_dims();
    let labels = mps.output_dim();
    let label_site = mps.label_site();
    let mut out = vec![0.0; labels];
    for (l, o) in out.iter_mut().enumerate() {
        // Enumerate every bond configuration (a_0, ..., a_n) with a_n = a_0
        // for periodic chains.
        let free: Vec<usize> = bonds[..n].to_vec();
        let total: usize = free.iter().product();
        for cfg in 0..total {
            let mut a = vec![0usize; n + 1];
            let mut c = cfg;
            for i in (0..n).rev() {
                a[i] = c % free[i];
                c /= free[i];
            }
            a[n] = match mps.boundary() {
                Boundary::Open => 0,
                Boundary::Periodic => a[0],
            };
            let mut term = 1.0;
            for i in 0..n {
                let t = mps.site(i);
                let li = if Some(i) == label_site { l } else { 0 };
                let mut s_sum = 0.0;
                for (s, p) in phis[i].iter().enumerate() {
                    s_sum += p * t.get(li, s, a[i], a[i + 1]);
                }
                term *= s_sum;
            }
            *o += term;
        }
    }
    out
}
