//! Helpers shared by the integration targets.

use extsym::exactlin::{dependencies, to_sparse, unit, Mat, Vector};
use extsym::quadext::{increasing_tuples, Form};
use num_traits::Zero;

pub fn flatten(w: &Form) -> Vector {
    let mut v = Vec::new();
    for idx in increasing_tuples(w.base_dim(), w.degree()) {
        v.extend_from_slice(w.at(&idx));
    }
    v
}

pub fn unit_form(n: usize, p: usize, dv: usize, k: usize) -> Form {
    let tuples = increasing_tuples(n, p);
    let mut w = Form::zero(n, p, dv);
    w.set(&tuples[k / dv], &unit(dv, k % dv));
    w
}

/// Basis of the `(D, theta)`-invariant forms of degree `p` with values in
/// `(values, D_v, theta_v)`, solved from the linear invariance conditions.
pub fn invariant_basis(n: usize, p: usize, dv: usize, dl: &Mat, thl: &Mat, vals: Option<(&Mat, &Mat)>) -> Vec<Form> {
    let count = increasing_tuples(n, p).len() * dv;
    let units: Vec<Form> = (0..count).map(|k| unit_form(n, p, dv, k)).collect();
    let images: Vec<Vector> = units
        .iter()
        .map(|w| {
            let mut v = flatten(&w.derivative_action(dl, vals.map(|x| x.0)));
            let pulled = w.pullback(thl);
            let target = match vals {
                Some((_, t)) => w.push(t),
                None => w.clone(),
            };
            v.extend(flatten(&pulled.sub(&target)));
            v
        })
        .collect();
    let len = images.first().map_or(0, Vec::len);
    let rows: Vec<_> = images.iter().map(|v| to_sparse(v)).collect();
    dependencies(&rows, len)
        .into_iter()
        .map(|c| {
            let mut w = Form::zero(n, p, dv);
            for (k, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    w = w.add(&units[k].scale(x));
                }
            }
            w
        })
        .collect()
}
