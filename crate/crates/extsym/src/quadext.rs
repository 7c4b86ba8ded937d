//! Quadratic cochains and cocycles, the quadratic extension
//! `l* + a + l`, balanced-ness and fullness tests, and the catalog of full
//! Lorentzian triples.
//!
//! Forms on `l` are stored as full alternating tensors, which is cheap for the
//! small `l` that occur here (dim <= 3 in the catalog).

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{
    self, fmt_scalar, int, intersection, is_nondegenerate_on, nullspace, parse_scalar, span_basis,
    span_eq, unit, vec_is_zero, zeros, Mat, Scalar, Vector,
};
use crate::liecore::{
    self, grade_maps, radical_filtration, AlgebraClass, Bracket, EquivariantLie,
    MetricEquivariantAlgebra,
};
use crate::report::{Check, Report};

// ---- forms ------------------------------------------------------------------

/// All permutations of `0..p` with their signs.
fn signed_permutations(p: usize) -> Vec<(Vec<usize>, bool)> {
    if p == 0 {
        return vec![(vec![], true)];
    }
    let mut out = Vec::new();
    for (perm, even) in signed_permutations(p - 1) {
        // insert p-1 at every position; moving it left past k entries flips k times
        for pos in 0..=perm.len() {
            let mut q = perm.clone();
            q.insert(pos, p - 1);
            let flips = perm.len() - pos;
            out.push((q, even == (flips % 2 == 0)));
        }
    }
    out
}

/// Increasing tuples of length `p` from `0..n`.
pub fn increasing_tuples(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, p, &mut Vec::new(), &mut out);
    out
}

/// Alternating `p`-form on `Q^n` with values in `Q^dv`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    n: usize,
    p: usize,
    dv: usize,
    data: Vec<Scalar>,
}

impl Form {
    pub fn zero(n: usize, p: usize, dv: usize) -> Self {
        Form { n, p, dv, data: vec![Scalar::zero(); n.pow(p as u32) * dv] }
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn value_dim(&self) -> usize {
        self.dv
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i) * self.dv
    }

    /// Value on basis vectors `e_idx[0], ..., e_idx[p-1]` (any order, repeats allowed).
    pub fn at(&self, idx: &[usize]) -> &[Scalar] {
        let o = self.offset(idx);
        &self.data[o..o + self.dv]
    }

    /// Scalar-valued shortcut.
    pub fn at1(&self, idx: &[usize]) -> &Scalar {
        &self.at(idx)[0]
    }

    /// Set the value on `idx` and on every permutation of it with the matching sign.
    pub fn set(&mut self, idx: &[usize], v: &[Scalar]) {
        assert_eq!(idx.len(), self.p);
        assert_eq!(v.len(), self.dv);
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            assert!(vec_is_zero(v), "alternating form must vanish on repeated arguments");
            return;
        }
        for (perm, even) in signed_permutations(self.p) {
            let target: Vec<usize> = perm.iter().map(|&k| idx[k]).collect();
            let o = self.offset(&target);
            for (c, x) in v.iter().enumerate() {
                self.data[o + c] = if even { x.clone() } else { -x.clone() };
            }
        }
    }

    pub fn set1(&mut self, idx: &[usize], v: Scalar) {
        self.set(idx, &[v]);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn same_shape(&self, other: &Form) {
        assert!(
            self.n == other.n && self.p == other.p && self.dv == other.dv,
            "form shapes differ: ({},{},{}) vs ({},{},{})",
            self.n,
            self.p,
            self.dv,
            other.n,
            other.p,
            other.dv
        );
    }

    pub fn add(&self, other: &Form) -> Form {
        self.same_shape(other);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Form { data, ..*self }
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        Form { data: self.data.iter().map(|a| a * c).collect(), ..*self }
    }

    /// Build from values on increasing tuples.
    pub fn from_fn(n: usize, p: usize, dv: usize, mut f: impl FnMut(&[usize]) -> Vector) -> Form {
        let mut w = Form::zero(n, p, dv);
        for idx in increasing_tuples(n, p) {
            let v = f(&idx);
            if !vec_is_zero(&v) {
                w.set(&idx, &v);
            }
        }
        w
    }

    /// Nonzero values on increasing tuples.
    pub fn entries(&self) -> Vec<(Vec<usize>, Vector)> {
        increasing_tuples(self.n, self.p)
            .into_iter()
            .filter_map(|idx| {
                let v = self.at(&idx).to_vec();
                (!vec_is_zero(&v)).then_some((idx, v))
            })
            .collect()
    }

    /// `w(S x_1, ..., S x_p)`.
    pub fn pullback(&self, s: &Mat) -> Form {
        let n = self.n;
        let cols = liecore::sparse_cols(s);
        Form::from_fn(n, self.p, self.dv, |idx| {
            let mut out = zeros(self.dv);
            expand(&cols, idx, 0, &mut Vec::new(), &Scalar::one(), &mut |jdx, c| {
                for (o, x) in out.iter_mut().zip(self.at(jdx)) {
                    *o += c * x;
                }
            });
            out
        })
    }

    /// `U o w` on the value space.
    pub fn push(&self, u: &Mat) -> Form {
        Form::from_fn(self.n, self.p, u.rows(), |idx| u.mul_vec(self.at(idx)))
    }

    /// `D_v o w - sum_i w(.., D x_i, ..)`; `dv_map = None` means the zero map on values.
    pub fn derivative_action(&self, dl: &Mat, dv_map: Option<&Mat>) -> Form {
        let cols = liecore::sparse_cols(dl);
        Form::from_fn(self.n, self.p, self.dv, |idx| {
            let mut out = match dv_map {
                Some(m) => m.mul_vec(self.at(idx)),
                None => zeros(self.dv),
            };
            let mut jdx = idx.to_vec();
            for slot in 0..idx.len() {
                for (k, c) in &cols[idx[slot]] {
                    jdx[slot] = *k;
                    for (o, x) in out.iter_mut().zip(self.at(&jdx)) {
                        *o -= c * x;
                    }
                }
                jdx[slot] = idx[slot];
            }
            out
        })
    }
}

fn expand(
    cols: &[crate::exactlin::SparseRow],
    idx: &[usize],
    slot: usize,
    cur: &mut Vec<usize>,
    coeff: &Scalar,
    f: &mut dyn FnMut(&[usize], &Scalar),
) {
    if slot == idx.len() {
        f(cur, coeff);
        return;
    }
    for (k, v) in &cols[idx[slot]] {
        cur.push(*k);
        expand(cols, idx, slot + 1, cur, &(coeff * v), f);
        cur.pop();
    }
}

/// Chevalley-Eilenberg differential on `l` with coefficients in the module given
/// by `rho` (`None` for the trivial module).
pub fn ce_differential(l: &Bracket, rho: Option<&[Mat]>, w: &Form) -> Form {
    let n = l.dim();
    assert_eq!(w.n, n, "form lives on a space of the wrong dimension");
    let p = w.p;
    Form::from_fn(n, p + 1, w.dv, |x| {
        let mut out = zeros(w.dv);
        for i in 0..=p {
            let rest: Vec<usize> = x.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, &v)| v).collect();
            if let Some(r) = rho {
                let term = r[x[i]].mul_vec(w.at(&rest));
                let sign = if i % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                exactlin::axpy(&mut out, &sign, &term);
            }
        }
        for i in 0..=p {
            for j in i + 1..=p {
                let rest: Vec<usize> =
                    x.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, &v)| v).collect();
                let sign = if (i + j) % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                for (k, c) in l.get(x[i], x[j]) {
                    let mut args = vec![*k];
                    args.extend_from_slice(&rest);
                    exactlin::axpy(&mut out, &(&sign * c), w.at(&args));
                }
            }
        }
        out
    })
}

/// Wedge product followed by the inner product on the value space:
/// `<a ^ b>(x_1..x_{p+q}) = sum over (p,q)-shuffles of sign * <a(..), b(..)>`.
/// For a 2-form and a 1-form this is the cyclic sum
/// `<a(x,y),b(z)> + <a(y,z),b(x)> + <a(z,x),b(y)>`.
pub fn wedge_inner(a: &Form, b: &Form, gram: &Mat) -> Form {
    assert_eq!(a.n, b.n);
    assert_eq!(a.dv, b.dv);
    assert_eq!(gram.rows(), a.dv);
    let (p, q) = (a.p, b.p);
    let shuffles: Vec<(Vec<usize>, Vec<usize>, bool)> = increasing_tuples(p + q, p)
        .into_iter()
        .map(|left| {
            let right: Vec<usize> = (0..p + q).filter(|k| !left.contains(k)).collect();
            // inversions between left and right blocks
            let inv: usize = left.iter().map(|&l| right.iter().filter(|&&r| r < l).count()).sum();
            (left, right, inv % 2 == 0)
        })
        .collect();
    Form::from_fn(a.n, p + q, 1, |x| {
        let mut acc = Scalar::zero();
        for (left, right, even) in &shuffles {
            let li: Vec<usize> = left.iter().map(|&k| x[k]).collect();
            let ri: Vec<usize> = right.iter().map(|&k| x[k]).collect();
            let va = a.at(&li);
            let vb = b.at(&ri);
            if vec_is_zero(va) || vec_is_zero(vb) {
                continue;
            }
            let v = gram.bilinear(va, vb);
            if *even {
                acc += v;
            } else {
                acc -= v;
            }
        }
        vec![acc]
    })
}

// ---- modules, cochains, cocycles --------------------------------------------

/// Orthogonal `(l, Phi_l)`-module.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalModule {
    pub labels: Vec<String>,
    pub rho: Vec<Mat>,
    pub gram: Mat,
    pub d: Mat,
    pub theta: Mat,
}

impl OrthogonalModule {
    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// Zero-dimensional module over an `nl`-dimensional algebra.
    pub fn zero(nl: usize) -> Self {
        OrthogonalModule {
            labels: vec![],
            rho: vec![Mat::zeros(0, 0); nl],
            gram: Mat::zeros(0, 0),
            d: Mat::zeros(0, 0),
            theta: Mat::zeros(0, 0),
        }
    }

    /// Trivial module (`rho = 0`).
    pub fn trivial(nl: usize, labels: Vec<String>, gram: Mat, d: Mat, theta: Mat) -> Self {
        let na = gram.rows();
        OrthogonalModule { labels, rho: vec![Mat::zeros(na, na); nl], gram, d, theta }
    }

    pub fn is_trivial(&self) -> bool {
        self.rho.iter().all(Mat::is_zero)
    }

    pub fn direct_sum(parts: &[&OrthogonalModule]) -> OrthogonalModule {
        let nl = parts.first().map_or(0, |p| p.rho.len());
        assert!(parts.iter().all(|p| p.rho.len() == nl), "summands over different algebras");
        let cat = |f: &dyn Fn(&OrthogonalModule) -> &Mat| {
            let ms: Vec<&Mat> = parts.iter().map(|p| f(p)).collect();
            Mat::block_diag(&ms)
        };
        OrthogonalModule {
            labels: parts.iter().flat_map(|p| p.labels.clone()).collect(),
            rho: (0..nl)
                .map(|i| {
                    let ms: Vec<&Mat> = parts.iter().map(|p| &p.rho[i]).collect();
                    Mat::block_diag(&ms)
                })
                .collect(),
            gram: cat(&|p| &p.gram),
            d: cat(&|p| &p.d),
            theta: cat(&|p| &p.theta),
        }
    }

    /// Joint kernel `a^l` of all `rho(e_i)`.
    pub fn invariants(&self) -> Vec<Vector> {
        let na = self.dim();
        let rows: Vec<Vector> = self.rho.iter().flat_map(|r| r.row_vecs()).collect();
        if rows.is_empty() {
            return (0..na).map(|i| unit(na, i)).collect();
        }
        nullspace(&Mat::from_rows(rows).expect("uniform"))
    }

    /// `rho(l) a`.
    pub fn image(&self) -> Vec<Vector> {
        let na = self.dim();
        let cols: Vec<Vector> = self.rho.iter().flat_map(|r| r.col_vecs()).collect();
        span_basis(&cols, na)
    }

    /// Module axioms relative to `l`.
    pub fn verify(&self, l: &EquivariantLie) -> Report {
        let mut r = Report::default();
        let na = self.dim();
        let nl = l.dim();
        let shapes = self.rho.len() == nl
            && self.rho.iter().all(|m| m.rows() == na && m.cols() == na)
            && [&self.d, &self.theta].iter().all(|m| m.rows() == na && m.cols() == na)
            && self.labels.len() == na;
        if !shapes {
            r.push(Check::new("module-shapes", false, "rho/gram/D/theta sizes disagree"));
            return r;
        }
        let g = &self.gram;
        let id = Mat::identity(na);
        r.push(Check::new("module-gram-symmetric", g.is_symmetric(), ""));
        r.push(Check::new("module-gram-nondegenerate", exactlin::rank(g) == na, ""));
        let anti = |m: &Mat| m.transpose().mul(g).add(&g.mul(m)).is_zero();
        r.push(Check::new("rho-antisymmetric", self.rho.iter().all(anti), ""));
        let comb = |v: &[Scalar]| {
            let mut m = Mat::zeros(na, na);
            for (k, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    m = m.add(&self.rho[k].scale(c));
                }
            }
            m
        };
        let hom = (0..nl).all(|i| {
            (i + 1..nl).all(|j| self.rho[i].commutator(&self.rho[j]) == comb(&l.bracket.get_dense(i, j)))
        });
        r.push(Check::new("rho-homomorphism", hom, ""));
        r.push(Check::new("module-theta-involution", self.theta.mul(&self.theta) == id, ""));
        r.push(Check::new("module-theta-isometry", self.theta.transpose().mul(g).mul(&self.theta) == *g, ""));
        r.push(Check::new("module-D-antisymmetric", anti(&self.d), ""));
        r.push(Check::new("module-D-theta-anticommute", self.d.anticommutator(&self.theta).is_zero(), ""));
        let d3 = self.d.mul(&self.d).mul(&self.d);
        r.push(Check::new("module-h-graded", d3.add(&self.d).is_zero(), ""));
        let theta_ok = (0..nl).all(|i| comb(&l.theta.col(i)) == self.theta.mul(&self.rho[i]).mul(&self.theta));
        r.push(Check::new("rho-theta-compatible", theta_ok, "rho(theta L) = theta_a rho(L) theta_a"));
        let d_ok = (0..nl).all(|i| comb(&l.d.col(i)) == self.d.commutator(&self.rho[i]));
        r.push(Check::new("rho-D-compatible", d_ok, "rho(D L) = [D_a, rho(L)]"));
        r
    }
}

/// `(alpha, gamma)` with `alpha: l ^ l -> a` and `gamma` a scalar 3-form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticCocycle {
    pub alpha: Form,
    pub gamma: Form,
}

/// `(tau, sigma)` with `tau: l -> a` and `sigma` a scalar 2-form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticCochain {
    pub tau: Form,
    pub sigma: Form,
}

impl QuadraticCocycle {
    pub fn zero(nl: usize, na: usize) -> Self {
        QuadraticCocycle { alpha: Form::zero(nl, 2, na), gamma: Form::zero(nl, 3, 1) }
    }
}

impl QuadraticCochain {
    pub fn identity(nl: usize, na: usize) -> Self {
        QuadraticCochain { tau: Form::zero(nl, 1, na), sigma: Form::zero(nl, 2, 1) }
    }

    pub fn is_identity(&self) -> bool {
        self.tau.is_zero() && self.sigma.is_zero()
    }
}

/// Is `w` invariant under `(D, theta)`: `D_v w - sum w(..D x..) = 0` and
/// `w(theta x, ..) = theta_v w(x, ..)`? Value maps `None` mean the trivial module.
pub fn is_invariant(w: &Form, l: &EquivariantLie, values: Option<(&Mat, &Mat)>) -> bool {
    let d_ok = w.derivative_action(&l.d, values.map(|v| v.0)).is_zero();
    let pulled = w.pullback(&l.theta);
    let t_ok = match values {
        Some((_, t)) => pulled == w.push(t),
        None => pulled == *w,
    };
    d_ok && t_ok
}

/// Named checks of the cocycle conditions.
pub fn is_cocycle(l: &EquivariantLie, a: &OrthogonalModule, z: &QuadraticCocycle) -> Report {
    let mut r = Report::default();
    let vals = Some((&a.d, &a.theta));
    r.push(Check::new("alpha-invariant", is_invariant(&z.alpha, l, vals), ""));
    r.push(Check::new("gamma-invariant", is_invariant(&z.gamma, l, None), ""));
    let da = ce_differential(&l.bracket, Some(&a.rho), &z.alpha);
    r.push(Check::new("d-alpha", da.is_zero(), defect_detail(&da)));
    let dg = ce_differential(&l.bracket, None, &z.gamma);
    let half = wedge_inner(&z.alpha, &z.alpha, &a.gram).scale(&exactlin::frac(1, 2));
    let defect = dg.sub(&half);
    r.push(Check::new("d-gamma", defect.is_zero(), defect_detail(&defect)));
    r
}

fn defect_detail(w: &Form) -> String {
    match w.entries().first() {
        None => String::new(),
        Some((idx, v)) => {
            let vs: Vec<String> = v.iter().map(fmt_scalar).collect();
            format!("first defect on {:?}: [{}]", idx, vs.join(", "))
        }
    }
}

/// Both components invariant.
pub fn is_cochain(l: &EquivariantLie, a: &OrthogonalModule, c: &QuadraticCochain) -> bool {
    is_invariant(&c.tau, l, Some((&a.d, &a.theta))) && is_invariant(&c.sigma, l, None)
}

/// `<tau1 ^ tau2>(x, y) = <tau1 x, tau2 y> - <tau1 y, tau2 x>`.
pub fn wedge_tau(t1: &Form, t2: &Form, gram: &Mat) -> Form {
    wedge_inner(t1, t2, gram)
}

pub fn cochain_mul(a: &OrthogonalModule, c1: &QuadraticCochain, c2: &QuadraticCochain) -> QuadraticCochain {
    let half = exactlin::frac(1, 2);
    QuadraticCochain {
        tau: c1.tau.add(&c2.tau),
        sigma: c1.sigma.add(&c2.sigma).add(&wedge_tau(&c1.tau, &c2.tau, &a.gram).scale(&half)),
    }
}

pub fn cochain_inv(c: &QuadraticCochain) -> QuadraticCochain {
    let m = -Scalar::one();
    QuadraticCochain { tau: c.tau.scale(&m), sigma: c.sigma.scale(&m) }
}

/// Right action `(alpha, gamma)(tau, sigma)`.
pub fn cocycle_act(
    l: &EquivariantLie,
    a: &OrthogonalModule,
    z: &QuadraticCocycle,
    c: &QuadraticCochain,
) -> QuadraticCocycle {
    let dtau = ce_differential(&l.bracket, Some(&a.rho), &c.tau);
    let dsigma = ce_differential(&l.bracket, None, &c.sigma);
    let mixed = z.alpha.add(&dtau.scale(&exactlin::frac(1, 2)));
    QuadraticCocycle {
        alpha: z.alpha.add(&dtau),
        gamma: z.gamma.add(&dsigma).add(&wedge_inner(&mixed, &c.tau, &a.gram)),
    }
}

/// `(S, U)^*(alpha, gamma) = (U o S^* alpha, S^* gamma)`.
pub fn pullback_cocycle(z: &QuadraticCocycle, s: &Mat, u: &Mat) -> QuadraticCocycle {
    QuadraticCocycle { alpha: z.alpha.pullback(s).push(u), gamma: z.gamma.pullback(s) }
}

/// Checks that `(S, U)` is a morphism of pairs from `(l, a)` to itself:
/// `S` an equivariant automorphism, `U` an equivariant isometry with
/// `U rho(S L) = rho(L) U`.
pub fn is_pair_morphism(l: &EquivariantLie, a: &OrthogonalModule, s: &Mat, u: &Mat) -> bool {
    let nl = l.dim();
    let na = a.dim();
    if s.rows() != nl || s.cols() != nl || u.rows() != na || u.cols() != na {
        return false;
    }
    let s_ok = l.bracket.is_automorphism(s) && s.mul(&l.d) == l.d.mul(s) && s.mul(&l.theta) == l.theta.mul(s);
    let u_ok = u.transpose().mul(&a.gram).mul(u) == a.gram
        && u.mul(&a.d) == a.d.mul(u)
        && u.mul(&a.theta) == a.theta.mul(u);
    let intertwine = (0..nl).all(|i| {
        let sl = s.col(i);
        let mut rs = Mat::zeros(na, na);
        for (k, c) in sl.iter().enumerate() {
            if !c.is_zero() {
                rs = rs.add(&a.rho[k].scale(c));
            }
        }
        u.mul(&rs) == a.rho[i].mul(u)
    });
    s_ok && u_ok && intertwine
}

/// Does `z2 = (S, U)^* z1 * c` hold (or `z2 = z1 * c` without a morphism)?
pub fn class_witness_check(
    l: &EquivariantLie,
    a: &OrthogonalModule,
    z1: &QuadraticCocycle,
    z2: &QuadraticCocycle,
    c: &QuadraticCochain,
    morphism: Option<(&Mat, &Mat)>,
) -> bool {
    let base = match morphism {
        Some((s, u)) => {
            if !is_pair_morphism(l, a, s, u) {
                return false;
            }
            pullback_cocycle(z1, s, u)
        }
        None => z1.clone(),
    };
    is_cochain(l, a, c) && cocycle_act(l, a, &base, c) == *z2
}

// ---- the extension ----------------------------------------------------------

/// Labels `s<L>` for the dual basis of `l*`.
pub fn dual_label(l: &str) -> String {
    format!("s{l}")
}

/// Quadratic extension on `l* + a + l`, without checking the inputs.
pub fn build_extension_unchecked(
    l: &EquivariantLie,
    a: &OrthogonalModule,
    z: &QuadraticCocycle,
) -> MetricEquivariantAlgebra {
    let nl = l.dim();
    let na = a.dim();
    let n = 2 * nl + na;
    let sig = |k: usize| k;
    let av = |p: usize| nl + p;
    let lv = |i: usize| nl + na + i;
    let mut br = Bracket::zero(n);
    let ga_alpha: Vec<Vec<Vector>> =
        (0..nl).map(|i| (0..nl).map(|k| a.gram.mul_vec(z.alpha.at(&[i, k]))).collect()).collect();
    for i in 0..nl {
        for j in i + 1..nl {
            let mut v = zeros(n);
            for k in 0..nl {
                v[sig(k)] = z.gamma.at1(&[i, j, k]).clone();
            }
            for (p, x) in z.alpha.at(&[i, j]).iter().enumerate() {
                v[av(p)] = x.clone();
            }
            for (k, x) in l.bracket.get(i, j) {
                v[lv(*k)] = x.clone();
            }
            br.set(lv(i), lv(j), &v);
        }
        for p in 0..na {
            let mut v = zeros(n);
            for k in 0..nl {
                v[sig(k)] = -ga_alpha[i][k][p].clone();
            }
            for q in 0..na {
                v[av(q)] = a.rho[i][(q, p)].clone();
            }
            br.set(lv(i), av(p), &v);
        }
        for j in 0..nl {
            // ad^*(L_i) sigma_j = -sigma_j o ad(L_i)
            let mut v = zeros(n);
            for k in 0..nl {
                let c = l.bracket.get_dense(i, k)[j].clone();
                v[sig(k)] = -c;
            }
            br.set(lv(i), sig(j), &v);
        }
    }
    let g_rho: Vec<Mat> = a.rho.iter().map(|r| a.gram.mul(r)).collect();
    for p in 0..na {
        for q in p + 1..na {
            let mut v = zeros(n);
            for k in 0..nl {
                v[sig(k)] = g_rho[k][(q, p)].clone();
            }
            br.set(av(p), av(q), &v);
        }
    }
    let mut gram = Mat::zeros(n, n);
    for i in 0..nl {
        gram[(sig(i), lv(i))] = Scalar::one();
        gram[(lv(i), sig(i))] = Scalar::one();
    }
    gram.set_block(nl, nl, &a.gram);
    let d = Mat::block_diag(&[&l.d.transpose().neg(), &a.d, &l.d]);
    let theta = Mat::block_diag(&[&l.theta.transpose(), &a.theta, &l.theta]);
    let mut labels: Vec<String> = l.labels.iter().map(|s| dual_label(s)).collect();
    labels.extend(a.labels.iter().cloned());
    labels.extend(l.labels.iter().cloned());
    MetricEquivariantAlgebra { labels, bracket: br, gram, d, theta, weak: false }
}

/// Quadratic extension; the module and cocycle conditions are checked first.
pub fn build_extension(
    l: &EquivariantLie,
    a: &OrthogonalModule,
    z: &QuadraticCocycle,
) -> Result<MetricEquivariantAlgebra> {
    let lr = l.verify();
    let mr = a.verify(l);
    let cr = is_cocycle(l, a, z);
    let failed: Vec<String> =
        lr.failures().into_iter().chain(mr.failures()).chain(cr.failures()).map(|c| c.name.clone()).collect();
    if !failed.is_empty() {
        return Err(Error::Precondition(format!("cannot build extension: {}", failed.join(", "))));
    }
    Ok(build_extension_unchecked(l, a, z))
}

// ---- balanced and fullness conditions ---------------------------------------

/// Certificate of `balanced_check`: one named check per condition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BalancedReport {
    pub report: Report,
    /// Notes on conditions that rely on the socle convention for `S(l)`.
    pub notes: Vec<String>,
}

impl BalancedReport {
    pub fn balanced(&self) -> bool {
        self.report.all_pass()
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.report.failures().first().map(|c| c.name.as_str())
    }
}

/// Split `a = a^l + rho(l) a`; errors if the module is not certified semisimple.
fn invariant_split(l: &EquivariantLie, a: &OrthogonalModule) -> Result<(Vec<Vector>, Vec<Vector>)> {
    let na = a.dim();
    let semisimple_l = l.dim() > 0 && exactlin::rank(&l.bracket.killing()) == l.dim();
    if !(a.is_trivial() || semisimple_l) {
        return Err(Error::Unsupported("semisimplicity of the module is only certified for rho = 0 or semisimple l".into()));
    }
    let inv = a.invariants();
    let img = a.image();
    if inv.len() + img.len() != na || !intersection(&inv, &img, na).is_empty() {
        return Err(Error::Precondition("module is not semisimple: a^l + rho(l)a is not direct".into()));
    }
    Ok((inv, img))
}

/// Orthogonal projection onto `a^l` (along `rho(l) a`).
fn project_invariant(v: &[Scalar], inv: &[Vector], img: &[Vector]) -> Vector {
    if inv.is_empty() {
        return zeros(v.len());
    }
    let mut basis = inv.to_vec();
    basis.extend(img.iter().cloned());
    let c = exactlin::coordinates(&basis, v).expect("a = a^l + rho(l)a");
    let mut out = zeros(v.len());
    for (k, b) in inv.iter().enumerate() {
        exactlin::axpy(&mut out, &c[k], b);
    }
    out
}

/// `alpha_0` applied to the kernel of the bracket restricted to `span(vs) ^ span(vs)`.
fn alpha0_on_kernel(l: &EquivariantLie, z: &QuadraticCocycle, vs: &[Vector], inv: &[Vector], img: &[Vector]) -> Vec<Vector> {
    let nl = l.dim();
    let na = z.alpha.value_dim();
    let k = vs.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
    let kernel = l.bracket.wedge_kernel(vs);
    let alpha_on = |x: &[Scalar], y: &[Scalar]| {
        let mut out = zeros(na);
        for i in 0..nl {
            for j in 0..nl {
                let c = &x[i] * &y[j];
                if !c.is_zero() {
                    exactlin::axpy(&mut out, &c, z.alpha.at(&[i, j]));
                }
            }
        }
        out
    };
    let images: Vec<Vector> = kernel
        .iter()
        .map(|coeffs| {
            let mut out = zeros(na);
            for (t, &(p, q)) in pairs.iter().enumerate() {
                if !coeffs[t].is_zero() {
                    exactlin::axpy(&mut out, &coeffs[t], &alpha_on(&vs[p], &vs[q]));
                }
            }
            project_invariant(&out, inv, img)
        })
        .collect();
    span_basis(&images, na)
}

/// Condition (A) for a central candidate space `cand` (basis in `l`): returns
/// the dimension of the space of `K` admitting a solution, evaluating the
/// 3-form identity on `test` (a basis of `R_k`, or all of `l` for k = 0).
fn condition_a(
    l: &EquivariantLie,
    a: &OrthogonalModule,
    z: &QuadraticCocycle,
    cand: &[Vector],
    test: &[Vector],
) -> usize {
    let nl = l.dim();
    let na = a.dim();
    let r = cand.len();
    let t = test.len();
    if r == 0 {
        return 0;
    }
    // unknowns: c (r), A0 (na), Z0 as a functional on R_k given by values on `test` (t)
    let nv = r + na + t;
    let mut rows: Vec<Vector> = Vec::new();
    let alpha_lin = |x: &[Scalar], y: &[Scalar]| {
        let mut out = zeros(na);
        for i in 0..nl {
            for j in 0..nl {
                let c = &x[i] * &y[j];
                if !c.is_zero() {
                    exactlin::axpy(&mut out, &c, z.alpha.at(&[i, j]));
                }
            }
        }
        out
    };
    let gamma_lin = |x: &[Scalar], y: &[Scalar], w: &[Scalar]| {
        let mut acc = Scalar::zero();
        for i in 0..nl {
            for j in 0..nl {
                for k in 0..nl {
                    let c = &x[i] * &y[j] * &w[k];
                    if !c.is_zero() {
                        acc += c * z.gamma.at1(&[i, j, k]);
                    }
                }
            }
        }
        acc
    };
    let test_coords = |v: &[Scalar]| exactlin::coordinates(test, v).expect("bracket stays in the ideal");
    for i in 0..nl {
        let li = unit(nl, i);
        // (i) alpha(L, K) - rho(L) A0 = 0
        for p in 0..na {
            let mut row = zeros(nv);
            for (s, k) in cand.iter().enumerate() {
                row[s] = alpha_lin(&li, k)[p].clone();
            }
            for q in 0..na {
                row[r + q] = -a.rho[i][(p, q)].clone();
            }
            rows.push(row);
        }
        // (ii) gamma(L, K, w) + <A0, alpha(L, w)> - Z0([L, w]) = 0 for w in test
        for w in test {
            let mut row = zeros(nv);
            for (s, k) in cand.iter().enumerate() {
                row[s] = gamma_lin(&li, k, w);
            }
            let gaw = a.gram.mul_vec(&alpha_lin(&li, w));
            for q in 0..na {
                row[r + q] = gaw[q].clone();
            }
            let lw = l.bracket.apply(&li, w);
            let coords = test_coords(&lw);
            for u in 0..t {
                row[r + na + u] = -coords[u].clone();
            }
            rows.push(row);
        }
    }
    let sol = nullspace(&Mat::from_rows(rows).expect("uniform"));
    let proj: Vec<Vector> = sol.iter().map(|v| v[..r].to_vec()).collect();
    exactlin::span_rank(&proj)
}

/// Conditions (A_k) and (B_k).
pub fn balanced_check(l: &EquivariantLie, a: &OrthogonalModule, z: &QuadraticCocycle) -> Result<BalancedReport> {
    let nl = l.dim();
    let na = a.dim();
    let (inv, img) = invariant_split(l, a)?;
    let filt = if nl == 0 { None } else { Some(radical_filtration(&l.bracket)?) };
    let mut report = Report::default();
    let mut notes = Vec::new();
    let all: Vec<Vector> = (0..nl).map(|i| unit(nl, i)).collect();

    // (A_0): L0 in z(l) cap ker rho
    let center = l.bracket.center();
    let ker_rho: Vec<Vector> = {
        let rows: Vec<Vector> = (0..nl)
            .map(|i| a.rho[i].flatten())
            .collect::<Vec<_>>();
        // L = sum x_i e_i with sum x_i rho_i = 0
        if na == 0 || nl == 0 {
            all.clone()
        } else {
            let m = Mat::from_cols(&rows, na * na);
            nullspace(&m)
        }
    };
    let cand0 = intersection(&center, &ker_rho, nl);
    let bad0 = condition_a(l, a, z, &cand0, &all);
    report.push(Check::new(
        "A0",
        bad0 == 0,
        if bad0 == 0 { String::new() } else { format!("{bad0}-dimensional space of central L0 admits (A0, Z0)") },
    ));

    // (B_0): alpha_0(ker [,]) nondegenerate
    let b0 = alpha0_on_kernel(l, z, &all, &inv, &img);
    let nondeg = is_nondegenerate_on(&b0, &a.gram);
    report.push(Check::new(
        "B0",
        nondeg,
        if nondeg { String::new() } else { format!("alpha_0(ker [,]) of dim {} is degenerate", b0.len()) },
    ));

    if let Some(f) = filt {
        for k in 1..f.ideals.len() {
            let rk = &f.ideals[k];
            if rk.is_empty() {
                continue;
            }
            if f.class != AlgebraClass::Nilpotent {
                return Err(Error::Unsupported(format!("condition (A_{k}) for {:?} algebras", f.class)));
            }
            // nilpotent l: the socle of the adjoint module is the center
            let cand = intersection(&center, rk, nl);
            notes.push(format!("A{k}: S(l) taken as the socle (= center for nilpotent l), dim S cap R_{k} = {}", cand.len()));
            let bad = condition_a(l, a, z, &cand, rk);
            report.push(Check::new(
                format!("A{k}"),
                bad == 0,
                if bad == 0 { String::new() } else { format!("{bad}-dimensional ideal admits (Phi1, Phi2)") },
            ));
            let central = l.bracket.bracket_span(&all, rk).is_empty();
            if !(a.is_trivial() && central) {
                return Err(Error::Unsupported(format!("condition (B_{k}) needs rho = 0 and R_{k} central")));
            }
            // rho = 0 and [l, R_k] = 0: b_k is the orthogonal complement of alpha(l, R_k)
            let mut vals = Vec::new();
            for i in 0..nl {
                for kv in rk {
                    let mut out = zeros(na);
                    for (j, c) in kv.iter().enumerate() {
                        if !c.is_zero() {
                            exactlin::axpy(&mut out, c, z.alpha.at(&[i, j]));
                        }
                    }
                    vals.push(out);
                }
            }
            let bk = if na == 0 { vec![] } else { exactlin::orthogonal_complement(&span_basis(&vals, na), &a.gram) };
            let ok = is_nondegenerate_on(&bk, &a.gram);
            report.push(Check::new(format!("B{k}"), ok, if ok { String::new() } else { format!("b_{k} of dim {} is degenerate", bk.len()) }));
        }
    }
    Ok(BalancedReport { report, notes })
}

/// Certificate for the fullness conditions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FullnessReport {
    pub t1: bool,
    pub t2: bool,
    pub bracket_dim: usize,
    pub l_plus_dim: usize,
    pub invariant_plus_dim: usize,
    pub alpha0_kernel_dim: usize,
}

/// `(T1)`: `[l^-, l^-] = l^+`; `(T2)`: `(a^l)^+ = alpha_0(ker [,]|_{l^-})`.
pub fn fullness_t1_t2(l: &EquivariantLie, a: &OrthogonalModule, z: &QuadraticCocycle) -> Result<FullnessReport> {
    let nl = l.dim();
    let na = a.dim();
    let gl = grade_maps(&l.d, &l.theta)?;
    let ga = grade_maps(&a.d, &a.theta)?;
    let br = l.bracket.bracket_span(&gl.upper_minus, &gl.upper_minus);
    let t1 = span_eq(&br, &gl.upper_plus, nl);
    let (inv, img) = invariant_split(l, a)?;
    let inv_plus = intersection(&inv, &ga.upper_plus, na);
    let rhs = alpha0_on_kernel(l, z, &gl.upper_minus, &inv, &img);
    let t2 = span_eq(&inv_plus, &rhs, na);
    Ok(FullnessReport {
        t1,
        t2,
        bracket_dim: br.len(),
        l_plus_dim: gl.upper_plus.len(),
        invariant_plus_dim: inv_plus.len(),
        alpha0_kernel_dim: rhs.len(),
    })
}

// ---- catalog ----------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Case {
    One,
    TwoA,
    TwoB,
    Three,
    Four,
    Five,
}

impl Case {
    pub const ALL: [Case; 6] = [Case::One, Case::TwoA, Case::TwoB, Case::Three, Case::Four, Case::Five];

    pub fn id(self) -> &'static str {
        match self {
            Case::One => "1",
            Case::TwoA => "2a",
            Case::TwoB => "2b",
            Case::Three => "3",
            Case::Four => "4",
            Case::Five => "5",
        }
    }

    /// Families 4 and 5 carry `(k, l, m, c)`.
    pub fn parametrized(self) -> bool {
        matches!(self, Case::Four | Case::Five)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogDescriptor {
    pub case: Case,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub c: Scalar,
    pub a0: usize,
}

impl CatalogDescriptor {
    pub fn new(case: Case) -> Self {
        CatalogDescriptor { case, k: 0, l: 0, m: 0, c: Scalar::zero(), a0: 0 }
    }

    pub fn with_params(case: Case, k: usize, l: usize, m: usize, c: Scalar) -> Self {
        CatalogDescriptor { case, k, l, m, c, a0: 0 }
    }

    pub fn with_a0(mut self, a0: usize) -> Self {
        self.a0 = a0;
        self
    }
}

impl fmt::Display for CatalogDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tfull-{}", self.case.id())?;
        if self.case.parametrized() {
            write!(f, ":k={},l={},m={}:c={}", self.k, self.l, self.m, fmt_scalar(&self.c))?;
            write!(f, ":a0={}", self.a0)
        } else if self.a0 > 0 {
            write!(f, ":a0={}", self.a0)
        } else {
            Ok(())
        }
    }
}

impl FromStr for CatalogDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("descriptor {s:?}: {m}"));
        let mut parts = s.trim().split(':');
        let head = parts.next().unwrap_or_default();
        let id = head.strip_prefix("tfull-").ok_or_else(|| bad("must start with tfull-"))?;
        let case = Case::ALL.into_iter().find(|c| c.id() == id).ok_or_else(|| bad("unknown case"))?;
        let mut d = CatalogDescriptor::new(case);
        for part in parts {
            for kv in part.split(',') {
                let (key, val) = kv.split_once('=').ok_or_else(|| bad("expected key=value"))?;
                let count = || val.trim().parse::<usize>().map_err(|_| bad("counts must be nonnegative integers"));
                match key.trim() {
                    "k" if case.parametrized() => d.k = count()?,
                    "l" if case.parametrized() => d.l = count()?,
                    "m" if case.parametrized() => d.m = count()?,
                    "c" if case.parametrized() => d.c = parse_scalar(val.trim())?,
                    "a0" => d.a0 = count()?,
                    other => return Err(bad(&format!("unexpected key {other:?}"))),
                }
            }
        }
        Ok(d)
    }
}

/// The data `(l, a, (alpha, gamma))` of one catalog entry.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub desc: CatalogDescriptor,
    pub l: EquivariantLie,
    pub a: OrthogonalModule,
    pub z: QuadraticCocycle,
}

impl CatalogEntry {
    pub fn build(&self) -> MetricEquivariantAlgebra {
        build_extension_unchecked(&self.l, &self.a, &self.z)
    }

    /// Number of appended trivial pairs and `dim (a_0)_-`.
    pub fn n0(&self) -> usize {
        self.desc.a0
    }
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn rot() -> Mat {
    // e1 -> e2, e2 -> -e1
    Mat::from_ints(&[&[0, -1], &[1, 0]])
}

/// Plane `l = R^2 = span{X, Y}` with `D X = Y`, `D Y = -X`, `l_+ = R X`.
pub fn plane_lie() -> EquivariantLie {
    EquivariantLie {
        labels: strings(&["X", "Y"]),
        bracket: Bracket::zero(2),
        d: rot(),
        theta: Mat::from_ints(&[&[1, 0], &[0, -1]]),
    }
}

/// `h(1) = {[X,Y] = Z}` with `D X = Y`, `D Y = -X`, `D Z = 0`, `l_+ = R X`.
pub fn heisenberg_lie() -> EquivariantLie {
    let mut br = Bracket::zero(3);
    br.set(0, 1, &unit(3, 2));
    EquivariantLie {
        labels: strings(&["X", "Y", "Z"]),
        bracket: br,
        d: Mat::from_ints(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 0]]),
        theta: Mat::from_ints(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]]),
    }
}

/// `kappa = -1` gives su(2), `kappa = 1` gives sl(2,R). Basis `(X, Y, H)` with
/// `[H,X] = 2Y`, `[H,Y] = 2 kappa X`, `[X,Y] = 2H`; `D = ad(X)/2`, `l_+ = R H`.
pub fn sl2_like_lie(kappa: i64) -> EquivariantLie {
    let mut br = Bracket::zero(3);
    br.set(2, 0, &[int(0), int(2), int(0)]);
    br.set(2, 1, &[int(2 * kappa), int(0), int(0)]);
    br.set(0, 1, &[int(0), int(0), int(2)]);
    let d = br.ad_basis(0).scale(&exactlin::frac(1, 2));
    EquivariantLie { labels: strings(&["X", "Y", "H"]), bracket: br, d, theta: Mat::diag(&[int(-1), int(-1), int(1)]) }
}

fn prefixed(prefix: &str, names: &[&str]) -> Vec<String> {
    names.iter().map(|n| format!("{prefix}{n}")).collect()
}

/// Adjoint module with inner product `kappa * Killing`; `hat` selects `(D_l, theta_l)`
/// instead of `(D_l, -theta_l)`.
fn adjoint_module(l: &EquivariantLie, kappa: i64, hat: bool, prefix: &str) -> OrthogonalModule {
    let rho: Vec<Mat> = (0..3).map(|i| l.bracket.ad_basis(i)).collect();
    let gram = l.bracket.killing().scale(&int(kappa));
    let theta = if hat { l.theta.clone() } else { l.theta.neg() };
    OrthogonalModule { labels: prefixed(prefix, &["X", "Y", "H"]), rho, gram, d: l.d.clone(), theta }
}

/// Four-dimensional module `a_4` from the printed action table.
fn a4_module(kappa: i64, prefix: &str) -> OrthogonalModule {
    let mut x = Mat::zeros(4, 4);
    let mut y = Mat::zeros(4, 4);
    let mut h = Mat::zeros(4, 4);
    // columns are images: X(a1) = -a3, X(a2) = -a4, X(a3) = a1, X(a4) = a2
    x[(2, 0)] = int(-1);
    x[(3, 1)] = int(-1);
    x[(0, 2)] = int(1);
    x[(1, 3)] = int(1);
    // Y(a1) = a4, Y(a2) = kappa a3, Y(a3) = a2, Y(a4) = kappa a1
    y[(3, 0)] = int(1);
    y[(2, 1)] = int(kappa);
    y[(1, 2)] = int(1);
    y[(0, 3)] = int(kappa);
    // H(a1) = a2, H(a2) = kappa a1, H(a3) = -a4, H(a4) = -kappa a3
    h[(1, 0)] = int(1);
    h[(0, 1)] = int(kappa);
    h[(3, 2)] = int(-1);
    h[(2, 3)] = int(-kappa);
    let mut d = Mat::zeros(4, 4);
    d[(3, 1)] = int(-1);
    d[(1, 3)] = int(1);
    OrthogonalModule {
        labels: prefixed(prefix, &["a1", "a2", "a3", "a4"]),
        rho: vec![x, y, h],
        gram: Mat::diag(&[int(-kappa), int(1), int(-kappa), int(1)]),
        d,
        theta: Mat::diag(&[int(1), int(1), int(-1), int(-1)]),
    }
}

/// One trivial pair `(b+, b-)`: positive definite, `D b+ = b-`, `D b- = -b+`.
pub fn a0_pair(nl: usize, index: usize) -> OrthogonalModule {
    OrthogonalModule::trivial(
        nl,
        vec![format!("P{index}+"), format!("P{index}-")],
        Mat::identity(2),
        rot(),
        Mat::from_ints(&[&[1, 0], &[0, -1]]),
    )
}

/// Materialize a descriptor.
pub fn catalog(desc: &CatalogDescriptor) -> Result<CatalogEntry> {
    let (l, a, alpha_entries, gamma): (EquivariantLie, OrthogonalModule, Vec<((usize, usize), Vector)>, Scalar) =
        match desc.case {
            Case::One => {
                let a = OrthogonalModule::trivial(
                    0,
                    strings(&["A1", "A2"]),
                    Mat::identity(2).neg(),
                    rot(),
                    Mat::from_ints(&[&[1, 0], &[0, -1]]),
                );
                (EquivariantLie::zero_dim(), a, vec![], Scalar::zero())
            }
            Case::TwoA | Case::TwoB => {
                let sign = if desc.case == Case::TwoA { 1 } else { -1 };
                let a = OrthogonalModule::trivial(
                    2,
                    strings(&["A0"]),
                    Mat::diag(&[int(sign)]),
                    Mat::zeros(1, 1),
                    Mat::diag(&[int(-1)]),
                );
                (plane_lie(), a, vec![((0, 1), vec![int(1)])], Scalar::zero())
            }
            Case::Three => {
                let a = OrthogonalModule::trivial(
                    3,
                    strings(&["A1", "A2"]),
                    Mat::identity(2),
                    rot(),
                    Mat::from_ints(&[&[-1, 0], &[0, 1]]),
                );
                let entries = vec![((0, 2), vec![int(1), int(0)]), ((1, 2), vec![int(0), int(1)])];
                (heisenberg_lie(), a, entries, Scalar::zero())
            }
            Case::Four | Case::Five => {
                let kappa = if desc.case == Case::Four { -1 } else { 1 };
                let l = sl2_like_lie(kappa);
                let mut parts = Vec::new();
                for i in 1..=desc.k {
                    parts.push(adjoint_module(&l, kappa, false, &format!("V{i}")));
                }
                for i in 1..=desc.l {
                    parts.push(adjoint_module(&l, kappa, true, &format!("U{i}")));
                }
                for i in 1..=desc.m {
                    parts.push(a4_module(kappa, &format!("W{i}")));
                }
                let refs: Vec<&OrthogonalModule> = parts.iter().collect();
                let a = if refs.is_empty() { OrthogonalModule::zero(3) } else { OrthogonalModule::direct_sum(&refs) };
                (l, a, vec![], &desc.c * int(4))
            }
        };
    let nl = l.dim();
    let a = if desc.a0 == 0 {
        a
    } else {
        let pairs: Vec<OrthogonalModule> = (1..=desc.a0).map(|i| a0_pair(nl, i)).collect();
        let mut refs: Vec<&OrthogonalModule> = vec![&a];
        refs.extend(pairs.iter());
        OrthogonalModule::direct_sum(&refs)
    };
    let na = a.dim();
    let mut z = QuadraticCocycle::zero(nl, na);
    for ((i, j), v) in alpha_entries {
        let mut full = v;
        full.resize(na, Scalar::zero());
        z.alpha.set(&[i, j], &full);
    }
    if !gamma.is_zero() {
        // gamma(H, X, Y) = gamma(X, Y, H) = 4c
        z.gamma.set1(&[0, 1, 2], gamma);
    }
    Ok(CatalogEntry { desc: desc.clone(), l, a, z })
}

/// Build the algebra of a descriptor directly.
pub fn catalog_algebra(desc: &CatalogDescriptor) -> Result<MetricEquivariantAlgebra> {
    Ok(catalog(desc)?.build())
}

/// Descriptors over the given parameter ranges.
pub fn catalog_grid(max_klm: usize, cs: &[Scalar], a0s: &[usize]) -> Vec<CatalogDescriptor> {
    let mut out = Vec::new();
    for &a0 in a0s {
        for case in [Case::One, Case::TwoA, Case::TwoB, Case::Three] {
            out.push(CatalogDescriptor::new(case).with_a0(a0));
        }
        for case in [Case::Four, Case::Five] {
            for k in 0..=max_klm {
                for l in 0..=max_klm {
                    for m in 0..=max_klm {
                        for c in cs {
                            out.push(CatalogDescriptor::with_params(case, k, l, m, c.clone()).with_a0(a0));
                        }
                    }
                }
            }
        }
    }
    out
}

/// The five case families in display order, as `(family id, summary)`.
pub fn families() -> Vec<(&'static str, &'static str)> {
    vec![
        ("tfull-1", "l = 0, a = R^{2,0}"),
        ("tfull-2a", "l = R^2, a = R^{0,1}, alpha(X,Y) = A0"),
        ("tfull-2b", "l = R^2, a = R^{1,0}, alpha(X,Y) = A0"),
        ("tfull-3", "l = h(1), a = R^2, alpha(X,Z) = A1, alpha(Y,Z) = A2"),
        ("tfull-4", "l = su(2), a = a3^k + a3^^l + a4^m, gamma(H,X,Y) = 4c"),
        ("tfull-5", "l = sl(2,R), a = a3^k + a3^^l + a4^m, gamma(H,X,Y) = 4c"),
    ]
}

// ---- quadext.v1 -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct LieJson {
    dim: usize,
    labels: Vec<String>,
    bracket: Vec<(usize, usize, Vec<String>)>,
    #[serde(rename = "D")]
    d: Vec<Vec<String>>,
    theta: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct ModuleJson {
    dim: usize,
    labels: Vec<String>,
    rho: Vec<Vec<Vec<String>>>,
    gram: Vec<Vec<String>>,
    #[serde(rename = "D")]
    d: Vec<Vec<String>>,
    theta: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct QuadextJson {
    schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    descriptor: Option<String>,
    l: LieJson,
    a: ModuleJson,
    alpha: Vec<(usize, usize, Vec<String>)>,
    gamma: Vec<(usize, usize, usize, String)>,
}

fn mat_json(m: &Mat) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(fmt_scalar).collect()).collect()
}

fn mat_parse(rows: &[Vec<String>], r: usize, c: usize, what: &str) -> Result<Mat> {
    if rows.len() != r || rows.iter().any(|x| x.len() != c) {
        return Err(Error::Parse(format!("{what} must be {r}x{c}")));
    }
    if r == 0 {
        return Ok(Mat::zeros(0, c));
    }
    let data: Result<Vec<Vector>> = rows.iter().map(|x| x.iter().map(|s| parse_scalar(s)).collect()).collect();
    Mat::from_rows(data?)
}

fn vec_parse(v: &[String], n: usize, what: &str) -> Result<Vector> {
    if v.len() != n {
        return Err(Error::Parse(format!("{what} must have {n} entries")));
    }
    v.iter().map(|s| parse_scalar(s)).collect()
}

pub fn entry_to_json(l: &EquivariantLie, a: &OrthogonalModule, z: &QuadraticCocycle, descriptor: Option<&str>) -> serde_json::Value {
    let nl = l.dim();
    let mut bracket = Vec::new();
    for i in 0..nl {
        for j in i + 1..nl {
            let v = l.bracket.get_dense(i, j);
            if !vec_is_zero(&v) {
                bracket.push((i, j, v.iter().map(fmt_scalar).collect()));
            }
        }
    }
    let j = QuadextJson {
        schema: "quadext.v1".into(),
        descriptor: descriptor.map(str::to_string),
        l: LieJson { dim: nl, labels: l.labels.clone(), bracket, d: mat_json(&l.d), theta: mat_json(&l.theta) },
        a: ModuleJson {
            dim: a.dim(),
            labels: a.labels.clone(),
            rho: a.rho.iter().map(mat_json).collect(),
            gram: mat_json(&a.gram),
            d: mat_json(&a.d),
            theta: mat_json(&a.theta),
        },
        alpha: z.alpha.entries().into_iter().map(|(idx, v)| (idx[0], idx[1], v.iter().map(fmt_scalar).collect())).collect(),
        gamma: z.gamma.entries().into_iter().map(|(idx, v)| (idx[0], idx[1], idx[2], fmt_scalar(&v[0]))).collect(),
    };
    serde_json::to_value(j).expect("serializable")
}

pub fn entry_from_json(v: &serde_json::Value) -> Result<(EquivariantLie, OrthogonalModule, QuadraticCocycle)> {
    let j: QuadextJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    if j.schema != "quadext.v1" {
        return Err(Error::Parse(format!("unknown schema {:?}", j.schema)));
    }
    let nl = j.l.dim;
    let na = j.a.dim;
    if j.l.labels.len() != nl || j.a.labels.len() != na || j.a.rho.len() != nl {
        return Err(Error::Parse("label or rho counts disagree with dims".into()));
    }
    let mut br = Bracket::zero(nl);
    for (i, k, c) in &j.l.bracket {
        if i >= k || *k >= nl {
            return Err(Error::Parse(format!("bad bracket entry ({i},{k})")));
        }
        br.set(*i, *k, &vec_parse(c, nl, "bracket entry")?);
    }
    let l = EquivariantLie {
        labels: j.l.labels,
        bracket: br,
        d: mat_parse(&j.l.d, nl, nl, "l.D")?,
        theta: mat_parse(&j.l.theta, nl, nl, "l.theta")?,
    };
    let rho: Result<Vec<Mat>> = j.a.rho.iter().map(|m| mat_parse(m, na, na, "rho")).collect();
    let a = OrthogonalModule {
        labels: j.a.labels,
        rho: rho?,
        gram: mat_parse(&j.a.gram, na, na, "a.gram")?,
        d: mat_parse(&j.a.d, na, na, "a.D")?,
        theta: mat_parse(&j.a.theta, na, na, "a.theta")?,
    };
    let mut z = QuadraticCocycle::zero(nl, na);
    for (p, q, c) in &j.alpha {
        if *p >= nl || *q >= nl || p == q {
            return Err(Error::Parse(format!("bad alpha entry ({p},{q})")));
        }
        z.alpha.set(&[*p, *q], &vec_parse(c, na, "alpha entry")?);
    }
    for (p, q, r, c) in &j.gamma {
        if *p >= nl || *q >= nl || *r >= nl || p == q || q == r || p == r {
            return Err(Error::Parse(format!("bad gamma entry ({p},{q},{r})")));
        }
        z.gamma.set1(&[*p, *q, *r], parse_scalar(c)?);
    }
    Ok((l, a, z))
}

/// Lorentz check on `g_-`: index 1 of the restricted inner product.
pub fn minus_signature(g: &MetricEquivariantAlgebra) -> Result<(usize, usize, usize)> {
    let gr = liecore::grade(g)?;
    let mut minus = gr.mm.clone();
    minus.extend(gr.mp.iter().cloned());
    Ok(exactlin::inertia(&exactlin::restricted_gram(&minus, &g.gram)))
}

/// Index (number of negative directions) of the induced metric on `g_+^-`,
/// i.e. of the embedded space.
pub fn tangent_signature(g: &MetricEquivariantAlgebra) -> Result<(usize, usize, usize)> {
    let gr = liecore::grade(g)?;
    Ok(exactlin::inertia(&exactlin::restricted_gram(&gr.pm, &g.gram)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::frac;
    use crate::liecore::{is_extrinsic_triple, is_full, verify_algebra};

    #[test]
    fn permutations_have_correct_signs() {
        let ps = signed_permutations(3);
        assert_eq!(ps.len(), 6);
        for (p, even) in ps {
            let inv = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            assert_eq!(even, inv % 2 == 0, "{p:?}");
        }
    }

    #[test]
    fn differential_of_abelian_one_form_vanishes() {
        let l = Bracket::zero(2);
        let mut eta = Form::zero(2, 1, 1);
        eta.set1(&[0], int(3));
        assert!(ce_differential(&l, None, &eta).is_zero());
    }

    #[test]
    fn differential_on_heisenberg() {
        let h = heisenberg_lie();
        let mut eta = Form::zero(3, 1, 1);
        eta.set1(&[2], int(1));
        let d = ce_differential(&h.bracket, None, &eta);
        assert_eq!(*d.at1(&[0, 1]), int(-1));
        assert_eq!(*d.at1(&[1, 0]), int(1));
        let dd = ce_differential(&h.bracket, None, &d);
        assert!(dd.is_zero());
    }

    #[test]
    fn tau_wedge_tau_vanishes() {
        let a = catalog(&CatalogDescriptor::new(Case::Three)).unwrap();
        let mut tau = Form::zero(3, 1, 2);
        tau.set(&[0], &[int(1), int(2)]);
        tau.set(&[1], &[int(-1), frac(1, 3)]);
        assert!(wedge_tau(&tau, &tau, &a.a.gram).is_zero());
        let c = QuadraticCochain { tau: tau.clone(), sigma: Form::zero(3, 2, 1) };
        let prod = cochain_mul(&a.a, &c, &cochain_inv(&c));
        assert!(prod.is_identity());
    }

    #[test]
    fn case3_cocycle_and_extension() {
        let e = catalog(&CatalogDescriptor::new(Case::Three)).unwrap();
        assert!(is_cocycle(&e.l, &e.a, &e.z).all_pass());
        assert!(wedge_inner(&e.z.alpha, &e.z.alpha, &e.a.gram).is_zero());
        let g = build_extension(&e.l, &e.a, &e.z).unwrap();
        assert_eq!(g.dim(), 8);
        assert!(verify_algebra(&g).all_pass());
        assert!(is_extrinsic_triple(&g).unwrap().0);
        assert!(is_full(&g).unwrap().0);
    }

    #[test]
    fn case3_with_gamma_is_still_a_cocycle() {
        let mut e = catalog(&CatalogDescriptor::new(Case::Three)).unwrap();
        e.z.gamma.set1(&[0, 1, 2], int(1));
        assert!(is_cocycle(&e.l, &e.a, &e.z).all_pass());
        assert!(verify_algebra(&e.build()).all_pass());
    }

    #[test]
    fn case2b_brackets() {
        let g = catalog_algebra(&"tfull-2b".parse().unwrap()).unwrap();
        let br = |x: &str, y: &str| g.bracket.apply(&g.e(x), &g.e(y));
        assert_eq!(br("X", "Y"), g.e("A0"));
        assert_eq!(br("X", "A0"), g.e("sY"));
        assert_eq!(br("Y", "A0"), exactlin::vec_scale(&g.e("sX"), &int(-1)));
        assert!(br("sX", "A0").iter().all(Zero::is_zero));
        let g2a = catalog_algebra(&"tfull-2a".parse().unwrap()).unwrap();
        assert_eq!(g2a.bracket.apply(&g2a.e("X"), &g2a.e("A0")), exactlin::vec_scale(&g2a.e("sY"), &int(-1)));
    }

    #[test]
    fn descriptors_round_trip() {
        for s in ["tfull-1", "tfull-2a:a0=1", "tfull-3", "tfull-4:k=1,l=0,m=2:c=1/2:a0=0", "tfull-5:k=0,l=0,m=0:c=-3/2:a0=2"] {
            let d: CatalogDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("tfull-6".parse::<CatalogDescriptor>().is_err());
        assert!("tfull-3:k=1".parse::<CatalogDescriptor>().is_err());
        assert!("tfull-4:k=-1".parse::<CatalogDescriptor>().is_err());
    }

    #[test]
    fn su2_grading() {
        let e = catalog(&"tfull-4:k=0,l=0,m=0:c=1:a0=0".parse().unwrap()).unwrap();
        let gl = grade_maps(&e.l.d, &e.l.theta).unwrap();
        assert!(span_eq(&gl.upper_plus, &[unit(3, 0)], 3));
        assert!(span_eq(&gl.upper_minus, &[unit(3, 1), unit(3, 2)], 3));
        assert_eq!(*e.z.gamma.at1(&[2, 0, 1]), int(4));
    }

    #[test]
    fn case5_a4_module() {
        let e = catalog(&"tfull-5:k=0,l=0,m=1:c=0:a0=0".parse().unwrap()).unwrap();
        assert!(e.a.verify(&e.l).all_pass());
        assert_eq!(e.a.gram, Mat::diag(&[int(-1), int(1), int(-1), int(1)]));
        // Y(a2) = kappa a3 with kappa = 1
        assert_eq!(e.a.rho[1].col(1), unit(4, 2));
    }

    #[test]
    fn balanced_examples() {
        let plane = plane_lie();
        let a = OrthogonalModule::zero(2);
        let z = QuadraticCocycle::zero(2, 0);
        let r = balanced_check(&plane, &a, &z).unwrap();
        assert_eq!(r.first_failure(), Some("A0"));

        let a11 = OrthogonalModule::trivial(
            2,
            strings(&["A", "B"]),
            Mat::from_ints(&[&[0, 1], &[1, 0]]),
            Mat::zeros(2, 2),
            Mat::identity(2).neg(),
        );
        let mut z = QuadraticCocycle::zero(2, 2);
        z.alpha.set(&[0, 1], &[int(1), int(0)]);
        let r = balanced_check(&plane, &a11, &z).unwrap();
        assert!(r.report.passed("A0"));
        assert_eq!(r.first_failure(), Some("B0"));
    }

    #[test]
    fn fullness_examples() {
        let e = catalog(&CatalogDescriptor::new(Case::TwoA)).unwrap();
        let f = fullness_t1_t2(&e.l, &e.a, &e.z).unwrap();
        assert!(f.t1 && f.t2);
        let z0 = QuadraticCocycle::zero(2, 1);
        let f = fullness_t1_t2(&e.l, &e.a, &z0).unwrap();
        assert!(f.t1 && !f.t2);
    }

    #[test]
    fn json_round_trip() {
        let e = catalog(&"tfull-4:k=1,l=0,m=1:c=1/2:a0=1".parse().unwrap()).unwrap();
        let v = entry_to_json(&e.l, &e.a, &e.z, Some(&e.desc.to_string()));
        let (l, a, z) = entry_from_json(&v).unwrap();
        assert_eq!(l, e.l);
        assert_eq!(a, e.a);
        assert_eq!(z, e.z);
    }
}
