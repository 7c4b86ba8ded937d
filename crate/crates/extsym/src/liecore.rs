//! Metric Lie algebras with a derivation `D` and an involution `theta`.
//!
//! An algebra is stored by its structure constants on a fixed basis together
//! with the Gram matrix of the inner product and the matrices of `D` and
//! `theta`. All checks are exact.
//!
//! The four-fold grading uses `tau = Id + 2 D^2`, which is `exp(pi D)` as soon
//! as `D^3 = -D`:
//!
//! ```text
//!            tau = +1     tau = -1
//! theta=+1   g_+^+        g_+^-
//! theta=-1   g_-^+        g_-^-
//! ```

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{
    self, fmt_scalar, int, intersection, is_nondegenerate_on, nullspace, parse_scalar,
    rank, span_basis, span_contains, span_eq, span_rank, unit, vec_is_zero, zeros, Mat,
    Scalar, SparseRow, Vector,
};
use crate::par::par_range;
use crate::report::{Check, Report, Status};

/// Structure constants: `table[i*n + j]` holds `[e_i, e_j]` as a sparse row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    n: usize,
    table: Vec<SparseRow>,
}

impl Bracket {
    pub fn zero(n: usize) -> Self {
        Bracket { n, table: vec![Vec::new(); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Set `[e_i, e_j] = v` and `[e_j, e_i] = -v`.
    pub fn set(&mut self, i: usize, j: usize, v: &[Scalar]) {
        assert!(i != j || vec_is_zero(v), "[e_i, e_i] must vanish");
        self.table[i * self.n + j] = exactlin::to_sparse(v);
        let neg: Vector = v.iter().map(|x| -x.clone()).collect();
        self.table[j * self.n + i] = exactlin::to_sparse(&neg);
    }

    /// Set a single ordered entry, leaving `[e_j, e_i]` untouched.
    pub fn set_ordered(&mut self, i: usize, j: usize, v: &[Scalar]) {
        self.table[i * self.n + j] = exactlin::to_sparse(v);
    }

    pub fn get(&self, i: usize, j: usize) -> &SparseRow {
        &self.table[i * self.n + j]
    }

    pub fn get_dense(&self, i: usize, j: usize) -> Vector {
        exactlin::from_sparse(self.get(i, j), self.n)
    }

    pub fn apply(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let mut out = zeros(self.n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (k, v) in self.get(i, j) {
                    out[*k] += &c * v;
                }
            }
        }
        out
    }

    /// Matrix of `ad(e_i)`.
    pub fn ad_basis(&self, i: usize) -> Mat {
        let mut m = Mat::zeros(self.n, self.n);
        for j in 0..self.n {
            for (k, v) in self.get(i, j) {
                m[(*k, j)] = v.clone();
            }
        }
        m
    }

    pub fn ad(&self, x: &[Scalar]) -> Mat {
        let mut m = Mat::zeros(self.n, self.n);
        for (i, xi) in x.iter().enumerate() {
            if !xi.is_zero() {
                m = m.add(&self.ad_basis(i).scale(xi));
            }
        }
        m
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(Vec::is_empty)
    }

    /// Span of `[x, y]` over the given families.
    pub fn bracket_span(&self, xs: &[Vector], ys: &[Vector]) -> Vec<Vector> {
        let mut out = Vec::new();
        for x in xs {
            for y in ys {
                let v = self.apply(x, y);
                if !vec_is_zero(&v) {
                    out.push(v);
                }
            }
        }
        span_basis(&out, self.n)
    }

    pub fn antisymmetry_defects(&self) -> Vec<(usize, usize)> {
        let mut bad = Vec::new();
        for i in 0..self.n {
            if !self.get(i, i).is_empty() {
                bad.push((i, i));
            }
            for j in i + 1..self.n {
                let a = self.get(i, j);
                let b = self.get(j, i);
                let ok = a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.0 == y.0 && x.1 == -y.1.clone());
                if !ok {
                    bad.push((i, j));
                }
            }
        }
        bad
    }

    /// Nonzero Jacobiators `[x,[y,z]] + [y,[z,x]] + [z,[x,y]]` on basis triples `i<j<k`.
    pub fn jacobi_defects(&self) -> Vec<(usize, usize, usize, Vector)> {
        let n = self.n;
        let per_i = par_range(n, |i| {
            let mut bad = Vec::new();
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut acc = zeros(n);
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        // [e_a, [e_b, e_c]]
                        for (m, v) in self.get(b, c) {
                            for (p, w) in self.get(a, *m) {
                                acc[*p] += v * w;
                            }
                        }
                    }
                    if !vec_is_zero(&acc) {
                        bad.push((i, j, k, acc));
                    }
                }
            }
            bad
        });
        per_i.into_iter().flatten().collect()
    }

    fn image_of_bracket(&self, cols: &[SparseRow], i: usize, j: usize) -> Vector {
        // phi([e_i, e_j])
        let mut out = zeros(self.n);
        for (k, v) in self.get(i, j) {
            acc_sparse(&mut out, v, &cols[*k]);
        }
        out
    }

    pub fn is_derivation(&self, phi: &Mat) -> bool {
        let n = self.n;
        let cols = sparse_cols(phi);
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let lhs = self.image_of_bracket(&cols, i, j);
                let mut rhs = zeros(n);
                for (m, v) in &cols[i] {
                    acc_sparse(&mut rhs, v, self.get(*m, j));
                }
                for (m, v) in &cols[j] {
                    acc_sparse(&mut rhs, v, self.get(i, *m));
                }
                lhs == rhs
            })
        })
    }

    pub fn is_automorphism(&self, f: &Mat) -> bool {
        let n = self.n;
        let cols = sparse_cols(f);
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let lhs = self.image_of_bracket(&cols, i, j);
                let mut rhs = zeros(n);
                for (m, v) in &cols[i] {
                    for (p, w) in &cols[j] {
                        acc_sparse(&mut rhs, &(v * w), self.get(*m, *p));
                    }
                }
                lhs == rhs
            })
        })
    }

    /// `gram` is ad-invariant: `<[e_i,e_j],e_k> + <e_j,[e_i,e_k]> = 0`.
    pub fn is_invariant_form(&self, gram: &Mat) -> bool {
        let n = self.n;
        let gcols = sparse_cols(gram);
        // w[i][j] = G [e_i, e_j]
        let w: Vec<Vec<Vector>> = (0..n)
            .map(|i| (0..n).map(|j| self.image_of_bracket(&gcols, i, j)).collect())
            .collect();
        (0..n).all(|i| (0..n).all(|j| (j..n).all(|k| (&w[i][j][k] + &w[i][k][j]).is_zero())))
    }

    /// Killing form `tr(ad x ad y)`.
    pub fn killing(&self) -> Mat {
        let ads: Vec<Mat> = (0..self.n).map(|i| self.ad_basis(i)).collect();
        let mut k = Mat::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in i..self.n {
                let t = ads[i].mul(&ads[j]).trace();
                k[(i, j)] = t.clone();
                k[(j, i)] = t;
            }
        }
        k
    }

    pub fn center(&self) -> Vec<Vector> {
        let n = self.n;
        // x central iff sum_i x_i [e_i, e_j] = 0 for all j
        let mut rows = Vec::new();
        for j in 0..n {
            for k in 0..n {
                rows.push((0..n).map(|i| self.get_dense(i, j)[k].clone()).collect::<Vector>());
            }
        }
        if rows.is_empty() {
            return vec![];
        }
        nullspace(&Mat::from_rows(rows).expect("uniform"))
    }

    /// Image of the bracket `Lambda^2 V -> g` restricted to a family `vs`, and
    /// the kernel as coefficient vectors on the pairs `(a,b)`, `a<b`.
    pub fn wedge_kernel(&self, vs: &[Vector]) -> Vec<Vector> {
        let k = vs.len();
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
        if pairs.is_empty() {
            return vec![];
        }
        let images: Vec<Vector> = pairs.iter().map(|&(a, b)| self.apply(&vs[a], &vs[b])).collect();
        nullspace(&Mat::from_cols(&images, self.n))
    }
}

/// Columns of `m` as sparse rows.
pub fn sparse_cols(m: &Mat) -> Vec<SparseRow> {
    (0..m.cols())
        .map(|j| (0..m.rows()).filter(|&i| !m[(i, j)].is_zero()).map(|i| (i, m[(i, j)].clone())).collect())
        .collect()
}

fn acc_sparse(out: &mut [Scalar], c: &Scalar, row: &[(usize, Scalar)]) {
    for (k, v) in row {
        out[*k] += c * v;
    }
}

fn check_d_theta(br: &Bracket, d: &Mat, theta: &Mat, report: &mut Report) {
    let n = br.dim();
    let id = Mat::identity(n);
    report.push(Check::new("theta-involution", theta.mul(theta) == id, ""));
    report.push(Check::new("theta-automorphism", br.is_automorphism(theta), ""));
    report.push(Check::new("D-derivation", br.is_derivation(d), ""));
    report.push(Check::new("D-theta-anticommute", d.anticommutator(theta).is_zero(), ""));
    let d3 = d.mul(d).mul(d);
    report.push(Check::new("h-graded", d3.add(d).is_zero(), "D^3 = -D"));
}

fn check_bracket(br: &Bracket, report: &mut Report) {
    let anti = br.antisymmetry_defects();
    report.push(Check::new(
        "antisymmetry",
        anti.is_empty(),
        anti.first().map(|(i, j)| format!("first defect at ({i},{j})")).unwrap_or_default(),
    ));
    let jac = br.jacobi_defects();
    let detail = jac
        .first()
        .map(|(i, j, k, v)| {
            let coeffs: Vec<String> = v.iter().map(fmt_scalar).collect();
            format!("{} defects; first on ({i},{j},{k}): [{}]", jac.len(), coeffs.join(", "))
        })
        .unwrap_or_default();
    report.push(Check::new("jacobi", jac.is_empty(), detail));
}

/// A Lie algebra with derivation and involution but no inner product.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivariantLie {
    pub labels: Vec<String>,
    pub bracket: Bracket,
    pub d: Mat,
    pub theta: Mat,
}

impl EquivariantLie {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn zero_dim() -> Self {
        EquivariantLie { labels: vec![], bracket: Bracket::zero(0), d: Mat::zeros(0, 0), theta: Mat::zeros(0, 0) }
    }

    pub fn verify(&self) -> Report {
        let mut r = Report::default();
        check_bracket(&self.bracket, &mut r);
        check_d_theta(&self.bracket, &self.d, &self.theta, &mut r);
        r
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Metric Lie algebra with `(D, theta)`; the inner product may be degenerate
/// when `weak` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricEquivariantAlgebra {
    pub labels: Vec<String>,
    pub bracket: Bracket,
    pub gram: Mat,
    pub d: Mat,
    pub theta: Mat,
    pub weak: bool,
}

impl MetricEquivariantAlgebra {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Basis vector by label; panics on unknown labels.
    pub fn e(&self, label: &str) -> Vector {
        let i = self.index_of(label).unwrap_or_else(|| panic!("unknown label {label}"));
        unit(self.dim(), i)
    }

    pub fn lie(&self) -> EquivariantLie {
        EquivariantLie {
            labels: self.labels.clone(),
            bracket: self.bracket.clone(),
            d: self.d.clone(),
            theta: self.theta.clone(),
        }
    }

    fn shapes_ok(&self) -> bool {
        let n = self.dim();
        self.bracket.dim() == n
            && [&self.gram, &self.d, &self.theta].iter().all(|m| m.rows() == n && m.cols() == n)
    }
}

/// Run every axiom check on `g`.
pub fn verify_algebra(g: &MetricEquivariantAlgebra) -> Report {
    let mut r = Report::default();
    if !g.shapes_ok() {
        r.push(Check::new("shapes", false, "matrix sizes disagree with dim"));
        return r;
    }
    check_bracket(&g.bracket, &mut r);
    r.push(Check::new("gram-symmetric", g.gram.is_symmetric(), ""));
    let nondeg = rank(&g.gram) == g.dim();
    if g.weak {
        // a weak triple may only degenerate along g_-^+
        let status = match grade(g) {
            Ok(gr) => {
                let radical = nullspace(&g.gram);
                Status::from_bool(span_contains(&gr.mp, &radical, g.dim()))
            }
            Err(_) => Status::Fail,
        };
        r.push(Check::with_status("gram-radical-in-g-minus-plus", status, ""));
    } else {
        r.push(Check::new("gram-nondegenerate", nondeg, ""));
    }
    r.push(Check::new("invariance", g.bracket.is_invariant_form(&g.gram), "<[x,y],z> + <y,[x,z]> = 0"));
    check_d_theta(&g.bracket, &g.d, &g.theta, &mut r);
    r.push(Check::new("theta-isometry", g.theta.transpose().mul(&g.gram).mul(&g.theta) == g.gram, ""));
    r.push(Check::new(
        "D-antisymmetric",
        g.d.transpose().mul(&g.gram).add(&g.gram.mul(&g.d)).is_zero(),
        "",
    ));
    r
}

/// Sub-bases of the grading, in ambient coordinates. Field names read
/// `<theta sign><tau sign>`, so `pm` is `g_+^-`.
#[derive(Clone, Debug)]
pub struct Grading {
    pub tau: Mat,
    pub plus: Vec<Vector>,
    pub minus: Vec<Vector>,
    pub upper_plus: Vec<Vector>,
    pub upper_minus: Vec<Vector>,
    pub pp: Vec<Vector>,
    pub pm: Vec<Vector>,
    pub mp: Vec<Vector>,
    pub mm: Vec<Vector>,
}

impl Grading {
    pub fn dims(&self) -> [usize; 4] {
        [self.pp.len(), self.pm.len(), self.mp.len(), self.mm.len()]
    }
}

/// Grading from `(D, theta)` alone.
pub fn grade_maps(d: &Mat, theta: &Mat) -> Result<Grading> {
    let n = d.rows();
    let id = Mat::identity(n);
    let d2 = d.mul(d);
    if !d2.mul(d).add(d).is_zero() {
        return Err(Error::Precondition("D is not h-graded (D^3 != -D)".into()));
    }
    let tau = id.add(&d2.scale(&int(2)));
    let plus = exactlin::column_space(&id.add(theta));
    let minus = exactlin::column_space(&id.sub(theta));
    let upper_plus = exactlin::column_space(&id.add(&d2));
    let upper_minus = exactlin::column_space(&d2.neg());
    let pp = intersection(&plus, &upper_plus, n);
    let pm = intersection(&plus, &upper_minus, n);
    let mp = intersection(&minus, &upper_plus, n);
    let mm = intersection(&minus, &upper_minus, n);
    if pp.len() + pm.len() + mp.len() + mm.len() != n {
        return Err(Error::Precondition("theta and tau eigenspaces do not split the space".into()));
    }
    // D|g^+ = 0, D(g_+^-) = g_-^-, (D|g^-)^2 = -Id
    let ok_plus = upper_plus.iter().all(|v| vec_is_zero(&d.mul_vec(v)));
    let dpm: Vec<Vector> = pm.iter().map(|v| d.mul_vec(v)).collect();
    let ok_swap = span_eq(&dpm, &mm, n);
    let ok_square = upper_minus.iter().all(|v| d2.mul_vec(v) == v.iter().map(|x| -x.clone()).collect::<Vector>());
    if !(ok_plus && ok_swap && ok_square) {
        return Err(Error::Precondition("grading violates D|g+ = 0, D(g_+^-) = g_-^-, D^2|g- = -Id".into()));
    }
    Ok(Grading { tau, plus, minus, upper_plus, upper_minus, pp, pm, mp, mm })
}

pub fn grade(g: &MetricEquivariantAlgebra) -> Result<Grading> {
    grade_maps(&g.d, &g.theta)
}

/// Ranks witnessing a span comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanCertificate {
    pub bracket_span_dim: usize,
    pub target_dim: usize,
    pub contained: bool,
}

impl SpanCertificate {
    pub fn holds(&self) -> bool {
        self.contained && self.bracket_span_dim == self.target_dim
    }
}

fn span_certificate(br: &Bracket, xs: &[Vector], ys: &[Vector], target: &[Vector]) -> SpanCertificate {
    let n = br.dim();
    let span = br.bracket_span(xs, ys);
    SpanCertificate {
        bracket_span_dim: span.len(),
        target_dim: span_rank(target),
        contained: span_contains(target, &span, n),
    }
}

/// `[g_+^-, g_+^-] = g_+^+`.
pub fn is_extrinsic_triple(g: &MetricEquivariantAlgebra) -> Result<(bool, SpanCertificate)> {
    let gr = grade(g)?;
    let cert = span_certificate(&g.bracket, &gr.pm, &gr.pm, &gr.pp);
    Ok((cert.holds(), cert))
}

/// `[g^-, g^-] = g^+`.
pub fn is_full(g: &MetricEquivariantAlgebra) -> Result<(bool, SpanCertificate)> {
    let gr = grade(g)?;
    let cert = span_certificate(&g.bracket, &gr.upper_minus, &gr.upper_minus, &gr.upper_plus);
    Ok((cert.holds(), cert))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraClass {
    Abelian,
    Semisimple,
    Reductive,
    Nilpotent,
}

/// `R_0 = g ⊃ R_1 ⊃ ... ⊃ R_m = 0` together with complements `C_k` of
/// `R_{k+1}` in `R_k` that are invariant modulo `R_{k+1}`.
#[derive(Clone, Debug)]
pub struct Filtration {
    pub class: AlgebraClass,
    pub ideals: Vec<Vec<Vector>>,
    pub complements: Vec<Vec<Vector>>,
}

impl Filtration {
    /// `m` with `R_m = 0`.
    pub fn length(&self) -> usize {
        self.ideals.len() - 1
    }
}

fn derived(br: &Bracket, a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    br.bracket_span(a, b)
}

fn complement_in(big: &[Vector], small: &[Vector], n: usize) -> Vec<Vector> {
    let mut e = exactlin::Echelon::new(n);
    for v in small {
        e.insert_dense(v);
    }
    big.iter().filter(|v| e.insert_dense(v)).cloned().collect()
}

pub fn classify(br: &Bracket) -> Option<AlgebraClass> {
    let n = br.dim();
    if br.is_abelian() {
        return Some(AlgebraClass::Abelian);
    }
    let all: Vec<Vector> = (0..n).map(|i| unit(n, i)).collect();
    let kill = br.killing();
    if rank(&kill) == n {
        return Some(AlgebraClass::Semisimple);
    }
    let dg = derived(br, &all, &all);
    let z = br.center();
    if z.len() + dg.len() == n && intersection(&z, &dg, n).is_empty() && is_nondegenerate_on(&dg, &kill) {
        return Some(AlgebraClass::Reductive);
    }
    // lower central series
    let mut c = all.clone();
    for _ in 0..=n {
        c = derived(br, &all, &c);
        if c.is_empty() {
            return Some(AlgebraClass::Nilpotent);
        }
    }
    None
}

/// Radical filtration of the adjoint module, for the algebra shapes that occur
/// in the catalog.
pub fn radical_filtration(br: &Bracket) -> Result<Filtration> {
    let n = br.dim();
    let all: Vec<Vector> = (0..n).map(|i| unit(n, i)).collect();
    let class = classify(br).ok_or_else(|| {
        Error::FiltrationUnsupported("algebra is neither abelian, nilpotent, semisimple nor reductive".into())
    })?;
    let ideals = match class {
        AlgebraClass::Abelian | AlgebraClass::Semisimple | AlgebraClass::Reductive => vec![all, vec![]],
        AlgebraClass::Nilpotent => {
            // simple modules of a nilpotent algebra are trivial, so the smallest
            // ideal with semisimple quotient is [g, R_{k-1}]
            let mut out = vec![all.clone()];
            let mut cur = all.clone();
            while !cur.is_empty() {
                cur = derived(br, &all, &cur);
                out.push(cur.clone());
            }
            out
        }
    };
    let complements = ideals.windows(2).map(|w| complement_in(&w[0], &w[1], n)).collect();
    Ok(Filtration { class, ideals, complements })
}

/// Exact check of the filtration certificate: every `R_k` is an ideal and every
/// complement is invariant modulo the next ideal. For semisimple and reductive
/// algebras the top quotient is certified by nondegeneracy of the Killing form
/// on `[g,g]`.
pub fn verify_filtration(br: &Bracket, f: &Filtration) -> bool {
    let n = br.dim();
    let all: Vec<Vector> = (0..n).map(|i| unit(n, i)).collect();
    let ideals_ok = f.ideals.iter().all(|r| span_contains(r, &br.bracket_span(&all, r), n));
    let last_zero = f.ideals.last().is_some_and(Vec::is_empty);
    let compl_ok = f.complements.iter().enumerate().all(|(k, c)| {
        let next = &f.ideals[k + 1];
        match f.class {
            AlgebraClass::Nilpotent | AlgebraClass::Abelian => span_contains(next, &br.bracket_span(&all, c), n),
            AlgebraClass::Semisimple | AlgebraClass::Reductive => {
                let dg = br.bracket_span(&all, &all);
                is_nondegenerate_on(&dg, &br.killing())
            }
        }
    });
    ideals_ok && last_zero && compl_ok
}

/// Block-diagonal direct sum; labels of the second summand get a `'` suffix
/// when they collide.
pub fn direct_sum(g1: &MetricEquivariantAlgebra, g2: &MetricEquivariantAlgebra) -> MetricEquivariantAlgebra {
    let (n1, n2) = (g1.dim(), g2.dim());
    let n = n1 + n2;
    let mut labels = g1.labels.clone();
    for l in &g2.labels {
        let mut l = l.clone();
        while labels.contains(&l) {
            l.push('\'');
        }
        labels.push(l);
    }
    let mut br = Bracket::zero(n);
    let embed = |v: &SparseRow, off: usize| {
        let mut w = zeros(n);
        for (k, x) in v {
            w[k + off] = x.clone();
        }
        w
    };
    for i in 0..n1 {
        for j in i + 1..n1 {
            br.set(i, j, &embed(g1.bracket.get(i, j), 0));
        }
    }
    for i in 0..n2 {
        for j in i + 1..n2 {
            br.set(n1 + i, n1 + j, &embed(g2.bracket.get(i, j), n1));
        }
    }
    MetricEquivariantAlgebra {
        labels,
        bracket: br,
        gram: Mat::block_diag(&[&g1.gram, &g2.gram]),
        d: Mat::block_diag(&[&g1.d, &g2.d]),
        theta: Mat::block_diag(&[&g1.theta, &g2.theta]),
        weak: g1.weak || g2.weak,
    }
}

/// Is the coordinate partition `part | complement` an orthogonal,
/// bracket-closed, `(D, theta)`-invariant splitting into commuting ideals?
pub fn split_check(g: &MetricEquivariantAlgebra, part: &[usize]) -> bool {
    let n = g.dim();
    let mut inside = vec![false; n];
    for &i in part {
        if i >= n {
            return false;
        }
        inside[i] = true;
    }
    let supported = |v: &SparseRow, side: bool| v.iter().all(|(k, _)| inside[*k] == side);
    for i in 0..n {
        for j in 0..n {
            if inside[i] != inside[j] {
                if !g.gram[(i, j)].is_zero() || !g.d[(i, j)].is_zero() || !g.theta[(i, j)].is_zero() {
                    return false;
                }
                if !g.bracket.get(i, j).is_empty() {
                    return false;
                }
            } else if !supported(g.bracket.get(i, j), inside[i]) {
                return false;
            }
        }
    }
    true
}

/// Build an algebra from integer-free parts; mostly for tests and the catalog.
pub fn algebra(
    labels: Vec<String>,
    bracket: Bracket,
    gram: Mat,
    d: Mat,
    theta: Mat,
    weak: bool,
) -> MetricEquivariantAlgebra {
    MetricEquivariantAlgebra { labels, bracket, gram, d, theta, weak }
}

// ---- algebra.v1 -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct AlgebraJson {
    schema: String,
    dim: usize,
    labels: Vec<String>,
    bracket: Vec<(usize, usize, Vec<String>)>,
    gram: Vec<Vec<String>>,
    #[serde(rename = "D")]
    d: Vec<Vec<String>>,
    theta: Vec<Vec<String>>,
    weak: bool,
}

fn mat_strings(m: &Mat) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(fmt_scalar).collect()).collect()
}

fn parse_mat(rows: &[Vec<String>], n: usize, what: &str) -> Result<Mat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("{what} must be {n}x{n}")));
    }
    let data: Result<Vec<Vector>> = rows.iter().map(|r| r.iter().map(|s| parse_scalar(s)).collect()).collect();
    Mat::from_rows(data?)
}

pub fn to_json(g: &MetricEquivariantAlgebra) -> serde_json::Value {
    let n = g.dim();
    let mut br = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let v = g.bracket.get_dense(i, j);
            if !vec_is_zero(&v) {
                br.push((i, j, v.iter().map(fmt_scalar).collect()));
            }
        }
    }
    let j = AlgebraJson {
        schema: "algebra.v1".into(),
        dim: n,
        labels: g.labels.clone(),
        bracket: br,
        gram: mat_strings(&g.gram),
        d: mat_strings(&g.d),
        theta: mat_strings(&g.theta),
        weak: g.weak,
    };
    serde_json::to_value(j).expect("serializable")
}

pub fn from_json(v: &serde_json::Value) -> Result<MetricEquivariantAlgebra> {
    let j: AlgebraJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    if j.schema != "algebra.v1" {
        return Err(Error::Parse(format!("unknown schema {:?}", j.schema)));
    }
    let n = j.dim;
    if j.labels.len() != n {
        return Err(Error::Parse("labels length differs from dim".into()));
    }
    let mut br = Bracket::zero(n);
    for (i, k, coeffs) in &j.bracket {
        if *i >= *k || *k >= n || coeffs.len() != n {
            return Err(Error::Parse(format!("bad bracket entry ({i},{k})")));
        }
        let v: Result<Vector> = coeffs.iter().map(|s| parse_scalar(s)).collect();
        br.set(*i, *k, &v?);
    }
    Ok(MetricEquivariantAlgebra {
        labels: j.labels,
        bracket: br,
        gram: parse_mat(&j.gram, n, "gram")?,
        d: parse_mat(&j.d, n, "D")?,
        theta: parse_mat(&j.theta, n, "theta")?,
        weak: j.weak,
    })
}
