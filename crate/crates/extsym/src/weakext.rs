//! Derivations, second cohomology with values in a radical `R`, central (weak)
//! extensions, automorphisms of quadratic extensions, and the classifiers for
//! weak extensions of Lorentzian triples.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactlin::{
    self, dependencies, fmt_scalar, int, nullspace, parse_scalar, span_basis, span_eq, span_rank,
    to_sparse, unit, vec_is_zero, zeros, Echelon, Mat, Scalar, SparseRow, Vector,
};
use crate::liecore::{grade, sparse_cols, Bracket, MetricEquivariantAlgebra};
use crate::par::par_map;
use crate::quadext::{
    ce_differential, cocycle_act, cochain_inv, is_cochain, is_pair_morphism, pullback_cocycle, wedge_inner, Case,
    CatalogEntry, Form, OrthogonalModule, QuadraticCochain, QuadraticCocycle,
};
use crate::report::{Check, Report};

// ---- derivations ------------------------------------------------------------

fn flat_index(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

/// Basis of `{phi : phi D = D phi, theta phi = -phi theta}` that is
/// antisymmetric for `gram` (when given) and a derivation of `br`.
pub fn equivariant_derivations(br: &Bracket, d: &Mat, theta: &Mat, gram: Option<&Mat>) -> Vec<Mat> {
    let n = br.dim();
    let nn = n * n;
    if n == 0 {
        return vec![];
    }
    let mut ech = Echelon::new(nn);
    let dc = sparse_cols(d);
    let dr = sparse_cols(&d.transpose());
    let tc = sparse_cols(theta);
    let tr = sparse_cols(&theta.transpose());
    let push = |ech: &mut Echelon, terms: Vec<(usize, Scalar)>| {
        let mut acc = std::collections::BTreeMap::<usize, Scalar>::new();
        for (k, v) in terms {
            *acc.entry(k).or_insert_with(Scalar::zero) += v;
        }
        let row: SparseRow = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        if !row.is_empty() {
            ech.insert(row);
        }
    };
    for a in 0..n {
        for b in 0..n {
            // (phi D - D phi)[a][b]
            let mut t = Vec::new();
            for (k, v) in &dc[b] {
                t.push((flat_index(n, a, *k), v.clone()));
            }
            for (k, v) in &dr[a] {
                t.push((flat_index(n, *k, b), -v.clone()));
            }
            push(&mut ech, t);
            // (theta phi + phi theta)[a][b]
            let mut t = Vec::new();
            for (k, v) in &tr[a] {
                t.push((flat_index(n, *k, b), v.clone()));
            }
            for (k, v) in &tc[b] {
                t.push((flat_index(n, a, *k), v.clone()));
            }
            push(&mut ech, t);
        }
    }
    if let Some(g) = gram {
        let gc = sparse_cols(g);
        for a in 0..n {
            for b in a..n {
                // (G phi + phi^T G)[a][b]
                let mut t = Vec::new();
                for (k, v) in &gc[a] {
                    t.push((flat_index(n, *k, b), v.clone()));
                }
                for (k, v) in &gc[b] {
                    t.push((flat_index(n, *k, a), v.clone()));
                }
                push(&mut ech, t);
            }
        }
    }
    let candidates: Vec<Mat> = ech.nullspace().into_iter().map(|v| Mat::from_flat(n, n, v)).collect();
    if candidates.is_empty() || br.is_abelian() {
        return candidates;
    }
    let defects: Vec<SparseRow> = par_map(&candidates, |phi| derivation_defect(br, phi));
    let width = n * n * n;
    dependencies(&defects, width).into_iter().map(|c| combine(&candidates, &c)).collect()
}

/// `phi[x,y] - [phi x, y] - [x, phi y]` on basis pairs, flattened.
fn derivation_defect(br: &Bracket, phi: &Mat) -> SparseRow {
    let n = br.dim();
    let cols = sparse_cols(phi);
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut v = zeros(n);
            for (k, c) in br.get(i, j) {
                for (m, x) in &cols[*k] {
                    v[*m] += c * x;
                }
            }
            for (m, x) in &cols[i] {
                for (k, c) in br.get(*m, j) {
                    v[*k] -= x * c;
                }
            }
            for (m, x) in &cols[j] {
                for (k, c) in br.get(i, *m) {
                    v[*k] -= x * c;
                }
            }
            for (k, x) in v.into_iter().enumerate() {
                if !x.is_zero() {
                    out.push(((i * n + j) * n + k, x));
                }
            }
        }
    }
    out
}

fn combine(ms: &[Mat], c: &[Scalar]) -> Mat {
    let mut out = Mat::zeros(ms[0].rows(), ms[0].cols());
    for (m, x) in ms.iter().zip(c) {
        if !x.is_zero() {
            out = out.add(&m.scale(x));
        }
    }
    out
}

/// `Der(g)^D_-` together with the inner part `ad(g_-^+)`.
#[derive(Clone, Debug)]
pub struct DerivationSpace {
    pub basis: Vec<Mat>,
    pub inner_basis: Vec<Mat>,
    /// Result of comparing with the block-form computation, when it was run.
    pub routes_agree: Option<bool>,
}

impl DerivationSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn inner_dim(&self) -> usize {
        span_rank(&self.inner_basis.iter().map(Mat::flatten).collect::<Vec<_>>())
    }

    pub fn out_dim(&self) -> usize {
        self.dim() - self.inner_dim()
    }

    /// Basis elements completing `ad(g_-^+)` to a basis of the derivation space.
    pub fn outer_representatives(&self) -> Vec<Mat> {
        let Some(first) = self.basis.first() else { return vec![] };
        let mut ech = Echelon::new(first.rows() * first.cols());
        for m in &self.inner_basis {
            ech.insert_dense(&m.flatten());
        }
        self.basis.iter().filter(|m| ech.insert_dense(&m.flatten())).cloned().collect()
    }

    pub fn contains(&self, phi: &Mat) -> bool {
        let flat: Vec<Vector> = self.basis.iter().map(Mat::flatten).collect();
        let n = phi.rows() * phi.cols();
        exactlin::span_contains(&flat, &[phi.flatten()], n)
    }
}

/// Generic computation from the stacked linear conditions.
pub fn derivation_space(g: &MetricEquivariantAlgebra) -> Result<DerivationSpace> {
    let gr = grade(g)?;
    let basis = equivariant_derivations(&g.bracket, &g.d, &g.theta, Some(&g.gram));
    let inner_basis = gr.mp.iter().map(|v| g.bracket.ad(v)).collect();
    Ok(DerivationSpace { basis, inner_basis, routes_agree: None })
}

/// Generic computation cross-checked against the block form on `l* + a + l`.
pub fn derivation_space_checked(entry: &CatalogEntry) -> Result<DerivationSpace> {
    let g = entry.build();
    let mut ds = derivation_space(&g)?;
    let block = block_derivations(&entry.l.bracket, &entry.l.d, &entry.l.theta, &entry.a, &entry.z);
    let n = g.dim();
    let a: Vec<Vector> = ds.basis.iter().map(Mat::flatten).collect();
    let b: Vec<Vector> = block.iter().map(Mat::flatten).collect();
    ds.routes_agree = Some(span_eq(&a, &b, n * n));
    Ok(ds)
}

fn form1_of_mat(m: &Mat) -> Form {
    Form::from_fn(m.cols(), 1, m.rows(), |idx| m.col(idx[0]))
}

fn form2_of_mat(m: &Mat) -> Form {
    Form::from_fn(m.rows(), 2, 1, |idx| vec![m[(idx[0], idx[1])].clone()])
}

/// Assemble `phi(S, U, tau, sigma)` on `l* + a + l`.
pub fn assemble_phi(s: &Mat, u: &Mat, tau: &Mat, sigma: &Mat, gram_a: &Mat) -> Mat {
    let nl = s.rows();
    let na = u.rows();
    let n = 2 * nl + na;
    let mut phi = Mat::zeros(n, n);
    phi.set_block(0, 0, &s.transpose().neg());
    phi.set_block(0, nl, &tau.transpose().mul(gram_a).neg());
    // sigma-bar(L_i)(L_k) = sigma(L_i, L_k)
    phi.set_block(0, nl + na, &sigma.transpose());
    phi.set_block(nl, nl, &u.neg());
    phi.set_block(nl, nl + na, tau);
    phi.set_block(nl + na, nl + na, s);
    phi
}

/// Block-form computation: solve for `(S^, U^, tau^, sigma^)` directly on the
/// data `(l, a, alpha, gamma)`.
pub fn block_derivations(
    br: &Bracket,
    dl: &Mat,
    thl: &Mat,
    a: &OrthogonalModule,
    z: &QuadraticCocycle,
) -> Vec<Mat> {
    let nl = br.dim();
    let na = a.dim();
    let s_cands = equivariant_derivations(br, dl, thl, None);
    let u_cands = equivariant_derivations(&Bracket::zero(na), &a.d, &a.theta, Some(&a.gram));
    // tau: theta_a tau theta_l = -tau, tau D_l = D_a tau
    let tau_cands: Vec<Mat> = {
        let m = na * nl;
        let mut rows = Vec::new();
        for t in 0..m {
            let e = Mat::from_flat(na, nl, unit(m, t));
            let r1 = a.theta.mul(&e).mul(thl).add(&e);
            let r2 = e.mul(dl).sub(&a.d.mul(&e));
            let mut col = r1.flatten();
            col.extend(r2.flatten());
            rows.push(col);
        }
        if m == 0 {
            vec![]
        } else {
            nullspace(&Mat::from_cols(&rows, 2 * m)).into_iter().map(|v| Mat::from_flat(na, nl, v)).collect()
        }
    };
    // sigma: antisymmetric, theta^T s theta = -s, D^T s + s D = 0
    let sigma_cands: Vec<Mat> = {
        let m = nl * nl;
        let mut cols = Vec::new();
        for t in 0..m {
            let e = Mat::from_flat(nl, nl, unit(m, t));
            let mut col = e.add(&e.transpose()).flatten();
            col.extend(thl.transpose().mul(&e).mul(thl).add(&e).flatten());
            col.extend(dl.transpose().mul(&e).add(&e.mul(dl)).flatten());
            cols.push(col);
        }
        if m == 0 {
            vec![]
        } else {
            nullspace(&Mat::from_cols(&cols, 3 * m)).into_iter().map(|v| Mat::from_flat(nl, nl, v)).collect()
        }
    };
    let zero_s = Mat::zeros(nl, nl);
    let zero_u = Mat::zeros(na, na);
    let zero_t = Mat::zeros(na, nl);
    let mut pieces: Vec<(Mat, Mat, Mat, Mat)> = Vec::new();
    pieces.extend(s_cands.iter().map(|s| (s.clone(), zero_u.clone(), zero_t.clone(), zero_s.clone())));
    pieces.extend(u_cands.iter().map(|u| (zero_s.clone(), u.clone(), zero_t.clone(), zero_s.clone())));
    pieces.extend(tau_cands.iter().map(|t| (zero_s.clone(), zero_u.clone(), t.clone(), zero_s.clone())));
    pieces.extend(sigma_cands.iter().map(|s| (zero_s.clone(), zero_u.clone(), zero_t.clone(), s.clone())));
    if pieces.is_empty() {
        return vec![];
    }
    let residuals: Vec<SparseRow> = par_map(&pieces, |(s, u, t, sg)| coupled_residual(br, a, z, s, u, t, sg));
    let width = nl * na * na + nl * nl * na + nl * nl * nl;
    dependencies(&residuals, width)
        .into_iter()
        .map(|c| {
            let mut s = zero_s.clone();
            let mut u = zero_u.clone();
            let mut t = zero_t.clone();
            let mut sg = zero_s.clone();
            for (p, x) in pieces.iter().zip(&c) {
                if x.is_zero() {
                    continue;
                }
                s = s.add(&p.0.scale(x));
                u = u.add(&p.1.scale(x));
                t = t.add(&p.2.scale(x));
                sg = sg.add(&p.3.scale(x));
            }
            assemble_phi(&s, &u, &t, &sg, &a.gram)
        })
        .collect()
}

/// Residuals of `rho(S L) = [rho(L), U]` and of the two cocycle-compatibility
/// equations, flattened.
fn coupled_residual(
    br: &Bracket,
    a: &OrthogonalModule,
    z: &QuadraticCocycle,
    s: &Mat,
    u: &Mat,
    t: &Mat,
    sg: &Mat,
) -> SparseRow {
    let nl = br.dim();
    let na = a.dim();
    let mut out: Vector = Vec::with_capacity(nl * na * na + nl * nl * na + nl * nl * nl);
    for i in 0..nl {
        let mut rs = Mat::zeros(na, na);
        for (k, c) in s.col(i).iter().enumerate() {
            if !c.is_zero() {
                rs = rs.add(&a.rho[k].scale(c));
            }
        }
        out.extend(rs.sub(&a.rho[i].commutator(u)).flatten());
    }
    let tau = form1_of_mat(t);
    let dtau = ce_differential(br, Some(&a.rho), &tau);
    let alpha_s = z.alpha.derivative_action(s, None).scale(&-Scalar::one());
    // U alpha + alpha(S.,.) + alpha(.,S.) + d tau
    let lhs1 = z.alpha.push(u).add(&alpha_s).add(&dtau);
    for i in 0..nl {
        for j in 0..nl {
            out.extend(lhs1.at(&[i, j]).iter().cloned());
        }
    }
    let gamma_s = z.gamma.derivative_action(s, None).scale(&-Scalar::one());
    let dsig = ce_differential(br, None, &form2_of_mat(sg));
    let lhs2 = gamma_s.add(&dsig).add(&wedge_inner(&z.alpha, &tau, &a.gram));
    for i in 0..nl {
        for j in 0..nl {
            for k in 0..nl {
                out.push(lhs2.at1(&[i, j, k]).clone());
            }
        }
    }
    to_sparse(&out)
}

// ---- second cohomology ------------------------------------------------------

/// `omega_phi = <phi(.), .>` as a matrix: `omega[i][j] = <phi e_i, e_j>`.
pub fn omega_of(phi: &Mat, gram: &Mat) -> Mat {
    phi.transpose().mul(gram)
}

/// `R`-valued 2-form with components `omegas[k]`.
pub fn omega_form(omegas: &[Mat]) -> Form {
    let n = omegas.first().map_or(0, Mat::rows);
    Form::from_fn(n, 2, omegas.len(), |idx| omegas.iter().map(|w| w[(idx[0], idx[1])].clone()).collect())
}

/// Component `k` of an `R`-valued 2-form as a matrix.
pub fn omega_component(w: &Form, k: usize) -> Mat {
    let n = w.base_dim();
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = w.at(&[i, j])[k].clone();
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct H2Data {
    pub out_dim: usize,
    pub r_dim: usize,
    /// `omega_phi (x) r_k` for outer representatives `phi` and a basis `r_k` of `R`.
    pub representatives: Vec<Form>,
}

impl H2Data {
    pub fn dim(&self) -> usize {
        self.out_dim * self.r_dim
    }
}

pub fn out_and_h2(g: &MetricEquivariantAlgebra, ds: &DerivationSpace, r_dim: usize) -> H2Data {
    let outer = ds.outer_representatives();
    let n = g.dim();
    let mut reps = Vec::new();
    for phi in &outer {
        let w = omega_of(phi, &g.gram);
        for k in 0..r_dim {
            let comps: Vec<Mat> = (0..r_dim).map(|j| if j == k { w.clone() } else { Mat::zeros(n, n) }).collect();
            reps.push(omega_form(&comps));
        }
    }
    H2Data { out_dim: outer.len(), r_dim, representatives: reps }
}

// ---- central extensions -----------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralExtensionDatum {
    pub r_dim: usize,
    pub omega: Form,
}

impl CentralExtensionDatum {
    pub fn zero(n: usize, r_dim: usize) -> Self {
        CentralExtensionDatum { r_dim, omega: Form::zero(n, 2, r_dim) }
    }
}

/// Named checks of closedness and invariance of `omega`.
pub fn check_datum(g: &MetricEquivariantAlgebra, datum: &CentralExtensionDatum) -> Report {
    let mut r = Report::default();
    let w = &datum.omega;
    let shape = w.base_dim() == g.dim() && w.degree() == 2 && w.value_dim() == datum.r_dim;
    r.push(Check::new("omega-shape", shape, ""));
    if !shape {
        return r;
    }
    r.push(Check::new("omega-closed", ce_differential(&g.bracket, None, w).is_zero(), ""));
    r.push(Check::new("omega-theta-odd", w.pullback(&g.theta) == w.scale(&-Scalar::one()), "theta^* omega = -omega"));
    r.push(Check::new("omega-D-invariant", w.derivative_action(&g.d, None).is_zero(), "omega(Dx,y) + omega(x,Dy) = 0"));
    r
}

#[derive(Clone, Debug)]
pub struct CentralExtension {
    pub algebra: MetricEquivariantAlgebra,
    pub full: bool,
    pub kernel_dim: usize,
    pub image_dim: usize,
}

/// `R + g` with `[x,y]~ = omega(x,y) + [x,y]`, zero inner product on `R`,
/// `theta = -Id` and `D = 0` on `R`.
pub fn central_extension(g: &MetricEquivariantAlgebra, datum: &CentralExtensionDatum) -> Result<CentralExtension> {
    let rep = check_datum(g, datum);
    if !rep.all_pass() {
        let names: Vec<String> = rep.failures().iter().map(|c| c.name.clone()).collect();
        return Err(Error::Precondition(format!("central extension datum: {}", names.join(", "))));
    }
    let n = g.dim();
    let r = datum.r_dim;
    let m = n + r;
    let mut br = Bracket::zero(m);
    for i in 0..n {
        for j in i + 1..n {
            let mut v = zeros(m);
            for (k, x) in datum.omega.at(&[i, j]).iter().enumerate() {
                v[k] = x.clone();
            }
            for (k, x) in g.bracket.get(i, j) {
                v[r + k] = x.clone();
            }
            if !vec_is_zero(&v) {
                br.set(r + i, r + j, &v);
            }
        }
    }
    let mut labels: Vec<String> = (1..=r)
        .map(|k| {
            let mut s = format!("R{k}");
            while g.labels.contains(&s) {
                s.push('\'');
            }
            s
        })
        .collect();
    labels.extend(g.labels.iter().cloned());
    let algebra = MetricEquivariantAlgebra {
        labels,
        bracket: br,
        gram: Mat::block_diag(&[&Mat::zeros(r, r), &g.gram]),
        d: Mat::block_diag(&[&Mat::zeros(r, r), &g.d]),
        theta: Mat::block_diag(&[&Mat::identity(r).neg(), &g.theta]),
        weak: true,
    };
    let (kernel_dim, image_dim) = kernel_image(g, &datum.omega)?;
    Ok(CentralExtension { algebra, full: image_dim == r, kernel_dim, image_dim })
}

/// Kernel of `[,]` on `g_-^- (x) g_+^-` and the dimension of its image under `omega`.
fn kernel_image(g: &MetricEquivariantAlgebra, omega: &Form) -> Result<(usize, usize)> {
    let gr = grade(g)?;
    let n = g.dim();
    let r = omega.value_dim();
    let (xs, ys) = (&gr.mm, &gr.pm);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for x in xs {
        for y in ys {
            cols.push(g.bracket.apply(x, y));
            let mut w = zeros(r);
            for i in 0..n {
                if x[i].is_zero() {
                    continue;
                }
                for j in 0..n {
                    if y[j].is_zero() {
                        continue;
                    }
                    exactlin::axpy(&mut w, &(&x[i] * &y[j]), omega.at(&[i, j]));
                }
            }
            vals.push(w);
        }
    }
    if cols.is_empty() {
        return Ok((0, 0));
    }
    let sparse: Vec<SparseRow> = cols.iter().map(|c| to_sparse(c)).collect();
    let kernel = dependencies(&sparse, n);
    let images: Vec<Vector> = kernel
        .iter()
        .map(|c| {
            let mut w = zeros(r);
            for (k, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    exactlin::axpy(&mut w, x, &vals[k]);
                }
            }
            w
        })
        .collect();
    Ok((kernel.len(), if r == 0 { 0 } else { span_basis(&images, r).len() }))
}

// ---- automorphisms of quadratic extensions ----------------------------------

/// `F(S, U, tau, sigma)` as a matrix on `l* + a + l`.
pub fn assemble_f(s: &Mat, u: &Mat, tau: &Mat, sigma: &Mat, gram_a: &Mat) -> Result<Mat> {
    let nl = s.rows();
    let na = u.rows();
    let n = 2 * nl + na;
    let s_inv = s.inverse()?.ok_or_else(|| Error::Precondition("S is not invertible".into()))?;
    let u_inv = u.inverse()?.ok_or_else(|| Error::Precondition("U is not invertible".into()))?;
    let mut left = Mat::zeros(n, n);
    left.set_block(0, 0, &s_inv.transpose());
    left.set_block(nl, nl, &u_inv);
    left.set_block(nl + na, nl + na, s);
    let tau_star = tau.transpose().mul(gram_a);
    let mut right = Mat::identity(n);
    right.set_block(0, nl, &tau_star.neg());
    let sig_bar = sigma.transpose();
    let half = exactlin::frac(1, 2);
    right.set_block(0, nl + na, &sig_bar.sub(&tau_star.mul(tau).scale(&half)));
    right.set_block(nl, nl + na, tau);
    Ok(left.mul(&right))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismCheck {
    /// `F` preserves bracket, inner product, `D` and `theta`.
    pub direct: bool,
    /// Pair isomorphism, invariant cochain, and `(S,U)^*(alpha,gamma) = (alpha,gamma)(tau,sigma)^{-1}`.
    pub conditions: bool,
}

impl AutomorphismCheck {
    pub fn agree(&self) -> bool {
        self.direct == self.conditions
    }

    pub fn holds(&self) -> bool {
        self.direct && self.conditions
    }
}

pub fn automorphism_check(entry: &CatalogEntry, s: &Mat, u: &Mat, tau: &Mat, sigma: &Mat) -> Result<AutomorphismCheck> {
    let nl = entry.l.dim();
    let na = entry.a.dim();
    let shapes = s.rows() == nl
        && s.cols() == nl
        && u.rows() == na
        && u.cols() == na
        && tau.rows() == na
        && tau.cols() == nl
        && sigma.rows() == nl
        && sigma.cols() == nl;
    if !shapes {
        return Err(Error::Dimension("automorphism data do not match l and a".into()));
    }
    let g = entry.build();
    let direct = match assemble_f(s, u, tau, sigma, &entry.a.gram) {
        Ok(f) => {
            g.bracket.is_automorphism(&f)
                && f.transpose().mul(&g.gram).mul(&f) == g.gram
                && f.mul(&g.d) == g.d.mul(&f)
                && f.mul(&g.theta) == g.theta.mul(&f)
        }
        Err(_) => false,
    };
    let conditions = sigma.add(&sigma.transpose()).is_zero() && {
        let c = QuadraticCochain { tau: form1_of_mat(tau), sigma: form2_of_mat(sigma) };
        is_pair_morphism(&entry.l, &entry.a, s, u)
            && is_cochain(&entry.l, &entry.a, &c)
            && pullback_cocycle(&entry.z, s, u) == cocycle_act(&entry.l, &entry.a, &entry.z, &cochain_inv(&c))
    };
    Ok(AutomorphismCheck { direct, conditions })
}

// ---- classifier data --------------------------------------------------------

/// Coordinates of an `R`-valued class. `R`-valued symmetric forms are stored
/// componentwise (`b[k]` is the k-th component), tensors in `a (x) R` as
/// `dim a x dim R` matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassifierDatum {
    /// `B in S^2(a_-, R)`; `gram` is the inner product on `a_-`.
    RiemannB { gram: Mat, b: Vec<Mat> },
    /// `(r0, B, eta) in R + S^2((a0)_-, R) + (a0)_- (x) R`, orthonormal basis of `(a0)_-`.
    LorentzRBeta { r0: Vector, b: Vec<Mat>, eta: Mat },
    /// `(B1, B2, B) in Hom(V (x) V^, R) + S^2(W, R) + S^2((a0)_-, R)`.
    LorentzB1B2B { b1: Vec<Mat>, b2: Vec<Mat>, b: Vec<Mat> },
}

impl ClassifierDatum {
    pub fn shape(&self) -> &'static str {
        match self {
            ClassifierDatum::RiemannB { .. } => "riemann-B",
            ClassifierDatum::LorentzRBeta { .. } => "lorentz-rBeta",
            ClassifierDatum::LorentzB1B2B { .. } => "lorentz-B1B2B",
        }
    }

    pub fn r_dim(&self) -> usize {
        match self {
            ClassifierDatum::RiemannB { b, .. } => b.len(),
            ClassifierDatum::LorentzRBeta { r0, .. } => r0.len(),
            ClassifierDatum::LorentzB1B2B { b, .. } => b.len(),
        }
    }

    /// Symmetry and dimension consistency.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Precondition(format!("{}: {m}", self.shape())));
        let sym_family = |bs: &[Mat], n: usize| bs.iter().all(|m| m.rows() == n && m.cols() == n && m.is_symmetric());
        match self {
            ClassifierDatum::RiemannB { gram, b } => {
                if !gram.is_symmetric() || exactlin::rank(gram) != gram.rows() {
                    return bad("gram must be symmetric and nondegenerate");
                }
                if !sym_family(b, gram.rows()) {
                    return bad("B components must be symmetric of the size of a_-");
                }
            }
            ClassifierDatum::LorentzRBeta { r0, b, eta } => {
                let n = eta.rows();
                if eta.cols() != r0.len() || b.len() != r0.len() || !sym_family(b, n) {
                    return bad("r0, B and eta disagree on dim R or dim (a0)_-");
                }
            }
            ClassifierDatum::LorentzB1B2B { b1, b2, b } => {
                let r = b.len();
                if b1.len() != r || b2.len() != r {
                    return bad("components disagree on dim R");
                }
                if let Some(f) = b1.first() {
                    if b1.iter().any(|m| m.rows() != f.rows() || m.cols() != f.cols()) {
                        return bad("B1 components differ in shape");
                    }
                }
                let w = b2.first().map_or(0, Mat::rows);
                let n = b.first().map_or(0, Mat::rows);
                if !sym_family(b2, w) || !sym_family(b, n) {
                    return bad("B2 and B must be symmetric");
                }
            }
        }
        Ok(())
    }
}

/// Group elements acting on the right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassifierGroupElement {
    /// `(U, g) in O(a_-) x GL(R)`.
    Orthogonal { u: Mat, g: Mat },
    /// `((U, a), g) in Iso((a0)_-) x GL(R)`.
    Affine { u: Mat, a: Vector, g: Mat },
    /// `((U_V, U_V^, U_W), U_0, g)`.
    Block { u_v: Mat, u_vhat: Mat, u_w: Mat, u0: Mat, g: Mat },
}

impl ClassifierGroupElement {
    pub fn compose(&self, other: &ClassifierGroupElement) -> Result<ClassifierGroupElement> {
        use ClassifierGroupElement::*;
        Ok(match (self, other) {
            (Orthogonal { u: u1, g: g1 }, Orthogonal { u: u2, g: g2 }) => Orthogonal { u: u1.mul(u2), g: g1.mul(g2) },
            (Affine { u: u1, a: a1, g: g1 }, Affine { u: u2, a: a2, g: g2 }) => {
                Affine { u: u1.mul(u2), a: exactlin::vec_add(a1, &u1.mul_vec(a2)), g: g1.mul(g2) }
            }
            (
                Block { u_v: v1, u_vhat: h1, u_w: w1, u0: o1, g: g1 },
                Block { u_v: v2, u_vhat: h2, u_w: w2, u0: o2, g: g2 },
            ) => Block { u_v: v1.mul(v2), u_vhat: h1.mul(h2), u_w: w1.mul(w2), u0: o1.mul(o2), g: g1.mul(g2) },
            _ => return Err(Error::Precondition("group elements of different shapes".into())),
        })
    }
}

fn pull_sym(bs: &[Mat], u: &Mat) -> Vec<Mat> {
    bs.iter().map(|b| u.transpose().mul(b).mul(u)).collect()
}

fn pull_bilinear(bs: &[Mat], u1: &Mat, u2: &Mat) -> Vec<Mat> {
    bs.iter().map(|b| u1.transpose().mul(b).mul(u2)).collect()
}

/// Apply `g^{-1}` to the values of a family of components.
fn act_values(bs: &[Mat], g_inv: &Mat) -> Vec<Mat> {
    (0..bs.len())
        .map(|k| {
            let mut out = Mat::zeros(bs[k].rows(), bs[k].cols());
            for (j, b) in bs.iter().enumerate() {
                let c = &g_inv[(k, j)];
                if !c.is_zero() {
                    out = out.add(&b.scale(c));
                }
            }
            out
        })
        .collect()
}

fn invert(m: &Mat, what: &str) -> Result<Mat> {
    m.inverse()?.ok_or_else(|| Error::Precondition(format!("{what} is not invertible")))
}

/// Right action of the classifier group.
pub fn act_on_classifier(x: &ClassifierDatum, h: &ClassifierGroupElement) -> Result<ClassifierDatum> {
    use ClassifierDatum::*;
    use ClassifierGroupElement::*;
    x.validate()?;
    match (x, h) {
        (RiemannB { gram, b }, Orthogonal { u, g }) => {
            if u.transpose().mul(gram).mul(u) != *gram {
                return Err(Error::Precondition("U is not orthogonal".into()));
            }
            let gi = invert(g, "g")?;
            Ok(RiemannB { gram: gram.clone(), b: act_values(&pull_sym(b, u), &gi) })
        }
        (LorentzRBeta { r0, b, eta }, Affine { u, a, g }) => {
            if !u.transpose().mul(u).is_identity() {
                return Err(Error::Precondition("U is not orthogonal".into()));
            }
            let gi = invert(g, "g")?;
            let r = r0.len();
            let n = eta.rows();
            // eta - B(a, .)^# - a (x) r0, then U^{-1}
            let mut e = eta.clone();
            for k in 0..r {
                let ba = b[k].mul_vec(a);
                for i in 0..n {
                    e[(i, k)] = &e[(i, k)] - &ba[i] - &a[i] * &r0[k];
                }
            }
            let e = u.transpose().mul(&e).mul(&gi.transpose());
            Ok(LorentzRBeta { r0: gi.mul_vec(r0), b: act_values(&pull_sym(b, u), &gi), eta: e })
        }
        (LorentzB1B2B { b1, b2, b }, Block { u_v, u_vhat, u_w, u0, g }) => {
            for m in [u_v, u_vhat, u_w, u0] {
                if !m.transpose().mul(m).is_identity() {
                    return Err(Error::Precondition("block element is not orthogonal".into()));
                }
            }
            let gi = invert(g, "g")?;
            Ok(LorentzB1B2B {
                b1: act_values(&pull_bilinear(b1, u_v, u_vhat), &gi),
                b2: act_values(&pull_sym(b2, u_w), &gi),
                b: act_values(&pull_sym(b, u0), &gi),
            })
        }
        _ => Err(Error::Precondition("datum and group element have different shapes".into())),
    }
}

// ---- decomposability --------------------------------------------------------

/// `R = r1 + r2`, `a = a1 + a2` (orthogonal) and, for the affine shape, the
/// shift `a2_shift in a2` used to absorb `eta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionWitness {
    pub a1: Vec<Vector>,
    pub a2: Vec<Vector>,
    pub r1: Vec<Vector>,
    pub r2: Vec<Vector>,
    pub a2_shift: Option<Vector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposability {
    Indecomposable,
    Decomposable(DecompositionWitness),
    Undecided(String),
}

impl Decomposability {
    pub fn label(&self) -> &'static str {
        match self {
            Decomposability::Indecomposable => "indecomposable",
            Decomposability::Decomposable(_) => "decomposable",
            Decomposability::Undecided(_) => "undecided",
        }
    }
}

fn values_at(bs: &[Mat], x: &[Scalar], y: &[Scalar]) -> Vector {
    bs.iter().map(|b| b.bilinear(x, y)).collect()
}

fn in_span(basis: &[Vector], v: &[Scalar]) -> bool {
    vec_is_zero(v) || (!basis.is_empty() && exactlin::span_contains(basis, &[v.to_vec()], v.len()))
}

fn a_gram(x: &ClassifierDatum) -> Mat {
    match x {
        ClassifierDatum::RiemannB { gram, .. } => gram.clone(),
        ClassifierDatum::LorentzRBeta { eta, .. } => Mat::identity(eta.rows()),
        ClassifierDatum::LorentzB1B2B { b, .. } => Mat::identity(b.first().map_or(0, Mat::rows)),
    }
}

fn main_b(x: &ClassifierDatum) -> &[Mat] {
    match x {
        ClassifierDatum::RiemannB { b, .. } | ClassifierDatum::LorentzRBeta { b, .. } | ClassifierDatum::LorentzB1B2B { b, .. } => b,
    }
}

fn a_dim(x: &ClassifierDatum) -> usize {
    a_gram(x).rows()
}

/// Exact check of a decomposition witness.
pub fn check_witness(x: &ClassifierDatum, w: &DecompositionWitness) -> bool {
    let n = a_dim(x);
    let r = x.r_dim();
    let gram = a_gram(x);
    let mut all_a = w.a1.clone();
    all_a.extend(w.a2.iter().cloned());
    let mut all_r = w.r1.clone();
    all_r.extend(w.r2.iter().cloned());
    if span_rank(&all_a) != n || all_a.len() != n || span_rank(&all_r) != r || all_r.len() != r {
        return false;
    }
    if w.a1.iter().any(|u| w.a2.iter().any(|v| !gram.bilinear(u, v).is_zero())) {
        return false;
    }
    if w.a2.is_empty() && w.r2.is_empty() {
        return false;
    }
    if matches!(x, ClassifierDatum::RiemannB { .. }) && w.a1.is_empty() && w.r1.is_empty() {
        return false;
    }
    let b = main_b(x);
    let pairs_ok = |xs: &[Vector], ys: &[Vector], target: Option<&[Vector]>| {
        xs.iter().all(|u| {
            ys.iter().all(|v| {
                let val = values_at(b, u, v);
                match target {
                    Some(t) => in_span(t, &val),
                    None => vec_is_zero(&val),
                }
            })
        })
    };
    if !(pairs_ok(&w.a1, &w.a1, Some(&w.r1)) && pairs_ok(&w.a2, &w.a2, Some(&w.r2)) && pairs_ok(&w.a1, &w.a2, None)) {
        return false;
    }
    match x {
        ClassifierDatum::RiemannB { .. } => true,
        ClassifierDatum::LorentzB1B2B { b1, b2, .. } => {
            let vals_ok = |bs: &[Mat]| {
                bs.first().is_none_or(|f| {
                    (0..f.rows()).all(|i| {
                        (0..f.cols()).all(|j| {
                            let v: Vector = bs.iter().map(|m| m[(i, j)].clone()).collect();
                            in_span(&w.r1, &v)
                        })
                    })
                })
            };
            vals_ok(b1) && vals_ok(b2)
        }
        ClassifierDatum::LorentzRBeta { r0, b, eta } => {
            if !in_span(&w.r1, r0) {
                return false;
            }
            let shift = w.a2_shift.clone().unwrap_or_else(|| zeros(n));
            if !in_span(&w.a2, &shift) {
                return false;
            }
            // eta - shift (x) r0 - B(shift, .) in a1 (x) r1
            let mut rest = eta.clone();
            for k in 0..r {
                let bs = b[k].mul_vec(&shift);
                for i in 0..n {
                    rest[(i, k)] = &rest[(i, k)] - &shift[i] * &r0[k] - &bs[i];
                }
            }
            let tensors: Vec<Vector> = w
                .a1
                .iter()
                .flat_map(|u| w.r1.iter().map(move |q| Mat::from_cols(&[u.clone()], n).mul(&Mat::from_rows(vec![q.clone()]).expect("row")).flatten()))
                .collect();
            in_span(&tensors, &rest.flatten())
        }
    }
}

fn common_kernel(bs: &[Mat], n: usize) -> Vec<Vector> {
    let rows: Vec<Vector> = bs.iter().flat_map(|b| b.row_vecs()).collect();
    if rows.is_empty() {
        return (0..n).map(|i| unit(n, i)).collect();
    }
    nullspace(&Mat::from_rows(rows).expect("uniform"))
}

/// A non-null vector of `span(vs)` for `gram`, if there is one.
fn non_null_vector(vs: &[Vector], gram: &Mat) -> Option<Vector> {
    for v in vs {
        if !gram.bilinear(v, v).is_zero() {
            return Some(v.clone());
        }
    }
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let s = exactlin::vec_add(&vs[i], &vs[j]);
            if !gram.bilinear(&s, &s).is_zero() {
                return Some(s);
            }
        }
    }
    None
}

fn complement_of_line(v: &[Scalar], gram: &Mat) -> Vec<Vector> {
    exactlin::orthogonal_complement(&[v.to_vec()], gram)
}

/// Bound on `dim a + dim R` for the coordinate search.
pub const SEARCH_BOUND: usize = 14;

pub fn is_indecomposable_datum(x: &ClassifierDatum) -> Result<Decomposability> {
    x.validate()?;
    let n = a_dim(x);
    let r = x.r_dim();
    let gram = a_gram(x);
    let b = main_b(x);
    let everything: Vec<Vector> = (0..n).map(|i| unit(n, i)).collect();
    let r_all: Vec<Vector> = (0..r).map(|i| unit(r, i)).collect();
    let decided = |w: DecompositionWitness| {
        debug_assert!(check_witness(x, &w), "{w:?}");
        Ok(Decomposability::Decomposable(w))
    };
    if r == 1 {
        let ker = common_kernel(b, n);
        match x {
            ClassifierDatum::RiemannB { .. } | ClassifierDatum::LorentzB1B2B { .. } => {
                if let Some(v) = non_null_vector(&ker, &gram) {
                    let w = DecompositionWitness {
                        a1: complement_of_line(&v, &gram),
                        a2: vec![v],
                        r1: r_all.clone(),
                        r2: vec![],
                        a2_shift: None,
                    };
                    return decided(w);
                }
                if let ClassifierDatum::LorentzB1B2B { b1, b2, .. } = x {
                    if b1.iter().chain(b2).all(Mat::is_zero) {
                        return decided(DecompositionWitness {
                            a1: vec![],
                            a2: everything,
                            r1: vec![],
                            r2: r_all,
                            a2_shift: None,
                        });
                    }
                }
                Ok(Decomposability::Indecomposable)
            }
            ClassifierDatum::LorentzRBeta { r0, eta, .. } => {
                let r0v = &r0[0];
                let e = eta.col(0);
                let cands: Vec<Vector> = if r0v.is_zero() {
                    let perp = exactlin::orthogonal_complement(&[e.clone()], &gram);
                    exactlin::intersection(&ker, &perp, n)
                } else {
                    ker.clone()
                };
                if let Some(v) = cands.first() {
                    let shift = if r0v.is_zero() {
                        zeros(n)
                    } else {
                        let c = gram.bilinear(&e, v) / (r0v * gram.bilinear(v, v));
                        exactlin::vec_scale(v, &c)
                    };
                    return decided(DecompositionWitness {
                        a1: complement_of_line(v, &gram),
                        a2: vec![v.clone()],
                        r1: r_all,
                        r2: vec![],
                        a2_shift: Some(shift),
                    });
                }
                if r0v.is_zero() {
                    if let Some(sol) = exactlin::solve(&b[0], &e)? {
                        return decided(DecompositionWitness {
                            a1: vec![],
                            a2: everything,
                            r1: vec![],
                            r2: r_all,
                            a2_shift: Some(sol),
                        });
                    }
                }
                Ok(Decomposability::Indecomposable)
            }
        }
    } else {
        coordinate_search(x, n, r)
    }
}

/// Try every split of the coordinate bases of `a` and `R`; a hit is a
/// checked witness, a miss is reported as undecided.
fn coordinate_search(x: &ClassifierDatum, n: usize, r: usize) -> Result<Decomposability> {
    if n + r > SEARCH_BOUND {
        return Ok(Decomposability::Undecided(format!("dim a + dim R = {} exceeds the search bound {SEARCH_BOUND}", n + r)));
    }
    let gram = a_gram(x);
    let masks: Vec<(u32, u32)> = (0..1u32 << n).flat_map(|am| (0..1u32 << r).map(move |rm| (am, rm))).collect();
    let found = crate::par::par_map(&masks, |&(am, rm)| {
        let pick = |mask: u32, dim: usize, inside: bool| -> Vec<Vector> {
            (0..dim).filter(|i| ((mask >> i) & 1 == 1) == inside).map(|i| unit(dim, i)).collect()
        };
        let (a1, a2) = (pick(am, n, true), pick(am, n, false));
        let (r1, r2) = (pick(rm, r, true), pick(rm, r, false));
        let mut w = DecompositionWitness { a1, a2, r1, r2, a2_shift: None };
        if let ClassifierDatum::LorentzRBeta { .. } = x {
            w.a2_shift = solve_shift(x, &w, &gram);
            w.a2_shift.as_ref()?;
        }
        check_witness(x, &w).then_some(w)
    });
    Ok(match found.into_iter().flatten().next() {
        Some(w) => Decomposability::Decomposable(w),
        None => Decomposability::Undecided("no coordinate decomposition found".into()),
    })
}

/// Find `shift in a2` with `eta - shift (x) r0 - B(shift, .) in a1 (x) r1`.
fn solve_shift(x: &ClassifierDatum, w: &DecompositionWitness, _gram: &Mat) -> Option<Vector> {
    let ClassifierDatum::LorentzRBeta { r0, b, eta } = x else { return None };
    let n = eta.rows();
    let r = r0.len();
    let m = n * r;
    // unknowns: coefficients on a2, then on a1 (x) r1
    let mut cols: Vec<Vector> = Vec::new();
    for v in &w.a2 {
        let mut t = Mat::zeros(n, r);
        for k in 0..r {
            let bv = b[k].mul_vec(v);
            for i in 0..n {
                t[(i, k)] = &v[i] * &r0[k] + &bv[i];
            }
        }
        cols.push(t.flatten());
    }
    for u in &w.a1 {
        for q in &w.r1 {
            let t = Mat::from_cols(&[u.clone()], n).mul(&Mat::from_rows(vec![q.clone()]).ok()?);
            cols.push(t.flatten());
        }
    }
    if cols.is_empty() {
        return vec_is_zero(&eta.flatten()).then(|| zeros(n));
    }
    let sol = exactlin::solve(&Mat::from_cols(&cols, m), &eta.flatten()).ok()??;
    let mut shift = zeros(n);
    for (k, v) in w.a2.iter().enumerate() {
        exactlin::axpy(&mut shift, &sol[k], v);
    }
    Some(shift)
}

// ---- pencil normal form -----------------------------------------------------

/// Orbit invariant of `B in S^2(a_-, R)` for `dim R = 1` and Euclidean `a_-`.
///
/// `invariants` are the elementary symmetric functions of the eigenvalues,
/// rescaled to a canonical point of the weighted projective orbit; equality
/// of `invariants` is equality of orbits. `diagonal` is the representative
/// `diag(1, l_2, ...)`: nonzero eigenvalues by increasing absolute value, the
/// smallest one scaled to 1, zeros last.
#[derive(Clone, Debug)]
pub struct PencilNormalForm {
    pub rank: usize,
    pub invariants: Vec<Scalar>,
    pub diagonal: Vec<f64>,
}

impl PartialEq for PencilNormalForm {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.invariants == other.invariants
    }
}

/// Elementary symmetric functions `e_1..e_n` of the eigenvalues (Faddeev-LeVerrier).
pub fn elementary_symmetric(b: &Mat) -> Vec<Scalar> {
    let n = b.rows();
    let mut coeffs = vec![Scalar::one()];
    let mut m = Mat::zeros(n, n);
    for k in 1..=n {
        // M_k = B M_{k-1} + c_{k-1} I, c_k = -tr(B M_k)/k
        let prev = coeffs[k - 1].clone();
        m = b.mul(&m).add(&Mat::identity(n).scale(&prev));
        let c = -(b.mul(&m).trace()) / int(k as i64);
        coeffs.push(c);
    }
    // char poly x^n + c_1 x^{n-1} + ... ; e_k = (-1)^k c_k
    (1..=n).map(|k| if k % 2 == 0 { coeffs[k].clone() } else { -coeffs[k].clone() }).collect()
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn pow_int(x: &Scalar, e: i64) -> Scalar {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// Canonical representative of `(e_1..e_n)` under `e_k -> c^k e_k`, `c != 0`.
fn canonical_scaling(e: &[Scalar]) -> Vec<Scalar> {
    let support: Vec<i64> = (1..=e.len() as i64).filter(|&k| !e[k as usize - 1].is_zero()).collect();
    if support.is_empty() {
        return e.to_vec();
    }
    // Bezout: sum a_k k = g
    let mut g = 0i64;
    let mut coef: Vec<i64> = Vec::new();
    for &k in &support {
        if g == 0 {
            g = k;
            coef = vec![1];
            continue;
        }
        let (ng, x, y) = ext_gcd(g, k);
        coef.iter_mut().for_each(|c| *c *= x);
        coef.push(y);
        g = ng;
    }
    // P = prod e_k^{a_k} scales like u = c^g
    let mut p = Scalar::one();
    for (&k, &a) in support.iter().zip(&coef) {
        p *= pow_int(&e[k as usize - 1], a);
    }
    // u > 0 is forced when g is even
    let u = if g % 2 == 0 { p.abs().recip() } else { p.recip() };
    e.iter().enumerate().map(|(i, x)| {
        let k = i as i64 + 1;
        if x.is_zero() {
            x.clone()
        } else {
            x * pow_int(&u, k / g)
        }
    }).collect()
}

pub fn pencil_normal_form(b: &Mat) -> Result<PencilNormalForm> {
    if !b.is_symmetric() {
        return Err(Error::Precondition("B must be symmetric".into()));
    }
    let n = b.rows();
    let e = elementary_symmetric(b);
    let rank = exactlin::rank(b);
    let invariants = canonical_scaling(&e);
    let diagonal = if rank == 0 {
        vec![0.0; n]
    } else {
        let f = b.to_float("B")?;
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| f[i][j]);
        let eig = nalgebra::SymmetricEigen::new(m).eigenvalues;
        let scale = eig.iter().map(|x| x.abs()).fold(0.0f64, f64::max);
        let mut nz: Vec<f64> = eig.iter().copied().filter(|x| x.abs() > 1e-12 * scale).collect();
        nz.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).expect("finite").then(b.partial_cmp(a).expect("finite")));
        let smallest = nz[0].abs();
        // every eigenvalue of minimal modulus is a candidate for +1; keep the largest list
        let mut best: Option<Vec<f64>> = None;
        for &lead in nz.iter().filter(|x| (x.abs() - smallest).abs() <= 1e-12 * scale) {
            let mut cand: Vec<f64> = nz.iter().map(|x| x / lead).collect();
            cand.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).expect("finite").then(b.partial_cmp(a).expect("finite")));
            if best.as_ref().is_none_or(|cur| cand.partial_cmp(cur) == Some(std::cmp::Ordering::Greater)) {
                best = Some(cand);
            }
        }
        let mut d = best.expect("nonzero eigenvalue");
        d.resize(n, 0.0);
        d
    };
    Ok(PencilNormalForm { rank, invariants, diagonal })
}

/// Orbit equivalence under `O(n) x GL(1)`.
pub fn pencil_equivalent(b1: &Mat, b2: &Mat) -> Result<bool> {
    Ok(pencil_normal_form(b1)? == pencil_normal_form(b2)?)
}

/// Cayley transform `(I - A)(I + A)^{-1}` of an antisymmetric rational `A`.
pub fn cayley(a: &Mat) -> Result<Mat> {
    let n = a.rows();
    if !a.add(&a.transpose()).is_zero() {
        return Err(Error::Precondition("Cayley transform needs an antisymmetric matrix".into()));
    }
    let inv = invert(&Mat::identity(n).add(a), "I + A")?;
    Ok(Mat::identity(n).sub(a).mul(&inv))
}

// ---- dictionary between classes and classifier data -------------------------

struct Layout {
    nl: usize,
    na: usize,
}

impl Layout {
    fn of(entry: &CatalogEntry) -> Self {
        Layout { nl: entry.l.dim(), na: entry.a.dim() }
    }

    fn a_block(&self, phi: &Mat) -> Mat {
        phi.block(self.nl, self.nl, self.na, self.na)
    }

    fn l_block(&self, phi: &Mat) -> Mat {
        phi.block(self.nl + self.na, self.nl + self.na, self.nl, self.nl)
    }

    fn tau_block(&self, phi: &Mat) -> Mat {
        phi.block(self.nl, self.nl + self.na, self.na, self.nl)
    }

    fn sigma_block(&self, phi: &Mat) -> Mat {
        phi.block(0, self.nl + self.na, self.nl, self.nl)
    }
}

fn a_index(entry: &CatalogEntry, label: &str) -> usize {
    entry.a.labels.iter().position(|l| l == label).unwrap_or_else(|| panic!("catalog module lacks {label}"))
}

fn label_vectors(entry: &CatalogEntry, labels: &[String]) -> Vec<Vector> {
    let na = entry.a.dim();
    labels.iter().map(|l| unit(na, a_index(entry, l))).collect()
}

fn a0_minus(entry: &CatalogEntry) -> Vec<Vector> {
    label_vectors(entry, &(1..=entry.desc.a0).map(|i| format!("P{i}-")).collect::<Vec<_>>())
}

/// Bases used for the classifier coordinates of a catalog entry.
struct ClassifierBases {
    /// `a_-` (shape riemann-B) or `(a0)_-`.
    main: Vec<Vector>,
    v: Vec<Vector>,
    vhat: Vec<Vector>,
    w: Vec<Vector>,
}

fn classifier_bases(entry: &CatalogEntry) -> ClassifierBases {
    let d = &entry.desc;
    match d.case {
        Case::One => {
            let mut main = label_vectors(entry, &["A2".to_string()]);
            main.extend(a0_minus(entry));
            ClassifierBases { main, v: vec![], vhat: vec![], w: vec![] }
        }
        Case::TwoA | Case::TwoB | Case::Three => ClassifierBases { main: a0_minus(entry), v: vec![], vhat: vec![], w: vec![] },
        Case::Four | Case::Five => ClassifierBases {
            main: a0_minus(entry),
            v: label_vectors(entry, &(1..=d.k).map(|i| format!("V{i}H")).collect::<Vec<_>>()),
            vhat: label_vectors(entry, &(1..=d.l).map(|i| format!("U{i}Y")).collect::<Vec<_>>()),
            w: label_vectors(entry, &(1..=d.m).map(|i| format!("W{i}a4")).collect::<Vec<_>>()),
        },
    }
}

fn shape_of(case: Case) -> &'static str {
    match case {
        Case::One => "riemann-B",
        Case::TwoA | Case::TwoB | Case::Three => "lorentz-rBeta",
        Case::Four | Case::Five => "lorentz-B1B2B",
    }
}

/// `<U^ D x, y>` on a basis, with `U^ = -phi|_a`.
fn b_of(u_hat: &Mat, entry: &CatalogEntry, xs: &[Vector]) -> Mat {
    let g = &entry.a.gram;
    let k = xs.len();
    let mut m = Mat::zeros(k, k);
    for i in 0..k {
        let v = u_hat.mul_vec(&entry.a.d.mul_vec(&xs[i]));
        for j in 0..k {
            m[(i, j)] = g.bilinear(&v, &xs[j]);
        }
    }
    m
}

/// `<U^ x, D y>` for `x in xs`, `y in ys`.
fn b_cross(u_hat: &Mat, entry: &CatalogEntry, xs: &[Vector], ys: &[Vector]) -> Mat {
    let g = &entry.a.gram;
    let mut m = Mat::zeros(xs.len(), ys.len());
    for (i, x) in xs.iter().enumerate() {
        let ux = u_hat.mul_vec(x);
        for (j, y) in ys.iter().enumerate() {
            m[(i, j)] = g.bilinear(&ux, &entry.a.d.mul_vec(y));
        }
    }
    m
}

fn upper(m: &Mat) -> Vector {
    let n = m.rows();
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].clone()).collect()
}

fn from_upper(v: &[Scalar], n: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    let mut t = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = v[t].clone();
            m[(j, i)] = v[t].clone();
            t += 1;
        }
    }
    m
}

/// Subtract the inner derivation that kills the `S^`, `tau^` and `sigma^` blocks.
fn normalize_mod_inner(phi: &Mat, ds: &DerivationSpace, lay: &Layout) -> Result<Mat> {
    let key = |m: &Mat| {
        let mut v = lay.l_block(m).flatten();
        v.extend(lay.tau_block(m).flatten());
        v.extend(lay.sigma_block(m).flatten());
        v
    };
    let target = key(phi);
    if vec_is_zero(&target) {
        return Ok(phi.clone());
    }
    if ds.inner_basis.is_empty() {
        return Err(Error::Precondition("derivation has outer S, tau or sigma part".into()));
    }
    let cols: Vec<Vector> = ds.inner_basis.iter().map(key).collect();
    let c = exactlin::solve(&Mat::from_cols(&cols, target.len()), &target)?
        .ok_or_else(|| Error::Precondition("derivation has outer S, tau or sigma part".into()))?;
    Ok(phi.sub(&combine(&ds.inner_basis, &c)))
}

/// Coordinates of a derivation, flattened in the order used by `realize`.
fn read_coordinates(entry: &CatalogEntry, ds: &DerivationSpace, phi: &Mat) -> Result<Vector> {
    let lay = Layout::of(entry);
    let bases = classifier_bases(entry);
    match entry.desc.case {
        Case::One => {
            let u_hat = lay.a_block(phi).neg();
            Ok(upper(&b_of(&u_hat, entry, &bases.main)))
        }
        Case::TwoA | Case::TwoB | Case::Three => {
            let s = lay.l_block(phi);
            // S^(X) = mu Y
            let mut out = vec![s[(1, 0)].clone()];
            let u_hat = lay.a_block(phi).neg();
            out.extend(upper(&b_of(&u_hat, entry, &bases.main)));
            let tx = lay.tau_block(phi).col(0);
            out.extend(bases.main.iter().map(|p| entry.a.gram.bilinear(&tx, p)));
            Ok(out)
        }
        Case::Four | Case::Five => {
            let phi = normalize_mod_inner(phi, ds, &lay)?;
            let u_hat = lay.a_block(&phi).neg();
            let mut out = b_cross(&u_hat, entry, &bases.v, &bases.vhat).flatten();
            out.extend(upper(&b_cross(&u_hat, entry, &bases.w, &bases.w)));
            out.extend(upper(&b_of(&u_hat, entry, &bases.main)));
            Ok(out)
        }
    }
}

fn datum_component_vector(x: &ClassifierDatum, k: usize) -> Vector {
    match x {
        ClassifierDatum::RiemannB { b, .. } => upper(&b[k]),
        ClassifierDatum::LorentzRBeta { r0, b, eta } => {
            let mut v = vec![r0[k].clone()];
            v.extend(upper(&b[k]));
            v.extend(eta.col(k));
            v
        }
        ClassifierDatum::LorentzB1B2B { b1, b2, b } => {
            let mut v = b1[k].flatten();
            v.extend(upper(&b2[k]));
            v.extend(upper(&b[k]));
            v
        }
    }
}

fn datum_from_components(entry: &CatalogEntry, comps: &[Vector]) -> ClassifierDatum {
    let bases = classifier_bases(entry);
    let n = bases.main.len();
    let tri = |m: usize| m * (m + 1) / 2;
    match entry.desc.case {
        Case::One => ClassifierDatum::RiemannB {
            gram: exactlin::restricted_gram(&bases.main, &entry.a.gram),
            b: comps.iter().map(|c| from_upper(c, n)).collect(),
        },
        Case::TwoA | Case::TwoB | Case::Three => {
            let r = comps.len();
            let mut eta = Mat::zeros(n, r);
            for (k, c) in comps.iter().enumerate() {
                for i in 0..n {
                    eta[(i, k)] = c[1 + tri(n) + i].clone();
                }
            }
            ClassifierDatum::LorentzRBeta {
                r0: comps.iter().map(|c| c[0].clone()).collect(),
                b: comps.iter().map(|c| from_upper(&c[1..1 + tri(n)], n)).collect(),
                eta,
            }
        }
        Case::Four | Case::Five => {
            let (kv, kh, kw) = (bases.v.len(), bases.vhat.len(), bases.w.len());
            let o1 = kv * kh;
            let o2 = o1 + tri(kw);
            ClassifierDatum::LorentzB1B2B {
                b1: comps.iter().map(|c| Mat::from_flat(kv, kh, c[..o1].to_vec())).collect(),
                b2: comps.iter().map(|c| from_upper(&c[o1..o2], kw)).collect(),
                b: comps.iter().map(|c| from_upper(&c[o2..], n)).collect(),
            }
        }
    }
}

/// Derivation with prescribed coordinates.
fn solve_coordinates(entry: &CatalogEntry, ds: &DerivationSpace, target: &[Scalar]) -> Result<Mat> {
    let cols: Vec<Vector> = ds.basis.iter().map(|phi| read_coordinates(entry, ds, phi)).collect::<Result<_>>()?;
    if cols.is_empty() {
        if vec_is_zero(target) {
            let n = entry.build().dim();
            return Ok(Mat::zeros(n, n));
        }
        return Err(Error::Precondition("derivation space is zero".into()));
    }
    if cols[0].len() != target.len() {
        return Err(Error::Dimension(format!("datum has {} coordinates, the entry needs {}", target.len(), cols[0].len())));
    }
    let c = exactlin::solve(&Mat::from_cols(&cols, target.len()), target)?
        .ok_or_else(|| Error::Precondition("datum is not realized by any derivation".into()))?;
    Ok(combine(&ds.basis, &c))
}

/// The closed invariant 2-form realizing a classifier datum on a catalog entry.
pub fn realize(entry: &CatalogEntry, ds: &DerivationSpace, x: &ClassifierDatum) -> Result<CentralExtensionDatum> {
    x.validate()?;
    if x.shape() != shape_of(entry.desc.case) {
        return Err(Error::Precondition(format!("{} data do not fit {}", x.shape(), entry.desc)));
    }
    let g = entry.build();
    let r = x.r_dim();
    let mut omegas = Vec::new();
    for k in 0..r {
        let phi = solve_coordinates(entry, ds, &datum_component_vector(x, k))?;
        omegas.push(omega_of(&phi, &g.gram));
    }
    let omega = if r == 0 { Form::zero(g.dim(), 2, 0) } else { omega_form(&omegas) };
    Ok(CentralExtensionDatum { r_dim: r, omega })
}

/// Classifier coordinates of a closed invariant `R`-valued 2-form.
pub fn classify(entry: &CatalogEntry, ds: &DerivationSpace, datum: &CentralExtensionDatum) -> Result<ClassifierDatum> {
    let g = entry.build();
    let rep = check_datum(&g, datum);
    if !rep.all_pass() {
        return Err(Error::Precondition("omega is not a closed invariant form on this algebra".into()));
    }
    let ginv = invert(&g.gram, "gram")?;
    let mut comps = Vec::new();
    for k in 0..datum.r_dim {
        // omega = phi^T G, so phi = (omega G^{-1})^T
        let phi = omega_component(&datum.omega, k).mul(&ginv).transpose();
        if !ds.contains(&phi) {
            return Err(Error::Precondition("omega does not come from an equivariant derivation".into()));
        }
        comps.push(read_coordinates(entry, ds, &phi)?);
    }
    Ok(datum_from_components(entry, &comps))
}

// ---- weakext.v1 -------------------------------------------------------------

fn mat_json(m: &Mat) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|x| Value::String(fmt_scalar(x))).collect())).collect())
}

fn vec_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(fmt_scalar(x))).collect())
}

fn parse_err(m: impl Into<String>) -> Error {
    Error::Parse(m.into())
}

fn json_vec(v: &Value, what: &str) -> Result<Vector> {
    v.as_array()
        .ok_or_else(|| parse_err(format!("{what} must be an array")))?
        .iter()
        .map(|x| match x {
            Value::String(s) => parse_scalar(s),
            Value::Number(n) => parse_scalar(&n.to_string()),
            _ => Err(parse_err(format!("{what}: entries must be rationals"))),
        })
        .collect()
}

fn json_mat(v: &Value, what: &str) -> Result<Mat> {
    let rows = v.as_array().ok_or_else(|| parse_err(format!("{what} must be an array of rows")))?;
    let rows: Vec<Vector> = rows.iter().map(|r| json_vec(r, what)).collect::<Result<_>>()?;
    if rows.is_empty() {
        return Ok(Mat::zeros(0, 0));
    }
    Mat::from_rows(rows).map_err(|_| parse_err(format!("{what} has ragged rows")))
}

fn json_mats(v: &Value, what: &str) -> Result<Vec<Mat>> {
    v.as_array().ok_or_else(|| parse_err(format!("{what} must be a list of matrices")))?.iter().map(|m| json_mat(m, what)).collect()
}

pub fn datum_to_json(d: &CentralExtensionDatum, base: Option<&str>) -> Value {
    let entries: Vec<Value> = d
        .omega
        .entries()
        .into_iter()
        .map(|(idx, v)| json!([idx[0], idx[1], vec_json(&v)]))
        .collect();
    let mut j = json!({"schema": "weakext.v1", "kind": "central-extension", "dim": d.omega.base_dim(), "r_dim": d.r_dim, "omega": entries});
    if let Some(b) = base {
        j["base"] = Value::String(b.to_string());
    }
    j
}

pub fn datum_from_json(v: &Value) -> Result<CentralExtensionDatum> {
    expect_schema(v, "central-extension")?;
    let n = v["dim"].as_u64().ok_or_else(|| parse_err("dim missing"))? as usize;
    let r = v["r_dim"].as_u64().ok_or_else(|| parse_err("r_dim missing"))? as usize;
    let mut w = Form::zero(n, 2, r);
    for e in v["omega"].as_array().ok_or_else(|| parse_err("omega must be a list"))? {
        let i = e[0].as_u64().ok_or_else(|| parse_err("omega index"))? as usize;
        let j = e[1].as_u64().ok_or_else(|| parse_err("omega index"))? as usize;
        let val = json_vec(&e[2], "omega value")?;
        if i >= n || j >= n || i == j || val.len() != r {
            return Err(parse_err(format!("bad omega entry ({i},{j})")));
        }
        w.set(&[i, j], &val);
    }
    Ok(CentralExtensionDatum { r_dim: r, omega: w })
}

fn expect_schema(v: &Value, kind: &str) -> Result<()> {
    if v["schema"] != "weakext.v1" || v["kind"] != kind {
        return Err(parse_err(format!("expected a weakext.v1 {kind} document")));
    }
    Ok(())
}

pub fn classifier_to_json(x: &ClassifierDatum) -> Value {
    let mats = |ms: &[Mat]| Value::Array(ms.iter().map(mat_json).collect());
    let mut j = json!({"schema": "weakext.v1", "kind": "classifier", "shape": x.shape(), "r_dim": x.r_dim()});
    match x {
        ClassifierDatum::RiemannB { gram, b } => {
            j["gram"] = mat_json(gram);
            j["B"] = mats(b);
        }
        ClassifierDatum::LorentzRBeta { r0, b, eta } => {
            j["r0"] = vec_json(r0);
            j["B"] = mats(b);
            j["eta"] = mat_json(eta);
            j["a0_dim"] = json!(eta.rows());
        }
        ClassifierDatum::LorentzB1B2B { b1, b2, b } => {
            j["B1"] = mats(b1);
            j["B2"] = mats(b2);
            j["B"] = mats(b);
        }
    }
    j
}

pub fn classifier_from_json(v: &Value) -> Result<ClassifierDatum> {
    expect_schema(v, "classifier")?;
    let x = match v["shape"].as_str() {
        Some("riemann-B") => ClassifierDatum::RiemannB { gram: json_mat(&v["gram"], "gram")?, b: json_mats(&v["B"], "B")? },
        Some("lorentz-rBeta") => {
            let r0 = json_vec(&v["r0"], "r0")?;
            let mut eta = json_mat(&v["eta"], "eta")?;
            if eta.rows() == 0 {
                let n = v["a0_dim"].as_u64().unwrap_or(0) as usize;
                eta = Mat::zeros(n, r0.len());
            }
            ClassifierDatum::LorentzRBeta { r0, b: json_mats(&v["B"], "B")?, eta }
        }
        Some("lorentz-B1B2B") => ClassifierDatum::LorentzB1B2B {
            b1: json_mats(&v["B1"], "B1")?,
            b2: json_mats(&v["B2"], "B2")?,
            b: json_mats(&v["B"], "B")?,
        },
        _ => return Err(parse_err("unknown classifier shape")),
    };
    x.validate().map_err(|e| parse_err(e.to_string()))?;
    Ok(x)
}

/// Minus-signature sanity helper for `a_-` grams in datum files.
pub fn is_definite(g: &Mat) -> bool {
    let (neg, zero, pos) = exactlin::inertia(g);
    zero == 0 && (neg == 0 || pos == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::frac;
    use crate::liecore::{is_full, verify_algebra};
    use crate::quadext::{catalog, CatalogDescriptor};

    fn entry(s: &str) -> CatalogEntry {
        catalog(&s.parse::<CatalogDescriptor>().unwrap()).unwrap()
    }

    fn diag(xs: &[i64]) -> Mat {
        Mat::diag(&xs.iter().map(|&x| int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn abelian_plane_derivations() {
        // a0 pair: so(2) commuting with D and anticommuting with theta is 1-dim
        let e = entry("tfull-1");
        let ds = derivation_space_checked(&e).unwrap();
        assert_eq!(ds.out_dim(), 1);
        assert_eq!(ds.routes_agree, Some(true));
    }

    #[test]
    fn case2a_out_is_one() {
        let e = entry("tfull-2a");
        let ds = derivation_space_checked(&e).unwrap();
        assert_eq!(ds.routes_agree, Some(true));
        assert_eq!(ds.out_dim(), 1);
        let g = e.build();
        for phi in &ds.basis {
            assert!(g.bracket.is_derivation(phi));
        }
        for m in &ds.inner_basis {
            assert!(ds.contains(m));
        }
    }

    #[test]
    fn case4_hom_v_vhat() {
        let e = entry("tfull-4:k=1,l=1,m=0:c=0:a0=0");
        let ds = derivation_space_checked(&e).unwrap();
        assert_eq!(ds.routes_agree, Some(true));
        assert_eq!(ds.out_dim(), 1);
    }

    #[test]
    fn h2_of_case1_with_pair() {
        let e = entry("tfull-1:a0=1");
        let g = e.build();
        let ds = derivation_space(&g).unwrap();
        let h = out_and_h2(&g, &ds, 2);
        assert_eq!(h.dim(), 6);
        for w in &h.representatives {
            let d = CentralExtensionDatum { r_dim: 2, omega: w.clone() };
            assert!(check_datum(&g, &d).all_pass());
        }
    }

    #[test]
    fn zero_omega_is_not_full() {
        let e = entry("tfull-2a");
        let g = e.build();
        let ext = central_extension(&g, &CentralExtensionDatum::zero(g.dim(), 1)).unwrap();
        assert!(!ext.full);
        assert!(verify_algebra(&ext.algebra).all_pass());
        assert!(!is_full(&ext.algebra).unwrap().0);
    }

    #[test]
    fn case1_b_realization() {
        let e = entry("tfull-1:a0=1");
        let ds = derivation_space(&e.build()).unwrap();
        let gram = Mat::diag(&[int(-1), int(1)]);
        for (b, full) in [(diag(&[1, 3]), true), (Mat::zeros(2, 2), false)] {
            let x = ClassifierDatum::RiemannB { gram: gram.clone(), b: vec![b] };
            let w = realize(&e, &ds, &x).unwrap();
            let ext = central_extension(&e.build(), &w).unwrap();
            assert_eq!(ext.full, full);
            assert_eq!(is_full(&ext.algebra).unwrap().0, full);
            assert_eq!(classify(&e, &ds, &w).unwrap(), x);
        }
    }

    #[test]
    fn inner_derivations_have_zero_coordinates() {
        for s in ["tfull-2b:a0=1", "tfull-3:a0=1", "tfull-5:k=1,l=1,m=1:c=1:a0=1"] {
            let e = entry(s);
            let ds = derivation_space(&e.build()).unwrap();
            for m in &ds.inner_basis {
                assert!(vec_is_zero(&read_coordinates(&e, &ds, m).unwrap()), "{s}");
            }
        }
    }

    #[test]
    fn automorphisms_of_case2a() {
        let e = entry("tfull-2a:a0=1");
        let nl = 2;
        let na = e.a.dim();
        let id_l = Mat::identity(nl);
        let id_a = Mat::identity(na);
        let zt = Mat::zeros(na, nl);
        let zs = Mat::zeros(nl, nl);
        let c = automorphism_check(&e, &id_l, &id_a, &zt, &zs).unwrap();
        assert!(c.holds());
        let c = automorphism_check(&e, &id_l.neg(), &id_a, &zt, &zs).unwrap();
        assert!(c.holds(), "{c:?}");
        let c = automorphism_check(&e, &id_l.scale(&int(2)), &id_a, &zt, &zs).unwrap();
        assert!(!c.direct && !c.conditions);
        // tau(Y) = a in (a0)_-, tau(X) = -D a
        let pm = a_index(&e, "P1-");
        let a = unit(na, pm);
        let mut tau = Mat::zeros(na, nl);
        let da = e.a.d.mul_vec(&a);
        for i in 0..na {
            tau[(i, 1)] = a[i].clone();
            tau[(i, 0)] = -da[i].clone();
        }
        let c = automorphism_check(&e, &id_l, &id_a, &tau, &zs).unwrap();
        assert!(c.holds(), "{c:?}");
    }

    #[test]
    fn rbeta_decisions() {
        let one = |b: Mat, r0: i64, eta: Vec<i64>| ClassifierDatum::LorentzRBeta {
            r0: vec![int(r0)],
            b: vec![b],
            eta: Mat::from_cols(&[eta.into_iter().map(int).collect()], 2),
        };
        let x = one(Mat::zeros(2, 2), 0, vec![0, 0]);
        assert!(matches!(is_indecomposable_datum(&x).unwrap(), Decomposability::Decomposable(_)));
        let x = one(diag(&[1, 3]), 0, vec![1, 0]);
        match is_indecomposable_datum(&x).unwrap() {
            Decomposability::Decomposable(w) => assert!(check_witness(&x, &w)),
            other => panic!("{other:?}"),
        }
        let x = one(diag(&[1, 0]), 0, vec![0, 1]);
        assert_eq!(is_indecomposable_datum(&x).unwrap(), Decomposability::Indecomposable);
        let x = one(diag(&[1, 0]), 1, vec![0, 1]);
        assert!(matches!(is_indecomposable_datum(&x).unwrap(), Decomposability::Decomposable(_)));
    }

    #[test]
    fn riemann_decisions() {
        let b = |m: Mat| ClassifierDatum::RiemannB { gram: Mat::identity(2), b: vec![m] };
        assert_eq!(is_indecomposable_datum(&b(diag(&[1, 3]))).unwrap(), Decomposability::Indecomposable);
        assert_eq!(is_indecomposable_datum(&b(diag(&[1, 1]))).unwrap(), Decomposability::Indecomposable);
        assert!(matches!(is_indecomposable_datum(&b(diag(&[1, 0]))).unwrap(), Decomposability::Decomposable(_)));
        // two-dimensional R: block diagonal data split along coordinates
        let x = ClassifierDatum::RiemannB { gram: Mat::identity(2), b: vec![diag(&[1, 0]), diag(&[0, 1])] };
        assert!(matches!(is_indecomposable_datum(&x).unwrap(), Decomposability::Decomposable(_)));
    }

    #[test]
    fn pencil_examples() {
        let z = pencil_normal_form(&Mat::zeros(2, 2)).unwrap();
        assert_eq!(z.rank, 0);
        let nf = pencil_normal_form(&diag(&[2, -6])).unwrap();
        assert!((nf.diagonal[0] - 1.0).abs() < 1e-12 && (nf.diagonal[1] + 3.0).abs() < 1e-12);
        assert_eq!(nf, pencil_normal_form(&diag(&[1, -3])).unwrap());
        assert!(pencil_equivalent(&diag(&[1, 1]), &diag(&[3, 3])).unwrap());
        assert!(!pencil_equivalent(&diag(&[1, 2]), &diag(&[1, 3])).unwrap());
        assert!(pencil_equivalent(&diag(&[2, 1]), &Mat::diag(&[int(1), frac(1, 2)])).unwrap());
        let e = elementary_symmetric(&diag(&[2, 3, 5]));
        assert_eq!(e, vec![int(10), int(31), int(30)]);
    }

    #[test]
    fn cayley_is_orthogonal() {
        let a = Mat::from_rows(vec![vec![int(0), frac(1, 3)], vec![frac(-1, 3), int(0)]]).unwrap();
        let q = cayley(&a).unwrap();
        assert!(q.transpose().mul(&q).is_identity());
    }

    #[test]
    fn json_round_trips() {
        let x = ClassifierDatum::LorentzRBeta { r0: vec![int(1)], b: vec![diag(&[1, 2])], eta: Mat::from_ints(&[&[1], &[0]]) };
        assert_eq!(classifier_from_json(&classifier_to_json(&x)).unwrap(), x);
        let e = entry("tfull-2a");
        let g = e.build();
        let ds = derivation_space(&g).unwrap();
        let h = out_and_h2(&g, &ds, 1);
        let d = CentralExtensionDatum { r_dim: 1, omega: h.representatives[0].clone() };
        assert_eq!(datum_from_json(&datum_to_json(&d, Some("tfull-2a"))).unwrap(), d);
    }
}
