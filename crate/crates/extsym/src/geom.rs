//! Floating point geometry of the embedded orbits `G_+(0) ⊂ g_-`.
//!
//! Two routes produce points: the exponential words of the affine
//! representation `phi(X) = (ad X|_{g_-}, -D X)` and the closed-form
//! parametrizations of the five Lorentzian families. Probes (induced metric,
//! second fundamental form, reflections, curvature) work on either.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactlin::{self, parse_scalar, to_float, unit, Mat, Scalar, Vector};
use crate::liecore::{grade, is_extrinsic_triple, MetricEquivariantAlgebra};
use crate::par::par_map;
use crate::quadext::{catalog, CatalogDescriptor, Case};
use crate::report::{Check, Report};

/// Numerical tolerances shared by all probes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Manifold residuals: reflections, route agreement of points.
    pub manifold: f64,
    /// Flatness threshold on `max |R|` and on the mean curvature constant.
    pub curvature: f64,
    /// Threshold on `max |nabla R|`.
    pub parallel: f64,
    /// Smallest admissible `|eigenvalue|` of an induced metric.
    pub degeneracy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { manifold: 1e-6, curvature: 1e-4, parallel: 1e-3, degeneracy: 1e-7 }
    }
}

fn mat_f64(m: &Mat, what: &str) -> Result<DMatrix<f64>> {
    let rows = m.to_float(what)?;
    Ok(DMatrix::from_fn(m.rows(), m.cols(), |i, j| rows[i][j]))
}

fn vec_f64(v: &[Scalar], what: &str) -> Result<DVector<f64>> {
    Ok(DVector::from_vec(exactlin::vec_to_float(v, what)?))
}

/// Largest absolute entry.
fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

// ---- affine isometries ------------------------------------------------------

/// Infinitesimal affine map `x -> A x + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineGenerator {
    pub linear: DMatrix<f64>,
    pub translation: DVector<f64>,
}

impl AffineGenerator {
    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn zero(d: usize) -> Self {
        AffineGenerator { linear: DMatrix::zeros(d, d), translation: DVector::zeros(d) }
    }

    pub fn scaled(&self, t: f64) -> Self {
        AffineGenerator { linear: &self.linear * t, translation: &self.translation * t }
    }

    pub fn add(&self, other: &AffineGenerator) -> Self {
        AffineGenerator { linear: &self.linear + &other.linear, translation: &self.translation + &other.translation }
    }

    /// `(d+1) x (d+1)` homogeneous block matrix.
    pub fn homogeneous(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d + 1, d + 1);
        m.view_mut((0, 0), (d, d)).copy_from(&self.linear);
        m.view_mut((0, d), (d, 1)).copy_from(&self.translation);
        m
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffineIsometry {
    pub linear: DMatrix<f64>,
    pub translation: DVector<f64>,
    pub gram: DMatrix<f64>,
}

impl AffineIsometry {
    pub fn identity(gram: &DMatrix<f64>) -> Self {
        let d = gram.nrows();
        AffineIsometry { linear: DMatrix::identity(d, d), translation: DVector::zeros(d), gram: gram.clone() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineIsometry) -> AffineIsometry {
        AffineIsometry {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
            gram: self.gram.clone(),
        }
    }

    pub fn apply(&self, p: &DVector<f64>) -> DVector<f64> {
        &self.linear * p + &self.translation
    }

    /// `max |L^T G L - G|`.
    pub fn gram_defect(&self) -> f64 {
        max_abs(&(self.linear.transpose() * &self.gram * &self.linear - &self.gram))
    }

    /// Relative distance of homogeneous matrices.
    pub fn distance(&self, other: &AffineIsometry) -> f64 {
        let a = self.homogeneous();
        let b = other.homogeneous();
        max_abs(&(&a - &b)) / max_abs(&a).max(1.0)
    }

    fn homogeneous(&self) -> DMatrix<f64> {
        let d = self.translation.len();
        let mut m = DMatrix::identity(d + 1, d + 1);
        m.view_mut((0, 0), (d, d)).copy_from(&self.linear);
        m.view_mut((0, d), (d, 1)).copy_from(&self.translation);
        m
    }
}

/// Matrix exponential by scaling and squaring with a 30-term Taylor series.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = m / 2f64.powi(squarings);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &a / k as f64;
        if max_abs(&term) == 0.0 {
            break;
        }
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn exp_affine(generator: &AffineGenerator, t: f64, gram: &DMatrix<f64>) -> AffineIsometry {
    let d = generator.dim();
    let e = expm(&(generator.homogeneous() * t));
    AffineIsometry {
        linear: e.view((0, 0), (d, d)).into_owned(),
        translation: e.view((0, d), (d, 1)).column(0).into_owned(),
        gram: gram.clone(),
    }
}

// ---- the orbit route --------------------------------------------------------

/// Exact coordinates of `v` in `basis`.
fn coords_in(basis: &[Vector], v: &[Scalar], what: &str) -> Result<Vector> {
    if basis.is_empty() {
        return if exactlin::vec_is_zero(v) { Ok(vec![]) } else { Err(Error::Precondition(format!("{what} is not in g_-"))) };
    }
    exactlin::coordinates(basis, v).ok_or_else(|| Error::Precondition(format!("{what} is not in g_-")))
}

fn phi_rep_in(g: &MetricEquivariantAlgebra, minus: &[Vector], x: &[Scalar]) -> Result<AffineGenerator> {
    if x.len() != g.dim() {
        return Err(Error::Dimension(format!("element has {} entries, algebra has dim {}", x.len(), g.dim())));
    }
    if g.theta.mul_vec(x) != x {
        return Err(Error::Precondition("phi is only defined on g_+".into()));
    }
    let d = minus.len();
    let mut lin = Mat::zeros(d, d);
    for (j, b) in minus.iter().enumerate() {
        let c = coords_in(minus, &g.bracket.apply(x, b), "[X, g_-]")?;
        for (i, v) in c.into_iter().enumerate() {
            lin[(i, j)] = v;
        }
    }
    let dx: Vector = g.d.mul_vec(x).into_iter().map(|v| -v).collect();
    let tr = coords_in(minus, &dx, "D X")?;
    Ok(AffineGenerator { linear: mat_f64(&lin, "ad X")?, translation: vec_f64(&tr, "D X")? })
}

/// Basis of `g_-`: the coordinate vectors with `theta e = -e` when `theta` is
/// diagonal, otherwise the eigenbasis of [`grade`].
pub fn minus_basis(g: &MetricEquivariantAlgebra) -> Result<Vec<Vector>> {
    let n = g.dim();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || g.theta[(i, j)].is_zero()));
    if diagonal {
        return Ok((0..n).filter(|&i| g.theta[(i, i)] < Scalar::zero()).map(|i| unit(n, i)).collect());
    }
    Ok(grade(g)?.minus)
}

/// `phi(X) = ((ad X)|_{g_-}, -D X)` in the basis of [`minus_basis`].
pub fn phi_rep(g: &MetricEquivariantAlgebra, x: &[Scalar]) -> Result<AffineGenerator> {
    phi_rep_in(g, &minus_basis(g)?, x)
}

/// One factor `exp(phi(sum c_i X_i))` of an orbit word, by label.
pub type WordFactor = Vec<(String, f64)>;

pub const MAX_WORD_FACTORS: usize = 6;

/// The affine representation of `g_+` on `g_-`, with generators cached for
/// every basis label lying in `g_+`.
#[derive(Clone, Debug)]
pub struct OrbitModel {
    pub labels: Vec<String>,
    pub minus_basis: Vec<Vector>,
    pub gram: DMatrix<f64>,
    generators: Vec<(String, AffineGenerator)>,
}

impl OrbitModel {
    pub fn new(g: &MetricEquivariantAlgebra) -> Result<Self> {
        let (ok, _) = is_extrinsic_triple(g)?;
        if !ok {
            return Err(Error::Precondition("orbit model needs an extrinsic symmetric triple".into()));
        }
        let minus = minus_basis(g)?;
        let gram = mat_f64(&exactlin::restricted_gram(&minus, &g.gram), "gram on g_-")?;
        let mut generators = Vec::new();
        for (i, label) in g.labels.iter().enumerate() {
            let e = unit(g.dim(), i);
            if g.theta.mul_vec(&e) == e {
                generators.push((label.clone(), phi_rep_in(g, &minus, &e)?));
            }
        }
        Ok(OrbitModel { labels: g.labels.clone(), minus_basis: minus, gram, generators })
    }

    pub fn dim(&self) -> usize {
        self.minus_basis.len()
    }

    pub fn plus_labels(&self) -> Vec<&str> {
        self.generators.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn generator(&self, label: &str) -> Result<&AffineGenerator> {
        self.generators
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, g)| g)
            .ok_or_else(|| Error::Precondition(format!("{label} is not a basis element of g_+")))
    }

    pub fn minus_coordinates(&self, v: &[Scalar]) -> Result<Vector> {
        coords_in(&self.minus_basis, v, "vector")
    }

    /// `exp(phi(w_1)) ... exp(phi(w_n))`.
    pub fn element(&self, word: &[WordFactor]) -> Result<AffineIsometry> {
        if word.len() > MAX_WORD_FACTORS {
            return Err(Error::Precondition(format!("orbit words have at most {MAX_WORD_FACTORS} factors")));
        }
        let mut acc = AffineIsometry::identity(&self.gram);
        for factor in word {
            let mut gen = AffineGenerator::zero(self.dim());
            for (label, c) in factor {
                gen = gen.add(&self.generator(label)?.scaled(*c));
            }
            acc = acc.compose(&exp_affine(&gen, 1.0, &self.gram));
        }
        Ok(acc)
    }

    pub fn orbit_point(&self, word: &[WordFactor]) -> Result<DVector<f64>> {
        Ok(self.element(word)?.translation)
    }
}

/// Orbit point of a built triple; see [`OrbitModel::orbit_point`].
pub fn orbit_point(g: &MetricEquivariantAlgebra, word: &[WordFactor]) -> Result<DVector<f64>> {
    OrbitModel::new(g)?.orbit_point(word)
}

// ---- the five families ------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    One,
    /// `plus` selects `<,>_V = 2 dx1 dx3 + dx2^2`, otherwise `- dx2^2`.
    Two { plus: bool },
    Three,
    Four { k: usize, l: usize, m: usize, c: Scalar },
    Five { k: usize, l: usize, m: usize, c: Scalar },
}

impl Item {
    pub fn id(&self) -> u8 {
        match self {
            Item::One => 1,
            Item::Two { .. } => 2,
            Item::Three => 3,
            Item::Four { .. } => 4,
            Item::Five { .. } => 5,
        }
    }

    fn klm(&self) -> (usize, usize, usize) {
        match self {
            Item::Four { k, l, m, .. } | Item::Five { k, l, m, .. } => (*k, *l, *m),
            _ => (0, 0, 0),
        }
    }

    fn c(&self) -> f64 {
        match self {
            Item::Four { c, .. } | Item::Five { c, .. } => to_float(c, "c").unwrap_or(f64::NAN),
            _ => 0.0,
        }
    }

    pub fn param_dim(&self) -> usize {
        let (k, l, m) = self.klm();
        match self {
            Item::One => 1,
            Item::Two { .. } => 2,
            Item::Three => 3,
            _ => 2 + k + l + m,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        let (k, l, m) = self.klm();
        match self {
            Item::One => 1,
            Item::Two { .. } => 3,
            Item::Three => 5,
            _ => 4 + k + 2 * l + 2 * m,
        }
    }

    pub fn ambient_gram(&self) -> DMatrix<f64> {
        let n = self.ambient_dim();
        let mut g = DMatrix::zeros(n, n);
        let pair = |g: &mut DMatrix<f64>, i: usize, j: usize| {
            g[(i, j)] = 1.0;
            g[(j, i)] = 1.0;
        };
        match self {
            Item::One => g[(0, 0)] = -1.0,
            Item::Two { plus } => {
                pair(&mut g, 0, 2);
                g[(1, 1)] = if *plus { 1.0 } else { -1.0 };
            }
            Item::Three => {
                pair(&mut g, 0, 3);
                pair(&mut g, 1, 4);
                g[(2, 2)] = 1.0;
            }
            Item::Four { .. } | Item::Five { .. } => {
                let (k, l, m) = self.klm();
                let hat = if matches!(self, Item::Four { .. }) { 1.0 } else { -1.0 };
                pair(&mut g, 0, n - 2);
                pair(&mut g, 1, n - 1);
                let mut i = 2;
                for (count, sign) in [(k, 1.0), (l, 1.0), (l, hat), (m, 1.0), (m, hat)] {
                    for _ in 0..count {
                        g[(i, i)] = sign;
                        i += 1;
                    }
                }
            }
        }
        g
    }

    /// Expected `(negative, positive)` counts of the induced metric.
    pub fn signature(&self) -> (usize, usize) {
        let (k, l, m) = self.klm();
        match self {
            Item::One => (1, 0),
            Item::Two { .. } => (1, 1),
            Item::Three => (1, 2),
            _ => (1, 1 + k + l + m),
        }
    }

    /// Predicted `C` in `h = C sigma_X`; zero for the minimal families.
    pub fn mean_curvature_constant(&self) -> f64 {
        let (k, l, m) = self.klm();
        match self {
            Item::Four { .. } | Item::Five { .. } => {
                -((4 + 2 * (k + l) + m) as f64) / ((2 + k + l + m) as f64)
            }
            _ => 0.0,
        }
    }

    /// The induced metric is flat exactly when no `a3` or `a4` block bends the `su(2)`/`sl(2)` orbit.
    pub fn expected_flat(&self) -> bool {
        let (k, _, m) = self.klm();
        k == 0 && m == 0
    }

    /// Catalog entry whose orbit is this family.
    pub fn descriptor(&self) -> CatalogDescriptor {
        match self {
            Item::One => CatalogDescriptor::new(Case::One),
            Item::Two { plus: true } => CatalogDescriptor::new(Case::TwoA),
            Item::Two { plus: false } => CatalogDescriptor::new(Case::TwoB),
            Item::Three => CatalogDescriptor::new(Case::Three),
            Item::Four { k, l, m, c } => CatalogDescriptor::with_params(Case::Four, *k, *l, *m, c.clone()),
            Item::Five { k, l, m, c } => CatalogDescriptor::with_params(Case::Five, *k, *l, *m, c.clone()),
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::One => write!(f, "item-1"),
            Item::Two { plus } => write!(f, "item-2:{}", if *plus { "+" } else { "-" }),
            Item::Three => write!(f, "item-3"),
            Item::Four { k, l, m, c } | Item::Five { k, l, m, c } => {
                write!(f, "item-{}:k={k},l={l},m={m}:c={}", self.id(), exactlin::fmt_scalar(c))
            }
        }
    }
}

impl FromStr for Item {
    type Err = Error;

    /// `item-1`, `item-2:+`, `item-2:-`, `item-3`, `item-4:k=1,l=0,m=1:c=1`.
    /// Omitted parameters default to zero.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not an item: {s:?}"));
        let mut parts = s.trim().split(':');
        let head = parts.next().ok_or_else(bad)?;
        let id = head.strip_prefix("item-").or_else(|| head.strip_prefix("item")).ok_or_else(bad)?;
        let rest: Vec<&str> = parts.collect();
        match id {
            "1" | "3" if !rest.is_empty() => Err(bad()),
            "1" => Ok(Item::One),
            "3" => Ok(Item::Three),
            "2" => match rest.as_slice() {
                [] | ["+"] => Ok(Item::Two { plus: true }),
                ["-"] => Ok(Item::Two { plus: false }),
                _ => Err(bad()),
            },
            "4" | "5" => {
                let (mut k, mut l, mut m, mut c) = (0usize, 0usize, 0usize, Scalar::zero());
                for part in rest {
                    for kv in part.split(',') {
                        let (key, val) = kv.split_once('=').ok_or_else(bad)?;
                        match key.trim() {
                            "k" => k = val.trim().parse().map_err(|_| bad())?,
                            "l" => l = val.trim().parse().map_err(|_| bad())?,
                            "m" => m = val.trim().parse().map_err(|_| bad())?,
                            "c" => c = parse_scalar(val.trim())?,
                            _ => return Err(bad()),
                        }
                    }
                }
                Ok(if id == "4" { Item::Four { k, l, m, c } } else { Item::Five { k, l, m, c } })
            }
            _ => Err(bad()),
        }
    }
}

fn check_params(item: &Item, q: &[f64]) -> Result<()> {
    if q.len() != item.param_dim() {
        return Err(Error::Dimension(format!("{item} takes {} parameters, got {}", item.param_dim(), q.len())));
    }
    Ok(())
}

/// The printed parametrization of a family.
pub fn closed_form_embed(item: &Item, q: &[f64]) -> Result<DVector<f64>> {
    check_params(item, q)?;
    Ok(match item {
        Item::One => DVector::from_vec(vec![q[0]]),
        Item::Two { .. } => DVector::from_vec(vec![q[0], q[1] * q[1], q[1]]),
        Item::Three => {
            let (r, s, t) = (q[0], q[1], q[2]);
            DVector::from_vec(vec![s, -r * t + r.powi(4) / 4.0, t, r, r * r])
        }
        Item::Four { .. } | Item::Five { .. } => {
            let (k, l, _) = item.klm();
            let c = item.c();
            let (r, t) = (q[0], q[1]);
            let s = &q[2..2 + k];
            let v = &q[2 + k..2 + k + l];
            let u = &q[2 + k + l..];
            let sq = |x: &[f64]| x.iter().map(|y| y * y).sum::<f64>();
            let quad = sq(s) + sq(v) + 0.5 * sq(u);
            let mut out = Vec::with_capacity(item.ambient_dim());
            if matches!(item, Item::Four { .. }) {
                let (cr, sr) = (r.cos(), r.sin());
                out.push(-(quad + c) * cr - (r * c + t) * sr + c);
                out.push(-(quad + c) * sr + (r * c + t) * cr);
                out.extend(s.iter().map(|x| -x));
                out.extend(v.iter().map(|x| x * cr));
                out.extend(v.iter().map(|x| -x * sr));
                out.extend(u.iter().map(|x| x * (r / 2.0).cos()));
                out.extend(u.iter().map(|x| x * (r / 2.0).sin()));
                out.push(0.5 * (cr - 1.0));
                out.push(0.5 * sr);
            } else {
                let (cr, sr) = (r.cosh(), r.sinh());
                out.push(-(quad - c) * cr - (r * c + t) * sr - c);
                out.push((quad - c) * sr + (r * c + t) * cr);
                out.extend(s.iter().map(|x| -x));
                out.extend(v.iter().map(|x| x * cr));
                out.extend(v.iter().map(|x| x * sr));
                out.extend(u.iter().map(|x| x * (r / 2.0).cosh()));
                out.extend(u.iter().map(|x| -x * (r / 2.0).sinh()));
                out.push(0.5 * (cr - 1.0));
                out.push(0.5 * sr);
            }
            DVector::from_vec(out)
        }
    })
}

/// Orbit route for a family: the triple's orbit model, a frame identifying
/// `V` with `g_-`, and the word attached to a parameter vector.
#[derive(Clone, Debug)]
pub struct OrbitChart {
    pub item: Item,
    pub model: OrbitModel,
    /// Columns: the basis of `V` in `g_-` coordinates.
    pub frame: DMatrix<f64>,
    frame_inv: DMatrix<f64>,
}

impl OrbitChart {
    pub fn new(item: &Item) -> Result<Self> {
        let g = catalog(&item.descriptor())?.build();
        let model = OrbitModel::new(&g)?;
        let e = |label: &str| g.e(label);
        let br = |a: &str, b: &Vector| g.bracket.apply(&e(a), b);
        let mut cols: Vec<(Vector, f64)> = Vec::new();
        match item {
            Item::One => cols.push((e("A2"), 1.0)),
            Item::Two { .. } => {
                let s2 = 2f64.sqrt();
                cols.push((e("sY"), 1.0 / s2));
                cols.push((e("A0"), -1.0));
                cols.push((e("Y"), s2));
            }
            Item::Three => {
                let a = 0.5f64.cbrt();
                let b = -2.0 * a * a;
                cols.extend([(e("sY"), a), (e("sZ"), b), (e("A1"), 1.0), (e("Y"), 1.0 / a), (e("Z"), 1.0 / b)]);
            }
            Item::Four { .. } | Item::Five { .. } => {
                let (k, l, m) = item.klm();
                let r8 = 8f64.sqrt();
                cols.push((e("sX"), 1.0));
                cols.push((e("sY"), 1.0));
                for i in 1..=k {
                    cols.push((br("X", &e(&format!("V{i}Y"))), 0.5 / r8));
                }
                for i in 1..=l {
                    cols.push((br("X", &e(&format!("U{i}H"))), -0.5 / r8));
                }
                // kappa of the catalog bracket [H,Y] = 2 kappa X
                let kappa = if matches!(item, Item::Four { .. }) { -1.0 } else { 1.0 };
                for i in 1..=l {
                    cols.push((br("Y", &e(&format!("U{i}H"))), -kappa * 0.5 / r8));
                }
                for i in 1..=m {
                    cols.push((br("X", &e(&format!("W{i}a2"))), -1.0));
                }
                for i in 1..=m {
                    cols.push((br("Y", &e(&format!("W{i}a2"))), kappa));
                }
                cols.push((e("X"), 1.0));
                cols.push((e("Y"), 1.0));
            }
        }
        let d = model.dim();
        if cols.len() != d {
            return Err(Error::Dimension(format!("frame has {} vectors, g_- has dim {d}", cols.len())));
        }
        let mut frame = DMatrix::zeros(d, d);
        for (j, (v, f)) in cols.iter().enumerate() {
            let c = vec_f64(&model.minus_coordinates(v)?, "frame vector")?;
            frame.set_column(j, &(c * *f));
        }
        let frame_inv = frame.clone().try_inverse().ok_or_else(|| Error::Degenerate("frame is singular".into()))?;
        Ok(OrbitChart { item: item.clone(), model, frame, frame_inv })
    }

    /// `max |F^T G_- F - G_V|`.
    pub fn frame_defect(&self) -> f64 {
        max_abs(&(self.frame.transpose() * &self.model.gram * &self.frame - self.item.ambient_gram()))
    }

    /// The word whose orbit point has the given closed-form parameters.
    pub fn word(&self, q: &[f64]) -> Result<Vec<WordFactor>> {
        check_params(&self.item, q)?;
        let f = |l: &str, c: f64| (l.to_string(), c);
        Ok(match &self.item {
            Item::One => vec![vec![f("A1", -q[0])]],
            Item::Two { plus } => {
                let a = -(2f64.sqrt()) * q[1];
                let cube = a.powi(3) / 6.0;
                let b = if *plus { cube } else { -cube } - q[0] / 2f64.sqrt();
                vec![vec![f("X", a)], vec![f("sX", b)]]
            }
            Item::Three => {
                let al = 0.5f64.cbrt();
                let a = -q[0] / al;
                let c = q[2] + a.powi(3) / 6.0;
                let b = -a.powi(5) / 120.0 + a * a * c / 2.0 - al * q[1];
                vec![vec![f("X", a)], vec![f("sX", b), f("A2", c)]]
            }
            Item::Four { .. } | Item::Five { .. } => {
                let (k, l, _) = self.item.klm();
                let r8 = 8f64.sqrt();
                let mut second = vec![f("sH", q[1])];
                for (i, x) in q[2..].iter().enumerate() {
                    if i < k {
                        second.push(f(&format!("V{}Y", i + 1), x / r8));
                    } else if i < k + l {
                        second.push(f(&format!("U{}H", i - k + 1), x / r8));
                    } else {
                        second.push(f(&format!("W{}a2", i - k - l + 1), *x));
                    }
                }
                vec![vec![f("H", q[0] / 2.0)], second]
            }
        })
    }

    /// The group element in `V` coordinates.
    pub fn element(&self, q: &[f64]) -> Result<AffineIsometry> {
        let g = self.model.element(&self.word(q)?)?;
        Ok(AffineIsometry {
            linear: &self.frame_inv * &g.linear * &self.frame,
            translation: &self.frame_inv * &g.translation,
            gram: self.item.ambient_gram(),
        })
    }

    pub fn point(&self, q: &[f64]) -> Result<DVector<f64>> {
        Ok(&self.frame_inv * self.model.orbit_point(&self.word(q)?)?)
    }

    /// Predicted mean curvature vector `C g_* sigma_X` at the orbit point of `q`.
    pub fn predicted_mean_curvature(&self, q: &[f64]) -> Result<DVector<f64>> {
        let el = self.element(q)?;
        let c = self.item.mean_curvature_constant();
        let sigma_x = DVector::from_fn(self.item.ambient_dim(), |i, _| if i == 0 { 1.0 } else { 0.0 });
        Ok(el.linear * sigma_x * c)
    }
}

// ---- samplers and probes ----------------------------------------------------

#[derive(Clone, Debug)]
pub enum Source {
    ClosedForm,
    Orbit(Box<OrbitChart>),
}

/// Parametrized submanifold of `(V, gram)`.
#[derive(Clone, Debug)]
pub struct EmbeddingSampler {
    pub item: Item,
    pub gram: DMatrix<f64>,
    pub source: Source,
}

impl EmbeddingSampler {
    pub fn closed_form(item: &Item) -> Self {
        EmbeddingSampler { item: item.clone(), gram: item.ambient_gram(), source: Source::ClosedForm }
    }

    pub fn orbit(item: &Item) -> Result<Self> {
        Ok(EmbeddingSampler { item: item.clone(), gram: item.ambient_gram(), source: Source::Orbit(Box::new(OrbitChart::new(item)?)) })
    }

    pub fn ambient_dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn param_dim(&self) -> usize {
        self.item.param_dim()
    }

    pub fn eval(&self, q: &[f64]) -> DVector<f64> {
        let r = match &self.source {
            Source::ClosedForm => closed_form_embed(&self.item, q),
            Source::Orbit(chart) => chart.point(q),
        };
        r.expect("parameter vector of the sampler's dimension")
    }
}

/// Step of the first-derivative stencil.
pub const JACOBIAN_STEP: f64 = 1e-3;
/// Step used for second derivatives and for differentiating derived tensors.
pub const SECOND_STEP: f64 = 5e-3;
pub const OUTER_STEP: f64 = 1e-2;

fn shifted(q: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut p = q.to_vec();
    p[i] += h;
    p
}

/// Fourth-order central difference of a vector valued function along `i`.
fn central<F: Fn(&[f64]) -> DVector<f64>>(f: &F, q: &[f64], i: usize, h: f64) -> DVector<f64> {
    (f(&shifted(q, i, -2.0 * h)) - f(&shifted(q, i, 2.0 * h)) + (f(&shifted(q, i, h)) - f(&shifted(q, i, -h))) * 8.0) / (12.0 * h)
}

/// Central difference with one Richardson step.
fn richardson<F: Fn(&[f64]) -> DVector<f64>>(f: &F, q: &[f64], i: usize, h: f64) -> DVector<f64> {
    (central(f, q, i, h / 2.0) * 16.0 - central(f, q, i, h)) / 15.0
}

pub fn jacobian(s: &EmbeddingSampler, q: &[f64]) -> DMatrix<f64> {
    let f = |p: &[f64]| s.eval(p);
    let n = q.len();
    let mut j = DMatrix::zeros(s.ambient_dim(), n);
    for i in 0..n {
        j.set_column(i, &richardson(&f, q, i, JACOBIAN_STEP));
    }
    j
}

/// Forward differences, used only to cross-check the central stencil.
pub fn forward_jacobian(s: &EmbeddingSampler, q: &[f64], h: f64) -> DMatrix<f64> {
    let n = q.len();
    let f0 = s.eval(q);
    let mut j = DMatrix::zeros(s.ambient_dim(), n);
    for i in 0..n {
        j.set_column(i, &((s.eval(&shifted(q, i, h)) - &f0) / h));
    }
    j
}

/// `d_i d_j f` for all `i, j`.
fn second_derivatives(s: &EmbeddingSampler, q: &[f64]) -> Vec<Vec<DVector<f64>>> {
    let n = q.len();
    let h = SECOND_STEP;
    let f = |p: &[f64]| s.eval(p);
    let mut out = vec![vec![DVector::zeros(s.ambient_dim()); n]; n];
    let f0 = f(q);
    for i in 0..n {
        let d2 = (f(&shifted(q, i, h)) + f(&shifted(q, i, -h))) * 16.0
            - (f(&shifted(q, i, 2.0 * h)) + f(&shifted(q, i, -2.0 * h)))
            - &f0 * 30.0;
        out[i][i] = d2 / (12.0 * h * h);
        for j in 0..i {
            let dj = |p: &[f64]| central(&f, p, j, h);
            let v = central(&dj, q, i, h);
            out[i][j] = v.clone();
            out[j][i] = v;
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricSample {
    pub params: Vec<f64>,
    #[serde(skip)]
    pub jacobian: DMatrix<f64>,
    #[serde(skip)]
    pub induced: DMatrix<f64>,
    /// `(negative, positive)` eigenvalue counts.
    pub signature: (usize, usize),
    pub min_abs_eigenvalue: f64,
    /// `II(d_i, d_j)`, normal vectors in ambient coordinates.
    #[serde(skip)]
    pub second_fundamental: Vec<Vec<DVector<f64>>>,
    pub mean_curvature: Option<Vec<f64>>,
}

pub fn induced_metric(s: &EmbeddingSampler, q: &[f64], tol: &Tolerances) -> Result<MetricSample> {
    check_params(&s.item, q)?;
    let j = jacobian(s, q);
    let g = j.transpose() * &s.gram * &j;
    let g = (&g + g.transpose()) * 0.5;
    let eig = SymmetricEigen::new(g.clone()).eigenvalues;
    let min_abs = eig.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
    if min_abs < tol.degeneracy {
        return Err(Error::Degenerate(format!("induced metric at {q:?} has eigenvalue {min_abs:e}")));
    }
    let neg = eig.iter().filter(|x| **x < 0.0).count();
    Ok(MetricSample {
        params: q.to_vec(),
        jacobian: j,
        induced: g,
        signature: (neg, eig.len() - neg),
        min_abs_eigenvalue: min_abs,
        second_fundamental: vec![],
        mean_curvature: None,
    })
}

/// Gram-orthogonal projector onto the tangent space, `J g^{-1} J^T G`.
fn tangent_projector(jac: &DMatrix<f64>, induced: &DMatrix<f64>, gram: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let gi = induced.clone().try_inverse().ok_or_else(|| Error::Degenerate("induced metric is singular".into()))?;
    Ok(jac * gi * jac.transpose() * gram)
}

pub fn second_fundamental_and_mean_curvature(s: &EmbeddingSampler, q: &[f64], tol: &Tolerances) -> Result<MetricSample> {
    let mut sample = induced_metric(s, q, tol)?;
    let n = q.len();
    let d = s.ambient_dim();
    let pt = tangent_projector(&sample.jacobian, &sample.induced, &s.gram)?;
    let normal = DMatrix::identity(d, d) - pt;
    let dd = second_derivatives(s, q);
    let ii: Vec<Vec<DVector<f64>>> = dd.iter().map(|row| row.iter().map(|v| &normal * v).collect()).collect();
    let gi = sample.induced.clone().try_inverse().ok_or_else(|| Error::Degenerate("induced metric is singular".into()))?;
    let mut h = DVector::zeros(d);
    for i in 0..n {
        for j in 0..n {
            h += &ii[i][j] * gi[(i, j)];
        }
    }
    h /= n as f64;
    sample.second_fundamental = ii;
    sample.mean_curvature = Some(h.iter().copied().collect());
    Ok(sample)
}

/// Mean curvature measured against the orbit prediction `C g_* sigma_X`.
#[derive(Clone, Debug, Serialize)]
pub struct MeanCurvatureCheck {
    pub params: Vec<f64>,
    pub norm: f64,
    pub predicted_c: f64,
    pub measured_c: f64,
    /// Angle between `h` and `g_* sigma_X` in Euclidean coordinates.
    pub angle: f64,
}

pub fn mean_curvature_check(s: &EmbeddingSampler, chart: &OrbitChart, q: &[f64], tol: &Tolerances) -> Result<MeanCurvatureCheck> {
    let sample = second_fundamental_and_mean_curvature(s, q, tol)?;
    let h = DVector::from_vec(sample.mean_curvature.expect("computed"));
    let predicted_c = s.item.mean_curvature_constant();
    let el = chart.element(q)?;
    let dir = el.linear.column(0).into_owned();
    let measured_c = h.dot(&dir) / dir.dot(&dir);
    let angle = if h.norm() == 0.0 {
        0.0
    } else {
        (h.dot(&dir).abs() / (h.norm() * dir.norm())).clamp(-1.0, 1.0).acos()
    };
    Ok(MeanCurvatureCheck { params: q.to_vec(), norm: h.norm(), predicted_c, measured_c, angle })
}

// ---- reflections ------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct Projection {
    pub params: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Damped Gauss-Newton projection of `y` onto the image of `s`.
pub fn project(s: &EmbeddingSampler, y: &DVector<f64>, warm: &[f64], max_iter: usize) -> Projection {
    let mut q = warm.to_vec();
    let mut r = y - s.eval(&q);
    let mut mu = 1e-6;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let j = jacobian(s, &q);
        let jtj = j.transpose() * &j;
        let jtr = j.transpose() * &r;
        if jtr.norm() <= 1e-12 * (1.0 + y.norm()) || r.norm() <= 1e-14 * (1.0 + y.norm()) {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += mu * (1.0 + jtj[(i, i)]);
            }
            let Some(step) = a.lu().solve(&jtr) else { break };
            let cand: Vec<f64> = q.iter().zip(step.iter()).map(|(x, d)| x + d).collect();
            let rc = y - s.eval(&cand);
            if rc.norm() < r.norm() {
                let small = step.norm() <= 1e-15 * (1.0 + cand.iter().map(|x| x * x).sum::<f64>().sqrt());
                q = cand;
                r = rc;
                mu = (mu / 10.0).max(1e-12);
                accepted = true;
                if small {
                    converged = true;
                }
                break;
            }
            mu *= 10.0;
        }
        if !accepted || converged {
            converged = true;
            break;
        }
    }
    Projection { params: q, residual: r.norm(), iterations, converged }
}

pub const PROJECTION_MAX_ITER: usize = 50;

#[derive(Clone, Debug, Serialize)]
pub struct ReflectionResult {
    pub max_residual: f64,
    /// Per probe: the residual, or why the projection failed.
    pub probes: Vec<std::result::Result<f64, String>>,
}

/// Reflect probe points of `M` at the affine normal space through `f(base)`
/// and measure their distance back to `M`.
pub fn normal_reflection_test(s: &EmbeddingSampler, base: &[f64], probes: &[Vec<f64>], tol: &Tolerances) -> Result<ReflectionResult> {
    let sample = induced_metric(s, base, tol)?;
    let p = s.eval(base);
    let d = s.ambient_dim();
    let pt = tangent_projector(&sample.jacobian, &sample.induced, &s.gram)?;
    let refl = DMatrix::identity(d, d) - pt * 2.0;
    let results = par_map(probes, |q| {
        if q.len() != base.len() {
            return Err(format!("probe has {} parameters", q.len()));
        }
        let y = s.eval(q);
        let z = &p + &refl * (y - &p);
        let mirrored: Vec<f64> = base.iter().zip(q).map(|(b, x)| 2.0 * b - x).collect();
        let mut best: Option<Projection> = None;
        for warm in [mirrored, q.clone()] {
            let pr = project(s, &z, &warm, PROJECTION_MAX_ITER);
            if best.as_ref().is_none_or(|b| pr.residual < b.residual) {
                best = Some(pr);
            }
            if best.as_ref().is_some_and(|b| b.residual <= tol.manifold * 1e-3) {
                break;
            }
        }
        let best = best.expect("at least one start");
        if best.residual.is_finite() {
            Ok(best.residual)
        } else {
            Err("projection diverged".to_string())
        }
    });
    let max_residual = results.iter().map(|r| *r.as_ref().unwrap_or(&f64::INFINITY)).fold(0.0, f64::max);
    Ok(ReflectionResult { max_residual, probes: results })
}

// ---- curvature --------------------------------------------------------------

type Tensor4 = Vec<f64>;

fn idx4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

/// `<R(d_a, d_b) d_c, d_d>` from the Gauss equation.
fn gauss_riemann(gram: &DMatrix<f64>, ii: &[Vec<DVector<f64>>]) -> Tensor4 {
    let n = ii.len();
    let ip = |x: &DVector<f64>, y: &DVector<f64>| (x.transpose() * gram * y)[(0, 0)];
    let mut r = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    r[idx4(n, a, b, c, d)] = ip(&ii[b][c], &ii[a][d]) - ip(&ii[a][c], &ii[b][d]);
                }
            }
        }
    }
    r
}

/// Geometric data at one parameter point: metric, its inverse, Christoffel
/// symbols `Gamma^k_ij` and the second fundamental form.
struct LocalFrame {
    g: DMatrix<f64>,
    gamma: Vec<f64>,
    ii: Vec<Vec<DVector<f64>>>,
}

fn local_frame(s: &EmbeddingSampler, q: &[f64]) -> Result<LocalFrame> {
    let n = q.len();
    let d = s.ambient_dim();
    let j = jacobian(s, q);
    let g = j.transpose() * &s.gram * &j;
    let gi = g.clone().try_inverse().ok_or_else(|| Error::Degenerate(format!("induced metric at {q:?} is singular")))?;
    let dd = second_derivatives(s, q);
    let pt = &j * &gi * j.transpose() * &s.gram;
    let normal = DMatrix::identity(d, d) - pt;
    let mut gamma = vec![0.0; n * n * n];
    for i in 0..n {
        for jj in 0..n {
            // Gamma^k_ij = g^{kl} <d_i d_j f, d_l f>
            let w = j.transpose() * &s.gram * &dd[i][jj];
            let c = &gi * w;
            for k in 0..n {
                gamma[(k * n + i) * n + jj] = c[k];
            }
        }
    }
    let ii = dd.iter().map(|row| row.iter().map(|v| &normal * v).collect()).collect();
    Ok(LocalFrame { g, gamma, ii })
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureProbe {
    pub params: Vec<f64>,
    /// `max |R|` from Christoffel symbols differentiated numerically.
    pub max_riemann: f64,
    /// `max |R|` from the Gauss equation.
    pub max_riemann_gauss: f64,
    /// `max` difference between the two curvature routes.
    pub route_gap: f64,
    pub max_nabla_riemann: f64,
    pub flat: bool,
    pub parallel: bool,
    /// `(outer step, max |R|)` for a few step sizes.
    pub ladder: Vec<(f64, f64)>,
}

fn intrinsic_riemann(s: &EmbeddingSampler, q: &[f64], center: &LocalFrame, h: f64) -> Result<Tensor4> {
    let n = q.len();
    let gam = |k: usize, i: usize, j: usize, t: &[f64]| t[(k * n + i) * n + j];
    let mut dgamma: Vec<Vec<f64>> = Vec::with_capacity(n);
    for a in 0..n {
        let at = |x: f64| local_frame(s, &shifted(q, a, x)).map(|f| f.gamma);
        let (m2, m1, p1, p2) = (at(-2.0 * h)?, at(-h)?, at(h)?, at(2.0 * h)?);
        dgamma.push((0..n * n * n).map(|t| (m2[t] - p2[t] + 8.0 * (p1[t] - m1[t])) / (12.0 * h)).collect());
    }
    let gm = &center.gamma;
    let mut r = vec![0.0; n * n * n * n];
    // R^l_{c a b} = d_a Gamma^l_bc - d_b Gamma^l_ac + Gamma^l_ap Gamma^p_bc - Gamma^l_bp Gamma^p_ac
    let mut up = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for l in 0..n {
                    let mut v = gam(l, b, c, &dgamma[a]) - gam(l, a, c, &dgamma[b]);
                    for p in 0..n {
                        v += gam(l, a, p, gm) * gam(p, b, c, gm) - gam(l, b, p, gm) * gam(p, a, c, gm);
                    }
                    up[idx4(n, a, b, c, l)] = v;
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    r[idx4(n, a, b, c, d)] = (0..n).map(|l| center.g[(d, l)] * up[idx4(n, a, b, c, l)]).sum();
                }
            }
        }
    }
    Ok(r)
}

pub fn curvature_probe(s: &EmbeddingSampler, q: &[f64], tol: &Tolerances) -> Result<CurvatureProbe> {
    induced_metric(s, q, tol)?;
    let n = q.len();
    let center = local_frame(s, q)?;
    let gauss = gauss_riemann(&s.gram, &center.ii);
    let intrinsic = intrinsic_riemann(s, q, &center, OUTER_STEP)?;
    let maxv = |t: &[f64]| t.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let route_gap = gauss.iter().zip(&intrinsic).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    let mut ladder = vec![(OUTER_STEP, maxv(&intrinsic))];
    for h in [2.0 * OUTER_STEP, OUTER_STEP / 2.0] {
        ladder.push((h, maxv(&intrinsic_riemann(s, q, &center, h)?)));
    }
    // nabla_e R_abcd = d_e R_abcd - sum over slots of Gamma^p_{e slot} R_..p..
    let h = OUTER_STEP;
    let gm = &center.gamma;
    let gam = |k: usize, i: usize, j: usize| gm[(k * n + i) * n + j];
    let mut max_nabla = 0.0f64;
    for e in 0..n {
        let at = |x: f64| local_frame(s, &shifted(q, e, x)).map(|f| gauss_riemann(&s.gram, &f.ii));
        let (m2, m1, p1, p2) = (at(-2.0 * h)?, at(-h)?, at(h)?, at(2.0 * h)?);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let t = idx4(n, a, b, c, d);
                        let mut v = (m2[t] - p2[t] + 8.0 * (p1[t] - m1[t])) / (12.0 * h);
                        for p in 0..n {
                            v -= gam(p, e, a) * gauss[idx4(n, p, b, c, d)]
                                + gam(p, e, b) * gauss[idx4(n, a, p, c, d)]
                                + gam(p, e, c) * gauss[idx4(n, a, b, p, d)]
                                + gam(p, e, d) * gauss[idx4(n, a, b, c, p)];
                        }
                        max_nabla = max_nabla.max(v.abs());
                    }
                }
            }
        }
    }
    let max_riemann = maxv(&intrinsic);
    Ok(CurvatureProbe {
        params: q.to_vec(),
        max_riemann,
        max_riemann_gauss: maxv(&gauss),
        route_gap,
        max_nabla_riemann: max_nabla,
        flat: max_riemann <= tol.curvature,
        parallel: max_nabla <= tol.parallel,
        ladder,
    })
}

// ---- point clouds -----------------------------------------------------------

/// Regular grid `[-radius, radius]^n` with `per_axis` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub per_axis: usize,
    pub radius: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { per_axis: 5, radius: 1.0 }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `N` or `N:R`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("grid must be N or N:R, got {s:?}"));
        let (n, r) = match s.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (s, None),
        };
        let per_axis: usize = n.trim().parse().map_err(|_| bad())?;
        let radius = match r {
            Some(r) => r.trim().parse::<f64>().map_err(|_| bad())?,
            None => 1.0,
        };
        if per_axis == 0 || !radius.is_finite() || radius < 0.0 {
            return Err(bad());
        }
        Ok(GridSpec { per_axis, radius })
    }
}

pub const MAX_GRID_POINTS: usize = 1_000_000;

impl GridSpec {
    pub fn points(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        let total = (self.per_axis as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if total > MAX_GRID_POINTS as u128 {
            return Err(Error::Precondition(format!("grid has {total} points, limit is {MAX_GRID_POINTS}")));
        }
        let axis: Vec<f64> = if self.per_axis == 1 {
            vec![0.0]
        } else {
            (0..self.per_axis).map(|i| -self.radius + 2.0 * self.radius * i as f64 / (self.per_axis - 1) as f64).collect()
        };
        let mut out = vec![vec![]];
        for _ in 0..dim {
            out = out.into_iter().flat_map(|p| axis.iter().map(move |x| [p.clone(), vec![*x]].concat())).collect();
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointCloud {
    pub item: String,
    pub gram: Vec<Vec<f64>>,
    pub param_dim: usize,
    pub rows: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn to_csv(&self) -> String {
        let mut s = format!("# item {}\n", self.item);
        for row in &self.gram {
            s.push_str(&format!("# gram {}\n", row.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ")));
        }
        let d = self.gram.len();
        let mut head: Vec<String> = (0..self.param_dim).map(|i| format!("q{i}")).collect();
        head.extend((0..d).map(|i| format!("x{i}")));
        s.push_str(&head.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({"schema": "geom.points.v1", "item": self.item, "gram": self.gram, "param_dim": self.param_dim, "rows": self.rows})
    }
}

pub fn sample_points(s: &EmbeddingSampler, grid: &GridSpec) -> Result<PointCloud> {
    let pts = grid.points(s.param_dim())?;
    let rows = par_map(&pts, |q| {
        let mut row = q.clone();
        row.extend(s.eval(q).iter());
        row
    });
    let gram = (0..s.ambient_dim()).map(|i| s.gram.row(i).iter().copied().collect()).collect();
    Ok(PointCloud { item: s.item.to_string(), gram, param_dim: s.param_dim(), rows })
}

// ---- combined check ---------------------------------------------------------

/// Signature, reflection, mean curvature and curvature checks at one point.
pub fn geomcheck(item: &Item, params: &[f64], probes: &[Vec<f64>], tol: &Tolerances) -> Result<Report> {
    check_params(item, params)?;
    let s = EmbeddingSampler::closed_form(item);
    let chart = OrbitChart::new(item)?;
    let mut r = Report::default();
    let fail_detail = |e: &Error| format!("{e}");
    match induced_metric(&s, params, tol) {
        Ok(m) => r.push(Check::new(
            "signature",
            m.signature == item.signature(),
            format!("measured {:?}, expected {:?}", m.signature, item.signature()),
        )),
        Err(e) => {
            r.push(Check::new("signature", false, fail_detail(&e)));
            return Ok(r);
        }
    }
    let orbit_gap = (chart.point(params)? - s.eval(params)).amax();
    r.push(Check::new("route-agreement", orbit_gap <= 1e-8, format!("max |orbit - closed form| = {orbit_gap:e}")));
    match normal_reflection_test(&s, params, probes, tol) {
        Ok(res) => r.push(Check::new(
            "reflection",
            res.max_residual <= tol.manifold,
            format!("max residual {:e} over {} probes (tolerance {:e})", res.max_residual, probes.len(), tol.manifold),
        )),
        Err(e) => r.push(Check::new("reflection", false, fail_detail(&e))),
    }
    match mean_curvature_check(&s, &chart, params, tol) {
        Ok(mc) => {
            if item.mean_curvature_constant() == 0.0 {
                r.push(Check::new("mean-curvature", mc.norm <= tol.manifold, format!("|h| = {:e}", mc.norm)));
            } else {
                let ok = (mc.measured_c - mc.predicted_c).abs() <= tol.curvature && mc.angle <= 1e-3;
                r.push(Check::new(
                    "mean-curvature",
                    ok,
                    format!("C = {:.9} (predicted {:.9}), angle {:e}", mc.measured_c, mc.predicted_c, mc.angle),
                ));
            }
        }
        Err(e) => r.push(Check::new("mean-curvature", false, fail_detail(&e))),
    }
    match curvature_probe(&s, params, tol) {
        Ok(c) => {
            r.push(Check::new(
                "flat",
                c.flat == item.expected_flat(),
                format!(
                    "flat = {} (expected {}), max |R| = {:e}, Gauss route {:e}, gap {:e}",
                    c.flat,
                    item.expected_flat(),
                    c.max_riemann,
                    c.max_riemann_gauss,
                    c.route_gap
                ),
            ));
            r.push(Check::new("parallel", c.parallel, format!("max |nabla R| = {:e} (tolerance {:e})", c.max_nabla_riemann, tol.parallel)));
        }
        Err(e) => r.push(Check::new("parallel", false, fail_detail(&e))),
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;

    fn four(k: usize, l: usize, m: usize, c: i64) -> Item {
        Item::Four { k, l, m, c: int(c) }
    }

    #[test]
    fn item_strings_round_trip() {
        for s in ["item-1", "item-2:+", "item-2:-", "item-3", "item-4:k=1,l=0,m=2:c=3/2", "item-5:k=0,l=1,m=0:c=-1"] {
            let it: Item = s.parse().unwrap();
            assert_eq!(it.to_string(), s);
        }
        assert!("item-6".parse::<Item>().is_err());
        assert!("item-4:q=1".parse::<Item>().is_err());
    }

    #[test]
    fn printed_points() {
        let p = closed_form_embed(&Item::Two { plus: true }, &[1.0, 2.0]).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 4.0, 2.0]);
        let p = closed_form_embed(&Item::Three, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.as_slice(), &[0.0; 5]);
        let p = closed_form_embed(&four(0, 0, 0, 3), &[0.0, 0.0]).unwrap();
        assert!(p.amax() < 1e-15);
        assert!(closed_form_embed(&Item::Three, &[0.0]).is_err());
    }

    #[test]
    fn exp_of_translation_and_zero() {
        let g = DMatrix::identity(2, 2);
        let gen = AffineGenerator { linear: DMatrix::zeros(2, 2), translation: DVector::from_vec(vec![1.0, -2.0]) };
        let e = exp_affine(&gen, 3.0, &g);
        assert!((e.translation[0] - 3.0).abs() < 1e-14 && (e.translation[1] + 6.0).abs() < 1e-14);
        assert!(exp_affine(&gen, 0.0, &g).distance(&AffineIsometry::identity(&g)) < 1e-15);
    }

    #[test]
    fn rotation_generator_group_law() {
        let g = DMatrix::identity(2, 2);
        let gen = AffineGenerator {
            linear: DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
            translation: DVector::from_vec(vec![0.5, 0.0]),
        };
        for (s, t) in [(0.3, 0.4), (-7.0, 10.0), (10.0, 10.0)] {
            let lhs = exp_affine(&gen, s, &g).compose(&exp_affine(&gen, t, &g));
            assert!(lhs.distance(&exp_affine(&gen, s + t, &g)) < 1e-9);
            assert!(lhs.gram_defect() < 1e-9);
        }
    }

    #[test]
    fn phi_on_case1() {
        let g = catalog(&"tfull-1".parse().unwrap()).unwrap().build();
        let gen = phi_rep(&g, &g.e("A1")).unwrap();
        assert_eq!(gen.linear[(0, 0)], 0.0);
        assert_eq!(gen.translation.as_slice(), &[-1.0]);
        assert!(phi_rep(&g, &g.e("A2")).is_err());
    }

    #[test]
    fn frames_are_isometries() {
        for it in [Item::One, Item::Two { plus: true }, Item::Two { plus: false }, Item::Three, four(1, 1, 1, 1), Item::Five { k: 1, l: 2, m: 1, c: int(0) }] {
            let ch = OrbitChart::new(&it).unwrap();
            assert!(ch.frame_defect() < 1e-12, "{it}");
        }
    }

    #[test]
    fn orbit_matches_closed_form() {
        for it in [Item::One, Item::Two { plus: false }, Item::Three, four(1, 1, 1, 1), Item::Five { k: 1, l: 1, m: 1, c: int(2) }] {
            let ch = OrbitChart::new(&it).unwrap();
            let q: Vec<f64> = (0..it.param_dim()).map(|i| 0.3 - 0.17 * i as f64).collect();
            let gap = (ch.point(&q).unwrap() - closed_form_embed(&it, &q).unwrap()).amax();
            assert!(gap < 1e-10, "{it}: {gap}");
        }
    }

    #[test]
    fn item2_signature_and_reflection() {
        let tol = Tolerances::default();
        let s = EmbeddingSampler::closed_form(&Item::Two { plus: true });
        assert_eq!(induced_metric(&s, &[0.4, -0.2], &tol).unwrap().signature, (1, 1));
        let res = normal_reflection_test(&s, &[0.0, 0.0], &[vec![0.5, 0.7], vec![-1.0, 1.5]], &tol).unwrap();
        assert!(res.max_residual < 1e-10, "{res:?}");
    }

    #[test]
    fn item4_mean_curvature_constant() {
        let tol = Tolerances::default();
        let it = four(0, 0, 1, 1);
        let s = EmbeddingSampler::closed_form(&it);
        let ch = OrbitChart::new(&it).unwrap();
        let mc = mean_curvature_check(&s, &ch, &[0.2, -0.1, 0.3], &tol).unwrap();
        assert!((mc.measured_c + 5.0 / 3.0).abs() < 1e-4, "{mc:?}");
        assert!(mc.angle < 1e-3);
    }

    #[test]
    fn grid_spec_parsing() {
        assert_eq!("3".parse::<GridSpec>().unwrap(), GridSpec { per_axis: 3, radius: 1.0 });
        assert_eq!("4:0.5".parse::<GridSpec>().unwrap().points(2).unwrap().len(), 16);
        assert!("0".parse::<GridSpec>().is_err());
    }
}
