use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::networks::{BinaryTree, Lattice, LineNetwork};
use crate::bratteli::{BratteliDiagram, ConductanceRule};
use crate::error::{invalid, Error, Result};
use crate::network::{materialize_ball, Network, VertexId, Window};
use crate::operators::{fmt_f64, VertexFunction};

type Eval = Arc<dyn Fn(VertexId) -> Result<f64> + Send + Sync>;
type Exempt = Arc<dyn Fn(VertexId) -> bool + Send + Sync>;

/// Radius of the window every closed form is checked on at build time.
pub const BUILD_RADIUS: usize = 6;
pub const BUILD_RTOL: f64 = 1e-12;

/// Defining equation of a closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormKind {
    /// Δf = 0
    Harmonic,
    /// Δv = δ_x − δ_y
    Dipole { x: VertexId, y: VertexId },
    /// Δw = δ_x
    Monopole { x: VertexId },
}

impl FormKind {
    fn source(&self, v: VertexId) -> f64 {
        match *self {
            FormKind::Harmonic => 0.0,
            FormKind::Dipole { x, y } => (v == x) as i32 as f64 - (v == y) as i32 as f64,
            FormKind::Monopole { x } => (v == x) as i32 as f64,
        }
    }
}

/// Exact evaluator attached to a fixture.
#[derive(Clone)]
pub struct ClosedForm {
    pub name: String,
    pub kind: FormKind,
    eval: Eval,
    exempt: Option<Exempt>,
}

impl std::fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClosedForm").field("name", &self.name).field("kind", &self.kind).finish()
    }
}

impl ClosedForm {
    pub fn new(name: &str, kind: FormKind, eval: impl Fn(VertexId) -> Result<f64> + Send + Sync + 'static) -> Self {
        ClosedForm { name: name.to_string(), kind, eval: Arc::new(eval), exempt: None }
    }

    /// Vertices where the defining equation is not claimed.
    pub fn exempting(mut self, exempt: impl Fn(VertexId) -> bool + Send + Sync + 'static) -> Self {
        self.exempt = Some(Arc::new(exempt));
        self
    }

    pub fn at(&self, v: VertexId) -> Result<f64> {
        (self.eval)(v)
    }

    pub fn is_exempt(&self, v: VertexId) -> bool {
        self.exempt.as_ref().is_some_and(|e| e(v))
    }

    pub fn on_window(&self, window: &Window) -> Result<VertexFunction> {
        VertexFunction::try_from_fn(window.clone(), |v| self.at(v))
    }

    /// Largest |Δf(v) − source(v)| over closed, non-exempt window vertices,
    /// together with the largest relative residual (scaled by Σ c_vy(|f(v)|+|f(y)|)).
    pub fn residual(&self, window: &Window) -> Result<(f64, f64)> {
        let f = self.on_window(window)?;
        let mut abs = 0.0f64;
        let mut rel = 0.0f64;
        for i in 0..window.len() {
            let v = window.vertex(i);
            if !window.is_closed(i) || self.is_exempt(v) {
                continue;
            }
            let fv = f.at(i);
            let mut lap = 0.0;
            let mut scale = 1.0f64;
            for &(j, c, _) in window.neighbors(i) {
                lap += c * (fv - f.at(j));
                scale += c * (fv.abs() + f.at(j).abs());
            }
            let r = (lap - self.kind.source(v)).abs();
            abs = abs.max(r);
            rel = rel.max(r / scale);
        }
        Ok((abs, rel))
    }
}

/// Documented classification of a fixture; `None` where no claim is made.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Expected {
    pub transient: Option<bool>,
    /// Whether a nonconstant harmonic function of finite energy exists.
    pub finite_energy_harmonic: Option<bool>,
    pub harm_dimension: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormCheck {
    pub name: String,
    pub residual: f64,
    pub relative: f64,
}

/// A model network with exact closed forms attached. Every closed form has
/// been checked against its defining equation on a radius-6 ball.
#[derive(Clone)]
pub struct Fixture {
    pub name: String,
    pub network: Arc<dyn Network>,
    pub diagram: Option<Arc<BratteliDiagram>>,
    pub forms: Vec<ClosedForm>,
    pub expected: Expected,
    /// Integer-valued network and forms: residuals must vanish exactly.
    pub exact: bool,
    pub checks: Vec<FormCheck>,
}

impl std::fmt::Debug for Fixture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fixture").field("name", &self.name).field("forms", &self.forms).field("expected", &self.expected).field("checks", &self.checks).finish()
    }
}

impl Fixture {
    fn build(
        name: &str,
        network: Arc<dyn Network>,
        diagram: Option<Arc<BratteliDiagram>>,
        forms: Vec<ClosedForm>,
        expected: Expected,
        exact: bool,
    ) -> Result<Fixture> {
        let mut fx = Fixture { name: name.to_string(), network, diagram, forms, expected, exact, checks: vec![] };
        let root = fx.origin();
        let window = materialize_ball(fx.network.as_ref(), root, BUILD_RADIUS)?;
        for form in &fx.forms {
            let (residual, relative) = form.residual(&window)?;
            let ok = if exact { residual == 0.0 } else { relative <= BUILD_RTOL };
            if !ok {
                return Err(Error::Numerical(format!("fixture {name}: closed form {} has residual {residual:e} on the build window", form.name)));
            }
            fx.checks.push(FormCheck { name: form.name.clone(), residual, relative });
        }
        Ok(fx)
    }

    pub fn origin(&self) -> VertexId {
        self.network.origin().expect("fixture networks have an origin")
    }

    pub fn form(&self, name: &str) -> Option<&ClosedForm> {
        self.forms.iter().find(|f| f.name == name)
    }

    pub fn harmonic_forms(&self) -> impl Iterator<Item = &ClosedForm> {
        self.forms.iter().filter(|f| f.kind == FormKind::Harmonic)
    }

    /// Closed forms on the ball of `radius` around the origin; one column
    /// per form.
    pub fn to_csv(&self, radius: usize) -> Result<String> {
        let window = materialize_ball(self.network.as_ref(), self.origin(), radius)?;
        let mut s = String::from("vertex");
        for f in &self.forms {
            let _ = write!(s, ",{}", f.name);
        }
        s.push('\n');
        let cols = self.forms.iter().map(|f| f.on_window(&window)).collect::<Result<Vec<_>>>()?;
        for (i, v) in window.vertices().iter().enumerate() {
            let _ = write!(s, "\"{v}\"");
            for c in &cols {
                let _ = write!(s, ",{}", fmt_f64(c.at(i)));
            }
            s.push('\n');
        }
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineVariant {
    N0Linear,
    ZUnit,
    ZSummable,
    ZGeometric,
    N0Geometric,
    N0Summable,
}

impl LineVariant {
    pub const ALL: [LineVariant; 6] =
        [LineVariant::N0Linear, LineVariant::ZUnit, LineVariant::ZSummable, LineVariant::ZGeometric, LineVariant::N0Geometric, LineVariant::N0Summable];

    pub fn name(self) -> &'static str {
        match self {
            LineVariant::N0Linear => "line_n0_linear",
            LineVariant::ZUnit => "line_z_unit",
            LineVariant::ZSummable => "line_z_summable",
            LineVariant::ZGeometric => "line_z_geometric",
            LineVariant::N0Geometric => "line_n0_geometric",
            LineVariant::N0Summable => "line_n0_summable",
        }
    }

    fn uses_lambda(self) -> bool {
        !matches!(self, LineVariant::N0Linear | LineVariant::ZUnit)
    }
}

fn int_of(v: VertexId) -> Result<i64> {
    v.as_int().ok_or_else(|| Error::InvalidVertex { vertex: v.to_string(), reason: "expected an integer vertex".into() })
}

/// Σ_{i=1}^{k} 1/c_{i−1,i} for k ≥ 0, and −Σ_{i=k+1}^{0} 1/c_{i−1,i} for k < 0:
/// the potential with unit current flowing in the +1 direction, zero at 0.
pub fn line_potential(line: &LineNetwork, k: i64) -> f64 {
    if k >= 0 {
        (1..=k).fold(0.0, |s, i| s + 1.0 / line.conductance(i - 1))
    } else {
        -(k + 1..=0).fold(0.0, |s, i| s + 1.0 / line.conductance(i - 1))
    }
}

/// Dipole v_n on a line: Δv_n = δ_n − δ_0, v_n(0) = 0, constant beyond n
/// and on the far side of 0. For n < 0 and symmetric conductances this is
/// the mirror image v_{−n}(−k).
pub fn line_dipole(line: &LineNetwork, n: i64, k: i64) -> f64 {
    if n >= 0 {
        line_potential(line, k.clamp(0, n))
    } else {
        0.0 - line_potential(line, k.clamp(n, 0))
    }
}

/// Dipoles v_n of the unit line: v_n(i) = clamp(i, 0, n) for n ≥ 0 and
/// v_n(i) = v_{−n}(−i) for n < 0.
pub fn z_unit_dipole(n: i64, i: i64) -> i64 {
    if n >= 0 {
        i.clamp(0, n)
    } else {
        z_unit_dipole(-n, -i)
    }
}

fn check_lambda(lambda: f64, min_exclusive: f64) -> Result<()> {
    if !(lambda > min_exclusive) || !lambda.is_finite() {
        return Err(invalid(format!("λ must be finite and > {min_exclusive}, got {lambda}")));
    }
    Ok(())
}

fn line_form(name: &str, kind: FormKind, line: &Arc<LineNetwork>, f: impl Fn(&LineNetwork, i64) -> f64 + Send + Sync + 'static) -> ClosedForm {
    let line = line.clone();
    ClosedForm::new(name, kind, move |v| Ok(f(&line, int_of(v)?)))
}

fn dipole_forms(line: &Arc<LineNetwork>, ns: &[i64]) -> Vec<ClosedForm> {
    ns.iter()
        .map(|&n| {
            let kind = FormKind::Dipole { x: VertexId::Int(n), y: VertexId::Int(0) };
            line_form(&format!("dipole_{n}"), kind, line, move |l, k| line_dipole(l, n, k))
        })
        .collect()
}

/// Line fixtures. `lambda` applies to the geometric and summable variants
/// and must exceed 1.
pub fn line_fixture(variant: LineVariant, lambda: f64) -> Result<Fixture> {
    if variant.uses_lambda() {
        check_lambda(lambda, 1.0)?;
    }
    let (line, exact) = match variant {
        LineVariant::N0Linear => (LineNetwork::n0_linear(), false),
        LineVariant::ZUnit => (LineNetwork::z_unit(), true),
        LineVariant::ZSummable | LineVariant::ZGeometric => (LineNetwork::z_geometric(lambda), false),
        LineVariant::N0Geometric => (LineNetwork::n0_geometric(lambda), false),
        LineVariant::N0Summable => (LineNetwork::n0_summable(lambda), false),
    };
    let name = variant.name();
    let line = Arc::new(LineNetwork::from_law(line.domain(), name, {
        let l = line.clone();
        move |i| l.conductance(i)
    }));
    let mut forms = Vec::new();
    let expected;
    match variant {
        LineVariant::N0Linear => {
            forms.extend(dipole_forms(&line, &[1, 3]));
            expected = Expected { transient: Some(false), finite_energy_harmonic: Some(false), harm_dimension: Some("constants only".into()) };
        }
        LineVariant::ZUnit => {
            forms.push(line_form("linear", FormKind::Harmonic, &line, |_, k| k as f64));
            forms.extend(dipole_forms(&line, &[1, 3, -3]));
            expected = Expected { transient: Some(false), finite_energy_harmonic: Some(false), harm_dimension: Some("2 (constants and n)".into()) };
        }
        LineVariant::ZSummable => {
            forms.push(line_form("u", FormKind::Harmonic, &line, line_potential));
            expected = Expected { transient: Some(true), finite_energy_harmonic: Some(true), harm_dimension: Some("1 modulo constants".into()) };
        }
        LineVariant::ZGeometric => {
            // w₀ ∝ r^{|n|}; the scale is fixed by the residual at the pole.
            let r = 1.0 / lambda;
            let shape = move |k: i64| r.powi(k.unsigned_abs() as i32);
            let lap0 = line.conductance(0) * (shape(0) - shape(1)) + line.conductance(-1) * (shape(0) - shape(-1));
            let scale = 1.0 / lap0;
            let w = move |k: i64| scale * shape(k);
            forms.push(line_form("monopole_0", FormKind::Monopole { x: VertexId::Int(0) }, &line, move |_, k| w(k)));
            forms.push(line_form("h", FormKind::Harmonic, &line, move |_, k| k.signum() as f64 * (w(0) - w(k))));
            forms.extend(dipole_forms(&line, &[1, 3, -3]));
            expected = Expected { transient: Some(true), finite_energy_harmonic: Some(true), harm_dimension: Some("1 modulo constants".into()) };
        }
        LineVariant::N0Geometric | LineVariant::N0Summable => {
            // w₀(k) = Σ_{i>k} 1/c_{i−1,i}; both laws are c_0·λ^i
            let total = lambda / (lambda - 1.0) / line.conductance(0);
            let tail = move |_: &LineNetwork, k: i64| total * lambda.powi(-(k as i32));
            forms.push(line_form("monopole_0", FormKind::Monopole { x: VertexId::Int(0) }, &line, tail));
            forms.extend(dipole_forms(&line, &[1, 3]));
            if variant == LineVariant::N0Summable {
                forms.push(line_form("u", FormKind::Harmonic, &line, line_potential).exempting(|v| v == VertexId::Int(0)));
            }
            expected = Expected { transient: Some(true), finite_energy_harmonic: Some(false), harm_dimension: Some("constants only".into()) };
        }
    }
    Fixture::build(name, line, None, forms, expected, exact)
}

/// f_λ on the binary tree at vertex x_n(j), 1 ≤ j ≤ 2ⁿ.
///
/// Top spine: a_0 = 0, a_{i+1} − a_i = λ^{1−i}. The subtree rooted at
/// x_{m+1}(2) (the second child of the spine vertex x_m(1)) is constant a_m.
/// The bottom half is the negative mirror image.
pub fn tree_f_lambda(lambda: f64, n: i64, j: i64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let half = 1i64 << (n - 1);
    if j > half {
        return -tree_f_lambda(lambda, n, (1i64 << n) + 1 - j);
    }
    let spine = |m: i64| -> f64 { (0..m).map(|i| lambda.powi(1 - i as i32)).sum() };
    // deepest level k at which the ancestor is the spine vertex x_k(1)
    let mut k = n;
    while k > 0 {
        let idx = (j - 1) >> (n - k);
        if idx == 0 {
            break;
        }
        k -= 1;
    }
    spine(k)
}

pub fn binary_tree_fixture(lambda: f64) -> Result<Fixture> {
    check_lambda(lambda, 0.0)?;
    let tree = Arc::new(BinaryTree::new(lambda)?);
    let f = ClosedForm::new("f_lambda", FormKind::Harmonic, move |v| {
        let (n, j) = v.as_pair().ok_or_else(|| invalid(format!("{v} is not a tree vertex")))?;
        Ok(tree_f_lambda(lambda, n, j))
    });
    let monopole = ClosedForm::new("monopole_root", FormKind::Monopole { x: BinaryTree::root() }, move |v| {
        let (n, _) = v.as_pair().ok_or_else(|| invalid(format!("{v} is not a tree vertex")))?;
        // Σ_{i≥n} 1/(2^{i+1} λ^i)
        let q = 1.0 / (2.0 * lambda);
        Ok(0.5 * q.powi(n as i32) / (1.0 - q))
    });
    let mut forms = vec![f];
    if lambda > 0.5 {
        forms.push(monopole);
    }
    let expected = Expected { transient: Some(lambda > 0.5), finite_energy_harmonic: Some(lambda > 1.0), harm_dimension: Some("infinite".into()) };
    Fixture::build("binary_tree", tree, None, forms, expected, lambda == 1.0)
}

/// h(n, i) = n(n+1)/2 − i(n+1) on the unit Pascal graph.
pub fn pascal_h(n: i64, i: i64) -> i64 {
    n * (n + 1) / 2 - i * (n + 1)
}

pub const DEFAULT_DIAGRAM_DEPTH: usize = 32;

pub fn pascal_fixture(rule: &ConductanceRule, depth: usize) -> Result<Fixture> {
    let unit = match rule {
        ConductanceRule::Unit => true,
        ConductanceRule::LambdaPowN { lambda } => {
            check_lambda(*lambda, 0.0)?;
            false
        }
        ConductanceRule::Explicit { .. } => return Err(invalid("pascal fixture takes the unit or λⁿ rule")),
    };
    if depth <= BUILD_RADIUS {
        return Err(invalid(format!("pascal fixture needs depth > {BUILD_RADIUS}")));
    }
    let d = Arc::new(BratteliDiagram::pascal(depth, rule)?);
    let mut forms = Vec::new();
    if unit {
        forms.push(ClosedForm::new("h", FormKind::Harmonic, |v| {
            let (n, i) = v.as_pair().ok_or_else(|| invalid(format!("{v} is not a diagram vertex")))?;
            Ok(pascal_h(n, i) as f64)
        }));
    }
    let transient = match rule {
        ConductanceRule::LambdaPowN { lambda } => *lambda > 1.0,
        _ => false,
    };
    let expected = Expected { transient: Some(transient), finite_energy_harmonic: None, harm_dimension: Some("infinite".into()) };
    let net: Arc<dyn Network> = Arc::new(d.network());
    Fixture::build("pascal", net, Some(d), forms, expected, unit)
}

/// f_n = f₁ Σ_{i=0}^{n−1} λ^{−i} for n ≥ 1, f_0 = 0. Harmonic on levels ≥ 1
/// when f₁ is constant; for other f₁ the residual is reported by
/// `bratteli::level_harmonic_residuals`.
pub fn stationary_family(f1: &[f64], lambda: f64, n: usize) -> Vec<f64> {
    let s: f64 = (0..n).map(|i| lambda.powi(-(i as i32))).sum();
    f1.iter().map(|x| x * s).collect()
}

fn check_stationary(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(invalid("A must be square and nonempty"));
    }
    if a != &a.transpose() {
        return Err(invalid("A must be symmetric"));
    }
    if a.iter().any(|&x| x < 0.0 || x.fract() != 0.0) {
        return Err(invalid("A must have nonnegative integer entries"));
    }
    let n = a.nrows();
    if (0..n).any(|i| a.row(i).iter().all(|&x| x == 0.0)) {
        return Err(invalid("A has a zero row"));
    }
    if crate::linalg::rank(a, crate::linalg::RANK_RTOL) < n {
        return Err(invalid("A must be invertible"));
    }
    Ok(())
}

pub fn stationary_fixture(a: &DMatrix<f64>, lambda: f64, depth: usize) -> Result<Fixture> {
    check_lambda(lambda, 0.0)?;
    check_stationary(a)?;
    if depth <= BUILD_RADIUS {
        return Err(invalid(format!("stationary fixture needs depth > {BUILD_RADIUS}")));
    }
    let d = Arc::new(BratteliDiagram::stationary(a, lambda, depth)?);
    let dim = a.nrows();
    let constant = ClosedForm::new("constant_family", FormKind::Harmonic, move |v| {
        let (n, _) = v.as_pair().ok_or_else(|| invalid(format!("{v} is not a diagram vertex")))?;
        Ok(stationary_family(&[1.0], lambda, n as usize)[0])
    })
    .exempting(|v| matches!(v, VertexId::Pair(0, _)));
    let integer = lambda == 1.0;
    let expected = Expected {
        transient: Some(lambda > 1.0),
        finite_energy_harmonic: Some(lambda > 1.0),
        harm_dimension: Some(format!("{} claimed", dim.saturating_sub(1))),
    };
    let net: Arc<dyn Network> = Arc::new(d.network());
    Fixture::build("stationary", net, Some(d), vec![constant], expected, integer)
}

pub fn lattice_fixture(dim: usize) -> Result<Fixture> {
    let lattice = Arc::new(Lattice::new(dim)?);
    let coordinate = ClosedForm::new("coordinate_1", FormKind::Harmonic, |v| match v {
        VertexId::Int(k) => Ok(k as f64),
        _ => v.coords().map(|c| c[0] as f64).ok_or_else(|| invalid(format!("{v} is not a lattice point"))),
    });
    let mut forms = vec![coordinate];
    if dim == 1 {
        forms.extend((1..=3).map(|n| {
            ClosedForm::new(&format!("dipole_{n}"), FormKind::Dipole { x: VertexId::Int(n), y: VertexId::Int(0) }, move |v| {
                Ok(z_unit_dipole(n, int_of(v)?) as f64)
            })
        }));
    }
    let expected = Expected { transient: Some(dim >= 3), finite_energy_harmonic: Some(false), harm_dimension: Some("infinite".into()) };
    Fixture::build(&format!("lattice_{dim}"), lattice, None, forms, expected, true)
}

/// Parameters for looking fixtures up by name.
#[derive(Clone, Debug, Serialize, Deserialize, Default)]
pub struct FixtureParams {
    pub lambda: Option<f64>,
    pub depth: Option<usize>,
    pub dim: Option<usize>,
    /// Stationary incidence A.
    pub matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegistryEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub params: &'static str,
}

pub fn registry() -> Vec<RegistryEntry> {
    vec![
        RegistryEntry { name: "line_n0_linear", description: "ℕ₀ with c_{n,n+1} = n+1; dipoles", params: "" },
        RegistryEntry { name: "line_z_unit", description: "ℤ with unit conductances; dipoles v_n, linear harmonic", params: "" },
        RegistryEntry {
            name: "line_z_summable",
            description: "ℤ with c_{i,i+1} = λ^max(|i|,|i+1|); finite-energy harmonic u",
            params: "lambda > 1 (default 2)",
        },
        RegistryEntry {
            name: "line_z_geometric", description: "ℤ with c_{i,i+1} = λ^max(|i|,|i+1|); monopole, h, dipoles", params: "lambda > 1 (default 2)"
        },
        RegistryEntry { name: "line_n0_geometric", description: "ℕ₀ with c_{i,i+1} = λ^i; monopole, dipoles", params: "lambda > 1 (default 2)" },
        RegistryEntry { name: "line_n0_summable", description: "ℕ₀ with c_{n,n+1} = λ^{n+1}; monopole, u", params: "lambda > 1 (default 2)" },
        RegistryEntry { name: "binary_tree", description: "rooted binary tree with c = λⁿ on level-n edges; f_λ", params: "lambda > 0 (default 2)" },
        RegistryEntry {
            name: "pascal",
            description: "Pascal graph; integer harmonic h for unit conductance",
            params: "lambda (omit for unit), depth (default 32)",
        },
        RegistryEntry {
            name: "stationary",
            description: "stationary diagram with symmetric invertible A, c = λⁿ",
            params: "matrix (default [[2,1],[1,2]]), lambda (default 2), depth (default 32)",
        },
        RegistryEntry { name: "lattice", description: "ℤ^d with unit conductances", params: "dim in 1..3 (default 2)" },
    ]
}

pub fn fixture_by_name(name: &str, p: &FixtureParams) -> Result<Fixture> {
    let lambda = p.lambda.unwrap_or(2.0);
    let depth = p.depth.unwrap_or(DEFAULT_DIAGRAM_DEPTH);
    if let Some(v) = LineVariant::ALL.iter().find(|v| v.name() == name) {
        return line_fixture(*v, lambda);
    }
    match name {
        "binary_tree" => binary_tree_fixture(lambda),
        "pascal" => {
            let rule = match p.lambda {
                Some(l) => ConductanceRule::LambdaPowN { lambda: l },
                None => ConductanceRule::Unit,
            };
            pascal_fixture(&rule, depth)
        }
        "stationary" => {
            let rows = p.matrix.clone().unwrap_or_else(|| vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(invalid("stationary matrix must be square"));
            }
            let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
            stationary_fixture(&a, lambda, depth)
        }
        "lattice" => lattice_fixture(p.dim.unwrap_or(2)),
        _ if name.starts_with("lattice_") => {
            let d = name["lattice_".len()..].parse().map_err(|_| invalid(format!("unknown fixture {name}")))?;
            lattice_fixture(d)
        }
        _ => Err(invalid(format!("unknown fixture {name}; see the registry"))),
    }
}
