use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::network::{VertexId, Window};

/// Real function on a finite window. Evaluating outside the window is an
/// error.
#[derive(Clone, Debug)]
pub struct VertexFunction {
    window: Window,
    values: Vec<f64>,
}

impl VertexFunction {
    pub fn new(window: Window, values: Vec<f64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(invalid(format!("{} values for a window of {} vertices", values.len(), window.len())));
        }
        Ok(VertexFunction { window, values })
    }

    pub fn zeros(window: Window) -> Self {
        let n = window.len();
        VertexFunction { window, values: vec![0.0; n] }
    }

    pub fn constant(window: Window, value: f64) -> Self {
        let n = window.len();
        VertexFunction { window, values: vec![value; n] }
    }

    pub fn from_fn(window: Window, f: impl Fn(VertexId) -> f64) -> Self {
        let values = window.vertices().iter().map(|&v| f(v)).collect();
        VertexFunction { window, values }
    }

    pub fn try_from_fn(window: Window, f: impl Fn(VertexId) -> Result<f64>) -> Result<Self> {
        let values = window.vertices().iter().map(|&v| f(v)).collect::<Result<Vec<_>>>()?;
        Ok(VertexFunction { window, values })
    }

    /// Kronecker delta δ_x.
    pub fn delta(window: Window, x: VertexId) -> Result<Self> {
        let i = window.require(x)?;
        let mut f = Self::zeros(window);
        f.values[i] = 1.0;
        Ok(f)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, x: VertexId) -> Result<f64> {
        Ok(self.values[self.window.require(x)?])
    }

    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn set(&mut self, x: VertexId, value: f64) -> Result<()> {
        let i = self.window.require(x)?;
        self.values[i] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.window.vertices().iter().copied().zip(self.values.iter().copied())
    }

    pub fn check_same_window(&self, other: &VertexFunction) -> Result<()> {
        if self.window.same_as(&other.window) {
            Ok(())
        } else {
            Err(Error::WindowMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        VertexFunction { window: self.window.clone(), values: self.values.iter().map(|&x| f(x)).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|x| s * x)
    }

    pub fn add(&self, other: &VertexFunction) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &VertexFunction) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &VertexFunction, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_window(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect();
        Ok(VertexFunction { window: self.window.clone(), values })
    }

    /// Representative with value zero at `o`.
    pub fn gauged(&self, o: VertexId) -> Result<Self> {
        let shift = self.get(o)?;
        Ok(self.map(|x| x - shift))
    }

    /// Moves the function onto another window; vertices missing from `self`
    /// get `fill`.
    pub fn transplant(&self, window: Window, fill: f64) -> Self {
        let values = window.vertices().iter().map(|&v| self.window.position(v).map(|i| self.values[i]).unwrap_or(fill)).collect();
        VertexFunction { window, values }
    }

    /// CSV with columns `vertex,value`, ascending vertex order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("vertex,value\n");
        for (v, x) in self.iter() {
            let _ = writeln!(s, "\"{v}\",{}", fmt_f64(x));
        }
        s
    }
}

/// Shortest round-trip formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Antisymmetric edge function stored once per window edge, oriented from
/// the smaller to the larger vertex.
#[derive(Clone, Debug)]
pub struct EdgeFlow {
    window: Window,
    values: Vec<f64>,
}

impl EdgeFlow {
    pub fn new(window: Window, values: Vec<f64>) -> Result<Self> {
        if values.len() != window.edges().len() {
            return Err(invalid("flow length differs from window edge count"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("flow values must be finite"));
        }
        Ok(EdgeFlow { window, values })
    }

    pub fn zeros(window: Window) -> Self {
        let n = window.edges().len();
        EdgeFlow { window, values: vec![0.0; n] }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Values in canonical orientation, aligned with `window.edges()`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn locate(&self, x: VertexId, y: VertexId) -> Result<(usize, f64)> {
        let i = self.window.require(x)?;
        let j = self.window.require(y)?;
        let &(_, _, e) =
            self.window.neighbors(i).iter().find(|&&(k, _, _)| k == j).ok_or_else(|| invalid(format!("({x},{y}) is not an edge of the window")))?;
        Ok((e, if i < j { 1.0 } else { -1.0 }))
    }

    /// f(x,y) = −f(y,x).
    pub fn get(&self, x: VertexId, y: VertexId) -> Result<f64> {
        let (e, sign) = self.locate(x, y)?;
        Ok(sign * self.values[e])
    }

    pub fn add_oriented(&mut self, x: VertexId, y: VertexId, amount: f64) -> Result<()> {
        let (e, sign) = self.locate(x, y)?;
        self.values[e] += sign * amount;
        Ok(())
    }

    /// Unit flow χ_C around a closed walk.
    pub fn cycle_indicator(window: Window, cycle: &[VertexId]) -> Result<Self> {
        let mut f = EdgeFlow::zeros(window);
        for (a, b) in cycle_steps(cycle) {
            f.add_oriented(a, b, 1.0)?;
        }
        Ok(f)
    }
}

/// Consecutive steps of a closed walk; the walk is closed automatically if
/// the last vertex differs from the first.
pub(crate) fn cycle_steps(cycle: &[VertexId]) -> Vec<(VertexId, VertexId)> {
    if cycle.len() < 2 {
        return Vec::new();
    }
    let mut steps: Vec<_> = cycle.windows(2).map(|w| (w[0], w[1])).collect();
    if cycle.first() != cycle.last() {
        steps.push((*cycle.last().unwrap(), cycle[0]));
    }
    steps
}
