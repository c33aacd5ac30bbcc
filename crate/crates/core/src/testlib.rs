//! Analytic test functions: scalar families, antisymmetric pair families,
//! their text syntax, and a tail-decay estimator.
//!
//! Specs are written `name(key=value, ...)`, e.g.
//! `gaussian(center=0, width=1, amplitude=2)` or
//! `disjoint_bumps(b=bump(center=-2, radius=1), c=bump(center=2, radius=1))`.
//! Omitted keys take their defaults; a bare name is allowed.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::fields::{GridSpec, OffDiagonalField, ScalarField};

/// Closed family of scalar test functions. In two dimensions centers lie on
/// the first axis and profiles are radial about the center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ScalarFnSpec {
    /// `a · exp(-|x - μ|² / σ²)`
    Gaussian { center: f64, width: f64, amplitude: f64 },
    /// `x₁^d · exp(-|x|² / σ²)`
    PolyGaussian { degree: u32, width: f64 },
    /// `exp(-1 / (1 - r²))` for `r = |x - c| / radius < 1`, else 0
    Bump { center: f64, radius: f64 },
    /// 1 on the open cube `(lo, hi)^n`, 0 elsewhere
    Indicator { lo: f64, hi: f64 },
    Constant { value: f64 },
    /// `x₁`
    Linear,
}

/// A compact bump profile, used as a factor of [`OdFnSpec::DisjointBumps`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    pub center: f64,
    pub radius: f64,
}

/// Closed family of antisymmetric pair test functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum OdFnSpec {
    /// `G(x,y) = b(x) c(y) - b(y) c(x)`
    DisjointBumps { b: BumpSpec, c: BumpSpec },
    /// `d_s u(x,y) · η(|x - y| / δ)`
    CutoffGradient { u: Box<ScalarFnSpec>, s: f64, delta: f64 },
}

/// Standard bump `exp(-1 / (1 - t²))` for `|t| < 1`.
pub fn bump_profile(t: f64) -> f64 {
    let q = 1.0 - t * t;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

/// Smooth step: 0 for `t ≤ 0`, 1 for `t ≥ 1`, flat to all orders at both ends.
pub fn cutoff_eta(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let f = |x: f64| (-1.0 / (x * x)).exp();
    let a = f(t);
    a / (a + f(1.0 - t))
}

fn radial(x: [f64; 2], dim: usize, center: f64) -> f64 {
    if dim == 1 {
        (x[0] - center).abs()
    } else {
        ((x[0] - center).powi(2) + x[1] * x[1]).sqrt()
    }
}

impl BumpSpec {
    pub fn eval(&self, x: [f64; 2], dim: usize) -> f64 {
        bump_profile(radial(x, dim, self.center) / self.radius)
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.center.is_finite() {
            return Err(FracError::Spec(format!("bump radius must be positive, got {}", self.radius)));
        }
        Ok(())
    }
}

impl ScalarFnSpec {
    pub fn gaussian(center: f64, width: f64, amplitude: f64) -> Self {
        Self::Gaussian { center, width, amplitude }
    }

    pub fn bump(center: f64, radius: f64) -> Self {
        Self::Bump { center, radius }
    }

    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    /// Smooth with rapid decay or compact support.
    pub fn is_schwartz(&self) -> bool {
        matches!(self, Self::Gaussian { .. } | Self::PolyGaussian { .. } | Self::Bump { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(FracError::Spec(m));
        match *self {
            Self::Gaussian { width, center, amplitude } => {
                if !(width > 0.0) {
                    return bad(format!("gaussian width must be positive, got {width}"));
                }
                if !center.is_finite() || !amplitude.is_finite() {
                    return bad("gaussian parameters must be finite".into());
                }
            }
            Self::PolyGaussian { width, .. } => {
                if !(width > 0.0) {
                    return bad(format!("poly_gaussian width must be positive, got {width}"));
                }
            }
            Self::Bump { center, radius } => BumpSpec { center, radius }.validate()?,
            Self::Indicator { lo, hi } => {
                if !(lo < hi) {
                    return bad(format!("indicator needs lo < hi, got ({lo}, {hi})"));
                }
            }
            Self::Constant { value } => {
                if !value.is_finite() {
                    return bad("constant must be finite".into());
                }
            }
            Self::Linear => {}
        }
        Ok(())
    }

    /// Evaluates at a point of `ℝ^dim` (second coordinate ignored in 1D).
    pub fn eval(&self, x: [f64; 2], dim: usize) -> f64 {
        match *self {
            Self::Gaussian { center, width, amplitude } => {
                let r = radial(x, dim, center);
                amplitude * (-(r * r) / (width * width)).exp()
            }
            Self::PolyGaussian { degree, width } => {
                let r = radial(x, dim, 0.0);
                x[0].powi(degree as i32) * (-(r * r) / (width * width)).exp()
            }
            Self::Bump { center, radius } => BumpSpec { center, radius }.eval(x, dim),
            Self::Indicator { lo, hi } => {
                let inside = |t: f64| t > lo && t < hi;
                if inside(x[0]) && (dim == 1 || inside(x[1])) {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Constant { value } => value,
            Self::Linear => x[0],
        }
    }
}

impl OdFnSpec {
    pub fn disjoint_bumps(b: BumpSpec, c: BumpSpec) -> Self {
        Self::DisjointBumps { b, c }
    }

    /// Identically zero near the diagonal (no singular correction needed).
    pub fn is_diagonal_flat(&self) -> bool {
        true
    }

    /// Distance from the diagonal below which the field vanishes.
    pub fn gap(&self) -> f64 {
        match self {
            Self::DisjointBumps { b, c } => (b.center - c.center).abs() - b.radius - c.radius,
            Self::CutoffGradient { .. } => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::DisjointBumps { b, c } => {
                b.validate()?;
                c.validate()?;
                if !(self.gap() > 0.0) {
                    return Err(FracError::Spec(format!(
                        "bump supports overlap: centers {} and {}, radii {} and {}",
                        b.center, c.center, b.radius, c.radius
                    )));
                }
            }
            Self::CutoffGradient { u, s, delta } => {
                u.validate()?;
                if !(0.0..=1.0).contains(s) {
                    return Err(FracError::Spec(format!("cutoff_gradient order {s} not in [0, 1]")));
                }
                if !(*delta > 0.0) {
                    return Err(FracError::Spec(format!("cutoff width must be positive, got {delta}")));
                }
            }
        }
        Ok(())
    }

    /// Evaluates at a pair of points.
    pub fn eval(&self, x: [f64; 2], y: [f64; 2], dim: usize) -> f64 {
        match self {
            Self::DisjointBumps { b, c } => b.eval(x, dim) * c.eval(y, dim) - b.eval(y, dim) * c.eval(x, dim),
            Self::CutoffGradient { u, s, delta } => {
                let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
                if r == 0.0 {
                    return 0.0;
                }
                (u.eval(x, dim) - u.eval(y, dim)) / r.powf(*s) * cutoff_eta(r / delta)
            }
        }
    }
}

/// Samples a scalar spec at every node.
pub fn sample_scalar(spec: &ScalarFnSpec, grid: &Arc<GridSpec>) -> Result<ScalarField> {
    spec.validate()?;
    let dim = grid.dim();
    ScalarField::from_fn(grid.clone(), |x| spec.eval(x, dim))
}

/// Samples a pair spec on every node pair.
pub fn sample_od(spec: &OdFnSpec, grid: &Arc<GridSpec>) -> Result<OffDiagonalField> {
    spec.validate()?;
    let dim = grid.dim();
    let coords: Vec<[f64; 2]> = (0..grid.node_count()).map(|k| grid.coords(k)).collect();
    match spec {
        OdFnSpec::DisjointBumps { b, c } => {
            let bv: Vec<f64> = coords.iter().map(|&x| b.eval(x, dim)).collect();
            let cv: Vec<f64> = coords.iter().map(|&x| c.eval(x, dim)).collect();
            OffDiagonalField::from_upper_fn(grid.clone(), |i, j| bv[i] * cv[j] - bv[j] * cv[i])
        }
        OdFnSpec::CutoffGradient { u, s, delta } => {
            let uv: Vec<f64> = coords.iter().map(|&x| u.eval(x, dim)).collect();
            let g = grid.clone();
            OffDiagonalField::from_upper_fn(grid.clone(), move |i, j| {
                let r = g.distance(i, j);
                (uv[i] - uv[j]) / r.powf(*s) * cutoff_eta(r / delta)
            })
        }
    }
}

/// Least-squares slope of `log|u|` against `log|x|` over nodes with
/// `|x| ≥ (1 - tail_fraction) L`. Nodes where `u` is exactly zero are
/// skipped; an all-zero tail returns `-∞` ("faster than measurable").
pub fn decay_exponent(u: &ScalarField, tail_fraction: f64) -> Result<f64> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(FracError::InvalidParameter {
            name: "tail_fraction",
            value: tail_fraction,
            reason: "must lie in (0, 1]",
        });
    }
    let g = u.grid();
    let r0 = (1.0 - tail_fraction) * g.half_width();
    let mut pts = Vec::new();
    for (k, &v) in u.values().iter().enumerate() {
        let x = g.coords(k);
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        if r >= r0 && r > 0.0 && v != 0.0 {
            pts.push((r.ln(), v.abs().ln()));
        }
    }
    if pts.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    if pts.len() < 2 {
        return Err(FracError::Empty("tail nodes"));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(FracError::Empty("distinct tail radii"));
    }
    Ok(sxy / sxx)
}

// ---------------------------------------------------------------------------
// text syntax

#[derive(Debug, Clone)]
enum Value {
    Num(f64),
    Call(String, Vec<(Option<String>, Value)>),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> FracError {
        FracError::Spec(format!("{msg} at offset {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 || !rest.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return None;
        }
        self.pos += len;
        Some(rest[..len].to_string())
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
            .map_or(rest.len(), |(i, _)| i);
        let text = &rest[..len];
        let v = text.parse::<f64>().map_err(|_| self.err("expected a number"))?;
        self.pos += len;
        Ok(v)
    }

    fn value(&mut self) -> Result<Value> {
        self.skip_ws();
        let save = self.pos;
        if let Some(name) = self.ident() {
            if matches!(name.as_str(), "inf" | "infinity" | "nan") {
                self.pos = save;
                return Err(self.err("non-finite number"));
            }
            let mut args = Vec::new();
            if self.eat('(') {
                if !self.eat(')') {
                    loop {
                        args.push(self.arg()?);
                        if self.eat(')') {
                            break;
                        }
                        if !self.eat(',') {
                            return Err(self.err("expected `,` or `)`"));
                        }
                    }
                }
            }
            Ok(Value::Call(name, args))
        } else {
            Ok(Value::Num(self.number()?))
        }
    }

    fn arg(&mut self) -> Result<(Option<String>, Value)> {
        let save = self.pos;
        if let Some(name) = self.ident() {
            if self.eat('=') {
                return Ok((Some(name), self.value()?));
            }
        }
        self.pos = save;
        Ok((None, self.value()?))
    }

    fn finish(mut self, v: Value) -> Result<Value> {
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.err("trailing input"));
        }
        Ok(v)
    }
}

fn parse_value(src: &str) -> Result<Value> {
    let mut p = Parser { src, pos: 0 };
    let v = p.value()?;
    p.finish(v)
}

/// Named and positional arguments of one call, consumed by name.
struct Args {
    func: String,
    list: Vec<(Option<String>, Value)>,
    positional: Vec<&'static str>,
}

impl Args {
    fn new(func: String, list: Vec<(Option<String>, Value)>, positional: &[&'static str]) -> Result<Self> {
        let mut named = Vec::with_capacity(list.len());
        for (i, (key, v)) in list.into_iter().enumerate() {
            let key = match key {
                Some(k) => k,
                None => positional
                    .get(i)
                    .map(|s| s.to_string())
                    .ok_or_else(|| FracError::Spec(format!("too many arguments to `{func}`")))?,
            };
            if named.iter().any(|(k, _): &(Option<String>, Value)| k.as_deref() == Some(&key)) {
                return Err(FracError::Spec(format!("duplicate key `{key}` in `{func}`")));
            }
            named.push((Some(key), v));
        }
        Ok(Self {
            func,
            list: named,
            positional: positional.to_vec(),
        })
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        let i = self.list.iter().position(|(k, _)| k.as_deref() == Some(key))?;
        Some(self.list.remove(i).1)
    }

    fn num(&mut self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.take(key) {
            Some(Value::Num(v)) => Ok(v),
            Some(Value::Call(..)) => Err(FracError::Spec(format!("`{key}` of `{}` must be a number", self.func))),
            None => default.ok_or_else(|| FracError::Spec(format!("`{}` needs `{key}`", self.func))),
        }
    }

    fn done(self) -> Result<()> {
        if let Some((k, _)) = self.list.first() {
            return Err(FracError::Spec(format!(
                "unknown key `{}` for `{}` (expected one of {:?})",
                k.as_deref().unwrap_or("?"),
                self.func,
                self.positional
            )));
        }
        Ok(())
    }
}

fn scalar_from_value(v: Value) -> Result<ScalarFnSpec> {
    let Value::Call(name, list) = v else {
        return Err(FracError::Spec("expected a function name".into()));
    };
    let spec = match name.as_str() {
        "gaussian" => {
            let mut a = Args::new(name, list, &["center", "width", "amplitude"])?;
            let s = ScalarFnSpec::Gaussian {
                center: a.num("center", Some(0.0))?,
                width: a.num("width", Some(1.0))?,
                amplitude: a.num("amplitude", Some(1.0))?,
            };
            a.done()?;
            s
        }
        "poly_gaussian" => {
            let mut a = Args::new(name, list, &["degree", "width"])?;
            let d = a.num("degree", Some(1.0))?;
            if d < 0.0 || d.fract() != 0.0 || d > 64.0 {
                return Err(FracError::Spec(format!("poly_gaussian degree must be a small non-negative integer, got {d}")));
            }
            let s = ScalarFnSpec::PolyGaussian {
                degree: d as u32,
                width: a.num("width", Some(1.0))?,
            };
            a.done()?;
            s
        }
        "bump" => {
            let mut a = Args::new(name, list, &["center", "radius"])?;
            let s = ScalarFnSpec::Bump {
                center: a.num("center", Some(0.0))?,
                radius: a.num("radius", Some(1.0))?,
            };
            a.done()?;
            s
        }
        "indicator" => {
            let mut a = Args::new(name, list, &["lo", "hi"])?;
            let s = ScalarFnSpec::Indicator {
                lo: a.num("lo", Some(-1.0))?,
                hi: a.num("hi", Some(1.0))?,
            };
            a.done()?;
            s
        }
        "constant" => {
            let mut a = Args::new(name, list, &["value"])?;
            let s = ScalarFnSpec::Constant {
                value: a.num("value", Some(1.0))?,
            };
            a.done()?;
            s
        }
        "linear" => {
            Args::new(name, list, &[])?.done()?;
            ScalarFnSpec::Linear
        }
        other => return Err(FracError::Spec(format!("unknown scalar function `{other}`"))),
    };
    spec.validate()?;
    Ok(spec)
}

fn bump_from_value(v: Value) -> Result<BumpSpec> {
    match scalar_from_value(v)? {
        ScalarFnSpec::Bump { center, radius } => Ok(BumpSpec { center, radius }),
        other => Err(FracError::Spec(format!("expected a bump, got `{other}`"))),
    }
}

fn od_from_value(v: Value) -> Result<OdFnSpec> {
    let Value::Call(name, list) = v else {
        return Err(FracError::Spec("expected a function name".into()));
    };
    let spec = match name.as_str() {
        "disjoint_bumps" => {
            let mut a = Args::new(name, list, &["b", "c"])?;
            let b = a.take("b").map(bump_from_value).transpose()?.unwrap_or(BumpSpec {
                center: -2.0,
                radius: 1.0,
            });
            let c = a.take("c").map(bump_from_value).transpose()?.unwrap_or(BumpSpec {
                center: 2.0,
                radius: 1.0,
            });
            a.done()?;
            OdFnSpec::DisjointBumps { b, c }
        }
        "cutoff_gradient" => {
            let mut a = Args::new(name, list, &["u", "s", "delta"])?;
            let u = match a.take("u") {
                Some(v) => scalar_from_value(v)?,
                None => ScalarFnSpec::gaussian(0.0, 1.0, 1.0),
            };
            let s = a.num("s", Some(0.5))?;
            let delta = a.num("delta", Some(0.5))?;
            a.done()?;
            OdFnSpec::CutoffGradient {
                u: Box::new(u),
                s,
                delta,
            }
        }
        other => return Err(FracError::Spec(format!("unknown pair function `{other}`"))),
    };
    spec.validate()?;
    Ok(spec)
}

impl FromStr for ScalarFnSpec {
    type Err = FracError;
    fn from_str(s: &str) -> Result<Self> {
        scalar_from_value(parse_value(s)?)
    }
}

impl FromStr for OdFnSpec {
    type Err = FracError;
    fn from_str(s: &str) -> Result<Self> {
        od_from_value(parse_value(s)?)
    }
}

impl fmt::Display for ScalarFnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian { center, width, amplitude } => {
                write!(f, "gaussian(center={center:?}, width={width:?}, amplitude={amplitude:?})")
            }
            Self::PolyGaussian { degree, width } => write!(f, "poly_gaussian(degree={degree}, width={width:?})"),
            Self::Bump { center, radius } => write!(f, "bump(center={center:?}, radius={radius:?})"),
            Self::Indicator { lo, hi } => write!(f, "indicator(lo={lo:?}, hi={hi:?})"),
            Self::Constant { value } => write!(f, "constant(value={value:?})"),
            Self::Linear => write!(f, "linear()"),
        }
    }
}

impl fmt::Display for BumpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bump(center={:?}, radius={:?})", self.center, self.radius)
    }
}

impl fmt::Display for OdFnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DisjointBumps { b, c } => write!(f, "disjoint_bumps(b={b}, c={c})"),
            Self::CutoffGradient { u, s, delta } => write!(f, "cutoff_gradient(u={u}, s={s:?}, delta={delta:?})"),
        }
    }
}

impl From<ScalarFnSpec> for String {
    fn from(s: ScalarFnSpec) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for ScalarFnSpec {
    type Error = FracError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<OdFnSpec> for String {
    fn from(s: OdFnSpec) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for OdFnSpec {
    type Error = FracError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_grid;
    use approx::assert_relative_eq;

    #[test]
    fn point_values() {
        assert_eq!(ScalarFnSpec::gaussian(0.0, 1.0, 1.0).eval([0.0, 0.0], 1), 1.0);
        assert_eq!(ScalarFnSpec::constant(3.0).eval([7.5, 0.0], 1), 3.0);
        let ind: ScalarFnSpec = "indicator(-1, 1)".parse().unwrap();
        assert_eq!(ind.eval([2.0, 0.0], 1), 0.0);
        assert_eq!(ind.eval([0.5, 0.0], 1), 1.0);
        assert!(!ind.is_schwartz());
    }

    #[test]
    fn disjoint_bump_values() {
        let g = make_grid(1, 4.0, 9).unwrap();
        let spec: OdFnSpec = "disjoint_bumps()".parse().unwrap();
        let f = sample_od(&spec, &g).unwrap();
        // nodes 2 and 6 are x = -2 and x = 2
        let b = (-1.0f64).exp();
        assert_eq!(f.get(2, 6), b * b);
        assert!(f.get(2, 6) > 0.0);
        assert_eq!(f.get(3, 3), 0.0);
        for a in 0..9 {
            for c in 0..9 {
                if g.distance(a, c) < spec.gap() {
                    assert_eq!(f.get(a, c), 0.0);
                }
            }
        }
    }

    #[test]
    fn overlapping_bumps_rejected() {
        assert!("disjoint_bumps(b=bump(0, 1), c=bump(1.5, 1))".parse::<OdFnSpec>().is_err());
    }

    #[test]
    fn cutoff_gradient_far_from_diagonal() {
        let spec: OdFnSpec = "cutoff_gradient(u=gaussian(), s=0.5, delta=0.5)".parse().unwrap();
        let v = spec.eval([1.0, 0.0], [0.0, 0.0], 1);
        assert_relative_eq!(v, (-1.0f64).exp() - 1.0, max_relative = 1e-15);
        assert_eq!(cutoff_eta(2.0), 1.0);
        assert_eq!(cutoff_eta(0.0), 0.0);
        assert!(cutoff_eta(0.05) < 1e-100);
        assert_relative_eq!(cutoff_eta(0.5), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn samples_are_fixed_points_of_odd_projection() {
        let g = make_grid(1, 3.0, 17).unwrap();
        for src in ["disjoint_bumps()", "cutoff_gradient(u=bump(0.5, 2), s=0.25, delta=1)"] {
            let f = sample_od(&src.parse().unwrap(), &g).unwrap();
            let p = OffDiagonalField::antisymmetrize_fn(g.clone(), |a, b| f.get(a, b)).unwrap();
            assert_eq!(p.upper(), f.upper());
        }
    }

    #[test]
    fn decay_examples() {
        let g = make_grid(1, 10.0, 201).unwrap();
        let pw = ScalarField::from_fn(g.clone(), |x| x[0].abs().max(1e-3).powi(-3)).unwrap();
        assert!((decay_exponent(&pw, 0.5).unwrap() + 3.0).abs() < 0.05);
        let ga = sample_scalar(&ScalarFnSpec::gaussian(0.0, 1.0, 1.0), &g).unwrap();
        assert!(decay_exponent(&ga, 0.5).unwrap() < -10.0);
        let c = sample_scalar(&ScalarFnSpec::constant(2.0), &g).unwrap();
        assert!(decay_exponent(&c, 0.5).unwrap().abs() < 0.01);
        let z = ScalarField::constant(g, 0.0).unwrap();
        assert_eq!(decay_exponent(&z, 0.5).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn syntax_round_trip() {
        for src in [
            "gaussian(center=0.5, width=2, amplitude=-1)",
            "poly_gaussian(degree=3, width=1.5)",
            "bump(center=-1, radius=0.25)",
            "indicator(lo=-1, hi=1)",
            "constant(value=3)",
            "linear()",
        ] {
            let s: ScalarFnSpec = src.parse().unwrap();
            let again: ScalarFnSpec = s.to_string().parse().unwrap();
            assert_eq!(s, again);
        }
        let od: OdFnSpec = "cutoff_gradient(u=poly_gaussian(2), delta=0.75)".parse().unwrap();
        assert_eq!(od, od.to_string().parse().unwrap());
    }

    #[test]
    fn syntax_errors() {
        for bad in ["gaussian(width=-1)", "gaussian(foo=1)", "wobble()", "gaussian(1,2,3,4)", "bump(radius=1", "gaussian() x"] {
            assert!(bad.parse::<ScalarFnSpec>().is_err(), "{bad}");
        }
    }
}
