//! Polynomial strain fields, induced bar elongations and numerical probes of
//! the discrete-to-continuum limits of wagon-wheel and boundary conditions.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{corner_angle, line_distance, Point};
use crate::scalar::Real;
use crate::truss::{Edge, Truss};

/// Largest total degree accepted for a strain component.
pub const MAX_STRAIN_DEGREE: u32 = 6;

/// Polynomial in `x` and `y`, stored as `(i, j) -> c` for `c x^i y^j`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly<T> {
    pub terms: BTreeMap<(u32, u32), T>,
}

impl<T: Real> Poly<T> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::monomial(c, 0, 0)
    }

    pub fn monomial(c: T, i: u32, j: u32) -> Self {
        let mut p = Poly::zero();
        p.add_term(c, i, j);
        p
    }

    fn add_term(&mut self, c: T, i: u32, j: u32) {
        let e = self.terms.entry((i, j)).or_insert_with(T::zero);
        *e += c;
        if *e == T::zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn eval(&self, x: T, y: T) -> T {
        self.terms.iter().fold(T::zero(), |acc, ((i, j), c)| acc + *c * x.powi(*i as i32) * y.powi(*j as i32))
    }

    pub fn at(&self, p: Point<T>) -> T {
        self.eval(p.x, p.y)
    }

    pub fn dx(&self) -> Self {
        let mut out = Poly::zero();
        for ((i, j), c) in &self.terms {
            if *i > 0 {
                out.add_term(*c * T::lit(*i as f64), i - 1, *j);
            }
        }
        out
    }

    pub fn dy(&self) -> Self {
        let mut out = Poly::zero();
        for ((i, j), c) in &self.terms {
            if *j > 0 {
                out.add_term(*c * T::lit(*j as f64), *i, j - 1);
            }
        }
        out
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for ((i, j), c) in &o.terms {
            out.add_term(*c, *i, *j);
        }
        out
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut out = Poly::zero();
        for ((i, j), c) in &self.terms {
            out.add_term(*c * s, *i, *j);
        }
        out
    }

    /// Parses sums of terms like `3*x^2*y - 0.5*y + 2`.
    pub fn parse(src: &str) -> Result<Self> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        let chars: Vec<char> = s.chars().collect();
        for (k, ch) in chars.iter().enumerate() {
            let exp_sign = k > 0 && matches!(chars[k - 1], 'e' | 'E') && k > 1 && chars[k - 2].is_ascii_digit();
            if (*ch == '+' || *ch == '-') && !cur.is_empty() && !exp_sign {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(*ch);
        }
        terms.push(cur);
        let mut out = Poly::zero();
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1.0, rest.to_string()),
                None => (1.0, term.trim_start_matches('+').to_string()),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in '{src}'")));
            }
            let (mut coef, mut i, mut j) = (sign, 0u32, 0u32);
            for factor in body.split('*') {
                let (base, pow) = match factor.split_once('^') {
                    Some((b, p)) => (b, p.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in '{factor}'")))?),
                    None => (factor, 1),
                };
                match base {
                    "x" => i += pow,
                    "y" => j += pow,
                    num => {
                        let v: f64 = num.parse().map_err(|_| Error::Parse(format!("bad factor '{factor}'")))?;
                        coef *= v.powi(pow as i32);
                    }
                }
            }
            out.add_term(T::lit(coef), i, j);
        }
        Ok(out)
    }
}

impl<T: Real> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, ((i, j), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if *i > 0 {
                write!(f, "*x^{i}")?;
            }
            if *j > 0 {
                write!(f, "*y^{j}")?;
            }
        }
        Ok(())
    }
}

/// Symmetric strain tensor field.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct StrainField<T> {
    pub e11: Poly<T>,
    pub e12: Poly<T>,
    pub e22: Poly<T>,
}

/// Displacement field `(u1, u2)`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PolyDisplacement<T> {
    pub u1: Poly<T>,
    pub u2: Poly<T>,
}

fn parse_components<T: Real>(src: &str, names: &[&str]) -> Result<Vec<Poly<T>>> {
    let mut out = vec![Poly::zero(); names.len()];
    for part in src.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, expr) = part.split_once('=').ok_or_else(|| Error::Parse(format!("expected name=expr in '{part}'")))?;
        let k = names
            .iter()
            .position(|n| *n == name.trim())
            .ok_or_else(|| Error::Parse(format!("unknown component '{}'", name.trim())))?;
        out[k] = Poly::parse(expr)?;
    }
    Ok(out)
}

impl<T: Real> StrainField<T> {
    pub fn new(e11: Poly<T>, e12: Poly<T>, e22: Poly<T>) -> Result<Self> {
        let s = StrainField { e11, e12, e22 };
        let d = s.degree();
        if d > MAX_STRAIN_DEGREE {
            return Err(Error::DegreeTooHigh(d));
        }
        Ok(s)
    }

    /// Parses `e11=...;e12=...;e22=...`; omitted components are zero.
    pub fn parse(src: &str) -> Result<Self> {
        let mut c = parse_components(src, &["e11", "e12", "e22"])?;
        let e22 = c.pop().unwrap();
        let e12 = c.pop().unwrap();
        let e11 = c.pop().unwrap();
        StrainField::new(e11, e12, e22)
    }

    pub fn degree(&self) -> u32 {
        self.e11.degree().max(self.e12.degree()).max(self.e22.degree())
    }

    /// `d^T eps(p) d`.
    pub fn quad(&self, p: Point<T>, d: Point<T>) -> T {
        let (a, b, c) = (self.e11.at(p), self.e12.at(p), self.e22.at(p));
        a * d.x * d.x + T::lit(2.0) * b * d.x * d.y + c * d.y * d.y
    }
}

impl<T: Real> PolyDisplacement<T> {
    /// Parses `u1=...;u2=...`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut c = parse_components(src, &["u1", "u2"])?;
        let u2 = c.pop().unwrap();
        let u1 = c.pop().unwrap();
        Ok(PolyDisplacement { u1, u2 })
    }
}

/// Symmetric gradient of a displacement field.
pub fn strain_of<T: Real>(u: &PolyDisplacement<T>) -> Result<StrainField<T>> {
    let e12 = u.u1.dy().plus(&u.u2.dx()).scaled(T::lit(0.5));
    StrainField::new(u.u1.dx(), e12, u.u2.dy())
}

/// Incompatibility `e11,yy - 2 e12,xy + e22,xx`, as a polynomial.
pub fn ink_field<T: Real>(eps: &StrainField<T>) -> Poly<T> {
    eps.e11
        .dy()
        .dy()
        .plus(&eps.e12.dx().dy().scaled(T::lit(-2.0)))
        .plus(&eps.e22.dx().dx())
}

pub fn ink<T: Real>(eps: &StrainField<T>, p: Point<T>) -> T {
    ink_field(eps).at(p)
}

/// Gauss-Legendre nodes and weights on [0, 1].
pub fn gauss_legendre<T: Real>(n: usize) -> Vec<(T, T)> {
    let mut out = Vec::with_capacity(n);
    let nf = T::from_usize_lossy(n);
    for k in 0..n {
        let mut x = (T::pi() * (T::from_usize_lossy(k) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (mut p0, mut p1) = (T::one(), x);
            for m in 2..=n {
                let mf = T::from_usize_lossy(m);
                let p2 = ((T::lit(2.0) * mf - T::one()) * x * p1 - (mf - T::one()) * p0) / mf;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pm) = (p1, p0);
            dp = nf * (x * pn - pm) / (x * x - T::one());
            let step = pn / dp;
            x -= step;
            if step.abs() <= T::machine_eps() * T::lit(4.0) {
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        out.push(((T::one() - x) * T::lit(0.5), w * T::lit(0.5)));
    }
    out
}

/// `(1/|d|) int_0^1 d^T eps(a + s d) d ds` for the segment from `a` to `b`.
pub fn segment_elongation<T: Real>(eps: &StrainField<T>, a: Point<T>, b: Point<T>, rule: &[(T, T)]) -> T {
    let d = b.sub(a);
    let sum = rule.iter().fold(T::zero(), |acc, (s, w)| acc + *w * eps.quad(a.add(d.scale(*s)), d));
    sum / d.norm()
}

fn rule_for<T: Real>(eps: &StrainField<T>) -> Vec<(T, T)> {
    gauss_legendre((eps.degree() as usize + 2) / 2 + 1)
}

/// First-order length change of each active bar, in active-edge order.
pub fn induced_elongations<T: Real>(t: &Truss<T>, eps: &StrainField<T>) -> Vec<T> {
    let rule = rule_for(eps);
    t.active_edges()
        .into_iter()
        .map(|id| {
            let e = t.edge(id);
            segment_elongation(eps, t.vertex(e.a), t.vertex(e.b), &rule)
        })
        .collect()
}

/// Polynomial through `(x_i, y_i)` with degree `len - 1`; returns coefficients from constant up.
fn poly_fit<T: Real>(xs: &[T], ys: &[T]) -> Result<Vec<T>> {
    let n = xs.len();
    let v = DMatrix::from_fn(n, n, |i, j| xs[i].powi(j as i32));
    let rhs = DVector::from_column_slice(ys);
    let sol = v.lu().solve(&rhs).ok_or_else(|| Error::Numerical("extrapolation nodes coincide".into()))?;
    Ok(sol.iter().copied().collect())
}

/// `sum_i |l_i(0)|` for the Lagrange basis on `xs`.
fn extrapolation_gain<T: Real>(xs: &[T]) -> T {
    (0..xs.len()).fold(T::zero(), |acc, i| {
        let li = (0..xs.len()).filter(|j| *j != i).fold(T::one(), |p, j| p * xs[j] / (xs[j] - xs[i]));
        acc + li.abs()
    })
}

/// Minimum observed order of `|f(h) - limit|` between consecutive step sizes,
/// `None` when every error is at its rounding level `floor[i]`.
fn observed_order<T: Real>(hs: &[T], fs: &[T], limit: T, floor: &[T]) -> Option<T> {
    let errs: Vec<T> = fs.iter().map(|f| (*f - limit).abs()).collect();
    let mut best: Option<T> = None;
    for i in 0..hs.len().saturating_sub(1) {
        if errs[i] <= floor[i] && errs[i + 1] <= floor[i + 1] {
            continue;
        }
        let ord = if errs[i + 1] <= floor[i + 1] {
            T::lit(f64::INFINITY)
        } else {
            (errs[i] / errs[i + 1]).ln() / (hs[i] / hs[i + 1]).ln()
        };
        best = Some(best.map_or(ord, |b: T| b.min(ord)));
    }
    best
}

/// Regular hexagon of side `delta` around `center` with a vertex along `+x`.
pub fn hexagon_star<T: Real>(center: Point<T>, delta: T) -> Result<Truss<T>> {
    let mut pts = vec![center];
    for k in 0..6 {
        let th = T::pi() * T::lit(k as f64) / T::lit(3.0);
        pts.push(center.add(Point::new(th.cos(), th.sin()).scale(delta)));
    }
    let mut edges = Vec::new();
    let mut faces = Vec::new();
    for k in 0..6 {
        edges.push(Edge::new(0, 1 + k));
        edges.push(Edge::new(1 + k, 1 + (k + 1) % 6));
        faces.push([0, 1 + k, 1 + (k + 1) % 6]);
    }
    Truss::new(pts, edges, Some(faces))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HexLimitProbe<T> {
    pub center: Point<T>,
    pub deltas: Vec<T>,
    /// `(sum rim L - sum spoke L) / delta` per side length.
    pub w: Vec<T>,
    /// Extrapolated limit of `w / delta^2`.
    pub coefficient: T,
    /// `-(3/4) Ink(center)`.
    pub predicted: T,
    /// Fitted coefficient of `delta^3` in `w`.
    pub delta3_coefficient: T,
    /// Observed convergence order of `w / delta^2`; `None` when exact.
    pub order: Option<T>,
}

/// Evaluates the rim-minus-spoke sum on shrinking regular hexagons.
///
/// Each sum is divided by the side length, the scale carried by the wagon-row
/// coefficients, so the leading term is quadratic in `delta`.
pub fn hexagon_limit_check<T: Real>(eps: &StrainField<T>, center: Point<T>, deltas: &[T]) -> Result<HexLimitProbe<T>> {
    if deltas.len() < 2 || deltas.iter().any(|d| !(*d > T::zero())) {
        return Err(Error::InvalidParameter("need at least two positive side lengths".into()));
    }
    let rule = rule_for(eps);
    let mut w = Vec::with_capacity(deltas.len());
    // rounding level of each normalized sum, from the size of what cancels
    let mut noise = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let c = center;
        let vs: Vec<Point<T>> = (0..6)
            .map(|k| {
                let th = T::pi() * T::lit(k as f64) / T::lit(3.0);
                c.add(Point::new(th.cos(), th.sin()).scale(d))
            })
            .collect();
        let mut sum = T::zero();
        let mut mag = T::zero();
        for k in 0..6 {
            let rim = segment_elongation(eps, vs[k], vs[(k + 1) % 6], &rule);
            let spoke = segment_elongation(eps, c, vs[k], &rule);
            sum += rim - spoke;
            mag += rim.abs() + spoke.abs();
        }
        w.push(sum / d);
        noise.push(T::lit(64.0) * T::machine_eps() * mag / (d * d * d));
    }
    let ratio: Vec<T> = w.iter().zip(deltas).map(|(w, d)| *w / (*d * *d)).collect();
    let coef = poly_fit(deltas, &ratio)?;
    let coefficient = coef[0];
    let delta3_coefficient = coef.get(1).copied().unwrap_or_else(T::zero);
    let scale = ratio.iter().fold(T::one(), |m, r| m.max(r.abs()));
    // the extrapolated limit carries the node noise amplified by the fit
    let worst = noise.iter().fold(T::zero(), |m, n| m.max(*n)) * extrapolation_gain(deltas);
    let floor: Vec<T> = noise.iter().map(|n| (*n + worst).max(T::lit(1e-12) * scale)).collect();
    let order = observed_order(deltas, &ratio, coefficient, &floor);
    Ok(HexLimitProbe {
        center,
        deltas: deltas.to_vec(),
        w,
        coefficient,
        predicted: T::lit(-0.75) * ink(eps, center),
        delta3_coefficient,
        order,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// The functional itself.
    Raw,
    /// The functional divided by `r`.
    PerR,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProbe<T> {
    pub kappa: T,
    pub b: T,
    pub rs: Vec<T>,
    pub raw: Vec<T>,
    pub per_r: Vec<T>,
    pub raw_limit: T,
    pub per_r_limit: T,
    pub normalization: Normalization,
    /// Extrapolated value under `normalization`.
    pub limit: T,
    /// `-e11,y + (e11 - e22) kappa` at the origin.
    pub predicted: T,
    pub order: Option<T>,
}

/// Boundary piece at the origin for the curve `r (cos a, sin a)`, `sin a = kappa r/2 + b r^2/6`:
/// `V1` at `r`, `V4` at `-r`, with `V2`, `V3` the apexes of the equilateral
/// triangles on `V0V1` and `V4V0` inside the region.
pub fn boundary_piece<T: Real>(kappa: T, b: T, r: T) -> Result<[Point<T>; 5]> {
    let curve = |s: T| -> Result<Point<T>> {
        let sa = kappa * s * T::lit(0.5) + b * s * s / T::lit(6.0);
        if sa.abs() >= T::one() {
            return Err(Error::InvalidParameter("curve leaves the chart".into()));
        }
        let ca = (T::one() - sa * sa).sqrt();
        Ok(Point::new(s * ca, s * sa))
    };
    let v0 = Point::origin();
    let v1 = curve(r)?;
    let v4 = curve(-r)?;
    let sixty = T::pi() / T::lit(3.0);
    let v2 = v1.rotate(sixty);
    let v3 = v4.rotate(-sixty);
    Ok([v0, v1, v2, v3, v4])
}

/// Boundary curve-sum functional of one piece, from the local coefficients.
pub fn boundary_functional<T: Real>(eps: &StrainField<T>, kappa: T, b: T, r: T) -> Result<T> {
    let [v0, v1, v2, v3, v4] = boundary_piece(kappa, b, r)?;
    let rule = rule_for(eps);
    let l = |p: Point<T>, q: Point<T>| segment_elongation(eps, p, q, &rule);
    let h1 = line_distance(v2, v0, v1);
    let h1b = line_distance(v3, v4, v0);
    let h2 = line_distance(v0, v2, v3);
    let beta2 = corner_angle(v0, v2, v3);
    let beta3 = corner_angle(v0, v3, v2);
    let half = T::lit(0.5);
    let g2 = corner_angle(v1, v0, v2);
    let g3 = corner_angle(v4, v0, v3);
    let l02 = v0.dist(v2);
    let l03 = v0.dist(v3);
    Ok(half * (l(v0, v1) / h1 + l(v4, v0) / h1b) - l(v2, v3) / h2
        + (beta2.cos() / h2 - g2.cos() / (l02 * g2.sin())) * l(v0, v2)
        + (beta3.cos() / h2 - g3.cos() / (l03 * g3.sin())) * l(v0, v3))
}

/// Extrapolates the boundary functional to `r -> 0`, both raw and divided by `r`,
/// and keeps the normalization with a finite nonzero limit.
pub fn boundary_limit_check<T: Real>(eps: &StrainField<T>, kappa: T, b: T, rs: &[T]) -> Result<BoundaryProbe<T>> {
    if rs.len() < 2 || rs.iter().any(|r| !(*r > T::zero())) {
        return Err(Error::InvalidParameter("need at least two positive radii".into()));
    }
    let raw: Vec<T> = rs.iter().map(|r| boundary_functional(eps, kappa, b, *r)).collect::<Result<_>>()?;
    let per_r: Vec<T> = raw.iter().zip(rs).map(|(v, r)| *v / *r).collect();
    let raw_limit = poly_fit(rs, &raw)?[0];
    let per_r_limit = poly_fit(rs, &per_r)?[0];
    let scale = per_r.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let normalization = if raw_limit.abs() <= T::lit(1e-8) * scale {
        Normalization::PerR
    } else {
        Normalization::Raw
    };
    let (limit, seq) = match normalization {
        Normalization::PerR => (per_r_limit, &per_r),
        Normalization::Raw => (raw_limit, &raw),
    };
    let origin = Point::origin();
    let predicted = -eps.e11.dy().at(origin) + (eps.e11.at(origin) - eps.e22.at(origin)) * kappa;
    let order = observed_order(rs, seq, limit, &vec![T::lit(1e-12) * scale; rs.len()]);
    Ok(BoundaryProbe {
        kappa,
        b,
        rs: rs.to_vec(),
        raw,
        per_r,
        raw_limit,
        per_r_limit,
        normalization,
        limit,
        predicted,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_eval() {
        let p: Poly<f64> = Poly::parse("3*x^2*y - 0.5*y + 2 + 1e-1*x").unwrap();
        assert!((p.eval(2.0, 3.0) - (36.0 - 1.5 + 2.0 + 0.2)).abs() < 1e-12);
        assert!(Poly::<f64>::parse("x^").is_err());
    }

    #[test]
    fn gauss_legendre_weights_sum_to_one() {
        for n in 1..8 {
            let r: Vec<(f64, f64)> = gauss_legendre(n);
            let s: f64 = r.iter().map(|(_, w)| w).sum();
            assert!((s - 1.0).abs() < 1e-13, "n={n}");
            // exact on s^(2n-1)
            let m = (2 * n - 1) as i32;
            let q: f64 = r.iter().map(|(x, w)| w * x.powi(m)).sum();
            assert!((q - 1.0 / (m as f64 + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn ink_of_compatible_strain_vanishes() {
        let u = PolyDisplacement::<f64>::parse("u1=x*y^2;u2=-x^2*y").unwrap();
        let e = strain_of(&u).unwrap();
        assert_eq!(e.e11, Poly::parse("y^2").unwrap());
        assert_eq!(e.e22, Poly::parse("-x^2").unwrap());
        assert!(e.e12.terms.is_empty());
        assert_eq!(ink(&e, Point::new(0.3, -0.7)), 0.0);
    }

    #[test]
    fn degree_cap() {
        assert_eq!(StrainField::<f64>::parse("e11=x^7").unwrap_err(), Error::DegreeTooHigh(7));
    }
}
