//! Contrast families with closed-form restricted Fourier data
//! `u(p; c) = ∫_B e^{i c p·y} q(y) dy`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pswf::{ProlateIndex, PswfBasis};
use crate::specfun::bessel_j1;

/// Axis-aligned rectangle `(a1, a2) × (b1, b2)` carrying a constant value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub amplitude: Complex64,
}

impl Rectangle {
    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64) -> Self {
        Self { a1, a2, b1, b2, amplitude: Complex64::new(1.0, 0.0) }
    }

    pub fn center(&self) -> [f64; 2] {
        [0.5 * (self.a1 + self.a2), 0.5 * (self.b1 + self.b2)]
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        x[0] > self.a1 && x[0] < self.a2 && x[1] > self.b1 && x[1] < self.b2
    }

    fn fourier(&self, c: f64, p: [f64; 2]) -> Complex64 {
        let w1 = self.a2 - self.a1;
        let w2 = self.b2 - self.b1;
        let mag = 2.0 * sin_ratio(0.5 * w1, c * p[0]) * 2.0 * sin_ratio(0.5 * w2, c * p[1]);
        let phase = 0.5 * ((self.a1 + self.a2) * c * p[0] + (self.b1 + self.b2) * c * p[1]);
        self.amplitude * Complex64::from_polar(mag, phase)
    }
}

/// The three rectangles with minimal gap 0.05 used for resolution tests.
pub fn three_rectangles() -> Vec<Rectangle> {
    vec![
        Rectangle::new(-0.3, -0.025, 0.1, 0.3),
        Rectangle::new(0.025, 0.3, 0.1, 0.3),
        Rectangle::new(-0.1, 0.1, -0.2, 0.025),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ContrastSpec {
    /// `q = ψ_{m,n,l}(·; c)`.
    PswfMode { index: ProlateIndex },
    /// `q = amplitude · 1_{|x| < radius}`.
    Disk { radius: f64, amplitude: f64 },
    /// `q = amplitude · 1_{|x_1| < h_1, |x_2| < h_2}`.
    CenteredRectangle { half_widths: [f64; 2], amplitude: f64 },
    /// `q = sin(m π x_1)` on `|x_1|, |x_2| < 1/2`.
    Oscillatory { mode: i32 },
    RectangleUnion { rectangles: Vec<Rectangle> },
}

/// Denominators below this switch to the limit branch.
const SINGULAR_THRESHOLD: f64 = 1e-8;

/// `sin(a x)/x` with the removable singularity at 0.
fn sin_ratio(a: f64, x: f64) -> f64 {
    if x.abs() < SINGULAR_THRESHOLD {
        a
    } else {
        (a * x).sin() / x
    }
}

impl ContrastSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Argument(msg));
        match self {
            Self::PswfMode { index } => ProlateIndex::new(index.m, index.n, index.l).map(|_| ()),
            Self::Disk { radius, .. } => {
                if *radius > 0.0 && *radius <= 1.0 {
                    Ok(())
                } else {
                    bad(format!("disk radius {radius} outside (0, 1]"))
                }
            }
            Self::CenteredRectangle { half_widths: [h1, h2], .. } => {
                if *h1 > 0.0 && *h2 > 0.0 && h1.hypot(*h2) <= 1.0 {
                    Ok(())
                } else {
                    bad(format!("rectangle half-widths ({h1}, {h2}) leave the unit disk"))
                }
            }
            Self::Oscillatory { .. } => Ok(()),
            Self::RectangleUnion { rectangles } => {
                if rectangles.is_empty() {
                    return bad("empty rectangle union".into());
                }
                for r in rectangles {
                    let corners = [[r.a1, r.b1], [r.a1, r.b2], [r.a2, r.b1], [r.a2, r.b2]];
                    if !(r.a1 < r.a2 && r.b1 < r.b2)
                        || corners.iter().any(|c| c[0].hypot(c[1]) > 1.0)
                    {
                        return bad(format!(
                            "rectangle ({}, {}) × ({}, {}) is empty or leaves the unit disk",
                            r.a1, r.a2, r.b1, r.b2
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// `∫_B e^{i c p·y} q(y) dy` in closed form. `PswfMode` needs the basis
    /// of the same bandwidth.
    pub fn born_point_value(&self, c: f64, p: [f64; 2], basis: Option<&PswfBasis>) -> Result<Complex64> {
        let rho = p[0].hypot(p[1]);
        if rho > 1.0 + 1e-12 {
            return Err(Error::Domain(p[0], p[1]));
        }
        Ok(match self {
            Self::PswfMode { index } => {
                let basis = mode_basis(basis, c)?;
                basis.prolate_eigenvalue(index.m, index.n)? * basis.eval(*index, p)?
            }
            Self::Disk { radius, amplitude } => {
                let z = c * rho;
                let v = if z < SINGULAR_THRESHOLD {
                    PI * radius * radius
                } else {
                    2.0 * PI * radius * bessel_j1(radius * z) / z
                };
                Complex64::new(amplitude * v, 0.0)
            }
            Self::CenteredRectangle { half_widths: [h1, h2], amplitude } => {
                let v = 2.0 * sin_ratio(*h1, c * p[0]) * 2.0 * sin_ratio(*h2, c * p[1]);
                Complex64::new(amplitude * v, 0.0)
            }
            Self::Oscillatory { mode } => {
                let shift = *mode as f64 * PI;
                let x = c * p[0];
                let bracket = sin_ratio(0.5, x + shift) - sin_ratio(0.5, x - shift);
                let v = 2.0 * sin_ratio(0.5, c * p[1]) * bracket;
                Complex64::new(0.0, -v)
            }
            Self::RectangleUnion { rectangles } => rectangles.iter().map(|r| r.fourier(c, p)).sum(),
        })
    }

    /// Value of `q` itself at `x` (for error metrics and rendering the truth).
    pub fn contrast_value(&self, x: [f64; 2], basis: Option<&PswfBasis>) -> Result<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        Ok(match self {
            Self::PswfMode { index } => {
                let basis = basis.ok_or_else(|| Error::Argument("PSWF contrast needs a basis".into()))?;
                Complex64::new(basis.eval(*index, x)?, 0.0)
            }
            Self::Disk { radius, amplitude } => {
                if x[0].hypot(x[1]) < *radius {
                    Complex64::new(*amplitude, 0.0)
                } else {
                    zero
                }
            }
            Self::CenteredRectangle { half_widths: [h1, h2], amplitude } => {
                if x[0].abs() < *h1 && x[1].abs() < *h2 {
                    Complex64::new(*amplitude, 0.0)
                } else {
                    zero
                }
            }
            Self::Oscillatory { mode } => {
                if x[0].abs() < 0.5 && x[1].abs() < 0.5 {
                    Complex64::new((*mode as f64 * PI * x[0]).sin(), 0.0)
                } else {
                    zero
                }
            }
            Self::RectangleUnion { rectangles } => rectangles
                .iter()
                .filter(|r| r.contains(x))
                .map(|r| r.amplitude)
                .sum(),
        })
    }

    pub fn needs_basis(&self) -> bool {
        matches!(self, Self::PswfMode { .. })
    }
}

fn mode_basis(basis: Option<&PswfBasis>, c: f64) -> Result<&PswfBasis> {
    let basis = basis.ok_or_else(|| Error::Argument("PSWF contrast needs a basis".into()))?;
    if (basis.c - c).abs() > 1e-12 * c.max(1.0) {
        return Err(Error::Argument(format!(
            "PSWF contrast basis has c = {}, data requested at c = {c}",
            basis.c
        )));
    }
    Ok(basis)
}

fn parse_numbers(body: &str) -> Result<Vec<f64>> {
    body.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Argument(format!("not a number: '{}'", s.trim())))
        })
        .collect()
}

/// Textual form used on the command line:
///
/// * `pswf:M,N,L`
/// * `disk:RADIUS[,AMPLITUDE]`
/// * `rect:H1,H2[,AMPLITUDE]` (half-widths)
/// * `osc:MODE`
/// * `three-rectangles`
/// * `union:A1,A2,B1,B2[,RE[,IM]];...`
impl FromStr for ContrastSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        let spec = match kind {
            "pswf" => {
                let v = parse_numbers(body)?;
                if v.len() != 3 || v.iter().any(|x| x.fract() != 0.0 || *x < 0.0) {
                    return Err(Error::Argument("pswf expects three non-negative integers M,N,L".into()));
                }
                Self::PswfMode { index: ProlateIndex::new(v[0] as usize, v[1] as usize, v[2] as u8)? }
            }
            "disk" => match parse_numbers(body)?.as_slice() {
                [r] => Self::Disk { radius: *r, amplitude: 1.0 },
                [r, a] => Self::Disk { radius: *r, amplitude: *a },
                _ => return Err(Error::Argument("disk expects RADIUS[,AMPLITUDE]".into())),
            },
            "rect" => match parse_numbers(body)?.as_slice() {
                [h1, h2] => Self::CenteredRectangle { half_widths: [*h1, *h2], amplitude: 1.0 },
                [h1, h2, a] => Self::CenteredRectangle { half_widths: [*h1, *h2], amplitude: *a },
                _ => return Err(Error::Argument("rect expects H1,H2[,AMPLITUDE]".into())),
            },
            "osc" => match parse_numbers(body)?.as_slice() {
                [m] if m.fract() == 0.0 => Self::Oscillatory { mode: *m as i32 },
                _ => return Err(Error::Argument("osc expects an integer MODE".into())),
            },
            "three-rectangles" => Self::RectangleUnion { rectangles: three_rectangles() },
            "union" => {
                let rectangles = body
                    .split(';')
                    .filter(|s| !s.trim().is_empty())
                    .map(|part| match parse_numbers(part)?.as_slice() {
                        [a1, a2, b1, b2] => Ok(Rectangle::new(*a1, *a2, *b1, *b2)),
                        [a1, a2, b1, b2, re] => Ok(Rectangle {
                            amplitude: Complex64::new(*re, 0.0),
                            ..Rectangle::new(*a1, *a2, *b1, *b2)
                        }),
                        [a1, a2, b1, b2, re, im] => Ok(Rectangle {
                            amplitude: Complex64::new(*re, *im),
                            ..Rectangle::new(*a1, *a2, *b1, *b2)
                        }),
                        _ => Err(Error::Argument(format!("bad rectangle '{part}'"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::RectangleUnion { rectangles }
            }
            other => return Err(Error::Argument(format!("unknown contrast kind '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for ContrastSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PswfMode { index } => write!(f, "pswf:{},{},{}", index.m, index.n, index.l),
            Self::Disk { radius, amplitude } => write!(f, "disk:{radius},{amplitude}"),
            Self::CenteredRectangle { half_widths, amplitude } => {
                write!(f, "rect:{},{},{amplitude}", half_widths[0], half_widths[1])
            }
            Self::Oscillatory { mode } => write!(f, "osc:{mode}"),
            Self::RectangleUnion { rectangles } => {
                let parts: Vec<String> = rectangles
                    .iter()
                    .map(|r| format!("{},{},{},{},{},{}", r.a1, r.a2, r.b1, r.b2, r.amplitude.re, r.amplitude.im))
                    .collect();
                write!(f, "union:{}", parts.join(";"))
            }
        }
    }
}
