//! Text formats: far-field and post-processed matrices as CSV with a
//! one-line metadata header, coefficient and grid exports, PGM images.
//!
//! Matrix files look like
//!
//! ```text
//! # farfield k=15 n1=100 n2=100
//! row,col,re,im
//! 0,0,225.0,0.0
//! ```
//!
//! Floats are written with the shortest representation that round-trips.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::far_field::{FarFieldMatrix, NodeKind, PostProcessedData};
use crate::pswf::PswfBasis;
use crate::reconstruction::{CoefficientVector, ContrastGrid};
use crate::quadrature::SampleMatrix;

const MATRIX_COLUMNS: [&str; 4] = ["row", "col", "re", "im"];

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn write_entries<W: Write>(w: &mut W, header: &str, cols: usize, values: &[Complex64]) -> Result<()> {
    writeln!(w, "{header}")?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(MATRIX_COLUMNS).map_err(csv_err)?;
    for (e, v) in values.iter().enumerate() {
        out.serialize((e / cols, e % cols, v.re, v.im)).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_farfield<W: Write>(w: &mut W, f: &FarFieldMatrix) -> Result<()> {
    write_entries(w, &format!("# farfield k={} n1={} n2={}", f.k, f.n1, f.n2), f.n2, &f.values)
}

pub fn write_postprocessed<W: Write>(w: &mut W, d: &PostProcessedData) -> Result<()> {
    let nodes = match d.nodes {
        NodeKind::Exact => "exact",
        NodeKind::Mock => "mock",
    };
    let header = format!("# postprocessed c={} T={} M={} nodes={nodes}", d.c, d.u.rows, d.u.cols);
    write_entries(w, &header, d.u.cols, &d.u.data)
}

struct MatrixFile {
    header: HashMap<String, (String, usize)>,
    header_line: usize,
    last_line: usize,
    /// `(row, col, value, line)`.
    entries: Vec<(usize, usize, Complex64, usize)>,
}

fn read_matrix<R: BufRead>(mut r: R, kind: &str) -> Result<MatrixFile> {
    let mut header = String::new();
    let mut header_line = 0;
    while header.trim().is_empty() {
        header.clear();
        if r.read_line(&mut header)? == 0 {
            return Err(parse_err(header_line.max(1), 1, "empty file"));
        }
        header_line += 1;
    }
    let header = header.trim_end();
    let body = header
        .strip_prefix('#')
        .map(str::trim_start)
        .and_then(|h| h.strip_prefix(kind))
        .ok_or_else(|| parse_err(header_line, 1, format!("expected header '# {kind} ...'")))?;
    let mut fields = HashMap::new();
    let mut col = header.len() - body.len() + 1;
    for tok in body.split(' ') {
        if !tok.is_empty() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| parse_err(header_line, col, format!("expected key=value, found '{tok}'")))?;
            fields.insert(k.to_string(), (v.to_string(), col));
        }
        col += tok.len() + 1;
    }

    let mut rdr = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(r);
    let line_of = |pos: Option<&csv::Position>| header_line + pos.map_or(1, |p| p.line() as usize);
    let names = rdr.headers().map_err(csv_err)?.clone();
    if names.iter().ne(MATRIX_COLUMNS) {
        return Err(parse_err(header_line + 1, 1, format!("expected column header '{}'", MATRIX_COLUMNS.join(","))));
    }
    let mut entries = Vec::new();
    let mut last_line = header_line + 1;
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let no = line_of(rec.position());
        last_line = no;
        if rec.len() != 4 {
            return Err(parse_err(no, 1, format!("expected 4 fields, found {}", rec.len())));
        }
        let index = |k: usize| -> Result<usize> {
            rec[k].parse().map_err(|_| parse_err(no, k + 1, format!("bad index '{}'", &rec[k])))
        };
        let num = |k: usize| -> Result<f64> {
            let v: f64 = rec[k].parse().map_err(|_| parse_err(no, k + 1, format!("bad number '{}'", &rec[k])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(no, k + 1, "non-finite value"))
            }
        };
        entries.push((index(0)?, index(1)?, Complex64::new(num(2)?, num(3)?), no));
    }
    Ok(MatrixFile { header: fields, header_line, last_line, entries })
}

impl MatrixFile {
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let (raw, col) = self
            .header
            .get(key)
            .ok_or_else(|| parse_err(self.header_line, 1, format!("header lacks '{key}'")))?;
        raw.parse().map_err(|_| parse_err(self.header_line, *col, format!("bad value for '{key}': '{raw}'")))
    }

    fn fill(&self, rows: usize, cols: usize) -> Result<Vec<Complex64>> {
        let mut data = vec![None; rows * cols];
        for &(r, c, v, no) in &self.entries {
            if r >= rows {
                return Err(parse_err(no, 1, format!("row {r} out of range 0..{rows}")));
            }
            if c >= cols {
                return Err(parse_err(no, 2, format!("column {c} out of range 0..{cols}")));
            }
            if data[r * cols + c].replace(v).is_some() {
                return Err(parse_err(no, 1, format!("duplicate entry ({r}, {c})")));
            }
        }
        if let Some(e) = data.iter().position(Option::is_none) {
            return Err(parse_err(self.last_line + 1, 1, format!("missing entry ({}, {})", e / cols, e % cols)));
        }
        Ok(data.into_iter().flatten().collect())
    }
}

pub fn read_farfield<R: BufRead>(r: R) -> Result<FarFieldMatrix> {
    let file = read_matrix(r, "farfield")?;
    let k: f64 = file.get("k")?;
    let n1: usize = file.get("n1")?;
    let n2: usize = file.get("n2")?;
    let values = file.fill(n1, n2)?;
    FarFieldMatrix::new(k, n1, n2, values).map_err(|e| parse_err(file.header_line, 1, e.to_string()))
}

pub fn read_postprocessed<R: BufRead>(r: R) -> Result<PostProcessedData> {
    let file = read_matrix(r, "postprocessed")?;
    let c: f64 = file.get("c")?;
    let rows: usize = file.get("T")?;
    let cols: usize = file.get("M")?;
    let nodes = match file.get::<String>("nodes")?.as_str() {
        "exact" => NodeKind::Exact,
        "mock" => NodeKind::Mock,
        other => return Err(parse_err(file.header_line, 1, format!("unknown node kind '{other}'"))),
    };
    let data = file.fill(rows, cols)?;
    Ok(PostProcessedData { c, u: SampleMatrix { rows, cols, data }, nodes })
}

/// `m,n,l,re_u,im_u,re_q,im_q,lambda`, one line per index of `q`.
pub fn write_coefficients<W: Write>(
    w: &mut W,
    u: &CoefficientVector,
    q: &CoefficientVector,
    basis: &PswfBasis,
) -> Result<()> {
    if u.indices != q.indices {
        return Err(Error::Argument("data and contrast coefficients have different index sets".into()));
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["m", "n", "l", "re_u", "im_u", "re_q", "im_q", "lambda"]).map_err(csv_err)?;
    for ((idx, a), b) in q.indices.iter().zip(&u.values).zip(&q.values) {
        let lambda = basis.lambda(idx.m, idx.n)?;
        out.serialize((idx.m, idx.n, idx.l, a.re, a.im, b.re, b.im, lambda)).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// `x,y,re,im,mask`; masked cells carry empty values and `mask = 1`.
pub fn write_grid_csv<W: Write>(w: &mut W, grid: &ContrastGrid) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "y", "re", "im", "mask"]).map_err(csv_err)?;
    for row in 0..grid.n {
        for col in 0..grid.n {
            let [x, y] = ContrastGrid::cell_center(grid.n, row, col);
            let v = grid.get(row, col);
            out.serialize((x, y, v.map(|v| v.re), v.map(|v| v.im), u8::from(v.is_none())))
                .map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Default grey-scale range: symmetric about zero at the 99th percentile of `|Re|`.
pub fn default_range(grid: &ContrastGrid) -> (f64, f64) {
    let mut mags: Vec<f64> = grid.values.iter().flatten().map(|v| v.re.abs()).collect();
    let top = percentile(&mut mags, 0.99).filter(|v| *v > 0.0).unwrap_or(1.0);
    (-top, top)
}

/// Binary PGM of the real part, linear between `range.0` (black) and
/// `range.1` (white); masked cells are black.
pub fn write_pgm<W: Write>(w: &mut W, grid: &ContrastGrid, range: (f64, f64)) -> Result<()> {
    let (lo, hi) = range;
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(Error::Argument(format!("empty grey-scale range [{lo}, {hi}]")));
    }
    let pixels: Vec<u8> = grid
        .values
        .iter()
        .map(|v| match v {
            Some(v) => (((v.re - lo) / (hi - lo)).clamp(0.0, 1.0) * 255.0).round() as u8,
            None => 0,
        })
        .collect();
    let side = u32::try_from(grid.n).map_err(|_| Error::Argument("grid too large for an image".into()))?;
    PnmEncoder::new(w)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(&pixels, side, side, ExtendedColorType::L8)
        .map_err(|e| Error::Io(std::io::Error::other(e)))
}

/// Nearest-rank percentile `p ∈ [0, 1]`; sorts `values` in place.
pub fn percentile(values: &mut [f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let rank = (p * (values.len() - 1) as f64).round() as usize;
    Some(values[rank.min(values.len() - 1)])
}
