//! Field CSV layout.
//!
//! ```text
//! # grid n=1 L=10 N=256
//! i,value                 (scalar, n = 1)
//! i0,i1,value             (scalar, n = 2)
//! i,j,value               (off-diagonal, n = 1, every ordered pair i != j)
//! i0,i1,j0,j1,value       (off-diagonal, n = 2)
//! ```
//!
//! Values are written with 17 significant digits, which round-trips every
//! finite double exactly.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{FracError, Result};
use crate::fields::{packed_index, GridSpec, OffDiagonalField, Provenance, ScalarField};

/// Either kind of field read back from CSV.
#[derive(Debug, Clone)]
pub enum FieldData {
    Scalar(ScalarField),
    OffDiagonal(OffDiagonalField),
}

impl FieldData {
    pub fn grid(&self) -> &Arc<GridSpec> {
        match self {
            FieldData::Scalar(u) => u.grid(),
            FieldData::OffDiagonal(f) => f.grid(),
        }
    }
}

pub fn grid_header(grid: &GridSpec) -> String {
    format!(
        "# grid n={} L={:?} N={}",
        grid.dim(),
        grid.half_width(),
        grid.points_per_axis()
    )
}

fn write_index(out: &mut impl Write, grid: &GridSpec, node: usize) -> std::io::Result<()> {
    let [i0, i1] = grid.axis_index(node);
    if grid.dim() == 1 {
        write!(out, "{i0},")
    } else {
        write!(out, "{i0},{i1},")
    }
}

pub fn write_scalar_csv(u: &ScalarField, mut out: impl Write) -> Result<()> {
    let grid = u.grid();
    writeln!(out, "{}", grid_header(grid))?;
    for (k, v) in u.values().iter().enumerate() {
        write_index(&mut out, grid, k)?;
        writeln!(out, "{v:.16e}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_od_csv(f: &OffDiagonalField, mut out: impl Write) -> Result<()> {
    let grid = f.grid();
    let m = grid.node_count();
    writeln!(out, "{}", grid_header(grid))?;
    for a in 0..m {
        for b in 0..m {
            if a == b {
                continue;
            }
            write_index(&mut out, grid, a)?;
            write_index(&mut out, grid, b)?;
            writeln!(out, "{:.16e}", f.get(a, b))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> FracError {
    FracError::Parse { line, msg: msg.into() }
}

fn parse_header(line: &str) -> Result<Arc<GridSpec>> {
    let rest = line
        .strip_prefix('#')
        .map(str::trim)
        .and_then(|r| r.strip_prefix("grid"))
        .ok_or_else(|| parse_err(1, "expected `# grid n=<n> L=<L> N=<N>`"))?;
    let (mut n, mut l, mut pts) = (None, None, None);
    for tok in rest.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("bad header token `{tok}`")))?;
        let bad = |_| parse_err(1, format!("bad header value `{tok}`"));
        match k {
            "n" => n = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "L" => l = Some(v.parse::<f64>().map_err(|e| bad(e.to_string()))?),
            "N" => pts = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            _ => return Err(parse_err(1, format!("unknown header key `{k}`"))),
        }
    }
    match (n, l, pts) {
        (Some(n), Some(l), Some(pts)) => {
            GridSpec::new(n, l, pts).map(Arc::new).map_err(|e| parse_err(1, e.to_string()))
        }
        _ => Err(parse_err(1, "header needs n, L and N")),
    }
}

fn parse_row(line: &str, lineno: usize, indices: usize, n_axis: usize) -> Result<(Vec<usize>, f64)> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != indices + 1 {
        return Err(parse_err(
            lineno,
            format!("expected {} columns, found {}", indices + 1, fields.len()),
        ));
    }
    let mut idx = Vec::with_capacity(indices);
    for f in &fields[..indices] {
        let i: usize = f
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad index `{f}`")))?;
        if i >= n_axis {
            return Err(parse_err(lineno, format!("index {i} out of range")));
        }
        idx.push(i);
    }
    let v: f64 = fields[indices]
        .parse()
        .map_err(|_| parse_err(lineno, format!("bad value `{}`", fields[indices])))?;
    if !v.is_finite() {
        return Err(parse_err(lineno, "non-finite value"));
    }
    Ok((idx, v))
}

/// Reads a field; the kind is inferred from the column count.
pub fn read_field_csv(input: impl BufRead) -> Result<FieldData> {
    let mut lines = input.lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) => l?,
        None => return Err(parse_err(1, "empty file")),
    };
    let grid = parse_header(header.trim())?;
    let dim = grid.dim();
    let n_axis = grid.points_per_axis();
    let m = grid.node_count();
    let node = |ix: &[usize]| if dim == 1 { ix[0] } else { ix[0] * n_axis + ix[1] };

    let mut scalar: Option<Vec<Option<f64>>> = None;
    let mut pairs: Option<(Vec<Option<f64>>, Vec<Option<f64>>)> = None;
    let mut last_line = 1;
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        last_line = lineno;
        let cols = t.split(',').count();
        if scalar.is_none() && pairs.is_none() {
            if cols == dim + 1 {
                scalar = Some(vec![None; m]);
            } else if cols == 2 * dim + 1 {
                let len = m * (m - 1) / 2;
                pairs = Some((vec![None; len], vec![None; len]));
            } else {
                return Err(parse_err(lineno, format!("{cols} columns fit neither field kind for n={dim}")));
            }
        }
        if let Some(vals) = scalar.as_mut() {
            let (ix, v) = parse_row(t, lineno, dim, n_axis)?;
            let k = node(&ix);
            if vals[k].replace(v).is_some() {
                return Err(parse_err(lineno, format!("duplicate node {k}")));
            }
        } else if let Some((up, low)) = pairs.as_mut() {
            let (ix, v) = parse_row(t, lineno, 2 * dim, n_axis)?;
            let (a, b) = (node(&ix[..dim]), node(&ix[dim..]));
            let slot = match a.cmp(&b) {
                std::cmp::Ordering::Less => &mut up[packed_index(m, a, b)],
                std::cmp::Ordering::Greater => &mut low[packed_index(m, b, a)],
                std::cmp::Ordering::Equal => return Err(parse_err(lineno, "diagonal pair")),
            };
            let v = if a < b { v } else { -v };
            if slot.replace(v).is_some() {
                return Err(parse_err(lineno, format!("duplicate pair ({a}, {b})")));
            }
        }
    }

    if let Some(vals) = scalar {
        let values = vals
            .into_iter()
            .enumerate()
            .map(|(k, v)| v.ok_or_else(|| parse_err(last_line, format!("missing node {k}"))))
            .collect::<Result<Vec<_>>>()?;
        return Ok(FieldData::Scalar(ScalarField::new(grid, values)?));
    }
    let (up, low) = pairs.ok_or_else(|| parse_err(last_line, "no data rows"))?;
    let mut upper = Vec::with_capacity(up.len());
    for (p, (u, l)) in up.into_iter().zip(low).enumerate() {
        match (u, l) {
            (Some(u), Some(l)) if u == l => upper.push(u),
            (Some(_), Some(_)) => {
                return Err(parse_err(last_line, format!("pair {p} is not antisymmetric")));
            }
            _ => return Err(parse_err(last_line, format!("pair {p} has a missing orientation"))),
        }
    }
    Ok(FieldData::OffDiagonal(OffDiagonalField::from_parts(grid, upper, Provenance::Sampled)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_grid;

    #[test]
    fn scalar_round_trip_is_bit_exact() {
        let g = make_grid(2, 3.0, 7).unwrap();
        let u = ScalarField::from_fn(g, |x| (x[0] * 1.7).sin() / 3.0 + x[1].exp()).unwrap();
        let mut buf = Vec::new();
        write_scalar_csv(&u, &mut buf).unwrap();
        let back = match read_field_csv(buf.as_slice()).unwrap() {
            FieldData::Scalar(v) => v,
            _ => panic!("wrong kind"),
        };
        assert_eq!(back.values(), u.values());
    }

    #[test]
    fn od_rejects_broken_antisymmetry() {
        let text = "# grid n=1 L=1 N=2\n0,1,0.5\n1,0,0.5\n";
        let err = read_field_csv(text.as_bytes()).unwrap_err();
        assert!(matches!(err, FracError::Parse { .. }));
    }

    #[test]
    fn malformed_row_names_its_line() {
        let text = "# grid n=1 L=1 N=3\n0,1.0\n1,abc\n2,0\n";
        match read_field_csv(text.as_bytes()).unwrap_err() {
            FracError::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
    }
}
