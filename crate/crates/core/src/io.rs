//! CSV formats for lattice fields, rejection curves and curve bundles.
//!
//! Floats are written in shortest round-trip form with a decimal point, so
//! files parse back to the identical bits in any locale.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mc_harness::{CurveBundle, FunctionalSummary, RejectionCurve, TestKind};
use crate::random_fields::{LatticeField, LatticeSpec};

pub const CURVE_HEADER: [&str; 5] = ["test", "h_star", "rate", "stderr", "n_sim"];

/// Shortest decimal string that parses back to `x`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        ryu::Buffer::new().format_finite(x).to_owned()
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line,
            msg: format!("{other:?}"),
        },
    }
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(r)
}

fn line_of(rec: &csv::StringRecord) -> usize {
    rec.position().map_or(0, |p| p.line() as usize)
}

fn parse_cell<T: std::str::FromStr>(rec: &csv::StringRecord, col: usize, what: &str) -> Result<T> {
    let cell = &rec[col];
    cell.parse().map_err(|_| Error::Parse {
        line: line_of(rec),
        msg: format!("non-numeric {what} {cell:?} in column {}", col + 1),
    })
}

fn check_width(rec: &csv::StringRecord, want: usize) -> Result<()> {
    if rec.len() != want {
        return Err(Error::Parse {
            line: line_of(rec),
            msg: format!("ragged row: expected {want} fields, found {}", rec.len()),
        });
    }
    Ok(())
}

/// Reads a field from CSV with header `ix,iy,var_1,…,var_p` and 1-based
/// site indices.
///
/// The grid shape is the largest index seen along each axis; the loaded
/// field is placed on the unit square.
pub fn read_field_csv<R: Read>(r: R) -> Result<LatticeField> {
    let mut rdr = reader(r);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let p = header.len().saturating_sub(2);
    let expected: Vec<String> = ["ix".to_string(), "iy".to_string()]
        .into_iter()
        .chain((1..=p).map(|l| format!("var_{l}")))
        .collect();
    if p == 0 || header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Parse {
            line: 1,
            msg: format!(
                "header must be ix,iy,var_1,...,var_p, got {:?}",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut rows: Vec<(usize, usize, Vec<f64>, usize)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        check_width(&rec, p + 2)?;
        let ix: usize = parse_cell(&rec, 0, "index")?;
        let iy: usize = parse_cell(&rec, 1, "index")?;
        if ix == 0 || iy == 0 {
            return Err(Error::Parse {
                line: line_of(&rec),
                msg: "site indices are 1-based".into(),
            });
        }
        let vals = (0..p)
            .map(|l| parse_cell::<f64>(&rec, l + 2, "value"))
            .collect::<Result<Vec<_>>>()?;
        if let Some(v) = vals.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line: line_of(&rec),
                msg: format!("non-finite value {v}"),
            });
        }
        rows.push((ix, iy, vals, line_of(&rec)));
    }
    let n_x = rows.iter().map(|r| r.0).max().unwrap_or(0);
    let n_y = rows.iter().map(|r| r.1).max().unwrap_or(0);
    let end_line = rows.last().map_or(1, |r| r.3) + 1;
    if n_x < 2 || n_y < 2 {
        return Err(Error::Parse {
            line: end_line,
            msg: format!("grid must be at least 2x2, found {n_x}x{n_y}"),
        });
    }
    let spec = LatticeSpec::new(n_x, n_y, 1.0 / (n_x.max(n_y) - 1) as f64)?;

    let n = spec.n_sites();
    let mut seen: Vec<Option<usize>> = vec![None; n];
    let mut values = vec![0.0; p * n];
    for (ix, iy, vals, line) in rows {
        let site = spec.site(ix - 1, iy - 1);
        if let Some(first) = seen[site] {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate site ({ix}, {iy}), first seen on line {first}"),
            });
        }
        seen[site] = Some(line);
        for (l, v) in vals.into_iter().enumerate() {
            values[l * n + site] = v;
        }
    }
    if let Some(site) = seen.iter().position(Option::is_none) {
        return Err(Error::Parse {
            line: end_line,
            msg: format!("missing site ({}, {})", site % n_x + 1, site / n_x + 1),
        });
    }
    LatticeField::new(spec, p, values)
}

/// Opens `path` for reading, naming it in the error.
pub fn open_input(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn load_field_csv(path: &Path) -> Result<LatticeField> {
    read_field_csv(open_input(path)?)
}

/// Writes sites in row-major order (`ix` fastest).
pub fn write_field_csv<W: Write>(w: W, field: &LatticeField) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let p = field.p();
    let header: Vec<String> = ["ix".to_string(), "iy".to_string()]
        .into_iter()
        .chain((1..=p).map(|l| format!("var_{l}")))
        .collect();
    wtr.write_record(&header).map_err(csv_err)?;
    let spec = field.spec();
    for iy in 0..spec.n_y {
        for ix in 0..spec.n_x {
            let site = spec.site(ix, iy);
            let mut row = vec![(ix + 1).to_string(), (iy + 1).to_string()];
            row.extend((0..p).map(|l| fmt_f64(field.get(l, site))));
            wtr.write_record(&row).map_err(csv_err)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// One row per `(test, h*)`.
pub fn write_curves_csv<W: Write>(w: W, curves: &[RejectionCurve]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CURVE_HEADER).map_err(csv_err)?;
    for c in curves {
        for j in 0..c.h_star.len() {
            wtr.write_record([
                c.test.label().to_string(),
                fmt_f64(c.h_star[j]),
                fmt_f64(c.rate[j]),
                fmt_f64(c.stderr[j]),
                c.n_sim.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Inverse of [`write_curves_csv`]; rows of one test must be contiguous.
pub fn read_curves_csv<R: Read>(r: R) -> Result<Vec<RejectionCurve>> {
    let mut rdr = reader(r);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CURVE_HEADER) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header must be {}", CURVE_HEADER.join(",")),
        });
    }
    let mut curves: Vec<RejectionCurve> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        check_width(&rec, CURVE_HEADER.len())?;
        let test = TestKind::parse(&rec[0]).map_err(|e| Error::Parse {
            line: line_of(&rec),
            msg: e.to_string(),
        })?;
        let n_sim: usize = parse_cell(&rec, 4, "count")?;
        let (h, rate, se) = (
            parse_cell(&rec, 1, "h_star")?,
            parse_cell(&rec, 2, "rate")?,
            parse_cell(&rec, 3, "stderr")?,
        );
        match curves.last_mut() {
            Some(c) if c.test == test && c.n_sim == n_sim => {
                c.h_star.push(h);
                c.rate.push(rate);
                c.stderr.push(se);
            }
            _ => {
                if curves.iter().any(|c| c.test == test) {
                    return Err(Error::Parse {
                        line: line_of(&rec),
                        msg: format!("rows for {} are not contiguous", test.label()),
                    });
                }
                curves.push(RejectionCurve {
                    test,
                    h_star: vec![h],
                    rate: vec![rate],
                    stderr: vec![se],
                    n_sim,
                });
            }
        }
    }
    Ok(curves)
}

/// Wide layout: `h_star,curve_1,…,curve_m`, one row per grid point.
pub fn write_bundle_csv<W: Write>(w: W, bundle: &CurveBundle) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let header: Vec<String> = std::iter::once("h_star".to_string())
        .chain((1..=bundle.len()).map(|i| format!("curve_{i}")))
        .collect();
    wtr.write_record(&header).map_err(csv_err)?;
    for (j, h) in bundle.grid.iter().enumerate() {
        let row: Vec<String> = std::iter::once(fmt_f64(*h))
            .chain(bundle.curves.iter().map(|c| fmt_f64(c[j])))
            .collect();
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_bundle_csv<R: Read>(r: R, name: &str) -> Result<CurveBundle> {
    let mut rdr = reader(r);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.len() < 2 || &header[0] != "h_star" {
        return Err(Error::Parse {
            line: 1,
            msg: "header must be h_star,curve_1,...,curve_m".into(),
        });
    }
    let m = header.len() - 1;
    let mut grid = Vec::new();
    let mut curves = vec![Vec::new(); m];
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        check_width(&rec, m + 1)?;
        grid.push(parse_cell(&rec, 0, "h_star")?);
        for (i, c) in curves.iter_mut().enumerate() {
            c.push(parse_cell(&rec, i + 1, "value")?);
        }
    }
    CurveBundle::new(name, grid, curves)
}

/// Pointwise summary curves, one row per grid point.
pub fn write_summary_csv<W: Write>(w: W, bundle: &CurveBundle, s: &FunctionalSummary) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "h_star",
        "median",
        "mean",
        "central_lower",
        "central_upper",
        "envelope_lower",
        "envelope_upper",
    ])
    .map_err(csv_err)?;
    for (j, h) in bundle.grid.iter().enumerate() {
        let row = [
            *h,
            s.median[j],
            s.mean[j],
            s.central_lower[j],
            s.central_upper[j],
            s.envelope_lower[j],
            s.envelope_upper[j],
        ];
        wtr.write_record(row.iter().map(|v| fmt_f64(*v))).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Per-curve depth with median and outlier flags (`curve` is 1-based).
pub fn write_depth_csv<W: Write>(w: W, s: &FunctionalSummary) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["curve", "depth", "median", "outlier"])
        .map_err(csv_err)?;
    for (i, d) in s.depths.iter().enumerate() {
        let flag = |b: bool| if b { "1" } else { "0" };
        wtr.write_record([
            (i + 1).to_string(),
            fmt_f64(*d),
            flag(i == s.median_index).into(),
            flag(s.outliers.contains(&i)).into(),
        ])
        .map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}
