//! CSV and ASCII PLY writers for lifts, dual clouds and census regions.
//!
//! CSV headers are fixed. Slopes and lines are written in the affine charts
//! `λ = l1 + i l2`, `μ = m1 + i m2`; vertical ones get `NaN`.

use crate::census::CensusReport;
use crate::contact::LiftedPatch;
use crate::duality::{DualCloud, DualPoint};
use crate::Result;
use std::io::Write;

pub const LIFT_HEADER: [&str; 7] = ["x1", "x2", "y1", "y2", "l1", "l2", "defect"];
pub const DUAL_HEADER: [&str; 5] = ["l1", "l2", "m1", "m2", "pi_rank"];
pub const REGION_HEADER: [&str; 7] = ["count", "size", "representative", "l1", "l2", "m1", "m2"];

fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::Io(e.to_string())
}

fn chart_or_nan(d: &DualPoint) -> [f64; 4] {
    match d.chart() {
        Some((l, m)) => [l.re, l.im, m.re, m.im],
        None => [f64::NAN; 4],
    }
}

fn lift_rows(m: &LiftedPatch) -> Vec<[f64; 7]> {
    m.samples
        .iter()
        .map(|s| {
            let [x, y] = s.element.z;
            let l = s.element.slope.value().unwrap_or(num_complex::Complex64::new(f64::NAN, f64::NAN));
            [x.re, x.im, y.re, y.im, l.re, l.im, s.defect]
        })
        .collect()
}

fn write_csv<W: Write, const N: usize>(w: W, header: [&str; N], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(csv_err)?;
    for r in rows {
        out.write_record(&r).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Floats in shortest round-trip form.
fn fmt(x: f64) -> String {
    format!("{x:?}")
}

pub fn lift_csv<W: Write>(m: &LiftedPatch, w: W) -> Result<()> {
    write_csv(w, LIFT_HEADER, lift_rows(m).into_iter().map(|r| r.iter().map(|&x| fmt(x)).collect()))
}

pub fn dual_csv<W: Write>(d: &DualCloud, w: W) -> Result<()> {
    write_csv(
        w,
        DUAL_HEADER,
        d.samples.iter().map(|s| {
            let mut r: Vec<String> = chart_or_nan(&s.point).iter().map(|&x| fmt(x)).collect();
            r.push(s.pi_rank.to_string());
            r
        }),
    )
}

pub fn regions_csv<W: Write>(r: &CensusReport, w: W) -> Result<()> {
    write_csv(
        w,
        REGION_HEADER,
        r.regions.iter().map(|g| {
            let mut row = vec![g.count.to_string(), g.size.to_string(), g.representative.to_string()];
            row.extend(chart_or_nan(&g.line).iter().map(|&x| fmt(x)));
            row
        }),
    )
}

fn ply<W: Write>(mut w: W, props: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    writeln!(w, "ply\nformat ascii 1.0\ncomment crdual")?;
    writeln!(w, "element vertex {}", rows.len())?;
    for p in props {
        writeln!(w, "property double {p}")?;
    }
    writeln!(w, "end_header")?;
    for r in rows {
        let line: Vec<String> = r.iter().map(|&x| fmt(x)).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

/// The lift as a point cloud: `(x1, x2, y1)` as the position, `y2`, the
/// slope and the defect as extra properties.
pub fn lift_ply<W: Write>(m: &LiftedPatch, w: W) -> Result<()> {
    let rows: Vec<Vec<f64>> = lift_rows(m).into_iter().map(|r| r.to_vec()).collect();
    ply(w, &["x", "y", "z", "y2", "l1", "l2", "defect"], &rows)
}

/// The dual cloud with `(l1, l2, m1)` as the position.
pub fn dual_ply<W: Write>(d: &DualCloud, w: W) -> Result<()> {
    let rows: Vec<Vec<f64>> = d
        .samples
        .iter()
        .map(|s| {
            let mut r = chart_or_nan(&s.point).to_vec();
            r.push(s.pi_rank as f64);
            r
        })
        .collect();
    ply(w, &["x", "y", "z", "m2", "pi_rank"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::dual_variety;
    use crate::surfaces::{Catalog, SurfacePatch};
    use crate::Tolerances;

    #[test]
    fn lift_csv_has_fixed_header() {
        let m = crate::contact::lift(&SurfacePatch::from_catalog(Catalog::R2), 2, 3, &Tolerances::default()).unwrap();
        let mut out = Vec::new();
        lift_csv(&m, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x1,x2,y1,y2,l1,l2,defect"));
        assert_eq!(lines.count(), m.samples.len());
    }

    #[test]
    fn dual_ply_round_trips_floats() {
        let d = dual_variety(&SurfacePatch::from_catalog(Catalog::ComplexConic), 2, 2, &Tolerances::default()).unwrap();
        let mut out = Vec::new();
        dual_ply(&d, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("ply\nformat ascii 1.0\n"));
        assert!(text.contains(&format!("element vertex {}", d.samples.len())));
        let body: Vec<&str> = text.split("end_header\n").nth(1).unwrap().lines().collect();
        let first: Vec<f64> = body[0].split(' ').map(|x| x.parse().unwrap()).collect();
        let (l, m) = d.samples[0].point.chart().unwrap();
        assert_eq!(first[..4], [l.re, l.im, m.re, m.im]);
    }

    #[test]
    fn vertical_lines_are_nan() {
        let d = DualPoint::new([num_complex::Complex64::new(1.0, 0.0), num_complex::Complex64::new(1.0, 0.0), Default::default()]).unwrap();
        assert!(chart_or_nan(&d).iter().all(|x| x.is_nan()));
    }
}
