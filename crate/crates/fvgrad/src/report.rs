//! Convergence CSV: one row per (scheme, field, level).

use std::io::Write;

use fvgrad_core::verify::ConvergenceReport;

use crate::Result;

pub const COLUMNS: [&str; 13] = [
    "scheme",
    "field",
    "mesh_family",
    "level",
    "h",
    "n_cells",
    "L1",
    "L2",
    "Linf",
    "order_L2",
    "iters",
    "residual",
    "status",
];

/// Writes the rows of `reports` in order. Floats use the shortest exact form, so
/// the output is byte-stable for identical inputs.
pub fn write_csv<W: Write>(reports: &[ConvergenceReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in reports {
        for (level, order) in r.levels.iter().zip(r.orders()) {
            let (l1, l2, linf) = match &level.norms {
                Some(n) => (n.combined.l1.to_string(), n.combined.l2.to_string(), n.combined.linf.to_string()),
                None => Default::default(),
            };
            let (iters, residual) = match &level.diagnostics {
                Some(d) => (d.iterations.to_string(), d.residual.to_string()),
                None => Default::default(),
            };
            w.write_record([
                r.scheme.as_str(),
                &r.field,
                &r.family,
                &level.level.to_string(),
                &level.h.to_string(),
                &level.n_cells.to_string(),
                &l1,
                &l2,
                &linf,
                &order.map(|o| o.to_string()).unwrap_or_default(),
                &iters,
                &residual,
                &level.status.to_string(),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fvgrad_core::fields::ManufacturedField;
    use fvgrad_core::gradcore::SolverParams;
    use fvgrad_core::verify::{convergence_study, MeshFamily, StudyPlan};

    #[test]
    fn rows_and_order_column() {
        let plan = StudyPlan { family: MeshFamily::Cartesian, base: (4, 4), levels: 2 };
        let reports = convergence_study(
            &["ulsq".parse().unwrap()],
            &[ManufacturedField::Trig, ManufacturedField::Linear { c0: 0.0, c1: 1.0, c2: 1.0 }],
            &plan,
            SolverParams::default(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&reports, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], COLUMNS.join(","));
        let row = |i: usize| lines[i].split(',').collect::<Vec<_>>();
        assert_eq!(row(1)[9], "");
        assert!(row(2)[9].parse::<f64>().unwrap() > 1.5);
        assert_eq!(row(2)[12], "ok");
        assert!(lines[3].starts_with("ulsq,\"linear:0,1,1\",cartesian,0,"), "{}", lines[3]);
    }
}
