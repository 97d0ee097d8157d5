use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::zeta::{parse_rational, rational_string};

/// One sequence member.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub vertices: usize,
    /// Normalized `N_1 ..= N_J`.
    pub nbar: Vec<BigRational>,
    /// `|N_j^(n) - N_j|` per column.
    pub coeff_dev: Vec<BigRational>,
    /// `Z_norm(G_n)(u_k)^{tau(1)}`.
    pub z: Vec<Complex64>,
    /// `|Z_norm(G_n)(u_k)^{tau(1)} - Z(u_k)|`.
    pub z_dev: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub order: usize,
    pub eval_points: Vec<Complex64>,
    pub limit_nbar: Vec<BigRational>,
    pub limit_z: Vec<Complex64>,
    /// Bound on the omitted log-tail of each limit evaluation.
    pub limit_tail: Vec<f64>,
    /// `tau(1)` of the limit.
    pub limit_mass: f64,
    pub rows: Vec<ConvergenceRow>,
    pub sup_coeff_dev: Vec<BigRational>,
    pub sup_z_dev: Vec<f64>,
}

impl ConvergenceReport {
    pub(crate) fn new(
        order: usize,
        eval_points: Vec<Complex64>,
        limit_nbar: Vec<BigRational>,
        limit_z: Vec<Complex64>,
        limit_tail: Vec<f64>,
        limit_mass: f64,
        rows: Vec<ConvergenceRow>,
    ) -> Self {
        let sup_coeff_dev = (0..order)
            .map(|j| {
                rows.iter()
                    .map(|r| r.coeff_dev[j].clone())
                    .max()
                    .unwrap_or_else(BigRational::zero)
            })
            .collect();
        let sup_z_dev = (0..eval_points.len())
            .map(|k| rows.iter().map(|r| r.z_dev[k]).fold(0.0, f64::max))
            .collect();
        ConvergenceReport {
            order,
            eval_points,
            limit_nbar,
            limit_z,
            limit_tail,
            limit_mass,
            rows,
            sup_coeff_dev,
            sup_z_dev,
        }
    }

    /// Rows as they appear in the CSV form, the limit row last.
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        let mut out: Vec<CsvRow> = self
            .rows
            .iter()
            .map(|r| CsvRow {
                label: r.n.to_string(),
                vertices: Some(r.vertices),
                nbar: r.nbar.clone(),
                z_dev: r.z_dev.iter().map(|&d| Some(d)).collect(),
            })
            .collect();
        out.push(CsvRow {
            label: "limit".into(),
            vertices: None,
            nbar: self.limit_nbar.clone(),
            z_dev: vec![None; self.eval_points.len()],
        });
        out
    }

    /// Columns `n, vertices, N1..NJ, dev_u1..dev_uk`; rationals as `p/q`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["n".to_string(), "vertices".to_string()];
        header.extend((1..=self.order).map(|j| format!("N{j}")));
        header.extend(
            self.eval_points
                .iter()
                .map(|u| format!("dev[{}{:+}i]", u.re, u.im)),
        );
        w.write_record(&header)?;
        for row in self.csv_rows() {
            let mut rec = vec![
                row.label,
                row.vertices.map(|v| v.to_string()).unwrap_or_default(),
            ];
            rec.extend(row.nbar.iter().map(rational_string));
            rec.extend(
                row.z_dev
                    .iter()
                    .map(|d| d.map(|d| format!("{d:e}")).unwrap_or_default()),
            );
            w.write_record(&rec)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Consistency(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Value {
        let complex = |z: &Complex64| json!([z.re, z.im]);
        json!({
            "order": self.order,
            "eval_points": self.eval_points.iter().map(complex).collect::<Vec<_>>(),
            "limit": {
                "mass": self.limit_mass,
                "nbar": self.limit_nbar.iter().map(rational_string).collect::<Vec<_>>(),
                "z": self.limit_z.iter().map(complex).collect::<Vec<_>>(),
                "log_tail_bound": self.limit_tail,
            },
            "rows": self.rows.iter().map(|r| json!({
                "n": r.n,
                "vertices": r.vertices,
                "nbar": r.nbar.iter().map(rational_string).collect::<Vec<_>>(),
                "coeff_dev": r.coeff_dev.iter().map(rational_string).collect::<Vec<_>>(),
                "z": r.z.iter().map(complex).collect::<Vec<_>>(),
                "z_dev": r.z_dev,
            })).collect::<Vec<_>>(),
            "sup_coeff_dev": self.sup_coeff_dev.iter().map(rational_string).collect::<Vec<_>>(),
            "sup_z_dev": self.sup_z_dev,
        })
    }
}

/// A parsed CSV row; the limit row has no vertex count and empty deviations.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub label: String,
    pub vertices: Option<usize>,
    pub nbar: Vec<BigRational>,
    pub z_dev: Vec<Option<f64>>,
}

impl CsvRow {
    /// Parses the output of [`ConvergenceReport::to_csv`].
    pub fn parse_all(text: &str) -> Result<Vec<CsvRow>> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers()?.clone();
        let order = header.iter().filter(|h| h.starts_with('N')).count();
        let bad = |what: &str| Error::Parse(format!("bad {what} in convergence CSV"));
        r.records()
            .map(|rec| {
                let rec = rec?;
                let vertices = match &rec[1] {
                    "" => None,
                    v => Some(v.parse().map_err(|_| bad("vertex count"))?),
                };
                let nbar = (0..order)
                    .map(|j| parse_rational(&rec[2 + j]))
                    .collect::<Result<_>>()?;
                let z_dev = (2 + order..rec.len())
                    .map(|i| match &rec[i] {
                        "" => Ok(None),
                        s => s.parse().map(Some).map_err(|_| bad("deviation")),
                    })
                    .collect::<Result<_>>()?;
                Ok(CsvRow {
                    label: rec[0].to_string(),
                    vertices,
                    nbar,
                    z_dev,
                })
            })
            .collect()
    }
}
