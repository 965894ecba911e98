//! Grids of tensor values over a slice, for plotting.

use std::io::Write;
use std::str::FromStr;

use sliceball::geometry::{hyperbolic_metric, slice_hermitian};
use sliceball::hardy::{delta, DEFAULT_TOL};
use sliceball::quat::ImaginaryUnit;
use sliceball::Quaternion;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldTensor {
    G,
    H,
    Omega,
    Ghat,
    Delta0,
}

impl FromStr for FieldTensor {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "G" => Ok(FieldTensor::G),
            "H" => Ok(FieldTensor::H),
            "Omega" => Ok(FieldTensor::Omega),
            "Ghat" => Ok(FieldTensor::Ghat),
            "delta0" => Ok(FieldTensor::Delta0),
            _ => Err(CliError::Usage(format!("unknown tensor {s:?}; expected G, H, Omega, Ghat or delta0"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format {s:?}; expected csv or json"))),
        }
    }
}

/// The plane `{x + yI + offset}` sampled on a `grid × grid` lattice over `[-1, 1]²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSpec {
    pub tensor: FieldTensor,
    pub unit: ImaginaryUnit,
    pub offset: Quaternion,
    pub grid: usize,
    pub alpha: Quaternion,
    pub beta: Quaternion,
}

impl FieldSpec {
    pub fn new(
        tensor: FieldTensor,
        unit: Quaternion,
        offset: Quaternion,
        grid: usize,
        alpha: Quaternion,
        beta: Quaternion,
    ) -> Result<Self, CliError> {
        if grid < 2 {
            return Err(CliError::Usage(format!("grid must be at least 2, got {grid}")));
        }
        let unit = ImaginaryUnit::new(unit)
            .map_err(|e| CliError::Usage(format!("slice unit {unit} is not a unit imaginary quaternion: {e}")))?;
        Ok(FieldSpec { tensor, unit, offset, grid, alpha, beta })
    }

    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec![
            "q_w", "q_x", "q_y", "q_z", "alpha_w", "alpha_x", "alpha_y", "alpha_z", "beta_w", "beta_x", "beta_y",
            "beta_z", "H_w", "H_x", "H_y", "H_z", "G", "Omega_x", "Omega_y", "Omega_z",
        ];
        match self.tensor {
            FieldTensor::Ghat => h.push("Ghat"),
            FieldTensor::Delta0 => h.push("delta0"),
            FieldTensor::G | FieldTensor::H | FieldTensor::Omega => {}
        }
        h
    }

    /// Grid points inside the ball, row-major over `(x, y)`.
    pub fn points(&self) -> Vec<Quaternion> {
        let step = 2.0 / (self.grid - 1) as f64;
        let coord = |k: usize| if k == self.grid - 1 { 1.0 } else { -1.0 + step * k as f64 };
        let mut out = vec![];
        for ix in 0..self.grid {
            for iy in 0..self.grid {
                let q = self.unit.get() * coord(iy) + coord(ix) + self.offset;
                if q.norm() < 1.0 {
                    out.push(q);
                }
            }
        }
        out
    }

    pub fn row(&self, q: Quaternion) -> Result<Vec<f64>, CliError> {
        let h = slice_hermitian(q, self.alpha, self.beta);
        let mut row = Vec::with_capacity(21);
        for v in [q, self.alpha, self.beta, h] {
            row.extend(v.to_array());
        }
        row.push(h.re());
        row.extend(&h.im().to_array()[1..]);
        match self.tensor {
            FieldTensor::Ghat => row.push(hyperbolic_metric(q, self.alpha, self.beta)),
            FieldTensor::Delta0 => row.push(delta(Quaternion::ZERO, q, DEFAULT_TOL)?.delta),
            FieldTensor::G | FieldTensor::H | FieldTensor::Omega => {}
        }
        Ok(row)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<usize, CliError> {
        let header = self.header();
        let points = self.points();
        match format {
            Format::Csv => {
                writeln!(out, "{}", header.join(","))?;
                for q in &points {
                    let row = self.row(*q)?;
                    let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                writeln!(out, "[")?;
                for (n, q) in points.iter().enumerate() {
                    let row = self.row(*q)?;
                    let fields: Vec<String> =
                        header.iter().zip(&row).map(|(k, v)| format!("\"{k}\":{}", serde_json::json!(v))).collect();
                    let sep = if n + 1 < points.len() { "," } else { "" };
                    writeln!(out, "  {{{}}}{sep}", fields.join(","))?;
                }
                writeln!(out, "]")?;
            }
        }
        Ok(points.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sliceball::Quaternion as Q;

    fn spec(tensor: FieldTensor, grid: usize) -> FieldSpec {
        FieldSpec::new(tensor, Q::I, Q::ZERO, grid, Q::J, Q::J).unwrap()
    }

    #[test]
    fn grid_points_are_inside_and_ordered() {
        let pts = spec(FieldTensor::G, 5).points();
        // of the 5×5 lattice on [-1, 1]² only the inner 3×3 block has |q| < 1
        assert_eq!(pts.len(), 9);
        assert!(pts.iter().all(|q| q.norm() < 1.0));
        assert_eq!(pts[0], Q::new(-0.5, -0.5, 0.0, 0.0));
    }

    #[test]
    fn g_column_at_half_i() {
        let s = spec(FieldTensor::G, 5);
        let q = Q::new(0.0, 0.5, 0.0, 0.0);
        assert!(s.points().contains(&q));
        let row = s.row(q).unwrap();
        assert!((row[16] - 0.64).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(FieldSpec::new(FieldTensor::G, Q::J, Q::ZERO, 1, Q::J, Q::J).is_err());
        assert!(FieldSpec::new(FieldTensor::G, Q::new(0.0, 1.0, 1.0, 0.0), Q::ZERO, 3, Q::J, Q::J).is_err());
        assert!("Gtilde".parse::<FieldTensor>().is_err());
    }

    #[test]
    fn header_matches_row_length() {
        for t in [FieldTensor::G, FieldTensor::Ghat, FieldTensor::Delta0] {
            let s = spec(t, 3);
            assert_eq!(s.header().len(), s.row(Q::ZERO).unwrap().len());
        }
    }
}
