//! Complex permittivity models: the Drude metal and tabulated optical data.
//!
//! Tabulated data is ingested from a small CSV dialect (energies in eV),
//! interpolated log-log in the absorptive part, and extended below the grid
//! with a conductive 1/ω tail. Queries above the grid are refused so that
//! callers make truncation explicit.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::constants::{angular_frequency_to_photon_energy, photon_energy_to_angular_frequency};
use crate::error::{Error, Result};

/// Drude metal characterized by its DC conductivity (Gaussian units, s⁻¹).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeModel {
    /// DC conductivity, s⁻¹.
    pub sigma0: f64,
}

impl DrudeModel {
    pub fn new(sigma0: f64) -> Result<Self> {
        if !(sigma0 > 0.0) || !sigma0.is_finite() {
            return Err(Error::Domain(format!(
                "Drude conductivity must be positive and finite, got {sigma0}"
            )));
        }
        Ok(Self { sigma0 })
    }
}

/// Drude permittivity ε(ω) = 1 + i·4πσ₀/ω.
///
/// Negative frequencies return the conjugate of the value at |ω|
/// (retarded-response symmetry). ω = 0 is a genuine singularity; callers
/// needing the static limit must use the polarizability limit forms.
pub fn drude_permittivity(omega: f64, model: DrudeModel) -> Result<Complex64> {
    if omega == 0.0 {
        return Err(Error::Singularity(
            "Drude permittivity diverges at zero frequency; use the static polarizability limit"
                .into(),
        ));
    }
    let eps = Complex64::new(1.0, 4.0 * std::f64::consts::PI * model.sigma0 / omega.abs());
    Ok(if omega >= 0.0 { eps } else { eps.conj() })
}

/// Crystal orientation a tabulated response applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Field perpendicular to the crystal c-axis.
    EPerpC,
    /// Field parallel to the crystal c-axis.
    EParC,
    /// No orientation structure.
    Isotropic,
}

impl Orientation {
    fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "Eperp" => Ok(Orientation::EPerpC),
            "Epar" => Ok(Orientation::EParC),
            "iso" => Ok(Orientation::Isotropic),
            other => Err(Error::Format(format!(
                "unknown orientation '{other}' (expected Eperp, Epar, or iso)"
            ))),
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            Orientation::EPerpC => "Eperp",
            Orientation::EParC => "Epar",
            Orientation::Isotropic => "iso",
        }
    }
}

/// Tabulated complex permittivity on a strictly increasing frequency grid.
#[derive(Debug, Clone)]
pub struct PermittivityTable {
    /// Human-readable material label.
    pub label: String,
    /// Crystal orientation of the tabulated response.
    pub orientation: Orientation,
    /// Particle radius in nm the table was measured/derived for, if stated.
    pub radius_nm: Option<f64>,
    grid: Vec<f64>,
    eps_re: Vec<f64>,
    eps_im: Vec<f64>,
}

impl PermittivityTable {
    /// Build a table from rows of (photon energy eV, Re ε, Im ε).
    /// Rows are sorted by energy; duplicates are rejected.
    pub fn from_rows(
        label: impl Into<String>,
        orientation: Orientation,
        radius_nm: Option<f64>,
        rows: &[(f64, f64, f64)],
    ) -> Result<Self> {
        if rows.len() < 4 {
            return Err(Error::Format(format!(
                "permittivity table needs at least 4 rows, got {}",
                rows.len()
            )));
        }
        let mut sorted: Vec<(f64, f64, f64)> = rows.to_vec();
        for &(e, re, im) in &sorted {
            if !(e > 0.0) || !e.is_finite() {
                return Err(Error::Format(format!(
                    "photon energies must be positive and finite, got {e}"
                )));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Format(format!(
                    "non-finite permittivity entry at {e} eV"
                )));
            }
            if im < 0.0 {
                return Err(Error::Validation(format!(
                    "negative Im ε = {im} at {e} eV violates passivity"
                )));
            }
        }
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut grid = Vec::with_capacity(sorted.len());
        let mut eps_re = Vec::with_capacity(sorted.len());
        let mut eps_im = Vec::with_capacity(sorted.len());
        for &(e, re, im) in &sorted {
            grid.push(photon_energy_to_angular_frequency(e)?);
            eps_re.push(re);
            eps_im.push(im);
        }
        for pair in grid.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::Format(format!(
                    "grid not strictly increasing near ω = {:.6e} rad/s (duplicate energy row?)",
                    pair[0]
                )));
            }
        }
        Ok(Self {
            label: label.into(),
            orientation,
            radius_nm,
            grid,
            eps_re,
            eps_im,
        })
    }

    /// Parse a table from the CSV dialect described at module level:
    /// '#'-prefixed comment lines, with recognized header keys
    /// `# material:`, `# orientation: Eperp|Epar|iso`, `# radius_nm:`;
    /// data rows `photon_energy_eV,eps_re,eps_im`.
    pub fn load(reader: impl BufRead) -> Result<Self> {
        let mut label = String::from("unlabeled");
        let mut orientation = Orientation::Isotropic;
        let mut radius_nm = None;
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();

        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Format(format!("read failure: {e}")))?;
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once(':') {
                    match key.trim() {
                        "material" => label = value.trim().to_string(),
                        "orientation" => orientation = Orientation::parse(value)?,
                        "radius_nm" => {
                            let r: f64 = value.trim().parse().map_err(|_| {
                                Error::Format(format!(
                                    "line {line_no}: cannot parse radius_nm '{}'",
                                    value.trim()
                                ))
                            })?;
                            radius_nm = Some(r);
                        }
                        _ => {} // unrecognized headers are plain comments
                    }
                }
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Format(format!(
                    "line {line_no}: expected 3 comma-separated fields, got {}",
                    fields.len()
                )));
            }
            let parse = |s: &str, what: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| {
                    Error::Format(format!("line {line_no}: cannot parse {what} '{s}'"))
                })
            };
            rows.push((
                parse(fields[0], "photon energy")?,
                parse(fields[1], "Re eps")?,
                parse(fields[2], "Im eps")?,
            ));
        }

        Self::from_rows(label, orientation, radius_nm, &rows)
    }

    /// Write the table back out in the same CSV dialect (round-trips with
    /// [`PermittivityTable::load`]).
    pub fn write(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "# material: {}", self.label)?;
        writeln!(w, "# orientation: {}", self.orientation.tag())?;
        if let Some(r) = self.radius_nm {
            writeln!(w, "# radius_nm: {r}")?;
        }
        for i in 0..self.grid.len() {
            let ev = angular_frequency_to_photon_energy(self.grid[i])
                .expect("grid validated positive");
            writeln!(w, "{:e},{:e},{:e}", ev, self.eps_re[i], self.eps_im[i])?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Lowest tabulated angular frequency, rad/s.
    pub fn omega_min(&self) -> f64 {
        self.grid[0]
    }

    /// Highest tabulated angular frequency, rad/s.
    pub fn omega_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// Evaluate ε(ω) for ω > 0.
    ///
    /// Inside the grid, Im ε is interpolated linearly in log ω–log Im ε
    /// (falling back to linear when an endpoint vanishes) and Re ε linearly
    /// in log ω. Below the grid a conductive tail is used:
    /// Im ε(ω) = Im ε(ω_min)·ω_min/ω with Re ε frozen. Above the grid the
    /// query is refused.
    pub fn interpolate(&self, omega: f64) -> Result<Complex64> {
        if !(omega > 0.0) {
            return Err(Error::Domain(format!(
                "table interpolation requires ω > 0, got {omega}"
            )));
        }
        let n = self.grid.len();
        if omega > self.omega_max() {
            return Err(Error::AboveGrid {
                omega,
                grid_max: self.omega_max(),
            });
        }
        if omega < self.omega_min() {
            let re = self.eps_re[0];
            let im = self.eps_im[0] * self.omega_min() / omega;
            return Ok(Complex64::new(re, im));
        }
        // Binary search for the containing segment.
        let hi = self.grid.partition_point(|&g| g < omega);
        if hi == 0 {
            return Ok(Complex64::new(self.eps_re[0], self.eps_im[0]));
        }
        if hi < n && self.grid[hi] == omega {
            return Ok(Complex64::new(self.eps_re[hi], self.eps_im[hi]));
        }
        let lo = hi - 1;
        if self.grid[lo] == omega {
            return Ok(Complex64::new(self.eps_re[lo], self.eps_im[lo]));
        }
        let (w0, w1) = (self.grid[lo], self.grid[hi]);
        let t = (omega.ln() - w0.ln()) / (w1.ln() - w0.ln());
        let re = self.eps_re[lo] + t * (self.eps_re[hi] - self.eps_re[lo]);
        let (i0, i1) = (self.eps_im[lo], self.eps_im[hi]);
        let im = if i0 > 0.0 && i1 > 0.0 {
            (i0.ln() + t * (i1.ln() - i0.ln())).exp()
        } else {
            // Linear in ω when the log-log map is undefined.
            i0 + (omega - w0) / (w1 - w0) * (i1 - i0)
        };
        Ok(Complex64::new(re, im))
    }
}

/// A fitted DC conductivity with its goodness-of-fit.
#[derive(Debug, Clone, Copy)]
pub struct DrudeFit {
    /// Estimated σ₀, Gaussian units (s⁻¹).
    pub sigma0: f64,
    /// RMS of per-node estimates about the mean, same units as σ₀.
    pub residual_rms: f64,
    /// Number of grid nodes inside the fit window.
    pub nodes_used: usize,
}

/// Least-squares estimate of the DC conductivity from the low-frequency
/// absorptive response: per node, σ = ω·Im ε/4π; the estimate is the mean
/// over window nodes and the residual RMS quantifies how Drude-like the
/// window really is.
pub fn fit_drude_sigma(table: &PermittivityTable, window: (f64, f64)) -> Result<DrudeFit> {
    let (lo, hi) = window;
    if !(lo > 0.0) || !(hi > lo) {
        return Err(Error::Domain(format!(
            "fit window must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )));
    }
    if lo < table.omega_min() || hi > table.omega_max() {
        return Err(Error::Validation(format!(
            "fit window ({lo:.4e}, {hi:.4e}) rad/s extends outside the grid \
             [{:.4e}, {:.4e}]",
            table.omega_min(),
            table.omega_max()
        )));
    }
    let mut estimates = Vec::new();
    for i in 0..table.len() {
        let w = table.grid[i];
        if w >= lo && w <= hi {
            estimates.push(w * table.eps_im[i] / (4.0 * std::f64::consts::PI));
        }
    }
    if estimates.len() < 3 {
        return Err(Error::Validation(format!(
            "fit window contains {} nodes; need at least 3",
            estimates.len()
        )));
    }
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let var = estimates.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    Ok(DrudeFit {
        sigma0: mean,
        residual_rms: var.sqrt(),
        nodes_used: estimates.len(),
    })
}

/// A material's dielectric response: analytic Drude or tabulated data
/// (one or more crystal orientations with averaging weights).
#[derive(Debug, Clone)]
pub enum MaterialModel {
    Drude(DrudeModel),
    /// Weighted tabulated responses; weights must be non-negative and sum
    /// to 1. The weighting is applied at the polarizability level.
    Tabulated(Vec<(PermittivityTable, f64)>),
}

impl MaterialModel {
    pub fn drude(sigma0: f64) -> Result<Self> {
        Ok(MaterialModel::Drude(DrudeModel::new(sigma0)?))
    }

    pub fn tabulated(tables: Vec<(PermittivityTable, f64)>) -> Result<Self> {
        if tables.is_empty() {
            return Err(Error::Validation("no tables supplied".into()));
        }
        let sum: f64 = tables.iter().map(|(_, w)| w).sum();
        if tables.iter().any(|(_, w)| *w < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!(
                "orientation weights must be non-negative and sum to 1 (sum = {sum})"
            )));
        }
        Ok(MaterialModel::Tabulated(tables))
    }

    /// Highest frequency at which every underlying response is defined;
    /// `None` for analytic models.
    pub fn max_omega(&self) -> Option<f64> {
        match self {
            MaterialModel::Drude(_) => None,
            MaterialModel::Tabulated(tables) => tables
                .iter()
                .map(|(t, _)| t.omega_max())
                .min_by(f64::total_cmp),
        }
    }
}

/// Synthesize a table by sampling the Drude formula on a log grid.
/// Useful for exercising the tabulated code path against the analytic one.
pub fn synthesize_drude_table(
    sigma0: f64,
    e_min_ev: f64,
    e_max_ev: f64,
    points: usize,
) -> Result<PermittivityTable> {
    let model = DrudeModel::new(sigma0)?;
    if points < 4 {
        return Err(Error::Domain("need at least 4 sample points".into()));
    }
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        let e = e_min_ev * (e_max_ev / e_min_ev).powf(t);
        let w = photon_energy_to_angular_frequency(e)?;
        let eps = drude_permittivity(w, model)?;
        rows.push((e, eps.re, eps.im));
    }
    PermittivityTable::from_rows(
        format!("drude-synthetic sigma0={sigma0:e}"),
        Orientation::Isotropic,
        None,
        &rows,
    )
}
