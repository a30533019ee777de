//! Parameter sweeps over one or two axes, evaluated in parallel and written
//! as long-format CSV.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use super::input::coherent_input;
use crate::detection::{heralded_fidelity, DetectorModel};
use crate::devices::DeviceParams;
use crate::metrics::MetricReport;
use crate::scissors::{truncate_max, truncate_min, Configuration, HeraldedState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    S,
    Theta,
    PhiMinusBeta,
    AlphaMod,
    Eta,
    Nu,
}

impl Variable {
    pub const ALL: [Variable; 6] = [
        Variable::S,
        Variable::Theta,
        Variable::PhiMinusBeta,
        Variable::AlphaMod,
        Variable::Eta,
        Variable::Nu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variable::S => "s",
            Variable::Theta => "theta",
            Variable::PhiMinusBeta => "phi_minus_beta",
            Variable::AlphaMod => "alpha_mod",
            Variable::Eta => "eta",
            Variable::Nu => "nu",
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s" => Ok(Variable::S),
            "theta" => Ok(Variable::Theta),
            "phi_minus_beta" | "phi-minus-beta" | "phi" => Ok(Variable::PhiMinusBeta),
            "alpha_mod" | "alpha" => Ok(Variable::AlphaMod),
            "eta" => Ok(Variable::Eta),
            "nu" => Ok(Variable::Nu),
            _ => Err(Error::InvalidParameter(format!(
                "unknown sweep variable {s:?}"
            ))),
        }
    }
}

/// Evenly spaced samples including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub variable: Variable,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(variable: Variable, start: f64, stop: f64, count: usize) -> Self {
        Self {
            variable,
            start,
            stop,
            count,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let last = self.count - 1;
        (0..self.count)
            .map(|k| {
                if k == last {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / last as f64
                }
            })
            .collect()
    }
}

/// `s=0:1:101` style axis description.
impl FromStr for Axis {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidParameter(format!(
                "axis {text:?} is not of the form name=start:stop:count"
            ))
        };
        let (name, range) = text.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(Axis {
            variable: name.trim().parse()?,
            start: parts[0].trim().parse().map_err(|_| bad())?,
            stop: parts[1].trim().parse().map_err(|_| bad())?,
            count: parts[2].trim().parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Moments of the heralded state plus its probability.
    Metrics,
    Probability,
    /// Lossy detection against the ideal scissors output.
    Fidelity,
    /// Amplitudes of the heralded state.
    State,
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metrics" => Ok(SweepMode::Metrics),
            "probability" => Ok(SweepMode::Probability),
            "fidelity" => Ok(SweepMode::Fidelity),
            "state" => Ok(SweepMode::State),
            _ => Err(Error::InvalidParameter(format!("unknown sweep mode {s:?}"))),
        }
    }
}

/// Values of every parameter at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub s: f64,
    pub theta: f64,
    pub phi_minus_beta: f64,
    pub alpha_mod: f64,
    /// Detector efficiency, used in fidelity mode.
    pub eta: f64,
    /// Dark-count probability, used in fidelity mode.
    pub nu: f64,
}

impl Point {
    pub fn get(&self, variable: Variable) -> f64 {
        match variable {
            Variable::S => self.s,
            Variable::Theta => self.theta,
            Variable::PhiMinusBeta => self.phi_minus_beta,
            Variable::AlphaMod => self.alpha_mod,
            Variable::Eta => self.eta,
            Variable::Nu => self.nu,
        }
    }

    fn set(&mut self, variable: Variable, value: f64) {
        match variable {
            Variable::S => self.s = value,
            Variable::Theta => self.theta = value,
            Variable::PhiMinusBeta => self.phi_minus_beta = value,
            Variable::AlphaMod => self.alpha_mod = value,
            Variable::Eta => self.eta = value,
            Variable::Nu => self.nu = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    /// Values of the parameters not swept.
    pub fixed: Point,
    pub counts: Vec<usize>,
    pub mode: SweepMode,
    pub config: Configuration,
    /// Forces the input cutoff instead of choosing it from the tail mass.
    pub input_dim: Option<usize>,
}

pub const PRESETS: [&str; 13] = [
    "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12",
    "fig13", "fig14",
];

impl SweepSpec {
    /// Ranges and fixed values used for the figures. All share `θ = π/4`,
    /// `φ - β = π/2`, `|α| = 1` and `s = 0.5` unless swept.
    pub fn preset(name: &str) -> Result<Self> {
        let s_axis = Axis::new(Variable::S, 0.0, 1.0, 101);
        let theta_axis = Axis::new(Variable::Theta, 0.0, FRAC_PI_2, 101);
        let phi_axis = Axis::new(Variable::PhiMinusBeta, 0.0, 2.0 * PI, 101);
        let alpha_grid = Axis::new(Variable::AlphaMod, 0.0, 3.0, 61);
        let s_grid = Axis::new(Variable::S, 0.0, 1.0, 51);

        let (axes, counts, mode) = match name {
            "fig2" | "fig5" | "fig9" => (vec![s_axis], vec![1, 2, 3], SweepMode::Metrics),
            "fig3" | "fig7" | "fig10" => (vec![theta_axis], vec![1, 2, 3], SweepMode::Metrics),
            "fig4" | "fig8" => (vec![alpha_grid, s_grid], vec![1], SweepMode::Metrics),
            "fig6" => (vec![phi_axis], vec![1, 2, 3], SweepMode::Metrics),
            "fig11" => (vec![alpha_grid, s_grid], vec![1], SweepMode::Probability),
            "fig12" => (vec![alpha_grid, s_grid], vec![3], SweepMode::Probability),
            "fig13" => (
                vec![Axis::new(Variable::AlphaMod, 0.2, 3.0, 57)],
                vec![1, 2, 3],
                SweepMode::Fidelity,
            ),
            "fig14" => (vec![s_axis], vec![1, 2, 3], SweepMode::Fidelity),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown preset {name:?}; expected one of {}",
                    PRESETS.join(", ")
                )))
            }
        };
        let lossy = mode == SweepMode::Fidelity;
        Ok(Self {
            axes,
            fixed: Point {
                s: 0.5,
                theta: FRAC_PI_4,
                phi_minus_beta: FRAC_PI_2,
                alpha_mod: 1.0,
                eta: if lossy { 0.7 } else { 1.0 },
                nu: if lossy { 1e-4 } else { 0.0 },
            },
            counts,
            mode,
            config: Configuration::Max,
            input_dim: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if self.axes.is_empty() || self.axes.len() > 2 {
            return fail(format!(
                "a sweep needs one or two axes, got {}",
                self.axes.len()
            ));
        }
        if self.axes.len() == 2 && self.axes[0].variable == self.axes[1].variable {
            return fail(format!("axis {} given twice", self.axes[0].variable));
        }
        for axis in &self.axes {
            if axis.count < 2 {
                return fail(format!("axis {} needs at least 2 points", axis.variable));
            }
            if !(axis.start < axis.stop) || !axis.stop.is_finite() || !axis.start.is_finite() {
                return fail(format!(
                    "axis {} must have finite start < stop, got {}..{}",
                    axis.variable, axis.start, axis.stop
                ));
            }
            check_domain(axis.variable, axis.start)?;
            check_domain(axis.variable, axis.stop)?;
        }
        for v in Variable::ALL {
            check_domain(v, self.fixed.get(v))?;
        }
        if self.counts.is_empty() {
            return fail("at least one photon count N is required".into());
        }
        if self.input_dim == Some(0) {
            return Err(Error::InvalidDimension { dim: 0 });
        }
        Ok(())
    }

    /// Grid points in row-major order (last axis fastest).
    pub fn points(&self) -> Vec<Point> {
        let mut points = vec![self.fixed];
        for axis in &self.axes {
            let values = axis.values();
            points = points
                .iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = *p;
                        q.set(axis.variable, v);
                        q
                    })
                })
                .collect();
        }
        points
    }

    fn quantity_names(&self) -> Vec<String> {
        match self.mode {
            SweepMode::Metrics => ["probability", "mean_n", "mandel_q", "var_x", "skew_w"]
                .map(String::from)
                .to_vec(),
            SweepMode::Probability => ["probability", "tail_bound"].map(String::from).to_vec(),
            SweepMode::Fidelity => ["fidelity", "herald_probability", "ideal_probability"]
                .map(String::from)
                .to_vec(),
            SweepMode::State => Vec::new(),
        }
    }
}

fn check_domain(variable: Variable, value: f64) -> Result<()> {
    let ok = value.is_finite()
        && match variable {
            Variable::S | Variable::AlphaMod | Variable::Nu => value >= 0.0,
            Variable::Theta => (0.0..=FRAC_PI_2).contains(&value),
            Variable::Eta => (0.0..=1.0).contains(&value),
            Variable::PhiMinusBeta => true,
        };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{variable} = {value} is outside its domain"
        )))
    }
}

/// One CSV row; `None` cells are written empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub point: Point,
    pub count: usize,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axes: Vec<Variable>,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

fn heralded(spec: &SweepSpec, p: &Point, count: usize) -> Result<Option<HeraldedState>> {
    let input = coherent_input(p.alpha_mod, spec.input_dim)?;
    let params = DeviceParams::new(p.s, p.phi_minus_beta, p.theta)?;
    let out = match spec.config {
        Configuration::Max => truncate_max(&input.state, &params, count),
        Configuration::Min => truncate_min(&input.state, &params, count),
    };
    match out {
        Ok(h) => Ok(Some(h)),
        Err(Error::ZeroProbabilityHerald { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn evaluate(spec: &SweepSpec, p: &Point, count: usize) -> Result<Vec<Option<f64>>> {
    let width = spec.quantity_names().len();
    match spec.mode {
        SweepMode::Metrics => Ok(match heralded(spec, p, count)? {
            Some(h) => {
                let m = MetricReport::evaluate(&h.state);
                vec![
                    Some(h.probability),
                    Some(m.mean_n),
                    m.mandel_q,
                    Some(m.var_x),
                    m.skew_w,
                ]
            }
            None => vec![Some(0.0), None, None, None, None],
        }),
        SweepMode::Probability => Ok(match heralded(spec, p, count)? {
            Some(h) => vec![Some(h.probability), Some(h.tail_bound)],
            None => vec![Some(0.0), Some(0.0)],
        }),
        SweepMode::State => Ok(match heralded(spec, p, count)? {
            Some(h) => {
                let amps = h.state.amplitudes();
                amps.iter()
                    .map(|z| Some(z.re))
                    .chain(amps.iter().map(|z| Some(z.im)))
                    .collect()
            }
            None => Vec::new(),
        }),
        SweepMode::Fidelity => {
            let input = coherent_input(p.alpha_mod, spec.input_dim)?;
            let params = DeviceParams::new(p.s, p.phi_minus_beta, p.theta)?;
            let model = DetectorModel::new(p.eta, p.nu)?;
            match heralded_fidelity(&input.state, &params, spec.config, count, &model) {
                Ok(r) => Ok(vec![
                    Some(r.fidelity),
                    Some(r.herald_probability),
                    Some(r.ideal_probability),
                ]),
                Err(Error::ZeroProbabilityHerald { .. }) => Ok(vec![None; width]),
                Err(e) => Err(e),
            }
        }
    }
}

/// Evaluates every grid point and photon count. Rows come back in grid order
/// regardless of `workers`.
pub fn run_sweep(spec: &SweepSpec, workers: Option<usize>) -> Result<SweepTable> {
    spec.validate()?;
    let jobs: Vec<(Point, usize)> = spec
        .points()
        .into_iter()
        .flat_map(|p| spec.counts.iter().map(move |&n| (p, n)))
        .collect();
    let compute = || {
        jobs.par_iter()
            .map(|(p, n)| {
                evaluate(spec, p, *n).map(|values| Row {
                    point: *p,
                    count: *n,
                    values,
                })
            })
            .collect::<Result<Vec<Row>>>()
    };
    let mut rows = match workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(compute)?,
        None => compute()?,
    };

    let columns = if spec.mode == SweepMode::State {
        // Heralded states differ in size; pad every row to the widest.
        let width = rows.iter().map(|r| r.values.len() / 2).max().unwrap_or(0);
        for row in &mut rows {
            let k = row.values.len() / 2;
            let mut padded = vec![None; 2 * width];
            padded[..k].copy_from_slice(&row.values[..k]);
            padded[width..width + k].copy_from_slice(&row.values[k..]);
            row.values = padded;
        }
        (0..width)
            .map(|j| format!("re_{j}"))
            .chain((0..width).map(|j| format!("im_{j}")))
            .collect()
    } else {
        spec.quantity_names()
    };

    Ok(SweepTable {
        axes: spec.axes.iter().map(|a| a.variable).collect(),
        columns,
        rows,
    })
}

/// Round-trippable value with 17 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header: Vec<String> = self.axes.iter().map(|a| a.name().to_string()).collect();
        header.push("N".into());
        header.extend(self.columns.iter().cloned());
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let mut cells: Vec<String> = self
                .axes
                .iter()
                .map(|&a| format_value(row.point.get(a)))
                .collect();
            cells.push(row.count.to_string());
            cells.extend(
                row.values
                    .iter()
                    .map(|v| v.map(format_value).unwrap_or_default()),
            );
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Column of a quantity, in row order.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_endpoints_are_exact() {
        let a = Axis::new(Variable::S, 0.0, 1.0, 101);
        let v = a.values();
        assert_eq!(v.len(), 101);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[100], 1.0);
        assert!((v[50] - 0.5).abs() < 1e-16);
    }

    #[test]
    fn axis_parsing() {
        let a: Axis = "theta=0:1.5:4".parse().unwrap();
        assert_eq!(a, Axis::new(Variable::Theta, 0.0, 1.5, 4));
        assert!("theta=0:1.5".parse::<Axis>().is_err());
        assert!("gamma=0:1:3".parse::<Axis>().is_err());
    }

    #[test]
    fn every_preset_validates() {
        for name in PRESETS {
            SweepSpec::preset(name).unwrap().validate().unwrap();
        }
        assert!(SweepSpec::preset("fig1").is_err());
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let base = SweepSpec::preset("fig2").unwrap();
        let mut bad = base.clone();
        bad.axes[0].count = 1;
        assert!(bad.validate().is_err());
        let mut bad = base.clone();
        bad.axes[0] = Axis::new(Variable::S, 1.0, 0.0, 5);
        assert!(bad.validate().is_err());
        let mut bad = base.clone();
        bad.axes[0] = Axis::new(Variable::S, -1.0, 0.0, 5);
        assert!(bad.validate().is_err());
        let mut bad = base.clone();
        bad.fixed.theta = 2.0;
        assert!(bad.validate().is_err());
        let mut bad = base.clone();
        bad.fixed.eta = 1.5;
        assert!(bad.validate().is_err());
        let mut bad = base.clone();
        bad.axes[0] = Axis::new(Variable::Nu, -0.1, 0.1, 3);
        assert!(bad.validate().is_err());
        let mut bad = base;
        bad.counts.clear();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn points_are_row_major() {
        let mut spec = SweepSpec::preset("fig4").unwrap();
        spec.axes = vec![
            Axis::new(Variable::AlphaMod, 0.0, 1.0, 2),
            Axis::new(Variable::S, 0.0, 1.0, 3),
        ];
        let pts = spec.points();
        let pairs: Vec<(f64, f64)> = pts.iter().map(|p| (p.alpha_mod, p.s)).collect();
        assert_eq!(
            pairs,
            vec![
                (0.0, 0.0),
                (0.0, 0.5),
                (0.0, 1.0),
                (1.0, 0.0),
                (1.0, 0.5),
                (1.0, 1.0)
            ]
        );
    }

    #[test]
    fn zero_probability_points_leave_gaps() {
        let mut spec = SweepSpec::preset("fig2").unwrap();
        spec.axes = vec![Axis::new(Variable::S, 0.0, 0.5, 2)];
        spec.fixed.alpha_mod = 0.0;
        spec.counts = vec![1];
        let table = run_sweep(&spec, Some(1)).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "s,N,probability,mean_n,mandel_q,var_x,skew_w");
        assert!(lines[1].ends_with(",,,,"), "{}", lines[1]);
        assert!(!lines[2].contains(",,"), "{}", lines[2]);
    }

    #[test]
    fn detector_axes() {
        let mut spec = SweepSpec::preset("fig13").unwrap();
        spec.axes = vec![Axis::new(Variable::Eta, 0.5, 1.0, 3)];
        spec.counts = vec![1];
        let table = run_sweep(&spec, None).unwrap();
        let f: Vec<f64> = table
            .column("fidelity")
            .unwrap()
            .into_iter()
            .map(Option::unwrap)
            .collect();
        assert!(f[0] < f[1] && f[1] < f[2]);
        assert!((f[2] - 1.0).abs() < 0.01);
    }

    #[test]
    fn state_mode_pads_columns() {
        let mut spec = SweepSpec::preset("fig2").unwrap();
        spec.axes = vec![Axis::new(Variable::S, 0.1, 0.5, 2)];
        spec.mode = SweepMode::State;
        spec.counts = vec![1, 2];
        let table = run_sweep(&spec, Some(2)).unwrap();
        assert_eq!(table.columns.len(), 6);
        assert_eq!(table.rows[0].values[2], None);
        assert!(table.rows[1].values[2].is_some());
    }
}
