use std::path::PathBuf;

use clap::ValueEnum;
use jlgeom::evolution::{self, FlowResult, LeftInvariantField, PictureReport, PictureSetup};
use jlgeom::linalg::{self, MatrixData};
use jlgeom::CMat;
use serde::Serialize;

use crate::config::RunConfig;

pub const PICTURE_TOL: f64 = 1e-8;
pub const UNITARITY_TOL: f64 = 1e-9;
pub const RK4_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianSource {
    Random,
    File,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveConfig {
    #[serde(flatten)]
    pub run: RunConfig,
    pub t_max: f64,
    pub steps: usize,
    pub hamiltonian: HamiltonianSource,
    #[serde(skip)]
    pub hamiltonian_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub t: f64,
    pub schrodinger: f64,
    pub heisenberg: f64,
    pub geometric: f64,
    pub dev_schrodinger_heisenberg: f64,
    pub dev_schrodinger_geometric: f64,
    pub max_deviation: f64,
    pub unitarity_defect: f64,
    pub rk4_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub max_deviation: f64,
    pub max_unitarity_defect: f64,
    pub max_rk4_deviation: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveOutput {
    pub config: EvolveConfig,
    pub flow: FlowResult,
    pub rk4: FlowResult,
    pub pictures: PictureReport,
    pub summary: Summary,
    #[serde(skip)]
    pub rows: Vec<Row>,
}

fn setup(cfg: &EvolveConfig) -> Result<PictureSetup, String> {
    let run = &cfg.run;
    let mut s = evolution::random_picture_setup(run.n, run.hbar, run.seed).map_err(|e| e.to_string())?;
    if cfg.hamiltonian == HamiltonianSource::File {
        let path = cfg
            .hamiltonian_file
            .as_ref()
            .ok_or("--hamiltonian file needs --hamiltonian-file")?;
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let data: MatrixData = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let h = CMat::try_from(&data).map_err(|e| e.to_string())?;
        let setting = &s.field.setting;
        if h.nrows() != run.n || h.ncols() != run.n {
            return Err(format!("Hamiltonian is {}x{}, expected {}x{}", h.nrows(), h.ncols(), run.n, run.n));
        }
        // The file holds H at the foot; the field is generated by u^-1 H u.
        let u = setting.unitary_coordinate(&s.observable.foot).map_err(|e| e.to_string())?;
        let xi = u.adjoint() * h * &u;
        s.field = LeftInvariantField::new(xi, run.hbar, setting).map_err(|e| e.to_string())?;
    }
    Ok(s)
}

/// Errors are configuration errors; threshold violations are reported in
/// the summary.
pub fn run(cfg: EvolveConfig) -> Result<EvolveOutput, String> {
    if !(cfg.t_max.is_finite() && cfg.t_max >= 0.0) {
        return Err("--t-max must be finite and non-negative".into());
    }
    if cfg.steps == 0 {
        return Err("--steps must be at least 1".into());
    }
    let s = setup(&cfg)?;
    let grid = evolution::uniform_grid(cfg.t_max, cfg.steps);
    let e = |e: jlgeom::Error| e.to_string();
    let pictures = evolution::picture_equivalence_check(&s.field, &s.observable, &s.state, &grid).map_err(e)?;
    let x0 = s.field.setting.unitary_coordinate(&s.observable.foot).map_err(e)?;
    let flow = evolution::flow_closed_form(&s.field, &x0, &grid).map_err(e)?;
    let step = evolution::DEFAULT_STEP * cfg.run.hbar.abs().min(1.0);
    let rk4 = evolution::flow_rk4(&s.field, &x0, &grid, step).map_err(e)?;

    let exact = flow.matrices();
    let approx = rk4.matrices();
    let rows: Vec<Row> = pictures
        .samples
        .iter()
        .zip(exact.iter().zip(&approx))
        .map(|(p, (x, y))| {
            let sh = (p.schrodinger - p.heisenberg).abs();
            let sg = (p.schrodinger - p.geometric).abs();
            Row {
                t: p.t,
                schrodinger: p.schrodinger,
                heisenberg: p.heisenberg,
                geometric: p.geometric,
                dev_schrodinger_heisenberg: sh,
                dev_schrodinger_geometric: sg,
                max_deviation: sh.max(sg),
                unitarity_defect: linalg::unitarity_defect(x),
                rk4_deviation: (x - y).norm(),
            }
        })
        .collect();

    let max_deviation = pictures.max_schrodinger_heisenberg.max(pictures.max_schrodinger_geometric);
    let max_unitarity_defect = pictures.max_unitarity_defect.max(flow.max_unitarity_defect());
    let max_rk4_deviation = rows.iter().map(|r| r.rk4_deviation).fold(0.0, f64::max);
    let failure = if max_deviation > PICTURE_TOL {
        Some(format!("picture equivalence: deviation {max_deviation:.3e} exceeds {PICTURE_TOL:.0e}"))
    } else if max_unitarity_defect > UNITARITY_TOL {
        Some(format!("unitarity: defect {max_unitarity_defect:.3e} exceeds {UNITARITY_TOL:.0e}"))
    } else if max_rk4_deviation > RK4_TOL {
        Some(format!("RK4 flow: deviation {max_rk4_deviation:.3e} exceeds {RK4_TOL:.0e}"))
    } else {
        None
    };
    Ok(EvolveOutput {
        config: cfg,
        flow,
        rk4,
        pictures,
        summary: Summary {
            max_deviation,
            max_unitarity_defect,
            max_rk4_deviation,
            pass: failure.is_none(),
            failure,
        },
        rows,
    })
}

impl EvolveOutput {
    pub fn to_csv(&self) -> Result<String, String> {
        let c = &self.config;
        let mut head = String::from("# jlgeom evolve\n");
        head.push_str(&format!(
            "# n={} hbar={} t_max={} steps={} seed={} hamiltonian={}\n",
            c.run.n,
            c.run.hbar,
            c.t_max,
            c.steps,
            c.run.seed,
            match c.hamiltonian {
                HamiltonianSource::Random => "random",
                HamiltonianSource::File => "file",
            }
        ));
        head.push_str(&format!(
            "# max_deviation={:e} max_unitarity_defect={:e} max_rk4_deviation={:e} pass={}\n",
            self.summary.max_deviation, self.summary.max_unitarity_defect, self.summary.max_rk4_deviation, self.summary.pass
        ));
        let mut w = csv::Writer::from_writer(head.into_bytes());
        for r in &self.rows {
            w.serialize(r).map_err(|e| e.to_string())?;
        }
        let bytes = w.into_inner().map_err(|e| e.to_string())?;
        String::from_utf8(bytes).map_err(|e| e.to_string())
    }

    pub fn to_json(&self) -> Result<String, String> {
        serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| e.to_string())
    }
}
