//! The five run modes. Each returns its files in memory; writing them is
//! left to the caller so that runs can be tested without touching disk.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::config::{EnergyAxis, InitialState, Model, Mode, RunConfig, SweepParam, TimeGrid, TimeUnit};
use super::output::{gnuplot_script, Cell, OutputFile, Plot, Table};
use crate::dynamics::{diagnose, propagate, DiagnosticReport, Trajectory};
use crate::error::{Error, Result};
use crate::numkernel::{eig_general, CMatrix, DensityMatrix};
use crate::qdphonon::{self, partition_cells, CellLabel, ModePoint, Threshold};
use crate::rates::{jump_operators, lindblad_dissipator, Liouvillian, Scheme};
use crate::twolevel::{self, analytic_eigs, TwoLevelParams};

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub files: Vec<OutputFile>,
    /// True when any trajectory hit the overflow threshold.
    pub overflow: bool,
}

pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.mode {
        Mode::Spectrum => run_spectrum(cfg),
        Mode::Evolve => run_evolve(cfg),
        Mode::Partition => run_partition(cfg),
        Mode::RatesDump => run_rates_dump(cfg),
        Mode::Compare => run_compare(cfg),
    }
}

fn model(cfg: &RunConfig) -> Result<&Model> {
    cfg.model
        .as_ref()
        .ok_or_else(|| Error::config("<root>", format!("{} runs need a model", cfg.mode.as_str())))
}

fn tag(scheme: Scheme) -> &'static str {
    match scheme {
        Scheme::Cm => "cm",
        Scheme::Sym => "sym",
        Scheme::Free => "free",
        Scheme::LindbladDissipator => "dissipator",
    }
}

/// Assigns numeric eigenvalues to the analytic labels mu1..mu4 by the
/// permutation with the smallest worst-case distance.
fn label_eigenvalues(numeric: &[Complex64], analytic: &[Complex64; 4]) -> ([Complex64; 4], f64) {
    let mut perms = Vec::with_capacity(24);
    for a in 0..4 {
        for b in (0..4).filter(|&b| b != a) {
            for c in (0..4).filter(|&c| c != a && c != b) {
                perms.push([a, b, c, 6 - a - b - c]);
            }
        }
    }
    let mut best = ([Complex64::new(0.0, 0.0); 4], f64::INFINITY);
    for perm in perms {
        let dev = (0..4).map(|i| (numeric[perm[i]] - analytic[i]).norm()).fold(0.0, f64::max);
        if dev < best.1 {
            best = ([numeric[perm[0]], numeric[perm[1]], numeric[perm[2]], numeric[perm[3]]], dev);
        }
    }
    best
}

fn sweep_params(base: &TwoLevelParams, param: SweepParam, value: f64) -> Result<TwoLevelParams> {
    match param {
        SweepParam::Sigma => base.with_sigma(value),
        SweepParam::NTilde => base.with_n_tilde(value),
        SweepParam::SigmaRatio => {
            let Threshold::Finite(bar) = qdphonon::sigma_crit(base.eta, base.n_tilde) else {
                return Err(Error::config("sweep.param", "sigma_bar is unbounded"));
            };
            base.with_sigma(value * bar)
        }
    }
}

pub fn run_spectrum(cfg: &RunConfig) -> Result<RunOutput> {
    let m = model(cfg)?;
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::config("sweep", "required"))?;
    let mut out = RunOutput::default();
    for &scheme in &cfg.schemes {
        let rows = sweep
            .values
            .par_iter()
            .map(|&v| {
                let p = sweep_params(&m.params, sweep.param, v)?;
                let numeric = eig_general(twolevel::liouvillian(&p, scheme)?.matrix())?;
                let analytic = analytic_eigs(&p, scheme)?;
                let (mu, dev) = label_eigenvalues(&numeric.eigenvalues, &analytic.mu);
                Ok((v, p, mu, dev))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut header = vec![sweep.param.column().to_string()];
        if sweep.param != SweepParam::Sigma {
            header.push("sigma".into());
        }
        header.extend((1..=4).map(|i| format!("re_mu{i}")));
        header.extend((1..=4).map(|i| format!("im_mu{i}")));
        header.push("max_dev".into());
        let mut table = Table::new(&header);
        for (v, p, mu, dev) in rows {
            let mut row: Vec<Cell> = vec![v.into()];
            if sweep.param != SweepParam::Sigma {
                row.push(p.sigma.into());
            }
            row.extend(mu.iter().map(|z| Cell::from(z.re)));
            row.extend(mu.iter().map(|z| Cell::from(z.im)));
            row.push(dev.into());
            table.push(row);
        }
        let name = format!("spectrum_{}.csv", tag(scheme));
        let columns = (1..=4)
            .map(|i| (table.column(&format!("re_mu{i}")).expect("column"), format!("Re mu{i}")))
            .collect();
        let xlabel = match sweep.param {
            SweepParam::SigmaRatio => "sigma / sigma_bar",
            SweepParam::Sigma => "sigma",
            SweepParam::NTilde => "N",
        };
        let script = gnuplot_script(&Plot {
            csv: &name,
            title: &format!("{scheme}: real parts of the Liouvillian eigenvalues"),
            xlabel,
            ylabel: "Re mu / omega0",
            columns,
            logscale_y: false,
        });
        out.files.push(table.into_file(&name)?);
        out.files.push(OutputFile {
            name: format!("spectrum_{}.gp", tag(scheme)),
            contents: script,
        });
    }
    Ok(out)
}

/// Ginibre-style random state: `A A^dagger / tr(A A^dagger)` with uniform
/// complex entries.
pub fn random_state(n: usize, rng: &mut impl Rng) -> DensityMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let aa = &a * &a.adjoint();
    let tr = aa.trace().re;
    let m = CMatrix::from_fn(n, n, |r, c| {
        let z = (aa[(r, c)] + aa[(c, r)].conj()) * 0.5 / tr;
        if r == c {
            Complex64::new(z.re, 0.0)
        } else {
            z
        }
    });
    DensityMatrix::new(m).expect("positive, Hermitian, unit trace")
}

fn initial_state(cfg: &RunConfig, p: &TwoLevelParams) -> Result<DensityMatrix> {
    Ok(match &cfg.initial_state {
        InitialState::Ground => twolevel::ground_state(),
        InitialState::Steady => twolevel::steady_state(p.n_tilde)?,
        InitialState::Random => random_state(2, &mut ChaCha8Rng::seed_from_u64(cfg.seed)),
        InitialState::Explicit(rho) => rho.clone(),
    })
}

fn time_label(grid: &TimeGrid) -> &'static str {
    match grid.unit {
        TimeUnit::Omega0 => "t (1/omega0)",
        TimeUnit::Ps => "t (ps)",
    }
}

fn trajectories(cfg: &RunConfig) -> Result<(Vec<(Scheme, Trajectory)>, &TimeGrid)> {
    let m = model(cfg)?;
    let grid = cfg.time.as_ref().ok_or_else(|| Error::config("time", "required"))?;
    let rho0 = initial_state(cfg, &m.params)?;
    let runs = cfg
        .schemes
        .par_iter()
        .map(|&scheme| {
            let l = twolevel::liouvillian(&m.params, scheme)?;
            Ok((scheme, propagate(&l, &rho0, &grid.internal, cfg.method)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((runs, grid))
}

pub fn run_evolve(cfg: &RunConfig) -> Result<RunOutput> {
    let (runs, grid) = trajectories(cfg)?;
    let mut out = RunOutput::default();
    for (scheme, traj) in runs {
        let mut table = Table::new(&["t", "rho11", "rho22", "re_rho12", "im_rho12", "trace", "min_eig", "overflow"]);
        for (k, (rho, d)) in traj.states.iter().zip(&traj.diagnostics).enumerate() {
            let c = rho.get(0, 1);
            table.push(vec![
                grid.values[k].into(),
                rho.get(0, 0).re.into(),
                rho.get(1, 1).re.into(),
                c.re.into(),
                c.im.into(),
                d.trace_re.into(),
                d.min_eig.into(),
                d.overflow.into(),
            ]);
        }
        out.overflow |= traj.overflowed();
        let name = format!("evolve_{}.csv", tag(scheme));
        let script = gnuplot_script(&Plot {
            csv: &name,
            title: &format!("{scheme}: density matrix elements"),
            xlabel: time_label(grid),
            ylabel: "rho",
            columns: vec![
                (2, "rho11".into()),
                (3, "rho22".into()),
                (4, "Re rho12".into()),
                (5, "Im rho12".into()),
            ],
            logscale_y: false,
        });
        out.files.push(table.into_file(&name)?);
        out.files.push(OutputFile {
            name: format!("evolve_{}.gp", tag(scheme)),
            contents: script,
        });
    }
    Ok(out)
}

fn option_json(x: Option<f64>) -> serde_json::Value {
    x.map_or(serde_json::Value::Null, |v| json!(v))
}

pub fn run_compare(cfg: &RunConfig) -> Result<RunOutput> {
    let m = model(cfg)?;
    let (runs, grid) = trajectories(cfg)?;
    let find = |s: Scheme| runs.iter().find(|(x, _)| *x == s).map(|(_, t)| t);
    let (Some(cm), Some(sym)) = (find(Scheme::Cm), find(Scheme::Sym)) else {
        return Err(Error::config("scheme", "compare runs need `BOTH`"));
    };
    let mut header = vec!["t".to_string()];
    for s in ["cm", "sym"] {
        for col in ["rho11", "rho22", "re_rho12", "im_rho12", "trace", "min_eig", "overflow"] {
            header.push(format!("{s}_{col}"));
        }
    }
    let mut table = Table::new(&header);
    let mut population_gap: f64 = 0.0;
    for (k, &t) in grid.values.iter().enumerate() {
        let mut row: Vec<Cell> = vec![t.into()];
        for traj in [cm, sym] {
            match (traj.states.get(k), traj.diagnostics.get(k)) {
                (Some(rho), Some(d)) => {
                    let c = rho.get(0, 1);
                    row.extend([
                        rho.get(0, 0).re.into(),
                        rho.get(1, 1).re.into(),
                        c.re.into(),
                        c.im.into(),
                        d.trace_re.into(),
                        d.min_eig.into(),
                        d.overflow.into(),
                    ]);
                }
                _ => {
                    row.extend((0..6).map(|_| Cell::from(f64::NAN)));
                    row.push(true.into());
                }
            }
        }
        if let (Some(a), Some(b), Some(d)) = (cm.states.get(k), sym.states.get(k), cm.diagnostics.get(k)) {
            if !d.overflow {
                population_gap = population_gap.max((a.get(0, 0).re - b.get(0, 0).re).abs());
            }
        }
        table.push(row);
    }

    let cm_report: DiagnosticReport = diagnose(cm)?;
    let sym_report = diagnose(sym)?;
    let at = |k: Option<f64>| -> Option<f64> {
        let t = k?;
        let idx = grid.internal.iter().position(|x| *x == t)?;
        Some(grid.values[idx])
    };
    let summary = json!({
        "cm_diverged": cm.overflowed(),
        "cm_divergence_predicted": twolevel::divergence_predicate(&m.params),
        "sym_positive": sym_report.first_positivity_violation.is_none(),
        "cm_first_overflow_t": option_json(at(cm_report.first_overflow)),
        "cm_first_positivity_violation_t": option_json(at(cm_report.first_positivity_violation)),
        "cm_max_trace_drift": cm_report.max_trace_drift,
        "sym_max_trace_drift": sym_report.max_trace_drift,
        "sym_min_eig": sym_report.min_eig,
        "max_population_gap": population_gap,
        "time_unit": match grid.unit { TimeUnit::Omega0 => "omega0", TimeUnit::Ps => "ps" },
    });
    let mut out = RunOutput {
        files: Vec::new(),
        overflow: cm.overflowed() || sym.overflowed(),
    };
    let pop = |name: &str| table.column(name).expect("column");
    let script = gnuplot_script(&Plot {
        csv: "compare.csv",
        title: "CM vs SYM populations and polarization",
        xlabel: time_label(grid),
        ylabel: "rho",
        columns: vec![
            (pop("cm_rho11"), "CM rho11".into()),
            (pop("sym_rho11"), "SYM rho11".into()),
            (pop("cm_re_rho12"), "CM Re rho12".into()),
            (pop("sym_re_rho12"), "SYM Re rho12".into()),
        ],
        logscale_y: false,
    });
    out.files.push(table.into_file("compare.csv")?);
    out.files.push(OutputFile {
        name: "compare.gp".into(),
        contents: script,
    });
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    out.files.push(OutputFile {
        name: "compare_summary.json".into(),
        contents: text,
    });
    Ok(out)
}

fn dump_matrix(table: &mut Table, scheme: &str, part: &str, m: &CMatrix) {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let z = m[(r, c)];
            table.push(vec![scheme.into(), part.into(), (r + 1).into(), (c + 1).into(), z.re.into(), z.im.into()]);
        }
    }
}

pub fn run_rates_dump(cfg: &RunConfig) -> Result<RunOutput> {
    let p = &model(cfg)?.params;
    let basis = twolevel::basis(p);
    let free = crate::rates::free_liouvillian(&basis);
    let mut table = Table::new(&["scheme", "part", "row", "col", "re", "im"]);
    for &scheme in &cfg.schemes {
        let total: Liouvillian = twolevel::liouvillian(p, scheme)?;
        let scatt = total.matrix().try_sub(free.matrix())?;
        let name = scheme.to_string();
        dump_matrix(&mut table, &name, "free", free.matrix());
        dump_matrix(&mut table, &name, "scatt", &scatt);
        dump_matrix(&mut table, &name, "total", total.matrix());
        if scheme == Scheme::Sym {
            let mode = twolevel::mode_coupling(p);
            let jumps = jump_operators(&basis, &mode, cfg.omega_bar * p.omega0)?;
            let occ = BTreeMap::from([(mode.label.clone(), mode.occupation)]);
            let dissipator = lindblad_dissipator(&jumps, &occ)?;
            dump_matrix(&mut table, &name, "jump_dissipator", dissipator.matrix());
        }
    }
    Ok(RunOutput {
        files: vec![table.into_file("rates_dump.csv")?],
        overflow: false,
    })
}

pub fn run_partition(cfg: &RunConfig) -> Result<RunOutput> {
    let spec = cfg.partition.as_ref().ok_or_else(|| Error::config("partition", "required"))?;
    let (energies, points, cells) = match &spec.energies {
        EnergyAxis::Physical {
            material,
            geometry,
            energies,
        } => {
            let (points, cells) = qdphonon::partition_map(&spec.n_grid, energies, material, geometry)?;
            (energies.clone(), points, cells)
        }
        EnergyAxis::Table(rows) => {
            let energies: Vec<f64> = rows.iter().map(|r| r.hbar_omega0_mev).collect();
            let points: Vec<Option<ModePoint>> = rows.iter().copied().map(Some).collect();
            let cells = partition_cells(&spec.n_grid, &energies, &points);
            (energies, points, cells)
        }
    };

    let mut grid_table = Table::new(&["N_tilde", "hbar_omega0_meV", "label"]);
    for c in &cells {
        grid_table.push(vec![c.n_tilde.into(), c.hbar_omega0_mev.into(), c.label.as_str().into()]);
    }
    let mut boundary = Table::new(&["hbar_omega0_meV", "eta2", "sigma", "N_bar", "status"]);
    for (e, point) in energies.iter().zip(&points) {
        let row: Vec<Cell> = match point {
            Some(p) => {
                let (n_bar, status) = match p.n_bar() {
                    Threshold::Finite(x) => (x, "finite"),
                    Threshold::Unbounded => (f64::INFINITY, "unbounded"),
                };
                vec![(*e).into(), p.eta2.into(), p.sigma.into(), n_bar.into(), status.into()]
            }
            None => vec![
                (*e).into(),
                f64::NAN.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                CellLabel::Singular.as_str().into(),
            ],
        };
        boundary.push(row);
    }
    let script = {
        let mut s = gnuplot_script(&Plot {
            csv: "partition_boundary.csv",
            title: "Critical occupation N_bar",
            xlabel: "hbar omega0 (meV)",
            ylabel: "N",
            columns: vec![(4, "N_bar".into())],
            logscale_y: true,
        });
        s.push_str("# cells: filter partition.csv by label, e.g.\n");
        s.push_str("# plot 'partition.csv' using 2:(strcol(3) eq 'nonphysical' ? $1 : 1/0) with points title 'nonphysical'\n");
        s
    };
    Ok(RunOutput {
        files: vec![
            grid_table.into_file("partition.csv")?,
            boundary.into_file("partition_boundary.csv")?,
            OutputFile {
                name: "partition.gp".into(),
                contents: script,
            },
        ],
        overflow: false,
    })
}
