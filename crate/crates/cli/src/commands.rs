use morrey_core::analysis::{
    axial_rotations, check_antisymmetry, check_symmetry, duality_gap_1d, duality_gap_grid,
    midpoint_reflection, stability_deficit_1d, stability_deficit_grid, DualityCertificate,
};
use morrey_core::extremal1d::{
    best_constant_1d, distribution_function, extremal_1d, farfield_limits_1d, hat_tests_at_atoms,
    hat_tests_uniform, weak_residual_1d,
};
use morrey_core::measure::point_to_vec;
use morrey_core::seminorm::{comparison_constant, seminorm, SearchConfig};
use morrey_core::solver::{
    check_bounds, farfield_check, minimize, splat, ExtremalResult, GridConfig, GridField, SolverConfig,
};
use morrey_core::{integrate, Exponent, Point, SignedMeasure};

use crate::args::{Cli, Command, Output, Problem, SearchArgs, SolverArgs};
use crate::error::CliError;
use crate::io::{emit, exponent, read_field, read_measure, write_field_csv, write_key_value_csv, Field};
use crate::report::*;

const MAX_SYMMETRY_SAMPLES: usize = 20_000;
const BOUNDS_TOL: f64 = 1e-3;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extremal1d { problem, samples, output } => extremal1d(&problem, samples, &output),
        Command::Constant { problem, solver, output } => constant(&problem, &solver, &output),
        Command::Seminorm { problem, field, search, output } => {
            seminorm_cmd(&problem, &field.field, &search, &output)
        }
        Command::Solve { problem, solver, field_out, output } => {
            solve(&problem, &solver, field_out.as_deref(), &output)
        }
        Command::Stability { problem, field, c, solver, output } => {
            stability(&problem, &field.field, c, &solver, &output)
        }
        Command::Duality { problem, solver, output } => duality(&problem, &solver, &output),
        Command::Verify { problem, solver, output } => verify(&problem, &solver, &output),
    }
}

fn load(problem: &Problem) -> Result<(SignedMeasure, Exponent), CliError> {
    let rho = read_measure(&problem.measure)?;
    let exp = exponent(problem.p, rho.dim())?;
    Ok((rho, exp))
}

fn require_line(rho: &SignedMeasure, command: &str) -> Result<(), CliError> {
    if rho.dim() != 1 {
        return Err(CliError::Config(format!("`{command}` needs a measure on the line, got n = {}", rho.dim())));
    }
    Ok(())
}

fn solver_config(args: &SolverArgs) -> (GridConfig, SolverConfig) {
    let grid = GridConfig {
        half_width: args.half_width,
        resolution: args.res,
    };
    let cfg = SolverConfig {
        method: args.method.into(),
        init: args.init.into(),
        seed: args.seed,
        residual_tol: args.tol,
        max_iter: args.max_iter,
        ..SolverConfig::default()
    };
    (grid, cfg)
}

fn solve_grid(rho: &SignedMeasure, exp: &Exponent, args: &SolverArgs) -> Result<ExtremalResult, CliError> {
    if rho.dim() < 2 {
        return Err(CliError::Config("the grid solver needs n >= 2".into()));
    }
    let (grid, cfg) = solver_config(args);
    Ok(minimize(rho, exp, &grid, &cfg)?)
}

fn grid_summary(r: &ExtremalResult) -> GridSummary {
    let g = r.field.grid();
    GridSummary {
        half_width: g.hi()[0],
        resolution: g.resolution(),
        iterations: r.iterations,
        el_residual: r.el_residual,
        stop: r.stop,
    }
}

/// Shortest round-trip decimal, as in the JSON output.
fn number(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_default()
}

fn key_value<T: serde::Serialize>(report: &T) -> impl FnOnce(&mut dyn std::io::Write) -> Result<(), CliError> + '_ {
    move |out| write_key_value_csv(report, out)
}

fn extremal1d(problem: &Problem, samples: Option<usize>, output: &Output) -> Result<(), CliError> {
    let (rho, exp) = load(problem)?;
    require_line(&rho, "extremal1d")?;
    let v = extremal_1d(&rho, &exp)?;
    let (left_limit, right_limit) = farfield_limits_1d(&v);
    let report = Extremal1dReport {
        p: exp.p(),
        q: exp.q(),
        cstar: best_constant_1d(&rho, &exp)?,
        breakpoints: v.breakpoints().to_vec(),
        nodes: v.nodes().to_vec(),
        left_limit,
        right_limit,
        distribution: distribution_function(&rho)?.into(),
    };
    emit(&report, output, |out| {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| CliError::Config(e.to_string());
        w.write_record(["x", "v"]).map_err(err)?;
        let rows = match samples {
            Some(count) => {
                let (lo, hi) = (v.breakpoints()[0], v.breakpoints()[v.breakpoints().len() - 1]);
                let pad = if hi > lo { 0.25 * (hi - lo) } else { 1.0 };
                v.sample(lo - pad, hi + pad, count)
            }
            None => v.breakpoints().iter().copied().zip(v.nodes().iter().copied()).collect(),
        };
        for (x, y) in rows {
            w.write_record([number(x), number(y)]).map_err(err)?;
        }
        w.flush()?;
        Ok(())
    })
}

fn constant(problem: &Problem, solver: &SolverArgs, output: &Output) -> Result<(), CliError> {
    let (rho, exp) = load(problem)?;
    let (method, cstar, cert, grid) = if rho.dim() == 1 {
        let cstar = best_constant_1d(&rho, &exp)?;
        (ConstantMethod::Exact, cstar, duality_gap_1d(&rho, &exp)?, None)
    } else {
        let r = solve_grid(&rho, &exp, solver)?;
        let cert = duality_gap_grid(&r, &rho, &exp)?;
        (ConstantMethod::GridEstimate, r.cstar_estimate, cert, Some(grid_summary(&r)))
    };
    let report = ConstantReport {
        dim: rho.dim(),
        p: exp.p(),
        method,
        cstar,
        duality_cstar: cert.cstar,
        bracket: [cstar.min(cert.cstar), cstar.max(cert.cstar)],
        grid,
    };
    emit(&report, output, key_value(&report))
}

fn search_config(args: &SearchArgs, keep_trace: bool) -> SearchConfig {
    SearchConfig {
        scale_samples: args.scale_samples,
        shift_samples: args.shift_samples,
        orientation_samples: args.orientations,
        polish_starts: args.polish_starts,
        polish_tolerance: args.tol,
        keep_trace,
        ..SearchConfig::default()
    }
}

fn seminorm_cmd(
    problem: &Problem,
    field: &std::path::Path,
    search: &SearchArgs,
    output: &Output,
) -> Result<(), CliError> {
    let (rho, exp) = load(problem)?;
    let u = read_field(field, rho.dim())?;
    let keep_trace = output.format == crate::args::Format::Csv;
    let found = seminorm(u.as_scalar(), &rho, &exp, &search_config(search, keep_trace))?;
    let report = SeminormReport {
        value: found.value,
        ratio_at_argmax: found.ratio_at_argmax,
        argmax: found.argmax.to_spec(),
        evaluations: found.evaluations,
        constancy_failure: found.constancy_failure,
        comparison_constant: comparison_constant(&rho, &exp),
    };
    emit(&report, output, |out| Ok(found.write_trace_csv(rho.dim(), out)?))
}

/// Node coordinates, thinned to at most [`MAX_SYMMETRY_SAMPLES`] points.
fn symmetry_samples(u: &GridField) -> Vec<Point> {
    let stride = u.grid().node_count().div_ceil(MAX_SYMMETRY_SAMPLES);
    u.samples().step_by(stride.max(1)).map(|(x, _)| x).collect()
}

fn symmetry_scores(u: &GridField, rho: &SignedMeasure) -> Result<Option<SymmetryScores>, CliError> {
    let [a, b] = rho.atoms() else {
        return Ok(None);
    };
    let dim = rho.dim();
    let (x0, y0) = (point_to_vec(&a.location, dim), point_to_vec(&b.location, dim));
    let samples = symmetry_samples(u);
    let range = u.range();
    let scale = if range > 0.0 { range } else { 1.0 };
    let mut axial = 0.0f64;
    for t in axial_rotations(&x0, &y0, 8)? {
        axial = axial.max(check_symmetry(u, &t, rho, &samples)?);
    }
    let reflection = midpoint_reflection(&x0, &y0)?;
    let anti = check_antisymmetry(u, &reflection, rho, &samples)?;
    Ok(Some(SymmetryScores {
        axial: axial / scale,
        antisymmetry: anti / scale,
    }))
}

fn solve(
    problem: &Problem,
    solver: &SolverArgs,
    field_out: Option<&std::path::Path>,
    output: &Output,
) -> Result<(), CliError> {
    let (rho, exp) = load(problem)?;
    let r = solve_grid(&rho, &exp, solver)?;
    let u = &r.field;
    let sp = splat(&rho, u.grid())?;
    let report = SolveReport {
        dim: rho.dim(),
        p: exp.p(),
        grid: grid_summary(&r),
        multiplier: r.multiplier,
        energy: r.energy,
        seminorm: r.seminorm_value,
        cstar_estimate: r.cstar_estimate,
        maximizer: r.maximizer.to_spec(),
        bounds: check_bounds(u, &sp, BOUNDS_TOL),
        farfield: farfield_check(u, &rho),
        symmetry: symmetry_scores(u, &rho)?,
        duality: duality_gap_grid(&r, &rho, &exp)?,
    };
    if let Some(path) = field_out {
        let file = std::fs::File::create(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        write_field_csv(u, std::io::BufWriter::new(file))?;
    }
    emit(&report, output, |out| Ok(write_field_csv(u, out)?))
}

fn stability(
    problem: &Problem,
    field: &std::path::Path,
    c: Option<f64>,
    solver: &SolverArgs,
    output: &Output,
) -> Result<(), CliError> {
    let (rho, exp) = load(problem)?;
    let search = SearchConfig {
        keep_trace: false,
        ..SearchConfig::default()
    };
    let report = match read_field(field, rho.dim())? {
        Field::Line(v) => {
            let (constant, constant_source) = match c {
                Some(c) => (c, ConstantSource::Given),
                None => (best_constant_1d(&rho, &exp)?, ConstantSource::Exact),
            };
            let report = stability_deficit_1d(&v, &rho, &exp, constant, &search)?;
            StabilityOutput {
                constant,
                constant_source,
                report,
            }
        }
        Field::Grid(v) => {
            let grid = *v.grid();
            let (lo, hi) = (grid.lo(), grid.hi());
            let centered = (0..grid.dim()).all(|k| (lo[k] + hi[k]).abs() <= 1e-9 * hi[k].abs());
            if !centered {
                return Err(CliError::Config("grid fields for `stability` must sample a box [-L, L]^n".into()));
            }
            let found = seminorm(&v, &rho, &exp, &search)?;
            let mu = found.argmax.pushforward(&rho);
            let (_, mut cfg) = solver_config(solver);
            cfg.search = search;
            let grid_cfg = GridConfig {
                half_width: Some(hi[0]),
                resolution: grid.resolution(),
            };
            let r = minimize(&mu, &exp, &grid_cfg, &cfg)?;
            let scale = integrate(&v, &mu)? / integrate(&r.field, &mu)?;
            let u = GridField::new(grid, r.field.values().iter().map(|x| scale * x).collect())?;
            let (constant, constant_source) = match c {
                Some(c) => (c, ConstantSource::Given),
                None => (r.cstar_estimate, ConstantSource::GridEstimate),
            };
            let mut report = stability_deficit_grid(&v, &u, found.value, &exp, constant)?;
            report.matched_extremal_scale = scale;
            StabilityOutput {
                constant,
                constant_source,
                report,
            }
        }
    };
    emit(&report, output, key_value(&report))
}

fn certificate(rho: &SignedMeasure, exp: &Exponent, solver: &SolverArgs) -> Result<DualityCertificate, CliError> {
    if rho.dim() == 1 {
        Ok(duality_gap_1d(rho, exp)?)
    } else {
        let r = solve_grid(rho, exp, solver)?;
        Ok(duality_gap_grid(&r, rho, exp)?)
    }
}

fn duality(problem: &Problem, solver: &SolverArgs, output: &Output) -> Result<(), CliError> {
    let (rho, exp) = load(problem)?;
    let cert = certificate(&rho, &exp, solver)?;
    emit(&cert, output, key_value(&cert))
}

fn verify_line(rho: &SignedMeasure, exp: &Exponent) -> Result<Vec<Check>, CliError> {
    let v = extremal_1d(rho, exp)?;
    let cstar = best_constant_1d(rho, exp)?;
    let cert = duality_gap_1d(rho, exp)?;
    let b = v.breakpoints();
    let (lo, hi) = (b[0], b[b.len() - 1]);
    let width = ((hi - lo) / 8.0).max(f64::MIN_POSITIVE);
    let mut tests = hat_tests_at_atoms(rho, width);
    tests.extend(hat_tests_uniform(lo - width, hi + width, 100));
    let mass = rho.total_variation();
    let search = SearchConfig {
        keep_trace: false,
        ..SearchConfig::default()
    };
    let semi = seminorm(&v, rho, exp, &search)?;
    let stab = stability_deficit_1d(&v, rho, exp, cstar, &search)?;
    let mut checks = vec![
        Check::at_most("weak_euler_lagrange", weak_residual_1d(&v, rho, exp, &tests)?, 1e-12 * mass),
        Check::at_most("duality_gap", cert.gap.abs(), 1e-12 * cert.flux_norm.max(1.0)),
        Check::at_most("duality_cstar", (cert.cstar - cstar).abs(), 1e-12 * cstar.max(1.0)),
        Check::at_most("divergence_residual", cert.divergence_residual, 1e-12 * mass),
        Check::at_most(
            "seminorm_attains_cstar",
            (semi.value / v.gradient_norm(exp.p()) - cstar).abs(),
            1e-6 * cstar,
        ),
        Check::at_most("stability_at_extremal", (-stab.slack).max(0.0), 1e-9 * stab.rhs.max(1.0)),
    ];
    if let [a, b] = rho.atoms() {
        let t = midpoint_reflection(&[a.location[0]], &[b.location[0]])?;
        let samples: Vec<Point> = v
            .sample(lo - width, hi + width, 201)
            .into_iter()
            .map(|(x, _)| Point::new(x, 0.0, 0.0))
            .collect();
        let range = (v.nodes().iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - v.nodes().iter().copied().fold(f64::INFINITY, f64::min))
        .max(f64::MIN_POSITIVE);
        checks.push(Check::at_most(
            "antisymmetry",
            check_antisymmetry(&v, &t, rho, &samples)? / range,
            1e-12,
        ));
    }
    Ok(checks)
}

fn verify_grid(rho: &SignedMeasure, exp: &Exponent, solver: &SolverArgs) -> Result<Vec<Check>, CliError> {
    let r = solve_grid(rho, exp, solver)?;
    let u = &r.field;
    let sp = splat(rho, u.grid())?;
    let cert = duality_gap_grid(&r, rho, exp)?;
    let bounds = check_bounds(u, &sp, BOUNDS_TOL);
    let mut checks = vec![
        Check::at_most("el_residual", r.el_residual, 1e-6),
        Check::at_most("bounds_relative_slack", bounds.relative_slack, BOUNDS_TOL),
        Check::at_most("duality_gap", cert.gap.abs(), 1e-10 * cert.flux_norm),
        Check::at_most("divergence_residual", cert.divergence_residual, 1e-6 * rho.total_variation()),
        Check::at_most("pairing_normalized", (integrate(u, rho)? - 1.0).abs(), 1e-10),
    ];
    if let Some(s) = symmetry_scores(u, rho)? {
        checks.push(Check::at_most("axial_symmetry", s.axial, 1e-2));
        checks.push(Check::at_most("antisymmetry", s.antisymmetry, 1e-2));
        let far = farfield_check(u, rho);
        let mid = 0.5 * (rho.atoms()[0].location + rho.atoms()[1].location);
        if let (Some(dev), true) = (far.relative_midpoint_deviation, mid.norm() <= 1e-12 * rho.support_radius()) {
            checks.push(Check::at_most("farfield_midpoint", dev, 1e-6));
        }
    }
    Ok(checks)
}

fn verify(problem: &Problem, solver: &SolverArgs, output: &Output) -> Result<(), CliError> {
    let (rho, exp) = load(problem)?;
    let checks = if rho.dim() == 1 {
        verify_line(&rho, &exp)?
    } else {
        verify_grid(&rho, &exp, solver)?
    };
    let failed = checks.iter().filter(|c| !c.pass).count();
    let report = VerifyReport {
        dim: rho.dim(),
        p: exp.p(),
        checks,
        pass: failed == 0,
    };
    emit(&report, output, |out| {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| CliError::Config(e.to_string());
        w.write_record(["name", "value", "tolerance", "pass"]).map_err(err)?;
        for c in &report.checks {
            w.write_record([c.name.clone(), number(c.value), number(c.tolerance), c.pass.to_string()])
                .map_err(err)?;
        }
        w.flush()?;
        Ok(())
    })?;
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}
