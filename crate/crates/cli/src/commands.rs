use std::io::Write;

use qmix::analytic::{
    borel_limit, borel_radius, borel_ratio, density_lmax_general, density_r_4, r_star, PiecewiseDensity, RTail,
    SUPPORTED_LMAX_DIMS,
};
use qmix::criteria::{is_ppt, violates_qinf_entropic};
use qmix::linalg::{compose_state, haar_unitary};
use qmix::montecarlo::{
    chunk_rng, compare_to_density, estimate_mean_spectrum, estimate_probabilities, run_histogram, DensityComparison,
    Histogram, RunPlan, Statistic, MIN_EXPECTED,
};
use qmix::samplers::SpectrumSampler;
use qmix::stats::student_t_critical;
use qmix::{DensityMatrix, MeasureSpec};

use crate::config::{Command, RunConfig};
use crate::csv::{num, opt, CsvWriter};
use crate::CliError;

fn runtime(e: qmix::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

fn io(e: std::io::Error) -> CliError {
    CliError::Runtime(format!("write failed: {e}"))
}

pub fn run<W: Write>(cfg: &RunConfig, out: W) -> Result<W, CliError> {
    let mut w = CsvWriter::new(out);
    for line in cfg.header_lines() {
        w.comment(&line).map_err(io)?;
    }
    match cfg.command {
        Command::DistR => dist(cfg, &mut w, Statistic::ParticipationRatio)?,
        Command::DistLmax => dist(cfg, &mut w, Statistic::MaxEigenvalue)?,
        Command::Psep => psep(cfg, &mut w)?,
        Command::Rstar => rstar(cfg, &mut w)?,
        Command::Borel => borel(cfg, &mut w)?,
        Command::Sample => sample(cfg, &mut w)?,
    }
    w.finish().map_err(io)
}

fn plan(cfg: &RunConfig, seed: u64) -> RunPlan {
    RunPlan::new(cfg.samples, seed)
}

/// The uniform measure on spectra, for which closed forms exist.
fn is_flat(measure: &MeasureSpec) -> bool {
    match measure {
        MeasureSpec::SimplexUniform => true,
        MeasureSpec::Dirichlet { eta } => *eta == 1.0,
        _ => false,
    }
}

/// Where an analytic density is known, and over which range it applies.
enum Analytic {
    Full(PiecewiseDensity),
    Tail(RTail),
    None,
}

impl Analytic {
    fn for_command(cfg: &RunConfig, stat: &Statistic) -> Analytic {
        if !is_flat(&cfg.measure) {
            return Analytic::None;
        }
        match stat {
            Statistic::ParticipationRatio if cfg.n == 4 => Analytic::Full(density_r_4()),
            Statistic::ParticipationRatio if cfg.n >= 3 => Analytic::Tail(RTail::new(cfg.n).expect("N >= 3")),
            Statistic::MaxEigenvalue if SUPPORTED_LMAX_DIMS.contains(&cfg.n) => {
                Analytic::Full(density_lmax_general(cfg.n).expect("supported N"))
            }
            _ => Analytic::None,
        }
    }

    fn density(&self, x: f64) -> Option<f64> {
        match self {
            Analytic::Full(d) => Some(d.eval(x)),
            Analytic::Tail(t) => {
                let (lo, hi) = t.support();
                (x >= lo && x <= hi).then(|| t.absolute(x))
            }
            Analytic::None => None,
        }
    }

    /// Probability of `[a, b]`, if the bin lies where the density is known.
    fn bin_mass(&self, a: f64, b: f64) -> Option<f64> {
        match self {
            Analytic::Full(d) => Some(d.integrate(a, b)),
            Analytic::Tail(t) => {
                let (lo, hi) = t.support();
                let eps = 1e-12;
                (a >= lo - eps && b <= hi + eps)
                    .then(|| qmix::analytic::adaptive_simpson(&|x| t.absolute(x), a.max(lo), b.min(hi), 1e-12))
            }
            Analytic::None => None,
        }
    }
}

fn dist<W: Write>(cfg: &RunConfig, w: &mut CsvWriter<W>, stat: Statistic) -> Result<(), CliError> {
    let range = stat.natural_range(cfg.n).expect("built-in statistic");
    let hist = run_histogram(&cfg.measure, cfg.dims, &stat, range, cfg.bins, &plan(cfg, cfg.seed)).map_err(runtime)?;
    let analytic = Analytic::for_command(cfg, &stat);

    if matches!(stat, Statistic::MaxEigenvalue) {
        let bps: Vec<String> = (1..cfg.n.saturating_sub(1)).map(|i| num(1.0 / (cfg.n - i) as f64)).collect();
        w.comment(&format!("breakpoints = {}", bps.join(","))).map_err(io)?;
    } else {
        let bps: Vec<String> = (2..cfg.n).map(|i| i.to_string()).collect();
        w.comment(&format!("breakpoints = {}", bps.join(","))).map_err(io)?;
    }
    let label = match stat {
        Statistic::ParticipationRatio => "R_bin_center",
        _ => "lambda_max_bin_center",
    };
    w.row(&[label, "empirical_density", "empirical_ci", "analytic_density", "z_score"]).map_err(io)?;

    let m = hist.total() as f64;
    let t = student_t_critical(cfg.alpha, (m - 1.0).max(1.0));
    let mut worst = None::<f64>;
    for i in 0..hist.bins() {
        let (a, b) = hist.bin_range(i);
        let width = b - a;
        let obs = hist.counts()[i] as f64;
        let p = obs / m;
        let ci = t * (p * (1.0 - p)).sqrt() / (m - 1.0).max(1.0).sqrt() / width;
        let x = hist.bin_center(i);
        let z = analytic.bin_mass(a, b).and_then(|q| {
            let expected = m * q;
            (expected >= MIN_EXPECTED).then(|| (obs - expected) / (expected * (1.0 - q)).sqrt())
        });
        if let Some(z) = z {
            worst = Some(worst.map_or(z.abs(), |w| w.max(z.abs())));
        }
        w.row(&[num(x), num(obs / (m * width)), num(ci), opt(analytic.density(x)), opt(z)]).map_err(io)?;
    }
    footer(w, &hist, &analytic, worst)
}

fn footer<W: Write>(
    w: &mut CsvWriter<W>,
    hist: &Histogram,
    analytic: &Analytic,
    worst_bin_z: Option<f64>,
) -> Result<(), CliError> {
    w.comment(&format!("out_of_range = {}", hist.below() + hist.above())).map_err(io)?;
    w.comment(&format!("mode = {}", num(hist.mode_center()))).map_err(io)?;
    if let Analytic::Full(d) = analytic {
        let c: DensityComparison = compare_to_density(hist, d).map_err(runtime)?;
        w.comment(&format!("max_abs_z = {}", num(c.max_abs_z))).map_err(io)?;
        w.comment(&format!("chi_square = {} (dof {}, p = {})", num(c.chi_square), c.dof, num(c.p_value)))
            .map_err(io)?;
        w.comment(&format!("merged_bins = {}", c.merged)).map_err(io)?;
    } else if let Some(z) = worst_bin_z {
        w.comment(&format!("max_abs_z = {} (bins with analytic density)", num(z))).map_err(io)?;
    }
    Ok(())
}

fn psep<W: Write>(cfg: &RunConfig, w: &mut CsvWriter<W>) -> Result<(), CliError> {
    w.row(&["eta", "P_ppt", "ci", "P_entropic_violation", "ci"]).map_err(io)?;
    let mut prev: Option<(f64, f64)> = None;
    let mut monotone = true;
    let mut consistent = true;
    for (i, &eta) in cfg.etas.iter().enumerate() {
        let preds: [&(dyn Fn(&DensityMatrix) -> bool + Sync); 2] = [&is_ppt, &violates_qinf_entropic];
        let est = estimate_probabilities(
            &preds,
            &MeasureSpec::dirichlet(eta),
            cfg.dims,
            &plan(cfg, cfg.seed.wrapping_add(i as u64)),
            cfg.alpha,
        )
        .map_err(runtime)?;
        let (ppt, viol) = (est[0], est[1]);
        if let Some((p, hw)) = prev {
            monotone &= ppt.mean >= p - (hw + ppt.half_width);
        }
        prev = Some((ppt.mean, ppt.half_width));
        consistent &= viol.mean <= 1.0 - ppt.mean + 3.0 * (ppt.half_width + viol.half_width);
        w.row(&[num(eta), num(ppt.mean), num(ppt.half_width), num(viol.mean), num(viol.half_width)]).map_err(io)?;
    }
    check(w, "P_ppt nondecreasing in eta", monotone)?;
    check(w, "P_entropic_violation <= 1 - P_ppt", consistent)
}

fn rstar<W: Write>(cfg: &RunConfig, w: &mut CsvWriter<W>) -> Result<(), CliError> {
    w.row(&["eta", "R_star_analytic", "mean_R_empirical", "ci"]).map_err(io)?;
    let mut above = true;
    for (i, &eta) in cfg.etas.iter().enumerate() {
        let exact = r_star(eta, cfg.n).map_err(runtime)?;
        let est = estimate_mean_spectrum(
            |s| s.participation_ratio(),
            &MeasureSpec::dirichlet(eta),
            cfg.n,
            &plan(cfg, cfg.seed.wrapping_add(i as u64)),
            cfg.alpha,
        )
        .map_err(runtime)?;
        above &= est.mean >= exact - 3.0 * est.half_width;
        w.row(&[num(eta), num(exact), num(est.mean), num(est.half_width)]).map_err(io)?;
    }
    check(w, "mean_R >= R_star", above)
}

fn borel<W: Write>(cfg: &RunConfig, w: &mut CsvWriter<W>) -> Result<(), CliError> {
    w.row(&["N", "r_star", "ratio"]).map_err(io)?;
    let mut last = None;
    for &n in &cfg.ns {
        let r = borel_radius(n).map_err(runtime)?;
        let ratio = borel_ratio(n).map_err(runtime)?;
        last = Some(ratio);
        w.row(&[n.to_string(), num(r), num(ratio)]).map_err(io)?;
    }
    let lim = borel_limit();
    w.comment(&format!("limit = {}", num(lim))).map_err(io)?;
    if let Some(ratio) = last {
        w.comment(&format!("final_abs_error = {}", num((ratio - lim).abs()))).map_err(io)?;
    }
    Ok(())
}

fn sample<W: Write>(cfg: &RunConfig, w: &mut CsvWriter<W>) -> Result<(), CliError> {
    let n = cfg.n;
    let sampler = SpectrumSampler::new(cfg.measure.clone(), n).map_err(runtime)?;
    let mut header: Vec<String> = (0..n).map(|i| format!("lambda_{i}")).collect();
    if cfg.states {
        for i in 0..n {
            for j in 0..n {
                header.push(format!("re_{i}_{j}"));
                header.push(format!("im_{i}_{j}"));
            }
        }
    }
    w.row(&header).map_err(io)?;
    let mut rng = chunk_rng(cfg.seed, 0);
    for _ in 0..cfg.samples {
        let p = sampler.sample(&mut rng).map_err(runtime)?;
        let mut cells: Vec<String> = p.lambdas.iter().map(|&x| num(x)).collect();
        if cfg.states {
            let u = haar_unitary(n, &mut rng).map_err(runtime)?;
            let rho = compose_state(&u, &p.lambdas, cfg.dims).map_err(runtime)?;
            for z in rho.matrix().entries() {
                cells.push(num(z.re));
                cells.push(num(z.im));
            }
        }
        w.row(&cells).map_err(io)?;
    }
    Ok(())
}

fn check<W: Write>(w: &mut CsvWriter<W>, what: &str, ok: bool) -> Result<(), CliError> {
    if !ok {
        eprintln!("warning: check failed: {what}");
    }
    w.comment(&format!("check {what} = {}", if ok { "pass" } else { "fail" })).map_err(io)
}
