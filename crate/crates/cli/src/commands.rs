//! One function per subcommand.

use std::fmt::Display;
use std::str::FromStr;

use anyhow::anyhow;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use qcdual::bethe::{gaudin_eigs, solve_bethe, BetheSystem, SolveOptions, SolveReport};
use qcdual::factorize::{factorization_residual, factorized_lax};
use qcdual::identities::{
    a_type_spectrum, certify, onshell_nilpotency, CertificateInputs, Mode, Verdict,
};
use qcdual::lax::{evolve as integrate, integrals_of_motion, lax_pair, PhasePoint};
use qcdual::matrix::spectrum_distance;
use qcdual::model::{
    parse_complex, preset_couplings, to_pair, validate_couplings, Couplings, ModelSpec, RootSystem,
};
use qcdual::quantum::{
    commutator_residual, diagonalize_joint, gaudin_hamiltonians_b, gaudin_hamiltonians_boundary,
};
use qcdual::sampling::RationalSampler;
use qcdual::scalar::FLOAT_RTOL;
use qcdual::suite::{run_all, SuiteOptions};
use qcdual::{Error, Exact, Scalar};
use rayon::prelude::*;
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{Entry, Outcome};

pub enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

type Run = std::result::Result<Outcome, Failure>;

fn config_err(e: impl Display) -> Failure {
    Failure::Config(anyhow!("{e}"))
}

fn runtime(e: impl Display) -> Failure {
    Failure::Runtime(anyhow!("{e}"))
}

fn entries(entries: Vec<Entry>) -> Run {
    Ok(Outcome { entries, csv: None })
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().copied().map(to_pair).collect()
}

fn system(kind: RootSystem, xi: f64, omega: f64) -> BetheSystem<Complex64> {
    match kind {
        RootSystem::A => BetheSystem::ATwisted {
            omega: Complex64::new(omega, 0.0),
        },
        RootSystem::B => BetheSystem::BoundaryB,
        RootSystem::C => BetheSystem::BoundaryC {
            xi: Complex64::new(xi, 0.0),
        },
        RootSystem::D => BetheSystem::BoundaryC {
            xi: Complex64::new(0.0, 0.0),
        },
    }
}

fn solve_options(c: &RunConfig) -> SolveOptions {
    SolveOptions {
        seed_count: c.seeds,
        rng_seed: c.rng_seed,
        tol: c.tol,
        ..Default::default()
    }
}

fn couplings(c: &RunConfig) -> Couplings<f64> {
    c.explicit_couplings()
        .unwrap_or_else(|| preset_couplings(c.kind, &c.hbar, &c.xi))
}

pub fn validate(c: &RunConfig) -> Run {
    let g = couplings(c);
    let inputs = json!({ "g1": g.g1, "g2": g.g2, "g4": g.g4 });
    let mut out = Vec::new();
    let entry = match validate_couplings(&g) {
        Ok(()) => Entry::new(
            "couplings",
            Verdict::Pass,
            format!("constraint residual {:e}", g.constraint().abs()),
        ),
        Err(e @ Error::ConstraintViolated { .. }) => Entry::new(
            "couplings",
            Verdict::Fail,
            format!("ConstraintViolated: {e}"),
        ),
        Err(e) => Entry::new("couplings", Verdict::Fail, e.to_string()),
    };
    out.push(entry.with_inputs(inputs.clone()));
    let shape = match c.kind {
        RootSystem::C if g.g1 != 0.0 => Some("C-type requires g1 = 0"),
        RootSystem::D if g.g1 != 0.0 || g.g4 != 0.0 => Some("D-type requires g1 = g4 = 0"),
        _ => None,
    };
    if let Some(msg) = shape {
        out.push(Entry::new("kind", Verdict::Fail, msg).with_inputs(inputs));
    }
    if c.z.is_some() {
        out.push(match c.model() {
            Ok(spec) => Entry::new(
                "model",
                Verdict::Pass,
                format!("{} with N = {}, M = {}", spec.root_system, spec.n, spec.m),
            ),
            Err(e) => Entry::new("model", Verdict::Fail, format!("{e:#}")),
        });
    }
    entries(out)
}

struct Solved {
    spec: ModelSpec,
    z: Vec<Complex64>,
    sys: BetheSystem<Complex64>,
    report: Option<SolveReport>,
    solver_entry: Entry,
}

fn solve(c: &RunConfig) -> Result<Solved, Failure> {
    let spec = c.model().map_err(Failure::Config)?;
    let z = spec.z();
    let sys = system(spec.root_system, spec.xi, spec.omega);
    let hbar = Complex64::new(spec.hbar, 0.0);
    let (report, solver_entry) = match solve_bethe(&sys, &z, spec.m, hbar, &solve_options(c)) {
        Ok(r) => {
            let regular = r.regular_states().count();
            let detail = format!(
                "{regular} regular of {} states from {} seeds ({} diverged, {} stalled), tolerance {:e}",
                r.states.len(),
                r.attempts,
                r.diverged,
                r.stalled,
                r.tolerance
            );
            let verdict = Verdict::from_bool(regular > 0);
            (Some(r), Entry::new("solver", verdict, detail))
        }
        Err(e @ Error::NoSolutionsFound { .. }) => {
            (None, Entry::new("solver", Verdict::Fail, e.to_string()))
        }
        Err(e) => return Err(runtime(e)),
    };
    Ok(Solved {
        spec,
        z,
        sys,
        report,
        solver_entry,
    })
}

pub fn bethe(c: &RunConfig) -> Run {
    let s = solve(c)?;
    let hbar = Complex64::new(s.spec.hbar, 0.0);
    let mut out = vec![s.solver_entry];
    for (i, st) in s
        .report
        .iter()
        .flat_map(|r| r.states.iter())
        .filter(|st| st.converged)
        .enumerate()
    {
        let eigs = gaudin_eigs(&s.sys, &s.z, &st.mu, &hbar).map_err(runtime)?;
        let verdict = if st.singular {
            Verdict::SkippedSingular
        } else {
            Verdict::Pass
        };
        let detail = format!(
            "residual {:e}, condition {:e}",
            st.residual_norm, st.jacobian_condition
        );
        out.push(
            Entry::new(format!("state {i}"), verdict, detail)
                .with_inputs(json!({ "mu": pairs(&st.mu) }))
                .with_data(json!({ "gaudin_eigs": pairs(&eigs), "seed_id": st.seed_id })),
        );
    }
    entries(out)
}

pub fn duality(c: &RunConfig) -> Run {
    let s = solve(c)?;
    let tol = c.tol.unwrap_or(1e-8);
    let mut out = vec![s.solver_entry];
    let states: Vec<_> = s.report.iter().flat_map(|r| r.regular_states()).collect();
    let checked: Vec<Result<Entry, Failure>> = states
        .par_iter()
        .enumerate()
        .map(|(i, st)| {
            let inputs = json!({ "mu": pairs(&st.mu) });
            let name = format!("state {i}");
            if s.spec.root_system == RootSystem::A {
                let d = a_type_spectrum(&s.z, st, s.spec.omega, s.spec.hbar).map_err(runtime)?;
                let detail = format!("spectrum deviation from (+omega, -omega) pattern {d:e}");
                Ok(Entry::new(name, Verdict::from_bool(d <= tol), detail).with_inputs(inputs))
            } else {
                let r =
                    onshell_nilpotency(s.spec.root_system, &s.z, st, s.spec.xi, s.spec.hbar, tol)
                        .map_err(runtime)?;
                let detail = format!(
                    "max |eig| {:e} in double precision, exact-refined bound {:e} relative",
                    r.float_max_eig, r.relative
                );
                let data = serde_json::to_value(&r).map_err(runtime)?;
                Ok(Entry::new(name, Verdict::from_bool(r.passed), detail)
                    .with_inputs(inputs)
                    .with_data(data))
            }
        })
        .collect();
    for e in checked {
        out.push(e?);
    }
    entries(out)
}

/// Float coefficient comparison of characteristic polynomials loses a few
/// digits to cancellation.
const FLOAT_IDENTITY_RTOL: f64 = 1e-8;

type Draw = (Vec<Exact>, Vec<Exact>, Exact, Exact);

fn parse_rational(s: &str) -> anyhow::Result<Exact> {
    let r = BigRational::from_str(s.trim()).map_err(|e| anyhow!("bad rational {s:?}: {e}"))?;
    Ok(Exact::from_base(r))
}

fn parse_exact_inputs(r: &CertificateInputs) -> anyhow::Result<Draw> {
    let list = |v: &[String]| {
        v.iter()
            .map(|s| parse_rational(s))
            .collect::<anyhow::Result<Vec<_>>>()
    };
    Ok((
        list(&r.q)?,
        list(&r.mu)?,
        parse_rational(&r.param)?,
        parse_rational(&r.hbar)?,
    ))
}

type FloatDraw = (Vec<Complex64>, Vec<Complex64>, Complex64, Complex64);

fn parse_float_inputs(r: &CertificateInputs) -> anyhow::Result<FloatDraw> {
    let one = |s: &str| parse_complex(s).map_err(|e| anyhow!("{e}"));
    let list = |v: &[String]| v.iter().map(|s| one(s)).collect::<anyhow::Result<Vec<_>>>();
    Ok((list(&r.q)?, list(&r.mu)?, one(&r.param)?, one(&r.hbar)?))
}

fn to_float(d: &Draw) -> FloatDraw {
    let f = |v: &[Exact]| v.iter().map(|x| x.to_complex()).collect::<Vec<_>>();
    (f(&d.0), f(&d.1), d.2.to_complex(), d.3.to_complex())
}

pub fn identity(c: &RunConfig) -> Run {
    let n = c.n().map_err(Failure::Config)?;
    let m = c.m().map_err(Failure::Config)?;
    if m > n {
        return Err(config_err(format!("m = {m} exceeds n = {n}")));
    }
    let mut exact_draws: Vec<Draw> = Vec::new();
    let mut float_draws: Vec<FloatDraw> = Vec::new();
    match (&c.replay, c.mode) {
        (Some(r), Mode::Rational) => {
            exact_draws.push(parse_exact_inputs(r).map_err(Failure::Config)?)
        }
        (Some(r), Mode::Float) => float_draws.push(parse_float_inputs(r).map_err(Failure::Config)?),
        (None, mode) => {
            let mut s = RationalSampler::new(c.rng_seed);
            for _ in 0..c.samples {
                let q = s.coordinates(n);
                let mu = s.parameters(m, &q);
                let d = (q, mu, s.rational(), s.rational());
                match mode {
                    Mode::Rational => exact_draws.push(d),
                    Mode::Float => float_draws.push(to_float(&d)),
                }
            }
        }
    }
    let kind = c.kind;
    let certs = if c.mode == Mode::Rational {
        exact_draws
            .par_iter()
            .map(|(q, mu, p, h)| certify(kind, q, mu, p, h))
            .collect::<Vec<_>>()
    } else {
        float_draws
            .par_iter()
            .map(|(q, mu, p, h)| certify(kind, q, mu, p, h))
            .collect::<Vec<_>>()
    };
    let tol = c.tol.unwrap_or(FLOAT_IDENTITY_RTOL);
    let mut out = Vec::new();
    for (i, cert) in certs.into_iter().enumerate() {
        let mut cert = cert.map_err(runtime)?;
        if cert.mode == Mode::Float {
            cert.verdict = Verdict::from_bool(cert.residual.holds(tol));
        }
        let detail = match cert.residual.exact_zero {
            Some(true) => "exact zero".to_string(),
            _ => format!(
                "residual {:e} (relative {:e})",
                cert.residual.max_abs,
                cert.residual.relative()
            ),
        };
        let inputs = serde_json::to_value(&cert.inputs).map_err(runtime)?;
        let data = serde_json::to_value(&cert).map_err(runtime)?;
        out.push(
            Entry::new(format!("draw {i}"), cert.verdict, detail)
                .with_inputs(inputs)
                .with_data(data),
        );
    }
    entries(out)
}

pub fn factorization(c: &RunConfig) -> Run {
    if c.kind == RootSystem::A {
        return Err(config_err("factorization is defined for B, C and D"));
    }
    let n = c.n().map_err(Failure::Config)?;
    let tol = c.tol.unwrap_or(FLOAT_RTOL);
    let grid = [(0, 1), (1, 2), (1, 1)];
    let mut s = RationalSampler::new(c.rng_seed);
    let mut draws = Vec::new();
    for i in 0..c.samples {
        let q = s.coordinates(n);
        let hbar = s.rational();
        let (a, b) = grid[i % grid.len()];
        let xi = if c.kind == RootSystem::C {
            Exact::from_base(BigRational::new(BigInt::from(a), BigInt::from(b)))
        } else {
            Exact::from_int(0)
        };
        draws.push((q, xi, hbar));
    }
    let kind = c.kind;
    let results: Vec<Result<Entry, Failure>> = draws
        .par_iter()
        .enumerate()
        .map(|(i, (q, xi, hbar))| {
            let inputs = json!({
                "q": q.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "xi": xi.to_string(),
                "hbar": hbar.to_string(),
            });
            let (ok, detail) = match c.mode {
                Mode::Rational => {
                    let r = factorization_residual(q, kind, xi, hbar).map_err(runtime)?;
                    let cp = factorized_lax(q, kind, xi, hbar)
                        .map_err(runtime)?
                        .char_poly();
                    let size = kind.lax_size(n);
                    let lead = if kind == RootSystem::B {
                        -Exact::from_int(1)
                    } else {
                        Exact::from_int(1)
                    };
                    let pure = cp.coeff(size) == lead
                        && (0..size).all(|k| cp.coeff(k) == Exact::from_int(0));
                    let ok = r.holds(0.0) && pure;
                    (
                        ok,
                        format!("exact zero: {}, pure power char poly: {pure}", r.holds(0.0)),
                    )
                }
                Mode::Float => {
                    let f = |x: &Exact| x.to_complex();
                    let qf: Vec<Complex64> = q.iter().map(f).collect();
                    let r = factorization_residual(&qf, kind, &f(xi), &f(hbar)).map_err(runtime)?;
                    (
                        r.holds(tol),
                        format!("relative residual {:e}", r.relative()),
                    )
                }
            };
            Ok(Entry::new(format!("draw {i}"), Verdict::from_bool(ok), detail).with_inputs(inputs))
        })
        .collect();
    let out = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    entries(out)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn quantum_oracle(c: &RunConfig) -> Run {
    let spec = c.model().map_err(Failure::Config)?;
    let tol = c.tol.unwrap_or(1e-8);
    let z = spec.z();
    let hbar = Complex64::new(spec.hbar, 0.0);
    let xi = Complex64::new(spec.xi, 0.0);
    let hams = match spec.root_system {
        RootSystem::A => return Err(config_err("the spin-chain oracle covers B, C and D")),
        RootSystem::B => gaudin_hamiltonians_b(&z, &hbar),
        _ => gaudin_hamiltonians_boundary(&z, &xi, &hbar),
    }
    .map_err(config_err)?;
    let mut out = Vec::new();
    let comm = commutator_residual(&hams);
    out.push(Entry::new(
        "commutators",
        Verdict::from_bool(comm <= 1e-12),
        format!("relative norm {comm:e}"),
    ));
    let js = diagonalize_joint(&hams, c.rng_seed).map_err(runtime)?;
    let sites = hams[0].sites;
    let dims: Vec<usize> = (0..=sites).map(|m| js.sector_dimension(m)).collect();
    let dims_ok = dims
        .iter()
        .enumerate()
        .all(|(m, &d)| d == binomial(sites, m));
    out.push(Entry::new(
        "sector dimensions",
        Verdict::from_bool(dims_ok),
        format!("{dims:?} over {sites} sites"),
    ));
    let sys = system(spec.root_system, spec.xi, spec.omega);
    for m in 0..=spec.m {
        let rep = match solve_bethe(&sys, &z, m, hbar, &solve_options(c)) {
            Ok(r) => r,
            Err(e @ Error::NoSolutionsFound { .. }) => {
                out.push(Entry::new(format!("M={m}"), Verdict::Fail, e.to_string()));
                continue;
            }
            Err(e) => return Err(runtime(e)),
        };
        for (i, st) in rep.regular_states().enumerate() {
            let tuple = gaudin_eigs(&sys, &z, &st.mu, &hbar).map_err(runtime)?;
            let scale = tuple.iter().map(|x| x.norm()).fold(1.0, f64::max);
            let d = js.distance(m, &tuple) / scale;
            out.push(
                Entry::new(
                    format!("M={m} state {i}"),
                    Verdict::from_bool(d <= tol),
                    format!("relative distance {d:e}"),
                )
                .with_inputs(json!({ "mu": pairs(&st.mu) })),
            );
        }
    }
    Ok(Outcome {
        entries: out,
        csv: Some(js.to_csv()),
    })
}

pub fn evolve(c: &RunConfig) -> Run {
    let spec = c.model().map_err(Failure::Config)?;
    let z = spec.z();
    if z.iter().any(|x| x.im != 0.0) {
        return Err(config_err("evolve needs real coordinates"));
    }
    let q: Vec<f64> = z.iter().map(|x| x.re).collect();
    let p = c.p.clone().unwrap_or_else(|| vec![0.0; q.len()]);
    let g = couplings(c);
    validate_couplings(&g).map_err(config_err)?;
    let kind = spec.root_system;
    let start = PhasePoint::new(q, p).map_err(config_err)?;
    let traj = integrate(&start, &g, kind, c.dt, c.steps).map_err(runtime)?;
    let l0 = lax_pair(&start, &g, kind).map_err(runtime)?.l;
    let l1 = lax_pair(traj.last(), &g, kind).map_err(runtime)?.l;
    let i0 = integrals_of_motion(&l0, 4, kind);
    let i1 = integrals_of_motion(&l1, 4, kind);
    let drift = i0
        .iter()
        .zip(&i1)
        .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max);
    let tol = c.tol.unwrap_or(1e-8);
    let spread = spectrum_distance(
        &l0.eigenvalues().map_err(runtime)?,
        &l1.eigenvalues().map_err(runtime)?,
    );
    let end = traj.last();
    let out = vec![
        Entry::new(
            "conservation",
            Verdict::from_bool(drift <= tol),
            format!("largest relative drift of tr L^k, k <= 4: {drift:e}"),
        )
        .with_data(json!({ "initial": i0, "final": i1 })),
        Entry::new(
            "isospectrality",
            Verdict::from_bool(spread <= tol.max(1e-8)),
            format!("spectrum moved by {spread:e}"),
        )
        .with_data(json!({ "final_q": end.q, "final_p": end.p })),
    ];
    Ok(Outcome {
        entries: out,
        csv: Some(traj.to_csv()),
    })
}

pub fn all(c: &RunConfig) -> Run {
    let opts = SuiteOptions {
        rng_seed: c.rng_seed,
        bethe_seeds: c.seeds,
    };
    let out = run_all(&opts)
        .into_iter()
        .map(|o| {
            let e = Entry::new(
                format!("criterion {}: {}", o.id, o.title),
                Verdict::from_bool(o.passed),
                o.detail,
            );
            e.with_data(json!({ "budget_s": o.budget_s }))
        })
        .collect();
    entries(out)
}
