//! Subcommand arguments and handlers.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use num_rational::BigRational;
use serde_json::{json, Value};

use sst_core::exact::{catalan_moments, rpm_mean, rpm_moments, Centering, MomentTable, Model};
use sst_core::hadamard::{
    hadamard_power_coeffs, hadamard_power_expansion, hadamard_series, verify_expansion, SeriesWindow,
};
use sst_core::indicial::{identity_residuals, psi_roots};
use sst_core::limit::catalan::shape_ck0;
use sst_core::limit::{
    bst_shape_constants, catalan_ck, catalan_shape_constants, clt_moments, mk_moments, rpm_clt_constants,
    sigma2_alpha, y_beta_moments, LimitMomentSeq,
};
use sst_core::montecarlo::{empirical_report, simulate};
use sst_core::num::complex::Cx;
use sst_core::num::{Field, Mpf};
use sst_core::toll::{TollFamily, TollSpec};
use sst_core::transfer::{att_predict, ett_extract, ett_imaginary_residual, TollClass};
use sst_core::verify::{verify_suite_with, Suite, VerifyOptions};

use crate::config::RunConfig;
use crate::output::{emit, provenance, Envelope, Table};
use crate::{CliError, Command};

#[derive(Args, Debug)]
pub struct RootsArgs {
    #[arg(long)]
    pub m: usize,
    /// Include partial-fraction identity residuals.
    #[arg(long)]
    pub identities: bool,
}

#[derive(Args, Debug, Clone)]
pub struct TollArgs {
    #[arg(long)]
    pub m: usize,
    /// constant[:C], power:A, log, logbinomial or explicit:PATH.
    #[arg(long, default_value = "log")]
    pub toll: String,
    /// Comma-separated initial values for sizes below m - 1.
    #[arg(long)]
    pub initial: Option<String>,
}

impl TollArgs {
    fn spec(&self) -> Result<TollSpec, CliError> {
        let family: TollFamily = self.toll.parse()?;
        Ok(match &self.initial {
            Some(s) => TollSpec::with_initial(self.m, family, parse_list(s)?)?,
            None => TollSpec::new(self.m, family)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelArg {
    Rpm,
    Catalan,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[command(flatten)]
    pub toll: TollArgs,
    #[arg(long, default_value_t = 2)]
    pub kmax: usize,
    #[arg(long)]
    pub nmax: usize,
    /// none, mean, or linear:C (subtract C (n + 1)).
    #[arg(long, default_value = "none")]
    pub center: String,
    /// Exact rational arithmetic (rational tolls only).
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[command(flatten)]
    pub toll: TollArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub samples: usize,
    /// key=value file of targets (mean, variance, m1..m4).
    #[arg(long)]
    pub targets: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TransferMode {
    Ett,
    Att,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ClassArg {
    Auto,
    Small,
    Linear,
    Power,
    Sublinear,
    LinearLog,
}

#[derive(Args, Debug)]
pub struct TransferArgs {
    #[command(flatten)]
    pub toll: TollArgs,
    #[arg(long, value_enum)]
    pub mode: TransferMode,
    #[arg(long)]
    pub nmax: usize,
    #[arg(long, value_enum, default_value = "auto")]
    pub class: ClassArg,
    /// Log power q of a toll n (ln n)^q.
    #[arg(long, default_value_t = 0)]
    pub q: u32,
}

#[derive(Args, Debug)]
pub struct HadamardArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    /// Connection terms per family.
    #[arg(long, default_value_t = 2)]
    pub terms: usize,
    /// Compare with exact coefficients up to this index.
    #[arg(long)]
    pub verify: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum LawArg {
    Ck,
    Gk,
    Mk,
    Shape,
    Clt,
}

#[derive(Args, Debug)]
pub struct LimitArgs {
    #[arg(long, value_enum)]
    pub law: LawArg,
    /// Comma-separated key=value pairs, e.g. alpha=0.5 or m=2,beta=2 or m=3,toll=log.
    #[arg(long, default_value = "")]
    pub params: String,
    #[arg(long, default_value_t = 4)]
    pub kmax: usize,
}

#[derive(Args, Debug)]
pub struct ConstantsArgs {
    /// k2, v, c0 or sigma2:ALPHA.
    #[arg(long)]
    pub which: String,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    pub suite: SuiteArg,
    /// Relative perturbation of one psi' value (sensitivity check).
    #[arg(long)]
    pub fault_psi_prime: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SuiteArg {
    Quick,
    Full,
}

fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("'{x}': {e}")))
        })
        .collect()
}

fn parse_params(s: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("parameter '{part}' is not key=value")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn param_f64(map: &BTreeMap<String, String>, key: &str) -> Result<f64, CliError> {
    map.get(key)
        .ok_or_else(|| CliError::Usage(format!("missing parameter '{key}'")))?
        .parse::<f64>()
        .map_err(|e| CliError::Usage(format!("parameter '{key}': {e}")))
}

fn param_usize(map: &BTreeMap<String, String>, key: &str) -> Result<usize, CliError> {
    map.get(key)
        .ok_or_else(|| CliError::Usage(format!("missing parameter '{key}'")))?
        .parse::<usize>()
        .map_err(|e| CliError::Usage(format!("parameter '{key}': {e}")))
}

fn spec_json(spec: &TollSpec) -> Value {
    json!({"m": spec.m, "toll": spec.family.to_string(), "initial": spec.initial})
}

fn envelope(command: &str, params: Value, values: Value, bounds: Value, cfg: &RunConfig, method: &str) -> Envelope {
    Envelope {
        command: command.into(),
        params,
        values,
        bounds,
        provenance: provenance(cfg, method),
    }
}

pub fn dispatch(cmd: Command, cfg: RunConfig) -> Result<(), CliError> {
    match cmd {
        Command::Roots(a) => roots(a, &cfg),
        Command::Moments(a) => moments(a, &cfg),
        Command::Simulate(a) => simulate_cmd(a, cfg),
        Command::Transfer(a) => transfer(a, &cfg),
        Command::Hadamard(a) => hadamard(a, &cfg),
        Command::Limit(a) => limit(a, &cfg),
        Command::Constants(a) => constants(a, &cfg),
        Command::Verify(a) => verify(a, &cfg),
    }
}

fn cx_json(z: &Cx<Mpf>) -> Value {
    let (re, im) = z.to_f64();
    json!({"re": re, "im": im})
}

fn roots(a: RootsArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let d = psi_roots(a.m)?;
    let mut values = json!({
        "roots": d.roots.iter().map(cx_json).collect::<Vec<_>>(),
        "psi_prime": d.psi_prime.iter().map(cx_json).collect::<Vec<_>>(),
        "alpha": d.alpha,
        "near_ties": d.near_ties,
    });
    let mut bounds = json!({"root_residual": d.max_residual});
    if a.identities {
        let rep = identity_residuals(&d, &Cx::from_f64(0.3, 0.2));
        values["identities"] = serde_json::to_value(&rep.entries).map_err(|e| CliError::Io(e.to_string()))?;
        values["skipped_identities"] = json!(rep.skipped);
        bounds["identity_residual"] = json!(rep.max_residual);
    }
    let mut t = Table::new(&["index", "re", "im", "psi_prime_re", "psi_prime_im"]);
    for (i, (r, p)) in d.roots.iter().zip(&d.psi_prime).enumerate() {
        let (rr, ri) = r.to_f64();
        let (pr, pi) = p.to_f64();
        t.push(vec![i.to_string(), rr.to_string(), ri.to_string(), pr.to_string(), pi.to_string()]);
    }
    let env = envelope(
        "roots",
        json!({"m": a.m, "identities": a.identities}),
        values,
        bounds,
        cfg,
        "Aberth iteration on the indicial polynomial",
    );
    emit(&env, Some(t), cfg)
}

fn centering<F: Field>(s: &str) -> Result<Centering<F>, CliError> {
    match s {
        "none" => Ok(Centering::None),
        "mean" => Ok(Centering::Mean),
        _ => match s.split_once(':') {
            Some(("linear", c)) => Ok(Centering::Linear(F::from_f64(
                c.parse::<f64>().map_err(|e| CliError::Usage(format!("centering: {e}")))?,
            ))),
            _ => Err(CliError::Usage(format!("unknown centering '{s}' (none|mean|linear:C)"))),
        },
    }
}

fn moment_table<F: sst_core::toll::TollScalar>(
    model: ModelArg,
    spec: &TollSpec,
    k: usize,
    n: usize,
    center: &str,
) -> Result<MomentTable<F>, CliError> {
    let c = centering::<F>(center)?;
    Ok(match model {
        ModelArg::Rpm => rpm_moments::<F>(spec, k, n, c)?,
        ModelArg::Catalan => catalan_moments::<F>(spec, k, n, c)?,
    })
}

fn moments(a: MomentsArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let spec = a.toll.spec()?;
    let mut t = Table::new(&["n", "k", "value"]);
    let rows: Vec<Vec<Value>> = if a.exact {
        let table = moment_table::<BigRational>(a.model, &spec, a.kmax, a.nmax, &a.center)?;
        table.values[1..]
            .iter()
            .map(|row| row.iter().map(|v| json!(v.to_string())).collect())
            .collect()
    } else {
        let table = moment_table::<f64>(a.model, &spec, a.kmax, a.nmax, &a.center)?;
        table.values[1..]
            .iter()
            .map(|row| row.iter().map(|v| json!(v)).collect())
            .collect()
    };
    for n in 0..=a.nmax {
        for (k, row) in rows.iter().enumerate() {
            let v = match &row[n] {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            t.push(vec![n.to_string(), (k + 1).to_string(), v]);
        }
    }
    let env = envelope(
        "moments",
        json!({
            "model": format!("{:?}", a.model).to_lowercase(),
            "spec": spec_json(&spec),
            "kmax": a.kmax,
            "nmax": a.nmax,
            "center": a.center,
            "exact": a.exact,
        }),
        json!({"moments": rows}),
        json!({}),
        cfg,
        if a.exact { "exact rational recurrence" } else { "floating-point recurrence" },
    );
    emit(&env, Some(t), cfg)
}

fn model_of(arg: ModelArg, m: usize) -> Model {
    match arg {
        ModelArg::Rpm => Model::Rpm { m },
        ModelArg::Catalan => Model::Catalan,
    }
}

fn simulate_cmd(a: SimulateArgs, mut cfg: RunConfig) -> Result<(), CliError> {
    let spec = a.toll.spec()?;
    let seed = match cfg.seed {
        Some(s) => s,
        None => {
            let s = rand::random::<u64>();
            eprintln!("seed: {s}");
            cfg.seed = Some(s);
            s
        }
    };
    let targets: Vec<(String, f64)> = match &a.targets {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            crate::config::parse_file(&text)?
                .into_iter()
                .map(|(k, v)| {
                    v.parse::<f64>()
                        .map(|x| (k.clone(), x))
                        .map_err(|e| CliError::Usage(format!("target '{k}': {e}")))
                })
                .collect::<Result<_, _>>()?
        }
        None => Vec::new(),
    };
    let model = model_of(a.model, spec.m);
    let samples = simulate(model, &spec, a.n, a.samples, seed, cfg.workers)?;
    let name = format!("{:?}", a.model).to_lowercase();
    let rep = empirical_report(&samples, a.n, &name, Some(&spec), Some(seed), &targets)?;
    let values = serde_json::to_value(&rep).map_err(|e| CliError::Io(e.to_string()))?;
    let bounds = json!({
        "mean_se": rep.mean.se,
        "variance_se": rep.variance.se,
        "moment_se": rep.moments.iter().map(|m| m.se).collect::<Vec<_>>(),
    });
    let env = envelope(
        "simulate",
        json!({"model": name, "spec": spec_json(&spec), "n": a.n, "samples": a.samples, "workers": cfg.workers}),
        values,
        bounds,
        &cfg,
        "size-splitting sampler, batch-means standard errors",
    );
    emit(&env, None, &cfg)
}

fn auto_class(spec: &TollSpec, class: ClassArg, q: u32) -> Result<TollClass, CliError> {
    let linear_remainder = || -> Result<TollClass, CliError> {
        let init: Vec<f64> = spec.initial.iter().enumerate().map(|(j, b)| b - (j as f64 + 1.0)).collect();
        let rem = TollSpec::with_initial(spec.m, TollFamily::Constant(-1.0), init)?;
        Ok(TollClass::LinearPlusSmall { k2: 1.0, remainder: rem })
    };
    let power = |v: f64| TollClass::Power { m: spec.m, k4: 1.0, v, log_power: 0 };
    Ok(match class {
        ClassArg::Small => TollClass::Small(spec.clone()),
        ClassArg::Sublinear => TollClass::SublinearPower(spec.clone()),
        ClassArg::LinearLog => TollClass::LinearLog { m: spec.m, q },
        ClassArg::Linear => match spec.family {
            TollFamily::Power(a) if a == 1.0 => linear_remainder()?,
            _ => return Err(CliError::Usage("the linear class needs the toll power:1".into())),
        },
        ClassArg::Power => match spec.family {
            TollFamily::Power(a) => power(a),
            _ => return Err(CliError::Usage("the power class needs a power toll".into())),
        },
        ClassArg::Auto => match spec.family {
            TollFamily::Power(a) if a > 1.0 => power(a),
            TollFamily::Power(a) if a == 1.0 => linear_remainder()?,
            TollFamily::Power(a) if a >= 0.5 => TollClass::SublinearPower(spec.clone()),
            _ => TollClass::Small(spec.clone()),
        },
    })
}

fn transfer(a: TransferArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let spec = a.toll.spec()?;
    let params = json!({
        "spec": spec_json(&spec),
        "mode": format!("{:?}", a.mode).to_lowercase(),
        "nmax": a.nmax,
    });
    match a.mode {
        TransferMode::Ett => {
            let e = ett_extract(&spec, a.nmax)?;
            let imag = ett_imaginary_residual(&spec, a.nmax)?;
            let seq: Vec<f64> = e.iter().map(Field::to_f64).collect();
            let mut t = Table::new(&["n", "mean"]);
            for (n, v) in seq.iter().enumerate() {
                t.push(vec![n.to_string(), v.to_string()]);
            }
            let env = envelope(
                "transfer",
                params,
                json!({"means": seq}),
                json!({"imaginary_residual": imag}),
                cfg,
                "exact transfer through the indicial roots",
            );
            emit(&env, Some(t), cfg)
        }
        TransferMode::Att => {
            let class = auto_class(&spec, a.class, a.q)?;
            let p = att_predict(&class)?;
            let exact = rpm_mean::<f64>(&spec, a.nmax).ok().map(|v| v[a.nmax]);
            let predicted = p.evaluate(a.nmax as f64);
            let values = json!({
                "regime": p.regime,
                "terms": p.terms,
                "constants": p.constants.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
                "at_n": a.nmax,
                "predicted": predicted,
                "exact": exact,
            });
            let env = envelope(
                "transfer",
                params,
                values,
                json!({"constant_bound": p.bound}),
                cfg,
                "asymptotic transfer",
            );
            emit(&env, None, cfg)
        }
    }
}

fn hadamard(a: HadamardArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let (lam, mu) = hadamard_power_coeffs(a.alpha, a.beta, a.terms)?;
    let e = hadamard_power_expansion(a.alpha, a.beta, a.terms)?;
    let mut values = json!({"lambda": lam, "mu": mu, "expansion": e});
    let mut bounds = json!({"remainder_exponent": e.remainder.a});
    if let Some(n) = a.verify {
        let f = SeriesWindow::power(&Mpf::from_f64(a.alpha), n);
        let g = SeriesWindow::power(&Mpf::from_f64(a.beta), n);
        let fg = hadamard_series(&f, &g);
        let grid: Vec<usize> = [16usize, 8, 4, 2, 1].iter().map(|d| n / d).filter(|&k| k > 0).collect();
        let rep = verify_expansion(&e, &fg, &grid)?;
        bounds["decay_slope"] = json!(rep.slope);
        values["decay"] = serde_json::to_value(&rep).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let mut t = Table::new(&["k", "lambda", "mu"]);
    for (k, (l, m)) in lam.iter().zip(&mu).enumerate() {
        t.push(vec![k.to_string(), l.to_string(), m.to_string()]);
    }
    let env = envelope(
        "hadamard",
        json!({"alpha": a.alpha, "beta": a.beta, "terms": a.terms, "verify": a.verify}),
        values,
        bounds,
        cfg,
        "connection formula of the Hadamard product",
    );
    emit(&env, Some(t), cfg)
}

fn limit_table(seq: &LimitMomentSeq) -> Table {
    let mut t = Table::new(&["k", "value", "constant"]);
    for (k, v) in seq.values.iter().enumerate() {
        let c = seq.constants.get(k).copied().unwrap_or(0.0);
        t.push(vec![k.to_string(), v.to_string(), c.to_string()]);
    }
    t
}

fn limit(a: LimitArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let p = parse_params(&a.params)?;
    let (seq, method) = match a.law {
        LawArg::Ck => (catalan_ck(param_f64(&p, "alpha")?, a.kmax)?, "Catalan moment recurrence"),
        LawArg::Gk => (
            y_beta_moments(param_usize(&p, "m")?, param_f64(&p, "beta")?, a.kmax)?,
            "fixed-point moment recurrence",
        ),
        LawArg::Mk => (mk_moments(param_f64(&p, "alpha")?, a.kmax, cfg.tol)?, "tanh-sinh quadrature"),
        LawArg::Shape => (shape_ck0(a.kmax)?, "shape moment recurrence"),
        LawArg::Clt => {
            let m = param_usize(&p, "m")?;
            let family: TollFamily = p.get("toll").map(String::as_str).unwrap_or("log").parse()?;
            let spec = TollSpec::new(m, family)?;
            let n = cfg.terms.unwrap_or(1 << 14);
            (clt_moments(&spec, n, a.kmax)?, "normal limit constants")
        }
    };
    let values = json!({
        "kind": seq.kind.to_string(),
        "moments": seq.values,
        "constants": seq.constants,
        "variance": if seq.values.len() > 2 { Some(seq.variance()) } else { None },
        "hankel_min_pivot": seq.hankel_min_pivot(a.kmax / 2 + 1),
    });
    let bounds = json!({"quadrature_error": seq.quadrature_error, "residual": seq.residual});
    let env = envelope(
        "limit",
        json!({"law": seq.kind.to_string(), "params": p, "kmax": a.kmax, "tol": cfg.tol}),
        values,
        bounds,
        cfg,
        method,
    );
    emit(&env, Some(limit_table(&seq)), cfg)
}

fn constants(a: ConstantsArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let (value, tail, extra, method) = match a.which.as_str() {
        "k2" | "v" => {
            let c = bst_shape_constants(cfg.terms.unwrap_or(sst_core::limit::bst::DEFAULT_V_TERMS))?;
            let extra = serde_json::to_value(&c).map_err(|e| CliError::Io(e.to_string()))?;
            if a.which == "k2" {
                (c.k2, Some(c.k2_bound), extra, "weighted toll sum with Euler-Maclaurin tail")
            } else {
                (c.v, Some(c.v_bound), extra, "FFT self-convolution with asymptotic tail")
            }
        }
        "c0" => {
            let c = catalan_shape_constants(cfg.terms.unwrap_or(20_000) as u64)?;
            let extra = serde_json::to_value(&c).map_err(|e| CliError::Io(e.to_string()))?;
            (c.c0, Some(c.c0_bound), extra, "multiple-precision sum with asymptotic tail")
        }
        other => match other.split_once(':') {
            Some(("sigma2", s)) => {
                let alpha = s
                    .parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("sigma2 alpha: {e}")))?;
                (sigma2_alpha(alpha)?, None, json!({"alpha": alpha}), "closed form")
            }
            Some(("clt", m)) => {
                let m = m.parse::<usize>().map_err(|e| CliError::Usage(format!("clt m: {e}")))?;
                let c = rpm_clt_constants(&TollSpec::new(m, TollFamily::Log)?, cfg.terms.unwrap_or(1 << 14))?;
                let extra = serde_json::to_value(&c).map_err(|e| CliError::Io(e.to_string()))?;
                (c.sigma2, Some(c.tail_bound), extra, "normal limit constants for the ln n toll")
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown constant '{other}' (k2|v|c0|sigma2:ALPHA|clt:M)"
                )))
            }
        },
    };
    let env = envelope(
        "constants",
        json!({"which": a.which}),
        json!({"value": value, "details": extra}),
        json!({"tail_bound": tail}),
        cfg,
        method,
    );
    emit(&env, None, cfg)
}

fn verify(a: VerifyArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let suite = match a.suite {
        SuiteArg::Quick => Suite::Quick,
        SuiteArg::Full => Suite::Full,
    };
    let opts = VerifyOptions {
        suite,
        seed: cfg.seed.unwrap_or(sst_core::verify::DEFAULT_SEED),
        workers: cfg.workers,
        psi_prime_fault: a.fault_psi_prime,
    };
    let report = verify_suite_with(&opts, |c| eprintln!("{}", c.render()));
    let mut t = Table::new(&["criterion", "status", "check", "value", "lo", "hi", "pass"]);
    for c in &report.criteria {
        let status = if c.skipped.is_some() {
            "skip"
        } else if c.pass {
            "pass"
        } else if c.expected_failure {
            "known-unattainable"
        } else {
            "fail"
        };
        for k in &c.checks {
            t.push(vec![
                c.id.to_string(),
                status.into(),
                k.label.clone(),
                k.value.to_string(),
                k.lo.to_string(),
                k.hi.to_string(),
                k.pass.to_string(),
            ]);
        }
    }
    let values = serde_json::to_value(&report).map_err(|e| CliError::Io(e.to_string()))?;
    let env = envelope(
        "verify",
        json!({"suite": suite, "seed": opts.seed, "workers": opts.workers, "fault_psi_prime": a.fault_psi_prime}),
        values,
        json!({}),
        cfg,
        "cross-validation matrix",
    );
    emit(&env, Some(t), cfg)?;
    if report.pass {
        Ok(())
    } else {
        let failed: Vec<String> = report
            .criteria
            .iter()
            .filter(|c| !c.pass && !c.expected_failure && c.skipped.is_none())
            .map(|c| c.id.to_string())
            .collect();
        Err(CliError::Verification(format!("criteria {}", failed.join(", "))))
    }
}
