//! Thin command-line front end over the library.
//!
//! Exit codes: 0 success, 1 acceptance-check failure, 2 configuration error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ell1reg::experiment::{derive_record_seed, CounterRng};
use ell1reg::{
    fit_rate_exponent, load_scenario, phi_envelope_check, records_to_csv, run_rate_experiment,
    sup_bruteforce, sup_closed_form, verify_variational_inequality, Error, OperatorSpec,
    RateModel, RecordStatus, Result, SolutionModel, TailBound, TruncatedSequence,
};

#[derive(Parser)]
#[command(name = "ell1reg", version, about = "l1-regularization rate experiments on sequence-space operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OperatorArgs {
    /// Operator family: cesaro | diagonal | embedding
    operator: String,
    /// Decay exponent of the diagonal operator (sigma_k = k^-zeta)
    #[arg(long)]
    zeta: Option<f64>,
    /// Image norm exponent of the embedding ("inf" for the sup norm)
    #[arg(long)]
    q: Option<String>,
}

impl OperatorArgs {
    fn build(&self, n: usize) -> Result<OperatorSpec> {
        match self.operator.as_str() {
            "cesaro" => OperatorSpec::cesaro(n),
            "diagonal" => OperatorSpec::diagonal_power(
                self.zeta
                    .ok_or_else(|| Error::Config("diagonal operator needs --zeta".into()))?,
                n,
            ),
            "embedding" => {
                let q = match self.q.as_deref() {
                    None => 2.0,
                    Some("inf") => f64::INFINITY,
                    Some(s) => s
                        .parse()
                        .map_err(|_| Error::Config(format!("cannot parse q from '{s}'")))?,
                };
                OperatorSpec::embedding(q, n)
            }
            other => Err(Error::Config(format!(
                "unknown operator '{other}' (expected cesaro, diagonal or embedding)"
            ))),
        }
    }
}

#[derive(Args, Clone)]
struct SolutionArgs {
    /// Solution model: holder | exponential | sparse
    #[arg(long, default_value = "holder")]
    solution: String,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Sparse support as index:value pairs, e.g. "1:2.0,4:-1.0"
    #[arg(long)]
    support: Option<String>,
}

impl SolutionArgs {
    fn build(&self) -> Result<SolutionModel> {
        match self.solution.as_str() {
            "holder" => SolutionModel::holder(self.mu, self.c),
            "exponential" => SolutionModel::exponential(self.gamma, self.c),
            "sparse" => {
                let text = self
                    .support
                    .as_deref()
                    .ok_or_else(|| Error::Config("sparse solution needs --support".into()))?;
                let mut support = BTreeMap::new();
                for pair in text.split(',') {
                    let (k, v) = pair
                        .split_once(':')
                        .ok_or_else(|| Error::Config(format!("bad support entry '{pair}'")))?;
                    let idx: usize = k
                        .trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad support index '{k}'")))?;
                    let val: f64 = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad support value '{v}'")))?;
                    support.insert(idx, val);
                }
                SolutionModel::sparse(support)
            }
            other => Err(Error::Config(format!("unknown solution model '{other}'"))),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a rate experiment from a scenario file; emits records CSV plus a
    /// fit/envelope summary on stderr.
    Rates {
        scenario: PathBuf,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Column-norm decay and smallest singular values of growing sections.
    Diagnose {
        #[command(flatten)]
        operator: OperatorArgs,
        #[arg(long, default_value_t = 100)]
        kmax: usize,
        /// Comma-separated section sizes
        #[arg(long, value_delimiter = ',', default_values_t = vec![50, 100, 200, 400])]
        sections: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Variational-inequality slack suite on random trial points.
    ViCheck {
        scenario: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the index functions phi1/phi2 on a logarithmic t-grid.
    Phi {
        #[command(flatten)]
        operator: OperatorArgs,
        #[command(flatten)]
        solution: SolutionArgs,
        #[arg(long, default_value_t = 1000)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-10)]
        t_min: f64,
        #[arg(long, default_value_t = 100.0)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        t_count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force supremum over sign patterns against the closed form.
    SupOracle {
        #[command(flatten)]
        operator: OperatorArgs,
        /// Largest pattern length to enumerate (<= 16)
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Ok(true) = checks passed, Ok(false) = an acceptance-style check failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Rates { scenario, out } => {
            let sc = load_scenario(&scenario)?;
            let records = run_rate_experiment(&sc)?;
            emit(&records_to_csv(&records), out.as_ref())?;

            let failed = records
                .iter()
                .filter(|r| matches!(r.status, RecordStatus::Failed(_)))
                .count();
            let envelope = phi_envelope_check(&records, sc.c_budget)?;
            eprintln!(
                "envelope: C_fit = {:.4} (budget {}) -> {}",
                envelope.c_fit,
                sc.c_budget,
                if envelope.pass { "pass" } else { "FAIL" }
            );
            let mut ok = envelope.pass && failed == 0;
            match fit_rate_exponent(&records) {
                Ok(fit) => eprintln!(
                    "fit over {} records: slope = {:.4}, intercept = {:.4}, r^2 = {:.5}",
                    fit.points, fit.slope, fit.intercept, fit.r_squared
                ),
                Err(e) => {
                    eprintln!("fit skipped: {e}");
                    ok = false;
                }
            }
            if failed > 0 {
                eprintln!("{failed} record(s) failed");
            }
            Ok(ok)
        }

        Command::Diagnose {
            operator,
            kmax,
            sections,
            out,
        } => {
            let dim = sections.iter().copied().max().unwrap_or(0).max(kmax).max(1);
            let op = operator.build(dim)?;
            let report = ell1reg::diagnostics::illposedness_report(&op, kmax, &sections)?;
            let mut csv = String::from("metric,index,value\n");
            for (k, v) in &report.column_norms {
                csv.push_str(&format!("column_norm,{k},{v:.16e}\n"));
            }
            for (n, v) in &report.sigma_min_by_section {
                csv.push_str(&format!("sigma_min,{n},{v:.16e}\n"));
            }
            emit(&csv, out.as_ref())?;
            eprintln!("notes: {}", report.notes);
            Ok(true)
        }

        Command::ViCheck {
            scenario,
            samples,
            out,
        } => {
            let sc = load_scenario(&scenario)?;
            let x_dag = sc.solution.generate(sc.n)?;
            let phi = RateModel::supremum(&sc.operator, TailBound::Exact(&x_dag), sc.n)?;
            let mut rng = CounterRng::new(derive_record_seed(sc.seed, 0xABCD));
            let mut csv = String::from("sample,kind,slack\n");
            let mut min_slack = f64::INFINITY;
            for i in 0..samples {
                // alternate dense and sparse trial points
                let sparse = i % 2 == 1;
                let values: Vec<f64> = (0..sc.n)
                    .map(|_| {
                        let v = rng.next_symmetric();
                        if sparse && rng.next_unit() > 0.05 {
                            0.0
                        } else {
                            v
                        }
                    })
                    .collect();
                let x = TruncatedSequence::new(values)?;
                let slack = verify_variational_inequality(&sc.operator, &x, &x_dag, &phi)?;
                min_slack = min_slack.min(slack);
                csv.push_str(&format!(
                    "{i},{},{slack:.16e}\n",
                    if sparse { "sparse" } else { "dense" }
                ));
            }
            emit(&csv, out.as_ref())?;
            eprintln!("min slack over {samples} samples: {min_slack:.3e}");
            Ok(min_slack >= -1e-9)
        }

        Command::Phi {
            operator,
            solution,
            n_max,
            t_min,
            t_max,
            t_count,
            out,
        } => {
            if !(t_min > 0.0 && t_max > t_min && t_count >= 2) {
                return Err(Error::Config(
                    "need 0 < t_min < t_max and at least two grid points".into(),
                ));
            }
            let op = operator.build(n_max)?;
            let model = solution.build()?;
            let cumulative = RateModel::cumulative(&op, TailBound::Analytic(&model), n_max)?;
            let supremum = RateModel::supremum(&op, TailBound::Analytic(&model), n_max)?;
            let mut csv = String::from("t,phi1,phi1_n,phi2,phi2_n\n");
            let log_step = (t_max / t_min).ln() / (t_count - 1) as f64;
            for i in 0..t_count {
                let t = t_min * (log_step * i as f64).exp();
                let e1 = cumulative.eval(t)?;
                let e2 = supremum.eval(t)?;
                csv.push_str(&format!(
                    "{t:.16e},{:.16e},{},{:.16e},{}\n",
                    e1.value, e1.n_star, e2.value, e2.n_star
                ));
            }
            emit(&csv, out.as_ref())?;
            Ok(true)
        }

        Command::SupOracle { operator, n } => {
            let op = operator.build(n.max(1))?;
            println!("n,bruteforce,closed_form,rel_err,argmax");
            let mut ok = true;
            for m in 1..=n {
                let (value, signs) = sup_bruteforce(&op, m)?;
                let closed = sup_closed_form(&op, m)?;
                let rel = (value - closed).abs() / closed.max(1.0);
                ok &= rel <= 1e-12;
                let pattern: String = signs
                    .iter()
                    .map(|s| match s {
                        -1 => '-',
                        0 => '0',
                        _ => '+',
                    })
                    .collect();
                println!("{m},{value:.16e},{closed:.16e},{rel:.3e},{pattern}");
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
