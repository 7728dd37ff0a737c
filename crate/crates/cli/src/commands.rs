//! Dispatch from parsed arguments to entropy-core.

use std::fmt;
use std::io::Read;
use std::path::Path;

use serde_json::{json, Value};

use entropy_core::correlation::{self, CorrParams, Counting, SampEn, Strategy};
use entropy_core::group::Group;
use entropy_core::io::{
    parse_matrix, parse_moment_spec, parse_prob_vec, parse_series, parse_symbols, Column,
};
use entropy_core::maxent::{self, ContinuousFamily, MomentSpec};
use entropy_core::ordinal::{self, factorial, OrdinalPattern};
use entropy_core::prob::{self, JointTable, LogBase, ProbVec};
use entropy_core::stats;
use entropy_core::symbolic::{self, IntervalMap, MarkovModel, TransitionMatrix01};
use entropy_core::transfer::{self, PairedSymbolSeq, TEParams};
use entropy_core::Error;

use crate::output::Record;
use crate::{
    ChiArgs, Cli, Command, CorrelationArgs, DistArgs, FamilyArg, MapArgs, MapKind, MatrixArg,
    MaxentCommand, Measure, OracleCommand, OrdinalArgs, PairArgs, SeriesCommand, SeriesInput,
    SimulateCommand, StrategyArg, TestCommand, TransferCommand,
};

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Io { path: String, message: String },
    Usage(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::NonConvergence { .. }) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io { path, message } => write!(f, "{path}: {message}"),
            Failure::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<Record, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Reads a file, or standard input for `-`.
fn read(path: &Path) -> Result<String, Failure> {
    let io = |e: std::io::Error| Failure::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(io)
}

/// Attaches the input file to a parse error.
fn in_file<T>(path: &Path, r: entropy_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match e {
        Error::Parse { .. } => Failure::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        },
        other => Failure::Core(other),
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result types serialize to JSON")
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Dist(a) => dist(a, cli.seed),
        Command::Series(c) => series(c),
        Command::Transfer(c) => transfer_cmd(c),
        Command::Maxent(c) => maxent_cmd(c),
        Command::Test(c) => test_cmd(c, cli.seed),
        Command::Oracle(c) => oracle(c),
        Command::Simulate(c) => simulate(c, cli.seed),
    }
}

fn measure_name(m: Measure) -> &'static str {
    match m {
        Measure::Shannon => "shannon",
        Measure::Renyi => "renyi",
        Measure::Tsallis => "tsallis",
        Measure::Mutual => "mutual",
        Measure::Huffman => "huffman",
        Measure::Axioms => "axioms",
    }
}

fn dist_inputs(a: &DistArgs) -> Value {
    json!({ "probs": a.probs, "input": a.input.as_ref().map(|p| p.display().to_string()) })
}

fn prob_vec(a: &DistArgs) -> Result<ProbVec, Failure> {
    match (&a.probs, &a.input) {
        (Some(p), _) => Ok(parse_prob_vec(p)?),
        (None, Some(path)) => in_file(path, parse_prob_vec(&read(path)?)),
        (None, None) => Err(usage("give --probs or --input")),
    }
}

fn dist(a: &DistArgs, seed: u64) -> Outcome {
    let base = LogBase::new(a.base)?;
    let command = format!("dist {}", measure_name(a.measure));
    let parameters = json!({ "measure": measure_name(a.measure), "base": a.base, "q": a.q });
    let result = match a.measure {
        Measure::Shannon => {
            let p = prob_vec(a)?;
            json!({ "entropy": prob::shannon_entropy(&p, base), "support_size": p.support_size() })
        }
        Measure::Renyi => {
            let q =
                a.q.ok_or_else(|| usage("--q is required for the Rényi entropy"))?;
            let p = prob_vec(a)?;
            json!({ "entropy": base.from_nats(prob::renyi_entropy(&p, q)?) })
        }
        Measure::Tsallis => {
            let q =
                a.q.ok_or_else(|| usage("--q is required for the Tsallis entropy"))?;
            if !(q > 0.0 && q.is_finite()) {
                return Err(usage(format!(
                    "invalid value for --q: Tsallis index must be finite and > 0, got {q}"
                )));
            }
            let p = prob_vec(a)?;
            json!({ "entropy": prob::tsallis_entropy(&p, q)? })
        }
        Measure::Mutual => {
            let rows: Vec<Vec<f64>> = match (&a.probs, &a.input) {
                (Some(t), _) => parse_matrix(t)?,
                (None, Some(path)) => in_file(path, parse_matrix(&read(path)?))?,
                (None, None) => return Err(usage("give the joint table with --probs or --input")),
            };
            let s = prob::joint_conditional_mutual(&JointTable::new(rows)?);
            let b = |v: f64| base.from_nats(v);
            json!({
                "h_x": b(s.h_x), "h_y": b(s.h_y), "h_xy": b(s.h_xy),
                "h_x_given_y": b(s.h_x_given_y), "h_y_given_x": b(s.h_y_given_x),
                "mutual_information": b(s.mutual_information),
            })
        }
        Measure::Huffman => {
            let code = prob::huffman_average_length(&prob_vec(a)?, a.arity)?;
            let mut v = to_value(&code);
            v["bound_holds"] =
                json!(code.entropy <= code.avg_len + 1e-12 && code.avg_len < code.entropy + 1.0);
            v
        }
        Measure::Axioms => {
            let given = if a.probs.is_some() || a.input.is_some() {
                vec![prob_vec(a)?]
            } else {
                Vec::new()
            };
            let report = prob::khinchin_axiom_suite(&given, &a.orders, a.instances, seed)?;
            let mut v = to_value(&report);
            v["consistent_with_theory"] = json!(report.consistent_with_theory());
            return Ok(Record::new(
                command,
                dist_inputs(a),
                json!({ "orders": a.orders, "instances": a.instances, "seed": seed }),
                v,
            ));
        }
    };
    Ok(Record::new(command, dist_inputs(a), parameters, result))
}

fn load_series(s: &SeriesInput) -> Result<Vec<f64>, Failure> {
    let column: Option<Column> = s.column.as_deref().map(str::parse).transpose()?;
    let text = read(&s.input)?;
    Ok(in_file(&s.input, parse_series(&text, column.as_ref()))?
        .values()
        .to_vec())
}

fn series_inputs(s: &SeriesInput, n: usize) -> Value {
    json!({ "input": s.input.display().to_string(), "column": s.column, "length": n })
}

fn counting(s: StrategyArg) -> Counting {
    let strategy = match s {
        StrategyArg::Naive => Strategy::Naive,
        StrategyArg::Sorted => Strategy::Sorted,
    };
    Counting {
        strategy,
        parallel: true,
    }
}

fn correlation_params(a: &CorrelationArgs, x: &[f64]) -> Result<(CorrParams, Value), Failure> {
    let epsilon = a.epsilon.unwrap_or_else(|| correlation::default_epsilon(x));
    if !(epsilon > 0.0) {
        return Err(usage(
            "default --epsilon is 0 because the series is constant; give --epsilon explicitly",
        ));
    }
    let p = CorrParams::new(a.k, epsilon)?;
    let parameters = json!({
        "k": a.k,
        "epsilon": epsilon,
        "epsilon_source": if a.epsilon.is_some() { "given" } else { "0.2 × sample sd" },
        "strategy": to_value(&counting(a.strategy).strategy),
    });
    Ok((p, parameters))
}

fn ordinal_flags(n: usize, order: usize) -> Vec<String> {
    let windows = n.saturating_sub(order - 1) as u64;
    if windows < 5 * factorial(order) {
        vec![format!(
            "fewer than 5·L! = {} windows",
            5 * factorial(order)
        )]
    } else {
        Vec::new()
    }
}

fn series(c: &SeriesCommand) -> Outcome {
    match c {
        SeriesCommand::Apen(a) => {
            let x = load_series(&a.series)?;
            let (p, parameters) = correlation_params(a, &x)?;
            let value = correlation::apen_with(&x, &p, counting(a.strategy))?;
            Ok(Record::new(
                "series apen",
                series_inputs(&a.series, x.len()),
                parameters,
                json!({ "apen": value }),
            ))
        }
        SeriesCommand::Sampen(a) => {
            let x = load_series(&a.series)?;
            let (p, parameters) = correlation_params(a, &x)?;
            let s = correlation::sampen_with(&x, &p, counting(a.strategy))?;
            let flags = match s {
                SampEn::Undefined { .. } => {
                    vec!["no template pairs match at length k + 1".to_string()]
                }
                SampEn::Defined { .. } => Vec::new(),
            };
            Ok(Record::new(
                "series sampen",
                series_inputs(&a.series, x.len()),
                parameters,
                to_value(&s),
            )
            .with_flags(flags))
        }
        SeriesCommand::Pe(a) => {
            let x = load_series(&a.series)?;
            let pe = ordinal::permutation_entropy(&x, a.order)?;
            let mut v = to_value(&pe);
            v["topological"] = json!(ordinal::topological_perm_entropy_order(&x, a.order)?);
            Ok(Record::new(
                "series pe",
                series_inputs(&a.series, x.len()),
                json!({ "L": a.order }),
                v,
            )
            .with_flags(ordinal_flags(x.len(), a.order)))
        }
        SeriesCommand::Ce(a) => ordinal_ce(a),
        SeriesCommand::Census { ordinal: a, stride } => {
            let x = load_series(&a.series)?;
            let dist = ordinal::ordinal_distribution(&x, a.order, *stride)?;
            let observed: Vec<Value> = dist
                .observed()
                .map(|(p, c)| json!({ "pattern": p.to_string(), "count": c }))
                .collect();
            let missing: Vec<String> = (0..dist.counts().len() as u64)
                .filter(|&i| dist.counts()[i as usize] == 0)
                .map(|i| OrdinalPattern::from_index(a.order, i).map(|p| p.to_string()))
                .collect::<entropy_core::Result<_>>()?;
            let result = json!({
                "windows": dist.total(),
                "entropy": dist.entropy(),
                "observed": observed,
                "missing_count": missing.len(),
                "missing": missing,
            });
            Ok(Record::new(
                "series census",
                series_inputs(&a.series, x.len()),
                json!({ "L": a.order, "stride": stride }),
                result,
            ))
        }
    }
}

fn ordinal_ce(a: &OrdinalArgs) -> Outcome {
    let x = load_series(&a.series)?;
    let h = ordinal::conditional_entropy_ordinal(&x, a.order)?;
    Ok(Record::new(
        "series ce",
        series_inputs(&a.series, x.len()),
        json!({ "L": a.order }),
        json!({ "conditional_entropy": h }),
    )
    .with_flags(ordinal_flags(x.len(), a.order)))
}

fn load_pair(a: &PairArgs) -> Result<(PairedSymbolSeq, TEParams, Value, Value), Failure> {
    let x = in_file(&a.x, parse_symbols(&read(&a.x)?, None))?;
    let y = in_file(&a.y, parse_symbols(&read(&a.y)?, None))?;
    let inputs = json!({ "x": a.x.display().to_string(), "y": a.y.display().to_string(), "length": x.len() });
    let params = TEParams::new(a.lambda, a.n, a.k)?;
    Ok((
        PairedSymbolSeq::new(x, y)?,
        params,
        inputs,
        to_value(&params),
    ))
}

fn transfer_cmd(c: &TransferCommand) -> Outcome {
    match c {
        TransferCommand::Te(a) => {
            let (pair, params, inputs, parameters) = load_pair(a)?;
            let te = transfer::transfer_entropy(&pair, &params)?;
            let flags = te
                .undersampled
                .then(|| "more distinct histories than a tenth of the samples".to_string());
            Ok(Record::new("transfer te", inputs, parameters, to_value(&te)).with_flags(flags))
        }
        TransferCommand::Delta(a) => {
            let (pair, params, inputs, parameters) = load_pair(a)?;
            let forward = transfer::transfer_entropy(&pair, &params)?;
            let backward = transfer::transfer_entropy(&pair.swapped(), &params)?;
            let delta = transfer::directionality(&pair, &params)?;
            let flags = (forward.undersampled || backward.undersampled)
                .then(|| "more distinct histories than a tenth of the samples".to_string());
            let result =
                json!({ "t_y_to_x": forward.value, "t_x_to_y": backward.value, "delta": delta });
            Ok(Record::new("transfer delta", inputs, parameters, result).with_flags(flags))
        }
        TransferCommand::Algebraic {
            group,
            xi,
            eta,
            lambda,
        } => {
            let g: Group = group.parse()?;
            let xs = in_file(xi, parse_symbols(&read(xi)?, None))?;
            let es = in_file(eta, parse_symbols(&read(eta)?, None))?;
            let r = transfer::algebraic_transfer_entropy(&g, xs.symbols(), es.symbols(), *lambda)?;
            let flags = (!r.hypotheses.applicable)
                .then(|| "reduction hypotheses not met: lhs and rhs need not agree".to_string());
            Ok(Record::new(
                "transfer algebraic",
                json!({ "xi": xi.display().to_string(), "eta": eta.display().to_string(), "length": xs.len() }),
                json!({ "group": g.to_string(), "lambda": lambda }),
                to_value(&r),
            )
            .with_flags(flags))
        }
    }
}

fn maxent_cmd(c: &MaxentCommand) -> Outcome {
    match c {
        MaxentCommand::Solve {
            spec,
            support,
            mean,
            tol,
            max_iter,
        } => {
            let (moments, inputs): (MomentSpec, Value) = match (spec, mean) {
                (Some(path), _) => (
                    in_file(path, parse_moment_spec(&read(path)?))?,
                    json!({ "spec": path.display().to_string() }),
                ),
                (None, Some(m)) => (
                    MomentSpec::mean(support.clone(), *m)?,
                    json!({ "support": support, "mean": m }),
                ),
                (None, None) => return Err(usage("give --spec, or --support with --mean")),
            };
            let sol = maxent::solve_discrete_maxent(&moments, *tol, *max_iter)?;
            Ok(Record::new(
                "maxent solve",
                inputs,
                json!({ "tol": tol, "max_iter": max_iter }),
                to_value(&sol),
            ))
        }
        MaxentCommand::Gibbs { energies, beta } => {
            let p = maxent::gibbs_distribution(energies, *beta)?;
            let result = json!({ "distribution": p.probs(), "entropy": prob::shannon_entropy(&p, LogBase::NATURAL) });
            Ok(Record::new(
                "maxent gibbs",
                json!({ "energies": energies }),
                json!({ "beta": beta }),
                result,
            ))
        }
        MaxentCommand::Tsallis { energies, beta, q } => {
            let p = maxent::tsallis_maxent_distribution(energies, *beta, *q)?;
            let result = json!({ "distribution": p.probs(), "tsallis_entropy": prob::tsallis_entropy(&p, *q)? });
            Ok(Record::new(
                "maxent tsallis",
                json!({ "energies": energies }),
                json!({ "beta": beta, "q": q }),
                result,
            ))
        }
        MaxentCommand::ClosedForm {
            family,
            a,
            b,
            mean,
            m1,
            m2,
            matrix,
        } => {
            let need = |v: &Option<f64>, flag: &str| {
                v.ok_or_else(|| usage(format!("{flag} is required for this family")))
            };
            let (result, parameters) = match family {
                FamilyArg::GaussianMv => {
                    let m = matrix
                        .as_deref()
                        .ok_or_else(|| usage("--matrix is required for gaussian-mv"))?;
                    let r: Vec<Vec<f64>> = parse_matrix(m)?;
                    let h = maxent::gaussian_multivariate_entropy(&r)?;
                    (
                        json!({ "family": "gaussian_mv", "dimension": r.len(), "entropy": h }),
                        json!({ "matrix": m }),
                    )
                }
                _ => {
                    let f = match family {
                        FamilyArg::Uniform => ContinuousFamily::Uniform {
                            a: need(a, "--a")?,
                            b: need(b, "--b")?,
                        },
                        FamilyArg::Exponential => ContinuousFamily::Exponential {
                            m: need(mean, "--mean")?,
                        },
                        _ => ContinuousFamily::Gaussian {
                            m1: need(m1, "--m1")?,
                            m2: need(m2, "--m2")?,
                        },
                    };
                    (
                        to_value(&maxent::continuous_maxent_closed_forms(f)?),
                        to_value(&f),
                    )
                }
            };
            Ok(Record::new(
                "maxent closed-form",
                json!({}),
                parameters,
                result,
            ))
        }
    }
}

fn chi_record(name: &str, a: &ChiArgs, x: &[f64], r: stats::TestResult) -> Record {
    let flags = r.flags.clone();
    Record::new(
        name,
        series_inputs(&a.series, x.len()),
        json!({ "L": a.order, "alpha": a.alpha }),
        to_value(&r),
    )
    .with_flags(flags)
}

fn test_cmd(c: &TestCommand, seed: u64) -> Outcome {
    match c {
        TestCommand::G(a) => {
            let x = load_series(&a.series)?;
            let r = stats::g_test(&x, a.order, a.alpha)?;
            Ok(chi_record("test g", a, &x, r))
        }
        TestCommand::Chi2(a) => {
            if a.order > stats::MAX_CHI2_ORDER {
                return Err(usage(format!(
                    "invalid value for --L: the chi-square test needs L ≤ {}, got {}",
                    stats::MAX_CHI2_ORDER,
                    a.order
                )));
            }
            let x = load_series(&a.series)?;
            let r = stats::method2_chi2_test(&x, a.order, a.alpha)?;
            Ok(chi_record("test chi2", a, &x, r))
        }
        TestCommand::Surrogate {
            series: s,
            order,
            surrogates,
        } => {
            let x = load_series(s)?;
            let r = stats::method1_surrogate_test(&x, *order, *surrogates, seed)?;
            let flags = r.flags.clone();
            Ok(Record::new(
                "test surrogate",
                series_inputs(s, x.len()),
                json!({ "L": order, "surrogates": surrogates, "seed": seed }),
                to_value(&r),
            )
            .with_flags(flags))
        }
    }
}

fn load_matrix<T: std::str::FromStr>(m: &MatrixArg) -> Result<(Vec<Vec<T>>, Value), Failure>
where
    T::Err: fmt::Display,
{
    match (&m.matrix, &m.input) {
        (Some(t), _) => Ok((parse_matrix(t)?, json!({ "matrix": t }))),
        (None, Some(path)) => Ok((
            in_file(path, parse_matrix(&read(path)?))?,
            json!({ "input": path.display().to_string() }),
        )),
        (None, None) => Err(usage("give --matrix or --input")),
    }
}

fn interval_map(a: &MapArgs) -> Result<(IntervalMap, Value), Failure> {
    let map = match a.map {
        MapKind::Logistic => IntervalMap::logistic(a.a)?,
        MapKind::Tent => IntervalMap::Tent,
        MapKind::Doubling => IntervalMap::Doubling,
        MapKind::Piecewise => {
            let text = a
                .knots
                .as_deref()
                .ok_or_else(|| usage("--knots is required for a piecewise map"))?;
            let rows: Vec<Vec<f64>> = parse_matrix(text)?;
            if rows[0].len() != 2 {
                return Err(usage("invalid value for --knots: each knot is an x,y pair"));
            }
            IntervalMap::piecewise(rows.iter().map(|r| (r[0], r[1])).collect())?
        }
    };
    let desc = to_value(&map);
    Ok((map, desc))
}

fn oracle(c: &OracleCommand) -> Outcome {
    match c {
        OracleCommand::Bernoulli { probs } => {
            let p = parse_prob_vec(probs)?;
            Ok(Record::new(
                "oracle bernoulli",
                json!({ "probs": probs }),
                json!({}),
                json!({ "entropy": symbolic::bernoulli_entropy(&p) }),
            ))
        }
        OracleCommand::Markov(m) => {
            let (rows, inputs) = load_matrix::<f64>(m)?;
            let model = MarkovModel::from_transition(rows)?;
            let result = json!({
                "entropy_rate": symbolic::markov_entropy_rate(&model),
                "stationary": model.stationary().probs(),
            });
            Ok(Record::new("oracle markov", inputs, json!({}), result))
        }
        OracleCommand::Sft(m) => {
            let (rows, inputs) = load_matrix::<f64>(m)?;
            let a = TransitionMatrix01::from_reals(&rows)?;
            let result = json!({
                "entropy": symbolic::topological_markov_entropy(&a)?,
                "spectral_radius": symbolic::spectral_radius(&a)?,
                "irreducible": a.is_irreducible(),
            });
            let flags = (!a.is_essential())
                .then(|| "some symbol has no successor or no predecessor".to_string());
            Ok(Record::new("oracle sft", inputs, json!({}), result).with_flags(flags))
        }
        OracleCommand::Parry(m) => {
            let (rows, inputs) = load_matrix::<f64>(m)?;
            let a = TransitionMatrix01::from_reals(&rows)?;
            let model = symbolic::parry_measure(&a)?;
            let result = json!({
                "transition": model.transition(),
                "stationary": model.stationary().probs(),
                "entropy_rate": symbolic::markov_entropy_rate(&model),
                "topological_entropy": symbolic::topological_markov_entropy(&a)?,
            });
            Ok(Record::new("oracle parry", inputs, json!({}), result))
        }
        OracleCommand::Toral(m) => {
            let (rows, inputs) = load_matrix::<i64>(m)?;
            let poly: Vec<Value> = symbolic::characteristic_polynomial(&rows)?
                .into_iter()
                .map(|c| i64::try_from(c).map_or_else(|_| json!(c.to_string()), |v| json!(v)))
                .collect();
            let result = json!({
                "entropy": symbolic::toral_automorphism_entropy(&rows)?,
                "characteristic_polynomial": poly,
            });
            Ok(Record::new("oracle toral", inputs, json!({}), result))
        }
        OracleCommand::Lap { map, n } => {
            let (f, desc) = interval_map(map)?;
            let laps = symbolic::lap_number_entropy(&f, *n)?;
            let last = laps.last().map(|l| l.estimate);
            Ok(Record::new(
                "oracle lap",
                json!({}),
                json!({ "map": desc, "n": n }),
                json!({ "laps": laps, "estimate": last }),
            ))
        }
        OracleCommand::Lyapunov {
            map,
            x0,
            n,
            burn_in,
        } => {
            let (f, desc) = interval_map(map)?;
            let est = symbolic::lyapunov_entropy_estimate_1d(&f, *x0, *n, *burn_in)?;
            let flags = (est.skipped > 0).then(|| {
                format!(
                    "{} orbit points at non-differentiable points skipped",
                    est.skipped
                )
            });
            Ok(Record::new(
                "oracle lyapunov",
                json!({}),
                json!({ "map": desc, "x0": x0, "n": n, "burn_in": burn_in }),
                to_value(&est),
            )
            .with_flags(flags))
        }
    }
}

fn simulate(c: &SimulateCommand, seed: u64) -> Outcome {
    match c {
        SimulateCommand::Markov { matrix, n } => {
            let (rows, inputs) = load_matrix::<f64>(matrix)?;
            let model = MarkovModel::from_transition(rows)?;
            let s = symbolic::simulate_markov(&model, *n, seed)?;
            let values = s.symbols().iter().map(|&v| json!(v)).collect();
            Ok(Record::new(
                "simulate markov",
                inputs,
                json!({ "n": n, "seed": seed }),
                json!({ "alphabet": s.alphabet() }),
            )
            .with_values(values))
        }
        SimulateCommand::Map { map, x0, n } => {
            let (f, desc) = interval_map(map)?;
            let orbit = f.orbit(*x0, *n)?;
            let values = orbit.iter().map(|&v| json!(v)).collect();
            Ok(Record::new(
                "simulate map",
                json!({}),
                json!({ "map": desc, "x0": x0, "n": n }),
                json!({}),
            )
            .with_values(values))
        }
    }
}
