use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;
use strip3d::aptas::{mnfdh_pack, run_square_aptas, AptasConfig, PatternLimits, Region};
use strip3d::generate::{generate, Generator};
use strip3d::io::{instance_to_json, packing_to_json, parse_instance, parse_packing, InstanceFile};
use strip3d::oracle::{exact_strip_opt, SearchBudget};
use strip3d::rational::{format_rational, rat, to_f64};
use strip3d::ssp::{run_3ssp, SspConfig};
use strip3d::{validate_packing, Error, Instance, Packing, Rational};

use crate::export::{obj, svg_layers};
use crate::{Algorithm, Cli, Command, ExportArgs, Format, GenArgs, GeneratorName, Knobs, OracleArgs, SolveArgs};

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn invariant(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

fn classify(context: &str, e: Error) -> Failure {
    let message = format!("{context}: {e}");
    match e {
        Error::Format(_) | Error::Model(_) => Failure::io(message),
        Error::Invariant(_) => Failure::invariant(message),
        Error::Domain { .. } | Error::Contract(_) | Error::Refused(_) | Error::Oracle(_) => Failure::usage(message),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<InstanceFile, Failure> {
    parse_instance(&read(path)?).map_err(|e| classify(&path.display().to_string(), e))
}

fn show(r: &Rational) -> String {
    format!("{} ({:.6})", format_rational(r), to_f64(r))
}

/// A produced packing with a report.
struct Outcome {
    packing: Packing,
    report: serde_json::Value,
    lines: Vec<String>,
    /// All asserted inequalities hold.
    holds: bool,
}

fn solve_instance(file: &InstanceFile, knobs: &Knobs) -> Result<Outcome, Failure> {
    let instance = &file.instance;
    let mut out = match knobs.algorithm {
        Algorithm::Ssp => {
            let config = SspConfig {
                k: knobs.k,
                c: knobs.c.clone(),
                epsilon: knobs.epsilon.clone().unwrap_or_else(|| rat(1, 10)),
                backend: knobs.backend,
            };
            let run = run_3ssp(instance, &config).map_err(|e| classify("3ssp", e))?;
            let cert = &run.certificate;
            let mut lines = vec![
                format!("lower bound: {}", show(&cert.lower_bound)),
                format!("  volume: {}", show(&cert.lb_volume)),
                format!("  modified volume: {}", show(&cert.lb_modified)),
                format!("modified-volume slack: {}", show(&cert.aggregate_slack)),
                format!("min segment slack: {}", show(&cert.min_segment_slack)),
            ];
            if let Some(r) = cert.ratio {
                lines.push(format!("ratio A/LB: {r:.6}"));
            }
            if let Some(row) = &cert.parametric {
                lines.push(format!("parametric row: alpha in {} ratio {}", row.alpha, row.ratio));
            }
            Outcome {
                report: serde_json::to_value(cert).expect("certificate serialises"),
                holds: cert.holds(),
                packing: run.packing,
                lines,
            }
        }
        Algorithm::SquareAptas => {
            let mut limits = PatternLimits::default();
            if knobs.budget_nodes != crate::DEFAULT_NODES {
                limits.budget = limits.budget.with_nodes(knobs.budget_nodes);
            }
            let config = AptasConfig {
                epsilon: knobs.epsilon.clone().unwrap_or_else(|| rat(1, 12)),
                k_override: knobs.groups,
                limits,
            };
            let run = run_square_aptas(instance, &config).map_err(|e| classify("square-aptas", e))?;
            let r = &run.report;
            let mut lines = vec![
                format!("lower bound: {}", show(&r.lower_bound)),
                format!("branch: {:?}, K = {}, delta = {}, i = {}", r.branch, r.k, r.delta, r.gap_index),
                format!("additive over main term: {:.6}", r.additive),
            ];
            if let Some(x) = r.ratio {
                lines.push(format!("ratio A/LB: {x:.6}"));
            }
            Outcome {
                report: serde_json::to_value(r).expect("report serialises"),
                holds: true,
                packing: run.packing,
                lines,
            }
        }
        Algorithm::Mnfdh => {
            let delta = instance
                .boxes()
                .iter()
                .flat_map(|b| [b.length.clone(), b.width.clone()])
                .max()
                .unwrap_or_else(|| rat(1, 1));
            let region = Region {
                origin: [rat(0, 1), rat(0, 1), rat(0, 1)],
                length: rat(1, 1),
                width: rat(1, 1),
                height: None,
            };
            let r = mnfdh_pack(instance.boxes(), &region, &delta).map_err(|e| classify("mnfdh", e))?;
            let packing = Packing::from_placements(instance, r.placements)
                .map_err(|e| Failure::invariant(format!("mnfdh: {e}")))?;
            let lb = strip3d::model::total_volume(instance);
            Outcome {
                report: json!({ "height": format_rational(packing.height()), "lb_volume": format_rational(&lb) }),
                lines: vec![format!("lower bound: {}", show(&lb))],
                holds: true,
                packing,
            }
        }
    };
    let report = validate_packing(instance, &out.packing).map_err(|e| Failure::invariant(e.to_string()))?;
    if !report.is_ok() {
        return Err(Failure::invariant(format!("produced packing is invalid: {report:?}")));
    }
    if let Some(opt) = &file.known_opt {
        if *opt > Rational::from_integer(0.into()) {
            let ratio = to_f64(&(out.packing.height() / opt));
            out.lines.push(format!("ratio A/OPT: {ratio:.6} (known optimum {})", format_rational(opt)));
            if let serde_json::Value::Object(m) = &mut out.report {
                m.insert("known_opt".into(), json!(format_rational(opt)));
                m.insert("ratio_to_known_opt".into(), json!(ratio));
            }
        }
    }
    Ok(out)
}

fn solve_one(path: &Path, args: &SolveArgs, certify: bool, out: Option<&Path>) -> Result<Vec<String>, Failure> {
    let file = load_instance(path)?;
    let outcome = solve_instance(&file, &args.knobs)?;
    let mut lines = vec![format!("height: {}", show(outcome.packing.height()))];
    if certify {
        lines.extend(outcome.lines.iter().cloned());
    }
    if let Some(out) = out {
        let text = if certify {
            serde_json::to_string_pretty(&outcome.report).expect("report serialises")
        } else {
            packing_to_json(&outcome.packing)
        };
        write(out, &text)?;
    } else if !certify && args.glob.is_none() {
        lines.push(packing_to_json(&outcome.packing));
    }
    if !outcome.holds {
        return Err(Failure::invariant(format!(
            "{}: certificate inequalities fail\n{}",
            path.display(),
            lines.join("\n")
        )));
    }
    Ok(lines)
}

fn solve_cmd(args: &SolveArgs, certify: bool) -> Result<(), Failure> {
    let Some(pattern) = &args.glob else {
        let path = args.instance.as_ref().expect("clap requires an instance");
        for line in solve_one(path, args, certify, args.out.as_deref())? {
            println!("{line}");
        }
        return Ok(());
    };
    let paths: Vec<PathBuf> = glob::glob(pattern)
        .map_err(|e| Failure::usage(format!("bad glob {pattern:?}: {e}")))?
        .filter_map(|p| p.ok())
        .collect();
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))?;
    }
    let suffix = if certify { "report.json" } else { "packing.json" };
    let results: Vec<(PathBuf, Result<Vec<String>, Failure>)> = paths
        .par_iter()
        .map(|p| {
            let out = args.out.as_ref().map(|d| {
                let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                d.join(format!("{stem}.{suffix}"))
            });
            (p.clone(), solve_one(p, args, certify, out.as_deref()))
        })
        .collect();
    let mut worst: Option<Failure> = None;
    for (p, r) in results {
        match r {
            Ok(lines) => println!("{}: {}", p.display(), lines.join("; ")),
            Err(f) => {
                eprintln!("{}: error: {}", p.display(), f.message);
                if worst.as_ref().is_none_or(|w| f.code > w.code) {
                    worst = Some(f);
                }
            }
        }
    }
    match worst {
        Some(f) => Err(Failure {
            code: f.code,
            message: "some instances failed".into(),
        }),
        None => Ok(()),
    }
}

fn oracle_cmd(args: &OracleArgs) -> Result<(), Failure> {
    let file = load_instance(&args.instance)?;
    let budget = SearchBudget {
        max_nodes: args.budget_nodes,
        max_boxes: args.max_boxes,
    };
    let (opt, packing) = exact_strip_opt(&file.instance, &budget).map_err(|e| classify("oracle", e))?;
    println!("optimum: {}", show(&opt));
    if let Some(out) = &args.out {
        write(out, &packing_to_json(&packing))?;
    }
    Ok(())
}

fn gen_cmd(args: &GenArgs) -> Result<(), Failure> {
    let generator = match args.generator {
        GeneratorName::Uniform => Generator::Uniform { n: args.n, lo: args.lo, hi: args.hi },
        GeneratorName::HarmonicAdversarial => Generator::HarmonicAdversarial {
            n: args.n,
            max_type: args.max_type,
            eta: args.eta.clone(),
        },
        GeneratorName::SquareBase => Generator::SquareBase { n: args.n, lo: args.lo, hi: args.hi },
        GeneratorName::GuillotineCut => Generator::GuillotineCut { height: args.height, cuts: args.cuts },
    };
    let g = generate(&generator, args.seed).map_err(|e| classify(generator.name(), e))?;
    let text = instance_to_json(&g.instance, g.known_opt.as_ref());
    match &args.out {
        Some(out) => write(out, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn export_cmd(args: &ExportArgs) -> Result<(), Failure> {
    let file = load_instance(&args.instance)?;
    let instance: &Instance = &file.instance;
    let packing = match &args.packing {
        Some(p) => {
            let packing = parse_packing(&read(p)?).map_err(|e| classify(&p.display().to_string(), e))?;
            let report = validate_packing(instance, &packing).map_err(|e| Failure::io(e.to_string()))?;
            if !report.is_ok() {
                return Err(Failure::io(format!("{} is not a valid packing: {report:?}", p.display())));
            }
            packing
        }
        None => solve_instance(&file, &args.knobs)?.packing,
    };
    match args.format {
        Format::Json => emit(args.out.as_deref(), &packing_to_json(&packing)),
        Format::Obj => emit(args.out.as_deref(), &obj(instance, &packing)),
        Format::Svg => {
            let dir = args
                .out
                .as_ref()
                .ok_or_else(|| Failure::usage("--format svg needs --out DIR"))?;
            fs::create_dir_all(dir).map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))?;
            let thickness = args.layer.clone().unwrap_or_else(|| args.knobs.c.clone());
            if thickness <= Rational::from_integer(0.into()) {
                return Err(Failure::usage("--layer must be positive"));
            }
            let svgs = svg_layers(instance, &packing, &thickness);
            for (i, svg) in svgs.iter().enumerate() {
                write(&dir.join(format!("layer_{i:03}.svg")), svg)?;
            }
            println!("wrote {} layer(s) to {}", svgs.len(), dir.display());
            Ok(())
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Solve(a) => solve_cmd(a, false),
        Command::Certify(a) => solve_cmd(a, true),
        Command::Oracle(a) => oracle_cmd(a),
        Command::Gen(a) => gen_cmd(a),
        Command::Export(a) => export_cmd(a),
    }
}
