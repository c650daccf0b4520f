use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use serde::Serialize;
use telelab_core::entanglement::{self, EntanglementReport};
use telelab_core::states::{input_state, Channel};
use telelab_core::sweep::{
    family_params, figure_dataset, format_value, gnuplot_script, resolve_params, run_sweep,
    sweep_table,
};
use telelab_core::teleport::{self, OutputState, DEFAULT_SEED};
use telelab_core::verify::{self, Bound, VerifyOptions, VerifyReport};
use telelab_core::{
    AveragingMethod, ChannelKind, Complex, Error, FigureId, Metric, Param, SweepSpec, Table,
};

use crate::args::{
    FigureArgs, Format, MetricsArgs, Output, ParamFlags, SweepArgs, TeleportArgs, VerifyArgs,
};

#[derive(Serialize)]
struct MetricsJson<'a> {
    channel: &'a str,
    #[serde(flatten)]
    report: EntanglementReport,
}

#[derive(Serialize)]
struct TeleportJson {
    outcomes: Vec<OutcomeJson>,
    fidelity: f64,
}

#[derive(Serialize)]
struct OutcomeJson {
    tag: &'static str,
    prob: f64,
    #[serde(flatten)]
    payload: Payload,
}

/// `state` as `[re, im, re, im]` for pure outputs (null when the outcome is
/// impossible), `rho` as row-major `[re, im] x 4` for mixed ones.
#[derive(Serialize)]
#[serde(untagged)]
enum Payload {
    State { state: Option<Vec<f64>> },
    Rho { rho: Vec<f64> },
}

#[derive(Serialize)]
struct CheckJson {
    name: &'static str,
    passed: bool,
    max_error: f64,
    tol: f64,
    unit: &'static str,
    cases: usize,
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    checks: Vec<CheckJson>,
    notes: &'a [String],
    failed: usize,
}

#[derive(Debug)]
pub enum Failure {
    /// Bad flag value; exit 2.
    Usage(String),
    /// Unreadable or unwritable file; exit 3.
    Io(String),
    /// The verification suite reported failures; exit 1.
    Verify,
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Verify => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

/// Name the offending flag where the core error identifies one.
fn usage(e: Error) -> Failure {
    let flag = match &e {
        Error::OutOfRange { name, .. } => Some(*name),
        Error::EpsilonTooLarge { .. } => Some("eps"),
        Error::DegenerateBasis | Error::SeparableDegenerate => Some("r"),
        Error::InvalidSampleCount { .. } => Some("mc-samples"),
        _ => None,
    };
    match flag {
        Some(f) => Failure::Usage(format!("invalid value for --{f}: {e}")),
        None => Failure::Usage(e.to_string()),
    }
}

fn build_channel(kind: ChannelKind, flags: &ParamFlags) -> Result<Channel, Failure> {
    check_flags(kind, &flags.values(), None)?;
    let params = resolve_params(kind, &flags.values()).map_err(usage)?;
    params.build().map_err(usage)
}

/// Reject flags the family does not take and report missing required ones by flag name.
fn check_flags(
    kind: ChannelKind,
    values: &BTreeMap<Param, f64>,
    swept: Option<Param>,
) -> Result<(), Failure> {
    let allowed = family_params(kind);
    if let Some(extra) = values.keys().find(|p| !allowed.contains(p)) {
        return Err(Failure::Usage(format!(
            "--{extra} does not apply to channel `{kind}` (accepts {})",
            flag_list(allowed)
        )));
    }
    let have = |p: Param| values.contains_key(&p) || swept == Some(p);
    let missing = match kind {
        ChannelKind::Noes => (!have(Param::R)).then_some("--r"),
        ChannelKind::Werner | ChannelKind::RhoNew => (!have(Param::P)).then_some("--p"),
        ChannelKind::Nmes => (!have(Param::S)).then_some("--s"),
        ChannelKind::NonorthMixed => {
            if !have(Param::R) {
                Some("--r")
            } else if have(Param::G) == have(Param::Eps) {
                Some("exactly one of --g or --eps")
            } else {
                None
            }
        }
    };
    match missing {
        Some(m) => Err(Failure::Usage(format!("channel `{kind}` needs {m}"))),
        None => Ok(()),
    }
}

fn flag_list(params: &[Param]) -> String {
    params
        .iter()
        .map(|p| format!("--{p}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn emit(output: &Output, content: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => write_file(path, content),
        None => {
            let mut stdout = io::stdout().lock();
            match stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
            {
                Ok(()) => Ok(()),
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(Failure::Io(format!("stdout: {e}"))),
            }
        }
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn complex_pair(z: Complex) -> [f64; 2] {
    [z.re, z.im]
}

/// Columns padded to their widest cell, cells formatted like the CSV.
fn render_text(table: &Table) -> String {
    let cells: Vec<Vec<String>> = std::iter::once(table.columns.clone())
        .chain(table.rows.iter().map(|row| {
            row.iter()
                .map(|c| c.map(format_value).unwrap_or_else(|| "-".into()))
                .collect()
        }))
        .collect();
    let widths: Vec<usize> = (0..table.columns.len())
        .map(|j| cells.iter().map(|r| r[j].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &cells {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn render_table(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(table),
        Format::Text => render_text(table),
    }
}

pub fn metrics(args: &MetricsArgs) -> Result<(), Failure> {
    let channel = build_channel(args.channel, &args.params)?;
    let rep = entanglement::report(&channel).map_err(usage)?;
    let name = args.channel.name();
    let body = match args.output.format.unwrap_or(Format::Text) {
        Format::Text => format!(
            "channel      {name}\nconcurrence  {}\nnegativity   {}\nnu           {}\nuseful       {}\n",
            format_value(rep.concurrence),
            format_value(rep.negativity),
            format_value(rep.nu),
            rep.useful
        ),
        Format::Csv => format!(
            "channel,concurrence,negativity,nu,useful\n{name},{},{},{},{}\n",
            format_value(rep.concurrence),
            format_value(rep.negativity),
            format_value(rep.nu),
            rep.useful
        ),
        Format::Json => to_json(&MetricsJson {
            channel: name,
            report: rep,
        }),
    };
    emit(&args.output, &body)
}

pub fn teleport(args: &TeleportArgs) -> Result<(), Failure> {
    let channel = build_channel(args.channel, &args.params)?;
    let (theta_b, phi) = args.input_bloch;
    let input = input_state(theta_b, phi);
    let result = teleport::teleport(&input, &channel).map_err(usage)?;
    let overlaps = result
        .outcomes
        .iter()
        .map(|rec| {
            rec.output
                .map(|o| o.overlap_with(input.state()))
                .transpose()
        })
        .collect::<Result<Vec<Option<f64>>, Error>>()
        .map_err(usage)?;

    let body = match args.output.format.unwrap_or(Format::Text) {
        Format::Json => {
            let outcomes = result
                .outcomes
                .iter()
                .map(|rec| OutcomeJson {
                    tag: rec.outcome.tag(),
                    prob: rec.probability,
                    payload: match rec.output {
                        Some(OutputState::Pure(xi)) => Payload::State {
                            state: Some(
                                xi.amplitudes()
                                    .iter()
                                    .flat_map(|&z| complex_pair(z))
                                    .collect(),
                            ),
                        },
                        Some(OutputState::Mixed(rho)) => Payload::Rho {
                            rho: (0..2)
                                .flat_map(|i| (0..2).map(move |j| (i, j)))
                                .flat_map(|ij| complex_pair(rho[ij]))
                                .collect(),
                        },
                        None => Payload::State { state: None },
                    },
                })
                .collect();
            to_json(&TeleportJson {
                outcomes,
                fidelity: result.fidelity,
            })
        }
        Format::Csv => {
            let mut s = String::from("tag,prob,overlap\n");
            for (rec, ov) in result.outcomes.iter().zip(&overlaps) {
                s.push_str(&format!(
                    "{},{},{}\n",
                    rec.outcome.tag(),
                    format_value(rec.probability),
                    ov.map(format_value).unwrap_or_default()
                ));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (rec, ov) in result.outcomes.iter().zip(&overlaps) {
                s.push_str(&format!(
                    "{:<10} prob={:<16} overlap={}\n",
                    rec.outcome.tag(),
                    format_value(rec.probability),
                    ov.map(format_value).unwrap_or_else(|| "-".into())
                ));
            }
            s.push_str(&format!("fidelity {}\n", format_value(result.fidelity)));
            s
        }
    };
    emit(&args.output, &body)
}

pub fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let param: Param = args
        .param
        .parse()
        .map_err(|e: Error| Failure::Usage(format!("invalid value for --param: {e}")))?;
    let metrics = args
        .metrics
        .iter()
        .map(|m| m.trim().parse::<Metric>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(format!("invalid value for --metrics: {e}")))?;
    let numeric = match args.mc_samples {
        Some(samples) => AveragingMethod::MonteCarlo {
            samples,
            seed: Some(args.seed.unwrap_or(DEFAULT_SEED)),
        },
        None => AveragingMethod::Quadrature { nodes: args.nodes },
    };
    let spec = SweepSpec {
        family: args.channel,
        param,
        from: args.from,
        to: args.to,
        steps: args.steps,
        metrics,
        fixed: args.params.values(),
        numeric,
    };
    if !family_params(spec.family).contains(&param) {
        return Err(Failure::Usage(format!(
            "invalid value for --param: `{param}` does not apply to channel `{}` (accepts {})",
            spec.family,
            family_params(spec.family)
                .iter()
                .map(|p| p.name())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    if spec.fixed.contains_key(&param) {
        return Err(Failure::Usage(format!(
            "--{param} is the swept parameter; drop the fixed value"
        )));
    }
    check_flags(spec.family, &spec.fixed, Some(param))?;
    let rows = run_sweep(&spec).map_err(usage)?;
    let table = sweep_table(&spec, &rows);
    emit(
        &args.output,
        &render_table(&table, args.output.format.unwrap_or(Format::Csv)),
    )
}

pub fn figure(args: &FigureArgs) -> Result<(), Failure> {
    let fig = FigureId::new(args.id).map_err(usage)?;
    let format = args.output.format.unwrap_or(Format::Csv);
    if args.emit_gnuplot && format != Format::Csv {
        return Err(Failure::Usage(
            "--emit-gnuplot needs CSV output (--format csv)".into(),
        ));
    }
    let table = figure_dataset(fig, args.points, args.eps).map_err(usage)?;
    emit(&args.output, &render_table(&table, format))?;
    if args.emit_gnuplot {
        let out = args.output.out.as_ref().expect("clap enforces --out");
        let csv_name = out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        write_file(
            &out.with_extension("gp"),
            &gnuplot_script(fig, &csv_name, &table),
        )?;
    }
    Ok(())
}

fn verify_json(report: &VerifyReport) -> String {
    let checks = report
        .checks
        .iter()
        .map(|c| {
            let (tol, unit) = match c.bound {
                Bound::Absolute(t) => (t, "abs"),
                Bound::StdErrors(t) => (t, "std_errors"),
            };
            CheckJson {
                name: c.name,
                passed: c.passed(),
                max_error: c.max_error,
                tol,
                unit,
                cases: c.cases,
            }
        })
        .collect();
    to_json(&VerifyJson {
        checks,
        notes: &report.notes,
        failed: report.checks.iter().filter(|c| !c.passed()).count(),
    })
}

pub fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let opts = VerifyOptions {
        tol: args.tol,
        seed: args.seed.unwrap_or(DEFAULT_SEED),
        mc_samples: args.mc_samples,
        quadrature_nodes: args.nodes,
    };
    let report = verify::run(&opts).map_err(usage)?;
    let body = match args.output.format.unwrap_or(Format::Text) {
        Format::Json => verify_json(&report),
        Format::Text | Format::Csv => report.render(),
    };
    emit(&args.output, &body)?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}
