use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use telelab_core::states::ChannelKind;
use telelab_core::Param;

#[derive(Debug, Parser)]
#[command(name = "telelab", version, about = "Teleportation channel-quality lab")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concurrence, negativity, Horodecki nu and the usefulness flag of a channel.
    Metrics(MetricsArgs),
    /// Teleport one Bloch-sphere input through a channel.
    Teleport(TeleportArgs),
    /// Evaluate metrics over a one-parameter grid.
    Sweep(SweepArgs),
    /// Emit the dataset behind one of the five comparison figures.
    Figure(FigureArgs),
    /// Run the oracle-vs-formula suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

/// Channel parameters shared by every subcommand that builds a channel.
#[derive(Debug, Clone, Args)]
pub struct ParamFlags {
    /// Overlap magnitude of the non-orthogonal pair.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Overlap phase; accepts `pi`, `pi/2`, `3pi/4`, `-pi`.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Mixing weight (Werner noise or GHZ weight).
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub p: Option<f64>,
    /// NMES amplitude parameter.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Pure-state weight of the non-orthogonal mixture.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true, conflicts_with = "eps")]
    pub g: Option<f64>,
    /// Excess weight above the separability threshold.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub eps: Option<f64>,
}

impl ParamFlags {
    pub fn values(&self) -> BTreeMap<Param, f64> {
        [
            (Param::R, self.r),
            (Param::Theta, self.theta),
            (Param::P, self.p),
            (Param::S, self.s),
            (Param::G, self.g),
            (Param::Eps, self.eps),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// noes, werner, nmes, nonorth-mixed or rho-new.
    #[arg(long, value_parser = parse_channel)]
    pub channel: ChannelKind,
    #[command(flatten)]
    pub params: ParamFlags,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    /// noes, werner, nmes, nonorth-mixed or rho-new.
    #[arg(long, value_parser = parse_channel)]
    pub channel: ChannelKind,
    #[command(flatten)]
    pub params: ParamFlags,
    /// Input qubit as `theta_b,phi`.
    #[arg(long, value_parser = parse_bloch, allow_hyphen_values = true)]
    pub input_bloch: (f64, f64),
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// noes, werner, nmes, nonorth-mixed or rho-new.
    #[arg(long, value_parser = parse_channel)]
    pub channel: ChannelKind,
    /// Swept parameter name (r, theta, p, s, g, eps).
    #[arg(long)]
    pub param: String,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long)]
    pub steps: usize,
    /// Comma-separated metric names; CSV columns follow this order.
    #[arg(long, value_delimiter = ',', required = true)]
    pub metrics: Vec<String>,
    /// Fixed values of the remaining parameters.
    #[command(flatten)]
    pub params: ParamFlags,
    /// Quadrature nodes per axis for avg_fidelity_numeric.
    #[arg(long, default_value_t = 64)]
    pub nodes: usize,
    /// Use Monte Carlo with this many samples instead of quadrature.
    #[arg(long)]
    pub mc_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub id: u8,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Overrides the caption value for figures 4 and 5.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    /// Also write a gnuplot script next to `--out`.
    #[arg(long, requires = "out")]
    pub emit_gnuplot: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Replace every absolute tolerance.
    #[arg(long, value_parser = parse_real)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = 64)]
    pub nodes: usize,
    #[command(flatten)]
    pub output: Output,
}

/// Real number or multiple of pi: `0.3`, `pi`, `-pi/2`, `3pi/4`, `2*pi`, `1e-3`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let lower = body.to_ascii_lowercase().replace('π', "pi");
    let value = match lower.find("pi") {
        None => body
            .parse::<f64>()
            .map_err(|_| format!("`{s}` is not a number"))?,
        Some(at) => {
            let coef = lower[..at].trim_end_matches('*');
            let coef = if coef.is_empty() {
                1.0
            } else {
                coef.parse::<f64>()
                    .map_err(|_| format!("bad multiplier in `{s}`"))?
            };
            let rest = &lower[at + 2..];
            let div = match rest.strip_prefix('/') {
                Some(d) => d
                    .parse::<f64>()
                    .map_err(|_| format!("bad divisor in `{s}`"))?,
                None if rest.is_empty() => 1.0,
                None => return Err(format!("cannot parse `{s}`")),
            };
            if div == 0.0 {
                return Err(format!("division by zero in `{s}`"));
            }
            coef * std::f64::consts::PI / div
        }
    };
    if !value.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(sign * value)
}

fn parse_channel(s: &str) -> Result<ChannelKind, String> {
    s.parse().map_err(|e: telelab_core::Error| e.to_string())
}

fn parse_bloch(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `theta_b,phi`, got `{s}`"))?;
    Ok((parse_real(a)?, parse_real(b)?))
}

/// Inline `--args-from <file>` (or `--args-from=<file>`) as whitespace-separated
/// tokens; lines starting with `#` are skipped. Not recursive.
pub fn expand_response_files(args: Vec<OsString>) -> std::io::Result<Vec<OsString>> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let path = match a.to_str() {
            Some("--args-from") => match it.next() {
                Some(p) => PathBuf::from(p),
                None => {
                    out.push(a);
                    continue;
                }
            },
            Some(s) if s.starts_with("--args-from=") => PathBuf::from(&s["--args-from=".len()..]),
            _ => {
                out.push(a);
                continue;
            }
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        out.extend(
            text.lines()
                .filter(|l| !l.trim_start().starts_with('#'))
                .flat_map(str::split_whitespace)
                .map(OsString::from),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angle_literals() {
        assert_eq!(parse_real("0.3").unwrap(), 0.3);
        assert_eq!(parse_real("pi").unwrap(), PI);
        assert_eq!(parse_real("-pi").unwrap(), -PI);
        assert_eq!(parse_real("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_real("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_real("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_real("π").unwrap(), PI);
        assert_eq!(parse_real("1e-3").unwrap(), 1e-3);
        assert!(parse_real("pi/0").is_err());
        assert!(parse_real("pie").is_err());
        assert!(parse_real("nan").is_err());
        assert!(parse_real("x").is_err());
    }

    #[test]
    fn bloch_pair() {
        assert_eq!(parse_bloch("pi,0").unwrap(), (PI, 0.0));
        assert!(parse_bloch("1.0").is_err());
    }

    #[test]
    fn response_file_expands_in_place() {
        let dir = std::env::temp_dir().join(format!("telelab-args-{}", std::process::id()));
        std::fs::write(&dir, "# comment\n--channel werner\n--p 0.5\n").unwrap();
        let args = vec![
            OsString::from("telelab"),
            OsString::from("metrics"),
            OsString::from("--args-from"),
            dir.clone().into_os_string(),
            OsString::from("--format"),
            OsString::from("json"),
        ];
        let got = expand_response_files(args).unwrap();
        std::fs::remove_file(&dir).unwrap();
        let got: Vec<_> = got.iter().map(|s| s.to_str().unwrap()).collect();
        assert_eq!(
            got,
            [
                "telelab",
                "metrics",
                "--channel",
                "werner",
                "--p",
                "0.5",
                "--format",
                "json"
            ]
        );
    }
}
