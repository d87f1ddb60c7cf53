use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mdpforge::env::{run_random_episode, Episode};
use mdpforge::graph::{to_dot, to_graph};
use mdpforge::solver::report::{json_number, SolveReport, REPORT_VERSION};
use mdpforge::{examples, load_spec_with, solver, ValidateOptions, ValidatedMdp};

#[derive(Parser)]
#[command(name = "mdpforge", version, about = "Define, solve, render and simulate finite MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a model file and print its size.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Compute optimal state values and the Q table.
    Solve {
        #[command(flatten)]
        input: Input,
        /// Override the file's discount factor.
        #[arg(long, value_parser = parse_gamma)]
        gamma: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Write the model as a Graphviz DOT graph.
    Render {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// Also run the external `dot` tool to produce a PNG next to the output.
        #[arg(long, requires = "output")]
        png: bool,
    },
    /// Run random-policy episodes and log them as JSON lines.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        episodes: u64,
        #[arg(long, default_value_t = mdpforge::env::DEFAULT_STEP_CAP)]
        max_steps: usize,
        #[arg(long, value_enum, default_value_t = Policy::Random)]
        policy: Policy,
        /// Format of the closing summary line.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// List the bundled example models, or print one of them.
    Examples {
        name: Option<String>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Input {
    path: PathBuf,
    /// Fill unspecified (state, action) pairs with a zero-reward self-loop.
    #[arg(long)]
    allow_missing: bool,
}

#[derive(Args)]
struct Output {
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Random,
}

fn parse_gamma(text: &str) -> Result<f64, String> {
    let gamma: f64 = text.parse().map_err(|e| format!("{e}"))?;
    if gamma > 0.0 && gamma <= 1.0 {
        Ok(gamma)
    } else {
        Err(format!("gamma must be in (0, 1], got {gamma}"))
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn semantic(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

fn load(input: &Input) -> Result<ValidatedMdp, Failure> {
    let path = input.path.display();
    let text = std::fs::read_to_string(&input.path).map_err(|e| Failure::io(format!("{path}: {e}")))?;
    let options = ValidateOptions { allow_missing: input.allow_missing };
    load_spec_with(&text, options).map_err(|e| {
        let message = format!("{path}: {e}");
        if e.is_semantic() {
            Failure::semantic(message)
        } else {
            Failure::io(message)
        }
    })
}

fn emit(output: &Output, text: &str) -> Result<(), Failure> {
    match &output.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::io(format!("stdout: {e}")))
        }
    }
}

fn validate(input: &Input) -> Result<String, Failure> {
    let m = load(input)?;
    let transitions: usize = (0..m.num_states())
        .flat_map(|s| (0..m.num_actions()).map(move |a| (s, a)))
        .map(|(s, a)| m.transition_row(s, a).iter().filter(|&&p| p > 0.0).count())
        .sum();
    Ok(format!(
        "{} states, {} actions, {} transitions\n",
        m.num_states(),
        m.num_actions(),
        transitions
    ))
}

fn solve(input: &Input, gamma: Option<f64>, format: Format) -> Result<String, Failure> {
    let mut m = load(input)?;
    if let Some(gamma) = gamma {
        m = m.with_discount(gamma).map_err(|e| Failure::semantic(e.to_string()))?;
    }
    let sol = solver::solve(&m).map_err(|e| Failure::semantic(e.to_string()))?;
    let report = SolveReport::new(&m, sol.v, sol.q);
    Ok(match format {
        Format::Json => format!("{}\n", report.to_json()),
        Format::Text => report.to_text(),
    })
}

fn render_png(dot: &str, target: &Path) -> Result<(), Failure> {
    let png = target.with_extension("png");
    let mut child = Command::new("dot")
        .arg("-Tpng")
        .arg("-o")
        .arg(&png)
        .stdin(Stdio::piped())
        .spawn()
        .map_err(|e| Failure::io(format!("cannot run `dot`: {e}")))?;
    child
        .stdin
        .take()
        .expect("piped stdin")
        .write_all(dot.as_bytes())
        .map_err(|e| Failure::io(format!("dot: {e}")))?;
    let status = child.wait().map_err(|e| Failure::io(format!("dot: {e}")))?;
    if status.success() {
        Ok(())
    } else {
        Err(Failure::io(format!("dot exited with {status}")))
    }
}

fn summary(episodes: &[Episode], seed: u64, format: Format) -> String {
    let n = episodes.len() as f64;
    let mean_return = episodes.iter().map(|e| e.total_reward).sum::<f64>() / n;
    let mean_length = episodes.iter().map(|e| e.len() as f64).sum::<f64>() / n;
    let truncated = episodes.iter().filter(|e| e.truncated).count();
    match format {
        Format::Json => format!(
            "{}\n",
            serde_json::json!({
                "version": REPORT_VERSION,
                "summary": {
                    "episodes": episodes.len(),
                    "seed": seed,
                    "mean_return": json_number(mean_return),
                    "mean_length": json_number(mean_length),
                    "truncated": truncated,
                }
            })
        ),
        Format::Text => format!(
            "episodes={} seed={seed} mean_return={} mean_length={} truncated={truncated}\n",
            episodes.len(),
            json_number(mean_return),
            json_number(mean_length)
        ),
    }
}

fn simulate(input: &Input, seed: u64, episodes: u64, max_steps: usize, format: Format) -> Result<String, Failure> {
    let m = Arc::new(load(input)?);
    let runs: Vec<Episode> = (0..episodes)
        .map(|i| run_random_episode(m.clone(), seed.wrapping_add(i), max_steps))
        .collect();
    let mut out = String::new();
    for episode in &runs {
        for record in &episode.records {
            let _ = writeln!(out, "{}", record.to_json_line());
        }
    }
    out.push_str(&summary(&runs, seed, format));
    Ok(out)
}

fn list_examples(name: Option<&str>) -> Result<String, Failure> {
    match name {
        None => Ok(examples::ALL.iter().map(|e| format!("{}\n", e.name)).collect()),
        Some(name) => examples::find(name)
            .map(|e| e.source.to_owned())
            .ok_or_else(|| Failure::io(format!("unknown example `{name}`"))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Cmd::Validate { input } => {
            let text = validate(&input)?;
            emit(&Output { output: None }, &text)
        }
        Cmd::Solve { input, gamma, format, output } => emit(&output, &solve(&input, gamma, format)?),
        Cmd::Render { input, output, png } => {
            let dot = to_dot(&to_graph(&load(&input)?));
            emit(&output, &dot)?;
            match (&output.output, png) {
                (Some(path), true) => render_png(&dot, path),
                _ => Ok(()),
            }
        }
        Cmd::Simulate {
            input,
            seed,
            episodes,
            max_steps,
            policy: Policy::Random,
            format,
            output,
        } => emit(&output, &simulate(&input, seed, episodes, max_steps, format)?),
        Cmd::Examples { name, output } => emit(&output, &list_examples(name.as_deref())?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
