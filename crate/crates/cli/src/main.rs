use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bendext::cli_io::{
    chord_visibility_highlights, generate, render_svg, solution_svg_options, to_json_pretty, DrawingDoc, Family,
    GenSpec, SvgOptions,
};
use bendext::extension_solver::{solve, SolveError, Verdict};
use bendext::geometry_core::Rational;
use bendext::instance_model::Instance;
use bendext::verifier::{grid_oracle, oracle_budget_from_env, validate_drawing, OracleError, OracleResult};
use clap::{Parser, Subcommand};
use serde_json::json;

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "bendext", version, about = "One-bend drawing extension for outerplanar graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance and write the drawing or the NO witness.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// Drawing JSON destination; standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the refinement records as a JSON array, to the given file
        /// or to standard error when no file is named.
        #[arg(long, num_args = 0..=1, default_missing_value = "-", value_name = "FILE")]
        trace: Option<String>,
    },
    /// Check a drawing against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        drawing: PathBuf,
    },
    /// Exhaustive search for a drawing with bends on a grid.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        resolution: u32,
        /// Node budget; defaults to BENDEXT_ORACLE_BUDGET or 10^7.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Generate an instance.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        /// Probability that an outer edge gets a bend, as a rational.
        #[arg(long, default_value = "0")]
        outer_bend_prob: Rational,
        #[arg(long)]
        output: PathBuf,
    },
    /// Render the visibility regions of two vertices and their overlap.
    Vis {
        #[arg(long)]
        instance: PathBuf,
        /// Two vertex indices, "u,v".
        #[arg(long)]
        chord: String,
        #[arg(long)]
        svg: PathBuf,
    },
}

/// A failure that ends the command with the given exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Failure {
        Failure {
            code: if e.is_internal() { EXIT_INTERNAL } else { EXIT_INPUT },
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Instance::from_json(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Writes to standard output, ignoring a closed pipe.
fn emit(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

fn with_newline(mut s: String) -> String {
    s.push('\n');
    s
}

fn run_solve(input: &Path, output: Option<&Path>, svg: Option<&Path>, trace: Option<&str>) -> Result<u8, Failure> {
    let inst = load_instance(input)?;
    let sol = solve(&inst)?;
    let doc = with_newline(DrawingDoc::from_solution(&sol).to_json());
    match output {
        Some(p) => write(p, &doc)?,
        None => emit(&doc),
    }
    if let Some(p) = svg {
        let drawing = match &sol.verdict {
            Verdict::Yes(d) => Some(d),
            Verdict::No(_) => None,
        };
        write(p, &render_svg(&inst, drawing, &solution_svg_options(&inst, &sol)))?;
    }
    if let Some(t) = trace {
        let records = with_newline(to_json_pretty(&sol.trace()));
        if t == "-" {
            eprint!("{records}");
        } else {
            write(Path::new(t), &records)?;
        }
    }
    Ok(if sol.is_yes() { EXIT_YES } else { EXIT_NO })
}

fn run_verify(instance: &Path, drawing: &Path) -> Result<u8, Failure> {
    let inst = load_instance(instance)?;
    let doc = DrawingDoc::from_json(&read(drawing)?).map_err(|e| Failure::input(format!("{}: {e}", drawing.display())))?;
    let report = validate_drawing(&inst, &doc.drawing());
    emit(&with_newline(to_json_pretty(&report)));
    Ok(if report.ok { EXIT_YES } else { EXIT_NO })
}

fn run_oracle(instance: &Path, resolution: u32, budget: Option<u64>) -> Result<u8, Failure> {
    let inst = load_instance(instance)?;
    let budget = budget.unwrap_or_else(oracle_budget_from_env);
    match grid_oracle(&inst, resolution, budget) {
        Ok(OracleResult::Found(d)) => {
            emit(&with_newline(to_json_pretty(&json!({"result": "FOUND", "chords": d.chords}))));
            Ok(EXIT_YES)
        }
        Ok(OracleResult::NotFound) => {
            emit(&with_newline(to_json_pretty(&json!({"result": "NOT_FOUND"}))));
            Ok(EXIT_NO)
        }
        Err(e @ OracleError::Instance(_)) => Err(Failure::input(e.to_string())),
        Err(e) => Err(Failure::input(format!("{e} (resolution {resolution})"))),
    }
}

fn run_gen(spec: GenSpec, output: &Path) -> Result<u8, Failure> {
    let inst = generate(&spec).map_err(|e| Failure::input(e.to_string()))?;
    write(output, &with_newline(inst.to_json()))?;
    Ok(EXIT_YES)
}

fn parse_chord(s: &str, n: usize) -> Result<[usize; 2], Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Failure::input(format!("--chord expects two vertex indices \"u,v\" below {n}, got {s:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let u: usize = parts[0].parse().map_err(|_| bad())?;
    let v: usize = parts[1].parse().map_err(|_| bad())?;
    if u >= n || v >= n || u == v {
        return Err(bad());
    }
    Ok([u, v])
}

fn run_vis(instance: &Path, chord: &str, svg: &Path) -> Result<u8, Failure> {
    let inst = load_instance(instance)?;
    let edge = parse_chord(chord, inst.n())?;
    let highlights = chord_visibility_highlights(&inst, inst.boundary(), edge);
    let common = highlights.len().saturating_sub(2);
    let opts = SvgOptions {
        highlights,
        witness_edge: Some(edge),
        ..SvgOptions::default()
    };
    write(svg, &render_svg(&inst, None, &opts))?;
    emit(&with_newline(to_json_pretty(&json!({"edge": edge, "common_pieces": common}))));
    Ok(EXIT_YES)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            input,
            output,
            svg,
            trace,
        } => run_solve(&input, output.as_deref(), svg.as_deref(), trace.as_deref()),
        Command::Verify { instance, drawing } => run_verify(&instance, &drawing),
        Command::Oracle {
            instance,
            resolution,
            budget,
        } => run_oracle(&instance, resolution, budget),
        Command::Gen {
            family,
            n,
            m,
            seed,
            outer_bend_prob,
            output,
        } => run_gen(GenSpec::new(family, n, m, seed).with_outer_bends(outer_bend_prob), &output),
        Command::Vis { instance, chord, svg } => run_vis(&instance, &chord, &svg),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
