//! Command-line driver for the synthesis engine.
//!
//! Exit codes: 0 = success (or verified correct), 1 = incorrect Skolem
//! functions (verify), 2 = timeout or resource cap, 3 = input error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bfsynth_core::circuit::Spec;
use bfsynth_core::engine::{self, Pipeline, SynthOptions, VerifyOutcome};
use bfsynth_core::frontend;
use bfsynth_core::goodness;
use bfsynth_core::phase1::{build_error_formula, OrderStrategy};
use bfsynth_core::sat::OracleBudget;
use bfsynth_core::{bdd, benchgen, nnf};

/// Default-timeout environment variable, in seconds.
const TIMEOUT_ENV: &str = "BFSYNTH_TIMEOUT";

#[derive(Parser)]
#[command(name = "bfsynth", about = "Boolean functional synthesis from relational specifications", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineArg {
    Nnf,
    Bdd,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Fanin,
    Index,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Aiger,
    Verilog,
}

#[derive(Args)]
struct SpecInput {
    /// Specification file: AIGER ASCII (.aag) or QDIMACS.
    spec_file: PathBuf,
    /// Symbol prefix that marks AIGER inputs as outputs X.
    #[arg(long, default_value = "x")]
    x_prefix: String,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize Skolem functions for a specification.
    Synth {
        #[command(flatten)]
        input: SpecInput,
        #[arg(long, value_enum, default_value = "nnf")]
        pipeline: PipelineArg,
        /// Wall-clock budget in seconds (default from BFSYNTH_TIMEOUT).
        #[arg(long)]
        timeout: Option<u64>,
        #[arg(long, default_value = "0")]
        seed: u64,
        #[arg(long, value_enum, default_value = "fanin")]
        order: OrderArg,
        /// Write the synthesized functions to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "aiger")]
        format: FormatArg,
        /// Counterexamples sampled per refinement round.
        #[arg(long, default_value = "8")]
        samples: usize,
        /// Cap for goodness-numerator enumeration during refinement.
        #[arg(long)]
        goodness_cap: Option<u64>,
        /// BDD node-table cap for the bdd pipeline.
        #[arg(long, default_value_t = bdd::DEFAULT_NODE_CAP)]
        bdd_cap: usize,
    },
    /// Check a Skolem-function file against a specification.
    Verify {
        #[command(flatten)]
        input: SpecInput,
        /// Skolem functions as a multi-output AIGER file over the inputs.
        skolem_file: PathBuf,
    },
    /// Report whether the renamed NNF form is weakly decomposable.
    CheckWdnnf {
        #[command(flatten)]
        input: SpecInput,
        /// Route the specification through the BDD compiler first.
        #[arg(long, value_enum, default_value = "nnf")]
        pipeline: PipelineArg,
    },
    /// Print the goodness ratio of a candidate vector.
    Goodness {
        #[command(flatten)]
        input: SpecInput,
        skolem_file: PathBuf,
        /// Enumeration cap on the numerator.
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Generate benchmark specifications.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    /// Clique-reduction family over n vertices (ground-truth sidecar
    /// written next to the output file).
    Clique {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cap on ground-truth rows.
        #[arg(long, default_value = "4096")]
        truth_rows: usize,
    },
    /// Equality family X = Y with n outputs.
    Equality {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_spec(input: &SpecInput) -> anyhow::Result<Spec> {
    let text = fs::read_to_string(&input.spec_file)?;
    let head = text.trim_start();
    if head.starts_with("aag") {
        let file = frontend::parse_aiger(&text)?;
        Ok(frontend::spec_from_aiger(&file, &input.x_prefix)?)
    } else {
        Ok(frontend::parse_qdimacs(&text)?)
    }
}

fn load_skolem(
    spec: &mut Spec,
    path: &Path,
) -> anyhow::Result<BTreeMap<bfsynth_core::VarId, bfsynth_core::NodeRef>> {
    let text = fs::read_to_string(path)?;
    Ok(frontend::skolem_from_aiger(spec, &text)?)
}

fn effective_timeout(flag: Option<u64>) -> Option<Duration> {
    flag.or_else(|| {
        std::env::var(TIMEOUT_ENV)
            .ok()
            .and_then(|v| v.parse::<u64>().ok())
    })
    .map(Duration::from_secs)
}

fn run() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Synth {
            input,
            pipeline,
            timeout,
            seed,
            order,
            out,
            format,
            samples,
            goodness_cap,
            bdd_cap,
        } => {
            let mut spec = load_spec(&input)?;
            let opts = SynthOptions {
                pipeline: match pipeline {
                    PipelineArg::Nnf => Pipeline::Nnf,
                    PipelineArg::Bdd => Pipeline::Bdd,
                    PipelineArg::Both => Pipeline::Both,
                },
                order: match order {
                    OrderArg::Fanin => OrderStrategy::FaninScore,
                    OrderArg::Index => OrderStrategy::Index,
                },
                seed,
                timeout: effective_timeout(timeout),
                samples_per_round: samples,
                goodness_cap,
                bdd_node_cap: bdd_cap,
            };
            let result = engine::synthesize(&mut spec, &opts)?;
            print!("{}", result.report.to_text());
            if let (Some(psi), Some(path)) = (&result.psi, &out) {
                let functions: Vec<_> = psi
                    .entries
                    .iter()
                    .map(|e| (e.var, e.final_fn))
                    .collect();
                let text = match format {
                    FormatArg::Aiger => {
                        frontend::write_skolem_aiger(&spec.dag, &spec.inputs, &functions)
                    }
                    FormatArg::Verilog => {
                        frontend::write_skolem_verilog(&spec.dag, &spec.inputs, &functions)
                    }
                };
                fs::write(path, text)?;
            }
            Ok(if result.status.is_done() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Verify { input, skolem_file } => {
            let mut spec = load_spec(&input)?;
            let psi = load_skolem(&mut spec, &skolem_file)?;
            match engine::verify(&mut spec, &psi, &OracleBudget::default())? {
                VerifyOutcome::Correct => {
                    println!("correct");
                    Ok(ExitCode::SUCCESS)
                }
                VerifyOutcome::Incorrect(y) => {
                    let mut parts = Vec::new();
                    for (v, b) in y.iter() {
                        parts.push(format!("{}={}", spec.dag.var_name(v), b as u8));
                    }
                    println!("incorrect counterexample {}", parts.join(" "));
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::CheckWdnnf { input, pipeline } => {
            let mut spec = load_spec(&input)?;
            let root = match pipeline {
                PipelineArg::Bdd => {
                    let order = bdd::static_order(&spec.dag, spec.root);
                    let (b, f) =
                        bdd::build_bdd(&spec.dag, spec.root, order, bdd::DEFAULT_NODE_CAP)?;
                    b.to_circuit(&mut spec.dag, f)
                }
                _ => spec.root,
            };
            let nnf_root = nnf::to_nnf(&spec.dag, root);
            let outputs = spec.outputs.clone();
            let hat = nnf::hat_transform(&mut spec.dag, nnf_root, &outputs);
            match nnf::check_wdnnf(&spec.dag, hat.root, &hat.origin_of) {
                nnf::WdnnfVerdict::Pass => println!("PASS"),
                nnf::WdnnfVerdict::Fail(w) => {
                    println!(
                        "FAIL literal {}{} under children {} and {} of an AND node",
                        if w.negated { "!" } else { "" },
                        spec.dag.var_name(w.var),
                        w.child_pos,
                        w.child_neg
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Goodness {
            input,
            skolem_file,
            cap,
        } => {
            let mut spec = load_spec(&input)?;
            let psi = load_skolem(&mut spec, &skolem_file)?;
            let root = spec.root;
            let outputs = spec.outputs.clone();
            let eps = build_error_formula(&mut spec.dag, root, &outputs, &psi);
            let g = goodness::goodness_ratio(
                &spec.dag,
                eps.root,
                &spec.inputs,
                cap,
                &OracleBudget::default(),
            )?;
            println!("goodness={g}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { family } => {
            match family {
                GenFamily::Clique { n, out, truth_rows } => {
                    let inst = benchgen::gen_clique_spec(n);
                    let path = out.unwrap_or_else(|| PathBuf::from(format!("clique_n{n}.aag")));
                    let spec = &inst.spec;
                    let inputs: Vec<_> = spec
                        .outputs
                        .iter()
                        .chain(spec.inputs.iter())
                        .copied()
                        .collect();
                    let text = frontend::write_circuit_aiger(
                        &spec.dag,
                        &inputs,
                        &[("F".to_string(), spec.root)],
                    );
                    fs::write(&path, text)?;
                    let rows = benchgen::clique_ground_truth(&inst, truth_rows);
                    let truth_path = path.with_extension("truth");
                    fs::write(&truth_path, benchgen::ground_truth_text(&rows))?;
                    println!("wrote {} and {}", path.display(), truth_path.display());
                }
                GenFamily::Equality { n, out } => {
                    let spec = benchgen::gen_equality_spec(n);
                    let path =
                        out.unwrap_or_else(|| PathBuf::from(format!("equality_n{n}.aag")));
                    let inputs: Vec<_> = spec
                        .outputs
                        .iter()
                        .chain(spec.inputs.iter())
                        .copied()
                        .collect();
                    let text = frontend::write_circuit_aiger(
                        &spec.dag,
                        &inputs,
                        &[("F".to_string(), spec.root)],
                    );
                    fs::write(&path, text)?;
                    println!("wrote {}", path.display());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(3)
        }
    }
}
