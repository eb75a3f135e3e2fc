//! Command-line front end: one subcommand per verification step, a pipeline
//! command composing them in order, and a corpus runner.
//!
//! Exit codes are a stable contract: 0 for success, 1 for a negative
//! mathematical verdict, 2 for usage, parse, or capacity errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kr_workbench::corpus;
use kr_workbench::frame::{pasch_iff_modular, TernaryFrame};
use kr_workbench::io::{AlgebraFile, FrameFile, InputFile, LatticeFile};
use kr_workbench::lattice::{Lattice, DEFAULT_MAX_N};
use kr_workbench::monoid::{verify_maddux, BooleanMonoid, CheckGates, MonoidError};
use kr_workbench::morphism::{
    build_uv, check_atom_map_conditions, extend_atom_map, inclusion_atom_map,
    is_epic_subalgebra_bounded, verify_embedding_commutes, verify_inclusion_identities, MorphError,
    NamedAlgebra,
};
use kr_workbench::report::{hasse_dot, EmbeddingReport, RaEpiReport};
use kr_workbench::set::ElemSet;
use kr_workbench::EpiOutcome;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "krwb",
    version,
    about = "Finite lattice / frame / algebra workbench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Carrier cap for lattices and frames (env WORKBENCH_MAX_N, default 16)
    #[arg(long, global = true, value_name = "N")]
    max_n: Option<usize>,
    /// Atom bound for element-level triple checks in the axiom verifier
    #[arg(long, global = true, value_name = "ATOMS")]
    max_exhaustive: Option<usize>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the cover diagram of the input lattice as DOT
    #[arg(long, global = true, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// JSON array of target lattices for epi tests
    #[arg(long, global = true, value_name = "FILE")]
    targets: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the modular law on a lattice file
    CheckModular { path: PathBuf },
    /// Build the ternary frame of a lattice and check the frame axioms
    BuildFrame { path: PathBuf },
    /// Build the complex algebra of a lattice or frame file
    BuildCm { path: PathBuf },
    /// Verify the ten algebra axioms and the dense/symmetric/abelian flags
    CheckAxioms { path: PathBuf },
    /// Compute the lattice of reflexive equivalence elements
    ELattice { path: PathBuf },
    /// Check that equivalence elements coincide with ideals, with matching joins and meets
    VerifyMaddux { path: PathBuf },
    /// Build and fully verify the embedding induced by a complete sublattice
    Embed {
        path: PathBuf,
        /// Sublattice as a comma-separated element list
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
    },
    /// Build the generated subalgebra pair and check properness
    BuildUv {
        path: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
    },
    /// Bounded epi test for the generated subalgebra pair
    EpiTest {
        path: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
    },
    /// Run the whole verification chain on one lattice
    Pipeline {
        path: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
    },
    /// Run the invariant suites over a directory of lattice files
    /// (bundled corpus when omitted)
    Corpus { dir: Option<PathBuf> },
}

#[derive(Debug, Default)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx {
    cap: usize,
    gates: CheckGates,
    format: Format,
    dot: Option<PathBuf>,
    targets: Option<PathBuf>,
    out: String,
}

/// Usage-level failure; rendered to stderr with exit code 2.
struct UsageError(String);

/// Negative mathematical verdict; the report is already on stdout.
enum CmdOutcome {
    Pass,
    Negative,
}

pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => RunOutput {
                    code: EXIT_OK,
                    stdout: rendered,
                    stderr: String::new(),
                },
                _ => RunOutput {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: rendered,
                },
            };
        }
    };

    let cap = match resolve_cap(cli.max_n) {
        Ok(cap) => cap,
        Err(UsageError(msg)) => {
            return RunOutput {
                code: EXIT_USAGE,
                stdout: String::new(),
                stderr: format!("error: {msg}\n"),
            }
        }
    };
    let gates = match cli.max_exhaustive {
        Some(t) => CheckGates::from_max_exhaustive(t),
        None => CheckGates::default(),
    };
    let mut ctx = Ctx {
        cap,
        gates,
        format: cli.format,
        dot: cli.dot,
        targets: cli.targets,
        out: String::new(),
    };

    let result = dispatch(&cli.command, &mut ctx);
    match result {
        Ok(CmdOutcome::Pass) => RunOutput {
            code: EXIT_OK,
            stdout: ctx.out,
            stderr: String::new(),
        },
        Ok(CmdOutcome::Negative) => RunOutput {
            code: EXIT_NEGATIVE,
            stdout: ctx.out,
            stderr: String::new(),
        },
        Err(UsageError(msg)) => RunOutput {
            code: EXIT_USAGE,
            stdout: ctx.out,
            stderr: format!("error: {msg}\n"),
        },
    }
}

fn resolve_cap(flag: Option<usize>) -> Result<usize, UsageError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("WORKBENCH_MAX_N") {
        Ok(v) => v
            .parse::<usize>()
            .map_err(|_| UsageError(format!("WORKBENCH_MAX_N is not a number: {v}"))),
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

fn dispatch(command: &Command, ctx: &mut Ctx) -> Result<CmdOutcome, UsageError> {
    match command {
        Command::CheckModular { path } => cmd_check_modular(ctx, path),
        Command::BuildFrame { path } => cmd_build_frame(ctx, path),
        Command::BuildCm { path } => cmd_build_cm(ctx, path),
        Command::CheckAxioms { path } => cmd_check_axioms(ctx, path),
        Command::ELattice { path } => cmd_e_lattice(ctx, path),
        Command::VerifyMaddux { path } => cmd_verify_maddux(ctx, path),
        Command::Embed { path, k } => cmd_embed(ctx, path, k),
        Command::BuildUv { path, k } => cmd_build_uv(ctx, path, k),
        Command::EpiTest { path, k } => cmd_epi_test(ctx, path, k),
        Command::Pipeline { path, k } => cmd_pipeline(ctx, path, k),
        Command::Corpus { dir } => cmd_corpus(ctx, dir.as_deref()),
    }
}

fn read_file(path: &Path) -> Result<String, UsageError> {
    std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))
}

fn load_input(ctx: &Ctx, path: &Path) -> Result<InputFile, UsageError> {
    let text = read_file(path)?;
    let input = kr_workbench::io::parse_input(&text)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    if let InputFile::Lattice(file) = &input {
        if let Some(dot_path) = &ctx.dot {
            let lattice = file
                .to_lattice(ctx.cap)
                .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            let name = if file.name.is_empty() {
                "lattice"
            } else {
                &file.name
            };
            std::fs::write(dot_path, hasse_dot(name, &lattice))
                .map_err(|e| UsageError(format!("cannot write {}: {e}", dot_path.display())))?;
        }
    }
    Ok(input)
}

fn load_lattice(ctx: &Ctx, path: &Path) -> Result<(String, Lattice), UsageError> {
    match load_input(ctx, path)? {
        InputFile::Lattice(file) => {
            let lattice = file
                .to_lattice(ctx.cap)
                .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            let name = if file.name.is_empty() {
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "lattice".into())
            } else {
                file.name
            };
            Ok((name, lattice))
        }
        _ => Err(UsageError(format!(
            "{}: expected a lattice file",
            path.display()
        ))),
    }
}

fn parse_k(lattice: &Lattice, k: &[usize]) -> Result<ElemSet, UsageError> {
    let mut set = ElemSet::empty(lattice.n());
    for &e in k {
        if e >= lattice.n() {
            return Err(UsageError(format!(
                "sublattice element {e} out of range for carrier size {}",
                lattice.n()
            )));
        }
        set.insert(e);
    }
    if set.is_empty() {
        return Err(UsageError("sublattice element list is empty".into()));
    }
    Ok(set)
}

fn emit_json<T: Serialize>(ctx: &mut Ctx, value: &T) {
    let json = serde_json::to_string_pretty(value).expect("report serializes");
    let _ = writeln!(ctx.out, "{json}");
}

fn cmd_check_modular(ctx: &mut Ctx, path: &Path) -> Result<CmdOutcome, UsageError> {
    let (name, lattice) = load_lattice(ctx, path)?;
    let violation = lattice.modular_violation();

    #[derive(Serialize)]
    struct Report<'a> {
        name: &'a str,
        n: usize,
        modular: bool,
        counterexample: Option<kr_workbench::lattice::ModularityViolation>,
    }
    match ctx.format {
        Format::Json => emit_json(
            ctx,
            &Report {
                name: &name,
                n: lattice.n(),
                modular: violation.is_none(),
                counterexample: violation,
            },
        ),
        Format::Text => match violation {
            None => {
                let _ = writeln!(ctx.out, "{name}: modular");
            }
            Some(v) => {
                let _ = writeln!(ctx.out, "{name}: not modular ({v})");
            }
        },
    }
    Ok(if violation.is_none() {
        CmdOutcome::Pass
    } else {
        CmdOutcome::Negative
    })
}

fn cmd_build_frame(ctx: &mut Ctx, path: &Path) -> Result<CmdOutcome, UsageError> {
    let (name, lattice) = load_lattice(ctx, path)?;
    let frame = TernaryFrame::from_lattice(&lattice);
    let report = frame.check_axioms();

    #[derive(Serialize)]
    struct Report<'a> {
        name: &'a str,
        frame: FrameFile,
        axioms: kr_workbench::FrameAxiomReport,
    }
    match ctx.format {
        Format::Json => emit_json(
            ctx,
            &Report {
                name: &name,
                frame: FrameFile::from_frame(&frame),
                axioms: report.clone(),
            },
        ),
        Format::Text => {
            let _ = writeln!(
                ctx.out,
                "{name}: frame with {} points, {} triples, zero = {}",
                frame.n(),
                frame.len(),
                frame.zero()
            );
            let _ = write!(ctx.out, "{report}");
        }
    }
    Ok(if report.all_pass() {
        CmdOutcome::Pass
    } else {
        CmdOutcome::Negative
    })
}

/// Lattice or frame input to a complex algebra; algebra input passes through.
fn input_to_algebra(ctx: &Ctx, path: &Path) -> Result<Result<BooleanMonoid, String>, UsageError> {
    let algebra = match load_input(ctx, path)? {
        InputFile::Lattice(file) => {
            let lattice = file
                .to_lattice(ctx.cap)
                .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            BooleanMonoid::complex_algebra(&TernaryFrame::from_lattice(&lattice))
        }
        InputFile::Frame(file) => {
            let frame = file
                .to_frame(ctx.cap)
                .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            BooleanMonoid::complex_algebra(&frame)
        }
        InputFile::Algebra(file) => file.to_algebra(),
    };
    match algebra {
        Ok(a) => Ok(Ok(a)),
        Err(MonoidError::FrameInvalid(msg)) => Ok(Err(msg)),
        Err(e) => Err(UsageError(format!("{}: {e}", path.display()))),
    }
}

fn cmd_build_cm(ctx: &mut Ctx, path: &Path) -> Result<CmdOutcome, UsageError> {
    match input_to_algebra(ctx, path)? {
        Ok(algebra) => {
            let dump = AlgebraFile::from_algebra(&algebra);
            match ctx.format {
                Format::Json => emit_json(ctx, &dump),
                Format::Text => {
                    let _ = writeln!(
                        ctx.out,
                        "complex algebra: {} atoms, {} elements, identity {}",
                        algebra.atoms(),
                        algebra.element_count(),
                        algebra.identity()
                    );
                }
            }
            Ok(CmdOutcome::Pass)
        }
        Err(msg) => {
            let _ = writeln!(ctx.out, "cannot build complex algebra: {msg}");
            Ok(CmdOutcome::Negative)
        }
    }
}

fn cmd_check_axioms(ctx: &mut Ctx, path: &Path) -> Result<CmdOutcome, UsageError> {
    let algebra = match input_to_algebra(ctx, path)? {
        Ok(a) => a,
        Err(msg) => {
            let _ = writeln!(ctx.out, "cannot build complex algebra: {msg}");
            return Ok(CmdOutcome::Negative);
        }
    };
    let report = algebra
        .check_axioms(&ctx.gates)
        .map_err(|e| UsageError(e.to_string()))?;
    match ctx.format {
        Format::Json => emit_json(ctx, &report),
        Format::Text => {
            let _ = write!(ctx.out, "{report}");
        }
    }
    Ok(if report.all_pass() {
        CmdOutcome::Pass
    } else {
        CmdOutcome::Negative
    })
}

fn cmd_e_lattice(ctx: &mut Ctx, path: &Path) -> Result<CmdOutcome, UsageError> {
    let algebra = match input_to_algebra(ctx, path)? {
        Ok(a) => a,
        Err(msg) => {
            let _ = writeln!(ctx.out, "cannot build complex algebra: {msg}");
            return Ok(CmdOutcome::Negative);
        }
    };
    match algebra.equivalence_lattice() {
        Ok(el) => {
            #[derive(Serialize)]
            struct Report {
                elements: Vec<ElemSet>,
                lattice: LatticeFile,
            }
            match ctx.format {
                Format::Json => emit_json(
                    ctx,
                    &Report {
                        elements: el.elements.clone(),
                        lattice: LatticeFile::from_lattice("equivalence-lattice", &el.lattice),
                    },
                ),
                Format::Text => {
                    let _ = writeln!(
                        ctx.out,
                        "{} equivalence elements; lattice is modular and bounded",
                        el.elements.len()
                    );
                    for (i, e) in el.elements.iter().enumerate() {
                        let _ = writeln!(ctx.out, "  [{i}] {e}");
                    }
                }
            }
            Ok(CmdOutcome::Pass)
        }
        Err(e @ (MonoidError::NotAbelian { .. } | MonoidError::ClosureFailure(_))) => {
            let _ = writeln!(ctx.out, "equivalence lattice unavailable: {e}");
            Ok(CmdOutcome::Negative)
        }
        Err(e) => Err(UsageError(e.to_string())),
    }
}

fn cmd_verify_maddux(ctx: &mut Ctx, path: &Path) -> Result<CmdOutcome, UsageError> {
    let (name, lattice) = load_lattice(ctx, path)?;
    match verify_maddux(&lattice) {
        Ok(id) => {
            #[derive(Serialize)]
            struct Report<'a> {
                name: &'a str,
                identified: bool,
                ideals: Vec<ElemSet>,
                pairs_checked: usize,
            }
            match ctx.format {
                Format::Json => emit_json(
                    ctx,
                    &Report {
                        name: &name,
                        identified: true,
                        ideals: id.ideals.clone(),
                        pairs_checked: id.pairs_checked,
                    },
                ),
                Format::Text => {
                    let _ = writeln!(
                        ctx.out,
                        "{name}: equivalence elements = ideals ({} of them), fusion matches ideal join and intersection matches ideal meet on all {} pairs",
                        id.ideals.len(),
                        id.pairs_checked
                    );
                }
            }
            Ok(CmdOutcome::Pass)
        }
        Err(e @ (MonoidError::MismatchFound(_) | MonoidError::FrameInvalid(_))) => {
            let _ = writeln!(ctx.out, "{name}: identification fails: {e}");
            Ok(CmdOutcome::Negative)
        }
        Err(e) => Err(UsageError(e.to_string())),
    }
}

fn cmd_embed(ctx: &mut Ctx, path: &Path, k: &[usize]) -> Result<CmdOutcome, UsageError> {
    let (name, lattice) = load_lattice(ctx, path)?;
    let k_set = parse_k(&lattice, k)?;
    let outcome = embed_report(&name, &lattice, &k_set, &ctx.gates);
    match outcome {
        Ok(report) => {
            match ctx.format {
                Format::Json => {
                    let _ = writeln!(ctx.out, "{}", report.to_json());
                }
                Format::Text => {
                    let _ = writeln!(
                        ctx.out,
                        "{name}: embedding of the {}-element sublattice verified",
                        report.sublattice.len()
                    );
                    let _ = writeln!(
                        ctx.out,
                        "  atom-map conditions: pass; extension injective and operation-preserving"
                    );
                    let _ = writeln!(
                        ctx.out,
                        "  commutes with principal ideals: yes; internal identities checked: {}",
                        report.proof_identity_instances
                    );
                }
            }
            Ok(CmdOutcome::Pass)
        }
        Err(e) => {
            let _ = writeln!(ctx.out, "{name}: embedding fails: {e}");
            Ok(CmdOutcome::Negative)
        }
    }
}

/// Builds and verifies the full embedding record for a lattice/sublattice
/// pair: construction, the three conditions, the extension, commutation,
/// and the internal identities.
fn embed_report(
    name: &str,
    lattice: &Lattice,
    k: &ElemSet,
    gates: &CheckGates,
) -> Result<EmbeddingReport, MorphError> {
    let emb = inclusion_atom_map(lattice, k)?;
    let conditions = check_atom_map_conditions(&emb.atom_map);
    if !conditions.all_pass() {
        return Err(MorphError::ConditionsFailed(Box::new(conditions)));
    }
    let ext = extend_atom_map(&emb.atom_map, gates)?;
    verify_embedding_commutes(&ext, &emb, lattice)?;
    let instances = verify_inclusion_identities(&emb, lattice)?;
    Ok(EmbeddingReport::build(
        name, lattice, k, &emb, &ext, true, instances,
    ))
}

fn cmd_build_uv(ctx: &mut Ctx, path: &Path, k: &[usize]) -> Result<CmdOutcome, UsageError> {
    let (name, lattice) = load_lattice(ctx, path)?;
    let k_set = parse_k(&lattice, k)?;
    match build_uv(&lattice, &k_set) {
        Ok(pair) => {
            #[derive(Serialize)]
            struct Report<'a> {
                name: &'a str,
                u_size: usize,
                v_size: usize,
                proper: bool,
                u_elements: Vec<ElemSet>,
                v_elements: Vec<ElemSet>,
            }
            match ctx.format {
                Format::Json => emit_json(
                    ctx,
                    &Report {
                        name: &name,
                        u_size: pair.u.len(),
                        v_size: pair.v.len(),
                        proper: pair.proper,
                        u_elements: pair.u.elements().to_vec(),
                        v_elements: pair.v.elements().to_vec(),
                    },
                ),
                Format::Text => {
                    let _ = writeln!(
                        ctx.out,
                        "{name}: |U| = {}, |V| = {}",
                        pair.u.len(),
                        pair.v.len()
                    );
                    let _ = writeln!(
                        ctx.out,
                        "{}",
                        if pair.proper { "U ⊊ V: yes" } else { "U = V" }
                    );
                }
            }
            Ok(CmdOutcome::Pass)
        }
        Err(e) => {
            let _ = writeln!(ctx.out, "{name}: {e}");
            Ok(CmdOutcome::Negative)
        }
    }
}

fn load_epi_targets(ctx: &Ctx) -> Result<Vec<NamedAlgebra>, UsageError> {
    let Some(path) = &ctx.targets else {
        return Ok(corpus::default_algebra_targets());
    };
    let text = read_file(path)?;
    let files: Vec<LatticeFile> =
        serde_json::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    files
        .into_iter()
        .enumerate()
        .map(|(i, file)| {
            let lattice = file
                .to_lattice(ctx.cap)
                .map_err(|e| UsageError(format!("target {i}: {e}")))?;
            let algebra = BooleanMonoid::complex_algebra(&TernaryFrame::from_lattice(&lattice))
                .map_err(|e| UsageError(format!("target {i}: {e}")))?;
            let name = if file.name.is_empty() {
                format!("target{i}")
            } else {
                file.name
            };
            Ok(NamedAlgebra { name, algebra })
        })
        .collect()
}

fn cmd_epi_test(ctx: &mut Ctx, path: &Path, k: &[usize]) -> Result<CmdOutcome, UsageError> {
    let (name, lattice) = load_lattice(ctx, path)?;
    let k_set = parse_k(&lattice, k)?;
    let targets = load_epi_targets(ctx)?;
    let pair = match build_uv(&lattice, &k_set) {
        Ok(pair) => pair,
        Err(e) => {
            let _ = writeln!(ctx.out, "{name}: {e}");
            return Ok(CmdOutcome::Negative);
        }
    };
    let verdict = is_epic_subalgebra_bounded(&pair.u, &pair.v, &targets)
        .map_err(|e| UsageError(e.to_string()))?;
    let outcome = verdict.outcome;
    let report = RaEpiReport::build(&pair, &targets, verdict);
    match ctx.format {
        Format::Json => {
            let _ = writeln!(ctx.out, "{}", report.to_json());
        }
        Format::Text => {
            let _ = writeln!(
                ctx.out,
                "{name}: |U| = {}, |V| = {}",
                pair.u.len(),
                pair.v.len()
            );
            match outcome {
                EpiOutcome::NotEpic => {
                    let w = report.verdict.witness.as_ref().expect("witness present");
                    let _ = writeln!(
                        ctx.out,
                        "not epic: homomorphisms into {} agree on U and differ on V",
                        report.targets[w.target_index].name
                    );
                }
                EpiOutcome::EpicRelativeToTargets => {
                    let _ = writeln!(
                        ctx.out,
                        "epic relative to {} target(s); homomorphisms examined: {:?}",
                        report.targets.len(),
                        report.verdict.certificate.homs_examined
                    );
                }
            }
        }
    }
    Ok(match outcome {
        EpiOutcome::NotEpic => CmdOutcome::Negative,
        EpiOutcome::EpicRelativeToTargets => CmdOutcome::Pass,
    })
}

#[derive(Debug, Serialize)]
struct PipelineStage {
    name: String,
    status: String,
    detail: String,
}

fn cmd_pipeline(ctx: &mut Ctx, path: &Path, k: &[usize]) -> Result<CmdOutcome, UsageError> {
    let (name, lattice) = load_lattice(ctx, path)?;
    let k_set = parse_k(&lattice, k)?;
    let mut stages: Vec<PipelineStage> = Vec::new();
    let mut aborted_at: Option<String> = None;

    let stage = |stages: &mut Vec<PipelineStage>, name: &str, pass: bool, detail: String| {
        stages.push(PipelineStage {
            name: name.into(),
            status: if pass { "pass" } else { "fail" }.into(),
            detail,
        });
        pass
    };

    'pipeline: {
        stage(
            &mut stages,
            "validate",
            true,
            format!(
                "n = {}, bottom = {}, top = {}",
                lattice.n(),
                lattice.bottom(),
                lattice.top()
            ),
        );

        // Informational: the frame stage is the gate.
        let modular = lattice.modular_violation();
        stages.push(PipelineStage {
            name: "modular law".into(),
            status: if modular.is_none() { "pass" } else { "info" }.into(),
            detail: match &modular {
                None => "modular".into(),
                Some(v) => format!("not modular ({v})"),
            },
        });

        let frame = TernaryFrame::from_lattice(&lattice);
        let frame_report = frame.check_axioms();
        if !stage(
            &mut stages,
            "frame axioms",
            frame_report.all_pass(),
            match frame_report.first_failure() {
                None => format!(
                    "{} points, {} triples; all four axioms hold",
                    frame.n(),
                    frame.len()
                ),
                Some(f) => f,
            },
        ) {
            aborted_at = Some("frame axioms".into());
            break 'pipeline;
        }

        // Frame axioms hold here, so the only failure left is the atom cap.
        let algebra =
            BooleanMonoid::complex_algebra(&frame).map_err(|e| UsageError(e.to_string()))?;
        let axiom_report = algebra
            .check_axioms(&ctx.gates)
            .map_err(|e| UsageError(e.to_string()))?;
        if !stage(
            &mut stages,
            "algebra axioms",
            axiom_report.all_pass() && axiom_report.dense.holds && axiom_report.symmetric.holds,
            format!(
                "{} atoms, {} elements; dense {}, symmetric {}, abelian {}",
                algebra.atoms(),
                algebra.element_count(),
                axiom_report.dense.holds,
                axiom_report.symmetric.holds,
                axiom_report.abelian.holds
            ),
        ) {
            aborted_at = Some("algebra axioms".into());
            break 'pipeline;
        }

        let maddux = verify_maddux(&lattice);
        if !stage(
            &mut stages,
            "equivalence elements vs ideals",
            maddux.is_ok(),
            match &maddux {
                Ok(id) => format!(
                    "{} ideals identified; joins and meets agree on {} pairs",
                    id.ideals.len(),
                    id.pairs_checked
                ),
                Err(e) => e.to_string(),
            },
        ) {
            aborted_at = Some("equivalence elements vs ideals".into());
            break 'pipeline;
        }

        let embedding = embed_report(&name, &lattice, &k_set, &ctx.gates);
        if !stage(
            &mut stages,
            "embedding",
            embedding.is_ok(),
            match &embedding {
                Ok(rep) => format!(
                    "conditions pass; extension injective; commutes with principal ideals; {} internal identity instances",
                    rep.proof_identity_instances
                ),
                Err(e) => e.to_string(),
            },
        ) {
            aborted_at = Some("embedding".into());
            break 'pipeline;
        }

        let pair = build_uv(&lattice, &k_set);
        if !stage(
            &mut stages,
            "generated subalgebras",
            pair.is_ok(),
            match &pair {
                Ok(p) => format!(
                    "|U| = {}, |V| = {}; {}",
                    p.u.len(),
                    p.v.len(),
                    if p.proper { "U ⊊ V: yes" } else { "U = V" }
                ),
                Err(e) => e.to_string(),
            },
        ) {
            aborted_at = Some("generated subalgebras".into());
            break 'pipeline;
        }

        if ctx.targets.is_some() {
            let targets = load_epi_targets(ctx)?;
            let pair = pair.expect("checked above");
            let verdict = is_epic_subalgebra_bounded(&pair.u, &pair.v, &targets)
                .map_err(|e| UsageError(e.to_string()))?;
            stages.push(PipelineStage {
                name: "bounded epi test".into(),
                status: "info".into(),
                detail: match verdict.outcome {
                    EpiOutcome::NotEpic => "not epic relative to the targets".into(),
                    EpiOutcome::EpicRelativeToTargets => {
                        format!("epic relative to {} target(s)", targets.len())
                    }
                },
            });
        }
    }

    #[derive(Serialize)]
    struct Report<'a> {
        name: &'a str,
        stages: &'a [PipelineStage],
        aborted_at: &'a Option<String>,
    }
    match ctx.format {
        Format::Json => emit_json(
            ctx,
            &Report {
                name: &name,
                stages: &stages,
                aborted_at: &aborted_at,
            },
        ),
        Format::Text => {
            let _ = writeln!(ctx.out, "pipeline: {name}");
            for s in &stages {
                let _ = writeln!(ctx.out, "== {} [{}]: {}", s.name, s.status, s.detail);
            }
            if let Some(at) = &aborted_at {
                let _ = writeln!(ctx.out, "pipeline aborted at stage: {at}");
            }
        }
    }
    Ok(if aborted_at.is_none() {
        CmdOutcome::Pass
    } else {
        CmdOutcome::Negative
    })
}

#[derive(Debug, Serialize)]
struct CorpusRow {
    name: String,
    n: Option<usize>,
    modular: Option<bool>,
    pasch_agrees: Option<bool>,
    frame_axioms: Option<bool>,
    algebra: Option<bool>,
    ideals: Option<bool>,
    e_lattice: Option<bool>,
    error: Option<String>,
}

fn corpus_row(name: &str, lattice: &Lattice, gates: &CheckGates) -> CorpusRow {
    let modular = lattice.is_modular();
    let frame = TernaryFrame::from_lattice(lattice);
    let report = frame.check_axioms();
    let pasch_agrees = pasch_iff_modular(lattice);
    let frame_axioms =
        report.identity.is_none() && report.reflexivity.is_none() && report.symmetry.is_none();
    let mut error = None;
    let (algebra, ideals, e_lattice) = if modular {
        match BooleanMonoid::complex_algebra(&frame) {
            Ok(alg) => {
                let algebra_ok = alg
                    .check_axioms(gates)
                    .map(|r| r.all_pass() && r.dense.holds && r.symmetric.holds && r.abelian.holds)
                    .unwrap_or(false);
                let ideals_ok = verify_maddux(lattice).is_ok();
                let e_ok = alg
                    .equivalence_lattice()
                    .map(|el| el.lattice.is_modular() && el.elements.len() == lattice.n())
                    .unwrap_or(false);
                (Some(algebra_ok), Some(ideals_ok), Some(e_ok))
            }
            Err(e) => {
                // Capacity, not mathematics: surface it on the row.
                error = Some(e.to_string());
                (None, None, None)
            }
        }
    } else {
        (None, None, None)
    };
    CorpusRow {
        name: name.to_string(),
        n: Some(lattice.n()),
        modular: Some(modular),
        pasch_agrees: Some(pasch_agrees),
        frame_axioms: Some(frame_axioms),
        algebra,
        ideals,
        e_lattice,
        error,
    }
}

fn cmd_corpus(ctx: &mut Ctx, dir: Option<&Path>) -> Result<CmdOutcome, UsageError> {
    let mut rows: Vec<CorpusRow> = Vec::new();
    let mut had_error = false;
    match dir {
        None => {
            for entry in corpus::bundled() {
                rows.push(corpus_row(&entry.name, &entry.lattice, &ctx.gates));
            }
        }
        Some(dir) => {
            let read = std::fs::read_dir(dir)
                .map_err(|e| UsageError(format!("cannot read {}: {e}", dir.display())))?;
            let mut paths: Vec<PathBuf> = read
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
                .collect();
            paths.sort();
            for path in paths {
                let fallback = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let loaded = std::fs::read_to_string(&path)
                    .map_err(|e| e.to_string())
                    .and_then(|text| {
                        serde_json::from_str::<LatticeFile>(&text).map_err(|e| e.to_string())
                    })
                    .and_then(|file| {
                        let name = if file.name.is_empty() {
                            fallback.clone()
                        } else {
                            file.name.clone()
                        };
                        file.to_lattice(ctx.cap)
                            .map(|l| (name, l))
                            .map_err(|e| e.to_string())
                    });
                match loaded {
                    Ok((name, lattice)) => rows.push(corpus_row(&name, &lattice, &ctx.gates)),
                    Err(e) => {
                        had_error = true;
                        rows.push(CorpusRow {
                            name: fallback,
                            n: None,
                            modular: None,
                            pasch_agrees: None,
                            frame_axioms: None,
                            algebra: None,
                            ideals: None,
                            e_lattice: None,
                            error: Some(e),
                        });
                    }
                }
            }
        }
    }

    let had_error = had_error || rows.iter().any(|r| r.error.is_some());
    let suite_failed = rows.iter().any(|r| {
        [
            r.pasch_agrees,
            r.frame_axioms,
            r.algebra,
            r.ideals,
            r.e_lattice,
        ]
        .contains(&Some(false))
    });

    match ctx.format {
        Format::Json => emit_json(ctx, &rows),
        Format::Text => {
            let cell = |v: Option<bool>| match v {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "-",
            };
            let _ = writeln!(
                ctx.out,
                "{:<10} {:>3} {:>8} {:>6} {:>6} {:>8} {:>7} {:>9}",
                "name", "n", "modular", "pasch", "frame", "algebra", "ideals", "e-lattice"
            );
            for r in &rows {
                if let Some(e) = &r.error {
                    let _ = writeln!(ctx.out, "{:<10} error: {e}", r.name);
                    continue;
                }
                let modular = match r.modular {
                    Some(true) => "yes",
                    Some(false) => "no",
                    None => "-",
                };
                let _ = writeln!(
                    ctx.out,
                    "{:<10} {:>3} {:>8} {:>6} {:>6} {:>8} {:>7} {:>9}",
                    r.name,
                    r.n.map(|n| n.to_string()).unwrap_or_default(),
                    modular,
                    cell(r.pasch_agrees),
                    cell(r.frame_axioms),
                    cell(r.algebra),
                    cell(r.ideals),
                    cell(r.e_lattice)
                );
            }
        }
    }

    if had_error {
        Err(UsageError("some corpus files could not be read".into()))
    } else if suite_failed {
        Ok(CmdOutcome::Negative)
    } else {
        Ok(CmdOutcome::Pass)
    }
}
