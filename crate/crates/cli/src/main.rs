use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Stdio};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lmobf_core::gf2::BitVector;
use lmobf_core::lm::{check_lm_invariants, compile, Circuit, LmError, LmProgram};
use lmobf_core::obf::{
    qeval, qobf, run_attack, serve, AttackKind, ObfError, ObfParams, OracleKey, OracleMode, OracleSet, Oracles,
    RegisterMode, RemoteOracle, DETERMINISTIC_PROGRAMS,
};
use lmobf_core::sim::SimError;
use lmobf_core::token::TokenBackend;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

mod descriptor;

use descriptor::StateDescriptor;

const STATE_FILE: &str = "state.txt";
const KEY_FILE: &str = "oracle.key";
const PROGRAM_FILE: &str = "program.lm";
const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Parser)]
#[command(name = "lmobf", version, about = "Compile, obfuscate and evaluate LM quantum programs")]
struct Cli {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegisterArg {
    Auto,
    Physical,
    Logical,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Auto,
    Dense,
    Subspace,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleModeArg {
    Inproc,
    Serve,
}

#[derive(Args, Clone, Debug)]
struct ParamArgs {
    #[arg(long, default_value_t = 2)]
    lambda: usize,
    #[arg(long, default_value_t = 64)]
    kappa: usize,
    #[arg(long, default_value_t = 4)]
    kappa_prime: usize,
    /// Label length max(λ, n⁴) instead of --kappa.
    #[arg(long)]
    paper_kappa: bool,
    #[arg(long, value_enum, default_value_t = RegisterArg::Auto)]
    register: RegisterArg,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    token_backend: BackendArg,
}

impl ParamArgs {
    fn params(&self) -> ObfParams {
        ObfParams {
            lambda: self.lambda,
            kappa: self.kappa,
            kappa_prime: self.kappa_prime,
            use_paper_kappa: self.paper_kappa,
            register: match self.register {
                RegisterArg::Auto => RegisterMode::Auto,
                RegisterArg::Physical => RegisterMode::Physical,
                RegisterArg::Logical => RegisterMode::Logical,
            },
            token_backend: match self.token_backend {
                BackendArg::Auto => None,
                BackendArg::Dense => Some(TokenBackend::Dense),
                BackendArg::Subspace => Some(TokenBackend::Subspace),
            },
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a {CNOT, H, T} circuit file into an LM program.
    Compile { circuit: PathBuf, out: PathBuf },
    /// Obfuscate an LM program into a directory.
    Obfuscate {
        program: PathBuf,
        out_dir: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Evaluate an obfuscated program on a binary input and print the output.
    Eval {
        dir: PathBuf,
        x: String,
        #[arg(long, value_enum, default_value_t = OracleModeArg::Inproc)]
        oracle_mode: OracleModeArg,
    },
    /// Run a scripted attack against the program of an obfuscation directory.
    Attack {
        dir: PathBuf,
        /// pauli-tamper, label-forge, mixed-input or replay.
        kind: String,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Run a quick end-to-end self-test.
    Selftest,
    /// Answer oracle requests on stdin/stdout using a key file.
    OracleServe { key: PathBuf },
}

/// A failed command: message for stderr and process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

fn lm_code(e: &LmError) -> u8 {
    match e {
        LmError::Sim(SimError::CapExceeded { .. }) | LmError::InvalidProgram(_) => 3,
        _ => 2,
    }
}

impl From<LmError> for Failure {
    fn from(e: LmError) -> Self {
        Self { code: lm_code(&e), message: e.to_string() }
    }
}

impl From<ObfError> for Failure {
    fn from(e: ObfError) -> Self {
        let code = match &e {
            ObfError::Rejected { .. } => 4,
            ObfError::InvalidProgram(_) | ObfError::Sim(SimError::CapExceeded { .. }) => 3,
            ObfError::Params(m) if m.contains("cap") => 3,
            ObfError::Lm(inner) => lm_code(inner),
            ObfError::Token(lmobf_core::token::TokenError::Sim(SimError::CapExceeded { .. })) => 3,
            ObfError::Io(_) => 1,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure { code: 1, message: format!("{}: {e}", path.display()) })
}

fn append_manifest(dir: &Path, record: &str) -> Result<(), Failure> {
    let path = dir.join(MANIFEST_FILE);
    let mut text = fs::read_to_string(&path).unwrap_or_default();
    text.push_str(record);
    write(&path, &text)
}

fn manifest_record(command: &str, seed: u64, params: &ObfParams, input: &str, output: &str, started: Instant) -> String {
    let mut r = String::new();
    let _ = writeln!(r, "run {command}");
    let _ = writeln!(r, "seed {seed}");
    let _ = writeln!(r, "lambda {}", params.lambda);
    let _ = writeln!(r, "kappa {}", params.kappa);
    let _ = writeln!(r, "kappa-prime {}", params.kappa_prime);
    let _ = writeln!(r, "paper-kappa {}", params.use_paper_kappa);
    let _ = writeln!(r, "input {input}");
    let _ = writeln!(r, "output {output}");
    let _ = writeln!(r, "elapsed-ms {}", started.elapsed().as_millis());
    r
}

fn parse_program(text: &str) -> Result<LmProgram, Failure> {
    let p: LmProgram = text.parse()?;
    let report = check_lm_invariants(&p);
    if !report.is_ok() {
        return Err(Failure { code: 3, message: report.to_string() });
    }
    Ok(p)
}

fn cmd_compile(circuit: &Path, out: &Path) -> Result<(), Failure> {
    let c: Circuit = read(circuit)?.parse()?;
    let p = compile(&c)?;
    let report = check_lm_invariants(&p);
    if !report.is_ok() {
        return Err(Failure { code: 3, message: report.to_string() });
    }
    write(out, &p.to_string())?;
    println!("wrote {} ({} wires, {} layers)", out.display(), p.num_wires(), p.t());
    Ok(())
}

fn cmd_obfuscate(seed: u64, program: &Path, out_dir: &Path, params: ObfParams) -> Result<(), Failure> {
    let started = Instant::now();
    let prog = parse_program(&read(program)?)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (obf, key) = qobf(&params, &prog, &mut rng)?;
    fs::create_dir_all(out_dir).map_err(|e| Failure { code: 1, message: format!("{}: {e}", out_dir.display()) })?;
    let descriptor = StateDescriptor {
        seed,
        params: params.clone(),
        program_file: PROGRAM_FILE.into(),
        qubits: obf.num_qubits(params.p()),
    };
    write(&out_dir.join(PROGRAM_FILE), &prog.to_string())?;
    write(&out_dir.join(KEY_FILE), &key.to_string())?;
    write(&out_dir.join(STATE_FILE), &descriptor.to_string())?;
    write(&out_dir.join(MANIFEST_FILE), "")?;
    append_manifest(
        out_dir,
        &manifest_record("obfuscate", seed, &params, &program.display().to_string(), &out_dir.display().to_string(), started),
    )?;
    println!(
        "obfuscated {} wires, {} layers, {} qubits, {} register",
        prog.num_wires(),
        prog.t(),
        descriptor.qubits,
        if obf.is_physical() { "physical" } else { "logical" }
    );
    Ok(())
}

/// Re-derives the obfuscated state from the descriptor and checks it against the key file.
fn load(dir: &Path) -> Result<(StateDescriptor, LmProgram, lmobf_core::obf::ObfuscatedProgram, OracleKey), Failure> {
    let descriptor: StateDescriptor = read(&dir.join(STATE_FILE))?.parse().map_err(Failure::usage)?;
    let prog = parse_program(&read(&dir.join(&descriptor.program_file))?)?;
    let stored: OracleKey = read(&dir.join(KEY_FILE))?.parse()?;
    let mut rng = ChaCha20Rng::seed_from_u64(descriptor.seed);
    let (obf, key) = qobf(&descriptor.params, &prog, &mut rng)?;
    if key != stored {
        return Err(Failure::usage("oracle key does not match the state descriptor"));
    }
    Ok((descriptor, prog, obf, key))
}

fn eval_rng(seed: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

fn cmd_eval(seed: u64, dir: &Path, x: &str, mode: OracleModeArg) -> Result<(), Failure> {
    let started = Instant::now();
    let (descriptor, prog, mut obf, key) = load(dir)?;
    let x: BitVector = x.parse().map_err(|e| Failure::usage(format!("bad input {x:?}: {e}")))?;
    if x.len() != prog.num_inputs {
        return Err(Failure::usage(format!("input has {} bits, program takes {}", x.len(), prog.num_inputs)));
    }
    let mut rng = eval_rng(seed);
    let y = match mode {
        OracleModeArg::Inproc => {
            let oracles = Oracles::new(key, OracleMode::Real)?;
            qeval(&x, &mut obf, &oracles, &mut rng)?
        }
        OracleModeArg::Serve => {
            let exe = std::env::current_exe().map_err(|e| Failure { code: 1, message: e.to_string() })?;
            let mut child = Command::new(exe)
                .arg("oracle-serve")
                .arg(dir.join(KEY_FILE))
                .stdin(Stdio::piped())
                .stdout(Stdio::piped())
                .spawn()
                .map_err(|e| Failure { code: 1, message: format!("starting oracle server: {e}") })?;
            let stdin = child.stdin.take().expect("piped");
            let stdout = BufReader::new(child.stdout.take().expect("piped"));
            let remote = RemoteOracle::new(stdout, stdin, prog.t());
            let result = qeval(&x, &mut obf, &remote, &mut rng);
            let transport = remote.error();
            drop(remote);
            let _ = child.wait();
            if let Some(e) = transport {
                return Err(Failure { code: 1, message: format!("oracle server: {e}") });
            }
            result?
        }
    };
    println!("{y}");
    append_manifest(
        dir,
        &manifest_record("eval", seed, &descriptor.params, &x.to_string(), &y.to_string(), started),
    )?;
    Ok(())
}

fn cmd_attack(seed: u64, dir: &Path, kind: &str, trials: Option<usize>) -> Result<(), Failure> {
    let started = Instant::now();
    let kind: AttackKind = kind.parse()?;
    let (descriptor, prog, _, _) = load(dir)?;
    let trials = trials.unwrap_or_else(|| kind.default_trials());
    let mut rng = eval_rng(seed);
    let report = run_attack(kind, &descriptor.params, &prog, trials, &mut rng)?;
    print!("{report}");
    append_manifest(
        dir,
        &manifest_record("attack", seed, &descriptor.params, &kind.to_string(), &format!("{}/{} rejected", report.rejected, report.trials), started),
    )?;
    Ok(())
}

fn selftest_case(seed: u64, name: &str, text: &str) -> Result<String, String> {
    let c: Circuit = text.parse().map_err(|e: LmError| e.to_string())?;
    let prog = compile(&c).map_err(|e| e.to_string())?;
    let params = ObfParams { kappa_prime: 32, token_backend: Some(TokenBackend::Subspace), ..ObfParams::default() };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut runs = 0;
    for v in 0..1u64 << c.num_inputs() {
        let x = BitVector::from_u64(v, c.num_inputs());
        let want = c.deterministic_output(&x).map_err(|e| e.to_string())?.ok_or("not deterministic")?;
        let cc = c.clone();
        let q: Arc<dyn Fn(&BitVector) -> BitVector + Send + Sync> =
            Arc::new(move |x: &BitVector| cc.deterministic_output(x).ok().flatten().unwrap_or_else(|| x.clone()));
        for mode in [OracleMode::Real, OracleMode::Simulated(q)] {
            for _ in 0..3 {
                let (mut obf, key) = qobf(&params, &prog, &mut rng).map_err(|e| e.to_string())?;
                let oracles = Oracles::new(key, mode.clone()).map_err(|e| e.to_string())?;
                let y = qeval(&x, &mut obf, &oracles, &mut rng).map_err(|e| e.to_string())?;
                if y != want {
                    return Err(format!("{name}: x={x} gave {y}, want {want}"));
                }
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} evaluations"))
}

fn cmd_selftest(seed: u64) -> Result<(), Failure> {
    let mut failed = 0;
    for (name, text) in DETERMINISTIC_PROGRAMS {
        match selftest_case(seed, name, text) {
            Ok(detail) => println!("PASS end-to-end {name} ({detail})"),
            Err(e) => {
                failed += 1;
                println!("FAIL end-to-end {name}: {e}");
            }
        }
    }
    let params = ObfParams { kappa_prime: 32, token_backend: Some(TokenBackend::Subspace), ..ObfParams::default() };
    let prog = compile(&DETERMINISTIC_PROGRAMS[4].1.parse::<Circuit>()?)?;
    let mut rng = eval_rng(seed);
    for (kind, trials) in [
        (AttackKind::PauliTamper, 100),
        (AttackKind::LabelForge, 10_000),
        (AttackKind::MixedInput, 10),
        (AttackKind::Replay, 100),
    ] {
        let report = run_attack(kind, &params, &prog, trials, &mut rng)?;
        if report.all_rejected() {
            println!("PASS attack {kind} ({}/{} rejected)", report.rejected, report.trials);
        } else {
            failed += 1;
            println!("FAIL attack {kind} ({}/{} rejected)", report.rejected, report.trials);
        }
    }
    if failed > 0 {
        return Err(Failure { code: 1, message: format!("{failed} self-test checks failed") });
    }
    Ok(())
}

fn cmd_oracle_serve(key: &Path) -> Result<(), Failure> {
    let key: OracleKey = read(key)?.parse()?;
    let oracles = Oracles::new(key, OracleMode::Real)?;
    let stdin = io::stdin();
    serve(&oracles as &dyn OracleSet, stdin.lock(), io::stdout().lock())
        .map_err(|e| Failure { code: 1, message: e.to_string() })?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Cmd::Compile { circuit, out } => cmd_compile(circuit, out),
        Cmd::Obfuscate { program, out_dir, params } => cmd_obfuscate(cli.seed, program, out_dir, params.params()),
        Cmd::Eval { dir, x, oracle_mode } => cmd_eval(cli.seed, dir, x, *oracle_mode),
        Cmd::Attack { dir, kind, trials } => cmd_attack(cli.seed, dir, kind, *trials),
        Cmd::Selftest => cmd_selftest(cli.seed),
        Cmd::OracleServe { key } => cmd_oracle_serve(key),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("lmobf: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
