use std::fmt;
use std::str::FromStr;

use lmobf_core::obf::{ObfParams, RegisterMode};
use lmobf_core::token::TokenBackend;

/// The `state.txt` file of an obfuscation directory.
///
/// A simulated quantum state cannot be written out, so the directory keeps
/// what regenerates it: the obfuscation seed, the parameters and the program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateDescriptor {
    pub seed: u64,
    pub params: ObfParams,
    pub program_file: String,
    pub qubits: usize,
}

fn register_name(r: RegisterMode) -> &'static str {
    match r {
        RegisterMode::Auto => "auto",
        RegisterMode::Physical => "physical",
        RegisterMode::Logical => "logical",
    }
}

fn backend_name(b: Option<TokenBackend>) -> &'static str {
    match b {
        None => "auto",
        Some(TokenBackend::Dense) => "dense",
        Some(TokenBackend::Subspace) => "subspace",
    }
}

impl fmt::Display for StateDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        writeln!(f, "lmobf-state")?;
        writeln!(f, "seed {}", self.seed)?;
        writeln!(f, "lambda {}", p.lambda)?;
        writeln!(f, "kappa {}", p.kappa)?;
        writeln!(f, "kappa-prime {}", p.kappa_prime)?;
        writeln!(f, "paper-kappa {}", p.use_paper_kappa)?;
        writeln!(f, "register {}", register_name(p.register))?;
        writeln!(f, "token-backend {}", backend_name(p.token_backend))?;
        writeln!(f, "program {}", self.program_file)?;
        writeln!(f, "qubits {}", self.qubits)
    }
}

impl FromStr for StateDescriptor {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some("lmobf-state") {
            return Err("missing `lmobf-state` header".into());
        }
        let mut field = |key: &str| -> Result<String, String> {
            let line = lines.next().ok_or_else(|| format!("missing `{key}`"))?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok(v.trim().to_string()),
                _ => Err(format!("expected `{key}`, found {line:?}")),
            }
        };
        fn num<T: FromStr>(v: String, key: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("bad `{key}` value {v:?}"))
        }
        let seed = num(field("seed")?, "seed")?;
        let lambda = num(field("lambda")?, "lambda")?;
        let kappa = num(field("kappa")?, "kappa")?;
        let kappa_prime = num(field("kappa-prime")?, "kappa-prime")?;
        let use_paper_kappa = num(field("paper-kappa")?, "paper-kappa")?;
        let register = match field("register")?.as_str() {
            "auto" => RegisterMode::Auto,
            "physical" => RegisterMode::Physical,
            "logical" => RegisterMode::Logical,
            other => return Err(format!("unknown register mode {other:?}")),
        };
        let token_backend = match field("token-backend")?.as_str() {
            "auto" => None,
            "dense" => Some(TokenBackend::Dense),
            "subspace" => Some(TokenBackend::Subspace),
            other => return Err(format!("unknown token backend {other:?}")),
        };
        let program_file = field("program")?;
        let qubits = num(field("qubits")?, "qubits")?;
        Ok(Self {
            seed,
            params: ObfParams { lambda, kappa, kappa_prime, use_paper_kappa, register, token_backend },
            program_file,
            qubits,
        })
    }
}
