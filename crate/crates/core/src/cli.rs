//! The `rabin` command-line tool.
//!
//! Exit codes: 0 success / valid, 1 invalid signature or failed check,
//! 2 bad flags, 3 unreadable or malformed key/signature file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::blind::{self, BlindSession};
use crate::error::Error;
use crate::forgery::{self, AttackOutcome, HardenedSigner, NaiveSigner};
use crate::format;
use crate::hashing::{apply_redundancy, DigestAlg, Message, Redundancy};
use crate::keygen::{gen_keypair, KeyKind, PrivateKey, PublicKey};
use crate::numtheory::{mod_inverse, random_unit};
use crate::oracle;
use crate::schemes::{self, FailedCheck, Scheme, Signature, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "rabin",
    version,
    about = "Rabin-type signatures: keys, signing, verification, blind signing and attack demos"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a key pair; writes PREFIX.pub and PREFIX.key.
    Keygen {
        #[arg(long, value_parser = parse_kind)]
        kind: KeyKind,
        /// Bit length of each prime.
        #[arg(long, default_value_t = 1024)]
        bits: u64,
        #[arg(long = "hash", value_parser = parse_redundancy)]
        hash: Redundancy,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sign a decimal integer or a file's bytes.
    Sign {
        #[arg(long)]
        key: PathBuf,
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
        #[arg(long, value_parser = parse_decimal, conflicts_with = "message_file", required_unless_present = "message_file")]
        message: Option<BigUint>,
        #[arg(long)]
        message_file: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify a signature file.
    Verify {
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        /// Check a digest-referenced signature against this file's bytes.
        #[arg(long)]
        message_file: Option<PathBuf>,
    },
    /// Run one blind signing session with both roles and print the transcript.
    BlindDemo {
        #[arg(long)]
        key: PathBuf,
        #[arg(long, value_parser = parse_decimal)]
        message: BigUint,
        /// Use the naive signer that returns a bare square root.
        #[arg(long)]
        naive: bool,
        /// Also write the transcript here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Forgery and blinding attack demonstrations.
    Attack {
        #[arg(long, value_enum)]
        kind: AttackKind,
        /// classic-forge, scale: the signature file to transform.
        /// blinding: optional decimal plaintext whose square is attacked.
        #[arg(long)]
        target: Option<String>,
        /// Public key (classic-forge, scale).
        #[arg(long = "pub")]
        public: Option<PathBuf>,
        /// Private key of the simulated signer (blinding).
        #[arg(long)]
        key: Option<PathBuf>,
        /// classic-forge: the new message.
        #[arg(long, value_parser = parse_decimal)]
        message: Option<BigUint>,
        /// scale: the scaling factor.
        #[arg(long, value_parser = parse_decimal)]
        lambda: Option<BigUint>,
        /// blinding: which signer answers the queries.
        #[arg(long, value_enum, default_value_t = SignerKind::Naive)]
        signer: SignerKind,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Write the forged signature here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the exhaustive oracle suite on built-in small rings.
    Selfcheck {
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AttackKind {
    ClassicForge,
    Scale,
    Blinding,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SignerKind {
    Naive,
    Hardened,
}

fn parse_kind(s: &str) -> Result<KeyKind, String> {
    s.parse()
}

fn parse_redundancy(s: &str) -> Result<Redundancy, String> {
    s.parse()
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse()
}

fn parse_decimal(s: &str) -> Result<BigUint, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("'{s}' is not a non-negative decimal integer"));
    }
    s.parse().map_err(|e| format!("{e}"))
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    text: String,
}

impl Failure {
    fn usage(text: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            text: text.into(),
        }
    }

    fn parse(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_PARSE,
            text: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => EXIT_PARSE,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            text: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_INVALID,
            text: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn rng_for(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::parse(path, e))
}

fn load_private(path: &Path) -> std::result::Result<PrivateKey, Failure> {
    format::parse_private_key(&read_text(path)?).map_err(|e| Failure::parse(path, e))
}

fn load_public(path: &Path) -> std::result::Result<PublicKey, Failure> {
    format::parse_public_key(&read_text(path)?).map_err(|e| Failure::parse(path, e))
}

fn load_signature(path: &Path) -> std::result::Result<Signature, Failure> {
    format::parse_signature(&read_text(path)?).map_err(|e| Failure::parse(path, e))
}

/// Integer messages must be below `N` unless a digest is applied.
fn check_message(
    message: &Message,
    redundancy: Redundancy,
    n: &BigUint,
) -> std::result::Result<(), Failure> {
    match (message, redundancy) {
        (Message::Int(m), Redundancy::Identity | Redundancy::Quadratic) if m >= n => Err(
            Failure::usage("message must be smaller than N for identity/quadratic keys"),
        ),
        (Message::Bytes(_), Redundancy::Identity | Redundancy::Quadratic) => Err(Failure::usage(
            "file messages need a key generated with --hash digest",
        )),
        _ => Ok(()),
    }
}

/// Runs the tool on `args` (including the program name) and returns the exit
/// code. Reports go to `out`, diagnostics and usage to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let rendered = e.render().to_string();
            let _ = write!(target, "{rendered}");
            if e.use_stderr() && !rendered.contains("Usage:") {
                let _ = write!(target, "\n{}", Cli::command().render_usage());
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.text);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CmdResult {
    match command {
        Command::Keygen {
            kind,
            bits,
            hash,
            out: prefix,
            seed,
        } => keygen(kind, bits, hash, &prefix, seed, out),
        Command::Sign {
            key,
            scheme,
            message,
            message_file,
            out: path,
            seed,
        } => sign(
            &key,
            scheme,
            message,
            message_file.as_deref(),
            &path,
            seed,
            out,
        ),
        Command::Verify {
            public,
            sig,
            message_file,
        } => verify(&public, &sig, message_file.as_deref(), out),
        Command::BlindDemo {
            key,
            message,
            naive,
            out: path,
            seed,
        } => blind_demo(&key, message, naive, path.as_deref(), seed, out),
        Command::Attack {
            kind,
            target,
            public,
            key,
            message,
            lambda,
            signer,
            trials,
            out: path,
            seed,
        } => match kind {
            AttackKind::ClassicForge => {
                let (public, target, message) = match (public, target, message) {
                    (Some(p), Some(t), Some(m)) => (p, t, m),
                    _ => {
                        return Err(Failure::usage(
                            "classic-forge needs --pub, --target and --message",
                        ))
                    }
                };
                classic_forge(&public, Path::new(&target), message, path.as_deref(), out)
            }
            AttackKind::Scale => {
                let (public, target, lambda) = match (public, target, lambda) {
                    (Some(p), Some(t), Some(l)) => (p, t, l),
                    _ => return Err(Failure::usage("scale needs --pub, --target and --lambda")),
                };
                scale(&public, Path::new(&target), &lambda, path.as_deref(), out)
            }
            AttackKind::Blinding => {
                let Some(key) = key else {
                    return Err(Failure::usage("blinding needs --key"));
                };
                let target = target
                    .map(|t| parse_decimal(&t).map_err(Failure::usage))
                    .transpose()?;
                blinding(&key, target, signer, trials, seed, out)
            }
        },
        Command::Selfcheck { seed } => selfcheck(seed, out),
    }
}

fn keygen(
    kind: KeyKind,
    bits: u64,
    hash: Redundancy,
    prefix: &Path,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> CmdResult {
    if !(16..=8192).contains(&bits) {
        return Err(Failure::usage("--bits must be between 16 and 8192"));
    }
    let mut rng = rng_for(seed);
    let key = gen_keypair(kind, bits, hash, &mut rng);
    let pub_path = with_suffix(prefix, "pub");
    let key_path = with_suffix(prefix, "key");
    fs::write(&pub_path, format::public_key_to_text(&key.public))?;
    fs::write(&key_path, format::private_key_to_text(&key))?;
    writeln!(out, "kind = {kind}")?;
    writeln!(out, "n bits = {}", key.n().bits())?;
    writeln!(
        out,
        "wrote {} and {}",
        pub_path.display(),
        key_path.display()
    )?;
    Ok(EXIT_OK)
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn sign(
    key_path: &Path,
    scheme: Scheme,
    message: Option<BigUint>,
    message_file: Option<&Path>,
    out_path: &Path,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> CmdResult {
    let message = match (message, message_file) {
        (Some(m), _) => Message::Int(m),
        (None, Some(f)) => Message::Bytes(fs::read(f)?),
        (None, None) => return Err(Failure::usage("--message or --message-file is required")),
    };
    let key = load_private(key_path)?;
    check_message(&message, key.public.redundancy, key.n())?;
    let mut rng = rng_for(seed);
    let sig = schemes::sign(scheme, &key, &message, &mut rng)?;
    fs::write(out_path, format::signature_to_text(&sig))?;
    writeln!(out, "signed with {scheme}; wrote {}", out_path.display())?;
    Ok(EXIT_OK)
}

fn report_verdict(report: &VerifyReport, out: &mut dyn Write) -> CmdResult {
    writeln!(out, "{report}")?;
    Ok(if report.valid { EXIT_OK } else { EXIT_INVALID })
}

fn verify(
    pub_path: &Path,
    sig_path: &Path,
    message_file: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let public = load_public(pub_path)?;
    let sig = load_signature(sig_path)?;
    if let Some(file) = message_file {
        let bytes = Message::Bytes(fs::read(file)?);
        if bytes.to_reference(DigestAlg::Sha256) != *sig.message() {
            return report_verdict(&VerifyReport::rejected(FailedCheck::MessageEncoding), out);
        }
    }
    writeln!(out, "scheme = {}", sig.scheme())?;
    report_verdict(&schemes::verify(&public, &sig), out)
}

fn blind_demo(
    key_path: &Path,
    message: BigUint,
    naive: bool,
    out_path: Option<&Path>,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> CmdResult {
    let key = load_private(key_path)?;
    let message = Message::Int(message);
    check_message(&message, key.public.redundancy, key.n())?;
    let mut rng = rng_for(seed);
    let n = key.n();

    if naive {
        let r = random_unit(n, &mut rng);
        let d = blind::disguise(&message, &r, &key.public)?;
        let (u, root) = blind::naive_blind_sign_padded(&key, &d, &mut rng)?;
        let r_inv = mod_inverse(&r, n).ok_or(Error::NotInvertible)?;
        let published = &root * r_inv % n;
        let h = apply_redundancy(key.public.redundancy, &message, n)?;
        writeln!(out, "author.disguised = {d}")?;
        writeln!(out, "signer.u = {u}")?;
        writeln!(out, "signer.s = {root}")?;
        writeln!(out, "published.u = {u}")?;
        writeln!(out, "published.s = {published}")?;
        let holds = &published * &published % n == &u * h % n;
        writeln!(out, "check published.s^2 = u H(m): {holds}")?;
        writeln!(
            out,
            "note: the naive signer hands out a bare square root of a chosen value"
        )?;
        return Ok(if holds { EXIT_OK } else { EXIT_INVALID });
    }

    let mut session = BlindSession::start(&key.public, message, &mut rng)?;
    let bsig = blind::blind_sign(&key, session.disguised(), &mut rng)?;
    let signer_report = blind::verify_blind(&key.public, &bsig);
    session.receive(bsig)?;
    let sig = session.unblind()?;
    let transcript = format::transcript_to_text(session.transcript());
    out.write_all(transcript.as_bytes())?;
    if let Some(path) = out_path {
        fs::write(path, &transcript)?;
    }
    writeln!(out, "blind signature: {signer_report}")?;
    write!(out, "published signature: ")?;
    report_verdict(&schemes::verify(&key.public, &sig), out)
}

fn write_forged(
    sig: &Signature,
    public: &PublicKey,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let text = format::signature_to_text(sig);
    out.write_all(text.as_bytes())?;
    if let Some(path) = out_path {
        fs::write(path, &text)?;
    }
    write!(out, "forged signature: ")?;
    report_verdict(&schemes::verify(public, sig), out)
}

fn classic_forge(
    pub_path: &Path,
    target: &Path,
    message: BigUint,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let public = load_public(pub_path)?;
    let sig = load_signature(target)?;
    let message = Message::Int(message);
    check_message(&message, public.redundancy, &public.n)?;
    let forged = forgery::forge_classic(&sig, &message, &public)?;
    write_forged(&forged, &public, out_path, out)
}

fn scale(
    pub_path: &Path,
    target: &Path,
    lambda: &BigUint,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let public = load_public(pub_path)?;
    let sig = load_signature(target)?;
    let forged = forgery::forge_scaled(&sig, lambda, &public.n)?;
    write_forged(&forged, &public, out_path, out)
}

fn blinding(
    key_path: &Path,
    target: Option<BigUint>,
    signer: SignerKind,
    trials: usize,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> CmdResult {
    let key = load_private(key_path)?;
    let mut rng = rng_for(seed);
    let n = key.n();
    let x = match target {
        Some(x) => x % n,
        None => random_unit(n, &mut rng),
    };
    let c = &x * &x % n;
    let oracle_rng = ChaCha20Rng::from_rng(&mut rng).map_err(|e| Failure::usage(e.to_string()))?;
    let report = match signer {
        SignerKind::Naive => {
            let mut oracle = NaiveSigner::new(&key, oracle_rng);
            forgery::rsa_blinding_attack(&mut oracle, n, &c, &x, &mut rng, trials)?
        }
        SignerKind::Hardened => {
            let mut oracle = HardenedSigner::new(&key, oracle_rng);
            forgery::rsa_blinding_attack(&mut oracle, n, &c, &x, &mut rng, trials)?
        }
    };
    writeln!(out, "ciphertext = {c}")?;
    writeln!(out, "trials = {trials}")?;
    writeln!(out, "decrypted = {}", report.decrypted())?;
    writeln!(out, "factored = {}", report.factored())?;
    writeln!(out, "failed = {}", report.failed())?;
    if let Some(AttackOutcome::Factored(g)) = report
        .outcomes
        .iter()
        .find(|o| matches!(o, AttackOutcome::Factored(_)))
    {
        writeln!(out, "factor = {g}")?;
    }
    Ok(EXIT_OK)
}

fn selfcheck(seed: Option<u64>, out: &mut dyn Write) -> CmdResult {
    let mut rng = rng_for(Some(seed.unwrap_or(0)));
    let reports = oracle::selfcheck(&mut rng)?;
    let mut all = true;
    for r in &reports {
        writeln!(out, "{r}")?;
        for m in r.mismatches.iter().take(5) {
            writeln!(out, "  {m}")?;
        }
        all &= r.passed();
    }
    writeln!(
        out,
        "{} of {} checks passed",
        reports.iter().filter(|r| r.passed()).count(),
        reports.len()
    )?;
    Ok(if all { EXIT_OK } else { EXIT_INVALID })
}
