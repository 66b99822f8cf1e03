use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};
use sigenc::lz77::{factorize, from_factors};
use sigenc::slp::{export_slp, import_slp, release_variables};
use sigenc::{search, Encoding, Index, ParserParams};
use thiserror::Error;

use crate::formats::{self, FormatError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{0}")]
    Core(#[from] sigenc::Error),
    #[error("{0}")]
    Output(#[from] FormatError),
    #[error("write failed: {0}")]
    Stdout(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

type Res<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "sigenc", version, about = "Compressed text index over signature encodings")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Encode a text file.
    Build {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print `len` symbols from `pos` (default: the whole text).
    Extract {
        #[arg(short, long)]
        enc: PathBuf,
        #[arg(long)]
        pos: Option<u64>,
        #[arg(long)]
        len: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print every start position of a pattern.
    #[command(group(ArgGroup::new("pat").required(true).args(["pattern", "pattern_file"])))]
    Search {
        #[arg(short, long)]
        enc: PathBuf,
        #[arg(short, long)]
        pattern: Option<String>,
        #[arg(long)]
        pattern_file: Option<PathBuf>,
    },
    /// Longest common extension of the suffixes at `i` and `j`.
    Lce {
        #[arg(short, long)]
        enc: PathBuf,
        #[arg(long = "i")]
        i: u64,
        #[arg(long = "j")]
        j: u64,
        /// Compare the prefixes ending at `i` and `j` instead.
        #[arg(long)]
        backward: bool,
    },
    /// Insert text so that it starts at `pos`.
    #[command(group(ArgGroup::new("what").required(true).args(["text", "file"])))]
    Insert {
        #[arg(short, long)]
        enc: PathBuf,
        #[arg(long)]
        pos: u64,
        #[arg(long)]
        text: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        /// Defaults to rewriting the input encoding.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Delete `len` symbols starting at `pos`.
    Delete {
        #[arg(short, long)]
        enc: PathBuf,
        #[arg(long)]
        pos: u64,
        #[arg(long)]
        len: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// LZ77 factors of a text file or an encoding.
    #[command(group(ArgGroup::new("src").required(true).args(["input", "enc"])))]
    Lz77 {
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        enc: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build an encoding from LZ77 factors.
    FromLz77 {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build an encoding from an SLP.
    ImportSlp {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write an encoding as an SLP.
    ExportSlp {
        #[arg(short, long)]
        enc: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Text length, signature count and height.
    Stats {
        #[arg(short, long)]
        enc: PathBuf,
        /// Also factorize and report w / (z (log2 N + 1) 5).
        #[arg(long)]
        with_z: bool,
    },
}

fn read_bytes(path: &Path) -> Res<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Read { path: path.into(), source })
}

fn read_text(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })
}

fn write_file(path: &Path, data: &[u8]) -> Res<()> {
    fs::write(path, data).map_err(|source| CliError::Write { path: path.into(), source })
}

fn load(path: &Path) -> Res<Encoding> {
    formats::read_encoding(&read_text(path)?).map_err(|source| CliError::Format { path: path.into(), source })
}

fn emit(output: Option<&Path>, data: &[u8], out: &mut dyn Write) -> Res<()> {
    match output {
        Some(p) => write_file(p, data),
        None => out.write_all(data).map_err(CliError::Stdout),
    }
}

fn execute(cmd: Cmd, out: &mut dyn Write) -> Res<()> {
    let params = ParserParams::DEFAULT;
    match cmd {
        Cmd::Build { input, output } => {
            let t = formats::bytes_to_symbols(&read_bytes(&input)?);
            let e = Encoding::encode_string(&t, params);
            write_file(&output, formats::write_encoding(&e).as_bytes())
        }
        Cmd::Extract { enc, pos, len, output } => {
            let e = load(&enc)?;
            let pos = pos.unwrap_or(1);
            let len = match len {
                Some(l) => l,
                None => (e.len() + 1).checked_sub(pos).ok_or(sigenc::Error::Range { pos, len: 0, bound: e.len() })?,
            };
            let s = match e.start() {
                None if pos == 1 && len == 0 => Vec::new(),
                None => return Err(sigenc::Error::Range { pos, len, bound: 0 }.into()),
                Some(st) => e.extract(st, pos, len)?,
            };
            emit(output.as_deref(), &formats::symbols_to_bytes(&s)?, out)
        }
        Cmd::Search { enc, pattern, pattern_file } => {
            let mut e = load(&enc)?;
            let p = match (pattern, pattern_file) {
                (Some(p), _) => p.into_bytes(),
                (None, Some(f)) => read_bytes(&f)?,
                (None, None) => unreachable!("clap requires one"),
            };
            if p.is_empty() {
                return Err(CliError::Usage("the pattern is empty".into()));
            }
            let idx = Index::build(&e);
            let occ = search(&mut e, &idx, &formats::bytes_to_symbols(&p))?;
            let line: Vec<String> = occ.iter().map(u64::to_string).collect();
            emit(None, format!("{}\n", line.join(" ")).as_bytes(), out)
        }
        Cmd::Lce { enc, i, j, backward } => {
            let e = load(&enc)?;
            let s = e.start().ok_or(sigenc::Error::Range { pos: i, len: 1, bound: 0 })?;
            let v = if backward { e.lce_backward(s, s, i, j)? } else { e.lce_forward(s, s, i, j)? };
            emit(None, format!("{}\n", v).as_bytes(), out)
        }
        Cmd::Insert { enc, pos, text, file, output } => {
            let mut e = load(&enc)?;
            let y = match (text, file) {
                (Some(t), _) => t.into_bytes(),
                (None, Some(f)) => read_bytes(&f)?,
                (None, None) => unreachable!("clap requires one"),
            };
            if y.is_empty() {
                return Err(CliError::Usage("nothing to insert".into()));
            }
            e.insert_str(pos, &formats::bytes_to_symbols(&y))?;
            write_file(output.as_deref().unwrap_or(&enc), formats::write_encoding(&e).as_bytes())
        }
        Cmd::Delete { enc, pos, len, output } => {
            let mut e = load(&enc)?;
            e.delete_range(pos, len)?;
            write_file(output.as_deref().unwrap_or(&enc), formats::write_encoding(&e).as_bytes())
        }
        Cmd::Lz77 { input, enc, output } => {
            let e = match (input, enc) {
                (Some(i), _) => Encoding::encode_string(&formats::bytes_to_symbols(&read_bytes(&i)?), params),
                (None, Some(p)) => load(&p)?,
                (None, None) => unreachable!("clap requires one"),
            };
            emit(output.as_deref(), formats::write_factors(&factorize(&e)?).as_bytes(), out)
        }
        Cmd::FromLz77 { input, output } => {
            let f = formats::read_factors(&read_text(&input)?)
                .map_err(|source| CliError::Format { path: input.clone(), source })?;
            let e = from_factors(&f, params)?;
            write_file(&output, formats::write_encoding(&e).as_bytes())
        }
        Cmd::ImportSlp { input, output } => {
            let slp = formats::read_slp(&read_text(&input)?)
                .map_err(|source| CliError::Format { path: input.clone(), source })?;
            let (mut e, map) = import_slp(&slp, params)?;
            release_variables(&mut e, &map)?;
            write_file(&output, formats::write_encoding(&e).as_bytes())
        }
        Cmd::ExportSlp { enc, output } => {
            let e = load(&enc)?;
            let x = export_slp(&e)?;
            emit(output.as_deref(), formats::write_slp(x.slp()).as_bytes(), out)
        }
        Cmd::Stats { enc, with_z } => {
            let e = load(&enc)?;
            let mut s = format!("N {}\nw {}\nheight {}\n", e.len(), e.size(), e.height());
            if with_z {
                let z = factorize(&e)?.len();
                s += &format!("z {}\n", z);
                if z > 0 {
                    let ratio = e.size() as f64 / (z as f64 * ((e.len() as f64).log2() + 1.0) * 5.0);
                    s += &format!("ratio {:.6}\n", ratio);
                }
            }
            emit(None, s.as_bytes(), out)
        }
    }
}

/// Runs one command line. Returns the process exit code: 0 on success, 1
/// on usage errors, 2 on bad data.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match execute(cli.cmd, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            e.exit_code()
        }
    }
}
