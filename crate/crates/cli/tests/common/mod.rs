//! Golden transcripts for the command line.
//!
//! Each case copies `golden/inputs` into a scratch directory, runs a list of
//! command lines there and records exit codes, stdout and the final contents
//! of the named files. The transcript must equal `golden/expected/<name>.txt`.
//! Set `SIGENC_BLESS=1` to rewrite the expected files.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use sigenc_cli::{formats, run};

pub struct Case {
    pub name: &'static str,
    pub steps: &'static [&'static str],
    pub files: &'static [&'static str],
}

pub const CASES: &[Case] = &[
    Case { name: "build", steps: &["build -i abra.txt -o a.sig"], files: &["a.sig"] },
    Case {
        name: "extract",
        steps: &["build -i abra.txt -o a.sig", "extract -e a.sig --pos 3 --len 5", "extract -e a.sig", "extract -e a.sig --pos 8 -o part.txt"],
        files: &["part.txt"],
    },
    Case {
        name: "search",
        steps: &["build -i abra.txt -o a.sig", "search -e a.sig -p abra", "search -e a.sig -p a", "search -e a.sig -p zz", "search -e a.sig --pattern-file aabab.txt"],
        files: &[],
    },
    Case {
        name: "lce",
        steps: &["build -i abra.txt -o a.sig", "lce -e a.sig --i 1 --j 8", "lce -e a.sig --i 4 --j 11 --backward", "lce -e a.sig --i 2 --j 3"],
        files: &[],
    },
    Case {
        name: "insert",
        steps: &["build -i abra.txt -o a.sig", "insert -e a.sig --pos 6 --text XYZ", "extract -e a.sig", "insert -e a.sig --pos 1 --file aabab.txt -o b.sig", "extract -e b.sig"],
        files: &["a.sig", "b.sig"],
    },
    Case {
        name: "delete",
        steps: &["build -i abra.txt -o a.sig", "delete -e a.sig --pos 2 --len 3 -o b.sig", "extract -e b.sig", "delete -e a.sig --pos 1 --len 11", "extract -e a.sig"],
        files: &["a.sig", "b.sig"],
    },
    Case { name: "lz77", steps: &["lz77 -i aabab.txt", "build -i abra.txt -o a.sig", "lz77 -e a.sig -o a.lz"], files: &["a.lz"] },
    Case { name: "from_lz77", steps: &["from-lz77 -i f.lz -o f.sig", "extract -e f.sig", "lz77 -e f.sig"], files: &["f.sig"] },
    Case {
        name: "import_slp",
        steps: &["import-slp -i ex1.slp -o ex1.sig", "search -e ex1.sig -p BCAB", "search -e ex1.sig -p CAB", "extract -e ex1.sig"],
        files: &["ex1.sig"],
    },
    Case {
        name: "export_slp",
        steps: &["build -i abra.txt -o a.sig", "export-slp -e a.sig", "import-slp -i ex1.slp -o ex1.sig", "export-slp -e ex1.sig -o back.slp"],
        files: &["back.slp"],
    },
    Case {
        name: "stats",
        steps: &["build -i abra.txt -o a.sig", "stats -e a.sig", "stats -e a.sig --with-z", "import-slp -i ex1.slp -o ex1.sig", "stats -e ex1.sig --with-z"],
        files: &[],
    },
    Case {
        name: "errors",
        steps: &["build -i missing.txt -o a.sig", "frobnicate", "build -i abra.txt -o a.sig", "extract -e a.sig --pos 9 --len 9", "search -e ex1.slp -p a", "lce -e a.sig --i 0 --j 1", "search -e a.sig"],
        files: &[],
    },
];

fn inputs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/inputs")
}

fn expected_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/expected").join(format!("{}.txt", name))
}

/// Runs one case in a fresh directory and returns its transcript and the
/// directory (kept alive by the caller).
pub fn transcript(case: &Case) -> (String, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    for f in fs::read_dir(inputs()).unwrap() {
        let f = f.unwrap();
        fs::copy(f.path(), dir.path().join(f.file_name())).unwrap();
    }
    let mut t = String::new();
    for step in case.steps {
        let mut argv = vec!["sigenc".to_string()];
        for a in step.split_whitespace() {
            let p = dir.path().join(a);
            // Arguments naming files in the scratch directory become absolute.
            if a.contains('.') && !a.starts_with('-') {
                argv.push(p.to_string_lossy().into_owned());
            } else {
                argv.push(a.to_string());
            }
        }
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&argv, &mut out, &mut err);
        t += &format!("$ {}\n[exit {}]\n", step, code);
        t += &String::from_utf8_lossy(&out);
        if !out.is_empty() && !out.ends_with(b"\n") {
            t += "\n[no newline]\n";
        }
        if code != 0 {
            // Messages mention scratch paths; only their presence is pinned.
            t += &format!("[stderr {}]\n", if err.is_empty() { "empty" } else { "nonempty" });
        }
    }
    for f in case.files {
        t += &format!("== {} ==\n", f);
        t += &String::from_utf8_lossy(&fs::read(dir.path().join(f)).unwrap_or_else(|_| b"<missing>\n".to_vec()));
    }
    (t, dir)
}

/// Parses every encoding, SLP and factor file a case leaves behind and
/// checks that writing it back gives the same bytes.
pub fn reserialize(dir: &Path) -> Result<usize, String> {
    let mut n = 0;
    for f in fs::read_dir(dir).unwrap() {
        let p = f.unwrap().path();
        let text = fs::read_to_string(&p).unwrap_or_default();
        let again = match p.extension().and_then(|x| x.to_str()) {
            Some("sig") => formats::write_encoding(&formats::read_encoding(&text).map_err(|e| format!("{}: {}", p.display(), e))?),
            Some("slp") => formats::write_slp(&formats::read_slp(&text).map_err(|e| format!("{}: {}", p.display(), e))?),
            Some("lz") => formats::write_factors(&formats::read_factors(&text).map_err(|e| format!("{}: {}", p.display(), e))?),
            _ => continue,
        };
        if again != text {
            return Err(format!("{} changes on reserialization", p.display()));
        }
        n += 1;
    }
    Ok(n)
}

/// Checks all cases against the expected transcripts, twice each, plus the
/// reserialization of every produced file. Returns the number of files
/// reserialized.
pub fn check_all() -> Result<usize, String> {
    let bless = std::env::var_os("SIGENC_BLESS").is_some();
    let mut files = 0;
    for case in CASES {
        let (a, dir) = transcript(case);
        let (b, _) = transcript(case);
        if a != b {
            return Err(format!("{}: two runs differ", case.name));
        }
        files += reserialize(dir.path())?;
        let path = expected_path(case.name);
        if bless {
            fs::write(&path, &a).unwrap();
            continue;
        }
        let want = fs::read_to_string(&path).map_err(|e| format!("{}: {}", path.display(), e))?;
        if want != a {
            return Err(format!("{}: transcript differs from {}\n--- got ---\n{}", case.name, path.display(), a));
        }
    }
    Ok(files)
}
