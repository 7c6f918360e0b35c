//! Reading and writing systems on disk.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use desmod_core::ModularSystem;

use crate::error::CliError;
use crate::format::{DesFile, SystemFile};

/// File name of the system description inside a generated directory.
pub const SYSTEM_FILE: &str = "system.sys";

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(CliError::io(path))
}

fn parse_des(path: &Path) -> Result<DesFile, CliError> {
    DesFile::parse(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

/// Whether the first directive of `text` is `module`, i.e. it is a single module.
fn is_module_file(text: &str) -> bool {
    text.lines()
        .map(str::trim_start)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.split_whitespace().next() == Some("module"))
}

/// Loads a system from a system file, a directory containing `system.sys`, or a
/// single module file (a one-module system with every event observable).
pub fn load_system(path: &Path) -> Result<ModularSystem, CliError> {
    let path = if path.is_dir() {
        path.join(SYSTEM_FILE)
    } else {
        path.to_path_buf()
    };
    let text = read(&path)?;
    if is_module_file(&text) {
        let nfa = parse_des(&path)?.to_nfa()?;
        return Ok(ModularSystem::new(vec![nfa], &BTreeSet::new())?);
    }
    let file = SystemFile::parse(&text).map_err(|source| CliError::Format {
        path: path.clone(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let modules = file
        .modules
        .iter()
        .map(|m| parse_des(&base.join(m))?.to_nfa().map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    file.resolve(modules)
        .map_err(|source| CliError::Format { path, source })
}

/// Writes one `<module>.des` per module plus `system.sys` into `dir` (created if
/// needed) and returns the path of the system file.
pub fn write_system(dir: &Path, sys: &ModularSystem) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let mut paths = Vec::with_capacity(sys.len());
    for m in sys.modules() {
        let name = format!("{}.des", m.name());
        let path = dir.join(&name);
        fs::write(&path, DesFile::from_nfa(m).serialize()).map_err(CliError::io(&path))?;
        paths.push(name);
    }
    let path = dir.join(SYSTEM_FILE);
    let text = SystemFile::from_system(sys, paths).serialize();
    fs::write(&path, text).map_err(CliError::io(&path))?;
    Ok(path)
}
