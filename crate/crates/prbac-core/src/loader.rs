//! Loads a compiled policy directory back into a [`PolicyStore`]:
//! every `.xml` file must parse as a PolicySet, `roots.txt` names the
//! evaluation roots, and the whole store must be well formed — a
//! reference that cannot be resolved among the loaded sets is a load
//! error here, not a runtime Indeterminate.

use std::fs;
use std::path::{Path, PathBuf};

use crate::ir::IrViolation;
use crate::pdp::{PolicyStore, StoreError};
use crate::xml::{parse_policy_set, XmlError};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("no-roots: {0} has no roots.txt")]
    NoRoots(PathBuf),
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse: {file}: {source}")]
    Parse {
        file: PathBuf,
        #[source]
        source: XmlError,
    },
    #[error("dangling-ref: {id}")]
    DanglingRef { id: String },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{set_id} is not well formed: {}", format_violations(.violations))]
    WellFormed {
        set_id: String,
        violations: Vec<IrViolation>,
    },
}

fn format_violations(violations: &[IrViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Reads every `.xml` PolicySet in `dir` (sorted by file name) plus
/// `roots.txt`, and assembles a fully checked store.
pub fn load_policy_dir(dir: &Path) -> Result<PolicyStore, LoadError> {
    let roots_path = dir.join("roots.txt");
    if !roots_path.exists() {
        return Err(LoadError::NoRoots(dir.to_owned()));
    }
    let roots_text = fs::read_to_string(&roots_path).map_err(|source| LoadError::Io {
        path: roots_path.clone(),
        source,
    })?;
    let roots: Vec<String> = roots_text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect();

    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|source| LoadError::Io {
            path: dir.to_owned(),
            source,
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "xml"))
        .collect();
    files.sort();

    let mut sets = Vec::with_capacity(files.len());
    for file in files {
        let bytes = fs::read(&file).map_err(|source| LoadError::Io {
            path: file.clone(),
            source,
        })?;
        let (ps, _diagnostics) =
            parse_policy_set(&bytes).map_err(|source| LoadError::Parse { file, source })?;
        sets.push(ps);
    }

    let store = match PolicyStore::new(sets, roots) {
        Ok(store) => store,
        Err(StoreError::UnknownRoot(id)) => return Err(LoadError::DanglingRef { id }),
        Err(e) => return Err(e.into()),
    };
    for ps in store.sets() {
        let violations = crate::ir::well_formed(ps, &store.ids().map(str::to_owned).collect());
        if let Some(dangling) = violations.iter().find(|v| v.code == "dangling-ref") {
            return Err(LoadError::DanglingRef {
                id: dangling.detail.clone(),
            });
        }
        if !violations.is_empty() {
            return Err(LoadError::WellFormed {
                set_id: ps.id.clone(),
                violations,
            });
        }
    }
    Ok(store)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{compile_model, write_policy_dir};
    use crate::sample::student_model;

    #[test]
    fn compiled_directory_loads_back_identically() {
        let dir = tempfile::tempdir().unwrap();
        let store = compile_model(&student_model()).unwrap();
        write_policy_dir(&store, dir.path()).unwrap();
        let loaded = load_policy_dir(dir.path()).unwrap();
        assert_eq!(loaded, store);
    }

    #[test]
    fn empty_directory_with_empty_roots_is_an_empty_store() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("roots.txt"), "").unwrap();
        let store = load_policy_dir(dir.path()).unwrap();
        assert!(store.is_empty());
    }

    #[test]
    fn missing_roots_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_policy_dir(dir.path()),
            Err(LoadError::NoRoots(_))
        ));
    }

    #[test]
    fn root_naming_an_absent_set_is_a_dangling_ref() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("roots.txt"), "RPS:ghost:role\n").unwrap();
        let err = load_policy_dir(dir.path()).unwrap_err();
        assert!(matches!(err, LoadError::DanglingRef { id } if id == "RPS:ghost:role"));
    }

    #[test]
    fn unresolvable_reference_is_a_load_error_not_a_runtime_one() {
        let dir = tempfile::tempdir().unwrap();
        let store = compile_model(&student_model()).unwrap();
        write_policy_dir(&store, dir.path()).unwrap();
        std::fs::remove_file(
            dir.path()
                .join("PPS_student_role_studentid-02123781.xml"),
        )
        .unwrap();
        let err = load_policy_dir(dir.path()).unwrap_err();
        assert!(
            matches!(err, LoadError::DanglingRef { id } if id == "PPS:student:role:studentid-02123781")
        );
    }

    #[test]
    fn unparsable_file_reports_its_name() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("roots.txt"), "").unwrap();
        std::fs::write(dir.path().join("broken.xml"), "<PolicySet").unwrap();
        let err = load_policy_dir(dir.path()).unwrap_err();
        match err {
            LoadError::Parse { file, source } => {
                assert!(file.ends_with("broken.xml"));
                assert_eq!(source.code(), "xml-syntax");
            }
            other => panic!("expected parse error, got {other}"),
        }
    }
}
