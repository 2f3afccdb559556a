use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use sha2::{Digest, Sha256};
use semiglobal::physics_models::{Advection, DrivenOscillator, GroundStateConfig, GrossPitaevskii};
use semiglobal::semiglobal::{propagate_with, PropagatorConfig};
use semiglobal::{Complex64, StateVector};

use crate::{BenchError, Example, ADVECTION_N};

/// Expansion order of reference runs.
const REFERENCE_ORDER: usize = 12;

/// Reference step count: four times the finest tabulated semiglobal run
/// (600 steps over 15 for the oscillator, 700 over 10 for GPE), scaled with
/// the final time.
pub fn reference_steps(example: Example, t_final: f64) -> usize {
    let (steps, t_ref) = match example {
        Example::Advection => return 0,
        Example::Oscillator => (2400.0, DrivenOscillator::T),
        Example::Gpe => (2800.0, GrossPitaevskii::T),
    };
    ((steps * t_final / t_ref).ceil() as usize).max(1)
}

/// Every parameter the reference depends on, one per line; its hash keys the
/// cache file.
pub fn reference_description(example: Example, t_final: f64) -> String {
    let model = match example {
        Example::Advection => format!("n={ADVECTION_N}\nsolution=exact"),
        Example::Oscillator => format!(
            "n={}\nr_max={:?}\nperiod={:?}",
            DrivenOscillator::N,
            DrivenOscillator::R_MAX,
            DrivenOscillator::T
        ),
        Example::Gpe => {
            let g = GroundStateConfig::default();
            format!(
                "n={}\nr_max={:?}\ncoupling=1.0\nboost={:?}\nground_tol={:?}\nground_tau={:?}\nground_max_iterations={}",
                GrossPitaevskii::N,
                GrossPitaevskii::r_max(),
                GrossPitaevskii::BOOST,
                g.tol,
                g.tau,
                g.max_iterations
            )
        }
    };
    format!(
        "reference v1\nexample={}\n{model}\nT={t_final:?}\nm=k={REFERENCE_ORDER}\nsteps={}\n",
        example.name(),
        reference_steps(example, t_final)
    )
}

/// Computes the reference state at `t_final` from scratch.
pub fn compute_reference(example: Example, t_final: f64) -> semiglobal::Result<StateVector> {
    let steps = reference_steps(example, t_final);
    let cfg = PropagatorConfig::new(REFERENCE_ORDER, REFERENCE_ORDER, steps).with_tail_tol(None);
    match example {
        Example::Advection => Ok(Advection::new(ADVECTION_N)?.exact(t_final)),
        Example::Oscillator => {
            let p = DrivenOscillator::standard()?;
            Ok(propagate_with(&p, &p.initial_state(), t_final, &cfg, |_, _, _| {})?.0)
        }
        Example::Gpe => {
            let p = GrossPitaevskii::standard()?;
            Ok(propagate_with(&p, &p.initial_state(), t_final, &cfg, |_, _, _| {})?.0)
        }
    }
}

/// Reference states memoized in memory and, when a directory is set, on disk
/// as raw little-endian `(re, im)` pairs.
#[derive(Debug, Default)]
pub struct ReferenceCache {
    dir: Option<PathBuf>,
    memo: Mutex<HashMap<String, Arc<StateVector>>>,
}

impl ReferenceCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: Some(dir.into()),
            memo: Mutex::default(),
        }
    }

    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn path_for(&self, example: Example, t_final: f64) -> Option<PathBuf> {
        let digest = Sha256::digest(reference_description(example, t_final).as_bytes());
        let hex: String = digest[..16].iter().map(|b| format!("{b:02x}")).collect();
        self.dir.as_ref().map(|d| d.join(format!("{}-{hex}.ref", example.name())))
    }

    /// The outer error is cache i/o; the inner one a failed reference run.
    pub fn get(&self, example: Example, t_final: f64) -> Result<semiglobal::Result<Arc<StateVector>>, BenchError> {
        let key = reference_description(example, t_final);
        // held while computing so parallel rows never duplicate the work
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(u) = memo.get(&key) {
            return Ok(Ok(u.clone()));
        }
        let path = self.path_for(example, t_final);
        if let Some(u) = path.as_deref().and_then(read_state) {
            let u = Arc::new(u);
            memo.insert(key, u.clone());
            return Ok(Ok(u));
        }
        let u = match compute_reference(example, t_final) {
            Ok(u) => Arc::new(u),
            Err(e) => return Ok(Err(e)),
        };
        if let Some(path) = path {
            write_state(&path, &u)?;
        }
        memo.insert(key, u.clone());
        Ok(Ok(u))
    }
}

fn read_state(path: &Path) -> Option<StateVector> {
    let bytes = fs::read(path).ok()?;
    if bytes.is_empty() || bytes.len() % 16 != 0 {
        return None;
    }
    let f = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8 bytes"));
    Some(bytes.chunks_exact(16).map(|c| Complex64::new(f(&c[..8]), f(&c[8..]))).collect())
}

fn write_state(path: &Path, u: &[Complex64]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let bytes: Vec<u8> = u
        .iter()
        .flat_map(|c| c.re.to_le_bytes().into_iter().chain(c.im.to_le_bytes()))
        .collect();
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_changes_with_parameters() {
        let c = ReferenceCache::new("/tmp/x");
        assert_ne!(c.path_for(Example::Oscillator, 15.0), c.path_for(Example::Oscillator, 14.0));
        assert_ne!(c.path_for(Example::Oscillator, 10.0), c.path_for(Example::Gpe, 10.0));
        assert_eq!(c.path_for(Example::Gpe, 10.0), c.path_for(Example::Gpe, 10.0));
        assert!(ReferenceCache::in_memory().path_for(Example::Gpe, 10.0).is_none());
    }

    #[test]
    fn reference_steps_scale_with_time() {
        assert_eq!(reference_steps(Example::Oscillator, 15.0), 2400);
        assert_eq!(reference_steps(Example::Gpe, 10.0), 2800);
        assert_eq!(reference_steps(Example::Gpe, 5.0), 1400);
    }

    #[test]
    fn state_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b.ref");
        let u = vec![Complex64::new(1.0 / 3.0, -2e-300), Complex64::new(f64::MAX, 0.1)];
        write_state(&path, &u).unwrap();
        assert_eq!(read_state(&path).unwrap(), u);
        fs::write(&path, [0u8; 5]).unwrap();
        assert!(read_state(&path).is_none());
    }
}
