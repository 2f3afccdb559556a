use crate::{BenchError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKey {
    Steps,
    M,
    K,
    Tol,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: SweepKey,
    pub values: Vec<f64>,
}

/// Parses `key=v1,v2,..` axes separated by `;`, e.g. `steps=350,400;m=7,8`.
/// An axis with no values yields an empty sweep.
pub fn parse_sweep(text: &str) -> Result<Vec<SweepAxis>, BenchError> {
    let bad = |msg: String| BenchError::Config(format!("--sweep: {msg}"));
    let mut axes: Vec<SweepAxis> = Vec::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, list) = part.split_once('=').ok_or_else(|| bad(format!("expected key=values, got '{part}'")))?;
        let key = match key.trim() {
            "steps" => SweepKey::Steps,
            "m" => SweepKey::M,
            "k" => SweepKey::K,
            "tol" => SweepKey::Tol,
            other => return Err(bad(format!("unknown key '{other}' (steps, m, k, tol)"))),
        };
        if axes.iter().any(|a| a.key == key) {
            return Err(bad(format!("key {key:?} given twice")));
        }
        let values = list
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| {
                let x: f64 = v.parse().map_err(|_| bad(format!("'{v}' is not a number")))?;
                let integral = key != SweepKey::Tol;
                if integral && (x < 0.0 || x.fract() != 0.0) {
                    return Err(bad(format!("'{v}' must be a nonnegative integer")));
                }
                Ok(x)
            })
            .collect::<Result<Vec<_>, _>>()?;
        axes.push(SweepAxis { key, values });
    }
    if axes.is_empty() {
        return Err(bad("no axes".into()));
    }
    Ok(axes)
}

/// Cartesian product of the axes over `base`, first axis slowest. Sweeping
/// `m` moves `k` along with it unless `k_follows_m` is false or `k` is an
/// axis of its own.
pub fn expand(base: &RunConfig, axes: &[SweepAxis], k_follows_m: bool) -> Vec<RunConfig> {
    let follow = k_follows_m && !axes.iter().any(|a| a.key == SweepKey::K);
    let mut out = vec![base.clone()];
    for axis in axes {
        out = out
            .iter()
            .flat_map(|cfg| {
                axis.values.iter().map(move |&v| {
                    let mut c = cfg.clone();
                    match axis.key {
                        SweepKey::Steps => c.steps = Some(v as usize),
                        SweepKey::M => {
                            c.m = v as usize;
                            if follow {
                                c.k = c.m;
                            }
                        }
                        SweepKey::K => c.k = v as usize,
                        SweepKey::Tol => c.tol = v,
                    }
                    c
                })
            })
            .collect();
    }
    out
}
