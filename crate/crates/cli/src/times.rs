//! Time lists: `a..b` and `a..=b` (both inclusive), comma lists, single values.

use anyhow::{bail, Context, Result};

pub fn parse(spec: &str) -> Result<Vec<usize>> {
    let spec = spec.trim();
    let times = if let Some((lo, hi)) = spec.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo = number(lo)?;
        let hi = number(hi)?;
        if lo > hi {
            bail!("empty time range {spec:?}");
        }
        (lo..=hi).collect()
    } else {
        spec.split(',').map(number).collect::<Result<Vec<_>>>()?
    };
    if times.windows(2).any(|w| w[0] >= w[1]) {
        bail!("times must be strictly increasing: {spec:?}");
    }
    Ok(times)
}

fn number(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .with_context(|| format!("invalid time {s:?}"))
}
