use alloc::vec::Vec;

use super::{sample_initial, EventStream, Torus};
use crate::error::check_unit;
use crate::replica::ReplicaRunner;
use crate::rng::{Purpose, Stream};
use crate::stats::Proportion;
use crate::{Error, Result};

/// Occupation frequency of one probe site at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyRow {
    pub rho: f64,
    pub t: f64,
    pub site: usize,
    pub occupied: Proportion,
}

/// One trajectory per replica, read at every time of `times` (ascending) and
/// every probe site. Rows come time-major.
pub fn stationarity_probe<P: ReplicaRunner>(
    rho: f64,
    torus: Torus,
    times: &[f64],
    probes: &[usize],
    replicas: u64,
    stream: Stream,
    runner: &P,
) -> Result<Vec<OccupancyRow>> {
    check_unit("rho", rho)?;
    if times.is_empty() || times.windows(2).any(|w| w[0] > w[1]) || times[0] < 0.0 {
        return Err(Error::Invalid("probe times must be non-negative and ascending".into()));
    }
    if probes.iter().any(|&s| s >= torus.size()) {
        return Err(Error::Invalid("probe site outside the torus".into()));
    }
    let t_max = times[times.len() - 1];
    let out: Vec<Result<Vec<bool>>> = runner.run(replicas, |i| {
        let s = stream.replica(i);
        let mut occ = sample_initial(rho, torus, &mut s.purpose(Purpose::Initial).rng())?.as_slice().to_vec();
        let mut rng = s.purpose(Purpose::Clocks).rng();
        let mut seen = Vec::with_capacity(times.len() * probes.len());
        let mut k = 0;
        let read = |occ: &[u8], seen: &mut Vec<bool>| seen.extend(probes.iter().map(|&p| occ[p] == 1));
        for e in EventStream::new(torus, t_max.max(f64::MIN_POSITIVE), 1, &mut rng)? {
            while k < times.len() && times[k] < e.time {
                read(&occ, &mut seen);
                k += 1;
            }
            let (a, b) = torus.edge_ends(e.edge as usize);
            occ.swap(a, b);
        }
        while k < times.len() {
            read(&occ, &mut seen);
            k += 1;
        }
        Ok(seen)
    });
    let out = out.into_iter().collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(times.len() * probes.len());
    for (ti, &t) in times.iter().enumerate() {
        for (pi, &site) in probes.iter().enumerate() {
            let j = ti * probes.len() + pi;
            rows.push(OccupancyRow {
                rho,
                t,
                site,
                occupied: Proportion::from_flags(out.iter().map(|v| v[j])),
            });
        }
    }
    Ok(rows)
}
