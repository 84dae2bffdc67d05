//! End-to-end counting experiments: one enumeration at the largest radius
//! feeds every region and every grid radius, and the counts are set
//! against the limit constants.

mod config;
mod report;

pub use config::{default_height, parse_list, ExperimentConfig, DEFAULT_SEED, DEFAULT_TOL};
pub use report::{
    DensityCertificate, ExperimentReport, ReportRow, Telemetry, NOT_DENSE, SL_HEADER, SP_HEADER,
};

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::constants::{a_nl, b_nl};
use crate::enumerate::{orbit_point_into, rational_in_span, BallEnumerator, BallQuery, Group, IntMatrix};
use crate::error::{Error, Result};
use crate::geometry::{is_isotropic, Frame, MEMBERSHIP_TOL};
use crate::measures::{growth_exponent, target_integral_seeded, Region};

pub fn density_certificate(v0: &Frame, height: u64, tol: f64) -> DensityCertificate {
    DensityCertificate {
        height,
        tol,
        witness: rational_in_span(v0, height, tol),
    }
}

/// Parallel fold that keeps whatever was accumulated when the cap stops
/// the run.
fn fold_ball<A, I, F, R>(en: &BallEnumerator, init: I, fold: F, reduce: R) -> (A, Option<Error>)
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, &IntMatrix) + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    if en.projected_count().is_some_and(|p| p > en.cap() as f64 * 1.05) {
        let err = Error::CapExceeded { cap: en.cap(), emitted: 0 };
        return (init(), Some(err));
    }
    let emitted = std::sync::atomic::AtomicU64::new(0);
    en.partitions()
        .par_iter()
        .map(|p| {
            let mut acc = init();
            let err = en.visit_partition(p, &emitted, |m| fold(&mut acc, m)).err();
            (acc, err)
        })
        .reduce(
            || (init(), None),
            |(a, ea), (b, eb)| (reduce(a, b), ea.or(eb)),
        )
}

/// Per-region counts for every grid radius, plus the number of matrices
/// in each radius.
struct Tally {
    counts: Vec<Vec<u64>>,
    matrices: Vec<u64>,
    error: Option<String>,
}

/// One enumeration pass at the largest radius, feeding every orbit's
/// regions; each matrix lands in the first grid bucket that holds it.
fn tally(query: BallQuery, cap: u64, orbits: &[(&Frame, &[Region])], t_grid: &[f64]) -> Result<Vec<Tally>> {
    let bounds: Vec<i128> = t_grid
        .iter()
        .map(|&t| Ok(BallQuery { radius: t, ..query }.max_norm_sq()? as i128))
        .collect::<Result<_>>()?;
    let k = t_grid.len();
    let en = BallEnumerator::new(BallQuery {
        radius: *t_grid.last().expect("non-empty grid"),
        ..query
    })?
    .with_cap(cap);
    // Layout: one block of k bucket counts per region, orbit after orbit,
    // then a final block counting matrices.
    let offsets: Vec<usize> = orbits
        .iter()
        .scan(0, |o, (_, regs)| {
            let start = *o;
            *o += regs.len() * k;
            Some(start)
        })
        .collect();
    let total = orbits.iter().map(|(_, regs)| regs.len()).sum::<usize>() * k;
    let widths: Vec<usize> = orbits.iter().map(|(v0, _)| v0.coords().len()).collect();
    let ((acc, _), error) = fold_ball(
        &en,
        || (vec![0u64; total + k], widths.iter().map(|w| vec![0.0; *w]).collect::<Vec<_>>()),
        |(acc, bufs), m| {
            let ns = m.norm_sq();
            let bucket = bounds.partition_point(|b| *b < ns);
            if bucket == k {
                return;
            }
            acc[total + bucket] += 1;
            for (((v0, regions), buf), off) in orbits.iter().zip(bufs.iter_mut()).zip(&offsets) {
                orbit_point_into(m, v0, buf);
                for (i, reg) in regions.iter().enumerate() {
                    if reg.contains(buf) {
                        acc[off + i * k + bucket] += 1;
                    }
                }
            }
        },
        |(mut a, bufs), (b, _)| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            (a, bufs)
        },
    );
    let cumulative = |block: &[u64]| {
        block
            .iter()
            .scan(0u64, |s, c| {
                *s += c;
                Some(*s)
            })
            .collect::<Vec<_>>()
    };
    let matrices = cumulative(&acc[total..]);
    let error = error.map(|e| e.to_string());
    Ok(orbits
        .iter()
        .zip(&offsets)
        .map(|((_, regs), off)| Tally {
            counts: acc[*off..off + regs.len() * k].chunks(k).map(cumulative).collect(),
            matrices: matrices.clone(),
            error: error.clone(),
        })
        .collect())
}

fn check_regions(regions: &[Region], n: usize, l: usize) -> Result<()> {
    for (i, reg) in regions.iter().enumerate() {
        reg.check_dim(n, l)
            .map_err(|e| Error::Config(format!("region {i}: {e}")))?;
    }
    Ok(())
}

/// `κ · Vol(v⁰)^{1−n} · ∫_Ω dv/Vol(v)` with `κ = b_{n,l}` or `a_{n,l}/covol`;
/// multiply by `T^{(n−1)(n−l)}` for the predicted count.
fn prediction_scales(
    n: usize,
    l: usize,
    v0: &Frame,
    regions: &[Region],
    covolume: Option<f64>,
    seed: u64,
    flags: &mut Vec<String>,
) -> Result<Vec<Option<f64>>> {
    let kappa = match covolume {
        Some(c) => a_nl(n, l)? / c,
        None => b_nl(n, l)?,
    };
    let vol = v0.volume()?.powf(1.0 - n as f64);
    Ok(regions
        .iter()
        .enumerate()
        .map(|(i, reg)| match target_integral_seeded(reg, n, l, seed.wrapping_add(i as u64)) {
            Ok(e) => Some(kappa * vol * e.value),
            Err(e) => {
                flags.push(format!("region {i}: no prediction ({e})"));
                None
            }
        })
        .collect())
}

fn finish(
    group: Group,
    tally: Tally,
    rows: Vec<ReportRow>,
    mut flags: Vec<String>,
    certificate: DensityCertificate,
    start: Instant,
) -> ExperimentReport {
    if !certificate.passed() {
        flags.insert(0, NOT_DENSE.to_string());
    }
    let invalid = tally.error.is_some();
    if let Some(e) = tally.error {
        flags.push(format!("invalid: {e}"));
    }
    ExperimentReport {
        group,
        rows,
        certificate,
        flags,
        invalid,
        telemetry: Telemetry {
            matrices: tally.matrices.last().copied().unwrap_or(0),
            elapsed: start.elapsed(),
        },
    }
}

/// Counts `γ·v⁰ ∈ Ω` over `γ ∈ SL(n,Z)`, `‖γ‖ < T`, for every region and
/// grid radius, with predictions from the closed-form constants.
pub fn run_sl_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    Ok(run_sl_experiments(std::slice::from_ref(cfg))?.remove(0))
}

/// Several SL experiments over one enumeration pass. All configs must share
/// `n`, the T grid and the cap; `l`, `v⁰` and the regions are free.
pub fn run_sl_experiments(cfgs: &[ExperimentConfig]) -> Result<Vec<ExperimentReport>> {
    let first = cfgs.first().ok_or_else(|| Error::Config("no experiments given".into()))?;
    for cfg in cfgs {
        cfg.validate()?;
        if cfg.group != Group::Sl {
            return Err(Error::Config("run_sl_experiment needs group = sl".into()));
        }
        if cfg.n != first.n || cfg.t_grid != first.t_grid || cfg.cap != first.cap {
            return Err(Error::Config("shared runs need equal n, t_grid and cap".into()));
        }
        check_regions(&cfg.regions, cfg.n, cfg.l)?;
    }
    let start = Instant::now();
    let n = first.n;
    let orbits: Vec<(&Frame, &[Region])> = cfgs.iter().map(|c| (&c.v0, &c.regions[..])).collect();
    let tallies = tally(BallQuery::sl(n, 1.0)?, first.cap, &orbits, &first.t_grid)?;
    let mut out = Vec::with_capacity(cfgs.len());
    for (cfg, tally) in cfgs.iter().zip(tallies) {
        let certificate = density_certificate(&cfg.v0, cfg.height, cfg.tol);
        let mut flags = Vec::new();
        let scales = prediction_scales(n, cfg.l, &cfg.v0, &cfg.regions, cfg.covolume, cfg.seed, &mut flags)?;
        let e = growth_exponent(n, cfg.l);
        let mut rows = Vec::new();
        for (i, counts) in tally.counts.iter().enumerate() {
            for (j, &t) in cfg.t_grid.iter().enumerate() {
                rows.push(ReportRow {
                    region_id: i,
                    t,
                    empirical: counts[j],
                    predicted: scales[i].map(|s| s * t.powf(e)),
                    lambda: None,
                    stability: None,
                });
            }
        }
        out.push(finish(Group::Sl, tally, rows, flags, certificate, start));
    }
    Ok(out)
}

/// `λ_T(Ω) = N_T(Ω)/T^{n(n+1)/2}` over `γ ∈ Sp(n,Z)` for isotropic `v⁰`,
/// with the change against the previous grid radius. For `n = 1`, where
/// `Sp(1) = SL(2)`, the SL(2) prediction fills the `predicted` column.
pub fn run_sp_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    if cfg.group != Group::Sp {
        return Err(Error::Config("run_sp_experiment needs group = sp".into()));
    }
    if !is_isotropic(&cfg.v0, MEMBERSHIP_TOL) {
        return Err(Error::InvalidParameter("v0 is not isotropic".into()));
    }
    let start = Instant::now();
    let n = cfg.n;
    check_regions(&cfg.regions, 2 * n, n)?;
    let certificate = density_certificate(&cfg.v0, cfg.height, cfg.tol);
    let mut flags = Vec::new();
    let scales = if n == 1 {
        prediction_scales(2, 1, &cfg.v0, &cfg.regions, cfg.covolume, cfg.seed, &mut flags)?
    } else {
        vec![None; cfg.regions.len()]
    };
    let tally = tally(BallQuery::sp(n, 1.0)?, cfg.cap, &[(&cfg.v0, &cfg.regions[..])], &cfg.t_grid)?.remove(0);
    let e = (n * (n + 1)) as f64 / 2.0;
    let mut rows = Vec::new();
    for (i, counts) in tally.counts.iter().enumerate() {
        let mut prev: Option<f64> = None;
        for (j, &t) in cfg.t_grid.iter().enumerate() {
            let lambda = counts[j] as f64 / t.powf(e);
            let stability = prev.filter(|p| *p > 0.0).map(|p| (lambda / p - 1.0).abs());
            prev = Some(lambda);
            rows.push(ReportRow {
                region_id: i,
                t,
                empirical: counts[j],
                predicted: scales[i].map(|s| s * t.powf(e)),
                lambda: Some(lambda),
                stability,
            });
        }
    }
    Ok(finish(Group::Sp, tally, rows, flags, certificate, start))
}

/// Orbit points `γ·v⁰` for `‖γ‖ < T`, in lexicographic order of `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitDump {
    /// Column-major frame coordinates, one point per entry.
    pub points: Vec<Vec<f64>>,
    /// Coordinates per point, `n·l`.
    pub width: usize,
    /// The cap stopped the enumeration; `points` is incomplete.
    pub truncated: bool,
}

impl OrbitDump {
    pub fn csv(&self) -> String {
        let mut s = (1..=self.width).map(|i| format!("coord_{i}")).collect::<Vec<_>>().join(",");
        s.push('\n');
        for p in &self.points {
            let line: Vec<String> = p.iter().map(f64::to_string).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }
}

pub fn orbit_dump(cfg: &ExperimentConfig, t: f64) -> Result<OrbitDump> {
    let query = BallQuery::new(cfg.group, cfg.n, t)?;
    let en = BallEnumerator::new(query)?.with_cap(cfg.cap);
    let (mut ms, err) = fold_ball(
        &en,
        Vec::new,
        |v, m| v.push(m.clone()),
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    ms.sort();
    let width = cfg.v0.coords().len();
    let points = ms
        .iter()
        .map(|m| {
            let mut buf = vec![0.0; width];
            orbit_point_into(m, &cfg.v0, &mut buf);
            buf
        })
        .collect();
    Ok(OrbitDump {
        points,
        width,
        truncated: err.is_some(),
    })
}
