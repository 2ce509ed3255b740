use std::io;
use std::path::PathBuf;

use escape_core::bounds::{
    binomial_corollary_report, c1, continuous_kernel_report, discrete_kernel_sup_check, poisson_lemma_report,
    TailReport, TailRow, DEFAULT_THETA,
};
use escape_core::couple::{
    box_decoupling_probe, column_open, covariance_probe, domination_failure_rate, fully_occupied,
    isolated_pair_meeting, CouplingRates, CovarianceRow, SpaceTimeBox,
};
use escape_core::dynamics::{stationarity_probe, OccupancyRow, Torus, TrajectoryRecord};
use escape_core::escape::{density_monotonicity, strangle_probe, survival_curve, SurvivalRow};
use escape_core::paths::CrossingRegion;
use escape_core::renorm::{
    chain_points, chain_separation, corner_inequality, density_ladder, estimate_pk, power_error, recursion_ledger,
    row_closure_probe, trigger_bound_exclusion, FieldSource, PkEstimate, ScaleLadder,
};
use escape_core::rng::Stream;

use crate::config::{BoxEvent, Config, Kind, Params, Source};
use crate::output::{num, write_tables, Table};
use crate::runner::Parallel;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] escape_core::Error),
    #[error("output: {0}")]
    Io(#[from] io::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub type RunResult<T> = Result<T, RunError>;

fn progress(msg: &str) {
    eprintln!("[escape] {msg}");
}

fn yes(b: bool) -> String {
    b.to_string()
}

/// Every table of `config.kind`, computed before anything is written.
pub fn tables(config: &Config, runner: &Parallel) -> RunResult<Vec<Table>> {
    let mut out = Vec::new();
    let p = &config.params;
    let seed = config.seed;
    for kind in Kind::EXPERIMENTS {
        if !config.kind.includes(kind) {
            continue;
        }
        progress(&format!("{} ({} replicas, {} threads)", kind.name(), p.replicas, runner.threads()));
        let stream = Stream::new(seed, kind.name());
        match kind {
            Kind::Ladder => out.extend(ladder(p)?),
            Kind::Escape => out.extend(escape(p, seed, stream, runner)?),
            Kind::Crossing => out.push(crossing(p, stream, runner)?),
            Kind::Pk => out.extend(pk(p, stream, runner)?),
            Kind::Couple => out.extend(couple(p, seed, stream, runner)?),
            Kind::Cov => out.extend(cov(p, stream, runner)?),
            Kind::Decouple => out.push(decouple(p, stream, runner)?),
            Kind::Bounds => out.push(bounds(p)?),
            Kind::All => unreachable!("not an experiment"),
        }
    }
    Ok(out)
}

/// Runs the experiment and writes its CSVs into `dir`.
pub fn run(config: &Config, dir: &std::path::Path) -> RunResult<Vec<PathBuf>> {
    let runner = Parallel::new(config.threads)?;
    let tables = tables(config, &runner)?;
    let footer = config.entries();
    let paths = write_tables(dir, &tables, &footer)?;
    for path in &paths {
        progress(&format!("wrote {}", path.display()));
    }
    Ok(paths)
}

fn ladder(p: &Params) -> RunResult<Vec<Table>> {
    let lad = ScaleLadder::from_u64(p.l0, p.k_max)?;
    let mut t = Table::new(
        "ladder",
        &[
            "k",
            "l",
            "big_l",
            "growth_holds",
            "aspect_holds",
            "chain_count",
            "chain_distinct",
            "chain_bound_holds",
            "corner_holds",
            "separation",
            "separation_positive",
            "printed_separation",
            "separation_ratio",
        ],
    );
    for k in 0..=p.k_max {
        let mut row = vec![
            k.to_string(),
            lad.l(k).to_string(),
            lad.big_l(k).to_string(),
            if k < p.k_max { yes(lad.growth_holds(k)) } else { String::new() },
            if k >= 1 { yes(lad.aspect_holds(k)) } else { String::new() },
        ];
        if k >= 2 {
            let fam = chain_points(&lad, k)?;
            let sep = chain_separation(&lad, k)?;
            row.extend([
                fam.cardinality().to_string(),
                fam.distinct().to_string(),
                yes(fam.cardinality_bound_holds()),
                yes(corner_inequality(&lad, k)?),
                num(sep.distance),
                yes(sep.positive()),
                num(sep.printed_distance),
                num(sep.ratio()),
            ]);
        } else {
            row.extend(std::iter::repeat_n(String::new(), 8));
        }
        t.push(row);
    }
    let mut trig = Table::new("trigger", &["k", "rho", "bound", "target", "verdict"]);
    for k in 1..=p.k_max {
        for &rho in &p.trigger_rho {
            let b = trigger_bound_exclusion(&lad, k, rho)?;
            trig.push(vec![k.to_string(), num(rho), b.bound.display(30), b.target.display(30), b.verdict.name().into()]);
        }
    }
    let dl = density_ladder(&p.u_inf.0, (p.delta.0, p.delta.1), &lad)?;
    let mut dens = Table::new("density", &["k", "factor", "u"]);
    for (k, u) in dl.u.iter().enumerate() {
        let factor = dl.factors.get(k).map(|f| f.display(30)).unwrap_or_default();
        dens.push(vec![k.to_string(), factor, u.display(30)]);
    }
    Ok(vec![t, trig, dens])
}

pub fn survival_table(name: &'static str, seed: u64, rows: &[SurvivalRow]) -> Table {
    let mut t = Table::new(name, &SURVIVAL);
    for r in rows {
        t.push(vec![
            seed.to_string(),
            r.rule.name().into(),
            num(r.rho),
            r.r.to_string(),
            r.horizon.to_string(),
            r.replicas.to_string(),
            r.survived.to_string(),
            num(r.frequency),
            num(r.ci_low),
            num(r.ci_high),
        ]);
    }
    t
}

const SURVIVAL: [&str; 10] = ["master_seed", "rule", "rho", "R", "T", "replicas", "survived", "frequency", "ci_low", "ci_high"];

fn escape(p: &Params, seed: u64, stream: Stream, runner: &Parallel) -> RunResult<Vec<Table>> {
    let curve = survival_curve(p.escape_rho, &p.escape_r, p.escape_horizon, p.replicas, p.escape_rule, stream.label("curve"), runner)?;
    let surv = survival_table("survival", seed, &curve.rows);
    let strangle = strangle_probe(&p.strangle_t, p.replicas, p.strangle_rho, stream.label("strangle"), runner)?;
    let st = survival_table("strangle", seed, &strangle);
    let dm = density_monotonicity(&p.escape_rho_list, p.escape_monotone_r, p.escape_horizon, p.replicas, stream.label("density"), runner)?;
    let mut mono = Table::new("monotonicity", &["check", "rule", "parameter", "R", "T", "replicas", "violations"]);
    mono.push(vec![
        "survival_in_R".into(),
        p.escape_rule.name().into(),
        format!("rho={}", p.escape_rho),
        p.escape_r.iter().map(u32::to_string).collect::<Vec<_>>().join(";"),
        p.escape_horizon.to_string(),
        p.replicas.to_string(),
        curve.monotonicity_violations().to_string(),
    ]);
    mono.push(vec![
        "frontier_in_rho".into(),
        "avoid".into(),
        format!("rho={}", dm.rhos.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(";")),
        p.escape_monotone_r.to_string(),
        p.escape_horizon.to_string(),
        p.replicas.to_string(),
        dm.violations.to_string(),
    ]);
    Ok(vec![surv, st, mono])
}

fn crossing(p: &Params, stream: Stream, runner: &Parallel) -> RunResult<Table> {
    let region = CrossingRegion::new(p.crossing_l, p.crossing_big_l, (0, 0))?;
    let steps = p.crossing_steps.build();
    let mut t = Table::new("crossing", &["p", "l", "big_l", "steps", "replicas", "crossed", "frequency", "ci_low", "ci_high"]);
    for (i, &q) in p.crossing_p.iter().enumerate() {
        let est = estimate_pk(&region, &steps, FieldSource::Bernoulli(q), p.replicas, stream.child(i as u64), runner)?;
        t.push(vec![
            num(q),
            p.crossing_l.to_string(),
            p.crossing_big_l.to_string(),
            p.crossing_steps.to_string(),
            est.replicas.to_string(),
            (est.replicas - est.blocked).to_string(),
            num(1.0 - est.p_hat),
            num(1.0 - est.ci_high),
            num(1.0 - est.ci_low),
        ]);
    }
    Ok(t)
}

fn field_source(p: &Params) -> FieldSource {
    match p.pk_source {
        Source::Open => FieldSource::AllOpen,
        Source::Closed => FieldSource::AllClosed,
        Source::Bernoulli => FieldSource::Bernoulli(p.pk_p),
        Source::Exclusion => FieldSource::Exclusion {
            rho: p.pk_rho,
            rule: p.pk_rule,
            torus_factor: p.pk_torus_factor,
        },
    }
}

fn pk(p: &Params, stream: Stream, runner: &Parallel) -> RunResult<Vec<Table>> {
    let lad = ScaleLadder::from_u64(p.l0, p.k_max)?;
    let steps = p.pk_steps.build();
    let source = field_source(p);
    let mut levels = p.pk_levels.clone();
    levels.sort_unstable();
    levels.dedup();
    let mut est: Vec<(usize, PkEstimate)> = Vec::new();
    let mut t = Table::new(
        "pk",
        &["k", "l", "big_l", "source", "steps", "replicas", "blocked", "p_hat", "ci_low", "ci_high"],
    );
    for &k in &levels {
        let region = CrossingRegion::new(lad.l_i64(k)?, lad.big_l_i64(k)?, (0, 0))?;
        if region.side() > 4096 {
            return Err(escape_core::Error::Invalid(format!("level {k} is too large to simulate")).into());
        }
        progress(&format!("pk level {k}: l = {}, L = {}", region.l, region.big_l));
        let e = estimate_pk(&region, &steps, source, p.replicas, stream.child(k as u64), runner)?;
        t.push(vec![
            k.to_string(),
            region.l.to_string(),
            region.big_l.to_string(),
            Field_show_source(p),
            p.pk_steps.to_string(),
            e.replicas.to_string(),
            e.blocked.to_string(),
            num(e.p_hat),
            num(e.ci_low),
            num(e.ci_high),
        ]);
        est.push((k, e));
    }
    let mut ledger = Table::new(
        "ledger",
        &["k", "m", "rhs_low", "rhs_high", "next_consistent", "trigger", "threshold", "threshold_verdict"],
    );
    for (k, e) in &est {
        if *k == 0 || *k >= p.k_max {
            continue;
        }
        let next = est.iter().find(|(j, _)| *j == k + 1).map(|(_, n)| (n.ci_low, n.ci_high));
        let row = recursion_ledger(&lad, *k, (e.ci_low, e.ci_high), next, power_error(p.h_power), p.c1)?;
        ledger.push(vec![
            k.to_string(),
            row.m.to_string(),
            row.rhs_low.display(30),
            row.rhs_high.display(30),
            row.next_consistent.map(yes).unwrap_or_default(),
            row.trigger.name().into(),
            row.threshold.display(30),
            row.threshold_verdict.name().into(),
        ]);
    }
    let rc = row_closure_probe(p.row_l, p.row_big_l, p.row_rho, p.replicas, stream.label("rows"), runner)?;
    let (lo, hi) = rc.any_row.clopper_pearson(0.05);
    let mut rows = Table::new(
        "rowclosure",
        &["l", "big_l", "rho", "replicas", "p_hat", "ci_low", "ci_high", "per_row_hat", "union_bound", "row_bound"],
    );
    rows.push(vec![
        rc.l.to_string(),
        rc.big_l.to_string(),
        num(rc.rho),
        rc.any_row.trials.to_string(),
        num(rc.any_row.estimate()),
        num(lo),
        num(hi),
        num(rc.per_row.estimate()),
        num(rc.union_bound),
        num(rc.row_bound),
    ]);
    Ok(vec![t, ledger, rows])
}

#[allow(non_snake_case)]
fn Field_show_source(p: &Params) -> String {
    crate::config::Field::show(&p.pk_source)
}

pub fn coupling_table(seed: u64, rates: &[CouplingRates]) -> Table {
    let mut t = Table::new(
        "coupling",
        &[
            "master_seed",
            "rho",
            "rho_prime",
            "t",
            "interval",
            "replicas",
            "rate_A",
            "rate_B",
            "rate_C_given_not_AB",
            "rate_total",
            "bound_A",
            "bound_B",
            "bound_C",
            "se_total",
            "clean",
            "invariant_violations",
            "eta_density",
            "eta_density_se",
            "xi_density",
            "xi_density_se",
        ],
    );
    for r in rates {
        let (time, interval) = (r.plan.t, (r.plan.a, r.plan.b));
        t.push(vec![
            seed.to_string(),
            num(r.rho),
            num(r.rho_prime),
            time.to_string(),
            format!("[{},{}]", interval.0, interval.1),
            r.replicas.to_string(),
            num(r.a.estimate()),
            num(r.b.estimate()),
            num(r.c_not_ab.estimate()),
            num(r.c.estimate()),
            num(r.plan.bound_a()),
            num(r.plan.bound_b(r.rho, r.rho_prime)),
            num(r.plan.bound_c()),
            num(r.c.se()),
            r.clean.to_string(),
            r.invariant_violations.to_string(),
            num(r.eta_density.mean()),
            num(r.eta_density.se()),
            num(r.xi_density.mean()),
            num(r.xi_density.se()),
        ]);
    }
    t
}

fn couple(p: &Params, seed: u64, stream: Stream, runner: &Parallel) -> RunResult<Vec<Table>> {
    let interval = (p.interval[0], p.interval[1]);
    let mut rates = Vec::new();
    for &time in &p.couple_t {
        progress(&format!("coupling at t = {time}"));
        rates.push(domination_failure_rate(p.couple_rho, p.couple_rho_prime, interval, time, p.replicas, stream.child(time), runner)?);
    }
    let t = coupling_table(seed, &rates);
    let m = isolated_pair_meeting(p.meeting_t, p.meeting_start, p.replicas, stream.label("meeting"), runner)?;
    let mut meet = Table::new("meeting", &["t", "start", "replicas", "not_met", "se", "exact", "bound"]);
    meet.push(vec![
        num(m.t),
        m.start.to_string(),
        m.not_met.trials.to_string(),
        num(m.not_met.estimate()),
        num(m.not_met.se()),
        num(m.exact),
        num(m.bound),
    ]);
    Ok(vec![t, meet])
}

pub fn cov_torus(p: &Params, t: f64) -> usize {
    if p.cov_torus > 0 {
        p.cov_torus
    } else {
        512usize.max((8.0 * t).ceil() as usize + 64)
    }
}

pub fn covariance_table(rows: &[CovarianceRow]) -> Table {
    let mut t = Table::new(
        "covariance",
        &[
            "rho",
            "t",
            "replicas",
            "cov_hat",
            "cov_se",
            "rhs_hat",
            "rhs_se",
            "bessel_ref",
            "return_hat",
            "return_se",
            "torus",
        ],
    );
    for r in rows {
        t.push(vec![
            num(r.rho),
            num(r.t),
            r.replicas.to_string(),
            num(r.cov_hat),
            num(r.cov_se),
            num(r.rhs_hat),
            num(r.rhs_se),
            num(r.bessel_ref),
            num(r.return_hat),
            num(r.return_se),
            r.torus.to_string(),
        ]);
    }
    t
}

/// `se` is the binomial standard error under the product measure.
pub fn stationarity_table(rows: &[OccupancyRow]) -> Table {
    let mut st = Table::new("stationarity", &["rho", "t", "site", "replicas", "frequency", "se"]);
    for r in rows {
        let n = r.occupied.trials as f64;
        st.push(vec![
            num(r.rho),
            num(r.t),
            r.site.to_string(),
            r.occupied.trials.to_string(),
            num(r.occupied.estimate()),
            num((r.rho * (1.0 - r.rho) / n).sqrt()),
        ]);
    }
    st
}

fn cov(p: &Params, stream: Stream, runner: &Parallel) -> RunResult<Vec<Table>> {
    let mut rows = Vec::new();
    for (i, &time) in p.cov_t.iter().enumerate() {
        progress(&format!("covariance at t = {time}"));
        rows.push(covariance_probe(p.cov_rho, time, cov_torus(p, time), p.replicas, stream.child(i as u64), runner)?);
    }
    let t = covariance_table(&rows);
    let torus = Torus::new(p.stationarity_torus)?;
    let step = p.stationarity_torus / p.stationarity_sites;
    let probes: Vec<usize> = (0..p.stationarity_sites).map(|i| i * step).collect();
    let mut rows = Vec::new();
    for (i, &rho) in p.stationarity_rho.iter().enumerate() {
        rows.extend(stationarity_probe(rho, torus, &p.stationarity_t, &probes, p.replicas, stream.label("stationarity").child(i as u64), runner)?);
    }
    let st = stationarity_table(&rows);
    Ok(vec![t, st])
}

fn space_time_box(v: &[i64]) -> SpaceTimeBox {
    SpaceTimeBox {
        x0: v[0],
        x1: v[1],
        t0: v[2] as u64,
        t1: v[3] as u64,
    }
}

fn decouple(p: &Params, stream: Stream, runner: &Parallel) -> RunResult<Table> {
    let (b1, b2) = (space_time_box(&p.box1), space_time_box(&p.box2));
    type Event = fn(&TrajectoryRecord, &SpaceTimeBox) -> escape_core::Result<bool>;
    let f: Event = match p.decouple_event {
        BoxEvent::ColumnOpen => column_open,
        BoxEvent::FullyOccupied => fully_occupied,
    };
    let r = box_decoupling_probe(
        p.decouple_rho,
        p.decouple_rho_prime,
        (b1, b2),
        f,
        f,
        p.decouple_torus,
        p.replicas,
        p.decouple_checks,
        stream,
        runner,
    )?;
    let mut t = Table::new(
        "decouple",
        &[
            "rho",
            "rho_prime",
            "box1",
            "box2",
            "event",
            "replicas",
            "joint",
            "first",
            "second",
            "gap",
            "gap_se",
            "distance",
            "distance_hypothesis",
            "monotonicity_checks",
        ],
    );
    let show = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(";");
    t.push(vec![
        num(p.decouple_rho),
        num(p.decouple_rho_prime),
        show(&p.box1),
        show(&p.box2),
        crate::config::Field::show(&p.decouple_event),
        r.replicas.to_string(),
        num(r.joint.estimate()),
        num(r.first.estimate()),
        num(r.second.estimate()),
        num(r.gap),
        num(r.gap_se),
        num(r.distance),
        yes(r.distance_hypothesis),
        r.monotonicity_checks.to_string(),
    ]);
    Ok(t)
}

pub fn bounds_report(p: &Params) -> RunResult<TailReport> {
    let mut rep = poisson_lemma_report(&p.poisson_lambda, &p.poisson_t, DEFAULT_THETA)?;
    let c = c1()?;
    rep.rows.push(TailRow {
        check: "poisson_c1_root",
        point: format!("c1={c}"),
        exact: (c.exp() - 1.0 - 2.0 * c).abs(),
        bound: 1e-12,
    });
    rep.extend(binomial_corollary_report(&p.binomial_n, &p.binomial_p, &p.binomial_t)?);
    let (digits, scale) = crate::config::ratio_digits(&p.kernel_ratio.0).expect("validated");
    let sup = discrete_kernel_sup_check(p.kernel_n, digits, scale);
    rep.rows.push(TailRow {
        check: "kernel_discrete_sup",
        point: format!("n<={};first_failure={}", p.kernel_n, sup.first_failure.map(|n| n.to_string()).unwrap_or("none".into())),
        exact: sup.sup,
        bound: sup.ratio,
    });
    rep.extend(continuous_kernel_report(&p.kernel_t, &p.kernel_x, p.kernel_bound, &p.bessel_t, p.bessel_digits)?);
    Ok(rep)
}

fn bounds(p: &Params) -> RunResult<Table> {
    Ok(bounds_table(&bounds_report(p)?))
}

pub fn bounds_table(rep: &TailReport) -> Table {
    let mut t = Table::new("bounds", &["lemma", "point", "exact", "bound", "margin", "pass"]);
    for r in &rep.rows {
        t.push(vec![r.check.into(), r.point.clone(), num(r.exact), num(r.bound), num(r.margin()), yes(r.pass())]);
    }
    t
}
