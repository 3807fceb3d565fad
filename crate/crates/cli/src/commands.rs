use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use ldpc_bounds::bounds::{
    avg_degree_lower_bound, ber_lower_bound, entropy_lower_bound, punctured_rate_upper_bound,
    rate_upper_bound, two_level_rate_bound, BoundReport, SeriesControl, SERIES_WEIGHT_TOTAL,
};
use ldpc_bounds::channels::{Family, MbiosChannel};
use ldpc_bounds::ensembles::{density_from_degree, puncture_fractions, punctured_rate, Ensemble};
use ldpc_bounds::quad::QuadratureConfig;
use ldpc_bounds::solver::{fractional_gap, shannon_limit_ebno, threshold, BoundKind};

use crate::table::{db, percent, rate, sci, Table};

// Half a unit in the sixth decimal.
const PRINT_RESOLUTION: f64 = 5e-7;

/// Numerical settings shared by all commands.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub series: SeriesControl,
    pub quad: QuadratureConfig,
    pub solver_tol: f64,
}

pub fn load_ensemble(path: &Path) -> Result<Ensemble> {
    Ensemble::load(path).with_context(|| format!("--ensemble {}", path.display()))
}

pub fn parse_channel(spec: &str) -> Result<MbiosChannel> {
    spec.parse().map_err(|e| anyhow!("--channel '{spec}': {e}"))
}

/// Refuses values whose certified uncertainty would show in the printed digits.
fn certified(label: &str, value: f64, uncertainty: f64) -> Result<String> {
    if uncertainty > PRINT_RESOLUTION {
        bail!(
            "{label}: certified uncertainty {uncertainty:.1e} exceeds the printed precision; \
             lower --tail-tol or --quad-tol"
        );
    }
    Ok(rate(value))
}

/// Uncertainty of `1 - L/(1 - S/2ln2)` caused by the series half-width.
fn rate_bound_uncertainty(r: &BoundReport) -> f64 {
    let loss = 1.0 - r.capacity_used;
    if loss <= 0.0 {
        return 0.0;
    }
    r.tail_bound * (1.0 - r.value).powi(2) / (SERIES_WEIGHT_TOTAL * loss)
}

fn bound_row(t: &mut Table, label: &str, r: &BoundReport) -> Result<()> {
    let value = certified(label, r.value, rate_bound_uncertainty(r))?;
    t.push(vec![
        label.into(),
        value,
        r.series_terms_used.to_string(),
        sci(r.tail_bound),
    ]);
    Ok(())
}

pub fn bound(
    s: &Settings,
    channel: &str,
    ensemble: &Path,
    rate_override: Option<f64>,
) -> Result<Table> {
    let ch = parse_channel(channel)?;
    let e = load_ensemble(ensemble)?;
    let (ctrl, q) = (&s.series, &s.quad);
    let r = match rate_override {
        Some(r) => r,
        None => e.pair.design_rate()?,
    };
    let gamma = e.pair.check_node_distribution();

    let mut t = Table::new(["quantity", "value", "series_terms", "tail_bound"]);
    let cap = ch.capacity(q).context("capacity")?;
    t.push(vec!["capacity".into(), rate(cap), "-".into(), "-".into()]);
    t.push(vec!["rate".into(), rate(r), "-".into(), "-".into()]);
    bound_row(
        &mut t,
        "rate_upper_bound",
        &rate_upper_bound(&ch, &gamma, ctrl, q)?,
    )?;
    bound_row(
        &mut t,
        "two_level_rate_bound",
        &two_level_rate_bound(&ch, &gamma, ctrl, q)?,
    )?;
    if let Some(p) = &e.pattern {
        bound_row(
            &mut t,
            "punctured_rate_upper_bound",
            &punctured_rate_upper_bound(&ch, &e.pair, p, ctrl, q)?,
        )?;
    }
    let h = entropy_lower_bound(&ch, r, &gamma, ctrl, q)?;
    let h_unc = (1.0 - r) * h.tail_bound / SERIES_WEIGHT_TOTAL;
    t.push(vec![
        "entropy_lower_bound".into(),
        certified("entropy_lower_bound", h.value, h_unc)?,
        h.series_terms_used.to_string(),
        sci(h.tail_bound),
    ]);
    let ber = ber_lower_bound(&ch, r, &gamma, ctrl, q)?;
    t.push(vec![
        "ber_lower_bound".into(),
        rate(ber),
        h.series_terms_used.to_string(),
        sci(h.tail_bound),
    ]);
    Ok(t)
}

fn default_kind(e: &Ensemble) -> BoundKind {
    match &e.pattern {
        Some(p) if !p.is_trivial() => BoundKind::Punctured,
        _ => BoundKind::Unquantized,
    }
}

pub fn threshold_cmd(
    s: &Settings,
    family: Family,
    ensemble: &Path,
    kind: Option<BoundKind>,
    it_db: Option<f64>,
) -> Result<Table> {
    let e = load_ensemble(ensemble)?;
    let kind = kind.unwrap_or_else(|| default_kind(&e));
    let pattern = if kind == BoundKind::Punctured {
        e.pattern.as_ref()
    } else {
        e.pattern.as_ref().filter(|p| !p.is_trivial())
    };
    let rep = threshold(
        family,
        &e.pair,
        pattern,
        kind,
        &s.series,
        &s.quad,
        s.solver_tol,
    )?;

    let mut t = Table::new(["quantity", "value"]);
    t.push(vec!["ensemble".into(), e.label().into()]);
    t.push(vec!["bound_kind".into(), kind.to_string()]);
    t.push(vec!["design_rate".into(), rate(rep.target_rate)]);
    t.push(vec!["rate_reference".into(), rate(rep.rate_reference)]);
    t.push(vec![
        format!("threshold_{}", param_name(family)),
        rate(rep.channel_param),
    ]);
    t.push(vec!["residual".into(), sci(rep.residual)]);
    if let Some(ml) = rep.ebno_db {
        t.push(vec!["threshold_ebno".into(), format!("{} dB", db(ml))]);
        let cap = shannon_limit_ebno(rep.rate_reference, s.solver_tol, &s.quad)?;
        t.push(vec![
            "capacity_limit_ebno".into(),
            format!("{} dB", db(cap)),
        ]);
        if let Some(it) = it_db {
            t.push(vec!["it_ebno".into(), format!("{} dB", db(it))]);
            let gap = fractional_gap(cap, ml, it).context("--it-db")?;
            t.push(vec!["fractional_gap".into(), format!("{}%", percent(gap))]);
        }
    } else if it_db.is_some() {
        bail!("--it-db: Eb/N0 thresholds only apply to the biawgn family");
    }
    Ok(t)
}

fn param_name(f: Family) -> &'static str {
    match f {
        Family::Biawgn => "sigma",
        Family::Bsc => "crossover",
        Family::Bec => "erasure",
    }
}

#[derive(Debug, Clone)]
struct TableRow {
    name: String,
    design_rate: f64,
    punctured_rate: Option<f64>,
    capacity_db: f64,
    two_level_db: Option<f64>,
    ml_db: f64,
}

fn table_row(s: &Settings, path: &Path) -> Result<TableRow> {
    let e = load_ensemble(path)?;
    let design_rate = e.pair.design_rate()?;
    let pattern = e.pattern.as_ref().filter(|p| !p.is_trivial());
    let punctured = match pattern {
        Some(p) => Some(punctured_rate(
            design_rate,
            puncture_fractions(&e.pair, p)?.node,
        )?),
        None => None,
    };
    let solve = |kind, pattern| -> Result<f64> {
        let r = threshold(
            Family::Biawgn,
            &e.pair,
            pattern,
            kind,
            &s.series,
            &s.quad,
            s.solver_tol,
        )?;
        Ok(r.ebno_db.expect("biawgn thresholds carry Eb/N0"))
    };
    let (ml_db, two_level_db) = match pattern {
        Some(p) => (solve(BoundKind::Punctured, Some(p))?, None),
        None => (
            solve(BoundKind::Unquantized, None)?,
            Some(solve(BoundKind::TwoLevel, None)?),
        ),
    };
    let capacity_db = shannon_limit_ebno(punctured.unwrap_or(design_rate), s.solver_tol, &s.quad)?;
    Ok(TableRow {
        name: e.label().to_string(),
        design_rate,
        punctured_rate: punctured,
        capacity_db,
        two_level_db,
        ml_db,
    })
}

pub fn table(s: &Settings, paths: &[PathBuf], it_db: &[f64]) -> Result<Table> {
    if paths.is_empty() {
        bail!("--ensembles: at least one ensemble file is required");
    }
    if !it_db.is_empty() && it_db.len() != paths.len() {
        bail!(
            "--it-db: {} values given for {} ensembles",
            it_db.len(),
            paths.len()
        );
    }
    let rows: Vec<TableRow> = paths
        .par_iter()
        .enumerate()
        .map(|(i, p)| table_row(s, p).with_context(|| format!("row {} ({})", i + 1, p.display())))
        .collect::<Result<_>>()?;

    let mut t = Table::new([
        "name",
        "design_rate",
        "punctured_rate",
        "capacity_limit_db",
        "two_level_db",
        "unquantized_db",
        "it_db",
        "fractional_gap_pct",
    ]);
    for (i, r) in rows.iter().enumerate() {
        let it = it_db.get(i).copied();
        let gap = match it {
            Some(it) => Some(
                fractional_gap(r.capacity_db, r.ml_db, it)
                    .with_context(|| format!("row {} ({}): --it-db", i + 1, r.name))?,
            ),
            None => None,
        };
        t.push(vec![
            r.name.clone(),
            rate(r.design_rate),
            r.punctured_rate.map(rate).unwrap_or_default(),
            db(r.capacity_db),
            r.two_level_db.map(db).unwrap_or_default(),
            db(r.ml_db),
            it.map(db).unwrap_or_default(),
            gap.map(percent).unwrap_or_default(),
        ]);
    }
    Ok(t)
}

pub fn density(s: &Settings, channel: &str, gaps: &[f64]) -> Result<Table> {
    let ch = parse_channel(channel)?;
    if gaps.is_empty() {
        bail!("--gaps: at least one gap is required");
    }
    let cap = ch.capacity(&s.quad)?;
    let mut t = Table::new([
        "eps_gap",
        "target_rate",
        "avg_check_degree",
        "density_lower_bound",
    ]);
    for &eps in gaps {
        if !(eps > 0.0 && eps < 1.0) {
            bail!("--gaps: {eps} is outside (0, 1)");
        }
        let target = (1.0 - eps) * cap;
        let a = avg_degree_lower_bound(&ch, eps, &s.series, &s.quad)
            .with_context(|| format!("--gaps {eps}"))?;
        let dens = density_from_degree(target, a)?;
        t.push(vec![
            format!("{eps}"),
            rate(target),
            format!("{a:.3}"),
            rate(dens),
        ]);
    }
    Ok(t)
}
