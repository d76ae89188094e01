use crate::config::{parse_grid, Params};
use crate::output::{emit, float, Table};
use anyhow::{bail, Context, Result};
use diraclab_core::cylinder::{cylinder_index, CylinderProblem, OracleConfig, ReversedApsZeroModes};
use diraclab_core::family::{
    family_cylinder_index_bundle, family_predicted_chern, load_family, qwz_chiral_family, qwz_hermitian_family,
    FamilyComponent, SpectralFamily,
};
use diraclab_core::index::{
    aps_density_integral, aps_density_sweep, local_density_integral, local_density_sweep, predicted_index, ApsPairing,
};
use diraclab_core::isospectral::{extract_constant, necessary_condition, trace_difference_sweep, SwapProblem, Verdict};
use diraclab_core::spectrum::{save_spectrum, BoundaryComponent, BoundaryCondition, Orientation};
use diraclab_core::validation;
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Mismatch,
}

fn outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Success
    } else {
        Outcome::Mismatch
    }
}

fn oracle_config(p: &Params) -> Result<OracleConfig> {
    let reversed_aps_zero_modes = match p.reversed_aps_zero_modes.as_deref().unwrap_or("killed") {
        "killed" => ReversedApsZeroModes::Killed,
        "free" => ReversedApsZeroModes::Free,
        other => bail!("--reversed-aps-zero-modes expects killed or free, got '{other}'"),
    };
    Ok(OracleConfig { reversed_aps_zero_modes })
}

fn condition_pairs(p: &Params) -> Result<Vec<(BoundaryCondition, BoundaryCondition)>> {
    match (p.eps0, p.eps1) {
        (Some(a), Some(b)) => Ok(vec![(a, b)]),
        (None, None) => {
            let all = BoundaryCondition::PRIMARY;
            Ok(all.iter().flat_map(|&a| all.iter().map(move |&b| (a, b))).collect())
        }
        _ => bail!("give both --eps0 and --eps1, or neither to sweep all nine pairs"),
    }
}

pub fn model(p: &Params) -> Result<Outcome> {
    let spec = p.boundary_spectrum()?;
    let summary = json!({
        "ker_plus": spec.ker_plus(),
        "ker_minus": spec.ker_minus(),
        "index": spec.index(),
        "distinct_modes": spec.modes().len(),
        "mode_count": spec.mode_count(),
        "cutoff": spec.cutoff(),
        "weyl_constant": spec.weyl_constant(),
    });
    emit(p.out.as_deref(), &(save_spectrum(&spec) + "\n"), Some(&summary))?;
    Ok(Outcome::Success)
}

pub fn density(p: &Params) -> Result<Outcome> {
    let spec = p.boundary_spectrum()?;
    let t = parse_grid(p.t_grid.as_deref().unwrap_or("0.01:0.2:5:log"), "--t-grid")?;
    let u = parse_grid(p.u_grid.as_deref().unwrap_or("0:0.5:11"), "--u-grid")?;
    if t[0] <= 0.0 || u[0] < 0.0 {
        bail!("t must be positive and u nonnegative");
    }
    let upper = p.upper.unwrap_or(0.5);
    let (sweep, integrals, kind, limit) = if p.aps {
        let pairing = match p.pairing.as_deref().unwrap_or("adjoint") {
            "adjoint" => ApsPairing::Adjoint,
            "mirrored" => ApsPairing::Mirrored,
            other => bail!("--pairing expects adjoint or mirrored, got '{other}'"),
        };
        let sweep = aps_density_sweep(&spec, &t, &u, pairing)?;
        let integrals = t
            .iter()
            .map(|&t| aps_density_integral(&spec, t, upper, pairing).map(|e| e.value))
            .collect::<diraclab_core::Result<Vec<f64>>>()?;
        (sweep, integrals, "aps", -0.5 * spec.ker_total() as f64)
    } else {
        let cond = p.eps0.unwrap_or(BoundaryCondition::Plus);
        let orientation = match p.orientation.as_deref().unwrap_or("inward") {
            "inward" => Orientation::Inward,
            "reversed" => Orientation::Reversed,
            other => bail!("--orientation expects inward or reversed, got '{other}'"),
        };
        let comp = BoundaryComponent::new(spec.clone(), cond, orientation);
        let sweep = local_density_sweep(&comp, &t, &u)?;
        let integrals = t
            .iter()
            .map(|&t| local_density_integral(&comp, t, upper))
            .collect::<diraclab_core::Result<Vec<f64>>>()?;
        let sign = cond.local_sign().context("local density needs --eps0 plus or minus")? as f64;
        (sweep, integrals, "local", -sign * 0.5 * comp.effective_index() as f64)
    };
    let mut table = Table::new(&["t", "u", "value", "bound", "integral"]);
    let width = u.len();
    for (k, (t, u, value, bound)) in sweep.rows().enumerate() {
        let u = u.expect("density sweeps carry u");
        table.push(vec![float(t), float(u), float(value), float(bound), float(integrals[k / width])]);
    }
    let summary = json!({
        "kind": kind,
        "upper": upper,
        "limit": limit,
        "integrals": t.iter().zip(&integrals).map(|(t, v)| json!({"t": t, "integral": v})).collect::<Vec<_>>(),
    });
    emit(p.out.as_deref(), &table.to_csv()?, Some(&summary))?;
    Ok(Outcome::Success)
}

pub fn index(p: &Params) -> Result<Outcome> {
    let spec = p.boundary_spectrum()?;
    let length = p.length()?;
    let cfg = oracle_config(p)?;
    let mut table =
        Table::new(&["ker_plus", "ker_minus", "index", "eps0", "eps1", "L", "predicted", "oracle", "match"]);
    let mut all_match = true;
    for (e0, e1) in condition_pairs(p)? {
        let problem = CylinderProblem::new(spec.clone(), length, e0, e1)?;
        let predicted = predicted_index(&problem.components())?;
        let (oracle, matched) = if p.oracle {
            let o = cylinder_index(&problem, cfg)?;
            all_match &= o == predicted;
            (o.to_string(), (o == predicted).to_string())
        } else {
            (String::new(), String::new())
        };
        table.push(vec![
            spec.ker_plus().to_string(),
            spec.ker_minus().to_string(),
            spec.index().to_string(),
            e0.to_string(),
            e1.to_string(),
            float(length),
            predicted.to_string(),
            oracle,
            matched,
        ]);
    }
    let summary = json!({ "oracle": p.oracle, "all_match": all_match });
    emit(p.out.as_deref(), &table.to_csv()?, Some(&summary))?;
    Ok(outcome(all_match))
}

pub fn isospectral(p: &Params) -> Result<Outcome> {
    use BoundaryCondition::{Minus, Plus};
    let spec = p.boundary_spectrum()?;
    let length = p.length()?;
    let eps = [p.eps0.unwrap_or(Plus), p.eps1.unwrap_or(Plus)];
    let eps_prime = [p.eps0_prime.unwrap_or(Minus), p.eps1_prime.unwrap_or(Plus)];
    let tol = p.tol(1e-4)?;
    let mut t = parse_grid(p.t_grid.as_deref().unwrap_or("0.02:0.08:4:log"), "--t-grid")?;
    if t[0] <= 0.0 {
        bail!("t must be positive");
    }
    t.reverse();
    let problem = SwapProblem::new(spec, length, eps, eps_prime)?;
    let swap = problem.condition_swap()?;
    let verdict = necessary_condition(&swap);
    let sweep = trace_difference_sweep(&problem, &t, p.budget.unwrap_or(400), (tol * 1e-2).min(1e-8))?;
    let mut table = Table::new(&["t", "value", "bound"]);
    for (t, _, v, b) in sweep.rows() {
        table.push(vec![float(t), float(v), float(b)]);
    }
    let extracted = extract_constant(&sweep, tol).ok();
    // The heat expansion cannot tell apart two isospectral problems; a
    // nonzero constant must therefore come with a RuledOut verdict.
    let consistent = match (extracted, verdict) {
        (Some(e), Verdict::NotRuledOut) => e.converged && e.constant.abs() <= tol,
        (Some(e), Verdict::RuledOut { .. }) => e.converged && (e.constant - swap.heat_constant()).abs() <= tol,
        (None, _) => true,
    };
    let (s1, s2) = swap.index_sums();
    let summary = json!({
        "verdict": verdict,
        "s1": s1,
        "s2": s2,
        "combination": swap.combination(),
        "heat_constant": swap.heat_constant(),
        "extracted": extracted,
        "consistent": consistent,
    });
    emit(p.out.as_deref(), &table.to_csv()?, Some(&summary))?;
    Ok(outcome(consistent))
}

fn load_or_build_family(p: &Params) -> Result<SpectralFamily> {
    if let Some(path) = &p.family {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return load_family(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()));
    }
    let n = p.n.unwrap_or(32);
    let m = p.mass.unwrap_or(1.0);
    Ok(match p.qwz.as_deref().unwrap_or("chiral") {
        "chiral" => qwz_chiral_family(n, m)?,
        "hermitian" => qwz_hermitian_family(n, m)?,
        other => bail!("--qwz expects chiral or hermitian, got '{other}'"),
    })
}

pub fn family(p: &Params) -> Result<Outcome> {
    let fam = load_or_build_family(p)?;
    let length = p.length()?;
    let cfg = oracle_config(p)?;
    let mut table = Table::new(&[
        "eps0",
        "eps1",
        "predicted_degree0",
        "predicted_degree2",
        "oracle_degree0",
        "oracle_degree2",
        "match",
    ]);
    let mut all_match = true;
    for (e0, e1) in condition_pairs(p)? {
        let predicted = family_predicted_chern(&[
            FamilyComponent { family: &fam, condition: e0, orientation: Orientation::Inward },
            FamilyComponent { family: &fam, condition: e1, orientation: Orientation::Reversed },
        ])?;
        let oracle = family_cylinder_index_bundle(&fam, e0, e1, length, cfg)?.index;
        let matched = predicted == oracle;
        all_match &= matched;
        table.push(vec![
            e0.to_string(),
            e1.to_string(),
            predicted.degree0.to_string(),
            predicted.degree2.to_string(),
            oracle.degree0.to_string(),
            oracle.degree2.to_string(),
            matched.to_string(),
        ]);
    }
    let (cp, cm) = fam.kernel_chern_numbers()?;
    let (kp, km) = fam.kernel_dims();
    let summary = json!({
        "grid_size": fam.grid().size(),
        "ker_plus": kp,
        "ker_minus": km,
        "c1_ker_plus": cp,
        "c1_ker_minus": cm,
        "all_match": all_match,
    });
    emit(p.out.as_deref(), &table.to_csv()?, Some(&summary))?;
    Ok(outcome(all_match))
}

pub fn validate(p: &Params) -> Result<Outcome> {
    let report = validation::run_all()?;
    for c in &report.criteria {
        eprintln!("{}", c.summary_line());
    }
    emit(p.out.as_deref(), &(report.to_json() + "\n"), None)?;
    Ok(outcome(report.passed()))
}
