//! One handler per subcommand; each returns the echoed inputs, the result
//! object and the checks that decide the exit status.

use std::path::PathBuf;

use chabauty::bounds::{coleman, main_bound, sym2_bound, sym2_genus3, sym2_invariants, SurfaceBoundInputs};
use chabauty::count::curves::{conic_pair, cuspidal_cubic, nodal_cubic};
use chabauty::count::{
    dwork_check, genus_bookkeeping, weil_bound, weil_check, zeta_ops, Ambient, BranchFileEntry, SingularCurve,
    Variety,
};
use chabauty::fgroup::{disk_bound, parse_weierstrass, ExpLog, FormalGroupLaw};
use chabauty::jetint::{max_jet_order, ord_on_branch, overdetermined_bound, BranchRecord, JetOrder, JetSearchConfig};
use chabauty::presets::{coordinate_jet_order, PRODUCT_CURVES, PRODUCT_PRIME, RMK_SHARP, SYM2_GENUS, SYM2_PRIME};
use chabauty::report::{all_pass, Check};
use chabauty::scalar::parse_rational;
use chabauty::selftest::{self, Tier};
use chabauty::zeroest::{zero_bound_1var, TailGuard};
use chabauty::{Error, FiniteField, LocalFieldParams, Padic, PadicNum, PolyOneForm, Result, TruncSeries};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::input::{branch_file, jet_file, read_json};

pub struct Outcome {
    pub inputs_echo: Value,
    pub result: Value,
    pub checks: Vec<Check>,
    pub seed: Option<u64>,
    /// Set when the result is only a partial answer.
    pub inconclusive: bool,
}

impl Outcome {
    fn new(inputs_echo: Value, result: impl Serialize, checks: Vec<Check>) -> Result<Self> {
        Ok(Outcome {
            inputs_echo,
            result: to_value(result)?,
            checks,
            seed: None,
            inconclusive: false,
        })
    }
}

fn to_value(v: impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Consistency(format!("serialization failed: {e}")))
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::usage(format!("missing required flag --{flag}")))
}

fn check_preset(preset: &Option<String>, allowed: &[&str]) -> Result<()> {
    match preset {
        Some(p) if !allowed.contains(&p.as_str()) => Err(Error::usage(format!(
            "unknown preset `{p}` for this command; expected one of {}",
            allowed.join(", ")
        ))),
        _ => Ok(()),
    }
}

fn int_list(s: &str) -> Result<Vec<BigInt>> {
    s.split(',')
        .map(|x| x.trim().parse::<BigInt>().map_err(|_| Error::parse(format!("not an integer: {x:?}"))))
        .collect()
}

pub fn fgroup_exp(a: &FgroupExpArgs) -> Result<Outcome> {
    check_preset(&a.preset, &["multiplicative-group"])?;
    let kind = match (&a.preset, a.kind) {
        (Some(_), _) => LawChoice::Multiplicative,
        (None, Some(k)) => k,
        (None, None) => return Err(Error::usage("missing required flag --kind")),
    };
    let p = match (&a.preset, a.p) {
        (Some(_), None) => 5,
        (_, p) => required(p, "p")?,
    };
    let k = Padic::new(p, a.prec)?;
    let g = match kind {
        LawChoice::Additive => FormalGroupLaw::<PadicNum>::additive(&k, a.dim, a.order)?,
        LawChoice::Multiplicative => FormalGroupLaw::multiplicative(&k, a.order),
        LawChoice::Elliptic => {
            let w = parse_weierstrass(&required(a.a.clone(), "a")?)?;
            FormalGroupLaw::elliptic(&k, &w, a.order, Some(p))?
        }
    };
    let el = ExpLog::new(&g)?;
    let names: Vec<String> = (1..=g.dim()).map(|i| format!("x{i}")).collect();
    let show = |s: &[TruncSeries<PadicNum>]| s.iter().map(|x| x.to_text_with(&names)).collect::<Vec<_>>();
    let mut checks = g.axiom_checks()?;
    checks.extend(el.identity_checks(&g)?);
    checks.extend(el.oracle_checks(&g)?);
    checks.extend(el.convergence_checks(&g, p));
    let echo = json!({"kind": kind, "a": a.a, "p": p, "prec": a.prec, "order": a.order, "dim": g.dim()});
    let result = json!({"exp": show(el.exp()), "log": show(el.log())});
    Outcome::new(echo, result, checks)
}

pub fn zeros(a: &ZerosArgs) -> Result<Outcome> {
    let k = Padic::new(a.p, a.prec)?;
    let h = TruncSeries::<PadicNum>::parse_with(&k, &["z"], a.order, &a.h)?;
    let rho = parse_rational(&a.rho)?;
    let guard = match a.tail {
        TailChoice::Polynomial => TailGuard::Polynomial,
        TailChoice::Factorial => TailGuard::factorial(&parse_rational(&required(a.mu.clone(), "mu")?)?),
    };
    let r = zero_bound_1var(&h, &rho, Some(&guard))?;
    let echo = json!({"h": h.to_text_with(&["z"]), "p": a.p, "rho": rho.to_string(), "tail": guard});
    let checks = r.hypothesis_checks.clone();
    Outcome::new(echo, r, checks)
}

pub fn disk(a: &DiskBoundArgs) -> Result<Outcome> {
    check_preset(&a.preset, &["product-elliptic"])?;
    let (curves, p): (Vec<String>, u64) = match &a.preset {
        Some(_) => (
            PRODUCT_CURVES
                .iter()
                .map(|c| c.map(|x| x.to_string()).join(","))
                .collect(),
            a.p.unwrap_or(PRODUCT_PRIME),
        ),
        None => (
            required(a.curves.clone(), "curves")?.split(';').map(str::to_string).collect(),
            required(a.p, "p")?,
        ),
    };
    let u = a.u.clone().unwrap_or_else(|| "1,1,1".into());
    let eq = match (&a.eq, &a.preset) {
        (Some(e), _) => e.clone(),
        (None, Some(_)) => "3".into(),
        (None, None) => return Err(Error::usage("missing required flag --eq")),
    };
    let k = Padic::new(p, a.prec)?;
    let mut law: Option<FormalGroupLaw<PadicNum>> = None;
    for c in &curves {
        let g = FormalGroupLaw::elliptic(&k, &parse_weierstrass(c)?, a.order, Some(p))?;
        law = Some(match law {
            None => g,
            Some(prev) => FormalGroupLaw::product(&prev, &g),
        });
    }
    let law = law.ok_or_else(|| Error::usage("no curves given"))?;
    let el = ExpLog::new(&law)?;
    let u: Vec<PadicNum> = int_list(&u)?.iter().map(|x| k.from_int(x)).collect();
    let sub = chabauty::fgroup::OneParamSubgroup::normalized(&el, u)?;
    let eq: Vec<usize> = int_list(&eq)?
        .iter()
        .map(|x| usize::try_from(x).map_err(|_| Error::usage(format!("bad equation index {x}"))))
        .collect::<Result<_>>()?;
    let params = LocalFieldParams::new(p, a.e, a.f)?;
    let jet = match a.jet_link.as_deref() {
        None if a.preset.is_some() => Some(JetLink::Reduction),
        None => None,
        Some("auto") => Some(JetLink::Reduction),
        Some(m) => Some(JetLink::Given(
            m.parse().map_err(|_| Error::usage(format!("--jet-link expects an integer or `auto`, got {m:?}")))?,
        )),
    };
    let m = match jet {
        None => None,
        Some(JetLink::Given(m)) => Some(m),
        Some(JetLink::Reduction) => {
            let [j] = eq[..] else {
                return Err(Error::usage("--jet-link auto needs exactly one equation index"));
            };
            Some(coordinate_jet_order(&sub, j)?)
        }
    };
    let r = disk_bound(&sub, &eq, &params, m)?;
    let echo = json!({
        "curves": curves, "p": p, "e": a.e, "f": a.f, "eq_indices": eq,
        "direction": sub.to_json(), "jet_link": m,
    });
    let checks = r.checks.clone();
    Outcome::new(echo, json!({"disk": r, "m": m}), checks)
}

enum JetLink {
    Given(u32),
    Reduction,
}

pub fn jets_mx(a: &JetsMxArgs, json_path: Option<&PathBuf>) -> Result<Outcome> {
    check_preset(&a.preset, &["rmk-sharp"])?;
    let file = match json_path {
        Some(path) => jet_file(&read_json(path)?)?,
        None => Default::default(),
    };
    let p = required(a.p.or(file.p), "p")?;
    let k = FiniteField::prime(p)?;
    let order = a.mcap + 2;
    let preset = a.preset.is_some();
    let pick = |flag: &Option<String>, from_file: &Option<String>, preset_value: &str, name: &str| -> Result<String> {
        match (flag, from_file) {
            (Some(s), _) | (None, Some(s)) => Ok(s.clone()),
            (None, None) if preset => Ok(preset_value.to_string()),
            _ => Err(Error::usage(format!("missing required flag --{name}"))),
        }
    };
    let o1 = pick(&a.omega1, &file.omega1, RMK_SHARP.omega1, "omega1")?;
    let o2 = pick(&a.omega2, &file.omega2, RMK_SHARP.omega2, "omega2")?;
    let w1 = PolyOneForm::parse(&k, order, &o1)?;
    let w2 = PolyOneForm::parse(&k, order, &o2)?;
    let point: Vec<String> = match (&a.point, &file.point) {
        (Some(s), _) => s.split(',').map(|x| x.trim().to_string()).collect(),
        (None, Some(v)) => v.clone(),
        (None, None) => vec!["0".into(), "0".into()],
    };
    let x = point
        .iter()
        .map(|c| Ok(k.from_int(c.parse::<i64>().map_err(|_| Error::parse(format!("not an integer: {c:?}")))?)))
        .collect::<Result<Vec<_>>>()?;

    let mut branch_params: Vec<([String; 2], u32, u32)> =
        file.branches.iter().map(|b| (b.params.clone(), b.a, b.gg)).collect();
    for b in &a.branch {
        let (u, v) = b
            .split_once(';')
            .ok_or_else(|| Error::usage(format!("--branch expects `x(t);y(t)`, got {b:?}")))?;
        branch_params.push(([u.trim().into(), v.trim().into()], 1, 0));
    }
    if branch_params.is_empty() && preset {
        branch_params = RMK_SHARP.branches.iter().map(|[u, v]| ([u.to_string(), v.to_string()], 1, 0)).collect();
    }
    let records = branch_params
        .iter()
        .map(|([u, v], aa, gg)| {
            // branch coordinates are local, centred at the point
            let phi1 = TruncSeries::parse_with(&k, &["t"], order, u)?;
            let phi2 = TruncSeries::parse_with(&k, &["t"], order, v)?;
            let local = PolyOneForm {
                f1: chabauty::jetint::translate(&w1.f1, &x),
                f2: chabauty::jetint::translate(&w1.f2, &x),
            };
            Ok(BranchRecord {
                a: *aa,
                gg: *gg,
                param: Some((u.clone(), v.clone())),
                ord_w0: ord_on_branch(&phi1, &phi2, &local)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = if records.is_empty() { None } else { Some(overdetermined_bound(&records)?) };

    let r = max_jet_order(&w1, &w2, &x, &JetSearchConfig::new(a.mcap, a.ext))?;
    let mut checks = r.checks.clone();
    if let Some(b) = bound {
        checks.push(Check::new(
            "jet_order_within_bound",
            r.m.value() as u64 <= b,
            format!("m = {} <= {b}", r.m.value()),
        ));
    }
    let status = match r.m {
        JetOrder::Exact(_) => "exact",
        JetOrder::AtLeast(_) => "lower_bound",
    };
    let echo = json!({
        "p": p, "omega1": w1.to_text(), "omega2": w2.to_text(), "point": point,
        "mcap": a.mcap, "ext": a.ext, "branches": records,
    });
    let result = json!({
        "m": r.m.value(),
        "status": status,
        "witness_jet": r.witness,
        "field_size": r.field_size,
        "per_field": r.per_field,
        "reason": r.reason,
        "bound_thm_over": bound,
    });
    let mut out = Outcome::new(echo, result, checks)?;
    out.inconclusive = !r.m.is_exact();
    Ok(out)
}

fn parse_ambient(s: &str) -> Result<Ambient> {
    let bad = || Error::usage(format!("ambient must look like P2 or A3, got {s:?}"));
    let (kind, n) = s.split_at(1.min(s.len()));
    let n: usize = n.parse().map_err(|_| bad())?;
    match kind {
        "P" | "p" => Ok(Ambient::Projective(n)),
        "A" | "a" => Ok(Ambient::Affine(n)),
        _ => Err(bad()),
    }
}

fn genera_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| Error::parse(format!("not a genus: {x:?}"))))
        .collect()
}

pub fn count_zeta(a: &CountZetaArgs) -> Result<Outcome> {
    check_preset(&a.preset, &["nodal-cubic"])?;
    let (polys, cd, genera, ambient) = match &a.preset {
        Some(_) => {
            let c = nodal_cubic();
            (vec![c.poly.to_string()], a.cd.unwrap_or(1), Some(c.genera), Ambient::Projective(2))
        }
        None => {
            if a.poly.is_empty() {
                return Err(Error::usage("missing required flag --poly"));
            }
            (
                a.poly.clone(),
                a.cd.unwrap_or(0),
                a.genera.as_deref().map(genera_list).transpose()?,
                parse_ambient(&a.ambient)?,
            )
        }
    };
    let v = Variety::parse(ambient, a.q, &polys)?;
    let counts = (1..=a.nmax).map(|n| v.count_points(n)).collect::<Result<Vec<_>>>()?;
    let z = zeta_ops(&counts, cd)?;
    let mut checks = z.checks.clone();
    let dwork = match &genera {
        Some(g) => {
            let w = dwork_check(&z, g, a.q, a.split_degree)?;
            checks.extend(w.checks.clone());
            Some(w)
        }
        None => None,
    };
    let echo = json!({
        "ambient": ambient, "polys": polys, "q": a.q, "nmax": a.nmax, "c_d": cd, "genera": genera,
        "split_degree": a.split_degree,
    });
    Outcome::new(echo, json!({"zeta": z, "rationality": dwork}), checks)
}

pub fn count_weil(a: &CountWeilArgs, json_path: Option<&PathBuf>) -> Result<Outcome> {
    check_preset(&a.preset, &["nodal-cubic", "cuspidal-cubic", "conic-pair"])?;
    let path = a.branches.as_ref().or(json_path);
    let (poly, genera, entries, file_q): (String, Vec<u32>, Vec<BranchFileEntry>, Option<u64>) =
        match (&a.preset, path) {
            (Some(name), None) => {
                let c = match name.as_str() {
                    "nodal-cubic" => nodal_cubic(),
                    "cuspidal-cubic" => cuspidal_cubic(),
                    _ => conic_pair(),
                };
                (c.poly.to_string(), c.genera, c.branches, None)
            }
            (Some(_), Some(_)) => return Err(Error::usage("give either --preset or a branch file, not both")),
            (None, Some(path)) => {
                let f = branch_file(&read_json(path)?)?;
                let poly = required(a.poly.clone().or(f.poly), "poly")?;
                let genera = match (&a.genera, f.genera) {
                    (Some(g), _) => genera_list(g)?,
                    (None, Some(g)) => g,
                    (None, None) => return Err(Error::usage("missing required flag --genera")),
                };
                (poly, genera, f.branches, f.q)
            }
            (None, None) => return Err(Error::usage("missing required flag --branches")),
        };
    let q = required(a.q.or(file_q), "q")?;
    let v = Variety::parse(Ambient::Projective(2), q, &[&poly])?;
    let degree = v.polys()[0].degree();
    let sc = SingularCurve::new(v, &entries)?;
    let count = sc.a_d_count(a.n)?;
    let qn = q.checked_pow(a.n).ok_or_else(|| Error::usage("q^n overflows"))?;
    let deltas = sc.deltas();
    let ga = genus_bookkeeping(&genera, &deltas);
    let plane = ((degree as i64 - 1) * (degree as i64 - 2)) / 2;
    let mut checks = vec![weil_check(count.a_d, &genera, qn)];
    for (i, sp) in sc.points().iter().enumerate() {
        checks.extend(sp.delta.checks.iter().map(|c| Check {
            name: format!("point_{}_{}", i + 1, c.name),
            ..c.clone()
        }));
    }
    checks.push(Check::new(
        "arithmetic_genus",
        ga == plane,
        format!("sum g + sum delta - r + 1 = {ga}, plane curve of degree {degree}: {plane}"),
    ));
    let echo = json!({
        "poly": poly, "q": q, "n": a.n, "genera": genera,
        "branches": entries,
    });
    let points: Vec<_> = sc.points().iter().map(|s| s.to_json()).collect();
    let result = json!({
        "singular_points": points,
        "count": count,
        "c_d": sc.c_d().to_string(),
        "deltas": deltas,
        "arithmetic_genus": ga,
        "weil_bound": weil_bound(&genera, qn).to_string(),
        "weil_bound_floor": weil_bound(&genera, qn).floor().to_string(),
    });
    Outcome::new(echo, result, checks)
}

pub fn bound_surface(a: &BoundSurfaceArgs) -> Result<Outcome> {
    let params = LocalFieldParams::new(a.p, a.e, a.f)?;
    let mut inputs = SurfaceBoundInputs::new(params, a.c1sq.clone(), a.nxk.clone())?;
    let h = [&a.h2x, &a.hkx, &a.hn];
    if a.n.is_some() || h.iter().any(|x| x.is_some()) {
        let n = required(a.n, "n")?;
        let h2x = required(a.h2x.clone(), "h2x")?;
        let hkx = required(a.hkx.clone(), "hkx")?;
        let hn = required(a.hn.clone(), "hn")?;
        inputs = inputs.with_h_degrees(n, h2x, hkx, hn)?;
    }
    // the report is produced either way; unmet hypotheses decide the exit status
    let r = main_bound(&inputs, true)?;
    let mut checks = r.guards.checks.clone();
    if a.formula_only {
        for c in checks.iter_mut().filter(|c| !c.passed()) {
            *c = Check::skipped(c.name.clone(), format!("{} (not enforced with --formula-only)", c.detail));
        }
    }
    checks.extend(r.checks.clone());
    let echo = json!({
        "p": a.p, "e": a.e, "f": a.f, "c1sq": a.c1sq.to_string(), "nxk": a.nxk.to_string(),
        "n": a.n, "h2x": a.h2x.as_ref().map(|x| x.to_string()), "hkx": a.hkx.as_ref().map(|x| x.to_string()),
        "hn": a.hn.as_ref().map(|x| x.to_string()), "formula_only": a.formula_only,
    });
    Outcome::new(echo, r, checks)
}

pub fn bound_sym2(a: &BoundSym2Args) -> Result<Outcome> {
    check_preset(&a.preset, &["sym2-genus3"])?;
    let (g, p) = match &a.preset {
        Some(_) => (a.genus.unwrap_or(SYM2_GENUS), a.p.unwrap_or(SYM2_PRIME)),
        None => (required(a.genus, "genus")?, required(a.p, "p")?),
    };
    let count = required(a.count.clone(), "count")?;
    let inv = sym2_invariants(g)?;
    let r = if g == 3 { sym2_genus3(p, &count)? } else { sym2_bound(g, p, &count)? };
    let mut checks = r.checks.clone();
    if g == 3 {
        checks.extend(inv.checks.clone());
    }
    let echo = json!({"genus": g, "p": p, "count": count.to_string()});
    Outcome::new(echo, json!({"bound": r, "invariants": inv}), checks)
}

pub fn bound_coleman(a: &BoundColemanArgs) -> Result<Outcome> {
    let r = coleman(a.genus, a.p, &a.count)?;
    let echo = json!({"genus": a.genus, "p": a.p, "count": a.count.to_string()});
    let checks = r.checks.clone();
    Outcome::new(echo, r, checks)
}

pub fn run_selftest(a: &SelftestArgs) -> Result<Outcome> {
    let tier = if a.full { Tier::Full } else { Tier::Quick };
    let report = selftest::run(tier, a.seed);
    let checks = report
        .criteria
        .iter()
        .map(|c| {
            let failed: Vec<String> = c
                .checks
                .iter()
                .filter(|k| !k.passed())
                .map(|k| format!("{}: {}", k.name, k.detail))
                .collect();
            Check::new(
                format!("criterion_{:02}_{}", c.id, c.name),
                c.passed,
                if failed.is_empty() {
                    format!("{} checks", c.checks.len())
                } else {
                    failed.join("; ")
                },
            )
        })
        .collect::<Vec<_>>();
    debug_assert_eq!(all_pass(&checks), report.passed);
    let mut out = Outcome::new(json!({"tier": tier, "seed": a.seed}), report, checks)?;
    out.seed = Some(a.seed);
    Ok(out)
}
