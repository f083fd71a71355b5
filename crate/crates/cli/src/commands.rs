use cobord_core::chernweil::{
    all_suites, axioms_suite, chern_suite, pushforward_suite, transgression_suite, DemoConfig, SuiteReport,
};
use cobord_core::fgl::{
    classify_genus, landweber_check, quillen_classify, required_order, tor1, Classification, FormalGroupLaw,
};
use cobord_core::genera::{genus_cpn_via_chern, GenusTable};
use serde_json::{json, Value};

use crate::args::{ClassifyArgs, Command, CwArgs, CwCommand, FglCommand, FglSource, GenusArgs, LandweberArgs, TorArgs};
use crate::inputs;
use crate::report::Report;
use crate::UsageError;

pub fn run(command: &Command, seed: Option<u64>) -> Result<Report, UsageError> {
    match command {
        Command::Genus(a) => genus(a),
        Command::Fgl(FglCommand::Validate(s)) => fgl_validate(s),
        Command::Fgl(FglCommand::Log(s)) => fgl_log(s),
        Command::Fgl(FglCommand::Classify(a)) => fgl_classify(a),
        Command::Landweber(a) => landweber(a),
        Command::Tor1(a) => tor(a),
        Command::Cw(c) => cw(c, seed),
    }
}

fn genus(a: &GenusArgs) -> Result<Report, UsageError> {
    if a.cpn == 0 {
        return Err(UsageError("--cpn must be at least 1".into()));
    }
    let phi = inputs::characteristic_series(&a.phi, a.cpn)?;
    let table = GenusTable::from_series(&phi, a.cpn)?;
    let mut ok = true;
    let mut values = Vec::new();
    let mut rows = Vec::new();
    let mut text = vec![format!("phi = {}", phi.series())];
    for n in 1..=a.cpn {
        let v = table.value(n)?;
        let mut entry = json!({ "n": n, "value": v.to_string() });
        let mut row = vec![n.to_string(), v.to_string()];
        let mut line = format!("CP{n}: {v}");
        if a.check {
            let w = genus_cpn_via_chern(&phi, n)?;
            let agree = &w == v;
            ok &= agree;
            entry["via_chern"] = json!(w.to_string());
            entry["agree"] = json!(agree);
            row.extend([w.to_string(), agree.to_string()]);
            if !agree {
                line.push_str(&format!("  (via Chern numbers: {w})"));
            }
        }
        values.push(entry);
        rows.push(row);
        text.push(line);
    }
    let header = if a.check { vec!["n", "value", "via_chern", "agree"] } else { vec!["n", "value"] };
    Ok(Report {
        command: "genus".into(),
        config: json!({ "phi": a.phi, "cpn": a.cpn, "check": a.check }),
        result: json!({
            "label": phi.label(),
            "series": phi.series().to_string(),
            "ring": phi.ring().as_ref(),
            "values": values,
        }),
        ok,
        header,
        rows,
        text,
    })
}

fn load_law(s: &FglSource) -> Result<(FormalGroupLaw, Value), UsageError> {
    let (law, config) = match (&s.input, &s.fgl) {
        (Some(p), _) => (inputs::formal_group_law(&p.display().to_string(), s.order)?, json!({ "input": p })),
        (None, Some(name)) => (inputs::formal_group_law(name, s.order)?, json!({ "fgl": name, "order": s.order })),
        (None, None) => return Err(UsageError("give --input <file> or --fgl <name>".into())),
    };
    Ok((law, config))
}

fn law_json(f: &FormalGroupLaw) -> Value {
    json!({ "ring": f.ring().as_ref(), "series": f.series().to_string(), "order": f.order() })
}

fn fgl_validate(s: &FglSource) -> Result<Report, UsageError> {
    let (law, config) = load_law(s)?;
    let report = law.validate()?;
    let mut rows = Vec::new();
    let mut text = vec![format!("f = {}", law.series()), format!("valid: {}", report.valid)];
    for c in &report.checks {
        let (m, l, r) = c
            .first_failure
            .as_ref()
            .map_or((String::new(), String::new(), String::new()), |f| (f.monomial.clone(), f.lhs.clone(), f.rhs.clone()));
        rows.push(vec![c.axiom.clone(), c.holds.to_string(), m.clone(), l.clone(), r.clone()]);
        text.push(if c.holds {
            format!("{}: holds", c.axiom)
        } else {
            format!("{}: fails at {m} ({l} vs {r})", c.axiom)
        });
    }
    Ok(Report {
        command: "fgl validate".into(),
        config,
        result: json!({ "law": law_json(&law), "report": report }),
        ok: true,
        header: vec!["axiom", "holds", "monomial", "lhs", "rhs"],
        rows,
        text,
    })
}

fn fgl_log(s: &FglSource) -> Result<Report, UsageError> {
    let (law, config) = load_law(s)?;
    let log = law.log()?;
    let coeffs: Vec<(u32, String)> = (1..=law.order()).map(|k| (k, log.coeff1(k).to_string())).collect();
    Ok(Report {
        command: "fgl log".into(),
        config,
        result: json!({
            "law": law_json(&law),
            "log": log.to_string(),
            "coefficients": coeffs.iter().map(|(k, c)| json!({ "power": k, "coefficient": c })).collect::<Vec<_>>(),
        }),
        ok: true,
        header: vec!["power", "coefficient"],
        rows: coeffs.iter().map(|(k, c)| vec![k.to_string(), c.clone()]).collect(),
        text: vec![format!("f = {}", law.series()), format!("log = {log}")],
    })
}

fn classification_report(c: &Classification, config: Value) -> Report {
    let images: Vec<(String, String)> = c
        .theta
        .source()
        .generators()
        .iter()
        .zip(c.theta.images())
        .map(|(g, img)| (g.name.clone(), img.to_string()))
        .collect();
    let mut text = vec![format!("target = {}", c.target.series())];
    text.extend(images.iter().map(|(g, i)| format!("theta({g}) = {i}")));
    text.push(format!("theta_* of the universal law reproduces the target: {}", c.verified()));
    Report {
        command: "fgl classify".into(),
        config,
        result: json!({
            "target": law_json(&c.target),
            "theta": images.iter().map(|(g, i)| json!({ "generator": g, "image": i })).collect::<Vec<_>>(),
            "pushed": c.pushed.series().to_string(),
            "verified": c.verified(),
            "mismatch": c.mismatch,
        }),
        ok: c.verified(),
        header: vec!["generator", "image"],
        rows: images.into_iter().map(|(g, i)| vec![g, i]).collect(),
        text,
    }
}

fn fgl_classify(a: &ClassifyArgs) -> Result<Report, UsageError> {
    if let Some(g) = &a.genus {
        let order = a.source.order.max(2);
        let phi = inputs::characteristic_series(g, order)?;
        let table = GenusTable::from_series(&phi, order)?;
        let c = classify_genus(&table, order)?;
        return Ok(classification_report(&c, json!({ "genus": g, "order": order })));
    }
    let (law, config) = load_law(&a.source)?;
    Ok(classification_report(&quillen_classify(&law)?, config))
}

fn landweber(a: &LandweberArgs) -> Result<Report, UsageError> {
    let order = a.order.unwrap_or_else(|| required_order(&a.primes, a.stages));
    let law = inputs::formal_group_law(&a.fgl, order)?;
    let reports = landweber_check(&law, &a.primes, a.stages)?;
    let mut rows = Vec::new();
    let mut text = vec![format!("law over {} truncated at order {}", ring_label(&law), law.order())];
    for r in &reports {
        let reason = r.reason.as_deref().map(|s| format!(" ({s})")).unwrap_or_default();
        text.push(format!("p = {}: {}{reason}", r.prime, r.verdict.label()));
        for s in &r.stages {
            rows.push(vec![r.prime.to_string(), r.verdict.label(), s.stage.to_string(), s.v.clone(), s.status.clone()]);
            text.push(format!("  v{} = {}: {}", s.stage, s.v, s.status));
        }
    }
    Ok(Report {
        command: "landweber".into(),
        config: json!({ "fgl": a.fgl, "primes": a.primes, "stages": a.stages, "order": order }),
        result: json!({ "law": law_json(&law), "primes": reports }),
        ok: true,
        header: vec!["prime", "verdict", "stage", "v", "status"],
        rows,
        text,
    })
}

fn ring_label(law: &FormalGroupLaw) -> String {
    serde_json::to_string(law.ring().as_ref()).expect("serializable")
}

fn tor(a: &TorArgs) -> Result<Report, UsageError> {
    let (module, map) = inputs::module_and_map(&a.module, &a.map)?;
    let window = inputs::window(&a.window)?;
    let table = tor1(&module, &map, window)?;
    let text = table
        .iter()
        .map(|t| format!("degree {}: dim {}{}", t.degree, t.dim, if t.partial { " (partial)" } else { "" }))
        .collect();
    Ok(Report {
        command: "tor1".into(),
        config: json!({ "module": a.module, "map": a.map, "window": [window.0, window.1] }),
        result: json!({ "degrees": table }),
        ok: true,
        header: vec!["degree", "dim", "partial"],
        rows: table.iter().map(|t| vec![t.degree.to_string(), t.dim.to_string(), t.partial.to_string()]).collect(),
        text,
    })
}

fn cw_config(a: &CwArgs, seed: Option<u64>) -> Result<DemoConfig, UsageError> {
    let mut cfg = inputs::demo_config(a.demo.as_deref(), a.config.as_deref())?;
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(n) = a.fiber_n {
        cfg.fiber_n = n;
    }
    if let Some(n) = a.interval_n {
        cfg.interval_n = n;
    }
    if let Some(p) = &a.phi {
        cfg.phi = p.clone();
    }
    if let Some(t) = a.identity_tol {
        cfg.identity_tol = t;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cw(c: &CwCommand, seed: Option<u64>) -> Result<Report, UsageError> {
    let (name, a) = match c {
        CwCommand::Chern(a) => ("chern", a),
        CwCommand::Transgression(a) => ("transgression", a),
        CwCommand::Pushforward(a) => ("pushforward", a),
        CwCommand::Axioms(a) => ("axioms", a),
        CwCommand::All(a) => ("all", a),
    };
    let cfg = cw_config(a, seed)?;
    let suites: Vec<SuiteReport> = match c {
        CwCommand::Chern(_) => vec![chern_suite(&cfg)?],
        CwCommand::Transgression(_) => vec![transgression_suite(&cfg)?],
        CwCommand::Pushforward(_) => vec![pushforward_suite(&cfg)?],
        CwCommand::Axioms(_) => vec![axioms_suite(&cfg)?],
        CwCommand::All(_) => all_suites(&cfg)?,
    };
    let pass = suites.iter().all(|s| s.pass);
    let mut rows = Vec::new();
    let mut text = Vec::new();
    for s in &suites {
        for i in &s.identities {
            rows.push(vec![
                s.suite.clone(),
                i.name.clone(),
                i.kind.clone(),
                format!("{:e}", i.residual),
                format!("{:e}", i.tolerance),
                i.pass.to_string(),
            ]);
            text.push(format!(
                "[{}] {} / {}: {} residual {:.3e} (tolerance {:e})",
                if i.pass { "PASS" } else { "FAIL" },
                s.suite,
                i.name,
                i.kind,
                i.residual,
                i.tolerance
            ));
        }
    }
    Ok(Report {
        command: format!("cw {name}"),
        config: serde_json::to_value(&cfg).expect("serializable"),
        result: json!({ "suites": suites, "pass": pass }),
        ok: pass,
        header: vec!["suite", "identity", "kind", "residual", "tolerance", "pass"],
        rows,
        text,
    })
}
