//! The jobs behind each subcommand.

use std::path::{Path, PathBuf};

use pva_core::lambda::{
    hamiltonian_flow, jacobi_residual, master_bracket, skew_residual, BracketMatrix,
};
use pva_core::liealg::{HalfInt, LieAlgebra, LieContext, LieType, MatElem};
use pva_core::text::{lambda_to_text, parse_lambda, parse_poly, poly_to_text};
use pva_core::walg::{IndexTable, WContext, WOptions};
use pva_core::{Algebra, Error, Formal, Scalar};
use serde_json::{json, Map, Value};

use crate::config::{AlgebraConfig, Entry, Format, JobConfig, LieConfig, Mode, Nilpotent};
use crate::error::{At, CliError, Result};
use crate::output::{jacobi_conditions, mat_json, matrix_json, matrix_lines, skew_conditions};
use crate::table_file::{find_in_dir, load_table, save_table, table_file_name};

/// Settings from the command line that are not part of the job file.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub config_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub table: Option<PathBuf>,
    pub table_dir: Option<PathBuf>,
}

/// The result of a job: whether every check passed, plus both renderings.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub pass: bool,
    pub text: String,
    pub json: Value,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
        }
    }
}

fn provenance(command: &str, opts: &Options, extra: Option<Value>) -> Value {
    let mut m = Map::new();
    m.insert("tool".into(), json!("pva"));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(command));
    if let Some(p) = &opts.config_path {
        m.insert("config".into(), json!(p.display().to_string()));
    }
    if let Some(Value::Object(extra)) = extra {
        m.extend(extra);
    }
    Value::Object(m)
}

fn header(command: &str, opts: &Options) -> String {
    match &opts.config_path {
        Some(p) => format!(
            "# pva {} {command} {}\n",
            env!("CARGO_PKG_VERSION"),
            p.display()
        ),
        None => format!("# pva {} {command}\n", env!("CARGO_PKG_VERSION")),
    }
}

fn outcome(
    command: &str,
    opts: &Options,
    pass: bool,
    body: &str,
    result: Value,
    extra: Option<Value>,
) -> Outcome {
    Outcome {
        pass,
        text: format!("{}{body}", header(command, opts)),
        json: json!({ "provenance": provenance(command, opts, extra), "pass": pass, "result": result }),
    }
}

// ---- algebra and expressions ----

/// The differential algebra and formal variable names of a job.
pub fn build_algebra(cfg: &AlgebraConfig) -> Result<(Algebra, Formal)> {
    let names: Vec<String> = match (&cfg.generators, cfg.n) {
        (Some(g), None) => g.clone(),
        (None, Some(1)) => vec!["u".into()],
        (None, Some(n)) => (1..=n).map(|i| format!("u{i}")).collect(),
        _ => {
            return Err(CliError::config(
                "[algebra] needs exactly one of `generators` and `n`",
            ))
        }
    };
    let gens: Vec<&str> = names.iter().map(String::as_str).collect();
    let params: Vec<&str> = cfg.params.iter().map(String::as_str).collect();
    let mut alg = Algebra::new(&gens, cfg.dims, &params).at("[algebra]")?;
    for f in &cfg.functions {
        let args: Vec<&str> = f.args.iter().map(String::as_str).collect();
        alg = alg
            .with_function(&f.name, &args)
            .at(format!("[algebra] function `{}`", f.name))?;
    }
    let formal = match &cfg.formal {
        Some(names) => {
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            if refs.len() < 2 {
                return Err(CliError::config(
                    "[algebra] `formal` needs at least two names",
                ));
            }
            Formal::new(&refs, cfg.dims)
        }
        None => Formal::standard(cfg.dims),
    };
    Ok((alg, formal))
}

pub fn parse_matrix(
    alg: &Algebra,
    formal: &Formal,
    rows: &[Vec<String>],
    key: &str,
) -> Result<BracketMatrix> {
    let n = alg.gen_count();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::At {
            at: key.into(),
            source: Error::DimensionMismatch(format!("expected a {n}×{n} matrix")),
        });
    }
    let mut out = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let mut parsed = Vec::with_capacity(n);
        for (j, s) in row.iter().enumerate() {
            parsed.push(parse_lambda(alg, formal, s).at(format!(
                "{key} row {}, column {}",
                i + 1,
                j + 1
            ))?);
        }
        out.push(parsed);
    }
    let h = BracketMatrix::from_rows(out).at(key)?;
    h.check(alg).at(key)?;
    Ok(h)
}

/// A scalar expression; every identifier in it is a parameter.
pub fn parse_scalar(text: &str) -> pva_core::Result<Scalar> {
    let mut names: Vec<String> = Vec::new();
    let mut cur = String::new();
    for ch in text.chars().chain(Some(' ')) {
        if ch.is_ascii_alphanumeric() || ch == '_' {
            cur.push(ch);
        } else {
            if cur.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_')
                && !names.contains(&cur)
            {
                names.push(cur.clone());
            }
            cur.clear();
        }
    }
    let mut gen = String::from("x");
    while names.contains(&gen) {
        gen.push('x');
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let alg = Algebra::new(&[&gen], 1, &refs)?;
    parse_poly(&alg, text)?
        .as_constant()
        .ok_or_else(|| Error::Unsupported(format!("`{text}` is not a scalar")))
}

// ---- check, bracket, flow ----

pub fn run_check(cfg: &JobConfig, opts: &Options) -> Result<Outcome> {
    cfg.expect_mode(Mode::PvaCheck)?;
    let (alg, formal) = build_algebra(cfg.algebra()?)?;
    let h = parse_matrix(&alg, &formal, cfg.matrix()?, "matrix")?;
    let skew = skew_residual(&alg, &h)?;
    let jac = jacobi_residual(&alg, &h)?;
    let sc = skew_conditions(&alg, &formal, &skew);
    let jc = jacobi_conditions(&alg, &formal, &jac);
    let pass = sc.is_empty() && jc.is_empty();
    let mut body = String::new();
    let status = |c: &crate::output::ConditionList| {
        if c.is_empty() {
            "holds".to_string()
        } else {
            format!("fails, {} conditions", c.json.len())
        }
    };
    body.push_str(&format!("skew-symmetry: {}\n", status(&sc)));
    for l in &sc.lines {
        body.push_str(l);
        body.push('\n');
    }
    body.push_str(&format!("jacobi identity: {}\n", status(&jc)));
    for l in &jc.lines {
        body.push_str(l);
        body.push('\n');
    }
    let result = json!({
        "skew": { "zero": sc.is_empty(), "conditions": sc.json },
        "jacobi": { "zero": jc.is_empty(), "conditions": jc.json },
    });
    Ok(outcome("check", opts, pass, &body, result, None))
}

pub fn run_bracket(cfg: &JobConfig, opts: &Options) -> Result<Outcome> {
    cfg.expect_mode(Mode::Bracket)?;
    let (alg, formal) = build_algebra(cfg.algebra()?)?;
    let h = parse_matrix(&alg, &formal, cfg.matrix()?, "matrix")?;
    let b = cfg
        .bracket
        .as_ref()
        .ok_or_else(|| CliError::config("missing [bracket] section"))?;
    let f = parse_poly(&alg, &b.left).at("bracket.left")?;
    let g = parse_poly(&alg, &b.right).at("bracket.right")?;
    let r = master_bracket(&alg, &f, &g, &h)?;
    let text = lambda_to_text(&alg, &formal, &r);
    let lam = &formal.families()[0];
    let body = format!("{{{} {lam} {}}} = {text}\n", b.left, b.right);
    let result = json!({ "left": b.left, "right": b.right, "bracket": text });
    Ok(outcome("bracket", opts, true, &body, result, None))
}

pub fn run_flow(cfg: &JobConfig, opts: &Options) -> Result<Outcome> {
    cfg.expect_mode(Mode::Flow)?;
    let acfg = cfg.algebra()?;
    let (alg, formal) = build_algebra(acfg)?;
    if alg.dims() != 1 {
        return Err(CliError::At {
            at: "algebra.dims".into(),
            source: Error::Unsupported("Hamiltonian flows need one derivation".into()),
        });
    }
    let h = parse_matrix(&alg, &formal, cfg.matrix()?, "matrix")?;
    let fl = cfg
        .flow
        .as_ref()
        .ok_or_else(|| CliError::config("missing [flow] section"))?;
    let density = parse_poly(&alg, &fl.density).at("flow.density")?;
    let flow = hamiltonian_flow(&alg, &density, &h)?;
    let render = |flow: &[pva_core::DiffPoly]| -> (Vec<String>, Map<String, Value>) {
        let mut lines = Vec::new();
        let mut m = Map::new();
        for (i, p) in flow.iter().enumerate() {
            let t = poly_to_text(&alg, p);
            lines.push(format!("d{}/dt = {t}", alg.gen_name(i)));
            m.insert(alg.gen_name(i).to_string(), json!(t));
        }
        (lines, m)
    };
    let (lines, m) = render(&flow);
    let mut body = lines.join("\n") + "\n";
    let mut result = json!({ "density": fl.density, "flow": m });
    let mut pass = true;
    if let Some(cmp) = &fl.compare {
        let h2 = parse_matrix(&alg, &formal, &cmp.matrix, "flow.compare.matrix")?;
        let d2 = parse_poly(&alg, &cmp.density).at("flow.compare.density")?;
        let flow2 = hamiltonian_flow(&alg, &d2, &h2)?;
        pass = flow2 == flow;
        let (lines2, m2) = render(&flow2);
        body.push_str(&format!("compare with density {}:\n", cmp.density));
        for l in lines2 {
            body.push_str(&format!("  {l}\n"));
        }
        body.push_str(if pass {
            "flows coincide\n"
        } else {
            "flows differ\n"
        });
        result["compare"] = json!({ "density": cmp.density, "flow": m2, "equal": pass });
    }
    Ok(outcome("flow", opts, pass, &body, result, None))
}

// ---- W-algebras ----

fn entries_to_matrix(n: usize, entries: &[Entry], key: &str) -> Result<MatElem> {
    let mut sparse = Vec::with_capacity(entries.len());
    for e in entries {
        if e.row == 0 || e.col == 0 || e.row > n || e.col > n {
            return Err(CliError::config(format!(
                "{key}: entry ({}, {}) outside 1..{n}",
                e.row, e.col
            )));
        }
        let v = parse_scalar(&e.value).at(format!("{key} ({}, {})", e.row, e.col))?;
        sparse.push((e.row - 1, e.col - 1, v));
    }
    MatElem::from_sparse(n, &sparse).at(key)
}

pub fn build_walg(lie: &LieConfig) -> Result<WContext> {
    let ty: LieType = lie.ty.parse().at("lie.type")?;
    let c = parse_scalar(&lie.c).at("lie.c")?;
    let g = LieAlgebra::with_scale(ty, lie.rank, c).at("lie")?;
    let f = match &lie.f {
        Nilpotent::Named(name) if name == "principal" => g.principal_nilpotent(),
        Nilpotent::Named(other) => {
            return Err(CliError::config(format!(
                "lie.f: `{other}` is neither `principal` nor a list of entries"
            )))
        }
        Nilpotent::Entries(e) => {
            let f = entries_to_matrix(g.rep_dim(), e, "lie.f")?;
            if !f.is_strictly_lower() {
                return Err(CliError::config("lie.f: must be strictly lower triangular"));
            }
            f
        }
    };
    let ctx = LieContext::new(g, &f).at("lie.f")?;
    let opts = WOptions {
        z: lie.z.clone(),
        dispersive: lie.dispersive.clone(),
        gen_names: lie.names.clone(),
    };
    let mut w = WContext::new(ctx, opts).at("lie")?;
    if let Some(s) = &lie.s {
        let s = entries_to_matrix(w.lie().alg.rep_dim(), s, "lie.s")?;
        w.set_s(Some(s)).at("lie.s")?;
    }
    Ok(w)
}

fn walg_provenance(lie: &LieConfig, w: &WContext) -> Value {
    json!({
        "lie": {
            "type": lie.ty,
            "rank": lie.rank,
            "c": lie.c,
            "f": mat_json(&w.lie().triple.f),
            "s": mat_json(w.s()),
            "z": lie.z,
            "dispersive": lie.dispersive,
        }
    })
}

/// Depth of table needed for `d`: the least integer `n ≥ d`.
pub fn table_depth_for(d: HalfInt) -> u32 {
    ((d.twice() + 1) / 2) as u32
}

/// The table to use: `--table`, then the config's `table`, then the
/// shallowest sufficient `table-<n>.txt` in the table directory, and
/// otherwise a freshly generated one.
pub fn resolve_table(
    cfg: &JobConfig,
    opts: &Options,
    need: HalfInt,
) -> Result<(IndexTable, String)> {
    let depth = table_depth_for(need);
    let explicit = opts.table.as_deref().or(cfg.table.as_deref());
    let path = explicit.map(Path::to_path_buf).or_else(|| {
        opts.table_dir
            .as_deref()
            .and_then(|d| find_in_dir(d, depth))
    });
    match path {
        Some(p) => {
            let t = load_table(&p)?;
            t.check_depth(need).at(p.display().to_string())?;
            Ok((t, p.display().to_string()))
        }
        None => Ok((
            IndexTable::generate(depth),
            format!("generated, depth {depth}"),
        )),
    }
}

pub fn run_walg_init(cfg: &JobConfig, opts: &Options) -> Result<Outcome> {
    cfg.expect_mode(Mode::Walg)?;
    let lie = cfg.lie()?;
    let w = build_walg(lie)?;
    let ctx = w.lie();
    let b = &ctx.basis;
    let alg = w.algebra();
    let weights = w.weights();
    let mut body = String::new();
    body.push_str(&format!(
        "g = {}{} (dim {}), depth d = {}\n",
        lie.ty,
        lie.rank,
        ctx.alg.dim(),
        ctx.depth
    ));
    body.push_str(&format!(
        "f = {}\nx = {}\ne = {}\n",
        ctx.triple.f, ctx.triple.x, ctx.triple.e
    ));
    body.push_str(&format!("generators: {}\n", b.len()));
    let mut gens = Vec::new();
    for (j, weight) in weights.iter().enumerate() {
        body.push_str(&format!(
            "  {}: delta {}, weight {}, q = {}, q^ = {}\n",
            alg.gen_name(j),
            b.delta[j],
            weight,
            b.q[j],
            b.qdual[j]
        ));
        gens.push(json!({
            "name": alg.gen_name(j),
            "delta": b.delta[j].to_string(),
            "weight": weight.to_string(),
            "q": mat_json(&b.q[j]),
            "qdual": mat_json(&b.qdual[j]),
        }));
    }
    body.push_str(&format!("s = {}\n", w.s()));
    let grading: Map<String, Value> = ctx
        .eigen_table()
        .iter()
        .map(|(k, d)| (k.to_string(), json!(d)))
        .collect();
    let result = json!({
        "dim": ctx.alg.dim(),
        "depth": ctx.depth.to_string(),
        "triple": {
            "f": mat_json(&ctx.triple.f),
            "x": mat_json(&ctx.triple.x),
            "e": mat_json(&ctx.triple.e),
        },
        "x_diagonal": ctx.triple.x_diagonal().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "grading": grading,
        "generators": gens,
        "s": mat_json(w.s()),
    });
    Ok(outcome(
        "walg init",
        opts,
        true,
        &body,
        result,
        Some(walg_provenance(lie, &w)),
    ))
}

pub fn run_walg_brackets(cfg: &JobConfig, opts: &Options, check: bool) -> Result<Outcome> {
    cfg.expect_mode(Mode::Walg)?;
    let lie = cfg.lie()?;
    let w = build_walg(lie)?;
    let (table, source) = resolve_table(cfg, opts, w.lie().depth)?;
    let h = w.generate_h(&table)?;
    let alg = w.algebra();
    let formal = Formal::standard(1);
    let mut body = format!("index table: {source}\n");
    for l in matrix_lines(alg, &formal, &h) {
        body.push_str(&l);
        body.push('\n');
    }
    let mut result = json!({ "table": source, "H": matrix_json(alg, &formal, &h) });
    let mut pass = true;
    if check {
        let skew = skew_conditions(alg, &formal, &skew_residual(alg, &h)?);
        let jac = jacobi_conditions(alg, &formal, &jacobi_residual(alg, &h)?);
        pass = skew.is_empty() && jac.is_empty();
        body.push_str(&format!(
            "skew-symmetry: {}\njacobi identity: {}\n",
            if skew.is_empty() { "holds" } else { "fails" },
            if jac.is_empty() { "holds" } else { "fails" }
        ));
        for l in skew.lines.iter().chain(&jac.lines) {
            body.push_str(l);
            body.push('\n');
        }
        result["skew"] = json!({ "zero": skew.is_empty(), "conditions": skew.json });
        result["jacobi"] = json!({ "zero": jac.is_empty(), "conditions": jac.json });
    }
    Ok(outcome(
        "walg brackets",
        opts,
        pass,
        &body,
        result,
        Some(walg_provenance(lie, &w)),
    ))
}

pub fn run_walg_virasoro(cfg: &JobConfig, opts: &Options) -> Result<Outcome> {
    cfg.expect_mode(Mode::Walg)?;
    let lie = cfg.lie()?;
    let w = build_walg(lie)?;
    let l = poly_to_text(w.algebra(), &w.virasoro());
    let body = format!("L = {l}\n");
    let result = json!({ "L": l });
    Ok(outcome(
        "walg virasoro",
        opts,
        true,
        &body,
        result,
        Some(walg_provenance(lie, &w)),
    ))
}

/// Where `table gen` writes: `out`, then `--table`, then the table
/// directory, then the working directory.
/// An existing directory given as the output receives `table-<n>.txt`.
pub fn table_output_path(opts: &Options, out: Option<&Path>, depth: u32) -> PathBuf {
    let name = table_file_name(depth);
    match out.or(opts.table.as_deref()) {
        Some(p) if p.is_dir() => p.join(name),
        Some(p) => p.to_path_buf(),
        None => match &opts.table_dir {
            Some(d) => d.join(name),
            None => PathBuf::from(name),
        },
    }
}

pub fn run_table_gen(opts: &Options, depth: u32, out: Option<&Path>) -> Result<Outcome> {
    if depth == 0 {
        return Err(CliError::config("table depth must be at least 1"));
    }
    let path = table_output_path(opts, out, depth);
    let table = IndexTable::generate(depth);
    save_table(&table, &path)?;
    let body = format!(
        "wrote {} chains of depth {depth} to {}\n",
        table.len(),
        path.display()
    );
    let result = json!({ "depth": depth, "rows": table.len(), "path": path.display().to_string() });
    Ok(outcome("walg table gen", opts, true, &body, result, None))
}

pub fn run_table_info(opts: &Options, path: Option<&Path>) -> Result<Outcome> {
    let path = path
        .or(opts.table.as_deref())
        .ok_or_else(|| CliError::config("no table file given"))?;
    let table = load_table(path)?;
    let longest = table.rows().map(|(_, _, s)| s.len()).max().unwrap_or(0);
    let body = format!(
        "{}: depth {}, {} chains, longest chain {longest}, valid\n",
        path.display(),
        table.depth(),
        table.len()
    );
    let result = json!({
        "path": path.display().to_string(),
        "depth": table.depth(),
        "rows": table.len(),
        "longest": longest,
    });
    Ok(outcome("walg table info", opts, true, &body, result, None))
}

/// Dispatches on the config's `mode`; `walg` computes the brackets.
pub fn run_config(cfg: &JobConfig, opts: &Options) -> Result<Outcome> {
    match cfg.mode {
        Some(Mode::PvaCheck) => run_check(cfg, opts),
        Some(Mode::Bracket) => run_bracket(cfg, opts),
        Some(Mode::Flow) => run_flow(cfg, opts),
        Some(Mode::Walg) => run_walg_brackets(cfg, opts, false),
        None => Err(CliError::config("`mode` is required for `run`")),
    }
}
