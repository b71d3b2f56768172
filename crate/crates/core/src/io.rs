//! JSON network and linkage-config files, and JSON output.
//!
//! Files are read into a `serde_json::Value` first so that syntax errors
//! carry a line and column, then converted by hand so that semantic errors
//! carry the JSON path of the offending node.
//!
//! Tree nodes:
//!
//! ```text
//! {"split": "EFx", "branches": [{"values": ["noerr"], "node": NODE}], "else": NODE}
//! {"pred": ATOM, "yes": NODE, "no": NODE}
//! {"leaf": LABEL}
//! ```
//!
//! Atoms are `{"equal": [T, T]}`, `{"singlet": [T, T]}`,
//! `{"intable": [T, "table"]}` and `{"inset": [T, ["A", "B"]]}` with terms
//! `{"var": "Afname"}` or `{"lit": "DAVID"}`. Labels are numbers or
//! `{"prsing": T}`, `{"lookup": {"var": "X", "table": "t"}}`,
//! `{"pnew": "t"}`, `{"product": [..]}`, `{"sum": [..]}`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::domain::{Alphabet, Domain, VariableDecl};
use crate::engine::{check_normalized, ComplementBlock, Cpd, Network, Posterior};
use crate::env::Env;
use crate::error::{Error, Result};
use crate::label::LabelExpr;
use crate::linkage::{LinkageConfig, PhoneModel};
use crate::predicate::{Atom, ConstraintSet, Literal, Term};
use crate::table::{load_name_table, Count, Coverage, NameTable, TableRegistry, NORMALIZATION_TOL};
use crate::tree::{Branch, TreeNode};

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::At { .. } => e,
        e => Error::At {
            path: path.to_string(),
            source: Box::new(e),
        },
    }
}

fn bad(path: &str, msg: impl Into<String>) -> Error {
    at(path, Error::Parse(msg.into()))
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

fn obj<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let m = v
        .as_object()
        .ok_or_else(|| bad(path, "expected an object"))?;
    if let Some(k) = m.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(bad(path, format!("unknown key `{k}`")));
    }
    Ok(m)
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    m.get(key)
        .ok_or_else(|| bad(path, format!("missing key `{key}`")))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| bad(path, "expected a string"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| bad(path, "expected a number"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

fn strings(v: &Value, path: &str) -> Result<Vec<String>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, s)| string(s, &format!("{path}[{i}]")).map(str::to_string))
        .collect()
}

/// Where `path` fields of table specs are read from.
pub trait TableSource {
    fn read(&self, path: &str) -> Result<String>;
}

/// Reads table files relative to a directory.
pub struct DirSource(pub PathBuf);

impl TableSource for DirSource {
    fn read(&self, path: &str) -> Result<String> {
        let full = self.0.join(path);
        std::fs::read_to_string(&full).map_err(|e| Error::Io {
            path: full.display().to_string(),
            message: e.to_string(),
        })
    }
}

/// Rejects every table file; only inline tables are allowed.
pub struct NoFiles;

impl TableSource for NoFiles {
    fn read(&self, path: &str) -> Result<String> {
        Err(Error::Io {
            path: path.to_string(),
            message: "table files are not available here".into(),
        })
    }
}

fn parse_table(v: &Value, path: &str, source: &dyn TableSource) -> Result<NameTable> {
    let m = obj(
        v,
        path,
        &["id", "entries", "pnew", "n_unseen", "path", "coverage"],
    )?;
    let id = string(field(m, "id", path)?, &format!("{path}.id"))?;
    let pnew = number(field(m, "pnew", path)?, &format!("{path}.pnew"))?;
    match (m.get("entries"), m.get("path")) {
        (Some(entries), None) => {
            let ep = format!("{path}.entries");
            let entries = entries
                .as_object()
                .ok_or_else(|| bad(&ep, "expected an object of name probabilities"))?
                .iter()
                .map(|(k, p)| Ok((k.clone(), number(p, &format!("{ep}.{k}"))?)))
                .collect::<Result<Vec<_>>>()?;
            let n_unseen = match m.get("n_unseen") {
                None | Some(Value::Null) => Count::Unbounded,
                Some(n) => Count::Finite(n.as_u64().ok_or_else(|| {
                    bad(
                        &format!("{path}.n_unseen"),
                        "expected a nonnegative integer",
                    )
                })?),
            };
            NameTable::new(id, entries, pnew, n_unseen).map_err(|e| at(path, e))
        }
        (None, Some(file)) => {
            let file = string(file, &format!("{path}.path"))?;
            let coverage = match m.get("coverage") {
                None => Coverage::default(),
                Some(Value::String(s)) if s == "as_listed" => Coverage::AsListed,
                Some(c) => Coverage::Fraction(number(c, &format!("{path}.coverage"))?),
            };
            let text = source.read(file).map_err(|e| at(path, e))?;
            load_name_table(id, &text, pnew, coverage).map_err(|e| at(path, e))
        }
        _ => Err(bad(
            path,
            "a table needs exactly one of `entries` and `path`",
        )),
    }
}

fn parse_tables(v: Option<&Value>, source: &dyn TableSource) -> Result<TableRegistry> {
    let mut reg = TableRegistry::new();
    let Some(v) = v else { return Ok(reg) };
    for (i, t) in array(v, "tables")?.iter().enumerate() {
        let path = format!("tables[{i}]");
        let table = parse_table(t, &path, source)?;
        let id = table.id().to_string();
        if reg.insert(table).is_some() {
            return Err(bad(&path, format!("duplicate table `{id}`")));
        }
    }
    Ok(reg)
}

fn parse_term(v: &Value, path: &str) -> Result<Term> {
    let m = obj(v, path, &["var", "lit"])?;
    match (m.get("var"), m.get("lit")) {
        (Some(x), None) => Ok(Term::var(string(x, &format!("{path}.var"))?)),
        (None, Some(x)) => Ok(Term::lit(string(x, &format!("{path}.lit"))?)),
        _ => Err(bad(path, "a term is either {\"var\": ..} or {\"lit\": ..}")),
    }
}

fn single_key<'a>(v: &'a Value, path: &str) -> Result<(&'a str, &'a Value)> {
    let m = v
        .as_object()
        .ok_or_else(|| bad(path, "expected an object"))?;
    match m.iter().next() {
        Some((k, x)) if m.len() == 1 => Ok((k.as_str(), x)),
        _ => Err(bad(path, "expected an object with exactly one key")),
    }
}

fn pair<'a>(v: &'a Value, path: &str) -> Result<(&'a Value, &'a Value)> {
    match array(v, path)?.as_slice() {
        [a, b] => Ok((a, b)),
        _ => Err(bad(path, "expected two elements")),
    }
}

fn parse_atom(v: &Value, path: &str) -> Result<Atom> {
    let (kind, args) = single_key(v, path)?;
    let p = format!("{path}.{kind}");
    let (a, b) = pair(args, &p)?;
    let first = parse_term(a, &format!("{p}[0]"))?;
    let second = format!("{p}[1]");
    Ok(match kind {
        "equal" => Atom::equal(first, parse_term(b, &second)?),
        "singlet" => Atom::single_edit(first, parse_term(b, &second)?),
        "intable" => Atom::in_table(first, string(b, &second)?),
        "inset" => Atom::in_set(first, strings(b, &second)?),
        other => return Err(bad(path, format!("unknown predicate `{other}`"))),
    })
}

fn parse_label(v: &Value, path: &str) -> Result<LabelExpr> {
    if let Some(c) = v.as_f64() {
        return Ok(LabelExpr::Const(c));
    }
    let (kind, x) = single_key(v, path)?;
    let p = format!("{path}.{kind}");
    Ok(match kind {
        "prsing" => LabelExpr::PrSing(parse_term(x, &p)?),
        "lookup" => {
            let m = obj(x, &p, &["var", "table"])?;
            LabelExpr::table_pdf(
                string(field(m, "var", &p)?, &format!("{p}.var"))?,
                string(field(m, "table", &p)?, &format!("{p}.table"))?,
            )
        }
        "pnew" => LabelExpr::pnew(string(x, &p)?),
        "product" | "sum" => {
            let parts = array(x, &p)?
                .iter()
                .enumerate()
                .map(|(i, l)| parse_label(l, &format!("{p}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            if kind == "product" {
                LabelExpr::Product(parts)
            } else {
                LabelExpr::Sum(parts)
            }
        }
        other => return Err(bad(path, format!("unknown label `{other}`"))),
    })
}

fn parse_node(v: &Value, path: &str) -> Result<TreeNode> {
    let m = v
        .as_object()
        .ok_or_else(|| bad(path, "expected a tree node object"))?;
    if m.contains_key("leaf") {
        let m = obj(v, path, &["leaf"])?;
        return Ok(TreeNode::leaf(parse_label(
            &m["leaf"],
            &format!("{path}.leaf"),
        )?));
    }
    if m.contains_key("split") {
        let m = obj(v, path, &["split", "branches", "else"])?;
        let var = string(&m["split"], &format!("{path}.split"))?.to_string();
        let bp = format!("{path}.branches");
        let branches = array(field(m, "branches", path)?, &bp)?
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let p = format!("{bp}[{i}]");
                let bm = obj(b, &p, &["values", "node"])?;
                Ok(Branch {
                    values: strings(field(bm, "values", &p)?, &format!("{p}.values"))?
                        .into_iter()
                        .collect(),
                    node: parse_node(field(bm, "node", &p)?, &format!("{p}.node"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let else_branch = match m.get("else") {
            Some(e) => Some(Box::new(parse_node(e, &format!("{path}.else"))?)),
            None => None,
        };
        return Ok(TreeNode::SmallSplit {
            var,
            branches,
            else_branch,
        });
    }
    if m.contains_key("pred") {
        let m = obj(v, path, &["pred", "yes", "no"])?;
        return Ok(TreeNode::pred(
            parse_atom(&m["pred"], &format!("{path}.pred"))?,
            parse_node(field(m, "yes", path)?, &format!("{path}.yes"))?,
            parse_node(field(m, "no", path)?, &format!("{path}.no"))?,
        ));
    }
    Err(bad(
        path,
        "a tree node needs one of `split`, `pred`, `leaf`",
    ))
}

/// How strictly to treat a network file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LoadOptions {
    /// Non-normalized CPDs are errors rather than warnings.
    pub strict: bool,
}

/// A parsed network and the warnings raised while checking it.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub network: Network,
    pub warnings: Vec<String>,
}

pub fn parse_network(text: &str, source: &dyn TableSource, opts: LoadOptions) -> Result<Loaded> {
    let root = parse_value(text)?;
    let m = obj(&root, "$", &["alphabet", "variables", "tables", "cpds"])?;
    let alphabet = match m.get("alphabet") {
        Some(a) => Alphabet::new(string(a, "alphabet")?).map_err(|e| at("alphabet", e))?,
        None => Alphabet::latin(),
    };
    let tables = parse_tables(m.get("tables"), source)?;

    let mut decls = Vec::new();
    for (i, v) in array(field(m, "variables", "$")?, "variables")?
        .iter()
        .enumerate()
    {
        let path = format!("variables[{i}]");
        let vm = obj(v, &path, &["name", "kind", "values"])?;
        let name = string(field(vm, "name", &path)?, &format!("{path}.name"))?;
        let kind = string(field(vm, "kind", &path)?, &format!("{path}.kind"))?;
        let decl = match kind {
            "small" => VariableDecl::small(
                name,
                &strings(field(vm, "values", &path)?, &format!("{path}.values"))?,
            ),
            "large" if vm.contains_key("values") => {
                return Err(bad(&path, "large variables take no `values`"))
            }
            "large" => VariableDecl::large(name, alphabet.clone()),
            other => {
                return Err(bad(
                    &format!("{path}.kind"),
                    format!("unknown kind `{other}`"),
                ))
            }
        };
        decls.push(decl.map_err(|e| at(&path, e))?);
    }
    let env = Env::new(alphabet, tables, decls).map_err(|e| at("variables", e))?;

    let mut cpds = Vec::new();
    for (i, v) in array(field(m, "cpds", "$")?, "cpds")?.iter().enumerate() {
        let path = format!("cpds[{i}]");
        let cm = obj(v, &path, &["child", "parents", "tree"])?;
        let child = string(field(cm, "child", &path)?, &format!("{path}.child"))?;
        let parents = match cm.get("parents") {
            Some(p) => strings(p, &format!("{path}.parents"))?,
            None => Vec::new(),
        };
        let tree = parse_node(field(cm, "tree", &path)?, &format!("{path}.tree"))?;
        cpds.push(Cpd::new(child, &parents, tree, &env).map_err(|e| at(&path, e))?);
    }
    let network = Network::new(env, cpds).map_err(|e| at("cpds", e))?;

    let mut warnings = Vec::new();
    for (i, c) in network.cpds().iter().enumerate() {
        if let Err(e) = check_normalized(c, network.env(), NORMALIZATION_TOL) {
            if opts.strict {
                return Err(at(&format!("cpds[{i}]"), e));
            }
            warnings.push(e.to_string());
        }
    }
    Ok(Loaded { network, warnings })
}

/// Reads a network file; table paths are relative to its directory.
pub fn load_network(path: &Path, opts: LoadOptions) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_network(&text, &DirSource(dir), opts)
}

fn term_json(t: &Term) -> Value {
    match t {
        Term::Var(v) => json!({ "var": v }),
        Term::Lit(v) => json!({ "lit": v }),
    }
}

pub fn atom_json(a: &Atom) -> Value {
    match a {
        Atom::Equal(x, y) => json!({ "equal": [term_json(x), term_json(y)] }),
        Atom::SingleEdit(x, y) => json!({ "singlet": [term_json(x), term_json(y)] }),
        Atom::InTable(x, t) => json!({ "intable": [term_json(x), t] }),
        Atom::InSet(x, s) => json!({ "inset": [term_json(x), s] }),
    }
}

fn label_json(l: &LabelExpr) -> Value {
    match l {
        LabelExpr::Const(c) => json!(c),
        LabelExpr::PrSing(t) => json!({ "prsing": term_json(t) }),
        LabelExpr::TablePdf { var, table } => json!({ "lookup": { "var": var, "table": table } }),
        LabelExpr::PNewConst(t) => json!({ "pnew": t }),
        LabelExpr::Product(ps) => {
            json!({ "product": ps.iter().map(label_json).collect::<Vec<_>>() })
        }
        LabelExpr::Sum(ps) => json!({ "sum": ps.iter().map(label_json).collect::<Vec<_>>() }),
    }
}

pub fn tree_json(n: &TreeNode) -> Value {
    match n {
        TreeNode::Leaf(l) => json!({ "leaf": label_json(l) }),
        TreeNode::SmallSplit {
            var,
            branches,
            else_branch,
        } => {
            let mut m = Map::new();
            m.insert("split".into(), json!(var));
            m.insert(
                "branches".into(),
                Value::Array(
                    branches
                        .iter()
                        .map(|b| json!({ "values": b.values, "node": tree_json(&b.node) }))
                        .collect(),
                ),
            );
            if let Some(e) = else_branch {
                m.insert("else".into(), tree_json(e));
            }
            Value::Object(m)
        }
        TreeNode::PredSplit { atom, yes, no } => {
            json!({ "pred": atom_json(atom), "yes": tree_json(yes), "no": tree_json(no) })
        }
    }
}

fn table_json(t: &NameTable) -> Value {
    let n_unseen = match t.n_unseen() {
        Count::Finite(n) => json!(n),
        Count::Unbounded => Value::Null,
    };
    json!({ "id": t.id(), "entries": t.entries(), "pnew": t.pnew(), "n_unseen": n_unseen })
}

/// The network as a JSON value; tables are written inline.
pub fn network_json(net: &Network) -> Value {
    let env = net.env();
    let variables: Vec<Value> = env
        .variables()
        .iter()
        .map(|v| match &v.domain {
            Domain::SmallExtensional(values) => {
                json!({ "name": v.name, "kind": "small", "values": values })
            }
            Domain::LargeCountable(_) => json!({ "name": v.name, "kind": "large" }),
        })
        .collect();
    let cpds: Vec<Value> = net
        .cpds()
        .iter()
        .map(|c| json!({ "child": c.child, "parents": c.parents, "tree": tree_json(c.factor.root()) }))
        .collect();
    json!({
        "alphabet": env.alphabet.to_string(),
        "variables": variables,
        "tables": env.tables.iter().map(table_json).collect::<Vec<_>>(),
        "cpds": cpds,
    })
}

pub fn serialize_network(net: &Network) -> String {
    serde_json::to_string_pretty(&network_json(net)).expect("JSON values always serialize")
}

fn literal_json(l: &Literal) -> Value {
    json!({ "atom": atom_json(&l.atom), "positive": l.positive })
}

pub fn posterior_json(p: &Posterior) -> Value {
    let complement = match &p.complement {
        Some(c) => json!({
            "description": {
                "subject": c.description.subject,
                "literals": c.description.literals.iter().map(literal_json).collect::<Vec<_>>(),
                "text": c.description.to_string(),
            },
            "total_mass": c.total_mass,
            "per_value": c.per_value,
        }),
        None => Value::Null,
    };
    json!({ "variable": p.variable, "explicit": p.explicit, "complement": complement })
}

pub fn parse_posterior(text: &str) -> Result<Posterior> {
    let root = parse_value(text)?;
    let m = obj(&root, "$", &["variable", "explicit", "complement"])?;
    let variable = string(field(m, "variable", "$")?, "variable")?.to_string();
    let explicit = field(m, "explicit", "$")?
        .as_object()
        .ok_or_else(|| bad("explicit", "expected an object"))?
        .iter()
        .map(|(k, p)| Ok((k.clone(), number(p, &format!("explicit.{k}"))?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let complement = match m.get("complement") {
        None | Some(Value::Null) => None,
        Some(c) => {
            let cm = obj(c, "complement", &["description", "total_mass", "per_value"])?;
            let dp = "complement.description";
            let dm = obj(
                field(cm, "description", "complement")?,
                dp,
                &["subject", "literals", "text"],
            )?;
            let mut description = ConstraintSet::new(string(field(dm, "subject", dp)?, dp)?);
            let lp = format!("{dp}.literals");
            for (i, l) in array(field(dm, "literals", dp)?, &lp)?.iter().enumerate() {
                let p = format!("{lp}[{i}]");
                let lm = obj(l, &p, &["atom", "positive"])?;
                let atom = parse_atom(field(lm, "atom", &p)?, &format!("{p}.atom"))?;
                let positive = field(lm, "positive", &p)?
                    .as_bool()
                    .ok_or_else(|| bad(&p, "expected a boolean `positive`"))?;
                description.push(Literal::new(atom, positive));
            }
            Some(ComplementBlock {
                description,
                total_mass: number(
                    field(cm, "total_mass", "complement")?,
                    "complement.total_mass",
                )?,
                per_value: number(
                    field(cm, "per_value", "complement")?,
                    "complement.per_value",
                )?,
            })
        }
    };
    Ok(Posterior {
        variable,
        explicit,
        complement,
    })
}

/// Pretty JSON with every float written to 17 significant digits.
pub fn to_precise_json(v: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Precise::default());
    v.serialize(&mut ser).expect("JSON values always serialize");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// Pretty-printing formatter that writes floats as `{:.16e}`.
#[derive(Default)]
struct Precise {
    pretty: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + std::io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> std::io::Result<()> {
            self.pretty.$name(w $(, $arg)*)
        })*
    };
}

impl serde_json::ser::Formatter for Precise {
    fn write_f64<W: ?Sized + std::io::Write>(
        &mut self,
        w: &mut W,
        value: f64,
    ) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

fn distribution(v: &Value, path: &str) -> Result<BTreeMap<String, f64>> {
    v.as_object()
        .ok_or_else(|| bad(path, "expected an object of probabilities"))?
        .iter()
        .map(|(k, p)| Ok((k.clone(), number(p, &format!("{path}.{k}"))?)))
        .collect()
}

pub fn parse_linkage_config(text: &str, source: &dyn TableSource) -> Result<LinkageConfig> {
    let root = parse_value(text)?;
    let m = obj(
        &root,
        "$",
        &[
            "alphabet",
            "tables",
            "male_table",
            "female_table",
            "sex_prior",
            "sloppy_prior",
            "error_prior",
            "prior_same",
            "phone",
        ],
    )?;
    let alphabet = match m.get("alphabet") {
        Some(a) => Alphabet::new(string(a, "alphabet")?).map_err(|e| at("alphabet", e))?,
        None => Alphabet::latin(),
    };
    let ep = field(m, "error_prior", "$")?
        .as_object()
        .ok_or_else(|| bad("error_prior", "expected an object"))?;
    let mut error_prior = BTreeMap::new();
    for (k, d) in ep {
        error_prior.insert(k.clone(), distribution(d, &format!("error_prior.{k}"))?);
    }
    let phone = match m.get("phone") {
        None | Some(Value::Null) => None,
        Some(p) => {
            let pm = obj(p, "phone", &["n_values", "move_prob"])?;
            Some(PhoneModel {
                n_values: number(field(pm, "n_values", "phone")?, "phone.n_values")?,
                move_prob: number(field(pm, "move_prob", "phone")?, "phone.move_prob")?,
            })
        }
    };
    let cfg = LinkageConfig {
        alphabet,
        tables: parse_tables(m.get("tables"), source)?,
        male_table: string(field(m, "male_table", "$")?, "male_table")?.to_string(),
        female_table: string(field(m, "female_table", "$")?, "female_table")?.to_string(),
        sex_prior: distribution(field(m, "sex_prior", "$")?, "sex_prior")?,
        sloppy_prior: distribution(field(m, "sloppy_prior", "$")?, "sloppy_prior")?,
        error_prior,
        prior_same: number(field(m, "prior_same", "$")?, "prior_same")?,
        phone,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_linkage_config(path: &Path) -> Result<LinkageConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_linkage_config(&text, &DirSource(dir))
}

/// Files shipped in the crate's `data/` directory, compiled in.
pub struct Shipped;

impl Shipped {
    pub const LINKAGE_CONFIG: &'static str = include_str!("../data/linkage_config.json");
    pub const LINKAGE_NETWORK: &'static str = include_str!("../data/linkage_same.json");
    pub const MALE_NAMES: &'static str = include_str!("../data/male_names.txt");
    pub const FEMALE_NAMES: &'static str = include_str!("../data/female_names.txt");
}

impl TableSource for Shipped {
    fn read(&self, path: &str) -> Result<String> {
        match path {
            "male_names.txt" => Ok(Self::MALE_NAMES.to_string()),
            "female_names.txt" => Ok(Self::FEMALE_NAMES.to_string()),
            other => NoFiles.read(other),
        }
    }
}

/// The default linkage configuration with the shipped name tables.
pub fn shipped_linkage_config() -> Result<LinkageConfig> {
    parse_linkage_config(Shipped::LINKAGE_CONFIG, &Shipped)
}

/// The shipped same-person network file.
pub fn shipped_linkage_network() -> Result<Loaded> {
    parse_network(
        Shipped::LINKAGE_NETWORK,
        &Shipped,
        LoadOptions { strict: true },
    )
}
