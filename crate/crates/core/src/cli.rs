//! Builds the objects named in a [`WorkspaceDoc`] and runs commands on them.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::algebra::{cohomology_dims, nilpotency_index, radical, FinAlgebra};
use crate::dsl::{command_accepts, AlgebraExpr, Arg, Base, FamilyExpr, Kind, LinComb, StmtKind, Tau, WorkspaceDoc};
use crate::error::{Error, Result};
use crate::exactmat::{IntMatrix, SparseVec};
use crate::families::{green, kk_family, kronecker, peirce_dims, r_family, random_family, GldimCriterion, SubspaceFamily};
use crate::ktheory::{chi_matrix, factor_sl, factor_sl_compact, realize_green, verify_iterated_chi, word_product, Transvection};
use crate::quadform::{
    cycle, euler_quadform, exceptional_object_verdict, principal_form, reduce, representation_of_one,
    semidefinite_normal_form,
};
use crate::quiver::{Quiver, QuiverAlgebra, Relation};
use crate::repmod::{
    default_bound, global_dimension, global_dimension_parallel, minimal_resolution, simple_resolution, ModuleContext,
    ModuleInput, Submodule, Verdict,
};
use crate::report::{int, int_rows, ints, CommandResult, Report};
use crate::twisted::{
    canonical_setup, dg_twisted_product, flip, verify_twisting, NablaDeformation, RRing, RTensor, TwistingMap,
};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Replaces the seed of every `rfamily`.
    pub seed_override: Option<u64>,
    /// Default truncation for `gldim` and `resolve` when the command gives none.
    pub bound: Option<usize>,
    pub parallel: bool,
    pub timing: bool,
    /// Run only this command.
    pub only: Option<String>,
}

pub struct TwistData {
    pub left: RRing,
    pub right: RRing,
    pub tensor: RTensor,
    pub tau: TwistingMap,
}

pub struct AlgebraObj {
    pub algebra: FinAlgebra,
    pub quiver: Option<QuiverAlgebra>,
    pub family: Option<SubspaceFamily>,
    pub twist: Option<TwistData>,
}

pub enum Object {
    Quiver(Quiver),
    Relations { quiver: String, relations: Vec<Relation>, trunc: Option<usize> },
    Algebra(Box<AlgebraObj>),
    Matrix(IntMatrix),
}

/// Built objects by name; a failed build keeps its error for later commands.
#[derive(Default)]
pub struct Workspace {
    objects: HashMap<String, std::result::Result<Object, String>>,
}

impl Workspace {
    pub fn build(doc: &WorkspaceDoc, opts: &RunOptions) -> Self {
        let mut ws = Workspace::default();
        for s in doc.definitions() {
            let Some((name, _)) = s.kind.defined_name() else { continue };
            let obj = ws.build_one(&s.kind, opts).map_err(|e| e.to_string());
            ws.objects.insert(name.to_string(), obj);
        }
        ws
    }

    pub fn get(&self, name: &str) -> Result<&Object> {
        match self.objects.get(name) {
            Some(Ok(o)) => Ok(o),
            Some(Err(e)) => Err(Error::Other(format!("`{name}` could not be built: {e}"))),
            None => Err(Error::Other(format!("unknown object `{name}`"))),
        }
    }

    pub fn algebra(&self, name: &str) -> Result<&AlgebraObj> {
        match self.get(name)? {
            Object::Algebra(a) => Ok(a),
            _ => Err(Error::Other(format!("`{name}` is not an algebra"))),
        }
    }

    fn build_one(&self, kind: &StmtKind, opts: &RunOptions) -> Result<Object> {
        Ok(match kind {
            StmtKind::Quiver { vertices, arrows, .. } => {
                let mut q = Quiver::new(*vertices);
                for a in arrows {
                    q.add_arrow(&a.name, a.source - 1, a.target - 1, a.degree)?;
                }
                Object::Quiver(q)
            }
            StmtKind::Relations { quiver, relations, trunc, .. } => {
                let Object::Quiver(q) = self.get(quiver)? else { unreachable!("checked by the parser") };
                let relations = relations
                    .iter()
                    .map(|r| Ok(Relation { terms: r.iter().map(|(c, p)| Ok((c.clone(), q.parse_path(p)?))).collect::<Result<_>>()? }))
                    .collect::<Result<_>>()?;
                Object::Relations { quiver: quiver.clone(), relations, trunc: *trunc }
            }
            StmtKind::Algebra { expr, .. } => Object::Algebra(Box::new(self.build_algebra(expr)?)),
            StmtKind::Family { expr, .. } => {
                let f = match expr {
                    FamilyExpr::Random { n, m, k, seed } => random_family(*n, *m, *k, opts.seed_override.unwrap_or(*seed))?,
                    FamilyExpr::Kk { m } => kk_family(*m)?,
                };
                let qa = r_family(&f)?;
                Object::Algebra(Box::new(AlgebraObj { algebra: qa.algebra().clone(), quiver: Some(qa), family: Some(f), twist: None }))
            }
            StmtKind::Matrix { rows, .. } => Object::Matrix(IntMatrix::from_rows(rows.clone())?),
            StmtKind::Run { .. } => unreachable!("not a definition"),
        })
    }

    fn build_algebra(&self, expr: &AlgebraExpr) -> Result<AlgebraObj> {
        let from_quiver = |qa: QuiverAlgebra| AlgebraObj { algebra: qa.algebra().clone(), quiver: Some(qa), family: None, twist: None };
        match expr {
            AlgebraExpr::Quotient { quiver, relations, differential } => {
                let Object::Quiver(q) = self.get(quiver)? else { unreachable!("checked by the parser") };
                let (rels, trunc) = match relations {
                    Some(r) => match self.get(r)? {
                        Object::Relations { relations, trunc, .. } => (relations.clone(), *trunc),
                        _ => unreachable!("checked by the parser"),
                    },
                    None => (Vec::new(), None),
                };
                let bound = match trunc {
                    Some(t) => t,
                    None => {
                        q.longest_path()
                            .ok_or_else(|| Error::InvalidQuiver(format!("`{quiver}` has an oriented cycle; add `trunc N` to the relations")))?
                            + 1
                    }
                };
                let mut qa = QuiverAlgebra::new(q.clone(), &rels, bound)?;
                if !differential.is_empty() {
                    let mut d = BTreeMap::new();
                    for (arrow, value) in differential {
                        let idx = q.arrow_index(arrow).expect("checked by the parser");
                        d.insert(idx, quiver_element(&qa, value)?);
                    }
                    qa = qa.with_arrow_differential(&d)?;
                }
                Ok(from_quiver(qa))
            }
            AlgebraExpr::Green { k } => Ok(from_quiver(green(*k)?)),
            AlgebraExpr::Kronecker { n, degrees } => Ok(from_quiver(kronecker(*n, degrees)?)),
            AlgebraExpr::Twist { left, right, over, tau, nabla } => {
                let (l, r) = (self.algebra(left)?, self.algebra(right)?);
                let ring = |a: &FinAlgebra| -> Result<RRing> {
                    match over {
                        Base::S => RRing::over_semisimple(a.clone()),
                        Base::Q => RRing::new(a.clone(), FinAlgebra::semisimple(1), vec![a.unit().clone()], None),
                    }
                };
                let (a, b) = (ring(&l.algebra)?, ring(&r.algebra)?);
                let (t, tau) = match tau {
                    Tau::V => canonical_setup(&a, &b)?,
                    Tau::Flip => {
                        let t = RTensor::new(&a, &b)?;
                        let f = flip(&a, &b, &t);
                        (t, f)
                    }
                };
                let deformation = if nabla.is_empty() {
                    None
                } else {
                    let mut table = vec![SparseVec::zero(); b.algebra.dim()];
                    for (arrow, value) in nabla {
                        let y = b
                            .algebra
                            .index_of(arrow)
                            .ok_or_else(|| Error::Other(format!("`{arrow}` is not a basis element of `{right}`")))?;
                        table[y] = t.pure(&element_of(l, value)?, b.algebra.unit());
                    }
                    Some(NablaDeformation { table })
                };
                let p = dg_twisted_product(&a, &b, &tau, deformation.as_ref())?;
                Ok(AlgebraObj {
                    algebra: p.algebra,
                    quiver: None,
                    family: None,
                    twist: Some(TwistData { left: a, right: b, tensor: t, tau }),
                })
            }
        }
    }
}

fn quiver_element(qa: &QuiverAlgebra, value: &LinComb) -> Result<SparseVec> {
    let mut out = SparseVec::zero();
    for (c, p) in value {
        out.add_scaled(&qa.element(p)?, c);
    }
    Ok(out)
}

/// A linear combination of basis labels, or of paths when the algebra has a quiver.
fn element_of(obj: &AlgebraObj, value: &LinComb) -> Result<SparseVec> {
    if let Some(qa) = &obj.quiver {
        return quiver_element(qa, value);
    }
    let mut out = SparseVec::zero();
    for (c, p) in value {
        let i = obj.algebra.index_of(p).ok_or_else(|| Error::Other(format!("no basis element `{p}`")))?;
        out.add_scaled(&SparseVec::unit(i), c);
    }
    Ok(out)
}

/// A command instance: name, target and `key=value` arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invocation {
    pub command: String,
    pub target: Option<String>,
    pub args: Vec<(String, Arg)>,
}

/// The invocations to run: the document's `run` lines, filtered by `opts.only`.
/// Without matching lines, the selected command (or `report-all`) is applied
/// to every definition it accepts.
pub fn plan(doc: &WorkspaceDoc, opts: &RunOptions) -> Vec<Invocation> {
    let listed: Vec<Invocation> = doc
        .commands()
        .filter_map(|s| match &s.kind {
            StmtKind::Run { command, target, args } => {
                Some(Invocation { command: command.clone(), target: target.clone(), args: args.clone() })
            }
            _ => None,
        })
        .filter(|inv| opts.only.as_ref().is_none_or(|c| c == &inv.command))
        .collect();
    if !listed.is_empty() {
        return listed;
    }
    let command = opts.only.clone().unwrap_or_else(|| "report-all".into());
    if command == "report-all" {
        return vec![Invocation { command, target: None, args: Vec::new() }];
    }
    doc.definitions()
        .filter_map(|s| s.kind.defined_name())
        .filter(|(_, k)| command_accepts(&command, *k))
        .map(|(n, _)| Invocation { command: command.clone(), target: Some(n.to_string()), args: Vec::new() })
        .collect()
}

/// Builds the workspace and runs the planned commands. Results keep plan order
/// also when `opts.parallel` spreads them over threads.
pub fn run_document(doc: &WorkspaceDoc, opts: &RunOptions) -> Report {
    let ws = Workspace::build(doc, opts);
    let invocations: Vec<Invocation> = plan(doc, opts).into_iter().flat_map(|inv| expand(doc, &ws, inv)).collect();
    let results = if opts.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = invocations.iter().map(|inv| s.spawn(|| execute(&ws, inv, opts))).collect();
            handles.into_iter().map(|h| h.join().expect("command thread")).collect()
        })
    } else {
        invocations.iter().map(|inv| execute(&ws, inv, opts)).collect()
    };
    Report::new(results)
}

/// Replaces `report-all` by the commands that apply to its target(s).
fn expand(doc: &WorkspaceDoc, ws: &Workspace, inv: Invocation) -> Vec<Invocation> {
    if inv.command != "report-all" {
        return vec![inv];
    }
    let targets: Vec<(String, Kind)> = match &inv.target {
        Some(t) => vec![(t.clone(), doc.kind_of(t).expect("checked by the parser"))],
        None => doc
            .definitions()
            .filter_map(|s| s.kind.defined_name())
            .filter(|(_, k)| command_accepts("report-all", *k))
            .map(|(n, k)| (n.to_string(), k))
            .collect(),
    };
    let mut out = Vec::new();
    for (name, kind) in targets {
        let commands: Vec<&str> = match kind {
            Kind::Matrix => vec!["factor-sl", "realize"],
            _ => {
                let mut c = vec!["validate", "dims", "radical", "gldim", "chi"];
                if let Ok(a) = ws.algebra(&name) {
                    if a.algebra.vertex_count() == 2 {
                        c.extend(["quadform", "exceptional"]);
                    }
                    if a.algebra.has_differential() {
                        c.push("cohomology");
                    }
                }
                if kind == Kind::Family {
                    c.push("gamma");
                }
                if kind == Kind::Twist {
                    c.push("verify-twist");
                }
                c
            }
        };
        out.extend(commands.into_iter().map(|c| Invocation { command: c.into(), target: Some(name.clone()), args: Vec::new() }));
    }
    out
}

fn execute(ws: &Workspace, inv: &Invocation, opts: &RunOptions) -> CommandResult {
    let start = Instant::now();
    let outcome = dispatch(ws, inv, opts);
    let millis = opts.timing.then(|| start.elapsed().as_millis().to_string());
    let (ok, output, error) = match outcome {
        Ok(v) => (true, v, None),
        Err(e) => (false, Value::Null, Some(e.to_string())),
    };
    CommandResult { command: inv.command.clone(), target: inv.target.clone(), ok, output, error, millis }
}

fn arg_usize(inv: &Invocation, key: &str) -> Result<Option<usize>> {
    match inv.args.iter().find(|(k, _)| k == key) {
        None => Ok(None),
        Some((_, Arg::Int(n))) => usize::try_from(n.clone())
            .map(Some)
            .map_err(|_| Error::Other(format!("`{key}` must be a nonnegative integer"))),
        Some((_, Arg::Name(s))) => Err(Error::Other(format!("`{key}` must be an integer, got `{s}`"))),
    }
}

fn check_args(inv: &Invocation, allowed: &[&str]) -> Result<()> {
    match inv.args.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        Some((k, _)) => Err(Error::Other(format!("`{}` takes no argument `{k}`", inv.command))),
        None => Ok(()),
    }
}

fn verdict_value(v: &Verdict) -> Value {
    match v {
        Verdict::Finite(d) => int(d),
        Verdict::ExceedsBound(b) => Value::String(format!(">{b}")),
    }
}

fn word_value(word: &[Transvection]) -> Value {
    Value::Array(
        word.iter()
            .map(|t| {
                let sign = if t.sign > 0 { "" } else { "-" };
                Value::String(format!("E{}{}^{sign}{}", t.i + 1, t.j + 1, t.count))
            })
            .collect(),
    )
}

fn matrix_value(m: &IntMatrix) -> Value {
    int_rows(m.to_rows())
}

fn dispatch(ws: &Workspace, inv: &Invocation, opts: &RunOptions) -> Result<Value> {
    let target = inv.target.as_deref().ok_or_else(|| Error::Other(format!("`{}` needs a target", inv.command)))?;
    match inv.command.as_str() {
        "factor-sl" | "realize" => {
            check_args(inv, &[])?;
            let Object::Matrix(m) = ws.get(target)? else {
                return Err(Error::Other(format!("`{target}` is not a matrix")));
            };
            return if inv.command == "factor-sl" { factor_command(m) } else { realize_command(m) };
        }
        _ => {}
    }
    let obj = ws.algebra(target)?;
    let a = &obj.algebra;
    match inv.command.as_str() {
        "validate" => {
            check_args(inv, &[])?;
            let r = a.validate();
            Ok(json!({
                "valid": r.is_valid(),
                "exhaustive": r.exhaustive,
                "violations": r.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            }))
        }
        "dims" => {
            check_args(inv, &[])?;
            let mut degrees: BTreeMap<i64, usize> = BTreeMap::new();
            for d in (0..a.dim()).map(|b| a.degree(b)) {
                *degrees.entry(d).or_default() += 1;
            }
            let degrees: Map<String, Value> = degrees.into_iter().map(|(d, c)| (d.to_string(), int(c))).collect();
            Ok(json!({
                "dim": int(a.dim()),
                "vertices": int(a.vertex_count()),
                "peirce": int_rows(peirce_dims(a)),
                "degrees": degrees,
            }))
        }
        "radical" => {
            check_args(inv, &[])?;
            let j = radical(a);
            Ok(json!({
                "dim": int(j.dim()),
                "quotient_dim": int(a.dim() - j.dim()),
                "nilpotency_index": int(nilpotency_index(a, &j)?),
            }))
        }
        "gldim" => {
            check_args(inv, &["bound"])?;
            let ctx = ModuleContext::new(a.clone())?;
            let bound = arg_usize(inv, "bound")?.or(opts.bound).unwrap_or_else(|| default_bound(a));
            let g = if opts.parallel { global_dimension_parallel(&ctx, bound)? } else { global_dimension(&ctx, bound)? };
            Ok(json!({
                "gldim": verdict_value(&g.verdict),
                "bound": int(bound),
                "pd_simples": g.simples.iter().map(|r| verdict_value(&r.verdict)).collect::<Vec<_>>(),
            }))
        }
        "resolve" => {
            check_args(inv, &["simple", "projective", "bound"])?;
            let ctx = ModuleContext::new(a.clone())?;
            let bound = arg_usize(inv, "bound")?.or(opts.bound).unwrap_or_else(|| default_bound(a));
            let nv = ctx.vertex_count();
            let vertex = |i: usize| -> Result<usize> {
                if i == 0 || i > nv {
                    return Err(Error::InvalidModule(format!("vertex {i} outside 1..{nv}")));
                }
                Ok(i - 1)
            };
            let (module, r) = match (arg_usize(inv, "simple")?, arg_usize(inv, "projective")?) {
                (Some(i), None) => (format!("S{i}"), simple_resolution(&ctx, vertex(i)?, bound)?),
                (None, Some(i)) => {
                    let e = SparseVec::unit(a.idempotents()[vertex(i)?]);
                    let p = ModuleInput::Embedded(Submodule::right_ideal_of(&ctx, &[e]));
                    (format!("P{i}"), minimal_resolution(&ctx, &p, bound)?)
                }
                _ => return Err(Error::Other("`resolve` needs exactly one of `simple=i` or `projective=i`".into())),
            };
            Ok(json!({
                "module": module,
                "pd": verdict_value(&r.verdict),
                "terms": int_rows(r.terms.iter().cloned()),
                "minimal": r.minimal,
                "exact": r.exact,
            }))
        }
        "chi" => {
            check_args(inv, &[])?;
            Ok(json!({ "matrix": matrix_value(&chi_matrix(a)?) }))
        }
        "quadform" => {
            check_args(inv, &[])?;
            let q = euler_quadform(a)?;
            let d = q.discriminant();
            let mut out = Map::new();
            out.insert("form".into(), Value::String(q.describe()));
            out.insert("discriminant".into(), int(&d));
            if let Ok(nf) = semidefinite_normal_form(&q) {
                out.insert("normal_form".into(), Value::String(format!("{}x^2", nf.h)));
            }
            if let Ok((r, _)) = reduce(&q) {
                out.insert("reduced".into(), Value::String(r.describe()));
                if let Ok(c) = cycle(&r) {
                    out.insert("cycle".into(), Value::Array(c.iter().map(|f| Value::String(f.to_string())).collect()));
                }
                if let Ok(p) = principal_form(&d) {
                    let pc = cycle(&p)?;
                    out.insert("principal_cycle".into(), Value::Array(pc.iter().map(|f| Value::String(f.to_string())).collect()));
                    out.insert("in_principal_cycle".into(), Value::Bool(pc.contains(&r)));
                }
            }
            match representation_of_one(&q) {
                Ok(w) => {
                    out.insert("represents_one".into(), Value::Bool(w.is_some()));
                    if let Some((x, y)) = w {
                        out.insert("witness".into(), ints([x, y]));
                    }
                }
                Err(e) => {
                    out.insert("represents_one".into(), Value::String(format!("unsupported: {e}")));
                }
            }
            Ok(Value::Object(out))
        }
        "exceptional" => {
            check_args(inv, &[])?;
            let q = euler_quadform(a)?;
            Ok(json!({ "form": q.describe(), "exceptional_object_possible": exceptional_object_verdict(a)? }))
        }
        "gamma" => {
            check_args(inv, &[])?;
            let f = obj.family.as_ref().ok_or_else(|| Error::Other(format!("`{target}` is not a family")))?;
            let g = f.gamma_quiver();
            let gldim = match f.gldim_by_criterion() {
                GldimCriterion::Finite(d) => int(d),
                GldimCriterion::Infinite => Value::String("infinite".into()),
            };
            Ok(json!({
                "t": int_rows(f.t_table()),
                "gamma_arrows": int(g.arrows().len()),
                "longest_path": g.longest_path().map(int).unwrap_or(Value::Null),
                "gldim": gldim,
                "family": f.to_json(),
            }))
        }
        "cohomology" => {
            check_args(inv, &[])?;
            let h: Map<String, Value> = cohomology_dims(a).into_iter().map(|(l, d)| (l.to_string(), int(d))).collect();
            Ok(json!({ "dims": h }))
        }
        "verify-twist" => {
            check_args(inv, &[])?;
            let t = obj.twist.as_ref().ok_or_else(|| Error::Other(format!("`{target}` is not a twisted product")))?;
            let r = verify_twisting(&t.left, &t.right, &t.tensor, &t.tau);
            Ok(json!({
                "valid": r.is_valid(),
                "quadruples_checked": int(r.quadruples_checked),
                "violations": serde_json::to_value(&r.violations).expect("violations serialize"),
            }))
        }
        other => Err(Error::Other(format!("unknown command `{other}`"))),
    }
}

fn factor_command(m: &IntMatrix) -> Result<Value> {
    let n = m.rows();
    let word = factor_sl(m)?;
    let compact = factor_sl_compact(m)?;
    Ok(json!({
        "word": word_value(&word),
        "compact": word_value(&compact),
        "verified": word_product(n, &word) == *m && word_product(n, &compact) == *m,
    }))
}

fn realize_command(m: &IntMatrix) -> Result<Value> {
    let p = realize_green(m)?;
    let chi = chi_matrix(p.algebra())?;
    Ok(json!({
        "factors": int(p.factors.len()),
        "dim": int(p.algebra().dim()),
        "chi": matrix_value(&chi),
        "chi_equals_input": chi == *m,
        "chi_multiplicative": verify_iterated_chi(&p)?,
    }))
}
