//! The acceptance pipeline: twelve checks run in dependency order, each
//! yielding a status plus computed and expected values.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;
use w535::census::{aut_order, quotient_report, AutResult, CensusError, FaceSpaces, ReportOptions};
use w535::cgroup::MarkedGroup;
use w535::coset::{enumerate, CosetError};
use w535::model::{nu_word, omega_word, shared, J1_ORDER, L2_ORDER, W_ORDER};
use w535::presentation::{bundled, parse_word_list};
use w535::semisparse::{
    builtin, prime_order_words, sample_subgroups, table1_catalog, v_words, SemisparseChecker, SemisparseVerdict,
    SubgroupSpec, Witness, ELEMENT_CAP,
};
use w535::{Alphabet, Model, StabilizerChain, Word};

use crate::compare::CensusRecord;
use crate::config::{Check, RunConfig};
use crate::expected::{ExpectedTables, FACET_TOTAL};
use crate::resolve::table1_census_row;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "SKIP")]
    Skip,
    #[serde(rename = "NOT-REPRODUCIBLE")]
    NotReproducible,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
            Status::NotReproducible => "NOT-REPRODUCIBLE",
        }
    }
}

/// One computed quantity next to the value it should have.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measure {
    pub name: String,
    pub computed: Value,
    pub expected: Value,
    pub ok: bool,
}

impl Measure {
    pub fn new(name: impl Into<String>, computed: impl Serialize, expected: impl Serialize) -> Self {
        let computed = json!(computed);
        let expected = json!(expected);
        Measure {
            name: name.into(),
            ok: computed == expected,
            computed,
            expected,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Measure::new(name, ok, true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub number: usize,
    pub check: Check,
    pub status: Status,
    pub measures: Vec<Measure>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<CensusRecord>,
}

impl CheckReport {
    fn new(check: Check) -> Self {
        CheckReport {
            number: check.number(),
            check,
            status: Status::Pass,
            measures: Vec::new(),
            notes: Vec::new(),
            records: Vec::new(),
        }
    }

    fn push(&mut self, m: Measure) {
        self.measures.push(m);
    }

    fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    /// PASS iff every measure holds, unless a status was already forced.
    fn finish(mut self) -> Self {
        if self.status == Status::Pass && self.measures.iter().any(|m| !m.ok) {
            self.status = Status::Fail;
        }
        self
    }

    pub fn failed_measures(&self) -> impl Iterator<Item = &Measure> {
        self.measures.iter().filter(|m| !m.ok)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub not_reproducible: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub extended: bool,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
}

impl Report {
    fn new(extended: bool, checks: Vec<CheckReport>) -> Self {
        let mut summary = Summary::default();
        for c in &checks {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skip => summary.skip += 1,
                Status::NotReproducible => summary.not_reproducible += 1,
            }
        }
        Report {
            extended,
            checks,
            summary,
        }
    }

    /// 0 when nothing failed or was skipped, 1 on any FAIL, 3 when some
    /// check was skipped for resource reasons and none failed.
    pub fn exit_code(&self) -> i32 {
        if self.summary.fail > 0 {
            1
        } else if self.summary.skip > 0 {
            3
        } else {
            0
        }
    }

    pub fn get(&self, check: Check) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.check == check)
    }

    pub fn records(&self) -> Vec<CensusRecord> {
        let mut by_row: BTreeMap<u32, CensusRecord> = BTreeMap::new();
        for c in &self.checks {
            for r in &c.records {
                by_row
                    .entry(r.row)
                    .and_modify(|e| e.merge(r))
                    .or_insert_with(|| r.clone());
            }
        }
        by_row.into_values().collect()
    }
}

#[derive(Error, Debug)]
enum CheckError {
    /// A configured resource limit stopped the check.
    #[error("{0}")]
    Resource(String),
    #[error("{0}")]
    Other(String),
}

impl From<CosetError> for CheckError {
    fn from(e: CosetError) -> Self {
        match e {
            CosetError::LimitExceeded { .. } => CheckError::Resource(e.to_string()),
            e => CheckError::Other(e.to_string()),
        }
    }
}

impl From<CensusError> for CheckError {
    fn from(e: CensusError) -> Self {
        match e {
            CensusError::Coset(c) => c.into(),
            e => CheckError::Other(e.to_string()),
        }
    }
}

macro_rules! other {
    ($($t:ty),*) => {$(
        impl From<$t> for CheckError {
            fn from(e: $t) -> Self {
                CheckError::Other(e.to_string())
            }
        }
    )*};
}
other!(
    w535::semisparse::SemisparseError,
    w535::stabchain::StabError,
    w535::cgroup::CGroupError,
    w535::perm::PermError,
    w535::presentation::PresentationError,
    w535::model::ModelError
);

/// Census rows whose facet split is checked, with their subgroups.
pub const CENSUS_ROWS: [(u32, &str); 7] = [
    (145, "builtin:trivial"),
    (143, "builtin:omega"),
    (144, "builtin:nu3"),
    (1, "table1:1"),
    (2, "table1:2"),
    (141, "builtin:l2-order3"),
    (142, "builtin:nu2"),
];

/// Rows whose normalizer quotient must always be computed.
pub const REQUIRED_AUT_ROWS: [(u32, &str); 5] = [
    (1, "table1:1"),
    (2, "table1:2"),
    (143, "builtin:omega"),
    (144, "builtin:nu3"),
    (145, "builtin:trivial"),
];

/// Index of `⟨x,y⟩` over `⟨y⟩`, checked only in extended runs.
pub const L_OVER_Y_INDEX: usize = 10_006_920;
pub const L_ORDER: u64 = 30_020_760;

/// Shared, lazily built state. Everything is read-only once built.
pub struct Context {
    pub config: RunConfig,
    pub expected: ExpectedTables,
    spaces: OnceLock<FaceSpaces<'static>>,
    checker: OnceLock<SemisparseChecker<'static>>,
    verdicts: OnceLock<Result<Vec<(SubgroupSpec, SemisparseVerdict)>, String>>,
}

impl Context {
    pub fn new(config: RunConfig, expected: ExpectedTables) -> Self {
        Context {
            config,
            expected,
            spaces: OnceLock::new(),
            checker: OnceLock::new(),
            verdicts: OnceLock::new(),
        }
    }

    pub fn model(&self) -> &'static Model {
        shared()
    }

    pub fn spaces(&self) -> &FaceSpaces<'static> {
        self.spaces.get_or_init(|| FaceSpaces::new(shared(), self.config.limits()))
    }

    pub fn checker(&self) -> &SemisparseChecker<'static> {
        self.checker.get_or_init(|| SemisparseChecker::new(shared()))
    }

    /// Verdicts for the thirty Table 1 rows, in table order.
    pub fn table1_verdicts(&self) -> Result<&[(SubgroupSpec, SemisparseVerdict)], String> {
        self.verdicts
            .get_or_init(|| {
                table1_catalog()
                    .into_par_iter()
                    .map(|spec| {
                        let v = self.checker().check(&spec, ELEMENT_CAP).map_err(|e| format!("row {}: {e}", spec.id))?;
                        Ok((spec, v))
                    })
                    .collect()
            })
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(Clone::clone)
    }

    fn report_options(&self, aut: bool) -> ReportOptions {
        ReportOptions {
            all_ranks: false,
            aut,
            budget_bytes: self.config.task_budget(),
        }
    }
}

/// Runs the selected checks on a pool of `config.workers` threads. The
/// report depends only on the configuration.
pub fn run_pipeline(ctx: &Context) -> Report {
    let mut checks = ctx.config.checks.clone();
    checks.sort();
    checks.dedup();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.config.workers.max(1))
        .build()
        .expect("thread pool");
    let reports = pool.install(|| checks.par_iter().map(|&c| run_check(ctx, c)).collect());
    Report::new(ctx.config.extended, reports)
}

pub fn run_check(ctx: &Context, check: Check) -> CheckReport {
    let mut report = CheckReport::new(check);
    let result = match check {
        Check::J1Enumeration => j1_enumeration(ctx, &mut report),
        Check::L2Enumeration => l2_enumeration(ctx, &mut report),
        Check::IndexTwenty => index_twenty(ctx, &mut report),
        Check::Assembly => assembly(ctx, &mut report),
        Check::CGroup => c_group(ctx, &mut report),
        Check::LSubgroup => l_subgroup(ctx, &mut report),
        Check::Identities => identities(ctx, &mut report),
        Check::ElementOrders => element_orders(ctx, &mut report),
        Check::Semisparse => semisparse(ctx, &mut report),
        Check::Census => census(ctx, &mut report),
        Check::AutOrders => aut_orders(ctx, &mut report),
        Check::Completeness => completeness(ctx, &mut report),
    };
    match result {
        Ok(()) => report.finish(),
        Err(CheckError::Resource(msg)) => {
            report.status = Status::Skip;
            report.note(format!("resource limit: {msg}"));
            report
        }
        Err(CheckError::Other(msg)) => {
            report.status = Status::Fail;
            report.note(format!("error: {msg}"));
            report
        }
    }
}

fn s_words(names: &[&str]) -> Vec<Word> {
    let s = Alphabet::s_alphabet();
    names.iter().map(|n| s.parse(n).expect("generator name")).collect()
}

fn action_order(degree: usize, perms: &[w535::Permutation]) -> u128 {
    StabilizerChain::build(degree, perms).order()
}

fn j1_enumeration(ctx: &Context, r: &mut CheckReport) -> Result<(), CheckError> {
    let pres = bundled::w_prime();
    let table = enumerate(&pres, &s_words(&["s0", "s1", "s2"]), &ctx.config.limits())?;
    let index = table.index().ok_or(CosetError::Incomplete)?;
    r.push(Measure::new("index of <s0,s1,s2> in W'", index, 1463));
    let action = table.coset_action()?;
    r.push(Measure::new("order of the coset action", action_order(index, action.perms()) as u64, J1_ORDER));
    r.note(format!("cosets defined: {}", table.stats().total_defined));
    Ok(())
}

fn l2_enumeration(ctx: &Context, r: &mut CheckReport) -> Result<(), CheckError> {
    let pres = bundled::w_double_prime();
    let table = enumerate(&pres, &s_words(&["s0", "s1", "s2"]), &ctx.config.limits())?;
    r.push(Measure::new(
        "index of <s0,s1,s2> in W''",
        table.index().ok_or(CosetError::Incomplete)?,
        57,
    ));
    let regular = enumerate(&pres, &[], &ctx.config.limits())?;
    r.push(Measure::new(
        "index of the trivial subgroup in W''",
        regular.index().ok_or(CosetError::Incomplete)?,
        L2_ORDER,
    ));
    Ok(())
}

fn index_twenty(ctx: &Context, r: &mut CheckReport) -> Result<(), CheckError> {
    let pres = bundled::w();
    let l = parse_word_list(pres.alphabet(), bundled::L_SUBGROUP_TEXT)?;
    let table = enumerate(&pres, &l, &ctx.config.limits())?;
    let index = table.index().ok_or(CosetError::Incomplete)?;
    r.push(Measure::new("index of L in W", index, 20));
    let action = table.coset_action()?;
    let mut relators_hold = true;
    for rel in pres.relators() {
        relators_hold &= action.evaluate(rel)?.is_identity();
    }
    r.push(Measure::flag("W relators hold in the action", relators_hold));
    r.push(Measure::new("order of the action", action_order(index, action.perms()) as u64, L2_ORDER));
    r.push(Measure::flag("omega acts trivially", action.evaluate(&omega_word())?.is_identity()));
    Ok(())
}

fn assembly(ctx: &Context, r: &mut CheckReport) -> Result<(), CheckError> {
    let model = ctx.model();
    let chain = StabilizerChain::build(model.degree(), model.generators());
    r.push(Measure::new("|<s'_i x s''_i>|", chain.order() as u64, W_ORDER));
    r.push(Measure::new("3420 * 175560", L2_ORDER as u64 * J1_ORDER as u64, W_ORDER));
    model.j1().verify_relators(&bundled::w_prime())?;
    model.l2().verify_relators(&bundled::w_double_prime())?;
    let w = bundled::w();
    let holds = w.relators().iter().all(|rel| model.evaluate(rel).is_identity());
    r.push(Measure::flag("W relators hold on the product", holds));
    Ok(())
}

fn c_group(ctx: &Context, r: &mut CheckReport) -> Result<(), CheckError> {
    let g = MarkedGroup::w(ctx.model());
    g.check_string()?;
    r.push(Measure::new("Schlafli type", g.schlafli(), [5, 3, 5]));
    // H3, H0, H1, H2, <s1,s2>, <s0,s1>, <s2,s3>
    let masks = [0b0111u32, 0b1110, 0b1101, 0b1011, 0b0110, 0b0011, 0b1100];
    let orders: Vec<u64> = masks.iter().map(|&m| g.parabolic(m).order() as u64).collect();
    r.push(Measure::new("parabolic orders", orders, [120, 60, 20, 20, 6, 10, 10]));
    let verdict = g.intersection_property(ELEMENT_CAP)?;
    r.push(Measure::flag("intersection property", verdict.passed()));
    if let w535::cgroup::IntersectionVerdict::Fail { i, j, .. } = verdict {
        r.note(format!(
            "H_{} and H_{} meet outside H_{}",
            w535::cgroup::mask_name(i),
            w535::cgroup::mask_name(j),
            w535::cgroup::mask_name(i & j)
        ));
    }
    Ok(())
}

fn l_subgroup(ctx: &Context, r: &mut CheckReport) -> Result<(), CheckError> {
    let model = ctx.model();
    let s = Alphabet::s_alphabet();
    let xs = parse_word_list(&s, bundled::L_SUBGROUP_TEXT)?;
    let (x1, x2, x3) = (&xs[0], &xs[1], &xs[2]);
    let x = x2.inverse().concat(x3).concat(x1);
    let y = x1.concat(&x3.inverse());
    let lp = bundled::l();
    let images = [x.clone(), y.clone()];
    for rel in lp.relators() {
        let w = rel.substitute(&images);
        r.push(Measure::flag(
            format!("relator {} holds in W", rel.display(lp.alphabet())),
            model.evaluate(&w).is_identity(),
        ));
    }
    let chain = StabilizerChain::build(model.degree(), &[model.evaluate(&x), model.evaluate(&y)]);
    r.push(Measure::new("|<x,y>|", chain.order() as u64, L_ORDER));
    if ctx.config.extended {
        let yw = lp.alphabet().parse("y").expect("generator name");
        let limits = w535::EnumLimits::new(ctx.config.max_cosets.max(4 * L_OVER_Y_INDEX), ctx.config.strategy);
        let table = enumerate(&lp, &[yw], &limits)?;
        r.push(Measure::new(
            "index of <y> in <x,y>",
            table.index().ok_or(CosetError::Incomplete)?,
            L_OVER_Y_INDEX,
        ));
    } else {
        r.note("coset enumeration of <x,y> over <y> runs only with --extended");
    }
    Ok(())
}

fn identities(ctx: &Context, r: &mut CheckReport) -> Result<(), CheckError> {
    let model = ctx.model();
    let omega = model.evaluate(&omega_word());
    r.push(Measure::flag("omega^2 = 1", omega.compose(&omega).is_identity()));
    r.push(Measure::flag("omega != 1", !omega.is_identity()));
    let g = MarkedGroup::w(model);
    r.push(Measure::flag("omega central in H3", g.facet_central_involution().is_ok()));
    let nu = model.evaluate(&nu_word());
    r.push(Measure::flag("nu^6 = 1", nu.pow(6).is_identity()));
    r.push(Measure::flag("nu^3 != 1", !nu.pow(3).is_identity()));
    r.push(Measure::new("order of nu", nu.order(), 6));
    Ok(())
}

fn element_orders(ctx: &Context, r: &mut CheckReport) -> Result<(), CheckError> {
    let j1 = ctx.model().j1();
    let orders: Vec<u64> = prime_order_words().iter().map(|w| j1.evaluate(w).order()).collect();
    r.push(Measure::new("orders of the five words in J1", orders, [3, 5, 19, 11, 7]));
    let classes = j1.classes();
    let s0 = j1.code_of(&j1.marks()[0]).expect("mark is in J1");
    let orbit = classes.sizes[classes.label[s0 as usize] as usize];
    let involutions: u32 = (0..classes.count())
        .filter(|&c| j1.element_order(classes.reps[c]) == 2)
        .map(|c| classes.sizes[c])
        .sum();
    r.push(Measure::new("conjugates of s0 in J1", orbit, 1463));
    r.push(Measure::new("involutions in J1", involutions, orbit));
    Ok(())
}

fn witness_json(model: &Model, w: &Witness) -> Value {
    let s = Alphabet::s_alphabet();
    let (n1, n2) = model.split(w.n);
    let (s1, s2) = model.split(w.s);
    json!({
        "n": w.n,
        "s": w.s,
        "n_orders": [model.j1().element_order(n1), model.l2().element_order(n2)],
        "s_orders": [model.j1().element_order(s1), model.l2().element_order(s2)],
        "j1_conjugator": w.j1_conjugator.display(&s).to_string(),
        "l2_conjugator": w.l2_conjugator.display(&s).to_string(),
    })
}

pub fn verdict_json(model: &Model, spec: &SubgroupSpec, v: &SemisparseVerdict) -> Value {
    json!({
        "subgroup": spec.id,
        "label": spec.label,
        "order": v.order,
        "expected_order": spec.expected_order,
        "semisparse": v.semisparse,
        "witness": v.witness.as_ref().map(|w| witness_json(model, w)),
    })
}

fn semisparse(ctx: &Context, r: &mut CheckReport) -> Result<(), CheckError> {
    let model = ctx.model();
    let checker = ctx.checker();
    v_words().verify(model)?;
    r.push(Measure::flag("v-word chain", true));
    r.push(Measure::new("|H0 H3|", checker.product_set().len(), 1200));
    let verdicts = ctx.table1_verdicts().map_err(CheckError::Other)?;
    r.push(Measure::new("table 1 rows", verdicts.len(), 30));
    let mut semisparse = 0;
    let mut order_mismatch = Vec::new();
    for (spec, v) in verdicts {
        if Some(v.order) != spec.expected_order {
            order_mismatch.push(spec.id.clone());
        }
        if v.semisparse {
            semisparse += 1;
        } else {
            let w = v.witness.as_ref().expect("failing verdicts carry witnesses");
            checker.verify_witness(w)?;
            r.note(format!(
                "row {} ({}) is not semisparse: {}",
                spec.id,
                spec.label.as_deref().unwrap_or(""),
                witness_json(model, w)
            ));
        }
    }
    r.push(Measure::new("rows whose order matches the label", verdicts.len() - order_mismatch.len(), 30));
    r.push(Measure::new("rows verified semisparse", semisparse, 30));
    for name in ["s0", "s1", "s2", "s3", "nu"] {
        let spec = builtin(name).expect("builtin");
        let v = checker.check(&spec, ELEMENT_CAP)?;
        let valid = match &v.witness {
            Some(w) => checker.verify_witness(w).is_ok(),
            None => false,
        };
        r.push(Measure::flag(format!("<{name}> not semisparse with a valid witness"), !v.semisparse && valid));
    }
    Ok(())
}

fn census(ctx: &Context, r: &mut CheckReport) -> Result<(), CheckError> {
    let opts = ctx.report_options(false);
    let rows: Vec<Result<(u32, SubgroupSpec, _), CheckError>> = CENSUS_ROWS
        .par_iter()
        .map(|&(row, reference)| {
            let spec = crate::resolve::resolve(reference).map_err(|e| CheckError::Other(e.to_string()))?;
            let q = quotient_report(ctx.spaces(), &spec, &opts)?;
            Ok((row, spec, q))
        })
        .collect();
    for item in rows {
        let (row, spec, q) = item?;
        let exp = ctx
            .expected
            .census_row(row)
            .ok_or_else(|| CheckError::Other(format!("no expected census row {row}")))?;
        r.push(Measure::new(format!("row {row} ({}) order", spec.id), q.order, exp.order));
        r.push(Measure::new(format!("row {row} ({}) facets (d, h)", spec.id), (q.d, q.h), (exp.d, exp.h)));
        let total = q.d * q.order + q.h * (q.order / 2);
        r.push(Measure::new(format!("row {row} d|N| + h|N|/2"), total, FACET_TOTAL));
        r.records.push(CensusRecord::from_report(row, &q));
    }
    Ok(())
}

fn aut_orders(ctx: &Context, r: &mut CheckReport) -> Result<(), CheckError> {
    let model = ctx.model();
    let budget = ctx.config.task_budget();
    let mut jobs: Vec<(u32, String, bool)> = REQUIRED_AUT_ROWS.iter().map(|&(row, s)| (row, s.to_string(), true)).collect();
    for spec in table1_catalog() {
        let row = table1_census_row(&spec.id).expect("numeric row");
        if !jobs.iter().any(|j| j.0 == row) && ctx.expected.census_row(row).is_some() {
            jobs.push((row, format!("table1:{}", spec.id), false));
        }
    }
    jobs.sort_by_key(|j| j.0);
    type Job = (u32, bool, SubgroupSpec, u64, AutResult);
    let results: Vec<Result<Job, CheckError>> = jobs
        .par_iter()
        .map(|(row, reference, required)| {
            let spec = crate::resolve::resolve(reference).map_err(|e| CheckError::Other(e.to_string()))?;
            let codes = spec.codes(model, ELEMENT_CAP)?;
            let order = codes.len() as u64;
            Ok((*row, *required, spec, order, aut_order(model, codes, budget)?))
        })
        .collect();
    let mut skipped_required = false;
    let mut skipped = Vec::new();
    for item in results {
        let (row, required, spec, order, aut) = item?;
        let exp = ctx
            .expected
            .census_row(row)
            .ok_or_else(|| CheckError::Other(format!("no expected census row {row}")))?;
        match aut {
            AutResult::Computed { conjugates, aut_order } => {
                r.push(Measure::new(format!("row {row} aut order"), aut_order, exp.aut_order));
                r.records.push(CensusRecord {
                    row,
                    subgroup: spec.id.clone(),
                    order,
                    d: None,
                    h: None,
                    aut_order: Some(aut_order),
                    conjugates: Some(conjugates),
                });
            }
            AutResult::Skipped(msg) => {
                skipped_required |= required;
                skipped.push(row);
                r.note(format!("row {row}: {msg}"));
            }
        }
    }
    if !skipped.is_empty() {
        r.note(format!(
            "{} rows over the memory budget of {budget} bytes: {:?}",
            skipped.len(),
            skipped
        ));
    }
    if skipped_required {
        r.status = Status::Skip;
    }
    Ok(())
}

fn completeness(ctx: &Context, r: &mut CheckReport) -> Result<(), CheckError> {
    r.status = Status::NotReproducible;
    r.note(
        "the exhaustive enumeration of all conjugacy classes of semisparse subgroups, \
         and so the completeness of the 145-row census, is out of reach here",
    );
    let model = ctx.model();
    let checker = ctx.checker();
    let verdicts = ctx.table1_verdicts().map_err(CheckError::Other)?;
    let mut tested = 0usize;
    let mut failures = Vec::new();
    for (spec, v) in verdicts {
        if !v.semisparse {
            continue;
        }
        for gens in sample_subgroups(&spec.generators(model)) {
            let codes = model.subgroup_codes(&gens, ELEMENT_CAP)?;
            tested += 1;
            if !checker.check_codes(&codes)?.semisparse {
                failures.push(spec.id.clone());
            }
        }
    }
    r.push(Measure::new("sampled subgroups of semisparse rows that fail", failures.len(), 0));
    r.note(format!("downward closure: {tested} sampled subgroups tested"));
    if !failures.is_empty() {
        r.status = Status::Fail;
    }
    Ok(())
}

/// Rows of a census over arbitrary subgroups, for the `census` verb.
pub fn census_records(
    ctx: &Context,
    specs: &[SubgroupSpec],
    all_ranks: bool,
    aut: bool,
) -> Result<Vec<(SubgroupSpec, w535::census::QuotientReport)>, CensusError> {
    let opts = ReportOptions {
        all_ranks,
        ..ctx.report_options(aut)
    };
    specs
        .par_iter()
        .map(|s| Ok((s.clone(), quotient_report(ctx.spaces(), s, &opts)?)))
        .collect()
}
