//! Crossbreeding: elimination of external functions from sets of
//! factorization formulas, complete hybrid formulas, and kinship verdicts.

mod linalg;
mod relation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::falgebra::{mean_integral_symbolic, structural_factor, Convention, ExtAtom, ExternalExpr, FunctionExpr, StructuralFactor};
use crate::hop::{apply_h, chain_product, FactorizationData, Mode, OffsetMode, SegmentSpec};
use crate::ladder::LadderContext;

pub use linalg::nullspace;
pub use relation::{BoundValues, Relation};

/// Upper bound on crossbreeding stages in one verdict.
pub const STAGE_CAP: usize = 32;

/// P_m ∼ E_m · F_m[f_m(α₀)] for one function at order k_m.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorizationFormula {
    pub id: usize,
    pub function: FunctionExpr,
    pub order: usize,
    pub external: ExternalExpr,
}

impl FactorizationFormula {
    pub fn new(id: usize, function: FunctionExpr, order: usize) -> Result<Self> {
        function.validate()?;
        if order == 0 {
            return Err(Error::Validation(format!("formula {id}: order must be at least 1")));
        }
        let external = mean_integral_symbolic(&function);
        if external.is_zero() {
            return Err(Error::Validation(format!("formula {id}: external function vanishes")));
        }
        Ok(FactorizationFormula {
            id,
            function,
            order,
            external,
        })
    }

    pub fn structural(&self) -> StructuralFactor {
        structural_factor(&self.function)
    }

    pub fn product_symbol(&self) -> Relation {
        Relation::Product {
            m: self.id,
            k: self.order,
        }
    }

    fn value(&self) -> Relation {
        Relation::Value {
            m: self.id,
            function: self.function.clone(),
        }
    }

    // f_m(α₀^m) · P_m, which is asymptotic to E_m
    fn weighted_product(&self) -> Relation {
        Relation::Mul {
            factors: vec![self.value(), self.product_symbol()],
        }
    }

    fn atoms(&self) -> BTreeSet<ExtAtom> {
        self.external.atoms().filter(|a| **a != ExtAtom::Const).cloned().collect()
    }
}

impl fmt::Display for FactorizationFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sf = structural_factor(&self.function).render_at(&format!("a0^{}", self.id));
        write!(f, "P{}[k={}] ~ ({}) * {}", self.id, self.order, self.external, sf)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StageKind {
    Additive,
    Multiplicative,
}

/// One elimination step of the audit trail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stage {
    pub index: usize,
    pub kind: StageKind,
    pub participants: Vec<usize>,
    pub eliminated: Vec<ExtAtom>,
    /// external content still present after this stage
    pub remaining: ExternalExpr,
}

/// A crossbred relation, normalized so that it is asymptotic to 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HybridFormula {
    pub relation: Relation,
    pub participants: Vec<usize>,
    pub eliminated: Vec<ExtAtom>,
    pub complete: bool,
    pub stages: Vec<Stage>,
    pub text: String,
    #[serde(skip)]
    participant_atoms: BTreeSet<ExtAtom>,
}

impl HybridFormula {
    fn assemble(relation: Relation, formulas: &[&FactorizationFormula], stages: Vec<Stage>) -> HybridFormula {
        let participants: Vec<usize> = formulas.iter().map(|f| f.id).collect::<BTreeSet<_>>().into_iter().collect();
        let participant_atoms = formulas.iter().flat_map(|f| f.atoms()).collect();
        let mut h = HybridFormula {
            text: String::new(),
            relation,
            participants,
            eliminated: Vec::new(),
            complete: false,
            stages,
            participant_atoms,
        };
        h.refresh(&[]);
        h
    }

    // Recomputes derived fields; `inputs` lists formulas that were offered
    // for crossbreeding and must all participate.
    fn refresh(&mut self, inputs: &[usize]) {
        let eliminated: BTreeSet<ExtAtom> = self.stages.iter().flat_map(|s| s.eliminated.iter().cloned()).collect();
        self.eliminated = eliminated.iter().cloned().collect();
        let nothing_left = eliminated == self.participant_atoms;
        let contributed: BTreeSet<usize> = self.stages.iter().flat_map(|s| s.participants.iter().copied()).collect();
        let all_contributed = self.participants.iter().all(|p| contributed.contains(p))
            && inputs.iter().all(|i| self.participants.contains(i));
        self.complete = nothing_left && all_contributed && self.connected();
        self.text = self.to_string();
    }

    fn connected(&self) -> bool {
        let Some(&first) = self.participants.first() else {
            return false;
        };
        let mut seen = BTreeSet::from([first]);
        loop {
            let before = seen.len();
            for s in &self.stages {
                if s.participants.iter().any(|p| seen.contains(p)) {
                    seen.extend(s.participants.iter().copied());
                }
            }
            if seen.len() == before {
                break;
            }
        }
        self.participants.iter().all(|p| seen.contains(p))
    }

    /// The product of two hybrids over disjoint formula sets. It is still
    /// asymptotic to 1 but never complete: no stage links the two sets.
    pub fn product(&self, other: &HybridFormula) -> Result<HybridFormula> {
        if self.participants.iter().any(|p| other.participants.contains(p)) {
            return Err(Error::Validation("hybrid product requires disjoint formula ids".into()));
        }
        let mut stages = self.stages.clone();
        for s in &other.stages {
            let mut s = s.clone();
            s.index = stages.len() + 1;
            stages.push(s);
        }
        let mut participants = self.participants.clone();
        participants.extend(&other.participants);
        participants.sort_unstable();
        let mut h = HybridFormula {
            relation: Relation::Mul {
                factors: vec![self.relation.clone(), other.relation.clone()],
            },
            participants,
            eliminated: Vec::new(),
            complete: false,
            stages,
            text: String::new(),
            participant_atoms: self.participant_atoms.union(&other.participant_atoms).cloned().collect(),
        };
        h.refresh(&[]);
        Ok(h)
    }

    /// The same relation with product symbols re-bound to new orders.
    pub fn with_orders(&self, orders: &BTreeMap<usize, usize>) -> HybridFormula {
        let mut h = self.clone();
        h.relation = self.relation.with_orders(orders);
        h.text = h.to_string();
        h
    }

    /// Order of each product symbol in the relation.
    pub fn orders(&self) -> BTreeMap<usize, usize> {
        self.relation.product_orders()
    }
}

impl fmt::Display for HybridFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.relation {
            Relation::Quotient { .. } => write!(f, "1 ~ {}", self.relation),
            other => write!(f, "{other} ~ 1"),
        }
    }
}

// Index subsets of 0..n with at least `min` elements, by size then lexicographically.
fn subsets(n: usize, min: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in min.max(1)..=n {
        rec(0, n, size, &mut Vec::new(), &mut out);
    }
    out
}

fn coefficient_rows(exprs: &[&ExternalExpr], include_const: bool) -> Vec<Vec<BigRational>> {
    let atoms: BTreeSet<&ExtAtom> = exprs.iter().flat_map(|e| e.atoms()).collect();
    atoms
        .into_iter()
        .filter(|a| include_const || **a != ExtAtom::Const)
        .map(|a| exprs.iter().map(|e| e.coefficient(a)).collect())
        .collect()
}

// Unique (up to scale) dependency among the columns, if there is exactly one.
fn single_dependency(rows: &[Vec<BigRational>], ncols: usize) -> Option<Vec<BigRational>> {
    let mut ns = nullspace(rows, ncols);
    if ns.len() == 1 {
        ns.pop()
    } else {
        None
    }
}

fn stage_eliminated(before: &ExternalExpr, part: &ExternalExpr, after: &ExternalExpr) -> Vec<ExtAtom> {
    let gone: BTreeSet<ExtAtom> = before
        .atoms()
        .chain(part.atoms())
        .filter(|a| **a != ExtAtom::Const && after.coefficient(a).is_zero())
        .cloned()
        .collect();
    gone.into_iter().collect()
}

/// Σ λ_m E_m = 1 with λ ≥ 0 over exactly the given formulas.
fn constant_sum(formulas: &[&FactorizationFormula]) -> Option<HybridFormula> {
    let exprs: Vec<&ExternalExpr> = formulas.iter().map(|f| &f.external).collect();
    let rows = coefficient_rows(&exprs, false);
    let lambda: Vec<BigRational> = if rows.is_empty() {
        // every external is already constant: only a single formula is minimal
        if formulas.len() != 1 {
            return None;
        }
        vec![BigRational::one()]
    } else {
        let v = single_dependency(&rows, formulas.len())?;
        if v.iter().all(Signed::is_positive) {
            v
        } else if v.iter().all(Signed::is_negative) {
            v.into_iter().map(|x| -x).collect()
        } else {
            return None;
        }
    };
    let total = exprs
        .iter()
        .zip(&lambda)
        .fold(ExternalExpr::zero(), |acc, (e, l)| acc.add(&e.scale(l)));
    let c = total.coefficient(&ExtAtom::Const);
    if !total.is_constant() || !c.is_positive() {
        return None;
    }
    let lambda: Vec<BigRational> = lambda.iter().map(|l| l / &c).collect();
    let terms: Vec<Relation> = formulas
        .iter()
        .zip(&lambda)
        .map(|(f, l)| f.weighted_product().scaled(l))
        .collect();
    let relation = if terms.len() == 1 {
        terms.into_iter().next().expect("one term")
    } else {
        Relation::Sum { terms }
    };
    let normalized = total.scale(&c.recip());
    let eliminated = formulas
        .iter()
        .flat_map(|f| f.atoms())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let stage = Stage {
        index: 1,
        kind: StageKind::Additive,
        participants: formulas.iter().map(|f| f.id).collect(),
        eliminated,
        remaining: normalized,
    };
    Some(HybridFormula::assemble(relation, formulas, vec![stage]))
}

/// E_target = Σ λ_l E_l with λ_l > 0 over exactly the given parts.
fn target_sum(target: &FactorizationFormula, parts: &[&FactorizationFormula]) -> Option<HybridFormula> {
    let mut exprs = vec![&target.external];
    exprs.extend(parts.iter().map(|f| &f.external));
    let rows = coefficient_rows(&exprs, true);
    let v = single_dependency(&rows, exprs.len())?;
    if v[0].is_zero() {
        return None;
    }
    let lambda: Vec<BigRational> = v[1..].iter().map(|x| -x / &v[0]).collect();
    if !lambda.iter().all(Signed::is_positive) {
        return None;
    }
    let mut stages = Vec::new();
    let mut running = target.external.clone();
    for (i, (part, l)) in parts.iter().zip(&lambda).enumerate() {
        let step = part.external.scale(l);
        let next = running.add(&step.scale(&-BigRational::one()));
        stages.push(Stage {
            index: i + 1,
            kind: StageKind::Additive,
            participants: vec![target.id, part.id],
            eliminated: stage_eliminated(&running, &step, &next),
            remaining: next.clone(),
        });
        running = next;
    }
    debug_assert!(running.is_zero());
    let mut terms: Vec<Relation> = parts
        .iter()
        .zip(&lambda)
        .map(|(f, l)| f.weighted_product().scaled(l))
        .collect();
    let sum = if terms.len() == 1 {
        terms.pop().expect("one term")
    } else {
        Relation::Sum { terms }
    };
    let relation = Relation::Quotient {
        num: Box::new(target.product_symbol()),
        den: Box::new(Relation::Mul {
            factors: vec![Relation::Recip { of: Box::new(target.value()) }, sum],
        }),
    };
    let mut all = vec![target];
    all.extend_from_slice(parts);
    Some(HybridFormula::assemble(relation, &all, stages))
}

/// Additive crossbreeding. With a target id, looks for E_target = Σ λ_l E_l
/// over the other formulas; otherwise first for Σ λ_m E_m = 1 and then for
/// any formula expressible through the others. The first relation in
/// canonical order (fewest formulas, then lowest ids) is returned.
pub fn additive_eliminate(formulas: &[FactorizationFormula], target: Option<usize>) -> Option<HybridFormula> {
    let sorted = sorted_by_id(formulas);
    if target.is_none() {
        for subset in subsets(sorted.len(), 1) {
            let chosen: Vec<&FactorizationFormula> = subset.iter().map(|&i| sorted[i]).collect();
            if let Some(h) = constant_sum(&chosen) {
                return Some(h);
            }
        }
    }
    for t in &sorted {
        if target.is_some_and(|id| id != t.id) {
            continue;
        }
        let others: Vec<&FactorizationFormula> = sorted.iter().copied().filter(|f| f.id != t.id).collect();
        for subset in subsets(others.len(), 1) {
            let parts: Vec<&FactorizationFormula> = subset.iter().map(|&i| others[i]).collect();
            if let Some(h) = target_sum(t, &parts) {
                return Some(h);
            }
        }
    }
    None
}

/// Multiplicative crossbreeding: E_target = κ ∏ E_l over all `parts`, with
/// every external a single U^Δ monomial and exponents adding exactly.
pub fn multiplicative_eliminate(target: &FactorizationFormula, parts: &[FactorizationFormula]) -> Option<HybridFormula> {
    let parts = sorted_by_id(parts);
    multiplicative(target, &parts)
}

fn multiplicative(target: &FactorizationFormula, parts: &[&FactorizationFormula]) -> Option<HybridFormula> {
    if parts.is_empty() || parts.iter().any(|p| p.id == target.id) {
        return None;
    }
    let (c_target, d_target) = target.external.monomial()?;
    let mut monomials = Vec::with_capacity(parts.len());
    for p in parts {
        monomials.push(p.external.monomial()?);
    }
    let exponent_sum = monomials
        .iter()
        .fold(BigRational::zero(), |acc, (_, d)| acc + d.rational());
    if &exponent_sum != d_target.rational() {
        return None;
    }
    let mut stages = Vec::new();
    let mut coeff = c_target;
    let mut exponent = d_target.rational().clone();
    let mut running = target.external.clone();
    for (i, (p, (c, d))) in parts.iter().zip(&monomials).enumerate() {
        coeff /= c;
        exponent -= d.rational();
        let next = if exponent.is_zero() {
            ExternalExpr::term(ExtAtom::Const, coeff.clone())
        } else {
            let rest = crate::falgebra::Decimal::from_rational(exponent.clone())?;
            ExternalExpr::term(ExtAtom::UPow(rest), coeff.clone())
        };
        stages.push(Stage {
            index: i + 1,
            kind: StageKind::Multiplicative,
            participants: vec![target.id, p.id],
            eliminated: stage_eliminated(&running, &p.external, &next),
            remaining: next.clone(),
        });
        running = next;
    }
    let kappa = coeff;
    let mut factors = vec![Relation::Recip { of: Box::new(target.value()) }];
    for p in parts {
        factors.push(p.value());
        factors.push(p.product_symbol());
    }
    let relation = Relation::Quotient {
        num: Box::new(target.product_symbol()),
        den: Box::new(Relation::Mul { factors }.scaled(&kappa)),
    };
    let mut all = vec![target];
    all.extend_from_slice(parts);
    Some(HybridFormula::assemble(relation, &all, stages))
}

fn sorted_by_id(formulas: &[FactorizationFormula]) -> Vec<&FactorizationFormula> {
    let mut v: Vec<&FactorizationFormula> = formulas.iter().collect();
    v.sort_by_key(|f| f.id);
    v
}

// One crossbreeding round over the pool: additive first, then multiplicative.
fn eliminate_once(pool: &[&FactorizationFormula]) -> Option<HybridFormula> {
    let owned: Vec<FactorizationFormula> = pool.iter().map(|f| (*f).clone()).collect();
    if let Some(h) = additive_eliminate(&owned, None) {
        return Some(h);
    }
    for t in pool {
        let others: Vec<&FactorizationFormula> = pool.iter().copied().filter(|f| f.id != t.id).collect();
        for subset in subsets(others.len(), 1) {
            let parts: Vec<&FactorizationFormula> = subset.iter().map(|&i| others[i]).collect();
            if let Some(h) = multiplicative(t, &parts) {
                return Some(h);
            }
        }
    }
    None
}

/// Residual of a hybrid relation under numeric binding.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HybridCheck {
    pub mode: Mode,
    pub value: f64,
    pub residual: f64,
}

/// Substitutes bound products and α₀-values and returns |value − 1|.
pub fn verify_hybrid(
    h: &HybridFormula,
    bindings: &BTreeMap<usize, FactorizationData>,
    mode: Mode,
    ctx: &LadderContext,
) -> Result<HybridCheck> {
    let mut values = BTreeMap::new();
    for (m, k) in h.orders() {
        let data = bindings.get(&m).ok_or(Error::MissingBinding(m))?;
        if data.k != k {
            return Err(Error::Validation(format!("formula {m}: relation uses order {k}, binding has {}", data.k)));
        }
        values.insert(
            m,
            BoundValues {
                k,
                product: chain_product(data, mode, ctx)?,
                f_alpha0: data.f_alpha0,
            },
        );
    }
    check_relation_functions(&h.relation, bindings)?;
    let value = h.relation.eval(&values)?;
    Ok(HybridCheck {
        mode,
        value,
        residual: (value - 1.0).abs(),
    })
}

fn check_relation_functions(rel: &Relation, bindings: &BTreeMap<usize, FactorizationData>) -> Result<()> {
    match rel {
        Relation::Value { m, function } => {
            let data = bindings.get(m).ok_or(Error::MissingBinding(*m))?;
            if &data.function != function {
                return Err(Error::Validation(format!(
                    "formula {m}: relation uses {function}, binding computed for {}",
                    data.function
                )));
            }
            Ok(())
        }
        Relation::Sum { terms } => terms.iter().try_for_each(|t| check_relation_functions(t, bindings)),
        Relation::Mul { factors } => factors.iter().try_for_each(|t| check_relation_functions(t, bindings)),
        Relation::Recip { of } => check_relation_functions(of, bindings),
        Relation::Quotient { num, den } => {
            check_relation_functions(num, bindings)?;
            check_relation_functions(den, bindings)
        }
        _ => Ok(()),
    }
}

/// All order assignments with 1 ≤ k_m ≤ k0 for the hybrid's formulas, in
/// lexicographic order; there are k0^(number of participants).
pub fn enumerate_orders(h: &HybridFormula, k0: usize) -> Vec<BTreeMap<usize, usize>> {
    let ids: Vec<usize> = h.orders().keys().copied().collect();
    let mut out = vec![BTreeMap::new()];
    for id in ids {
        out = out
            .into_iter()
            .flat_map(|partial| {
                (1..=k0).map(move |k| {
                    let mut m = partial.clone();
                    m.insert(id, k);
                    m
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictReport {
    pub formulas: Vec<String>,
    pub notes: Vec<String>,
    pub checks: Vec<HybridCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub kindred: bool,
    pub certificate: Option<HybridFormula>,
    pub report: VerdictReport,
}

/// Decides whether `functions` admit a complete hybrid formula. Formula ids
/// are 1-based positions in `functions`. With a context, the certificate is
/// also bound numerically on `seg` and verified in both modes.
pub fn kindred_verdict(
    functions: &[FunctionExpr],
    seg: &SegmentSpec,
    orders: &[usize],
    ctx: Option<&LadderContext>,
) -> Result<Verdict> {
    if functions.len() != orders.len() {
        return Err(Error::Validation(format!(
            "{} functions but {} orders",
            functions.len(),
            orders.len()
        )));
    }
    let formulas: Vec<FactorizationFormula> = functions
        .iter()
        .zip(orders)
        .enumerate()
        .map(|(i, (f, &k))| FactorizationFormula::new(i + 1, f.clone(), k))
        .collect::<Result<_>>()?;
    let mut report = VerdictReport {
        formulas: formulas.iter().map(|f| f.to_string()).collect(),
        notes: Vec::new(),
        checks: Vec::new(),
    };
    let conventions: BTreeSet<Convention> = formulas.iter().map(|f| f.function.convention()).collect();
    if conventions.len() > 1 {
        report
            .notes
            .push("mixed segment conventions (trigonometric and power atoms); no common segment exists".into());
        return Ok(Verdict {
            kindred: false,
            certificate: None,
            report,
        });
    }
    let expected_offset = match conventions.first() {
        Some(Convention::Trig) => OffsetMode::PiL,
        _ => OffsetMode::L,
    };
    if seg.offset_mode() != expected_offset {
        report.notes.push(format!(
            "closed-form externals assume offset mode {expected_offset}, segment uses {}",
            seg.offset_mode()
        ));
    }

    let mut pool: Vec<&FactorizationFormula> = formulas.iter().collect();
    let mut hybrids: Vec<HybridFormula> = Vec::new();
    let mut stages = 0;
    while let Some(h) = eliminate_once(&pool) {
        stages += h.stages.len();
        pool.retain(|f| !h.participants.contains(&f.id));
        hybrids.push(h);
        if stages >= STAGE_CAP {
            report.notes.push(format!("stage cap {STAGE_CAP} reached"));
            break;
        }
    }
    for f in &pool {
        report.notes.push(format!("formula {} ({}) takes part in no crossbreeding", f.id, f.function));
    }
    if hybrids.len() > 1 {
        report
            .notes
            .push("several independent hybrids found; their product is not a complete hybrid formula".into());
    }
    let mut certificate = match hybrids.split_first() {
        None => None,
        Some((first, rest)) => Some(rest.iter().try_fold(first.clone(), |acc, h| acc.product(h))?),
    };
    let inputs: Vec<usize> = formulas.iter().map(|f| f.id).collect();
    if let Some(c) = certificate.as_mut() {
        c.refresh(&inputs);
        let target_form = matches!(c.relation, Relation::Quotient { .. })
            && c.stages.iter().all(|s| s.kind == StageKind::Additive);
        if target_form {
            report
                .notes
                .push("in the quotient form each part's product runs over r = 1..k_l of that part".into());
        }
    }
    let kindred = certificate.as_ref().is_some_and(|c| c.complete);

    if let (Some(ctx), Some(cert)) = (ctx, certificate.as_ref()) {
        let mut bindings = BTreeMap::new();
        for f in &formulas {
            if cert.participants.contains(&f.id) {
                bindings.insert(f.id, apply_h(&f.function, seg, f.order, ctx)?);
            }
        }
        for mode in [Mode::Exact, Mode::Zeta] {
            match verify_hybrid(cert, &bindings, mode, ctx) {
                Ok(check) => report.checks.push(check),
                Err(e) => report.notes.push(format!("{mode} verification failed: {e}")),
            }
        }
    }

    Ok(Verdict {
        kindred,
        certificate,
        report,
    })
}
