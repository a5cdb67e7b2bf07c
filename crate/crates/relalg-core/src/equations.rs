//! Clustered equations: relational premises on variables with a term-level
//! conclusion, where the premise variables fall apart into components of
//! bounded size. Includes satisfaction over algebras, the variety-closure
//! soundness checker, and the translation of abstract equations (quotients
//! of free-algebra slices) into sets of clustered equations.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::algebras::{algebra_product, subalgebra_generated, validate_algebra, Algebra};
use crate::free_terms::{build_free_slice, extend, FreeAlgebraSlice, Term};
use crate::horn::{Atom, AxiomSet};
use crate::quotients::{enumerate_quotients, is_c_reflexive, EnumLimits};
use crate::signatures::{AlgebraicSignature, LiftedSignature, RelationalSignature};
use crate::structures::{all_tables, Structure, StructureMap};
use crate::{Error, Result};

/// The cluster parameter: a positive cardinal bound or no bound at all.
/// Only the order relation to component sizes matters at finite scale;
/// `Unbounded` disables the clusteredness constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterBound {
    Finite(usize),
    Unbounded,
}

impl ClusterBound {
    /// Does a premise component of this size satisfy the bound (size < c)?
    pub fn admits(&self, component_size: usize) -> bool {
        match self {
            ClusterBound::Finite(c) => component_size < *c,
            ClusterBound::Unbounded => true,
        }
    }
}

impl std::fmt::Display for ClusterBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClusterBound::Finite(c) => write!(f, "{c}"),
            ClusterBound::Unbounded => write!(f, "inf"),
        }
    }
}

/// Conclusion of a clustered equation: a relation on terms or a term
/// equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EquationConclusion {
    Rel { rel: usize, terms: Vec<Term> },
    TermEq(Term, Term),
}

/// A clustered equation over a finite variable set. The clusteredness
/// invariant (every connected component of the Gaifman graph of the
/// premises has fewer than `c` variables) is checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusteredEquation {
    name: String,
    rsig: Arc<RelationalSignature>,
    asig: AlgebraicSignature,
    vars: Vec<String>,
    premises: Vec<Atom>,
    conclusion: EquationConclusion,
    c: ClusterBound,
}

impl ClusteredEquation {
    pub fn new(
        name: impl Into<String>,
        rsig: Arc<RelationalSignature>,
        asig: AlgebraicSignature,
        vars: Vec<String>,
        premises: Vec<Atom>,
        conclusion: EquationConclusion,
        c: ClusterBound,
    ) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::DuplicateSymbol(v.clone()));
            }
        }
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&i, &j| vars[i].cmp(&vars[j]));
        let mut new_index = vec![0usize; vars.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let sorted_vars: Vec<String> = order.iter().map(|&i| vars[i].clone()).collect();

        let remap_atom = |atom: &Atom| -> Result<Atom> {
            if atom.rel >= rsig.len() {
                return Err(Error::UnknownSymbol(format!("relation #{}", atom.rel)));
            }
            if atom.args.len() != rsig.arity(atom.rel) {
                return Err(Error::ArityMismatch {
                    symbol: rsig.name(atom.rel).to_string(),
                    expected: rsig.arity(atom.rel),
                    got: atom.args.len(),
                });
            }
            let args = atom
                .args
                .iter()
                .map(|&v| {
                    if v >= vars.len() {
                        Err(Error::IndexOutOfRange {
                            index: v,
                            size: vars.len(),
                        })
                    } else {
                        Ok(new_index[v])
                    }
                })
                .collect::<Result<Vec<usize>>>()?;
            Ok(Atom { rel: atom.rel, args })
        };
        let premises = premises.iter().map(remap_atom).collect::<Result<Vec<_>>>()?;
        let conclusion = match &conclusion {
            EquationConclusion::Rel { rel, terms } => {
                if *rel >= rsig.len() {
                    return Err(Error::UnknownSymbol(format!("relation #{rel}")));
                }
                if terms.len() != rsig.arity(*rel) {
                    return Err(Error::ArityMismatch {
                        symbol: rsig.name(*rel).to_string(),
                        expected: rsig.arity(*rel),
                        got: terms.len(),
                    });
                }
                let terms = terms
                    .iter()
                    .map(|t| {
                        check_term(t, &asig)?;
                        remap_term(t, &new_index)
                    })
                    .collect::<Result<Vec<Term>>>()?;
                EquationConclusion::Rel { rel: *rel, terms }
            }
            EquationConclusion::TermEq(s, t) => {
                check_term(s, &asig)?;
                check_term(t, &asig)?;
                EquationConclusion::TermEq(remap_term(s, &new_index)?, remap_term(t, &new_index)?)
            }
        };

        let eq = ClusteredEquation {
            name: name.into(),
            rsig,
            asig,
            vars: sorted_vars,
            premises,
            conclusion,
            c,
        };
        if let Some(size) = eq
            .gaifman_components()
            .iter()
            .map(|comp| comp.len())
            .find(|&s| !c.admits(s))
        {
            return Err(Error::NotClustered {
                actual: size,
                bound: match c {
                    ClusterBound::Finite(c) => c,
                    ClusterBound::Unbounded => usize::MAX,
                },
            });
        }
        Ok(eq)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rsig(&self) -> &Arc<RelationalSignature> {
        &self.rsig
    }

    pub fn asig(&self) -> &AlgebraicSignature {
        &self.asig
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn premises(&self) -> &[Atom] {
        &self.premises
    }

    pub fn conclusion(&self) -> &EquationConclusion {
        &self.conclusion
    }

    pub fn cluster_bound(&self) -> ClusterBound {
        self.c
    }

    /// An equation is unconditional when it has no premises.
    pub fn is_unconditional(&self) -> bool {
        self.premises.is_empty()
    }

    /// The same equation under a different cluster bound.
    pub fn with_bound(&self, c: ClusterBound) -> Result<ClusteredEquation> {
        ClusteredEquation::new(
            self.name.clone(),
            self.rsig.clone(),
            self.asig.clone(),
            self.vars.clone(),
            self.premises.clone(),
            self.conclusion.clone(),
            c,
        )
    }

    /// Connected components of the Gaifman graph of the premises: variables
    /// are linked when they co-occur in a premise atom; premise-free
    /// variables are singletons. Components are listed by least member.
    pub fn gaifman_components(&self) -> Vec<Vec<usize>> {
        gaifman_components(self.vars.len(), &self.premises)
    }
}

fn remap_term(t: &Term, new_index: &[usize]) -> Result<Term> {
    Ok(match t {
        Term::Var(v) => {
            if *v >= new_index.len() {
                return Err(Error::IndexOutOfRange {
                    index: *v,
                    size: new_index.len(),
                });
            }
            Term::Var(new_index[*v])
        }
        Term::App(op, args) => Term::App(
            *op,
            args.iter()
                .map(|a| remap_term(a, new_index))
                .collect::<Result<Vec<Term>>>()?,
        ),
    })
}

fn check_term(t: &Term, asig: &AlgebraicSignature) -> Result<()> {
    match t {
        Term::Var(_) => Ok(()),
        Term::App(op, args) => {
            if *op >= asig.len() {
                return Err(Error::UnknownSymbol(format!("operation #{op}")));
            }
            if args.len() != asig.arity(*op) {
                return Err(Error::ArityMismatch {
                    symbol: asig.name(*op).to_string(),
                    expected: asig.arity(*op),
                    got: args.len(),
                });
            }
            args.iter().try_for_each(|a| check_term(a, asig))
        }
    }
}

/// Union-find over the co-occurrence edges of the premise atoms.
pub fn gaifman_components(n_vars: usize, premises: &[Atom]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n_vars).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for atom in premises {
        for k in 1..atom.args.len() {
            let a = find(&mut parent, atom.args[0]);
            let b = find(&mut parent, atom.args[k]);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut components: Vec<Vec<usize>> = vec![Vec::new(); n_vars];
    for v in 0..n_vars {
        let root = find(&mut parent, v);
        components[root].push(v);
    }
    components.retain(|c| !c.is_empty());
    components
}

/// Result of checking one equation against one algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationCheck {
    pub holds: bool,
    pub witness: Option<Vec<(String, usize)>>,
}

/// Does the algebra satisfy the equation? Satisfaction quantifies over all
/// maps from the variables to the carrier (not only relation-preserving
/// ones); the premises carry all the relational constraint.
pub fn satisfies_equation(a: &Algebra, eq: &ClusteredEquation) -> Result<EquationCheck> {
    if a.rel_sig() != &eq.rsig {
        return Err(Error::SignatureMismatch(
            "algebra and equation are over different relational signatures".into(),
        ));
    }
    if a.lifted_sig().base() != &eq.asig {
        return Err(Error::SignatureMismatch(
            "algebra and equation are over different algebraic signatures".into(),
        ));
    }
    let n = eq.vars.len();
    let mut by_last: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, p) in eq.premises.iter().enumerate() {
        let last = p.args.iter().copied().max().expect("arity >= 1");
        by_last[last].push(i);
    }
    let mut assign = vec![0usize; n];
    let witness = violation_search(a, eq, &by_last, &mut assign, 0)?;
    Ok(EquationCheck {
        holds: witness.is_none(),
        witness: witness.map(|w| eq.vars.iter().cloned().zip(w).collect()),
    })
}

fn violation_search(
    a: &Algebra,
    eq: &ClusteredEquation,
    by_last: &[Vec<usize>],
    assign: &mut Vec<usize>,
    depth: usize,
) -> Result<Option<Vec<usize>>> {
    if depth == eq.vars.len() {
        let ok = match &eq.conclusion {
            EquationConclusion::Rel { rel, terms } => {
                let tuple = terms
                    .iter()
                    .map(|t| extend(assign, a, t))
                    .collect::<Result<Vec<usize>>>()?;
                a.carrier().has(*rel, &tuple)
            }
            EquationConclusion::TermEq(s, t) => extend(assign, a, s)? == extend(assign, a, t)?,
        };
        return Ok(if ok { None } else { Some(assign.clone()) });
    }
    for v in 0..a.size() {
        assign[depth] = v;
        let premises_ok = by_last[depth].iter().all(|&pi| {
            let atom = &eq.premises[pi];
            let tuple: Vec<usize> = atom.args.iter().map(|&x| assign[x]).collect();
            a.carrier().has(atom.rel, &tuple)
        });
        if premises_ok {
            if let Some(w) = violation_search(a, eq, by_last, assign, depth + 1)? {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// One closure check inside a [`ClosureReport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureEntry {
    pub description: String,
    pub holds: bool,
    pub witness: Option<Vec<(String, usize)>>,
}

/// A quotient skipped by the closure check because it is not c-reflexive;
/// `satisfies_anyway` is informational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedQuotient {
    pub member: usize,
    pub classes: usize,
    pub satisfies_anyway: bool,
}

/// Report of the variety-closure soundness check: the model class cut out
/// of the pool must be closed under binary products (within the carrier
/// bound), subalgebras, and c-reflexive quotients with codomain in C.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub model_members: Vec<usize>,
    pub product_checks: Vec<ClosureEntry>,
    pub subalgebra_checks: Vec<ClosureEntry>,
    pub quotient_checks: Vec<ClosureEntry>,
    pub skipped_quotients: Vec<SkippedQuotient>,
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        self.product_checks
            .iter()
            .chain(&self.subalgebra_checks)
            .chain(&self.quotient_checks)
            .all(|e| e.holds)
    }
}

fn all_satisfied(
    a: &Algebra,
    eqs: &[ClusteredEquation],
) -> Result<(bool, Option<Vec<(String, usize)>>)> {
    for eq in eqs {
        let check = satisfies_equation(a, eq)?;
        if !check.holds {
            return Ok((false, check.witness));
        }
    }
    Ok((true, None))
}

/// Executable soundness direction of the variety theorem: computes the
/// members of `pool` satisfying `eqs` and asserts that binary products,
/// all subalgebras, and all c-reflexive C-quotients of members satisfy
/// `eqs` as well. A reported violation falsifies the implementation, not
/// the theorem.
pub fn check_closure_soundness(
    eqs: &[ClusteredEquation],
    pool: &[Algebra],
    c: ClusterBound,
    ax: &AxiomSet,
    limits: &EnumLimits,
) -> Result<ClosureReport> {
    let mut report = ClosureReport {
        model_members: Vec::new(),
        product_checks: Vec::new(),
        subalgebra_checks: Vec::new(),
        quotient_checks: Vec::new(),
        skipped_quotients: Vec::new(),
    };
    for (i, a) in pool.iter().enumerate() {
        if all_satisfied(a, eqs)?.0 {
            report.model_members.push(i);
        }
    }
    // Binary products that stay inside the enumeration carrier bound.
    for (pos, &i) in report.model_members.iter().enumerate() {
        for &j in &report.model_members[pos..] {
            let (prod, _) = algebra_product(
                pool[i].rel_sig(),
                pool[i].lifted_sig(),
                &[pool[i].clone(), pool[j].clone()],
            )?;
            if prod.size() > limits.max_carrier {
                continue;
            }
            let (holds, witness) = all_satisfied(&prod, eqs)?;
            report.product_checks.push(ClosureEntry {
                description: format!("product of members {i} and {j}"),
                holds,
                witness,
            });
        }
    }
    // All subalgebras (op-closed subsets with the induced structure).
    for &i in &report.model_members {
        let a = &pool[i];
        for mask in 0u64..(1u64 << a.size()) {
            let subset: BTreeSet<usize> = (0..a.size()).filter(|k| mask >> k & 1 == 1).collect();
            let (closure, sub, _) = match subalgebra_generated(a, &subset) {
                Ok(x) => x,
                Err(_) => continue,
            };
            if closure != subset {
                continue; // not op-closed
            }
            let (holds, witness) = all_satisfied(&sub, eqs)?;
            report.subalgebra_checks.push(ClosureEntry {
                description: format!("subalgebra {subset:?} of member {i}"),
                holds,
                witness,
            });
        }
    }
    // C-quotients, split by c-reflexivity.
    for &i in &report.model_members {
        let quotients = enumerate_quotients(&pool[i], ax, limits)?;
        for q in &quotients {
            if is_c_reflexive(q, c)?.holds {
                let (holds, witness) = all_satisfied(q.cod(), eqs)?;
                report.quotient_checks.push(ClosureEntry {
                    description: format!(
                        "c-reflexive quotient of member {i} onto {} classes",
                        q.cod().size()
                    ),
                    holds,
                    witness,
                });
            } else {
                report.skipped_quotients.push(SkippedQuotient {
                    member: i,
                    classes: q.cod().size(),
                    satisfies_anyway: all_satisfied(q.cod(), eqs)?.0,
                });
            }
        }
    }
    Ok(report)
}

/// Connected components of a structure's carrier under co-occurrence in
/// any relation tuple. A structure is c-clustered iff every component has
/// fewer than c elements.
pub fn structure_components(x: &Structure) -> Vec<Vec<usize>> {
    let atoms: Vec<Atom> = (0..x.sig().len())
        .flat_map(|rel| {
            x.rel(rel).iter().map(move |t| Atom {
                rel,
                args: t.clone(),
            })
        })
        .collect();
    gaifman_components(x.size(), &atoms)
}

/// An abstract equation instantiated at a depth-bounded free-algebra
/// slice: a surjection from the slice onto a finite algebra with carrier
/// in C.
#[derive(Debug, Clone)]
pub struct AbstractEquationInstance {
    x: Structure,
    slice: FreeAlgebraSlice,
    e_table: Vec<usize>,
    e_cod: Algebra,
    c: ClusterBound,
}

impl AbstractEquationInstance {
    /// Builds and validates an instance: the table must be surjective,
    /// relation-preserving from the slice structure, and equivariant on
    /// slice terms; the codomain must be a valid algebra with carrier in
    /// C; the base structure must be c-clustered.
    pub fn new(
        x: Structure,
        lsig: &LiftedSignature,
        depth: usize,
        e_table: Vec<usize>,
        e_cod: Algebra,
        ax: &AxiomSet,
        c: ClusterBound,
    ) -> Result<Self> {
        if let Some(bad) = structure_components(&x)
            .iter()
            .map(|comp| comp.len())
            .find(|&s| !c.admits(s))
        {
            return Err(Error::NotClustered {
                actual: bad,
                bound: match c {
                    ClusterBound::Finite(c) => c,
                    ClusterBound::Unbounded => usize::MAX,
                },
            });
        }
        let slice = build_free_slice(&x, lsig, depth)?;
        if e_table.len() != slice.len() {
            return Err(Error::InvalidInput(format!(
                "quotient table has length {}, slice has {} terms",
                e_table.len(),
                slice.len()
            )));
        }
        let mut hit = vec![false; e_cod.size()];
        for &v in &e_table {
            if v >= e_cod.size() {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    size: e_cod.size(),
                });
            }
            hit[v] = true;
        }
        if !hit.into_iter().all(|b| b) {
            return Err(Error::NotSurjective);
        }
        if !validate_algebra(&e_cod, Some(ax))?.valid() {
            return Err(Error::InvalidInput(
                "abstract equation codomain must be a valid algebra over C".into(),
            ));
        }
        let as_map = StructureMap::new(
            slice.structure().clone(),
            e_cod.carrier().clone(),
            e_table.clone(),
        )?;
        if !as_map.classify().preserves {
            return Err(Error::NotPreserving);
        }
        // Equivariance on the slice: e(op(args)) = op_E(e(args)) whenever
        // the application is itself a slice term.
        for (i, t) in slice.terms().iter().enumerate() {
            if let Term::App(op, args) = t {
                let arg_images: Vec<usize> = args
                    .iter()
                    .map(|arg| e_table[slice.index_of(arg).expect("subterm in slice")])
                    .collect();
                if e_table[i] != e_cod.apply_op(*op, &arg_images) {
                    return Err(Error::NotAMorphism(format!(
                        "quotient table is not equivariant at term #{i}"
                    )));
                }
            }
        }
        Ok(AbstractEquationInstance {
            x,
            slice,
            e_table,
            e_cod,
            c,
        })
    }

    pub fn base(&self) -> &Structure {
        &self.x
    }

    pub fn slice(&self) -> &FreeAlgebraSlice {
        &self.slice
    }

    pub fn table(&self) -> &[usize] {
        &self.e_table
    }

    pub fn cod(&self) -> &Algebra {
        &self.e_cod
    }

    pub fn cluster_bound(&self) -> ClusterBound {
        self.c
    }
}

/// The translation of an abstract equation: the premise set read off the
/// base structure, plus one clustered equation per related term tuple of
/// the codomain and per identified term pair.
#[derive(Debug, Clone)]
pub struct Translation {
    pub phi: Vec<Atom>,
    pub equations: Vec<ClusteredEquation>,
    /// Depth bound under which the translation certifies equivalence.
    pub depth: usize,
}

/// Translates an abstract equation instance into clustered equations, with
/// terms restricted to the materialized slice. The full set is emitted; no
/// minimization is attempted.
pub fn translate_abstract_equation(inst: &AbstractEquationInstance) -> Result<Translation> {
    let x = &inst.x;
    let slice = &inst.slice;
    let vars: Vec<String> = (0..x.size()).map(|i| format!("v{i}")).collect();
    let mut phi = Vec::new();
    for rel in 0..x.sig().len() {
        for tuple in x.rel(rel) {
            phi.push(Atom {
                rel,
                args: tuple.clone(),
            });
        }
    }
    let mut equations = Vec::new();
    let asig = slice.lifted_sig().base().clone();
    // One equation per related tuple of codomain values, pulled back along
    // the quotient table.
    for rel in 0..x.sig().len() {
        let arity = x.sig().arity(rel);
        let total = slice.len().pow(arity as u32);
        for enc in 0..total {
            let picks = crate::structures::decode_power(slice.len().max(1), arity, enc);
            let images: Vec<usize> = picks.iter().map(|&i| inst.e_table[i]).collect();
            if !inst.e_cod.carrier().has(rel, &images) {
                continue;
            }
            let terms: Vec<Term> = picks.iter().map(|&i| slice.terms()[i].clone()).collect();
            equations.push(ClusteredEquation::new(
                format!("tr-{}-{}", x.sig().name(rel), equations.len()),
                x.sig().clone(),
                asig.clone(),
                vars.clone(),
                phi.clone(),
                EquationConclusion::Rel { rel, terms },
                inst.c,
            )?);
        }
    }
    // One equation per identified pair of slice terms.
    for i in 0..slice.len() {
        for j in i + 1..slice.len() {
            if inst.e_table[i] == inst.e_table[j] {
                equations.push(ClusteredEquation::new(
                    format!("tr-eq-{i}-{j}"),
                    x.sig().clone(),
                    asig.clone(),
                    vars.clone(),
                    phi.clone(),
                    EquationConclusion::TermEq(
                        slice.terms()[i].clone(),
                        slice.terms()[j].clone(),
                    ),
                    inst.c,
                )?);
            }
        }
    }
    Ok(Translation {
        phi,
        equations,
        depth: slice.depth(),
    })
}

/// Result of the abstract-satisfaction check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractCheck {
    pub holds: bool,
    /// A preserving assignment whose extension does not factor, if any.
    pub witness: Option<Vec<usize>>,
}

/// Does the algebra satisfy the abstract equation? For every preserving
/// map from the base structure into the carrier, the evaluation of slice
/// terms must factor through the quotient table: identified terms get
/// equal values, and related codomain tuples pull back to related value
/// tuples (the homomorphism-theorem conditions, restricted to the slice).
pub fn abstract_satisfies(a: &Algebra, inst: &AbstractEquationInstance) -> Result<AbstractCheck> {
    if a.rel_sig() != inst.x.sig() {
        return Err(Error::SignatureMismatch(
            "algebra and instance are over different relational signatures".into(),
        ));
    }
    if a.lifted_sig() != inst.slice.lifted_sig() {
        return Err(Error::SignatureMismatch(
            "algebra and instance are over different lifted signatures".into(),
        ));
    }
    let slice = &inst.slice;
    for h in all_tables(inst.x.size(), a.size()) {
        let as_map = StructureMap::new(inst.x.clone(), a.carrier().clone(), h.clone())?;
        if !as_map.classify().preserves {
            continue;
        }
        let values: Vec<usize> = slice
            .terms()
            .iter()
            .map(|t| extend(&h, a, t))
            .collect::<Result<Vec<usize>>>()?;
        // Kernel condition.
        for i in 0..slice.len() {
            for j in i + 1..slice.len() {
                if inst.e_table[i] == inst.e_table[j] && values[i] != values[j] {
                    return Ok(AbstractCheck {
                        holds: false,
                        witness: Some(h),
                    });
                }
            }
        }
        // Relation condition.
        for rel in 0..inst.x.sig().len() {
            let arity = inst.x.sig().arity(rel);
            let total = slice.len().pow(arity as u32);
            for enc in 0..total {
                let picks = crate::structures::decode_power(slice.len().max(1), arity, enc);
                let images: Vec<usize> = picks.iter().map(|&i| inst.e_table[i]).collect();
                if !inst.e_cod.carrier().has(rel, &images) {
                    continue;
                }
                let value_tuple: Vec<usize> = picks.iter().map(|&i| values[i]).collect();
                if !a.carrier().has(rel, &value_tuple) {
                    return Ok(AbstractCheck {
                        holds: false,
                        witness: Some(h),
                    });
                }
            }
        }
    }
    Ok(AbstractCheck {
        holds: true,
        witness: None,
    })
}
