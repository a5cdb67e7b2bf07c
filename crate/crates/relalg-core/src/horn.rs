//! Horn clauses over finite variable sets, clause satisfaction, the axiom
//! presets (generalized metric spaces, posets, L-valued relations, partial
//! algebras), and membership in the axiomatized subcategory.
//!
//! Clause schemas are expanded eagerly into finite clause lists at preset
//! construction, so satisfaction checking is a single uniform loop.

use std::sync::Arc;

use num_traits::Zero;

use crate::signatures::{
    gmet_quantities, make_gmet_signature, make_partial_algebra_signature, make_poset_signature,
    AlgebraicSignature, Quantity, QuantityLattice, RelationalSignature,
};
use crate::structures::Structure;
use crate::{Error, Result};

/// A relational atom: a relation symbol applied to variables (by index into
/// the owning clause's variable list).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub rel: usize,
    pub args: Vec<usize>,
}

/// Conclusion of a Horn clause: a relational atom (type 1) or a variable
/// equality (type 2).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Conclusion {
    Rel(Atom),
    Eq(usize, usize),
}

/// A Horn clause over a finite variable set. Variables are kept sorted by
/// name so that assignment enumeration (variables in order, elements
/// ascending) produces reproducible witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HornClause {
    label: String,
    sig: Arc<RelationalSignature>,
    vars: Vec<String>,
    premises: Vec<Atom>,
    conclusion: Conclusion,
}

impl HornClause {
    pub fn new(
        label: impl Into<String>,
        sig: Arc<RelationalSignature>,
        vars: Vec<String>,
        premises: Vec<Atom>,
        conclusion: Conclusion,
    ) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::DuplicateSymbol(v.clone()));
            }
        }
        // Sort variables by name and remap all indices.
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&i, &j| vars[i].cmp(&vars[j]));
        let mut new_index = vec![0usize; vars.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let sorted_vars: Vec<String> = order.iter().map(|&i| vars[i].clone()).collect();

        let remap_atom = |atom: &Atom| -> Result<Atom> {
            if atom.rel >= sig.len() {
                return Err(Error::UnknownSymbol(format!("relation #{}", atom.rel)));
            }
            let arity = sig.arity(atom.rel);
            if atom.args.len() != arity {
                return Err(Error::ArityMismatch {
                    symbol: sig.name(atom.rel).to_string(),
                    expected: arity,
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
            Conclusion::Rel(atom) => Conclusion::Rel(remap_atom(atom)?),
            Conclusion::Eq(x, y) => {
                for v in [x, y] {
                    if *v >= vars.len() {
                        return Err(Error::IndexOutOfRange {
                            index: *v,
                            size: vars.len(),
                        });
                    }
                }
                Conclusion::Eq(new_index[*x], new_index[*y])
            }
        };
        Ok(HornClause {
            label: label.into(),
            sig,
            vars: sorted_vars,
            premises,
            conclusion,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sig(&self) -> &Arc<RelationalSignature> {
        &self.sig
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn premises(&self) -> &[Atom] {
        &self.premises
    }

    pub fn conclusion(&self) -> &Conclusion {
        &self.conclusion
    }

    /// True when the conclusion is a relational atom (type 1).
    pub fn is_type1(&self) -> bool {
        matches!(self.conclusion, Conclusion::Rel(_))
    }

    fn premise_holds(&self, a: &Structure, premise: &Atom, assign: &[usize]) -> bool {
        let tuple: Vec<usize> = premise.args.iter().map(|&v| assign[v]).collect();
        a.has(premise.rel, &tuple)
    }

    fn conclusion_holds(&self, a: &Structure, assign: &[usize]) -> bool {
        match &self.conclusion {
            Conclusion::Rel(atom) => {
                let tuple: Vec<usize> = atom.args.iter().map(|&v| assign[v]).collect();
                a.has(atom.rel, &tuple)
            }
            Conclusion::Eq(x, y) => assign[*x] == assign[*y],
        }
    }
}

/// Result of checking one clause against a structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseCheck {
    pub holds: bool,
    /// The first violating assignment (variables in sorted order), if any.
    pub witness: Option<Vec<(String, usize)>>,
}

/// Does `a` satisfy the clause? Quantifies over every assignment of
/// variables to carrier elements; assignments whose premises fail are
/// pruned early, which does not change the first violating witness.
pub fn satisfies_clause(a: &Structure, cl: &HornClause) -> Result<ClauseCheck> {
    if a.sig() != cl.sig() {
        return Err(Error::SignatureMismatch(
            "structure and clause are over different signatures".into(),
        ));
    }
    let n = cl.vars.len();
    // Premises indexed by the largest variable occurring in them: checked as
    // soon as that variable is assigned.
    let mut by_last: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, p) in cl.premises.iter().enumerate() {
        let last = p.args.iter().copied().max().expect("arity >= 1");
        by_last[last].push(i);
    }
    let mut assign = vec![0usize; n];
    let witness = search_violation(a, cl, &by_last, &mut assign, 0);
    Ok(ClauseCheck {
        holds: witness.is_none(),
        witness: witness.map(|w| {
            cl.vars
                .iter()
                .cloned()
                .zip(w)
                .collect::<Vec<(String, usize)>>()
        }),
    })
}

fn search_violation(
    a: &Structure,
    cl: &HornClause,
    by_last: &[Vec<usize>],
    assign: &mut Vec<usize>,
    depth: usize,
) -> Option<Vec<usize>> {
    if depth == cl.vars.len() {
        return if cl.conclusion_holds(a, assign) {
            None
        } else {
            Some(assign.clone())
        };
    }
    for v in 0..a.size() {
        assign[depth] = v;
        let premises_ok = by_last[depth]
            .iter()
            .all(|&pi| cl.premise_holds(a, &cl.premises[pi], assign));
        if premises_ok {
            if let Some(w) = search_violation(a, cl, by_last, assign, depth + 1) {
                return Some(w);
            }
        }
    }
    None
}

/// A named, finite set of Horn clauses over one signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomSet {
    name: String,
    sig: Arc<RelationalSignature>,
    clauses: Vec<HornClause>,
}

impl AxiomSet {
    pub fn new(
        name: impl Into<String>,
        sig: Arc<RelationalSignature>,
        clauses: Vec<HornClause>,
    ) -> Result<Self> {
        if let Some(cl) = clauses.iter().find(|cl| cl.sig() != &sig) {
            return Err(Error::SignatureMismatch(format!(
                "clause {} is over a different signature",
                cl.label()
            )));
        }
        Ok(AxiomSet {
            name: name.into(),
            sig,
            clauses,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sig(&self) -> &Arc<RelationalSignature> {
        &self.sig
    }

    pub fn clauses(&self) -> &[HornClause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// The type-1 fragment: clauses whose conclusion is a relational atom.
    pub fn type1_fragment(&self) -> AxiomSet {
        AxiomSet {
            name: format!("{}'", self.name),
            sig: self.sig.clone(),
            clauses: self
                .clauses
                .iter()
                .filter(|cl| cl.is_type1())
                .cloned()
                .collect(),
        }
    }
}

/// Report for membership of a structure in the subcategory axiomatized by
/// an axiom set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CMembership {
    pub failures: Vec<(String, Vec<(String, usize)>)>,
}

impl CMembership {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every clause of `ax` against `a`, collecting all failures.
pub fn in_c(a: &Structure, ax: &AxiomSet) -> Result<CMembership> {
    let mut failures = Vec::new();
    for cl in &ax.clauses {
        let check = satisfies_clause(a, cl)?;
        if !check.holds {
            failures.push((cl.label().to_string(), check.witness.unwrap_or_default()));
        }
    }
    Ok(CMembership { failures })
}

/// Fast all-or-nothing variant of [`in_c`] used inside enumerations.
pub fn in_c_quick(a: &Structure, ax: &AxiomSet) -> Result<bool> {
    for cl in &ax.clauses {
        if !satisfies_clause(a, cl)?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Flag set choosing which generalized-metric axioms are imposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GmetFlags {
    pub refl: bool,
    pub pos: bool,
    pub sym: bool,
    pub tri: bool,
    pub max: bool,
}

impl GmetFlags {
    /// No optional axioms: only (Up), (Arch) and (Top).
    pub fn none() -> Self {
        GmetFlags::default()
    }

    /// Ordinary metric spaces: (Refl), (Pos), (Sym), (Tri).
    pub fn metric() -> Self {
        GmetFlags {
            refl: true,
            pos: true,
            sym: true,
            tri: true,
            max: false,
        }
    }

    /// Pseudometric spaces: (Refl), (Sym), (Tri).
    pub fn pseudometric() -> Self {
        GmetFlags {
            refl: true,
            pos: false,
            sym: true,
            tri: true,
            max: false,
        }
    }
}

fn binary_atom(rel: usize, x: usize, y: usize) -> Atom {
    Atom { rel, args: vec![x, y] }
}

/// The Horn theory of generalized metric spaces over a finite quantity
/// lattice. Schemas are instantiated per lattice element:
///
/// - `(Refl')  |- x =:0 x` (flag `refl`)
/// - `(Pos')   x =:0 y |- x = y` (flag `pos`)
/// - `(Sym' q)  x =:q y |- y =:q x` (flag `sym`)
/// - `(Tri' q,q')  x =:q y, y =:q' z |- x =:add(q,q') z` (flag `tri`)
/// - `(Max' q,q')  x =:q y, y =:q' z |- x =:max(q,q') z` (flag `max`)
/// - `(Up q<q')  x =:q y |- x =:q' y` (always)
/// - `(Top)    |- x =:1 y` (always; distances land in `[0, 1]`, so the top
///   relation is total)
///
/// The archimedean schema contributes only `(Top)`, its instance at the top
/// quantity. Its instances below the top quantify premises over all real
/// indices above `q`; on structures whose index sets are `(Up)`-saturated
/// within a finite sublattice of `[0, 1]`, each such premise family is
/// equivalent to the conclusion itself (the infimum is attained), so those
/// instances are tautologies. Instantiating them with lattice-indexed
/// premise families instead would cascade with `(Top)` and force every
/// relation to be total.
pub fn gmet_preset(q: &QuantityLattice, flags: GmetFlags) -> AxiomSet {
    let sig = make_gmet_signature(q);
    let n = q.len();
    let top = n - 1;
    let xy = vec!["x".to_string(), "y".to_string()];
    let xyz = vec!["x".to_string(), "y".to_string(), "z".to_string()];
    let mut clauses = Vec::new();
    let clause = |label: String, vars: &Vec<String>, premises: Vec<Atom>, conclusion: Conclusion| {
        HornClause::new(label, sig.clone(), vars.clone(), premises, conclusion)
            .expect("preset clauses are well-formed")
    };

    if flags.refl {
        clauses.push(clause(
            "(Refl')".into(),
            &vec!["x".to_string()],
            vec![],
            Conclusion::Rel(binary_atom(0, 0, 0)),
        ));
    }
    if flags.pos {
        clauses.push(clause(
            "(Pos')".into(),
            &xy,
            vec![binary_atom(0, 0, 1)],
            Conclusion::Eq(0, 1),
        ));
    }
    if flags.sym {
        for i in 0..n {
            clauses.push(clause(
                format!("(Sym' {})", q.element(i)),
                &xy,
                vec![binary_atom(i, 0, 1)],
                Conclusion::Rel(binary_atom(i, 1, 0)),
            ));
        }
    }
    if flags.tri {
        for i in 0..n {
            for j in 0..n {
                clauses.push(clause(
                    format!("(Tri' {},{})", q.element(i), q.element(j)),
                    &xyz,
                    vec![binary_atom(i, 0, 1), binary_atom(j, 1, 2)],
                    Conclusion::Rel(binary_atom(q.add_idx(i, j), 0, 2)),
                ));
            }
        }
    }
    if flags.max {
        for i in 0..n {
            for j in 0..n {
                clauses.push(clause(
                    format!("(Max' {},{})", q.element(i), q.element(j)),
                    &xyz,
                    vec![binary_atom(i, 0, 1), binary_atom(j, 1, 2)],
                    Conclusion::Rel(binary_atom(q.join_idx(i, j), 0, 2)),
                ));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            clauses.push(clause(
                format!("(Up {}<{})", q.element(i), q.element(j)),
                &xy,
                vec![binary_atom(i, 0, 1)],
                Conclusion::Rel(binary_atom(j, 0, 1)),
            ));
        }
    }
    clauses.push(clause(
        "(Top)".into(),
        &xy,
        vec![],
        Conclusion::Rel(binary_atom(top, 0, 1)),
    ));

    AxiomSet::new("gmet", sig, clauses).expect("consistent signature")
}

/// The theory of posets: reflexivity, transitivity, antisymmetry.
pub fn poset_preset() -> AxiomSet {
    let sig = make_poset_signature();
    let clauses = vec![
        HornClause::new(
            "(Refl)",
            sig.clone(),
            vec!["x".into()],
            vec![],
            Conclusion::Rel(binary_atom(0, 0, 0)),
        )
        .unwrap(),
        HornClause::new(
            "(Trans)",
            sig.clone(),
            vec!["x".into(), "y".into(), "z".into()],
            vec![binary_atom(0, 0, 1), binary_atom(0, 1, 2)],
            Conclusion::Rel(binary_atom(0, 0, 2)),
        )
        .unwrap(),
        HornClause::new(
            "(Antisym)",
            sig.clone(),
            vec!["x".into(), "y".into()],
            vec![binary_atom(0, 0, 1), binary_atom(0, 1, 0)],
            Conclusion::Eq(0, 1),
        )
        .unwrap(),
    ];
    AxiomSet::new("poset", sig, clauses).unwrap()
}

/// The theory of L-valued relations over a finite chain: the upward-closure
/// schema plus the top clause (the non-trivial archimedean content over a
/// finite chain, see [`gmet_preset`]).
pub fn lvalued_preset(q: &QuantityLattice) -> AxiomSet {
    let gmet = gmet_preset(q, GmetFlags::none());
    AxiomSet::new("lvalued", gmet.sig().clone(), gmet.clauses().to_vec()).unwrap()
}

/// The functionality axioms of partial algebras: one clause per operation
/// symbol, `alpha_f(x1..xn, y), alpha_f(x1..xn, z) |- y = z`.
pub fn partial_algebra_preset(p: &AlgebraicSignature) -> AxiomSet {
    let sig = make_partial_algebra_signature(p);
    let mut clauses = Vec::new();
    for (rel, (name, _)) in p.symbols().enumerate() {
        let arity = sig.arity(rel) - 1;
        let mut vars: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
        let y = vars.len();
        vars.push("y".into());
        let z = vars.len();
        vars.push("z".into());
        let mut args_y: Vec<usize> = (0..arity).collect();
        args_y.push(y);
        let mut args_z: Vec<usize> = (0..arity).collect();
        args_z.push(z);
        clauses.push(
            HornClause::new(
                format!("(Fun {name})"),
                sig.clone(),
                vars,
                vec![
                    Atom { rel, args: args_y },
                    Atom { rel, args: args_z },
                ],
                Conclusion::Eq(y, z),
            )
            .unwrap(),
        );
    }
    AxiomSet::new("partial", sig, clauses).unwrap()
}

/// Encodes a distance matrix over the lattice as a structure over the GMet
/// signature: `(a, b)` is related at `=:q` iff `d(a, b) <= q`.
pub fn metric_to_structure(q: &QuantityLattice, d: &[Vec<Quantity>]) -> Result<Structure> {
    let n = d.len();
    for row in d {
        if row.len() != n {
            return Err(Error::InvalidInput("distance matrix must be square".into()));
        }
        for entry in row {
            if q.index_of(*entry).is_none() {
                return Err(Error::InvalidInput(format!(
                    "matrix entry {entry} is not a lattice element"
                )));
            }
        }
    }
    let sig = make_gmet_signature(q);
    let mut s = Structure::discrete(sig, n);
    for (a, row) in d.iter().enumerate() {
        for (b, dist) in row.iter().enumerate() {
            for (i, e) in q.elements().iter().enumerate() {
                if dist <= e {
                    s.insert_tuple(i, vec![a, b])?;
                }
            }
        }
    }
    Ok(s)
}

/// Reads a distance matrix back off a structure over a GMet-style
/// signature: `d(a, b) = inf { q : a =:q b }`, with `inf {} = 1`.
pub fn structure_to_metric(a: &Structure) -> Result<Vec<Vec<Quantity>>> {
    let qs = gmet_quantities(a.sig()).ok_or_else(|| {
        Error::InvalidInput("structure is not over a GMet-style signature".into())
    })?;
    let top = *qs.last().expect("nonempty");
    let n = a.size();
    let mut d = vec![vec![Quantity::zero(); n]; n];
    for x in 0..n {
        for y in 0..n {
            d[x][y] = qs
                .iter()
                .enumerate()
                .find(|(i, _)| a.has(*i, &[x, y]))
                .map(|(_, q)| *q)
                .unwrap_or(top);
        }
    }
    Ok(d)
}
