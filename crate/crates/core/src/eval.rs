//! Term evaluation over groupoids, total and partial.

use std::collections::HashMap;

use thiserror::Error;

use crate::groupoid::{Groupoid, PartialGroupoid};
use crate::term::{Identity, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(char),
    #[error("element {element} out of range for order {order}")]
    OutOfRange { element: u8, order: usize },
}

/// Evaluates a ground instance of `t` on `g` under `assignment`.
pub fn evaluate(
    t: &Term,
    g: &Groupoid,
    assignment: &HashMap<char, u8>,
) -> Result<u8, EvalError> {
    match t {
        Term::Var(v) => {
            let e = *assignment
                .get(v)
                .ok_or(EvalError::UnboundVariable(*v))?;
            if e as usize >= g.order() {
                return Err(EvalError::OutOfRange {
                    element: e,
                    order: g.order(),
                });
            }
            Ok(e)
        }
        Term::Prod(l, r) => {
            let a = evaluate(l, g, assignment)?;
            let b = evaluate(r, g, assignment)?;
            Ok(g.op(a, b))
        }
    }
}

/// Like [`evaluate`], but a product addressing an unfilled cell yields
/// `None`, and `None` propagates upward.
pub fn evaluate_partial(
    t: &Term,
    pg: &PartialGroupoid,
    assignment: &HashMap<char, u8>,
) -> Result<Option<u8>, EvalError> {
    match t {
        Term::Var(v) => {
            let e = *assignment
                .get(v)
                .ok_or(EvalError::UnboundVariable(*v))?;
            if e as usize >= pg.order() {
                return Err(EvalError::OutOfRange {
                    element: e,
                    order: pg.order(),
                });
            }
            Ok(Some(e))
        }
        Term::Prod(l, r) => {
            let a = evaluate_partial(l, pg, assignment)?;
            let b = evaluate_partial(r, pg, assignment)?;
            match (a, b) {
                (Some(a), Some(b)) => Ok(pg.get(a, b)),
                _ => Ok(None),
            }
        }
    }
}

/// True iff both sides of `id` agree on `g` under every assignment of
/// its variables.
pub fn holds(id: &Identity, g: &Groupoid) -> bool {
    let compiled = CompiledIdentity::new(id);
    let n = g.order();
    let mut assignment = vec![0u8; compiled.arity.max(1)];
    loop {
        if compiled.lhs.eval(g.table(), n, &assignment)
            != compiled.rhs.eval(g.table(), n, &assignment)
        {
            return false;
        }
        if !next_assignment(&mut assignment[..compiled.arity], n) {
            return true;
        }
    }
}

/// Advances `assignment` as a little-endian base-n odometer; false when
/// it wraps back to all zeros.
pub(crate) fn next_assignment(assignment: &mut [u8], order: usize) -> bool {
    for slot in assignment.iter_mut() {
        if (*slot as usize) + 1 < order {
            *slot += 1;
            return true;
        }
        *slot = 0;
    }
    false
}

/// Sentinel for an unfilled cell in the packed partial-table encoding.
pub(crate) const UNFILLED: u8 = u8::MAX;

/// Postfix opcode: push a variable slot's value, or pop two operands and
/// push their product.
#[derive(Clone, Copy, Debug)]
pub(crate) enum OpCode {
    Load(u8),
    Mul,
}

#[derive(Clone, Debug)]
pub(crate) struct CompiledTerm {
    code: Vec<OpCode>,
}

impl CompiledTerm {
    fn new(t: &Term, slots: &[char]) -> Self {
        let mut code = Vec::new();
        fn emit(t: &Term, slots: &[char], code: &mut Vec<OpCode>) {
            match t {
                Term::Var(v) => {
                    let slot = slots.iter().position(|s| s == v).expect("bound variable");
                    code.push(OpCode::Load(slot as u8));
                }
                Term::Prod(l, r) => {
                    emit(l, slots, code);
                    emit(r, slots, code);
                    code.push(OpCode::Mul);
                }
            }
        }
        emit(t, slots, &mut code);
        assert!(code.len() < 256, "term too large to compile");
        CompiledTerm { code }
    }

    /// Replaces variable loads with the concrete elements of `assignment`.
    pub(crate) fn ground(&self, assignment: &[u8]) -> Vec<OpCode> {
        self.code
            .iter()
            .map(|op| match op {
                OpCode::Load(slot) => OpCode::Load(assignment[*slot as usize]),
                OpCode::Mul => OpCode::Mul,
            })
            .collect()
    }

    #[inline]
    pub(crate) fn eval(&self, table: &[u8], order: usize, assignment: &[u8]) -> u8 {
        let mut stack = [0u8; 128];
        let mut top = 0usize;
        for op in &self.code {
            match op {
                OpCode::Load(slot) => {
                    stack[top] = assignment[*slot as usize];
                    top += 1;
                }
                OpCode::Mul => {
                    let b = stack[top - 1];
                    let a = stack[top - 2];
                    stack[top - 2] = table[a as usize * order + b as usize];
                    top -= 1;
                }
            }
        }
        stack[0]
    }
}

/// Evaluates grounded postfix code against a packed partial table where
/// [`UNFILLED`] marks empty cells; returns [`UNFILLED`] when the value is
/// not yet determined.
#[inline]
pub(crate) fn eval_ground_partial(code: &[OpCode], cells: &[u8], order: usize) -> u8 {
    let mut stack = [0u8; 128];
    let mut top = 0usize;
    for op in code {
        match op {
            OpCode::Load(element) => {
                stack[top] = *element;
                top += 1;
            }
            OpCode::Mul => {
                let b = stack[top - 1];
                let a = stack[top - 2];
                if a == UNFILLED || b == UNFILLED {
                    return UNFILLED;
                }
                let v = cells[a as usize * order + b as usize];
                if v == UNFILLED {
                    return UNFILLED;
                }
                stack[top - 2] = v;
                top -= 1;
            }
        }
    }
    stack[0]
}

/// An identity compiled to postfix programs over shared variable slots.
#[derive(Clone, Debug)]
pub(crate) struct CompiledIdentity {
    pub(crate) lhs: CompiledTerm,
    pub(crate) rhs: CompiledTerm,
    pub(crate) arity: usize,
}

impl CompiledIdentity {
    pub(crate) fn new(id: &Identity) -> Self {
        let slots = id.free_variables();
        CompiledIdentity {
            lhs: CompiledTerm::new(id.lhs(), &slots),
            rhs: CompiledTerm::new(id.rhs(), &slots),
            arity: slots.len(),
        }
    }

    /// True iff the identity holds on the full table under every
    /// assignment, using a caller-provided scratch buffer.
    #[inline]
    pub(crate) fn holds_on(&self, table: &[u8], order: usize, scratch: &mut [u8]) -> bool {
        let scratch = &mut scratch[..self.arity];
        scratch.fill(0);
        loop {
            if self.lhs.eval(table, order, scratch) != self.rhs.eval(table, order, scratch) {
                return false;
            }
            if !next_assignment(scratch, order) {
                return true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_identity, parse_term};

    fn assignment(pairs: &[(char, u8)]) -> HashMap<char, u8> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn evaluate_examples() {
        let constant = Groupoid::new(2, vec![0, 0, 0, 0]).unwrap();
        let xy = parse_term("xy").unwrap();
        assert_eq!(
            evaluate(&xy, &constant, &assignment(&[('x', 1), ('y', 1)])),
            Ok(0)
        );
        let leaf = parse_term("x").unwrap();
        let any = Groupoid::from_index(3, 7).unwrap();
        assert_eq!(evaluate(&leaf, &any, &assignment(&[('x', 2)])), Ok(2));
        let z2 = Groupoid::new(2, vec![0, 1, 1, 0]).unwrap();
        let t = parse_term("xx*yz").unwrap();
        assert_eq!(
            evaluate(&t, &z2, &assignment(&[('x', 1), ('y', 1), ('z', 0)])),
            Ok(1)
        );
    }

    #[test]
    fn evaluate_errors() {
        let z2 = Groupoid::new(2, vec![0, 1, 1, 0]).unwrap();
        let xy = parse_term("xy").unwrap();
        assert_eq!(
            evaluate(&xy, &z2, &assignment(&[('x', 0)])),
            Err(EvalError::UnboundVariable('y'))
        );
        assert_eq!(
            evaluate(&xy, &z2, &assignment(&[('x', 0), ('y', 5)])),
            Err(EvalError::OutOfRange {
                element: 5,
                order: 2
            })
        );
    }

    #[test]
    fn partial_evaluation_propagates_unknown() {
        let mut pg = PartialGroupoid::empty(2);
        let xy = parse_term("xy").unwrap();
        let a = assignment(&[('x', 1), ('y', 1)]);
        assert_eq!(evaluate_partial(&xy, &pg, &a), Ok(None));
        pg.set(1, 1, 0);
        assert_eq!(evaluate_partial(&xy, &pg, &a), Ok(Some(0)));
        let leaf = parse_term("x").unwrap();
        let empty = PartialGroupoid::empty(2);
        assert_eq!(
            evaluate_partial(&leaf, &empty, &assignment(&[('x', 0)])),
            Ok(Some(0))
        );
    }

    #[test]
    fn holds_examples() {
        let constant = Groupoid::new(2, vec![0, 0, 0, 0]).unwrap();
        let lsm = parse_identity("xx*yz = xy*xz").unwrap();
        assert!(holds(&lsm, &constant));
        let z2 = Groupoid::new(2, vec![0, 1, 1, 0]).unwrap();
        let assoc = parse_identity("x(yz) = (xy)z").unwrap();
        assert!(holds(&assoc, &z2));
        // the Cote identity holds on exactly 6 of the 16 order-2 tables
        let cote = parse_identity("x(xy*z) = (z*xx)y").unwrap();
        let count = (0..16)
            .filter(|&k| holds(&cote, &Groupoid::from_index(2, k).unwrap()))
            .count();
        assert_eq!(count, 6);
    }

    #[test]
    fn compiled_matches_recursive_on_all_order2_tables() {
        let ids = [
            "x(yz) = (xy)z",
            "xx*yz = xy*xz",
            "x(xy*z) = (z*xx)y",
            "x = x",
            "xy = yx",
        ];
        for formula in ids {
            let id = parse_identity(formula).unwrap();
            for k in 0..16 {
                let g = Groupoid::from_index(2, k).unwrap();
                let naive = {
                    let vars = id.free_variables();
                    let mut ok = true;
                    let mut vals = vec![0u8; vars.len()];
                    loop {
                        let a: HashMap<char, u8> =
                            vars.iter().copied().zip(vals.iter().copied()).collect();
                        if evaluate(id.lhs(), &g, &a).unwrap()
                            != evaluate(id.rhs(), &g, &a).unwrap()
                        {
                            ok = false;
                            break;
                        }
                        if !next_assignment(&mut vals, 2) {
                            break;
                        }
                    }
                    ok
                };
                assert_eq!(holds(&id, &g), naive, "{formula} disagrees at k={k}");
            }
        }
    }

    #[test]
    fn partial_on_complete_table_matches_total() {
        let t = parse_term("x(xy*z)").unwrap();
        for k in [0u64, 5000, 19682] {
            let g = Groupoid::from_index(3, k).unwrap();
            let pg = PartialGroupoid::from_groupoid(&g);
            let mut vals = vec![0u8; 3];
            loop {
                let a = assignment(&[('x', vals[0]), ('y', vals[1]), ('z', vals[2])]);
                assert_eq!(
                    evaluate_partial(&t, &pg, &a).unwrap(),
                    Some(evaluate(&t, &g, &a).unwrap())
                );
                if !next_assignment(&mut vals, 3) {
                    break;
                }
            }
        }
    }
}
