//! Hand-written kernel unit tests.

use crate::eval::{evaluate, solve, Classification, Env, Prepared};
use crate::kernel::EvalContext;
use crate::syntax::parse_pred;
use crate::typecheck::TypeEnv;
use crate::value::{BType, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitCase {
    /// Must classify as true.
    Holds(&'static str),
    /// Must classify as not well-defined.
    Undefined(&'static str),
    /// Solving for the integer variable must find the given value.
    Solves(&'static str, &'static str, i64),
}

impl UnitCase {
    pub fn text(self) -> &'static str {
        match self {
            UnitCase::Holds(t) | UnitCase::Undefined(t) | UnitCase::Solves(t, ..) => t,
        }
    }
}

use UnitCase::*;

pub const UNIT_CASES: &[UnitCase] = &[
    // sets
    Holds("{1,2} \\/ {2,3} = {1,2,3}"),
    Holds("{1,2} /\\ {2,3} = {2}"),
    Holds("{3,1} /\\ {1} = {1}"),
    Holds("{1,2} \\ {2,3} = {1}"),
    Holds("{1} * {TRUE} = {(1|->TRUE)}"),
    Holds("POW({1}) = {{}, {1}}"),
    Holds("POW1({1,2}) = {{1}, {2}, {1,2}}"),
    Holds("FIN({1}) = {{}, {1}}"),
    Holds("FIN1({1}) = {{1}}"),
    Holds("union({{1}, {2,3}}) = {1,2,3}"),
    Holds("inter({{1,2}, {2,3}}) = {2}"),
    Undefined("inter(POW1({1}) - POW1({1})) = {1}"),
    Holds("card({1,2,3}) = 3"),
    Holds("card({1} - {1}) = 0"),
    Holds("min({3,1,2}) = 1"),
    Undefined("min({1} - {1}) = 0"),
    Holds("max({3,1,2}) = 3"),
    Undefined("max({1} - {1}) = 0"),
    Holds("2..4 = {2,3,4}"),
    Holds("card(3..1) = 0"),
    // relations
    Holds("dom({1|->2, 3|->4}) = {1,3}"),
    Holds("ran({1|->2, 3|->4}) = {2,4}"),
    Holds("{1|->2}~ = {2|->1}"),
    Holds("id({1,2}) = {1|->1, 2|->2}"),
    Holds("({1|->2} ; {2|->3}) = {1|->3}"),
    Holds("{1|->2, 2|->2} <+ {1|->3} = {1|->3, 2|->2}"),
    Holds("{1} <| {1|->2, 3|->4} = {1|->2}"),
    Holds("{1|->2, 3|->4} |> {4} = {3|->4}"),
    Holds("{1} <<| {1|->2, 3|->4} = {3|->4}"),
    Holds("{1|->2, 3|->4} |>> {4} = {1|->2}"),
    Holds("{1|->2, 1|->3, 4|->5}[{1}] = {2,3}"),
    // functions
    Holds("{1|->2, 3|->4}(3) = 4"),
    Undefined("{1|->2}(3) = 2"),
    Undefined("{1|->2, 1|->3}(1) = 2"),
    Holds("{1|->2} : {1} +-> {2}"),
    Holds("{1|->2} : {1,3} +-> {2,4}"),
    Holds("{3|->1} /: {1} +-> {1}"),
    Holds("{1|->1, 1|->2} /: {1} +-> {1,2}"),
    Holds("{1|->1} /: {1,2} --> {1}"),
    Holds("{1|->1, 2|->1} /: {1,2} >+> {1}"),
    Holds("{1|->1} /: {1} +->> {1,2}"),
    Holds("{1|->2, 2|->1} : {1,2} >->> {1,2}"),
    Holds("card({1,2} --> {1}) = 1"),
    Holds("card({1} <-> {1,2}) = 4"),
    Holds("%x.(x : 1..2 | x + 1) = {1|->2, 2|->3}"),
    // arithmetic
    Holds("2 + 3 = 5"),
    Holds("2 - 5 = -3"),
    Holds("3 * 3 = 9"),
    Holds("-2 * 3 = -6"),
    Holds("7 / 2 = 3"),
    Holds("-7 / 2 = -3"),
    Undefined("1 / 0 = 0"),
    Holds("7 mod 3 = 1"),
    Undefined("1 mod 0 = 0"),
    Undefined("-1 mod 3 = 2"),
    Holds("2 ** 3 = 8"),
    Undefined("2 ** -1 = 0"),
    Holds("-(2) = 0 - 2"),
    Holds("1 < 2 & 2 <= 2 & 3 > 2 & 3 >= 3"),
    Holds("not(2 < 1)"),
    // sequences
    Holds("size([5,6]) = 2"),
    Undefined("size({2|->5}) = 1"),
    Holds("[1] ^ [2] = [1,2]"),
    Undefined("{2|->5} ^ [1] = [1]"),
    Holds("first([3,4]) = 3"),
    Undefined("first([]) = 1"),
    Undefined("first({2|->5}) = 5"),
    Holds("last([3,4]) = 4"),
    Undefined("last([]) = 1"),
    Undefined("last({2|->5}) = 5"),
    Holds("front([3,4]) = [3]"),
    Undefined("front([]) = [1]"),
    Undefined("front({2|->5}) = [5]"),
    Holds("tail([3,4]) = [4]"),
    Undefined("tail([]) = [1]"),
    Undefined("tail({2|->5}) = [5]"),
    Holds("rev([1,2]) = [2,1]"),
    Undefined("rev({2|->5}) = [5]"),
    Holds("[1,1] : seq({1})"),
    Holds("{2|->1} /: seq({1})"),
    Holds("[] : seq({1}) /\\ seq({2})"),
    // predicates
    Holds("1 : {1,2}"),
    Holds("not(3 : {1,2})"),
    Holds("3 /: {1,2}"),
    Holds("not(1 /: {1,2})"),
    Holds("{1} /= {2}"),
    Holds("not({1} = {2})"),
    Holds("{1} <: {1,2}"),
    Holds("not({3} <: {1,2})"),
    Holds("{3} /<: {1,2}"),
    Holds("not({1} /<: {1,2})"),
    Holds("{1} <<: {1,2} & not({1} <<: {1})"),
    Holds("not(1 = 2 & 1 / 0 = 1)"),
    Holds("1 = 1 or 1 / 0 = 1"),
    Holds("(1 = 2 => 1 / 0 = 1) & (1 = 1 <=> 2 = 2)"),
    Holds("bool(1 = 1) = TRUE"),
    // builtins and enumeration
    Holds("NATURAL <: INTEGER"),
    Holds("NAT1 <: NAT & INT = MININT..MAXINT"),
    Holds("BOOL = {TRUE, FALSE}"),
    Holds("{x | x > 0 & x < 3} = {1,2}"),
    Holds("#x.(x * x = 4 & x > 0)"),
    Holds("!x.(x : 1..3 => x * x >= x)"),
    Holds("{x, y | x : 1..2 & y = x + 1} = {1|->2, 2|->3}"),
    Solves("x : 1..3 & x * x = 4", "x", 2),
    Solves("x + x = -2", "x", -1),
];

/// Runs one case; `Err` says why it failed.
pub fn run_case(case: UnitCase, ctx: &EvalContext) -> Result<(), String> {
    let pred = parse_pred(case.text()).map_err(|e| e.to_string())?;
    match case {
        Holds(_) | Undefined(_) => {
            let want = if matches!(case, Holds(_)) { Classification::TrueP } else { Classification::NotWellDefined };
            let prep = Prepared::pred(&pred, &TypeEnv::new()).map_err(|e| e.to_string())?;
            let got = evaluate(&prep, &Env::new(), ctx).map_err(|e| e.to_string())?.classification;
            if got == want {
                Ok(())
            } else {
                Err(format!("expected {want}, got {got}"))
            }
        }
        Solves(_, var, value) => {
            let env = TypeEnv::new().with_var(var, BType::Int);
            let prep = Prepared::pred(&pred, &env).map_err(|e| e.to_string())?;
            let want = Value::Int(value);
            let found = solve(&prep, &[(var.to_string(), BType::Int)], &Env::new(), ctx)
                .map_err(|e| e.to_string())?
                .filter_map(Result::ok)
                .any(|env| env.get(var) == Some(&want));
            if found {
                Ok(())
            } else {
                Err(format!("{var} = {value} not found"))
            }
        }
    }
}
