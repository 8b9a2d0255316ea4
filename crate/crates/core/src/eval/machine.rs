//! Checking the assertions of a machine.

use serde::Serialize;
use thiserror::Error;

use super::solve::solve_node;
use super::{evaluate_node, Classification, Env, Prepared};
use crate::kernel::{Coverage, EvalContext, EvalError, MutationId};
use crate::syntax::{print_pred, Machine};
use crate::typecheck::TypeError;
use crate::value::{BType, Scope};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("type error: {0}")]
    Type(#[from] TypeError),
    #[error("{0}")]
    Eval(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssertionResult {
    pub assertion: String,
    pub verdict: String,
    #[serde(skip)]
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MachineReport {
    pub machine: String,
    pub properties_satisfiable: bool,
    /// Constant values used for the assertions, rendered with element names.
    pub constants: Option<String>,
    pub assertions: Vec<AssertionResult>,
}

impl MachineReport {
    /// One block per assertion: `<assertion>\n== <verdict>\n\n`.
    pub fn to_text(&self) -> String {
        if !self.properties_satisfiable {
            return "properties unsatisfiable\n".into();
        }
        self.assertions.iter().map(|a| format!("{}\n== {}\n\n", a.assertion, a.verdict)).collect()
    }

    /// JSON array of `{assertion, verdict}`.
    pub fn to_json(&self) -> serde_json::Value {
        if !self.properties_satisfiable {
            return serde_json::json!([{ "assertion": "PROPERTIES", "verdict": "properties unsatisfiable" }]);
        }
        serde_json::to_value(&self.assertions).expect("assertion results serialize")
    }

    /// Number of assertions not verified true, plus one if the properties
    /// have no solution.
    pub fn findings(&self) -> usize {
        if !self.properties_satisfiable {
            return 1;
        }
        self.assertions.iter().filter(|a| a.classification != Classification::TrueP).count()
    }
}

/// Binds the constants to the first solution of PROPERTIES in canonical
/// order and classifies every assertion under that binding.
pub fn check_machine(
    m: &Machine,
    scope: &Scope,
    mutation: Option<MutationId>,
    coverage: Option<std::sync::Arc<Coverage>>,
) -> Result<MachineReport, MachineError> {
    let prep = Prepared::machine(m)?;
    let mut ctx = EvalContext::new(prep.scope_for(scope)).with_mutation(mutation);
    if let Some(c) = coverage {
        ctx = ctx.with_coverage(c);
    }
    let crate::syntax::Ast::Machine(pm) = prep.ast() else { unreachable!("prepared from a machine") };
    let vars: Vec<(String, BType)> =
        pm.constants.iter().map(|c| (c.clone(), prep.free_types[c].clone())).collect();
    let eval_err = |e: EvalError| MachineError::Eval(e.to_string());
    let binding = solve_node(&prep, &pm.properties, &vars, &Env::new(), &ctx)
        .map_err(eval_err)?
        .find_map(Result::ok);
    let Some(binding) = binding else {
        return Ok(MachineReport {
            machine: m.name.clone(),
            properties_satisfiable: false,
            constants: None,
            assertions: vec![],
        });
    };
    let mut assertions = Vec::new();
    for a in &pm.assertions {
        let ev = evaluate_node(&prep, a, &binding, &ctx).map_err(eval_err)?;
        assertions.push(AssertionResult {
            assertion: print_pred(a),
            verdict: ev.classification.verdict().to_string(),
            classification: ev.classification,
        });
    }
    Ok(MachineReport {
        machine: m.name.clone(),
        properties_satisfiable: true,
        constants: Some(binding.render(&ctx.scope)),
        assertions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_machine;

    const DOUBLE_EVAL: &str = "MACHINE DoubleEvaluationTest\nSETS ID={aa,bb}\nCONSTANTS iv\n\
        PROPERTIES iv : ID & iv /= bb\nASSERTIONS iv : {aa}; iv /: {bb}\nEND";

    #[test]
    fn unmutated_assertions_hold() {
        let m = parse_machine(DOUBLE_EVAL).unwrap();
        let r = check_machine(&m, &Scope::default(), None, None).unwrap();
        assert_eq!(r.to_text(), "iv : {aa}\n== true\n\niv /: {bb}\n== true\n\n");
        assert_eq!(r.constants.as_deref(), Some("iv=aa"));
        assert_eq!(r.findings(), 0);
    }

    #[test]
    fn singleton_mutation_reproduces_report() {
        let m = parse_machine(DOUBLE_EVAL).unwrap();
        let r = check_machine(&m, &Scope::default(), Some(MutationId::M5), None).unwrap();
        assert_eq!(r.to_text(), "iv : {aa}\n== unknown\n\niv /: {bb}\n== both_true_false\n\n");
        assert_eq!(r.findings(), 2);
        let json = r.to_json();
        assert_eq!(json[1]["verdict"], "both_true_false");
    }

    #[test]
    fn unsatisfiable_properties() {
        let m = parse_machine("MACHINE U\nPROPERTIES 1 = 2\nEND").unwrap();
        let r = check_machine(&m, &Scope::default(), None, None).unwrap();
        assert_eq!(r.to_text(), "properties unsatisfiable\n");
    }
}
