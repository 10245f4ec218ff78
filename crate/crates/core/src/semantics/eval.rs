use crate::syntax::{BinOp, Expr, Value};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("free variable `{0}`")]
    FreeVariable(String),
    #[error("operands of `{0}` have the wrong sort")]
    SortMismatch(&'static str),
}

/// Big-step evaluation of a closed expression. Integer arithmetic wraps.
pub fn eval_expr(e: &Expr) -> Result<Value, EvalError> {
    match e {
        Expr::Lit(v) => Ok(v.clone()),
        Expr::Var(x) => Err(EvalError::FreeVariable(x.text().to_string())),
        Expr::Not(inner) => match eval_expr(inner)? {
            Value::Bool(b) => Ok(Value::Bool(!b)),
            _ => Err(EvalError::SortMismatch("not")),
        },
        Expr::Bin(op, l, r) => {
            let (l, r) = (eval_expr(l)?, eval_expr(r)?);
            match (op, l, r) {
                (BinOp::Add, Value::Int(a), Value::Int(b)) => Ok(Value::Int(a.wrapping_add(b))),
                (BinOp::Sub, Value::Int(a), Value::Int(b)) => Ok(Value::Int(a.wrapping_sub(b))),
                (BinOp::Mul, Value::Int(a), Value::Int(b)) => Ok(Value::Int(a.wrapping_mul(b))),
                (BinOp::Le, Value::Int(a), Value::Int(b)) => Ok(Value::Bool(a <= b)),
                (BinOp::Eq, Value::Int(a), Value::Int(b)) => Ok(Value::Bool(a == b)),
                (BinOp::And, Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(a && b)),
                (op, _, _) => Err(EvalError::SortMismatch(op.symbol())),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Var;

    #[test]
    fn arithmetic_and_comparison() {
        assert_eq!(
            eval_expr(&Expr::bin(BinOp::Add, Expr::int(2), Expr::int(3))),
            Ok(Value::Int(5))
        );
        assert_eq!(
            eval_expr(&Expr::bin(BinOp::Le, Expr::int(99), Expr::int(100))),
            Ok(Value::Bool(true))
        );
        assert_eq!(
            eval_expr(&Expr::var(&Var::free("x"))),
            Err(EvalError::FreeVariable("x".into()))
        );
    }

    #[test]
    fn services_evaluate_to_themselves() {
        let a = Var::free("a");
        assert_eq!(eval_expr(&Expr::service(&a)), Ok(Value::Service(a)));
    }
}
