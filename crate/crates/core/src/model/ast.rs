use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
            BinaryOp::Pow => 4,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => " + ",
            BinaryOp::Sub => " - ",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

/// Arity rule of a builtin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Exactly(usize),
    Between(usize, usize),
}

impl Arity {
    pub fn accepts(self, n: usize) -> bool {
        match self {
            Arity::Exactly(k) => n == k,
            Arity::Between(lo, hi) => (lo..=hi).contains(&n),
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Arity::Exactly(k) => write!(f, "{k}"),
            Arity::Between(lo, hi) if hi == usize::MAX => write!(f, "at least {lo}"),
            Arity::Between(lo, hi) => write!(f, "{lo} to {hi}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Abs,
    Min,
    Max,
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    MaxReRoot,
    PeakGain,
}

impl Builtin {
    pub const ALL: [Builtin; 10] = [
        Builtin::Abs,
        Builtin::Min,
        Builtin::Max,
        Builtin::Exp,
        Builtin::Log,
        Builtin::Sqrt,
        Builtin::Sin,
        Builtin::Cos,
        Builtin::MaxReRoot,
        Builtin::PeakGain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Abs => "abs",
            Builtin::Min => "min",
            Builtin::Max => "max",
            Builtin::Exp => "exp",
            Builtin::Log => "log",
            Builtin::Sqrt => "sqrt",
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::MaxReRoot => "max_re_root",
            Builtin::PeakGain => "peak_gain",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn arity(self) -> Arity {
        match self {
            Builtin::Min | Builtin::Max => Arity::Between(2, usize::MAX),
            // degree 1..=64
            Builtin::MaxReRoot => Arity::Between(2, crate::model::poly::MAX_DEGREE + 1),
            Builtin::PeakGain => Arity::Exactly(5),
            _ => Arity::Exactly(1),
        }
    }
}

/// Syntax tree of an uncertain quantity u(q).
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    /// Parameter coordinate q[i], 0-based.
    Param(usize),
    Neg(Box<Expr>),
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Call { func: Builtin, args: Vec<Expr> },
    /// Coefficient list; only appears as a `peak_gain` argument.
    List(Vec<Expr>),
}

impl Expr {
    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    /// Largest parameter index referenced, if any.
    pub fn max_param(&self) -> Option<usize> {
        match self {
            Expr::Number(_) => None,
            Expr::Param(i) => Some(*i),
            Expr::Neg(e) => e.max_param(),
            Expr::Binary { lhs, rhs, .. } => lhs.max_param().max(rhs.max_param()),
            Expr::Call { args, .. } | Expr::List(args) => args.iter().filter_map(Expr::max_param).max(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            Expr::Neg(_) => 3,
            _ => 5,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[Expr]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

/// Prints with the minimum parentheses needed to re-parse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(v) if *v < 0.0 || v.is_sign_negative() => write!(f, "({v:?})"),
            Expr::Number(v) => write!(f, "{v:?}"),
            Expr::Param(i) => write!(f, "q[{i}]"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write_child(f, e.precedence() < 3)
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                lhs.write_child(f, lhs.precedence() < p)?;
                f.write_str(op.symbol())?;
                rhs.write_child(f, rhs.precedence() <= p)
            }
            Expr::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Expr::List(items) => {
                f.write_str("[")?;
                write_list(f, items)?;
                f.write_str("]")
            }
        }
    }
}
