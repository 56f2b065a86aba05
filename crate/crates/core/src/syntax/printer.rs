use std::fmt;

use super::formula::{Formula, Question};
use super::term::Var;

const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;
const ATOM: u8 = 6;

struct Doc {
    text: String,
    prec: u8,
    /// Ends in a quantifier body that would swallow anything printed after it.
    open: bool,
}

fn operand(f: &Formula, min: u8, last: bool) -> (String, bool) {
    let d = render(f);
    if d.prec < min || (d.open && !last) {
        (format!("({})", d.text), false)
    } else {
        (d.text, d.open)
    }
}

fn binary(a: &Formula, op: &str, b: &Formula, prec: u8, lmin: u8, rmin: u8) -> Doc {
    let (l, _) = operand(a, lmin, false);
    let (r, open) = operand(b, rmin, true);
    Doc { text: format!("{l} {op} {r}"), prec, open }
}

fn quantifier(keyword: &str, first: &Var, body: &Formula, universal: bool) -> Doc {
    let mut vars = vec![first.to_string()];
    let mut body = body;
    loop {
        let next = if universal {
            body.as_forall()
        } else {
            match body {
                Formula::Exists(v, g) => Some((v, g.as_ref())),
                _ => None,
            }
        };
        match next {
            Some((v, g)) => {
                vars.push(v.to_string());
                body = g;
            }
            None => break,
        }
    }
    let inner = render(body);
    Doc { text: format!("{keyword} {}. {}", vars.join(" "), inner.text), prec: UNARY, open: true }
}

fn render(f: &Formula) -> Doc {
    match f {
        Formula::Top => Doc { text: "true".into(), prec: ATOM, open: false },
        Formula::Bottom => Doc { text: "false".into(), prec: ATOM, open: false },
        Formula::Atom(p, args) => {
            let text = if args.is_empty() {
                p.to_string()
            } else {
                let args: Vec<String> = args.iter().map(|t| t.to_string()).collect();
                format!("{p}({})", args.join(", "))
            };
            Doc { text, prec: ATOM, open: false }
        }
        Formula::Equal(s, t) => Doc { text: format!("{s} = {t}"), prec: ATOM, open: false },
        _ => {
            if let Some((a, b)) = f.as_iff() {
                return binary(a, "<->", b, IFF, IMP, IMP);
            }
            if let Some((v, body)) = f.as_forall() {
                return quantifier("forall", v, body, true);
            }
            if let Some((a, b)) = f.as_or() {
                return binary(a, "|", b, OR, OR, AND);
            }
            if let Some((a, b)) = f.as_implies() {
                return binary(a, "->", b, IMP, OR, IMP);
            }
            match f {
                Formula::Not(g) => {
                    if let Formula::Equal(s, t) = g.as_ref() {
                        return Doc { text: format!("{s} != {t}"), prec: ATOM, open: false };
                    }
                    let (inner, open) = operand(g, UNARY, true);
                    Doc { text: format!("~{inner}"), prec: UNARY, open }
                }
                Formula::And(a, b) => binary(a, "&", b, AND, AND, UNARY),
                Formula::Exists(v, g) => quantifier("exists", v, g, false),
                _ => unreachable!("handled above"),
            }
        }
    }
}

/// Renders a formula in the surface grammar, recovering derived connectives.
pub fn print(f: &Formula) -> String {
    render(f).text
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "? {}", print(self.body()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Signature, Term};

    #[test]
    fn renders_constants_and_conjunction() {
        assert_eq!(print(&Formula::Top), "true");
        let f =
            Formula::and(Formula::atom("p", vec![Term::constant("a")]), Formula::atom("p", vec![Term::constant("c")]));
        assert_eq!(print(&f), "p(a) & p(c)");
    }

    #[test]
    fn recovers_sugar() {
        for s in [
            "p(a) | p(b)",
            "p(a) -> p(b)",
            "p(a) <-> p(b)",
            "forall X Y. r(X, Y)",
            "exists X. p(X) & q(X)",
            "X != c",
            "(forall X. p(X)) & q",
            "(~exists X. p(X)) | q",
        ] {
            let f = parse_formula(s, &mut Signature::new()).unwrap();
            assert_eq!(print(&f), s);
        }
    }

    #[test]
    fn open_quantifier_in_left_operand_is_parenthesized() {
        let f = Formula::or(
            Formula::and(
                Formula::atom("a", vec![]),
                Formula::forall(Var::new("X"), Formula::atom("b", vec![Term::var("X")])),
            ),
            Formula::atom("c", vec![]),
        );
        let text = print(&f);
        let back = parse_formula(&text, &mut Signature::new()).unwrap();
        assert_eq!(back, f, "{text}");
    }
}
