use std::fmt;

use super::Formula;
use crate::time::Interval;

enum Sugar<'a> {
    Next(&'a Formula),
    Eventually(&'a Formula, &'a Interval),
    Always(&'a Formula, &'a Interval),
    Plain,
}

fn sugar(f: &Formula) -> Sugar<'_> {
    match f {
        Formula::Release(a, b, i) if a == b && *i == Interval::positive() => Sugar::Next(a),
        Formula::Release(a, b, i) if **a == Formula::Bottom => Sugar::Always(b, i),
        Formula::Until(a, b, i) if **a == Formula::Top => Sugar::Eventually(b, i),
        _ => Sugar::Plain,
    }
}

/// Binds at least as tightly as `!`, so it never needs parentheses.
fn is_tight(f: &Formula) -> bool {
    matches!(f, Formula::Top | Formula::Bottom | Formula::Atom(_) | Formula::Not(_)) || matches!(sugar(f), Sugar::Next(_))
}

fn decoration(i: &Interval) -> String {
    if *i == Interval::positive() {
        String::new()
    } else {
        i.to_string()
    }
}

fn operand(f: &Formula) -> String {
    if is_tight(f) {
        render(f)
    } else {
        format!("({})", render(f))
    }
}

fn render(f: &Formula) -> String {
    match sugar(f) {
        Sugar::Next(a) => return format!("N {}", operand(a)),
        Sugar::Eventually(b, i) => return format!("F{} {}", decoration(i), operand(b)),
        Sugar::Always(b, i) => return format!("G{} {}", decoration(i), operand(b)),
        Sugar::Plain => {}
    }
    match f {
        Formula::Top => "true".into(),
        Formula::Bottom => "false".into(),
        Formula::Atom(p) => p.clone(),
        Formula::Not(a) => format!("!{}", operand(a)),
        Formula::Or(a, b) => format!("{} | {}", operand(a), operand(b)),
        Formula::And(a, b) => format!("{} & {}", operand(a), operand(b)),
        Formula::Until(a, b, i) => format!("{} U{} {}", operand(a), decoration(i), operand(b)),
        Formula::Release(a, b, i) => format!("{} R{} {}", operand(a), decoration(i), operand(b)),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}
