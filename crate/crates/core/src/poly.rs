//! Polynomial templates with symbolic coefficient slots.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// Reserved slot holding the hidden variable of the extra polynomial.
pub const HIDDEN_SLOT: &str = "u0";

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PolyError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("polynomial {poly}: duplicate monomial {monomial:?}")]
    DuplicateMonomial { poly: usize, monomial: Vec<u32> },
    #[error("polynomial {poly}: slot `{slot}` used twice")]
    DuplicateSlot { poly: usize, slot: String },
    #[error("polynomial {0} has no terms")]
    EmptyPolynomial(usize),
    #[error("slot name `{0}` is reserved")]
    ReservedSlot(String),
    #[error("missing coefficient for slot `{0}`")]
    MissingSlot(String),
    #[error("variable index {index} out of range for {n} variables")]
    VariableIndex { index: usize, n: usize },
}

/// Exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Multiply by x_i.
    pub fn times_var(&self, i: usize) -> Monomial {
        let mut e = self.0.clone();
        e[i] += 1;
        Monomial(e)
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    /// Append zero exponents for `extra` new variables.
    pub fn pad(&self, extra: usize) -> Monomial {
        let mut e = self.0.clone();
        e.extend(std::iter::repeat_n(0, extra));
        Monomial(e)
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for (x, &e) in point.iter().zip(&self.0) {
            if e > 0 {
                v *= x.powu(e);
            }
        }
        v
    }

    pub fn eval_real(&self, point: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(point)
            .map(|(&e, x)| x.powi(e as i32))
            .product()
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&e| e as i64).collect()
    }

    pub fn display(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(names)
            .filter(|(e, _)| **e > 0)
            .map(|(&e, n)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Coefficient of a term: an integer scale times an optional symbolic slot.
/// `slot == None` is the integer constant `scale`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coefficient {
    pub scale: i64,
    pub slot: Option<String>,
}

impl Coefficient {
    pub fn slot(name: &str) -> Self {
        Coefficient {
            scale: 1,
            slot: Some(name.to_string()),
        }
    }

    pub fn constant(v: i64) -> Self {
        Coefficient {
            scale: v,
            slot: None,
        }
    }

    pub fn value(&self, coeffs: &CoefficientAssignment) -> Result<f64, PolyError> {
        match &self.slot {
            None => Ok(self.scale as f64),
            Some(s) => Ok(self.scale as f64 * coeffs.get(s)?),
        }
    }

    /// Value over Z/p given slot values already reduced mod p.
    pub fn value_mod(&self, slots: &BTreeMap<String, u64>, p: u64) -> u64 {
        let s = self.scale.rem_euclid(p as i64) as u64;
        match &self.slot {
            None => s,
            Some(name) => {
                let v = slots.get(name).copied().unwrap_or(0);
                s * v % p
            }
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.slot, self.scale) {
            (None, v) => write!(f, "{v}"),
            (Some(s), 1) => write!(f, "{s}"),
            (Some(s), -1) => write!(f, "-{s}"),
            (Some(s), v) => write!(f, "{v}*{s}"),
        }
    }
}

impl Serialize for Coefficient {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.slot {
            None => s.serialize_i64(self.scale),
            Some(_) => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Coefficient;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a slot name such as \"c1\", \"-c1\", \"3*c1\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Coefficient, E> {
                Ok(Coefficient::constant(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Coefficient, E> {
                i64::try_from(v)
                    .map(Coefficient::constant)
                    .map_err(|_| E::custom("integer coefficient too large"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Coefficient, E> {
                parse_coefficient(v).ok_or_else(|| E::custom(format!("bad coefficient `{v}`")))
            }
        }
        d.deserialize_any(V)
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_coefficient(v: &str) -> Option<Coefficient> {
    let v = v.trim();
    if let Ok(i) = v.parse::<i64>() {
        return Some(Coefficient::constant(i));
    }
    let (sign, rest) = match v.strip_prefix('-') {
        Some(r) => (-1, r.trim()),
        None => (1, v.strip_prefix('+').unwrap_or(v).trim()),
    };
    let (scale, name) = match rest.split_once('*') {
        Some((a, b)) => (a.trim().parse::<i64>().ok()?, b.trim()),
        None => (1, rest),
    };
    is_ident(name).then(|| Coefficient {
        scale: sign * scale,
        slot: Some(name.to_string()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: Coefficient,
    pub exps: Monomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolynomialTemplate {
    pub terms: Vec<Term>,
}

impl PolynomialTemplate {
    pub fn new(terms: Vec<Term>) -> Self {
        PolynomialTemplate { terms }
    }

    pub fn support(&self) -> BTreeSet<Monomial> {
        self.terms.iter().map(|t| t.exps.clone()).collect()
    }

    pub fn slots(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().filter_map(|t| t.coeff.slot.as_deref())
    }

    pub fn evaluate(
        &self,
        coeffs: &CoefficientAssignment,
        point: &[Complex64],
    ) -> Result<Complex64, PolyError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.coeff.value(coeffs)? * t.exps.eval(point);
        }
        Ok(acc)
    }

    /// Multiply by a monomial, keeping coefficients.
    pub fn shift(&self, m: &Monomial) -> PolynomialTemplate {
        PolynomialTemplate {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.clone(),
                    exps: t.exps.mul(m),
                })
                .collect(),
        }
    }
}

/// The support of f.
pub fn support(f: &PolynomialTemplate) -> BTreeSet<Monomial> {
    f.support()
}

pub fn evaluate(
    f: &PolynomialTemplate,
    coeffs: &CoefficientAssignment,
    point: &[Complex64],
) -> Result<Complex64, PolyError> {
    f.evaluate(coeffs, point)
}

/// Optional action-matrix hints carried by a system file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionHint {
    pub action_var: String,
    pub basis: Vec<Monomial>,
    pub multipliers: Vec<Vec<Monomial>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemTemplate {
    pub var_names: Vec<String>,
    pub polys: Vec<PolynomialTemplate>,
    /// Known number of roots, if established.
    pub roots: Option<usize>,
    pub action: Option<ActionHint>,
}

impl SystemTemplate {
    pub fn new(var_names: Vec<String>, polys: Vec<PolynomialTemplate>) -> Result<Self, PolyError> {
        let s = SystemTemplate {
            var_names,
            polys,
            roots: None,
            action: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn n_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn validate(&self) -> Result<(), PolyError> {
        let n = self.n_vars();
        for (i, f) in self.polys.iter().enumerate() {
            if f.terms.is_empty() {
                return Err(PolyError::EmptyPolynomial(i));
            }
            let mut mons = BTreeSet::new();
            let mut slots = BTreeSet::new();
            for t in &f.terms {
                if t.exps.nvars() != n {
                    return Err(PolyError::Dimension(format!(
                        "polynomial {i} has an exponent vector of length {} but there are {n} variables",
                        t.exps.nvars()
                    )));
                }
                if !mons.insert(t.exps.clone()) {
                    return Err(PolyError::DuplicateMonomial {
                        poly: i,
                        monomial: t.exps.0.clone(),
                    });
                }
                if let Some(s) = &t.coeff.slot {
                    if !slots.insert(s.clone()) {
                        return Err(PolyError::DuplicateSlot {
                            poly: i,
                            slot: s.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// All slot names in first-appearance order.
    pub fn slots(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for f in &self.polys {
            for s in f.slots() {
                if seen.insert(s.to_string()) {
                    out.push(s.to_string());
                }
            }
        }
        out
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|v| v == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SystemFile::from(self)).expect("serializable")
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoefficientAssignment(pub BTreeMap<String, f64>);

impl CoefficientAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        CoefficientAssignment(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn get(&self, slot: &str) -> Result<f64, PolyError> {
        self.0
            .get(slot)
            .copied()
            .ok_or_else(|| PolyError::MissingSlot(slot.to_string()))
    }

    pub fn set(&mut self, slot: &str, v: f64) {
        self.0.insert(slot.to_string(), v);
    }

    pub fn covers(&self, sys: &SystemTemplate) -> Result<(), PolyError> {
        for s in sys.slots() {
            if s != HIDDEN_SLOT {
                self.get(&s)?;
            }
        }
        Ok(())
    }

    pub fn parse_json(text: &str) -> Result<Self, PolyError> {
        let m: BTreeMap<String, f64> = serde_json::from_str(text).map_err(json_err)?;
        Ok(CoefficientAssignment(m))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.0).expect("serializable")
    }
}

/// max_i |f_i(p)| / (Σ|c p^α| + 1)
pub fn normalized_residual(
    sys: &SystemTemplate,
    coeffs: &CoefficientAssignment,
    point: &[Complex64],
) -> Result<f64, PolyError> {
    let mut worst: f64 = 0.0;
    for f in &sys.polys {
        let mut val = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for t in &f.terms {
            let c = t.coeff.value(coeffs)? * t.exps.eval(point);
            val += c;
            scale += c.norm();
        }
        worst = worst.max(val.norm() / (scale + 1.0));
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Grevlex,
    Grlex,
    Lex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    /// perm[0] is the most significant variable.
    pub perm: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, n: usize) -> Self {
        MonomialOrder {
            kind,
            perm: (0..n).collect(),
        }
    }

    pub fn grevlex(n: usize) -> Self {
        Self::new(OrderKind::Grevlex, n)
    }

    pub fn parse(name: &str, n: usize) -> Option<Self> {
        let kind = match name {
            "grevlex" | "degrevlex" => OrderKind::Grevlex,
            "grlex" | "deglex" => OrderKind::Grlex,
            "lex" => OrderKind::Lex,
            _ => return None,
        };
        Some(Self::new(kind, n))
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let lex = || {
            for &i in &self.perm {
                match a.0[i].cmp(&b.0[i]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        };
        match self.kind {
            OrderKind::Lex => lex(),
            OrderKind::Grlex => a.degree().cmp(&b.degree()).then_with(lex),
            OrderKind::Grevlex => a.degree().cmp(&b.degree()).then_with(|| {
                for &i in self.perm.iter().rev() {
                    match a.0[i].cmp(&b.0[i]) {
                        Ordering::Equal => continue,
                        o => return o.reverse(),
                    }
                }
                Ordering::Equal
            }),
        }
    }

    pub fn sort(&self, v: &mut [Monomial]) {
        v.sort_by(|a, b| self.cmp(a, b));
    }
}

/// Result of extending a system to a monomial set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    /// T_i per polynomial, sorted ascending by monomial order.
    pub t: Vec<Vec<Monomial>>,
    /// mon(F'), sorted ascending.
    pub b: Vec<Monomial>,
}

impl Extension {
    pub fn rows(&self) -> usize {
        self.t.iter().map(Vec::len).sum()
    }
}

/// T_i = { x^a : mon(x^a f_i) ⊆ B' }, then B' shrunk to mon(F').
pub fn extend_system(
    polys: &[PolynomialTemplate],
    bprime: &BTreeSet<Monomial>,
    order: &MonomialOrder,
) -> Extension {
    let mut t = Vec::with_capacity(polys.len());
    let mut used = BTreeSet::new();
    for f in polys {
        let sup: Vec<&Monomial> = f.terms.iter().map(|t| &t.exps).collect();
        let mut ti = BTreeSet::new();
        // any valid multiplier is b / a for some b in B' and a fixed term a
        let a0 = sup[0];
        for b in bprime {
            if let Some(m) = b.div(a0) {
                if sup.iter().all(|a| bprime.contains(&a.mul(&m))) {
                    ti.insert(m);
                }
            }
        }
        for m in &ti {
            for a in &sup {
                used.insert(a.mul(m));
            }
        }
        let mut ti: Vec<Monomial> = ti.into_iter().collect();
        order.sort(&mut ti);
        t.push(ti);
    }
    let mut b: Vec<Monomial> = used.into_iter().collect();
    order.sort(&mut b);
    Extension { t, b }
}

// ---------------------------------------------------------------------------
// System file parsing

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    variables: Vec<String>,
    polynomials: Vec<PolySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    roots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    action: Option<ActionHint>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PolySpec {
    Terms(Vec<Term>),
    Expr(String),
}

impl From<&SystemTemplate> for SystemFile {
    fn from(s: &SystemTemplate) -> Self {
        SystemFile {
            variables: s.var_names.clone(),
            polynomials: s.polys.iter().map(|p| PolySpec::Terms(p.terms.clone())).collect(),
            roots: s.roots,
            action: s.action.clone(),
        }
    }
}

fn json_err(e: serde_json::Error) -> PolyError {
    PolyError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Locate the first occurrence of `needle` as a JSON string literal in `text`.
fn locate(text: &str, needle: &str) -> (usize, usize) {
    let quoted = serde_json::to_string(needle).unwrap_or_default();
    match text.find(&quoted) {
        Some(off) => {
            let before = &text[..off + 1];
            let line = before.matches('\n').count() + 1;
            let col = off + 1 - before.rfind('\n').map(|p| p + 1).unwrap_or(0) + 1;
            (line, col)
        }
        None => (1, 1),
    }
}

impl Serialize for SystemTemplate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SystemFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SystemTemplate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = SystemFile::deserialize(d)?;
        from_file(file, "").map_err(de::Error::custom)
    }
}

pub fn parse_system(text: &str) -> Result<SystemTemplate, PolyError> {
    let file: SystemFile = serde_json::from_str(text).map_err(json_err)?;
    from_file(file, text)
}

fn from_file(file: SystemFile, text: &str) -> Result<SystemTemplate, PolyError> {
    let n = file.variables.len();
    if n == 0 {
        return Err(PolyError::Dimension("no variables declared".into()));
    }
    let mut polys = Vec::new();
    for spec in file.polynomials {
        let p = match spec {
            PolySpec::Terms(terms) => PolynomialTemplate { terms },
            PolySpec::Expr(src) => parse_expr(&src, &file.variables).map_err(|(col, msg)| {
                let (line, start) = locate(text, &src);
                PolyError::Syntax {
                    line,
                    column: start + col,
                    message: msg,
                }
            })?,
        };
        polys.push(p);
    }
    let sys = SystemTemplate {
        var_names: file.variables,
        polys,
        roots: file.roots,
        action: file.action,
    };
    sys.validate()?;
    for f in &sys.polys {
        for s in f.slots() {
            if s == HIDDEN_SLOT {
                return Err(PolyError::ReservedSlot(s.to_string()));
            }
        }
    }
    if let Some(h) = &sys.action {
        if sys.var_index(&h.action_var).is_none() {
            return Err(PolyError::Dimension(format!(
                "action variable `{}` is not declared",
                h.action_var
            )));
        }
        for m in h.basis.iter().chain(h.multipliers.iter().flatten()) {
            if m.nvars() != n {
                return Err(PolyError::Dimension("action hint monomial length".into()));
            }
        }
    }
    Ok(sys)
}

/// Parse "c1*x^2*y - 3*c2 + x - 4". Errors carry a 0-based column.
fn parse_expr(src: &str, vars: &[String]) -> Result<PolynomialTemplate, (usize, String)> {
    let n = vars.len();
    let bytes = src.as_bytes();
    let mut pos = 0usize;
    let mut terms: Vec<Term> = Vec::new();
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let mut first = true;
    loop {
        skip_ws(&mut pos);
        if pos >= bytes.len() {
            if first {
                return Err((pos, "empty polynomial".into()));
            }
            break;
        }
        let mut sign = 1i64;
        if bytes[pos] == b'+' || bytes[pos] == b'-' {
            if bytes[pos] == b'-' {
                sign = -1;
            }
            pos += 1;
            skip_ws(&mut pos);
        } else if !first {
            return Err((pos, format!("expected `+` or `-`, found `{}`", bytes[pos] as char)));
        }
        first = false;
        let mut scale = sign;
        let mut slot: Option<String> = None;
        let mut exps = vec![0u32; n];
        loop {
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                return Err((pos, "expected a factor".into()));
            }
            let start = pos;
            let c = bytes[pos];
            if c.is_ascii_digit() {
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                let v: i64 = src[start..pos]
                    .parse()
                    .map_err(|_| (start, "integer too large".to_string()))?;
                scale = scale
                    .checked_mul(v)
                    .ok_or((start, "integer too large".to_string()))?;
            } else if c.is_ascii_alphabetic() || c == b'_' {
                while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                    pos += 1;
                }
                let name = &src[start..pos];
                skip_ws(&mut pos);
                let mut power = 1u32;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    skip_ws(&mut pos);
                    let ps = pos;
                    if pos < bytes.len() && bytes[pos] == b'-' {
                        return Err((ps, "negative exponent".into()));
                    }
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if ps == pos {
                        return Err((ps, "expected exponent".into()));
                    }
                    power = src[ps..pos]
                        .parse()
                        .map_err(|_| (ps, "exponent too large".to_string()))?;
                }
                if let Some(i) = vars.iter().position(|v| v == name) {
                    exps[i] += power;
                } else {
                    if power != 1 {
                        return Err((start, format!("coefficient slot `{name}` cannot be raised to a power")));
                    }
                    if slot.is_some() {
                        return Err((start, format!("second coefficient slot `{name}` in one term")));
                    }
                    slot = Some(name.to_string());
                }
            } else {
                return Err((pos, format!("unexpected `{}`", c as char)));
            }
            skip_ws(&mut pos);
            if pos < bytes.len() && bytes[pos] == b'*' {
                pos += 1;
                continue;
            }
            break;
        }
        terms.push(Term {
            coeff: Coefficient { scale, slot },
            exps: Monomial(exps),
        });
    }
    Ok(PolynomialTemplate { terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn quad() -> SystemTemplate {
        parse_system(r#"{"variables":["x"],"polynomials":["a*x^2 + b*x + c"]}"#).unwrap()
    }

    #[test]
    fn parses_linear_expression() {
        let s = parse_system(r#"{"variables":["x1"],"polynomials":["x1 - c"]}"#).unwrap();
        assert_eq!(s.polys.len(), 1);
        assert_eq!(s.polys[0].terms.len(), 2);
        assert_eq!(s.polys[0].terms[1].coeff, Coefficient { scale: -1, slot: Some("c".into()) });
    }

    #[test]
    fn negative_exponent_is_syntax_error() {
        let e = parse_system("{\"variables\":[\"x1\"],\n \"polynomials\":[\"c*x1^-1\"]}").unwrap_err();
        match e {
            PolyError::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 23);
            }
            other => panic!("{other:?}"),
        }
        let e = parse_system(r#"{"variables":["x1"],"polynomials":[[{"coeff":"c","exps":[-1]}]]}"#)
            .unwrap_err();
        assert!(matches!(e, PolyError::Syntax { .. }));
    }

    #[test]
    fn rejects_duplicates_and_dimension() {
        let e = parse_system(r#"{"variables":["x"],"polynomials":["a*x + b*x"]}"#).unwrap_err();
        assert!(matches!(e, PolyError::DuplicateMonomial { .. }));
        let e = parse_system(
            r#"{"variables":["x","y"],"polynomials":[[{"coeff":"a","exps":[1]}]]}"#,
        )
        .unwrap_err();
        assert!(matches!(e, PolyError::Dimension(_)));
        let e = parse_system(r#"{"variables":["x"],"polynomials":["u0*x + 1"]}"#).unwrap_err();
        assert_eq!(e, PolyError::ReservedSlot("u0".into()));
    }

    #[test]
    fn structured_and_expression_forms_agree() {
        let a = parse_system(
            r#"{"variables":["x","y"],"polynomials":[[{"coeff":"b1","exps":[1,1]},{"coeff":"-b2","exps":[0,0]}]]}"#,
        )
        .unwrap();
        let b = parse_system(r#"{"variables":["x","y"],"polynomials":["b1*x*y - b2"]}"#).unwrap();
        assert_eq!(a, b);
        let again = parse_system(&a.to_json()).unwrap();
        assert_eq!(again, a);
    }

    #[test]
    fn evaluate_examples() {
        let s = quad();
        let co = CoefficientAssignment::from_pairs([("a", 1.0), ("b", -5.0), ("c", 6.0)]);
        assert_eq!(s.polys[0].evaluate(&co, &[c(2.0)]).unwrap(), c(0.0));
        assert_eq!(s.polys[0].evaluate(&co, &[c(0.0)]).unwrap(), c(6.0));
    }

    #[test]
    fn residual_examples() {
        let s = parse_system(r#"{"variables":["x"],"polynomials":["a*x + b"]}"#).unwrap();
        let co = CoefficientAssignment::from_pairs([("a", 1.0), ("b", -2.0)]);
        let r = normalized_residual(&s, &co, &[c(3.0)]).unwrap();
        assert!((r - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(normalized_residual(&s, &co, &[c(2.0)]).unwrap(), 0.0);
        let zero = CoefficientAssignment::from_pairs([("a", 0.0), ("b", 0.0)]);
        assert_eq!(normalized_residual(&s, &zero, &[c(5.0)]).unwrap(), 0.0);
    }

    #[test]
    fn missing_slot_is_named() {
        let s = quad();
        let co = CoefficientAssignment::from_pairs([("a", 1.0), ("b", -5.0)]);
        assert_eq!(co.covers(&s), Err(PolyError::MissingSlot("c".into())));
    }

    #[test]
    fn extend_univariate() {
        let s = parse_system(r#"{"variables":["x"],"polynomials":["x - c"]}"#).unwrap();
        let o = MonomialOrder::grevlex(1);
        let b: BTreeSet<Monomial> = [Monomial(vec![0]), Monomial(vec![1])].into();
        let e = extend_system(&s.polys, &b, &o);
        assert_eq!(e.t, vec![vec![Monomial(vec![0])]]);
        let b: BTreeSet<Monomial> = (0..3).map(|i| Monomial(vec![i])).collect();
        let e = extend_system(&s.polys, &b, &o);
        assert_eq!(e.t[0], vec![Monomial(vec![0]), Monomial(vec![1])]);
        assert_eq!(e.b.len(), 3);
    }

    #[test]
    fn grevlex_order() {
        let o = MonomialOrder::grevlex(3);
        let m = |v: [u32; 3]| Monomial(v.to_vec());
        // x > y > z, xz < y^2 in grevlex
        assert_eq!(o.cmp(&m([1, 0, 0]), &m([0, 1, 0])), Ordering::Greater);
        assert_eq!(o.cmp(&m([1, 0, 1]), &m([0, 2, 0])), Ordering::Less);
        assert_eq!(o.cmp(&m([0, 0, 3]), &m([1, 0, 0])), Ordering::Greater);
        let lex = MonomialOrder::new(OrderKind::Lex, 3);
        assert_eq!(lex.cmp(&m([1, 0, 0]), &m([0, 5, 5])), Ordering::Greater);
    }
}
