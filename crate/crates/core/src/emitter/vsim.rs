//! Evaluator for the structural Verilog subset this crate emits: modules with
//! ANSI ports, `wire` declarations, continuous assignments and named-port
//! instances. Expressions follow the unsigned Verilog-2001 width rules for
//! the operators they may use.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num { width: u32, value: u64 },
    Sym(&'static str),
}

const SYMBOLS: [&str; 29] = [
    "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "(", ")", "[", "]", "{", "}", ",", ";", ":", "=", "?", "+", "-",
    "*", "&", "|", "^", "~", "!", "<", ">",
];

fn verr(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Verilog(format!("line {line}: {msg}"))
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line) = (0, 1);
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if text[i..].starts_with("//") || c == '`' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if text[i..].starts_with("/*") {
            let end = text[i + 2..].find("*/").ok_or_else(|| verr(line, "unterminated comment"))?;
            line += text[i..i + 2 + end].matches('\n').count();
            i += end + 4;
        } else if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), line));
        } else if c.is_ascii_digit() || c == '\'' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'_') {
                i += 1;
            }
            let size_text: String = text[start..i].chars().filter(|&ch| ch != '_').collect();
            if i < bytes.len() && bytes[i] == b'\'' {
                i += 1;
                let radix = match bytes.get(i).map(|b| b.to_ascii_lowercase()) {
                    Some(b'h') => 16,
                    Some(b'd') => 10,
                    Some(b'b') => 2,
                    Some(b'o') => 8,
                    _ => return Err(verr(line, "bad number base")),
                };
                i += 1;
                let ds = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let digits: String = text[ds..i].chars().filter(|&ch| ch != '_').collect();
                let value = u64::from_str_radix(&digits, radix).map_err(|_| verr(line, format!("bad digits `{digits}`")))?;
                let width = if size_text.is_empty() {
                    32
                } else {
                    size_text.parse().map_err(|_| verr(line, "bad size"))?
                };
                if width == 0 || width > 64 {
                    return Err(verr(line, format!("unsupported width {width}")));
                }
                out.push((Tok::Num { width, value: value & mask(width) }, line));
            } else {
                let value = size_text.parse().map_err(|_| verr(line, "bad number"))?;
                out.push((Tok::Num { width: 32, value }, line));
            }
        } else if let Some(s) = SYMBOLS.iter().find(|s| text[i..].starts_with(**s)) {
            out.push((Tok::Sym(s), line));
            i += s.len();
        } else if c == '.' {
            out.push((Tok::Sym("."), line));
            i += 1;
        } else {
            return Err(verr(line, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BinOp {
    Mul,
    Add,
    Sub,
    Shl,
    Shr,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Xor,
    Or,
    LAnd,
    LOr,
}

#[derive(Clone, Debug)]
enum Expr {
    Num(u32, u64),
    Ident(String),
    Bit(String, u32),
    Part(String, u32, u32),
    Concat(Vec<Expr>),
    Repl(u32, Vec<Expr>),
    Not(Box<Expr>),
    Neg(Box<Expr>),
    LogNot(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PortDir {
    Input,
    Output,
}

#[derive(Clone, Copy, Debug)]
struct Net {
    width: u32,
    lsb: u32,
}

#[derive(Clone, Debug)]
enum Stmt {
    Assign(Expr, Expr),
    Instance { module: String, conns: Vec<(String, Expr)> },
}

#[derive(Clone, Debug)]
struct Module {
    ports: Vec<(String, PortDir)>,
    nets: HashMap<String, Net>,
    stmts: Vec<Stmt>,
}

/// A parsed set of modules.
#[derive(Clone, Debug)]
pub struct VerilogDesign {
    modules: BTreeMap<String, Module>,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(0, |t| t.1)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Result<Tok> {
        let t = self.toks.get(self.pos).cloned().ok_or_else(|| verr(self.line(), "unexpected end of input"))?;
        self.pos += 1;
        Ok(t.0)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == w)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(verr(self.line(), format!("expected `{s}`, found {:?}", self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String> {
        let line = self.line();
        match self.next()? {
            Tok::Ident(s) => Ok(s),
            t => Err(verr(line, format!("expected identifier, found {t:?}"))),
        }
    }

    fn number(&mut self) -> Result<u64> {
        let line = self.line();
        match self.next()? {
            Tok::Num { value, .. } => Ok(value),
            t => Err(verr(line, format!("expected number, found {t:?}"))),
        }
    }

    fn range(&mut self) -> Result<Net> {
        if !self.eat("[") {
            return Ok(Net { width: 1, lsb: 0 });
        }
        let hi = self.number()? as u32;
        self.expect(":")?;
        let lo = self.number()? as u32;
        self.expect("]")?;
        if hi < lo || hi - lo >= 64 {
            return Err(verr(self.line(), format!("unsupported range [{hi}:{lo}]")));
        }
        Ok(Net { width: hi - lo + 1, lsb: lo })
    }

    fn module(&mut self) -> Result<(String, Module)> {
        let name = self.ident()?;
        let mut m = Module {
            ports: Vec::new(),
            nets: HashMap::new(),
            stmts: Vec::new(),
        };
        self.expect("(")?;
        let mut current: Option<(PortDir, Net)> = None;
        while !self.eat(")") {
            if !m.ports.is_empty() {
                self.expect(",")?;
            }
            let dir = if self.is_word("input") {
                Some(PortDir::Input)
            } else if self.is_word("output") {
                Some(PortDir::Output)
            } else {
                None
            };
            if let Some(d) = dir {
                self.pos += 1;
                if self.is_word("wire") {
                    self.pos += 1;
                }
                current = Some((d, self.range()?));
            }
            let (d, net) = current.ok_or_else(|| verr(self.line(), "port without direction"))?;
            let p = self.ident()?;
            m.nets.insert(p.clone(), net);
            m.ports.push((p, d));
        }
        self.expect(";")?;

        loop {
            let line = self.line();
            let word = self.ident()?;
            match word.as_str() {
                "endmodule" => break,
                "wire" => {
                    let net = self.range()?;
                    loop {
                        let n = self.ident()?;
                        m.nets.insert(n.clone(), net);
                        if self.eat("=") {
                            let e = self.expr()?;
                            m.stmts.push(Stmt::Assign(Expr::Ident(n), e));
                        }
                        if !self.eat(",") {
                            break;
                        }
                    }
                    self.expect(";")?;
                }
                "assign" => {
                    loop {
                        let target = self.primary()?;
                        if !matches!(target, Expr::Ident(_) | Expr::Bit(..) | Expr::Part(..)) {
                            return Err(verr(line, "assignment target must be a net or a select"));
                        }
                        self.expect("=")?;
                        let e = self.expr()?;
                        m.stmts.push(Stmt::Assign(target, e));
                        if !self.eat(",") {
                            break;
                        }
                    }
                    self.expect(";")?;
                }
                "reg" | "always" | "initial" | "integer" | "task" | "function" | "case" | "generate" | "parameter"
                | "localparam" | "signed" => {
                    return Err(verr(line, format!("unsupported construct `{word}`")));
                }
                _ => {
                    let _instance = self.ident()?;
                    self.expect("(")?;
                    let mut conns = Vec::new();
                    while !self.eat(")") {
                        if !conns.is_empty() {
                            self.expect(",")?;
                        }
                        self.expect(".")?;
                        let port = self.ident()?;
                        self.expect("(")?;
                        let e = self.expr()?;
                        self.expect(")")?;
                        conns.push((port, e));
                    }
                    self.expect(";")?;
                    m.stmts.push(Stmt::Instance { module: word, conns });
                }
            }
        }
        Ok((name, m))
    }

    fn expr(&mut self) -> Result<Expr> {
        let c = self.binary(0)?;
        if self.eat("?") {
            let a = self.expr()?;
            self.expect(":")?;
            let b = self.expr()?;
            return Ok(Expr::Cond(Box::new(c), Box::new(a), Box::new(b)));
        }
        Ok(c)
    }

    fn binary(&mut self, level: usize) -> Result<Expr> {
        const LEVELS: [&[(&str, BinOp)]; 10] = [
            &[("||", BinOp::LOr)],
            &[("&&", BinOp::LAnd)],
            &[("|", BinOp::Or)],
            &[("^", BinOp::Xor)],
            &[("&", BinOp::And)],
            &[("==", BinOp::Eq), ("!=", BinOp::Ne)],
            &[("<=", BinOp::Le), (">=", BinOp::Ge), ("<", BinOp::Lt), (">", BinOp::Gt)],
            &[("<<", BinOp::Shl), (">>", BinOp::Shr)],
            &[("+", BinOp::Add), ("-", BinOp::Sub)],
            &[("*", BinOp::Mul)],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        'outer: loop {
            for &(s, op) in LEVELS[level] {
                if self.eat(s) {
                    let rhs = self.binary(level + 1)?;
                    lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat("~") {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat("!") {
            return Ok(Expr::LogNot(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        let line = self.line();
        match self.next()? {
            Tok::Num { width, value } => Ok(Expr::Num(width, value)),
            Tok::Ident(name) => {
                if self.eat("[") {
                    let hi = self.number()? as u32;
                    if self.eat(":") {
                        let lo = self.number()? as u32;
                        self.expect("]")?;
                        Ok(Expr::Part(name, hi, lo))
                    } else {
                        self.expect("]")?;
                        Ok(Expr::Bit(name, hi))
                    }
                } else {
                    Ok(Expr::Ident(name))
                }
            }
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Sym("{") => {
                let first = self.expr()?;
                if self.is_sym("{") {
                    let count = match first {
                        Expr::Num(_, v) => v as u32,
                        _ => return Err(verr(line, "replication count must be a constant")),
                    };
                    self.expect("{")?;
                    let items = self.items("}")?;
                    self.expect("}")?;
                    return Ok(Expr::Repl(count, items));
                }
                let mut items = vec![first];
                while self.eat(",") {
                    items.push(self.expr()?);
                }
                self.expect("}")?;
                Ok(Expr::Concat(items))
            }
            t => Err(verr(line, format!("unexpected token {t:?}"))),
        }
    }

    fn items(&mut self, close: &str) -> Result<Vec<Expr>> {
        let mut items = vec![self.expr()?];
        while self.eat(",") {
            items.push(self.expr()?);
        }
        if !self.is_sym(close) {
            return Err(verr(self.line(), format!("expected `{close}`")));
        }
        self.pos += 1;
        Ok(items)
    }
}

struct Frame<'a> {
    module: &'a Module,
    values: HashMap<&'a str, u64>,
}

impl<'a> Frame<'a> {
    fn net(&self, name: &str) -> Result<Net> {
        self.module
            .nets
            .get(name)
            .copied()
            .ok_or_else(|| Error::Verilog(format!("undeclared net `{name}`")))
    }

    fn value(&self, name: &str) -> u64 {
        self.values.get(name).copied().unwrap_or(0)
    }

    fn width(&self, e: &Expr) -> Result<u32> {
        let w = match e {
            Expr::Num(w, _) => *w,
            Expr::Ident(n) => self.net(n)?.width,
            Expr::Bit(..) => 1,
            Expr::Part(_, h, l) => h.saturating_sub(*l) + 1,
            Expr::Concat(items) => items.iter().map(|i| self.width(i)).sum::<Result<u32>>()?,
            Expr::Repl(n, items) => n * items.iter().map(|i| self.width(i)).sum::<Result<u32>>()?,
            Expr::Not(a) | Expr::Neg(a) => self.width(a)?,
            Expr::LogNot(_) => 1,
            Expr::Bin(op, a, b) => match op {
                BinOp::Mul | BinOp::Add | BinOp::Sub | BinOp::And | BinOp::Or | BinOp::Xor => {
                    self.width(a)?.max(self.width(b)?)
                }
                BinOp::Shl | BinOp::Shr => self.width(a)?,
                _ => 1,
            },
            Expr::Cond(_, a, b) => self.width(a)?.max(self.width(b)?),
        };
        if w > 64 {
            return Err(Error::Verilog(format!("expression wider than 64 bits ({w})")));
        }
        Ok(w)
    }

    fn select(&self, name: &str, hi: u32, lo: u32) -> Result<u64> {
        let net = self.net(name)?;
        if lo < net.lsb || hi >= net.lsb + net.width || hi < lo {
            return Err(Error::Verilog(format!("select [{hi}:{lo}] out of range for `{name}`")));
        }
        Ok(self.value(name) >> (lo - net.lsb) & mask(hi - lo + 1))
    }

    fn eval(&self, e: &Expr, ctx: u32) -> Result<u64> {
        let m = mask(ctx);
        let v = match e {
            Expr::Num(_, v) => *v,
            Expr::Ident(n) => self.value(n),
            Expr::Bit(n, i) => self.select(n, *i, *i)?,
            Expr::Part(n, h, l) => self.select(n, *h, *l)?,
            Expr::Concat(items) => self.concat(items)?,
            Expr::Repl(n, items) => {
                let w: u32 = items.iter().map(|i| self.width(i)).sum::<Result<u32>>()?;
                let unit = self.concat(items)?;
                (0..*n).fold(0u64, |acc, _| if w >= 64 { unit } else { acc << w | unit })
            }
            Expr::Not(a) => !self.eval(a, ctx)?,
            Expr::Neg(a) => self.eval(a, ctx)?.wrapping_neg(),
            Expr::LogNot(a) => (self.eval(a, self.width(a)?)? == 0) as u64,
            Expr::Bin(op, a, b) => match op {
                BinOp::Mul => self.eval(a, ctx)?.wrapping_mul(self.eval(b, ctx)?),
                BinOp::Add => self.eval(a, ctx)?.wrapping_add(self.eval(b, ctx)?),
                BinOp::Sub => self.eval(a, ctx)?.wrapping_sub(self.eval(b, ctx)?),
                BinOp::And => self.eval(a, ctx)? & self.eval(b, ctx)?,
                BinOp::Or => self.eval(a, ctx)? | self.eval(b, ctx)?,
                BinOp::Xor => self.eval(a, ctx)? ^ self.eval(b, ctx)?,
                BinOp::Shl | BinOp::Shr => {
                    let x = self.eval(a, ctx)?;
                    let s = self.eval(b, self.width(b)?)?;
                    match (op, s >= 64) {
                        (_, true) => 0,
                        (BinOp::Shl, _) => x << s,
                        _ => x >> s,
                    }
                }
                BinOp::LAnd | BinOp::LOr => {
                    let x = self.eval(a, self.width(a)?)? != 0;
                    let y = self.eval(b, self.width(b)?)? != 0;
                    (if *op == BinOp::LAnd { x && y } else { x || y }) as u64
                }
                _ => {
                    let w = self.width(a)?.max(self.width(b)?);
                    let (x, y) = (self.eval(a, w)?, self.eval(b, w)?);
                    (match op {
                        BinOp::Lt => x < y,
                        BinOp::Le => x <= y,
                        BinOp::Gt => x > y,
                        BinOp::Ge => x >= y,
                        BinOp::Eq => x == y,
                        _ => x != y,
                    }) as u64
                }
            },
            Expr::Cond(c, a, b) => {
                if self.eval(c, self.width(c)?)? != 0 {
                    self.eval(a, ctx)?
                } else {
                    self.eval(b, ctx)?
                }
            }
        };
        Ok(v & m)
    }

    fn concat(&self, items: &[Expr]) -> Result<u64> {
        let mut acc = 0u64;
        for item in items {
            let w = self.width(item)?;
            let v = self.eval(item, w)?;
            acc = if w >= 64 { v } else { acc << w | v };
        }
        Ok(acc)
    }

    /// Writes `value` into an lvalue; returns whether anything changed.
    fn store(&mut self, target: &Expr, value: u64) -> Result<bool> {
        let (name, hi, lo) = match target {
            Expr::Ident(n) => {
                let net = self.net(n)?;
                (n, net.lsb + net.width - 1, net.lsb)
            }
            Expr::Bit(n, i) => (n, *i, *i),
            Expr::Part(n, h, l) => (n, *h, *l),
            _ => return Err(Error::Verilog("bad assignment target".into())),
        };
        let net = self.net(name)?;
        if lo < net.lsb || hi >= net.lsb + net.width || hi < lo {
            return Err(Error::Verilog(format!("select [{hi}:{lo}] out of range for `{name}`")));
        }
        let shift = lo - net.lsb;
        let field = mask(hi - lo + 1) << shift;
        let key: &'a str = self.module.nets.get_key_value(name.as_str()).expect("declared").0;
        let old = self.value(name);
        let new = (old & !field) | (value << shift & field);
        self.values.insert(key, new);
        Ok(new != old)
    }
}

impl VerilogDesign {
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { toks: lex(text)?, pos: 0 };
        let mut modules = BTreeMap::new();
        while p.peek().is_some() {
            let line = p.line();
            let kw = p.ident()?;
            if kw != "module" {
                return Err(verr(line, format!("expected `module`, found `{kw}`")));
            }
            let (name, m) = p.module()?;
            if modules.insert(name.clone(), m).is_some() {
                return Err(verr(line, format!("module `{name}` defined twice")));
            }
        }
        Ok(VerilogDesign { modules })
    }

    pub fn module_names(&self) -> Vec<&str> {
        self.modules.keys().map(String::as_str).collect()
    }

    /// Ports of a module in declaration order, with widths.
    pub fn ports(&self, module: &str) -> Result<Vec<(String, PortDir, u32)>> {
        let m = self.module(module)?;
        Ok(m.ports.iter().map(|(n, d)| (n.clone(), *d, m.nets[n].width)).collect())
    }

    fn module(&self, name: &str) -> Result<&Module> {
        self.modules.get(name).ok_or_else(|| Error::Verilog(format!("no module `{name}`")))
    }

    /// Evaluates a module for the given input values and returns every output.
    pub fn eval(&self, module: &str, inputs: &[(&str, u64)]) -> Result<BTreeMap<String, u64>> {
        self.eval_depth(module, inputs, 0)
    }

    fn eval_depth(&self, module: &str, inputs: &[(&str, u64)], depth: usize) -> Result<BTreeMap<String, u64>> {
        if depth > 32 {
            return Err(Error::Verilog(format!("instance nesting too deep at `{module}`")));
        }
        let m = self.module(module)?;
        let mut frame = Frame {
            module: m,
            values: HashMap::new(),
        };
        for &(name, v) in inputs {
            match m.ports.iter().find(|(p, _)| p == name) {
                Some((p, PortDir::Input)) => {
                    frame.values.insert(p.as_str(), v & mask(m.nets[p].width));
                }
                _ => return Err(Error::Verilog(format!("`{module}` has no input `{name}`"))),
            }
        }

        // statements are usually in dependency order; iterate to a fixpoint
        let mut settled = false;
        for _ in 0..=m.stmts.len() + 1 {
            let mut changed = false;
            for stmt in &m.stmts {
                match stmt {
                    Stmt::Assign(target, e) => {
                        let tw = frame.width(target)?;
                        let v = frame.eval(e, tw.max(frame.width(e)?))?;
                        changed |= frame.store(target, v & mask(tw))?;
                    }
                    Stmt::Instance { module: sub, conns } => {
                        let sm = self.module(sub)?;
                        let mut ins = Vec::new();
                        for (port, e) in conns {
                            let (_, dir) = sm
                                .ports
                                .iter()
                                .find(|(p, _)| p == port)
                                .ok_or_else(|| Error::Verilog(format!("`{sub}` has no port `{port}`")))?;
                            if *dir == PortDir::Input {
                                let pw = sm.nets[port].width;
                                ins.push((port.as_str(), frame.eval(e, pw.max(frame.width(e)?))?));
                            }
                        }
                        let outs = self.eval_depth(sub, &ins, depth + 1)?;
                        for (port, e) in conns {
                            if let Some(&v) = outs.get(port) {
                                changed |= frame.store(e, v)?;
                            }
                        }
                    }
                }
            }
            if !changed {
                settled = true;
                break;
            }
        }
        if !settled {
            return Err(Error::Verilog(format!("`{module}` does not settle (combinational loop)")));
        }
        Ok(m.ports
            .iter()
            .filter(|(_, d)| *d == PortDir::Output)
            .map(|(p, _)| (p.clone(), frame.value(p)))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(body: &str, inputs: &[(&str, u64)]) -> u64 {
        let text = format!("module t (input wire [7:0] a, input wire [7:0] b, output wire [15:0] y);\n{body}\nendmodule");
        VerilogDesign::parse(&text).unwrap().eval("t", inputs).unwrap()["y"]
    }

    #[test]
    fn context_width_extends_before_adding() {
        assert_eq!(run("assign y = a + b;", &[("a", 255), ("b", 1)]), 256);
        assert_eq!(run("wire [7:0] s = a + b;\nassign y = s;", &[("a", 255), ("b", 1)]), 0);
        // operands of a comparison are sized among themselves, so the carry is lost
        assert_eq!(run("assign y = (a + b) > 8'd0;", &[("a", 255), ("b", 1)]), 0);
        assert_eq!(run("assign y = (a + b) > 9'd255;", &[("a", 255), ("b", 1)]), 1);
    }

    #[test]
    fn negation_and_selects() {
        assert_eq!(run("wire [7:0] n = ~a + 8'd1;\nassign y = {8'd0, n};", &[("a", 3)]), 253);
        assert_eq!(run("assign y = {{8{a[7]}}, a};", &[("a", 0x80)]), 0xff80);
        assert_eq!(run("assign y = a[7:4];", &[("a", 0xab)]), 0xa);
        assert_eq!(run("assign y[3] = a[0];\nassign y[0] = 1'b1;", &[("a", 1)]), 9);
    }

    #[test]
    fn operators() {
        assert_eq!(run("assign y = a < b ? a : b;", &[("a", 5), ("b", 3)]), 3);
        assert_eq!(run("assign y = (a << 3) - (a << 1);", &[("a", 10)]), 60);
        assert_eq!(run("assign y = a & ~b | a ^ b;", &[("a", 0b1100), ("b", 0b1010)]), 0b0110);
        assert_eq!(run("assign y = !a && b != 0;", &[("a", 0), ("b", 2)]), 1);
        assert_eq!(run("assign y = a * b;", &[("a", 20), ("b", 20)]), 400);
    }

    #[test]
    fn instances_and_order() {
        let text = "
            module inv (input wire [3:0] i, output wire [3:0] o);
                assign o = ~i;
            endmodule
            /* top */
            module top (input wire [3:0] x, output wire [3:0] y);
                assign y = z;
                wire [3:0] z;
                inv u (.i(x), .o(z));
            endmodule";
        let d = VerilogDesign::parse(text).unwrap();
        assert_eq!(d.module_names(), vec!["inv", "top"]);
        assert_eq!(d.eval("top", &[("x", 5)]).unwrap()["y"], 10);
        assert_eq!(d.ports("top").unwrap()[1], ("y".to_string(), PortDir::Output, 4));
    }

    #[test]
    fn rejects_what_it_cannot_model() {
        assert!(VerilogDesign::parse("module m (input wire clk); always @(posedge clk) begin end endmodule").is_err());
        let loop_text = "module m (output wire y); wire a = ~a; assign y = a; endmodule";
        assert!(VerilogDesign::parse(loop_text).unwrap().eval("m", &[]).is_err());
        let d = VerilogDesign::parse("module m (input wire [1:0] a, output wire y); assign y = a[2]; endmodule").unwrap();
        assert!(d.eval("m", &[("a", 1)]).is_err());
        assert!(d.eval("m", &[("q", 1)]).is_err());
    }
}
