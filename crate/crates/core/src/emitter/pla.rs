//! Berkeley PLA text.
//!
//! Input and output columns are written most significant first, so the first
//! character of a row is `X_{n-1}` and the first output column is `Y_{m-1}`.

use crate::error::{Error, Result};
use crate::minimizer::{Cube, PlaCover};

pub fn emit_pla(cover: &PlaCover) -> String {
    let m = cover.outputs();
    let mut lines = vec![
        format!(".i {}", cover.inputs()),
        format!(".o {m}"),
        format!(".p {}", cover.product_count()),
    ];
    for (p, cube) in cover.products().iter().enumerate() {
        let members = cover.membership(p);
        let outs: String = (0..m).rev().map(|j| if members >> j & 1 == 1 { '1' } else { '0' }).collect();
        lines.push(format!("{cube} {outs}"));
    }
    lines.push(".e".to_string());
    lines.join("\n")
}

pub fn parse_pla(text: &str) -> Result<PlaCover> {
    let err = |line: usize, message: String| Error::PlaParse { line, message };
    let (mut inputs, mut outputs, mut declared) = (None::<u32>, None::<u32>, None::<usize>);
    let mut rows: Vec<(Cube, u32)> = Vec::new();
    let mut ended = false;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(err(line_no, "content after .e".into()));
        }
        let mut fields = line.split_whitespace();
        let head = fields.next().expect("nonempty line");
        if let Some(directive) = head.strip_prefix('.') {
            let arg = fields.next();
            if fields.next().is_some() {
                return Err(err(line_no, format!("too many fields for .{directive}")));
            }
            let number = |what: &str| -> Result<usize> {
                arg.ok_or_else(|| err(line_no, format!(".{what} needs a count")))?
                    .parse()
                    .map_err(|_| err(line_no, format!(".{what} count is not a number")))
            };
            match directive {
                "i" | "o" if !rows.is_empty() => {
                    return Err(err(line_no, format!(".{directive} after product rows")));
                }
                "i" if inputs.is_some() => return Err(err(line_no, "duplicate .i".into())),
                "o" if outputs.is_some() => return Err(err(line_no, "duplicate .o".into())),
                "p" if declared.is_some() => return Err(err(line_no, "duplicate .p".into())),
                "i" => inputs = Some(number("i")? as u32),
                "o" => outputs = Some(number("o")? as u32),
                "p" => declared = Some(number("p")?),
                "e" | "end" => {
                    if arg.is_some() {
                        return Err(err(line_no, ".e takes no argument".into()));
                    }
                    ended = true;
                }
                _ => return Err(err(line_no, format!("unknown directive .{directive}"))),
            }
            continue;
        }

        let (n, m) = match (inputs, outputs) {
            (Some(n), Some(m)) => (n, m),
            _ => return Err(err(line_no, "product row before .i and .o".into())),
        };
        let outs = fields.next().ok_or_else(|| err(line_no, "row has no output part".into()))?;
        if fields.next().is_some() {
            return Err(err(line_no, "row has extra fields".into()));
        }
        if head.len() != n as usize {
            return Err(err(line_no, format!("input part `{head}` is not {n} characters")));
        }
        let cube: Cube = head.parse().map_err(|e: Error| err(line_no, e.to_string()))?;
        if outs.len() != m as usize {
            return Err(err(line_no, format!("output part `{outs}` is not {m} characters")));
        }
        let mut members = 0u32;
        for (k, ch) in outs.chars().enumerate() {
            let j = m as usize - 1 - k;
            match ch {
                '1' => members |= 1 << j,
                '0' | '~' | '-' => {}
                _ => return Err(err(line_no, format!("bad output character `{ch}`"))),
            }
        }
        rows.push((cube, members));
    }

    let last = text.lines().count().max(1);
    if !ended {
        return Err(err(last, "missing .e".into()));
    }
    let (n, m) = match (inputs, outputs) {
        (Some(n), Some(m)) => (n, m),
        _ => return Err(err(last, "missing .i or .o".into())),
    };
    if let Some(p) = declared {
        if p != rows.len() {
            return Err(err(last, format!(".p declares {p} products, found {}", rows.len())));
        }
    }
    PlaCover::from_rows(n, m, rows).map_err(|e| err(last, e.to_string()))
}
