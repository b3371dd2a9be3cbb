//! Verilog-2001 text: the two-level core, the region wrapper, ROM baselines
//! and a self-checking testbench.

use std::fmt::Write as _;

use crate::baseline::{RomKbTable, RomKind};
use crate::error::{Error, Result};
use crate::minimizer::{Cube, Literal};
use crate::netlist::{PlaNetlist, WrapperSpec};
use crate::tabulator::{LambdaMode, QuantizedFunctionTable, RegionKind};

/// Replaces characters that cannot appear in a Verilog identifier.
pub fn sanitize_identifier(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
        s.insert(0, 'm');
    }
    s
}

/// Name of the two-level module inside `emit_verilog(netlist, name)`.
pub fn core_module_name(netlist: &PlaNetlist, module_name: &str) -> String {
    let base = sanitize_identifier(module_name);
    if netlist.wrapper().is_some() {
        format!("{base}_core")
    } else {
        base
    }
}

fn hex(width: u32, value: i64) -> String {
    let m = if width >= 64 { u64::MAX } else { (1u64 << width) - 1 };
    format!("{width}'h{:x}", value as u64 & m)
}

fn range(width: u32) -> String {
    format!("[{}:0]", width - 1)
}

fn product_expr(cube: &Cube) -> String {
    let lits: Vec<String> = (0..cube.width())
        .rev()
        .filter_map(|b| match cube.literal(b) {
            Literal::Positive => Some(format!("x[{b}]")),
            Literal::Negative => Some(format!("~x[{b}]")),
            Literal::Absent => None,
        })
        .collect();
    if lits.is_empty() {
        "1'b1".to_string()
    } else {
        lits.join(" & ")
    }
}

/// `value * gain` as a shift-add over the canonical signed digits of `gain`,
/// plus `bias`.
fn shift_add(value: &str, csd: &[(u32, i8)], width: u32, bias: u64) -> String {
    let mut s = String::new();
    for (i, &(shift, sign)) in csd.iter().enumerate() {
        let term = if shift == 0 {
            value.to_string()
        } else {
            format!("({value} << {shift})")
        };
        match (i, sign) {
            (0, _) => s.push_str(&term),
            (_, 1) => write!(s, " + {term}").unwrap(),
            _ => write!(s, " - {term}").unwrap(),
        }
    }
    if s.is_empty() {
        format!("{width}'d{bias}")
    } else if bias != 0 {
        format!("{s} + {width}'d{bias}")
    } else {
        s
    }
}

fn emit_core(out: &mut String, netlist: &PlaNetlist, module: &str) {
    let (n, m) = (netlist.inputs(), netlist.outputs());
    writeln!(
        out,
        "// {n} inputs, {m} outputs, {} products\nmodule {module} (\n    input  wire {} x,\n    output wire {} y\n);",
        netlist.and_plane().len(),
        range(n),
        range(m)
    )
    .unwrap();
    for (p, cube) in netlist.and_plane().iter().enumerate() {
        writeln!(out, "    wire p{p} = {};", product_expr(cube)).unwrap();
    }
    if !netlist.and_plane().is_empty() {
        out.push('\n');
    }
    for j in (0..m as usize).rev() {
        let row = &netlist.or_plane()[j];
        let rhs = if row.is_empty() {
            "1'b0".to_string()
        } else {
            row.iter().map(|p| format!("p{p}")).collect::<Vec<_>>().join(" | ")
        };
        writeln!(out, "    assign y[{j}] = {rhs};").unwrap();
    }
    out.push_str("endmodule\n");
}

fn emit_wrapper(out: &mut String, netlist: &PlaNetlist, w: &WrapperSpec, module: &str, core: &str) {
    let (n, m) = (netlist.inputs(), netlist.outputs());
    let (pw, ow) = (w.port_width, w.out_width);
    let inf = w.in_fmt.frac_bits();
    let of = w.out_fmt.frac_bits();
    let gain_bits = 64 - w.gain_code.leading_zeros();
    let csd = w.gain_csd();

    writeln!(
        out,
        "// x: {pw}-bit two's complement, {inf} fraction bits\n\
         // y: {ow}-bit two's complement, {of} fraction bits\n\
         module {module} (\n    input  wire {} x,\n    output wire {} y\n);",
        range(pw),
        range(ow)
    )
    .unwrap();
    writeln!(out, "    wire neg = x[{}];", pw - 1).unwrap();
    writeln!(out, "    wire {} mag = neg ? ~x + {pw}'d1 : x;", range(pw)).unwrap();
    writeln!(out, "    wire {} t;", range(m)).unwrap();
    writeln!(out, "    {core} core (.x(mag[{}:0]), .y(t));", n - 1).unwrap();
    writeln!(out, "    wire in_table = mag < {pw}'d{};", w.limit_code).unwrap();

    let unfolded = w.kind == RegionKind::NegativeExpSaturating && w.lambda_mode == LambdaMode::Unfolded;
    if unfolded {
        let aw = (m + gain_bits + 1).max(of + ow);
        writeln!(out, "    wire {} tx = {{{}'d0, t}};", range(aw), aw - m).unwrap();
        writeln!(out, "    wire {} tg = {};", range(aw), shift_add("tx", &csd, aw, (1u64 << of) >> 1)).unwrap();
        writeln!(out, "    wire {} tab = tg[{}:{of}];", range(ow), of + ow - 1).unwrap();
    } else {
        writeln!(out, "    wire {} tab = {{{}'d0, t}};", range(ow), ow - m).unwrap();
    }
    if w.kind != RegionKind::Custom {
        writeln!(out, "    wire {} tab_neg = ~tab + {ow}'d1;", range(ow)).unwrap();
    }

    let sat = |i: usize| hex(ow, w.saturation_codes[i]);
    match w.kind {
        RegionKind::OddSymmetricSaturating => {
            writeln!(out, "    assign y = in_table ? (neg ? tab_neg : tab) : (neg ? {} : {});", sat(0), sat(1)).unwrap();
        }
        RegionKind::NegativeExpSaturating => {
            let aw = (pw + gain_bits + 1).max(inf + ow);
            writeln!(
                out,
                "    wire {} xs = {{{{{}{{x[{}]}}}}, x}};",
                range(aw),
                aw - pw,
                pw - 1
            )
            .unwrap();
            writeln!(out, "    wire {} lin_acc = {};", range(aw), shift_add("xs", &csd, aw, (1u64 << inf) >> 1)).unwrap();
            writeln!(out, "    wire {} lin = lin_acc[{}:{inf}];", range(ow), inf + ow - 1).unwrap();
            writeln!(out, "    assign y = neg ? (in_table ? tab_neg : {}) : lin;", sat(0)).unwrap();
        }
        RegionKind::Custom => {
            writeln!(out, "    assign y = neg ? {} : (in_table ? tab : {});", sat(0), sat(1)).unwrap();
        }
    }
    out.push_str("endmodule\n");
}

/// Structural Verilog for a netlist: the core module and, when the netlist
/// carries a wrapper, the wrapper module named `module_name`.
pub fn emit_verilog(netlist: &PlaNetlist, module_name: &str) -> String {
    let top = sanitize_identifier(module_name);
    let core = core_module_name(netlist, module_name);
    let mut out = String::new();
    emit_core(&mut out, netlist, &core);
    if let Some(w) = netlist.wrapper() {
        out.push('\n');
        emit_wrapper(&mut out, netlist, w, &top, &core);
    }
    out
}

/// Golden vector of a testbench.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TestVector {
    /// True for the wrapper, false for the core.
    pub top: bool,
    pub x: u64,
    pub y: u64,
}

/// Exhaustive self-checking testbench. Core vectors come from the table
/// entries (skipping don't-care codes); wrapper vectors from the table's
/// bit-accurate reference over every port code. Without a table the
/// netlist's own core outputs are used.
pub fn emit_testbench(netlist: &PlaNetlist, module_name: &str, table: Option<&QuantizedFunctionTable>) -> Result<String> {
    let top = sanitize_identifier(module_name);
    let core = core_module_name(netlist, module_name);
    let (n, m) = (netlist.inputs(), netlist.outputs());
    if let Some(t) = table {
        if t.in_fmt().total_bits() != n || t.out_fmt().total_bits() != m {
            return Err(Error::InvalidParameter(format!(
                "table {} does not match a {n}-input, {m}-output netlist",
                t.variant_name()
            )));
        }
    }
    let wrapper = netlist.wrapper().filter(|_| table.is_some());

    let mut out = String::new();
    writeln!(out, "`timescale 1ns / 1ps\nmodule {top}_tb;").unwrap();
    writeln!(out, "    reg  {} core_x;\n    wire {} core_y;", range(n), range(m)).unwrap();
    if let Some(w) = wrapper {
        writeln!(out, "    reg  {} x;\n    wire {} y;", range(w.port_width), range(w.out_width)).unwrap();
    }
    out.push_str("    integer errors;\n\n");
    writeln!(out, "    {core} core_dut (.x(core_x), .y(core_y));").unwrap();
    if wrapper.is_some() {
        writeln!(out, "    {top} dut (.x(x), .y(y));").unwrap();
    }
    writeln!(
        out,
        "\n    task check_core(input {} xi, input {} expected);\n        begin\n            core_x = xi;\n            #1;\n            \
         if (core_y !== expected) begin\n                $display(\"FAIL core x=%h y=%h expected %h\", xi, core_y, expected);\n                \
         errors = errors + 1;\n            end\n        end\n    endtask",
        range(n),
        range(m)
    )
    .unwrap();
    if let Some(w) = wrapper {
        writeln!(
            out,
            "\n    task check_top(input {} xi, input {} expected);\n        begin\n            x = xi;\n            #1;\n            \
             if (y !== expected) begin\n                $display(\"FAIL x=%h y=%h expected %h\", xi, y, expected);\n                \
             errors = errors + 1;\n            end\n        end\n    endtask",
            range(w.port_width),
            range(w.out_width)
        )
        .unwrap();
    }

    out.push_str("\n    initial begin\n        errors = 0;\n");
    for code in 0..(1u32 << n) {
        if netlist.dont_cares().binary_search(&code).is_ok() {
            continue;
        }
        let y = match table {
            Some(t) => t.entries()[code as usize],
            None => netlist.eval(code),
        };
        writeln!(out, "        check_core({}, {});", hex(n, code as i64), hex(m, y as i64)).unwrap();
    }
    if let (Some(w), Some(t)) = (wrapper, table) {
        for code in 0..w.port_codes() {
            let y = t.reference_code(w.port_value(code));
            writeln!(out, "        check_top({}, {});", hex(w.port_width, code as i64), hex(w.out_width, y)).unwrap();
        }
    }
    out.push_str(
        "        if (errors == 0) $display(\"PASS\");\n        else $display(\"FAIL %0d mismatches\", errors);\n        $finish;\n    end\nendmodule\n",
    );
    Ok(out)
}

fn parse_sized_hex(s: &str) -> Option<u64> {
    let (_, digits) = s.trim().split_once("'h")?;
    u64::from_str_radix(digits, 16).ok()
}

/// Module names instantiated by a testbench (core, wrapper) and its vectors.
pub fn parse_testbench(text: &str) -> Result<(String, Option<String>, Vec<TestVector>)> {
    let (mut core, mut top) = (None, None);
    let mut vectors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let l = line.trim();
        if let Some(rest) = l.strip_suffix(");") {
            let call = rest
                .strip_prefix("check_core(")
                .map(|a| (false, a))
                .or_else(|| rest.strip_prefix("check_top(").map(|a| (true, a)));
            if let Some((is_top, args)) = call {
                let bad = || Error::Verilog(format!("line {}: bad vector `{l}`", i + 1));
                let (a, b) = args.split_once(',').ok_or_else(bad)?;
                vectors.push(TestVector {
                    top: is_top,
                    x: parse_sized_hex(a).ok_or_else(bad)?,
                    y: parse_sized_hex(b).ok_or_else(bad)?,
                });
                continue;
            }
        }
        let mut words = l.split_whitespace();
        if let (Some(module), Some(inst)) = (words.next(), words.next()) {
            match inst {
                "core_dut" => core = Some(module.to_string()),
                "dut" => top = Some(module.to_string()),
                _ => {}
            }
        }
    }
    let core = core.ok_or_else(|| Error::Verilog("testbench instantiates no core_dut".into()))?;
    Ok((core, top, vectors))
}

/// ROM baseline: `Values` stores one entry per table index behind an output
/// register; `SlopeIntercept` registers `k`, `b` and `t` in the first cycle
/// and the rounded, clamped `k t + b` in the second.
pub fn emit_rom_verilog(table: &QuantizedFunctionTable, kind: RomKind, kb: Option<&RomKbTable>) -> Result<String> {
    let n = table.in_fmt().total_bits();
    let m = table.out_fmt().total_bits();
    let module = sanitize_identifier(&format!("{}_{}", table.variant_name(), kind.name()));
    let mut out = String::new();
    match kind {
        RomKind::Values => {
            writeln!(
                out,
                "module {module} (\n    input  wire clk,\n    input  wire {} addr,\n    output reg  {} data\n);\n    always @(posedge clk) begin\n        case (addr)",
                range(n),
                range(m)
            )
            .unwrap();
            for (code, &e) in table.entries().iter().enumerate() {
                writeln!(out, "            {n}'d{code}: data <= {m}'d{e};").unwrap();
            }
            out.push_str("        endcase\n    end\nendmodule\n");
        }
        RomKind::SlopeIntercept => {
            let rom = kb.ok_or_else(|| Error::InvalidParameter("slope/intercept ROM needs its segments".into()))?;
            let cfg = rom.config();
            let xf = cfg.x_frac_bits;
            let tw = table.in_fmt().int_bits() + xf;
            let kw = cfg.k_fmt.total_bits();
            let kf = cfg.k_fmt.frac_bits();
            let bw = cfg.b_fmt.total_bits() + 1;
            let bf = cfg.b_fmt.frac_bits();
            let of = table.out_fmt().frac_bits();
            if kf != bf || kf + xf < of {
                return Err(Error::InvalidParameter(
                    "slope and intercept need equal fraction bits covering the output".into(),
                ));
            }
            let sh = kf + xf - of;
            let aw = (kw + tw).max(bw + xf) + 2;
            let seg_shift = xf - table.in_fmt().frac_bits();
            writeln!(
                out,
                "// t: {tw}-bit magnitude, {xf} fraction bits; k: {kf} and b: {bf} fraction bits\n\
                 module {module} (\n    input  wire clk,\n    input  wire {} t,\n    output reg  {} data\n);\n    \
                 reg  {} k;\n    reg  signed {} b;\n    reg  {} t_r;\n    \
                 wire signed {} acc = $signed({{1'b0, k}}) * $signed({{1'b0, t_r}}) + (b <<< {xf}) + {aw}'sd{};\n    \
                 wire signed {} q = acc >>> {sh};\n\n    always @(posedge clk) begin\n        t_r <= t;\n        case (t[{}:{}])",
                range(tw),
                range(m),
                range(kw),
                range(bw),
                range(tw),
                range(aw),
                if sh == 0 { 0 } else { 1u64 << (sh - 1) },
                range(aw),
                tw - 1,
                seg_shift
            )
            .unwrap();
            let sw = tw - seg_shift;
            for (s, seg) in rom.segments().iter().enumerate() {
                let b = if seg.b_code < 0 {
                    format!("-{bw}'sd{}", -seg.b_code)
                } else {
                    format!("{bw}'sd{}", seg.b_code)
                };
                writeln!(out, "            {sw}'d{s}: begin k <= {kw}'d{}; b <= {b}; end", seg.k_code).unwrap();
            }
            let max = table.out_fmt().max_code();
            writeln!(
                out,
                "        endcase\n        if (q < 0) data <= {m}'d0;\n        else if (q > {max}) data <= {m}'d{max};\n        \
                 else data <= q[{}:0];\n    end\nendmodule",
                m - 1
            )
            .unwrap();
        }
    }
    Ok(out)
}
