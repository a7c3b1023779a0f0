use std::fmt::{self, Write as _};
use std::path::Path;

use rug::float::Constant;
use rug::Float;

use seczeta::analysis::{
    check_modular, check_phi_equality, find_extremum_near, find_real_zero_near, trace_xray,
    CriticalKind, CriticalPoint, Region,
};
use seczeta::arith::MangoldtTable;
use seczeta::engine::{
    double_pole_main_part, finite_part as finite_part_at, residue_at, residue_closed_form,
    secondzeta_with, EvalOptions,
};
use seczeta::format::{format_sig, parse_complex, parse_float, significant_digits};
use seczeta::mpcontext::digits_to_bits;
use seczeta::zeta_zeros::{load_cache, save_cache};
use seczeta::{ApComplex, Error, EvalResult, PrecisionContext, ZeroTable};

use crate::render::{
    complex_parts, complex_text, exact_decimal, sci, term_parts, to_json, CriticalJson, EvalJson,
    JsonTerms, ModularJson, PhiJson, PoleJson, ZeroJson, ZerosJson,
};
use crate::{CriticalArgs, CriticalSearch, EvalArgs, FinitePartArgs, ModularArgs, Output, XrayArgs, ZerosArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(Error),
    /// Some selftest checks failed; the report is already on stdout.
    Selftest { failed: usize, code: u8 },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Selftest { failed, .. } => write!(f, "{failed} selftest check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<seczeta::CacheError> for CliError {
    fn from(e: seczeta::CacheError) -> Self {
        CliError::Lib(Error::Cache(e))
    }
}

/// Stable exit code for a library error.
pub fn lib_exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::Range(_) => 1,
        Error::Pole(_) => 2,
        Error::InfeasiblePrecision { .. } => 3,
        _ => 4,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Lib(e) => lib_exit_code(e),
            CliError::Selftest { code, .. } => *code,
        }
    }
}

pub type CliResult = Result<String, CliError>;

/// The process-wide zero table, or one backed by a cache file.
pub enum Table {
    Global,
    Cached(ZeroTable),
}

impl Table {
    pub fn open(cache: Option<&Path>) -> Result<Table, CliError> {
        match cache {
            Some(p) if p.exists() => Ok(Table::Cached(load_cache(p)?)),
            Some(_) => Ok(Table::Cached(ZeroTable::new())),
            None => Ok(Table::Global),
        }
    }

    pub fn get(&self) -> &ZeroTable {
        match self {
            Table::Global => ZeroTable::global(),
            Table::Cached(t) => t,
        }
    }

    pub fn save(&self, cache: Option<&Path>) -> Result<(), CliError> {
        if let (Table::Cached(t), Some(p)) = (self, cache) {
            save_cache(t, p)?;
        }
        Ok(())
    }
}

/// `s` read at enough bits for every digit written and every digit requested.
pub fn parse_point(lit: &str, digits: u32) -> Result<ApComplex, CliError> {
    let sig = significant_digits(lit) as u32;
    parse_complex(lit, digits_to_bits(sig.max(digits) + 20)).map_err(|e| CliError::Usage(e.to_string()))
}

fn check_a(a: Option<f64>) -> Result<Option<Float>, CliError> {
    match a {
        None => Ok(None),
        Some(v) if v > 0.0 && v < 1.0 => Ok(Some(Float::with_val(64, v))),
        Some(v) => Err(CliError::Usage(format!("a must lie in (0, 1), got {v}"))),
    }
}

/// Fixed decimals for the four terms: their absolute accuracy is about
/// `10^-digits`, two more places show the cancellation.
fn term_decimals(digits: u32) -> usize {
    digits as usize + 2
}

/// `s` is rendered from the parsed input; `r.s` is rounded to working precision.
pub fn eval_json(r: &EvalResult, s: &ApComplex, lit: &str, digits: u32) -> EvalJson {
    let sig = significant_digits(lit) + 5;
    let b = &r.breakdown;
    let dec = term_decimals(digits);
    EvalJson {
        s: crate::render::JsonComplex {
            re: exact_decimal(&s.re, sig),
            im: exact_decimal(&s.im, sig),
        },
        a: format!("{}", b.a.to_f64()),
        digits,
        z: complex_parts(&r.z, digits),
        terms: JsonTerms {
            main: term_parts(&b.main, dec),
            prime: term_parts(&b.prime, dec),
            exponential: term_parts(&b.exponential, dec),
            singular: term_parts(&b.singular, dec),
        },
        zeros_used: b.zeros_used,
        lambdas_used: b.lambdas_used,
        error_estimate: sci(&r.error_estimate),
        agreed_digits: r.agreed_digits,
    }
}

pub fn eval(args: &EvalArgs, out: Output, cache: Option<&Path>) -> CliResult {
    let s = parse_point(&args.s, args.digits)?;
    let a = check_a(args.a)?;
    let table = Table::open(cache)?;
    let mut opts = EvalOptions::default();
    if args.error {
        let primary = args.a.unwrap_or(seczeta::engine::DEFAULT_A);
        let second = if primary == 0.005 { 0.015 } else { 0.005 };
        opts.verify_a = Some(Float::with_val(64, second));
    }
    let r = secondzeta_with(&s, args.digits, a.as_ref(), &opts, table.get(), MangoldtTable::global())?;
    table.save(cache)?;
    let j = eval_json(&r, &s, &args.s, args.digits);
    Ok(match out {
        Output::Json => to_json(&j),
        Output::Csv => {
            let mut o = String::from("quantity,re,im\n");
            let _ = writeln!(o, "Z,{},{}", j.z.re, j.z.im);
            if args.breakdown {
                for (n, c) in [("A", &j.terms.main), ("P", &j.terms.prime), ("E", &j.terms.exponential), ("S", &j.terms.singular)] {
                    let _ = writeln!(o, "{n},{},{}", c.re, c.im);
                }
            }
            o
        }
        Output::Text => {
            let mut o = String::new();
            let _ = writeln!(o, "Z({}) = {}", args.s, complex_text(&j.z));
            if args.error {
                let _ = writeln!(o, "error estimate: {}", j.error_estimate);
                if let (Some(d), Some(a2)) = (j.agreed_digits, &opts.verify_a) {
                    let _ = writeln!(o, "digits agreed with a = {}: {d}", a2.to_f64());
                }
            }
            if args.breakdown {
                let t = &j.terms;
                let rows = [("A", &t.main), ("P", &t.prime), ("E", &t.exponential), ("S", &t.singular), ("Z", &j.z)];
                let _ = writeln!(o, "a = {}", j.a);
                for (n, c) in rows {
                    let _ = writeln!(o, "Re({n}) = {}", c.re);
                }
                for (n, c) in rows {
                    let _ = writeln!(o, "Im({n}) = {}", c.im);
                }
                let _ = writeln!(o, "zeros used: {}", j.zeros_used);
                let _ = writeln!(o, "von Mangoldt values used: {}", j.lambdas_used);
            }
            o
        }
    })
}

pub fn zeros(args: &ZerosArgs, out: Output, cache: Option<&Path>) -> CliResult {
    let n = usize::try_from(args.upto_index).map_err(|_| CliError::Usage("index too large".into()))?;
    let table = Table::open(cache)?;
    let v = table.get().ordinates(n, args.digits)?;
    table.save(cache)?;
    let rows: Vec<ZeroJson> = v
        .iter()
        .enumerate()
        .map(|(i, g)| ZeroJson {
            index: i + 1,
            ordinate: format_sig(g, args.digits as usize),
        })
        .collect();
    Ok(match out {
        Output::Json => to_json(&ZerosJson {
            digits: args.digits,
            zeros: rows,
        }),
        Output::Csv => {
            let mut o = String::from("index,ordinate\n");
            for r in &rows {
                let _ = writeln!(o, "{},{}", r.index, r.ordinate);
            }
            o
        }
        Output::Text => {
            let mut o = String::new();
            for r in &rows {
                let _ = writeln!(o, "{:>6}  {}", r.index, r.ordinate);
            }
            o
        }
    })
}

fn parse_range(lit: &str, what: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("{what} must be MIN:MAX with MIN < MAX, got {lit:?}"));
    let (lo, hi) = lit.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_grid(lit: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("grid must be NXxNY with both at least 2, got {lit:?}"));
    let (a, b) = lit.split_once(['x', 'X']).ok_or_else(bad)?;
    let nx: usize = a.trim().parse().map_err(|_| bad())?;
    let ny: usize = b.trim().parse().map_err(|_| bad())?;
    if nx < 2 || ny < 2 {
        return Err(bad());
    }
    Ok((nx, ny))
}

pub fn xray(args: &XrayArgs, out: Output) -> CliResult {
    let (sigma_min, sigma_max) = parse_range(&args.sigma, "sigma")?;
    let (t_min, t_max) = parse_range(&args.t, "t")?;
    let grid = parse_grid(&args.grid)?;
    let region = Region {
        sigma_min,
        sigma_max,
        t_min,
        t_max,
    };
    let curves = trace_xray(region, grid, args.digits)?;
    Ok(match out {
        Output::Csv => curves.to_csv(),
        Output::Json => {
            let mut s = curves.to_json();
            s.push('\n');
            s
        }
        Output::Text => {
            let mut o = String::new();
            let _ = writeln!(
                o,
                "region [{sigma_min}, {sigma_max}] x [{t_min}, {t_max}], grid {}x{}",
                grid.0, grid.1
            );
            let _ = writeln!(
                o,
                "{} curve(s) with Im Z = 0, {} with Re Z = 0, {} pole cell(s)",
                curves.real_curves.len(),
                curves.imag_curves.len(),
                curves.pole_cells.len()
            );
            for (label, list) in [("Im Z = 0", &curves.real_curves), ("Re Z = 0", &curves.imag_curves)] {
                for line in list.iter() {
                    let (first, last) = (line.points[0], line.points[line.points.len() - 1]);
                    let _ = writeln!(
                        o,
                        "{label}: {} points, {}, {} pole end(s), from ({:.6}, {:.6}) to ({:.6}, {:.6})",
                        line.points.len(),
                        if line.closed { "closed" } else { "open" },
                        line.pole_ends,
                        first.0,
                        first.1,
                        last.0,
                        last.1
                    );
                }
            }
            o
        }
    })
}

pub fn critical_json(p: &CriticalPoint) -> CriticalJson {
    let kind = match p.kind {
        CriticalKind::ZeroOfZ => "zero_of_Z",
        CriticalKind::ExtremumMin => "extremum_min",
        CriticalKind::ExtremumMax => "extremum_max",
        CriticalKind::DerivativeZero => "derivative_zero",
    };
    let value = match p.kind {
        CriticalKind::ZeroOfZ => sci(&p.value),
        _ => format_sig(&p.value, p.digits as usize),
    };
    CriticalJson {
        kind: kind.into(),
        location: format_sig(&p.location, p.digits as usize),
        value,
        digits: p.digits,
    }
}

pub fn critical(args: &CriticalArgs, out: Output) -> CliResult {
    if !args.near.is_finite() {
        return Err(CliError::Usage("--near must be finite".into()));
    }
    let p = match args.kind {
        CriticalSearch::Zero => find_real_zero_near(args.near, args.digits)?,
        CriticalSearch::Extremum => find_extremum_near(args.near, args.digits)?,
    };
    let j = critical_json(&p);
    Ok(match out {
        Output::Json => to_json(&j),
        Output::Csv => format!("kind,location,value,digits\n{},{},{},{}\n", j.kind, j.location, j.value, j.digits),
        Output::Text => format!("{} at x = {}\nZ(x) = {}\n", j.kind, j.location, j.value),
    })
}

pub fn modular(args: &ModularArgs, out: Output) -> CliResult {
    let ctx = PrecisionContext::new(args.digits)?;
    let x = parse_float(&args.x, ctx.bits()).map_err(|e| CliError::Usage(e.to_string()))?;
    let xs = exact_decimal(&x, significant_digits(&args.x) + 5);
    if args.phi {
        let d = check_phi_equality(&x, &ctx)?;
        let j = PhiJson { x: xs, digits_agreed: d };
        return Ok(match out {
            Output::Json => to_json(&j),
            Output::Csv => format!("x,digits_agreed\n{},{}\n", j.x, j.digits_agreed),
            Output::Text => format!("Phi(x) at x = {}: the two expressions agree to {} digits\n", j.x, j.digits_agreed),
        });
    }
    let m = check_modular(&x, args.zeros, args.prime_limit, &ctx)?;
    let j = ModularJson {
        x: xs,
        lhs: format_sig(&m.lhs, args.digits as usize),
        rhs: format_sig(&m.rhs, args.digits as usize),
        digits_agreed: m.digits_agreed,
        zeros_used: m.zeros_used,
        prime_limit: m.prime_limit,
    };
    Ok(match out {
        Output::Json => to_json(&j),
        Output::Csv => format!(
            "x,lhs,rhs,digits_agreed,zeros_used,prime_limit\n{},{},{},{},{},{}\n",
            j.x, j.lhs, j.rhs, j.digits_agreed, j.zeros_used, j.prime_limit
        ),
        Output::Text => format!(
            "x = {}\nlhs = {}\nrhs = {}\ndigits agreed: {}\nzeros used: {}, n up to {}\n",
            j.x, j.lhs, j.rhs, j.digits_agreed, j.zeros_used, j.prime_limit
        ),
    })
}

pub fn finite_part(args: &FinitePartArgs, out: Output) -> CliResult {
    let p = args.pole;
    let d = args.digits;
    let prec = digits_to_bits(d + 10);
    let width = d as usize;
    let j = if p == 1 {
        let fp = finite_part_at(1, d)?;
        let (c2, c1) = double_pole_main_part(d)?;
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let c2_exact = Float::with_val(prec, two_pi.recip_ref());
        let c1_exact = -Float::with_val(prec, two_pi.ln_ref()) / &two_pi;
        PoleJson {
            pole: 1,
            order: 2,
            finite_part: format_sig(&fp.value, width),
            finite_part_error: sci(&fp.error),
            residue: format_sig(&c1.value, width),
            residue_closed_form: format_sig(&c1_exact, width),
            c2: Some(format_sig(&c2.value, width)),
            c2_closed_form: Some(format_sig(&c2_exact, width)),
        }
    } else if p < 0 && p % 2 != 0 {
        let n = u32::try_from((1 - p) / 2).map_err(|_| CliError::Usage("pole index too large".into()))?;
        let fp = finite_part_at(p, d)?;
        let r = residue_at(p, d)?;
        PoleJson {
            pole: p,
            order: 1,
            finite_part: format_sig(&fp.value, width),
            finite_part_error: sci(&fp.error),
            residue: format_sig(&r.value, width),
            residue_closed_form: format_sig(&residue_closed_form(n, prec), width),
            c2: None,
            c2_closed_form: None,
        }
    } else {
        return Err(CliError::Usage(format!("Z has no pole at {p}: poles are 1 and the negative odd integers")));
    };
    Ok(match out {
        Output::Json => to_json(&j),
        Output::Csv => {
            let mut o = String::from("quantity,value\n");
            let _ = writeln!(o, "finite_part,{}", j.finite_part);
            let _ = writeln!(o, "residue,{}", j.residue);
            if let Some(c2) = &j.c2 {
                let _ = writeln!(o, "c2,{c2}");
            }
            o
        }
        Output::Text => {
            let mut o = String::new();
            let kind = if j.order == 2 { "double" } else { "simple" };
            let _ = writeln!(o, "{kind} pole at s={}", j.pole);
            let _ = writeln!(o, "finite part: {} (extrapolation error {})", j.finite_part, j.finite_part_error);
            if let (Some(c2), Some(c2e)) = (&j.c2, &j.c2_closed_form) {
                let _ = writeln!(o, "coefficient of (s-1)^-2: {c2} (closed form {c2e})");
            }
            let _ = writeln!(o, "residue: {} (closed form {})", j.residue, j.residue_closed_form);
            o
        }
    })
}
