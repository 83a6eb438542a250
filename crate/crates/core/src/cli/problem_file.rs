//! TOML problem files.
//!
//! ```toml
//! [phi1]
//! kind = "atomic"            # atomic | continuous | exponential
//! atoms = "1:1.5"            # coef:order pairs, orders strictly decreasing
//!
//! [phi2]
//! kind = "continuous"
//! density = "power 2 0.5"    # constant c | power coef exp | exp base | samples g:v, ...
//! support = [0.0, 1.0]       # or: table = "density.csv" (gamma,value rows)
//!
//! [forcing]
//! kind = "lipschitz"         # zero | time_only | power_bound | lipschitz | pendulum
//! h = "power 1 1"            # constant c | power coef exp | samples t:v, ...
//!
//! [initial]
//! y0 = 0.0
//! v0 = 1.0
//!
//! [run]
//! horizon = 0.5
//! n_steps = 400              # optional from here on
//! tol = 1e-10
//! max_iter = 200
//! damping = 1.0
//! ball_radius = 2.0
//! ```

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::dist_order::{Atom, Density, OrderWeight};
use crate::error::{Error, Result};
use crate::quadrature::MonotoneCubic;
use crate::solver::{ForcingTerm, ProblemSpec, Profile, SolveOptions};

/// Settings from `[run]` that are not part of the problem itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub n_steps: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        let s = SolveOptions::default();
        RunOptions {
            n_steps: 400,
            tol: s.tol,
            max_iter: s.max_iter,
            damping: s.damping,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub spec: ProblemSpec,
    pub run: RunOptions,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    phi1: RawWeight,
    phi2: RawWeight,
    forcing: RawForcing,
    initial: RawInitial,
    run: RawRun,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeight {
    kind: String,
    atoms: Option<String>,
    density: Option<String>,
    table: Option<String>,
    support: Option<[f64; 2]>,
    base: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawForcing {
    kind: String,
    g: Option<String>,
    h: Option<String>,
    alpha: Option<f64>,
    amp: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    y0: f64,
    v0: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    horizon: f64,
    n_steps: Option<usize>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    damping: Option<f64>,
    ball_radius: Option<f64>,
}

/// Reads and validates a problem file. Relative `table` paths resolve against
/// the file's directory.
pub fn parse_problem_file(path: &Path) -> Result<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: 0,
        key: String::new(),
        message: e.to_string(),
    })?;
    parse_problem_str(&text, &path.display().to_string(), path.parent())
}

/// Parses problem-file text; `label` names the source in errors.
pub fn parse_problem_str(text: &str, label: &str, base_dir: Option<&Path>) -> Result<ProblemFile> {
    let ctx = Ctx {
        text,
        label,
        base_dir,
    };
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| line_of(text, s.start));
        let message = e.message().to_string();
        let key = first_backticked(&message).unwrap_or_default();
        ctx.err_at(line, &key, message)
    })?;
    let phi1 = ctx.weight("phi1", &raw.phi1)?;
    let phi2 = ctx.weight("phi2", &raw.phi2)?;
    let forcing = ctx.forcing(&raw.forcing)?;
    let RawInitial { y0, v0 } = raw.initial;
    for (k, v) in [("y0", y0), ("v0", v0)] {
        if !v.is_finite() {
            return Err(ctx.err("initial", k, "must be finite"));
        }
    }
    let r = &raw.run;
    let ball_radius = r
        .ball_radius
        .unwrap_or_else(|| ProblemSpec::default_radius(y0, v0));
    let spec = ProblemSpec {
        phi1,
        phi2,
        forcing,
        y0,
        v0,
        horizon: r.horizon,
        ball_radius,
    };
    if let Err(e) = spec.validate() {
        let key = if !(r.horizon > 0.0 && r.horizon.is_finite()) {
            "horizon"
        } else {
            "ball_radius"
        };
        return Err(ctx.err("run", key, strip_invalid(e)));
    }
    let d = RunOptions::default();
    let run = RunOptions {
        n_steps: r.n_steps.unwrap_or(d.n_steps),
        tol: r.tol.unwrap_or(d.tol),
        max_iter: r.max_iter.unwrap_or(d.max_iter),
        damping: r.damping.unwrap_or(d.damping),
    };
    if run.n_steps < 4 {
        return Err(ctx.err("run", "n_steps", "must be at least 4"));
    }
    if !(run.tol > 0.0) {
        return Err(ctx.err("run", "tol", "must be positive"));
    }
    if run.max_iter == 0 {
        return Err(ctx.err("run", "max_iter", "must be at least 1"));
    }
    if !(run.damping > 0.0 && run.damping <= 1.0) {
        return Err(ctx.err("run", "damping", "must lie in (0, 1]"));
    }
    Ok(ProblemFile { spec, run })
}

struct Ctx<'a> {
    text: &'a str,
    label: &'a str,
    base_dir: Option<&'a Path>,
}

impl Ctx<'_> {
    fn err_at(&self, line: usize, key: &str, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.label.to_string(),
            line,
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn err(&self, section: &str, key: &str, message: impl Into<String>) -> Error {
        let line = locate(self.text, section, key);
        self.err_at(line, &format!("{section}.{key}"), message)
    }

    fn only(
        &self,
        section: &str,
        kind: &str,
        present: &[(&str, bool)],
        allowed: &[&str],
    ) -> Result<()> {
        for (k, is_set) in present {
            if *is_set && !allowed.contains(k) {
                return Err(self.err(section, k, format!("not valid for kind \"{kind}\"")));
            }
        }
        Ok(())
    }

    fn require<T: Clone>(&self, section: &str, key: &str, v: &Option<T>) -> Result<T> {
        v.clone()
            .ok_or_else(|| self.err(section, "kind", format!("missing key `{key}`")))
    }

    fn weight(&self, section: &str, w: &RawWeight) -> Result<OrderWeight> {
        let present = [
            ("atoms", w.atoms.is_some()),
            ("density", w.density.is_some()),
            ("table", w.table.is_some()),
            ("support", w.support.is_some()),
            ("base", w.base.is_some()),
        ];
        match w.kind.as_str() {
            "atomic" => {
                self.only(section, "atomic", &present, &["atoms"])?;
                let text = self.require(section, "atoms", &w.atoms)?;
                let atoms = parse_pairs(&text)
                    .map_err(|m| self.err(section, "atoms", m))?
                    .into_iter()
                    .map(|(c, g)| Atom::new(c, g))
                    .collect();
                OrderWeight::atomic(atoms).map_err(|e| self.err(section, "atoms", strip_invalid(e)))
            }
            "continuous" => {
                self.only(
                    section,
                    "continuous",
                    &present,
                    &["density", "table", "support"],
                )?;
                let density = match (&w.density, &w.table) {
                    (Some(d), None) => {
                        parse_density(d).map_err(|m| self.err(section, "density", m))?
                    }
                    (None, Some(t)) => self.table(section, t)?,
                    (Some(_), Some(_)) => {
                        return Err(self.err(
                            section,
                            "table",
                            "give either `density` or `table`, not both",
                        ))
                    }
                    (None, None) => {
                        return Err(self.err(section, "kind", "missing key `density` or `table`"))
                    }
                };
                let [lo, hi] = match (w.support, &density) {
                    (Some(s), _) => s,
                    (None, Density::Samples(m)) => {
                        let (a, b) = m.domain();
                        [a, b]
                    }
                    (None, _) => return Err(self.err(section, "kind", "missing key `support`")),
                };
                OrderWeight::continuous(density, lo, hi)
                    .map_err(|e| self.err(section, "support", strip_invalid(e)))
            }
            "exponential" => {
                self.only(section, "exponential", &present, &["base"])?;
                let base = self.require(section, "base", &w.base)?;
                OrderWeight::exponential(base)
                    .map_err(|e| self.err(section, "base", strip_invalid(e)))
            }
            other => Err(self.err(
                section,
                "kind",
                format!("unknown weight kind \"{other}\" (atomic, continuous, exponential)"),
            )),
        }
    }

    fn table(&self, section: &str, rel: &str) -> Result<Density> {
        let path = match self.base_dir {
            Some(d) => d.join(rel),
            None => Path::new(rel).to_path_buf(),
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| self.err(section, "table", format!("{}: {e}", path.display())))?;
        let mut pts = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split([',', ' ', '\t']).filter(|s| !s.is_empty());
            let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(self.err(
                    section,
                    "table",
                    format!("{}:{}: expected two columns", path.display(), i + 1),
                ));
            };
            match (parse_num(a), parse_num(b)) {
                (Ok(x), Ok(y)) => pts.push((x, y)),
                (Err(m), _) | (_, Err(m)) => {
                    return Err(self.err(
                        section,
                        "table",
                        format!("{}:{}: {m}", path.display(), i + 1),
                    ))
                }
            }
        }
        samples_density(&pts).map_err(|m| self.err(section, "table", m))
    }

    fn forcing(&self, f: &RawForcing) -> Result<ForcingTerm> {
        let s = "forcing";
        let present = [
            ("g", f.g.is_some()),
            ("h", f.h.is_some()),
            ("alpha", f.alpha.is_some()),
            ("amp", f.amp.is_some()),
        ];
        let profile = |key: &str, v: &Option<String>| -> Result<Profile> {
            let text = self.require(s, key, v)?;
            parse_profile(&text).map_err(|m| self.err(s, key, m))
        };
        match f.kind.as_str() {
            "zero" => {
                self.only(s, "zero", &present, &[])?;
                Ok(ForcingTerm::Zero)
            }
            "time_only" => {
                self.only(s, "time_only", &present, &["g"])?;
                Ok(ForcingTerm::TimeOnly { g: profile("g", &f.g)? })
            }
            "power_bound" => {
                self.only(s, "power_bound", &present, &["h", "alpha"])?;
                let h = profile("h", &f.h)?;
                let alpha = self.require(s, "alpha", &f.alpha)?;
                ForcingTerm::power_bound(h, alpha).map_err(|e| self.err(s, "alpha", strip_invalid(e)))
            }
            "lipschitz" => {
                self.only(s, "lipschitz", &present, &["h"])?;
                Ok(ForcingTerm::Lipschitz { h: profile("h", &f.h)? })
            }
            "pendulum" => {
                self.only(s, "pendulum", &present, &["amp"])?;
                let amp = self.require(s, "amp", &f.amp)?;
                if !amp.is_finite() {
                    return Err(self.err(s, "amp", "must be finite"));
                }
                Ok(ForcingTerm::Pendulum { amp })
            }
            other => Err(self.err(
                s,
                "kind",
                format!("unknown forcing kind \"{other}\" (zero, time_only, power_bound, lipschitz, pendulum)"),
            )),
        }
    }
}

fn strip_invalid(e: Error) -> String {
    match e {
        Error::InvalidArgument(m) => m,
        other => other.to_string(),
    }
}

fn first_backticked(s: &str) -> Option<String> {
    let start = s.find('`')? + 1;
    let len = s[start..].find('`')?;
    Some(s[start..start + len].to_string())
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// 1-based line of `key` inside `[section]`, else of the section header, else 0.
fn locate(text: &str, section: &str, key: &str) -> usize {
    let header = format!("[{section}]");
    let mut in_section = false;
    let mut header_line = 0;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            in_section = t.starts_with(&header);
            if in_section {
                header_line = i + 1;
            }
            continue;
        }
        if in_section {
            if let Some(rest) = t.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return i + 1;
                }
            }
        }
    }
    header_line
}

fn parse_num(s: &str) -> Result<f64, String> {
    let s = s.trim();
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(format!("number `{s}` is not finite")),
        Err(_) => Err(format!("malformed number `{s}`")),
    }
}

/// `"a:b, c:d"`; the empty string gives no pairs.
fn parse_pairs(s: &str) -> Result<Vec<(f64, f64)>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| format!("expected `value:value`, found `{p}`"))?;
            Ok((parse_num(a)?, parse_num(b)?))
        })
        .collect()
}

fn split_tag(s: &str) -> (&str, &str) {
    let s = s.trim();
    match s.split_once(char::is_whitespace) {
        Some((t, rest)) => (t, rest.trim()),
        None => (s, ""),
    }
}

fn numbers(rest: &str, n: usize, tag: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = rest
        .split_whitespace()
        .map(parse_num)
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("`{tag}` takes {n} number(s), found {}", v.len()));
    }
    Ok(v)
}

fn samples_density(pts: &[(f64, f64)]) -> Result<Density, String> {
    MonotoneCubic::new(pts)
        .map(Density::Samples)
        .ok_or_else(|| {
            "samples need at least two points with strictly increasing abscissae".to_string()
        })
}

fn parse_density(s: &str) -> Result<Density, String> {
    let (tag, rest) = split_tag(s);
    match tag {
        "constant" => Ok(Density::Constant(numbers(rest, 1, tag)?[0])),
        "power" => {
            let v = numbers(rest, 2, tag)?;
            Ok(Density::Power {
                coef: v[0],
                exponent: v[1],
            })
        }
        "exp" => Ok(Density::Exp {
            base: numbers(rest, 1, tag)?[0],
        }),
        "samples" => samples_density(&parse_pairs(rest)?),
        _ => parse_num(tag)
            .ok()
            .filter(|_| rest.is_empty())
            .map(Density::Constant)
            .ok_or_else(|| format!("unknown density `{s}` (constant, power, exp, samples)")),
    }
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    let (tag, rest) = split_tag(s);
    match tag {
        "constant" => Ok(Profile::Constant(numbers(rest, 1, tag)?[0])),
        "power" => {
            let v = numbers(rest, 2, tag)?;
            if v[1] < 0.0 {
                return Err("power profile exponent must be >= 0".into());
            }
            Ok(Profile::Power {
                coef: v[0],
                exponent: v[1],
            })
        }
        "samples" => Profile::samples(parse_pairs(rest)?).map_err(strip_invalid),
        _ => parse_num(tag)
            .ok()
            .filter(|_| rest.is_empty())
            .map(Profile::Constant)
            .ok_or_else(|| format!("unknown profile `{s}` (constant, power, samples)")),
    }
}

fn pairs_text(it: impl Iterator<Item = (f64, f64)>) -> String {
    it.map(|(a, b)| format!("{a:?}:{b:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn density_text(d: &Density) -> String {
    match d {
        Density::Constant(c) => format!("constant {c:?}"),
        Density::Power { coef, exponent } => format!("power {coef:?} {exponent:?}"),
        Density::Exp { base } => format!("exp {base:?}"),
        Density::Samples(m) => format!("samples {}", pairs_text(m.points())),
    }
}

fn profile_text(p: &Profile) -> String {
    match p {
        Profile::Constant(c) => format!("constant {c:?}"),
        Profile::Power { coef, exponent } => format!("power {coef:?} {exponent:?}"),
        Profile::Samples(pts) => format!("samples {}", pairs_text(pts.iter().copied())),
    }
}

fn emit_weight(out: &mut String, section: &str, w: &OrderWeight) {
    let _ = writeln!(out, "[{section}]");
    match w {
        OrderWeight::Atomic(a) => {
            let _ = writeln!(out, "kind = \"atomic\"");
            let _ = writeln!(
                out,
                "atoms = \"{}\"",
                pairs_text(a.iter().map(|x| (x.coef, x.order)))
            );
        }
        OrderWeight::Continuous { density, lo, hi } => {
            let _ = writeln!(out, "kind = \"continuous\"");
            let _ = writeln!(out, "density = \"{}\"", density_text(density));
            let _ = writeln!(out, "support = [{lo:?}, {hi:?}]");
        }
        OrderWeight::Exponential { base } => {
            let _ = writeln!(out, "kind = \"exponential\"");
            let _ = writeln!(out, "base = {base:?}");
        }
    }
    out.push('\n');
}

/// Writes a problem file that parses back to the same problem and options.
pub fn emit_problem(file: &ProblemFile) -> String {
    let spec = &file.spec;
    let mut out = String::new();
    emit_weight(&mut out, "phi1", &spec.phi1);
    emit_weight(&mut out, "phi2", &spec.phi2);
    out.push_str("[forcing]\n");
    let _ = match &spec.forcing {
        ForcingTerm::Zero => writeln!(out, "kind = \"zero\""),
        ForcingTerm::TimeOnly { g } => {
            writeln!(out, "kind = \"time_only\"\ng = \"{}\"", profile_text(g))
        }
        ForcingTerm::PowerBound { h, alpha } => writeln!(
            out,
            "kind = \"power_bound\"\nh = \"{}\"\nalpha = {alpha:?}",
            profile_text(h)
        ),
        ForcingTerm::Lipschitz { h } => {
            writeln!(out, "kind = \"lipschitz\"\nh = \"{}\"", profile_text(h))
        }
        ForcingTerm::Pendulum { amp } => writeln!(out, "kind = \"pendulum\"\namp = {amp:?}"),
    };
    let _ = writeln!(out, "\n[initial]\ny0 = {:?}\nv0 = {:?}\n", spec.y0, spec.v0);
    let r = &file.run;
    let _ = writeln!(
        out,
        "[run]\nhorizon = {:?}\nn_steps = {}\ntol = {:?}\nmax_iter = {}\ndamping = {:?}\nball_radius = {:?}",
        spec.horizon, r.n_steps, r.tol, r.max_iter, r.damping, spec.ball_radius
    );
    out
}
