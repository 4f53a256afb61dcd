//! Scenario files.
//!
//! A scenario is line-oriented text made of `[section]` headers and
//! `key = value` lines. Lists are comma-separated, point lists are separated
//! by `;`, and `#` starts a comment. Product terms are written as
//! `coef * sel_x * sel_y * sel_z` joined by `+` or `-`, with `sel ∈ {u1, u2}`.
//!
//! ```text
//! [physics]
//! hbar = 1.0
//! mass = 1.0
//!
//! [potential]
//! x = free
//! y = free
//! z = free
//!
//! [solutions.x]
//! source = catalog:free
//! k = 1.0
//!
//! [solutions.y]
//! source = catalog:zero_energy_free
//!
//! [solutions.z]
//! source = catalog:zero_energy_free
//!
//! [field]
//! theta = 1.0 * u1 * u1 * u1
//! phi = 1.0 * u2 * u1 * u1
//!
//! [action]
//! a = 2.0
//! b = 0.0
//!
//! [trajectory]
//! r0 = 0, 0, 0
//! t_end = 5.0
//! ```

use std::collections::{btree_map, BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::action::ReducedActionField;
use crate::dynamics::IntegratorConfig;
use crate::error::{Axis, Error};
use crate::potentials::AxisPotential;
use crate::scalar::Vec3;
use crate::schrodinger::{
    assemble_field, solve_axis_analytic, solve_axis_numerov, AxisSolutionPair, CatalogEntry,
    NumerovSetup, ProductTerm, Selector,
};

/// One problem found while reading a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Diagnostic {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
}

impl Diagnostic {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Self::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Every diagnostic collected for a rejected scenario.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ScenarioError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl ScenarioError {
    pub(crate) fn single(d: Diagnostic) -> Self {
        Self {
            diagnostics: vec![d],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physics {
    pub hbar: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Free,
    Harmonic { omega: f64 },
    Ramp { slope: f64 },
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolutionSpec {
    Catalog {
        id: String,
        params: BTreeMap<String, f64>,
        energy: Option<f64>,
    },
    Numerov {
        energy: f64,
        domain: (f64, f64),
        step: f64,
        ic1: (f64, f64),
        ic2: (f64, f64),
        ic_at: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectorySpec {
    pub r0: Option<Vec3<f64>>,
    pub t_end: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_step: Option<f64>,
    pub singularity_eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifySpec {
    pub grid: Option<[usize; 3]>,
    pub lower: Option<Vec3<f64>>,
    pub upper: Option<Vec3<f64>>,
    /// Pass threshold on `max |qshje_residual|`.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricSpec {
    pub points: Vec<Vec3<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub physics: Physics,
    pub potential: [PotentialSpec; 3],
    pub solutions: [SolutionSpec; 3],
    pub theta: Vec<ProductTerm<f64>>,
    pub phi: Vec<ProductTerm<f64>>,
    pub a: f64,
    pub b: f64,
    pub trajectory: TrajectorySpec,
    pub verify: VerifySpec,
    pub metric: MetricSpec,
}

const SECTIONS: [&str; 10] = [
    "physics",
    "potential",
    "solutions.x",
    "solutions.y",
    "solutions.z",
    "field",
    "action",
    "trajectory",
    "verify",
    "metric",
];

struct Entry {
    line: usize,
    value: String,
}

#[derive(Default)]
struct Section {
    entries: BTreeMap<String, Entry>,
}

fn lex(text: &str) -> (BTreeMap<String, Section>, Vec<Diagnostic>) {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut diags = Vec::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                diags.push(Diagnostic::parse(line, "unterminated section header"));
                current = None;
                continue;
            };
            let name = name.trim().to_string();
            if !SECTIONS.contains(&name.as_str()) {
                diags.push(Diagnostic::parse(line, format!("unknown section [{name}]")));
                current = None;
                continue;
            }
            if sections.contains_key(&name) {
                diags.push(Diagnostic::parse(
                    line,
                    format!("duplicate section [{name}]"),
                ));
                current = None;
                continue;
            }
            sections.insert(name.clone(), Section::default());
            current = Some(name);
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            diags.push(Diagnostic::parse(line, "expected `key = value`"));
            continue;
        };
        let key = key.trim().to_string();
        let Some(section) = current.as_ref().and_then(|s| sections.get_mut(s)) else {
            diags.push(Diagnostic::parse(
                line,
                format!("`{key}` appears outside a valid section"),
            ));
            continue;
        };
        if key.is_empty() {
            diags.push(Diagnostic::parse(line, "empty key"));
            continue;
        }
        match section.entries.entry(key) {
            btree_map::Entry::Occupied(e) => diags.push(Diagnostic::parse(
                line,
                format!("duplicate key `{}`", e.key()),
            )),
            btree_map::Entry::Vacant(e) => {
                e.insert(Entry {
                    line,
                    value: value.trim().to_string(),
                });
            }
        }
    }
    (sections, diags)
}

struct Reader {
    sections: BTreeMap<String, Section>,
    used: BTreeSet<(String, String)>,
    diags: Vec<Diagnostic>,
}

impl Reader {
    fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn raw(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        let entry = self.sections.get(section)?.entries.get(key)?;
        self.used.insert((section.to_string(), key.to_string()));
        Some((entry.line, entry.value.clone()))
    }

    fn required_raw(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        let found = self.raw(section, key);
        if found.is_none() {
            self.diags.push(Diagnostic::validation(
                format!("{section}.{key}"),
                "missing",
            ));
        }
        found
    }

    fn parse<V>(
        &mut self,
        found: Option<(usize, String)>,
        parse: impl FnOnce(&str) -> std::result::Result<V, String>,
    ) -> Option<V> {
        let (line, value) = found?;
        match parse(&value) {
            Ok(v) => Some(v),
            Err(message) => {
                self.diags.push(Diagnostic::parse(line, message));
                None
            }
        }
    }

    fn number(&mut self, section: &str, key: &str) -> Option<f64> {
        let found = self.raw(section, key);
        self.parse(found, parse_number)
    }

    fn required_number(&mut self, section: &str, key: &str) -> Option<f64> {
        let found = self.required_raw(section, key);
        self.parse(found, parse_number)
    }

    fn list(&mut self, section: &str, key: &str, len: Option<usize>) -> Option<Vec<f64>> {
        let found = self.raw(section, key);
        self.parse(found, |v| parse_list(v, len))
    }

    fn required_list(&mut self, section: &str, key: &str, len: Option<usize>) -> Option<Vec<f64>> {
        let found = self.required_raw(section, key);
        self.parse(found, |v| parse_list(v, len))
    }

    fn vec3(&mut self, section: &str, key: &str) -> Option<Vec3<f64>> {
        self.list(section, key, Some(3)).map(|v| [v[0], v[1], v[2]])
    }

    fn pair(&mut self, section: &str, key: &str) -> Option<(f64, f64)> {
        self.required_list(section, key, Some(2))
            .map(|v| (v[0], v[1]))
    }

    fn positive(&mut self, field: &str, value: Option<f64>) -> Option<f64> {
        match value {
            Some(v) if v <= 0.0 => {
                self.diags
                    .push(Diagnostic::validation(field, "must be positive"));
                None
            }
            other => other,
        }
    }

    fn unused(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (name, section) in &self.sections {
            for (key, entry) in &section.entries {
                if !self.used.contains(&(name.clone(), key.clone())) {
                    out.push(Diagnostic::parse(
                        entry.line,
                        format!("unknown key `{key}` in [{name}]"),
                    ));
                }
            }
        }
        out
    }
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if !v.is_finite() {
        return Err(format!("`{}` is not finite", s.trim()));
    }
    Ok(v)
}

fn parse_list(s: &str, len: Option<usize>) -> std::result::Result<Vec<f64>, String> {
    let values = s
        .split(',')
        .map(parse_number)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    match len {
        Some(n) if values.len() != n => Err(format!(
            "expected {n} comma-separated numbers, found {}",
            values.len()
        )),
        _ => Ok(values),
    }
}

fn parse_points(s: &str) -> std::result::Result<Vec<Vec3<f64>>, String> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_list(p, Some(3)).map(|v| [v[0], v[1], v[2]]))
        .collect()
}

fn parse_grid(s: &str) -> std::result::Result<[usize; 3], String> {
    let counts = s
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{}` is not a point count", c.trim()))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    match *counts.as_slice() {
        [nx, ny, nz] if nx > 0 && ny > 0 && nz > 0 => Ok([nx, ny, nz]),
        [_, _, _] => Err("grid counts must be positive".into()),
        _ => Err(format!("expected 3 grid counts, found {}", counts.len())),
    }
}

/// Parses `coef * sel * sel * sel (± coef * sel * sel * sel)*`.
pub fn parse_terms(s: &str) -> std::result::Result<Vec<ProductTerm<f64>>, String> {
    let mut rest = s.trim();
    let mut terms = Vec::new();
    let mut sign = 1.0;
    loop {
        let Some((coef, after)) = rest.split_once('*') else {
            return Err(format!("expected `coef * sel * sel * sel`, found `{rest}`"));
        };
        let coefficient = sign * parse_number(coef)?;
        rest = after;
        let mut selectors = [Selector::U1; 3];
        for (i, slot) in selectors.iter_mut().enumerate() {
            let trimmed = rest.trim_start();
            let end = trimmed
                .find(|c: char| !c.is_ascii_alphanumeric())
                .unwrap_or(trimmed.len());
            *slot = match &trimmed[..end] {
                "u1" => Selector::U1,
                "u2" => Selector::U2,
                "" => return Err("missing selector".into()),
                other => return Err(format!("selector must be u1 or u2, found `{other}`")),
            };
            rest = trimmed[end..].trim_start();
            if i < 2 {
                rest = rest
                    .strip_prefix('*')
                    .ok_or_else(|| "expected three selectors joined by `*`".to_string())?;
            }
        }
        terms.push(ProductTerm::new(coefficient, selectors));
        if rest.is_empty() {
            return Ok(terms);
        }
        sign = match rest.as_bytes()[0] {
            b'+' => 1.0,
            b'-' => -1.0,
            _ => return Err(format!("unexpected `{rest}` after a term")),
        };
        rest = &rest[1..];
    }
}

fn format_terms(terms: &[ProductTerm<f64>]) -> String {
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        let [sx, sy, sz] = t.selectors.map(Selector::name);
        let c = t.coefficient;
        if i == 0 {
            write!(out, "{c:?}").unwrap();
        } else if c.is_sign_negative() {
            write!(out, " - {:?}", -c).unwrap();
        } else {
            write!(out, " + {c:?}").unwrap();
        }
        write!(out, " * {sx} * {sy} * {sz}").unwrap();
    }
    out
}

fn format_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn read_potential(r: &mut Reader, axis: Axis) -> Option<PotentialSpec> {
    let name = axis.name();
    let kind = r.required_raw("potential", name)?;
    let field = format!("potential.{name}");
    match kind.1.as_str() {
        "free" => Some(PotentialSpec::Free),
        "harmonic" => {
            let omega = r.required_number("potential", &format!("{name}.omega"));
            let omega = r.positive(&format!("{field}.omega"), omega)?;
            Some(PotentialSpec::Harmonic { omega })
        }
        "ramp" => {
            let slope = r.required_number("potential", &format!("{name}.slope"))?;
            Some(PotentialSpec::Ramp { slope })
        }
        "tabulated" => {
            let grid = r.required_list("potential", &format!("{name}.grid"), None);
            let values = r.required_list("potential", &format!("{name}.values"), None);
            Some(PotentialSpec::Tabulated {
                grid: grid?,
                values: values?,
            })
        }
        other => {
            r.diags.push(Diagnostic::parse(
                kind.0,
                format!("unknown potential `{other}` (expected free, harmonic, ramp or tabulated)"),
            ));
            None
        }
    }
}

fn read_solution(r: &mut Reader, axis: Axis) -> Option<SolutionSpec> {
    let section = format!("solutions.{}", axis.name());
    if !r.has_section(&section) {
        r.diags
            .push(Diagnostic::validation(&section, "missing section"));
        return None;
    }
    let (line, source) = r.required_raw(&section, "source")?;
    if let Some(id) = source.strip_prefix("catalog:") {
        let id = id.trim().to_string();
        let keys: &[&str] = match id.as_str() {
            "free" => &["k"],
            "zero_energy_free" => &[],
            "box" => &["length", "n"],
            other => {
                r.diags.push(Diagnostic::parse(
                    line,
                    format!("unknown catalog entry `{other}`"),
                ));
                return None;
            }
        };
        let mut params = BTreeMap::new();
        let mut complete = true;
        for key in keys {
            match r.required_number(&section, key) {
                Some(v) => {
                    params.insert(key.to_string(), v);
                }
                None => complete = false,
            }
        }
        let energy = r.number(&section, "energy");
        complete.then_some(SolutionSpec::Catalog { id, params, energy })
    } else if source == "numerov" {
        let energy = r.required_number(&section, "energy");
        let domain = r.pair(&section, "domain");
        let step = r.required_number(&section, "step");
        let step = r.positive(&format!("{section}.step"), step);
        let ic1 = r.pair(&section, "ic1");
        let ic2 = r.pair(&section, "ic2");
        let ic_at = r.number(&section, "ic_at");
        Some(SolutionSpec::Numerov {
            energy: energy?,
            domain: domain?,
            step: step?,
            ic1: ic1?,
            ic2: ic2?,
            ic_at,
        })
    } else {
        r.diags.push(Diagnostic::parse(
            line,
            format!("unknown source `{source}` (expected catalog:<id> or numerov)"),
        ));
        None
    }
}

/// Parses and fully validates a scenario, including building its field.
pub fn parse_scenario(text: &str) -> std::result::Result<Scenario, ScenarioError> {
    let (sections, lex_diags) = lex(text);
    let mut r = Reader {
        sections,
        used: BTreeSet::new(),
        diags: lex_diags,
    };

    let hbar = r.required_number("physics", "hbar");
    let hbar = r.positive("physics.hbar", hbar);
    let mass = r.required_number("physics", "mass");
    let mass = r.positive("physics.mass", mass);

    let potential = Axis::ALL.map(|axis| read_potential(&mut r, axis));
    let solutions = Axis::ALL.map(|axis| read_solution(&mut r, axis));

    let theta = r.required_raw("field", "theta");
    let theta = r.parse(theta, parse_terms);
    let phi = r.required_raw("field", "phi");
    let phi = r.parse(phi, parse_terms);

    let a = r.required_number("action", "a");
    if a == Some(0.0) {
        r.diags
            .push(Diagnostic::validation("action.a", "must be nonzero"));
    }
    let b = r.number("action", "b").unwrap_or(0.0);

    let trajectory = TrajectorySpec {
        r0: r.vec3("trajectory", "r0"),
        t_end: r.number("trajectory", "t_end"),
        rel_tol: r.number("trajectory", "rel_tol"),
        abs_tol: r.number("trajectory", "abs_tol"),
        max_step: r.number("trajectory", "max_step"),
        singularity_eps: r.number("trajectory", "singularity_eps"),
    };
    for (name, v) in [
        ("t_end", trajectory.t_end),
        ("rel_tol", trajectory.rel_tol),
        ("abs_tol", trajectory.abs_tol),
        ("max_step", trajectory.max_step),
    ] {
        r.positive(&format!("trajectory.{name}"), v);
    }
    if trajectory.singularity_eps.is_some_and(|e| e < 0.0) {
        r.diags.push(Diagnostic::validation(
            "trajectory.singularity_eps",
            "must be non-negative",
        ));
    }

    let grid = r.raw("verify", "grid");
    let verify = VerifySpec {
        grid: r.parse(grid, parse_grid),
        lower: r.vec3("verify", "lower"),
        upper: r.vec3("verify", "upper"),
        threshold: r.number("verify", "threshold"),
    };
    r.positive("verify.threshold", verify.threshold);
    if let (Some(lo), Some(hi)) = (verify.lower, verify.upper) {
        if (0..3).any(|k| lo[k] > hi[k]) {
            r.diags.push(Diagnostic::validation(
                "verify.upper",
                "must not be below verify.lower",
            ));
        }
    }

    let points = r.raw("metric", "points");
    let metric = MetricSpec {
        points: r.parse(points, parse_points).unwrap_or_default(),
    };

    let unused = r.unused();
    r.diags.extend(unused);
    if !r.diags.is_empty() {
        return Err(ScenarioError {
            diagnostics: r.diags,
        });
    }

    let [Some(px), Some(py), Some(pz)] = potential else {
        unreachable!("missing potentials are diagnosed above")
    };
    let [Some(sx), Some(sy), Some(sz)] = solutions else {
        unreachable!("missing solutions are diagnosed above")
    };
    let scenario = Scenario {
        physics: Physics {
            hbar: hbar.unwrap(),
            mass: mass.unwrap(),
        },
        potential: [px, py, pz],
        solutions: [sx, sy, sz],
        theta: theta.unwrap(),
        phi: phi.unwrap(),
        a: a.unwrap(),
        b,
        trajectory,
        verify,
        metric,
    };
    scenario.build()?;
    Ok(scenario)
}

impl Scenario {
    /// Total energy `Ex + Ey + Ez` implied by the solution sources.
    pub fn energy(&self) -> f64 {
        self.solutions
            .iter()
            .map(|s| match s {
                SolutionSpec::Catalog { id, params, energy } => CatalogEntry::from_id(id, params)
                    .map(|e| e.energy(self.physics.mass, self.physics.hbar))
                    .ok()
                    .or(*energy)
                    .unwrap_or(f64::NAN),
                SolutionSpec::Numerov { energy, .. } => *energy,
            })
            .sum()
    }

    fn axis_potential(&self, axis: Axis) -> std::result::Result<AxisPotential<f64>, Diagnostic> {
        let field = format!("potential.{}", axis.name());
        let wrap = |e: Error| Diagnostic::validation(&field, e.to_string());
        match &self.potential[axis.index()] {
            PotentialSpec::Free => Ok(AxisPotential::free(axis)),
            PotentialSpec::Harmonic { omega } => {
                AxisPotential::harmonic(axis, *omega, self.physics.mass).map_err(wrap)
            }
            PotentialSpec::Ramp { slope } => AxisPotential::linear_ramp(axis, *slope).map_err(wrap),
            PotentialSpec::Tabulated { grid, values } => {
                AxisPotential::tabulated(axis, grid.clone(), values.clone()).map_err(wrap)
            }
        }
    }

    fn axis_pair(&self, axis: Axis) -> std::result::Result<AxisSolutionPair<f64>, Diagnostic> {
        let section = format!("solutions.{}", axis.name());
        let wrap = |e: Error| Diagnostic::validation(&section, e.to_string());
        let potential = self.axis_potential(axis)?;
        let Physics { hbar, mass } = self.physics;
        match &self.solutions[axis.index()] {
            SolutionSpec::Catalog { id, params, energy } => {
                if !potential.is_free() {
                    return Err(Diagnostic::validation(
                        &section,
                        "catalog sources need a free potential on this axis",
                    ));
                }
                let entry = CatalogEntry::from_id(id, params).map_err(wrap)?;
                solve_axis_analytic(axis, entry, *energy, mass, hbar).map_err(wrap)
            }
            SolutionSpec::Numerov {
                energy,
                domain,
                step,
                ic1,
                ic2,
                ic_at,
            } => {
                let setup = NumerovSetup {
                    domain: *domain,
                    step: *step,
                    ic1: *ic1,
                    ic2: *ic2,
                    anchor: *ic_at,
                };
                solve_axis_numerov(&potential, *energy, &setup, mass, hbar).map_err(wrap)
            }
        }
    }

    /// Solves every axis, assembles θ and φ and returns the reduced action.
    pub fn build(&self) -> std::result::Result<ReducedActionField<f64>, ScenarioError> {
        let mut pairs = Vec::with_capacity(3);
        let mut diags = Vec::new();
        for axis in Axis::ALL {
            match self.axis_pair(axis) {
                Ok(p) => pairs.push(p),
                Err(d) => diags.push(d),
            }
        }
        if !diags.is_empty() {
            return Err(ScenarioError { diagnostics: diags });
        }
        let pairs: [AxisSolutionPair<f64>; 3] = pairs.try_into().expect("three axes");
        let field = assemble_field(pairs, self.theta.clone(), self.phi.clone())
            .map_err(|e| ScenarioError::single(Diagnostic::validation("field", e.to_string())))?;
        ReducedActionField::new(field, self.a, self.b).map_err(|_| {
            ScenarioError::single(Diagnostic::validation("action.a", "must be nonzero"))
        })
    }

    /// Integrator settings from `[trajectory]`, with `t_end` overridable.
    pub fn integrator_config(&self, t_end: Option<f64>) -> Option<IntegratorConfig<f64>> {
        let t = &self.trajectory;
        let mut config = IntegratorConfig::new(t_end.or(t.t_end)?);
        if let Some(v) = t.rel_tol {
            config.rel_tol = v;
        }
        if let Some(v) = t.abs_tol {
            config.abs_tol = v;
        }
        if let Some(v) = t.max_step {
            config.max_step = v;
        }
        if let Some(v) = t.singularity_eps {
            config.singularity_eps = v;
        }
        Some(config)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[physics]")?;
        writeln!(f, "hbar = {:?}", self.physics.hbar)?;
        writeln!(f, "mass = {:?}", self.physics.mass)?;

        writeln!(f, "\n[potential]")?;
        for axis in Axis::ALL {
            let n = axis.name();
            match &self.potential[axis.index()] {
                PotentialSpec::Free => writeln!(f, "{n} = free")?,
                PotentialSpec::Harmonic { omega } => {
                    writeln!(f, "{n} = harmonic")?;
                    writeln!(f, "{n}.omega = {omega:?}")?;
                }
                PotentialSpec::Ramp { slope } => {
                    writeln!(f, "{n} = ramp")?;
                    writeln!(f, "{n}.slope = {slope:?}")?;
                }
                PotentialSpec::Tabulated { grid, values } => {
                    writeln!(f, "{n} = tabulated")?;
                    writeln!(f, "{n}.grid = {}", format_list(grid))?;
                    writeln!(f, "{n}.values = {}", format_list(values))?;
                }
            }
        }

        for axis in Axis::ALL {
            writeln!(f, "\n[solutions.{}]", axis.name())?;
            match &self.solutions[axis.index()] {
                SolutionSpec::Catalog { id, params, energy } => {
                    writeln!(f, "source = catalog:{id}")?;
                    for (k, v) in params {
                        writeln!(f, "{k} = {v:?}")?;
                    }
                    if let Some(e) = energy {
                        writeln!(f, "energy = {e:?}")?;
                    }
                }
                SolutionSpec::Numerov {
                    energy,
                    domain,
                    step,
                    ic1,
                    ic2,
                    ic_at,
                } => {
                    writeln!(f, "source = numerov")?;
                    writeln!(f, "energy = {energy:?}")?;
                    writeln!(f, "domain = {}", format_list(&[domain.0, domain.1]))?;
                    writeln!(f, "step = {step:?}")?;
                    writeln!(f, "ic1 = {}", format_list(&[ic1.0, ic1.1]))?;
                    writeln!(f, "ic2 = {}", format_list(&[ic2.0, ic2.1]))?;
                    if let Some(x) = ic_at {
                        writeln!(f, "ic_at = {x:?}")?;
                    }
                }
            }
        }

        writeln!(f, "\n[field]")?;
        writeln!(f, "theta = {}", format_terms(&self.theta))?;
        writeln!(f, "phi = {}", format_terms(&self.phi))?;

        writeln!(f, "\n[action]")?;
        writeln!(f, "a = {:?}", self.a)?;
        writeln!(f, "b = {:?}", self.b)?;

        let t = &self.trajectory;
        if *t != TrajectorySpec::default() {
            writeln!(f, "\n[trajectory]")?;
            if let Some(r0) = t.r0 {
                writeln!(f, "r0 = {}", format_list(&r0))?;
            }
            for (name, v) in [
                ("t_end", t.t_end),
                ("rel_tol", t.rel_tol),
                ("abs_tol", t.abs_tol),
                ("max_step", t.max_step),
                ("singularity_eps", t.singularity_eps),
            ] {
                if let Some(v) = v {
                    writeln!(f, "{name} = {v:?}")?;
                }
            }
        }

        let v = &self.verify;
        if *v != VerifySpec::default() {
            writeln!(f, "\n[verify]")?;
            if let Some([nx, ny, nz]) = v.grid {
                writeln!(f, "grid = {nx}, {ny}, {nz}")?;
            }
            if let Some(lo) = v.lower {
                writeln!(f, "lower = {}", format_list(&lo))?;
            }
            if let Some(hi) = v.upper {
                writeln!(f, "upper = {}", format_list(&hi))?;
            }
            if let Some(t) = v.threshold {
                writeln!(f, "threshold = {t:?}")?;
            }
        }

        if !self.metric.points.is_empty() {
            let points: Vec<String> = self.metric.points.iter().map(|p| format_list(p)).collect();
            writeln!(f, "\n[metric]")?;
            writeln!(f, "points = {}", points.join("; "))?;
        }
        Ok(())
    }
}
