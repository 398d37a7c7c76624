//! Serialization of results: JSON and CSV with every float written to 17
//! significant digits, atomic file writes, and re-ingestion of solver output.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::fbsolver::{
    run_diagnostics, Diagnostics, Domain, Field, FreeBoundarySolution, Mesh, OuterRecord,
    SolverConfig,
};
use crate::geometry::{build_configuration, ShockCurve};
use crate::polar::{solve_state2, Branch, Problem};

/// Shortest exact-round-trip rendering used in every output file.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        // not valid JSON; CSV readers accept it
        format!("{v}")
    }
}

/// Pretty JSON layout with 17-digit floats.
struct PreciseFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for PreciseFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(format_f64(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let fmt = PreciseFormatter {
        inner: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Io(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::from(e)
    })
}

pub const FIELD_HEADER: &str = "xi,eta,phi,dphi_dxi,dphi_deta,rho,pseudo_mach,elliptic_margin";
pub const SHOCK_HEADER: &str = "xi,eta";

/// Node values in mesh order (`i` fastest).
pub fn field_csv(domain: &Domain, field: &Field) -> String {
    let mut out = String::with_capacity(field.phi.len() * 200);
    out.push_str(FIELD_HEADER);
    out.push('\n');
    for s in field.node_samples(domain) {
        let row = [
            s.x[0],
            s.x[1],
            s.phi,
            s.dphi[0],
            s.dphi[1],
            s.rho,
            s.pseudo_mach,
            s.elliptic_margin,
        ];
        let cells: Vec<String> = row.iter().map(|v| format_f64(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn shock_csv(shock: &ShockCurve) -> String {
    let mut out = String::from(SHOCK_HEADER);
    out.push('\n');
    for p in &shock.points {
        out.push_str(&format!("{},{}\n", format_f64(p[0]), format_f64(p[1])));
    }
    out
}

fn parse_rows(text: &str, header: &str, min_cols: usize) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == header => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header `{header}`, found {other:?}"
            )));
        }
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(n, line)| {
            let vals: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|c| c.trim().parse::<f64>()).collect();
            let vals = vals.map_err(|e| Error::Parse(format!("row {}: {e}", n + 1)))?;
            if vals.len() < min_cols {
                return Err(Error::Parse(format!(
                    "row {}: expected {min_cols} columns",
                    n + 1
                )));
            }
            Ok(vals)
        })
        .collect()
}

pub fn parse_field_csv(text: &str, n1: usize, n2: usize) -> Result<Field> {
    let rows = parse_rows(text, FIELD_HEADER, 3)?;
    if rows.len() != (n1 + 1) * (n2 + 1) {
        return Err(Error::Parse(format!(
            "field has {} rows, a {n1}x{n2} mesh needs {}",
            rows.len(),
            (n1 + 1) * (n2 + 1)
        )));
    }
    Ok(Field {
        mesh: Mesh {
            n1,
            n2,
            nodes: rows.iter().map(|r| [r[0], r[1]]).collect(),
        },
        phi: rows.iter().map(|r| r[2]).collect(),
    })
}

pub fn parse_shock_csv(text: &str) -> Result<ShockCurve> {
    let rows = parse_rows(text, SHOCK_HEADER, 2)?;
    Ok(ShockCurve {
        points: rows.iter().map(|r| [r[0], r[1]]).collect(),
    })
}

/// Physical inputs of a regular-reflection solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveParams {
    pub gamma: f64,
    pub rho0: f64,
    pub rho1: f64,
    pub theta_deg: f64,
    pub branch: Branch,
}

impl SolveParams {
    /// Rebuilds the domain the solve was posed on.
    pub fn domain(&self) -> Result<Domain> {
        let problem = Problem::new(self.gamma, self.rho0, self.rho1)?;
        let polar = solve_state2(&problem, self.theta_deg.to_radians(), self.branch)?;
        let config = build_configuration(&problem, &polar)?;
        Ok(Domain::from_configuration(&config))
    }
}

/// Sidecar document written next to the field and shock files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub status: String,
    pub outer_iterations: usize,
    pub params: SolveParams,
    pub solver: SolverConfig,
    pub diagnostics: Diagnostics,
    pub history: Vec<OuterRecord>,
}

impl SolveRecord {
    pub fn new(params: SolveParams, solver: SolverConfig, solution: &FreeBoundarySolution) -> Self {
        Self {
            status: solution.status.as_str().to_string(),
            outer_iterations: solution.outer_iterations,
            params,
            solver,
            diagnostics: solution.diagnostics,
            history: solution.history.clone(),
        }
    }
}

pub const FIELD_FILE: &str = "field.csv";
pub const SHOCK_FILE: &str = "shock.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.json";

/// Writes `field.csv`, `shock.csv` and `diagnostics.json` into `dir`.
pub fn write_solve_output(
    dir: &Path,
    domain: &Domain,
    record: &SolveRecord,
    solution: &FreeBoundarySolution,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_atomic(
        &dir.join(FIELD_FILE),
        field_csv(domain, &solution.field).as_bytes(),
    )?;
    write_atomic(&dir.join(SHOCK_FILE), shock_csv(&solution.shock).as_bytes())?;
    write_atomic(&dir.join(DIAGNOSTICS_FILE), to_json(record)?.as_bytes())
}

/// Reads solver output back and evaluates the diagnostics afresh.
pub fn rerun_diagnostics(dir: &Path) -> Result<(SolveRecord, Diagnostics)> {
    let record: SolveRecord =
        serde_json::from_str(&fs::read_to_string(dir.join(DIAGNOSTICS_FILE))?)
            .map_err(|e| Error::Parse(e.to_string()))?;
    let solver = record.solver;
    let field = parse_field_csv(
        &fs::read_to_string(dir.join(FIELD_FILE))?,
        solver.n1,
        solver.n2,
    )?;
    let shock = parse_shock_csv(&fs::read_to_string(dir.join(SHOCK_FILE))?)?;
    let domain = record.params.domain()?;
    let diagnostics = run_diagnostics(&domain, &field, &shock, &solver);
    Ok((record, diagnostics))
}
