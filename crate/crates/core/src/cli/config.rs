//! Flat `key = value` kernel configuration files.
//!
//! ```text
//! # Gaussian-composed kernel e^{−r(γ + ς)}
//! family = cm2sum
//! x_kernel = sqeuclid
//! y_kernel = sqeuclid
//! psi = exp:0.5
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. `atom` may repeat;
//! every other key appears at most once. Unknown keys, and keys that do not
//! apply to the selected family, are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::cnd::{CndKernelSpec, CndKind};
use crate::pdi::{PdiFamily, PdiKernelSpec};
use crate::special::{Bernstein1Spec, Bernstein2Spec, Cm2Spec, DiscreteMeasure};

use super::io::load_matrix;
use super::CliError;

const KEYS: &[&str] = &[
    "family", "centered", "x_kernel", "y_kernel", "x_offset", "y_offset", "g", "g1", "g2", "left", "right", "atom",
    "psi", "a0", "a1", "a2", "matrix", "n", "m",
];

struct Entry {
    line: usize,
    value: String,
}

struct Fields {
    single: BTreeMap<&'static str, Entry>,
    atoms: Vec<Entry>,
    used: Vec<&'static str>,
}

fn err(line: usize, field: &str, message: impl Into<String>) -> CliError {
    CliError::Config { line, field: field.to_string(), message: message.into() }
}

impl Fields {
    fn parse(text: &str) -> Result<Self, CliError> {
        let mut single = BTreeMap::new();
        let mut atoms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| err(line, "", "expected `key = value`"))?;
            let key = key.trim();
            let value = value.trim().to_string();
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(err(line, key, "unknown key"));
            };
            if known == "atom" {
                atoms.push(Entry { line, value });
            } else if let Some(prev) = single.insert(known, Entry { line, value }) {
                return Err(err(line, key, format!("duplicate key (first set on line {})", prev.line)));
            }
        }
        Ok(Self { single, atoms, used: Vec::new() })
    }

    fn get(&mut self, key: &'static str) -> Option<&Entry> {
        self.used.push(key);
        self.single.get(key)
    }

    fn require(&mut self, key: &'static str) -> Result<(usize, String), CliError> {
        match self.get(key) {
            Some(e) => Ok((e.line, e.value.clone())),
            None => Err(err(0, key, "required key missing")),
        }
    }

    fn float_or(&mut self, key: &'static str, default: f64) -> Result<f64, CliError> {
        match self.get(key) {
            Some(e) => parse_float(e.line, key, &e.value),
            None => Ok(default),
        }
    }

    fn usize_required(&mut self, key: &'static str) -> Result<usize, CliError> {
        let (line, v) = self.require(key)?;
        v.parse().map_err(|_| err(line, key, format!("expected a nonnegative integer, got `{v}`")))
    }

    /// Errors on any key that was set but never read.
    fn finish(self, family: &str) -> Result<(), CliError> {
        for (key, entry) in &self.single {
            if !self.used.contains(key) {
                return Err(err(entry.line, key, format!("not used by family `{family}`")));
            }
        }
        if !self.used.contains(&"atom") {
            if let Some(a) = self.atoms.first() {
                return Err(err(a.line, "atom", format!("not used by this `{family}` kernel")));
            }
        }
        Ok(())
    }
}

fn parse_float(line: usize, field: &str, v: &str) -> Result<f64, CliError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(err(line, field, format!("expected a finite number, got `{v}`"))),
    }
}

fn parse_bool(line: usize, field: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(err(line, field, format!("expected true or false, got `{v}`"))),
    }
}

fn split_param(v: &str) -> (&str, Option<&str>) {
    match v.split_once(':') {
        Some((name, p)) => (name.trim(), Some(p.trim())),
        None => (v.trim(), None),
    }
}

fn numbers(line: usize, field: &str, v: &str, count: usize) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = v.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
    if parts.len() != count {
        return Err(err(line, field, format!("expected {count} numbers, got {}", parts.len())));
    }
    parts.iter().map(|p| parse_float(line, field, p)).collect()
}

fn cnd_kernel(
    f: &mut Fields,
    key: &'static str,
    offset_key: &'static str,
    base: &Path,
) -> Result<CndKernelSpec, CliError> {
    let (line, v) = f.require(key)?;
    let (name, param) = split_param(&v);
    let need = || param.ok_or_else(|| err(line, key, format!("`{name}` needs a parameter")));
    let kind = match name {
        "sqeuclid" => CndKind::SquaredEuclidean,
        "euclid" => CndKind::Euclidean,
        "geodesic" => CndKind::SphereGeodesic,
        "power" => CndKind::PowerDistance(parse_float(line, key, need()?)?),
        "precomputed" => CndKind::Precomputed(load_matrix(&base.join(need()?))?),
        _ => return Err(err(line, key, format!("unknown CND kernel `{name}`"))),
    };
    if param.is_some() && !matches!(name, "power" | "precomputed") {
        return Err(err(line, key, format!("`{name}` takes no parameter")));
    }
    let offset = f.float_or(offset_key, 0.0)?;
    let spec = CndKernelSpec { kind, diagonal_offset: offset };
    spec.validate().map_err(|e| err(line, key, e.to_string()))?;
    Ok(spec)
}

fn bernstein1(f: &mut Fields, key: &'static str) -> Result<Bernstein1Spec, CliError> {
    let (line, v) = f.require(key)?;
    let (name, param) = split_param(&v);
    let p = || -> Result<f64, CliError> {
        parse_float(line, key, param.ok_or_else(|| err(line, key, format!("`{name}` needs a parameter")))?)
    };
    let spec = match name {
        "linear" => Bernstein1Spec::Linear(p()?),
        "power" => Bernstein1Spec::Power(p()?),
        "log1p" => Bernstein1Spec::Log1p,
        "expsat" => Bernstein1Spec::ExpSaturate(p()?),
        _ => return Err(err(line, key, format!("unknown Bernstein function `{name}`"))),
    };
    spec.validate().map_err(|e| err(line, key, e.to_string()))?;
    Ok(spec)
}

fn mixture2_atoms(f: &mut Fields) -> Result<Vec<(f64, f64, f64)>, CliError> {
    f.used.push("atom");
    if f.atoms.is_empty() {
        return Err(err(0, "atom", "a two-variable mixture needs at least one `atom = r1 r2 w` line"));
    }
    f.atoms.iter().map(|a| numbers(a.line, "atom", &a.value, 3).map(|v| (v[0], v[1], v[2]))).collect()
}

/// Parses a kernel configuration. Relative matrix paths resolve against `base`.
pub fn parse_kernel_config(text: &str, base: &Path) -> Result<PdiKernelSpec, CliError> {
    let mut f = Fields::parse(text)?;
    let (family_line, family) = f.require("family")?;
    let centered = match f.get("centered") {
        Some(e) => parse_bool(e.line, "centered", &e.value)?,
        None => false,
    };
    let family_spec = match family.as_str() {
        "kronecker" => {
            let x = cnd_kernel(&mut f, "x_kernel", "x_offset", base)?;
            let y = cnd_kernel(&mut f, "y_kernel", "y_offset", base)?;
            PdiFamily::Kronecker { x, y }
        }
        "bernstein2" => {
            let x = cnd_kernel(&mut f, "x_kernel", "x_offset", base)?;
            let y = cnd_kernel(&mut f, "y_kernel", "y_offset", base)?;
            let (g_line, g_name) = f.require("g")?;
            let g = match g_name.as_str() {
                "mixture2" => Bernstein2Spec::Mixture2(mixture2_atoms(&mut f)?),
                "product" => Bernstein2Spec::ProductOfBernstein1(bernstein1(&mut f, "g1")?, bernstein1(&mut f, "g2")?),
                "augmented" => Bernstein2Spec::BoundaryAugmented {
                    core: Box::new(Bernstein2Spec::Mixture2(mixture2_atoms(&mut f)?)),
                    left: bernstein1(&mut f, "left")?,
                    right: bernstein1(&mut f, "right")?,
                },
                other => return Err(err(g_line, "g", format!("unknown two-variable Bernstein form `{other}`"))),
            };
            g.validate().map_err(|e| err(g_line, "g", e.to_string()))?;
            PdiFamily::BernsteinCompose { g, x, y }
        }
        "cm2sum" => {
            let x = cnd_kernel(&mut f, "x_kernel", "x_offset", base)?;
            let y = cnd_kernel(&mut f, "y_kernel", "y_offset", base)?;
            let (psi_line, psi_value) = f.require("psi")?;
            let (name, param) = split_param(&psi_value);
            let p = || -> Result<f64, CliError> {
                parse_float(
                    psi_line,
                    "psi",
                    param.ok_or_else(|| err(psi_line, "psi", format!("`{name}` needs a parameter")))?,
                )
            };
            let psi = match name {
                "power" => Cm2Spec::PowerA(p()?),
                "tlogt" => Cm2Spec::TLogT,
                "exp" => Cm2Spec::exponential(p()?).map_err(|e| err(psi_line, "psi", e.to_string()))?,
                "quadratic" => Cm2Spec::Quadratic {
                    a0: f.float_or("a0", 0.0)?,
                    a1: f.float_or("a1", 0.0)?,
                    a2: f.float_or("a2", 0.0)?,
                },
                "mixture" => {
                    f.used.push("atom");
                    let atoms = f
                        .atoms
                        .iter()
                        .map(|a| numbers(a.line, "atom", &a.value, 2).map(|v| (v[0], v[1])))
                        .collect::<Result<Vec<_>, _>>()?;
                    let measure =
                        DiscreteMeasure::new(atoms, false).map_err(|e| err(psi_line, "atom", e.to_string()))?;
                    Cm2Spec::Mixture {
                        measure,
                        a0: f.float_or("a0", 0.0)?,
                        a1: f.float_or("a1", 0.0)?,
                        a2: f.float_or("a2", 0.0)?,
                    }
                }
                other => return Err(err(psi_line, "psi", format!("unknown CM2 function `{other}`"))),
            };
            psi.validate().map_err(|e| err(psi_line, "psi", e.to_string()))?;
            PdiFamily::Cm2Compose { psi, x, y }
        }
        "rawgrid" => {
            let (line, path) = f.require("matrix")?;
            let n = f.usize_required("n")?;
            let m = f.usize_required("m")?;
            let matrix = load_matrix(&base.join(&path))?;
            let spec = PdiKernelSpec::raw_grid(matrix, n, m).map_err(|e| err(line, "matrix", e.to_string()))?;
            spec.family
        }
        other => {
            return Err(err(
                family_line,
                "family",
                format!("unknown family `{other}` (expected kronecker, bernstein2, cm2sum or rawgrid)"),
            ))
        }
    };
    f.finish(&family)?;
    let spec = PdiKernelSpec { family: family_spec, centered };
    spec.validate().map_err(|e| err(family_line, "family", e.to_string()))?;
    Ok(spec)
}

fn render_cnd(out: &mut String, key: &str, offset_key: &str, spec: &CndKernelSpec) -> Result<(), CliError> {
    let v = match &spec.kind {
        CndKind::SquaredEuclidean => "sqeuclid".to_string(),
        CndKind::Euclidean => "euclid".to_string(),
        CndKind::SphereGeodesic => "geodesic".to_string(),
        CndKind::PowerDistance(a) => format!("power:{a:?}"),
        CndKind::Precomputed(_) => return Err(CliError::Usage("precomputed kernels cannot be rendered inline".into())),
    };
    writeln!(out, "{key} = {v}").unwrap();
    if spec.diagonal_offset != 0.0 {
        writeln!(out, "{offset_key} = {:?}", spec.diagonal_offset).unwrap();
    }
    Ok(())
}

fn render_b1(spec: &Bernstein1Spec) -> Result<String, CliError> {
    Ok(match spec {
        Bernstein1Spec::Linear(a) => format!("linear:{a:?}"),
        Bernstein1Spec::Power(a) => format!("power:{a:?}"),
        Bernstein1Spec::Log1p => "log1p".into(),
        Bernstein1Spec::ExpSaturate(r) => format!("expsat:{r:?}"),
        Bernstein1Spec::Mixture { .. } => {
            return Err(CliError::Usage("one-variable mixtures have no config form".into()))
        }
    })
}

fn render_atoms2(out: &mut String, atoms: &[(f64, f64, f64)]) {
    for (r1, r2, w) in atoms {
        writeln!(out, "atom = {r1:?} {r2:?} {w:?}").unwrap();
    }
}

/// Renders a spec in the config format, so that parsing the output returns
/// the same spec. Raw grids and precomputed factors reference files and
/// cannot be rendered.
pub fn render_kernel_config(spec: &PdiKernelSpec) -> Result<String, CliError> {
    let mut out = String::new();
    let (x, y) = spec.factors().ok_or_else(|| CliError::Usage("raw grid kernels cannot be rendered inline".into()))?;
    let family = match &spec.family {
        PdiFamily::Kronecker { .. } => "kronecker",
        PdiFamily::BernsteinCompose { .. } => "bernstein2",
        PdiFamily::Cm2Compose { .. } => "cm2sum",
        PdiFamily::RawGrid { .. } => unreachable!(),
    };
    writeln!(out, "family = {family}").unwrap();
    writeln!(out, "centered = {}", spec.centered).unwrap();
    render_cnd(&mut out, "x_kernel", "x_offset", x)?;
    render_cnd(&mut out, "y_kernel", "y_offset", y)?;
    match &spec.family {
        PdiFamily::BernsteinCompose { g, .. } => match g {
            Bernstein2Spec::Mixture2(atoms) => {
                writeln!(out, "g = mixture2").unwrap();
                render_atoms2(&mut out, atoms);
            }
            Bernstein2Spec::ProductOfBernstein1(a, b) => {
                writeln!(out, "g = product\ng1 = {}\ng2 = {}", render_b1(a)?, render_b1(b)?).unwrap();
            }
            Bernstein2Spec::BoundaryAugmented { core, left, right } => {
                let Bernstein2Spec::Mixture2(atoms) = core.as_ref() else {
                    return Err(CliError::Usage("augmented kernels need a mixture core to be rendered".into()));
                };
                writeln!(out, "g = augmented\nleft = {}\nright = {}", render_b1(left)?, render_b1(right)?).unwrap();
                render_atoms2(&mut out, atoms);
            }
        },
        PdiFamily::Cm2Compose { psi, .. } => match psi {
            Cm2Spec::PowerA(a) => writeln!(out, "psi = power:{a:?}").unwrap(),
            Cm2Spec::TLogT => writeln!(out, "psi = tlogt").unwrap(),
            Cm2Spec::Quadratic { a0, a1, a2 } => {
                writeln!(out, "psi = quadratic\na0 = {a0:?}\na1 = {a1:?}\na2 = {a2:?}").unwrap()
            }
            Cm2Spec::Mixture { measure, a0, a1, a2 } => {
                writeln!(out, "psi = mixture\na0 = {a0:?}\na1 = {a1:?}\na2 = {a2:?}").unwrap();
                for (r, w) in measure.atoms() {
                    writeln!(out, "atom = {r:?} {w:?}").unwrap();
                }
            }
        },
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<PdiKernelSpec, CliError> {
        parse_kernel_config(text, Path::new("."))
    }

    #[test]
    fn parses_each_family() {
        let k = parse("family = kronecker\nx_kernel = sqeuclid\ny_kernel = power:1.5\n").unwrap();
        assert_eq!(k, PdiKernelSpec::kronecker(CndKernelSpec::squared_euclidean(), CndKernelSpec::power(1.5).unwrap()));

        let b = parse("family=bernstein2\ncentered=true\nx_kernel=euclid\ny_kernel=euclid\ng=mixture2\natom=1 0.5 2\natom = 0, 1, 1\n").unwrap();
        assert!(b.centered);
        match b.family {
            PdiFamily::BernsteinCompose { g: Bernstein2Spec::Mixture2(atoms), .. } => {
                assert_eq!(atoms, vec![(1.0, 0.5, 2.0), (0.0, 1.0, 1.0)])
            }
            other => panic!("{other:?}"),
        }

        let c =
            parse("# gaussian\nfamily = cm2sum\nx_kernel = sqeuclid\ny_kernel = sqeuclid\npsi = exp:0.5\n").unwrap();
        assert_eq!(
            c,
            PdiKernelSpec::cm2(
                Cm2Spec::exponential(0.5).unwrap(),
                CndKernelSpec::squared_euclidean(),
                CndKernelSpec::squared_euclidean()
            )
        );
    }

    #[test]
    fn errors_name_line_and_field() {
        let e = parse("family = kronecker\nx_kernel = sqeuclid\ny_kernel = sqeuclid\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, CliError::Config { line: 4, ref field, .. } if field == "bogus"));
        let e = parse("family = kronecker\nx_kernel = power:3\ny_kernel = sqeuclid\n").unwrap_err();
        assert!(matches!(e, CliError::Config { line: 2, ref field, .. } if field == "x_kernel"));
        let e = parse("family = kronecker\nx_kernel = sqeuclid\ny_kernel = sqeuclid\npsi = tlogt\n").unwrap_err();
        assert!(matches!(e, CliError::Config { line: 4, ref field, .. } if field == "psi"));
        let e = parse("family = cm2sum\nx_kernel = sqeuclid\ny_kernel = sqeuclid\npsi = power:1.5\natom = 1 1\n")
            .unwrap_err();
        assert!(matches!(e, CliError::Config { line: 5, .. }));
        let e = parse("family = kronecker\nfamily = cm2sum\n").unwrap_err();
        assert!(matches!(e, CliError::Config { line: 2, .. }));
        assert!(parse("family kronecker\n").is_err());
        assert!(parse("x_kernel = sqeuclid\n").is_err());
    }

    #[test]
    fn render_round_trip() {
        let specs = vec![
            PdiKernelSpec::kronecker(
                CndKernelSpec::euclidean().with_offset(0.25).unwrap(),
                CndKernelSpec::sphere_geodesic(),
            ),
            PdiKernelSpec::bernstein(
                Bernstein2Spec::ProductOfBernstein1(Bernstein1Spec::Power(0.3), Bernstein1Spec::ExpSaturate(2.0)),
                CndKernelSpec::squared_euclidean(),
                CndKernelSpec::power(0.7).unwrap(),
            )
            .centered(),
            PdiKernelSpec::bernstein(
                Bernstein2Spec::BoundaryAugmented {
                    core: Box::new(Bernstein2Spec::Mixture2(vec![(0.1, 0.2, 0.3)])),
                    left: Bernstein1Spec::Log1p,
                    right: Bernstein1Spec::Linear(2.0),
                },
                CndKernelSpec::squared_euclidean(),
                CndKernelSpec::squared_euclidean(),
            ),
            PdiKernelSpec::cm2(
                Cm2Spec::Quadratic { a0: -1.0, a1: 0.1, a2: 3.0 },
                CndKernelSpec::euclidean(),
                CndKernelSpec::euclidean(),
            ),
            PdiKernelSpec::cm2(Cm2Spec::TLogT, CndKernelSpec::euclidean(), CndKernelSpec::euclidean()),
            PdiKernelSpec::cm2(
                Cm2Spec::exponential(0.123456789).unwrap(),
                CndKernelSpec::euclidean(),
                CndKernelSpec::euclidean(),
            ),
        ];
        for spec in specs {
            let text = render_kernel_config(&spec).unwrap();
            assert_eq!(parse(&text).unwrap(), spec, "{text}");
        }
    }
}
