//! Named collection of L-function descriptors: the built-in catalogue, a
//! plain-text interchange format, and the environment override hook.
//!
//! The text format is line-based: `[name]` opens an entry, `key = value`
//! lines fill it, `#` starts a comment. `kappa`, `character`, and `factors`
//! take comma-separated lists; complex gamma shifts are written `a+bi`.
//! `local` selects the Euler-factor policy (`unit`, `character`,
//! `hecke_delta`, `product`), with `factors` naming previously defined or
//! built-in entries and `cache` pointing `hecke_delta` at a coefficient
//! file. Entries loaded from text extend the built-ins and may shadow them
//! by name.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use super::delta::LambdaTable;
use super::descriptor::{LFunctionDescriptor, LocalPolicy};
use super::LFuncError;

/// Environment variable naming a registry file that extends the built-ins.
pub const REGISTRY_ENV: &str = "SUMLAB_REGISTRY";

#[derive(Debug, Clone)]
pub struct Registry {
    entries: BTreeMap<String, LFunctionDescriptor>,
}

fn character_policy(modulus: u64, values: &[f64]) -> LocalPolicy {
    LocalPolicy::Character {
        modulus,
        values: values.to_vec(),
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            entries: BTreeMap::new(),
        }
    }

    /// The built-in catalogue: the zeta function, the primitive quadratic
    /// characters of conductor 3, 4, and 8, the degree-two product of zeta
    /// with the conductor-4 character, and the discriminant cusp form.
    pub fn builtin() -> Self {
        let mut reg = Registry::empty();
        let chi4 = [0.0, 1.0, 0.0, -1.0];
        let entries = [
            LFunctionDescriptor {
                name: "zeta".into(),
                degree: 1,
                conductor: 1,
                kappa: vec![Complex64::new(0.0, 0.0)],
                pole_order: 1,
                epsilon: 1.0,
                local: LocalPolicy::Unit,
            },
            LFunctionDescriptor {
                name: "chi4".into(),
                degree: 1,
                conductor: 4,
                kappa: vec![Complex64::new(1.0, 0.0)],
                pole_order: 0,
                epsilon: 1.0,
                local: character_policy(4, &chi4),
            },
            LFunctionDescriptor {
                name: "chi3".into(),
                degree: 1,
                conductor: 3,
                kappa: vec![Complex64::new(1.0, 0.0)],
                pole_order: 0,
                epsilon: 1.0,
                local: character_policy(3, &[0.0, 1.0, -1.0]),
            },
            LFunctionDescriptor {
                name: "chi8".into(),
                degree: 1,
                conductor: 8,
                kappa: vec![Complex64::new(0.0, 0.0)],
                pole_order: 0,
                epsilon: 1.0,
                local: character_policy(8, &[0.0, 1.0, 0.0, -1.0, 0.0, -1.0, 0.0, 1.0]),
            },
            LFunctionDescriptor {
                name: "zeta_chi4".into(),
                degree: 2,
                conductor: 4,
                kappa: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                pole_order: 1,
                epsilon: 1.0,
                local: LocalPolicy::Product {
                    names: vec!["zeta".into(), "chi4".into()],
                    components: vec![LocalPolicy::Unit, character_policy(4, &chi4)],
                },
            },
            LFunctionDescriptor {
                name: "delta".into(),
                degree: 2,
                conductor: 1,
                kappa: vec![Complex64::new(5.5, 0.0), Complex64::new(6.5, 0.0)],
                pole_order: 0,
                epsilon: 1.0,
                local: LocalPolicy::HeckeDelta {
                    table: Arc::new(LambdaTable::new()),
                },
            },
        ];
        for e in entries {
            e.validate().expect("built-in descriptor must validate");
            reg.entries.insert(e.name.clone(), e);
        }
        reg
    }

    /// Built-ins extended by the file named in `SUMLAB_REGISTRY`, when set.
    pub fn from_env() -> Result<Self, LFuncError> {
        match std::env::var(REGISTRY_ENV) {
            Ok(path) if !path.is_empty() => Self::from_path(Path::new(&path)),
            _ => Ok(Self::builtin()),
        }
    }

    /// Built-ins extended by the entries of a registry file.
    pub fn from_path(path: &Path) -> Result<Self, LFuncError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_extending(&text)
    }

    /// Built-ins extended by entries parsed from `text` (later entries may
    /// reference built-ins and earlier entries as product factors).
    pub fn parse_extending(text: &str) -> Result<Self, LFuncError> {
        let mut reg = Self::builtin();
        let mut current: Option<(String, usize)> = None;
        let mut fields: Vec<(usize, String, String)> = Vec::new();

        let flush = |reg: &mut Registry,
                         current: &mut Option<(String, usize)>,
                         fields: &mut Vec<(usize, String, String)>|
         -> Result<(), LFuncError> {
            if let Some((name, line)) = current.take() {
                let d = build_descriptor(&name, line, fields, reg)?;
                d.validate()?;
                reg.entries.insert(name, d);
            }
            fields.clear();
            Ok(())
        };

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| LFuncError::Parse {
                    line: line_no,
                    message: "unterminated section header".into(),
                })?;
                flush(&mut reg, &mut current, &mut fields)?;
                current = Some((name.trim().to_string(), line_no));
            } else if let Some((key, value)) = line.split_once('=') {
                if current.is_none() {
                    return Err(LFuncError::Parse {
                        line: line_no,
                        message: "key outside of any [section]".into(),
                    });
                }
                fields.push((line_no, key.trim().to_string(), value.trim().to_string()));
            } else {
                return Err(LFuncError::Parse {
                    line: line_no,
                    message: format!("expected `[section]` or `key = value`, got `{line}`"),
                });
            }
        }
        flush(&mut reg, &mut current, &mut fields)?;
        Ok(reg)
    }

    pub fn get(&self, name: &str) -> Result<&LFunctionDescriptor, LFuncError> {
        self.entries.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.entries.keys().map(String::as_str).collect();
            LFuncError::UnknownLFunction(format!("{name} (known: {})", known.join(", ")))
        })
    }

    pub fn insert(&mut self, descriptor: LFunctionDescriptor) -> Result<(), LFuncError> {
        descriptor.validate()?;
        self.entries.insert(descriptor.name.clone(), descriptor);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &LFunctionDescriptor> {
        self.entries.values()
    }

    /// Serializes every entry in the registry's text format; parsing the
    /// result reproduces the registry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for d in self.entries.values() {
            let _ = writeln!(out, "[{}]", d.name);
            let _ = writeln!(out, "degree = {}", d.degree);
            let _ = writeln!(out, "conductor = {}", d.conductor);
            let kappa: Vec<String> = d.kappa.iter().map(|k| format_complex(*k)).collect();
            let _ = writeln!(out, "kappa = {}", kappa.join(", "));
            let _ = writeln!(out, "pole_order = {}", d.pole_order);
            let _ = writeln!(out, "epsilon = {}", d.epsilon);
            match &d.local {
                LocalPolicy::Unit => {
                    let _ = writeln!(out, "local = unit");
                }
                LocalPolicy::Character { values, .. } => {
                    let _ = writeln!(out, "local = character");
                    let vals: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
                    let _ = writeln!(out, "character = {}", vals.join(", "));
                }
                LocalPolicy::HeckeDelta { table } => {
                    let _ = writeln!(out, "local = hecke_delta");
                    if let Some(p) = table.cache_path() {
                        let _ = writeln!(out, "cache = {}", p.display());
                    }
                }
                LocalPolicy::Product { names, .. } => {
                    let _ = writeln!(out, "local = product");
                    let _ = writeln!(out, "factors = {}", names.join(", "));
                }
            }
            let _ = writeln!(out);
        }
        out
    }
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    if let Some(body) = s.strip_suffix('i') {
        let body = body.trim();
        // split at the last +/- that is not a leading sign or part of an exponent
        let mut split = None;
        for (i, ch) in body.char_indices().skip(1) {
            if (ch == '+' || ch == '-') && !matches!(&body[i - 1..i], "e" | "E") {
                split = Some(i);
            }
        }
        match split {
            Some(i) => {
                let re: f64 = body[..i].trim().parse().map_err(|e| format!("{e}"))?;
                let im_str = body[i..].trim();
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|e| format!("{e}"))?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = body.parse().map_err(|e| format!("{e}"))?;
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s.parse().map_err(|e| format!("{e}"))?;
        Ok(Complex64::new(re, 0.0))
    }
}

fn build_descriptor(
    name: &str,
    section_line: usize,
    fields: &[(usize, String, String)],
    resolved: &Registry,
) -> Result<LFunctionDescriptor, LFuncError> {
    let mut degree = None;
    let mut conductor = None;
    let mut kappa = None;
    let mut pole_order = None;
    let mut epsilon = None;
    let mut local_kind = None;
    let mut character = None;
    let mut factors = None;
    let mut cache = None;

    for (line, key, value) in fields {
        let line = *line;
        let parse_err = |message: String| LFuncError::Parse { line, message };
        match key.as_str() {
            "degree" => {
                degree = Some(value.parse::<usize>().map_err(|e| parse_err(e.to_string()))?)
            }
            "conductor" => {
                conductor = Some(value.parse::<u64>().map_err(|e| parse_err(e.to_string()))?)
            }
            "kappa" => {
                let mut ks = Vec::new();
                for part in value.split(',') {
                    ks.push(parse_complex(part).map_err(parse_err)?);
                }
                kappa = Some(ks);
            }
            "pole_order" => {
                pole_order = Some(value.parse::<usize>().map_err(|e| parse_err(e.to_string()))?)
            }
            "epsilon" => {
                epsilon = Some(value.parse::<f64>().map_err(|e| parse_err(e.to_string()))?)
            }
            "local" => local_kind = Some((line, value.clone())),
            "character" => {
                let mut vs = Vec::new();
                for part in value.split(',') {
                    vs.push(
                        part.trim()
                            .parse::<f64>()
                            .map_err(|e| parse_err(e.to_string()))?,
                    );
                }
                character = Some(vs);
            }
            "factors" => {
                factors = Some(
                    value
                        .split(',')
                        .map(|p| p.trim().to_string())
                        .collect::<Vec<_>>(),
                );
            }
            "cache" => cache = Some(value.clone()),
            other => {
                return Err(parse_err(format!("unknown key `{other}`")));
            }
        }
    }

    let missing = |what: &str| LFuncError::Parse {
        line: section_line,
        message: format!("[{name}] is missing `{what}`"),
    };
    let (local_line, local_kind) = local_kind.ok_or_else(|| missing("local"))?;
    let conductor = conductor.ok_or_else(|| missing("conductor"))?;

    let local = match local_kind.as_str() {
        "unit" => LocalPolicy::Unit,
        "character" => {
            let values = character.ok_or_else(|| missing("character"))?;
            LocalPolicy::Character {
                modulus: conductor,
                values,
            }
        }
        "hecke_delta" => {
            let table = match &cache {
                Some(p) => LambdaTable::with_cache(Path::new(p))?,
                None => LambdaTable::new(),
            };
            LocalPolicy::HeckeDelta {
                table: Arc::new(table),
            }
        }
        "product" => {
            let names = factors.ok_or_else(|| missing("factors"))?;
            let mut components = Vec::new();
            for n in &names {
                components.push(resolved.get(n).map(|d| d.local.clone()).map_err(|_| {
                    LFuncError::Parse {
                        line: local_line,
                        message: format!("product factor `{n}` is not defined yet"),
                    }
                })?);
            }
            LocalPolicy::Product { names, components }
        }
        other => {
            return Err(LFuncError::Parse {
                line: local_line,
                message: format!(
                    "unknown local policy `{other}` (expected unit, character, hecke_delta, or product)"
                ),
            });
        }
    };

    Ok(LFunctionDescriptor {
        name: name.to_string(),
        degree: degree.ok_or_else(|| missing("degree"))?,
        conductor,
        kappa: kappa.ok_or_else(|| missing("kappa"))?,
        pole_order: pole_order.ok_or_else(|| missing("pole_order"))?,
        epsilon: epsilon.ok_or_else(|| missing("epsilon"))?,
        local,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_catalogue_is_complete_and_valid() {
        let reg = Registry::builtin();
        let names: Vec<&str> = reg.names().collect();
        assert_eq!(
            names,
            vec!["chi3", "chi4", "chi8", "delta", "zeta", "zeta_chi4"]
        );
        for d in reg.iter() {
            d.validate().unwrap();
        }
    }

    #[test]
    fn text_round_trip() {
        let reg = Registry::builtin();
        let text = reg.to_text();
        let reparsed = Registry::parse_extending(&text).unwrap();
        assert_eq!(text, reparsed.to_text());
    }

    #[test]
    fn parse_a_custom_entry_referencing_builtins() {
        let text = "
# a degree-two twist
[zeta_chi8]
degree = 2
conductor = 8
kappa = 0, 0
pole_order = 1
epsilon = 1
local = product
factors = zeta, chi8
";
        let reg = Registry::parse_extending(text).unwrap();
        let d = reg.get("zeta_chi8").unwrap();
        assert_eq!(d.degree, 2);
        assert_eq!(d.local.inverse_coefficients(7), vec![1.0, -2.0, 1.0]);
        // built-ins still present
        assert!(reg.get("delta").is_ok());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Registry::parse_extending("[x]\nwobble = 3\n").unwrap_err();
        match err {
            LFuncError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(Registry::parse_extending("degree = 1\n").is_err());
        assert!(Registry::parse_extending("[y\n").is_err());
    }

    #[test]
    fn complex_shift_formatting() {
        for z in [
            Complex64::new(0.0, 0.0),
            Complex64::new(5.5, 0.0),
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, -1.25),
            Complex64::new(0.0, 3.0),
        ] {
            let s = format_complex(z);
            let back = parse_complex(&s).unwrap();
            assert_eq!(z, back, "via `{s}`");
        }
    }

    #[test]
    fn env_override_extends_builtins() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("extra.registry");
        std::fs::write(
            &path,
            "[chi4_alias]\ndegree = 1\nconductor = 4\nkappa = 1\npole_order = 0\nepsilon = 1\nlocal = character\ncharacter = 0, 1, 0, -1\n",
        )
        .unwrap();
        std::env::set_var(REGISTRY_ENV, &path);
        let reg = Registry::from_env().unwrap();
        std::env::remove_var(REGISTRY_ENV);
        assert!(reg.get("chi4_alias").is_ok());
        assert!(reg.get("zeta").is_ok());
    }
}
