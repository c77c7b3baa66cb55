//! Function arguments: named builtins or `x,fx` CSV files.

use std::cell::RefCell;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use regvar::asymptotics::{Outside, SampledFunction};
use regvar::PopaParam;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum FnSpec {
    One,
    Zero,
    Identity,
    Sqrt,
    Log,
    Exp,
    Gauss,
    /// `1 + rho t` of the command's group.
    Eta,
    /// `(1 + rho t)^gamma`.
    EtaPow(f64),
    /// `x^a`.
    Pow(f64),
    /// Indicator of `[a, b]`.
    Indicator(f64, f64),
    Csv(PathBuf),
}

pub const BUILTIN_HELP: &str = "one, zero, identity, sqrt, log, exp, gauss, eta, eta-pow:G, pow:A, ind:A:B, or a CSV path";

fn number(s: &str, whole: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("bad number '{s}' in function '{whole}'"))
}

impl FromStr for FnSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("function '{head}' takes {n} parameter(s), got '{s}'"))
            }
        };
        let spec = match head {
            "one" => FnSpec::One,
            "zero" => FnSpec::Zero,
            "identity" => FnSpec::Identity,
            "sqrt" => FnSpec::Sqrt,
            "log" => FnSpec::Log,
            "exp" => FnSpec::Exp,
            "gauss" => FnSpec::Gauss,
            "eta" => FnSpec::Eta,
            "eta-pow" => {
                arity(1)?;
                return Ok(FnSpec::EtaPow(number(args[0], s)?));
            }
            "pow" => {
                arity(1)?;
                return Ok(FnSpec::Pow(number(args[0], s)?));
            }
            "ind" => {
                arity(2)?;
                return Ok(FnSpec::Indicator(number(args[0], s)?, number(args[1], s)?));
            }
            _ => return Ok(FnSpec::Csv(PathBuf::from(s))),
        };
        arity(0)?;
        Ok(spec)
    }
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnSpec::One => write!(f, "one"),
            FnSpec::Zero => write!(f, "zero"),
            FnSpec::Identity => write!(f, "identity"),
            FnSpec::Sqrt => write!(f, "sqrt"),
            FnSpec::Log => write!(f, "log"),
            FnSpec::Exp => write!(f, "exp"),
            FnSpec::Gauss => write!(f, "gauss"),
            FnSpec::Eta => write!(f, "eta"),
            FnSpec::EtaPow(g) => write!(f, "eta-pow:{g}"),
            FnSpec::Pow(a) => write!(f, "pow:{a}"),
            FnSpec::Indicator(a, b) => write!(f, "ind:{a}:{b}"),
            FnSpec::Csv(p) => write!(f, "{}", p.display()),
        }
    }
}

fn eta_of(rho: PopaParam) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    move |t: f64| match rho {
        PopaParam::Zero => 1.0,
        PopaParam::Finite(r) => 1.0 + r * t,
        PopaParam::Infinity => t,
    }
}

impl FnSpec {
    /// Builds the function. `rho` gives meaning to `eta` builtins; `outside`
    /// applies to CSV tables.
    pub fn load(&self, rho: PopaParam, outside: Outside) -> CliResult<SampledFunction> {
        let eta = eta_of(rho);
        Ok(match *self {
            FnSpec::One => SampledFunction::constant(1.0),
            FnSpec::Zero => SampledFunction::constant(0.0),
            FnSpec::Identity => SampledFunction::rule(|x| x),
            FnSpec::Sqrt => SampledFunction::rule(f64::sqrt),
            FnSpec::Log => SampledFunction::rule(f64::ln),
            FnSpec::Exp => SampledFunction::rule(f64::exp),
            FnSpec::Gauss => SampledFunction::rule(|x| (-x * x).exp()),
            FnSpec::Eta => SampledFunction::rule(eta),
            FnSpec::EtaPow(g) => SampledFunction::rule(move |t| eta(t).powf(g)),
            FnSpec::Pow(a) => SampledFunction::rule(move |x| x.powf(a)),
            FnSpec::Indicator(a, b) => {
                SampledFunction::rule(move |x| if (a..=b).contains(&x) { 1.0 } else { 0.0 })
            }
            FnSpec::Csv(ref path) => {
                let table = read_table(path)?;
                match outside {
                    Outside::Refuse => table,
                    Outside::Zero => table.zero_outside(),
                }
            }
        })
    }
}

fn data_err(path: &std::path::Path, msg: impl Into<String>) -> CliError {
    CliError::Data {
        path: path.display().to_string(),
        msg: msg.into(),
    }
}

/// Reads an `x,fx` table: header required, `x` strictly increasing, values finite.
pub fn read_table(path: &std::path::Path) -> CliResult<SampledFunction> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| data_err(path, e.to_string()))?;
    let header = reader
        .headers()
        .map_err(|e| data_err(path, format!("line 1: {e}")))?
        .clone();
    if header.len() != 2 || &header[0] != "x" || &header[1] != "fx" {
        return Err(data_err(path, "line 1: expected header 'x,fx'"));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            data_err(path, format!("line {line}: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(data_err(path, format!("line {line}: expected 2 fields, got {}", record.len())));
        }
        let field = |k: usize, name: &str| {
            record[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| data_err(path, format!("line {line}: {name} '{}' is not a finite number", &record[k])))
        };
        let x = field(0, "x")?;
        let fx = field(1, "fx")?;
        if let Some(&prev) = xs.last() {
            if !(x > prev) {
                return Err(data_err(path, format!("line {line}: x = {x} does not increase (previous {prev})")));
            }
        }
        xs.push(x);
        ys.push(fx);
    }
    if xs.len() < 2 {
        return Err(data_err(path, format!("need at least 2 data rows, got {}", xs.len())));
    }
    SampledFunction::table(xs, ys).map_err(|e| data_err(path, e.to_string()))
}

/// Adapts a [`SampledFunction`] to the plain `Fn(f64) -> f64` closures of the
/// integrators, remembering the first evaluation error.
pub struct Tracked<'a> {
    f: &'a SampledFunction,
    first_error: RefCell<Option<regvar::Error>>,
}

impl<'a> Tracked<'a> {
    pub fn new(f: &'a SampledFunction) -> Self {
        Tracked {
            f,
            first_error: RefCell::new(None),
        }
    }

    pub fn call(&self, x: f64) -> f64 {
        match self.f.eval(x) {
            Ok(v) => v,
            Err(e) => {
                self.first_error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    /// The recorded evaluation error takes precedence over the downstream one.
    pub fn check<T, E: Into<CliError>>(&self, r: Result<T, E>) -> CliResult<T> {
        if let Some(e) = self.first_error.borrow_mut().take() {
            return Err(e.into());
        }
        r.map_err(Into::into)
    }
}
