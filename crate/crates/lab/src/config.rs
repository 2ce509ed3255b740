//! Line-oriented `key = value` experiment configuration.
//!
//! `#` starts a comment. A key given twice keeps its last value, which is how
//! command-line overrides are layered on top of a file. Every error in the
//! text is reported, not just the first.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use escape_core::escape::Rule;
use escape_core::paths::StepSet;
use escape_core::precise::decimal_ratio;
use num_rational::BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Ladder,
    Escape,
    Crossing,
    Pk,
    Couple,
    Cov,
    Decouple,
    Bounds,
    All,
}

impl Kind {
    pub const EXPERIMENTS: [Kind; 8] = [
        Kind::Ladder,
        Kind::Escape,
        Kind::Crossing,
        Kind::Pk,
        Kind::Couple,
        Kind::Cov,
        Kind::Decouple,
        Kind::Bounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Ladder => "ladder",
            Kind::Escape => "escape",
            Kind::Crossing => "crossing",
            Kind::Pk => "pk",
            Kind::Couple => "couple",
            Kind::Cov => "cov",
            Kind::Decouple => "decouple",
            Kind::Bounds => "bounds",
            Kind::All => "all",
        }
    }

    pub fn includes(self, other: Kind) -> bool {
        self == Kind::All || self == other
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Kind::EXPERIMENTS
            .iter()
            .chain(&[Kind::All])
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment kind {s:?}"))
    }
}

/// Step set written as `staircase` or `detection:R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Steps {
    Staircase,
    Detection(u32),
}

impl Steps {
    pub fn build(self) -> StepSet {
        match self {
            Steps::Staircase => StepSet::staircase(),
            Steps::Detection(r) => StepSet::detection(r).expect("any range gives a valid region"),
        }
    }
}

impl fmt::Display for Steps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Steps::Staircase => f.write_str("staircase"),
            Steps::Detection(r) => write!(f, "detection:{r}"),
        }
    }
}

/// Which field `pk` samples; the parameters live in their own keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Open,
    Closed,
    Bernoulli,
    Exclusion,
}

/// Monotone box event for `decouple`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoxEvent {
    ColumnOpen,
    FullyOccupied,
}

/// `δ = num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fraction(pub u64, pub u32);

/// Decimal literal kept as text so it stays exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal(pub String);

pub trait Field: Sized {
    fn parse(s: &str) -> Result<Self, String>;
    fn show(&self) -> String;
}

macro_rules! plain_field {
    ($($t:ty),*) => {$(
        impl Field for $t {
            fn parse(s: &str) -> Result<Self, String> {
                s.parse::<$t>().map_err(|e| format!("{s:?} is not a valid {}: {e}", stringify!($t)))
            }
            fn show(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

plain_field!(u32, u64, usize, i64, f64);

impl<T: Field> Field for Vec<T> {
    fn parse(s: &str) -> Result<Self, String> {
        if s.trim().is_empty() {
            return Ok(Vec::new());
        }
        s.split(',').map(|p| T::parse(p.trim())).collect()
    }

    fn show(&self) -> String {
        self.iter().map(Field::show).collect::<Vec<_>>().join(",")
    }
}

impl Field for Rule {
    fn parse(s: &str) -> Result<Self, String> {
        s.parse().map_err(|e: escape_core::Error| e.to_string())
    }

    fn show(&self) -> String {
        self.name().into()
    }
}

impl Field for Steps {
    fn parse(s: &str) -> Result<Self, String> {
        if s == "staircase" {
            return Ok(Steps::Staircase);
        }
        s.strip_prefix("detection:")
            .and_then(|r| r.parse().ok())
            .map(Steps::Detection)
            .ok_or_else(|| format!("{s:?} is not a step set (staircase or detection:R)"))
    }

    fn show(&self) -> String {
        self.to_string()
    }
}

impl Field for Source {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "open" => Ok(Source::Open),
            "closed" => Ok(Source::Closed),
            "bernoulli" => Ok(Source::Bernoulli),
            "exclusion" => Ok(Source::Exclusion),
            _ => Err(format!("{s:?} is not a field source (open, closed, bernoulli, exclusion)")),
        }
    }

    fn show(&self) -> String {
        match self {
            Source::Open => "open",
            Source::Closed => "closed",
            Source::Bernoulli => "bernoulli",
            Source::Exclusion => "exclusion",
        }
        .into()
    }
}

impl Field for BoxEvent {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "column_open" => Ok(BoxEvent::ColumnOpen),
            "fully_occupied" => Ok(BoxEvent::FullyOccupied),
            _ => Err(format!("{s:?} is not a box event (column_open, fully_occupied)")),
        }
    }

    fn show(&self) -> String {
        match self {
            BoxEvent::ColumnOpen => "column_open",
            BoxEvent::FullyOccupied => "fully_occupied",
        }
        .into()
    }
}

impl Field for Fraction {
    fn parse(s: &str) -> Result<Self, String> {
        let (n, d) = s.split_once('/').ok_or_else(|| format!("{s:?} is not a fraction num/den"))?;
        let n = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        Ok(Fraction(n, d))
    }

    fn show(&self) -> String {
        format!("{}/{}", self.0, self.1)
    }
}

impl Field for Decimal {
    fn parse(s: &str) -> Result<Self, String> {
        decimal_ratio(s).map_err(|e| e.to_string())?;
        Ok(Decimal(s.to_string()))
    }

    fn show(&self) -> String {
        self.0.clone()
    }
}

fn list<T: Clone>(xs: &[T]) -> Vec<T> {
    xs.to_vec()
}

macro_rules! params {
    ($($(#[$m:meta])* $name:ident : $ty:ty = $default:expr,)*) => {
        /// Experiment parameters. Each field is the config key of the same name.
        #[derive(Clone, Debug, PartialEq)]
        pub struct Params {
            $($(#[$m])* pub $name: $ty,)*
        }

        impl Default for Params {
            fn default() -> Self {
                Params { $($name: $default,)* }
            }
        }

        impl Params {
            pub const KEYS: &'static [&'static str] = &[$(stringify!($name)),*];

            fn set(&mut self, key: &str, value: &str) -> Option<Result<(), String>> {
                match key {
                    $(stringify!($name) => Some(<$ty as Field>::parse(value).map(|v| self.$name = v)),)*
                    _ => None,
                }
            }

            pub fn entries(&self) -> Vec<(&'static str, String)> {
                vec![$((stringify!($name), Field::show(&self.$name)),)*]
            }
        }
    };
}

params! {
    /// Replicas of every Monte Carlo estimate.
    replicas: u64 = 200,

    escape_rho: f64 = 0.3,
    escape_rule: Rule = Rule::Avoid,
    escape_r: Vec<u32> = list(&[1, 2, 4, 8, 16]),
    escape_horizon: usize = 64,
    /// Densities of the avoid-rule monotonicity check.
    escape_rho_list: Vec<f64> = list(&[0.2, 0.5, 0.8]),
    escape_monotone_r: u32 = 2,
    strangle_t: Vec<usize> = list(&[8, 32, 128]),
    strangle_rho: f64 = 0.5,

    crossing_l: i64 = 3,
    crossing_big_l: i64 = 4,
    crossing_p: Vec<f64> = list(&[0.5, 0.7, 0.9]),
    crossing_steps: Steps = Steps::Staircase,

    l0: u64 = 16,
    k_max: usize = 4,
    delta: Fraction = Fraction(1, 16),
    u_inf: Decimal = Decimal("0.5".into()),
    /// Support-distance constant in `H(c1 l_k)`.
    c1: u64 = 6,
    /// `H(x) = x^{-h_power}`.
    h_power: u64 = 8,
    trigger_rho: Vec<f64> = list(&[0.3, 0.5]),

    pk_levels: Vec<usize> = list(&[0, 1]),
    pk_source: Source = Source::Exclusion,
    pk_p: f64 = 0.9,
    pk_rho: f64 = 0.5,
    pk_rule: Rule = Rule::Ride,
    pk_torus_factor: usize = 4,
    pk_steps: Steps = Steps::Detection(2),
    row_l: usize = 32,
    row_big_l: usize = 80,
    row_rho: f64 = 0.5,

    couple_rho: f64 = 0.2,
    couple_rho_prime: f64 = 0.8,
    couple_t: Vec<u64> = list(&[81, 256, 625]),
    /// `a,b` of `I = [a, b]`.
    interval: Vec<i64> = list(&[0, 16]),
    meeting_t: f64 = 65536.0,
    meeting_start: u64 = 16,

    cov_rho: f64 = 0.5,
    cov_t: Vec<f64> = list(&[1.0, 4.0, 16.0, 64.0, 256.0]),
    /// 0 picks `max(512, 8t + 64)` sites for each `t`.
    cov_torus: usize = 0,
    stationarity_rho: Vec<f64> = list(&[0.2, 0.5, 0.8]),
    stationarity_t: Vec<f64> = list(&[1.0, 16.0, 64.0]),
    stationarity_torus: usize = 64,
    stationarity_sites: usize = 20,

    decouple_rho: f64 = 0.45,
    decouple_rho_prime: f64 = 0.5,
    /// `x0,x1,t0,t1`.
    box1: Vec<i64> = list(&[0, 4, 0, 4]),
    box2: Vec<i64> = list(&[200, 204, 0, 4]),
    decouple_torus: usize = 512,
    decouple_checks: u64 = 50,
    decouple_event: BoxEvent = BoxEvent::ColumnOpen,

    poisson_lambda: Vec<f64> = list(&[0.5, 1.0, 2.0, 5.0, 10.0, 20.0]),
    poisson_t: Vec<f64> = (1..=40).map(f64::from).collect(),
    binomial_n: Vec<u64> = list(&[1, 5, 10, 20, 50, 100]),
    binomial_p: Vec<f64> = list(&[0.1, 0.5, 0.9]),
    binomial_t: Vec<f64> = list(&[0.0, 1.0, 2.0, 5.0, 10.0, 20.0]),
    kernel_n: u64 = 4096,
    kernel_ratio: Decimal = Decimal("0.5642".into()),
    kernel_t: Vec<f64> = (0..=12).map(|k| f64::from(1u32 << k)).collect(),
    kernel_x: Vec<i64> = list(&[0, 1, 2, 5, 10]),
    kernel_bound: f64 = 0.57,
    bessel_t: Vec<f64> = list(&[1.0, 4.0, 16.0]),
    bessel_digits: u32 = 10,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub kind: Kind,
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub params: Params,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line, `None` for command-line overrides and missing keys.
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

pub fn parse_config(text: &str) -> Result<Config, ConfigErrors> {
    parse_config_with(text, &[])
}

/// `overrides` are applied after the text, as if appended to it.
pub fn parse_config_with(text: &str, overrides: &[(&str, String)]) -> Result<Config, ConfigErrors> {
    let mut errors = Vec::new();
    let mut kind = Kind::All;
    let mut seed = None;
    let mut threads = default_threads();
    let mut out = None;
    let mut params = Params::default();
    let lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (Some(i + 1), l.split('#').next().unwrap_or("").trim().to_string()))
        .chain(overrides.iter().map(|(k, v)| (None, format!("{k} = {v}"))));
    for (line, body) in lines {
        if body.is_empty() {
            continue;
        }
        let err = |key: &str, message: String| ConfigError {
            line,
            key: key.to_string(),
            message,
        };
        let Some((key, value)) = body.split_once('=') else {
            errors.push(err(&body, "expected `key = value`".into()));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        let result = match key {
            "kind" => value.parse().map(|k| kind = k),
            "seed" => u64::parse(value).map(|s| seed = Some(s)),
            "threads" => usize::parse(value).map(|t| threads = t),
            "out" => {
                out = Some(PathBuf::from(value));
                Ok(())
            }
            _ => match params.set(key, value) {
                Some(r) => r,
                None => Err("unknown key".into()),
            },
        };
        if let Err(m) = result {
            errors.push(err(key, m));
        }
    }
    if seed.is_none() {
        errors.push(ConfigError {
            line: None,
            key: "seed".into(),
            message: "a master seed is required".into(),
        });
    }
    if threads == 0 {
        errors.push(ConfigError {
            line: None,
            key: "threads".into(),
            message: "must be at least 1".into(),
        });
    }
    errors.extend(validate(&params).into_iter().map(|(key, message)| ConfigError {
        line: None,
        key: key.into(),
        message,
    }));
    if errors.is_empty() {
        Ok(Config {
            kind,
            seed: seed.expect("checked"),
            threads,
            out,
            params,
        })
    } else {
        Err(ConfigErrors(errors))
    }
}

fn validate(p: &Params) -> Vec<(&'static str, String)> {
    let mut e: Vec<(&'static str, String)> = Vec::new();
    let mut unit = |key: &'static str, xs: &[f64]| {
        for &x in xs {
            if !(0.0..=1.0).contains(&x) {
                e.push((key, format!("{x} is outside [0, 1]")));
            }
        }
    };
    unit("escape_rho", &[p.escape_rho]);
    unit("escape_rho_list", &p.escape_rho_list);
    unit("strangle_rho", &[p.strangle_rho]);
    unit("crossing_p", &p.crossing_p);
    unit("trigger_rho", &p.trigger_rho);
    unit("pk_p", &[p.pk_p]);
    unit("pk_rho", &[p.pk_rho]);
    unit("row_rho", &[p.row_rho]);
    unit("couple_rho", &[p.couple_rho]);
    unit("couple_rho_prime", &[p.couple_rho_prime]);
    unit("cov_rho", &[p.cov_rho]);
    unit("stationarity_rho", &p.stationarity_rho);
    unit("decouple_rho", &[p.decouple_rho]);
    unit("decouple_rho_prime", &[p.decouple_rho_prime]);
    unit("binomial_p", &p.binomial_p);

    let mut need = |ok: bool, key: &'static str, msg: &str| {
        if !ok {
            e.push((key, msg.to_string()));
        }
    };
    let ascending_f = |v: &[f64]| !v.is_empty() && v.windows(2).all(|w| w[0] <= w[1]);
    let ascending_u = |v: &[usize]| !v.is_empty() && v.windows(2).all(|w| w[0] <= w[1]);
    need(p.replicas >= 1, "replicas", "must be at least 1");
    need(!p.escape_r.is_empty() && p.escape_r.windows(2).all(|w| w[0] < w[1]), "escape_r", "must be a non-empty strictly ascending list");
    need(p.escape_horizon >= 1, "escape_horizon", "must be at least 1");
    need(ascending_f(&p.escape_rho_list), "escape_rho_list", "must be a non-empty ascending list");
    need(ascending_u(&p.strangle_t), "strangle_t", "must be a non-empty ascending list");
    need(p.strangle_rho > 0.0, "strangle_rho", "must be positive");
    need(p.crossing_l >= 1 && p.crossing_big_l >= 1, "crossing_l", "region sides must be positive");
    need(p.crossing_l + p.crossing_big_l <= 4096, "crossing_big_l", "region too large to search");
    need(!p.crossing_p.is_empty(), "crossing_p", "must not be empty");
    need(p.l0 >= 4, "l0", "must be at least 4");
    need((2..=8).contains(&p.k_max), "k_max", "must lie in [2, 8]");
    need(p.delta.0 > 0 && p.delta.1 > 0 && 8 * p.delta.0 < u64::from(p.delta.1), "delta", "must lie in (0, 1/8)");
    match decimal_ratio(&p.u_inf.0) {
        Ok(r) => need(
            r > BigRational::from_integer(0.into()) && r <= BigRational::from_integer(1.into()),
            "u_inf",
            "must lie in (0, 1]",
        ),
        Err(m) => need(false, "u_inf", &m.to_string()),
    }
    need(p.c1 >= 1, "c1", "must be at least 1");
    need(p.pk_levels.iter().all(|&k| k <= p.k_max), "pk_levels", "levels must not exceed k_max");
    need(p.pk_torus_factor >= 1, "pk_torus_factor", "must be at least 1");
    need(p.row_l >= 1 && p.row_big_l >= 1, "row_l", "box sides must be positive");
    need(p.couple_rho < p.couple_rho_prime, "couple_rho", "must be below couple_rho_prime");
    need(p.couple_t.iter().all(|&t| t >= 16) && !p.couple_t.is_empty(), "couple_t", "every coupling time must be at least 16");
    need(p.interval.len() == 2 && p.interval[0] <= p.interval[1], "interval", "expected a,b with a <= b");
    need(p.meeting_t > 0.0 && p.meeting_t.is_finite(), "meeting_t", "must be positive");
    need(p.meeting_start >= 1, "meeting_start", "must be at least 1");
    need(p.cov_t.iter().all(|&t| t >= 0.0 && t.is_finite()) && !p.cov_t.is_empty(), "cov_t", "times must be non-negative");
    let t_max = p.cov_t.iter().copied().fold(0.0, f64::max);
    need(p.cov_torus == 0 || p.cov_torus as f64 > 8.0 * t_max, "cov_torus", "must exceed 8 t (or be 0 for automatic sizing)");
    need(ascending_f(&p.stationarity_t) && p.stationarity_t[0] >= 0.0, "stationarity_t", "must be a non-empty ascending list of non-negative times");
    need(p.stationarity_sites >= 1 && p.stationarity_sites <= p.stationarity_torus, "stationarity_sites", "must lie in [1, stationarity_torus]");
    need(p.stationarity_torus >= 2, "stationarity_torus", "must be at least 2");
    need(p.decouple_rho <= p.decouple_rho_prime, "decouple_rho", "must not exceed decouple_rho_prime");
    for (key, b) in [("box1", &p.box1), ("box2", &p.box2)] {
        let ok = b.len() == 4 && b[0] <= b[1] && 0 <= b[2] && b[2] <= b[3];
        need(ok, key, "expected x0,x1,t0,t1 with x0 <= x1 and 0 <= t0 <= t1");
        if ok {
            need(((b[1] - b[0] + 1) as usize) <= p.decouple_torus, key, "wider than decouple_torus");
        }
    }
    need(p.decouple_torus >= 2, "decouple_torus", "must be at least 2");
    need(p.poisson_lambda.iter().all(|&l| l > 0.0) && !p.poisson_lambda.is_empty(), "poisson_lambda", "must be positive");
    need(p.poisson_t.iter().all(|&t| t > 0.0) && !p.poisson_t.is_empty(), "poisson_t", "must be positive");
    need(p.binomial_n.iter().all(|&n| n >= 1), "binomial_n", "must be at least 1");
    need(p.binomial_t.iter().all(|&t| t >= 0.0), "binomial_t", "must be non-negative");
    need(p.kernel_n >= 1, "kernel_n", "must be at least 1");
    need(ratio_digits(&p.kernel_ratio.0).is_some(), "kernel_ratio", "expected a plain decimal such as 0.5642");
    need(p.kernel_t.iter().all(|&t| t > 0.0), "kernel_t", "must be positive");
    need(p.bessel_t.iter().all(|&t| t > 0.0), "bessel_t", "must be positive");
    e
}

/// `"0.5642"` as `(5642, 4)`.
pub fn ratio_digits(s: &str) -> Option<(u64, u32)> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    Some((digits.parse().ok()?, frac.len() as u32))
}

impl Config {
    /// Every key with its value, seed first; `threads` and `out` only affect
    /// where and how fast results are produced and are left out.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut v = vec![("kind", self.kind.name().to_string()), ("seed", self.seed.to_string())];
        v.extend(self.params.entries());
        v
    }

    pub fn to_text(&self) -> String {
        self.entries().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
