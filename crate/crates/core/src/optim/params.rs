use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Algorithm {
    Pso,
    De,
    Ga,
    Es,
    Sa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Pso,
        Algorithm::De,
        Algorithm::Ga,
        Algorithm::Es,
        Algorithm::Sa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pso => "PSO",
            Algorithm::De => "DE",
            Algorithm::Ga => "GA",
            Algorithm::Es => "ES",
            Algorithm::Sa => "SA",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaVariant {
    Generational,
    Steady,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EsSelection {
    Plus,
    Comma,
}

/// Flat parameter set covering all five algorithms; each reads its own fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerParams {
    pub algorithm: Algorithm,
    pub population_size: usize,
    /// Generation cap; `None` runs until the evaluation budget is spent.
    pub generations: Option<usize>,
    /// PSO inertia weight.
    pub w: f64,
    /// DE crossover probability.
    pub cr: f64,
    /// DE mutation (difference amplification) factor.
    pub mu_de: f64,
    /// GA/ES recombination probability.
    pub p_cross: f64,
    /// GA/ES mutation probability.
    pub p_mut: f64,
    /// SA geometric cooling factor.
    pub alpha_temp: f64,
    /// SA proposals between coolings.
    pub markov_chain_length: usize,
    /// SA neighbor probes used to pick the initial temperature.
    pub sa_probes: usize,
    /// SA acceptance probability targeted for the mean initial uphill move.
    pub target_accept: f64,
    pub mu_es: usize,
    pub lambda_es: usize,
    pub ga_variant: GaVariant,
    pub es_selection: EsSelection,
}

impl Default for OptimizerParams {
    fn default() -> Self {
        Self::defaults(Algorithm::Pso)
    }
}

impl OptimizerParams {
    /// Tuned defaults for `algorithm`.
    pub fn defaults(algorithm: Algorithm) -> Self {
        let (p_cross, p_mut) = match algorithm {
            Algorithm::Es => (0.9, 0.1),
            _ => (0.8, 0.2),
        };
        Self {
            algorithm,
            population_size: 20,
            generations: None,
            w: 0.5,
            cr: 0.9,
            mu_de: 0.1,
            p_cross,
            p_mut,
            alpha_temp: 0.8,
            markov_chain_length: 20,
            sa_probes: 20,
            target_accept: 0.8,
            mu_es: 4,
            lambda_es: 20,
            ga_variant: GaVariant::Generational,
            es_selection: EsSelection::Comma,
        }
    }

    fn is_population_based(&self) -> bool {
        !matches!(self.algorithm, Algorithm::Sa)
    }

    /// Evaluations consumed per generation.
    fn generation_size(&self) -> usize {
        match self.algorithm {
            Algorithm::Es => self.lambda_es,
            Algorithm::Sa => self.markov_chain_length,
            _ => self.population_size,
        }
    }

    pub fn validate(&self, max_evaluations: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("{}: {msg}", self.algorithm)));
        let probabilities = [
            ("cr", self.cr),
            ("p_cross", self.p_cross),
            ("p_mut", self.p_mut),
        ];
        for (name, p) in probabilities {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if !(self.w >= 0.0 && self.w.is_finite()) {
            return bad(format!("w = {} must be non-negative", self.w));
        }
        if !(self.mu_de > 0.0 && self.mu_de.is_finite()) {
            return bad(format!("mu_de = {} must be positive", self.mu_de));
        }
        if !(self.alpha_temp > 0.0 && self.alpha_temp < 1.0) {
            return bad(format!(
                "alpha_temp = {} must lie in (0, 1)",
                self.alpha_temp
            ));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return bad(format!(
                "target_accept = {} must lie in (0, 1)",
                self.target_accept
            ));
        }
        if self.markov_chain_length == 0 {
            return bad("markov_chain_length must be at least 1".into());
        }
        if max_evaluations == 0 {
            return bad("evaluation budget must be at least 1".into());
        }
        match self.algorithm {
            Algorithm::De if self.population_size < 4 => {
                return bad(format!(
                    "population_size = {} leaves no three distinct donors (need at least 4)",
                    self.population_size
                ));
            }
            Algorithm::Pso | Algorithm::Ga if self.population_size < 2 => {
                return bad("population_size must be at least 2".into());
            }
            Algorithm::Es => {
                if self.mu_es < 1 || self.lambda_es < self.mu_es {
                    return bad(format!(
                        "need lambda >= mu >= 1, got mu = {}, lambda = {}",
                        self.mu_es, self.lambda_es
                    ));
                }
                if self.es_selection == EsSelection::Comma && self.lambda_es <= self.mu_es {
                    return bad(format!(
                        "comma selection needs lambda > mu, got mu = {}, lambda = {}",
                        self.mu_es, self.lambda_es
                    ));
                }
            }
            _ => {}
        }
        if self.is_population_based() && self.generation_size() > max_evaluations {
            return bad(format!(
                "initial population of {} exceeds the budget of {max_evaluations}",
                self.generation_size()
            ));
        }
        if let Some(g) = self.generations {
            if g == 0 {
                return bad("generations must be at least 1".into());
            }
            if self.is_population_based()
                && g.saturating_mul(self.generation_size()) > max_evaluations
            {
                return bad(format!(
                    "{} generations of {} exceed the budget of {max_evaluations}",
                    g,
                    self.generation_size()
                ));
            }
        }
        Ok(())
    }

    /// Set one field from its textual value, as used by config and grid files.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{key}: cannot parse `{value}`")))
        }
        match key.trim() {
            "algorithm" => self.algorithm = value.parse()?,
            "population_size" => self.population_size = num(key, value)?,
            "generations" => self.generations = Some(num(key, value)?),
            "w" => self.w = num(key, value)?,
            "cr" | "Cr" => self.cr = num(key, value)?,
            "mu_de" => self.mu_de = num(key, value)?,
            "p_cross" => self.p_cross = num(key, value)?,
            "p_mut" => self.p_mut = num(key, value)?,
            "alpha_temp" => self.alpha_temp = num(key, value)?,
            "markov_chain_length" => self.markov_chain_length = num(key, value)?,
            "sa_probes" => self.sa_probes = num(key, value)?,
            "target_accept" => self.target_accept = num(key, value)?,
            "mu_es" => self.mu_es = num(key, value)?,
            "lambda_es" => self.lambda_es = num(key, value)?,
            "ga_variant" => {
                self.ga_variant = match value.trim() {
                    "generational" => GaVariant::Generational,
                    "steady" => GaVariant::Steady,
                    v => {
                        return Err(Error::Parse(format!(
                            "ga_variant: expected generational|steady, got `{v}`"
                        )))
                    }
                }
            }
            "es_selection" => {
                self.es_selection = match value.trim() {
                    "plus" => EsSelection::Plus,
                    "comma" => EsSelection::Comma,
                    v => {
                        return Err(Error::Parse(format!(
                            "es_selection: expected plus|comma, got `{v}`"
                        )))
                    }
                }
            }
            other => {
                return Err(Error::Parse(format!(
                    "unknown optimizer parameter `{other}`"
                )))
            }
        }
        Ok(())
    }
}
