use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AlError;
use crate::acquisition::{DiversityMetric, UncertaintyKind, UncertaintyMetric};
use crate::optim::Optimizer;

pub const DEFAULT_CANDIDATES: usize = 10_000;

/// How the next training point is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AcquisitionStrategy {
    Uniform,
    Normal,
    Uncertainty { metric: UncertaintyMetric, optimizer: Optimizer },
    Diversity { metric: DiversityMetric, candidates: usize },
    Pareto { candidates: usize, uncertainty: UncertaintyMetric, diversity: DiversityMetric },
}

impl AcquisitionStrategy {
    pub fn pareto() -> Self {
        AcquisitionStrategy::Pareto {
            candidates: DEFAULT_CANDIDATES,
            uncertainty: UncertaintyMetric::new(UncertaintyKind::DifferentialEntropy),
            diversity: DiversityMetric::MinDistance,
        }
    }

    /// Short name used in file names and reports.
    pub fn label(&self) -> String {
        self.to_string().replace(':', "-")
    }
}

pub const STRATEGY_HELP: &str = "uniform | normal | pareto[:N] | diversity:{mindist,meandist,jointcorr} \
| uncertainty:{local,de}:{stdmean,trstdtrmean,stdtrmean,std,diffentropy}";

const UNCERTAINTY_TOKENS: [(&str, UncertaintyKind); 5] = [
    ("stdmean", UncertaintyKind::StdOverMean),
    ("trstdtrmean", UncertaintyKind::TrimmedStdOverTrimmedMean),
    ("stdtrmean", UncertaintyKind::StdOverTrimmedMean),
    ("std", UncertaintyKind::Std),
    ("diffentropy", UncertaintyKind::DifferentialEntropy),
];

const DIVERSITY_TOKENS: [(&str, DiversityMetric); 3] = [
    ("mindist", DiversityMetric::MinDistance),
    ("meandist", DiversityMetric::MeanDistance),
    ("jointcorr", DiversityMetric::JointCorrelation),
];

fn uncertainty_token(kind: UncertaintyKind) -> &'static str {
    UNCERTAINTY_TOKENS.iter().find(|t| t.1 == kind).expect("all kinds listed").0
}

fn diversity_token(metric: DiversityMetric) -> &'static str {
    DIVERSITY_TOKENS.iter().find(|t| t.1 == metric).expect("all metrics listed").0
}

impl fmt::Display for AcquisitionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcquisitionStrategy::Uniform => write!(f, "uniform"),
            AcquisitionStrategy::Normal => write!(f, "normal"),
            AcquisitionStrategy::Uncertainty { metric, optimizer } => {
                let opt = match optimizer {
                    Optimizer::Local => "local",
                    Optimizer::DifferentialEvolution => "de",
                };
                write!(f, "uncertainty:{opt}:{}", uncertainty_token(metric.kind))
            }
            AcquisitionStrategy::Diversity { metric, .. } => write!(f, "diversity:{}", diversity_token(*metric)),
            AcquisitionStrategy::Pareto { candidates, .. } if *candidates == DEFAULT_CANDIDATES => write!(f, "pareto"),
            AcquisitionStrategy::Pareto { candidates, .. } => write!(f, "pareto:{candidates}"),
        }
    }
}

impl FromStr for AcquisitionStrategy {
    type Err = AlError;

    fn from_str(s: &str) -> Result<Self, AlError> {
        let bad = || AlError::UnknownStrategy(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["uniform"] => Ok(AcquisitionStrategy::Uniform),
            ["normal"] => Ok(AcquisitionStrategy::Normal),
            ["pareto"] => Ok(AcquisitionStrategy::pareto()),
            ["pareto", n] => {
                let n: usize = n.parse().ok().filter(|&n| n > 0).ok_or_else(bad)?;
                match AcquisitionStrategy::pareto() {
                    AcquisitionStrategy::Pareto { uncertainty, diversity, .. } => {
                        Ok(AcquisitionStrategy::Pareto { candidates: n, uncertainty, diversity })
                    }
                    _ => unreachable!(),
                }
            }
            ["diversity", m] => {
                let metric = DIVERSITY_TOKENS.iter().find(|t| t.0 == *m).ok_or_else(bad)?.1;
                Ok(AcquisitionStrategy::Diversity { metric, candidates: DEFAULT_CANDIDATES })
            }
            ["uncertainty", opt, m] => {
                let optimizer = match *opt {
                    "local" => Optimizer::Local,
                    "de" => Optimizer::DifferentialEvolution,
                    _ => return Err(bad()),
                };
                let kind = UNCERTAINTY_TOKENS.iter().find(|t| t.0 == *m).ok_or_else(bad)?.1;
                Ok(AcquisitionStrategy::Uncertainty { metric: UncertaintyMetric::new(kind), optimizer })
            }
            _ => Err(bad()),
        }
    }
}
