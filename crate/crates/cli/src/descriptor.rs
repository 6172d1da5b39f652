//! Form descriptors: JSON (or command-line shorthand) describing an eta
//! quotient together with the hypotheses it is studied under.

use quadcong::arith::is_prime;
use quadcong::characters::DirichletCharacter;
use quadcong::hecke::FormContext;
use quadcong::qexp::EtaQuotient;
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum PrecisionPolicy {
    /// Each command picks the smallest precision its outputs need.
    #[default]
    Auto,
    /// Use exactly this 24-scaled input precision.
    Fixed { value: i64 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDescriptor {
    /// `(d, r_d)` pairs of `Π η(dz)^{r_d}`.
    pub eta: Vec<(u64, i64)>,
    pub level: u64,
    #[serde(default)]
    pub psi: Option<DirichletCharacter>,
    pub r: i64,
    #[serde(default)]
    pub lambda: Option<u32>,
    pub ell: u64,
    #[serde(default = "one")]
    pub m: u32,
    #[serde(default)]
    pub precision: PrecisionPolicy,
    #[serde(default)]
    pub theta_attested: bool,
}

fn one() -> u32 {
    1
}

/// A validated descriptor.
#[derive(Clone, Debug)]
pub struct Form {
    pub eta: EtaQuotient,
    pub ctx: FormContext,
    pub precision: PrecisionPolicy,
}

impl FormDescriptor {
    pub fn eta_power(r: i64, ell: u64, m: u32) -> FormDescriptor {
        FormDescriptor {
            eta: vec![(1, r)],
            level: 1,
            psi: None,
            r,
            lambda: None,
            ell,
            m,
            precision: PrecisionPolicy::Auto,
            theta_attested: false,
        }
    }

    pub fn load(self) -> Result<Form, CliError> {
        let bad = |s: String| CliError::Input(s);
        let eta = EtaQuotient::new(&self.eta, self.level).map_err(|e| bad(e.to_string()))?;
        let twice = eta.weight_twice();
        if twice.rem_euclid(2) != 1 || twice < 3 {
            return Err(bad(format!("weight {twice}/2 is not of the form lambda + 1/2 with lambda >= 1")));
        }
        let lambda = ((twice - 1) / 2) as u32;
        if let Some(declared) = self.lambda {
            if declared != lambda {
                return Err(bad(format!("declared lambda = {declared} but the eta factors have weight {twice}/2")));
            }
        }
        if eta.residue() != self.r.rem_euclid(24) {
            return Err(bad(format!(
                "r = {} but the expansion is supported on n = {} mod 24",
                self.r,
                eta.residue()
            )));
        }
        let psi = self.psi.unwrap_or_else(|| DirichletCharacter::trivial(self.level));
        let mut ctx = FormContext::new(lambda, self.r, self.level, psi, self.ell, self.m).map_err(|e| bad(e.to_string()))?;
        if self.theta_attested {
            ctx = ctx.with_theta_attestation();
        }
        if let PrecisionPolicy::Fixed { value } = self.precision {
            if value < 1 {
                return Err(bad("fixed precision must be positive".into()));
            }
        }
        Ok(Form {
            eta,
            ctx,
            precision: self.precision,
        })
    }
}

/// Smallest prime `≥ 5` not dividing `level`.
pub fn default_ell(level: u64) -> u64 {
    (5..).find(|&p| is_prime(p) && level % p != 0).expect("primes are infinite")
}
