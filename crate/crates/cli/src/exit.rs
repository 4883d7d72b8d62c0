//! Process exit codes. Zero means a feasible solution was produced and
//! written; every failure class has its own code.

use tro_core::Error;

use crate::specs::UsageError;

pub const SUCCESS: u8 = 0;
pub const FAILURE: u8 = 1;
pub const USAGE: u8 = 2;
pub const BAD_INPUT: u8 = 3;
pub const INFEASIBLE: u8 = 4;
pub const UNROUTABLE: u8 = 5;
pub const SEED_INFEASIBLE: u8 = 6;
pub const TOO_LARGE: u8 = 7;

pub fn code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return USAGE;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Config(_) => USAGE,
                Error::Infeasible(_) => INFEASIBLE,
                Error::Unroutable { .. } => UNROUTABLE,
                Error::SeedInfeasible(_) => SEED_INFEASIBLE,
                Error::InstanceTooLarge(_) => TOO_LARGE,
                Error::DimensionMismatch { .. }
                | Error::InvalidNetwork(_)
                | Error::InvalidTraffic(_)
                | Error::InvalidTopology(_)
                | Error::InvalidRouting(_)
                | Error::InvalidUtilization(_)
                | Error::MalformedCsv { .. }
                | Error::Csv(_)
                | Error::Io(_) => BAD_INPUT,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() || cause.downcast_ref::<csv::Error>().is_some() {
            return BAD_INPUT;
        }
    }
    FAILURE
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_distinct_per_kind() {
        let cases: Vec<(anyhow::Error, u8)> = vec![
            (UsageError("x".into()).into(), USAGE),
            (Error::Infeasible("x".into()).into(), INFEASIBLE),
            (Error::Unroutable { src: 0, dst: 1 }.into(), UNROUTABLE),
            (Error::SeedInfeasible("x".into()).into(), SEED_INFEASIBLE),
            (Error::InstanceTooLarge("x".into()).into(), TOO_LARGE),
            (Error::InvalidTraffic("x".into()).into(), BAD_INPUT),
            (anyhow::anyhow!("other"), FAILURE),
        ];
        for (err, code) in cases {
            assert_eq!(code_for(&err), code, "{err}");
        }
        let wrapped = anyhow::Error::from(Error::Infeasible("x".into())).context("while solving");
        assert_eq!(code_for(&wrapped), INFEASIBLE);
    }
}
