use std::io::Write;

use serde::Serialize;
use warpgeom::warp::{Interval, Spacetime};

use super::{emit, format, resolve, SpacetimeEcho};
use crate::error::{CliError, EXIT_OK};
use crate::output::{fmt_f64, to_json, Document};
use crate::settings::Settings;

pub const KEYS: [&str; 1] = ["samples"];
pub const DEFAULT_SAMPLES: usize = 101;

pub const COLUMNS: [&str; 10] = [
    "t",
    "f",
    "df",
    "d2f",
    "hubble",
    "log_f_second",
    "criterion",
    "rho",
    "p",
    "criterion_fluid_form",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Row {
    pub t: f64,
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
    pub hubble: f64,
    pub log_f_second: f64,
    pub criterion: f64,
    pub rho: f64,
    pub p: f64,
    pub criterion_fluid_form: f64,
}

impl Row {
    pub fn at(st: &Spacetime, t: f64) -> Result<Self, CliError> {
        let j = st.jet(t)?;
        let fluid = st.fluid_state(t)?;
        Ok(Row {
            t,
            f: j.v,
            df: j.d1,
            d2f: j.d2,
            hubble: st.hubble(t)?,
            log_f_second: st.log_f_second(t)?,
            criterion: st.criterion_value(t)?,
            rho: fluid.rho,
            p: fluid.p,
            criterion_fluid_form: st.criterion_fluid_form(t)?,
        })
    }

    fn values(&self) -> [f64; 10] {
        [
            self.t,
            self.f,
            self.df,
            self.d2f,
            self.hubble,
            self.log_f_second,
            self.criterion,
            self.rho,
            self.p,
            self.criterion_fluid_form,
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeResults {
    pub spacetime: SpacetimeEcho,
    pub region: String,
    pub columns: [&'static str; 10],
    pub rows: Vec<Row>,
}

/// `samples` equispaced times in the region; open ends are stepped inside by
/// one spacing, a single sample sits at the midpoint.
pub fn sample_times(region: &Interval, samples: usize) -> Result<Vec<f64>, CliError> {
    if !region.is_bounded() {
        return Err(CliError::input(format!("analyze needs a bounded region, got {region}")));
    }
    let (a, b) = (region.lo.value, region.hi.value);
    if samples == 1 {
        return Ok(vec![0.5 * (a + b)]);
    }
    let skip_lo = usize::from(!region.lo.closed);
    let skip_hi = usize::from(!region.hi.closed);
    let total = samples + skip_lo + skip_hi;
    let h = (b - a) / (total - 1) as f64;
    Ok((skip_lo..total - skip_hi)
        .map(|i| if i == total - 1 { b } else { a + i as f64 * h })
        .collect())
}

pub fn run(s: &Settings, out: &mut dyn Write) -> Result<i32, CliError> {
    let fmt = format(s, &["csv", "json"])?;
    let samples = s.parse::<usize>("samples")?.unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(CliError::input("`samples` must be at least 1"));
    }
    let spec = resolve(s)?;
    let st = spec.build(spec.dimension())?;
    let region = spec.region()?;
    region
        .within_closure_of(st.interval())
        .then_some(())
        .ok_or_else(|| CliError::input(format!("region {region} is not contained in the closure of {}", st.interval())))?;
    let rows = sample_times(&region, samples)?
        .into_iter()
        .map(|t| Row::at(&st, t))
        .collect::<Result<Vec<_>, _>>()?;
    let text = match fmt {
        "csv" => csv_text(&rows)?,
        _ => to_json(&Document::new(
            "analyze",
            s.echo(),
            AnalyzeResults {
                spacetime: spec.echo(&st),
                region: region.to_string(),
                columns: COLUMNS,
                rows,
            },
        )),
    };
    emit(s, &text, out)?;
    Ok(EXIT_OK)
}

fn csv_text(rows: &[Row]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Eval(format!("cannot write CSV: {e}"));
    w.write_record(COLUMNS).map_err(io)?;
    for r in rows {
        w.write_record(r.values().iter().map(|v| fmt_f64(*v))).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Eval(format!("cannot write CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV of ASCII numbers"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_grids() {
        let r: Interval = "[0,2]".parse().unwrap();
        assert_eq!(sample_times(&r, 5).unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let r: Interval = "(0,3]".parse().unwrap();
        assert_eq!(sample_times(&r, 3).unwrap(), vec![1.0, 2.0, 3.0]);
        let r: Interval = "[1,1]".parse().unwrap();
        assert_eq!(sample_times(&r, 1).unwrap(), vec![1.0]);
        assert!(sample_times(&"[0,inf)".parse().unwrap(), 3).is_err());
    }
}
