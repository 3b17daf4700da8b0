use std::io::Write;

use super::cv::{CvReport, GridCell};

/// `iter,r2`.
pub fn write_cv_csv<W: Write>(w: W, r: &CvReport) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["iter", "r2"])?;
    for (i, s) in r.scores.iter().enumerate() {
        wtr.write_record([i.to_string(), s.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `label,mean,std,n_iterations,sample_size,test_fraction,seed`.
pub fn write_summary_csv<W: Write>(w: W, reports: &[CvReport]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["label", "mean", "std", "n_iterations", "sample_size", "test_fraction", "seed"])?;
    for r in reports {
        wtr.write_record([
            r.label.clone(),
            r.mean.to_string(),
            r.std.to_string(),
            r.n_iterations.to_string(),
            r.sample_size.to_string(),
            r.test_fraction.to_string(),
            r.seed.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `rank,mean,std,split_samples,ensemble_size`.
pub fn write_grid_csv<W: Write>(w: W, cells: &[GridCell]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["rank", "mean", "std", "split_samples", "ensemble_size"])?;
    for c in cells {
        wtr.write_record([c.rank.to_string(), c.report.mean.to_string(), c.report.std.to_string(), c.min_split.to_string(), c.n_trees.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `method,mean,std`.
pub fn write_comparison_csv<W: Write>(w: W, reports: &[CvReport]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["method", "mean", "std"])?;
    for r in reports {
        wtr.write_record([r.label.clone(), r.mean.to_string(), r.std.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}
