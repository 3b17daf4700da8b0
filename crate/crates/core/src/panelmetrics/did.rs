use serde::{Deserialize, Serialize};

use super::panel::{panel_ols, FitResult, PanelRow, PanelSpec};
use super::PanelError;

/// Name of the treatment-effect coefficient.
pub const DID_TERM: &str = "post_x_treated";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DidRow {
    pub entity: String,
    pub time: String,
    pub y: f64,
    pub treated: bool,
    pub post: bool,
    pub controls: Vec<f64>,
}

/// Outcome on `Post × Treated` and controls with entity and time effects
/// absorbed and errors clustered by entity and time.
pub fn did_estimate(rows: &[DidRow], control_names: &[String]) -> Result<FitResult, PanelError> {
    let has = |treated: bool, post: bool| rows.iter().any(|r| r.treated == treated && r.post == post);
    if !rows.iter().any(|r| r.treated) {
        return Err(PanelError::Spec("no treated entities".into()));
    }
    if !(has(true, false) && has(true, true) && has(false, false) && has(false, true)) {
        return Err(PanelError::Spec("treated and control entities must both be observed before and after".into()));
    }
    let mut names = vec![DID_TERM.to_string()];
    names.extend(control_names.iter().cloned());
    let panel: Vec<PanelRow> = rows
        .iter()
        .map(|r| {
            let mut x = vec![f64::from(u8::from(r.treated && r.post))];
            x.extend(&r.controls);
            PanelRow::new(r.entity.clone(), r.time.clone(), r.y, x)
        })
        .collect();
    panel_ols(&panel, &names, &PanelSpec::TWO_WAY)
}
