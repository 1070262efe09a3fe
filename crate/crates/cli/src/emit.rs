//! Bulk-data emitters: trajectory CSV and a self-contained SVG phase
//! portrait. Both produce deterministic bytes for fixed input.

use cone_yamabe::ode::{PortraitSpec, PortraitTrajectory};

use crate::json::format_float;

/// One row per sample, `traj_id,t,x,y`, LF line endings, header included.
/// Failed seeds contribute no rows.
pub fn portrait_csv(trajectories: &[PortraitTrajectory]) -> String {
    let mut out = String::from("traj_id,t,x,y\n");
    for (id, traj) in trajectories.iter().enumerate() {
        if let Ok(t) = &traj.result {
            for &(time, x, y) in &t.samples {
                out.push_str(&format!(
                    "{id},{},{},{}\n",
                    format_float(time),
                    format_float(x),
                    format_float(y)
                ));
            }
        }
    }
    out
}

const VIEW_W: f64 = 800.0;
const VIEW_H: f64 = 600.0;
const MARGIN: f64 = 40.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Render the sampled portrait as polylines in a fixed 800x600 viewBox.
/// The data-to-view mapping comes from the spec ranges (with a 5% pad), so
/// the output depends only on the inputs.
pub fn portrait_svg(spec: &PortraitSpec, trajectories: &[PortraitTrajectory]) -> String {
    let pad_x = 0.05 * (spec.x_range.1 - spec.x_range.0).max(1e-9);
    let pad_y = 0.05 * (spec.y_range.1 - spec.y_range.0).max(1e-9);
    let (x0, x1) = (spec.x_range.0 - pad_x, spec.x_range.1 + pad_x);
    let (y0, y1) = (spec.y_range.0 - pad_y, spec.y_range.1 + pad_y);
    let map_x = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (VIEW_W - 2.0 * MARGIN);
    let map_y = |y: f64| VIEW_H - MARGIN - (y - y0) / (y1 - y0) * (VIEW_H - 2.0 * MARGIN);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {VIEW_W} {VIEW_H}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // axes (clipped to the view when the origin is outside the range)
    let ax = map_x(0.0).clamp(MARGIN, VIEW_W - MARGIN);
    let ay = map_y(0.0).clamp(MARGIN, VIEW_H - MARGIN);
    out.push_str(&format!(
        "<line x1=\"{ax:.3}\" y1=\"{MARGIN}\" x2=\"{ax:.3}\" y2=\"{:.3}\" stroke=\"#888\" stroke-width=\"1\"/>\n",
        VIEW_H - MARGIN
    ));
    out.push_str(&format!(
        "<line x1=\"{MARGIN}\" y1=\"{ay:.3}\" x2=\"{:.3}\" y2=\"{ay:.3}\" stroke=\"#888\" stroke-width=\"1\"/>\n",
        VIEW_W - MARGIN
    ));

    for (id, traj) in trajectories.iter().enumerate() {
        let Ok(t) = &traj.result else { continue };
        if t.samples.len() < 2 {
            continue;
        }
        let mut points = String::new();
        for &(_, x, y) in &t.samples {
            let px = map_x(x).clamp(-1e4, 1e4);
            let py = map_y(y).clamp(-1e4, 1e4);
            points.push_str(&format!("{px:.3},{py:.3} "));
        }
        let color = PALETTE[id % PALETTE.len()];
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" points=\"{}\"/>\n",
            points.trim_end()
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cone_yamabe::dynamics::DynParams;
    use cone_yamabe::ode::{sample_portrait, PortraitSpec};

    fn spec() -> PortraitSpec {
        PortraitSpec {
            x_range: (0.0, 1.5),
            y_range: (-2.0, 2.0),
            nx: 3,
            ny: 3,
            t_max: 1.0,
            tol: 1e-8,
        }
    }

    #[test]
    fn csv_header_only_for_empty_input() {
        assert_eq!(portrait_csv(&[]), "traj_id,t,x,y\n");
    }

    #[test]
    fn emitters_are_deterministic() {
        let dp = DynParams::from_raw(1.0, 0.0, 1.0, 1.8, 7).unwrap();
        let trajs = sample_portrait(&dp, &spec()).unwrap();
        assert_eq!(portrait_csv(&trajs), portrait_csv(&trajs));
        let svg = portrait_svg(&spec(), &trajs);
        assert_eq!(svg, portrait_svg(&spec(), &trajs));
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
    }

    #[test]
    fn csv_ids_enumerate_seeds() {
        let dp = DynParams::from_raw(1.0, 0.0, 1.0, 1.8, 7).unwrap();
        let trajs = sample_portrait(&dp, &spec()).unwrap();
        let csv = portrait_csv(&trajs);
        let max_id = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse::<usize>().unwrap())
            .max()
            .unwrap();
        assert_eq!(max_id, trajs.len() - 1);
    }
}
