//! Static SVG renderings of patterns and efficiency sweeps.

use plotters::prelude::*;

use crate::array::PatternResult;
use crate::metrics::SweepRow;

/// Lowest level drawn on pattern plots. Data files keep unfloored values.
pub const DB_FLOOR: f64 = -40.0;

const SIZE: (u32, u32) = (900, 560);

fn plot_err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Normalized dB pattern of every harmonic, clipped at [`DB_FLOOR`].
pub fn pattern_svg(pattern: &PatternResult, title: &str) -> Result<String, String> {
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(50)
            .build_cartesian_2d(0f64..180f64, DB_FLOOR..0f64)
            .map_err(plot_err)?;
        chart
            .configure_mesh()
            .x_desc("theta (deg)")
            .y_desc("normalized power (dB)")
            .draw()
            .map_err(plot_err)?;
        for (i, h) in pattern.harmonics.iter().enumerate() {
            let color = Palette99::pick(i).to_rgba();
            let points = pattern.theta_grid_deg.iter().zip(&h.db).map(|(&t, &db)| (t, db.max(DB_FLOOR)));
            chart
                .draw_series(LineSeries::new(points, color.stroke_width(if h.q == 1 { 2 } else { 1 })))
                .map_err(plot_err)?
                .label(h.frequency_label())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color));
        }
        chart
            .configure_series_labels()
            .position(SeriesLabelPosition::UpperRight)
            .background_style(WHITE.mix(0.85))
            .border_style(BLACK)
            .draw()
            .map_err(plot_err)?;
        root.present().map_err(plot_err)?;
    }
    Ok(svg)
}

/// Fifth-harmonic level and the three efficiencies against rise/fall time.
pub fn sweep_svg(rows: &[SweepRow]) -> Result<String, String> {
    let first = rows.first().ok_or("empty sweep")?.delta_norm;
    let last = rows.last().ok_or("empty sweep")?.delta_norm;
    let x_range = if last > first { first..last } else { first..first + 1e-3 };
    let finite_db = rows.iter().map(|r| r.pl5_db).filter(|v| v.is_finite());
    let low = finite_db.fold(0.0f64, f64::min).max(-60.0).floor() - 1.0;

    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let (left, right) = root.split_horizontally(SIZE.0 / 2);

        let mut level = ChartBuilder::on(&left)
            .caption("5th-harmonic level", ("sans-serif", 18))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(50)
            .build_cartesian_2d(x_range.clone(), low..-10.0)
            .map_err(plot_err)?;
        level.configure_mesh().x_desc("rise/fall time / T0").y_desc("dB").draw().map_err(plot_err)?;
        level
            .draw_series(LineSeries::new(
                rows.iter().filter(|r| r.pl5_db.is_finite()).map(|r| (r.delta_norm, r.pl5_db)),
                BLUE.stroke_width(2),
            ))
            .map_err(plot_err)?;

        let mut eff = ChartBuilder::on(&right)
            .caption("efficiencies", ("sans-serif", 18))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(50)
            .build_cartesian_2d(x_range, 60f64..100f64)
            .map_err(plot_err)?;
        eff.configure_mesh().x_desc("rise/fall time / T0").y_desc("%").draw().map_err(plot_err)?;
        type Curve = (&'static str, fn(&SweepRow) -> f64, RGBColor);
        let curves: [Curve; 3] = [
            ("eta_tma", |r| r.eta_tma, RED),
            ("eta_s", |r| r.eta_s, GREEN),
            ("eta", |r| r.eta, BLACK),
        ];
        for (name, get, color) in curves {
            eff.draw_series(LineSeries::new(rows.iter().map(|r| (r.delta_norm, 100.0 * get(r))), color.stroke_width(2)))
                .map_err(plot_err)?
                .label(name)
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color));
        }
        eff.configure_series_labels()
            .position(SeriesLabelPosition::LowerLeft)
            .background_style(WHITE.mix(0.85))
            .border_style(BLACK)
            .draw()
            .map_err(plot_err)?;
        root.present().map_err(plot_err)?;
    }
    Ok(svg)
}
