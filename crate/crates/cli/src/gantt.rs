//! Static SVG 1.1 Gantt charts: one lane per job, run segments shaded by
//! speed level, release and completion markers, and a machine strip where
//! idle time shows as an unshaded box. Labels are 1-based.

use std::fmt::Write as _;

use speedscale::metrics::Content;
use speedscale::{Instance, Rational, Schedule, ScheduleMetrics};

const LEFT: f64 = 60.0;
const WIDTH: f64 = 720.0;
const LANE: f64 = 28.0;
const BAR: f64 = 18.0;
const TOP: f64 = 20.0;

/// Fill for `level` out of `k`: light for slow, dark for fast.
fn shade(level: usize, k: usize) -> String {
    let t = if k <= 1 { 1.0 } else { level as f64 / (k - 1) as f64 };
    let g = (200.0 - 150.0 * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", g / 2, g, 255u8.saturating_sub(g / 4))
}

fn num(f: f64) -> String {
    let s = format!("{f:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Renders `schedule`; `metrics` must come from evaluating it on `instance`.
pub fn render(schedule: &Schedule, instance: &Instance, metrics: &ScheduleMetrics) -> String {
    let n = instance.n();
    let k = instance.profile().k();
    let horizon = schedule.segments.last().map(|s| s.end.clone()).unwrap_or_else(|| Rational::new(1, 1));
    let span = horizon.to_f64().max(f64::MIN_POSITIVE);
    let x = |t: &Rational| num(LEFT + WIDTH * t.to_f64() / span);
    let w = |a: &Rational, b: &Rational| num(WIDTH * (b.to_f64() - a.to_f64()) / span);
    let lane_y = |lane: usize| TOP + LANE * lane as f64;
    let height = lane_y(n + 1) + 30.0;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" font-family="monospace" font-size="11">"#,
        num(LEFT + WIDTH + 20.0),
        num(height)
    );
    for lane in 0..=n {
        let label = if lane < n { format!("J{}", lane + 1) } else { "cpu".to_string() };
        let _ = writeln!(out, r#"<text x="4" y="{}">{label}</text>"#, num(lane_y(lane) + BAR - 5.0));
    }
    for seg in &schedule.segments {
        let (lane, class, fill, title) = match seg.content {
            Content::Idle => (n, "idle", "none".to_string(), "idle".to_string()),
            Content::Run { job, level } => (
                job,
                "run",
                shade(level, k),
                format!("J{} at s{} = {}", job + 1, level + 1, instance.profile().speed(level)),
            ),
        };
        let _ = writeln!(
            out,
            r#"<rect class="{class}" x="{}" y="{}" width="{}" height="{}" fill="{fill}" stroke="dimgray" stroke-width="0.5"{}><title>{title}: [{}, {})</title></rect>"#,
            x(&seg.start),
            num(lane_y(lane)),
            w(&seg.start, &seg.end),
            num(BAR),
            if class == "idle" { r#" stroke-dasharray="3,2""# } else { "" },
            seg.start,
            seg.end
        );
        if let Content::Run { job, level } = seg.content {
            // Busy time on the machine strip, same shade.
            let _ = writeln!(
                out,
                r#"<rect class="busy" x="{}" y="{}" width="{}" height="{}" fill="{}"><title>J{}</title></rect>"#,
                x(&seg.start),
                num(lane_y(n)),
                w(&seg.start, &seg.end),
                num(BAR),
                shade(level, k),
                job + 1
            );
        }
    }
    for j in 0..n {
        let y0 = num(lane_y(j) - 3.0);
        let y1 = num(lane_y(j) + BAR + 3.0);
        let r = &instance.job(j).release;
        let _ = writeln!(
            out,
            r#"<line class="release" x1="{0}" y1="{y0}" x2="{0}" y2="{y1}" stroke="green" stroke-width="1.5"><title>r = {r}</title></line>"#,
            x(r)
        );
        let c = &metrics.completion[j];
        let _ = writeln!(
            out,
            r#"<line class="completion" x1="{0}" y1="{y0}" x2="{0}" y2="{y1}" stroke="red" stroke-width="1.5"><title>C = {c}</title></line>"#,
            x(c)
        );
    }
    let axis = lane_y(n + 1) + 4.0;
    let _ = writeln!(out, r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/>"#, num(LEFT), num(axis), num(LEFT + WIDTH));
    let _ = writeln!(out, r#"<text x="{}" y="{}">0</text>"#, num(LEFT), num(axis + 14.0));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{horizon}</text>"#, num(LEFT + WIDTH), num(axis + 14.0));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use speedscale::metrics::evaluate;
    use speedscale::{Job, SpeedProfile, Variant};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn single_job_one_rectangle() {
        let prof = SpeedProfile::new(vec![q(1, 1), q(2, 1)], vec![q(1, 1), q(4, 1)]).unwrap();
        let i = Instance::new(vec![Job::unit(q(0, 1))], prof, Variant::FlowEnergy).unwrap();
        let mut s = Schedule::default();
        s.push(q(0, 1), q(1, 1), Content::Run { job: 0, level: 0 });
        let m = evaluate(&s, &i, None).unwrap();
        let svg = render(&s, &i, &m);
        assert_eq!(svg.matches(r#"class="run""#).count(), 1);
        assert!(svg.contains(r#"class="run" x="60" y="20" width="720""#), "{svg}");
        assert!(!svg.contains(r#"class="idle""#));
        assert_eq!(svg, render(&s, &i, &m));
    }

    #[test]
    fn idle_is_unshaded() {
        let prof = SpeedProfile::new(vec![q(1, 1), q(2, 1)], vec![q(1, 1), q(4, 1)]).unwrap();
        let i = Instance::new(vec![Job::unit(q(0, 1)), Job::unit(q(3, 1))], prof, Variant::FlowEnergy).unwrap();
        let mut s = Schedule::default();
        s.push(q(0, 1), q(1, 1), Content::Run { job: 0, level: 0 });
        s.push(q(1, 1), q(3, 1), Content::Idle);
        s.push(q(3, 1), q(7, 2), Content::Run { job: 1, level: 1 });
        let m = evaluate(&s, &i, None).unwrap();
        let svg = render(&s, &i, &m);
        let idle = svg.lines().find(|l| l.contains(r#"class="idle""#)).unwrap();
        assert!(idle.contains(r#"fill="none""#));
        assert!(svg.contains("[1, 3)"));
    }
}
