//! Byte-stable assessment renders. Set `VISIM_BLESS=1` to regenerate the
//! golden files after an intentional change.

use std::path::PathBuf;

use visim_core::assessment::{render_amsler, render_contrast_chart, AmslerSpec, ContrastChartSpec};
use visim_core::io::encode_png;
use visim_core::ViewingGeometry;

fn check(name: &str, png: &[u8]) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("VISIM_BLESS").is_some() {
        std::fs::write(&path, png).unwrap();
        return;
    }
    let want = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(want == png, "{name} differs from golden file");
}

#[test]
fn amsler_default_geometry() {
    let frame = render_amsler(&AmslerSpec::new(ViewingGeometry::default())).unwrap();
    let png = encode_png(&frame).unwrap();
    assert_eq!(png, encode_png(&render_amsler(&AmslerSpec::new(ViewingGeometry::default())).unwrap()).unwrap());
    check("amsler_2560x1440_60cm.png", &png);
}

#[test]
fn contrast_chart_eight_rows() {
    let chart = render_contrast_chart(&ContrastChartSpec::new(800, 900, 8)).unwrap();
    check("contrast_800x900_8.png", &encode_png(&chart.frame).unwrap());
}
