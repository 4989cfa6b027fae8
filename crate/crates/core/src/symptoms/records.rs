//! Parameter records, one per shader. Ranges follow the shader table;
//! sizes are fractions of the full-screen size unless a unit says otherwise.

use super::cvd::CvdType;
use super::floaters::FloaterColor;
use super::params::{param_record, ParamSpec};

param_record! {
    /// Degraded-resolution ellipse centered on the gaze.
    CentralLoss {
        /// Major axis, fraction of full screen.
        size: f64 = ParamSpec::number("size", 0.0, 1.0, 0.3).neutral(0.0).unit("full-screen"),
    }
}

param_record! {
    Hyperopia {
        /// Visual acuity; lower is blurrier.
        cpd: f64 = ParamSpec::number("cpd", 0.01, 30.0, 5.0).neutral(30.0).unit("cycles/degree"),
    }
}

param_record! {
    Cvd {
        kind: CvdType = ParamSpec::choice("type", CvdType::OPTIONS, "deutan"),
        severity: f64 = ParamSpec::number("severity", 0.0, 100.0, 100.0).neutral(0.0).unit("%"),
    }
}

param_record! {
    ContrastSens {
        brightness: f64 = ParamSpec::number("brightness", -1.0, 1.0, 0.0).neutral(0.0),
        contrast: f64 = ParamSpec::number("contrast", -1.0, 1.0, -0.5).neutral(0.0),
        gamma: f64 = ParamSpec::number("gamma", 0.0, 1.0, 1.0).neutral(1.0),
    }
}

param_record! {
    /// The tabulated shader has no parameters; `strength` scales the
    /// displacement and defaults to full.
    MetamorphPoint {
        strength: f64 = ParamSpec::number("strength", 0.0, 1.0, 1.0).neutral(0.0).extended(),
    }
}

param_record! {
    Nystagmus {
        /// Seconds to rise to the full amplitude.
        speed: f64 = ParamSpec::number("speed", 0.0, 1.0, 0.3).unit("s"),
        amplitude: f64 = ParamSpec::number("amplitude", 0.0, 20.0, 2.0).neutral(0.0).unit("% of width"),
    }
}

param_record! {
    Retinopathy {
        color: FloaterColor = ParamSpec::choice("color", FloaterColor::OPTIONS, "black"),
        opacity: f64 = ParamSpec::number("opacity", 0.0, 1.0, 0.8).neutral(0.0),
        density: f64 = ParamSpec::number("density", 0.0, 2500.0, 300.0).integer().neutral(0.0).unit("dots"),
        speed: f64 = ParamSpec::number("speed", 0.0, 1.0, 0.2),
        centering: bool = ParamSpec::boolean("centering", false),
        circle_radius: f64 = ParamSpec::number("circle_radius", 0.0, 1.0, 0.25).unit("full-screen"),
        /// Multiplier on the base floater radius.
        floater_size: f64 = ParamSpec::number("floater_size", 0.25, 4.0, 1.0).extended(),
    }
}

param_record! {
    Teichopsia {
        strength: f64 = ParamSpec::number("strength", 0.0, 1.0, 0.8).neutral(0.0),
    }
}

param_record! {
    MetamorphOverlay {
        speed: f64 = ParamSpec::number("speed", 0.0, 1.0, 0.2),
        frequency: f64 = ParamSpec::number("frequency", 0.0, 1.0, 0.3),
        amplitude: f64 = ParamSpec::number("amplitude", 0.0, 1.0, 0.3).neutral(0.0),
    }
}

param_record! {
    Glare {
        intensity: f64 = ParamSpec::number("intensity", 0.0, 1.0, 0.6).neutral(0.0),
        blur: f64 = ParamSpec::number("blur", 0.0, 1.0, 0.5),
        threshold: f64 = ParamSpec::number("threshold", 0.0, 1.0, 0.7),
    }
}

param_record! {
    /// Sharp tunnel around the gaze; `size = 1` keeps the whole screen sharp.
    PeripheralLoss {
        size: f64 = ParamSpec::number("size", 0.0, 1.0, 0.4).neutral(1.0).unit("full-screen"),
    }
}

param_record! {
    Cataract {
        severity: f64 = ParamSpec::number("severity", 0.0, 1.0, 0.5).neutral(0.0),
        frosting: f64 = ParamSpec::number("frosting", 0.0, 1.0, 0.3).neutral(0.0),
    }
}

param_record! {
    /// Disk whose content is replaced by its surround. The position is an
    /// offset from the gaze point.
    InFilling {
        size: f64 = ParamSpec::number("size", 0.0, 0.25, 0.05).neutral(0.0).unit("full-screen"),
        position_x: f64 = ParamSpec::number("position_x", -0.5, 0.5, 0.0).unit("full-screen").extended(),
        position_y: f64 = ParamSpec::number("position_y", -0.5, 0.5, 0.0).unit("full-screen").extended(),
    }
}

param_record! {
    DoubleVision {
        displacement: f64 = ParamSpec::number("displacement", 0.0, 0.25, 0.02).neutral(0.0).unit("full-screen"),
    }
}

param_record! {
    Distortion {
        radius: f64 = ParamSpec::number("radius", 0.0, 1.0, 0.25).unit("full-screen"),
        suction: f64 = ParamSpec::number("suction", 0.0, 1.0, 0.5).neutral(0.0),
        inner_radius: f64 = ParamSpec::number("inner_radius", 0.0, 1.0, 0.02).neutral(0.0).unit("full-screen"),
        noise: f64 = ParamSpec::number("noise", 0.0, 1.0, 0.2).neutral(0.0),
    }
}

param_record! {
    FovealDarkness {
        size: f64 = ParamSpec::number("size", 0.0, 1.0, 0.15).neutral(0.0).unit("full-screen"),
        fade: f64 = ParamSpec::number("fade", 0.0, 1.0, 0.5),
        opacity: f64 = ParamSpec::number("opacity", 0.0, 1.0, 0.8).neutral(0.0),
    }
}

param_record! {
    FlickeringStars {
        radius: f64 = ParamSpec::number("radius", 0.0, 1.0, 0.05).neutral(0.0).unit("full-screen"),
        fade: f64 = ParamSpec::number("fade", 0.0, 1.0, 0.5),
    }
}

param_record! {
    DetailLoss {
        /// Cluster count along the longer axis.
        clusters: f64 = ParamSpec::number("clusters", 10.0, 1000.0, 80.0).integer().neutral(1000.0),
    }
}
