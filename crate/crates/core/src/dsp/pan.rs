use super::StereoFrame;
use std::f64::consts::PI;

/// Constant-power pan of a mono vocal sample toward azimuth `theta` (degrees,
/// left positive). Sources behind the listener pan like their mirror image
/// in front, so only interaural level is encoded.
pub fn spatialize_vox(vox: f64, theta: f64) -> StereoFrame {
    let front = if theta > 90.0 {
        180.0 - theta
    } else if theta < -90.0 {
        -180.0 - theta
    } else {
        theta
    };
    let phi = (90.0 - front.clamp(-90.0, 90.0)) * PI / 360.0;
    StereoFrame::new(vox * phi.cos(), vox * phi.sin())
}

/// Per-channel power shares of the pan law, summing to one.
pub fn pan_powers(theta: f64) -> (f64, f64) {
    let f = spatialize_vox(1.0, theta);
    (f.left * f.left, f.right * f.right)
}
