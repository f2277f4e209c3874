//! Procedural face-like test images.
//!
//! Each subject is an RGB portrait: a textured background of random
//! gratings, a skin-toned head ellipse with hair, eyes and a mouth. Captures
//! of the same subject differ by head position and size, exposure and
//! sensor noise, which gives mated comparisons a nonzero baseline error.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

use super::unit_interval;
use crate::error::{Error, Result};
use crate::imaging::{write_image, ImageBuffer};

struct Uniform(ChaCha8Rng);

impl Uniform {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * unit_interval(self.0.next_u64())
    }
}

struct Grating {
    fx: f64,
    fy: f64,
    phase: f64,
    amplitude: f64,
}

struct Subject {
    background: [f64; 3],
    gratings: Vec<Grating>,
    skin: [f64; 3],
    hair: [f64; 3],
    head: (f64, f64, f64, f64),
    eye_dx: f64,
    eye_y: f64,
    eye_r: f64,
    mouth_y: f64,
    mouth_w: f64,
}

impl Subject {
    fn new(seed: u64) -> Self {
        let mut u = Uniform::new(seed, 0);
        let background = [u.range(60.0, 200.0), u.range(60.0, 200.0), u.range(60.0, 200.0)];
        let gratings = (0..4)
            .map(|_| {
                let freq = u.range(0.03, 0.2);
                let angle = u.range(0.0, PI);
                Grating {
                    fx: freq * angle.cos(),
                    fy: freq * angle.sin(),
                    phase: u.range(0.0, 2.0 * PI),
                    amplitude: u.range(10.0, 30.0),
                }
            })
            .collect();
        let tone = u.range(0.0, 1.0);
        let skin = [140.0 + 90.0 * tone, 100.0 + 80.0 * tone, 70.0 + 70.0 * tone];
        let hair_level = u.range(15.0, 120.0);
        Subject {
            background,
            gratings,
            skin,
            hair: [hair_level, hair_level * 0.8, hair_level * 0.6],
            head: (u.range(-0.04, 0.04), u.range(-0.02, 0.06), u.range(0.22, 0.3), u.range(0.3, 0.38)),
            eye_dx: u.range(0.08, 0.12),
            eye_y: u.range(-0.1, -0.04),
            eye_r: u.range(0.025, 0.04),
            mouth_y: u.range(0.13, 0.19),
            mouth_w: u.range(0.07, 0.12),
        }
    }
}

fn inside_ellipse(x: f64, y: f64, cx: f64, cy: f64, rx: f64, ry: f64) -> bool {
    let (dx, dy) = ((x - cx) / rx, (y - cy) / ry);
    dx * dx + dy * dy <= 1.0
}

/// Head placement and exposure of one capture.
struct Pose {
    shift: (f64, f64),
    scale: f64,
    gain: f64,
}

const CANONICAL: Pose = Pose {
    shift: (0.0, 0.0),
    scale: 1.0,
    gain: 1.0,
};

fn render(subject: &Subject, width: usize, height: usize, pose: &Pose, noise: &mut Uniform, noise_amp: f64) -> ImageBuffer {
    let (hx, hy, hrx, hry) = subject.head;
    let (hx, hy) = (hx + pose.shift.0, hy + pose.shift.1);
    let mut data = Vec::with_capacity(width * height * 3);
    for row in 0..height {
        for col in 0..width {
            // coordinates in units of image width, origin at the center
            let x = (col as f64 - width as f64 / 2.0) / width as f64;
            let y = (row as f64 - height as f64 / 2.0) / width as f64;
            // face geometry scales about the head center
            let (x, y) = (hx + (x - hx) / pose.scale, hy + (y - hy) / pose.scale);
            let texture: f64 = subject
                .gratings
                .iter()
                .map(|g| g.amplitude * (2.0 * PI * (g.fx * col as f64 + g.fy * row as f64) + g.phase).sin())
                .sum();
            let mut rgb = subject.background.map(|b| b + texture);
            if inside_ellipse(x, y, hx, hy - hry * 0.25, hrx * 1.08, hry * 0.85) && y < hy {
                rgb = subject.hair;
            }
            if inside_ellipse(x, y, hx, hy, hrx, hry) && y >= hy - hry * 0.55 {
                let shade = 1.0 - 0.25 * ((x - hx) / hrx).powi(2);
                rgb = subject.skin.map(|s| s * shade);
                let eye_y = hy + subject.eye_y;
                for side in [-1.0, 1.0] {
                    let ex = hx + side * subject.eye_dx;
                    if inside_ellipse(x, y, ex, eye_y, subject.eye_r * 1.6, subject.eye_r) {
                        rgb = [235.0, 235.0, 235.0];
                    }
                    if inside_ellipse(x, y, ex, eye_y, subject.eye_r * 0.7, subject.eye_r * 0.7) {
                        rgb = [30.0, 25.0, 20.0];
                    }
                    if (y - (eye_y - subject.eye_r * 1.8)).abs() < 0.008 && (x - ex).abs() < subject.eye_r * 1.8 {
                        rgb = subject.hair;
                    }
                }
                if (x - hx).abs() < 0.012 && y > eye_y + 0.02 && y < hy + subject.mouth_y - 0.05 {
                    rgb = subject.skin.map(|s| s * 0.75);
                }
                if inside_ellipse(x, y, hx, hy + subject.mouth_y, subject.mouth_w, 0.022) {
                    rgb = [150.0, 50.0, 60.0];
                }
            }
            for v in rgb {
                let n = if noise_amp > 0.0 { noise.range(-noise_amp, noise_amp) } else { 0.0 };
                data.push((v * pose.gain + n).round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    ImageBuffer::new(width, height, 3, data).expect("buffer sized to the frame")
}

/// Canonical portrait of subject `seed`.
pub fn toy_face(seed: u64, width: usize, height: usize) -> ImageBuffer {
    let subject = Subject::new(seed);
    let mut noise = Uniform::new(seed, 1);
    render(&subject, width, height, &CANONICAL, &mut noise, 4.0)
}

/// Capture `capture` (≥ 1) of subject `seed`: same face, jittered head
/// position (±6% of the width), head size (±5%), exposure and noise.
pub fn toy_capture(seed: u64, capture: u64, width: usize, height: usize) -> ImageBuffer {
    let subject = Subject::new(seed);
    let mut jitter = Uniform::new(seed, 2 + 2 * capture);
    let pose = Pose {
        shift: (jitter.range(-0.06, 0.06), jitter.range(-0.06, 0.06)),
        gain: jitter.range(0.85, 1.15),
        scale: jitter.range(0.95, 1.05),
    };
    let mut noise = Uniform::new(seed, 3 + 2 * capture);
    render(&subject, width, height, &pose, &mut noise, 8.0)
}

/// Writes `count` portraits as `face_0000.png`, ... into `dir`.
pub fn write_toy_corpus(dir: &Path, count: usize, width: usize, height: usize, seed: u64) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    (0..count)
        .map(|i| {
            let path = dir.join(format!("face_{i:04}.png"));
            let subject = super::image_seed(seed, i as u64);
            write_image(&toy_face(subject, width, height), &path)?;
            Ok(path)
        })
        .collect()
}
