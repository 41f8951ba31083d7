//! WebAssembly bindings for the demo page in `www/`.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js(e: mgl_core::MglError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Heatmap(demo::Curvatures);

#[wasm_bindgen]
impl Heatmap {
    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.0.n
    }

    /// Gauss curvature, row-major from the bottom row.
    pub fn k(&self) -> Vec<f64> {
        self.0.k.clone()
    }

    /// Normal curvature.
    pub fn kn(&self) -> Vec<f64> {
        self.0.kn.clone()
    }

    /// `|K_N| / |K|`, NaN where `K = 0`.
    pub fn ratio(&self) -> Vec<f64> {
        self.0.ratio.clone()
    }
}

#[wasm_bindgen]
pub fn curvature_heatmap(surface: &str, half: f64, n: usize) -> Result<Heatmap, JsError> {
    demo::curvatures(surface, half, n).map(Heatmap).map_err(js)
}

#[wasm_bindgen]
pub fn jacobian_scan(c: f64, r_max: f64, steps: usize, n: usize) -> Result<Vec<f64>, JsError> {
    demo::jacobian_scan(c, r_max, steps, n).map_err(js)
}

#[wasm_bindgen]
pub struct MseRun(demo::MseRun);

#[wasm_bindgen]
impl MseRun {
    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.0.n
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.0.iterations
    }

    #[wasm_bindgen(getter)]
    pub fn residual(&self) -> f64 {
        self.0.residual
    }

    #[wasm_bindgen(getter)]
    pub fn max_error(&self) -> f64 {
        self.0.max_error
    }

    pub fn error(&self) -> Vec<f64> {
        self.0.error.clone()
    }
}

#[wasm_bindgen]
pub fn solve_mse(surface: &str, half: f64, n: usize) -> Result<MseRun, JsError> {
    demo::mse(surface, half, n).map(MseRun).map_err(js)
}
