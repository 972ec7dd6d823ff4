use wasm_bindgen::prelude::*;

fn js(e: conserva::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct RunResult(crate::Simulation);

#[wasm_bindgen]
impl RunResult {
    #[wasm_bindgen(getter)]
    pub fn component(&self) -> String {
        self.0.component.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.0.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.0.values.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn exact(&self) -> Vec<f64> {
        self.0.exact.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn mass(&self) -> Vec<f64> {
        self.0.mass.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn entropy(&self) -> Vec<f64> {
        self.0.entropy.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn steps(&self) -> usize {
        self.0.steps
    }
}

#[wasm_bindgen(js_name = runCase)]
pub fn run_case(case: &str, scheme: &str, nx: usize, cfl: Option<f64>, detector: bool) -> Result<RunResult, JsError> {
    crate::simulate(case, scheme, nx, cfl, detector)
        .map(RunResult)
        .map_err(js)
}

/// Returns `[Φ0, Φ1, Φ2, f01, f12, f20 (recovered), f01, f12, f20 (Rusanov), circulation, spread]`.
#[wasm_bindgen(js_name = triangleFluxes)]
pub fn triangle_fluxes(vertices: &[f64], states: &[f64], model: &str) -> Result<Vec<f64>, JsError> {
    if vertices.len() != 6 || states.len() != 3 {
        return Err(JsError::new("expected six vertex coordinates and three states"));
    }
    let v = [
        [vertices[0], vertices[1]],
        [vertices[2], vertices[3]],
        [vertices[4], vertices[5]],
    ];
    let t = crate::triangle_fluxes(v, [states[0], states[1], states[2]], model).map_err(js)?;
    let mut out = Vec::with_capacity(11);
    out.extend(t.residuals);
    out.extend(t.recovered);
    out.extend(t.direct);
    out.extend([t.circulation, t.spread]);
    Ok(out)
}

/// Returns `[Φl, Φr, Φl corrected, Φr corrected, α, margin before, margin after]`.
#[wasm_bindgen(js_name = entropyStep)]
pub fn entropy_step(u_left: f64, u_right: f64) -> Result<Vec<f64>, JsError> {
    let s = crate::entropy_step(u_left, u_right).map_err(js)?;
    Ok(vec![
        s.residuals[0],
        s.residuals[1],
        s.corrected[0],
        s.corrected[1],
        s.alpha,
        s.pre_margin,
        s.post_margin,
    ])
}
