//! Slot-waveguide cross-section geometry: materials, the waveguide
//! specification, and rasterization onto a tensor-product mesh.
//!
//! Coordinate convention: x runs across the slot (the axis of the E-field
//! discontinuity), y is vertical, z is the propagation direction. The origin
//! sits at the slot centre unless the structure is translated.

mod mesh;
mod raster;

pub use mesh::{MeshOptions, MeshSpec, MIN_SLOT_CELLS};
#[cfg(test)]
pub(crate) use mesh::{fill_graded, fill_uniform};
pub use raster::{rasterize, PermittivityMap};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Optical material: a single real refractive index, optionally with a
/// transparency window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    pub refractive_index: f64,
    /// (lambda_min, lambda_max) in metres, when known.
    pub transparency_window: Option<(f64, f64)>,
}

impl Material {
    pub fn new(name: impl Into<String>, refractive_index: f64) -> Result<Self> {
        if !(refractive_index >= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "refractive index must be >= 1, got {refractive_index}"
            )));
        }
        Ok(Self { name: name.into(), refractive_index, transparency_window: None })
    }

    pub fn with_window(mut self, lambda_min: f64, lambda_max: f64) -> Result<Self> {
        if !(lambda_min > 0.0 && lambda_min < lambda_max) {
            return Err(Error::InvalidSpec(format!(
                "transparency window must be an ordered pair, got ({lambda_min}, {lambda_max})"
            )));
        }
        self.transparency_window = Some((lambda_min, lambda_max));
        Ok(self)
    }

    /// Relative permittivity n^2.
    pub fn eps(&self) -> f64 {
        self.refractive_index * self.refractive_index
    }

    pub fn transparent_at(&self, wavelength: f64) -> bool {
        match self.transparency_window {
            Some((lo, hi)) => wavelength >= lo && wavelength <= hi,
            None => true,
        }
    }
}

/// Built-in materials used by the reference designs.
pub mod materials {
    use super::Material;

    pub fn diamond() -> Material {
        Material::new("diamond", 2.4)
            .and_then(|m| m.with_window(225e-9, 20e-6))
            .expect("static material")
    }

    pub fn gap() -> Material {
        Material::new("GaP", 3.3)
            .and_then(|m| m.with_window(554e-9, 828e-9))
            .expect("static material")
    }

    pub fn silica() -> Material {
        Material::new("silica", 1.45)
            .and_then(|m| m.with_window(180e-9, 3.5e-6))
            .expect("static material")
    }

    pub fn air() -> Material {
        Material::new("air", 1.0).expect("static material")
    }

    /// Look up a built-in material by (case-insensitive) name.
    pub fn by_name(name: &str) -> Option<Material> {
        match name.to_ascii_lowercase().as_str() {
            "diamond" => Some(diamond()),
            "gap" => Some(gap()),
            "silica" => Some(silica()),
            "air" => Some(air()),
            _ => None,
        }
    }
}

/// Cross-section of a slot waveguide: two high-index rods of size
/// `rod_width` x `rod_height` separated by a `slot_width` gap, with an
/// optional diamond bridge spanning the slot. The cladding is matched to the
/// slot material. All lengths in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotWaveguideSpec {
    pub slot_width: f64,
    pub rod_width: f64,
    pub rod_height: f64,
    /// Bridge height b (0 < b <= rod_height). The bridge is a
    /// `slot_width` x b diamond beam centred in the slot.
    pub bridge_height: Option<f64>,
    pub rod_material: Material,
    /// Slot filling; the cladding is the same material.
    pub slot_material: Material,
    pub wavelength: f64,
    /// Centre of the slot (and of the bridge, when present).
    pub center: (f64, f64),
}

impl SlotWaveguideSpec {
    pub fn new(
        rod_material: Material,
        slot_material: Material,
        slot_width: f64,
        rod_width: f64,
        rod_height: f64,
        wavelength: f64,
    ) -> Result<Self> {
        let spec = Self {
            slot_width,
            rod_width,
            rod_height,
            bridge_height: None,
            rod_material,
            slot_material,
            wavelength,
            center: (0.0, 0.0),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_bridge(mut self, bridge_height: f64) -> Result<Self> {
        self.bridge_height = Some(bridge_height);
        self.validate()?;
        Ok(self)
    }

    pub fn translated(mut self, dx: f64, dy: f64) -> Self {
        self.center.0 += dx;
        self.center.1 += dy;
        self
    }

    /// Cladding is matched to the slot material by construction.
    pub fn cladding_material(&self) -> &Material {
        &self.slot_material
    }

    /// Material of the bridge beam. Always diamond: the bridge exists to host
    /// a diamond colour centre inside the slot.
    pub fn bridge_material(&self) -> Material {
        materials::diamond()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.slot_width > 0.0 && self.rod_width > 0.0 && self.rod_height > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "slot/rod dimensions must be positive: w_s={}, w_r={}, h={}",
                self.slot_width, self.rod_width, self.rod_height
            )));
        }
        if !(self.wavelength > 0.0) {
            return Err(Error::InvalidSpec("wavelength must be positive".into()));
        }
        if let Some(b) = self.bridge_height {
            if !(b > 0.0) {
                return Err(Error::InvalidSpec("bridge height must be positive".into()));
            }
            if b > self.rod_height {
                return Err(Error::InvalidBridge { height: b, rod_height: self.rod_height });
            }
        }
        let (n_r, n_s) = (self.rod_material.refractive_index, self.slot_material.refractive_index);
        if !(n_r > n_s) {
            return Err(Error::InvalidSpec(format!(
                "rod index ({n_r}) must exceed slot index ({n_s}) for slot confinement"
            )));
        }
        Ok(())
    }

    /// Index contrast (n_R - n_S)/n_R.
    pub fn index_contrast(&self) -> f64 {
        let (n_r, n_s) = (self.rod_material.refractive_index, self.slot_material.refractive_index);
        (n_r - n_s) / n_r
    }

    /// Half extent of the structure in x: slot half-width plus one rod.
    pub fn half_width(&self) -> f64 {
        0.5 * self.slot_width + self.rod_width
    }

    /// Material at a point of the cross-section. Bridge paints over the slot;
    /// rods paint over the background.
    pub fn material_at(&self, x: f64, y: f64) -> Material {
        let (xr, yr) = (x - self.center.0, y - self.center.1);
        let half_slot = 0.5 * self.slot_width;
        let in_rod = xr.abs() > half_slot
            && xr.abs() < half_slot + self.rod_width
            && yr.abs() < 0.5 * self.rod_height;
        if in_rod {
            return self.rod_material.clone();
        }
        if let Some(b) = self.bridge_height {
            if xr.abs() < half_slot && yr.abs() < 0.5 * b {
                return self.bridge_material();
            }
        }
        self.slot_material.clone()
    }
}

/// Dipole reference point r0: the centre of the slot, which is also the
/// centre of the bridge when one is present.
pub fn locate_r0(spec: &SlotWaveguideSpec) -> (f64, f64) {
    spec.center
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond_air() -> SlotWaveguideSpec {
        SlotWaveguideSpec::new(
            materials::diamond(),
            materials::air(),
            20e-9,
            140e-9,
            110e-9,
            637e-9,
        )
        .unwrap()
    }

    #[test]
    fn r0_is_slot_center_for_symmetric_structure() {
        assert_eq!(locate_r0(&diamond_air()), (0.0, 0.0));
    }

    #[test]
    fn r0_is_bridge_center_with_bridge() {
        let spec = SlotWaveguideSpec::new(
            materials::diamond(),
            materials::air(),
            20e-9,
            120e-9,
            130e-9,
            637e-9,
        )
        .unwrap()
        .with_bridge(20e-9)
        .unwrap();
        // Bridge is centred in the slot, so r0 stays at the origin.
        assert_eq!(locate_r0(&spec), (0.0, 0.0));
        assert_eq!(spec.material_at(0.0, 0.0).name, "diamond");
    }

    #[test]
    fn r0_translates_with_the_structure() {
        let spec = diamond_air().translated(1.5e-7, -2.5e-8);
        assert_eq!(locate_r0(&spec), (1.5e-7, -2.5e-8));
    }

    #[test]
    fn bridge_taller_than_rod_is_rejected() {
        let err = diamond_air().with_bridge(120e-9).unwrap_err();
        assert!(matches!(err, Error::InvalidBridge { .. }));
    }

    #[test]
    fn zero_contrast_is_rejected() {
        let r = SlotWaveguideSpec::new(
            materials::air(),
            materials::air(),
            20e-9,
            140e-9,
            110e-9,
            637e-9,
        );
        assert!(r.is_err());
    }

    #[test]
    fn contrast_values_match_the_four_designs() {
        let c = |rod: Material, slot: Material| {
            SlotWaveguideSpec::new(rod, slot, 20e-9, 100e-9, 100e-9, 637e-9)
                .unwrap()
                .index_contrast()
        };
        // Two-decimal reference values; exact quotients are 0.697, 0.583,
        // 0.396, 0.273.
        assert!((c(materials::gap(), materials::air()) - 0.70).abs() < 0.01);
        assert!((c(materials::diamond(), materials::air()) - 0.59).abs() < 0.01);
        assert!((c(materials::diamond(), materials::silica()) - 0.40).abs() < 0.01);
        assert!((c(materials::gap(), materials::diamond()) - 0.28).abs() < 0.01);
    }

    #[test]
    fn material_lookup_paints_rods_over_background() {
        let spec = diamond_air();
        assert_eq!(spec.material_at(0.0, 0.0).name, "air");
        assert_eq!(spec.material_at(50e-9, 0.0).name, "diamond");
        assert_eq!(spec.material_at(50e-9, 80e-9).name, "air");
        assert_eq!(spec.material_at(200e-9, 0.0).name, "air");
    }
}
