//! Software raycaster: scenes, reflective shadow maps, G-buffers and images.

pub mod atrium;
mod buffers;
mod bvh;
mod image;
pub mod obj;
mod scene;
mod view;

pub use atrium::{atrium_mini, ATRIUM_MINI};
pub use buffers::{
    compose, direct_radiance, render_gbuffer, render_rsm, GBuffer, Rsm, DEFAULT_RSM_RESOLUTION, MIN_PROJECTED_COS,
};
pub use image::{diff_image, read_image, write_image, Image, ImageFormat};
pub use obj::load_obj;
pub use scene::{Aabb, Hit, Material, Scene, Triangle, RAY_EPSILON};
pub use view::{Camera, Perspective, SpotLight};

/// Loads `"atrium-mini"` or an OBJ file path.
pub fn load_scene(source: &str) -> crate::Result<Scene> {
    Scene::load(source)
}
