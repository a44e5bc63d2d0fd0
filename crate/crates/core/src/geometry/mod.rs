//! Planar geometry: points, polygons, meshes, quadrature and mesh generators.

mod clip;
mod generators;
mod io;
mod lines;
mod mesh;
mod point;
mod polygon;
mod quadrature;

pub use clip::clip_convex;
pub use generators::{gen_square_grid, gen_trapezoid_grid, gen_voronoi_lloyd};
pub use io::{mesh_to_json, parse_mesh_json, read_mesh, write_mesh};
pub use lines::{distinct_edge_lines, reentrant_lines, reentrant_weight, EdgeLines, LineEquation, ReentrantLines};
pub use mesh::{validate_mesh, Mesh, MeshReport};
pub use point::Point2;
pub use polygon::Polygon;
pub use quadrature::{polygon_quadrature, segment_quadrature, triangle_quadrature};
