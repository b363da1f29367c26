#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "htmsp/gray_frame.hpp"

namespace htmsp {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
Vec3 normalized(Vec3 v);

struct Triangle {
  Vec3 a, b, c;
};

using Mesh = std::vector<Triangle>;

enum class Shape { cone, cube, cylinder, sphere, torus, cross };

std::string_view shape_name(Shape shape);
/// Throws InputError for names outside the supported set.
Shape parse_shape(std::string_view name);

/// Triangle mesh centered at the origin, y up, fitting in a radius ~0.9 ball.
Mesh make_mesh(Shape shape);

/// Pinhole camera orbiting the origin.
struct OrbitCamera {
  double azimuth_deg = 0.0;
  double elevation_deg = 20.0;
  double distance = 3.2;
  double focal_scale = 1.4;  // focal length in units of image height
};

struct RenderStyle {
  std::uint8_t background = 30;
  double ambient = 60.0;
  double diffuse = 180.0;
  Vec3 light_dir{0.45, 0.85, 0.3};
};

/// Flat-shaded painter's-algorithm rasterization: triangles sorted far to
/// near and filled over the background, later (nearer) ones overwriting.
GrayFrame render_mesh(const Mesh& mesh, const OrbitCamera& camera, int width, int height,
                      const RenderStyle& style = {}, double scale = 1.0);

}  // namespace htmsp
