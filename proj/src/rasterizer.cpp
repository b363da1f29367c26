#include "htmsp/rasterizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "htmsp/errors.hpp"

namespace htmsp {
namespace {

constexpr double kPi = std::numbers::pi;

void add_quad(Mesh& mesh, Vec3 a, Vec3 b, Vec3 c, Vec3 d) {
  mesh.push_back({a, b, c});
  mesh.push_back({a, c, d});
}

void add_box(Mesh& mesh, Vec3 lo, Vec3 hi) {
  const std::array<Vec3, 8> v = {{
      {lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
      {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z},
  }};
  add_quad(mesh, v[0], v[1], v[2], v[3]);
  add_quad(mesh, v[4], v[5], v[6], v[7]);
  add_quad(mesh, v[0], v[1], v[5], v[4]);
  add_quad(mesh, v[3], v[2], v[6], v[7]);
  add_quad(mesh, v[0], v[3], v[7], v[4]);
  add_quad(mesh, v[1], v[2], v[6], v[5]);
}

Vec3 ring_point(double radius, double angle, double y) {
  return {radius * std::cos(angle), y, radius * std::sin(angle)};
}

Mesh make_sphere(double radius, int slices, int stacks) {
  Mesh mesh;
  auto point = [&](int i, int j) {
    const double theta = 2.0 * kPi * i / slices;
    const double phi = kPi * j / stacks - kPi / 2.0;
    return Vec3{radius * std::cos(phi) * std::cos(theta), radius * std::sin(phi),
                radius * std::cos(phi) * std::sin(theta)};
  };
  for (int j = 0; j < stacks; ++j) {
    for (int i = 0; i < slices; ++i) {
      add_quad(mesh, point(i, j), point(i + 1, j), point(i + 1, j + 1), point(i, j + 1));
    }
  }
  return mesh;
}

Mesh make_frustum(double bottom_radius, double top_radius, double height, int segments) {
  Mesh mesh;
  const double y0 = -height / 2.0;
  const double y1 = height / 2.0;
  const Vec3 bottom_center{0.0, y0, 0.0};
  const Vec3 top_center{0.0, y1, 0.0};
  for (int i = 0; i < segments; ++i) {
    const double a0 = 2.0 * kPi * i / segments;
    const double a1 = 2.0 * kPi * (i + 1) / segments;
    const Vec3 b0 = ring_point(bottom_radius, a0, y0);
    const Vec3 b1 = ring_point(bottom_radius, a1, y0);
    const Vec3 t0 = ring_point(top_radius, a0, y1);
    const Vec3 t1 = ring_point(top_radius, a1, y1);
    if (top_radius > 0.0) {
      add_quad(mesh, b0, b1, t1, t0);
      mesh.push_back({top_center, t0, t1});
    } else {
      mesh.push_back({b0, b1, top_center});
    }
    mesh.push_back({bottom_center, b1, b0});
  }
  return mesh;
}

Mesh make_torus(double major, double minor, int rings, int sides) {
  Mesh mesh;
  auto point = [&](int i, int j) {
    const double u = 2.0 * kPi * i / rings;
    const double v = 2.0 * kPi * j / sides;
    const double r = major + minor * std::cos(v);
    return Vec3{r * std::cos(u), minor * std::sin(v), r * std::sin(u)};
  };
  for (int i = 0; i < rings; ++i) {
    for (int j = 0; j < sides; ++j) {
      add_quad(mesh, point(i, j), point(i + 1, j), point(i + 1, j + 1), point(i, j + 1));
    }
  }
  return mesh;
}

struct Projected {
  double x, y, depth;
};

}  // namespace

Vec3 normalized(Vec3 v) {
  const double len = std::sqrt(dot(v, v));
  return len > 0.0 ? v * (1.0 / len) : v;
}

std::string_view shape_name(Shape shape) {
  switch (shape) {
    case Shape::cone: return "cone";
    case Shape::cube: return "cube";
    case Shape::cylinder: return "cylinder";
    case Shape::sphere: return "sphere";
    case Shape::torus: return "torus";
    case Shape::cross: return "cross";
  }
  return "unknown";
}

Shape parse_shape(std::string_view name) {
  for (auto s : {Shape::cone, Shape::cube, Shape::cylinder, Shape::sphere, Shape::torus, Shape::cross}) {
    if (shape_name(s) == name) return s;
  }
  throw InputError("unknown shape class: " + std::string(name));
}

Mesh make_mesh(Shape shape) {
  switch (shape) {
    case Shape::cone: return make_frustum(0.75, 0.0, 1.5, 40);
    case Shape::cube: {
      Mesh mesh;
      add_box(mesh, {-0.6, -0.6, -0.6}, {0.6, 0.6, 0.6});
      return mesh;
    }
    case Shape::cylinder: return make_frustum(0.6, 0.6, 1.4, 40);
    case Shape::sphere: return make_sphere(0.85, 40, 24);
    case Shape::torus: {
      // tilted so the hole stays visible from low elevations
      Mesh mesh = make_torus(0.62, 0.24, 40, 16);
      const double c = std::cos(kPi / 3.0);
      const double s = std::sin(kPi / 3.0);
      for (auto& t : mesh) {
        for (Vec3* v : {&t.a, &t.b, &t.c}) *v = {v->x, c * v->y - s * v->z, s * v->y + c * v->z};
      }
      return mesh;
    }
    case Shape::cross: {
      Mesh mesh;
      add_box(mesh, {-0.9, -0.2, -0.2}, {0.9, 0.2, 0.2});
      add_box(mesh, {-0.2, -0.9, -0.2}, {0.2, 0.9, 0.2});
      return mesh;
    }
  }
  return {};
}

GrayFrame render_mesh(const Mesh& mesh, const OrbitCamera& camera, int width, int height,
                      const RenderStyle& style, double scale) {
  GrayFrame frame(width, height, style.background);
  const double az = camera.azimuth_deg * kPi / 180.0;
  const double el = camera.elevation_deg * kPi / 180.0;
  const Vec3 eye{camera.distance * std::cos(el) * std::sin(az), camera.distance * std::sin(el),
                 camera.distance * std::cos(el) * std::cos(az)};
  const Vec3 forward = normalized(Vec3{} - eye);
  const Vec3 right = normalized(cross(forward, Vec3{0.0, 1.0, 0.0}));
  const Vec3 up = cross(right, forward);
  const double focal = camera.focal_scale * height;
  const Vec3 light = normalized(style.light_dir);

  auto project = [&](Vec3 p) {
    const Vec3 rel = p * scale - eye;
    const double depth = dot(rel, forward);
    return Projected{width / 2.0 + focal * dot(rel, right) / depth,
                     height / 2.0 - focal * dot(rel, up) / depth, depth};
  };

  struct Face {
    std::array<Projected, 3> v;
    double depth;
    std::uint8_t shade;
  };
  std::vector<Face> faces;
  faces.reserve(mesh.size());
  for (const auto& t : mesh) {
    const Vec3 n = normalized(cross(t.b - t.a, t.c - t.a));
    const double lambert = std::abs(dot(n, light));
    const double value = std::clamp(style.ambient + style.diffuse * lambert, 0.0, 255.0);
    Face f{{project(t.a), project(t.b), project(t.c)}, 0.0, static_cast<std::uint8_t>(std::lround(value))};
    f.depth = (f.v[0].depth + f.v[1].depth + f.v[2].depth) / 3.0;
    if (f.v[0].depth <= 0.0 || f.v[1].depth <= 0.0 || f.v[2].depth <= 0.0) continue;
    faces.push_back(f);
  }
  std::stable_sort(faces.begin(), faces.end(), [](const Face& a, const Face& b) { return a.depth > b.depth; });

  for (const auto& f : faces) {
    const auto& [p0, p1, p2] = f.v;
    const double area = (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
    if (area == 0.0) continue;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({p0.x, p1.x, p2.x}))));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::max({p0.x, p1.x, p2.x}))));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({p0.y, p1.y, p2.y}))));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::max({p0.y, p1.y, p2.y}))));
    const double sign = area > 0.0 ? 1.0 : -1.0;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5;
        const double py = y + 0.5;
        const double e0 = sign * ((p1.x - p0.x) * (py - p0.y) - (p1.y - p0.y) * (px - p0.x));
        const double e1 = sign * ((p2.x - p1.x) * (py - p1.y) - (p2.y - p1.y) * (px - p1.x));
        const double e2 = sign * ((p0.x - p2.x) * (py - p2.y) - (p0.y - p2.y) * (px - p2.x));
        if (e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0) frame.at(x, y) = f.shade;
      }
    }
  }
  return frame;
}

}  // namespace htmsp
