#pragma once

// Rasterizes a real 2-plane slice of an affine chart of P2. Each pixel is
// lifted to a projective point and shaded by its distance to the nearest
// accumulation line.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kleinian/io.hpp"

namespace kleinian {

/// chart k sets z_k = 1; the affine coordinates are the remaining two
/// homogeneous coordinates in index order. Slice directions and the offset
/// live in real coordinates (Re u, Im u, Re v, Im v) of that pair.
struct RenderSpec {
  int chart = 3;
  std::array<double, 4> dir_x{1, 0, 0, 0};
  std::array<double, 4> dir_y{0, 0, 1, 0};
  std::array<double, 4> offset{0, 0, 0, 0};
  double xmin = -2, xmax = 2, ymin = -2, ymax = 2;
  int width = 256, height = 256;
  double distance_scale = 0.01;
  std::string output;
};

/// Unit direction for "re1", "im1", "re2" or "im2".
inline std::array<double, 4> slice_axis(const std::string& name) {
  if (name == "re1") return {1, 0, 0, 0};
  if (name == "im1") return {0, 1, 0, 0};
  if (name == "re2") return {0, 0, 1, 0};
  if (name == "im2") return {0, 0, 0, 1};
  throw Error(ErrorCode::InvalidArgument, "unknown slice axis " + name);
}

inline double gram_determinant(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  double aa = 0, bb = 0, ab = 0;
  for (int i = 0; i < 4; ++i) {
    aa += a[i] * a[i];
    bb += b[i] * b[i];
    ab += a[i] * b[i];
  }
  return aa * bb - ab * ab;
}

inline void validate(const RenderSpec& s) {
  if (s.chart < 1 || s.chart > 3) throw Error(ErrorCode::InvalidArgument, "chart must be 1, 2 or 3");
  if (s.width < 16 || s.width > 8192 || s.height < 16 || s.height > 8192) {
    throw Error(ErrorCode::InvalidArgument, "width and height must lie in [16, 8192]");
  }
  if (!(s.distance_scale > 0.0) || !std::isfinite(s.distance_scale)) {
    throw Error(ErrorCode::InvalidArgument, "distance scale must be positive");
  }
  if (gram_determinant(s.dir_x, s.dir_y) <= 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "slice directions are dependent");
  }
  if (!(s.xmin < s.xmax) || !(s.ymin < s.ymax)) {
    throw Error(ErrorCode::InvalidArgument, "empty slice range");
  }
}

/// Column i, row j; row 0 is the top edge at ymax.
inline ProjPoint pixel_point(const RenderSpec& s, int i, int j) {
  const double x = s.xmin + (s.xmax - s.xmin) * i / (s.width - 1);
  const double y = s.ymax - (s.ymax - s.ymin) * j / (s.height - 1);
  double r[4];
  for (int k = 0; k < 4; ++k) r[k] = s.offset[k] + x * s.dir_x[k] + y * s.dir_y[k];
  const Complex u(r[0], r[1]), v(r[2], r[3]);
  Vec3 z;
  int slot = 0;
  for (int k = 0; k < 3; ++k) {
    if (k == s.chart - 1) {
      z[k] = 1.0;
    } else {
      z[k] = slot++ == 0 ? u : v;
    }
  }
  return ProjPoint(z);
}

inline std::uint8_t pixel_value(const ProjPoint& p, const std::vector<ProjLine>& lines,
                                double scale) {
  if (lines.empty()) return 0;
  double d = std::numeric_limits<double>::infinity();
  for (const ProjLine& l : lines) d = std::min(d, incidence_residual(p, l));
  return static_cast<std::uint8_t>(std::lround(255.0 * std::exp(-d / scale)));
}

struct Image {
  int width = 0, height = 0;
  std::vector<std::uint8_t> gray;  // row-major
};

inline Image rasterize(const RenderSpec& s, const std::vector<ProjLine>& lines) {
  validate(s);
  Image img{s.width, s.height,
            std::vector<std::uint8_t>(static_cast<std::size_t>(s.width) * s.height)};
  parallel_for(static_cast<std::size_t>(s.height), [&](std::size_t j) {
    for (int i = 0; i < s.width; ++i) {
      img.gray[j * s.width + i] =
          pixel_value(pixel_point(s, i, static_cast<int>(j)), lines, s.distance_scale);
    }
  });
  return img;
}

/// Binary P6 with equal RGB channels.
inline std::string encode_ppm(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.reserve(out.size() + img.gray.size() * 3);
  for (std::uint8_t g : img.gray) out.append(3, static_cast<char>(g));
  return out;
}

inline io::Json render_sidecar(const RenderSpec& s, const std::vector<ProjLine>& lines) {
  io::Json j;
  j["chart"] = s.chart;
  auto arr = [](const std::array<double, 4>& a) { return io::Json::array({a[0], a[1], a[2], a[3]}); };
  j["dir_x"] = arr(s.dir_x);
  j["dir_y"] = arr(s.dir_y);
  j["offset"] = arr(s.offset);
  j["range"] = io::Json::array({s.xmin, s.xmax, s.ymin, s.ymax});
  j["width"] = s.width;
  j["height"] = s.height;
  j["distance_scale"] = s.distance_scale;
  j["lines"] = io::to_json_list(lines);
  return j;
}

}  // namespace kleinian
