#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "persistome/error.hpp"

namespace persistome {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Finite 3D point set. Coordinates are stored in 64-bit floats; distance
/// ties feed the filtration ordering downstream, so no precision is shed.
struct PointCloud {
    std::vector<Vec3> points;
    std::string label; ///< optional class name ("" = none)
    std::string id;    ///< optional identifier ("" = none)

    size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    /// Throws Error("invalid_cloud") on an empty cloud or non-finite coordinate.
    void validate() const;
};

enum class CloudFormat { xyz, csv, off };

/// Parse a point cloud from text.
///  - xyz: whitespace-separated "x y z" per line, '#' comments allowed
///  - csv: optional header, columns x,y,z
///  - off: standard OFF vertex block; faces and color fields skipped
/// Malformed input raises Error("parse") naming the line number.
PointCloud parse_point_cloud(std::string_view text, CloudFormat format);

/// Load from a file, picking the format from the extension
/// (.xyz, .csv, .off; anything else is treated as xyz).
PointCloud load_point_cloud(const std::string& path);

void write_xyz(const PointCloud& pc, std::ostream& out);
void save_xyz(const PointCloud& pc, const std::string& path);

/// Dense symmetric Euclidean distance matrix.
struct DistanceMatrix {
    size_t n = 0;
    std::vector<double> entries; ///< row-major n*n

    double operator()(size_t i, size_t j) const { return entries[i * n + j]; }
};

DistanceMatrix distance_matrix(const PointCloud& pc);

/// Symmetric Hausdorff distance: max of the two directed max-min distances.
/// Throws Error("empty_cloud") if either side is empty.
double hausdorff(const PointCloud& a, const PointCloud& b);

/// k points drawn uniformly without replacement, deterministic for a fixed
/// seed. Output preserves the input order of the chosen points.
/// Requires 1 <= k <= n.
PointCloud random_sample(const PointCloud& pc, size_t k, uint64_t seed);

/// Displace every point by an independent uniform vector of norm <= eps
/// (rejection-sampled in the closed ball, so hausdorff(pc, out) <= eps is
/// exact by construction). eps must be >= 0.
PointCloud perturb(const PointCloud& pc, double eps, uint64_t seed);

enum class ShapeKind { circle, sphere, torus, eyeglass };

struct ShapeParams {
    double radius = 1.0;      ///< circle/sphere/eyeglass radius; torus ring radius
    double tube_radius = 0.5; ///< torus only; must be < radius
    double neck = 0.3;        ///< eyeglass only: gap bridged between the two circles
};

/// Synthetic validation shapes:
///  - circle: n uniform angles on a radius-R circle in the z=0 plane
///  - sphere: Fibonacci lattice on a radius-R sphere
///  - torus: uniform parameter grid, ring radius R, tube radius r
///  - eyeglass: two circles of radius R centered at x = +-(R + neck/2)
///    joined by a short segment across the gap
/// Gaussian jitter of scale `noise` is added per coordinate afterwards.
PointCloud generate_shape(ShapeKind kind, size_t n, const ShapeParams& params,
                          double noise, uint64_t seed);

ShapeKind shape_kind_from_name(std::string_view name);

} // namespace persistome
