#include "persistome/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "persistome/rng.hpp"

namespace persistome {

void PointCloud::validate() const {
    if (points.empty()) throw Error("invalid_cloud", "point cloud is empty");
    for (size_t i = 0; i < points.size(); ++i) {
        if (!points[i].finite())
            throw Error("invalid_cloud",
                        "non-finite coordinate at point " + std::to_string(i));
    }
}

namespace {

bool parse_double(std::string_view token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line, bool csv) {
    std::vector<std::string_view> fields;
    if (csv) {
        size_t start = 0;
        while (start <= line.size()) {
            size_t comma = line.find(',', start);
            if (comma == std::string_view::npos) {
                fields.push_back(trim(line.substr(start)));
                break;
            }
            fields.push_back(trim(line.substr(start, comma - start)));
            start = comma + 1;
        }
    } else {
        size_t pos = 0;
        auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
        while (pos < line.size()) {
            while (pos < line.size() && is_space(line[pos])) ++pos;
            size_t start = pos;
            while (pos < line.size() && !is_space(line[pos])) ++pos;
            if (pos > start) fields.push_back(line.substr(start, pos - start));
        }
    }
    return fields;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

[[noreturn]] void parse_fail(size_t line_no, const std::string& what) {
    throw Error("parse", "line " + std::to_string(line_no) + ": " + what);
}

Vec3 parse_vertex_line(std::string_view line, size_t line_no, bool csv) {
    auto fields = split_fields(line, csv);
    if (fields.size() < 3)
        parse_fail(line_no, "expected 3 numeric fields, got " + std::to_string(fields.size()));
    Vec3 p;
    double* coords[3] = {&p.x, &p.y, &p.z};
    for (int c = 0; c < 3; ++c) {
        if (!parse_double(trim(fields[c]), *coords[c]))
            parse_fail(line_no, "non-numeric token '" + std::string(fields[c]) + "'");
    }
    return p;
}

PointCloud parse_xyz_like(std::string_view text, bool csv) {
    PointCloud pc;
    auto lines = split_lines(text);
    bool header_allowed = csv;
    for (size_t i = 0; i < lines.size(); ++i) {
        std::string_view line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        if (header_allowed) {
            header_allowed = false;
            // a csv header row (x,y,z) is skipped if its first field is not numeric
            auto fields = split_fields(line, true);
            double dummy;
            if (!fields.empty() && !parse_double(trim(fields[0]), dummy)) continue;
        }
        pc.points.push_back(parse_vertex_line(line, i + 1, csv));
    }
    if (pc.points.empty()) throw Error("parse", "no points in input");
    pc.validate();
    return pc;
}

PointCloud parse_off(std::string_view text) {
    auto lines = split_lines(text);
    size_t i = 0;
    auto next_content = [&]() -> std::string_view {
        while (i < lines.size()) {
            std::string_view line = trim(lines[i]);
            ++i;
            if (!line.empty() && line.front() != '#') return line;
        }
        return {};
    };
    std::string_view header = next_content();
    if (header.empty()) throw Error("parse", "empty OFF input");
    size_t count_pos = 0;
    if (header == "OFF") {
        // counts on the following line
    } else if (header.substr(0, 3) == "OFF") {
        count_pos = 3; // single-line variant "OFF nv nf ne"
    } else {
        throw Error("parse", "line 1: missing OFF header");
    }
    std::string_view counts_line = count_pos ? header.substr(count_pos) : next_content();
    auto counts = split_fields(trim(counts_line), false);
    if (counts.size() < 2) throw Error("parse", "OFF counts line malformed");
    double nv_d = 0;
    if (!parse_double(counts[0], nv_d) || nv_d < 1)
        throw Error("parse", "OFF vertex count malformed");
    const size_t nv = static_cast<size_t>(nv_d);
    PointCloud pc;
    pc.points.reserve(nv);
    while (pc.points.size() < nv) {
        if (i >= lines.size())
            throw Error("parse", "OFF vertex block truncated: expected " +
                                     std::to_string(nv) + " vertices");
        std::string_view line = trim(lines[i]);
        size_t line_no = i + 1;
        ++i;
        if (line.empty() || line.front() == '#') continue;
        pc.points.push_back(parse_vertex_line(line, line_no, false));
    }
    // face block ignored
    pc.validate();
    return pc;
}

} // namespace

PointCloud parse_point_cloud(std::string_view text, CloudFormat format) {
    switch (format) {
    case CloudFormat::xyz: return parse_xyz_like(text, false);
    case CloudFormat::csv: return parse_xyz_like(text, true);
    case CloudFormat::off: return parse_off(text);
    }
    throw Error("parse", "unknown format");
}

PointCloud load_point_cloud(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    CloudFormat fmt = CloudFormat::xyz;
    auto dot = path.rfind('.');
    if (dot != std::string::npos) {
        std::string ext = path.substr(dot + 1);
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == "csv") fmt = CloudFormat::csv;
        else if (ext == "off") fmt = CloudFormat::off;
    }
    PointCloud pc = parse_point_cloud(buf.str(), fmt);
    pc.id = path;
    return pc;
}

void write_xyz(const PointCloud& pc, std::ostream& out) {
    char line[128];
    for (const auto& p : pc.points) {
        std::snprintf(line, sizeof(line), "%.17g %.17g %.17g\n", p.x, p.y, p.z);
        out << line;
    }
}

void save_xyz(const PointCloud& pc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write '" + path + "'");
    write_xyz(pc, out);
}

DistanceMatrix distance_matrix(const PointCloud& pc) {
    pc.validate();
    const size_t n = pc.size();
    DistanceMatrix d;
    d.n = n;
    d.entries.assign(n * n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const double v = distance(pc.points[i], pc.points[j]);
            d.entries[i * n + j] = v;
            d.entries[j * n + i] = v;
        }
    }
    return d;
}

namespace {

double directed_hausdorff(const PointCloud& a, const PointCloud& b) {
    double worst = 0.0;
    for (const auto& p : a.points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : b.points) best = std::min(best, distance(p, q));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

double hausdorff(const PointCloud& a, const PointCloud& b) {
    if (a.empty() || b.empty()) throw Error("empty_cloud", "hausdorff of empty cloud");
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

PointCloud random_sample(const PointCloud& pc, size_t k, uint64_t seed) {
    const size_t n = pc.size();
    if (k == 0) throw Error("bad_argument", "sample size k must be >= 1");
    if (k > n)
        throw Error("bad_argument", "sample size k=" + std::to_string(k) +
                                        " exceeds cloud size n=" + std::to_string(n));
    std::vector<uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    Rng rng(seed);
    // partial Fisher-Yates, then restore input order of the chosen points
    for (size_t i = 0; i < k; ++i) {
        const size_t j = i + static_cast<size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    PointCloud out;
    out.label = pc.label;
    out.id = pc.id;
    out.points.reserve(k);
    for (uint32_t i : idx) out.points.push_back(pc.points[i]);
    return out;
}

PointCloud perturb(const PointCloud& pc, double eps, uint64_t seed) {
    if (eps < 0.0) throw Error("bad_argument", "perturbation eps must be >= 0");
    pc.validate();
    PointCloud out = pc;
    if (eps == 0.0) return out;
    Rng rng(seed);
    for (auto& p : out.points) {
        // rejection sampling in the closed eps-ball keeps the bound exact
        Vec3 d;
        do {
            d = {rng.uniform(-eps, eps), rng.uniform(-eps, eps), rng.uniform(-eps, eps)};
        } while (d.dot(d) > eps * eps);
        p = p + d;
    }
    return out;
}

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

PointCloud shape_circle(size_t n, double radius) {
    PointCloud pc;
    pc.points.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        pc.points.push_back({radius * std::cos(t), radius * std::sin(t), 0.0});
    }
    return pc;
}

PointCloud shape_sphere(size_t n, double radius) {
    PointCloud pc;
    pc.points.reserve(n);
    const double golden = kPi * (1.0 + std::sqrt(5.0));
    for (size_t i = 0; i < n; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double phi = std::acos(1.0 - 2.0 * u);
        const double theta = golden * static_cast<double>(i);
        pc.points.push_back({radius * std::sin(phi) * std::cos(theta),
                             radius * std::sin(phi) * std::sin(theta),
                             radius * std::cos(phi)});
    }
    return pc;
}

PointCloud shape_torus(size_t n, double ring_radius, double tube_radius) {
    // grid aspect chosen so arc spacing roughly matches between the two angles
    size_t nu = static_cast<size_t>(std::lround(
        std::sqrt(static_cast<double>(n) * ring_radius / tube_radius)));
    nu = std::clamp<size_t>(nu, 1, n);
    while (nu > 1 && n % nu != 0) --nu; // exact grid covering n points
    const size_t nv = n / nu;
    PointCloud pc;
    pc.points.reserve(n);
    for (size_t i = 0; i < nu; ++i) {
        const double u = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(nu);
        for (size_t j = 0; j < nv; ++j) {
            const double v = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(nv);
            const double w = ring_radius + tube_radius * std::cos(v);
            pc.points.push_back({w * std::cos(u), w * std::sin(u), tube_radius * std::sin(v)});
        }
    }
    return pc;
}

PointCloud shape_eyeglass(size_t n, double radius, double neck) {
    // two circles centered at +-(R + neck/2); their inner extremes leave a
    // gap of width `neck` bridged by a short segment of points
    PointCloud pc;
    pc.points.reserve(n);
    size_t n_bridge = std::max<size_t>(2, n / 20);
    if (n < 8) n_bridge = 0;
    const size_t n_left = (n - n_bridge) / 2;
    const size_t n_right = n - n_bridge - n_left;
    const double cx = radius + neck / 2.0;
    for (size_t i = 0; i < n_left; ++i) {
        const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_left);
        pc.points.push_back({-cx + radius * std::cos(t), radius * std::sin(t), 0.0});
    }
    for (size_t i = 0; i < n_right; ++i) {
        const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_right);
        pc.points.push_back({cx + radius * std::cos(t), radius * std::sin(t), 0.0});
    }
    for (size_t i = 0; i < n_bridge; ++i) {
        const double s = n_bridge == 1
                             ? 0.5
                             : static_cast<double>(i) / static_cast<double>(n_bridge - 1);
        pc.points.push_back({-neck / 2.0 + neck * s, 0.0, 0.0});
    }
    return pc;
}

} // namespace

PointCloud generate_shape(ShapeKind kind, size_t n, const ShapeParams& params,
                          double noise, uint64_t seed) {
    if (n < 4) throw Error("bad_argument", "shape needs n >= 4 points");
    if (params.radius <= 0.0) throw Error("bad_argument", "radius must be > 0");
    if (noise < 0.0) throw Error("bad_argument", "noise must be >= 0");
    PointCloud pc;
    switch (kind) {
    case ShapeKind::circle: pc = shape_circle(n, params.radius); break;
    case ShapeKind::sphere: pc = shape_sphere(n, params.radius); break;
    case ShapeKind::torus:
        if (params.tube_radius <= 0.0 || params.tube_radius >= params.radius)
            throw Error("bad_argument", "torus requires 0 < tube radius < ring radius");
        pc = shape_torus(n, params.radius, params.tube_radius);
        break;
    case ShapeKind::eyeglass:
        if (params.neck <= 0.0) throw Error("bad_argument", "eyeglass neck must be > 0");
        pc = shape_eyeglass(n, params.radius, params.neck);
        break;
    }
    if (noise > 0.0) {
        Rng rng(seed);
        for (auto& p : pc.points) {
            p.x += noise * rng.normal();
            p.y += noise * rng.normal();
            p.z += noise * rng.normal();
        }
    }
    return pc;
}

ShapeKind shape_kind_from_name(std::string_view name) {
    if (name == "circle") return ShapeKind::circle;
    if (name == "sphere") return ShapeKind::sphere;
    if (name == "torus") return ShapeKind::torus;
    if (name == "eyeglass") return ShapeKind::eyeglass;
    throw Error("bad_argument", "unknown shape '" + std::string(name) + "'");
}

} // namespace persistome
