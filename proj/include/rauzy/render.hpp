#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "rauzy/enumeration.hpp"
#include "rauzy/gasket_core.hpp"
#include "rauzy/rng.hpp"

namespace rauzy {

inline constexpr double kHalfSqrt3 = 0.8660254037844386;

struct Point2D {
    double x = 0.0;
    double y = 0.0;
};

struct Triangle2D {
    Point2D a, b, c;
};

// Equilateral-triangle embedding of the d=3 simplex:
// e_1 -> (0,0), e_2 -> (1,0), e_3 -> (1/2, sqrt(3)/2).
inline Point2D project_bary(const BaryPoint& v) {
    if (v.dim() != 3) {
        throw std::invalid_argument("planar projection is defined for d=3 only");
    }
    double v2 = to_double(v[1]);
    double v3 = to_double(v[2]);
    return Point2D{v2 + 0.5 * v3, kHalfSqrt3 * v3};
}

struct Cell {
    Word word;
    Simplex simplex;
    Rational volume;
};

inline Triangle2D cell_triangle(const Cell& cell) {
    return Triangle2D{project_bary(cell.simplex.vertex(0)), project_bary(cell.simplex.vertex(1)),
                      project_bary(cell.simplex.vertex(2))};
}

// Volume-pruned covering generation: every word of length <= depth with
// nu > min_volume that is a leaf, meaning it has full length or all of its
// children fall below the cutoff.
inline std::vector<Cell> subdivide(Dimension d, int depth, const Rational& min_volume,
                                   const EnumOptions& opts = {}) {
    if (depth < 1) throw std::invalid_argument("subdivision depth must be >= 1");
    if (min_volume < 0 || min_volume >= 1) {
        throw std::invalid_argument("volume cutoff must lie in [0,1)");
    }
    std::uint64_t leaves = words_at_level(d, depth);
    if (leaves > opts.budget) {
        throw BudgetError("subdivision of " + std::to_string(leaves) +
                          " cells exceeds budget " + std::to_string(opts.budget));
    }

    std::vector<Cell> cells;
    std::vector<Symbol> prefix;
    std::vector<BigMatrix> stack;
    for (int i = 0; i <= depth; ++i) stack.emplace_back(d.value());
    stack[0] = BigMatrix::identity(d.value());
    std::vector<BigMatrix> generators;
    for (Symbol j = 1; j <= d.value(); ++j) generators.push_back(generator_matrix(d, j));

    auto emit = [&](int level, const Rational& volume) {
        Cell cell{Word(std::vector<Symbol>(prefix.begin(), prefix.end())),
                  Simplex::standard(d), volume};
        const BigMatrix& m = stack[static_cast<std::size_t>(level)];
        std::vector<BaryPoint> vertices;
        std::vector<BigInt> sums = column_norms(m);
        for (int j = 0; j < d.value(); ++j) {
            std::vector<Rational> coords(static_cast<std::size_t>(d.value()));
            for (int i = 0; i < d.value(); ++i) {
                coords[static_cast<std::size_t>(i)] =
                    make_rational(m.at(i, j), sums[static_cast<std::size_t>(j)]);
            }
            vertices.emplace_back(std::move(coords));
        }
        cell.simplex = Simplex(std::move(vertices));
        cells.push_back(std::move(cell));
    };

    auto dfs = [&](auto&& self, int level, const Rational& volume) -> void {
        if (level == depth) {
            emit(level, volume);
            return;
        }
        std::vector<Rational> child_volumes(static_cast<std::size_t>(d.value()));
        bool any_child = false;
        for (Symbol j = 1; j <= d.value(); ++j) {
            BigMatrix::multiply_into(stack[static_cast<std::size_t>(level)],
                                     generators[static_cast<std::size_t>(j - 1)],
                                     stack[static_cast<std::size_t>(level + 1)]);
            child_volumes[static_cast<std::size_t>(j - 1)] =
                nu(stack[static_cast<std::size_t>(level + 1)]);
            if (child_volumes[static_cast<std::size_t>(j - 1)] > min_volume) any_child = true;
        }
        if (!any_child) {
            emit(level, volume);
            return;
        }
        for (Symbol j = 1; j <= d.value(); ++j) {
            if (!(child_volumes[static_cast<std::size_t>(j - 1)] > min_volume)) continue;
            BigMatrix::multiply_into(stack[static_cast<std::size_t>(level)],
                                     generators[static_cast<std::size_t>(j - 1)],
                                     stack[static_cast<std::size_t>(level + 1)]);
            prefix.push_back(j);
            self(self, level + 1, child_volumes[static_cast<std::size_t>(j - 1)]);
            prefix.pop_back();
        }
    };
    dfs(dfs, 0, Rational(1));
    return cells;
}

struct CloudMeta {
    std::uint64_t seed = 0;
    long iterations = 0;
    long burn_in = 0;
    int word_len = 0;
    std::string scheme;
};

struct PointCloud {
    std::vector<Point2D> points;
    CloudMeta meta;
};

namespace detail {

// One projective step on a unit-sum double vector: image has coordinate j
// set to 1 before renormalizing by the norm 2 - v_j.
inline void fast_map3(int j, std::array<double, 3>& v) {
    double inv = 1.0 / (2.0 - v[static_cast<std::size_t>(j - 1)]);
    for (int i = 0; i < 3; ++i) v[static_cast<std::size_t>(i)] *= inv;
    v[static_cast<std::size_t>(j - 1)] = inv;
}

inline Point2D project3(const std::array<double, 3>& v) {
    return Point2D{v[1] + 0.5 * v[2], kHalfSqrt3 * v[2]};
}

}  // namespace detail

// Attractor sampler for d=3. word_len >= 1 selects the fixed-word scheme
// (each point is a fresh length-word_len composition applied to the
// barycenter, read right to left), which avoids the long dwell times near
// the parabolic vertex fixed points; word_len = 0 selects the plain forward
// orbit with burn-in.
inline PointCloud chaos_game(long iterations, long burn_in, std::uint64_t seed, int word_len) {
    if (burn_in < 0 || iterations <= burn_in) {
        throw std::invalid_argument("need iterations > burn_in >= 0");
    }
    if (word_len < 0) throw std::invalid_argument("word length must be >= 0");

    PointCloud cloud;
    cloud.meta.seed = seed;
    cloud.meta.iterations = iterations;
    cloud.meta.burn_in = burn_in;
    cloud.meta.word_len = word_len;
    cloud.meta.scheme = word_len > 0 ? "fixed-word" : "forward-orbit";
    cloud.points.reserve(static_cast<std::size_t>(iterations - burn_in));

    std::mt19937_64 engine(seed);
    if (word_len > 0) {
        std::vector<int> word(static_cast<std::size_t>(word_len));
        for (long p = 0; p < iterations - burn_in; ++p) {
            for (int& s : word) s = 1 + static_cast<int>(bounded_rand(engine, 3));
            std::array<double, 3> v{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
            for (int i = word_len - 1; i >= 0; --i) {
                detail::fast_map3(word[static_cast<std::size_t>(i)], v);
            }
            cloud.points.push_back(detail::project3(v));
        }
    } else {
        std::array<double, 3> v{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
        for (long step = 0; step < iterations; ++step) {
            detail::fast_map3(1 + static_cast<int>(bounded_rand(engine, 3)), v);
            if (step >= burn_in) cloud.points.push_back(detail::project3(v));
        }
    }
    return cloud;
}

// Least-squares slope of log2(occupied dyadic boxes) against scale index.
inline double box_count(const PointCloud& cloud, int k_min, int k_max) {
    if (k_min < 2 || k_max <= k_min || k_max > 14) {
        throw std::invalid_argument("box scales must satisfy 2 <= k_min < k_max <= 14");
    }
    if (cloud.points.empty()) throw std::domain_error("cannot estimate dimension of an empty cloud");

    double mean_k = 0.0, mean_y = 0.0;
    std::vector<double> ys;
    for (int k = k_min; k <= k_max; ++k) {
        double scale = static_cast<double>(1u << k);
        std::unordered_set<std::uint32_t> boxes;
        boxes.reserve(cloud.points.size() / 4 + 8);
        for (const Point2D& p : cloud.points) {
            double cx = std::clamp(p.x, 0.0, 1.0);
            double cy = std::clamp(p.y, 0.0, 1.0);
            auto ix = static_cast<std::uint32_t>(std::min(scale - 1.0, std::floor(cx * scale)));
            auto iy = static_cast<std::uint32_t>(std::min(scale - 1.0, std::floor(cy * scale)));
            boxes.insert((ix << 16) | iy);
        }
        double y = std::log2(static_cast<double>(boxes.size()));
        ys.push_back(y);
        mean_k += k;
        mean_y += y;
    }
    double count = static_cast<double>(k_max - k_min + 1);
    mean_k /= count;
    mean_y /= count;
    double cov = 0.0, var = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
        double dk = k - mean_k;
        cov += dk * (ys[static_cast<std::size_t>(k - k_min)] - mean_y);
        var += dk * dk;
    }
    return cov / var;
}

struct SvgStyle {
    std::string fill = "#20435c";
    std::string stroke = "none";
    double stroke_width = 0.0;
    double point_radius = 0.6;
};

namespace detail {

inline constexpr int kSvgScale = 1000;
inline constexpr double kSvgPad = 0.02;
inline constexpr int kSvgWidth = 1040;
inline constexpr int kSvgHeight = 907;

inline Point2D svg_coords(Point2D world) {
    return Point2D{(world.x + kSvgPad) * kSvgScale, (kHalfSqrt3 + kSvgPad - world.y) * kSvgScale};
}

inline std::string fixed3(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
}

inline std::string svg_header() {
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kSvgWidth) +
           "\" height=\"" + std::to_string(kSvgHeight) + "\" viewBox=\"0 0 " +
           std::to_string(kSvgWidth) + " " + std::to_string(kSvgHeight) + "\">\n";
    out += "<rect width=\"" + std::to_string(kSvgWidth) + "\" height=\"" +
           std::to_string(kSvgHeight) + "\" fill=\"#ffffff\"/>\n";
    return out;
}

inline std::string svg_path_attrs(const SvgStyle& style) {
    std::string attrs = " fill=\"" + style.fill + "\"";
    if (style.stroke != "none" && style.stroke_width > 0.0) {
        attrs += " stroke=\"" + style.stroke + "\" stroke-width=\"" +
                 fixed3(style.stroke_width) + "\"";
    }
    return attrs;
}

}  // namespace detail

inline std::string svg_document(const std::vector<Cell>& cells, const SvgStyle& style = {}) {
    std::string out = detail::svg_header();
    std::string attrs = detail::svg_path_attrs(style);
    for (const Cell& cell : cells) {
        Triangle2D t = cell_triangle(cell);
        Point2D a = detail::svg_coords(t.a);
        Point2D b = detail::svg_coords(t.b);
        Point2D c = detail::svg_coords(t.c);
        out += "<path d=\"M " + detail::fixed3(a.x) + " " + detail::fixed3(a.y) + " L " +
               detail::fixed3(b.x) + " " + detail::fixed3(b.y) + " L " + detail::fixed3(c.x) +
               " " + detail::fixed3(c.y) + " Z\"" + attrs + "/>\n";
    }
    out += "</svg>\n";
    return out;
}

inline std::string svg_document(const PointCloud& cloud, const SvgStyle& style = {}) {
    std::string out = detail::svg_header();
    for (const Point2D& p : cloud.points) {
        Point2D c = detail::svg_coords(p);
        out += "<circle cx=\"" + detail::fixed3(c.x) + "\" cy=\"" + detail::fixed3(c.y) +
               "\" r=\"" + detail::fixed3(style.point_radius) + "\" fill=\"" + style.fill +
               "\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

template <typename T>
inline void write_svg(const T& content, const std::string& path, const SvgStyle& style = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << svg_document(content, style);
    if (!out) throw std::runtime_error("failed writing " + path);
}

struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

// Coverage rasterizer: triangles are sampled on a supersampled boolean
// grid (orientation-robust edge tests, centroid always marked so subpixel
// cells stay visible), then box-averaged down to shaded pixels on white.
inline Raster rasterize(const std::vector<Cell>& cells, int side = 2048, int supersample = 2) {
    if (side < 16 || side > 8192) throw std::invalid_argument("raster side out of range");
    if (supersample < 1 || supersample > 4) throw std::invalid_argument("supersample out of range");

    const int grid = side * supersample;
    const double world_w = 1.0 + 2 * detail::kSvgPad;
    const double world_h = kHalfSqrt3 + 2 * detail::kSvgPad;
    const double scale = grid / std::max(world_w, world_h);

    auto to_grid = [&](Point2D p) {
        return Point2D{(p.x + detail::kSvgPad) * scale, (kHalfSqrt3 + detail::kSvgPad - p.y) * scale};
    };

    std::vector<std::uint8_t> mask(static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid), 0);
    auto mark = [&](int x, int y) {
        if (x >= 0 && y >= 0 && x < grid && y < grid) {
            mask[static_cast<std::size_t>(y) * static_cast<std::size_t>(grid) +
                 static_cast<std::size_t>(x)] = 1;
        }
    };

    for (const Cell& cell : cells) {
        Triangle2D t = cell_triangle(cell);
        Point2D a = to_grid(t.a), b = to_grid(t.b), c = to_grid(t.c);
        double area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if (area < 0) {
            std::swap(b, c);
            area = -area;
        }
        int x_lo = static_cast<int>(std::floor(std::min({a.x, b.x, c.x})));
        int x_hi = static_cast<int>(std::ceil(std::max({a.x, b.x, c.x})));
        int y_lo = static_cast<int>(std::floor(std::min({a.y, b.y, c.y})));
        int y_hi = static_cast<int>(std::ceil(std::max({a.y, b.y, c.y})));
        for (int y = y_lo; y <= y_hi; ++y) {
            for (int x = x_lo; x <= x_hi; ++x) {
                double px = x + 0.5, py = y + 0.5;
                double w0 = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
                double w1 = (c.x - b.x) * (py - b.y) - (c.y - b.y) * (px - b.x);
                double w2 = (a.x - c.x) * (py - c.y) - (a.y - c.y) * (px - c.x);
                if (w0 >= 0 && w1 >= 0 && w2 >= 0) mark(x, y);
            }
        }
        mark(static_cast<int>((a.x + b.x + c.x) / 3.0), static_cast<int>((a.y + b.y + c.y) / 3.0));
    }

    Raster raster;
    raster.width = side;
    raster.height = side;
    raster.rgb.resize(static_cast<std::size_t>(side) * static_cast<std::size_t>(side) * 3);
    const int fill_r = 0x20, fill_g = 0x43, fill_b = 0x5c;
    const int samples = supersample * supersample;
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            int covered = 0;
            for (int sy = 0; sy < supersample; ++sy) {
                for (int sx = 0; sx < supersample; ++sx) {
                    covered += mask[static_cast<std::size_t>(y * supersample + sy) *
                                        static_cast<std::size_t>(grid) +
                                    static_cast<std::size_t>(x * supersample + sx)];
                }
            }
            std::size_t base = (static_cast<std::size_t>(y) * static_cast<std::size_t>(side) +
                                static_cast<std::size_t>(x)) * 3;
            raster.rgb[base + 0] = static_cast<std::uint8_t>(255 + (fill_r - 255) * covered / samples);
            raster.rgb[base + 1] = static_cast<std::uint8_t>(255 + (fill_g - 255) * covered / samples);
            raster.rgb[base + 2] = static_cast<std::uint8_t>(255 + (fill_b - 255) * covered / samples);
        }
    }
    return raster;
}

inline void write_ppm(const Raster& raster, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "P6\n" << raster.width << " " << raster.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(raster.rgb.data()),
              static_cast<std::streamsize>(raster.rgb.size()));
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace rauzy
