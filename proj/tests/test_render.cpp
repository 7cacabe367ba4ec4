#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "rauzy/enumeration.hpp"
#include "rauzy/render.hpp"
#include "rauzy/rng.hpp"

namespace rauzy {
namespace {

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

// Barycentric coordinates of v with respect to the simplex, via Cramer.
std::vector<Rational> solve_in_simplex(const Simplex& s, const BaryPoint& v) {
    const int d = s.dim();
    std::vector<std::vector<Rational>> base(static_cast<std::size_t>(d),
                                            std::vector<Rational>(static_cast<std::size_t>(d)));
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            base[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                s.vertex(static_cast<std::size_t>(j))[static_cast<std::size_t>(i)];
        }
    }
    Rational det = rational_determinant(base);
    REQUIRE(det != 0);
    std::vector<Rational> coeffs(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        auto replaced = base;
        for (int i = 0; i < d; ++i) {
            replaced[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                v[static_cast<std::size_t>(i)];
        }
        coeffs[static_cast<std::size_t>(j)] = rational_determinant(replaced) / det;
    }
    return coeffs;
}

TEST_CASE("barycentric projection to the plane", "[render]") {
    Dimension d3(3);
    Point2D p1 = project_bary(BaryPoint::vertex(d3, 1));
    Point2D p2 = project_bary(BaryPoint::vertex(d3, 2));
    Point2D p3 = project_bary(BaryPoint::vertex(d3, 3));
    REQUIRE(p1.x == 0.0);
    REQUIRE(p1.y == 0.0);
    REQUIRE(p2.x == 1.0);
    REQUIRE(p2.y == 0.0);
    REQUIRE(p3.x == 0.5);
    REQUIRE(p3.y == kHalfSqrt3);

    Point2D center = project_bary(BaryPoint::barycenter(d3));
    REQUIRE(center.x == Catch::Approx(0.5));
    REQUIRE(center.y == Catch::Approx(kHalfSqrt3 / 3.0));

    REQUIRE_THROWS_AS(project_bary(BaryPoint::barycenter(Dimension(4))), std::invalid_argument);
}

TEST_CASE("subdivision cells", "[render]") {
    Dimension d3(3);
    auto depth1 = subdivide(d3, 1, Rational(0));
    REQUIRE(depth1.size() == 3);
    for (const Cell& cell : depth1) {
        REQUIRE(cell.word.size() == 1);
        REQUIRE(cell.volume == make_rational(1, 4));
        REQUIRE(cell.volume == nu(word_matrix(d3, cell.word)));
    }

    auto depth2 = subdivide(d3, 2, Rational(0));
    REQUIRE(depth2.size() == 9);
    Rational total;
    for (const Cell& cell : depth2) total += cell.volume;
    REQUIRE(total == make_rational(7, 12));

    // Volume floor prunes the six mixed cells (nu = 1/24 is not above it).
    auto pruned = subdivide(d3, 2, make_rational(1, 24));
    REQUIRE(pruned.size() == 3);
    for (const Cell& cell : pruned) REQUIRE(cell.volume == make_rational(1, 9));

    // When every child falls below the floor, the parent becomes the leaf.
    auto parents = subdivide(d3, 2, make_rational(1, 9));
    REQUIRE(parents.size() == 3);
    for (const Cell& cell : parents) REQUIRE(cell.word.size() == 1);
}

TEST_CASE("subdivision matches the level sums", "[render]") {
    Dimension d3(3);
    auto cells = subdivide(d3, 5, Rational(0));
    REQUIRE(cells.size() == 243);
    Rational total;
    for (const Cell& cell : cells) total += cell.volume;
    REQUIRE(total == exact_levels(d3, 5)[5].total);
}

TEST_CASE("cells nest inside their parents", "[render]") {
    Dimension d3(3);
    auto cells = subdivide(d3, 2, Rational(0));
    for (const Cell& cell : cells) {
        Word parent_word{cell.word[0]};
        Simplex parent = word_simplex(d3, parent_word);
        for (int j = 0; j < 3; ++j) {
            auto coeffs = solve_in_simplex(parent, cell.simplex.vertex(static_cast<std::size_t>(j)));
            Rational sum;
            for (const Rational& c : coeffs) {
                REQUIRE(c >= 0);
                sum += c;
            }
            REQUIRE(sum == 1);
        }
    }
}

TEST_CASE("subdivision validation and budget", "[render]") {
    Dimension d3(3);
    REQUIRE_THROWS_AS(subdivide(d3, 0, Rational(0)), std::invalid_argument);
    REQUIRE_THROWS_AS(subdivide(d3, 2, Rational(1)), std::invalid_argument);
    REQUIRE_THROWS_AS(subdivide(d3, 2, Rational(-1)), std::invalid_argument);
    REQUIRE_THROWS_AS(subdivide(d3, 14, Rational(0)), BudgetError);
}

TEST_CASE("fast 3d map agrees with the exact maps", "[render]") {
    Dimension d3(3);
    std::mt19937_64 engine(12345);
    for (int trial = 0; trial < 50; ++trial) {
        // Random rational point with denominator 360.
        long a = static_cast<long>(bounded_rand(engine, 359));
        long b = static_cast<long>(bounded_rand(engine, 359 - static_cast<std::uint64_t>(a)));
        std::vector<Rational> coords{make_rational(a + 1, 360), make_rational(b + 1, 360),
                                     make_rational(358 - a - b, 360)};
        BaryPoint exact(coords);
        std::array<double, 3> approx{to_double(coords[0]), to_double(coords[1]),
                                     to_double(coords[2])};
        for (int step = 0; step < 6; ++step) {
            Symbol j = 1 + static_cast<Symbol>(bounded_rand(engine, 3));
            exact = apply_map(d3, j, exact);
            detail::fast_map3(j, approx);
        }
        for (int i = 0; i < 3; ++i) {
            REQUIRE(approx[static_cast<std::size_t>(i)] ==
                    Catch::Approx(to_double(exact[static_cast<std::size_t>(i)])).margin(1e-12));
        }
    }
}

TEST_CASE("chaos game sampling", "[render]") {
    PointCloud cloud = chaos_game(2000, 100, 42, 30);
    REQUIRE(cloud.points.size() == 1900);
    REQUIRE(cloud.meta.scheme == "fixed-word");
    REQUIRE(cloud.meta.seed == 42);
    REQUIRE(cloud.meta.word_len == 30);

    PointCloud again = chaos_game(2000, 100, 42, 30);
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        REQUIRE(cloud.points[i].x == again.points[i].x);
        REQUIRE(cloud.points[i].y == again.points[i].y);
    }

    PointCloud orbit = chaos_game(2000, 100, 42, 0);
    REQUIRE(orbit.meta.scheme == "forward-orbit");
    REQUIRE(orbit.points.size() == 1900);

    // Every sample stays inside the projected simplex.
    for (const PointCloud* pc : {&cloud, &orbit}) {
        for (const Point2D& p : pc->points) {
            REQUIRE(p.y >= -1e-12);
            REQUIRE(p.y <= 2.0 * kHalfSqrt3 * p.x + 1e-9);
            REQUIRE(p.y <= 2.0 * kHalfSqrt3 * (1.0 - p.x) + 1e-9);
        }
    }

    REQUIRE_THROWS_AS(chaos_game(100, 100, 1, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(chaos_game(100, -1, 1, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(chaos_game(100, 10, 1, -2), std::invalid_argument);
}

TEST_CASE("box counting dimension estimates", "[render]") {
    // A single repeated point has zero box dimension.
    PointCloud singleton;
    singleton.points.assign(10, Point2D{0.3, 0.2});
    REQUIRE(box_count(singleton, 4, 10) == 0.0);

    // A filled square has dimension 2; deterministic pseudo-uniform samples.
    // Scales stay coarse enough that every box holds many of the 2x10^5
    // points, otherwise the count saturates and the slope flattens.
    PointCloud plane;
    std::mt19937_64 engine(271828);
    const double denom = static_cast<double>(1u << 30);
    for (int i = 0; i < 200000; ++i) {
        double x = static_cast<double>(bounded_rand(engine, 1u << 30)) / denom;
        double y = static_cast<double>(bounded_rand(engine, 1u << 30)) / denom;
        plane.points.push_back(Point2D{x, y * kHalfSqrt3});
    }
    double plane_slope = box_count(plane, 3, 7);
    REQUIRE(plane_slope > 1.95);
    REQUIRE(plane_slope < 2.05);

    // The gasket cloud lands strictly between dimension 1 and 2.
    PointCloud gasket = chaos_game(200000, 1000, 1, 40);
    double slope = box_count(gasket, 4, 10);
    REQUIRE(slope > 1.0);
    REQUIRE(slope < 2.0);

    REQUIRE_THROWS_AS(box_count(PointCloud{}, 4, 10), std::domain_error);
    REQUIRE_THROWS_AS(box_count(singleton, 1, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(box_count(singleton, 4, 15), std::invalid_argument);
    REQUIRE_THROWS_AS(box_count(singleton, 6, 6), std::invalid_argument);
}

TEST_CASE("svg documents", "[render]") {
    Dimension d3(3);
    auto cells = subdivide(d3, 2, Rational(0));
    std::string svg = svg_document(cells);
    REQUIRE(count_occurrences(svg, "<path d=\"M ") == 9);
    REQUIRE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1040\" height=\"907\"") !=
            std::string::npos);
    REQUIRE(svg.find("fill=\"#20435c\"") != std::string::npos);
    REQUIRE(svg.rfind("</svg>\n") == svg.size() - 7);
    REQUIRE(svg == svg_document(cells));

    std::string empty = svg_document(std::vector<Cell>{});
    REQUIRE(count_occurrences(empty, "<path") == 0);

    PointCloud cloud = chaos_game(500, 100, 9, 20);
    std::string dots = svg_document(cloud);
    REQUIRE(count_occurrences(dots, "<circle") == 400);

    SvgStyle outlined;
    outlined.stroke = "#000000";
    outlined.stroke_width = 0.5;
    std::string stroked = svg_document(cells, outlined);
    REQUIRE(stroked.find("stroke=\"#000000\"") != std::string::npos);
}

TEST_CASE("svg files are byte-stable", "[render]") {
    Dimension d3(3);
    auto cells = subdivide(d3, 3, Rational(0));
    const std::string path_a = "/tmp/rauzy_test_a.svg";
    const std::string path_b = "/tmp/rauzy_test_b.svg";
    write_svg(cells, path_a);
    write_svg(cells, path_b);
    std::ifstream a(path_a, std::ios::binary);
    std::ifstream b(path_b, std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    REQUIRE(sa.str() == sb.str());
    REQUIRE(count_occurrences(sa.str(), "<path") == 27);
    std::remove(path_a.c_str());
    std::remove(path_b.c_str());
}

TEST_CASE("rasterization", "[render]") {
    Dimension d3(3);
    auto cells = subdivide(d3, 1, Rational(0));
    Raster raster = rasterize(cells, 64, 2);
    REQUIRE(raster.width == 64);
    REQUIRE(raster.height == 64);
    REQUIRE(raster.rgb.size() == 64u * 64u * 3u);

    auto pixel = [&](int x, int y) {
        std::size_t base = (static_cast<std::size_t>(y) * 64u + static_cast<std::size_t>(x)) * 3u;
        return std::array<std::uint8_t, 3>{raster.rgb[base], raster.rgb[base + 1],
                                           raster.rgb[base + 2]};
    };

    // Corners lie outside the triangle and stay white.
    REQUIRE(pixel(0, 0) == std::array<std::uint8_t, 3>{255, 255, 255});
    REQUIRE(pixel(63, 0) == std::array<std::uint8_t, 3>{255, 255, 255});
    REQUIRE(pixel(63, 63) == std::array<std::uint8_t, 3>{255, 255, 255});

    // Each cell's centroid pixel is shaded.
    const double scale = 128.0 / 1.04;
    for (const Cell& cell : cells) {
        Triangle2D t = cell_triangle(cell);
        double cx = (t.a.x + t.b.x + t.c.x) / 3.0;
        double cy = (t.a.y + t.b.y + t.c.y) / 3.0;
        int px = static_cast<int>((cx + 0.02) * scale) / 2;
        int py = static_cast<int>((kHalfSqrt3 + 0.02 - cy) * scale) / 2;
        auto rgb = pixel(px, py);
        REQUIRE(rgb[0] < 255);
    }

    REQUIRE_THROWS_AS(rasterize(cells, 8, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(rasterize(cells, 64, 9), std::invalid_argument);
}

TEST_CASE("ppm files", "[render]") {
    Dimension d3(3);
    auto cells = subdivide(d3, 1, Rational(0));
    Raster raster = rasterize(cells, 64, 1);
    const std::string path = "/tmp/rauzy_test.ppm";
    write_ppm(raster, path);
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string data = ss.str();
    REQUIRE(data.rfind("P6\n64 64\n255\n", 0) == 0);
    REQUIRE(data.size() == 13 + 64u * 64u * 3u);
    std::remove(path.c_str());
}

}  // namespace
}  // namespace rauzy
