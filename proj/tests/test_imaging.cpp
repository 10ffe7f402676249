#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "scatter/imaging.hpp"
#include "scatter/specfun.hpp"

using namespace scatter;
using namespace scatter::imaging;
using namespace scatter::data;
using namespace scatter::forward;
using namespace scatter::geometry;

namespace {

const Complex kI{0.0, 1.0};

// Reference implementation: the plain triple loop of the discrete indicator.
double naive_indicator(const PhaselessTensor& pt, const Vec2& z, bool include_diagonal,
                       double phase_sign = 1.0) {
    auto dirs = uniform_directions(pt.inc_count);
    std::vector<Complex> e(pt.inc_count);
    for (int j = 0; j < pt.inc_count; ++j)
        e[j] = std::exp(kI * (phase_sign * pt.k * (z - pt.z0).dot(dirs.direction(j))));
    Complex s = 0.0;
    for (int i = 0; i < pt.obs_count; ++i)
        for (int j = 0; j < pt.inc_count; ++j)
            for (int l = 0; l < pt.inc_count; ++l) {
                if (!include_diagonal && l == j) continue;
                s += pt.at(i, j, l) * e[j] * std::conj(e[l]);
            }
    double w = (kTwoPi / pt.obs_count) * std::pow(kTwoPi / pt.inc_count, 2);
    return w * std::abs(s);
}

PhaselessTensor random_symmetric_tensor(double k, Vec2 z0, int M, int N,
                                        std::uint64_t seed) {
    PhaselessTensor pt{k, z0, M, N, std::vector<double>(std::size_t(M) * N * N)};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < N; ++j)
            for (int l = j; l < N; ++l) {
                double v = u(rng);
                pt.at(i, j, l) = v;
                pt.at(i, l, j) = v;
            }
    return pt;
}

FarFieldMatrix born_point_farfield(double k, int M, int N, Vec2 y0, Complex tau) {
    FarFieldMatrix ff{k, uniform_directions(M), uniform_directions(N),
                      Eigen::MatrixXcd(M, N)};
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < N; ++j) {
            Vec2 xh = ff.obs.direction(i), d = ff.inc.direction(j);
            ff.values(i, j) = tau * std::exp(kI * k * (d - xh).dot(y0));
        }
    return ff;
}

std::vector<Obstacle> single(ShapeKind kind, Vec2 center, BoundaryCondition bc) {
    std::vector<Obstacle> v;
    v.push_back({make_shape(kind, center, 1.0), std::move(bc)});
    return v;
}

}  // namespace

TEST_CASE("fast path reproduces the triple loop") {
    auto pt = random_symmetric_tensor(3.0, {0.5, -0.25}, 5, 6, 21);
    auto grid = make_grid(-2, 2, -2, 2, 7, 5);
    for (bool diag : {false, true}) {
        auto field = indicator_phaseless(pt, grid, diag);
        double scale = *std::max_element(field.values.begin(), field.values.end());
        for (std::size_t idx = 0; idx < grid.size(); ++idx) {
            double ref = naive_indicator(pt, grid.point(idx), diag);
            CHECK(std::abs(field.values[idx] - ref) < 1e-12 * (scale + 1.0));
        }
    }
}

TEST_CASE("zero tensor maps to the zero field") {
    PhaselessTensor pt{2.0, {0, 0}, 3, 4, std::vector<double>(48, 0.0)};
    auto field = indicator_phaseless(pt, make_grid(-1, 1, -1, 1, 5, 5));
    for (double v : field.values) CHECK(v == 0.0);
}

TEST_CASE("value at the reference point is the plain weighted sum") {
    auto pt = random_symmetric_tensor(4.0, {0.75, 0.5}, 4, 5, 22);
    auto grid = make_grid(0.75 - 1e-9, 0.75 + 1e-9, 0.5 - 1e-9, 0.5 + 1e-9, 2, 2);
    for (bool diag : {false, true}) {
        auto field = indicator_phaseless(pt, grid, diag);
        double expect = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 5; ++j)
                for (int l = 0; l < 5; ++l)
                    if (diag || l != j) expect += pt.at(i, j, l);
        expect *= (kTwoPi / 4) * std::pow(kTwoPi / 5, 2);
        CHECK(field.values[0] == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("phase-sign flip leaves the field unchanged") {
    auto pt = random_symmetric_tensor(5.0, {1.0, 2.0}, 3, 8, 23);
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
        Vec2 z(u(rng), u(rng));
        CHECK(naive_indicator(pt, z, false, +1.0) ==
              doctest::Approx(naive_indicator(pt, z, false, -1.0)).epsilon(1e-12));
    }
}

TEST_CASE("diagonal sensitivity bound") {
    auto pt = random_symmetric_tensor(3.5, {0, 0}, 4, 6, 25);
    double diag_mass = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 6; ++j) diag_mass += pt.at(i, j, j);
    diag_mass *= (kTwoPi / 4) * std::pow(kTwoPi / 6, 2);

    auto grid = make_grid(-2, 2, -2, 2, 9, 9);
    auto with = indicator_phaseless(pt, grid, true);
    auto without = indicator_phaseless(pt, grid, false);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(with.values[i] - without.values[i]) <= diag_mass * (1 + 1e-12));
}

TEST_CASE("decomposition identity on solver data") {
    double k = 5.0;
    Vec2 z0(0.0, -3.0);
    auto dirs = uniform_directions(64);
    auto ff = solve_farfield(single(ShapeKind::Apple, {0, 0},
                                    BoundaryCondition::dirichlet()),
                             k, dirs, dirs, 192);
    auto shifted = shift_to_reference(ff, z0);
    auto pt = assemble_phaseless(shifted);
    auto grid = make_grid(-1, 1, -1, 1, 41, 41);

    auto direct = indicator_phaseless(pt, grid, true);
    auto dec = indicator_decomposition(shifted, grid, z0);
    auto combined = combined_decomposition_field(dec);

    double scale = *std::max_element(direct.values.begin(), direct.values.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(direct.values[i] - combined.values[i]));
    CHECK(worst / scale < 1e-10);

    SUBCASE("parts have the advertised signs") {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(dec.boundary_term[i] >= 0.0);
            CHECK(dec.mirror_term[i] >= 0.0);
        }
    }
    SUBCASE("center term at z0 is the full double sum scaled by 4 pi") {
        auto gz0 = make_grid(z0.x() - 1e-12, z0.x() + 1e-12, z0.y() - 1e-12,
                             z0.y() + 1e-12, 2, 2);
        auto dz0 = indicator_decomposition(shifted, gz0, z0);
        double mass = shifted.values.cwiseAbs2().sum() * (kTwoPi / 64) * (kTwoPi / 64);
        CHECK(dz0.center_term[0] == doctest::Approx(4.0 * kPi * mass).epsilon(1e-12));
    }
    SUBCASE("zero matrix decomposes to zeros") {
        FarFieldMatrix zero{k, dirs, dirs, Eigen::MatrixXcd::Zero(64, 64)};
        auto dz = indicator_decomposition(zero, make_grid(-1, 1, -1, 1, 3, 3), z0);
        for (std::size_t i = 0; i < dz.boundary_term.size(); ++i) {
            CHECK(dz.boundary_term[i] == 0.0);
            CHECK(dz.mirror_term[i] == 0.0);
            CHECK(dz.center_term[i] == 0.0);
        }
    }
}

TEST_CASE("an obstacle and its point reflection are indistinguishable") {
    double k = 5.0;
    Vec2 z0(3.0, 1.0);
    auto dirs = uniform_directions(64);
    auto rho = BoundaryCondition::impedance(
        [](double t) { return Complex(2.0 + 0.5 * std::sin(t), 0.0); });

    auto kite = make_shape(ShapeKind::Kite, {0, 0});
    std::vector<Obstacle> original, mirrored;
    original.push_back({kite, rho});
    // the reflected curve evaluated at parameter t sits at 2 z0 - x(t), so
    // attaching the same rho(t) realizes the reflected impedance function
    mirrored.push_back({reflect_through(kite, z0), rho});

    auto grid = make_grid(-3, 3, -3, 3, 41, 41);
    auto field_d = indicator_phaseless(
        assemble_phaseless(
            shift_to_reference(solve_farfield(original, k, dirs, dirs, 256), z0)),
        grid);
    auto field_m = indicator_phaseless(
        assemble_phaseless(
            shift_to_reference(solve_farfield(mirrored, k, dirs, dirs, 256), z0)),
        grid);

    double scale = *std::max_element(field_d.values.begin(), field_d.values.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(field_d.values[i] - field_m.values[i]));
    CHECK(worst / scale < 1e-4);
}

TEST_CASE("point-scatterer closed forms") {
    double k = 5.0;
    Vec2 y0(0.5, 0.25);
    Complex tau(0.8, -0.4);

    SUBCASE("full-data indicator rides on J0 squared") {
        auto ff = born_point_farfield(k, 64, 64, y0, tau);
        auto probe = make_grid(y0.x() - 1e-12, y0.x() + 1e-12, y0.y() - 1e-12,
                               y0.y() + 1e-12, 2, 2);
        double c_fit = indicator_fulldata(ff, probe).values[0];

        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int trial = 0; trial < 100; ++trial) {
            Vec2 z(u(rng), u(rng));
            auto g = make_grid(z.x() - 1e-12, z.x() + 1e-12, z.y() - 1e-12,
                               z.y() + 1e-12, 2, 2);
            double val = indicator_fulldata(ff, g).values[0];
            double j0 = specfun::bessel_j0(k * (z - y0).norm());
            CHECK(std::abs(val - c_fit * j0 * j0) < 1e-8 * c_fit);
        }
    }

    SUBCASE("phaseless indicator peaks at the point and its mirror") {
        Vec2 z0(-2.0, -1.5);
        Vec2 mirror = 2.0 * z0 - y0;
        auto ff = born_point_farfield(k, 64, 64, y0, tau);
        auto pt = assemble_phaseless(shift_to_reference(ff, z0));
        auto grid = make_grid(-5.5, 1.5, -4.5, 1.5, 71, 61);
        auto field = indicator_phaseless(pt, grid);

        auto local_argmax = [&](const Vec2& center) {
            double best = -1.0;
            Vec2 arg{0, 0};
            for (std::size_t i = 0; i < grid.size(); ++i) {
                Vec2 p = grid.point(i);
                if ((p - center).norm() > 1.0) continue;
                if (field.values[i] > best) {
                    best = field.values[i];
                    arg = p;
                }
            }
            return arg;
        };
        double spacing = std::max(grid.dx(), grid.dy());
        CHECK((local_argmax(y0) - y0).norm() <= spacing * (1 + 1e-12));
        CHECK((local_argmax(mirror) - mirror).norm() <= spacing * (1 + 1e-12));
    }
}

TEST_CASE("full-data indicator basics") {
    FarFieldMatrix zero{4.0, uniform_directions(6), uniform_directions(6),
                        Eigen::MatrixXcd::Zero(6, 6)};
    auto f = indicator_fulldata(zero, make_grid(-1, 1, -1, 1, 4, 4));
    for (double v : f.values) CHECK(v == 0.0);

    auto shifted = shift_to_reference(zero, {1.0, 0.0});
    CHECK_THROWS_AS(indicator_fulldata(shifted, make_grid(-1, 1, -1, 1, 4, 4)),
                    std::invalid_argument);
}

TEST_CASE("full-data indicator rings around a solver obstacle") {
    double k = 5.0;
    auto dirs = uniform_directions(64);
    auto ff = solve_farfield(single(ShapeKind::Apple, {0, 0},
                                    BoundaryCondition::dirichlet()),
                             k, dirs, dirs, 192);
    auto grid = make_grid(-2, 2, -2, 2, 81, 81);
    auto field = indicator_fulldata(ff, grid);
    std::size_t arg = std::max_element(field.values.begin(), field.values.end()) -
                      field.values.begin();
    Vec2 peak = grid.point(arg);
    auto apple = make_shape(ShapeKind::Apple, {0, 0});
    double dist = 1e300;
    for (int i = 0; i < 2048; ++i)
        dist = std::min(dist, (peak - apple.point(kTwoPi * i / 2048.0)).norm());
    CHECK(dist <= 0.5 * kTwoPi / k);
}

TEST_CASE("realness of the inner sum") {
    SUBCASE("symmetric tensors give a real sum") {
        auto pt = random_symmetric_tensor(4.0, {1, 0}, 4, 7, 41);
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (int trial = 0; trial < 20; ++trial)
            CHECK(realness_check(pt, {u(rng), u(rng)}) < 1e-10);
    }
    SUBCASE("symmetric noise preserves it") {
        auto pt = random_symmetric_tensor(4.0, {1, 0}, 4, 7, 43);
        auto noisy = add_noise_phaseless(pt, {0.2, 44});
        CHECK(realness_check(noisy, {0.3, -1.2}) < 1e-10);
    }
    SUBCASE("an asymmetric tensor does not") {
        PhaselessTensor pt{3.0, {0, 0}, 1, 3, std::vector<double>(9, 0.0)};
        pt.at(0, 0, 1) = 1.0;
        CHECK(realness_check(pt, {0.7, 0.3}) > 0.1);
    }
}

TEST_CASE("metadata is required") {
    PhaselessTensor pt{0.0, {0, 0}, 2, 2, std::vector<double>(8, 1.0)};
    CHECK_THROWS_AS(indicator_phaseless(pt, make_grid(0, 1, 0, 1, 2, 2)),
                    std::invalid_argument);
}
