#include <catch2/catch_amalgamated.hpp>
#include <cgoslab/field.hpp>
#include <cgoslab/grid.hpp>
#include <cgoslab/stencil.hpp>

using namespace cgoslab;

TEST_CASE("torus lattice geometry") {
    Grid3 g = Grid3::torus_cube(8, 2.0);
    REQUIRE(g.size() == 512);
    REQUIRE(g.x(0, 0) == -2.0);
    REQUIRE(g.dx[0] == Catch::Approx(0.5));
    // last node + dx wraps to the origin
    REQUIRE(g.x(0, 7) + g.dx[0] == Catch::Approx(2.0));
}

TEST_CASE("slab lattice has exact face nodes") {
    Grid3 g = Grid3::slab(11, 6, 1.4, 1.0);
    REQUIRE(g.x(2, 0) == 0.0);
    REQUIRE(g.x(2, 5) == Catch::Approx(1.0).margin(1e-15));
    REQUIRE(g.x(0, 0) == -1.4);
    REQUIRE(g.x(0, 10) == Catch::Approx(1.4).margin(1e-15));
}

TEST_CASE("norms carry the volume weight") {
    Grid3 g = Grid3::torus_cube(4, 1.0);
    Field3 f(g, cplx(2.0, 0.0));
    // ||2||_{L2} over a box of volume 8
    REQUIRE(l2_norm(f) == Catch::Approx(2.0 * std::sqrt(8.0)));
    REQUIRE(sup_norm(f) == 2.0);
}

TEST_CASE("bounded stencil differentiates quadratics exactly") {
    Grid3 g = Grid3::slab(9, 9, 1.0, 1.0);
    Field3 f(g);
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t k = 0; k < g.n[2]; ++k) {
                const double x = g.x(0, i), y = g.x(1, j), z = g.x(2, k);
                f(i, j, k) = x * x + 3.0 * x * y - 2.0 * z * z + y;
            }
    Field3 dx = partial_bounded(f, 0);
    Field3 dz = partial_bounded(f, 2);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t k = 0; k < g.n[2]; ++k) {
                const double x = g.x(0, i), y = g.x(1, j), z = g.x(2, k);
                worst = std::max(worst,
                                 std::abs(dx(i, j, k) - (2.0 * x + 3.0 * y)));
                worst = std::max(worst, std::abs(dz(i, j, k) + 4.0 * z));
            }
    REQUIRE(worst < 1e-12);
}

TEST_CASE("mixed partials commute so curl of a gradient vanishes") {
    Grid3 g = Grid3::slab(7, 7, 1.0, 1.0);
    Field3 psi(g);
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t k = 0; k < g.n[2]; ++k)
                psi(i, j, k) = std::sin(2.0 * g.x(0, i)) *
                               std::cos(g.x(1, j)) *
                               std::exp(0.5 * g.x(2, k));
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            Field3 ab = partial_bounded(partial_bounded(psi, a), b);
            Field3 ba = partial_bounded(partial_bounded(psi, b), a);
            REQUIRE(max_abs_diff(ab, ba) < 1e-12);
        }
}

TEST_CASE("periodic stencil is exact on resolved plane waves") {
    Grid3 g = Grid3::torus_cube(32, 1.0);
    Field3 f(g);
    const double k0 = M_PI;  // one full period across the box
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t k = 0; k < g.n[2]; ++k)
                f(i, j, k) = std::exp(cplx(0.0, k0 * g.x(0, i)));
    Field3 d = partial_periodic(f, 0);
    // centered difference of e^{ikx} gives i sin(k dx)/dx * e^{ikx}
    const double keff = std::sin(k0 * g.dx[0]) / g.dx[0];
    double worst = 0.0;
    for (std::size_t t = 0; t < f.size(); ++t)
        worst = std::max(worst,
                         std::abs(d.v[t] - cplx(0.0, keff) * f.v[t]));
    REQUIRE(worst < 1e-12);
}
