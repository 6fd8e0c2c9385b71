#include <catch2/catch_amalgamated.hpp>
#include <cgoslab/mollify.hpp>
#include <cgoslab/potential.hpp>

using namespace cgoslab;

TEST_CASE("mollification reproduces constants exactly") {
    Grid3 g = Grid3::torus_cube(24, 1.0);
    Field3 f(g, cplx(3.5, -1.25));
    Field3 m = mollify_torus(f, 0.2);
    REQUIRE(max_abs_diff(m, f) < 1e-12);
}

TEST_CASE("mollification spreads support by at most eps") {
    Grid3 g = Grid3::torus_cube(48, 1.0);
    PotentialSpec p;
    p.balls = {{{0.0, 0.0, 0.0}, 0.3}};
    p.a_amplitude = {1.0, 0.0, 0.0};
    auto s = sample_potential(p, g);
    const double eps = 0.15;
    Field3 m = mollify_torus(s.A[0], eps);
    double outside = 0.0;
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t k = 0; k < g.n[2]; ++k) {
                const double r = std::sqrt(g.x(0, i) * g.x(0, i) +
                                           g.x(1, j) * g.x(1, j) +
                                           g.x(2, k) * g.x(2, k));
                if (r > 0.3 + eps + 1e-9)
                    outside = std::max(outside, std::abs(m(i, j, k)));
            }
    REQUIRE(outside < 1e-13);  // FFT roundoff only
    // mass is conserved: kernel is normalized by its discrete sum
    cplx mass0 = 0.0, mass1 = 0.0;
    for (std::size_t t = 0; t < g.size(); ++t) {
        mass0 += s.A[0].v[t];
        mass1 += m.v[t];
    }
    REQUIRE(std::abs(mass0 - mass1) < 1e-10 * std::abs(mass0));
}

TEST_CASE("mollified indicator converges to the indicator away from the jump") {
    Grid3 g = Grid3::torus_cube(64, 1.0);
    PotentialSpec p;
    p.balls = {{{0.0, 0.0, 0.0}, 0.4}};
    p.a_amplitude = {1.0, 0.0, 0.0};
    auto s = sample_potential(p, g);
    double prev = 1e9;
    for (double eps : {0.2, 0.1, 0.05}) {
        Field3 m = mollify_torus(s.A[0], eps);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.n[0]; ++i)
            for (std::size_t j = 0; j < g.n[1]; ++j)
                for (std::size_t k = 0; k < g.n[2]; ++k) {
                    const double r = std::sqrt(g.x(0, i) * g.x(0, i) +
                                               g.x(1, j) * g.x(1, j) +
                                               g.x(2, k) * g.x(2, k));
                    // compare only where the ball boundary is farther than eps
                    if (std::abs(r - 0.4) > eps + 1e-9)
                        worst = std::max(
                            worst, std::abs(m(i, j, k) - s.A[0](i, j, k)));
                }
        REQUIRE(worst < 1e-12);
        prev = worst;
    }
    (void)prev;
}
