#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qipf/core_kernel.hpp"

using namespace qipf;

namespace {

Signal sig(std::vector<double> xs) {
    Signal s;
    s.samples = std::move(xs);
    return s;
}

KernelConfig kc(double sigma) {
    KernelConfig c;
    c.sigma = sigma;
    return c;
}

}  // namespace

TEST_CASE("gaussian_kernel basic values") {
    CHECK(gaussian_kernel(0.0, 0.3) == 1.0);
    CHECK(gaussian_kernel(0.0, 2.5) == 1.0);
    for (double s : {0.2, 1.0, 3.0})
        CHECK(gaussian_kernel(s, s) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
}

TEST_CASE("gaussian_kernel is even and bounded") {
    oracles::RandomInstances gen(11);
    for (int i = 0; i < 200; ++i) {
        const double u = gen.uniform(-8.0, 8.0);
        const double s = gen.uniform(0.3, 3.0);
        const double v = gaussian_kernel(u, s);
        CHECK(gaussian_kernel(-u, s) == v);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("gaussian_kernel rejects bad input") {
    CHECK_THROWS_AS(gaussian_kernel(std::nan(""), 1.0), std::domain_error);
    CHECK_THROWS_AS(gaussian_kernel(std::numeric_limits<double>::infinity(), 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(gaussian_kernel(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(gaussian_kernel(0.0, -1.0), std::domain_error);
}

TEST_CASE("ipf point values") {
    CHECK(ipf(0.0, sig({0.0}), kc(1.0)) == 1.0);
    CHECK(ipf(0.0, sig({-1.0, 1.0}), kc(1.0)) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
}

TEST_CASE("ipf decays away from the data") {
    const Signal s = sig({-0.7, 0.1, 0.4, 1.3});
    const KernelConfig c = kc(0.5);
    const double center = ipf(0.1, s, c);
    CHECK(ipf(25.0, s, c) < center);
    // far-field decay: essentially zero 20 sigma beyond the data range
    const double far = 1.3 + 20.0 * c.sigma;
    CHECK(ipf(far, s, c) < 1e-10);
    CHECK(ipf(-far, s, c) < 1e-10);
}

TEST_CASE("ipf rejects empty sample sets") {
    CHECK_THROWS_AS(ipf(0.0, Signal{}, kc(1.0)), std::domain_error);
}

TEST_CASE("ipf stays in (0, 1]") {
    oracles::RandomInstances gen(12);
    for (int i = 0; i < 50; ++i) {
        const Signal s = sig(gen.samples());
        const KernelConfig c = kc(gen.uniform(0.2, 2.0));
        const double v = ipf(gen.uniform(-6.0, 6.0), s, c);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("information_potential degenerate cases") {
    CHECK(information_potential(sig({3.7}), kc(0.4)) == 1.0);
    CHECK(information_potential(sig({0.0, 0.0, 0.0}), kc(1.0)) == 1.0);
}

TEST_CASE("information_potential of {0,1} at sigma 1") {
    // 2x2 double sum with width sqrt(2): (2 + 2 e^{-1/4}) / 4
    const double expected = (2.0 + 2.0 * std::exp(-0.25)) / 4.0;
    CHECK(information_potential(sig({0.0, 1.0}), kc(1.0)) ==
          doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("information_potential equals mean of ipf at width sigma*sqrt(2)") {
    oracles::RandomInstances gen(13);
    for (int i = 0; i < 30; ++i) {
        const Signal s = sig(gen.samples());
        const KernelConfig c = kc(gen.uniform(0.2, 2.0));
        KernelConfig wide = c;
        wide.sigma = c.sigma * std::sqrt(2.0);
        double mean = 0.0;
        for (double xj : s.samples)
            mean += ipf(xj, s, wide);
        mean /= static_cast<double>(s.size());
        CHECK(information_potential(s, c) == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("translation invariance is exact for dyadic data and integer shifts") {
    // Samples on a 1/16 lattice shifted by integers reproduce the same
    // floating-point differences, so the result is bit-identical.
    std::vector<double> base;
    for (int i = -8; i <= 8; i += 3)
        base.push_back(static_cast<double>(i) / 16.0);
    const KernelConfig c = kc(0.7);
    for (int shift : {-5, 1, 7, 1024}) {
        std::vector<double> moved = base;
        for (double& v : moved)
            v += static_cast<double>(shift);
        for (double x : {0.25, -0.5, 0.8125}) {
            const double a = ipf(x, sig(base), c);
            const double b = ipf(x + static_cast<double>(shift), sig(moved), c);
            CHECK(a == b);
        }
    }
}

TEST_CASE("renyi_quadratic_entropy values and positivity") {
    CHECK(renyi_quadratic_entropy(sig({2.0}), kc(1.0)) == 0.0);
    CHECK(renyi_quadratic_entropy(sig({0.0, 0.0, 0.0}), kc(0.3)) == 0.0);
    const double expected = -std::log((2.0 + 2.0 * std::exp(-0.25)) / 4.0);
    CHECK(renyi_quadratic_entropy(sig({0.0, 1.0}), kc(1.0)) ==
          doctest::Approx(expected).epsilon(1e-14));

    oracles::RandomInstances gen(14);
    for (int i = 0; i < 40; ++i) {
        const Signal s = sig(gen.samples());
        CHECK(renyi_quadratic_entropy(s, kc(gen.uniform(0.2, 2.0))) >= 0.0);
    }
}
