#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qipf/signals.hpp"

using namespace qipf;

TEST_CASE("lorenz stays on the fixed point") {
    LorenzParams p;
    p.n_samples = 10;
    const double xf = std::sqrt(p.beta * (p.rho - 1.0));
    p.x0 = xf;
    p.y0 = xf;
    p.z0 = p.rho - 1.0;
    const Signal s = gen_lorenz(p);
    for (double v : s.samples)
        CHECK(v == doctest::Approx(xf).epsilon(1e-12));
}

TEST_CASE("lorenz initial derivative at the textbook start") {
    // dx/dt at t=0 with init (0, 1, 1.05) is sigma*(y-x) = 10
    LorenzParams p;
    p.dt = 1e-5;
    p.n_samples = 2;
    const Signal s = gen_lorenz(p);
    CHECK((s.samples[1] - s.samples[0]) / p.dt == doctest::Approx(10.0).epsilon(1e-3));
}

TEST_CASE("lorenz step-halving convergence") {
    // in the asymptotic regime the halved-step trajectory agrees to 1e-6
    // and the error contracts at the RK4 rate
    LorenzParams coarse;
    coarse.dt = 0.002;
    coarse.n_samples = 100;
    LorenzParams fine = coarse;
    fine.dt = coarse.dt / 2.0;
    fine.n_samples = 199;
    LorenzParams finer = coarse;
    finer.dt = coarse.dt / 4.0;
    finer.n_samples = 397;
    const Signal a = gen_lorenz(coarse);
    const Signal b = gen_lorenz(fine);
    const Signal d = gen_lorenz(finer);
    double err_ab = 0.0, err_bd = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(oracles::close_rel(a.samples[i], b.samples[2 * i], 1e-6, 1e-6));
        err_ab = std::max(err_ab, std::fabs(a.samples[i] - b.samples[2 * i]));
        err_bd = std::max(err_bd, std::fabs(b.samples[2 * i] - d.samples[4 * i]));
    }
    // fourth-order contraction (allow slack for higher-order terms)
    CHECK(err_ab / err_bd > 8.0);
}

TEST_CASE("lorenz stays finite over long runs") {
    LorenzParams p;
    p.n_samples = 5000;
    const Signal s = gen_lorenz(p);
    REQUIRE(s.size() == 5000);
    for (double v : s.samples)
        CHECK(std::isfinite(v));
}

TEST_CASE("mackey-glass holds its equilibrium") {
    // alpha x/(1+x^n) = beta x has the positive root x* with x*^n = alpha/beta - 1;
    // solve it numerically by bisection before asserting the trajectory.
    MackeyGlassParams p;
    p.n_samples = 1000;
    const auto residual = [&](double x) {
        return p.alpha * x / (1.0 + std::pow(x, p.n_exp)) - p.beta * x;
    };
    double lo = 0.5, hi = 2.0;
    REQUIRE(residual(lo) > 0.0);
    REQUIRE(residual(hi) < 0.0);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) > 0.0 ? lo : hi) = mid;
    }
    const double xstar = 0.5 * (lo + hi);
    CHECK(xstar == doctest::Approx(1.0).epsilon(1e-10));  // alpha/beta = 2, so x*^10 = 1

    p.history_init = xstar;
    const Signal s = gen_mackey_glass(p);
    for (double v : s.samples)
        CHECK(v == doctest::Approx(xstar).epsilon(1e-8));
}

TEST_CASE("mackey-glass equilibrium holds for other exponents") {
    // with x(t - tau) = 1 the delayed drive is alpha/2 = beta for any n
    for (double n : {4.0, 10.0, 17.0}) {
        MackeyGlassParams p;
        p.n_exp = n;
        p.history_init = 1.0;
        p.n_samples = 200;
        const Signal s = gen_mackey_glass(p);
        for (double v : s.samples)
            CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("mackey-glass step-halving convergence") {
    MackeyGlassParams coarse;
    coarse.n_samples = 100;
    MackeyGlassParams fine = coarse;
    fine.dt = coarse.dt / 2.0;
    fine.n_samples = 199;
    const Signal a = gen_mackey_glass(coarse);
    const Signal b = gen_mackey_glass(fine);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(oracles::close_rel(a.samples[i], b.samples[2 * i], 1e-5, 1e-5));
}

TEST_CASE("mackey-glass stays finite over long runs") {
    MackeyGlassParams p;
    const Signal s = gen_mackey_glass(p);
    REQUIRE(s.size() == 5000);
    for (double v : s.samples)
        CHECK(std::isfinite(v));
}

TEST_CASE("sine sample count and phase") {
    const Signal s = gen_sine(100.0, 8000.0, 0.16);
    CHECK(s.size() == 1280);
    const Signal q = gen_sine(2000.0, 8000.0, 0.001);  // f0 = fs/4
    CHECK(q.samples[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("undersampled sine equals its alias up to sign") {
    const Signal a = gen_sine(300.0, 500.0, 0.2);
    const Signal b = gen_sine(200.0, 500.0, 0.2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a.samples[i] == doctest::Approx(-b.samples[i]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("sine mixture is the plain sum of components") {
    const std::vector<double> freqs = {300.0, 500.0};
    const Signal mix = gen_sine_mixture(freqs, 8000.0, 0.01);
    const Signal a = gen_sine(300.0, 8000.0, 0.01);
    const Signal b = gen_sine(500.0, 8000.0, 0.01);
    for (std::size_t i = 0; i < mix.size(); ++i)
        CHECK(mix.samples[i] == doctest::Approx(a.samples[i] + b.samples[i]).epsilon(1e-15));
}

TEST_CASE("normalize fixed points and hand case") {
    Signal pm;
    pm.samples = {-1.0, 1.0};
    const Signal pm_n = normalize(pm);
    CHECK(pm_n.samples[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(pm_n.samples[1] == doctest::Approx(1.0).epsilon(1e-14));

    Signal two;
    two.samples = {0.0, 2.0};
    const Signal two_n = normalize(two);
    CHECK(two_n.samples[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(two_n.samples[1] == doctest::Approx(1.0).epsilon(1e-14));

    Signal flat;
    flat.samples = {4.0, 4.0, 4.0};
    CHECK_THROWS_AS(normalize(flat), std::domain_error);
}

TEST_CASE("normalize is idempotent and hits its moments") {
    oracles::RandomInstances gen(41);
    Signal s;
    s.samples.resize(500);
    for (double& v : s.samples)
        v = gen.uniform(-3.0, 9.0);
    const Signal n1 = normalize(s);
    double mean = 0.0, var = 0.0;
    for (double v : n1.samples)
        mean += v;
    mean /= static_cast<double>(n1.size());
    for (double v : n1.samples)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(n1.size());
    CHECK(std::fabs(mean) < 1e-12);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    const Signal n2 = normalize(n1);
    for (std::size_t i = 0; i < n1.size(); ++i)
        CHECK(n2.samples[i] == doctest::Approx(n1.samples[i]).epsilon(1e-12));
}

TEST_CASE("scale multiplies samples") {
    Signal s;
    s.samples = {-2.0, 2.0};
    CHECK(scale(s, 0.5).samples == std::vector<double>{-1.0, 1.0});
    CHECK(scale(s, 1.0).samples == s.samples);
    CHECK(scale(s, 0.0).samples == std::vector<double>{0.0, 0.0});
}

namespace {

Signal noise_carrier(std::size_t n) {
    Signal s;
    s.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        s.samples[i] = std::sin(0.05 * static_cast<double>(i)) + 1.2;
    return s;
}

}  // namespace

TEST_CASE("add_noise no-noise sentinel and untouched regions") {
    const Signal s = noise_carrier(300);
    NoiseSchedule sched;
    sched.rng_seed = 7;
    sched.intervals = {{100, 150, std::numeric_limits<double>::infinity()},
                       {150, 220, 10.0}};
    const Signal noisy = add_noise(s, sched);
    for (std::size_t i = 0; i < 150; ++i)
        CHECK(noisy.samples[i] == s.samples[i]);  // sentinel interval + before
    for (std::size_t i = 220; i < 300; ++i)
        CHECK(noisy.samples[i] == s.samples[i]);
    bool changed = false;
    for (std::size_t i = 150; i < 220; ++i)
        changed = changed || noisy.samples[i] != s.samples[i];
    CHECK(changed);
}

TEST_CASE("add_noise realizes the requested SNR on average") {
    const Signal s = noise_carrier(800);
    const double target_db = 20.4;
    double mean_db = 0.0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        NoiseSchedule sched;
        sched.rng_seed = seed;
        sched.intervals = {{600, 700, target_db}};
        const Signal noisy = add_noise(s, sched);
        double sp = 0.0, np = 0.0;
        for (std::size_t i = 600; i < 700; ++i) {
            sp += s.samples[i] * s.samples[i];
            const double d = noisy.samples[i] - s.samples[i];
            np += d * d;
        }
        mean_db += 10.0 * std::log10(sp / np);
    }
    mean_db /= 30.0;
    CHECK(std::fabs(mean_db - target_db) < 1.0);
}

TEST_CASE("doubling the amplitude quadruples the injected noise variance") {
    const Signal s = noise_carrier(400);
    const Signal s2 = scale(s, 2.0);
    NoiseSchedule sched;
    sched.rng_seed = 99;
    sched.intervals = {{100, 300, 12.0}};
    const Signal n1 = add_noise(s, sched);
    const Signal n2 = add_noise(s2, sched);
    double v1 = 0.0, v2 = 0.0;
    for (std::size_t i = 100; i < 300; ++i) {
        const double d1 = n1.samples[i] - s.samples[i];
        const double d2 = n2.samples[i] - s2.samples[i];
        v1 += d1 * d1;
        v2 += d2 * d2;
    }
    CHECK(v2 == doctest::Approx(4.0 * v1).epsilon(1e-12));
}

TEST_CASE("add_noise is deterministic and validates bounds") {
    const Signal s = noise_carrier(200);
    NoiseSchedule sched;
    sched.rng_seed = 5;
    sched.intervals = {{50, 120, 8.0}};
    const Signal a = add_noise(s, sched);
    const Signal b = add_noise(s, sched);
    CHECK(a.samples == b.samples);

    NoiseSchedule bad;
    bad.intervals = {{150, 250, 8.0}};
    CHECK_THROWS_AS(add_noise(s, bad), std::domain_error);
    NoiseSchedule gap;
    gap.intervals = {{10, 20, 8.0}, {30, 40, 8.0}};
    CHECK_THROWS_AS(add_noise(s, gap), std::domain_error);
}

TEST_CASE("generators are deterministic") {
    LorenzParams lp;
    lp.n_samples = 200;
    CHECK(gen_lorenz(lp).samples == gen_lorenz(lp).samples);
    MackeyGlassParams mp;
    mp.n_samples = 500;
    CHECK(gen_mackey_glass(mp).samples == gen_mackey_glass(mp).samples);
}
