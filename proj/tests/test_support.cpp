#include <doctest.h>

#include <cmath>
#include <random>

#include "genlab/population.hpp"
#include "genlab/quadrature.hpp"
#include "genlab/rng.hpp"
#include "genlab/simd.hpp"
#include "genlab/trainer.hpp"

using namespace genlab;

TEST_SUITE("support") {

TEST_CASE("seed derivation is deterministic and path dependent") {
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
    Rng a(7, {1, 2}), b(7, {1, 2});
    for (int k = 0; k < 100; ++k) CHECK(a.normal() == b.normal());
    const double cum[3] = {0.2, 0.7, 1.0};
    Rng c(3);
    int counts[3] = {0, 0, 0};
    for (int k = 0; k < 20000; ++k) ++counts[c.categorical(cum, 3)];
    CHECK(counts[1] / 20000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("Gauss-Legendre rule is exact for polynomials") {
    for (int count : {1, 2, 4, 8, 16}) {
        const QuadratureRule r = gauss_legendre01(count);
        double wsum = 0.0;
        for (double w : r.weights) wsum += w;
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
        for (int deg = 0; deg < 2 * count; ++deg) {
            double s = 0.0;
            for (int k = 0; k < count; ++k) s += r.weights[k] * std::pow(r.nodes[k], deg);
            CHECK(s == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-13));
        }
    }
}

TEST_CASE("population moment oracle") {
    const Population g = Population::gaussian_mean(0.5, 1.5);
    const Vec gm = gaussian_norm_moments({0.5}, {{2.25}}, 8);
    for (int k = 0; k <= 8; ++k) CHECK(g.moment_oracle(k) == doctest::Approx(gm[k]).epsilon(1e-12));
    // E(1 + Z^2) and E(1 + Z^2)^2 for Z ~ N(mu, s^2)
    const double m2 = 0.25 + 2.25, m4 = std::pow(0.5, 4) + 6 * 0.25 * 2.25 + 3 * 2.25 * 2.25;
    CHECK(g.moment_oracle(1) == doctest::Approx(1.0 + m2));
    CHECK(g.moment_oracle(2) == doctest::Approx(1.0 + 2.0 * m2 + m4));

    const Population lin = Population::linear_gaussian({0.8, -0.4}, 0.3);
    Rng rng(19);
    const int N = 200000;
    for (int k : {1, 2}) {
        double s = 0.0, s2 = 0.0;
        Rng r(19, {static_cast<std::uint64_t>(k)});
        for (int i = 0; i < N; ++i) {
            const double v = std::pow(1.0 + lin.sample(r).norm2(), k);
            s += v;
            s2 += v * v;
        }
        const double mean = s / N;
        const double se = std::sqrt((s2 / N - mean * mean) / N);
        CHECK(std::fabs(mean - lin.moment_oracle(k)) <= 4.0 * se);
    }

    const Population fin = Population::finite({DataPoint{{}, 1.0}, DataPoint{{}, 2.0}}, {0.25, 0.75});
    CHECK(fin.moment_oracle(1) == doctest::Approx(0.25 * 2.0 + 0.75 * 5.0));
    CHECK(fin.moment_oracle(2) == doctest::Approx(0.25 * 4.0 + 0.75 * 25.0));
    CHECK_THROWS(Population::finite({DataPoint{{}, 1.0}}, {0.5}));
}

TEST_CASE("analytic population risk matches Monte Carlo") {
    const LossModel ep = LossModel::expected_param(ParamLoss::mean_squared(), 1);
    const Population pop = Population::gaussian_mean(0.3, 1.2);
    const ParamMeasure m = ParamMeasure::particles(1, {0.1, -0.5, 0.9});
    const auto exact = analytic_population_risk(ep, m, pop);
    REQUIRE(exact.has_value());
    Rng rng(23);
    double s = 0.0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) s += loss_value(ep, m, pop.sample(rng));
    CHECK(s / N == doctest::Approx(*exact).epsilon(0.01));
}

TEST_CASE("trainers are deterministic") {
    const LossModel ep = LossModel::expected_param(ParamLoss::mean_squared(), 1);
    GibbsConfig cfg;
    cfg.p = 4.0;
    cfg.U = Regularizer::make(1.0, 4.0);
    const DataMeasure nu = empirical_from_samples({DataPoint{{}, 0.2}, DataPoint{{}, -0.7}});
    const Trainer grid = Trainer::gibbs_grid(ep, cfg, make_gibbs_grid(cfg, 1, 65));
    CHECK(grid.train(nu).density() == grid.train(nu).density());
    MfldOptions opts;
    opts.particles = 64;
    opts.steps = 20;
    const Trainer mf = Trainer::mfld(ep, cfg, opts);
    CHECK(mf.train(nu, 4).points() == mf.train(nu, 4).points());
    CHECK(mf.train(nu, 4).points() != mf.train(nu, 5).points());
}

TEST_CASE("simd backends agree with the scalar kernels") {
    std::mt19937_64 gen(13);
    std::normal_distribution<double> nd;
    for (std::size_t n : {0, 1, 3, 4, 7, 16, 33, 1000}) {
        std::vector<double> a(n), b(n);
        for (auto& v : a) v = nd(gen);
        for (auto& v : b) v = nd(gen);
        for (auto be : {simd::Backend::scalar, simd::Backend::avx2, simd::Backend::neon}) {
            if (!simd::backend_available(be)) {
                CHECK_THROWS(simd::set_backend(be));
                continue;
            }
            simd::set_backend(be);
            CHECK(simd::dot(a.data(), b.data(), n) ==
                  doctest::Approx(simd::scalar::dot(a.data(), b.data(), n)).epsilon(1e-12).scale(1.0));
            CHECK(simd::sum(a.data(), n) == doctest::Approx(simd::scalar::sum(a.data(), n)).epsilon(1e-12).scale(1.0));
            CHECK(simd::max_abs_diff(a.data(), b.data(), n) == simd::scalar::max_abs_diff(a.data(), b.data(), n));
            std::vector<double> y1 = b, y2 = b;
            simd::axpy(0.7, a.data(), y1.data(), n);
            simd::scalar::axpy(0.7, a.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));
        }
    }
    simd::set_backend(simd::backend_available(simd::Backend::avx2) ? simd::Backend::avx2 : simd::Backend::scalar);
}

}
