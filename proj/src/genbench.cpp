#include "genlab/genbench.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "genlab/funcderiv.hpp"
#include "genlab/parallel.hpp"
#include "genlab/quadrature.hpp"
#include "genlab/rng.hpp"
#include "genlab/simd.hpp"

namespace genlab {

std::string to_string(Route r) {
    switch (r) {
        case Route::direct: return "direct";
        case Route::resampled: return "resampled";
        case Route::representation: return "representation";
        case Route::lge: return "lge";
        case Route::convex_lower: return "convex_lower";
        case Route::population_risk: return "population_risk";
    }
    return "";
}

GenEstimate summarize(const Vec& samples, int n, std::uint64_t seed, Route route) {
    GenEstimate e;
    e.n = n;
    e.seed = seed;
    e.route = route;
    e.replicates = static_cast<int>(samples.size());
    if (samples.empty()) return e;
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    e.value = mean;
    if (samples.size() >= 2) e.stderr_ = std::sqrt(ss / static_cast<double>(samples.size() - 1) / samples.size());
    return e;
}

namespace {

struct Replicate {
    std::vector<DataPoint> Z;
    DataPoint Zb1, Zb2;
    Rng rng;
    std::uint64_t train_seed;

    Replicate(const Population& pop, int n, std::uint64_t seed, std::size_t r)
        : rng(seed, {static_cast<std::uint64_t>(n), r}),
          train_seed(derive_seed(seed, {static_cast<std::uint64_t>(n), r, 0x7a11ULL})) {
        Z = pop.sample(rng, static_cast<std::size_t>(n));
        Zb1 = pop.sample(rng);
        Zb2 = pop.sample(rng);
    }
};

void check_common(const MonteCarloOptions& opts, int n) {
    if (opts.replicates < 2) throw std::invalid_argument("replicates must be >= 2");
    if (n < 1) throw std::invalid_argument("sample size n must be >= 1");
}

// Grid Gibbs trainer, or the constant trainer whose measure derivative is zero.
void require_gibbs(const Trainer& trainer, const char* what) {
    if (!trainer.is_gibbs() && trainer.kind() != Trainer::Kind::constant)
        throw std::invalid_argument(std::string(what) + " needs the grid Gibbs trainer");
}

double feature_mean(const LossModel& model, const ParamMeasure& m, const DataPoint& z) {
    return integrate_values(m, feature_on_support(model, m, z));
}

double population_risk(const LossModel& model, const ParamMeasure& m, const Population& pop, Rng& rng, int batch) {
    if (auto r = analytic_population_risk(model, m, pop)) return *r;
    double s = 0.0;
    for (int k = 0; k < batch; ++k) s += loss_value(model, m, pop.sample(rng));
    return s / batch;
}

Vec population_dm(const LossModel& model, const ParamMeasure& m, const std::vector<DataPoint>& batch,
                  const Population& pop) {
    if (auto d = analytic_population_dm(model, m, pop)) return *d;
    Vec out(m.size(), 0.0);
    const double w = 1.0 / static_cast<double>(batch.size());
    for (const auto& z : batch) {
        const Vec d = loss_dm_on_support(model, m, z);
        simd::axpy(w, d.data(), out.data(), out.size());
    }
    return out;
}

template <typename Fn>
std::vector<Vec> run_replicates(int count, int threads, int width, Fn fn) {
    std::vector<Vec> out(static_cast<std::size_t>(count), Vec(static_cast<std::size_t>(width), 0.0));
    parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t r) {
        try {
            fn(r, out[r]);
        } catch (const std::exception& e) {
            throw std::runtime_error("replicate " + std::to_string(r) + " failed: " + e.what());
        }
    });
    return out;
}

Vec column(const std::vector<Vec>& rows, std::size_t k) {
    Vec c(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) c[r] = rows[r][k];
    return c;
}

std::vector<Vec> gap_samples(const Trainer& trainer, const Population& pop, const LossModel& model, int n,
                             const MonteCarloOptions& opts) {
    check_common(opts, n);
    return run_replicates(opts.replicates, opts.threads, 1, [&](std::size_t r, Vec& out) {
        Replicate rep(pop, n, opts.seed, r);
        const DataMeasure nu = empirical_from_samples(rep.Z);
        const ParamMeasure m = trainer.train(nu, rep.train_seed);
        const double pop_risk = population_risk(model, m, pop, rep.rng, opts.batch_factor * n);
        out[0] = pop_risk - risk(model, m, nu);
    });
}

}  // namespace

GenEstimate wge_direct(const Trainer& trainer, const Population& pop, const LossModel& model, int n,
                       const MonteCarloOptions& opts) {
    return summarize(column(gap_samples(trainer, pop, model, n, opts), 0), n, opts.seed, Route::direct);
}

GenEstimate lge(const Trainer& trainer, const Population& pop, const LossModel& model, int n,
                const MonteCarloOptions& opts) {
    Vec g = column(gap_samples(trainer, pop, model, n, opts), 0);
    for (double& v : g) v *= v;
    return summarize(g, n, opts.seed, Route::lge);
}

namespace {

// columns: resampled difference, convex lower term
std::vector<Vec> resampled_samples(const Trainer& trainer, const Population& pop, const LossModel& model, int n,
                                   const MonteCarloOptions& opts) {
    check_common(opts, n);
    return run_replicates(opts.replicates, opts.threads, 2, [&](std::size_t r, Vec& out) {
        Replicate rep(pop, n, opts.seed, r);
        const DataMeasure nu = empirical_from_samples(rep.Z);
        const DataMeasure nu1 = resample(nu, {0}, {rep.Zb1});
        const ParamMeasure mn = trainer.train(nu, rep.train_seed);
        const ParamMeasure m1 = trainer.train(nu1, rep.train_seed);
        const double un = feature_mean(model, mn, rep.Zb1);
        const double u1 = feature_mean(model, m1, rep.Zb1);
        out[0] = model.outer(un, rep.Zb1) - model.outer(u1, rep.Zb1);
        // int dl/dm(m1, Zb1, theta) mn(dtheta) = F'(u1) (un - u1)
        out[1] = model.outer_d1(u1, rep.Zb1) * (un - u1);
    });
}

}  // namespace

GenEstimate wge_resampled(const Trainer& trainer, const Population& pop, const LossModel& model, int n,
                          const MonteCarloOptions& opts) {
    return summarize(column(resampled_samples(trainer, pop, model, n, opts), 0), n, opts.seed, Route::resampled);
}

ConvexCheck convex_lower_bound_check(const Trainer& trainer, const Population& pop, const LossModel& model, int n,
                                     const MonteCarloOptions& opts) {
    const auto rows = resampled_samples(trainer, pop, model, n, opts);
    ConvexCheck c;
    c.wge = summarize(column(rows, 0), n, opts.seed, Route::resampled);
    c.lower = summarize(column(rows, 1), n, opts.seed, Route::convex_lower);
    c.holds = c.wge.value >= c.lower.value - 2.0 * (c.wge.stderr_ + c.lower.stderr_);
    return c;
}

RepresentationEstimate wge_representation(const Trainer& trainer, const Population& pop, const LossModel& model,
                                          int n, const MonteCarloOptions& opts) {
    check_common(opts, n);
    require_gibbs(trainer, "wge_representation");
    const QuadratureRule coarse = gauss_legendre01(opts.lambda_nodes);
    const QuadratureRule fine = gauss_legendre01(2 * opts.lambda_nodes);
    const auto rows = run_replicates(opts.replicates, opts.threads, 2, [&](std::size_t r, Vec& out) {
        Replicate rep(pop, n, opts.seed, r);
        const DataMeasure nu = empirical_from_samples(rep.Z);
        const DataMeasure nu1 = resample(nu, {0}, {rep.Zb1});
        if (!trainer.is_gibbs()) return;
        const ParamMeasure mn = trainer.train(nu);
        const ParamMeasure m1 = trainer.train(nu1);
        const double vol = mn.grid()->cell_volume;
        const QuadratureRule* rules[2] = {&coarse, &fine};
        for (int q = 0; q < 2; ++q) {
            const QuadratureRule& rule = *rules[q];
            const std::size_t N = mn.size();
            Vec gbar(N, 0.0), dbar(N, 0.0);
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                const Vec g = loss_dm_on_support(model, convex_combination(m1, mn, rule.nodes[k]), rep.Zb1);
                simd::axpy(rule.weights[k], g.data(), gbar.data(), N);
            }
            ParamMeasure warm = m1;
            for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                const DataMeasure nul = convex_combination(nu1, nu, rule.nodes[k]);
                warm = trainer.train_from(nul, warm);
                GibbsDerivative deriv(model, nul, trainer.config(), warm);
                const ParamMeasure a = deriv.dm_dnu(rep.Z[0]);
                const ParamMeasure b = deriv.dm_dnu(rep.Zb1);
                simd::axpy(rule.weights[k], a.density().data(), dbar.data(), N);
                simd::axpy(-rule.weights[k], b.density().data(), dbar.data(), N);
            }
            out[q] = simd::dot(gbar.data(), dbar.data(), N) * vol / n;
        }
    });
    RepresentationEstimate est;
    est.estimate = summarize(column(rows, 0), n, opts.seed, Route::representation);
    est.refined = summarize(column(rows, 1), n, opts.seed, Route::representation);
    return est;
}

double markov_tail(double lge_value, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("markov_tail needs eps > 0");
    if (std::isinf(eps)) return 0.0;
    return std::min(1.0, lge_value / (eps * eps));
}

LgeUpperTerms lge_upper_terms(const Trainer& trainer, const Population& pop, const LossModel& model, int n,
                              const MonteCarloOptions& opts) {
    check_common(opts, n);
    require_gibbs(trainer, "lge_upper_terms");
    if (n < 2) throw std::invalid_argument("lge_upper_terms resamples two points and needs n >= 2");
    const QuadratureRule rule = gauss_legendre01(opts.lambda_nodes);
    // columns: l(mn, Z1)^2, l(mn, Zb1)^2, h2, ht2, gap^2
    const auto rows = run_replicates(opts.replicates, opts.threads, 5, [&](std::size_t r, Vec& out) {
        Replicate rep(pop, n, opts.seed, r);
        const DataMeasure nu = empirical_from_samples(rep.Z);
        const DataMeasure nu12 = resample(nu, {0, 1}, {rep.Zb1, rep.Zb2});
        const ParamMeasure mn = trainer.train(nu);
        const ParamMeasure m12 = trainer.train(nu12);
        const std::size_t N = mn.size();

        const double l1 = loss_value(model, mn, rep.Z[0]);
        const double lb = loss_value(model, mn, rep.Zb1);
        out[0] = l1 * l1;
        out[1] = lb * lb;

        std::vector<DataPoint> batch;
        if (!analytic_population_dm(model, mn, pop)) batch = pop.sample(rep.rng, static_cast<std::size_t>(opts.batch_factor * n));
        const double pop_risk = population_risk(model, mn, pop, rep.rng, opts.batch_factor * n);
        const double gap = pop_risk - risk(model, mn, nu);
        out[4] = gap * gap;
        if (!trainer.is_gibbs()) return;

        // int dl/dm(m_(1,2)(l), z, .) (delta_Z1 - nu_pop)(dz), averaged over l
        Vec ibar(N, 0.0);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const ParamMeasure ml = convex_combination(m12, mn, rule.nodes[k]);
            Vec d = loss_dm_on_support(model, ml, rep.Z[0]);
            const Vec p = population_dm(model, ml, batch, pop);
            for (std::size_t i = 0; i < N; ++i) d[i] -= p[i];
            simd::axpy(rule.weights[k], d.data(), ibar.data(), N);
        }
        double h2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) h2 += ibar[i] * (mn.weight(i) - m12.weight(i));
        out[2] = h2 * h2;

        Vec dbar(N, 0.0);
        ParamMeasure warm = m12;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const DataMeasure nul = convex_combination(nu12, nu, rule.nodes[k]);
            warm = trainer.train_from(nul, warm);
            GibbsDerivative deriv(model, nul, trainer.config(), warm);
            const DataPoint* pts[4] = {&rep.Z[0], &rep.Zb1, &rep.Z[1], &rep.Zb2};
            const double sign[4] = {1.0, -1.0, 1.0, -1.0};
            for (int j = 0; j < 4; ++j) {
                const ParamMeasure d = deriv.dm_dnu(*pts[j]);
                simd::axpy(sign[j] * rule.weights[k], d.density().data(), dbar.data(), N);
            }
        }
        const double ht2 = simd::dot(ibar.data(), dbar.data(), N) * mn.grid()->cell_volume;
        out[3] = ht2 * ht2;
    });
    LgeUpperTerms t;
    const GenEstimate k1 = summarize(column(rows, 0), n, opts.seed, Route::direct);
    const GenEstimate k2 = summarize(column(rows, 1), n, opts.seed, Route::direct);
    const GenEstimate h2 = summarize(column(rows, 2), n, opts.seed, Route::direct);
    const GenEstimate ht2 = summarize(column(rows, 3), n, opts.seed, Route::direct);
    t.K = std::max(k1.value, k2.value);
    t.K_margin = std::max(k1.value + 2.0 * k1.stderr_, k2.value + 2.0 * k2.stderr_);
    t.Eh2sq = h2.value;
    t.Eh2sq_stderr = h2.stderr_;
    t.Eht2sq = ht2.value;
    t.Eht2sq_stderr = ht2.stderr_;
    const double K = t.K_margin;
    t.bound = (4.0 * K + 2.0 * std::sqrt(K * t.Eht2sq) + t.Eht2sq / n) / n;
    t.bound_h2 = 4.0 * K / n + 2.0 * std::sqrt(K * t.Eh2sq) + t.Eh2sq;
    t.lge = summarize(column(rows, 4), n, opts.seed, Route::lge);
    t.holds = t.lge.value <= t.bound + 2.0 * t.lge.stderr_;
    return t;
}

double gaussian_mean_oracle(double sigma_tilde, int n) {
    if (!(sigma_tilde > 0.0) || n < 1) throw std::invalid_argument("gaussian_mean_oracle needs sigma > 0 and n >= 1");
    return 2.0 * sigma_tilde * sigma_tilde / n;
}

ExactGen enumerate_exact_gen(const Trainer& trainer, const Population& data_space, const LossModel& model, int n) {
    if (data_space.kind() != Population::Kind::finite)
        throw std::invalid_argument("enumeration needs a finite data space");
    if (n < 1 || n > 6) throw std::invalid_argument("enumeration supports 1 <= n <= 6");
    const auto& pts = data_space.points();
    const auto& probs = data_space.probs();
    const std::size_t S = pts.size();
    double total = 1.0;
    for (int i = 0; i <= n; ++i) total *= static_cast<double>(S);
    if (total > 1e6) throw std::invalid_argument("enumeration too large (|Z|^(n+1) > 1e6)");
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) count *= S;

    auto digits = [&](std::size_t t) {
        std::vector<std::size_t> d(static_cast<std::size_t>(n));
        for (int i = n - 1; i >= 0; --i) {
            d[i] = t % S;
            t /= S;
        }
        return d;
    };
    std::size_t stride0 = count / S;  // weight of the first coordinate

    // Per dataset: u[t][z] = E_{m_t} T(., z)
    std::vector<Vec> u(count, Vec(S));
    Vec prob(count);
    for (std::size_t t = 0; t < count; ++t) {
        const auto d = digits(t);
        std::vector<DataPoint> sample;
        double p = 1.0;
        for (std::size_t idx : d) {
            sample.push_back(pts[idx]);
            p *= probs[idx];
        }
        prob[t] = p;
        const ParamMeasure m = trainer.train(empirical_from_samples(sample));
        for (std::size_t z = 0; z < S; ++z) u[t][z] = feature_mean(model, m, pts[z]);
    }
    auto loss = [&](std::size_t t, std::size_t z) { return model.outer(u[t][z], pts[z]); };

    ExactGen g;
    for (std::size_t t = 0; t < count; ++t) {
        const auto d = digits(t);
        double pop = 0.0;
        for (std::size_t z = 0; z < S; ++z) pop += probs[z] * loss(t, z);
        double emp = 0.0;
        for (std::size_t idx : d) emp += loss(t, idx);
        emp /= n;
        g.wge_exact += prob[t] * (pop - emp);

        double res = 0.0, low = 0.0;
        for (std::size_t zb = 0; zb < S; ++zb) {
            const std::size_t t1 = t + (zb - d[0]) * stride0;  // first coordinate replaced by zb
            res += probs[zb] * (loss(t, zb) - loss(t1, zb));
            low += probs[zb] * model.outer_d1(u[t1][zb], pts[zb]) * (u[t][zb] - u[t1][zb]);
        }
        g.wge_resampled_exact += prob[t] * res;
        g.convex_lower_exact += prob[t] * low;
    }
    return g;
}

RateFit rate_fit(const std::vector<int>& ns, const std::vector<GenEstimate>& estimates) {
    if (ns.size() != estimates.size()) throw std::invalid_argument("rate_fit needs one estimate per n");
    RateFit fit;
    Vec xs, ys;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double v = std::fabs(estimates[i].value);
        if (v <= 2.0 * estimates[i].stderr_ || v == 0.0) {
            fit.excluded.push_back(ns[i]);
            continue;
        }
        xs.push_back(std::log(static_cast<double>(ns[i])));
        ys.push_back(std::log(v));
    }
    std::vector<double> distinct = xs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw std::invalid_argument("rate_fit needs at least 3 distinct n with nonzero estimates");
    const double k = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

}  // namespace genlab
