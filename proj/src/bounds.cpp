#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "genlab/genbench.hpp"
#include "genlab/parallel.hpp"
#include "genlab/rng.hpp"

namespace genlab {

BoundConstants gibbs_bound_constants(const LossModel& model, const GibbsConfig& cfg, const GridPtr& grid,
                                     const Population& pop, int n, std::optional<double> K_estimate) {
    if (n < 1) throw std::invalid_argument("sample size n must be >= 1");
    cfg.validate();
    const PriorPair priors = make_priors(cfg, grid);
    BoundConstants b;
    b.c_theta = model.c_theta(cfg.p);
    b.tilde_moment_p = moment(priors.gamma_tilde_p, cfg.p);
    b.g_tilde = growth_envelopes(model, priors.gamma_tilde_p).g;
    const double temp = cfg.temperature_coefficient();
    const double e4 = pop.moment_oracle(4);
    const double e8 = pop.moment_oracle(8);
    const double C2 = b.c_theta * b.c_theta;

    const double inner = 1.0 + 2.0 * b.tilde_moment_p + 4.0 * b.g_tilde / n;
    b.c_wge = 9.0 * std::sqrt(2.0) / 2.0 * C2 * inner * inner;
    b.wge_bound = b.c_wge / n * temp * e4;

    const double inner_a = 1.0 + 2.0 * b.tilde_moment_p + 8.0 * b.g_tilde;
    b.A = 2.0 * 625.0 * temp * temp * C2 * C2 * std::pow(inner_a, 4) * e8;

    if (K_estimate) {
        b.K = *K_estimate;
    } else if (!model.is_nn()) {
        // |l(m, z)| <= M_p (2 + E_m|theta|^2)(1 + |z|^2) with E_m|theta|^2 taken under gamma_tilde_p
        const double s = 2.0 + moment(priors.gamma_tilde_p, 2.0);
        b.K = 4.0 * model.M_p() * model.M_p() * s * s * e4;
    } else {
        throw std::invalid_argument("K has no analytic bound for the NN loss; pass a Monte Carlo estimate");
    }
    b.lge_bound = (4.0 * b.K + 2.0 * std::sqrt(b.K * b.A) + b.A / n) / n;
    return b;
}

PopulationRiskBound population_risk_bound(const LossModel& model, const GibbsConfig& cfg, const GridPtr& grid,
                                          const SolveOptions& solve, const Population& pop, const ParamMeasure& mbar,
                                          int n, ScheduleMode mode, const MonteCarloOptions& opts) {
    if (opts.replicates < 2) throw std::invalid_argument("replicates must be >= 2");
    if (n < 1) throw std::invalid_argument("sample size n must be >= 1");
    GibbsConfig cfg_n = cfg;
    const double exponent = mode == ScheduleMode::wge_n14 ? 0.25 : 1.0 / 6.0;
    cfg_n.beta = cfg.beta * std::pow(static_cast<double>(n), exponent);
    const Trainer trainer = Trainer::gibbs_grid(model, cfg_n, grid, solve);
    const PriorPair priors = make_priors(cfg_n, grid);
    const double kl = kl_divergence(mbar, priors.gamma_sigma);
    if (!std::isfinite(kl)) throw std::invalid_argument("mbar is not absolutely continuous with respect to gamma^sigma");
    const double kl_term = cfg_n.sigma * cfg_n.sigma / (2.0 * cfg_n.beta * cfg_n.beta) * kl;

    // columns: population risk, R(mbar, nu_n), l(m, Z1)^2, l(m, Zb1)^2
    std::vector<Vec> rows(static_cast<std::size_t>(opts.replicates), Vec(4, 0.0));
    parallel_for(rows.size(), opts.threads, [&](std::size_t r) {
        Rng rng(opts.seed, {static_cast<std::uint64_t>(n), r});
        const std::vector<DataPoint> Z = pop.sample(rng, static_cast<std::size_t>(n));
        const DataPoint zb = pop.sample(rng);
        pop.sample(rng);
        const DataMeasure nu = empirical_from_samples(Z);
        const ParamMeasure m = trainer.train(nu);
        double pr;
        if (auto a = analytic_population_risk(model, m, pop)) {
            pr = *a;
        } else {
            double s = 0.0;
            const int batch = opts.batch_factor * n;
            for (int k = 0; k < batch; ++k) s += loss_value(model, m, pop.sample(rng));
            pr = s / batch;
        }
        const double l1 = loss_value(model, m, Z[0]);
        const double lb = loss_value(model, m, zb);
        rows[r] = {pr, risk(model, mbar, nu), l1 * l1, lb * lb};
    });

    auto col = [&](std::size_t k) {
        Vec c(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) c[r] = rows[r][k];
        return c;
    };
    PopulationRiskBound out;
    out.beta = cfg_n.beta;
    out.kl_term = kl_term;
    const Vec mbar_risk = col(1);
    out.mbar_risk = summarize(mbar_risk, n, opts.seed, Route::population_risk).value;

    if (mode == ScheduleMode::wge_n14) {
        const BoundConstants bc = gibbs_bound_constants(model, cfg_n, grid, pop, n, std::nullopt);
        out.risk_bound = bc.wge_bound + kl_term + out.mbar_risk;
        out.scaled = std::sqrt(static_cast<double>(n)) * out.risk_bound;
        out.empirical_risk = summarize(col(0), n, opts.seed, Route::population_risk);
    } else {
        std::optional<double> K;
        if (model.is_nn()) {
            const GenEstimate k1 = summarize(col(2), n, opts.seed, Route::direct);
            const GenEstimate k2 = summarize(col(3), n, opts.seed, Route::direct);
            K = std::max(k1.value + 2.0 * k1.stderr_, k2.value + 2.0 * k2.stderr_);
        }
        const BoundConstants bc = gibbs_bound_constants(model, cfg_n, grid, pop, n, K);
        // R <= gap + V(mbar) with V = R(mbar, nu_n) + kl_term, so E R^2 <= 2 E gap^2 + 2 E V^2
        double v2 = 0.0;
        for (double v : mbar_risk) v2 += (v + kl_term) * (v + kl_term);
        v2 /= static_cast<double>(mbar_risk.size());
        out.risk_bound = 2.0 * bc.lge_bound + 2.0 * v2;
        out.scaled = std::pow(static_cast<double>(n), 2.0 / 3.0) * out.risk_bound;
        Vec sq = col(0);
        for (double& v : sq) v *= v;
        out.empirical_risk = summarize(sq, n, opts.seed, Route::population_risk);
    }
    out.holds = out.empirical_risk.value <= out.risk_bound + 2.0 * out.empirical_risk.stderr_;
    return out;
}

}  // namespace genlab
