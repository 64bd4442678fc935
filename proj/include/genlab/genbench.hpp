#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genlab/gibbs.hpp"
#include "genlab/losses.hpp"
#include "genlab/population.hpp"
#include "genlab/trainer.hpp"

namespace genlab {

enum class Route { direct, resampled, representation, lge, convex_lower, population_risk };

std::string to_string(Route r);

struct GenEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    int replicates = 0;
    int n = 0;
    std::uint64_t seed = 0;
    Route route = Route::direct;
};

GenEstimate summarize(const Vec& samples, int n, std::uint64_t seed, Route route);

struct MonteCarloOptions {
    int replicates = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
    // Out-of-sample batch size factor when no analytic population risk exists.
    int batch_factor = 10;
    int lambda_nodes = 8;
};

GenEstimate wge_direct(const Trainer& trainer, const Population& pop, const LossModel& model, int n,
                       const MonteCarloOptions& opts);
GenEstimate wge_resampled(const Trainer& trainer, const Population& pop, const LossModel& model, int n,
                          const MonteCarloOptions& opts);
GenEstimate lge(const Trainer& trainer, const Population& pop, const LossModel& model, int n,
                const MonteCarloOptions& opts);

struct RepresentationEstimate {
    GenEstimate estimate;  // (1/n) E[h] with opts.lambda_nodes per axis
    GenEstimate refined;   // same with twice the nodes
};

RepresentationEstimate wge_representation(const Trainer& trainer, const Population& pop, const LossModel& model,
                                          int n, const MonteCarloOptions& opts);

double markov_tail(double lge_value, double eps);

struct ConvexCheck {
    GenEstimate wge;
    GenEstimate lower;
    bool holds = false;
};

ConvexCheck convex_lower_bound_check(const Trainer& trainer, const Population& pop, const LossModel& model, int n,
                                     const MonteCarloOptions& opts);

struct LgeUpperTerms {
    double K = 0.0;         // max of the two Monte Carlo means
    double K_margin = 0.0;  // max of mean + 2 stderr
    double Eh2sq = 0.0;
    double Eh2sq_stderr = 0.0;
    double Eht2sq = 0.0;
    double Eht2sq_stderr = 0.0;
    double bound = 0.0;        // (1/n)(4K + 2 K^{1/2} E[ht2^2]^{1/2} + E[ht2^2] / n), K with margin
    double bound_h2 = 0.0;     // 4K/n + 2 K^{1/2} E[h2^2]^{1/2} + E[h2^2], K with margin
    GenEstimate lge;
    bool holds = false;
};

LgeUpperTerms lge_upper_terms(const Trainer& trainer, const Population& pop, const LossModel& model, int n,
                              const MonteCarloOptions& opts);

struct BoundConstants {
    double c_theta = 0.0;
    double tilde_moment_p = 0.0;  // int |theta|^p gamma_tilde_p
    double g_tilde = 0.0;         // g(gamma_tilde_p)
    double c_wge = 0.0;
    double wge_bound = 0.0;
    double A = 0.0;
    double K = 0.0;
    double lge_bound = 0.0;
};

// K_estimate overrides K; without it the parametric loss uses the analytic K bound
// 4 M_p^2 (2 + E_gamma_tilde|theta|^2)^2 E(1 + |Z|^2)^4 and the NN variant throws.
BoundConstants gibbs_bound_constants(const LossModel& model, const GibbsConfig& cfg, const GridPtr& grid,
                                     const Population& pop, int n, std::optional<double> K_estimate = std::nullopt);

enum class ScheduleMode { wge_n14, lge_n16 };

struct PopulationRiskBound {
    double beta = 0.0;
    double risk_bound = 0.0;  // first moment (wge mode) or second moment (lge mode) bound
    double scaled = 0.0;      // n^{1/2} risk_bound or n^{2/3} risk_bound
    double kl_term = 0.0;     // (sigma^2 / 2 beta^2) KL(mbar || gamma^sigma)
    double mbar_risk = 0.0;   // Monte Carlo mean of R(mbar, nu_n)
    GenEstimate empirical_risk;
    bool holds = false;
};

// beta = beta0 n^{1/4} (wge mode) or beta0 n^{1/6} (lge mode); cfg.beta is beta0.
PopulationRiskBound population_risk_bound(const LossModel& model, const GibbsConfig& cfg, const GridPtr& grid,
                                          const SolveOptions& solve, const Population& pop, const ParamMeasure& mbar,
                                          int n, ScheduleMode mode, const MonteCarloOptions& opts);

double gaussian_mean_oracle(double sigma_tilde, int n);

struct ExactGen {
    double wge_exact = 0.0;
    double wge_resampled_exact = 0.0;
    double convex_lower_exact = 0.0;
};

ExactGen enumerate_exact_gen(const Trainer& trainer, const Population& data_space, const LossModel& model, int n);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<int> excluded;  // n values dropped as indistinguishable from 0
};

RateFit rate_fit(const std::vector<int>& ns, const std::vector<GenEstimate>& estimates);

}  // namespace genlab
