#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "genlab/losses.hpp"
#include "genlab/measures.hpp"

namespace genlab {

// U(theta) = kappa |theta|^{2q}
struct Regularizer {
    double kappa = 1.0;
    int q = 1;

    // q defaults to max(1, ceil((p + 1) / 2)).
    static Regularizer make(double kappa, double p, std::optional<int> q = std::nullopt);
    double value(ThetaView theta) const;
    void gradient(ThetaView theta, double* out) const;
    // U must outgrow |theta|^p and the g1 envelope: 2q > max(p, envelope degree).
    void check_growth(const LossModel& model, double p) const;
};

struct GibbsConfig {
    double beta = 1.0;
    double sigma = 1.0;
    double p = 2.0;
    Regularizer U;

    // 2 beta^2 / sigma^2
    double temperature_coefficient() const { return 2.0 * beta * beta / (sigma * sigma); }
    void validate() const;
};

// Smallest box radius whose complement carries < tail_mass of both gamma^sigma
// and the p-tilted prior.
double prior_box_radius(const GibbsConfig& cfg, int dim, double tail_mass = 1e-10);
GridPtr make_gibbs_grid(const GibbsConfig& cfg, int dim, int per_axis = 129, double min_radius = 0.0);

struct PriorPair {
    ParamMeasure gamma_sigma;    // prop. to exp(-U / sigma^2)
    ParamMeasure gamma_tilde_p;  // prop. to exp(-U / sigma^2 + |theta|^p)
    double log_F_sigma = 0.0;
    double log_F_tilde = 0.0;
};

PriorPair make_priors(const GibbsConfig& cfg, const GridPtr& grid);

// KL(m || ref) on a shared grid; 0 log 0 = 0, +inf when m > 1e-300 where ref < 1e-300.
double kl_divergence(const ParamMeasure& m, const ParamMeasure& ref);

double objective(const LossModel& model, const ParamMeasure& m, const DataMeasure& nu, const GibbsConfig& cfg);

ParamMeasure gibbs_map(const LossModel& model, const ParamMeasure& m, const DataMeasure& nu,
                       const GibbsConfig& cfg);

struct SolveOptions {
    double alpha = 0.5;
    double tol = 1e-10;
    int max_iter = 20000;
    std::optional<ParamMeasure> init;  // gamma^sigma when empty
};

struct GibbsSolution {
    ParamMeasure m;
    int iterations = 0;
    double residual = 0.0;
    double log_normalizer = 0.0;  // log F_{beta,sigma} of the last map evaluation
};

class GibbsSolveError : public std::runtime_error {
public:
    GibbsSolveError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

GibbsSolution solve_gibbs(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg,
                          const GridPtr& grid, const SolveOptions& opts = {});

struct MfldOptions {
    int particles = 4096;
    double step = 1e-3;
    int steps = 2000;
    std::uint64_t seed = 0;
    // Radius used to initialise particles from gamma^sigma and to flag divergence
    // (|theta| > 10 * radius); prior_box_radius when zero.
    double grid_radius = 0.0;
};

// Euler-Maruyama mean-field Langevin dynamics started from gamma^sigma.
ParamMeasure mfld_sample(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg,
                         const MfldOptions& opts);

// (sigma^2 / 2 beta^2) KL(mbar || gamma^sigma)
double objective_gap_bound(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg,
                           const ParamMeasure& mbar);

}  // namespace genlab
