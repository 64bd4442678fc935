#pragma once

#include <optional>
#include <string>
#include <vector>

#include "genlab/losses.hpp"
#include "genlab/measures.hpp"
#include "genlab/rng.hpp"

namespace genlab {

// Data-generating distribution with a moment oracle E[(1 + |Z|^2)^k].
class Population {
public:
    enum class Kind { gaussian_mean, linear_gaussian, finite };

    // y ~ N(mu, sd^2), no features.
    static Population gaussian_mean(double mu, double sd);
    // x ~ N(0, I_q), y = slope . x + noise_sd * eps.
    static Population linear_gaussian(Vec slope, double noise_sd);
    static Population finite(std::vector<DataPoint> points, Vec probs);

    Kind kind() const { return kind_; }
    DataPoint sample(Rng& rng) const;
    std::vector<DataPoint> sample(Rng& rng, std::size_t n) const;
    double moment_oracle(int k) const;

    double mu() const { return mu_; }
    double sd() const { return sd_; }
    const Vec& slope() const { return slope_; }
    double noise_sd() const { return noise_sd_; }
    const std::vector<DataPoint>& points() const { return points_; }
    const Vec& probs() const { return probs_; }
    std::string describe() const;

private:
    Kind kind_ = Kind::gaussian_mean;
    double mu_ = 0.0, sd_ = 1.0;
    Vec slope_;
    double noise_sd_ = 0.0;
    std::vector<DataPoint> points_;
    Vec probs_;
    Vec cumulative_;
    Vec moments_;  // E[(1 + |Z|^2)^k], k = 0..8
};

// Exact E_pop[T(theta_i, Z)] at the support points of m, when available.
std::optional<Vec> population_feature(const LossModel& model, const ParamMeasure& m, const Population& pop);
std::optional<double> analytic_population_risk(const LossModel& model, const ParamMeasure& m,
                                               const Population& pop);
// int dl/dm(m, z, theta_i) nu_pop(dz) at the support points of m, when available.
std::optional<Vec> analytic_population_dm(const LossModel& model, const ParamMeasure& m, const Population& pop);

// E[(1 + |Z|^2)^k] for Z ~ N(mean, cov), k = 0..kmax.
Vec gaussian_norm_moments(const Vec& mean, const std::vector<Vec>& cov, int kmax);

}  // namespace genlab
