#include "genlab/population.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "genlab/simd.hpp"

namespace genlab {

namespace {

constexpr int kMaxMoment = 8;

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

Vec moments_from_norm_powers(const Vec& raw) {
    // raw[j] = E|Z|^{2j}; returns E(1 + |Z|^2)^k
    Vec out(kMaxMoment + 1);
    for (int k = 0; k <= kMaxMoment; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += binom(k, j) * raw[j];
        out[k] = s;
    }
    return out;
}

}  // namespace

Vec gaussian_norm_moments(const Vec& mean, const std::vector<Vec>& cov, int kmax) {
    const int d = static_cast<int>(mean.size());
    Eigen::MatrixXd S(d, d);
    Eigen::VectorXd mu(d);
    for (int i = 0; i < d; ++i) {
        mu(i) = mean[i];
        for (int j = 0; j < d; ++j) S(i, j) = cov[i][j];
    }
    // Cumulants of Q = |Z|^2: k_r = 2^{r-1} (r-1)! [tr(S^r) + r mu' S^{r-1} mu]
    Vec kappa(kmax + 1, 0.0);
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d);  // S^{r-1}
    double fact = 1.0;                                    // (r-1)!
    for (int r = 1; r <= kmax; ++r) {
        if (r > 1) fact *= (r - 1);
        const double quad = mu.dot(P * mu);
        P = P * S;
        kappa[r] = std::ldexp(fact, r - 1) * (P.trace() + r * quad);
    }
    Vec raw(kmax + 1, 0.0);
    raw[0] = 1.0;
    for (int n = 1; n <= kmax; ++n) {
        double s = 0.0;
        for (int k = 1; k <= n; ++k) s += binom(n - 1, k - 1) * kappa[k] * raw[n - k];
        raw[n] = s;
    }
    Vec out(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += binom(k, j) * raw[j];
        out[k] = s;
    }
    return out;
}

Population Population::gaussian_mean(double mu, double sd) {
    if (!std::isfinite(mu) || !(sd > 0.0)) throw std::invalid_argument("gaussian population needs finite mu and sd > 0");
    Population p;
    p.kind_ = Kind::gaussian_mean;
    p.mu_ = mu;
    p.sd_ = sd;
    p.moments_ = gaussian_norm_moments({mu}, {{sd * sd}}, kMaxMoment);
    return p;
}

Population Population::linear_gaussian(Vec slope, double noise_sd) {
    if (slope.empty()) throw std::invalid_argument("linear_gaussian population needs a slope vector");
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("noise sd must be >= 0");
    Population p;
    p.kind_ = Kind::linear_gaussian;
    p.noise_sd_ = noise_sd;
    const std::size_t q = slope.size();
    std::vector<Vec> cov(q + 1, Vec(q + 1, 0.0));
    double b2 = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        cov[i][i] = 1.0;
        cov[i][q] = cov[q][i] = slope[i];
        b2 += slope[i] * slope[i];
    }
    cov[q][q] = b2 + noise_sd * noise_sd;
    p.moments_ = gaussian_norm_moments(Vec(q + 1, 0.0), cov, kMaxMoment);
    p.slope_ = std::move(slope);
    return p;
}

Population Population::finite(std::vector<DataPoint> points, Vec probs) {
    if (points.empty() || points.size() != probs.size())
        throw std::invalid_argument("finite population needs matching points and probabilities");
    double total = 0.0;
    for (double q : probs) {
        if (!(q >= 0.0)) throw std::invalid_argument("negative probability");
        total += q;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw std::invalid_argument("probabilities must sum to 1");
    Population p;
    p.kind_ = Kind::finite;
    p.points_ = std::move(points);
    p.probs_ = std::move(probs);
    double acc = 0.0;
    for (double q : p.probs_) p.cumulative_.push_back(acc += q);
    Vec raw(kMaxMoment + 1, 0.0);
    for (std::size_t i = 0; i < p.points_.size(); ++i) {
        const double n2 = p.points_[i].norm2();
        double pw = 1.0;
        for (int j = 0; j <= kMaxMoment; ++j, pw *= n2) raw[j] += p.probs_[i] * pw;
    }
    p.moments_ = moments_from_norm_powers(raw);
    return p;
}

DataPoint Population::sample(Rng& rng) const {
    switch (kind_) {
        case Kind::gaussian_mean: return DataPoint{{}, mu_ + sd_ * rng.normal()};
        case Kind::linear_gaussian: {
            DataPoint z;
            z.x.resize(slope_.size());
            double y = 0.0;
            for (std::size_t k = 0; k < slope_.size(); ++k) {
                z.x[k] = rng.normal();
                y += slope_[k] * z.x[k];
            }
            z.y = y + (noise_sd_ > 0.0 ? noise_sd_ * rng.normal() : 0.0);
            return z;
        }
        case Kind::finite: return points_[rng.categorical(cumulative_.data(), cumulative_.size())];
    }
    return {};
}

std::vector<DataPoint> Population::sample(Rng& rng, std::size_t n) const {
    std::vector<DataPoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample(rng));
    return out;
}

double Population::moment_oracle(int k) const {
    if (k < 0 || k > kMaxMoment) throw std::invalid_argument("moment oracle covers k = 0..8 only");
    return moments_[k];
}

std::string Population::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::gaussian_mean: os << "gaussian_mean(mu=" << mu_ << ", sd=" << sd_ << ")"; break;
        case Kind::linear_gaussian: os << "linear_gaussian(q=" << slope_.size() << ", noise=" << noise_sd_ << ")"; break;
        case Kind::finite: os << "finite(" << points_.size() << " points)"; break;
    }
    return os.str();
}

std::optional<Vec> population_feature(const LossModel& model, const ParamMeasure& m, const Population& pop) {
    const std::size_t n = m.size();
    if (pop.kind() == Population::Kind::finite) {
        Vec out(n, 0.0);
        for (std::size_t k = 0; k < pop.points().size(); ++k) {
            const Vec t = feature_on_support(model, m, pop.points()[k]);
            simd::axpy(pop.probs()[k], t.data(), out.data(), n);
        }
        return out;
    }
    if (model.is_nn()) return std::nullopt;
    const auto kind = model.param_loss().kind;
    if (kind == ParamLossKind::mean_squared && pop.kind() == Population::Kind::gaussian_mean && m.dim() == 1) {
        // E(theta - Y)^2 = (theta - mu)^2 + sd^2
        Vec out(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = m.point(i)[0] - pop.mu();
            out[i] = d * d + pop.sd() * pop.sd();
        }
        return out;
    }
    if (kind == ParamLossKind::regression_squared && pop.kind() == Population::Kind::linear_gaussian &&
        static_cast<std::size_t>(m.dim()) == pop.slope().size()) {
        // E(Y - theta.X)^2 = |slope - theta|^2 + noise^2
        Vec out(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < pop.slope().size(); ++k) {
                const double d = pop.slope()[k] - m.point(i)[k];
                s += d * d;
            }
            out[i] = s + pop.noise_sd() * pop.noise_sd();
        }
        return out;
    }
    return std::nullopt;
}

std::optional<double> analytic_population_risk(const LossModel& model, const ParamMeasure& m,
                                               const Population& pop) {
    if (pop.kind() == Population::Kind::finite) {
        double s = 0.0;
        for (std::size_t k = 0; k < pop.points().size(); ++k) s += pop.probs()[k] * loss_value(model, m, pop.points()[k]);
        return s;
    }
    if (model.is_nn()) return std::nullopt;
    auto t = population_feature(model, m, pop);
    if (!t) return std::nullopt;
    return integrate_values(m, *t);
}

std::optional<Vec> analytic_population_dm(const LossModel& model, const ParamMeasure& m, const Population& pop) {
    const std::size_t n = m.size();
    if (pop.kind() == Population::Kind::finite) {
        Vec out(n, 0.0);
        for (std::size_t k = 0; k < pop.points().size(); ++k) {
            const Vec d = loss_dm_on_support(model, m, pop.points()[k]);
            simd::axpy(pop.probs()[k], d.data(), out.data(), n);
        }
        return out;
    }
    if (model.is_nn()) return std::nullopt;
    auto t = population_feature(model, m, pop);
    if (!t) return std::nullopt;
    const double mean = integrate_values(m, *t);
    for (double& v : *t) v -= mean;
    return t;
}

}  // namespace genlab
