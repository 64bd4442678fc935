#include "genlab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "genlab/rng.hpp"
#include "genlab/simd.hpp"

namespace genlab {

namespace {

constexpr double kTiny = 1e-300;

double pow_int(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// Log-density (up to a constant) of |theta| = s for a radial density exp(-f(s)) in dim d.
struct RadialProfile {
    const GibbsConfig& cfg;
    int dim;
    bool tilted;
    double operator()(double s) const {
        const double u = cfg.U.kappa * pow_int(s, 2 * cfg.U.q) / (cfg.sigma * cfg.sigma);
        double h = -u;
        if (tilted) h += std::pow(s, cfg.p);
        if (dim > 1) h += (dim - 1) * std::log(std::max(s, kTiny));
        return h;
    }
};

double tail_radius(const RadialProfile& h, double tail_mass) {
    // Find an outer limit where the radial density is negligible.
    double hmax = -std::numeric_limits<double>::infinity();
    double S = 1.0;
    for (int it = 0; it < 200; ++it) {
        const int probes = 2000;
        for (int k = 0; k <= probes; ++k) hmax = std::max(hmax, h(S * k / probes));
        if (h(S) < hmax - 80.0) break;
        S *= 1.5;
    }
    const int N = 200000;
    const double ds = S / N;
    Vec w(N + 1);
    for (int k = 0; k <= N; ++k) w[k] = std::exp(h(k * ds) - hmax);
    double total = 0.0;
    for (int k = 0; k < N; ++k) total += 0.5 * (w[k] + w[k + 1]) * ds;
    double tail = 0.0;
    for (int k = N; k > 0; --k) {
        tail += 0.5 * (w[k] + w[k - 1]) * ds;
        if (tail >= tail_mass * total) return k * ds;
    }
    return S;
}

ParamMeasure normalized_exp(const GridPtr& grid, const Vec& exponent, double* log_norm) {
    double emax = -std::numeric_limits<double>::infinity();
    for (double e : exponent) {
        if (std::isnan(e)) throw std::runtime_error("Gibbs exponent is NaN");
        emax = std::max(emax, e);
    }
    if (!std::isfinite(emax)) throw std::runtime_error("Gibbs map underflows at every grid node");
    Vec d(exponent.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::exp(exponent[i] - emax);
    const double z = simd::sum(d.data(), d.size()) * grid->cell_volume;
    if (!(z > 0.0) || !std::isfinite(z)) throw std::runtime_error("Gibbs map underflows at every grid node");
    const double inv = 1.0 / z;
    for (double& v : d) v *= inv;
    if (log_norm) *log_norm = emax + std::log(z);
    return ParamMeasure::on_grid(grid, std::move(d));
}

Vec regularizer_over_sigma2(const GibbsConfig& cfg, const Grid& grid) {
    Vec u(grid.size());
    const double s2 = cfg.sigma * cfg.sigma;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = cfg.U.value(grid.node(i)) / s2;
    return u;
}

// Exponent -(2 beta^2 / sigma^2) dR/dm - U / sigma^2 at every grid node.
struct GibbsMapper {
    const LossModel& model;
    const GibbsConfig& cfg;
    GridPtr grid;
    FeatureTable table;
    Vec u_over_s2;

    GibbsMapper(const LossModel& model_, const DataMeasure& nu, const GibbsConfig& cfg_, GridPtr grid_)
        : model(model_), cfg(cfg_), grid(std::move(grid_)) {
        if (nu.is_signed()) throw std::invalid_argument("Gibbs map needs an unsigned data measure");
        table = tabulate_features(model, grid->nodes, grid->dim, nu);
        u_over_s2 = regularizer_over_sigma2(cfg, *grid);
    }

    ParamMeasure operator()(const ParamMeasure& m, double* log_norm) const {
        Vec e = dR_dm_tabulated(model, table, m.weights());
        const double c = cfg.temperature_coefficient();
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = -c * e[i] - u_over_s2[i];
        return normalized_exp(grid, e, log_norm);
    }
};

}  // namespace

Regularizer Regularizer::make(double kappa, double p, std::optional<int> q) {
    if (!(kappa > 0.0)) throw std::invalid_argument("regularizer kappa must be positive");
    Regularizer r;
    r.kappa = kappa;
    r.q = q ? *q : std::max(1, static_cast<int>(std::ceil((p + 1.0) / 2.0)));
    if (r.q < 1) throw std::invalid_argument("regularizer exponent q must be >= 1");
    return r;
}

double Regularizer::value(ThetaView theta) const { return kappa * pow_int(norm2(theta), q); }

void Regularizer::gradient(ThetaView theta, double* out) const {
    const double s = 2.0 * q * kappa * pow_int(norm2(theta), q - 1);
    for (std::size_t k = 0; k < theta.size(); ++k) out[k] = s * theta[k];
}

void Regularizer::check_growth(const LossModel& model, double p) const {
    const double need = std::max(p, static_cast<double>(model.envelope_degree()));
    if (!(2.0 * q > need))
        throw std::invalid_argument("regularizer degree 2q = " + std::to_string(2 * q) +
                                    " must exceed max(p, envelope degree) = " + std::to_string(need));
}

void GibbsConfig::validate() const {
    if (!(beta > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("beta and sigma must be positive");
    if (!(p >= 2.0)) throw std::invalid_argument("growth exponent p must be >= 2");
    const double c = temperature_coefficient();
    if (!std::isfinite(c) || !(c > 0.0)) throw std::invalid_argument("2 beta^2 / sigma^2 must be finite and positive");
    if (!(U.kappa > 0.0) || U.q < 1) throw std::invalid_argument("invalid regularizer");
    if (!(2.0 * U.q > p)) throw std::invalid_argument("regularizer degree 2q must exceed p");
}

double prior_box_radius(const GibbsConfig& cfg, int dim, double tail_mass) {
    cfg.validate();
    const double r0 = tail_radius(RadialProfile{cfg, dim, false}, tail_mass);
    const double r1 = tail_radius(RadialProfile{cfg, dim, true}, tail_mass);
    return std::max(r0, r1);
}

GridPtr make_gibbs_grid(const GibbsConfig& cfg, int dim, int per_axis, double min_radius) {
    const double r = std::max(prior_box_radius(cfg, dim), min_radius);
    return make_grid(dim, per_axis, r);
}

PriorPair make_priors(const GibbsConfig& cfg, const GridPtr& grid) {
    cfg.validate();
    Vec e = regularizer_over_sigma2(cfg, *grid);
    for (double& v : e) v = -v;
    double log_f = 0.0, log_ft = 0.0;
    ParamMeasure gamma = normalized_exp(grid, e, &log_f);
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double r2 = norm2(grid->node(i));
        e[i] += cfg.p == 2.0 ? r2 : std::pow(r2, 0.5 * cfg.p);
    }
    ParamMeasure tilde = normalized_exp(grid, e, &log_ft);
    return PriorPair{std::move(gamma), std::move(tilde), log_f, log_ft};
}

double kl_divergence(const ParamMeasure& m, const ParamMeasure& ref) {
    if (!m.is_grid() || !ref.is_grid()) throw std::invalid_argument("KL needs grid measures");
    if (m.grid() != ref.grid() && m.grid()->nodes != ref.grid()->nodes)
        throw std::invalid_argument("KL of measures on different grids");
    const auto& a = m.density();
    const auto& b = ref.density();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        if (b[i] < kTiny) {
            if (a[i] > kTiny) return std::numeric_limits<double>::infinity();
            continue;
        }
        s += a[i] * std::log(a[i] / b[i]);
    }
    return s * m.grid()->cell_volume;
}

double objective(const LossModel& model, const ParamMeasure& m, const DataMeasure& nu, const GibbsConfig& cfg) {
    if (!m.is_grid()) throw std::invalid_argument("objective needs a grid measure (KL is undefined for particles)");
    const PriorPair priors = make_priors(cfg, m.grid());
    const double kl = kl_divergence(m, priors.gamma_sigma);
    return risk(model, m, nu) + kl / cfg.temperature_coefficient();
}

ParamMeasure gibbs_map(const LossModel& model, const ParamMeasure& m, const DataMeasure& nu,
                       const GibbsConfig& cfg) {
    if (!m.is_grid()) throw std::invalid_argument("Gibbs map needs a grid measure");
    cfg.validate();
    GibbsMapper mapper(model, nu, cfg, m.grid());
    return mapper(m, nullptr);
}

GibbsSolution solve_gibbs(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg,
                          const GridPtr& grid, const SolveOptions& opts) {
    cfg.validate();
    if (!(opts.alpha > 0.0 && opts.alpha <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    GibbsMapper mapper(model, nu, cfg, grid);
    ParamMeasure m = opts.init ? *opts.init : make_priors(cfg, grid).gamma_sigma;
    if (!m.is_grid() || m.grid()->nodes != grid->nodes) throw std::invalid_argument("initial measure is not on the grid");
    double log_norm = 0.0;
    ParamMeasure g = mapper(m, &log_norm);
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iter; ++it) {
        m = convex_combination(m, g, opts.alpha);
        g = mapper(m, &log_norm);
        residual = simd::max_abs_diff(m.density().data(), g.density().data(), m.density().size());
        if (residual <= opts.tol) return GibbsSolution{std::move(m), it, residual, log_norm};
    }
    throw GibbsSolveError("solve_gibbs did not reach tol after " + std::to_string(opts.max_iter) +
                              " iterations (residual " + std::to_string(residual) + ")",
                          residual);
}

namespace {

// drift = grad_theta [dR/dm(mhat, nu, theta) + U(theta) / (2 beta^2)]
struct Drift {
    const LossModel& model;
    const DataMeasure& nu;
    const GibbsConfig& cfg;
    Vec outer_slope;  // nu_j * F'_j(u_j)

    void update(const Vec& points, int dim) {
        const std::size_t n = points.size() / dim;
        outer_slope.resize(nu.size());
        const double inv_n = 1.0 / static_cast<double>(n);
        std::size_t j = 0;
        for (const auto& a : nu.atoms()) {
            double u = 0.0;
            if (!model.second_derivative_vanishes()) {
                for (std::size_t i = 0; i < n; ++i) u += model.feature(ThetaView(points.data() + i * dim, dim), a.z);
                u *= inv_n;
            }
            outer_slope[j++] = a.weight * model.outer_d1(u, a.z);
        }
    }

    void eval(ThetaView theta, double* out, double* scratch) const {
        const int dim = static_cast<int>(theta.size());
        cfg.U.gradient(theta, out);
        const double inv = 1.0 / (2.0 * cfg.beta * cfg.beta);
        for (int k = 0; k < dim; ++k) out[k] *= inv;
        std::size_t j = 0;
        for (const auto& a : nu.atoms()) {
            model.feature_gradient(theta, a.z, scratch);
            for (int k = 0; k < dim; ++k) out[k] += outer_slope[j] * scratch[k];
            ++j;
        }
    }
};

}  // namespace

ParamMeasure mfld_sample(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg,
                         const MfldOptions& opts) {
    cfg.validate();
    if (!model.differentiable_in_theta())
        throw std::invalid_argument("mfld_sample needs an activation that is differentiable in theta");
    if (opts.particles < 1 || opts.steps < 0 || !(opts.step > 0.0))
        throw std::invalid_argument("mfld_sample needs particles >= 1, steps >= 0 and step > 0");
    if (nu.is_signed()) throw std::invalid_argument("mfld_sample needs an unsigned data measure");
    const int dim = model.theta_dim();
    const double radius = opts.grid_radius > 0.0 ? opts.grid_radius : prior_box_radius(cfg, dim);

    // Initial particles drawn from gamma^sigma on a tensor grid with uniform jitter.
    const int per_axis = std::max(9, static_cast<int>(std::floor(std::pow(65536.0, 1.0 / dim))) | 1);
    GridPtr grid = make_grid(dim, per_axis, radius);
    const ParamMeasure prior = make_priors(cfg, grid).gamma_sigma;
    Vec cumulative(prior.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < prior.size(); ++i) cumulative[i] = (acc += prior.weight(i));
    Rng rng(opts.seed);
    const std::size_t N = static_cast<std::size_t>(opts.particles);
    Vec pts(N * dim);
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t node = rng.categorical(cumulative.data(), cumulative.size());
        for (int k = 0; k < dim; ++k)
            pts[i * dim + k] = grid->nodes[node * dim + k] + (rng.uniform() - 0.5) * grid->spacing;
    }

    Drift drift{model, nu, cfg, {}};
    drift.update(pts, dim);
    Vec d0(dim), d1(dim), scratch(dim), probe(dim);

    // Stability heuristic: h (2 beta^2 / sigma^2) Lip <= 0.25 with Lip estimated on the
    // initial cloud by finite differences of the drift.
    double lip = 0.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(N, 64); ++i) {
        ThetaView th(pts.data() + i * dim, dim);
        drift.eval(th, d0.data(), scratch.data());
        for (int k = 0; k < dim; ++k) {
            std::copy(th.begin(), th.end(), probe.begin());
            const double delta = 1e-5 * (1.0 + std::fabs(th[k]));
            probe[k] += delta;
            drift.eval(ThetaView(probe.data(), dim), d1.data(), scratch.data());
            double diff = 0.0;
            for (int l = 0; l < dim; ++l) diff += (d1[l] - d0[l]) * (d1[l] - d0[l]);
            lip = std::max(lip, std::sqrt(diff) / delta);
        }
    }
    if (opts.step * cfg.temperature_coefficient() * lip > 0.25)
        throw std::invalid_argument("mfld step too large: h * (2 beta^2 / sigma^2) * Lip = " +
                                    std::to_string(opts.step * cfg.temperature_coefficient() * lip) + " > 0.25");

    const double noise = std::sqrt(opts.step * cfg.sigma * cfg.sigma / (cfg.beta * cfg.beta));
    const double limit2 = 100.0 * radius * radius;
    Vec drift_all(N * dim);
    for (int t = 0; t < opts.steps; ++t) {
        drift.update(pts, dim);
        for (std::size_t i = 0; i < N; ++i)
            drift.eval(ThetaView(pts.data() + i * dim, dim), drift_all.data() + i * dim, scratch.data());
        for (std::size_t i = 0; i < N; ++i) {
            double r2 = 0.0;
            for (int k = 0; k < dim; ++k) {
                double& x = pts[i * dim + k];
                x += -opts.step * drift_all[i * dim + k] + noise * rng.normal();
                r2 += x * x;
            }
            if (!(r2 <= limit2))
                throw std::runtime_error("mfld_sample diverged at step " + std::to_string(t) + " (particle " +
                                         std::to_string(i) + " left 10x the grid radius)");
        }
    }
    return ParamMeasure::particles(dim, std::move(pts));
}

double objective_gap_bound(const LossModel&, const DataMeasure&, const GibbsConfig& cfg,
                           const ParamMeasure& mbar) {
    if (!mbar.is_grid()) throw std::invalid_argument("objective_gap_bound needs a grid measure");
    const PriorPair priors = make_priors(cfg, mbar.grid());
    const double kl = kl_divergence(mbar, priors.gamma_sigma);
    if (!std::isfinite(kl)) throw std::invalid_argument("KL(mbar || gamma^sigma) is infinite");
    return kl / cfg.temperature_coefficient();
}

}  // namespace genlab
