#include "genlab/funcderiv.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "genlab/quadrature.hpp"
#include "genlab/simd.hpp"

namespace genlab {

namespace {

constexpr std::size_t kMaxDenseNodes = 4096;

void require_same_grid(const ParamMeasure& a, const ParamMeasure& b) {
    if (!a.is_grid() || !b.is_grid()) throw std::invalid_argument("grid measures required");
    if (a.grid() != b.grid() && a.grid()->nodes != b.grid()->nodes)
        throw std::invalid_argument("measures live on different grids");
}

}  // namespace

GridFunctional loss_functional(const LossModel& model, const DataPoint& z) {
    return GridFunctional{[model, z](const ParamMeasure& m) { return loss_value(model, m, z); },
                          [model, z](const ParamMeasure& m) { return loss_dm_on_support(model, m, z); }};
}

double check_linear_derivative(const GridFunctional& functional, const ParamMeasure& m, const ParamMeasure& m2,
                               int lambda_nodes) {
    require_same_grid(m, m2);
    const QuadratureRule rule = gauss_legendre01(lambda_nodes);
    const std::size_t n = m.size();
    Vec diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = m2.weight(i) - m.weight(i);
    double path = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const ParamMeasure ml = convex_combination(m, m2, rule.nodes[k]);
        const Vec d = functional.derivative(ml);
        path += rule.weights[k] * simd::dot(d.data(), diff.data(), n);
    }
    return std::fabs(functional.value(m2) - functional.value(m) - path);
}

Vec S_values(const LossModel& model, const DataMeasure& nu, const ParamMeasure& m) {
    if (nu.is_signed()) throw std::invalid_argument("S needs an unsigned data measure");
    FeatureTable table = tabulate_features(model, m.points(), m.dim(), nu);
    return dR_dm_tabulated(model, table, m.weights());
}

double S_value(const LossModel& model, const DataMeasure& nu, const ParamMeasure& m, ThetaView theta) {
    double s = 0.0;
    for (const auto& a : nu.atoms()) s += a.weight * loss_dm(model, m, a.z, theta);
    return s;
}

bool KernelMatrix::is_symmetric(double tol) const {
    const Eigen::Index n = entries.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::fabs(entries(i, j) - entries(j, i)) > tol) return false;
    return true;
}

double KernelMatrix::min_eigenvalue() const {
    const Eigen::Index n = entries.rows();
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = std::sqrt(std::max(weights[i], 0.0));
    Eigen::MatrixXd a = s.asDiagonal() * entries * s.asDiagonal();
    a = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Vec KernelMatrix::apply(const Vec& f) const {
    const Eigen::Index n = entries.rows();
    Eigen::VectorXd fw(n);
    for (Eigen::Index i = 0; i < n; ++i) fw(i) = f[i] * weights[i];
    Eigen::VectorXd r = entries * fw;
    return Vec(r.data(), r.data() + n);
}

double KernelMatrix::quadratic_form(const Vec& f) const {
    const Vec cf = apply(f);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * cf[i] * weights[i];
    return s;
}

KernelMatrix build_Cm(const LossModel& model, const ParamMeasure& m, const DataMeasure& nu) {
    if (!m.is_grid()) throw std::invalid_argument("C_m needs a grid measure");
    if (m.size() > kMaxDenseNodes) throw std::invalid_argument("grid too large for the dense C_m operator");
    const Eigen::Index n = static_cast<Eigen::Index>(m.size());
    KernelMatrix k;
    k.weights = m.weights();
    k.entries = Eigen::MatrixXd::Zero(n, n);
    if (model.second_derivative_vanishes()) return k;
    FeatureTable table = tabulate_features(model, m.points(), m.dim(), nu);
    const Eigen::Index rows = static_cast<Eigen::Index>(table.rows.size());
    Eigen::MatrixXd centred(rows, n);
    Eigen::VectorXd c(rows);
    for (Eigen::Index j = 0; j < rows; ++j) {
        const Vec& row = table.rows[j];
        const double u = simd::dot(row.data(), k.weights.data(), row.size());
        c(j) = table.atom_weights[j] * model.outer_d2(u, table.data[j]);
        for (Eigen::Index i = 0; i < n; ++i) centred(j, i) = row[i] - u;
    }
    k.entries.noalias() = centred.transpose() * c.asDiagonal() * centred;
    return k;
}

GibbsDerivative::GibbsDerivative(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg,
                                 ParamMeasure m)
    : model_(model), nu_(nu), cfg_(cfg), m_(std::move(m)) {
    if (!m_.is_grid()) throw std::invalid_argument("dm/dnu needs a grid measure");
    if (nu_.is_signed()) throw std::invalid_argument("dm/dnu needs an unsigned data measure");
    mean_dm_ = S_values(model_, nu_, m_);
    trivial_ = model_.second_derivative_vanishes();
    if (trivial_) return;
    const KernelMatrix k = build_Cm(model_, m_, nu_);
    const Eigen::Index n = k.entries.rows();
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = k.weights[i];
    Eigen::MatrixXd a = cfg_.temperature_coefficient() * (k.entries * w.asDiagonal());
    a.diagonal().array() += 1.0;
    lu_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(a);
    rcond_ = lu_->rcond();
    if (!(rcond_ > 1e-14))
        throw std::runtime_error("dS/dnu linear solve is singular (rcond estimate " + std::to_string(rcond_) + ")");
}

Vec GibbsDerivative::rhs(const DataPoint& z) const {
    Vec l = loss_dm_on_support(model_, m_, z);
    for (std::size_t i = 0; i < l.size(); ++i) l[i] -= mean_dm_[i];
    return l;
}

SDerivative GibbsDerivative::dS_dnu(const DataPoint& z) const {
    Vec l = rhs(z);
    if (trivial_) return SDerivative{std::move(l), z};
    Eigen::Map<const Eigen::VectorXd> b(l.data(), static_cast<Eigen::Index>(l.size()));
    Eigen::VectorXd v = lu_->solve(b);
    return SDerivative{Vec(v.data(), v.data() + v.size()), z};
}

ParamMeasure GibbsDerivative::dm_dnu(const DataPoint& z) const {
    const SDerivative s = dS_dnu(z);
    const double mean = simd::dot(s.values.data(), m_.weights().data(), s.values.size());
    const double c = cfg_.temperature_coefficient();
    Vec d(s.values.size());
    const Vec& dens = m_.density();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = -c * dens[i] * (s.values[i] - mean);
    return ParamMeasure::on_grid(m_.grid(), std::move(d), true);
}

SDerivative solve_dS_dnu(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg,
                         const ParamMeasure& m, const DataPoint& z) {
    return GibbsDerivative(model, nu, cfg, m).dS_dnu(z);
}

ParamMeasure dm_dnu(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg, const ParamMeasure& m,
                    const DataPoint& z) {
    return GibbsDerivative(model, nu, cfg, m).dm_dnu(z);
}

namespace {

ParamMeasure difference_quotient(const ParamMeasure& hi, const ParamMeasure& lo, double eps) {
    Vec d(hi.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (hi.density()[i] - lo.density()[i]) / eps;
    return ParamMeasure::on_grid(hi.grid(), std::move(d), true);
}

}  // namespace

ParamMeasure finite_diff_dm_dnu(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg,
                                const GridPtr& grid, const DataPoint& z, double eps, const SolveOptions& base) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("finite-difference step must lie in (0, 1)");
    SolveOptions opts = base;
    opts.tol = std::min(base.tol, eps * eps * 1e-2);
    const DataMeasure perturbed = convex_combination(nu, dirac(z), eps);
    const GibbsSolution m0 = solve_gibbs(model, nu, cfg, grid, opts);
    const GibbsSolution m1 = solve_gibbs(model, perturbed, cfg, grid, opts);
    return difference_quotient(m1.m, m0.m, eps);
}

ParamMeasure finite_diff_map(const std::function<ParamMeasure(const DataMeasure&)>& train, const DataMeasure& nu,
                             const DataPoint& z, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("finite-difference step must lie in (0, 1)");
    const ParamMeasure m0 = train(nu);
    const ParamMeasure m1 = train(convex_combination(nu, dirac(z), eps));
    return difference_quotient(m1, m0, eps);
}

double relative_l1(const ParamMeasure& a, const ParamMeasure& b) {
    require_same_grid(a, b);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::fabs(a.density()[i] - b.density()[i]);
        den += std::fabs(b.density()[i]);
    }
    return den > 0.0 ? num / den : num;
}

}  // namespace genlab
