#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "genlab/gibbs.hpp"
#include "genlab/losses.hpp"
#include "genlab/measures.hpp"

namespace genlab {

// A functional on grid measures together with its linear derivative
// tabulated at the grid nodes.
struct GridFunctional {
    std::function<double(const ParamMeasure&)> value;
    std::function<Vec(const ParamMeasure&)> derivative;
};

GridFunctional loss_functional(const LossModel& model, const DataPoint& z);

// |F(m') - F(m) - int_0^1 int dF/dm(m + l (m' - m), theta) (m' - m)(dtheta) dl|
// with a Gauss-Legendre rule of lambda_nodes points.
double check_linear_derivative(const GridFunctional& functional, const ParamMeasure& m, const ParamMeasure& m2,
                               int lambda_nodes);

// S(nu, theta_i) = int dl/dm(m, z, theta_i) nu(dz) at every grid node, for the Gibbs solution m.
Vec S_values(const LossModel& model, const DataMeasure& nu, const ParamMeasure& m);
double S_value(const LossModel& model, const DataMeasure& nu, const ParamMeasure& m, ThetaView theta);

struct KernelMatrix {
    Eigen::MatrixXd entries;  // d2R/dm2(m, nu, theta_i, theta_j)
    Vec weights;              // m-density x cell volume

    bool is_symmetric(double tol = 1e-12) const;
    // Smallest eigenvalue of W^{1/2} K W^{1/2}.
    double min_eigenvalue() const;
    // (C_m f)(theta_i) = sum_j K_ij f_j w_j
    Vec apply(const Vec& f) const;
    double quadratic_form(const Vec& f) const;
};

KernelMatrix build_Cm(const LossModel& model, const ParamMeasure& m, const DataMeasure& nu);

struct SDerivative {
    Vec values;
    DataPoint data_point;
};

// Derivatives of the Gibbs map at a fixed nu: factorizes id + (2 beta^2 / sigma^2) C_m once and
// serves dS/dnu and dm/dnu for any number of data points.
class GibbsDerivative {
public:
    GibbsDerivative(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg, ParamMeasure m);

    const ParamMeasure& measure() const { return m_; }
    // L(theta, z) = dl/dm(m, z, theta) - int dl/dm(m, z', theta) nu(dz')
    Vec rhs(const DataPoint& z) const;
    SDerivative dS_dnu(const DataPoint& z) const;
    // Signed density -(2 beta^2 / sigma^2) m(theta) (v(theta) - E_m v)
    ParamMeasure dm_dnu(const DataPoint& z) const;
    double condition_estimate() const { return rcond_; }

private:
    LossModel model_;
    DataMeasure nu_;
    GibbsConfig cfg_;
    ParamMeasure m_;
    Vec mean_dm_;  // int dl/dm(m, z', .) nu(dz')
    bool trivial_ = false;
    std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
    double rcond_ = 1.0;
};

SDerivative solve_dS_dnu(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg,
                         const ParamMeasure& m, const DataPoint& z);
ParamMeasure dm_dnu(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg, const ParamMeasure& m,
                    const DataPoint& z);

// [m(nu + eps (delta_z - nu)) - m(nu)] / eps with both solves at tol <= eps^2 * 1e-2.
ParamMeasure finite_diff_dm_dnu(const LossModel& model, const DataMeasure& nu, const GibbsConfig& cfg,
                                const GridPtr& grid, const DataPoint& z, double eps,
                                const SolveOptions& base = {});

// Finite-difference derivative of an explicit training map nu -> m(nu) along delta_z - nu.
ParamMeasure finite_diff_map(const std::function<ParamMeasure(const DataMeasure&)>& train, const DataMeasure& nu,
                             const DataPoint& z, double eps);

// sum |a - b| / sum |b| over the grid.
double relative_l1(const ParamMeasure& a, const ParamMeasure& b);

}  // namespace genlab
