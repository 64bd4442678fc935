#pragma once

#include <functional>
#include <optional>
#include <string>

#include "genlab/measures.hpp"

namespace genlab {

enum class ActivationKind { relu, tanh, sigmoid, heaviside };

struct Activation {
    ActivationKind kind = ActivationKind::tanh;

    double value(double u) const;
    // Throws for heaviside, which has no usable derivative.
    double derivative(double u) const;
    bool differentiable() const { return kind != ActivationKind::heaviside; }
};

enum class OuterKind { quadratic, logcosh, product_margin };

// Outer loss l_o(yhat, y) with analytic growth constants:
// |l_o| <= L_ell (1 + yhat^2 + y^2), |d l_o| <= L_ell1 (1 + |yhat| + |y|), |d2 l_o| <= L_ell2.
struct OuterLoss {
    OuterKind kind = OuterKind::quadratic;
    double L_ell = 0.0;
    double L_ell1 = 0.0;
    double L_ell2 = 0.0;
    // Added to the logistic margin loss; zero because log(1 + e^-u) > 0 already.
    double offset = 0.0;

    static OuterLoss make(OuterKind kind);
    double value(double yhat, double y) const;
    double d1(double yhat, double y) const;
    double d2(double yhat, double y) const;
};

enum class ParamLossKind { mean_squared, regression_squared, custom };

// Parametric loss l_p(theta, z) with |l_p| <= M_p (1 + |theta|^2)(1 + |z|^2).
struct ParamLoss {
    using Fn = std::function<double(ThetaView, const DataPoint&)>;
    using GradFn = std::function<void(ThetaView, const DataPoint&, double*)>;

    ParamLossKind kind = ParamLossKind::mean_squared;
    double M_p = 2.0;
    Fn fn;
    GradFn grad;

    // |theta - (x, y)|^2; theta has dimension dim(x) + 1.
    static ParamLoss mean_squared();
    // (y - theta . x)^2; theta has dimension dim(x).
    static ParamLoss regression_squared();
    static ParamLoss custom(Fn fn, GradFn grad, double M_p);

    double value(ThetaView theta, const DataPoint& z) const;
    void gradient(ThetaView theta, const DataPoint& z, double* out) const;
};

// Both variants have the form l(m, z) = F_z(E_m[T(theta, z)]):
//   NN:              T = phi(theta, x) = a act(w . x),  F_z(u) = l_o(u, y)
//   ExpectedParam:   T = l_p(theta, z),                 F_z(u) = u
class LossModel {
public:
    enum class Variant { nn, expected_param };

    static LossModel nn(Activation activation, OuterLoss outer, int input_dim);
    static LossModel expected_param(ParamLoss loss, int theta_dim);

    Variant variant() const { return variant_; }
    bool is_nn() const { return variant_ == Variant::nn; }
    int theta_dim() const { return theta_dim_; }
    const Activation& activation() const { return activation_; }
    const OuterLoss& outer_loss() const { return outer_; }
    const ParamLoss& param_loss() const { return param_; }

    double feature(ThetaView theta, const DataPoint& z) const;
    void feature_gradient(ThetaView theta, const DataPoint& z, double* out) const;
    double outer(double u, const DataPoint& z) const;
    double outer_d1(double u, const DataPoint& z) const;
    double outer_d2(double u, const DataPoint& z) const;

    bool second_derivative_vanishes() const { return variant_ == Variant::expected_param; }
    bool differentiable_in_theta() const;
    // Degree in |theta| of the g1 envelope (4 for NN, 2 for the parametric loss).
    int envelope_degree() const { return variant_ == Variant::nn ? 4 : 2; }

    double L_phi() const { return L_phi_; }
    double M_p() const { return param_.M_p; }
    // Smallest moment order p for which c_theta(p) is available.
    double c_theta_min_p() const { return variant_ == Variant::nn ? 8.0 : 4.0; }
    // Constant C_theta with E_{m'}[g1(m, .)^2]^{1/2} <= C_theta (1 + E_m|theta|^p + E_{m'}|theta|^p).
    double c_theta(double p) const;

private:
    Variant variant_ = Variant::nn;
    int theta_dim_ = 0;
    int input_dim_ = 0;
    Activation activation_;
    OuterLoss outer_;
    ParamLoss param_;
    double L_phi_ = 1.0;
};

double predict(const LossModel& model, const ParamMeasure& m, const Vec& x);
double loss_value(const LossModel& model, const ParamMeasure& m, const DataPoint& z);
double loss_dm(const LossModel& model, const ParamMeasure& m, const DataPoint& z, ThetaView theta);
double loss_d2m(const LossModel& model, const ParamMeasure& m, const DataPoint& z, ThetaView theta,
                ThetaView theta2);
double risk(const LossModel& model, const ParamMeasure& m, const DataMeasure& nu);

struct Envelopes {
    double g = 0.0;
    double g1 = 0.0;
};
// g1 is evaluated at theta when given, otherwise at the origin.
Envelopes growth_envelopes(const LossModel& model, const ParamMeasure& m,
                           std::optional<ThetaView> theta = std::nullopt);

// T(theta_i, z) at every support point of m.
Vec feature_on_support(const LossModel& model, const ParamMeasure& m, const DataPoint& z);
// dl/dm(m, z, theta_i) at every support point of m.
Vec loss_dm_on_support(const LossModel& model, const ParamMeasure& m, const DataPoint& z);

// Feature rows T(theta_i, z_j) for all support points of a fixed point set and
// all atoms of a data measure; reused across fixed-point iterations.
struct FeatureTable {
    std::vector<Vec> rows;
    std::vector<DataPoint> data;
    Vec atom_weights;
};

FeatureTable tabulate_features(const LossModel& model, const Vec& points, int dim, const DataMeasure& nu);
// dR/dm(m, nu, theta_i) given m's support weights on the tabulated points.
Vec dR_dm_tabulated(const LossModel& model, const FeatureTable& table, const Vec& weights);
double risk_tabulated(const LossModel& model, const FeatureTable& table, const Vec& weights);

std::string to_string(ActivationKind k);
std::string to_string(OuterKind k);
ActivationKind activation_from_string(const std::string& s);
OuterKind outer_from_string(const std::string& s);

}  // namespace genlab
