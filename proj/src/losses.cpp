#include "genlab/losses.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "genlab/simd.hpp"

namespace genlab {

namespace {

double logistic(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

void check_margin_label(double y) {
    if (std::fabs(y) > 1.0) throw std::invalid_argument("product_margin loss expects labels in [-1, 1]");
}

double dot_x(ThetaView w, const Vec& x) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += w[k] * x[k];
    return s;
}

}  // namespace

double Activation::value(double u) const {
    switch (kind) {
        case ActivationKind::relu: return u > 0.0 ? u : 0.0;
        case ActivationKind::tanh: return std::tanh(u);
        case ActivationKind::sigmoid: return logistic(u);
        case ActivationKind::heaviside: return u >= 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

double Activation::derivative(double u) const {
    switch (kind) {
        case ActivationKind::relu: return u > 0.0 ? 1.0 : 0.0;
        case ActivationKind::tanh: {
            const double t = std::tanh(u);
            return 1.0 - t * t;
        }
        case ActivationKind::sigmoid: {
            const double s = logistic(u);
            return s * (1.0 - s);
        }
        case ActivationKind::heaviside: break;
    }
    throw std::invalid_argument("heaviside activation has no derivative");
}

OuterLoss OuterLoss::make(OuterKind kind) {
    OuterLoss o;
    o.kind = kind;
    switch (kind) {
        case OuterKind::quadratic:
            // (yhat - y)^2 <= 2 yhat^2 + 2 y^2; |2(yhat - y)| <= 2(|yhat| + |y|); second derivative 2
            o.L_ell = 2.0;
            o.L_ell1 = 2.0;
            o.L_ell2 = 2.0;
            break;
        case OuterKind::logcosh:
            // log cosh u <= |u|; |tanh| <= 1; sech^2 <= 1
            o.L_ell = 1.0;
            o.L_ell1 = 1.0;
            o.L_ell2 = 1.0;
            break;
        case OuterKind::product_margin:
            // log(1 + e^-u) <= log 2 + |y yhat|; |d| <= |y|; d2 <= y^2 / 4 with |y| <= 1
            o.L_ell = 1.0;
            o.L_ell1 = 1.0;
            o.L_ell2 = 1.0;
            break;
    }
    return o;
}

double OuterLoss::value(double yhat, double y) const {
    switch (kind) {
        case OuterKind::quadratic: return (yhat - y) * (yhat - y);
        case OuterKind::logcosh: {
            const double u = std::fabs(yhat - y);
            return u + std::log1p(std::exp(-2.0 * u)) - std::numbers::ln2;
        }
        case OuterKind::product_margin: {
            check_margin_label(y);
            const double u = -y * yhat;
            return std::max(u, 0.0) + std::log1p(std::exp(-std::fabs(u))) + offset;
        }
    }
    return 0.0;
}

double OuterLoss::d1(double yhat, double y) const {
    switch (kind) {
        case OuterKind::quadratic: return 2.0 * (yhat - y);
        case OuterKind::logcosh: return std::tanh(yhat - y);
        case OuterKind::product_margin: check_margin_label(y); return -y * logistic(-y * yhat);
    }
    return 0.0;
}

double OuterLoss::d2(double yhat, double y) const {
    switch (kind) {
        case OuterKind::quadratic: return 2.0;
        case OuterKind::logcosh: {
            const double t = std::tanh(yhat - y);
            return 1.0 - t * t;
        }
        case OuterKind::product_margin: {
            check_margin_label(y);
            const double s = logistic(y * yhat);
            return y * y * s * (1.0 - s);
        }
    }
    return 0.0;
}

ParamLoss ParamLoss::mean_squared() {
    ParamLoss l;
    l.kind = ParamLossKind::mean_squared;
    // |theta - zeta|^2 <= 2|theta|^2 + 2|z|^2 <= 2 (1 + |theta|^2)(1 + |z|^2)
    l.M_p = 2.0;
    return l;
}

ParamLoss ParamLoss::regression_squared() {
    ParamLoss l;
    l.kind = ParamLossKind::regression_squared;
    // (y - theta.x)^2 <= 2 y^2 + 2 |theta|^2 |x|^2
    l.M_p = 2.0;
    return l;
}

ParamLoss ParamLoss::custom(Fn fn, GradFn grad, double M_p) {
    if (!fn) throw std::invalid_argument("custom parametric loss needs a function");
    if (!(M_p > 0.0)) throw std::invalid_argument("growth constant M_p must be positive");
    ParamLoss l;
    l.kind = ParamLossKind::custom;
    l.M_p = M_p;
    l.fn = std::move(fn);
    l.grad = std::move(grad);
    return l;
}

double ParamLoss::value(ThetaView theta, const DataPoint& z) const {
    switch (kind) {
        case ParamLossKind::mean_squared: {
            if (theta.size() != z.x.size() + 1) throw std::invalid_argument("mean_squared: dim(theta) != dim(x) + 1");
            double s = 0.0;
            for (std::size_t k = 0; k < z.x.size(); ++k) s += (theta[k] - z.x[k]) * (theta[k] - z.x[k]);
            const double r = theta[z.x.size()] - z.y;
            return s + r * r;
        }
        case ParamLossKind::regression_squared: {
            if (theta.size() != z.x.size()) throw std::invalid_argument("regression_squared: dim(theta) != dim(x)");
            const double r = z.y - dot_x(theta, z.x);
            return r * r;
        }
        case ParamLossKind::custom: return fn(theta, z);
    }
    return 0.0;
}

void ParamLoss::gradient(ThetaView theta, const DataPoint& z, double* out) const {
    switch (kind) {
        case ParamLossKind::mean_squared:
            for (std::size_t k = 0; k < z.x.size(); ++k) out[k] = 2.0 * (theta[k] - z.x[k]);
            out[z.x.size()] = 2.0 * (theta[z.x.size()] - z.y);
            return;
        case ParamLossKind::regression_squared: {
            const double r = z.y - dot_x(theta, z.x);
            for (std::size_t k = 0; k < z.x.size(); ++k) out[k] = -2.0 * r * z.x[k];
            return;
        }
        case ParamLossKind::custom:
            if (!grad) throw std::invalid_argument("custom parametric loss has no gradient");
            grad(theta, z, out);
            return;
    }
}

LossModel LossModel::nn(Activation activation, OuterLoss outer, int input_dim) {
    if (input_dim < 1) throw std::invalid_argument("NN input dimension must be positive");
    LossModel m;
    m.variant_ = Variant::nn;
    m.input_dim_ = input_dim;
    m.theta_dim_ = 1 + input_dim;
    m.activation_ = activation;
    m.outer_ = outer;
    // |a act(w.x)| <= |a| (1 + |w||x|) <= (1 + |theta|^2)(1 + |x|) / 2; the envelope
    // formulas are derived with every constant >= 1, so L_phi = 1.
    m.L_phi_ = 1.0;
    return m;
}

LossModel LossModel::expected_param(ParamLoss loss, int theta_dim) {
    if (theta_dim < 1) throw std::invalid_argument("parameter dimension must be positive");
    LossModel m;
    m.variant_ = Variant::expected_param;
    m.theta_dim_ = theta_dim;
    m.param_ = std::move(loss);
    return m;
}

double LossModel::feature(ThetaView theta, const DataPoint& z) const {
    if (variant_ == Variant::nn) {
        if (z.x.size() != static_cast<std::size_t>(input_dim_))
            throw std::invalid_argument("feature dimension does not match the network input");
        return theta[0] * activation_.value(dot_x(theta.subspan(1), z.x));
    }
    return param_.value(theta, z);
}

void LossModel::feature_gradient(ThetaView theta, const DataPoint& z, double* out) const {
    if (variant_ == Variant::nn) {
        const double u = dot_x(theta.subspan(1), z.x);
        out[0] = activation_.value(u);
        const double s = theta[0] * activation_.derivative(u);
        for (int k = 0; k < input_dim_; ++k) out[1 + k] = s * z.x[k];
        return;
    }
    param_.gradient(theta, z, out);
}

double LossModel::outer(double u, const DataPoint& z) const {
    return variant_ == Variant::nn ? outer_.value(u, z.y) : u;
}

double LossModel::outer_d1(double u, const DataPoint& z) const {
    return variant_ == Variant::nn ? outer_.d1(u, z.y) : 1.0;
}

double LossModel::outer_d2(double u, const DataPoint& z) const {
    return variant_ == Variant::nn ? outer_.d2(u, z.y) : 0.0;
}

bool LossModel::differentiable_in_theta() const {
    if (variant_ == Variant::nn) return activation_.differentiable();
    return param_.kind != ParamLossKind::custom || static_cast<bool>(param_.grad);
}

double LossModel::c_theta(double p) const {
    const double base = c_theta_min_p();
    if (p < base)
        throw std::invalid_argument("C_theta needs p >= " + std::to_string(static_cast<int>(base)) + " for this loss");
    if (variant_ == Variant::nn) {
        // g1 = k (4 + |theta|^4 + E_m|theta|^4). Minkowski plus |theta|^4 <= (1 + |theta|^8)/2
        // gives k (5 + E_m|.|^8/2 + E_m'|.|^8/2) at p = 8; for p > 8 use |theta|^8 <= 1 + |theta|^p.
        const double k = 6.0 * outer_.L_ell1 * L_phi_ * (1.0 + L_phi_);
        return p == base ? 5.0 * k : 6.0 * k;
    }
    // g1 = M_p (2 + E_m|theta|^2 + |theta|^2): 2 + sqrt(A) + sqrt(B) <= 2 sqrt(2) (1 + A + B)
    // with A, B the fourth moments; for p > 4 use |theta|^4 <= 1 + |theta|^p.
    return p == base ? 2.0 * std::numbers::sqrt2 * param_.M_p : 4.0 * param_.M_p;
}

Vec feature_on_support(const LossModel& model, const ParamMeasure& m, const DataPoint& z) {
    if (m.dim() != model.theta_dim()) throw std::invalid_argument("measure dimension does not match the loss model");
    const std::size_t n = m.size();
    Vec t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = model.feature(m.point(i), z);
    return t;
}

double predict(const LossModel& model, const ParamMeasure& m, const Vec& x) {
    if (!model.is_nn()) throw std::invalid_argument("predict needs the NN loss variant");
    DataPoint z{x, 0.0};
    return integrate_values(m, feature_on_support(model, m, z));
}

double loss_value(const LossModel& model, const ParamMeasure& m, const DataPoint& z) {
    const double u = integrate_values(m, feature_on_support(model, m, z));
    return model.outer(u, z);
}

double loss_dm(const LossModel& model, const ParamMeasure& m, const DataPoint& z, ThetaView theta) {
    const double u = integrate_values(m, feature_on_support(model, m, z));
    return model.outer_d1(u, z) * (model.feature(theta, z) - u);
}

double loss_d2m(const LossModel& model, const ParamMeasure& m, const DataPoint& z, ThetaView theta,
                ThetaView theta2) {
    if (model.second_derivative_vanishes()) return 0.0;
    const double u = integrate_values(m, feature_on_support(model, m, z));
    return model.outer_d2(u, z) * (model.feature(theta, z) - u) * (model.feature(theta2, z) - u);
}

Vec loss_dm_on_support(const LossModel& model, const ParamMeasure& m, const DataPoint& z) {
    Vec t = feature_on_support(model, m, z);
    const double u = integrate_values(m, t);
    const double d1 = model.outer_d1(u, z);
    for (double& v : t) v = d1 * (v - u);
    return t;
}

double risk(const LossModel& model, const ParamMeasure& m, const DataMeasure& nu) {
    if (nu.is_signed()) throw std::invalid_argument("risk needs an unsigned data measure");
    double s = 0.0;
    for (const auto& a : nu.atoms()) s += a.weight * loss_value(model, m, a.z);
    return s;
}

Envelopes growth_envelopes(const LossModel& model, const ParamMeasure& m, std::optional<ThetaView> theta) {
    const double m2 = moment(m, 2.0);
    const double t2 = theta ? norm2(*theta) : 0.0;
    Envelopes e;
    if (model.is_nn()) {
        const auto& o = model.outer_loss();
        const double lphi = model.L_phi();
        e.g = 2.0 * o.L_ell * lphi * lphi * (1.0 + m2) * (1.0 + m2);
        e.g1 = 6.0 * o.L_ell1 * lphi * (1.0 + lphi) * (4.0 + t2 * t2 + moment(m, 4.0));
    } else {
        e.g = model.M_p() * (1.0 + m2);
        e.g1 = model.M_p() * (2.0 + m2 + t2);
    }
    return e;
}

FeatureTable tabulate_features(const LossModel& model, const Vec& points, int dim, const DataMeasure& nu) {
    if (dim != model.theta_dim()) throw std::invalid_argument("point dimension does not match the loss model");
    FeatureTable table;
    const std::size_t n = points.size() / dim;
    table.rows.reserve(nu.size());
    for (const auto& a : nu.atoms()) {
        Vec row(n);
        for (std::size_t i = 0; i < n; ++i) row[i] = model.feature(ThetaView(points.data() + i * dim, dim), a.z);
        table.rows.push_back(std::move(row));
        table.data.push_back(a.z);
        table.atom_weights.push_back(a.weight);
    }
    return table;
}

Vec dR_dm_tabulated(const LossModel& model, const FeatureTable& table, const Vec& weights) {
    const std::size_t n = weights.size();
    Vec out(n, 0.0);
    double shift = 0.0;
    for (std::size_t j = 0; j < table.rows.size(); ++j) {
        const Vec& row = table.rows[j];
        const double u = simd::dot(row.data(), weights.data(), n);
        const double c = table.atom_weights[j] * model.outer_d1(u, table.data[j]);
        simd::axpy(c, row.data(), out.data(), n);
        shift += c * u;
    }
    for (double& v : out) v -= shift;
    return out;
}

double risk_tabulated(const LossModel& model, const FeatureTable& table, const Vec& weights) {
    double s = 0.0;
    for (std::size_t j = 0; j < table.rows.size(); ++j) {
        const double u = simd::dot(table.rows[j].data(), weights.data(), weights.size());
        s += table.atom_weights[j] * model.outer(u, table.data[j]);
    }
    return s;
}

std::string to_string(ActivationKind k) {
    switch (k) {
        case ActivationKind::relu: return "relu";
        case ActivationKind::tanh: return "tanh";
        case ActivationKind::sigmoid: return "sigmoid";
        case ActivationKind::heaviside: return "heaviside";
    }
    return "";
}

std::string to_string(OuterKind k) {
    switch (k) {
        case OuterKind::quadratic: return "quadratic";
        case OuterKind::logcosh: return "logcosh";
        case OuterKind::product_margin: return "product_margin";
    }
    return "";
}

ActivationKind activation_from_string(const std::string& s) {
    for (auto k : {ActivationKind::relu, ActivationKind::tanh, ActivationKind::sigmoid, ActivationKind::heaviside})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown activation '" + s + "'");
}

OuterKind outer_from_string(const std::string& s) {
    for (auto k : {OuterKind::quadratic, OuterKind::logcosh, OuterKind::product_margin})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown outer loss '" + s + "'");
}

}  // namespace genlab
