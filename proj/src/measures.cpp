#include "genlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "genlab/simd.hpp"

namespace genlab {

namespace {

constexpr double kDataMassTol = 1e-12;
constexpr double kGridMassTol = 1e-10;

bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void check_finite(const DataPoint& z) {
    if (!std::isfinite(z.y) || !all_finite(z.x))
        throw std::invalid_argument("data point has a non-finite coordinate");
}

double pow_norm(double n2, double p) {
    if (p == 2.0) return n2;
    if (p == 4.0) return n2 * n2;
    return std::pow(n2, 0.5 * p);
}

}  // namespace

double DataPoint::norm2() const {
    double s = y * y;
    for (double v : x) s += v * v;
    return s;
}

double norm2(ThetaView theta) {
    double s = 0.0;
    for (double v : theta) s += v * v;
    return s;
}

DataMeasure::DataMeasure(std::vector<Atom> atoms, bool is_signed)
    : atoms_(std::move(atoms)), signed_(is_signed) {
    if (atoms_.empty()) throw std::invalid_argument("data measure needs at least one atom");
    for (const auto& a : atoms_) {
        check_finite(a.z);
        if (!std::isfinite(a.weight)) throw std::invalid_argument("non-finite atom weight");
        if (!signed_ && a.weight < 0.0) throw std::invalid_argument("negative weight in unsigned data measure");
    }
    const double mass = total_mass();
    const double target = signed_ ? 0.0 : 1.0;
    if (std::fabs(mass - target) > kDataMassTol)
        throw std::invalid_argument("data measure has total mass " + std::to_string(mass) + ", expected " +
                                    std::to_string(target));
}

double DataMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
}

DataMeasure empirical_from_samples(const std::vector<DataPoint>& samples) {
    if (samples.empty()) throw std::invalid_argument("empty dataset");
    const double w = 1.0 / static_cast<double>(samples.size());
    std::vector<DataMeasure::Atom> atoms;
    atoms.reserve(samples.size());
    for (const auto& z : samples) atoms.push_back({z, w});
    return DataMeasure(std::move(atoms), false);
}

DataMeasure dirac(const DataPoint& z) { return DataMeasure({{z, 1.0}}, false); }

DataMeasure signed_difference(const DataPoint& plus, const DataPoint& minus) {
    return DataMeasure({{plus, 1.0}, {minus, -1.0}}, true);
}

DataMeasure resample(const DataMeasure& nu, const std::vector<std::size_t>& indices,
                     const std::vector<DataPoint>& replacements) {
    if (nu.is_signed()) throw std::invalid_argument("resample needs an unsigned empirical measure");
    if (indices.size() != replacements.size() || indices.empty() || indices.size() > 2)
        throw std::invalid_argument("resample takes one or two (index, replacement) pairs");
    const std::size_t n = nu.size();
    const double w = 1.0 / static_cast<double>(n);
    for (const auto& a : nu.atoms())
        if (std::fabs(a.weight - w) > kDataMassTol)
            throw std::invalid_argument("resample needs equal-weight atoms");
    if (indices.size() == 2 && indices[0] == indices[1]) throw std::invalid_argument("duplicate resample index");
    auto atoms = nu.atoms();
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= n) throw std::out_of_range("resample index out of range");
        atoms[indices[k]].z = replacements[k];
    }
    return DataMeasure(std::move(atoms), false);
}

DataMeasure convex_combination(const DataMeasure& mu0, const DataMeasure& mu1, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
    if (mu0.is_signed() != mu1.is_signed())
        throw std::invalid_argument("cannot interpolate a signed and an unsigned data measure");
    const double a = 1.0 - lambda;
    const double b = lambda;
    std::vector<DataMeasure::Atom> atoms;
    const auto& x0 = mu0.atoms();
    const auto& x1 = mu1.atoms();
    const std::size_t common = std::min(x0.size(), x1.size());
    auto push = [&](const DataMeasure::Atom& atom, double scale) {
        if (scale != 0.0) atoms.push_back({atom.z, scale * atom.weight});
    };
    for (std::size_t i = 0; i < common; ++i) {
        if (x0[i].z == x1[i].z) {
            atoms.push_back({x0[i].z, a * x0[i].weight + b * x1[i].weight});
        } else {
            push(x0[i], a);
            push(x1[i], b);
        }
    }
    for (std::size_t i = common; i < x0.size(); ++i) push(x0[i], a);
    for (std::size_t i = common; i < x1.size(); ++i) push(x1[i], b);
    return DataMeasure(std::move(atoms), mu0.is_signed());
}

double integrate(const DataMeasure& nu, const std::function<double(const DataPoint&)>& f) {
    double s = 0.0;
    for (const auto& a : nu.atoms()) {
        const double v = f(a.z);
        if (!std::isfinite(v)) throw std::invalid_argument("integrand is not finite at a support point");
        s += v * a.weight;
    }
    return s;
}

GridPtr make_grid(int dim, int per_axis, double radius) {
    if (dim < 1) throw std::invalid_argument("grid dimension must be positive");
    if (per_axis < 2) throw std::invalid_argument("grid needs at least two nodes per axis");
    if (!(radius > 0.0)) throw std::invalid_argument("grid radius must be positive");
    auto g = std::make_shared<Grid>();
    g->dim = dim;
    g->per_axis = per_axis;
    g->radius = radius;
    g->spacing = 2.0 * radius / (per_axis - 1);
    g->cell_volume = std::pow(g->spacing, dim);
    std::size_t count = 1;
    for (int d = 0; d < dim; ++d) count *= static_cast<std::size_t>(per_axis);
    g->nodes.resize(count * dim);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t rem = i;
        // last coordinate varies fastest
        for (int d = dim - 1; d >= 0; --d) {
            const std::size_t k = rem % per_axis;
            rem /= per_axis;
            g->nodes[i * dim + d] = -radius + static_cast<double>(k) * g->spacing;
        }
    }
    // Put exact zeros on the centre line of odd grids.
    if (per_axis % 2 == 1)
        for (double& v : g->nodes)
            if (std::fabs(v) < 0.5 * g->spacing * 1e-9) v = 0.0;
    return g;
}

std::size_t Grid::nearest_node(ThetaView theta) const {
    if (theta.size() != static_cast<std::size_t>(dim)) throw std::invalid_argument("dimension mismatch");
    std::size_t index = 0;
    for (int d = 0; d < dim; ++d) {
        double k = std::round((theta[d] + radius) / spacing);
        k = std::clamp(k, 0.0, static_cast<double>(per_axis - 1));
        index = index * per_axis + static_cast<std::size_t>(k);
    }
    return index;
}

ParamMeasure ParamMeasure::on_grid(GridPtr grid, Vec density, bool is_signed) {
    if (!grid) throw std::invalid_argument("null grid");
    if (density.size() != grid->size()) throw std::invalid_argument("density size does not match grid");
    if (!all_finite(density)) throw std::invalid_argument("density has non-finite entries");
    ParamMeasure m;
    m.kind_ = Kind::grid;
    m.signed_ = is_signed;
    m.dim_ = grid->dim;
    m.weights_.resize(density.size());
    double mass = 0.0, abs_mass = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        if (!is_signed && density[i] < 0.0) throw std::invalid_argument("negative density in probability measure");
        m.weights_[i] = density[i] * grid->cell_volume;
        mass += m.weights_[i];
        abs_mass += std::fabs(m.weights_[i]);
    }
    if (is_signed) {
        if (std::fabs(mass) > kGridMassTol * std::max(1.0, abs_mass))
            throw std::invalid_argument("signed grid density does not have zero mass");
    } else if (std::fabs(mass - 1.0) > kGridMassTol) {
        throw std::invalid_argument("grid density is not normalized (mass " + std::to_string(mass) + ")");
    }
    m.grid_ = std::move(grid);
    m.density_ = std::move(density);
    return m;
}

ParamMeasure ParamMeasure::particles(int dim, Vec points) {
    if (dim < 1) throw std::invalid_argument("particle dimension must be positive");
    if (points.empty() || points.size() % dim != 0) throw std::invalid_argument("particle cloud must be nonempty");
    if (!all_finite(points)) throw std::invalid_argument("particle has a non-finite coordinate");
    ParamMeasure m;
    m.kind_ = Kind::particles;
    m.dim_ = dim;
    m.points_ = std::move(points);
    const std::size_t n = m.points_.size() / dim;
    m.weights_.assign(n, 1.0 / static_cast<double>(n));
    return m;
}

ParamMeasure ParamMeasure::grid_point_mass(GridPtr grid, ThetaView theta) {
    Vec density(grid->size(), 0.0);
    density[grid->nearest_node(theta)] = 1.0 / grid->cell_volume;
    return on_grid(std::move(grid), std::move(density));
}

std::size_t ParamMeasure::size() const { return weights_.size(); }

const Vec& ParamMeasure::points() const { return kind_ == Kind::grid ? grid_->nodes : points_; }

ThetaView ParamMeasure::point(std::size_t i) const {
    return {points().data() + i * dim_, static_cast<std::size_t>(dim_)};
}

double ParamMeasure::weight(std::size_t i) const { return weights_[i]; }

ParamMeasure convex_combination(const ParamMeasure& m0, const ParamMeasure& m1, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
    if (!m0.is_grid() || !m1.is_grid()) throw std::invalid_argument("convex combination needs grid measures");
    if (m0.grid() != m1.grid() && m0.grid()->nodes != m1.grid()->nodes)
        throw std::invalid_argument("convex combination of measures on different grids");
    if (m0.is_signed() != m1.is_signed())
        throw std::invalid_argument("cannot interpolate a signed and an unsigned measure");
    if (lambda == 0.0) return m0;
    if (lambda == 1.0) return m1;
    Vec d(m0.density().size());
    const auto& d0 = m0.density();
    const auto& d1 = m1.density();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = d0[i] + lambda * (d1[i] - d0[i]);
    if (!m0.is_signed())
        for (double& v : d) v = std::max(v, 0.0);
    return ParamMeasure::on_grid(m0.grid(), std::move(d), m0.is_signed());
}

double moment(const ParamMeasure& m, double p) {
    if (!std::isfinite(p)) throw std::invalid_argument("moment order must be finite");
    const std::size_t n = m.size();
    Vec values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = pow_norm(norm2(m.point(i)), p);
    return integrate_values(m, values);
}

double integrate(const ParamMeasure& m, const std::function<double(ThetaView)>& f) {
    const std::size_t n = m.size();
    Vec values(n);
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = f(m.point(i));
        if (!std::isfinite(values[i])) throw std::invalid_argument("integrand is not finite at a support point");
    }
    return integrate_values(m, values);
}

double integrate_values(const ParamMeasure& m, const Vec& values) {
    if (values.size() != m.size()) throw std::invalid_argument("value vector does not match support");
    return simd::dot(values.data(), m.weights().data(), values.size());
}

}  // namespace genlab
