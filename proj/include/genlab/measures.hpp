#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace genlab {

using Vec = std::vector<double>;
using ThetaView = std::span<const double>;

struct DataPoint {
    Vec x;
    double y = 0.0;

    double norm2() const;
    bool operator==(const DataPoint& other) const = default;
};

// Weighted atomic measure on the data space. Duplicate atoms are kept as
// separate entries.
class DataMeasure {
public:
    struct Atom {
        DataPoint z;
        double weight;
    };

    DataMeasure(std::vector<Atom> atoms, bool is_signed);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool is_signed() const { return signed_; }
    double total_mass() const;

private:
    std::vector<Atom> atoms_;
    bool signed_;
};

DataMeasure empirical_from_samples(const std::vector<DataPoint>& samples);
DataMeasure dirac(const DataPoint& z);
// delta_plus - delta_minus
DataMeasure signed_difference(const DataPoint& plus, const DataPoint& minus);
DataMeasure resample(const DataMeasure& nu, const std::vector<std::size_t>& indices,
                     const std::vector<DataPoint>& replacements);
// mu0 + lambda (mu1 - mu0). Atoms at the same index holding the same point
// are merged; other atoms are carried with their scaled weights.
DataMeasure convex_combination(const DataMeasure& mu0, const DataMeasure& mu1, double lambda);
double integrate(const DataMeasure& nu, const std::function<double(const DataPoint&)>& f);

// Tensor-product uniform grid on [-radius, radius]^dim.
struct Grid {
    int dim = 1;
    int per_axis = 0;
    double radius = 0.0;
    double spacing = 0.0;
    double cell_volume = 0.0;
    Vec nodes;  // row-major, size() * dim

    std::size_t size() const { return nodes.size() / static_cast<std::size_t>(dim); }
    ThetaView node(std::size_t i) const { return {nodes.data() + i * dim, static_cast<std::size_t>(dim)}; }
    std::size_t nearest_node(ThetaView theta) const;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int dim, int per_axis, double radius);

// Probability (or signed) measure on parameter space: a density on a grid,
// or an equal-weight particle cloud.
class ParamMeasure {
public:
    enum class Kind { grid, particles };

    static ParamMeasure on_grid(GridPtr grid, Vec density, bool is_signed = false);
    static ParamMeasure particles(int dim, Vec points);
    // All mass on the grid node nearest to theta.
    static ParamMeasure grid_point_mass(GridPtr grid, ThetaView theta);

    Kind kind() const { return kind_; }
    bool is_grid() const { return kind_ == Kind::grid; }
    bool is_signed() const { return signed_; }
    int dim() const { return dim_; }
    std::size_t size() const;
    ThetaView point(std::size_t i) const;
    // Flat row-major coordinates of the support points.
    const Vec& points() const;
    double weight(std::size_t i) const;
    // weight(i) for all support points (density * cell volume, or 1/N).
    const Vec& weights() const { return weights_; }

    const GridPtr& grid() const { return grid_; }
    const Vec& density() const { return density_; }

private:
    ParamMeasure() = default;

    Kind kind_ = Kind::grid;
    bool signed_ = false;
    int dim_ = 0;
    GridPtr grid_;
    Vec density_;
    Vec points_;
    Vec weights_;
};

ParamMeasure convex_combination(const ParamMeasure& m0, const ParamMeasure& m1, double lambda);
double moment(const ParamMeasure& m, double p);
double integrate(const ParamMeasure& m, const std::function<double(ThetaView)>& f);
// Sum of f(point_i) * weight_i for values already tabulated on the support.
double integrate_values(const ParamMeasure& m, const Vec& values);
double norm2(ThetaView theta);

}  // namespace genlab
