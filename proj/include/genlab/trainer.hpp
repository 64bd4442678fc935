#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "genlab/gibbs.hpp"
#include "genlab/losses.hpp"
#include "genlab/measures.hpp"

namespace genlab {

// A deterministic map nu -> m(nu) (stochastic trainers take their randomness from the seed).
class Trainer {
public:
    enum class Kind { gibbs_grid, mfld, explicit_gaussian_mean, constant };

    static Trainer gibbs_grid(LossModel model, GibbsConfig cfg, GridPtr grid, SolveOptions opts = {});
    static Trainer mfld(LossModel model, GibbsConfig cfg, MfldOptions opts);
    // m(nu) = N(E_nu[y], sigma_tilde^2 / n) on a 1-D grid; n is the atom count of nu unless fixed_n > 0.
    static Trainer explicit_gaussian_mean(double sigma_tilde, GridPtr grid, int fixed_n = 0);
    static Trainer constant(ParamMeasure m0);

    Kind kind() const { return kind_; }
    ParamMeasure train(const DataMeasure& nu, std::uint64_t seed = 0) const;
    // Same as train, for the Gibbs trainer started from `init`.
    ParamMeasure train_from(const DataMeasure& nu, const ParamMeasure& init) const;
    Trainer with_fixed_n(int n) const;

    bool is_gibbs() const { return kind_ == Kind::gibbs_grid; }
    const LossModel& model() const;
    const GibbsConfig& config() const;
    const GridPtr& grid() const { return grid_; }
    const SolveOptions& solve_options() const { return solve_; }
    std::string name() const;

private:
    Kind kind_ = Kind::constant;
    std::shared_ptr<const LossModel> model_;
    GibbsConfig cfg_;
    GridPtr grid_;
    SolveOptions solve_;
    MfldOptions mfld_;
    double sigma_tilde_ = 1.0;
    int fixed_n_ = 0;
    std::shared_ptr<const ParamMeasure> constant_;
};

}  // namespace genlab
