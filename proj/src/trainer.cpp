#include "genlab/trainer.hpp"

#include <cmath>
#include <stdexcept>

#include "genlab/rng.hpp"

namespace genlab {

Trainer Trainer::gibbs_grid(LossModel model, GibbsConfig cfg, GridPtr grid, SolveOptions opts) {
    cfg.validate();
    if (!grid) throw std::invalid_argument("Gibbs trainer needs a grid");
    if (grid->dim != model.theta_dim()) throw std::invalid_argument("grid dimension does not match the loss model");
    Trainer t;
    t.kind_ = Kind::gibbs_grid;
    t.model_ = std::make_shared<const LossModel>(std::move(model));
    t.cfg_ = cfg;
    t.grid_ = std::move(grid);
    t.solve_ = std::move(opts);
    return t;
}

Trainer Trainer::mfld(LossModel model, GibbsConfig cfg, MfldOptions opts) {
    cfg.validate();
    if (!model.differentiable_in_theta()) throw std::invalid_argument("mfld trainer needs a differentiable activation");
    Trainer t;
    t.kind_ = Kind::mfld;
    t.model_ = std::make_shared<const LossModel>(std::move(model));
    t.cfg_ = cfg;
    t.mfld_ = opts;
    return t;
}

Trainer Trainer::explicit_gaussian_mean(double sigma_tilde, GridPtr grid, int fixed_n) {
    if (!(sigma_tilde > 0.0)) throw std::invalid_argument("sigma_tilde must be positive");
    if (!grid || grid->dim != 1) throw std::invalid_argument("explicit Gaussian trainer needs a 1-D grid");
    Trainer t;
    t.kind_ = Kind::explicit_gaussian_mean;
    t.sigma_tilde_ = sigma_tilde;
    t.grid_ = std::move(grid);
    t.fixed_n_ = fixed_n;
    return t;
}

Trainer Trainer::constant(ParamMeasure m0) {
    Trainer t;
    t.kind_ = Kind::constant;
    t.grid_ = m0.is_grid() ? m0.grid() : nullptr;
    t.constant_ = std::make_shared<const ParamMeasure>(std::move(m0));
    return t;
}

Trainer Trainer::with_fixed_n(int n) const {
    Trainer t = *this;
    t.fixed_n_ = n;
    return t;
}

const LossModel& Trainer::model() const {
    if (!model_) throw std::logic_error("trainer has no loss model");
    return *model_;
}

const GibbsConfig& Trainer::config() const {
    if (!model_) throw std::logic_error("trainer has no Gibbs configuration");
    return cfg_;
}

ParamMeasure Trainer::train(const DataMeasure& nu, std::uint64_t seed) const {
    switch (kind_) {
        case Kind::gibbs_grid: return solve_gibbs(*model_, nu, cfg_, grid_, solve_).m;
        case Kind::mfld: {
            MfldOptions o = mfld_;
            o.seed = derive_seed(mfld_.seed, {seed});
            return mfld_sample(*model_, nu, cfg_, o);
        }
        case Kind::explicit_gaussian_mean: {
            double mean = 0.0;
            for (const auto& a : nu.atoms()) mean += a.weight * a.z.y;
            const int n = fixed_n_ > 0 ? fixed_n_ : static_cast<int>(nu.size());
            const double var = sigma_tilde_ * sigma_tilde_ / n;
            Vec d(grid_->size());
            double total = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                const double r = grid_->nodes[i] - mean;
                d[i] = std::exp(-0.5 * r * r / var);
                total += d[i];
            }
            const double inv = 1.0 / (total * grid_->cell_volume);
            for (double& v : d) v *= inv;
            return ParamMeasure::on_grid(grid_, std::move(d));
        }
        case Kind::constant: return *constant_;
    }
    throw std::logic_error("unknown trainer");
}

ParamMeasure Trainer::train_from(const DataMeasure& nu, const ParamMeasure& init) const {
    if (kind_ != Kind::gibbs_grid) return train(nu);
    SolveOptions o = solve_;
    o.init = init;
    return solve_gibbs(*model_, nu, cfg_, grid_, o).m;
}

std::string Trainer::name() const {
    switch (kind_) {
        case Kind::gibbs_grid: return "gibbs_grid";
        case Kind::mfld: return "mfld";
        case Kind::explicit_gaussian_mean: return "explicit_gaussian_mean";
        case Kind::constant: return "constant";
    }
    return "";
}

}  // namespace genlab
