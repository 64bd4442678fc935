#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "genlab/cli.hpp"

namespace genlab {

using json = nlohmann::json;

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::verify: return "verify";
        case ExperimentKind::gibbs_solve: return "gibbs-solve";
        case ExperimentKind::gen_sweep: return "gen-sweep";
        case ExperimentKind::bounds: return "bounds";
        case ExperimentKind::mfld_vs_grid: return "mfld-vs-grid";
        case ExperimentKind::gaussian_oracle: return "gaussian-oracle";
    }
    return "";
}

ConfigError::ConfigError(const std::string& field, const std::string& msg, int line)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? msg : field + ": " + msg)),
      field_(field),
      line_(line) {}

LossModel ModelConfig::build() const {
    if (variant == LossModel::Variant::nn)
        return LossModel::nn(Activation{activation}, OuterLoss::make(outer), input_dim);
    ParamLoss loss = param_loss == ParamLossKind::regression_squared ? ParamLoss::regression_squared()
                                                                    : ParamLoss::mean_squared();
    loss.M_p = M_p;
    const int dim = param_loss == ParamLossKind::regression_squared ? input_dim : input_dim + 1;
    return LossModel::expected_param(loss, dim);
}

GridPtr GibbsBlock::make_grid(int dim) const {
    if (grid_radius > 0.0) return genlab::make_grid(dim, grid_nodes, grid_radius);
    return make_gibbs_grid(cfg, dim, grid_nodes);
}

Population PopulationConfig::build() const {
    if (distribution == "gaussian_mean") return Population::gaussian_mean(mu, sd);
    if (distribution == "linear_gaussian") return Population::linear_gaussian(slope, noise_sd);
    return Population::finite(points, probs);
}

namespace {

// Typed access to a JSON object with the dotted path kept for diagnostics.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }
    std::string path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
    const json& raw(const char* key) const {
        if (!has(key)) throw ConfigError(path(key), "missing required key");
        return j_.at(key);
    }
    Node child(const char* key) const { return Node(raw(key), path(key)); }

    double real(const char* key) const {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(path(key), "expected a number");
        return v.get<double>();
    }
    double real(const char* key, double fallback) const { return has(key) ? real(key) : fallback; }
    long long integer(const char* key) const {
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
        return v.get<long long>();
    }
    long long integer(const char* key, long long fallback) const { return has(key) ? integer(key) : fallback; }
    std::string str(const char* key) const {
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(path(key), "expected a string");
        return v.get<std::string>();
    }
    std::string str(const char* key, const std::string& fallback) const { return has(key) ? str(key) : fallback; }
    Vec reals(const char* key) const {
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(path(key), "expected an array of numbers");
        Vec out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }
    void reject_unknown(std::initializer_list<const char*> known) const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool ok = false;
            for (const char* k : known) ok = ok || it.key() == k;
            if (!ok) throw ConfigError(path(it.key().c_str()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
};

template <typename E>
E pick(const Node& node, const char* key, std::initializer_list<std::pair<const char*, E>> options, E fallback) {
    if (!node.has(key)) return fallback;
    const std::string s = node.str(key);
    std::string names;
    for (const auto& [name, value] : options) {
        if (s == name) return value;
        names += names.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError(node.path(key), "invalid value '" + s + "' (expected one of: " + names + ")");
}

int positive_int(const Node& node, const char* key, long long fallback, long long lo = 1) {
    const long long v = node.integer(key, fallback);
    if (v < lo || v > 1000000000LL) throw ConfigError(node.path(key), "must be >= " + std::to_string(lo));
    return static_cast<int>(v);
}

void parse_model(const Node& m, ModelConfig& out) {
    m.reject_unknown({"variant", "activation", "outer_loss", "param_loss", "M_p", "input_dim"});
    out.variant = pick<LossModel::Variant>(
        m, "variant", {{"nn", LossModel::Variant::nn}, {"expected_param", LossModel::Variant::expected_param}},
        out.variant);
    out.activation = pick<ActivationKind>(m, "activation",
                                          {{"relu", ActivationKind::relu},
                                           {"tanh", ActivationKind::tanh},
                                           {"sigmoid", ActivationKind::sigmoid},
                                           {"heaviside", ActivationKind::heaviside}},
                                          out.activation);
    out.outer = pick<OuterKind>(m, "outer_loss",
                                {{"quadratic", OuterKind::quadratic},
                                 {"logcosh", OuterKind::logcosh},
                                 {"product_margin", OuterKind::product_margin}},
                                out.outer);
    out.param_loss = pick<ParamLossKind>(
        m, "param_loss",
        {{"mean_squared", ParamLossKind::mean_squared}, {"regression_squared", ParamLossKind::regression_squared}},
        out.param_loss);
    out.M_p = m.real("M_p", out.M_p);
    if (!(out.M_p > 0.0)) throw ConfigError(m.path("M_p"), "must be positive");
    out.input_dim = positive_int(m, "input_dim", out.input_dim, 0);
    if (out.variant == LossModel::Variant::nn && out.input_dim < 1)
        throw ConfigError(m.path("input_dim"), "the NN loss needs input_dim >= 1");
    if (out.param_loss == ParamLossKind::regression_squared && out.input_dim < 1)
        throw ConfigError(m.path("input_dim"), "regression_squared needs input_dim >= 1");
}

void parse_gibbs(const Node& g, GibbsBlock& out) {
    g.reject_unknown({"beta", "sigma", "p", "U", "grid", "damping", "tol", "max_iter"});
    out.cfg.beta = g.real("beta", out.cfg.beta);
    out.cfg.sigma = g.real("sigma", out.cfg.sigma);
    out.cfg.p = g.real("p", out.cfg.p);
    if (!(out.cfg.beta > 0.0)) throw ConfigError(g.path("beta"), "must be positive");
    if (!(out.cfg.sigma > 0.0)) throw ConfigError(g.path("sigma"), "must be positive");
    if (!(out.cfg.p > 0.0)) throw ConfigError(g.path("p"), "must be positive");
    double kappa = 1.0;
    std::optional<int> q;
    if (g.has("U")) {
        const Node u = g.child("U");
        u.reject_unknown({"kappa", "q"});
        kappa = u.real("kappa", kappa);
        if (!(kappa > 0.0)) throw ConfigError(u.path("kappa"), "must be positive");
        if (u.has("q")) q = positive_int(u, "q", 1);
    }
    out.cfg.U = Regularizer::make(kappa, out.cfg.p, q);
    try {
        out.cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigError(g.path("U"), e.what());
    }
    if (g.has("grid")) {
        const Node grid = g.child("grid");
        grid.reject_unknown({"radius", "nodes"});
        out.grid_radius = grid.real("radius", 0.0);
        if (out.grid_radius < 0.0) throw ConfigError(grid.path("radius"), "must be >= 0 (0 selects the tail rule)");
        out.grid_nodes = positive_int(grid, "nodes", out.grid_nodes, 2);
    }
    out.solve.alpha = g.real("damping", out.solve.alpha);
    if (!(out.solve.alpha > 0.0 && out.solve.alpha <= 1.0)) throw ConfigError(g.path("damping"), "must lie in (0, 1]");
    out.solve.tol = g.real("tol", out.solve.tol);
    if (!(out.solve.tol > 0.0)) throw ConfigError(g.path("tol"), "must be positive");
    out.solve.max_iter = positive_int(g, "max_iter", out.solve.max_iter);
}

void parse_population(const Node& p, PopulationConfig& out) {
    out.distribution = p.str("distribution", out.distribution);
    if (out.distribution == "gaussian_mean") {
        p.reject_unknown({"distribution", "mu", "sd"});
        out.mu = p.real("mu", out.mu);
        out.sd = p.real("sd", out.sd);
        if (!(out.sd > 0.0)) throw ConfigError(p.path("sd"), "must be positive");
    } else if (out.distribution == "linear_gaussian") {
        p.reject_unknown({"distribution", "slope", "noise_sd"});
        out.slope = p.reals("slope");
        if (out.slope.empty()) throw ConfigError(p.path("slope"), "must be non-empty");
        out.noise_sd = p.real("noise_sd", out.noise_sd);
        if (out.noise_sd < 0.0) throw ConfigError(p.path("noise_sd"), "must be >= 0");
    } else if (out.distribution == "finite") {
        p.reject_unknown({"distribution", "points", "probs"});
        const json& pts = p.raw("points");
        if (!pts.is_array() || pts.empty()) throw ConfigError(p.path("points"), "expected a non-empty array");
        out.points.clear();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Node pt(pts[i], p.path("points") + "[" + std::to_string(i) + "]");
            pt.reject_unknown({"x", "y"});
            DataPoint z;
            if (pt.has("x")) z.x = pt.reals("x");
            z.y = pt.real("y");
            out.points.push_back(z);
        }
        out.probs = p.reals("probs");
        if (out.probs.size() != out.points.size())
            throw ConfigError(p.path("probs"), "needs one probability per point");
        double s = 0.0;
        for (double v : out.probs) {
            if (!(v > 0.0)) throw ConfigError(p.path("probs"), "probabilities must be positive");
            s += v;
        }
        if (std::fabs(s - 1.0) > 1e-12) throw ConfigError(p.path("probs"), "probabilities must sum to 1");
    } else {
        throw ConfigError(p.path("distribution"),
                          "invalid value '" + out.distribution + "' (expected gaussian_mean, linear_gaussian, finite)");
    }
}

void parse_trainer(const Node& t, TrainerConfig& out) {
    t.reject_unknown({"kind", "sigma_tilde", "particles", "step", "steps", "seed"});
    out.kind = pick<Trainer::Kind>(t, "kind",
                                   {{"gibbs_grid", Trainer::Kind::gibbs_grid},
                                    {"mfld", Trainer::Kind::mfld},
                                    {"explicit_gaussian_mean", Trainer::Kind::explicit_gaussian_mean},
                                    {"constant", Trainer::Kind::constant}},
                                   out.kind);
    out.sigma_tilde = t.real("sigma_tilde", out.sigma_tilde);
    if (!(out.sigma_tilde > 0.0)) throw ConfigError(t.path("sigma_tilde"), "must be positive");
    out.mfld.particles = positive_int(t, "particles", out.mfld.particles);
    out.mfld.step = t.real("step", out.mfld.step);
    if (!(out.mfld.step > 0.0)) throw ConfigError(t.path("step"), "must be positive");
    out.mfld.steps = positive_int(t, "steps", out.mfld.steps);
    out.mfld.seed = static_cast<std::uint64_t>(t.integer("seed", 0));
}

void parse_sweep(const Node& s, SweepConfig& out) {
    s.reject_unknown({"n", "replicates", "seed", "threads", "batch_factor", "lambda_nodes", "routes", "schedule",
                      "mbar"});
    if (s.has("n")) {
        const json& ns = s.raw("n");
        if (!ns.is_array() || ns.empty()) throw ConfigError(s.path("n"), "expected a non-empty array of integers");
        out.n.clear();
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const std::string where = s.path("n") + "[" + std::to_string(i) + "]";
            if (!ns[i].is_number_integer() || ns[i].get<long long>() < 1)
                throw ConfigError(where, "expected a positive integer");
            const int v = ns[i].get<int>();
            if (!out.n.empty() && v <= out.n.back()) throw ConfigError(where, "n list must be strictly increasing");
            out.n.push_back(v);
        }
    }
    out.replicates = positive_int(s, "replicates", out.replicates, 2);
    if (s.has("seed")) {
        const json& v = s.raw("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw ConfigError(s.path("seed"), "expected a non-negative integer");
        out.seed = v.get<std::uint64_t>();
    }
    out.threads = positive_int(s, "threads", out.threads);
    out.batch_factor = positive_int(s, "batch_factor", out.batch_factor);
    out.lambda_nodes = positive_int(s, "lambda_nodes", out.lambda_nodes);
    if (s.has("routes")) {
        const json& r = s.raw("routes");
        if (!r.is_array() || r.empty()) throw ConfigError(s.path("routes"), "expected a non-empty array");
        out.routes.clear();
        for (std::size_t i = 0; i < r.size(); ++i) {
            const std::string where = s.path("routes") + "[" + std::to_string(i) + "]";
            if (!r[i].is_string()) throw ConfigError(where, "expected a string");
            const std::string v = r[i].get<std::string>();
            if (v != "direct" && v != "resampled" && v != "representation" && v != "lge" && v != "convex_lower")
                throw ConfigError(where, "invalid route '" + v +
                                             "' (expected direct, resampled, representation, lge, convex_lower)");
            out.routes.push_back(v);
        }
    }
    out.schedule = s.str("schedule", out.schedule);
    if (out.schedule != "none" && out.schedule != "wge_n14" && out.schedule != "lge_n16")
        throw ConfigError(s.path("schedule"), "invalid value '" + out.schedule + "' (expected none, wge_n14, lge_n16)");
    if (s.has("mbar")) out.mbar = s.reals("mbar");
}

int line_of(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("syntax error: ") + e.what(), line_of(text, e.byte));
    }
    const Node root(j, "");
    root.reject_unknown({"experiment", "experiment_id", "model", "gibbs", "population", "trainer", "sweep", "output"});
    ExperimentConfig cfg;
    cfg.experiment = pick<ExperimentKind>(root, "experiment",
                                          {{"verify", ExperimentKind::verify},
                                           {"gibbs-solve", ExperimentKind::gibbs_solve},
                                           {"gen-sweep", ExperimentKind::gen_sweep},
                                           {"bounds", ExperimentKind::bounds},
                                           {"mfld-vs-grid", ExperimentKind::mfld_vs_grid},
                                           {"gaussian-oracle", ExperimentKind::gaussian_oracle}},
                                          cfg.experiment);
    if (!root.has("experiment")) throw ConfigError("experiment", "missing required key");
    cfg.experiment_id = root.str("experiment_id", to_string(cfg.experiment));
    if (cfg.experiment_id.empty() || cfg.experiment_id.find_first_of("/\\,\"\n") != std::string::npos)
        throw ConfigError("experiment_id", "must be non-empty without path separators, commas or quotes");
    if (root.has("model")) parse_model(root.child("model"), cfg.model);
    if (root.has("gibbs")) parse_gibbs(root.child("gibbs"), cfg.gibbs);
    if (root.has("population")) parse_population(root.child("population"), cfg.population);
    if (root.has("trainer")) parse_trainer(root.child("trainer"), cfg.trainer);
    if (root.has("sweep")) parse_sweep(root.child("sweep"), cfg.sweep);
    if (root.has("gibbs")) {
        try {
            cfg.gibbs.cfg.U.check_growth(cfg.model.build(), cfg.gibbs.cfg.p);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("gibbs.U.q", e.what());
        }
    }
    if (root.has("output")) {
        const Node o = root.child("output");
        o.reject_unknown({"dir"});
        cfg.output_dir = o.str("dir", cfg.output_dir);
    }
    if (cfg.experiment != ExperimentKind::verify && cfg.sweep.n.empty())
        throw ConfigError("sweep.n", "missing required key");
    if (cfg.experiment == ExperimentKind::gaussian_oracle) {
        if (cfg.population.distribution != "gaussian_mean")
            throw ConfigError("population.distribution", "gaussian-oracle needs gaussian_mean");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ExperimentConfig default_verify_config() {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::verify;
    cfg.experiment_id = "verify";
    cfg.gibbs.cfg.p = 4.0;
    cfg.gibbs.cfg.U = Regularizer::make(1.0, 4.0);
    cfg.sweep.seed = 1;
    return cfg;
}

}  // namespace genlab
