#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "genlab/gibbs.hpp"
#include "genlab/losses.hpp"
#include "genlab/population.hpp"
#include "genlab/trainer.hpp"

namespace genlab {

enum class ExperimentKind { verify, gibbs_solve, gen_sweep, bounds, mfld_vs_grid, gaussian_oracle };

std::string to_string(ExperimentKind k);

// Malformed config: `field` is the JSON path of the offending key, `line` is
// set for syntax errors.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& msg, int line = 0);
    const std::string& field() const { return field_; }
    int line() const { return line_; }

private:
    std::string field_;
    int line_;
};

struct ModelConfig {
    LossModel::Variant variant = LossModel::Variant::expected_param;
    ActivationKind activation = ActivationKind::tanh;
    OuterKind outer = OuterKind::quadratic;
    ParamLossKind param_loss = ParamLossKind::mean_squared;
    double M_p = 2.0;
    int input_dim = 0;

    LossModel build() const;
};

struct GibbsBlock {
    GibbsConfig cfg;
    double grid_radius = 0.0;  // prior_box_radius when zero
    int grid_nodes = 129;
    SolveOptions solve;

    GridPtr make_grid(int dim) const;
};

struct PopulationConfig {
    std::string distribution = "gaussian_mean";
    double mu = 0.0;
    double sd = 1.0;
    Vec slope;
    double noise_sd = 0.0;
    std::vector<DataPoint> points;
    Vec probs;

    Population build() const;
};

struct TrainerConfig {
    Trainer::Kind kind = Trainer::Kind::gibbs_grid;
    double sigma_tilde = 1.0;  // explicit Gaussian trainer
    MfldOptions mfld;
};

struct SweepConfig {
    std::vector<int> n;
    int replicates = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
    int batch_factor = 10;
    int lambda_nodes = 8;
    std::vector<std::string> routes{"direct"};
    std::string schedule = "none";  // bounds experiment: none, wge_n14, lge_n16
    Vec mbar;                       // point mass location for the scheduled bound
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::verify;
    std::string experiment_id = "experiment";
    ModelConfig model;
    GibbsBlock gibbs;
    PopulationConfig population;
    TrainerConfig trainer;
    SweepConfig sweep;
    std::string output_dir = "out";
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
ExperimentConfig default_verify_config();

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
};

// A CSV table; fields are written verbatim.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

extern const std::vector<std::string> kGenSweepHeader;

// 17 significant digits; empty for nullopt.
std::string format_real(double v);
std::string format_real(std::optional<double> v);
std::string format_bool(std::optional<bool> v);

std::string to_csv(const Table& table);
void emit_csv(const Table& table, const std::string& path);

struct CheckResult {
    std::string check_name;
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
};

std::string verify_report_json(const std::vector<CheckResult>& checks);
void write_text(const std::string& path, const std::string& content);

struct RunResult {
    int exit_code = 0;
    std::string summary;
    std::vector<std::string> files;
};

// Executes an experiment and writes its artifacts; exit 0 on success, 2 when any
// bound check fails. Runtime errors propagate as exceptions.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides = {});

std::vector<CheckResult> run_verify_suite(const ExperimentConfig& cfg);

// Full CLI entry point; never throws.
int run_cli(int argc, char** argv);

}  // namespace genlab
