#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace genlab {

// Counter-based seed splitting: every stream is keyed by the top-level seed
// and a path of integers (experiment, n, replicate, ...), so a replicate's
// draws never depend on which worker ran it or in what order.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
        : engine_(derive_seed(seed, path)) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    // Index drawn from a discrete distribution given by cumulative weights.
    std::size_t categorical(const double* cumulative, std::size_t n);
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace genlab
