#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dani/cascade.hpp"
#include "dani/graph.hpp"

namespace dani {

struct SimConfig {
    std::size_t cascade_count = 0;
    double delay_scale = 1.0;      // mean of the exponential delay
    double infection_prob = 0.5;   // per-edge transmission probability, (0,1]
    std::size_t max_cascade_size = 0;  // 0 = unbounded
    std::uint64_t rng_seed = 0;
    std::size_t retry_cap = 1000;  // attempts per cascade before giving up
};

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Independent-cascade simulation with exponential delays. Each cascade
// starts at a uniform random seed at time 0; earliest successful attempt
// wins per node. Cascades with fewer than 2 infections are regenerated.
// Per-cascade RNG substreams keyed by (seed, cascade index) make results
// independent of generation order, so counts form prefix-consistent sets.
CascadeSet simulate(const Graph& g, const SimConfig& cfg);

std::vector<CascadeSet> simulate_batch(const Graph& g, const SimConfig& cfg,
                                       const std::vector<std::size_t>& counts);

}  // namespace dani
