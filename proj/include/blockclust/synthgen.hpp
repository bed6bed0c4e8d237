#pragma once

#include "blockclust/errors.hpp"

#include <cstdint>
#include <filesystem>

namespace blockclust {

// Planted-corpus shape: `n_protocols` protocols, each with `n_archetypes`
// template trees whose root methods are drawn from the keyword family of
// one financial category (archetype i uses category i in table order, so
// at most 8). `blocks_per_protocol` transactions per protocol are split
// round-robin across its archetypes. With probability `noise_rate` an
// instance gets one leaf insertion or deletion, and independently with
// the same probability one node's address is perturbed.
struct SynthSpec {
    std::size_t n_protocols = 10;
    std::size_t blocks_per_protocol = 300;
    std::size_t n_archetypes = 3;
    double noise_rate = 0.05;
    std::uint64_t seed = 42;

    void validate() const; // throws InvalidSpec
};

struct SynthPaths {
    std::filesystem::path traces;   // traces.jsonl
    std::filesystem::path registry; // registry.csv
    std::filesystem::path truth;    // truth.csv: tx_id,root_index,protocol,ffc
};

// Writes the three files into `out_dir`. Deterministic given the seed:
// reruns produce byte-identical files.
SynthPaths generate(const SynthSpec& spec, const std::filesystem::path& out_dir);

} // namespace blockclust
