#pragma once

#include "blockclust/core.hpp"
#include "blockclust/wl.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace blockclust {

struct TrainConfig {
    std::size_t dim = 128;        // mu
    double learning_rate = 0.05;  // gamma, decays linearly to gamma/100
    std::size_t epochs = 100;
    int wl_depth = 2;
    std::size_t negative = 5;     // k negative samples per word
    std::size_t min_count = 1;    // vocabulary pruning threshold
    std::uint64_t seed = 42;
    bool directed_wl = false;

    void validate() const;
};

// Negative-sampling objective for one (document, word) pair:
//   L = log sigma(v.u_pos) + sum_j log sigma(-v.u_neg_j)
// Returned gradients are exact; the trainer's SGD step equals
// lr * gradient with all dot products taken before any update.
struct PvDbowGradient {
    double loss = 0.0;
    std::vector<double> grad_doc;
    std::vector<std::vector<double>> grad_words; // positive first, then negatives
};

PvDbowGradient pv_dbow_objective(std::span<const double> doc_vec,
                                 std::span<const double> pos_word,
                                 const std::vector<std::span<const double>>& neg_words);

struct VocabEntry {
    std::int64_t token = 0;
    std::uint64_t count = 0;
};

// Word frequency table over all documents, ascending token order, pruned
// at min_count.
std::vector<VocabEntry> build_vocabulary(const std::vector<WlDocument>& docs,
                                         std::size_t min_count);

// PV-DBOW with negative sampling: per document and word, one positive
// update and `negative` draws from the unigram distribution raised to
// 0.75. Documents are shuffled every epoch; a single seeded stream drives
// initialization, shuffling and sampling, so equal inputs give bit-equal
// output.
EmbeddingMatrix train_embeddings(const std::vector<WlDocument>& docs, const TrainConfig& cfg);

} // namespace blockclust
