#include "blockclust/pvdbow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace blockclust {

void TrainConfig::validate() const {
    if (dim == 0) throw Error(ErrorKind::InvalidArgument, "dim must be positive");
    if (learning_rate <= 0.0) throw Error(ErrorKind::InvalidArgument, "learning rate must be positive");
    if (epochs == 0) throw Error(ErrorKind::InvalidArgument, "epochs must be positive");
    if (wl_depth < 0) throw Error(ErrorKind::InvalidArgument, "wl_depth must be >= 0");
}

namespace {

inline double sigmoid(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

PvDbowGradient pv_dbow_objective(std::span<const double> doc_vec,
                                 std::span<const double> pos_word,
                                 const std::vector<std::span<const double>>& neg_words) {
    const std::size_t dim = doc_vec.size();
    PvDbowGradient out;
    out.grad_doc.assign(dim, 0.0);
    out.grad_words.reserve(1 + neg_words.size());

    auto accumulate = [&](std::span<const double> word, double label) {
        double f = sigmoid(dot(doc_vec, word));
        out.loss += label > 0.5 ? std::log(f) : std::log(1.0 - f);
        double g = label - f;
        std::vector<double> grad_word(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            out.grad_doc[i] += g * word[i];
            grad_word[i] = g * doc_vec[i];
        }
        out.grad_words.push_back(std::move(grad_word));
    };

    accumulate(pos_word, 1.0);
    for (const auto& neg : neg_words) accumulate(neg, 0.0);
    return out;
}

std::vector<VocabEntry> build_vocabulary(const std::vector<WlDocument>& docs,
                                         std::size_t min_count) {
    std::map<std::int64_t, std::uint64_t> counts;
    for (const auto& doc : docs)
        for (std::int64_t w : doc.words) counts[w] += 1;
    std::vector<VocabEntry> vocab;
    vocab.reserve(counts.size());
    for (const auto& [token, count] : counts)
        if (count >= min_count) vocab.push_back({token, count});
    return vocab;
}

EmbeddingMatrix train_embeddings(const std::vector<WlDocument>& docs, const TrainConfig& cfg) {
    cfg.validate();
    if (docs.size() < 2)
        throw Error(ErrorKind::InvalidArgument, "need at least 2 documents to train");

    std::vector<VocabEntry> vocab = build_vocabulary(docs, cfg.min_count);
    if (vocab.empty())
        throw Error(ErrorKind::EmptyVocabulary, "no word passed the min-count threshold");

    std::map<std::int64_t, std::size_t> word_index;
    for (std::size_t i = 0; i < vocab.size(); ++i) word_index.emplace(vocab[i].token, i);

    // Documents as vocabulary indices, pruned words dropped.
    const std::size_t n_docs = docs.size();
    const std::size_t dim = cfg.dim;
    std::vector<std::vector<std::uint32_t>> doc_words(n_docs);
    std::size_t words_per_epoch = 0;
    for (std::size_t d = 0; d < n_docs; ++d) {
        doc_words[d].reserve(docs[d].words.size());
        for (std::int64_t w : docs[d].words) {
            auto it = word_index.find(w);
            if (it != word_index.end())
                doc_words[d].push_back(static_cast<std::uint32_t>(it->second));
        }
        words_per_epoch += doc_words[d].size();
    }

    // Cumulative unigram^0.75 table for negative sampling.
    std::vector<double> cumulative(vocab.size());
    double total_weight = 0.0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        total_weight += std::pow(static_cast<double>(vocab[i].count), 0.75);
        cumulative[i] = total_weight;
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Doc vectors uniform in [-0.5/dim, 0.5/dim]; word vectors zero.
    std::vector<double> doc_vec(n_docs * dim);
    for (double& v : doc_vec) v = (unit(rng) - 0.5) / static_cast<double>(dim);
    std::vector<double> word_vec(vocab.size() * dim, 0.0);

    auto sample_negative = [&]() -> std::size_t {
        double u = unit(rng) * total_weight;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        return static_cast<std::size_t>(it - cumulative.begin());
    };

    const double lr_start = cfg.learning_rate;
    const double lr_floor = lr_start / 100.0;
    const double total_steps =
        static_cast<double>(words_per_epoch) * static_cast<double>(cfg.epochs);

    std::vector<std::size_t> order(n_docs);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(dim);

    std::size_t processed = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t d : order) {
            double* v = doc_vec.data() + d * dim;
            for (std::uint32_t w : doc_words[d]) {
                double lr = lr_start;
                if (total_steps > 0) {
                    double progress = static_cast<double>(processed) / total_steps;
                    lr = lr_start * (1.0 - 0.99 * progress);
                    if (lr < lr_floor) lr = lr_floor;
                }
                ++processed;

                std::fill(grad.begin(), grad.end(), 0.0);
                // Positive target, then k negatives; draws matching the
                // target are skipped as in word2vec.
                for (std::size_t s = 0; s <= cfg.negative; ++s) {
                    std::size_t target;
                    double label;
                    if (s == 0) {
                        target = w;
                        label = 1.0;
                    } else {
                        target = sample_negative();
                        if (target == w) continue;
                        label = 0.0;
                    }
                    double* u_vec = word_vec.data() + target * dim;
                    double f = sigmoid(dot({v, dim}, {u_vec, dim}));
                    double g = (label - f) * lr;
                    for (std::size_t i = 0; i < dim; ++i) {
                        grad[i] += g * u_vec[i];
                        u_vec[i] += g * v[i];
                    }
                }
                for (std::size_t i = 0; i < dim; ++i) v[i] += grad[i];
            }
        }
    }

    EmbeddingMatrix matrix;
    matrix.dim = dim;
    for (std::size_t d = 0; d < n_docs; ++d) {
        std::vector<double> row(doc_vec.begin() + d * dim, doc_vec.begin() + (d + 1) * dim);
        matrix.rows.emplace(docs[d].block_id, std::move(row));
    }
    return matrix;
}

} // namespace blockclust
