#pragma once

#include "blockclust/core.hpp"
#include "blockclust/extraction.hpp"

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace blockclust {

inline constexpr const char* kOthersLabel = "Others";

// One keyword clause: all `required` substrings must occur in the
// lowercased method name and none of `forbidden` may.
struct FfcClause {
    std::vector<std::string> required;
    std::vector<std::string> forbidden;
};

// One category row; rows are evaluated in order, first match wins.
struct FfcRule {
    std::string category;
    std::vector<FfcClause> clauses;
};

// The built-in financial-functionality keyword table.
std::vector<FfcRule> default_ffc_rules();

// Rules externalized as a JSON array so tests and runs can swap tables:
// [{"category": "...", "clauses": [{"all": [...], "none": [...]}]}]
std::vector<FfcRule> load_ffc_rules(const std::filesystem::path& path);
void save_ffc_rules(const std::vector<FfcRule>& rules, const std::filesystem::path& path);

// Lowercases the method name and returns the first matching category, or
// "Others" when nothing matches.
std::string ffc_label(std::string_view root_method, const std::vector<FfcRule>& rules);

// The protocol of the block's root address. Throws UnlabeledRoot when the
// root is missing from the registry or carries no protocol.
std::string protocol_label(const BuildingBlock& block, const ContractRegistry& registry);

struct LabelDistribution {
    std::string label;
    std::size_t count_before = 0; // before the single-node filter
    std::size_t count_after = 0;
};

struct LabelBundle {
    LabelSet protocol;                        // blocks with labeled roots only
    LabelSet ffc;                             // every block, "Others" included
    std::set<std::string> ffc_excluded;       // block ids excluded from FFC evaluation
    std::vector<LabelDistribution> protocol_report;
    std::vector<LabelDistribution> ffc_report;
};

// Labels the filtered corpus. `prefilter` (the corpus before the
// single-node drop) feeds the before-filtering counts when given.
LabelBundle build_label_sets(const Corpus& corpus, const ContractRegistry& registry,
                             const std::vector<FfcRule>& rules,
                             const Corpus* prefilter = nullptr);

} // namespace blockclust
