#include "blockclust/labeling.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

namespace blockclust {

using nlohmann::json;

std::vector<FfcRule> default_ffc_rules() {
    // "staking" carries NOT "unstaking" so that unstaking methods fall
    // through to Redeem or Withdraw like the other un*-forms.
    return {
        {"Swap", {{{"swap"}, {}}, {{"exchange"}, {}}}},
        {"Lock Capital",
         {{{"deposit"}, {}},
          {{"add", "liquidity"}, {}},
          {{"staking"}, {"unstaking"}},
          {{"stake"}, {"unstake"}},
          {{"lock"}, {"unlock", "block"}},
          {{"lend"}, {}},
          {{"collateralize"}, {}}}},
        {"Redeem or Withdraw",
         {{{"withdraw"}, {}},
          {{"remove", "liquidity"}, {}},
          {{"unstake"}, {}},
          {{"unstaking"}, {}},
          {{"unlock"}, {}}}},
        {"Borrow", {{{"borrow"}, {}}}},
        {"Get Interest or Rewards",
         {{{"get", "reward"}, {}},
          {{"get", "fee"}, {}},
          {{"claim", "reward"}, {}},
          {{"claim", "fee"}, {}},
          {{"harvest"}, {}},
          {{"earn"}, {}}}},
        {"Repay", {{{"repay"}, {}}}},
        {"Governance", {{{"vote"}, {}}}},
        {"Liquidate", {{{"liquidate"}, {}}, {{"liquidation"}, {}}}},
    };
}

namespace {

void validate_rules(const std::vector<FfcRule>& rules) {
    for (const auto& rule : rules) {
        if (rule.category == kOthersLabel)
            throw Error(ErrorKind::SchemaError, "the Others category is implicit");
        if (rule.clauses.empty())
            throw Error(ErrorKind::SchemaError, "category has no clauses: " + rule.category);
        for (const auto& clause : rule.clauses)
            if (clause.required.empty())
                throw Error(ErrorKind::SchemaError,
                            "clause without required terms in: " + rule.category);
    }
}

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

std::vector<FfcRule> load_ffc_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open " + path.string());
    json doc;
    try {
        in >> doc;
        std::vector<FfcRule> rules;
        for (const auto& r : doc) {
            FfcRule rule;
            rule.category = r.at("category").get<std::string>();
            for (const auto& c : r.at("clauses")) {
                FfcClause clause;
                for (const auto& t : c.at("all")) clause.required.push_back(t.get<std::string>());
                if (c.contains("none"))
                    for (const auto& t : c["none"]) clause.forbidden.push_back(t.get<std::string>());
                rule.clauses.push_back(std::move(clause));
            }
            rules.push_back(std::move(rule));
        }
        validate_rules(rules);
        return rules;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("bad rules file: ") + e.what());
    }
}

void save_ffc_rules(const std::vector<FfcRule>& rules, const std::filesystem::path& path) {
    json doc = json::array();
    for (const auto& rule : rules) {
        json clauses = json::array();
        for (const auto& clause : rule.clauses) {
            json c;
            c["all"] = clause.required;
            if (!clause.forbidden.empty()) c["none"] = clause.forbidden;
            clauses.push_back(std::move(c));
        }
        doc.push_back({{"category", rule.category}, {"clauses", std::move(clauses)}});
    }
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

std::string ffc_label(std::string_view root_method, const std::vector<FfcRule>& rules) {
    std::string name = lowercase(root_method);
    auto contains = [&name](const std::string& term) {
        return name.find(term) != std::string::npos;
    };
    for (const auto& rule : rules) {
        for (const auto& clause : rule.clauses) {
            bool ok = std::all_of(clause.required.begin(), clause.required.end(), contains) &&
                      std::none_of(clause.forbidden.begin(), clause.forbidden.end(), contains);
            if (ok) return rule.category;
        }
    }
    return kOthersLabel;
}

std::string protocol_label(const BuildingBlock& block, const ContractRegistry& registry) {
    const ContractInfo* info = registry.find(block.root_address);
    if (!info || !info->protocol)
        throw Error(ErrorKind::UnlabeledRoot,
                    "root address " + block.root_address.hex() + " has no protocol label");
    return *info->protocol;
}

namespace {

void count_labels(const Corpus& corpus, const ContractRegistry& registry,
                  const std::vector<FfcRule>& rules,
                  std::map<std::string, LabelDistribution>& protocol_counts,
                  std::map<std::string, LabelDistribution>& ffc_counts, bool before) {
    auto bump = [before](std::map<std::string, LabelDistribution>& counts,
                         const std::string& label) {
        auto& row = counts[label];
        row.label = label;
        if (before) row.count_before += 1;
        else row.count_after += 1;
    };
    for (const auto& block : corpus.blocks) {
        const ContractInfo* info = registry.find(block.root_address);
        if (info && info->protocol) bump(protocol_counts, *info->protocol);
        bump(ffc_counts, ffc_label(block.root_method, rules));
    }
}

std::vector<LabelDistribution> to_rows(std::map<std::string, LabelDistribution>&& counts) {
    std::vector<LabelDistribution> rows;
    rows.reserve(counts.size());
    for (auto& [label, row] : counts) {
        (void)label;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const LabelDistribution& a, const LabelDistribution& b) {
        if (a.count_after != b.count_after) return a.count_after > b.count_after;
        return a.label < b.label;
    });
    return rows;
}

} // namespace

LabelBundle build_label_sets(const Corpus& corpus, const ContractRegistry& registry,
                             const std::vector<FfcRule>& rules, const Corpus* prefilter) {
    LabelBundle bundle;
    bundle.protocol.kind = LabelKind::protocol;
    bundle.ffc.kind = LabelKind::ffc;

    for (const auto& block : corpus.blocks) {
        const ContractInfo* info = registry.find(block.root_address);
        if (info && info->protocol)
            bundle.protocol.labels.emplace(block.block_id, *info->protocol);
        std::string ffc = ffc_label(block.root_method, rules);
        if (ffc == kOthersLabel) bundle.ffc_excluded.insert(block.block_id);
        bundle.ffc.labels.emplace(block.block_id, std::move(ffc));
    }

    std::map<std::string, LabelDistribution> protocol_counts;
    std::map<std::string, LabelDistribution> ffc_counts;
    count_labels(prefilter ? *prefilter : corpus, registry, rules, protocol_counts, ffc_counts,
                 /*before=*/true);
    count_labels(corpus, registry, rules, protocol_counts, ffc_counts, /*before=*/false);
    bundle.protocol_report = to_rows(std::move(protocol_counts));
    bundle.ffc_report = to_rows(std::move(ffc_counts));
    return bundle;
}

} // namespace blockclust
