#include "blockclust/core.hpp"
#include "blockclust/labeling.hpp"

#include <doctest.h>

#include <utility>

#include "support.hpp"

using namespace blockclust;
using testsupport::addr;
using testsupport::make_block;

TEST_CASE("keyword labeling covers every category and honours precedence") {
    auto rules = default_ffc_rules();
    // name -> expected category. The expectations pin down first-match
    // semantics across rows (Swap before Lock Capital before Redeem ...)
    // and within-row clause order, plus the forbidden-substring guards.
    const std::pair<const char*, const char*> cases[] = {
        // Swap
        {"swapExactTokens", "Swap"},
        {"exchangeUnderlying", "Swap"},
        {"voteSwap", "Swap"}, // row precedence: Swap row beats Governance row
        // Lock Capital
        {"deposit", "Lock Capital"},
        {"stakingDeposit", "Lock Capital"}, // deposit clause fires first
        {"addLiquidity", "Lock Capital"},
        {"enterStakingPool", "Lock Capital"},
        {"stakeTokens", "Lock Capital"},
        {"lockTokens", "Lock Capital"},
        {"lendToPool", "Lock Capital"},
        {"collateralizePosition", "Lock Capital"},
        // Redeem or Withdraw
        {"withdraw", "Redeem or Withdraw"},
        {"withdrawCollateral", "Redeem or Withdraw"}, // 'collateralize' not contained
        {"removeLiquidity", "Redeem or Withdraw"},
        {"unstakeTokens", "Redeem or Withdraw"},      // 'unstake' blocks the stake clause
        {"emergencyUnstaking", "Redeem or Withdraw"}, // 'unstaking' blocks the staking clause
        {"unstakingWithdrawal", "Redeem or Withdraw"},
        {"unlockFunds", "Redeem or Withdraw"}, // 'unlock' blocks the lock clause
        // Borrow
        {"borrowAsset", "Borrow"},
        // Get Interest or Rewards
        {"getReward", "Get Interest or Rewards"},
        {"getFeesCollected", "Get Interest or Rewards"},
        {"claimRewards", "Get Interest or Rewards"},
        {"claimTradingFees", "Get Interest or Rewards"},
        {"harvestYield", "Get Interest or Rewards"},
        {"earnInterest", "Get Interest or Rewards"},
        // Repay
        {"repayLoan", "Repay"},
        // Governance
        {"voteForProposal", "Governance"},
        {"castVote", "Governance"},
        // Liquidate
        {"liquidatePosition", "Liquidate"},
        {"selfLiquidation", "Liquidate"},
        {"removeLiquidation", "Liquidate"}, // 'liquidity' absent, so not Redeem
        // Others
        {"transfer", "Others"},
        {"balanceOf", "Others"},
        {"approve", "Others"},
        {"blockTransfer", "Others"}, // 'block' is forbidden in the lock clause
        {"", "Others"},
    };
    for (const auto& [name, want] : cases) {
        CAPTURE(name);
        CHECK(ffc_label(name, rules) == want);
    }
}

TEST_CASE("keyword matching is case-insensitive") {
    auto rules = default_ffc_rules();
    CHECK(ffc_label("SwapExactTokens", rules) == "Swap");
    CHECK(ffc_label("WITHDRAW", rules) == "Redeem or Withdraw");
    CHECK(ffc_label("AddLiquidity", rules) == "Lock Capital");
}

TEST_CASE("rules save/load round-trips and validates") {
    testsupport::TempDir tmp;
    auto path = tmp.path() / "rules.json";
    auto rules = default_ffc_rules();
    save_ffc_rules(rules, path);
    auto back = load_ffc_rules(path);
    REQUIRE(back.size() == rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) {
        CHECK(back[i].category == rules[i].category);
        REQUIRE(back[i].clauses.size() == rules[i].clauses.size());
        for (std::size_t j = 0; j < rules[i].clauses.size(); ++j) {
            CHECK(back[i].clauses[j].required == rules[i].clauses[j].required);
            CHECK(back[i].clauses[j].forbidden == rules[i].clauses[j].forbidden);
        }
    }

    SUBCASE("the fallback category may not appear as a rule") {
        testsupport::write_file(path,
                                R"([{"category":"Others","clauses":[{"all":["x"]}]}])");
        CHECK_THROWS_AS((void)load_ffc_rules(path), Error);
    }
    SUBCASE("clauses must require something") {
        testsupport::write_file(path, R"([{"category":"Swap","clauses":[{"all":[]}]}])");
        CHECK_THROWS_AS((void)load_ffc_rules(path), Error);
    }
    SUBCASE("rules need at least one clause") {
        testsupport::write_file(path, R"([{"category":"Swap","clauses":[]}])");
        CHECK_THROWS_AS((void)load_ffc_rules(path), Error);
    }
}

TEST_CASE("protocol labels come from the root address registry entry") {
    ContractRegistry reg;
    ContractInfo info;
    info.address = addr(1);
    info.protocol = "uniswap";
    reg.entries.emplace(info.address, info);
    ContractInfo bare;
    bare.address = addr(2);
    reg.entries.emplace(bare.address, bare);

    BuildingBlock b = make_block({-1, 0}, {"swap", "transfer"}, {addr(1), addr(5)});
    CHECK(protocol_label(b, reg) == "uniswap");

    SUBCASE("registered root without a protocol") {
        BuildingBlock u = make_block({-1, 0}, {"swap", "x"}, {addr(2), addr(5)});
        try {
            (void)protocol_label(u, reg);
            FAIL("expected a throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::UnlabeledRoot);
        }
    }
    SUBCASE("unregistered root") {
        BuildingBlock u = make_block({-1, 0}, {"swap", "x"}, {addr(9), addr(5)});
        CHECK_THROWS_AS((void)protocol_label(u, reg), Error);
    }
}

TEST_CASE("label bundles cover both axes and track exclusions") {
    ContractRegistry reg;
    ContractInfo a;
    a.address = addr(1);
    a.protocol = "alpha";
    reg.entries.emplace(a.address, a);
    ContractInfo b;
    b.address = addr(2);
    b.protocol = "beta";
    reg.entries.emplace(b.address, b);

    Corpus corpus;
    corpus.blocks.push_back(make_block({-1, 0}, {"swapTokens", "t"}, {addr(1), addr(9)}));
    corpus.blocks.push_back(make_block({-1, 0}, {"deposit", "t"}, {addr(2), addr(9)}));
    corpus.blocks.push_back(make_block({-1, 0}, {"ping", "t"}, {addr(2), addr(9)}));
    corpus.blocks[0].count = 4;
    corpus.blocks[1].count = 2;
    corpus.blocks[2].count = 1;

    auto rules = default_ffc_rules();
    LabelBundle bundle = build_label_sets(corpus, reg, rules);

    CHECK(bundle.protocol.kind == LabelKind::protocol);
    CHECK(bundle.ffc.kind == LabelKind::ffc);
    CHECK(bundle.protocol.labels.size() == 3);
    CHECK(bundle.ffc.labels.size() == 3);
    CHECK(bundle.protocol.labels.at(corpus.blocks[0].block_id) == "alpha");
    CHECK(bundle.ffc.labels.at(corpus.blocks[0].block_id) == "Swap");
    CHECK(bundle.ffc.labels.at(corpus.blocks[1].block_id) == "Lock Capital");
    CHECK(bundle.ffc.labels.at(corpus.blocks[2].block_id) == "Others");
    // "Others" blocks are marked for exclusion from FFC evaluation.
    CHECK(bundle.ffc_excluded.count(corpus.blocks[2].block_id) == 1);
    CHECK(bundle.ffc_excluded.size() == 1);

    SUBCASE("blocks with unlabeled roots are skipped on the protocol axis") {
        Corpus c2 = corpus;
        c2.blocks.push_back(make_block({-1, 0}, {"swap", "x"}, {addr(9), addr(5)}));
        c2.blocks.back().count = 1;
        LabelBundle b2 = build_label_sets(c2, reg, rules);
        CHECK(b2.protocol.labels.size() == 3);
        CHECK(b2.ffc.labels.size() == 4); // FFC still labels it
    }

    SUBCASE("distributions count distinct blocks per label") {
        LabelBundle b2 = build_label_sets(corpus, reg, rules);
        std::size_t swap_count = 99, others_count = 99;
        for (const auto& row : b2.ffc_report) {
            if (row.label == "Swap") swap_count = row.count_after;
            if (row.label == kOthersLabel) others_count = row.count_after;
        }
        CHECK(swap_count == 1);
        CHECK(others_count == 1);
        std::size_t beta = 99;
        for (const auto& row : b2.protocol_report)
            if (row.label == "beta") beta = row.count_after;
        CHECK(beta == 2);
    }

    SUBCASE("prefilter counts feed the before-filter column") {
        Corpus pre = corpus;
        BuildingBlock solo;
        solo.root_address = addr(1);
        solo.root_method = "swapAll";
        solo.nodes = {addr(1)};
        solo.block_id = canonical_hash(solo);
        solo.count = 7;
        pre.blocks.push_back(std::move(solo));
        LabelBundle b2 = build_label_sets(corpus, reg, rules, &pre);
        std::size_t before = 0, after = 0;
        for (const auto& row : b2.ffc_report) {
            if (row.label == "Swap") {
                before = row.count_before;
                after = row.count_after;
            }
        }
        CHECK(after == 1);
        CHECK(before == 2); // the kept swap block plus the filtered single-node one
    }
}
