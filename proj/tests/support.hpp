// Fixture helpers shared by the test binaries.
#pragma once

#include "blockclust/core.hpp"
#include "blockclust/extraction.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

// Address with a recognizable pattern: byte i repeated.
inline blockclust::Address addr(std::uint8_t i) {
    blockclust::Address a;
    a.bytes.fill(i);
    return a;
}

// Builds a trace from parallel arrays: parents[i] is the parent index of
// call i (call 0 is the root and its entry is ignored).
inline blockclust::TransactionTrace make_trace(const std::string& tx_id,
                                               const std::vector<int>& parents,
                                               const std::vector<std::string>& methods,
                                               const std::vector<blockclust::Address>& callees) {
    blockclust::TransactionTrace t;
    t.tx_id = tx_id;
    for (std::size_t i = 0; i < parents.size(); ++i) {
        blockclust::CallRecord c;
        c.index = static_cast<std::uint32_t>(i);
        if (i > 0) c.parent = static_cast<std::uint32_t>(parents[i]);
        c.method_name = methods[i];
        c.callee = callees[i];
        t.calls.push_back(std::move(c));
    }
    return t;
}

// Block built directly from a parent vector (parents[0] ignored), methods
// and node addresses; extract_block supplies ids, edges and the hash.
inline blockclust::BuildingBlock make_block(const std::vector<int>& parents,
                                            const std::vector<std::string>& methods,
                                            const std::vector<blockclust::Address>& callees) {
    return blockclust::extract_block(make_trace("t", parents, methods, callees), 0);
}

// Canonical form of a flat clustering: sorted list of sorted member
// groups, independent of cluster ids.
template <typename Key>
inline std::vector<std::vector<Key>> partition_of(const std::map<Key, int>& assignment) {
    std::map<int, std::vector<Key>> groups;
    for (const auto& [key, cluster] : assignment) groups[cluster].push_back(key);
    std::vector<std::vector<Key>> out;
    for (auto& [cluster, members] : groups) {
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Unique temporary directory for one test case, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("blockclust-test-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace testsupport
