#ifndef RDFPART_DATASET_HPP
#define RDFPART_DATASET_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rdfpart/error.hpp"
#include "rdfpart/term.hpp"

namespace rdfpart {

enum class Provenance : std::uint8_t { Original, Replica };

/// A triple annotated with provenance; the partition id is implied by which
/// partition set holds the quad.
struct Quad {
    EncodedTriple triple;
    Provenance prov = Provenance::Original;

    bool operator==(const Quad&) const = default;
};

/// k partitions of quads. Each distinct triple is Original in exactly one
/// partition; replicas always shadow an existing original; a (triple,
/// partition) pair is stored at most once (presence index).
class PartitionedDataset {
public:
    explicit PartitionedDataset(std::uint32_t k) : parts_(k), presence_(k), k_(k) {
        if (k == 0) throw Error("partition count must be >= 1");
    }

    std::uint32_t k() const { return k_; }

    /// Place a triple as Original in partition p. Duplicate input triples are
    /// collapsed: a triple already placed is skipped and false returned.
    bool add_original(const EncodedTriple& t, PartitionId p) {
        check_pid(p);
        if (original_home_.contains(t)) return false;
        if (presence_[p].contains(t)) throw Error("original added after replica");
        presence_[p].insert(t);
        parts_[p].push_back({t, Provenance::Original});
        original_home_.emplace(t, p);
        return true;
    }

    /// Copy a triple into partition p as Replica; no-op when (t, p) is already
    /// present. The triple must be Original somewhere.
    bool add_replica(const EncodedTriple& t, PartitionId p) {
        check_pid(p);
        if (!original_home_.contains(t)) throw Error("replica of a triple with no original");
        if (!presence_[p].insert(t).second) return false;
        parts_[p].push_back({t, Provenance::Replica});
        return true;
    }

    bool contains(const EncodedTriple& t, PartitionId p) const {
        check_pid(p);
        return presence_[p].contains(t);
    }

    std::optional<PartitionId> original_partition(const EncodedTriple& t) const {
        auto it = original_home_.find(t);
        if (it == original_home_.end()) return std::nullopt;
        return it->second;
    }

    const std::vector<Quad>& partition(PartitionId p) const {
        check_pid(p);
        return parts_[p];
    }

    std::size_t original_count() const { return original_home_.size(); }

    std::size_t total_quads() const {
        std::size_t n = 0;
        for (const auto& part : parts_) n += part.size();
        return n;
    }

    std::vector<std::size_t> partition_sizes() const {
        std::vector<std::size_t> sizes;
        sizes.reserve(k_);
        for (const auto& part : parts_) sizes.push_back(part.size());
        return sizes;
    }

    /// Original triples in home-partition-then-insertion order.
    std::vector<EncodedTriple> originals() const {
        std::vector<EncodedTriple> out;
        out.reserve(original_count());
        for (const auto& part : parts_) {
            for (const Quad& q : part) {
                if (q.prov == Provenance::Original) out.push_back(q.triple);
            }
        }
        return out;
    }

private:
    void check_pid(PartitionId p) const {
        if (p >= k_) throw Error("partition id " + std::to_string(p) + " out of range");
    }

    std::vector<std::vector<Quad>> parts_;
    std::vector<std::unordered_set<EncodedTriple, TripleHash>> presence_;
    std::unordered_map<EncodedTriple, PartitionId, TripleHash> original_home_;
    std::uint32_t k_;
};

namespace detail {

inline std::string partition_file_stem(PartitionId p) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "part-%05u", p);
    return buf;
}

}  // namespace detail

/// On-disk layout: per partition a quad file "part-NNNNN.quads" with one
/// "s<TAB>p<TAB>o" line per quad sorted by (s,p,o), a provenance sidecar
/// "part-NNNNN.prov" with one 'O'/'R' per aligned line, and a "partitions.meta"
/// header carrying k and the original triple count.
inline void save_partitioned(const std::filesystem::path& dir, const PartitionedDataset& pd) {
    std::filesystem::create_directories(dir);
    for (PartitionId p = 0; p < pd.k(); ++p) {
        std::vector<Quad> quads = pd.partition(p);
        std::sort(quads.begin(), quads.end(),
                  [](const Quad& a, const Quad& b) { return a.triple < b.triple; });
        std::string stem = detail::partition_file_stem(p);
        std::ofstream qf(dir / (stem + ".quads"), std::ios::binary | std::ios::trunc);
        std::ofstream pf(dir / (stem + ".prov"), std::ios::binary | std::ios::trunc);
        if (!qf || !pf) throw Error("cannot write partition files in " + dir.string());
        for (const Quad& q : quads) {
            qf << q.triple.s << '\t' << q.triple.p << '\t' << q.triple.o << '\n';
            pf << (q.prov == Provenance::Original ? 'O' : 'R') << '\n';
        }
    }
    std::ofstream meta(dir / "partitions.meta", std::ios::binary | std::ios::trunc);
    meta << "k\t" << pd.k() << '\n' << "originals\t" << pd.original_count() << '\n';
}

inline PartitionedDataset load_partitioned(const std::filesystem::path& dir) {
    std::ifstream meta(dir / "partitions.meta", std::ios::binary);
    if (!meta) throw Error("cannot open " + (dir / "partitions.meta").string());
    std::string key;
    std::uint32_t k = 0;
    std::size_t originals = 0;
    if (!(meta >> key >> k) || key != "k") throw CorruptFile("bad partitions.meta");
    if (!(meta >> key >> originals) || key != "originals") throw CorruptFile("bad partitions.meta");

    PartitionedDataset pd(k);
    // two passes so originals exist before any replica is inserted
    std::vector<std::vector<std::pair<EncodedTriple, Provenance>>> rows(k);
    for (PartitionId p = 0; p < k; ++p) {
        std::string stem = detail::partition_file_stem(p);
        std::ifstream qf(dir / (stem + ".quads"), std::ios::binary);
        std::ifstream pf(dir / (stem + ".prov"), std::ios::binary);
        if (!qf || !pf) throw CorruptFile("missing partition files for " + stem);
        std::string qline, pline;
        while (std::getline(qf, qline)) {
            if (!std::getline(pf, pline) || pline.empty())
                throw CorruptFile("provenance sidecar shorter than quad file " + stem);
            EncodedTriple t;
            char* end = nullptr;
            t.s = std::strtoull(qline.c_str(), &end, 10);
            if (!end || *end != '\t') throw CorruptFile("bad quad line in " + stem);
            t.p = std::strtoull(end + 1, &end, 10);
            if (!end || *end != '\t') throw CorruptFile("bad quad line in " + stem);
            t.o = std::strtoull(end + 1, &end, 10);
            if (!end || *end != '\0') throw CorruptFile("bad quad line in " + stem);
            if (pline[0] != 'O' && pline[0] != 'R') throw CorruptFile("bad provenance tag in " + stem);
            rows[p].emplace_back(t, pline[0] == 'O' ? Provenance::Original : Provenance::Replica);
        }
        if (std::getline(pf, pline) && !pline.empty())
            throw CorruptFile("provenance sidecar longer than quad file " + stem);
    }
    for (PartitionId p = 0; p < k; ++p) {
        for (const auto& [t, prov] : rows[p]) {
            if (prov == Provenance::Original && !pd.add_original(t, p))
                throw CorruptFile("triple original in two partitions");
        }
    }
    for (PartitionId p = 0; p < k; ++p) {
        for (const auto& [t, prov] : rows[p]) {
            if (prov != Provenance::Replica) continue;
            if (!pd.original_partition(t)) throw CorruptFile("replica with no original");
            if (!pd.add_replica(t, p)) throw CorruptFile("duplicate (triple, partition) pair");
        }
    }
    if (pd.original_count() != originals)
        throw CorruptFile("original count mismatch in partitions.meta");
    return pd;
}

}  // namespace rdfpart

#endif  // RDFPART_DATASET_HPP
