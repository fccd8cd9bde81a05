#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "isocomp/common.hpp"

namespace isocomp {

enum class Family {
    IntLattice,       // Z^d, generators {0, +-e_i}
    FreeGroup,        // F_r, generators {e, a_i, a_i^-1}
    WreathFiniteOverZ,// C_m wr Z, generators {e, t, t^-1} + every nonzero lamp at 0
    WreathZOverZ,     // Z wr Z,  generators {e, t, t^-1, a, a^-1}
};

/// Lamp configuration and cursor of a wreath-product element (k, u).
/// Lamps are stored sparsely: strictly increasing sites, no zero values.
/// For C_m the value is the canonical residue in [1, m-1].
struct WreathData {
    int64_t shift = 0;
    std::vector<std::pair<int32_t, int32_t>> lamps;
    bool operator==(const WreathData&) const = default;
};

using IntVec = std::vector<int64_t>;
using FreeWordLetters = std::vector<int8_t>;  // +i / -i for generator i (1-based), freely reduced

struct GroupElement {
    std::variant<IntVec, FreeWordLetters, WreathData> data;
    bool operator==(const GroupElement&) const = default;

    const WreathData& wreath() const { return std::get<WreathData>(data); }
    WreathData& wreath() { return std::get<WreathData>(data); }
};

/// A finitely generated group with a fixed symmetric generating set that
/// contains the identity (so S^n is exactly the ball B(1,n)), plus canonical
/// normal forms for its elements.
class MarkedGroup {
public:
    static MarkedGroup intLattice(int d);
    static MarkedGroup freeGroup(int r);
    static MarkedGroup wreathFinite(int m);  // C_m wr Z
    static MarkedGroup wreathZ();            // Z wr Z

    /// Parse a config string: "Z", "Z^2", "F2", "C2wrZ", "C3wrZ", "ZwrZ".
    static MarkedGroup parse(const std::string& spec);

    Family family() const { return family_; }
    int param() const { return param_; }  // d, r, or m
    const std::string& name() const { return name_; }

    const std::vector<GroupElement>& generators() const { return generators_; }
    size_t numGenerators() const { return generators_.size(); }
    /// Index of s^-1 in the generator list.
    int inverseGenerator(int i) const { return invGen_[i]; }

    GroupElement identity() const;
    bool isIdentity(const GroupElement& g) const;
    GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
    GroupElement inverse(const GroupElement& a) const;

    /// Canonical byte encoding; equal elements have identical encodings.
    void encode(const GroupElement& g, std::string& out) const;
    std::string encode(const GroupElement& g) const;

    std::string toString(const GroupElement& g) const;

    /// Exact word length from the Parry tour formula (wreath families only):
    /// L(gamma) + sum of lamp costs, L(gamma) the shorter of the two
    /// interval-sweep orders through [min supp(u), max supp(u)] ending at k.
    int64_t wordLengthParry(const GroupElement& g) const;

    /// Exact word length by breadth-first search; returns nullopt if it
    /// exceeds maxRadius. Deterministic regardless of generator ordering.
    std::optional<int> wordLengthBfs(const GroupElement& g, int maxRadius,
                                     int64_t budget = 20'000'000) const;

    bool sameGroup(const MarkedGroup& other) const {
        return family_ == other.family_ && param_ == other.param_;
    }

private:
    MarkedGroup() = default;
    void buildGenerators();

    Family family_ = Family::IntLattice;
    int param_ = 1;
    std::string name_;
    std::vector<GroupElement> generators_;
    std::vector<int> invGen_;
};

/// theta : Z wr Z -> C_2 wr Z, same shift, lamps reduced mod 2 (a group
/// morphism; the target is wreathFinite(2)).
GroupElement project_theta(const GroupElement& g);

/// Parry length of theta(g) in C_2 wr Z without materializing a group object.
int64_t theta_length(const GroupElement& zwrzElement);

/// The enumerated radius-n Cayley ball with left-multiplication tables.
/// Element 0 is the identity; indices are in order of first BFS discovery
/// under the fixed generator order, so lengths are nondecreasing.
class Ball {
public:
    static constexpr int32_t kOutside = -1;

    Ball(std::shared_ptr<const MarkedGroup> group, int radius, int64_t budget,
         bool withTables);

    const MarkedGroup& group() const { return *group_; }
    std::shared_ptr<const MarkedGroup> groupPtr() const { return group_; }
    int radius() const { return radius_; }
    int64_t size() const { return static_cast<int64_t>(elements_.size()); }

    const GroupElement& element(int32_t i) const { return elements_[i]; }
    int32_t length(int32_t i) const { return length_[i]; }

    /// Ball volume V(k) = #{g : |g| <= k}, exact.
    int64_t volume(int k) const;
    /// Sphere size S(k) = V(k) - V(k-1).
    int64_t sphereSize(int k) const;
    /// Index range [first, last) of the sphere of radius k.
    std::pair<int32_t, int32_t> sphere(int k) const;

    bool hasTables() const { return hasTables_; }
    /// Index of generators()[j] * element(i), or kOutside.
    int32_t leftMul(int32_t i, int j) const { return leftMul_[size_t(i) * nGen_ + j]; }

    /// Index of g in the ball, or kOutside if not enumerated.
    int32_t find(const GroupElement& g) const;

    /// index of g * element(i) via normal forms (works for any g).
    int32_t findProduct(const GroupElement& g, int32_t i) const;

private:
    int32_t lookup(const std::string& enc) const;
    void insert(const std::string& enc, int32_t idx);

    std::shared_ptr<const MarkedGroup> group_;
    int radius_ = 0;
    size_t nGen_ = 0;
    bool hasTables_ = true;
    std::vector<GroupElement> elements_;
    std::vector<int32_t> length_;
    std::vector<int64_t> cumVolume_;  // cumVolume_[k] = V(k)
    std::vector<int32_t> leftMul_;
    // 64-bit-hash index with verification against the stored normal form;
    // colliding hashes (different encoding, same hash) go to overflow_.
    std::unordered_map<uint64_t, int32_t> index_;
    std::vector<std::pair<uint64_t, int32_t>> overflow_;
};

/// Enumerate B(1,n). Budget guards memory: exceeding it raises ResourceError
/// naming the attained radius. withTables=false skips the left-multiplication
/// table (element lookups still work) for memory-lean passes.
std::shared_ptr<const Ball> enumerate_ball(std::shared_ptr<const MarkedGroup> group, int n,
                                           int64_t budget = 20'000'000, bool withTables = true);

/// CSV dump: one "index,length,normalform" row per element.
std::string ball_to_csv(const Ball& ball);

}  // namespace isocomp
