#include "isocomp/groups.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <deque>
#include <sstream>
#include <unordered_set>

namespace isocomp {

namespace {

void appendBytes(std::string& out, const void* p, size_t n) {
    out.append(static_cast<const char*>(p), n);
}

void appendI64(std::string& out, int64_t v) { appendBytes(out, &v, 8); }
void appendI32(std::string& out, int32_t v) { appendBytes(out, &v, 4); }

int32_t modValue(int64_t v, int m) {
    // canonical residue in [0, m-1]
    int64_t r = v % m;
    if (r < 0) r += m;
    return static_cast<int32_t>(r);
}

/// Shortest walk on Z starting at 0, covering [-a, b] (a, b >= 0), ending at k:
/// the better of the left-first and right-first sweeps.
int64_t tourLength(int64_t a, int64_t b, int64_t k) {
    int64_t leftFirst = 2 * a + b + std::llabs(b - k);
    int64_t rightFirst = 2 * b + a + std::llabs(a + k);
    return std::min(leftFirst, rightFirst);
}

}  // namespace

MarkedGroup MarkedGroup::intLattice(int d) {
    if (d < 1 || d > 8) throw UsageError("Z^d supported for 1 <= d <= 8");
    MarkedGroup g;
    g.family_ = Family::IntLattice;
    g.param_ = d;
    g.name_ = d == 1 ? "Z" : "Z^" + std::to_string(d);
    g.buildGenerators();
    return g;
}

MarkedGroup MarkedGroup::freeGroup(int r) {
    if (r < 1 || r > 13) throw UsageError("F_r supported for 1 <= r <= 13");
    MarkedGroup g;
    g.family_ = Family::FreeGroup;
    g.param_ = r;
    g.name_ = "F" + std::to_string(r);
    g.buildGenerators();
    return g;
}

MarkedGroup MarkedGroup::wreathFinite(int m) {
    if (m < 2 || m > 64) throw UsageError("C_m wr Z supported for 2 <= m <= 64");
    MarkedGroup g;
    g.family_ = Family::WreathFiniteOverZ;
    g.param_ = m;
    g.name_ = "C" + std::to_string(m) + "wrZ";
    g.buildGenerators();
    return g;
}

MarkedGroup MarkedGroup::wreathZ() {
    MarkedGroup g;
    g.family_ = Family::WreathZOverZ;
    g.param_ = 0;
    g.name_ = "ZwrZ";
    g.buildGenerators();
    return g;
}

void MarkedGroup::buildGenerators() {
    generators_.clear();
    generators_.push_back(identity());
    switch (family_) {
        case Family::IntLattice:
            for (int i = 0; i < param_; ++i) {
                IntVec plus(param_, 0), minus(param_, 0);
                plus[i] = 1;
                minus[i] = -1;
                generators_.push_back(GroupElement{plus});
                generators_.push_back(GroupElement{minus});
            }
            break;
        case Family::FreeGroup:
            for (int i = 1; i <= param_; ++i) {
                generators_.push_back(GroupElement{FreeWordLetters{static_cast<int8_t>(i)}});
                generators_.push_back(GroupElement{FreeWordLetters{static_cast<int8_t>(-i)}});
            }
            break;
        case Family::WreathFiniteOverZ: {
            generators_.push_back(GroupElement{WreathData{1, {}}});
            generators_.push_back(GroupElement{WreathData{-1, {}}});
            // the whole lamp group at position 0 (so each lamp costs one step)
            for (int v = 1; v < param_; ++v)
                generators_.push_back(GroupElement{WreathData{0, {{0, v}}}});
            break;
        }
        case Family::WreathZOverZ:
            generators_.push_back(GroupElement{WreathData{1, {}}});
            generators_.push_back(GroupElement{WreathData{-1, {}}});
            generators_.push_back(GroupElement{WreathData{0, {{0, 1}}}});
            generators_.push_back(GroupElement{WreathData{0, {{0, -1}}}});
            break;
    }
    invGen_.assign(generators_.size(), -1);
    for (size_t i = 0; i < generators_.size(); ++i) {
        GroupElement inv = inverse(generators_[i]);
        for (size_t j = 0; j < generators_.size(); ++j) {
            if (generators_[j] == inv) {
                invGen_[i] = static_cast<int>(j);
                break;
            }
        }
        if (invGen_[i] < 0) throw InvariantError("generator set not symmetric");
    }
}

GroupElement MarkedGroup::identity() const {
    switch (family_) {
        case Family::IntLattice: return GroupElement{IntVec(param_, 0)};
        case Family::FreeGroup: return GroupElement{FreeWordLetters{}};
        default: return GroupElement{WreathData{}};
    }
}

bool MarkedGroup::isIdentity(const GroupElement& g) const { return g == identity(); }

GroupElement MarkedGroup::multiply(const GroupElement& a, const GroupElement& b) const {
    switch (family_) {
        case Family::IntLattice: {
            const auto* va = std::get_if<IntVec>(&a.data);
            const auto* vb = std::get_if<IntVec>(&b.data);
            if (!va || !vb || va->size() != size_t(param_) || vb->size() != size_t(param_))
                throw UsageError("multiply: operands not in " + name_);
            IntVec out(param_);
            for (int i = 0; i < param_; ++i) out[i] = (*va)[i] + (*vb)[i];
            return GroupElement{out};
        }
        case Family::FreeGroup: {
            const auto* wa = std::get_if<FreeWordLetters>(&a.data);
            const auto* wb = std::get_if<FreeWordLetters>(&b.data);
            if (!wa || !wb) throw UsageError("multiply: operands not in " + name_);
            FreeWordLetters out = *wa;
            for (int8_t letter : *wb) {
                if (letter == 0 || std::abs(letter) > param_)
                    throw UsageError("multiply: letter outside " + name_);
                if (!out.empty() && out.back() == -letter)
                    out.pop_back();
                else
                    out.push_back(letter);
            }
            return GroupElement{out};
        }
        default: {
            const auto* ua = std::get_if<WreathData>(&a.data);
            const auto* ub = std::get_if<WreathData>(&b.data);
            if (!ua || !ub) throw UsageError("multiply: operands not in " + name_);
            // (n,f)(m,g) = (n+m, tau_m f + g), tau_m f(x) = f(m+x): site s -> s-m
            WreathData out;
            out.shift = ua->shift + ub->shift;
            out.lamps.reserve(ua->lamps.size() + ub->lamps.size());
            const int64_t m = ub->shift;
            size_t i = 0, j = 0;
            auto push = [&](int64_t site, int64_t value) {
                if (family_ == Family::WreathFiniteOverZ) value = modValue(value, param_);
                if (value == 0) return;
                out.lamps.emplace_back(static_cast<int32_t>(site), static_cast<int32_t>(value));
            };
            while (i < ua->lamps.size() || j < ub->lamps.size()) {
                int64_t sa = i < ua->lamps.size() ? ua->lamps[i].first - m : INT64_MAX;
                int64_t sb = j < ub->lamps.size() ? ub->lamps[j].first : INT64_MAX;
                if (sa < sb) {
                    push(sa, ua->lamps[i].second);
                    ++i;
                } else if (sb < sa) {
                    push(sb, ub->lamps[j].second);
                    ++j;
                } else {
                    push(sa, int64_t(ua->lamps[i].second) + ub->lamps[j].second);
                    ++i;
                    ++j;
                }
            }
            return GroupElement{std::move(out)};
        }
    }
}

GroupElement MarkedGroup::inverse(const GroupElement& a) const {
    switch (family_) {
        case Family::IntLattice: {
            IntVec out = std::get<IntVec>(a.data);
            for (auto& c : out) c = -c;
            return GroupElement{out};
        }
        case Family::FreeGroup: {
            const auto& w = std::get<FreeWordLetters>(a.data);
            FreeWordLetters out(w.rbegin(), w.rend());
            for (auto& l : out) l = -l;
            return GroupElement{out};
        }
        default: {
            // (n,f)^-1 = (-n, -tau_{-n} f): site s -> s+n, value negated
            const auto& u = std::get<WreathData>(a.data);
            WreathData out;
            out.shift = -u.shift;
            out.lamps.reserve(u.lamps.size());
            for (const auto& [site, value] : u.lamps) {
                int32_t v = family_ == Family::WreathFiniteOverZ
                                ? modValue(-int64_t(value), param_)
                                : -value;
                out.lamps.emplace_back(static_cast<int32_t>(site + u.shift), v);
            }
            return GroupElement{std::move(out)};
        }
    }
}

void MarkedGroup::encode(const GroupElement& g, std::string& out) const {
    out.clear();
    switch (family_) {
        case Family::IntLattice:
            for (int64_t c : std::get<IntVec>(g.data)) appendI64(out, c);
            break;
        case Family::FreeGroup: {
            const auto& w = std::get<FreeWordLetters>(g.data);
            appendBytes(out, w.data(), w.size());
            break;
        }
        default: {
            const auto& u = std::get<WreathData>(g.data);
            appendI64(out, u.shift);
            for (const auto& [site, value] : u.lamps) {
                appendI32(out, site);
                appendI32(out, value);
            }
            break;
        }
    }
}

std::string MarkedGroup::encode(const GroupElement& g) const {
    std::string out;
    encode(g, out);
    return out;
}

std::string MarkedGroup::toString(const GroupElement& g) const {
    std::ostringstream os;
    switch (family_) {
        case Family::IntLattice: {
            const auto& v = std::get<IntVec>(g.data);
            if (param_ == 1) {
                os << v[0];
            } else {
                os << "(";
                for (int i = 0; i < param_; ++i) os << (i ? "," : "") << v[i];
                os << ")";
            }
            break;
        }
        case Family::FreeGroup: {
            const auto& w = std::get<FreeWordLetters>(g.data);
            if (w.empty()) return "e";
            for (int8_t l : w)
                os << static_cast<char>(l > 0 ? 'a' + l - 1 : 'A' - l - 1);
            break;
        }
        default: {
            const auto& u = std::get<WreathData>(g.data);
            if (u.shift == 0 && u.lamps.empty()) return "e";
            os << "(" << u.shift << "|";
            bool first = true;
            for (const auto& [site, value] : u.lamps) {
                if (!first) os << ",";
                first = false;
                os << site << ":" << value;
            }
            os << ")";
            break;
        }
    }
    return os.str();
}

int64_t MarkedGroup::wordLengthParry(const GroupElement& g) const {
    if (family_ != Family::WreathFiniteOverZ && family_ != Family::WreathZOverZ)
        throw UsageError("wordLengthParry: " + name_ + " is not a wreath product");
    const auto& u = std::get<WreathData>(g.data);
    int64_t lampCost = 0;
    for (const auto& [site, value] : u.lamps) {
        (void)site;
        lampCost += family_ == Family::WreathFiniteOverZ
                        ? std::min<int64_t>(value, param_ - value)
                        : std::llabs(value);
    }
    if (u.lamps.empty()) return std::llabs(u.shift) + lampCost;
    // lamps are stored relative to the cursor; the tour runs over the
    // absolute positions site + shift
    int64_t a = std::max<int64_t>(0, -(u.lamps.front().first + u.shift));
    int64_t b = std::max<int64_t>(0, u.lamps.back().first + u.shift);
    return tourLength(a, b, u.shift) + lampCost;
}

std::optional<int> MarkedGroup::wordLengthBfs(const GroupElement& g, int maxRadius,
                                              int64_t budget) const {
    if (maxRadius < 0) throw UsageError("wordLengthBfs: maxRadius must be >= 0");
    std::string target = encode(g);
    std::string enc = encode(identity());
    if (enc == target) return 0;
    std::unordered_set<std::string> seen{enc};
    std::deque<GroupElement> frontier{identity()};
    for (int dist = 1; dist <= maxRadius; ++dist) {
        std::deque<GroupElement> next;
        for (const auto& x : frontier) {
            for (const auto& s : generators_) {
                GroupElement y = multiply(s, x);
                encode(y, enc);
                if (enc == target) return dist;
                if (seen.insert(enc).second) {
                    next.push_back(std::move(y));
                    if (static_cast<int64_t>(seen.size()) > budget)
                        throw ResourceError("wordLengthBfs: budget exceeded at radius " +
                                            std::to_string(dist));
                }
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) break;  // group exhausted (finite)
    }
    return std::nullopt;
}

MarkedGroup MarkedGroup::parse(const std::string& spec) {
    if (spec == "Z") return intLattice(1);
    if (spec == "ZwrZ") return wreathZ();
    if (spec.rfind("Z^", 0) == 0) {
        int d = 0;
        auto [p, ec] = std::from_chars(spec.data() + 2, spec.data() + spec.size(), d);
        if (ec == std::errc() && p == spec.data() + spec.size()) return intLattice(d);
    }
    if (spec.size() >= 2 && spec[0] == 'F') {
        int r = 0;
        auto [p, ec] = std::from_chars(spec.data() + 1, spec.data() + spec.size(), r);
        if (ec == std::errc() && p == spec.data() + spec.size()) return freeGroup(r);
    }
    if (spec.size() > 4 && spec[0] == 'C' && spec.substr(spec.size() - 3) == "wrZ") {
        int m = 0;
        auto [p, ec] = std::from_chars(spec.data() + 1, spec.data() + spec.size() - 3, m);
        if (ec == std::errc() && p == spec.data() + spec.size() - 3) return wreathFinite(m);
    }
    throw UsageError("unknown group descriptor '" + spec +
                     "' (expected Z, Z^d, Fr, CmwrZ, ZwrZ)");
}

GroupElement project_theta(const GroupElement& g) {
    const auto& u = std::get<WreathData>(g.data);
    WreathData out;
    out.shift = u.shift;
    for (const auto& [site, value] : u.lamps)
        if (value % 2 != 0) out.lamps.emplace_back(site, 1);
    return GroupElement{std::move(out)};
}

int64_t theta_length(const GroupElement& zwrzElement) {
    GroupElement t = project_theta(zwrzElement);
    const auto& u = t.wreath();
    if (u.lamps.empty()) return std::llabs(u.shift);
    int64_t a = std::max<int64_t>(0, -(u.lamps.front().first + u.shift));
    int64_t b = std::max<int64_t>(0, u.lamps.back().first + u.shift);
    return tourLength(a, b, u.shift) + static_cast<int64_t>(u.lamps.size());
}

Ball::Ball(std::shared_ptr<const MarkedGroup> group, int radius, int64_t budget, bool withTables)
    : group_(std::move(group)), radius_(radius), hasTables_(withTables) {
    if (radius < 0) throw UsageError("enumerate_ball: radius must be >= 0");
    nGen_ = group_->numGenerators();
    std::string enc;
    elements_.push_back(group_->identity());
    length_.push_back(0);
    group_->encode(elements_[0], enc);
    insert(enc, 0);

    std::string childEnc;
    for (int32_t i = 0; i < static_cast<int32_t>(elements_.size()); ++i) {
        int len = length_[i];
        bool expand = len < radius_;
        for (size_t j = 0; j < nGen_; ++j) {
            GroupElement child = group_->multiply(group_->generators()[j], elements_[i]);
            group_->encode(child, childEnc);
            int32_t idx = lookup(childEnc);
            if (idx == kOutside && expand) {
                idx = static_cast<int32_t>(elements_.size());
                if (idx >= budget)
                    throw ResourceError("ball budget (" + std::to_string(budget) +
                                        ") exceeded; attained radius " + std::to_string(len));
                elements_.push_back(std::move(child));
                length_.push_back(len + 1);
                insert(childEnc, idx);
            }
            if (hasTables_) {
                if (leftMul_.size() < (size_t(i) + 1) * nGen_)
                    leftMul_.resize((size_t(i) + 1) * nGen_, kOutside);
                leftMul_[size_t(i) * nGen_ + j] = idx;
            }
        }
    }
    cumVolume_.assign(radius_ + 1, 0);
    for (int32_t l : length_) ++cumVolume_[l];
    for (int k = 1; k <= radius_; ++k) cumVolume_[k] += cumVolume_[k - 1];
}

int32_t Ball::lookup(const std::string& enc) const {
    uint64_t h = fnv1a64(enc.data(), enc.size());
    std::string probe;
    auto it = index_.find(h);
    if (it != index_.end()) {
        group_->encode(elements_[it->second], probe);
        if (probe == enc) return it->second;
    }
    for (const auto& [oh, oi] : overflow_) {
        if (oh != h) continue;
        group_->encode(elements_[oi], probe);
        if (probe == enc) return oi;
    }
    return kOutside;
}

void Ball::insert(const std::string& enc, int32_t idx) {
    uint64_t h = fnv1a64(enc.data(), enc.size());
    auto [it, fresh] = index_.emplace(h, idx);
    if (!fresh) overflow_.emplace_back(h, idx);
}

int64_t Ball::volume(int k) const {
    if (k < 0) return 0;
    if (k > radius_) throw UsageError("volume: " + std::to_string(k) + " exceeds ball radius");
    return cumVolume_[k];
}

int64_t Ball::sphereSize(int k) const { return volume(k) - (k > 0 ? volume(k - 1) : 0); }

std::pair<int32_t, int32_t> Ball::sphere(int k) const {
    int64_t lo = k > 0 ? volume(k - 1) : 0;
    return {static_cast<int32_t>(lo), static_cast<int32_t>(volume(k))};
}

int32_t Ball::find(const GroupElement& g) const {
    std::string enc;
    group_->encode(g, enc);
    return lookup(enc);
}

int32_t Ball::findProduct(const GroupElement& g, int32_t i) const {
    return find(group_->multiply(g, elements_[i]));
}

std::shared_ptr<const Ball> enumerate_ball(std::shared_ptr<const MarkedGroup> group, int n,
                                           int64_t budget, bool withTables) {
    return std::make_shared<const Ball>(std::move(group), n, budget, withTables);
}

std::string ball_to_csv(const Ball& ball) {
    std::ostringstream os;
    os << "index,length,normalform\n";
    for (int32_t i = 0; i < ball.size(); ++i)
        os << i << "," << ball.length(i) << "," << ball.group().toString(ball.element(i)) << "\n";
    return os.str();
}

}  // namespace isocomp
