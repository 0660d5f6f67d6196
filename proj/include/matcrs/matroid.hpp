#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "matcrs/errors.hpp"
#include "matcrs/rational.hpp"
#include "matcrs/subset.hpp"

namespace matcrs {

struct AxiomReport {
    bool ok = true;
    std::string reason;
    Mask set_a = 0, set_b = 0;  // counterexample pair when !ok
};

struct PolytopeReport {
    bool inside = true;
    Mask witness = 0;   // maximally violating subset when !inside
    Rat violation = 0;  // sum over witness minus its rank (or -x_i for x_i < 0)
};

/// A matroid over ground set {0,...,n-1}, encoded by its rank oracle.
/// Values are immutable after construction; all oracles are pure.
class Matroid {
public:
    struct Uniform {
        int k;
    };
    struct Partition {
        std::vector<Mask> blocks;  // pairwise disjoint; uncovered elements are free
        std::vector<int> capacities;
    };
    struct Graphic {
        int vertices;
        std::vector<std::pair<int, int>> edges;  // element i = edges[i]; u==v is a loop
    };
    struct Explicit {
        std::vector<Mask> independent;   // as given (sorted, deduplicated)
        std::vector<uint8_t> rank_table;  // rank of every subset, size 2^n
    };
    struct Linear {
        std::vector<std::vector<Rat>> columns;  // element i = columns[i]
        int dim;
    };
    struct Minor {
        std::shared_ptr<const Matroid> parent;
        std::vector<int> keep;  // minor element i = parent element keep[i]
        Mask contracted;        // in parent coordinates
        int contracted_rank;
    };
    using Family = std::variant<Uniform, Partition, Graphic, Explicit, Linear, Minor>;

    static Matroid uniform(int n, int k) {
        check_ground(n);
        if (k < 0) throw std::invalid_argument("uniform: negative k");
        return Matroid(n, Uniform{k});
    }

    static Matroid partition(int n, std::vector<std::vector<int>> blocks,
                             std::vector<int> capacities) {
        check_ground(n);
        if (blocks.size() != capacities.size())
            throw std::invalid_argument("partition: blocks/capacities size mismatch");
        Partition fam;
        Mask seen = 0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            if (capacities[b] < 0) throw std::invalid_argument("partition: negative capacity");
            Mask m = 0;
            for (int e : blocks[b]) {
                if (e < 0 || e >= n) throw std::invalid_argument("partition: element out of range");
                if (has(seen, e)) throw std::invalid_argument("partition: overlapping blocks");
                seen |= bit(e);
                m |= bit(e);
            }
            fam.blocks.push_back(m);
            fam.capacities.push_back(capacities[b]);
        }
        return Matroid(n, std::move(fam));
    }

    static Matroid graphic(int vertices, std::vector<std::pair<int, int>> edges) {
        int n = static_cast<int>(edges.size());
        check_ground(n);
        if (vertices < 0) throw std::invalid_argument("graphic: negative vertex count");
        for (auto [u, v] : edges)
            if (u < 0 || u >= vertices || v < 0 || v >= vertices)
                throw std::invalid_argument("graphic: edge endpoint out of range");
        return Matroid(n, Graphic{vertices, std::move(edges)});
    }

    /// Ground set size is explicit because trailing elements may be loops
    /// (absent from every listed set). Validity is not assumed; run
    /// check_axioms() to vet untrusted input.
    static Matroid from_independent_sets(int n, std::vector<Mask> independent) {
        check_ground(n);
        if (n > kExplicitCap) throw CapExceeded("explicit family: n > " + std::to_string(kExplicitCap));
        for (Mask m : independent)
            if ((m & ~full_mask(n)) != 0)
                throw std::invalid_argument("explicit: set exceeds ground set");
        std::sort(independent.begin(), independent.end());
        independent.erase(std::unique(independent.begin(), independent.end()), independent.end());
        Explicit fam{std::move(independent), {}};
        fam.rank_table = build_rank_table(n, fam.independent);
        return Matroid(n, std::move(fam));
    }

    static Matroid linear(std::vector<std::vector<Rat>> columns) {
        int n = static_cast<int>(columns.size());
        check_ground(n);
        int dim = columns.empty() ? 0 : static_cast<int>(columns[0].size());
        for (const auto& c : columns)
            if (static_cast<int>(c.size()) != dim)
                throw std::invalid_argument("linear: ragged columns");
        return Matroid(n, Linear{std::move(columns), dim});
    }

    int size() const { return n_; }
    const Family& family() const { return family_; }

    /// Optional display names, one per element.
    Matroid with_labels(std::vector<std::string> labels) const {
        if (static_cast<int>(labels.size()) != n_)
            throw std::invalid_argument("labels: need one name per element");
        Matroid out = *this;
        out.labels_ = std::move(labels);
        return out;
    }
    const std::vector<std::string>& labels() const { return labels_; }

    int rank(Mask s) const {
        if ((s & ~full_mask(n_)) != 0) throw std::out_of_range("rank: subset exceeds ground set");
        return rank_unchecked(s);
    }

    int full_rank() const { return rank_unchecked(full_mask(n_)); }
    bool independent(Mask s) const { return rank(s) == popcount(s); }
    bool is_loop(int i) const { return rank(bit(i)) == 0; }

    Mask loops() const {
        Mask out = 0;
        for (int i = 0; i < n_; ++i)
            if (is_loop(i)) out |= bit(i);
        return out;
    }

    /// span(s) = s together with every element whose addition leaves the rank
    /// unchanged. Idempotent and monotone.
    Mask span(Mask s) const {
        int r = rank(s);
        Mask out = s;
        for (int i = 0; i < n_; ++i)
            if (!has(s, i) && rank_unchecked(s | bit(i)) == r) out |= bit(i);
        return out;
    }

    /// Minor by deleting `deleted` and contracting `contracted`; the result
    /// lives on the remaining elements, reindexed 0..m-1 in increasing order
    /// of their original index (see minor_elements()).
    Matroid minor(Mask deleted, Mask contracted) const {
        if ((deleted & contracted) != 0)
            throw std::invalid_argument("minor: delete and contract sets overlap");
        if (((deleted | contracted) & ~full_mask(n_)) != 0)
            throw std::out_of_range("minor: subset exceeds ground set");
        Minor fam;
        fam.parent = std::make_shared<Matroid>(*this);
        for (int i = 0; i < n_; ++i)
            if (!has(deleted | contracted, i)) fam.keep.push_back(i);
        fam.contracted = contracted;
        fam.contracted_rank = rank_unchecked(contracted);
        int m = static_cast<int>(fam.keep.size());
        return Matroid(m, std::move(fam));
    }

    /// For a minor: original indices of this matroid's elements in the parent.
    const std::vector<int>* minor_elements() const {
        if (const auto* mi = std::get_if<Minor>(&family_)) return &mi->keep;
        return nullptr;
    }

    /// Re-enumerates this matroid's independent sets into an Explicit family.
    Matroid to_explicit() const {
        if (n_ > kExplicitCap) throw CapExceeded("to_explicit: ground set too large");
        std::vector<Mask> indep;
        for_each_subset(full_mask(n_), [&](Mask s) {
            if (rank_unchecked(s) == popcount(s)) indep.push_back(s);
        });
        return from_independent_sets(n_, std::move(indep));
    }

    /// Exhaustively verifies normalization, unit increase, and (local)
    /// submodularity of the rank function. Intended for vetting Explicit
    /// families; capped at n <= 16.
    AxiomReport check_axioms() const {
        if (n_ > kAxiomCap) throw CapExceeded("check_axioms: n > " + std::to_string(kAxiomCap));
        if (rank_unchecked(0) != 0) return {false, "rank(empty) != 0", 0, 0};
        Mask all = full_mask(n_);
        AxiomReport report;
        for_each_subset(all, [&](Mask s) {
            if (!report.ok) return;
            int rs = rank_unchecked(s);
            for (int i = 0; i < n_ && report.ok; ++i) {
                if (has(s, i)) continue;
                int ri = rank_unchecked(s | bit(i));
                if (ri < rs || ri > rs + 1) {
                    report = {false, "unit-increase violated", s, s | bit(i)};
                    return;
                }
                // local submodularity: rank(S+i) + rank(S+j) >= rank(S+i+j) + rank(S)
                for (int j = i + 1; j < n_; ++j) {
                    if (has(s, j)) continue;
                    int rj = rank_unchecked(s | bit(j));
                    int rij = rank_unchecked(s | bit(i) | bit(j));
                    if (ri + rj < rij + rs) {
                        report = {false, "submodularity violated", s | bit(i), s | bit(j)};
                        return;
                    }
                }
            }
        });
        return report;
    }

    /// Membership in the matroid polytope: sum_{i in S} x_i <= rank(S) for
    /// every S (and 0 <= x_i). Exhaustive; capped at n <= 20.
    PolytopeReport in_polytope(const std::vector<Rat>& x) const {
        if (static_cast<int>(x.size()) != n_)
            throw std::invalid_argument("in_polytope: vector size mismatch");
        if (n_ > kPolytopeCap) throw CapExceeded("in_polytope: n > " + std::to_string(kPolytopeCap));
        PolytopeReport report;
        for (int i = 0; i < n_; ++i) {
            if (x[i] < 0 && -x[i] > report.violation) {
                report = {false, bit(i), -x[i]};
            }
        }
        for_each_subset(full_mask(n_), [&](Mask s) {
            Rat sum = 0;
            for (int i : elements(s)) sum += x[i];
            Rat v = sum - rank_unchecked(s);
            if (v > 0 && v > report.violation) report = {false, s, v};
        });
        return report;
    }

    std::string describe() const;

    static constexpr int kExplicitCap = 20;
    static constexpr int kAxiomCap = 16;
    static constexpr int kPolytopeCap = 20;

private:
    Matroid(int n, Family fam) : n_(n), family_(std::move(fam)) {}

    static void check_ground(int n) {
        if (n < 0 || n > kMaxGroundSet)
            throw std::invalid_argument("ground set size must be in [0,63]");
    }

    static std::vector<uint8_t> build_rank_table(int n, const std::vector<Mask>& indep) {
        // rank[S] = size of the largest listed set inside S; agrees with the
        // matroid rank when the list is a genuine independence family, and
        // lets check_axioms flag the list otherwise.
        std::vector<uint8_t> table(std::size_t{1} << n, 0);
        for (Mask m : indep) table[m] = static_cast<uint8_t>(popcount(m));
        for (Mask s = 0; s < (Mask{1} << n); ++s) {
            Mask rest = s;
            while (rest != 0) {
                int i = std::countr_zero(rest);
                rest &= rest - 1;
                table[s] = std::max(table[s], table[s & ~bit(i)]);
            }
        }
        return table;
    }

    int rank_unchecked(Mask s) const {
        return std::visit([&](const auto& fam) { return rank_impl(fam, s); }, family_);
    }

    int rank_impl(const Uniform& fam, Mask s) const { return std::min(fam.k, popcount(s)); }

    int rank_impl(const Partition& fam, Mask s) const {
        int r = 0;
        Mask covered = 0;
        for (std::size_t b = 0; b < fam.blocks.size(); ++b) {
            r += std::min(fam.capacities[b], popcount(s & fam.blocks[b]));
            covered |= fam.blocks[b];
        }
        return r + popcount(s & ~covered);  // uncovered elements are free
    }

    int rank_impl(const Graphic& fam, Mask s) const {
        // rank = |V| - #components restricted to the chosen edges, i.e. the
        // number of union-find merges.
        std::vector<int> parent(fam.vertices);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        int merges = 0;
        for (int i : elements(s)) {
            int a = find(fam.edges[i].first), b = find(fam.edges[i].second);
            if (a != b) {
                parent[a] = b;
                ++merges;
            }
        }
        return merges;
    }

    int rank_impl(const Explicit& fam, Mask s) const { return fam.rank_table[s]; }

    int rank_impl(const Linear& fam, Mask s) const {
        // Exact rational Gaussian elimination on the selected columns.
        std::vector<std::vector<Rat>> cols;
        for (int i : elements(s)) cols.push_back(fam.columns[i]);
        int r = 0;
        for (int row = 0; row < fam.dim && r < static_cast<int>(cols.size()); ++row) {
            int pivot = -1;
            for (int c = r; c < static_cast<int>(cols.size()); ++c)
                if (cols[c][row] != 0) {
                    pivot = c;
                    break;
                }
            if (pivot < 0) continue;
            std::swap(cols[r], cols[pivot]);
            for (int c = r + 1; c < static_cast<int>(cols.size()); ++c) {
                if (cols[c][row] == 0) continue;
                Rat f = cols[c][row] / cols[r][row];
                for (int rr = row; rr < fam.dim; ++rr) cols[c][rr] -= f * cols[r][rr];
            }
            ++r;
        }
        return r;
    }

    int rank_impl(const Minor& fam, Mask s) const {
        Mask lifted = fam.contracted;
        for (int i : elements(s)) lifted |= bit(fam.keep[i]);
        return fam.parent->rank(lifted) - fam.contracted_rank;
    }

    int n_;
    Family family_;
    std::vector<std::string> labels_;
};

inline std::string Matroid::describe() const {
    return std::visit(
        [&](const auto& fam) -> std::string {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Uniform>)
                return "uniform(n=" + std::to_string(n_) + ",k=" + std::to_string(fam.k) + ")";
            else if constexpr (std::is_same_v<T, Partition>)
                return "partition(n=" + std::to_string(n_) + "," +
                       std::to_string(fam.blocks.size()) + " blocks)";
            else if constexpr (std::is_same_v<T, Graphic>)
                return "graphic(" + std::to_string(fam.vertices) + " vertices," +
                       std::to_string(n_) + " edges)";
            else if constexpr (std::is_same_v<T, Explicit>)
                return "explicit(n=" + std::to_string(n_) + "," +
                       std::to_string(fam.independent.size()) + " sets)";
            else if constexpr (std::is_same_v<T, Linear>)
                return "linear(n=" + std::to_string(n_) + ",dim=" + std::to_string(fam.dim) + ")";
            else
                return "minor(n=" + std::to_string(n_) + " of " + fam.parent->describe() + ")";
        },
        family_);
}

/// A matroid with nonnegative rational weights. Ties are broken by index:
/// greedy compares (weight, -index) lexicographically, so every instance
/// behaves as if weights were distinct.
class WeightedMatroid {
public:
    WeightedMatroid(Matroid m, std::vector<Rat> weights)
        : matroid_(std::move(m)), weights_(std::move(weights)) {
        if (static_cast<int>(weights_.size()) != matroid_.size())
            throw std::invalid_argument("weights size mismatch");
        for (const Rat& w : weights_)
            if (w < 0) throw std::invalid_argument("negative weight");
        order_.resize(weights_.size());
        std::iota(order_.begin(), order_.end(), 0);
        std::sort(order_.begin(), order_.end(), [&](int a, int b) {
            if (weights_[a] != weights_[b]) return weights_[a] > weights_[b];
            return a < b;
        });
    }

    const Matroid& matroid() const { return matroid_; }
    const std::vector<Rat>& weights() const { return weights_; }
    const Rat& weight(int i) const { return weights_[i]; }

    /// Elements sorted by (weight desc, index asc).
    const std::vector<int>& order() const { return order_; }

    /// Strict "heavier than" under the tie-break order.
    bool heavier(int i, int j) const {
        if (weights_[i] != weights_[j]) return weights_[i] > weights_[j];
        return i < j;
    }

    Rat weight_of(Mask s) const {
        Rat sum = 0;
        for (int i : elements(s)) sum += weights_[i];
        return sum;
    }

private:
    Matroid matroid_;
    std::vector<Rat> weights_;
    std::vector<int> order_;
};

/// The unique maximum-weight independent subset of s of minimum cardinality:
/// greedy in (weight, -index) order, never taking zero-weight elements.
inline Mask opt_w(const WeightedMatroid& wm, Mask s) {
    const Matroid& m = wm.matroid();
    if ((s & ~full_mask(m.size())) != 0) throw std::out_of_range("opt_w: subset exceeds ground set");
    Mask chosen = 0;
    int chosen_rank = 0;
    for (int i : wm.order()) {
        if (wm.weight(i) == 0) break;  // zero weights sort last and are excluded
        if (!has(s, i)) continue;
        if (m.rank(chosen | bit(i)) > chosen_rank) {
            chosen |= bit(i);
            ++chosen_rank;
        }
    }
    return chosen;
}

inline Rat weighted_rank(const WeightedMatroid& wm, Mask s) { return wm.weight_of(opt_w(wm, s)); }

/// The improving elements for a sampled set: elements outside `sample` that
/// are not spanned by strictly heavier sampled elements (equivalently, whose
/// addition raises the weighted rank of the sample). Zero-weight elements
/// never improve.
inline Mask improving_elements(const WeightedMatroid& wm, Mask sample) {
    const Matroid& m = wm.matroid();
    Mask heavier_sampled = 0;
    int heavier_rank = 0;
    Mask result = 0;
    for (int i : wm.order()) {
        if (wm.weight(i) == 0) break;
        if (has(sample, i)) {
            heavier_sampled |= bit(i);
            heavier_rank = m.rank(heavier_sampled);
            continue;
        }
        if (m.rank(heavier_sampled | bit(i)) > heavier_rank) result |= bit(i);
    }
    return result;
}

}  // namespace matcrs
