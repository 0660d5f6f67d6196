#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "matcrs/errors.hpp"
#include "matcrs/matroid.hpp"
#include "matcrs/prng.hpp"
#include "matcrs/rational.hpp"
#include "matcrs/subset.hpp"

namespace matcrs {

/// An exact finite-support distribution over subsets of {0,...,n-1}.
/// Canonical form: support sorted by bitmask, probabilities positive
/// rationals summing to exactly 1. Immutable.
class SubsetDistribution {
public:
    using Entry = std::pair<Mask, Rat>;

    /// Builds from (subset, weight) pairs: duplicates merge by summing,
    /// zero-weight entries drop, and the total mass is normalized to 1.
    static SubsetDistribution from_pairs(int n, const std::vector<Entry>& pairs) {
        if (n < 0 || n > kMaxGroundSet) throw std::invalid_argument("bad ground set size");
        if (pairs.empty()) throw std::invalid_argument("empty support");
        std::map<Mask, Rat> merged;
        Rat total = 0;
        for (const auto& [mask, p] : pairs) {
            if ((mask & ~full_mask(n)) != 0)
                throw std::out_of_range("support set exceeds ground set");
            if (p < 0) throw std::invalid_argument("negative probability");
            merged[mask] += p;
            total += p;
        }
        if (total == 0) throw std::invalid_argument("zero total mass");
        SubsetDistribution d;
        d.n_ = n;
        for (auto& [mask, p] : merged)
            if (p != 0) d.support_.emplace_back(mask, p / total);
        return d;
    }

    static SubsetDistribution point(int n, Mask mask) { return from_pairs(n, {{mask, 1}}); }

    /// Product distribution with the given marginals; support is all 2^n
    /// subsets (minus zero-probability ones), so n is capped.
    static SubsetDistribution product(const std::vector<Rat>& x) {
        int n = static_cast<int>(x.size());
        if (n > kProductCap) throw CapExceeded("product: n > " + std::to_string(kProductCap));
        for (const Rat& xi : x)
            if (xi < 0 || xi > 1) throw std::invalid_argument("marginal outside [0,1]");
        SubsetDistribution d;
        d.n_ = n;
        for_each_subset(full_mask(n), [&](Mask s) {
            Rat p = 1;
            for (int i = 0; i < n; ++i) p *= has(s, i) ? x[i] : 1 - x[i];
            if (p != 0) d.support_.emplace_back(s, p);
        });
        return d;
    }

    static SubsetDistribution mixture(const std::vector<SubsetDistribution>& components,
                                      const std::vector<Rat>& weights) {
        if (components.empty() || components.size() != weights.size())
            throw std::invalid_argument("mixture: component/weight mismatch");
        int n = components[0].n_;
        Rat total = 0;
        for (const Rat& w : weights) {
            if (w < 0) throw std::invalid_argument("mixture: negative weight");
            total += w;
        }
        if (total != 1) throw std::invalid_argument("mixture: weights must sum to 1");
        std::vector<Entry> pairs;
        for (std::size_t j = 0; j < components.size(); ++j) {
            if (components[j].n_ != n) throw std::invalid_argument("mixture: mismatched ground sets");
            for (const auto& [mask, p] : components[j].support_)
                pairs.emplace_back(mask, weights[j] * p);
        }
        return from_pairs(n, pairs);
    }

    /// Law of keeping each element of a draw independently with probability p.
    SubsetDistribution subsample(const Rat& p) const {
        if (p < 0 || p > 1) throw std::invalid_argument("subsample: p outside [0,1]");
        std::vector<Entry> pairs;
        for (const auto& [mask, prob] : support_) {
            for_each_subset(mask, [&](Mask t) {
                Rat q = prob * rat_pow(p, popcount(t)) * rat_pow(1 - p, popcount(mask) - popcount(t));
                if (q != 0) pairs.emplace_back(t, q);
            });
        }
        return from_pairs(n_, pairs);
    }

    int size() const { return n_; }
    const std::vector<Entry>& support() const { return support_; }

    Rat prob_of(Mask mask) const {
        auto it = std::lower_bound(support_.begin(), support_.end(), mask,
                                   [](const Entry& e, Mask m) { return e.first < m; });
        if (it != support_.end() && it->first == mask) return it->second;
        return 0;
    }

    std::vector<Rat> marginals() const {
        std::vector<Rat> x(n_, 0);
        for (const auto& [mask, p] : support_)
            for (int i : elements(mask)) x[i] += p;
        return x;
    }

    Mask sample(CounterRng& rng) const {
        std::vector<Rat> probs;
        probs.reserve(support_.size());
        for (const auto& e : support_) probs.push_back(e.second);
        return support_[sample_index(probs, rng)].first;
    }

    friend bool operator==(const SubsetDistribution& a, const SubsetDistribution& b) {
        return a.n_ == b.n_ && a.support_ == b.support_;
    }

    static constexpr int kProductCap = 20;

private:
    SubsetDistribution() = default;
    int n_ = 0;
    std::vector<Entry> support_;
};

/// The prefix chain: R = {0,...,k-1} with probability 2^-(k+1) for k < n, and
/// R = {0,...,n-1} with the remaining 2^-n. Equals the law of improving
/// elements of a 1-uniform matroid with decreasing weights at p = 1/2.
inline SubsetDistribution prefix_chain_distribution(int n) {
    if (n < 1) throw std::invalid_argument("prefix chain needs n >= 1");
    std::vector<SubsetDistribution::Entry> pairs;
    for (int k = 0; k < n; ++k) pairs.emplace_back(full_mask(k), rat_pow(Rat(1, 2), k + 1));
    pairs.emplace_back(full_mask(n), rat_pow(Rat(1, 2), n));
    return SubsetDistribution::from_pairs(n, pairs);
}

/// Exact law of the improving elements with parameter p: aggregates
/// R(S) over all 2^n realizations of the p-sample S.
inline SubsetDistribution improving_distribution(const WeightedMatroid& wm, const Rat& p) {
    int n = wm.matroid().size();
    if (n > 20) throw CapExceeded("improving_distribution: n > 20");
    if (p <= 0 || p >= 1) throw std::invalid_argument("improving_distribution: p outside (0,1)");
    std::vector<SubsetDistribution::Entry> pairs;
    for_each_subset(full_mask(n), [&](Mask s) {
        Rat prob = rat_pow(p, popcount(s)) * rat_pow(1 - p, n - popcount(s));
        pairs.emplace_back(improving_elements(wm, s), prob);
    });
    return SubsetDistribution::from_pairs(n, pairs);
}

/// Exhaustive verification of the three charging inequalities behind the
/// 1/p-uncontentiousness of improving elements, over all (sample, F) pairs:
///   (i)   |F ∩ opt(S ∪ F)| >= |F ∩ opt(S)|            for every S, F
///   (ii)  E_S[rank(R(S) ∩ F)] >= (1-p) E_S[|F ∩ opt(S ∪ F)|]
///   (iii) E_S[|opt(S) ∩ F|] >= p/(1-p) E_S[|R(S) ∩ F|]
struct ImprovingLemmaReport {
    bool opt_intersection_monotone = true;
    bool rank_covers_opt_union = true;
    bool opt_charges_improving = true;
    Mask failing_set = 0;  // an F witnessing the first failure, if any
    bool ok() const {
        return opt_intersection_monotone && rank_covers_opt_union && opt_charges_improving;
    }
};

inline ImprovingLemmaReport check_improving_lemmas(const WeightedMatroid& wm, const Rat& p) {
    const Matroid& m = wm.matroid();
    int n = m.size();
    if (n > 10) throw CapExceeded("check_improving_lemmas: n > 10");
    if (p <= 0 || p >= 1) throw std::invalid_argument("check_improving_lemmas: p outside (0,1)");
    ImprovingLemmaReport report;
    std::vector<Rat> sample_prob(std::size_t{1} << n);
    std::vector<Mask> improving(std::size_t{1} << n), opt(std::size_t{1} << n);
    for_each_subset(full_mask(n), [&](Mask s) {
        sample_prob[s] = rat_pow(p, popcount(s)) * rat_pow(1 - p, n - popcount(s));
        improving[s] = improving_elements(wm, s);
        opt[s] = opt_w(wm, s);
    });
    for_each_subset(full_mask(n), [&](Mask f) {
        if (!report.ok()) return;
        Rat rank_lhs = 0, opt_union_rhs = 0, opt_lhs = 0, improving_rhs = 0;
        for_each_subset(full_mask(n), [&](Mask s) {
            Mask union_opt = opt_w(wm, s | f);
            if (popcount(f & union_opt) < popcount(f & opt[s])) {
                report.opt_intersection_monotone = false;
                report.failing_set = f;
            }
            rank_lhs += sample_prob[s] * m.rank(improving[s] & f);
            opt_union_rhs += sample_prob[s] * popcount(f & union_opt);
            opt_lhs += sample_prob[s] * popcount(opt[s] & f);
            improving_rhs += sample_prob[s] * popcount(improving[s] & f);
        });
        if (rank_lhs < (1 - p) * opt_union_rhs) {
            report.rank_covers_opt_union = false;
            report.failing_set = f;
        }
        if (opt_lhs < p / (1 - p) * improving_rhs) {
            report.opt_charges_improving = false;
            report.failing_set = f;
        }
    });
    return report;
}

struct ImprovingDraw {
    Mask sample;
    Mask improving;
};

/// One draw of (S, R(S)); works at any ground set size.
inline ImprovingDraw improving_draw(const WeightedMatroid& wm, const Rat& p, CounterRng& rng) {
    if (p <= 0 || p >= 1) throw std::invalid_argument("improving_draw: p outside (0,1)");
    Mask s = 0;
    for (int i = 0; i < wm.matroid().size(); ++i)
        if (rng.bernoulli(p)) s |= bit(i);
    return {s, improving_elements(wm, s)};
}

inline Mask improving_sample(const WeightedMatroid& wm, const Rat& p, CounterRng& rng) {
    return improving_draw(wm, p, rng).improving;
}

inline Mask improving_sample(const WeightedMatroid& wm, const Rat& p, std::uint64_t seed) {
    CounterRng rng = CounterRng::seeded(seed);
    return improving_draw(wm, p, rng).improving;
}

}  // namespace matcrs
