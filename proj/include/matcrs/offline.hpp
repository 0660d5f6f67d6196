#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "matcrs/dist.hpp"
#include "matcrs/errors.hpp"
#include "matcrs/lp.hpp"
#include "matcrs/matroid.hpp"

namespace matcrs {

/// A randomized contention resolution map: for each active set R, a
/// distribution over independent subsets of R.
struct ContentionMap {
    struct Choice {
        Mask set;
        Rat prob;
    };
    struct Entry {
        Mask active;
        std::vector<Choice> choices;
    };
    std::vector<Entry> entries;  // sorted by active mask

    const Entry* find(Mask active) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), active,
                                   [](const Entry& e, Mask m) { return e.active < m; });
        if (it != entries.end() && it->active == active) return &*it;
        return nullptr;
    }

    void add(Mask active, std::vector<Choice> choices) {
        entries.push_back({active, std::move(choices)});
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& a, const Entry& b) { return a.active < b.active; });
    }

    /// Pr[i in phi(R)] for a fixed R.
    Rat selection_prob(Mask active, int element) const {
        const Entry* e = find(active);
        if (!e) return 0;
        Rat p = 0;
        for (const Choice& c : e->choices)
            if (has(c.set, element)) p += c.prob;
        return p;
    }
};

/// phi(prefix of size k) = the last element of the prefix; the 2-competitive
/// map for prefix-chain distributions.
inline ContentionMap prefix_last_map(int n) {
    ContentionMap phi;
    phi.add(0, {{0, 1}});
    for (int k = 1; k <= n; ++k) phi.add(full_mask(k), {{bit(k - 1), 1}});
    return phi;
}

/// phi(R) = a uniformly random singleton of R; what greedy online selection
/// amounts to on a rank-1 matroid under random arrival.
inline ContentionMap uniform_singleton_map(const SubsetDistribution& d) {
    ContentionMap phi;
    for (const auto& [mask, p] : d.support()) {
        if (mask == 0) {
            phi.add(0, {{0, 1}});
            continue;
        }
        std::vector<ContentionMap::Choice> choices;
        for (int i : elements(mask)) choices.push_back({bit(i), Rat(1, popcount(mask))});
        phi.add(mask, std::move(choices));
    }
    return phi;
}

struct AlphaReport {
    ExtRat alpha = ExtRat::of(1);
    Mask witness = 0;       // argmax F, smallest bitmask among maximizers
    int loop_element = -1;  // offending element when infinite
    bool degenerate = false;  // support carries no element at all; alpha = 1 by convention
    Rat witness_expected_size = 0;  // E|R ∩ F| at the witness
    Rat witness_expected_rank = 0;  // E rank(R ∩ F) at the witness
};

/// The uncontentiousness factor: max over F of E|R∩F| / E rank(R∩F), skipping
/// 0/0 subsets; +infinity exactly when a positive-marginal element is a loop.
inline AlphaReport alpha_star(const Matroid& m, const SubsetDistribution& d) {
    if (m.size() != d.size()) throw std::invalid_argument("alpha_star: ground set mismatch");
    int n = m.size();
    if (n > Matroid::kPolytopeCap) throw CapExceeded("alpha_star: n > 20");

    // The 2^n-subset scan runs on integers: probabilities are brought to a
    // common denominator up front, so the hot loop never normalizes a gcd.
    Int common = 1;
    for (const auto& [mask, p] : d.support()) common = lcm(common, Int(denominator(p)));
    std::vector<Mask> masks;
    std::vector<Int> scaled;
    masks.reserve(d.support().size());
    for (const auto& [mask, p] : d.support()) {
        masks.push_back(mask);
        scaled.push_back(Int(numerator(p)) * (common / Int(denominator(p))));
    }

    AlphaReport report;
    bool found = false;
    Int best_num = 0, best_den = 1;
    Mask universe = full_mask(n);
    for (Mask f = 0;; ++f) {
        Int num = 0, den = 0;
        for (std::size_t r = 0; r < masks.size(); ++r) {
            Mask cap = masks[r] & f;
            if (cap == 0) continue;
            num += scaled[r] * popcount(cap);
            den += scaled[r] * m.rank(cap);
        }
        if (num != 0 && den == 0) {
            // F consists of loops with positive marginal; smallest such F is
            // a singleton loop.
            report.alpha = ExtRat::inf();
            report.witness = f;
            report.loop_element = elements(f)[0];
            report.witness_expected_size = Rat(num, common);
            report.witness_expected_rank = 0;
            return report;
        }
        // num/den > best_num/best_den, compared without building rationals
        if (den != 0 && (!found || num * best_den > best_num * den)) {
            found = true;
            best_num = num;
            best_den = den;
            report.witness = f;
        }
        if (f == universe) break;
    }
    if (!found) {
        // Every subset was 0/0: the distribution is the point mass on the
        // empty set. Flagged, with alpha = 1 by convention.
        report.degenerate = true;
        report.alpha = ExtRat::of(1);
        report.witness = 0;
        return report;
    }
    report.alpha = ExtRat::of(Rat(best_num, best_den));
    report.witness_expected_size = Rat(best_num, common);
    report.witness_expected_rank = Rat(best_den, common);
    return report;
}

/// All maximal independent subsets (bases) of R.
inline std::vector<Mask> bases_of(const Matroid& m, Mask r) {
    int target = m.rank(r);
    std::vector<Mask> out;
    for_each_subset(r, [&](Mask i) {
        if (popcount(i) == target && m.independent(i)) out.push_back(i);
    });
    return out;
}

struct SynthesisResult {
    Rat beta_star = 0;               // best per-element marginal preservation factor
    ExtRat alpha = ExtRat::inf();    // 1 / beta_star
    std::optional<ContentionMap> crm;  // absent when the LP cap forced a fallback
};

/// Synthesizes an optimal CRM by exact LP over per-support-set distributions
/// of bases: max beta s.t. sum_R Pr[R] q_R(i selected) >= beta x_i. The LP
/// value is exactly 1/alpha_star. Restricting choices to bases of each R
/// loses nothing: enlarging a selected independent set never hurts any
/// element's selection probability.
inline SynthesisResult synthesize_crm(const Matroid& m, const SubsetDistribution& d,
                                      std::size_t lp_var_cap = 20000) {
    if (m.size() != d.size()) throw std::invalid_argument("synthesize_crm: ground set mismatch");
    int n = m.size();
    std::vector<Rat> x = d.marginals();
    std::vector<int> constrained;
    for (int i = 0; i < n; ++i)
        if (x[i] != 0) constrained.push_back(i);

    SynthesisResult result;
    if (constrained.empty()) {
        result.beta_star = 1;
        result.alpha = ExtRat::of(1);
        ContentionMap crm;
        for (const auto& [mask, p] : d.support()) crm.add(mask, {{0, 1}});
        result.crm = std::move(crm);
        return result;
    }

    struct Var {
        std::size_t support_index;
        Mask base;
    };
    std::vector<Var> vars;
    std::vector<std::vector<Mask>> all_bases(d.support().size());
    for (std::size_t s = 0; s < d.support().size(); ++s) {
        all_bases[s] = bases_of(m, d.support()[s].first);
        for (Mask b : all_bases[s]) vars.push_back({s, b});
        if (vars.size() > lp_var_cap) {
            // Fall back to the enumeration route; no constructive map.
            AlphaReport ar = alpha_star(m, d);
            result.alpha = ar.alpha;
            result.beta_star = ar.alpha.infinite ? Rat(0) : 1 / ar.alpha.value;
            return result;
        }
    }

    // Variable 0 is beta; the rest are the q_{R,I}.
    LinearProgram lp;
    lp.maximize = true;
    lp.objective.assign(1 + vars.size(), 0);
    lp.objective[0] = 1;
    for (int i : constrained) {
        std::vector<Rat> row(1 + vars.size(), 0);
        row[0] = -x[i];
        for (std::size_t v = 0; v < vars.size(); ++v)
            if (has(vars[v].base, i)) row[1 + v] = d.support()[vars[v].support_index].second;
        lp.add_row(std::move(row), Relation::GreaterEq, 0);
    }
    for (std::size_t s = 0; s < d.support().size(); ++s) {
        std::vector<Rat> row(1 + vars.size(), 0);
        for (std::size_t v = 0; v < vars.size(); ++v)
            if (vars[v].support_index == s) row[1 + v] = 1;
        lp.add_row(std::move(row), Relation::Equal, 1);
    }

    LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal)
        throw std::logic_error("synthesize_crm: LP not optimal");  // cannot happen: beta=0 is feasible
    result.beta_star = sol.objective;
    result.alpha = result.beta_star == 0 ? ExtRat::inf() : ExtRat::of(1 / result.beta_star);

    ContentionMap crm;
    for (std::size_t s = 0; s < d.support().size(); ++s) {
        std::vector<ContentionMap::Choice> choices;
        for (std::size_t v = 0; v < vars.size(); ++v)
            if (vars[v].support_index == s && sol.primal[1 + v] != 0)
                choices.push_back({vars[v].base, sol.primal[1 + v]});
        crm.add(d.support()[s].first, std::move(choices));
    }
    result.crm = std::move(crm);
    return result;
}

struct CrmVerification {
    std::vector<ExtRat> ratios;          // Pr[i in R] / Pr[i in phi(R)], 0 when 0/0
    std::vector<Rat> selection_prob;     // Pr[i in phi(R)]
    ExtRat achieved_alpha = ExtRat::of(1);
};

/// Exact per-element competitive ratios of a map against a distribution.
/// Throws if the map is missing a support set or is infeasible.
inline CrmVerification verify_crm(const Matroid& m, const SubsetDistribution& d,
                                  const ContentionMap& crm) {
    if (m.size() != d.size()) throw std::invalid_argument("verify_crm: ground set mismatch");
    int n = m.size();
    std::vector<Rat> x = d.marginals();
    CrmVerification out;
    out.selection_prob.assign(n, 0);

    for (const auto& [mask, p] : d.support()) {
        const ContentionMap::Entry* entry = crm.find(mask);
        if (!entry)
            throw std::invalid_argument("verify_crm: map undefined on support set " +
                                        mask_to_string(mask));
        Rat total = 0;
        for (const auto& choice : entry->choices) {
            if (choice.prob < 0) throw std::invalid_argument("verify_crm: negative choice weight");
            if ((choice.set & ~mask) != 0)
                throw std::invalid_argument("verify_crm: map selects outside the active set");
            if (!m.independent(choice.set))
                throw std::invalid_argument("verify_crm: map selects a dependent set");
            total += choice.prob;
            for (int i : elements(choice.set)) out.selection_prob[i] += p * choice.prob;
        }
        if (total != 1) throw std::invalid_argument("verify_crm: choice weights do not sum to 1");
    }

    bool any = false;
    for (int i = 0; i < n; ++i) {
        ExtRat ratio;
        if (x[i] == 0) {
            ratio = ExtRat::of(0);  // never active: no contention to resolve
        } else if (out.selection_prob[i] == 0) {
            ratio = ExtRat::inf();
        } else {
            ratio = ExtRat::of(x[i] / out.selection_prob[i]);
        }
        out.ratios.push_back(ratio);
        if (x[i] != 0) {
            if (!any || ratio > out.achieved_alpha) out.achieved_alpha = ratio;
            any = true;
        }
    }
    if (!any) out.achieved_alpha = ExtRat::of(1);
    return out;
}

struct ConditionB {
    bool holds = false;
    Rat expected_weighted_rank = 0;  // E[rank_w(R)]
    Rat scaled_expected_weight = 0;  // E[w(R)] / alpha
    Rat slack = 0;
};

/// The weighted-rank certificate: E[rank_w(R)] >= E[w(R)] / alpha, evaluated
/// exactly over the support.
inline ConditionB condition_b_check(const Matroid& m, const SubsetDistribution& d,
                                    const std::vector<Rat>& w, const ExtRat& alpha) {
    if (m.size() != d.size()) throw std::invalid_argument("condition_b: ground set mismatch");
    if (static_cast<int>(w.size()) != m.size())
        throw std::invalid_argument("condition_b: weight vector size mismatch");
    if (!alpha.infinite && alpha.value <= 0) throw std::invalid_argument("condition_b: alpha <= 0");
    WeightedMatroid wm(m, w);
    ConditionB out;
    for (const auto& [mask, p] : d.support()) {
        out.expected_weighted_rank += p * weighted_rank(wm, mask);
        if (!alpha.infinite) out.scaled_expected_weight += p * wm.weight_of(mask) / alpha.value;
    }
    out.slack = out.expected_weighted_rank - out.scaled_expected_weight;
    out.holds = out.slack >= 0;
    return out;
}

struct CoveringReport {
    bool infinite = false;
    int value = 0;
    Mask witness = 0;  // subset attaining the max ratio, or the loop set
};

/// Minimum number of independent sets needed to cover t: the ceiling of
/// max_{S subset of t} |S| / rank(S); infinite when t contains a loop.
inline CoveringReport covering_number(const Matroid& m, Mask t) {
    if ((t & ~full_mask(m.size())) != 0) throw std::out_of_range("covering_number: bad subset");
    if (m.size() > Matroid::kPolytopeCap) throw CapExceeded("covering_number: n > 20");
    CoveringReport out;
    if (t == 0) {
        out.value = 1;  // matches the alpha-star convention for the empty point mass
        return out;
    }
    bool found = false;
    Rat best = 0;
    Mask best_witness = 0;
    for (Mask s = 0;; ++s) {
        bool inside = (s & ~t) == 0;
        if (inside && s != 0) {
            int r = m.rank(s);
            if (r == 0) {
                out.infinite = true;
                out.witness = s;  // first hit is the smallest loop subset
                return out;
            }
            Rat ratio = Rat(popcount(s), r);
            if (!found || ratio > best) {
                found = true;
                best = ratio;
                best_witness = s;
            }
        }
        if (s == full_mask(m.size())) break;
    }
    // ceiling of the exact rational maximum
    Int num = numerator(best), den = denominator(best);
    Int q = num / den;
    if (q * den != num) q += 1;
    out.value = q.convert_to<int>();
    out.witness = best_witness;
    return out;
}

struct AdversaryReport {
    SubsetDistribution dist;
    int victim = -1;          // the element the fixed map under-serves
    ExtRat achieved_ratio;    // the fixed map's competitive ratio on dist
    ExtRat dist_alpha;        // alpha_star of dist; at most 1 + eps
};

/// The prior-independence counterexample for a rank-1 matroid: given any
/// fixed map phi (defined on the full set and all singletons), builds a
/// (1+eps)-uncontentious distribution on which phi is at best n-competitive.
inline AdversaryReport oblivious_adversary(const Matroid& m, const ContentionMap& phi,
                                           const Rat& eps) {
    int n = m.size();
    if (n < 2) throw std::invalid_argument("oblivious_adversary: need n >= 2");
    if (eps <= 0) throw std::invalid_argument("oblivious_adversary: eps must be positive");
    if (m.full_rank() != 1 || m.loops() != 0)
        throw std::invalid_argument("oblivious_adversary: matroid is not 1-uniform");
    Mask all = full_mask(n);
    if (!phi.find(all)) throw std::invalid_argument("oblivious_adversary: map undefined on full set");
    for (int j = 0; j < n; ++j)
        if (!phi.find(bit(j)))
            throw std::invalid_argument("oblivious_adversary: map undefined on a singleton");

    // Pigeonhole: some element is selected from the full set w.p. <= 1/n.
    int victim = 0;
    Rat victim_prob = phi.selection_prob(all, 0);
    for (int i = 1; i < n; ++i) {
        Rat p = phi.selection_prob(all, i);
        if (p < victim_prob) {
            victim = i;
            victim_prob = p;
        }
    }

    std::vector<SubsetDistribution::Entry> pairs;
    Rat denom = n - 1 + eps;
    for (int j = 0; j < n; ++j)
        if (j != victim) pairs.emplace_back(bit(j), 1 / denom);
    pairs.emplace_back(all, eps / denom);
    SubsetDistribution dist = SubsetDistribution::from_pairs(n, pairs);

    AdversaryReport out{dist, victim, verify_crm(m, dist, phi).achieved_alpha,
                        alpha_star(m, dist).alpha};
    return out;
}

}  // namespace matcrs
