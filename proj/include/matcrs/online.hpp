#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "matcrs/dist.hpp"
#include "matcrs/errors.hpp"
#include "matcrs/lp.hpp"
#include "matcrs/matroid.hpp"
#include "matcrs/offline.hpp"
#include "matcrs/prng.hpp"

namespace matcrs {

// ---------------------------------------------------------------------------
// Arrival-model plumbing
// ---------------------------------------------------------------------------

template <typename F>
void for_each_permutation(int n, F&& f) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    do {
        f(order);
    } while (std::next_permutation(order.begin(), order.end()));
}

inline Rat factorial(int n) {
    Rat r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/// One realized arrival sequence with the full reveal log.
struct ArrivalInstance {
    std::vector<int> order;
    Mask active = 0;
    struct Step {
        int element;
        bool is_active;
        bool accepted;
    };
    std::vector<Step> log;
    Mask accepted = 0;
};

/// An online CRM run: consumes arrivals one by one and decides irrevocably.
/// finalize() exists for clairvoyant stubs that commit at the end; genuinely
/// online maps return 0 from it.
class OnlineCrmRun {
public:
    virtual ~OnlineCrmRun() = default;
    // `weight` is the weight revealed at arrival (zero when the caller has
    // none to reveal); activity is the element's membership in R.
    virtual bool arrive(int position, int element, bool active, const Rat& weight) = 0;
    virtual Mask finalize() { return 0; }
};

/// Factory for online CRM runs; run_id separates randomness across runs.
struct OnlineCrm {
    std::string name;
    std::function<std::unique_ptr<OnlineCrmRun>(std::uint64_t run_id)> start;
};

/// Drives one realization through a run, enforcing the CRM contract: accepts
/// only active elements, and the accepted set stays independent at every
/// prefix. Violations are policy bugs and throw.
inline ArrivalInstance run_online_crm(const Matroid& m, const std::vector<int>& order, Mask active,
                                      OnlineCrmRun& run,
                                      const std::vector<Rat>* revealed_weights = nullptr) {
    ArrivalInstance result;
    result.order = order;
    result.active = active;
    Mask accepted = 0;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        int e = order[pos];
        bool is_active = has(active, e);
        Rat w = revealed_weights ? (*revealed_weights)[e] : Rat(0);
        bool take = run.arrive(static_cast<int>(pos), e, is_active, w);
        if (take) {
            if (!is_active) throw std::logic_error("online CRM accepted an inactive element");
            if (!m.independent(accepted | bit(e)))
                throw std::logic_error("online CRM broke independence");
            accepted |= bit(e);
        }
        result.log.push_back({e, is_active, take});
    }
    Mask extra = run.finalize();
    if ((extra & ~active) != 0) throw std::logic_error("finalize selected an inactive element");
    if ((extra & accepted) != 0) throw std::logic_error("finalize re-selected an element");
    if (!m.independent(accepted | extra)) throw std::logic_error("finalize broke independence");
    result.accepted = accepted | extra;
    return result;
}

// ---------------------------------------------------------------------------
// Secretary algorithms
// ---------------------------------------------------------------------------

/// A secretary-algorithm run: sees (position, element, weight, feasibility)
/// and decides irrevocably. Weight comparisons break ties by index, matching
/// the weighted-matroid convention.
class SecretaryRun {
public:
    virtual ~SecretaryRun() = default;
    virtual bool decide(int position, int element, const Rat& weight, bool can_accept) = 0;
};

struct SecretaryAlgorithm {
    std::string name;
    std::function<std::unique_ptr<SecretaryRun>(const Matroid&)> start;
};

/// floor(n / e), with e bracketed rationally so no floating point enters the
/// decision. The brackets are tight enough for any desk-scale n.
inline int dynkin_cutoff(int n) {
    static const Rat lo(Int("36787944117144232"), Int("100000000000000000"));
    static const Rat hi(Int("36787944117144233"), Int("100000000000000000"));
    Rat scaled_lo = lo * n, scaled_hi = hi * n;
    Int f_lo = numerator(scaled_lo) / denominator(scaled_lo);
    Int f_hi = numerator(scaled_hi) / denominator(scaled_hi);
    if (f_lo != f_hi) throw std::logic_error("dynkin_cutoff: bracket too coarse");
    return f_lo.convert_to<int>();
}

namespace detail {

class DynkinRun : public SecretaryRun {
public:
    explicit DynkinRun(int n) : cutoff_(dynkin_cutoff(n)) {}

    bool decide(int position, int element, const Rat& weight, bool can_accept) override {
        bool beats = weight > 0 && (best_weight_ == 0 || weight > best_weight_ ||
                                    (weight == best_weight_ && element < best_element_));
        bool take = position >= cutoff_ && beats && !done_ && can_accept;
        if (beats) {
            best_weight_ = weight;
            best_element_ = element;
        }
        if (take) done_ = true;
        return take;
    }

private:
    int cutoff_;
    bool done_ = false;
    Rat best_weight_ = 0;  // max positive weight seen so far (ties by index)
    int best_element_ = -1;
};

class GreedyRun : public SecretaryRun {
public:
    bool decide(int, int, const Rat&, bool can_accept) override { return can_accept; }
};

}  // namespace detail

/// Classical single-choice rule: observe the first floor(n/e) arrivals, then
/// take the first element beating everything seen so far.
inline SecretaryAlgorithm dynkin(int n) {
    return {"dynkin", [n](const Matroid&) -> std::unique_ptr<SecretaryRun> {
                return std::make_unique<detail::DynkinRun>(n);
            }};
}

/// Accepts every arrival that keeps the accepted set independent, ignoring
/// weights (the phi_w wrapper still bars zero-weight elements).
inline SecretaryAlgorithm greedy_online() {
    return {"greedy", [](const Matroid&) -> std::unique_ptr<SecretaryRun> {
                return std::make_unique<detail::GreedyRun>();
            }};
}

/// Exact probability that the rule accepts the top-weight element when all n
/// distinct-weight elements are active, by enumerating all n! orders.
inline Rat probability_of_best(const SecretaryAlgorithm& alg, const Matroid& m, int n) {
    if (n > 8) throw CapExceeded("probability_of_best: n > 8");
    std::vector<Rat> w(n);
    for (int i = 0; i < n; ++i) w[i] = n - i;
    Rat hits = 0;
    for_each_permutation(n, [&](const std::vector<int>& order) {
        auto run = alg.start(m);
        Mask accepted = 0;
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            int e = order[pos];
            bool can = m.independent(accepted | bit(e));
            if (run->decide(static_cast<int>(pos), e, w[e], can)) accepted |= bit(e);
        }
        if (has(accepted, 0)) hits += 1;
    });
    return hits / factorial(n);
}

// ---------------------------------------------------------------------------
// phi_w: a secretary algorithm turned into an online CRM
// ---------------------------------------------------------------------------

namespace detail {

class PhiWRun : public OnlineCrmRun {
public:
    PhiWRun(const Matroid& m, std::unique_ptr<SecretaryRun> inner, const std::vector<Rat>& w)
        : matroid_(m), inner_(std::move(inner)), weights_(w) {}

    bool arrive(int position, int element, bool active, const Rat&) override {
        Rat presented = active ? weights_[element] : Rat(0);
        bool can = presented > 0 && matroid_.independent(accepted_ | bit(element));
        bool take = inner_->decide(position, element, presented, can) && can;
        if (take) accepted_ |= bit(element);
        return take;
    }

private:
    const Matroid& matroid_;
    std::unique_ptr<SecretaryRun> inner_;
    std::vector<Rat> weights_;
    Mask accepted_ = 0;
};

}  // namespace detail

/// Active elements are presented to the algorithm with their weight under w,
/// inactive ones with weight zero; the CRM selects what the algorithm
/// accepts. Zero-weight (hence inactive) elements are never selected.
/// The matroid is captured by reference and must outlive the returned CRM.
inline OnlineCrm phi_w(const Matroid& m, const SecretaryAlgorithm& alg, std::vector<Rat> w) {
    if (static_cast<int>(w.size()) != m.size()) throw std::invalid_argument("phi_w: weight size");
    for (const Rat& wi : w)
        if (wi < 0) throw std::invalid_argument("phi_w: negative weight");
    return {"phi_w[" + alg.name + "]",
            [&m, alg, w = std::move(w)](std::uint64_t) -> std::unique_ptr<OnlineCrmRun> {
                return std::make_unique<detail::PhiWRun>(m, alg.start(m), w);
            }};
}

/// Wraps an offline map as a run that watches the arrivals and commits at the
/// end; the stub for pipelines whose contention resolution step is allowed to
/// be clairvoyant.
inline OnlineCrm clairvoyant_map(const Matroid& m, ContentionMap map, std::uint64_t seed) {
    struct Run : OnlineCrmRun {
        const Matroid* matroid;
        ContentionMap map;
        CounterRng rng;
        Mask active = 0;
        Run(const Matroid* mm, ContentionMap mp, CounterRng r)
            : matroid(mm), map(std::move(mp)), rng(r) {}
        bool arrive(int, int element, bool is_active, const Rat&) override {
            if (is_active) active |= bit(element);
            return false;
        }
        Mask finalize() override {
            const ContentionMap::Entry* entry = map.find(active);
            if (!entry) throw std::invalid_argument("clairvoyant map undefined on realized set");
            std::vector<Rat> probs;
            for (const auto& c : entry->choices) probs.push_back(c.prob);
            return entry->choices[sample_index(probs, rng)].set;
        }
    };
    return {"clairvoyant",
            [&m, map = std::move(map), seed](std::uint64_t run_id) -> std::unique_ptr<OnlineCrmRun> {
                return std::make_unique<Run>(&m, map, CounterRng::seeded(seed).split(run_id));
            }};
}

// ---------------------------------------------------------------------------
// Exact selection probabilities y(w)
// ---------------------------------------------------------------------------

/// y_i(w) = Pr[i selected by phi_w] over the random order and R ~ d, computed
/// exactly by enumerating all n! orders against the full support.
inline std::vector<Rat> exact_y(const Matroid& m, const SubsetDistribution& d,
                                const SecretaryAlgorithm& alg, const std::vector<Rat>& w) {
    int n = m.size();
    if (n > 7) throw CapExceeded("exact_y: n > 7 (use the Monte Carlo mode)");
    OnlineCrm crm = phi_w(m, alg, w);
    std::vector<Rat> y(n, 0);
    Rat per_order = 1 / factorial(n);
    for_each_permutation(n, [&](const std::vector<int>& order) {
        for (const auto& [mask, p] : d.support()) {
            auto run = crm.start(0);
            ArrivalInstance res = run_online_crm(m, order, mask, *run);
            for (int i : elements(res.accepted)) y[i] += p * per_order;
        }
    });
    return y;
}

struct McEstimate {
    std::vector<Rat> y;  // empirical frequencies, exact fractions of trials
    int trials = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo counterpart of exact_y for larger ground sets.
inline McEstimate mc_y(const Matroid& m, const SubsetDistribution& d,
                       const SecretaryAlgorithm& alg, const std::vector<Rat>& w, int trials,
                       std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("mc_y: trials < 1");
    OnlineCrm crm = phi_w(m, alg, w);
    std::vector<long long> counts(m.size(), 0);
    CounterRng root = CounterRng::seeded(seed);
    for (int t = 0; t < trials; ++t) {
        CounterRng rng = root.split(t);
        Mask active = d.sample(rng);
        std::vector<int> order = rng.permutation(m.size());
        auto run = crm.start(t);
        ArrivalInstance res = run_online_crm(m, order, active, *run);
        for (int i : elements(res.accepted)) ++counts[i];
    }
    McEstimate est;
    est.trials = trials;
    est.seed = seed;
    for (long long c : counts) est.y.emplace_back(c, trials);
    return est;
}

// ---------------------------------------------------------------------------
// The weight-mixture solver (column generation on the zero-sum game)
// ---------------------------------------------------------------------------

struct WeightMixture {
    std::vector<std::pair<std::vector<Rat>, Rat>> atoms;  // (weight vector, probability)
};

struct MixtureResult {
    bool converged = false;
    WeightMixture mixture;
    std::vector<Rat> y_bar;      // exact selection probabilities under the mixture
    Rat guarantee = 0;           // min over x_i > 0 of alpha*gamma*y_i/x_i
    std::vector<Rat> diagnostic_lambda;  // separating element weights when not converged
    int iterations = 0;
    std::vector<Rat> master_trace;  // master value per iteration
};

/// Searches for a mixture W of weight vectors making phi_W an (alpha*gamma)-
/// competitive online CRM, by column generation: the master LP maximizes the
/// worst normalized coverage over collected columns y(w); the dual weights
/// lambda price the next column w = lambda / x, whose value is at least 1
/// whenever gamma is a valid ratio for the algorithm and alpha >= alpha*(d).
/// A priced column that cannot improve the master certifies failure, and
/// lambda is returned as the separating hyperplane.
inline MixtureResult solve_mixture(const Matroid& m, const SubsetDistribution& d,
                                   const SecretaryAlgorithm& alg, const Rat& gamma,
                                   const Rat& alpha, const Rat& eps = Rat(1, 1024),
                                   int iteration_cap = 100000) {
    if (gamma < 1 || alpha < 1) throw std::invalid_argument("solve_mixture: gamma, alpha >= 1");
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("solve_mixture: eps in (0,1)");
    int n = m.size();
    std::vector<Rat> x = d.marginals();
    std::vector<int> constrained;
    for (int i = 0; i < n; ++i)
        if (x[i] != 0) constrained.push_back(i);

    MixtureResult result;
    if (constrained.empty()) {
        result.converged = true;
        result.guarantee = 1;
        result.y_bar.assign(n, 0);
        result.mixture.atoms.push_back({std::vector<Rat>(n, 0), 1});
        return result;
    }

    Rat target = alpha * gamma;
    std::vector<std::vector<Rat>> col_w, col_y;
    std::vector<Rat> lambda(constrained.size(), Rat(1, static_cast<int>(constrained.size())));

    for (int iter = 0; iter < iteration_cap; ++iter) {
        result.iterations = iter + 1;
        // Best response to lambda: weights lambda_i / x_i.
        std::vector<Rat> w(n, 0);
        for (std::size_t k = 0; k < constrained.size(); ++k) w[constrained[k]] = lambda[k] / x[constrained[k]];
        std::vector<Rat> y = exact_y(m, d, alg, w);
        Rat priced = 0;
        for (std::size_t k = 0; k < constrained.size(); ++k)
            priced += lambda[k] * target * y[constrained[k]] / x[constrained[k]];

        Rat master_value = col_w.empty() ? Rat(0) : result.master_trace.back();
        if (priced <= master_value && master_value < 1 - eps) {
            // The dual prices certify the master optimum: no mixture of
            // phi_w maps reaches the target. lambda separates.
            result.diagnostic_lambda.assign(n, 0);
            for (std::size_t k = 0; k < constrained.size(); ++k)
                result.diagnostic_lambda[constrained[k]] = lambda[k];
            return result;
        }
        col_w.push_back(w);
        col_y.push_back(y);

        // Master: max z st sum_c mu_c * target * y^c_i / x_i >= z, sum mu = 1.
        LinearProgram lp;
        lp.maximize = true;
        lp.objective.assign(1 + col_w.size(), 0);
        lp.objective[0] = 1;
        for (std::size_t k = 0; k < constrained.size(); ++k) {
            std::vector<Rat> row(1 + col_w.size(), 0);
            row[0] = -1;
            for (std::size_t c = 0; c < col_w.size(); ++c)
                row[1 + c] = target * col_y[c][constrained[k]] / x[constrained[k]];
            lp.add_row(std::move(row), Relation::GreaterEq, 0);
        }
        {
            std::vector<Rat> row(1 + col_w.size(), 0);
            for (std::size_t c = 0; c < col_w.size(); ++c) row[1 + c] = 1;
            lp.add_row(std::move(row), Relation::Equal, 1);
        }
        LpSolution sol = solve(lp);
        if (sol.status != LpStatus::Optimal) throw std::logic_error("solve_mixture: master LP failed");
        result.master_trace.push_back(sol.objective);

        if (sol.objective >= 1 - eps) {
            result.converged = true;
            result.y_bar.assign(n, 0);
            for (std::size_t c = 0; c < col_w.size(); ++c) {
                Rat mu = sol.primal[1 + c];
                if (mu == 0) continue;
                result.mixture.atoms.push_back({col_w[c], mu});
                for (int i = 0; i < n; ++i) result.y_bar[i] += mu * col_y[c][i];
            }
            bool first = true;
            for (int i : constrained) {
                Rat g = target * result.y_bar[i] / x[i];
                if (first || g < result.guarantee) result.guarantee = g;
                first = false;
            }
            return result;
        }

        // New attack weights from the master duals (coverage rows have
        // nonpositive duals in a max problem; negate and normalize).
        Rat total = 0;
        for (std::size_t k = 0; k < constrained.size(); ++k) {
            lambda[k] = -sol.duals[k];
            if (lambda[k] < 0) lambda[k] = 0;
            total += lambda[k];
        }
        if (total == 0) {
            lambda.assign(constrained.size(), Rat(1, static_cast<int>(constrained.size())));
        } else {
            for (Rat& l : lambda) l /= total;
        }
    }
    // Iteration cap exhausted; return the latest attack weights as diagnostic.
    result.diagnostic_lambda.assign(n, 0);
    for (std::size_t k = 0; k < constrained.size(); ++k)
        result.diagnostic_lambda[constrained[k]] = lambda[k];
    return result;
}

/// The online CRM that draws w from a fixed mixture up front, then runs phi_w.
inline OnlineCrm phi_mixture(const Matroid& m, const SecretaryAlgorithm& alg,
                             WeightMixture mixture, std::uint64_t seed) {
    return {"phi_mixture[" + alg.name + "]",
            [&m, alg, mixture = std::move(mixture), seed](std::uint64_t run_id)
                -> std::unique_ptr<OnlineCrmRun> {
                CounterRng rng = CounterRng::seeded(seed).split(run_id);
                std::vector<Rat> probs;
                for (const auto& atom : mixture.atoms) probs.push_back(atom.second);
                const std::vector<Rat>& w = mixture.atoms[sample_index(probs, rng)].first;
                return std::make_unique<detail::PhiWRun>(m, alg.start(m), w);
            }};
}

// ---------------------------------------------------------------------------
// Fixed-order policy bound
// ---------------------------------------------------------------------------

struct FixedOrderResult {
    ExtRat best_alpha = ExtRat::of(1);  // 1 / optimal policy value
    Rat policy_value = 1;               // max over policies of min_i Pr[i in T]/x_i
    int num_states = 0;
};

/// The exact optimum of any online contention resolution policy when the
/// arrival order is fixed and known: an occupancy-measure LP over belief
/// states (conditional future distribution + accepted set). Activity prefixes
/// with identical conditional futures collapse into one state.
inline FixedOrderResult fixed_order_lower_bound(const Matroid& m, const SubsetDistribution& d,
                                                const std::vector<int>& order,
                                                int state_cap = 5000) {
    int n = m.size();
    if (static_cast<int>(order.size()) != n)
        throw std::invalid_argument("fixed_order: order must list all elements");
    if (n > 10) throw CapExceeded("fixed_order: n > 10");
    std::vector<Rat> x = d.marginals();
    std::vector<int> constrained;
    for (int i = 0; i < n; ++i)
        if (x[i] != 0) constrained.push_back(i);
    FixedOrderResult out;
    if (constrained.empty()) return out;

    // Belief states. The key restricts every consistent support mask to the
    // unseen positions; pasts with the same conditional future merge.
    struct Node {
        int t;
        Mask accepted;
        std::vector<std::pair<Mask, Rat>> belief;  // future-restricted, normalized
        Rat active_prob = 0;   // Pr[order[t] active | belief]
        bool can_accept = false;
        int child_inactive = -1, child_accept = -1, child_reject = -1;
    };
    std::vector<Node> nodes;
    std::map<std::tuple<int, Mask, std::vector<std::pair<Mask, Rat>>>, int> index;

    std::function<int(int, Mask, std::vector<std::pair<Mask, Rat>>)> intern =
        [&](int t, Mask accepted, std::vector<std::pair<Mask, Rat>> belief) -> int {
        auto key = std::make_tuple(t, accepted, belief);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        if (static_cast<int>(nodes.size()) >= state_cap)
            throw CapExceeded("fixed_order: state cap exceeded");
        int id = static_cast<int>(nodes.size());
        index.emplace(std::move(key), id);
        nodes.push_back({t, accepted, std::move(belief)});
        if (t == n) return id;

        int e = order[t];
        Mask future = 0;
        for (int k = t + 1; k < n; ++k) future |= bit(order[k]);
        Rat q = 0;
        std::map<Mask, Rat> with_e, without_e;
        for (const auto& [mask, p] : nodes[id].belief) {
            if (has(mask, e)) {
                q += p;
                with_e[mask & future] += p;
            } else {
                without_e[mask & future] += p;
            }
        }
        bool can_accept = q > 0 && m.independent(accepted | bit(e));
        nodes[id].active_prob = q;
        nodes[id].can_accept = can_accept;
        auto normalize = [](std::map<Mask, Rat> raw, const Rat& mass) {
            std::vector<std::pair<Mask, Rat>> out;
            for (auto& [mask, p] : raw) out.emplace_back(mask, p / mass);
            return out;
        };
        // Recursion can grow the node vector, so never hold references to
        // nodes[id] across the intern calls; ids themselves stay stable.
        int ci = -1, ca = -1, cr = -1;
        if (q < 1) ci = intern(t + 1, accepted, normalize(without_e, 1 - q));
        if (q > 0) {
            auto active_belief = normalize(with_e, q);
            if (can_accept) ca = intern(t + 1, accepted | bit(e), active_belief);
            cr = intern(t + 1, accepted, active_belief);
        }
        nodes[id].child_inactive = ci;
        nodes[id].child_accept = ca;
        nodes[id].child_reject = cr;
        return id;
    };

    std::vector<std::pair<Mask, Rat>> root_belief;
    for (const auto& e : d.support()) root_belief.push_back(e);
    int root = intern(0, 0, std::move(root_belief));
    out.num_states = static_cast<int>(nodes.size());

    // LP variables: z, one reach-flow per node, one accept-flow per decision
    // node. Flows carry nature's probabilities, so Pr[i in T] is a sum of
    // accept flows.
    int num_nodes = static_cast<int>(nodes.size());
    std::vector<int> accept_var(num_nodes, -1);
    int next_var = 1 + num_nodes;
    for (int id = 0; id < num_nodes; ++id)
        if (nodes[id].child_accept >= 0) accept_var[id] = next_var++;
    auto flow_var = [&](int id) { return 1 + id; };

    LinearProgram lp;
    lp.maximize = true;
    lp.objective.assign(next_var, 0);
    lp.objective[0] = 1;

    {  // root flow = 1
        std::vector<Rat> row(next_var, 0);
        row[flow_var(root)] = 1;
        lp.add_row(std::move(row), Relation::Equal, 1);
    }
    // Conservation: one row per non-root node, collecting every inbound edge
    // (children merge across pasts, so a node can have several parents).
    {
        std::vector<std::vector<Rat>> inbound(num_nodes, std::vector<Rat>());
        for (int id = 0; id < num_nodes; ++id) inbound[id].assign(next_var, 0);
        std::vector<bool> is_child(num_nodes, false);
        for (int id = 0; id < num_nodes; ++id) {
            const Node& node = nodes[id];
            if (node.t == n) continue;
            if (node.child_inactive >= 0) {
                inbound[node.child_inactive][flow_var(id)] += 1 - node.active_prob;
                is_child[node.child_inactive] = true;
            }
            if (node.child_accept >= 0) {
                inbound[node.child_accept][accept_var[id]] += 1;
                is_child[node.child_accept] = true;
            }
            if (node.child_reject >= 0) {
                // reject flow = active mass - accept flow
                inbound[node.child_reject][flow_var(id)] += node.active_prob;
                if (accept_var[id] >= 0) inbound[node.child_reject][accept_var[id]] -= 1;
                is_child[node.child_reject] = true;
            }
        }
        for (int id = 0; id < num_nodes; ++id) {
            if (!is_child[id]) continue;
            std::vector<Rat> row = std::move(inbound[id]);
            row[flow_var(id)] -= 1;
            lp.add_row(std::move(row), Relation::Equal, 0);
        }
    }
    // Acceptance cannot exceed the active mass at the node.
    for (int id = 0; id < num_nodes; ++id) {
        if (accept_var[id] < 0) continue;
        std::vector<Rat> row(next_var, 0);
        row[accept_var[id]] = 1;
        row[flow_var(id)] = -nodes[id].active_prob;
        lp.add_row(std::move(row), Relation::LessEq, 0);
    }
    // coverage: sum of accept flows for element i >= z * x_i
    for (int i : constrained) {
        std::vector<Rat> row(next_var, 0);
        row[0] = -x[i];
        for (int id = 0; id < num_nodes; ++id)
            if (accept_var[id] >= 0 && order[nodes[id].t] == i) row[accept_var[id]] = 1;
        lp.add_row(std::move(row), Relation::GreaterEq, 0);
    }
    LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal) throw std::logic_error("fixed_order: LP failed");
    out.policy_value = sol.objective;
    out.best_alpha = sol.objective == 0 ? ExtRat::inf() : ExtRat::of(1 / sol.objective);
    return out;
}

// ---------------------------------------------------------------------------
// The sample-then-resolve blueprint
// ---------------------------------------------------------------------------

struct BlueprintResult {
    Mask sample = 0;     // the observed prefix S
    Mask improving = 0;  // R(S), the active set handed to the CRM
    Mask accepted = 0;
};

/// One realization with everything fixed: the first `sample_size` arrivals
/// are observed only (fed to the CRM as inactive at their original
/// positions), and later arrivals are active exactly when they improve the
/// sample.
inline BlueprintResult blueprint_run(const WeightedMatroid& wm, const std::vector<int>& order,
                                     int sample_size, OnlineCrmRun& run) {
    const Matroid& m = wm.matroid();
    int n = m.size();
    if (static_cast<int>(order.size()) != n) throw std::invalid_argument("blueprint: bad order");
    if (sample_size < 0 || sample_size > n) throw std::invalid_argument("blueprint: bad sample size");
    BlueprintResult result;
    for (int t = 0; t < sample_size; ++t) result.sample |= bit(order[t]);
    result.improving = improving_elements(wm, result.sample);
    // Improving elements are disjoint from the sample, so they all arrive
    // after the observation phase; sample arrivals replay as inactive.
    result.accepted = run_online_crm(m, order, result.improving, run, &wm.weights()).accepted;
    return result;
}

/// The random-order secretary wrapper: draws the order and a Binomial(n,p)
/// sample-phase size, then runs the blueprint against a fresh CRM run.
inline BlueprintResult blueprint_secretary(const WeightedMatroid& wm, const Rat& p,
                                           const OnlineCrm& ocrs, CounterRng& rng,
                                           std::uint64_t run_id = 0) {
    if (p <= 0 || p >= 1) throw std::invalid_argument("blueprint: p outside (0,1)");
    int n = wm.matroid().size();
    std::vector<int> order = rng.permutation(n);
    int sample_size = 0;
    for (int i = 0; i < n; ++i) sample_size += rng.bernoulli(p) ? 1 : 0;
    auto run = ocrs.start(run_id);
    return blueprint_run(wm, order, sample_size, *run);
}

// ---------------------------------------------------------------------------
// Monte Carlo harness
// ---------------------------------------------------------------------------

struct SimulationReport {
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<Rat> active_freq;
    std::vector<Rat> selected_freq;
    std::vector<std::pair<double, double>> selected_wilson;  // 95% intervals
};

inline std::pair<double, double> wilson_interval(long long hits, long long trials) {
    if (trials == 0) return {0.0, 1.0};
    double z = 1.959963984540054;
    double p = static_cast<double>(hits) / trials;
    double z2 = z * z;
    double denom = 1 + z2 / trials;
    double center = (p + z2 / (2 * trials)) / denom;
    double half = z * std::sqrt(p * (1 - p) / trials + z2 / (4.0 * trials * trials)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Monte Carlo over (order, active set) pairs; every trial re-checks the CRM
/// contract via the harness.
inline SimulationReport simulate(const Matroid& m, const SubsetDistribution& d,
                                 const OnlineCrm& ocrs, int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("simulate: trials >= 1");
    if (m.size() != d.size()) throw std::invalid_argument("simulate: ground set mismatch");
    int n = m.size();
    std::vector<long long> active_counts(n, 0), selected_counts(n, 0);
    CounterRng root = CounterRng::seeded(seed);
    for (int t = 0; t < trials; ++t) {
        CounterRng rng = root.split(t);
        Mask active = d.sample(rng);
        std::vector<int> order = rng.permutation(n);
        auto run = ocrs.start(t);
        ArrivalInstance res = run_online_crm(m, order, active, *run);
        for (int i : elements(active)) ++active_counts[i];
        for (int i : elements(res.accepted)) ++selected_counts[i];
    }
    SimulationReport report;
    report.trials = trials;
    report.seed = seed;
    for (int i = 0; i < n; ++i) {
        report.active_freq.emplace_back(active_counts[i], trials);
        report.selected_freq.emplace_back(selected_counts[i], trials);
        report.selected_wilson.push_back(wilson_interval(selected_counts[i], trials));
    }
    return report;
}

}  // namespace matcrs
