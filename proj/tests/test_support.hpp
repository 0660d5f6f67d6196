#pragma once

// Random instance generators shared by the unit and acceptance suites.

#include "matcrs/dist.hpp"
#include "matcrs/matroid.hpp"
#include "matcrs/offline.hpp"
#include "matcrs/prng.hpp"

namespace testgen {

using namespace matcrs;

/// family: 0 uniform, 1 partition, 2 graphic, 3 explicit, 4 linear.
/// Loops are possible in every family except uniform.
inline Matroid random_matroid(int family, int n, CounterRng& rng) {
    switch (family) {
        case 0:
            return Matroid::uniform(n, static_cast<int>(rng.below(n + 1)));
        case 1: {
            int nblocks = 1 + static_cast<int>(rng.below(3));
            std::vector<std::vector<int>> blocks(nblocks);
            std::vector<int> caps(nblocks);
            for (int b = 0; b < nblocks; ++b) caps[b] = static_cast<int>(rng.below(3));
            for (int e = 0; e < n; ++e)
                if (rng.below(4) != 0) blocks[rng.below(nblocks)].push_back(e);
            return Matroid::partition(n, blocks, caps);
        }
        case 2: {
            int verts = 2 + static_cast<int>(rng.below(3));
            std::vector<std::pair<int, int>> edges;
            for (int e = 0; e < n; ++e)
                edges.push_back({static_cast<int>(rng.below(verts)), static_cast<int>(rng.below(verts))});
            return Matroid::graphic(verts, edges);
        }
        case 3:
            // a genuine matroid re-listed as an explicit family
            return random_matroid(static_cast<int>(rng.below(3)), n, rng).to_explicit();
        default: {
            int dim = 2 + static_cast<int>(rng.below(2));
            std::vector<std::vector<Rat>> cols(n, std::vector<Rat>(dim));
            for (auto& c : cols)
                for (auto& v : c) v = static_cast<int>(rng.below(5)) - 2;
            return Matroid::linear(cols);
        }
    }
}

inline SubsetDistribution random_distribution(int n, int max_support, CounterRng& rng) {
    int k = 1 + static_cast<int>(rng.below(max_support));
    std::vector<SubsetDistribution::Entry> pairs;
    for (int i = 0; i < k; ++i)
        pairs.emplace_back(rng.below(Mask{1} << n),
                           Rat(static_cast<int>(rng.below(8)) + 1, static_cast<int>(rng.below(4)) + 1));
    return SubsetDistribution::from_pairs(n, pairs);
}

/// A random map for a rank-1 matroid, defined on every subset: each active
/// set gets a random distribution over its singletons (and staying empty).
inline ContentionMap random_rank1_crm(int n, CounterRng& rng) {
    ContentionMap phi;
    for_each_subset(full_mask(n), [&](Mask r) {
        std::vector<ContentionMap::Choice> choices;
        Rat total = 0;
        std::vector<Rat> raw;
        int options = popcount(r) + 1;  // each singleton, or nothing
        for (int i = 0; i < options; ++i) {
            Rat v(static_cast<int>(rng.below(5)) + (i + 1 == options ? 0 : 1));
            raw.push_back(v);
            total += v;
        }
        if (total == 0) {
            raw.back() = 1;
            total = 1;
        }
        int idx = 0;
        for (int i : elements(r)) choices.push_back({bit(i), raw[idx++] / total});
        choices.push_back({0, raw[idx] / total});
        phi.add(r, std::move(choices));
    });
    return phi;
}

/// Exact random point of the matroid polytope: a convex combination of
/// independent-set indicators.
inline std::vector<Rat> random_marginals_in_polytope(const Matroid& m, CounterRng& rng) {
    std::vector<Mask> indep;
    for_each_subset(full_mask(m.size()), [&](Mask s) {
        if (m.independent(s)) indep.push_back(s);
    });
    int k = 1 + static_cast<int>(rng.below(4));
    std::vector<Rat> weights(k);
    Rat total = 0;
    for (Rat& w : weights) {
        w = static_cast<int>(rng.below(6)) + 1;
        total += w;
    }
    std::vector<Rat> x(m.size(), 0);
    for (int j = 0; j < k; ++j) {
        Mask s = indep[rng.below(indep.size())];
        for (int i : elements(s)) x[i] += weights[j] / total;
    }
    return x;
}

}  // namespace testgen
