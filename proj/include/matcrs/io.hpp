#pragma once

#include <nlohmann/json.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "matcrs/dist.hpp"
#include "matcrs/matroid.hpp"
#include "matcrs/offline.hpp"

namespace matcrs {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// FNV-1a of the canonical input text; embedded in reports so runs are
/// traceable to their inputs.
inline std::string content_hash(std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// rationals
// ---------------------------------------------------------------------------

/// Accepts "p/q" strings or plain JSON integers.
inline Rat rat_from_json(const json& j) {
    if (j.is_number_integer()) return Rat(j.get<long long>());
    if (j.is_string()) return parse_rat(j.get<std::string>());
    throw std::invalid_argument("expected a rational ('p/q' string or integer)");
}

inline json rat_to_json(const Rat& r) { return rat_to_string(r); }

inline std::vector<Rat> rats_from_json(const json& j) {
    std::vector<Rat> out;
    for (const auto& v : j) out.push_back(rat_from_json(v));
    return out;
}

inline json mask_to_json(Mask s) { return json(elements(s)); }

inline Mask mask_from_json(const json& j, int n) {
    Mask s = 0;
    for (const auto& v : j) {
        int e = v.get<int>();
        if (e < 0 || e >= n) throw std::invalid_argument("element index out of range");
        s |= bit(e);
    }
    return s;
}

// ---------------------------------------------------------------------------
// matroid descriptors
// ---------------------------------------------------------------------------

inline Matroid matroid_from_json(const json& j) {
    if (j.contains("labels")) {
        json stripped = j;
        stripped.erase("labels");
        return matroid_from_json(stripped).with_labels(
            j.at("labels").get<std::vector<std::string>>());
    }
    std::string type = j.at("type").get<std::string>();
    if (type == "uniform") return Matroid::uniform(j.at("n").get<int>(), j.at("k").get<int>());
    if (type == "partition") {
        auto blocks = j.at("blocks").get<std::vector<std::vector<int>>>();
        auto caps = j.at("capacities").get<std::vector<int>>();
        int n = 0;
        if (j.contains("n")) {
            n = j.at("n").get<int>();
        } else {
            for (const auto& b : blocks)
                for (int e : b) n = std::max(n, e + 1);
        }
        return Matroid::partition(n, blocks, caps);
    }
    if (type == "graphic") {
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        return Matroid::graphic(j.at("vertices").get<int>(), edges);
    }
    if (type == "explicit") {
        int n = j.at("n").get<int>();
        std::vector<Mask> indep;
        for (const auto& s : j.at("independent")) indep.push_back(mask_from_json(s, n));
        Matroid m = Matroid::from_independent_sets(n, std::move(indep));
        // untrusted lists are vetted at load (exhaustive check caps at n=16)
        if (n <= Matroid::kAxiomCap) {
            AxiomReport axioms = m.check_axioms();
            if (!axioms.ok)
                throw std::invalid_argument("explicit family is not a matroid (" + axioms.reason +
                                            " at " + mask_to_string(axioms.set_a) + ", " +
                                            mask_to_string(axioms.set_b) + ")");
        }
        return m;
    }
    if (type == "linear") {
        std::vector<std::vector<Rat>> cols;
        for (const auto& c : j.at("columns")) cols.push_back(rats_from_json(c));
        return Matroid::linear(std::move(cols));
    }
    throw std::invalid_argument("unknown matroid type: " + type);
}

inline json matroid_to_json(const Matroid& m) {
    json base = std::visit(
        [&](const auto& fam) -> json {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Matroid::Uniform>) {
                return {{"type", "uniform"}, {"n", m.size()}, {"k", fam.k}};
            } else if constexpr (std::is_same_v<T, Matroid::Partition>) {
                json blocks = json::array();
                for (Mask b : fam.blocks) blocks.push_back(mask_to_json(b));
                return {{"type", "partition"},
                        {"n", m.size()},
                        {"blocks", blocks},
                        {"capacities", fam.capacities}};
            } else if constexpr (std::is_same_v<T, Matroid::Graphic>) {
                json edges = json::array();
                for (auto [u, v] : fam.edges) edges.push_back({u, v});
                return {{"type", "graphic"}, {"vertices", fam.vertices}, {"edges", edges}};
            } else if constexpr (std::is_same_v<T, Matroid::Explicit>) {
                json indep = json::array();
                for (Mask s : fam.independent) indep.push_back(mask_to_json(s));
                return {{"type", "explicit"}, {"n", m.size()}, {"independent", indep}};
            } else if constexpr (std::is_same_v<T, Matroid::Linear>) {
                json cols = json::array();
                for (const auto& c : fam.columns) {
                    json col = json::array();
                    for (const Rat& v : c) col.push_back(rat_to_json(v));
                    cols.push_back(col);
                }
                return {{"type", "linear"}, {"columns", cols}};
            } else {
                // minors carry no descriptor of their own
                return matroid_to_json(m.to_explicit());
            }
        },
        m.family());
    if (!m.labels().empty()) base["labels"] = m.labels();
    return base;
}

// ---------------------------------------------------------------------------
// distribution descriptors
// ---------------------------------------------------------------------------

inline SubsetDistribution dist_from_json(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "explicit") {
        int n = j.at("n").get<int>();
        std::vector<SubsetDistribution::Entry> pairs;
        for (const auto& entry : j.at("support"))
            pairs.emplace_back(mask_from_json(entry.at("set"), n), rat_from_json(entry.at("p")));
        return SubsetDistribution::from_pairs(n, pairs);
    }
    if (type == "product") return SubsetDistribution::product(rats_from_json(j.at("x")));
    if (type == "improving") {
        Matroid m = matroid_from_json(j.at("matroid"));
        WeightedMatroid wm(std::move(m), rats_from_json(j.at("weights")));
        return improving_distribution(wm, rat_from_json(j.at("p")));
    }
    if (type == "mixture") {
        std::vector<SubsetDistribution> components;
        for (const auto& c : j.at("components")) components.push_back(dist_from_json(c));
        return SubsetDistribution::mixture(components, rats_from_json(j.at("weights")));
    }
    if (type == "subsample")
        return dist_from_json(j.at("base")).subsample(rat_from_json(j.at("p")));
    if (type == "chain") return prefix_chain_distribution(j.at("n").get<int>());
    throw std::invalid_argument("unknown distribution type: " + type);
}

/// Canonical serialized form: the explicit support.
inline json dist_to_json(const SubsetDistribution& d) {
    json support = json::array();
    for (const auto& [mask, p] : d.support())
        support.push_back({{"set", mask_to_json(mask)}, {"p", rat_to_json(p)}});
    return {{"type", "explicit"}, {"n", d.size()}, {"support", support}};
}

// ---------------------------------------------------------------------------
// contention maps and reports
// ---------------------------------------------------------------------------

inline json crm_to_json(const ContentionMap& crm) {
    json maps = json::array();
    for (const auto& entry : crm.entries) {
        json choices = json::array();
        for (const auto& c : entry.choices)
            choices.push_back({{"set", mask_to_json(c.set)}, {"p", rat_to_json(c.prob)}});
        maps.push_back({{"R", mask_to_json(entry.active)}, {"choices", choices}});
    }
    return maps;
}

inline ContentionMap crm_from_json(const json& j, int n) {
    ContentionMap crm;
    for (const auto& entry : j) {
        std::vector<ContentionMap::Choice> choices;
        for (const auto& c : entry.at("choices"))
            choices.push_back({mask_from_json(c.at("set"), n), rat_from_json(c.at("p"))});
        crm.add(mask_from_json(entry.at("R"), n), std::move(choices));
    }
    return crm;
}

inline json ext_rat_to_json(const ExtRat& r) { return to_string(r); }

inline json ratios_to_json(const std::vector<ExtRat>& ratios) {
    json out = json::array();
    for (const ExtRat& r : ratios) out.push_back(ext_rat_to_json(r));
    return out;
}

}  // namespace matcrs
