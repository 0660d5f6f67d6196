// matcrs: uncontentiousness analysis for subset distributions over matroids.
//
// Subcommands:
//   alpha      exact uncontentiousness factor + optimal map synthesis
//   examples   the built-in example and closure-property suite
//   improving  improving-element distributions and their guarantees
//   online     scenario runner: mixtures, fixed-order bounds, simulation,
//              and the sample-then-resolve blueprint
//
// Exit codes: 0 ok, 1 check failure, 2 input error, 3 resource cap exceeded.

#include <CLI11.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "matcrs/matcrs.hpp"

using namespace matcrs;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const json& report, const std::string& out_path) {
    std::string text = report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::invalid_argument("cannot write file: " + out_path);
        out << text;
    }
}

void emit_csv(const std::vector<ExtRat>& ratios, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << "element,ratio\n";
    for (std::size_t i = 0; i < ratios.size(); ++i)
        out << i << "," << to_string(ratios[i]) << "\n";
}

json envelope(const std::string& kind, const std::string& inputs) {
    return {{"kind", kind}, {"version", kVersion}, {"inputs_hash", content_hash(inputs)}};
}

// ---------------------------------------------------------------------------
// alpha
// ---------------------------------------------------------------------------

int run_alpha(const std::string& matroid_path, const std::string& dist_path,
              const std::string& out_path, const std::string& csv_path, bool no_synthesis) {
    std::string mtext = read_file(matroid_path), dtext = read_file(dist_path);
    Matroid m = matroid_from_json(json::parse(mtext));
    SubsetDistribution d = dist_from_json(json::parse(dtext));

    json report = envelope("alpha_report", mtext + dtext);
    AlphaReport ar = alpha_star(m, d);
    report["alpha_star"] = to_string(ar.alpha);
    report["witness"] = mask_to_json(ar.witness);
    report["witness_expected_size"] = rat_to_string(ar.witness_expected_size);
    report["witness_expected_rank"] = rat_to_string(ar.witness_expected_rank);
    report["degenerate_empty_support"] = ar.degenerate;
    if (ar.loop_element >= 0) report["loop_element"] = ar.loop_element;
    json marg = json::array();
    for (const Rat& x : d.marginals()) marg.push_back(rat_to_string(x));
    report["marginals"] = marg;

    if (!no_synthesis) {
        SynthesisResult s = synthesize_crm(m, d);
        report["beta_star"] = rat_to_string(s.beta_star);
        if (s.crm) {
            report["crm"] = crm_to_json(*s.crm);
            CrmVerification v = verify_crm(m, d, *s.crm);
            report["per_element_ratios"] = ratios_to_json(v.ratios);
            if (!csv_path.empty()) emit_csv(v.ratios, csv_path);
        } else {
            report["crm"] = nullptr;  // variable cap hit; factor via enumeration only
        }
    }
    std::cout << "alpha_star: " << to_string(ar.alpha) << "\n";
    emit(report, out_path);
    return 0;
}

// ---------------------------------------------------------------------------
// examples
// ---------------------------------------------------------------------------

struct ExampleResult {
    std::string name;
    bool pass = false;
    json details;
};

ExampleResult example_half_random_base() {
    // k-uniform, R = empty half the time, otherwise a uniformly random base:
    // 1-uncontentious yet positively correlated.
    int n = 4, k = 2;
    Matroid m = Matroid::uniform(n, k);
    std::vector<SubsetDistribution::Entry> pairs{{0, Rat(1, 2)}};
    for_each_subset(full_mask(n), [&](Mask s) {
        if (popcount(s) == k) pairs.emplace_back(s, Rat(1, 12));
    });
    SubsetDistribution d = SubsetDistribution::from_pairs(n, pairs);
    AlphaReport ar = alpha_star(m, d);
    Rat marginal = d.marginals()[0];  // k/2n
    Rat joint = 0;
    for (const auto& [mask, p] : d.support())
        if (has(mask, 0) && has(mask, 1)) joint += p;
    Rat conditional = joint / d.marginals()[1];  // (k-1)/(n-1)
    bool pass = ar.alpha == ExtRat::of(1) && conditional > marginal;
    return {"half-random-base", pass,
            {{"alpha_star", to_string(ar.alpha)},
             {"marginal", rat_to_string(marginal)},
             {"conditional_given_other", rat_to_string(conditional)}}};
}

ExampleResult example_prefix_chain() {
    Matroid m2 = Matroid::uniform(2, 1);
    SubsetDistribution c2 = prefix_chain_distribution(2);
    AlphaReport a2 = alpha_star(m2, c2);
    SynthesisResult s2 = synthesize_crm(m2, c2);
    CrmVerification v2 = verify_crm(m2, c2, prefix_last_map(2));

    // at n=5 the chain is exactly the improving law of the rank-1 matroid
    std::vector<Rat> w = {5, 4, 3, 2, 1};
    WeightedMatroid wm(Matroid::uniform(5, 1), w);
    bool chain_is_improving = improving_distribution(wm, Rat(1, 2)) == prefix_chain_distribution(5);
    CrmVerification v5 = verify_crm(wm.matroid(), prefix_chain_distribution(5), prefix_last_map(5));

    bool pass = a2.alpha == ExtRat::of(Rat(3, 2)) && s2.beta_star == Rat(2, 3) &&
                v2.achieved_alpha == ExtRat::of(2) && chain_is_improving &&
                v5.achieved_alpha == ExtRat::of(2);
    return {"prefix-chain", pass,
            {{"alpha_star_n2", to_string(a2.alpha)},
             {"beta_star_n2", rat_to_string(s2.beta_star)},
             {"prefix_map_alpha", to_string(v2.achieved_alpha)},
             {"chain_equals_improving_n5", chain_is_improving}}};
}

ExampleResult example_disjoint_bases_chain() {
    // partition matroid with three pairwise-disjoint bases B1, B2, B3
    Matroid m = Matroid::partition(6, {{0, 1, 2}, {3, 4, 5}}, {1, 1});
    Mask b1 = mask_of({0, 3}), b2 = mask_of({1, 4}), b3 = mask_of({2, 5});
    SubsetDistribution d = SubsetDistribution::from_pairs(
        6, {{b1, Rat(1, 2)}, {b1 | b2, Rat(1, 4)}, {b1 | b2 | b3, Rat(1, 4)}});
    AlphaReport ar = alpha_star(m, d);
    ContentionMap phi;
    phi.add(b1, {{b1, 1}});
    phi.add(b1 | b2, {{b2, 1}});
    phi.add(b1 | b2 | b3, {{b3, 1}});
    CrmVerification v = verify_crm(m, d, phi);
    bool pass = ar.alpha == ExtRat::of(Rat(7, 4)) && ar.alpha <= ExtRat::of(2) &&
                v.achieved_alpha == ExtRat::of(2);
    return {"disjoint-bases-chain", pass,
            {{"alpha_star", to_string(ar.alpha)}, {"base_map_alpha", to_string(v.achieved_alpha)}}};
}

ExampleResult example_mixture_closure() {
    Matroid m = Matroid::uniform(3, 1);
    SubsetDistribution a = prefix_chain_distribution(3);
    SubsetDistribution b = SubsetDistribution::point(3, 0b001);
    SubsetDistribution mix = SubsetDistribution::mixture({a, b}, {Rat(1, 2), Rat(1, 2)});
    ExtRat aa = alpha_star(m, a).alpha, ab = alpha_star(m, b).alpha;
    ExtRat am = alpha_star(m, mix).alpha;
    ExtRat bound = aa < ab ? ab : aa;
    return {"mixture-closure", am <= bound,
            {{"component_alpha", json::array({to_string(aa), to_string(ab)})},
             {"mixture_alpha", to_string(am)}}};
}

ExampleResult example_minor_closure() {
    Matroid host = Matroid::uniform(4, 2);
    Matroid minor = host.minor(0, bit(0));  // contract one element
    SubsetDistribution d = prefix_chain_distribution(3);
    const std::vector<int>& keep = *minor.minor_elements();
    std::vector<SubsetDistribution::Entry> lifted;
    for (const auto& [mask, p] : d.support()) {
        Mask up = 0;
        for (int i : elements(mask)) up |= bit(keep[i]);
        lifted.emplace_back(up, p);
    }
    SubsetDistribution host_d = SubsetDistribution::from_pairs(4, lifted);
    ExtRat in_minor = alpha_star(minor, d).alpha;
    ExtRat in_host = alpha_star(host, host_d).alpha;
    return {"minor-closure", in_host <= in_minor,
            {{"alpha_in_minor", to_string(in_minor)}, {"alpha_in_host", to_string(in_host)}}};
}

ExampleResult example_subsampling_tightness() {
    int n = 6;
    Matroid m = Matroid::uniform(n, 1);
    std::vector<SubsetDistribution::Entry> pairs;
    for (int i = 0; i < n; ++i) pairs.emplace_back(bit(i), Rat(1, n + 1));
    pairs.emplace_back(full_mask(n), Rat(1, n + 1));
    SubsetDistribution base = SubsetDistribution::from_pairs(n, pairs);
    ExtRat before = alpha_star(m, base).alpha;
    ExtRat after = alpha_star(m, base.subsample(Rat(1, 2))).alpha;
    bool pass = before == ExtRat::of(Rat(12, 7)) && after == ExtRat::of(Rat(128, 85)) &&
                after <= before && after > ExtRat::of(Rat(3, 2));
    return {"subsampling-tightness", pass,
            {{"alpha_before", to_string(before)}, {"alpha_after_p_half", to_string(after)}}};
}

ExampleResult example_product_bound() {
    ExtRat bound = ExtRat::of(1 + Rat(58199, 100000));
    ExtRat worst = ExtRat::of(1);
    Matroid m = Matroid::uniform(2, 1);
    for (const auto& x : {std::vector<Rat>{Rat(1, 2), Rat(1, 2)},
                          std::vector<Rat>{Rat(1, 3), Rat(2, 3)},
                          std::vector<Rat>{Rat(1, 4), Rat(1, 4)}}) {
        ExtRat a = alpha_star(m, SubsetDistribution::product(x)).alpha;
        if (worst < a) worst = a;
    }
    return {"product-polytope-bound", worst <= bound,
            {{"worst_alpha", to_string(worst)}, {"bound", "1.58199"}}};
}

ExampleResult example_improving_triangle() {
    WeightedMatroid wm(Matroid::graphic(3, {{0, 1}, {1, 2}, {2, 0}}), {3, 2, 1});
    Rat p(1, 3);
    SubsetDistribution d = improving_distribution(wm, p);
    AlphaReport ar = alpha_star(wm.matroid(), d);
    bool pass = ar.alpha <= ExtRat::of(1 / p);
    return {"improving-triangle", pass,
            {{"alpha_star", to_string(ar.alpha)}, {"bound", rat_to_string(1 / p)}}};
}

int run_examples(int jobs, const std::string& out_path) {
    std::vector<std::function<ExampleResult()>> checks = {
        example_half_random_base, example_prefix_chain,  example_disjoint_bases_chain,
        example_mixture_closure,  example_minor_closure, example_subsampling_tightness,
        example_product_bound,    example_improving_triangle};

    std::vector<ExampleResult> results(checks.size());
    if (jobs > 1) {
        std::vector<std::future<ExampleResult>> futures;
        for (auto& c : checks) futures.push_back(std::async(std::launch::async, c));
        for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < checks.size(); ++i) results[i] = checks[i]();
    }

    json report = envelope("examples_report", "builtin");
    json items = json::array();
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.details.dump() << "\n";
        items.push_back({{"name", r.name}, {"pass", r.pass}, {"details", r.details}});
        all_pass = all_pass && r.pass;
    }
    report["checks"] = items;
    report["all_pass"] = all_pass;
    if (!out_path.empty()) emit(report, out_path);
    return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// improving
// ---------------------------------------------------------------------------

std::vector<Rat> parse_weight_list(const std::string& text) {
    std::vector<Rat> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_rat(item));
    return out;
}

int run_improving(const std::string& matroid_path, const std::string& weights_text,
                  const std::string& p_text, const std::string& out_path) {
    std::string mtext = read_file(matroid_path);
    Matroid m = matroid_from_json(json::parse(mtext));
    WeightedMatroid wm(m, parse_weight_list(weights_text));
    Rat p = parse_rat(p_text);

    json report = envelope("improving_report", mtext + weights_text + p_text);
    report["p"] = rat_to_string(p);
    SubsetDistribution d = improving_distribution(wm, p);
    report["distribution"] = dist_to_json(d);

    AlphaReport ar = alpha_star(m, d);
    report["alpha_star"] = to_string(ar.alpha);
    bool alpha_ok = ar.alpha <= ExtRat::of(1 / p);
    report["alpha_bound"] = rat_to_string(1 / p);
    report["alpha_within_bound"] = alpha_ok;

    // every optimum element is improving exactly when unsampled
    std::vector<Rat> x = d.marginals();
    Mask opt = opt_w(wm, full_mask(m.size()));
    bool marginals_ok = true;
    for (int i : elements(opt)) marginals_ok = marginals_ok && x[i] == 1 - p;
    report["optimum_marginals_equal_1mp"] = marginals_ok;

    Rat erank = 0, eweight = 0;
    for (const auto& [mask, pr] : d.support()) {
        erank += pr * weighted_rank(wm, mask);
        eweight += pr * wm.weight_of(mask);
    }
    Rat full = weighted_rank(wm, full_mask(m.size()));
    bool rank_ok = erank >= (1 - p) * full && eweight >= erank;
    report["expected_weighted_rank"] = rat_to_string(erank);
    report["expected_weight"] = rat_to_string(eweight);
    report["rank_retention_bound"] = rat_to_string((1 - p) * full);
    report["rank_retention_holds"] = rank_ok;

    bool lemmas_ok = true;
    if (m.size() <= 10) {
        ImprovingLemmaReport lem = check_improving_lemmas(wm, p);
        lemmas_ok = lem.ok();
        report["lemma_checks"] = {{"opt_intersection_monotone", lem.opt_intersection_monotone},
                                  {"rank_covers_opt_union", lem.rank_covers_opt_union},
                                  {"opt_charges_improving", lem.opt_charges_improving}};
    } else {
        report["lemma_checks"] = "skipped (n > 10)";
    }

    bool pass = alpha_ok && marginals_ok && rank_ok && lemmas_ok;
    report["all_pass"] = pass;
    std::cout << (pass ? "PASS" : "FAIL") << " improving: alpha_star " << to_string(ar.alpha)
              << " <= " << rat_to_string(1 / p) << (alpha_ok ? ": pass" : ": fail") << "\n";
    emit(report, out_path);
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// online
// ---------------------------------------------------------------------------

std::vector<int> parse_fixed_order(const std::string& text, int n) {
    // "fixed:[2,0,1]"
    json arr = json::parse(text.substr(std::string("fixed:").size()));
    std::vector<int> order = arr.get<std::vector<int>>();
    std::vector<bool> seen(n, false);
    if (static_cast<int>(order.size()) != n)
        throw std::invalid_argument("order must list all elements");
    for (int e : order) {
        if (e < 0 || e >= n || seen[e]) throw std::invalid_argument("order is not a permutation");
        seen[e] = true;
    }
    return order;
}

SecretaryAlgorithm algorithm_by_name(const std::string& name, int n) {
    if (name == "dynkin") return dynkin(n);
    if (name == "greedy") return greedy_online();
    throw std::invalid_argument("unknown algorithm: " + name);
}

int run_online(const std::string& scenario_path, const std::string& out_path,
               const json& overrides) {
    std::string stext = read_file(scenario_path);
    json scenario = json::parse(stext);
    for (const auto& [key, value] : overrides.items()) scenario[key] = value;
    std::string task = scenario.at("task").get<std::string>();
    json report = envelope("online_report", stext);
    report["task"] = task;

    if (task == "mixture") {
        Matroid m = matroid_from_json(scenario.at("matroid"));
        SubsetDistribution d = dist_from_json(scenario.at("distribution"));
        SecretaryAlgorithm alg =
            algorithm_by_name(scenario.value("algorithm", std::string("dynkin")), m.size());
        Rat gamma = scenario.contains("gamma") ? rat_from_json(scenario.at("gamma"))
                                               : 1 / probability_of_best(alg, m, m.size());
        Rat alpha;
        if (scenario.contains("alpha")) {
            alpha = rat_from_json(scenario.at("alpha"));
        } else {
            AlphaReport ar = alpha_star(m, d);
            if (ar.alpha.infinite) throw std::invalid_argument("distribution has no finite alpha");
            alpha = ar.alpha.value;
        }
        Rat eps = scenario.contains("eps") ? rat_from_json(scenario.at("eps")) : Rat(1, 1024);
        MixtureResult r = solve_mixture(m, d, alg, gamma, alpha, eps);
        report["gamma"] = rat_to_string(gamma);
        report["alpha"] = rat_to_string(alpha);
        report["eps"] = rat_to_string(eps);
        report["converged"] = r.converged;
        report["iterations"] = r.iterations;
        if (r.converged) {
            json atoms = json::array();
            for (const auto& [w, pr] : r.mixture.atoms) {
                json wj = json::array();
                for (const Rat& wi : w) wj.push_back(rat_to_string(wi));
                atoms.push_back({{"w", wj}, {"p", rat_to_string(pr)}});
            }
            report["mixture"] = atoms;
            json yb = json::array();
            for (const Rat& y : r.y_bar) yb.push_back(rat_to_string(y));
            report["y"] = yb;
            report["guarantee"] = rat_to_string(r.guarantee);
            report["achieved_alpha_bound"] = rat_to_string(gamma * alpha / (1 - eps));
            json trace = json::array();
            for (const Rat& v : r.master_trace) trace.push_back(rat_to_string(v));
            report["master_trace"] = trace;
        } else {
            json lam = json::array();
            for (const Rat& l : r.diagnostic_lambda) lam.push_back(rat_to_string(l));
            report["diagnostic_lambda"] = lam;
        }
        emit(report, out_path);
        return r.converged ? 0 : 1;
    }

    if (task == "lower_bound") {
        Matroid m = matroid_from_json(scenario.at("matroid"));
        SubsetDistribution d = dist_from_json(scenario.at("distribution"));
        std::string order_text = scenario.at("order").get<std::string>();
        if (order_text.rfind("fixed:", 0) != 0)
            throw std::invalid_argument("lower_bound needs a fixed order");
        std::vector<int> order = parse_fixed_order(order_text, m.size());
        FixedOrderResult r = fixed_order_lower_bound(m, d, order);
        report["best_alpha"] = to_string(r.best_alpha);
        report["policy_value"] = rat_to_string(r.policy_value);
        report["states"] = r.num_states;
        report["offline_alpha_star"] = to_string(alpha_star(m, d).alpha);
        std::cout << "best alpha = " << to_string(r.best_alpha) << "\n";
        emit(report, out_path);
        return 0;
    }

    if (task == "simulate") {
        Matroid m = matroid_from_json(scenario.at("matroid"));
        SubsetDistribution d = dist_from_json(scenario.at("distribution"));
        SecretaryAlgorithm alg =
            algorithm_by_name(scenario.value("algorithm", std::string("dynkin")), m.size());
        std::vector<Rat> w = scenario.contains("weights") ? rats_from_json(scenario.at("weights"))
                                                          : std::vector<Rat>(m.size(), 1);
        std::string mode = scenario.value("mode", std::string("exact"));
        std::vector<Rat> x = d.marginals();
        if (mode == "exact") {
            std::vector<Rat> y = exact_y(m, d, alg, w);
            json yj = json::array(), ratios = json::array();
            for (int i = 0; i < m.size(); ++i) {
                yj.push_back(rat_to_string(y[i]));
                if (x[i] == 0) {
                    ratios.push_back("0");
                } else if (y[i] == 0) {
                    ratios.push_back("inf");
                } else {
                    ratios.push_back(rat_to_string(x[i] / y[i]));
                }
            }
            report["mode"] = "exact";
            report["y"] = yj;
            report["ratios"] = ratios;
        } else if (mode == "mc") {
            int trials = scenario.value("trials", 10000);
            std::uint64_t seed = scenario.value("seed", 0);
            SimulationReport sim = simulate(m, d, phi_w(m, alg, w), trials, seed);
            report["mode"] = "mc";
            report["trials"] = trials;
            report["seed"] = seed;
            json freq = json::array(), active = json::array(), wilson = json::array();
            for (int i = 0; i < m.size(); ++i) {
                freq.push_back(rat_to_string(sim.selected_freq[i]));
                active.push_back(rat_to_string(sim.active_freq[i]));
                wilson.push_back({sim.selected_wilson[i].first, sim.selected_wilson[i].second});
            }
            report["empirical"] = {
                {"selected_freq", freq}, {"active_freq", active}, {"wilson95", wilson}};
        } else {
            throw std::invalid_argument("unknown mode: " + mode);
        }
        emit(report, out_path);
        return 0;
    }

    if (task == "blueprint") {
        Matroid m = matroid_from_json(scenario.at("matroid"));
        WeightedMatroid wm(m, rats_from_json(scenario.at("weights")));
        Rat p = rat_from_json(scenario.at("p"));
        int trials = scenario.value("trials", 2000);
        std::uint64_t seed = scenario.value("seed", 0);

        SubsetDistribution d = improving_distribution(wm, p);
        SynthesisResult syn = synthesize_crm(m, d);
        if (!syn.crm) throw CapExceeded("blueprint: synthesis cap exceeded");
        report["crm_beta_star"] = rat_to_string(syn.beta_star);

        // exact composition value: E[w(phi(R(S)))] over all samples
        Rat exact = 0;
        for_each_subset(full_mask(m.size()), [&](Mask s) {
            Rat prob = rat_pow(p, popcount(s)) * rat_pow(1 - p, m.size() - popcount(s));
            Mask r = improving_elements(wm, s);
            const ContentionMap::Entry* entry = syn.crm->find(r);
            for (const auto& choice : entry->choices)
                exact += prob * choice.prob * wm.weight_of(choice.set);
        });
        Rat bound = syn.beta_star * (1 - p) * weighted_rank(wm, full_mask(m.size()));
        report["exact_expected_weight"] = rat_to_string(exact);
        report["composition_bound"] = rat_to_string(bound);
        bool pass = exact >= bound;
        report["bound_holds"] = pass;

        OnlineCrm crm = clairvoyant_map(m, *syn.crm, seed + 1);
        CounterRng rng = CounterRng::seeded(seed);
        double total = 0;
        for (int t = 0; t < trials; ++t) {
            BlueprintResult res = blueprint_secretary(wm, p, crm, rng, t);
            total += rat_to_double(wm.weight_of(res.accepted));
        }
        report["trials"] = trials;
        report["seed"] = seed;
        report["empirical_expected_weight"] = total / trials;
        emit(report, out_path);
        return pass ? 0 : 1;
    }

    throw std::invalid_argument("unknown task: " + task);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uncontentiousness analysis for subset distributions over matroids"};
    app.require_subcommand(1);

    std::string matroid_path, dist_path, out_path, csv_path, weights_text, p_text, scenario_path;
    std::string mode_flag, order_flag;
    long long trials_flag = -1, seed_flag = -1;
    bool no_synthesis = false;
    int jobs = 1;

    CLI::App* alpha = app.add_subcommand("alpha", "exact uncontentiousness factor and optimal map");
    alpha->add_option("--matroid", matroid_path, "matroid descriptor file")->required();
    alpha->add_option("--dist", dist_path, "distribution descriptor file")->required();
    alpha->add_option("--out", out_path, "write the JSON report here instead of stdout");
    alpha->add_option("--csv", csv_path, "write per-element ratios as CSV");
    alpha->add_flag("--no-synthesis", no_synthesis, "skip the LP synthesis step");

    CLI::App* examples = app.add_subcommand("examples", "run the built-in example suite");
    examples->add_option("--jobs", jobs, "run independent scenarios concurrently");
    examples->add_option("--out", out_path, "write the JSON report here");

    CLI::App* improving = app.add_subcommand("improving", "improving-element distribution report");
    improving->add_option("--matroid", matroid_path, "matroid descriptor file")->required();
    improving->add_option("--weights", weights_text, "comma-separated rational weights")->required();
    improving->add_option("--p", p_text, "sampling probability in (0,1)")->required();
    improving->add_option("--out", out_path, "write the JSON report here");

    CLI::App* online = app.add_subcommand("online", "run an online scenario file");
    online->add_option("--scenario", scenario_path, "scenario descriptor file")->required();
    online->add_option("--out", out_path, "write the JSON report here");
    online->add_option("--mode", mode_flag, "override the scenario mode (exact|mc)");
    online->add_option("--trials", trials_flag, "override the Monte Carlo trial count");
    online->add_option("--seed", seed_flag, "override the random seed");
    online->add_option("--order", order_flag, "override the arrival order (random|fixed:[...])");

    CLI11_PARSE(app, argc, argv);

    try {
        if (alpha->parsed())
            return run_alpha(matroid_path, dist_path, out_path, csv_path, no_synthesis);
        if (examples->parsed()) return run_examples(jobs, out_path);
        if (improving->parsed()) return run_improving(matroid_path, weights_text, p_text, out_path);
        if (online->parsed()) {
            json overrides = json::object();
            if (!mode_flag.empty()) overrides["mode"] = mode_flag;
            if (trials_flag >= 0) overrides["trials"] = trials_flag;
            if (seed_flag >= 0) overrides["seed"] = seed_flag;
            if (!order_flag.empty()) overrides["order"] = order_flag;
            return run_online(scenario_path, out_path, overrides);
        }
    } catch (const CapExceeded& e) {
        std::cerr << "resource cap exceeded: " << e.what() << "\n";
        try {
            emit({{"kind", "error"}, {"version", kVersion}, {"cap_exceeded", e.what()}}, out_path);
        } catch (...) {
        }
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
