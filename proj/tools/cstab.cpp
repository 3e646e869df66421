// Command-line front end: prove sequents, extract countermodels, check
// models against the V-family frame conditions, and run the built-in
// regression corpus.
//
// Exit codes are the machine contract:
//   0  proved / countermodel found / conditions hold / corpus green
//   1  the opposite definite answer
//   2  a resource limit tripped before a definite answer
//   3  usage or parse error

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "cstab/corpus.hpp"
#include "cstab/engine.hpp"
#include "cstab/io.hpp"
#include "cstab/parse.hpp"

namespace {

using namespace cstab;

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitResource = 2;
constexpr int kExitUsage = 3;

struct Options {
  std::string logic = "ck";
  std::vector<std::string> premises;
  std::string goal;
  long max_nodes = 10000;
  int max_indices = 64;
  int max_depth = 2000;
  std::string cut;
  bool ea_prime = false;
  std::string format = "text";
  std::string model_file;
  std::string vocab;
};

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--logic", o.logic,
                  "logic preset: ck, ck+cut, CK, vc, VC, VCS (ck/CK and vc/VC differ)");
  cmd->add_option("--max-nodes", o.max_nodes, "tableau node budget");
  cmd->add_option("--max-indices", o.max_indices, "world index budget");
  cmd->add_option("--max-depth", o.max_depth, "rule applications per path");
  cmd->add_option("--cut", o.cut, "cut policy: off, analytic, hints=f1;f2");
  cmd->add_flag("--ea-prime", o.ea_prime, "replace box+ea by the analytic ea' rule");
  cmd->add_option("--format", o.format, "output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
}

std::optional<LogicPreset> build_preset(const Options& o, std::string& error) {
  auto preset = LogicPreset::by_name(o.logic);
  if (!preset) {
    error = "unknown logic '" + o.logic + "' (expected ck, ck+cut, CK, vc, VC or VCS)";
    return std::nullopt;
  }
  if (!o.cut.empty()) {
    if (!preset->has(RuleId::Cut)) {
      error = "logic " + preset->name + " has no cut rule; --cut does not apply";
      return std::nullopt;
    }
    CutPolicy policy;
    if (o.cut == "off") {
      policy.mode = CutMode::Off;
    } else if (o.cut == "analytic") {
      policy.mode = CutMode::Analytic;
    } else if (o.cut.rfind("hints=", 0) == 0) {
      policy.mode = CutMode::Hinted;
      policy.hints = parse_formula_list(o.cut.substr(6));
    } else {
      error = "bad --cut value '" + o.cut + "'";
      return std::nullopt;
    }
    *preset = preset->with_cut(policy);
  }
  if (o.ea_prime) {
    if (!preset->has(RuleId::Ea)) {
      error = "--ea-prime needs a logic with the ea rule (CK, VC, VCS)";
      return std::nullopt;
    }
    *preset = preset->with_ea_prime();
  }
  return preset;
}

json stats_to_json(const SearchStats& s) {
  return json{{"nodes", s.nodes},
              {"applications", s.applications},
              {"max_index", s.max_index},
              {"max_depth", s.max_depth},
              {"branches_closed", s.branches_closed},
              {"limit", s.limit_hit}};
}

void print_stats(const SearchStats& s) {
  std::cout << "nodes: " << s.nodes << ", applications: " << s.applications
            << ", max index: " << s.max_index << ", closed branches: " << s.branches_closed;
  if (!s.limit_hit.empty()) std::cout << ", limit hit: " << s.limit_hit;
  std::cout << "\n";
}

int run_prove(const Options& o, bool want_countermodel) {
  std::string error;
  auto preset = build_preset(o, error);
  if (!preset) {
    std::cerr << "error: " << error << "\n";
    return kExitUsage;
  }
  if (o.goal.empty()) {
    std::cerr << "error: --goal is required\n";
    return kExitUsage;
  }
  std::vector<Formula> premises;
  Formula goal;
  try {
    for (const auto& s : o.premises) premises.push_back(parse_formula(s));
    goal = parse_formula(o.goal);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const Limits limits{o.max_nodes, o.max_indices, o.max_depth};
  const Verdict v = prove(premises, goal, *preset, limits);

  const bool json_out = o.format == "json";
  json report{{"mode", want_countermodel ? "countermodel" : "prove"},
              {"logic", preset->name},
              {"stats", stats_to_json(v.stats)}};
  int code = kExitResource;
  switch (v.kind) {
    case Verdict::Kind::Closed: {
      code = want_countermodel ? kExitNo : kExitYes;
      report["verdict"] = "closed";
      if (v.proof) report["proof"] = to_json(*v.proof);
      if (!json_out) {
        std::cout << "closed: " << preset->name << " proves the sequent\n";
        print_stats(v.stats);
        if (v.proof) std::cout << proof_to_text(*v.proof);
      }
      break;
    }
    case Verdict::Kind::Open: {
      code = want_countermodel ? (v.countermodel ? kExitYes : kExitResource) : kExitNo;
      report["verdict"] = "open";
      report["saturated"] = v.saturated;
      report["certified"] = v.certified;
      if (v.violated_condition)
        report["violated_condition"] = condition_name(*v.violated_condition);
      if (v.countermodel) report["countermodel"] = to_json(*v.countermodel);
      if (!json_out) {
        std::cout << "open: not provable in " << preset->name
                  << (v.saturated ? " (saturated branch)" : "") << "\n";
        print_stats(v.stats);
        if (v.open_branch) std::cout << "branch:\n" << v.open_branch->to_text();
        if (v.countermodel) {
          std::cout << "countermodel (" << (v.certified ? "certified" : "not certified");
          if (v.violated_condition)
            std::cout << ", condition " << condition_name(*v.violated_condition) << " fails";
          std::cout << "):\n" << model_to_text(*v.countermodel);
        }
      }
      break;
    }
    case Verdict::Kind::ResourceOut: {
      code = kExitResource;
      report["verdict"] = "resource-out";
      if (!json_out) {
        std::cout << "resource limit hit before a definite answer\n";
        print_stats(v.stats);
      }
      break;
    }
  }
  if (json_out) std::cout << report.dump(2) << "\n";
  return code;
}

int run_check_model(const Options& o) {
  if (o.model_file.empty()) {
    std::cerr << "error: --model is required\n";
    return kExitUsage;
  }
  std::ifstream in(o.model_file);
  if (!in) {
    std::cerr << "error: cannot read " << o.model_file << "\n";
    return kExitUsage;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  PriestModel model;
  try {
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
      model = model_from_json(json::parse(text));
    else
      model = model_from_text(text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::set<Formula> vocab;
  try {
    if (!o.vocab.empty()) {
      for (const auto& f : parse_formula_list(o.vocab)) vocab.insert(f);
    } else {
      for (const auto& [f, rel] : model.access) vocab.insert(f);
      for (const auto& [name, ws] : model.valuation) vocab.insert(Formula::atom(name));
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  auto conditions = vc_conditions();
  if (o.logic == "VCS" || o.logic == "vcs" || o.logic == "Vcs")
    conditions.push_back(ConditionId::Cem);

  const ConditionReport report = check_conditions(model, vocab, conditions);
  if (o.format == "json") {
    json j = to_json(report);
    j["mode"] = "check-model";
    j["ok"] = report.all_satisfied();
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& v : report.verdicts) {
      std::cout << "condition (" << condition_name(v.id) << "): "
                << (v.satisfied ? "satisfied" : "violated");
      if (v.counterexample) std::cout << "  [" << v.counterexample->to_string() << "]";
      std::cout << "\n";
    }
  }
  return report.all_satisfied() ? kExitYes : kExitNo;
}

int run_corpus(const Options& o) {
  std::string error;
  auto preset = build_preset(o, error);
  if (!preset) {
    std::cerr << "error: " << error << "\n";
    return kExitUsage;
  }
  const Limits limits{o.max_nodes, o.max_indices, o.max_depth};
  const auto entries = cstab::run_corpus(*preset, limits);
  bool ok = !entries.empty();
  json items = json::array();
  for (const auto& e : entries) {
    ok = ok && e.ok();
    if (o.format == "json") {
      items.push_back(json{{"name", e.name},
                           {"replay", e.hand_replay_ok},
                           {"proved", e.proved},
                           {"proof_replay", e.proof_replay_ok},
                           {"nodes", e.nodes}});
    } else {
      std::cout << e.name << " [" << e.logic << "]: replay=" << (e.hand_replay_ok ? "ok" : "FAIL")
                << " prove=" << (e.proved ? "closed" : "FAIL")
                << " proof-replay=" << (e.proof_replay_ok ? "ok" : "FAIL")
                << " nodes=" << e.nodes << "\n";
    }
  }
  if (o.format == "json") {
    std::cout << json{{"mode", "corpus"}, {"logic", preset->name}, {"items", items}, {"ok", ok}}
                     .dump(2)
              << "\n";
  }
  return ok ? kExitYes : kExitNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tableau prover for the conditional logics ck, ck+cut, CK, vc, VC and VCS"};
  app.require_subcommand(1);

  Options prove_opts, cm_opts, check_opts, corpus_opts;
  corpus_opts.logic = "VCS";

  auto* cmd_prove = app.add_subcommand("prove", "decide premises |- goal");
  add_common_flags(cmd_prove, prove_opts);
  cmd_prove->add_option("--premise", prove_opts.premises, "premise formula (repeatable)");
  cmd_prove->add_option("--goal", prove_opts.goal, "goal formula");

  auto* cmd_cm = app.add_subcommand("countermodel", "search for a countermodel to premises |- goal");
  add_common_flags(cmd_cm, cm_opts);
  cmd_cm->add_option("--premise", cm_opts.premises, "premise formula (repeatable)");
  cmd_cm->add_option("--goal", cm_opts.goal, "goal formula");

  auto* cmd_check = app.add_subcommand("check-model", "check a model against the frame conditions");
  cmd_check->add_option("--model", check_opts.model_file, "model file (text or json)")->required();
  cmd_check->add_option("--vocab", check_opts.vocab,
                        "condition vocabulary, semicolon-separated formulas");
  cmd_check->add_option("--logic", check_opts.logic, "VCS adds the cem condition");
  cmd_check->add_option("--format", check_opts.format, "output format: text or json")
      ->check(CLI::IsMember({"text", "json"}));

  auto* cmd_corpus = app.add_subcommand("corpus", "replay and re-prove the built-in tableaux");
  add_common_flags(cmd_corpus, corpus_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (cmd_prove->parsed()) return run_prove(prove_opts, false);
    if (cmd_cm->parsed()) return run_prove(cm_opts, true);
    if (cmd_check->parsed()) return run_check_model(check_opts);
    if (cmd_corpus->parsed()) return run_corpus(corpus_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
