#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "arcadian/engine.hpp"
#include "arcadian/oracle.hpp"

namespace {

using namespace arcadian;

// Parses the formula, closing it universally (with a warning) when free
// variables remain.
FormulaPtr load_formula(const std::string& text) {
  FormulaPtr f = parse_formula(text);
  auto fv = free_vars(f);
  if (!fv.empty()) {
    std::cerr << "warning: free variables";
    for (auto& v : fv) std::cerr << " " << v;
    std::cerr << "; taking the universal closure\n";
    f = universal_closure(f);
  }
  return f;
}

int cmd_prove(const std::string& text, int fuel, int max_eigen, const std::string& emit) {
  FormulaPtr f = load_formula(text);
  Automaton aut = build_automaton(f);
  ProveResult res = prove(aut, {fuel, max_eigen});
  if (res.outcome != ProveOutcome::Proved) {
    std::cout << (res.outcome == ProveOutcome::Exhausted ? "no proof (search space exhausted)"
                                                         : "no proof within fuel")
              << "\n";
    return 1;
  }
  if (emit == "json")
    std::cout << run_to_json(aut, res.run) << "\n";
  else if (emit == "dot")
    std::cout << run_to_dot(aut, res.run);
  else
    std::cout << print_term(res.term) << "\n";
  return 0;
}

int cmd_check(const std::string& formula_text, const std::string& term_source) {
  FormulaPtr f = parse_formula(formula_text);
  std::string term_text;
  if (term_source == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    term_text = os.str();
  } else {
    std::ifstream in(term_source);
    if (!in) {
      std::cerr << "error: cannot open " << term_source << "\n";
      return 2;
    }
    std::ostringstream os;
    os << in.rdbuf();
    term_text = os.str();
  }
  TermPtr m = parse_term(term_text);
  CheckResult r = type_check(Context{}, m, f);
  if (r.ok()) {
    std::cout << "accepted\n";
    return 0;
  }
  std::cout << "rejected: " << r.detail << "\n";
  return 1;
}

int cmd_automaton(const std::string& text, bool dump, const std::string& emit) {
  FormulaPtr f = load_formula(text);
  Automaton aut = build_automaton(f);
  if (emit == "dot") {
    std::cout << automaton_to_dot(aut);
    return 0;
  }
  if (dump) {
    std::cout << dump_table(aut);
    return 0;
  }
  std::cout << aut.states.size() << " states, " << aut.instructions.size()
            << " instructions\n";
  return 0;
}

int cmd_oracle(const std::string& text) {
  FormulaPtr f = parse_formula(text);
  bool ok = decide_prop(f);
  std::cout << (ok ? "valid" : "invalid") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proof search and proof checking for first-order intuitionistic logic"};
  app.require_subcommand(1);

  std::string formula, term_source = "-", emit = "term";
  int fuel = 24, max_eigen = 3;
  bool dump = false;

  auto* prove_cmd = app.add_subcommand("prove", "search for a proof of a formula");
  prove_cmd->add_option("formula", formula, "the formula to prove")->required();
  prove_cmd->add_option("--fuel", fuel, "search depth bound");
  prove_cmd->add_option("--max-eigen", max_eigen, "eigenvariable cap");
  prove_cmd->add_option("--emit", emit, "output format: term, json or dot")
      ->check(CLI::IsMember({"term", "json", "dot"}));

  auto* check_cmd = app.add_subcommand("check", "verify a proof term against a formula");
  check_cmd->add_option("--formula", formula, "the formula")->required();
  check_cmd->add_option("--term", term_source, "proof-term file, or - for stdin");

  auto* aut_cmd = app.add_subcommand("automaton", "build and inspect the automaton");
  aut_cmd->add_option("formula", formula, "the formula")->required();
  aut_cmd->add_flag("--dump", dump, "print the instruction table");
  aut_cmd->add_option("--emit", emit, "output format: term (summary) or dot")
      ->check(CLI::IsMember({"term", "dot"}));

  auto* oracle_cmd = app.add_subcommand("oracle", "decide a propositional formula");
  oracle_cmd->add_option("formula", formula, "the formula")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (prove_cmd->parsed()) return cmd_prove(formula, fuel, max_eigen, emit);
    if (check_cmd->parsed()) return cmd_check(formula, term_source);
    if (aut_cmd->parsed()) return cmd_automaton(formula, dump, emit);
    return cmd_oracle(formula);
  } catch (const arcadian::ParseError& e) {
    std::cerr << "error: " << e.what() << " at position " << e.pos << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
