// Command-line front end for the retraction library.
//
// Exit codes: 0 for any computed answer (including "no" and "unknown"),
// 2 for unusable input, 3 when a search budget runs out, 4 when a witness
// fails verification.

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "retracts/retracts.hpp"

using namespace retracts;

namespace {

std::string yesno(bool b) { return b ? "yes" : "no"; }

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot read file: " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_witness(const RetractWitness& w) {
  std::cout << witness_to_text(w);
}

// Accept redirected `affine --witness` output directly: drop the decision
// line that precedes the payload there.
RetractWitness witness_from_file(const std::string& path) {
  std::string text = slurp(path);
  if (text.rfind("yes\n", 0) == 0) text.erase(0, 4);
  return witness_from_text(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"retractability of simple types"};
  app.require_subcommand(1);
  int rc = 0;

  // ------------------------------------------------------------- affine
  auto* affine = app.add_subcommand(
      "affine", "decide whether rho is an affine retract of tau");
  std::string af_rho, af_tau;
  bool af_witness = false, af_deriv = false, af_json = false;
  long af_budget = default_search_nodes;
  affine->add_option("rho", af_rho, "candidate retract")->required();
  affine->add_option("tau", af_tau, "enclosing type")->required();
  affine->add_flag("--witness", af_witness, "print the coder/decoder pair");
  affine->add_flag("--derivation", af_deriv, "print the derivation tree");
  affine->add_flag("--json", af_json, "machine-readable output");
  affine->add_option("--budget", af_budget, "search node budget");
  affine->callback([&] {
    Type rho = parse_type(af_rho), tau = parse_type(af_tau);
    Json j{{"rho", rho}, {"tau", tau}};
    if (af_witness || af_deriv) {
      std::optional<AffineResult> res = synthesize_affine(rho, tau, af_budget);
      j["affine"] = res.has_value();
      if (!af_json) std::cout << yesno(res.has_value()) << "\n";
      if (res && af_witness) {
        if (af_json) j["witness"] = res->witness;
        else print_witness(res->witness);
      }
      if (res && af_deriv) {
        if (af_json) j["derivation"] = res->derivation;
        else std::cout << render_derivation(res->derivation);
      }
    } else {
      bool yes = decide_affine(rho, tau, af_budget).has_value();
      j["affine"] = yes;
      if (!af_json) std::cout << yesno(yes) << "\n";
    }
    if (af_json) emit(j);
  });

  // ---------------------------------------------------------------- iso
  auto* iso_cmd = app.add_subcommand(
      "iso", "decide whether two types are equal up to argument order");
  std::string is_left, is_right;
  bool is_json = false;
  iso_cmd->add_option("left", is_left, "first type")->required();
  iso_cmd->add_option("right", is_right, "second type")->required();
  iso_cmd->add_flag("--json", is_json, "machine-readable output");
  iso_cmd->callback([&] {
    Type l = parse_type(is_left), r = parse_type(is_right);
    bool same = iso(l, r);
    if (is_json)
      emit(Json{{"left", l},
                {"right", r},
                {"iso", same},
                {"canonical_left", canonicalize(l)},
                {"canonical_right", canonicalize(r)}});
    else
      std::cout << yesno(same) << "\n";
  });

  // --------------------------------------------------------------- beta
  auto* beta = app.add_subcommand(
      "beta", "decide whether tau is rho under extra leading arguments");
  std::string bt_rho, bt_tau;
  bool bt_witness = false, bt_json = false;
  beta->add_option("rho", bt_rho, "candidate retract")->required();
  beta->add_option("tau", bt_tau, "enclosing type")->required();
  beta->add_flag("--witness", bt_witness, "print the coder/decoder pair");
  beta->add_flag("--json", bt_json, "machine-readable output");
  beta->callback([&] {
    Type rho = parse_type(bt_rho), tau = parse_type(bt_tau);
    std::optional<std::vector<Type>> strip = beta_retract(rho, tau);
    Json j{{"rho", rho}, {"tau", tau}, {"beta_retract", strip.has_value()}};
    if (strip) j["stripped"] = *strip;
    if (!bt_json) {
      std::cout << yesno(strip.has_value()) << "\n";
      if (strip && !strip->empty()) {
        std::cout << "stripped:";
        for (const Type& t : *strip) std::cout << " " << to_string(t);
        std::cout << "\n";
      }
    }
    if (bt_witness && strip) {
      std::optional<RetractWitness> w = beta_witness(rho, tau);
      if (w) {
        if (bt_json) j["witness"] = *w;
        else print_witness(*w);
      }
    }
    if (bt_json) emit(j);
  });

  // -------------------------------------------------------------- embed
  auto* embed = app.add_subcommand(
      "embed", "like beta, but every extra argument must be derivable from tau");
  std::string em_rho, em_tau;
  bool em_witness = false, em_json = false;
  embed->add_option("rho", em_rho, "candidate retract")->required();
  embed->add_option("tau", em_tau, "enclosing type")->required();
  embed->add_flag("--witness", em_witness, "print the coder/decoder pair");
  embed->add_flag("--json", em_json, "machine-readable output");
  embed->callback([&] {
    Type rho = parse_type(em_rho), tau = parse_type(em_tau);
    std::optional<std::vector<Term>> args = beta_embed(rho, tau);
    Json j{{"rho", rho}, {"tau", tau}, {"beta_embed", args.has_value()}};
    if (args) j["arguments"] = *args;
    if (!em_json) std::cout << yesno(args.has_value()) << "\n";
    if (em_witness && args) {
      std::optional<RetractWitness> w = beta_embed_witness(rho, tau);
      if (w) {
        if (em_json) j["witness"] = *w;
        else print_witness(*w);
      }
    }
    if (em_json) emit(j);
  });

  // ----------------------------------------------------------- classify
  auto* cls = app.add_subcommand(
      "classify", "run every procedure and report the strongest verdict");
  std::string cl_rho, cl_tau, cl_claimed;
  bool cl_witness = false, cl_deriv = false, cl_json = false;
  long cl_budget = default_search_nodes;
  cls->add_option("rho", cl_rho, "candidate retract")->required();
  cls->add_option("tau", cl_tau, "enclosing type")->required();
  cls->add_option("--claimed", cl_claimed,
                  "witness file to try when the search comes up empty");
  cls->add_flag("--witness", cl_witness, "print the witness if there is one");
  cls->add_flag("--derivation", cl_deriv, "print the derivation if there is one");
  cls->add_flag("--json", cl_json, "machine-readable output");
  cls->add_option("--budget", cl_budget, "search node budget");
  cls->callback([&] {
    Type rho = parse_type(cl_rho), tau = parse_type(cl_tau);
    std::optional<RetractWitness> claimed;
    if (!cl_claimed.empty()) claimed = witness_from_file(cl_claimed);
    Verdict v = classify(rho, tau, claimed, cl_budget);
    if (cl_json) {
      emit(Json(v));
      return;
    }
    std::cout << to_string(v.status) << "\n";
    if (v.refutation) std::cout << refutation_summary(*v.refutation) << "\n";
    if (cl_witness && v.witness) print_witness(*v.witness);
    if (cl_deriv && v.derivation) std::cout << render_derivation(*v.derivation);
  });

  // ------------------------------------------------------------- verify
  auto* verify = app.add_subcommand("verify", "check a witness file");
  std::string vf_file;
  bool vf_json = false;
  verify->add_option("file", vf_file, "witness in the text format")->required();
  verify->add_flag("--json", vf_json, "machine-readable output");
  verify->callback([&] {
    RetractWitness w = witness_from_file(vf_file);
    WitnessReport rep = verify_witness(w);
    if (vf_json) {
      emit(Json{{"witness", w}, {"report", rep}});
    } else {
      std::cout << "coder well-typed: " << yesno(rep.coder_well_typed) << "\n"
                << "decoder well-typed: " << yesno(rep.decoder_well_typed)
                << "\n"
                << "main variable absent: " << yesno(rep.main_var_absent)
                << "\n"
                << "round trip: " << yesno(rep.round_trip) << "\n"
                << "coder affine: " << yesno(rep.coder_affine) << "\n"
                << "decoder affine: " << yesno(rep.decoder_affine) << "\n";
      if (rep.ok())
        std::cout << "verdict: valid"
                  << (rep.affine() ? " affine" : ", not affine") << " witness\n";
      else
        std::cout << "verdict: INVALID (" << rep.failure << ")\n";
    }
    if (!rep.ok()) rc = 4;
  });

  // --------------------------------------------------------------- rank
  auto* rank_cmd = app.add_subcommand("rank", "depth of the tree view");
  std::string rk_type;
  bool rk_json = false;
  rank_cmd->add_option("type", rk_type, "type to measure")->required();
  rank_cmd->add_flag("--json", rk_json, "machine-readable output");
  rank_cmd->callback([&] {
    Type t = parse_type(rk_type);
    if (rk_json) emit(Json{{"type", t}, {"rank", t.rank()}});
    else std::cout << t.rank() << "\n";
  });

  // --------------------------------------------------------------- tree
  auto* tree_cmd = app.add_subcommand("tree", "draw the tree view of a type");
  std::string tr_type;
  bool tr_json = false;
  tree_cmd->add_option("type", tr_type, "type to draw")->required();
  tree_cmd->add_flag("--json", tr_json, "machine-readable output");
  tree_cmd->callback([&] {
    Type t = parse_type(tr_type);
    if (tr_json) emit(Json{{"type", t}, {"tree", render_tree(t)}});
    else std::cout << render_tree(t);
  });

  // -------------------------------------------------------------- paths
  auto* paths_cmd =
      app.add_subcommand("paths", "root-to-leaf words of the tree view");
  std::string pa_type;
  bool pa_json = false;
  paths_cmd->add_option("type", pa_type, "type to walk")->required();
  paths_cmd->add_flag("--json", pa_json, "machine-readable output");
  paths_cmd->callback([&] {
    Type t = parse_type(pa_type);
    std::vector<PathWord> ws = paths(t);
    if (pa_json) {
      emit(Json{{"type", t}, {"paths", ws}});
    } else {
      for (const PathWord& w : ws) std::cout << to_string(w) << "\n";
    }
  });

  // ------------------------------------------------------------ delayed
  auto* delayed_cmd = app.add_subcommand(
      "delayed", "arguments sitting at odd depth along repeated head atoms");
  std::string dl_type;
  bool dl_json = false;
  delayed_cmd->add_option("type", dl_type, "type to inspect")->required();
  delayed_cmd->add_flag("--json", dl_json, "machine-readable output");
  delayed_cmd->callback([&] {
    Type t = parse_type(dl_type);
    std::vector<std::pair<Type, int>> ds = delayed_arguments(t);
    if (dl_json) {
      Json arr = Json::array();
      for (const auto& [ty, depth] : ds)
        arr.push_back(Json{{"depth", depth}, {"type", ty}});
      emit(Json{{"type", t}, {"delayed", arr}});
    } else {
      for (const auto& [ty, depth] : ds)
        std::cout << depth << ": " << to_string(ty) << "\n";
    }
  });

  // ------------------------------------------------------- oracle-suite
  auto* suite = app.add_subcommand(
      "oracle-suite",
      "compare the derivation search against brute-force enumeration");
  std::vector<std::string> os_atoms = {"a", "b"};
  int os_max_atoms = 4, os_threads = 0, os_depth = 8, os_pool = 2;
  long os_max_pairs = 20000, os_sample = 0;
  unsigned os_seed = 0;
  bool os_json = false;
  suite->add_option("--atoms", os_atoms, "atom names")->delimiter(',');
  suite->add_option("--max-atoms", os_max_atoms, "largest type size");
  suite->add_option("--threads", os_threads, "worker threads (0 = all cores)");
  suite->add_option("--depth", os_depth, "term depth budget");
  suite->add_option("--pool", os_pool, "environment variables per atom");
  suite->add_option("--max-pairs", os_max_pairs,
                    "coder/decoder combinations per query");
  suite->add_option("--sample", os_sample,
                    "check this many random pairs instead of all of them");
  suite->add_option("--seed", os_seed, "random seed for --sample");
  suite->add_flag("--json", os_json, "machine-readable output");
  suite->callback([&] {
    EnumBudget budget;
    budget.max_term_depth = os_depth;
    budget.env_pool_per_type = os_pool;
    budget.max_pairs = os_max_pairs;

    if (os_sample > 0) {
      std::vector<Type> universe = all_canonical_types(os_atoms, os_max_atoms);
      std::mt19937 rng(os_seed);
      std::uniform_int_distribution<std::size_t> pick(0, universe.size() - 1);
      AffineSearcher searcher;
      long yes = 0;
      std::vector<std::pair<Type, Type>> bad;
      for (long i = 0; i < os_sample; ++i) {
        const Type& rho = universe[pick(rng)];
        const Type& tau = universe[pick(rng)];
        bool mine = searcher.decide(rho, tau).has_value();
        OracleOutcome oc = brute_force_affine(rho, tau, budget);
        if (mine) ++yes;
        if (mine != oc.witness.has_value() && bad.size() < 32)
          bad.emplace_back(rho, tau);
      }
      if (os_json) {
        emit(Json{{"mode", "sample"},
                  {"universe", universe.size()},
                  {"checked", os_sample},
                  {"retracts", yes},
                  {"agreed", bad.empty()},
                  {"disagreements", bad}});
      } else {
        std::cout << "sampled pairs: " << os_sample << "\n"
                  << "retracts: " << yes << "\n"
                  << "agreement: " << yesno(bad.empty()) << "\n";
        for (const auto& [r, t] : bad)
          std::cout << "  disagree: " << to_string(r) << "  vs  "
                    << to_string(t) << "\n";
      }
      return;
    }

    std::function<void(long, long)> progress;
    int last_decile = -1;
    if (!os_json)
      progress = [&](long done, long total) {
        int decile = static_cast<int>(done * 10 / total);
        if (decile != last_decile) {
          last_decile = decile;
          std::cerr << decile * 10 << "% " << std::flush;
          if (decile == 10) std::cerr << "\n";
        }
      };
    AgreementReport rep =
        run_agreement_suite(os_atoms, os_max_atoms, budget, os_threads, progress);
    if (os_json) {
      emit(Json(rep));
      return;
    }
    std::string atom_list;
    for (const std::string& a : os_atoms)
      atom_list += (atom_list.empty() ? "" : ",") + a;
    std::cout << "universe: " << rep.pairs << " ordered pairs over "
              << atom_list << ", up to " << os_max_atoms << " atoms\n"
              << "retracts: " << rep.affine_yes << "\n"
              << "oracle witnesses: " << rep.witnesses << "\n"
              << "agreement: " << yesno(rep.agreed()) << "\n"
              << "mutual retracts between distinct types: "
              << rep.mutual_distinct.size() << "\n"
              << "budget hits: " << rep.budget_hits << "\n"
              << "elapsed: " << rep.seconds << "s\n";
    for (const auto& [r, t] : rep.disagreements)
      std::cout << "  disagree: " << to_string(r) << "  vs  " << to_string(t)
                << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const budget_error& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
