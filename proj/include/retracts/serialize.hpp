#pragma once

// Interchange formats: JSON for every result the library produces, a small
// line-oriented text format for witnesses, and plain-text renderings of
// type trees and derivations.

#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "retracts/affine.hpp"
#include "retracts/analysis.hpp"
#include "retracts/oracle.hpp"
#include "retracts/terms.hpp"
#include "retracts/types.hpp"

namespace retracts {

using Json = nlohmann::json;

// Types and terms travel as their concrete syntax; everything already knows
// how to parse it back.
inline void to_json(Json& j, const Type& t) { j = to_string(t); }
inline void from_json(const Json& j, Type& t) {
  t = parse_type(j.get<std::string>());
}

inline void to_json(Json& j, const Term& t) { j = to_string(t); }
inline void from_json(const Json& j, Term& t) {
  t = parse_term(j.get<std::string>());
}

inline void to_json(Json& j, const RetractWitness& w) {
  j = Json{{"rho", w.rho},     {"tau", w.tau}, {"coder", w.coder},
           {"decoder", w.decoder}, {"env", w.env}, {"main", w.main_var}};
}
inline void from_json(const Json& j, RetractWitness& w) {
  j.at("rho").get_to(w.rho);
  j.at("tau").get_to(w.tau);
  j.at("coder").get_to(w.coder);
  j.at("decoder").get_to(w.decoder);
  w.env = j.value("env", TypeEnv{});
  w.main_var = j.value("main", "x");
}

namespace detail {

inline CfRule cf_rule_from_string(const std::string& s) {
  if (s == "Axiom") return CfRule::Axiom;
  if (s == "H") return CfRule::H;
  if (s == "N") return CfRule::N;
  if (s == "D") return CfRule::D;
  throw std::runtime_error("unknown derivation rule: " + s);
}

inline LpsRule lps_rule_from_string(const std::string& s) {
  if (s == "A1") return LpsRule::A1;
  if (s == "A2") return LpsRule::A2;
  if (s == "A4") return LpsRule::A4;
  if (s == "R1") return LpsRule::R1;
  if (s == "R2") return LpsRule::R2;
  throw std::runtime_error("unknown derivation rule: " + s);
}

}  // namespace detail

inline void to_json(Json& j, const CfDerivation& d) {
  j = Json{{"rule", to_string(d.rule)},
           {"rho", d.rho},
           {"tau", d.tau},
           {"premises", d.premises}};
  if (!d.discarded.empty()) j["discarded"] = d.discarded;
  if (!d.group_discarded.empty()) j["group_discarded"] = d.group_discarded;
}
inline void from_json(const Json& j, CfDerivation& d) {
  d.rule = detail::cf_rule_from_string(j.at("rule").get<std::string>());
  j.at("rho").get_to(d.rho);
  j.at("tau").get_to(d.tau);
  d.premises = j.value("premises", std::vector<CfDerivation>{});
  d.discarded = j.value("discarded", std::vector<Type>{});
  d.group_discarded =
      j.value("group_discarded", std::vector<std::vector<Type>>{});
}

inline void to_json(Json& j, const LpsDerivation& d) {
  j = Json{{"rule", to_string(d.rule)},
           {"rho", d.rho},
           {"tau", d.tau},
           {"premises", d.premises}};
  if (d.rule == LpsRule::A2) j["added"] = d.added;
}
inline void from_json(const Json& j, LpsDerivation& d) {
  d.rule = detail::lps_rule_from_string(j.at("rule").get<std::string>());
  j.at("rho").get_to(d.rho);
  j.at("tau").get_to(d.tau);
  d.premises = j.value("premises", std::vector<LpsDerivation>{});
  if (j.contains("added")) j.at("added").get_to(d.added);
}

inline void to_json(Json& j, const Refutation& r) {
  j = Json{{"kind", to_string(r.kind)},
           {"rho", r.rho},
           {"tau", r.tau},
           {"summary", refutation_summary(r)}};
  if (r.kind == Refutation::Kind::PathUnmatched) j["path"] = r.path;
  if (r.kind == Refutation::Kind::ArgumentUnsupported) {
    j["argument"] = r.argument;
    j["candidate_failures"] = r.candidate_failures;
  }
}

inline void to_json(Json& j, const WitnessReport& r) {
  j = Json{{"coder_well_typed", r.coder_well_typed},
           {"decoder_well_typed", r.decoder_well_typed},
           {"round_trip", r.round_trip},
           {"main_var_absent", r.main_var_absent},
           {"coder_affine", r.coder_affine},
           {"decoder_affine", r.decoder_affine},
           {"ok", r.ok()},
           {"affine", r.affine()}};
  if (!r.failure.empty()) j["failure"] = r.failure;
}

inline void to_json(Json& j, const Verdict& v) {
  j = Json{{"status", to_string(v.status)}, {"rho", v.rho}, {"tau", v.tau}};
  if (v.derivation) j["derivation"] = *v.derivation;
  if (v.witness) j["witness"] = *v.witness;
  if (v.strip) j["strip"] = *v.strip;
  if (v.refutation) j["refutation"] = *v.refutation;
}

inline void to_json(Json& j, const AgreementReport& r) {
  j = Json{{"pairs", r.pairs},
           {"affine_yes", r.affine_yes},
           {"witnesses", r.witnesses},
           {"budget_hits", r.budget_hits},
           {"undecided", r.undecided},
           {"verify_rejects", r.verify_rejects},
           {"max_pairs_needed", r.max_pairs_needed},
           {"max_decoders", r.max_decoders},
           {"max_coders", r.max_coders},
           {"seconds", r.seconds},
           {"agreed", r.agreed()},
           {"disagreements", r.disagreements},
           {"mutual_distinct", r.mutual_distinct}};
}

// ------------------------------------------------------------ witness text
//
// One keyword per line, everything after the keyword is concrete syntax:
//
//     rho (e->a)->c->a
//     tau (e->(a->c->a)->a)->a
//     main x
//     env E e
//     coder \y:e. ...
//     decoder \f:(e->(a->c->a)->a)->a. ...
//
// env may repeat; blank lines and lines starting with # are skipped.

inline std::string witness_to_text(const RetractWitness& w) {
  std::string out;
  out += "rho " + to_string(w.rho) + "\n";
  out += "tau " + to_string(w.tau) + "\n";
  out += "main " + w.main_var + "\n";
  for (const auto& [name, ty] : w.env)
    out += "env " + name + " " + to_string(ty) + "\n";
  out += "coder " + to_string(w.coder) + "\n";
  out += "decoder " + to_string(w.decoder) + "\n";
  return out;
}

inline RetractWitness witness_from_text(const std::string& text) {
  RetractWitness w;
  bool have_rho = false, have_tau = false, have_coder = false,
       have_decoder = false, have_main = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto bad = [&](const std::string& msg) {
    throw std::runtime_error("witness text, line " + std::to_string(lineno) +
                             ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    std::string key, rest;
    ls >> key;
    std::getline(ls, rest);
    std::size_t s = rest.find_first_not_of(" \t");
    rest = s == std::string::npos ? "" : rest.substr(s);
    if (rest.empty()) bad("keyword '" + key + "' without a payload");
    if (key == "rho") {
      w.rho = parse_type(rest);
      have_rho = true;
    } else if (key == "tau") {
      w.tau = parse_type(rest);
      have_tau = true;
    } else if (key == "main") {
      w.main_var = rest;
      have_main = true;
    } else if (key == "env") {
      std::istringstream es(rest);
      std::string name;
      es >> name;
      std::string ty;
      std::getline(es, ty);
      if (name.empty() || ty.find_first_not_of(" \t") == std::string::npos)
        bad("env needs a name and a type");
      w.env[name] = parse_type(ty);
    } else if (key == "coder") {
      w.coder = parse_term(rest);
      have_coder = true;
    } else if (key == "decoder") {
      w.decoder = parse_term(rest);
      have_decoder = true;
    } else {
      bad("unknown keyword '" + key + "'");
    }
  }
  auto require = [](bool have, const char* what) {
    if (!have)
      throw std::runtime_error(std::string("witness text: missing ") + what);
  };
  require(have_rho, "rho");
  require(have_tau, "tau");
  require(have_coder, "coder");
  require(have_decoder, "decoder");
  require(have_main, "main");
  return w;
}

// --------------------------------------------------------------- rendering

namespace detail {

inline void render_tree_rec(const TypeTree& t, const std::string& prefix,
                            std::string& out) {
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    bool last = i + 1 == t.children.size();
    out += prefix + "+- " + t.children[i].label + "\n";
    render_tree_rec(t.children[i], prefix + (last ? "   " : "|  "), out);
  }
}

template <typename Derivation>
void render_derivation_rec(const Derivation& d, int indent, std::string& out) {
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  out += to_string(d.rule);
  out += "  " + to_string(d.rho) + " <= " + to_string(d.tau);
  if constexpr (std::is_same_v<Derivation, CfDerivation>) {
    if (!d.discarded.empty()) {
      out += "  discarding";
      for (const Type& t : d.discarded) out += " " + to_string(t);
    }
  } else {
    if (d.rule == LpsRule::A2) out += "  adding " + to_string(d.added);
  }
  out += "\n";
  for (const auto& p : d.premises) render_derivation_rec(p, indent + 1, out);
}

}  // namespace detail

// The tree view of a type, argument subtrees below their result atom.
inline std::string render_tree(const Type& t) {
  TypeTree root = tree(t);
  std::string out = root.label + "\n";
  detail::render_tree_rec(root, "", out);
  return out;
}

// Indented derivation tree, conclusion first, premises below.
inline std::string render_derivation(const CfDerivation& d) {
  std::string out;
  detail::render_derivation_rec(d, 0, out);
  return out;
}

inline std::string render_derivation(const LpsDerivation& d) {
  std::string out;
  detail::render_derivation_rec(d, 0, out);
  return out;
}

}  // namespace retracts
