#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace eps {

// ---------------------------------------------------------------------------
// Random rank-one instances. Matrices stay application-free so every
// declared function has rank one; applications of other keys appear only in
// witness / bound / subject position, where they make the instances
// re-entrant without raising the rank. Parameters of critical formulas are
// always numerals. Output is instance-file text, reproducible from the seed
// alone (the raw engine stream is sampled with modulo, never through
// distribution objects, which vary across library implementations).
// ---------------------------------------------------------------------------

struct GenConfig {
  std::uint64_t seed = 0;
  std::uint32_t formulas = 4;     // critical formulas to emit
  std::uint64_t max_witness = 6;  // numerals are drawn from 0..max_witness
};

namespace detail {

class InstanceGen {
 public:
  explicit InstanceGen(const GenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  std::string run() {
    std::string out = "# generated instance\n";
    std::uint32_t n_fns = 2 + pick(3);
    arities_.clear();
    for (std::uint32_t i = 0; i < n_fns; ++i) {
      std::uint32_t arity = pick(3);
      arities_.push_back(arity);
      out += "skolem f" + std::to_string(i) + "(" + std::to_string(arity) +
             ") := exists x. " + matrix(arity) + "\n";
    }
    for (std::uint32_t i = 0; i < cfg_.formulas; ++i) out += crit_line();
    return out;
  }

 private:
  std::uint64_t pick(std::uint64_t n) { return rng_() % n; }

  std::string numeral() { return std::to_string(pick(cfg_.max_witness + 1)); }

  // var-bearing term for matrices
  std::string open_term(std::uint32_t arity) {
    switch (pick(4)) {
      case 0:
        return "x";
      case 1:
        return "S x";
      case 2:
        if (arity > 0) return "y" + std::to_string(1 + pick(arity));
        return "x";
      default:
        return numeral();
    }
  }

  std::string matrix(std::uint32_t arity) {
    std::uint64_t atoms = 1 + pick(2);
    std::string out;
    for (std::uint64_t i = 0; i < atoms; ++i) {
      if (i) out += pick(2) ? " & " : " | ";
      std::string lhs = i == 0 ? std::string("x") : open_term(arity);
      std::string rel = pick(3) == 0 ? "=" : pick(2) ? "<" : "<=";
      std::string atom = lhs + " " + rel + " " + open_term(arity);
      out += pick(4) == 0 ? "!(" + atom + ")" : atom;
    }
    return out;
  }

  // application of some declared function over numeral arguments
  std::string cross_ref() {
    std::uint64_t j = pick(arities_.size());
    std::string out = "f" + std::to_string(j) + "(";
    for (std::uint32_t a = 0; a < arities_[j]; ++a) {
      if (a) out += ", ";
      out += numeral();
    }
    return out + ")";
  }

  // closed term for witness / bound / subject position
  std::string closed_term() {
    switch (pick(5)) {
      case 0:
        return cross_ref();
      case 1:
        return "S " + cross_ref();
      default:
        return numeral();
    }
  }

  std::string crit_line() {
    std::uint64_t roll = pick(10);
    if (roll >= 9) return "crit pred " + closed_term() + "\n";
    std::uint64_t j = pick(arities_.size());
    std::string args;
    for (std::uint32_t a = 0; a < arities_[j]; ++a) {
      if (a) args += ", ";
      args += numeral();
    }
    std::string head = "f" + std::to_string(j) + "(" + args + ")";
    if (roll >= 6) return "crit induction " + head + " bound " + closed_term() + "\n";
    return "crit existence " + head + " witness " + closed_term() + "\n";
  }

  GenConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<std::uint32_t> arities_;
};

}  // namespace detail

inline std::string generate_instance(const GenConfig& cfg) {
  return detail::InstanceGen(cfg).run();
}

}  // namespace eps
