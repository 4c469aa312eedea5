#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "injury.hpp"

namespace eps {

// Ordinals below epsilon_0 in Cantor normal form: a sum of w^exp * coeff
// terms with strictly decreasing exponents and positive coefficients. The
// empty sum is 0.
struct Ordinal {
  struct Part {
    std::shared_ptr<const Ordinal> exp;
    std::uint64_t coeff = 1;
  };
  std::vector<Part> parts;

  bool is_zero() const { return parts.empty(); }
};

inline Ordinal o_zero() { return {}; }

inline Ordinal o_nat(std::uint64_t n) {
  Ordinal o;
  if (n > 0)
    o.parts.push_back({std::make_shared<const Ordinal>(o_zero()), n});
  return o;
}

inline Ordinal omega_pow(Ordinal exp, std::uint64_t coeff = 1) {
  Ordinal o;
  if (coeff > 0)
    o.parts.push_back({std::make_shared<const Ordinal>(std::move(exp)), coeff});
  return o;
}

inline int ordinal_cmp(const Ordinal& a, const Ordinal& b) {
  for (std::size_t i = 0;; ++i) {
    bool ea = i == a.parts.size(), eb = i == b.parts.size();
    if (ea && eb) return 0;
    if (ea) return -1;
    if (eb) return 1;
    int c = ordinal_cmp(*a.parts[i].exp, *b.parts[i].exp);
    if (c != 0) return c;
    if (a.parts[i].coeff != b.parts[i].coeff)
      return a.parts[i].coeff < b.parts[i].coeff ? -1 : 1;
  }
}

inline bool ordinal_lt(const Ordinal& a, const Ordinal& b) {
  return ordinal_cmp(a, b) < 0;
}

inline bool ordinal_eq(const Ordinal& a, const Ordinal& b) {
  return ordinal_cmp(a, b) == 0;
}

// Ordinal addition: terms of the left summand below the right's leading
// exponent are absorbed; equal leading exponents merge coefficients.
inline Ordinal ordinal_add(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return a;
  const auto& lead = b.parts.front();
  Ordinal out;
  for (const auto& p : a.parts) {
    int c = ordinal_cmp(*p.exp, *lead.exp);
    if (c <= 0) break;
    out.parts.push_back(p);
  }
  std::uint64_t coeff = lead.coeff;
  for (const auto& p : a.parts)
    if (ordinal_cmp(*p.exp, *lead.exp) == 0) {
      coeff += p.coeff;
      break;
    }
  out.parts.push_back({lead.exp, coeff});
  for (std::size_t i = 1; i < b.parts.size(); ++i) out.parts.push_back(b.parts[i]);
  return out;
}

inline std::string ordinal_to_string(const Ordinal& o) {
  if (o.is_zero()) return "0";
  std::string out;
  for (std::size_t i = 0; i < o.parts.size(); ++i) {
    if (i) out += " + ";
    const auto& p = o.parts[i];
    if (p.exp->is_zero()) {
      out += std::to_string(p.coeff);
      continue;
    }
    bool exp_is_one = p.exp->parts.size() == 1 && p.exp->parts[0].coeff == 1 &&
                      p.exp->parts[0].exp->is_zero();
    if (exp_is_one) {
      out += "w";
    } else {
      std::string e = ordinal_to_string(*p.exp);
      bool atomic = e.find(' ') == std::string::npos &&
                    e.find('*') == std::string::npos;
      out += "w^" + (atomic ? e : "(" + e + ")");
    }
    if (p.coeff > 1) out += "*" + std::to_string(p.coeff);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ordinal assigned to an image node: one w^h(a) for every prefix that steps
// through a "?", plus w^(h(node)+1) for the node itself. Heights come from
// the surveyed image tree and must strictly decrease along branches.
// ---------------------------------------------------------------------------

using HeightFn = std::function<std::uint64_t(const Path&)>;

inline Ordinal image_ordinal(const Path& node, const HeightFn& h) {
  Ordinal o = o_zero();
  for (std::size_t k = 0; k < node.size(); ++k) {
    if (!node[k].is_q) continue;
    Path a(node.begin(), node.begin() + static_cast<std::ptrdiff_t>(k));
    o = ordinal_add(o, omega_pow(o_nat(h(a))));
  }
  return ordinal_add(o, omega_pow(o_nat(h(node) + 1)));
}

struct DescentReport {
  bool ok = true;
  std::size_t at_i = 0, at_j = 0;
  std::string reason;
  std::vector<std::string> ordinals;  // rendered per step
};

// Along any trace passing the strict injury check, image ordinals must
// strictly descend whenever the source grows.
inline DescentReport verify_descent(const Trace& t, const HeightFn& h) {
  DescentReport r;
  InjuryReport pre = check_finite_injury(t);
  if (!pre.ok) {
    r.ok = false;
    r.at_i = pre.at_i;
    r.at_j = pre.at_j;
    r.reason = "injury precondition failed: " + pre.reason;
    return r;
  }
  std::vector<Ordinal> os;
  os.reserve(t.size());
  for (const auto& step : t) {
    os.push_back(image_ordinal(step.image, h));
    r.ordinals.push_back(ordinal_to_string(os.back()));
  }
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      if (!strict_prefix(t[i].source, t[j].source)) continue;
      if (!ordinal_lt(os[j], os[i])) {
        r.ok = false;
        r.at_i = i;
        r.at_j = j;
        r.reason = "ordinal failed to descend";
        return r;
      }
    }
  return r;
}

// Exact remaining height in a depth-K tree.
inline HeightFn depth_height(std::uint64_t k_max) {
  return [k_max](const Path& p) {
    return p.size() >= k_max ? 0 : k_max - p.size();
  };
}

// Remaining height within the observed tree: the union of the given nodes
// and their prefixes. Strictly decreasing along observed branches.
inline HeightFn observed_height(std::vector<Path> nodes) {
  return [nodes = std::move(nodes)](const Path& p) {
    std::uint64_t h = 0;
    for (const auto& n : nodes)
      if (is_prefix(p, n))
        h = std::max(h, static_cast<std::uint64_t>(n.size() - p.size()));
    return h;
  };
}

}  // namespace eps
